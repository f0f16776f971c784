//! Brute-force reference implementation on the full `2^(N+M+M~)` Hilbert
//! space. Ground truth for the single-excitation reduction, the noise
//! diagonal, partial traces and concurrence. Dense and deliberately
//! simple; guarded to at most [`MAX_QUBITS`] qubits.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermitian_sqrt, Decomposition};
use crate::metrics::BobDensityMatrix;
use crate::model::{bond_canonical_endpoints, ChainSpec, NoiseField, Site};

/// Largest total qubit count the reference implementation accepts.
pub const MAX_QUBITS: usize = 14;

/// A state vector over all `2^n` computational basis states. Bit `d` of a
/// basis index is the occupation of the site with canonical position `d`.
#[derive(Debug, Clone)]
pub struct FullState {
    amplitudes: Array1<Complex64>,
    n_qubits: usize,
}

impl FullState {
    pub fn new(amplitudes: Array1<Complex64>, n_qubits: usize) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "state has {} amplitudes, expected 2^{n_qubits}",
                amplitudes.len()
            )));
        }
        Ok(Self { amplitudes, n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    /// Total probability weight in the `k`-excitation sector.
    pub fn sector_weight(&self, k: u32) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(m, _)| (*m as u64).count_ones() == k)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

fn guard(spec: &ChainSpec) -> Result<usize> {
    let n = spec.dim();
    if n > MAX_QUBITS {
        return Err(Error::ReferenceTooLarge(n, MAX_QUBITS));
    }
    Ok(n)
}

/// The full many-body Hamiltonian as a dense real symmetric matrix:
/// XX hopping on every bond plus optional zz interactions and magnetic
/// fields.
pub fn full_hamiltonian(spec: &ChainSpec, noise: Option<&NoiseField>) -> Result<Array2<f64>> {
    let nq = guard(spec)?;
    if let Some(n) = noise {
        n.validate(spec)?;
    }
    let dim = 1usize << nq;
    let mut h = Array2::<f64>::zeros((dim, dim));
    for bond in spec.bonds() {
        let (a, b) = bond_canonical_endpoints(bond, spec)?;
        let j = spec.coupling(bond)?;
        for m in 0..dim {
            let ba = (m >> a) & 1;
            let bb = (m >> b) & 1;
            if ba != bb {
                let flipped = m ^ (1 << a) ^ (1 << b);
                h[[flipped, m]] += 2.0 * j;
            }
        }
    }
    if let Some(noise) = noise {
        for (bond, delta) in noise.deltas() {
            let (a, b) = bond_canonical_endpoints(bond, spec)?;
            for m in 0..dim {
                let za = 1.0 - 2.0 * ((m >> a) & 1) as f64;
                let zb = 1.0 - 2.0 * ((m >> b) & 1) as f64;
                h[[m, m]] += delta * za * zb;
            }
        }
        for (site, field) in noise.fields() {
            let a = site.canonical(spec)?;
            for m in 0..dim {
                h[[m, m]] += 2.0 * field * ((m >> a) & 1) as f64;
            }
        }
    }
    Ok(h)
}

/// `|W> (x) |00...0>`: the W state on Alice's branches, everything else
/// unexcited.
pub fn full_initial_state(spec: &ChainSpec) -> Result<FullState> {
    let nq = guard(spec)?;
    let mut amplitudes = Array1::<Complex64>::zeros(1 << nq);
    let amp = Complex64::new((spec.m_alice() as f64).sqrt().recip(), 0.0);
    for p in 1..=spec.m_alice() {
        let d = Site::Alice(p).canonical(spec)?;
        amplitudes[1usize << d] = amp;
    }
    FullState::new(amplitudes, nq)
}

/// Evolve an arbitrary full state for time `t` under the full Hamiltonian.
pub fn full_evolve_from(
    spec: &ChainSpec,
    noise: Option<&NoiseField>,
    state: &FullState,
    t: f64,
) -> Result<FullState> {
    if state.n_qubits != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, chain has {}",
            state.n_qubits,
            spec.dim()
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!("duration t = {t} must be finite and >= 0")));
    }
    let h = full_hamiltonian(spec, noise)?;
    let d = Decomposition::new(&h)?;
    FullState::new(d.evolve(state.amplitudes.view(), t, -1.0), state.n_qubits)
}

/// Exact evolution of the protocol's initial state.
pub fn full_evolve(spec: &ChainSpec, noise: Option<&NoiseField>, t: f64) -> Result<FullState> {
    let initial = full_initial_state(spec)?;
    full_evolve_from(spec, noise, &initial, t)
}

/// Read the amplitudes on the single-excitation kets, in canonical order.
pub fn single_excitation_amplitudes(
    state: &FullState,
    spec: &ChainSpec,
) -> Result<Array1<Complex64>> {
    if state.n_qubits != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, chain has {}",
            state.n_qubits,
            spec.dim()
        )));
    }
    Ok(Array1::from_iter((0..spec.dim()).map(|d| state.amplitudes[1usize << d])))
}

/// Exact partial trace over everything but Bob's branches, reported in the
/// zero/one-excitation basis of Bob's qubits.
pub fn partial_trace_bob(state: &FullState, spec: &ChainSpec) -> Result<BobDensityMatrix> {
    if state.n_qubits != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, chain has {}",
            state.n_qubits,
            spec.dim()
        )));
    }
    let m_bob = spec.m_bob();
    let env_bits = spec.m_alice() + spec.n_chain();
    let env_dim = 1usize << env_bits;
    let bob_dim = 1usize << m_bob;
    // Bob's qubits occupy the contiguous high bits, so a basis index splits
    // into (bob config, environment config) by shift and mask.
    let mut rho_full = Array2::<Complex64>::zeros((bob_dim, bob_dim));
    for env in 0..env_dim {
        for x in 0..bob_dim {
            let ax = state.amplitudes[(x << env_bits) | env];
            if ax == Complex64::ZERO {
                continue;
            }
            for y in 0..bob_dim {
                let ay = state.amplitudes[(y << env_bits) | env];
                rho_full[[x, y]] += ax * ay.conj();
            }
        }
    }
    let mut rho = Array2::<Complex64>::zeros((m_bob + 1, m_bob + 1));
    let basis_index = |row: usize| -> usize {
        if row == 0 {
            0
        } else {
            1usize << (row - 1)
        }
    };
    for row in 0..=m_bob {
        for col in 0..=m_bob {
            rho[[row, col]] = rho_full[[basis_index(row), basis_index(col)]];
        }
    }
    BobDensityMatrix::from_matrix(rho)
}

/// Exact two-qubit reduced state of Bob branches `i` and `j` (1-based),
/// basis `{|00>, |01>, |10>, |11>}` with `B_i` the left qubit.
pub fn partial_trace_pair(
    state: &FullState,
    spec: &ChainSpec,
    i: usize,
    j: usize,
) -> Result<Array2<Complex64>> {
    if state.n_qubits != spec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} qubits, chain has {}",
            state.n_qubits,
            spec.dim()
        )));
    }
    if i == j {
        return Err(Error::InvalidArgument("pair indices must differ".into()));
    }
    let bi = Site::Bob(i).canonical(spec)?;
    let bj = Site::Bob(j).canonical(spec)?;
    let pair_mask = (1usize << bi) | (1usize << bj);
    let dim = 1usize << state.n_qubits;
    let mut rho = Array2::<Complex64>::zeros((4, 4));
    for env in 0..dim {
        if env & pair_mask != 0 {
            continue;
        }
        let mut amps = [Complex64::ZERO; 4];
        for (slot, amp) in amps.iter_mut().enumerate() {
            let xi = (slot >> 1) & 1;
            let xj = slot & 1;
            *amp = state.amplitudes[env | (xi << bi) | (xj << bj)];
        }
        for a in 0..4 {
            for b in 0..4 {
                rho[[a, b]] += amps[a] * amps[b].conj();
            }
        }
    }
    Ok(rho)
}

/// Wootters concurrence of an arbitrary two-qubit density matrix.
///
/// Eigenvalue route: with `rho~ = (Y(x)Y) rho* (Y(x)Y)` and
/// `S = sqrt(rho)`, the concurrence is `max(0, l1 - l2 - l3 - l4)` where
/// `l` are the descending square roots of the eigenvalues of
/// `S rho~ S`.
pub fn wootters_concurrence(rho: &Array2<Complex64>) -> Result<f64> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit density matrix is {}x{}, expected 4x4",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let mut yy = Array2::<Complex64>::zeros((4, 4));
    yy[[0, 3]] = Complex64::new(-1.0, 0.0);
    yy[[1, 2]] = Complex64::new(1.0, 0.0);
    yy[[2, 1]] = Complex64::new(1.0, 0.0);
    yy[[3, 0]] = Complex64::new(-1.0, 0.0);
    let rho_conj = rho.mapv(|z| z.conj());
    let rho_tilde = yy.dot(&rho_conj).dot(&yy);
    let s = hermitian_sqrt(rho)?;
    let mut t = s.dot(&rho_tilde).dot(&s);
    // symmetrize away the rounding skew before the Hermitian eigensolve
    for a in 0..4 {
        for b in 0..a {
            let avg = 0.5 * (t[[a, b]] + t[[b, a]].conj());
            t[[a, b]] = avg;
            t[[b, a]] = avg.conj();
        }
    }
    let evals = hermitian_eigenvalues(&t)?;
    let mut roots: Vec<f64> = evals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}
