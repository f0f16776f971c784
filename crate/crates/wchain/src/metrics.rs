//! Transmission quality measures: Bob's reduced density matrix, the
//! W-state fidelity on either end, and pairwise concurrences.
//!
//! For a single-excitation pure state the reduced state of Bob's branches
//! is fully determined by the Bob amplitudes `c_{B_q}`:
//!
//! * top-left entry `1 - sum_q |c_{B_q}|^2` (no excitation with Bob),
//! * excited block `(p, q) = c_{B_p} c_{B_q}^*`,
//! * no coherence between the two blocks.
//!
//! Fidelity is taken against the phase-aligned W state on the matching
//! number of qubits; relative phases between Bob amplitudes lower it. The
//! pairwise concurrence reduces to `C_ij = 2 |c_{B_i} c_{B_j}|`.

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::AmplitudeVector;
use crate::linalg::hermitian_eigenvalues;
use crate::model::ChainSpec;

/// Bob's reduced density matrix in the basis
/// `{ no excitation, excitation on B_1, ..., excitation on B_M~ }`.
#[derive(Debug, Clone, PartialEq)]
pub struct BobDensityMatrix {
    matrix: Array2<Complex64>,
}

impl BobDensityMatrix {
    /// Wrap an explicit matrix, checking hermiticity and unit trace.
    pub fn from_matrix(matrix: Array2<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{}, expected square with dim >= 2",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for i in 0..matrix.nrows() {
            for j in 0..=i {
                let d = matrix[[i, j]] - matrix[[j, i]].conj();
                if d.norm() > 1e-12 {
                    return Err(Error::Numeric(format!(
                        "density matrix not Hermitian at ({i}, {j}): deviation {}",
                        d.norm()
                    )));
                }
            }
        }
        let trace: Complex64 = (0..matrix.nrows()).map(|i| matrix[[i, i]]).sum();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::Numeric(format!("density matrix trace = {trace}, expected 1")));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[[i, i]].re).sum()
    }

    /// Eigenvalues, ascending. All must be `>= -1e-12` for a physical state.
    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Trace out everything but Bob's branches.
pub fn reduce_to_bob(c: &AmplitudeVector, spec: &ChainSpec) -> Result<BobDensityMatrix> {
    let bob = c.bob_amplitudes(spec)?;
    let m_bob = spec.m_bob();
    // divide by the actual norm so the trace is exactly one even when the
    // input norm sits at the edge of its tolerance
    let norm_sq = c.norm_sq();
    let mut rho = Array2::<Complex64>::zeros((m_bob + 1, m_bob + 1));
    let bob_weight: f64 = bob.iter().map(|z| z.norm_sqr()).sum();
    rho[[0, 0]] = Complex64::new(1.0 - bob_weight / norm_sq, 0.0);
    for p in 0..m_bob {
        for q in 0..m_bob {
            rho[[p + 1, q + 1]] = bob[p] * bob[q].conj() / norm_sq;
        }
    }
    BobDensityMatrix::from_matrix(rho)
}

fn w_overlap(amps: ArrayView1<Complex64>) -> f64 {
    let m = amps.len() as f64;
    let total: Complex64 = amps.iter().sum();
    (total.norm_sqr() / m).clamp(0.0, 1.0)
}

/// `F(t) = <W| rho_B |W> = |sum_q c_{B_q}|^2 / M~`, against the W state on
/// Bob's `M~` qubits. Equals 1 exactly when Bob holds the phase-aligned W
/// state with all the excitation weight.
pub fn fidelity_w(c: &AmplitudeVector, spec: &ChainSpec) -> Result<f64> {
    Ok(w_overlap(c.bob_amplitudes(spec)?))
}

/// Same overlap evaluated on Alice's block; in quadrature with Bob's as the
/// excitation swings back and forth.
pub fn fidelity_alice(c: &AmplitudeVector, spec: &ChainSpec) -> Result<f64> {
    Ok(w_overlap(c.alice_amplitudes(spec)?))
}

fn bob_moduli(c: &AmplitudeVector, spec: &ChainSpec) -> Result<Vec<f64>> {
    Ok(c.bob_amplitudes(spec)?.iter().map(|z| z.norm()).collect())
}

/// Concurrence of the pair `(B_i, B_j)`, 1-based: `2 |c_{B_i} c_{B_j}|`.
pub fn concurrence_pair(
    c: &AmplitudeVector,
    spec: &ChainSpec,
    i: usize,
    j: usize,
) -> Result<f64> {
    let m_bob = spec.m_bob();
    if m_bob < 2 {
        return Err(Error::UndefinedMetric(
            "pairwise concurrence needs at least two Bob branches".into(),
        ));
    }
    if i == j || !(1..=m_bob).contains(&i) || !(1..=m_bob).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "pair ({i}, {j}) invalid for {m_bob} Bob branches"
        )));
    }
    let moduli = bob_moduli(c, spec)?;
    Ok(2.0 * moduli[i - 1] * moduli[j - 1])
}

/// Geometric mean of all pairwise concurrences among Bob's branches.
///
/// Evaluated in log space, which for `C_ij = 2 |c_i||c_j|` collapses to
/// `2 (prod_i |c_i|)^{2 / M~}`; zero as soon as any single amplitude is
/// zero, since then some pair carries no entanglement at all.
pub fn concurrence_w(c: &AmplitudeVector, spec: &ChainSpec) -> Result<f64> {
    let m_bob = spec.m_bob();
    if m_bob < 2 {
        return Err(Error::UndefinedMetric(
            "the geometric-mean concurrence needs at least two Bob branches".into(),
        ));
    }
    let moduli = bob_moduli(c, spec)?;
    if moduli.iter().any(|&m| m == 0.0) {
        return Ok(0.0);
    }
    let log_sum: f64 = moduli.iter().map(|m| m.ln()).sum();
    Ok(2.0 * ((2.0 / m_bob as f64) * log_sum).exp())
}

/// Minimum pairwise concurrence over all Bob pairs: twice the product of
/// the two smallest amplitude moduli.
pub fn concurrence_min(c: &AmplitudeVector, spec: &ChainSpec) -> Result<f64> {
    let m_bob = spec.m_bob();
    if m_bob < 2 {
        return Err(Error::UndefinedMetric(
            "the minimum pairwise concurrence needs at least two Bob branches".into(),
        ));
    }
    let mut moduli = bob_moduli(c, spec)?;
    moduli.sort_by(|a, b| a.total_cmp(b));
    Ok(2.0 * moduli[0] * moduli[1])
}
