//! Chain geometry, the single-excitation Hamiltonian, and the mapping
//! between the branched chain and its effective strictly linear image.
//!
//! The system is a spin-1/2 XX chain of `N` wire qubits with `M` branch
//! qubits coupled to wire site 1 (Alice) and `M~` branch qubits coupled to
//! wire site `N` (Bob). Excitation number is conserved, so the dynamics of
//! one initial excitation lives in the `D = N + M + M~` dimensional space
//! spanned by the states with a single flipped spin. Canonical ordering of
//! that basis: Alice branches, then wire sites, then Bob branches.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::Decomposition;

/// Geometry and couplings of the branched chain.
///
/// `hbar = 1` throughout; couplings are in units of the reference coupling
/// and times in the matching inverse-energy unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    n_chain: usize,
    m_alice: usize,
    m_bob: usize,
    j_alice: Vec<f64>,
    j_bob: Vec<f64>,
    j_wire: Vec<f64>,
}

impl ChainSpec {
    /// Build a spec from explicit per-bond couplings.
    ///
    /// `j_alice[p]` couples branch `A_{p+1}` to wire site 1, `j_wire[j]`
    /// couples wire sites `j+1, j+2`, and `j_bob[q]` couples wire site `N`
    /// to branch `B_{q+1}`.
    pub fn new(
        n_chain: usize,
        m_alice: usize,
        m_bob: usize,
        j_alice: Vec<f64>,
        j_bob: Vec<f64>,
        j_wire: Vec<f64>,
    ) -> Result<Self> {
        if n_chain < 2 {
            return Err(Error::InvalidSpec(format!("n_chain = {n_chain}, need >= 2")));
        }
        if m_alice < 1 || m_bob < 1 {
            return Err(Error::InvalidSpec(format!(
                "branch counts m_alice = {m_alice}, m_bob = {m_bob}, need >= 1"
            )));
        }
        if j_alice.len() != m_alice {
            return Err(Error::InvalidSpec(format!(
                "j_alice has {} entries, expected {m_alice}",
                j_alice.len()
            )));
        }
        if j_bob.len() != m_bob {
            return Err(Error::InvalidSpec(format!(
                "j_bob has {} entries, expected {m_bob}",
                j_bob.len()
            )));
        }
        if j_wire.len() != n_chain - 1 {
            return Err(Error::InvalidSpec(format!(
                "j_wire has {} entries, expected {}",
                j_wire.len(),
                n_chain - 1
            )));
        }
        for j in j_alice.iter().chain(&j_bob).chain(&j_wire) {
            if !j.is_finite() {
                return Err(Error::InvalidSpec("non-finite coupling".into()));
            }
        }
        Ok(Self { n_chain, m_alice, m_bob, j_alice, j_bob, j_wire })
    }

    /// Uniform couplings: every Alice bond `j_a`, every wire bond `j_m`,
    /// every Bob bond `j_b`.
    pub fn uniform(
        n_chain: usize,
        m_alice: usize,
        m_bob: usize,
        j_a: f64,
        j_b: f64,
        j_m: f64,
    ) -> Result<Self> {
        Self::new(
            n_chain,
            m_alice,
            m_bob,
            vec![j_a; m_alice],
            vec![j_b; m_bob],
            vec![j_m; n_chain - 1],
        )
    }

    pub fn n_chain(&self) -> usize {
        self.n_chain
    }

    pub fn m_alice(&self) -> usize {
        self.m_alice
    }

    pub fn m_bob(&self) -> usize {
        self.m_bob
    }

    pub fn j_alice(&self) -> &[f64] {
        &self.j_alice
    }

    pub fn j_bob(&self) -> &[f64] {
        &self.j_bob
    }

    pub fn j_wire(&self) -> &[f64] {
        &self.j_wire
    }

    /// Total single-excitation dimension `N + M + M~`.
    pub fn dim(&self) -> usize {
        self.n_chain + self.m_alice + self.m_bob
    }

    pub fn is_strictly_linear(&self) -> bool {
        self.m_alice == 1 && self.m_bob == 1
    }

    /// All bonds in canonical order: Alice bonds, wire bonds, Bob bonds.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut out = Vec::with_capacity(self.m_alice + self.n_chain - 1 + self.m_bob);
        out.extend((1..=self.m_alice).map(Bond::Alice));
        out.extend((1..self.n_chain).map(Bond::Wire));
        out.extend((1..=self.m_bob).map(Bond::Bob));
        out
    }

    /// All sites in canonical order.
    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend((1..=self.m_alice).map(Site::Alice));
        out.extend((1..=self.n_chain).map(Site::Wire));
        out.extend((1..=self.m_bob).map(Site::Bob));
        out
    }

    pub fn coupling(&self, bond: Bond) -> Result<f64> {
        bond.validate(self)?;
        Ok(match bond {
            Bond::Alice(p) => self.j_alice[p - 1],
            Bond::Wire(j) => self.j_wire[j - 1],
            Bond::Bob(q) => self.j_bob[q - 1],
        })
    }
}

/// A site of the chain, 1-based within its region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Alice(usize),
    Wire(usize),
    Bob(usize),
}

impl Site {
    pub fn validate(&self, spec: &ChainSpec) -> Result<()> {
        let ok = match *self {
            Site::Alice(p) => (1..=spec.m_alice).contains(&p),
            Site::Wire(j) => (1..=spec.n_chain).contains(&j),
            Site::Bob(q) => (1..=spec.m_bob).contains(&q),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("site {self:?} not present in chain")))
        }
    }

    /// Position in the canonical basis ordering
    /// `(A_1 .. A_M, 1 .. N, B_1 .. B_M~)`.
    pub fn canonical(&self, spec: &ChainSpec) -> Result<usize> {
        self.validate(spec)?;
        Ok(match *self {
            Site::Alice(p) => p - 1,
            Site::Wire(j) => spec.m_alice + j - 1,
            Site::Bob(q) => spec.m_alice + spec.n_chain + q - 1,
        })
    }
}

/// A coupled pair of sites. These are the only bonds the topology allows:
/// branch-to-endpoint and wire nearest neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bond {
    /// Branch `A_p` to wire site 1.
    Alice(usize),
    /// Wire sites `j` and `j + 1`.
    Wire(usize),
    /// Wire site `N` to branch `B_q`.
    Bob(usize),
}

impl Bond {
    pub fn validate(&self, spec: &ChainSpec) -> Result<()> {
        let ok = match *self {
            Bond::Alice(p) => (1..=spec.m_alice).contains(&p),
            Bond::Wire(j) => (1..spec.n_chain).contains(&j),
            Bond::Bob(q) => (1..=spec.m_bob).contains(&q),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidNoise(format!("bond {self:?} not present in chain")))
        }
    }

    pub fn endpoints(&self, spec: &ChainSpec) -> Result<(Site, Site)> {
        self.validate(spec)?;
        Ok(match *self {
            Bond::Alice(p) => (Site::Alice(p), Site::Wire(1)),
            Bond::Wire(j) => (Site::Wire(j), Site::Wire(j + 1)),
            Bond::Bob(q) => (Site::Wire(spec.n_chain), Site::Bob(q)),
        })
    }
}

/// zz-interaction strengths per bond and magnetic field strengths per site.
///
/// Absent entries mean zero. Keys must reference bonds/sites that exist in
/// the chain the field is used with.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoiseField {
    delta_bonds: BTreeMap<Bond, f64>,
    h_sites: BTreeMap<Site, f64>,
}

impl NoiseField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_delta(&mut self, bond: Bond, value: f64) {
        self.delta_bonds.insert(bond, value);
    }

    pub fn set_h(&mut self, site: Site, value: f64) {
        self.h_sites.insert(site, value);
    }

    pub fn delta(&self, bond: Bond) -> f64 {
        self.delta_bonds.get(&bond).copied().unwrap_or(0.0)
    }

    pub fn h(&self, site: Site) -> f64 {
        self.h_sites.get(&site).copied().unwrap_or(0.0)
    }

    pub fn deltas(&self) -> impl Iterator<Item = (Bond, f64)> + '_ {
        self.delta_bonds.iter().map(|(&b, &v)| (b, v))
    }

    pub fn fields(&self) -> impl Iterator<Item = (Site, f64)> + '_ {
        self.h_sites.iter().map(|(&s, &v)| (s, v))
    }

    pub fn is_empty(&self) -> bool {
        self.delta_bonds.is_empty() && self.h_sites.is_empty()
    }

    pub fn validate(&self, spec: &ChainSpec) -> Result<()> {
        for (&bond, &v) in &self.delta_bonds {
            bond.validate(spec)?;
            if !v.is_finite() {
                return Err(Error::InvalidNoise(format!("non-finite delta on {bond:?}")));
            }
        }
        for (&site, &v) in &self.h_sites {
            site.validate(spec)
                .map_err(|_| Error::InvalidNoise(format!("site {site:?} not present in chain")))?;
            if !v.is_finite() {
                return Err(Error::InvalidNoise(format!("non-finite field on {site:?}")));
            }
        }
        Ok(())
    }
}

/// The matrix `<1_k|H|1_j>` over the canonical single-excitation basis.
///
/// Real symmetric; off-diagonal entries are `2 J` on each bond. The
/// diagonal carries the projection of the zz-interaction and magnetic-field
/// terms: at site `j` it is `2 h_j + sum over bonds (i,k) of
/// Delta_{i,k} * s`, with `s = -1` when `j` is an endpoint of the bond and
/// `+1` otherwise.
#[derive(Debug)]
pub struct SingleExcitationHamiltonian {
    matrix: Array2<f64>,
    decomp: OnceLock<Decomposition>,
}

impl Clone for SingleExcitationHamiltonian {
    fn clone(&self) -> Self {
        Self { matrix: self.matrix.clone(), decomp: OnceLock::new() }
    }
}

impl PartialEq for SingleExcitationHamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl SingleExcitationHamiltonian {
    /// Wrap an explicit matrix; it must be square, finite and exactly
    /// symmetric.
    pub fn from_matrix(matrix: Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for i in 0..matrix.nrows() {
            for j in 0..i {
                if matrix[[i, j]].to_bits() != matrix[[j, i]].to_bits() {
                    return Err(Error::Numeric(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("matrix has non-finite entries".into()));
        }
        Ok(Self { matrix, decomp: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Eigendecomposition, computed once and cached for curve sweeps.
    pub fn decomposition(&self) -> Result<&Decomposition> {
        if let Some(d) = self.decomp.get() {
            return Ok(d);
        }
        let d = Decomposition::new(&self.matrix)?;
        let _ = self.decomp.set(d);
        Ok(self.decomp.get().expect("decomposition just set"))
    }
}

/// Assemble the single-excitation Hamiltonian for a chain, optionally with
/// zz-interaction and magnetic-field terms on the diagonal.
pub fn build_hamiltonian(
    spec: &ChainSpec,
    noise: Option<&NoiseField>,
) -> Result<SingleExcitationHamiltonian> {
    if let Some(n) = noise {
        n.validate(spec)?;
    }
    let dim = spec.dim();
    let mut m = Array2::<f64>::zeros((dim, dim));
    for bond in spec.bonds() {
        let (a, b) = bond_canonical_endpoints(bond, spec)?;
        let j = spec.coupling(bond)?;
        m[[a, b]] = 2.0 * j;
        m[[b, a]] = 2.0 * j;
    }
    if let Some(noise) = noise {
        for (site, h) in noise.fields() {
            let d = site.canonical(spec)?;
            m[[d, d]] += 2.0 * h;
        }
        for (bond, delta) in noise.deltas() {
            let (a, b) = bond_canonical_endpoints(bond, spec)?;
            for d in 0..dim {
                m[[d, d]] += delta;
            }
            m[[a, a]] -= 2.0 * delta;
            m[[b, b]] -= 2.0 * delta;
        }
    }
    SingleExcitationHamiltonian::from_matrix(m)
}

/// Canonical indices of a bond's two endpoints.
pub fn bond_canonical_endpoints(bond: Bond, spec: &ChainSpec) -> Result<(usize, usize)> {
    let (a, b) = bond.endpoints(spec)?;
    Ok((a.canonical(spec)?, b.canonical(spec)?))
}

/// Map a branched chain with uniform branch couplings onto the equivalent
/// `(N + 2)`-site strictly linear chain: end couplings become
/// `sqrt(M) J_A` and `sqrt(M~) J_B`, wire couplings are unchanged.
pub fn to_effective_linear(spec: &ChainSpec) -> Result<ChainSpec> {
    let uniform = |js: &[f64]| js.windows(2).all(|w| w[0].to_bits() == w[1].to_bits());
    if !uniform(&spec.j_alice) || !uniform(&spec.j_bob) {
        return Err(Error::MappingUndefined(
            "branch couplings are not uniform; the permutation symmetry fails".into(),
        ));
    }
    ChainSpec::new(
        spec.n_chain,
        1,
        1,
        vec![(spec.m_alice as f64).sqrt() * spec.j_alice[0]],
        vec![(spec.m_bob as f64).sqrt() * spec.j_bob[0]],
        spec.j_wire.clone(),
    )
}

/// Inverse of [`to_effective_linear`]: distribute the end couplings of a
/// strictly linear chain over `m_alice`/`m_bob` branches as
/// `J_A = J_end / sqrt(M)`.
pub fn from_effective_linear(
    linear: &ChainSpec,
    m_alice: usize,
    m_bob: usize,
) -> Result<ChainSpec> {
    if !linear.is_strictly_linear() {
        return Err(Error::MappingUndefined(
            "input chain is not strictly linear (one branch on each side)".into(),
        ));
    }
    if m_alice < 1 || m_bob < 1 {
        return Err(Error::InvalidArgument("target branch counts must be >= 1".into()));
    }
    ChainSpec::new(
        linear.n_chain,
        m_alice,
        m_bob,
        vec![linear.j_alice[0] / (m_alice as f64).sqrt(); m_alice],
        vec![linear.j_bob[0] / (m_bob as f64).sqrt(); m_bob],
        linear.j_wire.clone(),
    )
}
