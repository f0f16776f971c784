//! Closed forms for the strictly linear chain in the weak-end-bond regime
//! `J_m >> J`: the transmission fidelity, the wire characteristic
//! polynomial, and the perturbative eigenvalues/edge eigenvectors.
//!
//! In that regime only a handful of near-zero modes carry weight on the
//! two end sites, so the fidelity collapses to
//!
//! * `sin^2( 2 (J/J_m) (J t) )`            for `N` even,
//! * `sin^4( 2 J t / sqrt(N + 1) )`        for `N` odd,
//!
//! where `N` counts the wire sites between the two end qubits.

use ndarray::Array1;

use crate::error::{Error, Result};

/// Ratio `j_wire / j_end` below which the closed forms noticeably drift
/// from the exact dynamics; callers may warn below this.
pub const ASYMPTOTIC_WARN_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A strictly linear `(N + 2)`-site chain with uniform wire coupling
/// `j_wire` and end bonds `j_end`, in the regime `j_wire >= j_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRegime {
    n_wire: usize,
    j_end: f64,
    j_wire: f64,
}

impl AsymptoticRegime {
    pub fn new(n_wire: usize, j_end: f64, j_wire: f64) -> Result<Self> {
        if n_wire < 2 {
            return Err(Error::InvalidArgument(format!("n_wire = {n_wire}, need >= 2")));
        }
        if !(j_end.is_finite() && j_wire.is_finite()) || j_end <= 0.0 || j_wire <= 0.0 {
            return Err(Error::InvalidArgument(
                "couplings must be finite and positive".into(),
            ));
        }
        if j_wire / j_end < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "j_wire/j_end = {} < 1; the closed forms assume a dominant wire coupling",
                j_wire / j_end
            )));
        }
        Ok(Self { n_wire, j_end, j_wire })
    }

    pub fn n_wire(&self) -> usize {
        self.n_wire
    }

    pub fn j_end(&self) -> f64 {
        self.j_end
    }

    pub fn j_wire(&self) -> f64 {
        self.j_wire
    }

    pub fn parity(&self) -> Parity {
        if self.n_wire % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_well_separated(&self) -> bool {
        self.j_wire / self.j_end >= ASYMPTOTIC_WARN_RATIO
    }

    /// Time of the first perfect-transfer peak of the closed form.
    pub fn peak_time(&self) -> f64 {
        match self.parity() {
            Parity::Even => {
                std::f64::consts::FRAC_PI_4 * self.j_wire / (self.j_end * self.j_end)
            }
            Parity::Odd => {
                std::f64::consts::FRAC_PI_4 * ((self.n_wire + 1) as f64).sqrt() / self.j_end
            }
        }
    }
}

/// Closed-form transmission fidelity at time `t >= 0`.
pub fn asymptotic_fidelity(r: &AsymptoticRegime, t: f64) -> f64 {
    let j = r.j_end;
    match r.parity() {
        Parity::Even => {
            let s = (2.0 * (j / r.j_wire) * j * t).sin();
            s * s
        }
        Parity::Odd => {
            let s = (2.0 * j * t / ((r.n_wire + 1) as f64).sqrt()).sin();
            s.powi(4)
        }
    }
}

/// Alice-side fidelity of the closed forms; in quadrature with the
/// transmission fidelity.
pub fn asymptotic_fidelity_alice(r: &AsymptoticRegime, t: f64) -> f64 {
    let j = r.j_end;
    match r.parity() {
        Parity::Even => {
            let c = (2.0 * (j / r.j_wire) * j * t).cos();
            c * c
        }
        Parity::Odd => {
            let c = (2.0 * j * t / ((r.n_wire + 1) as f64).sqrt()).cos();
            c.powi(4)
        }
    }
}

/// Characteristic polynomial of the isolated `n`-site uniform wire,
/// parameterized by `E = -4 j_wire cos(theta)`:
/// `D_n = (2 j_wire)^n sin((n + 1) theta) / sin(theta)`.
pub fn characteristic_poly_wire(n: usize, theta: f64, j_wire: f64) -> Result<f64> {
    if theta.sin().abs() <= 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "theta = {theta} is a multiple of pi; the parameterization is singular there"
        )));
    }
    Ok((2.0 * j_wire).powi(n as i32) * (((n + 1) as f64) * theta).sin() / theta.sin())
}

/// Perturbative spectrum of the `(N + 2)`-site chain, ascending.
///
/// Bulk values are the isolated-wire energies
/// `-4 j_wire cos((k - 1) pi / (N + 1))`; the pair of edge modes sits at
/// `-+ 2 j_end^2 / j_wire` for even `N` and `-+ 4 j_end / sqrt(N + 1)` for
/// odd `N`. For odd `N` the central bulk value is pinned to exactly zero.
pub fn approx_eigenvalues(r: &AsymptoticRegime) -> Vec<f64> {
    let n = r.n_wire;
    let mut out = Vec::with_capacity(n + 2);
    for k in 2..=(n + 1) {
        let idx = k - 1;
        if n % 2 == 1 && 2 * idx == n + 1 {
            out.push(0.0);
        } else {
            out.push(-4.0 * r.j_wire * ((idx as f64) * std::f64::consts::PI / ((n + 1) as f64)).cos());
        }
    }
    let edge = edge_energy(r);
    out.push(-edge);
    out.push(edge);
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Magnitude of the edge-mode energy.
fn edge_energy(r: &AsymptoticRegime) -> f64 {
    match r.parity() {
        Parity::Even => 2.0 * r.j_end * r.j_end / r.j_wire,
        Parity::Odd => 4.0 * r.j_end / ((r.n_wire + 1) as f64).sqrt(),
    }
}

/// One perturbative near-zero eigenpair of the chain.
#[derive(Debug, Clone)]
pub struct EdgeMode {
    pub energy: f64,
    /// Unit-norm amplitudes over the `(N + 2)` chain sites.
    pub amplitudes: Array1<f64>,
}

/// Leading-order eigenvectors of the near-zero modes, ascending in energy.
///
/// Even `N`: the pair `(|1> +- |N+2>) / sqrt(2)`. Odd `N`: two modes mixing
/// the end sites with the even wire sites, plus the exact-zero mode
/// `(|1> + |N+2>) / sqrt(2)`.
pub fn approx_edge_eigenvectors(r: &AsymptoticRegime) -> Vec<EdgeMode> {
    let n = r.n_wire;
    let dim = n + 2;
    let e = edge_energy(r);
    let first = 0usize;
    let last = dim - 1;
    match r.parity() {
        Parity::Even => {
            let mut plus = Array1::<f64>::zeros(dim);
            plus[first] = std::f64::consts::FRAC_1_SQRT_2;
            plus[last] = std::f64::consts::FRAC_1_SQRT_2;
            let mut minus = Array1::<f64>::zeros(dim);
            minus[first] = std::f64::consts::FRAC_1_SQRT_2;
            minus[last] = -std::f64::consts::FRAC_1_SQRT_2;
            vec![
                EdgeMode { energy: -e, amplitudes: plus },
                EdgeMode { energy: e, amplitudes: minus },
            ]
        }
        Parity::Odd => {
            // even chain sites (2, 4, ...) carry alternating weight
            // 2 cos(j pi / 2) / sqrt(N + 1)
            let weight = 2.0 / ((n + 1) as f64).sqrt();
            let mut lower = Array1::<f64>::zeros(dim);
            let mut upper = Array1::<f64>::zeros(dim);
            lower[first] = 0.5;
            lower[last] = -0.5;
            upper[first] = 0.5;
            upper[last] = -0.5;
            for site in (2..=n + 1).step_by(2) {
                let sign = if site % 4 == 0 { 1.0 } else { -1.0 };
                lower[site - 1] = 0.5 * weight * sign;
                upper[site - 1] = -0.5 * weight * sign;
            }
            let mut central = Array1::<f64>::zeros(dim);
            central[first] = std::f64::consts::FRAC_1_SQRT_2;
            central[last] = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                EdgeMode { energy: -e, amplitudes: lower },
                EdgeMode { energy: 0.0, amplitudes: central },
                EdgeMode { energy: e, amplitudes: upper },
            ]
        }
    }
}

/// Fidelity rebuilt from the edge modes alone:
/// `| sum_k e^{-i E_k t} a_{k,1} a_{k,N+2} |^2`. Reproduces the closed
/// forms of [`asymptotic_fidelity`].
pub fn edge_mode_fidelity(modes: &[EdgeMode], t: f64) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for m in modes {
        let g = m.amplitudes[0] * m.amplitudes[m.amplitudes.len() - 1];
        let (s, c) = (m.energy * t).sin_cos();
        re += g * c;
        im -= g * s;
    }
    re * re + im * im
}
