//! Grid search for the wire coupling and measurement time that maximize
//! the ordered-chain transmission fidelity.
//!
//! The search runs on the effective strictly linear chain (end bonds 1,
//! wire coupling `jm`), whose fidelity is independent of the branch counts;
//! the result maps back to any branched realization. For each `jm` the peak
//! of `F(t)` within the time window is recorded, and the argmax is taken
//! with the deterministic total order (fidelity desc, jm asc, t asc).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::set_blas_threads;
use crate::model::{build_hamiltonian, ChainSpec};

/// Fidelity peak of one grid coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSample {
    pub jm: f64,
    pub t_peak: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub best_jm: f64,
    pub best_t: f64,
    pub best_fidelity: f64,
    /// One sample per grid coupling, ascending in `jm`.
    pub samples: Vec<ScanSample>,
}

impl ScanResult {
    /// Merge two scans, keeping the better optimum under the total order
    /// (fidelity desc, jm asc, t asc). Samples are concatenated and sorted.
    pub fn merge(self, other: ScanResult) -> ScanResult {
        let keep_self = match self.best_fidelity.total_cmp(&other.best_fidelity) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match self.best_jm.total_cmp(&other.best_jm) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => self.best_t <= other.best_t,
            },
        };
        let (mut base, mut extra) = if keep_self { (self, other) } else { (other, self) };
        base.samples.append(&mut extra.samples);
        base.samples.sort_by(|a, b| a.jm.total_cmp(&b.jm));
        base
    }
}

/// Evaluate the fidelity peak for an explicit list of couplings and times.
pub fn scan_grid(n_wire: usize, jm_values: &[f64], t_values: &[f64]) -> Result<ScanResult> {
    if jm_values.is_empty() || t_values.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    for &jm in jm_values {
        if !jm.is_finite() || jm <= 0.0 {
            return Err(Error::InvalidArgument(format!("grid coupling {jm} must be > 0")));
        }
    }
    set_blas_threads(1);
    let samples: Vec<ScanSample> = jm_values
        .par_iter()
        .map(|&jm| peak_fidelity(n_wire, jm, t_values))
        .collect::<Result<_>>()?;
    let mut samples = samples;
    samples.sort_by(|a, b| a.jm.total_cmp(&b.jm));
    let best = samples
        .iter()
        .copied()
        .reduce(|best, s| if s.fidelity > best.fidelity { s } else { best })
        .expect("non-empty samples");
    Ok(ScanResult {
        best_jm: best.jm,
        best_t: best.t_peak,
        best_fidelity: best.fidelity,
        samples,
    })
}

/// Uniform-grid scan: couplings `jm_max * i / jm_steps` for
/// `i = 1..=jm_steps`, times `t_max_bound * k / t_steps` for
/// `k = 0..=t_steps`.
pub fn scan_optimal(
    n_wire: usize,
    jm_max: f64,
    jm_steps: usize,
    t_max_bound: f64,
    t_steps: usize,
) -> Result<ScanResult> {
    if jm_steps < 1 || t_steps < 1 {
        return Err(Error::InvalidArgument("empty feasible grid: steps must be >= 1".into()));
    }
    if !(jm_max.is_finite() && jm_max > 0.0) || !(t_max_bound.is_finite() && t_max_bound > 0.0) {
        return Err(Error::InvalidArgument("scan bounds must be finite and positive".into()));
    }
    let jm_values: Vec<f64> =
        (1..=jm_steps).map(|i| jm_max * i as f64 / jm_steps as f64).collect();
    let t_values: Vec<f64> =
        (0..=t_steps).map(|k| t_max_bound * k as f64 / t_steps as f64).collect();
    scan_grid(n_wire, &jm_values, &t_values)
}

/// Re-scan a tight window around a coarse optimum with a 10x finer
/// coupling grid and return the merged result. Never worse than `coarse`.
pub fn refine_scan(
    n_wire: usize,
    coarse: ScanResult,
    jm_step: f64,
    jm_max: f64,
    t_values: &[f64],
) -> Result<ScanResult> {
    if !(jm_step.is_finite() && jm_step > 0.0) {
        return Err(Error::InvalidArgument(format!("jm_step = {jm_step} must be > 0")));
    }
    let fine_step = jm_step / 10.0;
    let lo = (coarse.best_jm - jm_step).max(fine_step);
    let hi = (coarse.best_jm + jm_step).min(jm_max);
    let n = ((hi - lo) / fine_step).round() as usize;
    let jm_values: Vec<f64> = (0..=n).map(|i| lo + i as f64 * fine_step).collect();
    let fine = scan_grid(n_wire, &jm_values, t_values)?;
    Ok(coarse.merge(fine))
}

/// Peak fidelity over the time grid for one effective chain.
fn peak_fidelity(n_wire: usize, jm: f64, t_values: &[f64]) -> Result<ScanSample> {
    let chain = ChainSpec::uniform(n_wire, 1, 1, 1.0, 1.0, jm)?;
    let h = build_hamiltonian(&chain, None)?;
    let d = h.decomposition()?;
    let dim = d.dim();
    let modes = d.modes();
    let energies = d.energies();
    // transfer amplitude end-to-end: F(t) = |sum_k g_k e^{-i E_k t}|^2
    // with g_k the product of the mode's weights on the two end sites
    let g: Vec<f64> = (0..dim).map(|k| modes[[0, k]] * modes[[dim - 1, k]]).collect();
    let mut best_t = t_values[0];
    let mut best_f = -1.0;
    for &t in t_values {
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..dim {
            let (s, c) = (energies[k] * t).sin_cos();
            re += g[k] * c;
            im -= g[k] * s;
        }
        let f = re * re + im * im;
        if f > best_f {
            best_f = f;
            best_t = t;
        }
    }
    Ok(ScanSample { jm, t_peak: best_t, fidelity: best_f.clamp(0.0, 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_grid_returns_that_point() {
        let r = scan_optimal(10, 2.0, 1, 3.0, 1).unwrap();
        assert_eq!(r.samples.len(), 1);
        assert_eq!(r.best_jm, 2.0);
        // the only times on the grid are 0 and 3
        assert!(r.best_t == 0.0 || r.best_t == 3.0);
    }

    #[test]
    fn rejects_empty_grid() {
        assert!(scan_optimal(10, 2.0, 0, 3.0, 10).is_err());
        assert!(scan_optimal(10, -1.0, 5, 3.0, 10).is_err());
    }

    #[test]
    fn refining_never_decreases_the_best_fidelity() {
        let t_values: Vec<f64> = (0..=200).map(|k| 8.0 * k as f64 / 200.0).collect();
        let coarse = scan_optimal(10, 3.0, 30, 8.0, 200).unwrap();
        let refined = refine_scan(10, coarse.clone(), 0.1, 3.0, &t_values).unwrap();
        assert!(refined.best_fidelity >= coarse.best_fidelity);
    }

    #[test]
    fn denser_time_grid_never_decreases_the_peak() {
        let a = scan_optimal(8, 2.0, 4, 6.0, 100).unwrap();
        let b = scan_optimal(8, 2.0, 4, 6.0, 200).unwrap();
        assert!(b.best_fidelity >= a.best_fidelity - 1e-15);
    }
}
