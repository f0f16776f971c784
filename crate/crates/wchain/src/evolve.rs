//! Exact time propagation of single-excitation amplitude vectors.
//!
//! Propagation diagonalizes the real symmetric Hamiltonian once per
//! instance (`H = V diag(E) V^T`) and applies `c(t) = V e^{-iEt} V^T c(0)`;
//! one decomposition then serves every time on a curve.

use ndarray::{Array1, ArrayView1};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ChainSpec, SingleExcitationHamiltonian};

/// Allowed deviation of `sum |c_j|^2` from one.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Complex amplitudes `c_j` over the canonical site ordering, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    values: Array1<Complex64>,
}

impl AmplitudeVector {
    pub fn new(values: Array1<Complex64>) -> Result<Self> {
        let norm_sq: f64 = values.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Numeric(format!(
                "amplitude vector norm^2 = {norm_sq}, expected 1 within {NORM_TOLERANCE}"
            )));
        }
        Ok(Self { values })
    }

    /// Rescale an arbitrary nonzero vector to unit norm.
    pub fn normalized(values: Array1<Complex64>) -> Result<Self> {
        let norm_sq: f64 = values.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() || norm_sq == 0.0 {
            return Err(Error::Numeric("cannot normalize a zero or non-finite vector".into()));
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self { values: values.mapv(|z| z * scale) })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> ArrayView1<Complex64> {
        self.values.view()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    fn check_spec(&self, spec: &ChainSpec) -> Result<()> {
        if self.dim() != spec.dim() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector has dim {}, chain has {}",
                self.dim(),
                spec.dim()
            )));
        }
        Ok(())
    }

    /// Amplitudes on Alice's branch sites.
    pub fn alice_amplitudes(&self, spec: &ChainSpec) -> Result<ArrayView1<Complex64>> {
        self.check_spec(spec)?;
        Ok(self.values.slice(ndarray::s![..spec.m_alice()]))
    }

    /// Amplitudes on the wire sites.
    pub fn wire_amplitudes(&self, spec: &ChainSpec) -> Result<ArrayView1<Complex64>> {
        self.check_spec(spec)?;
        Ok(self
            .values
            .slice(ndarray::s![spec.m_alice()..spec.m_alice() + spec.n_chain()]))
    }

    /// Amplitudes on Bob's branch sites.
    pub fn bob_amplitudes(&self, spec: &ChainSpec) -> Result<ArrayView1<Complex64>> {
        self.check_spec(spec)?;
        Ok(self.values.slice(ndarray::s![spec.m_alice() + spec.n_chain()..]))
    }
}

/// The protocol's initial state: amplitude `1 / sqrt(M)` on every Alice
/// branch, zero elsewhere.
pub fn w_initial_state(spec: &ChainSpec) -> AmplitudeVector {
    let mut values = Array1::<Complex64>::zeros(spec.dim());
    let amp = Complex64::new((spec.m_alice() as f64).sqrt().recip(), 0.0);
    for p in 0..spec.m_alice() {
        values[p] = amp;
    }
    AmplitudeVector { values }
}

/// `c(t) = e^{-iHt} c(0)` for `t >= 0`.
pub fn propagate(
    h: &SingleExcitationHamiltonian,
    c0: &AmplitudeVector,
    t: f64,
) -> Result<AmplitudeVector> {
    propagate_signed(h, c0, t, -1.0)
}

/// Reverse evolution `e^{+iHt} c` for `t >= 0`; undoes [`propagate`] over
/// the same duration.
pub fn propagate_reversed(
    h: &SingleExcitationHamiltonian,
    c: &AmplitudeVector,
    t: f64,
) -> Result<AmplitudeVector> {
    propagate_signed(h, c, t, 1.0)
}

fn propagate_signed(
    h: &SingleExcitationHamiltonian,
    c0: &AmplitudeVector,
    t: f64,
    sign: f64,
) -> Result<AmplitudeVector> {
    if c0.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "amplitude vector has dim {}, Hamiltonian has {}",
            c0.dim(),
            h.dim()
        )));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "duration t = {t} must be finite and >= 0; use propagate_reversed for reverse evolution"
        )));
    }
    let d = h.decomposition()?;
    AmplitudeVector::new(d.evolve(c0.values(), t, sign))
}

/// One piecewise-constant stretch of evolution.
#[derive(Debug, Clone)]
pub struct Segment {
    pub hamiltonian: SingleExcitationHamiltonian,
    pub duration: f64,
}

/// An ordered sequence of piecewise-constant Hamiltonians.
#[derive(Debug, Clone)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first_dim = match segments.first() {
            Some(s) => s.hamiltonian.dim(),
            None => return Err(Error::InvalidArgument("schedule must have >= 1 segment".into())),
        };
        for (k, seg) in segments.iter().enumerate() {
            if seg.hamiltonian.dim() != first_dim {
                return Err(Error::DimensionMismatch(format!(
                    "segment {k} has dim {}, segment 0 has {first_dim}",
                    seg.hamiltonian.dim()
                )));
            }
            if !seg.duration.is_finite() || seg.duration < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "segment {k} has duration {}, expected finite and >= 0",
                    seg.duration
                )));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn dim(&self) -> usize {
        self.segments[0].hamiltonian.dim()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }
}

/// Apply each segment in order.
pub fn propagate_schedule(schedule: &Schedule, c0: &AmplitudeVector) -> Result<AmplitudeVector> {
    if c0.dim() != schedule.dim() {
        return Err(Error::DimensionMismatch(format!(
            "amplitude vector has dim {}, schedule has {}",
            c0.dim(),
            schedule.dim()
        )));
    }
    let mut c = c0.clone();
    for (k, seg) in schedule.segments().iter().enumerate() {
        c = propagate(&seg.hamiltonian, &c, seg.duration).map_err(|e| {
            Error::Numeric(format!("schedule segment {k} failed: {e}"))
        })?;
    }
    Ok(c)
}
