//! Transmission of multipartite W-state entanglement through spin-1/2 XX
//! chains with branch qubits on both ends.
//!
//! The crate models an `N`-site quantum wire with `M` sender branches
//! (Alice) attached to the first wire site and `M~` receiver branches
//! (Bob) attached to the last. Excitation number is conserved, so a W
//! state launched from Alice evolves inside the `N + M + M~` dimensional
//! single-excitation sector, which is simulated exactly by dense
//! symmetric eigendecomposition.
//!
//! Modules:
//! * [`model`] — chain geometry, the single-excitation Hamiltonian
//!   (including zz/field noise on the diagonal), and the mapping between
//!   the branched chain and its effective strictly linear image;
//! * [`evolve`] — amplitude vectors, exact propagation, piecewise-constant
//!   schedules;
//! * [`metrics`] — Bob's reduced density matrix, W fidelity, pairwise
//!   concurrences and their geometric mean/minimum;
//! * [`asymptotics`] — closed forms in the dominant-wire-coupling regime
//!   and the perturbative spectrum of the effective chain;
//! * [`stochastic`] — static/dynamic/fluctuating disorder and noise,
//!   deterministic counter-based sampling, Monte Carlo ensembles;
//! * [`optimize`] — grid search for the optimal wire coupling and
//!   measurement time;
//! * [`oracle`] — brute-force full-Hilbert-space reference for small
//!   systems;
//! * [`selfcheck`] — fast built-in cross checks backing `verify`.

pub mod asymptotics;
mod error;
pub mod evolve;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod optimize;
pub mod oracle;
mod rng;
pub mod selfcheck;
pub mod stochastic;

pub use error::{Error, Result};
