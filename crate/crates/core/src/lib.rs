//! Dynamics and witnesses for a dissipative two-level system.
//!
//! The library models a qubit with splitting `omega0` coupled to a thermal
//! bath (relaxation rate `gamma1`, pure dephasing `gamma_phi`) and builds the
//! derived objects needed to study temporal quantum correlations:
//!
//! * [`model`]: parameter set, Pauli algebra, Bloch/density-matrix states and
//!   the microscopic rates fixed by detailed balance.
//! * [`lindblad`]: closed-form and numeric propagation of the Bloch vector,
//!   steady state, and two-time correlators via the quantum regression
//!   theorem.
//! * [`response`]: equilibrium heat capacity, the complex heat capacity
//!   `C(omega) = C'(omega) + i C''(omega)` of the relaxation channel, and the
//!   Kubo-type commutator and derivative-correlator spectra evaluated by
//!   oscillatory quadrature.
//! * [`pdm`]: two-time pseudo-density matrices (PDMs), their analytic and
//!   numeric spectra, and negativity.
//! * [`chsh`]: temporal correlation matrices, CHSH values for explicit
//!   measurement schemes, the closed-form and singular-value bounds on the
//!   maximal CHSH value, and a direction optimizer.
//! * [`witness`]: parameter scans that locate negativity windows, CHSH
//!   violation windows, and the imaginary-heat-capacity violation region, plus
//!   figure-ready data series.
//! * [`export`]: deterministic CSV/JSON serialization and a gnuplot script
//!   emitter for the figure data.
//!
//! Internal units set `hbar = kB = 1` by default; both constants are fields of
//! [`model::ModelParams`] and every formula carries them explicitly.

pub mod chsh;
pub mod error;
pub mod export;
pub mod lindblad;
pub mod model;
pub mod pdm;
pub mod quad;
pub mod response;
#[cfg(test)]
pub(crate) mod testutil;
pub mod witness;

pub use error::{CoreError, CoreResult};
pub use model::{BlochState, DensityMatrix2, DerivedRates, ModelParams, Pauli};
