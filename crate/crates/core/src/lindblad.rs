//! Dissipative dynamics of the qubit and two-time correlators.
//!
//! In the Bloch picture the master equation reduces to the affine system
//!
//! ```text
//! dx/dt = -omega0 y - gamma2 x
//! dy/dt =  omega0 x - gamma2 y
//! dz/dt = -gamma1 (z - z_eq)
//! ```
//!
//! whose closed-form solution is
//! `x(t) + i y(t) = (x0 + i y0) exp((i omega0 - gamma2) t)` together with
//! `z(t) = z_eq + (z0 - z_eq) exp(-gamma1 t)`. The rotation sign is fixed so
//! that the symmetrized cross correlator `Re<σy(t) σx(0)>` equals
//! `+exp(-gamma2 t) sin(omega0 t)`; this is the convention every downstream
//! module relies on and it is asserted by the correlator tests.
//!
//! Two-time correlators follow from the quantum regression theorem: the same
//! generator that propagates states propagates the operator `σj ρss` (or
//! `ρss σj`), and `<σi(t0+tau) σj(t0)> = Tr[σi Λ_tau(σj ρss)]` in the steady
//! state. The propagation happens on complex Pauli components, which is exact
//! for this generator.

use nalgebra::{Matrix2, Matrix3, Rotation3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};
use crate::model::{BlochState, ModelParams, Pauli, C64};

/// Which side of the operator product the later-time observable occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorOrdering {
    /// `<σi(tau) σj(0)>`: the later observable stands on the left.
    LaterLeft,
    /// `<σj(0) σi(tau)>`: the later observable stands on the right.
    EarlierLeft,
}

/// Affine map `v -> linear * v + offset` acting on Bloch vectors.
///
/// The Lindblad flow at fixed elapsed time is exactly of this form; the
/// family satisfies the semigroup law under [`AffinePropagator::compose`].
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePropagator {
    pub linear: Matrix3<f64>,
    pub offset: Vector3<f64>,
    pub duration: f64,
}

impl AffinePropagator {
    pub fn identity() -> Self {
        AffinePropagator {
            linear: Matrix3::identity(),
            offset: Vector3::zeros(),
            duration: 0.0,
        }
    }

    pub fn apply(&self, state: &BlochState) -> BlochState {
        BlochState::from_vector(&(self.linear * state.as_vector() + self.offset))
    }

    /// `self` after `first`: `(self ∘ first)(v) = self(first(v))`.
    pub fn compose(&self, first: &AffinePropagator) -> AffinePropagator {
        AffinePropagator {
            linear: self.linear * first.linear,
            offset: self.linear * first.offset + self.offset,
            duration: self.duration + first.duration,
        }
    }

    /// Largest singular value of the linear part; contractive flows stay <= 1.
    pub fn operator_norm(&self) -> f64 {
        self.linear.singular_values().max()
    }
}

/// Steady state of the dissipative flow: fully dephased, thermally polarized.
pub fn steady_state(params: &ModelParams) -> BlochState {
    BlochState::new(0.0, 0.0, params.z_eq())
}

/// Closed-form propagator for elapsed time `t >= 0`.
pub fn propagator(params: &ModelParams, t: f64) -> CoreResult<AffinePropagator> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(CoreError::Domain(format!(
            "propagation time {t} must be finite and >= 0"
        )));
    }
    let (g1, g2, w0) = (params.gamma1, params.gamma2(), params.omega0);
    let et = (-g2 * t).exp();
    let (sin, cos) = (w0 * t).sin_cos();
    let ez = (-g1 * t).exp();
    let linear = Matrix3::new(
        et * cos,
        -et * sin,
        0.0, //
        et * sin,
        et * cos,
        0.0, //
        0.0,
        0.0,
        ez,
    );
    let offset = Vector3::new(0.0, 0.0, params.z_eq() * (1.0 - ez));
    Ok(AffinePropagator {
        linear,
        offset,
        duration: t,
    })
}

/// Evolves a Bloch state for time `t` using the closed form.
pub fn evolve(initial: &BlochState, params: &ModelParams, t: f64) -> CoreResult<BlochState> {
    Ok(propagator(params, t)?.apply(initial))
}

/// Time-ordered samples of a numerically integrated trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(&f64, &BlochState)> {
        self.times.last().zip(self.states.last())
    }
}

/// Default RK4 step: small against both the precession and decay scales.
pub fn default_step(params: &ModelParams) -> f64 {
    let fastest = params.omega0.max(params.gamma1).max(params.gamma2());
    (1e-3_f64).min(0.01 / fastest)
}

fn bloch_derivative(params: &ModelParams, v: &Vector3<f64>) -> Vector3<f64> {
    let (g1, g2, w0) = (params.gamma1, params.gamma2(), params.omega0);
    Vector3::new(
        -w0 * v.y - g2 * v.x,
        w0 * v.x - g2 * v.y,
        -g1 * (v.z - params.z_eq()),
    )
}

/// Fixed-step RK4 integration of the Bloch equations over `[0, t]`.
///
/// Records every accepted step (including both endpoints). The final step is
/// shortened so the trajectory lands exactly on `t`.
pub fn evolve_numeric(
    initial: &BlochState,
    params: &ModelParams,
    t: f64,
    step: f64,
) -> CoreResult<Trajectory> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(CoreError::Domain(format!(
            "integration time {t} must be finite and >= 0"
        )));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(CoreError::Domain(format!(
            "step {step} must be finite and > 0"
        )));
    }
    let mut times = vec![0.0];
    let mut states = vec![*initial];
    let mut v = initial.as_vector();
    let mut now = 0.0;
    while now < t {
        let h = step.min(t - now);
        let k1 = bloch_derivative(params, &v);
        let k2 = bloch_derivative(params, &(v + k1 * (h / 2.0)));
        let k3 = bloch_derivative(params, &(v + k2 * (h / 2.0)));
        let k4 = bloch_derivative(params, &(v + k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        now += h;
        times.push(now);
        states.push(BlochState::from_vector(&v));
    }
    Ok(Trajectory { times, states })
}

/// Complex Pauli components `a_mu = Tr[A σ_mu]` of `A = (1/2) Σ a_mu σ_mu`.
fn pauli_components(a: &Matrix2<C64>) -> [C64; 4] {
    [
        (a * Pauli::I.matrix()).trace(),
        (a * Pauli::X.matrix()).trace(),
        (a * Pauli::Y.matrix()).trace(),
        (a * Pauli::Z.matrix()).trace(),
    ]
}

/// Propagates complex Pauli components with the regression generator.
///
/// The generator is the same affine Bloch flow extended linearly to complex
/// coefficients; the trace component is conserved and sources the relaxation
/// of the `z` component toward `z_eq * a0`.
fn propagate_components(params: &ModelParams, comps: &[C64; 4], tau: f64) -> [C64; 4] {
    let (g1, g2, w0) = (params.gamma1, params.gamma2(), params.omega0);
    let [a0, ax, ay, az] = *comps;
    let u = (ax + C64::i() * ay) * (C64::new(-g2, w0) * tau).exp();
    let v = (ax - C64::i() * ay) * (C64::new(-g2, -w0) * tau).exp();
    let half = C64::new(0.5, 0.0);
    let zeq = C64::new(params.z_eq(), 0.0);
    let ez = Complex64::new((-g1 * tau).exp(), 0.0);
    [
        a0,
        (u + v) * half,
        (u - v) * half / C64::i(),
        zeq * a0 + (az - zeq * a0) * ez,
    ]
}

/// Steady-state two-time correlator with explicit operator ordering.
///
/// `two_time_correlator_ordered(p, i, j, tau, LaterLeft)` evaluates
/// `<σi(t0+tau) σj(t0)>` in the steady state via the quantum regression
/// theorem; `EarlierLeft` evaluates `<σj(t0) σi(t0+tau)>`. Negative `tau` is
/// a domain error.
pub fn two_time_correlator_ordered(
    i: Pauli,
    j: Pauli,
    tau: f64,
    params: &ModelParams,
    ordering: OperatorOrdering,
) -> CoreResult<C64> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(CoreError::Domain(format!(
            "correlator lag {tau} must be finite and >= 0"
        )));
    }
    let rho = params.thermal_state();
    let seed = match ordering {
        OperatorOrdering::LaterLeft => j.matrix() * rho.matrix(),
        OperatorOrdering::EarlierLeft => rho.matrix() * j.matrix(),
    };
    let comps = propagate_components(params, &pauli_components(&seed), tau);
    Ok(comps[i.index()])
}

/// `<σi(t0+tau) σj(t0)>` in the steady state.
pub fn two_time_correlator(i: Pauli, j: Pauli, tau: f64, params: &ModelParams) -> CoreResult<C64> {
    two_time_correlator_ordered(i, j, tau, params, OperatorOrdering::LaterLeft)
}

/// Symmetrized correlator `(1/2) <{σi(t0+tau), σj(t0)}>`.
///
/// Both operator orderings are evaluated independently; their average is real
/// for Hermitian observables, which the tests check rather than assume.
pub fn symmetrized_correlator(
    i: Pauli,
    j: Pauli,
    tau: f64,
    params: &ModelParams,
) -> CoreResult<C64> {
    let later_left = two_time_correlator_ordered(i, j, tau, params, OperatorOrdering::LaterLeft)?;
    let earlier_left =
        two_time_correlator_ordered(i, j, tau, params, OperatorOrdering::EarlierLeft)?;
    Ok((later_left + earlier_left) * C64::new(0.5, 0.0))
}

/// Connected correlator: the ordered correlator minus the product of
/// steady-state means. Only the `(z, z)` channel has a nonvanishing mean
/// product; subtracting it makes every channel decay at least as
/// `exp(-min(gamma1, gamma2) tau)`, which the spectral integrals require.
pub fn two_time_correlator_connected(
    i: Pauli,
    j: Pauli,
    tau: f64,
    params: &ModelParams,
    ordering: OperatorOrdering,
) -> CoreResult<C64> {
    let raw = two_time_correlator_ordered(i, j, tau, params, ordering)?;
    let mean = |p: Pauli| match p {
        Pauli::I => 1.0,
        Pauli::Z => params.z_eq(),
        _ => 0.0,
    };
    Ok(raw - C64::new(mean(i) * mean(j), 0.0))
}

/// Rotation taking a Hamiltonian axis `n` onto the z axis, so that dynamics
/// generated by `H = (hbar omega0 / 2) n·σ` can run in the eigenbasis.
#[derive(Debug, Clone)]
pub struct FrameRotation {
    to_frame: Rotation3<f64>,
}

impl FrameRotation {
    /// Requires `|n| = 1` to within 1e-12.
    pub fn from_axis(n: &Vector3<f64>) -> CoreResult<Self> {
        if (n.norm() - 1.0).abs() > 1e-12 {
            return Err(CoreError::Domain(format!(
                "frame axis must be a unit vector; |n| = {}",
                n.norm()
            )));
        }
        let z = Vector3::z();
        let to_frame = Rotation3::rotation_between(n, &z).unwrap_or_else(|| {
            // Antipodal case n = -z: any half-turn through an orthogonal axis.
            Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
        });
        Ok(FrameRotation { to_frame })
    }

    /// Maps a lab-frame Bloch vector into the eigenframe (`n -> z`).
    pub fn to_frame(&self, state: &BlochState) -> BlochState {
        BlochState::from_vector(&(self.to_frame * state.as_vector()))
    }

    /// Maps an eigenframe Bloch vector back to the lab frame.
    pub fn from_frame(&self, state: &BlochState) -> BlochState {
        BlochState::from_vector(&(self.to_frame.inverse() * state.as_vector()))
    }
}

/// Evolves under `H = (hbar omega0 / 2) n·σ` with dissipation defined in the
/// `n` eigenbasis: rotate into the frame, apply the standard flow, rotate
/// back.
pub fn evolve_about_axis(
    initial: &BlochState,
    params: &ModelParams,
    axis: &Vector3<f64>,
    t: f64,
) -> CoreResult<BlochState> {
    let frame = FrameRotation::from_axis(axis)?;
    let rotated = frame.to_frame(initial);
    let evolved = evolve(&rotated, params, t)?;
    Ok(frame.from_frame(&evolved))
}
