//! Linear-response thermodynamics of the thermal qubit.
//!
//! Two independent routes to the frequency-dependent heat capacity live here
//! and are deliberately never merged:
//!
//! * the relaxation route: a slow temperature modulation drags `z_eq(T)`
//!   behind itself with the longitudinal rate, giving the Debye form
//!   `C(omega) = C_eq * Gamma (Gamma + i omega) / (Gamma^2 + omega^2)`
//!   with `Gamma = gamma1` ([`complex_heat_capacity`], closed form, and
//!   [`heat_capacity_from_correlator`], the same quantity rebuilt numerically
//!   from the regression correlator);
//! * the commutator route: the Kubo susceptibility of the driven Hamiltonian
//!   decomposition and its Fourier transform ([`kubo_susceptibility`],
//!   [`kubo_spectrum`], [`response_tensor`]).
//!
//! For a static Hamiltonian along z the commutator route vanishes while the
//! relaxation route does not; both values are reported where they meet (the
//! CLI selfcheck) rather than equated.

use nalgebra::{Matrix3, Vector3};

use crate::error::{CoreError, CoreResult};
use crate::lindblad::{two_time_correlator_ordered, OperatorOrdering};
use crate::model::{ModelParams, Pauli, C64};
use crate::quad::integrate_oscillatory;

/// Complex heat capacity at one modulation frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCapacitySample {
    pub omega_mod: f64,
    pub c_real: f64,
    pub c_imag: f64,
}

/// The 3x3 tensor of Hamiltonian-component response entries at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseTensorSample {
    pub omega_mod: f64,
    pub entries: Matrix3<C64>,
    pub drive: Vector3<f64>,
    /// Rigorous bound on the truncated tail of every entry's integral, summed.
    pub tail_bound: f64,
}

/// Fourier transform of the commutator correlator with convergence metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuboSpectrum {
    pub value: C64,
    /// Bound on the neglected `[t_max, infinity)` tail.
    pub tail_bound: f64,
    /// Quadrature refinement residual.
    pub quad_error: f64,
}

/// Truncation tails larger than this are refused as non-converged.
const TAIL_TOL: f64 = 1e-3;

/// Relative tolerance handed to the oscillatory quadrature.
const QUAD_REL_TOL: f64 = 1e-8;

/// Default integration cutoff: every correlator channel decays at least as
/// `exp(-min(gamma1, gamma2) t)`.
pub fn default_t_max(params: &ModelParams) -> f64 {
    12.0 / params.gamma1.min(params.gamma2())
}

fn half_beta_omega(params: &ModelParams) -> f64 {
    params.beta_omega() / 2.0
}

/// Static heat capacity of the Gibbs qubit:
/// `C_eq = (hbar omega0)^2 / (4 kB T^2) * sech^2(hbar omega0 / 2 kB T)`.
pub fn equilibrium_heat_capacity(params: &ModelParams) -> f64 {
    let a = half_beta_omega(params);
    params.kb * (a / a.cosh()).powi(2)
}

/// Debye relaxation form `C(omega) = C_eq * Gamma/(Gamma - i omega)`,
/// equivalently `C_eq * Gamma (Gamma + i omega) / (Gamma^2 + omega^2)`.
///
/// `omega_mod = 0` returns `(C_eq, 0)` exactly; the imaginary part is odd in
/// the modulation frequency.
pub fn complex_heat_capacity(
    params: &ModelParams,
    omega_mod: f64,
) -> CoreResult<HeatCapacitySample> {
    if !omega_mod.is_finite() {
        return Err(CoreError::Domain(format!(
            "modulation frequency {omega_mod} must be finite"
        )));
    }
    let c_eq = equilibrium_heat_capacity(params);
    if omega_mod == 0.0 {
        return Ok(HeatCapacitySample {
            omega_mod,
            c_real: c_eq,
            c_imag: 0.0,
        });
    }
    let gamma = params.gamma1;
    let denom = gamma * gamma + omega_mod * omega_mod;
    Ok(HeatCapacitySample {
        omega_mod,
        c_real: c_eq * gamma * gamma / denom,
        c_imag: c_eq * gamma * omega_mod / denom,
    })
}

/// Rebuilds `C(omega)` from the fluctuation side: the symmetrized connected
/// `zz` regression correlator integrated against `e^{i omega t}`,
///
/// `C(omega) = kB a^2 [ <dz^2> + i omega INT_0^t_max <dz(t) dz(0)>_sym e^{i omega t} dt ]`
///
/// with `a = hbar omega0 / 2 kB T`. Numerically independent oracle for
/// [`complex_heat_capacity`]; agreement to quadrature accuracy is a test
/// assertion, not an implementation shortcut.
pub fn heat_capacity_from_correlator(
    params: &ModelParams,
    omega_mod: f64,
    t_max: f64,
) -> CoreResult<HeatCapacitySample> {
    if !omega_mod.is_finite() {
        return Err(CoreError::Domain(format!(
            "modulation frequency {omega_mod} must be finite"
        )));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(CoreError::Domain(format!(
            "integration cutoff {t_max} must be finite and positive"
        )));
    }
    let gamma1 = params.gamma1;
    let variance = 1.0 - params.z_eq().powi(2);
    let tail = if gamma1 > 0.0 {
        variance * (-gamma1 * t_max).exp() / gamma1
    } else {
        f64::INFINITY
    };
    if omega_mod != 0.0 && tail > TAIL_TOL {
        return Err(CoreError::Accuracy(format!(
            "connected zz correlator has not decayed at t_max = {t_max} (tail bound {tail:.3e})"
        )));
    }
    let zeq = params.z_eq();
    let sym_connected = |t: f64| {
        let later =
            two_time_correlator_ordered(Pauli::Z, Pauli::Z, t, params, OperatorOrdering::LaterLeft)
                .expect("nonnegative lag");
        let earlier = two_time_correlator_ordered(
            Pauli::Z,
            Pauli::Z,
            t,
            params,
            OperatorOrdering::EarlierLeft,
        )
        .expect("nonnegative lag");
        (later + earlier) * C64::new(0.5, 0.0) - C64::new(zeq * zeq, 0.0)
    };
    let integral = integrate_oscillatory(sym_connected, 0.0, t_max, omega_mod, QUAD_REL_TOL)?;
    let a = half_beta_omega(params);
    let prefactor = params.kb * a * a;
    let value =
        C64::new(prefactor * variance, 0.0) + C64::new(0.0, prefactor * omega_mod) * integral.value;
    Ok(HeatCapacitySample {
        omega_mod,
        c_real: value.re,
        c_imag: value.im,
    })
}

fn validate_drive(drive: &Vector3<f64>) -> CoreResult<()> {
    if drive.iter().all(|d| d.is_finite()) {
        Ok(())
    } else {
        Err(CoreError::Domain(format!(
            "drive vector ({}, {}, {}) must be finite",
            drive.x, drive.y, drive.z
        )))
    }
}

const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Weighted imaginary part of the correlator matrix:
/// `M(t) = sum_{mu,nu} d_mu d_nu Im<sigma_mu(t) sigma_nu(0)>`.
///
/// The commutator of the driven Hamiltonian components reduces to this via
/// `<[A(t), B(0)]> = 2i Im<A(t)B(0)>` for Hermitian A, B in a stationary
/// state.
fn commutator_weight(params: &ModelParams, drive: &Vector3<f64>, t: f64) -> f64 {
    let mut m = 0.0;
    for (row, i) in AXES.iter().enumerate() {
        for (col, j) in AXES.iter().enumerate() {
            let coef = drive[row] * drive[col];
            if coef == 0.0 {
                continue;
            }
            let corr = two_time_correlator_ordered(*i, *j, t, params, OperatorOrdering::LaterLeft)
                .expect("nonnegative lag");
            m += coef * corr.im;
        }
    }
    m
}

/// Kubo susceptibility of the drive-decomposed Hamiltonian
/// `H = (hbar/2) (d . sigma)`:
///
/// `chi(t) = (i/hbar) Theta(t) <[H(t), H(0)]>
///         = -(hbar/2) sum d_mu d_nu Im<sigma_mu(t) sigma_nu(0)>`.
///
/// The Heaviside step lives here: negative `t` returns 0.
pub fn kubo_susceptibility(params: &ModelParams, drive: &Vector3<f64>, t: f64) -> CoreResult<f64> {
    validate_drive(drive)?;
    if !t.is_finite() {
        return Err(CoreError::Domain(format!("time {t} must be finite")));
    }
    if t < 0.0 {
        return Ok(0.0);
    }
    Ok(-(params.hbar / 2.0) * commutator_weight(params, drive, t))
}

/// Per-channel envelope bound on `|M(t)|` for `t >= t_max`, integrated:
/// only the transverse block has imaginary correlator parts; each decays as
/// `e^{-gamma2 t}` with amplitude `|z_eq|` (diagonal) or 1 (off-diagonal).
fn commutator_tail_bound(params: &ModelParams, drive: &Vector3<f64>, t_max: f64) -> f64 {
    let g2 = params.gamma2();
    let amp = (drive.x * drive.x + drive.y * drive.y) * params.z_eq().abs()
        + 2.0 * (drive.x * drive.y).abs();
    if amp == 0.0 {
        return 0.0;
    }
    if g2 <= 0.0 {
        return f64::INFINITY;
    }
    amp * (-g2 * t_max).exp() / g2
}

/// Fourier transform of the commutator correlator:
/// `(1/2 hbar) INT_0^t_max <[H(t), H(0)]> e^{i omega t} dt`.
///
/// Returns the complex value with a rigorous truncation bound and the
/// quadrature residual; a tail bound above the convergence threshold is an
/// accuracy error (the integrand has not decayed at `t_max`).
pub fn kubo_spectrum(
    params: &ModelParams,
    drive: &Vector3<f64>,
    omega_mod: f64,
    t_max: f64,
) -> CoreResult<KuboSpectrum> {
    validate_drive(drive)?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(CoreError::Domain(format!(
            "integration cutoff {t_max} must be finite and positive"
        )));
    }
    let scaled_tail = params.hbar / 4.0 * commutator_tail_bound(params, drive, t_max);
    if scaled_tail > TAIL_TOL {
        return Err(CoreError::Accuracy(format!(
            "commutator correlator has not decayed at t_max = {t_max} \
             (tail bound {scaled_tail:.3e})"
        )));
    }
    let integral = integrate_oscillatory(
        |t| C64::new(commutator_weight(params, drive, t), 0.0),
        0.0,
        t_max,
        omega_mod,
        QUAD_REL_TOL,
    )?;
    // (1/2 hbar) * (hbar^2/4) * 2i * integral of M.
    let value = C64::new(0.0, params.hbar / 4.0) * integral.value;
    Ok(KuboSpectrum {
        value,
        tail_bound: scaled_tail,
        quad_error: params.hbar / 4.0 * integral.error_estimate,
    })
}

/// Decay rate and late-time amplitude of one connected correlator channel.
fn channel_envelope(params: &ModelParams, i: Pauli, j: Pauli) -> (f64, f64) {
    let zeq = params.z_eq();
    match (i, j) {
        (Pauli::Z, Pauli::Z) => (params.gamma1, 1.0 - zeq * zeq),
        (Pauli::X | Pauli::Y, Pauli::X | Pauli::Y) => (params.gamma2(), (1.0 + zeq * zeq).sqrt()),
        _ => (f64::INFINITY, 0.0),
    }
}

/// The drive-weighted response tensor
/// `C_{mu nu}(omega) = -(hbar omega / 2)^2 d_mu d_nu / (kB T^2)
///                     INT_0^t_max <sigma_mu(t) sigma_nu(0)>_connected dt`.
///
/// The drive's `e^{-i omega t}` cancels the `e^{+i omega t}` Fourier kernel,
/// leaving a plain integral; the modulation frequency survives only in the
/// quadratic prefactor. Connected correlators keep the `zz` channel
/// integrable (its raw correlator saturates at `tanh^2`).
pub fn response_tensor_ordered(
    params: &ModelParams,
    drive: &Vector3<f64>,
    omega_mod: f64,
    ordering: OperatorOrdering,
) -> CoreResult<ResponseTensorSample> {
    validate_drive(drive)?;
    if !omega_mod.is_finite() {
        return Err(CoreError::Domain(format!(
            "modulation frequency {omega_mod} must be finite"
        )));
    }
    // Cutoff scale: the global default when every channel decays, otherwise
    // the slowest rate among the channels this drive actually excites, so an
    // undriven frozen channel cannot push the cutoff to infinity.
    let mut slowest_driven = f64::INFINITY;
    for (row, i) in AXES.iter().enumerate() {
        for (col, j) in AXES.iter().enumerate() {
            if drive[row] * drive[col] == 0.0 {
                continue;
            }
            let (rate, amplitude) = channel_envelope(params, *i, *j);
            if amplitude > 0.0 {
                if rate <= 0.0 {
                    return Err(CoreError::Accuracy(format!(
                        "connected ({i:?}, {j:?}) correlator does not decay \
                         (zero rate), response integral diverges"
                    )));
                }
                slowest_driven = slowest_driven.min(rate);
            }
        }
    }
    let global_rate = params.gamma1.min(params.gamma2());
    let cutoff_rate = if global_rate > 0.0 {
        global_rate
    } else {
        slowest_driven
    };
    let t_max = if cutoff_rate.is_finite() {
        12.0 / cutoff_rate
    } else {
        0.0
    };
    let scale = -(params.hbar * omega_mod / 2.0).powi(2)
        / (params.kb * params.temperature * params.temperature);
    let mut entries = Matrix3::zeros();
    let mut tail_sum = 0.0;
    for (row, i) in AXES.iter().enumerate() {
        for (col, j) in AXES.iter().enumerate() {
            let coef = drive[row] * drive[col];
            if coef == 0.0 {
                continue;
            }
            let (rate, amplitude) = channel_envelope(params, *i, *j);
            if amplitude > 0.0 {
                tail_sum += (scale * coef).abs() * amplitude * (-rate * t_max).exp() / rate;
            }
            let zeq = params.z_eq();
            let connected = |t: f64| {
                let raw = two_time_correlator_ordered(*i, *j, t, params, ordering)
                    .expect("nonnegative lag");
                let mean = match (*i, *j) {
                    (Pauli::Z, Pauli::Z) => zeq * zeq,
                    _ => 0.0,
                };
                raw - C64::new(mean, 0.0)
            };
            let integral = integrate_oscillatory(connected, 0.0, t_max, 0.0, QUAD_REL_TOL)?;
            entries[(row, col)] = C64::new(scale * coef, 0.0) * integral.value;
        }
    }
    if tail_sum > TAIL_TOL {
        return Err(CoreError::Accuracy(format!(
            "response integrals have not decayed at t_max = {t_max} (tail bound {tail_sum:.3e})"
        )));
    }
    Ok(ResponseTensorSample {
        omega_mod,
        entries,
        drive: *drive,
        tail_bound: tail_sum,
    })
}

/// [`response_tensor_ordered`] with the conventional later-operator-left
/// correlator ordering.
pub fn response_tensor(
    params: &ModelParams,
    drive: &Vector3<f64>,
    omega_mod: f64,
) -> CoreResult<ResponseTensorSample> {
    response_tensor_ordered(params, drive, omega_mod, OperatorOrdering::LaterLeft)
}
