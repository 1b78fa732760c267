//! Pseudo-density matrices for ordered sequences of qubit measurements.
//!
//! A pseudo-density matrix (PDM) extends the density-matrix formalism to
//! measurement events at different times: it is Hermitian with unit trace,
//! but its eigenvalues may be negative, and that negativity witnesses
//! genuinely temporal correlations. Three construction routes live here:
//!
//! * [`build_pdm_general`], the n-event Pauli-coefficient sum driven by a
//!   [`CorrelatorOracle`];
//! * [`two_time_pdm`], the closed form for a pair of measurements on the
//!   thermally relaxing qubit (the first at equilibrium, the second a lag
//!   `t` later), normalized by `N(t)`;
//! * [`pdm_from_heat_capacity`], assembly from an externally supplied
//!   coefficient tensor plus marginal data for the identity row and column.
//!
//! [`spectrum_analytic`] and [`spectrum_numeric`] expose the eigenvalues and
//! the scalar negativity witness, in closed form and through an eigensolver.

use nalgebra::{allocator::Allocator, DMatrix, DefaultAllocator, Dim, Matrix4, OMatrix, Vector3};

use crate::error::{CoreError, CoreResult};
use crate::model::{DensityMatrix2, ModelParams, Pauli, C64};
use crate::response::ResponseTensorSample;

/// Below this, a normalization or pre-normalization trace counts as vanished.
const NORM_EPS: f64 = 1e-9;
/// Hermiticity tolerance for caller-supplied matrices.
const HERM_INPUT_TOL: f64 = 1e-12;
/// Looser Hermiticity tolerance for the numeric spectrum route.
const HERM_NUMERIC_TOL: f64 = 1e-10;
/// Eigenvalues above `-NEG_FLOOR` are treated as non-negative by the numeric
/// route, so positive semidefinite inputs report a negativity of exactly 0.
const NEG_FLOOR: f64 = 1e-12;
/// Slack on oracle contract checks.
const ORACLE_TOL: f64 = 1e-12;
/// Dense construction keeps 4^n tuples and 2^n x 2^n matrices tractable.
const MAX_EVENTS: usize = 12;

fn hermiticity_defect<D: Dim>(m: &OMatrix<C64, D, D>) -> f64
where
    DefaultAllocator: Allocator<D, D>,
{
    let adjoint = m.adjoint();
    m.iter()
        .zip(adjoint.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Decay envelopes of the two-time construction at lag `t`.
///
/// `c` and `s` form the damped rotation of the coherence block, `f` is the
/// longitudinal autocorrelation, and `n` the trace normalization; all four
/// recur throughout the closed-form spectrum and Bell analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalCoefficients {
    /// `e^{-gamma2 t} cos(omega0 t)`.
    pub c: f64,
    /// `e^{-gamma2 t} sin(omega0 t)`.
    pub s: f64,
    /// `tanh^2(x) + sech^2(x) e^{-gamma1 t}` with `x = hbar omega0/(2 kB T)`.
    pub f: f64,
    /// `N(t) = (1 + 2c + f)/4`.
    pub n: f64,
}

/// Evaluates the closed-form envelopes at lag `t >= 0`.
pub fn thermal_coefficients(params: &ModelParams, t: f64) -> CoreResult<ThermalCoefficients> {
    params.validate()?;
    if !t.is_finite() || t < 0.0 {
        return Err(CoreError::Domain(format!(
            "lag t = {t} must be finite and non-negative"
        )));
    }
    let envelope = (-params.gamma2() * t).exp();
    let c = envelope * (params.omega0 * t).cos();
    let s = envelope * (params.omega0 * t).sin();
    let th2 = params.z_eq().powi(2);
    let f = th2 + (1.0 - th2) * (-params.gamma1 * t).exp();
    let n = 0.25 * (1.0 + 2.0 * c + f);
    Ok(ThermalCoefficients { c, s, f, n })
}

/// Trace normalization `N(t)` of the two-time construction.
pub fn normalization(params: &ModelParams, t: f64) -> CoreResult<f64> {
    thermal_coefficients(params, t).map(|co| co.n)
}

fn degenerate(context: String, norm: f64) -> CoreError {
    CoreError::DegenerateNormalization { context, norm }
}

/// Construction route of a [`Pdm2`], which fixes the correlator convention
/// downstream consumers should use.
#[derive(Debug, Clone, PartialEq)]
pub enum PdmSource {
    /// Closed-form two-time construction; carries the model so regression
    /// correlators can be re-evaluated at the same lag.
    ThermalTwoTime(ModelParams),
    /// Assembled from a raw matrix or a coefficient table.
    Assembled,
}

/// Two-event pseudo-density matrix: Hermitian and unit trace by
/// construction, eigenvalues of either sign.
#[derive(Debug, Clone, PartialEq)]
pub struct Pdm2 {
    matrix: Matrix4<C64>,
    /// Earlier measurement time.
    pub t0: f64,
    /// Later measurement time.
    pub t1: f64,
    /// Trace of the matrix as supplied, before rescaling to unit trace.
    pub raw_trace: f64,
    /// Construction route.
    pub source: PdmSource,
}

impl Pdm2 {
    /// Wraps a caller-assembled matrix: validates Hermiticity, records the
    /// supplied trace, and rescales to unit trace.
    pub fn from_matrix(matrix: Matrix4<C64>, t0: f64, t1: f64) -> CoreResult<Self> {
        if !t0.is_finite() || !t1.is_finite() || t1 < t0 {
            return Err(CoreError::Domain(format!(
                "measurement times ({t0}, {t1}) must be finite and ordered"
            )));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(CoreError::Domain(
                "matrix entries must be finite".to_string(),
            ));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERM_INPUT_TOL {
            return Err(CoreError::ContractViolation(format!(
                "matrix is not Hermitian: defect {defect:.3e}"
            )));
        }
        let trace = matrix.trace().re;
        if trace.abs() <= NORM_EPS {
            return Err(degenerate("matrix normalization".to_string(), trace));
        }
        Ok(Pdm2 {
            matrix: matrix / C64::new(trace, 0.0),
            t0,
            t1,
            raw_trace: trace,
            source: PdmSource::Assembled,
        })
    }

    /// The normalized matrix, ordered earlier event (x) later event.
    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    /// Lag between the two measurement events.
    pub fn tau(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Model parameters when the construction carries them.
    pub fn params(&self) -> Option<&ModelParams> {
        match &self.source {
            PdmSource::ThermalTwoTime(p) => Some(p),
            PdmSource::Assembled => None,
        }
    }
}

/// Closed-form PDM for a measurement at equilibrium followed by one a lag
/// `t` later on the relaxing qubit.
///
/// In the product basis the matrix reads, up to the overall `1/(4N)`,
/// `[[1, 0, 0, z], [0, c, -i s, 0], [0, i s, c, 0], [z, 0, 0, f]]` with
/// `z = z_eq` the equilibrium polarization. Its trace is exactly 1.
pub fn two_time_pdm(params: &ModelParams, t: f64) -> CoreResult<Pdm2> {
    let co = thermal_coefficients(params, t)?;
    if co.n <= NORM_EPS {
        return Err(degenerate(
            format!("two-time construction at t = {t}"),
            co.n,
        ));
    }
    let q = 1.0 / (4.0 * co.n);
    let re = |v: f64| C64::new(v, 0.0);
    let o = re(0.0);
    let zq = re(params.z_eq() * q);
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        re(q), o,            o,                        zq,
        o,     re(co.c * q), C64::new(0.0, -co.s * q), o,
        o,     C64::new(0.0, co.s * q), re(co.c * q),  o,
        zq,    o,            o,                        re(co.f * q),
    );
    Ok(Pdm2 {
        matrix,
        t0: 0.0,
        t1: t,
        raw_trace: 1.0,
        source: PdmSource::ThermalTwoTime(*params),
    })
}

/// Expectation values for ordered tuples of Pauli measurements, one entry
/// per event with event 0 earliest. Identity entries mean "no measurement
/// at that event", so the all-identity tuple must evaluate to 1.
pub trait CorrelatorOracle {
    /// Expectation of the measurement product for this index tuple. The
    /// slice length always equals the event count passed to
    /// [`build_pdm_general`].
    fn expectation(&self, events: &[Pauli]) -> f64;

    /// Largest admissible magnitude for any expectation, enforced by the
    /// builder. Defaults to the measurement bound 1. Tables that describe an
    /// already-normalized matrix rather than raw measurement statistics can
    /// exceed that bound at intermediate lags and return `None` to lift the
    /// check.
    fn magnitude_bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Single-event oracle reading expectations off a fixed density matrix.
#[derive(Debug, Clone)]
pub struct StateOracle {
    state: DensityMatrix2,
}

impl StateOracle {
    pub fn new(state: DensityMatrix2) -> Self {
        StateOracle { state }
    }

    /// The qubit's Gibbs state at the model's bath temperature.
    pub fn gibbs(params: &ModelParams) -> Self {
        StateOracle {
            state: params.thermal_state(),
        }
    }
}

impl CorrelatorOracle for StateOracle {
    fn expectation(&self, events: &[Pauli]) -> f64 {
        assert_eq!(events.len(), 1, "single-event oracle got {events:?}");
        self.state.expectation(events[0])
    }
}

/// Pauli expansion coefficients of the closed-form two-time matrix, exposed
/// as a two-event oracle so [`build_pdm_general`] reproduces
/// [`two_time_pdm`] through the generic route.
///
/// These are coefficients of a normalized matrix, not raw measurement
/// statistics: the longitudinal coefficient `(1 - 2c + f)/(4N)` exceeds 1 at
/// intermediate lags, so the magnitude check is lifted.
#[derive(Debug, Clone)]
pub struct ThermalPdmOracle {
    coeffs: [[f64; 4]; 4],
}

impl ThermalPdmOracle {
    pub fn new(params: &ModelParams, t: f64) -> CoreResult<Self> {
        let co = thermal_coefficients(params, t)?;
        if co.n <= NORM_EPS {
            return Err(degenerate(
                format!("two-time construction at t = {t}"),
                co.n,
            ));
        }
        let z = params.z_eq();
        let mut coeffs = [[0.0; 4]; 4];
        coeffs[0][0] = 1.0;
        coeffs[1][1] = z / (2.0 * co.n);
        coeffs[2][2] = -z / (2.0 * co.n);
        coeffs[1][2] = -co.s / (2.0 * co.n);
        coeffs[2][1] = co.s / (2.0 * co.n);
        coeffs[3][3] = (1.0 - 2.0 * co.c + co.f) / (4.0 * co.n);
        coeffs[0][3] = (1.0 - co.f) / (4.0 * co.n);
        coeffs[3][0] = coeffs[0][3];
        Ok(ThermalPdmOracle { coeffs })
    }
}

impl CorrelatorOracle for ThermalPdmOracle {
    fn expectation(&self, events: &[Pauli]) -> f64 {
        assert_eq!(events.len(), 2, "two-event oracle got {events:?}");
        self.coeffs[events[0].index()][events[1].index()]
    }

    fn magnitude_bound(&self) -> Option<f64> {
        None
    }
}

/// General n-event construction: `R = 2^{-n} sum over all 4^n index tuples
/// of expectation * (sigma tensor product)`, event 0 as the leftmost factor.
///
/// For `n = 1` with a state oracle this is the plain Pauli decomposition of
/// that state; for larger `n` the result is Hermitian and unit trace but not
/// necessarily positive.
pub fn build_pdm_general<O: CorrelatorOracle + ?Sized>(
    oracle: &O,
    n: usize,
) -> CoreResult<DMatrix<C64>> {
    if n == 0 {
        return Err(CoreError::Domain(
            "event count must be at least 1".to_string(),
        ));
    }
    if n > MAX_EVENTS {
        return Err(CoreError::Domain(format!(
            "event count {n} exceeds the dense-construction limit {MAX_EVENTS}"
        )));
    }
    let dim = 1usize << n;
    let tuples = 1usize << (2 * n);
    let weight = 1.0 / dim as f64;
    let bound = oracle.magnitude_bound();
    let dense: Vec<DMatrix<C64>> = Pauli::ALL
        .iter()
        .map(|p| DMatrix::from_iterator(2, 2, p.matrix().iter().copied()))
        .collect();
    let mut events = vec![Pauli::I; n];
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for tuple in 0..tuples {
        for (slot, event) in events.iter_mut().enumerate() {
            *event = Pauli::from_index((tuple >> (2 * (n - 1 - slot))) & 3)?;
        }
        let value = oracle.expectation(&events);
        if !value.is_finite() {
            return Err(CoreError::ContractViolation(format!(
                "oracle returned a non-finite value for {events:?}"
            )));
        }
        if tuple == 0 && (value - 1.0).abs() > ORACLE_TOL {
            return Err(CoreError::ContractViolation(format!(
                "all-identity expectation must be 1, got {value}"
            )));
        }
        if let Some(b) = bound {
            if value.abs() > b + ORACLE_TOL {
                return Err(CoreError::ContractViolation(format!(
                    "expectation {value} for {events:?} exceeds the bound {b}"
                )));
            }
        }
        let op = events.iter().fold(DMatrix::identity(1, 1), |acc, p| {
            acc.kronecker(&dense[p.index()])
        });
        out += op * C64::new(weight * value, 0.0);
    }
    Ok(out)
}

/// Identity-row coefficients for [`pdm_from_heat_capacity`]: the `mu = 0`
/// and `nu = 0` entries a frequency-resolved tensor cannot supply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZerothMoments {
    /// Coefficient of the double identity; becomes the pre-normalization
    /// trace of the assembly.
    pub unit: f64,
    /// Coefficients of `sigma_k (x) I`: the earlier-event marginal.
    pub earlier: Vector3<f64>,
    /// Coefficients of `I (x) sigma_k`: the later-event marginal.
    pub later: Vector3<f64>,
}

impl ZerothMoments {
    /// Both marginals at thermal equilibrium: unit coefficient 1 and
    /// polarization `z_eq` along z.
    pub fn thermal(params: &ModelParams) -> Self {
        let z = Vector3::new(0.0, 0.0, params.z_eq());
        ZerothMoments {
            unit: 1.0,
            earlier: z,
            later: z,
        }
    }

    /// Unit trace with vanishing marginals.
    pub fn identity() -> Self {
        ZerothMoments {
            unit: 1.0,
            earlier: Vector3::zeros(),
            later: Vector3::zeros(),
        }
    }
}

/// Assembles a two-event PDM from a coefficient tensor over the
/// `sigma_i (x) sigma_j` block plus [`ZerothMoments`] for the identity row
/// and column, then rescales to unit trace.
///
/// Pauli tensor products are Hermitian, so the assembly is Hermitian exactly
/// when every coefficient is real; tensors with imaginary parts are rejected
/// rather than symmetrized.
pub fn pdm_from_heat_capacity(
    tensor: &ResponseTensorSample,
    zeroth: &ZerothMoments,
) -> CoreResult<Pdm2> {
    let coeff = |mu: usize, nu: usize| -> C64 {
        match (mu, nu) {
            (0, 0) => C64::new(zeroth.unit, 0.0),
            (0, j) => C64::new(zeroth.later[j - 1], 0.0),
            (i, 0) => C64::new(zeroth.earlier[i - 1], 0.0),
            (i, j) => tensor.entries[(i - 1, j - 1)],
        }
    };
    let mut matrix = Matrix4::<C64>::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let op = Pauli::ALL[mu].matrix().kronecker(&Pauli::ALL[nu].matrix());
            matrix += op * (coeff(mu, nu) * 0.25);
        }
    }
    Pdm2::from_matrix(matrix, 0.0, 0.0)
}

/// Eigenvalues and the scalar negativity witness of a two-event PDM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdmSpectrum {
    /// Sorted descending; ties keep construction order.
    pub eigenvalues: [f64; 4],
    /// Sum of `|lambda|` over negative eigenvalues.
    pub negativity: f64,
}

impl PdmSpectrum {
    /// Smallest eigenvalue; negative exactly when the PDM is not a state.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[3]
    }

    fn from_values(mut values: [f64; 4], floor: f64) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
        // An empty sum is IEEE -0.0; add +0.0 so exports render plain "0".
        let negativity: f64 = values.iter().filter(|&&v| v < -floor).map(|v| -v).sum();
        PdmSpectrum {
            eigenvalues: values,
            negativity: negativity + 0.0,
        }
    }
}

/// Closed-form spectrum of [`two_time_pdm`] at lag `t`.
///
/// The outer (population) block contributes
/// `(1 + f +/- sqrt((1 - f)^2 + 4 z_eq^2))/(8N)` and the coherence block
/// `(c +/- s)/(4N)`; the latter pair is where negativity first appears, at
/// the lag where `s` overtakes `c`.
pub fn spectrum_analytic(params: &ModelParams, t: f64) -> CoreResult<PdmSpectrum> {
    let co = thermal_coefficients(params, t)?;
    if co.n <= NORM_EPS {
        return Err(degenerate(
            format!("two-time construction at t = {t}"),
            co.n,
        ));
    }
    let disc = ((1.0 - co.f).powi(2) + 4.0 * params.z_eq().powi(2)).sqrt();
    let values = [
        (1.0 + co.f + disc) / (8.0 * co.n),
        (1.0 + co.f - disc) / (8.0 * co.n),
        (co.c + co.s) / (4.0 * co.n),
        (co.c - co.s) / (4.0 * co.n),
    ];
    Ok(PdmSpectrum::from_values(values, 0.0))
}

/// Spectrum through a Hermitian eigensolver; the numeric cross-check for
/// [`spectrum_analytic`] and the only route for assembled matrices.
pub fn spectrum_numeric(pdm: &Pdm2) -> CoreResult<PdmSpectrum> {
    let defect = hermiticity_defect(pdm.matrix());
    if defect > HERM_NUMERIC_TOL {
        return Err(CoreError::ContractViolation(format!(
            "matrix is not Hermitian: defect {defect:.3e}"
        )));
    }
    let eigen = (*pdm.matrix()).symmetric_eigen();
    let mut values = [0.0; 4];
    for (v, e) in values.iter_mut().zip(eigen.eigenvalues.iter()) {
        *v = *e;
    }
    Ok(PdmSpectrum::from_values(values, NEG_FLOOR))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, PI};

    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::BlochState;
    use crate::testutil;

    const TANH_HALF: f64 = 0.462_117_157_260_009_74;

    fn defaults() -> ModelParams {
        ModelParams::default()
    }

    fn tensor_from(entries: Matrix3<C64>) -> ResponseTensorSample {
        ResponseTensorSample {
            omega_mod: 0.0,
            entries,
            drive: Vector3::zeros(),
            tail_bound: 0.0,
        }
    }

    #[test]
    fn coefficients_start_at_their_exact_initial_values() {
        let co = thermal_coefficients(&defaults(), 0.0).unwrap();
        assert_eq!(co.c, 1.0);
        assert_eq!(co.s, 0.0);
        assert_abs_diff_eq!(co.f, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(co.n, 1.0, epsilon = 1e-15);
        // Frozen high-precision values at t = 1.
        let co = thermal_coefficients(&defaults(), 1.0).unwrap();
        assert_abs_diff_eq!(co.c, 0.162_735_927_210_299_92, epsilon = 1e-15);
        assert_abs_diff_eq!(co.s, 0.253_446_190_116_198_95, epsilon = 1e-15);
        assert_abs_diff_eq!(co.f, 0.533_298_054_229_795_3, epsilon = 1e-15);
        assert_abs_diff_eq!(co.n, 0.464_692_477_162_598_76, epsilon = 1e-15);
    }

    #[test]
    fn two_time_matrix_is_hermitian_with_unit_trace() {
        for t in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let pdm = two_time_pdm(&defaults(), t).unwrap();
            let trace = pdm.matrix().trace();
            assert_abs_diff_eq!(trace.re, 1.0, epsilon = 1e-14);
            assert_eq!(trace.im, 0.0);
            assert!(hermiticity_defect(pdm.matrix()) < 1e-15);
            assert_eq!(pdm.t0, 0.0);
            assert_eq!(pdm.t1, t);
            assert_eq!(pdm.tau(), t);
        }
    }

    #[test]
    fn corner_entries_carry_the_equilibrium_polarization() {
        // The unnormalized corner equals z_eq = -tanh(1/2) at every lag; only
        // the 1/(4N) scale changes with t.
        for t in [0.0, 2.0] {
            let pdm = two_time_pdm(&defaults(), t).unwrap();
            let n = normalization(&defaults(), t).unwrap();
            let corner = pdm.matrix()[(0, 3)] * C64::new(4.0 * n, 0.0);
            assert_abs_diff_eq!(corner.re, -TANH_HALF, epsilon = 1e-15);
            assert_eq!(corner.im, 0.0);
            assert_eq!(pdm.matrix()[(0, 3)], pdm.matrix()[(3, 0)]);
        }
    }

    #[test]
    fn coherence_block_is_conjugate_symmetric() {
        let t = 0.7;
        let pdm = two_time_pdm(&defaults(), t).unwrap();
        let co = thermal_coefficients(&defaults(), t).unwrap();
        let upper = pdm.matrix()[(1, 2)];
        assert_eq!(upper, pdm.matrix()[(2, 1)].conj());
        assert_eq!(upper.re, 0.0);
        assert_abs_diff_eq!(upper.im, -co.s / (4.0 * co.n), epsilon = 1e-16);
    }

    #[test]
    fn vanishing_normalization_is_reported_not_clipped() {
        // Without damping the normalization crosses zero at half a period.
        let params = ModelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let err = two_time_pdm(&params, PI).unwrap_err();
        match err {
            CoreError::DegenerateNormalization { norm, .. } => {
                assert!(norm.abs() <= 1e-9, "norm = {norm}")
            }
            other => panic!("expected degenerate normalization, got {other:?}"),
        }
        assert!(spectrum_analytic(&params, PI).is_err());
    }

    #[test]
    fn negative_lags_are_domain_errors() {
        assert!(matches!(
            two_time_pdm(&defaults(), -0.1),
            Err(CoreError::Domain(_))
        ));
        assert!(matches!(
            thermal_coefficients(&defaults(), f64::NAN),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn closed_form_spectrum_matches_frozen_values() {
        let spectrum = spectrum_analytic(&defaults(), 0.0).unwrap();
        let expected0 = [(1.0 + TANH_HALF) / 4.0, 0.25, 0.25, (1.0 - TANH_HALF) / 4.0];
        for (got, want) in spectrum.eigenvalues.iter().zip(expected0.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-15);
        }
        assert_eq!(spectrum.negativity, 0.0);

        let spectrum = spectrum_analytic(&defaults(), 1.0).unwrap();
        let expected1 = [
            0.690_962_856_681_177_9,
            0.223_901_901_676_834_21,
            0.133_936_474_373_241_6,
            -0.048_801_232_731_253_675,
        ];
        for (got, want) in spectrum.eigenvalues.iter().zip(expected1.iter()) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(spectrum.negativity, 0.048_801_232_731_253_675, epsilon = 1e-14);
        assert_eq!(spectrum.min_eigenvalue(), spectrum.eigenvalues[3]);
    }

    #[test]
    fn eigenvalues_sum_to_one_at_all_lags() {
        for k in 0..=100 {
            let t = 0.1 * k as f64;
            let spectrum = spectrum_analytic(&defaults(), t).unwrap();
            let sum: f64 = spectrum.eigenvalues.iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn negativity_onset_is_where_the_sine_overtakes_the_cosine() {
        // c - s crosses zero at omega0 t = pi/4 independent of the rates.
        let before = spectrum_analytic(&defaults(), FRAC_PI_4 - 0.01).unwrap();
        let at = spectrum_analytic(&defaults(), FRAC_PI_4).unwrap();
        let after = spectrum_analytic(&defaults(), FRAC_PI_4 + 0.01).unwrap();
        assert!(before.min_eigenvalue() > 0.0);
        assert!(at.min_eigenvalue().abs() <= 1e-15);
        assert!(after.min_eigenvalue() < 0.0);
        assert_eq!(before.negativity, 0.0);
        assert!(after.negativity > 0.0);
    }

    #[test]
    fn negativity_windows_follow_the_coherence_sign_pattern() {
        let delta = 0.05;
        let windows = [
            (FRAC_PI_4 + delta, 5.0 * FRAC_PI_4 - delta),
            (3.0 * FRAC_PI_4 + delta, 7.0 * FRAC_PI_4 - delta),
        ];
        for (lo, hi) in windows {
            for k in 0..=200 {
                let t = lo + (hi - lo) * k as f64 / 200.0;
                let spectrum = spectrum_analytic(&defaults(), t).unwrap();
                assert!(spectrum.min_eigenvalue() < 0.0, "t = {t}");
            }
        }
        // Past t = 7 the coherence envelope has decayed below 1e-3.
        for k in 0..=260 {
            let t = 7.05 + 0.05 * k as f64;
            let spectrum = spectrum_analytic(&defaults(), t).unwrap();
            assert!(spectrum.min_eigenvalue().abs() < 1e-3, "t = {t}");
        }
    }

    #[test]
    fn numeric_spectrum_agrees_with_the_closed_form() {
        for k in 0..=100 {
            let t = 0.1 * k as f64;
            let pdm = two_time_pdm(&defaults(), t).unwrap();
            let numeric = spectrum_numeric(&pdm).unwrap();
            let analytic = spectrum_analytic(&defaults(), t).unwrap();
            for (a, b) in numeric.eigenvalues.iter().zip(analytic.eigenvalues.iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
            assert_abs_diff_eq!(numeric.negativity, analytic.negativity, epsilon = 1e-10);
        }
    }

    #[test]
    fn numeric_spectrum_handles_exact_fixtures() {
        let quarter = C64::new(0.25, 0.0);
        let pdm = Pdm2::from_matrix(Matrix4::identity() * quarter, 0.0, 0.0).unwrap();
        let spectrum = spectrum_numeric(&pdm).unwrap();
        assert_eq!(spectrum.eigenvalues, [0.25; 4]);
        assert_eq!(spectrum.negativity, 0.0);

        let diag = Matrix4::from_diagonal(&nalgebra::Vector4::new(
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(0.25, 0.0),
            C64::new(-0.25, 0.0),
        ));
        let pdm = Pdm2::from_matrix(diag, 0.0, 0.0).unwrap();
        let spectrum = spectrum_numeric(&pdm).unwrap();
        assert_abs_diff_eq!(spectrum.negativity, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(spectrum.eigenvalues[3], -0.25, epsilon = 1e-15);
    }

    #[test]
    fn numeric_spectrum_matches_characteristic_polynomial_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut accepted = 0;
        while accepted < 20 {
            let mut m = Matrix4::<C64>::zeros();
            for i in 0..4 {
                m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
                for j in (i + 1)..4 {
                    let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            if m.trace().re.abs() < 0.1 {
                continue;
            }
            accepted += 1;
            let pdm = Pdm2::from_matrix(m, 0.0, 0.0).unwrap();
            let spectrum = spectrum_numeric(&pdm).unwrap();
            let roots = testutil::hermitian_eigenvalues_by_roots(pdm.matrix());
            for (a, b) in spectrum.eigenvalues.iter().zip(roots.iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn assembled_matrices_are_validated_and_rescaled() {
        let mut skew = Matrix4::<C64>::identity();
        skew[(0, 1)] = C64::new(0.3, 0.0);
        assert!(matches!(
            Pdm2::from_matrix(skew, 0.0, 0.0),
            Err(CoreError::ContractViolation(_))
        ));

        let half = Matrix4::identity() * C64::new(0.5, 0.0);
        let pdm = Pdm2::from_matrix(half, 0.0, 1.5).unwrap();
        assert_eq!(pdm.raw_trace, 2.0);
        assert_eq!(pdm.source, PdmSource::Assembled);
        assert!(pdm.params().is_none());
        assert_abs_diff_eq!(pdm.matrix()[(0, 0)].re, 0.25, epsilon = 1e-16);

        assert!(matches!(
            Pdm2::from_matrix(Matrix4::zeros(), 0.0, 0.0),
            Err(CoreError::DegenerateNormalization { .. })
        ));
        assert!(matches!(
            Pdm2::from_matrix(half, 1.0, 0.0),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn general_builder_reproduces_single_event_states() {
        let params = defaults();
        let gibbs = build_pdm_general(&StateOracle::gibbs(&params), 1).unwrap();
        let expected = params.thermal_state();
        for (a, b) in gibbs.iter().zip(expected.matrix().iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }

        let tilted = DensityMatrix2::from_bloch(&BlochState::new(0.3, -0.2, 0.4));
        let built = build_pdm_general(&StateOracle::new(tilted.clone()), 1).unwrap();
        for (a, b) in built.iter().zip(tilted.matrix().iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn general_builder_reproduces_the_two_time_closed_form() {
        let params = defaults();
        for t in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let oracle = ThermalPdmOracle::new(&params, t).unwrap();
            let built = build_pdm_general(&oracle, 2).unwrap();
            let direct = two_time_pdm(&params, t).unwrap();
            for (a, b) in built.iter().zip(direct.matrix().iter()) {
                assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    /// Product oracle: every event reads an independent single-qubit state.
    struct ProductOracle {
        blochs: Vec<Vector3<f64>>,
    }

    impl CorrelatorOracle for ProductOracle {
        fn expectation(&self, events: &[Pauli]) -> f64 {
            events
                .iter()
                .zip(self.blochs.iter())
                .map(|(p, b)| match p {
                    Pauli::I => 1.0,
                    Pauli::X => b.x,
                    Pauli::Y => b.y,
                    Pauli::Z => b.z,
                })
                .product()
        }
    }

    #[test]
    fn uncorrelated_oracles_factorize_into_tensor_products() {
        let a = Vector3::new(0.2, -0.3, 0.5);
        let b = Vector3::new(-0.1, 0.4, -0.6);
        let oracle = ProductOracle { blochs: vec![a, b] };
        let built = build_pdm_general(&oracle, 2).unwrap();
        let rho_a = DensityMatrix2::from_bloch(&BlochState::from_vector(&a));
        let rho_b = DensityMatrix2::from_bloch(&BlochState::from_vector(&b));
        let expected = rho_a.matrix().kronecker(rho_b.matrix());
        for (got, want) in built.iter().zip(expected.iter()) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-14);
        }

        // A vanishing first marginal leaves the maximally mixed factor.
        let oracle = ProductOracle {
            blochs: vec![Vector3::zeros(), b],
        };
        let built = build_pdm_general(&oracle, 2).unwrap();
        let mixed = DensityMatrix2::from_bloch(&BlochState::new(0.0, 0.0, 0.0));
        let expected = mixed.matrix().kronecker(rho_b.matrix());
        for (got, want) in built.iter().zip(expected.iter()) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn general_builder_scales_to_three_events() {
        let blochs = vec![
            Vector3::new(0.2, 0.0, 0.3),
            Vector3::new(0.0, -0.4, 0.1),
            Vector3::new(0.5, 0.1, -0.2),
        ];
        let oracle = ProductOracle {
            blochs: blochs.clone(),
        };
        let built = build_pdm_general(&oracle, 3).unwrap();
        assert_eq!(built.nrows(), 8);
        let trace: C64 = built.diagonal().iter().sum();
        assert_abs_diff_eq!(trace.re, 1.0, epsilon = 1e-14);
        let factors: Vec<_> = blochs
            .iter()
            .map(|b| DensityMatrix2::from_bloch(&BlochState::from_vector(b)))
            .collect();
        let expected = factors[0]
            .matrix()
            .kronecker(factors[1].matrix())
            .kronecker(factors[2].matrix());
        for (got, want) in built.iter().zip(expected.iter()) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-14);
        }
    }

    /// Constant oracle for exercising the builder's contract checks.
    struct ConstOracle {
        identity: f64,
        other: f64,
    }

    impl CorrelatorOracle for ConstOracle {
        fn expectation(&self, events: &[Pauli]) -> f64 {
            if events.iter().all(|p| *p == Pauli::I) {
                self.identity
            } else {
                self.other
            }
        }
    }

    #[test]
    fn general_builder_rejects_contract_breaches() {
        let overshoot = ConstOracle {
            identity: 1.0,
            other: 1.5,
        };
        assert!(matches!(
            build_pdm_general(&overshoot, 2),
            Err(CoreError::ContractViolation(_))
        ));

        let skewed_identity = ConstOracle {
            identity: 0.9,
            other: 0.0,
        };
        assert!(matches!(
            build_pdm_general(&skewed_identity, 2),
            Err(CoreError::ContractViolation(_))
        ));

        let non_finite = ConstOracle {
            identity: 1.0,
            other: f64::NAN,
        };
        assert!(matches!(
            build_pdm_general(&non_finite, 2),
            Err(CoreError::ContractViolation(_))
        ));

        let fine = ConstOracle {
            identity: 1.0,
            other: 0.0,
        };
        assert!(matches!(
            build_pdm_general(&fine, 0),
            Err(CoreError::Domain(_))
        ));
        assert!(matches!(
            build_pdm_general(&fine, MAX_EVENTS + 1),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn coefficient_assembly_matches_the_closed_form() {
        // Route the closed-form coefficient table through the assembly
        // entry point and compare against the direct construction.
        let params = defaults();
        let t = 1.0;
        let oracle = ThermalPdmOracle::new(&params, t).unwrap();
        let table = &oracle.coeffs;
        let mut entries = Matrix3::<C64>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                entries[(i, j)] = C64::new(table[i + 1][j + 1], 0.0);
            }
        }
        let zeroth = ZerothMoments {
            unit: table[0][0],
            earlier: Vector3::new(table[1][0], table[2][0], table[3][0]),
            later: Vector3::new(table[0][1], table[0][2], table[0][3]),
        };
        let assembled = pdm_from_heat_capacity(&tensor_from(entries), &zeroth).unwrap();
        let direct = two_time_pdm(&params, t).unwrap();
        for (a, b) in assembled.matrix().iter().zip(direct.matrix().iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(assembled.raw_trace, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_tensor_with_identity_moments_is_maximally_mixed() {
        let pdm =
            pdm_from_heat_capacity(&tensor_from(Matrix3::zeros()), &ZerothMoments::identity())
                .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(pdm.matrix()[(i, j)].re, want, epsilon = 1e-16);
                assert_eq!(pdm.matrix()[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn longitudinal_coefficient_and_marginals_round_trip() {
        // Equilibrium marginals plus a longitudinal coefficient f populate
        // the diagonal; the off-diagonal corners of the two-time closed form
        // come from the transverse coefficients instead.
        let params = defaults();
        let f = thermal_coefficients(&params, 1.0).unwrap().f;
        let mut entries = Matrix3::<C64>::zeros();
        entries[(2, 2)] = C64::new(f, 0.0);
        let pdm = pdm_from_heat_capacity(&tensor_from(entries), &ZerothMoments::thermal(&params))
            .unwrap();
        let m = pdm.matrix();

        let read =
            |mu: Pauli, nu: Pauli| -> C64 { (mu.matrix().kronecker(&nu.matrix()) * m).trace() };
        assert_abs_diff_eq!(read(Pauli::Z, Pauli::Z).re, f, epsilon = 1e-14);
        assert_abs_diff_eq!(read(Pauli::I, Pauli::Z).re, params.z_eq(), epsilon = 1e-14);
        assert_abs_diff_eq!(read(Pauli::Z, Pauli::I).re, params.z_eq(), epsilon = 1e-14);
        assert_eq!(m[(0, 3)], C64::new(0.0, 0.0));
        assert_abs_diff_eq!(
            m[(0, 0)].re,
            (1.0 + f + 2.0 * params.z_eq()) / 4.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn coefficient_scaling_leaves_the_normalized_matrix_invariant() {
        let params = defaults();
        let f = thermal_coefficients(&params, 1.0).unwrap().f;
        let mut entries = Matrix3::<C64>::zeros();
        entries[(2, 2)] = C64::new(f, 0.0);
        let zeroth = ZerothMoments::thermal(&params);
        let base = pdm_from_heat_capacity(&tensor_from(entries), &zeroth).unwrap();

        let k = 3.7;
        let scaled_zeroth = ZerothMoments {
            unit: k * zeroth.unit,
            earlier: zeroth.earlier * k,
            later: zeroth.later * k,
        };
        let scaled =
            pdm_from_heat_capacity(&tensor_from(entries * C64::new(k, 0.0)), &scaled_zeroth)
                .unwrap();
        for (a, b) in scaled.matrix().iter().zip(base.matrix().iter()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(scaled.raw_trace, k, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_and_complex_coefficient_tables_are_rejected() {
        let zeroth = ZerothMoments {
            unit: 0.0,
            earlier: Vector3::zeros(),
            later: Vector3::zeros(),
        };
        assert!(matches!(
            pdm_from_heat_capacity(&tensor_from(Matrix3::zeros()), &zeroth),
            Err(CoreError::DegenerateNormalization { .. })
        ));

        let mut entries = Matrix3::<C64>::zeros();
        entries[(0, 1)] = C64::new(0.0, 0.2);
        assert!(matches!(
            pdm_from_heat_capacity(&tensor_from(entries), &ZerothMoments::identity()),
            Err(CoreError::ContractViolation(_))
        ));
    }
}
