//! Temporal Bell analysis on two-event pseudo-density matrices.
//!
//! A dichotomous measurement along unit vector `a` at the earlier event and
//! along `b` at the later one has expectation `E(a, b) = a^T T b`, with `T`
//! the 3x3 correlator table. The Bell combination
//! `S = |E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)|` obeys `S <= 2`
//! classically; its maximum over measurement directions follows from the two
//! largest eigenvalues of `T^dagger T`. This module computes the table, the
//! Bell functional, that spectral bound, a closed-form bound for the thermal
//! two-time construction, and an independent direction optimizer.
//!
//! Two correlator conventions coexist and are kept explicit. For a PDM built
//! by [`two_time_pdm`] the table holds the symmetrized regression
//! correlators of the relaxing qubit (what paired measurements on the
//! process would estimate): rows `[c, s, 0; -s, c, 0; 0, 0, f]`. For an
//! assembled matrix with no model attached the table is the plain trace
//! against the nine Pauli tensor products, i.e. the coefficient table of
//! that matrix. The two differ for the thermal closed form because its
//! matrix entries are not themselves measurement statistics; both `S_max`
//! routes are therefore carried side by side downstream.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{CoreError, CoreResult};
use crate::model::{ModelParams, Pauli, C64};
use crate::pdm::{thermal_coefficients, two_time_pdm, Pdm2, PdmSource};

/// Unit-norm tolerance for measurement directions.
const UNIT_TOL: f64 = 1e-12;
/// Below this the closed-form normalization counts as vanished.
const NORM_EPS: f64 = 1e-9;

/// 3x3 correlator table: entry `(i, j)` pairs `sigma_i` at the earlier event
/// with `sigma_j` at the later one.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix3 {
    matrix: Matrix3<C64>,
}

impl CorrelationMatrix3 {
    /// Wraps a finite table.
    pub fn from_matrix(matrix: Matrix3<C64>) -> CoreResult<Self> {
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(CoreError::Domain(
                "correlation entries must be finite".to_string(),
            ));
        }
        Ok(CorrelationMatrix3 { matrix })
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.matrix
    }

    /// Real part, the table entering the Bell functional: expectations of
    /// Hermitian observable pairs are real in any physical reading.
    pub fn real(&self) -> Matrix3<f64> {
        self.matrix.map(|z| z.re)
    }
}

/// Measurement directions `a1`, `a2` for the earlier event and `b1`, `b2`
/// for the later one; all unit vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementScheme {
    pub a1: Vector3<f64>,
    pub a2: Vector3<f64>,
    pub b1: Vector3<f64>,
    pub b2: Vector3<f64>,
}

impl MeasurementScheme {
    pub fn new(
        a1: Vector3<f64>,
        a2: Vector3<f64>,
        b1: Vector3<f64>,
        b2: Vector3<f64>,
    ) -> CoreResult<Self> {
        let scheme = MeasurementScheme { a1, a2, b1, b2 };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Checks every direction has unit norm.
    pub fn validate(&self) -> CoreResult<()> {
        for (name, v) in [
            ("a1", &self.a1),
            ("a2", &self.a2),
            ("b1", &self.b1),
            ("b2", &self.b2),
        ] {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(CoreError::Domain(format!(
                    "measurement direction {name} has norm {} instead of 1",
                    v.norm()
                )));
            }
        }
        Ok(())
    }
}

/// Correlator table of a two-event PDM.
///
/// Thermal two-time constructions use the symmetrized regression correlators
/// at the stored lag; assembled matrices use the plain Pauli-product trace.
pub fn correlation_matrix(pdm: &Pdm2) -> CorrelationMatrix3 {
    let matrix = match &pdm.source {
        PdmSource::ThermalTwoTime(params) => {
            // Construction already validated the parameters and the lag.
            let co = thermal_coefficients(params, pdm.tau())
                .expect("thermal PDM carries a valid model and lag");
            let re = |v: f64| C64::new(v, 0.0);
            Matrix3::new(
                re(co.c),
                re(co.s),
                re(0.0),
                re(-co.s),
                re(co.c),
                re(0.0),
                re(0.0),
                re(0.0),
                re(co.f),
            )
        }
        PdmSource::Assembled => {
            let axes = [Pauli::X, Pauli::Y, Pauli::Z];
            Matrix3::from_fn(|i, j| {
                (axes[i].matrix().kronecker(&axes[j].matrix()) * pdm.matrix()).trace()
            })
        }
    };
    CorrelationMatrix3 { matrix }
}

/// Bell combination `|E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)|` for an
/// explicit measurement scheme.
pub fn chsh_value(pdm: &Pdm2, scheme: &MeasurementScheme) -> CoreResult<f64> {
    scheme.validate()?;
    let m = correlation_matrix(pdm).real();
    let e = |a: &Vector3<f64>, b: &Vector3<f64>| a.dot(&(m * b));
    Ok(
        (e(&scheme.a1, &scheme.b1) + e(&scheme.a1, &scheme.b2) + e(&scheme.a2, &scheme.b1)
            - e(&scheme.a2, &scheme.b2))
        .abs(),
    )
}

/// Spectral bound on the Bell combination: `2 sqrt(l1 + l2)` with `l1, l2`
/// the two largest eigenvalues of `T^dagger T`.
pub fn s_max_horodecki(table: &CorrelationMatrix3) -> f64 {
    let gram = table.matrix.adjoint() * table.matrix;
    let mut eigen: Vec<f64> = gram.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigen.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    2.0 * (eigen[0] + eigen[1]).max(0.0).sqrt()
}

/// Result of the closed-form bound: the radicand `c^2 - s^2 + f^2` can go
/// negative for fast longitudinal relaxation, in which case the formula has
/// no real value and the outcome is flagged instead of clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SMaxOutcome {
    Value(f64),
    NegativeRadicand { radicand: f64 },
}

impl SMaxOutcome {
    /// The bound when it is real.
    pub fn value(&self) -> Option<f64> {
        match self {
            SMaxOutcome::Value(v) => Some(*v),
            SMaxOutcome::NegativeRadicand { .. } => None,
        }
    }
}

/// Closed-form maximal Bell combination for the thermal two-time
/// construction: `(2/N) sqrt(c^2 - s^2 + f^2)`, evaluated literally.
pub fn s_max_closed_form(params: &ModelParams, t: f64) -> CoreResult<SMaxOutcome> {
    let co = thermal_coefficients(params, t)?;
    if co.n <= NORM_EPS {
        return Err(CoreError::DegenerateNormalization {
            context: format!("closed-form Bell bound at t = {t}"),
            norm: co.n,
        });
    }
    let radicand = co.c * co.c - co.s * co.s + co.f * co.f;
    if radicand < 0.0 {
        return Ok(SMaxOutcome::NegativeRadicand { radicand });
    }
    Ok(SMaxOutcome::Value(2.0 * radicand.sqrt() / co.n))
}

/// Closed-form and spectral bounds side by side. The two agree at lag 0 and
/// generally diverge afterwards because they answer slightly different
/// questions; scans record both instead of asserting equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundComparison {
    pub t: f64,
    pub closed: SMaxOutcome,
    pub horodecki: f64,
}

impl BoundComparison {
    /// Absolute gap between the two bounds when the closed form is real.
    pub fn divergence(&self) -> Option<f64> {
        self.closed.value().map(|v| (v - self.horodecki).abs())
    }
}

/// Evaluates both bounds for the thermal construction at lag `t`.
pub fn compare_bounds(params: &ModelParams, t: f64) -> CoreResult<BoundComparison> {
    let closed = s_max_closed_form(params, t)?;
    let pdm = two_time_pdm(params, t)?;
    let horodecki = s_max_horodecki(&correlation_matrix(&pdm));
    Ok(BoundComparison {
        t,
        closed,
        horodecki,
    })
}

fn unit_from_angles(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(sp * ct, sp * st, cp)
}

/// Objective for a fixed earlier-event pair: the later-event directions that
/// maximize the Bell combination are the normalized images of `a1 +/- a2`,
/// leaving `|M^T (a1 + a2)| + |M^T (a1 - a2)|`.
fn pair_objective(mt: &Matrix3<f64>, a1: &Vector3<f64>, a2: &Vector3<f64>) -> f64 {
    (mt * (a1 + a2)).norm() + (mt * (a1 - a2)).norm()
}

fn normalized_or(v: Vector3<f64>, fallback: Vector3<f64>) -> Vector3<f64> {
    let n = v.norm();
    if n > 1e-14 {
        v / n
    } else {
        fallback
    }
}

/// Brute-force maximization of the Bell combination over measurement
/// directions: a spherical grid over the earlier-event pair (`coarse`
/// azimuthal points per vector, half that polar), the later-event pair
/// derived in closed form, then coordinate ascent with step halving.
///
/// Serves as an independent oracle for [`s_max_horodecki`].
pub fn optimize_directions(
    pdm: &Pdm2,
    coarse: usize,
    refine_iters: usize,
) -> CoreResult<(MeasurementScheme, f64)> {
    if coarse < 8 {
        return Err(CoreError::Domain(format!(
            "grid resolution {coarse} is below the minimum of 8 points per angle"
        )));
    }
    let mt = correlation_matrix(pdm).real().transpose();
    let theta_n = coarse;
    let phi_n = (coarse / 2).max(4);
    let theta = |i: usize| 2.0 * std::f64::consts::PI * i as f64 / theta_n as f64;
    // Half-step offset keeps the poles from collapsing grid cells.
    let phi = |j: usize| std::f64::consts::PI * (j as f64 + 0.5) / phi_n as f64;
    let per_vector = theta_n * phi_n;

    let decode = |cell: usize| -> [f64; 4] {
        let first = cell / per_vector;
        let second = cell % per_vector;
        [
            theta(first / phi_n),
            phi(first % phi_n),
            theta(second / phi_n),
            phi(second % phi_n),
        ]
    };
    let evaluate = |angles: &[f64; 4]| {
        let a1 = unit_from_angles(angles[0], angles[1]);
        let a2 = unit_from_angles(angles[2], angles[3]);
        pair_objective(&mt, &a1, &a2)
    };

    // Deterministic parallel max: larger value wins, smaller cell breaks ties.
    let (_, best_cell) = (0..per_vector * per_vector)
        .into_par_iter()
        .map(|cell| (evaluate(&decode(cell)), cell))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let mut angles = decode(best_cell);
    let mut best = evaluate(&angles);
    let mut steps = [
        2.0 * std::f64::consts::PI / theta_n as f64,
        std::f64::consts::PI / phi_n as f64,
        2.0 * std::f64::consts::PI / theta_n as f64,
        std::f64::consts::PI / phi_n as f64,
    ];
    for _ in 0..refine_iters {
        let mut improved = false;
        for k in 0..4 {
            for sign in [1.0, -1.0] {
                let mut trial = angles;
                trial[k] += sign * steps[k];
                let value = evaluate(&trial);
                if value > best {
                    best = value;
                    angles = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            for step in &mut steps {
                *step *= 0.5;
            }
        }
    }

    let a1 = unit_from_angles(angles[0], angles[1]);
    let a2 = unit_from_angles(angles[2], angles[3]);
    let b1 = normalized_or(mt * (a1 + a2), Vector3::z());
    let b2 = normalized_or(mt * (a1 - a2), Vector3::z());
    let scheme = MeasurementScheme::new(a1, a2, b1, b2)?;
    Ok((scheme, best))
}
