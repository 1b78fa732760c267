//! Time-domain witness scans: negativity windows, Bell-violation windows,
//! the imaginary-heat-capacity violation region, and the sampled series
//! behind the three standard figures.
//!
//! Every window scan follows one pattern: evaluate a boolean witness on a
//! uniform time grid, then bisect each sign-change bracket down to
//! `REFINE_TOL`. Figure sweeps parallelize over samples; each sample is pure,
//! so assembly preserves grid order.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::chsh::{self, SMaxOutcome};
use crate::error::{CoreError, CoreResult};
use crate::model::ModelParams;
use crate::pdm;
use crate::response;

/// Negativity at or below this level does not count toward the region
/// verdict. The default mapping treats the late-time recurrences (amplitude
/// below 1e-4 at default parameters) as extinguished, which keeps the region
/// monotone once it closes.
pub const NEGATIVITY_FLOOR: f64 = 2e-4;

/// Window indicators ignore eigenvalues above `-EIG_FLOOR`: under strong
/// dephasing the coherence block still flips sign at amplitudes near 1e-18,
/// which a double-precision scan should not report as a physical window.
const EIG_FLOOR: f64 = 1e-12;

/// Bisection width for window and extinction crossings.
const REFINE_TOL: f64 = 1e-8;

/// Number of points in the default modulation-frequency grid.
const OMEGA_GRID_LEN: usize = 200;

/// One time sample of the combined witness sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSample {
    pub t: f64,
    /// Closed-form spectrum, descending.
    pub eigenvalues: [f64; 4],
    /// Sum of the negative eigenvalue magnitudes.
    pub negativity: f64,
    /// Closed-form Bell bound; NaN marks a negative radicand.
    pub s_max_closed: f64,
    /// Spectral Bell bound from the correlation table.
    pub s_max_horodecki: f64,
    /// Scaled C'' interval when the region verdict holds at `t`.
    pub c_imag_bounds: Option<(f64, f64)>,
}

/// An ordered witness sweep, as plotted by the figure commands.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    samples: Vec<ScanSample>,
}

impl ScanResult {
    /// Wraps a sweep, enforcing strictly increasing times and ordered
    /// intervals.
    pub fn new(samples: Vec<ScanSample>) -> CoreResult<Self> {
        for pair in samples.windows(2) {
            // partial_cmp keeps NaN times on the error path.
            if pair[0].t.partial_cmp(&pair[1].t) != Some(Ordering::Less) {
                return Err(CoreError::ContractViolation(format!(
                    "scan times must increase strictly: {} then {}",
                    pair[0].t, pair[1].t
                )));
            }
        }
        for sample in &samples {
            if let Some((lo, hi)) = sample.c_imag_bounds {
                if matches!(lo.partial_cmp(&hi), None | Some(Ordering::Greater)) {
                    return Err(CoreError::ContractViolation(format!(
                        "interval at t = {} is inverted: [{lo}, {hi}]",
                        sample.t
                    )));
                }
            }
        }
        Ok(ScanResult { samples })
    }

    pub fn samples(&self) -> &[ScanSample] {
        &self.samples
    }
}

/// Strategy mapping model state at time `t` to an interval of C'' values.
///
/// The region construction is heuristic, so the strategy is pluggable. The
/// default sweeps the Debye `C''(omega)` curve over a frequency grid, scales
/// it by the decaying weight `e^{-gamma1 t}`, and marks the interval as
/// violating when the combined verdict holds: negativity above
/// `negativity_floor`, or closed-form Bell bound above 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionMapping {
    /// Carries no strategy; every region query is a configuration error.
    Unconfigured,
    /// Scaled Debye sweep gated on the combined witness verdict.
    ScaledDebye { negativity_floor: f64 },
}

impl Default for RegionMapping {
    fn default() -> Self {
        RegionMapping::ScaledDebye {
            negativity_floor: NEGATIVITY_FLOOR,
        }
    }
}

/// Uniform time grid; the last point lands exactly on `t_range.1`.
pub fn time_grid(t_range: (f64, f64), samples: usize) -> CoreResult<Vec<f64>> {
    let (lo, hi) = t_range;
    if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi <= lo {
        return Err(CoreError::Domain(format!(
            "time range [{lo}, {hi}] must be finite, nonnegative, and increasing"
        )));
    }
    if samples < 2 {
        return Err(CoreError::Domain(format!(
            "a scan needs at least 2 samples, got {samples}"
        )));
    }
    let step = (hi - lo) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|k| {
            if k == samples - 1 {
                hi
            } else {
                lo + step * k as f64
            }
        })
        .collect())
}

/// Narrows a bracket with `indicator(lo) == lo_flag != indicator(hi)` down to
/// `REFINE_TOL` and returns its midpoint.
fn bisect_flip(
    indicator: &dyn Fn(f64) -> CoreResult<bool>,
    mut lo: f64,
    mut hi: f64,
    lo_flag: bool,
) -> CoreResult<f64> {
    while hi - lo > REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        if indicator(mid)? == lo_flag {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Flags the indicator over the grid, bisects every flip, and assembles
/// maximal `true` intervals clipped to the scan range.
fn scan_windows(
    indicator: &dyn Fn(f64) -> CoreResult<bool>,
    t_range: (f64, f64),
    samples: usize,
) -> CoreResult<Vec<(f64, f64)>> {
    let grid = time_grid(t_range, samples)?;
    let flags = grid
        .iter()
        .map(|&t| indicator(t))
        .collect::<CoreResult<Vec<bool>>>()?;
    let mut windows = Vec::new();
    let mut open = flags[0].then_some(grid[0]);
    for k in 1..grid.len() {
        if flags[k] == flags[k - 1] {
            continue;
        }
        let crossing = bisect_flip(indicator, grid[k - 1], grid[k], flags[k - 1])?;
        match open.take() {
            Some(onset) => windows.push((onset, crossing)),
            None => open = Some(crossing),
        }
    }
    if let Some(onset) = open {
        windows.push((onset, t_range.1));
    }
    Ok(windows)
}

/// Intervals of `t_range` on which the closed-form spectrum dips negative.
///
/// The indicator is `min eigenvalue < -EIG_FLOOR`; crossings are refined by
/// bisection to 1e-8 in `t`. Windows cut off by the scan range keep the range
/// endpoint as their edge.
pub fn negativity_window(
    params: &ModelParams,
    t_range: (f64, f64),
    samples: usize,
) -> CoreResult<Vec<(f64, f64)>> {
    params.validate()?;
    let negative = |t: f64| -> CoreResult<bool> {
        Ok(pdm::spectrum_analytic(params, t)?.min_eigenvalue() < -EIG_FLOOR)
    };
    scan_windows(&negative, t_range, samples)
}

/// Violation verdict from the closed-form Bell bound.
///
/// A vanishing normalization counts as violating: the bound diverges as the
/// trace scale goes to zero, and the zero sits strictly inside a genuine
/// window at every parameter point that can reach it (all rates zero, `t`
/// near an odd multiple of `pi / omega0`).
fn closed_violation(params: &ModelParams, t: f64) -> CoreResult<bool> {
    match chsh::s_max_closed_form(params, t) {
        Ok(SMaxOutcome::Value(v)) => Ok(v > 2.0),
        Ok(SMaxOutcome::NegativeRadicand { .. }) => Ok(false),
        Err(CoreError::DegenerateNormalization { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

/// Intervals of `t_range` on which the closed-form Bell bound exceeds 2.
pub fn chsh_window(
    params: &ModelParams,
    t_range: (f64, f64),
    samples: usize,
) -> CoreResult<Vec<(f64, f64)>> {
    params.validate()?;
    let violating = |t: f64| -> CoreResult<bool> { closed_violation(params, t) };
    scan_windows(&violating, t_range, samples)
}

/// 200 log-spaced modulation frequencies spanning `[gamma1/100, 100 gamma1]`.
pub fn default_omega_grid(params: &ModelParams) -> CoreResult<Vec<f64>> {
    params.validate()?;
    if params.gamma1 <= 0.0 {
        return Err(CoreError::Domain(
            "the default frequency grid needs a positive relaxation rate".into(),
        ));
    }
    let ln_lo = (1e-2 * params.gamma1).ln();
    let ln_hi = (1e2 * params.gamma1).ln();
    Ok((0..OMEGA_GRID_LEN)
        .map(|k| (ln_lo + (ln_hi - ln_lo) * k as f64 / (OMEGA_GRID_LEN - 1) as f64).exp())
        .collect())
}

/// Interval of scaled `C''(omega)` values marked as entanglement-witnessing
/// at time `t`, or `None` when no witness fires.
///
/// Under [`RegionMapping::ScaledDebye`] the interval is the min/max over
/// `omega_grid` of `C''(omega) e^{-gamma1 t}`.
pub fn cpp_violation_region(
    params: &ModelParams,
    t: f64,
    mapping: &RegionMapping,
    omega_grid: &[f64],
) -> CoreResult<Option<(f64, f64)>> {
    let RegionMapping::ScaledDebye { negativity_floor } = mapping else {
        return Err(CoreError::Configuration(
            "region mapping is unconfigured; select a strategy first".into(),
        ));
    };
    if omega_grid.is_empty() {
        return Err(CoreError::Domain(
            "the violation region needs a non-empty frequency grid".into(),
        ));
    }
    let witnessed = closed_violation(params, t)?
        || pdm::spectrum_analytic(params, t)?.negativity > *negativity_floor;
    if !witnessed {
        return Ok(None);
    }
    let weight = (-params.gamma1 * t).exp();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &omega in omega_grid {
        let scaled = response::complex_heat_capacity(params, omega)?.c_imag * weight;
        lo = lo.min(scaled);
        hi = hi.max(scaled);
    }
    Ok(Some((lo, hi)))
}

/// Last time in `t_range` at which the violation region closes, refined by
/// bisection. `None` when the region never closes inside the range, or never
/// opens at all.
pub fn region_extinction_time(
    params: &ModelParams,
    mapping: &RegionMapping,
    omega_grid: &[f64],
    t_range: (f64, f64),
    samples: usize,
) -> CoreResult<Option<f64>> {
    let occupied = |t: f64| -> CoreResult<bool> {
        Ok(cpp_violation_region(params, t, mapping, omega_grid)?.is_some())
    };
    let windows = scan_windows(&occupied, t_range, samples)?;
    Ok(windows
        .last()
        .map(|&(_, offset)| offset)
        .filter(|&offset| offset < t_range.1))
}

/// Sampled data series behind the standard figure set.
///
/// `which = 1` tracks the closed-form spectrum, `2` the two Bell bounds, and
/// `3` additionally fills `c_imag_bounds` from the default region mapping.
pub fn figure_data(
    params: &ModelParams,
    which: u8,
    t_range: (f64, f64),
    samples: usize,
) -> CoreResult<ScanResult> {
    if !(1..=3).contains(&which) {
        return Err(CoreError::Domain(format!(
            "figure index {which} is not one of 1, 2, 3"
        )));
    }
    params.validate()?;
    let times = time_grid(t_range, samples)?;
    let mapping = RegionMapping::default();
    let omega_grid = if which == 3 {
        Some(default_omega_grid(params)?)
    } else {
        None
    };
    let rows = times
        .par_iter()
        .map(|&t| -> CoreResult<ScanSample> {
            let spectrum = pdm::spectrum_analytic(params, t)?;
            let s_max_closed = match chsh::s_max_closed_form(params, t)? {
                SMaxOutcome::Value(v) => v,
                SMaxOutcome::NegativeRadicand { .. } => f64::NAN,
            };
            let table = chsh::correlation_matrix(&pdm::two_time_pdm(params, t)?);
            let c_imag_bounds = match &omega_grid {
                Some(grid) => cpp_violation_region(params, t, &mapping, grid)?,
                None => None,
            };
            Ok(ScanSample {
                t,
                eigenvalues: spectrum.eigenvalues,
                negativity: spectrum.negativity,
                s_max_closed,
                s_max_horodecki: chsh::s_max_horodecki(&table),
                c_imag_bounds,
            })
        })
        .collect::<CoreResult<Vec<ScanSample>>>()?;
    ScanResult::new(rows)
}
