//! Analytic-vs-numeric oracle comparisons behind the `selfcheck` subcommand.
//!
//! Each row pits an independently derived reference against the library
//! value at the configured parameter point and checks the stated tolerance.
//! Any miss turns into an accuracy error so the process exits with code 2.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use nalgebra::Vector3;
use tempwit_core::error::{CoreError, CoreResult};
use tempwit_core::model::ModelParams;
use tempwit_core::{chsh, pdm, response, witness};

struct CheckRow {
    name: String,
    computed: f64,
    reference: f64,
    tolerance: f64,
}

impl CheckRow {
    fn delta(&self) -> f64 {
        (self.computed - self.reference).abs()
    }

    fn pass(&self) -> bool {
        self.delta() <= self.tolerance
    }
}

/// Runs every comparison and prints the table; errors with exit code 2
/// semantics when any row misses its tolerance.
pub fn run(params: &ModelParams) -> CoreResult<()> {
    let rows = collect(params)?;
    println!(
        "{:<50} {:>18} {:>18} {:>10} {:>9}  status",
        "check", "computed", "reference", "|delta|", "tol"
    );
    let mut failures = 0usize;
    for row in &rows {
        let status = if row.pass() {
            "pass"
        } else {
            failures += 1;
            "FAIL"
        };
        println!(
            "{:<50} {:>18.12} {:>18.12} {:>10.2e} {:>9.0e}  {status}",
            row.name,
            row.computed,
            row.reference,
            row.delta(),
            row.tolerance
        );
    }
    if failures > 0 {
        return Err(CoreError::Accuracy(format!(
            "selfcheck: {failures} comparison(s) out of tolerance"
        )));
    }
    println!("selfcheck: all {} comparisons within tolerance", rows.len());
    Ok(())
}

fn collect(params: &ModelParams) -> CoreResult<Vec<CheckRow>> {
    let mut rows = Vec::new();

    let closed = chsh::s_max_closed_form(params, 0.0)?
        .value()
        .unwrap_or(f64::NAN);
    rows.push(CheckRow {
        name: "Bell bound at t=0, closed form".into(),
        computed: closed,
        reference: 2.0 * SQRT_2,
        tolerance: 1e-9,
    });
    let table = chsh::correlation_matrix(&pdm::two_time_pdm(params, 0.0)?);
    rows.push(CheckRow {
        name: "Bell bound at t=0, spectral".into(),
        computed: chsh::s_max_horodecki(&table),
        reference: 2.0 * SQRT_2,
        tolerance: 1e-9,
    });

    // The first coherence sign change sits at a quarter precession period
    // regardless of the decay rates.
    let windows = witness::negativity_window(params, (0.0, 10.0 / params.omega0), 400)?;
    rows.push(CheckRow {
        name: "negativity onset vs quarter period".into(),
        computed: windows.first().map_or(f64::NAN, |w| w.0),
        reference: FRAC_PI_4 / params.omega0,
        tolerance: 1e-6,
    });

    let mut eig_defect = 0.0_f64;
    let mut sum_defect = 0.0_f64;
    for k in 0..=200 {
        let t = 10.0 * f64::from(k) / 200.0;
        let analytic = pdm::spectrum_analytic(params, t)?;
        let numeric = pdm::spectrum_numeric(&pdm::two_time_pdm(params, t)?)?;
        for i in 0..4 {
            eig_defect = eig_defect.max((analytic.eigenvalues[i] - numeric.eigenvalues[i]).abs());
        }
        sum_defect = sum_defect.max((analytic.eigenvalues.iter().sum::<f64>() - 1.0).abs());
    }
    rows.push(CheckRow {
        name: "eigenvalues, closed form vs solver (max, 201 t)".into(),
        computed: eig_defect,
        reference: 0.0,
        tolerance: 1e-10,
    });
    rows.push(CheckRow {
        name: "eigenvalue sum minus one (max, 201 t)".into(),
        computed: sum_defect,
        reference: 0.0,
        tolerance: 1e-10,
    });

    let oracle = pdm::ThermalPdmOracle::new(params, 1.0)?;
    let built = pdm::build_pdm_general(&oracle, 2)?;
    let direct = pdm::two_time_pdm(params, 1.0)?;
    let mut assembly_defect = 0.0_f64;
    for row in 0..4 {
        for col in 0..4 {
            assembly_defect =
                assembly_defect.max((built[(row, col)] - direct.matrix()[(row, col)]).norm());
        }
    }
    rows.push(CheckRow {
        name: "two-event assembly vs closed form at t=1".into(),
        computed: assembly_defect,
        reference: 0.0,
        tolerance: 1e-9,
    });

    let c_eq = response::equilibrium_heat_capacity(params);
    rows.push(CheckRow {
        name: "C'' at omega = 0".into(),
        computed: response::complex_heat_capacity(params, 0.0)?.c_imag,
        reference: 0.0,
        tolerance: 0.0,
    });
    rows.push(CheckRow {
        name: "C'' peak at omega = gamma1 vs C_eq/2".into(),
        computed: response::complex_heat_capacity(params, params.gamma1)?.c_imag,
        reference: 0.5 * c_eq,
        tolerance: 1e-9,
    });

    // Both heat-capacity routes side by side: the Debye form against the
    // correlator integral.
    let t_int = 30.0 / params.gamma1;
    for factor in [0.5, 1.0, 2.0] {
        let omega = factor * params.gamma1;
        let debye = response::complex_heat_capacity(params, omega)?;
        let rebuilt = response::heat_capacity_from_correlator(params, omega, t_int)?;
        rows.push(CheckRow {
            name: format!("C' routes at omega = {factor} gamma1"),
            computed: rebuilt.c_real,
            reference: debye.c_real,
            tolerance: 1e-8,
        });
        rows.push(CheckRow {
            name: format!("C'' routes at omega = {factor} gamma1"),
            computed: rebuilt.c_imag,
            reference: debye.c_imag,
            tolerance: 1e-8,
        });
    }

    rows.push(CheckRow {
        name: "C_eq vs Gibbs finite difference".into(),
        computed: gibbs_fd_heat_capacity(params),
        reference: c_eq,
        tolerance: 1e-6 * c_eq.abs(),
    });

    let kubo = response::kubo_spectrum(
        params,
        &Vector3::x(),
        params.omega0,
        response::default_t_max(params),
    )?;
    rows.push(CheckRow {
        name: "Kubo truncation tail at default cutoff".into(),
        computed: kubo.tail_bound,
        reference: 0.0,
        tolerance: 1e-6,
    });

    let pdm1 = pdm::two_time_pdm(params, 1.0)?;
    let (_, optimized) = chsh::optimize_directions(&pdm1, 32, 50)?;
    rows.push(CheckRow {
        name: "direction optimizer vs spectral bound at t=1".into(),
        computed: optimized,
        reference: chsh::s_max_horodecki(&chsh::correlation_matrix(&pdm1)),
        tolerance: 1e-4,
    });

    Ok(rows)
}

/// Centered difference of the Gibbs-state energy with respect to
/// temperature, through the density matrix rather than the closed form.
fn gibbs_fd_heat_capacity(params: &ModelParams) -> f64 {
    let energy = |temperature: f64| {
        let p = ModelParams {
            temperature,
            ..*params
        };
        0.5 * p.hbar * p.omega0 * p.thermal_state().bloch().z
    };
    let h = 1e-5 * params.temperature;
    (energy(params.temperature + h) - energy(params.temperature - h)) / (2.0 * h)
}
