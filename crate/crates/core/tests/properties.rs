//! Randomized checks of the structural guarantees the library promises:
//! semigroup composition, Bloch-ball contraction, PDM shape, and the
//! optimality of the spectral Bell bound.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use proptest::prelude::*;
use tempwit_core::model::{BlochState, ModelParams, C64};
use tempwit_core::{chsh, lindblad, pdm};

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, 0.2f64..3.0, 0.05f64..2.0, 0.0f64..2.0).prop_map(
        |(omega0, temperature, gamma1, gamma_phi)| {
            ModelParams::new(omega0, temperature, gamma1, gamma_phi)
                .expect("strategy ranges satisfy the parameter domain")
        },
    )
}

fn bloch_strategy() -> impl Strategy<Value = BlochState> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y, z)| {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm > 1.0 {
            BlochState::new(x / norm, y / norm, z / norm)
        } else {
            BlochState::new(x, y, z)
        }
    })
}

fn unit_strategy() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_filter_map(
        "direction draw too short to normalize",
        |(x, y, z)| {
            let v = Vector3::new(x, y, z);
            (v.norm() > 1e-3).then(|| v / v.norm())
        },
    )
}

fn rotation_strategy() -> impl Strategy<Value = Rotation3<f64>> {
    (unit_strategy(), 0.0f64..std::f64::consts::TAU)
        .prop_map(|(axis, angle)| Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle))
}

fn distance(a: &BlochState, b: &BlochState) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt()
}

proptest! {
    #[test]
    fn propagators_compose_as_a_semigroup(
        p in params_strategy(),
        r in bloch_strategy(),
        t1 in 0.0f64..4.0,
        t2 in 0.0f64..4.0,
    ) {
        let stepwise = lindblad::evolve(&lindblad::evolve(&r, &p, t1).unwrap(), &p, t2).unwrap();
        let direct = lindblad::evolve(&r, &p, t1 + t2).unwrap();
        prop_assert!(distance(&stepwise, &direct) <= 1e-9);
    }

    #[test]
    fn evolution_contracts_bloch_distances(
        p in params_strategy(),
        r1 in bloch_strategy(),
        r2 in bloch_strategy(),
        t in 0.0f64..8.0,
    ) {
        let d0 = distance(&r1, &r2);
        let d1 = distance(
            &lindblad::evolve(&r1, &p, t).unwrap(),
            &lindblad::evolve(&r2, &p, t).unwrap(),
        );
        prop_assert!(d1 <= d0 * (1.0 + 1e-12) + 1e-15, "distance grew: {d0} -> {d1}");
    }

    #[test]
    fn evolution_preserves_the_bloch_ball(
        p in params_strategy(),
        r in bloch_strategy(),
        t in 0.0f64..8.0,
    ) {
        let evolved = lindblad::evolve(&r, &p, t).unwrap();
        let norm = (evolved.x.powi(2) + evolved.y.powi(2) + evolved.z.powi(2)).sqrt();
        prop_assert!(norm <= 1.0 + 1e-9, "left the ball: {norm}");
    }

    #[test]
    fn two_time_constructions_are_hermitian_with_unit_trace(
        p in params_strategy(),
        t in 0.0f64..8.0,
    ) {
        let constructed = pdm::two_time_pdm(&p, t).unwrap();
        let m = constructed.matrix();
        for row in 0..4 {
            for col in 0..4 {
                let defect = (m[(row, col)] - m[(col, row)].conj()).norm();
                prop_assert!(defect <= 1e-12, "Hermiticity defect {defect} at ({row}, {col})");
            }
        }
        let trace: C64 = (0..4).map(|d| m[(d, d)]).sum();
        prop_assert!((trace.re - 1.0).abs() <= 1e-12 && trace.im.abs() <= 1e-12);
    }

    #[test]
    fn spectra_sum_to_one_and_negativity_collects_negative_parts(
        p in params_strategy(),
        t in 0.0f64..8.0,
    ) {
        let spectrum = pdm::spectrum_analytic(&p, t).unwrap();
        let sum: f64 = spectrum.eigenvalues.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-10, "eigenvalue sum {sum}");
        prop_assert!(spectrum.negativity >= 0.0);
        let collected: f64 = spectrum
            .eigenvalues
            .iter()
            .filter(|&&v| v < 0.0)
            .map(|v| -v)
            .sum();
        prop_assert!((spectrum.negativity - collected).abs() <= 1e-12);
    }

    #[test]
    fn thermal_correlation_tables_are_real(
        p in params_strategy(),
        t in 0.0f64..8.0,
    ) {
        let table = chsh::correlation_matrix(&pdm::two_time_pdm(&p, t).unwrap());
        for entry in table.matrix().iter() {
            prop_assert!(entry.im.abs() <= 1e-12, "complex table entry {entry}");
        }
    }

    #[test]
    fn no_measurement_scheme_beats_the_spectral_bound(
        p in params_strategy(),
        t in 0.0f64..6.0,
        a1 in unit_strategy(),
        a2 in unit_strategy(),
        b1 in unit_strategy(),
        b2 in unit_strategy(),
    ) {
        let constructed = pdm::two_time_pdm(&p, t).unwrap();
        let scheme = chsh::MeasurementScheme::new(a1, a2, b1, b2).unwrap();
        let value = chsh::chsh_value(&constructed, &scheme).unwrap();
        let bound = chsh::s_max_horodecki(&chsh::correlation_matrix(&constructed));
        prop_assert!(value <= bound + 1e-9, "scheme value {value} beats bound {bound}");
    }

    #[test]
    fn spectral_bound_ignores_independent_frame_rotations(
        p in params_strategy(),
        t in 0.0f64..6.0,
        left in rotation_strategy(),
        right in rotation_strategy(),
    ) {
        let table = chsh::correlation_matrix(&pdm::two_time_pdm(&p, t).unwrap());
        let rotated_real: Matrix3<f64> = left.matrix() * table.real() * right.matrix();
        let rotated = chsh::CorrelationMatrix3::from_matrix(
            rotated_real.map(|x| C64::new(x, 0.0)),
        )
        .unwrap();
        let before = chsh::s_max_horodecki(&table);
        let after = chsh::s_max_horodecki(&rotated);
        prop_assert!((before - after).abs() <= 1e-9, "{before} vs {after}");
    }
}
