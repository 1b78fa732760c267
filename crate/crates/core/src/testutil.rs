//! Brute-force matrix-level oracles shared by unit tests.
//!
//! Everything here works directly on 2x2 complex matrices with the full
//! master equation in jump-operator form, sharing no code path with the
//! Pauli-component implementations under test.

use nalgebra::Matrix2;

use crate::model::{ModelParams, Pauli, C64};

pub(crate) fn sigma_minus() -> Matrix2<C64> {
    (Pauli::X.matrix() - Pauli::Y.matrix() * C64::i()) * C64::new(0.5, 0.0)
}

pub(crate) fn sigma_plus() -> Matrix2<C64> {
    (Pauli::X.matrix() + Pauli::Y.matrix() * C64::i()) * C64::new(0.5, 0.0)
}

/// Right-hand side of the master equation acting on an arbitrary (not
/// necessarily Hermitian) 2x2 matrix: Hamiltonian commutator plus the thermal
/// relaxation and dephasing dissipators built from jump operators.
pub(crate) fn master_rhs(params: &ModelParams, a: &Matrix2<C64>) -> Matrix2<C64> {
    let rates = params.derived_rates();
    let sz = Pauli::Z.matrix();
    let mut out = (sz * a - a * sz) * C64::new(0.0, -params.omega0 / 2.0);
    let channels = [
        (rates.gamma_minus, sigma_minus()),
        (rates.gamma_plus, sigma_plus()),
        (params.gamma_phi / 2.0, sz),
    ];
    for (rate, l) in channels {
        let ldag = l.adjoint();
        let ldl = ldag * l;
        out += (l * a * ldag - (ldl * a + a * ldl) * C64::new(0.5, 0.0)) * C64::new(rate, 0.0);
    }
    out
}

/// RK4 integration of the matrix master equation over `[0, tau]`.
pub(crate) fn master_propagate(params: &ModelParams, seed: Matrix2<C64>, tau: f64) -> Matrix2<C64> {
    let mut a = seed;
    let n = (tau / 1e-4).ceil().max(1.0) as usize;
    let h = tau / n as f64;
    for _ in 0..n {
        let k1 = master_rhs(params, &a);
        let k2 = master_rhs(params, &(a + k1 * C64::new(h / 2.0, 0.0)));
        let k3 = master_rhs(params, &(a + k2 * C64::new(h / 2.0, 0.0)));
        let k4 = master_rhs(params, &(a + k3 * C64::new(h, 0.0)));
        a += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
    }
    a
}

/// Coefficients `[c0, c1, c2, c3]` of the characteristic polynomial
/// `l^4 + c3 l^3 + c2 l^2 + c1 l + c0` via the Faddeev-LeVerrier recursion.
pub(crate) fn char_poly(m: &nalgebra::Matrix4<C64>) -> [C64; 4] {
    let id = nalgebra::Matrix4::<C64>::identity();
    let mut coeffs = [C64::new(0.0, 0.0); 4];
    let mut acc = *m;
    for k in 1..=4usize {
        let c = -acc.trace() / C64::new(k as f64, 0.0);
        coeffs[4 - k] = c;
        if k < 4 {
            acc = m * (acc + id * c);
        }
    }
    coeffs
}

/// All four roots of a monic quartic by Durand-Kerner iteration.
pub(crate) fn quartic_roots(coeffs: &[C64; 4]) -> [C64; 4] {
    let eval = |x: C64| {
        let mut p = C64::new(1.0, 0.0);
        for c in coeffs.iter().rev() {
            p = p * x + c;
        }
        p
    };
    let seed = C64::new(0.4, 0.9);
    let mut roots = [
        seed,
        seed * seed,
        seed * seed * seed,
        seed * seed * seed * seed,
    ];
    for _ in 0..200 {
        let mut shift: f64 = 0.0;
        for i in 0..4 {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..4 {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            shift = shift.max(delta.norm());
        }
        if shift < 1e-15 {
            break;
        }
    }
    roots
}

/// Hermitian eigenvalue oracle: characteristic polynomial roots, sorted
/// descending by real part. Independent of any dedicated eigensolver.
pub(crate) fn hermitian_eigenvalues_by_roots(m: &nalgebra::Matrix4<C64>) -> [f64; 4] {
    let roots = quartic_roots(&char_poly(m));
    let mut vals = [0.0; 4];
    for (v, r) in vals.iter_mut().zip(roots.iter()) {
        *v = r.re;
    }
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    vals
}
