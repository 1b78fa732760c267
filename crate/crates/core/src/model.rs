//! Model parameters, Pauli algebra, and single-qubit state representations.
//!
//! The system is a two-level atom with Hamiltonian `H = (hbar*omega0/2) σz`
//! (eigenvalues ±hbar*omega0/2) in contact with a bath at temperature `T`.
//! Relaxation is characterized by the total rate `gamma1`, pure dephasing by
//! `gamma_phi`; the transverse decay rate is `gamma2 = gamma1/2 + gamma_phi`.
//! Emission and absorption rates `gamma_minus`, `gamma_plus` follow from two
//! conditions: they sum to `gamma1` and obey detailed balance
//! `gamma_plus/gamma_minus = exp(-hbar*omega0/(kB*T))`, so the steady state is
//! the Gibbs state with `<σz> = -tanh(hbar*omega0/(2*kB*T))`.

use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};

/// Complex scalar used throughout.
pub type C64 = Complex64;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Index into the Pauli basis `(σ0, σx, σy, σz)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    /// Identity, index 0.
    I,
    /// σx, index 1.
    X,
    /// σy, index 2.
    Y,
    /// σz, index 3.
    Z,
}

impl Pauli {
    /// All four basis labels in index order.
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Numeric index in 0..=3.
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    /// Inverse of [`Pauli::index`]; indices outside 0..=3 are a domain error.
    pub fn from_index(index: usize) -> CoreResult<Self> {
        match index {
            0 => Ok(Pauli::I),
            1 => Ok(Pauli::X),
            2 => Ok(Pauli::Y),
            3 => Ok(Pauli::Z),
            _ => Err(CoreError::Domain(format!(
                "Pauli index {index} outside 0..=3"
            ))),
        }
    }

    /// The 2x2 matrix of this basis element.
    pub fn matrix(self) -> Matrix2<C64> {
        match self {
            Pauli::I => Matrix2::new(ONE, ZERO, ZERO, ONE),
            Pauli::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Y => Matrix2::new(ZERO, -I, I, ZERO),
            Pauli::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }
}

/// The four Pauli matrices, built once and indexed by [`Pauli`].
#[derive(Debug, Clone)]
pub struct PauliBasis {
    sigma: [Matrix2<C64>; 4],
}

impl PauliBasis {
    pub fn new() -> Self {
        PauliBasis {
            sigma: [
                Pauli::I.matrix(),
                Pauli::X.matrix(),
                Pauli::Y.matrix(),
                Pauli::Z.matrix(),
            ],
        }
    }

    pub fn get(&self, p: Pauli) -> &Matrix2<C64> {
        &self.sigma[p.index()]
    }
}

impl Default for PauliBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Levi-Civita symbol for indices in 1..=3 (Pauli vector components).
///
/// Returns 0 for any repeated index; indices outside 1..=3 are a programming
/// error and panic.
pub fn levi_civita(a: usize, b: usize, c: usize) -> i32 {
    assert!(
        (1..=3).contains(&a) && (1..=3).contains(&b) && (1..=3).contains(&c),
        "levi_civita indices must be Pauli vector components 1..=3"
    );
    match (a, b, c) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1,
        _ => 0,
    }
}

/// Physical parameters of the dissipative qubit.
///
/// `hbar` and `kb` default to 1 (natural units); they are explicit fields so
/// every formula states its dimensional content.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Level splitting `omega0 > 0`.
    pub omega0: f64,
    /// Bath temperature `T > 0`.
    pub temperature: f64,
    /// Total relaxation rate `gamma1 >= 0`.
    pub gamma1: f64,
    /// Pure dephasing rate `gamma_phi >= 0`.
    pub gamma_phi: f64,
    /// Reduced Planck constant.
    pub hbar: f64,
    /// Boltzmann constant.
    pub kb: f64,
}

impl Default for ModelParams {
    /// The parameter point used throughout the figure data:
    /// `omega0 = 1`, `T = 1`, `gamma1 = 0.9`, `gamma_phi = 0.75`
    /// (so `gamma2 = 1.2`), with `hbar = kB = 1`.
    fn default() -> Self {
        ModelParams {
            omega0: 1.0,
            temperature: 1.0,
            gamma1: 0.9,
            gamma_phi: 0.75,
            hbar: 1.0,
            kb: 1.0,
        }
    }
}

impl ModelParams {
    /// Builds a parameter set in natural units (`hbar = kB = 1`).
    pub fn new(omega0: f64, temperature: f64, gamma1: f64, gamma_phi: f64) -> CoreResult<Self> {
        let params = ModelParams {
            omega0,
            temperature,
            gamma1,
            gamma_phi,
            hbar: 1.0,
            kb: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds a parameter set from the transverse rate `gamma2` instead of
    /// `gamma_phi`, using `gamma_phi = gamma2 - gamma1/2`. Rejects inputs
    /// where that difference is negative.
    pub fn from_gamma2(
        omega0: f64,
        temperature: f64,
        gamma1: f64,
        gamma2: f64,
    ) -> CoreResult<Self> {
        let gamma_phi = gamma2 - gamma1 / 2.0;
        if gamma_phi < 0.0 {
            return Err(CoreError::Parameter {
                name: "gamma2",
                value: gamma2,
                reason: "requires gamma2 >= gamma1/2 so that gamma_phi >= 0",
            });
        }
        ModelParams::new(omega0, temperature, gamma1, gamma_phi)
    }

    /// Checks every field against its domain.
    pub fn validate(&self) -> CoreResult<()> {
        let positive: [(&'static str, f64); 4] = [
            ("omega0", self.omega0),
            ("temperature", self.temperature),
            ("hbar", self.hbar),
            ("kb", self.kb),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(CoreError::Parameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                });
            }
        }
        let nonnegative: [(&'static str, f64); 2] =
            [("gamma1", self.gamma1), ("gamma_phi", self.gamma_phi)];
        for (name, value) in nonnegative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(CoreError::Parameter {
                    name,
                    value,
                    reason: "must be finite and >= 0",
                });
            }
        }
        Ok(())
    }

    /// Transverse decay rate `gamma2 = gamma1/2 + gamma_phi`.
    pub fn gamma2(&self) -> f64 {
        self.gamma1 / 2.0 + self.gamma_phi
    }

    /// Dimensionless splitting-to-temperature ratio `hbar*omega0/(kB*T)`.
    pub fn beta_omega(&self) -> f64 {
        self.hbar * self.omega0 / (self.kb * self.temperature)
    }

    /// Bose occupation of the bath mode at the qubit splitting,
    /// `n_th = 1/(exp(hbar*omega0/(kB*T)) - 1)`.
    pub fn n_th(&self) -> f64 {
        // exp_m1 keeps precision in the high-temperature limit where the
        // exponent is tiny.
        1.0 / self.beta_omega().exp_m1()
    }

    /// Equilibrium polarization `<σz> = -tanh(hbar*omega0/(2*kB*T))`.
    pub fn z_eq(&self) -> f64 {
        -(self.beta_omega() / 2.0).tanh()
    }

    /// All rate quantities derived from this parameter set.
    pub fn derived_rates(&self) -> DerivedRates {
        let x = self.beta_omega();
        // gamma_minus + gamma_plus = Gamma and gamma_plus/gamma_minus = e^-x.
        let gamma_minus = self.gamma1 / (1.0 + (-x).exp());
        let gamma_plus = self.gamma1 - gamma_minus;
        DerivedRates {
            big_gamma: self.gamma1,
            gamma2: self.gamma2(),
            n_th: self.n_th(),
            gamma_minus,
            gamma_plus,
        }
    }

    /// The Gibbs state of the bare Hamiltonian at the bath temperature.
    pub fn thermal_state(&self) -> DensityMatrix2 {
        DensityMatrix2::from_bloch(&BlochState::new(0.0, 0.0, self.z_eq()))
    }
}

/// Rates derived from [`ModelParams`].
///
/// `big_gamma` is the total relaxation rate entering the detailed-balance
/// split and the relaxation Lorentzian of the heat-capacity spectrum; it
/// equals `gamma1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedRates {
    pub big_gamma: f64,
    pub gamma2: f64,
    pub n_th: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

/// Bloch vector `(x, y, z)` of a single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochState { x, y, z }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        BlochState::new(v.x, v.y, v.z)
    }

    /// Euclidean norm; physical states satisfy `norm <= 1`.
    pub fn norm(&self) -> f64 {
        self.as_vector().norm()
    }

    /// Whether the state sits inside the Bloch ball up to `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.norm() <= 1.0 + tol
    }
}

/// Single-qubit density matrix, stored as its 2x2 complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix2 {
    matrix: Matrix2<C64>,
}

impl DensityMatrix2 {
    /// Wraps a raw matrix, requiring Hermiticity and unit trace to `tol`.
    pub fn from_matrix(matrix: Matrix2<C64>, tol: f64) -> CoreResult<Self> {
        let herm_defect = (matrix - matrix.adjoint()).norm();
        if herm_defect > tol {
            return Err(CoreError::Domain(format!(
                "density matrix is not Hermitian (defect {herm_defect:.3e})"
            )));
        }
        let trace_defect = (matrix.trace() - ONE).norm();
        if trace_defect > tol {
            return Err(CoreError::Domain(format!(
                "density matrix trace differs from 1 by {trace_defect:.3e}"
            )));
        }
        Ok(DensityMatrix2 { matrix })
    }

    /// `rho = (I + x σx + y σy + z σz) / 2`.
    pub fn from_bloch(state: &BlochState) -> Self {
        let mut m = Matrix2::zeros();
        m += Pauli::I.matrix();
        m += Pauli::X.matrix() * C64::new(state.x, 0.0);
        m += Pauli::Y.matrix() * C64::new(state.y, 0.0);
        m += Pauli::Z.matrix() * C64::new(state.z, 0.0);
        DensityMatrix2 {
            matrix: m * C64::new(0.5, 0.0),
        }
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    /// Bloch components `(Tr[rho σx], Tr[rho σy], Tr[rho σz])`.
    pub fn bloch(&self) -> BlochState {
        BlochState::new(
            self.expectation(Pauli::X),
            self.expectation(Pauli::Y),
            self.expectation(Pauli::Z),
        )
    }

    /// `Tr[rho σ_mu]`; real because both factors are Hermitian.
    pub fn expectation(&self, mu: Pauli) -> f64 {
        (self.matrix * mu.matrix()).trace().re
    }
}

/// Expectation value `Tr[rho σ_mu]` of a Pauli basis element.
pub fn pauli_expectation(rho: &DensityMatrix2, mu: Pauli) -> f64 {
    rho.expectation(mu)
}
