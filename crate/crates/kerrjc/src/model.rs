//! Hamiltonians of the coupled qubit-resonator system on the truncated
//! (composite) space, and the map from physical circuit parameters to model
//! parameters.
//!
//! Composite basis ordering is qubit-major: index = q*dim + n. All builders
//! return exactly Hermitian matrices (symmetrized after construction so the
//! conjugate-symmetry holds bit-for-bit).

use nalgebra::DMatrix;

use crate::decoherence::DecoherenceParams;
use crate::fock::{self, FockSpace, Operator, StateVector};
use crate::linalg;
use crate::{Error, Result, C64};

/// Ratio below which a scale separation is treated as "much smaller" by the
/// informational regime flags.
const REGIME_RATIO: f64 = 0.1;

/// Model parameters in ħ=1 units: resonator frequency, qubit splitting,
/// coupling, and Kerr strength.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SystemParams {
    pub omega: f64,
    pub omega_q: f64,
    pub g: f64,
    pub chi: f64,
}

impl SystemParams {
    pub fn new(omega: f64, omega_q: f64, g: f64, chi: f64) -> Result<Self> {
        crate::error::require_positive("omega", omega)?;
        for (name, v) in [("omega_q", omega_q), ("g", g), ("chi", chi)] {
            crate::error::require_non_negative(name, v)?;
        }
        Ok(Self {
            omega,
            omega_q,
            g,
            chi,
        })
    }

    /// Same frequency for qubit and resonator, as the resonant dynamics
    /// assume.
    pub fn resonant(omega: f64, g: f64, chi: f64) -> Result<Self> {
        Self::new(omega, omega, g, chi)
    }

    /// Informational: the rotating-wave approximation needs g much smaller
    /// than omega.
    pub fn rwa_valid(&self) -> bool {
        self.g < REGIME_RATIO * self.omega
    }

    /// Informational: the closed-form dressed dynamics assume chi much
    /// smaller than g.
    pub fn weak_kerr(&self) -> bool {
        self.chi < REGIME_RATIO * self.g
    }
}

/// Physical circuit parameters: resonator mass/frequency/quartic stiffness
/// and the charging-energy geometry behind the coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Effective mass.
    pub m: f64,
    /// Linear resonator frequency.
    pub omega: f64,
    /// Quartic stiffness.
    pub alpha: f64,
    /// Charging energy.
    pub e_c: f64,
    /// Induced charge number (proportional to the bias voltage).
    pub n_n: f64,
    /// Zero-point length.
    pub x_zp: f64,
    /// Gap between resonator and island.
    pub d: f64,
}

impl PhysicalParams {
    pub fn new(
        m: f64,
        omega: f64,
        alpha: f64,
        e_c: f64,
        n_n: f64,
        x_zp: f64,
        d: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("m", m),
            ("omega", omega),
            ("alpha", alpha),
            ("e_c", e_c),
            ("n_n", n_n),
            ("x_zp", x_zp),
            ("d", d),
        ] {
            crate::error::require_positive(name, v)?;
        }
        if x_zp >= d {
            return Err(Error::InvalidParams(format!(
                "x_zp = {x_zp} must be small against the gap d = {d}"
            )));
        }
        Ok(Self {
            m,
            omega,
            alpha,
            e_c,
            n_n,
            x_zp,
            d,
        })
    }
}

/// Kerr strength from the quartic stiffness, chi = alpha / (8 m omega).
///
/// Caveat: substituting x = x_zp (a† + a) into the quartic potential gives
/// the coefficient 3 alpha / (8 m² omega²) for the (chi/6)(a†+a)⁴ form, not
/// alpha / (8 m omega); the two differ dimensionally. This function keeps
/// the latter convention, and the rest of the library treats chi itself as
/// the primitive nonlinearity parameter so no dynamics depend on this map.
pub fn derive_chi(p: &PhysicalParams) -> f64 {
    p.alpha / (8.0 * p.m * p.omega)
}

/// Coupling constant from the charging geometry, g = 4 E_C n_N x_zp / d.
pub fn derive_g(p: &PhysicalParams) -> f64 {
    4.0 * p.e_c * p.n_n * p.x_zp / p.d
}

/// Two-level qubit tensored with a truncated resonator, basis index
/// q*dim + n (qubit-major).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeSpace {
    resonator: FockSpace,
}

impl CompositeSpace {
    pub fn new(resonator: FockSpace) -> Self {
        Self { resonator }
    }

    pub fn resonator(&self) -> FockSpace {
        self.resonator
    }

    pub fn dim(&self) -> usize {
        2 * self.resonator.dim()
    }

    pub fn index(&self, q: usize, n: usize) -> usize {
        debug_assert!(q < 2 && n < self.resonator.dim());
        q * self.resonator.dim() + n
    }

    /// (alpha|0>_q + beta|1>_q) ⊗ |res>.
    pub fn product_state(&self, alpha: C64, beta: C64, res: &StateVector) -> Result<StateVector> {
        if res.dim() != self.resonator.dim() {
            return Err(Error::DimensionMismatch(format!(
                "resonator state has dim {}, space expects {}",
                res.dim(),
                self.resonator.dim()
            )));
        }
        let dim = self.resonator.dim();
        let mut amps = vec![C64::new(0.0, 0.0); 2 * dim];
        for n in 0..dim {
            amps[n] = alpha * res.amplitude(n);
            amps[dim + n] = beta * res.amplitude(n);
        }
        Ok(StateVector::from_amplitudes(amps))
    }

    /// Reduced qubit state: rho[q][q'] = sum_n psi[q,n] conj(psi[q',n]).
    pub fn reduced_qubit(&self, psi: &StateVector) -> Result<QubitDensity> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state has dim {}, composite space has {}",
                psi.dim(),
                self.dim()
            )));
        }
        let dim = self.resonator.dim();
        let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
        for (q, row) in rho.iter_mut().enumerate() {
            for (qp, entry) in row.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..dim {
                    acc += psi.amplitude(q * dim + n) * psi.amplitude(qp * dim + n).conj();
                }
                *entry = acc;
            }
        }
        Ok(QubitDensity { rho })
    }
}

/// 2x2 qubit density matrix from a partial trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    rho: [[C64; 2]; 2],
}

impl QubitDensity {
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.rho[i][j]
    }

    pub fn trace(&self) -> f64 {
        (self.rho[0][0] + self.rho[1][1]).re
    }

    /// Tr(rho²), in [1/2, 1] for normalized states.
    pub fn purity(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += self.rho[i][j] * self.rho[j][i];
            }
        }
        acc.re
    }

    /// Trace distance (1/2)||rho - sigma||_1 between two qubit states.
    pub fn trace_distance(&self, other: &QubitDensity) -> f64 {
        // Eigenvalues of the Hermitian 2x2 difference via the closed form.
        let d00 = (self.rho[0][0] - other.rho[0][0]).re;
        let d11 = (self.rho[1][1] - other.rho[1][1]).re;
        let d01 = self.rho[0][1] - other.rho[0][1];
        let mean = 0.5 * (d00 + d11);
        let disc = (0.25 * (d00 - d11).powi(2) + d01.norm_sqr()).sqrt();
        0.5 * ((mean + disc).abs() + (mean - disc).abs())
    }
}

/// sigma_z = diag(-1, +1): |1>_q is the excited state.
fn sigma_z() -> [[C64; 2]; 2] {
    [
        [C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ]
}

fn sigma_x() -> [[C64; 2]; 2] {
    [
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ]
}

/// sigma_+ = |1><0|.
fn sigma_plus() -> [[C64; 2]; 2] {
    [
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ]
}

/// sigma_- = |0><1|.
fn sigma_minus() -> [[C64; 2]; 2] {
    [
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
    ]
}

/// Kronecker product qubit ⊗ resonator in qubit-major ordering.
fn kron_qubit(q: [[C64; 2]; 2], res: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = res.nrows();
    let mut out = DMatrix::zeros(2 * dim, 2 * dim);
    for (qi, row) in q.iter().enumerate() {
        for (qj, &scale) in row.iter().enumerate() {
            if scale == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..dim {
                for j in 0..dim {
                    out[(qi * dim + i, qj * dim + j)] = scale * res[(i, j)];
                }
            }
        }
    }
    out
}

fn hermitian_operator(mat: DMatrix<C64>) -> Operator {
    Operator::from_matrix(linalg::symmetrize(&mat))
}

/// Resonator Hamiltonian H_N = omega a†a + (chi/6)(a† + a)⁴, built by
/// explicit matrix products of (a† + a).
pub fn resonator_hamiltonian(params: &SystemParams, space: FockSpace) -> Operator {
    hermitian_operator(resonator_matrix(params, space))
}

fn resonator_matrix(params: &SystemParams, space: FockSpace) -> DMatrix<C64> {
    let a = fock::annihilation(space);
    let x = a.matrix() + a.matrix().adjoint();
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let n = fock::number(space);
    n.matrix() * C64::new(params.omega, 0.0) + x4 * C64::new(params.chi / 6.0, 0.0)
}

/// Total Hamiltonian H = (omega_q/2) sigma_z + g (a + a†) sigma_x + H_N on
/// the composite space.
pub fn total_hamiltonian(params: &SystemParams, cs: &CompositeSpace) -> Operator {
    let space = cs.resonator();
    let dim = space.dim();
    let a = fock::annihilation(space);
    let x = a.matrix() + a.matrix().adjoint();
    let id_res = DMatrix::<C64>::identity(dim, dim);
    let mut mat = kron_qubit(sigma_z(), &id_res) * C64::new(params.omega_q / 2.0, 0.0);
    mat += kron_qubit(sigma_x(), &x) * C64::new(params.g, 0.0);
    mat += kron_qubit(identity2(), &resonator_matrix(params, space));
    hermitian_operator(mat)
}

fn identity2() -> [[C64; 2]; 2] {
    [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ]
}

/// Rotating-wave Hamiltonian
/// H = (omega/2) sigma_z + g (a† sigma_- + a sigma_+) + (omega + chi) a†a
///     + chi (a†a)²,
/// with the qubit pinned on resonance (omega_q = omega). The constant chi/2
/// left over from normal-ordering the quartic is dropped; global offsets
/// never affect probabilities or overlap magnitudes. Conserves the total
/// excitation number sigma_+ sigma_- + a†a.
pub fn rwa_hamiltonian(params: &SystemParams, cs: &CompositeSpace) -> Operator {
    let space = cs.resonator();
    let dim = space.dim();
    let a = fock::annihilation(space);
    let adag = a.matrix().adjoint();
    let n = fock::number(space);
    let n2 = n.matrix() * n.matrix();
    let id_res = DMatrix::<C64>::identity(dim, dim);

    let mut mat = kron_qubit(sigma_z(), &id_res) * C64::new(params.omega / 2.0, 0.0);
    mat += kron_qubit(sigma_minus(), &adag) * C64::new(params.g, 0.0);
    mat += kron_qubit(sigma_plus(), a.matrix()) * C64::new(params.g, 0.0);
    mat += kron_qubit(identity2(), n.matrix()) * C64::new(params.omega + params.chi, 0.0);
    mat += kron_qubit(identity2(), &n2) * C64::new(params.chi, 0.0);
    hermitian_operator(mat)
}

/// Total excitation number sigma_+ sigma_- + a†a on the composite space.
pub fn excitation_number(cs: &CompositeSpace) -> Operator {
    let space = cs.resonator();
    let dim = space.dim();
    let n = fock::number(space);
    let qubit_excited = [
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ];
    let id_res = DMatrix::<C64>::identity(dim, dim);
    let mat = kron_qubit(qubit_excited, &id_res) + kron_qubit(identity2(), n.matrix());
    Operator::from_matrix(mat)
}

pub(crate) fn branch_sign(k: usize) -> Result<f64> {
    match k {
        0 => Ok(1.0),
        1 => Ok(-1.0),
        _ => Err(Error::InvalidBranch(k)),
    }
}

/// Branch Hamiltonian H_k = (-1)^k g (a† + a) + omega a†a + (chi/6)(a + a†)⁴
/// on the resonator space; a driven nonlinear oscillator conditioned on the
/// qubit sigma_x eigenvalue.
pub fn driven_kerr_hamiltonian(
    k: usize,
    params: &SystemParams,
    space: FockSpace,
) -> Result<Operator> {
    let sign = branch_sign(k)?;
    let a = fock::annihilation(space);
    let x = a.matrix() + a.matrix().adjoint();
    let mat = resonator_matrix(params, space) + x * C64::new(sign * params.g, 0.0);
    Ok(hermitian_operator(mat))
}

/// Displaced-frame effective Hamiltonian Omega a†a + chi (a†a)², diagonal
/// with entries Omega n + chi n², together with the frame parameters
/// (lambda, Omega).
pub fn effective_kerr_hamiltonian(
    params: &SystemParams,
    space: FockSpace,
) -> Result<(Operator, DecoherenceParams)> {
    let dp = DecoherenceParams::from_system(params)?;
    let dim = space.dim();
    let mat = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let n = i as f64;
            C64::new(dp.omega_eff * n + dp.chi * n * n, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok((Operator::from_matrix(mat), dp))
}
