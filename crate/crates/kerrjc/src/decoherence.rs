//! Engineered decoherence of the qubit: branch states of the displaced Kerr
//! oscillator, the reduced qubit density matrix, and the decoherence factor
//! D(t) = |<mu_1(t)|mu_0(t)>| computed four ways.
//!
//! - [`decoherence_factor_numeric`] evaluates the branch-state definition in
//!   the truncated Fock space and is the module's reference value.
//! - [`decoherence_factor_printed_series`] evaluates a published double
//!   series verbatim. The series has a defect: it returns `exp(-lambda^2)`
//!   at t = 0 instead of 1, and at chi = 0 it carries the same spurious
//!   prefactor relative to the closed form. It is shipped unmodified so the
//!   deviation can be audited, never silently corrected.
//! - [`decoherence_factor_rederived`] is the corrected double series; its
//!   contract is D(0) = 1 and agreement with the numeric route.
//! - [`decoherence_factor_chi0`] and [`decoherence_factor_shorttime`] are
//!   the closed forms for the linear and small-Kerr-phase regimes.
//!
//! The qubit basis throughout this module is the sigma_x eigenbasis.

use crate::fock::{self, FockSpace, Operator, StateVector};
use crate::model::{self, SystemParams};
use crate::{Error, Result, C64};

/// Per-term weight below which the double series is truncated.
const SERIES_TAIL_LIMIT: f64 = 1e-16;

/// Displaced-frame parameters: lambda = g/(omega + chi), the shifted
/// frequency Omega = omega + chi + 8 lambda^2 chi, and the series
/// truncation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams {
    /// Dimensionless displacement lambda = g / (omega + chi).
    pub lambda: f64,
    /// Shifted oscillator frequency Omega = omega + chi + 8 lambda^2 chi.
    pub omega_eff: f64,
    /// Kerr strength.
    pub chi: f64,
    /// Double-series truncation order; (2 lambda^2)^k / k! < 1e-16 there.
    pub series_kmax: usize,
}

impl DecoherenceParams {
    pub fn new(lambda: f64, omega_eff: f64, chi: f64) -> Result<Self> {
        crate::error::require_non_negative("lambda", lambda)?;
        crate::error::require_positive("Omega", omega_eff)?;
        crate::error::require_non_negative("chi", chi)?;
        Ok(Self {
            lambda,
            omega_eff,
            chi,
            series_kmax: series_order(lambda),
        })
    }

    pub fn from_system(params: &SystemParams) -> Result<Self> {
        let denom = params.omega + params.chi;
        crate::error::require_positive("omega + chi", denom)?;
        let lambda = params.g / denom;
        let omega_eff = denom + 8.0 * lambda * lambda * params.chi;
        Self::new(lambda, omega_eff, params.chi)
    }

    /// Branch displacement alpha_k = (-1)^k lambda.
    pub fn branch_displacement(&self, k: usize) -> Result<f64> {
        Ok(model::branch_sign(k)? * self.lambda)
    }

    /// Effective oscillation frequency Omega + lambda^2 chi + chi/2 of the
    /// small-Kerr-phase closed form.
    pub fn shorttime_frequency(&self) -> f64 {
        self.omega_eff + self.lambda * self.lambda * self.chi + 0.5 * self.chi
    }
}

/// Smallest k with (2 lambda^2)^k / k! below the tail limit.
fn series_order(lambda: f64) -> usize {
    let r = 2.0 * lambda * lambda;
    let mut term = 1.0f64;
    let mut k = 0usize;
    while term >= SERIES_TAIL_LIMIT && k < 400 {
        k += 1;
        term *= r / k as f64;
    }
    k
}

/// Resonator branch state conditioned on the qubit sigma_x eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub k: usize,
    pub t: f64,
    pub state: StateVector,
}

/// Cached branch-state machinery for a fixed parameter set: the two
/// displacement matrices and coherent seeds are t-independent, so sweeps
/// reuse them across the whole grid.
#[derive(Debug, Clone)]
pub struct BranchEvolution {
    dp: DecoherenceParams,
    displace: [Operator; 2],
    seed: [StateVector; 2],
}

impl BranchEvolution {
    pub fn new(params: &SystemParams, space: FockSpace) -> Result<Self> {
        let dp = DecoherenceParams::from_system(params)?;
        let build = |k: usize| -> Result<(Operator, StateVector)> {
            let alpha_k = dp.branch_displacement(k)?;
            let d = fock::displacement(C64::new(alpha_k, 0.0), space)?;
            // D†(alpha_k)|0> is the analytic coherent state |-alpha_k>.
            let seed = fock::coherent_state(C64::new(-alpha_k, 0.0), space)?;
            Ok((d, seed))
        };
        let (d0, s0) = build(0)?;
        let (d1, s1) = build(1)?;
        Ok(Self {
            dp,
            displace: [d0, d1],
            seed: [s0, s1],
        })
    }

    pub fn params(&self) -> &DecoherenceParams {
        &self.dp
    }

    /// |mu_k(t)> = D(alpha_k) e^{-i H_eff t} D†(alpha_k) |0>, with the
    /// inner step carried by Kerr-phased coherent amplitudes.
    pub fn branch_state(&self, k: usize, t: f64) -> Result<BranchState> {
        model::branch_sign(k)?;
        let seed = &self.seed[k];
        let phased: Vec<C64> = (0..seed.dim())
            .map(|n| {
                let nf = n as f64;
                let phase = -(self.dp.omega_eff * nf + self.dp.chi * nf * nf) * t;
                seed.amplitude(n) * C64::new(0.0, phase).exp()
            })
            .collect();
        let state = self.displace[k].apply(&StateVector::from_amplitudes(phased))?;
        Ok(BranchState { k, t, state })
    }

    /// D(t) = |<mu_1(t)|mu_0(t)>|.
    pub fn decoherence_factor(&self, t: f64) -> Result<f64> {
        let mu0 = self.branch_state(0, t)?;
        let mu1 = self.branch_state(1, t)?;
        Ok(fock::overlap(&mu1.state, &mu0.state)?.norm())
    }
}

/// One-shot convenience wrapper around [`BranchEvolution::branch_state`].
pub fn branch_state(
    k: usize,
    t: f64,
    params: &SystemParams,
    space: FockSpace,
) -> Result<BranchState> {
    BranchEvolution::new(params, space)?.branch_state(k, t)
}

/// One-shot convenience wrapper around
/// [`BranchEvolution::decoherence_factor`]; the module's reference value.
pub fn decoherence_factor_numeric(t: f64, params: &SystemParams, space: FockSpace) -> Result<f64> {
    BranchEvolution::new(params, space)?.decoherence_factor(t)
}

/// The published double series for D(t), evaluated verbatim:
///
/// ```text
/// D = | e^{-3 lambda^2} sum_{k,m} (2 lambda^2)^{k+m} / (k! m!)
///       (e^{i Omega t})^k (e^{-i chi t})^{k(k-1)/2}
///       (e^{-i Omega t})^m (e^{i chi t})^{m(m-1)/2}
///       e^{-lambda^2 - lambda^2 e^{-i k chi t} e^{i m chi t}} |
/// ```
///
/// No corrections are applied; at t = 0 this collapses to
/// `exp(-lambda^2)`, not 1, which is the documented defect.
pub fn decoherence_factor_printed_series(t: f64, dp: &DecoherenceParams) -> f64 {
    let lam2 = dp.lambda * dp.lambda;
    let weights = poisson_weights(2.0 * lam2, dp.series_kmax);
    let i = C64::new(0.0, 1.0);
    let mut sum = C64::new(0.0, 0.0);
    for (k, &wk) in weights.iter().enumerate() {
        let kf = k as f64;
        for (m, &wm) in weights.iter().enumerate() {
            let mf = m as f64;
            let phase = dp.omega_eff * t * (kf - mf) - dp.chi * t * (kf * (kf - 1.0)) / 2.0
                + dp.chi * t * (mf * (mf - 1.0)) / 2.0;
            let inner = (i * (mf - kf) * dp.chi * t).exp();
            let envelope = (C64::new(-lam2, 0.0) - lam2 * inner).exp();
            sum += wk * wm * (i * phase).exp() * envelope;
        }
    }
    ((-3.0 * lam2).exp() * sum).norm()
}

/// Corrected double series for D(t), derived by normal-ordering the relative
/// displacement between the two branches and commuting ladder operators
/// through the Kerr evolution:
///
/// ```text
/// D = | e^{-2 lambda^2} sum_{k,m} (2 lambda^2)^{k+m} / (k! m!)
///       e^{i [Omega (k-m) + chi (k^2 - m^2)] t}
///       e^{-lambda^2 - lambda^2 e^{2 i (k-m) chi t}} |
/// ```
///
/// Satisfies D(0) = 1 term-by-term and reduces to the chi = 0 closed form;
/// its contract is agreement with [`decoherence_factor_numeric`], which it
/// reproduces to series-truncation accuracy.
pub fn decoherence_factor_rederived(t: f64, dp: &DecoherenceParams) -> f64 {
    let lam2 = dp.lambda * dp.lambda;
    let weights = poisson_weights(2.0 * lam2, dp.series_kmax);
    let i = C64::new(0.0, 1.0);
    let mut sum = C64::new(0.0, 0.0);
    for (k, &wk) in weights.iter().enumerate() {
        let kf = k as f64;
        for (m, &wm) in weights.iter().enumerate() {
            let mf = m as f64;
            let phase = (dp.omega_eff * (kf - mf) + dp.chi * (kf * kf - mf * mf)) * t;
            let inner = (i * 2.0 * (kf - mf) * dp.chi * t).exp();
            let envelope = (C64::new(-lam2, 0.0) - lam2 * inner).exp();
            sum += wk * wm * (i * phase).exp() * envelope;
        }
    }
    ((-2.0 * lam2).exp() * sum).norm()
}

/// Weights r^k / k! for k = 0..=kmax.
fn poisson_weights(r: f64, kmax: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(kmax + 1);
    let mut term = 1.0f64;
    w.push(term);
    for k in 1..=kmax {
        term *= r / k as f64;
        w.push(term);
    }
    w
}

/// Linear-resonator closed form D(t) = exp(-8 (g/omega)^2 sin^2(omega t / 2)).
pub fn decoherence_factor_chi0(t: f64, g: f64, omega: f64) -> f64 {
    let ratio = g / omega;
    let s = (0.5 * omega * t).sin();
    (-8.0 * ratio * ratio * s * s).exp()
}

/// Small-Kerr-phase closed form
/// D(t) = exp(-8 lambda^2 sin^2[(Omega + lambda^2 chi + chi/2) t / 2]),
/// valid for chi t << 1.
pub fn decoherence_factor_shorttime(t: f64, dp: &DecoherenceParams) -> f64 {
    let lam2 = dp.lambda * dp.lambda;
    let s = (0.5 * dp.shorttime_frequency() * t).sin();
    (-8.0 * lam2 * s * s).exp()
}

/// Reduced qubit density matrix in the sigma_x eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    pub rho00: C64,
    pub rho01: C64,
    pub rho10: C64,
    pub rho11: C64,
}

impl ReducedDensityMatrix {
    pub fn trace(&self) -> f64 {
        (self.rho00 + self.rho11).re
    }

    /// det(rho) = rho00 rho11 - |rho01|^2; nonnegative (to rounding) for a
    /// physical state.
    pub fn determinant(&self) -> f64 {
        (self.rho00 * self.rho11).re - self.rho01.norm_sqr()
    }
}

/// Reduced qubit state rho_s(t): diagonal (|alpha|^2, |beta|^2) constant in
/// t, off-diagonal scaled by the branch overlap <mu_1(t)|mu_0(t)>.
pub fn reduced_density_matrix(
    alpha: C64,
    beta: C64,
    t: f64,
    params: &SystemParams,
    space: FockSpace,
) -> Result<ReducedDensityMatrix> {
    check_qubit_normalization(alpha, beta)?;
    let branches = BranchEvolution::new(params, space)?;
    let mu0 = branches.branch_state(0, t)?;
    let mu1 = branches.branch_state(1, t)?;
    let overlap10 = fock::overlap(&mu1.state, &mu0.state)?;
    let rho01 = overlap10 * alpha * beta.conj();
    Ok(ReducedDensityMatrix {
        rho00: C64::new(alpha.norm_sqr(), 0.0),
        rho01,
        rho10: rho01.conj(),
        rho11: C64::new(beta.norm_sqr(), 0.0),
    })
}

pub(crate) fn check_qubit_normalization(alpha: C64, beta: C64) -> Result<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::UnnormalizedInput(format!(
            "|alpha|^2 + |beta|^2 = {norm}, expected 1"
        )));
    }
    Ok(())
}
