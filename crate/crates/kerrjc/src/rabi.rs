//! Closed-form resonant dynamics: dressed eigensystem, amplitude evolution
//! from a qubit superposition times resonator vacuum, transfer probability,
//! revival times, and the qubit purity that witnesses revival.
//!
//! Phase convention: the full state equals e^{-iHt}|psi(0)> under the
//! rotating-wave Hamiltonian of [`crate::model::rwa_hamiltonian`], so
//! C00 carries e^{+i omega t/2} (the ground level sits at -omega/2) and the
//! single-excitation pair carries e^{-i(omega/2 + chi)t}. Moduli are
//! convention-free.

use crate::decoherence::check_qubit_normalization;
use crate::fock::StateVector;
use crate::model::{CompositeSpace, SystemParams};
use crate::{Error, Result, C64};

/// Eigensystem of the single-excitation block: energies, Rabi frequency
/// g_chi = sqrt(g^2 + chi^2), mixing angle theta = arcsin(g/g_chi), and the
/// dressed amplitude pairs over {|01>, |10>}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedSystem {
    pub e_plus: f64,
    pub e_minus: f64,
    pub g_chi: f64,
    pub theta: f64,
    pub plus_state: [f64; 2],
    pub minus_state: [f64; 2],
}

/// E_± = (omega/2 + chi) ± g_chi with |+> = cos(theta/2)|01> +
/// sin(theta/2)|10> and |-> orthogonal to it.
pub fn dressed_eigensystem(params: &SystemParams) -> Result<DressedSystem> {
    let g_chi = params.g.hypot(params.chi);
    if g_chi == 0.0 {
        return Err(Error::DegenerateInput(
            "g = chi = 0: mixing angle arcsin(0/0) undefined".into(),
        ));
    }
    let theta = (params.g / g_chi).asin();
    let center = params.omega / 2.0 + params.chi;
    let (half_sin, half_cos) = (0.5 * theta).sin_cos();
    Ok(DressedSystem {
        e_plus: center + g_chi,
        e_minus: center - g_chi,
        g_chi,
        theta,
        plus_state: [half_cos, half_sin],
        minus_state: [-half_sin, half_cos],
    })
}

/// Amplitudes of the evolved state C00|00> + C01|01> + C10|10> together with
/// the initial qubit amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeTriple {
    pub c00: C64,
    pub c01: C64,
    pub c10: C64,
    pub alpha: C64,
    pub beta: C64,
}

impl AmplitudeTriple {
    pub fn norm_sqr_sum(&self) -> f64 {
        self.c00.norm_sqr() + self.c01.norm_sqr() + self.c10.norm_sqr()
    }

    /// Tr(rho_s^2) of the qubit after tracing the resonator out of the
    /// three-amplitude state.
    pub fn qubit_purity(&self) -> f64 {
        let r00 = self.c00.norm_sqr() + self.c01.norm_sqr();
        let r11 = self.c10.norm_sqr();
        let r01 = self.c00 * self.c10.conj();
        r00 * r00 + r11 * r11 + 2.0 * r01.norm_sqr()
    }

    /// The same state as a vector on the composite space.
    pub fn composite_state(&self, cs: &CompositeSpace) -> StateVector {
        let mut amps = vec![C64::new(0.0, 0.0); cs.dim()];
        amps[cs.index(0, 0)] = self.c00;
        amps[cs.index(0, 1)] = self.c01;
        amps[cs.index(1, 0)] = self.c10;
        StateVector::from_amplitudes(amps)
    }
}

/// Evolve (alpha|0>_q + beta|1>_q) ⊗ |0>_N for time `t` under the resonant
/// rotating-wave dynamics:
///
/// ```text
/// C00 = alpha e^{+i omega t / 2}
/// C01 = -i beta sin(theta) sin(g_chi t) e^{-i(omega/2 + chi) t}
/// C10 = beta [cos(g_chi t) + i cos(theta) sin(g_chi t)] e^{-i(omega/2 + chi) t}
/// ```
///
/// The fully degenerate case g = chi = 0 is the free limit C01 = 0,
/// C10 = beta e^{-i omega t / 2}.
pub fn evolve_amplitudes(
    alpha: C64,
    beta: C64,
    t: f64,
    params: &SystemParams,
) -> Result<AmplitudeTriple> {
    check_qubit_normalization(alpha, beta)?;
    let g_chi = params.g.hypot(params.chi);
    let (sin_theta, cos_theta) = if g_chi > 0.0 {
        (params.g / g_chi, params.chi / g_chi)
    } else {
        (0.0, 1.0)
    };
    let (rabi_sin, rabi_cos) = (g_chi * t).sin_cos();
    let pair_phase = C64::new(0.0, -(params.omega / 2.0 + params.chi) * t).exp();
    let c00 = alpha * C64::new(0.0, params.omega * t / 2.0).exp();
    let c01 = -C64::new(0.0, 1.0) * beta * sin_theta * rabi_sin * pair_phase;
    let c10 = beta * C64::new(rabi_cos, cos_theta * rabi_sin) * pair_phase;
    Ok(AmplitudeTriple {
        c00,
        c01,
        c10,
        alpha,
        beta,
    })
}

/// Probability that the qubit's information sits in the {|00>, |01>} sector:
/// P(t) = |alpha|^2 + |beta|^2 [sin(theta) sin(g_chi t)]^2.
pub fn transfer_probability(alpha: C64, beta: C64, t: f64, params: &SystemParams) -> Result<f64> {
    check_qubit_normalization(alpha, beta)?;
    let g_chi = params.g.hypot(params.chi);
    let sin_theta = if g_chi > 0.0 { params.g / g_chi } else { 0.0 };
    let s = sin_theta * (g_chi * t).sin();
    Ok(alpha.norm_sqr() + beta.norm_sqr() * s * s)
}

/// Supremum of the transfer probability over t:
/// |alpha|^2 + |beta|^2 sin^2(theta), reached at g_chi t = pi/2 (mod pi).
pub fn transfer_probability_max(alpha: C64, beta: C64, params: &SystemParams) -> Result<f64> {
    check_qubit_normalization(alpha, beta)?;
    let g_chi = params.g.hypot(params.chi);
    let sin2 = if g_chi > 0.0 {
        (params.g / g_chi).powi(2)
    } else {
        0.0
    };
    Ok(alpha.norm_sqr() + beta.norm_sqr() * sin2)
}

/// Revival times tau_k = k pi / g_chi for k = 1..=k_max, ascending; the
/// |01> amplitude vanishes there and the composite state factorizes.
pub fn revival_times(params: &SystemParams, k_max: usize) -> Result<Vec<f64>> {
    let g_chi = params.g.hypot(params.chi);
    if g_chi == 0.0 {
        return Err(Error::DegenerateInput(
            "g = chi = 0: no Rabi cycle, revival times undefined".into(),
        ));
    }
    if k_max < 1 {
        return Err(Error::InvalidParams("k_max must be >= 1".into()));
    }
    Ok((1..=k_max)
        .map(|k| k as f64 * std::f64::consts::PI / g_chi)
        .collect())
}

/// Qubit purity of a composite-space state vector.
pub fn qubit_purity(state: &StateVector, cs: &CompositeSpace) -> Result<f64> {
    if (state.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::UnnormalizedInput(format!(
            "state norm {} != 1",
            state.norm()
        )));
    }
    Ok(cs.reduced_qubit(state)?.purity())
}
