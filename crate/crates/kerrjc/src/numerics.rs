//! Exact propagation oracle and approximation-quality probes: Hermitian
//! eigendecomposition propagators, the Kerr commutation identity check, the
//! rotating-wave deviation, the displaced-frame deviation, and
//! truncation-convergence scans.
//!
//! Propagation goes through a full eigendecomposition rather than a
//! time-stepping integrator, so it is exact (to roundoff) on the truncated
//! space and no integrator tolerance enters any comparison.

use nalgebra::{DMatrix, DVector};

use crate::decoherence::BranchEvolution;
use crate::fock::{self, FockSpace, Operator, StateVector};
use crate::linalg;
use crate::model::{self, CompositeSpace, SystemParams};
use crate::{Error, Result, C64};

/// Eigendecomposition H = V diag(w) V† of a Hermitian operator, reused for
/// e^{-iHt} at any number of times.
#[derive(Debug, Clone)]
pub struct Propagator {
    hamiltonian: Operator,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl Propagator {
    /// Decompose a Hermitian operator. Panics if the input is visibly
    /// non-Hermitian; every builder in [`crate::model`] returns exactly
    /// Hermitian matrices.
    pub fn new(hamiltonian: &Operator) -> Self {
        let scale = hamiltonian.max_abs_entry().max(1.0);
        assert!(
            hamiltonian.hermiticity_defect() <= 1e-12 * scale,
            "Propagator::new requires a Hermitian operator"
        );
        let eig = linalg::hermitian_eigen(hamiltonian.matrix());
        Self {
            hamiltonian: hamiltonian.clone(),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Largest entry of |V diag(w) V† - H|.
    pub fn reconstruction_defect(&self) -> f64 {
        let eig = linalg::HermitianEigen {
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: self.eigenvectors.clone(),
        };
        let recon = linalg::eigen_apply(&eig, |w| C64::new(w, 0.0));
        linalg::max_abs_entry(&(recon - self.hamiltonian.matrix()))
    }

    /// U(t) = V e^{-i diag(w) t} V† as a dense matrix.
    pub fn evolution_operator(&self, t: f64) -> Operator {
        let eig = linalg::HermitianEigen {
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: self.eigenvectors.clone(),
        };
        Operator::from_matrix(linalg::eigen_apply(&eig, |w| C64::new(0.0, -w * t).exp()))
    }

    /// |psi(t)> = V e^{-i diag(w) t} V† |psi>.
    pub fn propagate(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state dim {} vs propagator dim {}",
                psi.dim(),
                self.dim()
            )));
        }
        let coeffs = self.eigenvectors.adjoint() * psi.amplitudes();
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(&c, &w)| c * C64::new(0.0, -w * t).exp()),
        );
        let amps = &self.eigenvectors * phased;
        Ok(StateVector::from_amplitudes(amps.iter().copied().collect()))
    }

    /// <psi(t)|H|psi(t)>, for energy-conservation checks.
    pub fn energy_expectation(&self, psi: &StateVector) -> Result<f64> {
        let h_psi = self.hamiltonian.apply(psi)?;
        Ok(fock::overlap(psi, &h_psi)?.re)
    }
}

/// Deviation of U_chi†(t) a U_chi(t) from its closed commutation form, with
/// U_chi(t) = e^{-i chi (a†a)² t}. Commuting a through the Kerr exponential
/// gives U† a U = e^{-i chi t (2 a†a + 1)} a; both sides are built as
/// matrices via [`Propagator`] and compared on the interior block (first
/// dim/2 rows and columns), where ladder truncation cannot reach.
pub fn kerr_identity_check(chi: f64, t: f64, space: FockSpace) -> f64 {
    let dim = space.dim();
    let n = fock::number(space);
    let n2 = Operator::from_matrix(n.matrix() * n.matrix());
    let a = fock::annihilation(space);

    let u = Propagator::new(&n2.scale(C64::new(chi, 0.0))).evolution_operator(t);
    let lhs = u.adjoint().mul(&a).mul(&u);

    // Phase operator e^{-i chi t (2N + 1)} via the same propagator path.
    let two_n_plus_1 = n
        .scale(C64::new(2.0 * chi, 0.0))
        .add(&Operator::identity(dim).scale(C64::new(chi, 0.0)));
    let phase = Propagator::new(&two_n_plus_1).evolution_operator(t);
    let rhs = phase.mul(&a);

    lhs.max_abs_diff_interior(&rhs, dim / 2)
}

/// Trace distance between the qubit reduced states propagated under the
/// full Hamiltonian and under its rotating-wave form, from
/// (|0>_q + |1>_q)/sqrt(2) ⊗ |0>_N, at each grid time.
pub fn rwa_trace_distance_curve(
    params: &SystemParams,
    t_grid: &[f64],
    cs: &CompositeSpace,
) -> Result<Vec<f64>> {
    if params.omega_q != params.omega {
        return Err(Error::InvalidParams(format!(
            "rwa comparison requires resonance, got omega_q = {} vs omega = {}",
            params.omega_q, params.omega
        )));
    }
    let full = Propagator::new(&model::total_hamiltonian(params, cs));
    let rwa = Propagator::new(&model::rwa_hamiltonian(params, cs));
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let psi0 = cs.product_state(
        C64::new(inv_sqrt2, 0.0),
        C64::new(inv_sqrt2, 0.0),
        &StateVector::vacuum(cs.resonator()),
    )?;
    t_grid
        .iter()
        .map(|&t| {
            let rho_full = cs.reduced_qubit(&full.propagate(t, &psi0)?)?;
            let rho_rwa = cs.reduced_qubit(&rwa.propagate(t, &psi0)?)?;
            Ok(rho_full.trace_distance(&rho_rwa))
        })
        .collect()
}

/// Max of [`rwa_trace_distance_curve`] over the grid.
pub fn rwa_deviation(params: &SystemParams, t_grid: &[f64], cs: &CompositeSpace) -> Result<f64> {
    Ok(rwa_trace_distance_curve(params, t_grid, cs)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Overlap deficit 1 - |<mu_k_exact(t)|mu_k_frame(t)>| between exact
/// propagation under the driven Kerr Hamiltonian and the displaced-frame
/// branch state, at each grid time for one branch. Measures the neglected
/// fast-oscillating terms; no fixed bound applies.
pub fn displaced_frame_deviation_curve(
    k: usize,
    params: &SystemParams,
    t_grid: &[f64],
    space: FockSpace,
) -> Result<Vec<f64>> {
    let exact = Propagator::new(&model::driven_kerr_hamiltonian(k, params, space)?);
    let branches = BranchEvolution::new(params, space)?;
    let vac = StateVector::vacuum(space);
    t_grid
        .iter()
        .map(|&t| {
            let exact_state = exact.propagate(t, &vac)?;
            let frame_state = branches.branch_state(k, t)?.state;
            Ok((1.0 - fock::overlap(&exact_state, &frame_state)?.norm()).max(0.0))
        })
        .collect()
}

/// Max of [`displaced_frame_deviation_curve`] over both branches and the
/// grid.
pub fn displaced_frame_deviation(
    params: &SystemParams,
    t_grid: &[f64],
    space: FockSpace,
) -> Result<f64> {
    let mut max = 0.0f64;
    for k in 0..2 {
        for dev in displaced_frame_deviation_curve(k, params, t_grid, space)? {
            max = max.max(dev);
        }
    }
    Ok(max)
}

/// One observable evaluated across a list of Fock dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
    pub converged: bool,
    pub final_delta: f64,
    pub tolerance: f64,
}

/// Evaluate `observable` at each dimension; converged iff the last two
/// values differ by less than `tolerance`.
pub fn truncation_scan(
    observable: impl Fn(FockSpace) -> Result<f64>,
    dims: &[usize],
    tolerance: f64,
) -> Result<ConvergenceReport> {
    if dims.len() < 2 || dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(
            "convergence scan needs at least two strictly increasing dims".into(),
        ));
    }
    let values = dims
        .iter()
        .map(|&d| observable(FockSpace::new(d)?))
        .collect::<Result<Vec<_>>>()?;
    let final_delta = (values[values.len() - 1] - values[values.len() - 2]).abs();
    Ok(ConvergenceReport {
        dims: dims.to_vec(),
        values,
        converged: final_delta < tolerance,
        final_delta,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoherence;

    fn space(dim: usize) -> FockSpace {
        FockSpace::new(dim).unwrap()
    }

    fn params(g: f64, chi: f64) -> SystemParams {
        SystemParams::resonant(1.0, g, chi).unwrap()
    }

    #[test]
    fn propagate_identity_at_zero_time() {
        let s = space(16);
        let p = params(0.2, 0.05);
        let prop = Propagator::new(&model::resonator_hamiltonian(&p, s));
        let psi = fock::coherent_state(C64::new(0.5, 0.2), s).unwrap();
        let out = prop.propagate(0.0, &psi).unwrap();
        assert!(out.sub(&psi).unwrap().norm() < 1e-12);
    }

    #[test]
    fn number_state_eigenphase() {
        let s = space(12);
        let h = fock::number(s).scale(C64::new(1.3, 0.0));
        let prop = Propagator::new(&Operator::from_matrix(h.matrix().clone()));
        let one = StateVector::basis_state(1, s).unwrap();
        let t = 0.7;
        let out = prop.propagate(t, &one).unwrap();
        let expected = C64::new(0.0, -1.3 * t).exp();
        assert!((out.amplitude(1) - expected).norm() < 1e-13);
        assert!((out.amplitude(1).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kerr_eigenphase() {
        let s = space(12);
        let n = fock::number(s);
        let h = Operator::from_matrix(n.matrix() * n.matrix()).scale(C64::new(0.3, 0.0));
        let prop = Propagator::new(&h);
        let two = StateVector::basis_state(2, s).unwrap();
        let t = 1.1;
        let out = prop.propagate(t, &two).unwrap();
        let expected = C64::new(0.0, -4.0 * 0.3 * t).exp();
        assert!((out.amplitude(2) - expected).norm() < 1e-13);
    }

    #[test]
    fn propagate_dimension_mismatch() {
        let prop = Propagator::new(&model::resonator_hamiltonian(&params(0.1, 0.0), space(8)));
        let psi = StateVector::vacuum(space(16));
        assert!(matches!(
            prop.propagate(1.0, &psi),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn propagator_hygiene() {
        // Unitarity, group property, reconstruction, norm and energy
        // conservation for a representative Hamiltonian set.
        let s = space(24);
        let cs = CompositeSpace::new(s);
        let p = params(0.2, 0.05);
        let hams = vec![
            model::resonator_hamiltonian(&p, s),
            model::driven_kerr_hamiltonian(0, &p, s).unwrap(),
            model::total_hamiltonian(&p, &cs),
            model::rwa_hamiltonian(&p, &cs),
        ];
        for h in hams {
            let prop = Propagator::new(&h);
            assert!(prop.reconstruction_defect() < 1e-11 * h.max_abs_entry().max(1.0));

            let u1 = prop.evolution_operator(0.9);
            assert!(u1.unitarity_defect() < 1e-10);
            let u2 = prop.evolution_operator(1.7);
            let u12 = prop.evolution_operator(2.6);
            assert!(u1.mul(&u2).sub(&u12).max_abs_entry() < 1e-10);

            let dim = h.dim();
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            amps[0] = C64::new(0.6, 0.0);
            amps[1] = C64::new(0.0, 0.8);
            let psi0 = StateVector::from_amplitudes(amps);
            let e0 = prop.energy_expectation(&psi0).unwrap();
            for i in 1..=10 {
                let t = 0.5 * i as f64;
                let psi_t = prop.propagate(t, &psi0).unwrap();
                assert!((psi_t.norm() - 1.0).abs() < 1e-12);
                let e_t = prop.energy_expectation(&psi_t).unwrap();
                assert!((e_t - e0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn excitation_conserved_under_rwa() {
        let s = space(16);
        let cs = CompositeSpace::new(s);
        let p = params(0.2, 0.05);
        let prop = Propagator::new(&model::rwa_hamiltonian(&p, &cs));
        let n_exc = model::excitation_number(&cs);
        let psi0 = cs
            .product_state(
                C64::new(0.6, 0.0),
                C64::new(0.0, 0.8),
                &StateVector::vacuum(s),
            )
            .unwrap();
        let expect = |psi: &StateVector| fock::overlap(psi, &n_exc.apply(psi).unwrap()).unwrap().re;
        let n0 = expect(&psi0);
        for i in 1..=20 {
            let psi_t = prop.propagate(0.4 * i as f64, &psi0).unwrap();
            assert!((expect(&psi_t) - n0).abs() < 1e-11);
        }
    }

    #[test]
    fn kerr_identity_trivial_cases() {
        let s = space(16);
        assert!(kerr_identity_check(0.0, 1.3, s) < 1e-13);
        assert!(kerr_identity_check(0.1, 0.0, s) < 1e-13);
    }

    #[test]
    fn kerr_identity_holds_on_interior() {
        assert!(kerr_identity_check(0.1, 1.0, space(32)) < 1e-11);
    }

    #[test]
    fn rwa_deviation_vanishes_without_coupling() {
        let cs = CompositeSpace::new(space(16));
        let p = params(0.0, 0.0);
        let grid: Vec<f64> = (0..=50).map(|i| 0.25 * i as f64).collect();
        assert!(rwa_deviation(&p, &grid, &cs).unwrap() < 1e-12);
    }

    #[test]
    fn rwa_deviation_small_and_monotone_in_g() {
        let cs = CompositeSpace::new(space(24));
        let grid: Vec<f64> = (0..=100)
            .map(|i| 4.0 * std::f64::consts::PI * i as f64 / 100.0)
            .collect();
        let dev_001 = rwa_deviation(&params(0.01, 0.0), &grid, &cs).unwrap();
        assert!(dev_001 < 0.05, "g/omega = 0.01 deviation {dev_001}");
        let dev_005 = rwa_deviation(&params(0.05, 0.0), &grid, &cs).unwrap();
        let dev_010 = rwa_deviation(&params(0.10, 0.0), &grid, &cs).unwrap();
        assert!(dev_001 <= dev_005 && dev_005 <= dev_010);
    }

    #[test]
    fn rwa_requires_resonance() {
        let cs = CompositeSpace::new(space(8));
        let p = SystemParams::new(1.0, 0.9, 0.1, 0.0).unwrap();
        assert!(matches!(
            rwa_deviation(&p, &[0.0, 1.0], &cs),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn displaced_frame_trivial_cases() {
        let s = space(32);
        // t = 0 for a coupled system.
        let dev0 = displaced_frame_deviation(&params(0.1, 0.01), &[0.0], s).unwrap();
        assert!(dev0 < 1e-12);
        // Free evolution: both routes exact at all t.
        let grid: Vec<f64> = (0..=40).map(|i| 0.3 * i as f64).collect();
        let dev_free = displaced_frame_deviation(&params(0.0, 0.0), &grid, s).unwrap();
        assert!(dev_free < 1e-12);
    }

    #[test]
    fn displaced_frame_deviation_is_finite_and_reported() {
        // lambda = 0.1, chi/omega = 0.01: the approximation quality is a
        // recorded finding, only sanity bounds are asserted.
        let s = space(64);
        let grid: Vec<f64> = (0..=100)
            .map(|i| 4.0 * std::f64::consts::PI * i as f64 / 100.0)
            .collect();
        let dev = displaced_frame_deviation(&params(0.1 * 1.01, 0.01), &grid, s).unwrap();
        assert!(dev.is_finite() && (0.0..1.0).contains(&dev));
        println!("displaced-frame overlap deficit (lambda=0.1, chi=0.01): {dev:.3e}");
    }

    #[test]
    fn truncation_scan_constant_observable() {
        let report = truncation_scan(|_| Ok(1.25), &[8, 16], 1e-8).unwrap();
        assert!(report.converged);
        assert_eq!(report.final_delta, 0.0);
    }

    #[test]
    fn truncation_scan_decoherence_factor() {
        let p = params(0.2 * 1.02, 0.02);
        let report = truncation_scan(
            |s| decoherence::decoherence_factor_numeric(std::f64::consts::PI, &p, s),
            &[16, 32, 64],
            1e-8,
        )
        .unwrap();
        assert!(report.converged, "final_delta = {}", report.final_delta);
        assert!(report.final_delta < 1e-8);
    }

    #[test]
    fn truncation_scan_coherent_tail() {
        let xi = C64::new(2.0, 0.0);
        let observable = |s: FockSpace| Ok(fock::coherent_tail_mass(xi, s.dim()));
        let early = truncation_scan(observable, &[16, 32], 1e-8).unwrap();
        assert!(!early.converged);
        let late = truncation_scan(observable, &[16, 32, 64], 1e-8).unwrap();
        assert!(late.converged);
    }

    #[test]
    fn truncation_scan_rejects_bad_dims() {
        assert!(truncation_scan(|_| Ok(0.0), &[16], 1e-8).is_err());
        assert!(truncation_scan(|_| Ok(0.0), &[32, 16], 1e-8).is_err());
    }
}
