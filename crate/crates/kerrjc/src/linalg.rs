//! Hermitian eigendecomposition shared by the displacement builder and the
//! propagator.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Eigendecomposition H = V diag(w) V† of a Hermitian matrix.
pub(crate) struct HermitianEigen {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<C64>,
}

/// Decompose a Hermitian matrix. Panics if `h` is not square or not
/// Hermitian to 1e-12 of its largest entry; callers only pass symmetrized
/// builder output.
pub(crate) fn hermitian_eigen(h: &DMatrix<C64>) -> HermitianEigen {
    assert_eq!(
        h.nrows(),
        h.ncols(),
        "hermitian_eigen: square matrix required"
    );
    debug_assert!(
        hermiticity_defect(h) <= 1e-12 * max_abs_entry(h).max(1.0),
        "hermitian_eigen: input is not Hermitian"
    );
    let se = h.clone().symmetric_eigen();
    HermitianEigen {
        eigenvalues: se.eigenvalues,
        eigenvectors: se.eigenvectors,
    }
}

/// Apply a function of the eigenvalues: V diag(f(w)) V†.
pub(crate) fn eigen_apply(eig: &HermitianEigen, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
    let v = &eig.eigenvectors;
    let phases =
        DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&w| f(w)));
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

pub(crate) fn max_abs_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint())
        .iter()
        .fold(0.0, |acc: f64, z| acc.max(z.norm()))
}

/// Exact Hermitian part (H + H†)/2; entrywise conjugate symmetry holds
/// bit-for-bit after this.
pub(crate) fn symmetrize(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = avg;
            out[(j, i)] = avg.conj();
        }
        out[(i, i)] = C64::new(out[(i, i)].re, 0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<C64> {
        // Small deterministic LCG; avoids pulling in a rand dependency here.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let raw = DMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        symmetrize(&raw)
    }

    #[test]
    fn reconstruction_and_unitarity() {
        for &n in &[4usize, 32, 128] {
            let h = random_hermitian(n, 42 + n as u64);
            let eig = hermitian_eigen(&h);
            let recon = eigen_apply(&eig, |w| C64::new(w, 0.0));
            let defect = max_abs_entry(&(&recon - &h));
            assert!(defect < 1e-12, "n={n}: reconstruction defect {defect}");

            let v = &eig.eigenvectors;
            let gram = v.adjoint() * v;
            let id = DMatrix::<C64>::identity(n, n);
            let ortho = max_abs_entry(&(gram - id));
            assert!(
                ortho < 1e-12,
                "n={n}: eigenvector orthonormality defect {ortho}"
            );
        }
    }

    #[test]
    fn unitary_from_phases() {
        let h = random_hermitian(64, 7);
        let eig = hermitian_eigen(&h);
        let u = eigen_apply(&eig, |w| C64::new(0.0, -w).exp());
        let gram = u.adjoint() * &u;
        let id = DMatrix::<C64>::identity(64, 64);
        assert!(max_abs_entry(&(gram - id)) < 1e-12);
    }

    #[test]
    fn symmetrize_is_exact() {
        let m = random_hermitian(16, 3) * C64::new(1.0, 0.5);
        let s = symmetrize(&m);
        assert_eq!(hermiticity_defect(&s), 0.0);
    }
}
