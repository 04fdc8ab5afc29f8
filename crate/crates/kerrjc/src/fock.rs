//! Truncated Fock-space representation of the resonator: states, ladder
//! operators, coherent states, displacement operators, overlaps.
//!
//! A [`FockSpace`] retains levels `0..dim-1`. All operators are dense
//! `dim x dim` complex matrices; target dimensions stay at or below a few
//! hundred, where dense algebra is both exact and fast.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::{Error, Result, C64};

/// Poisson tail mass above which a coherent state no longer fits the space.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-14;

/// Truncated oscillator Hilbert space retaining levels `0..dim-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!("Fock dimension {dim} < 2")));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Headroom rule for displacement amplitudes: `4|xi|^2 < dim`. The
    /// Poisson occupation of a displaced vacuum decays past mean `|xi|^2`,
    /// so a factor-4 margin keeps the action on low-lying states accurate.
    pub fn has_headroom(&self, xi: C64) -> bool {
        4.0 * xi.norm_sqr() < self.dim as f64
    }
}

/// Complex amplitude vector over a [`FockSpace`] (or a composite space built
/// on top of one).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        Self {
            amps: DVector::from_vec(amps),
        }
    }

    /// Fock basis state |n> in `space`.
    pub fn basis_state(n: usize, space: FockSpace) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "basis index {n} outside space of dimension {}",
                space.dim()
            )));
        }
        let mut amps = DVector::zeros(space.dim());
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::basis_state(0, space).expect("dim >= 2")
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amps[n]
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            amps: &self.amps * c,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            amps: &self.amps - &other.amps,
        })
    }
}

/// Dense complex matrix over a [`FockSpace`] (or composite space).
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operators are square");
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { mat: &self.mat * c }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            mat: &self.mat - &other.mat,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            mat: &self.mat * &other.mat,
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_same_dim(self.dim(), state.dim())?;
        Ok(StateVector {
            amps: &self.mat * state.amplitudes(),
        })
    }

    pub fn max_abs_entry(&self) -> f64 {
        linalg::max_abs_entry(&self.mat)
    }

    /// Largest entry of |M - M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.mat)
    }

    /// Largest entry of |M†M - I|.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        linalg::max_abs_entry(&(gram - id))
    }

    /// Largest entry of |A - B| restricted to the first `rows` rows and
    /// columns. Ladder-operator truncation corrupts only the top of the
    /// space, so comparisons of truncation-sensitive products use the
    /// interior block.
    pub fn max_abs_diff_interior(&self, other: &Self, rows: usize) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = rows.min(self.dim());
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                max = max.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        max
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("{a} vs {b}")));
    }
    Ok(())
}

/// Annihilation operator: `<n-1|a|n> = sqrt(n)`.
pub fn annihilation(space: FockSpace) -> Operator {
    let dim = space.dim();
    let mut mat = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        mat[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator { mat }
}

/// Creation operator, the conjugate transpose of [`annihilation`].
pub fn creation(space: FockSpace) -> Operator {
    annihilation(space).adjoint()
}

/// Number operator a†a, diagonal with entries n.
pub fn number(space: FockSpace) -> Operator {
    let dim = space.dim();
    let mat = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Operator { mat }
}

/// Poisson tail mass `sum_{n>=dim} e^{-|xi|^2} |xi|^{2n} / n!` of a coherent
/// state with amplitude `xi` truncated at `dim` levels.
pub fn coherent_tail_mass(xi: C64, dim: usize) -> f64 {
    let r = xi.norm_sqr();
    if r == 0.0 {
        return 0.0;
    }
    // Walk the Poisson pmf up to the truncation edge, then sum the tail.
    let mut term = (-r).exp();
    for n in 0..dim {
        term *= r / (n + 1) as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let mut tail = 0.0;
    let mut n = dim;
    loop {
        tail += term;
        n += 1;
        term *= r / n as f64;
        if term < 1e-40 || n > dim + 4 * (r as usize + 4) + 200 {
            break;
        }
    }
    tail
}

/// Coherent state |xi> from analytic Fock amplitudes
/// `c_n = e^{-|xi|^2/2} xi^n / sqrt(n!)`.
///
/// Built analytically rather than by applying the truncated displacement
/// matrix to vacuum, which would compound truncation error. No
/// renormalization is applied; the tail precondition keeps the norm deficit
/// below 1e-14.
pub fn coherent_state(xi: C64, space: FockSpace) -> Result<StateVector> {
    let tail = coherent_tail_mass(xi, space.dim());
    if tail >= COHERENT_TAIL_LIMIT {
        return Err(Error::Truncation(format!(
            "coherent state |xi|={:.3} has tail mass {:.3e} at dim {} (limit {:.0e})",
            xi.norm(),
            tail,
            space.dim(),
            COHERENT_TAIL_LIMIT
        )));
    }
    let mut amps = DVector::zeros(space.dim());
    let mut c = C64::new((-xi.norm_sqr() / 2.0).exp(), 0.0);
    amps[0] = c;
    for n in 1..space.dim() {
        c *= xi / C64::new((n as f64).sqrt(), 0.0);
        amps[n] = c;
    }
    Ok(StateVector { amps })
}

/// Displacement operator D(xi) = exp(xi a† - xi* a), exact on the truncated
/// space.
///
/// The anti-Hermitian generator A = xi a† - xi* a is written as -iK with
/// K = iA Hermitian; D = V e^{-i diag(w)} V† from the eigendecomposition of
/// K, the same code path as the propagator.
pub fn displacement(xi: C64, space: FockSpace) -> Result<Operator> {
    if !space.has_headroom(xi) {
        return Err(Error::Truncation(format!(
            "displacement |xi|={:.3} needs dim > {:.1}, space has {}",
            xi.norm(),
            4.0 * xi.norm_sqr(),
            space.dim()
        )));
    }
    let a = annihilation(space);
    let adag = a.adjoint();
    // K = i (xi a† - xi* a) is Hermitian.
    let i = C64::new(0.0, 1.0);
    let generator = adag.scale(i * xi).add(&a.scale(-i * xi.conj()));
    let k = linalg::symmetrize(generator.matrix());
    let eig = linalg::hermitian_eigen(&k);
    let mat = linalg::eigen_apply(&eig, |w| (-i * w).exp());
    Ok(Operator { mat })
}

/// Inner product `<a|b> = sum_n conj(a_n) b_n`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_same_dim(a.dim(), b.dim())?;
    Ok(a.amplitudes().dotc(b.amplitudes()))
}
