//! Linear algebra over the operator space of a `d`-dimensional Hilbert space.
//!
//! Conventions fixed for the whole crate:
//!
//! - bipartite index `(j1, j2) -> d*j1 + j2` (first tensor factor is the slow index);
//! - vectorization `|e_j><e_k| -> d*j + k`, so a superoperator is a `d² × d²`
//!   matrix acting on row-major flattened operators;
//! - complex conjugation `A*` and the transpose superoperator are always taken
//!   in the computational basis.

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative tolerance on the anti-Hermitian part accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative tolerance on the smallest eigenvalue for the positivity test.
pub const PSD_TOL: f64 = 1e-9;

const EIGEN_MAX_ITERS: usize = 10_000;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub(crate) fn real(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Frobenius norm of a complex matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Real part of the Hilbert-Schmidt inner product `Tr(a† b)` of arbitrary matrices.
pub fn hs_real(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `‖a − target‖_F / max(1, ‖target‖_F)`.
pub fn relative_residual(a: &CMatrix, target: &CMatrix) -> f64 {
    frobenius(&(a - target)) / frobenius(target).max(1.0)
}

/// Kronecker product with the first factor as the slow index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Identity matrix of size `n`.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// The input is assumed Hermitian; only its Hermitian part is used.
pub fn eigh(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, EIGEN_MAX_ITERS)
        .ok_or_else(|| Error::Numerical(format!("eigensolver did not converge ({n}x{n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok((values, vectors))
}

/// Real symmetric eigendecomposition, eigenvalues ascending.
pub fn eigh_real(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let h = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, EIGEN_MAX_ITERS)
        .ok_or_else(|| Error::Numerical(format!("eigensolver did not converge ({n}x{n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    let vectors = DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok((values, vectors))
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let residual = frobenius(&(m - m.adjoint())) * 0.5;
    let tolerance = HERMITIAN_TOL * frobenius(m).max(1.0);
    if residual > tolerance || !residual.is_finite() {
        return Err(Error::NotHermitian {
            residual,
            tolerance,
        });
    }
    Ok(())
}

fn symmetrize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

/// A self-adjoint `d × d` operator, `d ≥ 2`.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianOperator")
            .field("dim", &self.dim())
            .field("matrix", &self.matrix)
            .finish()
    }
}

impl HermitianOperator {
    /// Validates and symmetrizes `matrix`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() < 2 {
            return Err(Error::Dimension(format!(
                "operator dimension must be at least 2, got {}",
                matrix.nrows()
            )));
        }
        check_hermitian(&matrix)?;
        Ok(Self {
            matrix: symmetrize(matrix),
        })
    }

    /// Symmetrizes without the tolerance check; for results of exact Hermitian algebra.
    pub(crate) fn from_hermitian(matrix: CMatrix) -> Self {
        debug_assert!(matrix.nrows() >= 2 && matrix.is_square());
        Self {
            matrix: symmetrize(matrix),
        }
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(identity(d))
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(d, d))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                real(diag[i])
            } else {
                real(0.0)
            }
        }))
    }

    /// Rank-1 projector onto the normalized `ket`.
    pub fn projector(ket: &CVector) -> Result<Self> {
        let n = ket.norm();
        if n <= f64::EPSILON {
            return Err(Error::Domain("cannot project onto the zero vector".into()));
        }
        let v = ket.unscale(n);
        Self::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Frobenius (Hilbert-Schmidt) norm.
    pub fn norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        same_dim(self, other)?;
        Ok(Self {
            matrix: self.matrix.scale(a) + other.matrix.scale(b),
        })
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::from_hermitian(u * &self.matrix * u.adjoint())
    }

    /// Entrywise complex conjugate `A*` in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self {
            matrix: self.matrix.map(|z| z.conj()),
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigh(&self.matrix).map(|(v, _)| v)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(self)
    }

    /// `min_eigenvalue ≥ −τ_psd · max(1, ‖A‖)`.
    pub fn is_psd(&self) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -PSD_TOL * self.norm().max(1.0))
    }
}

fn same_dim(a: &HermitianOperator, b: &HermitianOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Hilbert-Schmidt inner product `Tr(a b)`.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    same_dim(a, b)?;
    // Tr(ab) = Σ a_jk b_kj = Σ a_jk conj(b_jk) for Hermitian b
    Ok(a.matrix
        .iter()
        .zip(b.matrix.iter())
        .map(|(x, y)| (x * y.conj()).re)
        .sum())
}

/// Smallest eigenvalue via the self-adjoint eigensolver.
pub fn min_eigenvalue(a: &HermitianOperator) -> Result<f64> {
    Ok(a.eigenvalues()?[0])
}

/// Entrywise complex conjugate.
pub fn conjugate(a: &HermitianOperator) -> HermitianOperator {
    a.conjugate()
}

/// Orthonormal basis of the traceless Hermitian operators.
///
/// Ordering: symmetric off-diagonal pairs, antisymmetric off-diagonal pairs,
/// then the diagonal operators, each lexicographic in `(row, column)`.
pub fn gell_mann_basis(d: usize) -> Result<Vec<HermitianOperator>> {
    if d < 2 {
        return Err(Error::Dimension(format!(
            "Gell-Mann basis needs d >= 2, got {d}"
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = real(s);
            m[(k, j)] = real(s);
            out.push(HermitianOperator { matrix: m });
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c(0.0, -s);
            m[(k, j)] = c(0.0, s);
            out.push(HermitianOperator { matrix: m });
        }
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = real(1.0 / norm);
        }
        m[(l, l)] = real(-(l as f64) / norm);
        out.push(HermitianOperator { matrix: m });
    }
    Ok(out)
}

/// Coordinates of `a` in an orthonormal operator basis.
pub fn basis_coefficients(a: &HermitianOperator, basis: &[HermitianOperator]) -> Result<Vec<f64>> {
    basis.iter().map(|b| hs_inner(b, a)).collect()
}

/// `Σ_a coeffs[a] · basis[a]`.
pub fn from_basis_coefficients(
    coeffs: &[f64],
    basis: &[HermitianOperator],
) -> Result<HermitianOperator> {
    if coeffs.len() != basis.len() || basis.is_empty() {
        return Err(Error::Dimension(format!(
            "{} coefficients for a basis of {}",
            coeffs.len(),
            basis.len()
        )));
    }
    let d = basis[0].dim();
    let mut m = CMatrix::zeros(d, d);
    for (x, b) in coeffs.iter().zip(basis) {
        m += b.matrix.scale(*x);
    }
    Ok(HermitianOperator::from_hermitian(m))
}

/// A self-adjoint operator on `H ⊗ H`, stored as a `d² × d²` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteOperator {
    dim: usize,
    matrix: CMatrix,
}

impl BipartiteOperator {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        if dim < 2 || matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "bipartite operator for d={dim} must be {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_hermitian(&matrix)?;
        Ok(Self {
            dim,
            matrix: symmetrize(matrix),
        })
    }

    pub(crate) fn from_hermitian(dim: usize, matrix: CMatrix) -> Self {
        Self {
            dim,
            matrix: symmetrize(matrix),
        }
    }

    /// `a ⊗ b`.
    pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<Self> {
        same_dim(a, b)?;
        Ok(Self::from_hermitian(a.dim(), kron(&a.matrix, &b.matrix)))
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, identity(d * d))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale(s),
        }
    }

    pub fn partial_transpose(&self) -> Self {
        partial_transpose(self)
    }
}

/// Transpose of the second tensor factor in the computational basis.
pub fn partial_transpose(x: &BipartiteOperator) -> BipartiteOperator {
    BipartiteOperator {
        dim: x.dim,
        matrix: partial_transpose_matrix(&x.matrix, x.dim),
    }
}

pub(crate) fn partial_transpose_matrix(m: &CMatrix, d: usize) -> CMatrix {
    // <i1 i2| X^Γ |j1 j2> = <i1 j2| X |j1 i2>
    CMatrix::from_fn(d * d, d * d, |r, col| {
        let (i1, i2) = (r / d, r % d);
        let (j1, j2) = (col / d, col % d);
        m[(d * i1 + j2, d * j1 + i2)]
    })
}

/// The four canonical operators on `H ⊗ H`.
#[derive(Clone, Debug)]
pub struct SwapOperators {
    pub sym: BipartiteOperator,
    pub asym: BipartiteOperator,
    pub swap: BipartiteOperator,
    /// Projector onto the maximally entangled state `(1/√d) Σ_j |e_j e_j>`.
    pub phi_plus: BipartiteOperator,
}

pub fn sym_asym_projectors(d: usize) -> Result<SwapOperators> {
    if d < 2 {
        return Err(Error::Dimension(format!("need d >= 2, got {d}")));
    }
    let n = d * d;
    let swap = CMatrix::from_fn(n, n, |r, col| {
        let (i1, i2) = (r / d, r % d);
        let (j1, j2) = (col / d, col % d);
        if i1 == j2 && i2 == j1 {
            real(1.0)
        } else {
            real(0.0)
        }
    });
    let phi = CMatrix::from_fn(n, n, |r, col| {
        if r / d == r % d && col / d == col % d {
            real(1.0 / d as f64)
        } else {
            real(0.0)
        }
    });
    let id = identity(n);
    Ok(SwapOperators {
        sym: BipartiteOperator::from_hermitian(d, (&id + &swap).scale(0.5)),
        asym: BipartiteOperator::from_hermitian(d, (&id - &swap).scale(0.5)),
        swap: BipartiteOperator::from_hermitian(d, swap),
        phi_plus: BipartiteOperator::from_hermitian(d, phi),
    })
}

/// A linear map on operators, as a `d² × d²` matrix on vectorized operators.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperoperatorMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl SuperoperatorMatrix {
    pub fn new(dim: usize, matrix: CMatrix) -> Result<Self> {
        if dim < 2 || matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::Dimension(format!(
                "superoperator for d={dim} must be {0}x{0}",
                dim * dim
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            matrix: identity(d * d),
        }
    }

    /// The transpose map `|e_j><e_k| ↦ |e_k><e_j|`.
    pub fn transpose(d: usize) -> Self {
        let n = d * d;
        let matrix = CMatrix::from_fn(n, n, |r, col| {
            let (a, b) = (r / d, r % d);
            let (j, k) = (col / d, col % d);
            if a == k && b == j {
                real(1.0)
            } else {
                real(0.0)
            }
        });
        Self { dim: d, matrix }
    }

    /// `|a>><<b|`, the map `X ↦ a·Tr(b† X)`.
    pub fn outer(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        let d = a.nrows();
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::Dimension(
                "outer product needs equal square operators".into(),
            ));
        }
        let va = vectorize(a);
        let vb = vectorize(b);
        Self::new(d, &va * vb.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        unvectorize(&(&self.matrix * vectorize(x)), self.dim)
    }
}

/// Row-major flattening: `|e_j><e_k| ↦ d*j + k`.
pub fn vectorize(x: &CMatrix) -> CVector {
    let (r, c) = x.shape();
    CVector::from_fn(r * c, |i, _| x[(i / c, i % c)])
}

pub fn unvectorize(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |j, k| v[d * j + k])
}

/// Inverse Choi-Jamiołkowski map for `J(Λ) = (1/d) Σ_jk Λ(|j><k|) ⊗ |j><k|`.
pub fn choi_inverse(x: &BipartiteOperator) -> SuperoperatorMatrix {
    choi_inverse_matrix(&x.matrix, x.dim)
}

pub(crate) fn choi_inverse_matrix(x: &CMatrix, d: usize) -> SuperoperatorMatrix {
    let df = d as f64;
    // S[(a,b),(j,k)] = Λ(|j><k|)_ab = d · X[(a,j),(b,k)]
    let matrix = CMatrix::from_fn(d * d, d * d, |r, col| {
        let (a, b) = (r / d, r % d);
        let (j, k) = (col / d, col % d);
        x[(d * a + j, d * b + k)] * df
    });
    SuperoperatorMatrix { dim: d, matrix }
}
