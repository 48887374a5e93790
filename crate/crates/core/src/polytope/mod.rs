//! Gram-matrix geometry of homogeneous designs.
//!
//! The Bloch vectors of a homogeneous design have Gram matrix `λP` where `P` is an
//! `m × m` projector of rank `d² − 1` with zero row sums and constant diagonal
//! `(d² − 1)/m`. Every such projector is realized inside the in-ball (contraction
//! `1/(d−1)`); [`search`] looks for realizations with larger contraction.

mod search;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bloch::{body_membership, BlochVector};
use crate::design::{classify, ConicalDesign, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operator::{eigh_real, hs_inner};

pub use search::{cp_search, direction_kappas, RestartTrace, SearchConfig, SearchResult};

/// A condition of the projector set that a candidate matrix fails.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectorViolation {
    NotSquare {
        rows: usize,
        cols: usize,
    },
    TooSmall {
        m: usize,
        required: usize,
    },
    NotSymmetric {
        residual: f64,
    },
    NotIdempotent {
        residual: f64,
    },
    Rank {
        rank: usize,
        expected: usize,
    },
    RowSums {
        rows: Vec<usize>,
    },
    Diagonal {
        rows: Vec<usize>,
        expected: f64,
    },
    OffDiagonalBound {
        entries: usize,
        worst: f64,
        bound: f64,
    },
    NonFinite,
}

impl fmt::Display for ProjectorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Self::TooSmall { m, required } => write!(f, "size m={m} is below d^2={required}"),
            Self::NotSymmetric { residual } => {
                write!(f, "symmetry condition violated (residual {residual:.3e})")
            }
            Self::NotIdempotent { residual } => {
                write!(
                    f,
                    "idempotence condition violated (||P^2 - P|| = {residual:.3e})"
                )
            }
            Self::Rank { rank, expected } => write!(
                f,
                "rank condition violated: rank {rank}, expected {expected}"
            ),
            Self::RowSums { rows } => write!(f, "row-sum condition violated at rows {rows:?}"),
            Self::Diagonal { rows, expected } => {
                write!(f, "constant-diagonal condition violated at rows {rows:?} (expected {expected:.6})")
            }
            Self::OffDiagonalBound {
                entries,
                worst,
                bound,
            } => write!(
                f,
                "off-diagonal bound violated by {entries} entries (worst {worst:.6} > {bound:.6})"
            ),
            Self::NonFinite => write!(f, "matrix has non-finite entries"),
        }
    }
}

/// A validated `m × m` projector with zero row sums, rank `d² − 1` and constant
/// diagonal `(d² − 1)/m`.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignProjector {
    dimension: usize,
    matrix: DMatrix<f64>,
}

impl DesignProjector {
    pub fn dim(&self) -> usize {
        self.dimension
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Checks every projector condition and reports all that fail.
pub fn validate_projector(p: &DMatrix<f64>, d: usize, tol: f64) -> Result<DesignProjector> {
    let (rows, cols) = p.shape();
    if d < 2 {
        return Err(Error::Dimension(format!("need d >= 2, got {d}")));
    }
    if rows != cols {
        return Err(Error::InvalidProjector(vec![
            ProjectorViolation::NotSquare { rows, cols },
        ]));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidProjector(vec![ProjectorViolation::NonFinite]));
    }
    let m = rows;
    let rank_expected = d * d - 1;
    let mut violations = Vec::new();
    if m < d * d {
        violations.push(ProjectorViolation::TooSmall { m, required: d * d });
    }
    let scale = p.norm().max(1.0);
    let asym = (p - p.transpose()).norm();
    if asym > tol * scale {
        violations.push(ProjectorViolation::NotSymmetric { residual: asym });
    }
    let idem = (p * p - p).norm();
    if idem > tol * scale {
        violations.push(ProjectorViolation::NotIdempotent { residual: idem });
    }
    let (vals, _) = eigh_real(p)?;
    let rank = vals.iter().filter(|&&v| v > 0.5).count();
    if rank != rank_expected {
        violations.push(ProjectorViolation::Rank {
            rank,
            expected: rank_expected,
        });
    }
    let bad_rows: Vec<usize> = (0..m)
        .filter(|&j| p.row(j).sum().abs() > tol * scale)
        .collect();
    if !bad_rows.is_empty() {
        violations.push(ProjectorViolation::RowSums { rows: bad_rows });
    }
    let diag = rank_expected as f64 / m as f64;
    let bad_diag: Vec<usize> = (0..m)
        .filter(|&j| (p[(j, j)] - diag).abs() > tol * scale)
        .collect();
    if !bad_diag.is_empty() {
        violations.push(ProjectorViolation::Diagonal {
            rows: bad_diag,
            expected: diag,
        });
    }
    let mut entries = 0;
    let mut worst = f64::NEG_INFINITY;
    for j in 0..m {
        for k in 0..m {
            if j != k && p[(j, k)] > diag + tol * scale {
                entries += 1;
                worst = worst.max(p[(j, k)]);
            }
        }
    }
    if entries > 0 {
        violations.push(ProjectorViolation::OffDiagonalBound {
            entries,
            worst,
            bound: diag,
        });
    }
    if !violations.is_empty() {
        return Err(Error::InvalidProjector(violations));
    }
    Ok(DesignProjector {
        dimension: d,
        matrix: (p + p.transpose()) * 0.5,
    })
}

/// `I_m − J_m / m`; a valid design projector when `m = d²` (the regular simplex).
pub fn centering_projector(m: usize) -> DMatrix<f64> {
    let inv = 1.0 / m as f64;
    DMatrix::from_fn(m, m, |j, k| if j == k { 1.0 - inv } else { -inv })
}

/// `⊕_{b=1}^{d+1} (I_d − J_d / d)`: `d + 1` mutually orthogonal simplices.
pub fn mub_block_projector(d: usize) -> DMatrix<f64> {
    let m = d * (d + 1);
    let inv = 1.0 / d as f64;
    DMatrix::from_fn(m, m, |j, k| {
        if j / d != k / d {
            0.0
        } else if j == k {
            1.0 - inv
        } else {
            -inv
        }
    })
}

/// Orthonormal frame `u_a ∈ ℝ^m` with `P = Σ_a u_a u_aᵀ`, returned as the rows of a
/// `(d² − 1) × m` matrix. Each row has its first nonzero component positive.
pub fn spectral_frame(p: &DesignProjector) -> Result<DMatrix<f64>> {
    let (vals, vecs) = eigh_real(&p.matrix)?;
    let m = p.m();
    let n = p.dim() * p.dim() - 1;
    let cols: Vec<usize> = (0..m).filter(|&i| vals[i] > 0.5).collect();
    if cols.len() != n {
        return Err(Error::Numerical(format!(
            "projector has {} unit eigenvalues, expected {n}",
            cols.len()
        )));
    }
    let mut frame = DMatrix::zeros(n, m);
    for (a, &col) in cols.iter().enumerate() {
        let v = vecs.column(col);
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, |x| x.signum());
        for j in 0..m {
            frame[(a, j)] = sign * v[j];
        }
    }
    Ok(frame)
}

/// Decomposes the Bloch Gram matrix of a homogeneous design as `G = λP`.
pub fn gram_projector(design: &ConicalDesign) -> Result<(f64, DesignProjector)> {
    let class = classify(design, None, DEFAULT_TOL)?;
    if !class.homogeneous {
        return Err(Error::Domain(
            "Gram projector requires a homogeneous design".into(),
        ));
    }
    let blochs: Vec<BlochVector> = design
        .bloch_vectors()?
        .into_iter()
        .map(|(_, b)| b)
        .collect();
    let gram = bloch_gram(&blochs)?;
    let d = design.dim();
    let lambda = gram.trace() / (d * d - 1) as f64;
    let p = validate_projector(&(gram / lambda), d, DEFAULT_TOL)?;
    Ok((lambda, p))
}

/// Unscaled Hilbert-Schmidt Gram matrix `<<B_j|B_k>>`.
pub fn bloch_gram(vectors: &[BlochVector]) -> Result<DMatrix<f64>> {
    let m = vectors.len();
    let mut g = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            let v = hs_inner(vectors[j].operator(), vectors[k].operator())?;
            g[(j, k)] = v;
            g[(k, j)] = v;
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneDesignReport {
    pub is_one_design: bool,
    /// Fitted frame constant in `Σ |B_j>><<B_j| = λ Π_𝓑`.
    pub lambda: f64,
    /// `(max − min)/max` of the Bloch norms.
    pub norm_spread: f64,
    /// `‖Σ B_j‖ / Σ ‖B_j‖`.
    pub centroid_residual: f64,
    /// `‖Σ |B_j>><<B_j| − λ Π_𝓑‖ / ‖λ Π_𝓑‖`.
    pub frame_residual: f64,
}

/// Checks whether Bloch vectors are equal-norm, centred and form a tight frame on
/// the traceless subspace; these are exactly the Bloch vectors of homogeneous designs.
pub fn verify_bloch_one_design(vectors: &[BlochVector], tol: f64) -> Result<OneDesignReport> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::Domain("no Bloch vectors supplied".into()))?;
    let d = first.dim();
    let n = d * d - 1;
    let mut coords = Vec::with_capacity(vectors.len());
    for (j, b) in vectors.iter().enumerate() {
        if b.dim() != d {
            return Err(Error::Dimension(format!(
                "vector {j} has dimension {}, expected {d}",
                b.dim()
            )));
        }
        if !body_membership(b)?.is_feasible() {
            return Err(Error::Domain(format!(
                "vector {j} lies outside the Bloch body"
            )));
        }
        coords.push(nalgebra::DVector::from_vec(b.coefficients()));
    }
    let norms: Vec<f64> = coords.iter().map(|c| c.norm()).collect();
    let max = norms.iter().copied().fold(0.0, f64::max);
    let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let total: f64 = norms.iter().sum();
    let norm_spread = if max > 0.0 { (max - min) / max } else { 0.0 };
    let centroid = coords
        .iter()
        .fold(nalgebra::DVector::zeros(n), |acc, c| acc + c);
    let centroid_residual = if total > 0.0 {
        centroid.norm() / total
    } else {
        0.0
    };
    let frame = coords
        .iter()
        .fold(DMatrix::zeros(n, n), |acc, c| acc + c * c.transpose());
    let lambda = frame.trace() / n as f64;
    let target = DMatrix::<f64>::identity(n, n) * lambda;
    let frame_residual = if lambda > 0.0 {
        (frame - &target).norm() / target.norm()
    } else {
        f64::INFINITY
    };
    Ok(OneDesignReport {
        is_one_design: lambda > 0.0
            && norm_spread <= tol
            && centroid_residual <= tol
            && frame_residual <= tol,
        lambda,
        norm_spread,
        centroid_residual,
        frame_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_projectors_validate() {
        for d in 2..=5 {
            let p = centering_projector(d * d);
            let v = validate_projector(&p, d, 1e-12).unwrap();
            assert_eq!(v.m(), d * d);
            let p = mub_block_projector(d);
            let v = validate_projector(&p, d, 1e-12).unwrap();
            assert_eq!(v.m(), d * (d + 1));
            assert!((v.matrix()[(0, 0)] - (d as f64 - 1.0) / d as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn canonical_projector_entries() {
        let p = centering_projector(4);
        assert_eq!(p[(0, 0)], 0.75);
        assert_eq!(p[(0, 1)], -0.25);
        let q = mub_block_projector(2);
        assert_eq!(q.shape(), (6, 6));
        assert_eq!(q[(0, 1)], -0.5);
        assert_eq!(q[(0, 2)], 0.0);
        for j in 0..6 {
            assert_eq!(q.row(j).sum(), 0.0);
        }
        for j in 0..4 {
            assert_eq!(p.row(j).sum(), 0.0);
        }
    }

    #[test]
    fn centering_wrong_size_is_rank_violation() {
        let err = validate_projector(&centering_projector(5), 2, 1e-9).unwrap_err();
        match err {
            Error::InvalidProjector(v) => {
                assert!(v.iter().any(|x| matches!(
                    x,
                    ProjectorViolation::Rank {
                        rank: 4,
                        expected: 3
                    }
                )))
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn broken_row_sums_are_listed() {
        let mut p = centering_projector(9);
        p[(2, 2)] += 0.01;
        p[(4, 4)] += 0.01;
        let msg = validate_projector(&p, 3, 1e-9).unwrap_err().to_string();
        assert!(
            msg.contains("row-sum condition violated at rows [2, 4]"),
            "{msg}"
        );
    }

    #[test]
    fn non_square_rejected() {
        let p = DMatrix::<f64>::zeros(4, 5);
        assert!(matches!(
            validate_projector(&p, 2, 1e-9),
            Err(Error::InvalidProjector(v)) if v == vec![ProjectorViolation::NotSquare { rows: 4, cols: 5 }]
        ));
    }

    #[test]
    fn spectral_frame_reproduces_projector() {
        for d in 2..=4 {
            let p = validate_projector(&mub_block_projector(d), d, 1e-12).unwrap();
            let u = spectral_frame(&p).unwrap();
            let back = u.transpose() * &u;
            assert!((back - p.matrix()).norm() < 1e-12);
            for a in 0..u.nrows() {
                let first = u.row(a).iter().copied().find(|x| x.abs() > 1e-12).unwrap();
                assert!(first > 0.0);
            }
        }
    }
}
