//! Generalized Bloch representation `A = (t/d)(I + B)` with `B` traceless.
//!
//! The scaled norm `‖B‖_𝓑 = ‖B‖ / √(d(d−1))` equals 1 on pure states. The Bloch
//! body 𝓑 (traceless `B` with `I + B ⪰ 0`) contains the ball of scaled radius
//! `1/(d−1)` and is contained in the unit ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    basis_coefficients, from_basis_coefficients, gell_mann_basis, hs_inner, CMatrix,
    HermitianOperator, HERMITIAN_TOL, PSD_TOL,
};

/// A traceless Hermitian operator regarded as a Bloch vector.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochVector {
    op: HermitianOperator,
}

impl BlochVector {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let d = op.dim() as f64;
        let tr = op.trace();
        if tr.abs() > HERMITIAN_TOL * d * op.norm().max(1.0) {
            return Err(Error::Domain(format!(
                "Bloch vector must be traceless, trace is {tr:.3e}"
            )));
        }
        // remove the rounding-level trace
        let d_usize = op.dim();
        let shift = CMatrix::identity(d_usize, d_usize).scale(tr / d);
        Ok(Self {
            op: HermitianOperator::from_hermitian(op.matrix() - shift),
        })
    }

    pub fn zero(d: usize) -> Result<Self> {
        Ok(Self {
            op: HermitianOperator::zeros(d)?,
        })
    }

    /// Builds from coordinates in the Gell-Mann basis of `gell_mann_basis(d)`.
    pub fn from_coefficients(d: usize, coeffs: &[f64]) -> Result<Self> {
        let basis = gell_mann_basis(d)?;
        Ok(Self {
            op: from_basis_coefficients(coeffs, &basis)?,
        })
    }

    /// Coordinates in the Gell-Mann basis.
    pub fn coefficients(&self) -> Vec<f64> {
        let basis = gell_mann_basis(self.dim()).expect("dimension validated at construction");
        basis_coefficients(&self.op, &basis).expect("same dimension")
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            op: self.op.scale(s),
        }
    }

    /// Scaled Hilbert-Schmidt inner product `<<a|b>>_𝓑`.
    pub fn scaled_inner(&self, other: &Self) -> Result<f64> {
        let d = self.dim() as f64;
        Ok(hs_inner(&self.op, &other.op)? / (d * (d - 1.0)))
    }
}

/// Splits a positive-trace operator into its trace and Bloch vector.
pub fn to_bloch(rho: &HermitianOperator) -> Result<(f64, BlochVector)> {
    let t = rho.trace();
    if t <= HERMITIAN_TOL * rho.norm().max(1.0) {
        return Err(Error::ZeroTrace(t));
    }
    let d = rho.dim();
    let b = rho.matrix().scale(d as f64 / t) - CMatrix::identity(d, d);
    Ok((t, BlochVector::new(HermitianOperator::from_hermitian(b))?))
}

/// `(t/d)(I + b)`.
pub fn from_bloch(t: f64, b: &BlochVector) -> Result<HermitianOperator> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("trace must be positive, got {t}")));
    }
    let d = b.dim();
    let m = (CMatrix::identity(d, d) + b.op.matrix()).scale(t / d as f64);
    Ok(HermitianOperator::from_hermitian(m))
}

/// `‖b‖ / √(d(d−1))`.
pub fn bloch_norm(b: &BlochVector) -> f64 {
    let d = b.dim() as f64;
    b.op.norm() / (d * (d - 1.0)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    /// Inside or on the boundary.
    pub fn is_feasible(self) -> bool {
        self != Membership::Outside
    }
}

/// Classifies `b` against the Bloch body using the band `|λ_min(I + b)| ≤ τ_psd`.
pub fn body_membership(b: &BlochVector) -> Result<Membership> {
    let d = b.dim();
    let shifted = HermitianOperator::from_hermitian(CMatrix::identity(d, d) + b.op.matrix());
    let lam = shifted.min_eigenvalue()?;
    Ok(if lam > PSD_TOL {
        Membership::Inside
    } else if lam.abs() <= PSD_TOL {
        Membership::Boundary
    } else {
        Membership::Outside
    })
}

/// Largest `κ` with `(I + κ b̂)/d ⪰ 0` for a unit-norm direction: `1/|λ_min(b̂)|`.
pub fn kappa_max_direction(b_hat: &BlochVector) -> Result<f64> {
    let n = bloch_norm(b_hat);
    if n == 0.0 {
        return Err(Error::Domain("direction is the zero vector".into()));
    }
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "direction must have unit Bloch norm, got {n}"
        )));
    }
    let lam = b_hat.op.min_eigenvalue()?;
    Ok(1.0 / lam.abs())
}
