//! Explicit design builders and fixtures.

use std::f64::consts::PI;

use crate::bloch::{from_bloch, BlochVector};
use crate::design::{classify, require_design, scalar_identity, ConicalDesign, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operator::{c, from_basis_coefficients, gell_mann_basis, CVector, HermitianOperator};
use crate::polytope::{
    centering_projector, mub_block_projector, spectral_frame, validate_projector, DesignProjector,
};
use crate::random::{random_orthogonal, rng};

/// Column-wise view of the unit-trace-free frame used by the explicit construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexFrame {
    pub m: usize,
    pub d: usize,
    /// `vectors[j]` holds `u_{·,j}` (length `d² − 1`).
    pub vectors: Vec<Vec<f64>>,
}

impl SimplexFrame {
    pub fn from_projector(p: &DesignProjector) -> Result<Self> {
        let u = spectral_frame(p)?;
        Ok(Self {
            m: p.m(),
            d: p.dim(),
            vectors: (0..p.m())
                .map(|j| u.column(j).iter().copied().collect())
                .collect(),
        })
    }
}

fn in_ball_limit(d: usize) -> f64 {
    1.0 / (d as f64 - 1.0)
}

fn design_from_blochs(t: f64, blochs: &[BlochVector]) -> Result<ConicalDesign> {
    ConicalDesign::new(
        blochs
            .iter()
            .map(|b| from_bloch(t, b))
            .collect::<Result<_>>()?,
    )
}

fn theorem3_blochs(p: &DesignProjector) -> Result<Vec<BlochVector>> {
    let frame = SimplexFrame::from_projector(p)?;
    let d = p.dim() as f64;
    let m = p.m() as f64;
    let scale = (m * d / ((d + 1.0) * (d - 1.0) * (d - 1.0))).sqrt();
    let basis = gell_mann_basis(p.dim())?;
    frame
        .vectors
        .iter()
        .map(|u| {
            let coeffs: Vec<f64> = u.iter().map(|x| x * scale).collect();
            BlochVector::new(from_basis_coefficients(&coeffs, &basis)?)
        })
        .collect()
}

/// Homogeneous design `A_j = (t/d)(I + B_j)` with Bloch vectors of norm `1/(d−1)`
/// realizing the Gram shape of `p`.
pub fn theorem3_design(p: &DesignProjector, t: f64) -> Result<ConicalDesign> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("trace must be positive, got {t}")));
    }
    // re-validate: the projector may have been edited since construction
    let p = validate_projector(p.matrix(), p.dim(), DEFAULT_TOL)?;
    design_from_blochs(t, &theorem3_blochs(&p)?)
}

fn check_inball_kappa(d: usize, kappa: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::Dimension(format!("need d >= 2, got {d}")));
    }
    let limit = in_ball_limit(d);
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    if kappa > limit * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "kappa {kappa} exceeds in-ball bound {limit} for d={d}"
        )));
    }
    Ok(())
}

/// A SIM with contraction `kappa ≤ 1/(d−1)` and element trace `t`.
pub fn sim_inball(d: usize, kappa: f64, t: f64) -> Result<ConicalDesign> {
    check_inball_kappa(d, kappa)?;
    let p = validate_projector(&centering_projector(d * d), d, DEFAULT_TOL)?;
    let factor = kappa / in_ball_limit(d);
    let blochs: Vec<BlochVector> = theorem3_blochs(&p)?
        .iter()
        .map(|b| b.scale(factor))
        .collect();
    design_from_blochs(t, &blochs)
}

/// A full set of `d+1` MUMs with contraction `kappa ≤ 1/(d−1)`: `E_{b,j} = (I + B_{b,j})/d`,
/// ordered block by block.
pub fn mum_inball(d: usize, kappa: f64) -> Result<ConicalDesign> {
    check_inball_kappa(d, kappa)?;
    let p = validate_projector(&mub_block_projector(d), d, DEFAULT_TOL)?;
    let factor = kappa / in_ball_limit(d);
    let blochs: Vec<BlochVector> = theorem3_blochs(&p)?
        .iter()
        .map(|b| b.scale(factor))
        .collect();
    design_from_blochs(1.0, &blochs)
}

fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

/// Eigenbasis of `X Z^k`: `ψ_n = λ^{−n} ω^{k n(n−1)/2} / √d` with `λ^d = ω^{k d(d−1)/2}`.
fn shift_multiply_eigenbasis(d: usize, k: usize) -> Vec<CVector> {
    let df = d as f64;
    let base = PI * (k * (d - 1)) as f64 / df;
    (0..d)
        .map(|j| {
            let arg_lambda = base - 2.0 * PI * j as f64 / df;
            CVector::from_fn(d, |n, _| {
                let quad = (k * n * n.saturating_sub(1) / 2) % d;
                let phase = -(n as f64) * arg_lambda + 2.0 * PI * quad as f64 / df;
                c(phase.cos(), phase.sin()) / df.sqrt()
            })
        })
        .collect()
}

/// Kets of the `d+1` mutually unbiased bases for prime `d`: the computational basis
/// followed by the eigenbases of `X Z^k`, `k = 0 … d−1`.
pub fn mub_prime_kets(d: usize) -> Result<Vec<CVector>> {
    if !is_prime(d) {
        return Err(Error::Domain(format!("d={d} is not prime")));
    }
    let mut kets: Vec<CVector> = (0..d)
        .map(|j| CVector::from_fn(d, |n, _| if n == j { c(1.0, 0.0) } else { c(0.0, 0.0) }))
        .collect();
    for k in 0..d {
        kets.extend(shift_multiply_eigenbasis(d, k));
    }
    Ok(kets)
}

/// `d(d+1)` rank-1 projectors forming a full set of MUBs, `d` prime.
pub fn mub_prime(d: usize) -> Result<ConicalDesign> {
    let kets = mub_prime_kets(d)?;
    ConicalDesign::new(
        kets.iter()
            .map(HermitianOperator::projector)
            .collect::<Result<_>>()?,
    )
}

/// Normalized SIC vectors for `d ∈ {2, 3}`, checked against the `1/(d+1)` overlap law.
///
/// `d = 2`: tetrahedron with Bloch directions `(±1,±1,±1)/√3`, even sign products.
/// `d = 3`: orbit of `(0, 1, −1)/√2` under `D(p,q) = ω^{pq} X^p Z^q`, ordered by `(p, q)`.
pub fn sic_kets(d: usize) -> Result<Vec<CVector>> {
    let kets = match d {
        2 => {
            let s = 1.0 / 3f64.sqrt();
            [
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ]
            .iter()
            .map(|n| {
                let (x, y, z) = (n[0] * s, n[1] * s, n[2] * s);
                // (cos θ/2, e^{iφ} sin θ/2)
                let theta = z.acos();
                let phi = y.atan2(x);
                CVector::from_vec(vec![
                    c((theta / 2.0).cos(), 0.0),
                    c(phi.cos(), phi.sin()) * (theta / 2.0).sin(),
                ])
            })
            .collect::<Vec<_>>()
        }
        3 => {
            let w = 2.0 * PI / 3.0;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let fid = [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)];
            let mut out = Vec::with_capacity(9);
            for p in 0..3 {
                for q in 0..3 {
                    // (X^p Z^q ψ)_n = ω^{q(n−p)} ψ_{n−p}, times ω^{pq}
                    out.push(CVector::from_fn(3, |n, _| {
                        let src = (n + 3 - p) % 3;
                        let ph = w * ((q * src + p * q) % 3) as f64;
                        fid[src] * c(ph.cos(), ph.sin())
                    }));
                }
            }
            out
        }
        _ => {
            return Err(Error::Domain(format!(
                "no SIC fixture for d={d} (available: 2, 3)"
            )))
        }
    };
    let target = 1.0 / (d as f64 + 1.0);
    for j in 0..kets.len() {
        for k in j + 1..kets.len() {
            let ov = kets[j].dotc(&kets[k]).norm_sqr();
            if (ov - target).abs() > 1e-12 {
                return Err(Error::Numerical(format!(
                    "SIC fixture d={d} failed overlap check at ({j},{k}): {ov}"
                )));
            }
        }
    }
    Ok(kets)
}

/// SIC projectors for `d ∈ {2, 3}`.
pub fn sic_fixture(d: usize) -> Result<ConicalDesign> {
    let kets = sic_kets(d)?;
    ConicalDesign::new(
        kets.iter()
            .map(HermitianOperator::projector)
            .collect::<Result<_>>()?,
    )
}

/// Contracts every Bloch vector by `eta`, keeping the traces.
pub fn scale_design(design: &ConicalDesign, eta: f64) -> Result<ConicalDesign> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1], got {eta}")));
    }
    require_design(design)?;
    let d = design.dim() as f64;
    let elements = design
        .elements()
        .iter()
        .map(|a| {
            let shift = scalar_identity(design.dim(), (1.0 - eta) * a.trace() / d);
            a.combine(eta, &shift, 1.0)
        })
        .collect::<Result<_>>()?;
    ConicalDesign::new(elements)
}

/// POVM of cardinality `d(d+1)` that is a design but not a MUM set: half of each SIM
/// effect followed by `d` copies of `I/(2d)`.
pub fn mum_counterexample(sim: &ConicalDesign) -> Result<ConicalDesign> {
    let d = sim.dim();
    let is_sim = match classify(sim, None, DEFAULT_TOL) {
        Ok(c) => c.sim,
        Err(Error::NotADesign(_)) => false,
        Err(e) => return Err(e),
    };
    if !is_sim {
        return Err(Error::Domain("input is not a SIM".into()));
    }
    let mut elements: Vec<HermitianOperator> =
        sim.elements().iter().map(|e| e.scale(0.5)).collect();
    elements.extend(std::iter::repeat_n(scalar_identity(d, 0.5 / d as f64), d));
    ConicalDesign::new(elements)
}

/// Applies a seeded random orthogonal map of the traceless subspace to every Bloch
/// vector, then contracts all of them by the largest common factor `≤ 1` that keeps
/// every element positive semi-definite.
pub fn random_rotate(design: &ConicalDesign, seed: u64) -> Result<ConicalDesign> {
    require_design(design)?;
    let d = design.dim();
    let o = random_orthogonal(d * d - 1, &mut rng(seed));
    let mut rotated = Vec::with_capacity(design.len());
    for (t, b) in design.bloch_vectors()? {
        let coeffs = nalgebra::DVector::from_vec(b.coefficients());
        let r: Vec<f64> = (&o * coeffs).iter().copied().collect();
        rotated.push((t, BlochVector::from_coefficients(d, &r)?));
    }
    let mut factor: f64 = 1.0;
    for (_, b) in &rotated {
        if b.operator().norm() > 0.0 {
            let lam = b.operator().min_eigenvalue()?;
            if lam < 0.0 {
                factor = factor.min(1.0 / lam.abs());
            }
        }
    }
    ConicalDesign::new(
        rotated
            .iter()
            .map(|(t, b)| from_bloch(*t, &b.scale(factor)))
            .collect::<Result<_>>()?,
    )
}
