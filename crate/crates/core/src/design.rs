//! Conical 2-designs: verification, derived parameters, expansions and classification.
//!
//! A family `A_1 … A_m` of nonzero positive semi-definite operators is a conical
//! design when `Σ A_j ⊗ A_j = k_s Π_sym + k_a Π_asym` with `k_s > k_a`. The four
//! algebraic forms of that condition (symmetric/antisymmetric split, its partial
//! transpose, and the two superoperator forms obtained through the inverse Choi
//! map) are each evaluated independently by [`verify`], along with a sampled
//! unitary-commutation check.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bloch::{bloch_norm, to_bloch, BlochVector};
use crate::error::{Error, Result};
use crate::operator::{
    eigh, eigh_real, frobenius, hs_inner, hs_real, identity, kron, real, sym_asym_projectors,
    vectorize, CMatrix, CVector, HermitianOperator, SuperoperatorMatrix, HERMITIAN_TOL,
};
use crate::random::{haar_unitary, random_hermitian, rng};

/// Default relative tolerance for design verification.
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_UNITARY_SAMPLES: usize = 20;
pub const DEFAULT_UNITARY_SEED: u64 = 0x00C0_41CA;

const TRANSPOSE_TEST_SAMPLES: usize = 20;
const TRANSPOSE_TEST_SEED: u64 = 0x7A05;

/// An ordered family of nonzero positive semi-definite operators.
///
/// Duplicates are allowed. Being a design is a verification outcome, see [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConicalDesign {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl ConicalDesign {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::Domain("a design needs at least one element".into()))?;
        let dim = first.dim();
        for (j, a) in elements.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::Dimension(format!(
                    "element {j} has dimension {}, expected {dim}",
                    a.dim()
                )));
            }
            if a.norm() <= HERMITIAN_TOL {
                return Err(Error::Domain(format!("element {j} is zero")));
            }
            if !a.is_psd()? {
                return Err(Error::Domain(format!(
                    "element {j} is not positive semi-definite (min eigenvalue {:.3e})",
                    a.min_eigenvalue()?
                )));
            }
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }

    pub fn traces(&self) -> Vec<f64> {
        self.elements.iter().map(HermitianOperator::trace).collect()
    }

    /// Trace and Bloch vector of every element.
    pub fn bloch_vectors(&self) -> Result<Vec<(f64, BlochVector)>> {
        self.elements.iter().map(to_bloch).collect()
    }

    /// `Σ_j A_j ⊗ A_j`.
    pub fn tensor_sum(&self) -> CMatrix {
        let n = self.dim * self.dim;
        self.elements.iter().fold(CMatrix::zeros(n, n), |acc, a| {
            acc + kron(a.matrix(), a.matrix())
        })
    }

    /// Real Gram matrix `Tr(A_j A_k)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |j, k| {
            hs_inner(&self.elements[j], &self.elements[k]).expect("same dimension")
        })
    }

    /// Sum of all elements.
    pub fn sum(&self) -> CMatrix {
        self.elements
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, a| {
                acc + a.matrix()
            })
    }

    /// Conjugates every element by a common unitary.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self {
            dim: self.dim,
            elements: self.elements.iter().map(|a| a.conjugate_by(u)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        Self::new(self.elements.iter().map(|a| a.scale(s)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ElementParameters {
    pub trace: f64,
    pub kappa: f64,
}

/// Scalars attached to a design.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignParameters {
    pub k_s: f64,
    pub k_a: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    /// Root-mean-square trace.
    pub t: f64,
    /// Trace-weighted root-mean-square Bloch norm.
    pub kappa: f64,
    pub per_element: Vec<ElementParameters>,
}

impl DesignParameters {
    /// Parameters from element traces alone.
    ///
    /// `k_s`, `k_a` come from the traced forms of the symmetric/antisymmetric split:
    /// `½d(d±1)k_s ± ½d(d∓1)k_a` equal `Σ (Tr A)²` and `Σ Tr(A²)`.
    pub fn from_elements(design: &ConicalDesign) -> Result<Self> {
        let d = design.dim() as f64;
        let m = design.len() as f64;
        let mut per_element = Vec::with_capacity(design.len());
        let (mut sum_t2, mut sum_tr_sq, mut sum_t2k2) = (0.0, 0.0, 0.0);
        for a in design.elements() {
            let (t, b) = to_bloch(a)?;
            let kappa = bloch_norm(&b);
            sum_t2 += t * t;
            sum_tr_sq += a.norm().powi(2);
            sum_t2k2 += t * t * kappa * kappa;
            per_element.push(ElementParameters { trace: t, kappa });
        }
        let t = (sum_t2 / m).sqrt();
        let kappa = (sum_t2k2 / sum_t2).sqrt();
        let k_s = (sum_t2 + sum_tr_sq) / (d * (d + 1.0));
        // rank-1 elements give exact cancellation up to rounding
        let k_a = ((sum_t2 - sum_tr_sq) / (d * (d - 1.0))).max(0.0);
        Ok(Self {
            k_s,
            k_a,
            k_plus: 0.5 * (k_s + k_a),
            k_minus: 0.5 * (k_s - k_a),
            t,
            kappa,
            per_element,
        })
    }
}

/// Relative residuals of each design condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals {
    pub cond_i_sampled: f64,
    pub cond_ii: f64,
    pub cond_iii: f64,
    pub cond_iv: f64,
    pub cond_v: f64,
}

/// Coefficients fitted by least squares in each condition: `[k_s, k_a]` for
/// (ii) and `[k_plus, k_minus]` for (iii)–(v).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionFits {
    pub cond_ii: [f64; 2],
    pub cond_iii: [f64; 2],
    pub cond_iv: [f64; 2],
    pub cond_v: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionVerdicts {
    /// `None` when no unitaries were sampled.
    pub cond_i_sampled: Option<bool>,
    pub cond_ii: bool,
    pub cond_iii: bool,
    pub cond_iv: bool,
    pub cond_v: bool,
}

impl ConditionVerdicts {
    /// Whether the four algebraic conditions agree.
    pub fn algebraic_agree(&self) -> bool {
        self.cond_ii == self.cond_iii
            && self.cond_iii == self.cond_iv
            && self.cond_iv == self.cond_v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub is_design: bool,
    pub dimension: usize,
    pub cardinality: usize,
    pub tolerance: f64,
    pub unitary_samples: usize,
    pub residuals: Residuals,
    pub verdicts: ConditionVerdicts,
    pub fits: ConditionFits,
    pub spanning: bool,
    pub cardinality_ok: bool,
    pub gram_rank: usize,
    pub parameters: Option<DesignParameters>,
}

/// Least-squares fit `target ≈ x1·b1 + x2·b2`; returns the coefficients and the residual
/// relative to the fitted operator.
fn fit_two(target: &CMatrix, b1: &CMatrix, b2: &CMatrix) -> ([f64; 2], f64) {
    let (g11, g12, g22) = (hs_real(b1, b1), hs_real(b1, b2), hs_real(b2, b2));
    let (r1, r2) = (hs_real(b1, target), hs_real(b2, target));
    let det = g11 * g22 - g12 * g12;
    let x1 = (g22 * r1 - g12 * r2) / det;
    let x2 = (g11 * r2 - g12 * r1) / det;
    let fit = b1.scale(x1) + b2.scale(x2);
    let residual = frobenius(&(target - &fit)) / frobenius(&fit).max(f64::MIN_POSITIVE);
    ([x1, x2], residual)
}

fn ordered_nonneg(hi: f64, lo: f64, tol: f64) -> bool {
    let slack = tol * (hi.abs() + lo.abs());
    hi >= lo - slack && lo >= -slack
}

/// Verifies `design` with the default unitary seed.
pub fn verify(design: &ConicalDesign, tol: f64, unitary_samples: usize) -> VerificationReport {
    verify_seeded(design, tol, unitary_samples, DEFAULT_UNITARY_SEED)
}

/// Evaluates every design condition independently.
///
/// Residuals are Frobenius distances to the least-squares fit, relative to the fit.
/// Condition (i) is sampled with Haar unitaries and is advisory only.
pub fn verify_seeded(
    design: &ConicalDesign,
    tol: f64,
    unitary_samples: usize,
    seed: u64,
) -> VerificationReport {
    let d = design.dim();
    let m = design.len();
    let ops = sym_asym_projectors(d).expect("design dimension is at least 2");
    let id_sq = identity(d * d);
    let vec_id = vectorize(&identity(d));
    let ii_outer = &vec_id * vec_id.adjoint();

    // (ii) Σ A⊗A on span{Π_sym, Π_asym}
    let sym_sum = design.tensor_sum();
    let (fit_ii, res_ii) = fit_two(&sym_sum, ops.sym.matrix(), ops.asym.matrix());

    // (iii) Σ A⊗A* on span{I, d Φ+}
    let conj_sum = design
        .elements()
        .iter()
        .fold(CMatrix::zeros(d * d, d * d), |acc, a| {
            acc + kron(a.matrix(), a.conjugate().matrix())
        });
    let d_phi = ops.phi_plus.matrix().scale(d as f64);
    let (fit_iii, res_iii) = fit_two(&conj_sum, &id_sq, &d_phi);

    // (iv) Σ |A>><<A*| on span{|I>><<I|, T}
    // (v)  Σ |A>><<A|  on span{|I>><<I|, 𝐈}
    let mut frame_conj = CMatrix::zeros(d * d, d * d);
    let mut frame = CMatrix::zeros(d * d, d * d);
    for a in design.elements() {
        let va = vectorize(a.matrix());
        let va_conj: CVector = vectorize(a.conjugate().matrix());
        frame_conj += &va * va_conj.adjoint();
        frame += &va * va.adjoint();
    }
    let transpose = SuperoperatorMatrix::transpose(d);
    let (fit_iv, res_iv) = fit_two(&frame_conj, &ii_outer, transpose.matrix());
    let (fit_v, res_v) = fit_two(&frame, &ii_outer, &id_sq);

    // (i) sampled commutators with U⊗U
    let mut r = rng(seed);
    let norm = frobenius(&sym_sum).max(f64::MIN_POSITIVE);
    let mut res_i: f64 = 0.0;
    for _ in 0..unitary_samples {
        let u = haar_unitary(d, &mut r);
        let uu = kron(&u, &u);
        let comm = &sym_sum * &uu - &uu * &sym_sum;
        res_i = res_i.max(frobenius(&comm) / norm);
    }

    let verdicts = ConditionVerdicts {
        cond_i_sampled: (unitary_samples > 0).then_some(res_i <= tol),
        cond_ii: res_ii <= tol && ordered_nonneg(fit_ii[0], fit_ii[1], tol),
        cond_iii: res_iii <= tol && ordered_nonneg(fit_iii[0], fit_iii[1], tol),
        cond_iv: res_iv <= tol && ordered_nonneg(fit_iv[0], fit_iv[1], tol),
        cond_v: res_v <= tol && ordered_nonneg(fit_v[0], fit_v[1], tol),
    };

    let gram_rank = match eigh_real(&design.gram()) {
        Ok((vals, _)) => {
            let top = vals.last().copied().unwrap_or(0.0).max(0.0);
            vals.iter().filter(|&&v| v > tol * top).count()
        }
        Err(_) => 0,
    };
    let spanning = gram_rank == d * d;
    let cardinality_ok = m >= d * d;

    let k_plus = 0.5 * (fit_ii[0] + fit_ii[1]);
    let k_minus = 0.5 * (fit_ii[0] - fit_ii[1]);
    let strict = k_minus > tol * k_plus.abs();
    let algebraic_ok = verdicts.cond_ii && verdicts.cond_iii && verdicts.cond_iv && verdicts.cond_v;
    let is_design = algebraic_ok && strict && spanning && cardinality_ok;

    VerificationReport {
        is_design,
        dimension: d,
        cardinality: m,
        tolerance: tol,
        unitary_samples,
        residuals: Residuals {
            cond_i_sampled: res_i,
            cond_ii: res_ii,
            cond_iii: res_iii,
            cond_iv: res_iv,
            cond_v: res_v,
        },
        verdicts,
        fits: ConditionFits {
            cond_ii: fit_ii,
            cond_iii: fit_iii,
            cond_iv: fit_iv,
            cond_v: fit_v,
        },
        spanning,
        cardinality_ok,
        gram_rank,
        parameters: if is_design {
            DesignParameters::from_elements(design).ok()
        } else {
            None
        },
    }
}

/// Verification at the default tolerance without unitary sampling.
pub(crate) fn require_design(design: &ConicalDesign) -> Result<DesignParameters> {
    require_design_tol(design, DEFAULT_TOL)
}

pub(crate) fn require_design_tol(design: &ConicalDesign, tol: f64) -> Result<DesignParameters> {
    let report = verify(design, tol, 0);
    if !report.is_design {
        return Err(Error::NotADesign(describe_failure(&report)));
    }
    report
        .parameters
        .ok_or_else(|| Error::NotADesign("parameters unavailable".into()))
}

fn describe_failure(r: &VerificationReport) -> String {
    if !r.cardinality_ok {
        return format!(
            "{} elements, at least {} required",
            r.cardinality,
            r.dimension * r.dimension
        );
    }
    if !r.spanning {
        return format!(
            "elements span a space of dimension {} < {}",
            r.gram_rank,
            r.dimension * r.dimension
        );
    }
    format!(
        "condition residuals ii={:.3e} iii={:.3e} iv={:.3e} v={:.3e} exceed tolerance {:.1e}",
        r.residuals.cond_ii,
        r.residuals.cond_iii,
        r.residuals.cond_iv,
        r.residuals.cond_v,
        r.tolerance
    )
}

/// Parameters of a verified design.
pub fn parameters(design: &ConicalDesign) -> Result<DesignParameters> {
    require_design(design)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub coefficients: Vec<f64>,
    /// `m = d²`: the design is a basis and the expansion is unique.
    pub unique: bool,
    /// `‖Σ c_j A_j − L‖ / ‖L‖`.
    pub residual: f64,
}

/// Expansion coefficients `c_j = (Tr(A_j L) − k₊ Tr(A_j) Tr(L) / (d k₊ + k₋)) / k₋`.
pub fn expand_operator(design: &ConicalDesign, l: &HermitianOperator) -> Result<Expansion> {
    if l.dim() != design.dim() {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match design dimension {}",
            l.dim(),
            design.dim()
        )));
    }
    let p = require_design(design)?;
    let d = design.dim() as f64;
    let tr_l = l.trace();
    let denom = d * p.k_plus + p.k_minus;
    let coefficients: Vec<f64> = design
        .elements()
        .iter()
        .map(|a| {
            let overlap = hs_inner(a, l).expect("dimensions checked");
            (overlap - p.k_plus * a.trace() * tr_l / denom) / p.k_minus
        })
        .collect();
    let mut recon = CMatrix::zeros(design.dim(), design.dim());
    for (c, a) in coefficients.iter().zip(design.elements()) {
        recon += a.matrix().scale(*c);
    }
    let residual = frobenius(&(recon - l.matrix())) / l.norm().max(f64::MIN_POSITIVE);
    Ok(Expansion {
        coefficients,
        unique: design.len() == design.dim() * design.dim(),
        residual,
    })
}

/// The POVM `E_j = d t_j A_j / (m t²)`.
pub fn induced_povm(design: &ConicalDesign) -> Result<ConicalDesign> {
    let p = require_design(design)?;
    let d = design.dim() as f64;
    let m = design.len() as f64;
    let factor = d / (m * p.t * p.t);
    let elements = design
        .elements()
        .iter()
        .map(|a| a.scale(factor * a.trace()))
        .collect();
    ConicalDesign::new(elements)
}

/// Flags describing which special class a verified design belongs to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    /// All traces and all Bloch norms equal.
    pub homogeneous: bool,
    /// `k_a ≈ 0`, equivalently every element has rank 1.
    pub weighted_projective: bool,
    /// Homogeneous with `t = κ = 1`.
    pub projective: bool,
    /// The elements sum to the identity.
    pub povm: bool,
    /// `d²` homogeneous POVM elements obeying the SIM overlap law.
    pub sim: bool,
    /// Relative deviation from the SIM overlap law (`None` unless `m = d²`).
    pub sim_residual: Option<f64>,
    /// The grouped family satisfies the MUM block and unbiasedness laws.
    pub mum_compatible: bool,
    /// Deviation from the MUM laws (`None` when no grouping into blocks of `d` applies).
    pub mum_residual: Option<f64>,
}

/// SIM overlap law `Tr(E_j E_k) = (d²κ²δ_jk + d + 1 − κ²) / (d³(d+1))`.
pub fn sim_overlap(d: usize, kappa: f64, same: bool) -> f64 {
    let d = d as f64;
    let delta = if same { 1.0 } else { 0.0 };
    (d * d * kappa * kappa * delta + d + 1.0 - kappa * kappa) / (d.powi(3) * (d + 1.0))
}

/// MUM overlap law: `κ²δ_jk + (1 − κ²)/d` inside a block, `1/d` across blocks.
pub fn mum_overlap(d: usize, kappa: f64, same_block: bool, same: bool) -> f64 {
    let d = d as f64;
    if !same_block {
        return 1.0 / d;
    }
    let delta = if same { 1.0 } else { 0.0 };
    kappa * kappa * delta + (1.0 - kappa * kappa) / d
}

/// Contiguous blocks of `d` consecutive indices, when `m` is a multiple of `d`.
pub fn contiguous_grouping(m: usize, d: usize) -> Option<Vec<Vec<usize>>> {
    m.is_multiple_of(d)
        .then(|| (0..m / d).map(|b| (b * d..(b + 1) * d).collect()).collect())
}

/// Deviation of a grouped family from the MUM laws.
///
/// The family is rescaled to total `r·I` for `r` blocks (a full MUM set in its own
/// normalization). The residual is the larger of the worst block-completeness error
/// `‖Σ_block E − I‖/√d` and the worst Gram deviation from [`mum_overlap`].
pub fn mum_residual(design: &ConicalDesign, grouping: &[Vec<usize>], kappa: f64) -> Result<f64> {
    let d = design.dim();
    let m = design.len();
    let mut seen = vec![false; m];
    for block in grouping {
        if block.len() != d {
            return Err(Error::Domain(format!(
                "MUM blocks must have {d} elements, got {}",
                block.len()
            )));
        }
        for &j in block {
            if j >= m || seen[j] {
                return Err(Error::Domain(format!(
                    "grouping index {j} is out of range or repeated"
                )));
            }
            seen[j] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Domain(
            "grouping does not cover every element".into(),
        ));
    }
    let r = grouping.len() as f64;
    let total: f64 = design.traces().iter().sum();
    let scale = r * d as f64 / total;
    let mut block_of = vec![0usize; m];
    for (b, block) in grouping.iter().enumerate() {
        for &j in block {
            block_of[j] = b;
        }
    }
    let id = identity(d);
    let mut worst: f64 = 0.0;
    for block in grouping {
        let mut s = CMatrix::zeros(d, d);
        for &j in block {
            s += design.elements()[j].matrix().scale(scale);
        }
        worst = worst.max(frobenius(&(s - &id)) / (d as f64).sqrt());
    }
    let gram = design.gram() * (scale * scale);
    for j in 0..m {
        for k in 0..m {
            let law = mum_overlap(d, kappa, block_of[j] == block_of[k], j == k);
            worst = worst.max((gram[(j, k)] - law).abs());
        }
    }
    Ok(worst)
}

/// Classifies a verified design.
///
/// `grouping` selects the MUM blocks; by default contiguous blocks of `d`. `tol` is
/// relative and applies to every flag.
pub fn classify(
    design: &ConicalDesign,
    grouping: Option<&[Vec<usize>]>,
    tol: f64,
) -> Result<Classification> {
    let p = require_design_tol(design, tol.min(DEFAULT_TOL))?;
    let d = design.dim();
    let m = design.len();

    let homogeneous = p
        .per_element
        .iter()
        .all(|e| (e.trace - p.t).abs() <= tol * p.t && (e.kappa - p.kappa).abs() <= tol);
    let weighted_projective = p.k_a <= tol * p.k_s;
    let projective = homogeneous && (p.t - 1.0).abs() <= tol && (p.kappa - 1.0).abs() <= tol;
    let povm = frobenius(&(design.sum() - identity(d))) / (d as f64).sqrt() <= tol;

    let sim_residual = (m == d * d).then(|| {
        let gram = design.gram();
        let scale = sim_overlap(d, p.kappa, true);
        let mut worst: f64 = 0.0;
        for j in 0..m {
            for k in 0..m {
                worst = worst.max((gram[(j, k)] - sim_overlap(d, p.kappa, j == k)).abs() / scale);
            }
        }
        worst
    });
    let sim = povm && homogeneous && sim_residual.is_some_and(|r| r <= tol);

    let owned;
    let grouping = match grouping {
        Some(g) => Some(g),
        None => {
            owned = contiguous_grouping(m, d);
            owned.as_deref()
        }
    };
    let mum_residual = match grouping {
        Some(g) => Some(mum_residual(design, g, p.kappa)?),
        None => None,
    };
    let mum_compatible = homogeneous && mum_residual.is_some_and(|r| r <= tol);

    Ok(Classification {
        homogeneous,
        weighted_projective,
        projective,
        povm,
        sim,
        sim_residual,
        mum_compatible,
        mum_residual,
    })
}

/// Compares the structural transpose approximation `T̃ = (|I>><<I| + T)/(d+1)` with
/// its Kraus form `Σ_j B_j A B_j†`, `B_j = |ψ_j><ψ_j*| / √d`, built from SIC vectors.
///
/// Returns the worst relative residual over a fixed set of random Hermitian inputs.
pub fn structural_transpose_check(sic_vectors: &[CVector]) -> Result<f64> {
    let first = sic_vectors
        .first()
        .ok_or_else(|| Error::Domain("no SIC vectors supplied".into()))?;
    let d = first.len();
    if d < 2 || sic_vectors.len() != d * d {
        return Err(Error::Domain(format!(
            "a SIC in dimension {d} has {} vectors, got {}",
            d * d,
            sic_vectors.len()
        )));
    }
    let df = d as f64;
    let kets: Vec<CVector> = sic_vectors
        .iter()
        .map(|v| {
            if v.len() != d {
                return Err(Error::Dimension(
                    "SIC vectors must share one dimension".into(),
                ));
            }
            let n = v.norm();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "SIC vector has norm {n}, expected 1"
                )));
            }
            Ok(v.unscale(n))
        })
        .collect::<Result<_>>()?;
    let target = 1.0 / (df + 1.0);
    for j in 0..kets.len() {
        for k in j + 1..kets.len() {
            let ov = kets[j].dotc(&kets[k]).norm_sqr();
            if (ov - target).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "vectors {j},{k} have overlap {ov:.12}, a SIC requires {target:.12}"
                )));
            }
        }
    }

    let vec_id = vectorize(&identity(d));
    let t_tilde =
        (&vec_id * vec_id.adjoint() + SuperoperatorMatrix::transpose(d).matrix()).scale(target);
    let t_tilde = SuperoperatorMatrix::new(d, t_tilde)?;
    let kraus: Vec<CMatrix> = kets
        .iter()
        .map(|psi| (psi * psi.transpose()).unscale(df.sqrt()))
        .collect();

    let mut r = rng(TRANSPOSE_TEST_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..TRANSPOSE_TEST_SAMPLES {
        let a = random_hermitian(d, &mut r);
        let lhs = t_tilde.apply(a.matrix());
        let rhs = kraus.iter().fold(CMatrix::zeros(d, d), |acc, b| {
            acc + b * a.matrix() * b.adjoint()
        });
        worst = worst.max(frobenius(&(lhs - rhs)) / a.norm());
    }
    Ok(worst)
}

/// Numerical rank of a Hermitian operator (eigenvalues above `tol·‖A‖`).
pub fn operator_rank(a: &HermitianOperator, tol: f64) -> Result<usize> {
    let (vals, _) = eigh(a.matrix())?;
    let top = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(vals
        .iter()
        .filter(|v| v.abs() > tol * top.max(f64::MIN_POSITIVE))
        .count())
}

/// Scalar multiple of the identity of size `d` as a Hermitian operator.
pub(crate) fn scalar_identity(d: usize, s: f64) -> HermitianOperator {
    HermitianOperator::from_hermitian(CMatrix::from_diagonal_element(d, d, real(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::c;

    fn tetrahedron() -> ConicalDesign {
        let s = 1.0 / 3f64.sqrt();
        let signs = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ];
        let elements = signs
            .iter()
            .map(|n| {
                let (x, y, z) = (n[0] * s, n[1] * s, n[2] * s);
                HermitianOperator::new(
                    CMatrix::from_row_slice(
                        2,
                        2,
                        &[real(1.0 + z), c(x, -y), c(x, y), real(1.0 - z)],
                    )
                    .scale(0.5),
                )
                .unwrap()
            })
            .collect();
        ConicalDesign::new(elements).unwrap()
    }

    #[test]
    fn rejects_invalid_families() {
        assert!(ConicalDesign::new(vec![]).is_err());
        let z = HermitianOperator::zeros(2).unwrap();
        assert!(ConicalDesign::new(vec![z]).is_err());
        let neg = HermitianOperator::from_real_diagonal(&[1.0, -0.5]).unwrap();
        assert!(ConicalDesign::new(vec![neg]).is_err());
        let a = HermitianOperator::identity(2).unwrap();
        let b = HermitianOperator::identity(3).unwrap();
        assert!(matches!(
            ConicalDesign::new(vec![a, b]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn tetrahedron_is_a_design() {
        let r = verify(&tetrahedron(), DEFAULT_TOL, DEFAULT_UNITARY_SAMPLES);
        assert!(r.is_design, "{r:?}");
        assert_eq!(r.verdicts.cond_i_sampled, Some(true));
        let p = r.parameters.unwrap();
        assert!((p.k_s - 4.0 / 3.0).abs() < 1e-12);
        assert!(p.k_a < 1e-12);
        assert!((r.fits.cond_ii[0] - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_tetrahedron_fails_cardinality() {
        let mut e = tetrahedron().into_elements();
        e.pop();
        let r = verify(&ConicalDesign::new(e).unwrap(), DEFAULT_TOL, 5);
        assert!(!r.is_design);
        assert!(!r.cardinality_ok);
        assert!(!r.spanning);
        assert!(r.parameters.is_none());
    }

    #[test]
    fn parameters_of_non_design_fail() {
        let e = vec![HermitianOperator::identity(2).unwrap(); 4];
        let design = ConicalDesign::new(e).unwrap();
        assert!(matches!(parameters(&design), Err(Error::NotADesign(_))));
        // the identity family satisfies the tensor identity but with k_s = k_a
        let r = verify(&design, DEFAULT_TOL, 3);
        assert!(r.verdicts.cond_ii);
        assert!(!r.spanning && !r.is_design);
    }

    #[test]
    fn sim_and_mum_overlap_laws() {
        assert!((sim_overlap(2, 1.0, true) - 0.25).abs() < 1e-15);
        assert!((sim_overlap(2, 1.0, false) - 1.0 / 12.0).abs() < 1e-15);
        assert!((sim_overlap(3, 0.5, true) - 1.0 / 18.0).abs() < 1e-15);
        assert!((sim_overlap(3, 0.5, false) - 5.0 / 144.0).abs() < 1e-15);
        assert!((mum_overlap(3, 0.5, false, false) - 1.0 / 3.0).abs() < 1e-15);
        assert!((mum_overlap(2, 1.0, true, true) - 1.0).abs() < 1e-15);
        assert!(mum_overlap(2, 1.0, true, false).abs() < 1e-15);
    }

    #[test]
    fn contiguous_blocks() {
        assert_eq!(
            contiguous_grouping(6, 2),
            Some(vec![vec![0, 1], vec![2, 3], vec![4, 5]])
        );
        assert_eq!(contiguous_grouping(7, 2), None);
    }

    #[test]
    fn operator_rank_of_projector() {
        let p = tetrahedron().elements()[0].clone();
        assert_eq!(operator_rank(&p, 1e-9).unwrap(), 1);
        assert_eq!(operator_rank(&scalar_identity(3, 0.2), 1e-9).unwrap(), 3);
    }
}
