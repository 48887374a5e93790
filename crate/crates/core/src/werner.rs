//! Werner and isotropic states and their symmetric decompositions.

use serde::Serialize;

use crate::constructors::{mub_prime, scale_design, sic_fixture, sim_inball};
use crate::design::{classify, scalar_identity, ConicalDesign, DesignParameters, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::operator::{
    frobenius, kron, sym_asym_projectors, BipartiteOperator, CMatrix, HermitianOperator,
};

/// Slack on the decomposability thresholds, absorbing rounding in `p` and `F`.
const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Werner,
    Isotropic,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Werner => "werner",
            Family::Isotropic => "isotropic",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "werner" => Ok(Family::Werner),
            "isotropic" => Ok(Family::Isotropic),
            other => Err(Error::Domain(format!("unknown state family {other:?}"))),
        }
    }
}

/// `k_s Π_sym + k_a Π_asym` with `k_s = 2(1−p)/(d(d+1))`, `k_a = 2p/(d(d−1))`.
#[derive(Clone, Debug)]
pub struct WernerState {
    pub dim: usize,
    pub p: f64,
    pub matrix: BipartiteOperator,
    pub entangled: bool,
    pub decomposable: bool,
}

/// `((1−F)/(d²−1)) I + ((d²F−1)/(d²−1)) Φ₊`.
#[derive(Clone, Debug)]
pub struct IsotropicState {
    pub dim: usize,
    pub fidelity: f64,
    pub matrix: BipartiteOperator,
    pub entangled: bool,
    pub decomposable: bool,
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

/// Largest decomposable Werner parameter, `(d−1)/(2d)`.
pub fn werner_threshold(d: usize) -> f64 {
    (d as f64 - 1.0) / (2.0 * d as f64)
}

pub fn werner_state(d: usize, p: f64) -> Result<WernerState> {
    check_unit_interval("p", p)?;
    let ops = sym_asym_projectors(d)?;
    let df = d as f64;
    let k_s = 2.0 * (1.0 - p) / (df * (df + 1.0));
    let k_a = 2.0 * p / (df * (df - 1.0));
    let matrix = BipartiteOperator::new(
        d,
        ops.sym.matrix().scale(k_s) + ops.asym.matrix().scale(k_a),
    )?;
    Ok(WernerState {
        dim: d,
        p,
        matrix,
        entangled: p > 0.5,
        decomposable: p <= werner_threshold(d) + THRESHOLD_SLACK,
    })
}

pub fn isotropic_state(d: usize, fidelity: f64) -> Result<IsotropicState> {
    check_unit_interval("F", fidelity)?;
    let ops = sym_asym_projectors(d)?;
    let df = d as f64;
    let n = df * df - 1.0;
    let id = BipartiteOperator::identity(d)?;
    let matrix = BipartiteOperator::new(
        d,
        id.matrix().scale((1.0 - fidelity) / n)
            + ops.phi_plus.matrix().scale((df * df * fidelity - 1.0) / n),
    )?;
    Ok(IsotropicState {
        dim: d,
        fidelity,
        matrix,
        entangled: fidelity > 1.0 / df,
        decomposable: fidelity >= 1.0 / (df * df) - THRESHOLD_SLACK,
    })
}

/// Contraction parameter needed for a symmetric decomposition of the Werner state `p`.
pub fn kappa_for_werner(d: usize, p: f64) -> f64 {
    let df = d as f64;
    (1.0 - 2.0 * df * p / (df - 1.0)).max(0.0).sqrt()
}

/// Werner parameter reached by a design with contraction `kappa`.
pub fn werner_for_kappa(d: usize, kappa: f64) -> f64 {
    let df = d as f64;
    (df - 1.0) * (1.0 - kappa * kappa) / (2.0 * df)
}

/// `F(κ) = 1 − ((d²−1)/d²)(1 − κ²/(d+1))`.
pub fn fidelity_for_kappa(d: usize, kappa: f64) -> f64 {
    let df = d as f64;
    1.0 - ((df * df - 1.0) / (df * df)) * (1.0 - kappa * kappa / (df + 1.0))
}

/// Inverse of [`fidelity_for_kappa`] on `[1/d², 1/d]`.
pub fn kappa_for_fidelity(d: usize, fidelity: f64) -> f64 {
    let df = d as f64;
    ((df + 1.0) * (1.0 - df * df * (1.0 - fidelity) / (df * df - 1.0)))
        .max(0.0)
        .sqrt()
}

#[derive(Clone, Debug)]
pub enum Target {
    Werner(WernerState),
    Isotropic(IsotropicState),
}

impl Target {
    pub fn new(family: Family, d: usize, parameter: f64) -> Result<Self> {
        Ok(match family {
            Family::Werner => Target::Werner(werner_state(d, parameter)?),
            Family::Isotropic => Target::Isotropic(isotropic_state(d, parameter)?),
        })
    }

    pub fn family(&self) -> Family {
        match self {
            Target::Werner(_) => Family::Werner,
            Target::Isotropic(_) => Family::Isotropic,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Target::Werner(w) => w.dim,
            Target::Isotropic(s) => s.dim,
        }
    }

    /// `p` for Werner targets, `F` for isotropic ones.
    pub fn parameter(&self) -> f64 {
        match self {
            Target::Werner(w) => w.p,
            Target::Isotropic(s) => s.fidelity,
        }
    }

    pub fn matrix(&self) -> &BipartiteOperator {
        match self {
            Target::Werner(w) => &w.matrix,
            Target::Isotropic(s) => &s.matrix,
        }
    }

    pub fn decomposable(&self) -> bool {
        match self {
            Target::Werner(w) => w.decomposable,
            Target::Isotropic(s) => s.decomposable,
        }
    }
}

impl From<WernerState> for Target {
    fn from(w: WernerState) -> Self {
        Target::Werner(w)
    }
}

impl From<IsotropicState> for Target {
    fn from(s: IsotropicState) -> Self {
        Target::Isotropic(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionFlags {
    pub homogeneous: bool,
    pub pure: bool,
    pub ideal: bool,
}

/// `target = Σ λ_j ρ_j ⊗ ρ_j` (Werner) or `Σ λ_j ρ_j ⊗ ρ_j*` (isotropic).
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub weights: Vec<f64>,
    pub states: Vec<HermitianOperator>,
    pub target: Target,
    pub residual: f64,
    pub flags: DecompositionFlags,
    /// Where the underlying design came from.
    pub source: String,
}

/// Reconstruction `Σ λ_j ρ_j ⊗ ρ_j(*)` for the given family.
pub fn reconstruct(
    family: Family,
    weights: &[f64],
    states: &[HermitianOperator],
) -> Result<CMatrix> {
    let d = states
        .first()
        .ok_or_else(|| Error::Domain("decomposition has no states".into()))?
        .dim();
    let mut out = CMatrix::zeros(d * d, d * d);
    for (w, rho) in weights.iter().zip(states) {
        let second = match family {
            Family::Werner => rho.matrix().clone(),
            Family::Isotropic => rho.matrix().conjugate(),
        };
        out += kron(rho.matrix(), &second).scale(*w);
    }
    Ok(out)
}

/// Flags recomputed from the weights and states alone.
pub fn decomposition_flags(
    weights: &[f64],
    states: &[HermitianOperator],
) -> Result<DecompositionFlags> {
    let m = weights.len();
    let d = states
        .first()
        .ok_or_else(|| Error::Domain("decomposition has no states".into()))?
        .dim();
    let uniform = 1.0 / m as f64;
    let homogeneous = weights
        .iter()
        .all(|w| (w - uniform).abs() <= DEFAULT_TOL * uniform);
    // trace-1 PSD: rank 1 iff purity 1
    let pure = states
        .iter()
        .all(|r| (r.norm().powi(2) - 1.0).abs() <= DEFAULT_TOL);
    let mixed = scalar_identity(d, 1.0 / d as f64);
    let degenerate = states
        .iter()
        .all(|r| frobenius(&(r.matrix() - mixed.matrix())) <= DEFAULT_TOL);
    Ok(DecompositionFlags {
        homogeneous,
        pure,
        ideal: homogeneous && m == d * d && !degenerate,
    })
}

fn unavailable(d: usize, kappa: f64) -> Error {
    Error::ConstructionUnavailable {
        dim: d,
        required_kappa: kappa,
        inball_limit: 1.0 / (d as f64 - 1.0),
    }
}

/// Homogeneous design with contraction `kappa`, and its provenance.
fn design_at(
    d: usize,
    kappa: f64,
    source: Option<&ConicalDesign>,
) -> Result<(ConicalDesign, String)> {
    if let Some(src) = source {
        if src.dim() != d {
            return Err(Error::Dimension(format!(
                "source design has dimension {}, target has {d}",
                src.dim()
            )));
        }
        let class = classify(src, None, DEFAULT_TOL)?;
        if !class.homogeneous {
            return Err(Error::Domain("source design is not homogeneous".into()));
        }
        let k_src = DesignParameters::from_elements(src)?.kappa;
        if k_src < kappa - DEFAULT_TOL {
            return Err(Error::Domain(format!(
                "source design contraction {k_src} is below the required {kappa}"
            )));
        }
        return Ok((
            scale_design(src, (kappa / k_src).min(1.0))?,
            "caller-supplied".into(),
        ));
    }
    let fixture = match d {
        2 | 3 => Some((sic_fixture(d), "sic-fixture")),
        _ => match mub_prime(d) {
            Ok(design) => Some((Ok(design), "mub-prime")),
            Err(Error::Domain(_)) => None,
            Err(e) => return Err(e),
        },
    };
    if let Some((design, name)) = fixture {
        return Ok((scale_design(&design?, kappa)?, name.into()));
    }
    if kappa <= 1.0 / (d as f64 - 1.0) + 1e-12 {
        return Ok((
            sim_inball(d, kappa.min(1.0 / (d as f64 - 1.0)), 1.0)?,
            "sim-inball".into(),
        ));
    }
    Err(unavailable(d, kappa))
}

/// Symmetric decomposition of a separable Werner or isotropic state.
///
/// The underlying design is taken from `source` when given (it must be homogeneous
/// and contract at least as far as required), otherwise from the SIC fixtures
/// (`d ∈ {2, 3}`), prime-dimension MUBs, or the in-ball SIM, in that order.
pub fn symmetric_decomposition(
    target: &Target,
    source: Option<&ConicalDesign>,
) -> Result<DecompositionReport> {
    let d = target.dim();
    let kappa = match target {
        Target::Werner(w) => {
            if w.p > werner_threshold(d) + THRESHOLD_SLACK {
                return Err(Error::NoDecomposition(format!(
                    "Werner parameter p={} exceeds (d-1)/(2d) = {} for d={d}",
                    w.p,
                    werner_threshold(d)
                )));
            }
            kappa_for_werner(d, w.p)
        }
        Target::Isotropic(s) => {
            let df = d as f64;
            if s.fidelity < 1.0 / (df * df) - THRESHOLD_SLACK {
                return Err(Error::NoDecomposition(format!(
                    "isotropic parameter F={} is below 1/d^2 = {} for d={d}",
                    s.fidelity,
                    1.0 / (df * df)
                )));
            }
            if s.fidelity > 1.0 / df + THRESHOLD_SLACK {
                return Err(Error::NoDecomposition(format!(
                    "isotropic parameter F={} exceeds 1/d = {} for d={d}",
                    s.fidelity,
                    1.0 / df
                )));
            }
            kappa_for_fidelity(d, s.fidelity).min(1.0)
        }
    };

    let (elements, source_name) = if kappa <= THRESHOLD_SLACK {
        let copies = vec![scalar_identity(d, 1.0 / d as f64); d * d];
        (copies, "maximally-mixed".to_string())
    } else {
        let (design, name) = design_at(d, kappa, source)?;
        (design.into_elements(), name)
    };

    let total: f64 = elements.iter().map(|a| a.trace().powi(2)).sum();
    let weights: Vec<f64> = elements.iter().map(|a| a.trace().powi(2) / total).collect();
    let states: Vec<HermitianOperator> =
        elements.iter().map(|a| a.scale(1.0 / a.trace())).collect();

    let family = target.family();
    let recon = reconstruct(family, &weights, &states)?;
    let residual = frobenius(&(recon - target.matrix().matrix()));
    let flags = decomposition_flags(&weights, &states)?;
    Ok(DecompositionReport {
        weights,
        states,
        target: target.clone(),
        residual,
        flags,
        source: source_name,
    })
}

/// Recomputes the reconstruction distance of a report after checking it is well formed.
pub fn verify_decomposition(report: &DecompositionReport) -> Result<f64> {
    if report.weights.is_empty() || report.weights.len() != report.states.len() {
        return Err(Error::Domain(format!(
            "{} weights for {} states",
            report.weights.len(),
            report.states.len()
        )));
    }
    if let Some(w) = report.weights.iter().find(|w| !(**w > 0.0)) {
        return Err(Error::Domain(format!("weight {w} is not positive")));
    }
    let sum: f64 = report.weights.iter().sum();
    if (sum - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::Domain(format!("weights sum to {sum}, not 1")));
    }
    let d = report.target.dim();
    for (j, rho) in report.states.iter().enumerate() {
        if rho.dim() != d {
            return Err(Error::Domain(format!(
                "state {j} has dimension {}, expected {d}",
                rho.dim()
            )));
        }
        if (rho.trace() - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::Domain(format!(
                "state {j} has trace {}",
                rho.trace()
            )));
        }
        if !rho.is_psd()? {
            return Err(Error::Domain(format!(
                "state {j} is not positive semi-definite"
            )));
        }
    }
    let recon = reconstruct(report.target.family(), &report.weights, &report.states)?;
    Ok(frobenius(&(recon - report.target.matrix().matrix())))
}

fn design_of(report: &DecompositionReport) -> Result<ConicalDesign> {
    ConicalDesign::new(
        report
            .weights
            .iter()
            .zip(&report.states)
            .map(|(w, r)| r.scale(w.sqrt()))
            .collect(),
    )
}

fn retarget(report: &DecompositionReport, target: Target, tol: f64) -> Result<DecompositionReport> {
    if !(report.residual <= tol) {
        return Err(Error::Domain(format!(
            "report residual {} exceeds tolerance {tol}",
            report.residual
        )));
    }
    let recon = reconstruct(target.family(), &report.weights, &report.states)?;
    let residual = frobenius(&(recon - target.matrix().matrix()));
    Ok(DecompositionReport {
        weights: report.weights.clone(),
        states: report.states.clone(),
        target,
        residual,
        flags: decomposition_flags(&report.weights, &report.states)?,
        source: report.source.clone(),
    })
}

/// Maps a Werner decomposition to the isotropic one obtained by partially transposing
/// every term; the new target has `F = 1 − (d²−1) k₊` of the underlying design.
pub fn werner_isotropic_transform(
    report: &DecompositionReport,
    tol: f64,
) -> Result<DecompositionReport> {
    if report.target.family() != Family::Werner {
        return Err(Error::Domain(
            "report does not target a Werner state".into(),
        ));
    }
    let d = report.target.dim();
    let k_plus = DesignParameters::from_elements(&design_of(report)?)?.k_plus;
    let df = d as f64;
    let fidelity = (1.0 - (df * df - 1.0) * k_plus).clamp(0.0, 1.0);
    retarget(
        report,
        Target::Isotropic(isotropic_state(d, fidelity)?),
        tol,
    )
}

/// Inverse of [`werner_isotropic_transform`].
pub fn isotropic_werner_transform(
    report: &DecompositionReport,
    tol: f64,
) -> Result<DecompositionReport> {
    if report.target.family() != Family::Isotropic {
        return Err(Error::Domain(
            "report does not target an isotropic state".into(),
        ));
    }
    let d = report.target.dim();
    let p = DesignParameters::from_elements(&design_of(report)?)?;
    let df = d as f64;
    // 2p/(d(d−1)) = k_a
    let werner_p = (p.k_a * df * (df - 1.0) / 2.0).clamp(0.0, 1.0);
    retarget(report, Target::Werner(werner_state(d, werner_p)?), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::identity;

    #[test]
    fn werner_examples() {
        let w = werner_state(2, 0.25).unwrap();
        assert!(frobenius(&(w.matrix.matrix() - identity(4).scale(0.25))) < 1e-15);
        let w = werner_state(3, 0.0).unwrap();
        let sym = sym_asym_projectors(3).unwrap().sym;
        assert!(frobenius(&(w.matrix.matrix() - sym.matrix().scale(1.0 / 6.0))) < 1e-15);
        assert!((w.matrix.trace() - 1.0).abs() < 1e-14);
        assert!(!w.entangled && w.decomposable);
        let w = werner_state(3, 0.6).unwrap();
        assert!(w.entangled && !w.decomposable);
        assert!(matches!(werner_state(2, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn isotropic_examples() {
        for d in [2usize, 3, 4] {
            let s = isotropic_state(d, 1.0 / (d * d) as f64).unwrap();
            let want = identity(d * d).scale(1.0 / (d * d) as f64);
            assert!(frobenius(&(s.matrix.matrix() - want)) < 1e-15);
            assert!(s.decomposable && !s.entangled);
        }
        assert!(isotropic_state(2, 0.9).unwrap().entangled);
        assert!(isotropic_state(2, -0.1).is_err());
    }

    #[test]
    fn kappa_maps() {
        for d in [2usize, 3, 5] {
            assert!((kappa_for_werner(d, 0.0) - 1.0).abs() < 1e-15);
            assert!(kappa_for_werner(d, werner_threshold(d)).abs() < 1e-7);
            assert!((fidelity_for_kappa(d, 1.0) - 1.0 / d as f64).abs() < 1e-15);
            assert!((fidelity_for_kappa(d, 0.0) - 1.0 / (d * d) as f64).abs() < 1e-15);
            for k in [0.1, 0.4, 0.9] {
                assert!((kappa_for_fidelity(d, fidelity_for_kappa(d, k)) - k).abs() < 1e-12);
                assert!((kappa_for_werner(d, werner_for_kappa(d, k)) - k).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_parse() {
        assert_eq!("werner".parse::<Family>().unwrap(), Family::Werner);
        assert!("bell".parse::<Family>().is_err());
    }

    #[test]
    fn d2_p0_is_pure_ideal() {
        let r = symmetric_decomposition(&werner_state(2, 0.0).unwrap().into(), None).unwrap();
        assert!(r.residual < 1e-12);
        assert_eq!(r.source, "sic-fixture");
        assert_eq!(
            r.flags,
            DecompositionFlags {
                homogeneous: true,
                pure: true,
                ideal: true
            }
        );
        for w in &r.weights {
            assert!((w - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn threshold_and_degenerate_endpoint() {
        let e = symmetric_decomposition(&werner_state(2, 0.3).unwrap().into(), None).unwrap_err();
        assert!(matches!(e, Error::NoDecomposition(_)));
        let r = symmetric_decomposition(&werner_state(3, 1.0 / 3.0).unwrap().into(), None).unwrap();
        assert_eq!(r.source, "maximally-mixed");
        assert!(r.residual < 1e-12);
        assert!(r.flags.homogeneous && !r.flags.pure && !r.flags.ideal);
    }

    #[test]
    fn isotropic_target_out_of_range() {
        let low = isotropic_state(3, 0.1).unwrap();
        assert!(matches!(
            symmetric_decomposition(&low.into(), None),
            Err(Error::NoDecomposition(_))
        ));
        let high = isotropic_state(3, 0.5).unwrap();
        assert!(matches!(
            symmetric_decomposition(&high.into(), None),
            Err(Error::NoDecomposition(_))
        ));
    }

    #[test]
    fn unavailable_beyond_inball() {
        // d = 4 has no fixture; in-ball SIM reaches κ ≤ 1/3
        let target = werner_state(4, 0.0).unwrap().into();
        match symmetric_decomposition(&target, None) {
            Err(Error::ConstructionUnavailable {
                dim,
                required_kappa,
                ..
            }) => {
                assert_eq!(dim, 4);
                assert!((required_kappa - 1.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        let p = werner_for_kappa(4, 0.3);
        let r = symmetric_decomposition(&werner_state(4, p).unwrap().into(), None).unwrap();
        assert_eq!(r.source, "sim-inball");
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn verify_rejects_malformed() {
        let mut r = symmetric_decomposition(&werner_state(2, 0.1).unwrap().into(), None).unwrap();
        r.weights[0] += 0.01;
        assert!(matches!(verify_decomposition(&r), Err(Error::Domain(_))));
        r.weights[0] = -r.weights[0];
        assert!(matches!(verify_decomposition(&r), Err(Error::Domain(_))));
        r.weights.pop();
        assert!(matches!(verify_decomposition(&r), Err(Error::Domain(_))));
    }

    #[test]
    fn transform_requires_small_residual() {
        let mut r = symmetric_decomposition(&werner_state(2, 0.1).unwrap().into(), None).unwrap();
        r.residual = 1.0;
        assert!(matches!(
            werner_isotropic_transform(&r, 1e-8),
            Err(Error::Domain(_))
        ));
    }
}
