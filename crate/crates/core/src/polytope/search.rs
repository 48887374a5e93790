//! Lower bounds on the largest contraction parameter realizable for a projector.
//!
//! For a rotation `R` of the traceless subspace (in Gell-Mann coordinates) the unit
//! directions `B̂_j(R)` have Gram matrix `(md/(d+1))·P`. The objective
//! `f(R) = min_j κ_max(B̂_j(R))` is the largest uniform scaling keeping every vertex in
//! the Bloch body; it is at least `1/(d−1)` for every `R`. Ascent uses the
//! eigenvector subgradient of the worst vertex's smallest eigenvalue with a polar
//! retraction back to the orthogonal group.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{spectral_frame, verify_bloch_one_design, DesignProjector};
use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::operator::{eigh, gell_mann_basis, CMatrix, HermitianOperator};
use crate::random::{random_orthogonal, rng_stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub step0: f64,
    /// Replace the worst-vertex subgradient by the gradient of a softmin of the
    /// vertex objectives at this temperature.
    pub softmin_temperature: Option<f64>,
    /// Halve the step after this many consecutive non-improving iterations.
    pub halve_after: usize,
    /// End a restart after this many consecutive non-improving iterations.
    pub stop_after: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 500,
            seed: 7,
            step0: 0.1,
            softmin_temperature: None,
            halve_after: 10,
            stop_after: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    /// Best objective seen after each iteration (index 0 is the start).
    pub best_kappa: Vec<f64>,
    pub iterations_run: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    /// Certified lower bound on the supremal contraction parameter.
    pub best_kappa: f64,
    /// Bloch vectors `best_kappa · B̂_j` at the best rotation found.
    pub witness: Vec<BlochVector>,
    /// `max |G − λP| / λ` for the witness Gram matrix `G` and `λ = md·κ²/(d+1)`.
    pub witness_residual: f64,
    /// `1/(d−1)`, the value guaranteed at every rotation.
    pub floor: f64,
    pub restarts_run: usize,
    pub iterations: Vec<RestartTrace>,
    pub seed: u64,
}

struct Landscape {
    d: usize,
    n: usize,
    /// `n × m`, column `j` holds the Gell-Mann coordinates of `B̂_j(I)`.
    frame: DMatrix<f64>,
    basis: Vec<CMatrix>,
}

struct Vertex {
    min_eig: f64,
    gap: f64,
    vector: nalgebra::DVector<nalgebra::Complex<f64>>,
}

impl Landscape {
    fn new(p: &DesignProjector) -> Result<Self> {
        let d = p.dim();
        let m = p.m() as f64;
        let df = d as f64;
        let scale = (m * df / (df + 1.0)).sqrt();
        let frame = spectral_frame(p)? * scale;
        let basis = gell_mann_basis(d)?
            .into_iter()
            .map(|b| b.into_matrix())
            .collect();
        Ok(Self {
            d,
            n: d * d - 1,
            frame,
            basis,
        })
    }

    fn m(&self) -> usize {
        self.frame.ncols()
    }

    fn operator(&self, coeffs: &[f64]) -> CMatrix {
        let mut op = CMatrix::zeros(self.d, self.d);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            op += b.scale(*c);
        }
        op
    }

    fn directions(&self, rotation: &DMatrix<f64>) -> DMatrix<f64> {
        rotation * &self.frame
    }

    fn vertex(&self, coeffs: &[f64]) -> Result<Vertex> {
        let (vals, vecs) = eigh(&self.operator(coeffs))?;
        let mut v = vecs.column(0).clone_owned();
        // fix the phase: first non-negligible component real positive
        if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = z.conj() / z.norm();
            v *= phase;
        }
        Ok(Vertex {
            min_eig: vals[0],
            gap: vals[1] - vals[0],
            vector: v,
        })
    }

    fn vertices(&self, rotation: &DMatrix<f64>) -> Result<Vec<Vertex>> {
        let dirs = self.directions(rotation);
        (0..self.m())
            .map(|j| {
                let c: Vec<f64> = dirs.column(j).iter().copied().collect();
                self.vertex(&c)
            })
            .collect()
    }

    fn objective(vertices: &[Vertex]) -> Result<(f64, usize)> {
        let mut worst = 0;
        let mut best = f64::INFINITY;
        for (j, v) in vertices.iter().enumerate() {
            let k = 1.0 / v.min_eig.abs();
            if !k.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite objective at vertex {j}"
                )));
            }
            // strict comparison keeps the lowest index among ties
            if k < best {
                best = k;
                worst = j;
            }
        }
        Ok((best, worst))
    }

    /// Euclidean gradient of `κ_j = −1/λ_min(B̂_j)` with respect to the rotation.
    fn kappa_gradient(&self, j: usize, v: &Vertex) -> DMatrix<f64> {
        let w = DVector::from_iterator(
            self.n,
            self.basis
                .iter()
                .map(|b| v.vector.dotc(&(b * &v.vector)).re / (v.min_eig * v.min_eig)),
        );
        &w * self.frame.column(j).transpose()
    }
}

fn polar(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => Ok(u * vt),
        _ => Err(Error::Numerical("SVD failed in polar retraction".into())),
    }
}

fn run_restart(
    land: &Landscape,
    config: &SearchConfig,
    restart: usize,
) -> Result<(f64, DMatrix<f64>, RestartTrace)> {
    let mut r = rng_stream(config.seed, restart as u64);
    let mut rotation = random_orthogonal(land.n, &mut r);
    let mut verts = land.vertices(&rotation)?;
    let (mut best, _) = Landscape::objective(&verts)?;
    let mut best_rotation = rotation.clone();
    let mut trace = vec![best];
    let mut step = config.step0;
    let mut stale = 0usize;
    let mut iterations_run = 0;

    for _ in 0..config.max_iters {
        let (_, worst) = Landscape::objective(&verts)?;
        let mut local_step = step;
        let grad = match config.softmin_temperature {
            None => {
                if verts[worst].gap < 1e-8 {
                    local_step *= 0.5;
                }
                land.kappa_gradient(worst, &verts[worst])
            }
            Some(temp) => {
                let kappas: Vec<f64> = verts.iter().map(|v| 1.0 / v.min_eig.abs()).collect();
                let kmin = kappas.iter().copied().fold(f64::INFINITY, f64::min);
                let weights: Vec<f64> = kappas.iter().map(|k| (-(k - kmin) / temp).exp()).collect();
                let total: f64 = weights.iter().sum();
                let mut g = DMatrix::zeros(land.n, land.n);
                for (j, (v, w)) in verts.iter().zip(&weights).enumerate() {
                    if *w / total > 1e-12 {
                        g += land.kappa_gradient(j, v) * (*w / total);
                    }
                }
                g
            }
        };
        // tangent projection R·skew(Rᵀ G)
        let rt_g = rotation.transpose() * &grad;
        let xi = &rotation * ((&rt_g - rt_g.transpose()) * 0.5);
        let norm = xi.norm();
        iterations_run += 1;
        if norm > 1e-14 {
            rotation = polar(&(&rotation + xi * (local_step / norm)))?;
            verts = land.vertices(&rotation)?;
        }
        let (value, _) = Landscape::objective(&verts)?;
        if value > best {
            best = value;
            best_rotation = rotation.clone();
            stale = 0;
        } else {
            stale += 1;
            if stale.is_multiple_of(config.halve_after) {
                step *= 0.5;
            }
        }
        trace.push(best);
        if stale >= config.stop_after || norm <= 1e-14 {
            break;
        }
    }
    Ok((
        best,
        best_rotation,
        RestartTrace {
            restart,
            best_kappa: trace,
            iterations_run,
        },
    ))
}

/// Per-vertex `κ_max` of the unit directions at a given rotation (Gell-Mann coordinates).
pub fn direction_kappas(p: &DesignProjector, rotation: &DMatrix<f64>) -> Result<Vec<f64>> {
    let land = Landscape::new(p)?;
    if rotation.shape() != (land.n, land.n) {
        return Err(Error::Dimension(format!(
            "rotation must be {0}x{0}",
            land.n
        )));
    }
    Ok(land
        .vertices(rotation)?
        .iter()
        .map(|v| 1.0 / v.min_eig.abs())
        .collect())
}

/// Multi-start ascent of the contraction objective; restarts run in parallel on
/// independent seed streams and the best value wins (lowest restart index on ties).
pub fn cp_search(p: &DesignProjector, config: &SearchConfig) -> Result<SearchResult> {
    if config.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    if !(config.step0 > 0.0) || config.halve_after == 0 {
        return Err(Error::Domain(
            "step0 and halve_after must be positive".into(),
        ));
    }
    let land = Landscape::new(p)?;
    let runs: Vec<(f64, DMatrix<f64>, RestartTrace)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&land, config, r))
        .collect::<Result<_>>()?;

    let mut best_idx = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best_idx].0 {
            best_idx = i;
        }
    }
    let best_kappa = runs[best_idx].0;
    let dirs = land.directions(&runs[best_idx].1);
    let d = land.d;
    let witness: Vec<BlochVector> = (0..land.m())
        .map(|j| {
            let c: Vec<f64> = dirs.column(j).iter().map(|x| x * best_kappa).collect();
            BlochVector::new(HermitianOperator::from_hermitian(land.operator(&c)))
        })
        .collect::<Result<_>>()?;

    let m = land.m() as f64;
    let df = d as f64;
    let lambda = m * df * best_kappa * best_kappa / (df + 1.0);
    let gram = super::bloch_gram(&witness)?;
    let witness_residual = (gram - p.matrix() * lambda).abs().max() / lambda;

    // a sanity check on the witness; failure means the frame was corrupted
    let one = verify_bloch_one_design(&witness, 1e-8)?;
    if !one.is_one_design {
        return Err(Error::Numerical(format!(
            "search witness is not a Bloch one-design (frame residual {:.3e})",
            one.frame_residual
        )));
    }

    Ok(SearchResult {
        best_kappa,
        witness,
        witness_residual,
        floor: 1.0 / (df - 1.0),
        restarts_run: runs.len(),
        iterations: runs.into_iter().map(|r| r.2).collect(),
        seed: config.seed,
    })
}
