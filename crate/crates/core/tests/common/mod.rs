#![allow(dead_code)]

use conical::constructors::{
    mub_prime, mum_inball, random_rotate, scale_design, sic_fixture, sim_inball,
};
use conical::design::{induced_povm, ConicalDesign};
use conical::operator::{frobenius, kron, sym_asym_projectors, CMatrix, HermitianOperator, C64};
use conical::random::{haar_unitary, random_psd, rng};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn inball(d: usize) -> f64 {
    1.0 / (d as f64 - 1.0)
}

pub fn union(a: &ConicalDesign, b: &ConicalDesign) -> ConicalDesign {
    let mut e = a.elements().to_vec();
    e.extend_from_slice(b.elements());
    ConicalDesign::new(e).unwrap()
}

/// Largest-κ projective fixture when one exists.
pub fn projective(d: usize) -> Option<ConicalDesign> {
    match d {
        2 | 3 => Some(sic_fixture(d).unwrap()),
        5 | 7 => Some(mub_prime(d).unwrap()),
        _ => None,
    }
}

/// Deterministic catalog of constructed designs over d ∈ {2,…,5}.
pub fn constructed(i: usize) -> ConicalDesign {
    let d = 2 + (i / 7) % 4;
    let frac = 0.3 + 0.1 * ((i / 28) as f64);
    match i % 7 {
        0 => sim_inball(d, frac * inball(d), 0.5 + 0.1 * i as f64).unwrap(),
        1 => mum_inball(d, inball(d) * (1.0 - 0.2 * ((i / 28) as f64))).unwrap(),
        2 => projective(d).unwrap_or_else(|| sim_inball(d, inball(d), 1.0).unwrap()),
        3 => random_rotate(&sim_inball(d, inball(d), 1.0 / d as f64).unwrap(), i as u64).unwrap(),
        4 => {
            let base = projective(d).unwrap_or_else(|| mum_inball(d, inball(d)).unwrap());
            scale_design(&base, frac + 0.2).unwrap()
        }
        // non-homogeneous: unions with different traces and contractions
        5 => union(
            &sim_inball(d, inball(d), 2.0).unwrap(),
            &mum_inball(d, 0.5 * inball(d)).unwrap(),
        ),
        _ => {
            let u = haar_unitary(d, &mut rng(100 + i as u64));
            induced_povm(&mum_inball(d, inball(d)).unwrap().conjugate_by(&u)).unwrap()
        }
    }
}

/// Random PSD families of mixed ranks; generically not designs.
pub fn random_family(i: usize) -> ConicalDesign {
    let d = 2 + i % 4;
    let m = d * d + (i / 4) % 5;
    let mut r = rng(5000 + i as u64);
    ConicalDesign::new(
        (0..m)
            .map(|j| random_psd(d, 1 + (i + j) % d, &mut r))
            .collect(),
    )
    .unwrap()
}

/// `(Tr(Π_sym X)/Tr Π_sym, Tr(Π_asym X)/Tr Π_asym)` for `X = Σ A⊗A`, computed by brute force.
pub fn brute_force_ks_ka(design: &ConicalDesign) -> (f64, f64) {
    let d = design.dim();
    let ops = sym_asym_projectors(d).unwrap();
    let mut x = CMatrix::zeros(d * d, d * d);
    for a in design.elements() {
        x += kron(a.matrix(), a.matrix());
    }
    let ks = (ops.sym.matrix() * &x).trace().re / ops.sym.trace();
    let ka = (ops.asym.matrix() * &x).trace().re / ops.asym.trace();
    (ks, ka)
}

pub fn gram(ops: &[HermitianOperator]) -> Vec<Vec<f64>> {
    ops.iter()
        .map(|a| {
            ops.iter()
                .map(|b| (a.matrix().adjoint() * b.matrix()).trace().re)
                .collect()
        })
        .collect()
}

pub fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a - b)) / frobenius(b).max(1.0)
}
