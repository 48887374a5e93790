#![allow(clippy::needless_range_loop)]

mod common;

use common::{c, gram, inball};
use conical::bloch::{bloch_norm, body_membership, Membership};
use conical::constructors::{
    mub_prime, mub_prime_kets, mum_inball, random_rotate, sic_fixture, sic_kets, sim_inball,
    theorem3_design,
};
use conical::design::{
    classify, induced_povm, mum_overlap, parameters, sim_overlap, verify, ConicalDesign,
    DEFAULT_TOL,
};
use conical::operator::{frobenius, identity};
use conical::polytope::{
    bloch_gram, centering_projector, mub_block_projector, validate_projector, DesignProjector,
};

fn centering(d: usize) -> DesignProjector {
    validate_projector(&centering_projector(d * d), d, 1e-12).unwrap()
}

fn mub_blocks(d: usize) -> DesignProjector {
    validate_projector(&mub_block_projector(d), d, 1e-12).unwrap()
}

fn blochs(design: &ConicalDesign) -> Vec<conical::BlochVector> {
    design
        .bloch_vectors()
        .unwrap()
        .into_iter()
        .map(|(_, b)| b)
        .collect()
}

#[test]
fn theorem3_gram_is_scaled_projector() {
    for d in 2..=6usize {
        for p in [centering(d), mub_blocks(d)] {
            let design = theorem3_design(&p, 1.0).unwrap();
            let m = p.m() as f64;
            let df = d as f64;
            let lambda = m * df / ((df + 1.0) * (df - 1.0).powi(2));
            let g = bloch_gram(&blochs(&design)).unwrap();
            let err = (g - p.matrix() * lambda).abs().max();
            assert!(err <= 1e-10, "d={d} m={m}: {err}");
        }
    }
}

#[test]
fn theorem3_examples() {
    // d = 2, t = 1/2: a SIC POVM
    let sim2 = theorem3_design(&centering(2), 0.5).unwrap();
    assert!((parameters(&sim2).unwrap().kappa - 1.0).abs() < 1e-12);
    for row in gram(sim2.elements()).iter().enumerate() {
        for (k, v) in row.1.iter().enumerate() {
            assert!((v - sim_overlap(2, 1.0, row.0 == k)).abs() < 1e-12);
        }
    }
    let sim3 = theorem3_design(&centering(3), 1.0 / 3.0).unwrap();
    assert!((gram(sim3.elements())[4][4] - 1.0 / 18.0).abs() < 1e-12);

    let mum3 = theorem3_design(&mub_blocks(3), 1.0 / 3.0).unwrap();
    assert!(classify(&mum3, None, DEFAULT_TOL).unwrap().mum_compatible);
}

#[test]
fn every_constructor_verifies() {
    for d in 2..=6usize {
        for k in [0.2, 0.7, 1.0] {
            let kappa = k * inball(d);
            for design in [
                sim_inball(d, kappa, 0.3).unwrap(),
                mum_inball(d, kappa).unwrap(),
            ] {
                assert!(
                    verify(&design, DEFAULT_TOL, 5).is_design,
                    "d={d} kappa={kappa}"
                );
                for b in blochs(&design) {
                    assert!((bloch_norm(&b) - kappa).abs() <= 1e-10);
                    assert_ne!(body_membership(&b).unwrap(), Membership::Outside);
                }
            }
        }
    }
    for d in [2usize, 3, 5, 7] {
        let p = verify(&mub_prime(d).unwrap(), DEFAULT_TOL, 5)
            .parameters
            .unwrap();
        assert!((p.t - 1.0).abs() < 1e-12 && (p.kappa - 1.0).abs() < 1e-12 && p.k_a <= 1e-10);
    }
    for d in [2usize, 3] {
        let p = verify(&sic_fixture(d).unwrap(), DEFAULT_TOL, 5)
            .parameters
            .unwrap();
        assert!((p.t - 1.0).abs() < 1e-12 && (p.kappa - 1.0).abs() < 1e-12 && p.k_a <= 1e-10);
    }
}

#[test]
fn sim_inball_examples() {
    let d4 = sim_inball(4, 1.0 / 3.0, 0.25).unwrap();
    assert_eq!(d4.len(), 16);
    assert!(classify(&d4, None, DEFAULT_TOL).unwrap().sim);
    // d = 2, κ = 1 reproduces the SIC Gram law
    let d2 = sim_inball(2, 1.0, 1.0).unwrap();
    let sic = sic_fixture(2).unwrap();
    let (a, b) = (gram(d2.elements()), gram(sic.elements()));
    for j in 0..4 {
        assert!((a[j][j] - b[0][0]).abs() < 1e-12);
        for k in 0..4 {
            if j != k {
                assert!((a[j][k] - b[0][1]).abs() < 1e-12);
            }
        }
    }
    // Bloch law κ²(d²δ − 1)/(d² − 1) on the scaled inner product
    let d = 3;
    let kappa = 0.4;
    let bs = blochs(&sim_inball(d, kappa, 1.0).unwrap());
    let df = d as f64;
    for j in 0..bs.len() {
        for k in 0..bs.len() {
            let delta = if j == k { 1.0 } else { 0.0 };
            let want = kappa * kappa * (df * df * delta - 1.0) / (df * df - 1.0);
            assert!((bs[j].scaled_inner(&bs[k]).unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn mum_inball_examples() {
    let d = 3;
    let mum = mum_inball(d, 0.5).unwrap();
    assert_eq!(mum.len(), 12);
    let g = gram(mum.elements());
    for b in 0..4 {
        let mut s = nalgebra::DMatrix::zeros(3, 3);
        for k in 0..3 {
            s += mum.elements()[b * 3 + k].matrix();
        }
        assert!(frobenius(&(s - identity(3))) < 1e-12);
    }
    for j in 0..12 {
        for k in 0..12 {
            let want = mum_overlap(3, 0.5, j / 3 == k / 3, j == k);
            assert!((g[j][k] - want).abs() < 1e-12, "({j},{k})");
            if j / 3 != k / 3 {
                assert!((g[j][k] - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }
    // d = 2, κ = 1: the MUB overlap law
    let g = gram(mum_inball(2, 1.0).unwrap().elements());
    for j in 0..6 {
        for k in 0..6 {
            let want = if j == k {
                1.0
            } else if j / 2 == k / 2 {
                0.0
            } else {
                0.5
            };
            assert!((g[j][k] - want).abs() < 1e-12);
        }
    }
}

#[test]
fn fixture_overlaps() {
    for d in [2usize, 3, 5, 7] {
        let kets = mub_prime_kets(d).unwrap();
        assert_eq!(kets.len(), d * (d + 1));
        for j in 0..kets.len() {
            for k in 0..kets.len() {
                let ov = kets[j].dotc(&kets[k]).norm_sqr();
                let want = if j == k {
                    1.0
                } else if j / d == k / d {
                    0.0
                } else {
                    1.0 / d as f64
                };
                assert!((ov - want).abs() < 1e-12, "d={d} ({j},{k}) {ov}");
            }
        }
    }
    for d in [2usize, 3] {
        let kets = sic_kets(d).unwrap();
        for j in 0..d * d {
            assert!((kets[j].norm() - 1.0).abs() < 1e-14);
            for k in j + 1..d * d {
                assert!((kets[j].dotc(&kets[k]).norm_sqr() - 1.0 / (d as f64 + 1.0)).abs() < 1e-12);
            }
        }
    }
    // d = 3 fiducial
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let f = &sic_kets(3).unwrap()[0];
    for (x, y) in f.iter().zip([c(0.0, 0.0), c(s, 0.0), c(-s, 0.0)]) {
        assert!((x - y).norm() < 1e-15);
    }
}

#[test]
fn random_rotate_contract() {
    for (design, seed) in [
        (sim_inball(3, 0.5, 1.0 / 3.0).unwrap(), 1u64),
        (mum_inball(4, 0.2).unwrap(), 2),
        (sic_fixture(3).unwrap(), 3),
    ] {
        let a = random_rotate(&design, seed).unwrap();
        let b = random_rotate(&design, seed).unwrap();
        assert_eq!(a, b);
        assert!(verify(&a, DEFAULT_TOL, 5).is_design);
        // common rescale s: Gram after = s² · Gram before
        let before = bloch_gram(&blochs(&design)).unwrap();
        let after = bloch_gram(&blochs(&a)).unwrap();
        let s2 = after[(0, 0)] / before[(0, 0)];
        assert!(s2 > 0.0 && s2 <= 1.0 + 1e-12);
        assert!((after - before * s2).abs().max() <= 1e-12);
        for x in a.elements() {
            assert!(x.is_psd().unwrap());
        }
        // traces are untouched
        for (x, y) in a.traces().iter().zip(design.traces()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
    // inside the in-ball no rescale is needed
    let sim = sim_inball(3, 0.5, 1.0).unwrap();
    let rot = random_rotate(&sim, 9).unwrap();
    let p = parameters(&rot).unwrap();
    assert!((p.kappa - 0.5).abs() < 1e-12);
    assert!(verify(&induced_povm(&rot).unwrap(), DEFAULT_TOL, 0).is_design);
}
