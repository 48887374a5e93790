mod common;

use common::constructed;
use conical::bloch::{from_bloch, BlochVector};
use conical::design::{classify, ConicalDesign};
use conical::polytope::{
    bloch_gram, centering_projector, cp_search, gram_projector, mub_block_projector,
    validate_projector, verify_bloch_one_design, DesignProjector, SearchConfig,
};
use conical::theorem3_design;

fn projectors() -> Vec<DesignProjector> {
    let mut v = Vec::new();
    for d in 2..=4 {
        v.push(validate_projector(&centering_projector(d * d), d, 1e-12).unwrap());
        v.push(validate_projector(&mub_block_projector(d), d, 1e-12).unwrap());
    }
    v
}

#[test]
fn gram_projector_round_trip() {
    for i in 0..50 {
        let design = constructed(i);
        let Ok((lambda, p)) = gram_projector(&design) else {
            // only homogeneous designs have a Gram projector
            assert!(
                !classify(&design, None, 1e-9).unwrap().homogeneous,
                "design {i}"
            );
            continue;
        };
        let d = design.dim() as f64;
        let m = design.len() as f64;
        assert!(lambda <= m * d / (d + 1.0) + 1e-9);
        let rebuilt = theorem3_design(&p, 1.0).unwrap();
        let blochs: Vec<BlochVector> = rebuilt
            .bloch_vectors()
            .unwrap()
            .into_iter()
            .map(|x| x.1)
            .collect();
        let g = bloch_gram(&blochs).unwrap();
        // rescale to the original Bloch norm
        let s2 = lambda / (m * d / ((d + 1.0) * (d - 1.0).powi(2)));
        let orig: Vec<BlochVector> = design
            .bloch_vectors()
            .unwrap()
            .into_iter()
            .map(|x| x.1)
            .collect();
        let want = bloch_gram(&orig).unwrap();
        assert!((g * s2 - want).abs().max() <= 1e-9, "design {i}");
    }
}

#[test]
fn zero_iterations_reach_the_floor() {
    for p in projectors() {
        let cfg = SearchConfig {
            restarts: 4,
            max_iters: 0,
            ..Default::default()
        };
        let r = cp_search(&p, &cfg).unwrap();
        assert!(r.best_kappa >= 1.0 / (p.dim() as f64 - 1.0) - 1e-9);
        assert!(r.best_kappa <= 1.0 + 1e-12);
    }
}

#[test]
fn search_is_deterministic_and_monotone() {
    let p = validate_projector(&centering_projector(9), 3, 1e-12).unwrap();
    let cfg = SearchConfig {
        restarts: 6,
        max_iters: 120,
        seed: 3,
        ..Default::default()
    };
    let a = cp_search(&p, &cfg).unwrap();
    let b = cp_search(&p, &cfg).unwrap();
    assert_eq!(a, b);
    for t in &a.iterations {
        assert!(
            t.best_kappa.windows(2).all(|w| w[1] >= w[0]),
            "restart {}",
            t.restart
        );
    }
    let other = cp_search(&p, &SearchConfig { seed: 4, ..cfg }).unwrap();
    assert_ne!(a.iterations, other.iterations);
    assert!(a.witness_residual <= 1e-9);
}

#[test]
fn softmin_variant_also_improves() {
    let p = validate_projector(&centering_projector(9), 3, 1e-12).unwrap();
    let cfg = SearchConfig {
        restarts: 4,
        max_iters: 200,
        softmin_temperature: Some(0.02),
        ..Default::default()
    };
    let r = cp_search(&p, &cfg).unwrap();
    assert!(r.best_kappa > 0.6, "{}", r.best_kappa);
}

#[test]
fn near_unit_witness_is_projective() {
    for p in [
        validate_projector(&centering_projector(4), 2, 1e-12).unwrap(),
        validate_projector(&mub_block_projector(3), 3, 1e-12).unwrap(),
    ] {
        let r = cp_search(&p, &SearchConfig::default()).unwrap();
        if r.best_kappa >= 1.0 - 1e-6 {
            let design = ConicalDesign::new(
                r.witness
                    .iter()
                    .map(|b| from_bloch(1.0, b).unwrap())
                    .collect(),
            )
            .unwrap();
            assert!(classify(&design, None, 1e-6).unwrap().projective);
        }
    }
}

#[test]
fn one_design_check_matches_homogeneity() {
    for i in 0..50 {
        let design = constructed(i);
        let homogeneous = classify(&design, None, 1e-9).unwrap().homogeneous;
        let blochs: Vec<BlochVector> = design
            .bloch_vectors()
            .unwrap()
            .into_iter()
            .map(|x| x.1)
            .collect();
        let one = verify_bloch_one_design(&blochs, 1e-9).unwrap();
        // every design has centred, tight Bloch frames once weighted; unweighted only if homogeneous
        if homogeneous {
            assert!(one.is_one_design, "design {i}: {one:?}");
        }
    }
}
