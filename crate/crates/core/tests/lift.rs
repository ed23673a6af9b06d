use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_transfer::corpus;
use spectral_transfer::lift::{
    lift_stratification, spectral_distance, spectral_project, spectral_prox, spectral_subdiff, spectral_value,
    SpectralFn, Which,
};
use spectral_transfer::matdecomp::{conjugate_by, diag_embed, random_orthogonal, random_symmetric, SymMatrix};
use spectral_transfer::polyfun::rational::qvec;

#[test]
fn commuting_diagram_small_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (f, n) in [(corpus::l1(2), 2), (corpus::f_max(3), 3), (corpus::neg_orthant_indicator(3), 3)] {
        let lifted = lift_stratification(&SpectralFn::eigen(f).unwrap()).unwrap();
        assert_eq!(lifted.strat.n, n);
        for pair in &lifted.pairs {
            for _ in 0..10 {
                let y = lifted.sample_dual_image(pair.orbit, &mut rng);
                assert!(lifted.jf_lift_member(pair.orbit, &y, 1e-9).unwrap(), "orbit {}", pair.orbit);
                let (x, v) = lifted.sample_jf_of_lift(pair.orbit, &mut rng).unwrap();
                assert!(lifted.primal_member(pair.orbit, &x, 1e-9).unwrap());
                assert!(lifted.dual_image_member(pair.orbit, &v, 1e-9).unwrap());
                let cert = spectral_subdiff(&lifted.f, &x, 1e-9).unwrap();
                assert!(cert.test(Which::Ri, &v, 1e-9).unwrap());
            }
        }
    }
}

#[test]
fn positive_quadrant_maps_to_identity() {
    let lifted = lift_stratification(&SpectralFn::eigen(corpus::l1(2)).unwrap()).unwrap();
    let m = lifted.strat.locate(&lifted.f.base, &qvec(&[2, 1])).unwrap();
    let orbit = lifted.strat.orbit_of(m);
    let id = diag_embed(&[1.0, 1.0]);
    assert!(lifted.dual_image_member(orbit, &id, 1e-9).unwrap());
    assert!(lifted.jf_lift_member(orbit, &id, 1e-9).unwrap());
    let other = diag_embed(&[1.0, 0.5]);
    assert!(!lifted.dual_image_member(orbit, &other, 1e-9).unwrap());
    assert!(!lifted.jf_lift_member(orbit, &other, 1e-9).unwrap());
}

#[test]
fn constant_rank_pairing_dimensions() {
    for n in 2..=4 {
        let lifted = lift_stratification(&SpectralFn::eigen(corpus::neg_orthant_indicator(n)).unwrap()).unwrap();
        for pair in &lifted.pairs {
            let k = pair.primal.base_dim;
            let r = pair.dual.base_dim;
            assert_eq!(k + r, n);
            assert_eq!(pair.primal.dim_lifted + pair.dual.dim_lifted - k * r, n * (n + 1) / 2);
        }
    }
}

#[test]
fn orthogonal_invariance_and_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in corpus::FUNCTION_NAMES {
        let f = SpectralFn::eigen(corpus::function_by_name(name, 3).unwrap()).unwrap();
        for _ in 0..20 {
            let x = random_symmetric(3, &mut rng);
            let u = random_orthogonal(3, &mut rng);
            let ux = conjugate_by(&u, &x).unwrap();
            let (a, b) = (spectral_value(&f, &x, 1e-9).unwrap(), spectral_value(&f, &ux, 1e-9).unwrap());
            assert!(a == b || (a - b).abs() <= 1e-9, "{name}: {a} vs {b}");
        }
        let x = diag_embed(&[0.0, 0.0, -1.0]);
        let cert = spectral_subdiff(&f, &x, 1e-9).unwrap();
        let u = random_orthogonal(3, &mut rng);
        let cert_u = spectral_subdiff(&f, &conjugate_by(&u, &x).unwrap(), 1e-9).unwrap();
        for v in [diag_embed(&[0.5, 0.5, -1.0]), diag_embed(&[1.0, 0.0, 0.0]), diag_embed(&[0.0, 1.0, 0.0]), diag_embed(&[0.3, -0.2, -1.0])] {
            let vu = conjugate_by(&u, &v).unwrap();
            assert_eq!(
                cert.test(Which::Member, &v, 1e-9).unwrap(),
                cert_u.test(Which::Member, &vu, 1e-9).unwrap(),
                "{name}"
            );
        }
    }
}

#[test]
fn projection_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = corpus::sym_halfspace(3);
    for _ in 0..30 {
        let x = random_symmetric(3, &mut rng).scale(2.0);
        let d = spectral_distance(&q, &x).unwrap();
        let p = match spectral_project(&q, &x, 1e-9) {
            Ok(p) => p,
            Err(e) => {
                assert!(matches!(e, spectral_transfer::Error::AmbiguousProjection { .. }));
                continue;
            }
        };
        assert!((x.sub(&p).frobenius_norm() - d).abs() <= 1e-8);
    }
}

#[test]
fn prox_optimality_and_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for name in corpus::FUNCTION_NAMES {
        let f = SpectralFn::eigen(corpus::function_by_name(name, 3).unwrap()).unwrap();
        for _ in 0..10 {
            let x = random_symmetric(3, &mut rng);
            let p = spectral_prox(&f, 0.7, &x).unwrap();
            let g: SymMatrix = x.sub(&p).scale(1.0 / 0.7);
            let cert = spectral_subdiff(&f, &p, 1e-9).unwrap();
            assert!(cert.test(Which::Member, &g, 1e-8).unwrap(), "{name}");
            if name != "neg_orthant" {
                let near = spectral_prox(&f, 1e-6, &x).unwrap();
                assert!(near.sub(&x).frobenius_norm() <= 1e-5);
            }
        }
    }
}
