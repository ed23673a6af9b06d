//! Acceptance suite: one line per criterion, then a single assertion.
//!
//! Run with `cargo test -p spectral-transfer --test acceptance -- --nocapture`
//! to see the report.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_transfer::corpus;
use spectral_transfer::idlab::{
    identifiability_test, lifted_identifiability_test, moreau_gradient_check, numeric_conjugate,
    partial_smoothness_check, projection_derivative_check, proximal_identification_run, quartic_conjugate,
    sample_directions, soft_threshold_limit, FunctionOracle, Generator, Grid, ManifoldPiece, Pattern,
};
use spectral_transfer::lift::sample::{sample_in_stratum, sample_ri};
use spectral_transfer::lift::{
    lift_dim, lift_stratification, numeric_tangent_dim, sing_project, sing_subdiff, sing_value, spectral_distance,
    spectral_subdiff, spectral_value, witness_f64, Region, SpectralFn, SpectralKind, Which,
};
use spectral_transfer::matdecomp::{
    conjugate_by, default_grouping_tol, diag_embed, eig_sym, givens, random_matrix, random_orthogonal,
    random_symmetric, svd, Matrix, OrthMatrix, SymMatrix,
};
use spectral_transfer::polyfun::conjugate::conjugate_value;
use spectral_transfer::polyfun::rational::{qvec, vec_to_f64, QVec};
use spectral_transfer::polyfun::{stratify, MaxAffineFn};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn acceptance_corpus(n: usize) -> [(&'static str, MaxAffineFn); 3] {
    [("fmax", corpus::f_max(n)), ("l1", corpus::l1(n)), ("neg_orthant", corpus::neg_orthant_indicator(n))]
}

/// Product of random plane rotations inside the blocks of equal entries of `x`.
fn block_rotation(x: &[f64], rng: &mut impl Rng) -> OrthMatrix {
    let n = x.len();
    let mut w = OrthMatrix::identity(n);
    for p in 0..n {
        for q in p + 1..n {
            if x[p] == x[q] {
                w = givens(n, p, q, rng.random_range(-3.0..3.0)).matmul(&w);
            }
        }
    }
    w
}

fn nsd_sample(n: usize, rng: &mut impl Rng) -> SymMatrix {
    let b = random_matrix(n, n, rng);
    SymMatrix::new(b.matmul(&b.transpose()).scale(-1.0)).unwrap()
}

// ---------------------------------------------------------------------------

fn eigensolver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let (mut worst_res, mut worst_orth) = (0.0f64, 0.0f64);
    for k in 0..1000 {
        let n = 2 + k % 19;
        let x = random_symmetric(n, &mut rng);
        let e = eig_sym(&x).unwrap();
        worst_res = worst_res.max(e.residual(&x) / (1.0 + x.frobenius_norm()));
        worst_orth = worst_orth.max(e.u.as_matrix().orthogonality_defect());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_res <= 1e-10 && worst_orth <= 1e-10 && secs < 5.0,
        format!("relative residual {worst_res:.1e}, orthogonality {worst_orth:.1e}, {secs:.2}s"),
    )
}

// Closed-form vector distances, independent of the library's projection code.
fn dist_neg_orthant(x: &[f64]) -> f64 {
    x.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn dist_box(x: &[f64]) -> f64 {
    x.iter().map(|v| (v.abs() - 1.0).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn dist_sym_halfspace(x: &[f64]) -> f64 {
    // a = (1, 2, 0, …), b = 1: the best permutation pairs the normal with
    // the two smallest entries.
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let a_norm = if x.len() > 1 { 5f64.sqrt() } else { 1.0 };
    let dot = if x.len() > 1 { 2.0 * s[0] + s[1] } else { s[0] };
    ((dot - 1.0) / a_norm).max(0.0)
}

fn distance_transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let oracles: [(&str, fn(&[f64]) -> f64); 3] =
        [("neg_orthant", dist_neg_orthant), ("box", dist_box), ("sym_halfspace", dist_sym_halfspace)];
    let (mut worst_gap, mut worst_excess) = (0.0f64, f64::NEG_INFINITY);
    for (name, vec_dist) in oracles {
        for k in 0..100 {
            let n = 2 + k % 3;
            let q = corpus::set_by_name(name, n).unwrap();
            let x = random_symmetric(n, &mut rng).scale(2.0);
            let lib = spectral_distance(&q, &x).unwrap();
            let e = eig_sym(&x).unwrap();
            let mut best = f64::INFINITY;
            for s in 0..500 {
                // Half of the conjugations are Haar-random, half are shrinking
                // perturbations of the eigenbasis.
                let u = if s % 2 == 0 {
                    random_orthogonal(n, &mut rng)
                } else {
                    let eps = 10f64.powi(-(s % 14) / 2 - 1);
                    let p = rng.random_range(0..n - 1);
                    let r = rng.random_range(p + 1..n);
                    givens(n, p, r, eps * rng.random_range(-1.0..1.0)).matmul(&e.u)
                };
                // ‖X − Uᵀ Diag(q) U‖² = ‖off(UXUᵀ)‖² + ‖diag(UXUᵀ) − q‖².
                let z = conjugate_by(&u.transpose(), &x).unwrap();
                let diag: Vec<f64> = (0..n).map(|i| z[(i, i)]).collect();
                let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| z[(i, j)].powi(2)).sum();
                let d = (off + vec_dist(&diag).powi(2)).sqrt();
                worst_excess = worst_excess.max(lib - d);
                best = best.min(d);
            }
            worst_gap = worst_gap.max((lib - best).abs());
        }
    }
    outcome(
        worst_gap <= 1e-5 && worst_excess <= 1e-9,
        format!("orbit-minimum gap {worst_gap:.1e}, largest excess over a sample {worst_excess:.1e}"),
    )
}

fn moreau_gradient() -> Outcome {
    let sets = [("neg_orthant", 3), ("box", 3), ("sym_halfspace", 3), ("axis_line", 2), ("two_points", 1), ("rank1", 3)];
    let mut worst = 0.0f64;
    let mut pass = true;
    for (i, (name, n)) in sets.iter().enumerate() {
        let q = corpus::set_by_name(name, *n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(30 + i as u64);
        let points: Vec<Vec<f64>> = (0..100).map(|_| (0..*n).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let r = moreau_gradient_check(&q, &points, 1e-4, i as u64).unwrap();
        pass &= r.pass && r.worst_case.measured <= 1e-5;
        worst = worst.max(r.worst_case.measured);
    }
    outcome(pass, format!("{} sets, worst gradient defect {worst:.1e}", sets.len()))
}

fn projection_derivative() -> Outcome {
    let fixtures = [("neg_orthant", 2, qvec(&[0, -1])), ("neg_orthant", 3, qvec(&[0, 0, -2])), ("axis_line", 2, qvec(&[3, 0]))];
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (name, n, x) in fixtures {
        let u = corpus::set_by_name(name, n).unwrap();
        let dirs = sample_directions(&u.members()[0], &x, 6, &mut rng).unwrap();
        let r = projection_derivative_check(&u, &vec_to_f64(&x), &dirs).unwrap();
        pass &= r.pass && !dirs.is_empty();
        worst = worst.max(r.worst_case.measured);
    }
    outcome(pass, format!("worst defect at step 1e-4 {worst:.1e}, monotone across steps"))
}

fn subdifferential_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut members, mut rejected, mut detected) = (0usize, 0usize, 0usize);
    let mut worst_violation = f64::NEG_INFINITY;
    let mut pass = true;
    for n in 2..=4 {
        for (_, f) in acceptance_corpus(n) {
            let sf = SpectralFn::eigen(f.clone()).unwrap();
            let strat = stratify(&f).unwrap();
            for m in &strat.strata {
                let x_vec = vec_to_f64(&m.representative);
                let u = random_orthogonal(n, &mut rng);
                let x = conjugate_by(&u, &diag_embed(&x_vec)).unwrap();
                let fx = spectral_value(&sf, &x, 1e-9).unwrap();
                let cert = spectral_subdiff(&sf, &x, 1e-9).unwrap();
                let sub = m.subdiff(&f).unwrap();
                let ys: Vec<SymMatrix> = (0..200)
                    .map(|k| match k % 3 {
                        0 => random_symmetric(n, &mut rng).scale(2.0),
                        1 => x.add(&random_symmetric(n, &mut rng).scale(10f64.powi(-(k % 5)))),
                        _ => nsd_sample(n, &mut rng),
                    })
                    .collect();
                let fys: Vec<f64> = ys.iter().map(|y| spectral_value(&sf, y, 1e-9).unwrap()).collect();
                // Largest violation of F(Y) ≥ F(X) + ⟨V, Y − X⟩.
                let violation = |v: &SymMatrix| -> f64 {
                    ys.iter()
                        .zip(&fys)
                        .filter(|(_, fy)| fy.is_finite())
                        .map(|(y, fy)| fx + v.inner(&y.sub(&x)) - fy)
                        .fold(f64::NEG_INFINITY, f64::max)
                };
                for _ in 0..3 {
                    let v_vec = vec_to_f64(&sample_ri(&sub, &mut rng));
                    let w = block_rotation(&x_vec, &mut rng);
                    let v = conjugate_by(&w.matmul(&u), &diag_embed(&v_vec)).unwrap();
                    let viol = violation(&v);
                    worst_violation = worst_violation.max(viol);
                    pass &= cert.test(Which::Member, &v, 1e-9).unwrap() && viol <= 1e-8;
                    members += 1;
                    // A perturbed member that the convex-inequality oracle
                    // refutes must be rejected.
                    let bad = v.add(&random_symmetric(n, &mut rng).scale(0.5));
                    if violation(&bad) > 1e-6 {
                        detected += 1;
                        if !cert.test(Which::Member, &bad, 1e-9).unwrap() {
                            rejected += 1;
                        }
                    }
                }
            }
        }
    }
    pass &= detected > 0 && rejected == detected;
    outcome(
        pass,
        format!("{members} members, worst violation {worst_violation:.1e}; {rejected}/{detected} refuted non-members rejected"),
    )
}

fn ri_rb_aff() -> Outcome {
    let mut pass = true;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in 2..=4 {
        let f = SpectralFn::eigen(corpus::f_max(n)).unwrap();
        let id = diag_embed(&vec![1.0; n]);
        let cert = spectral_subdiff(&f, &id, 1e-9).unwrap();
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let mut aff = vec![0.0; n];
        aff[0] = 2.0;
        aff[1] = -1.0;
        let u = random_orthogonal(n, &mut rng);
        for conj in [false, true] {
            let lift = |v: &[f64]| if conj { conjugate_by(&u, &diag_embed(v)).unwrap() } else { diag_embed(v) };
            let ri = lift(&vec![1.0 / n as f64; n]);
            let rb = lift(&e1);
            let af = lift(&aff);
            let t = |w: Which, v: &SymMatrix| cert.test(w, v, 1e-9).unwrap();
            pass &= t(Which::Ri, &ri) && t(Which::Member, &ri) && !t(Which::Rb, &ri);
            pass &= t(Which::Rb, &rb) && t(Which::Member, &rb) && !t(Which::Ri, &rb);
            pass &= t(Which::Aff, &af) && !t(Which::Member, &af);
        }
    }
    outcome(pass, "n = 2, 3, 4, diagonal and conjugated")
}

fn dimension_formula() -> Outcome {
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for n in 1..=4 {
        let lifted = lift_stratification(&SpectralFn::eigen(corpus::neg_orthant_indicator(n)).unwrap()).unwrap();
        for pair in &lifted.pairs {
            for side in [&pair.primal, &pair.dual] {
                let w = witness_f64(side);
                let dirs: Vec<Vec<f64>> = (0..n)
                    .filter(|&i| w[i] != 0.0)
                    .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect();
                let d = numeric_tangent_dim(&w, &dirs, 70 + n as u64, 1e-6).unwrap();
                checked += 1;
                if d != side.dim_lifted {
                    mismatches.push(format!("n={n} {:?}: {d} vs {}", side.pattern, side.dim_lifted));
                }
            }
        }
    }
    // {(a, a, b) : a > b}.
    let f = corpus::f_max(3);
    let s = stratify(&f).unwrap();
    let m = s.strata.iter().find(|m| m.signature.pieces.len() == 2).unwrap();
    let regions: Vec<Region> = s.sym_orbits[s.orbit_of(m.id)].iter().map(|&i| Region::Stratum(&f, &s.strata[i])).collect();
    let l = lift_dim(&regions).unwrap().unwrap();
    let home = &s.strata[s.locate(&f, &l.witness_q).unwrap()];
    let dirs: Vec<Vec<f64>> = home.affine_hull.direction.basis().iter().map(|b| vec_to_f64(b)).collect();
    let d = numeric_tangent_dim(&witness_f64(&l), &dirs, 77, 1e-6).unwrap();
    checked += 1;
    if d != 4 || l.dim_lifted != 4 {
        mismatches.push(format!("(a,a,b): numeric {d}, formula {}", l.dim_lifted));
    }
    outcome(mismatches.is_empty(), format!("{checked} lifted strata; mismatches {mismatches:?}"))
}

fn duality_diagram() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut samples, mut failures) = (0usize, 0usize);
    let mut bijection = true;
    for n in 2..=4 {
        for (_, f) in acceptance_corpus(n) {
            let lifted = lift_stratification(&SpectralFn::eigen(f).unwrap()).unwrap();
            bijection &= lifted.conj.is_bijection();
            for pair in &lifted.pairs {
                for _ in 0..100 {
                    let y = lifted.sample_dual_image(pair.orbit, &mut rng);
                    let (x, v) = lifted.sample_jf_of_lift(pair.orbit, &mut rng).unwrap();
                    let ok = lifted.jf_lift_member(pair.orbit, &y, 1e-9).unwrap()
                        && lifted.primal_member(pair.orbit, &x, 1e-9).unwrap()
                        && lifted.dual_image_member(pair.orbit, &v, 1e-9).unwrap();
                    samples += 1;
                    failures += usize::from(!ok);
                }
            }
        }
    }
    outcome(bijection && failures == 0, format!("{samples} sample pairs, {failures} failures, bijection {bijection}"))
}

fn conjugation_transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst_excess, mut worst_gap) = (f64::NEG_INFINITY, 0.0f64);
    for n in 2..=4 {
        for (_, f) in acceptance_corpus(n) {
            let sf = SpectralFn::eigen(f.clone()).unwrap();
            let strat = stratify(&f).unwrap();
            for k in 0..50 {
                let m = &strat.strata[k % strat.len()];
                let y_vec: QVec = sample_ri(&m.subdiff(&f).unwrap(), &mut rng);
                let (fstar, maximizer) = conjugate_value(&f, &y_vec).unwrap();
                let fstar = fstar.to_f64();
                let u = random_orthogonal(n, &mut rng);
                let y = conjugate_by(&u, &diag_embed(&vec_to_f64(&y_vec))).unwrap();
                let objective = |x: &SymMatrix| x.inner(&y) - spectral_value(&sf, x, 1e-9).unwrap();
                let mut sup = f64::NEG_INFINITY;
                for s in 0..500 {
                    let x = match s % 3 {
                        0 => random_symmetric(n, &mut rng).scale(3.0),
                        1 => nsd_sample(n, &mut rng),
                        _ => conjugate_by(&random_orthogonal(n, &mut rng), &diag_embed(&vec_to_f64(&sample_in_stratum(&f, m, &mut rng)))).unwrap(),
                    };
                    let v = objective(&x);
                    worst_excess = worst_excess.max(v - fstar);
                    sup = sup.max(v);
                }
                // Orbit-aligned: share the eigenbasis of Y.
                let x_star = conjugate_by(&u, &diag_embed(&vec_to_f64(&maximizer.unwrap()))).unwrap();
                let v = objective(&x_star);
                worst_excess = worst_excess.max(v - fstar);
                sup = sup.max(v);
                worst_gap = worst_gap.max(fstar - sup);
            }
        }
    }
    outcome(
        worst_excess <= 1e-9 && worst_gap <= 1e-4,
        format!("largest excess {worst_excess:.1e}, largest shortfall after alignment {worst_gap:.1e}"),
    )
}

fn finite_identification() -> Outcome {
    let f = SpectralFn::eigen(corpus::l1(3)).unwrap();
    let t = 0.5;
    let base = diag_embed(&[1.0, 0.0, 0.0]);
    let (mut identified, mut matched) = (0usize, 0usize);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let z = random_symmetric(3, &mut rng);
        let x0 = base.add(&z.scale(0.05 / z.frobenius_norm()));
        let tol = default_grouping_tol(&x0);
        let trace = proximal_identification_run(&f, &x0, t, 100, tol).unwrap();
        if let Some(k) = trace.identified_at {
            identified += 1;
            let limit = soft_threshold_limit(&eig_sym(&x0).unwrap().lambda, t);
            let expected = Pattern::of_vector(&f, &limit, tol).unwrap();
            matched += usize::from(trace.iterates[k].pattern == expected);
        }
    }
    outcome(identified >= 95 && matched == identified, format!("{identified}/100 identified, {matched} match the scalar limit pattern"))
}

fn counterexample_fidelity() -> Outcome {
    let oracle = FunctionOracle::quartic(2);
    let coords = [-1.0, 0.5, 2.0];
    let mut worst = 0.0f64;
    for a in coords {
        for b in coords {
            let y = [a, b];
            let numeric = numeric_conjugate(&oracle, &y, Grid::default(), 60).unwrap();
            let closed = 0.75 * (a.abs().powf(4.0 / 3.0) + b.abs().powf(4.0 / 3.0));
            worst = worst.max((numeric - closed).abs()).max((quartic_conjugate(&y) - closed).abs());
        }
    }
    outcome(worst <= 1e-4, format!("9 grid points, worst error {worst:.1e}"))
}

fn nonsymmetric_analogue() -> Outcome {
    let nuclear = SpectralFn::new(corpus::l1(2), SpectralKind::Singular).unwrap();
    let diag = |d: &[f64]| Matrix::from_rows(&[vec![d[0], 0.0], vec![0.0, d[1]]]).unwrap();
    let value_ok = (sing_value(&nuclear, &diag(&[2.0, -3.0]), 1e-9).unwrap() - 5.0).abs() <= 1e-12;
    let p = sing_project(&corpus::at_most_one_nonzero(2), &diag(&[3.0, 1.0]), 1e-9).unwrap();
    let project_ok = p.sub(&diag(&[3.0, 0.0])).max_abs() <= 1e-12;
    let cert = sing_subdiff(&nuclear, &diag(&[2.0, 0.0]), 1e-9).unwrap();
    let t = |g: &[f64]| cert.test(Which::Member, &diag(g), 1e-9).unwrap();
    let stabilizer_ok = t(&[1.0, 0.5]) && t(&[1.0, -0.5]) && !t(&[1.0, 2.0]) && !t(&[-1.0, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_svd = 0.0f64;
    for _ in 0..100 {
        let a = random_matrix(5, 3, &mut rng);
        let sigma = svd(&a).unwrap().sigma;
        let ata = SymMatrix::new(a.transpose().matmul(&a)).unwrap();
        let lam = eig_sym(&ata).unwrap().lambda;
        for (s, l) in sigma.iter().zip(&lam) {
            worst_svd = worst_svd.max((s - l.max(0.0).sqrt()).abs());
        }
    }
    let svd_ok = worst_svd <= 1e-8;
    outcome(
        value_ok && project_ok && stabilizer_ok && svd_ok,
        format!("value {value_ok}, rank-1 projection {project_ok}, signed stabilizer {stabilizer_ok}, svd cross-check {worst_svd:.1e}"),
    )
}

fn partial_smoothness_and_identification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut strata, mut smooth_fail) = (0usize, Vec::new());
    let (mut orbits, mut lifted_fail) = (0usize, Vec::new());
    let (mut boundary, mut boundary_missed) = (0usize, Vec::new());
    for n in 2..=3 {
        for name in corpus::FUNCTION_NAMES {
            let f = corpus::function_by_name(name, n).unwrap();
            let sf = SpectralFn::eigen(f.clone()).unwrap();
            let strat = sf.stratification().unwrap().clone();
            for m in &strat.strata {
                strata += 1;
                let r = partial_smoothness_check(&f, &ManifoldPiece::from_stratum(&f, m), &m.representative, 13).unwrap();
                if !r.pass {
                    smooth_fail.push(format!("{name}{n}#{}", m.id));
                }
            }
            for (o, members) in strat.sym_orbits.iter().enumerate() {
                orbits += 1;
                let m = &strat.strata[members[0]];
                let sub = m.subdiff(&f).unwrap();
                let v_ri = sample_ri(&sub, &mut rng);
                for gen in [Generator::ProxPath, Generator::StratumHopping, Generator::Adversarial] {
                    let r = lifted_identifiability_test(&sf, m.id, &m.representative, &v_ri, gen, 4, 100 + o as u64).unwrap();
                    if !r.probe.pass {
                        lifted_fail.push(format!("{name}{n} orbit {o} {gen:?}"));
                    }
                }
                // Counter-sequences at a relative-boundary subgradient.
                let Some(v_rb) = sub.points().iter().find(|v| sub.rb_contains(v).unwrap()).cloned() else {
                    continue;
                };
                boundary += 1;
                let vector = identifiability_test(&sf, m.id, &m.representative, &v_rb, Generator::Adversarial, 4, 200 + o as u64).unwrap();
                let lifted = lifted_identifiability_test(&sf, m.id, &m.representative, &v_rb, Generator::Adversarial, 4, 300 + o as u64).unwrap();
                if vector.probe.pass || lifted.probe.pass {
                    boundary_missed.push(format!("{name}{n} orbit {o} v={:?}", vec_to_f64(&v_rb)));
                }
            }
        }
    }
    let pass = smooth_fail.is_empty() && lifted_fail.is_empty() && boundary > 0 && boundary_missed.is_empty();
    outcome(
        pass,
        format!(
            "{strata} strata partly smooth (failures {smooth_fail:?}); {orbits} orbits identifiable at ri subgradients (failures {lifted_fail:?}); {boundary} boundary subgradients refuted (missed {boundary_missed:?})"
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("eigensolver accuracy and speed", eigensolver),
        ("distance transfer", distance_transfer),
        ("Moreau envelope gradient", moreau_gradient),
        ("projection derivative", projection_derivative),
        ("subdifferential formula", subdifferential_formula),
        ("ri / rb / aff lift", ri_rb_aff),
        ("lifted dimension formula", dimension_formula),
        ("duality diagram", duality_diagram),
        ("conjugation transfer", conjugation_transfer),
        ("finite identification", finite_identification),
        ("quartic counterexample", counterexample_fidelity),
        ("nonsymmetric analogue", nonsymmetric_analogue),
        ("partial smoothness and identifiability", partial_smoothness_and_identification),
    ];
    println!();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("[{verdict}] {:>2}. {name}: {} ({:.1}s)", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

#[test]
fn criterion_oracles_agree_on_fixtures() {
    // Closed-form distances used above, on hand-checked points.
    assert_eq!(dist_neg_orthant(&[3.0, -1.0, 4.0]), 5.0);
    assert_eq!(dist_box(&[2.0, 0.0, -3.0]), 5f64.sqrt());
    assert!((dist_sym_halfspace(&[2.0, 2.0]) - 5.0 / 5f64.sqrt()).abs() < 1e-15);
    assert_eq!(dist_sym_halfspace(&[0.0, 5.0, 0.0]), 0.0);
}
