//! Verification suites: a JSON list of named probes, each run and compared
//! with its expected verdict.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus;
use crate::error::{Error, Result};
use crate::idlab::{
    identifiability_test, lifted_identifiability_test, moreau_gradient_check, numeric_conjugate,
    partial_smoothness_check, projection_derivative_check, prox_regularity_probe, proximal_identification_run,
    quartic_conjugate, sample_directions, FunctionOracle, Generator, Grid, ManifoldPiece, ProjectableSet, Sphere,
};
use crate::io::{load_function, FunctionFile};
use crate::lift::{lift_stratification, spectral_subdiff, SpectralFn, Which};
use crate::matdecomp::{default_grouping_tol, eig_sym, random_symmetric, SymMatrix};
use crate::polyfun::rational::{parse_rational, vec_to_f64, QVec};
use crate::symmetry::sample_ball;

/// A function given by corpus name, by file, or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionRef {
    Builtin { builtin: String, n: usize },
    File { file: PathBuf },
    Inline(FunctionFile),
}

impl FunctionRef {
    pub fn resolve(&self, base_dir: &Path) -> Result<SpectralFn> {
        match self {
            FunctionRef::Builtin { builtin, n } => SpectralFn::eigen(corpus::function_by_name(builtin, *n)?),
            FunctionRef::File { file } => load_function(&base_dir.join(file))?.to_spectral(),
            FunctionRef::Inline(f) => f.to_spectral(),
        }
    }
}

fn default_step() -> f64 {
    1e-4
}

fn default_trials() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "snake_case")]
pub enum ProbeSpec {
    /// Eigendecomposition residual and orthogonality on random matrices.
    EigResidual { n: usize, trials: usize, seed: u64 },
    MoreauGradient {
        set: String,
        n: usize,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default = "default_step")]
        step: f64,
        seed: u64,
    },
    ProjectionDerivative { set: String, n: usize, point: Vec<String>, count: usize, seed: u64 },
    ProxRegularity { set: String, n: usize, point: Vec<f64>, radius: f64, trials: usize, seed: u64 },
    /// Every stratum of the function.
    PartialSmoothness { function: FunctionRef, seed: u64 },
    Identifiability {
        function: FunctionRef,
        point: Vec<String>,
        subgradient: Vec<String>,
        generator: Generator,
        #[serde(default)]
        lifted: bool,
        trials: usize,
        seed: u64,
    },
    DualityDiagram { function: FunctionRef, samples: usize, seed: u64 },
    ProxPath { function: FunctionRef, x0: Vec<Vec<f64>>, t: f64, max_iter: usize },
    /// Numerical conjugate of `¼ Σ x_i⁴` against `¾ Σ |y_i|^{4/3}`.
    QuarticConjugate { y: Vec<f64> },
}

impl ProbeSpec {
    fn kind(&self) -> &'static str {
        match self {
            ProbeSpec::EigResidual { .. } => "eig_residual",
            ProbeSpec::MoreauGradient { .. } => "moreau_gradient",
            ProbeSpec::ProjectionDerivative { .. } => "projection_derivative",
            ProbeSpec::ProxRegularity { .. } => "prox_regularity",
            ProbeSpec::PartialSmoothness { .. } => "partial_smoothness",
            ProbeSpec::Identifiability { .. } => "identifiability",
            ProbeSpec::DualityDiagram { .. } => "duality_diagram",
            ProbeSpec::ProxPath { .. } => "prox_path",
            ProbeSpec::QuarticConjugate { .. } => "quartic_conjugate",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    #[default]
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    #[serde(default)]
    pub expect: Expect,
    #[serde(flatten)]
    pub spec: ProbeSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default)]
    pub probes: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub probe: String,
    pub expect: Expect,
    /// Verdict of the probe itself.
    pub probe_pass: bool,
    /// Whether the verdict matches the expectation.
    pub ok: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub entries: Vec<EntryReport>,
}

pub fn load_suite(path: &Path) -> Result<Suite> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    crate::io::parse_json(&text, "suite file")
}

fn projectable(set: &str, n: usize) -> Result<Box<dyn ProjectableSet>> {
    if set == "sphere" {
        return Ok(Box::new(Sphere::new(vec![0.0; n], 1.0)?));
    }
    Ok(Box::new(corpus::set_by_name(set, n)?))
}

fn parse_point(v: &[String]) -> Result<QVec> {
    v.iter().map(|s| parse_rational(s)).collect()
}

fn tol(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Checks names, sets and functions before anything runs.
pub fn validate(suite: &Suite, base_dir: &Path) -> Result<()> {
    let mut names = std::collections::BTreeSet::new();
    for e in &suite.probes {
        if !names.insert(&e.name) {
            return Err(Error::InvalidInput(format!("duplicate probe name {:?}", e.name)));
        }
        match &e.spec {
            ProbeSpec::MoreauGradient { set, n, .. }
            | ProbeSpec::ProjectionDerivative { set, n, .. }
            | ProbeSpec::ProxRegularity { set, n, .. } => {
                projectable(set, *n)?;
            }
            ProbeSpec::PartialSmoothness { function, .. }
            | ProbeSpec::Identifiability { function, .. }
            | ProbeSpec::DualityDiagram { function, .. }
            | ProbeSpec::ProxPath { function, .. } => {
                function.resolve(base_dir)?;
            }
            ProbeSpec::EigResidual { n, .. } if *n == 0 => {
                return Err(Error::InvalidInput("eig_residual needs n > 0".into()));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Runs every entry, ordered by name. Budget errors abort the run; other
/// probe errors count as a failed probe with the message in `details`.
pub fn run_suite(suite: &Suite, base_dir: &Path) -> Result<SuiteReport> {
    validate(suite, base_dir)?;
    let mut entries: Vec<&SuiteEntry> = suite.probes.iter().collect();
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        let (probe_pass, tolerances, details) = match run_probe(&e.spec, base_dir) {
            Ok(r) => r,
            Err(err) if err.is_budget() => return Err(err),
            Err(err) => (false, BTreeMap::new(), json!({ "error": err.to_string() })),
        };
        out.push(EntryReport {
            name: e.name.clone(),
            probe: e.spec.kind().into(),
            expect: e.expect,
            probe_pass,
            ok: probe_pass == (e.expect == Expect::Pass),
            tolerances,
            details,
        });
    }
    Ok(SuiteReport { pass: out.iter().all(|e| e.ok), entries: out })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run_probe(spec: &ProbeSpec, base_dir: &Path) -> Result<(bool, BTreeMap<String, f64>, Value)> {
    match spec {
        ProbeSpec::EigResidual { n, trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (mut worst_res, mut worst_orth) = (0.0f64, 0.0f64);
            for _ in 0..*trials {
                let x = random_symmetric(*n, &mut rng);
                let e = eig_sym(&x)?;
                worst_res = worst_res.max(e.residual(&x) / (1.0 + x.frobenius_norm()));
                worst_orth = worst_orth.max(e.u.as_matrix().orthogonality_defect());
            }
            let pass = worst_res <= 1e-10 && worst_orth <= 1e-10;
            Ok((
                pass,
                tol(&[("relative_residual", 1e-10), ("orthogonality", 1e-10)]),
                json!({ "worst_relative_residual": worst_res, "worst_orthogonality_defect": worst_orth }),
            ))
        }
        ProbeSpec::MoreauGradient { set, n, trials, step, seed } => {
            let q = projectable(set, *n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let points: Vec<Vec<f64>> = (0..*trials).map(|_| sample_ball(&vec![0.0; *n], 3.0, &mut rng)).collect();
            let r = moreau_gradient_check(q.as_ref(), &points, *step, *seed)?;
            Ok((r.pass, tol(&[("threshold", r.worst_case.threshold), ("step", *step)]), to_value(&r)))
        }
        ProbeSpec::ProjectionDerivative { set, n, point, count, seed } => {
            let u = corpus::set_by_name(set, *n)?;
            let [member] = u.members() else {
                return Err(Error::InvalidInput("projection_derivative needs a convex set".into()));
            };
            let x = parse_point(point)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let dirs = sample_directions(member, &x, *count, &mut rng)?;
            let mut r = projection_derivative_check(&u, &vec_to_f64(&x), &dirs)?;
            r.seed = *seed;
            Ok((r.pass, tol(&[("threshold", 1e-4)]), to_value(&r)))
        }
        ProbeSpec::ProxRegularity { set, n, point, radius, trials, seed } => {
            let q = projectable(set, *n)?;
            let r = prox_regularity_probe(q.as_ref(), point, *radius, *trials, *seed)?;
            Ok((r.pass, tol(&[("diameter", 1e-7), ("near_minimizer_gap", 1e-9)]), to_value(&r)))
        }
        ProbeSpec::PartialSmoothness { function, seed } => {
            let f = function.resolve(base_dir)?;
            let strat = f.stratification()?;
            let mut reports = Vec::new();
            let mut pass = true;
            for m in &strat.strata {
                let r = partial_smoothness_check(&f.base, &ManifoldPiece::from_stratum(&f.base, m), &m.representative, *seed)?;
                pass &= r.pass;
                reports.push(json!({ "stratum": m.id, "pass": r.pass, "report": r }));
            }
            Ok((pass, tol(&[("regularity_diameter", 1e-7)]), json!({ "strata": reports })))
        }
        ProbeSpec::Identifiability { function, point, subgradient, generator, lifted, trials, seed } => {
            let f = function.resolve(base_dir)?;
            let x = parse_point(point)?;
            let v = parse_point(subgradient)?;
            let m = f
                .stratification()?
                .locate(&f.base, &x)
                .ok_or_else(|| Error::InvalidInput("point outside the domain".into()))?;
            let r = if *lifted {
                lifted_identifiability_test(&f, m, &x, &v, *generator, *trials, *seed)?
            } else {
                identifiability_test(&f, m, &x, &v, *generator, *trials, *seed)?
            };
            Ok((r.probe.pass, tol(&[("min_post_tail", 10.0)]), to_value(&r)))
        }
        ProbeSpec::DualityDiagram { function, samples, seed } => {
            let f = function.resolve(base_dir)?;
            let lifted = lift_stratification(&f)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let grouping = 1e-9;
            let mut failures = 0usize;
            for pair in &lifted.pairs {
                for _ in 0..*samples {
                    let y = lifted.sample_dual_image(pair.orbit, &mut rng);
                    failures += usize::from(!lifted.jf_lift_member(pair.orbit, &y, grouping)?);
                    let (x, v) = lifted.sample_jf_of_lift(pair.orbit, &mut rng)?;
                    let cert = spectral_subdiff(&f, &x, grouping)?;
                    failures += usize::from(!cert.test(Which::Ri, &v, grouping)?);
                    failures += usize::from(!lifted.dual_image_member(pair.orbit, &v, grouping)?);
                }
            }
            let bijection = lifted.conj.is_bijection();
            let pairs: Vec<Value> = lifted.pairs.iter().map(to_value).collect();
            Ok((
                failures == 0 && bijection,
                tol(&[("grouping", grouping)]),
                json!({ "failures": failures, "bijection": bijection, "orbits": pairs }),
            ))
        }
        ProbeSpec::ProxPath { function, x0, t, max_iter } => {
            let f = function.resolve(base_dir)?;
            let x0 = SymMatrix::from_rows(x0)?;
            let g = default_grouping_tol(&x0);
            let tr = proximal_identification_run(&f, &x0, *t, *max_iter, g)?;
            Ok((tr.identified_at.is_some(), tol(&[("grouping", g), ("fixed_point", 1e-12)]), to_value(&tr)))
        }
        ProbeSpec::QuarticConjugate { y } => {
            let oracle = FunctionOracle::quartic(y.len());
            let v = numeric_conjugate(&oracle, y, Grid::default(), 3)?;
            let exact = quartic_conjugate(y);
            Ok((
                (v - exact).abs() <= 1e-4,
                tol(&[("abs", 1e-4)]),
                json!({ "numeric": v, "closed_form": exact }),
            ))
        }
    }
}
