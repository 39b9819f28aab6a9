//! Scenario files and the verification suites they select.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fields::{ScalarField, Term};
use crate::fundsol::RadialFundamental;
use crate::linalg::{SymMatrix, Vector, MAX_DIM};
use crate::operators::{dominative, matrix_symbol, p_laplacian, PValue};
use crate::radial::{
    default_profile_radii, evaluate_samples, verify_radial_equivalence, verify_theorem2, RadialProfile, SampleOutcome,
    SkippedSample,
};
use crate::sampling::{Sampler, GENERATOR};
use crate::superposition::{
    random_crandall_instance, verify_crandall, verify_theorem1_i, CrandallSum, Pole, RandomCrandallSpec,
    Theorem1Report, SUPERPOSITION_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Largest grid resolution per axis accepted by `sample`.
pub const MAX_GRID: usize = 2048;
/// Tolerance of the matrix-symbol inequalities.
pub const SYMBOL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    /// `𝓓_p u ≤ tol` for every listed field.
    Dominative,
    /// `Δ_p` and `𝓓_p` of the sum of the listed fields.
    Theorem1,
    /// The Crandall sum of the listed poles plus the concave part.
    Crandall,
    /// Random Crandall sums.
    RandomCrandall,
    /// Sum of the placed radial profiles plus the concave part.
    Theorem2,
    /// Certification of each radial profile on its own.
    RadialEquivalence,
    /// `𝓓_p w = 0 = Δ_p w` for the fundamental solution.
    Annihilation,
    /// Sublinearity, homogeneity and ellipticity of the matrix symbol.
    MatrixSymbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every selected suite is expected to pass.
    #[default]
    Superharmonic,
    /// Every selected suite is expected to fail.
    NotSuperharmonic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub count: usize,
    /// Samples are uniform in `[lo, hi]ⁿ`.
    #[serde(rename = "box")]
    pub bounds: [f64; 2],
    #[serde(default = "default_exclusion")]
    pub exclusion_radius: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_exclusion() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacedProfile {
    pub profile: RadialProfile,
    pub center: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSpec {
    pub x0: Vector,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Coordinates varied along the two grid axes.
    pub axes: [usize; 2],
    /// Values of the remaining coordinates; zeros when absent.
    #[serde(default)]
    pub base: Option<Vector>,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub resolution: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordSpec {
    pub profile: RadialProfile,
    #[serde(default)]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub n: usize,
    pub p: PValue,
    #[serde(default)]
    pub fields: Vec<ScalarField>,
    #[serde(default)]
    pub profiles: Vec<PlacedProfile>,
    #[serde(default)]
    pub poles: Vec<Pole>,
    #[serde(default)]
    pub concave: Option<ScalarField>,
    pub sampling: Sampling,
    #[serde(default)]
    pub suites: Vec<SuiteKind>,
    #[serde(default)]
    pub expected_verdict: Verdict,
    #[serde(default)]
    pub counterexample: Option<CounterexampleSpec>,
    #[serde(default)]
    pub random_crandall: Option<RandomCrandallSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub chords: Option<ChordSpec>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Construction(msg.into())
}

impl Scenario {
    /// Parses and validates scenario JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| invalid(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.n == 0 || self.n > MAX_DIM {
            return Err(invalid(format!("n = {} outside 1..={MAX_DIM}", self.n)));
        }
        let n = self.n;
        for (i, f) in self.fields.iter().enumerate() {
            let m = f.dim().map_err(|e| invalid(format!("fields[{i}]: {e}")))?;
            if m != n {
                return Err(invalid(format!("fields[{i}] lives in ℝ^{m}, scenario has n = {n}")));
            }
        }
        for (i, pp) in self.profiles.iter().enumerate() {
            if pp.center.dim() != n {
                return Err(invalid(format!(
                    "profiles[{i}].center has length {}, expected {n}",
                    pp.center.dim()
                )));
            }
            if let Some(rf) = pp.profile.fundamental_solution() {
                if rf.n != n || rf.p != self.p {
                    return Err(invalid(format!(
                        "profiles[{i}] is built on w_{{{},{}}}, scenario has n = {n}, p = {}",
                        rf.n, rf.p, self.p
                    )));
                }
            }
        }
        CrandallSum::new(n, self.p, self.poles.clone(), self.concave.clone())
            .map_err(|e| invalid(format!("poles/concave: {e}")))?;
        let s = &self.sampling;
        if !(s.bounds[0] < s.bounds[1]) || s.bounds.iter().any(|b| !b.is_finite()) {
            return Err(invalid(format!(
                "sampling.box must satisfy lo < hi, got {:?}",
                s.bounds
            )));
        }
        if !(s.exclusion_radius >= 0.0) {
            return Err(invalid("sampling.exclusion_radius must be >= 0"));
        }
        for suite in &self.suites {
            let missing = match suite {
                SuiteKind::Dominative | SuiteKind::Theorem1 => self.fields.is_empty().then_some("fields"),
                SuiteKind::Crandall => self.poles.is_empty().then_some("poles"),
                SuiteKind::Theorem2 | SuiteKind::RadialEquivalence => self.profiles.is_empty().then_some("profiles"),
                _ => None,
            };
            if let Some(what) = missing {
                return Err(invalid(format!("suite {suite:?} needs a non-empty `{what}` list")));
            }
        }
        if let Some(ce) = &self.counterexample {
            if ce.x0.dim() != n {
                return Err(invalid(format!(
                    "counterexample.x0 has length {}, expected {n}",
                    ce.x0.dim()
                )));
            }
        }
        if let Some(g) = &self.grid {
            validate_grid(g, n)?;
        }
        if let Some(c) = &self.chords {
            if let Some(rf) = c.profile.fundamental_solution() {
                if rf.n != n || rf.p != self.p {
                    return Err(invalid("chords.profile must be built on the scenario's n and p"));
                }
            }
            c.profile
                .validate()
                .map_err(|e| invalid(format!("chords.profile: {e}")))?;
            if c.radii.iter().any(|&r| !(r >= 0.0) || !r.is_finite()) {
                return Err(invalid("chords.radii must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Sum of every field, profile, pole and the concave part.
    pub fn combined_field(&self) -> Result<ScalarField> {
        let mut terms: Vec<Term> = self
            .fields
            .iter()
            .map(|f| Term {
                coef: 1.0,
                field: f.clone(),
            })
            .collect();
        terms.extend(self.profiles.iter().map(|pp| Term {
            coef: 1.0,
            field: pp.profile.field(pp.center),
        }));
        if !self.poles.is_empty() {
            let rf = RadialFundamental { n: self.n, p: self.p };
            terms.extend(self.poles.iter().map(|t| Term {
                coef: t.c,
                field: RadialProfile::fundamental(rf).field(t.y),
            }));
        }
        if let Some(k) = &self.concave {
            terms.push(Term {
                coef: 1.0,
                field: k.clone(),
            });
        }
        if terms.is_empty() {
            return Err(invalid("scenario defines no field"));
        }
        ScalarField::sum(terms)
    }
}

pub fn validate_grid(g: &GridSpec, n: usize) -> Result<()> {
    if g.axes[0] >= n || g.axes[1] >= n || g.axes[0] == g.axes[1] {
        return Err(invalid(format!(
            "grid.axes {:?} must be two distinct coordinates below n = {n}",
            g.axes
        )));
    }
    if let Some(b) = &g.base {
        if b.dim() != n {
            return Err(invalid(format!("grid.base has length {}, expected {n}", b.dim())));
        }
    }
    for a in 0..2 {
        if !(g.lo[a] < g.hi[a]) || !g.lo[a].is_finite() || !g.hi[a].is_finite() {
            return Err(invalid("grid needs finite lo < hi on both axes"));
        }
        if g.resolution[a] < 2 || g.resolution[a] > MAX_GRID {
            return Err(invalid(format!(
                "grid resolution {} outside 2..={MAX_GRID} per axis",
                g.resolution[a]
            )));
        }
    }
    Ok(())
}

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tol_scale: Option<f64>,
}

/// A worst-case quantity and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub witness: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub passed: bool,
    pub expected_pass: bool,
    pub as_expected: bool,
    pub evaluated: usize,
    pub skipped: usize,
    pub skipped_points: Vec<SkippedSample>,
    pub residuals: Vec<Residual>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub scenario: String,
    pub scenario_sha256: String,
    pub generator: String,
    pub seed: u64,
    pub n: usize,
    pub p: PValue,
    pub sample_count: usize,
    pub tol_scale: f64,
    pub expected_verdict: Verdict,
    pub all_as_expected: bool,
    pub suites: Vec<SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct SuiteOutcome {
    inner_pass: bool,
    evaluated: usize,
    skipped: Vec<SkippedSample>,
    residuals: Vec<Residual>,
    notes: Vec<String>,
}

impl SuiteOutcome {
    fn empty() -> Self {
        Self {
            inner_pass: true,
            evaluated: 0,
            skipped: Vec::new(),
            residuals: Vec::new(),
            notes: Vec::new(),
        }
    }
}

fn residual(name: &str, value: f64, tolerance: f64, witness: Option<Vec<f64>>) -> Residual {
    Residual {
        name: name.into(),
        value,
        tolerance,
        witness,
    }
}

fn theorem1_outcome(rep: Theorem1Report, tol: f64) -> SuiteOutcome {
    let mut notes = Vec::new();
    for v in rep.precondition_violations.iter().take(10) {
        notes.push(format!(
            "precondition: summand {} has 𝓓_p = {:e} at {:?}",
            v.field, v.dominative, v.point
        ));
    }
    if rep.precondition_violations.len() > 10 {
        notes.push(format!(
            "{} further precondition violations",
            rep.precondition_violations.len() - 10
        ));
    }
    SuiteOutcome {
        inner_pass: rep.pass,
        evaluated: rep.evaluated,
        skipped: rep.skipped,
        residuals: vec![
            residual("max_p_laplace", rep.max_p_laplace, tol, rep.max_p_laplace_at),
            residual("max_dominative", rep.max_dominative, tol, rep.max_dominative_at),
        ],
        notes,
    }
}

/// Runs every selected suite.
pub fn run(scenario: &Scenario, raw: &[u8], opts: RunOptions) -> Result<Report> {
    let seed = opts.seed.unwrap_or(scenario.sampling.seed);
    let count = opts.points.unwrap_or(scenario.sampling.count);
    let tol_scale = opts.tol_scale.unwrap_or(1.0);
    if !(tol_scale > 0.0) || !tol_scale.is_finite() {
        return Err(invalid(format!("tol-scale must be positive, got {tol_scale}")));
    }
    let mut root = Sampler::new(seed);
    let mut suites = Vec::with_capacity(scenario.suites.len());
    let expected_pass = scenario.expected_verdict == Verdict::Superharmonic;
    for &suite in &scenario.suites {
        // every suite draws from its own stream so adding suites never shifts others
        let mut s = root.fork();
        log::info!("running suite {suite:?}");
        let out = run_suite(scenario, suite, &mut s, count, tol_scale)?;
        let within = out.residuals.iter().all(|r| r.value <= r.tolerance);
        let passed = out.inner_pass && within;
        suites.push(SuiteReport {
            suite,
            passed,
            expected_pass,
            as_expected: passed == expected_pass,
            evaluated: out.evaluated,
            skipped: out.skipped.len(),
            skipped_points: out.skipped,
            residuals: out.residuals,
            notes: out.notes,
        });
    }
    Ok(Report {
        tool: "dplap".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schema_version: SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        scenario_sha256: sha256_hex(raw),
        generator: GENERATOR.into(),
        seed,
        n: scenario.n,
        p: scenario.p,
        sample_count: count,
        tol_scale,
        expected_verdict: scenario.expected_verdict,
        all_as_expected: suites.iter().all(|s| s.as_expected),
        suites,
        runtime_seconds: None,
    })
}

fn box_samples(s: &mut Sampler, scenario: &Scenario, count: usize) -> Vec<Vector> {
    let [lo, hi] = scenario.sampling.bounds;
    (0..count).map(|_| s.vector_in_box(scenario.n, lo, hi)).collect()
}

fn run_suite(
    scenario: &Scenario,
    suite: SuiteKind,
    s: &mut Sampler,
    count: usize,
    tol_scale: f64,
) -> Result<SuiteOutcome> {
    let tol = SUPERPOSITION_TOL * tol_scale;
    let p = scenario.p;
    let n = scenario.n;
    let exclusion = scenario.sampling.exclusion_radius;
    match suite {
        SuiteKind::Dominative => {
            let samples = box_samples(s, scenario, count);
            let mut out = SuiteOutcome::empty();
            for (i, f) in scenario.fields.iter().enumerate() {
                let values = evaluate_samples(&samples, |x| {
                    if f.singular_distance(x) < exclusion {
                        return Ok(SampleOutcome::Skipped(
                            "within exclusion radius of a singular set".into(),
                        ));
                    }
                    match f.eval_jet(x) {
                        Ok(j) => Ok(SampleOutcome::Values(vec![dominative(&j, p)?])),
                        Err(Error::Singular { term, .. }) => Ok(SampleOutcome::Skipped(term)),
                        Err(e) => Err(e),
                    }
                })?;
                let mut worst = f64::NEG_INFINITY;
                let mut at = None;
                for (x, v) in samples.iter().zip(values) {
                    match v {
                        SampleOutcome::Skipped(reason) => out.skipped.push(SkippedSample {
                            point: x.to_vec(),
                            reason: format!("fields[{i}]: {reason}"),
                        }),
                        SampleOutcome::Values(v) => {
                            out.evaluated += 1;
                            if v[0] > worst {
                                worst = v[0];
                                at = Some(x.to_vec());
                            }
                        }
                    }
                }
                out.residuals
                    .push(residual(&format!("fields[{i}].max_dominative"), worst, tol, at));
            }
            out.inner_pass = out.evaluated > 0;
            Ok(out)
        }
        SuiteKind::Theorem1 => {
            let samples = box_samples(s, scenario, count);
            Ok(theorem1_outcome(
                verify_theorem1_i(&scenario.fields, &samples, p, exclusion, tol)?,
                tol,
            ))
        }
        SuiteKind::Crandall => {
            let sum = CrandallSum::new(n, p, scenario.poles.clone(), scenario.concave.clone())?;
            let samples = box_samples(s, scenario, count);
            Ok(theorem1_outcome(verify_crandall(&sum, &samples, exclusion, tol)?, tol))
        }
        SuiteKind::RandomCrandall => {
            let spec = scenario.random_crandall.clone().unwrap_or_default();
            let instances: Vec<(CrandallSum, Vec<Vector>)> = (0..spec.instances)
                .map(|_| random_crandall_instance(&mut s.fork(), &spec))
                .collect::<Result<_>>()?;
            let reports: Vec<Theorem1Report> = instances
                .par_iter()
                .map(|(sum, samples)| verify_crandall(sum, samples, exclusion, tol))
                .collect::<Result<_>>()?;
            let mut out = SuiteOutcome::empty();
            let mut worst_l = residual("max_p_laplace", f64::NEG_INFINITY, tol, None);
            let mut worst_d = residual("max_dominative", f64::NEG_INFINITY, tol, None);
            for (i, rep) in reports.into_iter().enumerate() {
                let sum = &instances[i].0;
                out.inner_pass &= rep.pass;
                out.evaluated += rep.evaluated;
                if !rep.pass {
                    out.notes.push(format!(
                        "instance {i} (n = {}, p = {}, {} poles) failed",
                        sum.dim(),
                        sum.p(),
                        sum.poles().len()
                    ));
                }
                if rep.max_p_laplace > worst_l.value {
                    worst_l.value = rep.max_p_laplace;
                    worst_l.witness = rep.max_p_laplace_at.clone();
                }
                if rep.max_dominative > worst_d.value {
                    worst_d.value = rep.max_dominative;
                    worst_d.witness = rep.max_dominative_at.clone();
                }
                out.skipped.extend(rep.skipped.into_iter().map(|mut sk| {
                    sk.reason = format!("instance {i}: {}", sk.reason);
                    sk
                }));
            }
            out.notes.push(format!("{} instances", instances.len()));
            out.residuals = vec![worst_l, worst_d];
            Ok(out)
        }
        SuiteKind::Theorem2 => {
            let concave = scenario.concave.clone().unwrap_or_else(|| ScalarField::zero(n));
            let placed: Vec<(RadialProfile, Vector)> = scenario
                .profiles
                .iter()
                .map(|pp| (pp.profile.clone(), pp.center))
                .collect();
            let samples = box_samples(s, scenario, count);
            let rep = verify_theorem2(&placed, &concave, p, &samples, exclusion, tol)?;
            let mut notes = Vec::new();
            for (i, ok) in rep.profiles_ok.iter().enumerate() {
                if !ok {
                    notes.push(format!("profiles[{i}] is not certified radially p-superharmonic"));
                }
            }
            if !rep.concave_ok {
                notes.push("concave part has a positive Hessian eigenvalue at a sample".into());
            }
            Ok(SuiteOutcome {
                inner_pass: rep.pass,
                evaluated: rep.evaluated,
                skipped: rep.skipped,
                residuals: vec![
                    residual("max_dominative", rep.max_dominative, tol, rep.witness.clone()),
                    residual("max_p_laplace", rep.max_p_laplace, tol, None),
                ],
                notes,
            })
        }
        SuiteKind::RadialEquivalence => {
            let rf = RadialFundamental::new(n, p)?;
            let radii = default_profile_radii();
            let mut out = SuiteOutcome::empty();
            for (i, pp) in scenario.profiles.iter().enumerate() {
                match verify_radial_equivalence(&pp.profile, &rf, &radii) {
                    Ok(rep) => {
                        out.evaluated += rep.smooth_samples;
                        out.inner_pass &= rep.pass;
                        out.residuals.push(residual(
                            &format!("profiles[{i}].max_dominative"),
                            rep.max_dominative,
                            tol,
                            rep.witness_radius.map(|r| vec![r]),
                        ));
                        for k in rep.kinks {
                            out.notes.push(format!(
                                "profiles[{i}] kink at r = {}: C- = {}, C+ = {}, touching {}",
                                k.radius,
                                k.c_minus,
                                k.c_plus,
                                if k.touching_ok { "ok" } else { "failed" }
                            ));
                        }
                    }
                    Err(Error::InvalidProfile(msg)) => {
                        out.inner_pass = false;
                        out.notes.push(format!("profiles[{i}]: {msg}"));
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        }
        SuiteKind::Annihilation => {
            let rf = RadialFundamental::new(n, p)?;
            let w = RadialProfile::fundamental(rf).field(Vector::zeros(n));
            let samples: Vec<Vector> = (0..count)
                .map(|_| s.point_in_shell(&Vector::zeros(n), 0.1, 10.0))
                .collect();
            let values = evaluate_samples(&samples, |x| {
                let j = w.eval_jet(x)?;
                Ok(SampleOutcome::Values(vec![
                    dominative(&j, p)?.abs(),
                    p_laplacian(&j, p).abs(),
                ]))
            })?;
            let mut d = residual("max_abs_dominative", f64::NEG_INFINITY, tol, None);
            let mut l = residual("max_abs_p_laplace", f64::NEG_INFINITY, tol, None);
            for (x, v) in samples.iter().zip(values) {
                if let SampleOutcome::Values(v) = v {
                    if v[0] > d.value {
                        d.value = v[0];
                        d.witness = Some(x.to_vec());
                    }
                    if v[1] > l.value {
                        l.value = v[1];
                        l.witness = Some(x.to_vec());
                    }
                }
            }
            let mut out = SuiteOutcome::empty();
            out.evaluated = samples.len();
            out.inner_pass = !samples.is_empty();
            out.residuals = vec![d, l];
            Ok(out)
        }
        SuiteKind::MatrixSymbol => {
            let stol = SYMBOL_TOL * tol_scale;
            let mut sub = residual("subadditivity_excess", f64::NEG_INFINITY, stol, None);
            let mut hom = residual("homogeneity_error", f64::NEG_INFINITY, stol, None);
            let mut ell = residual("ellipticity_excess", f64::NEG_INFINITY, stol, None);
            let mats: Vec<(SymMatrix, SymMatrix, SymMatrix, f64)> = (0..count)
                .map(|_| {
                    let x = s.symmetric_matrix(n);
                    let y = s.symmetric_matrix(n);
                    let m = s.matrix(n, n);
                    (x, y, SymMatrix::gram(&m), s.uniform(0.0, 10.0))
                })
                .collect();
            let values: Vec<[f64; 3]> = mats
                .par_iter()
                .map(|(x, y, mm, t)| -> Result<[f64; 3]> {
                    let fx = matrix_symbol(x, p)?;
                    let fy = matrix_symbol(y, p)?;
                    let fxy = matrix_symbol(&x.add(y), p)?;
                    let ftx = matrix_symbol(&x.scale(*t), p)?;
                    let fxm = matrix_symbol(&x.add(mm), p)?;
                    let scale = 1.0 + x.frobenius() + y.frobenius();
                    Ok([fxy - fx - fy, (ftx - t * fx).abs() / (scale * (1.0 + t)), fx - fxm])
                })
                .collect::<Result<_>>()?;
            for v in values {
                sub.value = sub.value.max(v[0]);
                hom.value = hom.value.max(v[1]);
                ell.value = ell.value.max(v[2]);
            }
            let mut out = SuiteOutcome::empty();
            out.evaluated = count;
            out.inner_pass = count > 0;
            out.residuals = vec![sub, hom, ell];
            Ok(out)
        }
    }
}

/// One row of an operator grid; `None` where the field is singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    pub values: Option<[f64; 5]>,
}

/// Evaluates value, `|∇u|`, `λ_max`, `𝓓_p u` and `Δ_p u` on a planar slice.
pub fn sample_grid(field: &ScalarField, p: PValue, grid: &GridSpec, exclusion: f64) -> Result<Vec<GridRow>> {
    let n = field.dim()?;
    validate_grid(grid, n)?;
    let base = grid.base.unwrap_or_else(|| Vector::zeros(n));
    let [nx, ny] = grid.resolution;
    let coords = |a: usize, i: usize, m: usize| grid.lo[a] + (grid.hi[a] - grid.lo[a]) * i as f64 / (m - 1) as f64;
    let cells: Vec<(f64, f64)> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| (coords(0, i, nx), coords(1, j, ny)))
        .collect();
    cells
        .par_iter()
        .map(|&(a, b)| {
            let mut x = base;
            x[grid.axes[0]] = a;
            x[grid.axes[1]] = b;
            if field.singular_distance(&x) < exclusion {
                return Ok(GridRow {
                    x: a,
                    y: b,
                    values: None,
                });
            }
            match field.eval_jet(&x) {
                Ok(j) => {
                    let lambda = crate::linalg::largest_eig(&j.hessian)?.0;
                    Ok(GridRow {
                        x: a,
                        y: b,
                        values: Some([
                            j.value,
                            j.gradient.norm(),
                            lambda,
                            dominative(&j, p)?,
                            p_laplacian(&j, p),
                        ]),
                    })
                }
                Err(Error::Singular { .. }) => Ok(GridRow {
                    x: a,
                    y: b,
                    values: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}
