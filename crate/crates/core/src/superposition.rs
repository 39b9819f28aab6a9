//! Sums of fundamental solutions and the three constructions that break
//! superposition for fields with `𝓓_p u > 0` somewhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Isometry, Jet2, ScalarField, Term};
use crate::fundsol::RadialFundamental;
use crate::linalg::{largest_eig, SymMatrix, Vector};
use crate::operators::{dominative, p_laplacian, PValue};
use crate::radial::{evaluate_samples, ProfileShape, RadialProfile, SampleOutcome, SkippedSample};
use crate::sampling::Sampler;

/// Default tolerance of the superposition checks.
pub const SUPERPOSITION_TOL: f64 = 1e-9;

/// One weighted pole `c · w_{n,p}(x - y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub c: f64,
    pub y: Vector,
}

/// `V(x) = Σ c_i w_{n,p}(x - y_i) + K(x)` with `c_i >= 0` and `K` concave.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrandallSum {
    n: usize,
    p: PValue,
    poles: Vec<Pole>,
    concave: Option<ScalarField>,
}

impl CrandallSum {
    pub fn new(n: usize, p: PValue, poles: Vec<Pole>, concave: Option<ScalarField>) -> Result<Self> {
        for (i, t) in poles.iter().enumerate() {
            if t.y.dim() != n {
                return Err(Error::Dimension(format!(
                    "pole {i} has length {}, expected {n}",
                    t.y.dim()
                )));
            }
            if !(t.c >= 0.0) || !t.c.is_finite() {
                return Err(Error::Construction(format!(
                    "pole {i} has weight {}; weights must be >= 0",
                    t.c
                )));
            }
            for (j, s) in poles[..i].iter().enumerate() {
                if s.y == t.y {
                    return Err(Error::Construction(format!("poles {j} and {i} coincide")));
                }
            }
        }
        if let Some(k) = &concave {
            let m = k.dim()?;
            if m != n {
                return Err(Error::Dimension(format!("concave part lives in ℝ^{m}, expected ℝ^{n}")));
            }
        }
        Ok(Self { n, p, poles, concave })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> PValue {
        self.p
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn concave(&self) -> Option<&ScalarField> {
        self.concave.as_ref()
    }

    /// Distance from `x` to the nearest pole with positive weight.
    pub fn pole_distance(&self, x: &Vector) -> f64 {
        self.poles
            .iter()
            .filter(|t| t.c > 0.0)
            .map(|t| x.sub(&t.y).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Sum of the term jets; refuses points within `exclusion` of a pole.
    pub fn jet(&self, x: &Vector, exclusion: f64) -> Result<Jet2> {
        if x.dim() != self.n {
            return Err(Error::Dimension(format!(
                "point has length {}, expected {}",
                x.dim(),
                self.n
            )));
        }
        let d = self.pole_distance(x);
        if d <= exclusion {
            return Err(Error::Singular {
                term: format!("within {d:e} of a pole"),
                point: x.to_vec(),
            });
        }
        self.to_field().eval_jet(x)
    }

    pub fn to_field(&self) -> ScalarField {
        let rf = RadialFundamental { n: self.n, p: self.p };
        let mut terms: Vec<Term> = self
            .poles
            .iter()
            .map(|t| Term {
                coef: t.c,
                field: RadialProfile::fundamental(rf).field(t.y),
            })
            .collect();
        terms.push(Term {
            coef: 1.0,
            field: self.concave.clone().unwrap_or_else(|| ScalarField::zero(self.n)),
        });
        ScalarField::WeightedSum { terms }
    }

    /// The individually certified summands: each weighted pole and the concave part.
    pub fn summands(&self) -> Vec<ScalarField> {
        let rf = RadialFundamental { n: self.n, p: self.p };
        let mut out: Vec<ScalarField> = self
            .poles
            .iter()
            .map(|t| {
                let profile = RadialProfile::new(ProfileShape::Fundamental {
                    rf,
                    scale: t.c,
                    shift: 0.0,
                })
                .expect("weights validated");
                profile.field(t.y)
            })
            .collect();
        if let Some(k) = &self.concave {
            out.push(k.clone());
        }
        out
    }
}

/// Parameters of a random Crandall sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCrandallSpec {
    pub instances: usize,
    pub max_terms: usize,
    pub dims: Vec<usize>,
    pub p_values: Vec<PValue>,
    #[serde(default = "default_true")]
    pub concave: bool,
    pub samples_per_instance: usize,
    /// Poles are drawn in `[-pole_box, pole_box]ⁿ`, samples in twice that box.
    #[serde(default = "default_pole_box")]
    pub pole_box: f64,
}

fn default_true() -> bool {
    true
}

fn default_pole_box() -> f64 {
    1.0
}

impl Default for RandomCrandallSpec {
    fn default() -> Self {
        Self {
            instances: 50,
            max_terms: 5,
            dims: vec![2, 3],
            p_values: vec![
                PValue::Finite(2.0),
                PValue::Finite(3.0),
                PValue::Finite(4.0),
                PValue::Finite(10.0),
                PValue::Infinity,
            ],
            concave: true,
            samples_per_instance: 500,
            pole_box: 1.0,
        }
    }
}

/// Random concave quadratic `-½xᵀMMᵀx + b·x`.
pub fn random_concave_quadratic(s: &mut Sampler, n: usize, scale: f64) -> ScalarField {
    let m = s.matrix(n, n);
    let a = SymMatrix::gram(&m).scale(-scale);
    ScalarField::Quadratic {
        a,
        b: s.vector_in_box(n, -1.0, 1.0),
        c: 0.0,
    }
}

/// Draws one Crandall sum and its sample points.
pub fn random_crandall_instance(s: &mut Sampler, spec: &RandomCrandallSpec) -> Result<(CrandallSum, Vec<Vector>)> {
    if spec.dims.is_empty() || spec.p_values.is_empty() || spec.max_terms == 0 {
        return Err(Error::Construction(
            "random Crandall spec needs dims, p values and max_terms >= 1".into(),
        ));
    }
    let n = spec.dims[s.index(spec.dims.len())];
    let p = spec.p_values[s.index(spec.p_values.len())];
    let count = s.int_in(1, spec.max_terms);
    let poles: Vec<Pole> = (0..count)
        .map(|_| Pole {
            c: s.uniform(0.1, 2.0),
            y: s.vector_in_box(n, -spec.pole_box, spec.pole_box),
        })
        .collect();
    let concave = if spec.concave {
        let scale = s.uniform(0.0, 1.0);
        Some(random_concave_quadratic(s, n, scale))
    } else {
        None
    };
    let sum = CrandallSum::new(n, p, poles, concave)?;
    let half = 2.0 * spec.pole_box;
    let samples = (0..spec.samples_per_instance)
        .map(|_| s.vector_in_box(n, -half, half))
        .collect();
    Ok((sum, samples))
}

/// A field whose `𝓓_p` is positive at a sample, so the precondition fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionViolation {
    pub field: usize,
    pub point: Vec<f64>,
    pub dominative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub pass: bool,
    pub tolerance: f64,
    pub evaluated: usize,
    pub skipped: Vec<SkippedSample>,
    pub max_p_laplace: f64,
    pub max_p_laplace_at: Option<Vec<f64>>,
    pub max_dominative: f64,
    pub max_dominative_at: Option<Vec<f64>>,
    pub precondition_violations: Vec<PreconditionViolation>,
}

/// Checks `Δ_p(Σ u_i) ≤ tol` and `𝓓_p(Σ u_i) ≤ tol` on the samples, after
/// checking `𝓓_p u_i ≤ tol` for every summand. Samples within `exclusion` of
/// a singular set, or where a summand is singular, are skipped and listed.
pub fn verify_theorem1_i(
    fields: &[ScalarField],
    samples: &[Vector],
    p: PValue,
    exclusion: f64,
    tol: f64,
) -> Result<Theorem1Report> {
    let sum = ScalarField::sum(
        fields
            .iter()
            .map(|f| Term {
                coef: 1.0,
                field: f.clone(),
            })
            .collect(),
    )?;
    let outcomes = evaluate_samples(samples, |x| {
        if sum.singular_distance(x) < exclusion {
            return Ok(SampleOutcome::Skipped(
                "within exclusion radius of a singular set".into(),
            ));
        }
        let mut total = Jet2::constant(x.dim(), 0.0);
        let mut values = Vec::with_capacity(fields.len() + 2);
        for f in fields {
            let j = match f.eval_jet(x) {
                Ok(j) => j,
                Err(Error::Singular { term, .. }) => return Ok(SampleOutcome::Skipped(term)),
                Err(e) => return Err(e),
            };
            values.push(dominative(&j, p)?);
            total = total.add(&j);
        }
        values.push(p_laplacian(&total, p));
        values.push(dominative(&total, p)?);
        Ok(SampleOutcome::Values(values))
    })?;

    let mut report = Theorem1Report {
        pass: false,
        tolerance: tol,
        evaluated: 0,
        skipped: Vec::new(),
        max_p_laplace: f64::NEG_INFINITY,
        max_p_laplace_at: None,
        max_dominative: f64::NEG_INFINITY,
        max_dominative_at: None,
        precondition_violations: Vec::new(),
    };
    let m = fields.len();
    for (x, out) in samples.iter().zip(outcomes) {
        match out {
            SampleOutcome::Skipped(reason) => report.skipped.push(SkippedSample {
                point: x.to_vec(),
                reason,
            }),
            SampleOutcome::Values(v) => {
                report.evaluated += 1;
                for (i, &d) in v[..m].iter().enumerate() {
                    if d > tol {
                        report.precondition_violations.push(PreconditionViolation {
                            field: i,
                            point: x.to_vec(),
                            dominative: d,
                        });
                    }
                }
                if v[m] > report.max_p_laplace {
                    report.max_p_laplace = v[m];
                    report.max_p_laplace_at = Some(x.to_vec());
                }
                if v[m + 1] > report.max_dominative {
                    report.max_dominative = v[m + 1];
                    report.max_dominative_at = Some(x.to_vec());
                }
            }
        }
    }
    report.pass = report.evaluated > 0
        && report.precondition_violations.is_empty()
        && report.max_p_laplace <= tol
        && report.max_dominative <= tol;
    Ok(report)
}

/// Runs [`verify_theorem1_i`] on the summands of a Crandall sum, also
/// checking that the concave part has `λ_max ≤ 10⁻¹²` at every sample.
pub fn verify_crandall(sum: &CrandallSum, samples: &[Vector], exclusion: f64, tol: f64) -> Result<Theorem1Report> {
    let mut report = verify_theorem1_i(&sum.summands(), samples, sum.p(), exclusion, tol)?;
    if let Some(k) = sum.concave() {
        let idx = sum.poles().len();
        let mut concave_ok = true;
        for x in samples {
            let top = largest_eig(&k.eval_jet(x)?.hessian)?.0;
            if top > 1e-12 {
                concave_ok = false;
                report.precondition_violations.push(PreconditionViolation {
                    field: idx,
                    point: x.to_vec(),
                    dominative: top,
                });
                break;
            }
        }
        report.pass &= concave_ok;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleKind {
    Linear,
    Fundsol,
    Reflection,
}

impl std::str::FromStr for CounterexampleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "fundsol" => Ok(Self::Fundsol),
            "reflection" => Ok(Self::Reflection),
            other => Err(Error::Construction(format!("unknown counterexample kind {other:?}"))),
        }
    }
}

/// One step of the far-pole scale search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleStep {
    pub s: f64,
    pub residual: f64,
    pub normalized_witness: f64,
}

/// Construction-specific data of a counterexample.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
#[allow(clippy::large_enum_variant)]
pub enum Construction {
    Linear {
        a: Vector,
    },
    Fundsol {
        s: f64,
        pole: Vector,
        weight: f64,
        z: Vector,
        residual: f64,
        search: Vec<ScaleStep>,
        residual_trace: Vec<ScaleStep>,
    },
    Reflection {
        direction: Vector,
        isometry: Isometry,
        /// `direct` when `∇u(x₀)·ξ` is not negligible, else `line-scan`.
        branch: String,
        t: Option<f64>,
        scanned: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub p: PValue,
    pub base_point: Vector,
    /// `𝓓_p u(x₀)`
    pub dominative_at_base: f64,
    /// Top Hessian eigenvector `ξ_u` at the base point.
    pub xi: Vector,
    pub perturbation: ScalarField,
    pub witness_point: Vector,
    /// `Δ_p(u + v)` at the witness point, from the closed form of the construction.
    pub witness_value: f64,
    /// `witness_value / |∇(u + v)|^{α_p}`
    pub normalized_witness: f64,
    pub construction: Construction,
}

impl Counterexample {
    /// `u + v` as a field.
    pub fn perturbed_sum(&self, u: &ScalarField) -> ScalarField {
        ScalarField::WeightedSum {
            terms: vec![
                Term {
                    coef: 1.0,
                    field: u.clone(),
                },
                Term {
                    coef: 1.0,
                    field: self.perturbation.clone(),
                },
            ],
        }
    }

    /// `Δ_p(u + v)` at the witness point, evaluated from the jet of the sum.
    pub fn recompute_witness(&self, u: &ScalarField) -> Result<f64> {
        Ok(p_laplacian(
            &self.perturbed_sum(u).eval_jet(&self.witness_point)?,
            self.p,
        ))
    }
}

/// `α_p`: `p - 2` for finite `p`, `2` for `p = ∞`.
fn alpha(p: PValue) -> f64 {
    p.gradient_power()
}

struct Base {
    jet: Jet2,
    d: f64,
    xi: Vector,
}

fn base(u: &ScalarField, x0: &Vector, p: PValue) -> Result<Base> {
    let jet = u.eval_jet(x0)?;
    let d = dominative(&jet, p)?;
    if !(d > 0.0) {
        return Err(Error::Precondition(format!(
            "𝓓_p u(x₀) = {d:e} is not positive; no counterexample exists here"
        )));
    }
    let (_, xi) = largest_eig(&jet.hessian)?;
    Ok(Base { jet, d, xi })
}

/// Adds the affine field `(ξ_u - ∇u(x₀))·x`, turning the gradient at `x₀` into `ξ_u`.
pub fn counterexample_linear(u: &ScalarField, x0: &Vector, p: PValue) -> Result<Counterexample> {
    let b = base(u, x0, p)?;
    let a = b.xi.sub(&b.jet.gradient);
    Ok(Counterexample {
        kind: CounterexampleKind::Linear,
        p,
        base_point: *x0,
        dominative_at_base: b.d,
        xi: b.xi,
        perturbation: ScalarField::affine(a, 0.0),
        witness_point: *x0,
        witness_value: b.d,
        normalized_witness: b.d,
        construction: Construction::Linear { a },
    })
}

/// `ρ(s)` for the far pole at `z = ∇u(x₀) - sξ`.
fn fundsol_residual(z: &Vector, xi: &Vector, n: usize, p: PValue) -> f64 {
    let cos2 = z.dot(xi).powi(2) / z.norm_sq();
    match p {
        PValue::Finite(p) => (p - 2.0) * (n as f64 + p - 2.0) / (p - 1.0) * (cos2 - 1.0),
        PValue::Infinity => cos2 - 1.0,
    }
}

fn fundsol_step(b: &Base, n: usize, p: PValue, s: f64) -> ScaleStep {
    let z = b.jet.gradient.axpy(-s, &b.xi);
    let residual = fundsol_residual(&z, &b.xi, n, p);
    ScaleStep {
        s,
        residual,
        normalized_witness: b.d + residual,
    }
}

/// Residuals `ρ(2^j)` for `j = 0..=20`.
pub fn fundsol_residual_trace(u: &ScalarField, x0: &Vector, p: PValue) -> Result<Vec<ScaleStep>> {
    let b = base(u, x0, p)?;
    Ok(fundsol_trace(&b, x0.dim(), p))
}

fn fundsol_trace(b: &Base, n: usize, p: PValue) -> Vec<ScaleStep> {
    (0..=20).map(|j| fundsol_step(b, n, p, 2f64.powi(j))).collect()
}

/// Smallest scale tried by the far-pole search, and its cap.
pub const SCALE_START: f64 = 8.0;
pub const SCALE_CAP: f64 = 1_099_511_627_776.0; // 2^40

/// Adds `c_s w_{n,p}(x - y_s)` with its pole far away along `ξ_u`, so that
/// `∇(u + f_s)(x₀) = sξ_u`. With `s = None` the scale doubles from 8 until
/// the witness is positive.
pub fn counterexample_fundsol(u: &ScalarField, x0: &Vector, p: PValue, s: Option<f64>) -> Result<Counterexample> {
    let b = base(u, x0, p)?;
    let n = x0.dim();
    let mut search = Vec::new();
    let s = match s {
        Some(s) => {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Domain(format!("scale s must be positive, got {s}")));
            }
            let step = fundsol_step(&b, n, p, s);
            search.push(step);
            if !(step.normalized_witness > 0.0) {
                return Err(Error::NeedsLargerScale { s });
            }
            s
        }
        None => {
            let mut s = SCALE_START;
            loop {
                let step = fundsol_step(&b, n, p, s);
                search.push(step);
                if step.normalized_witness > 0.0 {
                    break s;
                }
                if s >= SCALE_CAP {
                    return Err(Error::NeedsLargerScale { s });
                }
                s *= 2.0;
            }
        }
    };
    let z = b.jet.gradient.axpy(-s, &b.xi);
    let pole = x0.sub(&z);
    let rf = RadialFundamental::new(n, p)?;
    let rz = z.norm();
    let weight = -rz / rf.d1(rz)?;
    let residual = fundsol_residual(&z, &b.xi, n, p);
    let normalized = b.d + residual;
    let profile = RadialProfile::new(ProfileShape::Fundamental {
        rf,
        scale: weight,
        shift: 0.0,
    })?;
    Ok(Counterexample {
        kind: CounterexampleKind::Fundsol,
        p,
        base_point: *x0,
        dominative_at_base: b.d,
        xi: b.xi,
        perturbation: profile.field(pole),
        witness_point: *x0,
        witness_value: s.powf(alpha(p)) * normalized,
        normalized_witness: normalized,
        construction: Construction::Fundsol {
            s,
            pole,
            weight,
            z,
            residual,
            search,
            residual_trace: fundsol_trace(&b, n, p),
        },
    })
}

/// Number of radii tried along the line by the reflection construction.
pub const LINE_SCAN_POINTS: usize = 64;
/// Decades covered by the line scan below `eps`.
const LINE_SCAN_DECADES: f64 = 6.0;
pub const DEFAULT_EPS: f64 = 1e-2;

/// Adds `u ∘ T` for the reflection `T` about the line `x₀ + ℝξ_u`; on that
/// line the gradient of the sum is parallel to `ξ_u`. When `∇u(x₀)·ξ_u = 0`
/// the witness is searched on `x₀ + tξ_u`, `t ∈ (0, eps]`.
pub fn counterexample_reflection(u: &ScalarField, x0: &Vector, p: PValue, eps: f64) -> Result<Counterexample> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let b = base(u, x0, p)?;
    let iso = Isometry::reflection_about_line_through(&b.xi, x0)?;
    let perturbation = ScalarField::reflected(u.clone(), iso)?;
    let witness_on_line = |j: &Jet2| -> Option<(f64, f64)> {
        let g = j.gradient.dot(&b.xi);
        let quad = j.hessian.quad_form(&b.xi);
        // Δ_p V with ∇V = 2(∇u·ξ)ξ and ξᵀ𝓗Vξ = 2ξᵀ𝓗uξ, tr 𝓗V = 2Δu
        let (bracket, value) = match p {
            PValue::Finite(pf) => {
                let bracket = (pf - 2.0) * quad + j.hessian.trace();
                (bracket, 2.0 * (2.0 * g.abs()).powf(pf - 2.0) * bracket)
            }
            PValue::Infinity => (quad, 8.0 * g * g * quad),
        };
        (g != 0.0 && bracket > 0.0 && value > 0.0).then_some((value, bracket))
    };
    let g0 = b.jet.gradient.dot(&b.xi);
    let mut construction = Construction::Reflection {
        direction: b.xi,
        isometry: iso,
        branch: "direct".into(),
        t: None,
        scanned: 0,
    };
    // a round-off sized ∇u·ξ would give a witness of no practical size
    let (witness_point, witness_value, normalized) = if g0.abs() > 1e-8 * (1.0 + b.jet.gradient.norm()) {
        let value = 2f64.powf(alpha(p) + 1.0) * g0.abs().powf(alpha(p)) * b.d;
        (*x0, value, value / (2.0 * g0.abs()).powf(alpha(p)))
    } else {
        let mut found = None;
        let mut scanned = 0;
        for i in 0..LINE_SCAN_POINTS {
            let t = eps * 10f64.powf(-LINE_SCAN_DECADES * i as f64 / (LINE_SCAN_POINTS - 1) as f64);
            scanned += 1;
            let x = x0.axpy(t, &b.xi);
            let j = match u.eval_jet(&x) {
                Ok(j) => j,
                Err(Error::Singular { .. }) => continue,
                Err(e) => return Err(e),
            };
            if let Some((value, _)) = witness_on_line(&j) {
                let g = j.gradient.dot(&b.xi);
                found = Some((t, x, value, value / (2.0 * g.abs()).powf(alpha(p))));
                break;
            }
        }
        let (t, x, value, normalized) = found.ok_or(Error::NeedsSmallerStep { eps })?;
        construction = Construction::Reflection {
            direction: b.xi,
            isometry: iso,
            branch: "line-scan".into(),
            t: Some(t),
            scanned,
        };
        (x, value, normalized)
    };
    Ok(Counterexample {
        kind: CounterexampleKind::Reflection,
        p,
        base_point: *x0,
        dominative_at_base: b.d,
        xi: b.xi,
        perturbation,
        witness_point,
        witness_value,
        normalized_witness: normalized,
        construction,
    })
}

/// Dispatches on `kind` with the default scan parameters.
pub fn counterexample(
    kind: CounterexampleKind,
    u: &ScalarField,
    x0: &Vector,
    p: PValue,
    s: Option<f64>,
    eps: Option<f64>,
) -> Result<Counterexample> {
    match kind {
        CounterexampleKind::Linear => counterexample_linear(u, x0, p),
        CounterexampleKind::Fundsol => counterexample_fundsol(u, x0, p, s),
        CounterexampleKind::Reflection => counterexample_reflection(u, x0, p, eps.unwrap_or(DEFAULT_EPS)),
    }
}
