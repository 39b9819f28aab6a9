//! Radial profiles `u(x) = U(|x|)` and the chord machinery used to certify
//! them: chord constants `C_ab`, the scaled fundamental chords `H_ab`,
//! one-sided limits `C_b^±`, and fundamental solutions touching from above.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ScalarField, Term};
use crate::fundsol::{Branch, CylFundamental, RadialFundamental};
use crate::linalg::{largest_eig, Vector};
use crate::operators::{dominative, dominative_profile, p_laplacian, PValue};

/// Relative distance below which a radius counts as a kink.
pub const KINK_RTOL: f64 = 1e-12;

/// One-variable profile shapes with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileShape {
    /// `scale · W(r) + shift`, `scale >= 0`
    Fundamental {
        rf: RadialFundamental,
        scale: f64,
        shift: f64,
    },
    /// `min{W(r), level}`
    TruncatedFundamental {
        rf: RadialFundamental,
        level: f64,
    },
    /// `min{a₁W + b₁, a₂W + b₂}` with `a₁, a₂ >= 0`
    MinPair {
        rf: RadialFundamental,
        first: [f64; 2],
        second: [f64; 2],
    },
    /// `Σ coeffs[i] · rⁱ`
    ConcavePoly {
        coeffs: Vec<f64>,
    },
    Constant {
        value: f64,
    },
    /// `-scale · ln(1 + r)`
    NegLog1p {
        scale: f64,
    },
}

/// A radial profile together with the radii where it fails to be C².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDef", into = "ProfileDef")]
pub struct RadialProfile {
    shape: ProfileShape,
    kinks: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProfileDef {
    #[serde(flatten)]
    shape: ProfileShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kink_radii: Option<Vec<f64>>,
}

impl TryFrom<ProfileDef> for RadialProfile {
    type Error = Error;
    fn try_from(d: ProfileDef) -> Result<Self> {
        let profile = RadialProfile::new(d.shape)?;
        if let Some(declared) = d.kink_radii {
            let same = declared.len() == profile.kinks.len()
                && declared
                    .iter()
                    .zip(&profile.kinks)
                    .all(|(a, b)| (a - b).abs() <= 1e-9 * b.max(1.0));
            if !same {
                return Err(Error::InvalidProfile(format!(
                    "declared kink radii {declared:?} do not match the parameters (expected {:?})",
                    profile.kinks
                )));
            }
        }
        Ok(profile)
    }
}

impl From<RadialProfile> for ProfileDef {
    fn from(p: RadialProfile) -> Self {
        Self {
            kink_radii: Some(p.kinks),
            shape: p.shape,
        }
    }
}

/// Value of `a·W + b` as `W → +∞`.
fn line_at_pole(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        b
    } else {
        f64::INFINITY
    }
}

/// `W(0)`, possibly `+∞`.
fn fundamental_at_origin(rf: &RadialFundamental) -> f64 {
    match rf.branch() {
        Branch::Linear => 0.0,
        Branch::Log => f64::INFINITY,
        Branch::Power => match rf.p {
            PValue::Finite(p) if p > rf.n as f64 => 0.0,
            _ => f64::INFINITY,
        },
    }
}

impl RadialProfile {
    pub fn new(shape: ProfileShape) -> Result<Self> {
        let kinks = match &shape {
            ProfileShape::Fundamental { scale, shift, .. } => {
                if !(*scale >= 0.0) || !shift.is_finite() || !scale.is_finite() {
                    return Err(Error::InvalidProfile(format!(
                        "fundamental needs finite scale >= 0, got {scale}"
                    )));
                }
                vec![]
            }
            ProfileShape::TruncatedFundamental { rf, level } => {
                if !level.is_finite() {
                    return Err(Error::InvalidProfile("truncation level must be finite".into()));
                }
                rf.inverse(*level).into_iter().collect()
            }
            ProfileShape::MinPair { rf, first, second } => {
                if first.iter().chain(second).any(|x| !x.is_finite()) || first[0] < 0.0 || second[0] < 0.0 {
                    return Err(Error::InvalidProfile(
                        "min-pair needs finite coefficients with scales >= 0".into(),
                    ));
                }
                if first[0] == second[0] {
                    vec![]
                } else {
                    rf.inverse((second[1] - first[1]) / (first[0] - second[0]))
                        .into_iter()
                        .collect()
                }
            }
            ProfileShape::ConcavePoly { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidProfile("polynomial needs finite coefficients".into()));
                }
                vec![]
            }
            ProfileShape::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidProfile("constant must be finite".into()));
                }
                vec![]
            }
            ProfileShape::NegLog1p { scale } => {
                if !scale.is_finite() {
                    return Err(Error::InvalidProfile("scale must be finite".into()));
                }
                vec![]
            }
        };
        Ok(Self { shape, kinks })
    }

    pub fn fundamental(rf: RadialFundamental) -> Self {
        Self::new(ProfileShape::Fundamental {
            rf,
            scale: 1.0,
            shift: 0.0,
        })
        .expect("unit fundamental is valid")
    }

    pub fn truncated(rf: RadialFundamental, level: f64) -> Result<Self> {
        Self::new(ProfileShape::TruncatedFundamental { rf, level })
    }

    pub fn min_pair(rf: RadialFundamental, first: [f64; 2], second: [f64; 2]) -> Result<Self> {
        Self::new(ProfileShape::MinPair { rf, first, second })
    }

    pub fn poly(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(ProfileShape::ConcavePoly { coeffs })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(ProfileShape::Constant { value })
    }

    pub fn neg_log1p(scale: f64) -> Result<Self> {
        Self::new(ProfileShape::NegLog1p { scale })
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    /// Sorted radii where the profile is not C².
    pub fn kink_radii(&self) -> &[f64] {
        &self.kinks
    }

    /// The fundamental solution the profile is built from, if any.
    pub fn fundamental_solution(&self) -> Option<&RadialFundamental> {
        match &self.shape {
            ProfileShape::Fundamental { rf, .. }
            | ProfileShape::TruncatedFundamental { rf, .. }
            | ProfileShape::MinPair { rf, .. } => Some(rf),
            _ => None,
        }
    }

    pub fn is_kink(&self, r: f64) -> bool {
        self.kinks.iter().any(|&k| (r - k).abs() <= KINK_RTOL * k.max(1.0))
    }

    /// `U(r)` for `r >= 0`; `+∞` only at a pole in the origin.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("profile evaluated at radius {r}")));
        }
        if r == 0.0 {
            return Ok(self.value_at_origin());
        }
        Ok(match &self.shape {
            ProfileShape::Fundamental { rf, scale, shift } => scale * rf.value(r)? + shift,
            ProfileShape::TruncatedFundamental { rf, level } => rf.value(r)?.min(*level),
            ProfileShape::MinPair { rf, first, second } => {
                let w = rf.value(r)?;
                (first[0] * w + first[1]).min(second[0] * w + second[1])
            }
            ProfileShape::ConcavePoly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c),
            ProfileShape::Constant { value } => *value,
            ProfileShape::NegLog1p { scale } => -scale * r.ln_1p(),
        })
    }

    fn value_at_origin(&self) -> f64 {
        match &self.shape {
            ProfileShape::Fundamental { rf, scale, shift } => {
                if *scale == 0.0 {
                    *shift
                } else {
                    scale * fundamental_at_origin(rf) + shift
                }
            }
            ProfileShape::TruncatedFundamental { rf, level } => fundamental_at_origin(rf).min(*level),
            ProfileShape::MinPair { rf, first, second } => {
                let w0 = fundamental_at_origin(rf);
                if w0.is_infinite() {
                    line_at_pole(first[0], first[1]).min(line_at_pole(second[0], second[1]))
                } else {
                    (first[0] * w0 + first[1]).min(second[0] * w0 + second[1])
                }
            }
            ProfileShape::ConcavePoly { coeffs } => coeffs[0],
            ProfileShape::Constant { value } => *value,
            ProfileShape::NegLog1p { .. } => 0.0,
        }
    }

    /// `U''(0)` when `U(|x|)` is C² at the origin (it is then `U''(0)·I` there).
    pub fn origin_second_derivative(&self) -> Option<f64> {
        match &self.shape {
            ProfileShape::Fundamental { scale, .. } => (*scale == 0.0).then_some(0.0),
            ProfileShape::TruncatedFundamental { rf, level } => (fundamental_at_origin(rf) > *level).then_some(0.0),
            ProfileShape::MinPair { rf, first, second } => {
                // the piece that is strictly smaller near the origin must be flat
                let w0 = fundamental_at_origin(rf);
                let (v1, v2) = if w0.is_infinite() {
                    let s1 = if first[0] == second[0] { first[1] } else { first[0] };
                    let s2 = if first[0] == second[0] { second[1] } else { second[0] };
                    (s1, s2)
                } else {
                    (first[0] * w0 + first[1], second[0] * w0 + second[1])
                };
                let active = if v1 < v2 {
                    first
                } else if v2 < v1 {
                    second
                } else {
                    return None;
                };
                (active[0] == 0.0).then_some(0.0)
            }
            ProfileShape::ConcavePoly { coeffs } => {
                let c1 = coeffs.get(1).copied().unwrap_or(0.0);
                (c1 == 0.0).then(|| 2.0 * coeffs.get(2).copied().unwrap_or(0.0))
            }
            ProfileShape::Constant { .. } => Some(0.0),
            ProfileShape::NegLog1p { scale } => (*scale == 0.0).then_some(0.0),
        }
    }

    fn kink_error(&self, r: f64) -> Error {
        Error::Singular {
            term: format!("radial profile kink at r = {r}"),
            point: vec![r],
        }
    }

    /// `(U'(r), U''(r))` for `r > 0` away from kinks.
    pub fn derivatives(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("profile derivatives need r > 0, got {r}")));
        }
        if self.is_kink(r) {
            return Err(self.kink_error(r));
        }
        Ok(match &self.shape {
            ProfileShape::Fundamental { rf, scale, .. } => (scale * rf.d1(r)?, scale * rf.d2(r)?),
            ProfileShape::TruncatedFundamental { rf, level } => {
                if rf.value(r)? < *level {
                    (rf.d1(r)?, rf.d2(r)?)
                } else {
                    (0.0, 0.0)
                }
            }
            ProfileShape::MinPair { rf, first, second } => {
                let w = rf.value(r)?;
                let a = if first[0] * w + first[1] <= second[0] * w + second[1] {
                    first[0]
                } else {
                    second[0]
                };
                (a * rf.d1(r)?, a * rf.d2(r)?)
            }
            ProfileShape::ConcavePoly { coeffs } => {
                let mut d1 = 0.0;
                let mut d2 = 0.0;
                for (i, c) in coeffs.iter().enumerate().skip(1) {
                    let fi = i as f64;
                    d1 += fi * c * r.powi(i as i32 - 1);
                    if i >= 2 {
                        d2 += fi * (fi - 1.0) * c * r.powi(i as i32 - 2);
                    }
                }
                (d1, d2)
            }
            ProfileShape::Constant { .. } => (0.0, 0.0),
            ProfileShape::NegLog1p { scale } => (-scale / (1.0 + r), scale / ((1.0 + r) * (1.0 + r))),
        })
    }

    /// Checks the standing hypotheses on a radial p-superharmonic profile:
    /// non-increasing, finite on `(0, ∞)`, and lower semicontinuous at kinks
    /// and at the origin.
    pub fn validate(&self) -> Result<()> {
        let radii = log_radii(1e-3, 1e3, 400);
        let mut prev: Option<(f64, f64)> = None;
        for &r in &radii {
            let u = self.value(r)?;
            if !u.is_finite() {
                return Err(Error::InvalidProfile(format!("U({r}) is not finite")));
            }
            if let Some((ra, ua)) = prev {
                if u > ua + 1e-12 * (1.0 + ua.abs()) {
                    return Err(Error::InvalidProfile(format!(
                        "profile must be non-increasing: U({ra}) = {ua} < U({r}) = {u}"
                    )));
                }
            }
            prev = Some((r, u));
        }
        for &k in &self.kinks {
            let u = self.value(k)?;
            let nearby = self.value(k * (1.0 - 1e-9))?.min(self.value(k * (1.0 + 1e-9))?);
            if u > nearby + 1e-6 * (1.0 + u.abs()) {
                return Err(Error::InvalidProfile(format!(
                    "not lower semicontinuous at kink r = {k}"
                )));
            }
        }
        let u0 = self.value(0.0)?;
        if u0.is_finite() {
            // power branches converge slowly, so probe far inside
            let near = self.value(1e-300)?;
            if u0 > near + 1e-6 * (1.0 + u0.abs()) {
                return Err(Error::InvalidProfile("not lower semicontinuous at the origin".into()));
            }
        }
        Ok(())
    }

    /// The field `U(|x - center|)`.
    pub fn field(&self, center: Vector) -> ScalarField {
        ScalarField::Radial {
            profile: self.clone(),
            center,
        }
    }
}

/// Log-spaced radii in `[lo, hi]`.
pub fn log_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn finite_value(u: &RadialProfile, r: f64) -> Result<f64> {
    let v = u.value(r)?;
    if v.is_infinite() {
        return Err(Error::Singular {
            term: format!("radial profile pole at r = {r}"),
            point: vec![r],
        });
    }
    Ok(v)
}

/// `C_ab = (U(a) - U(b)) / (W(a) - W(b))`.
pub fn chord_constant(u: &RadialProfile, a: f64, b: f64, rf: &RadialFundamental) -> Result<f64> {
    if !(a > 0.0 && a < b) {
        return Err(Error::Domain(format!("chord needs 0 < a < b, got a = {a}, b = {b}")));
    }
    let (ua, ub) = (finite_value(u, a)?, finite_value(u, b)?);
    Ok((ua - ub) / (rf.value(a)? - rf.value(b)?))
}

/// Rough bound on the rounding error of a computed chord constant.
fn chord_noise(u: &RadialProfile, a: f64, b: f64, c: f64, rf: &RadialFundamental) -> Result<f64> {
    let (ua, ub) = (u.value(a)?, u.value(b)?);
    let (wa, wb) = (rf.value(a)?, rf.value(b)?);
    let eps = f64::EPSILON;
    Ok(4.0 * eps * (ua.abs() + ub.abs() + c.abs() * (wa.abs() + wb.abs())) / (wa - wb).abs())
}

/// The chord `H_ab(r) = C_ab [W(r) - W(b)] + U(b)` through `(a, U(a))` and `(b, U(b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordData {
    pub a: f64,
    pub b: f64,
    pub c_ab: f64,
    pub u_b: f64,
    pub w_b: f64,
    pub rf: RadialFundamental,
}

impl ChordData {
    pub fn eval(&self, r: f64) -> Result<f64> {
        Ok(self.c_ab * (self.rf.value(r)? - self.w_b) + self.u_b)
    }

    /// Largest `H_ab - U` inside `(a, b)` and largest `U - H_ab` outside,
    /// over `samples` radii on each side.
    pub fn comparison_excess(&self, u: &RadialProfile, samples: usize) -> Result<(f64, f64)> {
        let mut inside = f64::NEG_INFINITY;
        for i in 1..=samples {
            let r = self.a + (self.b - self.a) * i as f64 / (samples + 1) as f64;
            inside = inside.max(self.eval(r)? - u.value(r)?);
        }
        let mut outside = f64::NEG_INFINITY;
        let lower = log_radii(self.a * 1e-2, self.a, samples.max(2));
        let upper = log_radii(self.b, self.b * 1e2, samples.max(2));
        for &r in lower.iter().chain(&upper) {
            let ur = u.value(r)?;
            if ur.is_finite() {
                outside = outside.max(ur - self.eval(r)?);
            }
        }
        Ok((inside, outside))
    }
}

pub fn chord_profile(u: &RadialProfile, a: f64, b: f64, rf: &RadialFundamental) -> Result<ChordData> {
    let c_ab = chord_constant(u, a, b, rf)?;
    Ok(ChordData {
        a,
        b,
        c_ab,
        u_b: u.value(b)?,
        w_b: rf.value(b)?,
        rf: *rf,
    })
}

/// Estimates of `C_b^- = lim_{a→b⁻} C_ab` and `C_b^+ = lim_{c→b⁺} C_bc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneSidedLimits {
    pub c_minus: f64,
    pub c_plus: f64,
    /// Last inner radius `a_j` used for `C_b^-`.
    pub a_last: f64,
    /// Last outer radius `c_j` used for `C_b^+`.
    pub c_last: f64,
}

const CAUCHY_TOL: f64 = 1e-8;
const CAUCHY_RUN: usize = 3;
const NOISE_CAP: f64 = 1e-7;
const REFINEMENTS: i32 = 40;

/// Follows `r_j = b(1 + side·2^{-j})` and returns the stabilized chord
/// constant, checking that the sequence moves monotonically. The last two
/// terms are combined by one Richardson step, since the error is linear in
/// `2^{-j}` for profiles that are smooth on that side.
fn one_sided(u: &RadialProfile, b: f64, rf: &RadialFundamental, side: f64) -> Result<(f64, f64)> {
    let chord = |r: f64| -> Result<(f64, f64)> {
        let (lo, hi) = if r < b { (r, b) } else { (b, r) };
        let c = chord_constant(u, lo, hi, rf)?;
        Ok((c, chord_noise(u, lo, hi, c, rf)?))
    };
    let mut r_prev = b * (1.0 + side * 0.5);
    let (mut c_prev, mut noise_prev) = chord(r_prev)?;
    let mut c_older = c_prev;
    let mut run = 0;
    for j in 2..=REFINEMENTS {
        let r = b * (1.0 + side * 0.5f64.powi(j));
        let (c, noise) = chord(r)?;
        if noise > NOISE_CAP {
            break;
        }
        // inner chords grow as a ↑ b, outer chords shrink as c ↓ b
        let drift = side * (c - c_prev);
        if drift > 1e-10 + noise + noise_prev {
            return Err(Error::InvalidProfile(format!(
                "chord constants not monotone near b = {b} (C = {c_prev} then {c}); the profile is not radially p-superharmonic"
            )));
        }
        if (c - c_prev).abs() < CAUCHY_TOL {
            run += 1;
        } else {
            run = 0;
        }
        r_prev = r;
        c_older = c_prev;
        c_prev = c;
        noise_prev = noise;
        if run >= CAUCHY_RUN {
            break;
        }
    }
    Ok((2.0 * c_prev - c_older, r_prev))
}

pub fn one_sided_chord_limits(u: &RadialProfile, b: f64, rf: &RadialFundamental) -> Result<OneSidedLimits> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("one-sided limits need b > 0, got {b}")));
    }
    finite_value(u, b)?;
    let (c_minus, a_last) = one_sided(u, b, rf, -1.0)?;
    let (c_plus, c_last) = one_sided(u, b, rf, 1.0)?;
    if c_minus > c_plus + 1e-8 {
        return Err(Error::InvalidProfile(format!(
            "C_b^- = {c_minus} exceeds C_b^+ = {c_plus} at b = {b}"
        )));
    }
    Ok(OneSidedLimits {
        c_minus,
        c_plus,
        a_last,
        c_last,
    })
}

/// A scaled fundamental solution `h = C_b [W - W(b)] + U(b)` touching the
/// profile from above at radius `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Touching {
    pub b: f64,
    pub function: CylFundamental,
    pub limits: Option<OneSidedLimits>,
    /// `min (h - U)` over the checked radii.
    pub min_gap: f64,
    /// `|h(b) - U(b)|`
    pub contact_error: f64,
    pub touches: bool,
}

impl Touching {
    pub fn c1(&self) -> f64 {
        self.function.c1()
    }
}

/// Number of radii checked by [`touching_from_above`].
pub const TOUCH_SAMPLES: usize = 200;

pub fn touching_from_above(u: &RadialProfile, b: f64, rf: &RadialFundamental) -> Result<Touching> {
    if !(b >= 0.0) {
        return Err(Error::Domain(format!("touching radius must be >= 0, got {b}")));
    }
    let n = rf.n;
    let ub = finite_value(u, b)?;
    let (function, limits, radii) = if b == 0.0 {
        let h = CylFundamental::radial(Vector::zeros(n), 0.0, ub)?;
        (h, None, log_radii(1e-3, 1.0, TOUCH_SAMPLES))
    } else {
        let limits = one_sided_chord_limits(u, b, rf)?;
        let c_b = 0.5 * (limits.c_minus + limits.c_plus).max(0.0);
        let h = CylFundamental::radial(Vector::zeros(n), c_b, ub - c_b * rf.value(b)?)?;
        (h, Some(limits), log_radii(b / 10.0, 10.0 * b, TOUCH_SAMPLES))
    };
    let h_at = |r: f64| -> Result<f64> {
        if function.c1() == 0.0 {
            Ok(function.c2())
        } else {
            Ok(function.c1() * rf.value(r)? + function.c2())
        }
    };
    let mut min_gap = f64::INFINITY;
    let mut touches = true;
    for &r in &radii {
        let ur = u.value(r)?;
        let gap = h_at(r)? - ur;
        min_gap = min_gap.min(gap);
        if gap < -1e-9 {
            touches = false;
        }
    }
    let contact_error = if b == 0.0 { 0.0 } else { (h_at(b)? - ub).abs() };
    if contact_error > 1e-10 * (1.0 + ub.abs()) {
        touches = false;
    }
    Ok(Touching {
        b,
        function,
        limits,
        min_gap,
        contact_error,
        touches,
    })
}

/// Check made at one kink radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KinkCheck {
    pub radius: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub touching_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialReport {
    pub pass: bool,
    pub smooth_samples: usize,
    pub max_dominative: f64,
    pub witness_radius: Option<f64>,
    pub kinks: Vec<KinkCheck>,
}

/// Tolerance for pointwise `𝓓_p ≤ 0` checks.
pub const DOMINATIVE_TOL: f64 = 1e-9;

/// Certifies a radial profile: `𝓓_p ≤ 0` at smooth sample radii and, at every
/// kink, ordered one-sided chord limits with a touching fundamental solution.
pub fn verify_radial_equivalence(u: &RadialProfile, rf: &RadialFundamental, samples: &[f64]) -> Result<RadialReport> {
    u.validate()?;
    let n = rf.n;
    let mut max_dominative = f64::NEG_INFINITY;
    let mut witness_radius = None;
    let mut smooth_samples = 0;
    for &r in samples {
        if !(r > 0.0) || u.kink_radii().iter().any(|&k| (r - k).abs() <= 1e-9 * k.max(1.0)) {
            continue;
        }
        let (d1, d2) = u.derivatives(r)?;
        let d = dominative_profile(d1, d2, r, n, n, rf.p)?;
        smooth_samples += 1;
        if d > max_dominative {
            max_dominative = d;
            witness_radius = Some(r);
        }
    }
    let mut kinks = Vec::new();
    for &k in u.kink_radii() {
        let check = match touching_from_above(u, k, rf) {
            Ok(t) => {
                let l = t.limits.expect("kinks are at positive radii");
                KinkCheck {
                    radius: k,
                    c_minus: l.c_minus,
                    c_plus: l.c_plus,
                    touching_ok: t.touches,
                }
            }
            Err(Error::InvalidProfile(_)) => KinkCheck {
                radius: k,
                c_minus: f64::NAN,
                c_plus: f64::NAN,
                touching_ok: false,
            },
            Err(e) => return Err(e),
        };
        kinks.push(check);
    }
    let pass = max_dominative <= DOMINATIVE_TOL && kinks.iter().all(|k| k.touching_ok && k.c_minus <= k.c_plus + 1e-8);
    if smooth_samples == 0 {
        max_dominative = 0.0;
    }
    Ok(RadialReport {
        pass,
        smooth_samples,
        max_dominative,
        witness_radius,
        kinks,
    })
}

/// A sample point that was not evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSample {
    pub point: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub pass: bool,
    pub profiles_ok: Vec<bool>,
    pub concave_ok: bool,
    pub evaluated: usize,
    pub skipped: Vec<SkippedSample>,
    pub max_dominative: f64,
    pub max_p_laplace: f64,
    pub witness: Option<Vec<f64>>,
}

/// Standard radii for profile certification.
pub fn default_profile_radii() -> Vec<f64> {
    log_radii(0.05, 20.0, 200)
}

/// Checks `𝓓_p ≤ 0` and `Δ_p ≤ 0` for `Σ U_i(|x - y_i|) + K(x)` at every
/// sample that keeps `exclusion` away from all kinks and poles.
pub fn verify_theorem2(
    profiles: &[(RadialProfile, Vector)],
    concave: &ScalarField,
    p: PValue,
    samples: &[Vector],
    exclusion: f64,
    tol: f64,
) -> Result<Theorem2Report> {
    let n = concave.dim()?;
    let rf = RadialFundamental::new(n, p)?;
    let radii = default_profile_radii();
    let mut profiles_ok = Vec::with_capacity(profiles.len());
    for (u, c) in profiles {
        if c.dim() != n {
            return Err(Error::Dimension(format!(
                "profile center has length {}, expected {n}",
                c.dim()
            )));
        }
        let ok = match verify_radial_equivalence(u, &rf, &radii) {
            Ok(rep) => rep.pass,
            Err(Error::InvalidProfile(_)) => false,
            Err(e) => return Err(e),
        };
        profiles_ok.push(ok);
    }
    let mut terms: Vec<Term> = profiles
        .iter()
        .map(|(u, c)| Term {
            coef: 1.0,
            field: u.field(*c),
        })
        .collect();
    terms.push(Term {
        coef: 1.0,
        field: concave.clone(),
    });
    let sum = ScalarField::sum(terms)?;

    let outcomes = evaluate_samples(samples, |x| {
        if sum.singular_distance(x) < exclusion {
            return Ok(SampleOutcome::Skipped(
                "within exclusion radius of a kink or pole".into(),
            ));
        }
        let concave_top = largest_eig(&concave.eval_jet(x)?.hessian)?.0;
        let j = match sum.eval_jet(x) {
            Ok(j) => j,
            Err(Error::Singular { term, .. }) => return Ok(SampleOutcome::Skipped(term)),
            Err(e) => return Err(e),
        };
        Ok(SampleOutcome::Values(vec![
            dominative(&j, p)?,
            p_laplacian(&j, p),
            concave_top,
        ]))
    })?;

    let mut concave_ok = true;
    let mut skipped = Vec::new();
    let mut evaluated = 0;
    let mut max_dominative = f64::NEG_INFINITY;
    let mut max_p_laplace = f64::NEG_INFINITY;
    let mut witness = None;
    for (x, out) in samples.iter().zip(outcomes) {
        match out {
            SampleOutcome::Skipped(reason) => skipped.push(SkippedSample {
                point: x.to_vec(),
                reason,
            }),
            SampleOutcome::Values(v) => {
                evaluated += 1;
                if v[0] > max_dominative {
                    max_dominative = v[0];
                    witness = Some(x.to_vec());
                }
                max_p_laplace = max_p_laplace.max(v[1]);
                if v[2] > 1e-12 {
                    concave_ok = false;
                }
            }
        }
    }
    let pass =
        profiles_ok.iter().all(|&b| b) && concave_ok && evaluated > 0 && max_dominative <= tol && max_p_laplace <= tol;
    Ok(Theorem2Report {
        pass,
        profiles_ok,
        concave_ok,
        evaluated,
        skipped,
        max_dominative,
        max_p_laplace,
        witness,
    })
}

/// Result of evaluating one sample point.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleOutcome {
    Skipped(String),
    Values(Vec<f64>),
}

/// Evaluates `f` on every sample in parallel, keeping sample order.
pub fn evaluate_samples<F>(samples: &[Vector], f: F) -> Result<Vec<SampleOutcome>>
where
    F: Fn(&Vector) -> Result<SampleOutcome> + Sync,
{
    use rayon::prelude::*;
    samples.par_iter().map(&f).collect()
}
