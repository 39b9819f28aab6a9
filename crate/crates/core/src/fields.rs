//! Scalar fields on ℝⁿ with exact second-order jets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundsol::CylFundamental;
use crate::linalg::{Matrix, SymMatrix, Vector};
use crate::operators::PValue;
use crate::radial::RadialProfile;

/// Value, gradient and Hessian of a field at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vector,
    pub hessian: SymMatrix,
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            value,
            gradient: Vector::zeros(n),
            hessian: SymMatrix::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.gradient.dim()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            value: alpha * self.value,
            gradient: self.gradient.scale(alpha),
            hessian: self.hessian.scale(alpha),
        }
    }

    pub fn add(&self, other: &Jet2) -> Self {
        Self {
            value: self.value + other.value,
            gradient: self.gradient.add(&other.gradient),
            hessian: self.hessian.add(&other.hessian),
        }
    }

    pub fn axpy(&self, alpha: f64, other: &Jet2) -> Self {
        self.add(&other.scale(alpha))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.gradient.is_finite() && self.hessian.is_finite()
    }
}

/// Rigid motion `T(x) = Qᵀ(x - offset)` with `Q` orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IsometryDef", into = "IsometryDef")]
pub struct Isometry {
    q: Matrix,
    offset: Vector,
}

#[derive(Serialize, Deserialize)]
struct IsometryDef {
    q: Matrix,
    offset: Vector,
}

impl TryFrom<IsometryDef> for Isometry {
    type Error = Error;
    fn try_from(d: IsometryDef) -> Result<Self> {
        Isometry::new(d.q, d.offset)
    }
}

impl From<Isometry> for IsometryDef {
    fn from(i: Isometry) -> Self {
        Self {
            q: i.q,
            offset: i.offset,
        }
    }
}

impl Isometry {
    pub fn new(q: Matrix, offset: Vector) -> Result<Self> {
        if q.rows() != q.cols() || q.rows() != offset.dim() {
            return Err(Error::Dimension(format!(
                "isometry needs square Q matching the offset, got {}x{} and {}",
                q.rows(),
                q.cols(),
                offset.dim()
            )));
        }
        let defect = q.orthonormality_defect();
        if defect > 1e-12 {
            return Err(Error::Construction(format!("Q not orthogonal (defect {defect:e})")));
        }
        if !offset.is_finite() {
            return Err(Error::Construction("offset must be finite".into()));
        }
        Ok(Self { q, offset })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            q: Matrix::identity(n),
            offset: Vector::zeros(n),
        }
    }

    /// `x ↦ x - offset`
    pub fn translation(offset: Vector) -> Self {
        Self {
            q: Matrix::identity(offset.dim()),
            offset,
        }
    }

    /// Reflection `x ↦ (2ξξᵀ - I)x` about the line spanned by the unit vector `ξ`.
    pub fn reflection_about_line(xi: &Vector) -> Result<Self> {
        Self::reflection_about_line_through(xi, &Vector::zeros(xi.dim()))
    }

    /// Reflection `x ↦ x₀ + (2ξξᵀ - I)(x - x₀)` about the line `x₀ + ℝξ`.
    pub fn reflection_about_line_through(xi: &Vector, x0: &Vector) -> Result<Self> {
        let len = xi.norm();
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "reflection direction must be a unit vector, |ξ| = {len}"
            )));
        }
        if x0.dim() != xi.dim() {
            return Err(Error::Dimension(
                "reflection point and direction differ in length".into(),
            ));
        }
        let xi = xi.scale(1.0 / len);
        let n = xi.dim();
        let r = Matrix::from_fn(n, n, |i, j| 2.0 * xi[i] * xi[j] - if i == j { 1.0 } else { 0.0 });
        // T(x) = Rx + (I - R)x₀ = Rᵀ(x - c) with c = (I - R)x₀
        let offset = x0.sub(&r.mul_vec(x0));
        Ok(Self { q: r, offset })
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        self.q.tr_mul_vec(&x.sub(&self.offset))
    }

    /// `self ∘ other`, applying `other` first.
    pub fn after(&self, other: &Isometry) -> Isometry {
        // Q₁ᵀ(Q₂ᵀ(x - c₂) - c₁) = (Q₂Q₁)ᵀ(x - c₂ - Q₂c₁)
        let q = other.q.mul(&self.q);
        let offset = other.offset.add(&other.q.mul_vec(&self.offset));
        Isometry { q, offset }
    }

    pub fn is_involution(&self) -> bool {
        let n = self.dim();
        let q2 = self.q.mul(&self.q);
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                err = err.max((q2.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        let fixed = self.offset.add(&self.q.tr_mul_vec(&self.offset)).norm();
        err <= 1e-12 && fixed <= 1e-12 * (1.0 + self.offset.norm())
    }

    /// Pulls a jet taken at `T(x)` back to `x`.
    pub fn pull_back(&self, j: &Jet2) -> Jet2 {
        Jet2 {
            value: j.value,
            gradient: self.q.mul_vec(&j.gradient),
            hessian: j.hessian.conjugate(&self.q),
        }
    }
}

/// One term `coef · field` of a weighted sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub field: ScalarField,
}

/// Closed-form fields whose jets are computed exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalarField {
    /// `½xᵀAx + b·x + c`
    Quadratic {
        a: SymMatrix,
        b: Vector,
        c: f64,
    },
    /// `a·x + b`
    Affine {
        a: Vector,
        b: f64,
    },
    /// `U(|x - center|)`
    Radial {
        profile: RadialProfile,
        center: Vector,
    },
    /// `C₁ w_{k,p}(Qᵀ(x - x₀)) + C₂`
    Cylindrical {
        cf: CylFundamental,
        p: PValue,
    },
    /// `inner(T(x))`
    Composed {
        inner: Box<ScalarField>,
        isometry: Isometry,
    },
    WeightedSum {
        terms: Vec<Term>,
    },
    /// `inner(T(x))` with `T` an involution
    Reflected {
        inner: Box<ScalarField>,
        isometry: Isometry,
    },
}

fn dim_mismatch(what: &str, got: usize, want: usize) -> Error {
    Error::Dimension(format!("{what} has dimension {got}, expected {want}"))
}

impl ScalarField {
    pub fn quadratic(a: SymMatrix, b: Vector, c: f64) -> Result<Self> {
        let f = ScalarField::Quadratic { a, b, c };
        f.dim()?;
        Ok(f)
    }

    pub fn affine(a: Vector, b: f64) -> Self {
        ScalarField::Affine { a, b }
    }

    pub fn zero(n: usize) -> Self {
        ScalarField::Affine {
            a: Vector::zeros(n),
            b: 0.0,
        }
    }

    pub fn cylindrical(cf: CylFundamental, p: PValue) -> Self {
        ScalarField::Cylindrical { cf, p }
    }

    pub fn composed(inner: ScalarField, isometry: Isometry) -> Result<Self> {
        let f = ScalarField::Composed {
            inner: Box::new(inner),
            isometry,
        };
        f.dim()?;
        Ok(f)
    }

    pub fn reflected(inner: ScalarField, isometry: Isometry) -> Result<Self> {
        let f = ScalarField::Reflected {
            inner: Box::new(inner),
            isometry,
        };
        f.dim()?;
        Ok(f)
    }

    pub fn sum(terms: Vec<Term>) -> Result<Self> {
        let f = ScalarField::WeightedSum { terms };
        f.dim()?;
        Ok(f)
    }

    /// Ambient dimension, checking that all parts agree.
    pub fn dim(&self) -> Result<usize> {
        match self {
            ScalarField::Quadratic { a, b, c } => {
                if a.dim() != b.dim() {
                    return Err(dim_mismatch("linear part", b.dim(), a.dim()));
                }
                if !c.is_finite() || !a.is_finite() {
                    return Err(Error::Construction("quadratic coefficients must be finite".into()));
                }
                Ok(a.dim())
            }
            ScalarField::Affine { a, .. } => Ok(a.dim()),
            ScalarField::Radial { profile, center } => {
                if let Some(rf) = profile.fundamental_solution() {
                    if rf.n != center.dim() {
                        return Err(dim_mismatch("radial profile", rf.n, center.dim()));
                    }
                }
                Ok(center.dim())
            }
            ScalarField::Cylindrical { cf, .. } => Ok(cf.dim()),
            ScalarField::Composed { inner, isometry } => {
                let n = inner.dim()?;
                if n != isometry.dim() {
                    return Err(dim_mismatch("isometry", isometry.dim(), n));
                }
                Ok(n)
            }
            ScalarField::Reflected { inner, isometry } => {
                let n = inner.dim()?;
                if n != isometry.dim() {
                    return Err(dim_mismatch("reflection", isometry.dim(), n));
                }
                if !isometry.is_involution() {
                    return Err(Error::Construction(
                        "reflected field needs an involutive isometry".into(),
                    ));
                }
                Ok(n)
            }
            ScalarField::WeightedSum { terms } => {
                let first = terms
                    .first()
                    .ok_or_else(|| Error::Construction("weighted sum needs at least one term".into()))?;
                let n = first.field.dim()?;
                for t in &terms[1..] {
                    let m = t.field.dim()?;
                    if m != n {
                        return Err(dim_mismatch("summand", m, n));
                    }
                }
                if terms.iter().any(|t| !t.coef.is_finite()) {
                    return Err(Error::Construction("weights must be finite".into()));
                }
                Ok(n)
            }
        }
    }

    fn check_point(&self, x: &Vector) -> Result<()> {
        let n = self.dim()?;
        if x.dim() != n {
            return Err(dim_mismatch("point", x.dim(), n));
        }
        if !x.is_finite() {
            return Err(Error::Domain("point has non-finite coordinates".into()));
        }
        Ok(())
    }

    /// Exact value, gradient and Hessian at `x`.
    pub fn eval_jet(&self, x: &Vector) -> Result<Jet2> {
        self.check_point(x)?;
        self.jet_unchecked(x)
    }

    fn jet_unchecked(&self, x: &Vector) -> Result<Jet2> {
        match self {
            ScalarField::Quadratic { a, b, c } => {
                let ax = a.mul_vec(x);
                Ok(Jet2 {
                    value: 0.5 * x.dot(&ax) + b.dot(x) + c,
                    gradient: ax.add(b),
                    hessian: *a,
                })
            }
            ScalarField::Affine { a, b } => Ok(Jet2 {
                value: a.dot(x) + b,
                gradient: *a,
                hessian: SymMatrix::zeros(a.dim()),
            }),
            ScalarField::Radial { profile, center } => radial_jet(profile, center, x),
            ScalarField::Cylindrical { cf, p } => cf.jet(x, *p),
            ScalarField::Composed { inner, isometry } | ScalarField::Reflected { inner, isometry } => {
                Ok(isometry.pull_back(&inner.jet_unchecked(&isometry.apply(x))?))
            }
            ScalarField::WeightedSum { terms } => {
                let mut acc = Jet2::constant(x.dim(), 0.0);
                for t in terms {
                    if t.coef != 0.0 {
                        acc = acc.axpy(t.coef, &t.field.jet_unchecked(x)?);
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Field value at `x`; `+∞` at poles of profiles that blow up.
    pub fn value(&self, x: &Vector) -> Result<f64> {
        self.check_point(x)?;
        self.value_unchecked(x)
    }

    fn value_unchecked(&self, x: &Vector) -> Result<f64> {
        match self {
            ScalarField::Quadratic { a, b, c } => Ok(0.5 * a.quad_form(x) + b.dot(x) + c),
            ScalarField::Affine { a, b } => Ok(a.dot(x) + b),
            ScalarField::Radial { profile, center } => profile.value(x.sub(center).norm()),
            ScalarField::Cylindrical { cf, p } => cf.value(x, *p),
            ScalarField::Composed { inner, isometry } | ScalarField::Reflected { inner, isometry } => {
                inner.value_unchecked(&isometry.apply(x))
            }
            ScalarField::WeightedSum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    if t.coef != 0.0 {
                        acc += t.coef * t.field.value_unchecked(x)?;
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Distance from `x` to the nearest declared singular set (poles,
    /// singular axes, kink spheres); `+∞` for fields without one.
    pub fn singular_distance(&self, x: &Vector) -> f64 {
        match self {
            ScalarField::Quadratic { .. } | ScalarField::Affine { .. } => f64::INFINITY,
            ScalarField::Radial { profile, center } => {
                let r = x.sub(center).norm();
                let mut d = f64::INFINITY;
                if profile.origin_second_derivative().is_none() {
                    d = r;
                }
                for &k in profile.kink_radii() {
                    d = d.min((r - k).abs());
                }
                d
            }
            ScalarField::Cylindrical { cf, .. } => {
                if cf.is_singular_anywhere() {
                    cf.axis_distance(x)
                } else {
                    f64::INFINITY
                }
            }
            ScalarField::Composed { inner, isometry } | ScalarField::Reflected { inner, isometry } => {
                inner.singular_distance(&isometry.apply(x))
            }
            ScalarField::WeightedSum { terms } => terms
                .iter()
                .filter(|t| t.coef != 0.0)
                .map(|t| t.field.singular_distance(x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn compose_isometry(&self, isometry: Isometry) -> Result<ScalarField> {
        ScalarField::composed(self.clone(), isometry)
    }
}

fn radial_jet(profile: &RadialProfile, center: &Vector, x: &Vector) -> Result<Jet2> {
    let n = center.dim();
    let y = x.sub(center);
    let r = y.norm();
    if r == 0.0 {
        return match profile.origin_second_derivative() {
            Some(u2) => Ok(Jet2 {
                value: profile.value(0.0)?,
                gradient: Vector::zeros(n),
                hessian: SymMatrix::identity(n).scale(u2),
            }),
            None => Err(Error::Singular {
                term: "radial profile at its center".into(),
                point: x.to_vec(),
            }),
        };
    }
    let (u1, u2) = match profile.derivatives(r) {
        Ok(d) => d,
        Err(Error::Singular { term, .. }) => {
            return Err(Error::Singular {
                term,
                point: x.to_vec(),
            })
        }
        Err(e) => return Err(e),
    };
    let e = y.scale(1.0 / r);
    let tangential = u1 / r;
    let hessian = SymMatrix::identity(n)
        .scale(tangential)
        .axpy(u2 - tangential, &SymMatrix::outer(&e));
    Ok(Jet2 {
        value: profile.value(r)?,
        gradient: e.scale(u1),
        hessian,
    })
}

/// Default finite-difference step `10⁻⁴(1 + |x|)`.
pub fn default_fd_step(x: &Vector) -> f64 {
    1e-4 * (1.0 + x.norm())
}

/// Central-difference jet from field values only.
pub fn fd_jet(f: &ScalarField, x: &Vector, h: f64) -> Result<Jet2> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let n = f.dim()?;
    if x.dim() != n {
        return Err(dim_mismatch("point", x.dim(), n));
    }
    // the stencil reaches √2·h from x along diagonals
    if f.singular_distance(x) <= std::f64::consts::SQRT_2 * h * (1.0 + 1e-12) {
        return Err(Error::Singular {
            term: "finite-difference stencil touches a singular set".into(),
            point: x.to_vec(),
        });
    }
    let at = |dx: &[(usize, f64)]| -> Result<f64> {
        let mut y = *x;
        for &(i, s) in dx {
            y[i] += s * h;
        }
        f.value(&y)
    };
    let f0 = f.value(x)?;
    let mut gradient = Vector::zeros(n);
    let mut hessian = SymMatrix::zeros(n);
    for i in 0..n {
        let fp = at(&[(i, 1.0)])?;
        let fm = at(&[(i, -1.0)])?;
        gradient[i] = (fp - fm) / (2.0 * h);
        hessian.set(i, i, (fp - 2.0 * f0 + fm) / (h * h));
        for j in i + 1..n {
            let fpp = at(&[(i, 1.0), (j, 1.0)])?;
            let fpm = at(&[(i, 1.0), (j, -1.0)])?;
            let fmp = at(&[(i, -1.0), (j, 1.0)])?;
            let fmm = at(&[(i, -1.0), (j, -1.0)])?;
            hessian.set(i, j, (fpp - fpm - fmp + fmm) / (4.0 * h * h));
        }
    }
    Ok(Jet2 {
        value: f0,
        gradient,
        hessian,
    })
}
