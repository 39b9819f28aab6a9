//! The p-Laplacian, the ∞-Laplacian, their normalized forms, and the
//! dominative / submissive operators, all evaluated on second-order jets.
//!
//! For finite `p` the dominative operator is `(p-2)·λ_max(H) + tr H`; for
//! `p = ∞` it is `λ_max(H)`. The matrix-level symbol [`matrix_symbol`] is the
//! same map viewed as a function of the Hessian alone.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fields::Jet2;
use crate::linalg::{eigen, largest_eig, SymMatrix};

/// Exponent of the p-Laplace operator, `2 <= p <= ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValue {
    Finite(f64),
    Infinity,
}

impl PValue {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_nan() || p < 2.0 {
            return Err(Error::Domain(format!("p must satisfy p >= 2, got {p}")));
        }
        if p.is_infinite() {
            return Ok(PValue::Infinity);
        }
        Ok(PValue::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PValue::Infinity)
    }

    /// The power of `|∇u|` relating the operator to its normalized form:
    /// `p - 2` for finite `p`, `2` for `p = ∞`.
    pub fn gradient_power(&self) -> f64 {
        match *self {
            PValue::Finite(p) => p - 2.0,
            PValue::Infinity => 2.0,
        }
    }

    /// `(n + p - 2) / (p - 1)`, read as `1` at `p = ∞`.
    pub fn radial_ratio(&self, n: usize) -> f64 {
        match *self {
            PValue::Finite(p) => (n as f64 + p - 2.0) / (p - 1.0),
            PValue::Infinity => 1.0,
        }
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValue::Finite(p) => write!(f, "{p}"),
            PValue::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            PValue::Finite(p) => s.serialize_f64(p),
            PValue::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PVisitor;
        impl Visitor<'_> for PVisitor {
            type Value = PValue;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 2 or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<PValue, E> {
                if v.is_infinite() {
                    return Err(E::custom("use the string \"inf\" for p = ∞"));
                }
                PValue::finite(v).map_err(E::custom)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<PValue, E> {
                self.visit_f64(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<PValue, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<PValue, E> {
                match v {
                    "inf" => Ok(PValue::Infinity),
                    other => other
                        .parse::<f64>()
                        .map_err(|_| E::custom(format!("invalid p value {other:?}")))
                        .and_then(|p| self.visit_f64(p)),
                }
            }
        }
        d.deserialize_any(PVisitor)
    }
}

/// `∇u 𝓗u ∇uᵀ`
pub fn infinity_laplacian(j: &Jet2) -> f64 {
    j.hessian.quad_form(&j.gradient)
}

/// `Δ_p u = div(|∇u|^{p-2} ∇u)` expanded on the jet.
///
/// At a critical point this is `tr 𝓗u` for `p = 2` and `0` for `p > 2`.
pub fn p_laplacian(j: &Jet2, p: PValue) -> f64 {
    match p {
        PValue::Infinity => infinity_laplacian(j),
        PValue::Finite(2.0) => j.hessian.trace(),
        PValue::Finite(p) => {
            let g2 = j.gradient.norm_sq();
            if g2 == 0.0 {
                return 0.0;
            }
            let normalized = (p - 2.0) * infinity_laplacian(j) / g2 + j.hessian.trace();
            g2.sqrt().powf(p - 2.0) * normalized
        }
    }
}

/// `Δ_p u / |∇u|^{p-2}` for finite `p`, `Δ_∞ u / |∇u|²` for `p = ∞`.
pub fn normalized_p_laplacian(j: &Jet2, p: PValue) -> Result<f64> {
    let g2 = j.gradient.norm_sq();
    if g2 == 0.0 {
        return Err(Error::CriticalPoint);
    }
    let inf_n = infinity_laplacian(j) / g2;
    Ok(match p {
        PValue::Infinity => inf_n,
        PValue::Finite(p) => (p - 2.0) * inf_n + j.hessian.trace(),
    })
}

/// The symbol `F_p(X)`: `(p-2)λ_X + tr X`, or `λ_X` when `p = ∞`.
pub fn matrix_symbol(x: &SymMatrix, p: PValue) -> Result<f64> {
    let (lambda, _) = largest_eig(x)?;
    Ok(symbol_from_top(lambda, x.trace(), p))
}

fn symbol_from_top(lambda_max: f64, trace: f64, p: PValue) -> f64 {
    match p {
        PValue::Finite(p) => (p - 2.0) * lambda_max + trace,
        PValue::Infinity => lambda_max,
    }
}

/// Dominative p-Laplacian of the jet.
pub fn dominative(j: &Jet2, p: PValue) -> Result<f64> {
    matrix_symbol(&j.hessian, p)
}

/// Same operator through the eigenvalue sum `λ_1 + … + λ_{n-1} + (p-1)λ_n`.
pub fn dominative_eigen_sum(j: &Jet2, p: PValue) -> Result<f64> {
    let spec = eigen(&j.hessian)?;
    let n = spec.dim();
    Ok(match p {
        PValue::Infinity => spec.largest(),
        PValue::Finite(p) => {
            let lower: f64 = spec.eigenvalues.as_slice()[..n - 1].iter().sum();
            lower + (p - 1.0) * spec.largest()
        }
    })
}

/// Closed form of the dominative operator in the plane.
pub fn dominative_2d(j: &Jet2, p: PValue) -> Result<f64> {
    if j.dim() != 2 {
        return Err(Error::Dimension(format!(
            "planar closed form needs n = 2, got {}",
            j.dim()
        )));
    }
    let (uxx, uyy, uxy) = (j.hessian.get(0, 0), j.hessian.get(1, 1), j.hessian.get(0, 1));
    let root = ((uxx - uyy).powi(2) + 4.0 * uxy * uxy).sqrt();
    Ok(match p {
        PValue::Finite(p) => 0.5 * p * (uxx + uyy) + 0.5 * (p - 2.0) * root,
        PValue::Infinity => 0.5 * (uxx + uyy) + 0.5 * root,
    })
}

/// Submissive operator `(p-2)λ_1 + tr 𝓗u`, or `λ_1` when `p = ∞`.
pub fn submissive(j: &Jet2, p: PValue) -> Result<f64> {
    let spec = eigen(&j.hessian)?;
    Ok(match p {
        PValue::Finite(p) => (p - 2.0) * spec.smallest() + j.hessian.trace(),
        PValue::Infinity => spec.smallest(),
    })
}

/// Dominative operator of a `k`-cylindrical function `U(|Qᵀ(x-x₀)|)` in ℝⁿ,
/// from its profile derivatives at radius `r`.
///
/// The Hessian eigenvalues are `U''` (once), `U'/r` (`k-1` times) and `0`
/// (`n-k` times); only the candidates that actually occur enter the maximum.
pub fn dominative_profile(d1: f64, d2: f64, r: f64, k: usize, n: usize, p: PValue) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("profile radius must be positive, got {r}")));
    }
    if k == 0 || k > n {
        return Err(Error::Dimension(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let tangential = d1 / r;
    let mut lambda = d2;
    if k >= 2 {
        lambda = lambda.max(tangential);
    }
    if k < n {
        lambda = lambda.max(0.0);
    }
    Ok(match p {
        PValue::Finite(p) => (p - 2.0) * lambda + d2 + (k as f64 - 1.0) * tangential,
        PValue::Infinity => lambda,
    })
}

/// Normalized radial p-Laplacian `(p-1)U'' + (k-1)U'/r`; for `p = ∞` the
/// normalized ∞-Laplacian `U''`.
pub fn radial_plaplace_profile(d1: f64, d2: f64, r: f64, k: usize, p: PValue) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("profile radius must be positive, got {r}")));
    }
    Ok(match p {
        PValue::Finite(p) => (p - 1.0) * d2 + (k as f64 - 1.0) * d1 / r,
        PValue::Infinity => d2,
    })
}

/// Every operator of the crate evaluated on one jet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorReport {
    pub p_laplace: f64,
    pub inf_laplace: f64,
    /// `None` at critical points.
    pub normalized_p: Option<f64>,
    pub dominative: f64,
    pub submissive: f64,
    pub lambda_max: f64,
    pub trace: f64,
}

impl OperatorReport {
    pub fn evaluate(j: &Jet2, p: PValue) -> Result<Self> {
        let spec = eigen(&j.hessian)?;
        let trace = j.hessian.trace();
        let lambda_max = spec.largest();
        let submissive = match p {
            PValue::Finite(p) => (p - 2.0) * spec.smallest() + trace,
            PValue::Infinity => spec.smallest(),
        };
        Ok(Self {
            p_laplace: p_laplacian(j, p),
            inf_laplace: infinity_laplacian(j),
            normalized_p: normalized_p_laplacian(j, p).ok(),
            dominative: symbol_from_top(lambda_max, trace, p),
            submissive,
            lambda_max,
            trace,
        })
    }
}
