//! Fundamental solutions of the p-Laplace equation and their cylindrical
//! versions `C₁ w_{k,p}(Qᵀ(x - x₀)) + C₂`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Jet2;
use crate::linalg::{largest_eig, rayleigh, Matrix, SymMatrix, Vector};
use crate::operators::PValue;

/// Radial profile `W_{n,p}` of the fundamental solution in ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialFundamental {
    pub n: usize,
    pub p: PValue,
}

/// Which closed form `W_{n,p}` takes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    /// `-(p-1)/(p-n) r^{(p-n)/(p-1)}`
    Power,
    /// `-ln r`, when `p = n`
    Log,
    /// `-r`, when `p = ∞` or `n = 1`
    Linear,
}

impl RadialFundamental {
    pub fn new(n: usize, p: PValue) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("fundamental solution needs n >= 1".into()));
        }
        Ok(Self { n, p })
    }

    pub fn branch(&self) -> Branch {
        match self.p {
            PValue::Infinity => Branch::Linear,
            _ if self.n == 1 => Branch::Linear,
            PValue::Finite(p) if (p - self.n as f64).abs() < 1e-12 => Branch::Log,
            PValue::Finite(_) => Branch::Power,
        }
    }

    fn finite_p(&self) -> f64 {
        match self.p {
            PValue::Finite(p) => p,
            PValue::Infinity => f64::INFINITY,
        }
    }

    fn check_radius(r: f64) -> Result<()> {
        if r > 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("fundamental solution evaluated at radius {r}")))
        }
    }

    /// `W(r)`
    pub fn value(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        let n = self.n as f64;
        Ok(match self.branch() {
            Branch::Linear => -r,
            Branch::Log => -r.ln(),
            Branch::Power => {
                let p = self.finite_p();
                -(p - 1.0) / (p - n) * r.powf((p - n) / (p - 1.0))
            }
        })
    }

    /// `W'(r) = -r^{(1-n)/(p-1)}`, or `-1` at `p = ∞`.
    pub fn d1(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(match self.branch() {
            Branch::Linear => -1.0,
            Branch::Log => -1.0 / r,
            Branch::Power => -r.powf((1.0 - self.n as f64) / (self.finite_p() - 1.0)),
        })
    }

    /// `W''(r) = -(1-n)/(p-1) r^{(2-p-n)/(p-1)}`, or `0` at `p = ∞`.
    pub fn d2(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(match self.branch() {
            Branch::Linear => 0.0,
            Branch::Log => 1.0 / (r * r),
            Branch::Power => {
                let (n, p) = (self.n as f64, self.finite_p());
                -(1.0 - n) / (p - 1.0) * r.powf((2.0 - p - n) / (p - 1.0))
            }
        })
    }

    /// The radius where `W(r) = level`, if it exists.
    pub fn inverse(&self, level: f64) -> Option<f64> {
        let n = self.n as f64;
        let r = match self.branch() {
            Branch::Linear => -level,
            Branch::Log => (-level).exp(),
            Branch::Power => {
                let p = self.finite_p();
                let base = -level * (p - n) / (p - 1.0);
                if base <= 0.0 {
                    return None;
                }
                base.powf((p - 1.0) / (p - n))
            }
        };
        (r > 0.0 && r.is_finite()).then_some(r)
    }
}

/// `u(x) = C₁ w_{k,p}(Qᵀ(x - x₀)) + C₂` with `QᵀQ = I_k`, `C₁ >= 0`.
///
/// Singular on the `(n-k)`-dimensional axis `Qᵀ(x - x₀) = 0` unless `C₁ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CylFundamentalDef", into = "CylFundamentalDef")]
pub struct CylFundamental {
    k: usize,
    q: Matrix,
    x0: Vector,
    c1: f64,
    c2: f64,
}

#[derive(Serialize, Deserialize)]
struct CylFundamentalDef {
    k: usize,
    q: Matrix,
    x0: Vector,
    c1: f64,
    c2: f64,
}

impl TryFrom<CylFundamentalDef> for CylFundamental {
    type Error = Error;
    fn try_from(d: CylFundamentalDef) -> Result<Self> {
        let cf = CylFundamental::new(d.q, d.x0, d.c1, d.c2)?;
        if cf.k != d.k {
            return Err(Error::Construction(format!("k = {} but Q has {} columns", d.k, cf.k)));
        }
        Ok(cf)
    }
}

impl From<CylFundamental> for CylFundamentalDef {
    fn from(c: CylFundamental) -> Self {
        Self {
            k: c.k,
            q: c.q,
            x0: c.x0,
            c1: c.c1,
            c2: c.c2,
        }
    }
}

impl CylFundamental {
    pub fn new(q: Matrix, x0: Vector, c1: f64, c2: f64) -> Result<Self> {
        let (n, k) = (q.rows(), q.cols());
        if k == 0 || k > n {
            return Err(Error::Construction(format!(
                "Q must be n x k with 1 <= k <= n, got {n} x {k}"
            )));
        }
        if x0.dim() != n {
            return Err(Error::Dimension(format!("x0 has length {}, Q has {n} rows", x0.dim())));
        }
        let defect = q.orthonormality_defect();
        if defect > 1e-12 {
            return Err(Error::Construction(format!(
                "Q columns not orthonormal (defect {defect:e})"
            )));
        }
        if !(c1 >= 0.0) || !c1.is_finite() || !c2.is_finite() || !x0.is_finite() {
            return Err(Error::Construction(format!(
                "need finite C1 >= 0 and finite C2, got C1 = {c1}, C2 = {c2}"
            )));
        }
        Ok(Self { k, q, x0, c1, c2 })
    }

    /// Translated radial fundamental solution `C₁ w_{n,p}(x - center) + C₂`.
    pub fn radial(center: Vector, c1: f64, c2: f64) -> Result<Self> {
        Self::new(Matrix::identity(center.dim()), center, c1, c2)
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn dim(&self) -> usize {
        self.q.rows()
    }
    pub fn q(&self) -> &Matrix {
        &self.q
    }
    pub fn x0(&self) -> &Vector {
        &self.x0
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// The fundamental profile in the `k` active coordinates.
    pub fn profile(&self, p: PValue) -> RadialFundamental {
        RadialFundamental { n: self.k, p }
    }

    /// `y = Qᵀ(x - x₀)`
    pub fn axis_coords(&self, x: &Vector) -> Vector {
        self.q.tr_mul_vec(&x.sub(&self.x0))
    }

    /// Euclidean distance from `x` to the singular axis.
    pub fn axis_distance(&self, x: &Vector) -> f64 {
        self.axis_coords(x).norm()
    }

    pub fn is_singular_anywhere(&self) -> bool {
        self.c1 > 0.0
    }

    fn singular(&self, x: &Vector) -> Error {
        Error::Singular {
            term: format!("cylindrical fundamental solution (k = {}) on its axis", self.k),
            point: x.to_vec(),
        }
    }

    pub fn value(&self, x: &Vector, p: PValue) -> Result<f64> {
        if self.c1 == 0.0 {
            return Ok(self.c2);
        }
        let r = self.axis_distance(x);
        if r == 0.0 {
            return Err(self.singular(x));
        }
        Ok(self.c1 * self.profile(p).value(r)? + self.c2)
    }

    /// Radius `|y|` with `U'(|y|)` and `U''(|y|)` of the scaled profile.
    pub fn profile_derivatives(&self, x: &Vector, p: PValue) -> Result<(f64, f64, f64)> {
        let r = self.axis_distance(x);
        if r == 0.0 {
            return Err(self.singular(x));
        }
        let w = self.profile(p);
        Ok((r, self.c1 * w.d1(r)?, self.c1 * w.d2(r)?))
    }

    /// Exact jet: `∇u = U' ŷᵀQᵀ`, `𝓗u = Q{U'' ŷŷᵀ + (U'/|y|)(I_k - ŷŷᵀ)}Qᵀ`.
    pub fn jet(&self, x: &Vector, p: PValue) -> Result<Jet2> {
        let n = self.dim();
        if x.dim() != n {
            return Err(Error::Dimension(format!(
                "point has length {}, field lives in ℝ^{n}",
                x.dim()
            )));
        }
        if self.c1 == 0.0 {
            return Ok(Jet2::constant(n, self.c2));
        }
        let y = self.axis_coords(x);
        let r = y.norm();
        if r == 0.0 {
            return Err(self.singular(x));
        }
        let w = self.profile(p);
        let (u1, u2) = (self.c1 * w.d1(r)?, self.c1 * w.d2(r)?);
        let g = self.q.mul_vec(&y.scale(1.0 / r));
        let tangential = u1 / r;
        let radial_excess = u2 - tangential;
        let hessian = SymMatrix::from_fn(n, |i, j| {
            let qq: f64 = (0..self.k).map(|c| self.q.get(i, c) * self.q.get(j, c)).sum();
            tangential * qq + radial_excess * g[i] * g[j]
        });
        Ok(Jet2 {
            value: self.c1 * w.value(r)? + self.c2,
            gradient: g.scale(u1),
            hessian,
        })
    }
}

/// Whether the gradient of the jet is an eigenvector for the largest
/// Hessian eigenvalue.
pub fn jet_gradient_is_top_eigenvector(j: &Jet2) -> Result<bool> {
    let g = j.gradient;
    let gn = g.norm();
    if gn == 0.0 {
        return Err(Error::Domain("gradient vanishes".into()));
    }
    let (lambda, _) = largest_eig(&j.hessian)?;
    let scale = 1.0 + j.hessian.frobenius();
    let eig_residual = j.hessian.mul_vec(&g).axpy(-lambda, &g).norm();
    let rq = rayleigh(&j.hessian, &g)?;
    Ok(eig_residual <= 1e-8 * scale * gn && (rq - lambda).abs() <= 1e-8)
}

pub fn gradient_is_top_eigenvector(cf: &CylFundamental, x: &Vector, p: PValue) -> Result<bool> {
    jet_gradient_is_top_eigenvector(&cf.jet(x, p)?)
}
