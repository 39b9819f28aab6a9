//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use dominative::fields::{Isometry, ScalarField, Term};
use dominative::fundsol::{CylFundamental, RadialFundamental};
use dominative::linalg::{SymMatrix, Vector};
use dominative::operators::PValue;
use dominative::radial::RadialProfile;
use dominative::sampling::Sampler;

pub const P_GRID: [PValue; 5] = [
    PValue::Finite(2.0),
    PValue::Finite(3.0),
    PValue::Finite(4.0),
    PValue::Finite(10.0),
    PValue::Infinity,
];

pub const Q_GRID: [PValue; 7] = [
    PValue::Finite(2.0),
    PValue::Finite(2.5),
    PValue::Finite(3.0),
    PValue::Finite(4.0),
    PValue::Finite(10.0),
    PValue::Finite(100.0),
    PValue::Infinity,
];

pub fn rf(n: usize, p: PValue) -> RadialFundamental {
    RadialFundamental::new(n, p).unwrap()
}

/// Eigenvalues of a symmetric 3×3 matrix from the trigonometric solution of
/// its characteristic cubic, ascending.
pub fn cubic_eigenvalues(a: &SymMatrix) -> [f64; 3] {
    let (a11, a22, a33) = (a.get(0, 0), a.get(1, 1), a.get(2, 2));
    let (a12, a13, a23) = (a.get(0, 1), a.get(0, 2), a.get(1, 2));
    let p1 = a12 * a12 + a13 * a13 + a23 * a23;
    let q = (a11 + a22 + a33) / 3.0;
    let p2 = (a11 - q).powi(2) + (a22 - q).powi(2) + (a33 - q).powi(2) + 2.0 * p1;
    if p2 == 0.0 {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| (a.get(i, j) - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let mut e = [e1, e2, e3];
    e.sort_by(f64::total_cmp);
    e
}

/// Level at which `W` has a kink-producing crossing, inside its range.
fn inner_level(w: &RadialFundamental) -> f64 {
    match w.p {
        PValue::Finite(p) if p < w.n as f64 - 1e-12 => 1.0,
        _ => -1.0,
    }
}

/// The gallery of radial p-superharmonic profiles for `(n, p)`.
pub fn profile_gallery(n: usize, p: PValue) -> Vec<(&'static str, RadialProfile)> {
    let w = rf(n, p);
    let level = inner_level(&w);
    vec![
        ("W", RadialProfile::fundamental(w)),
        ("min{W,0}", RadialProfile::truncated(w, 0.0).unwrap()),
        ("min{W,1}", RadialProfile::truncated(w, 1.0).unwrap()),
        (
            "min{W,2W+c}",
            RadialProfile::min_pair(w, [1.0, 0.0], [2.0, -level]).unwrap(),
        ),
        ("-r^2-r", RadialProfile::poly(vec![0.0, -1.0, -1.0]).unwrap()),
        ("constant", RadialProfile::constant(2.5).unwrap()),
    ]
}

/// Fields with exact jets covering every variant.
pub fn field_gallery(s: &mut Sampler, n: usize, p: PValue) -> Vec<(String, ScalarField)> {
    let mut out = Vec::new();
    let a = s.symmetric_matrix(n);
    let quad = ScalarField::Quadratic {
        a,
        b: s.vector_in_box(n, -1.0, 1.0),
        c: 0.3,
    };
    out.push(("quadratic".to_string(), quad.clone()));
    out.push((
        "affine".to_string(),
        ScalarField::affine(s.vector_in_box(n, -1.0, 1.0), -0.2),
    ));
    for (name, profile) in profile_gallery(n, p) {
        out.push((format!("radial {name}"), profile.field(s.vector_in_box(n, -0.5, 0.5))));
    }
    for k in 1..=n {
        let cf = CylFundamental::new(s.orthonormal_columns(n, k), s.vector_in_box(n, -0.5, 0.5), 1.3, 0.4).unwrap();
        out.push((format!("cylindrical k={k}"), ScalarField::cylindrical(cf, p)));
    }
    let iso = Isometry::new(s.orthogonal(n), s.vector_in_box(n, -0.5, 0.5)).unwrap();
    let w = RadialProfile::fundamental(rf(n, p)).field(s.vector_in_box(n, -0.5, 0.5));
    out.push(("composed".to_string(), ScalarField::composed(w.clone(), iso).unwrap()));
    out.push((
        "weighted-sum".to_string(),
        ScalarField::sum(vec![
            Term { coef: 0.7, field: w },
            Term {
                coef: -1.5,
                field: quad.clone(),
            },
        ])
        .unwrap(),
    ));
    let xi = s.unit_vector(n);
    let refl = Isometry::reflection_about_line_through(&xi, &s.vector_in_box(n, -0.5, 0.5)).unwrap();
    out.push(("reflected".to_string(), ScalarField::reflected(quad, refl).unwrap()));
    out
}

/// Uniform point in the box that keeps `gap` away from the field's singular sets.
pub fn smooth_point(s: &mut Sampler, f: &ScalarField, n: usize, half: f64, gap: f64) -> Vector {
    loop {
        let x = s.vector_in_box(n, -half, half);
        if f.singular_distance(&x) > gap {
            return x;
        }
    }
}

/// Divergence of `|∇u|^{p-2}∇u` by central differences of the exact gradient.
pub fn divergence_p_laplacian(f: &ScalarField, x: &Vector, p: f64, h: f64) -> f64 {
    let flux = |y: &Vector, i: usize| {
        let g = f.eval_jet(y).unwrap().gradient;
        g.norm().powf(p - 2.0) * g[i]
    };
    (0..x.dim())
        .map(|i| {
            let mut xp = *x;
            let mut xm = *x;
            xp[i] += h;
            xm[i] -= h;
            (flux(&xp, i) - flux(&xm, i)) / (2.0 * h)
        })
        .sum()
}
