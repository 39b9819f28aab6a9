//! Library results against independent computations: closed-form cubic roots,
//! finite differences of values, and the divergence form of the p-Laplacian.

mod common;

use common::*;
use dominative::fields::{default_fd_step, fd_jet, Jet2, ScalarField};
use dominative::fundsol::CylFundamental;
use dominative::linalg::{eigen, Matrix, SymMatrix, Vector};
use dominative::operators::{
    dominative, dominative_2d, dominative_eigen_sum, dominative_profile, infinity_laplacian, p_laplacian,
    radial_plaplace_profile, PValue,
};
use dominative::sampling::Sampler;

#[test]
fn jacobi_matches_cubic_formula() {
    let mut s = Sampler::new(1);
    for _ in 0..2000 {
        let a = s.symmetric_matrix(3).scale(s.log_uniform(1e-2, 1e2));
        let oracle = cubic_eigenvalues(&a);
        let got = eigen(&a).unwrap().eigenvalues;
        let scale = 1.0 + a.frobenius();
        for i in 0..3 {
            assert!(
                (oracle[i] - got[i]).abs() <= 1e-12 * scale,
                "{a:?}: {oracle:?} vs {got:?}"
            );
        }
    }
}

#[test]
fn jacobi_matches_cubic_formula_with_clusters() {
    let mut s = Sampler::new(2);
    for gap in [0.0, 1e-12, 1e-8, 1e-4] {
        for _ in 0..200 {
            let q = s.orthogonal(3);
            let base = s.uniform(-2.0, 2.0);
            let d = SymMatrix::diag(&[base, base + gap, s.uniform(-3.0, 3.0)]);
            let a = d.conjugate(&q);
            let oracle = cubic_eigenvalues(&a);
            let got = eigen(&a).unwrap().eigenvalues;
            for i in 0..3 {
                // the cubic formula loses accuracy near repeated roots
                assert!((oracle[i] - got[i]).abs() <= 1e-7, "gap {gap}: {oracle:?} vs {got:?}");
            }
        }
    }
}

#[test]
fn exact_jets_match_finite_differences() {
    let mut s = Sampler::new(3);
    for n in [2, 3, 4] {
        for p in P_GRID {
            for (name, f) in field_gallery(&mut s, n, p) {
                for _ in 0..10 {
                    let x = smooth_point(&mut s, &f, n, 2.0, 0.2);
                    let exact = f.eval_jet(&x).unwrap();
                    let fd = fd_jet(&f, &x, default_fd_step(&x)).unwrap();
                    let floor = 1.0 + exact.value.abs();
                    assert!((fd.value - exact.value).abs() <= 1e-12 * floor, "{name}");
                    let gerr = fd.gradient.sub(&exact.gradient).norm() / exact.gradient.norm().max(1.0);
                    assert!(gerr <= 1e-6, "{name} n={n} p={p} x={x:?}: gradient error {gerr:e}");
                    let herr = fd.hessian.sub(&exact.hessian).frobenius() / exact.hessian.frobenius().max(1.0);
                    assert!(herr <= 1e-4, "{name} n={n} p={p} x={x:?}: Hessian error {herr:e}");
                }
            }
        }
    }
}

#[test]
fn p_laplacian_matches_divergence_form() {
    let mut s = Sampler::new(4);
    for n in [2, 3] {
        for p in [2.0, 2.5, 3.0, 4.0, 7.0] {
            let pv = PValue::Finite(p);
            for (name, f) in field_gallery(&mut s, n, pv) {
                let mut checked = 0;
                for _ in 0..200 {
                    if checked == 10 {
                        break;
                    }
                    let x = smooth_point(&mut s, &f, n, 2.0, 0.2);
                    let j = f.eval_jet(&x).unwrap();
                    if j.gradient.norm() < 0.1 {
                        continue;
                    }
                    checked += 1;
                    let exact = p_laplacian(&j, pv);
                    let div = divergence_p_laplacian(&f, &x, p, 1e-5);
                    let scale = 1.0 + exact.abs() + j.gradient.norm().powf(p - 2.0) * j.hessian.frobenius();
                    assert!(
                        (exact - div).abs() <= 1e-5 * scale,
                        "{name} n={n} p={p} x={x:?}: {exact} vs {div}"
                    );
                }
            }
        }
    }
}

#[test]
fn infinity_laplacian_matches_second_derivative_along_gradient() {
    let mut s = Sampler::new(5);
    for n in [2, 3] {
        for (name, f) in field_gallery(&mut s, n, PValue::Infinity) {
            for _ in 0..10 {
                let x = smooth_point(&mut s, &f, n, 2.0, 0.2);
                let j = f.eval_jet(&x).unwrap();
                let g = j.gradient;
                let h = 1e-4 / g.norm().max(1.0);
                let along = |t: f64| f.value(&x.axpy(t, &g)).unwrap();
                let fd = (along(h) - 2.0 * along(0.0) + along(-h)) / (h * h);
                let exact = infinity_laplacian(&j);
                let scale = 1.0 + g.norm_sq() * j.hessian.frobenius();
                assert!((fd - exact).abs() <= 1e-4 * scale, "{name} x={x:?}: {fd} vs {exact}");
            }
        }
    }
}

#[test]
fn dominative_matches_eigenvalue_sum_and_planar_form() {
    let mut s = Sampler::new(6);
    for _ in 0..2000 {
        let n = s.int_in(1, 8);
        let j = Jet2 {
            value: 0.0,
            gradient: s.vector_in_box(n, -1.0, 1.0),
            hessian: s.symmetric_matrix(n),
        };
        for p in P_GRID {
            let d = dominative(&j, p).unwrap();
            let e = dominative_eigen_sum(&j, p).unwrap();
            assert!((d - e).abs() <= 1e-10 * (1.0 + d.abs()), "n={n} p={p}: {d} vs {e}");
            if n == 2 {
                let planar = dominative_2d(&j, p).unwrap();
                assert!((d - planar).abs() <= 1e-10 * (1.0 + d.abs()), "p={p}: {d} vs {planar}");
            }
        }
    }
}

#[test]
fn dominative_dominates_sampled_rayleigh_quotients() {
    let mut s = Sampler::new(7);
    for _ in 0..300 {
        let n = s.int_in(2, 6);
        let h = s.symmetric_matrix(n);
        let j = Jet2 {
            value: 0.0,
            gradient: Vector::zeros(n),
            hessian: h,
        };
        let lmax = dominative(&j, PValue::Infinity).unwrap();
        let mut best = f64::NEG_INFINITY;
        for _ in 0..2000 {
            let z = s.unit_vector(n);
            best = best.max(h.quad_form(&z));
        }
        assert!(best <= lmax + 1e-12);
        assert!(
            lmax - best <= 0.2 * (1.0 + h.frobenius()),
            "sampled max {best} far below {lmax}"
        );
    }
}

#[test]
fn profile_operators_match_full_jets() {
    let mut s = Sampler::new(8);
    for n in [2, 3, 5] {
        for p in P_GRID {
            for k in 1..=n {
                let cf =
                    CylFundamental::new(s.orthonormal_columns(n, k), s.vector_in_box(n, -1.0, 1.0), 0.8, 0.3).unwrap();
                for _ in 0..10 {
                    let x = s.vector_in_box(n, -3.0, 3.0);
                    if cf.axis_distance(&x) < 0.1 {
                        continue;
                    }
                    let (r, d1, d2) = cf.profile_derivatives(&x, p).unwrap();
                    let j = cf.jet(&x, p).unwrap();
                    let full = dominative(&j, p).unwrap();
                    let prof = dominative_profile(d1, d2, r, k, n, p).unwrap();
                    assert!((full - prof).abs() <= 1e-10 * (1.0 + full.abs()), "n={n} k={k} p={p}");
                    let lap = p_laplacian(&j, p) / j.gradient.norm().powf(p.gradient_power());
                    let radial = radial_plaplace_profile(d1, d2, r, k, p).unwrap();
                    assert!(
                        (lap - radial).abs() <= 1e-9 * (1.0 + lap.abs()),
                        "n={n} k={k} p={p}: {lap} vs {radial}"
                    );
                }
            }
        }
    }
}

#[test]
fn fundamental_derivatives_match_finite_differences() {
    for n in 1..=6 {
        for p in P_GRID
            .into_iter()
            .chain([PValue::Finite(n as f64), PValue::Finite(1.5)])
        {
            if matches!(p, PValue::Finite(q) if q <= 1.0) {
                continue;
            }
            let w = rf(n, p);
            for r in [0.05, 0.3, 1.0, 2.7, 15.0] {
                let h = 1e-4 * r;
                let v = |t: f64| w.value(t).unwrap();
                let d1 = (v(r + h) - v(r - h)) / (2.0 * h);
                let d2 = (v(r + h) - 2.0 * v(r) + v(r - h)) / (h * h);
                let e1 = w.d1(r).unwrap();
                let e2 = w.d2(r).unwrap();
                assert!(
                    (d1 - e1).abs() <= 1e-6 * (1.0 + e1.abs()),
                    "n={n} p={p} r={r}: W' {d1} vs {e1}"
                );
                assert!(
                    (d2 - e2).abs() <= 1e-4 * (1.0 + e2.abs()),
                    "n={n} p={p} r={r}: W'' {d2} vs {e2}"
                );
                if let Some(back) = w.inverse(v(r)) {
                    assert!(
                        (back - r).abs() <= 1e-10 * r,
                        "n={n} p={p}: inverse({}) = {back}, want {r}",
                        v(r)
                    );
                }
            }
        }
    }
}

#[test]
fn profile_derivatives_match_finite_differences() {
    for n in [2, 3] {
        for p in P_GRID {
            for (name, u) in profile_gallery(n, p) {
                for r in dominative::radial::log_radii(0.05, 20.0, 40) {
                    let h = 1e-5 * r;
                    if u.kink_radii().iter().any(|k| (k - r).abs() < 10.0 * h) {
                        continue;
                    }
                    let v = |t: f64| u.value(t).unwrap();
                    let fd1 = (v(r + h) - v(r - h)) / (2.0 * h);
                    let (d1, _) = u.derivatives(r).unwrap();
                    assert!((fd1 - d1).abs() <= 1e-6 * (1.0 + d1.abs()), "{name} n={n} p={p} r={r}");
                }
            }
        }
    }
}

#[test]
fn radial_profile_field_matches_profile_derivatives() {
    let mut s = Sampler::new(9);
    for n in [2, 3] {
        for p in P_GRID {
            for (name, u) in profile_gallery(n, p) {
                let center = s.vector_in_box(n, -1.0, 1.0);
                let f: ScalarField = u.field(center);
                for _ in 0..10 {
                    let x = smooth_point(&mut s, &f, n, 3.0, 0.05);
                    let r = x.sub(&center).norm();
                    if u.is_kink(r) {
                        continue;
                    }
                    let (d1, d2) = u.derivatives(r).unwrap();
                    let j = f.eval_jet(&x).unwrap();
                    let e = x.sub(&center).scale(1.0 / r);
                    let radial_2nd = j.hessian.quad_form(&e);
                    assert!((j.gradient.dot(&e) - d1).abs() <= 1e-10 * (1.0 + d1.abs()), "{name}");
                    assert!((radial_2nd - d2).abs() <= 1e-9 * (1.0 + d2.abs()), "{name}");
                    let tr = j.hessian.trace();
                    let want = d2 + (n as f64 - 1.0) * d1 / r;
                    assert!(
                        (tr - want).abs() <= 1e-9 * (1.0 + want.abs()),
                        "{name}: trace {tr} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn orthonormal_samples_have_small_defect() {
    let mut s = Sampler::new(10);
    for n in 1..=8 {
        for k in 1..=n {
            let q: Matrix = s.orthonormal_columns(n, k);
            assert!(q.orthonormality_defect() <= 1e-12);
        }
    }
}
