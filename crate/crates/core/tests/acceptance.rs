//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always printed and timings are not disturbed by
//! other tests running in parallel.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use dominative::fields::{default_fd_step, fd_jet, Jet2, ScalarField};
use dominative::fundsol::{gradient_is_top_eigenvector, CylFundamental};
use dominative::linalg::{eigen, jacobi_eigen, SymMatrix, Vector, JACOBI_TOL};
use dominative::operators::{dominative, dominative_2d, matrix_symbol, p_laplacian, PValue};
use dominative::radial::{
    chord_constant, chord_profile, default_profile_radii, log_radii, one_sided_chord_limits, touching_from_above,
    verify_radial_equivalence, verify_theorem2, RadialProfile,
};
use dominative::sampling::Sampler;
use dominative::scenario::{run, RunOptions, Scenario};
use dominative::superposition::{
    counterexample_fundsol, counterexample_linear, counterexample_reflection, random_concave_quadratic, Construction,
    DEFAULT_EPS,
};

const RANDOM_CRANDALL: &str = include_str!("../scenarios/random_crandall.json");

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(ok: bool, what: String, failures: &mut Vec<String>) {
    if !ok {
        failures.push(what);
    }
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: summary,
        }
    } else {
        let shown: Vec<_> = failures.iter().take(3).cloned().collect();
        Outcome {
            pass: false,
            detail: format!("{summary}; {} failures, first: {}", failures.len(), shown.join(" | ")),
        }
    }
}

fn fundamental_annihilation() -> Outcome {
    let mut s = Sampler::new(101);
    let mut failures = Vec::new();
    let (mut worst_d, mut worst_l): (f64, f64) = (0.0, 0.0);
    for n in [2, 3, 5] {
        for p in P_GRID {
            let w = RadialProfile::fundamental(rf(n, p)).field(Vector::zeros(n));
            for _ in 0..100 {
                let x = s.point_in_shell(&Vector::zeros(n), 0.1, 10.0);
                let j = w.eval_jet(&x).unwrap();
                let d = dominative(&j, p).unwrap().abs();
                let l = p_laplacian(&j, p).abs();
                worst_d = worst_d.max(d);
                worst_l = worst_l.max(l);
                check(
                    d <= 1e-9 && l <= 1e-9,
                    format!("n={n} p={p} x={x:?}: |D|={d:e} |Δ|={l:e}"),
                    &mut failures,
                );
            }
        }
    }
    outcome(
        failures,
        format!("max |D_p w| = {worst_d:.2e}, max |Δ_p w| = {worst_l:.2e}"),
    )
}

fn cylindrical_eigenstructure() -> Outcome {
    let mut s = Sampler::new(202);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut configs = 0;
    for n in [2, 3, 5] {
        for k in 1..=n {
            for p in [PValue::Finite(3.0), PValue::Finite(4.0), PValue::Infinity] {
                let cf = CylFundamental::new(
                    s.orthonormal_columns(n, k),
                    s.vector_in_box(n, -1.0, 1.0),
                    s.uniform(0.5, 2.0),
                    s.uniform(-1.0, 1.0),
                )
                .unwrap();
                configs += 1;
                for _ in 0..5 {
                    let x = loop {
                        let x = s.vector_in_box(n, -3.0, 3.0);
                        if cf.axis_distance(&x) > 0.1 {
                            break x;
                        }
                    };
                    let (r, u1, u2) = cf.profile_derivatives(&x, p).unwrap();
                    let mut expected: Vec<f64> = std::iter::repeat_n(u1 / r, k - 1)
                        .chain(std::iter::repeat_n(0.0, n - k))
                        .chain(std::iter::once(u2))
                        .collect();
                    expected.sort_by(f64::total_cmp);
                    let got = eigen(&cf.jet(&x, p).unwrap().hessian).unwrap().eigenvalues;
                    let err = expected
                        .iter()
                        .zip(got.as_slice())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    worst = worst.max(err);
                    check(
                        err <= 1e-9,
                        format!("n={n} k={k} p={p}: eigenvalue error {err:e}"),
                        &mut failures,
                    );
                    let top = gradient_is_top_eigenvector(&cf, &x, p).unwrap();
                    check(
                        top,
                        format!("n={n} k={k} p={p}: gradient not a top eigenvector at {x:?}"),
                        &mut failures,
                    );
                }
            }
        }
    }
    outcome(
        failures,
        format!("{configs} configurations, max eigenvalue error {worst:.2e}"),
    )
}

fn crandall_superposition() -> Outcome {
    let scenario = Scenario::from_json(RANDOM_CRANDALL).unwrap();
    let report = run(&scenario, RANDOM_CRANDALL.as_bytes(), RunOptions::default()).unwrap();
    let suite = &report.suites[0];
    let mut failures = Vec::new();
    check(suite.passed, format!("suite failed: {:?}", suite.notes), &mut failures);
    for r in &suite.residuals {
        check(
            r.value <= 1e-9,
            format!("{} = {:e} at {:?}", r.name, r.value, r.witness),
            &mut failures,
        );
    }
    let detail = suite
        .residuals
        .iter()
        .map(|r| format!("{} = {:.3e}", r.name, r.value))
        .collect::<Vec<_>>();
    outcome(
        failures,
        format!(
            "{} samples, {} skipped, {}",
            suite.evaluated,
            suite.skipped,
            detail.join(", ")
        ),
    )
}

fn matrix_symbol_properties() -> Outcome {
    let mut s = Sampler::new(404);
    let mut failures = Vec::new();
    let mut worst_hom: f64 = 0.0;
    for _ in 0..2000 {
        let n = s.int_in(2, 8);
        let x = s.symmetric_matrix(n);
        let y = s.symmetric_matrix(n);
        let m = s.matrix(n, n);
        let psd = SymMatrix::gram(&m);
        let t = s.uniform(0.0, 4.0);
        let f: Vec<f64> = Q_GRID.iter().map(|&q| matrix_symbol(&x, q).unwrap()).collect();
        for (qi, &q) in Q_GRID.iter().enumerate() {
            let fx = f[qi];
            let fy = matrix_symbol(&y, q).unwrap();
            let fxy = matrix_symbol(&x.add(&y), q).unwrap();
            check(
                fxy <= fx + fy + 1e-10,
                format!("q={q}: F(X+Y) - F(X) - F(Y) = {:e}", fxy - fx - fy),
                &mut failures,
            );
            let hom = (matrix_symbol(&x.scale(t), q).unwrap() - t * fx).abs();
            worst_hom = worst_hom.max(hom);
            check(
                hom <= 1e-10,
                format!("q={q} t={t}: homogeneity error {hom:e}"),
                &mut failures,
            );
            let fpsd = matrix_symbol(&x.add(&psd), q).unwrap();
            check(
                fx <= fpsd + 1e-10,
                format!("q={q}: F(X) - F(X+MMᵀ) = {:e}", fx - fpsd),
                &mut failures,
            );
            for (qj, _) in Q_GRID.iter().enumerate() {
                if fx <= 0.0 && qj < qi {
                    check(
                        f[qj] <= 1e-10,
                        format!("nesting down from q={q}: F = {:e}", f[qj]),
                        &mut failures,
                    );
                }
                if fx >= 0.0 && qj > qi {
                    check(
                        f[qj] >= -1e-10,
                        format!("nesting up from q={q}: F = {:e}", f[qj]),
                        &mut failures,
                    );
                }
            }
        }
    }
    outcome(
        failures,
        format!("2000 matrices x 7 exponents, max homogeneity error {worst_hom:.2e}"),
    )
}

fn domination() -> Outcome {
    let mut s = Sampler::new(505);
    let mut failures = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let n = s.int_in(2, 8);
        let j = Jet2 {
            value: 0.0,
            gradient: s.vector_in_box(n, -1.0, 1.0),
            hessian: s.symmetric_matrix(n),
        };
        let g = j.gradient.norm();
        for p in P_GRID {
            let bound = g.powf(p.gradient_power()) * dominative(&j, p).unwrap();
            let excess = p_laplacian(&j, p) - bound;
            worst = worst.max(excess);
            check(excess <= 1e-9, format!("n={n} p={p}: excess {excess:e}"), &mut failures);
        }
    }
    outcome(
        failures,
        format!("2000 jets x 5 exponents, max Δ_p - |∇u|^α D_p = {worst:.2e}"),
    )
}

fn counterexamples() -> Outcome {
    let n = 3;
    let p = PValue::Finite(4.0);
    let u = ScalarField::Quadratic {
        a: SymMatrix::identity(n),
        b: Vector::zeros(n),
        c: 0.0,
    };
    let x0 = Vector::unit(n, 0);
    let mut failures = Vec::new();
    let built = [
        ("linear", counterexample_linear(&u, &x0, p).unwrap()),
        ("fundsol", counterexample_fundsol(&u, &x0, p, None).unwrap()),
        (
            "reflection",
            counterexample_reflection(&u, &x0, p, DEFAULT_EPS).unwrap(),
        ),
    ];
    let mut parts = Vec::new();
    for (name, ce) in &built {
        let re = ce.recompute_witness(&u).unwrap();
        check(
            ce.witness_value > 1e-6,
            format!("{name}: witness {:e}", ce.witness_value),
            &mut failures,
        );
        check(
            (re - ce.witness_value).abs() <= 1e-8,
            format!("{name}: recomputed {re:e} vs reported {:e}", ce.witness_value),
            &mut failures,
        );
        parts.push(format!("{name} = {:.6}", ce.witness_value));
    }
    check(
        (built[0].1.witness_value - 5.0).abs() <= 1e-9,
        "linear witness is not 5".into(),
        &mut failures,
    );
    if let Construction::Fundsol { residual_trace, .. } = &built[1].1.construction {
        for w in residual_trace[6..].windows(2) {
            check(
                w[1].residual.abs() < w[0].residual.abs(),
                format!("|ρ| not decreasing at s = {}", w[1].s),
                &mut failures,
            );
        }
        let last = residual_trace[20].residual.abs();
        check(last < 1e-3, format!("|ρ(2^20)| = {last:e}"), &mut failures);
        parts.push(format!("|ρ(2^20)| = {last:.2e}"));
    }
    outcome(failures, parts.join(", "))
}

fn chord_machinery() -> Outcome {
    let mut s = Sampler::new(707);
    let mut failures = Vec::new();
    let mut profiles = 0;
    let mut kink_pair = None;
    for n in [2, 3] {
        for p in [PValue::Finite(2.0), PValue::Finite(4.0), PValue::Infinity] {
            let w = rf(n, p);
            for (name, u) in profile_gallery(n, p) {
                profiles += 1;
                let tag = format!("{name} n={n} p={p}");
                // ordering of chord constants on random triples
                for _ in 0..50 {
                    let mut r = [
                        s.log_uniform(0.05, 20.0),
                        s.log_uniform(0.05, 20.0),
                        s.log_uniform(0.05, 20.0),
                    ];
                    r.sort_by(f64::total_cmp);
                    if r[1] - r[0] < 1e-3 || r[2] - r[1] < 1e-3 {
                        continue;
                    }
                    let cab = chord_constant(&u, r[0], r[1], &w).unwrap();
                    let cbc = chord_constant(&u, r[1], r[2], &w).unwrap();
                    check(
                        cab >= -1e-12 && cab <= cbc + 1e-10,
                        format!("{tag}: C_ab = {cab}, C_bc = {cbc}"),
                        &mut failures,
                    );
                }
                // monotone in each endpoint
                let b = s.log_uniform(0.2, 5.0);
                let inner: Vec<f64> = (1..=20).map(|i| b * i as f64 / 21.0).collect();
                let c_in: Vec<f64> = inner.iter().map(|&a| chord_constant(&u, a, b, &w).unwrap()).collect();
                let outer: Vec<f64> = (1..=20).map(|i| b * (1.0 + i as f64 / 4.0)).collect();
                let c_out: Vec<f64> = outer.iter().map(|&c| chord_constant(&u, b, c, &w).unwrap()).collect();
                for pair in c_in.windows(2).chain(c_out.windows(2)) {
                    check(
                        pair[1] >= pair[0] - 1e-10,
                        format!("{tag}: chord constants decrease near b = {b}"),
                        &mut failures,
                    );
                }
                // chords lie below inside and above outside
                let a = b * s.uniform(0.2, 0.8);
                let chord = chord_profile(&u, a, b, &w).unwrap();
                for (end, val) in [(a, u.value(a).unwrap()), (b, u.value(b).unwrap())] {
                    let err = (chord.eval(end).unwrap() - val).abs();
                    check(
                        err <= 1e-10,
                        format!("{tag}: H_ab misses U at {end} by {err:e}"),
                        &mut failures,
                    );
                }
                for i in 1..=100 {
                    let r = a + (b - a) * i as f64 / 101.0;
                    let gap = chord.eval(r).unwrap() - u.value(r).unwrap();
                    check(
                        gap <= 1e-10,
                        format!("{tag}: H_ab - U = {gap:e} inside at {r}"),
                        &mut failures,
                    );
                }
                for r in log_radii(a / 10.0, a, 50).into_iter().chain(log_radii(b, 10.0 * b, 50)) {
                    let gap = chord.eval(r).unwrap() - u.value(r).unwrap();
                    check(
                        gap >= -1e-10,
                        format!("{tag}: H_ab - U = {gap:e} outside at {r}"),
                        &mut failures,
                    );
                }
                // touching from above, at smooth radii and at every kink
                let mut radii = vec![b, s.log_uniform(0.1, 10.0)];
                radii.extend_from_slice(u.kink_radii());
                if u.value(0.0).unwrap().is_finite() {
                    radii.push(0.0);
                }
                for &t in &radii {
                    let touch = touching_from_above(&u, t, &w).unwrap();
                    check(
                        touch.touches,
                        format!("{tag}: no touching at b = {t} (gap {:e})", touch.min_gap),
                        &mut failures,
                    );
                    check(
                        touch.contact_error <= 1e-10,
                        format!("{tag}: contact error {:e}", touch.contact_error),
                        &mut failures,
                    );
                    check(
                        touch.min_gap >= -1e-9,
                        format!("{tag}: h - U = {:e}", touch.min_gap),
                        &mut failures,
                    );
                }
                // one-sided difference quotients at kinks
                for &k in u.kink_radii() {
                    let l = one_sided_chord_limits(&u, k, &w).unwrap();
                    let h = 1e-6 * k;
                    let uk = u.value(k).unwrap();
                    let w1 = w.d1(k).unwrap();
                    let q_minus = (uk - u.value(k - h).unwrap()) / h;
                    let q_plus = (u.value(k + h).unwrap() - uk) / h;
                    for (q, target) in [(q_minus, l.c_minus * w1), (q_plus, l.c_plus * w1)] {
                        check(
                            (q - target).abs() <= 1e-5 * (1.0 + target.abs()),
                            format!("{tag}: kink quotient {q} vs C_b W'(b) = {target}"),
                            &mut failures,
                        );
                    }
                }
                // and at a smooth radius
                if !u.is_kink(b) {
                    let l = one_sided_chord_limits(&u, b, &w).unwrap();
                    let h = 1e-6 * b;
                    let ub = u.value(b).unwrap();
                    let q_minus = (ub - u.value(b - h).unwrap()) / h;
                    let q_plus = (u.value(b + h).unwrap() - ub) / h;
                    let w1 = w.d1(b).unwrap();
                    for (q, target) in [(q_minus, l.c_minus * w1), (q_plus, l.c_plus * w1)] {
                        check(
                            (q - target).abs() <= 1e-5,
                            format!("{tag}: quotient {q} vs C_b W'(b) = {target}"),
                            &mut failures,
                        );
                    }
                    let (d1, _) = u.derivatives(b).unwrap();
                    let ratio = d1 / w.d1(b).unwrap();
                    check(
                        (l.c_minus - ratio).abs() <= 1e-6 && (l.c_plus - ratio).abs() <= 1e-6,
                        format!("{tag}: limits {l:?} vs U'/W' = {ratio}"),
                        &mut failures,
                    );
                }
                let rep = verify_radial_equivalence(&u, &w, &default_profile_radii()).unwrap();
                check(
                    rep.pass,
                    format!("{tag}: radial certification failed: {rep:?}"),
                    &mut failures,
                );
                if name == "min{W,0}" && n == 2 && p == PValue::Finite(2.0) {
                    let k = u.kink_radii()[0];
                    let l = one_sided_chord_limits(&u, k, &w).unwrap();
                    check(
                        l.c_minus.abs() <= 1e-5 && (l.c_plus - 1.0).abs() <= 1e-5,
                        format!("kink limits {l:?}"),
                        &mut failures,
                    );
                    kink_pair = Some((l.c_minus, l.c_plus));
                }
            }
        }
    }
    check(kink_pair.is_some(), "min{W,0} kink not exercised".into(), &mut failures);
    let (cm, cp) = kink_pair.unwrap_or((f64::NAN, f64::NAN));
    outcome(
        failures,
        format!("{profiles} profiles, kink of min{{W,0}}: (C-, C+) = ({cm:.2e}, {cp:.8})"),
    )
}

fn theorem2_harness() -> Outcome {
    let mut s = Sampler::new(808);
    let mut failures = Vec::new();
    let mut worst_d = f64::NEG_INFINITY;
    let mut worst_l = f64::NEG_INFINITY;
    let mut cases = 0;
    let exclusion = 1e-2;
    for n in [2, 3] {
        for p in [PValue::Finite(2.0), PValue::Finite(4.0), PValue::Infinity] {
            let gallery = profile_gallery(n, p);
            for start in 0..gallery.len() {
                cases += 1;
                let placed: Vec<(RadialProfile, Vector)> = (0..3)
                    .map(|i| {
                        (
                            gallery[(start + i) % gallery.len()].1.clone(),
                            s.vector_in_box(n, -1.0, 1.0),
                        )
                    })
                    .collect();
                let scale = s.uniform(0.1, 1.0);
                let concave = random_concave_quadratic(&mut s, n, scale);
                let probe = ScalarField::WeightedSum {
                    terms: placed
                        .iter()
                        .map(|(u, c)| dominative::fields::Term {
                            coef: 1.0,
                            field: u.field(*c),
                        })
                        .collect(),
                };
                let samples: Vec<Vector> = (0..1000)
                    .map(|_| smooth_point(&mut s, &probe, n, 2.0, exclusion))
                    .collect();
                let rep = verify_theorem2(&placed, &concave, p, &samples, exclusion, 1e-9).unwrap();
                worst_d = worst_d.max(rep.max_dominative);
                worst_l = worst_l.max(rep.max_p_laplace);
                check(
                    rep.pass && rep.evaluated == 1000,
                    format!(
                        "n={n} p={p} start={start}: pass={} evaluated={} D={:e} Δ={:e} profiles={:?}",
                        rep.pass, rep.evaluated, rep.max_dominative, rep.max_p_laplace, rep.profiles_ok
                    ),
                    &mut failures,
                );
            }
        }
    }
    outcome(
        failures,
        format!("{cases} sums x 1000 samples, max D_p = {worst_d:.3e}, max Δ_p = {worst_l:.3e}"),
    )
}

fn oracle_cross_checks() -> Outcome {
    let mut s = Sampler::new(909);
    let mut failures = Vec::new();
    let mut worst_fd: f64 = 0.0;
    let mut fields = 0;
    for n in [2, 3] {
        for p in [
            PValue::Finite(2.0),
            PValue::Finite(3.0),
            PValue::Finite(4.0),
            PValue::Infinity,
        ] {
            for (name, f) in field_gallery(&mut s, n, p) {
                fields += 1;
                for _ in 0..5 {
                    let x = smooth_point(&mut s, &f, n, 2.0, 0.2);
                    let exact = f.eval_jet(&x).unwrap();
                    let fd = fd_jet(&f, &x, default_fd_step(&x)).unwrap();
                    let rel = fd.hessian.sub(&exact.hessian).frobenius() / exact.hessian.frobenius().max(1.0);
                    worst_fd = worst_fd.max(rel);
                    check(
                        rel <= 1e-4,
                        format!("{name} n={n} p={p} at {x:?}: Hessian relative error {rel:e}"),
                        &mut failures,
                    );
                }
            }
        }
    }
    let mut worst_eig: f64 = 0.0;
    for _ in 0..500 {
        let a = s.symmetric_matrix(3).scale(s.uniform(0.1, 10.0));
        let oracle = cubic_eigenvalues(&a);
        let got = jacobi_eigen(&a, JACOBI_TOL).unwrap().eigenvalues;
        let err = (0..3).map(|i| (oracle[i] - got[i]).abs()).fold(0.0, f64::max);
        worst_eig = worst_eig.max(err);
        check(err <= 1e-9, format!("3x3 eigenvalue error {err:e}"), &mut failures);
    }
    let mut worst_2d: f64 = 0.0;
    for _ in 0..500 {
        let j = Jet2 {
            value: 0.0,
            gradient: s.vector_in_box(2, -1.0, 1.0),
            hessian: s.symmetric_matrix(2),
        };
        for p in P_GRID {
            let err = (dominative(&j, p).unwrap() - dominative_2d(&j, p).unwrap()).abs();
            worst_2d = worst_2d.max(err);
            check(
                err <= 1e-10,
                format!("planar closed form differs by {err:e} at p={p}"),
                &mut failures,
            );
        }
    }
    outcome(
        failures,
        format!("{fields} fields: fd Hessian {worst_fd:.2e}; cubic oracle {worst_eig:.2e}; planar form {worst_2d:.2e}"),
    )
}

fn determinism() -> Outcome {
    let scenario = Scenario::from_json(RANDOM_CRANDALL).unwrap();
    let a = serde_json::to_string_pretty(&run(&scenario, RANDOM_CRANDALL.as_bytes(), RunOptions::default()).unwrap())
        .unwrap();
    let b = serde_json::to_string_pretty(&run(&scenario, RANDOM_CRANDALL.as_bytes(), RunOptions::default()).unwrap())
        .unwrap();
    let same = a == b;
    let digest = dominative::scenario::sha256_hex(a.as_bytes());
    Outcome {
        pass: same,
        detail: if same {
            format!("report sha256 {}", &digest[..16])
        } else {
            "reports differ".into()
        },
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "fundamental-solution annihilation",
            fundamental_annihilation,
            Duration::from_secs(1),
        ),
        (
            "cylindrical eigenstructure",
            cylindrical_eigenstructure,
            Duration::from_secs(2),
        ),
        (
            "superposition of Crandall sums",
            crandall_superposition,
            Duration::from_secs(10),
        ),
        (
            "matrix-symbol properties",
            matrix_symbol_properties,
            Duration::from_secs(2),
        ),
        ("domination", domination, Duration::from_secs(1)),
        ("counterexample constructors", counterexamples, Duration::from_secs(1)),
        ("chord machinery", chord_machinery, Duration::from_secs(5)),
        (
            "radial superposition harness",
            theorem2_harness,
            Duration::from_secs(10),
        ),
        ("oracle cross-checks", oracle_cross_checks, Duration::from_secs(5)),
        ("determinism", determinism, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        let in_time = elapsed <= *limit;
        let ok = pass && in_time;
        if !ok {
            failed += 1;
        }
        let timing = format!("{:.3} s of {} s", elapsed.as_secs_f64(), limit.as_secs());
        let verdict = if ok { "PASS" } else { "FAIL" };
        let late = if in_time { "" } else { " (over time limit)" };
        println!("criterion {:>2} {verdict} {name}: {detail} [{timing}{late}]", i + 1);
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
