//! Sums of positively weighted fundamental solutions plus a concave quadratic
//! stay p-superharmonic, even though the p-Laplacian is nonlinear.
//!
//! cargo run --example crandall_superposition

use dominative::linalg::{SymMatrix, Vector};
use dominative::operators::PValue;
use dominative::sampling::Sampler;
use dominative::superposition::{verify_crandall, CrandallSum, Pole, SUPERPOSITION_TOL};
use dominative::ScalarField;

fn main() -> dominative::Result<()> {
    let (n, p) = (3, PValue::Finite(4.0));
    let poles = vec![
        Pole {
            c: 1.0,
            y: Vector::from_slice(&[0.0, 0.0, 0.0]),
        },
        Pole {
            c: 0.5,
            y: Vector::from_slice(&[1.0, 0.5, 0.0]),
        },
        Pole {
            c: 2.0,
            y: Vector::from_slice(&[-0.5, 1.0, 0.7]),
        },
    ];
    let concave = ScalarField::quadratic(SymMatrix::diag(&[-0.2, -0.1, -0.4]), Vector::zeros(n), 0.0)?;
    let sum = CrandallSum::new(n, p, poles, Some(concave))?;

    let mut s = Sampler::new(11);
    let samples: Vec<Vector> = (0..5000).map(|_| s.vector_in_box(n, -2.0, 2.0)).collect();
    let report = verify_crandall(&sum, &samples, 1e-2, SUPERPOSITION_TOL)?;
    println!("pass                 {}", report.pass);
    println!("evaluated / skipped  {} / {}", report.evaluated, report.skipped.len());
    println!(
        "max Delta_p          {:.4e} at {:?}",
        report.max_p_laplace, report.max_p_laplace_at
    );
    println!(
        "max D_p              {:.4e} at {:?}",
        report.max_dominative, report.max_dominative_at
    );

    // a negative weight breaks the hypothesis and is rejected up front
    let bad = CrandallSum::new(
        n,
        p,
        vec![Pole {
            c: -1.0,
            y: Vector::zeros(n),
        }],
        None,
    );
    println!("\nnegative weight      {}", bad.unwrap_err());
    Ok(())
}
