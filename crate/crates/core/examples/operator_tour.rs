//! Every operator evaluated on the jet of one field at one point.
//!
//! cargo run --example operator_tour

use dominative::linalg::{SymMatrix, Vector};
use dominative::operators::{OperatorReport, PValue};
use dominative::ScalarField;

fn main() -> dominative::Result<()> {
    // u(x, y) = x² - y²/2 + x y + 0.3 x
    let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, -1.0]])?;
    let u = ScalarField::quadratic(a, Vector::from_slice(&[0.3, 0.0]), 0.0)?;
    let x = Vector::from_slice(&[0.4, -0.2]);
    let j = u.eval_jet(&x)?;
    println!("u = {:.4}, grad = {:?}", j.value, j.gradient.as_slice());

    println!(
        "\n{:>5} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "p", "Delta_p", "normalized", "D_p", "submissive", "lambda_max"
    );
    for p in [
        PValue::Finite(2.0),
        PValue::Finite(3.0),
        PValue::Finite(6.0),
        PValue::Infinity,
    ] {
        let r = OperatorReport::evaluate(&j, p)?;
        println!(
            "{:>5} {:>11.5} {:>11.5} {:>11.5} {:>11.5} {:>11.5}",
            p.to_string(),
            r.p_laplace,
            r.normalized_p.unwrap_or(f64::NAN),
            r.dominative,
            r.submissive,
            r.lambda_max
        );
    }

    // at a critical point only the Hessian matters
    let crit = Vector::from_slice(&[-0.1, -0.1]);
    let mut jc = u.eval_jet(&crit)?;
    jc.gradient = Vector::zeros(2);
    let r = OperatorReport::evaluate(&jc, PValue::Finite(4.0))?;
    println!(
        "\nat x = {:?}: |grad| = {:.2e}, D_4 = {:.4}, normalized = {:?}",
        crit.as_slice(),
        jc.gradient.norm(),
        r.dominative,
        r.normalized_p
    );
    Ok(())
}
