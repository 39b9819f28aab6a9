//! Radial and cylindrical fundamental solutions, and how the operators vanish on them.
//!
//! cargo run --example fundamental_solutions

use dominative::fundsol::{gradient_is_top_eigenvector, Branch};
use dominative::linalg::{eigen, Vector};
use dominative::operators::{dominative, p_laplacian, PValue};
use dominative::sampling::Sampler;
use dominative::{CylFundamental, RadialFundamental, ScalarField};

fn main() -> dominative::Result<()> {
    println!(
        "{:>3} {:>5} {:>8} {:>12} {:>12} {:>12}",
        "n", "p", "branch", "W(0.5)", "W(1)", "W(2)"
    );
    for (n, p) in [(2, 2.0), (3, 2.0), (3, 3.0), (3, 4.0), (2, 4.0)] {
        let w = RadialFundamental::new(n, PValue::Finite(p))?;
        let branch = match w.branch() {
            Branch::Power => "power",
            Branch::Log => "log",
            Branch::Linear => "linear",
        };
        println!(
            "{n:>3} {p:>5} {branch:>8} {:>12.6} {:>12.6} {:>12.6}",
            w.value(0.5)?,
            w.value(1.0)?,
            w.value(2.0)?
        );
    }

    // a 2-cylindrical solution in R^4 depends on the distance to a plane
    let mut s = Sampler::new(3);
    let p = PValue::Finite(3.0);
    let cf = CylFundamental::new(s.orthonormal_columns(4, 2), Vector::zeros(4), 1.0, 0.0)?;
    let field = ScalarField::cylindrical(cf.clone(), p);
    println!("\n2-cylindrical in R^4, p = 3");
    for _ in 0..4 {
        let x = s.vector_in_box(4, -2.0, 2.0);
        let j = field.eval_jet(&x)?;
        let spec = eigen(&j.hessian)?;
        println!(
            "  r = {:.3}  D_p = {:+.1e}  Delta_p = {:+.1e}  eig = {:?}  grad on top: {}",
            cf.axis_distance(&x),
            dominative(&j, p)?,
            p_laplacian(&j, p),
            spec.eigenvalues
                .as_slice()
                .iter()
                .map(|v| format!("{v:.3}"))
                .collect::<Vec<_>>(),
            gradient_is_top_eigenvector(&cf, &x, p)?
        );
    }
    Ok(())
}
