//! Without the dominative condition superposition fails: three constructions
//! that add a p-harmonic function to u and make the sum strictly subharmonic.
//!
//! cargo run --example counterexamples

use dominative::linalg::{SymMatrix, Vector};
use dominative::operators::PValue;
use dominative::superposition::{counterexample, Construction, CounterexampleKind};
use dominative::ScalarField;

fn main() -> dominative::Result<()> {
    // u = |x|²/2 has D_4 u = 2 + 3 = 5 > 0 everywhere
    let n = 3;
    let p = PValue::Finite(4.0);
    let u = ScalarField::quadratic(SymMatrix::identity(n), Vector::zeros(n), 0.0)?;
    let x0 = Vector::unit(n, 0);

    for kind in [
        CounterexampleKind::Linear,
        CounterexampleKind::Fundsol,
        CounterexampleKind::Reflection,
    ] {
        let ce = counterexample(kind, &u, &x0, p, None, None)?;
        let again = ce.recompute_witness(&u)?;
        println!(
            "{:<11} witness at {:?}: Delta_p(u+v) = {:.6} (recomputed {:.6})",
            format!("{kind:?}"),
            ce.witness_point.as_slice(),
            ce.witness_value,
            again
        );
        if let Construction::Fundsol { residual_trace, .. } = &ce.construction {
            for step in residual_trace.iter().step_by(5) {
                println!(
                    "{:>14} s = 2^{:<2}  rho = {:+.3e}",
                    "",
                    step.s.log2() as i32,
                    step.residual
                );
            }
        }
    }

    // a concave u has nothing to break
    let concave = ScalarField::quadratic(SymMatrix::identity(n).scale(-1.0), Vector::zeros(n), 0.0)?;
    match counterexample(CounterexampleKind::Linear, &concave, &x0, p, None, None) {
        Ok(_) => println!("\nunexpected counterexample"),
        Err(e) => println!("\nconcave u: {e}"),
    }
    Ok(())
}
