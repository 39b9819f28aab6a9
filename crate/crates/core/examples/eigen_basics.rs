//! Symmetric eigen-decomposition and the matrix symbol F_p.
//!
//! cargo run --example eigen_basics

use dominative::linalg::{eigen, largest_eig, SymMatrix};
use dominative::operators::{matrix_symbol, PValue};

fn main() -> dominative::Result<()> {
    let x = SymMatrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, -1.0, 0.5], vec![0.0, 0.5, 0.3]])?;
    let sp = eigen(&x)?;
    println!("eigenvalues      {:?}", sp.eigenvalues.as_slice());
    println!("trace            {:.12}", x.trace());
    println!("sum of spectrum  {:.12}", sp.eigenvalues.as_slice().iter().sum::<f64>());

    let (lmax, v) = largest_eig(&x)?;
    println!("lambda_max       {lmax:.6} along {:?}", v.as_slice());

    println!("\n{:>6}  {:>12}", "p", "F_p(X)");
    for p in [2.0, 3.0, 4.0, 10.0] {
        println!("{p:>6}  {:>12.6}", matrix_symbol(&x, PValue::Finite(p))?);
    }
    println!("{:>6}  {:>12.6}", "inf", matrix_symbol(&x, PValue::Infinity)?);

    // adding a positive semidefinite matrix never lowers the symbol
    let bumped = x.add(&SymMatrix::outer(&v.scale(0.5)));
    let p = PValue::Finite(4.0);
    println!(
        "\nF_4(X) = {:.6} <= F_4(X + vvᵀ/4) = {:.6}",
        matrix_symbol(&x, p)?,
        matrix_symbol(&bumped, p)?
    );
    Ok(())
}
