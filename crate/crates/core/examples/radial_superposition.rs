//! Sums of p-superharmonic radial profiles with different centers, plus a
//! concave part, remain p-superharmonic at every smooth point.
//!
//! cargo run --example radial_superposition

use dominative::linalg::{SymMatrix, Vector};
use dominative::operators::PValue;
use dominative::radial::{default_profile_radii, verify_radial_equivalence, verify_theorem2, RadialProfile};
use dominative::sampling::Sampler;
use dominative::{RadialFundamental, ScalarField};

fn main() -> dominative::Result<()> {
    let (n, p) = (3, PValue::Finite(4.0));
    let w = RadialFundamental::new(n, p)?;
    let profiles = vec![
        (RadialProfile::fundamental(w), Vector::from_slice(&[0.0, 0.0, 0.0])),
        (RadialProfile::truncated(w, -3.0)?, Vector::from_slice(&[1.0, 0.0, 0.0])),
        (
            RadialProfile::min_pair(w, [1.0, 0.0], [2.0, 3.0])?,
            Vector::from_slice(&[0.0, 1.0, -0.5]),
        ),
        (
            RadialProfile::poly(vec![1.0, -1.0, -1.0])?,
            Vector::from_slice(&[-1.0, 0.5, 0.0]),
        ),
    ];
    for (u, _) in &profiles {
        let r = verify_radial_equivalence(u, &w, &default_profile_radii())?;
        println!(
            "{:<24} radial check {}  max D_p {:+.3e}",
            kind(u),
            r.pass,
            r.max_dominative
        );
    }

    let concave = ScalarField::quadratic(SymMatrix::identity(n).scale(-0.25), Vector::zeros(n), 0.0)?;
    let mut s = Sampler::new(5);
    let samples: Vec<Vector> = (0..2000).map(|_| s.vector_in_box(n, -2.0, 2.0)).collect();
    let rep = verify_theorem2(&profiles, &concave, p, &samples, 1e-2, 1e-9)?;
    println!(
        "\nsum: pass {}  evaluated {}  skipped {}",
        rep.pass,
        rep.evaluated,
        rep.skipped.len()
    );
    println!(
        "max Delta_p {:.4e}, max D_p {:.4e}",
        rep.max_p_laplace, rep.max_dominative
    );

    // a profile that is radially superharmonic but not dominative
    let bad = RadialProfile::neg_log1p(1.0)?;
    let r = verify_radial_equivalence(&bad, &w, &default_profile_radii())?;
    println!(
        "\n-ln(1+r): radial check {}  max D_p {:+.3e} at r = {:?}",
        r.pass, r.max_dominative, r.witness_radius
    );
    Ok(())
}

fn kind(u: &RadialProfile) -> String {
    let json = serde_json::to_value(u.shape()).unwrap_or_default();
    json["kind"].as_str().unwrap_or("?").to_string()
}
