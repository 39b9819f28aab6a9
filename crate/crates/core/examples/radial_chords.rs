//! Chords of a radial profile against the fundamental solution, their one-sided
//! limits, and the fundamental solution that touches the profile from above.
//!
//! cargo run --example radial_chords

use dominative::operators::PValue;
use dominative::radial::{chord_constant, one_sided_chord_limits, touching_from_above, RadialProfile};
use dominative::RadialFundamental;

fn main() -> dominative::Result<()> {
    let w = RadialFundamental::new(2, PValue::Finite(2.0))?;
    // min{-ln r, 0}: smooth except at r = 1
    let u = RadialProfile::truncated(w, 0.0)?;
    println!("kinks at {:?}", u.kink_radii());

    println!("\nchord constants C(a, b)");
    for (a, b) in [(0.2, 0.5), (0.5, 0.9), (0.9, 1.1), (1.1, 3.0)] {
        println!("  C({a}, {b}) = {:.6}", chord_constant(&u, a, b, &w)?);
    }

    println!("\n{:>6} {:>12} {:>12} {:>10} {:>8}", "b", "C-", "C+", "C1", "touches");
    for b in [0.0, 0.5, 1.0, 2.0] {
        let t = touching_from_above(&u, b, &w)?;
        // at the origin the touching function is a constant and there are no limits
        let (cm, cp) = t.limits.map_or(("-".to_string(), "-".to_string()), |l| {
            (format!("{:.8}", l.c_minus), format!("{:.8}", l.c_plus))
        });
        println!("{b:>6} {cm:>12} {cp:>12} {:>10.6} {:>8}", t.c1(), t.touches);
    }

    // on a smooth profile both limits equal U'/W'
    let v = RadialProfile::poly(vec![0.0, 0.0, -1.0])?;
    let l = one_sided_chord_limits(&v, 1.5, &w)?;
    let (d1, _) = v.derivatives(1.5)?;
    println!(
        "\n-r² at b = 1.5: C- = {:.8}, C+ = {:.8}, U'/W' = {:.8}",
        l.c_minus,
        l.c_plus,
        d1 / w.d1(1.5)?
    );
    Ok(())
}
