//! Tabulates D_p and Delta_p of a two-pole sum on a planar grid, no CLI needed.
//!
//! cargo run --example operator_grid

use dominative::linalg::Vector;
use dominative::operators::PValue;
use dominative::scenario::{sample_grid, GridSpec};
use dominative::superposition::{CrandallSum, Pole};

fn main() -> dominative::Result<()> {
    let p = PValue::Finite(3.0);
    let sum = CrandallSum::new(
        2,
        p,
        vec![
            Pole {
                c: 1.0,
                y: Vector::from_slice(&[-0.5, 0.0]),
            },
            Pole {
                c: 1.0,
                y: Vector::from_slice(&[0.5, 0.0]),
            },
        ],
        None,
    )?;
    let grid = GridSpec {
        axes: [0, 1],
        base: None,
        lo: [-1.0, -1.0],
        hi: [1.0, 1.0],
        resolution: [9, 9],
    };
    let rows = sample_grid(&sum.to_field(), p, &grid, 1e-2)?;

    println!("D_3 on a 9x9 grid (rows are y, columns are x; '  pole  ' marks excluded cells)");
    for row in rows.chunks(9) {
        let cells: Vec<String> = row
            .iter()
            .map(|r| r.values.map_or("  pole  ".to_string(), |v| format!("{:+.1e}", v[3])))
            .collect();
        println!("y = {:+.2}  {}", row[0].y, cells.join(" "));
    }
    let worst = rows
        .iter()
        .filter_map(|r| r.values)
        .map(|v| v[4])
        .fold(f64::NEG_INFINITY, f64::max);
    println!("\nmax Delta_3 over the grid: {worst:.3e}");
    Ok(())
}
