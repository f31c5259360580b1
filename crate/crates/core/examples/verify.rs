//! Verifies the decomposition of the height into local pairings on every
//! built-in fixture.

use lmhs_heights::analytic::RegularizationOptions;
use lmhs_heights::global::{fixtures, verify_main_theorem, GlobalCurve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for fx in fixtures() {
        let curve = GlobalCurve::new(fx.curve()?, 1e-13)?;
        let (p, q) = fx.points()?;
        let (u, v) = fx.functions()?;
        let report = verify_main_theorem(&curve, &p, &q, &u, &v, &RegularizationOptions::default())?;
        println!("== {}", fx.name);
        print!("{report}");
    }
    Ok(())
}
