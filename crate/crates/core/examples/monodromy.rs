//! Picard–Lefschetz monodromy of the vanishing cycle around `t = 0`.

use lmhs_heights::analytic::C64;
use lmhs_heights::degeneration::NodalFamily;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = NodalFamily::parse("x^3+x^2")?;
    for loops in 1..=2 {
        let r = family.monodromy_check(C64::new(1e-3, 0.0), loops, 1e-12)?;
        println!("{loops} loop(s): T = {:?}, unipotent {}, residual {:.1e}", r.matrix, r.unipotent, r.residual);
    }
    Ok(())
}
