//! Limit height of the nodal family `y² = x³ + x² + t` and its shift under
//! rescaling the base.

use lmhs_heights::arith::ratio;
use lmhs_heights::degeneration::{default_t_sequence, CornerOptions, NodalFamily};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = NodalFamily::parse("x^3+x^2")?;
    let ts = default_t_sequence();
    let opts = CornerOptions::default();
    let corner = family.lmhs_corner(&ts, &opts)?;
    for s in &corner.samples {
        println!("t = {:.0e}: single-valued corner {:.12}", s.t, s.single_valued.re);
    }
    println!("hgt(L_chi) = {:.12}", family.lmhs_height(&corner, 1e-9)?);
    println!("closed     = {:.12}", family.closed_form_corner()?);
    for (n, d) in [(2, 1), (1, 3), (5, 1)] {
        let shifted = family.rescale_base(&ratio(n, d))?.lmhs_corner(&ts, &opts)?;
        println!("λ = {n}/{d}: shift {:.10}", shifted.value.re - corner.value.re);
    }
    Ok(())
}
