//! Period lattice of a complex Weierstrass curve.

use lmhs_heights::analytic::period_lattice;
use lmhs_heights::nonarch::EllipticCurveQ;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = EllipticCurveQ::parse("[0,0,1,-1,0]")?.to_complex()?;
    let l = period_lattice(&curve)?;
    println!("ω1 = {}", l.omega1);
    println!("ω2 = {}", l.omega2);
    println!("τ  = {}", l.tau());
    Ok(())
}
