//! Néron–Tate heights from the independent local-height oracle.

use lmhs_heights::global::{canonical_height, describe};
use lmhs_heights::nonarch::{EllipticCurveQ, RationalPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = EllipticCurveQ::parse("[0,0,1,-1,0]")?;
    let g = RationalPoint::parse("0,0")?;
    for n in 1..=4 {
        let h = canonical_height(&e, &e.multiply(&g, n))?;
        println!("ĥ({n}P) = {:.12}  (∞: {:.12}, finite: {})", h.value, h.archimedean, describe(&h.finite));
    }
    Ok(())
}
