//! Archimedean regularized self-pairing of `P − Q` on 37a.

use lmhs_heights::algebra::RationalFunction;
use lmhs_heights::analytic::RegularizationOptions;
use lmhs_heights::global::{archimedean_regularized_self_pairing, GlobalCurve};
use lmhs_heights::nonarch::{EllipticCurveQ, RationalPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curve = GlobalCurve::new(EllipticCurveQ::parse("[0,0,1,-1,0]")?, 1e-13)?;
    let p = RationalPoint::parse("0,0")?;
    let q = RationalPoint::parse("6,14")?;
    let u = RationalFunction::parse("x")?;
    let v = RationalFunction::parse("x-6")?;
    let r = archimedean_regularized_self_pairing(&curve, &p, &q, &u, &v, &RegularizationOptions::default())?;
    println!("<P - Q, P - Q>_inf = {:.12} ± {:.1e} (Richardson order {})", r.value, r.error, r.order);
    Ok(())
}
