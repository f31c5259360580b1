//! Exact local pairings at the bad primes of a curve with I4 reduction.

use lmhs_heights::algebra::RationalFunction;
use lmhs_heights::global::describe;
use lmhs_heights::nonarch::{describe_term, EllipticCurveQ, NonarchContext, RationalPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = EllipticCurveQ::parse("[0,-1,1,-5,-16]")?;
    let p = RationalPoint::parse("4,3")?;
    let q = RationalPoint::parse("inf")?;
    let ctx = NonarchContext::new(&e, &p, &q, &RationalFunction::parse("x-4")?, &RationalFunction::parse("x/y")?)?;
    for t in ctx.terms()? {
        println!("{}", describe_term(&t));
    }
    let total = ctx.total()?;
    println!("total: {} = {:.12}", describe(&total), total.value());
    Ok(())
}
