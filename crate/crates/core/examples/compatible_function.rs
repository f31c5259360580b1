//! The pairing recomputed through a compatible function `f`, for two
//! different choices of `f`.

use lmhs_heights::global::{compatible_function, describe, fixtures, CompatibleOptions, GlobalCurve};
use lmhs_heights::analytic::NumericOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fx = &fixtures()[1];
    let curve = GlobalCurve::new(fx.curve()?, 1e-13)?;
    let (p, q) = fx.points()?;
    let (u, v) = fx.functions()?;
    for seed in [0, 1] {
        let opts = CompatibleOptions { seed, ..CompatibleOptions::default() };
        let f = compatible_function(&curve.exact, &p, &q, &u, &v, &opts)?;
        let arch = f.archimedean(&curve.complex, &curve.lattice, NumericOptions::default())?;
        let fin = f.nonarch_total(&curve.exact)?;
        println!("seed {seed}: R = {}, S = {}, a = {}, b = {}", f.r, f.s, f.a, f.b);
        println!("  ∞: {:.12}  finite: {}  sum {:.12}", arch.value, describe(&fin), arch.value + fin.value());
    }
    Ok(())
}
