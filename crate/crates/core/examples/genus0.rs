//! Regularized integral on the projective line against its closed form.

use lmhs_heights::analytic::{genus0_regularized_integral, regularized_integral_p1, RegularizationOptions, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, q) = (C64::new(0.3, -0.2), C64::new(-1.1, 0.7));
    let (sp, sq) = (C64::new(2.0, 1.0), C64::new(-0.5, 0.0));
    let u = move |z: C64| sp * (z - p) + (z - p) * (z - p);
    let v = move |z: C64| sq * (z - q) * (1.0 + (z - q) * (z - q));
    let numeric = regularized_integral_p1(p, q, u, v, &RegularizationOptions::default())?;
    let exact = genus0_regularized_integral(p, q, sp, sq)?;
    println!("numeric     {:.15} ± {:.1e}", numeric.value, numeric.error);
    println!("closed form {exact:.15}");
    Ok(())
}
