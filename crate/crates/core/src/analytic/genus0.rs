//! The regularized integral on the projective line, where
//! `η = (1/(z − p) − 1/(z − q))·dz` has no periods.

use super::curve::C64;
use super::pairing::{RegularizationOptions, RegularizedValue};
use super::quad;
use crate::error::{Error, Result};
use crate::extrapolate::richardson;

/// Closed form `−2·log|p − q| − log|s_p| − log|s_q|` for local coordinates
/// `u = s_p·(z − p) + …`, `v = s_q·(z − q) + …`.
pub fn genus0_regularized_integral(p: C64, q: C64, s_p: C64, s_q: C64) -> Result<f64> {
    if p == q {
        return Err(Error::InvalidInput("genus-0 regularized integral needs p ≠ q".into()));
    }
    if s_p.norm() == 0.0 || s_q.norm() == 0.0 {
        return Err(Error::BadLocalCoordinate { name: "scale".into(), order: 0 });
    }
    Ok(-2.0 * (p - q).norm().ln() - s_p.norm().ln() - s_q.norm().ln())
}

/// `∫ g(z)·dz` along the segment `[a, b]` with pieces sized by the distance
/// to `singular`.
pub fn line_integral<G: Fn(C64) -> C64>(g: &G, a: C64, b: C64, singular: &[C64], tol: f64) -> Result<(C64, f64)> {
    let mut z = a;
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for _ in 0..100_000 {
        let remaining = (b - z).norm();
        if remaining == 0.0 {
            return Ok((total, err));
        }
        let r = singular.iter().map(|s| (z - s).norm()).fold(f64::INFINITY, f64::min);
        if r == 0.0 {
            return Err(Error::InvalidInput("segment passes through a pole".into()));
        }
        let h = remaining.min(0.5 * r);
        let step = (b - z) / remaining * h;
        let z0 = z;
        let mut f = |s: f64| [g(z0 + step * s) * step];
        let res = quad::adaptive(&mut f, 0.0, 1.0, tol, tol);
        if !res.converged {
            return Err(Error::non_convergent("line quadrature", res.error));
        }
        total += res.value[0];
        err += res.error;
        z = if h >= remaining { b } else { z0 + step };
    }
    Err(Error::non_convergent("line quadrature node budget", err))
}

/// The regularized limit on P¹ computed numerically: quadrature of `η`
/// between approach points along the segment `[q, p]`, log subtraction and
/// Richardson extrapolation in the offset.
pub fn regularized_integral_p1<U, V>(p: C64, q: C64, u: U, v: V, options: &RegularizationOptions) -> Result<RegularizedValue>
where
    U: Fn(C64) -> C64,
    V: Fn(C64) -> C64,
{
    if p == q {
        return Err(Error::InvalidInput("regularized integral needs p ≠ q".into()));
    }
    let d = (p - q).norm();
    let unit = (p - q) / d;
    let eta = |z: C64| 1.0 / (z - p) - 1.0 / (z - q);
    let s = (0.25 * 256.0 * d).min(1.0);
    let mut hs = Vec::new();
    let mut fs = Vec::new();
    for j in options.first_exponent..=options.last_exponent {
        let eps = s * 0.5f64.powi(j);
        let pp = p - unit * eps;
        let qq = q + unit * eps;
        let (integral, _) = line_integral(&eta, qq, pp, &[p, q], options.numeric.quad_eps)?;
        let (up, vq) = (u(pp), v(qq));
        if up.norm() == 0.0 || vq.norm() == 0.0 {
            return Err(Error::BadLocalCoordinate { name: "u/v".into(), order: 0 });
        }
        hs.push(eps);
        fs.push(integral.re - up.norm().ln() - vq.norm().ln());
    }
    let ex = richardson(&hs, &fs)?;
    if !(ex.error < options.convergence_tol) {
        return Err(Error::non_convergent("regularized limit extrapolation", ex.error));
    }
    Ok(RegularizedValue { value: ex.value, error: ex.error, order: ex.order, samples: hs.into_iter().zip(fs).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let one = C64::new(1.0, 0.0);
        assert!(genus0_regularized_integral(C64::new(0.0, 0.0), one, one, one).unwrap().abs() < 1e-15);
        let v = genus0_regularized_integral(C64::new(0.0, 0.0), C64::new(2.0, 0.0), one, one).unwrap();
        assert!((v + 2.0 * 2f64.ln()).abs() < 1e-15);
        let w = genus0_regularized_integral(C64::new(0.0, 0.0), C64::new(2.0, 0.0), 2.0 * one, one).unwrap();
        assert!((w - v + 2f64.ln()).abs() < 1e-15);
        assert!(genus0_regularized_integral(one, one, one, one).is_err());
    }

    #[test]
    fn numerical_matches_closed_form_with_curved_coordinates() {
        let p = C64::new(0.3, -0.7);
        let q = C64::new(-1.1, 0.4);
        let sp = C64::new(1.5, 0.5);
        let sq = C64::new(-0.25, 2.0);
        let u = |z: C64| sp * (z - p) + (z - p) * (z - p) * 3.0;
        let v = |z: C64| sq * (z - q) * (1.0 + (z - q) * C64::new(0.0, 1.0));
        let num = regularized_integral_p1(p, q, u, v, &RegularizationOptions::default()).unwrap();
        let exact = genus0_regularized_integral(p, q, sp, sq).unwrap();
        assert!((num.value - exact).abs() < 1e-8, "{} {}", num.value, exact);
    }
}
