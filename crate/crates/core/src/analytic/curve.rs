//! Complex Weierstrass curves, points and the group law.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::roots::polynomial_roots;
use crate::error::{Error, Result};

pub type C64 = Complex64;

const ON_CURVE_TOL: f64 = 1e-12;

/// A point of `E(C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CurvePoint {
    Infinity,
    Affine { x: C64, y: C64 },
}

impl CurvePoint {
    pub fn affine(x: C64, y: C64) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn real(x: f64, y: f64) -> Self {
        CurvePoint::Affine { x: C64::new(x, 0.0), y: C64::new(y, 0.0) }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<C64> {
        match self {
            CurvePoint::Affine { x, .. } => Some(*x),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<C64> {
        match self {
            CurvePoint::Affine { y, .. } => Some(*y),
            CurvePoint::Infinity => None,
        }
    }

    /// Distance in the affine chart, infinite if either point is at infinity
    /// and the other is not.
    pub fn distance(&self, other: &CurvePoint) -> f64 {
        match (self, other) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => 0.0,
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                ((x1 - x2).norm_sqr() + (y1 - y2).norm_sqr()).sqrt()
            }
            _ => f64::INFINITY,
        }
    }
}

/// `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6` over C.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassCurveC {
    a: [C64; 5],
    b2: C64,
    b4: C64,
    b6: C64,
    b8: C64,
    disc: C64,
    roots: [C64; 3],
}

impl WeierstrassCurveC {
    /// Coefficients in the order `[a1, a2, a3, a4, a6]`.
    pub fn new(a: [C64; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        let b2 = a1 * a1 + 4.0 * a2;
        let b4 = 2.0 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4.0 * a6;
        let b8 = a1 * a1 * a6 + 4.0 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let disc = -b2 * b2 * b8 - 8.0 * b4 * b4 * b4 - 27.0 * b6 * b6 + 9.0 * b2 * b4 * b6;
        let scale = [b2.norm().powi(6), b4.norm().powi(3), b6.norm().powi(2), b8.norm().powf(1.5)]
            .into_iter()
            .fold(1e-300, f64::max);
        if disc.norm() <= 1e-13 * scale {
            return Err(Error::SingularCurve);
        }
        let r = polynomial_roots(&[b6, 2.0 * b4, b2, C64::new(4.0, 0.0)]);
        Ok(WeierstrassCurveC { a, b2, b4, b6, b8, disc, roots: [r[0], r[1], r[2]] })
    }

    pub fn from_real(a: [f64; 5]) -> Result<Self> {
        Self::new(a.map(|v| C64::new(v, 0.0)))
    }

    pub fn coefficients(&self) -> [C64; 5] {
        self.a
    }

    pub fn b_invariants(&self) -> [C64; 4] {
        [self.b2, self.b4, self.b6, self.b8]
    }

    pub fn discriminant(&self) -> C64 {
        self.disc
    }

    /// Whether all coefficients are real.
    pub fn is_real(&self) -> bool {
        self.a.iter().all(|c| c.im == 0.0)
    }

    /// Roots of `f(x) = 4x³ + b2·x² + 2b4·x + b6`, the x-coordinates of the
    /// 2-torsion points.
    pub fn branch_points(&self) -> [C64; 3] {
        self.roots
    }

    /// `f(x)`, so that `w² = f(x)` with `w = 2y + a1·x + a3`.
    pub fn f(&self, x: C64) -> C64 {
        ((4.0 * x + self.b2) * x + 2.0 * self.b4) * x + self.b6
    }

    /// `f(x) / (x - e)` for a branch point `e`, evaluated without cancellation.
    pub fn f_over(&self, x: C64, root: usize) -> C64 {
        let mut prod = C64::new(4.0, 0.0);
        for (i, e) in self.roots.iter().enumerate() {
            if i != root {
                prod *= x - e;
            }
        }
        prod
    }

    pub fn w(&self, p: &CurvePoint) -> Option<C64> {
        let [a1, _, a3, _, _] = self.a;
        match p {
            CurvePoint::Affine { x, y } => Some(2.0 * y + a1 * x + a3),
            CurvePoint::Infinity => None,
        }
    }

    pub fn y_from_w(&self, x: C64, w: C64) -> C64 {
        let [a1, _, a3, _, _] = self.a;
        (w - a1 * x - a3) * 0.5
    }

    /// Residual of the Weierstrass equation, relative to the size of its terms.
    pub fn relative_residual(&self, p: &CurvePoint) -> f64 {
        match p {
            CurvePoint::Infinity => 0.0,
            CurvePoint::Affine { x, y } => {
                let [a1, a2, a3, a4, a6] = self.a;
                let terms = [y * y, a1 * x * y, a3 * y, -x * x * x, -a2 * x * x, -a4 * x, -a6];
                let sum: C64 = terms.iter().sum();
                let size = terms.iter().map(|t| t.norm()).fold(1e-300, f64::max);
                sum.norm() / size
            }
        }
    }

    pub fn contains(&self, p: &CurvePoint) -> bool {
        self.relative_residual(p) < ON_CURVE_TOL
    }

    /// The two points above `x` (equal if `x` is a branch point).
    pub fn points_above(&self, x: C64) -> [CurvePoint; 2] {
        let w = self.f(x).sqrt();
        [CurvePoint::affine(x, self.y_from_w(x, w)), CurvePoint::affine(x, self.y_from_w(x, -w))]
    }

    pub fn neg(&self, p: &CurvePoint) -> CurvePoint {
        let [a1, _, a3, _, _] = self.a;
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(*x, -y - a1 * x - a3),
        }
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let [a1, a2, a3, a4, a6] = self.a;
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return *q,
            (_, CurvePoint::Infinity) => return *p,
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (*x1, *y1, *x2, *y2),
        };
        let scale = 1.0 + x1.norm().max(x2.norm());
        let (lambda, nu) = if (x1 - x2).norm() > 1e-13 * scale {
            let l = (y2 - y1) / (x2 - x1);
            (l, y1 - l * x1)
        } else {
            let den = 2.0 * y1 + a1 * x1 + a3;
            let neg_y2 = -y1 - a1 * x1 - a3;
            if den.norm() <= 1e-13 * (1.0 + y1.norm()) || (y2 - neg_y2).norm() < (y2 - y1).norm() {
                return CurvePoint::Infinity;
            }
            let l = (3.0 * x1 * x1 + 2.0 * a2 * x1 + a4 - a1 * y1) / den;
            let n = (-x1 * x1 * x1 + a4 * x1 + 2.0 * a6 - a3 * y1) / den;
            (l, n)
        };
        let x3 = lambda * lambda + a1 * lambda - a2 - x1 - x2;
        let y3 = -(lambda + a1) * x3 - nu - a3;
        CurvePoint::affine(x3, y3)
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        self.add(p, &self.neg(q))
    }

    /// `w(x0 + dx) − w0` on the sheet through `(x0, w0)`, computed without
    /// cancellation for small `dx`.
    pub fn w_offset(&self, x0: C64, w0: C64, dx: C64) -> C64 {
        let a = self.roots.map(|e| dx / (x0 - e));
        let ratio_minus_one = a[0] + a[1] + a[2] + a[0] * a[1] + a[0] * a[2] + a[1] * a[2] + a[0] * a[1] * a[2];
        w0 * ratio_minus_one / ((1.0 + ratio_minus_one).sqrt() + 1.0)
    }

    /// `y(x0 + dx) − y0` on the sheet through the affine point `p0`.
    pub fn y_offset(&self, p0: &CurvePoint, dx: C64) -> C64 {
        let [a1, _, _, _, _] = self.a;
        let x0 = p0.x().expect("affine point");
        let dw = self.w_offset(x0, self.w(p0).expect("affine"), dx);
        (dw - a1 * dx) * 0.5
    }

    /// For `P = p0 + (dx, dy)`, the x-offset `x(P + t) − x(p0 + t)`, computed
    /// from differences so that it stays accurate for tiny offsets. Requires
    /// `x(p0) ≠ x(t)`.
    pub fn translated_x_offset(&self, p0: &CurvePoint, dx: C64, dy: C64, t: &CurvePoint) -> Option<C64> {
        let [a1, _, _, _, _] = self.a;
        let (CurvePoint::Affine { x: x0, y: y0 }, CurvePoint::Affine { x: xt, y: yt }) = (p0, t) else {
            return None;
        };
        let d0 = xt - x0;
        let d1 = xt - (x0 + dx);
        if d0.norm() == 0.0 || d1.norm() == 0.0 {
            return None;
        }
        let lambda0 = (yt - y0) / d0;
        let lambda1 = (yt - (y0 + dy)) / d1;
        let dlambda = (dx * (yt - y0) - dy * d0) / (d0 * d1);
        Some(dlambda * (lambda0 + lambda1 + a1) - dx)
    }

    /// Typical length scale: the largest distance between branch points.
    pub fn scale(&self) -> f64 {
        let r = self.roots;
        (r[0] - r[1]).norm().max((r[1] - r[2]).norm()).max((r[0] - r[2]).norm())
    }

    /// `(x, y) ↦ (u²x, u³y)` rescaling of the model.
    pub fn rescaled(&self, u: C64) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = self.a;
        Self::new([u * a1, u.powi(2) * a2, u.powi(3) * a3, u.powi(4) * a4, u.powi(6) * a6])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e37() -> WeierstrassCurveC {
        WeierstrassCurveC::from_real([0.0, 0.0, 1.0, -1.0, 0.0]).unwrap()
    }

    #[test]
    fn discriminant_of_37a() {
        assert!((e37().discriminant() - C64::new(37.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn group_law_matches_known_multiples() {
        let e = e37();
        let p = CurvePoint::real(0.0, 0.0);
        let p2 = e.add(&p, &p);
        assert!(p2.distance(&CurvePoint::real(1.0, 0.0)) < 1e-12);
        let p3 = e.add(&p2, &p);
        assert!(p3.distance(&CurvePoint::real(-1.0, -1.0)) < 1e-12);
        let p5 = e.add(&p3, &p2);
        assert!(p5.distance(&CurvePoint::real(0.25, -0.625)) < 1e-12);
        assert!(e.add(&p, &e.neg(&p)).is_infinity());
        assert!(e.contains(&p5));
    }

    #[test]
    fn singular_curve_rejected() {
        assert_eq!(WeierstrassCurveC::from_real([0.0, 1.0, 0.0, 0.0, 0.0]), Err(Error::SingularCurve));
    }

    #[test]
    fn branch_points_are_two_torsion() {
        let e = e37();
        for x in e.branch_points() {
            let [p, q] = e.points_above(x);
            assert!(p.distance(&q) < 1e-7);
            assert!(e.w(&p).unwrap().norm() < 1e-7);
        }
    }
}
