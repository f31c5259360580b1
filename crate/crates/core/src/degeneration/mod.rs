//! Nodal degenerations `y² = q(x) + κ·t` of elliptic curves.
//!
//! `q` is a monic cubic over Q with a double root `x0` (the node of the
//! central fiber) and a simple root `x1`. The central fiber is normalized by
//! `x = s² + x1`, `y = s·(s² − d)` with `d = x0 − x1`; the two branches
//! through the node sit at `s = ±√d`.
//!
//! The differential `μ = √d·dx/y` on the fibers has vanishing period
//! tending to `2πi`, and the limit of `∫_α μ − log t` is the corner entry
//! `I_χ` of the limit period matrix for `χ = dt`.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Poly, RationalFunction};
use crate::analytic::genus0::genus0_regularized_integral;
use crate::analytic::lattice::{cycle_integrals, period_lattice_with_tol};
use crate::analytic::path::distance_to_segment;
use crate::analytic::{Cycle, WeierstrassCurveC, C64};
use crate::arith::to_f64;
use crate::error::{Error, Result};
use crate::extrapolate::polyfit;
use crate::mhs::{height_of_lmhs_matrix, BiextensionPeriodMatrix};

/// A one-parameter family `y² = q(x) + κ·t` whose fiber at `t = 0` has a
/// single node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalFamily {
    q: Poly,
    kappa: BigRational,
    node: BigRational,
    other_root: BigRational,
    t_max: f64,
}

/// Scale factors of the node-adapted coordinates on the normalization.
///
/// With `ũ = y − X·√(X + d)`, `ṽ = y + X·√(X + d)` (`X = x − x0`) one has
/// `ũ·ṽ = κ·t`; restricted to the central fiber, `ṽ/κ` and `ũ` are local
/// coordinates at `p = √d` and `q = −√d` with linear terms `s_p·(s − p)` and
/// `s_q·(s − q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScales {
    pub p: C64,
    pub q: C64,
    /// `4d/κ`.
    pub s_p: String,
    /// `4d`.
    pub s_q: String,
    /// `|p − q|² = 4|d|`.
    pub distance_squared: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberPeriods {
    pub t: C64,
    /// Period of `μ` over the vanishing cycle `β(t)`; tends to `2πi`.
    pub vanishing: C64,
    /// Period of `μ` over `α(t)`, oriented so that `Im(α/β) > 0`.
    pub alpha: C64,
}

impl FiberPeriods {
    /// `α − log(t)·β/(2πi)`, single valued and holomorphic at `t = 0`.
    pub fn single_valued(&self) -> C64 {
        self.alpha - self.t.ln() * self.vanishing / C64::new(0.0, 2.0 * PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerSample {
    pub t: f64,
    pub vanishing: C64,
    pub alpha: C64,
    /// `∫_α μ − log t`.
    pub naive: C64,
    /// `α − log(t)·β/(2πi)`.
    pub single_valued: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmhsCorner {
    pub value: C64,
    pub error: f64,
    pub degree: usize,
    pub samples: Vec<CornerSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerOptions {
    pub quad_eps: f64,
    pub convergence_tol: f64,
}

impl Default for CornerOptions {
    fn default() -> Self {
        CornerOptions { quad_eps: 1e-13, convergence_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub t0: C64,
    pub loops: u32,
    /// Rows are the images of `β` and `α` in the `(β, α)` basis.
    pub matrix: [[i64; 2]; 2],
    /// Largest distance of the continued periods from the integer combination.
    pub residual: f64,
    pub unipotent: bool,
    /// `⟨α, β⟩` read off from `T(α) = α − ⟨α, β⟩·β`.
    pub intersection: i64,
}

impl NodalFamily {
    pub fn new(q: Poly, kappa: BigRational) -> Result<Self> {
        if q.degree() != Some(3) || !q.coeff(3).is_one() {
            return Err(Error::InvalidInput("q must be a monic cubic".into()));
        }
        if kappa.is_zero() {
            return Err(Error::InvalidInput("κ must be nonzero".into()));
        }
        let g = q.gcd(&q.derivative());
        if g.degree() != Some(1) {
            let what = if g.degree() == Some(2) { "a triple root (cusp)" } else { "no double root" };
            return Err(Error::InvalidInput(format!("q has {what}; a single node is required")));
        }
        let g = g.monic();
        let node = -g.coeff(0);
        let other_root = -q.coeff(2) - &node - &node;
        let x0 = to_f64(&node);
        let xc = -2.0 * to_f64(&q.coeff(2)) / 3.0 - x0;
        let t_max = (q.eval_complex(C64::new(xc, 0.0)).norm() / to_f64(&kappa).abs()).max(0.0);
        Ok(NodalFamily { q, kappa, node, other_root, t_max })
    }

    /// Parses a polynomial in `x` such as `"x^3+x^2"`, with `κ = 1`.
    pub fn parse(s: &str) -> Result<Self> {
        let f = RationalFunction::parse(s)?;
        let den = f
            .denominator()
            .as_constant()
            .ok_or_else(|| Error::parse("family", "expected a polynomial in x"))?;
        let mut coeffs = vec![BigRational::zero(); 4];
        for (&(i, j), c) in f.numerator().terms() {
            if j != 0 || i > 3 {
                return Err(Error::parse("family", "expected a cubic polynomial in x alone"));
            }
            coeffs[i as usize] = c / &den;
        }
        Self::new(Poly::new(coeffs), BigRational::one())
    }

    pub fn with_kappa(&self, kappa: BigRational) -> Result<Self> {
        Self::new(self.q.clone(), kappa)
    }

    /// The same family in the base coordinate `t' = λ·t`.
    pub fn rescale_base(&self, lambda: &BigRational) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::InvalidInput("λ must be nonzero".into()));
        }
        self.with_kappa(&self.kappa / lambda)
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn kappa(&self) -> &BigRational {
        &self.kappa
    }

    pub fn node(&self) -> &BigRational {
        &self.node
    }

    pub fn other_root(&self) -> &BigRational {
        &self.other_root
    }

    /// `d = x0 − x1`.
    pub fn node_gap(&self) -> BigRational {
        &self.node - &self.other_root
    }

    /// Radius of the disc around `t = 0` containing no other singular fiber.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn fiber(&self, t: C64) -> Result<WeierstrassCurveC> {
        let z = C64::new(0.0, 0.0);
        let c = |k: usize| C64::new(to_f64(&self.q.coeff(k)), 0.0);
        WeierstrassCurveC::new([z, c(2), z, c(1), c(0) + t * to_f64(&self.kappa)])
    }

    pub fn node_scales(&self) -> NodeScales {
        let d = self.node_gap();
        let four_d = &d * BigRational::from_integer(4.into());
        let root = C64::new(to_f64(&d), 0.0).sqrt();
        NodeScales {
            p: root,
            q: -root,
            s_p: crate::arith::format_rational(&(&four_d / &self.kappa)),
            s_q: crate::arith::format_rational(&four_d),
            distance_squared: crate::arith::format_rational(&four_d.abs()),
        }
    }

    /// `Re I_χ` as the regularized integral on the normalization:
    /// `−6·log 2 − 3·log|d| + log|κ|`.
    pub fn closed_form_corner(&self) -> Result<f64> {
        let d = self.node_gap();
        let sc = self.node_scales();
        let four_d = to_f64(&d) * 4.0;
        let kappa = to_f64(&self.kappa);
        genus0_regularized_integral(sc.p, sc.q, C64::new(four_d / kappa, 0.0), C64::new(four_d, 0.0))
    }

    fn mu_factor(&self) -> C64 {
        2.0 * C64::new(to_f64(&self.node_gap()), 0.0).sqrt()
    }

    fn check_t(&self, t: C64) -> Result<()> {
        let r = t.norm();
        if !(r > 0.0 && r < self.t_max) {
            return Err(Error::InvalidInput(format!(
                "|t| = {r:.3e} is outside the punctured disc of radius {:.3e}",
                self.t_max
            )));
        }
        Ok(())
    }

    /// Periods at real positive `r` from explicit cycles: `β` joins the two
    /// roots near the node, `α` joins one of them to the far root.
    fn ray_periods(&self, r: f64, quad_eps: f64) -> Result<FiberPeriods> {
        let curve = self.fiber(C64::new(r, 0.0))?;
        let roots = curve.branch_points();
        let x0 = C64::new(to_f64(&self.node), 0.0);
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| (roots[a] - x0).norm().total_cmp(&(roots[b] - x0).norm()));
        let (n0, n1, far) = (idx[0], idx[1], idx[2]);
        let clearance = |n: usize, o: usize| distance_to_segment(roots[o], roots[n], roots[far]);
        let (c0, c1) = (clearance(n0, n1), clearance(n1, n0));
        let start = if (c0 - c1).abs() > 1e-9 * c0.max(c1) {
            if c0 > c1 { n0 } else { n1 }
        } else {
            let key = |n: usize| (roots[n].im, roots[n].re);
            if key(n0) >= key(n1) { n0 } else { n1 }
        };
        let other = if start == n0 { n1 } else { n0 };
        let one = |_x: C64| [C64::new(1.0, 0.0)];
        let c = self.mu_factor();
        let mut beta = c * cycle_integrals(&curve, &Cycle { from: start, to: other, sign: 1.0 }, &[], &one, quad_eps)?[0];
        let mut alpha = c * cycle_integrals(&curve, &Cycle { from: start, to: far, sign: 1.0 }, &[], &one, quad_eps)?[0];
        if beta.im < 0.0 {
            beta = -beta;
        }
        if (alpha / beta).im < 0.0 {
            alpha = -alpha;
        }
        Ok(FiberPeriods { t: C64::new(r, 0.0), vanishing: beta, alpha })
    }

    fn mu_lattice(&self, t: C64, quad_eps: f64) -> Result<[C64; 2]> {
        let lat = period_lattice_with_tol(&self.fiber(t)?, quad_eps)?;
        let c = self.mu_factor();
        Ok([lat.omega1 * c, lat.omega2 * c])
    }

    /// Continues `(β, α)` from `start` along `t = |t0|·e^{iθ}`, `θ` from
    /// `theta0` to `theta1`, snapping to the lattice at every step.
    fn continue_arc(
        &self,
        start: FiberPeriods,
        theta0: f64,
        theta1: f64,
        quad_eps: f64,
    ) -> Result<(FiberPeriods, f64)> {
        let r = start.t.norm();
        let steps = ((theta1 - theta0).abs() / (2.0 * PI / 96.0)).ceil().max(1.0) as usize;
        let mut prev = [start.vanishing, start.alpha];
        let mut before = prev;
        let mut worst = 0.0f64;
        let mut t = start.t;
        for k in 1..=steps {
            let theta = theta0 + (theta1 - theta0) * k as f64 / steps as f64;
            t = C64::from_polar(r, theta);
            let basis = self.mu_lattice(t, quad_eps)?;
            let mut next = prev;
            for j in 0..2 {
                let predicted = prev[j] * 2.0 - before[j];
                let (v, off) = snap(predicted, basis)?;
                worst = worst.max(off);
                next[j] = v;
            }
            before = prev;
            prev = next;
        }
        if worst > 0.25 {
            return Err(Error::non_convergent("period continuation", worst));
        }
        Ok((FiberPeriods { t, vanishing: prev[0], alpha: prev[1] }, worst))
    }

    /// Periods of `μ` on the fiber at `t`, continued from the positive real
    /// axis (branch cut along the negative axis).
    pub fn fiber_periods(&self, t: C64, quad_eps: f64) -> Result<FiberPeriods> {
        self.check_t(t)?;
        let base = self.ray_periods(t.norm(), quad_eps)?;
        let theta = t.arg();
        if theta == 0.0 {
            return Ok(base);
        }
        let (mut out, _) = self.continue_arc(base, 0.0, theta, quad_eps)?;
        out.t = t;
        Ok(out)
    }

    /// Extrapolates `α(t) − log(t)·β(t)/(2πi)` to `t = 0` by a polynomial
    /// fit in `t` over the decreasing positive sequence `ts`.
    pub fn lmhs_corner(&self, ts: &[f64], options: &CornerOptions) -> Result<LmhsCorner> {
        if ts.len() < 6 {
            return Err(Error::InvalidInput("the t-sequence needs at least six terms".into()));
        }
        if ts.windows(2).any(|w| !(w[1] < w[0])) || ts.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidInput("the t-sequence must be positive and decreasing".into()));
        }
        for &t in ts {
            self.check_t(C64::new(t, 0.0))?;
        }
        let samples: Vec<CornerSample> = ts
            .par_iter()
            .map(|&t| {
                let fp = self.ray_periods(t, options.quad_eps)?;
                Ok(CornerSample {
                    t,
                    vanishing: fp.vanishing,
                    alpha: fp.alpha,
                    naive: fp.alpha - t.ln(),
                    single_valued: fp.single_valued(),
                })
            })
            .collect::<Result<_>>()?;
        let degree = 3.min(ts.len() - 3);
        let fit = |deg: usize| -> Result<C64> {
            let re: Vec<f64> = samples.iter().map(|s| s.single_valued.re).collect();
            let im: Vec<f64> = samples.iter().map(|s| s.single_valued.im).collect();
            Ok(C64::new(polyfit(ts, &re, deg)?[0], polyfit(ts, &im, deg)?[0]))
        };
        let value = fit(degree)?;
        let error = (value - fit(degree - 1)?).norm();
        if !(error < options.convergence_tol) {
            return Err(Error::non_convergent("LMHS corner extrapolation", error));
        }
        Ok(LmhsCorner { value, error, degree, samples })
    }

    /// The `1×2` limit period matrix `(I_χ | 2πi)`.
    pub fn lmhs_period_matrix(&self, corner: &LmhsCorner) -> BiextensionPeriodMatrix {
        BiextensionPeriodMatrix::scalar(corner.value, C64::new(0.0, 2.0 * PI))
    }

    /// `hgt(L_χ)` from the limit period matrix.
    pub fn lmhs_height(&self, corner: &LmhsCorner, im_tol: f64) -> Result<f64> {
        height_of_lmhs_matrix(&self.lmhs_period_matrix(corner), im_tol)
    }

    /// Continues the periods `loops` times around `|t| = |t0|` and reads off
    /// the integer monodromy matrix.
    pub fn monodromy_check(&self, t0: C64, loops: u32, quad_eps: f64) -> Result<MonodromyReport> {
        let start = self.fiber_periods(t0, quad_eps)?;
        let theta = t0.arg();
        let (end, _) = self.continue_arc(start, theta, theta + 2.0 * PI * loops as f64, quad_eps)?;
        let basis = [start.vanishing, start.alpha];
        let mut matrix = [[0i64; 2]; 2];
        let mut residual = 0.0f64;
        for (row, z) in [end.vanishing, end.alpha].into_iter().enumerate() {
            let (a, b) = real_coordinates(z, basis)?;
            let (ra, rb) = (a.round(), b.round());
            residual = residual.max((a - ra).abs()).max((b - rb).abs());
            matrix[row] = [ra as i64, rb as i64];
        }
        if residual > 1e-6 {
            return Err(Error::non_convergent("monodromy matrix is not integral", residual));
        }
        let n = [[matrix[0][0] - 1, matrix[0][1]], [matrix[1][0], matrix[1][1] - 1]];
        let sq = |i: usize, j: usize| n[i][0] * n[0][j] + n[i][1] * n[1][j];
        let unipotent = (0..2).all(|i| (0..2).all(|j| sq(i, j) == 0));
        Ok(MonodromyReport { t0, loops, matrix, residual, unipotent, intersection: -matrix[1][0] })
    }
}

/// Real coordinates of `z` in the real basis `{b0, b1}` of C.
fn real_coordinates(z: C64, b: [C64; 2]) -> Result<(f64, f64)> {
    let det = b[0].re * b[1].im - b[1].re * b[0].im;
    if det.abs() < 1e-14 * b[0].norm() * b[1].norm() {
        return Err(Error::DegenerateCentralPeriods);
    }
    let a = (z.re * b[1].im - b[1].re * z.im) / det;
    let c = (b[0].re * z.im - z.re * b[0].im) / det;
    Ok((a, c))
}

/// Nearest lattice vector to `z`, with the coordinate rounding offset.
fn snap(z: C64, b: [C64; 2]) -> Result<(C64, f64)> {
    let (a, c) = real_coordinates(z, b)?;
    let (ra, rc) = (a.round(), c.round());
    Ok((b[0] * ra + b[1] * rc, (a - ra).abs().max((c - rc).abs())))
}

/// `t_j = 10^{-j}` for `j = 2..=8`.
pub fn default_t_sequence() -> Vec<f64> {
    (2..=8).map(|j| 10f64.powi(-j)).collect()
}

/// `steps` values spaced geometrically from `tmax` down to `tmin`.
pub fn geometric_t_sequence(tmin: f64, tmax: f64, steps: usize) -> Result<Vec<f64>> {
    if !(tmin > 0.0 && tmax > tmin) || steps < 2 {
        return Err(Error::InvalidInput("need 0 < tmin < tmax and at least two steps".into()));
    }
    let ratio = (tmin / tmax).ln() / (steps - 1) as f64;
    Ok((0..steps).map(|k| tmax * (ratio * k as f64).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family() -> NodalFamily {
        NodalFamily::parse("x^3+x^2").unwrap()
    }

    #[test]
    fn node_and_disc() {
        let f = family();
        assert_eq!(f.node(), &BigRational::zero());
        assert_eq!(f.other_root(), &BigRational::from_integer((-1).into()));
        assert!((f.t_max() - 4.0 / 27.0).abs() < 1e-15);
        assert!(NodalFamily::parse("x^3").is_err());
        assert!(NodalFamily::parse("x^3+x+1").is_err());
        assert!(NodalFamily::parse("x^3+x^2+y").is_err());
    }

    #[test]
    fn closed_form_value() {
        assert!((family().closed_form_corner().unwrap() + 6.0 * 2f64.ln()).abs() < 1e-14);
        let g = NodalFamily::parse("x^3-3*x+2").unwrap();
        assert_eq!(g.node(), &BigRational::one());
        let expected = -6.0 * 2f64.ln() - 3.0 * 3f64.ln();
        assert!((g.closed_form_corner().unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn vanishing_period_tends_to_two_pi_i() {
        let fp = family().fiber_periods(C64::new(1e-6, 0.0), 1e-13).unwrap();
        assert!((fp.vanishing - C64::new(0.0, 2.0 * PI)).norm() < 1e-3);
    }

    #[test]
    fn conjugate_parameter_gives_conjugate_periods() {
        let f = family();
        let t = C64::new(3e-3, 2e-3);
        let a = f.fiber_periods(t, 1e-13).unwrap();
        let b = f.fiber_periods(t.conj(), 1e-13).unwrap();
        assert!((a.vanishing + b.vanishing.conj()).norm() < 1e-8);
        let k = (a.alpha - b.alpha.conj()) / a.vanishing;
        assert!(k.im.abs() < 1e-8 && (k.re - k.re.round()).abs() < 1e-8, "{k}");
    }

    #[test]
    fn corner_matches_closed_form() {
        let f = family();
        let c = f.lmhs_corner(&default_t_sequence(), &CornerOptions::default()).unwrap();
        let exact = f.closed_form_corner().unwrap();
        assert!((c.value.re - exact).abs() < 1e-6, "{} {}", c.value.re, exact);
        let h = f.lmhs_height(&c, 1e-9).unwrap();
        assert!((h - c.value.re).abs() < 1e-12);
    }

    #[test]
    fn halved_sequence_gives_same_limit() {
        let f = family();
        let ts = default_t_sequence();
        let half: Vec<f64> = ts.iter().map(|t| t / 2.0).collect();
        let a = f.lmhs_corner(&ts, &CornerOptions::default()).unwrap();
        let b = f.lmhs_corner(&half, &CornerOptions::default()).unwrap();
        assert!((a.value.re - b.value.re).abs() < 1e-6);
    }

    #[test]
    fn base_rescaling_shifts_by_log_lambda() {
        let f = family();
        let ts = default_t_sequence();
        let base = f.lmhs_corner(&ts, &CornerOptions::default()).unwrap().value.re;
        for (n, d) in [(2, 1), (1, 3), (5, 1)] {
            let lambda = BigRational::new(n.into(), d.into());
            let g = f.rescale_base(&lambda).unwrap();
            let v = g.lmhs_corner(&ts, &CornerOptions::default()).unwrap().value.re;
            assert!((v - base + to_f64(&lambda).ln()).abs() < 1e-7);
        }
    }

    #[test]
    fn shifted_node_matches_closed_form() {
        let g = NodalFamily::parse("x^3-3*x+2").unwrap();
        let ts: Vec<f64> = (3..=9).map(|j| 10f64.powi(-j)).collect();
        let c = g.lmhs_corner(&ts, &CornerOptions::default()).unwrap();
        assert!((c.value.re - g.closed_form_corner().unwrap()).abs() < 1e-6);
    }

    #[test]
    fn picard_lefschetz() {
        let f = family();
        let r = f.monodromy_check(C64::new(1e-3, 0.0), 1, 1e-12).unwrap();
        assert_eq!(r.matrix, [[1, 0], [1, 1]]);
        assert!(r.unipotent);
        let r2 = f.monodromy_check(C64::new(1e-3, 0.0), 2, 1e-12).unwrap();
        assert_eq!(r2.matrix, [[1, 0], [2, 1]]);
    }
}
