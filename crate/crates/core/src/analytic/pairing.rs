//! Archimedean local pairings: the disjoint-support pairing
//! `Re ∫_{γ_D} η_E` and the regularized limit
//! `lim Re ∫_{q′}^{p′} η − log|u(p′)·v(q′)|`.

use serde::{Deserialize, Serialize};

use super::curve::{CurvePoint, WeierstrassCurveC, C64};
use super::differential::{
    divisor_degree, third_kind_differential, NormalizedDifferential, NumericOptions, ThirdKindDifferential,
};
use super::lattice::PeriodLattice;
use super::path::{continue_w, plan_scored, PathSegment};
use crate::algebra::RationalFunction;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::extrapolate::richardson;

/// Which family of approach paths the regularized limit uses. The two
/// choices differ in base point and approach direction, so they are in
/// general not homotopic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Primary,
    Alternate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationOptions {
    pub numeric: NumericOptions,
    pub first_exponent: i32,
    pub last_exponent: i32,
    pub convergence_tol: f64,
    pub route: Route,
}

impl Default for RegularizationOptions {
    fn default() -> Self {
        RegularizationOptions {
            numeric: NumericOptions::default(),
            first_exponent: 8,
            last_exponent: 20,
            convergence_tol: 1e-9,
            route: Route::Primary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedValue {
    pub value: f64,
    pub error: f64,
    pub order: usize,
    /// `(ε, F(ε))` pairs fed to the extrapolation.
    pub samples: Vec<(f64, f64)>,
}

impl RegularizedValue {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error)
    }
}

/// How approach points are parametrized: by an x-offset in the original
/// model, or directly in the working (translated) model.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Chart {
    Original,
    Working,
}

/// A straight approach into a pole of `η`, prepared up to the waypoint
/// `x_pole + ρ·dir` of the working model.
struct Approach {
    pole: CurvePoint,
    pole_w: CurvePoint,
    chart: Chart,
    dir: C64,
    waypoint: C64,
    w_waypoint: C64,
    base_value: C64,
    /// Largest admissible offset in the chart of `dir`.
    eps_cap: f64,
}

/// Original-chart distance from `x` to the nearest branch point or other pole.
fn original_radius(eta: &NormalizedDifferential, x: C64) -> f64 {
    let scale = eta.curve().scale();
    eta.residue_divisor()
        .iter()
        .filter_map(|(p, _)| p.x())
        .chain(eta.curve().branch_points())
        .map(|o| (o - x).norm())
        .filter(|d| *d > 1e-12 * scale)
        .fold(f64::INFINITY, f64::min)
}

impl Approach {
    fn new(eta: &NormalizedDifferential, pole: &CurvePoint, route: Route, avoid_base: Option<usize>) -> Result<(Self, usize)> {
        let curve = eta.curve();
        let pole_w = eta.to_working(pole);
        let x_pole = pole_w.x().expect("working poles are affine");
        let radius_w = 0.25 * eta.local_radius(x_pole);
        let chart = if eta.translation().is_infinity() || pole.is_infinity() { Chart::Working } else { Chart::Original };
        let obstacles = eta.pole_x_list();
        let mut options = Vec::new();
        for k in 0..12 {
            let dir = C64::from_polar(1.0, 0.3 + k as f64 * std::f64::consts::PI / 6.0);
            let (dir_w, cap) = match chart {
                Chart::Working => (dir, radius_w),
                Chart::Original => {
                    let r0 = 0.25 * original_radius(eta, pole.x().expect("affine"));
                    let dx = dir * (1e-6 * r0);
                    let dy = curve.y_offset(pole, dx);
                    let off = curve
                        .translated_x_offset(pole, dx, dy, &eta.translation())
                        .ok_or(Error::AuxiliarySearchFailed)?;
                    let gain = off.norm() / dx.norm();
                    (off / off.norm(), r0.min(radius_w / gain))
                }
            };
            let waypoint = x_pole + dir_w * radius_w;
            let exclude = if route == Route::Alternate { avoid_base } else { None };
            let (score, base, segs) = plan_scored(curve, waypoint, &obstacles, exclude);
            options.push((score, k, dir, dir_w, cap, base, segs));
        }
        options.sort_by(|a, b| b.0.total_cmp(&a.0));
        let pick = match route {
            Route::Primary => 0,
            Route::Alternate => {
                let best_k = options[0].1 as i64;
                options
                    .iter()
                    .position(|o| (3..=9).contains(&(o.1 as i64 - best_k).rem_euclid(12)))
                    .unwrap_or(1.min(options.len() - 1))
            }
        };
        let (_, _, dir, dir_w, eps_cap, base, segs) = options.swap_remove(pick);
        let waypoint = x_pole + dir_w * radius_w;
        let (value, w_end, _) = eta.odd_along(base, &segs)?;
        let w_pole = curve.w(&pole_w).expect("affine");
        let expected = continue_w(curve, x_pole, w_pole, waypoint);
        let sign = if (w_end - expected).norm() <= (w_end + expected).norm() { 1.0 } else { -1.0 };
        let approach = Approach {
            pole: *pole,
            pole_w,
            chart,
            dir,
            waypoint,
            w_waypoint: w_end * sign,
            base_value: value * sign,
            eps_cap,
        };
        Ok((approach, base))
    }

    /// The approach point (original model) at offset `eps`, together with
    /// the real potential `Re ∫_{base}^{p′} η` there.
    fn at(&self, eta: &NormalizedDifferential, eps: f64) -> Result<(CurvePoint, f64)> {
        let curve = eta.curve();
        let x_pole = self.pole_w.x().expect("affine");
        let (point, offset_w) = match self.chart {
            Chart::Working => {
                let dx = (x_pole + self.dir * eps) - x_pole;
                let dy = curve.y_offset(&self.pole_w, dx);
                let pw = CurvePoint::affine(x_pole + dx, self.pole_w.y().expect("affine") + dy);
                let point = if eta.translation().is_infinity() { pw } else { eta.from_working(&pw) };
                (point, dx)
            }
            Chart::Original => {
                let x0 = self.pole.x().expect("affine");
                let dx = (x0 + self.dir * eps) - x0;
                let dy = curve.y_offset(&self.pole, dx);
                let point = CurvePoint::affine(x0 + dx, self.pole.y().expect("affine") + dy);
                let off = curve
                    .translated_x_offset(&self.pole, dx, dy, &eta.translation())
                    .ok_or(Error::AuxiliarySearchFailed)?;
                (point, off)
            }
        };
        let xw = x_pole + offset_w;
        let (v, _, _) = eta.odd_continue(self.waypoint, self.w_waypoint, &[PathSegment::Line { to: xw }])?;
        let even = eta.even_near_pole(xw, x_pole, offset_w);
        Ok((point, even + (self.base_value + v).re))
    }
}

/// Numerical order of vanishing of `u` along the approach, from the ratio
/// of its values at the extreme offsets.
fn vanishing_order(u_big: C64, u_small: C64, eps_big: f64, eps_small: f64) -> f64 {
    (u_big.norm() / u_small.norm()).ln() / (eps_big / eps_small).ln()
}

/// Regularized `∫_q^p η_{p,q}` for local coordinates given as functions on
/// points of the original model.
pub fn regularized_integral_with<U, V>(
    eta: &ThirdKindDifferential,
    u: U,
    v: V,
    options: &RegularizationOptions,
) -> Result<RegularizedValue>
where
    U: Fn(&CurvePoint) -> C64,
    V: Fn(&CurvePoint) -> C64,
{
    let inner = eta.normalized();
    let (ap, base_p) = Approach::new(inner, &eta.pole_p(), options.route, None)?;
    let (aq, _) = Approach::new(inner, &eta.pole_q(), options.route, Some(base_p))?;
    let s = (0.5 * 2f64.powi(options.first_exponent) * ap.eps_cap.min(aq.eps_cap)).min(1.0);
    let mut hs = Vec::new();
    let mut fs = Vec::new();
    let mut u_ends = Vec::new();
    for j in options.first_exponent..=options.last_exponent {
        let eps = s * 0.5f64.powi(j);
        let (p_orig, pot_p) = ap.at(inner, eps)?;
        let (q_orig, pot_q) = aq.at(inner, eps)?;
        let uval = u(&p_orig);
        let vval = v(&q_orig);
        if !(uval.is_finite() && vval.is_finite()) || uval.norm() == 0.0 || vval.norm() == 0.0 {
            return Err(Error::BadLocalCoordinate { name: "u/v".into(), order: 0 });
        }
        u_ends.push((eps, uval, vval));
        fs.push(pot_p - pot_q - uval.norm().ln() - vval.norm().ln());
        hs.push(eps);
    }
    let (e0, u0, v0) = u_ends[0];
    let (e1, u1, v1) = u_ends[u_ends.len() - 1];
    for (name, big, small) in [("u", u0, u1), ("v", v0, v1)] {
        let order = vanishing_order(big, small, e0, e1);
        if (order - 1.0).abs() > 0.05 {
            return Err(Error::BadLocalCoordinate { name: name.into(), order: order.round() as i64 });
        }
    }
    let ex = richardson(&hs, &fs)?;
    if !(ex.error < options.convergence_tol) {
        return Err(Error::non_convergent("regularized limit extrapolation", ex.error));
    }
    Ok(RegularizedValue { value: ex.value, error: ex.error, order: ex.order, samples: hs.into_iter().zip(fs).collect() })
}

/// Evaluates a coordinate function at a complex point.
pub fn evaluate_function(f: &RationalFunction, p: &CurvePoint) -> C64 {
    match p {
        CurvePoint::Affine { x, y } => f.eval_complex(*x, *y),
        CurvePoint::Infinity => C64::new(f64::NAN, f64::NAN),
    }
}

/// `lim_{ε→0} Re ∫_{q′}^{p′} η_{p,q} − log|u(p′)·v(q′)|`.
pub fn regularized_integral(
    curve: &WeierstrassCurveC,
    lattice: &PeriodLattice,
    p: &CurvePoint,
    q: &CurvePoint,
    u: &RationalFunction,
    v: &RationalFunction,
    options: &RegularizationOptions,
) -> Result<RegularizedValue> {
    let eta = third_kind_differential(curve, lattice, p, q, options.numeric)?;
    regularized_integral_with(&eta, |z| evaluate_function(u, z), |z| evaluate_function(v, z), options)
}

fn merged(d: &[(CurvePoint, i64)], scale: f64) -> Vec<(CurvePoint, i64)> {
    let mut out: Vec<(CurvePoint, i64)> = Vec::new();
    for (p, m) in d {
        if let Some(e) = out.iter_mut().find(|(q, _)| q.distance(p) <= 1e-12 * (1.0 + scale)) {
            e.1 += m;
        } else {
            out.push((*p, *m));
        }
    }
    out.retain(|(_, m)| *m != 0);
    out
}

/// `⟨D, E⟩_∞ = Re ∫_{γ_D} η_E` for degree-zero divisors with disjoint
/// supports.
pub fn archimedean_disjoint_pairing(
    curve: &WeierstrassCurveC,
    lattice: &PeriodLattice,
    d: &[(CurvePoint, i64)],
    e: &[(CurvePoint, i64)],
    options: NumericOptions,
) -> Result<Estimate> {
    if divisor_degree(d) != 0 {
        return Err(Error::NonzeroDegree(divisor_degree(d)));
    }
    if divisor_degree(e) != 0 {
        return Err(Error::NonzeroDegree(divisor_degree(e)));
    }
    let scale = curve.scale();
    let d = merged(d, scale);
    let e = merged(e, scale);
    for (a, _) in &d {
        for (b, _) in &e {
            if a.distance(b) <= 1e-9 * (1.0 + scale) {
                return Err(Error::OverlappingSupports);
            }
        }
    }
    if d.is_empty() || e.is_empty() {
        return Ok(Estimate::exact(0.0));
    }
    let avoid: Vec<CurvePoint> = d.iter().map(|(p, _)| *p).collect();
    let eta = NormalizedDifferential::new(curve, lattice, &e, &avoid, options)?;
    let mut total = Estimate::exact(0.0);
    for (p, m) in &d {
        let pot = eta.working_potential(&eta.to_working(p))?;
        total = total + Estimate::new(pot.value * *m as f64, pot.error * (*m as f64).abs());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::lattice::period_lattice;

    fn setup() -> (WeierstrassCurveC, PeriodLattice) {
        let e = WeierstrassCurveC::from_real([0.0, 0.0, 1.0, -1.0, 0.0]).unwrap();
        let l = period_lattice(&e).unwrap();
        (e, l)
    }

    #[test]
    fn disjoint_pairing_is_symmetric() {
        let (e, l) = setup();
        let d = vec![(CurvePoint::real(0.0, 0.0), 1), (CurvePoint::real(1.0, 0.0), -1)];
        let f = vec![(CurvePoint::real(-1.0, -1.0), 1), (CurvePoint::real(2.0, -3.0), -1)];
        let a = archimedean_disjoint_pairing(&e, &l, &d, &f, NumericOptions::default()).unwrap();
        let b = archimedean_disjoint_pairing(&e, &l, &f, &d, NumericOptions::default()).unwrap();
        assert!((a.value - b.value).abs() < 1e-8, "{a:?} {b:?}");
    }

    #[test]
    fn zero_divisor_and_overlap() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let zero = vec![(p, 1), (p, -1)];
        let f = vec![(CurvePoint::real(-1.0, -1.0), 1), (CurvePoint::real(2.0, -3.0), -1)];
        assert_eq!(archimedean_disjoint_pairing(&e, &l, &zero, &f, NumericOptions::default()).unwrap().value, 0.0);
        let g = vec![(p, 1), (CurvePoint::Infinity, -1)];
        let h = vec![(p, 1), (CurvePoint::real(1.0, 0.0), -1)];
        assert_eq!(
            archimedean_disjoint_pairing(&e, &l, &g, &h, NumericOptions::default()),
            Err(Error::OverlappingSupports)
        );
    }

    #[test]
    fn regularized_limit_is_route_independent_and_scales() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let q = CurvePoint::Infinity;
        let u = RationalFunction::parse("x").unwrap();
        let v = RationalFunction::parse("x/y").unwrap();
        let opts = RegularizationOptions::default();
        let a = regularized_integral(&e, &l, &p, &q, &u, &v, &opts).unwrap();
        let alt = RegularizationOptions { route: Route::Alternate, ..opts };
        let b = regularized_integral(&e, &l, &p, &q, &u, &v, &alt).unwrap();
        assert!((a.value - b.value).abs() < 1e-8, "{a:?} {b:?}");
        let u2 = RationalFunction::parse("3*x").unwrap();
        let c = regularized_integral(&e, &l, &p, &q, &u2, &v, &opts).unwrap();
        assert!((c.value - (a.value - 3f64.ln())).abs() < 1e-8);
        let u3 = RationalFunction::parse("x + 5*x^2").unwrap();
        let d = regularized_integral(&e, &l, &p, &q, &u3, &v, &opts).unwrap();
        assert!((d.value - a.value).abs() < 1e-8);
    }

    #[test]
    fn bad_local_coordinate_rejected() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let q = CurvePoint::Infinity;
        let u = RationalFunction::parse("x^2").unwrap();
        let v = RationalFunction::parse("x/y").unwrap();
        let r = regularized_integral(&e, &l, &p, &q, &u, &v, &RegularizationOptions::default());
        assert!(matches!(r, Err(Error::BadLocalCoordinate { order: 2, .. })), "{r:?}");
    }
}
