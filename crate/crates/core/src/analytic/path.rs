//! Paths in the x-plane lifted to the curve by analytic continuation of
//! `w = 2y + a1·x + a3`, and the piecewise quadrature that walks them.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::curve::{CurvePoint, WeierstrassCurveC, C64};
use super::quad;
use crate::error::{Error, Result};

const MAX_PIECES: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSegment {
    Line { to: C64 },
    Arc { center: C64, sweep: f64 },
}

/// A path on the curve: a start point (which fixes the sheet) followed by
/// segments in the x-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationPath {
    pub start: CurvePoint,
    pub segments: Vec<PathSegment>,
}

impl IntegrationPath {
    pub fn from(start: CurvePoint) -> Self {
        IntegrationPath { start, segments: Vec::new() }
    }

    pub fn line_to(mut self, to: C64) -> Self {
        self.segments.push(PathSegment::Line { to });
        self
    }

    /// Counterclockwise for positive `sweep` (radians).
    pub fn arc(mut self, center: C64, sweep: f64) -> Self {
        self.segments.push(PathSegment::Arc { center, sweep });
        self
    }

    /// A full circle of radius `r` around `point`, starting and ending at the
    /// lift of `x(point) + r` on the sheet of `point`.
    pub fn circle_around(curve: &WeierstrassCurveC, point: &CurvePoint, r: f64) -> Result<Self> {
        let x0 = point.x().ok_or_else(|| Error::InvalidInput("circle around the point at infinity".into()))?;
        let w0 = curve.w(point).unwrap_or_default();
        let start_x = x0 + r;
        let w = continue_w(curve, x0, w0, start_x);
        let start = CurvePoint::affine(start_x, curve.y_from_w(start_x, w));
        Ok(IntegrationPath::from(start).arc(x0, 2.0 * PI))
    }

    pub fn concat(mut self, other: &IntegrationPath) -> Self {
        self.segments.extend(other.segments.iter().copied());
        self
    }

    pub fn end_x(&self) -> Option<C64> {
        let mut x = self.start.x()?;
        for s in &self.segments {
            x = match *s {
                PathSegment::Line { to } => to,
                PathSegment::Arc { center, sweep } => center + (x - center) * Complex64::from_polar(1.0, sweep),
            };
        }
        Some(x)
    }
}

/// Continues `w` from `(x0, w0)` to `x` through the principal branch of
/// `sqrt(f(x)/f(x0))`; valid while `x` stays in a disc around `x0` free of
/// branch points with radius at most half the distance to the nearest one.
pub(crate) fn continue_w(curve: &WeierstrassCurveC, x0: C64, w0: C64, x: C64) -> C64 {
    let mut ratio = Complex64::new(1.0, 0.0);
    for e in curve.branch_points() {
        ratio *= (x - e) / (x0 - e);
    }
    w0 * ratio.sqrt()
}

/// Where the walk starts: at a branch point (sheet irrelevant) or at a
/// regular point with a given `w`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Start {
    Branch(usize),
    Regular { x: C64, w: C64 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct WalkResult<const N: usize> {
    pub value: [C64; N],
    #[allow(dead_code)]
    pub x_end: C64,
    pub w_end: C64,
    pub error: f64,
}

/// Integrates `g(x, w)·dx` along the segments, starting at `start`.
/// `obstacles` are x-values (besides branch points) where `g` is singular;
/// pieces are sized to keep each one well inside the disc of analyticity.
pub(crate) fn walk<const N: usize, G: Fn(C64, C64) -> [C64; N]>(
    curve: &WeierstrassCurveC,
    start: Start,
    segments: &[PathSegment],
    obstacles: &[C64],
    g: &G,
    tol: f64,
) -> Result<WalkResult<N>> {
    let roots = curve.branch_points();
    let scale = curve.scale().max(1e-300);
    let mut all: Vec<C64> = roots.to_vec();
    all.extend_from_slice(obstacles);
    let dist = |z: C64, skip: Option<usize>| -> f64 {
        all.iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, o)| (z - o).norm())
            .fold(f64::INFINITY, f64::min)
    };

    let mut acc = [C64::new(0.0, 0.0); N];
    let mut err = 0.0;
    let mut pieces = 0usize;
    let add = |v: [C64; N], e: f64, acc: &mut [C64; N], err: &mut f64| {
        for n in 0..N {
            acc[n] += v[n];
        }
        *err += e;
    };

    let (mut x, mut w, mut seg_start) = match start {
        Start::Regular { x, w } => (x, w, 0usize),
        Start::Branch(k) => {
            let e = roots[k];
            let Some(PathSegment::Line { to }) = segments.first().copied() else {
                return Err(Error::InvalidInput("a walk from a branch point must begin with a line".into()));
            };
            let total = (to - e).norm();
            if total == 0.0 {
                return Err(Error::InvalidInput("empty first segment".into()));
            }
            let dir = (to - e) / total;
            let r = dist(e, Some(k));
            let h = total.min(0.5 * r);
            let tau1 = (dir * h).sqrt();
            let sqrt_h0 = curve.f_over(e, k).sqrt();
            let sqrt_h = |x: C64| {
                let mut ratio = Complex64::new(1.0, 0.0);
                for (i, ei) in roots.iter().enumerate() {
                    if i != k {
                        ratio *= (x - ei) / (e - ei);
                    }
                }
                sqrt_h0 * ratio.sqrt()
            };
            let mut f = |s: f64| {
                let tau = tau1 * s;
                let xs = e + tau * tau;
                let ws = tau * sqrt_h(xs);
                let v = g(xs, ws);
                let jac = 2.0 * tau * tau1;
                let mut out = [C64::new(0.0, 0.0); N];
                for n in 0..N {
                    out[n] = v[n] * jac;
                }
                out
            };
            let r = quad::adaptive(&mut f, 0.0, 1.0, tol, tol);
            if !r.converged {
                return Err(Error::non_convergent("quadrature near a branch point", r.error));
            }
            add(r.value, r.error, &mut acc, &mut err);
            let x1 = e + tau1 * tau1;
            let w1 = tau1 * sqrt_h(x1);
            if h < total {
                (x1, w1, 0usize)
            } else {
                (to, w1, 1usize)
            }
        }
    };

    while seg_start < segments.len() {
        match segments[seg_start] {
            PathSegment::Line { to } => loop {
                let remaining = (to - x).norm();
                if remaining <= 1e-15 * scale.max(to.norm()) {
                    x = to;
                    break;
                }
                let r = dist(x, None);
                if r < 1e-14 * scale {
                    return Err(Error::InvalidInput("integration path meets a singular point".into()));
                }
                let h = remaining.min(0.5 * r);
                let step = (to - x) / remaining * h;
                let (x0, w0) = (x, w);
                let mut f = |s: f64| {
                    let xs = x0 + step * s;
                    let v = g(xs, continue_w(curve, x0, w0, xs));
                    let mut out = [C64::new(0.0, 0.0); N];
                    for n in 0..N {
                        out[n] = v[n] * step;
                    }
                    out
                };
                let res = quad::adaptive(&mut f, 0.0, 1.0, tol, tol);
                if !res.converged {
                    return Err(Error::non_convergent("path quadrature", res.error));
                }
                add(res.value, res.error, &mut acc, &mut err);
                x = if h >= remaining { to } else { x0 + step };
                w = continue_w(curve, x0, w0, x);
                pieces += 1;
                if pieces > MAX_PIECES {
                    return Err(Error::non_convergent("path quadrature node budget", err));
                }
                if h >= remaining {
                    break;
                }
            },
            PathSegment::Arc { center, sweep } => {
                let radius = (x - center).norm();
                let theta0 = (x - center).arg();
                let mut done = 0.0f64;
                while done.abs() < sweep.abs() {
                    let r = dist(x, None);
                    if r < 1e-14 * scale || radius == 0.0 {
                        return Err(Error::InvalidInput("integration path meets a singular point".into()));
                    }
                    let dtheta = (0.5 * r / radius).min(sweep.abs() - done.abs()) * sweep.signum();
                    let (x0, w0, th0) = (x, w, theta0 + done);
                    let mut f = |s: f64| {
                        let th = th0 + dtheta * s;
                        let z = Complex64::from_polar(radius, th);
                        let xs = center + z;
                        let v = g(xs, continue_w(curve, x0, w0, xs));
                        let jac = C64::i() * z * dtheta;
                        let mut out = [C64::new(0.0, 0.0); N];
                        for n in 0..N {
                            out[n] = v[n] * jac;
                        }
                        out
                    };
                    let res = quad::adaptive(&mut f, 0.0, 1.0, tol, tol);
                    if !res.converged {
                        return Err(Error::non_convergent("arc quadrature", res.error));
                    }
                    add(res.value, res.error, &mut acc, &mut err);
                    done += dtheta;
                    x = center + Complex64::from_polar(radius, theta0 + done);
                    w = continue_w(curve, x0, w0, x);
                    pieces += 1;
                    if pieces > MAX_PIECES {
                        return Err(Error::non_convergent("path quadrature node budget", err));
                    }
                }
            }
        }
        seg_start += 1;
    }
    Ok(WalkResult { value: acc, x_end: x, w_end: w, error: err })
}

/// Minimal distance from `z` to the closed segment `[a, b]`.
pub(crate) fn distance_to_segment(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Chooses a polyline from one of the branch points to `target` keeping the
/// largest clearance from `obstacles`. Returns the branch index and the
/// segment list.
pub(crate) fn plan_from_branch(
    curve: &WeierstrassCurveC,
    target: C64,
    obstacles: &[C64],
) -> (usize, Vec<PathSegment>) {
    let (_, k, segs) = plan_scored(curve, target, obstacles, None);
    (k, segs)
}

/// As [`plan_from_branch`], also returning the clearance score, optionally
/// excluding one branch point as the base.
pub(crate) fn plan_scored(
    curve: &WeierstrassCurveC,
    target: C64,
    obstacles: &[C64],
    exclude: Option<usize>,
) -> (f64, usize, Vec<PathSegment>) {
    let roots = curve.branch_points();
    let scale = curve.scale();
    let mut best: Option<(f64, usize, Vec<PathSegment>)> = None;
    for (k, &e) in roots.iter().enumerate() {
        if Some(k) == exclude {
            continue;
        }
        let blockers: Vec<C64> = roots
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, r)| *r)
            .chain(obstacles.iter().copied())
            .collect();
        let len = (target - e).norm();
        let u = if len > 0.0 { (target - e) / len } else { C64::new(1.0, 0.0) };
        let mid = (e + target) * 0.5;
        let mut candidates = vec![vec![e, target]];
        for s in [0.3, -0.3, 0.6, -0.6, 1.0, -1.0] {
            candidates.push(vec![e, mid + C64::i() * u * (s * len.max(0.1 * scale)), target]);
        }
        for (ci, poly) in candidates.into_iter().enumerate() {
            let clearance = blockers
                .iter()
                .map(|&o| {
                    poly.windows(2).map(|ab| distance_to_segment(o, ab[0], ab[1])).fold(f64::INFINITY, f64::min)
                })
                .fold(f64::INFINITY, f64::min);
            let penalty = if ci == 0 { 1.0 } else { 0.8 };
            let score = clearance * penalty;
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                let segs = poly[1..].iter().map(|&to| PathSegment::Line { to }).collect();
                best = Some((score, k, segs));
            }
        }
    }
    best.expect("at least two branch points")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> WeierstrassCurveC {
        WeierstrassCurveC::from_real([0.0, 0.0, 1.0, -1.0, 0.0]).unwrap()
    }

    #[test]
    fn continuation_tracks_the_curve_equation() {
        let e = curve();
        let p = CurvePoint::real(0.0, 0.0);
        let w0 = e.w(&p).unwrap();
        let segs = [PathSegment::Line { to: C64::new(0.3, 0.8) }, PathSegment::Line { to: C64::new(2.0, 0.1) }];
        let zero = |_x: C64, _w: C64| [C64::new(0.0, 0.0)];
        let r = walk(&e, Start::Regular { x: C64::new(0.0, 0.0), w: w0 }, &segs, &[], &zero, 1e-12).unwrap();
        assert!((r.w_end * r.w_end - e.f(r.x_end)).norm() < 1e-10);
    }

    #[test]
    fn closed_loop_of_holomorphic_form_vanishes() {
        let e = curve();
        let far = C64::new(5.0, 0.0);
        let w0 = e.f(far).sqrt();
        let segs = [PathSegment::Arc { center: C64::new(5.0, 1.0), sweep: 2.0 * PI }];
        let omega = |_x: C64, w: C64| [1.0 / w];
        let r = walk(&e, Start::Regular { x: far, w: w0 }, &segs, &[], &omega, 1e-13).unwrap();
        assert!(r.value[0].norm() < 1e-12);
    }

    #[test]
    fn segment_distance() {
        let d = distance_to_segment(C64::new(0.5, 1.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-15);
        let d = distance_to_segment(C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        assert!((d - 1.0).abs() < 1e-15);
    }
}
