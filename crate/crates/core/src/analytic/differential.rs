//! Differentials of the third kind normalized to purely imaginary periods.
//!
//! A differential with residue divisor `Σ m_i·P_i` is assembled from the
//! rational seeds `λ_P = ½·dx/(x − x(P)) + (w(P)/2)·dx/((x − x(P))·w)`, which
//! have residue 1 at `P` and a pole only at infinity otherwise, plus a
//! multiple `c·dx/w` of the invariant differential fixed by requiring both
//! cycle periods to be purely imaginary. When a pole sits at infinity, two
//! poles share an x-coordinate awkwardly, or evaluation points crowd the
//! poles, everything is moved by a translation `X ↦ X + T` first; the
//! normalized differential is translation invariant in the sense
//! `η_{D} = τ_T^* η_{D + T}`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::curve::{CurvePoint, WeierstrassCurveC, C64};
use super::lattice::{cycle_integrals, PeriodLattice};
use super::path::{distance_to_segment, plan_from_branch, walk, IntegrationPath, PathSegment, Start};
use crate::error::{Error, Result};
use crate::estimate::Estimate;

/// A finite formal sum of points with integer multiplicities.
pub type Divisor = Vec<(CurvePoint, i64)>;

pub fn divisor_degree(d: &[(CurvePoint, i64)]) -> i64 {
    d.iter().map(|(_, m)| m).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub quad_eps: f64,
    pub im_tol: f64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { quad_eps: 1e-12, im_tol: crate::mhs::DEFAULT_IM_TOL }
    }
}

#[derive(Debug, Clone, Copy)]
struct SeedTerm {
    x: C64,
    odd: C64,
    even: f64,
}

/// Anything that can be integrated along an [`IntegrationPath`]: a rule
/// `g(x, w)` with the form equal to `g·dx`, and the x-values where it is
/// singular.
pub trait Differential {
    fn curve(&self) -> &WeierstrassCurveC;
    fn coefficient(&self, x: C64, w: C64) -> C64;
    fn singular_x(&self) -> Vec<C64>;
}

/// The invariant differential `dx/w`.
#[derive(Debug, Clone)]
pub struct InvariantDifferential(pub WeierstrassCurveC);

impl Differential for InvariantDifferential {
    fn curve(&self) -> &WeierstrassCurveC {
        &self.0
    }

    fn coefficient(&self, _x: C64, w: C64) -> C64 {
        1.0 / w
    }

    fn singular_x(&self) -> Vec<C64> {
        Vec::new()
    }
}

/// Integrates a differential along a path; the absolute error target is
/// `quad_eps` per quadrature piece.
pub fn integrate<D: Differential + ?Sized>(d: &D, path: &IntegrationPath, quad_eps: f64) -> Result<(C64, f64)> {
    let curve = d.curve();
    let start = &path.start;
    let x = start.x().ok_or_else(|| Error::InvalidInput("paths must start at an affine point".into()))?;
    let w = curve.w(start).expect("affine");
    let g = |x: C64, w: C64| [d.coefficient(x, w)];
    let r = walk(curve, Start::Regular { x, w }, &path.segments, &d.singular_x(), &g, quad_eps)?;
    Ok((r.value[0], r.error))
}

/// A normalized differential with prescribed residue divisor.
#[derive(Debug, Clone)]
pub struct NormalizedDifferential {
    curve: WeierstrassCurveC,
    lattice: PeriodLattice,
    residue_divisor: Divisor,
    translation: CurvePoint,
    terms: Vec<SeedTerm>,
    correction: C64,
    periods: [C64; 2],
    options: NumericOptions,
}

fn translation_candidates(curve: &WeierstrassCurveC) -> Vec<CurvePoint> {
    let roots = curve.branch_points();
    let center = (roots[0] + roots[1] + roots[2]) / 3.0;
    let scale = curve.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for _ in 0..24 {
        let x = center + C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)) * scale;
        out.extend(curve.points_above(x));
    }
    out
}

/// Geometric quality of a translation: the smallest relevant separation,
/// relative to the size of the branch-point configuration.
fn translation_score(
    curve: &WeierstrassCurveC,
    lattice: &PeriodLattice,
    poles: &[CurvePoint],
    evals: &[CurvePoint],
    t: &CurvePoint,
) -> f64 {
    let scale = curve.scale();
    let roots = curve.branch_points();
    let center = (roots[0] + roots[1] + roots[2]) / 3.0;
    let mut px = Vec::new();
    for p in poles {
        match curve.add(p, t).x() {
            Some(x) => px.push(x),
            None => return 0.0,
        }
    }
    let mut ex = Vec::new();
    for p in evals {
        match curve.add(p, t).x() {
            Some(x) => ex.push(x),
            None => return 0.0,
        }
    }
    let mut score = f64::INFINITY;
    for (i, a) in px.iter().enumerate() {
        for b in &px[i + 1..] {
            let d = (a - b).norm();
            if d > 1e-12 * scale {
                score = score.min(d);
            }
        }
        for b in &ex {
            score = score.min((a - b).norm());
        }
        for c in &lattice.cycles {
            score = score.min(distance_to_segment(*a, roots[c.from], roots[c.to]));
        }
    }
    for x in px.iter().chain(ex.iter()) {
        for e in roots {
            score = score.min((x - e).norm());
        }
        let far = (x - center).norm() / scale;
        if far > 4.0 {
            score = score.min(4.0 * scale / far);
        }
    }
    score / scale
}

fn build_terms(curve: &WeierstrassCurveC, divisor: &[(CurvePoint, i64)], t: &CurvePoint) -> Vec<SeedTerm> {
    let scale = curve.scale();
    let mut terms: Vec<SeedTerm> = Vec::new();
    for (p, m) in divisor {
        let q = curve.add(p, t);
        let x = q.x().expect("translation keeps poles affine");
        let w = curve.w(&q).expect("affine");
        let m = *m as f64;
        if let Some(existing) = terms.iter_mut().find(|s| (s.x - x).norm() <= 1e-12 * scale.max(x.norm())) {
            existing.odd += w * (0.5 * m);
            existing.even += 0.5 * m;
        } else {
            terms.push(SeedTerm { x, odd: w * (0.5 * m), even: 0.5 * m });
        }
    }
    terms
}

impl NormalizedDifferential {
    /// `avoid` lists points where the differential will later be evaluated;
    /// the translation is chosen to keep them away from the poles.
    pub fn new(
        curve: &WeierstrassCurveC,
        lattice: &PeriodLattice,
        divisor: &[(CurvePoint, i64)],
        avoid: &[CurvePoint],
        options: NumericOptions,
    ) -> Result<Self> {
        if divisor_degree(divisor) != 0 {
            return Err(Error::NonzeroDegree(divisor_degree(divisor)));
        }
        for (p, _) in divisor {
            if !curve.contains(p) {
                return Err(Error::NotOnCurve(format!("{p:?}")));
            }
        }
        let poles: Vec<CurvePoint> = divisor.iter().filter(|(_, m)| *m != 0).map(|(p, _)| *p).collect();
        let mut translation = CurvePoint::Infinity;
        if !poles.is_empty() {
            let s0 = translation_score(curve, lattice, &poles, avoid, &translation);
            if s0 < 0.05 {
                let mut best = (s0, translation);
                for t in translation_candidates(curve) {
                    let s = translation_score(curve, lattice, &poles, avoid, &t);
                    if s > best.0 {
                        best = (s, t);
                    }
                }
                if best.0 <= 1e-9 {
                    return Err(Error::AuxiliarySearchFailed);
                }
                translation = best.1;
            }
        }
        let terms = build_terms(curve, divisor, &translation);
        let mut d = NormalizedDifferential {
            curve: curve.clone(),
            lattice: *lattice,
            residue_divisor: divisor.to_vec(),
            translation,
            terms,
            correction: C64::new(0.0, 0.0),
            periods: [C64::new(0.0, 0.0); 2],
            options,
        };
        d.normalize()?;
        Ok(d)
    }

    fn pole_xs(&self) -> Vec<C64> {
        self.terms.iter().map(|s| s.x).collect()
    }

    fn odd_rational(&self, x: C64) -> C64 {
        self.terms.iter().map(|s| s.odd / (x - s.x)).sum()
    }

    fn even_rational(&self, x: C64) -> C64 {
        self.terms.iter().map(|s| s.even / (x - s.x)).sum()
    }

    fn normalize(&mut self) -> Result<()> {
        let lat = self.lattice;
        let obstacles = self.pole_xs();
        let mut a = [C64::new(0.0, 0.0); 2];
        let mut om = [C64::new(0.0, 0.0); 2];
        let g = |x: C64| [C64::new(1.0, 0.0), self.odd_rational(x)];
        for (j, cycle) in lat.cycles.iter().enumerate() {
            let v = cycle_integrals(&self.curve, cycle, &obstacles, &g, self.options.quad_eps)?;
            let expected = lat.periods()[j];
            let sign = if (v[0] - expected).norm() <= (v[0] + expected).norm() { 1.0 } else { -1.0 };
            om[j] = v[0] * sign;
            a[j] = v[1] * sign;
        }
        // Re(a_j) + c_r·Re(Ω_j) − c_i·Im(Ω_j) = 0
        let det = -om[0].re * om[1].im + om[0].im * om[1].re;
        let size = om[0].norm() * om[1].norm();
        if det.abs() < 1e-12 * size {
            return Err(Error::IllConditionedNormalization);
        }
        let (r0, r1) = (-a[0].re, -a[1].re);
        let cr = (r0 * -om[1].im - (-om[0].im) * r1) / det;
        let ci = (om[0].re * r1 - om[1].re * r0) / det;
        self.correction = C64::new(cr, ci);
        for j in 0..2 {
            self.periods[j] = a[j] + self.correction * om[j];
        }
        for p in self.periods {
            let size = p.norm().max(om[0].norm().min(om[1].norm()));
            let ratio = p.re.abs() / size;
            if ratio > self.options.im_tol {
                return Err(Error::UnnormalizedThirdKind { ratio, tolerance: self.options.im_tol });
            }
        }
        Ok(())
    }

    pub fn curve(&self) -> &WeierstrassCurveC {
        &self.curve
    }

    pub fn lattice(&self) -> &PeriodLattice {
        &self.lattice
    }

    pub fn residue_divisor(&self) -> &Divisor {
        &self.residue_divisor
    }

    pub fn translation(&self) -> CurvePoint {
        self.translation
    }

    /// Coefficient `c` of the invariant differential in the working model.
    pub fn holomorphic_correction(&self) -> C64 {
        self.correction
    }

    /// Periods over the lattice cycles.
    pub fn periods(&self) -> [C64; 2] {
        self.periods
    }

    pub fn options(&self) -> NumericOptions {
        self.options
    }

    /// `g(x, w)` of the differential in the translated (working) model.
    pub(crate) fn working_coefficient(&self, x: C64, w: C64) -> C64 {
        (self.odd_rational(x) + self.correction) / w + self.even_rational(x)
    }

    pub(crate) fn to_working(&self, p: &CurvePoint) -> CurvePoint {
        self.curve.add(p, &self.translation)
    }

    pub(crate) fn from_working(&self, p: &CurvePoint) -> CurvePoint {
        self.curve.sub(p, &self.translation)
    }

    /// Distance from a working x-value to the nearest pole or branch point
    /// other than one at `x` itself.
    pub(crate) fn local_radius(&self, x: C64) -> f64 {
        let scale = self.curve.scale();
        self.pole_xs()
            .into_iter()
            .chain(self.curve.branch_points())
            .map(|o| (o - x).norm())
            .filter(|d| *d > 1e-12 * scale)
            .fold(f64::INFINITY, f64::min)
    }

    fn even_potential(&self, x: C64) -> f64 {
        self.terms.iter().map(|s| s.even * (x - s.x).norm().ln()).sum()
    }

    fn odd_form(&self) -> impl Fn(C64, C64) -> [C64; 1] + '_ {
        move |x: C64, w: C64| [(self.odd_rational(x) + self.correction) / w]
    }

    /// Odd-part integral from a branch point to the working point `(x, w)`,
    /// optionally through `via` and starting from a specified branch point.
    pub(crate) fn odd_from_branch(&self, x: C64, w: C64, base: Option<usize>) -> Result<Estimate> {
        let obstacles = self.pole_xs();
        let (k, segs) = match base {
            None => plan_from_branch(&self.curve, x, &obstacles),
            Some(k) => (k, vec![PathSegment::Line { to: x }]),
        };
        let r = walk(&self.curve, Start::Branch(k), &segs, &obstacles, &self.odd_form(), self.options.quad_eps)?;
        let sign = if (r.w_end - w).norm() <= (r.w_end + w).norm() { 1.0 } else { -1.0 };
        Ok(Estimate::new(r.value[0].re * sign, r.error))
    }

    /// Odd-part integral from branch point `k` along explicit segments.
    pub(crate) fn odd_along(&self, k: usize, segments: &[PathSegment]) -> Result<(C64, C64, f64)> {
        let obstacles = self.pole_xs();
        let r = walk(&self.curve, Start::Branch(k), segments, &obstacles, &self.odd_form(), self.options.quad_eps)?;
        Ok((r.value[0], r.w_end, r.error))
    }

    pub(crate) fn pole_x_list(&self) -> Vec<C64> {
        self.pole_xs()
    }

    /// Continues an odd-part integral known at `(x0, w0)` along `segments`.
    pub(crate) fn odd_continue(&self, x0: C64, w0: C64, segments: &[PathSegment]) -> Result<(C64, C64, f64)> {
        let obstacles = self.pole_xs();
        let r = walk(&self.curve, Start::Regular { x: x0, w: w0 }, segments, &obstacles, &self.odd_form(), self.options.quad_eps)?;
        Ok((r.value[0], r.w_end, r.error))
    }

    /// Single-valued real potential `Re ∫_{base}^{X} η` at a point of the
    /// working model, the base being any branch point.
    pub(crate) fn working_potential(&self, p: &CurvePoint) -> Result<Estimate> {
        let x = p.x().ok_or_else(|| Error::InvalidInput("potential at infinity".into()))?;
        let w = self.curve.w(p).expect("affine");
        let odd = self.odd_from_branch(x, w, None)?;
        Ok(Estimate::new(self.even_potential(x) + odd.value, odd.error))
    }

    /// Even potential at `x` with the term belonging to the pole at `pole_x`
    /// replaced by its coefficient times `log|offset|`, where `offset` is an
    /// accurately known `x − pole_x`.
    pub(crate) fn even_near_pole(&self, x: C64, pole_x: C64, offset: C64) -> f64 {
        let scale = self.curve.scale();
        self.terms
            .iter()
            .map(|s| {
                if (s.x - pole_x).norm() <= 1e-12 * scale.max(pole_x.norm()) {
                    s.even * offset.norm().ln()
                } else {
                    s.even * (x - s.x).norm().ln()
                }
            })
            .sum()
    }

    /// `Re ∫_a^b η` along any path avoiding the poles.
    pub fn real_integral(&self, a: &CurvePoint, b: &CurvePoint) -> Result<Estimate> {
        let pa = self.working_potential(&self.to_working(a))?;
        let pb = self.working_potential(&self.to_working(b))?;
        Ok(pb - pa)
    }

    /// Residues at the poles computed as winding integrals in the working
    /// model.
    pub fn residues(&self) -> Result<Vec<(CurvePoint, C64)>> {
        let mut out = Vec::new();
        for (p, _) in &self.residue_divisor {
            let pw = self.to_working(p);
            let x = pw.x().expect("affine");
            let r = 0.25 * self.local_radius(x);
            let path = IntegrationPath::circle_around(&self.curve, &pw, r)?;
            let start = path.start;
            let w = self.curve.w(&start).expect("affine");
            let g = |x: C64, w: C64| [self.working_coefficient(x, w)];
            let res = walk(&self.curve, Start::Regular { x: start.x().expect("affine"), w }, &path.segments, &self.pole_xs(), &g, self.options.quad_eps)?;
            out.push((*p, res.value[0] / C64::new(0.0, 2.0 * PI)));
        }
        Ok(out)
    }
}

impl Differential for NormalizedDifferential {
    fn curve(&self) -> &WeierstrassCurveC {
        &self.curve
    }

    fn coefficient(&self, x: C64, w: C64) -> C64 {
        if self.translation.is_infinity() {
            return self.working_coefficient(x, w);
        }
        let p = CurvePoint::affine(x, self.curve.y_from_w(x, w));
        let q = self.to_working(&p);
        match q {
            CurvePoint::Affine { x: xq, .. } => {
                let wq = self.curve.w(&q).expect("affine");
                self.working_coefficient(xq, wq) * wq / w
            }
            CurvePoint::Infinity => C64::new(0.0, 0.0),
        }
    }

    fn singular_x(&self) -> Vec<C64> {
        let mut xs: Vec<C64> = self.residue_divisor.iter().filter_map(|(p, _)| p.x()).collect();
        if let Some(x) = self.curve.neg(&self.translation).x() {
            xs.push(x);
        }
        xs
    }
}

/// The normalized differential with residue `+1` at `p` and `−1` at `q`.
#[derive(Debug, Clone)]
pub struct ThirdKindDifferential {
    pole_p: CurvePoint,
    pole_q: CurvePoint,
    inner: NormalizedDifferential,
}

impl ThirdKindDifferential {
    pub fn pole_p(&self) -> CurvePoint {
        self.pole_p
    }

    pub fn pole_q(&self) -> CurvePoint {
        self.pole_q
    }

    pub fn holomorphic_correction(&self) -> C64 {
        self.inner.holomorphic_correction()
    }

    pub fn periods(&self) -> [C64; 2] {
        self.inner.periods()
    }

    pub fn normalized(&self) -> &NormalizedDifferential {
        &self.inner
    }

    /// Residues at `p` and `q`, in that order.
    pub fn residues(&self) -> Result<(C64, C64)> {
        let r = self.inner.residues()?;
        Ok((r[0].1, r[1].1))
    }
}

impl Differential for ThirdKindDifferential {
    fn curve(&self) -> &WeierstrassCurveC {
        self.inner.curve()
    }

    fn coefficient(&self, x: C64, w: C64) -> C64 {
        self.inner.coefficient(x, w)
    }

    fn singular_x(&self) -> Vec<C64> {
        self.inner.singular_x()
    }
}

pub fn third_kind_differential(
    curve: &WeierstrassCurveC,
    lattice: &PeriodLattice,
    p: &CurvePoint,
    q: &CurvePoint,
    options: NumericOptions,
) -> Result<ThirdKindDifferential> {
    third_kind_differential_avoiding(curve, lattice, p, q, &[], options)
}

pub fn third_kind_differential_avoiding(
    curve: &WeierstrassCurveC,
    lattice: &PeriodLattice,
    p: &CurvePoint,
    q: &CurvePoint,
    avoid: &[CurvePoint],
    options: NumericOptions,
) -> Result<ThirdKindDifferential> {
    if p.distance(q) <= 1e-12 * (1.0 + curve.scale()) {
        return Err(Error::InvalidInput("third-kind differential needs distinct poles".into()));
    }
    let inner = NormalizedDifferential::new(curve, lattice, &[(*p, 1), (*q, -1)], avoid, options)?;
    Ok(ThirdKindDifferential { pole_p: *p, pole_q: *q, inner })
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
    fn residues_and_purity() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let q = CurvePoint::real(1.0, 0.0);
        let eta = third_kind_differential(&e, &l, &p, &q, NumericOptions::default()).unwrap();
        let (rp, rq) = eta.residues().unwrap();
        assert!((rp - 1.0).norm() < 1e-10, "{rp}");
        assert!((rq + 1.0).norm() < 1e-10, "{rq}");
        for per in eta.periods() {
            assert!(per.re.abs() / per.norm() < 1e-9, "{per}");
        }
    }

    #[test]
    fn pole_at_infinity_uses_translation() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let eta = third_kind_differential(&e, &l, &p, &CurvePoint::Infinity, NumericOptions::default()).unwrap();
        assert!(!eta.normalized().translation().is_infinity());
        let (rp, rq) = eta.residues().unwrap();
        assert!((rp - 1.0).norm() < 1e-10 && (rq + 1.0).norm() < 1e-10);
        for per in eta.periods() {
            assert!(per.re.abs() / per.norm() < 1e-9);
        }
    }

    #[test]
    fn swapping_poles_negates() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let q = CurvePoint::real(2.0, -3.0);
        let a = third_kind_differential(&e, &l, &p, &q, NumericOptions::default()).unwrap();
        let b = third_kind_differential(&e, &l, &q, &p, NumericOptions::default()).unwrap();
        for j in 0..2 {
            assert!((a.periods()[j] + b.periods()[j]).norm() < 1e-10);
        }
        let x = CurvePoint::real(-1.0, -1.0);
        let y = CurvePoint::real(6.0, 14.0);
        let ia = a.normalized().real_integral(&x, &y).unwrap().value;
        let ib = b.normalized().real_integral(&x, &y).unwrap().value;
        assert!((ia + ib).abs() < 1e-9);
    }

    #[test]
    fn small_circle_gives_two_pi_i() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let q = CurvePoint::real(1.0, 0.0);
        let eta = third_kind_differential(&e, &l, &p, &q, NumericOptions::default()).unwrap();
        let path = IntegrationPath::circle_around(&e, &p, 0.1).unwrap();
        let (v, _) = integrate(&eta, &path, 1e-13).unwrap();
        assert!((v - C64::new(0.0, 2.0 * PI)).norm() < 1e-10, "{v}");
    }

    #[test]
    fn real_part_matches_path_integral() {
        let (e, l) = setup();
        let p = CurvePoint::real(0.0, 0.0);
        let q = CurvePoint::Infinity;
        let eta = third_kind_differential(&e, &l, &p, &q, NumericOptions::default()).unwrap();
        let a = CurvePoint::real(-1.0, -1.0);
        let target = C64::new(2.0, 0.0);
        let path = IntegrationPath::from(a).line_to(C64::new(0.5, 1.5)).line_to(target);
        let (v, _) = integrate(&eta, &path, 1e-13).unwrap();
        let w_end = {
            let w0 = e.w(&a).unwrap();
            let g = |_x: C64, _w: C64| [C64::new(0.0, 0.0)];
            walk(&e, Start::Regular { x: a.x().unwrap(), w: w0 }, &path.segments, &[], &g, 1e-12).unwrap().w_end
        };
        let b = CurvePoint::affine(target, e.y_from_w(target, w_end));
        let direct = eta.normalized().real_integral(&a, &b).unwrap().value;
        assert!((v.re - direct).abs() < 1e-9, "{} {}", v.re, direct);
    }
}
