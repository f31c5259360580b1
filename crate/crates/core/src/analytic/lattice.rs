//! Period lattices of the invariant differential and integrals of odd
//! differentials `R(x)·dx/w` between branch points.

use serde::{Deserialize, Serialize};

use super::curve::{WeierstrassCurveC, C64};
use super::path::{walk, PathSegment, Start};
use crate::error::{Error, Result};

/// A cycle realized as the lift of the segment between two branch points,
/// traversed on both sheets. `sign` orients it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub from: usize,
    pub to: usize,
    pub sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodLattice {
    pub omega1: C64,
    pub omega2: C64,
    pub cycles: [Cycle; 2],
}

impl PeriodLattice {
    pub fn tau(&self) -> C64 {
        self.omega2 / self.omega1
    }

    pub fn periods(&self) -> [C64; 2] {
        [self.omega1, self.omega2]
    }

    /// `|Im(conj(ω1)·ω2)|`, the covolume of the lattice.
    pub fn covolume(&self) -> f64 {
        (self.omega1.conj() * self.omega2).im.abs()
    }
}

/// Integrates the odd forms `g_n(x)·dx/w` around `cycle` (the first
/// component of `g` is conventionally `1`, giving the invariant differential).
pub(crate) fn cycle_integrals<const N: usize, G: Fn(C64) -> [C64; N]>(
    curve: &WeierstrassCurveC,
    cycle: &Cycle,
    obstacles: &[C64],
    g: &G,
    tol: f64,
) -> Result<[C64; N]> {
    let roots = curve.branch_points();
    let (a, b) = (roots[cycle.from], roots[cycle.to]);
    let mid = (a + b) * 0.5;
    let odd = |x: C64, w: C64| {
        let mut v = g(x);
        for c in v.iter_mut() {
            *c /= w;
        }
        v
    };
    let ra = walk(curve, Start::Branch(cycle.from), &[PathSegment::Line { to: mid }], obstacles, &odd, tol)?;
    let rb = walk(curve, Start::Branch(cycle.to), &[PathSegment::Line { to: mid }], obstacles, &odd, tol)?;
    let same_sheet = (ra.w_end - rb.w_end).norm() < (ra.w_end + rb.w_end).norm();
    let sb = if same_sheet { 1.0 } else { -1.0 };
    let mut out = [C64::new(0.0, 0.0); N];
    for n in 0..N {
        out[n] = (ra.value[n] - rb.value[n] * sb) * (2.0 * cycle.sign);
    }
    Ok(out)
}

/// Periods of `dx/(2y + a1·x + a3)` with `Im(ω2/ω1) > 0`; for real curves
/// with positive discriminant `ω1` is real.
pub fn period_lattice(curve: &WeierstrassCurveC) -> Result<PeriodLattice> {
    period_lattice_with_tol(curve, 1e-13)
}

pub fn period_lattice_with_tol(curve: &WeierstrassCurveC, tol: f64) -> Result<PeriodLattice> {
    let r = curve.branch_points();
    let angle = |k: usize| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        ((r[i] - r[k]) / (r[j] - r[k])).arg().abs()
    };
    let pivot = (0..3).max_by(|&a, &b| angle(a).total_cmp(&angle(b))).expect("three roots");
    let others = [(pivot + 1) % 3, (pivot + 2) % 3];
    let one = |_x: C64| [C64::new(1.0, 0.0)];
    let mut cycles = others.map(|o| Cycle { from: pivot, to: o, sign: 1.0 });
    let mut omegas = [C64::new(0.0, 0.0); 2];
    for (j, c) in cycles.iter().enumerate() {
        omegas[j] = cycle_integrals(curve, c, &[], &one, tol)?[0];
    }
    let is_real = |z: C64| z.im.abs() <= 1e-10 * z.norm();
    if curve.is_real() && is_real(omegas[1]) && !is_real(omegas[0]) {
        omegas.swap(0, 1);
        cycles.swap(0, 1);
    }
    if (omegas[1] / omegas[0]).im < 0.0 {
        omegas[1] = -omegas[1];
        cycles[1].sign = -cycles[1].sign;
    }
    if (omegas[1] / omegas[0]).im.abs() < 1e-12 {
        return Err(Error::DegenerateCentralPeriods);
    }
    Ok(PeriodLattice { omega1: omegas[0], omega2: omegas[1], cycles })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agm(mut a: f64, mut b: f64) -> f64 {
        for _ in 0..60 {
            let (na, nb) = (0.5 * (a + b), (a * b).sqrt());
            a = na;
            b = nb;
        }
        a
    }

    #[test]
    fn lemniscatic_real_period_matches_agm() {
        // y² = x³ − x ; invariant differential dx/2y equals dx/sqrt(4x³ − 4x).
        let e = WeierstrassCurveC::from_real([0.0, 0.0, 0.0, -1.0, 0.0]).unwrap();
        let l = period_lattice(&e).unwrap();
        // roots of 4x³ − 4x: −1, 0, 1; real period π / AGM(sqrt(e3 − e1), sqrt(e3 − e2))
        let expected = std::f64::consts::PI / agm(2f64.sqrt(), 1.0);
        assert!(l.omega1.im.abs() < 1e-12);
        assert!((l.omega1.re.abs() - expected).abs() < 1e-11, "{} {}", l.omega1, expected);
        assert!(l.tau().im > 0.0);
    }

    #[test]
    fn orientation_for_negative_discriminant() {
        // y² = x³ − 1 models 4x³ − 4 after y ↦ y/2.
        let e = WeierstrassCurveC::from_real([0.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        let l = period_lattice(&e).unwrap();
        assert!(l.tau().im > 0.0);
    }

    #[test]
    fn rescaling_divides_periods() {
        let e = WeierstrassCurveC::from_real([0.0, 0.0, 1.0, -1.0, 0.0]).unwrap();
        let u = C64::new(1.7, 0.4);
        let l0 = period_lattice(&e).unwrap();
        let l1 = period_lattice(&e.rescaled(u).unwrap()).unwrap();
        let cov0 = l0.covolume();
        let cov1 = l1.covolume();
        assert!((cov1 * u.norm_sqr() - cov0).abs() < 1e-10 * cov0);
        // each period of the rescaled curve is a lattice vector of Λ/u
        for w in l1.periods() {
            let z = w * u;
            let det = (l0.omega1.conj() * l0.omega2).im;
            let m = (z.conj() * l0.omega2).im / det;
            let n = (l0.omega1.conj() * z).im / det;
            assert!((m - m.round()).abs() < 1e-9 && (n - n.round()).abs() < 1e-9);
        }
    }
}
