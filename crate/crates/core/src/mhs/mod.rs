//! Biextension period matrices and their heights.
//!
//! A biextension period matrix has the block shape
//!
//! ```text
//!   ( b | P_H | 0 )      rows: ω_1..ω_k, then the extension class
//!   ( c |  a  | 1 )      columns: γ_0, γ_1..γ_2k, γ_2k+1
//! ```
//!
//! and its height is `-2π (Im c - Im a · M⁻¹ · (Im b; Re b))` with
//! `M = (Im P_H; Re P_H)`.

pub mod random;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default tolerance for "purely imaginary" checks, relative to the largest period.
pub const DEFAULT_IM_TOL: f64 = 1e-9;

const SINGULAR_RCOND: f64 = 1e-13;

/// Block period matrix of a biextension (or of a twist of one).
#[derive(Debug, Clone, PartialEq)]
pub struct BiextensionPeriodMatrix {
    k: usize,
    central: DMatrix<Complex64>,
    row_a: DVector<Complex64>,
    col_b: DVector<Complex64>,
    corner: Complex64,
    unit: Complex64,
}

impl BiextensionPeriodMatrix {
    /// Builds a matrix with bottom-right entry 1.
    pub fn new(
        central: DMatrix<Complex64>,
        row_a: DVector<Complex64>,
        col_b: DVector<Complex64>,
        corner: Complex64,
    ) -> Result<Self> {
        Self::with_unit(central, row_a, col_b, corner, Complex64::new(1.0, 0.0))
    }

    /// Builds a matrix whose bottom-right entry is `unit` (e.g. `2πi` for
    /// the period matrix of a limit mixed Hodge structure).
    pub fn with_unit(
        central: DMatrix<Complex64>,
        row_a: DVector<Complex64>,
        col_b: DVector<Complex64>,
        corner: Complex64,
        unit: Complex64,
    ) -> Result<Self> {
        let k = central.nrows();
        if central.ncols() != 2 * k || row_a.len() != 2 * k || col_b.len() != k {
            return Err(Error::InvalidInput(format!(
                "block shapes do not match k = {k}: central {}x{}, a {}, b {}",
                central.nrows(),
                central.ncols(),
                row_a.len(),
                col_b.len()
            )));
        }
        Ok(BiextensionPeriodMatrix { k, central, row_a, col_b, corner, unit })
    }

    /// The `k = 0` matrix `(c | 1)`.
    pub fn scalar(corner: Complex64, unit: Complex64) -> Self {
        BiextensionPeriodMatrix {
            k: 0,
            central: DMatrix::zeros(0, 0),
            row_a: DVector::zeros(0),
            col_b: DVector::zeros(0),
            corner,
            unit,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn central(&self) -> &DMatrix<Complex64> {
        &self.central
    }

    pub fn row_a(&self) -> &DVector<Complex64> {
        &self.row_a
    }

    pub fn col_b(&self) -> &DVector<Complex64> {
        &self.col_b
    }

    pub fn corner(&self) -> Complex64 {
        self.corner
    }

    pub fn unit(&self) -> Complex64 {
        self.unit
    }

    pub fn with_corner(&self, corner: Complex64) -> Self {
        BiextensionPeriodMatrix { corner, ..self.clone() }
    }

    /// The full `(k+1) × (2k+2)` matrix.
    pub fn full(&self) -> DMatrix<Complex64> {
        let k = self.k;
        let mut m = DMatrix::zeros(k + 1, 2 * k + 2);
        for i in 0..k {
            m[(i, 0)] = self.col_b[i];
            for j in 0..2 * k {
                m[(i, j + 1)] = self.central[(i, j)];
            }
        }
        m[(k, 0)] = self.corner;
        for j in 0..2 * k {
            m[(k, j + 1)] = self.row_a[j];
        }
        m[(k, 2 * k + 1)] = self.unit;
        m
    }

    /// Reads the blocks back from a full matrix; the last column must be
    /// zero above the bottom entry.
    pub fn from_full(m: &DMatrix<Complex64>) -> Result<Self> {
        let rows = m.nrows();
        if rows == 0 || m.ncols() != 2 * rows {
            return Err(Error::InvalidInput(format!("full matrix has shape {}x{}", rows, m.ncols())));
        }
        let k = rows - 1;
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..k {
            if m[(i, 2 * k + 1)].norm() > 1e-12 * scale {
                return Err(Error::InvalidInput("last column must vanish above the corner".into()));
            }
        }
        let central = m.view((0, 1), (k, 2 * k)).into_owned();
        let row_a = DVector::from_iterator(2 * k, (0..2 * k).map(|j| m[(k, j + 1)]));
        let col_b = DVector::from_iterator(k, (0..k).map(|i| m[(i, 0)]));
        Ok(BiextensionPeriodMatrix { k, central, row_a, col_b, corner: m[(k, 0)], unit: m[(k, 2 * k + 1)] })
    }
}

fn stacked_central(central: &DMatrix<Complex64>) -> DMatrix<f64> {
    let k = central.nrows();
    let n = central.ncols();
    DMatrix::from_fn(2 * k, n, |i, j| if i < k { central[(i, j)].im } else { central[(i - k, j)].re })
}

fn solve_stacked(m: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Ok(DMatrix::zeros(0, rhs.ncols()));
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min / max < SINGULAR_RCOND {
        return Err(Error::DegenerateCentralPeriods);
    }
    m.clone().lu().solve(rhs).ok_or(Error::DegenerateCentralPeriods)
}

/// Height of a biextension period matrix.
pub fn height(p: &BiextensionPeriodMatrix) -> Result<f64> {
    let k = p.k;
    let m = stacked_central(&p.central);
    let rhs = DMatrix::from_fn(2 * k, 1, |i, _| if i < k { p.col_b[i].im } else { p.col_b[i - k].re });
    let z = solve_stacked(&m, &rhs)?;
    let correction: f64 = (0..2 * k).map(|j| p.row_a[j].im * z[(j, 0)]).sum();
    Ok(-2.0 * PI * (p.corner.im - correction))
}

/// Multiplies every entry (including the bottom-right one) by `(2πi)^(-j)`.
pub fn twist(p: &BiextensionPeriodMatrix, j: i32) -> BiextensionPeriodMatrix {
    let f = Complex64::new(0.0, 2.0 * PI).powi(-j);
    BiextensionPeriodMatrix {
        k: p.k,
        central: p.central.map(|z| z * f),
        row_a: p.row_a.map(|z| z * f),
        col_b: p.col_b.map(|z| z * f),
        corner: p.corner * f,
        unit: p.unit * f,
    }
}

/// Largest relative real part among the extension-row periods.
pub fn extension_row_real_ratio(p: &BiextensionPeriodMatrix) -> f64 {
    let scale = p
        .central
        .iter()
        .chain(p.row_a.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    p.row_a.iter().map(|z| z.re.abs()).fold(0.0, f64::max) / scale
}

/// Height of a limit mixed Hodge structure from its period matrix (corner
/// entry `I_χ`, bottom-right entry `2πi`).
///
/// Requires the periods of the third-kind differential to be purely
/// imaginary to relative tolerance `tau_im`; the result then equals
/// `Re I_χ`.
pub fn height_of_lmhs_matrix(p: &BiextensionPeriodMatrix, tau_im: f64) -> Result<f64> {
    let ratio = extension_row_real_ratio(p);
    if ratio > tau_im {
        return Err(Error::UnnormalizedThirdKind { ratio, tolerance: tau_im });
    }
    height(&twist(p, 1))
}

/// Rank-m generalisation: `a`, `b`, `c` are matrices and the bottom-right
/// block is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMBiextensionMatrix {
    pub central: DMatrix<Complex64>,
    pub row_a: DMatrix<Complex64>,
    pub col_b: DMatrix<Complex64>,
    pub corner: DMatrix<Complex64>,
}

impl RankMBiextensionMatrix {
    pub fn new(
        central: DMatrix<Complex64>,
        row_a: DMatrix<Complex64>,
        col_b: DMatrix<Complex64>,
        corner: DMatrix<Complex64>,
    ) -> Result<Self> {
        let k = central.nrows();
        let m = corner.nrows();
        let ok = central.ncols() == 2 * k
            && corner.ncols() == m
            && row_a.shape() == (m, 2 * k)
            && col_b.shape() == (k, m);
        if !ok {
            return Err(Error::InvalidInput("rank-m block shapes are inconsistent".into()));
        }
        Ok(RankMBiextensionMatrix { central, row_a, col_b, corner })
    }

    pub fn k(&self) -> usize {
        self.central.nrows()
    }

    pub fn m(&self) -> usize {
        self.corner.nrows()
    }

    /// Direct sum of independent rank-1 biextensions: the central blocks
    /// are placed block-diagonally and each extension row and column lives
    /// on its own block.
    pub fn direct_sum(parts: &[BiextensionPeriodMatrix]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("no blocks".into()));
        }
        let k: usize = parts.iter().map(|p| p.k).sum();
        let m = parts.len();
        let mut central = DMatrix::zeros(k, 2 * k);
        let mut row_a = DMatrix::zeros(m, 2 * k);
        let mut col_b = DMatrix::zeros(k, m);
        let mut corner = DMatrix::zeros(m, m);
        let mut off = 0;
        for (i, p) in parts.iter().enumerate() {
            for r in 0..p.k {
                for j in 0..2 * p.k {
                    central[(off + r, 2 * off + j)] = p.central[(r, j)];
                }
                col_b[(off + r, i)] = p.col_b[r];
            }
            for j in 0..2 * p.k {
                row_a[(i, 2 * off + j)] = p.row_a[j];
            }
            corner[(i, i)] = p.corner;
            off += p.k;
        }
        Self::new(central, row_a, col_b, corner)
    }

    /// The rank-1 matrix viewed as an `m = 1` matrix.
    pub fn from_rank_one(p: &BiextensionPeriodMatrix) -> Self {
        let k = p.k;
        RankMBiextensionMatrix {
            central: p.central.clone(),
            row_a: DMatrix::from_fn(1, 2 * k, |_, j| p.row_a[j]),
            col_b: DMatrix::from_fn(k, 1, |i, _| p.col_b[i]),
            corner: DMatrix::from_element(1, 1, p.corner),
        }
    }
}

/// The `m × m` height matrix and the sum of its entries.
pub fn height_matrix_rank_m(p: &RankMBiextensionMatrix) -> Result<(DMatrix<f64>, f64)> {
    let k = p.k();
    let m = p.m();
    let stacked = stacked_central(&p.central);
    let rhs = DMatrix::from_fn(2 * k, m, |i, j| if i < k { p.col_b[(i, j)].im } else { p.col_b[(i - k, j)].re });
    let z = solve_stacked(&stacked, &rhs)?;
    let im_a = p.row_a.map(|c| c.im);
    let corr = if k == 0 { DMatrix::zeros(m, m) } else { &im_a * z };
    let h = DMatrix::from_fn(m, m, |i, j| -2.0 * PI * (p.corner[(i, j)].im - corr[(i, j)]));
    let total = h.sum();
    Ok((h, total))
}

/// A filtration-compatible change of bases: `U` acts on the homology
/// basis (columns), `V` on the cohomology basis (rows).
///
/// `U` has diagonal blocks `(1, G, 1)` with `G ∈ GL_2k(Z)` and is lower
/// triangular with respect to them; `V` has diagonal blocks `(A, 1)` with
/// `A ∈ GL_k(C)` and a free bottom row.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChange {
    pub u: DMatrix<i64>,
    pub v: DMatrix<Complex64>,
}

fn integer_det(m: &DMatrix<i64>) -> i128 {
    let n = m.nrows();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

impl BasisChange {
    pub fn identity(k: usize) -> Self {
        BasisChange { u: DMatrix::identity(2 * k + 2, 2 * k + 2), v: DMatrix::identity(k + 1, k + 1) }
    }

    /// Checks unimodularity and compatibility with the weight filtration.
    pub fn validate(&self, k: usize) -> Result<()> {
        let n = 2 * k + 2;
        let reject = |why: &str| Err(Error::InvalidInput(format!("basis change rejected: {why}")));
        if self.u.shape() != (n, n) || self.v.shape() != (k + 1, k + 1) {
            return reject("wrong shape");
        }
        if self.u[(0, 0)] != 1 || self.u[(n - 1, n - 1)] != 1 {
            return reject("U must fix the graded pieces of weight 0 and -2");
        }
        for j in 1..n {
            if self.u[(0, j)] != 0 {
                return reject("U is not filtration-compatible");
            }
        }
        for i in 0..n - 1 {
            if self.u[(i, n - 1)] != 0 {
                return reject("U is not filtration-compatible");
            }
        }
        let g = self.u.view((1, 1), (2 * k, 2 * k)).into_owned();
        if integer_det(&g).abs() != 1 {
            return reject("U is not unimodular");
        }
        for i in 0..k {
            if self.v[(i, k)].norm() != 0.0 {
                return reject("V mixes the extension row into holomorphic forms");
            }
        }
        if (self.v[(k, k)] - Complex64::new(1.0, 0.0)).norm() > 1e-14 {
            return reject("V must fix the extension class");
        }
        let a = self.v.view((0, 0), (k, k)).into_owned();
        if k > 0 {
            let sv = a.map(|z| z.norm()).singular_values();
            let det = a.determinant();
            if det.norm() < 1e-14 * sv.max().powi(k as i32) {
                return reject("V is singular");
            }
        }
        Ok(())
    }
}

/// The matrix of the same biextension in new bases: `V · P · U`.
pub fn change_basis(p: &BiextensionPeriodMatrix, change: &BasisChange) -> Result<BiextensionPeriodMatrix> {
    change.validate(p.k)?;
    let u = change.u.map(|x| Complex64::new(x as f64, 0.0));
    let full = &change.v * p.full() * u;
    BiextensionPeriodMatrix::from_full(&full)
}

impl Serialize for BiextensionPeriodMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            k: usize,
            shape: [usize; 2],
            matrix: Vec<Vec<[f64; 2]>>,
        }
        let f = self.full();
        let matrix = (0..f.nrows()).map(|i| (0..f.ncols()).map(|j| [f[(i, j)].re, f[(i, j)].im]).collect()).collect();
        Repr { k: self.k, shape: [f.nrows(), f.ncols()], matrix }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiextensionPeriodMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Repr {
            k: usize,
            matrix: Vec<Vec<[f64; 2]>>,
        }
        let r = Repr::deserialize(d)?;
        let rows = r.matrix.len();
        if rows != r.k + 1 || r.matrix.iter().any(|row| row.len() != 2 * rows) {
            return Err(D::Error::custom("matrix shape does not match k"));
        }
        let m = DMatrix::from_fn(rows, 2 * rows, |i, j| Complex64::new(r.matrix[i][j][0], r.matrix[i][j][1]));
        BiextensionPeriodMatrix::from_full(&m).map_err(D::Error::custom)
    }
}
