//! Random well-conditioned period matrices and filtration-compatible
//! basis changes, used by the invariance suites and examples.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::{BasisChange, BiextensionPeriodMatrix};

fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

fn random_complex<R: Rng>(rng: &mut R, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// A biextension matrix whose stacked central block `(Im P_H; Re P_H)` has
/// singular values in `[0.1, 10]`.
pub fn well_conditioned_matrix<R: Rng>(k: usize, rng: &mut R) -> BiextensionPeriodMatrix {
    let n = 2 * k;
    let stacked = if n == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let s = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| rng.random_range(0.1..10.0)));
        random_orthogonal(n, rng) * s * random_orthogonal(n, rng)
    };
    let central = DMatrix::from_fn(k, n, |i, j| Complex64::new(stacked[(i + k, j)], stacked[(i, j)]));
    let row_a = DVector::from_fn(n, |_, _| random_complex(rng, 2.0));
    let col_b = DVector::from_fn(k, |_, _| random_complex(rng, 2.0));
    let corner = random_complex(rng, 2.0);
    BiextensionPeriodMatrix::new(central, row_a, col_b, corner).expect("shapes are consistent")
}

/// A random element of GL_n(Z) built from a few elementary operations.
pub fn random_unimodular<R: Rng>(n: usize, rng: &mut R) -> DMatrix<i64> {
    let mut g = DMatrix::<i64>::identity(n, n);
    if n == 0 {
        return g;
    }
    for _ in 0..2 * n {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        match rng.random_range(0..4) {
            0 if i != j => g.swap_rows(i, j),
            1 => {
                for c in 0..n {
                    g[(i, c)] = -g[(i, c)];
                }
            }
            _ if i != j => {
                let m = rng.random_range(-2..=2);
                for c in 0..n {
                    g[(i, c)] += m * g[(j, c)];
                }
            }
            _ => {}
        }
    }
    g
}

/// A random basis change compatible with the weight filtration.
pub fn random_basis_change<R: Rng>(k: usize, rng: &mut R) -> BasisChange {
    let n = 2 * k + 2;
    let mut u = DMatrix::<i64>::zeros(n, n);
    u[(0, 0)] = 1;
    u[(n - 1, n - 1)] = 1;
    let g = random_unimodular(2 * k, rng);
    for i in 0..2 * k {
        for j in 0..2 * k {
            u[(i + 1, j + 1)] = g[(i, j)];
        }
        u[(i + 1, 0)] = rng.random_range(-3..=3);
        u[(n - 1, i + 1)] = rng.random_range(-3..=3);
    }
    u[(n - 1, 0)] = rng.random_range(-3..=3);

    let mut v = DMatrix::<Complex64>::zeros(k + 1, k + 1);
    let a = if k == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let s = DMatrix::from_diagonal(&DVector::from_fn(k, |_, _| rng.random_range(0.5..2.0)));
        let q = random_orthogonal(k, rng).map(|x| Complex64::new(x, 0.0));
        let phase = DMatrix::from_diagonal(&DVector::from_fn(k, |_, _| {
            Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
        }));
        phase * s.map(|x| Complex64::new(x, 0.0)) * q
    };
    for i in 0..k {
        for j in 0..k {
            v[(i, j)] = a[(i, j)];
        }
        v[(k, i)] = random_complex(rng, 1.0);
    }
    v[(k, k)] = Complex64::new(1.0, 0.0);
    BasisChange { u, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_changes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..=3 {
            for _ in 0..20 {
                random_basis_change(k, &mut rng).validate(k).unwrap();
            }
        }
    }

    #[test]
    fn generated_matrices_are_well_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..=3 {
            let p = well_conditioned_matrix(k, &mut rng);
            let sv = super::super::stacked_central(p.central()).singular_values();
            assert!(sv.min() >= 0.1 - 1e-12 && sv.max() <= 10.0 + 1e-12);
        }
    }

    #[test]
    fn heights_survive_random_basis_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = 0.0f64;
        for trial in 0..200 {
            let k = trial % 4;
            let p = well_conditioned_matrix(k, &mut rng);
            let change = random_basis_change(k, &mut rng);
            let h0 = super::super::height(&p).unwrap();
            let h1 = super::super::height(&super::super::change_basis(&p, &change).unwrap()).unwrap();
            worst = worst.max((h0 - h1).abs());
        }
        assert!(worst < 1e-10, "{worst}");
    }
}
