//! Height of a random biextension period matrix and its invariance under
//! filtration-compatible changes of bases.

use lmhs_heights::mhs::random::{random_basis_change, well_conditioned_matrix};
use lmhs_heights::mhs::{change_basis, height};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..4 {
        let p = well_conditioned_matrix(k, &mut rng);
        let h = height(&p)?;
        let moved = height(&change_basis(&p, &random_basis_change(k, &mut rng))?)?;
        println!("k = {k}: hgt = {h:.15}  after change of basis {moved:.15}");
    }
    Ok(())
}
