//! One increment of each noise kind, and how hierarchical noise smooths
//! the fine-level perturbation when it is driven through a coarse level.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cbo::noise::{fine_dim, NoiseKind, NoiseModel};

fn roughness(v: &[f64]) -> f64 {
    let jumps: f64 = v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    let size: f64 = v.iter().map(|x| x * x).sum();
    jumps / size
}

fn main() {
    let m = 6;
    let d = fine_dim(m);
    let x = vec![1.0; d];
    let consensus = vec![0.0; d];
    let mut out = vec![0.0; d];
    let mut scratch = vec![0.0; d];

    for kind in [NoiseKind::Anisotropic, NoiseKind::Isotropic] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        NoiseModel::new(kind, 1.0).draw(&x, &consensus, 0.01, &mut rng, &mut out, &mut scratch);
        println!("{kind:?}: |dW| = {:.4}, roughness {:.3}", norm(&out), roughness(&out));
    }

    for coarse in 1..=m {
        let mut noise = NoiseModel::new(NoiseKind::Hierarchical { coarse, fine: m }, 1.0);
        noise.rescale = true;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut total = 0.0;
        for _ in 0..200 {
            noise.draw(&x, &consensus, 0.01, &mut rng, &mut out, &mut scratch);
            total += roughness(&out);
        }
        println!("hierarchical, coarse level {coarse}: mean roughness {:.3}", total / 200.0);
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
