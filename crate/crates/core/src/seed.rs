//! Deterministic sub-seeding and sampling helpers.
//!
//! Every independent task (a multi-start, a Monte Carlo chunk, a sampled
//! pair) draws from its own generator seeded with `sub_seed(seed, task)`, so
//! results depend only on `(seed, task id)` and never on scheduling.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// SplitMix64 finalizer over `seed` and `task`.
pub fn sub_seed(seed: u64, task: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(task.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, task))
}

pub fn gaussian_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| StandardNormal.sample(rng)))
}

/// Uniformly distributed point on the Euclidean unit sphere.
pub fn unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Orthonormal basis of the Euclidean orthogonal complement of `normal`.
pub fn complement_basis(normal: &DVector<f64>) -> Vec<DVector<f64>> {
    let dim = normal.len();
    let n = normal.normalize();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim - 1);
    // Gram-Schmidt over the coordinate axes, least aligned with `n` first.
    let mut axes: Vec<usize> = (0..dim).collect();
    axes.sort_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()));
    for &k in &axes {
        if basis.len() == dim - 1 {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[k] = 1.0;
        v -= &n * n[k];
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    basis
}
