//! Seeded synthetic problems for the benchmark harness.
//!
//! Generator: σᵢ = 1, K = 2 correlation parameters with δu = 0.5 each,
//! Jacobian entries uniform in [−1, 1], a constant-model design (one column
//! of ones), and standard-normal observations. Everything derives from the
//! seed and size, so timings are reproducible.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use covfit::{CorrelationModel, Matrix};

pub struct SyntheticInstance {
    pub model: CorrelationModel,
    pub design: Matrix,
    pub observations: Vec<f64>,
}

pub fn synthetic_instance(n: usize, seed: u64) -> SyntheticInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let k = 2;
    let sigma = vec![1.0; n];
    let jacobian = Matrix::new(
        n,
        k,
        (0..n * k).map(|_| rng.random_range(-1.0..1.0)).collect(),
    )
    .expect("length matches by construction");
    let delta_u = vec![0.5; k];
    let model = CorrelationModel::new(sigma, jacobian, delta_u).expect("valid by construction");
    let observations: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    SyntheticInstance {
        model,
        design: Matrix::column_of_ones(n),
        observations,
    }
}
