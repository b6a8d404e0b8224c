use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::matrix::DenseMatrix;

/// Seeded source of standard Gaussian test matrices.
///
/// Entries are drawn in column-major order, so the first `k` columns of an
/// `n x d` draw coincide with an `n x k` draw from the same state. Streams
/// derived with [`GaussianSampler::stream`] are independent of each other and
/// of the parent.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    seed: u64,
    rng: ChaCha12Rng,
}

impl GaussianSampler {
    pub fn new(seed: u64) -> Self {
        GaussianSampler {
            seed,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Independent sampler on stream `id` of the same seed.
    pub fn stream(seed: u64, id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(id);
        GaussianSampler { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `rows x cols` matrix of i.i.d. N(0, 1) entries.
    pub fn sample(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let data: Vec<f64> = (&mut self.rng).sample_iter(StandardNormal).take(rows * cols).collect();
        DenseMatrix::from_col_major(rows, cols, data).expect("length matches shape")
    }

    /// `count` draws from Uniform(0, 1).
    pub fn uniform(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.rng.random::<f64>()).collect()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }
}

/// Free-function form of [`GaussianSampler::sample`].
pub fn sample_gaussian(sampler: &mut GaussianSampler, rows: usize, cols: usize) -> DenseMatrix {
    sampler.sample(rows, cols)
}
