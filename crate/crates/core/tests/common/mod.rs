#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use suslov_core::algebra::SkewMatrix;
use suslov_core::model::BodyState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random state on the canonical distribution with `|Omega_in| <= scale`.
pub fn suslov_state(rng: &mut impl Rng, n: usize, scale: f64) -> BodyState {
    let w: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-scale..scale)).collect();
    BodyState::suslov(&w, &unit_vector(rng, n)).unwrap()
}

/// Random state with a full `Omega`.
pub fn full_state(rng: &mut impl Rng, n: usize, scale: f64) -> BodyState {
    let m = n * (n - 1) / 2;
    let upper: Vec<f64> = (0..m).map(|_| rng.gen_range(-scale..scale)).collect();
    BodyState::new(
        SkewMatrix::from_upper(n, &upper).unwrap(),
        nalgebra::DVector::from_vec(unit_vector(rng, n)),
    )
    .unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
