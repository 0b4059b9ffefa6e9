use rand::Rng as _;

use super::DenseMatrix;
use crate::rng::Rng;

/// Xavier/Glorot uniform weights, shaped `fan_out × fan_in` (the layer convention).
///
/// Entries are drawn from `U[-L, L]` with `L = sqrt(6 / (fan_in + fan_out))`.
pub fn xavier_uniform(fan_in: usize, fan_out: usize, rng: &mut Rng) -> DenseMatrix {
    assert!(fan_in >= 1 && fan_out >= 1, "fans must be positive");
    let limit = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
    DenseMatrix::from_fn(fan_out, fan_in, |_, _| rng.random_range(-limit..=limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn bound_and_determinism() {
        let a = xavier_uniform(3, 3, &mut seeded(7));
        assert_eq!(a.shape(), (3, 3));
        // L = sqrt(6/6) = 1
        assert!(a.as_slice().iter().all(|w| w.abs() <= 1.0));
        assert_eq!(a, xavier_uniform(3, 3, &mut seeded(7)));
        assert_ne!(a, xavier_uniform(3, 3, &mut seeded(8)));

        let big = xavier_uniform(150, 1024, &mut seeded(1));
        let limit = libm::sqrt(6.0 / 1174.0);
        assert!(big.as_slice().iter().all(|w| w.abs() <= limit));
        // spread should actually reach near the bound
        assert!(big.max_abs() > 0.99 * limit);
    }
}
