use oif_core::{OifError, Scalar};

/// Two-sided 95 % normal quantile.
pub const Z95: f64 = 1.96;

/// Mean of a runtime sample and its 95 % confidence half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuntimeSample<F> {
    pub n: usize,
    pub mean: F,
    /// Standard error of the mean, `sqrt(Σ(r_i - r̄)² / (n (n - 1)))`.
    pub se: F,
    pub ci95: F,
}

pub fn stats<F: Scalar>(runs: &[F]) -> Result<RuntimeSample<F>, OifError> {
    let n = runs.len();
    if n < 2 {
        return Err(OifError::invalid_argument(format!(
            "need at least two runs for a standard error, got {n}"
        )));
    }
    let nf = F::from_usize(n).unwrap();
    let mean = runs.iter().fold(F::zero(), |s, &r| s + r) / nf;
    let ss = runs.iter().fold(F::zero(), |s, &r| s + (r - mean) * (r - mean));
    let se = (ss / (nf * (nf - F::one()))).sqrt();
    Ok(RuntimeSample {
        n,
        mean,
        se,
        ci95: F::lit(Z95) * se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_two_three() {
        let s = stats(&[1.0, 2.0, 3.0]).unwrap();
        // Σ(r - 2)² = 2, n(n-1) = 6
        let se = (2.0f64 / 6.0).sqrt();
        assert_eq!(s.mean, 2.0);
        assert!((s.se - se).abs() < 1e-15);
        assert!((s.ci95 - 1.96 * se).abs() < 1e-15);
    }

    #[test]
    fn constant_sample_has_zero_error() {
        let s = stats(&[0.25; 30]).unwrap();
        assert_eq!(s.se, 0.0);
        assert_eq!(s.ci95, 0.0);
    }

    #[test]
    fn too_few_runs() {
        assert_eq!(stats::<f64>(&[1.0]).unwrap_err().code(), -1);
        assert_eq!(stats::<f64>(&[]).unwrap_err().code(), -1);
    }

    #[test]
    fn single_precision() {
        let s = stats(&[1.0f32, 2.0, 3.0]).unwrap();
        assert!((s.se - 0.57735026).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut runs in prop::collection::vec(0.0f64..10.0, 2..40), seed in any::<u64>()) {
            let a = stats(&runs).unwrap();
            use rand::{seq::SliceRandom, SeedableRng};
            runs.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            let b = stats(&runs).unwrap();
            prop_assert!((a.mean - b.mean).abs() <= 1e-12 * a.mean.abs().max(1.0));
            prop_assert!((a.se - b.se).abs() <= 1e-9 * a.se + 1e-12);
        }
    }
}
