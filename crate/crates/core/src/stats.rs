//! Summary statistics over load vectors and aligned series.

use crate::scalar::Scalar;

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::nan();
    }
    xs.iter().copied().sum::<T>() / T::of_u64(xs.len() as u64)
}

/// Gini coefficient, `sum_i sum_j |x_i - x_j| / (2 n^2 mean)`.
///
/// Evaluated through the sorted-rank identity. Zero for an empty or all-zero
/// input; values must be non-negative.
pub fn gini<T: Scalar>(xs: &[T]) -> T {
    let n = xs.len();
    let total: T = xs.iter().copied().sum();
    if n == 0 || total <= T::zero() {
        return T::zero();
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let nf = T::of_u64(n as u64);
    let weighted: T = sorted.iter().enumerate().map(|(i, &x)| (T::of_u64(2 * i as u64 + 1) - nf) * x).sum();
    (weighted / (nf * total)).max(T::zero())
}

/// Pearson correlation; `NaN` when either series has zero variance or the
/// lengths differ.
pub fn pearson<T: Scalar>(a: &[T], b: &[T]) -> T {
    if a.len() != b.len() || a.len() < 2 {
        return T::nan();
    }
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = T::zero();
    let mut saa = T::zero();
    let mut sbb = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa == T::zero() || sbb == T::zero() {
        return T::nan();
    }
    (sab / (saa.sqrt() * sbb.sqrt())).max(-T::one()).min(T::one())
}

/// Index of the first maximum; `None` for empty input.
pub fn argmax<T: Scalar>(xs: &[T]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in xs.iter().enumerate() {
        if best.is_none_or(|b| x > xs[b]) {
            best = Some(i);
        }
    }
    best
}

/// Index of the first minimum; `None` for empty input.
pub fn argmin<T: Scalar>(xs: &[T]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &x) in xs.iter().enumerate() {
        if best.is_none_or(|b| x < xs[b]) {
            best = Some(i);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gini_pairs(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mu = xs.iter().sum::<f64>() / n;
        let mut s = 0.0;
        for a in xs {
            for b in xs {
                s += (a - b).abs();
            }
        }
        s / (2.0 * n * n * mu)
    }

    #[test]
    fn gini_degenerate_cases() {
        assert_eq!(gini(&[5.0, 5.0, 5.0, 5.0]), 0.0);
        assert_eq!(gini::<f64>(&[]), 0.0);
        assert_eq!(gini(&[0.0, 0.0]), 0.0);
        for k in 1..10usize {
            let mut xs = vec![0.0; k];
            xs[k / 2] = 7.0;
            assert!((gini(&xs) - (k as f64 - 1.0) / k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn pearson_cases() {
        let a: [f64; 4] = [1.0, 2.0, 3.0, 5.0];
        assert!((pearson(&a, &a) - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[-1.0, -2.0, -3.0, -5.0]) + 1.0).abs() < 1e-15);
        assert!(pearson(&a, &[2.0; 4]).is_nan());
        assert!(pearson(&a, &[1.0]).is_nan());
        assert!((pearson(&[1.0f32, 2.0, 4.0], &[1.0, 2.0, 4.0]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn extrema() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmin(&[1.0, 0.0, 0.0]), Some(1));
        assert_eq!(argmax::<f64>(&[]), None);
    }

    proptest! {
        #[test]
        fn gini_matches_pairwise_definition(xs in proptest::collection::vec(0.0f64..1e6, 1..40)) {
            prop_assume!(xs.iter().sum::<f64>() > 0.0);
            let g = gini(&xs);
            prop_assert!((g - gini_pairs(&xs)).abs() < 1e-9);
            prop_assert!((0.0..1.0).contains(&g));
        }
    }
}
