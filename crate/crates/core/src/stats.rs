//! Small descriptive-statistics kernels shared across modules.

use crate::scalar::Real;

pub fn mean<F: Real>(xs: &[F]) -> Option<F> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().copied().sum::<F>() / F::of_count(xs.len() as u64))
}

/// Population standard deviation (divisor n).
pub fn population_sd<F: Real>(xs: &[F]) -> Option<F> {
    let m = mean(xs)?;
    let ss: F = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    Some((ss / F::of_count(xs.len() as u64)).sqrt())
}

/// Sample variance (divisor n-1).
pub fn sample_variance<F: Real>(xs: &[F]) -> Option<F> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: F = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    Some(ss / F::of_count(xs.len() as u64 - 1))
}

/// Pearson correlation; `None` when lengths differ, n < 2 or either side is constant.
pub fn pearson<F: Real>(xs: &[F], ys: &[F]) -> Option<F> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= F::zero() || syy <= F::zero() {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-F::one()).min(F::one()))
}

/// 1-based ranks with ties replaced by their average rank.
pub fn average_ranks<F: Real>(xs: &[F]) -> Vec<F> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut ranks = vec![F::zero(); xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // positions i..=j share rank mean((i+1)..=(j+1))
        let r = F::of((i + j) as f64 / 2.0 + 1.0);
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman<F: Real>(xs: &[F], ys: &[F]) -> Option<F> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ranks_average_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 5.0]),
            vec![2.0, 3.5, 3.5, 1.0]
        );
    }

    #[test]
    fn pearson_basics() {
        assert_relative_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_relative_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn population_sd_uses_n() {
        assert_relative_eq!(
            population_sd(&[1.0f64, 2.0, 3.0]).unwrap(),
            (2.0f64 / 3.0).sqrt()
        );
        assert_relative_eq!(sample_variance(&[1.0f64, 2.0, 3.0]).unwrap(), 1.0);
    }

    #[test]
    fn spearman_is_rank_based() {
        let x = [1.0f64, 2.0, 3.0, 4.0];
        let y = [1.0f64, 8.0, 27.0, 64.0];
        assert_relative_eq!(spearman(&x, &y).unwrap(), 1.0);
    }
}
