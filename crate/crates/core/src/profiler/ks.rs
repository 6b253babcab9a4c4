use crate::error::{Error, Result};

/// Two-sample Kolmogorov-Smirnov statistic: the largest gap between the two
/// empirical CDFs over the pooled sample points.
pub fn ks_statistic(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::InvalidInput("KS statistic of an empty sample".into()));
    }
    if sample_a.iter().chain(sample_b).any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("KS statistic of NaN data".into()));
    }
    let mut a = sample_a.to_vec();
    let mut b = sample_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0.0f64;
    while i < a.len() || j < b.len() {
        // next pooled point; step both ECDFs past every copy of it
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(ks_statistic(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_statistic(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(ks_statistic(&[1.0, 2.0], &[1.0, 3.0]).unwrap(), 0.5);
    }

    #[test]
    fn empty_is_error() {
        assert!(ks_statistic(&[], &[1.0]).is_err());
        assert!(ks_statistic(&[1.0], &[]).is_err());
    }
}
