use crate::{Error, Result};

/// `1 - (K-1)^(K-1) / K^K`, the smallest `p` for which `r(K, p)` is defined.
pub fn lss_threshold(k: u32) -> f64 {
    let k = k as f64;
    1.0 - (k - 1.0).powf(k - 1.0) / k.powf(k)
}

fn check(k: u32, p: f64) -> Result<()> {
    let threshold = lss_threshold(k);
    if k == 0 || !(p >= threshold && p <= 1.0) {
        return Err(Error::LssDomain { k, p, threshold });
    }
    Ok(())
}

/// Density of the Bernoulli field dominated by any `K`-dependent field with
/// marginals at least `p`.
pub fn r_lss(k: u32, p: f64) -> Result<f64> {
    check(k, p)?;
    if p == 1.0 {
        return Ok(1.0);
    }
    let kf = k as f64;
    let a = 1.0 - (1.0 - p).powf(1.0 / kf) / (kf - 1.0).powf((kf - 1.0) / kf);
    let b = 1.0 - ((1.0 - p) * (kf - 1.0)).powf(1.0 / kf);
    Ok(a * b)
}

/// `r(K, 1 - √(1-p))²`.
pub fn r_prime(k: u32, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::LssDomain {
            k,
            p,
            threshold: 1.0 - (1.0 - lss_threshold(k)).powi(2),
        });
    }
    let s = 1.0 - (1.0 - p).sqrt();
    match r_lss(k, s) {
        Ok(r) => Ok(r * r),
        Err(_) => Err(Error::LssDomain {
            k,
            p,
            threshold: 1.0 - (1.0 - lss_threshold(k)).powi(2),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        for k in 1..=12 {
            assert_eq!(r_lss(k, 1.0).unwrap(), 1.0);
            assert_eq!(r_prime(k, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn k_two() {
        // (1 - 0.1)(1 - 0.1)
        assert!((r_lss(2, 0.99).unwrap() - 0.81).abs() < 1e-14);
        assert!((lss_threshold(2) - 0.75).abs() < 1e-15);
        assert!((r_lss(2, 0.75).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn independent_case() {
        for p in [0.0, 0.3, 0.9] {
            assert!((r_lss(1, p).unwrap() - p).abs() < 1e-15);
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(r_lss(2, 0.7), Err(Error::LssDomain { k: 2, .. })));
        assert!(r_lss(0, 0.9).is_err());
        assert!(r_lss(3, 1.1).is_err());
        assert!(r_prime(2, 0.9).is_err());
        assert!(r_prime(2, 0.9375).is_ok());
    }

    #[test]
    fn prime_below_r() {
        for k in 2..=8 {
            for i in 0..=200 {
                let p = 0.99 + 0.01 * i as f64 / 200.0;
                if let (Ok(a), Ok(b)) = (r_prime(k, p), r_lss(k, p)) {
                    assert!(a <= b + 1e-15, "k={k} p={p}");
                }
            }
        }
    }
}
