use crate::error::{invalid, Result};

const DIRECT_TERMS: usize = 64;
/// `B_{2j} / (2j)!` for `j = 1..=4`.
const BERNOULLI_OVER_FACTORIAL: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];

/// Hurwitz zeta `ζ(s, a) = Σ_{j≥0} (j + a)^{−s}` for `s > 1`, `a > 0`, by a
/// partial sum followed by an Euler–Maclaurin tail.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) || !(a > 0.0 && a.is_finite()) {
        return invalid(format!("hurwitz_zeta needs s > 1 and a > 0, got s={s}, a={a}"));
    }
    let mut sum: f64 = (0..DIRECT_TERMS).map(|j| (j as f64 + a).powf(-s)).sum();
    let x = DIRECT_TERMS as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += coef * rising * power;
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= x * x;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn direct(s: f64, a: f64) -> f64 {
        let terms = 2_000_000usize;
        let partial: f64 = (0..terms).rev().map(|j| (j as f64 + a).powf(-s)).sum();
        let x = terms as f64 + a;
        partial + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s)
    }

    #[test]
    fn classical_values() {
        assert!((hurwitz_zeta(2.0, 1.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(2.0, 0.5).unwrap() - PI * PI / 2.0).abs() < 1e-13);
        assert!((direct(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_direct_summation() {
        for &(s, a) in &[(1.2, 0.5), (1.12, 1.0), (2.4, 33.0), (2.48, 0.01), (1.5, 300.5)] {
            let z = hurwitz_zeta(s, a).unwrap();
            let d = direct(s, a);
            assert!(((z - d) / d).abs() < 1e-10, "s={s} a={a}: {z} vs {d}");
        }
    }

    #[test]
    fn telescoping() {
        for &(s, a) in &[(1.2, 0.3), (2.0, 5.0), (3.7, 0.9)] {
            let lhs = hurwitz_zeta(s, a).unwrap() - hurwitz_zeta(s, a + 1.0).unwrap();
            assert!((lhs / a.powf(-s) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn domain() {
        assert!(hurwitz_zeta(1.0, 1.0).is_err());
        assert!(hurwitz_zeta(2.0, 0.0).is_err());
    }
}
