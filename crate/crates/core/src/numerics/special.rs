use crate::error::{Error, Result};

/// Laguerre polynomial L_N(x) by the three-term recurrence
/// (k+1)L_{k+1} = (2k+1−x)L_k − k L_{k−1}.
pub fn laguerre(n: u32, x: f64) -> Result<f64> {
    if n > 10_000 {
        return Err(Error::Domain(format!("Laguerre order {n} exceeds 10^4")));
    }
    if !x.is_finite() {
        return Err(Error::Domain("non-finite argument".into()));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    if !cur.is_finite() {
        return Err(Error::Evaluation(format!("L_{n}({x}) overflows")));
    }
    Ok(cur)
}

/// Modified Bessel function of the first kind I_n(x) for 0 ≤ x ≤ 700.
///
/// Power series for x ≤ 1; otherwise Miller's backward recurrence normalised
/// with e^x = I_0(x) + 2 Σ_{k≥1} I_k(x), a sum of positive terms.
pub fn bessel_i(n: u32, x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::Domain(format!("bessel_i requires x >= 0, got {x}")));
    }
    if x > 700.0 {
        return Err(Error::Domain(format!("bessel_i argument {x} exceeds 700")));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if x <= 1.0 {
        return Ok(bessel_i_series(n, x));
    }
    Ok(bessel_i_scaled(n, x) * x.exp())
}

/// e^{−x} I_n(x), stable for 1 < x ≤ 700.
fn bessel_i_scaled(n: u32, x: f64) -> f64 {
    let n = n as usize;
    let start = {
        let base = (n as f64).max(x);
        (base + 60.0 + (120.0 * base).sqrt()).ceil() as usize + 2
    };
    let mut above = 0.0_f64; // I_{k+1}
    let mut cur = 1e-300_f64; // I_k
    let mut sum = 0.0_f64; // Σ_{k≥1} I_k
    let mut wanted = 0.0_f64;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let below = above + (k as f64) * two_over_x * cur; // I_{k−1}
        above = cur;
        cur = below;
        // `above` now holds I_k.
        sum += above;
        if k == n {
            wanted = above;
        }
        if cur > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            sum *= 1e-250;
            wanted *= 1e-250;
        }
    }
    // `cur` holds I_0.
    let norm = cur + 2.0 * sum;
    if n == 0 {
        cur / norm
    } else {
        wanted / norm
    }
}

fn bessel_i_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + n as f64));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 3.7).unwrap(), 1.0);
        assert_eq!(laguerre(1, 0.5).unwrap(), 0.5);
        assert!((laguerre(2, 0.5).unwrap() - 0.125).abs() < 1e-15);
        assert!(laguerre(10_001, 0.1).is_err());
    }

    #[test]
    fn laguerre_overflow_is_flagged() {
        assert!(matches!(laguerre(10_000, -1e300), Err(Error::Evaluation(_))));
    }

    #[test]
    fn bessel_small_arguments() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
        assert!((bessel_i(1, 0.05).unwrap() - 0.025_007_813_313_844_48).abs() < 1e-15);
        assert!(bessel_i(0, -1.0).is_err());
    }

    #[test]
    fn bessel_known_values() {
        // Reference values of I_0(1), I_1(10), I_5(2.5).
        let cases = [
            (0, 1.0, 1.266_065_877_752_008_4),
            (1, 10.0, 2_670.988_303_701_254),
            (5, 2.5, 0.032_843_475_172_023_23),
        ];
        for (n, x, want) in cases {
            let got = bessel_i(n, x).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "I_{n}({x}) = {got}, want {want}");
        }
    }
}
