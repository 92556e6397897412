//! Small statistics toolbox for the Monte Carlo verifications: chi-square
//! goodness of fit, exact-ish binomial tails, frequency bias and a plug-in
//! mutual-information estimate.

/// Lanczos approximation of ln Γ(x), good to ~1e-13 for x > 0.
#[allow(clippy::excessive_precision)] // canonical g=7 coefficients as published
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // Series expansion.
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        (sum.ln() + a * x.ln() - x - ln_gamma(a)).exp()
    } else {
        // Continued fraction for Q(a, x).
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / 1e-300;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = b + an / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-15 {
                break;
            }
        }
        let q = (a * x.ln() - x - ln_gamma(a)).exp() * h;
        1.0 - q
    }
}

/// Chi-square goodness-of-fit test of observed counts against expected
/// probabilities. Returns `(statistic, p_value)`. Cells with expected
/// probability below `min_p` are pooled into their neighbour to keep the
/// approximation honest.
pub fn chi_square_gof(observed: &[u64], expected_p: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected_p.len());
    assert!(!observed.is_empty());
    let n: u64 = observed.iter().sum();
    let nf = n as f64;

    // Pool tiny-expectation cells (< 5 expected counts) left to right.
    let mut cells: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (o, p) in observed.iter().zip(expected_p.iter()) {
        acc_o += *o as f64;
        acc_e += p * nf;
        if acc_e >= 5.0 {
            cells.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 {
        if let Some(last) = cells.last_mut() {
            last.0 += acc_o;
            last.1 += acc_e;
        } else {
            cells.push((acc_o, acc_e));
        }
    }

    let mut stat = 0.0;
    for (o, e) in &cells {
        let d = o - e;
        stat += d * d / e;
    }
    let df = (cells.len().saturating_sub(1)).max(1) as f64;
    let p = 1.0 - regularized_gamma_p(df / 2.0, stat / 2.0);
    (stat, p)
}

/// P(Binomial(n, p) ≤ k), summed directly.
pub fn binomial_cdf(n: u64, p: f64, k: u64) -> f64 {
    if k >= n {
        return 1.0;
    }
    let q = 1.0 - p;
    let mut sum = 0.0;
    for i in 0..=k {
        let ln_c = ln_gamma(n as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((n - i) as f64 + 1.0);
        let ln_term = ln_c
            + if p > 0.0 { i as f64 * p.ln() } else { if i == 0 { 0.0 } else { f64::NEG_INFINITY } }
            + if q > 0.0 { (n - i) as f64 * q.ln() } else { if n == i { 0.0 } else { f64::NEG_INFINITY } };
        sum += ln_term.exp();
    }
    sum.min(1.0)
}

/// |empirical P(bit = 1) − ½| of a bit string.
pub fn frequency_bias(bits: &[u8]) -> f64 {
    if bits.is_empty() {
        return 0.0;
    }
    let ones = bits.iter().filter(|b| **b == 1).count() as f64;
    (ones / bits.len() as f64 - 0.5).abs()
}

/// Plug-in mutual information (bits) between two binary sequences.
pub fn mutual_information(xs: &[u8], ys: &[u8]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mut joint = [[0.0f64; 2]; 2];
    for (x, y) in xs.iter().zip(ys.iter()) {
        joint[(*x & 1) as usize][(*y & 1) as usize] += 1.0;
    }
    let mut mi = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let pxy = joint[x][y] / n;
            if pxy == 0.0 {
                continue;
            }
            let px = (joint[x][0] + joint[x][1]) / n;
            let py = (joint[0][y] + joint[1][y]) / n;
            mi += pxy * (pxy / (px * py)).log2();
        }
    }
    mi.max(0.0)
}

/// Mean and standard deviation of a sample.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Two-proportion z statistic for comparing detection rates.
pub fn two_proportion_z(hits_a: u64, n_a: u64, hits_b: u64, n_b: u64) -> f64 {
    let pa = hits_a as f64 / n_a as f64;
    let pb = hits_b as f64 / n_b as f64;
    let pooled = (hits_a + hits_b) as f64 / (n_a + n_b) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n_a as f64 + 1.0 / n_b as f64)).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (pa - pb) / se
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_known_values() {
        // Γ(5) = 24, Γ(0.5) = √π
        assert!((ln_gamma(5.0) - 24.0f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        assert!((ln_gamma(1.0)).abs() < 1e-12);
    }

    #[test]
    fn chi_square_critical_values_from_tables() {
        // Textbook critical points: P(χ² ≥ 9.488 | df=4) = 0.05,
        // P(χ² ≥ 18.307 | df=10) = 0.05 and P(χ² ≥ 6.635 | df=1) = 0.01.
        let p4 = 1.0 - regularized_gamma_p(2.0, 9.488 / 2.0);
        assert!((p4 - 0.05).abs() < 5e-4, "df=4: {p4}");
        let p10 = 1.0 - regularized_gamma_p(5.0, 18.307 / 2.0);
        assert!((p10 - 0.05).abs() < 5e-4, "df=10: {p10}");
        let p1 = 1.0 - regularized_gamma_p(0.5, 6.635 / 2.0);
        assert!((p1 - 0.01).abs() < 5e-4, "df=1: {p1}");
    }

    #[test]
    fn chi_square_gof_accepts_exact_fit() {
        let observed = [250u64, 250, 250, 250];
        let expected = [0.25; 4];
        let (stat, p) = chi_square_gof(&observed, &expected);
        assert!(stat < 1e-12);
        assert!(p > 0.999);
    }

    #[test]
    fn chi_square_gof_rejects_gross_misfit() {
        let observed = [900u64, 50, 25, 25];
        let expected = [0.25; 4];
        let (_, p) = chi_square_gof(&observed, &expected);
        assert!(p < 1e-6);
    }

    #[test]
    fn binomial_cdf_exact_small_cases() {
        // Bin(4, 1/2): P(≤1) = 5/16, P(≤2) = 11/16.
        assert!((binomial_cdf(4, 0.5, 1) - 5.0 / 16.0).abs() < 1e-12);
        assert!((binomial_cdf(4, 0.5, 2) - 11.0 / 16.0).abs() < 1e-12);
        assert!((binomial_cdf(4, 0.5, 4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_of_copies_and_independents() {
        let xs: Vec<u8> = (0..1000).map(|i| (i % 2) as u8).collect();
        assert!((mutual_information(&xs, &xs) - 1.0).abs() < 1e-12);
        let ys: Vec<u8> = (0..1000).map(|i| ((i / 2) % 2) as u8).collect();
        assert!(mutual_information(&xs, &ys) < 1e-3);
    }
}
