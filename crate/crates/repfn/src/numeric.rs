//! Scalar numeric kernels: Gamma function, adaptive quadrature, compensated
//! summation, and small combinatorial tables.

/// Lanczos coefficients (g = 7, n = 9), good for ~1e-13 relative error on the
/// positive real axis.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)] // published coefficient digits
const LANCZOS_P: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma function on the real line (poles at nonpositive integers).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_P[0];
        for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
            acc += p / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Adaptive Simpson quadrature with relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        whole,
        rel_tol * whole.abs().max(1e-300),
        60,
    )
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
}

/// Pairwise (tree) summation; error grows like O(log n) rather than O(n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 128;
    if values.len() <= BASE {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Stirling numbers of the second kind S(m, q) for m, q <= `max_m`.
pub fn stirling2_table(max_m: usize) -> Vec<Vec<u64>> {
    let mut s = vec![vec![0u64; max_m + 1]; max_m + 1];
    s[0][0] = 1;
    for m in 1..=max_m {
        for q in 1..=m {
            s[m][q] = s[m - 1][q - 1] + (q as u64) * s[m - 1][q];
        }
    }
    s
}

/// Median of a slice (not required to be sorted); empty input yields NaN.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// gcd of two nonnegative integers.
pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reflection_sanity() {
        // Gamma(1/2)^2 = pi.
        let g = gamma(0.5);
        assert!((g * g - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..=20u32 {
            // Gamma(n) = (n-1)!
            let rel = (gamma(n as f64) - fact).abs() / fact;
            assert!(rel < 1e-12, "Gamma({n}) rel err {rel}");
            fact *= n as f64;
        }
    }

    #[test]
    fn gamma_half_integers() {
        // Gamma(3/2) = sqrt(pi)/2, Gamma(5/2) = 3 sqrt(pi)/4.
        let sp = std::f64::consts::PI.sqrt();
        assert!((gamma(1.5) - sp / 2.0).abs() / (sp / 2.0) < 1e-12);
        assert!((gamma(2.5) - 3.0 * sp / 4.0).abs() / (3.0 * sp / 4.0) < 1e-12);
    }

    #[test]
    fn simpson_converges() {
        let val = integrate(&|t: f64| t.powf(-0.5), 1.0, 1.0e6, 1e-9);
        let exact = 2.0 * (1.0e6f64.sqrt() - 1.0);
        assert!((val - exact).abs() / exact < 1e-8);
    }

    #[test]
    fn stirling_row_sums_are_bell() {
        let s = stirling2_table(6);
        let bell: Vec<u64> = (0..=6).map(|m| s[m].iter().sum()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
