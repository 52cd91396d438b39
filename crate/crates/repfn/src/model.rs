//! Domain types: weighted equations, growth functions `F(x) = x^kappa phi(x)`,
//! and the product measure `Pr(n in A) = min(c f(n)/n, 1)` with `f = (xF)^{1/h}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// Maximum supported equation length (Bell-number machinery stays tractable).
pub const MAX_EQUATION_LEN: usize = 6;

/// Coefficient tuple `(b_1, ..., b_l)` of the linear form, with gcd metadata.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Equation {
    coeffs: Vec<u64>,
    gcd: u64,
}

impl Equation {
    pub fn new(coeffs: Vec<u64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("equation needs at least one coefficient"));
        }
        if coeffs.len() > MAX_EQUATION_LEN {
            return Err(Error::domain(format!(
                "equation length {} exceeds maximum {}",
                coeffs.len(),
                MAX_EQUATION_LEN
            )));
        }
        if coeffs.contains(&0) {
            return Err(Error::domain("coefficients must be positive"));
        }
        let gcd = coeffs.iter().fold(0u64, |acc, &b| numeric::gcd(acc, b));
        Ok(Equation { coeffs, gcd })
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn gcd(&self) -> u64 {
        self.gcd
    }

    pub fn max_coeff(&self) -> u64 {
        *self.coeffs.iter().max().unwrap()
    }

    pub fn coeff_product(&self) -> u64 {
        self.coeffs.iter().product()
    }

    /// Sub-equation given by the listed coefficient positions (kept in order).
    pub fn subset(&self, positions: &[usize]) -> Result<Equation> {
        let coeffs = positions.iter().map(|&i| self.coeffs[i]).collect();
        Equation::new(coeffs)
    }
}

impl std::fmt::Display for Equation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// One ordered solution `(k_1, ..., k_l)` of `sum b_i k_i = n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolutionTuple {
    values: Vec<u64>,
    target: u64,
}

impl SolutionTuple {
    pub fn new(eq: &Equation, values: Vec<u64>, target: u64) -> Result<Self> {
        if values.len() != eq.len() {
            return Err(Error::domain("tuple length does not match equation"));
        }
        let lhs: u128 = values
            .iter()
            .zip(eq.coeffs())
            .map(|(&k, &b)| k as u128 * b as u128)
            .sum();
        if lhs != target as u128 {
            return Err(Error::domain(format!(
                "tuple does not solve the equation: lhs {lhs} != {target}"
            )));
        }
        Ok(SolutionTuple { values, target })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    /// Exactness predicate: all entries pairwise distinct.
    pub fn is_exact(&self) -> bool {
        let mut v = self.values.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }

    /// Sorted distinct values appearing in the tuple.
    pub fn value_set(&self) -> Vec<u64> {
        let mut v = self.values.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Slowly varying factor `phi` of the target growth `F(x) = x^kappa phi(x)`.
///
/// `Log` is shifted (`log(e + x)`) so that `F` stays positive on `[1, N]`;
/// `PlainLog` is the unshifted `log x` used by the zero-density regime, where
/// `F(1) = 0` is wanted (it forces `Pr(1 in A) = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Phi {
    One,
    Log,
    ExpSqrtLog,
    PlainLog,
    Table(PhiTable),
}

impl Phi {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Phi::One => 1.0,
            Phi::Log => (std::f64::consts::E + x).ln(),
            Phi::ExpSqrtLog => (std::f64::consts::E + x).ln().sqrt().exp(),
            Phi::PlainLog => {
                if x <= 1.0 {
                    0.0
                } else {
                    x.ln()
                }
            }
            Phi::Table(t) => t.value(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Phi::One => "const",
            Phi::Log => "log",
            Phi::ExpSqrtLog => "exp-sqrt-log",
            Phi::PlainLog => "plain-log",
            Phi::Table(_) => "table",
        }
    }
}

/// User-supplied slowly varying function, piecewise linear in log x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiTable {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl PhiTable {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(Error::domain("phi table needs >= 2 matching points"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("phi table abscissas must increase"));
        }
        if xs[0] <= 0.0 || values.iter().any(|&v| !v.is_finite() || v <= 0.0) {
            return Err(Error::domain("phi table values must be positive finite"));
        }
        Ok(PhiTable { xs, values })
    }

    fn value(&self, x: f64) -> f64 {
        let x = x.max(self.xs[0]);
        if x >= *self.xs.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let i = self.xs.partition_point(|&t| t <= x) - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let w = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
        v0 + w * (v1 - v0)
    }
}

/// Target growth `F(x) = x^kappa phi(x)` and the derived `f(x) = (x F(x))^{1/h}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpec {
    h: u32,
    kappa: f64,
    phi: Phi,
}

impl GrowthSpec {
    pub fn new(h: u32, kappa: f64, phi: Phi) -> Result<Self> {
        if h < 2 {
            return Err(Error::domain("h must be at least 2"));
        }
        if !(0.0..=(h as f64 - 1.0)).contains(&kappa) {
            return Err(Error::domain(format!(
                "kappa {kappa} outside [0, {}]",
                h - 1
            )));
        }
        Ok(GrowthSpec { h, kappa, phi })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    /// F(x) = x^kappa phi(x).
    pub fn growth(&self, x: f64) -> f64 {
        x.powf(self.kappa) * self.phi.value(x)
    }

    /// f(x) = (x F(x))^{1/h}.
    pub fn f(&self, x: f64) -> f64 {
        (x * self.growth(x)).powf(1.0 / self.h as f64)
    }

    /// The regular-variation exponent chosen for Lemma-style bounds:
    /// `theta_f = min((1 + kappa) / 2h, 1/h)`.
    pub fn potter_theta(&self) -> f64 {
        let h = self.h as f64;
        ((1.0 + self.kappa) / (2.0 * h)).min(1.0 / h)
    }
}

/// The product measure: `p(0) = 1` and `p(n) = min(c f(n)/n, 1)` for `n >= 1`.
///
/// With `Phi::PlainLog` the value `p(1)` is 0 (since `f(1) = 0`); all other
/// built-in growths keep `p` strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    growth: GrowthSpec,
    c: f64,
    zero_forced: bool,
}

impl MeasureSpec {
    pub fn new(growth: GrowthSpec, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::domain("c must be positive and finite"));
        }
        Ok(MeasureSpec {
            growth,
            c,
            zero_forced: true,
        })
    }

    pub fn growth(&self) -> &GrowthSpec {
        &self.growth
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn h(&self) -> u32 {
        self.growth.h
    }

    /// Inclusion probability of `k`.
    pub fn probability(&self, k: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let x = k as f64;
        (self.c * self.growth.f(x) / x).min(1.0)
    }
}

/// One row of the regularity ratio table: `x` against
/// `(integral_1^x f(t)/t dt) / f(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityRow {
    pub x: f64,
    pub ratio: f64,
}

/// Outcome of [`validate_regularity`].
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub rows: Vec<RegularityRow>,
    /// Median ratio over the upper window `x in [sqrt(N), N]`.
    pub window_median: f64,
    pub pass: bool,
}

/// Numeric check of the regularity condition `integral_1^x f(t)/t dt ~ f(x)`.
///
/// Ratios are tabulated at logarithmically spaced `x in [10, N]`. The check
/// passes when every tabulated ratio stays within a factor-4 band of the
/// median ratio over the upper window `[sqrt(N), N]`; a drifting ratio (e.g.
/// `f = log`, where it grows like `log(x)/2`) leaves the band at large `N`.
pub fn validate_regularity<F: Fn(f64) -> f64>(f: F, n_max: u64) -> Result<RegularityReport> {
    if n_max < 100 {
        return Err(Error::domain("validate_regularity requires N >= 100"));
    }
    let n = n_max as f64;
    let lo: f64 = 10.0;
    let points_per_decade = 8.0;
    let decades = (n / lo).log10();
    let count = (decades * points_per_decade).ceil() as usize + 1;
    let mut xs = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        xs.push(lo * (n / lo).powf(t));
    }

    // Reject non-positive or non-integrable f up front.
    for &x in &xs {
        let v = f(x);
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::domain(format!(
                "f must be positive and finite on [10, N]; f({x}) = {v}"
            )));
        }
    }

    let integrand = |t: f64| f(t) / t;
    let mut rows = Vec::with_capacity(xs.len());
    let mut acc = numeric::integrate(&integrand, 1.0, xs[0], 1e-9);
    rows.push(RegularityRow {
        x: xs[0],
        ratio: acc / f(xs[0]),
    });
    for w in xs.windows(2) {
        acc += numeric::integrate(&integrand, w[0], w[1], 1e-9);
        rows.push(RegularityRow {
            x: w[1],
            ratio: acc / f(w[1]),
        });
    }

    let window_lo = n.sqrt();
    let window: Vec<f64> = rows
        .iter()
        .filter(|r| r.x >= window_lo)
        .map(|r| r.ratio)
        .collect();
    let window_median = numeric::median(&window);
    let pass = rows
        .iter()
        .all(|r| r.ratio >= window_median / 4.0 && r.ratio <= window_median * 4.0);
    Ok(RegularityReport {
        rows,
        window_median,
        pass,
    })
}
