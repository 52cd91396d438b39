//! Gamma-function closed forms for the expectation asymptotics, with direct
//! summation counterparts for numeric verification.

use serde::Serialize;

use crate::enumeration::DEFAULT_ENUM_BUDGET;
use crate::error::{Error, Result};
use crate::model::{Equation, GrowthSpec, MeasureSpec, Phi};
use crate::numeric::{gamma, pairwise_sum};

/// A leading-order term `coefficient * n^exponent * (log n)^log_power`,
/// together with the exponent of the associated error term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub coefficient: f64,
    pub exponent: f64,
    pub error_exponent: f64,
    pub log_power: u32,
}

impl ClosedForm {
    pub fn evaluate(&self, n: f64) -> f64 {
        self.coefficient * n.powf(self.exponent) * n.ln().powi(self.log_power as i32)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("closed form serializes")
    }
}

/// Evaluation mode of the two-route sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    Direct,
    Closed,
}

/// `sum m^{alpha-1} (n-m)^{beta-1}` over `1 <= m <= n-1`, `m = r (mod L)`,
/// against the closed form `Gamma(alpha) Gamma(beta) / Gamma(alpha+beta) *
/// n^{alpha+beta-1} / L`.
pub fn beta_sum(
    alpha: f64,
    beta: f64,
    modulus: u64,
    residue: u64,
    n: u64,
    mode: SumMode,
) -> Result<f64> {
    if !(alpha >= beta && beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain("need alpha >= beta > 0 and beta <= 1"));
    }
    if modulus < 1 || residue >= modulus {
        return Err(Error::domain("need 0 <= r < L with L >= 1"));
    }
    if n <= modulus {
        return Err(Error::domain("need n > L"));
    }
    match mode {
        SumMode::Closed => {
            let nf = n as f64;
            Ok(
                gamma(alpha) * gamma(beta) / gamma(alpha + beta) * nf.powf(alpha + beta - 1.0)
                    / modulus as f64,
            )
        }
        SumMode::Direct => {
            let nf = n as f64;
            let mut m = if residue == 0 { modulus } else { residue };
            let mut terms = Vec::with_capacity((n / modulus) as usize + 1);
            while m < n {
                let mf = m as f64;
                terms.push(mf.powf(alpha - 1.0) * (nf - mf).powf(beta - 1.0));
                m += modulus;
            }
            Ok(pairwise_sum(&terms))
        }
    }
}

/// `sum (k_1 ... k_l)^{omega-1}` over positive solutions of
/// `sum b_i k_i = n`, against
/// `Gamma(omega)^l / Gamma(l omega) * gcd * 1[gcd | n] / (b_1...b_l)^omega
/// * n^{l omega - 1}`.
pub fn power_sum(omega: f64, eq: &Equation, n: u64, mode: SumMode) -> Result<f64> {
    let l = eq.len();
    if !(omega >= 1.0 / l as f64 && omega <= 1.0) {
        return Err(Error::domain(format!("omega outside [1/{l}, 1]")));
    }
    match mode {
        SumMode::Closed => {
            let nf = n as f64;
            if !n.is_multiple_of(eq.gcd()) {
                return Ok(0.0);
            }
            Ok(
                gamma(omega).powi(l as i32) / gamma(l as f64 * omega) * eq.gcd() as f64
                    / (eq.coeff_product() as f64).powf(omega)
                    * nf.powf(l as f64 * omega - 1.0),
            )
        }
        SumMode::Direct => {
            let mut est: u128 = 1;
            for &b in &eq.coeffs()[..l - 1] {
                est = est.saturating_mul((n / b + 1) as u128);
            }
            if est > DEFAULT_ENUM_BUDGET as u128 {
                return Err(Error::BudgetExceeded {
                    estimate: est,
                    budget: DEFAULT_ENUM_BUDGET,
                });
            }
            let mut terms = Vec::new();
            positive_power_terms(eq.coeffs(), omega, n, 1.0, &mut terms);
            Ok(pairwise_sum(&terms))
        }
    }
}

fn positive_power_terms(coeffs: &[u64], omega: f64, rem: u64, partial: f64, out: &mut Vec<f64>) {
    let b = coeffs[0];
    if coeffs.len() == 1 {
        if rem >= b && rem.is_multiple_of(b) {
            out.push(partial * ((rem / b) as f64).powf(omega - 1.0));
        }
        return;
    }
    let mut k = 1u64;
    while b * k < rem {
        positive_power_terms(
            &coeffs[1..],
            omega,
            rem - b * k,
            partial * (k as f64).powf(omega - 1.0),
            out,
        );
        k += 1;
    }
}

/// Leading coefficient of `E(r_{A,h}(n)) ~ coeff * F(n)`:
/// `c^h Gamma((1+kappa)/h)^h / Gamma(1+kappa) / (b_1...b_h)^{(1+kappa)/h}`.
pub fn expected_r_closed_form(measure: &MeasureSpec, eq: &Equation) -> Result<ClosedForm> {
    let g = measure.growth();
    let log_power = match g.phi() {
        Phi::One => 0,
        Phi::Log | Phi::PlainLog => 1,
        _ => {
            return Err(Error::domain(
                "closed form supports phi in {constant, log} only",
            ))
        }
    };
    let h = g.h();
    if eq.len() != h as usize {
        return Err(Error::domain("equation length must equal h"));
    }
    let hf = h as f64;
    let kappa = g.kappa();
    let coefficient = measure.c().powi(h as i32) * gamma((1.0 + kappa) / hf).powi(h as i32)
        / gamma(1.0 + kappa)
        / (eq.coeff_product() as f64).powf((1.0 + kappa) / hf);
    Ok(ClosedForm {
        coefficient,
        exponent: kappa,
        error_exponent: (hf - 1.0) * (1.0 + kappa) / hf - 1.0,
        log_power,
    })
}

/// Main term and error term of the power-growth corollary:
/// `r_{A,h}(n) = C^h (1+kappa)^h/h^h * Gamma((1+kappa)/h)^h/Gamma(1+kappa)
///  * n^kappa / (b_1...b_h)^{(1+kappa)/h} + O(E_{h,kappa})`.
#[derive(Debug, Clone, Serialize)]
pub struct PowerGrowthProfile {
    pub main: ClosedForm,
    pub error: ClosedForm,
}

pub fn power_growth_profile(
    c_big: f64,
    kappa: f64,
    h: u32,
    eq: &Equation,
) -> Result<PowerGrowthProfile> {
    if !(kappa > 0.0 && kappa <= h as f64 - 1.0) {
        return Err(Error::domain(format!("kappa outside (0, {}]", h - 1)));
    }
    if eq.len() != h as usize {
        return Err(Error::domain("equation length must equal h"));
    }
    let hf = h as f64;
    let coefficient = c_big.powi(h as i32) * (1.0 + kappa).powi(h as i32) / hf.powi(h as i32)
        * gamma((1.0 + kappa) / hf).powi(h as i32)
        / gamma(1.0 + kappa)
        / (eq.coeff_product() as f64).powf((1.0 + kappa) / hf);
    let (err_exp, err_log): (f64, u32) = match h {
        2 => (kappa / 2.0, 2),
        3 => (kappa / 2.0 + (kappa / 3.0 - 0.5).max(0.0), 3),
        _ => {
            if kappa <= 2.0 / (hf - 2.0) {
                (kappa / 2.0, h)
            } else if kappa < hf - 2.0 {
                ((1.0 - 1.0 / hf) * kappa - 1.0 / hf, 0)
            } else {
                ((1.0 - 1.0 / (2.0 * hf)) * kappa - 0.5, h)
            }
        }
    };
    let error = ClosedForm {
        coefficient: 1.0,
        exponent: err_exp,
        error_exponent: err_exp,
        log_power: err_log,
    };
    Ok(PowerGrowthProfile {
        main: ClosedForm {
            coefficient,
            exponent: kappa,
            error_exponent: err_exp,
            log_power: 0,
        },
        error,
    })
}

/// The zero-density constant `c = (1-eps)^{1/h} (b_1...b_h)^{1/h^2} / Gamma(1/h)`.
pub fn zero_density_constant(epsilon: f64, h: u32, eq: &Equation) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain("epsilon outside (0, 1/2)"));
    }
    if h < 2 || eq.len() != h as usize {
        return Err(Error::domain("need h >= 2 matching the equation length"));
    }
    let hf = h as f64;
    Ok(
        (1.0 - epsilon).powf(1.0 / hf) * (eq.coeff_product() as f64).powf(1.0 / (hf * hf))
            / gamma(1.0 / hf),
    )
}

/// The zero-density measure: `f(x) = (x log x)^{1/h}` with the constant from
/// [`zero_density_constant`]. Note `Pr(1 in A) = 0` in this regime.
pub fn zero_density_measure(epsilon: f64, h: u32, eq: &Equation) -> Result<MeasureSpec> {
    let c = zero_density_constant(epsilon, h, eq)?;
    MeasureSpec::new(GrowthSpec::new(h, 0.0, Phi::PlainLog)?, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eq(coeffs: &[u64]) -> Equation {
        Equation::new(coeffs.to_vec()).unwrap()
    }

    #[test]
    fn beta_sum_constant_summand() {
        // alpha = beta = 1: direct = n - 1, closed = n.
        let d = beta_sum(1.0, 1.0, 1, 0, 100, SumMode::Direct).unwrap();
        let c = beta_sum(1.0, 1.0, 1, 0, 100, SumMode::Closed).unwrap();
        assert_eq!(d, 99.0);
        assert!((c - 100.0).abs() < 1e-9);
    }

    #[test]
    fn beta_sum_halves_approach_pi() {
        let d = beta_sum(0.5, 0.5, 1, 0, 10_000, SumMode::Direct).unwrap();
        assert!((d - PI).abs() < 0.05, "direct {d}");
        let c = beta_sum(0.5, 0.5, 1, 0, 10_000, SumMode::Closed).unwrap();
        assert!((c - PI).abs() < 1e-12);
    }

    #[test]
    fn beta_sum_odd_residue() {
        // L=2, r=1, alpha=beta=1, n=100: 50 odd m in [1, 99]; closed = 50.
        let d = beta_sum(1.0, 1.0, 2, 1, 100, SumMode::Direct).unwrap();
        let c = beta_sum(1.0, 1.0, 2, 1, 100, SumMode::Closed).unwrap();
        assert_eq!(d, 50.0);
        assert!((c - 50.0).abs() < 1e-9);
    }

    #[test]
    fn beta_sum_domain() {
        assert!(beta_sum(0.5, 0.6, 1, 0, 100, SumMode::Direct).is_err());
        assert!(beta_sum(1.0, 0.0, 1, 0, 100, SumMode::Direct).is_err());
        assert!(beta_sum(1.0, 1.0, 4, 4, 100, SumMode::Direct).is_err());
        assert!(beta_sum(1.0, 1.0, 200, 0, 100, SumMode::Direct).is_err());
    }

    #[test]
    fn power_sum_unit_omega() {
        // omega = 1, eq (1,1): direct counts positive solutions = n - 1.
        let d = power_sum(1.0, &eq(&[1, 1]), 500, SumMode::Direct).unwrap();
        let c = power_sum(1.0, &eq(&[1, 1]), 500, SumMode::Closed).unwrap();
        assert_eq!(d, 499.0);
        assert!((c - 500.0).abs() < 1e-9);
    }

    #[test]
    fn power_sum_halves_approach_pi() {
        let d = power_sum(0.5, &eq(&[1, 1]), 10_000, SumMode::Direct).unwrap();
        assert!((d - PI).abs() < 0.05, "direct {d}");
    }

    #[test]
    fn power_sum_gcd_indicator() {
        let c = power_sum(0.75, &eq(&[2, 4]), 101, SumMode::Closed).unwrap();
        assert_eq!(c, 0.0);
        let d = power_sum(0.75, &eq(&[2, 4]), 101, SumMode::Direct).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn closed_form_scales_with_c_power_h() {
        use crate::model::{GrowthSpec, MeasureSpec, Phi};
        let e = eq(&[1, 1]);
        let g = GrowthSpec::new(2, 1.0, Phi::One).unwrap();
        let m1 = MeasureSpec::new(g.clone(), 0.3).unwrap();
        let m2 = MeasureSpec::new(g, 0.6).unwrap();
        let c1 = expected_r_closed_form(&m1, &e).unwrap();
        let c2 = expected_r_closed_form(&m2, &e).unwrap();
        assert!((c2.coefficient / c1.coefficient - 4.0).abs() < 1e-12);
        // h=2, kappa=1, b=(1,1): coefficient = c^2 (Gamma(1)^2/Gamma(2) = 1).
        assert!((c1.coefficient - 0.09).abs() < 1e-12);
        assert_eq!(c1.exponent, 1.0);
    }

    #[test]
    fn zero_density_constant_values() {
        // eps -> 0, h=2, b=(1,1): 1/Gamma(1/2) = 1/sqrt(pi).
        let c = zero_density_constant(1e-12, 2, &eq(&[1, 1])).unwrap();
        assert!((c - 1.0 / PI.sqrt()).abs() < 1e-9);
        let c = zero_density_constant(0.3, 2, &eq(&[1, 1])).unwrap();
        assert!((c - 0.7f64.sqrt() / PI.sqrt()).abs() < 1e-12);
        // b=(1,2) multiplies by 2^{1/4}.
        let c2 = zero_density_constant(0.3, 2, &eq(&[1, 2])).unwrap();
        assert!((c2 / c - 2.0f64.powf(0.25)).abs() < 1e-12);
        assert!(zero_density_constant(0.6, 2, &eq(&[1, 1])).is_err());
    }

    #[test]
    fn zero_density_cancellation_is_exact() {
        // Using the zero-density constant, the closed-form coefficient on log n is 1-eps.
        for &eps in &[0.1, 0.3, 0.45] {
            for h in [2u32, 3] {
                for coeffs in [vec![1u64; h as usize], {
                    let mut v = vec![1u64; h as usize];
                    v[h as usize - 1] = 2;
                    v
                }] {
                    let e = eq(&coeffs);
                    let m = zero_density_measure(eps, h, &e).unwrap();
                    let cf = expected_r_closed_form(&m, &e).unwrap();
                    assert!(
                        (cf.coefficient - (1.0 - eps)).abs() < 1e-10,
                        "coefficient {} for eps={eps} h={h}",
                        cf.coefficient
                    );
                    assert_eq!(cf.exponent, 0.0);
                    assert_eq!(cf.log_power, 1);
                }
            }
        }
    }

    #[test]
    fn power_growth_profile_cases() {
        // h=2, kappa=1, C=1, b=(1,1): main coefficient 1 on n, error n^{1/2} log^2 n.
        let p = power_growth_profile(1.0, 1.0, 2, &eq(&[1, 1])).unwrap();
        assert!((p.main.coefficient - 1.0).abs() < 1e-12);
        assert_eq!(p.main.exponent, 1.0);
        assert!((p.error.exponent - 0.5).abs() < 1e-15);
        assert_eq!(p.error.log_power, 2);

        // h=4, kappa=3: branch h-2 <= kappa <= h-1 gives n^{21/8 - 1/2} log^4 n.
        let p = power_growth_profile(1.0, 3.0, 4, &eq(&[1, 1, 1, 1])).unwrap();
        assert!((p.error.exponent - (21.0 / 8.0 - 0.5)).abs() < 1e-12);
        assert_eq!(p.error.log_power, 4);

        // h=3, kappa=1: n^{1/2} log^3 n.
        let p = power_growth_profile(1.0, 1.0, 3, &eq(&[1, 1, 1])).unwrap();
        assert!((p.error.exponent - 0.5).abs() < 1e-15);
        assert_eq!(p.error.log_power, 3);

        assert!(power_growth_profile(1.0, 0.0, 2, &eq(&[1, 1])).is_err());
    }

    #[test]
    fn higher_length_unit_coefficient_subcase() {
        // With h+1 unit coefficients and kappa = 1/h, the main coefficient at
        // C = 1 collapses to Gamma(1 + 1/h)^h.
        for h in [2u32, 3, 4] {
            let hf = h as f64;
            let e = eq(&vec![1u64; h as usize + 1]);
            let p = power_growth_profile(1.0, 1.0 / hf, h + 1, &e).unwrap();
            let expect = gamma(1.0 + 1.0 / hf).powi(h as i32);
            assert!(
                (p.main.coefficient - expect).abs() < 1e-12,
                "h={h}: {} vs {expect}",
                p.main.coefficient
            );
        }
    }

    #[test]
    fn closed_form_json_round_trip_fields() {
        let cf = ClosedForm {
            coefficient: 1.5,
            exponent: 0.5,
            error_exponent: -0.25,
            log_power: 2,
        };
        let json = cf.to_json();
        assert!(json.contains("\"coefficient\":1.5"));
        assert!(json.contains("\"log_power\":2"));
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["exponent"], 0.5);
    }
}
