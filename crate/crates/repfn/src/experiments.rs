//! Monte Carlo harnesses: concentration of `r` around its mean, zero density
//! in the log regime, pair correlations `Delta(n, m)`, disjointness tail
//! bounds, and the deterministic Raikov–Stöhr thin-basis check.

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{expected_r_closed_form, ClosedForm};
use crate::counting::{count_profile, expected_profile, ProfileKind};
use crate::enumeration::{decompose_counts, enumerate_solutions, max_disjoint_family, FamilyMode};
use crate::error::{Error, Result};
use crate::model::{Equation, MeasureSpec, Phi};
use crate::numeric::gamma;
use crate::sampler::SampledSet;

/// Full description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub measure: MeasureSpec,
    pub eq: Equation,
    pub n_max: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub delta: Option<f64>,
    pub checkpoints: Vec<u64>,
}

impl ExperimentConfig {
    /// Reject ill-formed configs: trial count, checkpoint range, equation
    /// length matching `h`, and the delta-range condition
    /// `1 - 1/(4h (1 - (h-1) min(theta_f, 1/h))) < delta < 1`.
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::domain("trials must be >= 1"));
        }
        if self.eq.len() != self.measure.h() as usize {
            return Err(Error::domain(format!(
                "equation length {} must equal h = {}",
                self.eq.len(),
                self.measure.h()
            )));
        }
        for &n in &self.checkpoints {
            if n < 2 || n > self.n_max {
                return Err(Error::domain(format!(
                    "checkpoint {n} outside [2, {}]",
                    self.n_max
                )));
            }
        }
        if let Some(delta) = self.delta {
            let lo = self.delta_lower_bound();
            if !(delta > lo && delta < 1.0) {
                return Err(Error::domain(format!("delta {delta} outside ({lo}, 1)")));
            }
        }
        Ok(())
    }

    /// Lower end of the admissible delta range for this measure.
    pub fn delta_lower_bound(&self) -> f64 {
        let h = self.measure.h() as f64;
        let theta = self.measure.growth().potter_theta().min(1.0 / h);
        1.0 - 1.0 / (4.0 * h * (1.0 - (h - 1.0) * theta))
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        f()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(f)
    }
}

/// Per-checkpoint statistics of the concentration experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationRow {
    pub n: u64,
    pub empirical_mean: f64,
    pub empirical_sd: f64,
    pub exact_expectation: f64,
    pub closed_form: Option<f64>,
    pub max_rel_dev: f64,
    pub flagged: bool,
    pub sandwich_ok: bool,
    pub decomposition_ok: bool,
}

/// Outcome of [`run_concentration`].
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub rows: Vec<ConcentrationRow>,
    pub trials: u64,
    pub master_seed: u64,
    pub regime_warning: bool,
    pub closed_form: Option<ClosedForm>,
}

impl ConcentrationReport {
    /// Fraction of checkpoints where the empirical mean missed the exact
    /// expectation by more than 3 standard errors.
    pub fn flag_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| r.flagged).count() as f64 / self.rows.len() as f64
    }

    pub fn sandwich_all(&self) -> bool {
        self.rows.iter().all(|r| r.sandwich_ok)
    }

    pub fn decomposition_all(&self) -> bool {
        self.rows.iter().all(|r| r.decomposition_ok)
    }
}

struct ConcentrationTrial {
    counts: Vec<u64>,
    sandwich_ok: Vec<bool>,
    decomposition_ok: Vec<bool>,
}

/// Sample `trials` sets and compare `r` at the checkpoints against the exact
/// expectation profile and the Gamma closed form; verify the h=2 disjoint
/// family sandwich and the decomposition identity on every trial.
pub fn run_concentration(cfg: &ExperimentConfig, threads: usize) -> Result<ConcentrationReport> {
    cfg.validate()?;
    let expected = expected_profile(&cfg.measure, &cfg.eq, cfg.n_max, ProfileKind::R)?;
    let closed = expected_r_closed_form(&cfg.measure, &cfg.eq).ok();
    let growth = cfg.measure.growth();
    let regime_warning = growth.growth(cfg.n_max as f64) < 2.0 * (cfg.n_max as f64).ln();
    let is_h2 = cfg.eq.len() == 2;

    let trials: Vec<ConcentrationTrial> = with_pool(threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<ConcentrationTrial> {
                let set = SampledSet::sample(&cfg.measure, cfg.n_max, cfg.master_seed, t)?;
                let profile = count_profile(&set, &cfg.eq, cfg.n_max)?;
                let mut counts = Vec::with_capacity(cfg.checkpoints.len());
                let mut sandwich_ok = Vec::with_capacity(cfg.checkpoints.len());
                let mut decomposition_ok = Vec::with_capacity(cfg.checkpoints.len());
                for &n in &cfg.checkpoints {
                    let r = profile.get(n);
                    counts.push(r);
                    let sols = enumerate_solutions(&cfg.eq, n, Some(&set))?;
                    debug_assert_eq!(sols.len() as u64, r);
                    // The two-sided sandwich holds for the maximum family
                    // (conflict components are paths and even cycles); a
                    // greedy maximal family only guarantees the lower side
                    // and half the maximum.
                    let mut ok = true;
                    if is_h2 {
                        let greedy = max_disjoint_family(&sols, FamilyMode::Greedy)?.len() as u64;
                        let exact = max_disjoint_family(&sols, FamilyMode::ExactH2)?.len() as u64;
                        ok &= exact <= r && r <= 2 * exact;
                        ok &= greedy <= r && 2 * greedy >= exact;
                    }
                    sandwich_ok.push(ok);
                    let d = decompose_counts(&cfg.eq, n, Some(&set))?;
                    decomposition_ok.push(d.total == r && d.parts_sum() == d.total);
                }
                Ok(ConcentrationTrial {
                    counts,
                    sandwich_ok,
                    decomposition_ok,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let t = cfg.trials as f64;
    let rows = cfg
        .checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let e_exact = expected.get(n);
            let mut mean = 0.0;
            for trial in &trials {
                mean += trial.counts[i] as f64;
            }
            mean /= t;
            let mut var = 0.0;
            let mut max_rel_dev = 0.0f64;
            for trial in &trials {
                let x = trial.counts[i] as f64;
                var += (x - mean) * (x - mean);
                if e_exact > 0.0 {
                    max_rel_dev = max_rel_dev.max((x - e_exact).abs() / e_exact);
                }
            }
            let sd = if cfg.trials > 1 {
                (var / (t - 1.0)).sqrt()
            } else {
                0.0
            };
            let se = sd / t.sqrt();
            let flagged = (mean - e_exact).abs() > 3.0 * se + 1e-9;
            ConcentrationRow {
                n,
                empirical_mean: mean,
                empirical_sd: sd,
                exact_expectation: e_exact,
                closed_form: closed.as_ref().map(|cf| cf.evaluate(n as f64)),
                max_rel_dev,
                flagged,
                sandwich_ok: trials.iter().all(|tr| tr.sandwich_ok[i]),
                decomposition_ok: trials.iter().all(|tr| tr.decomposition_ok[i]),
            }
        })
        .collect();

    Ok(ConcentrationReport {
        rows,
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        regime_warning,
        closed_form: closed,
    })
}

/// Per-dyadic-window zero statistics.
#[derive(Debug, Clone, Serialize)]
pub struct WindowRow {
    pub j: u32,
    pub lo: u64,
    pub hi: u64,
    pub trials_with_zero: u64,
    pub mean_zero_count: f64,
}

/// Per-checkpoint zero statistics.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroCheckpointRow {
    pub n: u64,
    pub empirical_pr_zero: f64,
    /// `prod_{R in S[n]} (1 - Pr(R))`, enumerated exactly for small `n`.
    pub product_lower_bound: Option<f64>,
    pub empirical_mean_r: f64,
    pub exact_expectation: f64,
    /// `(1 - eps) log n` implied by the measure constant.
    pub target: f64,
}

/// Outcome of [`run_zero_density`].
#[derive(Debug, Clone, Serialize)]
pub struct ZeroDensityReport {
    pub windows: Vec<WindowRow>,
    pub checkpoints: Vec<ZeroCheckpointRow>,
    pub per_trial_total_zeros: Vec<u64>,
    pub trials: u64,
    pub master_seed: u64,
    pub implied_one_minus_eps: f64,
    /// `E(r(N)) / log N` for the exact expectation profile.
    pub expectation_ratio_at_n_max: f64,
}

impl ZeroDensityReport {
    /// True when every dyadic window `j <= max_j` contains at least one zero
    /// of `r` in at least `frac` of the trials.
    pub fn windows_ok(&self, max_j: u32, frac: f64) -> bool {
        self.windows
            .iter()
            .filter(|w| w.j <= max_j)
            .all(|w| w.trials_with_zero as f64 >= frac * self.trials as f64)
    }

    /// True when the empirical zero probability clears the enumerated product
    /// lower bound at every checkpoint carrying one, within `z` standard
    /// errors of the binomial noise (the larger of the empirical and the
    /// bound-side scale, so rare events with an empty sample still pass).
    pub fn product_bound_ok(&self, z: f64) -> bool {
        self.checkpoints
            .iter()
            .all(|row| match row.product_lower_bound {
                None => true,
                Some(bound) => {
                    let p = row.empirical_pr_zero;
                    let var = (p * (1.0 - p)).max(bound * (1.0 - bound));
                    let se = (var / self.trials as f64).sqrt();
                    p + z * se >= bound
                }
            })
    }
}

const PRODUCT_BOUND_MAX_N: u64 = 2000;

/// Zero-density experiment in the `f = (x log x)^{1/h}` regime: count zeros
/// of `r` per dyadic window, compare zero frequencies at the checkpoints
/// against the exact product lower bound, and track `E(r(n)) / log n`.
pub fn run_zero_density(cfg: &ExperimentConfig, threads: usize) -> Result<ZeroDensityReport> {
    cfg.validate()?;
    let g = cfg.measure.growth();
    if g.kappa() != 0.0 || *g.phi() != Phi::PlainLog {
        return Err(Error::domain(
            "zero-density experiment requires the (x log x)^{1/h} measure (kappa=0, plain log)",
        ));
    }
    let h = cfg.measure.h();
    let implied_one_minus_eps = (cfg.measure.c() * gamma(1.0 / h as f64)
        / (cfg.eq.coeff_product() as f64).powf(1.0 / (h * h) as f64))
    .powi(h as i32);

    let expected = expected_profile(&cfg.measure, &cfg.eq, cfg.n_max, ProfileKind::R)?;
    let j_max = cfg.n_max.ilog2();

    struct ZeroTrial {
        window_zeros: Vec<u64>,
        checkpoint_zero: Vec<bool>,
        checkpoint_r: Vec<u64>,
        total_zeros: u64,
    }

    let trials: Vec<ZeroTrial> = with_pool(threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| -> Result<ZeroTrial> {
                let set = SampledSet::sample(&cfg.measure, cfg.n_max, cfg.master_seed, t)?;
                let profile = count_profile(&set, &cfg.eq, cfg.n_max)?;
                let mut window_zeros = vec![0u64; j_max as usize + 1];
                let mut total_zeros = 0u64;
                for n in 1..=cfg.n_max {
                    if profile.get(n) == 0 {
                        total_zeros += 1;
                        window_zeros[n.ilog2() as usize] += 1;
                    }
                }
                let checkpoint_zero = cfg
                    .checkpoints
                    .iter()
                    .map(|&n| profile.get(n) == 0)
                    .collect();
                let checkpoint_r = cfg.checkpoints.iter().map(|&n| profile.get(n)).collect();
                Ok(ZeroTrial {
                    window_zeros,
                    checkpoint_zero,
                    checkpoint_r,
                    total_zeros,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let windows = (0..=j_max)
        .map(|j| {
            let lo = 1u64 << j;
            let hi = ((1u64 << (j + 1)) - 1).min(cfg.n_max);
            let trials_with_zero = trials
                .iter()
                .filter(|t| t.window_zeros[j as usize] > 0)
                .count() as u64;
            let mean_zero_count = trials
                .iter()
                .map(|t| t.window_zeros[j as usize] as f64)
                .sum::<f64>()
                / cfg.trials as f64;
            WindowRow {
                j,
                lo,
                hi,
                trials_with_zero,
                mean_zero_count,
            }
        })
        .collect();

    let checkpoints = cfg
        .checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| -> Result<ZeroCheckpointRow> {
            let zeros = trials.iter().filter(|t| t.checkpoint_zero[i]).count() as f64;
            let mean_r =
                trials.iter().map(|t| t.checkpoint_r[i] as f64).sum::<f64>() / cfg.trials as f64;
            let product_lower_bound = if n <= PRODUCT_BOUND_MAX_N {
                Some(zero_probability_product_bound(&cfg.measure, &cfg.eq, n)?)
            } else {
                None
            };
            Ok(ZeroCheckpointRow {
                n,
                empirical_pr_zero: zeros / cfg.trials as f64,
                product_lower_bound,
                empirical_mean_r: mean_r,
                exact_expectation: expected.get(n),
                target: implied_one_minus_eps * (n as f64).ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ZeroDensityReport {
        windows,
        checkpoints,
        per_trial_total_zeros: trials.iter().map(|t| t.total_zeros).collect(),
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        implied_one_minus_eps,
        expectation_ratio_at_n_max: expected.get(cfg.n_max) / (cfg.n_max as f64).ln(),
    })
}

/// `prod_{R in S[n]} (1 - Pr(R))`, the correlation-inequality lower bound on
/// `Pr(r(n) = 0)`. `Pr(R)` is the product of `p` over the distinct values of
/// the solution; any all-forced solution collapses the bound to 0.
pub fn zero_probability_product_bound(measure: &MeasureSpec, eq: &Equation, n: u64) -> Result<f64> {
    let sols = enumerate_solutions(eq, n, None)?;
    let mut bound = 1.0f64;
    for s in sols {
        let pr: f64 = s
            .value_set()
            .iter()
            .map(|&v| measure.probability(v))
            .product();
        bound *= 1.0 - pr;
    }
    Ok(bound.max(0.0))
}

/// Budgets for the exact pair-correlation sum.
fn delta_budget(l: usize) -> Option<u64> {
    match l {
        2 => Some(5000),
        3 => Some(300),
        _ => None,
    }
}

/// Exact `Delta(n, m)`: the sum of `Pr(R and S)` over intersecting pairs of
/// solution events within `S[n]`, within `S[m]`, and across (the cross sum
/// counted twice). An event is a distinct value set — tuples sharing the same
/// value set (e.g. mirrored pairs under equal coefficients) describe the same
/// event and do not form a pair. `Pr(R and S)` is the product of `p` over the
/// union of the two value sets.
pub fn delta_correlation(measure: &MeasureSpec, eq: &Equation, n: u64, m: u64) -> Result<f64> {
    if n >= m {
        return Err(Error::domain("need n < m"));
    }
    let cap = delta_budget(eq.len()).ok_or(Error::BudgetExceeded {
        estimate: u128::MAX,
        budget: 0,
    })?;
    if m > cap {
        return Err(Error::BudgetExceeded {
            estimate: m as u128,
            budget: cap,
        });
    }
    let vs_n = solution_events(eq, n)?;
    let vs_m = solution_events(eq, m)?;
    let p: Vec<f64> = (0..=m).map(|k| measure.probability(k)).collect();

    let within = |vs: &[Vec<u64>]| -> f64 {
        let index = index_by_value(vs);
        let mut total = 0.0;
        for (v, ids) in &index {
            for (a, &i) in ids.iter().enumerate() {
                for &j in &ids[a + 1..] {
                    if min_shared(&vs[i], &vs[j]) == Some(*v) {
                        total += union_prob(&vs[i], &vs[j], &p);
                    }
                }
            }
        }
        total
    };

    let index_n = index_by_value(&vs_n);
    let index_m = index_by_value(&vs_m);
    let mut cross = 0.0;
    for (v, ids_n) in &index_n {
        if let Some(ids_m) = index_m.get(v) {
            for &i in ids_n {
                for &j in ids_m {
                    if vs_n[i] == vs_m[j] {
                        continue; // identical value set: same event, not a pair
                    }
                    if min_shared(&vs_n[i], &vs_m[j]) == Some(*v) {
                        cross += union_prob(&vs_n[i], &vs_m[j], &p);
                    }
                }
            }
        }
    }

    Ok(within(&vs_n) + within(&vs_m) + 2.0 * cross)
}

/// Distinct solution events of the target: deduplicated sorted value sets.
fn solution_events(eq: &Equation, n: u64) -> Result<Vec<Vec<u64>>> {
    let mut events: Vec<Vec<u64>> = enumerate_solutions(eq, n, None)?
        .iter()
        .map(|s| s.value_set())
        .collect();
    events.sort();
    events.dedup();
    Ok(events)
}

fn index_by_value(vs: &[Vec<u64>]) -> std::collections::BTreeMap<u64, Vec<usize>> {
    let mut map: std::collections::BTreeMap<u64, Vec<usize>> = std::collections::BTreeMap::new();
    for (i, v) in vs.iter().enumerate() {
        for &x in v {
            map.entry(x).or_default().push(i);
        }
    }
    map
}

/// Smallest value shared by two sorted sets, if any.
fn min_shared(a: &[u64], b: &[u64]) -> Option<u64> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

/// Product of `p` over the union of two sorted value sets.
fn union_prob(a: &[u64], b: &[u64], p: &[f64]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut prob = 1.0;
    while i < a.len() || j < b.len() {
        let v = if i == a.len() {
            let v = b[j];
            j += 1;
            v
        } else if j == b.len() || a[i] < b[j] {
            let v = a[i];
            i += 1;
            v
        } else if a[i] > b[j] {
            let v = b[j];
            j += 1;
            v
        } else {
            let v = a[i];
            i += 1;
            j += 1;
            v
        };
        prob *= p[v as usize];
    }
    prob
}

/// Disjointness-lemma tail bounds for a disjoint family of size `k`, based on
/// the exact-solution expectation `E = E(rho(n))`.
#[derive(Debug, Clone, Serialize)]
pub struct TailBound {
    pub expectation: f64,
    /// `E^k / k!`
    pub factorial_form: f64,
    /// `(e E / k)^k`
    pub exponential_form: f64,
}

pub fn tail_probability_bound(
    measure: &MeasureSpec,
    eq: &Equation,
    n: u64,
    k: u64,
) -> Result<TailBound> {
    if k < 1 {
        return Err(Error::domain("k must be >= 1"));
    }
    let expectation = expected_profile(measure, eq, n, ProfileKind::Rho)?.get(n);
    let mut factorial_form = 1.0f64;
    for i in 1..=k {
        factorial_form *= expectation / i as f64;
    }
    let exponential_form = (std::f64::consts::E * expectation / k as f64).powi(k as i32);
    Ok(TailBound {
        expectation,
        factorial_form,
        exponential_form,
    })
}

/// One target `n_k = 101010..10_2` of the Raikov–Stöhr check.
#[derive(Debug, Clone, Serialize)]
pub struct StohrRow {
    pub k: u32,
    pub n_k: u64,
    pub pair_count: u64,
    pub lower_bound: u64,
    pub ok: bool,
}

/// Outcome of [`raikov_stohr_check`].
#[derive(Debug, Clone, Serialize)]
pub struct StohrReport {
    pub k_max: u32,
    pub set_size: u64,
    /// Recorded constant: max of `|A ∩ [1,x]| / sqrt(x)` over `x < 4^K`.
    pub c_ratio: f64,
    pub rows: Vec<StohrRow>,
    pub cover_ok: bool,
    pub first_gap: Option<u64>,
}

fn base4_digits_in(mut x: u64, allowed: [u64; 2]) -> bool {
    while x > 0 {
        let d = x % 4;
        if d != allowed[0] && d != allowed[1] {
            return false;
        }
        x /= 4;
    }
    true
}

/// Member test of the Raikov–Stöhr set: base-4 digits all in {0,1} (even
/// binary positions) or all in {0,2} (odd binary positions).
pub fn stohr_member(x: u64) -> bool {
    base4_digits_in(x, [0, 1]) || base4_digits_in(x, [0, 2])
}

/// Deterministic thin-basis check: `A = S1 ∪ S2` built from binary digits at
/// odd / even positions satisfies `|A ∩ [1,x]| <= C sqrt(x)`, `A + A` covers
/// `[0, 4^K - 1]`, and the targets `n_k = (10)_2 repeated` have at least
/// `2^{k-1}` distinct-pair representations.
pub fn raikov_stohr_check(k_max: u32) -> Result<StohrReport> {
    if k_max == 0 || k_max > 12 {
        return Err(Error::domain("K must lie in [1, 12]"));
    }
    let limit = 4u64.pow(k_max);
    // Enumerate members: subsets of base-4 digit positions with digit 1 (S2)
    // or digit 2 (S1).
    let mut members = Vec::new();
    for mask in 0..(1u64 << k_max) {
        let mut s1 = 0u64;
        let mut s2 = 0u64;
        for bit in 0..k_max {
            if mask >> bit & 1 == 1 {
                let place = 4u64.pow(bit);
                s2 += place;
                s1 += 2 * place;
            }
        }
        members.push(s1);
        members.push(s2);
    }
    members.sort_unstable();
    members.dedup();

    let mut c_ratio = 0.0f64;
    let mut seen = 0u64;
    for &a in &members {
        if a == 0 {
            continue;
        }
        seen += 1;
        c_ratio = c_ratio.max(seen as f64 / (a as f64).sqrt());
    }

    let mut rows = Vec::new();
    for k in 1..=k_max {
        let n_k: u64 = (1..=k).map(|i| 1u64 << (2 * i - 1)).sum();
        let mut pair_count = 0u64;
        for &a in &members {
            if 2 * a > n_k {
                break;
            }
            if stohr_member(n_k - a) {
                pair_count += 1;
            }
        }
        let lower_bound = 1u64 << (k - 1);
        rows.push(StohrRow {
            k,
            n_k,
            pair_count,
            lower_bound,
            ok: pair_count >= lower_bound,
        });
    }

    let mut covered = vec![false; limit as usize];
    for (i, &a) in members.iter().enumerate() {
        if a >= limit {
            break;
        }
        for &b in &members[i..] {
            let s = a + b;
            if s >= limit {
                break;
            }
            covered[s as usize] = true;
        }
    }
    let first_gap = covered.iter().position(|&c| !c).map(|i| i as u64);

    Ok(StohrReport {
        k_max,
        set_size: members.len() as u64,
        c_ratio,
        rows,
        cover_ok: first_gap.is_none(),
        first_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::zero_density_measure;
    use crate::model::GrowthSpec;

    fn eq(coeffs: &[u64]) -> Equation {
        Equation::new(coeffs.to_vec()).unwrap()
    }

    fn const_measure(c: f64) -> MeasureSpec {
        MeasureSpec::new(GrowthSpec::new(2, 1.0, Phi::One).unwrap(), c).unwrap()
    }

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            measure: const_measure(0.4),
            eq: eq(&[1, 1]),
            n_max: 400,
            trials: 8,
            master_seed: 123,
            delta: None,
            checkpoints: vec![50, 100, 200, 400],
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_config();
        assert!(cfg.validate().is_ok());
        cfg.checkpoints = vec![1];
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config();
        cfg.eq = eq(&[1, 1, 1]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn delta_range_condition() {
        // h=2, theta = min(1/2, 1/2) = 1/2 for kappa=1: lower bound is
        // 1 - 1/(8 (1 - 1/2)) = 0.75.
        let mut cfg = small_config();
        assert!((cfg.delta_lower_bound() - 0.75).abs() < 1e-12);
        cfg.delta = Some(0.9);
        assert!(cfg.validate().is_ok());
        cfg.delta = Some(0.7);
        assert!(cfg.validate().is_err());
        cfg.delta = Some(1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn deterministic_full_set_trial() {
        // p = 1: every trial sees the full set; zero variance and exact match.
        let cfg = ExperimentConfig {
            measure: const_measure(1.0e9),
            eq: eq(&[1, 1]),
            n_max: 16,
            trials: 3,
            master_seed: 1,
            delta: None,
            checkpoints: vec![4],
        };
        let report = run_concentration(&cfg, 1).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.empirical_mean, 5.0);
        assert_eq!(row.empirical_sd, 0.0);
        assert!((row.exact_expectation - 5.0).abs() < 1e-9);
        assert!(!row.flagged);
        assert!(row.sandwich_ok && row.decomposition_ok);
    }

    #[test]
    fn concentration_reproducible_across_thread_counts() {
        let cfg = small_config();
        let a = run_concentration(&cfg, 1).unwrap();
        let b = run_concentration(&cfg, 4).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.empirical_mean, y.empirical_mean);
            assert_eq!(x.empirical_sd, y.empirical_sd);
            assert_eq!(x.max_rel_dev, y.max_rel_dev);
        }
    }

    #[test]
    fn zero_density_rejects_wrong_measure() {
        let cfg = small_config();
        assert!(run_zero_density(&cfg, 1).is_err());
    }

    #[test]
    fn zero_density_small_run() {
        let e = eq(&[1, 1]);
        let cfg = ExperimentConfig {
            measure: zero_density_measure(0.3, 2, &e).unwrap(),
            eq: e,
            n_max: 2000,
            trials: 10,
            master_seed: 5,
            delta: None,
            checkpoints: vec![100, 500, 2000],
        };
        let report = run_zero_density(&cfg, 2).unwrap();
        assert!((report.implied_one_minus_eps - 0.7).abs() < 1e-10);
        // every checkpoint has the enumerated bound at n <= 2000
        assert!(report
            .checkpoints
            .iter()
            .all(|r| r.product_lower_bound.is_some()));
        assert!(report.product_bound_ok(2.0));
        // zeros must exist in the small windows: Pr(1 in A) = 0 here
        assert!(report.windows_ok(5, 0.8));
    }

    #[test]
    fn product_bound_zeroes_on_forced_solution() {
        // n = 0 has the all-zero solution with Pr = 1, so the bound is 0.
        let m = const_measure(0.4);
        let bound = zero_probability_product_bound(&m, &eq(&[1, 1]), 0).unwrap();
        assert_eq!(bound, 0.0);
    }

    #[test]
    fn delta_correlation_disjoint_supports() {
        // eq (3,5): S[8] = {(1,1)}, S[21] = {(2,3),(7,0)}; no shared values.
        let m = const_measure(0.5);
        let d = delta_correlation(&m, &eq(&[3, 5]), 8, 21).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn delta_correlation_matches_pair_oracle() {
        let m = const_measure(0.45);
        let e = eq(&[1, 1]);
        for (n, mm) in [(6u64, 9u64), (10, 17), (25, 40)] {
            let fast = delta_correlation(&m, &e, n, mm).unwrap();
            let oracle = delta_oracle(&m, &e, n, mm);
            assert!(
                (fast - oracle).abs() <= 1e-12 * oracle.max(1.0),
                "delta mismatch at ({n},{mm}): {fast} vs {oracle}"
            );
        }
    }

    /// Plain double-loop oracle over all pairs of distinct events.
    fn delta_oracle(m: &MeasureSpec, e: &Equation, n: u64, mm: u64) -> f64 {
        let sn = solution_events(e, n).unwrap();
        let sm = solution_events(e, mm).unwrap();
        let p: Vec<f64> = (0..=mm).map(|k| m.probability(k)).collect();
        let mut total = 0.0;
        for (list_a, list_b, factor, same) in [
            (&sn, &sn, 1.0, true),
            (&sm, &sm, 1.0, true),
            (&sn, &sm, 2.0, false),
        ] {
            for (i, ev_a) in list_a.iter().enumerate() {
                let j0 = if same { i + 1 } else { 0 };
                for ev_b in list_b.iter().skip(j0) {
                    if !same && ev_a == ev_b {
                        continue;
                    }
                    if min_shared(ev_a, ev_b).is_some() {
                        total += factor * union_prob(ev_a, ev_b, &p);
                    }
                }
            }
        }
        total
    }

    #[test]
    fn delta_correlation_budget() {
        let m = const_measure(0.5);
        assert!(delta_correlation(&m, &eq(&[1, 1]), 100, 6000).is_err());
        assert!(delta_correlation(&m, &eq(&[1, 1]), 10, 5).is_err());
    }

    #[test]
    fn tail_bound_arithmetic() {
        // k=1: bound = E; E=2, k=4: 16/24.
        let m = const_measure(1.0e9); // full set: E(rho)(n) exact count
        let b = tail_probability_bound(&m, &eq(&[1, 1]), 10, 1).unwrap();
        assert!((b.factorial_form - b.expectation).abs() < 1e-9);
        let e = 2.0f64;
        let fact: f64 = (1..=4u64).map(|i| e / i as f64).product();
        assert!((fact - 16.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn stohr_small_cases() {
        let report = raikov_stohr_check(3).unwrap();
        assert!(report.cover_ok, "A+A must cover [0, 4^3)");
        assert_eq!(report.rows[0].n_k, 2);
        assert!(report.rows[0].pair_count >= 1);
        assert_eq!(report.rows[2].n_k, 42);
        assert!(report.rows[2].pair_count >= 4);
        assert!(report.c_ratio <= 8.0);
        assert!(raikov_stohr_check(13).is_err());
    }
}
