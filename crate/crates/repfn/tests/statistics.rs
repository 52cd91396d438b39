//! Statistical and asymptotic-trend integration tests: distributional sanity
//! of the sampler, the counting-function law, tail bounds against Monte
//! Carlo, and the recorded decay trends.

mod common;

use common::Mix;
use repfn::asymptotics::{beta_sum, zero_density_measure, SumMode};
use repfn::counting::{
    derivative_expectation_bound, expected_delta_small, expected_profile, ProfileKind,
};
use repfn::enumeration::{combinations, enumerate_solutions, max_disjoint_family, FamilyMode};
use repfn::experiments::{delta_correlation, tail_probability_bound};
use repfn::model::{Equation, GrowthSpec, MeasureSpec, Phi};
use repfn::sampler::{counting_law_report, SampledSet};

#[test]
fn table_phi_runs_through_the_pipeline() {
    // user-table slowly varying factor: law is reported, not asserted
    use repfn::model::PhiTable;
    let table = PhiTable::new(vec![1.0, 10.0, 10_000.0], vec![1.5, 2.0, 2.5]).unwrap();
    let growth = GrowthSpec::new(2, 0.5, Phi::Table(table)).unwrap();
    let measure = MeasureSpec::new(growth, 0.4).unwrap();
    let report = counting_law_report(&measure, 20_000, 5, 99).unwrap();
    assert!(report
        .rows
        .iter()
        .all(|r| r.ratio.is_finite() && r.ratio > 0.0));
    let eq = Equation::new(vec![1, 2]).unwrap();
    let prof = expected_profile(&measure, &eq, 500, ProfileKind::R).unwrap();
    assert!(prof.get(500) > 0.0);
    // no Gamma closed form for table growth
    assert!(repfn::asymptotics::expected_r_closed_form(&measure, &eq).is_err());
}

#[test]
fn per_index_inclusion_frequency_matches_p() {
    // empirical inclusion frequency over 1e4 trials within 5 standard errors
    // of p(k) for 100 random indices
    let measure = MeasureSpec::new(GrowthSpec::new(2, 0.5, Phi::Log).unwrap(), 0.45).unwrap();
    let trials = 10_000u64;
    let mut mix = Mix(0xF0F0);
    for _ in 0..100 {
        let k = 1 + mix.below(100_000);
        let p = measure.probability(k);
        let mut hits = 0u64;
        for t in 0..trials {
            if SampledSet::would_include(&measure, 77, t, k) {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt().max(1e-9);
        assert!(
            (freq - p).abs() <= 5.0 * se,
            "index {k}: freq {freq} vs p {p} (se {se})"
        );
    }
}

#[test]
fn counting_law_holds_at_one_million() {
    // ratio at x = N = 1e6 within [0.9, 1.1] averaged over 20 trials, for
    // built-in growths with kappa in {0, 1/2, 1}
    for &kappa in &[0.0, 0.5, 1.0] {
        let measure = MeasureSpec::new(GrowthSpec::new(2, kappa, Phi::One).unwrap(), 0.3).unwrap();
        let report = counting_law_report(&measure, 1_000_000, 20, 404).unwrap();
        let last = report.rows.last().unwrap();
        assert_eq!(last.x, 1_000_000);
        assert!(
            (0.9..=1.1).contains(&last.ratio),
            "kappa={kappa}: ratio {} at x=1e6",
            last.ratio
        );
    }
}

#[test]
fn fft_and_naive_expectation_paths_agree() {
    // N = 6000 forces the FFT path; N = 3000 stays on the naive path. The
    // overlap must agree to relative 1e-6.
    let eq = Equation::new(vec![1, 2]).unwrap();
    let measure = MeasureSpec::new(GrowthSpec::new(2, 0.5, Phi::One).unwrap(), 0.4).unwrap();
    let fft = expected_profile(&measure, &eq, 6000, ProfileKind::R).unwrap();
    let naive = expected_profile(&measure, &eq, 3000, ProfileKind::R).unwrap();
    for n in 0..=3000u64 {
        let (a, b) = (fft.get(n), naive.get(n));
        assert!(
            (a - b).abs() <= 1e-6 * b.abs().max(1e-12),
            "paths disagree at n={n}: {a} vs {b}"
        );
    }
}

#[test]
fn beta_sum_error_constant_is_stable() {
    // |direct - closed| / n^{alpha-1} stays bounded by a stable constant
    // across n in {1e3, 1e4, 1e5}.
    for &(alpha, beta, modulus, residue) in &[
        (0.5f64, 0.5f64, 1u64, 0u64),
        (1.0, 1.0, 1, 0),
        (1.5, 0.5, 2, 1),
    ] {
        let mut ks = Vec::new();
        for &n in &[1_000u64, 10_000, 100_000] {
            let d = beta_sum(alpha, beta, modulus, residue, n, SumMode::Direct).unwrap();
            let c = beta_sum(alpha, beta, modulus, residue, n, SumMode::Closed).unwrap();
            ks.push((d - c).abs() / (n as f64).powf(alpha - 1.0));
        }
        let kmax = ks.iter().cloned().fold(0.0f64, f64::max);
        let kmin = ks.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(
            kmax < 20.0,
            "error constant too large for ({alpha},{beta},{modulus},{residue}): {ks:?}"
        );
        assert!(
            kmax <= 10.0 * kmin.max(0.01),
            "error constant unstable for ({alpha},{beta},{modulus},{residue}): {ks:?}"
        );
    }
}

#[test]
fn tail_bound_dominates_monte_carlo_family_frequency() {
    // Pr(maxdisfam of size >= k) <= E(rho)^k / k! at k = ceil(E) + 3.
    let eq = Equation::new(vec![1, 1]).unwrap();
    let measure = zero_density_measure(0.3, 2, &eq).unwrap();
    let n = 1000u64;
    let bound = tail_probability_bound(&measure, &eq, n, 1).unwrap();
    let k = bound.expectation.ceil() as u64 + 3;
    let bound_k = tail_probability_bound(&measure, &eq, n, k).unwrap();
    let trials = 100u64;
    let mut hits = 0u64;
    for t in 0..trials {
        let set = SampledSet::sample(&measure, n, 909, t).unwrap();
        let sols = enumerate_solutions(&eq, n, Some(&set)).unwrap();
        let fam = max_disjoint_family(&sols, FamilyMode::ExactH2).unwrap();
        if fam.len() as u64 >= k {
            hits += 1;
        }
    }
    let freq = hits as f64 / trials as f64;
    assert!(
        bound_k.factorial_form >= freq,
        "tail bound {} below empirical {freq} at k={k}",
        bound_k.factorial_form
    );
    // the remark's exponential form bounds the factorial form at k >= E
    assert!(bound_k.exponential_form >= bound_k.factorial_form);
}

#[test]
fn pair_correlation_decays_along_doubling() {
    // Delta(n, 2n) decreases as n sweeps 200, 400, 800, 1600 under the
    // zero-density measure.
    let eq = Equation::new(vec![1, 1]).unwrap();
    let measure = zero_density_measure(0.3, 2, &eq).unwrap();
    let mut last = f64::INFINITY;
    for &n in &[200u64, 400, 800, 1600] {
        let d = delta_correlation(&measure, &eq, n, 2 * n).unwrap();
        assert!(d < last, "Delta({n},{}) = {d} did not decrease", 2 * n);
        last = d;
    }
}

#[test]
fn delta_small_expectation_ratio_decays() {
    // E(delta-small)(n) / (f(n)^h / n) trends down with n.
    let eq = Equation::new(vec![1, 1]).unwrap();
    let measure = MeasureSpec::new(GrowthSpec::new(2, 0.5, Phi::One).unwrap(), 0.4).unwrap();
    let n_max = 3000u64;
    let small = expected_delta_small(&measure, &eq, n_max, 0.5).unwrap();
    let g = measure.growth();
    let ratio = |n: u64| small.get(n) / (g.f(n as f64).powi(2) / n as f64);
    let first = ratio(375);
    let lastv = ratio(3000);
    assert!(
        lastv < first,
        "delta-small ratio did not decay: {first} -> {lastv}"
    );
}

#[test]
fn derivative_bound_is_monotone_in_j() {
    let eq = Equation::new(vec![1, 1, 2]).unwrap();
    let measure = MeasureSpec::new(GrowthSpec::new(3, 1.0, Phi::One).unwrap(), 0.8).unwrap();
    let b1 = derivative_expectation_bound(&measure, &eq, 200, 1).unwrap();
    let b2 = derivative_expectation_bound(&measure, &eq, 200, 2).unwrap();
    assert!(
        b1 >= b2,
        "derivative bound should not increase with j: {b1} < {b2}"
    );
    // j = l-1 leaves single-indicator expectations, which never exceed 1
    assert!(b2 <= 1.0 + 1e-12);
}

#[test]
fn family_product_chain_bounds_r() {
    // For l = 3: r(n) <= 3 * 3! * family(n) * 2 * max_k family2*(k), where
    // family2* is the largest greedy family among the length-2 sub-equations.
    let eq = Equation::new(vec![1, 1, 2]).unwrap();
    let measure = MeasureSpec::new(GrowthSpec::new(3, 1.5, Phi::One).unwrap(), 0.8).unwrap();
    for trial in 0..4u64 {
        let n = 150u64;
        let set = SampledSet::sample(&measure, n, 505, trial).unwrap();
        let sols = enumerate_solutions(&eq, n, Some(&set)).unwrap();
        if sols.is_empty() {
            continue;
        }
        let family = max_disjoint_family(&sols, FamilyMode::Greedy)
            .unwrap()
            .len() as u64;
        let mut max_sub_family = 0u64;
        for k in 0..=n {
            for positions in combinations(eq.len(), 2) {
                let sub = eq.subset(&positions).unwrap();
                let sub_sols = enumerate_solutions(&sub, k, Some(&set)).unwrap();
                let fam = max_disjoint_family(&sub_sols, FamilyMode::Greedy).unwrap();
                max_sub_family = max_sub_family.max(fam.len() as u64);
            }
        }
        let r = sols.len() as u64;
        let bound = 3 * 6 * family * 2 * max_sub_family.max(1);
        assert!(r <= bound, "chain bound violated: r={r} bound={bound}");
    }
}
