//! Brute-force oracles shared by the integration suites. Everything here is
//! computed by direct enumeration, independent of the convolution /
//! Möbius-inversion paths it is used to check.
#![allow(dead_code)] // each test binary uses its own subset

use repfn::enumeration::enumerate_solutions;
use repfn::model::{Equation, GrowthSpec, MeasureSpec, Phi};
use repfn::sampler::SampledSet;

/// Deterministic 64-bit mixer for reproducible pseudo-random instances.
pub struct Mix(pub u64);

impl Mix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.next() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Product of `p` over the distinct values of a tuple (idempotent weight).
pub fn tuple_weight(measure: &MeasureSpec, values_sorted_dedup: &[u64]) -> f64 {
    values_sorted_dedup
        .iter()
        .map(|&v| measure.probability(v))
        .product()
}

/// Direct-summation oracle for `E(r)(n)`: all tuples, idempotent weights.
pub fn expected_r_oracle(measure: &MeasureSpec, eq: &Equation, n: u64) -> f64 {
    let sols = enumerate_solutions(eq, n, None).expect("oracle enumeration");
    let mut terms: Vec<f64> = sols
        .iter()
        .map(|t| tuple_weight(measure, &t.value_set()))
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    terms.iter().sum()
}

/// Direct-summation oracle for `E(rho)(n)`: exact tuples only.
pub fn expected_rho_oracle(measure: &MeasureSpec, eq: &Equation, n: u64) -> f64 {
    let sols = enumerate_solutions(eq, n, None).expect("oracle enumeration");
    let mut terms: Vec<f64> = sols
        .iter()
        .filter(|t| t.is_exact())
        .map(|t| tuple_weight(measure, &t.value_set()))
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    terms.iter().sum()
}

/// Direct-summation oracle for the delta-small expectation.
pub fn expected_delta_small_oracle(
    measure: &MeasureSpec,
    eq: &Equation,
    n: u64,
    delta: f64,
) -> f64 {
    let threshold = (n as f64).powf(delta).max(1.0);
    let sols = enumerate_solutions(eq, n, None).expect("oracle enumeration");
    let mut terms: Vec<f64> = sols
        .iter()
        .filter(|t| t.values().iter().any(|&k| (k as f64) < threshold))
        .map(|t| tuple_weight(measure, &t.value_set()))
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    terms.iter().sum()
}

/// Plain double-loop oracle for `Delta(n, m)` over all pairs of distinct
/// solution events (deduplicated value sets).
pub fn delta_correlation_oracle(measure: &MeasureSpec, eq: &Equation, n: u64, m: u64) -> f64 {
    let events = |target: u64| -> Vec<Vec<u64>> {
        let mut sets: Vec<Vec<u64>> = enumerate_solutions(eq, target, None)
            .expect("oracle enumeration")
            .iter()
            .map(|s| s.value_set())
            .collect();
        sets.sort();
        sets.dedup();
        sets
    };
    let sn = events(n);
    let sm = events(m);
    let intersects = |a: &[u64], b: &[u64]| a.iter().any(|x| b.contains(x));
    let union_prob = |a: &[u64], b: &[u64]| -> f64 {
        let mut all: Vec<u64> = a.iter().chain(b.iter()).copied().collect();
        all.sort_unstable();
        all.dedup();
        all.iter().map(|&v| measure.probability(v)).product()
    };
    let mut total = 0.0;
    for list in [&sn, &sm] {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                if intersects(&list[i], &list[j]) {
                    total += union_prob(&list[i], &list[j]);
                }
            }
        }
    }
    for a in &sn {
        for b in &sm {
            if a != b && intersects(a, b) {
                total += 2.0 * union_prob(a, b);
            }
        }
    }
    total
}

/// One randomized oracle instance: equation, measure, sampled set.
pub struct Instance {
    pub eq: Equation,
    pub measure: MeasureSpec,
    pub set: SampledSet,
    pub n_max: u64,
}

/// Deterministic instance mix: 30 of length 2, 16 of length 3, 8 of length 4
/// (54 total), with random coefficients, measures, and sampled sets.
pub fn oracle_instances(seed: u64) -> Vec<Instance> {
    let mut mix = Mix(seed);
    let mut out = Vec::new();
    let plan: &[(usize, usize, u64, u64)] = &[
        // (count, length, min_n, max_n)
        (30, 2, 120, 300),
        (16, 3, 80, 200),
        (8, 4, 50, 100),
    ];
    for &(count, len, lo, hi) in plan {
        for _ in 0..count {
            let coeffs: Vec<u64> = (0..len).map(|_| 1 + mix.below(4)).collect();
            let eq = Equation::new(coeffs).expect("instance equation");
            let h = 2 + mix.below(2) as u32;
            let kappa = mix.unit() * (h as f64 - 1.0);
            let phi = match mix.below(3) {
                0 => Phi::One,
                1 => Phi::Log,
                _ => Phi::ExpSqrtLog,
            };
            let c = 0.2 + 0.6 * mix.unit();
            let measure = MeasureSpec::new(GrowthSpec::new(h, kappa, phi).expect("growth"), c)
                .expect("measure");
            let n_max = lo + mix.below(hi - lo + 1);
            let set = SampledSet::sample(&measure, n_max, mix.next(), 0).expect("sample");
            out.push(Instance {
                eq,
                measure,
                set,
                n_max,
            });
        }
    }
    out
}
