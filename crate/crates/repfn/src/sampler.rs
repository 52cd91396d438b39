//! Reproducible sampling from the product measure.
//!
//! Each index `k` gets its own Bernoulli draw from a counter-based stream
//! keyed by `(master_seed, trial_index)`: the draw for `k` is the `k`-th
//! 64-bit word of a ChaCha8 stream, obtained by seeking, so the sampled set
//! is independent of iteration order and thread schedule.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::MeasureSpec;

/// Default cap on the support size of a sampled set (bit array of N/8 bytes).
pub const MAX_SET_LEN: u64 = 1 << 28;

const CHUNK: u64 = 1 << 16;

/// A concrete subset of `[0, N]` with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSet {
    n_max: u64,
    bits: Vec<u64>,
    seed: Option<u64>,
    trial_index: Option<u64>,
    measure: Option<MeasureSpec>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Expand `(master_seed, trial_index)` into a 32-byte stream key.
fn stream_key(master_seed: u64, trial_index: u64) -> [u8; 32] {
    let mut state =
        master_seed ^ 0xa076_1d64_78bd_642f_u64.wrapping_mul(trial_index ^ 0x2545_f491_4f6c_dd1d);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

/// The uniform [0,1) variate used for index `k` under `(seed, trial)`.
fn unit_draw(rng: &mut ChaCha8Rng, k: u64) -> f64 {
    rng.set_word_pos(2 * k as u128);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl SampledSet {
    /// Draw a set from the product measure, deterministically in
    /// `(master_seed, trial_index)`. Index 0 is always included.
    pub fn sample(
        measure: &MeasureSpec,
        n_max: u64,
        master_seed: u64,
        trial_index: u64,
    ) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::domain("sample_set requires N >= 1"));
        }
        if n_max >= MAX_SET_LEN {
            return Err(Error::MemoryBudget {
                requested: n_max,
                cap: MAX_SET_LEN,
            });
        }
        let words = (n_max / 64 + 1) as usize;
        let key = stream_key(master_seed, trial_index);
        let n_chunks = n_max / CHUNK + 1;
        let chunks: Vec<Vec<u64>> = (0..n_chunks)
            .into_par_iter()
            .map(|ci| {
                let start = ci * CHUNK;
                let end = ((ci + 1) * CHUNK - 1).min(n_max);
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_word_pos(2 * start as u128);
                let mut local = vec![0u64; ((end - start) / 64 + 1) as usize];
                for k in start..=end {
                    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                    if u < measure.probability(k) {
                        let off = k - start;
                        local[(off / 64) as usize] |= 1 << (off % 64);
                    }
                }
                local
            })
            .collect();
        // CHUNK is a multiple of 64, so chunk words concatenate directly.
        let mut bits = Vec::with_capacity(words);
        for c in chunks {
            bits.extend_from_slice(&c);
        }
        bits.truncate(words);
        bits[0] |= 1;
        Ok(SampledSet {
            n_max,
            bits,
            seed: Some(master_seed),
            trial_index: Some(trial_index),
            measure: Some(measure.clone()),
        })
    }

    /// The full set `[0, N]` (deterministic helper for oracles and tests).
    pub fn full(n_max: u64) -> Self {
        let words = (n_max / 64 + 1) as usize;
        let mut bits = vec![u64::MAX; words];
        let extra = (n_max + 1) % 64;
        if extra != 0 {
            bits[words - 1] = (1u64 << extra) - 1;
        }
        SampledSet {
            n_max,
            bits,
            seed: None,
            trial_index: None,
            measure: None,
        }
    }

    /// A set from explicit members (0 is not forced here).
    pub fn from_members(n_max: u64, members: &[u64]) -> Result<Self> {
        let mut bits = vec![0u64; (n_max / 64 + 1) as usize];
        for &m in members {
            if m > n_max {
                return Err(Error::Range { x: m, n_max });
            }
            bits[(m / 64) as usize] |= 1 << (m % 64);
        }
        Ok(SampledSet {
            n_max,
            bits,
            seed: None,
            trial_index: None,
            measure: None,
        })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn trial_index(&self) -> Option<u64> {
        self.trial_index
    }

    pub fn measure(&self) -> Option<&MeasureSpec> {
        self.measure.as_ref()
    }

    #[inline]
    pub fn contains(&self, k: u64) -> bool {
        k <= self.n_max && (self.bits[(k / 64) as usize] >> (k % 64)) & 1 == 1
    }

    /// `|A ∩ [1, x]|` (index 0 excluded by convention).
    pub fn counting_function(&self, x: u64) -> Result<u64> {
        if x > self.n_max {
            return Err(Error::Range {
                x,
                n_max: self.n_max,
            });
        }
        if x == 0 {
            return Ok(0);
        }
        let full_words = (x + 1) / 64;
        let mut count: u64 = self.bits[..full_words as usize]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let rem = (x + 1) % 64;
        if rem != 0 {
            let mask = (1u64 << rem) - 1;
            count += (self.bits[full_words as usize] & mask).count_ones() as u64;
        }
        Ok(count - self.contains(0) as u64)
    }

    /// Members in ascending order.
    pub fn members(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for k in 0..=self.n_max {
            if self.contains(k) {
                out.push(k);
            }
        }
        out
    }

    /// Run-length-encoded text form: header lines then one inclusive interval
    /// per line.
    pub fn to_rle(&self) -> String {
        let mut out = String::from("# repfn sampled-set v1\n");
        out.push_str(&format!("n_max {}\n", self.n_max));
        if let Some(s) = self.seed {
            out.push_str(&format!("seed {s}\n"));
        }
        if let Some(t) = self.trial_index {
            out.push_str(&format!("trial {t}\n"));
        }
        let mut k = 0u64;
        while k <= self.n_max {
            if self.contains(k) {
                let start = k;
                while k < self.n_max && self.contains(k + 1) {
                    k += 1;
                }
                out.push_str(&format!("{start} {k}\n"));
            }
            k += 1;
        }
        out
    }

    /// Parse the RLE text form back into a set. Measure provenance is not
    /// part of the text format.
    pub fn from_rle(text: &str) -> Result<Self> {
        let mut n_max: Option<u64> = None;
        let mut seed = None;
        let mut trial = None;
        let mut intervals: Vec<(u64, u64)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let a = parts.next().ok_or_else(|| Error::domain("bad rle line"))?;
            let b = parts.next();
            match (a, b) {
                ("n_max", Some(v)) => {
                    n_max = Some(v.parse().map_err(|_| Error::domain("bad n_max"))?)
                }
                ("seed", Some(v)) => seed = Some(v.parse().map_err(|_| Error::domain("bad seed"))?),
                ("trial", Some(v)) => {
                    trial = Some(v.parse().map_err(|_| Error::domain("bad trial"))?)
                }
                (lo, Some(hi)) => {
                    let lo: u64 = lo.parse().map_err(|_| Error::domain("bad interval"))?;
                    let hi: u64 = hi.parse().map_err(|_| Error::domain("bad interval"))?;
                    if lo > hi {
                        return Err(Error::domain("interval start exceeds end"));
                    }
                    intervals.push((lo, hi));
                }
                _ => return Err(Error::domain(format!("unparsable rle line: {line}"))),
            }
        }
        let n_max = n_max.ok_or_else(|| Error::domain("missing n_max header"))?;
        let mut bits = vec![0u64; (n_max / 64 + 1) as usize];
        for (lo, hi) in intervals {
            if hi > n_max {
                return Err(Error::Range { x: hi, n_max });
            }
            for k in lo..=hi {
                bits[(k / 64) as usize] |= 1 << (k % 64);
            }
        }
        Ok(SampledSet {
            n_max,
            bits,
            seed,
            trial_index: trial,
            measure: None,
        })
    }

    /// Raw inclusion draw for a single index (used by distribution tests).
    pub fn would_include(
        measure: &MeasureSpec,
        master_seed: u64,
        trial_index: u64,
        k: u64,
    ) -> bool {
        if k == 0 {
            return true;
        }
        let mut rng = ChaCha8Rng::from_seed(stream_key(master_seed, trial_index));
        unit_draw(&mut rng, k) < measure.probability(k)
    }
}

/// One row of the counting-law table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LawRow {
    pub x: u64,
    pub empirical_mean: f64,
    pub law: f64,
    pub ratio: f64,
}

/// Empirical check of `|A ∩ [1,x]| ~ c h/(1+kappa) x^{(1+kappa)/h} phi(x)^{1/h}`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CountingLawReport {
    pub rows: Vec<LawRow>,
    pub trials: u64,
}

/// Average the counting function over sampled sets against the strong-law
/// prediction, at logarithmically spaced checkpoints.
pub fn counting_law_report(
    measure: &MeasureSpec,
    n_max: u64,
    trials: u64,
    master_seed: u64,
) -> Result<CountingLawReport> {
    if trials < 1 {
        return Err(Error::domain("trials must be >= 1"));
    }
    if n_max < 100 {
        return Err(Error::domain("counting_law_report requires N >= 100"));
    }
    let mut xs = Vec::new();
    let lo = 100f64;
    let n = n_max as f64;
    let count = 17;
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let x = (lo * (n / lo).powf(t)).round() as u64;
        if xs.last() != Some(&x) {
            xs.push(x);
        }
    }

    let mut sums = vec![0f64; xs.len()];
    for t in 0..trials {
        let set = SampledSet::sample(measure, n_max, master_seed, t)?;
        for (i, &x) in xs.iter().enumerate() {
            sums[i] += set.counting_function(x)? as f64;
        }
    }

    let g = measure.growth();
    let h = g.h() as f64;
    let kappa = g.kappa();
    let rows = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let xf = x as f64;
            let law = measure.c() * h / (1.0 + kappa)
                * xf.powf((1.0 + kappa) / h)
                * g.phi().value(xf).powf(1.0 / h);
            let empirical_mean = sums[i] / trials as f64;
            LawRow {
                x,
                empirical_mean,
                law,
                ratio: empirical_mean / law,
            }
        })
        .collect();
    Ok(CountingLawReport { rows, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GrowthSpec, Phi};

    fn measure(h: u32, kappa: f64, c: f64) -> MeasureSpec {
        MeasureSpec::new(GrowthSpec::new(h, kappa, Phi::One).unwrap(), c).unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = measure(2, 1.0, 0.3);
        let a = SampledSet::sample(&m, 10_000, 42, 7).unwrap();
        let b = SampledSet::sample(&m, 10_000, 42, 7).unwrap();
        assert_eq!(a, b);
        let c = SampledSet::sample(&m, 10_000, 42, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampling_matches_single_index_draws() {
        let m = measure(2, 0.5, 0.4);
        let set = SampledSet::sample(&m, 2_000, 9, 3).unwrap();
        for k in 0..=2_000u64 {
            assert_eq!(
                set.contains(k),
                SampledSet::would_include(&m, 9, 3, k),
                "mismatch at k={k}"
            );
        }
        // straddle the parallel generation chunk boundary
        let set = SampledSet::sample(&m, 70_000, 9, 3).unwrap();
        for k in 65_400..=65_700u64 {
            assert_eq!(
                set.contains(k),
                SampledSet::would_include(&m, 9, 3, k),
                "chunk-boundary mismatch at k={k}"
            );
        }
    }

    #[test]
    fn huge_c_gives_full_set() {
        let m = measure(2, 1.0, 1.0e9);
        let set = SampledSet::sample(&m, 500, 1, 0).unwrap();
        assert_eq!(set.counting_function(500).unwrap(), 500);
    }

    #[test]
    fn counting_function_conventions() {
        let set = SampledSet::from_members(4, &[0, 2]).unwrap();
        assert_eq!(set.counting_function(0).unwrap(), 0);
        assert_eq!(set.counting_function(4).unwrap(), 1);
        assert!(set.counting_function(5).is_err());
        let full = SampledSet::full(100);
        assert!(set.contains(2));
        assert_eq!(full.counting_function(100).unwrap(), 100);
    }

    #[test]
    fn rle_round_trip() {
        let m = measure(2, 0.5, 0.4);
        let set = SampledSet::sample(&m, 3_000, 5, 2).unwrap();
        let text = set.to_rle();
        let back = SampledSet::from_rle(&text).unwrap();
        assert_eq!(back.n_max(), set.n_max());
        assert_eq!(back.seed(), Some(5));
        assert_eq!(back.trial_index(), Some(2));
        for k in 0..=3_000 {
            assert_eq!(set.contains(k), back.contains(k));
        }
    }

    #[test]
    fn density_is_near_c_for_identity_growth() {
        // kappa=1, h=2: p = c everywhere, so |A ∩ [1,N]|/N concentrates at c.
        let m = measure(2, 1.0, 0.3);
        let mut ok = 0;
        let trials = 100;
        for t in 0..trials {
            let set = SampledSet::sample(&m, 100_000, 11, t).unwrap();
            let dens = set.counting_function(100_000).unwrap() as f64 / 100_000.0;
            if (dens - 0.3).abs() <= 0.01 {
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok}/{trials} trials within band");
    }
}
