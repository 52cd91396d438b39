//! Count profiles `r_{A,l}(n)` for all `n <= N` via dilated convolution, and
//! exact expectation profiles under the product measure.
//!
//! Expectations respect indicator idempotency (`1_A(k)^2 = 1_A(k)`): a tuple
//! contributes the product of `p` over its *distinct* values. Grouping tuples
//! by their equality pattern (a set partition of the positions) and applying
//! Möbius inversion on the partition lattice turns this into a sum over set
//! partitions of plain convolutions. A block of size `m` with merged
//! coefficient `d` carries the weight array
//! `a[d v] = sum_q S(m, q) (-1)^{q-1} (q-1)! p(v)^q`,
//! where `S` are Stirling numbers of the second kind; the sum of the block
//! convolutions over all set partitions gives `E(r)`, and the signed
//! power-weight sum gives the exact-solution expectation `E(rho)`.

use realfft::num_complex::Complex;
use realfft::RealFftPlanner;
use serde::Serialize;

use crate::enumeration::{combinations, set_partitions};
use crate::error::{Error, Result};
use crate::model::{Equation, MeasureSpec};
use crate::numeric::stirling2_table;
use crate::sampler::SampledSet;

/// Naive quadratic convolution below this output length, FFT at or above.
const NAIVE_CONV_MAX: usize = 4096;

/// Cap on profile length (memory budget).
pub const PROFILE_CAP: u64 = 1 << 24;

/// Maximum allowed rounding residual when recovering integer counts from the
/// FFT path.
const FFT_INT_RESIDUAL: f64 = 0.25;

/// Integer count profile `n -> r_{A,l}(n)` for `n in [0, N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountProfile {
    eq: Equation,
    counts: Vec<u64>,
}

impl CountProfile {
    pub fn eq(&self) -> &Equation {
        &self.eq
    }

    pub fn n_max(&self) -> u64 {
        self.counts.len() as u64 - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, n: u64) -> u64 {
        self.counts[n as usize]
    }
}

/// Which expectation a profile holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProfileKind {
    R,
    Rho,
    DeltaSmall(f64),
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileKind::R => write!(f, "r"),
            ProfileKind::Rho => write!(f, "rho"),
            ProfileKind::DeltaSmall(d) => write!(f, "delta-small({d})"),
        }
    }
}

/// Exact expectation profile `n -> E(...)` for `n in [0, N]`.
#[derive(Debug, Clone)]
pub struct ExpectationProfile {
    eq: Equation,
    measure: MeasureSpec,
    kind: ProfileKind,
    values: Vec<f64>,
}

impl ExpectationProfile {
    pub fn eq(&self) -> &Equation {
        &self.eq
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: u64) -> f64 {
        self.values[n as usize]
    }
}

/// Convolution engine; keeps FFT plans cached across calls.
pub(crate) struct Conv {
    planner: RealFftPlanner<f64>,
}

impl Conv {
    pub(crate) fn new() -> Self {
        Conv {
            planner: RealFftPlanner::new(),
        }
    }

    /// Linear convolution truncated to `out_len` entries.
    pub(crate) fn conv(&mut self, a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
        if out_len < NAIVE_CONV_MAX {
            return conv_naive(a, b, out_len);
        }
        self.conv_fft(a, b, out_len)
    }

    fn conv_fft(&mut self, a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
        let full = a.len() + b.len() - 1;
        let size = full.next_power_of_two();
        let r2c = self.planner.plan_fft_forward(size);
        let c2r = self.planner.plan_fft_inverse(size);

        let mut fa = vec![0.0; size];
        fa[..a.len()].copy_from_slice(a);
        let mut sa = vec![Complex::new(0.0, 0.0); size / 2 + 1];
        r2c.process(&mut fa, &mut sa).expect("fft forward");

        let mut fb = vec![0.0; size];
        fb[..b.len()].copy_from_slice(b);
        let mut sb = vec![Complex::new(0.0, 0.0); size / 2 + 1];
        r2c.process(&mut fb, &mut sb).expect("fft forward");

        for (x, y) in sa.iter_mut().zip(sb.iter()) {
            *x *= *y;
        }
        let mut out = vec![0.0; size];
        c2r.process(&mut sa, &mut out).expect("fft inverse");
        let scale = 1.0 / size as f64;
        out.truncate(out_len);
        for v in &mut out {
            *v *= scale;
        }
        out
    }
}

/// Naive convolution with Kahan-compensated accumulation per output cell.
fn conv_naive(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let mut out = vec![0.0; out_len];
    let mut comp = vec![0.0; out_len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 || i >= out_len {
            continue;
        }
        let jmax = (out_len - i).min(b.len());
        for (j, &bj) in b[..jmax].iter().enumerate() {
            let cell = i + j;
            let y = ai * bj - comp[cell];
            let t = out[cell] + y;
            comp[cell] = (t - out[cell]) - y;
            out[cell] = t;
        }
    }
    out
}

fn conv_naive_u64(a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
    let mut out = vec![0u64; out_len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 || i >= out_len {
            continue;
        }
        let jmax = (out_len - i).min(b.len());
        for (j, &bj) in b[..jmax].iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Dilated indicator array of `A` under coefficient `b`: `g[m] = 1` iff
/// `b | m` and `m/b in A`.
fn dilated_indicator(set: &SampledSet, b: u64, n_max: u64) -> Vec<u64> {
    let mut g = vec![0u64; n_max as usize + 1];
    let mut m = 0u64;
    while m <= n_max {
        if set.contains(m / b) {
            g[m as usize] = 1;
        }
        m += b;
    }
    g
}

/// Exact count profile by folding dilated indicators of `A`.
pub fn count_profile(set: &SampledSet, eq: &Equation, n_max: u64) -> Result<CountProfile> {
    if set.n_max() < n_max {
        return Err(Error::domain(format!(
            "set support [0, {}] does not cover [0, {n_max}]",
            set.n_max()
        )));
    }
    if n_max >= PROFILE_CAP {
        return Err(Error::MemoryBudget {
            requested: n_max,
            cap: PROFILE_CAP,
        });
    }
    let out_len = n_max as usize + 1;
    let mut acc = dilated_indicator(set, eq.coeffs()[0], n_max);
    if eq.len() == 1 {
        return Ok(CountProfile {
            eq: eq.clone(),
            counts: acc,
        });
    }
    let mut conv = Conv::new();
    for &b in &eq.coeffs()[1..] {
        let g = dilated_indicator(set, b, n_max);
        if out_len < NAIVE_CONV_MAX {
            acc = conv_naive_u64(&acc, &g, out_len);
        } else {
            let fa: Vec<f64> = acc.iter().map(|&v| v as f64).collect();
            let fg: Vec<f64> = g.iter().map(|&v| v as f64).collect();
            let raw = conv.conv(&fa, &fg, out_len);
            let mut max_residual = 0.0f64;
            let mut rounded = Vec::with_capacity(out_len);
            for v in raw {
                let r = v.round();
                max_residual = max_residual.max((v - r).abs());
                rounded.push(if r < 0.0 { 0 } else { r as u64 });
            }
            if max_residual >= FFT_INT_RESIDUAL {
                return Err(Error::PrecisionLoss {
                    residual: max_residual,
                });
            }
            acc = rounded;
        }
    }
    Ok(CountProfile {
        eq: eq.clone(),
        counts: acc,
    })
}

/// Signed coefficients of `poly_m(x) = sum_q S(m,q) (-1)^{q-1} (q-1)! x^q`,
/// indexed by power `q` (index 0 unused).
fn idempotency_poly(m: usize, stirling: &[Vec<u64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; m + 1];
    let mut fact = 1.0f64; // (q-1)!
    for q in 1..=m {
        if q > 1 {
            fact *= (q - 1) as f64;
        }
        let sign = if (q - 1) % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[q] = sign * fact * stirling[m][q] as f64;
    }
    coeffs
}

/// Block weight array: `a[d v] = poly(p(v))` for `v >= min_value`, else 0.
fn block_array(p: &[f64], d: u64, poly: &[f64], n_max: u64, min_value: u64) -> Vec<f64> {
    let mut a = vec![0.0; n_max as usize + 1];
    let mut v = min_value;
    while d.checked_mul(v).is_some_and(|x| x <= n_max) {
        let pv = p[v as usize];
        // Horner, lowest power q = 1.
        let mut acc = 0.0;
        for q in (1..poly.len()).rev() {
            acc = acc * pv + poly[q];
        }
        a[(d * v) as usize] = acc * pv;
        v += 1;
    }
    a
}

fn prob_array(measure: &MeasureSpec, n_max: u64) -> Vec<f64> {
    (0..=n_max).map(|k| measure.probability(k)).collect()
}

/// Shared kernel: `E(r)`-type sum over all set partitions with idempotency
/// block weights, every value restricted to `>= min_value`.
fn expected_r_values(
    eq: &Equation,
    n_max: u64,
    min_value: u64,
    conv: &mut Conv,
    p: &[f64],
) -> Vec<f64> {
    let out_len = n_max as usize + 1;
    let stirling = stirling2_table(eq.len());
    let mut total = vec![0.0; out_len];
    for blocks in set_partitions(eq.len()) {
        let mut chain: Option<Vec<f64>> = None;
        for block in &blocks {
            let d: u64 = block.iter().map(|&i| eq.coeffs()[i]).sum();
            let poly = idempotency_poly(block.len(), &stirling);
            let a = block_array(p, d, &poly, n_max, min_value);
            chain = Some(match chain {
                None => a,
                Some(prev) => conv.conv(&prev, &a, out_len),
            });
        }
        for (t, v) in total.iter_mut().zip(chain.unwrap()) {
            *t += v;
        }
    }
    scrub(&mut total, eq);
    total
}

/// `E(rho)`: exact-solution expectation via Möbius inversion with power
/// weights `p^{|block|}`.
fn expected_rho_values(
    measure: &MeasureSpec,
    eq: &Equation,
    n_max: u64,
    conv: &mut Conv,
) -> Vec<f64> {
    let out_len = n_max as usize + 1;
    let p = prob_array(measure, n_max);
    let mut total = vec![0.0; out_len];
    for blocks in set_partitions(eq.len()) {
        let mut weight = 1.0f64;
        let mut chain: Option<Vec<f64>> = None;
        for block in &blocks {
            let m = block.len();
            let d: u64 = block.iter().map(|&i| eq.coeffs()[i]).sum();
            let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
            weight *= sign * (1..m).map(|i| i as f64).product::<f64>().max(1.0);
            let mut a = vec![0.0; out_len];
            let mut v = 0u64;
            while d.checked_mul(v).is_some_and(|x| x <= n_max) {
                a[(d * v) as usize] = p[v as usize].powi(m as i32);
                v += 1;
            }
            chain = Some(match chain {
                None => a,
                Some(prev) => conv.conv(&prev, &a, out_len),
            });
        }
        for (t, v) in total.iter_mut().zip(chain.unwrap()) {
            *t += weight * v;
        }
    }
    scrub(&mut total, eq);
    total
}

/// Zero out gcd-obstructed targets (exact) and clamp FFT ringing.
fn scrub(values: &mut [f64], eq: &Equation) {
    let g = eq.gcd();
    for (n, v) in values.iter_mut().enumerate() {
        if !(n as u64).is_multiple_of(g) || (*v < 0.0 && *v > -1e-6) {
            *v = 0.0;
        }
    }
}

/// Exact expectation profile of `r` or `rho` under the measure.
pub fn expected_profile(
    measure: &MeasureSpec,
    eq: &Equation,
    n_max: u64,
    kind: ProfileKind,
) -> Result<ExpectationProfile> {
    if n_max >= PROFILE_CAP {
        return Err(Error::MemoryBudget {
            requested: n_max,
            cap: PROFILE_CAP,
        });
    }
    let mut conv = Conv::new();
    let values = match kind {
        ProfileKind::R => {
            let p = prob_array(measure, n_max);
            expected_r_values(eq, n_max, 0, &mut conv, &p)
        }
        ProfileKind::Rho => expected_rho_values(measure, eq, n_max, &mut conv),
        ProfileKind::DeltaSmall(_) => {
            return Err(Error::domain(
                "use expected_delta_small for the delta-small kind",
            ))
        }
    };
    Ok(ExpectationProfile {
        eq: eq.clone(),
        measure: measure.clone(),
        kind,
        values,
    })
}

/// Exact expectation of the delta-small count: tuples with some coordinate
/// below `n^delta`. Computed as `E(r) - E(delta-normal)`, where the normal
/// part masks every value below the threshold; targets sharing an integer
/// threshold are batched into one masked convolution pass.
pub fn expected_delta_small(
    measure: &MeasureSpec,
    eq: &Equation,
    n_max: u64,
    delta: f64,
) -> Result<ExpectationProfile> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("delta must lie in (0, 1)"));
    }
    if n_max >= PROFILE_CAP {
        return Err(Error::MemoryBudget {
            requested: n_max,
            cap: PROFILE_CAP,
        });
    }
    let mut conv = Conv::new();
    let p = prob_array(measure, n_max);
    let total = expected_r_values(eq, n_max, 0, &mut conv, &p);
    let mut small = vec![0.0; n_max as usize + 1];

    // v_min(n) = ceil(max(n^delta, 1)) is nondecreasing; walk its level sets.
    let v_min = |n: u64| -> u64 { (n as f64).powf(delta).max(1.0).ceil() as u64 };
    let mut lo = 0u64;
    while lo <= n_max {
        let tau = v_min(lo);
        let mut hi = lo;
        while hi < n_max && v_min(hi + 1) == tau {
            hi += 1;
        }
        let normal = expected_r_values(eq, hi, tau, &mut conv, &p);
        for n in lo..=hi {
            let s = total[n as usize] - normal[n as usize];
            small[n as usize] = s.clamp(0.0, total[n as usize].max(0.0));
        }
        lo = hi + 1;
    }
    Ok(ExpectationProfile {
        eq: eq.clone(),
        measure: measure.clone(),
        kind: ProfileKind::DeltaSmall(delta),
        values: small,
    })
}

/// Diagnostic upper bound on Kim–Vu derivative expectations: the maximum of
/// `E(r)` over all sub-equations of length `l - j` and all remainders
/// `m in [1, n]`.
pub fn derivative_expectation_bound(
    measure: &MeasureSpec,
    eq: &Equation,
    n: u64,
    j: usize,
) -> Result<f64> {
    if j < 1 || j >= eq.len() {
        return Err(Error::domain(format!(
            "j={j} outside [1, {}]",
            eq.len() - 1
        )));
    }
    let sub_len = eq.len() - j;
    let mut best = 0.0f64;
    for positions in combinations(eq.len(), sub_len) {
        let sub = eq.subset(&positions)?;
        let profile = expected_profile(measure, &sub, n, ProfileKind::R)?;
        for m in 1..=n {
            best = best.max(profile.get(m));
        }
    }
    Ok(best)
}
