//! Brute-force ground truth: ordered solution enumeration, the exact /
//! non-exact decomposition over set partitions, delta-small splits, disjoint
//! families, dyadic box counts, and the sub-equation maximum `r*`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{Equation, SolutionTuple};
use crate::numeric::gcd;
use crate::sampler::SampledSet;

/// Default budget on tuple visits for any single enumeration call.
pub const DEFAULT_ENUM_BUDGET: u64 = 100_000_000;

/// A set partition of the variable positions together with the merged
/// coefficients (block sums) and the partition-lattice Möbius weight
/// `prod_B (-1)^{|B|-1} (|B|-1)!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionScheme {
    blocks: Vec<Vec<usize>>,
    merged_coeffs: Vec<u64>,
    mobius_weight: i64,
}

impl PartitionScheme {
    pub fn from_blocks(eq: &Equation, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; eq.len()];
        for b in &blocks {
            for &i in b {
                if i >= eq.len() || seen[i] {
                    return Err(Error::domain("blocks must partition the positions"));
                }
                seen[i] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::domain("blocks must cover all positions"));
        }
        let merged_coeffs = blocks
            .iter()
            .map(|b| b.iter().map(|&i| eq.coeffs()[i]).sum())
            .collect();
        let mobius_weight = blocks
            .iter()
            .map(|b| {
                let m = b.len() as i64;
                let sign = if (m - 1) % 2 == 0 { 1 } else { -1 };
                sign * factorial(m - 1)
            })
            .product();
        Ok(PartitionScheme {
            blocks,
            merged_coeffs,
            mobius_weight,
        })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn merged_coeffs(&self) -> &[u64] {
        &self.merged_coeffs
    }

    pub fn mobius_weight(&self) -> i64 {
        self.mobius_weight
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn merged_equation(&self) -> Result<Equation> {
        Equation::new(self.merged_coeffs.clone())
    }
}

fn factorial(m: i64) -> i64 {
    (1..=m).product::<i64>().max(1)
}

/// All set partitions of `{0, ..., len-1}` as block lists, discrete partition
/// first (the rest follow in reverse lexicographic order of their restricted
/// growth strings).
pub fn set_partitions(len: usize) -> Vec<Vec<Vec<usize>>> {
    let mut rgs = vec![0usize; len];
    let mut out = Vec::new();
    loop {
        let n_blocks = rgs.iter().max().copied().unwrap_or(0) + 1;
        let mut blocks = vec![Vec::new(); n_blocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(blocks);
        // next restricted growth string in lex order
        let mut i = len;
        loop {
            if i <= 1 {
                out.reverse();
                return out;
            }
            i -= 1;
            let max_prefix = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// Every derived equation of `eq`: one [`PartitionScheme`] per set partition
/// of the positions, `Bell(l)` in total, discrete partition first.
pub fn derived_equations(eq: &Equation) -> Vec<PartitionScheme> {
    set_partitions(eq.len())
        .into_iter()
        .map(|blocks| PartitionScheme::from_blocks(eq, blocks).expect("partition of positions"))
        .collect()
}

struct EnumCtx<'a> {
    coeffs: &'a [u64],
    suffix_gcd: Vec<u64>,
    filter: Option<&'a SampledSet>,
    budget: u64,
    visits: u64,
}

impl<'a> EnumCtx<'a> {
    fn new(eq: &'a Equation, filter: Option<&'a SampledSet>, budget: u64) -> Self {
        let l = eq.len();
        let mut suffix_gcd = vec![0u64; l + 1];
        for i in (0..l).rev() {
            suffix_gcd[i] = gcd(eq.coeffs()[i], suffix_gcd[i + 1]);
        }
        EnumCtx {
            coeffs: eq.coeffs(),
            suffix_gcd,
            filter,
            budget,
            visits: 0,
        }
    }

    fn admit(&self, k: u64) -> bool {
        match self.filter {
            None => true,
            Some(set) => set.contains(k),
        }
    }

    fn visit(&mut self) -> Result<()> {
        self.visits += 1;
        if self.visits > self.budget {
            Err(Error::BudgetExceeded {
                estimate: self.visits as u128,
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }
}

fn enumerate_rec(
    ctx: &mut EnumCtx,
    depth: usize,
    rem: u64,
    prefix: &mut Vec<u64>,
    mut emit: &mut dyn FnMut(&[u64]),
) -> Result<()> {
    let l = ctx.coeffs.len();
    if !rem.is_multiple_of(ctx.suffix_gcd[depth]) {
        return Ok(());
    }
    if depth == l - 1 {
        ctx.visit()?;
        let b = ctx.coeffs[depth];
        if rem.is_multiple_of(b) {
            let k = rem / b;
            if ctx.admit(k) {
                prefix.push(k);
                emit(prefix);
                prefix.pop();
            }
        }
        return Ok(());
    }
    let b = ctx.coeffs[depth];
    for k in 0..=rem / b {
        ctx.visit()?;
        if !ctx.admit(k) {
            continue;
        }
        prefix.push(k);
        enumerate_rec(ctx, depth + 1, rem - b * k, prefix, &mut emit)?;
        prefix.pop();
    }
    Ok(())
}

fn pre_estimate(eq: &Equation, n: u64) -> u128 {
    let mut est: u128 = 1;
    for &b in &eq.coeffs()[..eq.len() - 1] {
        est = est.saturating_mul((n / b + 1) as u128);
    }
    est.saturating_mul(eq.len() as u128)
}

/// All ordered solutions of `sum b_i k_i = n` (entries restricted to the
/// filter set when given), in lexicographic order.
pub fn enumerate_solutions(
    eq: &Equation,
    n: u64,
    filter: Option<&SampledSet>,
) -> Result<Vec<SolutionTuple>> {
    enumerate_solutions_with_budget(eq, n, filter, DEFAULT_ENUM_BUDGET)
}

pub fn enumerate_solutions_with_budget(
    eq: &Equation,
    n: u64,
    filter: Option<&SampledSet>,
    budget: u64,
) -> Result<Vec<SolutionTuple>> {
    if let Some(set) = filter {
        if set.n_max() < n {
            return Err(Error::domain(format!(
                "filter support [0, {}] does not cover [0, {n}]",
                set.n_max()
            )));
        }
    }
    let est = pre_estimate(eq, n);
    if est > budget as u128 {
        return Err(Error::BudgetExceeded {
            estimate: est,
            budget,
        });
    }
    let mut ctx = EnumCtx::new(eq, filter, budget);
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(eq.len());
    enumerate_rec(&mut ctx, 0, n, &mut prefix, &mut |values| {
        out.push(SolutionTuple::new(eq, values.to_vec(), n).expect("enumerated solution"));
    })?;
    Ok(out)
}

/// Result of the exact/non-exact decomposition at a single target.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// r_{A,l}(n): the count of all ordered solutions.
    pub total: u64,
    /// Exact-solution count of each derived equation, discrete first.
    pub parts: Vec<(PartitionScheme, u64)>,
}

impl Decomposition {
    pub fn parts_sum(&self) -> u64 {
        self.parts.iter().map(|(_, c)| c).sum()
    }
}

/// Count all solutions of `eq` at `n` and, per set partition `P`, the exact
/// (pairwise-distinct) solutions of the merged equation `c_P`. The identity
/// `total = sum_P parts[P]` holds exactly; both sides are computed
/// independently.
pub fn decompose_counts(
    eq: &Equation,
    n: u64,
    filter: Option<&SampledSet>,
) -> Result<Decomposition> {
    let total = enumerate_solutions(eq, n, filter)?.len() as u64;
    let mut parts = Vec::new();
    for scheme in derived_equations(eq) {
        let merged = scheme.merged_equation()?;
        let count = enumerate_solutions(&merged, n, filter)?
            .iter()
            .filter(|t| t.is_exact())
            .count() as u64;
        parts.push((scheme, count));
    }
    Ok(Decomposition { total, parts })
}

/// The delta-small / delta-normal split of a solution list.
#[derive(Debug, Clone)]
pub struct DeltaSplit {
    pub small: Vec<SolutionTuple>,
    pub normal: Vec<SolutionTuple>,
    pub threshold: f64,
}

/// Split solutions of target `n` into delta-small (some `k_j < n^delta`) and
/// delta-normal (all `k_j >= n^delta`). The threshold is `max(n^delta, 1)` so
/// that the degenerate targets `n = 0, 1` classify the all-zero tuple as
/// small.
pub fn split_delta(solutions: &[SolutionTuple], n: u64, delta: f64) -> Result<DeltaSplit> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("delta must lie in (0, 1)"));
    }
    if solutions.iter().any(|t| t.target() != n) {
        return Err(Error::domain("all solutions must target n"));
    }
    let threshold = (n as f64).powf(delta).max(1.0);
    let mut small = Vec::new();
    let mut normal = Vec::new();
    for t in solutions {
        if t.values().iter().any(|&k| (k as f64) < threshold) {
            small.push(t.clone());
        } else {
            normal.push(t.clone());
        }
    }
    Ok(DeltaSplit {
        small,
        normal,
        threshold,
    })
}

/// A family of solutions with pairwise disjoint value sets.
#[derive(Debug, Clone)]
pub struct DisjointFamily {
    pub members: Vec<SolutionTuple>,
}

impl DisjointFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// How to build the disjoint family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMode {
    /// Maximal family grown in lexicographic order (deterministic).
    Greedy,
    /// True maximum via independent-set DP on the conflict graph; only valid
    /// for length-2 solutions, where the conflict graph has degree <= 2.
    ExactH2,
}

/// Compute a disjoint family of the given solutions. Greedy mode returns a
/// maximal family; exact mode (length 2 only) a maximum one.
///
/// For length-2 solutions the conflict graph is a union of paths (unequal
/// coefficients) or mirror 2-cycles (equal coefficients), so the maximum
/// family always satisfies `family <= r <= 2 family`, and any maximal family
/// is at least half the maximum. The upper sandwich can fail for a greedy
/// maximal family when the coefficients differ: a lexicographic pass may take
/// the middle of a three-solution chain.
pub fn max_disjoint_family(
    solutions: &[SolutionTuple],
    mode: FamilyMode,
) -> Result<DisjointFamily> {
    let mut sols: Vec<&SolutionTuple> = solutions.iter().collect();
    sols.sort_by(|a, b| a.values().cmp(b.values()));
    match mode {
        FamilyMode::Greedy => {
            let mut used: HashSet<u64> = HashSet::new();
            let mut members = Vec::new();
            for t in sols {
                let vs = t.value_set();
                if vs.iter().all(|v| !used.contains(v)) {
                    used.extend(vs.iter().copied());
                    members.push(t.clone());
                }
            }
            Ok(DisjointFamily { members })
        }
        FamilyMode::ExactH2 => {
            if sols.iter().any(|t| t.values().len() != 2) {
                return Err(Error::Mode {
                    mode: "exact_h2",
                    requirement: "solutions of length 2",
                });
            }
            exact_family_h2(&sols)
        }
    }
}

/// Maximum independent set in the value-sharing conflict graph. For length-2
/// solutions every value appears in at most two solutions, so components are
/// paths or cycles and the DP is linear.
fn exact_family_h2(sols: &[&SolutionTuple]) -> Result<DisjointFamily> {
    let n = sols.len();
    let mut by_value: std::collections::HashMap<u64, Vec<usize>> = std::collections::HashMap::new();
    for (i, t) in sols.iter().enumerate() {
        for v in t.value_set() {
            by_value.entry(v).or_default().push(i);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for ids in by_value.values() {
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                if !adj[i].contains(&j) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
    }
    let mut chosen: Vec<usize> = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // collect the component
        let mut comp = vec![start];
        seen[start] = true;
        let mut qi = 0;
        while qi < comp.len() {
            let u = comp[qi];
            qi += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                }
            }
        }
        chosen.extend(component_mis(&comp, &adj)?);
    }
    chosen.sort_unstable();
    Ok(DisjointFamily {
        members: chosen.into_iter().map(|i| sols[i].clone()).collect(),
    })
}

fn component_mis(comp: &[usize], adj: &[Vec<usize>]) -> Result<Vec<usize>> {
    if comp.len() == 1 {
        return Ok(vec![comp[0]]);
    }
    if comp.iter().any(|&u| adj[u].len() > 2) {
        // Cannot happen for length-2 solutions; fail loudly rather than
        // silently approximate.
        return Err(Error::domain("conflict graph degree exceeds 2"));
    }
    let endpoints: Vec<usize> = comp
        .iter()
        .copied()
        .filter(|&u| adj[u].len() <= 1)
        .collect();
    if let Some(&start) = endpoints.iter().min() {
        // path component
        let order = walk_path(start, comp.len(), adj);
        Ok(path_mis(&order, None))
    } else {
        // cycle component: either drop the smallest node, or force it in and
        // drop its two neighbors
        let start = *comp.iter().min().unwrap();
        let order = walk_path(start, comp.len(), adj);
        let without = path_mis(&order[1..], None);
        let mut with = vec![start];
        if order.len() > 3 {
            with.extend(path_mis(&order[2..order.len() - 1], None));
        }
        Ok(if with.len() >= without.len() {
            with
        } else {
            without
        })
    }
}

fn walk_path(start: usize, len: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < len {
        let next = adj[cur].iter().copied().find(|&v| v != prev);
        match next {
            Some(v) => {
                order.push(v);
                prev = cur;
                cur = v;
            }
            None => break,
        }
    }
    order
}

fn path_mis(order: &[usize], _tie: Option<()>) -> Vec<usize> {
    if order.is_empty() {
        return Vec::new();
    }
    let n = order.len();
    // dp[i] = (best size using order[i..], take_i)
    let mut take = vec![false; n];
    let mut best = vec![0usize; n + 2];
    for i in (0..n).rev() {
        let skip = best[i + 1];
        let with = 1 + best[i + 2];
        if with >= skip {
            best[i] = with;
            take[i] = true;
        } else {
            best[i] = skip;
        }
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if take[i] {
            out.push(order[i]);
            i += 2;
        } else {
            i += 1;
        }
    }
    out
}

/// Number of solutions with `k_j <= caps[j]` for all `j`. Satisfies
/// `count <= l * max(b) * prod(caps_j + 1) / n` for `n >= 1`.
pub fn dyadic_box_count(eq: &Equation, n: u64, caps: &[u64]) -> Result<u64> {
    dyadic_box_count_with_budget(eq, n, caps, DEFAULT_ENUM_BUDGET)
}

pub fn dyadic_box_count_with_budget(
    eq: &Equation,
    n: u64,
    caps: &[u64],
    budget: u64,
) -> Result<u64> {
    if caps.len() != eq.len() {
        return Err(Error::domain("caps length must match equation"));
    }
    if caps.iter().any(|&p| p < 1) {
        return Err(Error::domain("caps must be >= 1"));
    }
    let mut est: u128 = eq.len() as u128;
    for (&b, &p) in eq.coeffs()[..eq.len() - 1].iter().zip(caps) {
        est = est.saturating_mul(((n / b).min(p) + 1) as u128);
    }
    if est > budget as u128 {
        return Err(Error::BudgetExceeded {
            estimate: est,
            budget,
        });
    }
    let mut ctx = EnumCtx::new(eq, None, budget);
    let mut count = 0u64;
    boxed_count_rec(&mut ctx, 0, n, caps, &mut count)?;
    Ok(count)
}

fn boxed_count_rec(
    ctx: &mut EnumCtx,
    depth: usize,
    rem: u64,
    caps: &[u64],
    count: &mut u64,
) -> Result<()> {
    let l = ctx.coeffs.len();
    if !rem.is_multiple_of(ctx.suffix_gcd[depth]) {
        return Ok(());
    }
    if depth == l - 1 {
        ctx.visit()?;
        let b = ctx.coeffs[depth];
        if rem.is_multiple_of(b) && rem / b <= caps[depth] {
            *count += 1;
        }
        return Ok(());
    }
    let b = ctx.coeffs[depth];
    for k in 0..=(rem / b).min(caps[depth]) {
        ctx.visit()?;
        boxed_count_rec(ctx, depth + 1, rem - b * k, caps, count)?;
    }
    Ok(())
}

/// `r*`: the maximum filtered solution count over all coefficient
/// sub-tuples of the given length.
pub fn r_star(set: &SampledSet, eq: &Equation, sub_len: usize, n: u64) -> Result<u64> {
    if !(2..=eq.len()).contains(&sub_len) {
        return Err(Error::domain(format!(
            "sub_len {sub_len} outside [2, {}]",
            eq.len()
        )));
    }
    let mut best = 0u64;
    for positions in combinations(eq.len(), sub_len) {
        let sub = eq.subset(&positions)?;
        let count = enumerate_solutions(&sub, n, Some(set))?.len() as u64;
        best = best.max(count);
    }
    Ok(best)
}

/// All `k`-element position subsets of `{0, ..., n-1}` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
