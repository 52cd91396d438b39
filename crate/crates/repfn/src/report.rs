//! Deterministic CSV and JSON rendering.
//!
//! CSV uses '.' decimals, '\n' line endings, and a header row naming every
//! column; commented `#` lines carry the equation / measure / kind context.
//! Identical reports render to identical bytes.

use crate::counting::{CountProfile, ExpectationProfile};
use crate::experiments::{ConcentrationReport, StohrReport, ZeroDensityReport};
use crate::model::MeasureSpec;
use crate::sampler::CountingLawReport;

/// Shortest round-trip decimal form; stable across runs and platforms.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Canonical one-line measure description used in CSV headers.
pub fn measure_label(m: &MeasureSpec) -> String {
    let g = m.growth();
    format!(
        "h={};kappa={};phi={};c={}",
        g.h(),
        fmt_f64(g.kappa()),
        g.phi().name(),
        fmt_f64(m.c())
    )
}

pub fn count_profile_csv(p: &CountProfile) -> String {
    let mut out = format!("# eq={} kind=count\n", p.eq());
    out.push_str("n,value\n");
    for (n, c) in p.counts().iter().enumerate() {
        out.push_str(&format!("{n},{c}\n"));
    }
    out
}

pub fn expectation_profile_csv(p: &ExpectationProfile) -> String {
    let mut out = format!(
        "# eq={} kind={} measure={}\n",
        p.eq(),
        p.kind(),
        measure_label(p.measure())
    );
    out.push_str("n,value\n");
    for (n, v) in p.values().iter().enumerate() {
        out.push_str(&format!("{n},{}\n", fmt_f64(*v)));
    }
    out
}

pub fn concentration_csv(r: &ConcentrationReport) -> String {
    let mut out = String::from(
        "n,empirical_mean,empirical_sd,exact_expectation,closed_form,max_rel_dev,flagged,sandwich_ok,decomposition_ok\n",
    );
    for row in &r.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.n,
            fmt_f64(row.empirical_mean),
            fmt_f64(row.empirical_sd),
            fmt_f64(row.exact_expectation),
            fmt_opt(row.closed_form),
            fmt_f64(row.max_rel_dev),
            row.flagged,
            row.sandwich_ok,
            row.decomposition_ok
        ));
    }
    out
}

pub fn zero_windows_csv(r: &ZeroDensityReport) -> String {
    let mut out = String::from("j,window_lo,window_hi,trials_with_zero,trials,mean_zero_count\n");
    for w in &r.windows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            w.j,
            w.lo,
            w.hi,
            w.trials_with_zero,
            r.trials,
            fmt_f64(w.mean_zero_count)
        ));
    }
    out
}

pub fn zero_checkpoints_csv(r: &ZeroDensityReport) -> String {
    let mut out = String::from(
        "n,empirical_pr_zero,product_lower_bound,empirical_mean_r,exact_expectation,target\n",
    );
    for row in &r.checkpoints {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.n,
            fmt_f64(row.empirical_pr_zero),
            fmt_opt(row.product_lower_bound),
            fmt_f64(row.empirical_mean_r),
            fmt_f64(row.exact_expectation),
            fmt_f64(row.target)
        ));
    }
    out
}

pub fn stohr_csv(r: &StohrReport) -> String {
    let mut out = String::from("k,n_k,pair_count,lower_bound,ok\n");
    for row in &r.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.k, row.n_k, row.pair_count, row.lower_bound, row.ok
        ));
    }
    out
}

pub fn counting_law_csv(r: &CountingLawReport) -> String {
    let mut out = String::from("x,empirical_mean,law,ratio\n");
    for row in &r.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.x,
            fmt_f64(row.empirical_mean),
            fmt_f64(row.law),
            fmt_f64(row.ratio)
        ));
    }
    out
}

pub fn regularity_csv(r: &crate::model::RegularityReport) -> String {
    let mut out = String::from("x,ratio\n");
    for row in &r.rows {
        out.push_str(&format!("{},{}\n", fmt_f64(row.x), fmt_f64(row.ratio)));
    }
    out
}
