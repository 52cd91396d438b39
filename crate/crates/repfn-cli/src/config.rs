//! Flat key=value experiment config files with section headers, their
//! canonical serialization, and the content digest used by run manifests.

use repfn::asymptotics::zero_density_measure;
use repfn::experiments::ExperimentConfig;
use repfn::model::{Equation, GrowthSpec, MeasureSpec, Phi};

use crate::CliError;

/// Parsed form of a config file; `eps` switches the measure to the
/// zero-density construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RawConfig {
    pub coeffs: Vec<u64>,
    pub h: u32,
    pub kappa: f64,
    pub phi: String,
    pub c: Option<f64>,
    pub eps: Option<f64>,
    pub n_max: u64,
    pub trials: u64,
    pub seed: u64,
    pub delta: Option<f64>,
    pub checkpoints: Vec<u64>,
}

pub fn parse_phi(name: &str) -> Result<Phi, CliError> {
    match name {
        "const" | "constant" | "1" => Ok(Phi::One),
        "log" => Ok(Phi::Log),
        "exp-sqrt-log" => Ok(Phi::ExpSqrtLog),
        "plain-log" => Ok(Phi::PlainLog),
        other => Err(CliError::config(format!("unknown phi kind `{other}`"))),
    }
}

pub fn parse_coeffs(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| CliError::config(format!("bad coefficient `{s}`")))
        })
        .collect()
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut section = String::new();
        let mut get = std::collections::BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {}: expected key = value", lineno + 1))
            })?;
            get.insert(
                format!("{section}.{}", key.trim()),
                value.trim().to_string(),
            );
        }
        let fetch = |key: &str| -> Result<String, CliError> {
            get.get(key)
                .cloned()
                .ok_or_else(|| CliError::config(format!("missing config key `{key}`")))
        };
        let parse_u64 = |key: &str| -> Result<u64, CliError> {
            fetch(key)?
                .parse()
                .map_err(|_| CliError::config(format!("bad integer for `{key}`")))
        };
        let parse_f64_opt = |key: &str| -> Result<Option<f64>, CliError> {
            match get.get(key) {
                None => Ok(None),
                Some(v) => v
                    .parse()
                    .map(Some)
                    .map_err(|_| CliError::config(format!("bad number for `{key}`"))),
            }
        };
        let coeffs = parse_coeffs(&fetch("equation.coeffs")?)?;
        let checkpoints = match get.get("run.checkpoints") {
            None => Vec::new(),
            Some(v) if v.is_empty() => Vec::new(),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| CliError::config(format!("bad checkpoint `{s}`")))
                })
                .collect::<Result<_, _>>()?,
        };
        Ok(RawConfig {
            coeffs,
            h: parse_u64("measure.h")? as u32,
            kappa: parse_f64_opt("measure.kappa")?.unwrap_or(0.0),
            phi: get
                .get("measure.phi")
                .cloned()
                .unwrap_or_else(|| "const".to_string()),
            c: parse_f64_opt("measure.c")?,
            eps: parse_f64_opt("measure.eps")?,
            n_max: parse_u64("run.n_max")?,
            trials: parse_u64("run.trials")?,
            seed: parse_u64("run.seed")?,
            delta: parse_f64_opt("run.delta")?,
            checkpoints,
        })
    }

    /// Canonical text form: fixed section and key order, one space around
    /// `=`, '\n' line endings. Digests are taken over these bytes.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        out.push_str("[equation]\n");
        out.push_str(&format!(
            "coeffs = {}\n",
            self.coeffs
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
        out.push_str("\n[measure]\n");
        out.push_str(&format!("h = {}\n", self.h));
        out.push_str(&format!("kappa = {}\n", self.kappa));
        out.push_str(&format!("phi = {}\n", self.phi));
        if let Some(c) = self.c {
            out.push_str(&format!("c = {c}\n"));
        }
        if let Some(eps) = self.eps {
            out.push_str(&format!("eps = {eps}\n"));
        }
        out.push_str("\n[run]\n");
        out.push_str(&format!("n_max = {}\n", self.n_max));
        out.push_str(&format!("trials = {}\n", self.trials));
        out.push_str(&format!("seed = {}\n", self.seed));
        if let Some(d) = self.delta {
            out.push_str(&format!("delta = {d}\n"));
        }
        if !self.checkpoints.is_empty() {
            out.push_str(&format!(
                "checkpoints = {}\n",
                self.checkpoints
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
        }
        out
    }

    pub fn digest(&self) -> String {
        fnv1a64(self.canonical().as_bytes())
    }

    /// Build the library-level experiment config. Default checkpoints are 20
    /// log-spaced targets in `[N/10, N]`.
    pub fn to_experiment(&self) -> Result<ExperimentConfig, CliError> {
        let eq = Equation::new(self.coeffs.clone())?;
        let measure = match self.eps {
            Some(eps) => zero_density_measure(eps, self.h, &eq)?,
            None => {
                let c = self
                    .c
                    .ok_or_else(|| CliError::config("missing measure.c (or measure.eps)"))?;
                MeasureSpec::new(
                    GrowthSpec::new(self.h, self.kappa, parse_phi(&self.phi)?)?,
                    c,
                )?
            }
        };
        let checkpoints = if self.checkpoints.is_empty() {
            default_checkpoints(self.n_max)
        } else {
            self.checkpoints.clone()
        };
        let cfg = ExperimentConfig {
            measure,
            eq,
            n_max: self.n_max,
            trials: self.trials,
            master_seed: self.seed,
            delta: self.delta,
            checkpoints,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// 20 log-spaced checkpoints in [max(2, min(100, N/2)), N], deduplicated.
pub fn low_checkpoints(n_max: u64) -> Vec<u64> {
    let lo = (n_max / 2).clamp(2, 100) as f64;
    let hi = n_max as f64;
    let mut out = Vec::new();
    for i in 0..20 {
        let x = (lo * (hi / lo).powf(i as f64 / 19.0)).round() as u64;
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    out
}

/// 20 log-spaced checkpoints in [max(N/10, 2), N], deduplicated.
pub fn default_checkpoints(n_max: u64) -> Vec<u64> {
    let lo = (n_max / 10).max(2) as f64;
    let hi = n_max as f64;
    let mut out = Vec::new();
    for i in 0..20 {
        let x = (lo * (hi / lo).powf(i as f64 / 19.0)).round() as u64;
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    out
}

pub fn fnv1a64(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x1_0000_01b3);
    }
    format!("{hash:016x}")
}
