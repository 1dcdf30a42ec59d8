//! CSV and JSON artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use dyngt::EnsembleResult;
use serde::Serialize;

pub const CURVES_HEADER: &str = "t,mean_alpha,mean_lambda,mean_gamma,approx_alpha,se_alpha";

/// Time points at which summaries report standard errors.
pub const SE_CHECKPOINTS: [usize; 5] = [0, 10, 50, 100, 500];

pub const CENSORING_NOTE: &str =
    "paths with infected individuals left at the horizon are excluded from \
     mean_control_time and mean_total_isolated; they are counted in uncontrolled_paths and their \
     isolated count at the horizon is reported as mean_gamma_uncontrolled";

/// Formats `x` with 6 significant digits the way C's `%g` does.
pub fn sig6(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn curves_csv(e: &EnsembleResult) -> String {
    let mut out = String::with_capacity(64 * (e.horizon + 2));
    out.push_str(CURVES_HEADER);
    out.push('\n');
    for t in 0..=e.horizon {
        let _ = writeln!(
            out,
            "{t},{},{},{},{},{}",
            sig6(e.mean_alpha[t]),
            sig6(e.mean_lambda[t]),
            sig6(e.mean_gamma[t]),
            sig6(e.mean_approx_alpha[t]),
            sig6(e.se_alpha[t]),
        );
    }
    out
}

#[derive(Debug, Serialize)]
pub struct Checkpoint {
    pub t: usize,
    pub mean_alpha: f64,
    pub se_alpha: f64,
    pub mean_lambda: f64,
    pub se_lambda: f64,
    pub mean_gamma: f64,
    pub se_gamma: f64,
}

pub fn checkpoints(e: &EnsembleResult) -> Vec<Checkpoint> {
    let mut ts: Vec<usize> = SE_CHECKPOINTS
        .iter()
        .copied()
        .filter(|&t| t <= e.horizon)
        .collect();
    if ts.last() != Some(&e.horizon) {
        ts.push(e.horizon);
    }
    ts.into_iter()
        .map(|t| Checkpoint {
            t,
            mean_alpha: e.mean_alpha[t],
            se_alpha: e.se_alpha[t],
            mean_lambda: e.mean_lambda[t],
            se_lambda: e.se_lambda[t],
            mean_gamma: e.mean_gamma[t],
            se_gamma: e.se_gamma[t],
        })
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Files written by one command. Unless [`OutputSet::commit`] is called,
/// dropping the set deletes everything it wrote.
pub struct OutputSet {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            committed: false,
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn names(&self) -> Vec<String> {
        self.written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}
