//! Batch runs over an instance list and a configuration matrix.
//!
//! ```toml
//! [[instance]]
//! name = "four-shift"
//! preset = 4          # or: file = "data/x.inst", or a [instance.generate] table
//! seed = 1
//!
//! [[config]]
//! name = "p2-vns"
//! pricing = "p2"
//! generator = "vns"
//! seeds = [1, 2, 3]
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::driver::{solve, ColGenConfig};
use crate::instance::{generate_instance, GeneratorConfig, Instance, Km};
use crate::io::parse_instance;

#[derive(Clone, Debug, Deserialize)]
pub struct BenchMatrix {
    #[serde(default)]
    pub instance: Vec<BenchInstance>,
    pub config: Vec<BenchConfig>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BenchInstance {
    pub name: String,
    pub file: Option<PathBuf>,
    pub preset: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub generate: Option<GeneratorConfig>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct BenchConfig {
    pub name: String,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(flatten)]
    pub solver: ColGenConfig,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("matrix: {0}")]
    Matrix(#[from] toml::de::Error),
    #[error("instance {name}: {message}")]
    Instance { name: String, message: String },
}

impl BenchMatrix {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        Ok(toml::from_str(text)?)
    }

    /// Loads or generates every instance; relative files resolve against `base`.
    pub fn instances(&self, base: &Path) -> Result<Vec<(String, Instance)>, BenchError> {
        self.instance
            .iter()
            .map(|b| {
                let fail = |message: String| BenchError::Instance { name: b.name.clone(), message };
                let inst = if let Some(f) = &b.file {
                    let text = std::fs::read_to_string(base.join(f)).map_err(|e| fail(e.to_string()))?;
                    parse_instance(&text).map_err(|e| fail(e.to_string()))?
                } else {
                    let cfg = match (&b.generate, b.preset) {
                        (Some(g), _) => g.clone(),
                        (None, Some(p)) => GeneratorConfig::preset(p, b.seed).map_err(|e| fail(e.to_string()))?,
                        (None, None) => return Err(fail("needs file, preset or generate".into())),
                    };
                    generate_instance(&cfg).map_err(|e| fail(e.to_string()))?
                };
                Ok((b.name.clone(), inst))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub config: String,
    pub seed: u64,
    pub status: String,
    pub objective: Option<Km>,
    pub lp_bound: Option<f64>,
    pub columns: usize,
    pub iterations: usize,
    pub cuts: usize,
    pub secs: f64,
}

pub fn run_bench(instances: &[(String, Instance)], configs: &[BenchConfig], progress: &mut dyn FnMut(&BenchRow)) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for (iname, inst) in instances {
        for c in configs {
            for &seed in &c.seeds {
                let cfg = ColGenConfig { seed, ..c.solver.clone() };
                let t0 = Instant::now();
                let res = solve(inst, &cfg);
                let secs = t0.elapsed().as_secs_f64();
                let row = match res {
                    Ok(out) => BenchRow {
                        instance: iname.clone(),
                        config: c.name.clone(),
                        seed,
                        status: format!("{:?}", out.status).to_lowercase(),
                        objective: Some(out.schedule.objective),
                        lp_bound: out.stats.lp_bound,
                        columns: out.stats.columns_generated,
                        iterations: out.stats.iterations.len(),
                        cuts: out.stats.cuts,
                        secs,
                    },
                    Err(e) => BenchRow {
                        instance: iname.clone(),
                        config: c.name.clone(),
                        seed,
                        status: format!("error: {e}"),
                        objective: None,
                        lp_bound: None,
                        columns: 0,
                        iterations: 0,
                        cuts: 0,
                        secs,
                    },
                };
                progress(&row);
                rows.push(row);
            }
        }
    }
    rows
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("instance,config,seed,status,objective,lp_bound,columns,iterations,cuts,secs\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{:.3}",
            r.instance,
            r.config,
            r.seed,
            r.status.replace(',', ";"),
            opt(r.objective),
            opt(r.lp_bound.map(|b| format!("{b:.2}"))),
            r.columns,
            r.iterations,
            r.cuts,
            r.secs
        );
    }
    s
}

/// Means per instance and configuration over the successful runs.
pub fn summary_table(rows: &[BenchRow]) -> String {
    let mut keys: Vec<(&str, &str)> = rows.iter().map(|r| (r.instance.as_str(), r.config.as_str())).collect();
    keys.dedup();
    let mut s = format!("{:<16} {:<16} {:>4} {:>10} {:>8} {:>9}\n", "instance", "config", "runs", "objective", "columns", "secs");
    for (i, c) in keys {
        let ok: Vec<&BenchRow> =
            rows.iter().filter(|r| r.instance == i && r.config == c && r.objective.is_some()).collect();
        let total = rows.iter().filter(|r| r.instance == i && r.config == c).count();
        let mean = |f: &dyn Fn(&BenchRow) -> f64| {
            if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
            }
        };
        let _ = writeln!(
            s,
            "{:<16} {:<16} {:>4} {:>10.1} {:>8.1} {:>9.3}",
            i,
            c,
            format!("{}/{}", ok.len(), total),
            mean(&|r| r.objective.unwrap() as f64),
            mean(&|r| r.columns as f64),
            mean(&|r| r.secs)
        );
    }
    s
}
