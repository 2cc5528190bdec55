//! The five pipeline commands and their on-disk layouts.
//!
//! A simulation directory holds `scenario.toml` plus, per replicate `r`,
//! `data_r{r:03}.csv`, `truth_r{r:03}_omega.csv`, `truth_r{r:03}_edges.csv` and
//! `truth_r{r:03}_psi.csv`. A fit directory holds `edges.csv`, `psi.csv`,
//! `fit.json` and, for node-wise methods, `beta_all.csv` and `gamma_all.csv`
//! (row `a` is the regression of node `a`). Fitting a simulation directory
//! writes one fit directory per replicate under `r{r:03}/`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use subho_core::data_io::{read_edge_list, read_matrix_csv, write_dataset_csv, write_edge_list, write_matrix_csv};
use subho_core::graph::{connectivity_scores, top_k};
use subho_core::metrics::{aggregate, AggregateMetrics, ReplicateMetrics};
use subho_core::simgen::{generate_replicate, Scenario};
use subho_core::{fit_graph, load_csv, standardize, FitOutput, GraphEstimate, Method, PartialCorrEstimate, Rule};

use crate::config::{scenario_file, ConfigFile};

pub const SCENARIO_FILE: &str = "scenario.toml";

pub fn data_file(r: usize) -> String {
    format!("data_r{r:03}.csv")
}

pub fn truth_file(r: usize, what: &str) -> String {
    format!("truth_r{r:03}_{what}.csv")
}

pub fn replicate_dir(r: usize) -> String {
    format!("r{r:03}")
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create directory {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Reads the scenario stored in a simulation directory.
pub fn read_scenario(sim_dir: &Path) -> Result<Scenario> {
    ConfigFile::load(&sim_dir.join(SCENARIO_FILE))?
        .or(&ConfigFile::defaults())
        .scenario()
}

/// Writes every replicate of `scenario` and its truth sidecars into `out`.
pub fn simulate(scenario: &Scenario, out: &Path) -> Result<()> {
    scenario.validate()?;
    create_dir(out)?;
    write_text(&out.join(SCENARIO_FILE), &scenario_file(scenario).to_toml()?)?;
    for r in 0..scenario.replicates {
        let (truth, data) = generate_replicate(scenario, r).with_context(|| format!("replicate {r}"))?;
        let names = data.column_names();
        write_dataset_csv(out.join(data_file(r)), &data)?;
        write_matrix_csv(out.join(truth_file(r, "omega")), names, &truth.omega)?;
        write_edge_list(out.join(truth_file(r, "edges")), names, truth.graph.edges())?;
        write_matrix_csv(out.join(truth_file(r, "psi")), names, truth.psi.matrix())?;
    }
    Ok(())
}

/// Resolved fit settings.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub method_name: String,
    pub method: Method,
    pub rule: Rule,
    pub seed: u64,
    pub workers: usize,
    pub iters: usize,
    pub burnin: usize,
    pub max_model_size: Option<usize>,
}

impl FitOptions {
    pub fn from_config(c: &ConfigFile) -> Result<Self> {
        Ok(Self {
            method_name: c.method_name().to_ascii_lowercase(),
            method: c.method()?,
            rule: c.rule()?,
            seed: c.seed(),
            workers: c.workers()?,
            iters: c.iters.unwrap_or(2000),
            burnin: c.burnin.unwrap_or(500),
            max_model_size: c.max_model_size,
        })
    }

    fn rule_label(&self) -> String {
        match self.method {
            Method::InverseWishart(_) => "none".into(),
            Method::Nodewise(_) => self.rule.to_string(),
        }
    }
}

/// Settings and sizes recorded next to a fit. No timings, so repeated runs
/// produce identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub method: String,
    pub rule: String,
    pub seed: u64,
    pub iters: usize,
    pub burnin: usize,
    pub max_model_size: Option<usize>,
    pub n: usize,
    pub p: usize,
    pub edges: usize,
}

/// Fits one CSV dataset and writes a fit directory.
pub fn fit_file(input: &Path, out: &Path, opts: &FitOptions) -> Result<FitOutput> {
    let raw = load_csv(input)?;
    let data = standardize(&raw)?;
    let fit = fit_graph(&data, &opts.method, opts.rule, opts.seed, opts.workers)?;
    create_dir(out)?;
    let names = data.column_names();
    write_edge_list(out.join("edges.csv"), names, fit.graph.edges())?;
    write_matrix_csv(out.join("psi.csv"), names, fit.psi.matrix())?;
    if let Some(c) = &fit.collection {
        write_matrix_csv(out.join("beta_all.csv"), names, c.beta_all())?;
        let gamma = c.gamma_all().map(|g| if g { 1.0 } else { 0.0 });
        write_matrix_csv(out.join("gamma_all.csv"), names, &gamma)?;
    }
    let record = FitRecord {
        method: opts.method_name.clone(),
        rule: opts.rule_label(),
        seed: opts.seed,
        iters: opts.iters,
        burnin: opts.burnin,
        max_model_size: opts.max_model_size,
        n: data.n(),
        p: data.p(),
        edges: fit.graph.edge_count(),
    };
    write_text(&out.join("fit.json"), &(serde_json::to_string_pretty(&record)? + "\n"))?;
    Ok(fit)
}

/// Fits a CSV file, or every replicate of a simulation directory.
pub fn fit(input: &Path, out: &Path, opts: &FitOptions) -> Result<()> {
    if input.is_dir() {
        let scenario = read_scenario(input)?;
        for r in 0..scenario.replicates {
            fit_file(&input.join(data_file(r)), &out.join(replicate_dir(r)), opts)
                .with_context(|| format!("replicate {r}"))?;
        }
        Ok(())
    } else {
        fit_file(input, out, opts).map(|_| ())
    }
}

fn read_psi(path: &Path) -> Result<(Vec<String>, PartialCorrEstimate)> {
    let (names, m) = read_matrix_csv(path)?;
    let psi = PartialCorrEstimate::new(m).with_context(|| format!("invalid partial correlations in {}", path.display()))?;
    Ok((names, psi))
}

fn read_graph(path: &Path, names: &[String]) -> Result<GraphEstimate> {
    Ok(GraphEstimate::from_edges(names.len(), read_edge_list(path, names)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub scenario: String,
    pub method: String,
    pub rule: String,
    pub replicate: usize,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fdr: f64,
    pub tpr: f64,
    pub mse_zero: f64,
    pub mse_nonzero: f64,
    pub mse_total: f64,
}

/// Scores every replicate fit in `fits_dir` against the truths in `sim_dir`.
/// Writes `metrics_r{r:03}.json` per replicate and `metrics_summary.csv`.
pub fn evaluate(sim_dir: &Path, fits_dir: &Path, out: &Path) -> Result<AggregateMetrics> {
    let scenario = read_scenario(sim_dir)?;
    let needed = |r: usize| -> Vec<PathBuf> {
        let fit = fits_dir.join(replicate_dir(r));
        vec![
            sim_dir.join(truth_file(r, "edges")),
            sim_dir.join(truth_file(r, "psi")),
            fit.join("edges.csv"),
            fit.join("psi.csv"),
        ]
    };
    let missing: Vec<String> = (0..scenario.replicates)
        .filter_map(|r| {
            let absent: Vec<String> = needed(r)
                .into_iter()
                .filter(|p| !p.is_file())
                .map(|p| p.display().to_string())
                .collect();
            (!absent.is_empty()).then(|| format!("replicate {r} ({})", absent.join(", ")))
        })
        .collect();
    if !missing.is_empty() {
        bail!("missing replicates: {}", missing.join("; "));
    }

    create_dir(out)?;
    let mut reps = Vec::with_capacity(scenario.replicates);
    let (mut method, mut rule) = (String::from("unknown"), String::from("unknown"));
    for r in 0..scenario.replicates {
        let fit_dir = fits_dir.join(replicate_dir(r));
        let (names, truth_psi) = read_psi(&sim_dir.join(truth_file(r, "psi")))?;
        let truth_graph = read_graph(&sim_dir.join(truth_file(r, "edges")), &names)?;
        let (fit_names, psi) = read_psi(&fit_dir.join("psi.csv"))?;
        if fit_names != names {
            bail!("replicate {r}: fitted columns do not match the truth columns");
        }
        let graph = read_graph(&fit_dir.join("edges.csv"), &names)?;
        let m = ReplicateMetrics::evaluate(&graph, &psi, &truth_graph, &truth_psi)?;
        if let Ok(text) = fs::read_to_string(fit_dir.join("fit.json")) {
            let rec: FitRecord = serde_json::from_str(&text)
                .with_context(|| format!("invalid {}", fit_dir.join("fit.json").display()))?;
            method = rec.method;
            rule = rec.rule;
        }
        let record = MetricsRecord {
            scenario: scenario.name.clone(),
            method: method.clone(),
            rule: rule.clone(),
            replicate: r,
            tp: m.counts.tp,
            fp: m.counts.fp,
            tn: m.counts.tn,
            fn_: m.counts.fn_,
            fdr: m.fdr,
            tpr: m.tpr,
            mse_zero: m.mse.zero,
            mse_nonzero: m.mse.nonzero,
            mse_total: m.mse.total,
        };
        write_text(
            &out.join(format!("metrics_r{r:03}.json")),
            &(serde_json::to_string_pretty(&record)? + "\n"),
        )?;
        reps.push(m);
    }
    let agg = aggregate(&reps);
    let path = out.join("metrics_summary.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record([
        "scenario", "method", "rule", "replicates", "fdr", "tpr", "mse_zero", "mse_nonzero", "mse_total", "discoveries",
    ])?;
    w.write_record([
        scenario.name.clone(),
        method,
        rule,
        agg.replicates.to_string(),
        agg.fdr.to_string(),
        agg.tpr.to_string(),
        agg.mse_zero.to_string(),
        agg.mse_nonzero.to_string(),
        agg.mse_total.to_string(),
        agg.discoveries.to_string(),
    ])?;
    w.flush()?;
    Ok(agg)
}

/// Writes `top_{k}.csv` (rank, node, degree, psi_sum) for each `k`, read
/// from the `edges.csv` and `psi.csv` in `fit_dir`.
pub fn rank(fit_dir: &Path, ks: &[usize], out: &Path) -> Result<()> {
    let (names, psi) = read_psi(&fit_dir.join("psi.csv"))?;
    let graph = read_graph(&fit_dir.join("edges.csv"), &names)?;
    let scores = connectivity_scores(&graph, &psi)?;
    create_dir(out)?;
    for &k in ks {
        let path = out.join(format!("top_{k}.csv"));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(["rank", "node", "degree", "psi_sum"])?;
        for (i, a) in top_k(&scores, k.min(names.len())).into_iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                names[a].clone(),
                scores.degree[a].to_string(),
                scores.psi_sum[a].to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: String,
    pub scenario: String,
    pub n: usize,
    pub p: usize,
    pub replicates: usize,
    pub mean_seconds: f64,
    pub mean_minutes: f64,
}

/// Times every method on every replicate of every scenario and writes
/// `bench.csv` with one row per (method, scenario).
pub fn bench(scenarios: &[Scenario], methods: &[FitOptions], out: &Path) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for s in scenarios {
        let datasets = (0..s.replicates)
            .map(|r| {
                let (_, raw) = generate_replicate(s, r)?;
                Ok(standardize(&raw)?)
            })
            .collect::<Result<Vec<_>>>()?;
        for m in methods {
            let mut total = 0.0;
            for data in &datasets {
                let start = Instant::now();
                fit_graph(data, &m.method, m.rule, m.seed, m.workers)?;
                total += start.elapsed().as_secs_f64();
            }
            let mean = total / datasets.len() as f64;
            rows.push(BenchRow {
                method: m.method_name.clone(),
                scenario: s.name.clone(),
                n: s.n,
                p: s.p,
                replicates: s.replicates,
                mean_seconds: mean,
                mean_minutes: mean / 60.0,
            });
        }
    }
    create_dir(out)?;
    let path = out.join("bench.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows)
}
