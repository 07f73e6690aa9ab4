//! Reproducible experiment drivers: the order sweep over SBM replicates,
//! the DMPA homophily grid, the paired edge-addition intervention, and the
//! temporal snapshot analysis. Every driver takes a master seed and derives
//! per-item seeds with [`derive_seed`], so results are keyed by item index
//! and identical on every re-run.
//!
//! Drivers return plain result structs; the CSV renderers in this module
//! produce the byte-stable files the CLI writes (floats use the shortest
//! round-trip formatting, `None` renders as an empty field).

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::assortativity::{self, pearson_r};
use crate::dist::{build_jdam, NormalizedJdam};
use crate::error::Error;
use crate::generators::{generate_dmpa, generate_sbm, project_undirected, DmpaConfig, SbmConfig};
use crate::graph::AttributedMultigraph;
use crate::io;
use crate::measures::{self, RenyiOrder};
use crate::numeric::{derive_seed, kendall_tau_vs_index};
use crate::spsa::{apply_edges, optimize_full, EdgePmf, SpsaConfig, TraceRow};
use crate::Result;

/// One row of the order sweep.
#[derive(Clone, Copy, Debug)]
pub struct AlphaSweepRecord {
    pub alpha: f64,
    /// Pearson correlation of the measure with `|gamma_att|` across the
    /// replicate set.
    pub r: f64,
    pub n_replicates: usize,
    pub n_skipped_degenerate: usize,
}

#[derive(Clone, Debug)]
pub struct AlphaSweepResult {
    pub records: Vec<AlphaSweepRecord>,
}

impl AlphaSweepResult {
    /// The order with the highest correlation.
    pub fn peak_alpha(&self) -> Option<f64> {
        self.records
            .iter()
            .max_by(|a, b| a.r.total_cmp(&b.r))
            .map(|rec| rec.alpha)
    }
}

/// Sweep the Rényi order over one fixed set of connected SBM replicates.
///
/// The same graph set is reused for every order so the r-vs-alpha curve
/// varies only through the measure. Each replicate gets a random node
/// relabeling before measurement; the measures are label-invariant, so this
/// doubles as a pipeline self-check. Replicates with undefined attribute
/// assortativity are skipped and counted.
pub fn sweep_alpha(
    sbm: &SbmConfig,
    alphas: &[f64],
    replicates: usize,
    master_seed: u64,
) -> Result<AlphaSweepResult> {
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("alpha list is empty".into()));
    }
    for &a in alphas {
        RenyiOrder::new(a)?;
        if a > 4.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha {a} outside the supported range (0, 4]"
            )));
        }
    }
    if replicates < 30 {
        return Err(Error::InvalidConfig(
            "need at least 30 replicates for the sweep".into(),
        ));
    }

    let mut gamma_abs: Vec<f64> = Vec::with_capacity(replicates);
    let mut jdams: Vec<NormalizedJdam> = Vec::with_capacity(replicates);
    let mut skipped = 0usize;
    for i in 0..replicates {
        let cfg = SbmConfig {
            seed: derive_seed(master_seed, 2 * i as u64),
            ..*sbm
        };
        let g = generate_sbm(&cfg)?;
        let mut perm: Vec<u32> = (0..g.node_count() as u32).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(master_seed, 2 * i as u64 + 1));
        perm.shuffle(&mut rng);
        let g = g.relabeled(&perm)?;
        match assortativity::assortativity_report(&g)?.gamma_att {
            Some(gamma) => {
                gamma_abs.push(gamma.abs());
                jdams.push(NormalizedJdam::from_jdam(&build_jdam(&g)?)?);
            }
            None => skipped += 1,
        }
    }
    if gamma_abs.len() < 10 {
        return Err(Error::TooFewValidReplicates {
            valid: gamma_abs.len(),
        });
    }

    let mut records = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let alpha = RenyiOrder::new(a)?;
        let values: Vec<f64> = jdams
            .iter()
            .map(|nj| measures::attribute_conditional_mi(nj, alpha))
            .collect();
        let r = pearson_r(&values, &gamma_abs)?;
        records.push(AlphaSweepRecord {
            alpha: a,
            r,
            n_replicates: gamma_abs.len(),
            n_skipped_degenerate: skipped,
        });
    }
    Ok(AlphaSweepResult { records })
}

/// One grid point of the DMPA sweep.
#[derive(Clone, Copy, Debug)]
pub struct DmpaSweepRecord {
    pub p_f: f64,
    pub rho_att: f64,
    pub delta_i: f64,
    pub gamma_att: Option<f64>,
    pub gamma_deg: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct DmpaSweepResult {
    pub alpha: f64,
    pub records: Vec<DmpaSweepRecord>,
}

impl DmpaSweepResult {
    /// Pooled correlation of the measure with `|rho_att - 0.5|`.
    pub fn pooled_r(&self) -> Result<f64> {
        let x: Vec<f64> = self.records.iter().map(|r| r.delta_i).collect();
        let y: Vec<f64> = self
            .records
            .iter()
            .map(|r| (r.rho_att - 0.5).abs())
            .collect();
        pearson_r(&x, &y)
    }

    /// Mean of the measure over all grid points at one `rho_att` value.
    pub fn mean_delta_at_rho(&self, rho: f64) -> Option<f64> {
        let values: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.rho_att == rho)
            .map(|r| r.delta_i)
            .collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }
}

/// Generate one projected DMPA network per `(p_f, rho_att)` grid point and
/// measure it.
pub fn sweep_dmpa(
    p_f_list: &[f64],
    rho_list: &[f64],
    base: &DmpaConfig,
    alpha: RenyiOrder,
    master_seed: u64,
) -> Result<DmpaSweepResult> {
    if p_f_list.is_empty() || rho_list.is_empty() {
        return Err(Error::InvalidConfig("empty grid axis".into()));
    }
    let mut records = Vec::with_capacity(p_f_list.len() * rho_list.len());
    for (i, &p_f) in p_f_list.iter().enumerate() {
        for (j, &rho) in rho_list.iter().enumerate() {
            let index = (i * rho_list.len() + j) as u64;
            let cfg = DmpaConfig {
                p_f,
                rho_att: rho,
                seed: derive_seed(master_seed, index),
                ..*base
            };
            let g = project_undirected(&generate_dmpa(&cfg)?);
            let report = measures::measure_graph(&g, alpha)?;
            let gammas = assortativity::assortativity_report(&g)?;
            records.push(DmpaSweepRecord {
                p_f,
                rho_att: rho,
                delta_i: report.attribute_conditional_mi,
                gamma_att: gammas.gamma_att,
                gamma_deg: gammas.gamma_deg,
            });
        }
    }
    Ok(DmpaSweepResult {
        alpha: alpha.value(),
        records,
    })
}

/// Mean and standard error over trials.
#[derive(Clone, Copy, Debug)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

fn mean_se(values: &[f64]) -> Option<MeanSe> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let se = if values.len() < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    Some(MeanSe {
        mean,
        se,
        n: values.len(),
    })
}

/// Paired aggregates at one edge-count milestone.
#[derive(Clone, Copy, Debug)]
pub struct InterventionMilestone {
    pub edges_added: usize,
    pub gamma_att_optimized: Option<MeanSe>,
    pub gamma_att_uniform: Option<MeanSe>,
    pub gamma_deg_optimized: Option<MeanSe>,
    pub gamma_deg_uniform: Option<MeanSe>,
}

#[derive(Clone, Debug)]
pub struct InterventionResult {
    pub milestones: Vec<InterventionMilestone>,
    pub baseline_gamma_att: Option<f64>,
    pub baseline_gamma_deg: Option<f64>,
    pub trials: usize,
}

/// Run paired edge additions under two distributions from identical graph
/// copies and paired sub-seeds, and aggregate per milestone.
pub fn paired_edge_addition(
    g: &AttributedMultigraph,
    alpha: RenyiOrder,
    pmf_a: &EdgePmf,
    pmf_b: &EdgePmf,
    edge_counts: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<InterventionResult> {
    if trials < 10 {
        return Err(Error::InvalidConfig("need at least 10 trials".into()));
    }
    let baseline = assortativity::assortativity_report(g)?;
    let mut milestones = Vec::with_capacity(edge_counts.len());
    for &count in edge_counts {
        let mut att_a = Vec::new();
        let mut att_b = Vec::new();
        let mut deg_a = Vec::new();
        let mut deg_b = Vec::new();
        for trial in 0..trials {
            let seed = derive_seed(derive_seed(master_seed, trial as u64), count as u64);
            for (pmf, att, deg) in [(pmf_a, &mut att_a, &mut deg_a), (pmf_b, &mut att_b, &mut deg_b)]
            {
                if count == 0 {
                    if let Some(v) = baseline.gamma_att {
                        att.push(v);
                    }
                    if let Some(v) = baseline.gamma_deg {
                        deg.push(v);
                    }
                    continue;
                }
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let (_, trace) = apply_edges(g, pmf, count, alpha, &mut rng)?;
                let last = trace.last().expect("count > 0 yields a final row");
                debug_assert_eq!(last.edges_added, count);
                if let Some(v) = last.gamma_att {
                    att.push(v);
                }
                if let Some(v) = last.gamma_deg {
                    deg.push(v);
                }
            }
        }
        milestones.push(InterventionMilestone {
            edges_added: count,
            gamma_att_optimized: mean_se(&att_a),
            gamma_att_uniform: mean_se(&att_b),
            gamma_deg_optimized: mean_se(&deg_a),
            gamma_deg_uniform: mean_se(&deg_b),
        });
    }
    Ok(InterventionResult {
        milestones,
        baseline_gamma_att: baseline.gamma_att,
        baseline_gamma_deg: baseline.gamma_deg,
        trials,
    })
}

/// Train the logit model once (the configured direction; minimizing reduces
/// the measure) and compare edge addition under the tuned distribution
/// against the uniform baseline.
pub fn run_intervention(
    g: &AttributedMultigraph,
    alpha: RenyiOrder,
    spsa_cfg: &SpsaConfig,
    edge_counts: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<InterventionResult> {
    let run = optimize_full(g, alpha, spsa_cfg)?;
    paired_edge_addition(
        g,
        alpha,
        &EdgePmf::Table(run.pmf),
        &EdgePmf::Uniform,
        edge_counts,
        trials,
        master_seed,
    )
}

/// One snapshot's record in a temporal series.
#[derive(Clone, Debug)]
pub struct TemporalRecord {
    pub tag: String,
    pub delta_i: f64,
    pub gamma_att: Option<f64>,
    pub gamma_deg: Option<f64>,
    pub n_nodes: usize,
    pub n_edges: u64,
}

#[derive(Clone, Debug)]
pub struct TemporalResult {
    pub records: Vec<TemporalRecord>,
    /// Kendall tau of the measure against the snapshot index; `None` with
    /// fewer than two snapshots.
    pub kendall_tau: Option<f64>,
}

/// Measure every snapshot in a directory of `<tag>.edges`/`<tag>.attrs`
/// pairs, tags in lexicographic order.
pub fn temporal_analysis(dir: &Path, alpha: RenyiOrder) -> Result<TemporalResult> {
    let series = io::load_snapshot_series(dir)?;
    if series.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no snapshot pairs found in {}",
            dir.display()
        )));
    }
    let mut records = Vec::with_capacity(series.len());
    for snapshot in &series {
        let report = measures::measure_graph(&snapshot.graph, alpha)?;
        let gammas = assortativity::assortativity_report(&snapshot.graph)?;
        records.push(TemporalRecord {
            tag: snapshot.tag.clone(),
            delta_i: report.attribute_conditional_mi,
            gamma_att: gammas.gamma_att,
            gamma_deg: gammas.gamma_deg,
            n_nodes: snapshot.graph.node_count(),
            n_edges: snapshot.graph.total_multiplicity(),
        });
    }
    let series_values: Vec<f64> = records.iter().map(|r| r.delta_i).collect();
    Ok(TemporalResult {
        kendall_tau: kendall_tau_vs_index(&series_values),
        records,
    })
}

// --- CSV rendering -------------------------------------------------------

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn alpha_sweep_csv(result: &AlphaSweepResult) -> String {
    let mut out = String::from("alpha,r,n_replicates,n_skipped\n");
    for rec in &result.records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            rec.alpha, rec.r, rec.n_replicates, rec.n_skipped_degenerate
        ));
    }
    out
}

pub fn dmpa_sweep_csv(result: &DmpaSweepResult) -> String {
    let mut out = String::from("p_f,rho_att,delta_i,gamma_att,gamma_deg\n");
    for rec in &result.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            rec.p_f,
            rec.rho_att,
            rec.delta_i,
            opt(rec.gamma_att),
            opt(rec.gamma_deg)
        ));
    }
    out
}

/// Parse the DMPA sweep CSV back; used to verify that re-aggregating a
/// written file reproduces the summary statistics exactly.
pub fn parse_dmpa_sweep_csv(text: &str, alpha: f64) -> Result<DmpaSweepResult> {
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("bad number {s:?}"),
            })
        };
        let opt_num = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        records.push(DmpaSweepRecord {
            p_f: num(fields[0])?,
            rho_att: num(fields[1])?,
            delta_i: num(fields[2])?,
            gamma_att: opt_num(fields[3])?,
            gamma_deg: opt_num(fields[4])?,
        });
    }
    Ok(DmpaSweepResult { alpha, records })
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("edges_added,gamma_att,gamma_deg,delta_i\n");
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.edges_added,
            opt(row.gamma_att),
            opt(row.gamma_deg),
            row.delta_i
        ));
    }
    out
}

pub fn intervention_csv(result: &InterventionResult) -> String {
    let mut out = String::from(
        "edges_added,gamma_att_optimized,gamma_att_optimized_se,gamma_att_uniform,gamma_att_uniform_se,gamma_deg_optimized,gamma_deg_optimized_se,gamma_deg_uniform,gamma_deg_uniform_se\n",
    );
    let cell = |m: &Option<MeanSe>| -> (String, String) {
        match m {
            Some(ms) => (ms.mean.to_string(), ms.se.to_string()),
            None => (String::new(), String::new()),
        }
    };
    for m in &result.milestones {
        let (a, ase) = cell(&m.gamma_att_optimized);
        let (b, bse) = cell(&m.gamma_att_uniform);
        let (c, cse) = cell(&m.gamma_deg_optimized);
        let (d, dse) = cell(&m.gamma_deg_uniform);
        out.push_str(&format!(
            "{},{a},{ase},{b},{bse},{c},{cse},{d},{dse}\n",
            m.edges_added
        ));
    }
    out
}

pub fn temporal_csv(result: &TemporalResult) -> String {
    let mut out = String::from("snapshot_tag,delta_i,gamma_att,gamma_deg,n_nodes,n_edges\n");
    for rec in &result.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            rec.tag,
            rec.delta_i,
            opt(rec.gamma_att),
            opt(rec.gamma_deg),
            rec.n_nodes,
            rec.n_edges
        ));
    }
    out
}

/// The tuned parameters and their distribution, one row per edge class.
/// Masked classes print `theta = -inf` and probability zero.
pub fn theta_csv(run: &crate::spsa::OptimizeRun) -> String {
    let mut out = String::from("class_index,k,c,k_prime,c_prime,theta,prob\n");
    for i in 0..run.space.class_count() {
        let class = run.space.class_of_index(i);
        let theta = if run.mask[i] {
            run.params.theta[i].to_string()
        } else {
            "-inf".to_string()
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i,
            class.first.k,
            class.first.attr,
            class.second.k,
            class.second.attr,
            theta,
            run.pmf[i]
        ));
    }
    out
}

/// Read the `prob` column of a `theta_csv` file back as an edge pmf.
pub fn parse_pmf_csv(text: &str) -> Result<Vec<f64>> {
    let mut probs = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let index: usize = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            message: format!("bad class index {:?}", fields[0]),
        })?;
        if index != probs.len() {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("class index {index} out of order"),
            });
        }
        let prob: f64 = fields[6].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            message: format!("bad probability {:?}", fields[6]),
        })?;
        probs.push(prob);
    }
    if probs.is_empty() {
        return Err(Error::InvalidConfig("pmf file has no rows".into()));
    }
    Ok(probs)
}
