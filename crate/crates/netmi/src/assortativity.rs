//! Newman assortativity coefficients and the Pearson correlation used by the
//! sweep drivers.
//!
//! Degenerate inputs (regular graphs, single-attribute graphs) yield
//! `None` rather than an error so sweep pipelines can skip and count them.

use serde::Serialize;

use crate::dist::{AttributeDistribution, JointRemainingDegreeDistribution, RemainingDegreeDistribution};
use crate::error::Error;
use crate::graph::AttributedMultigraph;
use crate::numeric::CompensatedSum;
use crate::{dist, Result};

/// Degree and attribute assortativity of one graph; `None` marks an
/// undefined coefficient.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AssortativityReport {
    pub gamma_deg: Option<f64>,
    pub gamma_att: Option<f64>,
}

/// Degree assortativity
/// `gamma = sum kk' (e_kk' - q_k q_k') / var(q)`.
///
/// Returns `None` when the remaining-degree distribution has zero variance
/// (regular graphs).
pub fn degree_assortativity(
    e: &JointRemainingDegreeDistribution,
    q: &RemainingDegreeDistribution,
) -> Option<f64> {
    let (mean, variance) = q.mean_and_variance();
    if variance <= 0.0 {
        return None;
    }
    let mut cross = CompensatedSum::new();
    for ((k, kp), value) in e.matrix().iter_nonzero() {
        cross.add((k as f64) * (kp as f64) * value);
    }
    Some((cross.value() - mean * mean) / variance)
}

/// Attribute assortativity
/// `gamma = (sum_c m(c,c) - sum_c m(c)^2) / (1 - sum_c m(c)^2)`.
///
/// Returns `None` when a single attribute carries all mass.
pub fn attribute_assortativity(m: &AttributeDistribution) -> Option<f64> {
    let same = m.joint[0][0] + m.joint[1][1];
    let expected = m.m[0] * m.m[0] + m.m[1] * m.m[1];
    let denom = 1.0 - expected;
    if denom <= 0.0 {
        return None;
    }
    Some((same - expected) / denom)
}

/// Both coefficients computed from the graph.
pub fn assortativity_report(g: &AttributedMultigraph) -> Result<AssortativityReport> {
    let degree = dist::degree_distribution(g)?;
    let q = dist::remaining_degree_distribution(&degree)?;
    let e = dist::joint_remaining_degree(g)?;
    let m = dist::attribute_distributions(g)?;
    Ok(AssortativityReport {
        gamma_deg: degree_assortativity(&e, &q),
        gamma_att: attribute_assortativity(&m),
    })
}

/// Product-moment correlation coefficient of two equal-length series.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateSeries);
    }
    let n = x.len() as f64;
    let mean = |s: &[f64]| {
        let mut acc = CompensatedSum::new();
        for &v in s {
            acc.add(v);
        }
        acc.value() / n
    };
    let (mx, my) = (mean(x), mean(y));
    let mut cov = CompensatedSum::new();
    let mut vx = CompensatedSum::new();
    let mut vy = CompensatedSum::new();
    for (&a, &b) in x.iter().zip(y) {
        cov.add((a - mx) * (b - my));
        vx.add((a - mx) * (a - mx));
        vy.add((b - my) * (b - my));
    }
    let (vx, vy) = (vx.value(), vy.value());
    if vx <= 0.0 || vy <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    Ok(cov.value() / (vx.sqrt() * vy.sqrt()))
}
