//! Shannon and Rényi entropies and the mutual-information measures computed
//! from the normalized JDAM.
//!
//! Everything is in bits (base-2 logarithms). Cells with zero probability
//! contribute nothing to any sum, including the `p^alpha` power sums for
//! `alpha < 1`; order `alpha = 0` is refused because support counting
//! degenerates with empty cells. `alpha = 1` dispatches to the Shannon
//! formulas, which are the analytic limit.
//!
//! The headline quantity is [`attribute_conditional_mi`]: the joint
//! degree-attribute mutual information minus the degree-only mutual
//! information. It is always computed as that difference; the expanded
//! single-sum form exists for Shannon as [`shannon_delta_direct`] and the
//! two routes are held to 1e-9 agreement in tests.

use serde::Serialize;

use crate::dist::{
    self, JointRemainingDegreeDistribution, NormalizedJdam, RemainingDegreeDistribution,
};
use crate::error::Error;
use crate::graph::AttributedMultigraph;
use crate::numeric::CompensatedSum;
use crate::Result;

/// Order of the Rényi entropy; must be finite and strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    /// Default order used across the experiments.
    pub const DEFAULT: RenyiOrder = RenyiOrder(1.3);

    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidAlpha { alpha });
        }
        Ok(RenyiOrder(alpha))
    }

    pub fn shannon() -> Self {
        RenyiOrder(1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_shannon(self) -> bool {
        self.0 == 1.0
    }
}

fn check_normalized(dist: &[f64]) -> Result<()> {
    let mut acc = CompensatedSum::new();
    for &p in dist {
        acc.add(p);
    }
    let sum = acc.value();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

fn shannon_entropy_unchecked(dist: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &p in dist {
        if p > 0.0 {
            acc.add(-p * p.log2());
        }
    }
    acc.value()
}

/// Shannon entropy `-sum p log2 p` of a normalized distribution.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    check_normalized(dist)?;
    Ok(shannon_entropy_unchecked(dist))
}

/// Rényi entropy of order `alpha`; `alpha = 1` delegates to Shannon.
pub fn renyi_entropy(dist: &[f64], alpha: RenyiOrder) -> Result<f64> {
    check_normalized(dist)?;
    if alpha.is_shannon() {
        return Ok(shannon_entropy_unchecked(dist));
    }
    let a = alpha.value();
    let mut acc = CompensatedSum::new();
    for &p in dist {
        if p > 0.0 {
            acc.add(p.powf(a));
        }
    }
    Ok(acc.value().log2() / (1.0 - a))
}

/// Power sum of `q` (no attribute structure, plain order).
fn power_sum(values: &[f64], a: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for &p in values {
        if p > 0.0 {
            acc.add(p.powf(a));
        }
    }
    acc.value()
}

/// Power sum over group marginals `p(k, c)`, combining the two attribute
/// values of each `k` commutatively so a global label swap is bit-exact.
fn group_power_sum(p_group: &[f64], a: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    let k_rows = p_group.len() / 2;
    for k in 0..k_rows {
        let plus = p_group[2 * k];
        let minus = p_group[2 * k + 1];
        let plus_term = if plus > 0.0 { plus.powf(a) } else { 0.0 };
        let minus_term = if minus > 0.0 { minus.powf(a) } else { 0.0 };
        acc.add(plus_term + minus_term);
    }
    acc.value()
}

fn validate_sum_rules(
    e: &JointRemainingDegreeDistribution,
    q: &RemainingDegreeDistribution,
) -> Result<()> {
    if e.k_rows() != q.len() {
        return Err(Error::SumRuleViolation {
            detail: format!("e has {} rows but q has {}", e.k_rows(), q.len()),
        });
    }
    let cols = e.column_sums();
    let mut total = CompensatedSum::new();
    for (k, &col) in cols.iter().enumerate() {
        total.add(col);
        if (col - q.q(k)).abs() > 1e-9 {
            return Err(Error::SumRuleViolation {
                detail: format!("column {k} sums to {col}, q is {}", q.q(k)),
            });
        }
    }
    let sum = total.value();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::SumRuleViolation {
            detail: format!("e sums to {sum}"),
        });
    }
    Ok(())
}

fn degree_mi_unchecked(
    e: &JointRemainingDegreeDistribution,
    q: &RemainingDegreeDistribution,
    alpha: RenyiOrder,
) -> f64 {
    if alpha.is_shannon() {
        let mut acc = CompensatedSum::new();
        for ((k, kp), value) in e.matrix().iter_nonzero() {
            acc.add(value * (value / (q.q(k) * q.q(kp))).log2());
        }
        acc.value()
    } else {
        let a = alpha.value();
        let sq = power_sum(q.probabilities(), a);
        let mut se = CompensatedSum::new();
        for (_, value) in e.matrix().iter_nonzero() {
            se.add(value.powf(a));
        }
        ((sq * sq) / se.value()).log2() / (1.0 - a)
    }
}

/// Mutual information `I_alpha(q; q')` between the remaining degrees at the
/// two ends of a random edge.
pub fn degree_mutual_information(
    e: &JointRemainingDegreeDistribution,
    q: &RemainingDegreeDistribution,
    alpha: RenyiOrder,
) -> Result<f64> {
    validate_sum_rules(e, q)?;
    Ok(degree_mi_unchecked(e, q, alpha))
}

/// Conditional entropy `H_alpha(q | q')`.
///
/// Shannon: `sum e log2(q'/e)`. Rényi: `log2(sum e^a / sum q'^a) / (1-a)`.
pub fn conditional_entropy(
    e: &JointRemainingDegreeDistribution,
    q: &RemainingDegreeDistribution,
    alpha: RenyiOrder,
) -> Result<f64> {
    validate_sum_rules(e, q)?;
    if alpha.is_shannon() {
        let mut acc = CompensatedSum::new();
        for ((_, kp), value) in e.matrix().iter_nonzero() {
            acc.add(value * (q.q(kp) / value).log2());
        }
        Ok(acc.value())
    } else {
        let a = alpha.value();
        let mut se = CompensatedSum::new();
        for (_, value) in e.matrix().iter_nonzero() {
            se.add(value.powf(a));
        }
        let sq = power_sum(q.probabilities(), a);
        Ok((se.value() / sq).log2() / (1.0 - a))
    }
}

/// Joint mutual information `I_alpha(q, m; q', m')` between the bivariate
/// (remaining degree, attribute) variables of adjacent nodes.
pub fn joint_mutual_information(nj: &NormalizedJdam, alpha: RenyiOrder) -> f64 {
    let p_group = nj.p_group();
    if alpha.is_shannon() {
        let mut acc = CompensatedSum::new();
        for &(k, kp) in nj.blocks() {
            let (pp, pm, mp, mm) = nj.block_cells(k, kp);
            let term = |p: f64, row: usize, col: usize| {
                if p > 0.0 {
                    p * (p / (p_group[row] * p_group[col])).log2()
                } else {
                    0.0
                }
            };
            let t_pp = term(pp, 2 * k, 2 * kp);
            let t_pm = term(pm, 2 * k, 2 * kp + 1);
            let t_mp = term(mp, 2 * k + 1, 2 * kp);
            let t_mm = term(mm, 2 * k + 1, 2 * kp + 1);
            acc.add((t_pp + t_mm) + (t_pm + t_mp));
        }
        acc.value()
    } else {
        let a = alpha.value();
        let sg = group_power_sum(p_group, a);
        let mut sp4 = CompensatedSum::new();
        let pow = |p: f64| if p > 0.0 { p.powf(a) } else { 0.0 };
        for &(k, kp) in nj.blocks() {
            let (pp, pm, mp, mm) = nj.block_cells(k, kp);
            sp4.add((pow(pp) + pow(mm)) + (pow(pm) + pow(mp)));
        }
        ((sg * sg) / sp4.value()).log2() / (1.0 - a)
    }
}

/// Degree-only mutual information evaluated on the JDAM's cached marginals.
pub fn degree_mutual_information_from_jdam(nj: &NormalizedJdam, alpha: RenyiOrder) -> f64 {
    let q = nj.q();
    if alpha.is_shannon() {
        let mut acc = CompensatedSum::new();
        for ((k, kp), value) in nj.e().iter_nonzero() {
            acc.add(value * (value / (q[k] * q[kp])).log2());
        }
        acc.value()
    } else {
        let a = alpha.value();
        let sq = power_sum(q, a);
        let mut se = CompensatedSum::new();
        for (_, value) in nj.e().iter_nonzero() {
            se.add(value.powf(a));
        }
        ((sq * sq) / se.value()).log2() / (1.0 - a)
    }
}

/// The headline measure: conditional mutual information of the attributes
/// given the degrees, computed as `joint - degree`.
pub fn attribute_conditional_mi(nj: &NormalizedJdam, alpha: RenyiOrder) -> f64 {
    joint_mutual_information(nj, alpha) - degree_mutual_information_from_jdam(nj, alpha)
}

/// The Shannon special case written as a single sum:
/// `sum p4 log2(q_k q_k' p4 / (e p(k,c) p(k',c')))`.
///
/// Kept as an independent route; must agree with
/// [`attribute_conditional_mi`] at order 1 to 1e-9.
pub fn shannon_delta_direct(nj: &NormalizedJdam) -> f64 {
    let p_group = nj.p_group();
    let q = nj.q();
    let mut acc = CompensatedSum::new();
    for &(k, kp) in nj.blocks() {
        let e = nj.e().get(k, kp);
        let (pp, pm, mp, mm) = nj.block_cells(k, kp);
        let term = |p: f64, row: usize, col: usize| {
            if p > 0.0 {
                p * ((q[k] * q[kp] * p) / (e * p_group[row] * p_group[col])).log2()
            } else {
                0.0
            }
        };
        let t_pp = term(pp, 2 * k, 2 * kp);
        let t_pm = term(pm, 2 * k, 2 * kp + 1);
        let t_mp = term(mp, 2 * k + 1, 2 * kp);
        let t_mm = term(mm, 2 * k + 1, 2 * kp + 1);
        acc.add((t_pp + t_mm) + (t_pm + t_mp));
    }
    acc.value()
}

/// Everything the `measure` command reports, computed from one JDAM build.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeasureReport {
    pub alpha: f64,
    /// Shannon entropy of the remaining-degree distribution, in bits.
    #[serde(rename = "shannon_H")]
    pub shannon_h: f64,
    /// `I_alpha(q; q')` at the supplied order.
    pub degree_mi: f64,
    /// `I_alpha(q, m; q', m')` at the supplied order.
    pub joint_mi: f64,
    /// `joint_mi - degree_mi`.
    #[serde(rename = "delta_i")]
    pub attribute_conditional_mi: f64,
}

/// Measure a prebuilt normalized JDAM.
pub fn measure_normalized(nj: &NormalizedJdam, alpha: RenyiOrder) -> MeasureReport {
    let degree_mi = degree_mutual_information_from_jdam(nj, alpha);
    let joint_mi = joint_mutual_information(nj, alpha);
    MeasureReport {
        alpha: alpha.value(),
        shannon_h: shannon_entropy_unchecked(nj.q()),
        degree_mi,
        joint_mi,
        attribute_conditional_mi: joint_mi - degree_mi,
    }
}

/// Build distributions and the JDAM once and fill a [`MeasureReport`].
pub fn measure_graph(g: &AttributedMultigraph, alpha: RenyiOrder) -> Result<MeasureReport> {
    measure_graph_capped(g, alpha, None)
}

pub fn measure_graph_capped(
    g: &AttributedMultigraph,
    alpha: RenyiOrder,
    cap: Option<u64>,
) -> Result<MeasureReport> {
    let jdam = dist::build_jdam_capped(g, cap)?;
    let nj = NormalizedJdam::from_jdam(&jdam)?;
    Ok(measure_normalized(&nj, alpha))
}
