//! Simultaneous-perturbation stochastic approximation over the conditional
//! logit edge-addition model, plus the machinery to apply a learned (or
//! uniform) distribution to a real graph.
//!
//! The objective of an edge class `x` is
//! `Q(x) = I_alpha(E + x) - I_alpha(E)`: the change in the
//! attribute-conditional mutual information caused by one edge addition.
//! Two evaluation modes exist:
//!
//! - `GraphExact` (default): draw one representative node from each of the
//!   class's groups, add the edge, and recompute the measure through an
//!   incremental JDAM update covering every cell touched by the endpoints'
//!   incident edges. The input graph is never mutated.
//! - `JdamPaper`: the single-cell move — increment the shifted cell,
//!   decrement the class cell, mirror both across the diagonal — applied to
//!   a copy of the counts. This relocates one unit of existing mass and
//!   keeps the matrix total constant, so it omits both the added edge's own
//!   mass and the row shifts of the endpoints' other incident edges; it is
//!   an approximation kept for fidelity experiments. When the class's cell
//!   is empty the move is inapplicable and `NegativeCell` is raised.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::dist::{self, group_row, Jdam, NormalizedJdam};
use crate::edge_space::{
    class_is_usable, class_mask, masked_logit_pmf, sample_index, EdgeClass, Group, GroupOccupancy,
    GroupSpace, LogitParams,
};
use crate::error::Error;
use crate::graph::{AttributedMultigraph, NodeId};
use crate::measures::{self, RenyiOrder};
use crate::{assortativity, Result};

/// How `Q(x)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveMode {
    GraphExact,
    JdamPaper,
}

/// Which way the parameters move along the gradient estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// One objective evaluation.
#[derive(Clone, Copy, Debug)]
pub struct ObjectiveEval {
    /// Change in the measure, in bits.
    pub q_value: f64,
    pub evaluation_mode: ObjectiveMode,
}

/// SPSA hyperparameters. Gains are constant by default, matching the
/// reference procedure; the decay exponents turn them into
/// `delta / (k+1)^delta_decay` and `epsilon / (k+1)^epsilon_decay` for
/// convergence studies. `samples_per_eval > 1` trades fidelity for
/// variance reduction.
#[derive(Clone, Copy, Debug)]
pub struct SpsaConfig {
    /// Perturbation scale.
    pub delta: f64,
    /// Step size.
    pub epsilon: f64,
    pub iterations: usize,
    pub direction: Direction,
    pub seed: u64,
    pub samples_per_eval: usize,
    pub mode: ObjectiveMode,
    /// Per-iteration decay exponent for `delta`; 0 keeps it constant.
    pub delta_decay: f64,
    /// Per-iteration decay exponent for `epsilon`; 0 keeps it constant.
    pub epsilon_decay: f64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig {
            delta: 0.1,
            epsilon: 0.01,
            iterations: 2000,
            direction: Direction::Minimize,
            seed: 0,
            samples_per_eval: 1,
            mode: ObjectiveMode::GraphExact,
            delta_decay: 0.0,
            epsilon_decay: 0.0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig("delta must be > 0".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig("epsilon must be > 0".into()));
        }
        if self.samples_per_eval == 0 {
            return Err(Error::InvalidConfig("samples_per_eval must be >= 1".into()));
        }
        if self.delta_decay < 0.0 || self.epsilon_decay < 0.0 {
            return Err(Error::InvalidConfig("decay exponents must be >= 0".into()));
        }
        Ok(())
    }

    fn gains_at(&self, iteration: usize) -> (f64, f64) {
        let k = (iteration + 1) as f64;
        (
            self.delta / k.powf(self.delta_decay),
            self.epsilon / k.powf(self.epsilon_decay),
        )
    }
}

/// Precomputed state for repeated objective evaluations against one frozen
/// graph: the group space, occupancy, base JDAM (with one row band of
/// headroom) and the base measure.
pub struct ObjectiveContext<'a> {
    graph: &'a AttributedMultigraph,
    space: GroupSpace,
    occupancy: GroupOccupancy,
    base: Jdam,
    base_measure: f64,
    alpha: RenyiOrder,
}

impl<'a> ObjectiveContext<'a> {
    pub fn new(graph: &'a AttributedMultigraph, alpha: RenyiOrder) -> Result<Self> {
        let space = GroupSpace::for_graph(graph)?;
        let occupancy = GroupOccupancy::build(graph, &space);
        let base = dist::build_jdam_sized(graph, None, space.k_max() + 1)?;
        let base_measure =
            measures::attribute_conditional_mi(&NormalizedJdam::from_jdam(&base)?, alpha);
        Ok(ObjectiveContext {
            graph,
            space,
            occupancy,
            base,
            base_measure,
            alpha,
        })
    }

    pub fn space(&self) -> &GroupSpace {
        &self.space
    }

    pub fn occupancy(&self) -> &GroupOccupancy {
        &self.occupancy
    }

    pub fn base_measure(&self) -> f64 {
        self.base_measure
    }

    /// The measure change caused by adding the concrete edge `{u, v}`,
    /// computed on a copy of the counts; the graph itself is untouched.
    pub fn q_add_edge(&self, u: NodeId, v: NodeId) -> Result<f64> {
        let deltas = add_edge_deltas(self.graph, u, v)?;
        let mut counts = self.base.clone();
        for (&(row, col), &delta) in &deltas {
            counts.add_signed(row, col, delta)?;
        }
        let after = measures::attribute_conditional_mi(
            &NormalizedJdam::from_jdam(&counts)?,
            self.alpha,
        );
        Ok(after - self.base_measure)
    }

    /// Evaluate `Q(x)` for an edge class.
    pub fn eval_class<R: Rng>(
        &self,
        x: &EdgeClass,
        mode: ObjectiveMode,
        rng: &mut R,
    ) -> Result<ObjectiveEval> {
        let q_value = match mode {
            ObjectiveMode::GraphExact => {
                let (u, v) = draw_representatives(&self.occupancy, x, rng)?;
                self.q_add_edge(NodeId(u), NodeId(v))?
            }
            ObjectiveMode::JdamPaper => {
                let mut counts = self.base.clone();
                apply_single_cell_move(&mut counts, x)?;
                let after = measures::attribute_conditional_mi(
                    &NormalizedJdam::from_jdam(&counts)?,
                    self.alpha,
                );
                after - self.base_measure
            }
        };
        Ok(ObjectiveEval {
            q_value,
            evaluation_mode: mode,
        })
    }

    /// Classes the optimizer may sample: groups populated enough to yield
    /// two distinct representatives in `GraphExact` mode, or a decrementable
    /// class cell in `JdamPaper` mode.
    pub fn usable_mask(&self, mode: ObjectiveMode) -> Vec<bool> {
        match mode {
            ObjectiveMode::GraphExact => class_mask(&self.space, &self.occupancy),
            ObjectiveMode::JdamPaper => (0..self.space.class_count())
                .map(|i| {
                    let x = self.space.class_of_index(i);
                    let (r, c) = (x.first.id(), x.second.id());
                    let needed = if r == c { 2 } else { 1 };
                    self.base.cells().get(r, c) >= needed
                })
                .collect(),
        }
    }
}

/// Uniformly draw distinct representatives from the class's two groups,
/// redrawing when a diagonal class picks the same node twice.
fn draw_representatives<R: Rng>(
    occ: &GroupOccupancy,
    class: &EdgeClass,
    rng: &mut R,
) -> Result<(u32, u32)> {
    if !class_is_usable(occ, class) {
        let empty = if class.first.id() >= occ.group_count()
            || occ.members(class.first.id()).is_empty()
        {
            class.first
        } else {
            class.second
        };
        return Err(Error::EmptyGroup {
            k: empty.k,
            attr: empty.attr.sign(),
        });
    }
    let (a, b) = (class.first.id(), class.second.id());
    if a == b {
        let members = occ.members(a);
        let i = rng.gen_range(0..members.len());
        loop {
            let j = rng.gen_range(0..members.len());
            if j != i {
                return Ok((members[i], members[j]));
            }
        }
    } else {
        let u = occ.members(a)[rng.gen_range(0..occ.members(a).len())];
        let v = occ.members(b)[rng.gen_range(0..occ.members(b).len())];
        Ok((u, v))
    }
}

/// Cell deltas for adding one edge `{u, v}`: the new edge's own mass plus
/// the row shifts of every cell touched by the endpoints' incident edges.
fn add_edge_deltas(
    g: &AttributedMultigraph,
    u: NodeId,
    v: NodeId,
) -> Result<BTreeMap<(usize, usize), i64>> {
    if u == v {
        return Err(Error::SelfLoopRejected { node: u.0 });
    }
    let (du, dv) = (g.degree(u)?, g.degree(v)?);
    if du == 0 || dv == 0 {
        return Err(Error::InvalidConfig(
            "representatives must have degree >= 1".into(),
        ));
    }
    let (cu, cv) = (g.attributes()[u.index()], g.attributes()[v.index()]);
    let (ru_old, ru_new) = (group_row((du - 1) as usize, cu), group_row(du as usize, cu));
    let (rv_old, rv_new) = (group_row((dv - 1) as usize, cv), group_row(dv as usize, cv));

    let mut deltas: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut bump = |row: usize, col: usize, d: i64| {
        *deltas.entry((row, col)).or_insert(0) += d;
        *deltas.entry((col, row)).or_insert(0) += d;
    };

    for (node, old_row, new_row, other) in [(u, ru_old, ru_new, v), (v, rv_old, rv_new, u)] {
        for (w, m) in g.neighbors(node) {
            if w == other {
                continue; // mutual edges handled once below
            }
            let rw = group_row(
                (g.degree_unchecked(w.0) - 1) as usize,
                g.attributes()[w.index()],
            );
            bump(old_row, rw, -(m as i64));
            bump(new_row, rw, m as i64);
        }
    }
    let mutual = g.multiplicity(u, v);
    if mutual > 0 {
        bump(ru_old, rv_old, -(mutual as i64));
        bump(ru_new, rv_new, mutual as i64);
    }
    // The added edge itself.
    bump(ru_new, rv_new, 1);
    deltas.retain(|_, d| *d != 0);
    Ok(deltas)
}

/// The single-cell move on a counts copy: `-1` at the class cell, `+1` at
/// the shifted cell, both mirrored across the diagonal.
fn apply_single_cell_move(counts: &mut Jdam, x: &EdgeClass) -> Result<()> {
    let (a, b) = (x.first, x.second);
    let (r_old, c_old) = (a.id(), b.id());
    let (r_new, c_new) = (group_row(a.k + 1, a.attr), group_row(b.k + 1, b.attr));
    let needed = if r_old == c_old { 2 } else { 1 };
    if counts.cells().get(r_old, c_old) < needed {
        return Err(Error::NegativeCell {
            row: r_old,
            col: c_old,
        });
    }
    counts.grow_k_rows((a.k + 2).max(b.k + 2));
    counts.add_signed(r_old, c_old, -1)?;
    counts.add_signed(c_old, r_old, -1)?;
    counts.add_signed(r_new, c_new, 1)?;
    counts.add_signed(c_new, r_new, 1)?;
    Ok(())
}

/// One-shot `Q(x)` evaluation; builds the context internally.
pub fn evaluate_q<R: Rng>(
    g: &AttributedMultigraph,
    x: &EdgeClass,
    alpha: RenyiOrder,
    mode: ObjectiveMode,
    rng: &mut R,
) -> Result<ObjectiveEval> {
    ObjectiveContext::new(g, alpha)?.eval_class(x, mode, rng)
}

/// The simultaneous-perturbation gradient estimate
/// `(C(theta + D d) - C(theta - D d)) / (2 D) * d`.
pub fn spsa_gradient(d: &[f64], delta: f64, cost_plus: f64, cost_minus: f64) -> Vec<f64> {
    let scale = (cost_plus - cost_minus) / (2.0 * delta);
    d.iter().map(|&di| scale * di).collect()
}

/// Result of an optimization run, including what the CSV writer needs.
pub struct OptimizeRun {
    pub params: LogitParams,
    pub space: GroupSpace,
    pub mask: Vec<bool>,
    pub pmf: Vec<f64>,
}

/// Run the SPSA loop and return the tuned logit parameters.
///
/// `theta(0)` is i.i.d. standard normal. Each iteration draws a Rademacher
/// perturbation, samples one edge class from each perturbed distribution,
/// evaluates `Q` on it (a single-sample estimate of the expected change in
/// the measure), and steps `theta` along the gradient estimate in the
/// configured direction. Classes whose groups cannot produce an edge are
/// masked out of the distribution and their parameters stay frozen.
pub fn optimize(
    g: &AttributedMultigraph,
    alpha: RenyiOrder,
    cfg: &SpsaConfig,
) -> Result<LogitParams> {
    optimize_full(g, alpha, cfg).map(|run| run.params)
}

pub fn optimize_full(
    g: &AttributedMultigraph,
    alpha: RenyiOrder,
    cfg: &SpsaConfig,
) -> Result<OptimizeRun> {
    cfg.validate()?;
    let ctx = ObjectiveContext::new(g, alpha)?;
    let mask = ctx.usable_mask(cfg.mode);
    let class_count = ctx.space().class_count();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);

    let mut theta: Vec<f64> = (0..class_count)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut perturbed = vec![0.0; class_count];
    for iteration in 0..cfg.iterations {
        let (delta_k, epsilon_k) = cfg.gains_at(iteration);
        let d: Vec<f64> = (0..class_count)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();

        let mut side = |sign: f64, rng: &mut ChaCha12Rng| -> Result<f64> {
            for i in 0..class_count {
                perturbed[i] = theta[i] + sign * delta_k * d[i];
            }
            let pmf = masked_logit_pmf(
                &LogitParams {
                    theta: perturbed.clone(),
                },
                &mask,
            )?;
            let mut total = 0.0;
            for _ in 0..cfg.samples_per_eval {
                let x = ctx.space().class_of_index(sample_index(&pmf, rng));
                total += ctx.eval_class(&x, cfg.mode, rng)?.q_value;
            }
            Ok(total / cfg.samples_per_eval as f64)
        };

        let cost_plus = side(1.0, &mut rng)?;
        let cost_minus = side(-1.0, &mut rng)?;
        let gradient = spsa_gradient(&d, delta_k, cost_plus, cost_minus);
        let step = match cfg.direction {
            Direction::Minimize => -epsilon_k,
            Direction::Maximize => epsilon_k,
        };
        for i in 0..class_count {
            if mask[i] {
                theta[i] += step * gradient[i];
            }
        }
    }

    let params = LogitParams { theta };
    let pmf = masked_logit_pmf(&params, &mask)?;
    Ok(OptimizeRun {
        params,
        space: *ctx.space(),
        mask,
        pmf,
    })
}

/// Edge-addition distribution handed to [`apply_edges`].
#[derive(Clone, Debug)]
pub enum EdgePmf {
    /// Uniform over the class space (classes without usable groups are
    /// skipped by the conditional draw).
    Uniform,
    /// Explicit weights over class indices, e.g. a tuned logit pmf.
    Table(Vec<f64>),
}

/// One row of the metric trace written during edge addition.
#[derive(Clone, Copy, Debug)]
pub struct TraceRow {
    pub edges_added: usize,
    pub gamma_att: Option<f64>,
    pub gamma_deg: Option<f64>,
    pub delta_i: f64,
}

struct PmfState {
    weights: Vec<f64>,
    uniform: bool,
}

impl PmfState {
    fn new(pmf: &EdgePmf, class_count: usize) -> Result<Self> {
        match pmf {
            EdgePmf::Uniform => Ok(PmfState {
                weights: vec![1.0; class_count],
                uniform: true,
            }),
            EdgePmf::Table(w) => {
                if w.len() != class_count {
                    return Err(Error::InvalidConfig(format!(
                        "pmf has {} entries but the class space has {class_count}",
                        w.len()
                    )));
                }
                if w.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::InvalidConfig(
                        "pmf entries must be finite and nonnegative".into(),
                    ));
                }
                Ok(PmfState {
                    weights: w.clone(),
                    uniform: false,
                })
            }
        }
    }

    /// Remap weights onto a one-band-larger space; fresh classes start at
    /// the smallest existing positive weight (lowest probability).
    fn extend(&mut self, old_space: &GroupSpace, new_space: &GroupSpace) {
        let mut next = vec![0.0; new_space.class_count()];
        if self.uniform {
            next.fill(1.0);
        } else {
            let fill = self
                .weights
                .iter()
                .copied()
                .filter(|p| *p > 0.0)
                .fold(f64::INFINITY, f64::min);
            let fill = if fill.is_finite() { fill } else { 1.0 };
            next.fill(fill);
            let old_v = old_space.group_count();
            let new_v = new_space.group_count();
            for (i, &p) in self.weights.iter().enumerate() {
                next[(i / old_v) * new_v + (i % old_v)] = p;
            }
        }
        self.weights = next;
    }
}

/// Conditional draw over classes that can currently produce an edge;
/// equivalent to redrawing until a usable class comes up.
///
/// A tuned distribution only carries mass on group pairs that were usable
/// when it was trained; as degrees grow that support can drain entirely. In
/// that case every usable class is revived at one common lowest weight (the
/// same convention the space extension uses for classes without a trained
/// value), i.e. the draw falls back to uniform over the usable classes.
/// `ExhaustedClasses` is only possible when no class is usable at all,
/// which cannot happen on a nonempty graph.
fn draw_usable_class<R: Rng>(
    space: &GroupSpace,
    occ: &GroupOccupancy,
    weights: &[f64],
    rng: &mut R,
) -> Result<EdgeClass> {
    let weight_of = |i: usize, fallback: bool| -> f64 {
        if fallback {
            1.0
        } else {
            weights[i]
        }
    };
    for fallback in [false, true] {
        let mut usable_mass = 0.0;
        for i in 0..weights.len() {
            if weight_of(i, fallback) > 0.0 && class_is_usable(occ, &space.class_of_index(i)) {
                usable_mass += weight_of(i, fallback);
            }
        }
        if usable_mass <= 0.0 {
            continue;
        }
        let r = rng.gen::<f64>() * usable_mass;
        let mut acc = 0.0;
        let mut last = None;
        for i in 0..weights.len() {
            let w = weight_of(i, fallback);
            if w > 0.0 {
                let class = space.class_of_index(i);
                if class_is_usable(occ, &class) {
                    acc += w;
                    last = Some(class);
                    if r < acc {
                        return Ok(class);
                    }
                }
            }
        }
        return Ok(last.expect("usable mass was positive"));
    }
    Err(Error::ExhaustedClasses)
}

/// Add `count` sampled edges to a copy of `g`, recording the assortativity
/// coefficients and the measure after each power-of-ten milestone (and at
/// the final count). Group membership shifts as degrees grow; when a node
/// outgrows the space, the space is extended by one band.
pub fn apply_edges<R: Rng>(
    g: &AttributedMultigraph,
    pmf: &EdgePmf,
    count: usize,
    alpha: RenyiOrder,
    rng: &mut R,
) -> Result<(AttributedMultigraph, Vec<TraceRow>)> {
    let mut graph = g.clone();
    let mut space = GroupSpace::for_graph(&graph)?;
    let mut occ = GroupOccupancy::build(&graph, &space);
    let mut pmf_state = PmfState::new(pmf, space.class_count())?;

    let mut milestones: Vec<usize> = Vec::new();
    let mut power = 1usize;
    while power <= count {
        milestones.push(power);
        power = power.saturating_mul(10);
    }
    if count > 0 && !milestones.contains(&count) {
        milestones.push(count);
    }

    let mut trace = Vec::with_capacity(milestones.len());
    for step in 1..=count {
        let class = draw_usable_class(&space, &occ, &pmf_state.weights, rng)?;
        let (u, v) = draw_representatives(&occ, &class, rng)?;

        // Extend the space first if either endpoint would outgrow it.
        let next_k = (graph.degree_unchecked(u) as usize).max(graph.degree_unchecked(v) as usize);
        if next_k > space.k_max() {
            let extended = space.extended();
            pmf_state.extend(&space, &extended);
            space = extended;
            occ.grow(&space);
        }

        graph.add_edge(NodeId(u), NodeId(v))?;
        for node in [u, v] {
            let group = Group {
                k: (graph.degree_unchecked(node) - 1) as usize,
                attr: graph.attributes()[node as usize],
            };
            occ.move_node(node, group.id());
        }

        if milestones.contains(&step) {
            let report = measures::measure_graph(&graph, alpha)?;
            let gammas = assortativity::assortativity_report(&graph)?;
            trace.push(TraceRow {
                edges_added: step,
                gamma_att: gammas.gamma_att,
                gamma_deg: gammas.gamma_deg,
                delta_i: report.attribute_conditional_mi,
            });
        }
    }
    Ok((graph, trace))
}
