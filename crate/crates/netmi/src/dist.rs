//! Degree and attribute distributions, the remaining-degree machinery, and
//! the joint degree-and-attribute matrix (JDAM).
//!
//! Conventions used throughout:
//!
//! - All edge-based quantities enumerate *ordered* endpoint pairs, so every
//!   undirected edge of multiplicity `w` contributes `w` to two mirrored
//!   cells (or `2w` to a diagonal cell). Symmetry is structural, not
//!   enforced after the fact.
//! - JDAM rows are indexed by *remaining degree* `k = degree - 1` together
//!   with the attribute: row `2k` holds attribute `+1`, row `2k + 1` holds
//!   attribute `-1`.
//! - Isolated (degree-0) nodes cannot appear in any edge-based distribution.
//!   They still count toward `n` in the node-degree distribution, whose
//!   support starts at degree 1.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::graph::{Attribute, AttributedMultigraph};
use crate::numeric::CompensatedSum;
use crate::Result;

/// Matrices stay dense while `dim <= 1024` (covers remaining degrees up to
/// 512 in the group-indexed JDAM) and fall back to a cell map above that, so
/// heavy-tailed degree sequences don't allocate quadratically.
const DENSE_DIM_LIMIT: usize = 1024;

/// Square matrix over cells, dense or sparse depending on dimension.
#[derive(Clone, Debug)]
pub struct CellMatrix<T> {
    dim: usize,
    storage: Storage<T>,
}

#[derive(Clone, Debug)]
enum Storage<T> {
    Dense(Vec<T>),
    Sparse(BTreeMap<(u32, u32), T>),
}

impl<T: Copy + Default + PartialEq> CellMatrix<T> {
    pub fn new(dim: usize) -> Self {
        let storage = if dim <= DENSE_DIM_LIMIT {
            Storage::Dense(vec![T::default(); dim * dim])
        } else {
            Storage::Sparse(BTreeMap::new())
        };
        CellMatrix { dim, storage }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        debug_assert!(row < self.dim && col < self.dim);
        match &self.storage {
            Storage::Dense(v) => v[row * self.dim + col],
            Storage::Sparse(m) => m
                .get(&(row as u32, col as u32))
                .copied()
                .unwrap_or_default(),
        }
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.dim && col < self.dim);
        match &mut self.storage {
            Storage::Dense(v) => v[row * self.dim + col] = value,
            Storage::Sparse(m) => {
                if value == T::default() {
                    m.remove(&(row as u32, col as u32));
                } else {
                    m.insert((row as u32, col as u32), value);
                }
            }
        }
    }

    /// Nonzero cells in deterministic row-major order.
    pub fn iter_nonzero(&self) -> Box<dyn Iterator<Item = ((usize, usize), T)> + '_> {
        match &self.storage {
            Storage::Dense(v) => {
                let dim = self.dim;
                Box::new(v.iter().enumerate().filter_map(move |(i, &x)| {
                    if x == T::default() {
                        None
                    } else {
                        Some(((i / dim, i % dim), x))
                    }
                }))
            }
            Storage::Sparse(m) => Box::new(
                m.iter()
                    .map(|(&(r, c), &x)| ((r as usize, c as usize), x)),
            ),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Grow to `dim` (no-op when already at least as large).
    pub fn grow(&mut self, dim: usize) {
        if dim <= self.dim {
            return;
        }
        match &mut self.storage {
            Storage::Dense(v) => {
                if dim <= DENSE_DIM_LIMIT {
                    let mut next = vec![T::default(); dim * dim];
                    for r in 0..self.dim {
                        next[r * dim..r * dim + self.dim]
                            .copy_from_slice(&v[r * self.dim..(r + 1) * self.dim]);
                    }
                    *v = next;
                } else {
                    let mut map = BTreeMap::new();
                    for r in 0..self.dim {
                        for c in 0..self.dim {
                            let x = v[r * self.dim + c];
                            if x != T::default() {
                                map.insert((r as u32, c as u32), x);
                            }
                        }
                    }
                    self.storage = Storage::Sparse(map);
                }
            }
            Storage::Sparse(_) => {}
        }
        self.dim = dim;
    }
}

impl CellMatrix<u64> {
    /// Add a signed delta; errors if the cell would go negative.
    pub fn add_signed(&mut self, row: usize, col: usize, delta: i64) -> Result<()> {
        let current = self.get(row, col) as i64;
        let next = current + delta;
        if next < 0 {
            return Err(Error::NegativeCell { row, col });
        }
        self.set(row, col, next as u64);
        Ok(())
    }
}

/// Row index for degree-attribute group `(k, c)`.
pub fn group_row(k: usize, attr: Attribute) -> usize {
    2 * k + attr.index()
}

/// Inverse of [`group_row`].
pub fn row_group(row: usize) -> (usize, Attribute) {
    (row / 2, Attribute::from_index(row % 2))
}

fn binned_degree(degree: u64, cap: Option<u64>) -> u64 {
    match cap {
        Some(k) => degree.min(k),
        None => degree,
    }
}

/// Node-degree distribution `p_k` for `k = 1..=k_max`.
///
/// The denominator is the full node count, so with isolated nodes present
/// the support sums to `1 - p_0`; every downstream quantity is a ratio and
/// unaffected.
#[derive(Clone, Debug)]
pub struct DegreeDistribution {
    /// `p[k]` for `k = 0..=k_max`; `p[0]` is always zero.
    p: Vec<f64>,
}

impl DegreeDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn k_max(&self) -> usize {
        self.p.len() - 1
    }

    /// `p_k`, zero outside the stored support.
    pub fn p(&self, k: usize) -> f64 {
        self.p.get(k).copied().unwrap_or(0.0)
    }

    /// Mean degree `sum_j j p_j`.
    pub fn mean(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for (k, &p) in self.p.iter().enumerate() {
            acc.add(k as f64 * p);
        }
        acc.value()
    }
}

/// Remaining-degree distribution `q_k` for `k = 0..k_max`.
#[derive(Clone, Debug)]
pub struct RemainingDegreeDistribution {
    q: Vec<f64>,
}

impl RemainingDegreeDistribution {
    /// Wrap a raw probability vector (used for synthetic inputs in tests and
    /// derived quantities); must sum to 1 within 1e-9.
    pub fn from_probabilities(q: Vec<f64>) -> Result<Self> {
        let sum: f64 = q.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(RemainingDegreeDistribution { q })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.q
    }

    pub fn q(&self, k: usize) -> f64 {
        self.q.get(k).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Mean and variance of the remaining degree.
    pub fn mean_and_variance(&self) -> (f64, f64) {
        let mut mean = CompensatedSum::new();
        let mut second = CompensatedSum::new();
        for (k, &q) in self.q.iter().enumerate() {
            let kf = k as f64;
            mean.add(kf * q);
            second.add(kf * kf * q);
        }
        let m = mean.value();
        (m, second.value() - m * m)
    }
}

/// Joint distribution `e_kk'` of the remaining degrees at the two ends of a
/// randomly chosen edge.
#[derive(Clone, Debug)]
pub struct JointRemainingDegreeDistribution {
    e: CellMatrix<f64>,
}

impl JointRemainingDegreeDistribution {
    /// Wrap a raw matrix given as `((k, k'), value)` cells; must be symmetric
    /// and sum to 1 within 1e-9.
    pub fn from_matrix(k_rows: usize, cells: &[((usize, usize), f64)]) -> Result<Self> {
        let mut e = CellMatrix::new(k_rows);
        for &((k, kp), value) in cells {
            e.set(k, kp, value);
        }
        let mut sum = CompensatedSum::new();
        for ((k, kp), value) in e.iter_nonzero() {
            sum.add(value);
            if (value - e.get(kp, k)).abs() > 1e-12 {
                return Err(Error::SumRuleViolation {
                    detail: format!("asymmetric cell ({k}, {kp})"),
                });
            }
        }
        let total = sum.value();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum: total });
        }
        Ok(JointRemainingDegreeDistribution { e })
    }

    pub fn matrix(&self) -> &CellMatrix<f64> {
        &self.e
    }

    pub fn k_rows(&self) -> usize {
        self.e.dim()
    }

    pub fn e(&self, k: usize, kp: usize) -> f64 {
        if k < self.e.dim() && kp < self.e.dim() {
            self.e.get(k, kp)
        } else {
            0.0
        }
    }

    /// Column sums, which the sum rules tie to `q`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut acc = vec![CompensatedSum::new(); self.e.dim()];
        for ((_, kp), value) in self.e.iter_nonzero() {
            acc[kp].add(value);
        }
        acc.into_iter().map(|a| a.value()).collect()
    }
}

/// Half-edge attribute marginal `m(c)` and symmetric joint `m(c, c')`.
#[derive(Clone, Debug)]
pub struct AttributeDistribution {
    /// Indexed by `Attribute::index()`.
    pub m: [f64; 2],
    pub joint: [[f64; 2]; 2],
}

/// Integer joint degree-and-attribute matrix. The total over all cells is
/// `2M`: each undirected edge is counted once in each ordered direction.
#[derive(Clone, Debug)]
pub struct Jdam {
    cells: CellMatrix<u64>,
    total: u64,
}

impl Jdam {
    /// Number of remaining-degree rows (matrix dimension is twice this).
    pub fn k_rows(&self) -> usize {
        self.cells.dim() / 2
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cells(&self) -> &CellMatrix<u64> {
        &self.cells
    }

    pub fn get(&self, k: usize, c: Attribute, kp: usize, cp: Attribute) -> u64 {
        let dim = self.cells.dim();
        let (r, s) = (group_row(k, c), group_row(kp, cp));
        if r < dim && s < dim {
            self.cells.get(r, s)
        } else {
            0
        }
    }

    /// Apply a signed delta to a cell addressed by matrix rows, tracking the
    /// total. Fails with `NegativeCell` if the cell lacks mass.
    pub fn add_signed(&mut self, row: usize, col: usize, delta: i64) -> Result<()> {
        self.cells.add_signed(row, col, delta)?;
        self.total = (self.total as i64 + delta) as u64;
        Ok(())
    }

    /// Grow the group space to `k_rows` remaining-degree rows.
    pub fn grow_k_rows(&mut self, k_rows: usize) {
        self.cells.grow(2 * k_rows);
    }
}

/// `p_k` over nodes; errors on edgeless graphs.
pub fn degree_distribution(g: &AttributedMultigraph) -> Result<DegreeDistribution> {
    degree_distribution_capped(g, None)
}

/// Like [`degree_distribution`] with degrees clamped to `cap` before binning.
pub fn degree_distribution_capped(
    g: &AttributedMultigraph,
    cap: Option<u64>,
) -> Result<DegreeDistribution> {
    if g.total_multiplicity() == 0 {
        return Err(Error::EmptyGraph);
    }
    let k_max = binned_degree(g.max_degree(), cap) as usize;
    let mut counts = vec![0u64; k_max + 1];
    for v in 0..g.node_count() as u32 {
        let d = binned_degree(g.degree_unchecked(v), cap) as usize;
        if d >= 1 {
            counts[d] += 1;
        }
    }
    let n = g.node_count() as f64;
    let p = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(DegreeDistribution { p })
}

/// `q_k = (k+1) p_{k+1} / sum_j j p_j`.
pub fn remaining_degree_distribution(
    d: &DegreeDistribution,
) -> Result<RemainingDegreeDistribution> {
    let mean = d.mean();
    if mean <= 0.0 {
        return Err(Error::DegenerateDistribution);
    }
    let q = (0..d.k_max())
        .map(|k| ((k + 1) as f64) * d.p(k + 1) / mean)
        .collect();
    Ok(RemainingDegreeDistribution { q })
}

/// Joint remaining-degree distribution from ordered half-edge enumeration.
pub fn joint_remaining_degree(
    g: &AttributedMultigraph,
) -> Result<JointRemainingDegreeDistribution> {
    joint_remaining_degree_capped(g, None)
}

pub fn joint_remaining_degree_capped(
    g: &AttributedMultigraph,
    cap: Option<u64>,
) -> Result<JointRemainingDegreeDistribution> {
    if g.total_multiplicity() == 0 {
        return Err(Error::EmptyGraph);
    }
    let k_rows = binned_degree(g.max_degree(), cap) as usize;
    let mut counts = CellMatrix::<u64>::new(k_rows);
    for (u, v, w) in g.edges() {
        let ku = (binned_degree(g.degree_unchecked(u.0), cap) - 1) as usize;
        let kv = (binned_degree(g.degree_unchecked(v.0), cap) - 1) as usize;
        counts.set(ku, kv, counts.get(ku, kv) + w as u64);
        counts.set(kv, ku, counts.get(kv, ku) + w as u64);
    }
    let total = (2 * g.total_multiplicity()) as f64;
    let mut e = CellMatrix::<f64>::new(k_rows);
    for ((k, kp), c) in counts.iter_nonzero() {
        e.set(k, kp, c as f64 / total);
    }
    Ok(JointRemainingDegreeDistribution { e })
}

/// Build the integer JDAM from the graph.
pub fn build_jdam(g: &AttributedMultigraph) -> Result<Jdam> {
    build_jdam_capped(g, None)
}

pub fn build_jdam_capped(g: &AttributedMultigraph, cap: Option<u64>) -> Result<Jdam> {
    let k_rows = binned_degree(g.max_degree(), cap) as usize;
    build_jdam_sized(g, cap, k_rows)
}

/// Build the JDAM with at least `min_k_rows` remaining-degree rows (extra
/// rows stay zero); used by the optimizer, which needs headroom for the
/// shifted cells.
pub fn build_jdam_sized(
    g: &AttributedMultigraph,
    cap: Option<u64>,
    min_k_rows: usize,
) -> Result<Jdam> {
    if g.total_multiplicity() == 0 {
        return Err(Error::EmptyGraph);
    }
    let k_rows = (binned_degree(g.max_degree(), cap) as usize).max(min_k_rows);
    let mut cells = CellMatrix::<u64>::new(2 * k_rows);
    for (u, v, w) in g.edges() {
        let ru = group_row(
            (binned_degree(g.degree_unchecked(u.0), cap) - 1) as usize,
            g.attributes()[u.index()],
        );
        let rv = group_row(
            (binned_degree(g.degree_unchecked(v.0), cap) - 1) as usize,
            g.attributes()[v.index()],
        );
        cells.set(ru, rv, cells.get(ru, rv) + w as u64);
        cells.set(rv, ru, cells.get(rv, ru) + w as u64);
    }
    Ok(Jdam {
        cells,
        total: 2 * g.total_multiplicity(),
    })
}

/// Normalized JDAM with all marginals precomputed.
///
/// To keep every measure bit-for-bit invariant under the global attribute
/// swap, all reductions over attribute pairs combine the four cells of a
/// `(k, k')` block as `(pp + mm) + (pm + mp)`; swapping labels only
/// transposes operands of commutative additions.
#[derive(Clone, Debug)]
pub struct NormalizedJdam {
    p4: CellMatrix<f64>,
    /// `p(k, c)` indexed by group row.
    p_group: Vec<f64>,
    /// `e_kk'` from attribute marginalization.
    e: CellMatrix<f64>,
    /// `q_k = p(k, +1) + p(k, -1)`.
    q: Vec<f64>,
    /// Deduplicated nonzero `(k, k')` blocks in row-major order.
    blocks: Vec<(usize, usize)>,
}

impl NormalizedJdam {
    fn from_p4(p4: CellMatrix<f64>) -> Self {
        let k_rows = p4.dim() / 2;
        let mut blocks: Vec<(usize, usize)> = p4
            .iter_nonzero()
            .map(|((r, c), _)| (r / 2, c / 2))
            .collect();
        blocks.sort_unstable();
        blocks.dedup();

        let mut e = CellMatrix::<f64>::new(k_rows);
        let mut p_group_acc = vec![CompensatedSum::new(); 2 * k_rows];
        for &(k, kp) in &blocks {
            let pp = p4.get(2 * k, 2 * kp);
            let pm = p4.get(2 * k, 2 * kp + 1);
            let mp = p4.get(2 * k + 1, 2 * kp);
            let mm = p4.get(2 * k + 1, 2 * kp + 1);
            e.set(k, kp, (pp + mm) + (pm + mp));
            p_group_acc[2 * k].add(pp + pm);
            p_group_acc[2 * k + 1].add(mp + mm);
        }
        let p_group: Vec<f64> = p_group_acc.into_iter().map(|a| a.value()).collect();
        let q = (0..k_rows)
            .map(|k| p_group[2 * k] + p_group[2 * k + 1])
            .collect();
        NormalizedJdam {
            p4,
            p_group,
            e,
            q,
            blocks,
        }
    }

    /// Normalize an integer JDAM.
    pub fn from_jdam(j: &Jdam) -> Result<Self> {
        if j.total == 0 {
            return Err(Error::EmptyJdam);
        }
        let total = j.total as f64;
        let mut p4 = CellMatrix::<f64>::new(j.cells.dim());
        for ((r, c), count) in j.cells.iter_nonzero() {
            p4.set(r, c, count as f64 / total);
        }
        Ok(Self::from_p4(p4))
    }

    /// Build from raw probabilities given as `((row, col), p)` cells over
    /// group rows; must be symmetric and sum to 1 within 1e-9. Used for
    /// synthetic product matrices in tests.
    pub fn from_probabilities(k_rows: usize, cells: &[((usize, usize), f64)]) -> Result<Self> {
        let mut p4 = CellMatrix::<f64>::new(2 * k_rows);
        for &((r, c), p) in cells {
            p4.set(r, c, p);
        }
        let mut sum = CompensatedSum::new();
        for ((r, c), p) in p4.iter_nonzero() {
            sum.add(p);
            if (p - p4.get(c, r)).abs() > 1e-12 {
                return Err(Error::SumRuleViolation {
                    detail: format!("asymmetric cell ({r}, {c})"),
                });
            }
        }
        let total = sum.value();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { sum: total });
        }
        Ok(Self::from_p4(p4))
    }

    pub fn k_rows(&self) -> usize {
        self.p4.dim() / 2
    }

    pub fn p4(&self) -> &CellMatrix<f64> {
        &self.p4
    }

    /// `p(k, c)` by group row.
    pub fn p_group(&self) -> &[f64] {
        &self.p_group
    }

    /// Marginal `e_kk'`.
    pub fn e(&self) -> &CellMatrix<f64> {
        &self.e
    }

    /// Marginal `q_k`.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Nonzero `(k, k')` blocks in deterministic order.
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// The four attribute cells of a block: `(pp, pm, mp, mm)`.
    pub fn block_cells(&self, k: usize, kp: usize) -> (f64, f64, f64, f64) {
        (
            self.p4.get(2 * k, 2 * kp),
            self.p4.get(2 * k, 2 * kp + 1),
            self.p4.get(2 * k + 1, 2 * kp),
            self.p4.get(2 * k + 1, 2 * kp + 1),
        )
    }

    pub fn remaining_degree(&self) -> RemainingDegreeDistribution {
        RemainingDegreeDistribution { q: self.q.clone() }
    }

    pub fn joint_remaining_degree(&self) -> JointRemainingDegreeDistribution {
        JointRemainingDegreeDistribution { e: self.e.clone() }
    }
}

/// Attribute marginal and joint over ordered edge endpoints.
pub fn attribute_distributions(g: &AttributedMultigraph) -> Result<AttributeDistribution> {
    if g.total_multiplicity() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut joint_counts = [[0u64; 2]; 2];
    for (u, v, w) in g.edges() {
        let (a, b) = (
            g.attributes()[u.index()].index(),
            g.attributes()[v.index()].index(),
        );
        joint_counts[a][b] += w as u64;
        joint_counts[b][a] += w as u64;
    }
    let total = (2 * g.total_multiplicity()) as f64;
    let joint = [
        [
            joint_counts[0][0] as f64 / total,
            joint_counts[0][1] as f64 / total,
        ],
        [
            joint_counts[1][0] as f64 / total,
            joint_counts[1][1] as f64 / total,
        ],
    ];
    let m = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    Ok(AttributeDistribution { m, joint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn path3() -> AttributedMultigraph {
        AttributedMultigraph::from_parts(
            vec![Attribute::Minus, Attribute::Plus, Attribute::Minus],
            &[(0, 1, 1), (1, 2, 1)],
        )
        .unwrap()
    }

    fn triangle_plus() -> AttributedMultigraph {
        AttributedMultigraph::from_parts(vec![Attribute::Plus; 3], &[(0, 1, 1), (1, 2, 1), (0, 2, 1)])
            .unwrap()
    }

    fn star4() -> AttributedMultigraph {
        AttributedMultigraph::from_parts(
            vec![Attribute::Plus; 5],
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)],
        )
        .unwrap()
    }

    #[test]
    fn degree_distribution_examples() {
        let d = degree_distribution(&path3()).unwrap();
        assert!((d.p(1) - 2.0 / 3.0).abs() < 1e-12);
        assert!((d.p(2) - 1.0 / 3.0).abs() < 1e-12);

        let t = degree_distribution(&triangle_plus()).unwrap();
        assert_eq!(t.p(2), 1.0);

        let s = degree_distribution(&star4()).unwrap();
        assert!((s.p(1) - 0.8).abs() < 1e-12);
        assert!((s.p(4) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn degree_distribution_rejects_empty() {
        let mut g = AttributedMultigraph::new();
        g.add_node(Attribute::Plus);
        assert!(matches!(degree_distribution(&g), Err(Error::EmptyGraph)));
    }

    #[test]
    fn remaining_degree_examples() {
        let q = remaining_degree_distribution(&degree_distribution(&path3()).unwrap()).unwrap();
        assert!((q.q(0) - 0.5).abs() < 1e-12);
        assert!((q.q(1) - 0.5).abs() < 1e-12);

        let qt =
            remaining_degree_distribution(&degree_distribution(&triangle_plus()).unwrap()).unwrap();
        assert_eq!(qt.q(1), 1.0);

        let qs = remaining_degree_distribution(&degree_distribution(&star4()).unwrap()).unwrap();
        assert!((qs.q(0) - 0.5).abs() < 1e-12);
        assert!((qs.q(3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn joint_remaining_degree_examples() {
        let e = joint_remaining_degree(&path3()).unwrap();
        assert!((e.e(0, 1) - 0.5).abs() < 1e-12);
        assert!((e.e(1, 0) - 0.5).abs() < 1e-12);
        assert_eq!(e.e(0, 0), 0.0);

        let et = joint_remaining_degree(&triangle_plus()).unwrap();
        assert_eq!(et.e(1, 1), 1.0);
    }

    #[test]
    fn sum_rules_hold() {
        let g = path3();
        let e = joint_remaining_degree(&g).unwrap();
        let q = remaining_degree_distribution(&degree_distribution(&g).unwrap()).unwrap();
        let cols = e.column_sums();
        for k in 0..q.len() {
            assert!((cols[k] - q.q(k)).abs() < 1e-12);
        }
        let total: f64 = cols.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jdam_single_cross_edge() {
        let g = AttributedMultigraph::from_parts(
            vec![Attribute::Plus, Attribute::Minus],
            &[(0, 1, 1)],
        )
        .unwrap();
        let j = build_jdam(&g).unwrap();
        assert_eq!(j.get(0, Attribute::Plus, 0, Attribute::Minus), 1);
        assert_eq!(j.get(0, Attribute::Minus, 0, Attribute::Plus), 1);
        assert_eq!(j.total(), 2);
    }

    #[test]
    fn jdam_triangle_diagonal() {
        let j = build_jdam(&triangle_plus()).unwrap();
        assert_eq!(j.get(1, Attribute::Plus, 1, Attribute::Plus), 6);
        assert_eq!(j.total(), 6);
    }

    #[test]
    fn jdam_path3_cells() {
        let j = build_jdam(&path3()).unwrap();
        assert_eq!(j.get(0, Attribute::Minus, 1, Attribute::Plus), 2);
        assert_eq!(j.get(1, Attribute::Plus, 0, Attribute::Minus), 2);
        assert_eq!(j.total(), 4);
    }

    #[test]
    fn normalized_jdam_examples() {
        let nt = NormalizedJdam::from_jdam(&build_jdam(&triangle_plus()).unwrap()).unwrap();
        assert_eq!(nt.p4().get(group_row(1, Attribute::Plus), group_row(1, Attribute::Plus)), 1.0);

        let np = NormalizedJdam::from_jdam(&build_jdam(&path3()).unwrap()).unwrap();
        assert_eq!(
            np.p4().get(group_row(0, Attribute::Minus), group_row(1, Attribute::Plus)),
            0.5
        );
        assert_eq!(
            np.p4().get(group_row(1, Attribute::Plus), group_row(0, Attribute::Minus)),
            0.5
        );
    }

    #[test]
    fn normalized_marginals_match_direct_distributions() {
        let g = path3();
        let nj = NormalizedJdam::from_jdam(&build_jdam(&g).unwrap()).unwrap();
        let q = remaining_degree_distribution(&degree_distribution(&g).unwrap()).unwrap();
        for k in 0..q.len() {
            assert!((nj.q()[k] - q.q(k)).abs() < 1e-12);
        }
        let e = joint_remaining_degree(&g).unwrap();
        for k in 0..e.k_rows() {
            for kp in 0..e.k_rows() {
                assert!((nj.e().get(k, kp) - e.e(k, kp)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn attribute_distribution_examples() {
        let all_plus = attribute_distributions(&triangle_plus()).unwrap();
        assert_eq!(all_plus.m[Attribute::Plus.index()], 1.0);
        assert_eq!(all_plus.joint[0][0], 1.0);

        let cross = AttributedMultigraph::from_parts(
            vec![Attribute::Plus, Attribute::Minus],
            &[(0, 1, 1)],
        )
        .unwrap();
        let m = attribute_distributions(&cross).unwrap();
        assert_eq!(m.m[0], 0.5);
        assert_eq!(m.m[1], 0.5);
        assert_eq!(m.joint[0][1], 0.5);
        assert_eq!(m.joint[1][0], 0.5);
        assert_eq!(m.joint[0][0], 0.0);

        let p3 = attribute_distributions(&path3()).unwrap();
        assert_eq!(p3.m[Attribute::Plus.index()], 0.5);
    }

    #[test]
    fn multiplicity_counts_in_degree_and_jdam() {
        let mut g = AttributedMultigraph::new();
        g.add_node(Attribute::Plus);
        g.add_node(Attribute::Minus);
        g.add_edge(NodeId(0), NodeId(1)).unwrap();
        g.add_edge(NodeId(0), NodeId(1)).unwrap();
        // Both nodes have degree 2, remaining degree 1.
        let j = build_jdam(&g).unwrap();
        assert_eq!(j.get(1, Attribute::Plus, 1, Attribute::Minus), 2);
        assert_eq!(j.total(), 4);
    }

    #[test]
    fn degree_cap_clamps_binning() {
        let g = star4();
        let j = build_jdam_capped(&g, Some(2)).unwrap();
        // Hub degree 4 clamps to 2 -> remaining degree 1.
        assert_eq!(j.k_rows(), 2);
        assert_eq!(j.get(0, Attribute::Plus, 1, Attribute::Plus), 4);
    }

    #[test]
    fn sparse_storage_above_dense_limit() {
        // Star with 600 leaves: hub remaining degree 599 exceeds the dense
        // limit, forcing the sparse path.
        let n = 601u32;
        let mut attrs = vec![Attribute::Plus; n as usize];
        attrs[0] = Attribute::Minus;
        let edges: Vec<(u32, u32, u32)> = (1..n).map(|v| (0, v, 1)).collect();
        let g = AttributedMultigraph::from_parts(attrs, &edges).unwrap();
        let j = build_jdam(&g).unwrap();
        assert!(j.cells().is_sparse());
        assert_eq!(j.get(599, Attribute::Minus, 0, Attribute::Plus), 600);
        let nj = NormalizedJdam::from_jdam(&j).unwrap();
        assert!((nj.q()[0] - 0.5).abs() < 1e-12);
        assert!((nj.q()[599] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn doubled_multiplicity_shifts_rows_but_keeps_masses() {
        // w -> 2w doubles degrees, so cells land on different rows, but the
        // multiset of normalized masses is unchanged.
        let g = path3();
        let mut doubled = AttributedMultigraph::new();
        for &a in g.attributes() {
            doubled.add_node(a);
        }
        for (u, v, w) in g.edges() {
            doubled.add_edge_with_multiplicity(u, v, 2 * w).unwrap();
        }
        let nj = NormalizedJdam::from_jdam(&build_jdam(&g).unwrap()).unwrap();
        let nj2 = NormalizedJdam::from_jdam(&build_jdam(&doubled).unwrap()).unwrap();
        let masses = |n: &NormalizedJdam| -> Vec<f64> {
            n.p4().iter_nonzero().map(|(_, p)| p).collect()
        };
        assert_eq!(masses(&nj), masses(&nj2));
    }
}
