//! The degree-attribute edge-class space and the conditional-logit sampler
//! over it.
//!
//! Groups are `(k, c)` with remaining degree `k` in `0..=k_max` and binary
//! attribute `c`; the space deliberately includes one band above the
//! largest occupied remaining degree so the cell an added edge shifts into
//! always exists. Edge classes are *ordered* pairs of groups, indexed
//! row-major, giving `4 (k_max + 1)^2` classes; when an edge is actually
//! placed the class is treated as unordered since the graph is undirected.

use rand::Rng;

use crate::error::Error;
use crate::graph::{Attribute, AttributedMultigraph};
use crate::Result;

/// One degree-attribute group `(k, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Group {
    pub k: usize,
    pub attr: Attribute,
}

impl Group {
    /// Stable id `2k + attr`; independent of the space size.
    pub fn id(self) -> usize {
        2 * self.k + self.attr.index()
    }

    pub fn from_id(id: usize) -> Group {
        Group {
            k: id / 2,
            attr: Attribute::from_index(id % 2),
        }
    }
}

/// An ordered pair of groups: one candidate edge class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeClass {
    pub first: Group,
    pub second: Group,
}

/// The set of groups reachable before and after a single edge addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupSpace {
    k_max: usize,
}

impl GroupSpace {
    pub fn new(k_max: usize) -> Self {
        GroupSpace { k_max }
    }

    /// Space sized for `g`: `k_max` is the maximum observed degree, one band
    /// above the largest occupied remaining-degree index.
    pub fn for_graph(g: &AttributedMultigraph) -> Result<Self> {
        if g.total_multiplicity() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(GroupSpace {
            k_max: g.max_degree() as usize,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `|V| = 2 (k_max + 1)`.
    pub fn group_count(&self) -> usize {
        2 * (self.k_max + 1)
    }

    /// `|E| = |V|^2 = 4 (k_max + 1)^2`.
    pub fn class_count(&self) -> usize {
        self.group_count() * self.group_count()
    }

    pub fn contains(&self, group: Group) -> bool {
        group.k <= self.k_max
    }

    pub fn class_index(&self, class: EdgeClass) -> usize {
        debug_assert!(self.contains(class.first) && self.contains(class.second));
        class.first.id() * self.group_count() + class.second.id()
    }

    pub fn class_of_index(&self, index: usize) -> EdgeClass {
        let v = self.group_count();
        EdgeClass {
            first: Group::from_id(index / v),
            second: Group::from_id(index % v),
        }
    }

    /// Grow by one remaining-degree band.
    pub fn extended(&self) -> GroupSpace {
        GroupSpace {
            k_max: self.k_max + 1,
        }
    }
}

/// Which nodes currently sit in each group. Nodes of degree 0 belong to no
/// group and are never selected.
#[derive(Clone, Debug)]
pub struct GroupOccupancy {
    members: Vec<Vec<u32>>,
    group_of_node: Vec<Option<usize>>,
    position: Vec<usize>,
}

impl GroupOccupancy {
    pub fn build(g: &AttributedMultigraph, space: &GroupSpace) -> Self {
        let n = g.node_count();
        let mut occ = GroupOccupancy {
            members: vec![Vec::new(); space.group_count()],
            group_of_node: vec![None; n],
            position: vec![0; n],
        };
        for v in 0..n as u32 {
            let d = g.degree_unchecked(v);
            if d == 0 {
                continue;
            }
            let group = Group {
                k: (d - 1) as usize,
                attr: g.attributes()[v as usize],
            };
            if space.contains(group) {
                occ.insert(v, group.id());
            }
        }
        occ
    }

    fn insert(&mut self, node: u32, gid: usize) {
        self.position[node as usize] = self.members[gid].len();
        self.members[gid].push(node);
        self.group_of_node[node as usize] = Some(gid);
    }

    pub fn members(&self, gid: usize) -> &[u32] {
        &self.members[gid]
    }

    pub fn group_of(&self, node: u32) -> Option<usize> {
        self.group_of_node[node as usize]
    }

    pub fn group_count(&self) -> usize {
        self.members.len()
    }

    /// Grow the group table to a larger space.
    pub fn grow(&mut self, space: &GroupSpace) {
        while self.members.len() < space.group_count() {
            self.members.push(Vec::new());
        }
    }

    /// Move a node between groups (swap-remove keeps updates O(1) and the
    /// resulting order deterministic).
    pub fn move_node(&mut self, node: u32, new_gid: usize) {
        if let Some(old_gid) = self.group_of_node[node as usize] {
            let pos = self.position[node as usize];
            let list = &mut self.members[old_gid];
            list.swap_remove(pos);
            if pos < list.len() {
                let moved = list[pos];
                self.position[moved as usize] = pos;
            }
        }
        self.insert(node, new_gid);
    }
}

/// Per-class fixed effects of the conditional logit model.
#[derive(Clone, Debug)]
pub struct LogitParams {
    pub theta: Vec<f64>,
}

impl LogitParams {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Softmax over all classes: `f_i = exp(theta_i) / sum_j exp(theta_j)`.
///
/// The maximum is subtracted before exponentiation for numerical stability;
/// a constant shift of `theta` leaves the result unchanged to within the
/// rounding of the shifted inputs.
pub fn logit_pmf(params: &LogitParams) -> Result<Vec<f64>> {
    if params.theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFiniteTheta);
    }
    masked_softmax(&params.theta, None)
}

/// Softmax restricted to `mask`; masked classes get probability zero.
pub fn masked_logit_pmf(params: &LogitParams, mask: &[bool]) -> Result<Vec<f64>> {
    debug_assert_eq!(params.theta.len(), mask.len());
    if params
        .theta
        .iter()
        .zip(mask)
        .any(|(t, &keep)| keep && !t.is_finite())
    {
        return Err(Error::NonFiniteTheta);
    }
    masked_softmax(&params.theta, Some(mask))
}

fn masked_softmax(theta: &[f64], mask: Option<&[bool]>) -> Result<Vec<f64>> {
    let keep = |i: usize| mask.map_or(true, |m| m[i]);
    let max = theta
        .iter()
        .enumerate()
        .filter(|&(i, _)| keep(i))
        .map(|(_, &t)| t)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::ExhaustedClasses);
    }
    let mut pmf: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(i, &t)| if keep(i) { (t - max).exp() } else { 0.0 })
        .collect();
    let total: f64 = pmf.iter().sum();
    for p in &mut pmf {
        *p /= total;
    }
    Ok(pmf)
}

/// Inverse-CDF draw from a pmf; deterministic given the RNG state.
pub fn sample_index<R: Rng>(pmf: &[f64], rng: &mut R) -> usize {
    let r = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in pmf.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_nonzero = i;
            if r < acc {
                return i;
            }
        }
    }
    last_nonzero
}

/// Draw an edge class from a pmf over the space's class indices.
pub fn sample_edge_class<R: Rng>(space: &GroupSpace, pmf: &[f64], rng: &mut R) -> EdgeClass {
    space.class_of_index(sample_index(pmf, rng))
}

/// Whether a class can yield two distinct representative nodes: both groups
/// nonempty, and at least two members when the class is diagonal.
pub fn class_is_usable(occ: &GroupOccupancy, class: &EdgeClass) -> bool {
    let (a, b) = (class.first.id(), class.second.id());
    if a >= occ.group_count() || b >= occ.group_count() {
        return false;
    }
    if a == b {
        occ.members(a).len() >= 2
    } else {
        !occ.members(a).is_empty() && !occ.members(b).is_empty()
    }
}

/// Usability mask over all classes of the space.
pub fn class_mask(space: &GroupSpace, occ: &GroupOccupancy) -> Vec<bool> {
    (0..space.class_count())
        .map(|i| class_is_usable(occ, &space.class_of_index(i)))
        .collect()
}
