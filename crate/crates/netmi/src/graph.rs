//! Undirected multigraph with one binary attribute per node.
//!
//! Edges carry a positive integer multiplicity, self-loops are rejected, and
//! node ids are dense (`0..n`). After construction the measurement code
//! treats a graph as an immutable snapshot; mutation happens only through
//! [`AttributedMultigraph::add_node`] / [`AttributedMultigraph::add_edge`].

use std::collections::BTreeMap;

use crate::error::Error;
use crate::Result;

/// Dense node identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Binary node attribute: `+1` (alias `m`) or `-1` (alias `f`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attribute {
    Plus,
    Minus,
}

impl Attribute {
    /// 0 for `+1`, 1 for `-1`; used as a matrix sub-index.
    pub fn index(self) -> usize {
        match self {
            Attribute::Plus => 0,
            Attribute::Minus => 1,
        }
    }

    pub fn from_index(i: usize) -> Attribute {
        match i {
            0 => Attribute::Plus,
            _ => Attribute::Minus,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Attribute::Plus => 1,
            Attribute::Minus => -1,
        }
    }

    pub fn flipped(self) -> Attribute {
        match self {
            Attribute::Plus => Attribute::Minus,
            Attribute::Minus => Attribute::Plus,
        }
    }

    /// Parse an attribute token. Accepts `+1`, `-1`, `m` (maps to `+1`) and
    /// `f` (maps to `-1`).
    pub fn parse_token(token: &str) -> Option<Attribute> {
        match token {
            "+1" | "1" | "m" => Some(Attribute::Plus),
            "-1" | "f" => Some(Attribute::Minus),
            _ => None,
        }
    }
}

impl std::fmt::Display for Attribute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Attribute::Plus => write!(f, "+1"),
            Attribute::Minus => write!(f, "-1"),
        }
    }
}

/// Labeled undirected multigraph with per-edge multiplicities and one binary
/// attribute per node.
#[derive(Clone, Debug, Default)]
pub struct AttributedMultigraph {
    attributes: Vec<Attribute>,
    /// Symmetric adjacency: `adj[u][v] = multiplicity`, stored for both
    /// endpoints. BTreeMap keeps iteration deterministic.
    adj: Vec<BTreeMap<u32, u32>>,
    /// Cached degree (sum of incident multiplicities).
    degrees: Vec<u64>,
    /// Sum of multiplicities over unordered edges (the multigraph's M).
    total_multiplicity: u64,
}

impl AttributedMultigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from an attribute list and `(u, v, w)` edge triples.
    pub fn from_parts(attributes: Vec<Attribute>, edges: &[(u32, u32, u32)]) -> Result<Self> {
        let mut g = Self::new();
        for attr in attributes {
            g.add_node(attr);
        }
        for &(u, v, w) in edges {
            if w == 0 {
                return Err(Error::InvalidConfig("edge multiplicity must be >= 1".into()));
            }
            for _ in 0..w {
                g.add_edge(NodeId(u), NodeId(v))?;
            }
        }
        Ok(g)
    }

    /// Insert a fresh node with the given attribute; returns its dense id.
    pub fn add_node(&mut self, attr: Attribute) -> NodeId {
        let id = self.attributes.len() as u32;
        self.attributes.push(attr);
        self.adj.push(BTreeMap::new());
        self.degrees.push(0);
        NodeId(id)
    }

    /// Increment the multiplicity of `{u, v}` by one (creating it at 1) and
    /// return the new multiplicity.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<u32> {
        if u == v {
            return Err(Error::SelfLoopRejected { node: u.0 });
        }
        let n = self.node_count() as u32;
        if u.0 >= n {
            return Err(Error::UnknownNode { id: u.0 });
        }
        if v.0 >= n {
            return Err(Error::UnknownNode { id: v.0 });
        }
        let w = {
            let slot = self.adj[u.index()].entry(v.0).or_insert(0);
            *slot += 1;
            *slot
        };
        *self.adj[v.index()].entry(u.0).or_insert(0) = w;
        self.degrees[u.index()] += 1;
        self.degrees[v.index()] += 1;
        self.total_multiplicity += 1;
        Ok(w)
    }

    /// Add `w` parallel edges at once.
    pub fn add_edge_with_multiplicity(&mut self, u: NodeId, v: NodeId, w: u32) -> Result<u32> {
        let mut last = 0;
        for _ in 0..w {
            last = self.add_edge(u, v)?;
        }
        Ok(last)
    }

    pub fn node_count(&self) -> usize {
        self.attributes.len()
    }

    /// Number of distinct unordered edges (ignoring multiplicity).
    pub fn distinct_edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.len()).sum::<usize>() / 2
    }

    /// Sum of multiplicities over unordered edges.
    pub fn total_multiplicity(&self) -> u64 {
        self.total_multiplicity
    }

    pub fn degree(&self, v: NodeId) -> Result<u64> {
        self.degrees
            .get(v.index())
            .copied()
            .ok_or(Error::UnknownNode { id: v.0 })
    }

    /// Cached degree without bounds checking (panics on bad id).
    pub fn degree_unchecked(&self, v: u32) -> u64 {
        self.degrees[v as usize]
    }

    pub fn attribute(&self, v: NodeId) -> Result<Attribute> {
        self.attributes
            .get(v.index())
            .copied()
            .ok_or(Error::UnknownNode { id: v.0 })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn max_degree(&self) -> u64 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Neighbors of `v` with multiplicities, ascending by neighbor id.
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.adj[v.index()].iter().map(|(&u, &w)| (NodeId(u), w))
    }

    /// Multiplicity of `{u, v}`, zero when absent.
    pub fn multiplicity(&self, u: NodeId, v: NodeId) -> u32 {
        self.adj
            .get(u.index())
            .and_then(|m| m.get(&v.0))
            .copied()
            .unwrap_or(0)
    }

    /// All unordered edges as `(u, v, multiplicity)` with `u < v`, in
    /// deterministic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .filter(move |(&v, _)| (u as u32) < v)
                .map(move |(&v, &w)| (NodeId(u as u32), NodeId(v), w))
        })
    }

    /// Whether all nodes belong to one connected component. An empty graph
    /// counts as connected; an isolated node makes a multi-node graph
    /// disconnected.
    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut visited = 1;
        while let Some(u) = stack.pop() {
            for (&v, _) in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    visited += 1;
                    stack.push(v);
                }
            }
        }
        visited == n
    }

    /// Copy of the graph with node ids renamed by `perm` (old id `i` becomes
    /// `perm[i]`). `perm` must be a permutation of `0..n`.
    pub fn relabeled(&self, perm: &[u32]) -> Result<Self> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::InvalidConfig("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            let idx = p as usize;
            if idx >= n || seen[idx] {
                return Err(Error::InvalidConfig("not a permutation".into()));
            }
            seen[idx] = true;
        }
        let mut attributes = vec![Attribute::Plus; n];
        for (old, &new) in perm.iter().enumerate() {
            attributes[new as usize] = self.attributes[old];
        }
        let mut g = Self::new();
        for attr in attributes {
            g.add_node(attr);
        }
        for (u, v, w) in self.edges() {
            g.add_edge_with_multiplicity(NodeId(perm[u.index()]), NodeId(perm[v.index()]), w)?;
        }
        Ok(g)
    }

    /// Copy of the graph with the two attribute labels swapped globally.
    pub fn attribute_swapped(&self) -> Self {
        let mut g = self.clone();
        for attr in &mut g.attributes {
            *attr = attr.flipped();
        }
        g
    }

    /// Structural fingerprint used by side-effect-freedom tests: hashes the
    /// full edge list, degrees, and attributes.
    pub fn fingerprint(&self) -> u64 {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let mut h = DefaultHasher::new();
        self.attributes.hash(&mut h);
        self.degrees.hash(&mut h);
        for (u, v, w) in self.edges() {
            (u.0, v.0, w).hash(&mut h);
        }
        h.finish()
    }
}

/// A tagged graph, one element of a temporal snapshot series.
#[derive(Clone, Debug)]
pub struct GraphSnapshot {
    pub tag: String,
    pub graph: AttributedMultigraph,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> AttributedMultigraph {
        // 0 - 1 - 2 with ends -1 and middle +1
        AttributedMultigraph::from_parts(
            vec![Attribute::Minus, Attribute::Plus, Attribute::Minus],
            &[(0, 1, 1), (1, 2, 1)],
        )
        .unwrap()
    }

    #[test]
    fn add_node_assigns_dense_ids() {
        let mut g = AttributedMultigraph::new();
        assert_eq!(g.add_node(Attribute::Plus), NodeId(0));
        assert_eq!(g.node_count(), 1);
        for _ in 0..4 {
            g.add_node(Attribute::Plus);
        }
        assert_eq!(g.add_node(Attribute::Minus), NodeId(5));
        assert_eq!(g.node_count(), 6);
        let a = g.add_node(Attribute::Plus);
        let b = g.add_node(Attribute::Plus);
        assert_ne!(a, b);
    }

    #[test]
    fn add_edge_accumulates_multiplicity() {
        let mut g = AttributedMultigraph::new();
        g.add_node(Attribute::Plus);
        g.add_node(Attribute::Minus);
        assert_eq!(g.add_edge(NodeId(0), NodeId(1)).unwrap(), 1);
        assert_eq!(g.add_edge(NodeId(0), NodeId(1)).unwrap(), 2);
        assert_eq!(g.degree(NodeId(0)).unwrap(), 2);
        assert_eq!(g.degree(NodeId(1)).unwrap(), 2);
        assert_eq!(g.total_multiplicity(), 2);
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = AttributedMultigraph::new();
        for _ in 0..4 {
            g.add_node(Attribute::Plus);
        }
        assert!(matches!(
            g.add_edge(NodeId(3), NodeId(3)),
            Err(Error::SelfLoopRejected { node: 3 })
        ));
    }

    #[test]
    fn unknown_node_rejected() {
        let mut g = AttributedMultigraph::new();
        g.add_node(Attribute::Plus);
        assert!(matches!(
            g.add_edge(NodeId(0), NodeId(7)),
            Err(Error::UnknownNode { id: 7 })
        ));
    }

    #[test]
    fn degree_examples() {
        let mut g = AttributedMultigraph::new();
        g.add_node(Attribute::Plus);
        assert_eq!(g.degree(NodeId(0)).unwrap(), 0);

        let triangle = AttributedMultigraph::from_parts(
            vec![Attribute::Plus; 3],
            &[(0, 1, 1), (1, 2, 1), (0, 2, 1)],
        )
        .unwrap();
        for v in 0..3 {
            assert_eq!(triangle.degree(NodeId(v)).unwrap(), 2);
        }

        let star = AttributedMultigraph::from_parts(
            vec![Attribute::Plus; 5],
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1)],
        )
        .unwrap();
        assert_eq!(star.degree(NodeId(0)).unwrap(), 4);
    }

    #[test]
    fn handshake_identity() {
        let g = path3();
        let degree_sum: u64 = (0..g.node_count() as u32)
            .map(|v| g.degree(NodeId(v)).unwrap())
            .sum();
        assert_eq!(degree_sum, 2 * g.total_multiplicity());
    }

    #[test]
    fn connectivity() {
        assert!(path3().is_connected());
        let mut g = path3();
        g.add_node(Attribute::Plus); // isolated
        assert!(!g.is_connected());
    }

    #[test]
    fn relabel_preserves_structure() {
        let g = path3();
        let h = g.relabeled(&[2, 0, 1]).unwrap();
        assert_eq!(h.degree(NodeId(0)).unwrap(), 2); // old node 1
        assert_eq!(h.attribute(NodeId(0)).unwrap(), Attribute::Plus);
        assert_eq!(h.total_multiplicity(), g.total_multiplicity());
    }

    #[test]
    fn mutation_never_changes_existing_attributes() {
        let mut g = path3();
        let before: Vec<_> = g.attributes().to_vec();
        g.add_edge(NodeId(0), NodeId(2)).unwrap();
        g.add_node(Attribute::Plus);
        assert_eq!(&g.attributes()[..3], &before[..]);
    }
}
