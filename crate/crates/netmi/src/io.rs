//! Plain-text graph ingestion and emission.
//!
//! Edge file: one `u v [w]` per line, whitespace separated, `#` comments
//! ignored, optional multiplicity `w >= 1` (default 1). A directed edge list
//! is accepted but symmetrized. Attribute file: one `node attr` per line
//! with `attr` in `{+1, -1, m, f}` (`m` maps to `+1`, `f` to `-1`).
//!
//! Node tokens may be arbitrary strings; dense internal ids are assigned by
//! first appearance (edge file first, then attribute rows). When tokens are
//! not already the dense decimal ids, `save_graph_with_labels` emits a
//! sidecar dictionary mapping dense ids back to the external tokens.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::graph::{Attribute, AttributedMultigraph, GraphSnapshot, NodeId};
use crate::Result;

/// A graph plus the external node tokens it was loaded with.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: AttributedMultigraph,
    /// External token for each dense id.
    pub labels: Vec<String>,
}

fn parse_multiplicity(token: &str, line: usize) -> Result<u32> {
    let w: i64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid multiplicity {token:?}"),
    })?;
    if w < 1 {
        return Err(Error::Parse {
            line,
            message: format!("multiplicity must be >= 1, got {w}"),
        });
    }
    Ok(w as u32)
}

/// Load and intern both files; see the module docs for the formats.
///
/// When the node tokens are exactly the decimals `0..n-1` (the form
/// [`save_graph`] writes) they keep their numeric ids, so a save/load
/// round-trip is the identity. Any other token set is interned in order of
/// first appearance, edge file first.
pub fn load_graph_labeled(edge_file: &Path, attribute_file: &Path) -> Result<LabeledGraph> {
    let edge_text = fs::read_to_string(edge_file)?;
    let attr_text = fs::read_to_string(attribute_file)?;

    // Pass 1: tokenize both files, collecting tokens in first-appearance
    // order.
    let mut labels: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, u32> = BTreeMap::new();
    let mut intern = |token: &str, labels: &mut Vec<String>| -> u32 {
        if let Some(&id) = index.get(token) {
            return id;
        }
        let id = labels.len() as u32;
        labels.push(token.to_string());
        index.insert(token.to_string(), id);
        id
    };

    let mut raw_edges: Vec<(u32, u32, u32)> = Vec::new();
    for (lineno, line) in edge_text.lines().enumerate() {
        let line_num = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::Parse {
                line: line_num,
                message: format!("expected `u v [w]`, got {} fields", fields.len()),
            });
        }
        let u = intern(fields[0], &mut labels);
        let v = intern(fields[1], &mut labels);
        if u == v {
            return Err(Error::SelfLoopRejected { node: u });
        }
        let w = if fields.len() == 3 {
            parse_multiplicity(fields[2], line_num)?
        } else {
            1
        };
        raw_edges.push((u, v, w));
    }

    // Attribute rows; rows for unseen nodes create isolated nodes.
    let mut attr_by_id: BTreeMap<u32, Attribute> = BTreeMap::new();
    for (lineno, line) in attr_text.lines().enumerate() {
        let line_num = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_num,
                message: format!("expected `node attr`, got {} fields", fields.len()),
            });
        }
        let id = intern(fields[0], &mut labels);
        let attr = Attribute::parse_token(fields[1]).ok_or_else(|| Error::Parse {
            line: line_num,
            message: format!("invalid attribute {:?} (expected +1, -1, m, f)", fields[1]),
        })?;
        if let Some(prev) = attr_by_id.insert(id, attr) {
            if prev != attr {
                return Err(Error::Parse {
                    line: line_num,
                    message: format!("conflicting attribute for node {:?}", fields[0]),
                });
            }
        }
    }

    // Pass 2: prefer the canonical numeric mapping when the tokens are
    // exactly the decimals 0..n-1.
    let n = labels.len();
    let numeric: Option<Vec<u32>> = labels
        .iter()
        .map(|t| t.parse::<u32>().ok())
        .collect::<Option<Vec<u32>>>()
        .filter(|ids| {
            let mut seen = vec![false; n];
            for &id in ids {
                if (id as usize) >= n || seen[id as usize] {
                    return false;
                }
                seen[id as usize] = true;
            }
            true
        });
    // remap[interned id] = final dense id.
    let (remap, labels): (Vec<u32>, Vec<String>) = match numeric {
        Some(ids) => (ids, (0..n).map(|i| i.to_string()).collect()),
        None => ((0..n as u32).collect(), labels),
    };

    let mut attributes: Vec<Option<Attribute>> = vec![None; n];
    for interned in 0..n as u32 {
        if let Some(&attr) = attr_by_id.get(&interned) {
            attributes[remap[interned as usize] as usize] = Some(attr);
        }
    }
    let mut resolved = Vec::with_capacity(n);
    for (id, slot) in attributes.into_iter().enumerate() {
        match slot {
            Some(attr) => resolved.push(attr),
            None => {
                return Err(Error::MissingAttribute {
                    node: labels[id].clone(),
                })
            }
        }
    }

    let mut graph = AttributedMultigraph::new();
    for attr in resolved {
        graph.add_node(attr);
    }
    for (u, v, w) in raw_edges {
        graph.add_edge_with_multiplicity(
            NodeId(remap[u as usize]),
            NodeId(remap[v as usize]),
            w,
        )?;
    }
    Ok(LabeledGraph { graph, labels })
}

/// Load a graph, discarding external labels.
pub fn load_graph(edge_file: &Path, attribute_file: &Path) -> Result<AttributedMultigraph> {
    Ok(load_graph_labeled(edge_file, attribute_file)?.graph)
}

/// Write the graph using dense decimal ids. Round-trips exactly through
/// [`load_graph`].
pub fn save_graph(
    g: &AttributedMultigraph,
    edge_file: &Path,
    attribute_file: &Path,
) -> Result<()> {
    let mut edges = String::new();
    for (u, v, w) in g.edges() {
        if w == 1 {
            edges.push_str(&format!("{u} {v}\n"));
        } else {
            edges.push_str(&format!("{u} {v} {w}\n"));
        }
    }
    let mut attrs = String::new();
    for v in 0..g.node_count() as u32 {
        attrs.push_str(&format!("{} {}\n", v, g.attribute(NodeId(v)).unwrap()));
    }
    fs::write(edge_file, edges)?;
    fs::write(attribute_file, attrs)?;
    Ok(())
}

/// Like [`save_graph`], and additionally emits `dict_file` mapping dense ids
/// back to external tokens when those differ from the dense decimals.
pub fn save_graph_with_labels(
    g: &AttributedMultigraph,
    labels: &[String],
    edge_file: &Path,
    attribute_file: &Path,
    dict_file: &Path,
) -> Result<()> {
    save_graph(g, edge_file, attribute_file)?;
    let trivial = labels
        .iter()
        .enumerate()
        .all(|(i, label)| label == &i.to_string());
    if !trivial {
        let mut dict = String::new();
        for (i, label) in labels.iter().enumerate() {
            dict.push_str(&format!("{i} {label}\n"));
        }
        fs::write(dict_file, dict)?;
    }
    Ok(())
}

/// Load a snapshot series from a directory of `<tag>.edges` / `<tag>.attrs`
/// pairs, tags sorted lexicographically.
pub fn load_snapshot_series(dir: &Path) -> Result<Vec<GraphSnapshot>> {
    let mut tags: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("edges") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                tags.push((stem.to_string(), path.clone()));
            }
        }
    }
    tags.sort();
    let mut series = Vec::with_capacity(tags.len());
    for (tag, edge_path) in tags {
        let attr_path = edge_path.with_extension("attrs");
        if !attr_path.exists() {
            return Err(Error::InvalidConfig(format!(
                "snapshot {tag:?} has no attribute file {}",
                attr_path.display()
            )));
        }
        let graph = load_graph(&edge_path, &attr_path).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("[{tag}] {message}"),
            },
            other => other,
        })?;
        series.push(GraphSnapshot { tag, graph });
    }
    Ok(series)
}
