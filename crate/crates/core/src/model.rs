//! Versioned text model format.
//!
//! A model is a JSON document: a header (format tag, version, class count,
//! series length, source class labels, training configuration) followed by
//! the node arena of every tree. Each node sits on its own line:
//!
//! ```text
//! {"kind":"mean","t1":5,"t2":10,"tau":0.25,"gain":0.6931471805599453,"left":1,"right":2}
//! {"label":1,"counts":[3,0]}
//! ```
//!
//! Floats are written in shortest round-trip form, so save, load and save
//! again reproduces the file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TsfError};
use crate::forest::{Forest, ForestConfig};
use crate::tree::{LeafNode, Node, SplitNode, Tree};
use crate::types::{FeatureKind, Interval, LabelMap};

pub const FORMAT_TAG: &str = "tsf-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitRecord {
    kind: FeatureKind,
    t1: usize,
    t2: usize,
    tau: f64,
    gain: f64,
    left: usize,
    right: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafRecord {
    label: usize,
    counts: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeRecord {
    Split(SplitRecord),
    Leaf(LeafRecord),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    format_version: u32,
    num_classes: usize,
    series_length: usize,
    class_labels: Vec<i64>,
    config: ForestConfig,
    trees: Vec<Vec<NodeRecord>>,
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("model values serialize")
}

fn record(node: &Node) -> NodeRecord {
    match node {
        Node::Split(s) => NodeRecord::Split(SplitRecord {
            kind: s.kind,
            t1: s.interval.t1,
            t2: s.interval.t2,
            tau: s.threshold,
            gain: s.gain,
            left: s.left,
            right: s.right,
        }),
        Node::Leaf(l) => NodeRecord::Leaf(LeafRecord {
            label: l.label,
            counts: l.class_counts.clone(),
        }),
    }
}

/// Serializes a forest.
pub fn to_model_string(forest: &Forest) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": {},", json(FORMAT_TAG));
    let _ = writeln!(out, "  \"format_version\": {FORMAT_VERSION},");
    let _ = writeln!(out, "  \"num_classes\": {},", forest.num_classes());
    let _ = writeln!(out, "  \"series_length\": {},", forest.series_length());
    let _ = writeln!(out, "  \"class_labels\": {},", json(forest.label_map().original_labels()));
    let _ = writeln!(out, "  \"config\": {},", json(forest.config()));
    out.push_str("  \"trees\": [\n");
    let n_trees = forest.trees().len();
    for (t, tree) in forest.trees().iter().enumerate() {
        out.push_str("    [\n");
        let n_nodes = tree.nodes().len();
        for (i, node) in tree.nodes().iter().enumerate() {
            let sep = if i + 1 < n_nodes { "," } else { "" };
            let _ = writeln!(out, "      {}{sep}", json(&record(node)));
        }
        let sep = if t + 1 < n_trees { "," } else { "" };
        let _ = writeln!(out, "    ]{sep}");
    }
    out.push_str("  ]\n}\n");
    out
}

/// Parses a model produced by [`to_model_string`].
pub fn from_model_str(text: &str) -> Result<Forest> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| TsfError::Model(e.to_string()))?;
    if file.format != FORMAT_TAG {
        return Err(TsfError::Model(format!("unexpected format tag {:?}", file.format)));
    }
    if file.format_version != FORMAT_VERSION {
        return Err(TsfError::Model(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            file.format_version
        )));
    }
    file.config.validate()?;
    let label_map = LabelMap::from_original(file.class_labels)?;
    let m = file.series_length;
    let trees = file
        .trees
        .into_iter()
        .map(|records| {
            let nodes = records
                .into_iter()
                .map(|r| match r {
                    NodeRecord::Split(s) => Node::Split(SplitNode {
                        kind: s.kind,
                        interval: Interval { t1: s.t1, t2: s.t2 },
                        threshold: s.tau,
                        gain: s.gain,
                        left: s.left,
                        right: s.right,
                    }),
                    NodeRecord::Leaf(l) => Node::Leaf(LeafNode {
                        label: l.label,
                        class_counts: l.counts,
                    }),
                })
                .collect();
            Tree::from_nodes(nodes, m)
        })
        .collect::<Result<Vec<_>>>()?;
    Forest::from_parts(trees, file.num_classes, m, file.config, label_map)
}

pub fn save_model(forest: &Forest, path: &Path) -> Result<()> {
    fs::write(path, to_model_string(forest)).map_err(|source| TsfError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<Forest> {
    let text = fs::read_to_string(path).map_err(|source| TsfError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_model_str(&text)
}
