//! The five graph-data-prompt families, applied as graph-to-graph
//! transformations: additive node/edge feature prompts (single vector or a
//! softmax-assigned basis), edge weight prompts (additive or multiplicative
//! on the existing edge support), prompt-subgraph insertion, and the hybrid
//! node-feature/edge-weight combination.

use serde::{Deserialize, Serialize};

use crate::dense::Mat;
use crate::graph::Graph;
use crate::{Error, Result};

/// One cross link from prompt node `prompt` into original node `node`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossLink {
    pub node: usize,
    pub prompt: usize,
    pub weight: f64,
    #[serde(default)]
    pub feat: Vec<f64>,
}

/// Tagged union of the prompt families and their parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GdpSpec {
    /// H + 1 z^T
    NodeSingle { z: Vec<f64> },
    /// H + softmax(H Z^T / tau) Z
    #[serde(rename = "node_multi")]
    NodeMulti { #[serde(rename = "Z")] z: Mat, tau: f64 },
    /// E + 1 f^T
    EdgeSingle { f: Vec<f64> },
    /// E + softmax(E F^T / tau) F
    #[serde(rename = "edge_multi")]
    EdgeMulti { #[serde(rename = "F")] f: Mat, tau: f64 },
    /// A + S, restricted to the existing edge support.
    #[serde(rename = "edge_weight_add")]
    EdgeWeightAdd { #[serde(rename = "S_edges")] s_edges: Vec<f64> },
    /// A (elementwise *) S on the existing edge support.
    #[serde(rename = "edge_weight_mul")]
    EdgeWeightMul { #[serde(rename = "S_edges")] s_edges: Vec<f64> },
    /// Union with a prompt graph of K nodes wired into the original nodes.
    Subgraph {
        #[serde(rename = "Hp")]
        hp: Mat,
        cross: Vec<CrossLink>,
    },
    /// Node-multi prompt combined with multiplicative edge weight scaling.
    Hybrid {
        #[serde(rename = "Z")]
        z: Mat,
        tau: f64,
        #[serde(rename = "S_edges")]
        s_edges: Vec<f64>,
    },
}

impl GdpSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GdpSpec::NodeSingle { .. } => "node_single",
            GdpSpec::NodeMulti { .. } => "node_multi",
            GdpSpec::EdgeSingle { .. } => "edge_single",
            GdpSpec::EdgeMulti { .. } => "edge_multi",
            GdpSpec::EdgeWeightAdd { .. } => "edge_weight_add",
            GdpSpec::EdgeWeightMul { .. } => "edge_weight_mul",
            GdpSpec::Subgraph { .. } => "subgraph",
            GdpSpec::Hybrid { .. } => "hybrid",
        }
    }
}

/// Softmax assignment of instance rows X to basis rows B:
/// row_softmax(X B^T / tau), shape (X.rows x B.rows).
pub fn assignment(x: &Mat, basis: &Mat, tau: f64) -> Result<Mat> {
    if x.cols() != basis.cols() {
        return Err(Error::shape(format!(
            "assignment of width {} against basis width {}",
            x.cols(),
            basis.cols()
        )));
    }
    x.matmul(&basis.transpose())?.row_softmax(tau)
}

fn validate_basis(b: &Mat, width: usize, tau: f64, what: &str) -> Result<()> {
    if b.rows() == 0 {
        return Err(Error::param(format!("{what} basis needs at least one row")));
    }
    if b.cols() != width {
        return Err(Error::shape(format!(
            "{what} basis width {} does not match feature width {width}",
            b.cols()
        )));
    }
    if tau <= 0.0 {
        return Err(Error::param(format!("tau {tau} must be > 0")));
    }
    Ok(())
}

/// Prompted node features for the node families; the assignment matrix is
/// computed from the original H.
pub fn prompted_node_feat(graph: &Graph, spec: &GdpSpec) -> Result<Mat> {
    let h = graph.node_feat();
    match spec {
        GdpSpec::NodeSingle { z } => {
            if z.len() != h.cols() {
                return Err(Error::shape(format!(
                    "prompt vector length {} for feature width {}",
                    z.len(),
                    h.cols()
                )));
            }
            let mut out = h.clone();
            for i in 0..out.rows() {
                let row = out.row_mut(i);
                for (j, zj) in z.iter().enumerate() {
                    row[j] += zj;
                }
            }
            Ok(out)
        }
        GdpSpec::NodeMulti { z, tau } | GdpSpec::Hybrid { z, tau, .. } => {
            validate_basis(z, h.cols(), *tau, "node prompt")?;
            let alpha = assignment(h, z, *tau)?;
            h.add(&alpha.matmul(z)?)
        }
        _ => Err(Error::param(format!(
            "{} is not a node feature prompt",
            spec.kind_name()
        ))),
    }
}

/// Applies a node feature prompt, leaving topology and weights untouched.
pub fn apply_node_prompt(graph: &Graph, spec: &GdpSpec) -> Result<Graph> {
    match spec {
        GdpSpec::NodeSingle { .. } | GdpSpec::NodeMulti { .. } => {
            graph.clone().with_node_feat(prompted_node_feat(graph, spec)?)
        }
        _ => Err(Error::param(format!(
            "{} is not a node feature prompt",
            spec.kind_name()
        ))),
    }
}

/// Prompted edge features; the assignment matrix is computed from the
/// original E.
pub fn prompted_edge_feat(graph: &Graph, spec: &GdpSpec) -> Result<Mat> {
    if graph.edge_dim() == 0 {
        return Err(Error::Unsupported(
            "edge feature prompt on a graph without edge features".to_string(),
        ));
    }
    let e = graph.edge_feat();
    match spec {
        GdpSpec::EdgeSingle { f } => {
            if f.len() != e.cols() {
                return Err(Error::shape(format!(
                    "prompt vector length {} for edge feature width {}",
                    f.len(),
                    e.cols()
                )));
            }
            let mut out = e.clone();
            for i in 0..out.rows() {
                let row = out.row_mut(i);
                for (j, fj) in f.iter().enumerate() {
                    row[j] += fj;
                }
            }
            Ok(out)
        }
        GdpSpec::EdgeMulti { f, tau } => {
            validate_basis(f, e.cols(), *tau, "edge prompt")?;
            let alpha = assignment(e, f, *tau)?;
            e.add(&alpha.matmul(f)?)
        }
        _ => Err(Error::param(format!(
            "{} is not an edge feature prompt",
            spec.kind_name()
        ))),
    }
}

/// Applies an edge feature prompt, leaving topology and weights untouched.
pub fn apply_edge_feature_prompt(graph: &Graph, spec: &GdpSpec) -> Result<Graph> {
    match spec {
        GdpSpec::EdgeSingle { .. } | GdpSpec::EdgeMulti { .. } => {
            graph.clone().with_edge_feat(prompted_edge_feat(graph, spec)?)
        }
        _ => Err(Error::param(format!(
            "{} is not an edge feature prompt",
            spec.kind_name()
        ))),
    }
}

fn check_s_edges(graph: &Graph, s: &[f64]) -> Result<()> {
    if s.len() != graph.num_edges() {
        return Err(Error::shape(format!(
            "edge weight prompt has {} entries for {} edges",
            s.len(),
            graph.num_edges()
        )));
    }
    Ok(())
}

/// Prompted edge weights per canonical edge: A + S or A * S.
pub fn prompted_edge_weights(graph: &Graph, spec: &GdpSpec) -> Result<Vec<f64>> {
    match spec {
        GdpSpec::EdgeWeightAdd { s_edges } => {
            check_s_edges(graph, s_edges)?;
            Ok(graph
                .edge_weights()
                .iter()
                .zip(s_edges)
                .map(|(a, s)| a + s)
                .collect())
        }
        GdpSpec::EdgeWeightMul { s_edges } | GdpSpec::Hybrid { s_edges, .. } => {
            check_s_edges(graph, s_edges)?;
            Ok(graph
                .edge_weights()
                .iter()
                .zip(s_edges)
                .map(|(a, s)| a * s)
                .collect())
        }
        _ => Err(Error::param(format!(
            "{} is not an edge weight prompt",
            spec.kind_name()
        ))),
    }
}

/// Applies an edge weight prompt; the edge set itself is unchanged. For
/// undirected graphs S must be symmetric across edge pairs.
pub fn apply_edge_weight_prompt(graph: &Graph, spec: &GdpSpec) -> Result<Graph> {
    match spec {
        GdpSpec::EdgeWeightAdd { .. } | GdpSpec::EdgeWeightMul { .. } => {
            graph.clone().with_edge_weights(prompted_edge_weights(graph, spec)?)
        }
        _ => Err(Error::param(format!(
            "{} is not an edge weight prompt",
            spec.kind_name()
        ))),
    }
}

/// Inserts the prompt graph: K new nodes carrying rows of Hp, plus one
/// directed edge (orig node <- prompt node) per cross link. The union is
/// directed (cross links point one way) and unlabeled.
pub fn apply_subgraph_prompt(graph: &Graph, spec: &GdpSpec) -> Result<Graph> {
    let GdpSpec::Subgraph { hp, cross } = spec else {
        return Err(Error::param(format!(
            "{} is not a subgraph prompt",
            spec.kind_name()
        )));
    };
    let k = hp.rows();
    if k == 0 {
        return Ok(graph.clone());
    }
    if hp.cols() != graph.node_dim() {
        return Err(Error::shape(format!(
            "prompt node features have width {} but graph features have width {}",
            hp.cols(),
            graph.node_dim()
        )));
    }
    let n = graph.num_nodes();
    let d_e = graph.edge_dim();
    for (i, link) in cross.iter().enumerate() {
        if link.node >= n {
            return Err(Error::param(format!(
                "cross link {i} targets node {} of {n}",
                link.node
            )));
        }
        if link.prompt >= k {
            return Err(Error::param(format!(
                "cross link {i} uses prompt node {} of {k}",
                link.prompt
            )));
        }
        if link.feat.len() != d_e {
            return Err(Error::shape(format!(
                "cross link {i} carries {} feature entries for edge width {d_e}",
                link.feat.len()
            )));
        }
    }

    let mut edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut weights = graph.edge_weights().to_vec();
    let mut feats = graph.edge_feat().to_rows();
    for link in cross {
        edges.push((n + link.prompt, link.node));
        weights.push(link.weight);
        feats.push(link.feat.clone());
    }

    let mut node_feat = Mat::zeros(n + k, graph.node_dim());
    for v in 0..n {
        node_feat.row_mut(v).copy_from_slice(graph.node_feat().row(v));
    }
    for p in 0..k {
        node_feat.row_mut(n + p).copy_from_slice(hp.row(p));
    }

    let feat = if edges.is_empty() {
        Mat::zeros(0, d_e)
    } else {
        Mat::from_rows(&feats)?
    };
    Graph::from_edge_list(n + k, &edges, node_feat, Some(feat), Some(weights), true)
}

/// Node-multi prompt followed by multiplicative edge weight scaling; the
/// assignment matrix comes from the original H.
pub fn apply_hybrid_prompt(graph: &Graph, spec: &GdpSpec) -> Result<Graph> {
    let GdpSpec::Hybrid { z, tau, s_edges } = spec else {
        return Err(Error::param(format!(
            "{} is not a hybrid prompt",
            spec.kind_name()
        )));
    };
    let node_part = GdpSpec::NodeMulti { z: z.clone(), tau: *tau };
    let weight_part = GdpSpec::EdgeWeightMul { s_edges: s_edges.clone() };
    apply_edge_weight_prompt(&apply_node_prompt(graph, &node_part)?, &weight_part)
}

/// Dispatches any prompt family to its transformation.
pub fn apply_gdp(graph: &Graph, spec: &GdpSpec) -> Result<Graph> {
    match spec {
        GdpSpec::NodeSingle { .. } | GdpSpec::NodeMulti { .. } => apply_node_prompt(graph, spec),
        GdpSpec::EdgeSingle { .. } | GdpSpec::EdgeMulti { .. } => {
            apply_edge_feature_prompt(graph, spec)
        }
        GdpSpec::EdgeWeightAdd { .. } | GdpSpec::EdgeWeightMul { .. } => {
            apply_edge_weight_prompt(graph, spec)
        }
        GdpSpec::Subgraph { .. } => apply_subgraph_prompt(graph, spec),
        GdpSpec::Hybrid { .. } => apply_hybrid_prompt(graph, spec),
    }
}
