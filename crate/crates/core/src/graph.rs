//! CSR graph storage, JSON serialization, synthetic generators, degree
//! normalization, and the edge perturbations used by the robustness study.
//!
//! Canonical edge order is CSR sorted by (src, dst); every per-edge array in
//! the crate (messages, prompts, weights) is aligned to this order. Undirected
//! graphs are materialized as symmetric directed edge pairs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dense::{Mat, Rng};
use crate::{Error, Result};

/// Train/val/test node index lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitSpec {
    pub fn validate(&self, num_nodes: usize) -> Result<()> {
        let mut seen = vec![false; num_nodes];
        for (name, list) in [("train", &self.train), ("val", &self.val), ("test", &self.test)] {
            for &v in list {
                if v >= num_nodes {
                    return Err(Error::param(format!(
                        "split {name} contains node {v} but graph has {num_nodes} nodes"
                    )));
                }
                if seen[v] {
                    return Err(Error::param(format!(
                        "node {v} appears in more than one split"
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(())
    }
}

/// CSR-indexed graph with node features and optional edge features, weights,
/// and labels. Immutable after construction; perturbations return new graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    row_offsets: Vec<usize>, // length N+1
    dst: Vec<usize>,         // length |E|, strictly increasing per source row
    edge_weight: Vec<f64>,   // length |E|
    node_feat: Mat,          // N x d_V
    edge_feat: Mat,          // |E| x d_E (d_E may be 0)
    labels: Option<Vec<usize>>,
    directed: bool,
}

impl Graph {
    /// Builds a canonical CSR graph from a directed edge list. Edges are
    /// sorted by (src, dst); duplicate pairs are rejected.
    pub fn from_edge_list(
        num_nodes: usize,
        edges: &[(usize, usize)],
        node_feat: Mat,
        edge_feat: Option<Mat>,
        weights: Option<Vec<f64>>,
        directed: bool,
    ) -> Result<Graph> {
        if node_feat.rows() != num_nodes {
            return Err(Error::shape(format!(
                "node_feat has {} rows but graph has {num_nodes} nodes",
                node_feat.rows()
            )));
        }
        let m = edges.len();
        if let Some(w) = &weights {
            if w.len() != m {
                return Err(Error::shape(format!(
                    "{} edge weights for {m} edges",
                    w.len()
                )));
            }
        }
        if let Some(f) = &edge_feat {
            if f.rows() != m {
                return Err(Error::shape(format!(
                    "edge_feat has {} rows for {m} edges",
                    f.rows()
                )));
            }
        }
        for &(s, d) in edges {
            if s >= num_nodes || d >= num_nodes {
                return Err(Error::param(format!(
                    "edge ({s},{d}) out of range for {num_nodes} nodes"
                )));
            }
        }

        let d_e = edge_feat.as_ref().map_or(0, Mat::cols);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| edges[i]);
        for w in order.windows(2) {
            if edges[w[0]] == edges[w[1]] {
                let (s, d) = edges[w[0]];
                return Err(Error::param(format!("duplicate edge ({s},{d})")));
            }
        }

        let mut dst = Vec::with_capacity(m);
        let mut edge_weight = Vec::with_capacity(m);
        let mut feat = Mat::zeros(m, d_e);
        let mut row_offsets = vec![0usize; num_nodes + 1];
        for (pos, &i) in order.iter().enumerate() {
            let (s, d) = edges[i];
            row_offsets[s + 1] += 1;
            dst.push(d);
            edge_weight.push(weights.as_ref().map_or(1.0, |w| w[i]));
            if let Some(f) = &edge_feat {
                feat.row_mut(pos).copy_from_slice(f.row(i));
            }
        }
        for v in 0..num_nodes {
            row_offsets[v + 1] += row_offsets[v];
        }

        let g = Graph {
            num_nodes,
            row_offsets,
            dst,
            edge_weight,
            node_feat,
            edge_feat: feat,
            labels: None,
            directed,
        };
        if !directed {
            g.check_symmetric()?;
        }
        Ok(g)
    }

    /// Builds an undirected graph from unordered pairs; each pair (u,v) with
    /// u != v is expanded into both directions sharing weight and features.
    pub fn from_undirected_pairs(
        num_nodes: usize,
        pairs: &[(usize, usize)],
        node_feat: Mat,
        edge_feat: Option<Mat>,
        weights: Option<Vec<f64>>,
    ) -> Result<Graph> {
        let d_e = edge_feat.as_ref().map_or(0, Mat::cols);
        let mut edges = Vec::new();
        let mut w = Vec::new();
        let mut f_rows: Vec<Vec<f64>> = Vec::new();
        for (i, &(u, v)) in pairs.iter().enumerate() {
            let wi = weights.as_ref().map_or(1.0, |ws| ws[i]);
            let fi = edge_feat
                .as_ref()
                .map_or_else(|| vec![0.0; d_e], |f| f.row(i).to_vec());
            edges.push((u, v));
            w.push(wi);
            f_rows.push(fi.clone());
            if u != v {
                edges.push((v, u));
                w.push(wi);
                f_rows.push(fi);
            }
        }
        let feat = if edges.is_empty() {
            Mat::zeros(0, d_e)
        } else {
            Mat::from_rows(&f_rows)?
        };
        Graph::from_edge_list(num_nodes, &edges, node_feat, Some(feat), Some(w), false)
    }

    fn check_symmetric(&self) -> Result<()> {
        for (i, (s, d)) in self.edges().enumerate() {
            let Some(j) = self.edge_index(d, s) else {
                return Err(Error::param(format!(
                    "undirected graph missing reverse of edge ({s},{d})"
                )));
            };
            if self.edge_weight[i] != self.edge_weight[j]
                || self.edge_feat.row(i) != self.edge_feat.row(j)
            {
                return Err(Error::param(format!(
                    "undirected pair ({s},{d}) has asymmetric weight or features"
                )));
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.dst.len()
    }

    pub fn node_dim(&self) -> usize {
        self.node_feat.cols()
    }

    pub fn edge_dim(&self) -> usize {
        self.edge_feat.cols()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_feat(&self) -> &Mat {
        &self.node_feat
    }

    pub fn edge_feat(&self) -> &Mat {
        &self.edge_feat
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weight
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Graph> {
        if labels.len() != self.num_nodes {
            return Err(Error::shape(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.num_nodes
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_node_feat(mut self, node_feat: Mat) -> Result<Graph> {
        if node_feat.rows() != self.num_nodes {
            return Err(Error::shape(format!(
                "node_feat has {} rows but graph has {} nodes",
                node_feat.rows(),
                self.num_nodes
            )));
        }
        self.node_feat = node_feat;
        Ok(self)
    }

    pub fn with_edge_feat(mut self, edge_feat: Mat) -> Result<Graph> {
        if edge_feat.rows() != self.num_edges() {
            return Err(Error::shape(format!(
                "edge_feat has {} rows but graph has {} edges",
                edge_feat.rows(),
                self.num_edges()
            )));
        }
        self.edge_feat = edge_feat;
        if !self.directed {
            self.check_symmetric()?;
        }
        Ok(self)
    }

    pub fn with_edge_weights(mut self, weights: Vec<f64>) -> Result<Graph> {
        if weights.len() != self.num_edges() {
            return Err(Error::shape(format!(
                "{} weights for {} edges",
                weights.len(),
                self.num_edges()
            )));
        }
        self.edge_weight = weights;
        if !self.directed {
            self.check_symmetric()?;
        }
        Ok(self)
    }

    /// Destinations of edges leaving `v`, in canonical order.
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.dst[self.row_offsets[v]..self.row_offsets[v + 1]]
    }

    /// Edge ids leaving `v`.
    pub fn out_edge_range(&self, v: usize) -> std::ops::Range<usize> {
        self.row_offsets[v]..self.row_offsets[v + 1]
    }

    /// Iterates (src, dst) in canonical edge order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes)
            .flat_map(move |s| self.out_edge_range(s).map(move |i| (s, self.dst[i])))
    }

    /// Source node of edge `i`.
    pub fn src_of(&self, i: usize) -> usize {
        // partition_point returns the first offset beyond i.
        self.row_offsets.partition_point(|&o| o <= i) - 1
    }

    /// Destination node of edge `i`.
    pub fn dst_of(&self, i: usize) -> usize {
        self.dst[i]
    }

    /// Canonical edge id of (src, dst) if present.
    pub fn edge_index(&self, src: usize, dst: usize) -> Option<usize> {
        let row = self.out_edge_range(src);
        let slice = &self.dst[row.clone()];
        slice.binary_search(&dst).ok().map(|k| row.start + k)
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edge_index(src, dst).is_some()
    }

    /// Number of edges arriving at each node.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.num_nodes];
        for &d in &self.dst {
            deg[d] += 1;
        }
        deg
    }

    /// Weighted out-degree (CSR row sums). For undirected graphs this equals
    /// the usual weighted degree.
    pub fn weighted_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.num_nodes];
        for (i, (s, _)) in self.edges().enumerate() {
            deg[s] += self.edge_weight[i];
        }
        deg
    }

    /// Returns a copy with a weight-1, zero-feature self-loop on every node
    /// that lacks one.
    pub fn with_self_loops(&self) -> Graph {
        let mut edges: Vec<(usize, usize)> = self.edges().collect();
        let mut weights = self.edge_weight.clone();
        let mut feats = self.edge_feat.to_rows();
        for v in 0..self.num_nodes {
            if !self.has_edge(v, v) {
                edges.push((v, v));
                weights.push(1.0);
                feats.push(vec![0.0; self.edge_dim()]);
            }
        }
        let feat = if edges.is_empty() {
            Mat::zeros(0, self.edge_dim())
        } else {
            Mat::from_rows(&feats).expect("rectangular feature rows")
        };
        let mut g = Graph::from_edge_list(
            self.num_nodes,
            &edges,
            self.node_feat.clone(),
            Some(feat),
            Some(weights),
            self.directed,
        )
        .expect("self-loop insertion preserves validity");
        g.labels = self.labels.clone();
        g
    }

    /// Checks the CSR structural invariants; used by tests and after
    /// perturbations.
    pub fn check_invariants(&self) -> Result<()> {
        if self.row_offsets.len() != self.num_nodes + 1
            || self.row_offsets[0] != 0
            || *self.row_offsets.last().unwrap() != self.dst.len()
        {
            return Err(Error::shape("row_offsets malformed".to_string()));
        }
        for v in 0..self.num_nodes {
            if self.row_offsets[v] > self.row_offsets[v + 1] {
                return Err(Error::shape("row_offsets not nondecreasing".to_string()));
            }
            let row = self.out_neighbors(v);
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::shape(format!(
                        "dst slice of node {v} not strictly increasing"
                    )));
                }
            }
            if row.iter().any(|&d| d >= self.num_nodes) {
                return Err(Error::shape("dst out of range".to_string()));
            }
        }
        if self.edge_feat.rows() != self.num_edges()
            || self.node_feat.rows() != self.num_nodes
            || self.edge_weight.len() != self.num_edges()
        {
            return Err(Error::shape("per-edge arrays misaligned".to_string()));
        }
        if !self.directed {
            self.check_symmetric()?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    num_nodes: usize,
    node_features: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_features: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
    directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    splits: Option<SplitSpec>,
}

/// Parses a graph document. Edges may appear in any order; the loader
/// canonicalizes. For `"directed": false` each undirected edge appears once
/// and is expanded into both directions.
pub fn load_json(path: impl AsRef<Path>) -> Result<(Graph, Option<SplitSpec>)> {
    let text = std::fs::read_to_string(path)?;
    load_json_str(&text)
}

pub fn load_json_str(text: &str) -> Result<(Graph, Option<SplitSpec>)> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| Error::parse("", e.to_string()))?;

    let node_feat = Mat::from_rows(&doc.node_features)
        .map_err(|e| Error::parse("/node_features", e.to_string()))?;
    if node_feat.rows() != doc.num_nodes {
        return Err(Error::parse(
            "/node_features",
            format!("{} rows for {} nodes", node_feat.rows(), doc.num_nodes),
        ));
    }
    for (i, &(s, d)) in doc.edges.iter().enumerate() {
        if s >= doc.num_nodes || d >= doc.num_nodes {
            return Err(Error::parse(
                format!("/edges/{i}"),
                format!("endpoint out of range for {} nodes", doc.num_nodes),
            ));
        }
    }
    let edge_feat = match &doc.edge_features {
        Some(rows) => {
            if rows.len() != doc.edges.len() {
                return Err(Error::parse(
                    "/edge_features",
                    format!("{} rows for {} edges", rows.len(), doc.edges.len()),
                ));
            }
            Some(Mat::from_rows(rows).map_err(|e| Error::parse("/edge_features", e.to_string()))?)
        }
        None => None,
    };
    if let Some(w) = &doc.edge_weights {
        if w.len() != doc.edges.len() {
            return Err(Error::parse(
                "/edge_weights",
                format!("{} weights for {} edges", w.len(), doc.edges.len()),
            ));
        }
    }

    let graph = if doc.directed {
        Graph::from_edge_list(
            doc.num_nodes,
            &doc.edges,
            node_feat,
            edge_feat,
            doc.edge_weights.clone(),
            true,
        )
    } else {
        Graph::from_undirected_pairs(
            doc.num_nodes,
            &doc.edges,
            node_feat,
            edge_feat,
            doc.edge_weights.clone(),
        )
    }
    .map_err(|e| Error::parse("/edges", e.to_string()))?;

    let graph = match doc.labels {
        Some(l) => {
            if l.len() != doc.num_nodes {
                return Err(Error::parse(
                    "/labels",
                    format!("{} labels for {} nodes", l.len(), doc.num_nodes),
                ));
            }
            graph.with_labels(l)?
        }
        None => graph,
    };
    if let Some(s) = &doc.splits {
        s.validate(doc.num_nodes)
            .map_err(|e| Error::parse("/splits", e.to_string()))?;
    }
    Ok((graph, doc.splits))
}

/// Writes the canonical JSON form; loading it back reproduces an equal graph
/// with bit-equal floats.
pub fn save_json(graph: &Graph, splits: Option<&SplitSpec>, path: impl AsRef<Path>) -> Result<()> {
    let text = to_json_string(graph, splits)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn to_json_string(graph: &Graph, splits: Option<&SplitSpec>) -> Result<String> {
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut feats = Vec::new();
    for (i, (s, d)) in graph.edges().enumerate() {
        // Undirected graphs are stored symmetric; emit each pair once.
        if !graph.directed && s > d {
            continue;
        }
        edges.push((s, d));
        weights.push(graph.edge_weight[i]);
        feats.push(graph.edge_feat.row(i).to_vec());
    }
    let doc = GraphDoc {
        num_nodes: graph.num_nodes,
        node_features: graph.node_feat.to_rows(),
        edges,
        edge_features: if graph.edge_dim() > 0 { Some(feats) } else { None },
        edge_weights: Some(weights),
        labels: graph.labels.clone(),
        directed: graph.directed,
        splits: splits.cloned(),
    };
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| Error::parse("", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Undirected stochastic-block-model graph. Node features are Gaussian with
/// the block mean shifted by `feature_shift` along the block's coordinate
/// axis (block b uses axis b mod d_v); labels are block ids.
pub fn sbm_generate(
    rng: &mut Rng,
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    d_v: usize,
    feature_shift: f64,
) -> Result<Graph> {
    if block_sizes.is_empty() {
        return Err(Error::param("block_sizes must be nonempty".to_string()));
    }
    for &p in &[p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("probability {p} outside [0,1]")));
        }
    }
    if d_v == 0 {
        return Err(Error::param("d_v must be >= 1".to_string()));
    }
    let n: usize = block_sizes.iter().sum();
    let mut block_of = Vec::with_capacity(n);
    for (b, &size) in block_sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat(b).take(size));
    }

    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block_of[u] == block_of[v] { p_in } else { p_out };
            if rng.chance(p) {
                pairs.push((u, v));
            }
        }
    }

    let mut feat = Mat::randn(rng, n, d_v, 1.0);
    for v in 0..n {
        let axis = block_of[v] % d_v;
        let x = feat.at(v, axis);
        feat.set(v, axis, x + feature_shift);
    }

    Graph::from_undirected_pairs(n, &pairs, feat, None, None)?.with_labels(block_of)
}

// ---------------------------------------------------------------------------
// Perturbations
// ---------------------------------------------------------------------------

/// Payload map keyed by unordered pair; used to rebuild perturbed graphs.
type PairMap = BTreeMap<(usize, usize), (f64, Vec<f64>)>;

fn undirected_pair_map(graph: &Graph) -> PairMap {
    let mut map = PairMap::new();
    for (i, (s, d)) in graph.edges().enumerate() {
        let key = (s.min(d), s.max(d));
        map.entry(key)
            .or_insert_with(|| (graph.edge_weight[i], graph.edge_feat.row(i).to_vec()));
    }
    map
}

fn rebuild_from_pairs(graph: &Graph, map: PairMap) -> Graph {
    let d_e = graph.edge_dim();
    let mut pairs = Vec::with_capacity(map.len());
    let mut weights = Vec::with_capacity(map.len());
    let mut feats = Vec::with_capacity(map.len());
    for ((u, v), (w, f)) in map {
        pairs.push((u, v));
        weights.push(w);
        feats.push(f);
    }
    let feat = if pairs.is_empty() {
        Mat::zeros(0, d_e)
    } else {
        Mat::from_rows(&feats).expect("aligned rows")
    };
    let mut g = Graph::from_undirected_pairs(
        graph.num_nodes,
        &pairs,
        graph.node_feat.clone(),
        Some(feat),
        Some(weights),
    )
    .expect("perturbation preserves validity");
    g.labels = graph.labels.clone();
    g.directed = graph.directed;
    g
}

fn toggle_pair(map: &mut PairMap, key: (usize, usize), d_e: usize) {
    if map.remove(&key).is_none() {
        // Flipped-in edges get weight 1 and zero edge features.
        map.insert(key, (1.0, vec![0.0; d_e]));
    }
}

/// Flips floor(p * |E_undirected|) node pairs chosen uniformly among all
/// unordered pairs: existing edges are removed, non-edges added (both
/// directions). Self-loops are never flipped. Features are preserved.
pub fn random_flip(graph: &Graph, p: f64, rng: &mut Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("flip proportion {p} outside [0,1]")));
    }
    let mut map = undirected_pair_map(graph);
    let undirected_edges = map.keys().filter(|(u, v)| u != v).count();
    let count = (p * undirected_edges as f64).floor() as usize;
    if count == 0 {
        return Ok(graph.clone());
    }
    let n = graph.num_nodes;
    let total_pairs = n * (n - 1) / 2;
    let picks = rng.sample_indices(total_pairs, count.min(total_pairs));
    let d_e = graph.edge_dim();
    for idx in picks {
        toggle_pair(&mut map, pair_from_index(n, idx), d_e);
    }
    Ok(rebuild_from_pairs(graph, map))
}

/// Unordered pair (u, v), u < v, for a flat index in [0, n(n-1)/2).
fn pair_from_index(n: usize, idx: usize) -> (usize, usize) {
    let mut u = 0usize;
    let mut remaining = idx;
    loop {
        let row = n - 1 - u;
        if remaining < row {
            return (u, u + 1 + remaining);
        }
        remaining -= row;
        u += 1;
    }
}

/// Flips exactly `budget` pairs incident to `target`, chosen uniformly among
/// the n-1 candidate pairs.
pub fn targeted_flip(graph: &Graph, target: usize, budget: usize, rng: &mut Rng) -> Result<Graph> {
    if target >= graph.num_nodes {
        return Err(Error::param(format!(
            "target {target} out of range for {} nodes",
            graph.num_nodes
        )));
    }
    let candidates: Vec<usize> = (0..graph.num_nodes).filter(|&u| u != target).collect();
    if budget > candidates.len() {
        return Err(Error::param(format!(
            "budget {budget} exceeds {} flippable pairs",
            candidates.len()
        )));
    }
    if budget == 0 {
        return Ok(graph.clone());
    }
    let mut map = undirected_pair_map(graph);
    let d_e = graph.edge_dim();
    for k in rng.sample_indices(candidates.len(), budget) {
        let u = candidates[k];
        toggle_pair(&mut map, (target.min(u), target.max(u)), d_e);
    }
    Ok(rebuild_from_pairs(graph, map))
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Laplacian-normalized edge weights w_i / sqrt(deg(src) * deg(dst)) in
/// canonical order, with degrees taken after optional self-loop insertion.
/// Returns the (possibly augmented) graph together with the aligned weights.
/// Endpoints with zero degree contribute weight 0 rather than an error.
pub fn symmetric_normalize(graph: &Graph, add_self_loops: bool) -> Result<(Graph, Vec<f64>)> {
    if graph.edge_weights().iter().any(|&w| w < 0.0) {
        return Err(Error::param(
            "symmetric normalization requires nonnegative weights".to_string(),
        ));
    }
    let g = if add_self_loops {
        graph.with_self_loops()
    } else {
        graph.clone()
    };
    let deg = g.weighted_degrees();
    let mut out = Vec::with_capacity(g.num_edges());
    for (i, (s, d)) in g.edges().enumerate() {
        let denom = (deg[s] * deg[d]).sqrt();
        out.push(if denom > 0.0 { g.edge_weight[i] / denom } else { 0.0 });
    }
    Ok((g, out))
}
