//! Additive message prompting: apply a per-edge prompt matrix to a message
//! matrix, expand low-rank and conditional prompt factorizations, and
//! translate each graph-data-prompt family into its equivalent message
//! prompt. Translations fix the concatenating message function A_vu [H_u ||
//! E_vu]; the subgraph family translates at aggregation level only.

use crate::dense::Mat;
use crate::graph::Graph;
use crate::message::MessageMatrix;
use crate::prompt::{assignment, GdpSpec};
use crate::{Error, Result};

/// Learnable per-edge message offset. `aggregation_level` marks prompts that
/// are only guaranteed to match after sum aggregation (subgraph translation).
#[derive(Debug, Clone, PartialEq)]
pub struct MessagePrompt {
    pub mat: Mat,
    pub aggregation_level: bool,
}

impl MessagePrompt {
    pub fn zeros(edges: usize, width: usize) -> Self {
        MessagePrompt {
            mat: Mat::zeros(edges, width),
            aggregation_level: false,
        }
    }
}

/// Rank-r factor pair realizing P = U V^T.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankPrompt {
    pub u: Mat, // |E| x r
    pub v: Mat, // (d_V + d_E) x r
}

impl LowRankPrompt {
    pub fn new(u: Mat, v: Mat) -> Result<Self> {
        if u.cols() != v.cols() {
            return Err(Error::shape(format!(
                "factor ranks differ: U has {} columns, V has {}",
                u.cols(),
                v.cols()
            )));
        }
        if u.cols() == 0 {
            return Err(Error::param("rank must be >= 1".to_string()));
        }
        Ok(LowRankPrompt { u, v })
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }
}

/// Conditional variant: U is produced from the message content as M W.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPrompt {
    pub w: Mat, // (d_V + d_E) x r
    pub v: Mat, // (d_V + d_E) x r
}

impl ConditionalPrompt {
    pub fn new(w: Mat, v: Mat) -> Result<Self> {
        if w.cols() != v.cols() {
            return Err(Error::shape(format!(
                "factor ranks differ: W has {} columns, V has {}",
                w.cols(),
                v.cols()
            )));
        }
        if w.rows() != v.rows() {
            return Err(Error::shape(format!(
                "factor widths differ: W has {} rows, V has {}",
                w.rows(),
                v.rows()
            )));
        }
        Ok(ConditionalPrompt { w, v })
    }
}

/// Prompted messages M + P; spans are preserved.
pub fn apply_gmp(m: &MessageMatrix, p: &MessagePrompt) -> Result<MessageMatrix> {
    if m.mat.rows() != p.mat.rows() || m.mat.cols() != p.mat.cols() {
        return Err(Error::shape(format!(
            "prompt {}x{} for messages {}x{}",
            p.mat.rows(),
            p.mat.cols(),
            m.mat.rows(),
            m.mat.cols()
        )));
    }
    Ok(MessageMatrix {
        mat: m.mat.add(&p.mat)?,
        node_span: m.node_span,
        edge_span: m.edge_span,
    })
}

/// Expands the factor pair into the dense prompt U V^T.
pub fn lr_expand(p: &LowRankPrompt) -> MessagePrompt {
    MessagePrompt {
        mat: p.u.matmul(&p.v.transpose()).expect("rank dims checked"),
        aggregation_level: false,
    }
}

/// Instance-conditioned U = M W, one projection per message row.
pub fn conditional_u(m: &MessageMatrix, c: &ConditionalPrompt) -> Result<Mat> {
    if m.mat.cols() != c.w.rows() {
        return Err(Error::shape(format!(
            "projection has {} rows for message width {}",
            c.w.rows(),
            m.mat.cols()
        )));
    }
    m.mat.matmul(&c.w)
}

/// Dense prompt of the conditional variant: (M W) V^T.
pub fn conditional_expand(m: &MessageMatrix, c: &ConditionalPrompt) -> Result<MessagePrompt> {
    let u = conditional_u(m, c)?;
    Ok(MessagePrompt {
        mat: u.matmul(&c.v.transpose())?,
        aggregation_level: false,
    })
}

/// Deliberate translator corruptions used as negative controls. `DropMask`
/// omits the A_vu factor from the node-prompt translation, which the
/// equivalence harness must detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslatorMutant {
    None,
    DropMask,
}

/// Translation output: the prompt plus original nodes the subgraph family
/// cannot cover (cross-linked nodes without incoming edges).
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub prompt: MessagePrompt,
    pub uncovered_nodes: Vec<usize>,
}

/// Builds the message prompt whose additive application reproduces the given
/// prompt family on `graph` with node states `h`.
pub fn gdp_to_gmp(graph: &Graph, h: &Mat, spec: &GdpSpec) -> Result<Translation> {
    gdp_to_gmp_with(graph, h, spec, TranslatorMutant::None)
}

pub fn gdp_to_gmp_with(
    graph: &Graph,
    h: &Mat,
    spec: &GdpSpec,
    mutant: TranslatorMutant,
) -> Result<Translation> {
    if h.rows() != graph.num_nodes() {
        return Err(Error::shape(format!(
            "node states have {} rows for {} nodes",
            h.rows(),
            graph.num_nodes()
        )));
    }
    let d_v = h.cols();
    let d_e = graph.edge_dim();
    let width = d_v + d_e;
    let m = graph.num_edges();
    let mut out = Mat::zeros(m, width);
    let mut aggregation_level = false;
    let mut uncovered = Vec::new();

    match spec {
        GdpSpec::NodeSingle { z } => {
            if z.len() != d_v {
                return Err(Error::shape(format!(
                    "prompt vector length {} for feature width {d_v}",
                    z.len()
                )));
            }
            for (i, (_, _)) in graph.edges().enumerate() {
                let a = match mutant {
                    TranslatorMutant::None => graph.edge_weights()[i],
                    TranslatorMutant::DropMask => 1.0,
                };
                let row = out.row_mut(i);
                for (j, zj) in z.iter().enumerate() {
                    row[j] = a * zj;
                }
            }
        }
        GdpSpec::NodeMulti { z, tau } => {
            let alpha = assignment(h, z, *tau)?;
            let z_per_node = alpha.matmul(z)?; // N x d_V
            for (i, (src, _)) in graph.edges().enumerate() {
                let a = match mutant {
                    TranslatorMutant::None => graph.edge_weights()[i],
                    TranslatorMutant::DropMask => 1.0,
                };
                let row = out.row_mut(i);
                for (j, &zj) in z_per_node.row(src).iter().enumerate() {
                    row[j] = a * zj;
                }
            }
        }
        GdpSpec::EdgeSingle { f } => {
            require_edge_dim(d_e)?;
            if f.len() != d_e {
                return Err(Error::shape(format!(
                    "prompt vector length {} for edge width {d_e}",
                    f.len()
                )));
            }
            for i in 0..m {
                let a = graph.edge_weights()[i];
                let row = out.row_mut(i);
                for (j, fj) in f.iter().enumerate() {
                    row[d_v + j] = a * fj;
                }
            }
        }
        GdpSpec::EdgeMulti { f, tau } => {
            require_edge_dim(d_e)?;
            let alpha = assignment(graph.edge_feat(), f, *tau)?;
            let f_per_edge = alpha.matmul(f)?; // |E| x d_E
            for i in 0..m {
                let a = graph.edge_weights()[i];
                let row = out.row_mut(i);
                for (j, &fj) in f_per_edge.row(i).iter().enumerate() {
                    row[d_v + j] = a * fj;
                }
            }
        }
        GdpSpec::EdgeWeightAdd { s_edges } => {
            check_len(s_edges.len(), m)?;
            for (i, (src, _)) in graph.edges().enumerate() {
                let s = s_edges[i];
                fill_scaled_message(out.row_mut(i), s, h.row(src), graph.edge_feat().row(i));
            }
        }
        GdpSpec::EdgeWeightMul { s_edges } => {
            check_len(s_edges.len(), m)?;
            for (i, (src, _)) in graph.edges().enumerate() {
                let a = graph.edge_weights()[i];
                // (A~ - A) with A~ = A * S.
                let coeff = a * s_edges[i] - a;
                fill_scaled_message(out.row_mut(i), coeff, h.row(src), graph.edge_feat().row(i));
            }
        }
        GdpSpec::Subgraph { hp, cross } => {
            aggregation_level = true;
            if hp.cols() != d_v && hp.rows() > 0 {
                return Err(Error::shape(format!(
                    "prompt node features have width {} for feature width {d_v}",
                    hp.cols()
                )));
            }
            // Per-node subgraph contribution sum_k w_vk [Hp_k || feat_vk].
            let mut contrib = Mat::zeros(graph.num_nodes(), width);
            let mut touched = vec![false; graph.num_nodes()];
            for (i, link) in cross.iter().enumerate() {
                if link.node >= graph.num_nodes() || link.prompt >= hp.rows() {
                    return Err(Error::param(format!("cross link {i} out of range")));
                }
                if link.feat.len() != d_e {
                    return Err(Error::shape(format!(
                        "cross link {i} carries {} feature entries for edge width {d_e}",
                        link.feat.len()
                    )));
                }
                touched[link.node] = true;
                let row = contrib.row_mut(link.node);
                for j in 0..d_v {
                    row[j] += link.weight * hp.at(link.prompt, j);
                }
                for j in 0..d_e {
                    row[d_v + j] += link.weight * link.feat[j];
                }
            }
            let in_deg = graph.in_degrees();
            for v in 0..graph.num_nodes() {
                if touched[v] && in_deg[v] == 0 {
                    // No incoming edge can carry the contribution.
                    uncovered.push(v);
                }
            }
            // Each incoming edge of v carries contrib_v / |N_v|.
            for (i, (_, dst)) in graph.edges().enumerate() {
                if in_deg[dst] == 0 {
                    continue;
                }
                let inv = 1.0 / in_deg[dst] as f64;
                let row = out.row_mut(i);
                for j in 0..width {
                    row[j] = inv * contrib.at(dst, j);
                }
            }
        }
        GdpSpec::Hybrid { z, tau, s_edges } => {
            check_len(s_edges.len(), m)?;
            let alpha = assignment(h, z, *tau)?;
            let z_per_node = alpha.matmul(z)?;
            for (i, (src, _)) in graph.edges().enumerate() {
                let a = graph.edge_weights()[i];
                let s = s_edges[i];
                // A ((S - 1) [H_u || E] + S [Z_u || 0])
                let row = out.row_mut(i);
                for (j, &hj) in h.row(src).iter().enumerate() {
                    row[j] = a * ((s - 1.0) * hj + s * z_per_node.at(src, j));
                }
                for (j, &ej) in graph.edge_feat().row(i).iter().enumerate() {
                    row[d_v + j] = a * (s - 1.0) * ej;
                }
            }
        }
    }

    Ok(Translation {
        prompt: MessagePrompt {
            mat: out,
            aggregation_level,
        },
        uncovered_nodes: uncovered,
    })
}

fn require_edge_dim(d_e: usize) -> Result<()> {
    if d_e == 0 {
        return Err(Error::Unsupported(
            "edge feature prompt on a graph without edge features".to_string(),
        ));
    }
    Ok(())
}

fn check_len(got: usize, edges: usize) -> Result<()> {
    if got != edges {
        return Err(Error::shape(format!(
            "edge weight prompt has {got} entries for {edges} edges"
        )));
    }
    Ok(())
}

fn fill_scaled_message(row: &mut [f64], coeff: f64, h_u: &[f64], e_i: &[f64]) {
    let d_v = h_u.len();
    for (j, &hj) in h_u.iter().enumerate() {
        row[j] = coeff * hj;
    }
    for (j, &ej) in e_i.iter().enumerate() {
        row[d_v + j] = coeff * ej;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::Rng;
    use crate::graph::sbm_generate;
    use crate::message::{build_messages, MessageFn};
    use crate::prompt::CrossLink;

    fn random_messages(seed: u64, edges: usize, width: usize) -> MessageMatrix {
        let mut rng = Rng::new(seed);
        MessageMatrix {
            mat: Mat::randn(&mut rng, edges, width, 1.0),
            node_span: width,
            edge_span: 0,
        }
    }

    #[test]
    fn zero_prompt_leaves_messages_unchanged() {
        let m = random_messages(1, 6, 4);
        let p = MessagePrompt::zeros(6, 4);
        assert_eq!(apply_gmp(&m, &p).unwrap().mat, m.mat);
    }

    #[test]
    fn zero_messages_return_prompt() {
        let p = MessagePrompt {
            mat: Mat::randn(&mut Rng::new(2), 5, 3, 1.0),
            aggregation_level: false,
        };
        let m = MessageMatrix {
            mat: Mat::zeros(5, 3),
            node_span: 3,
            edge_span: 0,
        };
        assert_eq!(apply_gmp(&m, &p).unwrap().mat, p.mat);
    }

    #[test]
    fn apply_matches_elementwise_loop() {
        let m = random_messages(3, 7, 5);
        let p = MessagePrompt {
            mat: Mat::randn(&mut Rng::new(4), 7, 5, 1.0),
            aggregation_level: false,
        };
        let got = apply_gmp(&m, &p).unwrap();
        for i in 0..7 {
            for j in 0..5 {
                assert_eq!(got.mat.at(i, j), m.mat.at(i, j) + p.mat.at(i, j));
            }
        }
        assert_eq!(got.node_span, m.node_span);
        assert_eq!(got.edge_span, m.edge_span);
    }

    #[test]
    fn apply_rejects_shape_mismatch() {
        let m = random_messages(5, 4, 3);
        let p = MessagePrompt::zeros(4, 2);
        assert!(apply_gmp(&m, &p).is_err());
    }

    #[test]
    fn lr_expand_zero_factor() {
        let p = LowRankPrompt::new(Mat::zeros(4, 2), Mat::randn(&mut Rng::new(1), 3, 2, 1.0))
            .unwrap();
        assert!(lr_expand(&p).mat.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn lr_expand_hand_outer_product() {
        let p = LowRankPrompt::new(
            Mat::from_rows(&[vec![1.0], vec![2.0]]).unwrap(),
            Mat::from_rows(&[vec![3.0], vec![4.0]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            lr_expand(&p).mat.to_rows(),
            vec![vec![3.0, 4.0], vec![6.0, 8.0]]
        );
    }

    #[test]
    fn lr_expand_rank_bounded() {
        let mut rng = Rng::new(6);
        let p = LowRankPrompt::new(
            Mat::randn(&mut rng, 8, 3, 1.0),
            Mat::randn(&mut rng, 5, 3, 1.0),
        )
        .unwrap();
        assert!(lr_expand(&p).mat.numerical_rank(1e-8).unwrap() <= 3);
    }

    #[test]
    fn lr_prompt_rejects_mismatched_ranks() {
        assert!(LowRankPrompt::new(Mat::zeros(4, 2), Mat::zeros(3, 3)).is_err());
        assert!(LowRankPrompt::new(Mat::zeros(4, 0), Mat::zeros(3, 0)).is_err());
    }

    #[test]
    fn conditional_zero_projection_gives_zero_prompt() {
        let m = random_messages(7, 6, 4);
        let c = ConditionalPrompt::new(Mat::zeros(4, 2), Mat::randn(&mut Rng::new(8), 4, 2, 1.0))
            .unwrap();
        let u = conditional_u(&m, &c).unwrap();
        assert!(u.data().iter().all(|&x| x == 0.0));
        let p = conditional_expand(&m, &c).unwrap();
        assert!(p.mat.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn conditional_identity_rows_select_projection_rows() {
        // Message rows e_0 and e_2 pick out rows 0 and 2 of W.
        let m = MessageMatrix {
            mat: Mat::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap(),
            node_span: 3,
            edge_span: 0,
        };
        let w = Mat::from_rows(&[vec![0.5, -1.0], vec![2.0, 3.0], vec![7.0, 0.25]]).unwrap();
        let c = ConditionalPrompt::new(w.clone(), Mat::zeros(3, 2)).unwrap();
        let u = conditional_u(&m, &c).unwrap();
        assert_eq!(u.row(0), w.row(0));
        assert_eq!(u.row(1), w.row(2));
    }

    #[test]
    fn conditional_matches_matmul_oracle() {
        let m = random_messages(9, 8, 5);
        let mut rng = Rng::new(10);
        let c = ConditionalPrompt::new(
            Mat::randn(&mut rng, 5, 3, 1.0),
            Mat::randn(&mut rng, 5, 3, 1.0),
        )
        .unwrap();
        let u = conditional_u(&m, &c).unwrap();
        let want = m.mat.matmul(&c.w).unwrap();
        assert!(u.max_abs_diff(&want) < 1e-15);
    }

    fn weighted_graph(seed: u64, d_e: usize) -> Graph {
        let mut rng = Rng::new(seed);
        let g = sbm_generate(&mut rng, &[4, 4], 0.6, 0.3, 2, 0.4).unwrap();
        let mut weights = vec![0.0; g.num_edges()];
        let mut feats = Mat::zeros(g.num_edges(), d_e);
        for (i, (u, v)) in g.edges().enumerate() {
            if u <= v {
                weights[i] = rng.uniform_in(0.5, 2.0);
                for j in 0..d_e {
                    feats.set(i, j, rng.normal());
                }
            }
        }
        let pairs: Vec<(usize, usize)> = g.edges().collect();
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if u > v {
                let j = g.edge_index(v, u).unwrap();
                weights[i] = weights[j];
                let row: Vec<f64> = feats.row(j).to_vec();
                feats.row_mut(i).copy_from_slice(&row);
            }
        }
        g.with_edge_weights(weights)
            .unwrap()
            .with_edge_feat(feats)
            .unwrap()
    }

    #[test]
    fn node_single_translation_row() {
        // Edge (1 <- 0) with weight 1, d_V = 2, d_E = 1: row is [z || 0].
        let g = Graph::from_edge_list(
            2,
            &[(0, 1)],
            Mat::from_rows(&[vec![9.0, 9.0], vec![0.0, 0.0]]).unwrap(),
            Some(Mat::from_rows(&[vec![5.0]]).unwrap()),
            Some(vec![1.0]),
            true,
        )
        .unwrap();
        let t = gdp_to_gmp(&g, g.node_feat(), &GdpSpec::NodeSingle { z: vec![0.25, -3.0] })
            .unwrap();
        assert_eq!(t.prompt.mat.row(0), &[0.25, -3.0, 0.0]);
        assert!(!t.prompt.aggregation_level);
        assert!(t.uncovered_nodes.is_empty());
    }

    #[test]
    fn mul_with_unit_scaling_translates_to_zero_prompt() {
        let g = weighted_graph(11, 1);
        let t = gdp_to_gmp(
            &g,
            g.node_feat(),
            &GdpSpec::EdgeWeightMul { s_edges: vec![1.0; g.num_edges()] },
        )
        .unwrap();
        assert!(t.prompt.mat.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn hybrid_hand_substitution() {
        // Zero Z and S = 2 on an edge with weight 1, H_u = [1, 0], E = [3]:
        // row is (2 - 1) * [1, 0, 3].
        let g = Graph::from_edge_list(
            2,
            &[(0, 1)],
            Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(),
            Some(Mat::from_rows(&[vec![3.0]]).unwrap()),
            Some(vec![1.0]),
            true,
        )
        .unwrap();
        let t = gdp_to_gmp(
            &g,
            g.node_feat(),
            &GdpSpec::Hybrid {
                z: Mat::zeros(2, 2),
                tau: 1.0,
                s_edges: vec![2.0],
            },
        )
        .unwrap();
        assert_eq!(t.prompt.mat.row(0), &[1.0, 0.0, 3.0]);
    }

    #[test]
    fn identity_parameter_specs_translate_to_zero() {
        let g = weighted_graph(12, 2);
        let m = g.num_edges();
        let specs = vec![
            GdpSpec::NodeSingle { z: vec![0.0, 0.0] },
            GdpSpec::NodeMulti { z: Mat::zeros(3, 2), tau: 1.0 },
            GdpSpec::EdgeSingle { f: vec![0.0, 0.0] },
            GdpSpec::EdgeMulti { f: Mat::zeros(2, 2), tau: 1.0 },
            GdpSpec::EdgeWeightAdd { s_edges: vec![0.0; m] },
            GdpSpec::EdgeWeightMul { s_edges: vec![1.0; m] },
            GdpSpec::Subgraph { hp: Mat::zeros(0, 2), cross: vec![] },
            GdpSpec::Hybrid { z: Mat::zeros(3, 2), tau: 1.0, s_edges: vec![1.0; m] },
        ];
        for spec in specs {
            let t = gdp_to_gmp(&g, g.node_feat(), &spec).unwrap();
            let zero = t.prompt.mat.data().iter().all(|&x| x == 0.0);
            assert!(zero, "family {} not zero", spec.kind_name());
        }
    }

    #[test]
    fn subgraph_translation_spreads_contribution_over_in_edges() {
        let g = weighted_graph(13, 1);
        let hp = Mat::from_rows(&[vec![2.0, -1.0]]).unwrap();
        let cross = vec![CrossLink { node: 1, prompt: 0, weight: 0.5, feat: vec![0.7] }];
        let t = gdp_to_gmp(&g, g.node_feat(), &GdpSpec::Subgraph { hp, cross }).unwrap();
        assert!(t.prompt.aggregation_level);
        let n_in = g.in_degrees()[1] as f64;
        for (i, (_, dst)) in g.edges().enumerate() {
            if dst == 1 {
                assert!((t.prompt.mat.at(i, 0) - 0.5 * 2.0 / n_in).abs() < 1e-12);
                assert!((t.prompt.mat.at(i, 1) + 0.5 / n_in).abs() < 1e-12);
                assert!((t.prompt.mat.at(i, 2) - 0.5 * 0.7 / n_in).abs() < 1e-12);
            } else {
                assert!(t.prompt.mat.row(i).iter().all(|&x| x == 0.0));
            }
        }
    }

    #[test]
    fn subgraph_flags_isolated_cross_linked_nodes() {
        // Node 2 has no incoming edges; a cross link into it cannot be
        // carried by any message row.
        let g = Graph::from_edge_list(
            3,
            &[(0, 1)],
            Mat::zeros(3, 1),
            None,
            None,
            true,
        )
        .unwrap();
        let spec = GdpSpec::Subgraph {
            hp: Mat::from_rows(&[vec![1.0]]).unwrap(),
            cross: vec![CrossLink { node: 2, prompt: 0, weight: 1.0, feat: vec![] }],
        };
        let t = gdp_to_gmp(&g, g.node_feat(), &spec).unwrap();
        assert_eq!(t.uncovered_nodes, vec![2]);
    }

    #[test]
    fn edge_spec_without_edge_features_unsupported() {
        let mut rng = Rng::new(14);
        let g = sbm_generate(&mut rng, &[3, 3], 0.5, 0.2, 2, 0.0).unwrap();
        let err = gdp_to_gmp(&g, g.node_feat(), &GdpSpec::EdgeSingle { f: vec![1.0] });
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn drop_mask_mutant_changes_weighted_translation() {
        let g = weighted_graph(15, 1);
        let spec = GdpSpec::NodeSingle { z: vec![1.0, -1.0] };
        let honest = gdp_to_gmp(&g, g.node_feat(), &spec).unwrap();
        let mutant =
            gdp_to_gmp_with(&g, g.node_feat(), &spec, TranslatorMutant::DropMask).unwrap();
        assert!(honest.prompt.mat.max_abs_diff(&mutant.prompt.mat) > 1e-3);
    }

    #[test]
    fn translations_align_with_message_matrix_shape() {
        let g = weighted_graph(16, 2);
        let m = build_messages(&g, g.node_feat(), &MessageFn::ConcatMpnn).unwrap();
        let t = gdp_to_gmp(&g, g.node_feat(), &GdpSpec::NodeSingle { z: vec![1.0, 2.0] })
            .unwrap();
        assert_eq!(t.prompt.mat.rows(), m.mat.rows());
        assert_eq!(t.prompt.mat.cols(), m.mat.cols());
        assert!(apply_gmp(&m, &t.prompt).is_ok());
    }
}
