//! Per-edge message construction and aggregation.
//!
//! A message matrix stacks one row per directed edge in canonical order, with
//! uniform width d_V + d_E regardless of message function: blocks a function
//! does not use are zero-filled, so one prompt shape serves every function.

use crate::dense::Mat;
use crate::graph::{symmetric_normalize, Graph};
use crate::{Error, Result};

/// |E| x (node_span + edge_span) message rows aligned to canonical edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageMatrix {
    pub mat: Mat,
    pub node_span: usize,
    pub edge_span: usize,
}

impl MessageMatrix {
    pub fn width(&self) -> usize {
        self.node_span + self.edge_span
    }
}

/// Message function selecting how the row for edge (v <- u) is built.
#[derive(Debug, Clone)]
pub enum MessageFn {
    /// A_vu * [H_u || E_vu]
    ConcatMpnn,
    /// [A_vu / sqrt(deg v * deg u) * H_u || 0]; with `add_self_loops` the
    /// graph is augmented first and rows align to the augmented graph (see
    /// [`Graph::with_self_loops`]).
    GcnNorm { add_self_loops: bool },
    /// [alpha_vu * H_u || 0] with attention over incoming neighbors.
    Attention { w: Mat, a: Vec<f64>, slope: f64 },
}

/// Builds the message matrix for `graph` using node states `h` (h may differ
/// from graph.node_feat() inside multi-layer forward passes).
pub fn build_messages(graph: &Graph, h: &Mat, f: &MessageFn) -> Result<MessageMatrix> {
    if h.rows() != graph.num_nodes() {
        return Err(Error::shape(format!(
            "node states have {} rows for {} nodes",
            h.rows(),
            graph.num_nodes()
        )));
    }
    let d_v = h.cols();
    let d_e = graph.edge_dim();

    match f {
        MessageFn::ConcatMpnn => {
            let mut mat = Mat::zeros(graph.num_edges(), d_v + d_e);
            for (i, (src, _)) in graph.edges().enumerate() {
                let a = graph.edge_weights()[i];
                let row = mat.row_mut(i);
                for (j, &x) in h.row(src).iter().enumerate() {
                    row[j] = a * x;
                }
                for (j, &x) in graph.edge_feat().row(i).iter().enumerate() {
                    row[d_v + j] = a * x;
                }
            }
            Ok(MessageMatrix {
                mat,
                node_span: d_v,
                edge_span: d_e,
            })
        }
        MessageFn::GcnNorm { add_self_loops } => {
            let (g, norm) = symmetric_normalize(graph, *add_self_loops)?;
            let mut mat = Mat::zeros(g.num_edges(), d_v + d_e);
            for (i, (src, _)) in g.edges().enumerate() {
                let row = mat.row_mut(i);
                for (j, &x) in h.row(src).iter().enumerate() {
                    row[j] = norm[i] * x;
                }
            }
            Ok(MessageMatrix {
                mat,
                node_span: d_v,
                edge_span: d_e,
            })
        }
        MessageFn::Attention { w, a, slope } => {
            let alpha = attention_coefficients(graph, h, w, a, *slope)?;
            let mut mat = Mat::zeros(graph.num_edges(), d_v + d_e);
            for (i, (src, _)) in graph.edges().enumerate() {
                let row = mat.row_mut(i);
                for (j, &x) in h.row(src).iter().enumerate() {
                    row[j] = alpha[i] * x;
                }
            }
            Ok(MessageMatrix {
                mat,
                node_span: d_v,
                edge_span: d_e,
            })
        }
    }
}

/// Aggregation mode for incoming messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggMode {
    Sum,
    Mean,
}

/// Per-node reduction of incoming message rows (row v = reduction over edges
/// with destination v, in canonical order). Nodes without incoming edges get
/// a zero row. The self term H_v is not added here.
pub fn aggregate(graph: &Graph, m: &MessageMatrix, mode: AggMode) -> Result<Mat> {
    if m.mat.rows() != graph.num_edges() {
        return Err(Error::shape(format!(
            "message matrix has {} rows for {} edges",
            m.mat.rows(),
            graph.num_edges()
        )));
    }
    let width = m.width();
    let mut out = Mat::zeros(graph.num_nodes(), width);
    for (i, (_, dst)) in graph.edges().enumerate() {
        let row = m.mat.row(i);
        let acc = out.row_mut(dst);
        for j in 0..width {
            acc[j] += row[j];
        }
    }
    if mode == AggMode::Mean {
        let deg = graph.in_degrees();
        for v in 0..graph.num_nodes() {
            if deg[v] > 0 {
                let inv = 1.0 / deg[v] as f64;
                for x in out.row_mut(v) {
                    *x *= inv;
                }
            }
        }
    }
    Ok(out)
}

/// Attention coefficients per edge: for each destination v the coefficients
/// over incoming edges form a softmax of LeakyReLU(a^T [W H_v || W H_u]).
/// Nodes without incoming edges emit no coefficients.
pub fn attention_coefficients(
    graph: &Graph,
    h: &Mat,
    w: &Mat,
    a: &[f64],
    slope: f64,
) -> Result<Vec<f64>> {
    if h.rows() != graph.num_nodes() {
        return Err(Error::shape(format!(
            "node states have {} rows for {} nodes",
            h.rows(),
            graph.num_nodes()
        )));
    }
    if w.rows() != h.cols() {
        return Err(Error::shape(format!(
            "attention projection has {} rows for state width {}",
            w.rows(),
            h.cols()
        )));
    }
    if a.len() != 2 * w.cols() {
        return Err(Error::shape(format!(
            "attention vector length {} but projection width {} needs {}",
            a.len(),
            w.cols(),
            2 * w.cols()
        )));
    }
    let proj = h.matmul(w)?; // N x d_h
    let d_h = w.cols();

    // Raw scores in canonical edge order.
    let mut score = vec![0.0; graph.num_edges()];
    for (i, (src, dst)) in graph.edges().enumerate() {
        let mut s = 0.0;
        for k in 0..d_h {
            s += a[k] * proj.at(dst, k);
            s += a[d_h + k] * proj.at(src, k);
        }
        score[i] = if s > 0.0 { s } else { slope * s };
    }

    // Group edge ids by destination for the per-destination softmax.
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); graph.num_nodes()];
    for (i, (_, dst)) in graph.edges().enumerate() {
        incoming[dst].push(i);
    }
    let mut alpha = vec![0.0; graph.num_edges()];
    for ids in &incoming {
        if ids.is_empty() {
            continue;
        }
        let max = ids.iter().map(|&i| score[i]).fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for &i in ids {
            let e = (score[i] - max).exp();
            alpha[i] = e;
            sum += e;
        }
        for &i in ids {
            alpha[i] /= sum;
        }
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::Rng;
    use crate::graph::sbm_generate;

    fn two_node_graph(weight: f64) -> Graph {
        // Single directed edge 0 -> 1 carrying one edge feature.
        Graph::from_edge_list(
            2,
            &[(0, 1)],
            Mat::from_rows(&[vec![2.0, 3.0], vec![0.0, 0.0]]).unwrap(),
            Some(Mat::from_rows(&[vec![5.0]]).unwrap()),
            Some(vec![weight]),
            true,
        )
        .unwrap()
    }

    #[test]
    fn concat_row_substitution() {
        let g = two_node_graph(1.0);
        let m = build_messages(&g, g.node_feat(), &MessageFn::ConcatMpnn).unwrap();
        assert_eq!(m.mat.row(0), &[2.0, 3.0, 5.0]);
        assert_eq!(m.node_span, 2);
        assert_eq!(m.edge_span, 1);
    }

    #[test]
    fn zero_weight_gives_zero_row() {
        let g = two_node_graph(0.0);
        let m = build_messages(&g, g.node_feat(), &MessageFn::ConcatMpnn).unwrap();
        assert_eq!(m.mat.row(0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn gcn_row_on_path() {
        // Path 0-1-2, no self-loops, one-hot states: row for (1 <- 0) is
        // [H_0 / sqrt(1*2) || 0] with zero-padded edge block.
        let g = Graph::from_undirected_pairs(
            3,
            &[(0, 1), (1, 2)],
            Mat::identity(3),
            Some(Mat::zeros(2, 1)),
            None,
        )
        .unwrap();
        let m = build_messages(
            &g,
            g.node_feat(),
            &MessageFn::GcnNorm { add_self_loops: false },
        )
        .unwrap();
        let i = g.edge_index(0, 1).unwrap();
        let want = 1.0 / 2.0_f64.sqrt();
        assert!((m.mat.at(i, 0) - want).abs() < 1e-12);
        assert_eq!(m.mat.at(i, 1), 0.0);
        assert_eq!(m.mat.at(i, 3), 0.0); // edge block stays zero
        assert_eq!(m.width(), 4);
    }

    #[test]
    fn aggregate_single_edge() {
        let g = two_node_graph(1.0);
        let m = build_messages(&g, g.node_feat(), &MessageFn::ConcatMpnn).unwrap();
        let agg = aggregate(&g, &m, AggMode::Sum).unwrap();
        assert_eq!(agg.row(1), m.mat.row(0));
        assert_eq!(agg.row(0), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn aggregate_sum_and_mean_of_parallel_messages() {
        // Two edges into node 0 delivering [1,0] and [0,1].
        let g = Graph::from_edge_list(
            3,
            &[(1, 0), (2, 0)],
            Mat::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            None,
            None,
            true,
        )
        .unwrap();
        let m = build_messages(&g, g.node_feat(), &MessageFn::ConcatMpnn).unwrap();
        let sum = aggregate(&g, &m, AggMode::Sum).unwrap();
        assert_eq!(sum.row(0), &[1.0, 1.0]);
        let mean = aggregate(&g, &m, AggMode::Mean).unwrap();
        assert_eq!(mean.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn aggregate_matches_scatter_loop_oracle() {
        let mut rng = Rng::new(21);
        let g = sbm_generate(&mut rng, &[5, 6], 0.5, 0.2, 3, 0.3).unwrap();
        let h = Mat::randn(&mut rng, g.num_nodes(), 3, 1.0);
        let m = build_messages(&g, &h, &MessageFn::ConcatMpnn).unwrap();
        let got = aggregate(&g, &m, AggMode::Sum).unwrap();

        let mut want = Mat::zeros(g.num_nodes(), m.width());
        for (i, (_, dst)) in g.edges().enumerate() {
            for j in 0..m.width() {
                let v = want.at(dst, j) + m.mat.at(i, j);
                want.set(dst, j, v);
            }
        }
        assert_eq!(got, want); // canonical order makes sums bit-identical
    }

    #[test]
    fn sum_aggregation_is_linear() {
        let mut rng = Rng::new(4);
        let g = sbm_generate(&mut rng, &[4, 4], 0.6, 0.3, 2, 0.0).unwrap();
        let h1 = Mat::randn(&mut rng, g.num_nodes(), 2, 1.0);
        let h2 = Mat::randn(&mut rng, g.num_nodes(), 2, 1.0);
        let m1 = build_messages(&g, &h1, &MessageFn::ConcatMpnn).unwrap();
        let m2 = build_messages(&g, &h2, &MessageFn::ConcatMpnn).unwrap();
        let msum = MessageMatrix {
            mat: m1.mat.add(&m2.mat).unwrap(),
            node_span: m1.node_span,
            edge_span: m1.edge_span,
        };
        let lhs = aggregate(&g, &msum, AggMode::Sum).unwrap();
        let rhs = aggregate(&g, &m1, AggMode::Sum)
            .unwrap()
            .add(&aggregate(&g, &m2, AggMode::Sum).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn zero_states_give_zero_concat_messages() {
        let g = Graph::from_undirected_pairs(3, &[(0, 1), (1, 2)], Mat::zeros(3, 2), None, None)
            .unwrap();
        let m = build_messages(&g, g.node_feat(), &MessageFn::ConcatMpnn).unwrap();
        assert!(m.mat.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn attention_single_incoming_edge_is_one() {
        let g = two_node_graph(1.0);
        let w = Mat::identity(2);
        let alpha = attention_coefficients(&g, g.node_feat(), &w, &[0.3, -0.2, 0.1, 0.4], 0.2)
            .unwrap();
        assert!((alpha[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn attention_symmetric_neighbors_split_evenly() {
        // Nodes 1 and 2 share identical features and both point at node 0.
        let g = Graph::from_edge_list(
            3,
            &[(1, 0), (2, 0)],
            Mat::from_rows(&[vec![0.5, 0.5], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap(),
            None,
            None,
            true,
        )
        .unwrap();
        let w = Mat::identity(2);
        let alpha =
            attention_coefficients(&g, g.node_feat(), &w, &[0.3, -0.2, 0.1, 0.4], 0.2).unwrap();
        assert!((alpha[0] - 0.5).abs() < 1e-12);
        assert!((alpha[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn attention_sums_to_one_per_destination() {
        let mut rng = Rng::new(17);
        let g = sbm_generate(&mut rng, &[6, 6], 0.5, 0.2, 3, 0.0).unwrap();
        let h = Mat::randn(&mut rng, g.num_nodes(), 3, 1.0);
        let w = Mat::randn(&mut rng, 3, 2, 0.7);
        let a: Vec<f64> = (0..4).map(|_| rng.normal()).collect();
        let alpha = attention_coefficients(&g, &h, &w, &a, 0.2).unwrap();
        let mut sums = vec![0.0; g.num_nodes()];
        for (i, (_, dst)) in g.edges().enumerate() {
            sums[dst] += alpha[i];
        }
        for (v, s) in sums.iter().enumerate() {
            if g.in_degrees()[v] > 0 {
                assert!((s - 1.0).abs() < 1e-12, "node {v} sum {s}");
            } else {
                assert_eq!(*s, 0.0);
            }
        }
    }

    #[test]
    fn attention_messages_use_coefficients() {
        let mut rng = Rng::new(30);
        let g = sbm_generate(&mut rng, &[4, 4], 0.6, 0.2, 2, 0.0).unwrap();
        let h = Mat::randn(&mut rng, g.num_nodes(), 2, 1.0);
        let w = Mat::randn(&mut rng, 2, 2, 0.5);
        let a: Vec<f64> = (0..4).map(|_| rng.normal()).collect();
        let alpha = attention_coefficients(&g, &h, &w, &a, 0.2).unwrap();
        let m = build_messages(
            &g,
            &h,
            &MessageFn::Attention { w, a, slope: 0.2 },
        )
        .unwrap();
        for (i, (src, _)) in g.edges().enumerate() {
            for j in 0..2 {
                assert!((m.mat.at(i, j) - alpha[i] * h.at(src, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uniform_width_across_message_functions() {
        let mut rng = Rng::new(2);
        let g = sbm_generate(&mut rng, &[4, 4], 0.5, 0.2, 3, 0.0).unwrap();
        // Attach 2-dim edge features so padding is observable.
        let ef = Mat::zeros(g.num_edges(), 2);
        let g = g.with_edge_feat(ef).unwrap();
        let h = Mat::randn(&mut rng, g.num_nodes(), 3, 1.0);
        let w = Mat::randn(&mut rng, 3, 2, 0.5);
        let a: Vec<f64> = (0..4).map(|_| rng.normal()).collect();

        let concat = build_messages(&g, &h, &MessageFn::ConcatMpnn).unwrap();
        let gcn = build_messages(&g, &h, &MessageFn::GcnNorm { add_self_loops: false }).unwrap();
        let att = build_messages(&g, &h, &MessageFn::Attention { w, a, slope: 0.2 }).unwrap();
        assert_eq!(concat.width(), 5);
        assert_eq!(gcn.width(), 5);
        assert_eq!(att.width(), 5);
        // GCN/attention edge blocks are zero-filled.
        for i in 0..g.num_edges() {
            assert_eq!(&gcn.mat.row(i)[3..], &[0.0, 0.0]);
            assert_eq!(&att.mat.row(i)[3..], &[0.0, 0.0]);
        }
    }
}
