//! Graph attention forward pass and 5-way causal edge classification.
//!
//! Inference only: weights come from seeded initialization or a weight
//! file. Three attention layers with four heads each; the first two
//! concatenate head outputs, the last averages them. Messages flow
//! along edge direction (a node attends over its in-neighbors plus
//! itself — self-loops are always present so isolated nodes stay
//! defined).
//!
//! Predictions from this module are advisory: trace-derived causal
//! triples take precedence when the two disagree.

mod weights;

pub use weights::{
    GnnWeights, HeadWeights, LayerWeights, Matrix, HIDDEN_DIM, INPUT_DIM, NODE_DIM, NUM_HEADS,
    NUM_LAYERS, NUM_RELATIONS, OUTPUT_DIM,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::causal::Relation;
use crate::embedding::EmbeddingVector;

#[derive(Debug, Error)]
pub enum GnnError {
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("edge references unknown node {0}")]
    UnknownNode(String),
    #[error("shape mismatch in {what}")]
    ShapeMismatch { what: String },
    #[error("weight file error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct TaskNode {
    pub id: String,
    pub text: String,
    pub embedding: EmbeddingVector,
}

/// Directed task graph over embedded text nodes.
#[derive(Debug, Clone, Default)]
pub struct TaskGraph {
    nodes: Vec<TaskNode>,
    edges: Vec<(usize, usize)>,
}

impl TaskGraph {
    pub fn new() -> Self {
        TaskGraph::default()
    }

    pub fn add_node(
        &mut self,
        id: impl Into<String>,
        text: impl Into<String>,
        embedding: EmbeddingVector,
    ) -> Result<usize, GnnError> {
        let id = id.into();
        if self.index_of(&id).is_some() {
            return Err(GnnError::DuplicateNode(id));
        }
        self.nodes.push(TaskNode { id, text: text.into(), embedding });
        Ok(self.nodes.len() - 1)
    }

    pub fn add_edge(&mut self, src: &str, dst: &str) -> Result<(), GnnError> {
        let s = self.index_of(src).ok_or_else(|| GnnError::UnknownNode(src.to_string()))?;
        let d = self.index_of(dst).ok_or_else(|| GnnError::UnknownNode(dst.to_string()))?;
        self.edges.push((s, d));
        Ok(())
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn nodes(&self) -> &[TaskNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// In-neighbors plus the mandatory self-loop, deduplicated.
    fn neighborhood(&self, node: usize) -> Vec<usize> {
        let mut n: Vec<usize> =
            self.edges.iter().filter(|(_, d)| *d == node).map(|(s, _)| *s).collect();
        n.push(node);
        n.sort_unstable();
        n.dedup();
        n
    }
}

/// Attention row for one (layer, head, node): `(neighbor, weight)`
/// pairs, weights summing to 1 over the neighborhood.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttentionRecord {
    pub layer: usize,
    pub head: usize,
    pub node: usize,
    pub weights: Vec<(usize, f32)>,
}

/// Edge classification result over the five causal relation kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationPrediction {
    pub relation: Relation,
    pub confidence: f32,
    pub distribution: [f32; NUM_RELATIONS],
}

fn relu(x: f32) -> f32 {
    x.max(0.0)
}

fn elu(x: f32) -> f32 {
    if x > 0.0 {
        x
    } else {
        x.exp() - 1.0
    }
}

fn leaky_relu(x: f32) -> f32 {
    if x > 0.0 {
        x
    } else {
        0.2 * x
    }
}

/// h_i^(0) = ReLU(W_input · embed(text_i) + b_input).
pub fn node_init(graph: &TaskGraph, weights: &GnnWeights) -> Result<Vec<Vec<f32>>, GnnError> {
    weights.validate()?;
    let mut features = Vec::with_capacity(graph.nodes.len());
    for node in &graph.nodes {
        let input: Vec<f32> =
            node.embedding.components().iter().map(|c| *c as f32).collect();
        let mut h = weights.w_input.matvec(&input);
        for (v, b) in h.iter_mut().zip(&weights.b_input) {
            *v = relu(*v + *b);
        }
        features.push(h);
    }
    Ok(features)
}

/// Compares feature vectors for the canonical aggregation order. The
/// order depends only on values, never on node ids, so relabeling a
/// graph permutes outputs exactly.
fn value_order(a: &[f32], b: &[f32]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

fn layer_forward(
    graph: &TaskGraph,
    features: &[Vec<f32>],
    layer: &LayerWeights,
    layer_idx: usize,
    average: bool,
    attention_out: &mut Option<&mut Vec<AttentionRecord>>,
) -> Vec<Vec<f32>> {
    let n = features.len();
    let mut out = vec![Vec::new(); n];

    for node in 0..n {
        let mut neighborhood = graph.neighborhood(node);
        // Canonical, label-independent aggregation order.
        neighborhood.sort_by(|&a, &b| value_order(&features[a], &features[b]));

        let mut per_head: Vec<Vec<f32>> = Vec::with_capacity(layer.heads.len());
        for (head_idx, head) in layer.heads.iter().enumerate() {
            let wh: Vec<Vec<f32>> =
                neighborhood.iter().map(|&j| head.w.matvec(&features[j])).collect();
            // The aggregating node is the edge destination; neighbors are
            // message sources.
            let wh_self = head.w.matvec(&features[node]);
            let score_self: f32 =
                head.a_dst.iter().zip(&wh_self).map(|(a, v)| a * v).sum();

            let scores: Vec<f32> = wh
                .iter()
                .map(|whj| {
                    let score_nbr: f32 =
                        head.a_src.iter().zip(whj).map(|(a, v)| a * v).sum();
                    leaky_relu(score_self + score_nbr)
                })
                .collect();
            let max_score = scores.iter().fold(f32::NEG_INFINITY, |m, &s| m.max(s));
            let exps: Vec<f32> = scores.iter().map(|s| (s - max_score).exp()).collect();
            let total: f32 = exps.iter().sum();

            let mut aggregated = vec![0.0f32; HIDDEN_DIM];
            let mut row = Vec::with_capacity(neighborhood.len());
            for ((&j, whj), e) in neighborhood.iter().zip(&wh).zip(&exps) {
                let alpha = e / total;
                row.push((j, alpha));
                for (slot, v) in aggregated.iter_mut().zip(whj) {
                    *slot += alpha * v;
                }
            }
            if let Some(records) = attention_out {
                records.push(AttentionRecord {
                    layer: layer_idx,
                    head: head_idx,
                    node,
                    weights: row,
                });
            }
            if !average {
                for v in aggregated.iter_mut() {
                    *v = elu(*v);
                }
            }
            per_head.push(aggregated);
        }

        out[node] = if average {
            let mut mean = vec![0.0f32; HIDDEN_DIM];
            for head in &per_head {
                for (slot, v) in mean.iter_mut().zip(head) {
                    *slot += v;
                }
            }
            let k = per_head.len() as f32;
            for v in mean.iter_mut() {
                *v = elu(*v / k);
            }
            mean
        } else {
            per_head.concat()
        };
    }
    out
}

/// Applies a single attention layer. Layers 0 and 1 concatenate their
/// heads; the final layer averages them.
pub fn gat_layer_forward(
    graph: &TaskGraph,
    features: &[Vec<f32>],
    weights: &GnnWeights,
    layer_idx: usize,
) -> Result<Vec<Vec<f32>>, GnnError> {
    weights.validate()?;
    let Some(layer) = weights.layers.get(layer_idx) else {
        return Err(GnnError::ShapeMismatch { what: format!("layer {layer_idx}") });
    };
    let average = layer_idx == weights.layers.len() - 1;
    Ok(layer_forward(graph, features, layer, layer_idx, average, &mut None))
}

/// Three-layer GAT pass over initialized node features.
pub fn gat_forward(
    graph: &TaskGraph,
    h0: &[Vec<f32>],
    weights: &GnnWeights,
) -> Result<Vec<Vec<f32>>, GnnError> {
    Ok(gat_forward_with_attention(graph, h0, weights)?.0)
}

/// Forward pass that also reports every attention row for inspection.
pub fn gat_forward_with_attention(
    graph: &TaskGraph,
    h0: &[Vec<f32>],
    weights: &GnnWeights,
) -> Result<(Vec<Vec<f32>>, Vec<AttentionRecord>), GnnError> {
    weights.validate()?;
    if h0.len() != graph.nodes.len() {
        return Err(GnnError::ShapeMismatch { what: "node features".into() });
    }
    for h in h0 {
        if h.len() != NODE_DIM {
            return Err(GnnError::ShapeMismatch { what: "node features".into() });
        }
    }
    let mut records = Vec::new();
    let mut features = h0.to_vec();
    for (idx, layer) in weights.layers.iter().enumerate() {
        let average = idx == weights.layers.len() - 1;
        features = layer_forward(
            graph,
            &features,
            layer,
            idx,
            average,
            &mut Some(&mut records),
        );
    }
    Ok((features, records))
}

/// Softmax over 5 logits of `[h_u; h_v]`; argmax wins, ties broken by
/// enum order.
pub fn classify_edge(
    h_u: &[f32],
    h_v: &[f32],
    weights: &GnnWeights,
) -> Result<RelationPrediction, GnnError> {
    if h_u.len() != OUTPUT_DIM || h_v.len() != OUTPUT_DIM {
        return Err(GnnError::ShapeMismatch { what: "edge features".into() });
    }
    let mut pair = Vec::with_capacity(2 * OUTPUT_DIM);
    pair.extend_from_slice(h_u);
    pair.extend_from_slice(h_v);
    let mut logits = weights.w_edge.matvec(&pair);
    for (l, b) in logits.iter_mut().zip(&weights.b_edge) {
        *l += *b;
    }
    let max = logits.iter().fold(f32::NEG_INFINITY, |m, &v| m.max(v));
    let exps: Vec<f32> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f32 = exps.iter().sum();
    let mut distribution = [0.0f32; NUM_RELATIONS];
    for (slot, e) in distribution.iter_mut().zip(&exps) {
        *slot = e / total;
    }
    let mut best = 0;
    for (i, p) in distribution.iter().enumerate() {
        if *p > distribution[best] {
            best = i; // strict comparison keeps the first index on ties
        }
    }
    Ok(RelationPrediction {
        relation: Relation::ALL[best],
        confidence: distribution[best],
        distribution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{EmbeddingProvider, HashEmbedder};

    fn embed(text: &str) -> EmbeddingVector {
        HashEmbedder::default().embed(text).unwrap()
    }

    fn two_node_graph() -> TaskGraph {
        let mut g = TaskGraph::new();
        g.add_node("a", "pick up the ball", embed("pick up the ball")).unwrap();
        g.add_node("b", "move to room b", embed("move to room b")).unwrap();
        g.add_edge("a", "b").unwrap();
        g
    }

    #[test]
    fn duplicate_ids_and_dangling_edges_are_rejected() {
        let mut g = TaskGraph::new();
        g.add_node("a", "x", embed("x")).unwrap();
        assert!(matches!(g.add_node("a", "y", embed("y")), Err(GnnError::DuplicateNode(_))));
        assert!(matches!(g.add_edge("a", "zz"), Err(GnnError::UnknownNode(_))));
    }

    #[test]
    fn node_init_is_nonnegative() {
        let g = two_node_graph();
        let w = GnnWeights::seeded(1);
        let h0 = node_init(&g, &w).unwrap();
        assert_eq!(h0.len(), 2);
        assert!(h0.iter().flatten().all(|v| *v >= 0.0));
    }

    #[test]
    fn identity_projection_passes_embedding_through() {
        let mut w = GnnWeights::seeded(1);
        w.w_input = Matrix::identity(NODE_DIM, INPUT_DIM);
        w.b_input = vec![0.0; NODE_DIM];
        let mut g = TaskGraph::new();
        // Non-negative embedding so ReLU is the identity on it.
        let mut components = vec![0.0f64; crate::embedding::DIM];
        components[0] = 0.6;
        components[5] = 0.8;
        let v = EmbeddingVector::from_components(components).unwrap();
        g.add_node("a", "x", v.clone()).unwrap();
        let h0 = node_init(&g, &w).unwrap();
        for i in 0..NODE_DIM {
            assert!((h0[0][i] - v.components()[i] as f32).abs() < 1e-7);
        }
    }

    #[test]
    fn large_negative_bias_clamps_to_zero() {
        let mut w = GnnWeights::seeded(1);
        w.b_input = vec![-1e6; NODE_DIM];
        let g = two_node_graph();
        let h0 = node_init(&g, &w).unwrap();
        assert!(h0.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn attention_rows_sum_to_one() {
        let g = two_node_graph();
        let w = GnnWeights::seeded(3);
        let h0 = node_init(&g, &w).unwrap();
        let (_, records) = gat_forward_with_attention(&g, &h0, &w).unwrap();
        assert!(!records.is_empty());
        for record in &records {
            let total: f32 = record.weights.iter().map(|(_, a)| a).sum();
            assert!((total - 1.0).abs() < 1e-6);
            assert!(record.weights.iter().all(|(_, a)| *a >= 0.0));
        }
    }

    #[test]
    fn isolated_node_attends_only_to_itself() {
        let mut g = TaskGraph::new();
        g.add_node("solo", "isolated", embed("isolated")).unwrap();
        let w = GnnWeights::seeded(5);
        let h0 = node_init(&g, &w).unwrap();
        let (_, records) = gat_forward_with_attention(&g, &h0, &w).unwrap();
        for record in records {
            assert_eq!(record.weights.len(), 1);
            assert_eq!(record.weights[0].0, 0);
            assert_eq!(record.weights[0].1, 1.0);
        }
    }

    #[test]
    fn isolated_node_output_is_elu_of_wh_per_head() {
        let mut g = TaskGraph::new();
        g.add_node("solo", "isolated", embed("isolated")).unwrap();
        let w = GnnWeights::seeded(5);
        let h0 = node_init(&g, &w).unwrap();

        // Run only the first (concatenating) layer and compare each
        // head's slice against a straight-line ELU(W h) computation.
        let out = layer_forward(&g, &h0, &w.layers[0], 0, false, &mut None);
        for (head_idx, head) in w.layers[0].heads.iter().enumerate() {
            let expected: Vec<f32> =
                head.w.matvec(&h0[0]).into_iter().map(elu).collect();
            let got = &out[0][head_idx * HIDDEN_DIM..(head_idx + 1) * HIDDEN_DIM];
            for (e, g) in expected.iter().zip(got) {
                assert!((e - g).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn uniform_logits_give_uniform_distribution_and_first_relation() {
        let mut w = GnnWeights::seeded(1);
        w.w_edge = Matrix::zeros(NUM_RELATIONS, 2 * OUTPUT_DIM);
        w.b_edge = vec![0.0; NUM_RELATIONS];
        let h = vec![0.5f32; OUTPUT_DIM];
        let pred = classify_edge(&h, &h, &w).unwrap();
        for p in pred.distribution {
            assert!((p - 0.2).abs() < 1e-6);
        }
        assert_eq!(pred.relation, Relation::Enables);
        assert!((pred.confidence - 0.2).abs() < 1e-6);
    }

    #[test]
    fn dominant_logit_approaches_confidence_one() {
        let mut w = GnnWeights::seeded(1);
        w.w_edge = Matrix::zeros(NUM_RELATIONS, 2 * OUTPUT_DIM);
        w.b_edge = vec![0.0, 0.0, 50.0, 0.0, 0.0];
        let h = vec![0.0f32; OUTPUT_DIM];
        let pred = classify_edge(&h, &h, &w).unwrap();
        assert_eq!(pred.relation, Relation::Produces);
        assert!(pred.confidence > 0.999);
        let total: f32 = pred.distribution.iter().sum();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn classify_matches_scratch_softmax() {
        let w = GnnWeights::seeded(9);
        let h_u: Vec<f32> = (0..OUTPUT_DIM).map(|i| (i as f32 * 0.01).sin()).collect();
        let h_v: Vec<f32> = (0..OUTPUT_DIM).map(|i| (i as f32 * 0.02).cos()).collect();
        let pred = classify_edge(&h_u, &h_v, &w).unwrap();

        // Straight-line recomputation.
        let mut logits = [0.0f32; NUM_RELATIONS];
        for r in 0..NUM_RELATIONS {
            let mut sum = w.b_edge[r];
            for (c, v) in h_u.iter().chain(&h_v).enumerate() {
                sum += w.w_edge.data[r * 2 * OUTPUT_DIM + c] * v;
            }
            logits[r] = sum;
        }
        let max = logits.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        let exps: Vec<f32> = logits.iter().map(|l| (l - max).exp()).collect();
        let total: f32 = exps.iter().sum();
        for r in 0..NUM_RELATIONS {
            assert!((pred.distribution[r] - exps[r] / total).abs() < 1e-6);
        }
    }

    #[test]
    fn node_init_matches_scratch_oracle() {
        let g = two_node_graph();
        let w = GnnWeights::seeded(11);
        let h0 = node_init(&g, &w).unwrap();
        for (node, features) in g.nodes().iter().zip(&h0) {
            for r in 0..NODE_DIM {
                let mut sum = w.b_input[r];
                for (c, v) in node.embedding.components().iter().enumerate() {
                    sum += w.w_input.data[r * INPUT_DIM + c] * (*v as f32);
                }
                let expected = sum.max(0.0);
                assert!((features[r] - expected).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn neighbor_storage_order_does_not_change_outputs() {
        let w = GnnWeights::seeded(13);
        let mut g1 = TaskGraph::new();
        g1.add_node("a", "one", embed("one")).unwrap();
        g1.add_node("b", "two", embed("two")).unwrap();
        g1.add_node("c", "three", embed("three")).unwrap();
        g1.add_edge("a", "c").unwrap();
        g1.add_edge("b", "c").unwrap();

        let mut g2 = TaskGraph::new();
        g2.add_node("a", "one", embed("one")).unwrap();
        g2.add_node("b", "two", embed("two")).unwrap();
        g2.add_node("c", "three", embed("three")).unwrap();
        g2.add_edge("b", "c").unwrap(); // reversed storage order
        g2.add_edge("a", "c").unwrap();

        let h1 = gat_forward(&g1, &node_init(&g1, &w).unwrap(), &w).unwrap();
        let h2 = gat_forward(&g2, &node_init(&g2, &w).unwrap(), &w).unwrap();
        assert_eq!(h1, h2);
    }

    #[test]
    fn relabeling_permutes_outputs_exactly() {
        let w = GnnWeights::seeded(17);
        let texts = ["alpha task", "beta task", "gamma task", "delta task"];
        let mut g = TaskGraph::new();
        for (i, t) in texts.iter().enumerate() {
            g.add_node(format!("n{i}"), *t, embed(t)).unwrap();
        }
        g.add_edge("n0", "n1").unwrap();
        g.add_edge("n1", "n2").unwrap();
        g.add_edge("n3", "n1").unwrap();

        // Same graph with nodes inserted in reverse order.
        let perm = [3usize, 2, 1, 0];
        let mut g2 = TaskGraph::new();
        for &i in &perm {
            g2.add_node(format!("n{i}"), texts[i], embed(texts[i])).unwrap();
        }
        g2.add_edge("n0", "n1").unwrap();
        g2.add_edge("n1", "n2").unwrap();
        g2.add_edge("n3", "n1").unwrap();

        let h1 = gat_forward(&g, &node_init(&g, &w).unwrap(), &w).unwrap();
        let h2 = gat_forward(&g2, &node_init(&g2, &w).unwrap(), &w).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert_eq!(h1[p], h2[i], "node n{p} must map exactly");
        }
    }
}
