//! Mutual-reachability minimum spanning trees.
//!
//! [`build_mst`] runs Borůvka rounds where each component's cheapest outgoing
//! edge is found with a dual-tree traversal of the space tree. Edges are
//! compared by `(weight, min endpoint, max endpoint)`, a strict total order,
//! so the result does not depend on traversal order or worker count.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{PlscanError, Result};
use crate::spatial::{CoreDistances, SpatialIndex};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// An acyclic weighted edge list over `n` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningForest {
    n: usize,
    edges: Vec<Edge>,
}

impl SpanningForest {
    /// Validates and wraps a precomputed forest. Weights are taken to be
    /// mutual-reachability distances already.
    pub fn from_precomputed(edges: Vec<Edge>, n: usize) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        let mut uf = UnionFind::new(n);
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(PlscanError::InvalidInput(format!(
                    "edge ({}, {}) references a vertex outside 0..{n}",
                    e.u, e.v
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(PlscanError::InvalidInput(format!(
                    "edge ({}, {}) has weight {}; weights must be finite and >= 0",
                    e.u, e.v, e.weight
                )));
            }
            if e.u == e.v {
                return Err(PlscanError::InvalidInput(format!("self-loop on vertex {}", e.u)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(PlscanError::DuplicateEdge { u: e.u, v: e.v });
            }
            if uf.union(e.u, e.v).is_none() {
                return Err(PlscanError::Cycle { u: e.u, v: e.v });
            }
        }
        Ok(SpanningForest { n, edges })
    }

    pub(crate) fn from_parts_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        SpanningForest { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_components(&self) -> usize {
        self.n - self.edges.len()
    }

    /// Sum of edge weights, accumulated in ascending weight order.
    pub fn total_weight(&self) -> f64 {
        let mut w: Vec<f64> = self.edges.iter().map(|e| e.weight).collect();
        w.sort_by(f64::total_cmp);
        w.iter().sum()
    }

    /// Edge weights in ascending order. Unique for a given weighted graph.
    pub fn sorted_weights(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.edges.iter().map(|e| e.weight).collect();
        w.sort_by(f64::total_cmp);
        w
    }

    /// Component id per vertex, numbered by first appearance.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.n);
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        let mut ids = HashMap::new();
        (0..self.n)
            .map(|i| {
                let root = uf.find(i);
                let next = ids.len();
                *ids.entry(root).or_insert(next)
            })
            .collect()
    }
}

const MIXED: u32 = u32::MAX;
const TARGET_TASKS: usize = 256;

#[derive(Debug, Clone, Copy)]
struct Best {
    w: f64,
    a: usize,
    b: usize,
}

impl Best {
    const NONE: Best = Best { w: f64::INFINITY, a: usize::MAX, b: usize::MAX };

    #[inline]
    fn cmp(&self, other: &Best) -> Ordering {
        self.w.total_cmp(&other.w).then((self.a, self.b).cmp(&(other.a, other.b)))
    }

    #[inline]
    fn less(&self, other: &Best) -> bool {
        self.cmp(other) == Ordering::Less
    }
}

/// Computes the mutual-reachability MST of the indexed points.
pub fn build_mst(index: &SpatialIndex, cores: &CoreDistances) -> Result<SpanningForest> {
    let n = index.len();
    if cores.len() != n {
        return Err(PlscanError::InvalidInput(format!("{} core distances for {n} points", cores.len())));
    }
    let core_pos: Vec<f64> = index.order.iter().map(|&i| cores.reduced()[i]).collect();
    let min_core = node_min_core(index, &core_pos);
    let tasks = task_roots(index);

    let mut uf = UnionFind::new(n);
    let mut comp: Vec<u32> = (0..n as u32).collect();
    let mut num_comp = n;
    let mut picked: Vec<Best> = Vec::with_capacity(n - 1);

    while num_comp > 1 {
        let uniform = node_uniform(index, &comp);
        let ctx = Round { index, core_pos: &core_pos, min_core: &min_core, comp: &comp, uniform: &uniform };
        let partial: Vec<Vec<(u32, Best)>> = tasks.par_iter().map(|&root| ctx.search(root)).collect();

        let mut best = vec![Best::NONE; num_comp];
        for list in partial {
            for (c, b) in list {
                if b.less(&best[c as usize]) {
                    best[c as usize] = b;
                }
            }
        }
        best.retain(|b| b.a != usize::MAX);
        if best.is_empty() {
            return Err(PlscanError::InvalidInput("no outgoing edge found for a component".into()));
        }
        best.sort_by(Best::cmp);
        for b in best {
            if uf.union(b.a, b.b).is_some() {
                picked.push(b);
            }
        }

        let mut ids: HashMap<usize, u32> = HashMap::new();
        for (c, &point) in comp.iter_mut().zip(&index.order) {
            let root = uf.find(point);
            let next = ids.len() as u32;
            *c = *ids.entry(root).or_insert(next);
        }
        num_comp = ids.len();
    }

    picked.sort_by(Best::cmp);
    let metric = index.metric();
    let edges =
        picked.into_iter().map(|b| Edge { u: b.a, v: b.b, weight: metric.from_reduced(b.w) }).collect();
    Ok(SpanningForest::from_parts_unchecked(n, edges))
}

fn node_min_core(index: &SpatialIndex, core_pos: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; index.nodes.len()];
    // Children always follow their parent in the node array.
    for id in (0..index.nodes.len()).rev() {
        let node = &index.nodes[id];
        out[id] = if node.is_leaf() {
            core_pos[node.start..node.end].iter().copied().fold(f64::INFINITY, f64::min)
        } else {
            out[node.left].min(out[node.right])
        };
    }
    out
}

fn node_uniform(index: &SpatialIndex, comp: &[u32]) -> Vec<u32> {
    let mut out = vec![MIXED; index.nodes.len()];
    for id in (0..index.nodes.len()).rev() {
        let node = &index.nodes[id];
        out[id] = if node.is_leaf() {
            let first = comp[node.start];
            if comp[node.start..node.end].iter().all(|&c| c == first) {
                first
            } else {
                MIXED
            }
        } else if out[node.left] == out[node.right] {
            out[node.left]
        } else {
            MIXED
        };
    }
    out
}

/// Disjoint query subtrees that together cover every point.
fn task_roots(index: &SpatialIndex) -> Vec<usize> {
    let mut roots = vec![0usize];
    loop {
        if roots.len() >= TARGET_TASKS || roots.iter().all(|&r| index.nodes[r].is_leaf()) {
            break;
        }
        roots = roots
            .iter()
            .flat_map(|&r| {
                let node = &index.nodes[r];
                if node.is_leaf() {
                    vec![r]
                } else {
                    vec![node.left, node.right]
                }
            })
            .collect();
    }
    roots
}

struct Round<'a> {
    index: &'a SpatialIndex,
    core_pos: &'a [f64],
    min_core: &'a [f64],
    comp: &'a [u32],
    uniform: &'a [u32],
}

struct Search<'a> {
    round: &'a Round<'a>,
    /// First node id of the task subtree; its nodes are contiguous in preorder.
    base: usize,
    start: usize,
    bounds: Vec<f64>,
    slot: Vec<u32>,
    best: Vec<Best>,
}

impl Round<'_> {
    fn search(&self, root: usize) -> Vec<(u32, Best)> {
        let node = &self.index.nodes[root];
        let mut slots: HashMap<u32, u32> = HashMap::new();
        let mut slot_comp = Vec::new();
        let slot: Vec<u32> = (node.start..node.end)
            .map(|pos| {
                let c = self.comp[pos];
                *slots.entry(c).or_insert_with(|| {
                    slot_comp.push(c);
                    (slot_comp.len() - 1) as u32
                })
            })
            .collect();
        let subtree = subtree_size(self.index, root);
        let mut search = Search {
            round: self,
            base: root,
            start: node.start,
            bounds: vec![f64::INFINITY; subtree],
            slot,
            best: vec![Best::NONE; slot_comp.len()],
        };
        let lb = self.lower_bound(root, 0);
        search.visit(root, 0, lb);
        slot_comp.into_iter().zip(search.best).filter(|(_, b)| b.a != usize::MAX).collect()
    }

    #[inline]
    fn lower_bound(&self, q: usize, r: usize) -> f64 {
        self.index.node_node_bound(q, r).max(self.min_core[q]).max(self.min_core[r])
    }
}

fn subtree_size(index: &SpatialIndex, root: usize) -> usize {
    let mut last = root;
    while !index.nodes[last].is_leaf() {
        last = index.nodes[last].right;
    }
    last - root + 1
}

impl Search<'_> {
    fn visit(&mut self, q: usize, r: usize, lb: f64) {
        if lb > self.bounds[q - self.base] {
            return;
        }
        let round = self.round;
        let uq = round.uniform[q];
        if uq != MIXED && uq == round.uniform[r] {
            return;
        }
        let nodes = &round.index.nodes;
        let (nq, nr) = (&nodes[q], &nodes[r]);
        match (nq.is_leaf(), nr.is_leaf()) {
            (true, true) => self.base_case(q, r),
            (false, r_leaf) if r_leaf || nq.len() >= nr.len() => {
                let (ql, qr) = (nq.left, nq.right);
                let (bl, br) = (round.lower_bound(ql, r), round.lower_bound(qr, r));
                self.visit(ql, r, bl);
                self.visit(qr, r, br);
                let b = self.bounds[ql - self.base].max(self.bounds[qr - self.base]);
                self.bounds[q - self.base] = b;
            }
            _ => {
                let (rl, rr) = (nr.left, nr.right);
                let (bl, br) = (round.lower_bound(q, rl), round.lower_bound(q, rr));
                if bl <= br {
                    self.visit(q, rl, bl);
                    self.visit(q, rr, br);
                } else {
                    self.visit(q, rr, br);
                    self.visit(q, rl, bl);
                }
            }
        }
    }

    fn base_case(&mut self, q: usize, r: usize) {
        let round = self.round;
        let index = round.index;
        let metric = index.metric();
        let (nq, nr) = (&index.nodes[q], &index.nodes[r]);
        let mut bound: f64 = 0.0;
        for pq in nq.start..nq.end {
            let s = self.slot[pq - self.start] as usize;
            let mut best = self.best[s];
            let cq = round.comp[pq];
            let core_q = round.core_pos[pq];
            if core_q <= best.w {
                let xq = index.coords(pq);
                let oq = index.order[pq];
                for pr in nr.start..nr.end {
                    if round.comp[pr] == cq {
                        continue;
                    }
                    let core_r = round.core_pos[pr];
                    if core_r > best.w {
                        continue;
                    }
                    let w = metric.reduced(xq, index.coords(pr)).max(core_q).max(core_r);
                    if w > best.w {
                        continue;
                    }
                    let or = index.order[pr];
                    let cand = Best { w, a: oq.min(or), b: oq.max(or) };
                    if cand.less(&best) {
                        best = cand;
                    }
                }
                self.best[s] = best;
            }
            bound = bound.max(best.w);
        }
        self.bounds[q - self.base] = bound;
    }
}
