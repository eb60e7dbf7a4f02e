//! Gate dependency graph.
//!
//! One node per gate; a directed edge connects consecutive gates on each
//! qubit (per-qubit chains, no commutation analysis). The scheduler pulls
//! ready gates from this graph in (depth, program index) order.

use crate::circuit::Circuit;
use std::collections::BTreeSet;

#[derive(Clone, Debug)]
pub struct DependencyGraph {
    pub n_gates: usize,
    /// Sorted, deduplicated (earlier gate -> later gate) pairs.
    pub edges: Vec<(usize, usize)>,
    succs: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

pub fn build_dag(circuit: &Circuit) -> DependencyGraph {
    let n = circuit.gates.len();
    let mut edges = BTreeSet::new();
    let mut last_on_qubit: Vec<Option<usize>> = vec![None; circuit.n_qubits];

    for (i, gate) in circuit.gates.iter().enumerate() {
        for &q in &gate.operands {
            if let Some(prev) = last_on_qubit[q] {
                edges.insert((prev, i));
            }
            last_on_qubit[q] = Some(i);
        }
    }

    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let mut succs = vec![Vec::new(); n];
    let mut preds = vec![Vec::new(); n];
    for &(u, v) in &edges {
        succs[u].push(v);
        preds[v].push(u);
    }

    let mut depth = vec![0usize; n];
    for i in 0..n {
        // edges point forward in program order, so one pass suffices
        for &p in &preds[i] {
            depth[i] = depth[i].max(depth[p] + 1);
        }
    }

    DependencyGraph {
        n_gates: n,
        edges,
        succs,
        preds,
        depth,
    }
}

impl DependencyGraph {
    pub fn successors(&self, gate: usize) -> &[usize] {
        &self.succs[gate]
    }

    pub fn predecessors(&self, gate: usize) -> &[usize] {
        &self.preds[gate]
    }

    pub fn depth_of(&self, gate: usize) -> usize {
        self.depth[gate]
    }

    /// Gate indices sorted by (depth, program index): a topological order
    /// that matches the scheduler's dispatch rule.
    pub fn dispatch_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_gates).collect();
        order.sort_by_key(|&i| (self.depth[i], i));
        order
    }

    /// Kahn's algorithm; `true` when every node is reachable without cycles.
    pub fn is_acyclic(&self) -> bool {
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..self.n_gates).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop() {
            seen += 1;
            for &v in &self.succs[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push(v);
                }
            }
        }
        seen == self.n_gates
    }

    /// For an operand `q` of `gate`, the next gate touching `q`, if any.
    /// Used by the look-ahead tie-break when choosing CNOT configurations.
    pub fn next_gate_on_qubit(&self, circuit: &Circuit, gate: usize, q: usize) -> Option<usize> {
        self.succs[gate]
            .iter()
            .copied()
            .filter(|&s| circuit.gates[s].operands.contains(&q))
            .min()
    }
}
