//! Functional graphs of self-maps of finite sets: cycles, tails, and the
//! residual periods of the reduced map on the special fiber.

use std::collections::HashMap;

use crate::models::{FiberCoords, Model, ModelError, SpecialFiberPoint};

/// Successor value marking a point that leaves the set.
pub const SINK: u32 = u32::MAX;

/// All cycles of the partial map `i ↦ succ[i]`, each rotated to start at its
/// smallest node, sorted by `(length, smallest node)`.
pub fn find_cycles(succ: &[u32]) -> Vec<Vec<u32>> {
    const NEW: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![NEW; succ.len()];
    let mut cycles = Vec::new();
    let mut path: Vec<u32> = Vec::new();
    for start in 0..succ.len() {
        if state[start] != NEW {
            continue;
        }
        path.clear();
        let mut v = start as u32;
        loop {
            if v == SINK || state[v as usize] == DONE {
                break;
            }
            if state[v as usize] == ACTIVE {
                let from = path.iter().rposition(|&x| x == v).expect("on path");
                let mut cycle = path[from..].to_vec();
                let min_pos = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &x)| x)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                cycle.rotate_left(min_pos);
                cycles.push(cycle);
                break;
            }
            state[v as usize] = ACTIVE;
            path.push(v);
            v = succ[v as usize];
        }
        for &x in &path {
            state[x as usize] = DONE;
        }
    }
    cycles.sort_by_key(|c| (c.len(), c[0]));
    cycles
}

/// Distance from each node to its eventual cycle (or to the sink).
pub fn tail_lengths(succ: &[u32], cycles: &[Vec<u32>]) -> Vec<u32> {
    const UNKNOWN: u32 = u32::MAX;
    let mut tail = vec![UNKNOWN; succ.len()];
    for c in cycles {
        for &x in c {
            tail[x as usize] = 0;
        }
    }
    let mut path = Vec::new();
    for start in 0..succ.len() {
        path.clear();
        let mut v = start as u32;
        let base = loop {
            if v == SINK {
                break 0;
            }
            if tail[v as usize] != UNKNOWN {
                break tail[v as usize];
            }
            path.push(v);
            v = succ[v as usize];
        };
        for (i, &x) in path.iter().rev().enumerate() {
            tail[x as usize] = base + i as u32 + 1;
        }
    }
    tail
}

/// The reduced map `f̄` acting on `X̄(F_p)`.
#[derive(Debug, Clone)]
pub struct FunctionalGraph {
    nodes: Vec<SpecialFiberPoint>,
    index: HashMap<FiberCoords, usize>,
    successor: Vec<u32>,
    cycles: Vec<Vec<u32>>,
    cycle_of: Vec<usize>,
    tail: Vec<u32>,
}

impl FunctionalGraph {
    pub fn build(model: &Model) -> Result<Self, ModelError> {
        let nodes = model.special_fiber()?;
        let index: HashMap<FiberCoords, usize> =
            nodes.iter().enumerate().map(|(i, q)| (q.coords.clone(), i)).collect();
        let successor = nodes
            .iter()
            .map(|q| {
                let image = model.apply_fiber(&q.coords)?;
                index
                    .get(&image)
                    .map(|&i| i as u32)
                    .ok_or_else(|| ModelError::NotOnModel(q.coords.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_successors(nodes, index, successor))
    }

    fn from_successors(
        nodes: Vec<SpecialFiberPoint>,
        index: HashMap<FiberCoords, usize>,
        successor: Vec<u32>,
    ) -> Self {
        let cycles = find_cycles(&successor);
        let tail = tail_lengths(&successor, &cycles);
        let mut cycle_of = vec![usize::MAX; nodes.len()];
        for (ci, c) in cycles.iter().enumerate() {
            for &x in c {
                cycle_of[x as usize] = ci;
            }
        }
        for v in 0..nodes.len() {
            if cycle_of[v] == usize::MAX {
                let mut u = v;
                for _ in 0..tail[v] {
                    u = successor[u] as usize;
                }
                cycle_of[v] = cycle_of[u];
            }
        }
        FunctionalGraph { nodes, index, successor, cycles, cycle_of, tail }
    }

    pub fn nodes(&self) -> &[SpecialFiberPoint] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, q: &FiberCoords) -> Option<usize> {
        self.index.get(q).copied()
    }

    pub fn successor(&self, q: &FiberCoords) -> Option<&FiberCoords> {
        let i = self.index_of(q)?;
        Some(&self.nodes[self.successor[i] as usize].coords)
    }

    /// Cycles as coordinate lists with their lengths.
    pub fn cycle_decomposition(&self) -> Vec<(Vec<FiberCoords>, usize)> {
        self.cycles
            .iter()
            .map(|c| {
                (c.iter().map(|&i| self.nodes[i as usize].coords.clone()).collect(), c.len())
            })
            .collect()
    }

    /// `(tail_length, n₀)` for a point of the special fiber.
    pub fn residual_data(&self, q: &FiberCoords) -> Option<(u32, usize)> {
        let i = self.index_of(q)?;
        Some((self.tail[i], self.cycles[self.cycle_of[i]].len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{P1Residue, RationalMapP1};
    use crate::poly::IntPolynomial;

    fn p1(text: &str, p: u64) -> Model {
        let f = IntPolynomial::parse(text, &["x"], Some(p)).unwrap();
        Model::P1(RationalMapP1::polynomial(p, &f).unwrap())
    }

    fn fin(a: u64) -> FiberCoords {
        FiberCoords::P1(P1Residue::Finite(a))
    }

    const INF: FiberCoords = FiberCoords::P1(P1Residue::Infinity);

    #[test]
    fn x_squared_minus_one_mod_3() {
        let g = FunctionalGraph::build(&p1("x^2 - 1", 3)).unwrap();
        assert_eq!(g.successor(&fin(0)), Some(&fin(2)));
        assert_eq!(g.successor(&fin(2)), Some(&fin(0)));
        assert_eq!(g.successor(&fin(1)), Some(&fin(0)));
        assert_eq!(g.successor(&INF), Some(&INF));
        let cycles = g.cycle_decomposition();
        assert_eq!(cycles, vec![(vec![INF], 1), (vec![fin(0), fin(2)], 2)]);
        assert_eq!(g.residual_data(&fin(0)), Some((0, 2)));
        assert_eq!(g.residual_data(&fin(1)), Some((1, 2)));
    }

    #[test]
    fn orbit_ring_example_graph() {
        let g = FunctionalGraph::build(&p1("x^2 - 4*x + 3", 3)).unwrap();
        assert_eq!(g.successor(&fin(0)), Some(&fin(0)));
        assert_eq!(g.successor(&fin(1)), Some(&fin(0)));
        assert_eq!(g.successor(&fin(2)), Some(&fin(2)));
        assert_eq!(g.successor(&INF), Some(&INF));
    }

    #[test]
    fn squaring_mod_7() {
        let g = FunctionalGraph::build(&p1("x^2", 7)).unwrap();
        let cycles: Vec<Vec<FiberCoords>> =
            g.cycle_decomposition().into_iter().map(|(c, _)| c).collect();
        assert_eq!(cycles, vec![vec![fin(0)], vec![fin(1)], vec![INF], vec![fin(2), fin(4)]]);
    }

    #[test]
    fn identity_is_all_fixed() {
        let g = FunctionalGraph::build(&p1("x", 5)).unwrap();
        assert_eq!(g.cycle_decomposition().len(), 6);
        for q in g.nodes() {
            assert_eq!(g.residual_data(&q.coords), Some((0, 1)));
        }
    }

    #[test]
    fn cycles_with_sink() {
        // 0 -> 1 -> 2 -> 1, 3 -> sink, 4 -> 4
        let succ = [1, 2, 1, SINK, 4];
        let cycles = find_cycles(&succ);
        assert_eq!(cycles, vec![vec![4], vec![1, 2]]);
        assert_eq!(tail_lengths(&succ, &cycles), vec![1, 0, 0, 1, 0]);
    }
}
