//! Control-flow graph machinery: SCCs, path decomposition into simple cycles,
//! multi-cycles induced by integer flows and covering cycles.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num::{BigInt, Signed, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::model::Vass;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("flow has {found} entries, expected {expected}")]
    FlowLength { expected: usize, found: usize },
    #[error("flow is negative on transition {0}")]
    NegativeFlow(usize),
    #[error("flow is not conserved at state `{0}`")]
    NotConserved(String),
    #[error("flow value too large to trace explicitly")]
    FlowTooLarge,
    #[error("VASS is not strongly connected")]
    NotStronglyConnected,
}

/// A finite path: a start state and a chain of transition ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub start: usize,
    pub transitions: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// The sequence of visited states, `len() + 1` entries. Fails if the chain breaks.
    pub fn states(&self, v: &Vass) -> Result<Vec<usize>, GraphError> {
        let mut states = vec![self.start];
        let mut here = self.start;
        for &id in &self.transitions {
            let t = v
                .transition_by_id(id)
                .ok_or_else(|| GraphError::InvalidPath(format!("unknown transition {id}")))?;
            if t.source != here {
                return Err(GraphError::InvalidPath(format!(
                    "transition {} does not start in `{}`",
                    t.label,
                    v.states()[here]
                )));
            }
            here = t.target;
            states.push(here);
        }
        Ok(states)
    }

    pub fn end(&self, v: &Vass) -> Result<usize, GraphError> {
        Ok(*self.states(v)?.last().expect("non-empty"))
    }

    pub fn is_cycle(&self, v: &Vass) -> bool {
        !self.is_empty() && self.end(v).ok() == Some(self.start)
    }

    pub fn effect(&self, v: &Vass) -> Vec<BigInt> {
        sum_updates(v, self.transitions.iter().map(|&id| (id, 1u64)))
    }
}

fn sum_updates(v: &Vass, items: impl Iterator<Item = (usize, u64)>) -> Vec<BigInt> {
    let mut eff = vec![BigInt::zero(); v.dim()];
    for (id, k) in items {
        let t = v.transition_by_id(id).expect("transition of this VASS");
        for (e, u) in eff.iter_mut().zip(&t.update) {
            *e += u * BigInt::from(k);
        }
    }
    eff
}

/// Rotates a simple cycle (given as transition ids) so that its smallest
/// `(source state, transition id)` pair comes first.
pub fn canonical_cycle(v: &Vass, cycle: &[usize]) -> Vec<usize> {
    let key = |id: &usize| (v.transition_by_id(*id).map(|t| t.source), *id);
    let start = (0..cycle.len())
        .min_by_key(|&i| key(&cycle[i]))
        .unwrap_or(0);
    cycle[start..]
        .iter()
        .chain(&cycle[..start])
        .copied()
        .collect()
}

/// Checks that `cycle` is a simple cycle of `v`.
pub fn is_simple_cycle(v: &Vass, cycle: &[usize]) -> bool {
    let Some(first) = cycle.first().and_then(|&id| v.transition_by_id(id)) else {
        return false;
    };
    let path = Path {
        start: first.source,
        transitions: cycle.to_vec(),
    };
    match path.states(v) {
        Ok(states) => {
            let inner = &states[..states.len() - 1];
            let mut seen = inner.to_vec();
            seen.sort_unstable();
            seen.dedup();
            states.last() == Some(&path.start) && seen.len() == inner.len()
        }
        Err(_) => false,
    }
}

/// A multiset of simple cycles, keyed by canonical rotation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiCycle {
    cycles: BTreeMap<Vec<usize>, u64>,
}

impl MultiCycle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` copies of a cycle; the key is used as given, callers pass canonical rotations.
    pub fn add(&mut self, cycle: Vec<usize>, count: u64) {
        if count > 0 {
            *self.cycles.entry(cycle).or_insert(0) += count;
        }
    }

    pub fn add_canonical(&mut self, v: &Vass, cycle: &[usize], count: u64) {
        self.add(canonical_cycle(v, cycle), count);
    }

    pub fn merge(&mut self, other: &MultiCycle) {
        for (c, &k) in &other.cycles {
            self.add(c.clone(), k);
        }
    }

    pub fn cycles(&self) -> impl Iterator<Item = (&Vec<usize>, u64)> + '_ {
        self.cycles.iter().map(|(c, &k)| (c, k))
    }

    pub fn multiplicity(&self, cycle: &[usize]) -> u64 {
        self.cycles.get(cycle).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Number of distinct cycles.
    pub fn distinct(&self) -> usize {
        self.cycles.len()
    }

    /// Total number of transitions, counting multiplicities.
    pub fn len(&self) -> u64 {
        self.cycles.iter().map(|(c, &k)| c.len() as u64 * k).sum()
    }

    /// Occurrences of every transition id, counting multiplicities.
    pub fn transition_counts(&self) -> BTreeMap<usize, u64> {
        let mut counts = BTreeMap::new();
        for (c, &k) in &self.cycles {
            for &id in c {
                *counts.entry(id).or_insert(0) += k;
            }
        }
        counts
    }

    pub fn contains_transition(&self, id: usize) -> bool {
        self.cycles.keys().any(|c| c.contains(&id))
    }

    pub fn effect(&self, v: &Vass) -> Vec<BigInt> {
        sum_updates(
            v,
            self.cycles
                .iter()
                .flat_map(|(c, &k)| c.iter().map(move |&id| (id, k))),
        )
    }
}

impl FromIterator<(Vec<usize>, u64)> for MultiCycle {
    fn from_iter<I: IntoIterator<Item = (Vec<usize>, u64)>>(iter: I) -> Self {
        let mut m = MultiCycle::new();
        for (c, k) in iter {
            m.add(c, k);
        }
        m
    }
}

/// Strongly connected components of `(Q, keep)` that contain at least one transition,
/// each returned as a sub-VASS over its own states. `None` keeps every transition.
/// Components are ordered by their smallest state index.
pub fn sccs(v: &Vass, keep: Option<&[usize]>) -> Vec<Vass> {
    let kept: Vec<usize> = match keep {
        Some(ids) => v
            .transition_ids()
            .into_iter()
            .filter(|id| ids.contains(id))
            .collect(),
        None => v.transition_ids(),
    };
    let mut g = DiGraph::<(), usize>::new();
    let nodes: Vec<_> = (0..v.num_states()).map(|_| g.add_node(())).collect();
    for t in v.transitions() {
        if kept.contains(&t.id) {
            g.add_edge(nodes[t.source], nodes[t.target], t.id);
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    comps.sort();
    comps
        .into_iter()
        .filter_map(|states| {
            let internal: Vec<usize> = v
                .transitions()
                .iter()
                .filter(|t| {
                    kept.contains(&t.id)
                        && states.binary_search(&t.source).is_ok()
                        && states.binary_search(&t.target).is_ok()
                })
                .map(|t| t.id)
                .collect();
            if internal.is_empty() {
                return None;
            }
            Some(
                v.restrict(&states, &internal)
                    .expect("an SCC with a transition is a well-formed VASS"),
            )
        })
        .collect()
}

pub fn is_strongly_connected(v: &Vass) -> bool {
    let comps = sccs(v, None);
    comps.len() == 1 && comps[0].num_states() == v.num_states()
}

/// Splits a path into its simple cycles (removing the first cycle to close, left to right,
/// until none remains) and the acyclic remainder.
pub fn decompose_path(v: &Vass, p: &Path) -> Result<(MultiCycle, Path), GraphError> {
    let states = p.states(v)?;
    let mut multicycle = MultiCycle::new();
    // remaining transitions and, for each remaining prefix, the state it ends in
    let mut kept: Vec<usize> = Vec::new();
    let mut visited: Vec<usize> = vec![p.start];
    let mut position: HashMap<usize, usize> = HashMap::from([(p.start, 0)]);
    for (i, &id) in p.transitions.iter().enumerate() {
        let next = states[i + 1];
        kept.push(id);
        if let Some(&j) = position.get(&next) {
            let cycle: Vec<usize> = kept.drain(j..).collect();
            for s in visited.drain(j + 1..) {
                position.remove(&s);
            }
            multicycle.add_canonical(v, &cycle, 1);
        } else {
            position.insert(next, visited.len());
            visited.push(next);
        }
    }
    Ok((
        multicycle,
        Path {
            start: p.start,
            transitions: kept,
        },
    ))
}

/// Decomposes a conserved non-negative integer flow over the transitions (indexed by
/// position in `v`) into simple cycles, so that each transition `t` occurs exactly
/// `flow(t)` times.
pub fn extract_multicycle(v: &Vass, flow: &[BigInt]) -> Result<MultiCycle, GraphError> {
    if flow.len() != v.num_transitions() {
        return Err(GraphError::FlowLength {
            expected: v.num_transitions(),
            found: flow.len(),
        });
    }
    let mut rest: Vec<u64> = Vec::with_capacity(flow.len());
    for (x, t) in flow.iter().zip(v.transitions()) {
        if x.is_negative() {
            return Err(GraphError::NegativeFlow(t.id));
        }
        rest.push(x.to_u64().ok_or(GraphError::FlowTooLarge)?);
    }
    let mut balance = vec![0i128; v.num_states()];
    for (k, t) in rest.iter().zip(v.transitions()) {
        balance[t.source] += *k as i128;
        balance[t.target] -= *k as i128;
    }
    if let Some(p) = balance.iter().position(|&b| b != 0) {
        return Err(GraphError::NotConserved(v.states()[p].clone()));
    }

    let ts = v.transitions();
    let mut multicycle = MultiCycle::new();
    while let Some(first) = rest.iter().position(|&k| k > 0) {
        // follow positive-flow transitions until a state repeats
        let mut trail: Vec<usize> = vec![first];
        let mut seen: HashMap<usize, usize> = HashMap::from([(ts[first].source, 0)]);
        let cycle = loop {
            let here = ts[*trail.last().expect("non-empty")].target;
            if let Some(&j) = seen.get(&here) {
                break trail[j..].to_vec();
            }
            seen.insert(here, trail.len());
            let next = (0..ts.len())
                .find(|&i| rest[i] > 0 && ts[i].source == here)
                .expect("conservation guarantees an outgoing transition with flow");
            trail.push(next);
        };
        let k = cycle.iter().map(|&i| rest[i]).min().expect("non-empty");
        for &i in &cycle {
            rest[i] -= k;
        }
        let ids: Vec<usize> = cycle.iter().map(|&i| ts[i].id).collect();
        multicycle.add_canonical(v, &ids, k);
    }
    Ok(multicycle)
}

/// Breadth-first shortest path between two states, as transition ids. Ties are broken
/// by transition order.
pub fn shortest_path(v: &Vass, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut pred: Vec<Option<usize>> = vec![None; v.num_states()];
    let mut seen = vec![false; v.num_states()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        if p == to {
            break;
        }
        for (i, t) in v.transitions().iter().enumerate() {
            if t.source == p && !seen[t.target] {
                seen[t.target] = true;
                pred[t.target] = Some(i);
                queue.push_back(t.target);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut path = Vec::new();
    let mut here = to;
    while here != from {
        let i = pred[here].expect("reached");
        path.push(v.transitions()[i].id);
        here = v.transitions()[i].source;
    }
    path.reverse();
    Some(path)
}

/// A cycle from state 0 visiting every state, built from shortest paths
/// `0 → 1 → … → |Q|-1 → 0`.
pub fn covering_cycle(v: &Vass) -> Result<Path, GraphError> {
    if !is_strongly_connected(v) {
        return Err(GraphError::NotStronglyConnected);
    }
    let n = v.num_states();
    if n == 1 {
        let t = v.outgoing(0).next().expect("well-formed");
        return Ok(Path {
            start: 0,
            transitions: vec![t.id],
        });
    }
    let mut transitions = Vec::new();
    for p in 0..n {
        let q = (p + 1) % n;
        transitions.extend(shortest_path(v, p, q).ok_or(GraphError::NotStronglyConnected)?);
    }
    Ok(Path {
        start: 0,
        transitions,
    })
}
