use crate::graph::SigmaGraph;
use crate::meter::DelayMeter;

const UNSET: usize = usize::MAX;

/// Strongly connected components and their condensation.
///
/// Components are numbered in the order Tarjan's algorithm completes them,
/// which is a reverse topological order: every condensation arc `j -> j'`
/// has `j' < j`.
#[derive(Clone, Debug)]
pub struct SccDag {
    pub component: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// Condensation arcs, deduplicated.
    pub successors: Vec<Vec<usize>>,
    /// Condensation arcs reversed.
    pub predecessors: Vec<Vec<usize>>,
}

impl SccDag {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

pub fn tarjan_scc(g: &SigmaGraph) -> SccDag {
    tarjan_scc_metered(g, &mut DelayMeter::new())
}

pub(crate) fn tarjan_scc_metered(g: &SigmaGraph, meter: &mut DelayMeter) -> SccDag {
    let n = g.node_count();
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut component = vec![UNSET; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    // (node, slot, position in slot list)
    let mut calls: Vec<(usize, usize, usize)> = Vec::new();
    let mut counter = 0usize;
    let mut steps = 0u64;

    for root in 0..n {
        steps += 1;
        if index[root] != UNSET {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        calls.push((root, 0, 0));
        while let Some(frame) = calls.last_mut() {
            let v = frame.0;
            let lists = g.slot_lists(v);
            while frame.1 < lists.len() && frame.2 >= lists[frame.1].len() {
                frame.1 += 1;
                frame.2 = 0;
            }
            if frame.1 < lists.len() {
                let w = lists[frame.1][frame.2];
                frame.2 += 1;
                steps += 1;
                if index[w] == UNSET {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0, 0));
                    steps += 2;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                calls.pop();
                if low[v] == index[v] {
                    let id = members.len();
                    let mut group = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component[w] = id;
                        group.push(w);
                        steps += 1;
                        if w == v {
                            break;
                        }
                    }
                    members.push(group);
                }
                if let Some(parent) = calls.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }

    let count = members.len();
    let mut last_seen = vec![UNSET; count];
    let mut successors = vec![Vec::new(); count];
    let mut predecessors = vec![Vec::new(); count];
    for (j, group) in members.iter().enumerate() {
        for &v in group {
            for w in g.all_successors(v) {
                steps += 1;
                let j2 = component[w];
                if j2 != j && last_seen[j2] != j {
                    last_seen[j2] = j;
                    successors[j].push(j2);
                    predecessors[j2].push(j);
                    steps += 2;
                }
            }
        }
    }
    meter.charge(steps);
    SccDag { component, members, successors, predecessors }
}
