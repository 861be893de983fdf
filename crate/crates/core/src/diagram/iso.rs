//! Isomorphism search between diagrams: crossing bijections that keep slot
//! labels up to a half turn, with matching edge words and loop classes.

use std::collections::VecDeque;

use super::{Diagram, Endpoint};
use crate::surface::reduce_cyclic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    /// Image of each crossing.
    pub crossing: Vec<usize>,
    /// Slot `s` goes to slot `(s + rotation) % 4`; always 0 or 2.
    pub rotation: Vec<u8>,
    /// Image of each edge and whether its direction is reversed.
    pub edge: Vec<(usize, bool)>,
    pub loops: Vec<usize>,
}

impl Isomorphism {
    pub fn map_endpoint(&self, p: Endpoint) -> Endpoint {
        Endpoint::new(self.crossing[p.crossing], (p.slot + self.rotation[p.crossing]) % 4)
    }
}

pub fn find_isomorphism(d1: &Diagram, d2: &Diagram) -> Option<Isomorphism> {
    let n = d1.crossing_count();
    if n != d2.crossing_count() || d1.edges.len() != d2.edges.len() || d1.loops.len() != d2.loops.len() {
        return None;
    }
    let loops = match_loops(d1, d2)?;
    let mut crossing = vec![usize::MAX; n];
    let mut rotation = vec![0u8; n];
    let mut taken = vec![false; n];
    if !extend(d1, d2, &mut crossing, &mut rotation, &mut taken) {
        return None;
    }
    let mut iso = Isomorphism { crossing, rotation, edge: Vec::new(), loops };
    for e in &d1.edges {
        let (ia, is_a) = d2.edge_at(iso.map_endpoint(e.a));
        iso.edge.push((ia, !is_a));
    }
    Some(iso)
}

fn match_loops(d1: &Diagram, d2: &Diagram) -> Option<Vec<usize>> {
    let c2: Vec<_> = d2.loops.iter().map(reduce_cyclic).collect();
    let mut used = vec![false; c2.len()];
    let mut out = Vec::new();
    for w in &d1.loops {
        let c = reduce_cyclic(w);
        let k = (0..c2.len()).find(|&k| !used[k] && c2[k] == c)?;
        used[k] = true;
        out.push(k);
    }
    Some(out)
}

/// Backtracking over the first unmapped crossing of each component.
fn extend(d1: &Diagram, d2: &Diagram, crossing: &mut Vec<usize>, rotation: &mut Vec<u8>, taken: &mut Vec<bool>) -> bool {
    let Some(start) = crossing.iter().position(|&c| c == usize::MAX) else {
        return true;
    };
    for target in 0..d2.crossing_count() {
        if taken[target] {
            continue;
        }
        for rot in [0u8, 2] {
            let (saved_c, saved_r, saved_t) = (crossing.clone(), rotation.clone(), taken.clone());
            if propagate(d1, d2, start, target, rot, crossing, rotation, taken) && extend(d1, d2, crossing, rotation, taken) {
                return true;
            }
            *crossing = saved_c;
            *rotation = saved_r;
            *taken = saved_t;
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn propagate(
    d1: &Diagram,
    d2: &Diagram,
    start: usize,
    target: usize,
    rot: u8,
    crossing: &mut [usize],
    rotation: &mut [u8],
    taken: &mut [bool],
) -> bool {
    crossing[start] = target;
    rotation[start] = rot;
    taken[target] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for s in 0..4u8 {
            let p1 = Endpoint::new(c, s);
            let p2 = Endpoint::new(crossing[c], (s + rotation[c]) % 4);
            let (e1, a1) = d1.edge_at(p1);
            let (e2, a2) = d2.edge_at(p2);
            let w1 = d1.edges[e1].word.free_reduce();
            let w1 = if a1 { w1 } else { w1.inverse() };
            let w2 = d2.edges[e2].word.free_reduce();
            let w2 = if a2 { w2 } else { w2.inverse() };
            if w1 != w2 {
                return false;
            }
            let q1 = d1.opposite(p1);
            let q2 = d2.opposite(p2);
            let r = (q2.slot + 4 - q1.slot) % 4;
            if r % 2 == 1 {
                return false;
            }
            if crossing[q1.crossing] == usize::MAX {
                if taken[q2.crossing] {
                    return false;
                }
                crossing[q1.crossing] = q2.crossing;
                rotation[q1.crossing] = r;
                taken[q2.crossing] = true;
                queue.push_back(q1.crossing);
            } else if crossing[q1.crossing] != q2.crossing || rotation[q1.crossing] != r {
                return false;
            }
        }
    }
    true
}
