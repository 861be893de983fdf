//! Combinatorial link diagrams on a surface: crossings in the disk chart joined
//! by edges that carry band-traversal words.

mod format;
mod iso;
mod moves;

use std::collections::BTreeSet;

use crate::error::DiagramError;
use crate::surface::{CurveClass, CurveWord, SurfaceModel};

pub use iso::{find_isomorphism, Isomorphism};
pub use moves::{R1Side, R2Site, R3Site, Strand};

/// `+1` or `-1`.
pub type Marker = i8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub crossing: usize,
    pub slot: u8,
}

impl Endpoint {
    pub fn new(crossing: usize, slot: u8) -> Endpoint {
        Endpoint { crossing, slot }
    }
}

/// An arc between two crossing slots; `word` is read from `a` to `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: Endpoint,
    pub b: Endpoint,
    pub word: CurveWord,
}

impl Edge {
    pub fn new(a: Endpoint, b: Endpoint, word: CurveWord) -> Edge {
        Edge { a, b, word }
    }
}

/// The slot joined to `slot` by the smoothing of the given marker.
pub fn partner(slot: u8, marker: Marker) -> u8 {
    if marker > 0 {
        slot ^ 1
    } else {
        3 - slot
    }
}

/// The smallest pieces a circle is made of, used to match circles across
/// related diagrams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Edge(usize),
    Loop(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    surface: SurfaceModel,
    names: Vec<String>,
    edges: Vec<Edge>,
    loops: Vec<CurveWord>,
    at: Vec<[(usize, bool); 4]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub word: CurveWord,
    pub class: CurveClass,
    /// Incident crossing slots, sorted.
    pub slots: Vec<Endpoint>,
    /// Edges and free loops the circle runs along, sorted.
    pub atoms: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smoothing {
    pub circles: Vec<Circle>,
    slot_circle: Vec<[usize; 4]>,
}

impl Smoothing {
    pub fn circle_at(&self, e: Endpoint) -> usize {
        self.slot_circle[e.crossing][e.slot as usize]
    }
}

/// Source atoms of every atom of a derived diagram. Atoms with an empty
/// source list were created by the operation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Lineage {
    pub edges: Vec<Vec<Atom>>,
    pub loops: Vec<Vec<Atom>>,
    /// Source crossing of each crossing, if any.
    pub crossings: Vec<Option<usize>>,
}

impl Lineage {
    pub fn identity(d: &Diagram) -> Lineage {
        Lineage {
            edges: (0..d.edges.len()).map(|e| vec![Atom::Edge(e)]).collect(),
            loops: (0..d.loops.len()).map(|l| vec![Atom::Loop(l)]).collect(),
            crossings: (0..d.crossing_count()).map(Some).collect(),
        }
    }

    pub fn atom(&self, a: Atom) -> &[Atom] {
        match a {
            Atom::Edge(e) => &self.edges[e],
            Atom::Loop(l) => &self.loops[l],
        }
    }

    /// `self` maps D2 to D1 and `earlier` maps D1 to D0; the result maps D2 to D0.
    pub fn compose(&self, earlier: &Lineage) -> Lineage {
        let map = |v: &Vec<Atom>| -> Vec<Atom> {
            let s: BTreeSet<Atom> = v.iter().flat_map(|&a| earlier.atom(a).iter().copied()).collect();
            s.into_iter().collect()
        };
        Lineage {
            edges: self.edges.iter().map(map).collect(),
            loops: self.loops.iter().map(map).collect(),
            crossings: self.crossings.iter().map(|c| c.and_then(|c| earlier.crossings[c])).collect(),
        }
    }

    /// Source atoms of a circle, and whether it runs along a newly created atom.
    pub fn trace(&self, c: &Circle) -> (BTreeSet<Atom>, bool) {
        let mut out = BTreeSet::new();
        let mut fresh = false;
        for &a in &c.atoms {
            let src = self.atom(a);
            if src.is_empty() {
                fresh = true;
            }
            out.extend(src.iter().copied());
        }
        (out, fresh)
    }
}

impl Diagram {
    pub fn new(
        surface: SurfaceModel,
        names: Vec<String>,
        edges: Vec<Edge>,
        loops: Vec<CurveWord>,
    ) -> Result<Diagram, DiagramError> {
        let n = names.len();
        if n > 30 {
            return Err(DiagramError::Site(format!("{n} crossings exceed the supported 30")));
        }
        let mut at = vec![[(usize::MAX, false); 4]; n];
        for (i, e) in edges.iter().enumerate() {
            surface.check_word(&e.word)?;
            for (p, is_a) in [(e.a, true), (e.b, false)] {
                if p.crossing >= n || p.slot > 3 {
                    return Err(DiagramError::Slot { crossing: p.crossing, slot: p.slot, problem: "out of range" });
                }
                let cell = &mut at[p.crossing][p.slot as usize];
                if cell.0 != usize::MAX {
                    return Err(DiagramError::Slot { crossing: p.crossing, slot: p.slot, problem: "used twice" });
                }
                *cell = (i, is_a);
            }
        }
        for (c, row) in at.iter().enumerate() {
            for (k, cell) in row.iter().enumerate() {
                if cell.0 == usize::MAX {
                    return Err(DiagramError::Slot { crossing: c, slot: k as u8, problem: "unmatched" });
                }
            }
        }
        for w in &loops {
            surface.check_word(w)?;
        }
        Ok(Diagram { surface, names, edges, loops, at })
    }

    /// Crossings named `x1`, `x2`, ...
    pub fn with_crossings(
        surface: SurfaceModel,
        crossings: usize,
        edges: Vec<Edge>,
        loops: Vec<CurveWord>,
    ) -> Result<Diagram, DiagramError> {
        Diagram::new(surface, default_names(crossings), edges, loops)
    }

    pub fn surface(&self) -> &SurfaceModel {
        &self.surface
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn loops(&self) -> &[CurveWord] {
        &self.loops
    }

    pub fn crossing_count(&self) -> usize {
        self.names.len()
    }

    /// The edge at a slot and whether the slot is its `a` end.
    pub fn edge_at(&self, p: Endpoint) -> (usize, bool) {
        self.at[p.crossing][p.slot as usize]
    }

    /// The slot at the other end of the edge leaving `p`.
    pub fn opposite(&self, p: Endpoint) -> Endpoint {
        let (e, is_a) = self.edge_at(p);
        if is_a {
            self.edges[e].b
        } else {
            self.edges[e].a
        }
    }

    /// Boundary components of a regular neighbourhood of the crossings and
    /// edges; an edge through an odd number of flipped bands is twisted.
    pub fn face_count(&self) -> usize {
        let n = self.crossing_count();
        let twisted: Vec<bool> = self
            .edges
            .iter()
            .map(|e| e.word.letters().iter().filter(|l| self.surface.bands()[l.generator()].flipped).count() % 2 == 1)
            .collect();
        let idx = |c: usize, s: u8, dir: usize| (c * 4 + s as usize) * 2 + dir;
        let mut seen = vec![false; n * 8];
        let mut orbits = 0;
        for start in 0..n * 8 {
            if seen[start] {
                continue;
            }
            orbits += 1;
            let (mut c, mut s, mut dir) = (start / 8, ((start / 2) % 4) as u8, start % 2);
            while !seen[idx(c, s, dir)] {
                seen[idx(c, s, dir)] = true;
                let p = self.opposite(Endpoint::new(c, s));
                if twisted[self.edge_at(Endpoint::new(c, s)).0] {
                    dir ^= 1;
                }
                c = p.crossing;
                s = if dir == 0 { (p.slot + 1) % 4 } else { (p.slot + 3) % 4 };
            }
        }
        orbits / 2
    }

    pub fn smooth(&self, markers: &[Marker]) -> Smoothing {
        assert_eq!(markers.len(), self.crossing_count(), "marker vector length");
        let n = self.crossing_count();
        let mut visited = vec![false; self.edges.len()];
        let mut circles = Vec::new();
        for start in 0..self.edges.len() {
            if visited[start] {
                continue;
            }
            let mut word = CurveWord::empty();
            let mut slots = Vec::new();
            let mut atoms = Vec::new();
            let (mut cur, mut forward) = (start, true);
            loop {
                visited[cur] = true;
                atoms.push(Atom::Edge(cur));
                let e = &self.edges[cur];
                let (from, to) = if forward {
                    word.extend(&e.word);
                    (e.a, e.b)
                } else {
                    word.extend(&e.word.inverse());
                    (e.b, e.a)
                };
                slots.push(from);
                slots.push(to);
                let next = Endpoint::new(to.crossing, partner(to.slot, markers[to.crossing]));
                let (ne, is_a) = self.edge_at(next);
                cur = ne;
                forward = is_a;
                if cur == start && forward {
                    break;
                }
            }
            slots.sort();
            atoms.sort();
            let class = self.surface.classify_unchecked(&word);
            circles.push(Circle { word, class, slots, atoms });
        }
        circles.sort_by_key(|c| c.slots[0]);
        for (l, w) in self.loops.iter().enumerate() {
            circles.push(Circle {
                word: w.clone(),
                class: self.surface.classify_unchecked(w),
                slots: Vec::new(),
                atoms: vec![Atom::Loop(l)],
            });
        }
        let mut slot_circle = vec![[usize::MAX; 4]; n];
        for (k, c) in circles.iter().enumerate() {
            for p in &c.slots {
                slot_circle[p.crossing][p.slot as usize] = k;
            }
        }
        Smoothing { circles, slot_circle }
    }

    /// Switches every crossing by rotating its slot labels one step.
    pub fn mirror(&self) -> Diagram {
        let rot = |p: Endpoint| Endpoint::new(p.crossing, (p.slot + 3) % 4);
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(rot(e.a), rot(e.b), e.word.clone()))
            .collect();
        Diagram::new(self.surface.clone(), self.names.clone(), edges, self.loops.clone()).unwrap()
    }

    /// `perm[k]` is the old index of the crossing placed at position `k`.
    pub fn reorder_crossings(&self, perm: &[usize]) -> Result<Diagram, DiagramError> {
        let n = self.crossing_count();
        let inv = invert_permutation(perm, n)?;
        let map = |p: Endpoint| Endpoint::new(inv[p.crossing], p.slot);
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(map(e.a), map(e.b), e.word.clone()))
            .collect();
        let names = perm.iter().map(|&k| self.names[k].clone()).collect();
        Diagram::new(self.surface.clone(), names, edges, self.loops.clone())
    }

    /// Removes crossing `p` by smoothing it with `marker`. Edges joined through
    /// `p` are concatenated; closed chains become new free loops after the old ones.
    pub fn smooth_crossing(&self, p: usize, marker: Marker) -> (Diagram, Lineage) {
        let n = self.crossing_count();
        assert!(p < n);
        let shift = |e: Endpoint| Endpoint::new(if e.crossing > p { e.crossing - 1 } else { e.crossing }, e.slot);
        let mut used = vec![false; self.edges.len()];
        let mut edges = Vec::new();
        let mut lineage = Lineage::default();
        // walk from `start` (a slot not at p) along edges, jumping through p
        let walk = |start: Endpoint, used: &mut Vec<bool>| -> (Endpoint, CurveWord, Vec<Atom>) {
            let mut word = CurveWord::empty();
            let mut atoms = Vec::new();
            let mut cur = start;
            loop {
                let (e, is_a) = self.edge_at(cur);
                used[e] = true;
                atoms.push(Atom::Edge(e));
                let edge = &self.edges[e];
                let to = if is_a {
                    word.extend(&edge.word);
                    edge.b
                } else {
                    word.extend(&edge.word.inverse());
                    edge.a
                };
                if to.crossing != p {
                    return (to, word, atoms);
                }
                cur = Endpoint::new(p, partner(to.slot, marker));
            }
        };
        let mut done: BTreeSet<Endpoint> = BTreeSet::new();
        for e in &self.edges {
            for start in [e.a, e.b] {
                if start.crossing == p || done.contains(&start) {
                    continue;
                }
                let (end, word, mut atoms) = walk(start, &mut used);
                done.insert(start);
                done.insert(end);
                atoms.sort();
                atoms.dedup();
                edges.push(Edge::new(shift(start), shift(end), word));
                lineage.edges.push(atoms);
            }
        }
        let mut loops = self.loops.clone();
        lineage.loops = (0..loops.len()).map(|l| vec![Atom::Loop(l)]).collect();
        for s in 0..4u8 {
            let (e, _) = self.edge_at(Endpoint::new(p, s));
            if used[e] {
                continue;
            }
            // closed chain through p only
            let mut word = CurveWord::empty();
            let mut atoms = Vec::new();
            let mut cur = Endpoint::new(p, s);
            loop {
                let (e, is_a) = self.edge_at(cur);
                if used[e] {
                    break;
                }
                used[e] = true;
                atoms.push(Atom::Edge(e));
                let edge = &self.edges[e];
                let to = if is_a {
                    word.extend(&edge.word);
                    edge.b
                } else {
                    word.extend(&edge.word.inverse());
                    edge.a
                };
                cur = Endpoint::new(p, partner(to.slot, marker));
            }
            atoms.sort();
            loops.push(word);
            lineage.loops.push(atoms);
        }
        let mut names = self.names.clone();
        names.remove(p);
        lineage.crossings = (0..n).filter(|&c| c != p).map(Some).collect();
        let d = Diagram::new(self.surface.clone(), names, edges, loops).unwrap();
        (d, lineage)
    }

    /// Replaces the surface; words must stay valid.
    pub fn with_surface(&self, surface: SurfaceModel) -> Result<Diagram, DiagramError> {
        Diagram::new(surface, self.names.clone(), self.edges.clone(), self.loops.clone())
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("x{k}")).collect()
}

pub(crate) fn invert_permutation(perm: &[usize], n: usize) -> Result<Vec<usize>, DiagramError> {
    if perm.len() != n {
        return Err(DiagramError::Permutation(n));
    }
    let mut inv = vec![usize::MAX; n];
    for (k, &old) in perm.iter().enumerate() {
        if old >= n || inv[old] != usize::MAX {
            return Err(DiagramError::Permutation(n));
        }
        inv[old] = k;
    }
    Ok(inv)
}

/// All marker vectors in enumeration order: crossing 0 most significant, `+` first.
pub fn marker_vectors(n: usize) -> impl Iterator<Item = Vec<Marker>> {
    (0u64..1 << n).map(move |idx| (0..n).map(|k| if idx >> (n - 1 - k) & 1 == 0 { 1 } else { -1 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::CurveKind;

    fn ep(c: usize, s: u8) -> Endpoint {
        Endpoint::new(c, s)
    }

    pub(crate) fn kink() -> Diagram {
        let e = CurveWord::empty();
        Diagram::with_crossings(
            SurfaceModel::disk(),
            1,
            vec![Edge::new(ep(0, 0), ep(0, 1), e.clone()), Edge::new(ep(0, 2), ep(0, 3), e)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn kink_smoothings() {
        let d = kink();
        let s = d.smooth(&[1]);
        assert_eq!(s.circles.len(), 2);
        assert!(s.circles.iter().all(|c| c.class.kind == CurveKind::Trivial));
        assert_eq!(d.smooth(&[-1]).circles.len(), 1);
    }

    #[test]
    fn mirror_exchanges_markers() {
        let d = kink();
        let m = d.mirror();
        assert_eq!(m.smooth(&[1]).circles.len(), d.smooth(&[-1]).circles.len());
        assert_eq!(m.smooth(&[-1]).circles.len(), d.smooth(&[1]).circles.len());
        let mm = m.mirror();
        for mv in marker_vectors(1) {
            let a: BTreeSet<_> = mm.smooth(&mv).circles.into_iter().map(|c| c.atoms).collect();
            let b: BTreeSet<_> = d.smooth(&mv).circles.into_iter().map(|c| c.atoms).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn free_loop_only() {
        let a: CurveWord = "a".parse().unwrap();
        let d = Diagram::with_crossings(SurfaceModel::annulus(), 0, vec![], vec![a.clone()]).unwrap();
        let s = d.smooth(&[]);
        assert_eq!(s.circles.len(), 1);
        assert_eq!(s.circles[0].word, a);
    }

    #[test]
    fn invalid_matching() {
        let e = CurveWord::empty();
        let r = Diagram::with_crossings(
            SurfaceModel::disk(),
            1,
            vec![Edge::new(ep(0, 0), ep(0, 1), e.clone()), Edge::new(ep(0, 1), ep(0, 3), e)],
            vec![],
        );
        assert!(matches!(r, Err(DiagramError::Slot { .. })));
    }

    #[test]
    fn smoothing_a_crossing_matches_markers() {
        let d = kink();
        for m in [1, -1] {
            let (d0, lin) = d.smooth_crossing(0, m);
            assert_eq!(d0.crossing_count(), 0);
            let full = d.smooth(&[m]);
            let part = d0.smooth(&[]);
            assert_eq!(full.circles.len(), part.circles.len());
            for c in &part.circles {
                let (src, fresh) = lin.trace(c);
                assert!(!fresh);
                assert!(full.circles.iter().any(|f| f.atoms.iter().copied().collect::<BTreeSet<_>>() == src));
            }
        }
    }

    #[test]
    fn torus_single_crossing_keeps_count() {
        // meridian and longitude meeting once: both smoothings give one curve
        let t = SurfaceModel::orientable(1, 1).unwrap();
        let d = Diagram::with_crossings(
            t,
            1,
            vec![
                Edge::new(ep(0, 0), ep(0, 2), "a".parse().unwrap()),
                Edge::new(ep(0, 1), ep(0, 3), "b".parse().unwrap()),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(d.smooth(&[1]).circles.len(), 1);
        assert_eq!(d.smooth(&[-1]).circles.len(), 1);
    }

    #[test]
    fn reorder_rejects_bad_permutation() {
        let d = kink();
        assert!(d.reorder_crossings(&[0]).is_ok());
        assert!(d.reorder_crossings(&[1]).is_err());
        assert!(d.reorder_crossings(&[0, 0]).is_err());
    }
}
