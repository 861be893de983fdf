//! Reidemeister moves. New crossings go first in the crossing order.

use std::collections::BTreeMap;

use super::{Atom, Diagram, Edge, Endpoint, Lineage};
use crate::error::DiagramError;
use crate::surface::CurveWord;

/// An edge or a free loop of a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strand {
    Edge(usize),
    Loop(usize),
}

/// Which pair of adjacent slots holds the kink.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum R1Side {
    /// kink on slots 1 and 2; the strand enters at 0 and leaves at 3
    Left,
    /// kink on slots 3 and 0; the strand enters at 1 and leaves at 2
    Right,
}

/// Pushes `over` across `under`. Read in the stated directions, the two
/// strands run side by side with `over` on the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct R2Site {
    pub over: Strand,
    pub over_reversed: bool,
    pub under: Strand,
    pub under_reversed: bool,
}

/// A triangular face: for each corner, the slot `k` such that slots `k` and
/// `k + 1` bound the face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct R3Site {
    pub corners: [(usize, u8); 3],
}

fn site(msg: impl Into<String>) -> DiagramError {
    DiagramError::Site(msg.into())
}

type Parts = (Vec<Edge>, Vec<Vec<Atom>>, Vec<CurveWord>, Vec<Vec<Atom>>);

/// A strand cut open: its start, end, word, and source atom. Loops have no ends.
struct Cut {
    ends: Option<(Endpoint, Endpoint)>,
    word: CurveWord,
    atom: Atom,
}

impl Diagram {
    fn cut(&self, s: Strand, reversed: bool) -> Result<Cut, DiagramError> {
        let cut = match s {
            Strand::Edge(e) => {
                let edge = self.edges.get(e).ok_or_else(|| site(format!("no edge {e}")))?;
                Cut { ends: Some((edge.a, edge.b)), word: edge.word.clone(), atom: Atom::Edge(e) }
            }
            Strand::Loop(l) => {
                let w = self.loops.get(l).ok_or_else(|| site(format!("no loop {l}")))?;
                Cut { ends: None, word: w.clone(), atom: Atom::Loop(l) }
            }
        };
        if reversed {
            Ok(Cut { ends: cut.ends.map(|(a, b)| (b, a)), word: cut.word.inverse(), atom: cut.atom })
        } else {
            Ok(cut)
        }
    }

    /// Inserts `t` new crossings at the front and returns the untouched parts
    /// with their lineage; `drop` lists strands that will be rebuilt.
    fn rebuild_base(&self, t: usize, drop: &[Strand]) -> Parts {
        let sh = |p: Endpoint| Endpoint::new(p.crossing + t, p.slot);
        let mut edges = Vec::new();
        let mut elin = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if drop.contains(&Strand::Edge(i)) {
                continue;
            }
            edges.push(Edge::new(sh(e.a), sh(e.b), e.word.clone()));
            elin.push(vec![Atom::Edge(i)]);
        }
        let mut loops = Vec::new();
        let mut llin = Vec::new();
        for (i, w) in self.loops.iter().enumerate() {
            if drop.contains(&Strand::Loop(i)) {
                continue;
            }
            loops.push(w.clone());
            llin.push(vec![Atom::Loop(i)]);
        }
        (edges, elin, loops, llin)
    }

    fn finish(
        &self,
        t: usize,
        edges: Vec<Edge>,
        elin: Vec<Vec<Atom>>,
        loops: Vec<CurveWord>,
        llin: Vec<Vec<Atom>>,
    ) -> (Diagram, Lineage) {
        let mut names = fresh_names(&self.names, t);
        names.extend(self.names.iter().cloned());
        let crossings = (0..t).map(|_| None).chain((0..self.crossing_count()).map(Some)).collect();
        let d = Diagram::new(self.surface.clone(), names, edges, loops).expect("move produced a valid diagram");
        (d, Lineage { edges: elin, loops: llin, crossings })
    }

    /// Routes a cut strand through the new slots `passes` (entry, exit), in order.
    fn route(cut: &Cut, t: usize, passes: &[(Endpoint, Endpoint)], edges: &mut Vec<Edge>, elin: &mut Vec<Vec<Atom>>) {
        let sh = |p: Endpoint| Endpoint::new(p.crossing + t, p.slot);
        let k = passes.len();
        match cut.ends {
            Some((a, b)) => {
                edges.push(Edge::new(sh(a), passes[0].0, CurveWord::empty()));
                elin.push(vec![cut.atom]);
                for w in passes.windows(2) {
                    edges.push(Edge::new(w[0].1, w[1].0, CurveWord::empty()));
                    elin.push(vec![]);
                }
                edges.push(Edge::new(passes[k - 1].1, sh(b), cut.word.clone()));
                elin.push(vec![cut.atom]);
            }
            None => {
                for w in passes.windows(2) {
                    edges.push(Edge::new(w[0].1, w[1].0, CurveWord::empty()));
                    elin.push(vec![]);
                }
                edges.push(Edge::new(passes[k - 1].1, passes[0].0, cut.word.clone()));
                elin.push(vec![cut.atom]);
            }
        }
    }

    /// Adds a kink whose `-` smoothing splits off a small trivial circle.
    pub fn apply_r1_neg(&self, strand: Strand, side: R1Side) -> Result<(Diagram, Lineage), DiagramError> {
        let cut = self.cut(strand, false)?;
        let (mut edges, mut elin, loops, llin) = self.rebuild_base(1, &[strand]);
        let x = |s: u8| Endpoint::new(0, s);
        let (pass, kink) = match side {
            R1Side::Left => ((x(0), x(3)), (x(1), x(2))),
            R1Side::Right => ((x(1), x(2)), (x(3), x(0))),
        };
        Self::route(&cut, 1, &[pass], &mut edges, &mut elin);
        edges.push(Edge::new(kink.0, kink.1, CurveWord::empty()));
        elin.push(vec![]);
        Ok(self.finish(1, edges, elin, loops, llin))
    }

    /// Second move: new crossings `v` (index 0) and `w` (index 1).
    pub fn apply_r2(&self, s: R2Site) -> Result<(Diagram, Lineage), DiagramError> {
        if s.over == s.under {
            return Err(site("the two strands of a second move must differ"));
        }
        let over = self.cut(s.over, s.over_reversed)?;
        let under = self.cut(s.under, s.under_reversed)?;
        let (mut edges, mut elin, loops, llin) = self.rebuild_base(2, &[s.over, s.under]);
        let v = |k: u8| Endpoint::new(0, k);
        let w = |k: u8| Endpoint::new(1, k);
        Self::route(&over, 2, &[(v(2), v(0)), (w(2), w(0))], &mut edges, &mut elin);
        Self::route(&under, 2, &[(v(3), v(1)), (w(1), w(3))], &mut edges, &mut elin);
        Ok(self.finish(2, edges, elin, loops, llin))
    }

    /// The three triangle edges of a site, as (corner, next corner) with slots,
    /// after checking that the site bounds a triangular face with consistent heights.
    fn r3_triangle(&self, s: &R3Site) -> Result<Vec<(Endpoint, Endpoint)>, DiagramError> {
        let n = self.crossing_count();
        let cs: Vec<usize> = s.corners.iter().map(|c| c.0).collect();
        if cs.iter().any(|&c| c >= n) || cs[0] == cs[1] || cs[1] == cs[2] || cs[0] == cs[2] {
            return Err(site("third move needs three distinct crossings"));
        }
        if s.corners.iter().any(|c| c.1 > 3) {
            return Err(site("slot out of range"));
        }
        let slot_k = |c: usize| s.corners.iter().find(|x| x.0 == c).map(|x| x.1);
        let mut tri = Vec::new();
        for &(c, k) in &s.corners {
            let from = Endpoint::new(c, k);
            let to = self.opposite(from);
            let (e, _) = self.edge_at(from);
            if !self.edges[e].word.is_empty() {
                return Err(site("triangle edges must carry empty words"));
            }
            match slot_k(to.crossing) {
                Some(kt) if to.crossing != c && to.slot == (kt + 1) % 4 => tri.push((from, to)),
                _ => return Err(site(format!("slot {c}.{k} does not bound the face"))),
            }
        }
        // heights: strand i is the one along triangle edge i
        let strand_of = |p: Endpoint| -> usize {
            tri.iter()
                .position(|&(a, b)| a == p || b == p)
                .expect("triangle slot")
        };
        let mut above = [[false; 3]; 3];
        for &(c, k) in &s.corners {
            let s1 = strand_of(Endpoint::new(c, k));
            let s2 = strand_of(Endpoint::new(c, (k + 1) % 4));
            if k % 2 == 0 {
                above[s1][s2] = true;
            } else {
                above[s2][s1] = true;
            }
        }
        let cyclic = (above[0][1] && above[1][2] && above[2][0]) || (above[1][0] && above[2][1] && above[0][2]);
        if cyclic {
            return Err(site("heights around the triangle are cyclic"));
        }
        Ok(tri)
    }

    /// Third move: slides the strand opposite each corner across it. The
    /// three corners become crossings 0, 1, 2 in site order.
    pub fn apply_r3(&self, s: R3Site) -> Result<(Diagram, Lineage), DiagramError> {
        let tri = self.r3_triangle(&s)?;
        let n = self.crossing_count();
        let corners: Vec<usize> = s.corners.iter().map(|c| c.0).collect();
        let mut order = corners.clone();
        order.extend((0..n).filter(|c| !corners.contains(c)));
        let mut pos = vec![0; n];
        for (k, &c) in order.iter().enumerate() {
            pos[c] = k;
        }
        let re = |p: Endpoint| Endpoint::new(pos[p.crossing], p.slot);
        let far = |p: Endpoint| Endpoint::new(p.crossing, (p.slot + 2) % 4);
        let mut newpos: BTreeMap<Endpoint, Endpoint> = BTreeMap::new();
        let mut fresh = Vec::new();
        for &(x, y) in &tri {
            newpos.insert(far(y), x);
            newpos.insert(far(x), y);
            fresh.push(Edge::new(re(far(x)), re(far(y)), CurveWord::empty()));
        }
        let tri_edges: Vec<usize> = tri.iter().map(|&(x, _)| self.edge_at(x).0).collect();
        let mut edges = Vec::new();
        let mut elin = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if tri_edges.contains(&i) {
                continue;
            }
            let m = |p: Endpoint| re(*newpos.get(&p).unwrap_or(&p));
            edges.push(Edge::new(m(e.a), m(e.b), e.word.clone()));
            elin.push(vec![Atom::Edge(i)]);
        }
        for e in fresh {
            edges.push(e);
            elin.push(vec![]);
        }
        let names = order.iter().map(|&c| self.names[c].clone()).collect();
        let d = Diagram::new(self.surface.clone(), names, edges, self.loops.clone())
            .expect("third move produced a valid diagram");
        let lin = Lineage {
            edges: elin,
            loops: (0..self.loops.len()).map(|l| vec![Atom::Loop(l)]).collect(),
            crossings: order.iter().map(|&c| Some(c)).collect(),
        };
        Ok((d, lin))
    }

    /// Checks a third-move site without applying it.
    pub fn is_r3_site(&self, s: &R3Site) -> bool {
        self.r3_triangle(s).is_ok()
    }
}

fn fresh_names(existing: &[String], t: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut k = existing.len() + 1;
    while out.len() < t {
        let name = format!("x{k}");
        if !existing.contains(&name) && !out.contains(&name) {
            out.push(name);
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceModel;

    #[test]
    fn r1_on_loop() {
        let a: CurveWord = "a".parse().unwrap();
        let d = Diagram::with_crossings(SurfaceModel::annulus(), 0, vec![], vec![a]).unwrap();
        for side in [R1Side::Left, R1Side::Right] {
            let (k, lin) = d.apply_r1_neg(Strand::Loop(0), side).unwrap();
            assert_eq!(k.crossing_count(), 1);
            assert_eq!(k.smooth(&[1]).circles.len(), 1);
            let minus = k.smooth(&[-1]);
            assert_eq!(minus.circles.len(), 2);
            let fresh: Vec<_> = minus.circles.iter().filter(|c| lin.trace(c).0.is_empty()).collect();
            assert_eq!(fresh.len(), 1);
            assert!(fresh[0].class.is_trivial());
        }
    }

    #[test]
    fn r2_smoothings() {
        let a: CurveWord = "a".parse().unwrap();
        let b: CurveWord = "b".parse().unwrap();
        let d = Diagram::with_crossings(SurfaceModel::planar_holes(2).unwrap(), 0, vec![], vec![a, b]).unwrap();
        let site = R2Site { over: Strand::Loop(0), over_reversed: false, under: Strand::Loop(1), under_reversed: false };
        let (d2, _) = d.apply_r2(site).unwrap();
        assert_eq!(d2.crossing_count(), 2);
        assert_eq!(d2.smooth(&[-1, 1]).circles.len(), 2);
        assert_eq!(d2.smooth(&[1, -1]).circles.len(), 2);
        assert_eq!(d2.smooth(&[-1, -1]).circles.len(), 1);
        assert_eq!(d2.smooth(&[1, 1]).circles.len(), 1);
        assert!(d.apply_r2(R2Site { over: Strand::Loop(0), over_reversed: false, under: Strand::Loop(0), under_reversed: false }).is_err());
    }
}
