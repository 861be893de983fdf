//! Diagrams built from a Morse tangle in the disk whose top ends run out
//! through the bands. Every such diagram is drawable on its surface, and the
//! builder remembers where second and third moves can be applied.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Diagram, Edge, Endpoint, R2Site, R3Site, Strand};
use crate::error::DiagramError;
use crate::surface::{CurveWord, Letter, SurfaceModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorseOp {
    /// New arc whose two ends sit at positions `i`, `i + 1`.
    Cup(usize),
    /// Joins the strands at positions `i`, `i + 1`.
    Cap(usize),
    /// Crosses the strands at positions `at`, `at + 1`; `over_left` puts the
    /// strand coming from the lower left on top.
    Cross { at: usize, over_left: bool },
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub diagram: Diagram,
    pub r2_sites: Vec<R2Site>,
    pub r3_sites: Vec<R3Site>,
}

#[derive(Clone, Copy, Debug)]
pub struct MorseOptions {
    pub max_crossings: usize,
    pub max_per_band: usize,
    pub max_ports: usize,
    /// Insert a braid triangle with consistent heights when room allows.
    pub plant_r3: bool,
}

impl Default for MorseOptions {
    fn default() -> Self {
        MorseOptions { max_crossings: 4, max_per_band: 2, max_ports: 4, plant_r3: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Slot(Endpoint),
    Temp,
    Port,
}

struct Builder {
    nodes: Vec<Node>,
    links: Vec<(usize, usize, CurveWord)>,
    up: Vec<Option<(usize, bool)>>,
    cur: Vec<usize>,
    crossings: usize,
    pairs: Vec<(usize, usize)>,
    triangles: Vec<[(usize, u8); 3]>,
    history: Vec<(MorseOp, usize)>,
}

impl Builder {
    fn node(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.up.push(None);
        self.nodes.len() - 1
    }

    fn link(&mut self, a: usize, b: usize, word: CurveWord) -> usize {
        self.links.push((a, b, word));
        self.links.len() - 1
    }

    fn rise(&mut self, lower: usize, upper: usize) {
        let l = self.link(lower, upper, CurveWord::empty());
        self.up[lower] = Some((l, true));
    }

    fn record_pairs(&mut self) {
        for w in self.cur.windows(2) {
            self.pairs.push((w[0], w[1]));
        }
    }

    fn apply(&mut self, op: MorseOp) -> Result<(), DiagramError> {
        let bad = || DiagramError::Site(format!("Morse operation {op:?} out of range"));
        match op {
            MorseOp::Cup(i) => {
                if i > self.cur.len() {
                    return Err(bad());
                }
                let t1 = self.node(Node::Temp);
                let t2 = self.node(Node::Temp);
                self.link(t1, t2, CurveWord::empty());
                self.cur.splice(i..i, [t1, t2]);
            }
            MorseOp::Cap(i) => {
                if i + 1 >= self.cur.len() {
                    return Err(bad());
                }
                let (a, b) = (self.cur[i], self.cur[i + 1]);
                let l = self.link(a, b, CurveWord::empty());
                self.up[a] = Some((l, true));
                self.up[b] = Some((l, false));
                self.cur.drain(i..i + 2);
            }
            MorseOp::Cross { at, over_left } => {
                if at + 1 >= self.cur.len() {
                    return Err(bad());
                }
                let c = self.crossings;
                self.crossings += 1;
                // slots in counterclockwise order, over strand through 0 and 2
                let (tr, tl, bl, br) = if over_left { (0, 1, 2, 3) } else { (3, 0, 1, 2) };
                let s = |k: u8| Node::Slot(Endpoint::new(c, k));
                let nbl = self.node(s(bl));
                let nbr = self.node(s(br));
                let ntl = self.node(s(tl));
                let ntr = self.node(s(tr));
                self.rise(self.cur[at], nbl);
                self.rise(self.cur[at + 1], nbr);
                self.cur[at] = ntl;
                self.cur[at + 1] = ntr;
                self.history.push((op, c));
                self.triangle_check();
            }
        }
        self.record_pairs();
        Ok(())
    }

    /// Records `Cross(i) Cross(i+1) Cross(i)` as a triangle site.
    fn triangle_check(&mut self) {
        let h = &self.history;
        if h.len() < 3 {
            return;
        }
        let (MorseOp::Cross { at: a1, over_left: o1 }, c1) = h[h.len() - 3] else { return };
        let (MorseOp::Cross { at: a2, over_left: o2 }, c2) = h[h.len() - 2] else { return };
        let (MorseOp::Cross { at: a3, over_left: o3 }, c3) = h[h.len() - 1] else { return };
        if a2 != a1 + 1 || a3 != a1 {
            return;
        }
        let k1 = if o1 { 0 } else { 3 };
        let k2 = if o2 { 1 } else { 0 };
        let k3 = if o3 { 2 } else { 1 };
        self.triangles.push([(c1, k1), (c2, k2), (c3, k3)]);
    }

    fn close(mut self, surface: &SurfaceModel, mult: &[usize]) -> Result<Generated, DiagramError> {
        let ports: usize = 2 * mult.iter().sum::<usize>();
        if self.cur.len() != ports {
            return Err(DiagramError::Site(format!("tangle ends with {} strands, bands need {ports}", self.cur.len())));
        }
        let port_nodes: Vec<usize> = (0..ports).map(|_| self.node(Node::Port)).collect();
        for (k, &p) in port_nodes.iter().enumerate() {
            let lower = self.cur[k];
            self.rise(lower, p);
        }
        // ports of each band end, left to right along the attachment order
        let mut ends: Vec<Vec<Vec<usize>>> = vec![Vec::new(); mult.len()];
        let mut next = 0;
        for &b in surface.attachment() {
            ends[b].push(port_nodes[next..next + mult[b]].to_vec());
            next += mult[b];
        }
        for (b, e) in ends.iter().enumerate() {
            let m = mult[b];
            let flipped = surface.bands()[b].flipped;
            for i in 0..m {
                let j = if flipped { i } else { m - 1 - i };
                self.link(e[0][i], e[1][j], CurveWord::new(vec![Letter::new(b, false)]));
            }
        }
        self.contract(surface)
    }

    fn contract(self, surface: &SurfaceModel) -> Result<Generated, DiagramError> {
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); self.nodes.len()];
        for (l, (a, b, _)) in self.links.iter().enumerate() {
            adj[*a].push((l, true));
            adj[*b].push((l, false));
        }
        // strand of each link and whether the link runs along the strand direction
        let mut owner: Vec<Option<(Strand, bool)>> = vec![None; self.links.len()];
        let walk = |start: usize, first: (usize, bool), owner: &mut Vec<Option<(Strand, bool)>>, strand: Strand| -> (usize, CurveWord) {
            let mut word = CurveWord::empty();
            let mut step = first;
            loop {
                let (l, fwd) = step;
                owner[l] = Some((strand, fwd));
                let (a, b, w) = &self.links[l];
                let to = if fwd {
                    word.extend(w);
                    *b
                } else {
                    word.extend(&w.inverse());
                    *a
                };
                if matches!(self.nodes[to], Node::Slot(_)) || to == start {
                    return (to, word);
                }
                step = *adj[to].iter().find(|&&(ol, _)| ol != l).expect("degree two");
            }
        };
        let mut slot_nodes: Vec<(Endpoint, usize)> = self
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n {
                Node::Slot(e) => Some((*e, i)),
                _ => None,
            })
            .collect();
        slot_nodes.sort();
        let mut edges = Vec::new();
        for &(e, n) in &slot_nodes {
            let first = adj[n][0];
            if owner[first.0].is_some() {
                continue;
            }
            let strand = Strand::Edge(edges.len());
            let (to, word) = walk(n, first, &mut owner, strand);
            let Node::Slot(te) = self.nodes[to] else { unreachable!() };
            edges.push(Edge::new(e, te, word));
        }
        let mut loops = Vec::new();
        for l in 0..self.links.len() {
            if owner[l].is_some() {
                continue;
            }
            let start = self.links[l].0;
            let strand = Strand::Loop(loops.len());
            let (_, word) = walk(start, (l, true), &mut owner, strand);
            loops.push(word);
        }
        let diagram = Diagram::with_crossings(surface.clone(), self.crossings, edges, loops)?;

        let upward = |n: usize| -> (Strand, bool) {
            let (l, fwd) = self.up[n].expect("every strand end rises");
            let (s, along) = owner[l].expect("every link is owned");
            (s, fwd == along)
        };
        let mut r2_sites = Vec::new();
        for &(x, y) in &self.pairs {
            let (sx, ux) = upward(x);
            let (sy, uy) = upward(y);
            if sx == sy {
                continue;
            }
            for site in [
                R2Site { over: sx, over_reversed: !ux, under: sy, under_reversed: !uy },
                R2Site { over: sy, over_reversed: uy, under: sx, under_reversed: ux },
            ] {
                if !r2_sites.contains(&site) {
                    r2_sites.push(site);
                }
            }
        }
        let r3_sites = self
            .triangles
            .iter()
            .map(|&corners| R3Site { corners })
            .filter(|s| diagram.is_r3_site(s))
            .collect();
        Ok(Generated { diagram, r2_sites, r3_sites })
    }
}

/// Builds the diagram of a Morse tangle whose top strands leave through the
/// bands, `mult[b]` parallel strands through band `b`.
pub fn build(surface: &SurfaceModel, mult: &[usize], ops: &[MorseOp]) -> Result<Generated, DiagramError> {
    if mult.len() != surface.generator_count() {
        return Err(DiagramError::Site("one multiplicity per band is required".into()));
    }
    let mut b = Builder {
        nodes: Vec::new(),
        links: Vec::new(),
        up: Vec::new(),
        cur: Vec::new(),
        crossings: 0,
        pairs: Vec::new(),
        triangles: Vec::new(),
        history: Vec::new(),
    };
    for &op in ops {
        b.apply(op)?;
    }
    b.close(surface, mult)
}

/// A random band multiplicity vector and Morse word for the surface.
pub fn random_ops<R: Rng>(surface: &SurfaceModel, opts: &MorseOptions, rng: &mut R) -> (Vec<usize>, Vec<MorseOp>) {
    let k = surface.generator_count();
    let mut mult: Vec<usize> = (0..k).map(|_| rng.gen_range(0..=opts.max_per_band)).collect();
    while 2 * mult.iter().sum::<usize>() > opts.max_ports {
        let nz: Vec<usize> = (0..k).filter(|&b| mult[b] > 0).collect();
        let &b = nz.choose(rng).unwrap();
        mult[b] -= 1;
    }
    let ports = 2 * mult.iter().sum::<usize>();
    let target = rng.gen_range(0..=opts.max_crossings);
    let plant_at = (opts.plant_r3 && target >= 3).then(|| rng.gen_range(0..=target - 3));
    let mut ops = Vec::new();
    let mut strands = 0usize;
    let mut crossings = 0usize;
    let limit = ports.max(4) + 2;
    while crossings < target {
        if plant_at == Some(crossings) {
            if strands < 3 {
                ops.push(MorseOp::Cup(rng.gen_range(0..=strands)));
                strands += 2;
                continue;
            }
            let i = rng.gen_range(0..strands - 2);
            // heights of the strands at positions i, i + 1, i + 2
            let mut h = [0, 1, 2];
            h.shuffle(rng);
            ops.push(MorseOp::Cross { at: i, over_left: h[0] > h[1] });
            ops.push(MorseOp::Cross { at: i + 1, over_left: h[0] > h[2] });
            ops.push(MorseOp::Cross { at: i, over_left: h[1] > h[2] });
            crossings += 3;
            continue;
        }
        if strands < 2 {
            ops.push(MorseOp::Cup(rng.gen_range(0..=strands)));
            strands += 2;
            continue;
        }
        match rng.gen_range(0..6) {
            0..=3 => {
                ops.push(MorseOp::Cross { at: rng.gen_range(0..strands - 1), over_left: rng.gen_bool(0.5) });
                crossings += 1;
            }
            4 if strands < limit => {
                ops.push(MorseOp::Cup(rng.gen_range(0..=strands)));
                strands += 2;
            }
            5 if strands > 2 => {
                ops.push(MorseOp::Cap(rng.gen_range(0..strands - 1)));
                strands -= 2;
            }
            _ => {}
        }
    }
    while strands < ports {
        ops.push(MorseOp::Cup(rng.gen_range(0..=strands)));
        strands += 2;
    }
    while strands > ports {
        ops.push(MorseOp::Cap(rng.gen_range(0..strands - 1)));
        strands -= 2;
    }
    (mult, ops)
}

/// Every Morse word with exactly `crossings` crossings and at most `max_ops`
/// operations, for every multiplicity vector with at most `max_ports` ports.
pub fn enumerate(surface: &SurfaceModel, crossings: usize, max_ports: usize, max_ops: usize) -> Vec<Generated> {
    fn go(
        ops: &mut Vec<MorseOp>,
        strands: usize,
        left: usize,
        ports: usize,
        max_ops: usize,
        out: &mut Vec<Vec<MorseOp>>,
    ) {
        if left == 0 && strands == ports {
            out.push(ops.clone());
        }
        if ops.len() == max_ops {
            return;
        }
        let mut next = Vec::new();
        if strands < ports.max(2) + 2 {
            next.extend((0..=strands).map(MorseOp::Cup));
        }
        if strands >= 2 {
            next.extend((0..strands - 1).map(MorseOp::Cap));
            if left > 0 {
                for at in 0..strands - 1 {
                    next.extend([false, true].map(|over_left| MorseOp::Cross { at, over_left }));
                }
            }
        }
        for op in next {
            ops.push(op);
            let (s, l) = match op {
                MorseOp::Cup(_) => (strands + 2, left),
                MorseOp::Cap(_) => (strands - 2, left),
                MorseOp::Cross { .. } => (strands, left - 1),
            };
            go(ops, s, l, ports, max_ops, out);
            ops.pop();
        }
    }
    let k = surface.generator_count();
    let mut mults = vec![vec![]];
    for _ in 0..k {
        mults = mults
            .into_iter()
            .flat_map(|m: Vec<usize>| (0..=max_ports / 2).map(move |x| [m.clone(), vec![x]].concat()))
            .collect();
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for mult in mults.into_iter().filter(|m| 2 * m.iter().sum::<usize>() <= max_ports) {
        let mut words = Vec::new();
        go(&mut Vec::new(), 0, crossings, 2 * mult.iter().sum::<usize>(), max_ops, &mut words);
        for ops in words {
            if let Ok(g) = build(surface, &mult, &ops) {
                if seen.insert(g.diagram.to_string()) {
                    out.push(g);
                }
            }
        }
    }
    out
}

pub fn random_diagram<R: Rng>(surface: &SurfaceModel, opts: &MorseOptions, rng: &mut R) -> Generated {
    let (mult, ops) = random_ops(surface, opts, rng);
    build(surface, &mult, &ops).expect("random Morse word is well formed")
}

/// The closure of the 2-strand braid with three equal crossings, in the disk.
pub fn trefoil() -> Diagram {
    let ops = [
        MorseOp::Cup(0),
        MorseOp::Cup(1),
        MorseOp::Cross { at: 0, over_left: true },
        MorseOp::Cross { at: 0, over_left: true },
        MorseOp::Cross { at: 0, over_left: true },
        MorseOp::Cap(1),
        MorseOp::Cap(0),
    ];
    build(&SurfaceModel::disk(), &[], &ops).unwrap().diagram
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trefoil_is_one_component() {
        let t = trefoil();
        assert_eq!(t.crossing_count(), 3);
        assert_eq!(t.edges().len(), 6);
        assert!(t.loops().is_empty());
        // all-positive and all-negative smoothings of the standard trefoil
        let c: Vec<usize> = [[1, 1, 1], [-1, -1, -1]].iter().map(|m| t.smooth(m).circles.len()).collect();
        let mut c = c;
        c.sort();
        assert_eq!(c, vec![2, 3]);
    }

    #[test]
    fn bands_carry_words() {
        let s = SurfaceModel::annulus();
        let g = build(&s, &[1], &[MorseOp::Cup(0)]).unwrap();
        assert_eq!(g.diagram.loops().len(), 1);
        assert_eq!(crate::surface::reduce_cyclic(&g.diagram.loops()[0]).len(), 1);
        let m = SurfaceModel::moebius_band();
        let g = build(&m, &[1], &[MorseOp::Cup(0)]).unwrap();
        let c = m.classify(&g.diagram.loops()[0]).unwrap();
        assert_eq!(c.sided, -1);
    }

    #[test]
    fn random_diagrams_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let surfaces = [
            SurfaceModel::disk(),
            SurfaceModel::annulus(),
            SurfaceModel::planar_holes(2).unwrap(),
            SurfaceModel::orientable(1, 1).unwrap(),
            SurfaceModel::moebius_band(),
        ];
        let opts = MorseOptions { max_crossings: 5, plant_r3: true, ..Default::default() };
        let mut r3 = 0;
        for _ in 0..40 {
            for s in &surfaces {
                let g = random_diagram(s, &opts, &mut rng);
                assert!(g.diagram.crossing_count() <= 5);
                r3 += g.r3_sites.len();
                for site in &g.r2_sites {
                    g.diagram.apply_r2(*site).unwrap();
                }
                for site in &g.r3_sites {
                    g.diagram.apply_r3(*site).unwrap();
                }
            }
        }
        assert!(r3 > 0);
    }
}
