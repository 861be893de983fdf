//! Enhanced states, their gradings (i, j, s), and the differential.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::diagram::{Diagram, Marker, Smoothing};
use crate::error::HomologyError;
use crate::matrix::Matrix;
use crate::surface::{CurveKind, GradingS};

/// Marker bits and label bits. Marker bit `n - 1 - k` is set when crossing `k`
/// is negative; label bit `c - 1 - r` is set when circle `r` is negative, so
/// that enumeration order is increasing key order.
pub type StateKey = (u32, u64);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnhancedState {
    pub markers: u32,
    pub labels: u64,
    crossings: usize,
    circles: usize,
    pub i: i64,
    pub tau: i64,
    pub j: i64,
    pub psi: GradingS,
    /// Number of negative markers.
    pub m: usize,
}

impl EnhancedState {
    pub fn key(&self) -> StateKey {
        (self.markers, self.labels)
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings
    }

    pub fn circle_count(&self) -> usize {
        self.circles
    }

    pub fn marker(&self, k: usize) -> Marker {
        if self.markers >> (self.crossings - 1 - k) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn label(&self, r: usize) -> i8 {
        if self.labels >> (self.circles - 1 - r) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn marker_vec(&self) -> Vec<Marker> {
        (0..self.crossings).map(|k| self.marker(k)).collect()
    }

    pub fn label_vec(&self) -> Vec<i8> {
        (0..self.circles).map(|r| self.label(r)).collect()
    }

    /// Negative markers at crossings after `v`.
    pub fn t(&self, v: usize) -> usize {
        (v + 1..self.crossings).filter(|&k| self.marker(k) < 0).count()
    }

    /// Positive markers at crossings after `v`.
    pub fn t_plus(&self, v: usize) -> usize {
        (v + 1..self.crossings).filter(|&k| self.marker(k) > 0).count()
    }

    /// Negative markers at crossings before `v`.
    pub fn t_before(&self, v: usize) -> usize {
        (0..v).filter(|&k| self.marker(k) < 0).count()
    }
}

pub fn marker_bits(markers: &[Marker]) -> u32 {
    let n = markers.len();
    markers
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &m)| if m < 0 { acc | 1 << (n - 1 - k) } else { acc })
}

pub fn label_bits(labels: &[i8]) -> u64 {
    let c = labels.len();
    labels
        .iter()
        .enumerate()
        .fold(0, |acc, (r, &l)| if l < 0 { acc | 1 << (c - 1 - r) } else { acc })
}

/// How the circles change when one crossing goes from `+` to `-`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub target: u32,
    /// Unchanged circles: (index before, index after).
    pub common: Vec<(usize, usize)>,
    pub old: Vec<usize>,
    pub new: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignRule {
    /// `(-1)^t` with `t` the negative markers after the crossing.
    Standard,
    /// `(-1)^t` with `t` the positive markers after the crossing.
    Plus,
}

/// All smoothings of a diagram, indexed by marker bits.
#[derive(Clone, Debug)]
pub struct StateSpace {
    diagram: Diagram,
    smoothings: Vec<Smoothing>,
}

impl StateSpace {
    pub fn new(d: &Diagram) -> StateSpace {
        let n = d.crossing_count();
        assert!(n <= 24, "too many crossings to enumerate states");
        let smoothings = (0u32..1 << n).map(|idx| d.smooth(&Self::decode(idx, n))).collect();
        StateSpace { diagram: d.clone(), smoothings }
    }

    fn decode(idx: u32, n: usize) -> Vec<Marker> {
        (0..n).map(|k| if idx >> (n - 1 - k) & 1 == 1 { -1 } else { 1 }).collect()
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn crossing_count(&self) -> usize {
        self.diagram.crossing_count()
    }

    pub fn smoothing(&self, markers: u32) -> &Smoothing {
        &self.smoothings[markers as usize]
    }

    pub fn markers(&self, idx: u32) -> Vec<Marker> {
        Self::decode(idx, self.crossing_count())
    }

    pub fn state(&self, markers: u32, labels: u64) -> EnhancedState {
        let n = self.crossing_count();
        let sm = self.smoothing(markers);
        let c = sm.circles.len();
        assert!(c < 64, "too many circles");
        let m = markers.count_ones() as usize;
        let i = n as i64 - 2 * m as i64;
        let mut tau = 0;
        let mut psi = GradingS::zero();
        for (r, circle) in sm.circles.iter().enumerate() {
            let l: i64 = if labels >> (c - 1 - r) & 1 == 1 { -1 } else { 1 };
            match circle.class.kind {
                CurveKind::Trivial => tau += l,
                CurveKind::Unbounding => psi.add_term(circle.class.canonical.clone(), l),
                CurveKind::MoebiusBounding => {}
            }
        }
        EnhancedState { markers, labels, crossings: n, circles: c, i, tau, j: i + 2 * tau, psi, m }
    }

    pub fn state_from(&self, markers: &[Marker], labels: &[i8]) -> EnhancedState {
        self.state(marker_bits(markers), label_bits(labels))
    }

    /// Every enhanced state, in enumeration order.
    pub fn states(&self) -> impl Iterator<Item = EnhancedState> + '_ {
        (0u32..1 << self.crossing_count()).flat_map(move |idx| {
            let c = self.smoothing(idx).circles.len();
            (0u64..1 << c).map(move |lab| self.state(idx, lab))
        })
    }

    pub fn bit(&self, v: usize) -> u32 {
        1 << (self.crossing_count() - 1 - v)
    }

    pub fn transition(&self, markers: u32, v: usize) -> Transition {
        let target = markers | self.bit(v);
        let a = self.smoothing(markers);
        let b = self.smoothing(target);
        let pos: HashMap<&[crate::diagram::Atom], usize> =
            b.circles.iter().enumerate().map(|(k, c)| (c.atoms.as_slice(), k)).collect();
        let mut common = Vec::new();
        let mut old = Vec::new();
        let mut matched = vec![false; b.circles.len()];
        for (k, c) in a.circles.iter().enumerate() {
            let touches = c.slots.iter().any(|p| p.crossing == v);
            match pos.get(c.atoms.as_slice()).filter(|_| !touches) {
                Some(&t) => {
                    common.push((k, t));
                    matched[t] = true;
                }
                None => old.push(k),
            }
        }
        let new = (0..b.circles.len()).filter(|&t| !matched[t]).collect();
        Transition { target, common, old, new }
    }

    /// `d_v(S)`: states with incidence number one.
    pub fn partial_derivative(&self, s: &EnhancedState, v: usize) -> Vec<EnhancedState> {
        if s.marker(v) < 0 {
            return Vec::new();
        }
        let t = self.transition(s.markers, v);
        self.apply_transition(s, &t)
    }

    pub fn apply_transition(&self, s: &EnhancedState, t: &Transition) -> Vec<EnhancedState> {
        let a = self.smoothing(s.markers);
        let b = self.smoothing(t.target);
        let ca = a.circles.len();
        let cb = b.circles.len();
        let mut tau_old = 0;
        let mut psi_old = GradingS::zero();
        let mut mu_old = 0;
        for &k in &t.old {
            let l = s.label(k) as i64;
            match a.circles[k].class.kind {
                CurveKind::Trivial => tau_old += l,
                CurveKind::Unbounding => psi_old.add_term(a.circles[k].class.canonical.clone(), l),
                CurveKind::MoebiusBounding => mu_old += l,
            }
        }
        let mut base = 0u64;
        for &(k, r) in &t.common {
            if s.labels >> (ca - 1 - k) & 1 == 1 {
                base |= 1 << (cb - 1 - r);
            }
        }
        let mut out = Vec::new();
        for choice in 0u32..1 << t.new.len() {
            let mut tau_new = 0;
            let mut psi_new = GradingS::zero();
            let mut mu_new = 0;
            let mut labels = base;
            for (q, &r) in t.new.iter().enumerate() {
                let neg = choice >> (t.new.len() - 1 - q) & 1 == 1;
                let l = if neg { -1 } else { 1 };
                if neg {
                    labels |= 1 << (cb - 1 - r);
                }
                match b.circles[r].class.kind {
                    CurveKind::Trivial => tau_new += l,
                    CurveKind::Unbounding => psi_new.add_term(b.circles[r].class.canonical.clone(), l),
                    CurveKind::MoebiusBounding => mu_new += l,
                }
            }
            // a disk turning into a Moebius band frees the new label
            let one_to_one = t.old.len() == 1 && t.new.len() == 1;
            if tau_new == tau_old + 1 && psi_new == psi_old && (one_to_one || mu_new == mu_old) {
                out.push(self.state(t.target, labels));
            }
        }
        out.sort_by_key(|x| x.key());
        out
    }

    pub fn sign(&self, s: &EnhancedState, v: usize, rule: SignRule) -> i64 {
        let t = match rule {
            SignRule::Standard => s.t(v),
            SignRule::Plus => s.t_plus(v),
        };
        if t % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `d(S)` as a formal sum.
    pub fn differential(&self, s: &EnhancedState, rule: SignRule) -> Vec<(EnhancedState, i64)> {
        let mut acc: BTreeMap<StateKey, (EnhancedState, i64)> = BTreeMap::new();
        for v in 0..self.crossing_count() {
            let sg = self.sign(s, v, rule);
            for t in self.partial_derivative(s, v) {
                acc.entry(t.key()).or_insert((t, 0)).1 += sg;
            }
        }
        acc.into_values().filter(|x| x.1 != 0).collect()
    }

    /// Debug form: markers, then `(class:label)` per circle.
    pub fn describe(&self, s: &EnhancedState) -> String {
        let mut out: String = s.marker_vec().iter().map(|&m| if m > 0 { '+' } else { '-' }).collect();
        let sm = self.smoothing(s.markers);
        for (r, c) in sm.circles.iter().enumerate() {
            let l = if s.label(r) > 0 { '+' } else { '-' };
            if c.class.is_trivial() {
                let _ = write!(out, "(triv:{l})");
            } else {
                let _ = write!(out, "({}:{l}0)", c.class.canonical);
            }
        }
        out
    }
}

/// The states of one (j, s) summand, grouped by i, and its differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub j: i64,
    pub s: GradingS,
    pub groups: BTreeMap<i64, Vec<EnhancedState>>,
    /// `d[i]` maps the i group to the `i + step` group; rows index the target.
    pub d: BTreeMap<i64, Matrix>,
}

impl Block {
    pub fn dim(&self, i: i64) -> usize {
        self.groups.get(&i).map_or(0, |g| g.len())
    }

    /// The matrix leaving degree `i`, zero-sized when a side is empty.
    pub fn map_from(&self, i: i64, step: i64) -> Matrix {
        self.d
            .get(&i)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(i + step), self.dim(i)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    pub crossings: usize,
    /// -2 for the chain complex, +2 for its dual.
    pub step: i64,
    pub blocks: Vec<Block>,
    lookup: HashMap<(i64, GradingS), usize>,
    index: HashMap<StateKey, (usize, usize)>,
}

impl GradedComplex {
    pub fn new(d: &Diagram) -> GradedComplex {
        GradedComplex::build(&StateSpace::new(d), SignRule::Standard)
    }

    pub fn build(space: &StateSpace, rule: SignRule) -> GradedComplex {
        let mut grouped: BTreeMap<(i64, GradingS), BTreeMap<i64, Vec<EnhancedState>>> = BTreeMap::new();
        for s in space.states() {
            grouped.entry((s.j, s.psi.clone())).or_default().entry(s.i).or_default().push(s);
        }
        let mut blocks = Vec::with_capacity(grouped.len());
        let mut lookup = HashMap::new();
        let mut index = HashMap::new();
        for ((j, s), groups) in grouped {
            let b = blocks.len();
            lookup.insert((j, s.clone()), b);
            for g in groups.values() {
                for (p, st) in g.iter().enumerate() {
                    index.insert(st.key(), (b, p));
                }
            }
            blocks.push(Block { j, s, groups, d: BTreeMap::new() });
        }
        let n = space.crossing_count();
        let mut cache: HashMap<(u32, usize), Transition> = HashMap::new();
        for block in &mut blocks {
            let mut d = BTreeMap::new();
            for (&i, g) in &block.groups {
                let Some(target) = block.groups.get(&(i - 2)) else { continue };
                let mut m = Matrix::zeros(target.len(), g.len());
                for (col, s) in g.iter().enumerate() {
                    for v in 0..n {
                        if s.marker(v) < 0 {
                            continue;
                        }
                        let t = cache.entry((s.markers, v)).or_insert_with(|| space.transition(s.markers, v));
                        let sg = space.sign(s, v, rule);
                        for out in space.apply_transition(s, t) {
                            let (_, row) = index[&out.key()];
                            m.add(row, col, sg);
                        }
                    }
                }
                d.insert(i, m);
            }
            block.d = d;
        }
        GradedComplex { crossings: n, step: -2, blocks, lookup, index }
    }

    /// Assembles a complex from blocks whose group members label basis vectors.
    pub fn from_blocks(crossings: usize, step: i64, blocks: Vec<Block>) -> GradedComplex {
        let mut lookup = HashMap::new();
        let mut index = HashMap::new();
        for (b, block) in blocks.iter().enumerate() {
            lookup.insert((block.j, block.s.clone()), b);
            for g in block.groups.values() {
                for (p, st) in g.iter().enumerate() {
                    index.insert(st.key(), (b, p));
                }
            }
        }
        GradedComplex { crossings, step, blocks, lookup, index }
    }

    pub fn block(&self, j: i64, s: &GradingS) -> Option<&Block> {
        self.lookup.get(&(j, s.clone())).map(|&b| &self.blocks[b])
    }

    /// Block number and position within its i group.
    pub fn locate(&self, key: StateKey) -> Option<(usize, usize)> {
        self.index.get(&key).copied()
    }

    pub fn total_dim(&self) -> usize {
        self.index.len()
    }

    /// The cochain complex: transposed matrices raising i by 2.
    pub fn dual(&self) -> GradedComplex {
        let step = -self.step;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let d = b
                    .d
                    .iter()
                    .map(|(&i, m)| (i + self.step, m.transpose()))
                    .collect();
                Block { j: b.j, s: b.s.clone(), groups: b.groups.clone(), d }
            })
            .collect();
        GradedComplex { crossings: self.crossings, step, blocks, lookup: self.lookup.clone(), index: self.index.clone() }
    }

    /// Checks that consecutive matrices compose to zero.
    pub fn check_square(&self) -> Result<(), HomologyError> {
        for b in &self.blocks {
            for (&i, m) in &b.d {
                if let Some(next) = b.d.get(&(i + self.step)) {
                    if !next.mul(m).is_zero() {
                        return Err(HomologyError::NonzeroSquare { i, j: b.j, s: b.s.to_string() });
                    }
                }
            }
        }
        Ok(())
    }

    /// `sum_i (-1)^((j - i) / 2) dim C_i` for each block.
    pub fn chain_euler(&self) -> BTreeMap<(i64, GradingS), i64> {
        self.blocks
            .iter()
            .map(|b| {
                let e = b
                    .groups
                    .iter()
                    .map(|(&i, g)| if ((b.j - i) / 2) % 2 == 0 { g.len() as i64 } else { -(g.len() as i64) })
                    .sum();
                ((b.j, b.s.clone()), e)
            })
            .collect()
    }
}

pub fn enumerate_states(d: &Diagram) -> Vec<EnhancedState> {
    StateSpace::new(d).states().collect()
}

pub fn differential_matrices(d: &Diagram) -> GradedComplex {
    GradedComplex::new(d)
}

pub fn dual_matrices(c: &GradedComplex) -> GradedComplex {
    c.dual()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Edge, Endpoint};
    use crate::surface::{CurveWord, SurfaceModel};
    use proptest::prelude::*;

    fn loops(surface: SurfaceModel, words: &[&str]) -> Diagram {
        Diagram::with_crossings(surface, 0, vec![], words.iter().map(|w| w.parse().unwrap()).collect()).unwrap()
    }

    fn kink() -> Diagram {
        let e = CurveWord::empty();
        let ep = Endpoint::new;
        Diagram::with_crossings(
            SurfaceModel::disk(),
            1,
            vec![Edge::new(ep(0, 0), ep(0, 1), e.clone()), Edge::new(ep(0, 2), ep(0, 3), e)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn trivial_loop_states() {
        let st = enumerate_states(&loops(SurfaceModel::disk(), &[""]));
        let g: Vec<_> = st.iter().map(|s| (s.i, s.j, s.psi.is_zero())).collect();
        assert_eq!(g, vec![(0, 2, true), (0, -2, true)]);
    }

    #[test]
    fn annulus_loop_states() {
        let st = enumerate_states(&loops(SurfaceModel::annulus(), &["a"]));
        let a: CurveWord = "a".parse().unwrap();
        let g: Vec<_> = st.iter().map(|s| (s.i, s.j, s.psi.clone())).collect();
        assert_eq!(g, vec![(0, 0, GradingS::single(a.clone(), 1)), (0, 0, GradingS::single(a, -1))]);
    }

    #[test]
    fn kink_counts() {
        let st = enumerate_states(&kink());
        assert_eq!(st.len(), 6);
        assert_eq!(st.iter().filter(|s| s.i == 1).count(), 4);
        assert_eq!(st.iter().filter(|s| s.i == -1).count(), 2);
        let c = GradedComplex::new(&kink());
        c.check_square().unwrap();
    }

    #[test]
    fn merge_and_split_rows() {
        let d = kink();
        let sp = StateSpace::new(&d);
        // merging must raise tau by one
        for (l, want) in [
            ([1, 1], vec![]),
            ([1, -1], vec![vec![1]]),
            ([-1, 1], vec![vec![1]]),
            ([-1, -1], vec![vec![-1]]),
        ] {
            let out = sp.partial_derivative(&sp.state_from(&[1], &l), 0);
            assert_eq!(out.iter().map(|x| x.label_vec()).collect::<Vec<_>>(), want);
        }
        // split: the mirror kink has one circle under + and two under -
        let m = d.mirror();
        let sp = StateSpace::new(&m);
        let out = sp.partial_derivative(&sp.state_from(&[1], &[1]), 0);
        assert_eq!(out.iter().map(|x| x.label_vec()).collect::<Vec<_>>(), vec![vec![1, 1]]);
        let out = sp.partial_derivative(&sp.state_from(&[1], &[-1]), 0);
        let mut labels: Vec<_> = out.iter().map(|x| x.label_vec()).collect();
        labels.sort();
        assert_eq!(labels, vec![vec![-1, 1], vec![1, -1]]);
    }

    #[test]
    fn split_into_parallel_unbounding() {
        // a trivial circle on the annulus whose - smoothing gives two copies of the core
        let ep = Endpoint::new;
        let d = Diagram::with_crossings(
            SurfaceModel::annulus(),
            1,
            vec![
                Edge::new(ep(0, 0), ep(0, 3), "a".parse().unwrap()),
                Edge::new(ep(0, 1), ep(0, 2), "a".parse().unwrap()),
            ],
            vec![],
        )
        .unwrap();
        let sp = StateSpace::new(&d);
        let plus = sp.smoothing(0);
        assert_eq!(plus.circles.len(), 1);
        assert!(plus.circles[0].class.is_trivial());
        assert_eq!(sp.smoothing(1).circles.len(), 2);
        let out = sp.partial_derivative(&sp.state_from(&[1], &[-1]), 0);
        let mut labels: Vec<_> = out.iter().map(|x| x.label_vec()).collect();
        labels.sort();
        assert_eq!(labels, vec![vec![-1, 1], vec![1, -1]]);
        assert!(sp.partial_derivative(&sp.state_from(&[1], &[1]), 0).is_empty());
    }

    #[test]
    fn disk_to_moebius_band() {
        let d: Diagram = "surface moebius\ncrossing x1\nedge x1.0 x1.2 : a\nedge x1.1 x1.3 : a\n".parse().unwrap();
        let sp = StateSpace::new(&d);
        assert!(sp.smoothing(0).circles[0].class.is_trivial());
        assert_eq!(sp.smoothing(1).circles[0].class.kind, CurveKind::MoebiusBounding);
        assert!(sp.partial_derivative(&sp.state_from(&[1], &[1]), 0).is_empty());
        let out = sp.partial_derivative(&sp.state_from(&[1], &[-1]), 0);
        let labels: Vec<_> = out.iter().map(|x| x.label_vec()).collect();
        assert_eq!(labels, vec![vec![1], vec![-1]]);
        assert!(out.iter().all(|x| x.j == -1 && x.psi.is_zero()));
    }

    #[test]
    fn describe_format() {
        let d = loops(SurfaceModel::annulus(), &["a", ""]);
        let sp = StateSpace::new(&d);
        let s = sp.state_from(&[], &[1, -1]);
        assert_eq!(sp.describe(&s), "(a:+0)(triv:-)");
    }

    #[test]
    fn dual_twice_is_identity() {
        let c = GradedComplex::new(&kink().mirror());
        assert_eq!(c.dual().dual(), c);
        assert!(GradedComplex::new(&loops(SurfaceModel::disk(), &[])).blocks.iter().all(|b| b.d.is_empty()));
    }

    proptest! {
        #[test]
        fn grading_invariants(seed in 0u64..200) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let surfaces = [SurfaceModel::annulus(), SurfaceModel::orientable(1, 1).unwrap(), SurfaceModel::moebius_band()];
            let s = &surfaces[(seed % 3) as usize];
            let g = crate::morse::random_diagram(s, &crate::morse::MorseOptions { max_crossings: 4, ..Default::default() }, &mut rng);
            let sp = StateSpace::new(&g.diagram);
            let n = g.diagram.crossing_count() as i64;
            for st in sp.states() {
                prop_assert_eq!((st.j - st.i).rem_euclid(2), 0);
                prop_assert_eq!((st.i - n).rem_euclid(2), 0);
                for v in 0..g.diagram.crossing_count() {
                    for t in sp.partial_derivative(&st, v) {
                        prop_assert_eq!(t.j, st.j);
                        prop_assert_eq!(&t.psi, &st.psi);
                        prop_assert_eq!(t.i, st.i - 2);
                    }
                }
            }
            let c = GradedComplex::build(&sp, SignRule::Standard);
            prop_assert!(c.check_square().is_ok());
            let cp = GradedComplex::build(&sp, SignRule::Plus);
            prop_assert!(cp.check_square().is_ok());
        }
    }
}
