//! Chain level maps between state complexes: the skein triple maps, the
//! crossing reorder isomorphism, the Reidemeister maps, sign maps, the mirror
//! map, and checks for commutation, exactness and duality.
//!
//! Names used here for overloaded symbols: `reorder_iso` is the crossing
//! reorder map, `f_embed` and `g_embed` are the two second-move embeddings,
//! `g_map` is the sign map into `(C, d+)`, and `mirror_map` is the state map
//! into the mirror diagram.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::diagram::{Atom, Circle, Diagram, Lineage, Marker, R1Side, Strand};
use crate::error::ChainMapError;
use crate::homology::{homology, mod2_rank, rational_rank, Coefficients, HomologyTable};
use crate::matrix::Matrix;
use crate::state_complex::{marker_bits, EnhancedState, GradedComplex, SignRule, StateKey, StateSpace};
use crate::surface::GradingS;

mod r2;
mod r3;

pub use r2::{bigon_orientation, rho_ii, rho_ii_r2, BigonMaps};
pub use r3::{rho_iii, R3Check};

/// A finite formal sum of enhanced states.
pub type Chain = BTreeMap<StateKey, i64>;

fn mismatch(msg: impl Into<String>) -> ChainMapError {
    ChainMapError::Mismatch(msg.into())
}

/// A linear map given by the images of basis states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMap {
    cols: HashMap<StateKey, Vec<(StateKey, i64)>>,
}

impl SparseMap {
    pub fn new() -> SparseMap {
        SparseMap::default()
    }

    pub fn insert(&mut self, from: StateKey, image: Chain) {
        let v: Vec<_> = image.into_iter().filter(|x| x.1 != 0).collect();
        if v.is_empty() {
            self.cols.remove(&from);
        } else {
            self.cols.insert(from, v);
        }
    }

    pub fn image(&self, from: StateKey) -> &[(StateKey, i64)] {
        self.cols.get(&from).map_or(&[], |v| v.as_slice())
    }

    pub fn apply(&self, x: &Chain) -> Chain {
        let mut out = Chain::new();
        for (&k, &c) in x {
            for &(t, a) in self.image(k) {
                *out.entry(t).or_insert(0) += c * a;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn apply_basis(&self, from: StateKey) -> Chain {
        let mut out = Chain::new();
        for &(t, a) in self.image(from) {
            *out.entry(t).or_insert(0) += a;
        }
        out
    }

    /// `self` after `first`.
    pub fn after(&self, first: &SparseMap) -> SparseMap {
        let mut m = SparseMap::new();
        for (&k, img) in &first.cols {
            let x: Chain = img.iter().copied().collect();
            m.insert(k, self.apply(&x));
        }
        m
    }

    pub fn plus(&self, other: &SparseMap) -> SparseMap {
        let mut acc: HashMap<StateKey, Chain> = HashMap::new();
        for src in [self, other] {
            for (&k, img) in &src.cols {
                let e = acc.entry(k).or_default();
                for &(t, a) in img {
                    *e.entry(t).or_insert(0) += a;
                }
            }
        }
        let mut m = SparseMap::new();
        for (k, v) in acc {
            m.insert(k, v);
        }
        m
    }

    pub fn scale(&self, k: i64) -> SparseMap {
        SparseMap {
            cols: self
                .cols
                .iter()
                .map(|(&s, v)| (s, v.iter().map(|&(t, a)| (t, a * k)).collect()))
                .collect(),
        }
    }

    pub fn transpose(&self) -> SparseMap {
        let mut acc: HashMap<StateKey, Chain> = HashMap::new();
        for (&k, img) in &self.cols {
            for &(t, a) in img {
                *acc.entry(t).or_default().entry(k).or_insert(0) += a;
            }
        }
        let mut m = SparseMap::new();
        for (k, v) in acc {
            m.insert(k, v);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.cols.is_empty()
    }

    /// The differential of a state space as a sparse map.
    pub fn differential(space: &StateSpace, rule: SignRule) -> SparseMap {
        let mut m = SparseMap::new();
        for s in space.states() {
            m.insert(s.key(), space.differential(&s, rule).into_iter().map(|(t, c)| (t.key(), c)).collect());
        }
        m
    }
}

/// A map of state complexes of bidegree `shift` in (i, j). `parity` is `1`
/// for chain maps and `-1` for maps anticommuting with the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub name: String,
    pub shift: (i64, i64),
    pub parity: i64,
    pub map: SparseMap,
}

/// Outcome of a check, per (j, s) block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub blocks: BTreeMap<(i64, GradingS), bool>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> CheckReport {
        CheckReport { name: name.into(), blocks: BTreeMap::new() }
    }

    pub fn record(&mut self, j: i64, s: &GradingS, ok: bool) {
        let e = self.blocks.entry((j, s.clone())).or_insert(true);
        *e &= ok;
    }

    pub fn passed(&self) -> bool {
        self.blocks.values().all(|&b| b)
    }

    pub fn failures(&self) -> usize {
        self.blocks.values().filter(|&&b| !b).count()
    }

    pub fn merge(&mut self, other: &CheckReport) {
        for ((j, s), &ok) in &other.blocks {
            self.record(*j, s, ok);
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((j, s), ok) in &self.blocks {
            let s = if s.is_zero() { "0".to_string() } else { s.to_string() };
            writeln!(f, "{} {} ({},{})", if *ok { "PASS" } else { "FAIL" }, self.name, j, s)?;
        }
        Ok(())
    }
}

fn state_of(space: &StateSpace, k: StateKey) -> EnhancedState {
    space.state(k.0, k.1)
}

impl ChainMap {
    pub fn new(name: impl Into<String>, shift: (i64, i64), parity: i64, map: SparseMap) -> ChainMap {
        ChainMap { name: name.into(), shift, parity, map }
    }

    pub fn apply(&self, x: &Chain) -> Chain {
        self.map.apply(x)
    }

    /// `self` after `first`.
    pub fn after(&self, first: &ChainMap, name: impl Into<String>) -> ChainMap {
        ChainMap {
            name: name.into(),
            shift: (self.shift.0 + first.shift.0, self.shift.1 + first.shift.1),
            parity: self.parity * first.parity,
            map: self.map.after(&first.map),
        }
    }

    /// Checks the gradings of all images and `d' F = parity F d` on every
    /// state of `src`.
    pub fn check(&self, src: &StateSpace, src_d: &SparseMap, tgt: &StateSpace, tgt_d: &SparseMap) -> CheckReport {
        let mut rep = CheckReport::new(&self.name);
        for s in src.states() {
            let k = s.key();
            let img = self.map.apply_basis(k);
            let mut ok = img.keys().all(|&t| {
                let x = state_of(tgt, t);
                x.i == s.i + self.shift.0 && x.j == s.j + self.shift.1 && x.psi == s.psi
            });
            if ok {
                let lhs = tgt_d.apply(&img);
                let rhs = self.map.apply(&src_d.apply_basis(k));
                let rhs: Chain = rhs.into_iter().map(|(t, c)| (t, c * self.parity)).collect();
                ok = lhs == rhs;
            }
            rep.record(s.j, &s.psi, ok);
        }
        rep
    }

    /// The matrix from group `i` of block `(j, s)` of `src` to the matching
    /// group of `tgt`.
    pub fn block_matrix(&self, src: &GradedComplex, tgt: &GradedComplex, j: i64, s: &GradingS, i: i64) -> Matrix {
        let (ti, tj) = (i + self.shift.0, j + self.shift.1);
        let cols = src.block(j, s).map_or(0, |b| b.dim(i));
        let tb = tgt.block(tj, s);
        let rows = tb.map_or(0, |b| b.dim(ti));
        let mut m = Matrix::zeros(rows, cols);
        let Some(b) = src.block(j, s) else { return m };
        let Some(group) = b.groups.get(&i) else { return m };
        for (c, st) in group.iter().enumerate() {
            for &(t, a) in self.map.image(st.key()) {
                let (_, r) = tgt.locate(t).expect("image state belongs to the target");
                m.add(r, c, a);
            }
        }
        m
    }

    /// Rank of the induced map on homology out of `H_i` of block `(j, s)`.
    pub fn induced_rank(
        &self,
        src: &GradedComplex,
        tgt: &GradedComplex,
        j: i64,
        s: &GradingS,
        i: i64,
        field: Coefficients,
    ) -> usize {
        let f = self.block_matrix(src, tgt, j, s, i);
        let d_out = src.block(j, s).map_or_else(|| Matrix::zeros(0, f.cols()), |b| b.map_from(i, src.step));
        let (ti, tj) = (i + self.shift.0, j + self.shift.1);
        let d_in = tgt
            .block(tj, s)
            .map_or_else(|| Matrix::zeros(f.rows(), 0), |b| b.map_from(ti - tgt.step, tgt.step));
        induced_rank_of(&f, &d_out, &d_in, field)
    }
}

/// `rank [[f, d_in], [d_out, 0]] - rank d_out - rank d_in`: the rank of the
/// map a chain map `f` induces on homology.
pub fn induced_rank_of(f: &Matrix, d_out: &Matrix, d_in: &Matrix, field: Coefficients) -> usize {
    let rows = f.rows() + d_out.rows();
    let cols = f.cols() + d_in.cols();
    let mut m = Matrix::zeros(rows, cols);
    for r in 0..f.rows() {
        for c in 0..f.cols() {
            m.set(r, c, f.get(r, c));
        }
        for c in 0..d_in.cols() {
            m.set(r, f.cols() + c, d_in.get(r, c));
        }
    }
    for r in 0..d_out.rows() {
        for c in 0..d_out.cols() {
            m.set(f.rows() + r, c, d_out.get(r, c));
        }
    }
    rank(&m, field) - rank(d_out, field) - rank(d_in, field)
}

fn rank(m: &Matrix, field: Coefficients) -> usize {
    match field {
        Coefficients::Mod2 => mod2_rank(m),
        _ => rational_rank(m),
    }
}

/// Dimension of `H_i` of a block over a field.
pub fn homology_dim(c: &GradedComplex, j: i64, s: &GradingS, i: i64, field: Coefficients) -> usize {
    let Some(b) = c.block(j, s) else { return 0 };
    let out = b.map_from(i, c.step);
    let inc = b.map_from(i - c.step, c.step);
    b.dim(i) - rank(&out, field) - rank(&inc, field)
}

/// Matches the circles of two smoothings through a common set of atoms.
/// Each side is traced through its lineage (if any) and `ignore` is removed.
pub struct Transport<'a> {
    pub from: &'a StateSpace,
    pub from_lin: Option<Lineage>,
    pub to: &'a StateSpace,
    pub to_lin: Option<Lineage>,
    pub ignore: BTreeSet<Atom>,
}

fn traced(c: &Circle, lin: Option<&Lineage>, ignore: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    let set: BTreeSet<Atom> = match lin {
        Some(l) => l.trace(c).0,
        None => c.atoms.iter().copied().collect(),
    };
    set.difference(ignore).copied().collect()
}

impl Transport<'_> {
    /// The state of `to` with the given markers whose circles carry the labels
    /// of the matching circles of `s`; unmatched target circles get `fresh`.
    pub fn carry(&self, s: &EnhancedState, markers: &[Marker], fresh: i8) -> Result<EnhancedState, ChainMapError> {
        let a = self.from.smoothing(s.markers);
        let bits = marker_bits(markers);
        let b = self.to.smoothing(bits);
        let mut index: HashMap<BTreeSet<Atom>, usize> = HashMap::new();
        for (k, c) in a.circles.iter().enumerate() {
            let t = traced(c, self.from_lin.as_ref(), &self.ignore);
            if t.is_empty() || index.insert(t, k).is_some() {
                return Err(mismatch("source circles are not distinguishable"));
            }
        }
        let mut used = 0;
        let mut labels = Vec::with_capacity(b.circles.len());
        for c in &b.circles {
            let t = traced(c, self.to_lin.as_ref(), &self.ignore);
            match index.get(&t) {
                Some(&k) if !t.is_empty() => {
                    labels.push(s.label(k));
                    used += 1;
                }
                _ => labels.push(fresh),
            }
        }
        if used != a.circles.len() {
            return Err(mismatch("a source circle has no counterpart"));
        }
        Ok(self.to.state_from(markers, &labels))
    }
}

fn insert_marker(markers: &[Marker], p: usize, m: Marker) -> Vec<Marker> {
    let mut v = markers.to_vec();
    v.insert(p, m);
    v
}

fn remove_marker(markers: &[Marker], p: usize) -> Vec<Marker> {
    let mut v = markers.to_vec();
    v.remove(p);
    v
}

fn single(k: StateKey, c: i64) -> Chain {
    let mut x = Chain::new();
    x.insert(k, c);
    x
}

fn parity_sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `D_p` with a distinguished crossing and its two smoothings, crossing
/// orders inherited.
pub struct SkeinTriple {
    pub p: usize,
    pub dp: StateSpace,
    pub d0: StateSpace,
    pub dinf: StateSpace,
    lin0: Lineage,
    lin_inf: Lineage,
}

impl SkeinTriple {
    pub fn new(d: &Diagram, p: usize) -> Result<SkeinTriple, ChainMapError> {
        if p >= d.crossing_count() {
            return Err(mismatch(format!("no crossing {p}")));
        }
        let (d0, lin0) = d.smooth_crossing(p, 1);
        let (dinf, lin_inf) = d.smooth_crossing(p, -1);
        Ok(SkeinTriple {
            p,
            dp: StateSpace::new(d),
            d0: StateSpace::new(&d0),
            dinf: StateSpace::new(&dinf),
            lin0,
            lin_inf,
        })
    }

    /// Lineage of `D_0` into `D_p`.
    pub fn lineage0(&self) -> &Lineage {
        &self.lin0
    }

    /// Lineage of `D_inf` into `D_p`.
    pub fn lineage_inf(&self) -> &Lineage {
        &self.lin_inf
    }

    fn up0(&self) -> Transport<'_> {
        Transport { from: &self.d0, from_lin: Some(self.lin0.clone()), to: &self.dp, to_lin: None, ignore: BTreeSet::new() }
    }

    fn up_inf(&self) -> Transport<'_> {
        Transport {
            from: &self.dinf,
            from_lin: Some(self.lin_inf.clone()),
            to: &self.dp,
            to_lin: None,
            ignore: BTreeSet::new(),
        }
    }

    fn down0(&self) -> Transport<'_> {
        Transport { from: &self.dp, from_lin: None, to: &self.d0, to_lin: Some(self.lin0.clone()), ignore: BTreeSet::new() }
    }

    fn down_inf(&self) -> Transport<'_> {
        Transport {
            from: &self.dp,
            from_lin: None,
            to: &self.dinf,
            to_lin: Some(self.lin_inf.clone()),
            ignore: BTreeSet::new(),
        }
    }

    fn build(
        &self,
        name: &str,
        shift: (i64, i64),
        parity: i64,
        src: &StateSpace,
        mut f: impl FnMut(&EnhancedState) -> Result<Chain, ChainMapError>,
    ) -> Result<ChainMap, ChainMapError> {
        let mut m = SparseMap::new();
        for s in src.states() {
            m.insert(s.key(), f(&s)?);
        }
        Ok(ChainMap::new(name, shift, parity, m))
    }

    /// `alpha_0`: the `D_p` state with a negative marker at `p`.
    pub fn alpha0_state(&self, s: &EnhancedState) -> Result<EnhancedState, ChainMapError> {
        self.up_inf().carry(s, &insert_marker(&s.marker_vec(), self.p, -1), 1)
    }

    pub fn alpha(&self) -> Result<ChainMap, ChainMapError> {
        self.build("alpha", (-1, -1), 1, &self.dinf, |s| {
            let t = self.alpha0_state(s)?;
            Ok(single(t.key(), parity_sign(s.t_before(self.p))))
        })
    }

    pub fn beta(&self) -> Result<ChainMap, ChainMapError> {
        self.build("beta", (-1, -1), 1, &self.dp, |s| {
            if s.marker(self.p) < 0 {
                return Ok(Chain::new());
            }
            let t = self.down0().carry(s, &remove_marker(&s.marker_vec(), self.p), 1)?;
            Ok(single(t.key(), 1))
        })
    }

    /// Left inverse of `alpha`; kills states with a positive marker at `p`.
    pub fn alpha_bar(&self) -> Result<ChainMap, ChainMapError> {
        self.build("alpha_bar", (1, 1), 1, &self.dp, |s| {
            if s.marker(self.p) > 0 {
                return Ok(Chain::new());
            }
            let t = self.down_inf().carry(s, &remove_marker(&s.marker_vec(), self.p), 1)?;
            Ok(single(t.key(), parity_sign(s.t_before(self.p))))
        })
    }

    /// Section of `beta`: the `D_p` state with a positive marker at `p`.
    pub fn beta_bar(&self) -> Result<ChainMap, ChainMapError> {
        self.build("beta_bar", (1, 1), 1, &self.d0, |s| {
            let t = self.up0().carry(s, &insert_marker(&s.marker_vec(), self.p, 1), 1)?;
            Ok(single(t.key(), 1))
        })
    }

    /// `gamma = alpha_0 d_p beta_bar`, unsigned.
    pub fn gamma(&self) -> Result<ChainMap, ChainMapError> {
        self.build("gamma", (0, 2), 1, &self.d0, |s| self.gamma_of(s, false))
    }

    /// `gamma_hat = (-1)^m gamma`; anticommutes with `d`.
    pub fn gamma_hat(&self) -> Result<ChainMap, ChainMapError> {
        self.build("gamma_hat", (0, 2), -1, &self.d0, |s| self.gamma_of(s, true))
    }

    fn gamma_of(&self, s: &EnhancedState, signed: bool) -> Result<Chain, ChainMapError> {
        let up = self.up0().carry(s, &insert_marker(&s.marker_vec(), self.p, 1), 1)?;
        let sign = if signed { parity_sign(s.m) } else { 1 };
        let mut out = Chain::new();
        for t in self.dp.partial_derivative(&up, self.p) {
            let down = self.down_inf().carry(&t, &s.marker_vec(), 1)?;
            *out.entry(down.key()).or_insert(0) += sign;
        }
        Ok(out)
    }
}

/// Exactness of the long exact sequence of a skein triple, per block and object.
pub fn long_exact_sequence_check(t: &SkeinTriple, field: Coefficients) -> Result<CheckReport, ChainMapError> {
    let rule = SignRule::Standard;
    let c_inf = GradedComplex::build(&t.dinf, rule);
    let c_p = GradedComplex::build(&t.dp, rule);
    let c_0 = GradedComplex::build(&t.d0, rule);
    c_inf.check_square().map_err(|e| mismatch(e.to_string()))?;
    c_p.check_square().map_err(|e| mismatch(e.to_string()))?;
    c_0.check_square().map_err(|e| mismatch(e.to_string()))?;
    let alpha = t.alpha()?;
    let beta = t.beta()?;
    let del = t.gamma_hat()?;
    let ba = beta.after(&alpha, "beta alpha");
    let db = del.after(&beta, "del beta");
    let ad = alpha.after(&del, "alpha del");
    let tag = match field {
        Coefficients::Mod2 => "z2",
        _ => "q",
    };
    let mut rep = CheckReport::new(format!("les-{tag}"));
    // object, its complex, incoming (map, source complex), outgoing (map, target complex), composite
    type Leg<'a> = (&'a ChainMap, &'a GradedComplex);
    let steps: [(&GradedComplex, Leg, Leg, Leg); 3] = [
        (&c_p, (&alpha, &c_inf), (&beta, &c_0), (&ba, &c_inf)),
        (&c_0, (&beta, &c_p), (&del, &c_inf), (&db, &c_p)),
        (&c_inf, (&del, &c_0), (&alpha, &c_p), (&ad, &c_0)),
    ];
    for (obj, (fin, fsrc), (fout, ftgt), (comp, csrc)) in steps {
        for b in &obj.blocks {
            for &i in b.groups.keys() {
                let h = homology_dim(obj, b.j, &b.s, i, field);
                let (si, sj) = (i - fin.shift.0, b.j - fin.shift.1);
                let r_in = fin.induced_rank(fsrc, obj, sj, &b.s, si, field);
                let r_out = fout.induced_rank(obj, ftgt, b.j, &b.s, i, field);
                let r_comp = comp.induced_rank(csrc, ftgt, sj, &b.s, si, field);
                rep.record(b.j, &b.s, h == r_in + r_out && r_comp == 0);
            }
        }
    }
    Ok(rep)
}

/// `f(S) = sgn(sigma_S) S'` from `D` to `D` reordered by `perm`, where
/// `perm[k]` is the old index of new crossing `k`.
pub fn reorder_iso(d: &Diagram, perm: &[usize]) -> Result<(Diagram, ChainMap), ChainMapError> {
    let e = d.reorder_crossings(perm)?;
    let src = StateSpace::new(d);
    let tgt = StateSpace::new(&e);
    let n = d.crossing_count();
    let mut inv = vec![0; n];
    for (k, &old) in perm.iter().enumerate() {
        inv[old] = k;
    }
    let tr = Transport { from: &src, from_lin: None, to: &tgt, to_lin: None, ignore: BTreeSet::new() };
    let mut m = SparseMap::new();
    for s in src.states() {
        let old = s.marker_vec();
        let markers: Vec<Marker> = perm.iter().map(|&o| old[o]).collect();
        let pos: Vec<usize> = (0..n).filter(|&k| old[k] < 0).map(|k| inv[k]).collect();
        let inversions = (0..pos.len())
            .flat_map(|a| (a + 1..pos.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| pos[a] > pos[b])
            .count();
        let t = tr.carry(&s, &markers, 1)?;
        m.insert(s.key(), single(t.key(), parity_sign(inversions)));
    }
    Ok((e, ChainMap::new("reorder", (0, 0), 1, m)))
}

/// Adds a negative kink as crossing 0. States go to the kink state with a
/// negative marker at the new crossing and the small circle labeled `-`.
pub fn rho_i(d: &Diagram, strand: Strand, side: R1Side) -> Result<(Diagram, ChainMap), ChainMapError> {
    let (e, lin) = d.apply_r1_neg(strand, side)?;
    let src = StateSpace::new(d);
    let tgt = StateSpace::new(&e);
    let tr = Transport { from: &src, from_lin: None, to: &tgt, to_lin: Some(lin), ignore: BTreeSet::new() };
    let mut m = SparseMap::new();
    for s in src.states() {
        let t = tr.carry(&s, &insert_marker(&s.marker_vec(), 0, -1), -1)?;
        m.insert(s.key(), single(t.key(), 1));
    }
    Ok((e, ChainMap::new("rho_I", (-1, -3), 1, m)))
}

/// `eta(S) = (-1)^m S`.
pub fn eta(space: &StateSpace) -> ChainMap {
    let mut m = SparseMap::new();
    for s in space.states() {
        m.insert(s.key(), single(s.key(), parity_sign(s.m)));
    }
    ChainMap::new("eta", (0, 0), -1, m)
}

/// `g(S) = (-1)^u S`, `u` counting positive markers at crossings `v_i`
/// (numbered from one) with `i = n + 1 mod 2`. Maps `(C, d)` to `(C, d+)`.
pub fn g_map(space: &StateSpace) -> ChainMap {
    let n = space.crossing_count();
    let mut m = SparseMap::new();
    for s in space.states() {
        let u = (0..n).filter(|&k| s.marker(k) > 0 && (k + 1) % 2 == (n + 1) % 2).count();
        m.insert(s.key(), single(s.key(), parity_sign(u)));
    }
    ChainMap::new("g", (0, 0), 1, m)
}

/// Opposite markers and opposite labels in the mirror diagram. Intertwines
/// the transposed differential of `D` with `d+` of the mirror.
pub fn mirror_map(d: &Diagram) -> Result<(Diagram, ChainMap), ChainMapError> {
    let e = d.mirror();
    let src = StateSpace::new(d);
    let tgt = StateSpace::new(&e);
    let mut m = SparseMap::new();
    for s in src.states() {
        let markers: Vec<Marker> = s.marker_vec().iter().map(|&x| -x).collect();
        let a = src.smoothing(s.markers);
        let b = tgt.smoothing(marker_bits(&markers));
        let mut labels = vec![0i8; b.circles.len()];
        for (k, c) in a.circles.iter().enumerate() {
            let r = b
                .circles
                .iter()
                .position(|x| x.atoms == c.atoms)
                .ok_or_else(|| mismatch("mirror smoothing differs"))?;
            labels[r] = -s.label(k);
        }
        let t = tgt.state_from(&markers, &labels);
        m.insert(s.key(), single(t.key(), 1));
    }
    Ok((e, ChainMap::new("mirror", (0, 0), 1, m)))
}

/// Checks `mirror(dual d) = d+ mirror` and the sign map `g` on the mirror.
pub fn mirror_square_check(d: &Diagram) -> Result<CheckReport, ChainMapError> {
    let (e, phi) = mirror_map(d)?;
    let src = StateSpace::new(d);
    let tgt = StateSpace::new(&e);
    let dual = SparseMap::differential(&src, SignRule::Standard).transpose();
    let plus = SparseMap::differential(&tgt, SignRule::Plus);
    let mut rep = CheckReport::new("mirror-square");
    for s in src.states() {
        let img = phi.map.apply_basis(s.key());
        let ok = img.keys().all(|&t| {
            let x = state_of(&tgt, t);
            x.i == -s.i && x.j == -s.j && x.psi == s.psi.negate()
        }) && plus.apply(&img) == phi.map.apply(&dual.apply_basis(s.key()));
        rep.record(s.j, &s.psi, ok);
    }
    Ok(rep)
}

/// Compares the homology of `D` with that of its mirror: free ranks under
/// `(i, j, s) -> (-i, -j, -s)` and torsion with the `i - 2` shift.
pub fn duality_check(d: &Diagram) -> Result<CheckReport, ChainMapError> {
    let h = homology(&GradedComplex::new(d), Coefficients::Integer).map_err(|e| mismatch(e.to_string()))?;
    let hb = homology(&GradedComplex::new(&d.mirror()), Coefficients::Integer).map_err(|e| mismatch(e.to_string()))?;
    Ok(duality_tables(&h, &hb))
}

/// The duality comparison on precomputed integer tables.
pub fn duality_tables(h: &HomologyTable, hb: &HomologyTable) -> CheckReport {
    let mut keys: BTreeSet<(i64, i64, GradingS)> = h.entries().map(|(k, _)| k.clone()).collect();
    keys.extend(hb.entries().map(|((i, j, s), _)| (-i, -j, s.negate())));
    keys.extend(h.entries().map(|((i, j, s), _)| (i + 2, *j, s.clone())));
    let mut rep = CheckReport::new("duality");
    for (i, j, s) in keys {
        let mine = h.get(i, j, &s);
        let low = h.get(i - 2, j, &s);
        let theirs = hb.get(-i, -j, &s.negate());
        rep.record(j, &s, mine.rank == theirs.rank && low.torsion == theirs.torsion);
    }
    rep
}
