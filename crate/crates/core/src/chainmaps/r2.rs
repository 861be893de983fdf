//! The second move map `rho_II(S) = f(S) + g(gamma(S))`.

use std::collections::BTreeSet;

use super::{insert_marker, mismatch, parity_sign, reorder_iso, single, Chain, ChainMap, SkeinTriple, SparseMap, Transport};
use crate::diagram::{Atom, Diagram, Lineage, Marker, R2Site};
use crate::error::ChainMapError;
use crate::state_complex::{SignRule, StateSpace};

/// The maps attached to a bigon at crossings 0 and 1 of `E`.
pub struct BigonMaps {
    pub target: StateSpace,
    /// Triple at crossing `w` of `E` smoothed negatively at `v`. Its `D_0`
    /// is `E` with the bigon pulled apart, the source of `rho`.
    pub triple: SkeinTriple,
    /// Lineage of the source diagram into `E`.
    pub source_lineage: Lineage,
    pub f_embed: ChainMap,
    pub g_embed: ChainMap,
    pub iota: ChainMap,
    pub gamma: ChainMap,
    pub rho: ChainMap,
}

impl BigonMaps {
    pub fn source(&self) -> &StateSpace {
        &self.triple.d0
    }

    /// `d f - f d - (-1)^m iota gamma` and `d g - g d + (-1)^m iota`; both vanish.
    pub fn identity_defects(&self) -> (SparseMap, SparseMap) {
        let rule = SignRule::Standard;
        let de = SparseMap::differential(&self.target, rule);
        let d0 = SparseMap::differential(&self.triple.d0, rule);
        let dinf = SparseMap::differential(&self.triple.dinf, rule);
        let ig = self.iota.map.after(&self.gamma.map);
        let mut a = SparseMap::new();
        for s in self.triple.d0.states() {
            let k = s.key();
            let mut x = de.apply(&self.f_embed.map.apply_basis(k));
            sub(&mut x, &self.f_embed.map.apply(&d0.apply_basis(k)), 1);
            sub(&mut x, &ig.apply_basis(k), parity_sign(s.m));
            a.insert(k, x);
        }
        let mut b = SparseMap::new();
        for s in self.triple.dinf.states() {
            let k = s.key();
            let mut x = de.apply(&self.g_embed.map.apply_basis(k));
            sub(&mut x, &self.g_embed.map.apply(&dinf.apply_basis(k)), 1);
            sub(&mut x, &self.iota.map.apply_basis(k), -parity_sign(s.m));
            b.insert(k, x);
        }
        (a, b)
    }
}

fn sub(x: &mut Chain, y: &Chain, k: i64) {
    for (&t, &c) in y {
        *x.entry(t).or_insert(0) -= k * c;
    }
    x.retain(|_, c| *c != 0);
}

/// Whether the `inner` edges form a circle when crossings 0 and 1 carry `m`.
fn closes_up(e: &Diagram, inner: &BTreeSet<Atom>, m: [Marker; 2]) -> bool {
    let mut markers = vec![1; e.crossing_count()];
    markers[0] = m[0];
    markers[1] = m[1];
    e.smooth(&markers).circles.iter().any(|c| c.atoms.iter().copied().collect::<BTreeSet<_>>() == *inner)
}

/// Which markers at crossings 0 and 1 pull apart the bigon bounded by the two
/// `inner` edges: `(-1, 1)` or `(1, -1)`.
pub fn bigon_orientation(e: &Diagram, inner: &BTreeSet<Atom>) -> Result<[Marker; 2], ChainMapError> {
    let joins = |a: Atom| match a {
        Atom::Edge(k) => {
            let x = &e.edges()[k];
            x.word.is_empty() && x.a.crossing < 2 && x.b.crossing < 2 && x.a.crossing != x.b.crossing
        }
        Atom::Loop(_) => false,
    };
    if e.crossing_count() < 2 || inner.len() != 2 || !inner.iter().all(|&a| joins(a)) {
        return Err(mismatch("crossings 0 and 1 do not bound a bigon"));
    }
    match (closes_up(e, inner, [1, -1]), closes_up(e, inner, [-1, 1])) {
        (true, false) => Ok([-1, 1]),
        (false, true) => Ok([1, -1]),
        _ => Err(mismatch("crossings 0 and 1 do not bound a bigon")),
    }
}

/// `rho_II` for a diagram whose crossings 0 and 1 bound a bigon with edges
/// `inner`, pulled apart by the markers `(-, +)`.
pub fn rho_ii(e: &Diagram, inner: &BTreeSet<Atom>) -> Result<BigonMaps, ChainMapError> {
    if bigon_orientation(e, inner)? != [-1, 1] {
        return Err(mismatch("the bigon is pulled apart by (+, -); reorder first"));
    }
    let inner = inner.clone();
    let (dp, lin_p) = e.smooth_crossing(0, -1);
    let triple = SkeinTriple::new(&dp, 0)?;
    let target = StateSpace::new(e);
    let lin_src = triple.lineage0().compose(&lin_p);
    let lin_inf = triple.lineage_inf().compose(&lin_p);
    let flat = Transport {
        from: &triple.d0,
        from_lin: Some(lin_src.clone()),
        to: &target,
        to_lin: None,
        ignore: BTreeSet::new(),
    };
    let mut f = SparseMap::new();
    for s in triple.d0.states() {
        let mk = insert_marker(&insert_marker(&s.marker_vec(), 0, 1), 0, -1);
        f.insert(s.key(), single(flat.carry(&s, &mk, 1)?.key(), 1));
    }
    let down = Transport {
        from: &triple.dinf,
        from_lin: Some(lin_inf.clone()),
        to: &target,
        to_lin: None,
        ignore: BTreeSet::new(),
    };
    let cupcap = Transport { from: &triple.dinf, from_lin: Some(lin_inf), to: &target, to_lin: None, ignore: inner };
    let mut g = SparseMap::new();
    let mut iota = SparseMap::new();
    for s in triple.dinf.states() {
        let mk = insert_marker(&insert_marker(&s.marker_vec(), 0, -1), 0, 1);
        g.insert(s.key(), single(cupcap.carry(&s, &mk, -1)?.key(), 1));
        let mk = insert_marker(&insert_marker(&s.marker_vec(), 0, -1), 0, -1);
        iota.insert(s.key(), single(down.carry(&s, &mk, 1)?.key(), 1));
    }
    let gamma = triple.gamma()?;
    let f_embed = ChainMap::new("f_embed", (0, 0), 1, f);
    let g_embed = ChainMap::new("g_embed", (0, -2), 1, g);
    let iota = ChainMap::new("iota", (-2, -2), 1, iota);
    let rho = ChainMap::new("rho_II", (0, 0), 1, f_embed.map.plus(&g_embed.map.after(&gamma.map)));
    Ok(BigonMaps { target, triple, source_lineage: lin_src, f_embed, g_embed, iota, gamma, rho })
}

/// Applies a second move to `d` and returns the new diagram, the bigon maps,
/// and the identification of `C(D)` with the source of `rho_II`.
pub fn rho_ii_r2(d: &Diagram, site: R2Site) -> Result<(Diagram, BigonMaps, ChainMap), ChainMapError> {
    let (e, lin) = d.apply_r2(site)?;
    let inner: BTreeSet<Atom> = (0..e.edges().len()).filter(|&k| lin.edges[k].is_empty()).map(Atom::Edge).collect();
    let e = match bigon_orientation(&e, &inner)? {
        [-1, 1] => e,
        _ => {
            // keep the pulled-apart smoothing at (-, +)
            let mut perm: Vec<usize> = (0..e.crossing_count()).collect();
            perm.swap(0, 1);
            reorder_iso(&e, &perm)?.0
        }
    };
    let maps = rho_ii(&e, &inner)?;
    let src = StateSpace::new(d);
    let into = Transport {
        from: &src,
        from_lin: None,
        to: maps.source(),
        to_lin: Some(maps.source_lineage.compose(&lin)),
        ignore: BTreeSet::new(),
    };
    let mut m = SparseMap::new();
    for s in src.states() {
        m.insert(s.key(), single(into.carry(&s, &s.marker_vec(), 1)?.key(), 1));
    }
    Ok((e, maps, ChainMap::new("identify", (0, 0), 1, m)))
}
