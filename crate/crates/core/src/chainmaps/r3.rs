//! The third move map `rho_III = beta_bar rho beta + alpha f alpha_bar` on the
//! subcomplexes `C'` spanned by `alpha(C(D_-))` and `beta_bar rho_II(C(D_++-))`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::r2::{bigon_orientation, rho_ii, BigonMaps};
use super::{mismatch, reorder_iso, single, Chain, ChainMap, CheckReport, SkeinTriple, SparseMap, Transport};
use crate::diagram::{Atom, Diagram, Endpoint, Lineage, R3Site};
use crate::error::ChainMapError;
use crate::homology::{homology, Coefficients};
use crate::state_complex::{Block, EnhancedState, GradedComplex, SignRule, StateSpace};

/// One side of the move, with the triangle at crossings 0, 1, 2.
struct Side {
    triple: SkeinTriple,
    bigon: BigonMaps,
    /// `rho_II` into `C(D_+)`, and a left inverse of it.
    rho2: SparseMap,
    pi: SparseMap,
    /// Leading state of `rho2(S)` and its coefficient.
    lead: HashMap<crate::state_complex::StateKey, (crate::state_complex::StateKey, i64)>,
    lin_source: Lineage,
    lin_minus: Lineage,
}

impl Side {
    /// `triangle` lists the edges of `x` around the face.
    fn new(x: &Diagram, lin: Option<&Lineage>, triangle: &BTreeSet<Atom>) -> Result<Side, ChainMapError> {
        let triple = SkeinTriple::new(x, 0)?;
        let dplus = triple.d0.diagram().clone();
        let inner: BTreeSet<Atom> = (0..dplus.edges().len())
            .filter(|&k| triple.lineage0().edges[k].iter().all(|a| triangle.contains(a)))
            .map(Atom::Edge)
            .collect();
        let mut swap: Vec<usize> = (0..dplus.crossing_count()).collect();
        let (bigon, back) = match bigon_orientation(&dplus, &inner)? {
            [-1, 1] => (rho_ii(&dplus, &inner)?, None),
            _ => {
                swap.swap(0, 1);
                let e = dplus.reorder_crossings(&swap)?;
                let (again, r) = reorder_iso(&e, &swap)?;
                if again != dplus {
                    return Err(mismatch("reordering the bigon does not return the diagram"));
                }
                (rho_ii(&e, &inner)?, Some(r))
            }
        };
        let (rho2, f) = match &back {
            Some(r) => (r.map.after(&bigon.rho.map), r.map.after(&bigon.f_embed.map)),
            None => (bigon.rho.map.clone(), bigon.f_embed.map.clone()),
        };
        let mut pi = SparseMap::new();
        let mut lead = HashMap::new();
        for s in bigon.source().states() {
            let &[(k, c)] = f.image(s.key()) else { return Err(mismatch("f is not an embedding")) };
            pi.insert(k, single(s.key(), c));
            lead.insert(s.key(), (k, c));
        }
        let mut lin_source = bigon.source_lineage.compose(triple.lineage0());
        let mut lin_minus = triple.lineage_inf().clone();
        if let Some(l) = lin {
            lin_source = lin_source.compose(l);
            lin_minus = lin_minus.compose(l);
        }
        Ok(Side { triple, bigon, rho2, pi, lead, lin_source, lin_minus })
    }
}

/// A basis of a subcomplex, each vector labeled by a leading state. Vectors
/// of a stage never touch the leading states of the same or later stages.
struct SubBasis {
    vectors: Vec<(EnhancedState, i64, Chain)>,
    stages: Vec<Vec<usize>>,
}

impl SubBasis {
    fn coordinates(&self, x: &Chain) -> Option<Vec<(usize, i64)>> {
        let mut x = x.clone();
        let mut out = Vec::new();
        for stage in &self.stages {
            for &b in stage {
                let (lead, c, v) = &self.vectors[b];
                let a = *x.get(&lead.key()).unwrap_or(&0);
                if a == 0 {
                    continue;
                }
                if a % c != 0 {
                    return None;
                }
                let a = a / c;
                for (&t, &y) in v {
                    *x.entry(t).or_insert(0) -= a * y;
                }
                x.retain(|_, y| *y != 0);
                out.push((b, a));
            }
        }
        x.is_empty().then_some(out)
    }

    /// The subcomplex with the restricted differential, or `None` if it is
    /// not closed under `d`.
    fn complex(&self, crossings: usize, d: &SparseMap) -> Option<GradedComplex> {
        let mut grouped: BTreeMap<(i64, crate::surface::GradingS), BTreeMap<i64, Vec<usize>>> = BTreeMap::new();
        for (b, (lead, _, _)) in self.vectors.iter().enumerate() {
            grouped.entry((lead.j, lead.psi.clone())).or_default().entry(lead.i).or_default().push(b);
        }
        let mut pos = vec![0; self.vectors.len()];
        for groups in grouped.values() {
            for g in groups.values() {
                for (p, &b) in g.iter().enumerate() {
                    pos[b] = p;
                }
            }
        }
        let mut blocks = Vec::new();
        for ((j, s), groups) in grouped {
            let mut mats = BTreeMap::new();
            for (&i, g) in &groups {
                let rows = groups.get(&(i - 2)).map_or(0, |t| t.len());
                let mut m = crate::matrix::Matrix::zeros(rows, g.len());
                for (col, &b) in g.iter().enumerate() {
                    for (t, a) in self.coordinates(&d.apply(&self.vectors[b].2))? {
                        let lt = &self.vectors[t].0;
                        if lt.i != i - 2 || lt.j != j || lt.psi != s {
                            return None;
                        }
                        m.add(pos[t], col, a);
                    }
                }
                if rows > 0 {
                    mats.insert(i, m);
                } else if !m.is_zero() {
                    return None;
                }
            }
            let groups = groups
                .into_iter()
                .map(|(i, g)| (i, g.into_iter().map(|b| self.vectors[b].0.clone()).collect()))
                .collect();
            blocks.push(Block { j, s, groups, d: mats });
        }
        Some(GradedComplex::from_blocks(crossings, -2, blocks))
    }
}

/// The third move map and the checks that make it a quasi-isomorphism.
pub struct R3Check {
    /// Whether the maps were built for the mirror diagrams. The construction
    /// needs the face at `p` turned by the positive smoothing, and exactly
    /// one of a diagram and its mirror has that.
    pub mirrored: bool,
    /// `D` with the triangle moved to the front, `p` first.
    pub source: Diagram,
    pub target: Diagram,
    /// `C(D)` to `C(source)`.
    pub reorder: ChainMap,
    pub rho_iii: ChainMap,
    pub sub_source: GradedComplex,
    pub sub_target: GradedComplex,
    pub reports: Vec<CheckReport>,
}

impl R3Check {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

/// Tries each corner of the triangle as the crossing `p`, on `D` and then
/// on its mirror.
pub fn rho_iii(d: &Diagram, site: R3Site) -> Result<R3Check, ChainMapError> {
    if !d.is_r3_site(&site) {
        return Err(mismatch("not a third move site"));
    }
    let mirror = d.mirror();
    let msite = R3Site { corners: site.corners.map(|(c, k)| (c, (k + 3) % 4)) };
    let mut last = mismatch("no corner of the triangle works as p");
    for (x, st, mirrored) in [(d, site, false), (&mirror, msite, true)] {
        for r in 0..3 {
            let corners = [st.corners[r], st.corners[(r + 1) % 3], st.corners[(r + 2) % 3]];
            match rho_iii_at(x, corners) {
                Ok(mut c) => {
                    c.mirrored = mirrored;
                    return Ok(c);
                }
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}

fn rho_iii_at(d: &Diagram, corners: [(usize, u8); 3]) -> Result<R3Check, ChainMapError> {
    let n = d.crossing_count();
    let front: Vec<usize> = corners.iter().map(|c| c.0).collect();
    let mut perm = front.clone();
    perm.extend((0..n).filter(|c| !front.contains(c)));
    let (dr, reorder) = reorder_iso(d, &perm)?;
    let site = R3Site { corners: [(0, corners[0].1), (1, corners[1].1), (2, corners[2].1)] };
    let (dt, lin_t) = dr.apply_r3(site)?;
    let triangle: BTreeSet<Atom> =
        site.corners.iter().map(|&(c, k)| Atom::Edge(dr.edge_at(Endpoint::new(c, k)).0)).collect();
    if site.corners[0].1 % 2 == 1 {
        return Err(mismatch("the face at p is turned by the negative smoothing"));
    }
    let fresh: BTreeSet<Atom> = (0..dt.edges().len()).filter(|&k| lin_t.edges[k].is_empty()).map(Atom::Edge).collect();
    let a = Side::new(&dr, None, &triangle)?;
    let b = Side::new(&dt, Some(&lin_t), &fresh)?;

    // the pulled-apart diagrams agree on both sides
    let iota = {
        let tr = Transport {
            from: a.bigon.source(),
            from_lin: Some(a.lin_source.clone()),
            to: b.bigon.source(),
            to_lin: Some(b.lin_source.clone()),
            ignore: triangle.clone(),
        };
        let mut m = SparseMap::new();
        for s in a.bigon.source().states() {
            m.insert(s.key(), single(tr.carry(&s, &s.marker_vec(), 1)?.key(), 1));
        }
        m
    };
    // D_- and D'_- agree after possibly swapping v and w
    let f = minus_iso(&a, &b, &triangle)?;

    let (alpha, beta, alpha_bar, beta_bar) = (a.triple.alpha()?, a.triple.beta()?, a.triple.alpha_bar()?, a.triple.beta_bar()?);
    let (alpha2, beta2, beta_bar2) = (b.triple.alpha()?, b.triple.beta()?, b.triple.beta_bar()?);
    let rho = b.rho2.after(&iota).after(&a.pi);
    let rho3 = beta_bar2
        .map
        .after(&rho)
        .after(&beta.map)
        .plus(&alpha2.map.after(&f.map).after(&alpha_bar.map));
    let rho3 = ChainMap::new("rho_III", (0, 0), 1, rho3);

    let sub_a = sub_basis(&a, &alpha, &beta_bar)?;
    let sub_b = sub_basis(&b, &alpha2, &beta_bar2)?;
    let da = SparseMap::differential(&a.triple.dp, SignRule::Standard);
    let db = SparseMap::differential(&b.triple.dp, SignRule::Standard);
    let ca = sub_a.complex(n, &da).ok_or_else(|| mismatch("C'(D) is not a subcomplex"))?;
    let cb = sub_b.complex(n, &db).ok_or_else(|| mismatch("C'(D') is not a subcomplex"))?;

    let mut reports = Vec::new();
    let mut chain = CheckReport::new("r3-chain-map");
    let mut square_b = CheckReport::new("r3-beta-square");
    for (lead, _, v) in &sub_a.vectors {
        let img = rho3.apply(v);
        chain.record(lead.j, &lead.psi, db.apply(&img) == rho3.apply(&da.apply(v)));
        square_b.record(lead.j, &lead.psi, beta2.apply(&img) == rho.apply(&beta.apply(v)));
    }
    let mut basis = CheckReport::new("r3-basis");
    let carried = beta_bar2.map.after(&b.rho2).after(&iota);
    for s in a.bigon.source().states() {
        let v = beta_bar.map.apply(&a.rho2.apply_basis(s.key()));
        basis.record(s.j, &s.psi, rho3.apply(&v) == carried.apply_basis(s.key()));
    }
    let mut square_a = CheckReport::new("r3-alpha-square");
    for t in a.triple.dinf.states() {
        let k = t.key();
        let lhs = rho3.map.after(&alpha.map).apply_basis(k);
        square_a.record(t.j, &t.psi, lhs == alpha2.map.after(&f.map).apply_basis(k));
    }
    let mut square_g = CheckReport::new("r3-gamma-square");
    let ga = f.map.after(&a.triple.gamma_hat()?.map).after(&a.rho2);
    let gb = b.triple.gamma_hat()?.map.after(&b.rho2).after(&iota);
    for s in a.bigon.source().states() {
        square_g.record(s.j, &s.psi, ga.apply_basis(s.key()) == gb.apply_basis(s.key()));
    }
    let mut quasi = CheckReport::new("r3-quasi-iso");
    for (space, sub) in [(&a.triple.dp, &ca), (&b.triple.dp, &cb)] {
        let full = GradedComplex::build(space, SignRule::Standard);
        let hs = homology(sub, Coefficients::Integer).map_err(|e| mismatch(e.to_string()))?;
        let hf = homology(&full, Coefficients::Integer).map_err(|e| mismatch(e.to_string()))?;
        for blk in &full.blocks {
            for &i in blk.groups.keys() {
                quasi.record(blk.j, &blk.s, hs.get(i, blk.j, &blk.s) == hf.get(i, blk.j, &blk.s));
            }
        }
        for blk in &sub.blocks {
            for &i in blk.groups.keys() {
                quasi.record(blk.j, &blk.s, hs.get(i, blk.j, &blk.s) == hf.get(i, blk.j, &blk.s));
            }
        }
    }
    reports.extend([chain, basis, square_a, square_b, square_g, quasi]);
    Ok(R3Check { mirrored: false, source: dr, target: dt, reorder, rho_iii: rho3, sub_source: ca, sub_target: cb, reports })
}

fn sub_basis(side: &Side, alpha: &ChainMap, beta_bar: &ChainMap) -> Result<SubBasis, ChainMapError> {
    let mut vectors = Vec::new();
    let mut first = Vec::new();
    let mut second = Vec::new();
    let dp = &side.triple.dp;
    for s in side.bigon.source().states() {
        let v = beta_bar.map.apply(&side.rho2.apply_basis(s.key()));
        let (k, c) = side.lead[&s.key()];
        let lead_key = beta_bar.map.image(k).first().map(|x| x.0).ok_or_else(|| mismatch("empty section"))?;
        first.push(vectors.len());
        vectors.push((dp.state(lead_key.0, lead_key.1), c, v));
    }
    for t in side.triple.dinf.states() {
        let v = alpha.map.apply_basis(t.key());
        let (&k, &c) = v.iter().next().ok_or_else(|| mismatch("empty alpha"))?;
        second.push(vectors.len());
        vectors.push((dp.state(k.0, k.1), c, v));
    }
    Ok(SubBasis { vectors, stages: vec![first, second] })
}

/// `C(D_-) -> C(D'_-)`: the identification, after swapping `v` and `w` when
/// the diagrams only match that way.
fn minus_iso(a: &Side, b: &Side, triangle: &BTreeSet<Atom>) -> Result<ChainMap, ChainMapError> {
    let dm = a.triple.dinf.diagram();
    let n = dm.crossing_count();
    let da = SparseMap::differential(&a.triple.dinf, SignRule::Standard);
    let db = SparseMap::differential(&b.triple.dinf, SignRule::Standard);
    let mut last = mismatch("D_- and D'_- do not match");
    for swap in [true, false] {
        let mut perm: Vec<usize> = (0..n).collect();
        if swap {
            perm.swap(0, 1);
        }
        let (e, r) = reorder_iso(dm, &perm)?;
        let es = StateSpace::new(&e);
        let tr = Transport {
            from: &es,
            from_lin: Some(a.lin_minus.clone()),
            to: &b.triple.dinf,
            to_lin: Some(b.lin_minus.clone()),
            ignore: triangle.clone(),
        };
        let mut m = SparseMap::new();
        let mut ok = true;
        for s in es.states() {
            match tr.carry(&s, &s.marker_vec(), 1) {
                Ok(t) => m.insert(s.key(), single(t.key(), 1)),
                Err(e) => {
                    last = e;
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let f = ChainMap::new("f", (0, 0), 1, m.after(&r.map));
        if f.check(&a.triple.dinf, &da, &b.triple.dinf, &db).passed() {
            return Ok(f);
        }
        last = mismatch("identification of D_- and D'_- is not a chain map");
    }
    Err(last)
}
