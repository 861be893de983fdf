//! Verification suites run on a single diagram.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::chainmaps::{
    duality_check, long_exact_sequence_check, mirror_square_check, rho_ii_r2, rho_iii, CheckReport, SkeinTriple,
    SparseMap,
};
use crate::diagram::{Diagram, R1Side, R2Site, R3Site, Strand};
use crate::error::ChainMapError;
use crate::homology::{homology, Coefficients, HomologyTable};
use crate::skein::{euler_characteristic, kauffman_bracket_recursive, phi_expand};
use crate::state_complex::{GradedComplex, SignRule, StateSpace};
use crate::surface::GradingS;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    D2,
    Euler,
    Reidemeister,
    Les,
    Duality,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "d2" => Ok(Suite::D2),
            "euler" => Ok(Suite::Euler),
            "reidemeister" => Ok(Suite::Reidemeister),
            "les" => Ok(Suite::Les),
            "duality" => Ok(Suite::Duality),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite `{s}` (expected d2, euler, reidemeister, les, duality or all)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::D2 => "d2",
            Suite::Euler => "euler",
            Suite::Reidemeister => "reidemeister",
            Suite::Les => "les",
            Suite::Duality => "duality",
            Suite::All => "all",
        })
    }
}

/// Caps on how many move sites the Reidemeister suite tries.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { r1: 4, r2: 4, r3: 4 }
    }
}

pub fn run(d: &Diagram, suite: Suite) -> Result<Vec<CheckReport>, ChainMapError> {
    run_with(d, suite, Limits::default())
}

pub fn run_with(d: &Diagram, suite: Suite, limits: Limits) -> Result<Vec<CheckReport>, ChainMapError> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::D2 {
        out.push(d_squared(d));
    }
    if all || suite == Suite::Euler {
        out.push(euler(d));
    }
    if all || suite == Suite::Reidemeister {
        out.extend(reidemeister(d, limits)?);
    }
    if all || suite == Suite::Les {
        for p in 0..d.crossing_count() {
            let t = SkeinTriple::new(d, p)?;
            for field in [Coefficients::Rational, Coefficients::Mod2] {
                out.push(long_exact_sequence_check(&t, field)?);
            }
        }
    }
    if all || suite == Suite::Duality {
        out.push(mirror_square_check(d)?);
        out.push(duality_check(d)?);
    }
    Ok(out)
}

/// `d∘d = 0` per block, under both sign rules.
pub fn d_squared(d: &Diagram) -> CheckReport {
    let space = StateSpace::new(d);
    let mut rep = CheckReport::new("d2");
    for rule in [SignRule::Standard, SignRule::Plus] {
        let c = GradedComplex::build(&space, rule);
        for b in &c.blocks {
            let ok = b.d.iter().all(|(&i, m)| b.d.get(&(i + c.step)).is_none_or(|next| next.mul(m).is_zero()));
            rep.record(b.j, &b.s, ok);
        }
    }
    rep
}

/// The A-graded Euler characteristic of each s-summand against the bracket.
pub fn euler(d: &Diagram) -> CheckReport {
    let mut rep = CheckReport::new("euler");
    let table = match homology(&GradedComplex::new(d), Coefficients::Integer) {
        Ok(t) => t,
        Err(_) => {
            rep.record(0, &GradingS::zero(), false);
            return rep;
        }
    };
    let q = phi_expand(&kauffman_bracket_recursive(d));
    let mut grades: BTreeSet<GradingS> = q.keys().cloned().collect();
    grades.extend(table.entries().map(|((_, _, s), _)| s.clone()));
    for s in grades {
        let chi = euler_characteristic(&table, &s);
        let want = q.get(&s).cloned().unwrap_or_default();
        let js: BTreeSet<i64> = chi.terms().chain(want.terms()).map(|(_, e)| e).collect();
        for j in js {
            rep.record(j, &s, chi.coefficient(j) == want.coefficient(j));
        }
    }
    rep
}

/// Compares `t2` at `(i + shift.0, j + shift.1, s)` with `t1` at `(i, j, s)`,
/// one verdict per (j, s) of `t1`.
pub fn compare_tables(name: &str, t1: &HomologyTable, t2: &HomologyTable, shift: (i64, i64)) -> CheckReport {
    let mut rep = CheckReport::new(name);
    let mut rows: BTreeMap<(i64, GradingS), (Vec<_>, Vec<_>)> = BTreeMap::new();
    for ((i, j, s), g) in t1.entries() {
        rows.entry((*j, s.clone())).or_default().0.push((*i, g.clone()));
    }
    for ((i, j, s), g) in t2.entries() {
        rows.entry((j - shift.1, s.clone())).or_default().1.push((i - shift.0, g.clone()));
    }
    for ((j, s), (a, b)) in rows {
        rep.record(j, &s, a == b);
    }
    rep
}

fn table(d: &Diagram) -> Result<HomologyTable, ChainMapError> {
    homology(&GradedComplex::new(d), Coefficients::Integer).map_err(|e| ChainMapError::Mismatch(e.to_string()))
}

fn strands(d: &Diagram) -> Vec<Strand> {
    (0..d.edges().len()).map(Strand::Edge).chain((0..d.loops().len()).map(Strand::Loop)).collect()
}

/// Second moves between two edges that add exactly two faces, i.e. moves
/// that push one edge across another inside a common face.
pub fn r2_sites(d: &Diagram) -> Vec<R2Site> {
    let faces = d.face_count();
    let n = d.edges().len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for (over_reversed, under_reversed) in [(false, false), (false, true), (true, false), (true, true)] {
                let site = R2Site { over: Strand::Edge(a), over_reversed, under: Strand::Edge(b), under_reversed };
                if d.apply_r2(site).is_ok_and(|(e, _)| e.face_count() == faces + 2) {
                    out.push(site);
                }
            }
        }
    }
    out
}

/// Every triangular face, each listed once.
pub fn r3_sites(d: &Diagram) -> Vec<R3Site> {
    let n = d.crossing_count();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for ka in 0..4u8 {
                    for kb in 0..4u8 {
                        for kc in 0..4u8 {
                            for corners in [[(a, ka), (b, kb), (c, kc)], [(a, ka), (c, kc), (b, kb)]] {
                                let s = R3Site { corners };
                                if d.is_r3_site(&s) {
                                    let mut key = corners;
                                    key.sort();
                                    if seen.insert(key) {
                                        out.push(s);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Table comparisons across moves, with the chain maps checked where built.
pub fn reidemeister(d: &Diagram, limits: Limits) -> Result<Vec<CheckReport>, ChainMapError> {
    let base = table(d)?;
    let mut out = Vec::new();
    for (k, strand) in strands(d).into_iter().take(limits.r1).enumerate() {
        let side = if k % 2 == 0 { R1Side::Left } else { R1Side::Right };
        let (e, _) = d.apply_r1_neg(strand, side)?;
        out.push(compare_tables("r1neg", &base, &table(&e)?, (-1, -3)));
    }
    let mut r2 = 0;
    for site in r2_sites(d) {
        if r2 == limits.r2 {
            break;
        }
        let Ok((e, maps, ident)) = rho_ii_r2(d, site) else { continue };
        r2 += 1;
        out.push(compare_tables("r2", &base, &table(&e)?, (0, 0)));
        let src = maps.source();
        let d_src = SparseMap::differential(src, SignRule::Standard);
        let d_tgt = SparseMap::differential(&maps.target, SignRule::Standard);
        out.push(maps.rho.check(src, &d_src, &maps.target, &d_tgt));
        let s0 = StateSpace::new(d);
        out.push(ident.check(&s0, &SparseMap::differential(&s0, SignRule::Standard), src, &d_src));
    }
    for site in r3_sites(d).into_iter().take(limits.r3) {
        let (e, _) = d.apply_r3(site)?;
        out.push(compare_tables("r3", &base, &table(&e)?, (0, 0)));
        out.extend(rho_iii(d, site)?.reports);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::AbelianGroup;
    use crate::morse::trefoil;

    #[test]
    fn trefoil_passes_everything() {
        let reps = run(&trefoil(), Suite::All).unwrap();
        assert!(reps.iter().all(|r| r.passed()), "{}", reps.iter().map(|r| r.to_string()).collect::<String>());
        for name in ["d2", "euler", "r1neg", "r2", "rho_II", "les-q", "les-z2", "duality"] {
            assert!(reps.iter().any(|r| r.name == name), "{name}");
        }
    }

    #[test]
    fn alternating_trefoil_has_no_third_move() {
        assert!(r3_sites(&trefoil()).is_empty());
        assert!(!r2_sites(&trefoil()).is_empty());
    }

    #[test]
    fn compare_detects_changes() {
        let mut t = HomologyTable::empty(Coefficients::Integer);
        t.insert(0, 2, GradingS::zero(), AbelianGroup::free(1));
        let mut u = t.clone();
        assert!(compare_tables("x", &t, &u, (0, 0)).passed());
        u.insert(0, 2, GradingS::zero(), AbelianGroup::new(1, &[2]));
        assert!(!compare_tables("x", &t, &u, (0, 0)).passed());
        let mut v = HomologyTable::empty(Coefficients::Integer);
        v.insert(-1, -1, GradingS::zero(), AbelianGroup::free(1));
        assert!(compare_tables("x", &t, &v, (-1, -3)).passed());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in ["d2", "euler", "reidemeister", "les", "duality", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }
}
