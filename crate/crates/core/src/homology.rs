//! Homology of the graded complexes over ℤ, ℚ and ℤ/2.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, One, Signed, Zero};

use crate::error::HomologyError;
use crate::matrix::Matrix;
use crate::state_complex::GradedComplex;
use crate::surface::GradingS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficients {
    Integer,
    Rational,
    Mod2,
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coefficients::Integer => "Z",
            Coefficients::Rational => "Q",
            Coefficients::Mod2 => "Z2",
        })
    }
}

impl FromStr for Coefficients {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Z" | "z" => Ok(Coefficients::Integer),
            "Q" | "q" => Ok(Coefficients::Rational),
            "Z2" | "z2" => Ok(Coefficients::Mod2),
            _ => Err(format!("unknown coefficients `{s}` (expected Z, Q or Z2)")),
        }
    }
}

/// A finitely generated abelian group `Z^rank + Z/t1 + Z/t2 + ...` with `t1 | t2 | ...`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigUint>,
}

impl AbelianGroup {
    pub fn zero() -> AbelianGroup {
        AbelianGroup::default()
    }

    pub fn free(rank: usize) -> AbelianGroup {
        AbelianGroup { rank, torsion: Vec::new() }
    }

    /// Builds a group from arbitrary cyclic factors; they are renormalized.
    pub fn new(rank: usize, torsion: &[u64]) -> AbelianGroup {
        AbelianGroup { rank, torsion: divisor_chain(torsion.iter().map(|&t| BigUint::from(t)).collect()) }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        AbelianGroup { rank: self.rank + other.rank, torsion: divisor_chain(t) }
    }

    /// Number of torsion factors of even order.
    pub fn even_torsion(&self) -> usize {
        self.torsion.iter().filter(|t| t.is_even()).count()
    }

    /// Comma-joined divisor chain, or `-` when torsion-free.
    pub fn torsion_text(&self) -> String {
        if self.torsion.is_empty() {
            "-".to_string()
        } else {
            self.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Normalizes cyclic orders into a divisor chain, dropping trivial factors.
pub fn divisor_chain(mut t: Vec<BigUint>) -> Vec<BigUint> {
    t.retain(|x| !x.is_one() && !x.is_zero());
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            let g = t[a].gcd(&t[b]);
            let l = &t[a] / &g * &t[b];
            t[a] = g;
            t[b] = l;
        }
    }
    t.retain(|x| !x.is_one());
    t
}

trait Entry: Clone + Integer + Signed + CheckedMul + CheckedSub {}
impl<T: Clone + Integer + Signed + CheckedMul + CheckedSub> Entry for T {}

fn to_rows<T: From<i64>>(m: &Matrix) -> Vec<Vec<T>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|&x| T::from(x)).collect()).collect()
}

fn find_pivot<T: Entry>(a: &[Vec<T>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (r, row) in a.iter().enumerate().skip(t) {
        for (c, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            if x.abs().is_one() {
                return Some((r, c));
            }
            if best.is_none_or(|(br, bc)| x.abs() < a[br][bc].abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

/// Diagonal of a Smith reduction, or `None` on overflow.
fn smith_diagonal<T: Entry>(mut a: Vec<Vec<T>>) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = find_pivot(&a, t) else { break };
        a.swap(t, pr);
        for row in a.iter_mut().skip(t) {
            row.swap(t, pc);
        }
        loop {
            // clear column t below the pivot
            let mut smallest: Option<usize> = None;
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = a[r][t].clone() / a[t][t].clone();
                if !q.is_zero() {
                    let (head, tail) = a.split_at_mut(r);
                    let src = &head[t];
                    let dst = &mut tail[0];
                    for c in t..cols {
                        if !src[c].is_zero() {
                            dst[c] = dst[c].checked_sub(&q.checked_mul(&src[c])?)?;
                        }
                    }
                }
                if !a[r][t].is_zero() && smallest.is_none_or(|s| a[r][t].abs() < a[s][t].abs()) {
                    smallest = Some(r);
                }
            }
            if let Some(r) = smallest {
                a.swap(t, r);
                continue;
            }
            // clear row t to the right of the pivot
            let mut smallest: Option<usize> = None;
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = a[t][c].clone() / a[t][t].clone();
                a[t][c] = a[t][c].checked_sub(&q.checked_mul(&a[t][t])?)?;
                if !a[t][c].is_zero() && smallest.is_none_or(|s| a[t][c].abs() < a[t][s].abs()) {
                    smallest = Some(c);
                }
            }
            match smallest {
                Some(c) => {
                    for row in a.iter_mut().skip(t) {
                        row.swap(t, c);
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    Some(diag)
}

/// Invariant factors `d1 | d2 | ... | dr` of an integer matrix, `r` its rank.
pub fn smith_normal_form(m: &Matrix) -> Vec<BigUint> {
    let diag: Vec<BigUint> = match smith_diagonal::<i64>(to_rows(m)) {
        Some(d) => d.into_iter().map(|x| BigUint::from(x as u64)).collect(),
        None => smith_diagonal::<BigInt>(to_rows(m))
            .expect("big integers do not overflow")
            .into_iter()
            .map(|x| x.magnitude().clone())
            .collect(),
    };
    let rank = diag.len();
    let rest = divisor_chain(diag);
    let mut out = vec![BigUint::one(); rank - rest.len()];
    out.extend(rest);
    out
}

fn bareiss_rank<T: Entry>(mut a: Vec<Vec<T>>) -> Option<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = T::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let x = a[r][k].checked_mul(&a[rank][c])?.checked_sub(&a[r][c].checked_mul(&a[rank][k])?)?;
                a[r][k] = x / prev.clone();
            }
            a[r][c] = T::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

/// Rank over ℚ by fraction-free elimination.
pub fn rational_rank(m: &Matrix) -> usize {
    match bareiss_rank::<i64>(to_rows(m)) {
        Some(r) => r,
        None => bareiss_rank::<BigInt>(to_rows(m)).expect("big integers do not overflow"),
    }
}

/// Rank over ℤ/2.
pub fn mod2_rank(m: &Matrix) -> usize {
    let words = m.cols().div_ceil(64);
    let mut rows: Vec<Vec<u64>> = (0..m.rows())
        .map(|r| {
            let mut bits = vec![0u64; words];
            for (c, &x) in m.row(r).iter().enumerate() {
                if x & 1 == 1 {
                    bits[c / 64] |= 1 << (c % 64);
                }
            }
            bits
        })
        .collect();
    let mut rank = 0;
    for c in 0..m.cols() {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank and (for ℤ) torsion of one differential.
fn analyse(m: &Matrix, coefficients: Coefficients) -> (usize, Vec<BigUint>) {
    if m.rows() == 0 || m.cols() == 0 || m.is_zero() {
        return (0, Vec::new());
    }
    match coefficients {
        Coefficients::Integer => {
            let f = smith_normal_form(m);
            (f.len(), f.into_iter().filter(|x| !x.is_one()).collect())
        }
        Coefficients::Rational => (rational_rank(m), Vec::new()),
        Coefficients::Mod2 => (mod2_rank(m), Vec::new()),
    }
}

pub type TableKey = (i64, i64, GradingS);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyTable {
    pub coefficients: Coefficients,
    entries: BTreeMap<TableKey, AbelianGroup>,
}

impl HomologyTable {
    pub fn empty(coefficients: Coefficients) -> HomologyTable {
        HomologyTable { coefficients, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, i: i64, j: i64, s: GradingS, g: AbelianGroup) {
        if g.is_zero() {
            self.entries.remove(&(i, j, s));
        } else {
            self.entries.insert((i, j, s), g);
        }
    }

    pub fn get(&self, i: i64, j: i64, s: &GradingS) -> AbelianGroup {
        self.entries.get(&(i, j, s.clone())).cloned().unwrap_or_default()
    }

    /// Nonzero entries in (i, j, s) order.
    pub fn entries(&self) -> impl Iterator<Item = (&TableKey, &AbelianGroup)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.entries.values().map(|g| g.rank).sum()
    }

    /// `sum_i (-1)^((j - i) / 2) rank H_ijs` per (j, s).
    pub fn euler(&self) -> BTreeMap<(i64, GradingS), i64> {
        let mut out: BTreeMap<(i64, GradingS), i64> = BTreeMap::new();
        for ((i, j, s), g) in &self.entries {
            let sign = if ((j - i) / 2) % 2 == 0 { 1 } else { -1 };
            *out.entry((*j, s.clone())).or_default() += sign * g.rank as i64;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// Rows `i j s rank torsion`, sorted by (j, s, i).
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<_> = self.entries.iter().collect();
        rows.sort_by(|((i1, j1, s1), _), ((i2, j2, s2), _)| (j1, s1, i1).cmp(&(j2, s2, i2)));
        let mut out = String::from("i\tj\ts\trank\ttorsion\n");
        for ((i, j, s), g) in rows {
            out.push_str(&format!("{i}\t{j}\t{s}\t{}\t{}\n", g.rank, g.torsion_text()));
        }
        out
    }

    /// Direct sum over s.
    pub fn aggregate_handlebody(&self) -> BTreeMap<(i64, i64), AbelianGroup> {
        let mut out: BTreeMap<(i64, i64), AbelianGroup> = BTreeMap::new();
        for ((i, j, _), g) in &self.entries {
            let e = out.entry((*i, *j)).or_default();
            *e = e.direct_sum(g);
        }
        out
    }
}

/// Homology of every block of `c`. Fails if some `d∘d` is nonzero.
pub fn homology(c: &GradedComplex, coefficients: Coefficients) -> Result<HomologyTable, HomologyError> {
    c.check_square()?;
    let mut table = HomologyTable::empty(coefficients);
    for b in &c.blocks {
        let mut maps: BTreeMap<i64, (usize, Vec<BigUint>)> = BTreeMap::new();
        for (&i, m) in &b.d {
            maps.insert(i, analyse(m, coefficients));
        }
        for &i in b.groups.keys() {
            let out_rank = maps.get(&i).map_or(0, |x| x.0);
            let (in_rank, torsion) = maps.get(&(i - c.step)).cloned().unwrap_or_default();
            let rank = b.dim(i) - out_rank - in_rank;
            table.insert(i, b.j, b.s.clone(), AbelianGroup { rank, torsion });
        }
    }
    Ok(table)
}

/// Whether `t2` at `(i + di, j + dj, s_map(s))` matches `t1` at `(i, j, s)` entrywise.
pub fn table_isomorphic(
    t1: &HomologyTable,
    t2: &HomologyTable,
    shift: (i64, i64),
    s_map: Option<&dyn Fn(&GradingS) -> GradingS>,
) -> bool {
    if t1.len() != t2.len() {
        return false;
    }
    t1.entries().all(|((i, j, s), g)| {
        let s2 = s_map.map_or_else(|| s.clone(), |f| f(s));
        t2.entries.get(&(i + shift.0, j + shift.1, s2)) == Some(g)
    })
}

/// Universal coefficients: `dim H(Z/2)_i = rank H_i + #even(H_i) + #even(H_{i-2})`,
/// and ranks over ℚ match the free ranks over ℤ.
pub fn uct_consistent(z: &HomologyTable, q: &HomologyTable, z2: &HomologyTable) -> bool {
    let mut keys: Vec<&TableKey> = z.entries.keys().chain(q.entries.keys()).chain(z2.entries.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().all(|(i, j, s)| {
        let h = z.get(*i, *j, s);
        let below = z.get(i - 2, *j, s);
        q.get(*i, *j, s).rank == h.rank && z2.get(*i, *j, s).rank == h.rank + h.even_torsion() + below.even_torsion()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Diagram;
    use crate::surface::SurfaceModel;
    use proptest::prelude::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn snf_examples() {
        assert_eq!(smith_normal_form(&Matrix::from_rows(&[vec![2, 0], vec![0, 0]])), big(&[2]));
        assert_eq!(smith_normal_form(&Matrix::from_rows(&[vec![1, 1], vec![1, 1]])), big(&[1]));
        assert_eq!(smith_normal_form(&Matrix::from_rows(&[vec![2, 4], vec![6, 8]])), big(&[2, 4]));
        assert_eq!(smith_normal_form(&Matrix::from_rows(&[vec![2, 0], vec![0, 3]])), big(&[1, 6]));
        assert!(smith_normal_form(&Matrix::zeros(3, 0)).is_empty());
    }

    #[test]
    fn snf_overflow_falls_back() {
        let x = 1i64 << 40;
        let m = Matrix::from_rows(&[vec![x, x + 1], vec![x - 1, x]]);
        assert_eq!(smith_normal_form(&m), big(&[1, 1]));
        let m = Matrix::from_rows(&[vec![x, 0], vec![0, x]]);
        assert_eq!(smith_normal_form(&m), big(&[1 << 40, 1 << 40]));
    }

    #[test]
    fn chains() {
        assert_eq!(AbelianGroup::new(0, &[4, 6]).torsion, big(&[2, 12]));
        assert_eq!(AbelianGroup::new(1, &[2]).direct_sum(&AbelianGroup::new(0, &[3])), AbelianGroup::new(1, &[6]));
        assert_eq!(AbelianGroup::new(2, &[2, 2]).to_string(), "Z^2 + Z/2 + Z/2");
        assert_eq!(AbelianGroup::zero().torsion_text(), "-");
    }

    #[test]
    fn field_ranks() {
        let m = Matrix::from_rows(&[vec![2, 0], vec![0, 1]]);
        assert_eq!(rational_rank(&m), 2);
        assert_eq!(mod2_rank(&m), 1);
        let wide = Matrix::from_rows(&[(0..130).map(|c| (c % 3 == 0) as i64).collect(), (0..130).map(|c| (c % 2) as i64).collect()]);
        assert_eq!(mod2_rank(&wide), 2);
    }

    fn loops(surface: SurfaceModel, words: &[&str]) -> Diagram {
        Diagram::with_crossings(surface, 0, vec![], words.iter().map(|w| w.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn free_loops() {
        let t = homology(&GradedComplex::new(&loops(SurfaceModel::planar_holes(1).unwrap(), &["a"])), Coefficients::Integer).unwrap();
        assert_eq!(t.len(), 2);
        for s in ["a:+1", "a:-1"] {
            assert_eq!(t.get(0, 0, &s.parse().unwrap()), AbelianGroup::free(1));
        }
        assert_eq!(t.aggregate_handlebody(), BTreeMap::from([((0, 0), AbelianGroup::free(2))]));

        let t = homology(&GradedComplex::new(&loops(SurfaceModel::disk(), &[""])), Coefficients::Integer).unwrap();
        assert_eq!(t.get(0, 2, &GradingS::zero()), AbelianGroup::free(1));
        assert_eq!(t.get(0, -2, &GradingS::zero()), AbelianGroup::free(1));
        assert_eq!(t.len(), 2);

        let t = homology(&GradedComplex::new(&loops(SurfaceModel::planar_holes(2).unwrap(), &["a", "b"])), Coefficients::Integer).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.aggregate_handlebody(), BTreeMap::from([((0, 0), AbelianGroup::free(4))]));
        assert!(HomologyTable::empty(Coefficients::Integer).aggregate_handlebody().is_empty());
    }

    #[test]
    fn tsv_layout() {
        let t = homology(&GradedComplex::new(&loops(SurfaceModel::planar_holes(1).unwrap(), &["a"])), Coefficients::Integer).unwrap();
        assert_eq!(t.to_tsv(), "i\tj\ts\trank\ttorsion\n0\t0\ta:-1\t1\t-\n0\t0\ta:+1\t1\t-\n");
    }

    #[test]
    fn isomorphism_under_shift() {
        let t = homology(&GradedComplex::new(&loops(SurfaceModel::disk(), &[""])), Coefficients::Integer).unwrap();
        assert!(table_isomorphic(&t, &t, (0, 0), None));
        assert!(!table_isomorphic(&t, &HomologyTable::empty(Coefficients::Integer), (0, 0), None));
        assert!(!table_isomorphic(&t, &t, (2, 0), None));
    }

    fn minors(m: &[Vec<i64>], k: usize) -> BigInt {
        // gcd of all k by k minors, by Laplace expansion
        fn det(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> BigInt {
            if rows.len() == 1 {
                return BigInt::from(m[rows[0]][cols[0]]);
            }
            let mut acc = BigInt::zero();
            for (p, &c) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = BigInt::from(m[rows[0]][c]) * det(m, &rows[1..], &rest);
                if p % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            (k - 1..n)
                .flat_map(|last| {
                    subsets(last, k - 1).into_iter().map(move |mut s| {
                        s.push(last);
                        s
                    })
                })
                .collect()
        }
        let mut g = BigInt::zero();
        for rs in subsets(m.len(), k) {
            for cs in subsets(m[0].len(), k) {
                g = g.gcd(&det(m, &rs, &cs));
            }
        }
        g
    }

    proptest! {
        #[test]
        fn snf_matches_determinantal_divisors(rows in 1usize..4, cols in 1usize..4, seed in prop::collection::vec(-6i64..7, 16)) {
            let m: Vec<Vec<i64>> = (0..rows).map(|r| (0..cols).map(|c| seed[r * 4 + c]).collect()).collect();
            let f = smith_normal_form(&Matrix::from_rows(&m));
            let mut product = BigInt::one();
            for k in 1..=rows.min(cols) {
                let dk = minors(&m, k);
                if dk.is_zero() {
                    prop_assert_eq!(f.len(), k - 1);
                    break;
                }
                product *= BigInt::from(f[k - 1].clone());
                prop_assert_eq!(&product, &dk);
            }
            for w in f.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            prop_assert_eq!(f.len(), rational_rank(&Matrix::from_rows(&m)));
        }
    }
}
