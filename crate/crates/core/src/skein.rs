//! Kauffman bracket expansions in the basis of crossingless diagrams, and the
//! substitution that turns them into graded Euler characteristics.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::diagram::{marker_vectors, Diagram};
use crate::error::SkeinError;
use crate::homology::HomologyTable;
use crate::surface::{CurveClass, CurveKind, GradingS, SurfaceModel};

/// An integer Laurent polynomial in `A`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPolyA(BTreeMap<i64, i64>);

impl LaurentPolyA {
    pub fn zero() -> LaurentPolyA {
        LaurentPolyA::default()
    }

    pub fn one() -> LaurentPolyA {
        LaurentPolyA::monomial(1, 0)
    }

    pub fn monomial(coef: i64, exp: i64) -> LaurentPolyA {
        let mut p = LaurentPolyA::zero();
        p.add_term(coef, exp);
        p
    }

    /// The value `-A^2 - A^-2` of a trivial circle.
    pub fn delta() -> LaurentPolyA {
        LaurentPolyA::from_terms([(-1, 2), (-1, -2)])
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> LaurentPolyA {
        let mut p = LaurentPolyA::zero();
        for (c, e) in terms {
            p.add_term(c, e);
        }
        p
    }

    pub fn add_term(&mut self, coef: i64, exp: i64) {
        let c = self.0.entry(exp).or_insert(0);
        *c += coef;
        if *c == 0 {
            self.0.remove(&exp);
        }
    }

    pub fn coefficient(&self, exp: i64) -> i64 {
        self.0.get(&exp).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.0.iter().map(|(&e, &c)| (c, e))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, k: i64) -> LaurentPolyA {
        LaurentPolyA::from_terms(self.terms().map(|(c, e)| (c * k, e)))
    }

    pub fn shift(&self, by: i64) -> LaurentPolyA {
        LaurentPolyA(self.0.iter().map(|(&e, &c)| (e + by, c)).collect())
    }

    pub fn pow(&self, n: usize) -> LaurentPolyA {
        (0..n).fold(LaurentPolyA::one(), |acc, _| &acc * self)
    }
}

impl Add for &LaurentPolyA {
    type Output = LaurentPolyA;

    fn add(self, other: &LaurentPolyA) -> LaurentPolyA {
        let mut p = self.clone();
        for (c, e) in other.terms() {
            p.add_term(c, e);
        }
        p
    }
}

impl Sub for &LaurentPolyA {
    type Output = LaurentPolyA;

    fn sub(self, other: &LaurentPolyA) -> LaurentPolyA {
        self + &-other
    }
}

impl Neg for &LaurentPolyA {
    type Output = LaurentPolyA;

    fn neg(self) -> LaurentPolyA {
        self.scale(-1)
    }
}

impl Mul for &LaurentPolyA {
    type Output = LaurentPolyA;

    fn mul(self, other: &LaurentPolyA) -> LaurentPolyA {
        let mut p = LaurentPolyA::zero();
        for (c1, e1) in self.terms() {
            for (c2, e2) in other.terms() {
                p.add_term(c1 * c2, e1 + e2);
            }
        }
        p
    }
}

impl fmt::Display for LaurentPolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().map(|(c, e)| format!("{c}*A^{e}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for LaurentPolyA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for LaurentPolyA {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(LaurentPolyA::zero());
        }
        let mut p = LaurentPolyA::zero();
        for term in s.split(" + ") {
            let (c, e) = term
                .trim()
                .split_once("*A^")
                .ok_or_else(|| format!("bad term `{term}`"))?;
            let c: i64 = c.parse().map_err(|_| format!("bad coefficient `{c}`"))?;
            let e: i64 = e.parse().map_err(|_| format!("bad exponent `{e}`"))?;
            p.add_term(c, e);
        }
        Ok(p)
    }
}

/// A crossingless diagram without trivial components, as a multiset of classes.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisElement(BTreeMap<CurveClass, usize>);

impl BasisElement {
    pub fn empty() -> BasisElement {
        BasisElement::default()
    }

    pub fn from_classes<I: IntoIterator<Item = CurveClass>>(classes: I) -> BasisElement {
        let mut b = BasisElement::empty();
        for c in classes {
            b.insert(c, 1);
        }
        b
    }

    pub fn insert(&mut self, class: CurveClass, mult: usize) {
        assert!(!class.is_trivial(), "trivial circles are not basis curves");
        if mult > 0 {
            *self.0.entry(class).or_insert(0) += mult;
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = (&CurveClass, usize)> {
        self.0.iter().map(|(c, &m)| (c, m))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> usize {
        self.0.values().sum()
    }

    /// The part made of unbounding curves, and the number of Möbius-bounding ones.
    pub fn split_moebius(&self) -> (BasisElement, usize) {
        let mut rest = BasisElement::empty();
        let mut count = 0;
        for (c, m) in self.classes() {
            if c.kind == CurveKind::MoebiusBounding {
                count += m;
            } else {
                rest.insert(c.clone(), m);
            }
        }
        (rest, count)
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .classes()
            .map(|(c, m)| {
                let w = c.canonical.to_string();
                let w = if w.contains(' ') { format!("({w})") } else { w };
                if m == 1 {
                    w
                } else {
                    format!("{w}^{m}")
                }
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Debug for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Coefficients `p_b` of a bracket in the crossingless basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BracketExpansion(pub BTreeMap<BasisElement, LaurentPolyA>);

impl BracketExpansion {
    pub fn add(&mut self, b: BasisElement, p: &LaurentPolyA) {
        let e = self.0.entry(b.clone()).or_default();
        *e = &*e + p;
        if e.is_zero() {
            self.0.remove(&b);
        }
    }

    pub fn get(&self, b: &BasisElement) -> LaurentPolyA {
        self.0.get(b).cloned().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale_by(&self, p: &LaurentPolyA) -> BracketExpansion {
        let mut out = BracketExpansion::default();
        for (b, q) in &self.0 {
            out.add(b.clone(), &(q * p));
        }
        out
    }

    pub fn plus(&self, other: &BracketExpansion) -> BracketExpansion {
        let mut out = self.clone();
        for (b, q) in &other.0 {
            out.add(b.clone(), q);
        }
        out
    }
}

impl fmt::Display for BracketExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, p) in &self.0 {
            writeln!(f, "{b} ; {p}")?;
        }
        Ok(())
    }
}

/// Coefficients `q_s` after substituting `x + 1/x` for each unbounding curve.
pub type QCoefficients = BTreeMap<GradingS, LaurentPolyA>;

fn add_q(q: &mut QCoefficients, s: GradingS, p: &LaurentPolyA) {
    let e = q.entry(s.clone()).or_default();
    *e = &*e + p;
    if e.is_zero() {
        q.remove(&s);
    }
}

/// State sum over all marker vectors.
pub fn kauffman_bracket(d: &Diagram) -> BracketExpansion {
    let n = d.crossing_count() as i64;
    let delta = LaurentPolyA::delta();
    let mut out = BracketExpansion::default();
    for m in marker_vectors(d.crossing_count()) {
        let neg = m.iter().filter(|&&x| x < 0).count() as i64;
        let sm = d.smooth(&m);
        let trivial = sm.circles.iter().filter(|c| c.class.is_trivial()).count();
        let b = BasisElement::from_classes(sm.circles.iter().filter(|c| !c.class.is_trivial()).map(|c| c.class.clone()));
        out.add(b, &delta.pow(trivial).shift(n - 2 * neg));
    }
    out
}

/// The bracket by resolving crossings one at a time.
pub fn kauffman_bracket_recursive(d: &Diagram) -> BracketExpansion {
    if d.crossing_count() == 0 {
        let mut trivial = 0;
        let mut b = BasisElement::empty();
        for w in d.loops() {
            let c = d.surface().classify(w).expect("diagram words are valid");
            if c.is_trivial() {
                trivial += 1;
            } else {
                b.insert(c, 1);
            }
        }
        let mut out = BracketExpansion::default();
        out.add(b, &LaurentPolyA::delta().pow(trivial));
        return out;
    }
    let (plus, _) = d.smooth_crossing(0, 1);
    let (minus, _) = d.smooth_crossing(0, -1);
    kauffman_bracket_recursive(&plus)
        .scale_by(&LaurentPolyA::monomial(1, 1))
        .plus(&kauffman_bracket_recursive(&minus).scale_by(&LaurentPolyA::monomial(1, -1)))
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, t| acc * (n - t) as i64 / (t + 1) as i64)
}

/// Sends each unbounding curve to `x + 1/x` and each Möbius-bounding curve to 2.
pub fn phi_expand(e: &BracketExpansion) -> QCoefficients {
    let mut q = QCoefficients::new();
    for (b, p) in &e.0 {
        let mut terms: Vec<(GradingS, i64)> = vec![(GradingS::zero(), 1)];
        for (c, m) in b.classes() {
            let factor: Vec<(GradingS, i64)> = match c.kind {
                CurveKind::MoebiusBounding => vec![(GradingS::zero(), 1 << m)],
                _ => (0..=m)
                    .map(|t| (GradingS::single(c.canonical.clone(), m as i64 - 2 * t as i64), binomial(m, t)))
                    .collect(),
            };
            terms = terms
                .iter()
                .flat_map(|(s1, k1)| factor.iter().map(move |(s2, k2)| (s1.add(s2), k1 * k2)))
                .collect();
        }
        for (s, k) in terms {
            add_q(&mut q, s, &p.scale(k));
        }
    }
    q
}

/// `sum_{i,j} A^j (-1)^((j - i) / 2) rank H_ijs` for one s.
pub fn euler_characteristic(t: &HomologyTable, s: &GradingS) -> LaurentPolyA {
    let mut p = LaurentPolyA::zero();
    for ((i, j, s2), g) in t.entries() {
        if s2 == s {
            let sign = if (j - i).div_euclid(2).rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(sign * g.rank as i64, *j);
        }
    }
    p
}

/// Inverts `phi_expand` on an orientable surface.
pub fn recover_p(q: &QCoefficients, surface: &SurfaceModel) -> Result<BracketExpansion, SkeinError> {
    if !surface.is_orientable() {
        return Err(SkeinError::Unorientable);
    }
    let mut work = q.clone();
    let mut out = BracketExpansion::default();
    while let Some(s) = work
        .keys()
        .max_by_key(|s| (s.entries().values().sum::<i64>(), (*s).clone()))
        .cloned()
    {
        if s.entries().values().any(|&k| k < 0) {
            return Err(SkeinError::NotInImage(s.to_string()));
        }
        let mut b = BasisElement::empty();
        for (w, &k) in s.entries() {
            b.insert(surface.classify(w)?, k as usize);
        }
        let p = work[&s].clone();
        let mut single = BracketExpansion::default();
        single.add(b.clone(), &p);
        for (s2, p2) in phi_expand(&single) {
            add_q(&mut work, s2, &-&p2);
        }
        out.add(b, &p);
    }
    Ok(out)
}

/// Sums over basis elements with the same unbounding part, weighted by `2^#moebius`.
pub fn moebius_grouped_sums(e: &BracketExpansion) -> BTreeMap<BasisElement, LaurentPolyA> {
    let mut out: BTreeMap<BasisElement, LaurentPolyA> = BTreeMap::new();
    for (b, p) in &e.0 {
        let (rest, m) = b.split_moebius();
        let entry = out.entry(rest).or_default();
        *entry = &*entry + &p.scale(1 << m);
    }
    out.retain(|_, p| !p.is_zero());
    out
}
