//! Base surfaces presented as a disk with attached bands, free-group words for
//! closed curves, and the trivial / Möbius-bounding / unbounding classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::SurfaceError;

/// Generators are named `a`, `b`, ... in band declaration order.
pub const MAX_GENERATORS: usize = 26;

/// A generator or its inverse. The encoding `2 * generator + inverse` makes the
/// derived order `a < a' < b < b' < ...`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator < MAX_GENERATORS, "generator index out of range");
        Letter((generator as u8) << 1 | inverse as u8)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn symbol(self) -> char {
        (b'a' + self.generator() as u8) as char
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inverse() {
            write!(f, "{}'", self.symbol())
        } else {
            write!(f, "{}", self.symbol())
        }
    }
}

/// A word in the free group on the band generators.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveWord(Vec<Letter>);

impl CurveWord {
    pub fn new(letters: Vec<Letter>) -> CurveWord {
        CurveWord(letters)
    }

    pub fn empty() -> CurveWord {
        CurveWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn extend(&mut self, other: &CurveWord) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn inverse(&self) -> CurveWord {
        CurveWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &CurveWord) -> CurveWord {
        let mut w = self.clone();
        w.extend(other);
        w
    }

    /// Removes adjacent `x x'` pairs.
    pub fn free_reduce(&self) -> CurveWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        CurveWord(out)
    }

    pub fn rotate(&self, k: usize) -> CurveWord {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        CurveWord(v)
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }
}

impl fmt::Debug for CurveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self)
    }
}

impl fmt::Display for CurveWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for CurveWord {
    type Err = SurfaceError;

    /// Parses whitespace-separated letters, `'` marking an inverse: `a b'`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let bytes = tok.as_bytes();
            let (g, inv) = match bytes {
                [c] => (*c, false),
                [c, b'\''] => (*c, true),
                _ => return Err(SurfaceError::BadLetter(tok.to_string())),
            };
            if !g.is_ascii_lowercase() {
                return Err(SurfaceError::BadLetter(tok.to_string()));
            }
            letters.push(Letter::new((g - b'a') as usize, inv));
        }
        Ok(CurveWord(letters))
    }
}

/// Canonical representative of the unoriented free homotopy class of `word`:
/// freely and cyclically reduced, then minimal over all rotations of the word
/// and of its inverse.
pub fn reduce_cyclic(word: &CurveWord) -> CurveWord {
    let mut v = word.free_reduce().0;
    let mut lo = 0;
    let mut hi = v.len();
    while hi - lo >= 2 && v[lo] == v[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    v = v[lo..hi].to_vec();
    if v.is_empty() {
        return CurveWord::empty();
    }
    let fwd = CurveWord(v);
    let inv = fwd.inverse();
    let n = fwd.len();
    let mut best = fwd.clone();
    for w in [&fwd, &inv] {
        for k in 0..n {
            let r = w.rotate(k);
            if r < best {
                best = r;
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Catalogue {
    PlanarHoles(u32),
    OrientableWithBoundary { genus: u32, boundary: u32 },
    MoebiusBand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Band {
    pub id: char,
    pub flipped: bool,
}

/// A compact surface with boundary, presented as a disk with `k` bands
/// attached along its boundary. Its fundamental group is free on the bands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceModel {
    bands: Vec<Band>,
    attachment: Vec<usize>,
    catalogue: Catalogue,
}

fn band_ids(k: usize) -> Vec<Band> {
    (0..k)
        .map(|g| Band { id: (b'a' + g as u8) as char, flipped: false })
        .collect()
}

impl SurfaceModel {
    /// The disk with `holes` holes: bands `a a b b ...`, none flipped.
    pub fn planar_holes(holes: u32) -> Result<SurfaceModel, SurfaceError> {
        let k = holes as usize;
        if k > MAX_GENERATORS {
            return Err(SurfaceError::TooManyBands(k));
        }
        let attachment = (0..k).flat_map(|g| [g, g]).collect();
        SurfaceModel::from_parts(band_ids(k), attachment, Catalogue::PlanarHoles(holes))
    }

    pub fn disk() -> SurfaceModel {
        SurfaceModel::planar_holes(0).unwrap()
    }

    pub fn annulus() -> SurfaceModel {
        SurfaceModel::planar_holes(1).unwrap()
    }

    /// Genus `genus` with `boundary >= 1` boundary components: linked pairs
    /// `a b a b c d c d ...` followed by `boundary - 1` unlinked bands.
    pub fn orientable(genus: u32, boundary: u32) -> Result<SurfaceModel, SurfaceError> {
        if boundary == 0 {
            return Err(SurfaceError::Closed);
        }
        let k = (2 * genus + boundary - 1) as usize;
        if k > MAX_GENERATORS {
            return Err(SurfaceError::TooManyBands(k));
        }
        let mut attachment = Vec::with_capacity(2 * k);
        for h in 0..genus as usize {
            let (x, y) = (2 * h, 2 * h + 1);
            attachment.extend([x, y, x, y]);
        }
        for g in 2 * genus as usize..k {
            attachment.extend([g, g]);
        }
        SurfaceModel::from_parts(
            band_ids(k),
            attachment,
            Catalogue::OrientableWithBoundary { genus, boundary },
        )
    }

    pub fn moebius_band() -> SurfaceModel {
        let bands = vec![Band { id: 'a', flipped: true }];
        SurfaceModel::from_parts(bands, vec![0, 0], Catalogue::MoebiusBand).unwrap()
    }

    pub fn from_parts(
        bands: Vec<Band>,
        attachment: Vec<usize>,
        catalogue: Catalogue,
    ) -> Result<SurfaceModel, SurfaceError> {
        let k = bands.len();
        if k > MAX_GENERATORS {
            return Err(SurfaceError::TooManyBands(k));
        }
        for (g, b) in bands.iter().enumerate() {
            if b.id != (b'a' + g as u8) as char {
                return Err(SurfaceError::Invalid(format!("band {g} must be named {}", (b'a' + g as u8) as char)));
            }
        }
        let mut count = vec![0usize; k];
        for &t in &attachment {
            if t >= k {
                return Err(SurfaceError::Invalid(format!("attachment token {t} names no band")));
            }
            count[t] += 1;
        }
        if count.iter().any(|&c| c != 2) {
            return Err(SurfaceError::Invalid("every band must be attached exactly twice".into()));
        }
        let flipped = bands.iter().filter(|b| b.flipped).count();
        match catalogue {
            Catalogue::MoebiusBand => {
                if k != 1 || flipped != 1 {
                    return Err(SurfaceError::Invalid("a Möbius band is one flipped band".into()));
                }
            }
            Catalogue::PlanarHoles(h) => {
                if h as usize != k || flipped != 0 {
                    return Err(SurfaceError::Invalid("planar surface needs h unflipped bands".into()));
                }
                if !is_unlinked(&attachment) {
                    return Err(SurfaceError::Invalid("planar bands must be unlinked".into()));
                }
            }
            Catalogue::OrientableWithBoundary { genus, boundary } => {
                if boundary == 0 {
                    return Err(SurfaceError::Closed);
                }
                if flipped != 0 || k != (2 * genus + boundary - 1) as usize {
                    return Err(SurfaceError::Invalid("band count does not match genus and boundary".into()));
                }
            }
        }
        Ok(SurfaceModel { bands, attachment, catalogue })
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn attachment(&self) -> &[usize] {
        &self.attachment
    }

    pub fn catalogue(&self) -> Catalogue {
        self.catalogue
    }

    pub fn generator_count(&self) -> usize {
        self.bands.len()
    }

    pub fn is_orientable(&self) -> bool {
        self.bands.iter().all(|b| !b.flipped)
    }

    pub fn check_word(&self, word: &CurveWord) -> Result<(), SurfaceError> {
        match word.max_generator() {
            Some(g) if g >= self.bands.len() => Err(SurfaceError::UnknownGenerator {
                generator: (b'a' + g as u8) as char,
                bands: self.bands.len(),
            }),
            _ => Ok(()),
        }
    }

    pub fn classify(&self, word: &CurveWord) -> Result<CurveClass, SurfaceError> {
        self.check_word(word)?;
        Ok(self.classify_unchecked(word))
    }

    pub(crate) fn classify_unchecked(&self, word: &CurveWord) -> CurveClass {
        let canonical = reduce_cyclic(word);
        let flips = canonical
            .letters()
            .iter()
            .filter(|l| self.bands[l.generator()].flipped)
            .count();
        let sided = if flips % 2 == 0 { 1 } else { -1 };
        let kind = if canonical.is_empty() {
            CurveKind::Trivial
        } else if self.catalogue == Catalogue::MoebiusBand && canonical.len() == 2 && canonical.letters()[0] == canonical.letters()[1] {
            CurveKind::MoebiusBounding
        } else {
            CurveKind::Unbounding
        };
        CurveClass { canonical, kind, sided }
    }
}

fn is_unlinked(attachment: &[usize]) -> bool {
    // Chords of the attachment circle must be pairwise non-crossing.
    let mut stack: Vec<usize> = Vec::new();
    for &t in attachment {
        if stack.last() == Some(&t) {
            stack.pop();
        } else if stack.contains(&t) {
            return false;
        } else {
            stack.push(t);
        }
    }
    stack.is_empty()
}

impl fmt::Display for SurfaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.catalogue {
            Catalogue::PlanarHoles(h) => write!(f, "planar_holes {h}"),
            Catalogue::OrientableWithBoundary { genus, boundary } => write!(f, "orientable {genus} {boundary}"),
            Catalogue::MoebiusBand => write!(f, "moebius"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveKind {
    Trivial,
    MoebiusBounding,
    Unbounding,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveClass {
    pub canonical: CurveWord,
    pub kind: CurveKind,
    /// Orientation character: -1 for one-sided curves.
    pub sided: i8,
}

impl CurveClass {
    pub fn is_trivial(&self) -> bool {
        self.kind == CurveKind::Trivial
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            f.write_str("triv")
        } else {
            write!(f, "{}", self.canonical)
        }
    }
}

/// An element of the free abelian group on unbounding curve classes.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradingS(BTreeMap<CurveWord, i64>);

impl GradingS {
    pub fn zero() -> GradingS {
        GradingS(BTreeMap::new())
    }

    pub fn single(class: CurveWord, coef: i64) -> GradingS {
        let mut s = GradingS::zero();
        s.add_term(class, coef);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (CurveWord, i64)>>(terms: I) -> GradingS {
        let mut s = GradingS::zero();
        for (c, k) in terms {
            s.add_term(c, k);
        }
        s
    }

    pub fn entries(&self) -> &BTreeMap<CurveWord, i64> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficient(&self, class: &CurveWord) -> i64 {
        self.0.get(class).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, class: CurveWord, coef: i64) {
        if coef == 0 {
            return;
        }
        let e = self.0.entry(class.clone()).or_insert(0);
        *e += coef;
        if *e == 0 {
            self.0.remove(&class);
        }
    }

    pub fn add(&self, other: &GradingS) -> GradingS {
        let mut s = self.clone();
        for (c, &k) in &other.0 {
            s.add_term(c.clone(), k);
        }
        s
    }

    pub fn negate(&self) -> GradingS {
        GradingS(self.0.iter().map(|(c, &k)| (c.clone(), -k)).collect())
    }

    /// Applies the sign change `eps = -1` on every class in `negated`.
    pub fn flip(&self, negated: &BTreeSet<CurveWord>) -> GradingS {
        GradingS(
            self.0
                .iter()
                .map(|(c, &k)| (c.clone(), if negated.contains(c) { -k } else { k }))
                .collect(),
        )
    }
}

impl fmt::Debug for GradingS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

impl fmt::Display for GradingS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, coef)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}:{coef:+}")?;
        }
        Ok(())
    }
}

impl FromStr for GradingS {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(GradingS::zero());
        }
        let mut g = GradingS::zero();
        for part in s.split(',') {
            let (class, coef) = part
                .rsplit_once(':')
                .ok_or_else(|| SurfaceError::BadLetter(part.to_string()))?;
            let coef: i64 = coef
                .trim_start_matches('+')
                .parse()
                .map_err(|_| SurfaceError::BadLetter(part.to_string()))?;
            g.add_term(reduce_cyclic(&class.parse()?), coef);
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> CurveWord {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_cyclic(&w("a a'")), CurveWord::empty());
        assert_eq!(reduce_cyclic(&w("a' b a")), w("b"));
        assert_eq!(reduce_cyclic(&w("b a a' b")), w("b b"));
        assert_eq!(reduce_cyclic(&w("b' a")), w("a b'"));
        // inverse of a b is b' a', whose rotation a' b' is larger than a b
        assert_eq!(reduce_cyclic(&w("b' a'")), w("a b"));
    }

    #[test]
    fn classify_examples() {
        let mb = SurfaceModel::moebius_band();
        let c = mb.classify(&CurveWord::empty()).unwrap();
        assert_eq!(c.kind, CurveKind::Trivial);
        let c = mb.classify(&w("a a")).unwrap();
        assert_eq!(c.kind, CurveKind::MoebiusBounding);
        assert_eq!(c.sided, 1);
        let c = mb.classify(&w("a' a'")).unwrap();
        assert_eq!(c.kind, CurveKind::MoebiusBounding);
        let c = mb.classify(&w("a")).unwrap();
        assert_eq!((c.kind, c.sided), (CurveKind::Unbounding, -1));

        let p2 = SurfaceModel::planar_holes(2).unwrap();
        let c = p2.classify(&w("a")).unwrap();
        assert_eq!((c.kind, c.sided), (CurveKind::Unbounding, 1));
        assert!(matches!(p2.classify(&w("c")), Err(SurfaceError::UnknownGenerator { .. })));
    }

    #[test]
    fn catalogue_invariants() {
        assert!(SurfaceModel::planar_holes(3).unwrap().is_orientable());
        let t = SurfaceModel::orientable(1, 1).unwrap();
        assert_eq!(t.attachment(), &[0, 1, 0, 1]);
        assert_eq!(SurfaceModel::orientable(1, 2).unwrap().generator_count(), 3);
        assert!(!SurfaceModel::moebius_band().is_orientable());
        assert!(SurfaceModel::orientable(2, 0).is_err());
        let linked = SurfaceModel::from_parts(band_ids(2), vec![0, 1, 0, 1], Catalogue::PlanarHoles(2));
        assert!(linked.is_err());
        let flipped = SurfaceModel::from_parts(
            vec![Band { id: 'a', flipped: true }],
            vec![0, 0],
            Catalogue::PlanarHoles(1),
        );
        assert!(flipped.is_err());
    }

    #[test]
    fn grading_arithmetic() {
        let g = w("a");
        let d = w("b");
        let s1 = GradingS::single(g.clone(), 1);
        let s2 = GradingS::single(g.clone(), -1);
        assert!(s1.add(&s2).is_zero());

        let s = GradingS::from_terms([(g.clone(), 2), (d.clone(), -1)]);
        assert_eq!(s.negate(), GradingS::from_terms([(g.clone(), -2), (d.clone(), 1)]));
        let neg: BTreeSet<_> = [g.clone()].into_iter().collect();
        assert_eq!(s.flip(&neg), GradingS::from_terms([(g, -2), (d, -1)]));
    }

    #[test]
    fn text_forms() {
        let s = GradingS::from_terms([(w("a"), 1), (w("b"), -2)]);
        assert_eq!(s.to_string(), "a:+1,b:-2");
        assert_eq!(s.to_string().parse::<GradingS>().unwrap(), s);
        assert_eq!(GradingS::zero().to_string(), "0");
        assert_eq!(w("a b'").to_string(), "a b'");
    }
}
