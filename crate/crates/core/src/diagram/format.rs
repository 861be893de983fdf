//! Line-based text form of a diagram.
//!
//! ```text
//! surface planar_holes 2
//! crossing x1
//! edge x1.0 x1.1 : a b'
//! loop : a
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{Diagram, Edge, Endpoint};
use crate::error::{DiagramError, SurfaceError};
use crate::surface::{CurveWord, SurfaceModel};

fn err(line: usize, column: usize, message: impl Into<String>) -> DiagramError {
    DiagramError::Parse { line, column, message: message.into() }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(b) = start.take() {
                out.push((b, &s[b..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(b) = start {
        out.push((b, &s[b..]));
    }
    out.into_iter().map(|(b, t)| (s[..b].chars().count() + 1, t)).collect()
}

fn parse_surface(line: usize, toks: &[(usize, &str)]) -> Result<SurfaceModel, DiagramError> {
    let (col, kind) = *toks.get(1).ok_or_else(|| err(line, 8, "missing surface kind"))?;
    let num = |k: usize| -> Result<u32, DiagramError> {
        let (c, t) = *toks.get(k).ok_or_else(|| err(line, col, "missing surface parameter"))?;
        t.parse().map_err(|_| err(line, c, format!("expected a nonnegative integer, found `{t}`")))
    };
    let arity = |k: usize| -> Result<(), DiagramError> {
        match toks.get(k) {
            Some(&(c, t)) => Err(err(line, c, format!("unexpected `{t}`"))),
            None => Ok(()),
        }
    };
    let wrap = |e: SurfaceError| -> DiagramError {
        match e {
            SurfaceError::Closed => DiagramError::Surface(e),
            other => err(line, col, other.to_string()),
        }
    };
    match kind {
        "planar_holes" => {
            let h = num(2)?;
            arity(3)?;
            SurfaceModel::planar_holes(h).map_err(wrap)
        }
        "disk" => {
            arity(2)?;
            Ok(SurfaceModel::disk())
        }
        "annulus" => {
            arity(2)?;
            Ok(SurfaceModel::annulus())
        }
        "orientable" => {
            let g = num(2)?;
            let b = num(3)?;
            arity(4)?;
            SurfaceModel::orientable(g, b).map_err(wrap)
        }
        "moebius" => {
            arity(2)?;
            Ok(SurfaceModel::moebius_band())
        }
        "rp2" | "projective_plane" | "closed" | "sphere" | "torus" | "klein" => {
            Err(DiagramError::Surface(SurfaceError::Closed))
        }
        other => Err(err(line, col, format!("unknown surface `{other}`"))),
    }
}

fn parse_word(line: usize, col: usize, text: &str, surface: &SurfaceModel) -> Result<CurveWord, DiagramError> {
    let w: CurveWord = text.parse().map_err(|e: SurfaceError| err(line, col, e.to_string()))?;
    surface.check_word(&w).map_err(|e| err(line, col, e.to_string()))?;
    Ok(w)
}

impl FromStr for Diagram {
    type Err = DiagramError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut surface = None;
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut pending_edges = Vec::new();
        let mut pending_loops = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = raw.split('#').next().unwrap();
            let (head, word) = match body.find(':') {
                Some(k) => (&body[..k], Some((body[..=k].chars().count() + 1, &body[k + 1..]))),
                None => (body, None),
            };
            let toks = tokens(head);
            let Some(&(col, kw)) = toks.first() else {
                if word.is_some() {
                    return Err(err(line, 1, "missing keyword"));
                }
                continue;
            };
            match kw {
                "surface" => {
                    if surface.is_some() {
                        return Err(err(line, col, "surface declared twice"));
                    }
                    if word.is_some() {
                        return Err(err(line, col, "unexpected `:`"));
                    }
                    surface = Some(parse_surface(line, &toks)?);
                }
                "crossing" => {
                    let &(c, name) = toks.get(1).ok_or_else(|| err(line, col, "missing crossing name"))?;
                    if toks.len() > 2 || word.is_some() {
                        return Err(err(line, c, "expected a single crossing name"));
                    }
                    if name.contains('.') || index.contains_key(name) {
                        return Err(err(line, c, format!("bad or duplicate crossing name `{name}`")));
                    }
                    index.insert(name.to_string(), names.len());
                    names.push(name.to_string());
                }
                "edge" => {
                    let (wc, w) = word.ok_or_else(|| err(line, col, "edge needs `:` before its word"))?;
                    if toks.len() != 3 {
                        return Err(err(line, col, "edge needs two endpoints"));
                    }
                    pending_edges.push((line, toks[1], toks[2], wc, w.to_string()));
                }
                "loop" => {
                    let (wc, w) = word.ok_or_else(|| err(line, col, "loop needs `:` before its word"))?;
                    if toks.len() != 1 {
                        return Err(err(line, toks[1].0, "unexpected token"));
                    }
                    pending_loops.push((line, wc, w.to_string()));
                }
                other => return Err(err(line, col, format!("unknown keyword `{other}`"))),
            }
        }
        let surface = surface.ok_or_else(|| err(1, 1, "missing `surface` line"))?;
        let endpoint = |line: usize, (col, t): (usize, &str)| -> Result<Endpoint, DiagramError> {
            let (name, slot) = t
                .rsplit_once('.')
                .ok_or_else(|| err(line, col, format!("expected `crossing.slot`, found `{t}`")))?;
            let &c = index
                .get(name)
                .ok_or_else(|| err(line, col, format!("undeclared crossing `{name}`")))?;
            let slot: u8 = match slot.parse() {
                Ok(k) if k < 4 => k,
                _ => return Err(err(line, col + name.chars().count() + 1, format!("slot must be 0..3, found `{slot}`"))),
            };
            Ok(Endpoint::new(c, slot))
        };
        let mut edges = Vec::new();
        let mut seen: HashMap<Endpoint, usize> = HashMap::new();
        for (line, a, b, wc, w) in pending_edges {
            let pa = endpoint(line, a)?;
            let pb = endpoint(line, b)?;
            for (p, (c, _)) in [(pa, a), (pb, b)] {
                if let Some(prev) = seen.insert(p, line) {
                    return Err(err(line, c, format!("slot already used on line {prev}")));
                }
            }
            edges.push(Edge::new(pa, pb, parse_word(line, wc, &w, &surface)?));
        }
        let mut loops = Vec::new();
        for (line, wc, w) in pending_loops {
            loops.push(parse_word(line, wc, &w, &surface)?);
        }
        for (c, name) in names.iter().enumerate() {
            for k in 0..4u8 {
                if !seen.contains_key(&Endpoint::new(c, k)) {
                    return Err(err(text.lines().count().max(1), 1, format!("slot {name}.{k} is unmatched")));
                }
            }
        }
        Diagram::new(surface, names, edges, loops)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "surface {}", self.surface)?;
        for n in &self.names {
            writeln!(f, "crossing {n}")?;
        }
        let word = |w: &CurveWord| if w.is_empty() { String::new() } else { format!(" {w}") };
        for e in &self.edges {
            writeln!(
                f,
                "edge {}.{} {}.{} :{}",
                self.names[e.a.crossing], e.a.slot, self.names[e.b.crossing], e.b.slot,
                word(&e.word)
            )?;
        }
        for l in &self.loops {
            writeln!(f, "loop :{}", word(l))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "surface planar_holes 2   # comment\n\
        crossing x1\n\
        crossing x2\n\
        edge x1.0 x2.1 : a b'\n\
        edge x1.1 x2.0 :\n\
        edge x1.2 x2.3 : b\n\
        edge x1.3 x2.2 :\n\
        loop : a\n";

    #[test]
    fn round_trip() {
        let d: Diagram = TWO.parse().unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.loops().len(), 1);
        let text = d.to_string();
        let again: Diagram = text.parse().unwrap();
        assert_eq!(again, d);
        assert_eq!(again.to_string(), text);
    }

    #[test]
    fn parse_errors_carry_location() {
        let bad = TWO.replace("x2.3", "x2.7");
        match bad.parse::<Diagram>() {
            Err(DiagramError::Parse { line, column, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(column, 14);
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = TWO.replace("loop : a", "loop : c");
        assert!(matches!(bad.parse::<Diagram>(), Err(DiagramError::Parse { line: 8, .. })));
        let bad = TWO.replace("edge x1.3 x2.2 :\n", "");
        assert!(matches!(bad.parse::<Diagram>(), Err(DiagramError::Parse { .. })));
    }

    #[test]
    fn unsupported_surfaces() {
        for s in ["surface rp2\n", "surface orientable 1 0\n"] {
            let e = s.parse::<Diagram>().unwrap_err();
            assert!(e.to_string().starts_with("RP2 and closed surfaces unsupported"), "{e}");
        }
    }
}
