//! Text form for potentials: variable declarations plus a series of cyclic
//! words, with a deterministic pretty-printer.
//!
//! ```text
//! var alpha : deg 1 dual beta;
//! var beta : deg -1 dual alpha;
//! var x1 : deg 0 dual xi1;
//! var xi1 : deg 0 dual x1;
//! cyc(alpha*alpha*beta) + cyc(alpha*x1*xi1) - cyc(alpha*xi1*x1)
//! ```
//!
//! Declarations may carry endpoints (`@ v1 -> v2`) for multi-vertex
//! alphabets; rationals are `p/q` with an optional sign, never decimals.
//! Unicode letters are accepted on input only (`α` for `alpha`, `β` for
//! `beta`, `ξ` for `xi`); output is pure ASCII.

use num_bigint::BigInt;
use num_traits::One;

use crate::words::{GradedVariable, VarKind};
use crate::{Alphabet, CyclicSeries, EngineError, Result, Scalar, Word};

/// A parsed document: the declared alphabet and the series in it.
#[derive(Clone, Debug)]
pub struct PotentialDoc {
    pub alphabet: Alphabet,
    pub series: CyclicSeries,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Int(BigInt),
    Punct(char),
    Arrow,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn err(line: usize, col: usize, message: impl Into<String>) -> EngineError {
    EngineError::Parse {
        line,
        col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Lexer> {
    // unicode aliases are expanded before tokenization
    let text: String = text
        .chars()
        .flat_map(|c| match c {
            'α' => "alpha".chars().collect::<Vec<_>>(),
            'β' => "beta".chars().collect(),
            'ξ' => "xi".chars().collect(),
            other => vec![other],
        })
        .collect();
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                name.push(chars[i]);
                i += 1;
                col += 1;
            }
            toks.push((Tok::Name(name), start.0, start.1));
            continue;
        }
        if c.is_ascii_digit() {
            let mut num = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                num.push(chars[i]);
                i += 1;
                col += 1;
            }
            toks.push((Tok::Int(num.parse().unwrap()), start.0, start.1));
            continue;
        }
        if c == '-' && i + 1 < chars.len() && chars[i + 1] == '>' {
            toks.push((Tok::Arrow, line, col));
            i += 2;
            col += 2;
            continue;
        }
        if "():;*/+-@".contains(c) {
            toks.push((Tok::Punct(c), line, col));
            i += 1;
            col += 1;
            continue;
        }
        return Err(err(line, col, format!("unexpected character {c:?}")));
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: (line, col),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_punct(&mut self, c: char) -> Result<()> {
        let (l, co) = self.here();
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            other => Err(err(l, co, format!("expected {c:?}, found {other:?}"))),
        }
    }

    fn expect_name(&mut self) -> Result<String> {
        let (l, c) = self.here();
        match self.next() {
            Some(Tok::Name(n)) => Ok(n),
            other => Err(err(l, c, format!("expected a name, found {other:?}"))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        let (l, c) = self.here();
        let n = self.expect_name()?;
        if n == kw {
            Ok(())
        } else {
            Err(err(l, c, format!("expected {kw:?}, found {n:?}")))
        }
    }

    fn expect_int(&mut self) -> Result<BigInt> {
        let (l, c) = self.here();
        let neg = matches!(self.peek(), Some(Tok::Punct('-')));
        if neg {
            self.next();
        }
        match self.next() {
            Some(Tok::Int(v)) => Ok(if neg { -v } else { v }),
            other => Err(err(l, c, format!("expected an integer, found {other:?}"))),
        }
    }
}

struct Decl {
    name: String,
    deg: i64,
    src: Option<String>,
    dst: Option<String>,
    dual: Option<String>,
    line: usize,
    col: usize,
}

/// Parses a potential document. Parsing is total: every input yields a doc
/// or a positioned diagnostic.
pub fn parse_potential(text: &str) -> Result<PotentialDoc> {
    let mut lx = lex(text)?;
    let mut decls: Vec<Decl> = Vec::new();
    while matches!(lx.peek(), Some(Tok::Name(n)) if n == "var") {
        let (line, col) = lx.here();
        lx.next();
        let name = lx.expect_name()?;
        lx.expect_punct(':')?;
        lx.expect_keyword("deg")?;
        let deg_big = lx.expect_int()?;
        let deg: i64 = deg_big
            .try_into()
            .map_err(|_| err(line, col, "degree out of range"))?;
        let mut src = None;
        let mut dst = None;
        if matches!(lx.peek(), Some(Tok::Punct('@'))) {
            lx.next();
            src = Some(lx.expect_name()?);
            let (l, c) = lx.here();
            match lx.next() {
                Some(Tok::Arrow) => {}
                other => return Err(err(l, c, format!("expected '->', found {other:?}"))),
            }
            dst = Some(lx.expect_name()?);
        }
        let mut dual = None;
        if matches!(lx.peek(), Some(Tok::Name(n)) if n == "dual") {
            lx.next();
            dual = Some(lx.expect_name()?);
        }
        lx.expect_punct(';')?;
        decls.push(Decl {
            name,
            deg,
            src,
            dst,
            dual,
            line,
            col,
        });
    }

    // collect vertices in order of first mention
    let mut vertices: Vec<String> = Vec::new();
    let vertex_id = |name: &str, vertices: &mut Vec<String>| -> usize {
        if let Some(i) = vertices.iter().position(|v| v == name) {
            i
        } else {
            vertices.push(name.to_string());
            vertices.len() - 1
        }
    };
    struct Resolved {
        src: usize,
        dst: usize,
    }
    let mut resolved = Vec::new();
    for d in &decls {
        let src = vertex_id(d.src.as_deref().unwrap_or("v"), &mut vertices);
        let dst = vertex_id(d.dst.as_deref().unwrap_or("v"), &mut vertices);
        resolved.push(Resolved { src, dst });
    }

    let mut alphabet = Alphabet::new(vertices);
    for (d, r) in decls.iter().zip(&resolved) {
        let kind = match d.deg {
            1 => VarKind::Alpha,
            -1 => VarKind::Beta,
            _ => VarKind::Arrow,
        };
        alphabet
            .add_var(GradedVariable {
                name: d.name.clone(),
                coh_deg: d.deg,
                source: r.src,
                target: r.dst,
                kind,
                dual: None,
                pair_leader: false,
            })
            .map_err(|e| err(d.line, d.col, e.to_string()))?;
    }
    // duals must be declared symmetrically
    for d in &decls {
        if let Some(partner) = &d.dual {
            let a = alphabet
                .lookup(&d.name)
                .map_err(|e| err(d.line, d.col, e.to_string()))?;
            let b = alphabet
                .lookup(partner)
                .map_err(|_| err(d.line, d.col, format!("dual {partner} is not declared")))?;
            let back = decls
                .iter()
                .find(|o| &o.name == partner)
                .and_then(|o| o.dual.as_ref());
            if back != Some(&d.name) {
                return Err(err(
                    d.line,
                    d.col,
                    format!("dual of {} is {partner}, but {partner} does not declare {} back", d.name, d.name),
                ));
            }
            alphabet.set_dual(a, b);
        }
    }
    // pair leaders in declaration order
    let ids: Vec<crate::VarId> = alphabet.ids().collect();
    for &id in &ids {
        if let Some(d) = alphabet.var(id).dual {
            if id < d {
                alphabet.set_pair_leader(id);
            }
        }
    }

    // series
    let mut series = CyclicSeries::zero();
    let mut first = true;
    loop {
        if lx.peek().is_none() {
            if first {
                break; // empty series is the zero potential
            }
            break;
        }
        // a lone "0" denotes the empty series
        if first
            && lx.pos + 1 == lx.toks.len()
            && matches!(lx.peek(), Some(Tok::Int(z)) if *z == BigInt::from(0))
        {
            lx.next();
            break;
        }
        let (l, c) = lx.here();
        let mut negative = false;
        match lx.peek() {
            Some(Tok::Punct('+')) => {
                lx.next();
            }
            Some(Tok::Punct('-')) => {
                negative = true;
                lx.next();
            }
            _ => {
                if !first {
                    return Err(err(l, c, "expected '+' or '-' between terms"));
                }
            }
        }
        let mut coeff = Scalar::one();
        if let Some(Tok::Int(_)) = lx.peek() {
            let numer = match lx.next() {
                Some(Tok::Int(v)) => v,
                _ => unreachable!(),
            };
            let denom = if matches!(lx.peek(), Some(Tok::Punct('/'))) {
                lx.next();
                let (l2, c2) = lx.here();
                match lx.next() {
                    Some(Tok::Int(v)) if v != BigInt::from(0) => v,
                    Some(Tok::Int(_)) => return Err(err(l2, c2, "zero denominator")),
                    other => {
                        return Err(err(l2, c2, format!("expected a denominator, found {other:?}")))
                    }
                }
            } else {
                BigInt::one()
            };
            coeff = Scalar::new(numer, denom);
            lx.expect_punct('*')?;
        }
        if negative {
            coeff = -coeff;
        }
        let (lc, cc) = lx.here();
        lx.expect_keyword("cyc")?;
        lx.expect_punct('(')?;
        let mut letters = Vec::new();
        if !matches!(lx.peek(), Some(Tok::Punct(')'))) {
            loop {
                let (ln, cn) = lx.here();
                let name = lx.expect_name()?;
                let id = alphabet
                    .lookup(&name)
                    .map_err(|_| err(ln, cn, format!("unknown letter {name}")))?;
                letters.push(id);
                if matches!(lx.peek(), Some(Tok::Punct('*'))) {
                    lx.next();
                } else {
                    break;
                }
            }
        }
        lx.expect_punct(')')?;
        let word = Word::new(letters);
        series
            .add_word(&alphabet, &word, &coeff)
            .map_err(|e| err(lc, cc, e.to_string()))?;
        first = false;
    }

    Ok(PotentialDoc { alphabet, series })
}

/// Deterministic text form; `parse(print(doc))` reproduces the document.
pub fn print_potential(doc: &PotentialDoc) -> String {
    let mut out = String::new();
    let multi = doc.alphabet.vertices.len() > 1;
    for id in doc.alphabet.ids() {
        let v = doc.alphabet.var(id);
        out.push_str(&format!("var {} : deg {}", v.name, v.coh_deg));
        if multi {
            out.push_str(&format!(
                " @ {} -> {}",
                doc.alphabet.vertices[v.source], doc.alphabet.vertices[v.target]
            ));
        }
        if let Some(d) = v.dual {
            out.push_str(&format!(" dual {}", doc.alphabet.var(d).name));
        }
        out.push_str(";\n");
    }
    out.push_str(&doc.series.display(&doc.alphabet));
    out.push('\n');
    out
}

/// Renders an alphabet and series as a document.
pub fn doc_of(alphabet: &Alphabet, series: &CyclicSeries) -> PotentialDoc {
    PotentialDoc {
        alphabet: alphabet.clone(),
        series: series.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{canonical_potential, one_vertex_quiver, shifted_alphabet};

    const WCAN1: &str = "\
var alpha : deg 1 dual beta;
var beta : deg -1 dual alpha;
var x1 : deg 0 dual xi1;
var xi1 : deg 0 dual x1;
cyc(alpha*alpha*beta) + cyc(alpha*x1*xi1) - cyc(alpha*xi1*x1)
";

    #[test]
    fn parses_wcan() {
        let doc = parse_potential(WCAN1).unwrap();
        assert_eq!(doc.series.num_terms(), 3);
        assert_eq!(doc.series.degrees(&doc.alphabet), vec![(1, 3, 2)]);
        let q = one_vertex_quiver(1).unwrap();
        let a = shifted_alphabet(&q).unwrap();
        let w = canonical_potential(&q).unwrap();
        assert_eq!(doc.series.display(&doc.alphabet), w.display(&a));
    }

    #[test]
    fn undeclared_letter_diagnostic() {
        let text = "var a : deg 0 dual a2;\nvar a2 : deg 0 dual a;\ncyc(a*b)\n";
        match parse_potential(text) {
            Err(EngineError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("unknown letter b"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_dual_rejected() {
        let text = "var a : deg 0 dual b;\nvar b : deg 0;\ncyc(a*b)\n";
        assert!(parse_potential(text).is_err());
    }

    #[test]
    fn round_trip_print_parse() {
        let doc = parse_potential(WCAN1).unwrap();
        let printed = print_potential(&doc);
        let doc2 = parse_potential(&printed).unwrap();
        assert_eq!(print_potential(&doc2), printed);
        assert_eq!(doc2.series.display(&doc2.alphabet), doc.series.display(&doc.alphabet));
    }

    #[test]
    fn unicode_aliases_accepted() {
        let text = "\
var alpha : deg 1 dual beta;
var beta : deg -1 dual alpha;
var x1 : deg 0 dual xi1;
var xi1 : deg 0 dual x1;
cyc(α*α*β) + cyc(α*x1*ξ1) - cyc(α*ξ1*x1)
";
        let doc = parse_potential(text).unwrap();
        assert_eq!(doc.series.num_terms(), 3);
    }

    #[test]
    fn rational_coefficients() {
        let text = "var x : deg 0 dual y;\nvar y : deg 0 dual x;\n2/3 * cyc(x*y) - 1/6 * cyc(x*y)\n";
        let doc = parse_potential(text).unwrap();
        let x = doc.alphabet.lookup("x").unwrap();
        let y = doc.alphabet.lookup("y").unwrap();
        assert_eq!(
            doc.series.coeff(&Word::new(vec![x, y])),
            Scalar::new(1.into(), 2.into())
        );
    }

    #[test]
    fn parser_never_panics_on_noise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..2000 {
            let len = rng.random_range(0..120usize);
            let bytes: Vec<u8> = (0..len).map(|_| rng.random_range(0..=255u8)).collect();
            let text = String::from_utf8_lossy(&bytes).to_string();
            let _ = parse_potential(&text);
        }
    }
}
