//! Expression grammars for coefficients, dual elements, operations and
//! `B mu_p` classes.
//!
//! ```text
//! coeff   := factor ('*' factor)*        factor := INT | 'tau' ['^' INT] | 'rho' ['^' INT]
//! element := term ('+' term)*            term   := (coeff '*')? mono
//! mono    := gen ['^' INT] (gen ['^' INT])*   gen := 't' INT | 'x' INT
//! ```
//!
//! Operation expressions extend the element grammar with the named classes
//! `Q INT`, `QE{i,j,...}`, `P INT`, `Sq INT`, `b`, `q INT` and `M INT`; a
//! juxtaposed run of `t`/`x` generators denotes a single Milnor basis
//! operation, while juxtaposition of named classes (or separate runs joined
//! by names) multiplies left-to-right, so `Q0 q2` is the composite "apply
//! `q2`, then `Q0`". `B mu_p` classes use the generators `u` and `v`.
//!
//! The parsers are deliberately liberal about `*` versus juxtaposition and
//! about factor order; canonical printing always round-trips.

use crate::bmu::BmuElement;
use crate::coeff::{BaseMode, Coeff};
use crate::dual::{Algebra, DualElement, Gen, Monomial, MAX_INDEX};
use crate::error::{Error, Result};
use crate::op::OpElement;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Word(String),
    Star,
    Caret,
    Plus,
    LBrace,
    RBrace,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {n}"),
            Tok::Word(w) => format!("'{w}'"),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Plus => "'+'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let offset = i;
        let tok = match c {
            '*' => {
                i += 1;
                Tok::Star
            }
            '^' => {
                i += 1;
                Tok::Caret
            }
            '+' => {
                i += 1;
                Tok::Plus
            }
            '{' => {
                i += 1;
                Tok::LBrace
            }
            '}' => {
                i += 1;
                Tok::RBrace
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n: u64 = text.parse().map_err(|_| Error::Parse {
                    offset,
                    found: format!("'{text}'"),
                    expected: vec!["integer".into()],
                })?;
                Tok::Int(n)
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                Tok::Word(src[start..i].to_string())
            }
            other => {
                return Err(Error::Parse {
                    offset,
                    found: format!("'{other}'"),
                    expected: vec!["term".into()],
                })
            }
        };
        out.push(Token { tok, offset });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            len: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.offset).unwrap_or(self.len)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            found: self
                .peek()
                .map(|t| t.describe())
                .unwrap_or_else(|| "end of input".into()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat_star(&mut self) {
        if matches!(self.peek(), Some(Tok::Star)) {
            self.pos += 1;
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<u64> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err(&[what]),
        }
    }

    /// Optional `^ INT` suffix; defaults to 1.
    fn exponent(&mut self) -> Result<u32> {
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            let n = self.expect_int("integer exponent")?;
            u32::try_from(n).map_err(|_| Error::Parse {
                offset: self.offset(),
                found: format!("{n}"),
                expected: vec!["exponent fitting in 32 bits".into()],
            })
        } else {
            Ok(1)
        }
    }

    fn index(&mut self, what: &str) -> Result<u8> {
        let n = self.expect_int(what)?;
        if n > MAX_INDEX as u64 {
            return Err(Error::Parse {
                offset: self.offset(),
                found: format!("{n}"),
                expected: vec![format!("generator index <= {MAX_INDEX}")],
            });
        }
        Ok(n as u8)
    }
}

/// One parsed multiplicand of a term.
enum Atom {
    Scalar(u64),
    Tau(u32),
    Rho(u32),
    DualGen(Gen, u32),
    BmuU(u32),
    BmuV(u32),
    Named(NamedOp),
}

enum NamedOp {
    Q(u8),
    QSet(Vec<u8>),
    P(u32),
    Sq(u32),
    Bockstein,
    QLower(u8),
    MClass(u8),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Coeff,
    Dual,
    Op,
    Bmu,
}

fn expected_for(kind: Kind) -> Vec<&'static str> {
    match kind {
        Kind::Coeff => vec!["integer", "tau", "rho"],
        Kind::Dual => vec!["integer", "tau", "rho", "t<i>", "x<i>"],
        Kind::Op => vec![
            "integer", "tau", "rho", "t<i>", "x<i>", "Q<i>", "QE{..}", "P<i>", "Sq<i>", "b",
            "q<i>", "M<k>",
        ],
        Kind::Bmu => vec!["integer", "tau", "rho", "u", "v"],
    }
}

fn parse_atom(p: &mut Parser, kind: Kind) -> Result<Atom> {
    match p.peek().cloned() {
        Some(Tok::Int(n)) => {
            p.pos += 1;
            Ok(Atom::Scalar(n))
        }
        Some(Tok::Word(w)) => {
            let word_offset = p.offset();
            p.pos += 1;
            match w.as_str() {
                "tau" => Ok(Atom::Tau(p.exponent()?)),
                "rho" => Ok(Atom::Rho(p.exponent()?)),
                "t" if kind == Kind::Dual || kind == Kind::Op => {
                    let i = p.index("tau generator index")?;
                    Ok(Atom::DualGen(Gen::Tau(i), p.exponent()?))
                }
                "x" if kind == Kind::Dual || kind == Kind::Op => {
                    let j = p.index("xi generator index")?;
                    Ok(Atom::DualGen(Gen::Xi(j), p.exponent()?))
                }
                "u" if kind == Kind::Bmu => Ok(Atom::BmuU(p.exponent()?)),
                "v" if kind == Kind::Bmu => Ok(Atom::BmuV(p.exponent()?)),
                "Q" if kind == Kind::Op => Ok(Atom::Named(NamedOp::Q(p.index("Q index")?))),
                "QE" if kind == Kind::Op => {
                    if !matches!(p.peek(), Some(Tok::LBrace)) {
                        return p.err(&["'{'"]);
                    }
                    p.pos += 1;
                    let mut indices = Vec::new();
                    loop {
                        indices.push(p.index("index")?);
                        match p.advance() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::RBrace) => break,
                            _ => return p.err(&["','", "'}'"]),
                        }
                    }
                    let mut sorted = indices.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != indices.len() {
                        return Err(Error::Parse {
                            offset: word_offset,
                            found: "repeated index in QE{..}".into(),
                            expected: vec!["distinct indices".into()],
                        });
                    }
                    Ok(Atom::Named(NamedOp::QSet(indices)))
                }
                "P" if kind == Kind::Op => {
                    let n = p.expect_int("P power")?;
                    Ok(Atom::Named(NamedOp::P(n as u32)))
                }
                "Sq" if kind == Kind::Op => {
                    let n = p.expect_int("Sq power")?;
                    Ok(Atom::Named(NamedOp::Sq(n as u32)))
                }
                "b" if kind == Kind::Op => Ok(Atom::Named(NamedOp::Bockstein)),
                "q" if kind == Kind::Op => {
                    Ok(Atom::Named(NamedOp::QLower(p.index("q index")?)))
                }
                "M" if kind == Kind::Op => {
                    Ok(Atom::Named(NamedOp::MClass(p.index("M index")?)))
                }
                _ => Err(Error::Parse {
                    offset: word_offset,
                    found: format!("'{w}'"),
                    expected: expected_for(kind).into_iter().map(String::from).collect(),
                }),
            }
        }
        _ => p.err(&expected_for(kind)),
    }
}

fn parse_term_atoms(p: &mut Parser, kind: Kind) -> Result<Vec<Atom>> {
    let mut atoms = Vec::new();
    loop {
        atoms.push(parse_atom(p, kind)?);
        match p.peek() {
            Some(Tok::Star) => {
                p.eat_star();
                continue;
            }
            Some(Tok::Plus) | None => break,
            // juxtaposition
            Some(Tok::Int(_)) | Some(Tok::Word(_)) => continue,
            _ => return p.err(&["'*'", "'+'", "end of input"]),
        }
    }
    Ok(atoms)
}

fn coeff_of_atoms(
    atoms: &[Atom],
    prime: u32,
    mode: BaseMode,
) -> Coeff {
    let mut c = Coeff::one(prime, mode);
    for a in atoms {
        match a {
            Atom::Scalar(n) => c = c.scale(*n),
            Atom::Tau(e) => c = c.mul_unchecked(&Coeff::monomial(1, *e, 0, prime, mode)),
            Atom::Rho(e) => c = c.mul_unchecked(&Coeff::monomial(1, 0, *e, prime, mode)),
            _ => {}
        }
    }
    c
}

/// Parse a bare coefficient.
pub fn parse_coeff(src: &str, prime: u32, mode: BaseMode) -> Result<Coeff> {
    let mut p = Parser::new(src)?;
    let mut out = Coeff::zero(prime, mode);
    loop {
        let atoms = parse_term_atoms(&mut p, Kind::Coeff)?;
        out.add_assign(&coeff_of_atoms(&atoms, prime, mode));
        match p.advance() {
            Some(Tok::Plus) => continue,
            None => break,
            _ => unreachable!("term parser stops at '+' or EOF"),
        }
    }
    Ok(out)
}

/// Parse an element of the dual algebra; raw generator powers are put in
/// normal form on construction.
pub fn parse_dual(src: &str, alg: &Algebra) -> Result<DualElement> {
    let mut p = Parser::new(src)?;
    let mut out = DualElement::zero(alg.prime(), alg.mode());
    loop {
        let atoms = parse_term_atoms(&mut p, Kind::Dual)?;
        let c = coeff_of_atoms(&atoms, alg.prime(), alg.mode());
        let factors: Vec<(Gen, u32)> = atoms
            .iter()
            .filter_map(|a| match a {
                Atom::DualGen(g, e) => Some((*g, *e)),
                _ => None,
            })
            .collect();
        out.add_assign(&alg.dual_from_factors(&factors, &c));
        match p.advance() {
            Some(Tok::Plus) => continue,
            None => break,
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// Parse an operation expression; juxtaposed factors compose left-to-right.
pub fn parse_op(src: &str, alg: &Algebra) -> Result<OpElement> {
    let mut p = Parser::new(src)?;
    let mut out = OpElement::zero(alg.prime(), alg.mode());
    loop {
        let term_offset = p.offset();
        let atoms = parse_term_atoms(&mut p, Kind::Op)?;
        let c = coeff_of_atoms(&atoms, alg.prime(), alg.mode());
        // group consecutive generators into single basis operations,
        // multiply across named classes and separate runs
        let mut factors: Vec<OpElement> = Vec::new();
        let mut run: Option<(Vec<u8>, Vec<(u8, u32)>)> = None;
        let flush = |run: &mut Option<(Vec<u8>, Vec<(u8, u32)>)>,
                     factors: &mut Vec<OpElement>|
         -> Result<()> {
            if let Some((taus, xis)) = run.take() {
                let mut sorted_taus = taus.clone();
                sorted_taus.sort_unstable();
                sorted_taus.dedup();
                if sorted_taus.len() != taus.len() {
                    return Err(Error::Parse {
                        offset: term_offset,
                        found: "squared tau in a basis operation".into(),
                        expected: vec!["square-free tau part".into()],
                    });
                }
                let mut xi_map: std::collections::BTreeMap<u8, u32> = Default::default();
                for (j, r) in xis {
                    *xi_map.entry(j).or_insert(0) += r;
                }
                let xi_vec: Vec<(u8, u32)> = xi_map.into_iter().collect();
                let m = Monomial::from_parts(&sorted_taus, &xi_vec);
                factors.push(OpElement::basis(m, alg.prime(), alg.mode()));
            }
            Ok(())
        };
        for a in &atoms {
            match a {
                Atom::DualGen(Gen::Tau(i), e) => {
                    let entry = run.get_or_insert_with(|| (Vec::new(), Vec::new()));
                    for _ in 0..*e {
                        entry.0.push(*i);
                    }
                }
                Atom::DualGen(Gen::Xi(j), e) => {
                    if *j > 0 && *e > 0 {
                        let entry = run.get_or_insert_with(|| (Vec::new(), Vec::new()));
                        entry.1.push((*j, *e));
                    }
                }
                Atom::Named(named) => {
                    flush(&mut run, &mut factors)?;
                    let el = match named {
                        NamedOp::Q(i) => alg.milnor_primitive(*i),
                        NamedOp::QSet(set) => alg.q_class(set),
                        NamedOp::P(n) => alg.p_power(*n),
                        NamedOp::Sq(n) => alg.sq(*n)?,
                        NamedOp::Bockstein => alg.bockstein(),
                        NamedOp::QLower(t) => alg.q_lower(*t),
                        NamedOp::MClass(k) => alg.m_class(*k)?,
                    };
                    factors.push(el);
                }
                _ => {}
            }
        }
        flush(&mut run, &mut factors)?;
        let mut term = OpElement::unit(alg.prime(), alg.mode());
        for f in &factors {
            term = alg.op_mul(&term, f)?;
        }
        out.add_assign(&term.scale(&c));
        match p.advance() {
            Some(Tok::Plus) => continue,
            None => break,
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// Parse a `B mu_p` class; `u`-powers reduce on construction.
pub fn parse_bmu(src: &str, alg: &Algebra, trunc: u32) -> Result<BmuElement> {
    let mut p = Parser::new(src)?;
    let mut out = BmuElement::zero(alg.prime(), alg.mode(), trunc);
    loop {
        let atoms = parse_term_atoms(&mut p, Kind::Bmu)?;
        let c = coeff_of_atoms(&atoms, alg.prime(), alg.mode());
        let mut u_exp = 0u32;
        let mut v_exp = 0u32;
        for a in &atoms {
            match a {
                Atom::BmuU(e) => u_exp += e,
                Atom::BmuV(e) => v_exp += e,
                _ => {}
            }
        }
        out.add_assign(&alg.bmu_monomial(u_exp, v_exp, &c, trunc)?);
        match p.advance() {
            Some(Tok::Plus) => continue,
            None => break,
            _ => unreachable!(),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Bidegree;

    fn alg(p: u32) -> Algebra {
        Algebra::new(p, BaseMode::Generic).unwrap()
    }

    #[test]
    fn coeff_roundtrip() {
        let c = parse_coeff("3*tau^2*rho", 5, BaseMode::Generic).unwrap();
        assert_eq!(c.to_string(), "3*tau^2*rho");
        let c = parse_coeff("1 + 2*rho + tau", 5, BaseMode::Generic).unwrap();
        assert_eq!(c.to_string(), "1 + tau + 2*rho");
    }

    #[test]
    fn dual_element_roundtrip() {
        let a = alg(2);
        let e = parse_dual("rho^2*t0 x1^3", &a).unwrap();
        assert_eq!(e.to_string(), "rho^2*t0 x1^3");
        // squared tau normalizes on construction
        let e = parse_dual("t0^2", &a).unwrap();
        assert_eq!(e.to_string(), "tau*x1 + rho*t1 + rho*t0 x1");
    }

    #[test]
    fn op_juxtaposition_is_composition() {
        let a = alg(2);
        let e = parse_op("Q0 q2", &a).unwrap();
        let want = a.op_mul(&a.bockstein(), &a.q_lower(2)).unwrap();
        assert_eq!(e, want);
        // a run of generators is a single basis element, not a product
        let e = parse_op("t0 x1", &a).unwrap();
        assert_eq!(e, crate::op::OpElement::basis(
            Monomial::from_parts(&[0], &[(1, 1)]),
            2,
            BaseMode::Generic,
        ));
    }

    #[test]
    fn bmu_u_squared_reduces() {
        let a = alg(2);
        let e = parse_bmu("u^2", &a, 8).unwrap();
        assert_eq!(e.to_string(), "rho*u + tau*v");
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let a = alg(2);
        match parse_dual("t0 + ?", &a) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_dual("t0 *", &a) {
            Err(Error::Parse { offset, expected, .. }) => {
                assert_eq!(offset, 4);
                assert!(!expected.is_empty());
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_op("Q", &a) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bidegree_of_parsed_op() {
        let a = alg(2);
        let q2 = parse_op("Q2", &a).unwrap();
        assert_eq!(
            q2.bidegree(),
            crate::coeff::Homogeneity::Homogeneous(Bidegree::new(7, 3))
        );
    }
}
