//! The classification table of irreducible ncc symmetric Lie algebras as
//! data, with a small integer expression language for the parametric
//! columns (`r`, `s`, `dim g_1`, realization sizes).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{NccError, Result};
use crate::lie::{build_algebra, Algebra, AlgebraSpec};

const EMBEDDED: &str = include_str!("../data/atlas.json");

/// Parameters are enumerated from their minimum up to this many extra
/// values when checking row invariants.
const VALIDATION_SPAN: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeTag {
    Complex,
    Cayley,
    Split,
    Nonsplit,
}

impl TypeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeTag::Complex => "complex",
            TypeTag::Cayley => "cayley",
            TypeTag::Split => "split",
            TypeTag::Nonsplit => "nonsplit",
        }
    }

    /// `r / s` for this type.
    pub fn rank_ratio(self) -> i64 {
        match self {
            TypeTag::Complex | TypeTag::Nonsplit => 2,
            TypeTag::Cayley | TypeTag::Split => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Param {
    pub name: String,
    pub min: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Realization {
    pub family: String,
    pub params: Vec<String>,
    /// Euler label with `{var}` placeholders, e.g. `h{j}`.
    pub euler: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasRow {
    pub id: String,
    pub g_name: String,
    pub gc_name: String,
    pub h_name: String,
    pub g1_name: String,
    pub type_tag: TypeTag,
    pub root_system: String,
    pub euler_labels: Vec<String>,
    pub params: Vec<Param>,
    pub constraints: Vec<String>,
    pub r: String,
    pub s: String,
    pub g1_dim: String,
    pub realization: Option<Realization>,
}

pub type Bindings = BTreeMap<String, i64>;

/// Evaluated columns of a row at one parameter assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowValues {
    pub r: i64,
    pub s: i64,
    pub g1_dim: i64,
}

impl AtlasRow {
    fn invalid(&self, msg: impl Into<String>) -> NccError {
        NccError::Validation { row: self.id.clone(), msg: msg.into() }
    }

    /// Whether `bindings` covers every parameter, respects the minima and
    /// satisfies the constraints.
    pub fn admits(&self, bindings: &Bindings) -> Result<bool> {
        for p in &self.params {
            match bindings.get(&p.name) {
                Some(&v) if v >= p.min => {}
                Some(_) => return Ok(false),
                None => return Err(self.invalid(format!("missing parameter `{}`", p.name))),
            }
        }
        for c in &self.constraints {
            if !eval_constraint(c, bindings)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn values(&self, bindings: &Bindings) -> Result<RowValues> {
        if !self.admits(bindings)? {
            return Err(self.invalid(format!("parameters {bindings:?} are outside the row's range")));
        }
        Ok(RowValues {
            r: eval(&self.r, bindings)?,
            s: eval(&self.s, bindings)?,
            g1_dim: eval(&self.g1_dim, bindings)?,
        })
    }

    /// All admissible assignments with every parameter in
    /// `[min, min + VALIDATION_SPAN)`.
    pub fn sample_bindings(&self) -> Result<Vec<Bindings>> {
        let mut out = vec![Bindings::new()];
        for p in &self.params {
            out = out
                .into_iter()
                .flat_map(|b| {
                    (p.min..p.min + VALIDATION_SPAN).map(move |v| {
                        let mut b = b.clone();
                        b.insert(p.name.clone(), v);
                        b
                    })
                })
                .collect();
        }
        let mut kept = Vec::new();
        for b in out {
            if self.admits(&b)? {
                kept.push(b);
            }
        }
        Ok(kept)
    }

    fn validate(&self) -> Result<()> {
        let samples = self.sample_bindings()?;
        if samples.is_empty() {
            return Err(self.invalid("no admissible parameter values"));
        }
        for b in &samples {
            let v = self.values(b)?;
            if v.s < 1 || v.g1_dim < 1 {
                return Err(self.invalid(format!("non-positive rank or dimension at {b:?}")));
            }
            if v.r != self.type_tag.rank_ratio() * v.s {
                return Err(self.invalid(format!(
                    "{} rows need r = {}s, got r = {}, s = {} at {b:?}",
                    self.type_tag.as_str(),
                    self.type_tag.rank_ratio(),
                    v.r,
                    v.s
                )));
            }
        }
        Ok(())
    }
}

/// Parses and validates atlas JSON text.
pub fn parse_atlas(text: &str) -> Result<Vec<AtlasRow>> {
    let rows: Vec<AtlasRow> =
        serde_json::from_str(text).map_err(|e| NccError::Load(format!("atlas data: {e}")))?;
    for row in &rows {
        row.validate()?;
    }
    Ok(rows)
}

/// The embedded table.
pub fn load_atlas() -> Result<Vec<AtlasRow>> {
    parse_atlas(EMBEDDED)
}

pub fn embedded_source() -> &'static str {
    EMBEDDED
}

/// Rows whose id, name, type tag or root system equals `query`
/// (ASCII case-insensitive).
pub fn lookup<'a>(rows: &'a [AtlasRow], query: &str) -> Vec<&'a AtlasRow> {
    let q = query.trim();
    rows.iter()
        .filter(|r| {
            [r.id.as_str(), r.g_name.as_str(), r.type_tag.as_str(), r.root_system.as_str()]
                .iter()
                .any(|f| f.eq_ignore_ascii_case(q))
        })
        .collect()
}

/// The matrix realization of `row` at `bindings`, if the row has one.
pub fn realizable(row: &AtlasRow, bindings: &Bindings) -> Result<Option<(Algebra, String)>> {
    let Some(real) = &row.realization else {
        return Ok(None);
    };
    if !row.admits(bindings)? {
        return Err(row.invalid(format!("parameters {bindings:?} are outside the row's range")));
    }
    let sizes = real
        .params
        .iter()
        .map(|e| eval(e, bindings))
        .collect::<Result<Vec<_>>>()?;
    let text = format!(
        "{}:{}",
        real.family,
        sizes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    );
    let spec: AlgebraSpec = text.parse()?;
    let alg = build_algebra(spec.family, &spec.params)?;
    let mut label = real.euler.clone();
    for (k, v) in bindings {
        label = label.replace(&format!("{{{k}}}"), &v.to_string());
    }
    Ok(Some((alg, label)))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(i64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| NccError::Parse(format!("integer `{s}` overflows")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/(),".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(NccError::Parse(format!("unexpected `{c}` in `{src}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a Bindings,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> NccError {
        NccError::Parse(format!("{msg} in `{}`", self.src))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<i64> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v = v.checked_add(self.term()?).ok_or_else(|| self.err("overflow"))?;
            } else if self.eat('-') {
                v = v.checked_sub(self.term()?).ok_or_else(|| self.err("overflow"))?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<i64> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v = v.checked_mul(self.unary()?).ok_or_else(|| self.err("overflow"))?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d == 0 {
                    return Err(self.err("division by zero"));
                }
                v = v.div_euclid(d);
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<i64> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<i64> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("missing `)`"));
                }
                Ok(v)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if name == "min" || name == "max" {
                    if !self.eat('(') {
                        return Err(self.err("expected `(` after function name"));
                    }
                    let a = self.expr()?;
                    if !self.eat(',') {
                        return Err(self.err("expected `,`"));
                    }
                    let b = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.err("missing `)`"));
                    }
                    Ok(if name == "min" { a.min(b) } else { a.max(b) })
                } else {
                    self.vars
                        .get(&name)
                        .copied()
                        .ok_or_else(|| self.err(&format!("unbound variable `{name}`")))
                }
            }
            _ => Err(self.err("expected a value")),
        }
    }
}

/// Evaluates an integer expression: literals, variables, `+ - * /`
/// (floor division), parentheses, `min(a, b)` and `max(a, b)`.
pub fn eval(src: &str, vars: &Bindings) -> Result<i64> {
    let mut p = Parser { tokens: tokenize(src)?, pos: 0, vars, src };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Evaluates `lhs OP rhs` with `OP` one of `<=`, `>=`, `==`, `<`, `>`.
pub fn eval_constraint(src: &str, vars: &Bindings) -> Result<bool> {
    for op in ["<=", ">=", "==", "<", ">"] {
        if let Some((l, r)) = src.split_once(op) {
            let (a, b) = (eval(l, vars)?, eval(r, vars)?);
            return Ok(match op {
                "<=" => a <= b,
                ">=" => a >= b,
                "==" => a == b,
                "<" => a < b,
                _ => a > b,
            });
        }
    }
    Err(NccError::Parse(format!("constraint `{src}` has no comparison")))
}

pub fn bindings(pairs: &[(&str, i64)]) -> Bindings {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::{check_euler, euler_element, grading_projectors};

    #[test]
    fn interpreter() {
        let b = bindings(&[("n", 7), ("j", 3)]);
        assert_eq!(eval("j*(n-j)", &b).unwrap(), 12);
        assert_eq!(eval("2*min(j, n-j)", &b).unwrap(), 6);
        assert_eq!(eval("n/2", &b).unwrap(), 3);
        assert_eq!(eval("max(1, -j) + 4", &b).unwrap(), 5);
        assert!(eval_constraint("2*j <= n", &b).unwrap());
        assert!(!eval_constraint("j > n", &b).unwrap());
        assert!(matches!(eval("k + 1", &b), Err(NccError::Parse(_))));
        assert!(matches!(eval("(n", &b), Err(NccError::Parse(_))));
        assert!(matches!(eval("n / (j - 3)", &b), Err(NccError::Parse(_))));
        assert!(matches!(eval("n $ 2", &b), Err(NccError::Parse(_))));
    }

    #[test]
    fn loads_twenty_rows() {
        let rows = load_atlas().unwrap();
        assert_eq!(rows.len(), 20);
        let count = |t: TypeTag| rows.iter().filter(|r| r.type_tag == t).count();
        assert_eq!(
            [count(TypeTag::Complex), count(TypeTag::Cayley), count(TypeTag::Split), count(TypeTag::Nonsplit)],
            [6, 5, 5, 4]
        );
    }

    #[test]
    fn row_examples() {
        let rows = load_atlas().unwrap();
        let sl = lookup(&rows, "sl_n(R)")[0];
        let v = sl.values(&bindings(&[("n", 5), ("j", 3)])).unwrap();
        assert_eq!((v.r, v.s, v.g1_dim), (2, 2, 6));
        assert_eq!(sl.g1_name, "M_{j,n-j}(R)");
        let so = lookup(&rows, "so_{1,d+1}(R)")[0];
        let v = so.values(&bindings(&[("d", 4)])).unwrap();
        assert_eq!((v.r, v.s, so.type_tag, so.root_system.as_str()), (2, 1, TypeTag::Nonsplit, "A_1"));
        let sp = lookup(&rows, "sp_2r(R)")[0];
        assert_eq!(sp.type_tag, TypeTag::Cayley);
        assert_eq!(sp.g1_name, "Sym_r(R)");
    }

    #[test]
    fn lookups() {
        let rows = load_atlas().unwrap();
        assert_eq!(lookup(&rows, "cayley").len(), 5);
        let e7 = lookup(&rows, "e7(C)");
        assert_eq!(e7.len(), 1);
        assert_eq!(e7[0].g1_name, "Herm_3(O)_C");
        assert!(lookup(&rows, "nonexistent").is_empty());
        assert_eq!(lookup(&rows, "A_1").len(), 1);
    }

    #[test]
    fn bad_data_is_rejected() {
        assert!(matches!(parse_atlas("[{"), Err(NccError::Load(_))));
        let mut rows: Vec<serde_json::Value> = serde_json::from_str(embedded_source()).unwrap();
        rows[0]["s"] = serde_json::json!("j + 1");
        let text = serde_json::to_string(&rows).unwrap();
        match parse_atlas(&text) {
            Err(NccError::Validation { row, .. }) => assert_eq!(row, "complex-sl"),
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn realizations() {
        let rows = load_atlas().unwrap();
        let sl = lookup(&rows, "sl_n(R)")[0];
        let (alg, label) = realizable(sl, &bindings(&[("n", 3), ("j", 1)])).unwrap().unwrap();
        assert_eq!((alg.dim(), label.as_str()), (8, "h1"));
        assert!(realizable(lookup(&rows, "e6(C)")[0], &Bindings::new()).unwrap().is_none());
        let pq = lookup(&rows, "so_{p+1,q+1}(R)")[0];
        let (alg, _) = realizable(pq, &bindings(&[("p", 1), ("q", 1)])).unwrap().unwrap();
        assert_eq!(alg.dim(), 6);
    }

    #[test]
    fn small_realizations_have_euler_elements() {
        let rows = load_atlas().unwrap();
        let cases: &[(&str, &[(&str, i64)])] = &[
            ("split-sl", &[("n", 2), ("j", 1)]),
            ("split-sl", &[("n", 3), ("j", 1)]),
            ("split-sl", &[("n", 4), ("j", 2)]),
            ("nonsplit-so", &[("d", 1)]),
            ("nonsplit-so", &[("d", 2)]),
            ("split-so-pq", &[("p", 1), ("q", 1)]),
            ("cayley-sp", &[("r", 2)]),
            ("split-so-nn", &[("n", 2)]),
        ];
        for (id, b) in cases {
            let row = lookup(&rows, id)[0];
            let b = bindings(b);
            let (alg, label) = realizable(row, &b).unwrap().unwrap();
            let h = euler_element(&alg, &label).unwrap();
            assert!(check_euler(&h, &alg.tol), "{id} {b:?}");
            let dims = grading_projectors(&h).unwrap();
            assert_eq!(dims.plus.dim() as i64, row.values(&b).unwrap().g1_dim, "{id} {b:?}");
        }
    }
}
