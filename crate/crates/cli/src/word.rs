//! Group words `gen:t,gen:t,...` read as `exp(t_1 X_1) exp(t_2 X_2) ...`.

use ncc_core::lie::{Algebra, AlgebraElement, Family, GroupElement};
use ncc_core::numerics::Matrix;
use ncc_core::{NccError, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Letter {
    pub generator: String,
    pub t: f64,
}

pub fn parse_word(src: &str) -> Result<Vec<Letter>> {
    let src = src.trim();
    if src.is_empty() {
        return Ok(Vec::new());
    }
    src.split(',')
        .map(|part| {
            let (g, t) = part
                .split_once(':')
                .ok_or_else(|| NccError::Parse(format!("word letter `{part}` must look like `z:0.5`")))?;
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|_| NccError::Parse(format!("bad exponent `{t}` in `{part}`")))?;
            if !t.is_finite() {
                return Err(NccError::Parse(format!("non-finite exponent in `{part}`")));
            }
            Ok(Letter { generator: g.trim().to_string(), t })
        })
        .collect()
}

/// Resolves a generator name: `h` is the Euler element, basis names come
/// from the algebra, and sl(2) also knows `e`, `f`, `z`, `h0`.
pub fn generator(alg: &Algebra, h: &AlgebraElement, name: &str) -> Result<AlgebraElement> {
    if name == "h" {
        return Ok(h.clone());
    }
    if alg.family == Family::Sl && alg.defining_dim == 2 {
        let m = |e: [f64; 4]| AlgebraElement::from_matrix(alg, &Matrix::from_row_slice(2, 2, &e));
        match name {
            "e" => return m([0.0, 1.0, 0.0, 0.0]),
            "f" => return m([0.0, 0.0, 1.0, 0.0]),
            "z" => return m([0.0, -0.5, 0.5, 0.0]),
            "h0" => return m([0.0, 0.5, 0.5, 0.0]),
            _ => {}
        }
    }
    alg.basis_index(name)
        .map(|i| AlgebraElement::basis(alg, i))
        .ok_or_else(|| NccError::Parse(format!("unknown generator `{name}` for {}", alg.name)))
}

pub fn build_word(alg: &Algebra, h: &AlgebraElement, word: &[Letter]) -> Result<GroupElement> {
    let letters = word
        .iter()
        .map(|l| Ok(generator(alg, h, &l.generator)?.scale(l.t)))
        .collect::<Result<Vec<_>>>()?;
    if letters.is_empty() {
        return Ok(GroupElement::identity(alg));
    }
    GroupElement::from_word(alg, &letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_letters() {
        let w = parse_word(" z:0.5, h:-1e-1 ").unwrap();
        assert_eq!(w, vec![Letter { generator: "z".into(), t: 0.5 }, Letter { generator: "h".into(), t: -0.1 }]);
        assert!(parse_word("").unwrap().is_empty());
        assert!(parse_word("z").is_err());
        assert!(parse_word("z:inf").is_err());
        assert!(parse_word("z:0.5,").is_err());
    }
}
