use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::syntax::{Formula, Term};

use super::CodingError;

pub type Code = BigUint;

const TAG_VAR: u64 = 0;
const TAG_CONST: u64 = 1;
const TAG_NAME: u64 = 2;
const TAG_APP: u64 = 3;
const TAG_EQ: u64 = 4;
const TAG_REL: u64 = 5;
const TAG_IND: u64 = 6;
const TAG_NOT: u64 = 7;
const TAG_AND: u64 = 8;
const TAG_OR: u64 = 9;
const TAG_IMP: u64 = 10;
const TAG_ALL: u64 = 11;
const TAG_EX: u64 = 12;
const TAG_SEQ: u64 = 13;
const TAG_FALSE: u64 = 14;

fn low_bits(c: &Code, from: u64, count: u64) -> Code {
    (c >> from) & ((Code::one() << count) - 1u32)
}

/// Injective pairing. The bit string of `⟨a, b⟩` is, from the least
/// significant end: `m` ones and a zero, the `m`-bit length `L` of `a`,
/// the `L` bits of `a`, then `b`.
pub fn pair(a: &Code, b: &Code) -> Code {
    let len = a.bits();
    let m = Code::from(len).bits();
    let mut out = (Code::one() << m) - 1u32;
    out |= Code::from(len) << (m + 1);
    out |= a << (2 * m + 1);
    out |= b << (2 * m + 1 + len);
    out
}

/// Inverse of [`pair`]; fails on numbers that are not pair codes.
pub fn unpair(c: &Code) -> Result<(Code, Code), CodingError> {
    let m = c.trailing_ones();
    let len_code = low_bits(c, m + 1, m);
    if len_code.bits() != m {
        return Err(CodingError::InvalidCode("malformed length prefix".into()));
    }
    let len = len_code
        .to_u64()
        .ok_or_else(|| CodingError::InvalidCode("length prefix too large".into()))?;
    let a = low_bits(c, 2 * m + 1, len);
    if a.bits() != len {
        return Err(CodingError::InvalidCode("first component has a leading zero".into()));
    }
    let b = c >> (2 * m + 1 + len);
    Ok((a, b))
}

fn small(c: &Code) -> Result<u64, CodingError> {
    c.to_u64()
        .ok_or_else(|| CodingError::InvalidCode("number out of range".into()))
}

/// `⟨a_1, …, a_k⟩` as `⟨k, ⟨a_1, ⟨a_2, … ⟨a_k, 0⟩⟩⟩⟩`.
pub fn seq(items: &[Code]) -> Code {
    let mut chain = Code::zero();
    for a in items.iter().rev() {
        chain = pair(a, &chain);
    }
    pair(&Code::from(items.len()), &chain)
}

pub fn unseq(c: &Code) -> Result<Vec<Code>, CodingError> {
    let (k, mut chain) = unpair(c)?;
    let k = small(&k)?;
    let mut out = Vec::new();
    for _ in 0..k {
        let (a, rest) = unpair(&chain)?;
        out.push(a);
        chain = rest;
    }
    if !chain.is_zero() {
        return Err(CodingError::InvalidCode("sequence longer than its length field".into()));
    }
    Ok(out)
}

pub fn seq_len(c: &Code) -> Result<usize, CodingError> {
    Ok(unseq(c)?.len())
}

/// `(c)_i`, counting from 0.
pub fn proj(c: &Code, i: usize) -> Result<Code, CodingError> {
    unseq(c)?
        .into_iter()
        .nth(i)
        .ok_or_else(|| CodingError::InvalidCode(format!("projection {i} out of range")))
}

/// `a ∈̃ b`: some entry of the sequence `b` equals `a`.
pub fn seq_member(a: &Code, b: &Code) -> Result<bool, CodingError> {
    Ok(unseq(b)?.iter().any(|x| x == a))
}

fn string_code(s: &str) -> Code {
    let mut bytes = Vec::with_capacity(s.len() + 1);
    bytes.push(1u8);
    bytes.extend_from_slice(s.as_bytes());
    Code::from_bytes_be(&bytes)
}

fn string_decode(c: &Code) -> Result<String, CodingError> {
    let bytes = c.to_bytes_be();
    match bytes.split_first() {
        Some((1, rest)) => {
            String::from_utf8(rest.to_vec()).map_err(|_| CodingError::InvalidCode("symbol is not UTF-8".into()))
        }
        _ => Err(CodingError::InvalidCode("malformed symbol".into())),
    }
}

fn tagged(tag: u64, payload: Code) -> Code {
    pair(&Code::from(tag), &payload)
}

fn symbol_with_args(name: &str, args: &[Term]) -> Code {
    let codes: Vec<Code> = args.iter().map(encode_term).collect();
    pair(&string_code(name), &seq(&codes))
}

pub fn encode_term(t: &Term) -> Code {
    match t {
        Term::Var(x) => tagged(TAG_VAR, string_code(x)),
        Term::Const(c) => tagged(TAG_CONST, string_code(c)),
        Term::Name(i) => tagged(TAG_NAME, Code::from(*i)),
        Term::App(f, args) => tagged(TAG_APP, symbol_with_args(f, args)),
    }
}

pub fn encode_formula(a: &Formula) -> Code {
    let two = |x: &Formula, y: &Formula| pair(&encode_formula(x), &encode_formula(y));
    match a {
        Formula::False => tagged(TAG_FALSE, Code::zero()),
        Formula::Eq(t, u) => tagged(TAG_EQ, pair(&encode_term(t), &encode_term(u))),
        Formula::Rel(q, args) => tagged(TAG_REL, symbol_with_args(q, args)),
        Formula::Ind(p, args) => tagged(TAG_IND, symbol_with_args(p, args)),
        Formula::Not(b) => tagged(TAG_NOT, encode_formula(b)),
        Formula::And(b, c) => tagged(TAG_AND, two(b, c)),
        Formula::Or(b, c) => tagged(TAG_OR, two(b, c)),
        Formula::Imp(b, c) => tagged(TAG_IMP, two(b, c)),
        Formula::Forall(x, b) => tagged(TAG_ALL, pair(&string_code(x), &encode_formula(b))),
        Formula::Exists(x, b) => tagged(TAG_EX, pair(&string_code(x), &encode_formula(b))),
    }
}

/// `⌜t⃗⌝`, the code of a tuple of terms.
pub fn encode_tuple(ts: &[Term]) -> Code {
    let codes: Vec<Code> = ts.iter().map(encode_term).collect();
    tagged(TAG_SEQ, seq(&codes))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Term(Term),
    Formula(Formula),
    Tuple(Vec<Term>),
}

impl Decoded {
    /// The tag name of the outermost constructor.
    pub fn head_tag(&self) -> &'static str {
        match self {
            Decoded::Term(Term::Var(_)) => "var",
            Decoded::Term(Term::Const(_)) => "const",
            Decoded::Term(Term::Name(_)) => "nameconst",
            Decoded::Term(Term::App(..)) => "app",
            Decoded::Formula(f) => match f {
                Formula::False => "false",
                Formula::Eq(..) => "eq",
                Formula::Rel(..) => "ordatom",
                Formula::Ind(..) => "indatom",
                Formula::Not(_) => "neg",
                Formula::And(..) => "and",
                Formula::Or(..) => "or",
                Formula::Imp(..) => "imp",
                Formula::Forall(..) => "all",
                Formula::Exists(..) => "ex",
            },
            Decoded::Tuple(_) => "seq",
        }
    }
}

pub fn decode(c: &Code) -> Result<Decoded, CodingError> {
    let (tag, payload) = unpair(c)?;
    let tag = small(&tag)?;
    let decoded = match tag {
        TAG_VAR | TAG_CONST | TAG_NAME | TAG_APP => Decoded::Term(decode_term_payload(tag, &payload)?),
        TAG_SEQ => Decoded::Tuple(decode_terms(&payload)?),
        _ => Decoded::Formula(decode_formula_payload(tag, &payload)?),
    };
    Ok(decoded)
}

fn decode_terms(c: &Code) -> Result<Vec<Term>, CodingError> {
    unseq(c)?.iter().map(decode_term).collect()
}

fn decode_term_payload(tag: u64, payload: &Code) -> Result<Term, CodingError> {
    Ok(match tag {
        TAG_VAR => Term::Var(string_decode(payload)?),
        TAG_CONST => Term::Const(string_decode(payload)?),
        TAG_NAME => {
            let i = small(payload)? as usize;
            if i == 0 {
                return Err(CodingError::InvalidCode("name constants start at c_1".into()));
            }
            Term::Name(i)
        }
        TAG_APP => {
            let (f, args) = unpair(payload)?;
            Term::App(string_decode(&f)?, decode_terms(&args)?)
        }
        _ => return Err(CodingError::InvalidCode(format!("tag {tag} is not a term tag"))),
    })
}

pub fn decode_term(c: &Code) -> Result<Term, CodingError> {
    let (tag, payload) = unpair(c)?;
    decode_term_payload(small(&tag)?, &payload)
}

fn decode_formula_payload(tag: u64, payload: &Code) -> Result<Formula, CodingError> {
    let two = |p: &Code| -> Result<(Box<Formula>, Box<Formula>), CodingError> {
        let (a, b) = unpair(p)?;
        Ok((Box::new(decode_formula(&a)?), Box::new(decode_formula(&b)?)))
    };
    Ok(match tag {
        TAG_FALSE if payload.is_zero() => Formula::False,
        TAG_EQ => {
            let (t, u) = unpair(payload)?;
            Formula::Eq(decode_term(&t)?, decode_term(&u)?)
        }
        TAG_REL | TAG_IND => {
            let (p, args) = unpair(payload)?;
            let (p, args) = (string_decode(&p)?, decode_terms(&args)?);
            if tag == TAG_REL {
                Formula::Rel(p, args)
            } else {
                Formula::Ind(p, args)
            }
        }
        TAG_NOT => Formula::Not(Box::new(decode_formula(payload)?)),
        TAG_AND => {
            let (a, b) = two(payload)?;
            Formula::And(a, b)
        }
        TAG_OR => {
            let (a, b) = two(payload)?;
            Formula::Or(a, b)
        }
        TAG_IMP => {
            let (a, b) = two(payload)?;
            Formula::Imp(a, b)
        }
        TAG_ALL | TAG_EX => {
            let (x, b) = unpair(payload)?;
            let (x, b) = (string_decode(&x)?, Box::new(decode_formula(&b)?));
            if tag == TAG_ALL {
                Formula::Forall(x, b)
            } else {
                Formula::Exists(x, b)
            }
        }
        _ => return Err(CodingError::InvalidCode(format!("tag {tag} is not a formula tag"))),
    })
}

pub fn decode_formula(c: &Code) -> Result<Formula, CodingError> {
    let (tag, payload) = unpair(c)?;
    decode_formula_payload(small(&tag)?, &payload)
}

pub fn decode_tuple(c: &Code) -> Result<Vec<Term>, CodingError> {
    match decode(c)? {
        Decoded::Tuple(ts) => Ok(ts),
        other => Err(CodingError::InvalidCode(format!(
            "expected a tuple code, found tag {}",
            other.head_tag()
        ))),
    }
}
