//! Concrete field elements of K = F_p((t1))...((tn)) as finite Laurent
//! polynomials: leading-term extraction, l-classes, group words, and the
//! element-expression parser.
//!
//! The valuation is the iterated-Laurent one: exponent vectors are compared
//! lexicographically reading the outermost variable t_n first, then t_{n-1},
//! and so on. All class-level computation factors through the leading term;
//! the tail (1 + higher valuation) is an l-th power by Hensel's lemma since
//! gcd(l, p) = 1, so it never needs to be materialized.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{FFElement, PrimeField};

/// Field configuration for K = F_p((t1))...((tn)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LaurentField {
    pub residue: PrimeField,
    pub n: usize,
}

impl LaurentField {
    pub fn new(p: u64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidField("n must be >= 1".into()));
        }
        Ok(LaurentField {
            residue: PrimeField::new(p)?,
            n,
        })
    }

    pub fn p(&self) -> u64 {
        self.residue.p()
    }
}

/// Exponent vector wrapper whose `Ord` is the valuation order: lexicographic
/// reading the last coordinate first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<i64>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite Laurent polynomial over F_p in t1..tn. The zero element is the
/// empty term map; operations that need a leading term reject it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentElement {
    field: LaurentField,
    terms: BTreeMap<Monomial, FFElement>,
}

impl LaurentElement {
    pub fn zero(field: LaurentField) -> Self {
        LaurentElement {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(field: LaurentField, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, i64)>,
    {
        let mut e = LaurentElement::zero(field);
        for (expo, coeff) in terms {
            if expo.len() != field.n {
                return Err(Error::Precondition(format!(
                    "exponent vector length {} != n = {}",
                    expo.len(),
                    field.n
                )));
            }
            e.add_term(expo, field.residue.reduce(coeff));
        }
        Ok(e)
    }

    /// The monomial u * t1^e1 ... tn^en.
    pub fn monomial(field: LaurentField, coeff: i64, expo: Vec<i64>) -> Result<Self> {
        let e = Self::from_terms(field, [(expo, coeff)])?;
        if e.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(e)
    }

    fn add_term(&mut self, expo: Vec<i64>, coeff: FFElement) {
        let p = self.field.p();
        let key = Monomial(expo);
        let c = (self.terms.remove(&key).unwrap_or(0) + coeff) % p;
        if c != 0 {
            self.terms.insert(key, c);
        }
    }

    pub fn field(&self) -> LaurentField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.0.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = LaurentElement::zero(self.field);
        for (m, &c) in &self.terms {
            out.terms.insert(m.clone(), self.field.residue.neg(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = self.field;
        let mut out = LaurentElement::zero(f);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let expo: Vec<i64> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(expo, f.residue.mul(ca, cb));
            }
        }
        out
    }

    /// The term of minimal valuation: (unit residue coefficient, exponent
    /// vector). Errors on the zero element.
    pub fn leading(&self) -> Result<LeadingData> {
        let (m, &c) = self.terms.iter().next().ok_or(Error::ZeroElement)?;
        Ok(LeadingData {
            field: self.field,
            coeff: c,
            expo: m.0.iter().map(|&e| BigInt::from(e)).collect(),
        })
    }
}

impl fmt::Display for LaurentElement {
    /// Canonical printer: terms in valuation order, conforming to the
    /// element grammar, so parse(print(e)) == e.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("t{}", i + 1)
                    } else {
                        format!("t{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{c}")?;
            } else if c == 1 {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", c, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// The multiplicative leading-term image of a nonzero element: its unit
/// residue coefficient and its valuation vector. Exponents are arbitrary
/// precision because word evaluation can produce l^y-sized entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeadingData {
    field: LaurentField,
    pub coeff: FFElement,
    pub expo: Vec<BigInt>,
}

impl LeadingData {
    pub fn new(field: LaurentField, coeff: FFElement, expo: Vec<BigInt>) -> Result<Self> {
        if coeff % field.p() == 0 {
            return Err(Error::ZeroElement);
        }
        if expo.len() != field.n {
            return Err(Error::Precondition("exponent vector length != n".into()));
        }
        Ok(LeadingData {
            field,
            coeff: coeff % field.p(),
            expo,
        })
    }

    pub fn one(field: LaurentField) -> Self {
        LeadingData {
            field,
            coeff: 1,
            expo: vec![BigInt::zero(); field.n],
        }
    }

    pub fn field(&self) -> LaurentField {
        self.field
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.field, other.field);
        LeadingData {
            field: self.field,
            coeff: self.field.residue.mul(self.coeff, other.coeff),
            expo: self
                .expo
                .iter()
                .zip(&other.expo)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn pow(&self, e: &BigInt) -> Self {
        // the unit group F_p* has order p - 1
        let ord = BigInt::from(self.field.p() - 1);
        let r = e.mod_floor(&ord).to_u64().expect("reduced exponent fits");
        LeadingData {
            field: self.field,
            coeff: self.field.residue.pow(self.coeff, r),
            expo: self.expo.iter().map(|x| x * e).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        LeadingData {
            field: self.field,
            coeff: self.field.residue.neg(self.coeff),
            expo: self.expo.clone(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.expo.iter().all(|e| e.is_zero())
    }

    /// Grammar-conformant monomial text, e.g. "2*t1^2*t2".
    pub fn to_element_string(&self) -> String {
        let vars: Vec<String> = self
            .expo
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| {
                if e == &BigInt::from(1) {
                    format!("t{}", i + 1)
                } else {
                    format!("t{}^{e}", i + 1)
                }
            })
            .collect();
        if vars.is_empty() {
            format!("{}", self.coeff)
        } else if self.coeff == 1 {
            vars.join("*")
        } else {
            format!("{}*{}", self.coeff, vars.join("*"))
        }
    }

    /// Drop the outermost variable, viewing u * t1^e1...t_{n-1}^e_{n-1} as an
    /// element of the coefficient field K_{n-1}. The caller accounts for the
    /// stripped t_n power.
    pub fn restrict(&self) -> Result<LeadingData> {
        let inner = LaurentField::new(self.field.p(), self.field.n - 1)?;
        Ok(LeadingData {
            field: inner,
            coeff: self.coeff,
            expo: self.expo[..self.field.n - 1].to_vec(),
        })
    }
}

/// Class of a nonzero element modulo l-th powers: exponent vector mod l and
/// the canonical coset representative of the unit part in F_p*/(F_p*)^l.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LClass {
    pub expo_mod: Vec<u64>,
    pub unit_class: FFElement,
}

impl LClass {
    pub fn is_trivial(&self) -> bool {
        self.expo_mod.iter().all(|&e| e == 0) && self.unit_class == 1
    }
}

/// Class of a leading term modulo l-th powers. Well defined on the element
/// because the tail 1 + (positive valuation) is an l-th power (Hensel,
/// gcd(l, p) = 1).
pub fn l_class(d: &LeadingData, l: u64) -> Result<LClass> {
    let f = d.field();
    if l % f.p() == 0 {
        return Err(Error::Precondition("gcd(l, p) must be 1".into()));
    }
    let lb = BigInt::from(l);
    let expo_mod = d
        .expo
        .iter()
        .map(|e| e.mod_floor(&lb).to_u64().expect("residue fits"))
        .collect();
    let unit_class = f.residue.lth_class_rep(d.coeff, l)?;
    Ok(LClass { expo_mod, unit_class })
}

/// A formal product of named elements with integer exponents. Words keep
/// decomposition certificates small and exact; field elements are never
/// exponentiated directly.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GroupWord {
    pub factors: Vec<(String, BigInt)>,
}

impl GroupWord {
    pub fn one() -> Self {
        GroupWord::default()
    }

    pub fn generator(name: &str) -> Self {
        GroupWord {
            factors: vec![(name.to_string(), BigInt::from(1))],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<String, BigInt> = BTreeMap::new();
        for (name, e) in self.factors.iter().chain(&other.factors) {
            *acc.entry(name.clone()).or_default() += e;
        }
        GroupWord {
            factors: acc.into_iter().filter(|(_, e)| !e.is_zero()).collect(),
        }
    }

    pub fn pow(&self, e: &BigInt) -> Self {
        if e.is_zero() {
            return GroupWord::one();
        }
        GroupWord {
            factors: self
                .factors
                .iter()
                .map(|(n, x)| (n.clone(), x * e))
                .collect(),
        }
    }

    pub fn pow_i64(&self, e: i64) -> Self {
        self.pow(&BigInt::from(e))
    }

    /// Homomorphic evaluation on leading data: the leading-term map is
    /// multiplicative in a domain, so the product of leading terms is the
    /// leading term of the product.
    pub fn evaluate(&self, env: &BTreeMap<String, LeadingData>, field: LaurentField) -> Result<LeadingData> {
        let mut acc = LeadingData::one(field);
        for (name, e) in &self.factors {
            let d = env
                .get(name)
                .ok_or_else(|| Error::UnboundName(name.clone()))?;
            acc = acc.mul(&d.pow(e));
        }
        Ok(acc)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(n, e)| {
                if e == &BigInt::from(1) {
                    n.clone()
                } else {
                    format!("{n}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Evaluate a word against an environment of concrete field elements.
pub fn evaluate_word(
    w: &GroupWord,
    env: &BTreeMap<String, LaurentElement>,
    field: LaurentField,
) -> Result<LeadingData> {
    let mut leads = BTreeMap::new();
    for (name, e) in env {
        leads.insert(name.clone(), e.leading()?);
    }
    w.evaluate(&leads, field)
}

// ---------------------------------------------------------------------------
// Element parser
//
// expr  := term ('+' term)*
// term  := coeff ('*' var)* | var ('*' var)*
// var   := 't' index ('^' signedint)?
// coeff := signedint
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn signed_int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') || self.src.get(self.pos) == Some(&b'+') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self
            .src
            .get(self.pos)
            .map_or(false, |c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return self.err("expected integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<i64>().or_else(|_| self.err("exponent overflow"))
    }

    fn var(&mut self, n: usize) -> Result<(usize, i64)> {
        self.skip_ws();
        if self.bump() != Some(b't') {
            return self.err("expected variable");
        }
        let digits_start = self.pos;
        while self
            .src
            .get(self.pos)
            .map_or(false, |c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return self.err("expected variable index");
        }
        let idx: usize = std::str::from_utf8(&self.src[digits_start..self.pos])
            .expect("ascii")
            .parse()
            .or_else(|_| self.err("variable index overflow"))?;
        if idx == 0 || idx > n {
            return self.err(&format!("variable index out of range 1..={n}"));
        }
        let mut expo = 1i64;
        if self.peek() == Some(b'^') {
            self.bump();
            self.skip_ws();
            if self.peek() == Some(b'(') {
                return self.err("integer exponents only");
            }
            expo = self.signed_int()?;
        }
        Ok((idx - 1, expo))
    }

    fn term(&mut self, field: LaurentField) -> Result<(i64, Vec<i64>)> {
        let mut expo = vec![0i64; field.n];
        let coeff;
        match self.peek() {
            Some(b't') => {
                coeff = 1;
                let (i, e) = self.var(field.n)?;
                expo[i] = expo[i]
                    .checked_add(e)
                    .ok_or_else(|| Error::Parse {
                        pos: self.pos,
                        msg: "exponent overflow".into(),
                    })?;
            }
            Some(c) if c == b'-' || c == b'+' || c.is_ascii_digit() => {
                coeff = self.signed_int()?;
            }
            _ => return self.err("expected term"),
        }
        while self.peek() == Some(b'*') {
            self.bump();
            let (i, e) = self.var(field.n)?;
            expo[i] = expo[i].checked_add(e).ok_or_else(|| Error::Parse {
                pos: self.pos,
                msg: "exponent overflow".into(),
            })?;
        }
        Ok((coeff, expo))
    }

    fn expr(&mut self, field: LaurentField) -> Result<LaurentElement> {
        let mut acc = LaurentElement::zero(field);
        let (c, e) = self.term(field)?;
        acc.add_term(e, field.residue.reduce(c));
        while self.peek() == Some(b'+') {
            self.bump();
            let (c, e) = self.term(field)?;
            acc.add_term(e, field.residue.reduce(c));
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("unexpected trailing input");
        }
        Ok(acc)
    }
}

/// Parse an element expression; the result is normalized (coefficients
/// reduced mod p, like terms merged, zero terms dropped).
pub fn parse_element(text: &str, field: LaurentField) -> Result<LaurentElement> {
    let e = Parser::new(text).expr(field)?;
    if e.is_zero() {
        return Err(Error::ZeroElement);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u64, n: usize) -> LaurentField {
        LaurentField::new(p, n).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn leading_examples() {
        let f = k(3, 1);
        let e = parse_element("t1 + t1^2", f).unwrap();
        let d = e.leading().unwrap();
        assert_eq!((d.coeff, d.expo.clone()), (1, big(&[1])));

        let e = parse_element("2 + t1", f).unwrap();
        let d = e.leading().unwrap();
        assert_eq!((d.coeff, d.expo.clone()), (2, big(&[0])));

        let f2 = k(3, 2);
        let e = parse_element("t1*t2^2 + t1^2", f2).unwrap();
        let d = e.leading().unwrap();
        assert_eq!((d.coeff, d.expo.clone()), (1, big(&[2, 0])));

        assert!(LaurentElement::zero(f).leading().is_err());
    }

    #[test]
    fn l_class_examples() {
        let f = k(3, 1);
        let d = LeadingData::new(f, 2, big(&[3])).unwrap();
        let c = l_class(&d, 2).unwrap();
        assert_eq!(c.expo_mod, vec![1]);
        assert_eq!(c.unit_class, 2); // 2 is a nonsquare mod 3

        let d = LeadingData::new(f, 1, big(&[4])).unwrap();
        let c = l_class(&d, 2).unwrap();
        assert_eq!(c.expo_mod, vec![0]);
        assert_eq!(c.unit_class, 1);

        let f7 = k(7, 2);
        let d = LeadingData::new(f7, 3, big(&[2, 1])).unwrap();
        let c = l_class(&d, 3).unwrap();
        assert_eq!(c.expo_mod, vec![2, 1]);
        assert_eq!(c.unit_class, 3); // 3 is not a cube mod 7
    }

    #[test]
    fn evaluate_word_examples() {
        let f = k(3, 1);
        let mut env = BTreeMap::new();
        env.insert("a".to_string(), parse_element("t1", f).unwrap());
        let d = evaluate_word(&GroupWord::generator("a"), &env, f).unwrap();
        assert_eq!((d.coeff, d.expo.clone()), (1, big(&[1])));

        env.insert("b".to_string(), parse_element("2*t1^4", f).unwrap());
        let w = GroupWord::generator("a")
            .pow_i64(-2)
            .mul(&GroupWord::generator("b"));
        let d = evaluate_word(&w, &env, f).unwrap();
        assert_eq!((d.coeff, d.expo.clone()), (2, big(&[2])));

        let d = evaluate_word(&GroupWord::one(), &env, f).unwrap();
        assert_eq!((d.coeff, d.expo.clone()), (1, big(&[0])));

        let unbound = GroupWord::generator("zz");
        assert!(matches!(
            evaluate_word(&unbound, &env, f),
            Err(Error::UnboundName(_))
        ));
    }

    #[test]
    fn parse_examples() {
        let f = k(5, 2);
        let e = parse_element("2*t1^-1 + t1*t2", f).unwrap();
        assert_eq!(e.num_terms(), 2);

        let f3 = k(3, 1);
        assert!(matches!(
            parse_element("3*t1", f3),
            Err(Error::ZeroElement)
        ));
        assert!(matches!(
            parse_element("t1^(1/2)", f3),
            Err(Error::Parse { .. })
        ));
        assert!(parse_element("t3", f).is_err());
        assert!(parse_element("", f).is_err());
    }

    #[test]
    fn print_parse_fixpoint() {
        let f = k(5, 2);
        for src in ["2*t1^-1 + t1*t2", "t1*t1*t2^3", "4 + 4", "1 + 2*t2 + 3*t1^-2*t2^5"] {
            let e = parse_element(src, f).unwrap();
            let printed = e.to_string();
            let reparsed = parse_element(&printed, f).unwrap();
            assert_eq!(e, reparsed, "printed form: {printed}");
            assert_eq!(printed, reparsed.to_string());
        }
    }

    #[test]
    fn leading_is_multiplicative() {
        let f = k(7, 2);
        let a = parse_element("3*t1^2*t2^-1 + t2", f).unwrap();
        let b = parse_element("5*t1 + 2*t1*t2^4", f).unwrap();
        let lhs = a.mul(&b).leading().unwrap();
        let rhs = a.leading().unwrap().mul(&b.leading().unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn class_count_for_l2() {
        // exactly 2^(n+1) distinct classes for l = 2
        let f = k(3, 2);
        let mut classes = std::collections::BTreeSet::new();
        for e1 in -2i64..=2 {
            for e2 in -2i64..=2 {
                for c in 1..3 {
                    let d = LeadingData::new(f, c, big(&[e1, e2])).unwrap();
                    classes.insert(l_class(&d, 2).unwrap());
                }
            }
        }
        assert_eq!(classes.len(), 8);
    }
}
