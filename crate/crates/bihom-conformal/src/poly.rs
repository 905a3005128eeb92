//! Exact multivariate polynomial arithmetic over the rationals.
//!
//! `Poly` is a sparse term table mapping monomials to `BigRational`
//! coefficients. The variable set is fixed by [`VarId`]: the formal
//! derivative symbol `del`, the deformation parameter `t`, and an
//! unbounded family of spectral slots `l0`, `l1`, `l2`, ... used for the
//! λ-variables of λ-brackets and cochains.
//!
//! Canonical-form invariant: no stored coefficient is zero and the term
//! table is ordered, so two polynomials are equal iff their term tables
//! are identical.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Exact rational scalar; always in lowest terms with positive denominator.
pub type Scalar = BigRational;

/// Convenience constructor for small rational constants.
pub fn rat(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from(BigInt::from(n))
}

/// A polynomial variable.
///
/// The total order `Del < T < Slot(0) < Slot(1) < ...` is fixed and used
/// for canonical monomial ordering. `Slot(0)` renders as `l0` and plays
/// the role of λ; `Slot(1)` is μ, `Slot(2)` is γ, and higher slots are
/// the λᵢ of multi-variable cochains.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum VarId {
    Del,
    T,
    Slot(u32),
}

impl VarId {
    pub fn name(&self) -> String {
        match self {
            VarId::Del => "del".to_string(),
            VarId::T => "t".to_string(),
            VarId::Slot(i) => format!("l{i}"),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A monomial: sorted list of `(variable, exponent)` pairs, exponents > 0.
/// The empty list is the constant monomial 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: VarId, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(VarId, u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut merged: BTreeMap<VarId, u32> = BTreeMap::new();
        for &(v, e) in self.0.iter().chain(other.0.iter()) {
            *merged.entry(v).or_insert(0) += e;
        }
        Monomial(merged.into_iter().collect())
    }

    /// Split into (part on vars matching `pred`, remaining part).
    pub fn split(&self, pred: impl Fn(VarId) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|&&(v, _)| pred(v));
        (Monomial(a), Monomial(b))
    }
}

/// Sparse multivariate polynomial over ℚ in canonical form.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(int(n))
    }

    pub fn var(v: VarId) -> Self {
        Poly::monomial(Monomial::var(v), Scalar::one())
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.into_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Maximum total degree over monomials; −1 for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.total_degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Degree in a single variable; −1 for the zero polynomial.
    pub fn degree_in(&self, v: VarId) -> i64 {
        self.terms
            .keys()
            .map(|m| m.exponent(v) as i64)
            .max()
            .unwrap_or(-1)
    }

    /// The set of variables with nonzero exponent somewhere.
    pub fn vars_used(&self) -> BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn uses_var(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    /// True when every monomial involves only `del` (a ℚ[∂] element).
    pub fn is_del_only(&self) -> bool {
        self.vars_used().iter().all(|&v| v == VarId::Del)
    }

    /// Replace `v` by the polynomial `e`; ring homomorphism on the v-slot.
    pub fn substitute(&self, v: VarId, e: &Poly) -> Poly {
        self.substitute_many(&[(v, e.clone())])
    }

    /// Simultaneous substitution: every listed variable is replaced by its
    /// image computed from the *original* polynomial, so swaps like
    /// `l1 ↦ l2, l2 ↦ l1` behave correctly.
    pub fn substitute_many(&self, subs: &[(VarId, Poly)]) -> Poly {
        let map: BTreeMap<VarId, &Poly> = subs.iter().map(|(v, p)| (*v, p)).collect();
        if !self
            .terms
            .keys()
            .any(|m| m.iter().any(|(v, _)| map.contains_key(v)))
        {
            return self.clone();
        }
        let mut out = Poly::zero();
        for (mono, coeff) in &self.terms {
            let mut term = Poly::constant(coeff.clone());
            for &(v, e) in mono.iter() {
                match map.get(&v) {
                    Some(rep) => term = &term * &rep.pow(e),
                    None => term = &term * &Poly::monomial(Monomial::var_pow(v, e), Scalar::one()),
                }
            }
            out += term;
        }
        out
    }

    /// Shift of the derivative symbol: `del ↦ del + s`.
    pub fn shift_del(&self, s: &Poly) -> Poly {
        self.substitute(VarId::Del, &(&Poly::var(VarId::Del) + s))
    }

    /// Evaluation of the derivative symbol: `del ↦ s`.
    pub fn eval_del(&self, s: &Poly) -> Poly {
        self.substitute(VarId::Del, s)
    }

    /// Group terms by the power of `v`: returns power ↦ coefficient poly.
    pub fn coefficients_of(&self, v: VarId) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (mono, coeff) in &self.terms {
            let e = mono.exponent(v);
            let (_, rest) = mono.split(|w| w == v);
            out.entry(e)
                .or_insert_with(Poly::zero)
                .insert_term(rest, coeff.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Expand as a sum Σ (slot-monomial) · (del-polynomial), keyed by the
    /// monomial over variables matching `pred`.
    pub fn split_by(&self, pred: impl Fn(VarId) -> bool + Copy) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (mono, coeff) in &self.terms {
            let (sel, rest) = mono.split(pred);
            out.entry(sel)
                .or_insert_with(Poly::zero)
                .insert_term(rest, coeff.clone());
        }
        out
    }
}

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        for (m, c) in rhs.terms {
            self.insert_term(m, c);
        }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.insert_term(m.clone(), c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

// ---- Rendering ----

fn render_scalar_abs(c: &Scalar) -> String {
    let a = c.abs();
    if a.denom().is_one() {
        format!("{}", a.numer())
    } else {
        format!("({}/{})", a.numer(), a.denom())
    }
}

fn render_monomial(m: &Monomial) -> String {
    m.iter()
        .map(|&(v, e)| {
            if e == 1 {
                v.name()
            } else {
                format!("{}^{}", v.name(), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Poly {
    /// Canonical text form in the definition-file grammar, e.g.
    /// `(2/3)*del^2*l1 - l0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_abs = c.abs();
            if m.is_one() {
                write!(f, "{}", render_scalar_abs(c))?;
            } else if coeff_abs.is_one() {
                write!(f, "{}", render_monomial(m))?;
            } else {
                write!(f, "{}*{}", render_scalar_abs(c), render_monomial(m))?;
            }
        }
        Ok(())
    }
}

// ---- Parsing ----

/// Error from the polynomial expression parser, with a byte offset into
/// the parsed string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("polynomial syntax error at offset {offset}: {message}")]
pub struct PolyParseError {
    pub offset: usize,
    pub message: String,
}

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

    fn err(&self, message: impl Into<String>) -> PolyParseError {
        PolyParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse_uint(&mut self) -> Result<BigInt, PolyParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<BigInt>().map_err(|e| self.err(e.to_string()))
    }

    fn parse_expr(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.bump();
                -&self.parse_term()?
            }
            Some(b'+') => {
                self.bump();
                self.parse_term()?
            }
            _ => self.parse_term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = &acc + &self.parse_term()?;
                }
                Some(b'-') => {
                    self.bump();
                    acc = &acc - &self.parse_term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            acc = &acc * &self.parse_factor()?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Poly, PolyParseError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.parse_uint()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.err("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Poly, PolyParseError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.parse_expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.bump();
                Ok(inner)
            }
            Some(b'-') => {
                self.bump();
                Ok(-&self.parse_factor()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_uint()?;
                // A '/' directly after an integer forms a rational literal.
                if self.peek() == Some(b'/') {
                    self.bump();
                    let d = self.parse_uint()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    Ok(Poly::constant(BigRational::new(n, d)))
                } else {
                    Ok(Poly::constant(BigRational::from(n)))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match parse_var_name(name) {
                    Some(v) => Ok(Poly::var(v)),
                    None => {
                        self.pos = start;
                        Err(self.err(format!("unknown variable `{name}`")))
                    }
                }
            }
            Some(c) => Err(self.err(format!("unexpected character `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn parse_var_name(name: &str) -> Option<VarId> {
    match name {
        "del" => Some(VarId::Del),
        "t" => Some(VarId::T),
        _ => {
            let idx = name.strip_prefix('l')?;
            if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            idx.parse::<u32>().ok().map(VarId::Slot)
        }
    }
}

impl Poly {
    /// Parse a polynomial in the definition-file grammar: rationals `p/q`,
    /// variables `del`, `t`, `l0`, `l1`, ...; operators `+ - * ^`;
    /// parentheses.
    pub fn parse(src: &str) -> Result<Poly, PolyParseError> {
        let mut p = Parser::new(src);
        let out = p.parse_expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }

    /// Parse a maximal expression from the front of `src`; returns the
    /// polynomial and the number of bytes consumed. Used by the definition
    /// parser where an expression is followed by a basis name.
    pub fn parse_prefix(src: &str) -> Result<(Poly, usize), PolyParseError> {
        let mut p = Parser::new(src);
        let out = p.parse_expr()?;
        p.skip_ws();
        Ok((out, p.pos))
    }
}

// Handy λ-variable shorthands used across the crate.
pub fn lam() -> Poly {
    Poly::var(VarId::Slot(0))
}
pub fn mu() -> Poly {
    Poly::var(VarId::Slot(1))
}
pub fn del() -> Poly {
    Poly::var(VarId::Del)
}
pub fn tvar() -> Poly {
    Poly::var(VarId::T)
}
pub fn slot(i: u32) -> Poly {
    Poly::var(VarId::Slot(i))
}

/// `-del - l0`-style reflection used by conformal skew-symmetry:
/// returns `-del - s` for the given slot polynomial.
pub fn minus_del_minus(s: &Poly) -> Poly {
    &(-&del()) - s
}
