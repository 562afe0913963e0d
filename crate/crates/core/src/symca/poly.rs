//! Multivariate polynomials with rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::scalar::{Rational, Scalar};

/// Ordered list of coordinate names shared between polynomials.
pub type Vars = Arc<[String]>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

/// Exponent vector, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse polynomial. Zero coefficients are never stored, so structural
/// equality is polynomial equality.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The coordinate function of variable `i`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    pub fn monomial(vars: &Vars, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent length mismatch");
        let mut p = Self::zero(vars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn parse(text: &str, vars: &Vars) -> Result<Self> {
        Parser::new(text, vars).parse()
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Set of total degrees of the terms restricted to the variables in `indices`.
    pub fn degrees_in(&self, indices: &[usize]) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|e| indices.iter().map(|&i| e[i]).sum()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S> {
        check_len(self.vars.len(), point.len())?;
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked<S: Scalar>(&self, point: &[S]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = t * x.powi(k);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> MultiPoly {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * &Rational::integer(e[i] as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.vars.len()).map(|i| self.derivative(i)).collect()
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = Self::one(&self.vars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Re-expresses the polynomial over `target`, matching variables by name.
    pub fn embed(&self, target: &Vars) -> Result<MultiPoly> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v).ok_or_else(|| Error::UnknownVariable(v.clone())))
            .collect::<Result<_>>()?;
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    fn assert_same_vars(&self, other: &MultiPoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variables: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn same_vars(&self, other: &MultiPoly) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_same_vars(rhs);
        let mut out = MultiPoly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&Rational::integer(-1))
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                $tr::$method(&self, &rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest total degree first, lexicographically descending within a degree.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

struct Parser<'a> {
    vars: &'a Vars,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &str, vars: &'a Vars) -> Self {
        let mut parser = Parser { vars, toks: Vec::new(), pos: 0, end: text.chars().count() };
        parser.tokenize(text);
        parser
    }

    fn tokenize(&mut self, text: &str) {
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                match lit.parse::<Rational>() {
                    Ok(q) => self.toks.push((start, Tok::Num(q))),
                    Err(_) => self.toks.push((start, Tok::Op('?'))),
                }
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                self.toks.push((start, Tok::Ident(chars[start..i].iter().collect())));
            } else {
                self.toks.push((i, Tok::Op(c)));
                i += 1;
            }
        }
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn parse(mut self) -> Result<MultiPoly> {
        if self.toks.is_empty() {
            return self.err("empty expression");
        }
        let p = self.expr()?;
        if self.pos < self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                -self.term()?
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let t = self.term()?;
            acc = if op == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let at = self.here();
            let rhs = self.power()?;
            if op == '*' {
                acc = &acc * &rhs;
            } else {
                match rhs.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    Some(_) => return Err(Error::Syntax { pos: at, msg: "division by zero".into() }),
                    None => {
                        return Err(Error::Syntax { pos: at, msg: "division by a non-constant expression".into() })
                    }
                }
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some((_, Tok::Num(n))) if n.is_integer() && !n.is_negative() => {
                    let k: u32 = n
                        .numer()
                        .to_string()
                        .parse()
                        .map_err(|_| Error::Syntax { pos: self.here(), msg: "exponent too large".into() })?;
                    self.pos += 1;
                    return Ok(base.pow(k));
                }
                _ => return self.err("expected a non-negative integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Num(q) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.vars, q))
            }
            Tok::Ident(name) => {
                let Some(i) = self.vars.iter().position(|v| *v == name) else {
                    return Err(Error::UnknownVariable(name));
                };
                self.pos += 1;
                Ok(MultiPoly::var(self.vars, i))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Op('-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Tok::Op(c) => self.err(format!("unexpected `{c}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v3() -> Vars {
        vars_from(&["x1", "x2", "y"])
    }

    #[test]
    fn parses_single_monomial() {
        let p = MultiPoly::parse("x2^2", &v3()).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&[0, 2, 0]), Rational::one());
    }

    #[test]
    fn parse_cancellation_gives_zero() {
        let vars = vars_from(&["x1", "x2"]);
        let p = MultiPoly::parse("1/2*x1^2 - x1^2/2", &vars).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn parses_two_term_sum() {
        let vars = vars_from(&["x1", "x2"]);
        let p = MultiPoly::parse("3*x1*x2 + x2", &vars).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[1, 1]), Rational::integer(3));
        assert_eq!(p.coeff(&[0, 1]), Rational::one());
    }

    #[test]
    fn parse_errors_carry_position() {
        let vars = vars_from(&["x1", "x2"]);
        match MultiPoly::parse("x1 + * x2", &vars) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(MultiPoly::parse("x1 + z", &vars), Err(Error::UnknownVariable(v)) if v == "z"));
        assert!(matches!(MultiPoly::parse("x1/x2", &vars), Err(Error::Syntax { .. })));
        assert!(matches!(MultiPoly::parse("", &vars), Err(Error::Syntax { .. })));
    }

    #[test]
    fn evaluation() {
        let p = MultiPoly::parse("x2^2", &v3()).unwrap();
        let pt = [Rational::zero(), Rational::integer(3), Rational::zero()];
        assert_eq!(p.eval(&pt).unwrap(), Rational::integer(9));
        assert_eq!(MultiPoly::zero(&v3()).eval(&pt).unwrap(), Rational::zero());
        let vars = vars_from(&["x1", "x2"]);
        let q = MultiPoly::parse("3*x1*x2 + x2", &vars).unwrap();
        assert_eq!(q.eval(&[Rational::new(1, 2), Rational::integer(2)]).unwrap(), Rational::integer(5));
        assert!(matches!(q.eval(&[Rational::one()]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn display_format() {
        let vars = vars_from(&["x1", "x2"]);
        let p = MultiPoly::parse("-x1^2/2 + 3*x1*x2 - 1", &vars).unwrap();
        assert_eq!(p.to_string(), "-1/2*x1^2 + 3*x1*x2 - 1");
    }

    #[test]
    fn embed_matches_names() {
        let small = vars_from(&["x2"]);
        let p = MultiPoly::parse("x2^2 + 1", &small).unwrap();
        let q = p.embed(&v3()).unwrap();
        assert_eq!(q, MultiPoly::parse("x2^2 + 1", &v3()).unwrap());
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), -5i64..6, 1i64..4), 0..6).prop_map(|ts| {
            MultiPoly::from_terms(&v3(), ts.into_iter().map(|((a, b, c), n, d)| (vec![a, b, c], Rational::new(n, d))))
        })
    }

    proptest! {
        #[test]
        fn parse_print_parse_is_idempotent(p in arb_poly()) {
            let printed = p.to_string();
            let back = MultiPoly::parse(&printed, &v3()).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), printed);
        }

        #[test]
        fn derivative_is_a_derivation(p in arb_poly(), q in arb_poly()) {
            let lhs = (&p * &q).derivative(1);
            let rhs = &(&p.derivative(1) * &q) + &(&p * &q.derivative(1));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
