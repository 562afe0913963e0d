use std::collections::BTreeMap;
use std::fmt;

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::symca::field::PolyVectorField;
use crate::symca::poly::{MultiPoly, Vars};

/// 1-form `Σ_i ω_i dx_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyOneForm {
    vars: Vars,
    coeffs: Vec<MultiPoly>,
}

impl PolyOneForm {
    pub fn new(vars: &Vars, coeffs: Vec<MultiPoly>) -> Result<Self> {
        check_len(vars.len(), coeffs.len())?;
        if coeffs.iter().any(|c| c.vars() != vars) {
            return Err(Error::VariableMismatch);
        }
        Ok(PolyOneForm { vars: vars.clone(), coeffs })
    }

    pub fn zero(vars: &Vars) -> Self {
        PolyOneForm { vars: vars.clone(), coeffs: vec![MultiPoly::zero(vars); vars.len()] }
    }

    /// `dx_i`.
    pub fn coordinate(vars: &Vars, i: usize) -> Self {
        let mut w = Self::zero(vars);
        w.coeffs[i] = MultiPoly::one(vars);
        w
    }

    /// `df`.
    pub fn exact(f: &MultiPoly) -> Self {
        PolyOneForm { vars: f.vars().clone(), coeffs: f.gradient() }
    }

    pub fn parse(coeffs: &[&str], vars: &Vars) -> Result<Self> {
        let cs = coeffs.iter().map(|c| MultiPoly::parse(c, vars)).collect::<Result<Vec<_>>>()?;
        Self::new(vars, cs)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &MultiPoly {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(MultiPoly::is_zero)
    }

    /// `ω(X)` as a polynomial.
    pub fn pair(&self, x: &PolyVectorField) -> Result<MultiPoly> {
        check_len(self.dim(), x.dim())?;
        if self.vars != *x.vars() {
            return Err(Error::VariableMismatch);
        }
        let mut acc = MultiPoly::zero(&self.vars);
        for (w, c) in self.coeffs.iter().zip(x.components()) {
            if !w.is_zero() && !c.is_zero() {
                acc = &acc + &(w * c);
            }
        }
        Ok(acc)
    }

    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<Vec<S>> {
        check_len(self.vars.len(), point.len())?;
        Ok(self.coeffs.iter().map(|c| c.eval_unchecked(point)).collect())
    }

    pub fn add(&self, other: &PolyOneForm) -> PolyOneForm {
        PolyOneForm { vars: self.vars.clone(), coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: &Rational) -> PolyOneForm {
        PolyOneForm { vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn mul_poly(&self, g: &MultiPoly) -> PolyOneForm {
        PolyOneForm { vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|a| a * g).collect() }
    }

    /// Re-expresses the form over a larger variable list (new differentials get
    /// coefficient zero).
    pub fn embed(&self, target: &Vars) -> Result<PolyOneForm> {
        let mut coeffs = vec![MultiPoly::zero(target); target.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = target
                .iter()
                .position(|t| *t == self.vars[i])
                .ok_or_else(|| Error::UnknownVariable(self.vars[i].clone()))?;
            coeffs[j] = c.embed(target)?;
        }
        PolyOneForm::new(target, coeffs)
    }

    /// `α ∧ β`.
    pub fn wedge(&self, other: &PolyOneForm) -> PolyTwoForm {
        let mut out = PolyTwoForm::zero(&self.vars);
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                let c = &(&self.coeffs[i] * &other.coeffs[j]) - &(&self.coeffs[j] * &other.coeffs[i]);
                out.set(i, j, c);
            }
        }
        out
    }
}

impl fmt::Display for PolyOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match c.as_constant() {
                Some(k) if k.is_one() => format!("d{}", self.vars[i]),
                _ => format!("({})*d{}", c, self.vars[i]),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Debug for PolyOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyOneForm({self})")
    }
}

/// 2-form `Σ_{i<j} ω_ij dx_i∧dx_j`; `ω_ji = −ω_ij` implicitly.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyTwoForm {
    vars: Vars,
    coeffs: BTreeMap<(usize, usize), MultiPoly>,
}

impl PolyTwoForm {
    pub fn zero(vars: &Vars) -> Self {
        PolyTwoForm { vars: vars.clone(), coeffs: BTreeMap::new() }
    }

    /// `dx_i ∧ dx_j`.
    pub fn basis(vars: &Vars, i: usize, j: usize) -> Self {
        let mut w = Self::zero(vars);
        w.set(i, j, MultiPoly::one(vars));
        w
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient `ω_ij` for any ordered pair.
    pub fn get(&self, i: usize, j: usize) -> MultiPoly {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => MultiPoly::zero(&self.vars),
            Less => self.coeffs.get(&(i, j)).cloned().unwrap_or_else(|| MultiPoly::zero(&self.vars)),
            Greater => -self.coeffs.get(&(j, i)).cloned().unwrap_or_else(|| MultiPoly::zero(&self.vars)),
        }
    }

    /// Sets `ω_ij` (and thereby `ω_ji = −ω_ij`).
    pub fn set(&mut self, i: usize, j: usize, c: MultiPoly) {
        assert!(i != j, "diagonal 2-form coefficient");
        let (key, c) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
    }

    /// Nonzero coefficients `(i, j, ω_ij)` with `i < j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &MultiPoly)> {
        self.coeffs.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn add(&self, other: &PolyTwoForm) -> PolyTwoForm {
        let mut out = self.clone();
        for (&(i, j), c) in &other.coeffs {
            let sum = &out.get(i, j) + c;
            out.set(i, j, sum);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> PolyTwoForm {
        let mut out = Self::zero(&self.vars);
        for (&(i, j), v) in &self.coeffs {
            out.set(i, j, v.scale(c));
        }
        out
    }

    pub fn mul_poly(&self, g: &MultiPoly) -> PolyTwoForm {
        let mut out = Self::zero(&self.vars);
        for (&(i, j), v) in &self.coeffs {
            out.set(i, j, v * g);
        }
        out
    }

    pub fn embed(&self, target: &Vars) -> Result<PolyTwoForm> {
        let idx = |i: usize| {
            target
                .iter()
                .position(|t| *t == self.vars[i])
                .ok_or_else(|| Error::UnknownVariable(self.vars[i].clone()))
        };
        let mut out = Self::zero(target);
        for (&(i, j), c) in &self.coeffs {
            out.set(idx(i)?, idx(j)?, c.embed(target)?);
        }
        Ok(out)
    }

    /// `ω(X, Y) = Σ_{i<j} ω_ij (X_i Y_j − X_j Y_i)`.
    pub fn eval_on(&self, x: &PolyVectorField, y: &PolyVectorField) -> Result<MultiPoly> {
        check_len(self.dim(), x.dim())?;
        check_len(self.dim(), y.dim())?;
        let mut acc = MultiPoly::zero(&self.vars);
        for (&(i, j), c) in &self.coeffs {
            let m = &(x.component(i) * y.component(j)) - &(x.component(j) * y.component(i));
            if !m.is_zero() {
                acc = &acc + &(c * &m);
            }
        }
        Ok(acc)
    }

    /// Skew matrix `M` with `ω(u, v) = uᵀ M v` at the point.
    pub fn matrix_at<S: Scalar>(&self, point: &[S]) -> Result<Matrix<S>> {
        check_len(self.dim(), point.len())?;
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (&(i, j), c) in &self.coeffs {
            let v = c.eval_unchecked(point);
            m.set(j, i, -v.clone());
            m.set(i, j, v);
        }
        Ok(m)
    }
}

impl fmt::Display for PolyTwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&(i, j), c)| match c.as_constant() {
                Some(k) if k.is_one() => format!("d{}^d{}", self.vars[i], self.vars[j]),
                _ => format!("({})*d{}^d{}", c, self.vars[i], self.vars[j]),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for PolyTwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyTwoForm({self})")
    }
}

/// `(dω)_ij = ∂ω_j/∂x_i − ∂ω_i/∂x_j`.
pub fn exterior_derivative(w: &PolyOneForm) -> PolyTwoForm {
    let mut out = PolyTwoForm::zero(&w.vars);
    for i in 0..w.dim() {
        for j in i + 1..w.dim() {
            out.set(i, j, &w.coeffs[j].derivative(i) - &w.coeffs[i].derivative(j));
        }
    }
    out
}

/// `(ι_v ω)_j = Σ_i v_i ω_ij`.
pub fn interior_product(v: &PolyVectorField, w: &PolyTwoForm) -> Result<PolyOneForm> {
    check_len(w.dim(), v.dim())?;
    if w.vars != *v.vars() {
        return Err(Error::VariableMismatch);
    }
    let mut coeffs = vec![MultiPoly::zero(&w.vars); w.dim()];
    for (&(i, j), c) in &w.coeffs {
        // ω_ij dx_i∧dx_j contributes v_i ω_ij to dx_j and −v_j ω_ij to dx_i.
        if !v.component(i).is_zero() {
            coeffs[j] = &coeffs[j] + &(v.component(i) * c);
        }
        if !v.component(j).is_zero() {
            coeffs[i] = &coeffs[i] - &(v.component(j) * c);
        }
    }
    PolyOneForm::new(&w.vars, coeffs)
}
