use std::fmt;

use crate::error::{check_len, Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::symca::poly::{MultiPoly, Vars};

/// Vector field `Σ_i X_i ∂/∂x_i` with polynomial components.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    vars: Vars,
    components: Vec<MultiPoly>,
}

impl PolyVectorField {
    pub fn new(vars: &Vars, components: Vec<MultiPoly>) -> Result<Self> {
        check_len(vars.len(), components.len())?;
        if components.iter().any(|c| c.vars() != vars) {
            return Err(Error::VariableMismatch);
        }
        Ok(PolyVectorField { vars: vars.clone(), components })
    }

    pub fn zero(vars: &Vars) -> Self {
        PolyVectorField { vars: vars.clone(), components: vec![MultiPoly::zero(vars); vars.len()] }
    }

    /// The coordinate field `∂/∂x_i`.
    pub fn coordinate(vars: &Vars, i: usize) -> Self {
        let mut f = Self::zero(vars);
        f.components[i] = MultiPoly::one(vars);
        f
    }

    pub fn parse(components: &[&str], vars: &Vars) -> Result<Self> {
        let comps = components.iter().map(|c| MultiPoly::parse(c, vars)).collect::<Result<Vec<_>>>()?;
        Self::new(vars, comps)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MultiPoly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(MultiPoly::is_zero)
    }

    /// Derivation `X(f) = Σ_i X_i ∂f/∂x_i`.
    pub fn apply(&self, f: &MultiPoly) -> MultiPoly {
        let mut acc = MultiPoly::zero(&self.vars);
        for (i, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.derivative(i);
            if !d.is_zero() {
                acc = &acc + &(c * &d);
            }
        }
        acc
    }

    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<Vec<S>> {
        check_len(self.vars.len(), point.len())?;
        Ok(self.components.iter().map(|c| c.eval_unchecked(point)).collect())
    }

    pub fn add(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField {
            vars: self.vars.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyVectorField {
        PolyVectorField { vars: self.vars.clone(), components: self.components.iter().map(|a| a.scale(c)).collect() }
    }

    /// Multiplies every component by the polynomial `g`.
    pub fn mul_poly(&self, g: &MultiPoly) -> PolyVectorField {
        PolyVectorField { vars: self.vars.clone(), components: self.components.iter().map(|a| a * g).collect() }
    }

    pub fn neg(&self) -> PolyVectorField {
        self.scale(&Rational::integer(-1))
    }

    pub fn embed(&self, target: &Vars, extra_zero: bool) -> Result<PolyVectorField> {
        let mut comps = self.components.iter().map(|c| c.embed(target)).collect::<Result<Vec<_>>>()?;
        if extra_zero {
            comps.resize(target.len(), MultiPoly::zero(target));
        }
        PolyVectorField::new(target, comps)
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match c.as_constant() {
                Some(k) if k.is_one() => format!("d/d{}", self.vars[i]),
                _ => format!("({})*d/d{}", c, self.vars[i]),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Debug for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyVectorField({self})")
    }
}

/// `[X, Y]_k = X(Y_k) − Y(X_k)`.
pub fn lie_bracket(x: &PolyVectorField, y: &PolyVectorField) -> Result<PolyVectorField> {
    check_len(x.dim(), y.dim())?;
    if x.vars != y.vars {
        return Err(Error::VariableMismatch);
    }
    let components = (0..x.dim()).map(|k| &x.apply(&y.components[k]) - &y.apply(&x.components[k])).collect();
    Ok(PolyVectorField { vars: x.vars.clone(), components })
}
