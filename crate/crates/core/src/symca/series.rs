//! Truncated univariate Taylor series `c_0 + c_1 t + … + c_r t^r + O(t^{r+1})`.

use crate::error::{check_len, Error, Result};
use crate::jets::CurveJet;
use crate::scalar::{Rational, Scalar};
use crate::symca::forms::PolyOneForm;
use crate::symca::poly::MultiPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TaylorSeries<S> {
    /// Series of order `coeffs.len() − 1`.
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        TaylorSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TaylorSeries { coeffs: vec![S::zero(); order + 1] }
    }

    pub fn constant(c: S, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise the order of a truncated series");
        TaylorSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let r = self.order().min(other.order());
        TaylorSeries { coeffs: (0..=r).map(|k| self.coeffs[k].clone() + other.coeffs[k].clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let r = self.order().min(other.order());
        TaylorSeries { coeffs: (0..=r).map(|k| self.coeffs[k].clone() - other.coeffs[k].clone()).collect() }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let r = self.order().min(other.order());
        let mut out = vec![S::zero(); r + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(r + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(r + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        TaylorSeries { coeffs: out }
    }

    pub fn scale(&self, c: &S) -> Self {
        TaylorSeries { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// Term-wise derivative; the order drops by one. Order-0 input gives the
    /// zero series of order 0.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        TaylorSeries {
            coeffs: (1..self.coeffs.len()).map(|k| self.coeffs[k].clone() * S::from_i64(k as i64)).collect(),
        }
    }

    /// Antiderivative with constant term `c0`; the order rises by one.
    pub fn integrate(&self, c0: S) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c0);
        for (k, a) in self.coeffs.iter().enumerate() {
            coeffs.push(a.clone() / S::from_i64(k as i64 + 1));
        }
        TaylorSeries { coeffs }
    }

    /// Value of the truncated polynomial at `t`.
    pub fn eval(&self, t: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TaylorSeries<T> {
        TaylorSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

/// Taylor expansion of `p(args(t))` truncated at `order`.
pub fn poly_on_series<S: Scalar>(p: &MultiPoly, args: &[TaylorSeries<S>], order: usize) -> Result<TaylorSeries<S>> {
    check_len(p.nvars(), args.len())?;
    if let Some(bad) = args.iter().find(|a| a.order() < order) {
        return Err(Error::InvalidArgument(format!(
            "series order mismatch: argument has order {}, requested {}",
            bad.order(),
            order
        )));
    }
    let args: Vec<TaylorSeries<S>> = args.iter().map(|a| a.truncate(order)).collect();
    let mut max_deg = vec![0u32; args.len()];
    for (e, _) in p.terms() {
        for (m, &k) in max_deg.iter_mut().zip(e) {
            *m = (*m).max(k);
        }
    }
    let powers: Vec<Vec<TaylorSeries<S>>> = args
        .iter()
        .zip(&max_deg)
        .map(|(a, &d)| {
            let mut pw = vec![TaylorSeries::constant(S::one(), order)];
            for k in 1..=d as usize {
                let next = pw[k - 1].mul(a);
                pw.push(next);
            }
            pw
        })
        .collect();
    let mut acc = TaylorSeries::zero(order);
    for (e, c) in p.terms() {
        let mut t = TaylorSeries::constant(S::from_rational(c), order);
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t = t.mul(&powers[i][k as usize]);
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

/// `Σ_j ω_j(γ(t))·γ_j'(t)` along the jet, truncated at order `r − 1`.
pub fn pullback_oneform_by_jet<S: Scalar>(w: &PolyOneForm, jet: &CurveJet<S>) -> Result<TaylorSeries<S>> {
    let r = jet.order();
    if r == 0 {
        return Err(Error::InvalidArgument("pullback needs a jet of order at least 1".into()));
    }
    check_len(w.dim(), jet.dim())?;
    let coords: Vec<TaylorSeries<S>> = (0..jet.dim()).map(|k| jet.coordinate_series(k)).collect();
    let mut acc = TaylorSeries::zero(r - 1);
    for (j, c) in w.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let vel = coords[j].derivative();
        if vel.is_zero() {
            continue;
        }
        let f = poly_on_series(c, &coords, r - 1)?;
        acc = acc.add(&f.mul(&vel));
    }
    Ok(acc)
}

/// Exact Taylor series of a univariate polynomial (in its single variable).
pub fn univariate_series(p: &MultiPoly, order: usize) -> Result<TaylorSeries<Rational>> {
    check_len(1, p.nvars())?;
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (e, c) in p.terms() {
        let k = e[0] as usize;
        if k <= order {
            coeffs[k] = c.clone();
        }
    }
    Ok(TaylorSeries::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{CurveJet, JetAmbient};
    use crate::symca::poly::vars_from;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    fn t_series(order: usize) -> TaylorSeries<Rational> {
        let mut c = vec![q(0); order + 1];
        c[1] = q(1);
        TaylorSeries::new(c)
    }

    #[test]
    fn square_of_t() {
        let vars = vars_from(&["x1", "x2", "y"]);
        let p = MultiPoly::parse("x2^2", &vars).unwrap();
        let args = vec![TaylorSeries::zero(3), t_series(3), TaylorSeries::zero(3)];
        let s = poly_on_series(&p, &args, 3).unwrap();
        assert_eq!(s.coeffs(), &[q(0), q(0), q(1), q(0)]);
    }

    #[test]
    fn product_expansion() {
        let vars = vars_from(&["x1", "x2"]);
        let p = MultiPoly::parse("x1*x2", &vars).unwrap();
        let x1 = TaylorSeries::new(vec![q(1), q(1), q(0)]);
        let s = poly_on_series(&p, &[x1, t_series(2)], 2).unwrap();
        assert_eq!(s.coeffs(), &[q(0), q(1), q(1)]);
    }

    #[test]
    fn constant_polynomial() {
        let vars = vars_from(&["x1", "x2"]);
        let p = MultiPoly::constant(&vars, Rational::new(5, 3));
        let s = poly_on_series(&p, &[t_series(2), t_series(2)], 2).unwrap();
        assert_eq!(s.coeffs(), &[Rational::new(5, 3), q(0), q(0)]);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let vars = vars_from(&["x1"]);
        let p = MultiPoly::var(&vars, 0);
        assert!(poly_on_series(&p, &[t_series(1)], 3).is_err());
    }

    fn heis_alpha() -> PolyOneForm {
        PolyOneForm::parse(&["0", "-x1", "1"], &vars_from(&["x1", "x2", "y"])).unwrap()
    }

    #[test]
    fn pullback_on_horizontal_jet_vanishes() {
        let jet = CurveJet::new(
            JetAmbient::M,
            vec![q(0), q(0), q(0)],
            vec![vec![q(1), q(1), q(0)], vec![q(0), q(0), Rational::new(1, 2)]],
        )
        .unwrap();
        let s = pullback_oneform_by_jet(&heis_alpha(), &jet).unwrap();
        assert_eq!(s.order(), 1);
        assert!(s.is_zero());
    }

    #[test]
    fn pullback_on_non_horizontal_jet() {
        let jet =
            CurveJet::new(JetAmbient::M, vec![q(0), q(0), q(0)], vec![vec![q(1), q(1), q(0)], vec![q(0), q(0), q(0)]])
                .unwrap();
        let s = pullback_oneform_by_jet(&heis_alpha(), &jet).unwrap();
        assert_eq!(s.coeffs(), &[q(0), q(-1)]);
    }

    #[test]
    fn pullback_on_constant_jet() {
        let jet = CurveJet::constant(JetAmbient::M, vec![q(2), q(-1), q(3)], 3);
        assert!(pullback_oneform_by_jet(&heis_alpha(), &jet).unwrap().is_zero());
        let zero_order = CurveJet::constant(JetAmbient::M, vec![q(2), q(-1), q(3)], 0);
        assert!(pullback_oneform_by_jet(&heis_alpha(), &zero_order).is_err());
    }

    #[test]
    fn integrate_then_differentiate() {
        let s = TaylorSeries::new(vec![q(1), q(2), q(3)]);
        assert_eq!(s.integrate(q(7)).derivative(), s);
    }

    proptest! {
        #[test]
        fn truncation_coherence(
            coeffs in prop::collection::vec(((0u32..3, 0u32..3), -4i64..5), 1..5),
            a in prop::collection::vec(-3i64..4, 5),
            b in prop::collection::vec(-3i64..4, 5),
            low in 0usize..4,
        ) {
            let vars = vars_from(&["x1", "x2"]);
            let p = MultiPoly::from_terms(&vars, coeffs.into_iter().map(|((i, j), c)| (vec![i, j], q(c))));
            let sa = TaylorSeries::new(a.into_iter().map(q).collect());
            let sb = TaylorSeries::new(b.into_iter().map(q).collect());
            let high = poly_on_series(&p, &[sa.clone(), sb.clone()], 4).unwrap();
            let direct = poly_on_series(&p, &[sa, sb], low).unwrap();
            prop_assert_eq!(high.truncate(low), direct);
        }
    }
}
