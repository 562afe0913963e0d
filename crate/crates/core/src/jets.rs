//! Jets of curves stored as Taylor coefficients `c_i = γ^{(i)}(0)/i!`.
//!
//! The reparametrization action `t ↦ a t` scales `c_i` by `aⁱ`, the same rule
//! as for raw derivatives.

use serde::{Deserialize, Serialize};

use crate::annih::{characteristic_kernel, liouville_two_form, restricted_kernel, CovectorPoint};
use crate::dist::Distribution;
use crate::error::{check_len, Error, Result};
use crate::linalg::{rref, LinearScalar, Matrix};
use crate::models::Model;
use crate::scalar::{Dual, Rational, Scalar};
use crate::strata::{Ambient, StratumSpec};
use crate::symca::{interior_product, poly_on_series, pullback_oneform_by_jet, PolyOneForm, PolyVectorField, TaylorSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JetAmbient {
    M,
    Z1,
    #[serde(rename = "controls")]
    Controls,
}

impl JetAmbient {
    pub fn dim(self, dist: &Distribution) -> usize {
        match self {
            JetAmbient::M => dist.dim(),
            JetAmbient::Z1 => dist.z1_dim(),
            JetAmbient::Controls => dist.rank(),
        }
    }
}

/// An `r`-jet: base point and Taylor rows `c_1, …, c_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveJet<S = Rational> {
    ambient: JetAmbient,
    base: Vec<S>,
    taylor: Vec<Vec<S>>,
}

impl<S: Scalar> CurveJet<S> {
    pub fn new(ambient: JetAmbient, base: Vec<S>, taylor: Vec<Vec<S>>) -> Result<Self> {
        for row in &taylor {
            check_len(base.len(), row.len())?;
        }
        Ok(CurveJet { ambient, base, taylor })
    }

    pub fn constant(ambient: JetAmbient, base: Vec<S>, order: usize) -> Self {
        let taylor = vec![vec![S::zero(); base.len()]; order];
        CurveJet { ambient, base, taylor }
    }

    /// Jet whose coordinate `k` has the Taylor series `series[k]`.
    pub fn from_series(ambient: JetAmbient, series: &[TaylorSeries<S>]) -> Result<Self> {
        let r = series.first().map_or(0, TaylorSeries::order);
        if series.iter().any(|s| s.order() != r) {
            return Err(Error::InvalidArgument("coordinate series of different orders".into()));
        }
        let base = series.iter().map(|s| s.coeff(0).clone()).collect();
        let taylor = (1..=r).map(|i| series.iter().map(|s| s.coeff(i).clone()).collect()).collect();
        Ok(CurveJet { ambient, base, taylor })
    }

    pub fn ambient(&self) -> JetAmbient {
        self.ambient
    }

    pub fn order(&self) -> usize {
        self.taylor.len()
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[S] {
        &self.base
    }

    pub fn taylor(&self) -> &[Vec<S>] {
        &self.taylor
    }

    pub fn is_constant(&self) -> bool {
        self.taylor.iter().flatten().all(Scalar::is_zero)
    }

    pub fn coordinate_series(&self, k: usize) -> TaylorSeries<S> {
        let mut c = Vec::with_capacity(self.order() + 1);
        c.push(self.base[k].clone());
        c.extend(self.taylor.iter().map(|row| row[k].clone()));
        TaylorSeries::new(c)
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::InvalidArgument(format!("cannot raise jet order {} to {order}", self.order())));
        }
        Ok(CurveJet { ambient: self.ambient, base: self.base.clone(), taylor: self.taylor[..order].to_vec() })
    }

    /// Polynomial value `Σ c_i tⁱ` per coordinate.
    pub fn eval(&self, t: &S) -> Vec<S> {
        (0..self.dim()).map(|k| self.coordinate_series(k).eval(t)).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> CurveJet<T> {
        CurveJet {
            ambient: self.ambient,
            base: self.base.iter().map(&f).collect(),
            taylor: self.taylor.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    fn check_ambient(&self, dist: &Distribution, ambient: JetAmbient) -> Result<()> {
        if self.ambient != ambient {
            return Err(Error::InvalidArgument(format!("expected a jet over {ambient:?}, got {:?}", self.ambient)));
        }
        check_len(ambient.dim(dist), self.dim())
    }
}

/// Jet document `{ambient, order, base, taylor}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JetDocument {
    pub ambient: JetAmbient,
    pub order: usize,
    pub base: Vec<Rational>,
    pub taylor: Vec<Vec<Rational>>,
}

impl From<&CurveJet> for JetDocument {
    fn from(j: &CurveJet) -> Self {
        JetDocument { ambient: j.ambient, order: j.order(), base: j.base.clone(), taylor: j.taylor.clone() }
    }
}

impl TryFrom<&JetDocument> for CurveJet {
    type Error = Error;

    fn try_from(d: &JetDocument) -> Result<Self> {
        check_len(d.order, d.taylor.len())?;
        CurveJet::new(d.ambient, d.base.clone(), d.taylor.clone())
    }
}

pub fn rho_act<S: Scalar>(a: &S, jet: &CurveJet<S>) -> Result<CurveJet<S>> {
    if a.is_zero() {
        return Err(Error::InvalidArgument("reparametrization factor must be nonzero".into()));
    }
    let mut power = S::one();
    let taylor = jet
        .taylor
        .iter()
        .map(|row| {
            power = power.clone() * a.clone();
            row.iter().map(|c| c.clone() * power.clone()).collect()
        })
        .collect();
    Ok(CurveJet { ambient: jet.ambient, base: jet.base.clone(), taylor })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizontalCheck<S = Rational> {
    pub horizontal: bool,
    /// Coefficients of each coframe pullback, orders `0..r−1`.
    pub residuals: Vec<Vec<S>>,
}

pub fn is_horizontal_jet<S: Scalar>(dist: &Distribution, jet: &CurveJet<S>) -> Result<HorizontalCheck<S>> {
    jet.check_ambient(dist, JetAmbient::M)?;
    let residuals = dist
        .coframe()
        .iter()
        .map(|a| Ok(pullback_oneform_by_jet(a, jet)?.coeffs().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let horizontal = residuals.iter().flatten().all(Scalar::is_zero);
    Ok(HorizontalCheck { horizontal, residuals })
}

/// Formal lift of a control jet: vertical coefficients solve
/// `y_i' = Σ_j f^i_j(x, y) x_j'` order by order starting from `vertical_base`.
pub fn ehresmann_jet_lift<S: Scalar>(
    dist: &Distribution,
    control: &CurveJet<S>,
    vertical_base: &[S],
) -> Result<CurveJet<S>> {
    control.check_ambient(dist, JetAmbient::Controls)?;
    check_len(dist.corank(), vertical_base.len())?;
    let (l, r) = (dist.rank(), control.order());
    let x: Vec<TaylorSeries<S>> = (0..l).map(|j| control.coordinate_series(j)).collect();
    let xdot: Vec<TaylorSeries<S>> = x.iter().map(TaylorSeries::derivative).collect();
    let mut y: Vec<Vec<S>> = vertical_base.iter().map(|v| vec![v.clone()]).collect();
    for k in 0..r {
        let args: Vec<TaylorSeries<S>> =
            x.iter().map(|s| s.truncate(k)).chain(y.iter().map(|c| TaylorSeries::new(c.clone()))).collect();
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = S::zero();
            for j in 0..l {
                let f = dist.connection(i, j);
                if f.is_zero() || xdot[j].truncate(k).is_zero() {
                    continue;
                }
                let fs = poly_on_series(f, &args, k)?;
                acc = acc + fs.mul(&xdot[j].truncate(k)).coeff(k).clone();
            }
            yi.push(acc / S::from_i64(k as i64 + 1));
        }
    }
    let series: Vec<TaylorSeries<S>> = x.into_iter().chain(y.into_iter().map(TaylorSeries::new)).collect();
    CurveJet::from_series(JetAmbient::M, &series)
}

/// Drops the vertical coordinates of an `M`-jet.
pub fn jet_project<S: Scalar>(dist: &Distribution, jet: &CurveJet<S>) -> Result<CurveJet<S>> {
    jet.check_ambient(dist, JetAmbient::M)?;
    let l = dist.rank();
    Ok(CurveJet {
        ambient: JetAmbient::Controls,
        base: jet.base[..l].to_vec(),
        taylor: jet.taylor.iter().map(|r| r[..l].to_vec()).collect(),
    })
}

/// Drops the fiber coordinates of a `Z_1`-jet.
pub fn base_projection<S: Scalar>(dist: &Distribution, jet: &CurveJet<S>) -> Result<CurveJet<S>> {
    jet.check_ambient(dist, JetAmbient::Z1)?;
    let m = dist.dim();
    Ok(CurveJet {
        ambient: JetAmbient::M,
        base: jet.base[..m].to_vec(),
        taylor: jet.taylor.iter().map(|r| r[..m].to_vec()).collect(),
    })
}

/// The 1-forms `ι_{∂_j} dλ|_{Z_1}`, one per coordinate of `Z_1`.
fn liouville_contractions(dist: &Distribution) -> Result<Vec<PolyOneForm>> {
    let w = liouville_two_form(dist);
    (0..dist.z1_dim()).map(|j| interior_product(&PolyVectorField::coordinate(dist.z1_coords(), j), &w)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacteristicCheck {
    pub characteristic: bool,
    /// Pullbacks of `ι_{∂_j} dλ`, orders `0..r−1`.
    pub residuals: Vec<Vec<Rational>>,
    pub projection_horizontal: bool,
    /// All Taylor rows vanish, so the test holds trivially.
    pub constant: bool,
}

pub fn is_characteristic_jet(dist: &Distribution, jet: &CurveJet) -> Result<CharacteristicCheck> {
    jet.check_ambient(dist, JetAmbient::Z1)?;
    if jet.order() == 0 {
        return Err(Error::InvalidArgument("characteristic test needs a jet of order at least 1".into()));
    }
    if jet.base[dist.dim()..].iter().all(Rational::is_zero) {
        return Err(Error::ZeroFiber);
    }
    let residuals = liouville_contractions(dist)?
        .iter()
        .map(|w| Ok(pullback_oneform_by_jet(w, jet)?.coeffs().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let characteristic = residuals.iter().flatten().all(Rational::is_zero);
    let projection_horizontal = is_horizontal_jet(dist, &base_projection(dist, jet)?)?.horizontal;
    Ok(CharacteristicCheck { characteristic, residuals, projection_horizontal, constant: jet.is_constant() })
}

/// Rank of the exact Jacobian of `(x_0, c_1..c_r, y_0) ↦ ehresmann_jet_lift`
/// at the given control jet, computed with dual numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftRankAudit {
    pub order: usize,
    pub parameters: usize,
    pub jacobian_rank: usize,
    /// Rank of the Taylor-coefficient columns alone.
    pub control_rank: usize,
}

pub fn lift_parametrization_rank(
    dist: &Distribution,
    control: &CurveJet,
    vertical_base: &[Rational],
) -> Result<LiftRankAudit> {
    control.check_ambient(dist, JetAmbient::Controls)?;
    check_len(dist.corank(), vertical_base.len())?;
    let (l, r, m) = (dist.rank(), control.order(), dist.dim());
    let mut params: Vec<Rational> = control.base.clone();
    params.extend(control.taylor.iter().flatten().cloned());
    params.extend(vertical_base.iter().cloned());
    let columns = (0..params.len())
        .map(|k| {
            let dual: Vec<Dual<Rational>> = params
                .iter()
                .enumerate()
                .map(|(i, p)| Dual::new(p.clone(), if i == k { Rational::one() } else { Rational::zero() }))
                .collect();
            let base = dual[..l].to_vec();
            let taylor = dual[l..l + l * r].chunks(l).map(<[_]>::to_vec).collect();
            let ctl = CurveJet::new(JetAmbient::Controls, base, taylor)?;
            let lifted = ehresmann_jet_lift(dist, &ctl, &dual[l + l * r..])?;
            Ok(lifted.base.iter().chain(lifted.taylor.iter().flatten()).map(|d| d.eps.clone()).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<Vec<Rational>>>>()?;
    let rows = m * (r + 1);
    let rank = |cols: &[Vec<Rational>]| Rational::rank(&Matrix::from_columns(cols, rows), 0.0);
    Ok(LiftRankAudit {
        order: r,
        parameters: params.len(),
        jacobian_rank: rank(&columns),
        control_rank: rank(&columns[l..l + l * r]),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Tangency,
    Submanifold,
}

/// Order-independent data of a declared stratum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumProfile {
    pub name: String,
    pub kind: FamilyKind,
    /// `rank Ξ_S` for tangency families, `rank(ξ ∩ TS)` for submanifold ones.
    pub direction_rank: usize,
    pub stratum_dim: usize,
}

pub fn stratum_profile(dist: &Distribution, stratum: &StratumSpec) -> Result<StratumProfile> {
    if stratum.samples.is_empty() {
        return Err(Error::InvalidArgument(format!("stratum `{}` has no sample points", stratum.name)));
    }
    let mut ranks = Vec::new();
    let mut dims = Vec::new();
    for s in &stratum.samples {
        dims.push(stratum.dimension_at(s, dist)?);
        ranks.push(match stratum.ambient {
            Ambient::Z1 => restricted_kernel(dist, &CovectorPoint::from_z1(s, dist.dim()), stratum)?.rank,
            Ambient::M => horizontal_tangent_rank(dist, stratum, s)?,
        });
    }
    if ranks.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::NonConstantRank { stratum: stratum.name.clone(), ranks });
    }
    if dims.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::NonConstantRank { stratum: format!("{} (dimension)", stratum.name), ranks: dims });
    }
    let kind = match stratum.ambient {
        Ambient::Z1 => FamilyKind::Tangency,
        Ambient::M => FamilyKind::Submanifold,
    };
    if ranks[0] >= dist.rank() {
        return Err(Error::Invariant(format!(
            "stratum `{}`: direction rank {} is not below the rank {} of the distribution",
            stratum.name,
            ranks[0],
            dist.rank()
        )));
    }
    Ok(StratumProfile { name: stratum.name.clone(), kind, direction_rank: ranks[0], stratum_dim: dims[0] })
}

/// `dim(ξ_q ∩ T_q S)` for a base stratum.
fn horizontal_tangent_rank(dist: &Distribution, stratum: &StratumSpec, q: &[Rational]) -> Result<usize> {
    let frame = dist.frame_at(q)?;
    let rows: Vec<Vec<Rational>> = stratum
        .equations
        .iter()
        .map(|f| {
            let g: Vec<Rational> = f.gradient().iter().map(|p| p.eval_unchecked(q)).collect();
            frame.iter().map(|x| x.iter().zip(&g).map(|(a, b)| a * b).sum()).collect()
        })
        .collect();
    let l = dist.rank();
    Ok(l - Rational::rank(&Matrix::from_rows_with_cols(&rows, l), 0.0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumAudit {
    pub name: String,
    pub kind: FamilyKind,
    pub direction_rank: usize,
    pub stratum_dim: usize,
    /// `direction_rank · r + stratum_dim`.
    pub family_dim: usize,
    /// `(direction_rank − 1)(r − 1) + stratum_dim`, the count with the
    /// reparametrization quotient taken; absent when `direction_rank = 0`.
    pub reduced_family_dim: Option<usize>,
    pub codim: i64,
    /// Growth of `codim` per unit of `r`, namely `l − direction_rank`.
    pub codim_increment: usize,
}

fn stratum_audit(dist: &Distribution, p: &StratumProfile, r: usize) -> Result<StratumAudit> {
    let (l, m) = (dist.rank(), dist.dim());
    let family_dim = p.direction_rank * r + p.stratum_dim;
    if family_dim > l * r + 2 * m {
        return Err(Error::Invariant(format!("family of `{}` exceeds l·r + 2m", p.name)));
    }
    Ok(StratumAudit {
        name: p.name.clone(),
        kind: p.kind,
        direction_rank: p.direction_rank,
        stratum_dim: p.stratum_dim,
        family_dim,
        reduced_family_dim: (p.direction_rank > 0).then(|| (p.direction_rank - 1) * (r - 1) + p.stratum_dim),
        codim: (l * r + m) as i64 - family_dim as i64,
        codim_increment: l - p.direction_rank,
    })
}

/// Family dimension of jets tangent to one stratum at order `r`.
pub fn tangency_family_dimension(dist: &Distribution, stratum: &StratumSpec, r: usize) -> Result<StratumAudit> {
    check_order(r)?;
    stratum_audit(dist, &stratum_profile(dist, stratum)?, r)
}

fn check_order(r: usize) -> Result<()> {
    if r == 0 {
        Err(Error::InvalidArgument("jet order must be at least 1".into()))
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionAudit {
    pub r: usize,
    /// `dim J^r(M, ξ) = l·r + m`.
    pub dim_horizontal: usize,
    /// `l·r`, the dimension of the control-jet parametrization.
    pub control_dim: usize,
    /// `(l − 1)(r − 1) + 2m`.
    pub paper_bound_tangency: usize,
    /// `r − 2m − 1`.
    pub codim_lower_bound: i64,
    /// Whether the lower bound is positive.
    pub bound_informative: bool,
    pub strata: Vec<StratumAudit>,
}

fn audit_row(dist: &Distribution, profiles: &[StratumProfile], r: usize) -> Result<DimensionAudit> {
    check_order(r)?;
    let (l, m) = (dist.rank(), dist.dim());
    let codim_lower_bound = r as i64 - 2 * m as i64 - 1;
    Ok(DimensionAudit {
        r,
        dim_horizontal: l * r + m,
        control_dim: l * r,
        paper_bound_tangency: (l - 1) * (r - 1) + 2 * m,
        codim_lower_bound,
        bound_informative: codim_lower_bound > 0,
        strata: profiles.iter().map(|p| stratum_audit(dist, p, r)).collect::<Result<Vec<_>>>()?,
    })
}

/// Dimension bounds at order `r` with the computed codimension of every
/// declared stratum's family.
pub fn inadmissible_codim_bound(model: &Model, r: usize) -> Result<DimensionAudit> {
    dimension_audit(model, r, r).map(|mut v| v.remove(0))
}

pub fn dimension_audit(model: &Model, r_min: usize, r_max: usize) -> Result<Vec<DimensionAudit>> {
    if r_min == 0 || r_min > r_max {
        return Err(Error::InvalidArgument(format!("invalid order range {r_min}..{r_max}")));
    }
    let profiles = model.strata.iter().map(|s| stratum_profile(&model.dist, s)).collect::<Result<Vec<_>>>()?;
    (r_min..=r_max).map(|r| audit_row(&model.dist, &profiles, r)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub stratum: String,
    pub kind: FamilyKind,
    pub member: bool,
    /// A characteristic lift tangent to the stratum, for tangency families.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JetDocument>,
}

/// Whether the horizontal `M`-jet is the projection of a characteristic jet
/// tangent to the `Z_1` stratum.
///
/// The fiber Taylor coefficients enter the constraints affinely, so the set
/// of admissible fiber jets is an affine subspace; a witness off the zero
/// section satisfying the inequations is searched along a moment curve in it.
pub fn tangency_membership(dist: &Distribution, stratum: &StratumSpec, jet: &CurveJet) -> Result<Membership> {
    jet.check_ambient(dist, JetAmbient::M)?;
    if stratum.ambient != Ambient::Z1 {
        return Err(Error::InvalidArgument(format!("stratum `{}` is not a stratum of Z1", stratum.name)));
    }
    let r = jet.order();
    check_order(r)?;
    let k = dist.corank();
    let forms = liouville_contractions(dist)?;
    let mut eqs = stratum.equations.clone();
    eqs.extend(stratum.locus_equations(dist));
    let unknowns = k * (r + 1);
    let residual = |u: &[Rational]| -> Result<Vec<Rational>> {
        let zj = lift_with_fiber(jet, u, k, r)?;
        let series: Vec<TaylorSeries<Rational>> = (0..zj.dim()).map(|i| zj.coordinate_series(i)).collect();
        let mut out = Vec::new();
        for w in &forms {
            out.extend(pullback_oneform_by_jet(w, &zj)?.coeffs().iter().cloned());
        }
        for f in &eqs {
            out.extend(poly_on_series(f, &series, r)?.coeffs().iter().cloned());
        }
        Ok(out)
    };
    let zero = vec![Rational::zero(); unknowns];
    let r0 = residual(&zero)?;
    let mut cols = Vec::with_capacity(unknowns);
    for i in 0..unknowns {
        let mut e = zero.clone();
        e[i] = Rational::one();
        cols.push(residual(&e)?.iter().zip(&r0).map(|(a, b)| a - b).collect::<Vec<_>>());
    }
    let no = Membership { stratum: stratum.name.clone(), kind: FamilyKind::Tangency, member: false, witness: None };
    let Some((particular, kernel)) = solve_affine(&cols, &r0, unknowns) else {
        return Ok(no);
    };
    for s in 0..=16i64 {
        let mut u = particular.clone();
        let mut weight = Rational::one();
        for n in &kernel {
            for (ui, ni) in u.iter_mut().zip(n) {
                *ui = &*ui + &(&weight * ni);
            }
            weight = &weight * &Rational::integer(s + 1);
        }
        let fiber0: Vec<Rational> = (0..k).map(|i| u[i * (r + 1)].clone()).collect();
        if fiber0.iter().all(Rational::is_zero) {
            continue;
        }
        let zj = lift_with_fiber(jet, &u, k, r)?;
        if stratum.check_contains(zj.base(), dist).is_err() {
            continue;
        }
        debug_assert!(residual(&u)?.iter().all(Rational::is_zero));
        return Ok(Membership { witness: Some(JetDocument::from(&zj)), member: true, ..no });
    }
    Ok(no)
}

/// `Z_1`-jet with base part `jet` and fiber coefficients `u[i·(r+1) + k]`.
fn lift_with_fiber(jet: &CurveJet, u: &[Rational], k: usize, r: usize) -> Result<CurveJet> {
    let mut base = jet.base.clone();
    base.extend((0..k).map(|i| u[i * (r + 1)].clone()));
    let taylor = (1..=r)
        .map(|o| {
            let mut row = jet.taylor[o - 1].clone();
            row.extend((0..k).map(|i| u[i * (r + 1) + o].clone()));
            row
        })
        .collect();
    CurveJet::new(JetAmbient::Z1, base, taylor)
}

/// Solves `Σ u_i cols[i] = −r0`; returns a particular solution and a kernel
/// basis, or `None` when inconsistent.
fn solve_affine(cols: &[Vec<Rational>], r0: &[Rational], n: usize) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let rows = r0.len();
    let mut aug = Matrix::<Rational>::zeros(rows, n + 1);
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            aug.set(i, j, v.clone());
        }
    }
    for (i, v) in r0.iter().enumerate() {
        aug.set(i, n, -v);
    }
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut particular = vec![Rational::zero(); n];
    for (row, &p) in pivots.iter().enumerate() {
        particular[p] = red.get(row, n).clone();
    }
    let lin = Matrix::from_columns(cols, rows);
    Some((particular, Rational::nullspace(&lin, 0.0)))
}

/// Whether a horizontal `M`-jet is tangent to a base stratum to order `r`.
pub fn submanifold_membership(dist: &Distribution, stratum: &StratumSpec, jet: &CurveJet) -> Result<Membership> {
    jet.check_ambient(dist, JetAmbient::M)?;
    if stratum.ambient != Ambient::M {
        return Err(Error::InvalidArgument(format!("stratum `{}` is not a stratum of M", stratum.name)));
    }
    let r = jet.order();
    check_order(r)?;
    let series: Vec<TaylorSeries<Rational>> = (0..jet.dim()).map(|i| jet.coordinate_series(i)).collect();
    let mut member = is_horizontal_jet(dist, jet)?.horizontal && stratum.check_contains(jet.base(), dist).is_ok();
    for f in &stratum.equations {
        member = member && poly_on_series(f, &series, r)?.is_zero();
    }
    Ok(Membership { stratum: stratum.name.clone(), kind: FamilyKind::Submanifold, member, witness: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MicroregularityReport {
    pub horizontal: bool,
    pub memberships: Vec<Membership>,
    /// Horizontal and outside every declared family. This is a statement
    /// about the declared strata only.
    pub microregular: bool,
}

pub fn microregularity(model: &Model, jet: &CurveJet) -> Result<MicroregularityReport> {
    let horizontal = is_horizontal_jet(&model.dist, jet)?.horizontal;
    let memberships = model
        .strata
        .iter()
        .map(|s| match s.ambient {
            Ambient::Z1 => tangency_membership(&model.dist, s, jet),
            Ambient::M => submanifold_membership(&model.dist, s, jet),
        })
        .collect::<Result<Vec<_>>>()?;
    let microregular = horizontal && memberships.iter().all(|m| !m.member);
    Ok(MicroregularityReport { horizontal, memberships, microregular })
}

/// Exact kernel rank of `dλ|_{Z_1}` at the base of a `Z_1`-jet.
pub fn kernel_rank_at_base(dist: &Distribution, jet: &CurveJet) -> Result<usize> {
    jet.check_ambient(dist, JetAmbient::Z1)?;
    Ok(characteristic_kernel(dist, &CovectorPoint::from_z1(jet.base(), dist.dim()))?.rank)
}
