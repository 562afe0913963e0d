//! The annihilator bundle `Z_1 = Ann(ξ)` in fibered coordinates `(x, y, a)`,
//! where the covector over a base point is `Σ a_i α_i`.

use serde::Serialize;

use crate::dist::{Distribution, FlagReport};
use crate::error::{check_len, Error, Result};
use crate::linalg::{same_span, LinearScalar, Matrix, DEFAULT_RANK_TOL};
use crate::scalar::{Rational, Scalar};
use crate::strata::{Ambient, StratumSpec};
use crate::symca::{exterior_derivative, MultiPoly, PolyOneForm, PolyTwoForm};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovectorPoint<S = Rational> {
    pub base: Vec<S>,
    pub fiber: Vec<S>,
}

impl<S: Scalar> CovectorPoint<S> {
    pub fn new(base: Vec<S>, fiber: Vec<S>) -> Self {
        CovectorPoint { base, fiber }
    }

    /// Splits a point of `Z_1` into base and fiber parts.
    pub fn from_z1(point: &[S], m: usize) -> Self {
        CovectorPoint { base: point[..m].to_vec(), fiber: point[m..].to_vec() }
    }

    pub fn z1_point(&self) -> Vec<S> {
        self.base.iter().chain(&self.fiber).cloned().collect()
    }

    pub fn is_zero_fiber(&self) -> bool {
        self.fiber.iter().all(Scalar::is_zero)
    }

    fn check(&self, dist: &Distribution) -> Result<()> {
        check_len(dist.dim(), self.base.len())?;
        check_len(dist.corank(), self.fiber.len())
    }
}

/// Dilation of the fiber by `c ≠ 0`.
pub fn eta_act<S: Scalar>(c: &S, cp: &CovectorPoint<S>) -> Result<CovectorPoint<S>> {
    if c.is_zero() {
        return Err(Error::InvalidArgument("dilation factor must be nonzero".into()));
    }
    Ok(CovectorPoint { base: cp.base.clone(), fiber: cp.fiber.iter().map(|a| a.clone() * c.clone()).collect() })
}

/// Basis of a subspace of `T Z_1`; coordinates are base directions followed
/// by fiber directions. Exact bases are in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelBasis<S = Rational> {
    pub vectors: Vec<Vec<S>>,
    pub rank: usize,
}

impl<S: LinearScalar> KernelBasis<S> {
    fn from_vectors(vectors: Vec<Vec<S>>, dim: usize, tol: f64) -> Self {
        let vectors = S::span_basis(&vectors, dim, tol);
        KernelBasis { rank: vectors.len(), vectors }
    }
}

/// `dλ|_{Z_1} = Σ da_i∧α_i + a_i dα_i` in the variables of `Z_1`.
pub fn liouville_two_form(dist: &Distribution) -> PolyTwoForm {
    let all: Vec<usize> = (0..dist.corank()).collect();
    liouville_on_selection(dist, &all).expect("full selection is valid")
}

/// Liouville form built from the selected coframe elements only, still over
/// all of `Z_1`'s coordinates (unselected fiber coordinates do not appear).
pub fn liouville_on_selection(dist: &Distribution, selection: &[usize]) -> Result<PolyTwoForm> {
    let vars = dist.z1_coords();
    let m = dist.dim();
    let mut out = PolyTwoForm::zero(vars);
    for &i in selection {
        if i >= dist.corank() {
            return Err(Error::InvalidArgument(format!("coframe index {i} out of range")));
        }
        let alpha = dist.coframe()[i].embed(vars)?;
        let da = PolyOneForm::coordinate(vars, m + i);
        let a = MultiPoly::var(vars, m + i);
        out = out.add(&da.wedge(&alpha)).add(&exterior_derivative(&alpha).mul_poly(&a));
    }
    Ok(out)
}

/// Precomputed data for kernel computations over one distribution.
pub(crate) struct Annihilator<'a> {
    dist: &'a Distribution,
    form: PolyTwoForm,
}

impl<'a> Annihilator<'a> {
    pub(crate) fn new(dist: &'a Distribution) -> Self {
        Annihilator { dist, form: liouville_two_form(dist) }
    }

    /// Rows `(α_i(q), 0)`: vectors of `T Z_1` whose base part lies in `ξ`.
    fn horizontal_rows<S: Scalar>(&self, base: &[S]) -> Result<Matrix<S>> {
        let n = self.dist.z1_dim();
        let rows: Vec<Vec<S>> = self
            .dist
            .coframe_at(base)?
            .into_iter()
            .map(|mut r| {
                r.resize(n, S::zero());
                r
            })
            .collect();
        Ok(Matrix::from_rows_with_cols(&rows, n))
    }

    fn kernel<S: LinearScalar>(&self, z: &[S], tol: f64) -> Result<Vec<Vec<S>>> {
        Ok(S::nullspace(&self.form.matrix_at(z)?, tol))
    }

    fn locus_rows<S: Scalar>(&self, stratum: &StratumSpec, z: &[S]) -> Matrix<S> {
        gradient_rows(&stratum.locus_equations(self.dist), z)
    }

    /// `Ξ_S = TS ∩ ker(dλ|_{Z_n}) ∩ dπ^{-1}(ξ)` at `z`.
    fn restricted<S: LinearScalar>(&self, stratum: &StratumSpec, z: &[S], tol: f64) -> Result<Vec<Vec<S>>> {
        let n = self.dist.z1_dim();
        let locus = self.locus_rows(stratum, z);
        let tangent = if locus.rows() == 0 { Matrix::<S>::identity(n).to_rows() } else { S::nullspace(&locus, tol) };
        let omega = self.form.matrix_at(z)?;
        let mut constraints = locus;
        if !tangent.is_empty() {
            let b = Matrix::from_columns(&tangent, n);
            constraints = constraints.vstack(&b.transpose().matmul(&omega));
        }
        constraints = constraints.vstack(&gradient_rows(&stratum.equations, z));
        constraints = constraints.vstack(&self.horizontal_rows(&z[..self.dist.dim()])?);
        Ok(S::nullspace(&constraints, tol))
    }
}

fn gradient_rows<S: Scalar>(eqs: &[MultiPoly], z: &[S]) -> Matrix<S> {
    let rows: Vec<Vec<S>> =
        eqs.iter().map(|f| f.gradient().iter().map(|g| g.eval_unchecked(z)).collect()).collect();
    Matrix::from_rows_with_cols(&rows, z.len())
}

/// Kernel of `dλ|_{Z_1}` at a covector off the zero section.
///
/// Fails with [`Error::Invariant`] if a kernel vector projects outside `ξ` or
/// two kernel vectors share a base projection.
pub fn characteristic_kernel(dist: &Distribution, cp: &CovectorPoint) -> Result<KernelBasis> {
    characteristic_kernel_with(dist, cp, 0.0)
}

pub fn characteristic_kernel_with<S: LinearScalar>(
    dist: &Distribution,
    cp: &CovectorPoint<S>,
    tol: f64,
) -> Result<KernelBasis<S>> {
    cp.check(dist)?;
    if cp.is_zero_fiber() {
        return Err(Error::ZeroFiber);
    }
    let ann = Annihilator::new(dist);
    let n = dist.z1_dim();
    let basis = KernelBasis::from_vectors(ann.kernel(&cp.z1_point(), tol)?, n, tol);
    let m = dist.dim();
    let alphas = dist.coframe_at(&cp.base)?;
    let scale = 1.0 + basis.vectors.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let slack = if S::EXACT { 0.0 } else { 1e-7 * scale };
    for v in &basis.vectors {
        for a in &alphas {
            let p: S = a.iter().zip(&v[..m]).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            if (S::EXACT && !p.is_zero()) || p.to_f64().abs() > slack {
                return Err(Error::Invariant(format!("kernel vector {v:?} does not project into the distribution")));
            }
        }
    }
    let bases: Vec<Vec<S>> = basis.vectors.iter().map(|v| v[..m].to_vec()).collect();
    let rank_tol = if S::EXACT { 0.0 } else { tol.max(DEFAULT_RANK_TOL) };
    if crate::linalg::rank_of_vectors(&bases, m, rank_tol) != basis.rank {
        return Err(Error::Invariant("kernel vectors are not determined by their base parts".into()));
    }
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorankReport {
    /// Corank of `dλ|_{Z_1}` at the covector.
    pub corank_liouville: usize,
    /// Corank of `d(Σ a_i α_i)` restricted to `ξ` at the base point.
    pub corank_on_distribution: usize,
    pub equal: bool,
}

pub fn verify_corank(dist: &Distribution, cp: &CovectorPoint) -> Result<CorankReport> {
    cp.check(dist)?;
    if cp.is_zero_fiber() {
        return Err(Error::ZeroFiber);
    }
    let form = liouville_two_form(dist);
    let z = cp.z1_point();
    let corank_liouville = dist.z1_dim() - Rational::rank(&form.matrix_at(&z)?, 0.0);
    let l = dist.rank();
    let mut restricted = Matrix::<Rational>::zeros(l, l);
    for (a, alpha) in cp.fiber.iter().zip(dist.coframe()) {
        if a.is_zero() {
            continue;
        }
        let da = exterior_derivative(alpha);
        for j in 0..l {
            for k in 0..l {
                let v = da.eval_on(&dist.frame()[j], &dist.frame()[k])?.eval(&cp.base)?;
                let cur = restricted.get(j, k) + &(a * &v);
                restricted.set(j, k, cur);
            }
        }
    }
    let corank_on_distribution = l - Rational::rank(&restricted, 0.0);
    Ok(CorankReport { corank_liouville, corank_on_distribution, equal: corank_liouville == corank_on_distribution })
}

/// Largest `n` such that `Σ a_i α_i` annihilates every level-`n` flag
/// generator at the base point (capped at the flag depth).
pub fn annihilator_level(dist: &Distribution, cp: &CovectorPoint, flag: &FlagReport) -> Result<usize> {
    cp.check(dist)?;
    if cp.is_zero_fiber() {
        return Err(Error::ZeroFiber);
    }
    let alphas = dist.coframe_at(&cp.base)?;
    let covector: Vec<Rational> = (0..dist.dim())
        .map(|k| cp.fiber.iter().zip(&alphas).map(|(a, row)| a * &row[k]).sum())
        .collect();
    let mut level = 0;
    for n in 1..=flag.depth() {
        for g in flag.level(n) {
            let v = g.field.eval(&cp.base)?;
            let p: Rational = covector.iter().zip(&v).map(|(c, x)| c * x).sum();
            if !p.is_zero() {
                return Ok(level);
            }
        }
        level = n;
    }
    Ok(level)
}

fn check_z1_stratum(stratum: &StratumSpec) -> Result<()> {
    if stratum.ambient != Ambient::Z1 {
        return Err(Error::InvalidArgument(format!("stratum `{}` is not a stratum of Z1", stratum.name)));
    }
    Ok(())
}

/// `Ξ_S` at an exact covector on the stratum.
pub fn restricted_kernel(dist: &Distribution, cp: &CovectorPoint, stratum: &StratumSpec) -> Result<KernelBasis> {
    check_z1_stratum(stratum)?;
    cp.check(dist)?;
    if cp.is_zero_fiber() {
        return Err(Error::ZeroFiber);
    }
    let z = cp.z1_point();
    stratum.check_contains(&z, dist)?;
    let ann = Annihilator::new(dist);
    Ok(KernelBasis::from_vectors(ann.restricted(stratum, &z, 0.0)?, dist.z1_dim(), 0.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftingIdentityReport {
    /// `ker(dλ|_{Z_1}) ∩ T Z_n`.
    pub ambient_side: KernelBasis,
    /// `ker(dλ|_{Z_n}) ∩ dπ^{-1}(ξ)`.
    pub restricted_side: KernelBasis,
    pub holds: bool,
}

/// Compares both sides of the lifting identity for characteristic vectors on
/// the stratum's `Z_n` locus.
pub fn verify_lifting_identity(
    dist: &Distribution,
    cp: &CovectorPoint,
    stratum: &StratumSpec,
) -> Result<LiftingIdentityReport> {
    check_z1_stratum(stratum)?;
    cp.check(dist)?;
    if cp.is_zero_fiber() {
        return Err(Error::ZeroFiber);
    }
    let z = cp.z1_point();
    let locus_eqs = stratum.locus_equations(dist);
    for f in &locus_eqs {
        let v = f.eval(&z)?;
        if !v.is_zero() {
            return Err(Error::NotOnStratum { stratum: stratum.name.clone(), reason: format!("`{f}` = {v} on the Z_n locus") });
        }
    }
    let n = dist.z1_dim();
    let ann = Annihilator::new(dist);
    let locus = ann.locus_rows(stratum, &z);
    let omega = ann.form.matrix_at(&z)?;
    let lhs = Rational::nullspace(&omega.vstack(&locus), 0.0);
    let locus_only = StratumSpec {
        level_equations: Some(stratum.level_equations.clone().unwrap_or_else(|| stratum.equations.clone())),
        equations: Vec::new(),
        inequations: Vec::new(),
        ..stratum.clone()
    };
    let rhs = ann.restricted(&locus_only, &z, 0.0)?;
    let holds = same_span(&lhs, &rhs, n, 0.0);
    Ok(LiftingIdentityReport {
        ambient_side: KernelBasis::from_vectors(lhs, n, 0.0),
        restricted_side: KernelBasis::from_vectors(rhs, n, 0.0),
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicTrajectory {
    pub times: Vec<f64>,
    /// Points of `Z_1`, base coordinates first.
    pub states: Vec<Vec<f64>>,
    pub kernel_ranks: Vec<usize>,
    /// `max_i |α_i(dπ v)|` for the accepted direction `v` at each sample.
    pub residuals: Vec<f64>,
    /// Set when the kernel rank left 1 and integration stopped early.
    pub halt_reason: Option<String>,
}

impl CharacteristicTrajectory {
    pub fn projected(&self, m: usize) -> Vec<Vec<f64>> {
        self.states.iter().map(|s| s[..m].to_vec()).collect()
    }

    pub fn completed(&self) -> bool {
        self.halt_reason.is_none()
    }
}

/// Direction field of the rank-1 restricted kernel, normalized to unit length
/// with sign aligned to `reference`.
fn kernel_direction(
    ann: &Annihilator,
    stratum: &StratumSpec,
    z: &[f64],
    reference: &[f64],
) -> std::result::Result<Vec<f64>, usize> {
    let basis = ann.restricted(stratum, z, DEFAULT_RANK_TOL).map_err(|_| usize::MAX)?;
    if basis.len() != 1 {
        return Err(basis.len());
    }
    let mut v = basis.into_iter().next().unwrap();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dot: f64 = v.iter().zip(reference).map(|(a, b)| a * b).sum();
    let s = if dot < 0.0 { -1.0 / norm } else { 1.0 / norm };
    v.iter_mut().for_each(|x| *x *= s);
    Ok(v)
}

/// RK4 integration of the characteristic line field `Ξ_S` from `cp0` for
/// time `duration` with step `h`.
///
/// The initial orientation makes the first nonzero base component positive.
/// If the kernel rank changes along the way the partial trajectory is
/// returned with `halt_reason` set.
pub fn integrate_characteristic(
    dist: &Distribution,
    cp0: &CovectorPoint,
    stratum: &StratumSpec,
    duration: f64,
    h: f64,
) -> Result<CharacteristicTrajectory> {
    if !(h > 0.0 && duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument("need step h > 0 and a finite duration T ≥ 0".into()));
    }
    let exact = restricted_kernel(dist, cp0, stratum)?;
    if exact.rank != 1 {
        return Err(Error::KernelRank { expected: 1, found: exact.rank });
    }
    let m = dist.dim();
    let ann = Annihilator::new(dist);
    let mut reference: Vec<f64> = exact.vectors[0].iter().map(Rational::to_f64).collect();
    if let Some(first) = reference[..m].iter().chain(&reference[m..]).copied().find(|x| *x != 0.0) {
        if first < 0.0 {
            reference.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let steps = (duration / h).round() as usize;
    let h = if steps == 0 { 0.0 } else { duration / steps as f64 };
    let mut z: Vec<f64> = cp0.z1_point().iter().map(Rational::to_f64).collect();
    let mut out = CharacteristicTrajectory {
        times: Vec::new(),
        states: Vec::new(),
        kernel_ranks: Vec::new(),
        residuals: Vec::new(),
        halt_reason: None,
    };
    let residual = |z: &[f64], v: &[f64]| -> Result<f64> {
        let rows = dist.coframe_at(&z[..m])?;
        Ok(rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().abs()).fold(0.0, f64::max))
    };
    let add = |z: &[f64], k: &[f64], c: f64| -> Vec<f64> { z.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let mut dir = match kernel_direction(&ann, stratum, &z, &reference) {
        Ok(v) => v,
        Err(r) => return Err(Error::KernelRank { expected: 1, found: r }),
    };
    for step in 0..=steps {
        out.times.push(step as f64 * h);
        out.states.push(z.clone());
        out.kernel_ranks.push(1);
        out.residuals.push(residual(&z, &dir)?);
        if step == steps {
            break;
        }
        let stage = |p: &[f64], r: &[f64]| kernel_direction(&ann, stratum, p, r);
        let result = (|| {
            let k1 = dir.clone();
            let k2 = stage(&add(&z, &k1, h / 2.0), &k1)?;
            let k3 = stage(&add(&z, &k2, h / 2.0), &k2)?;
            let k4 = stage(&add(&z, &k3, h), &k3)?;
            let next: Vec<f64> =
                (0..z.len()).map(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
            let d = stage(&next, &k4)?;
            Ok::<_, usize>((next, d))
        })();
        match result {
            Ok((next, d)) => {
                z = next;
                dir = d;
            }
            Err(r) => {
                let found = if r == usize::MAX { "undetermined".to_string() } else { r.to_string() };
                out.halt_reason = Some(format!("kernel rank became {found} near t = {:.6}", step as f64 * h));
                break;
            }
        }
    }
    Ok(out)
}
