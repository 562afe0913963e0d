//! Numerical lifting of control curves, the endpoint map and its first
//! variation, and fixed-endpoint deformations of regular curves.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{check_len, Error, Result};
use crate::linalg::{singular_values, Matrix};
use crate::scalar::Rational;
use crate::symca::{vars_from, MultiPoly};

/// Smooth bump `sin²(πs)·cos((f − 1)πs)` on channel `channel`, with
/// `s = (t − 0.1)/0.8` on `[0.1, 0.9]` and zero elsewhere. Value and
/// derivative vanish at both ends of its support. Frequency 1 is the plain
/// `sin²` bump; even frequencies are odd about the midpoint, so the basis
/// separates symmetric from antisymmetric variations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub channel: usize,
    pub frequency: f64,
}

const SUPPORT: (f64, f64) = (0.1, 0.9);

impl Bump {
    /// The `k`-th direction of the deterministic basis over `l` channels.
    pub fn basis(k: usize, l: usize) -> Self {
        Bump { channel: k % l, frequency: (k / l + 1) as f64 }
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        let (a, b) = SUPPORT;
        if t <= a || t >= b {
            return (0.0, 0.0);
        }
        let s = (t - a) / (b - a);
        let (sn, cs) = (PI * s).sin_cos();
        let w = (self.frequency - 1.0) * PI;
        let (osn, ocs) = (w * s).sin_cos();
        let ds = 2.0 * PI * sn * cs * ocs - sn * sn * w * osn;
        (sn * sn * ocs, ds / (b - a))
    }
}

#[derive(Clone, Debug)]
enum Shape {
    Polynomial { values: Vec<MultiPoly>, velocities: Vec<MultiPoly> },
    Sampled { times: Vec<f64>, values: Vec<Vec<f64>>, slopes: Vec<Vec<f64>> },
    Reversed(Box<ControlCurve>),
}

impl Shape {
    fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Shape::Polynomial { values, velocities } => (
                values.iter().map(|p| p.eval_unchecked(&[t])).collect(),
                velocities.iter().map(|p| p.eval_unchecked(&[t])).collect(),
            ),
            Shape::Sampled { times, values, slopes } => {
                let i = match times.partition_point(|&s| s <= t) {
                    0 => 0,
                    k if k >= times.len() => times.len() - 2,
                    k => k - 1,
                };
                let h = times[i + 1] - times[i];
                let u = ((t - times[i]) / h).clamp(0.0, 1.0);
                let (h00, h10, h01, h11) =
                    (2.0 * u.powi(3) - 3.0 * u * u + 1.0, u.powi(3) - 2.0 * u * u + u, -2.0 * u.powi(3) + 3.0 * u * u, u.powi(3) - u * u);
                let (d00, d10, d01, d11) =
                    (6.0 * u * u - 6.0 * u, 3.0 * u * u - 4.0 * u + 1.0, -6.0 * u * u + 6.0 * u, 3.0 * u * u - 2.0 * u);
                let l = values[i].len();
                let val = (0..l)
                    .map(|c| h00 * values[i][c] + h10 * h * slopes[i][c] + h01 * values[i + 1][c] + h11 * h * slopes[i + 1][c])
                    .collect();
                let vel = (0..l)
                    .map(|c| (d00 * values[i][c] + d01 * values[i + 1][c]) / h + d10 * slopes[i][c] + d11 * slopes[i + 1][c])
                    .collect();
                (val, vel)
            }
            Shape::Reversed(inner) => {
                let (v, d) = inner.eval(1.0 - t);
                (v, d.into_iter().map(|x| -x).collect())
            }
        }
    }
}

/// Control curve `[0, 1] → ℝ^l`, optionally with bump perturbations added.
#[derive(Clone, Debug)]
pub struct ControlCurve {
    shape: Shape,
    channels: usize,
    bumps: Vec<(Bump, f64)>,
}

impl ControlCurve {
    /// Polynomials in the variable `t`, one per channel.
    pub fn polynomial(components: &[&str]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("a control curve needs at least one channel".into()));
        }
        let vars = vars_from(&["t"]);
        let values = components.iter().map(|c| MultiPoly::parse(c, &vars)).collect::<Result<Vec<_>>>()?;
        let velocities = values.iter().map(|p| p.derivative(0)).collect();
        Ok(ControlCurve { channels: components.len(), shape: Shape::Polynomial { values, velocities }, bumps: Vec::new() })
    }

    /// Piecewise-cubic Hermite interpolation of samples on a grid spanning
    /// `[0, 1]`, with finite-difference slopes.
    pub fn sampled(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::InvalidArgument("need at least two samples, one value row per time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) || times[0] != 0.0 || *times.last().unwrap() != 1.0 {
            return Err(Error::InvalidArgument("sample times must increase strictly from 0 to 1".into()));
        }
        let l = values[0].len();
        if l == 0 {
            return Err(Error::InvalidArgument("a control curve needs at least one channel".into()));
        }
        for v in &values {
            check_len(l, v.len())?;
        }
        let n = times.len();
        let slopes = (0..n)
            .map(|i| {
                let (a, b) = if i == 0 { (0, 1) } else if i == n - 1 { (n - 2, n - 1) } else { (i - 1, i + 1) };
                (0..l).map(|c| (values[b][c] - values[a][c]) / (times[b] - times[a])).collect()
            })
            .collect();
        Ok(ControlCurve { channels: l, shape: Shape::Sampled { times, values, slopes }, bumps: Vec::new() })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Value and velocity at time `t`.
    pub fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (mut v, mut d) = self.shape.eval(t);
        for (b, c) in &self.bumps {
            let (bv, bd) = b.eval(t);
            v[b.channel] += c * bv;
            d[b.channel] += c * bd;
        }
        (v, d)
    }

    /// `self + coeff·bump`.
    pub fn perturbed(&self, bump: Bump, coeff: f64) -> Result<Self> {
        if bump.channel >= self.channels {
            return Err(Error::InvalidArgument(format!("bump channel {} out of range", bump.channel)));
        }
        let mut out = self.clone();
        if coeff != 0.0 {
            out.bumps.push((bump, coeff));
        }
        Ok(out)
    }

    /// `t ↦ self(1 − t)`, bumps included.
    pub fn reversed(&self) -> Self {
        ControlCurve { shape: Shape::Reversed(Box::new(self.clone())), channels: self.channels, bumps: Vec::new() }
    }
}

/// Curve document: `{basepoint, controls}` with polynomial strings in `t` or
/// `{times, values}` samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    pub basepoint: Vec<Rational>,
    pub controls: ControlsDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ControlsDocument {
    Polynomial(Vec<String>),
    Sampled { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl CurveDocument {
    pub fn to_curve(&self) -> Result<(ControlCurve, Vec<f64>)> {
        let curve = match &self.controls {
            ControlsDocument::Polynomial(p) => ControlCurve::polynomial(&p.iter().map(String::as_str).collect::<Vec<_>>())?,
            ControlsDocument::Sampled { times, values } => ControlCurve::sampled(times.clone(), values.clone())?,
        };
        Ok((curve, self.basepoint.iter().map(Rational::to_f64).collect()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HorizontalPath {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Accumulated step-doubling estimate of the defect `|α_i(γ')|` integrated
    /// along the path, per coframe element.
    pub max_residual: Vec<f64>,
}

impl HorizontalPath {
    pub fn max_residual_overall(&self) -> f64 {
        self.max_residual.iter().copied().fold(0.0, f64::max)
    }
}

pub const DEFAULT_STEP: f64 = 1e-3;

struct VerticalField<'a> {
    dist: &'a Distribution,
    control: &'a ControlCurve,
}

impl VerticalField<'_> {
    /// `y_i' = Σ_j f^i_j(x(t), y) x_j'(t)`.
    fn rate(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let (x, xd) = self.control.eval(t);
        let mut p = x;
        p.extend_from_slice(y);
        (0..self.dist.corank())
            .map(|i| (0..self.dist.rank()).map(|j| if xd[j] == 0.0 { 0.0 } else { self.dist.connection(i, j).eval_unchecked(&p) * xd[j] }).sum())
            .collect()
    }

    fn rk4(&self, t: f64, y: &[f64], h: f64) -> Vec<f64> {
        let add = |a: &[f64], k: &[f64], c: f64| -> Vec<f64> { a.iter().zip(k).map(|(u, v)| u + c * v).collect() };
        let k1 = self.rate(t, y);
        let k2 = self.rate(t + h / 2.0, &add(y, &k1, h / 2.0));
        let k3 = self.rate(t + h / 2.0, &add(y, &k2, h / 2.0));
        let k4 = self.rate(t + h, &add(y, &k3, h));
        (0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
    }
}

fn check_start(dist: &Distribution, control: &ControlCurve, basepoint: &[f64], h: f64) -> Result<()> {
    check_len(dist.dim(), basepoint.len())?;
    check_len(dist.rank(), control.channels())?;
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidArgument(format!("step {h} must lie in (0, 1]")));
    }
    let (x0, _) = control.eval(0.0);
    for (j, (a, b)) in x0.iter().zip(basepoint).enumerate() {
        if (a - b).abs() > 1e-12 * (1.0 + b.abs()) {
            return Err(Error::InvalidArgument(format!(
                "basepoint coordinate {} is {b} but the control starts at {a}",
                dist.coords()[j]
            )));
        }
    }
    Ok(())
}

/// RK4 lift of the control over `[0, 1]` with `round(1/h)` steps.
pub fn lift_curve(dist: &Distribution, control: &ControlCurve, basepoint: &[f64], h: f64) -> Result<HorizontalPath> {
    lift_curve_until(dist, control, basepoint, 1.0, h)
}

/// Lift over `[0, t_end]`.
pub fn lift_curve_until(
    dist: &Distribution,
    control: &ControlCurve,
    basepoint: &[f64],
    t_end: f64,
    h: f64,
) -> Result<HorizontalPath> {
    check_start(dist, control, basepoint, h)?;
    let steps = ((t_end / h).round() as usize).max(1);
    let h = t_end / steps as f64;
    let field = VerticalField { dist, control };
    let l = dist.rank();
    let mut y = basepoint[l..].to_vec();
    let mut residual = vec![0.0; dist.corank()];
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * h;
        let (x, _) = control.eval(t);
        let mut s = x;
        s.extend_from_slice(&y);
        times.push(t);
        states.push(s);
        if k == steps {
            break;
        }
        let full = field.rk4(t, &y, h);
        let half = field.rk4(t + h / 2.0, &field.rk4(t, &y, h / 2.0), h / 2.0);
        for (r, (a, b)) in residual.iter_mut().zip(full.iter().zip(&half)) {
            *r += (a - b).abs() / 15.0;
        }
        if half.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("lift blew up near t = {t}")));
        }
        y = half;
    }
    Ok(HorizontalPath { times, states, max_residual: residual })
}

/// Vertical endpoint only, without residual bookkeeping.
fn reduced_endpoint_fast(dist: &Distribution, control: &ControlCurve, basepoint: &[f64], h: f64) -> Result<Vec<f64>> {
    check_start(dist, control, basepoint, h)?;
    let steps = ((1.0 / h).round() as usize).max(1);
    let h = 1.0 / steps as f64;
    let field = VerticalField { dist, control };
    let mut y = basepoint[dist.rank()..].to_vec();
    for k in 0..steps {
        y = field.rk4(k as f64 * h, &y, h);
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("lift blew up".into()));
    }
    Ok(y)
}

pub fn endpoint(path: &HorizontalPath) -> Vec<f64> {
    path.states.last().cloned().unwrap_or_default()
}

pub fn reduced_endpoint(dist: &Distribution, path: &HorizontalPath) -> Vec<f64> {
    endpoint(path)[dist.rank()..].to_vec()
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalJacobian {
    pub directions: Vec<Bump>,
    /// `(m − l) × N`, one column per direction.
    pub matrix: Vec<Vec<f64>>,
}

impl VariationalJacobian {
    fn as_matrix(&self) -> Matrix<f64> {
        Matrix::from_rows_with_cols(&self.matrix, self.directions.len())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().flatten().fold(0.0, |a: f64, b| a.max(b.abs()))
    }
}

/// Central-difference Jacobian of the reduced endpoint along `n_dirs` bump
/// directions, initial point fixed.
pub fn variational_jacobian(
    dist: &Distribution,
    control: &ControlCurve,
    basepoint: &[f64],
    n_dirs: usize,
    h_fd: f64,
    h: f64,
) -> Result<VariationalJacobian> {
    let directions: Vec<Bump> = (0..n_dirs).map(|k| Bump::basis(k, dist.rank())).collect();
    jacobian_along(dist, control, basepoint, &directions, h_fd, h)
}

fn jacobian_along(
    dist: &Distribution,
    control: &ControlCurve,
    basepoint: &[f64],
    directions: &[Bump],
    h_fd: f64,
    h: f64,
) -> Result<VariationalJacobian> {
    if !(h_fd > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    if directions.len() < dist.corank() {
        return Err(Error::InvalidArgument(format!("need at least {} directions", dist.corank())));
    }
    let k = dist.corank();
    let mut matrix = vec![vec![0.0; directions.len()]; k];
    for (c, d) in directions.iter().enumerate() {
        let plus = reduced_endpoint_fast(dist, &control.perturbed(*d, h_fd)?, basepoint, h)?;
        let minus = reduced_endpoint_fast(dist, &control.perturbed(*d, -h_fd)?, basepoint, h)?;
        for i in 0..k {
            matrix[i][c] = (plus[i] - minus[i]) / (2.0 * h_fd);
        }
    }
    Ok(VariationalJacobian { directions: directions.to_vec(), matrix })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Regular,
    Singular,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyOptions {
    /// Number of bump directions; `None` means `6(m − l)`.
    pub directions: Option<usize>,
    pub h_fd: f64,
    pub tol: f64,
    pub tol_low: f64,
    pub step: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { directions: None, h_fd: 1e-5, tol: 1e-3, tol_low: 1e-8, step: DEFAULT_STEP }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub jacobian: VariationalJacobian,
    pub singular_values: Vec<f64>,
    /// Smallest of the top `m − l` singular values.
    pub sigma_min: f64,
    /// Thresholds are `tol · scale` and `tol_low · scale`.
    pub scale: f64,
    pub verdict: Verdict,
    pub tol: f64,
    pub tol_low: f64,
    pub directions_used: usize,
    /// Direction count of the confirming rerun of a singular verdict.
    pub confirmed_with: Option<usize>,
}

fn judge(jac: VariationalJacobian, k: usize, opts: &ClassifyOptions) -> ClassificationReport {
    let s = singular_values(&jac.as_matrix());
    let sigma_min = if s.len() >= k { s[k - 1] } else { 0.0 };
    let scale = s.first().copied().unwrap_or(0.0).max(1.0);
    let verdict = if sigma_min > opts.tol * scale {
        Verdict::Regular
    } else if sigma_min < opts.tol_low * scale {
        Verdict::Singular
    } else {
        Verdict::Inconclusive
    };
    ClassificationReport {
        directions_used: jac.directions.len(),
        jacobian: jac,
        singular_values: s,
        sigma_min,
        scale,
        verdict,
        tol: opts.tol,
        tol_low: opts.tol_low,
        confirmed_with: None,
    }
}

/// Regular, singular or inconclusive by the singular values of the
/// variational Jacobian; singular verdicts are rechecked with twice as many
/// directions.
pub fn classify_curve(
    dist: &Distribution,
    control: &ControlCurve,
    basepoint: &[f64],
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    let k = dist.corank();
    if k == 0 {
        return Err(Error::InvalidArgument("a distribution of full rank has no vertical endpoint".into()));
    }
    if !(opts.tol_low < opts.tol) {
        return Err(Error::InvalidArgument("tol_low must be below tol".into()));
    }
    let n = opts.directions.unwrap_or(6 * k);
    let mut report = judge(variational_jacobian(dist, control, basepoint, n, opts.h_fd, opts.step)?, k, opts);
    if report.verdict == Verdict::Singular {
        let again = judge(variational_jacobian(dist, control, basepoint, 2 * n, opts.h_fd, opts.step)?, k, opts);
        if again.verdict != Verdict::Singular {
            return Ok(ClassificationReport { verdict: Verdict::Inconclusive, confirmed_with: Some(2 * n), ..again });
        }
        report.confirmed_with = Some(2 * n);
    }
    Ok(report)
}

/// Controls `control + Σ v_k δ_k` over `m − l` directions on which the
/// reduced endpoint map is a local diffeomorphism at `v = 0`.
#[derive(Clone, Debug)]
pub struct VariationalFamily {
    pub control: ControlCurve,
    pub basepoint: Vec<f64>,
    pub directions: Vec<Bump>,
    pub jacobian: Vec<Vec<f64>>,
    pub condition_number: f64,
    step: f64,
}

impl VariationalFamily {
    pub fn control_at(&self, v: &[f64]) -> Result<ControlCurve> {
        check_len(self.directions.len(), v.len())?;
        self.directions.iter().zip(v).try_fold(self.control.clone(), |c, (d, x)| c.perturbed(*d, *x))
    }

    pub fn reduced_endpoint_at(&self, dist: &Distribution, v: &[f64]) -> Result<Vec<f64>> {
        reduced_endpoint_fast(dist, &self.control_at(v)?, &self.basepoint, self.step)
    }
}

pub const MAX_CONDITION: f64 = 1e6;

pub fn variational_endpoint_family(
    dist: &Distribution,
    control: &ControlCurve,
    basepoint: &[f64],
    opts: &ClassifyOptions,
) -> Result<VariationalFamily> {
    let report = classify_curve(dist, control, basepoint, opts)?;
    if report.verdict != Verdict::Regular {
        return Err(Error::NotRegular(format!(
            "verdict {:?} with smallest singular value {:e}",
            report.verdict, report.sigma_min
        )));
    }
    let k = dist.corank();
    let jac = &report.jacobian;
    let n = jac.directions.len();
    // Greedy column pivoting with Gram-Schmidt on the remaining columns.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|c| (0..k).map(|i| jac.matrix[i][c]).collect()).collect();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let norm = |v: &Vec<f64>| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let best = (0..n).filter(|c| !chosen.contains(c)).max_by(|&a, &b| norm(&cols[a]).total_cmp(&norm(&cols[b]))).unwrap();
        let q: Vec<f64> = {
            let nb = norm(&cols[best]);
            cols[best].iter().map(|x| x / nb).collect()
        };
        chosen.push(best);
        for c in 0..n {
            if !chosen.contains(&c) {
                let dot: f64 = cols[c].iter().zip(&q).map(|(a, b)| a * b).sum();
                for (x, qi) in cols[c].iter_mut().zip(&q) {
                    *x -= dot * qi;
                }
            }
        }
    }
    chosen.sort_unstable();
    let directions: Vec<Bump> = chosen.iter().map(|&c| jac.directions[c]).collect();
    let square: Vec<Vec<f64>> = (0..k).map(|i| chosen.iter().map(|&c| jac.matrix[i][c]).collect()).collect();
    let s = singular_values(&Matrix::from_rows_with_cols(&square, k));
    let condition_number = if s[k - 1] == 0.0 { f64::INFINITY } else { s[0] / s[k - 1] };
    if condition_number > MAX_CONDITION {
        return Err(Error::IllConditioned(condition_number));
    }
    Ok(VariationalFamily {
        control: control.clone(),
        basepoint: basepoint.to_vec(),
        directions,
        jacobian: square,
        condition_number,
        step: opts.step,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Deformation {
    pub s: Vec<f64>,
    /// Family parameters `v(s)` solving the endpoint condition.
    pub parameters: Vec<Vec<f64>>,
    pub paths: Vec<HorizontalPath>,
    /// `max |endpoint(path_s) − endpoint(path_0)|` over the family.
    pub endpoint_drift: f64,
}

pub const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 30;

/// Deforms `control` by `s · amplitude · perturbation`, `s = 1/S, …, 1`, and
/// corrects the endpoint through the variational family by Newton iteration,
/// warm-started from the previous `s`.
pub fn deform_fixed_endpoints(
    dist: &Distribution,
    control: &ControlCurve,
    basepoint: &[f64],
    perturbation: Bump,
    amplitude: f64,
    steps: usize,
    opts: &ClassifyOptions,
) -> Result<Deformation> {
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one deformation step".into()));
    }
    let family = variational_endpoint_family(dist, control, basepoint, opts)?;
    let base_path = lift_curve(dist, control, basepoint, opts.step)?;
    let target = reduced_endpoint_fast(dist, control, basepoint, opts.step)?;
    let k = dist.corank();
    let mut v = vec![0.0; k];
    let mut out = Deformation { s: Vec::new(), parameters: Vec::new(), paths: Vec::new(), endpoint_drift: 0.0 };
    let end0 = endpoint(&base_path);
    for i in 1..=steps {
        let s = i as f64 / steps as f64;
        let moved = VariationalFamily { control: control.perturbed(perturbation, s * amplitude)?, ..family.clone() };
        let residual = |v: &[f64]| -> Result<Vec<f64>> {
            Ok(moved.reduced_endpoint_at(dist, v)?.iter().zip(&target).map(|(a, b)| a - b).collect())
        };
        let mut g = residual(&v)?;
        let mut iter = 0;
        while g.iter().fold(0.0, |a: f64, b| a.max(b.abs())) > NEWTON_TOL {
            if iter == NEWTON_MAX_ITER {
                let residual = g.iter().fold(0.0, |a: f64, b| a.max(b.abs()));
                return Err(Error::NewtonDiverged { iterations: iter, residual, last: v });
            }
            let jac = jacobian_along(dist, &moved.control_at(&v)?, basepoint, &family.directions, opts.h_fd, opts.step)?;
            let dv = solve_square(&jac.matrix, &g).ok_or_else(|| {
                Error::NotRegular(format!("variational Jacobian became singular at s = {s}"))
            })?;
            let sv = singular_values(&jac.as_matrix());
            if sv[k - 1] < opts.tol_low * sv[0].max(1.0) {
                return Err(Error::NotRegular(format!("regularity lost along the family at s = {s}")));
            }
            for (x, d) in v.iter_mut().zip(&dv) {
                *x -= d;
            }
            g = residual(&v)?;
            iter += 1;
        }
        let path = lift_curve(dist, &moved.control_at(&v)?, basepoint, opts.step)?;
        let drift = endpoint(&path).iter().zip(&end0).fold(0.0, |a: f64, (x, y)| a.max((x - y).abs()));
        out.endpoint_drift = out.endpoint_drift.max(drift);
        out.s.push(s);
        out.parameters.push(v.clone());
        out.paths.push(path);
    }
    Ok(out)
}

/// Gaussian elimination with partial pivoting.
fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, v)| r.iter().copied().chain([*v]).collect()).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[p][col] == 0.0 {
            return None;
        }
        m.swap(col, p);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..=n {
                m[i][j] -= f * m[col][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}
