//! Pointwise rank stratification: minors of polynomial matrices, rank
//! partitions over rational grids, declared strata, and the rank of a
//! 2-form restricted to a subvariety.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::{Distribution, FlagReport};
use crate::error::{check_len, Error, Result};
use crate::linalg::{LinearScalar, Matrix};
use crate::scalar::Rational;
use crate::symca::{MultiPoly, PolyTwoForm, PolyVectorField, Vars};

/// Rectangular matrix of polynomials over a shared variable list.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionMatrix {
    vars: Vars,
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

impl FunctionMatrix {
    pub fn from_rows(vars: &Vars, rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for row in rows {
            check_len(cols, row.len())?;
            for e in row {
                if e.vars() != vars {
                    return Err(Error::VariableMismatch);
                }
                entries.push(e);
            }
        }
        Ok(FunctionMatrix { vars: vars.clone(), rows: nrows, cols, entries })
    }

    pub fn parse(rows: &[Vec<String>], vars: &Vars) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|e| MultiPoly::parse(e, vars)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(vars, parsed)
    }

    /// Matrix whose columns are the components of the given fields.
    pub fn from_fields(fields: &[PolyVectorField]) -> Result<Self> {
        let first = fields.first().ok_or_else(|| Error::InvalidArgument("no vector fields".into()))?;
        let vars = first.vars().clone();
        let m = first.dim();
        let rows = (0..m).map(|i| fields.iter().map(|f| f.component(i).clone()).collect()).collect();
        Self::from_rows(&vars, rows)
    }

    /// Generator matrix of flag level `level`.
    pub fn flag_level(flag: &FlagReport, level: usize) -> Result<Self> {
        if level == 0 || level > flag.depth() {
            return Err(Error::InvalidArgument(format!("flag level {level} not in 1..={}", flag.depth())));
        }
        let fields: Vec<PolyVectorField> = flag.level(level).iter().map(|g| g.field.clone()).collect();
        Self::from_fields(&fields)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Matrix<Rational>> {
        check_len(self.vars.len(), point.len())?;
        let rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).eval_unchecked(point)).collect())
            .collect();
        Ok(Matrix::from_rows_with_cols(&rows, self.cols))
    }
}

/// All `k×k` minors, rows subsets outermost, each in lexicographic order.
pub fn minors(fm: &FunctionMatrix, k: usize) -> Result<Vec<MultiPoly>> {
    if k == 0 || k > fm.rows.min(fm.cols) {
        return Err(Error::InvalidArgument(format!(
            "minor size {k} not in 1..={}",
            fm.rows.min(fm.cols)
        )));
    }
    let row_sets = subsets(fm.rows, k);
    let col_sets = subsets(fm.cols, k);
    let mut out = Vec::with_capacity(row_sets.len() * col_sets.len());
    for rs in &row_sets {
        for cs in &col_sets {
            out.push(determinant(fm, rs, cs));
        }
    }
    Ok(out)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Laplace expansion along the first selected row.
fn determinant(fm: &FunctionMatrix, rows: &[usize], cols: &[usize]) -> MultiPoly {
    if rows.len() == 1 {
        return fm.get(rows[0], cols[0]).clone();
    }
    let mut acc = MultiPoly::zero(&fm.vars);
    for (pos, &c) in cols.iter().enumerate() {
        let e = fm.get(rows[0], c);
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let sub = e * &determinant(fm, &rows[1..], &rest);
        acc = if pos % 2 == 0 { &acc + &sub } else { &acc - &sub };
    }
    acc
}

pub fn rank_at(fm: &FunctionMatrix, point: &[Rational]) -> Result<usize> {
    Ok(Rational::rank(&fm.eval(point)?, 0.0))
}

/// Rational sampling grid. Variables not mentioned are held at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    vars: Vars,
    axes: Vec<Vec<Rational>>,
    text: String,
}

impl Grid {
    /// Parses `;`-separated entries `v=a:b:n` (`n` evenly spaced values from
    /// `a` to `b` inclusive), `v=c` or `v={c1,c2,…}`.
    pub fn parse(text: &str, vars: &Vars) -> Result<Self> {
        let mut axes = vec![vec![Rational::zero()]; vars.len()];
        let mut seen = vec![false; vars.len()];
        let entries: Vec<&str> = text.split(';').map(str::trim).filter(|e| !e.is_empty()).collect();
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty grid".into()));
        }
        for entry in entries {
            let (name, spec) = entry
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("grid entry `{entry}` lacks `=`")))?;
            let name = name.trim();
            let idx = vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            if seen[idx] {
                return Err(Error::InvalidArgument(format!("variable `{name}` appears twice in the grid")));
            }
            seen[idx] = true;
            axes[idx] = parse_axis(spec.trim())?;
        }
        Ok(Grid { vars: vars.clone(), axes, text: text.trim().to_string() })
    }

    pub fn from_axes(vars: &Vars, axes: Vec<Vec<Rational>>) -> Result<Self> {
        check_len(vars.len(), axes.len())?;
        if axes.iter().any(Vec::is_empty) {
            return Err(Error::InvalidArgument("empty grid axis".into()));
        }
        let text = vars
            .iter()
            .zip(&axes)
            .map(|(v, a)| format!("{v}={{{}}}", a.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(";");
        Ok(Grid { vars: vars.clone(), axes, text })
    }

    pub fn axes(&self) -> &[Vec<Rational>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order (last variable fastest).
    pub fn points(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.trim().parse().map_err(|e: crate::scalar::ParseRationalError| Error::InvalidArgument(e.0))
}

fn parse_axis(spec: &str) -> Result<Vec<Rational>> {
    if let Some(inner) = spec.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        let vals = inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        return if vals.is_empty() { Err(Error::InvalidArgument("empty value set".into())) } else { Ok(vals) };
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [c] => Ok(vec![parse_rational(c)?]),
        [a, b, n] => {
            let (a, b) = (parse_rational(a)?, parse_rational(b)?);
            let n: usize = n.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad point count `{n}`")))?;
            match n {
                0 => Err(Error::InvalidArgument("grid axis with zero points".into())),
                1 => Ok(vec![a]),
                _ => {
                    let step = (&b - &a) / Rational::integer(n as i64 - 1);
                    Ok((0..n).map(|i| &a + &(&step * &Rational::integer(i as i64))).collect())
                }
            }
        }
        _ => Err(Error::InvalidArgument(format!("cannot parse grid axis `{spec}`"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankedPoint {
    pub point: Vec<Rational>,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankPartitionReport {
    pub grid: String,
    pub points: Vec<RankedPoint>,
    pub histogram: BTreeMap<usize, usize>,
    /// Largest rank seen on the grid: evidence for, not proof of, a dense rank.
    pub grid_maximal_rank: usize,
    /// Points where the rank drops below the grid maximum.
    pub sub_maximal_locus: Vec<Vec<Rational>>,
    /// Coordinates that take a single value on the whole sub-maximal locus
    /// while varying over the grid.
    pub locus_fixed_coordinates: BTreeMap<String, Rational>,
}

pub fn partition_grid(fm: &FunctionMatrix, grid: &Grid) -> Result<RankPartitionReport> {
    partition_with(fm, grid, |p| rank_at(fm, p))
}

/// Same partition with ranks from floating-point singular values; values
/// below `tol` times the largest count as zero.
pub fn partition_grid_float(fm: &FunctionMatrix, grid: &Grid, tol: f64) -> Result<RankPartitionReport> {
    partition_with(fm, grid, |p| Ok(f64::rank(&fm.eval(p)?.map(Rational::to_f64), tol)))
}

fn partition_with(
    fm: &FunctionMatrix,
    grid: &Grid,
    rank: impl Fn(&[Rational]) -> Result<usize>,
) -> Result<RankPartitionReport> {
    if fm.vars != grid.vars {
        return Err(Error::VariableMismatch);
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let points = grid
        .points()
        .into_iter()
        .map(|p| Ok(RankedPoint { rank: rank(&p)?, point: p }))
        .collect::<Result<Vec<_>>>()?;
    let mut histogram = BTreeMap::new();
    for p in &points {
        *histogram.entry(p.rank).or_insert(0) += 1;
    }
    let grid_maximal_rank = *histogram.keys().next_back().expect("nonempty grid");
    let sub_maximal_locus: Vec<Vec<Rational>> =
        points.iter().filter(|p| p.rank < grid_maximal_rank).map(|p| p.point.clone()).collect();
    let mut locus_fixed_coordinates = BTreeMap::new();
    if let Some(first) = sub_maximal_locus.first() {
        for (i, name) in grid.vars.iter().enumerate() {
            if grid.axes[i].len() > 1 && sub_maximal_locus.iter().all(|p| p[i] == first[i]) {
                locus_fixed_coordinates.insert(name.clone(), first[i].clone());
            }
        }
    }
    Ok(RankPartitionReport {
        grid: grid.to_string(),
        points,
        histogram,
        grid_maximal_rank,
        sub_maximal_locus,
        locus_fixed_coordinates,
    })
}

/// Tangent space `{v : d f(v) = 0 for f in eqs}` at a point of `V(eqs)`,
/// as a basis of column vectors. Requires independent differentials.
pub fn tangent_basis(eqs: &[MultiPoly], point: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let n = point.len();
    for f in eqs {
        check_len(f.nvars(), n)?;
        let v = f.eval_unchecked(point);
        if !v.is_zero() {
            return Err(Error::NotOnStratum { stratum: "V(eqs)".into(), reason: format!("`{f}` = {v} at the point") });
        }
    }
    let jac = differentials_at(eqs, point);
    if Rational::rank(&jac, 0.0) < eqs.len() {
        return Err(Error::DependentEquations);
    }
    Ok(Rational::nullspace(&jac, 0.0))
}

fn differentials_at(eqs: &[MultiPoly], point: &[Rational]) -> Matrix<Rational> {
    let rows: Vec<Vec<Rational>> =
        eqs.iter().map(|f| f.gradient().iter().map(|g| g.eval_unchecked(point)).collect()).collect();
    Matrix::from_rows_with_cols(&rows, point.len())
}

/// Rank of `ω` restricted to `T_q V` for `V = {eqs = 0}`.
pub fn two_form_rank_on_subvariety(omega: &PolyTwoForm, eqs: &[MultiPoly], point: &[Rational]) -> Result<usize> {
    check_len(omega.dim(), point.len())?;
    let m = omega.matrix_at(point)?;
    let basis = tangent_basis(eqs, point)?;
    if basis.is_empty() {
        return Ok(0);
    }
    let b = Matrix::from_columns(&basis, point.len());
    Ok(Rational::rank(&b.transpose().matmul(&m).matmul(&b), 0.0))
}

/// Alternating form at a point, keyed by strictly increasing index sets.
#[derive(Clone, Debug, PartialEq)]
struct AltForm {
    coeffs: BTreeMap<Vec<usize>, Rational>,
}

impl AltForm {
    fn from_covector(c: &[Rational]) -> Self {
        let coeffs = c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (vec![i], v.clone())).collect();
        AltForm { coeffs }
    }

    fn from_skew(m: &Matrix<Rational>) -> Self {
        let mut coeffs = BTreeMap::new();
        for i in 0..m.rows() {
            for j in i + 1..m.cols() {
                if !m.get(i, j).is_zero() {
                    coeffs.insert(vec![i, j], m.get(i, j).clone());
                }
            }
        }
        AltForm { coeffs }
    }

    fn wedge(&self, other: &AltForm) -> AltForm {
        let mut coeffs: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                if a.iter().any(|i| b.contains(i)) {
                    continue;
                }
                let mut joined: Vec<usize> = a.iter().chain(b).copied().collect();
                let sign = sort_sign(&mut joined);
                let v = x * y;
                let e = coeffs.entry(joined).or_insert_with(Rational::zero);
                *e = if sign { &*e + &v } else { &*e - &v };
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        AltForm { coeffs }
    }

    /// `ι_{e_i}`: removes index `i` with sign `(−1)^{position}`.
    fn contract_basis(&self, i: usize) -> AltForm {
        let mut coeffs = BTreeMap::new();
        for (idx, v) in &self.coeffs {
            if let Some(pos) = idx.iter().position(|&k| k == i) {
                let mut rest = idx.clone();
                rest.remove(pos);
                coeffs.insert(rest, if pos % 2 == 0 { v.clone() } else { -v });
            }
        }
        AltForm { coeffs }
    }
}

/// Sorts in place and returns `true` for an even permutation.
fn sort_sign(v: &mut [usize]) -> bool {
    let mut even = true;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                even = !even;
            }
        }
    }
    even
}

/// The same rank as [`two_form_rank_on_subvariety`], obtained from
/// `Ω = df_1∧…∧df_k∧ω`: the contractions `ι_{e_i}Ω` span a space of
/// dimension `k + rank(ω|TV)` when `Ω ≠ 0`.
pub fn two_form_rank_by_wedge(omega: &PolyTwoForm, eqs: &[MultiPoly], point: &[Rational]) -> Result<usize> {
    check_len(omega.dim(), point.len())?;
    tangent_basis(eqs, point)?;
    let jac = differentials_at(eqs, point);
    let mut big = AltForm::from_skew(&omega.matrix_at(point)?);
    for i in (0..eqs.len()).rev() {
        big = AltForm::from_covector(&jac.row(i)).wedge(&big);
    }
    if big.coeffs.is_empty() {
        return Ok(0);
    }
    let contractions: Vec<AltForm> = (0..point.len()).map(|i| big.contract_basis(i)).collect();
    let keys: Vec<Vec<usize>> = {
        let mut ks: Vec<Vec<usize>> = contractions.iter().flat_map(|c| c.coeffs.keys().cloned()).collect();
        ks.sort();
        ks.dedup();
        ks
    };
    let rows: Vec<Vec<Rational>> = contractions
        .iter()
        .map(|c| keys.iter().map(|k| c.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    let span = Rational::rank(&Matrix::from_rows_with_cols(&rows, keys.len()), 0.0);
    Ok(span - eqs.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    M,
    Z1,
}

/// Stratum document as written in model files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDocument {
    pub name: String,
    pub ambient: Ambient,
    #[serde(default = "one")]
    pub level: usize,
    #[serde(default)]
    pub equations: Vec<String>,
    #[serde(default)]
    pub inequations: Vec<String>,
    #[serde(default)]
    pub coframe_selection: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_equations: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<Vec<Rational>>,
}

fn one() -> usize {
    1
}

/// A declared stratum of `M` or of `Z_1`.
///
/// For `Z_1` strata of level `n > 1` the annihilator `Z_n` over the stratum
/// is the locus where unselected fiber coordinates vanish and the
/// `level_equations` hold; without `level_equations` the stratum equations
/// themselves cut it out.
#[derive(Clone, Debug)]
pub struct StratumSpec {
    pub name: String,
    pub ambient: Ambient,
    pub level: usize,
    pub equations: Vec<MultiPoly>,
    pub inequations: Vec<MultiPoly>,
    pub coframe_selection: Vec<usize>,
    pub level_equations: Option<Vec<MultiPoly>>,
    pub samples: Vec<Vec<Rational>>,
}

impl StratumSpec {
    pub fn from_document(doc: &StratumDocument, dist: &Distribution) -> Result<Self> {
        let vars = match doc.ambient {
            Ambient::M => dist.coords(),
            Ambient::Z1 => dist.z1_coords(),
        };
        let parse_all = |v: &[String]| v.iter().map(|e| MultiPoly::parse(e, vars)).collect::<Result<Vec<_>>>();
        let corank = dist.corank();
        let coframe_selection =
            if doc.coframe_selection.is_empty() && doc.level == 1 { (0..corank).collect() } else { doc.coframe_selection.clone() };
        let spec = StratumSpec {
            name: doc.name.clone(),
            ambient: doc.ambient,
            level: doc.level,
            equations: parse_all(&doc.equations)?,
            inequations: parse_all(&doc.inequations)?,
            coframe_selection,
            level_equations: doc.level_equations.as_deref().map(parse_all).transpose()?,
            samples: doc.samples.clone(),
        };
        spec.validate(dist)?;
        Ok(spec)
    }

    fn validate(&self, dist: &Distribution) -> Result<()> {
        let bad = |msg: String| Err(Error::Schema(format!("stratum `{}`: {msg}", self.name)));
        if self.level == 0 {
            return bad("level must be at least 1".into());
        }
        if self.ambient == Ambient::M && self.level != 1 {
            return bad("base strata have level 1".into());
        }
        if self.level > 1 && self.coframe_selection.is_empty() {
            return bad("coframe_selection must be nonempty above level 1".into());
        }
        if let Some(&i) = self.coframe_selection.iter().find(|&&i| i >= dist.corank()) {
            return bad(format!("coframe index {i} out of range (0-based, corank {})", dist.corank()));
        }
        if self.ambient == Ambient::Z1 {
            let fiber: Vec<usize> = (dist.dim()..dist.z1_dim()).collect();
            let all = self.equations.iter().chain(&self.inequations).chain(self.level_equations.iter().flatten());
            for f in all {
                let degs = f.degrees_in(&fiber);
                if degs.iter().any(|&d| d > 1) || degs.windows(2).any(|w| w[0] != w[1]) {
                    return bad(format!("`{f}` is not fiber-homogeneous of degree 0 or 1"));
                }
            }
        }
        let n = self.ambient_dim(dist);
        for s in &self.samples {
            check_len(n, s.len())?;
            self.check_contains(s, dist)?;
        }
        Ok(())
    }

    pub fn ambient_dim(&self, dist: &Distribution) -> usize {
        match self.ambient {
            Ambient::M => dist.dim(),
            Ambient::Z1 => dist.z1_dim(),
        }
    }

    /// Defining equations of the `Z_n` locus inside `Z_1`.
    pub fn locus_equations(&self, dist: &Distribution) -> Vec<MultiPoly> {
        if self.ambient == Ambient::M || self.level == 1 {
            return Vec::new();
        }
        let vars = dist.z1_coords();
        let mut eqs: Vec<MultiPoly> = (0..dist.corank())
            .filter(|i| !self.coframe_selection.contains(i))
            .map(|i| MultiPoly::var(vars, dist.dim() + i))
            .collect();
        eqs.extend(self.level_equations.clone().unwrap_or_else(|| self.equations.clone()));
        eqs
    }

    pub fn check_contains(&self, point: &[Rational], dist: &Distribution) -> Result<()> {
        check_len(self.ambient_dim(dist), point.len())?;
        let off = |reason: String| Err(Error::NotOnStratum { stratum: self.name.clone(), reason });
        for f in self.equations.iter().chain(&self.locus_equations(dist)) {
            let v = f.eval_unchecked(point);
            if !v.is_zero() {
                return off(format!("`{f}` = {v}"));
            }
        }
        for f in &self.inequations {
            if f.eval_unchecked(point).is_zero() {
                return off(format!("`{f}` vanishes"));
            }
        }
        Ok(())
    }

    /// Dimension of the stratum at a point, from the rank of the differentials
    /// of its equations together with those of its `Z_n` locus.
    pub fn dimension_at(&self, point: &[Rational], dist: &Distribution) -> Result<usize> {
        self.check_contains(point, dist)?;
        let mut eqs = self.equations.clone();
        eqs.extend(self.locus_equations(dist));
        let jac = differentials_at(&eqs, point);
        Ok(point.len() - Rational::rank(&jac, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annih::liouville_two_form;
    use crate::dist::lie_flag;
    use crate::models;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    fn martinet_level2() -> FunctionMatrix {
        FunctionMatrix::flag_level(&lie_flag(&models::martinet(), 2).unwrap(), 2).unwrap()
    }

    #[test]
    fn martinet_minor() {
        let fm = martinet_level2();
        let ms = minors(&fm, 3).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].to_string(), "-2*x2");
        assert_eq!(rank_at(&fm, &[q(0), q(0), q(0)]).unwrap(), 2);
        assert_eq!(rank_at(&fm, &[q(0), q(1), q(0)]).unwrap(), 3);
    }

    #[test]
    fn small_minors() {
        let vars = crate::symca::vars_from(&["x"]);
        let fm = FunctionMatrix::parse(&[vec!["1".into(), "0".into()], vec!["0".into(), "1".into()]], &vars).unwrap();
        assert_eq!(minors(&fm, 2).unwrap(), vec![MultiPoly::one(&vars)]);
        assert_eq!(minors(&fm, 1).unwrap().len(), 4);
        assert!(minors(&fm, 3).is_err());
        assert_eq!(rank_at(&fm, &[q(5)]).unwrap(), 2);
    }

    #[test]
    fn martinet_partition() {
        let fm = martinet_level2();
        let grid = Grid::parse("x2=-1:1:5", fm.vars()).unwrap();
        let r = partition_grid(&fm, &grid).unwrap();
        assert_eq!(r.histogram, BTreeMap::from([(2, 1), (3, 4)]));
        assert_eq!(r.grid_maximal_rank, 3);
        assert_eq!(r.sub_maximal_locus, vec![vec![q(0), q(0), q(0)]]);
        assert_eq!(r.locus_fixed_coordinates.get("x2"), Some(&q(0)));
    }

    #[test]
    fn engel_constant_rank() {
        let fm = FunctionMatrix::flag_level(&lie_flag(&models::engel(), 3).unwrap(), 3).unwrap();
        let grid = Grid::parse("x1={-2,0,1/3}; x2=-1:1:3; y2={0,7}", fm.vars()).unwrap();
        let r = partition_grid(&fm, &grid).unwrap();
        assert_eq!(r.histogram, BTreeMap::from([(4, 18)]));
        assert!(r.sub_maximal_locus.is_empty());
    }

    #[test]
    fn grid_errors() {
        let vars = models::martinet().coords().clone();
        assert!(Grid::parse("", &vars).is_err());
        assert!(Grid::parse("z=1", &vars).is_err());
        assert!(Grid::parse("x1=0:1:0", &vars).is_err());
        assert!(Grid::parse("x1=1;x1=2", &vars).is_err());
    }

    #[test]
    fn restricted_two_form_ranks() {
        let d = models::martinet();
        let w = liouville_two_form(&d);
        let vars = d.z1_coords().clone();
        let x2 = MultiPoly::parse("x2", &vars).unwrap();
        let p = [q(0), q(0), q(0), q(1)];
        assert_eq!(two_form_rank_on_subvariety(&w, std::slice::from_ref(&x2), &p).unwrap(), 2);
        assert_eq!(two_form_rank_by_wedge(&w, std::slice::from_ref(&x2), &p).unwrap(), 2);
        assert_eq!(two_form_rank_on_subvariety(&PolyTwoForm::zero(&vars), &[], &p).unwrap(), 0);
        assert_eq!(two_form_rank_on_subvariety(&w, &[], &p).unwrap(), 2);
        assert_eq!(two_form_rank_by_wedge(&w, &[], &p).unwrap(), 2);
        let off = [q(0), q(1), q(0), q(1)];
        assert!(matches!(two_form_rank_on_subvariety(&w, std::slice::from_ref(&x2), &off), Err(Error::NotOnStratum { .. })));
        assert!(matches!(two_form_rank_on_subvariety(&w, &[x2.clone(), x2], &p), Err(Error::DependentEquations)));
    }

    #[test]
    fn bundled_strata_parse() {
        let m = models::bundled("martinet").unwrap();
        let names: Vec<&str> = m.strata.iter().map(|s| s.name.as_str()).collect();
        assert!(names.contains(&"martinet-x2zero"));
        let s = m.stratum("martinet-x2zero").unwrap();
        assert_eq!(s.dimension_at(&s.samples[0], &m.dist).unwrap(), 3);
    }

    #[test]
    fn non_homogeneous_stratum_rejected() {
        let d = models::martinet();
        let doc = StratumDocument {
            name: "bad".into(),
            ambient: Ambient::Z1,
            level: 1,
            equations: vec!["a^2 - x2".into()],
            inequations: vec![],
            coframe_selection: vec![],
            level_equations: None,
            samples: vec![],
        };
        assert!(matches!(StratumSpec::from_document(&doc, &d), Err(Error::Schema(_))));
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=5, 1usize..=7).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-2i64..3, c), r))
    }

    proptest! {
        #[test]
        fn minors_agree_with_elimination(entries in small_matrix()) {
            let vars = crate::symca::vars_from(&["x"]);
            let rows: Vec<Vec<MultiPoly>> = entries
                .iter()
                .map(|r| r.iter().map(|&v| MultiPoly::constant(&vars, q(v))).collect())
                .collect();
            let fm = FunctionMatrix::from_rows(&vars, rows).unwrap();
            let rank = rank_at(&fm, &[q(0)]).unwrap();
            let max_k = (1..=fm.rows().min(fm.cols()))
                .filter(|&k| minors(&fm, k).unwrap().iter().any(|m| !m.is_zero()))
                .max()
                .unwrap_or(0);
            prop_assert_eq!(rank, max_k);
        }

        #[test]
        fn fiber_scaling_preserves_rank(c in prop::sample::select(vec![2i64, -1, 3, -5]), x1 in -3i64..4, y in -3i64..4) {
            let d = models::martinet();
            let w = liouville_two_form(&d);
            let vars = d.z1_coords().clone();
            let rows: Vec<Vec<MultiPoly>> = (0..4).map(|i| (0..4).map(|j| w.get(i, j)).collect()).collect();
            let fm = FunctionMatrix::from_rows(&vars, rows).unwrap();
            for x2 in [0, 1] {
                let p = [q(x1), q(x2), q(y), q(1)];
                let scaled = [q(x1), q(x2), q(y), q(c)];
                prop_assert_eq!(rank_at(&fm, &p).unwrap(), rank_at(&fm, &scaled).unwrap());
            }
        }
    }
}
