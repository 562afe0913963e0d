//! Distributions given by polynomial frames in graphical normal form, and
//! their Lie-theoretic invariants: the fast Lie flag, growth vectors, the
//! bracket-generating step and curvature.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::linalg::{LinearScalar, Matrix};
use crate::scalar::{Rational, Scalar};
use crate::symca::{lie_bracket, vars_from, MultiPoly, PolyOneForm, PolyVectorField, Vars};

/// Rank-`l` distribution on an open set of `ℝ^m` spanned by
/// `X_j = ∂x_j + Σ_i f^i_j ∂y_i`, with annihilator coframe
/// `α_i = dy_i − Σ_j f^i_j dx_j`.
///
/// The first `l` coordinates are horizontal, the remaining `m − l` vertical.
#[derive(Clone, Debug)]
pub struct Distribution {
    name: String,
    coords: Vars,
    rank: usize,
    frame: Vec<PolyVectorField>,
    coframe: Vec<PolyOneForm>,
    z1_coords: Vars,
}

impl Distribution {
    /// Validates the frame and either derives the coframe or checks the one
    /// supplied.
    pub fn new(
        name: impl Into<String>,
        coords: Vars,
        rank: usize,
        frame: Vec<PolyVectorField>,
        coframe: Option<Vec<PolyOneForm>>,
    ) -> Result<Self> {
        let m = coords.len();
        if rank == 0 || rank > m {
            return Err(Error::Schema(format!("rank {rank} is not in 1..={m}")));
        }
        check_len(rank, frame.len())?;
        for (j, x) in frame.iter().enumerate() {
            if x.vars() != &coords {
                return Err(Error::VariableMismatch);
            }
            for k in 0..rank {
                let expected = if k == j { Rational::one() } else { Rational::zero() };
                if x.component(k).as_constant() != Some(expected.clone()) {
                    return Err(Error::NonGraphical(format!(
                        "component {} of X{} is `{}`, expected {}",
                        coords[k],
                        j + 1,
                        x.component(k),
                        expected
                    )));
                }
            }
        }
        let derived: Vec<PolyOneForm> = (0..m - rank)
            .map(|i| {
                let mut coeffs = vec![MultiPoly::zero(&coords); m];
                coeffs[rank + i] = MultiPoly::one(&coords);
                for (j, x) in frame.iter().enumerate() {
                    coeffs[j] = -x.component(rank + i);
                }
                PolyOneForm::new(&coords, coeffs).expect("coframe built over the chart variables")
            })
            .collect();
        let coframe = match coframe {
            None => derived,
            Some(given) => {
                check_len(m - rank, given.len())?;
                for (i, a) in given.iter().enumerate() {
                    if a.vars() != &coords {
                        return Err(Error::VariableMismatch);
                    }
                    for k in 0..m - rank {
                        let expected = if k == i { Rational::one() } else { Rational::zero() };
                        if a.coeff(rank + k).as_constant() != Some(expected) {
                            return Err(Error::CoframePairing(format!(
                                "coframe element {} must have coefficient {} on d{}",
                                i + 1,
                                if k == i { 1 } else { 0 },
                                coords[rank + k]
                            )));
                        }
                    }
                    for (j, x) in frame.iter().enumerate() {
                        let p = a.pair(x)?;
                        if !p.is_zero() {
                            return Err(Error::CoframePairing(format!("α{}(X{}) = {}", i + 1, j + 1, p)));
                        }
                    }
                }
                given
            }
        };
        let z1_coords = annihilator_coords(&coords, m - rank);
        Ok(Distribution { name: name.into(), coords, rank, frame, coframe, z1_coords })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> &Vars {
        &self.coords
    }

    /// Ambient dimension `m`.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Rank `l`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `m − l`, the number of vertical coordinates and of coframe elements.
    pub fn corank(&self) -> usize {
        self.coords.len() - self.rank
    }

    /// Coordinates `(x, y, a)` of the annihilator bundle `Z_1`.
    pub fn z1_coords(&self) -> &Vars {
        &self.z1_coords
    }

    /// Dimension of `Z_1`, that is `m + (m − l)`.
    pub fn z1_dim(&self) -> usize {
        self.z1_coords.len()
    }

    pub fn frame(&self) -> &[PolyVectorField] {
        &self.frame
    }

    pub fn coframe(&self) -> &[PolyOneForm] {
        &self.coframe
    }

    /// Connection coefficient `f^i_j`, the `∂y_i` component of `X_j`.
    pub fn connection(&self, i: usize, j: usize) -> &MultiPoly {
        self.frame[j].component(self.rank + i)
    }

    /// Coefficients of the frame fields at a point, one row per field.
    pub fn frame_at<S: Scalar>(&self, point: &[S]) -> Result<Vec<Vec<S>>> {
        self.frame.iter().map(|x| x.eval(point)).collect()
    }

    /// Coframe coefficients at a point, one row per coframe element.
    pub fn coframe_at<S: Scalar>(&self, point: &[S]) -> Result<Vec<Vec<S>>> {
        self.coframe.iter().map(|a| a.eval(point)).collect()
    }
}

/// Fiber coordinates are `a` for corank one and `a1, a2, …` otherwise,
/// prefixed by `fib_` while they clash with a chart coordinate.
fn annihilator_coords(coords: &Vars, corank: usize) -> Vars {
    let mut prefix = String::new();
    loop {
        let names: Vec<String> = if corank == 1 {
            vec![format!("{prefix}a")]
        } else {
            (1..=corank).map(|i| format!("{prefix}a{i}")).collect()
        };
        if names.iter().all(|n| !coords.contains(n)) {
            let mut all: Vec<String> = coords.to_vec();
            all.extend(names);
            return vars_from(&all);
        }
        prefix.push_str("fib_");
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlagGenerator {
    /// Bracket word such as `[X1,[X1,X2]]`.
    pub word: String,
    #[serde(serialize_with = "serialize_field")]
    pub field: PolyVectorField,
}

fn serialize_field<S: serde::Serializer>(f: &PolyVectorField, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(f.dim()))?;
    for c in f.components() {
        seq.serialize_element(&c.to_string())?;
    }
    seq.end()
}

/// Generators of the fast Lie flag, level by level. `levels[n − 1]` holds all
/// generators of level `n` (so each level contains the previous one).
#[derive(Clone, Debug, Serialize)]
pub struct FlagReport {
    pub levels: Vec<Vec<FlagGenerator>>,
    /// Level after which no new generator appeared, if that happened.
    pub stabilized_at: Option<usize>,
    /// Pointwise ranks of each level, when evaluated at a point.
    pub ranks_at_point: Option<Vec<usize>>,
}

impl FlagReport {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &[FlagGenerator] {
        &self.levels[n - 1]
    }

    /// Matrix with the level-`n` generators as columns, evaluated at `point`.
    pub fn level_matrix_at<S: Scalar>(&self, n: usize, point: &[S]) -> Result<Matrix<S>> {
        let cols = self.level(n).iter().map(|g| g.field.eval(point)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(&cols, point.len()))
    }

    pub fn ranks_at(&self, point: &[Rational]) -> Result<Vec<usize>> {
        (1..=self.depth()).map(|n| Ok(Rational::rank(&self.level_matrix_at(n, point)?, 0.0))).collect()
    }

    /// Returns a copy with `ranks_at_point` filled in.
    pub fn evaluated_at(mut self, point: &[Rational]) -> Result<Self> {
        self.ranks_at_point = Some(self.ranks_at(point)?);
        Ok(self)
    }
}

/// Fast Lie flag `Γ^{(n+1)} = Γ^{(n)} + [Γ^{(n)}, Γ^{(n)}]` up to `max_step`
/// levels. Zero brackets and exact duplicates are dropped.
pub fn lie_flag(dist: &Distribution, max_step: usize) -> Result<FlagReport> {
    if max_step == 0 {
        return Err(Error::InvalidArgument("max_step must be at least 1".into()));
    }
    let first: Vec<FlagGenerator> = dist
        .frame
        .iter()
        .enumerate()
        .map(|(j, x)| FlagGenerator { word: format!("X{}", j + 1), field: x.clone() })
        .collect();
    let mut levels = vec![first];
    // Index of the first generator introduced at the current level.
    let mut new_from = 0;
    let mut stabilized_at = None;
    while levels.len() < max_step {
        let current = levels.last().unwrap();
        let mut next = current.clone();
        for j in new_from..current.len() {
            for i in 0..j {
                let b = lie_bracket(&current[i].field, &current[j].field)?;
                if b.is_zero() || next.iter().any(|g| g.field == b) {
                    continue;
                }
                next.push(FlagGenerator { word: format!("[{},{}]", current[i].word, current[j].word), field: b });
            }
        }
        if next.len() == current.len() {
            stabilized_at = Some(levels.len());
            break;
        }
        new_from = current.len();
        levels.push(next);
    }
    Ok(FlagReport { levels, stabilized_at, ranks_at_point: None })
}

/// Pointwise ranks `r_1 ≤ r_2 ≤ …` of the flag levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthVector(pub Vec<usize>);

impl GrowthVector {
    /// Smallest level at which the rank equals `m`.
    pub fn step(&self, m: usize) -> Option<usize> {
        self.0.iter().position(|&r| r == m).map(|i| i + 1)
    }
}

pub fn growth_vector_at(dist: &Distribution, point: &[Rational]) -> Result<GrowthVector> {
    growth_vector_with_step(dist, point, dist.dim())
}

/// Growth vector using at most `max_step` flag levels. Truncated once the
/// rank reaches `m` or the flag stops growing.
pub fn growth_vector_with_step(dist: &Distribution, point: &[Rational], max_step: usize) -> Result<GrowthVector> {
    check_len(dist.dim(), point.len())?;
    let flag = lie_flag(dist, max_step)?;
    growth_from_flag(&flag, dist.dim(), point)
}

pub fn growth_from_flag(flag: &FlagReport, m: usize, point: &[Rational]) -> Result<GrowthVector> {
    let mut ranks = Vec::new();
    for n in 1..=flag.depth() {
        let r = Rational::rank(&flag.level_matrix_at(n, point)?, 0.0);
        ranks.push(r);
        if r == m {
            break;
        }
    }
    Ok(GrowthVector(ranks))
}

#[derive(Clone, Debug, Serialize)]
pub struct PointStep {
    pub point: Vec<Rational>,
    pub growth: GrowthVector,
    pub step: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub per_point: Vec<PointStep>,
    /// Smallest and largest step over points where the flag generates.
    pub min_step: Option<usize>,
    pub max_step: Option<usize>,
    /// Every sample reached full rank within `max_step` levels.
    pub generated_everywhere: bool,
    /// Growth vectors differ between samples.
    pub non_regular: bool,
}

pub fn bracket_generating_step(dist: &Distribution, points: &[Vec<Rational>], max_step: usize) -> Result<StepReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("need at least one sample point".into()));
    }
    let flag = lie_flag(dist, max_step)?;
    let m = dist.dim();
    let per_point = points
        .iter()
        .map(|p| {
            check_len(m, p.len())?;
            let growth = growth_from_flag(&flag, m, p)?;
            let step = growth.step(m);
            Ok(PointStep { point: p.clone(), growth, step })
        })
        .collect::<Result<Vec<_>>>()?;
    let steps: Vec<usize> = per_point.iter().filter_map(|p| p.step).collect();
    let generated_everywhere = steps.len() == per_point.len();
    let non_regular = per_point.windows(2).any(|w| w[0].growth != w[1].growth);
    Ok(StepReport {
        min_step: steps.iter().copied().min(),
        max_step: steps.iter().copied().max(),
        per_point,
        generated_everywhere,
        non_regular,
    })
}

/// Curvature `(α_i([Ṽ, W̃])(q))_i` where `Ṽ = Σ v_j X_j` and `W̃ = Σ w_j X_j`
/// are the constant-coefficient extensions over the frame.
pub fn curvature_at(dist: &Distribution, point: &[Rational], v: &[Rational], w: &[Rational]) -> Result<Vec<Rational>> {
    curvature_with_frame(&dist.frame, &dist.coframe, point, v, w)
}

/// Curvature computed from an arbitrary spanning frame of the distribution.
pub fn curvature_with_frame(
    frame: &[PolyVectorField],
    coframe: &[PolyOneForm],
    point: &[Rational],
    v: &[Rational],
    w: &[Rational],
) -> Result<Vec<Rational>> {
    check_len(frame.len(), v.len())?;
    check_len(frame.len(), w.len())?;
    let vars = frame.first().map(|x| x.vars().clone()).ok_or_else(|| Error::InvalidArgument("empty frame".into()))?;
    check_len(vars.len(), point.len())?;
    let combine = |c: &[Rational]| {
        frame.iter().zip(c).fold(PolyVectorField::zero(&vars), |acc, (x, k)| acc.add(&x.scale(k)))
    };
    let b = lie_bracket(&combine(v), &combine(w))?;
    let bq = b.eval(point)?;
    coframe
        .iter()
        .map(|a| {
            let aq = a.eval(point)?;
            Ok(aq.iter().zip(&bq).map(|(x, y)| x * y).sum())
        })
        .collect()
}
