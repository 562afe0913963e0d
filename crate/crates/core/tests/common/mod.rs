//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use microreg::jets::{CurveJet, JetAmbient};
use microreg::symca::{MultiPoly, PolyOneForm, PolyVectorField, Vars};
use microreg::Rational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ num` and `1 ≤ q ≤ den`.
pub fn rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

pub fn nonzero_rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    loop {
        let r = rational(rng, num, den);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn vector(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rational(rng, 4, 3)).collect()
}

pub fn poly(rng: &mut impl Rng, vars: &Vars, max_degree: u32, terms: usize) -> MultiPoly {
    let n = vars.len();
    let terms: Vec<(Vec<u32>, Rational)> = (0..terms)
        .map(|_| {
            let mut exps = vec![0u32; n];
            let mut budget = rng.gen_range(0..=max_degree);
            while budget > 0 {
                exps[rng.gen_range(0..n)] += 1;
                budget -= 1;
            }
            (exps, rational(rng, 3, 2))
        })
        .collect();
    MultiPoly::from_terms(vars, terms)
}

pub fn field(rng: &mut impl Rng, vars: &Vars) -> PolyVectorField {
    PolyVectorField::new(vars, (0..vars.len()).map(|_| poly(rng, vars, 2, 3)).collect()).unwrap()
}

pub fn one_form(rng: &mut impl Rng, vars: &Vars) -> PolyOneForm {
    PolyOneForm::new(vars, (0..vars.len()).map(|_| poly(rng, vars, 2, 3)).collect()).unwrap()
}

pub fn control_jet(rng: &mut impl Rng, l: usize, r: usize) -> CurveJet {
    let taylor = (0..r).map(|_| vector(rng, l)).collect();
    CurveJet::new(JetAmbient::Controls, vector(rng, l), taylor).unwrap()
}

/// Polynomial controls of degree ≤ 3 in `t` with a nonzero linear term,
/// as strings, plus their coefficient table (`coeffs[j][k]` of `t^k`).
pub fn polynomial_controls(rng: &mut impl Rng, l: usize) -> (Vec<String>, Vec<Vec<i64>>) {
    let mut strings = Vec::new();
    let mut table = Vec::new();
    for _ in 0..l {
        let mut c: Vec<i64> = (0..4).map(|_| rng.gen_range(-2..=2)).collect();
        if c[1] == 0 {
            c[1] = 1;
        }
        strings.push(format!("{} + {}*t + {}*t^2 + {}*t^3", c[0], c[1], c[2], c[3]));
        table.push(c);
    }
    (strings, table)
}
