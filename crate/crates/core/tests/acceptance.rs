//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, exit status
//! nonzero if any criterion fails. Tolerances and time limits are pinned in
//! the constants next to each check.

mod common;

use std::time::{Duration, Instant};

use microreg::annih::{
    characteristic_kernel, integrate_characteristic, liouville_two_form, verify_corank, verify_lifting_identity,
    CovectorPoint,
};
use microreg::dist::{growth_vector_at, Distribution};
use microreg::endpoint::{
    classify_curve, deform_fixed_endpoints, lift_curve_until, variational_jacobian, Bump, ClassifyOptions, ControlCurve,
    Verdict,
};
use microreg::jets::{
    dimension_audit, ehresmann_jet_lift, is_characteristic_jet, is_horizontal_jet, jet_project,
    lift_parametrization_rank, rho_act, CurveJet, JetAmbient,
};
use microreg::models;
use microreg::strata::{minors, partition_grid, two_form_rank_by_wedge, two_form_rank_on_subvariety, FunctionMatrix, Grid};
use microreg::symca::{exterior_derivative, interior_product, lie_bracket, MultiPoly, PolyOneForm, PolyVectorField, vars_from};
use microreg::{Error, Rational};
use rand::Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64) -> Rational {
    Rational::integer(n)
}

fn all_models() -> Vec<Distribution> {
    vec![models::heisenberg(), models::martinet(), models::engel()]
}

// ---------------------------------------------------------------- 1

/// `(L_X α)_j = Σ_i X_i ∂_i α_j + α_i ∂_j X_i`, written out independently.
fn lie_derivative_oracle(x: &PolyVectorField, a: &PolyOneForm) -> PolyOneForm {
    let n = x.dim();
    let coeffs = (0..n)
        .map(|j| {
            let mut acc = MultiPoly::zero(x.vars());
            for i in 0..n {
                acc = &acc + &(x.component(i) * &a.coeff(j).derivative(i));
                acc = &acc + &(a.coeff(i) * &x.component(i).derivative(j));
            }
            acc
        })
        .collect();
    PolyOneForm::new(x.vars(), coeffs).unwrap()
}

fn exact_algebra() -> Check {
    const CASES: usize = 200;
    let vars = vars_from(&["u", "v", "w"]);
    let mut rng = common::rng(1);
    for _ in 0..CASES {
        let (x, y) = (common::field(&mut rng, &vars), common::field(&mut rng, &vars));
        let xy = lie_bracket(&x, &y).unwrap();
        let yx = lie_bracket(&y, &x).unwrap();
        ensure(xy.add(&yx).is_zero(), || format!("antisymmetry fails for {x} and {y}"))?;
    }
    for _ in 0..CASES {
        let (x, y, z) = (common::field(&mut rng, &vars), common::field(&mut rng, &vars), common::field(&mut rng, &vars));
        let b = |p: &PolyVectorField, r: &PolyVectorField| lie_bracket(p, r).unwrap();
        let jac = b(&x, &b(&y, &z)).add(&b(&y, &b(&z, &x))).add(&b(&z, &b(&x, &y)));
        ensure(jac.is_zero(), || "Jacobi identity fails".into())?;
    }
    for _ in 0..CASES {
        let f = common::poly(&mut rng, &vars, 4, 5);
        ensure(exterior_derivative(&PolyOneForm::exact(&f)).is_zero(), || format!("d(df) ≠ 0 for {f}"))?;
    }
    for _ in 0..CASES {
        let x = common::field(&mut rng, &vars);
        let a = common::one_form(&mut rng, &vars);
        let cartan = interior_product(&x, &exterior_derivative(&a)).unwrap().add(&PolyOneForm::exact(&a.pair(&x).unwrap()));
        ensure(cartan == lie_derivative_oracle(&x, &a), || "Cartan formula fails".into())?;
    }
    Ok(format!("{CASES} cases each of antisymmetry, Jacobi, d² = 0, Cartan"))
}

// ---------------------------------------------------------------- 2

/// Rank by plain fraction elimination, independent of the library routine.
fn oracle_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[rank][c];
                let pivot = rows[rank].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// All brackets of all pairs at every level, no pruning.
fn oracle_growth(dist: &Distribution, point: &[Rational]) -> Vec<usize> {
    let m = dist.dim();
    let mut level: Vec<PolyVectorField> = dist.frame().to_vec();
    let mut growth = Vec::new();
    for _ in 0..m {
        let rows: Vec<Vec<Rational>> = level.iter().map(|f| f.eval(point).unwrap()).collect();
        let r = oracle_rank(rows);
        growth.push(r);
        if r == m {
            break;
        }
        let mut next = level.clone();
        for a in &level {
            for b in &level {
                let c = lie_bracket(a, b).unwrap();
                if !c.is_zero() {
                    next.push(c);
                }
            }
        }
        level = next;
    }
    growth
}

fn growth_vectors() -> Check {
    const POINTS: usize = 25;
    let mut rng = common::rng(2);
    let cases: [(Distribution, &dyn Fn(&[Rational]) -> Vec<usize>); 3] = [
        (models::heisenberg(), &|_| vec![2, 3]),
        (models::martinet(), &|p| if p[1].is_zero() { vec![2, 2, 3] } else { vec![2, 3] }),
        (models::engel(), &|_| vec![2, 3, 4]),
    ];
    for (dist, expected) in &cases {
        for k in 0..POINTS {
            let mut p = common::vector(&mut rng, dist.dim());
            if dist.name() == "martinet" && k % 3 == 0 {
                p[1] = Rational::zero();
            }
            let got = growth_vector_at(dist, &p).unwrap().0;
            let oracle = oracle_growth(dist, &p);
            ensure(got == expected(&p) && got == oracle, || {
                format!("{} at {p:?}: library {got:?}, oracle {oracle:?}, expected {:?}", dist.name(), expected(&p))
            })?;
        }
    }
    Ok(format!("{POINTS} points per model agree with brute-force expansion"))
}

// ---------------------------------------------------------------- 3

fn jet_lift_formulas() -> Check {
    const JETS: usize = 100;
    let mut rng = common::rng(3);
    for dist in all_models() {
        for _ in 0..JETS {
            let r = rng.gen_range(1..=8);
            let c = common::control_jet(&mut rng, dist.rank(), r);
            let v = common::vector(&mut rng, dist.corank());
            let lifted = ehresmann_jet_lift(&dist, &c, &v).unwrap();
            ensure(jet_project(&dist, &lifted).unwrap() == c, || format!("{}: projection is not a left inverse", dist.name()))?;
            ensure(is_horizontal_jet(&dist, &lifted).unwrap().horizontal, || format!("{}: lift not horizontal", dist.name()))?;
            let a = lift_parametrization_rank(&dist, &c, &v).unwrap();
            let (l, m) = (dist.rank(), dist.dim());
            ensure(a.control_rank == l * r && a.jacobian_rank == l * r + m, || {
                format!("{} r={r}: control rank {} (want {}), total {} (want {})", dist.name(), a.control_rank, l * r, a.jacobian_rank, l * r + m)
            })?;
        }
    }
    Ok(format!("{JETS} jets per model, r ≤ 8, with parametrization ranks l·r and l·r + m"))
}

// ---------------------------------------------------------------- 4

fn rho_equivariance() -> Check {
    const JETS: usize = 50;
    let scalars = [q(2), q(-1), Rational::new(1, 3)];
    let mut rng = common::rng(4);
    for dist in all_models() {
        for _ in 0..JETS {
            let r = rng.gen_range(1..=6);
            let c = common::control_jet(&mut rng, dist.rank(), r);
            let v = common::vector(&mut rng, dist.corank());
            let lifted = ehresmann_jet_lift(&dist, &c, &v).unwrap();
            for a in &scalars {
                let lhs = ehresmann_jet_lift(&dist, &rho_act(a, &c).unwrap(), &v).unwrap();
                ensure(lhs == rho_act(a, &lifted).unwrap(), || format!("{}: equivariance fails for a = {a}", dist.name()))?;
            }
        }
    }
    Ok(format!("{JETS} jets per model, r ≤ 6, a ∈ {{2, −1, 1/3}}"))
}

// ---------------------------------------------------------------- 5

fn formal_numeric_consistency() -> Check {
    const CONTROLS: usize = 20;
    const T: f64 = 0.01;
    const STEP: f64 = 1e-4;
    const ORDER: usize = 4;
    const REL_TOL: f64 = 1e-6;
    let mut rng = common::rng(5);
    let mut worst: f64 = 0.0;
    for dist in all_models() {
        for _ in 0..CONTROLS {
            let (strings, table) = common::polynomial_controls(&mut rng, dist.rank());
            let control = ControlCurve::polynomial(&strings.iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
            let vbase = common::vector(&mut rng, dist.corank());
            let jet = CurveJet::new(
                JetAmbient::Controls,
                table.iter().map(|c| q(c[0])).collect(),
                (1..=ORDER).map(|k| table.iter().map(|c| q(*c.get(k).unwrap_or(&0))).collect()).collect(),
            )
            .unwrap();
            let formal = ehresmann_jet_lift(&dist, &jet, &vbase).unwrap();
            let formal_at: Vec<f64> = formal.eval(&Rational::from_f64_exact(T).unwrap()).iter().map(Rational::to_f64).collect();
            let base: Vec<f64> = formal.base().iter().map(Rational::to_f64).collect();
            let path = lift_curve_until(&dist, &control, &base, T, STEP).unwrap();
            let numeric = path.states.last().unwrap();
            let diff = numeric.iter().zip(&formal_at).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let disp = formal_at.iter().zip(&base).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let rel = diff / disp;
            worst = worst.max(rel);
            ensure(rel < REL_TOL, || format!("{}: relative error {rel:e} for controls {strings:?}", dist.name()))?;
        }
    }
    Ok(format!("{CONTROLS} controls per model, worst relative error {worst:.2e} < {REL_TOL:e}"))
}

// ---------------------------------------------------------------- 6

fn contact_has_no_abnormals() -> Check {
    const COVECTORS: usize = 100;
    let dist = models::heisenberg();
    let mut rng = common::rng(6);
    for _ in 0..COVECTORS {
        let cp = CovectorPoint::new(common::vector(&mut rng, 3), vec![common::nonzero_rational(&mut rng, 5, 4)]);
        let k = characteristic_kernel(&dist, &cp).unwrap();
        ensure(k.rank == 0, || format!("kernel rank {} at {cp:?}", k.rank))?;
        let c = verify_corank(&dist, &cp).unwrap();
        ensure(c.equal && c.corank_liouville == 0, || format!("corank mismatch {c:?}"))?;
    }
    Ok(format!("rank 0 and equal coranks at {COVECTORS} covectors"))
}

// ---------------------------------------------------------------- 7

fn singular_curves() -> Check {
    const ENTRY_TOL: f64 = 1e-8;
    const SIGMA_MIN: f64 = 1e-3;
    let line = ControlCurve::polynomial(&["t", "0"]).unwrap();
    let diag = ControlCurve::polynomial(&["t", "t"]).unwrap();
    let x2 = ControlCurve::polynomial(&["0", "t"]).unwrap();
    let j = variational_jacobian(&models::martinet(), &line, &[0.0; 3], 12, 1e-5, 1e-3).unwrap();
    ensure(j.max_abs_entry() < ENTRY_TOL, || format!("Martinet line Jacobian entry {:e}", j.max_abs_entry()))?;
    let cases = [
        ("martinet line", models::martinet(), &line, vec![0.0; 3], Verdict::Singular),
        ("engel X2 curve", models::engel(), &x2, vec![0.0; 4], Verdict::Singular),
        ("heisenberg line", models::heisenberg(), &line, vec![0.0; 3], Verdict::Regular),
        ("martinet (t,t)", models::martinet(), &diag, vec![0.0; 3], Verdict::Regular),
    ];
    let mut summary = Vec::new();
    for (name, dist, curve, base, want) in &cases {
        let n = 6 * dist.corank();
        for (dirs, h_fd) in [(n, 1e-5), (2 * n, 1e-5), (n, 5e-6), (2 * n, 5e-6)] {
            let opts = ClassifyOptions { directions: Some(dirs), h_fd, ..ClassifyOptions::default() };
            let r = classify_curve(dist, curve, base, &opts).unwrap();
            ensure(r.verdict == *want, || format!("{name} with N={dirs}, h_fd={h_fd:e}: {:?}", r.verdict))?;
            if *want == Verdict::Regular {
                ensure(r.sigma_min > SIGMA_MIN, || format!("{name}: σ_min {:e}", r.sigma_min))?;
            }
            if dirs == n && h_fd == 1e-5 {
                summary.push(format!("{name} σ_min {:.1e}", r.sigma_min));
            }
        }
    }
    Ok(format!("verdicts stable under N → 2N and h_fd → h_fd/2 ({})", summary.join(", ")))
}

// ---------------------------------------------------------------- 8

fn hsu_integration() -> Check {
    const SUP_TOL: f64 = 1e-9;
    let m = models::bundled("martinet").unwrap();
    let s = m.stratum("martinet-x2zero").unwrap();
    let cp = CovectorPoint::new(vec![q(0), q(0), q(0)], vec![q(1)]);
    let traj = integrate_characteristic(&m.dist, &cp, s, 1.0, 1e-3).map_err(|e| e.to_string())?;
    ensure(traj.completed(), || format!("halted: {:?}", traj.halt_reason))?;
    ensure((traj.times.last().unwrap() - 1.0).abs() < 1e-12, || "did not reach T = 1".into())?;
    let mut sup: f64 = 0.0;
    for (t, p) in traj.times.iter().zip(traj.projected(3)) {
        sup = sup.max((p[0] - t).abs()).max(p[1].abs()).max(p[2].abs());
    }
    ensure(sup < SUP_TOL, || format!("sup error {sup:e}"))?;
    let mut taylor = vec![vec![q(1), q(0), q(0), q(0)]];
    taylor.extend(std::iter::repeat_n(vec![q(0); 4], 3));
    let jet = CurveJet::new(JetAmbient::Z1, vec![q(0), q(0), q(0), q(1)], taylor).unwrap();
    let check = is_characteristic_jet(&m.dist, &jet).unwrap();
    ensure(check.characteristic && check.projection_horizontal, || format!("jet test {check:?}"))?;
    Ok(format!("sup error {sup:.1e}; the 4-jet (t, 0, 0, 1) is characteristic"))
}

// ---------------------------------------------------------------- 9

fn lifting_identity() -> Check {
    const COVECTORS: usize = 50;
    let mut rng = common::rng(9);
    let engel = models::bundled("engel").unwrap();
    let z2 = engel.stratum("engel-z2").unwrap();
    let martinet = models::bundled("martinet").unwrap();
    let fiber = martinet.stratum("martinet-x2zero").unwrap();
    for _ in 0..COVECTORS {
        let base = common::vector(&mut rng, 4);
        let a2 = common::nonzero_rational(&mut rng, 5, 3);
        let a1 = -(&base[0] * &a2);
        let cp = CovectorPoint::new(base, vec![a1, a2]);
        let r = verify_lifting_identity(&engel.dist, &cp, z2).unwrap();
        ensure(r.holds, || format!("Engel Z_2 at {cp:?}: {r:?}"))?;
        let mut base = common::vector(&mut rng, 3);
        base[1] = Rational::zero();
        let cp = CovectorPoint::new(base, vec![common::nonzero_rational(&mut rng, 5, 3)]);
        let r = verify_lifting_identity(&martinet.dist, &cp, fiber).unwrap();
        ensure(r.holds, || format!("Martinet fiber at {cp:?}: {r:?}"))?;
    }
    Ok(format!("exact equality at {COVECTORS} covectors on each locus"))
}

// ---------------------------------------------------------------- 10

fn dimension_audits() -> Check {
    let mut lines = Vec::new();
    for name in ["martinet", "engel"] {
        let model = models::bundled(name).unwrap();
        let (l, m) = (model.dist.rank() as i64, model.dist.dim() as i64);
        let rows = dimension_audit(&model, 2, 12).unwrap();
        for row in &rows {
            let r = row.r as i64;
            ensure(row.dim_horizontal as i64 == l * r + m, || format!("{name} r={r}: dim {}", row.dim_horizontal))?;
            ensure(row.paper_bound_tangency as i64 == (l - 1) * (r - 1) + 2 * m, || format!("{name}: tangency bound"))?;
            ensure(row.codim_lower_bound == r - 2 * m - 1, || format!("{name}: codim bound"))?;
            for s in &row.strata {
                if row.codim_lower_bound > 0 {
                    ensure(s.codim >= row.codim_lower_bound, || {
                        format!("{name} r={r} {}: codim {} below bound {}", s.name, s.codim, row.codim_lower_bound)
                    })?;
                }
            }
        }
        for w in rows.windows(2) {
            for (a, b) in w[0].strata.iter().zip(&w[1].strata) {
                let want = l - a.direction_rank as i64;
                ensure(b.codim - a.codim == want && want >= 1, || {
                    format!("{name} {}: codim {} → {} (want +{want})", a.name, a.codim, b.codim)
                })?;
            }
        }
        lines.push(format!("{name} {} strata", rows[0].strata.len()));
    }
    Ok(format!("r = 2..12, {}", lines.join(", ")))
}

// ---------------------------------------------------------------- 11

fn rank_stratification() -> Check {
    let martinet = models::bundled("martinet").unwrap();
    let dist = &martinet.dist;
    let flag = microreg::dist::lie_flag(dist, 3).unwrap();
    let fm = FunctionMatrix::flag_level(&flag, 2).unwrap();
    let grid = Grid::parse("x1={-1,0,1/2}; x2={-1,-1/2,0,1/2,1}; y={0,2}", dist.coords()).unwrap();
    let report = partition_grid(&fm, &grid).unwrap();
    ensure(report.grid_maximal_rank == 3, || format!("grid-maximal rank {}", report.grid_maximal_rank))?;
    for p in &report.points {
        let on_locus = p.point[1].is_zero();
        ensure((p.rank < 3) == on_locus, || format!("rank {} at {:?}", p.rank, p.point))?;
    }
    ensure(report.locus_fixed_coordinates.get("x2") == Some(&Rational::zero()), || "locus not identified as x2 = 0".into())?;
    let ms = minors(&fm, 3).unwrap();
    ensure(ms.len() == 1 && ms[0] == MultiPoly::parse("-2*x2", dist.coords()).unwrap(), || format!("minors {ms:?}"))?;

    let mut rng = common::rng(11);
    let mut cases = 0;
    let engel = models::engel();
    let subjects: [(&Distribution, &str); 2] = [(dist, "x2"), (&engel, "a1 + x1*a2")];
    for (d, eq) in subjects {
        let omega = liouville_two_form(d);
        let eqs = vec![MultiPoly::parse(eq, d.z1_coords()).unwrap()];
        for _ in 0..10 {
            let mut z = common::vector(&mut rng, d.z1_dim());
            if d.name() == "martinet" {
                z[1] = Rational::zero();
            } else {
                z[5] = common::nonzero_rational(&mut rng, 4, 3);
                z[4] = -(&z[0] * &z[5]);
            }
            let direct = two_form_rank_on_subvariety(&omega, &eqs, &z).unwrap();
            let wedge = two_form_rank_by_wedge(&omega, &eqs, &z).unwrap();
            ensure(direct == wedge, || format!("{} at {z:?}: direct {direct}, wedge {wedge}", d.name()))?;
            cases += 1;
        }
    }
    Ok(format!("sub-maximal locus is exactly x2 = 0 on {} points; minor −2·x2; {cases} wedge cross-checks", report.points.len()))
}

// ---------------------------------------------------------------- 12

fn microflexibility() -> Check {
    const STEPS: usize = 10;
    const DRIFT_TOL: f64 = 1e-9;
    const RESIDUAL_TOL: f64 = 1e-8;
    let line = ControlCurve::polynomial(&["t", "0"]).unwrap();
    let bump = Bump { channel: 1, frequency: 1.0 };
    let opts = ClassifyOptions::default();
    let d = deform_fixed_endpoints(&models::heisenberg(), &line, &[0.0; 3], bump, 0.5, STEPS, &opts)
        .map_err(|e| e.to_string())?;
    ensure(d.paths.len() == STEPS, || format!("{} paths", d.paths.len()))?;
    for p in &d.paths {
        let e = p.states.last().unwrap();
        let drift = (e[0] - 1.0).abs().max(e[1].abs()).max(e[2].abs());
        ensure(drift < DRIFT_TOL, || format!("endpoint {e:?}"))?;
        ensure(p.max_residual_overall() < RESIDUAL_TOL, || format!("residual {:e}", p.max_residual_overall()))?;
    }
    let moved = d.parameters.last().unwrap()[0];
    ensure(moved != 0.0, || "correction parameter did not move".into())?;
    match deform_fixed_endpoints(&models::martinet(), &line, &[0.0; 3], bump, 0.5, STEPS, &opts) {
        Err(Error::NotRegular(_)) => {}
        other => return Err(format!("Martinet line: expected a regularity error, got {:?}", other.map(|d| d.endpoint_drift))),
    }
    Ok(format!("{STEPS} paths, drift {:.1e}; Martinet line rejected as not regular", d.endpoint_drift))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 12] = [
        ("exact algebra identities", Duration::from_secs(5), exact_algebra),
        ("growth vectors", Duration::from_secs(5), growth_vectors),
        ("jet-lift formulas", Duration::from_secs(10), jet_lift_formulas),
        ("rho-equivariance of the jet lift", Duration::from_secs(10), rho_equivariance),
        ("formal and numerical lifts agree", Duration::from_secs(10), formal_numeric_consistency),
        ("contact structure has no abnormal directions", Duration::from_secs(10), contact_has_no_abnormals),
        ("known singular curves detected", Duration::from_secs(30), singular_curves),
        ("characteristic integration", Duration::from_secs(10), hsu_integration),
        ("lifting identity", Duration::from_secs(10), lifting_identity),
        ("dimension audit", Duration::from_secs(5), dimension_audits),
        ("rank stratification", Duration::from_secs(10), rank_stratification),
        ("fixed-endpoint deformation", Duration::from_secs(10), microflexibility),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
