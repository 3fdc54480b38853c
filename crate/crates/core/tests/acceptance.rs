//! Acceptance criteria. Runs each check, prints one PASS/FAIL line per
//! criterion, and exits non-zero if any failed.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use onto_overlap::bounds::{corollary_bound, embedded_bound, scaling_sweep, theorem2_bound};
use onto_overlap::graph::{
    covering_set, hadamard_graph, hadamard_parity_class, independence_number,
    independent_set_lower_bound, orthogonality_graph, orthogonality_graph_with, sign_graph,
    AlphaStatus, DuplicatePolicy, MeasurementBasis,
};
use onto_overlap::ksqubit::{born_quadrature, overlap_grid, BlochVector, DEFAULT_RESOLUTION};
use onto_overlap::ontomodel::{
    born_check, max_total_overlap_lp, proposition1_search, Arithmetic, LpOptions, RandomModelShape,
};
use onto_overlap::states::{hadamard_family, PureState};
use onto_overlap::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn hadamard_structure() -> Check {
    let start = Instant::now();
    let g = hadamard_graph(4).map_err(|e| e.to_string())?;
    ensure(g.len() == 16, format!("{} vertices", g.len()))?;
    ensure(g.edge_count() == 48, format!("{} edges", g.edge_count()))?;
    ensure((0..16).all(|i| g.degree(i) == 6), "degrees are not all 6")?;
    let comps = g.components();
    ensure(comps.len() == 2, format!("{} components", comps.len()))?;
    let states: Vec<PureState> = hadamard_family(4)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|v| v.to_state())
        .collect();
    let generic = orthogonality_graph_with(&states, DuplicatePolicy::Allow, Execution::default())
        .map_err(|e| e.to_string())?;
    ensure(
        generic.edges() == g.edges(),
        "generic construction differs edge-for-edge",
    )?;
    within(start, Duration::from_secs(1))?;
    Ok("16 vertices, 48 edges, 6-regular, 2 components, matches generic graph".into())
}

fn independence() -> Check {
    let start = Instant::now();
    let g = hadamard_graph(4).map_err(|e| e.to_string())?;
    let r = independence_number(&g, Duration::from_secs(1));
    ensure(
        r.value == 4 && r.status == AlphaStatus::Exact,
        format!("alpha = {} ({:?})", r.value, r.status),
    )?;
    ensure(r.verify(&g), "witness is not independent")?;
    within(start, Duration::from_secs(1))?;
    let shell = independent_set_lower_bound(8).map_err(|e| e.to_string())?;
    let g8 = hadamard_graph(8).map_err(|e| e.to_string())?;
    ensure(
        shell.value == 18,
        format!("weight shell size {}", shell.value),
    )?;
    let w = shell.witness.as_ref().ok_or("no witness")?;
    ensure(
        w.len() == 18 && g8.is_independent(w),
        "weight-shell witness not independent in hadamard_graph(8)",
    )?;
    Ok(format!(
        "alpha(H4) = 4 exact in {:?}; weight shell of size 18 verified at d=8",
        r.elapsed
    ))
}

fn bb84() -> (Vec<PureState>, Vec<MeasurementBasis>) {
    let s = vec![
        PureState::from_real(&[1.0, 0.0]).unwrap(),
        PureState::from_real(&[0.0, 1.0]).unwrap(),
        PureState::from_real(&[1.0, 1.0]).unwrap(),
        PureState::from_real(&[1.0, -1.0]).unwrap(),
    ];
    let bases = vec![
        MeasurementBasis::new(0, s[..2].to_vec()).unwrap(),
        MeasurementBasis::new(1, s[2..].to_vec()).unwrap(),
    ];
    (s, bases)
}

fn tightness_d2() -> Check {
    let start = Instant::now();
    let (states, bases) = bb84();
    let opts = LpOptions {
        arithmetic: Arithmetic::Exact,
        ..LpOptions::default()
    };
    let out = max_total_overlap_lp(&states[0], &states, &bases, opts).map_err(|e| e.to_string())?;
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let alpha = independence_number(
        &orthogonality_graph(&states).map_err(|e| e.to_string())?,
        Duration::from_secs(1),
    );
    ensure(
        out.exact_value == Some(q(2, 1)),
        format!("value {:?}", out.exact_value),
    )?;
    ensure(
        alpha.value == 2 && alpha.status == AlphaStatus::Exact,
        "alpha != 2",
    )?;
    ensure(
        out.exact_pair_overlaps == Some(vec![q(1, 1), q(0, 1), q(1, 2), q(1, 2)]),
        format!("pair overlaps {:?}", out.exact_pair_overlaps),
    )?;
    within(start, Duration::from_secs(1))?;
    Ok("exact value 2 = alpha, pair overlaps (1, 0, 1/2, 1/2)".into())
}

fn theorem1_d4() -> Check {
    let start = Instant::now();
    let comp = hadamard_parity_class(4, false).map_err(|e| e.to_string())?;
    let g = sign_graph(&comp, Execution::default()).map_err(|e| e.to_string())?;
    ensure(
        g.len() == 8 && g.edge_count() == 24,
        "component is not 8 vertices / 24 edges",
    )?;
    let alpha = independence_number(&g, Duration::from_secs(60));
    ensure(
        alpha.value == 2 && alpha.status == AlphaStatus::Exact,
        format!("alpha = {}", alpha.value),
    )?;
    let cover = covering_set(&g).map_err(|e| e.to_string())?;
    cover.verify(&g).map_err(|e| e.to_string())?;
    let states: Vec<PureState> = comp.iter().map(|v| v.to_state()).collect();
    let psi = PureState::basis_vector(4, 0).map_err(|e| e.to_string())?;
    let opts = LpOptions {
        assignment_cap: 4096,
        ..LpOptions::default()
    };
    let out = max_total_overlap_lp(&psi, &states, &cover.bases, opts).map_err(|e| e.to_string())?;
    ensure(out.value <= 2.0 + 1e-9, format!("LP value {}", out.value))?;
    ensure(
        born_check(&out.model) < 1e-9,
        "witness misses Born statistics",
    )?;
    ensure(
        out.stats.duality_gap <= 1e-9,
        format!("duality gap {}", out.stats.duality_gap),
    )?;
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "LP value {:.12} <= alpha = 2 ({} covering bases, {} assignments)",
        out.value,
        cover.len(),
        out.stats.assignments
    ))
}

fn bound_formulas() -> Check {
    for k in 1..=16 {
        let d = 4 * k;
        for eps in [0.1, 0.5, 1.0] {
            let (v, _) = theorem2_bound(d, eps).map_err(|e| e.to_string())?;
            let want = 2.0 * (2.0f64 - eps).powi(d as i32) * d as f64 / 2f64.powi(d as i32);
            ensure(
                (v - want).abs() <= 1e-9 * want,
                format!("d={d} eps={eps}: {v} vs {want}"),
            )?;
        }
    }
    ensure(
        corollary_bound(4.0, 16, 0.25).map_err(|e| e.to_string())? == 2.0,
        "corollary(4,16,1/4) != 2",
    )?;
    ensure(
        embedded_bound(6, 0.5).map_err(|e| e.to_string())?.d_tilde == 4,
        "d_tilde(6) != 4",
    )?;
    let rows = scaling_sweep(&(4..=64).collect::<Vec<_>>(), 0.5, Execution::default())
        .map_err(|e| e.to_string())?;
    for r in &rows {
        let want = 4.0 / (r.d as f64 - 1.0);
        ensure(
            r.barrett_comparison == want,
            format!("d={}: comparison {}", r.d, r.barrett_comparison),
        )?;
    }
    Ok("theorem-2 closed forms agree to 1e-9 for d = 4..64, eps in {0.1, 0.5, 1}; corollary, embedding and 4/(d-1) column exact".into())
}

fn proposition1_suite() -> Check {
    let s = proposition1_search(
        20_240_601,
        1000,
        &RandomModelShape::default(),
        Execution::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(s.models == 1000, format!("{} models", s.models))?;
    ensure(
        s.max_born_deviation < 1e-9,
        format!(
            "random models miss Born statistics by {}",
            s.max_born_deviation
        ),
    )?;
    ensure(
        s.violations == 0,
        format!("{} violations, max excess {}", s.violations, s.max_excess),
    )?;
    Ok(format!(
        "{} models, {} measure-one sets checked, 0 violations (max excess {:.2e})",
        s.models, s.checks, s.max_excess
    ))
}

fn ks_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut unit = || {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let p: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).sqrt();
        BlochVector::normalized(r * p.cos(), r * p.sin(), z).unwrap()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, psi) = (unit(), unit());
        let got = born_quadrature(&a, &psi, DEFAULT_RESOLUTION).map_err(|e| e.to_string())?;
        worst = worst.max((got - (1.0 + a.dot(&psi)) / 2.0).abs());
    }
    ensure(worst <= 1e-6, format!("Born error {worst}"))?;
    let rows =
        overlap_grid(50, DEFAULT_RESOLUTION, Execution::default()).map_err(|e| e.to_string())?;
    for r in &rows {
        ensure(
            r.classical <= r.quantum + 1e-6,
            format!("L_C > L_Q at theta = {}", r.theta),
        )?;
    }
    ensure(
        rows.windows(2).all(|w| w[1].classical < w[0].classical),
        "L_C not decreasing",
    )?;
    ensure((rows[0].classical - 1.0).abs() <= 1e-6, "L_C(0) != 1")?;
    ensure(rows[49].classical.abs() <= 1e-6, "L_C(pi) != 0")?;
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "Born error {worst:.1e} over 100 pairs; L_C <= L_Q, decreasing, endpoints 1 and 0"
    ))
}

fn vacuity() -> Check {
    let rows = scaling_sweep(&[4, 8], 0.5, Execution::default()).map_err(|e| e.to_string())?;
    ensure(
        rows.iter().all(|r| r.vacuous),
        "d=4 or d=8 not flagged vacuous",
    )?;
    ensure(
        (rows[0].theorem2_value - 2.53125).abs() < 1e-9,
        format!("d=4 value {}", rows[0].theorem2_value),
    )?;
    ensure(
        (rows[1].theorem2_value - 16.0 * 0.75f64.powi(8)).abs() < 1e-9,
        format!("d=8 value {}", rows[1].theorem2_value),
    )?;
    ensure(
        rows[0].alpha_lower_bound == Some(2) && rows[1].alpha_lower_bound == Some(18),
        "weight-shell bound missing",
    )?;
    Ok(format!(
        "d=4 value {:.4}, d=8 value {:.4}, both vacuous; weight-shell alpha >= 2 and >= 18 reported",
        rows[0].theorem2_value, rows[1].theorem2_value
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("hadamard structure", hadamard_structure),
        ("independence number", independence),
        ("overlap LP tightness at d=2", tightness_d2),
        ("overlap LP at d=4", theorem1_d4),
        ("bound formulas", bound_formulas),
        ("measure-one property suite", proposition1_suite),
        ("hemisphere qubit model", ks_oracle),
        ("vacuity flags", vacuity),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({:?})", k + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
