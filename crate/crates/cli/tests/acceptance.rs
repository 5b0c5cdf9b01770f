//! Acceptance suite. Prints one `criterion N: PASS|FAIL` line per criterion and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a subset.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regwatch::criterion::CriterionSpec;
use regwatch::geometry::{criterion_field, CriterionKind, FlowFields, DEFAULT_DIRECTION_FLOOR};
use regwatch::norms::{cylinder_mask, mixed_norm, sobolev_norm, spatial_norm};
use regwatch::solver::initial::{abc, random_divfree};
use regwatch::solver::{nonlinear_rotational, simulate, InitialCondition, Integrator, SolverConfig};
use regwatch::spectral::{ScalarField, VectorSpectrum};
use regwatch::verify::exponents::{gradient_powers, lambda_powers, time_exponent, vorticity_powers};
use regwatch::verify::{
    energy_balance_residual, gronwall_envelope, holder_at, local_energy_residual, pq_exponents,
    ResidualScheme, SpaceBump, TestFunction, TimeProfile,
};
use regwatch::{Exponent, Grid64};

type Check = Result<String, String>;
type R = Ratio<i64>;

const FLOOR: f64 = DEFAULT_DIRECTION_FLOOR;

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn relative_l2(grid: &Grid64, a: &VectorSpectrum<f64>, b: &VectorSpectrum<f64>) -> Result<f64, String> {
    let diff = a.add_scaled(b, -1.0);
    let num = grid.l2_norm_squared(&diff).map_err(fail)?;
    let den = grid.l2_norm_squared(b).map_err(fail)?;
    Ok((num / den).sqrt())
}

fn beltrami() -> Check {
    let started = Instant::now();
    let (n, dt, steps) = (32, 1e-3, 1000);
    let grid = Grid64::new(n).map_err(fail)?;
    let v0 = abc(&grid, 1.0, 1.0, 1.0).map_err(fail)?;
    let integrator = Integrator::new(&grid, dt, 1.0).map_err(fail)?;
    let kinds = [
        CriterionKind::KappaBeta { beta: 1.0 },
        CriterionKind::KappaBeta { beta: 1.5 },
        CriterionKind::KappaBeta { beta: 2.0 },
        CriterionKind::Kappa,
        CriterionKind::Eta,
        CriterionKind::WeightedKappa { b: 0.5 },
        CriterionKind::WeightedKappa { b: 1.0 },
    ];
    let (mut worst_dev, mut worst_nl, mut worst_field) = (0.0f64, 0.0f64, 0.0f64);
    let mut v = v0.clone();
    for s in 0..=steps {
        if s > 0 {
            v = integrator.step(&v).map_err(fail)?.velocity;
        }
        let t = s as f64 * dt;
        worst_dev = worst_dev.max(relative_l2(&grid, &v, &v0.scale((-t).exp()))?);
        if s % 10 == 0 {
            worst_nl = worst_nl.max(nonlinear_rotational(&grid, &v).map_err(fail)?.max_abs());
            for kind in kinds {
                let field = criterion_field(&grid, &v, kind, FLOOR).map_err(fail)?;
                worst_field = worst_field.max(field.values.max_abs());
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(
        worst_dev <= 1e-8 && worst_nl <= 1e-12 && worst_field <= 1e-12 && elapsed <= Duration::from_secs(120),
        format!(
            "max deviation {worst_dev:.2e} (≤ 1e-8), nonlinear {worst_nl:.2e} (≤ 1e-12), \
             criterion fields {worst_field:.2e} (≤ 1e-12), {:.1}s (≤ 120s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn energy_identity() -> Check {
    let run = |dt: f64| {
        let mut cfg = SolverConfig::new(64, dt, 0.1, InitialCondition::TaylorGreen { amplitude: 1.0 });
        cfg.diagnostic_betas = vec![1.0, 2.0];
        cfg.snapshot_stride = usize::MAX;
        simulate(&cfg).map_err(fail)
    };
    let coarse = run(1e-3)?;
    let fine = run(5e-4)?;
    let mut ok = true;
    let mut detail = String::new();
    for beta in [1.0, 2.0] {
        let a = energy_balance_residual(&coarse, beta, ResidualScheme::FourthOrder).map_err(fail)?.relative;
        let b = energy_balance_residual(&fine, beta, ResidualScheme::FourthOrder).map_err(fail)?.relative;
        ok &= a <= 1e-4 && b <= 1e-4 && a / b >= 4.0;
        let _ = write!(detail, "β={beta}: residual {a:.2e} → {b:.2e} (ratio {:.1}); ", a / b);
    }
    ensure(ok, format!("{detail}need ≤ 1e-4 and ratio ≥ 4"))
}

fn exponent_arithmetic() -> Check {
    let one = R::from_integer(1);
    let r = |a: i64, b: i64| R::new(a, b);
    let mut bad = Vec::new();
    let betas = [r(1, 1), r(5, 4), r(3, 2), r(7, 4), r(2, 1)];
    let mut combos = 0;
    for beta in &betas {
        // four p values spread over [6/(5−β), 6/(3−β)], and the matching q range
        let (p_lo, p_hi) = (r(6, 1) / (r(5, 1) - beta), r(6, 1) / (r(3, 1) - beta));
        let (q_lo, q_hi) = (r(6, 1) / (r(3, 1) + beta), r(6, 1) / (one + beta));
        for i in 0..4 {
            let w = r(i, 3);
            let p = p_lo + (p_hi - p_lo) * w;
            let q = q_lo + (q_hi - q_lo) * w;
            let (a, b) = vorticity_powers(beta, &p);
            let (c, d) = lambda_powers(beta, &q);
            combos += 1;
            let in_unit = |x: &R| *x >= R::from_integer(0) && *x <= one;
            if a + b != one || c + d != one || ![a, b, c, d].iter().all(in_unit) {
                bad.push(format!("β={beta} p={p} q={q}"));
            }
        }
    }
    for g in [4, 5, 6, 9, 12, 100] {
        let gamma = Exponent::Finite(R::from_integer(g));
        let (a, b) = gradient_powers(&gamma);
        if a + b != one {
            bad.push(format!("gradient powers γ={g}"));
        }
    }
    for g in [4, 5, 6, 9, 100] {
        let gamma = R::from_integer(g);
        let q = time_exponent(&Exponent::Finite(gamma)).map_err(fail)?;
        if r(3, 1) / gamma + r(2, 1) / q != one {
            bad.push(format!("scaling γ={g}"));
        }
    }
    let gammas: Vec<Exponent<R>> =
        [4, 5, 6, 7, 9, 12, 100].into_iter().map(|g| Exponent::Finite(R::from_integer(g))).chain([Exponent::Infinity]).collect();
    let pq_betas = [r(1, 1), r(9, 8), r(5, 4), r(4, 3), r(3, 2), r(5, 3), r(7, 4), r(2, 1)];
    let mut pq_cases = 0;
    for gamma in &gammas {
        let budget = match gamma {
            Exponent::Finite(g) => (g - one) / g,
            Exponent::Infinity => one,
        };
        for beta in &pq_betas {
            pq_cases += 1;
            match pq_exponents(gamma, beta) {
                Ok((p, q)) => {
                    let p_ok = p >= r(6, 1) / (r(5, 1) - beta) && p <= r(6, 1) / (r(3, 1) - beta);
                    let q_ok = q >= r(6, 1) / (r(3, 1) + beta) && q <= r(6, 1) / (one + beta);
                    if !(p_ok && q_ok && one / p + one / q == budget) {
                        bad.push(format!("pq γ={gamma} β={beta} → ({p}, {q})"));
                    }
                }
                Err(e) => bad.push(format!("pq γ={gamma} β={beta}: {e}")),
            }
        }
    }
    ensure(
        bad.is_empty(),
        format!("{combos} interpolation combinations, 6 gradient, 5 scaling, {pq_cases} (p, q) cases; violations: {bad:?}"),
    )
}

fn holder_young() -> Check {
    let gammas = [Exponent::Finite(4.0), Exponent::Finite(6.0), Exponent::Infinity];
    let betas = [1.0, 1.5, 2.0];
    let grids = [Grid64::new(16).map_err(fail)?, Grid64::new(24).map_err(fail)?];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut min_holder, mut min_young, mut min_prod) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut cases = 0;
    for field in 0..100 {
        let grid = &grids[field % 2];
        let slope = rng.gen_range(-4.0..-1.0);
        let amplitude = rng.gen_range(0.1..10.0);
        let v = random_divfree(grid, slope, rng.gen(), amplitude).map_err(fail)?;
        let beta = betas[field % 3];
        let mut flow = FlowFields::new(grid, &v).map_err(fail)?;
        for gamma in gammas {
            let s = holder_at(&mut flow, 0.0, beta, gamma, FLOOR).map_err(fail)?;
            min_holder = min_holder.min(s.holder_margin() / s.holder_bound);
            min_young = min_young.min(s.young_margin() / s.young_rhs);
            min_prod = min_prod.min(s.production_margin() / (s.triple_integral + s.floor_allowance));
            cases += 1;
        }
    }
    ensure(
        min_holder >= 0.0 && min_young >= 0.0 && min_prod >= 0.0,
        format!(
            "{cases} cases; min relative margins: Hölder {min_holder:.3e}, Young {min_young:.3e}, production {min_prod:.3e}"
        ),
    )
}

const GRONWALL_AMPLITUDE: f64 = 100.0;
const GRONWALL_T_END: f64 = 0.05;

struct Calibration {
    constant: Option<f64>,
    holds: bool,
    peak: f64,
}

fn calibrate(n: usize, beta: f64, gammas: &[Exponent<f64>]) -> Result<Vec<Calibration>, String> {
    let dt = 0.8 / (GRONWALL_AMPLITUDE * n as f64);
    let mut cfg = SolverConfig::new(n, dt, GRONWALL_T_END, InitialCondition::TaylorGreen { amplitude: GRONWALL_AMPLITUDE });
    cfg.snapshot_stride = usize::MAX;
    cfg.diagnostic_stride = ((GRONWALL_T_END / 200.0) / dt).round().max(1.0) as usize;
    cfg.tail_fraction_limit = 0.05;
    cfg.diagnostic_betas = vec![beta];
    cfg.criteria =
        gammas.iter().map(|&g| CriterionSpec::new(CriterionKind::KappaBeta { beta }, g, Exponent::Infinity)).collect();
    let traj = simulate(&cfg).map_err(fail)?;
    gammas
        .iter()
        .map(|&gamma| {
            let probe = gronwall_envelope(&traj, gamma, beta, 0.0).map_err(fail)?;
            let peak = probe.samples.iter().map(|s| s.energy / probe.initial_norm).fold(0.0, f64::max);
            let holds = match probe.minimal_constant {
                Some(c) => !probe.trivially_bounded && gronwall_envelope(&traj, gamma, beta, c).map_err(fail)?.holds,
                None => false,
            };
            Ok(Calibration { constant: probe.minimal_constant, holds, peak })
        })
        .collect()
}

fn gronwall() -> Check {
    let beta = 2.0;
    let gammas = [Exponent::Infinity, Exponent::Finite(6.0)];
    let coarse = calibrate(32, beta, &gammas)?;
    let fine = calibrate(64, beta, &gammas)?;
    let spread = |i: usize| match (coarse[i].constant, fine[i].constant) {
        (Some(a), Some(b)) => (a - b).abs() / b,
        _ => f64::INFINITY,
    };
    let (gated, info) = (spread(0), spread(1));
    ensure(
        coarse[0].holds && fine[0].holds && gated <= 0.1,
        format!(
            "Taylor-Green amplitude {GRONWALL_AMPLITUDE}, T = {GRONWALL_T_END}, β = {beta}, peak X/H0 {:.3} / {:.3}; \
             γ = inf: minimal C {:?} (n=32) vs {:?} (n=64), change {gated:.3} (≤ 0.1); \
             γ = 6 for reference: change {info:.3}",
            coarse[0].peak, fine[0].peak, coarse[0].constant, fine[0].constant
        ),
    )
}

fn local_energy() -> Check {
    let n = 32;
    let grid = Grid64::new(n).map_err(fail)?;
    let mut cfg = SolverConfig::new(n, 1e-3, 1.0, InitialCondition::Abc { a: 1.0, b: 0.8, c: 0.6 });
    cfg.snapshot_stride = 2;
    cfg.diagnostic_stride = 2;
    let traj = simulate(&cfg).map_err(fail)?;
    let bumps = [
        TestFunction {
            space: SpaceBump { center: [2.0, 3.5, 4.0], radius: 1.8 },
            time: TimeProfile::Bump { start: 0.0, end: 1.0 },
            amplitude: 1.0,
        },
        TestFunction {
            space: SpaceBump { center: [5.5, 1.0, 0.3], radius: 2.5 },
            time: TimeProfile::Bump { start: 0.0, end: 1.0 },
            amplitude: 2.0,
        },
    ];
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for (i, phi) in bumps.iter().enumerate() {
        let r = local_energy_residual(&grid, &traj, phi).map_err(fail)?;
        worst = worst.max(r.relative);
        let _ = write!(detail, "φ{i}: {:.2e}; ", r.relative);
    }
    ensure(worst <= 1e-5, format!("{detail}relative |LHS − RHS| ≤ 1e-5"))
}

fn norm_oracles() -> Check {
    let mut bad = Vec::new();
    let check = |bad: &mut Vec<String>, name: &str, got: f64, want: f64, tol: f64| {
        if !((got - want).abs() <= tol * want.abs()) {
            bad.push(format!("{name}: {got} vs {want}"));
        }
    };
    let g32 = Grid64::new(32).map_err(fail)?;
    let g64 = Grid64::new(64).map_err(fail)?;

    let ones = ScalarField::from_fn(32, |_: f64, _, _| 1.0);
    check(&mut bad, "constant γ=3", spatial_norm(&g32, &ones, Exponent::Finite(3.0), None).map_err(fail)?, 2.0 * PI, 1e-12);
    let sine = ScalarField::from_fn(32, |x: f64, _, _| x.sin());
    check(&mut bad, "sin γ=2", spatial_norm(&g32, &sine, Exponent::Finite(2.0), None).map_err(fail)?, (4.0 * PI.powi(3)).sqrt(), 1e-12);

    let ball = cylinder_mask(&g64, [PI, PI, PI], 1.0).map_err(fail)?;
    let ones64 = ScalarField::from_fn(64, |_: f64, _, _| 1.0);
    let volume = spatial_norm(&g64, &ones64, Exponent::Finite(1.0), Some(&ball)).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 2_000_000;
    let hits = (0..draws)
        .filter(|_| {
            let p: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            p.iter().map(|x| x * x).sum::<f64>() < 1.0
        })
        .count();
    let monte_carlo = 8.0 * hits as f64 / draws as f64;
    check(&mut bad, "ball volume vs Monte-Carlo", volume, monte_carlo, 0.02);

    let constant: Vec<(f64, f64)> = (0..=100).map(|i| (0.02 * i as f64, 1.7)).collect();
    check(&mut bad, "constant α=2", mixed_norm(&constant, Exponent::Finite(2.0), (0.0, 2.0)).map_err(fail)?, 1.7 * 2f64.sqrt(), 1e-12);
    let three = [(0.0, 1.0), (0.5, 3.0), (1.0, 2.0)];
    check(&mut bad, "α=∞", mixed_norm(&three, Exponent::Infinity, (0.0, 1.0)).map_err(fail)?, 3.0, 0.0);
    let linear: Vec<(f64, f64)> = (0..=1000).map(|i| (i as f64 * 1e-3, i as f64 * 1e-3)).collect();
    let got = mixed_norm(&linear, Exponent::Finite(2.0), (0.0, 1.0)).map_err(fail)?;
    if (got - 1.0 / 3f64.sqrt()).abs() > 1e-6 {
        bad.push(format!("t on [0,1], α=2: {got}"));
    }

    let h = g64.spacing();
    let tiny = 0.6 * h;
    let on_point = cylinder_mask(&g64, [10.0 * h, 20.0 * h, 30.0 * h], tiny).map_err(fail)?;
    let between = cylinder_mask(&g64, [10.5 * h, 20.0 * h, 30.0 * h], tiny).map_err(fail)?;
    if on_point.count() != 1 || !on_point.contains(10 + 64 * (20 + 64 * 30)) || between.count() != 2 {
        bad.push(format!("degenerate balls: {} and {} points", on_point.count(), between.count()));
    }

    let origin = cylinder_mask(&g64, [0.0, 0.0, 0.0], 1.0).map_err(fail)?;
    let wrap = |i: usize| {
        let d = g64.coord(i);
        d.min(2.0 * PI - d)
    };
    let mut brute = 0;
    for k in 0..64 {
        for j in 0..64 {
            for i in 0..64 {
                let inside = wrap(i).powi(2) + wrap(j).powi(2) + wrap(k).powi(2) < 1.0;
                brute += inside as usize;
                if inside != origin.contains(i + 64 * (j + 64 * k)) {
                    bad.push(format!("mask disagrees with brute force at ({i}, {j}, {k})"));
                }
            }
        }
    }
    if brute != origin.count() {
        bad.push(format!("brute-force count {brute} vs {}", origin.count()));
    }

    let field = ScalarField::from_fn(64, |x: f64, y, z| (x + 2.0 * y).sin() * (3.0 * z).cos() + 1.5);
    let shifted = ScalarField::from_fn(64, |x: f64, y, z| (x + PI + 2.0 * (y + PI)).sin() * (3.0 * (z + PI)).cos() + 1.5);
    let near_edge = [0.05, 6.2, 3.1];
    let moved = near_edge.map(|c| (c + PI) % (2.0 * PI));
    let m0 = cylinder_mask(&g64, near_edge, 1.2).map_err(fail)?;
    let m1 = cylinder_mask(&g64, moved, 1.2).map_err(fail)?;
    let half = 32;
    let same_mask = (0..64 * 64 * 64).all(|idx| {
        let (i, j, k) = (idx % 64, (idx / 64) % 64, idx / 4096);
        let src = (i + half) % 64 + 64 * ((j + half) % 64 + 64 * ((k + half) % 64));
        m0.contains(src) == m1.contains(idx)
    });
    let n0 = spatial_norm(&g64, &field, Exponent::Finite(4.0), Some(&m1)).map_err(fail)?;
    let n1 = spatial_norm(&g64, &shifted, Exponent::Finite(4.0), Some(&m0)).map_err(fail)?;
    if !same_mask || (n0 - n1).abs() > 1e-13 * n0 {
        bad.push(format!("translation: masks equal {same_mask}, norms {n0} vs {n1}"));
    }

    let amp = (2.0 / (2.0 * PI).powi(3)).sqrt();
    let shell = ScalarField::from_fn(32, |x: f64, y, _| amp * (2.0 * x).cos() * 0.6 + amp * (2.0 * y).sin() * 0.8);
    let shell_hat = g32.forward(&shell).map_err(fail)?;
    check(&mut bad, "single shell", sobolev_norm(&g32, &shell_hat, 0.5).map_err(fail)?, 2f64.sqrt(), 1e-12);

    ensure(bad.is_empty(), format!("constant, sine, ball volume, mixed norms, masks, translation, shell; failures: {bad:?}"))
}

fn identities() -> Check {
    let grid = Grid64::new(32).map_err(fail)?;
    let (mut kappa_gap, mut curl_gap, mut weighted_gap) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..5 {
        let v = random_divfree(&grid, -5.0 / 3.0, seed, 1.0).map_err(fail)?;
        let kappa = criterion_field(&grid, &v, CriterionKind::Kappa, FLOOR).map_err(fail)?.values;
        let kb2 = criterion_field(&grid, &v, CriterionKind::KappaBeta { beta: 2.0 }, FLOOR).map_err(fail)?.values;
        let weighted = criterion_field(&grid, &v, CriterionKind::WeightedKappa { b: 1.0 }, FLOOR).map_err(fail)?.values;
        let scale = kappa.max_abs();
        let speed = grid.backward_vector(&v).map_err(fail)?.magnitude();
        let cut = FLOOR * speed.max_abs();
        for i in 0..kappa.values().len() {
            kappa_gap = kappa_gap.max((kappa.values()[i] - kb2.values()[i]).abs() / scale);
            if speed.values()[i] > cut {
                weighted_gap = weighted_gap.max((kappa.values()[i] - weighted.values()[i]).abs() / scale);
            }
        }
        let omega = grid.curl(&v).map_err(fail)?;
        let lhs = grid.l2_norm_squared(&omega).map_err(fail)?.sqrt();
        let rhs = sobolev_norm(&grid, &v, 1.0).map_err(fail)?;
        curl_gap = curl_gap.max((lhs - rhs).abs() / rhs);
    }
    ensure(
        kappa_gap <= 1e-10 && curl_gap <= 1e-10 && weighted_gap <= 1e-10,
        format!("κ vs κ_2 {kappa_gap:.2e}, ‖ω‖ vs ‖Λv‖ {curl_gap:.2e}, weighted b=1 vs κ {weighted_gap:.2e} (all ≤ 1e-10)"),
    )
}

fn determinism() -> Check {
    let text = r#"
seed = 42

[solver]
n = 16
dt = 0.005
t_end = 0.05
snapshot_stride = 5
tail_fraction_limit = 1.0
betas = [1.0]

[initial]
kind = "random"
slope = -1.6667

[[criteria]]
kind = "kappa"
gamma = 6
alpha = 4
"#;
    let cfg = regwatch_cli::RunConfig::parse(text).map_err(fail)?;
    let mut manifests = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(fail)?;
        let out = regwatch_cli::commands::simulate(&cfg, dir.path()).map_err(fail)?;
        manifests.push(std::fs::read(out.manifest).map_err(fail)?);
    }
    let lines = String::from_utf8_lossy(&manifests[0]).lines().count();
    ensure(manifests[0] == manifests[1], format!("two runs, {lines} manifest entries, identical: {}", manifests[0] == manifests[1]))
}

fn main() -> ExitCode {
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(1).build_global() {
        eprintln!("thread pool: {e}");
    }
    let criteria: [(u32, fn() -> Check); 9] = [
        (1, beltrami),
        (2, energy_identity),
        (3, exponent_arithmetic),
        (4, holder_young),
        (5, gronwall),
        (6, local_energy),
        (7, norm_oracles),
        (8, identities),
        (9, determinism),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id}: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id}: FAIL ({secs:.1}s) {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
