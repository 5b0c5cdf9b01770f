use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use regwatch::criterion::{evaluate_mixed, CriterionSpec};
use regwatch::geometry::CriterionKind;
use regwatch::norms::{cylinder_mask, Region};
use regwatch::solver::snapshot::{read_snapshot, write_snapshot};
use regwatch::solver::{simulate as run_solver, Trajectory};
use regwatch::spectral::{SpectralGrid, VectorSpectrum};
use regwatch::verify::{
    energy_balance_residual, gronwall_envelope, holder_triple_check, local_energy_residual_oversampled,
    smallness_monitor,
};
use regwatch::{Error, Grid64, Trajectory64};

use crate::config::{CheckName, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{create_file, verify_manifest, write_csv, write_manifest, OutputLock, Summary};

pub const SNAPSHOT_DIR: &str = "snapshots";
pub const SNAPSHOT_EXT: &str = "rgw";
pub const CONFIG_COPY: &str = "config.toml";

fn mask_points(grid: &Grid64, spec: &CriterionSpec<f64>) -> CliResult<Option<usize>> {
    Ok(match spec.region {
        Region::Full => None,
        Region::Cylinder { center, radius, .. } => Some(cylinder_mask(grid, center, radius)?.count()),
    })
}

fn diagnostics_table(traj: &Trajectory64) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut header: Vec<String> =
        ["t", "step", "kinetic_energy", "enstrophy", "max_speed"].iter().map(|s| s.to_string()).collect();
    for b in &traj.betas {
        header.extend([format!("E_beta{b}"), format!("D_beta{b}"), format!("T_beta{b}")]);
    }
    header.extend(traj.criteria.iter().map(CriterionSpec::label));
    let rows = traj
        .samples
        .iter()
        .map(|s| {
            let d = &s.diagnostics;
            let mut row = vec![s.time, s.step as f64, d.kinetic_energy, d.enstrophy, d.max_speed];
            for bt in &d.beta_terms {
                row.extend([bt.energy, bt.dissipation, bt.production]);
            }
            row.extend(&d.criterion_norms);
            row
        })
        .collect();
    (header, rows)
}

/// What `simulate` left on disk.
#[derive(Debug)]
pub struct SimulateOutcome {
    pub trajectory: Trajectory64,
    /// Artifact paths relative to the output directory, manifest excluded.
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> CliResult<SimulateOutcome> {
    let _lock = OutputLock::acquire(out)?;
    let solver = cfg.solver_config()?;
    log::info!("simulating n = {} to t = {} with dt = {}", solver.n, solver.t_end, solver.dt);
    let trajectory = run_solver(&solver)?;
    let grid = Grid64::new(solver.n)?;
    let mut files = Vec::new();

    for s in &trajectory.samples {
        let Some(v) = &s.velocity else { continue };
        let rel = PathBuf::from(SNAPSHOT_DIR).join(format!("step_{:08}.{SNAPSHOT_EXT}", s.step));
        let path = out.join(&rel);
        let mut w = create_file(&path)?;
        write_snapshot(&mut w, s.time, &grid.backward_vector(v)?).map_err(|e| match e {
            Error::Io(io) => CliError::io(&path, io),
            other => other.into(),
        })?;
        files.push(rel);
    }

    let (header, rows) = diagnostics_table(&trajectory);
    write_csv(&out.join("diagnostics.csv"), &header, &rows)?;
    files.push("diagnostics.csv".into());

    let config_path = out.join(CONFIG_COPY);
    fs::write(&config_path, cfg.to_toml()).map_err(|e| CliError::io(&config_path, e))?;
    files.push(CONFIG_COPY.into());

    let mut summary = Summary::default();
    let last = trajectory.samples.last().expect("a run has at least its initial sample");
    summary.push("n", solver.n);
    summary.push("steps", last.step);
    summary.push("samples", trajectory.samples.len());
    summary.push("snapshots", trajectory.snapshots().count());
    summary.push_value("final_time", last.time);
    summary.push_value("final_kinetic_energy", last.diagnostics.kinetic_energy);
    summary.push_value("final_enstrophy", last.diagnostics.enstrophy);
    summary.write(&out.join("summary.txt"))?;
    files.push("summary.txt".into());

    let manifest = write_manifest(out, &files)?;
    Ok(SimulateOutcome { trajectory, files, manifest })
}

/// Reads every snapshot under `dir` (or `dir/snapshots`), ordered by time.
pub fn load_snapshots(dir: &Path) -> CliResult<(Grid64, Vec<(f64, VectorSpectrum<f64>)>)> {
    let nested = dir.join(SNAPSHOT_DIR);
    let base = if nested.is_dir() { nested } else { dir.to_path_buf() };
    let mut paths: Vec<PathBuf> = fs::read_dir(&base)
        .map_err(|e| CliError::io(&base, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == SNAPSHOT_EXT))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Input(format!("no .{SNAPSHOT_EXT} snapshots in {}", base.display())));
    }
    let mut grid: Option<Grid64> = None;
    let mut snaps = Vec::with_capacity(paths.len());
    for path in &paths {
        let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        let (t, v) = read_snapshot::<f64, _>(BufReader::new(file))
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let g = match &grid {
            Some(g) if g.n() != v.n() => {
                return Err(CliError::Input(format!(
                    "{}: grid n = {} differs from n = {} of earlier snapshots",
                    path.display(),
                    v.n(),
                    g.n()
                )))
            }
            Some(g) => g,
            None => grid.insert(SpectralGrid::new(v.n())?),
        };
        snaps.push((t, g.forward_vector(&v)?));
    }
    snaps.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok((grid.expect("at least one snapshot"), snaps))
}

pub fn trajectory_from_dir(dir: &Path, cfg: &RunConfig) -> CliResult<(Grid64, Trajectory64)> {
    if verify_manifest(dir)? {
        log::info!("manifest checksums verified for {}", dir.display());
    }
    let (grid, snaps) = load_snapshots(dir)?;
    let s = &cfg.solver;
    let traj = Trajectory::from_snapshots(&grid, snaps, s.viscosity, &s.betas, &cfg.criteria()?, s.direction_floor)?;
    Ok((grid, traj))
}

pub fn mixed_norm_summary(grid: &Grid64, traj: &Trajectory64, summary: &mut Summary) -> CliResult<()> {
    for (i, spec) in traj.criteria.iter().enumerate() {
        let key = format!("mixed.{}", spec.label());
        match evaluate_mixed(spec, &traj.criterion_series(i), mask_points(grid, spec)?) {
            Ok(r) => {
                summary.push_value(format!("{key}.value"), r.value);
                summary.push_value(format!("{key}.window_start"), r.window.start);
                summary.push_value(format!("{key}.window_end"), r.window.end);
                summary.push(format!("{key}.window_clipped"), r.window.clipped);
                summary.push(format!("{key}.samples"), r.samples);
                if let Some(m) = r.mask_points {
                    summary.push(format!("{key}.mask_points"), m);
                }
            }
            Err(e @ (Error::TooSparse(_) | Error::WindowOutsideSamples { .. } | Error::EmptyMask)) => {
                log::warn!("{key}: {e}");
                summary.push(format!("{key}.refused"), e);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

pub fn diagnose(input: &Path, cfg: &RunConfig, out: &Path) -> CliResult<Summary> {
    let (grid, traj) = trajectory_from_dir(input, cfg)?;
    let _lock = OutputLock::acquire(out)?;
    let mut header = vec!["t".to_string()];
    header.extend(traj.criteria.iter().map(CriterionSpec::label));
    let rows: Vec<Vec<f64>> = traj
        .samples
        .iter()
        .map(|s| std::iter::once(s.time).chain(s.diagnostics.criterion_norms.iter().copied()).collect())
        .collect();
    write_csv(&out.join("criteria.csv"), &header, &rows)?;
    let mut summary = Summary::default();
    summary.push("n", traj.n);
    summary.push("snapshots", traj.samples.len());
    mixed_norm_summary(&grid, &traj, &mut summary)?;
    summary.write(&out.join("diagnose_summary.txt"))?;
    write_manifest(out, &["criteria.csv".into(), "diagnose_summary.txt".into()])?;
    Ok(summary)
}

/// Where `verify` takes its trajectory from.
#[derive(Clone, Debug)]
pub enum VerifySource {
    Snapshots(PathBuf),
    Live,
}

#[derive(Debug)]
pub struct VerifyOutcome {
    pub summary: Summary,
    pub total: usize,
    pub failed: usize,
}

struct Tally<'a> {
    summary: &'a mut Summary,
    total: usize,
    failed: usize,
}

impl Tally<'_> {
    fn record(&mut self, key: &str, pass: bool) {
        self.total += 1;
        if !pass {
            self.failed += 1;
        }
        let status = if pass { "pass" } else { "fail" };
        println!("{status}  {key}");
        self.summary.push(format!("{key}.status"), status);
    }
}

fn require_betas(traj: &Trajectory64, check: CheckName) -> CliResult<()> {
    if traj.betas.is_empty() {
        return Err(CliError::Config(format!("check {} needs solver.betas", check.as_str())));
    }
    Ok(())
}

pub fn verify(source: &VerifySource, cfg: &RunConfig, out: &Path, tolerance_scale: f64) -> CliResult<VerifyOutcome> {
    if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
        return Err(CliError::Config(format!("tolerance scale must be > 0, got {tolerance_scale}")));
    }
    let (grid, traj) = match source {
        VerifySource::Snapshots(dir) => trajectory_from_dir(dir, cfg)?,
        VerifySource::Live => {
            let solver = cfg.solver_config()?;
            (Grid64::new(solver.n)?, run_solver(&solver)?)
        }
    };
    let _lock = OutputLock::acquire(out)?;
    let v = &cfg.verify;
    let checks = if v.checks.is_empty() {
        vec![CheckName::EnergyBalance, CheckName::Holder, CheckName::Gronwall, CheckName::LocalEnergy, CheckName::Smallness]
    } else {
        v.checks.clone()
    };
    let floor = cfg.solver.direction_floor;
    let mut summary = Summary::default();
    summary.push("tolerance_scale", tolerance_scale);
    let mut tally = Tally { summary: &mut summary, total: 0, failed: 0 };

    for check in checks {
        let name = check.as_str();
        match check {
            CheckName::EnergyBalance => {
                require_betas(&traj, check)?;
                let tol = v.energy_tolerance * tolerance_scale;
                for &beta in &traj.betas {
                    let r = energy_balance_residual(&traj, beta, v.energy_scheme.into())?;
                    let key = format!("{name}.beta{beta}");
                    tally.summary.push_value(format!("{key}.relative_residual"), r.relative);
                    tally.summary.push_value(format!("{key}.tolerance"), tol);
                    tally.record(&key, r.relative <= tol);
                }
            }
            CheckName::Holder => {
                require_betas(&traj, check)?;
                for &beta in &traj.betas {
                    for gamma in &v.holder_gammas {
                        let r = holder_triple_check(&grid, &traj, beta, gamma.0, floor)?;
                        let key = format!("{name}.beta{beta}_g{gamma}");
                        tally.summary.push_value(format!("{key}.min_relative_margin"), r.min_relative_margin);
                        tally.summary.push(format!("{key}.samples"), r.samples.len());
                        tally.record(&key, r.holds);
                    }
                }
            }
            CheckName::Gronwall => {
                let targets: Vec<(f64, regwatch::Exponent<f64>)> = traj
                    .criteria
                    .iter()
                    .filter_map(|c| match c.kind {
                        CriterionKind::KappaBeta { beta } if c.region == Region::Full && traj.beta_index(beta).is_some() => {
                            Some((beta, c.gamma))
                        }
                        _ => None,
                    })
                    .collect();
                if targets.is_empty() {
                    return Err(CliError::Config(
                        "gronwall check needs a full-slab kappa-beta criterion whose beta is in solver.betas".into(),
                    ));
                }
                for (beta, gamma) in targets {
                    let r = gronwall_envelope(&traj, gamma, beta, v.gronwall_constant.unwrap_or(0.0))?;
                    let key = format!("{name}.beta{beta}_g{gamma}");
                    match r.minimal_constant {
                        Some(c) => tally.summary.push_value(format!("{key}.minimal_constant"), c),
                        None => tally.summary.push(format!("{key}.minimal_constant"), "none"),
                    }
                    tally.summary.push(format!("{key}.trivially_bounded"), r.trivially_bounded);
                    let pass = match v.gronwall_constant {
                        Some(c) => {
                            tally.summary.push_value(format!("{key}.constant"), c);
                            r.holds
                        }
                        None => r.minimal_constant.is_some(),
                    };
                    tally.record(&key, pass);
                }
            }
            CheckName::LocalEnergy => {
                if v.test_functions.is_empty() {
                    return Err(CliError::Config("local-energy check needs verify.test_functions".into()));
                }
                let tol = v.local_energy_tolerance * tolerance_scale;
                for (i, entry) in v.test_functions.iter().enumerate() {
                    let phi = entry.to_test_function()?;
                    let r = local_energy_residual_oversampled(&grid, &traj, &phi, v.local_energy_oversample)?;
                    let key = format!("{name}.phi{i}");
                    tally.summary.push_value(format!("{key}.relative_residual"), r.relative);
                    tally.summary.push_value(format!("{key}.tolerance"), tol);
                    tally.record(&key, r.relative <= tol);
                }
            }
            CheckName::Smallness => {
                let mut any = false;
                for i in 0..traj.criteria.len() {
                    let r = match smallness_monitor(&grid, &traj, i, v.smallness_epsilon) {
                        Ok(r) => r,
                        Err(Error::InvalidParameter(_)) => continue,
                        Err(e) => return Err(e.into()),
                    };
                    any = true;
                    let key = format!("{name}.{}", r.norm.label);
                    tally.summary.push_value(format!("{key}.value"), r.norm.value);
                    tally.summary.push_value(format!("{key}.epsilon"), r.epsilon);
                    tally.record(&key, r.small);
                }
                if !any {
                    return Err(CliError::Config("smallness check needs a criterion with alpha = inf and gamma = 3 (3/b)".into()));
                }
            }
        }
    }
    let (total, failed) = (tally.total, tally.failed);
    summary.push("checks.total", total);
    summary.push("checks.failed", failed);
    summary.push("status", if failed == 0 { "pass" } else { "fail" });
    summary.write(&out.join("verify_summary.txt"))?;
    write_manifest(out, &["verify_summary.txt".into()])?;
    Ok(VerifyOutcome { summary, total, failed })
}
