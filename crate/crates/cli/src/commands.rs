use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use dkho::classical::{seed_disk, ClassicalMap};
use dkho::config::Config;
use dkho::fockspace::{
    coherent_state, evolve_visit, expectation_xp, FloquetOperator, QuadratureEigensystem,
    COHERENT_TOLERANCE,
};
use dkho::grid::GridSpec;
use dkho::io;
use dkho::params::{kappa_from_physical, nu_tau, reduce_resonance, PhasePoint};
use dkho::protocol::{overlap_series, reconstruct_overlap, time_averaged_q, SINGULAR_THRESHOLD};
use dkho::{Error, Result};
use log::info;

use crate::manifest::RunManifest;
use crate::settings::{initial_alpha, leakage_policy, resolve, start_point};
use crate::RunArgs;

struct Run {
    out: PathBuf,
    manifest: RunManifest,
}

impl Run {
    /// Opens `name` in the output directory and records it in the manifest.
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out.join(name);
        let file = File::create(&path)?;
        self.manifest.outputs.push(path);
        Ok(BufWriter::new(file))
    }

    fn emit(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    ) -> Result<()> {
        let mut w = self.create(name)?;
        write(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

pub fn run(command: &str, args: &RunArgs) -> Result<()> {
    let started = Instant::now();
    let mut cfg = resolve(args)?;
    let jobs = configure_workers(args.jobs)?;
    std::fs::create_dir_all(&args.out)?;
    let mut run = Run {
        out: args.out.clone(),
        manifest: RunManifest::new(command, jobs),
    };
    match command {
        "web" => web(&mut cfg, &mut run)?,
        "evolve" => evolve(&mut cfg, &mut run)?,
        "overlap" => overlap(&mut cfg, &mut run)?,
        "qavg" => qavg(&mut cfg, &mut run)?,
        "correspondence" => correspondence(&mut cfg, &mut run)?,
        "convert" => convert(&mut cfg, &mut run)?,
        other => unreachable!("unknown command {other}"),
    }
    // defaults filled in by the command are part of the resolved set
    run.manifest.set_config(&cfg);
    run.manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    let path = run.manifest.write(&run.out)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn configure_workers(jobs: Option<usize>) -> Result<usize> {
    let n = match jobs {
        Some(0) => return Err(Error::config("jobs", "need at least one worker")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    Ok(n)
}

/// `(ντ, q)` after reducing `r/q`.
fn resonance(cfg: &Config) -> Result<(f64, u64)> {
    let r: u64 = cfg.require("r")?;
    let q: u64 = cfg.require("q")?;
    reduce_resonance(r, q)
        .and_then(|(r, q)| Ok((nu_tau(r, q)?, q)))
        .map_err(|e| Error::config("q", e.to_string()))
}

fn grid(cfg: &mut Config, default_half: f64, default_res: usize) -> Result<GridSpec> {
    let half: f64 = cfg.get_or("grid.half", default_half)?;
    let res: usize = cfg.get_or("grid.res", default_res)?;
    GridSpec::centered(half, res).map_err(|e| Error::config("grid.res", e.to_string()))
}

fn web(cfg: &mut Config, run: &mut Run) -> Result<()> {
    let (theta, order) = resonance(cfg)?;
    let kappa: f64 = cfg.get_or("kappa1", 0.2)?;
    let n_kicks: usize = cfg.get_or("n_kicks", 11_000)?;
    let center = start_point(cfg)?;
    let spread: f64 = cfg.get_or("web.spread", 1e-3)?;
    let per_axis: usize = cfg.get_or("web.seeds_per_axis", 40)?;
    let grid = grid(cfg, 4.0, 400)?;

    let map = ClassicalMap::from_kappa(theta, kappa)?;
    let seeds = seed_disk(center, spread, per_axis);
    let hist = map.web_scan(&seeds, n_kicks, &grid)?;
    run.emit("web.csv", |w| io::write_web_csv(w, &hist))?;
    run.emit("web.pgm", |w| {
        io::write_pgm(w, &grid, &io::log_levels(&hist.counts))
    })?;

    let m = &mut run.manifest;
    m.report("seeds", seeds.len());
    m.report("occupied_cells", hist.occupied_cells());
    m.report("points_outside_grid", hist.outside);
    m.report("rotational_correlation", hist.symmetry_score(order as u32));
    Ok(())
}

fn evolve(cfg: &mut Config, run: &mut Run) -> Result<()> {
    let params = cfg.model_params()?;
    let policy = leakage_policy(cfg)?;
    let alpha = initial_alpha(cfg, params.eta)?;
    let dump: bool = cfg.get_or("dump_operator", false)?;

    let f = FloquetOperator::new(params.kappa1, params.eta, params.nu_tau(), params.fock_dim)?;
    let psi0 = coherent_state(alpha, params.fock_dim, COHERENT_TOLERANCE)?;
    let mut rows = Vec::with_capacity(params.n_kicks as usize + 1);
    let mut last = psi0.clone();
    let monitor = evolve_visit(&f, &psi0, params.n_kicks, &policy, |k, psi, leak| {
        rows.push((k, expectation_xp(psi, params.eta), leak));
        if k == params.n_kicks {
            last = psi.clone();
        }
    })?;
    run.emit("trajectory.csv", |w| io::write_trajectory_csv(w, &rows))?;
    run.emit("state.csv", |w| io::write_state_csv(w, &last))?;
    if dump {
        run.emit("operator.bin", |w| io::write_operator(w, &f))?;
    }
    let m = &mut run.manifest;
    m.report("max_leakage", monitor.max_leakage);
    m.report("final_norm", last.norm());
    Ok(())
}

fn overlap(cfg: &mut Config, run: &mut Run) -> Result<()> {
    let params = cfg.model_params()?;
    let policy = leakage_policy(cfg)?;
    let alpha = initial_alpha(cfg, params.eta)?;
    let threshold: f64 = cfg.get_or("singular_threshold", SINGULAR_THRESHOLD)?;

    let eig = QuadratureEigensystem::new(params.fock_dim)?;
    let theta = params.nu_tau();
    let f1 = FloquetOperator::with_eigensystem(params.kappa1, params.eta, theta, &eig)?;
    let f2 = FloquetOperator::with_eigensystem(params.kappa2, params.eta, theta, &eig)?;
    let series = overlap_series(&f1, &f2, alpha, params.n_kicks, &policy)?;

    let dk = params.delta_kappa();
    let mut singular = 0usize;
    let mut reconstructed = Vec::with_capacity(series.records.len());
    for r in &series.records {
        match reconstruct_overlap(r.p_g, r.p_g_prime, dk, params.eta, r.n, threshold) {
            Ok(o) => reconstructed.push(Some(o)),
            Err(Error::SingularKickIndex { .. }) => {
                singular += 1;
                reconstructed.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    run.emit("overlap.csv", |w| {
        io::write_overlap_csv(w, &series.records, &reconstructed)
    })?;

    let overlaps = series.overlaps();
    let m = &mut run.manifest;
    m.report("rows", overlaps.len());
    m.report("final_overlap", *overlaps.last().expect("n_kicks + 1 rows"));
    m.report(
        "mean_overlap",
        overlaps.iter().sum::<f64>() / overlaps.len() as f64,
    );
    m.report("singular_kick_indices", singular);
    m.report(
        "max_leakage",
        series.leakage1.max_leakage.max(series.leakage2.max_leakage),
    );
    Ok(())
}

fn qavg(cfg: &mut Config, run: &mut Run) -> Result<()> {
    let params = cfg.model_params()?;
    let policy = leakage_policy(cfg)?;
    let alpha = initial_alpha(cfg, params.eta)?;
    let stride: u64 = cfg.get_or("stride", 1)?;
    let grid = grid(cfg, 3.0, 120)?;
    if stride == 0 {
        return Err(Error::config("stride", "must be at least 1"));
    }

    let f = FloquetOperator::new(params.kappa1, params.eta, params.nu_tau(), params.fock_dim)?;
    let (q, monitor) = time_averaged_q(&f, alpha, params.n_kicks, stride, &grid, &policy)?;
    run.emit("q.csv", |w| io::write_q_csv(w, &q))?;
    run.emit("q.pgm", |w| {
        io::write_pgm(w, &grid, &io::linear_levels(&q.values))
    })?;

    let m = &mut run.manifest;
    m.report("masked_cells", q.masked_count());
    m.report("total_mass", q.total_mass());
    m.report("mass_beyond_radius_1.5", q.mass_outside_radius(1.5));
    m.report("max_leakage", monitor.max_leakage);
    Ok(())
}

fn correspondence(cfg: &mut Config, run: &mut Run) -> Result<()> {
    cfg.get_or("n_kicks", 10u64)?;
    let params = cfg.model_params()?;
    let policy = leakage_policy(cfg)?;
    let alpha = initial_alpha(cfg, params.eta)?;
    let bound: f64 = cfg.get_or("correspondence.bound", 0.01)?;
    let ic = dkho::params::phasepoint_from_alpha(alpha, params.eta);

    let theta = params.nu_tau();
    let f = FloquetOperator::new(params.kappa1, params.eta, theta, params.fock_dim)?;
    let map = ClassicalMap::from_kappa(theta, params.kappa1)?;
    let orbit = map.orbit(ic, params.n_kicks as usize);
    let psi0 = coherent_state(alpha, params.fock_dim, COHERENT_TOLERANCE)?;
    let mut rows: Vec<(u64, PhasePoint, PhasePoint, f64)> = Vec::new();
    evolve_visit(&f, &psi0, params.n_kicks, &policy, |k, psi, _| {
        let quantum = expectation_xp(psi, params.eta);
        let classical = orbit[k as usize];
        let scale = if classical.radius() > 0.0 {
            classical.radius()
        } else {
            1.0
        };
        let dev = (quantum.x - classical.x)
            .abs()
            .max((quantum.p - classical.p).abs())
            / scale;
        rows.push((k, quantum, classical, dev));
    })?;
    run.emit("correspondence.csv", |w| write_correspondence(w, &rows))?;

    let worst = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let m = &mut run.manifest;
    m.report("max_relative_deviation", worst);
    m.report("bound", bound);
    m.report("verdict", if worst < bound { "PASS" } else { "FAIL" });
    Ok(())
}

fn write_correspondence<W: Write>(
    mut w: W,
    rows: &[(u64, PhasePoint, PhasePoint, f64)],
) -> std::io::Result<()> {
    writeln!(
        w,
        "n,X_quantum,P_quantum,X_classical,P_classical,relative_deviation"
    )?;
    for (k, q, c, d) in rows {
        writeln!(w, "{k},{},{},{},{},{d}", q.x, q.p, c.x, c.p)?;
    }
    Ok(())
}

fn convert(cfg: &mut Config, run: &mut Run) -> Result<()> {
    let phys = cfg.physical_params()?;
    let bounds = cfg.adiabatic_bounds()?;
    let k = kappa_from_physical(&phys, &bounds)?;
    let via_k = k.kappa_from_big_k();
    let m = &mut run.manifest;
    m.report("eta", k.eta);
    m.report("kappa", k.kappa);
    m.report("K", k.big_k);
    m.report("kappa_from_K", via_k);
    m.report(
        "kappa_consistency",
        if k.kappa == 0.0 {
            0.0
        } else {
            (via_k / k.kappa - 1.0).abs()
        },
    );
    m.report("rabi_over_detuning", k.rabi_ratio);
    m.report("pulse_width_times_detuning", k.width_detuning);
    Ok(())
}
