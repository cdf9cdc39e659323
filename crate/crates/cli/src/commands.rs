//! The subcommands. Each returns the process exit code.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use celldiv::acceptance::{run_criterion, CRITERIA};
use celldiv::division::{cutout_construction, run_in_window_seeded, snapshot_at, EventLog, TessellationSnapshot};
use celldiv::fragmentation::run_fragmentation;
use celldiv::geometry::{CellGeometry, Cuboid};
use celldiv::hyperplane_process::{build_zero_cell_chain, explosion_diagnostic, Verdict};
use celldiv::io;
use celldiv::render::{render_svg, SvgStyle};
use celldiv::rng::stream;
use celldiv::stats::{cv_report, ks_test, ks_two_sample, poisson_count_test, GoFResult, Reference, DEFAULT_LEVEL};

use crate::config::{Construction, RunConfig};
use crate::manifest::{write_outputs, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;

type Files = Vec<(String, Vec<u8>)>;

fn over_replicates<T, F>(n: u64, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

fn rep_name(i: u64, what: &str) -> String {
    format!("rep-{i:05}.{what}")
}

pub fn load_config(path: &Path, seed: u64) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = RunConfig::parse(&text, &path.display().to_string())?;
    if let Some(s) = cfg.seed {
        if s != seed {
            bail!("{}: seed = {s} in the config but --seed {seed} on the command line", path.display());
        }
    }
    Ok(cfg)
}

fn finish(command: &str, cfg: &RunConfig, seed: u64, out: &Path, mut files: Files) -> Result<RunManifest> {
    let mut manifest = RunManifest::new(command, seed, cfg);
    files.push(("config.toml".into(), cfg.to_toml().into_bytes()));
    write_outputs(out, &files, &mut manifest)?;
    Ok(manifest)
}

fn bounding_window(g: &CellGeometry) -> Result<Cuboid> {
    Ok(match g {
        CellGeometry::Cuboid(c) => c.clone(),
        CellGeometry::Polygon(p) => {
            let xs = p.vertices().iter().map(|v| v[0]);
            let ys = p.vertices().iter().map(|v| v[1]);
            let lo = [xs.clone().fold(f64::INFINITY, f64::min), ys.clone().fold(f64::INFINITY, f64::min)];
            let hi = [xs.fold(f64::NEG_INFINITY, f64::max), ys.fold(f64::NEG_INFINITY, f64::max)];
            Cuboid::new(lo.to_vec(), hi.to_vec())?
        }
    })
}

/// Runs the configured process `replicates` times; replicate `i` uses
/// stream `(seed, i)`.
pub fn simulate(cfg: &RunConfig, seed: u64, out: &Path, parallel: bool, allow_truncation: bool) -> Result<i32> {
    let window = cfg.require_window()?;
    let phi = cfg.require_phi()?;
    let rule = cfg.require_rule()?;
    let t_max = cfg.require_t_max()?;
    let caps = cfg.caps();
    let style = SvgStyle {
        color_by_birth: cfg.output.color_by_birth,
        ..SvgStyle::default()
    };

    let reps = over_replicates(cfg.replicates, parallel, |i| -> Result<(Files, bool)> {
        let mut rng = stream(seed, i);
        let (log, snap_at): (EventLog, Box<dyn Fn(f64) -> Result<TessellationSnapshot>>) = match cfg.construction {
            Construction::Window => {
                let log = run_in_window_seeded(&window.clone().into(), &rule, &phi, t_max, seed, &mut rng, caps)?;
                let l = log.clone();
                (log, Box::new(move |t| Ok(snapshot_at(&l, t)?)))
            }
            Construction::Cutout => {
                let res = cutout_construction(&window, &rule, &phi, t_max, &mut rng, caps)?;
                let log = res.inner.clone();
                (log, Box::new(move |t| Ok(res.snapshot(t)?)))
            }
        };
        let horizon = log.horizon();
        let mut files = vec![(rep_name(i, "events.csv"), io::write_event_log(&log).into_bytes())];
        for (j, &t) in cfg.output.snapshot_times.iter().enumerate() {
            if t <= horizon {
                files.push((rep_name(i, &format!("snapshot-{j}.csv")), io::write_snapshot(&snap_at(t)?).into_bytes()));
            }
        }
        let last = snap_at(horizon)?;
        files.push((rep_name(i, "snapshot.csv"), io::write_snapshot(&last).into_bytes()));
        if cfg.output.svg {
            files.push((rep_name(i, "svg"), render_svg(&last, &window, &style)?.into_bytes()));
        }
        Ok((files, log.truncated()))
    })?;

    let truncated: Vec<usize> = reps.iter().enumerate().filter(|(_, r)| r.1).map(|(i, _)| i).collect();
    let files: Files = reps.into_iter().flat_map(|r| r.0).collect();
    finish("simulate", cfg, seed, out, files)?;
    if !truncated.is_empty() {
        eprintln!(
            "warning: {} replicate(s) hit the event cap (first: {}); outputs end at the last event",
            truncated.len(),
            truncated[0]
        );
        if !allow_truncation {
            return Ok(EXIT_TRUNCATED);
        }
    }
    Ok(EXIT_OK)
}

/// Backward zero-cell chains and their explosion diagnostics.
pub fn zero_chain(cfg: &RunConfig, seed: u64, out: &Path, parallel: bool) -> Result<i32> {
    let phi = cfg.require_phi()?;
    let rule = cfg.require_rule()?;
    let depth = cfg.depth.ok_or_else(|| anyhow!("config needs depth"))?;
    let reps = over_replicates(cfg.replicates, parallel, |i| -> Result<(Files, Verdict, f64)> {
        let chain = build_zero_cell_chain(&phi, depth, &mut stream(seed, i))?;
        let report = explosion_diagnostic(&chain, &rule)?;
        let last = *report.partial_sums.last().expect("depth >= 1");
        Ok((
            vec![
                (rep_name(i, "chain.csv"), io::write_zero_cell_chain(&chain).into_bytes()),
                (rep_name(i, "explosion.csv"), io::write_explosion_report(&report).into_bytes()),
            ],
            report.verdict,
            last,
        ))
    })?;
    let mut summary = format!("# rule = {rule}\n# depth = {depth}\nreplicate,verdict,partial_sum\n");
    let mut counts = [0usize; 3];
    for (i, (_, v, s)) in reps.iter().enumerate() {
        summary.push_str(&format!("{i},{v},{s:?}\n"));
        counts[*v as usize] += 1;
    }
    let mut files: Files = reps.into_iter().flat_map(|r| r.0).collect();
    files.push(("summary.csv".into(), summary.into_bytes()));
    finish("zero-chain", cfg, seed, out, files)?;
    println!(
        "converging {} / diverging {} / inconclusive {}",
        counts[Verdict::Converging as usize],
        counts[Verdict::Diverging as usize],
        counts[Verdict::Inconclusive as usize]
    );
    Ok(EXIT_OK)
}

/// Runs of the abstract fragmentation chain and a pooled GoF report.
pub fn fragment(cfg: &RunConfig, seed: u64, out: &Path, parallel: bool) -> Result<i32> {
    let n = cfg.n_jumps.ok_or_else(|| anyhow!("config needs n_jumps"))?;
    let runs = over_replicates(cfg.replicates, parallel, |i| Ok(run_fragmentation(n, &mut stream(seed, i))?))?;
    let xi: Vec<f64> = runs.iter().flat_map(|r| r.events.iter().map(|e| e.xi)).collect();
    let hold: Vec<f64> = runs.iter().flat_map(|r| r.events.iter().map(|e| e.holding)).collect();
    let mut gof = Vec::new();
    if xi.len() >= celldiv::stats::KS_MIN_N {
        gof.push(ks_test(&xi, &Reference::Uniform { low: 0.5, high: 1.0 })?);
        gof.push(ks_test(&hold, &Reference::Exponential { rate: 1.0 })?);
    }
    let mut files: Files = runs
        .iter()
        .enumerate()
        .map(|(i, r)| (rep_name(i as u64, "trace.csv"), io::write_frag_trace(r).into_bytes()))
        .collect();
    files.push(("gof.csv".into(), io::write_gof_csv(&gof).into_bytes()));
    finish("fragment", cfg, seed, out, files)?;
    for r in &gof {
        println!("{r}");
    }
    Ok(EXIT_OK)
}

/// `exp:RATE`, `gamma:SHAPE,RATE`, `uniform:LOW,HIGH` or `powermax:K`.
pub fn parse_reference(s: &str) -> Result<Reference> {
    let (name, args) = s.split_once(':').ok_or_else(|| anyhow!("reference {s:?} needs the form name:args"))?;
    let nums = args
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| anyhow!("bad number {x:?} in {s:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(match (name, nums.as_slice()) {
        ("exp", [rate]) => Reference::Exponential { rate: *rate },
        ("gamma", [shape, rate]) => Reference::Gamma { shape: *shape, rate: *rate },
        ("uniform", [low, high]) => Reference::Uniform { low: *low, high: *high },
        ("powermax", [k]) if k.fract() == 0.0 && *k >= 1.0 => Reference::PowerMax { k: *k as u32 },
        _ => bail!("unsupported reference {s:?}"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsTest {
    Cv,
    Ks,
    Poisson,
}

pub struct StatsArgs<'a> {
    pub input: &'a Path,
    pub test: StatsTest,
    pub reference: Option<&'a str>,
    pub against: Option<&'a Path>,
    pub mean: Option<f64>,
    pub level: f64,
}

fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_samples(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Exit code and report text. Usage errors are printed here and come back
/// with an empty report.
pub fn stats(args: &StatsArgs) -> Result<(i32, String)> {
    let xs = read_samples(args.input)?;
    if xs.is_empty() {
        eprintln!("error: {} contains no samples", args.input.display());
        return Ok((EXIT_USAGE, String::new()));
    }
    let gof = |r: GoFResult| -> (i32, String) {
        let r = r.at_level(args.level);
        let code = if r.passed { EXIT_OK } else { EXIT_FAILED };
        (code, format!("{r}\n{}", io::write_gof_csv(std::slice::from_ref(&r))))
    };
    Ok(match args.test {
        StatsTest::Cv => (EXIT_OK, io::summary_report(&cv_report(&xs)?)),
        StatsTest::Ks => match (args.reference, args.against) {
            (Some(r), None) => gof(ks_test(&xs, &parse_reference(r)?)?),
            (None, Some(p)) => gof(ks_two_sample(&xs, &read_samples(p)?)?),
            _ => {
                eprintln!("error: ks needs exactly one of --reference or --against");
                (EXIT_USAGE, String::new())
            }
        },
        StatsTest::Poisson => {
            let Some(mean) = args.mean else {
                eprintln!("error: poisson needs --mean");
                return Ok((EXIT_USAGE, String::new()));
            };
            let counts = xs
                .iter()
                .map(|&x| {
                    if x >= 0.0 && x.fract() == 0.0 {
                        Ok(x as u64)
                    } else {
                        Err(anyhow!("count {x} is not a non-negative integer"))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            gof(poisson_count_test(&counts, mean)?)
        }
    })
}

/// Runs the acceptance suite (or the listed criteria) and returns a
/// pass/fail table.
pub fn acceptance(seed: u64, only: &[String]) -> Result<(i32, String)> {
    let ids: Vec<&str> = if only.is_empty() {
        CRITERIA.to_vec()
    } else {
        only.iter().map(String::as_str).collect()
    };
    let mut table = format!("# seed = {seed}\n# level = {DEFAULT_LEVEL}\n");
    let mut all = true;
    for id in ids {
        let o = run_criterion(id, seed)?;
        all &= o.passed;
        table.push_str(&o.line());
        table.push('\n');
    }
    Ok((if all { EXIT_OK } else { EXIT_FAILED }, table))
}

/// Draws the snapshot at `time` (default: the end of the log) of an event
/// log file.
pub fn render(events: &Path, time: Option<f64>, color_by_birth: bool, width: f64) -> Result<String> {
    let text = std::fs::read_to_string(events).with_context(|| format!("reading {}", events.display()))?;
    let log = io::parse_event_log(&text).with_context(|| format!("parsing {}", events.display()))?;
    let snap = snapshot_at(&log, time.unwrap_or(log.horizon()))?;
    let window = bounding_window(log.window())?;
    let style = SvgStyle {
        width,
        color_by_birth,
        ..SvgStyle::default()
    };
    Ok(render_svg(&snap, &window, &style)?)
}
