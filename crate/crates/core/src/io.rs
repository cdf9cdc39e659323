//! Line-oriented text formats.
//!
//! Every data file starts with `# key = value` header lines followed by one
//! comma-separated header row and the data rows. Floats are written in
//! Rust's shortest round-trip form, so parsing a written file gives back
//! the same bits.

use std::fmt::Write as _;

use crate::division::{Caps, DivisionEvent, EventLog, TessellationSnapshot};
use crate::error::{Error, Result};
use crate::fragmentation::{FragmentationRun, TOP_MASSES};
use crate::geometry::{CellGeometry, ConvexPolygon2, Cuboid, DirectionalDistribution, Hyperplane, LifetimeRule};
use crate::hyperplane_process::{ExplosionReport, ZeroCellChain};
use crate::stats::{GoFResult, SampleSummary};

/// Format tag of event-log files.
pub const EVENT_LOG_FORMAT: &str = "celldiv-event-log 1";

const EVENT_COLUMNS: &str = "time,parent,direction,offset,child_a,child_b";

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn header(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "# {key} = {value}");
}

/// `cuboid:lo_0 lo_1:hi_0 hi_1` or `polygon:x y;x y;…`.
pub fn format_geometry(g: &CellGeometry) -> String {
    match g {
        CellGeometry::Cuboid(c) => {
            let join = |v: &[f64]| v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ");
            format!("cuboid:{}:{}", join(c.lower()), join(c.upper()))
        }
        CellGeometry::Polygon(p) => format!("polygon:{}", format_vertices(p)),
    }
}

fn format_vertices(p: &ConvexPolygon2) -> String {
    p.vertices()
        .iter()
        .map(|v| format!("{} {}", num(v[0]), num(v[1])))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|x| x.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("not a number: {x:?}"))))
        .collect()
}

fn parse_vertices(s: &str) -> Result<ConvexPolygon2> {
    let vs = s
        .split(';')
        .map(|v| match parse_floats(v)?.as_slice() {
            [x, y] => Ok([*x, *y]),
            _ => Err(Error::InvalidParameter(format!("vertex needs 'x y', got {v:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    ConvexPolygon2::new(vs)
}

pub fn parse_geometry(s: &str) -> Result<CellGeometry> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("cuboid:") {
        let (lo, hi) = rest
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("cuboid needs 'lower:upper', got {rest:?}")))?;
        Ok(Cuboid::new(parse_floats(lo)?, parse_floats(hi)?)?.into())
    } else if let Some(rest) = s.strip_prefix("polygon:") {
        Ok(parse_vertices(rest)?.into())
    } else {
        Err(Error::InvalidParameter(format!("unknown geometry {s:?}")))
    }
}

fn format_direction(h: &Hyperplane) -> String {
    match h {
        Hyperplane::Axis { axis, .. } => format!("axis={axis}"),
        Hyperplane::Line { normal, .. } => format!("line={} {}", num(normal[0]), num(normal[1])),
    }
}

/// Writes the configuration header and one row per division.
pub fn write_event_log(log: &EventLog) -> String {
    let mut out = String::new();
    header(&mut out, "format", EVENT_LOG_FORMAT);
    header(&mut out, "dim", log.window().dim());
    header(&mut out, "phi", log.phi());
    header(&mut out, "rule", log.rule());
    header(&mut out, "seed", log.seed().map_or("none".to_string(), |s| s.to_string()));
    header(&mut out, "window", format_geometry(log.window()));
    header(&mut out, "t_max", num(log.t_max()));
    header(&mut out, "max_events", log.caps().max_events);
    header(&mut out, "min_cell_volume", num(log.caps().min_cell_volume));
    header(&mut out, "truncated", log.truncated());
    header(&mut out, "events", log.events().len());
    for note in log.notes() {
        header(&mut out, "note", note);
    }
    let _ = writeln!(out, "{EVENT_COLUMNS}");
    for e in log.events() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(e.time),
            e.parent,
            format_direction(&e.plane),
            num(e.plane.offset()),
            e.children.0,
            e.children.1
        );
    }
    out
}

/// Header key/value pairs and the data rows of a file, with line numbers.
struct Table<'a> {
    meta: Vec<(usize, &'a str, &'a str)>,
    rows: Vec<(usize, &'a str)>,
}

fn split_table<'a>(text: &'a str, columns: &str) -> Result<Table<'a>> {
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    let mut seen_columns = false;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let (k, v) = h
                .split_once('=')
                .ok_or_else(|| Error::parse(n, "header line needs 'key = value'"))?;
            meta.push((n, k.trim(), v.trim()));
        } else if !seen_columns {
            if line != columns {
                return Err(Error::parse(n, format!("expected column row {columns:?}")));
            }
            seen_columns = true;
        } else {
            rows.push((n, line));
        }
    }
    if !seen_columns {
        return Err(Error::parse(text.lines().count(), "missing column row"));
    }
    Ok(Table { meta, rows })
}

impl Table<'_> {
    fn get(&self, key: &str) -> Result<(usize, &str)> {
        self.meta
            .iter()
            .find(|(_, k, _)| *k == key)
            .map(|&(n, _, v)| (n, v))
            .ok_or_else(|| Error::parse(0, format!("missing header key {key:?}")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (n, v) = self.get(key)?;
        v.parse().map_err(|_| Error::parse(n, format!("bad value for {key}: {v:?}")))
    }
}

fn field<T: std::str::FromStr>(n: usize, name: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(n, format!("bad {name}: {s:?}")))
}

/// Parses a file written by [`write_event_log`] and replays it.
pub fn parse_event_log(text: &str) -> Result<EventLog> {
    let t = split_table(text, EVENT_COLUMNS)?;
    let (n, format) = t.get("format")?;
    if format != EVENT_LOG_FORMAT {
        return Err(Error::parse(n, format!("unsupported format {format:?}")));
    }
    let at = |key: &str, e: Error| match (t.get(key), e) {
        (Ok((n, _)), Error::Parse { message, .. }) => Error::parse(n, message),
        (Ok((n, _)), e) => Error::parse(n, e.to_string()),
        (Err(e), _) => e,
    };
    let phi: DirectionalDistribution = t.get("phi")?.1.parse().map_err(|e| at("phi", e))?;
    let rule: LifetimeRule = t.get("rule")?.1.parse().map_err(|e| at("rule", e))?;
    let window = parse_geometry(t.get("window")?.1).map_err(|e| at("window", e))?;
    let seed = match t.get("seed")?.1 {
        "none" => None,
        _ => Some(t.parse::<u64>("seed")?),
    };
    let caps = Caps {
        max_events: t.parse("max_events")?,
        min_cell_volume: t.parse("min_cell_volume")?,
    };
    let notes = t.meta.iter().filter(|(_, k, _)| *k == "note").map(|(_, _, v)| v.to_string()).collect();
    let mut events = Vec::with_capacity(t.rows.len());
    for &(n, row) in &t.rows {
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != 6 {
            return Err(Error::parse(n, format!("expected 6 fields, got {}", f.len())));
        }
        let offset: f64 = field(n, "offset", f[3])?;
        let plane = if let Some(a) = f[2].strip_prefix("axis=") {
            Hyperplane::Axis {
                axis: field(n, "axis", a)?,
                offset,
            }
        } else if let Some(l) = f[2].strip_prefix("line=") {
            match parse_floats(l).map_err(|e| Error::parse(n, e.to_string()))?.as_slice() {
                [x, y] => Hyperplane::Line { normal: [*x, *y], offset },
                _ => return Err(Error::parse(n, "line direction needs two numbers")),
            }
        } else {
            return Err(Error::parse(n, format!("bad direction {:?}", f[2])));
        };
        events.push(DivisionEvent {
            time: field(n, "time", f[0])?,
            parent: field(n, "parent", f[1])?,
            plane,
            children: (field(n, "child_a", f[4])?, field(n, "child_b", f[5])?),
        });
    }
    EventLog::from_events(window, rule, phi, seed, t.parse("t_max")?, caps, events, t.parse("truncated")?, notes)
}

/// One row per cell: `id,birth,death,lo_0..,hi_0..` for cuboids, or
/// `id,birth,death,vertices` for polygons. `death` is empty for cells alive
/// at the end of the run.
pub fn write_snapshot(snapshot: &TessellationSnapshot) -> String {
    let mut out = String::new();
    header(&mut out, "time", num(snapshot.time));
    header(&mut out, "cells", snapshot.len());
    let columns = match snapshot.cells.first().map(|c| &c.geometry) {
        Some(CellGeometry::Cuboid(c)) => {
            let d = c.dim();
            let lo = (0..d).map(|k| format!("lo_{k}"));
            let hi = (0..d).map(|k| format!("hi_{k}"));
            ["id", "birth", "death"].iter().map(|s| s.to_string()).chain(lo).chain(hi).collect::<Vec<_>>().join(",")
        }
        _ => "id,birth,death,vertices".to_string(),
    };
    let _ = writeln!(out, "{columns}");
    for c in &snapshot.cells {
        let death = c.death.map_or(String::new(), num);
        let geom = match &c.geometry {
            CellGeometry::Cuboid(b) => b.lower().iter().chain(b.upper()).map(|&x| num(x)).collect::<Vec<_>>().join(","),
            CellGeometry::Polygon(p) => format_vertices(p),
        };
        let _ = writeln!(out, "{},{},{},{}", c.id, num(c.birth), death, geom);
    }
    out
}

/// Rows `j,partial_sum,increment`.
pub fn write_explosion_report(report: &ExplosionReport) -> String {
    let mut out = String::new();
    header(&mut out, "rule", report.rule);
    header(&mut out, "depth", report.depth);
    header(&mut out, "verdict", report.verdict);
    header(&mut out, "tail_max", num(report.tail_max));
    header(&mut out, "tail_min", num(report.tail_min));
    header(&mut out, "third_quartile_mean", num(report.third_quartile_mean));
    header(&mut out, "note", report.note());
    let _ = writeln!(out, "j,partial_sum,increment");
    for (j, (s, x)) in report.partial_sums.iter().zip(&report.increments).enumerate() {
        let _ = writeln!(out, "{j},{},{}", num(*s), num(*x));
    }
    out
}

/// Rows `j,time,axis,sign,sum_of_sides,volume` for the backward chain.
pub fn write_zero_cell_chain(chain: &ZeroCellChain) -> String {
    let mut out = String::new();
    header(&mut out, "phi", format!("mondrian({})", chain.weights().iter().map(|&w| w.to_string()).collect::<Vec<_>>().join(",")));
    header(&mut out, "depth", chain.depth());
    let _ = writeln!(out, "j,time,axis,sign,sum_of_sides,volume");
    for (j, b) in chain.boxes().iter().enumerate() {
        let (axis, sign) = chain.labels()[j];
        let _ = writeln!(
            out,
            "{j},{},{axis},{sign},{},{}",
            num(chain.time(j)),
            num(b.sum_of_sides()),
            num(b.volume())
        );
    }
    out
}

/// Rows `jump,time,holding,index,parent_mass,u,xi,fragments,mass_sum,top_1..top_5`
/// (missing top masses are left empty).
pub fn write_frag_trace(run: &FragmentationRun) -> String {
    let mut out = String::new();
    header(&mut out, "jumps", run.events.len());
    for note in &run.notes {
        header(&mut out, "note", note);
    }
    let tops = (1..=TOP_MASSES).map(|k| format!("top_{k}")).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "jump,time,holding,index,parent_mass,u,xi,fragments,mass_sum,{tops}");
    for (j, e) in run.events.iter().enumerate() {
        let top: Vec<String> = (0..TOP_MASSES).map(|k| e.top.get(k).map_or(String::new(), |&m| num(m))).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            j + 1,
            num(e.time),
            num(e.holding),
            e.index,
            num(e.parent_mass),
            num(e.u),
            num(e.xi),
            e.fragments,
            num(e.mass_sum),
            top.join(",")
        );
    }
    out
}

/// Rows `test,statistic,p_value,n,level,passed,note`.
pub fn write_gof_csv(results: &[GoFResult]) -> String {
    let mut out = String::from("test,statistic,p_value,n,level,passed,note\n");
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.test.replace(',', ";"),
            num(r.statistic),
            num(r.p_value),
            r.n,
            num(r.level),
            r.passed,
            r.note.replace(',', ";")
        );
    }
    out
}

/// Human-readable block, one `key = value` per line.
pub fn summary_report(s: &SampleSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n = {}", s.n);
    let _ = writeln!(out, "mean = {}", num(s.mean));
    let _ = writeln!(out, "variance = {}", num(s.variance));
    if let Some(cv) = s.cv {
        let _ = writeln!(out, "cv = {}", num(cv));
    }
    if let Some(se) = s.cv_se {
        let _ = writeln!(out, "cv_se = {}", num(se));
    }
    for (q, v) in &s.quantiles {
        let _ = writeln!(out, "q{} = {}", q, num(*v));
    }
    out
}

/// Reads one number per line; blank lines and `#` comments are skipped and
/// only the first comma-separated field counts.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let first = line.split(',').next().unwrap_or("");
        match first.trim().parse::<f64>() {
            Ok(x) => out.push(x),
            // A single non-numeric first row is a column header.
            Err(_) if out.is_empty() && i == text.lines().position(|l| !l.trim().is_empty() && !l.trim().starts_with('#')).unwrap_or(0) => {}
            Err(_) => return Err(Error::parse(i + 1, format!("not a number: {first:?}"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::division::{run_in_window, snapshot_at};
    use crate::rng::stream;

    #[test]
    fn event_log_round_trip_mondrian_and_atoms() {
        let w: CellGeometry = Cuboid::from_sides(&[1.5, 1.0]).unwrap().into();
        for phi in [
            DirectionalDistribution::mondrian(vec![0.3, 0.7]).unwrap(),
            DirectionalDistribution::isotropic_grid(5).unwrap(),
        ] {
            let mut log = run_in_window(&w, &LifetimeRule::LambdaMeasure, &phi, 6.0, &mut stream(1, 0), Caps::default()).unwrap();
            log.add_note("hello");
            let text = write_event_log(&log);
            let back = parse_event_log(&text).unwrap();
            assert_eq!(back, log);
            assert_eq!(write_event_log(&back), text);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let w: CellGeometry = Cuboid::unit(2).unwrap().into();
        let phi = DirectionalDistribution::mondrian_uniform(2).unwrap();
        let log = run_in_window(&w, &LifetimeRule::SumOfSides, &phi, 3.0, &mut stream(2, 0), Caps::default()).unwrap();
        let text = write_event_log(&log);
        let broken = text.replacen("axis=", "axes=", 1);
        match parse_event_log(&broken) {
            Err(Error::Parse { line, .. }) => assert!(line > 10),
            other => panic!("unexpected {other:?}"),
        }
        let bad_rule = text.replace("# rule = sum-of-sides", "# rule = nonsense");
        assert!(matches!(parse_event_log(&bad_rule), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn snapshot_rows() {
        let w: CellGeometry = Cuboid::unit(2).unwrap().into();
        let phi = DirectionalDistribution::mondrian_uniform(2).unwrap();
        let log = run_in_window(&w, &LifetimeRule::SumOfSides, &phi, 3.0, &mut stream(3, 0), Caps::default()).unwrap();
        let snap = snapshot_at(&log, 3.0).unwrap();
        let text = write_snapshot(&snap);
        assert!(text.contains("id,birth,death,lo_0,lo_1,hi_0,hi_1"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), snap.len() + 1);
    }

    #[test]
    fn geometry_text() {
        let c: CellGeometry = Cuboid::new(vec![-1.0, 1e-300], vec![2.0, 0.25]).unwrap().into();
        assert_eq!(parse_geometry(&format_geometry(&c)).unwrap(), c);
        let p: CellGeometry = ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0], [0.3, 0.7]]).unwrap().into();
        assert_eq!(parse_geometry(&format_geometry(&p)).unwrap(), p);
        assert!(parse_geometry("sphere:1").is_err());
    }

    #[test]
    fn samples_parse() {
        assert_eq!(parse_samples("# c\nvalue\n1.5\n\n2,x\n").unwrap(), vec![1.5, 2.0]);
        assert!(parse_samples("1\nfoo\n").is_err());
        assert!(parse_samples("").unwrap().is_empty());
    }
}
