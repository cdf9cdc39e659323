//! Run configuration files.
//!
//! A config is a TOML document:
//!
//! ```toml
//! t_max = 10.0
//! replicates = 4
//!
//! [window]
//! lower = [0.0, 0.0]
//! upper = [1.0, 1.0]
//!
//! [phi]
//! mondrian = [0.5, 0.5]
//!
//! [rule]
//! name = "intrinsic-volume"
//! n = 2
//! alpha = 1.0
//! ```
//!
//! Parsing checks every value against the simulator's preconditions and
//! reports the offending line.

use anyhow::{anyhow, bail, Result};
use serde::{Deserialize, Serialize};

use celldiv::division::Caps;
use celldiv::geometry::{Cuboid, DirectionalDistribution, LifetimeRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal `--seed` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_jumps: Option<usize>,
    /// Depth of the backward zero-cell chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default = "one")]
    pub replicates: u64,
    #[serde(default)]
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleSpec>,
    #[serde(default)]
    pub caps: CapsSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// The process started from the window at time 0.
    #[default]
    Window,
    /// The whole-space process cut out around the window.
    Cutout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Exactly one of the three forms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mondrian: Option<Vec<f64>>,
    /// `[ux, uy, weight]` triples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<[f64; 3]>>,
    /// Number of equally spaced directions on the half circle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isotropic: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    /// `lambda`, `sum-of-sides`, `intrinsic-volume` or `constant`.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_events: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_cell_volume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Extra snapshot times besides the final one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<f64>,
    /// Write an SVG of the final snapshot (2-d only).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub svg: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub color_by_birth: bool,
}

/// 1-based line of `key` inside `[table]` (or at top level), if found.
fn line_of(text: &str, table: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        let l = line.trim();
        if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            continue;
        }
        if current.as_deref() == table {
            if let Some((k, _)) = l.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    // The table itself, for keys that are missing.
    table.and_then(|t| text.lines().position(|l| l.trim() == format!("[{t}]")).map(|i| i + 1))
}

/// Parsed text plus the source, for line-precise validation messages.
pub struct Source<'a> {
    text: &'a str,
    name: &'a str,
}

impl Source<'_> {
    fn err(&self, table: Option<&str>, key: &str, msg: impl std::fmt::Display) -> anyhow::Error {
        let full = match table {
            Some(t) => format!("{t}.{key}"),
            None => key.to_string(),
        };
        match line_of(self.text, table, key) {
            Some(n) => anyhow!("{}:{n}: {full}: {msg}", self.name),
            None => anyhow!("{}: {full}: {msg}", self.name),
        }
    }
}

impl RunConfig {
    /// Parses and validates; `name` labels error messages.
    pub fn parse(text: &str, name: &str) -> Result<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].lines().count().max(1));
            match line {
                Some(n) => anyhow!("{name}:{n}: {}", e.message()),
                None => anyhow!("{name}: {}", e.message()),
            }
        })?;
        cfg.check(&Source { text, name })?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn check(&self, src: &Source) -> Result<()> {
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(src.err(None, "t_max", format!("must be positive and finite, got {t}")));
            }
        }
        if self.n_jumps == Some(0) {
            return Err(src.err(None, "n_jumps", "must be at least 1"));
        }
        if self.depth == Some(0) {
            return Err(src.err(None, "depth", "must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(src.err(None, "replicates", "must be at least 1"));
        }
        let window = match &self.window {
            Some(w) => Some(w.cuboid().map_err(|e| src.err(Some("window"), "lower", e))?),
            None => None,
        };
        let phi = match &self.phi {
            Some(p) => Some(p.distribution().map_err(|e| src.err(Some("phi"), p.key(), e))?),
            None => None,
        };
        if let (Some(w), Some(p)) = (&window, &phi) {
            if w.dim() != p.dim() {
                return Err(src.err(
                    Some("phi"),
                    self.phi.as_ref().map_or("mondrian", PhiSpec::key),
                    format!("dimension {} does not match the window's {}", p.dim(), w.dim()),
                ));
            }
        }
        if let Some(r) = &self.rule {
            let rule = r.rule().map_err(|e| src.err(Some("rule"), "name", e))?;
            let dim = window.as_ref().map(Cuboid::dim).or(phi.as_ref().map(DirectionalDistribution::dim));
            if let Some(d) = dim {
                rule.validate(d).map_err(|e| src.err(Some("rule"), "n", e))?;
            }
            if self.construction == Construction::Cutout && rule.window_only() {
                return Err(src.err(Some("rule"), "alpha", "exponents below 1 are only supported with construction = \"window\""));
            }
        }
        if let Some(m) = self.caps.max_events {
            if m == 0 {
                return Err(src.err(Some("caps"), "max_events", "must be at least 1"));
            }
        }
        if let Some(v) = self.caps.min_cell_volume {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(src.err(Some("caps"), "min_cell_volume", format!("must be >= 0, got {v}")));
            }
        }
        for &t in &self.output.snapshot_times {
            if !(t >= 0.0 && t.is_finite()) || self.t_max.is_some_and(|m| t > m) {
                return Err(src.err(Some("output"), "snapshot_times", format!("{t} is not in [0, t_max]")));
            }
        }
        Ok(())
    }

    pub fn caps(&self) -> Caps {
        let d = Caps::default();
        Caps {
            max_events: self.caps.max_events.unwrap_or(d.max_events),
            min_cell_volume: self.caps.min_cell_volume.unwrap_or(d.min_cell_volume),
        }
    }

    pub fn require_window(&self) -> Result<Cuboid> {
        self.window.as_ref().ok_or_else(|| anyhow!("config needs a [window] table"))?.cuboid()
    }

    pub fn require_phi(&self) -> Result<DirectionalDistribution> {
        self.phi.as_ref().ok_or_else(|| anyhow!("config needs a [phi] table"))?.distribution()
    }

    pub fn require_rule(&self) -> Result<LifetimeRule> {
        self.rule.as_ref().ok_or_else(|| anyhow!("config needs a [rule] table"))?.rule()
    }

    pub fn require_t_max(&self) -> Result<f64> {
        self.t_max.ok_or_else(|| anyhow!("config needs t_max"))
    }
}

impl WindowSpec {
    pub fn cuboid(&self) -> Result<Cuboid> {
        if self.lower.len() != self.upper.len() {
            bail!("lower has {} coordinates, upper {}", self.lower.len(), self.upper.len());
        }
        Ok(Cuboid::new(self.lower.clone(), self.upper.clone())?)
    }
}

impl PhiSpec {
    fn key(&self) -> &'static str {
        if self.atoms.is_some() {
            "atoms"
        } else if self.isotropic.is_some() {
            "isotropic"
        } else {
            "mondrian"
        }
    }

    pub fn distribution(&self) -> Result<DirectionalDistribution> {
        Ok(match (&self.mondrian, &self.atoms, self.isotropic) {
            (Some(w), None, None) => DirectionalDistribution::mondrian(w.clone())?,
            (None, Some(a), None) => {
                let atoms: Vec<([f64; 2], f64)> = a.iter().map(|[x, y, w]| ([*x, *y], *w)).collect();
                DirectionalDistribution::atoms_2d(&atoms)?
            }
            (None, None, Some(n)) => DirectionalDistribution::isotropic_grid(n)?,
            _ => bail!("give exactly one of mondrian, atoms, isotropic"),
        })
    }
}

impl RuleSpec {
    pub fn rule(&self) -> Result<LifetimeRule> {
        let unused = |what: &str, present: bool| {
            if present {
                Err(anyhow!("rule {:?} takes no {what}", self.name))
            } else {
                Ok(())
            }
        };
        Ok(match self.name.as_str() {
            "lambda" | "stit" => {
                unused("n", self.n.is_some())?;
                unused("alpha", self.alpha.is_some())?;
                unused("c", self.c.is_some())?;
                LifetimeRule::LambdaMeasure
            }
            "sum-of-sides" => {
                unused("n", self.n.is_some())?;
                unused("alpha", self.alpha.is_some())?;
                unused("c", self.c.is_some())?;
                LifetimeRule::SumOfSides
            }
            "intrinsic-volume" => {
                unused("c", self.c.is_some())?;
                LifetimeRule::IntrinsicVolume {
                    n: self.n.ok_or_else(|| anyhow!("intrinsic-volume needs n"))?,
                    alpha: self.alpha.unwrap_or(1.0),
                }
            }
            "constant" => {
                unused("n", self.n.is_some())?;
                unused("alpha", self.alpha.is_some())?;
                let c = self.c.ok_or_else(|| anyhow!("constant needs c"))?;
                if !(c > 0.0 && c.is_finite()) {
                    bail!("c must be positive, got {c}");
                }
                LifetimeRule::Constant(c)
            }
            other => bail!("unknown rule {other:?} (lambda, sum-of-sides, intrinsic-volume, constant)"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
t_max = 5.0
replicates = 2

[window]
lower = [0.0, 0.0]
upper = [1.0, 2.0]

[phi]
mondrian = [0.5, 0.5]

[rule]
name = "sum-of-sides"
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = RunConfig::parse(GOOD, "run.toml").unwrap();
        assert_eq!(cfg.replicates, 2);
        assert_eq!(cfg.require_rule().unwrap(), LifetimeRule::SumOfSides);
        assert_eq!(RunConfig::parse(&cfg.to_toml(), "echo").unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_line() {
        let bad = GOOD.replace("mondrian = [0.5, 0.5]", "mondrian = [0.5, 0.6]");
        let e = RunConfig::parse(&bad, "run.toml").unwrap_err().to_string();
        assert!(e.starts_with("run.toml:10: phi.mondrian"), "{e}");

        let bad = GOOD.replace("t_max = 5.0", "t_max = -1.0");
        let e = RunConfig::parse(&bad, "run.toml").unwrap_err().to_string();
        assert!(e.starts_with("run.toml:2: t_max"), "{e}");

        let bad = GOOD.replace("replicates = 2", "replicates = \"two\"");
        let e = RunConfig::parse(&bad, "run.toml").unwrap_err().to_string();
        assert!(e.starts_with("run.toml:3:"), "{e}");

        let bad = GOOD.replace("name = \"sum-of-sides\"", "name = \"sum-of-sides\"\nalpha = 2.0");
        let e = RunConfig::parse(&bad, "run.toml").unwrap_err().to_string();
        assert!(e.contains("rule.name"), "{e}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let bad = GOOD.replace("mondrian = [0.5, 0.5]", "mondrian = [0.2, 0.3, 0.5]");
        assert!(RunConfig::parse(&bad, "x").unwrap_err().to_string().contains("dimension"));
    }
}
