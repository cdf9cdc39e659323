use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WEIGHT_TOL: f64 = 1e-12;

/// One direction of a 2-d atomic directional distribution, stored on the
/// upper half circle (`u` and `-u` describe the same family of lines).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAtom {
    pub direction: [f64; 2],
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Mondrian(Vec<f64>),
    Atoms2D(Vec<DirectionAtom>),
}

/// Even directional distribution `φ` of the hyperplane measure `Λ`.
///
/// The antipodal pair `±u` is stored once, carrying the full weight of the
/// pair. With this convention the measure of the hyperplanes hitting a cell
/// is `Λ([z]) = Σ_j p_j · width(z, u_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalDistribution {
    repr: Repr,
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {w} is not positive")));
        }
        total += w;
    }
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

impl DirectionalDistribution {
    /// Mondrian distribution with axis weights `p_1..p_d`.
    pub fn mondrian(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("Mondrian needs d >= 1".into()));
        }
        check_weights(weights.iter().copied())?;
        Ok(DirectionalDistribution {
            repr: Repr::Mondrian(weights),
        })
    }

    /// Mondrian distribution with `p_k = 1/d`.
    pub fn mondrian_uniform(dim: usize) -> Result<Self> {
        DirectionalDistribution::mondrian(vec![1.0 / dim as f64; dim])
    }

    /// Atomic distribution on lines in the plane. Directions are normalized
    /// and folded onto the upper half circle; parallel atoms are merged.
    pub fn atoms_2d(atoms: &[([f64; 2], f64)]) -> Result<Self> {
        let mut merged: Vec<DirectionAtom> = Vec::new();
        for &(u, w) in atoms {
            let len = (u[0] * u[0] + u[1] * u[1]).sqrt();
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::InvalidDistribution("zero or non-finite direction".into()));
            }
            // Unit vectors are kept bit-for-bit so that text round trips are exact.
            let mut u = if (len - 1.0).abs() > 4.0 * f64::EPSILON {
                [u[0] / len, u[1] / len]
            } else {
                u
            };
            if u[1] < 0.0 || (u[1] == 0.0 && u[0] < 0.0) {
                u = [-u[0], -u[1]];
            }
            match merged
                .iter_mut()
                .find(|a| (a.direction[0] * u[1] - a.direction[1] * u[0]).abs() < 1e-12)
            {
                Some(a) => a.weight += w,
                None => merged.push(DirectionAtom { direction: u, weight: w }),
            }
        }
        check_weights(merged.iter().map(|a| a.weight))?;
        if merged.len() < 2 {
            return Err(Error::InvalidDistribution(
                "all directions are parallel (concentrated on a great subsphere)".into(),
            ));
        }
        Ok(DirectionalDistribution {
            repr: Repr::Atoms2D(merged),
        })
    }

    /// `n` equally spaced line directions with equal weights, a discrete
    /// stand-in for the isotropic distribution.
    pub fn isotropic_grid(n: usize) -> Result<Self> {
        let atoms: Vec<([f64; 2], f64)> = (0..n)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / n as f64;
                ([a.cos(), a.sin()], 1.0 / n as f64)
            })
            .collect();
        DirectionalDistribution::atoms_2d(&atoms)
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Mondrian(w) => w.len(),
            Repr::Atoms2D(_) => 2,
        }
    }

    pub fn is_mondrian(&self) -> bool {
        matches!(self.repr, Repr::Mondrian(_))
    }

    /// Axis weights, for a Mondrian distribution.
    pub fn mondrian_weights(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Mondrian(w) => Some(w),
            Repr::Atoms2D(_) => None,
        }
    }

    /// Line directions, for a 2-d atomic distribution.
    pub fn atoms(&self) -> Option<&[DirectionAtom]> {
        match &self.repr {
            Repr::Mondrian(_) => None,
            Repr::Atoms2D(a) => Some(a),
        }
    }
}

impl fmt::Display for DirectionalDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Mondrian(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "mondrian({})", parts.join(","))
            }
            Repr::Atoms2D(atoms) => {
                let parts: Vec<String> = atoms
                    .iter()
                    .map(|a| format!("{} {} {}", a.direction[0], a.direction[1], a.weight))
                    .collect();
                write!(f, "atoms({})", parts.join(";"))
            }
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidDistribution(format!("not a number: {s:?}")))
}

impl FromStr for DirectionalDistribution {
    type Err = Error;

    /// Parses `mondrian(p1,…,pd)`, `atoms(ux uy w; …)` or `isotropic(n)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, body) = s
            .strip_suffix(')')
            .and_then(|rest| rest.split_once('('))
            .ok_or_else(|| Error::InvalidDistribution(format!("expected name(...), got {s:?}")))?;
        match name.trim() {
            "mondrian" => {
                let w = body.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
                DirectionalDistribution::mondrian(w)
            }
            "atoms" => {
                let atoms = body
                    .split(';')
                    .map(|atom| {
                        let v = atom.split_whitespace().map(parse_f64).collect::<Result<Vec<_>>>()?;
                        match v.as_slice() {
                            [x, y, w] => Ok(([*x, *y], *w)),
                            _ => Err(Error::InvalidDistribution(format!(
                                "atom needs 'ux uy weight', got {atom:?}"
                            ))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                DirectionalDistribution::atoms_2d(&atoms)
            }
            "isotropic" => {
                let n: usize = body
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidDistribution(format!("bad atom count {body:?}")))?;
                DirectionalDistribution::isotropic_grid(n)
            }
            other => Err(Error::InvalidDistribution(format!("unknown distribution {other:?}"))),
        }
    }
}
