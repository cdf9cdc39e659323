use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The functional `G` that sets the exponential life-time rate of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LifetimeRule {
    /// `G(z) = Λ([z])`. Together with the Λ division rule this is STIT.
    LambdaMeasure,
    /// `G(z) = S(z)`, the sum of the side lengths of a cuboid.
    SumOfSides,
    /// `G(z) = V_n(z)^alpha`.
    IntrinsicVolume { n: usize, alpha: f64 },
    /// `G(z) = c`, the "equally likely" selection rule.
    Constant(f64),
}

impl LifetimeRule {
    /// Volume-weighted rule `V_d` in dimension `dim`.
    pub fn volume(dim: usize) -> Self {
        LifetimeRule::IntrinsicVolume { n: dim, alpha: 1.0 }
    }

    /// Checks the parameters against dimension `dim`.
    ///
    /// Exponents in `(0, 1)` are accepted; [`LifetimeRule::window_only`]
    /// reports them so the whole-space constructions can refuse them.
    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            LifetimeRule::IntrinsicVolume { n, alpha } => {
                if n == 0 || n > dim {
                    return Err(Error::InvalidRule(format!("intrinsic volume index {n} not in 1..={dim}")));
                }
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::InvalidRule(format!("exponent {alpha} must be positive")));
                }
            }
            LifetimeRule::Constant(c) => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::InvalidRule(format!("constant rate {c} must be positive")));
                }
            }
            LifetimeRule::LambdaMeasure | LifetimeRule::SumOfSides => {}
        }
        Ok(())
    }

    /// True for `V_n^α` with `α < 1`, which is only supported in a bounded
    /// window.
    pub fn window_only(&self) -> bool {
        matches!(*self, LifetimeRule::IntrinsicVolume { alpha, .. } if alpha < 1.0)
    }
}

impl fmt::Display for LifetimeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LifetimeRule::LambdaMeasure => write!(f, "lambda"),
            LifetimeRule::SumOfSides => write!(f, "sum-of-sides"),
            LifetimeRule::IntrinsicVolume { n, alpha } => write!(f, "intrinsic-volume(n={n},alpha={alpha})"),
            LifetimeRule::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

impl FromStr for LifetimeRule {
    type Err = Error;

    /// Accepts the `Display` forms plus the shorthands `stit`, `volume(n)`
    /// and `intrinsic-volume(n=2)` (exponent 1).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "lambda" | "stit" => return Ok(LifetimeRule::LambdaMeasure),
            "sum-of-sides" => return Ok(LifetimeRule::SumOfSides),
            _ => {}
        }
        let bad = || Error::InvalidRule(format!("cannot parse rule {s:?}"));
        let (name, body) = s.strip_suffix(')').and_then(|r| r.split_once('(')).ok_or_else(bad)?;
        match name.trim() {
            "constant" => body.trim().parse().map(LifetimeRule::Constant).map_err(|_| bad()),
            "volume" => body
                .trim()
                .parse()
                .map(LifetimeRule::volume)
                .map_err(|_| bad()),
            "intrinsic-volume" => {
                let mut n = None;
                let mut alpha = 1.0;
                for part in body.split(',') {
                    let (k, v) = part.split_once('=').ok_or_else(bad)?;
                    match k.trim() {
                        "n" => n = Some(v.trim().parse::<usize>().map_err(|_| bad())?),
                        "alpha" => alpha = v.trim().parse::<f64>().map_err(|_| bad())?,
                        _ => return Err(bad()),
                    }
                }
                Ok(LifetimeRule::IntrinsicVolume { n: n.ok_or_else(bad)?, alpha })
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(LifetimeRule::volume(2).validate(2).is_ok());
        assert!(LifetimeRule::IntrinsicVolume { n: 3, alpha: 1.0 }.validate(2).is_err());
        assert!(LifetimeRule::IntrinsicVolume { n: 0, alpha: 1.0 }.validate(2).is_err());
        assert!(LifetimeRule::Constant(0.0).validate(2).is_err());
        let sub = LifetimeRule::IntrinsicVolume { n: 1, alpha: 0.5 };
        assert!(sub.validate(2).is_ok());
        assert!(sub.window_only());
        assert!(!LifetimeRule::volume(3).window_only());
    }

    #[test]
    fn text_form_round_trips() {
        for rule in [
            LifetimeRule::LambdaMeasure,
            LifetimeRule::SumOfSides,
            LifetimeRule::IntrinsicVolume { n: 2, alpha: 1.5 },
            LifetimeRule::Constant(2.5),
        ] {
            assert_eq!(rule.to_string().parse::<LifetimeRule>().unwrap(), rule);
        }
        assert_eq!("volume(3)".parse::<LifetimeRule>().unwrap(), LifetimeRule::volume(3));
        assert_eq!("stit".parse::<LifetimeRule>().unwrap(), LifetimeRule::LambdaMeasure);
        assert!("intrinsic-volume(alpha=2)".parse::<LifetimeRule>().is_err());
    }
}
