use std::fmt;

use crate::error::{Error, Result};

/// A hyperplane `h(u, x) = {y : ⟨y, u⟩ = x}`.
///
/// Axis indices are zero based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyperplane {
    /// `{y : y_axis = offset}`.
    Axis { axis: usize, offset: f64 },
    /// Line in the plane with unit normal `normal`.
    Line { normal: [f64; 2], offset: f64 },
}

impl Hyperplane {
    pub fn axis(axis: usize, offset: f64) -> Self {
        Hyperplane::Axis { axis, offset }
    }

    /// Line with normal `normal` (normalized here).
    pub fn line(normal: [f64; 2], offset: f64) -> Result<Self> {
        let len = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
        if !(len.is_finite() && len > 0.0) || !offset.is_finite() {
            return Err(Error::InvalidGeometry("degenerate line normal".into()));
        }
        Ok(Hyperplane::Line {
            normal: [normal[0] / len, normal[1] / len],
            offset: offset / len,
        })
    }

    pub fn offset(&self) -> f64 {
        match *self {
            Hyperplane::Axis { offset, .. } | Hyperplane::Line { offset, .. } => offset,
        }
    }

    /// Signed value `⟨y, u⟩ - x`; the point lies on the plane when zero.
    pub fn signed_distance(&self, y: &[f64]) -> f64 {
        match *self {
            Hyperplane::Axis { axis, offset } => y[axis] - offset,
            Hyperplane::Line { normal, offset } => y[0] * normal[0] + y[1] * normal[1] - offset,
        }
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyperplane::Axis { axis, offset } => write!(f, "axis={axis} x={offset}"),
            Hyperplane::Line { normal, offset } => {
                write!(f, "line={} {} x={offset}", normal[0], normal[1])
            }
        }
    }
}
