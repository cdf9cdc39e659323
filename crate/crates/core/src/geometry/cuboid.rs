use crate::error::{Error, Result};

/// Axis-aligned cuboid `[lower_0, upper_0] × … × [lower_{d-1}, upper_{d-1}]`.
///
/// This is the cell shape of every tessellation driven by a Mondrian
/// directional distribution. Side `k` is the extent along axis `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cuboid {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Cuboid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidGeometry("cuboid needs dimension >= 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidGeometry(format!(
                "corner dimensions differ ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidGeometry(format!("non-finite coordinate on axis {k}")));
            }
            if lo >= hi {
                return Err(Error::InvalidGeometry(format!(
                    "axis {k}: lower {lo} is not below upper {hi}"
                )));
            }
        }
        Ok(Cuboid { lower, upper })
    }

    /// `[0,1]^d`.
    pub fn unit(dim: usize) -> Result<Self> {
        Cuboid::new(vec![0.0; dim], vec![1.0; dim])
    }

    /// Cuboid anchored at the origin with the given side lengths.
    pub fn from_sides(sides: &[f64]) -> Result<Self> {
        Cuboid::new(vec![0.0; sides.len()], sides.to_vec())
    }

    /// Cube `[-half, half]^d`.
    pub fn centered_cube(dim: usize, half: f64) -> Result<Self> {
        Cuboid::new(vec![-half; dim], vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn sides(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.side(k)).collect()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.side(k)).product()
    }

    /// Sum of the side lengths, `S(z)`.
    pub fn sum_of_sides(&self) -> f64 {
        (0..self.dim()).map(|k| self.side(k)).sum()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim()).map(|k| self.side(k).powi(2)).sum::<f64>().sqrt()
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(k, &x)| self.lower[k] <= x && x <= self.upper[k])
    }

    pub fn contains_point_strictly(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(k, &x)| self.lower[k] < x && x < self.upper[k])
    }

    /// `other ⊆ self` (closed sets).
    pub fn contains(&self, other: &Cuboid) -> bool {
        (0..self.dim()).all(|k| self.lower[k] <= other.lower[k] && other.upper[k] <= self.upper[k])
    }

    /// Intersection with positive volume, if any.
    pub fn intersection(&self, other: &Cuboid) -> Option<Cuboid> {
        if self.dim() != other.dim() {
            return None;
        }
        let lower: Vec<f64> = (0..self.dim()).map(|k| self.lower[k].max(other.lower[k])).collect();
        let upper: Vec<f64> = (0..self.dim()).map(|k| self.upper[k].min(other.upper[k])).collect();
        Cuboid::new(lower, upper).ok()
    }

    pub fn translated(&self, shift: &[f64]) -> Cuboid {
        Cuboid {
            lower: self.lower.iter().zip(shift).map(|(a, s)| a + s).collect(),
            upper: self.upper.iter().zip(shift).map(|(a, s)| a + s).collect(),
        }
    }

    /// Image under `x ↦ factor·x`, `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Cuboid {
        Cuboid {
            lower: self.lower.iter().map(|a| a * factor).collect(),
            upper: self.upper.iter().map(|a| a * factor).collect(),
        }
    }

    /// Splits at `offset` on `axis` into the lower and upper halves. The two
    /// children share the face `x_axis = offset` exactly.
    pub fn split(&self, axis: usize, offset: f64) -> Option<(Cuboid, Cuboid)> {
        if axis >= self.dim() || !(self.lower[axis] < offset && offset < self.upper[axis]) {
            return None;
        }
        let mut low = self.clone();
        let mut high = self.clone();
        low.upper[axis] = offset;
        high.lower[axis] = offset;
        Some((low, high))
    }

    /// The `2^d` corners, in binary order on the axes (bit `k` set means
    /// upper on axis `k`).
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|k| if mask >> k & 1 == 1 { self.upper[k] } else { self.lower[k] })
                    .collect()
            })
            .collect()
    }
}
