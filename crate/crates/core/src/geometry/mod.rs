//! Cell geometries, the hyperplane measure `Λ` of a cell, life-time
//! functionals and cell splitting.

mod cuboid;
mod direction;
mod hyperplane;
mod lifetime;
mod polygon;

pub use cuboid::Cuboid;
pub use direction::{DirectionAtom, DirectionalDistribution};
pub use hyperplane::Hyperplane;
pub use lifetime::LifetimeRule;
pub use polygon::{ConvexPolygon2, Point2};

use rand::Rng;

use crate::error::{Error, Result};

/// Splits landing within this fraction of the cell diameter from the
/// boundary are treated as missing the interior.
pub const EPS_GEOM: f64 = 1e-12;

/// Redraws allowed in [`sample_dividing_hyperplane`] before giving up.
pub const MAX_RESAMPLE: usize = 64;

/// Geometry of one cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellGeometry {
    Cuboid(Cuboid),
    Polygon(ConvexPolygon2),
}

impl CellGeometry {
    pub fn dim(&self) -> usize {
        match self {
            CellGeometry::Cuboid(c) => c.dim(),
            CellGeometry::Polygon(_) => 2,
        }
    }

    /// `V_d`, the d-dimensional volume.
    pub fn volume(&self) -> f64 {
        match self {
            CellGeometry::Cuboid(c) => c.volume(),
            CellGeometry::Polygon(p) => p.area(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            CellGeometry::Cuboid(c) => c.diameter(),
            CellGeometry::Polygon(p) => p.diameter(),
        }
    }

    /// Lower corner of a cuboid, lexicographically smallest vertex of a
    /// polygon.
    pub fn reference_point(&self) -> Vec<f64> {
        match self {
            CellGeometry::Cuboid(c) => c.lower().to_vec(),
            CellGeometry::Polygon(p) => p.lowest_vertex().to_vec(),
        }
    }

    pub fn as_cuboid(&self) -> Option<&Cuboid> {
        match self {
            CellGeometry::Cuboid(c) => Some(c),
            CellGeometry::Polygon(_) => None,
        }
    }

    pub fn as_polygon(&self) -> Option<&ConvexPolygon2> {
        match self {
            CellGeometry::Cuboid(_) => None,
            CellGeometry::Polygon(p) => Some(p),
        }
    }

    /// Same region as a polygon (2-d only).
    pub fn to_polygon(&self) -> Result<ConvexPolygon2> {
        match self {
            CellGeometry::Cuboid(c) => ConvexPolygon2::from_cuboid(c),
            CellGeometry::Polygon(p) => Ok(p.clone()),
        }
    }
}

impl From<Cuboid> for CellGeometry {
    fn from(c: Cuboid) -> Self {
        CellGeometry::Cuboid(c)
    }
}

impl From<ConvexPolygon2> for CellGeometry {
    fn from(p: ConvexPolygon2) -> Self {
        CellGeometry::Polygon(p)
    }
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Axis(usize),
    Line([f64; 2]),
}

/// One atom of `φ` seen from a particular cell: its support interval and
/// its share `p_j · width` of `Λ([z])`.
#[derive(Debug, Clone, Copy)]
struct HitAtom {
    family: Family,
    lo: f64,
    hi: f64,
    mass: f64,
}

fn hit_atoms(z: &CellGeometry, phi: &DirectionalDistribution) -> Result<Vec<HitAtom>> {
    if z.dim() != phi.dim() {
        return Err(Error::Mismatch(format!(
            "cell has dimension {}, distribution has dimension {}",
            z.dim(),
            phi.dim()
        )));
    }
    match (z, phi.mondrian_weights(), phi.atoms()) {
        (CellGeometry::Cuboid(c), Some(weights), _) => Ok(weights
            .iter()
            .enumerate()
            .map(|(k, &p)| HitAtom {
                family: Family::Axis(k),
                lo: c.lower()[k],
                hi: c.upper()[k],
                mass: p * c.side(k),
            })
            .collect()),
        (CellGeometry::Cuboid(c), None, Some(atoms)) => Ok(atoms
            .iter()
            .map(|a| {
                let u = a.direction;
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for corner in c.corners() {
                    let s = corner[0] * u[0] + corner[1] * u[1];
                    lo = lo.min(s);
                    hi = hi.max(s);
                }
                HitAtom {
                    family: Family::Line(u),
                    lo,
                    hi,
                    mass: a.weight * (hi - lo),
                }
            })
            .collect()),
        (CellGeometry::Polygon(p), None, Some(atoms)) => Ok(atoms
            .iter()
            .map(|a| {
                let (lo, hi) = p.support(a.direction);
                HitAtom {
                    family: Family::Line(a.direction),
                    lo,
                    hi,
                    mass: a.weight * (hi - lo),
                }
            })
            .collect()),
        (CellGeometry::Polygon(_), Some(_), _) => Err(Error::Mismatch(
            "Mondrian distributions act on cuboid cells only".into(),
        )),
        _ => unreachable!("a distribution is either Mondrian or atomic"),
    }
}

/// `Λ([z])`, the measure of the hyperplanes hitting `z`.
///
/// For a cuboid under a Mondrian distribution this is `Σ_k p_k l^(k)`.
pub fn lambda_hit_rate(z: &CellGeometry, phi: &DirectionalDistribution) -> Result<f64> {
    Ok(hit_atoms(z, phi)?.iter().map(|a| a.mass).sum())
}

/// Intrinsic volume `V_n` of a cuboid: the elementary symmetric polynomial
/// of degree `n` in the side lengths.
pub fn intrinsic_volume(z: &Cuboid, n: usize) -> Result<f64> {
    let d = z.dim();
    if n == 0 || n > d {
        return Err(Error::OutOfRange(format!("intrinsic volume index {n} not in 1..={d}")));
    }
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, side) in z.sides().into_iter().enumerate() {
        for j in (1..=n.min(i + 1)).rev() {
            e[j] += e[j - 1] * side;
        }
    }
    Ok(e[n])
}

/// Life-time rate `G(z)` of a cell under `rule`.
pub fn lifetime_rate(rule: &LifetimeRule, z: &CellGeometry, phi: &DirectionalDistribution) -> Result<f64> {
    rule.validate(z.dim())?;
    match *rule {
        LifetimeRule::LambdaMeasure => lambda_hit_rate(z, phi),
        LifetimeRule::SumOfSides => match z {
            CellGeometry::Cuboid(c) => Ok(c.sum_of_sides()),
            CellGeometry::Polygon(_) => Err(Error::Mismatch("sum of sides needs a cuboid cell".into())),
        },
        LifetimeRule::IntrinsicVolume { n, alpha } => match z {
            CellGeometry::Cuboid(c) => {
                let v = intrinsic_volume(c, n)?;
                Ok(if alpha == 1.0 { v } else { v.powf(alpha) })
            }
            CellGeometry::Polygon(_) => Err(Error::Mismatch("intrinsic volume rules need cuboid cells".into())),
        },
        LifetimeRule::Constant(c) => Ok(c),
    }
}

fn plane_of(family: Family, offset: f64) -> Hyperplane {
    match family {
        Family::Axis(axis) => Hyperplane::Axis { axis, offset },
        Family::Line(normal) => Hyperplane::Line { normal, offset },
    }
}

fn draw_atom<R: Rng + ?Sized>(atoms: &[HitAtom], total: f64, rng: &mut R) -> HitAtom {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for a in atoms {
        acc += a.mass;
        if target < acc {
            return *a;
        }
    }
    // Rounding can leave `target` just above the last partial sum.
    *atoms.iter().rev().find(|a| a.mass > 0.0).expect("positive total mass")
}

/// Draws from `Λ([z])^{-1} Λ(· ∩ [z])` without any boundary rejection.
pub fn sample_hitting_hyperplane<R: Rng + ?Sized>(
    z: &CellGeometry,
    phi: &DirectionalDistribution,
    rng: &mut R,
) -> Result<Hyperplane> {
    let atoms = hit_atoms(z, phi)?;
    let total: f64 = atoms.iter().map(|a| a.mass).sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateCell("Λ([z]) = 0".into()));
    }
    let a = draw_atom(&atoms, total, rng);
    let offset = a.lo + rng.random::<f64>() * (a.hi - a.lo);
    Ok(plane_of(a.family, offset))
}

/// The Λ division rule: a random hyperplane through `z`, direction `u_j`
/// picked with probability `p_j·width(z,u_j)/Λ([z])` and offset uniform on
/// the support interval.
///
/// Offsets within `EPS_GEOM · diam(z)` of the boundary are redrawn.
pub fn sample_dividing_hyperplane<R: Rng + ?Sized>(
    z: &CellGeometry,
    phi: &DirectionalDistribution,
    rng: &mut R,
) -> Result<Hyperplane> {
    let atoms = hit_atoms(z, phi)?;
    let total: f64 = atoms.iter().map(|a| a.mass).sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateCell("Λ([z]) = 0".into()));
    }
    let eps = EPS_GEOM * z.diameter();
    for _ in 0..MAX_RESAMPLE {
        let a = draw_atom(&atoms, total, rng);
        let offset = a.lo + rng.random::<f64>() * (a.hi - a.lo);
        if offset - a.lo > eps && a.hi - offset > eps {
            return Ok(plane_of(a.family, offset));
        }
    }
    Err(Error::DegenerateCell(format!(
        "no interior split found in {MAX_RESAMPLE} draws"
    )))
}

/// Divides `z` along `h`. The first child lies on the side `⟨y,u⟩ ≤ x`.
///
/// Returns [`Error::SplitMissesInterior`] when `h` passes within
/// `EPS_GEOM · diam(z)` of the boundary or misses `z`.
pub fn split_cell(z: &CellGeometry, h: &Hyperplane) -> Result<(CellGeometry, CellGeometry)> {
    let eps = EPS_GEOM * z.diameter();
    match (z, h) {
        (CellGeometry::Cuboid(c), Hyperplane::Axis { axis, offset }) => {
            if *axis >= c.dim() {
                return Err(Error::Mismatch(format!("axis {axis} in dimension {}", c.dim())));
            }
            if !(offset - c.lower()[*axis] > eps && c.upper()[*axis] - offset > eps) {
                return Err(Error::SplitMissesInterior);
            }
            let (a, b) = c.split(*axis, *offset).ok_or(Error::SplitMissesInterior)?;
            Ok((a.into(), b.into()))
        }
        (_, Hyperplane::Line { normal, offset }) => split_polygon(&z.to_polygon()?, *normal, *offset, eps),
        (CellGeometry::Polygon(p), Hyperplane::Axis { axis, offset }) => {
            let normal = match axis {
                0 => [1.0, 0.0],
                1 => [0.0, 1.0],
                _ => return Err(Error::Mismatch(format!("axis {axis} in dimension 2"))),
            };
            split_polygon(p, normal, *offset, eps)
        }
    }
}

fn split_polygon(p: &ConvexPolygon2, normal: [f64; 2], offset: f64, eps: f64) -> Result<(CellGeometry, CellGeometry)> {
    let (lo, hi) = p.support(normal);
    if !(offset - lo > eps && hi - offset > eps) {
        return Err(Error::SplitMissesInterior);
    }
    let (a, b) = p.split(normal, offset).ok_or(Error::SplitMissesInterior)?;
    Ok((a.into(), b.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn cube(sides: &[f64]) -> CellGeometry {
        Cuboid::from_sides(sides).unwrap().into()
    }

    #[test]
    fn hit_rate_examples() {
        let phi3 = DirectionalDistribution::mondrian_uniform(3).unwrap();
        assert!((lambda_hit_rate(&cube(&[1.0, 1.0, 1.0]), &phi3).unwrap() - 1.0).abs() < 1e-15);
        let phi2 = DirectionalDistribution::mondrian(vec![0.5, 0.5]).unwrap();
        assert_eq!(lambda_hit_rate(&cube(&[2.0, 3.0]), &phi2).unwrap(), 2.5);
        // 1-homogeneous
        let scaled = Cuboid::from_sides(&[2.0, 3.0]).unwrap().scaled(3.0);
        assert_eq!(lambda_hit_rate(&scaled.into(), &phi2).unwrap(), 7.5);
    }

    #[test]
    fn hit_rate_mismatches() {
        let phi2 = DirectionalDistribution::mondrian(vec![0.5, 0.5]).unwrap();
        assert!(matches!(lambda_hit_rate(&cube(&[1.0, 1.0, 1.0]), &phi2), Err(Error::Mismatch(_))));
        let tri = ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(lambda_hit_rate(&tri.into(), &phi2), Err(Error::Mismatch(_))));
    }

    #[test]
    fn atomic_distribution_on_cuboid_and_polygon_agree() {
        let phi = DirectionalDistribution::isotropic_grid(5).unwrap();
        let c = Cuboid::from_sides(&[2.0, 0.5]).unwrap();
        let poly = ConvexPolygon2::from_cuboid(&c).unwrap();
        let a = lambda_hit_rate(&c.into(), &phi).unwrap();
        let b = lambda_hit_rate(&poly.into(), &phi).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn intrinsic_volume_examples() {
        let z = Cuboid::from_sides(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(intrinsic_volume(&z, 1).unwrap(), 6.0);
        assert_eq!(intrinsic_volume(&z, 2).unwrap(), 11.0);
        assert_eq!(intrinsic_volume(&z, 3).unwrap(), 6.0);
        assert!(intrinsic_volume(&z, 0).is_err());
        assert!(intrinsic_volume(&z, 4).is_err());
        let line = Cuboid::from_sides(&[2.5]).unwrap();
        assert_eq!(intrinsic_volume(&line, 1).unwrap(), 2.5);
    }

    #[test]
    fn lifetime_rate_examples() {
        let phi3 = DirectionalDistribution::mondrian_uniform(3).unwrap();
        let z = cube(&[1.0, 2.0, 3.0]);
        assert_eq!(lifetime_rate(&LifetimeRule::SumOfSides, &z, &phi3).unwrap(), 6.0);
        let unit = cube(&[1.0, 1.0, 1.0]);
        assert_eq!(lifetime_rate(&LifetimeRule::volume(3), &unit, &phi3).unwrap(), 1.0);
        assert_eq!(lifetime_rate(&LifetimeRule::Constant(2.5), &z, &phi3).unwrap(), 2.5);
        let sq = LifetimeRule::IntrinsicVolume { n: 3, alpha: 2.0 };
        assert_eq!(lifetime_rate(&sq, &z, &phi3).unwrap(), 36.0);
        let tri: CellGeometry = ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap().into();
        let iso = DirectionalDistribution::isotropic_grid(4).unwrap();
        assert!(lifetime_rate(&LifetimeRule::SumOfSides, &tri, &iso).is_err());
        assert!(lifetime_rate(&LifetimeRule::LambdaMeasure, &tri, &iso).is_ok());
    }

    #[test]
    fn uniform_mondrian_lambda_is_scaled_sum_of_sides() {
        let mut rng = stream(7, 0);
        for d in 1..=4 {
            let phi = DirectionalDistribution::mondrian_uniform(d).unwrap();
            for _ in 0..50 {
                let sides: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 10.0 + 0.01).collect();
                let z = cube(&sides);
                let lam = lifetime_rate(&LifetimeRule::LambdaMeasure, &z, &phi).unwrap();
                let s = lifetime_rate(&LifetimeRule::SumOfSides, &z, &phi).unwrap();
                assert!((lam - s / d as f64).abs() <= 4.0 * f64::EPSILON * lam);
            }
        }
    }

    #[test]
    fn split_examples() {
        let (a, b) = split_cell(&cube(&[1.0, 1.0]), &Hyperplane::axis(0, 0.25)).unwrap();
        assert_eq!(a.as_cuboid().unwrap().sides(), vec![0.25, 1.0]);
        assert_eq!(b.as_cuboid().unwrap().sides(), vec![0.75, 1.0]);
        assert_eq!(
            split_cell(&cube(&[1.0, 1.0]), &Hyperplane::axis(0, 1.0)),
            Err(Error::SplitMissesInterior)
        );
        assert_eq!(
            split_cell(&cube(&[1.0, 1.0]), &Hyperplane::axis(1, 1e-14)),
            Err(Error::SplitMissesInterior)
        );
        let tri: CellGeometry = ConvexPolygon2::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap().into();
        let (l, r) = split_cell(&tri, &Hyperplane::axis(0, 0.5)).unwrap();
        assert!((l.volume() - 0.375).abs() < 1e-15);
        assert!((r.volume() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn dividing_plane_is_degenerate_free() {
        let phi = DirectionalDistribution::mondrian(vec![0.5, 0.5]).unwrap();
        let mut rng = stream(1, 0);
        let z = cube(&[1.0, 1.0]);
        for _ in 0..1000 {
            let h = sample_dividing_hyperplane(&z, &phi, &mut rng).unwrap();
            assert!(split_cell(&z, &h).is_ok());
        }
    }

    #[test]
    fn thin_box_axis_choice_follows_widths() {
        // P(axis 0) = 10 / 10.0001 for sides (10, 1e-4) and p = (1/2, 1/2).
        let phi = DirectionalDistribution::mondrian(vec![0.5, 0.5]).unwrap();
        let z = cube(&[10.0, 1e-4]);
        let mut rng = stream(2, 0);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| matches!(sample_dividing_hyperplane(&z, &phi, &mut rng).unwrap(), Hyperplane::Axis { axis: 1, .. }))
            .count();
        let p = 1e-4 / 10.0001;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hits as f64 - n as f64 * p).abs() < 4.0 * sd + 1.0, "hits {hits}");
    }
}
