//! Poisson point processes of interferers on a square region.
//!
//! The infinite plane is approximated by a finite square with the reference
//! receiver at its center. Edge effects are not corrected.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{ensure, Error, Result};
use crate::rng::SeedStream;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn offset(&self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// Axis-aligned square observation window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    side: f64,
    center: Point,
}

impl Region {
    pub fn new(side: f64, center: Point) -> Result<Self> {
        ensure(
            side.is_finite() && side > 0.0,
            "side_length",
            "must be positive and finite",
        )?;
        Ok(Region { side, center })
    }

    /// Square of the given side centered at the origin.
    pub fn square(side: f64) -> Result<Self> {
        Region::new(side, Point::ORIGIN)
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn contains(&self, p: &Point) -> bool {
        let h = self.side / 2.0;
        (p.x - self.center.x).abs() <= h && (p.y - self.center.y).abs() <= h
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Region {
        Region {
            side: self.side,
            center: self.center.offset(dx, dy),
        }
    }
}

/// One sampled set of interferer locations.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRealization {
    pub points: Vec<Point>,
    pub intensity: f64,
    pub seed_tag: Option<SeedStream>,
}

impl FieldRealization {
    /// A hand-placed field, mostly useful for tests.
    pub fn from_points(points: Vec<Point>) -> Self {
        FieldRealization {
            points,
            intensity: f64::NAN,
            seed_tag: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> FieldRealization {
        FieldRealization {
            points: self.points.iter().map(|p| p.offset(dx, dy)).collect(),
            intensity: self.intensity,
            seed_tag: self.seed_tag,
        }
    }
}

/// Poisson(λ·area) points placed uniformly in `region`.
pub fn sample_field(intensity: f64, region: &Region, stream: SeedStream) -> Result<FieldRealization> {
    ensure(
        intensity.is_finite() && intensity >= 0.0,
        "intensity",
        "must be a finite nonnegative density",
    )?;
    let mut rng = stream.rng();
    let mean = intensity * region.area();
    let count = if mean > 0.0 {
        let poisson = Poisson::new(mean).map_err(|e| Error::invalid("intensity", e.to_string()))?;
        poisson.sample(&mut rng) as usize
    } else {
        0
    };
    let c = region.center();
    let s = region.side();
    let points = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            Point::new(c.x + s * (u - 0.5), c.y + s * (v - 0.5))
        })
        .collect();
    Ok(FieldRealization {
        points,
        intensity,
        seed_tag: Some(stream),
    })
}

/// Distance from `query` to the closest point, `None` for an empty field.
pub fn nearest_interferer_distance(field: &FieldRealization, query: Point) -> Option<f64> {
    field
        .points
        .iter()
        .map(|p| p.distance_sq(&query))
        .min_by(f64::total_cmp)
        .map(f64::sqrt)
}

/// P{nearest point of a planar PPP lies within `d`} = 1 − exp(−πλd²).
pub fn nearest_distance_cdf(d: f64, intensity: f64) -> Result<f64> {
    ensure(d >= 0.0, "d", "distance must be nonnegative")?;
    ensure(intensity >= 0.0, "intensity", "must be nonnegative")?;
    Ok(-(-std::f64::consts::PI * intensity * d * d).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_intensity_is_empty() {
        let region = Region::square(100.0).unwrap();
        let f = sample_field(0.0, &region, SeedStream::from_master(1)).unwrap();
        assert!(f.is_empty());
        assert_eq!(nearest_interferer_distance(&f, Point::ORIGIN), None);
    }

    #[test]
    fn rejects_bad_inputs() {
        let region = Region::square(10.0).unwrap();
        assert!(sample_field(-1.0, &region, SeedStream::from_master(1)).is_err());
        assert!(Region::square(0.0).is_err());
        assert!(Region::square(-3.0).is_err());
        assert!(nearest_distance_cdf(-0.1, 1.0).is_err());
    }

    #[test]
    fn deterministic_per_stream() {
        let region = Region::square(30.0).unwrap();
        let s = SeedStream::from_master(42);
        let a = sample_field(1.0, &region, s).unwrap();
        let b = sample_field(1.0, &region, s).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|p| region.contains(p)));
    }

    #[test]
    fn three_four_five() {
        let f = FieldRealization::from_points(vec![Point::new(3.0, 4.0)]);
        assert_eq!(nearest_interferer_distance(&f, Point::ORIGIN), Some(5.0));
    }

    #[test]
    fn cdf_values() {
        assert_abs_diff_eq!(nearest_distance_cdf(1.0, 1.0).unwrap(), 0.9568, epsilon = 5e-5);
        assert_eq!(nearest_distance_cdf(0.0, 1.0).unwrap(), 0.0);
        // 1 - e^{-0.4π}
        assert_abs_diff_eq!(nearest_distance_cdf(2.0, 0.1).unwrap(), 0.7154, epsilon = 5e-5);
    }

    #[test]
    fn mean_count_over_seeds() {
        let region = Region::square(100.0).unwrap();
        let root = SeedStream::from_master(3);
        let seeds = 1000;
        let total: usize = (0..seeds)
            .map(|i| {
                sample_field(1.0, &region, root.derive(crate::rng::Purpose::Trial, i))
                    .unwrap()
                    .len()
            })
            .sum();
        let mean = total as f64 / seeds as f64;
        assert!((mean - 10_000.0).abs() <= 3.0 * (10_000.0f64 / 1000.0).sqrt());
    }
}
