//! Convex obstacles and outer region descriptions.

use crate::vecn::VecN;

/// A closed convex obstacle `E`. Domains live in the complement `E^c`.
#[derive(Debug, Clone)]
pub enum ConvexObstacle {
    /// `E = { x : <x, normal> <= offset }` with a unit normal.
    HalfSpace { normal: VecN, offset: f64 },
    /// `E = closed ball B_R(center)`.
    Ball { center: VecN, radius: f64 },
    /// Intersection of half-spaces `{ <x, n_i> <= c_i }`.
    Polytope(Vec<(VecN, f64)>),
}

impl ConvexObstacle {
    /// The canonical lower half-space `{ x_n <= 0 }`.
    pub fn lower_half_space(dim: usize) -> Self {
        ConvexObstacle::HalfSpace {
            normal: VecN::e_last(dim),
            offset: 0.0,
        }
    }

    /// A half-space pushed far away, for domains with no contact boundary.
    pub fn far_away(dim: usize) -> Self {
        ConvexObstacle::HalfSpace {
            normal: VecN::e_last(dim),
            offset: -1e6,
        }
    }

    /// Signed distance to `E`: positive outside, negative inside. For the
    /// polytope this is the facet-distance bound `max_i (<x,n_i> - c_i)`,
    /// which is exact wherever the nearest boundary point lies on a facet.
    pub fn signed_distance(&self, x: VecN) -> f64 {
        match self {
            ConvexObstacle::HalfSpace { normal, offset } => x.dot(normal) - offset,
            ConvexObstacle::Ball { center, radius } => (x - *center).norm() - radius,
            ConvexObstacle::Polytope(planes) => planes
                .iter()
                .map(|(n, c)| x.dot(n) - c)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Unit normal of `partial E` at (or near) `x`, oriented from `E^c`
    /// into `E` — the outward normal of a domain sitting on the obstacle.
    pub fn contact_normal(&self, x: VecN) -> VecN {
        match self {
            ConvexObstacle::HalfSpace { normal, .. } => -*normal,
            ConvexObstacle::Ball { center, .. } => {
                let d = x - *center;
                if d.norm() == 0.0 {
                    -VecN::e_last(x.dim())
                } else {
                    -d.normalized()
                }
            }
            ConvexObstacle::Polytope(planes) => {
                let (n, _) = planes
                    .iter()
                    .max_by(|a, b| {
                        let da = x.dot(&a.0) - a.1;
                        let db = x.dot(&b.0) - b.1;
                        da.partial_cmp(&db).unwrap()
                    })
                    .expect("polytope has at least one half-space");
                -*n
            }
        }
    }

    /// Diameter of the smallest geometric feature, used by the resolution
    /// check. `None` when the obstacle has no finite feature (half-space).
    pub fn feature_size(&self) -> Option<f64> {
        match self {
            ConvexObstacle::HalfSpace { .. } => None,
            ConvexObstacle::Ball { radius, .. } => Some(2.0 * radius),
            ConvexObstacle::Polytope(_) => None,
        }
    }
}

/// Bounded outer region; the domain is `outer` intersected with `E^c`.
#[derive(Debug, Clone)]
pub enum OuterShape {
    Box { min: VecN, max: VecN },
    Ball { center: VecN, radius: f64 },
    Union(Vec<OuterShape>),
}

impl OuterShape {
    pub fn contains(&self, x: VecN) -> bool {
        match self {
            OuterShape::Box { min, max } => (0..x.dim()).all(|k| x[k] >= min[k] && x[k] <= max[k]),
            OuterShape::Ball { center, radius } => (x - *center).norm() <= *radius,
            OuterShape::Union(parts) => parts.iter().any(|p| p.contains(x)),
        }
    }

    /// Axis-aligned bounding box.
    pub fn bbox(&self) -> (VecN, VecN) {
        match self {
            OuterShape::Box { min, max } => (*min, *max),
            OuterShape::Ball { center, radius } => {
                let mut min = *center;
                let mut max = *center;
                for k in 0..center.dim() {
                    min[k] -= radius;
                    max[k] += radius;
                }
                (min, max)
            }
            OuterShape::Union(parts) => {
                let mut iter = parts.iter().map(|p| p.bbox());
                let (mut min, mut max) = iter.next().expect("union is nonempty");
                for (lo, hi) in iter {
                    for k in 0..min.dim() {
                        min[k] = min[k].min(lo[k]);
                        max[k] = max[k].max(hi[k]);
                    }
                }
                (min, max)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_space_distance() {
        let e = ConvexObstacle::lower_half_space(2);
        assert_eq!(e.signed_distance(VecN::new(&[3.0, 2.0])), 2.0);
        assert_eq!(e.signed_distance(VecN::new(&[0.0, -1.0])), -1.0);
    }

    #[test]
    fn ball_distance_and_normal() {
        let e = ConvexObstacle::Ball {
            center: VecN::zero(2),
            radius: 1.0,
        };
        assert!((e.signed_distance(VecN::new(&[2.0, 0.0])) - 1.0).abs() < 1e-15);
        let nu = e.contact_normal(VecN::new(&[0.0, 1.5]));
        assert!((nu + VecN::new(&[0.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn convexity_midpoint_membership() {
        // if two points are in E, so is their midpoint
        let e = ConvexObstacle::Polytope(vec![
            (VecN::new(&[1.0, 0.0]), 1.0),
            (VecN::new(&[-1.0, 0.0]), 1.0),
            (VecN::new(&[0.0, 1.0]), 1.0),
            (VecN::new(&[0.0, -1.0]), 1.0),
        ]);
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = VecN::new(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let b = VecN::new(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            if e.signed_distance(a) <= 0.0 && e.signed_distance(b) <= 0.0 {
                assert!(e.signed_distance((a + b) * 0.5) <= 1e-12);
            }
        }
    }

    #[test]
    fn union_bbox() {
        let u = OuterShape::Union(vec![
            OuterShape::Box {
                min: VecN::new(&[0.0, 0.0]),
                max: VecN::new(&[1.0, 2.0]),
            },
            OuterShape::Box {
                min: VecN::new(&[-1.0, 0.0]),
                max: VecN::new(&[0.5, 1.0]),
            },
        ]);
        let (lo, hi) = u.bbox();
        assert_eq!(lo.comps(), &[-1.0, 0.0]);
        assert_eq!(hi.comps(), &[1.0, 2.0]);
        assert!(u.contains(VecN::new(&[-0.8, 0.5])));
        assert!(!u.contains(VecN::new(&[-0.8, 1.5])));
    }
}
