use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Convex hull of a finite planar point set, vertices counter-clockwise.
///
/// Degenerate inputs give one vertex (a point) or two (a segment).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexHull {
    vertices: Vec<C64>,
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

impl ConvexHull {
    /// Andrew's monotone chain; collinear points are dropped.
    pub fn new(points: &[C64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("convex hull of an empty set".into()));
        }
        let mut pts: Vec<C64> = points.to_vec();
        pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        pts.dedup();
        if pts.len() <= 2 {
            return Ok(ConvexHull { vertices: pts });
        }
        let mut lower: Vec<C64> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<C64> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Ok(ConvexHull { vertices: lower })
    }

    pub fn vertices(&self) -> &[C64] {
        &self.vertices
    }

    /// Euclidean distance from `p` to the hull, zero inside.
    pub fn distance(&self, p: C64) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::INFINITY,
            1 => (p - v[0]).norm(),
            2 => segment_distance(p, v[0], v[1]),
            n => {
                let inside = (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n)
                        .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    /// Whether `p` lies within `tol` of the hull.
    pub fn contains(&self, p: C64, tol: f64) -> bool {
        self.distance(p) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn square_hull() {
        let h = ConvexHull::new(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert_eq!(h.vertices().len(), 4);
        assert!(h.contains(c(0.0, 0.0), 1e-12));
        assert!(!h.contains(c(0.6, 0.6), 1e-12));
        assert!(h.contains(c(0.5, 0.5), 1e-12));
    }

    #[test]
    fn degenerate_hulls() {
        let p = c(0.3, -2.0);
        let h = ConvexHull::new(&[p, p]).unwrap();
        assert_eq!(h.vertices(), &[p]);
        assert!(h.contains(p, 0.0));
        let s = ConvexHull::new(&[c(-2.0, 0.0), c(0.5, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(s.vertices().len(), 2);
        assert!(s.contains(c(1.0, 0.0), 1e-12));
        assert!(!s.contains(c(1.0, 0.1), 1e-12));
        assert!(ConvexHull::new(&[]).is_err());
    }

    /// Carathéodory oracle: a point is in the hull iff it is in some triangle.
    fn in_some_triangle(pts: &[C64], q: C64) -> bool {
        let n = pts.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, d) = (pts[i], pts[j], pts[k]);
                    let s1 = cross(a, b, q);
                    let s2 = cross(b, d, q);
                    let s3 = cross(d, a, q);
                    if (s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0) || (s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0) {
                        return true;
                    }
                }
            }
        }
        false
    }

    #[test]
    fn membership_matches_triangle_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pts: Vec<C64> = (0..100)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let h = ConvexHull::new(&pts).unwrap();
        for _ in 0..50 {
            let q = c(rng.random_range(-1.3..1.3), rng.random_range(-1.3..1.3));
            assert_eq!(h.contains(q, 0.0), in_some_triangle(&pts, q), "query {q}");
        }
    }
}
