use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{GeomError, Vec2};
use crate::tol;

/// A face of a polygon: a vertex `v_i` or the closed edge `[v_i, v_{i+1}]`.
///
/// Faces order vertices before edges, then by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum Face {
    Vertex(usize),
    Edge(usize),
}

impl Face {
    pub fn index(self) -> usize {
        match self {
            Face::Vertex(i) | Face::Edge(i) => i,
        }
    }

    pub fn is_vertex(self) -> bool {
        matches!(self, Face::Vertex(_))
    }

    pub fn is_edge(self) -> bool {
        matches!(self, Face::Edge(_))
    }
}

/// A closed convex cone of opening angle below `π`, given by its generators in
/// counterclockwise order. Generators are unit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "generators", rename_all = "lowercase")]
pub enum NormalCone {
    Ray(Vec2),
    Wedge(Vec2, Vec2),
}

impl NormalCone {
    /// The cone spanned by `start` and `end`, going counterclockwise.
    /// Collapses to a ray when the opening is within `tol::ANG`.
    pub fn wedge(start: Vec2, end: Vec2) -> Result<Self, GeomError> {
        let s = start.normalized().ok_or(GeomError::ZeroVector)?;
        let e = end.normalized().ok_or(GeomError::ZeroVector)?;
        let w = ccw_angle(s, e);
        if w <= tol::ANG || w >= TAU - tol::ANG {
            Ok(NormalCone::Ray(s))
        } else if w >= PI - tol::ANG {
            Err(GeomError::ConeTooWide)
        } else {
            Ok(NormalCone::Wedge(s, e))
        }
    }

    pub fn ray(dir: Vec2) -> Result<Self, GeomError> {
        Ok(NormalCone::Ray(
            dir.normalized().ok_or(GeomError::ZeroVector)?,
        ))
    }

    pub fn generators(&self) -> Vec<Vec2> {
        match *self {
            NormalCone::Ray(g) => vec![g],
            NormalCone::Wedge(s, e) => vec![s, e],
        }
    }

    pub fn start(&self) -> Vec2 {
        match *self {
            NormalCone::Ray(g) | NormalCone::Wedge(g, _) => g,
        }
    }

    pub fn end(&self) -> Vec2 {
        match *self {
            NormalCone::Ray(g) | NormalCone::Wedge(_, g) => g,
        }
    }

    /// Opening angle in radians.
    pub fn width(&self) -> f64 {
        match *self {
            NormalCone::Ray(_) => 0.0,
            NormalCone::Wedge(s, e) => ccw_angle(s, e),
        }
    }

    pub fn bisector(&self) -> Vec2 {
        match *self {
            NormalCone::Ray(g) => g,
            NormalCone::Wedge(s, e) => (s + e).normalized().unwrap_or(s),
        }
    }

    pub fn negated(&self) -> NormalCone {
        match *self {
            NormalCone::Ray(g) => NormalCone::Ray(-g),
            NormalCone::Wedge(s, e) => NormalCone::Wedge(-s, -e),
        }
    }

    /// Exact membership (no slack) for nonzero `v`; the zero vector is a member.
    pub fn contains(&self, v: Vec2) -> bool {
        self.distance(v) == 0.0
    }

    /// Euclidean distance from `v` to the cone.
    pub fn distance(&self, v: Vec2) -> f64 {
        let ray_dist = |g: Vec2| {
            if v.dot(g) <= 0.0 {
                v.norm()
            } else {
                g.cross(v).abs()
            }
        };
        match *self {
            NormalCone::Ray(g) => ray_dist(g),
            NormalCone::Wedge(s, e) => {
                if s.cross(v) >= 0.0 && v.cross(e) >= 0.0 {
                    0.0
                } else {
                    ray_dist(s).min(ray_dist(e))
                }
            }
        }
    }

    /// Intersection of two cones. Both have opening below `π`, so the result
    /// is a single cone or empty. Boundary generators are reused verbatim.
    pub fn intersect(&self, other: &NormalCone) -> Option<NormalCone> {
        let (a, wa) = (self.start(), self.width());
        let (b, wb) = (other.start(), other.width());
        let d_ab = ccw_angle(a, b);
        let d_ba = ccw_angle(b, a);
        let slack = tol::ANG;
        // (start, remaining width of the cone containing start, the other cone)
        let (start, rest, first, second, w2) = if d_ab <= wa + slack {
            (b, wa - d_ab, self, other, wb)
        } else if d_ba <= wb + slack {
            (a, wb - d_ba, other, self, wa)
        } else {
            return None;
        };
        let width = rest.min(w2);
        if width <= slack {
            return Some(NormalCone::Ray(start));
        }
        let end = if rest < w2 { first.end() } else { second.end() };
        Some(NormalCone::Wedge(start, end))
    }

    /// `n` directions spread evenly across the cone, extreme rays included.
    /// A ray yields its generator once.
    pub fn sample(&self, n: usize) -> Vec<Vec2> {
        match *self {
            NormalCone::Ray(g) => vec![g],
            NormalCone::Wedge(s, e) => {
                if n < 2 {
                    return vec![self.bisector()];
                }
                let w = ccw_angle(s, e);
                (0..n)
                    .map(|k| {
                        if k == 0 {
                            s
                        } else if k == n - 1 {
                            e
                        } else {
                            s.rotated(w * k as f64 / (n - 1) as f64)
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Counterclockwise angle from `a` to `b` in `[0, 2π)`.
pub fn ccw_angle(a: Vec2, b: Vec2) -> f64 {
    let t = a.cross(b).atan2(a.dot(b));
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// Whether the cone generated by `vs` is the whole plane: every circular gap
/// between consecutive directions is smaller than `π - tol::ANG`.
pub fn positively_spans(vs: &[Vec2]) -> Result<bool, GeomError> {
    if vs.iter().any(|v| *v == Vec2::ZERO || !v.is_finite()) {
        return Err(GeomError::ZeroVector);
    }
    if vs.len() < 3 {
        return Ok(false);
    }
    let mut angles: Vec<f64> = vs.iter().map(|v| v.angle()).collect();
    angles.sort_by(f64::total_cmp);
    let wrap = TAU - (angles[angles.len() - 1] - angles[0]);
    let max_gap = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    Ok(max_gap < PI - tol::ANG)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    #[test]
    fn spanning_examples() {
        assert!(positively_spans(&[v(1., 0.), v(0., 1.), v(-1., -1.)]).unwrap());
        // exactly π gap
        assert!(!positively_spans(&[v(0., -1.), v(0., 1.), v(1., 0.)]).unwrap());
        assert!(!positively_spans(&[v(1., 0.), v(-1., 0.)]).unwrap());
        assert!(positively_spans(&[v(0., 0.), v(1., 0.)]).is_err());
    }

    #[test]
    fn wedge_membership_and_distance() {
        let c = NormalCone::wedge(v(1., 0.), v(0., 1.)).unwrap();
        assert!(c.contains(v(1., 1.)));
        assert!(c.contains(v(2., 0.)));
        assert!(!c.contains(v(-1., -1.)));
        assert!((c.distance(v(1., -1.)) - 1.0).abs() < 1e-15);
        assert!((c.distance(v(-1., -1.)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn wedge_rejects_half_plane() {
        assert!(matches!(
            NormalCone::wedge(v(1., 0.), v(-1., 0.)),
            Err(GeomError::ConeTooWide)
        ));
    }

    #[test]
    fn intersect_cases() {
        let q1 = NormalCone::wedge(v(1., 0.), v(0., 1.)).unwrap();
        let q12 = NormalCone::wedge(v(1., 1.), v(-1., 1.)).unwrap();
        let i = q1.intersect(&q12).unwrap();
        assert!(matches!(i, NormalCone::Wedge(_, _)));
        assert!((i.width() - PI / 4.0).abs() < 1e-12);
        assert_eq!(i.end(), v(0., 1.));

        // touching at a single ray
        let q2 = NormalCone::wedge(v(0., 1.), v(-1., 0.)).unwrap();
        let t = q1.intersect(&q2).unwrap();
        assert_eq!(t, NormalCone::Ray(v(0., 1.)));

        let q3 = NormalCone::wedge(v(-1., 0.), v(0., -1.)).unwrap();
        assert!(q1.intersect(&q3).is_none());

        let r = NormalCone::ray(v(1., 1.)).unwrap();
        assert!(q1.intersect(&r).is_some());
        assert!(q3.intersect(&r).is_none());
    }

    #[test]
    fn samples_include_extremes() {
        let c = NormalCone::wedge(v(1., 0.), v(0., 1.)).unwrap();
        let s = c.sample(5);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], v(1., 0.));
        assert_eq!(s[4], v(0., 1.));
        assert!((s[2].angle() - PI / 4.0).abs() < 1e-12);
    }

    fn arc() -> impl Strategy<Value = (f64, f64)> {
        (-PI..PI, 0.0..3.0f64)
    }

    proptest! {
        #[test]
        fn intersection_matches_pointwise((a0, wa) in arc(), (b0, wb) in arc(), t in -PI..PI) {
            let ca = NormalCone::wedge(Vec2::from_angle(a0), Vec2::from_angle(a0 + wa)).unwrap();
            let cb = NormalCone::wedge(Vec2::from_angle(b0), Vec2::from_angle(b0 + wb)).unwrap();
            let d = Vec2::from_angle(t);
            let in_both = ca.contains(d) && cb.contains(d);
            let far_from_one = ca.distance(d) > 1e-6 || cb.distance(d) > 1e-6;
            match ca.intersect(&cb) {
                Some(c) => {
                    if in_both { prop_assert!(c.distance(d) < 1e-8); }
                    if far_from_one { prop_assert!(c.distance(d) > 1e-8); }
                }
                None => prop_assert!(!in_both),
            }
        }

        #[test]
        fn spans_iff_no_half_plane(angles in prop::collection::vec(-PI..PI, 1..7)) {
            let vs: Vec<Vec2> = angles.iter().map(|&a| Vec2::from_angle(a)).collect();
            let spans = positively_spans(&vs).unwrap();
            // oracle: some unit u has <u, v> <= 0 for all v (tested on a fine grid,
            // plus the directions orthogonal to each generator)
            let mut dirs: Vec<Vec2> = (0..3600).map(|k| Vec2::from_angle(k as f64 * TAU / 3600.0)).collect();
            for v in &vs { dirs.push(v.perp_cw()); dirs.push(v.perp_ccw()); }
            let blocked = dirs.iter().any(|u| vs.iter().all(|v| u.dot(*v) <= 1e-12));
            let max_neg = dirs.iter().map(|u| vs.iter().map(|v| u.dot(*v)).fold(f64::MIN, f64::max)).fold(f64::MAX, f64::min);
            if spans { prop_assert!(!blocked); }
            else if max_neg > 1e-6 { prop_assert!(false, "claimed not spanning but every direction is hit"); }
        }
    }
}
