//! Three-bounce trajectories in obtuse triangles.
//!
//! For a triangle `Δ` the dual triangle of the three-bounce construction is
//! `Δ` turned by a quarter turn (its edges are the facet normals of `Δ`). A body
//! `T` admits a regular three-bounce trajectory in `Δ` when a scaled translate of
//! one of the two quarter turns touches `∂T` in three points that cannot be
//! translated into `int T` and carry positively spanning normals.

use serde::{Deserialize, Serialize};

use crate::bounce3::{dual_normals, find_inbody};
use crate::geom::{self, ConvexPolytope2, Vec2};
use crate::{search_three_bounce, SearchOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuarterTurn {
    /// `D(π/2)`
    Ccw,
    /// `D(-π/2)`
    Cw,
}

impl QuarterTurn {
    /// Exact quarter turn, no trigonometry.
    pub fn apply(self, v: Vec2) -> Vec2 {
        match self {
            QuarterTurn::Ccw => v.perp_ccw(),
            QuarterTurn::Cw => v.perp_cw(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotatedTriangleProbe {
    pub base: [Vec2; 3],
    pub rotation: QuarterTurn,
    /// `(λ, ξ)` with `λ D Δ + ξ` touching `∂T` as required.
    pub placement: Option<(f64, Vec2)>,
}

/// Whether the three-bounce search finds anything on `(triangle, T)`.
pub fn regular_three_bounce_exists(
    triangle: &ConvexPolytope2,
    t: &ConvexPolytope2,
    opts: &SearchOptions,
) -> bool {
    assert_eq!(triangle.len(), 3, "expected a triangle");
    !search_three_bounce(triangle, t, opts).pairs.is_empty()
}

/// Try both quarter turns; return the first probe that admits a placement.
pub fn in_family_t(
    triangle: &ConvexPolytope2,
    t: &ConvexPolytope2,
    samples: usize,
) -> Option<RotatedTriangleProbe> {
    assert_eq!(triangle.len(), 3, "expected a triangle");
    let base = [triangle.vertex(0), triangle.vertex(1), triangle.vertex(2)];
    [QuarterTurn::Ccw, QuarterTurn::Cw]
        .into_iter()
        .find_map(|rotation| probe(base, rotation, t, samples))
}

pub fn probe(
    base: [Vec2; 3],
    rotation: QuarterTurn,
    t: &ConvexPolytope2,
    samples: usize,
) -> Option<RotatedTriangleProbe> {
    let turned = base.map(|v| rotation.apply(v));
    let inbody = find_inbody(&turned, t).ok()?;
    if !geom::in_f(t, &inbody.vertices).unwrap_or(false) {
        return None;
    }
    if dual_normals(&inbody, t, samples).is_empty() {
        return None;
    }
    Some(RotatedTriangleProbe {
        base,
        rotation,
        placement: Some((inbody.lambda, inbody.u)),
    })
}

/// Largest interior angle of a triangle, in degrees.
pub fn max_angle_deg(triangle: &ConvexPolytope2) -> f64 {
    (0..3)
        .map(|i| {
            let v = triangle.vertex(i);
            let a = triangle.vertex(i + 1) - v;
            let b = triangle.vertex(i + 2) - v;
            a.cross(b).abs().atan2(a.dot(b)).to_degrees()
        })
        .fold(0.0, f64::max)
}

/// A body in the admitting family for `triangle`: the quarter-turned triangle,
/// centered, with a supporting line at each vertex along the bisector of its
/// vertex normal cone, then with the three corners cut off.
pub fn admitting_body(triangle: &ConvexPolytope2) -> Result<ConvexPolytope2, geom::GeomError> {
    let turned: Vec<Vec2> = triangle.vertices().iter().map(|v| v.perp_ccw()).collect();
    let c = (turned[0] + turned[1] + turned[2]) / 3.0;
    let w: Vec<Vec2> = turned.iter().map(|v| *v - c).collect();
    let tri = ConvexPolytope2::new(w.clone())?;
    // line i through w_i with normal = bisector of N_tri(w_i)
    let lines: Vec<(Vec2, f64)> = (0..3)
        .map(|i| {
            let n = tri.normal_cone(geom::Face::Vertex(i)).bisector();
            (n, n.dot(w[i]))
        })
        .collect();
    // corner of lines i and i+1
    let corner = |i: usize| {
        let (a, b) = (lines[i], lines[(i + 1) % 3]);
        let det = a.0.cross(b.0);
        Vec2::new(a.1 * b.0.y - a.0.y * b.1, a.0.x * b.1 - a.1 * b.0.x) / det
    };
    let mut pts = Vec::new();
    for i in 0..3 {
        let p = corner(i);
        // cut a quarter of the way towards the touching points
        pts.push(p + (w[i] - p) * 0.25);
        pts.push(p + (w[(i + 1) % 3] - p) * 0.25);
    }
    ConvexPolytope2::hull(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        let v = Vec2::new(0.3, -1.7);
        assert_eq!(QuarterTurn::Ccw.apply(QuarterTurn::Cw.apply(v)), v);
        assert_eq!(QuarterTurn::Ccw.apply(QuarterTurn::Ccw.apply(v)), -v);
        assert_eq!(QuarterTurn::Ccw.apply(v).dot(v), 0.0);
    }

    #[test]
    fn obtuse_fixture_angle() {
        let tri = ConvexPolytope2::from_xy(&[(0., 0.), (4., 0.), (0.5, 0.5)]).unwrap();
        assert!((max_angle_deg(&tri) - 126.869_897_645_844).abs() < 1e-9);
    }

    #[test]
    fn constructed_body_is_in_the_family() {
        let tri = ConvexPolytope2::from_xy(&[(0., 0.), (4., 0.), (0.5, 0.5)]).unwrap();
        let t = admitting_body(&tri).unwrap();
        assert_eq!(t.len(), 6);
        let w = in_family_t(&tri, &t, 8).expect("constructed body admits a placement");
        assert_eq!(w.rotation, QuarterTurn::Ccw);
        assert!(w.placement.unwrap().0 > 0.0);
    }

    #[test]
    fn round_body_is_not_in_the_family() {
        let tri = ConvexPolytope2::from_xy(&[(0., 0.), (4., 0.), (0.5, 0.5)]).unwrap();
        let t = ConvexPolytope2::regular(64, 1.0, 0.0).unwrap();
        assert!(in_family_t(&tri, &t, 8).is_none());
        assert!(!regular_three_bounce_exists(
            &tri,
            &t,
            &SearchOptions::default()
        ));
    }

    #[test]
    fn equilateral_has_fagnano() {
        let tri = ConvexPolytope2::regular(3, 1.0, std::f64::consts::FRAC_PI_2).unwrap();
        let t = ConvexPolytope2::regular(64, 1.0, 0.0).unwrap();
        assert!(regular_three_bounce_exists(
            &tri,
            &t,
            &SearchOptions::default()
        ));
        assert!(in_family_t(&tri, &t, 8).is_some());
    }
}
