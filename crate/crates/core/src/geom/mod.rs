//! Planar convex geometry: vectors, polygons, normal cones, support functions
//! and the translation test for `F(K)`.

mod cone;
mod curve;
mod polytope;

use std::fmt;

pub use cone::{ccw_angle, positively_spans, Face, NormalCone};
pub use curve::ClosedCurve;
pub use polytope::{ConvexPolytope2, Facet};
pub use vec2::Vec2;

pub(crate) use polytope::hull_vertices;

mod vec2;

use crate::lp::{LinearProgram, LpError, LpStatus};
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub enum GeomError {
    TooFewVertices(usize),
    NonFinite(usize),
    DuplicateVertex(usize, usize),
    NotCounterclockwise,
    NotStrictlyConvex(usize),
    HalfspaceViolation { vertex: usize, facet: usize },
    OriginNotInterior { margin: f64 },
    ZeroVector,
    ConeTooWide,
    CurveTooShort(usize),
    CurveRepeatedVertex(usize),
    CurveStraightVertex(usize),
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::TooFewVertices(n) => {
                write!(f, "polygon needs at least 3 vertices, got {n}")
            }
            GeomError::NonFinite(i) => write!(f, "point {i} has a non-finite coordinate"),
            GeomError::DuplicateVertex(i, j) => {
                write!(f, "vertices {i} and {j} coincide")
            }
            GeomError::NotCounterclockwise => {
                write!(
                    f,
                    "vertices must be listed counterclockwise (signed area <= 0)"
                )
            }
            GeomError::NotStrictlyConvex(i) => {
                write!(f, "vertex {i} is not a strictly convex corner")
            }
            GeomError::HalfspaceViolation { vertex, facet } => {
                write!(
                    f,
                    "vertex {vertex} lies outside the halfplane of facet {facet}"
                )
            }
            GeomError::OriginNotInterior { margin } => {
                write!(
                    f,
                    "origin is not an interior point (smallest facet offset {margin:e})"
                )
            }
            GeomError::ZeroVector => write!(f, "zero vector where a direction is required"),
            GeomError::ConeTooWide => write!(f, "cone opening must be smaller than pi"),
            GeomError::CurveTooShort(m) => {
                write!(f, "closed curve needs at least 2 vertices, got {m}")
            }
            GeomError::CurveRepeatedVertex(j) => {
                write!(f, "curve vertices {j} and {j}+1 coincide")
            }
            GeomError::CurveStraightVertex(j) => {
                write!(
                    f,
                    "curve vertex {j} lies on the segment between its neighbours"
                )
            }
        }
    }
}

impl std::error::Error for GeomError {}

/// `ℓ_T(q) = Σ_j h_T(q_{j+1} - q_j)`.
pub fn ell_length(t: &ConvexPolytope2, q: &ClosedCurve) -> f64 {
    (0..q.len()).map(|j| t.support(q.edge(j))).sum()
}

/// Largest `δ` such that some translate `X + x` satisfies
/// `<a_f, x_i + x> <= b_f - δ` for every facet `f` of `K` and every point.
pub fn translation_margin(k: &ConvexPolytope2, points: &[Vec2]) -> Result<f64, LpError> {
    // variables: t_x, t_y, δ
    let mut lp = LinearProgram::maximize(vec![0.0, 0.0, 1.0]);
    for f in k.facets() {
        let reach = points
            .iter()
            .map(|p| f.normal.dot(*p))
            .fold(f64::NEG_INFINITY, f64::max);
        lp.le(vec![f.normal.x, f.normal.y, 1.0], f.offset - reach);
    }
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.x[2]),
        LpStatus::Infeasible | LpStatus::Unbounded => Err(LpError::NumericalFailure {
            pivots: 0,
            detail: "translation LP must be feasible and bounded",
        }),
    }
}

/// Whether the point set cannot be translated into the interior of `K`.
pub fn in_f(k: &ConvexPolytope2, points: &[Vec2]) -> Result<bool, LpError> {
    Ok(translation_margin(k, points)? <= tol::GEO)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pts: &[(f64, f64)]) -> Vec<Vec2> {
        pts.iter().map(|&q| q.into()).collect()
    }

    #[test]
    fn square_diameters() {
        let k = ConvexPolytope2::from_xy(&[(1., -1.), (1., 1.), (-1., 1.), (-1., -1.)]).unwrap();
        // width chord touches two opposite sides
        assert!(in_f(&k, &p(&[(-1., 0.3), (1., -0.2)])).unwrap());
        assert!(!in_f(&k, &p(&[(-0.9, 0.3), (0.9, -0.2)])).unwrap());
        let m = translation_margin(&k, &p(&[(-0.5, 0.), (0.5, 0.)])).unwrap();
        assert!((m - 0.5).abs() < 1e-12);
    }

    #[test]
    fn length_is_translation_invariant_and_needs_no_origin() {
        let t = ConvexPolytope2::from_xy(&[(1., 1.), (2., 1.), (1., 2.)]).unwrap();
        let q = ClosedCurve::new(p(&[(0., 0.), (1., 0.), (0., 1.)])).unwrap();
        let q2 = ClosedCurve::new(p(&[(5., 5.), (6., 5.), (5., 6.)])).unwrap();
        assert!((ell_length(&t, &q) - ell_length(&t, &q2)).abs() < 1e-12);
    }
}
