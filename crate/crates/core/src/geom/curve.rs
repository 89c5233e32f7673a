use serde::{Deserialize, Serialize};

use super::polytope::segment_distance;
use super::{GeomError, Vec2};
use crate::tol;

/// A closed polygonal curve `(q_0, ..., q_{m-1})`, `m >= 2`, with distinct
/// consecutive vertices and no vertex lying on the segment between its two
/// neighbours. Serializes as a list of points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct ClosedCurve {
    vertices: Vec<Vec2>,
}

impl TryFrom<Vec<Vec2>> for ClosedCurve {
    type Error = GeomError;
    fn try_from(v: Vec<Vec2>) -> Result<Self, GeomError> {
        ClosedCurve::new(v)
    }
}

impl From<ClosedCurve> for Vec<Vec2> {
    fn from(c: ClosedCurve) -> Self {
        c.vertices
    }
}

impl ClosedCurve {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeomError> {
        let m = vertices.len();
        if m < 2 {
            return Err(GeomError::CurveTooShort(m));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite(i));
        }
        for j in 0..m {
            if vertices[j].dist(vertices[(j + 1) % m]) <= tol::GEO {
                return Err(GeomError::CurveRepeatedVertex(j));
            }
        }
        if m >= 3 {
            for j in 0..m {
                let prev = vertices[(j + m - 1) % m];
                let next = vertices[(j + 1) % m];
                if segment_distance(vertices[j], prev, next) <= tol::GEO {
                    return Err(GeomError::CurveStraightVertex(j));
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `q_{j+1} - q_j`, cyclically.
    pub fn edge(&self, j: usize) -> Vec2 {
        let m = self.len();
        self.vertices[(j + 1) % m] - self.vertices[j % m]
    }

    pub fn edges(&self) -> Vec<Vec2> {
        (0..self.len()).map(|j| self.edge(j)).collect()
    }

    /// Same point set up to a cyclic shift, within `tol`.
    pub fn cyclically_equal(&self, other: &ClosedCurve, tol: f64) -> bool {
        let m = self.len();
        if m != other.len() {
            return false;
        }
        (0..m).any(|s| (0..m).all(|j| self.vertices[(j + s) % m].dist(other.vertices[j]) <= tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(pts: &[(f64, f64)]) -> Result<ClosedCurve, GeomError> {
        ClosedCurve::new(pts.iter().map(|&p| p.into()).collect())
    }

    #[test]
    fn validation() {
        assert!(c(&[(0., 0.)]).is_err());
        assert!(c(&[(0., 0.), (0., 0.)]).is_err());
        assert!(c(&[(0., 0.), (1., 0.)]).is_ok());
        assert!(matches!(
            c(&[(0., 0.), (1., 0.), (2., 0.)]),
            Err(GeomError::CurveStraightVertex(1))
        ));
        // a back-and-forth spike is allowed
        assert!(c(&[(0., 0.), (2., 0.), (1., 0.), (0., 1.)]).is_ok());
    }

    #[test]
    fn cyclic_equality() {
        let a = c(&[(0., 0.), (1., 0.), (0., 1.)]).unwrap();
        let b = c(&[(1., 0.), (0., 1.), (0., 0.)]).unwrap();
        let r = c(&[(0., 1.), (1., 0.), (0., 0.)]).unwrap();
        assert!(a.cyclically_equal(&b, 1e-12));
        assert!(!a.cyclically_equal(&r, 1e-12));
    }
}
