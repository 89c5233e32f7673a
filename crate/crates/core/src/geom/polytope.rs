use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{Face, GeomError, NormalCone, Vec2};
use crate::tol;

/// Facet `i` is the edge `[v_i, v_{i+1}]` with outer unit normal `normal` and
/// `offset = <normal, v_i>`, so the polygon is `{x : <normal_i, x> <= offset_i}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Facet {
    pub normal: Vec2,
    pub offset: f64,
}

/// A strictly convex polygon with counterclockwise vertices and its facet
/// representation. Serializes as `{"vertices": [[x, y], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRepr", into = "PolytopeRepr")]
pub struct ConvexPolytope2 {
    vertices: Vec<Vec2>,
    facets: Vec<Facet>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    vertices: Vec<Vec2>,
}

impl TryFrom<PolytopeRepr> for ConvexPolytope2 {
    type Error = GeomError;
    fn try_from(r: PolytopeRepr) -> Result<Self, GeomError> {
        ConvexPolytope2::new(r.vertices)
    }
}

impl From<ConvexPolytope2> for PolytopeRepr {
    fn from(p: ConvexPolytope2) -> Self {
        PolytopeRepr {
            vertices: p.vertices,
        }
    }
}

impl ConvexPolytope2 {
    /// Validates a counterclockwise vertex list and computes the facets.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, GeomError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeomError::TooFewVertices(n));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite(i));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i].dist(vertices[j]) <= tol::GEO {
                    return Err(GeomError::DuplicateVertex(i, j));
                }
            }
        }
        let area2: f64 = (0..n)
            .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
            .sum();
        if area2 <= 0.0 {
            return Err(GeomError::NotCounterclockwise);
        }
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            let turn = (b - a).cross(c - b) / ((b - a).norm() * (c - b).norm());
            if turn <= tol::GEO {
                return Err(GeomError::NotStrictlyConvex(i));
            }
        }
        let facets: Vec<Facet> = (0..n)
            .map(|i| {
                let d = vertices[(i + 1) % n] - vertices[i];
                let normal = d.perp_cw() / d.norm();
                Facet {
                    normal,
                    offset: normal.dot(vertices[i]),
                }
            })
            .collect();
        for (f, facet) in facets.iter().enumerate() {
            for (i, v) in vertices.iter().enumerate() {
                if facet.normal.dot(*v) - facet.offset > tol::GEO {
                    return Err(GeomError::HalfspaceViolation {
                        vertex: i,
                        facet: f,
                    });
                }
            }
        }
        Ok(Self { vertices, facets })
    }

    pub fn from_xy(pts: &[(f64, f64)]) -> Result<Self, GeomError> {
        Self::new(pts.iter().map(|&p| p.into()).collect())
    }

    /// Convex hull of a point cloud (Andrew's monotone chain). Collinear
    /// boundary points are dropped.
    pub fn hull(points: &[Vec2]) -> Result<Self, GeomError> {
        Self::new(hull_vertices(points))
    }

    /// Regular `n`-gon of circumradius `radius` with a vertex at angle `phase`.
    pub fn regular(n: usize, radius: f64, phase: f64) -> Result<Self, GeomError> {
        Self::new(
            (0..n)
                .map(|k| Vec2::from_angle(phase + TAU * k as f64 / n as f64) * radius)
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex with cyclic indexing.
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.len()]
    }

    pub fn facet(&self, i: usize) -> Facet {
        self.facets[i % self.len()]
    }

    /// Endpoints of edge `i`.
    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    /// All faces: vertices first, then edges.
    pub fn faces(&self) -> Vec<Face> {
        (0..self.len())
            .map(Face::Vertex)
            .chain((0..self.len()).map(Face::Edge))
            .collect()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.len();
        0.5 * (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.len();
        let mut c = Vec2::ZERO;
        let mut a = 0.0;
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let w = p.cross(q);
            a += w;
            c += (p + q) * w;
        }
        c / (3.0 * a)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max(p.dist(*q));
            }
        }
        d
    }

    pub fn max_edge_length(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                a.dist(b)
            })
            .fold(0.0, f64::max)
    }

    /// Support function `h(x) = max_v <v, x>`.
    pub fn support(&self, x: Vec2) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest facet offset. Positive iff the origin is an interior point.
    pub fn origin_margin(&self) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn has_origin_interior(&self) -> bool {
        self.origin_margin() > tol::GEO
    }

    /// Minkowski functional `μ(x) = max_i <a_i, x> / b_i`.
    pub fn gauge(&self, x: Vec2) -> Result<f64, GeomError> {
        let margin = self.origin_margin();
        if margin <= tol::GEO {
            return Err(GeomError::OriginNotInterior { margin });
        }
        Ok(self
            .facets
            .iter()
            .map(|f| f.normal.dot(x) / f.offset)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Polar body; its vertices are `a_i / b_i`.
    pub fn polar(&self) -> Result<Self, GeomError> {
        let margin = self.origin_margin();
        if margin <= tol::GEO {
            return Err(GeomError::OriginNotInterior { margin });
        }
        Self::new(self.facets.iter().map(|f| f.normal / f.offset).collect())
    }

    /// Maximum facet slack `max_i (<a_i, x> - b_i)`; nonpositive inside.
    pub fn max_slack(&self, x: Vec2) -> f64 {
        self.facets
            .iter()
            .map(|f| f.normal.dot(x) - f.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: Vec2, tol: f64) -> bool {
        self.max_slack(x) <= tol
    }

    /// Euclidean distance from `x` to the boundary polyline.
    pub fn boundary_distance(&self, x: Vec2) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                segment_distance(x, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The smallest face containing `x` within `tol::GEO`, if `x` is on the boundary.
    pub fn locate(&self, x: Vec2) -> Option<Face> {
        if let Some(i) = self.vertices.iter().position(|v| v.dist(x) <= tol::GEO) {
            return Some(Face::Vertex(i));
        }
        (0..self.len())
            .find(|&i| {
                let (a, b) = self.edge(i);
                segment_distance(x, a, b) <= tol::GEO
            })
            .map(Face::Edge)
    }

    /// Face of the boundary point nearest to `x` (vertex if within `tol::GEO` of one).
    pub fn nearest_face(&self, x: Vec2) -> Face {
        if let Some(f) = self.locate(x) {
            return f;
        }
        let mut best = (f64::INFINITY, Face::Edge(0));
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            let d = b - a;
            let s = ((x - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
            let dist = x.dist(a + d * s);
            if dist < best.0 {
                let face = if s * d.norm() <= tol::GEO {
                    Face::Vertex(i)
                } else if (1.0 - s) * d.norm() <= tol::GEO {
                    Face::Vertex((i + 1) % self.len())
                } else {
                    Face::Edge(i)
                };
                best = (dist, face);
            }
        }
        best.1
    }

    /// `N(Edge i) = cone{a_i}`, `N(Vertex i) = cone{a_{i-1}, a_i}`.
    pub fn normal_cone(&self, face: Face) -> NormalCone {
        let n = self.len();
        match face {
            Face::Edge(i) => NormalCone::Ray(self.facets[i % n].normal),
            Face::Vertex(i) => NormalCone::Wedge(
                self.facets[(i + n - 1) % n].normal,
                self.facets[i % n].normal,
            ),
        }
    }

    pub fn normal_cone_at(&self, x: Vec2) -> Option<NormalCone> {
        self.locate(x).map(|f| self.normal_cone(f))
    }

    /// Point of a face: the vertex itself, or `v_i + s (v_{i+1} - v_i)` on an edge.
    pub fn point_on_face(&self, face: Face, s: f64) -> Vec2 {
        match face {
            Face::Vertex(i) => self.vertex(i),
            Face::Edge(i) => {
                let (a, b) = self.edge(i);
                a + (b - a) * s
            }
        }
    }

    pub fn translated(&self, t: Vec2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| *v + t).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal,
                    offset: f.offset + f.normal.dot(t),
                })
                .collect(),
        }
    }

    /// `c · P` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self, GeomError> {
        Self::new(self.vertices.iter().map(|v| *v * c).collect())
    }

    /// Point reflection `-P`.
    pub fn reflected(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| -*v).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: -f.normal,
                    offset: f.offset,
                })
                .collect(),
        }
    }

    /// Image under a linear map given by its columns, which must preserve orientation.
    pub fn transformed(&self, col_x: Vec2, col_y: Vec2) -> Result<Self, GeomError> {
        Self::new(
            self.vertices
                .iter()
                .map(|v| col_x * v.x + col_y * v.y)
                .collect(),
        )
    }
}

pub(crate) fn segment_distance(x: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.norm_sq();
    if len2 == 0.0 {
        return x.dist(a);
    }
    let s = ((x - a).dot(d) / len2).clamp(0.0, 1.0);
    x.dist(a + d * s)
}

pub(crate) fn hull_vertices(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o);
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square() -> ConvexPolytope2 {
        ConvexPolytope2::from_xy(&[(1., -1.), (1., 1.), (-1., 1.), (-1., -1.)]).unwrap()
    }

    #[test]
    fn facets_of_square() {
        let s = square();
        let f = s.facets();
        assert_eq!(f[0].normal, Vec2::new(1., 0.));
        assert_eq!(f[1].normal, Vec2::new(0., 1.));
        assert_eq!(f[2].normal, Vec2::new(-1., 0.));
        assert_eq!(f[3].normal, Vec2::new(0., -1.));
        assert!(f.iter().all(|f| f.offset == 1.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ConvexPolytope2::from_xy(&[(0., 0.), (1., 0.)]),
            Err(GeomError::TooFewVertices(2))
        ));
        assert!(matches!(
            ConvexPolytope2::from_xy(&[(0., 0.), (0., 1.), (1., 0.)]),
            Err(GeomError::NotCounterclockwise)
        ));
        assert!(matches!(
            ConvexPolytope2::from_xy(&[(0., 0.), (1., 0.), (2., 0.), (0., 1.)]),
            Err(GeomError::NotStrictlyConvex(1))
        ));
        assert!(matches!(
            ConvexPolytope2::from_xy(&[(0., 0.), (1., 0.), (1., 0.), (0., 1.)]),
            Err(GeomError::DuplicateVertex(1, 2))
        ));
        // a reflex vertex
        assert!(
            ConvexPolytope2::from_xy(&[(0., 0.), (2., 0.), (1., 0.5), (2., 2.), (0., 2.)]).is_err()
        );
        assert!(ConvexPolytope2::from_xy(&[(0., 0.), (f64::NAN, 0.), (0., 1.)]).is_err());
    }

    #[test]
    fn polar_of_square_is_diamond() {
        let p = square().polar().unwrap();
        let expect = [(1., 0.), (0., 1.), (-1., 0.), (0., -1.)];
        for (v, e) in p.vertices().iter().zip(expect) {
            assert!(v.dist(e.into()) < 1e-15);
        }
    }

    #[test]
    fn polar_needs_interior_origin() {
        let t = ConvexPolytope2::from_xy(&[(0., 0.), (1., 0.), (0., 1.)]).unwrap();
        assert!(matches!(
            t.polar(),
            Err(GeomError::OriginNotInterior { .. })
        ));
        assert!(t.gauge(Vec2::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn locate_faces() {
        let s = square();
        assert_eq!(s.locate(Vec2::new(1., 1.)), Some(Face::Vertex(1)));
        assert_eq!(s.locate(Vec2::new(1., 0.3)), Some(Face::Edge(0)));
        assert_eq!(s.locate(Vec2::new(0.3, -1.)), Some(Face::Edge(3)));
        assert_eq!(s.locate(Vec2::new(0.3, 0.)), None);
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let pts: Vec<Vec2> = [(0., 0.), (1., 0.), (2., 0.), (2., 2.), (0., 2.), (1., 1.)]
            .iter()
            .map(|&p| p.into())
            .collect();
        let h = ConvexPolytope2::hull(&pts).unwrap();
        assert_eq!(h.len(), 4);
        assert_eq!(h.vertices()[0], Vec2::new(0., 0.));
    }

    /// Brute-force polar: vertices of `{y : <v, y> <= 1 for all v}` by pairwise
    /// line intersection.
    fn polar_oracle(p: &ConvexPolytope2) -> Vec<Vec2> {
        let vs = p.vertices();
        let mut out = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let det = vs[i].cross(vs[j]);
                if det.abs() < 1e-12 {
                    continue;
                }
                // solve <vi, y> = 1, <vj, y> = 1
                let y = Vec2::new(vs[j].y - vs[i].y, vs[i].x - vs[j].x) / det;
                if vs.iter().all(|v| v.dot(y) <= 1.0 + 1e-9) {
                    out.push(y);
                }
            }
        }
        out
    }

    fn random_polygon() -> impl Strategy<Value = ConvexPolytope2> {
        prop::collection::vec((0.0..TAU, 0.5..2.0f64), 3..12).prop_filter_map("degenerate", |pts| {
            let pts: Vec<Vec2> = pts.iter().map(|&(a, r)| Vec2::from_angle(a) * r).collect();
            ConvexPolytope2::hull(&pts).ok()
        })
    }

    proptest! {
        #[test]
        fn polar_matches_oracle(p in random_polygon()) {
            prop_assume!(p.origin_margin() > 1e-3);
            let fast = p.polar().unwrap();
            let slow = polar_oracle(&p);
            for v in fast.vertices() {
                prop_assert!(slow.iter().any(|w| w.dist(*v) < 1e-7));
            }
            for w in &slow {
                prop_assert!(fast.vertices().iter().any(|v| w.dist(*v) < 1e-7));
            }
        }

        #[test]
        fn polar_is_involution(p in random_polygon()) {
            prop_assume!(p.origin_margin() > 1e-2);
            let pp = p.polar().unwrap().polar().unwrap();
            prop_assert_eq!(pp.len(), p.len());
            for v in p.vertices() {
                prop_assert!(pp.vertices().iter().any(|w| w.dist(*v) < 1e-8));
            }
        }

        #[test]
        fn support_is_gauge_of_polar(p in random_polygon(), a in 0.0..TAU, r in 0.1..3.0f64) {
            prop_assume!(p.origin_margin() > 1e-2);
            let x = Vec2::from_angle(a) * r;
            let h = p.support(x);
            let g = p.polar().unwrap().gauge(x).unwrap();
            prop_assert!((h - g).abs() <= 1e-9 * (1.0 + h.abs()));
        }

        #[test]
        fn support_is_sublinear(p in random_polygon(), a in 0.0..TAU, b in 0.0..TAU, c in 0.0..5.0f64) {
            let (x, y) = (Vec2::from_angle(a), Vec2::from_angle(b) * 2.0);
            prop_assert!(p.support(x + y) <= p.support(x) + p.support(y) + 1e-12);
            prop_assert!((p.support(x * c) - c * p.support(x)).abs() <= 1e-12 * (1.0 + c));
        }

        #[test]
        fn every_vertex_lies_on_two_facets(p in random_polygon()) {
            let n = p.len();
            for i in 0..n {
                let v = p.vertex(i);
                let fa = p.facet(i + n - 1);
                let fb = p.facet(i);
                prop_assert!((fa.normal.dot(v) - fa.offset).abs() < 1e-9);
                prop_assert!((fb.normal.dot(v) - fb.offset).abs() < 1e-9);
            }
        }
    }
}
