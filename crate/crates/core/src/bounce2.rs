//! Two-bounce search: one small LP per tuple of faces `(F1, F2)` of `K` and
//! `(G1, G2)` of `T`.
//!
//! For a tuple, write `C_T = N_T(G1) ∩ -N_T(G2)` and `C_K = N_K(F1) ∩ -N_K(F2)`.
//! A two-bounce pair with `q_j ∈ F_j`, `p_j ∈ G_j` exists iff there are points on
//! those faces with `q_2 - q_1 ∈ C_T` and `p_2 - p_1 ∈ C_K`, both nonzero. Both
//! conditions are linear once each cone is written through its generators.

use serde::{Deserialize, Serialize};

use crate::geom::{self, ClosedCurve, ConvexPolytope2, Face, GeomError, NormalCone, Vec2};
use crate::lp::{LinearProgram, LpStatus};
use crate::par;
use crate::{tol, verify, SearchOptions};

/// A closed trajectory `q` on `∂K` with its dual curve `p` on `∂T`.
///
/// With `d_j = q_{j+1} - q_j` and `e_j = p_j - p_{j-1}`:
/// `d_j = lambdas[j] · t_normals[j]` and `e_j = -mus[j] · k_normals[j]`,
/// normals being unit vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilliardPair {
    pub q: ClosedCurve,
    pub p: ClosedCurve,
    pub k_faces: Vec<Face>,
    pub t_faces: Vec<Face>,
    pub t_normals: Vec<Vec2>,
    pub lambdas: Vec<f64>,
    pub k_normals: Vec<Vec2>,
    pub mus: Vec<f64>,
    pub length: f64,
}

impl BilliardPair {
    pub fn new(
        t: &ConvexPolytope2,
        q: Vec<Vec2>,
        p: Vec<Vec2>,
        k_faces: Vec<Face>,
        t_faces: Vec<Face>,
    ) -> Result<Self, GeomError> {
        let q = ClosedCurve::new(q)?;
        let p = ClosedCurve::new(p)?;
        let m = q.len();
        let mut t_normals = Vec::with_capacity(m);
        let mut lambdas = Vec::with_capacity(m);
        let mut k_normals = Vec::with_capacity(m);
        let mut mus = Vec::with_capacity(m);
        for j in 0..m {
            let d = q.edge(j);
            lambdas.push(d.norm());
            t_normals.push(d.normalized().ok_or(GeomError::ZeroVector)?);
            let e = p.edge(j + m - 1);
            mus.push(e.norm());
            k_normals.push((-e).normalized().ok_or(GeomError::ZeroVector)?);
        }
        let length = geom::ell_length(t, &q);
        Ok(Self {
            q,
            p,
            k_faces,
            t_faces,
            t_normals,
            lambdas,
            k_normals,
            mus,
            length,
        })
    }

    pub fn bounces(&self) -> usize {
        self.q.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceTuple {
    pub k: [Face; 2],
    pub t: [Face; 2],
}

/// Which faces in a tuple are vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleCase {
    /// All four faces are vertices: a pure membership check.
    AllVertices,
    /// `F1`, `F2` are vertices of `K`, some `G` is an edge of `T`.
    TableVertices,
    /// At least one edge on each side.
    EdgesOnBoth,
    /// `G1`, `G2` are vertices of `T`, some `F` is an edge of `K`.
    BodyVertices,
}

impl FaceTuple {
    pub fn case(&self) -> TupleCase {
        let kv = self.k.iter().all(|f| f.is_vertex());
        let tv = self.t.iter().all(|f| f.is_vertex());
        match (kv, tv) {
            (true, true) => TupleCase::AllVertices,
            (true, false) => TupleCase::TableVertices,
            (false, true) => TupleCase::BodyVertices,
            (false, false) => TupleCase::EdgesOnBoth,
        }
    }

    /// The two intersected cones `(C_T, C_K)`, or `None` if either is empty.
    pub fn cones(
        &self,
        k: &ConvexPolytope2,
        t: &ConvexPolytope2,
    ) -> Option<(NormalCone, NormalCone)> {
        let ct = t
            .normal_cone(self.t[0])
            .intersect(&t.normal_cone(self.t[1]).negated())?;
        let ck = k
            .normal_cone(self.k[0])
            .intersect(&k.normal_cone(self.k[1]).negated())?;
        Some((ct, ck))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoBounceStats {
    /// `C(2|V(K)|, 2) · 2|V(T)| · (2|V(T)| - 1)`.
    pub tuples_visited: u64,
    /// Tuples whose cones `C_T`, `C_K` are both nonempty.
    pub cone_feasible: u64,
    pub lp_failures: u64,
    /// Pairs before removing repeated curves.
    pub found: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoBounceSearch {
    pub pairs: Vec<BilliardPair>,
    pub stats: TwoBounceStats,
}

pub fn expected_tuple_count(nk: usize, nt: usize) -> u64 {
    let (fk, ft) = (2 * nk as u64, 2 * nt as u64);
    fk * (fk - 1) / 2 * ft * (ft - 1)
}

/// One affine point on a face: constant plus optional `s · dir`, `s ∈ [0, 1]`.
struct FacePoint {
    base: Vec2,
    dir: Option<Vec2>,
}

fn face_point(p: &ConvexPolytope2, f: Face) -> FacePoint {
    match f {
        Face::Vertex(i) => FacePoint {
            base: p.vertex(i),
            dir: None,
        },
        Face::Edge(i) => {
            let (a, b) = p.edge(i);
            FacePoint {
                base: a,
                dir: Some(b - a),
            }
        }
    }
}

/// Outcome of solving one tuple.
pub enum TupleOutcome {
    Found(BilliardPair),
    Empty,
    LpFailure,
}

/// Solve a single face tuple. `weights`, when given, perturbs the objective:
/// entry `i` is added to the coefficient of LP variable `i`.
pub fn solve_tuple(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    tuple: &FaceTuple,
    weights: Option<&[f64]>,
) -> TupleOutcome {
    let Some((ct, ck)) = tuple.cones(k, t) else {
        return TupleOutcome::Empty;
    };
    solve_with_cones(k, t, tuple, &ct, &ck, weights)
}

fn solve_with_cones(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    tuple: &FaceTuple,
    ct: &NormalCone,
    ck: &NormalCone,
    weights: Option<&[f64]>,
) -> TupleOutcome {
    let fps = [
        face_point(k, tuple.k[0]),
        face_point(k, tuple.k[1]),
        face_point(t, tuple.t[0]),
        face_point(t, tuple.t[1]),
    ];
    let (q, p) = if tuple.case() == TupleCase::AllVertices {
        let q = [fps[0].base, fps[1].base];
        let p = [fps[2].base, fps[3].base];
        let (d, e) = (q[1] - q[0], p[1] - p[0]);
        if ct.distance(d) > tol::GEO * d.norm().max(1.0)
            || ck.distance(e) > tol::GEO * e.norm().max(1.0)
        {
            return TupleOutcome::Empty;
        }
        (q, p)
    } else {
        match lp_points(&fps, ct, ck, weights) {
            Ok(Some(x)) => x,
            Ok(None) => return TupleOutcome::Empty,
            Err(()) => return TupleOutcome::LpFailure,
        }
    };
    if q[0].dist(q[1]) <= tol::GEO || p[0].dist(p[1]) <= tol::GEO {
        return TupleOutcome::Empty;
    }
    let Ok(mut pair) = BilliardPair::new(
        t,
        q.to_vec(),
        p.to_vec(),
        tuple.k.to_vec(),
        tuple.t.to_vec(),
    ) else {
        return TupleOutcome::Empty;
    };
    if tuple.k[0].is_edge() && tuple.k[1].is_edge() {
        if let Some(smooth) = prefer_smooth(k, t, tuple, ct, &pair) {
            pair = smooth;
        }
    }
    if verify::system_residual(k, t, &pair) < tol::CERT {
        TupleOutcome::Found(pair)
    } else {
        TupleOutcome::Empty
    }
}

/// Variables: one parameter per edge among the four faces, then the `C_T`
/// coefficients `α`, then the `C_K` coefficients `β`. Maximizes `Σα + Σβ`.
fn lp_points(
    fps: &[FacePoint; 4],
    ct: &NormalCone,
    ck: &NormalCone,
    weights: Option<&[f64]>,
) -> Result<Option<([Vec2; 2], [Vec2; 2])>, ()> {
    let mut slot = [None; 4];
    let mut nv = 0;
    for (s, fp) in slot.iter_mut().zip(fps) {
        if fp.dir.is_some() {
            *s = Some(nv);
            nv += 1;
        }
    }
    let gs = ct.generators();
    let hs = ck.generators();
    let a0 = nv;
    let b0 = a0 + gs.len();
    nv = b0 + hs.len();

    let mut obj = vec![0.0; nv];
    for c in obj.iter_mut().skip(a0) {
        *c = 1.0;
    }
    if let Some(w) = weights {
        for (c, wi) in obj.iter_mut().zip(w) {
            *c += wi;
        }
    }
    let mut lp = LinearProgram::maximize(obj);
    // rows: (x1 - x0) - Σ coef·gen = 0, for q (slots 0,1 with gs) and p (slots 2,3 with hs)
    for (lo, gens, g0) in [(0usize, &gs, a0), (2, &hs, b0)] {
        for axis in 0..2 {
            let comp = |v: Vec2| if axis == 0 { v.x } else { v.y };
            let mut row = vec![0.0; nv];
            if let (Some(i), Some(d)) = (slot[lo + 1], fps[lo + 1].dir) {
                row[i] += comp(d);
            }
            if let (Some(i), Some(d)) = (slot[lo], fps[lo].dir) {
                row[i] -= comp(d);
            }
            for (k, g) in gens.iter().enumerate() {
                row[g0 + k] = -comp(*g);
            }
            lp.equal(row, comp(fps[lo].base) - comp(fps[lo + 1].base));
        }
    }
    for (s, _) in slot.iter().zip(fps) {
        if let Some(i) = *s {
            lp.bound(i, Some(0.0), Some(1.0));
        }
    }
    for j in a0..nv {
        lp.nonneg(j);
    }
    let sol = lp.solve().map_err(|_| ())?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    let pt = |j: usize| {
        let fp = &fps[j];
        match (slot[j], fp.dir) {
            (Some(i), Some(d)) => fp.base + d * sol.x[i].clamp(0.0, 1.0),
            _ => fp.base,
        }
    };
    Ok(Some(([pt(0), pt(1)], [pt(2), pt(3)])))
}

/// Both `F` are parallel edges and some `q_j` sits at an edge endpoint: slide
/// the chord so that both points become relative-interior points. First try a
/// common translation along the edges; otherwise move the two ends
/// independently while keeping `q_2 - q_1` in `C_T`. Length is unchanged either
/// way, since `p_2 - p_1` is orthogonal to the edges.
fn prefer_smooth(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    tuple: &FaceTuple,
    ct: &NormalCone,
    pair: &BilliardPair,
) -> Option<BilliardPair> {
    let (a1, b1) = k.edge(tuple.k[0].index());
    let (a2, b2) = k.edge(tuple.k[1].index());
    let q = pair.q.vertices();
    let (len1, len2) = (a1.dist(b1), a2.dist(b2));
    let v = (b1 - a1) / len1;
    // signed travel along v that keeps each point on its edge
    let s1 = (q[0] - a1).dot(v);
    let s2 = (q[1] - a2).dot(-v);
    let room1 = (-s1, len1 - s1);
    let room2 = (-(len2 - s2), s2);
    let at_end = |s: f64, len: f64| s <= tol::GEO || s >= len - tol::GEO;
    if !at_end(s1, len1) && !at_end(s2, len2) {
        return None;
    }
    let lo = room1.0.max(room2.0);
    let hi = room1.1.min(room2.1);
    let (t1, t2) = if hi - lo > 2.0 * tol::GEO {
        let mid = 0.5 * (lo + hi);
        (mid, mid)
    } else {
        // maximize τ: both points at least τ inside their edges, chord in C_T
        let gens = ct.generators();
        let nv = 3 + gens.len();
        let mut obj = vec![0.0; nv];
        obj[2] = 1.0;
        let mut lp = LinearProgram::maximize(obj);
        for (var, room) in [(0usize, room1), (1, room2)] {
            let mut r = vec![0.0; nv];
            r[var] = 1.0;
            r[2] = 1.0;
            lp.le(r.clone(), room.1);
            r[var] = -1.0;
            lp.le(r, -room.0);
        }
        let d = q[1] - q[0];
        for axis in 0..2 {
            let comp = |x: Vec2| if axis == 0 { x.x } else { x.y };
            let mut r = vec![0.0; nv];
            r[0] = -comp(v);
            r[1] = comp(v);
            for (i, g) in gens.iter().enumerate() {
                r[3 + i] = -comp(*g);
            }
            lp.equal(r, -comp(d));
        }
        for j in 3..nv {
            lp.nonneg(j);
        }
        let sol = lp.solve().ok()?;
        if sol.status != LpStatus::Optimal || sol.x[2] <= tol::GEO {
            return None;
        }
        (sol.x[0], sol.x[1])
    };
    let moved = vec![q[0] + v * t1, q[1] + v * t2];
    let out = BilliardPair::new(
        t,
        moved,
        pair.p.vertices().to_vec(),
        pair.k_faces.clone(),
        pair.t_faces.clone(),
    )
    .ok()?;
    (verify::system_residual(k, t, &out) < tol::CERT).then_some(out)
}

/// Exhaustive two-bounce search. Unordered pairs of faces of `K` are combined
/// with ordered pairs of distinct faces of `T`. Results are sorted by face
/// tuple; a curve found from several tuples is kept once, under the smallest.
pub fn search_two_bounce(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    opts: &SearchOptions,
) -> TwoBounceSearch {
    let kf = k.faces();
    let tf = t.faces();
    let mut k_pairs = Vec::new();
    for i in 0..kf.len() {
        for j in i + 1..kf.len() {
            k_pairs.push([kf[i], kf[j]]);
        }
    }
    let mut t_pairs = Vec::new();
    for &g1 in &tf {
        for &g2 in &tf {
            if g1 != g2 {
                if let Some(ct) = t.normal_cone(g1).intersect(&t.normal_cone(g2).negated()) {
                    t_pairs.push(([g1, g2], ct));
                }
            }
        }
    }
    let per_k = par::map(&k_pairs, opts.parallelism, |fs| {
        let mut found = Vec::new();
        let mut feasible = 0u64;
        let mut failures = 0u64;
        let Some(ck) = k
            .normal_cone(fs[0])
            .intersect(&k.normal_cone(fs[1]).negated())
        else {
            return (found, feasible, failures);
        };
        for (gs, ct) in &t_pairs {
            feasible += 1;
            let tuple = FaceTuple { k: *fs, t: *gs };
            match solve_with_cones(k, t, &tuple, ct, &ck, None) {
                TupleOutcome::Found(pair) => found.push((tuple, pair)),
                TupleOutcome::Empty => {}
                TupleOutcome::LpFailure => failures += 1,
            }
        }
        (found, feasible, failures)
    });
    let mut stats = TwoBounceStats {
        tuples_visited: expected_tuple_count(k.len(), t.len()),
        ..Default::default()
    };
    let mut all = Vec::new();
    for (found, feasible, failures) in per_k {
        stats.cone_feasible += feasible;
        stats.lp_failures += failures;
        all.extend(found);
    }
    stats.found = all.len() as u64;
    all.sort_by_key(|a| a.0);
    let mut pairs: Vec<BilliardPair> = Vec::new();
    for (_, pair) in all {
        if !pairs.iter().any(|p| p.q.cyclically_equal(&pair.q, 1e-7)) {
            pairs.push(pair);
        }
    }
    TwoBounceSearch { pairs, stats }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: &[(f64, f64)]) -> ConvexPolytope2 {
        ConvexPolytope2::from_xy(pts).unwrap()
    }

    #[test]
    fn tuple_count_formula() {
        let k = poly(&[(0., -1.), (0., 1.), (-2., 1.), (-2., -1.)]);
        let t = poly(&[(1., 0.), (0., 1.), (-1., 0.), (0., -1.)]);
        let s = search_two_bounce(&k, &t, &SearchOptions::default());
        // C(8,2) * 8 * 7
        assert_eq!(s.stats.tuples_visited, 28 * 56);
        assert!(!s.pairs.is_empty());
        let min = s
            .pairs
            .iter()
            .map(|p| p.length)
            .fold(f64::INFINITY, f64::min);
        assert!((min - 4.0).abs() < 1e-9, "{min}");
    }

    #[test]
    fn results_are_sorted_and_distinct() {
        let k = ConvexPolytope2::regular(5, 1.0, 0.3).unwrap();
        let t = ConvexPolytope2::regular(4, 1.0, 0.1).unwrap();
        let s = search_two_bounce(&k, &t, &SearchOptions::sequential());
        for (i, a) in s.pairs.iter().enumerate() {
            for b in &s.pairs[i + 1..] {
                assert!(!a.q.cyclically_equal(&b.q, 1e-7));
                assert!((&a.k_faces, &a.t_faces) <= (&b.k_faces, &b.t_faces));
            }
        }
        let p = search_two_bounce(&k, &t, &SearchOptions::default());
        assert_eq!(s.pairs, p.pairs);
    }

    #[test]
    fn emitted_pairs_satisfy_the_system() {
        let k = ConvexPolytope2::regular(6, 1.0, 0.2).unwrap();
        let t = poly(&[(1., -0.5), (0.5, 1.), (-1., 0.2), (-0.3, -1.)]);
        for pair in search_two_bounce(&k, &t, &SearchOptions::default()).pairs {
            assert!(verify::system_residual(&k, &t, &pair) < tol::CERT);
            assert!(verify::length_residual(&t, &pair) < 1e-9);
            assert!(verify::dual_length_residual(&k, &t, &pair) < 1e-9);
            for j in 0..2 {
                let d = pair.q.edge(j);
                assert!((d - pair.t_normals[j] * pair.lambdas[j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn square_chords_are_moved_off_corners() {
        let k = poly(&[(1., -1.), (1., 1.), (-1., 1.), (-1., -1.)]);
        let t = poly(&[(1., -1.), (1., 1.), (-1., 1.), (-1., -1.)]);
        let s = search_two_bounce(&k, &t, &SearchOptions::default());
        let edge_pairs: Vec<_> = s
            .pairs
            .iter()
            .filter(|p| p.k_faces.iter().all(|f| f.is_edge()))
            .collect();
        assert!(!edge_pairs.is_empty());
        for p in edge_pairs {
            for (q, f) in p.q.vertices().iter().zip(&p.k_faces) {
                let (a, b) = k.edge(f.index());
                assert!(
                    q.dist(a) > 1e-6 && q.dist(b) > 1e-6,
                    "{q} at a corner of {f:?}"
                );
            }
        }
    }
}
