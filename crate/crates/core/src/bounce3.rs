//! Three-bounce search through maximal inscribed triangles.
//!
//! For a positively spanning triple of facet normals `n_0, n_1, n_2` of `K`:
//!
//! 1. build the triangle `Δ` whose edges are `γ_{i+1} - γ_i = α_i n_i`, `α_0 = -1`;
//! 2. find the largest translate-and-scale `λΔ + u` inside `T` (the inbody) and
//!    require its vertex normal cones to positively span;
//! 3. pick outer normals of `T` at the inbody vertices (sampling vertex cones),
//!    build `ξ` with edges `ξ_{i+1} - ξ_i = β_{i+1} n'_{i+1}`, `β_0 = 1`;
//! 4. fit `μξ + e` so that vertex `i` lands on facet `i` of `K`.
//!
//! The bouncing points are `q_i = μξ_i + e` and the dual points are
//! `p_i = λγ_{i+1} + u`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounce2::BilliardPair;
use crate::geom::{positively_spans, ConvexPolytope2, Face, GeomError, Vec2};
use crate::lp::{LinearProgram, LpStatus};
use crate::par;
use crate::{tol, verify, SearchOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaTriangle {
    pub normals: [Vec2; 3],
    pub alphas: [f64; 3],
    pub vertices: [Vec2; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inbody {
    pub lambda: f64,
    pub u: Vec2,
    pub vertices: [Vec2; 3],
    pub faces: [Face; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiTriangle {
    pub normals: [Vec2; 3],
    pub betas: [f64; 3],
    pub vertices: [Vec2; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub mu: f64,
    pub e: Vec2,
    pub q: [Vec2; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InbodyFailure {
    /// The LP optimum is degenerate (`λ ≈ 0`) or the LP failed.
    DegenerateLp,
    /// Some vertex of the maximal triangle is interior to `T`.
    NotOnBoundary,
    /// The vertex normal cones lie in a closed halfplane.
    HalfspaceViolation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitFailure {
    Singular,
    MuNonpositive,
    OffFacet(usize),
}

/// Why a facet triple produced no trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    NotSpanning,
    Inbody(InbodyFailure),
    NoDualNormals,
    /// Every candidate failed; the reason of the last one is kept.
    Fit(FitFailure),
    XiNotSpanning,
    Residual,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::error::Error for Rejection {}

/// Solve `a n_1 + b n_2 = r` by Cramer's rule.
fn solve2(n1: Vec2, n2: Vec2, r: Vec2) -> Option<(f64, f64)> {
    let det = n1.cross(n2);
    if det.abs() < tol::GEO {
        return None;
    }
    Some((r.cross(n2) / det, n1.cross(r) / det))
}

pub fn build_gamma(normals: [Vec2; 3]) -> Result<GammaTriangle, Rejection> {
    let [n0, n1, n2] = normals;
    let (a1, a2) = solve2(n1, n2, n0).ok_or(Rejection::NotSpanning)?;
    if a1 >= -tol::GEO || a2 >= -tol::GEO {
        return Err(Rejection::NotSpanning);
    }
    let alphas = [-1.0, a1, a2];
    let g1 = n0 * alphas[0];
    let g2 = g1 + n1 * a1;
    Ok(GammaTriangle {
        normals,
        alphas,
        vertices: [Vec2::ZERO, g1, g2],
    })
}

pub fn build_xi(normals: [Vec2; 3]) -> Result<XiTriangle, Rejection> {
    let [n0, n1, n2] = normals;
    let (b1, b2) = solve2(n1, n2, -n0).ok_or(Rejection::XiNotSpanning)?;
    if b1 <= tol::GEO || b2 <= tol::GEO {
        return Err(Rejection::XiNotSpanning);
    }
    let x1 = n1 * b1;
    let x2 = x1 + n2 * b2;
    Ok(XiTriangle {
        normals,
        betas: [1.0, b1, b2],
        vertices: [Vec2::ZERO, x1, x2],
    })
}

/// Largest `λ >= 0` and `u` with `λ γ_k + u ∈ T` for all three vertices, then
/// boundary and spanning checks on the result.
pub fn find_inbody(triangle: &[Vec2; 3], t: &ConvexPolytope2) -> Result<Inbody, InbodyFailure> {
    let mut lp = LinearProgram::maximize(vec![1.0, 0.0, 0.0]);
    for f in t.facets() {
        for g in triangle {
            lp.le(vec![f.normal.dot(*g), f.normal.x, f.normal.y], f.offset);
        }
    }
    lp.nonneg(0);
    let sol = lp.solve().map_err(|_| InbodyFailure::DegenerateLp)?;
    if sol.status != LpStatus::Optimal || sol.x[0] <= tol::GEO {
        return Err(InbodyFailure::DegenerateLp);
    }
    let lambda = sol.x[0];
    let u = Vec2::new(sol.x[1], sol.x[2]);
    let vertices = triangle.map(|g| g * lambda + u);
    let mut faces = [Face::Vertex(0); 3];
    for (face, v) in faces.iter_mut().zip(&vertices) {
        if t.max_slack(*v) < -tol::GEO {
            return Err(InbodyFailure::NotOnBoundary);
        }
        *face = t.locate(*v).ok_or(InbodyFailure::NotOnBoundary)?;
    }
    let gens: Vec<Vec2> = faces
        .iter()
        .flat_map(|f| t.normal_cone(*f).generators())
        .collect();
    if !positively_spans(&gens).unwrap_or(false) {
        return Err(InbodyFailure::HalfspaceViolation);
    }
    Ok(Inbody {
        lambda,
        u,
        vertices,
        faces,
    })
}

/// Directions tried at a vertex cone, center first, then alternating outward.
fn ordered_samples(t: &ConvexPolytope2, face: Face, samples: usize) -> Vec<(Vec2, usize)> {
    let dirs = t.normal_cone(face).sample(samples);
    let c = (dirs.len() - 1) as f64 / 2.0;
    let mut idx: Vec<usize> = (0..dirs.len()).collect();
    idx.sort_by(|&a, &b| {
        (a as f64 - c)
            .abs()
            .total_cmp(&(b as f64 - c).abs())
            .then(a.cmp(&b))
    });
    idx.iter()
        .enumerate()
        .map(|(rank, &i)| (dirs[i], rank))
        .collect()
}

/// All normal triples at the inbody vertices (facet normal at edge points,
/// `samples` directions per vertex cone), ordered from the cone centers
/// outward, before the spanning filter.
pub fn dual_normal_candidates(
    inbody: &Inbody,
    t: &ConvexPolytope2,
    samples: usize,
) -> Vec<[Vec2; 3]> {
    let lists: Vec<Vec<(Vec2, usize)>> = inbody
        .faces
        .iter()
        .map(|f| ordered_samples(t, *f, samples))
        .collect();
    let mut out = Vec::new();
    for a in &lists[0] {
        for b in &lists[1] {
            for c in &lists[2] {
                out.push(([a.0, b.0, c.0], a.1 + b.1 + c.1, (a.1, b.1, c.1)));
            }
        }
    }
    out.sort_by(|x, y| x.1.cmp(&y.1).then(x.2.cmp(&y.2)));
    out.into_iter().map(|x| x.0).collect()
}

pub fn dual_normals(inbody: &Inbody, t: &ConvexPolytope2, samples: usize) -> Vec<[Vec2; 3]> {
    dual_normal_candidates(inbody, t, samples)
        .into_iter()
        .filter(|ns| positively_spans(ns).unwrap_or(false))
        .collect()
}

/// Solve `<a_i, μ ξ_i + e> = b_i` for the three facets and check that each
/// point lies on its (closed) facet.
pub fn fit_to_k(
    xi: &[Vec2; 3],
    k: &ConvexPolytope2,
    facets: [usize; 3],
) -> Result<Fit, FitFailure> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        let f = k.facet(facets[i]);
        m[i] = [f.normal.dot(xi[i]), f.normal.x, f.normal.y, f.offset];
    }
    let x = gauss3(m).ok_or(FitFailure::Singular)?;
    let (mu, e) = (x[0], Vec2::new(x[1], x[2]));
    if mu <= tol::GEO {
        return Err(FitFailure::MuNonpositive);
    }
    let q = xi.map(|x| x * mu + e);
    for i in 0..3 {
        let (a, b) = k.edge(facets[i]);
        let d = b - a;
        let s = (q[i] - a).dot(d) / d.norm();
        if s < -tol::GEO || s > d.norm() + tol::GEO {
            return Err(FitFailure::OffFacet(i));
        }
    }
    Ok(Fit { mu, e, q })
}

fn gauss3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, p);
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..4 {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Run the whole construction on one ordered facet triple of `K`.
pub fn three_bounce_on_triple(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    facets: [usize; 3],
    samples: usize,
) -> Result<BilliardPair, Rejection> {
    let n = facets.map(|i| k.facet(i).normal);
    if !positively_spans(&n).unwrap_or(false) {
        return Err(Rejection::NotSpanning);
    }
    let gamma = build_gamma(n)?;
    let inbody = find_inbody(&gamma.vertices, t).map_err(Rejection::Inbody)?;
    let candidates = dual_normals(&inbody, t, samples);
    if candidates.is_empty() {
        return Err(Rejection::NoDualNormals);
    }
    let mut last = Rejection::NoDualNormals;
    for ns in candidates {
        let xi = match build_xi(ns) {
            Ok(x) => x,
            Err(r) => {
                last = r;
                continue;
            }
        };
        let fit = match fit_to_k(&xi.vertices, k, facets) {
            Ok(f) => f,
            Err(e) => {
                last = Rejection::Fit(e);
                continue;
            }
        };
        match assemble(k, t, &fit, &inbody, facets) {
            Ok(pair) if verify::system_residual(k, t, &pair) < tol::CERT => return Ok(pair),
            _ => last = Rejection::Residual,
        }
    }
    Err(last)
}

fn assemble(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    fit: &Fit,
    inbody: &Inbody,
    facets: [usize; 3],
) -> Result<BilliardPair, GeomError> {
    let _ = k;
    let p: Vec<Vec2> = (0..3).map(|i| inbody.vertices[(i + 1) % 3]).collect();
    let t_faces = (0..3).map(|i| inbody.faces[(i + 1) % 3]).collect();
    BilliardPair::new(
        t,
        fit.q.to_vec(),
        p,
        facets.iter().map(|&i| Face::Edge(i)).collect(),
        t_faces,
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeBounceStats {
    /// `n (n - 1) (n - 2) / 3` ordered triples, `n = |V(K)|`.
    pub triples_visited: u64,
    pub spanning: u64,
    pub inbodies: u64,
    pub found: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeBounceSearch {
    pub pairs: Vec<BilliardPair>,
    pub stats: ThreeBounceStats,
}

/// Facet triples `(i, j, l)` with `i < j`, `i < l`, `j != l`: each 3-subset in
/// both cyclic orientations.
pub fn facet_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in i + 1..n {
                if l != j {
                    out.push([i, j, l]);
                }
            }
        }
    }
    out
}

pub fn search_three_bounce(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    opts: &SearchOptions,
) -> ThreeBounceSearch {
    let triples = facet_triples(k.len());
    let results = par::map(&triples, opts.parallelism, |&tr| {
        three_bounce_on_triple(k, t, tr, opts.samples)
    });
    let mut stats = ThreeBounceStats {
        triples_visited: triples.len() as u64,
        ..Default::default()
    };
    let mut pairs = Vec::new();
    for r in results {
        match r {
            Ok(pair) => {
                stats.spanning += 1;
                stats.inbodies += 1;
                stats.found += 1;
                pairs.push(pair);
            }
            Err(Rejection::NotSpanning) => {}
            Err(Rejection::Inbody(_)) => stats.spanning += 1,
            Err(_) => {
                stats.spanning += 1;
                stats.inbodies += 1;
            }
        }
    }
    ThreeBounceSearch { pairs, stats }
}
