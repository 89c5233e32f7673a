//! Independent checks on emitted trajectories: residuals of the coupled
//! normal-cone system, the weak (local minimization) rule, and a brute-force
//! grid oracle for the minimal length over closed curves in `F(K)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounce2::BilliardPair;
use crate::geom::{self, ClosedCurve, ConvexPolytope2, Vec2};
use crate::lp::LpError;
use crate::par::{self, Parallelism};
use crate::tol;

/// Sample count along each supporting line in the weak-rule check.
pub const WEAK_SAMPLES: usize = 1025;
/// `ε_weak = WEAK_C · h` with `h = diam(K) / 512`.
pub const WEAK_C: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyError {
    UnsupportedBounceCount(usize),
    EmptyGrid,
    LineNotSupporting(usize),
    NormalCountMismatch { curve: usize, normals: usize },
    Lp(LpError),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::UnsupportedBounceCount(m) => {
                write!(f, "bounce count must be 2 or 3, got {m}")
            }
            VerifyError::EmptyGrid => write!(f, "grid resolution must be positive"),
            VerifyError::LineNotSupporting(j) => {
                write!(f, "line {j} does not support K at q_{j}")
            }
            VerifyError::NormalCountMismatch { curve, normals } => {
                write!(
                    f,
                    "{normals} line normals for a curve with {curve} vertices"
                )
            }
            VerifyError::Lp(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for VerifyError {}

impl From<LpError> for VerifyError {
    fn from(e: LpError) -> Self {
        VerifyError::Lp(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub system_residual: f64,
    pub length_residual: f64,
    pub dual_length_residual: f64,
    pub in_f_k: bool,
    pub in_f_t: bool,
}

impl Certificate {
    pub fn passes(&self, threshold: f64) -> bool {
        self.system_residual < threshold
            && self.length_residual < threshold
            && self.dual_length_residual < threshold
            && self.in_f_k
            && self.in_f_t
    }

    pub fn is_certified(&self) -> bool {
        self.passes(tol::CERT)
    }
}

/// Worst violation of the coupled system
/// `q_{j+1} - q_j ∈ N_T(p_j)`, `p_{j+1} - p_j ∈ -N_K(q_{j+1})`,
/// including how far each `q_j` and `p_j` is from the respective boundary.
/// Cones are taken at the faces where the points actually lie.
pub fn system_residual(k: &ConvexPolytope2, t: &ConvexPolytope2, pair: &BilliardPair) -> f64 {
    let q = pair.q.vertices();
    let p = pair.p.vertices();
    if q.len() != p.len() {
        return f64::INFINITY;
    }
    let m = q.len();
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let jn = (j + 1) % m;
        worst = worst
            .max(k.boundary_distance(q[j]))
            .max(t.boundary_distance(p[j]));
        let d = q[jn] - q[j];
        worst = worst.max(t.normal_cone(t.nearest_face(p[j])).distance(d));
        let e = p[jn] - p[j];
        worst = worst.max(k.normal_cone(k.nearest_face(q[jn])).distance(-e));
    }
    worst
}

/// `|ℓ_T(q) - Σ_j <q_{j+1} - q_j, p_j>|`.
pub fn length_residual(t: &ConvexPolytope2, pair: &BilliardPair) -> f64 {
    let q = &pair.q;
    let paired: f64 = (0..q.len())
        .map(|j| q.edge(j).dot(pair.p.vertices()[j]))
        .sum();
    (geom::ell_length(t, q) - paired).abs()
}

/// `ℓ_{-K}(p) = Σ_j h_K(p_j - p_{j+1})`.
pub fn dual_length(k: &ConvexPolytope2, p: &ClosedCurve) -> f64 {
    (0..p.len()).map(|j| k.support(-p.edge(j))).sum()
}

pub fn dual_length_residual(k: &ConvexPolytope2, t: &ConvexPolytope2, pair: &BilliardPair) -> f64 {
    (geom::ell_length(t, &pair.q) - dual_length(k, &pair.p)).abs()
}

pub fn certify(k: &ConvexPolytope2, t: &ConvexPolytope2, pair: &BilliardPair) -> Certificate {
    Certificate {
        system_residual: system_residual(k, t, pair),
        length_residual: length_residual(t, pair),
        dual_length_residual: dual_length_residual(k, t, pair),
        in_f_k: geom::in_f(k, pair.q.vertices()).unwrap_or(false),
        in_f_t: geom::in_f(t, pair.p.vertices()).unwrap_or(false),
    }
}

pub fn weak_rule_tolerance(k: &ConvexPolytope2) -> f64 {
    WEAK_C * k.diameter() / 512.0
}

/// For each `j`, the line through `q_j` with outer normal `normals[j]` must
/// support `K`. Returns `max_j (Σ_j(q_j) - min_{q̄ ∈ H_j} Σ_j(q̄))` with
/// `Σ_j(q̄) = h_T(q̄ - q_{j-1}) + h_T(q_{j+1} - q̄)`, the minimum taken over
/// evenly spaced samples on a window of half-width `diam(K)`.
pub fn check_weak_rule(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    q: &ClosedCurve,
    normals: &[Vec2],
) -> Result<f64, VerifyError> {
    let m = q.len();
    if normals.len() != m {
        return Err(VerifyError::NormalCountMismatch {
            curve: m,
            normals: normals.len(),
        });
    }
    let diam = k.diameter();
    let h = diam / ((WEAK_SAMPLES - 1) / 2) as f64;
    let qs = q.vertices();
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let n = normals[j]
            .normalized()
            .ok_or(VerifyError::LineNotSupporting(j))?;
        if (k.support(n) - n.dot(qs[j])).abs() > tol::GEO {
            return Err(VerifyError::LineNotSupporting(j));
        }
        let u = n.perp_ccw();
        let prev = qs[(j + m - 1) % m];
        let next = qs[(j + 1) % m];
        let sigma = |x: Vec2| t.support(x - prev) + t.support(next - x);
        let at = sigma(qs[j]);
        let best = (0..WEAK_SAMPLES)
            .map(|s| sigma(qs[j] + u * (-diam + s as f64 * h)))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(at - best);
    }
    Ok(worst)
}

/// Exact `F(K)` membership through the dual of the translation LP. The dual
/// feasible region `{y >= 0, Σ y_f a_f = 0, Σ y_f = 1}` has vertices supported
/// on antiparallel facet pairs or positively spanning facet triples; the
/// largest inward margin of a set is the minimum of `Σ y_f (b_f - max_x <a_f, x>)`
/// over those vertices.
#[derive(Clone, Debug)]
pub struct TranslationTest {
    normals: Vec<Vec2>,
    offsets: Vec<f64>,
    dual_vertices: Vec<Vec<(usize, f64)>>,
}

impl TranslationTest {
    pub fn new(k: &ConvexPolytope2) -> Self {
        let normals: Vec<Vec2> = k.facets().iter().map(|f| f.normal).collect();
        let offsets = k.facets().iter().map(|f| f.offset).collect();
        let n = normals.len();
        let mut dual_vertices = Vec::new();
        for f in 0..n {
            for g in f + 1..n {
                if (normals[f] + normals[g]).norm() <= 1e-12 {
                    dual_vertices.push(vec![(f, 0.5), (g, 0.5)]);
                }
                for h in g + 1..n {
                    let w = [
                        normals[g].cross(normals[h]),
                        normals[h].cross(normals[f]),
                        normals[f].cross(normals[g]),
                    ];
                    let same_sign = w.iter().all(|x| *x > 1e-12) || w.iter().all(|x| *x < -1e-12);
                    if same_sign {
                        let s: f64 = w.iter().sum();
                        dual_vertices.push(vec![(f, w[0] / s), (g, w[1] / s), (h, w[2] / s)]);
                    }
                }
            }
        }
        Self {
            normals,
            offsets,
            dual_vertices,
        }
    }

    /// Same quantity as [`geom::translation_margin`].
    pub fn margin(&self, points: &[Vec2]) -> f64 {
        let slack: Vec<f64> = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| {
                b - points
                    .iter()
                    .map(|x| a.dot(*x))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        self.margin_from_slack(&slack)
    }

    fn margin_from_slack(&self, slack: &[f64]) -> f64 {
        self.dual_vertices
            .iter()
            .map(|y| y.iter().map(|&(f, w)| w * slack[f]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn in_f(&self, points: &[Vec2]) -> bool {
        self.margin(points) <= tol::GEO
    }
}

/// Best closed curve found by [`brute_force_min`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleMin {
    pub length: f64,
    pub curve: Vec<Vec2>,
}

/// Boundary grid of `K`: `grid` evenly spaced points per facet, vertices included.
pub fn boundary_grid(k: &ConvexPolytope2, grid: usize) -> Vec<Vec2> {
    (0..k.len())
        .flat_map(|i| {
            let (a, b) = k.edge(i);
            (0..grid).map(move |s| a + (b - a) * (s as f64 / grid as f64))
        })
        .collect()
}

/// Minimum of `ℓ_T` over closed curves with `m` vertices taken from the
/// boundary grid that are valid closed curves and lie in `F(K)`.
pub fn brute_force_min(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    m: usize,
    grid: usize,
    mode: Parallelism,
) -> Result<OracleMin, VerifyError> {
    if !(2..=3).contains(&m) {
        return Err(VerifyError::UnsupportedBounceCount(m));
    }
    if grid == 0 {
        return Err(VerifyError::EmptyGrid);
    }
    let pts = boundary_grid(k, grid);
    let n = pts.len();
    // h[i * n + j] = h_T(pts[j] - pts[i])
    let hs: Vec<f64> = (0..n * n)
        .map(|ij| t.support(pts[ij % n] - pts[ij / n]))
        .collect();
    let test = TranslationTest::new(k);
    let nf = k.len();
    // dots[i * nf + f] = <a_f, pts[i]>
    let dots: Vec<f64> = pts
        .iter()
        .flat_map(|p| test.normals.iter().map(move |a| a.dot(*p)))
        .collect();
    let in_f = |idx: &[usize]| {
        let slack: Vec<f64> = (0..nf)
            .map(|f| {
                test.offsets[f]
                    - idx
                        .iter()
                        .map(|&i| dots[i * nf + f])
                        .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        test.margin_from_slack(&slack) <= tol::GEO
    };
    let valid = |idx: &[usize]| ClosedCurve::new(idx.iter().map(|&i| pts[i]).collect()).is_ok();
    let h = |i: usize, j: usize| hs[i * n + j];

    let firsts: Vec<usize> = (0..n).collect();
    let per_first = par::map(&firsts, mode, |&i| {
        let mut best = (f64::INFINITY, Vec::new());
        if m == 2 {
            for j in i + 1..n {
                let len = h(i, j) + h(j, i);
                if len < best.0 && valid(&[i, j]) && in_f(&[i, j]) {
                    best = (len, vec![i, j]);
                }
            }
        } else {
            for j in i + 1..n {
                for l in j + 1..n {
                    let fwd = h(i, j) + h(j, l) + h(l, i);
                    let rev = h(i, l) + h(l, j) + h(j, i);
                    let (len, order) = if fwd <= rev {
                        (fwd, [i, j, l])
                    } else {
                        (rev, [i, l, j])
                    };
                    if len < best.0 && valid(&order) && in_f(&order) {
                        best = (len, order.to_vec());
                    }
                }
            }
        }
        best
    });
    let (length, idx) =
        per_first.into_iter().fold(
            (f64::INFINITY, Vec::new()),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    Ok(OracleMin {
        length,
        curve: idx.iter().map(|&i| pts[i]).collect(),
    })
}

/// Bound on `brute_force_min - true minimum` from snapping each of the `m`
/// vertices to the grid: `2 m max_{|u|=1} h_T(u) · h` with `h` the largest
/// grid step on `∂K`.
pub fn oracle_tolerance(k: &ConvexPolytope2, t: &ConvexPolytope2, m: usize, grid: usize) -> f64 {
    let lip = (0..720)
        .map(|s| t.support(Vec2::from_angle(s as f64 * std::f64::consts::TAU / 720.0)))
        .fold(0.0, f64::max);
    2.0 * m as f64 * lip * k.max_edge_length() / grid as f64
}
