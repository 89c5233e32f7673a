//! Random polygon instances: standard-normal directions, uniform radii, hull.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::geom::{hull_vertices, ConvexPolytope2, Vec2};

/// Attempts per polygon before giving up.
pub const RETRY_CAP: usize = 10_000;
/// From this many vertices on, radii are drawn from a narrower interval so
/// that hulls with many vertices stay reachable.
pub const NARROW_FROM: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub enum GenError {
    TooFewVertices(usize),
    GenerationExhausted { n: usize, attempts: usize },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::TooFewVertices(n) => write!(f, "vertex count must be at least 3, got {n}"),
            GenError::GenerationExhausted { n, attempts } => {
                write!(
                    f,
                    "no hull with exactly {n} vertices after {attempts} attempts"
                )
            }
        }
    }
}

impl std::error::Error for GenError {}

fn radius_range(n: usize) -> (f64, f64) {
    if n >= NARROW_FROM {
        (2.0, 3.0)
    } else {
        (1.0, 3.0)
    }
}

/// A polygon with exactly `n` vertices. The point count starts at `n` and
/// moves up or down by one depending on whether the last hull was too small
/// or too large.
pub fn random_polytope<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<ConvexPolytope2, GenError> {
    if n < 3 {
        return Err(GenError::TooFewVertices(n));
    }
    sample_hull(n, n, rng, false)
}

/// A centrally symmetric polygon with `2 * pairs` vertices. Every edge has an
/// antiparallel partner.
pub fn random_symmetric_polytope<R: Rng + ?Sized>(
    pairs: usize,
    rng: &mut R,
) -> Result<ConvexPolytope2, GenError> {
    if pairs < 2 {
        return Err(GenError::TooFewVertices(2 * pairs));
    }
    sample_hull(2 * pairs, pairs, rng, true)
}

fn sample_hull<R: Rng + ?Sized>(
    n: usize,
    start: usize,
    rng: &mut R,
    symmetric: bool,
) -> Result<ConvexPolytope2, GenError> {
    let (lo, hi) = radius_range(n);
    let radius = Uniform::new_inclusive(lo, hi).expect("valid interval");
    let mut count = start;
    for _ in 0..RETRY_CAP {
        let mut pts: Vec<Vec2> = (0..count)
            .map(|_| {
                let dir = loop {
                    let x: f64 = StandardNormal.sample(rng);
                    let y: f64 = StandardNormal.sample(rng);
                    if let Some(u) = Vec2::new(x, y).normalized() {
                        break u;
                    }
                };
                dir * radius.sample(rng)
            })
            .collect();
        if symmetric {
            pts.extend(pts.clone().into_iter().map(|p| -p));
        }
        let hull = hull_vertices(&pts);
        if hull.len() == n {
            if let Ok(p) = ConvexPolytope2::new(hull) {
                return Ok(p);
            }
        } else if hull.len() < n {
            count += 1;
        } else {
            count = (count - 1).max(start);
        }
    }
    Err(GenError::GenerationExhausted {
        n,
        attempts: RETRY_CAP,
    })
}

/// `(K, T)` for a seed; `T` is recentered on its centroid if the origin is not interior.
pub fn generate_instance(
    nk: usize,
    nt: usize,
    seed: u64,
) -> Result<(ConvexPolytope2, ConvexPolytope2), GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = random_polytope(nk, &mut rng)?;
    let mut t = random_polytope(nt, &mut rng)?;
    if !t.has_origin_interior() {
        t = t.translated(-t.centroid());
    }
    Ok((k, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_vertex_counts() {
        for n in [3, 5, 8, 13, 25, 31] {
            let (k, t) = generate_instance(n, n, 7).unwrap();
            assert_eq!(k.len(), n);
            assert_eq!(t.len(), n);
            assert!(t.has_origin_interior());
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let a = generate_instance(6, 5, 42).unwrap();
        let b = generate_instance(6, 5, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(6, 5, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn radii_in_range() {
        let (k, _) = generate_instance(10, 4, 1).unwrap();
        for v in k.vertices() {
            assert!(v.norm() >= 1.0 - 1e-12 && v.norm() <= 3.0 + 1e-12);
        }
    }

    #[test]
    fn symmetric_has_antiparallel_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_symmetric_polytope(3, &mut rng).unwrap();
        assert_eq!(p.len(), 6);
        for i in 0..3 {
            let (a, b) = (p.facet(i).normal, p.facet(i + 3).normal);
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_tiny_counts() {
        assert_eq!(generate_instance(2, 5, 0), Err(GenError::TooFewVertices(2)));
    }
}
