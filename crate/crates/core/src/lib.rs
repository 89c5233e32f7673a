//! Shortest closed Minkowski billiard trajectories on planar convex polytopes.
//!
//! A billiard table `K` and a geometry body `T` are both convex polygons. The
//! length of a closed polygonal curve `q` is measured with the support function
//! of `T`, `ℓ_T(q) = Σ h_T(q_{j+1} - q_j)`, and a closed (strong) trajectory is a
//! curve `q` on `∂K` together with a dual curve `p` on `∂T` such that
//!
//! ```text
//! q_{j+1} - q_j ∈  N_T(p_j)
//! p_{j+1} - p_j ∈ -N_K(q_{j+1})
//! ```
//!
//! for every `j`. Length minimizers have two or three bouncing points, so the
//! library provides an exhaustive two-bounce search over face tuples
//! ([`bounce2`]), a three-bounce construction through maximal inscribed
//! triangles ([`bounce3`]), and an independent certification and brute-force
//! oracle layer ([`verify`]).
//!
//! ```
//! use minkbill::{geom::ConvexPolytope2, report, SearchOptions};
//!
//! let k = ConvexPolytope2::from_xy(&[(0.0, -1.0), (0.0, 1.0), (-2.0, 1.0), (-2.0, -1.0)]).unwrap();
//! let t = ConvexPolytope2::from_xy(&[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]).unwrap();
//! let run = report::shortest(&k, &t, &SearchOptions::default()).unwrap();
//! assert!((run.min.unwrap() - 4.0).abs() < 1e-9);
//! ```

pub mod bench;
pub mod bounce2;
pub mod bounce3;
pub mod fixtures;
pub mod generate;
pub mod geom;
pub mod lp;
pub mod obtuse;
pub mod par;
pub mod plot;
pub mod report;
pub mod tol;
pub mod verify;

pub use bounce2::{search_two_bounce, BilliardPair};
pub use bounce3::search_three_bounce;
pub use geom::{ClosedCurve, ConvexPolytope2, Face, GeomError, NormalCone, Vec2};
pub use par::Parallelism;

/// Knobs shared by both searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Directions sampled per vertex normal cone of `T`, extreme rays included.
    pub samples: usize,
    pub parallelism: Parallelism,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            samples: 8,
            parallelism: Parallelism::default(),
        }
    }
}

impl SearchOptions {
    pub fn sequential() -> Self {
        Self {
            parallelism: Parallelism::Sequential,
            ..Self::default()
        }
    }
}
