//! End-to-end run: both searches, certification, global minimum.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounce2::{BilliardPair, TwoBounceStats};
use crate::bounce3::ThreeBounceStats;
use crate::geom::ConvexPolytope2;
use crate::verify::{self, Certificate};
use crate::{search_three_bounce, search_two_bounce, tol, SearchOptions};

pub const REPORT_VERSION: u32 = 1;
pub const SCOPE: &str =
    "closed trajectories with 2 or 3 bouncing points; longer ones are not searched";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Body {
    pub vertices: Vec<crate::Vec2>,
    pub sha256: String,
}

impl Body {
    pub fn new(p: &ConvexPolytope2) -> Self {
        Self {
            vertices: p.vertices().to_vec(),
            sha256: digest(p),
        }
    }

    pub fn polytope(&self) -> Result<ConvexPolytope2, crate::GeomError> {
        ConvexPolytope2::new(self.vertices.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub k: Body,
    pub t: Body,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Number of bouncing points.
    pub m: usize,
    pub length: f64,
    pub certified: bool,
    pub certificate: Certificate,
    pub pair: BilliardPair,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub two_bounce_ms: f64,
    pub three_bounce_ms: f64,
    pub certify_ms: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub two_bounce: TwoBounceStats,
    pub three_bounce: ThreeBounceStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub scope: String,
    pub inputs: Inputs,
    /// Certification threshold used for `certified`.
    pub tol: f64,
    pub min: Option<f64>,
    pub argmin: Option<Candidate>,
    pub candidates: Vec<Candidate>,
    pub stats: Stats,
    pub timings: Timings,
}

impl RunReport {
    pub fn of_m(&self, m: usize) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter().filter(move |c| c.m == m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Which searches to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phases {
    pub two: bool,
    pub three: bool,
}

impl Phases {
    pub const BOTH: Phases = Phases {
        two: true,
        three: true,
    };
}

/// Hex SHA-256 of the compact JSON form of a polytope.
pub fn digest(p: &ConvexPolytope2) -> String {
    let json = serde_json::to_vec(p).expect("polytope serializes");
    Sha256::digest(&json)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn shortest(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    opts: &SearchOptions,
) -> Result<RunReport, crate::GeomError> {
    run(k, t, opts, tol::CERT, Phases::BOTH)
}

pub fn run(
    k: &ConvexPolytope2,
    t: &ConvexPolytope2,
    opts: &SearchOptions,
    threshold: f64,
    phases: Phases,
) -> Result<RunReport, crate::GeomError> {
    let mut timings = Timings::default();
    let mut stats = Stats::default();
    let mut pairs: Vec<BilliardPair> = Vec::new();
    if phases.two {
        let t0 = Instant::now();
        let s = search_two_bounce(k, t, opts);
        timings.two_bounce_ms = t0.elapsed().as_secs_f64() * 1e3;
        stats.two_bounce = s.stats;
        pairs.extend(s.pairs);
    }
    if phases.three {
        let t0 = Instant::now();
        let s = search_three_bounce(k, t, opts);
        timings.three_bounce_ms = t0.elapsed().as_secs_f64() * 1e3;
        stats.three_bounce = s.stats;
        pairs.extend(s.pairs);
    }
    let t0 = Instant::now();
    let candidates: Vec<Candidate> = pairs
        .into_iter()
        .map(|pair| {
            let certificate = verify::certify(k, t, &pair);
            Candidate {
                m: pair.bounces(),
                length: pair.length,
                certified: certificate.passes(threshold),
                certificate,
                pair,
            }
        })
        .collect();
    timings.certify_ms = t0.elapsed().as_secs_f64() * 1e3;
    let argmin = candidates
        .iter()
        .filter(|c| c.certified)
        .fold(None::<&Candidate>, |best, c| match best {
            Some(b) if b.length <= c.length => Some(b),
            _ => Some(c),
        })
        .cloned();
    Ok(RunReport {
        version: REPORT_VERSION,
        scope: SCOPE.into(),
        inputs: Inputs {
            k: Body::new(k),
            t: Body::new(t),
        },
        tol: threshold,
        min: argmin.as_ref().map(|c| c.length),
        argmin,
        candidates,
        stats,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn min_is_min_over_certified_candidates() {
        let f = fixtures::load("exampleF_aux").unwrap();
        let r = shortest(&f.k, &f.t, &SearchOptions::default()).unwrap();
        let independent = r
            .candidates
            .iter()
            .filter(|c| c.certificate.is_certified())
            .map(|c| c.length)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.min, Some(independent));
        assert!((independent - 4.0).abs() < 1e-6);
        assert_eq!(r.argmin.as_ref().unwrap().length, independent);
    }

    #[test]
    fn digest_is_stable_hex() {
        let p = ConvexPolytope2::from_xy(&[(0., 0.), (1., 0.), (0., 1.)]).unwrap();
        let d = digest(&p);
        assert_eq!(d.len(), 64);
        assert_eq!(d, digest(&p.clone()));
        let q = ConvexPolytope2::from_xy(&[(0., 0.), (1., 0.), (0., 2.)]).unwrap();
        assert_ne!(d, digest(&q));
    }

    #[test]
    fn report_round_trips() {
        let f = fixtures::load("exampleF_aux").unwrap();
        let r = shortest(&f.k, &f.t, &SearchOptions::default()).unwrap();
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
