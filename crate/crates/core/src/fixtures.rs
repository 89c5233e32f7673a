//! Named reference instances with machine-checkable expectations.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounce2::BilliardPair;
use crate::bounce3::three_bounce_on_triple;
use crate::geom::{self, positively_spans, ClosedCurve, ConvexPolytope2, Vec2};
use crate::par::Parallelism;
use crate::{obtuse, search_three_bounce, search_two_bounce, verify, SearchOptions};

pub const NAMES: [&str; 7] = [
    "exampleA",
    "exampleD",
    "exampleE",
    "exampleF_aux",
    "exampleG",
    "obtuse100",
    "fagnano",
];

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Stated for a hand-worked example.
    WorkedExample,
    /// Computed independently (closed form or another algorithm).
    Computed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    /// Smallest certified two-bounce length.
    MinTwoBounceLength {
        value: f64,
        tol: f64,
    },
    /// Grid oracle agrees with the smallest certified two-bounce length.
    OracleAgrees {
        m: usize,
        grid: usize,
        tol: f64,
    },
    EllLength {
        curve: String,
        value: f64,
        tol: f64,
    },
    /// `(curve, dual)` violates the coupled normal-cone system.
    StrongCertificationFails {
        curve: String,
        dual: String,
    },
    /// The three-bounce construction emits nothing on this ordered facet triple.
    NoThreeBounceOnTriple {
        facets: [usize; 3],
    },
    InF {
        curve: String,
        expected: bool,
    },
    /// Every vertex locally minimizes its two-segment length along the line
    /// with the given outer normal.
    WeakRuleHolds {
        curve: String,
        normals: Vec<Vec2>,
    },
    /// The given outer normals of `K` at the curve vertices do not positively span.
    NormalsNotSpanning {
        curve: String,
        normals: Vec<Vec2>,
    },
    NoRegularThreeBounce,
    /// Some three-bounce trajectory has its vertices within `tol` of the edge midpoints.
    MidpointTriangle {
        tol: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub check: Check,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub k: ConvexPolytope2,
    pub t: ConvexPolytope2,
    pub curves: BTreeMap<String, ClosedCurve>,
    pub expectations: Vec<Expectation>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FixtureError {
    Unknown { name: String, note: &'static str },
}

impl fmt::Display for FixtureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureError::Unknown { name, note } => write!(f, "unknown fixture `{name}`: {note}"),
        }
    }
}

impl std::error::Error for FixtureError {}

fn poly(pts: &[(f64, f64)]) -> ConvexPolytope2 {
    ConvexPolytope2::from_xy(pts).expect("fixture polygon")
}

fn curve(pts: &[(f64, f64)]) -> ClosedCurve {
    ClosedCurve::new(pts.iter().map(|&p| p.into()).collect()).expect("fixture curve")
}

fn unit(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y).normalized().expect("nonzero")
}

pub fn q_a(a: f64) -> ClosedCurve {
    curve(&[(-1.0 + a, 1.0 - 2.0 * a), (1.0 - a, 1.0 - 2.0 * a)])
}

pub fn load(name: &str) -> Result<Fixture, FixtureError> {
    use Source::*;
    let exp = |check, source| Expectation { check, source };
    let f = match name {
        "exampleA" => Fixture {
            name: name.into(),
            k: poly(&[(1., 0.), (0., 1.), (-1., 0.)]),
            t: poly(&[(1., -1.), (1., 1.), (-1., 1.), (-1., -1.)]),
            curves: BTreeMap::from([
                ("q".into(), curve(&[(0., 0.), (0.5, 0.5), (-0.5, 0.5)])),
                ("p_forced".into(), curve(&[(0., 1.), (-1., 0.), (0., -1.)])),
            ]),
            expectations: vec![
                exp(
                    Check::StrongCertificationFails {
                        curve: "q".into(),
                        dual: "p_forced".into(),
                    },
                    WorkedExample,
                ),
                exp(
                    Check::NoThreeBounceOnTriple { facets: [2, 0, 1] },
                    WorkedExample,
                ),
                exp(
                    Check::WeakRuleHolds {
                        curve: "q".into(),
                        normals: vec![Vec2::new(0., -1.), unit(1., 1.), unit(-1., 1.)],
                    },
                    WorkedExample,
                ),
            ],
        },
        "exampleD" => Fixture {
            name: name.into(),
            k: poly(&[(1., 1.), (-1., 1.), (-1., -1.), (1., -1.)]),
            // the un-rounded body; only rounding-independent facts are asserted
            t: poly(&[(2., 1.), (-2., 1.), (0., -1.)]),
            curves: BTreeMap::from([("q".into(), curve(&[(0., -1.), (0., 1.), (1., 0.)]))]),
            expectations: vec![exp(
                Check::NormalsNotSpanning {
                    curve: "q".into(),
                    normals: vec![Vec2::new(0., -1.), Vec2::new(0., 1.), Vec2::new(1., 0.)],
                },
                WorkedExample,
            )],
        },
        "exampleE" => Fixture {
            name: name.into(),
            k: poly(&[(1., -1.), (4., 2.), (-4., 2.), (-1., -1.)]),
            t: poly(&[(0.5, 2.), (-0.5, 0.), (0.5, -2.)]),
            curves: BTreeMap::from([("q".into(), curve(&[(0., -1.), (-2., 0.), (2., 0.)]))]),
            expectations: vec![
                exp(
                    Check::InF {
                        curve: "q".into(),
                        expected: false,
                    },
                    WorkedExample,
                ),
                exp(
                    Check::WeakRuleHolds {
                        curve: "q".into(),
                        normals: vec![Vec2::new(0., -1.), unit(-1., -1.), unit(1., -1.)],
                    },
                    WorkedExample,
                ),
                exp(
                    Check::NormalsNotSpanning {
                        curve: "q".into(),
                        normals: vec![Vec2::new(0., -1.), unit(-1., -1.), unit(1., -1.)],
                    },
                    WorkedExample,
                ),
            ],
        },
        "exampleF_aux" => Fixture {
            name: name.into(),
            k: poly(&[(0., -1.), (0., 1.), (-2., 1.), (-2., -1.)]),
            t: poly(&[(1., 0.), (0., 1.), (-1., 0.), (0., -1.)]),
            curves: BTreeMap::new(),
            expectations: vec![
                exp(
                    Check::MinTwoBounceLength {
                        value: 4.0,
                        tol: 1e-6,
                    },
                    WorkedExample,
                ),
                exp(
                    Check::OracleAgrees {
                        m: 2,
                        grid: 128,
                        tol: 0.05,
                    },
                    Computed,
                ),
            ],
        },
        "exampleG" => {
            let ks = poly(&[(1., 1.), (-1., 1.), (0., -1.)]);
            let left = unit(-2., -1.);
            let right = unit(2., -1.);
            let mut curves = BTreeMap::new();
            let mut expectations = Vec::new();
            for (a, tag) in [(0.0, "0"), (0.25, "0.25"), (0.5, "0.5")] {
                let id = format!("q_a({tag})");
                curves.insert(id.clone(), q_a(a));
                expectations.push(exp(
                    Check::EllLength {
                        curve: id.clone(),
                        value: 4.0 - 4.0 * a,
                        tol: 1e-9,
                    },
                    WorkedExample,
                ));
                expectations.push(exp(
                    Check::WeakRuleHolds {
                        curve: id,
                        normals: vec![left, right],
                    },
                    WorkedExample,
                ));
            }
            Fixture {
                name: name.into(),
                k: ks,
                t: poly(&[(1., -2.), (1., 2.), (-1., 2.), (-1., -2.)]),
                curves,
                expectations,
            }
        }
        "obtuse100" => Fixture {
            name: name.into(),
            k: poly(&[(0., 0.), (4., 0.), (0.5, 0.5)]),
            t: ConvexPolytope2::regular(64, 1.0, 0.0).expect("regular polygon"),
            curves: BTreeMap::new(),
            expectations: vec![exp(Check::NoRegularThreeBounce, WorkedExample)],
        },
        "fagnano" => Fixture {
            name: name.into(),
            k: ConvexPolytope2::regular(3, 1.0, FRAC_PI_2).expect("triangle"),
            t: ConvexPolytope2::regular(64, 1.0, 0.0).expect("regular polygon"),
            curves: BTreeMap::new(),
            expectations: vec![exp(Check::MidpointTriangle { tol: 0.05 }, Computed)],
        },
        "exampleB" | "exampleC" => {
            return Err(FixtureError::Unknown {
                name: name.into(),
                note:
                    "this example needs a body with curved boundary, which is outside polygon scope",
            })
        }
        _ => {
            return Err(FixtureError::Unknown {
                name: name.into(),
                note: "see fixtures::NAMES for the available instances",
            })
        }
    };
    Ok(f)
}

pub fn all() -> Vec<Fixture> {
    NAMES
        .iter()
        .map(|n| load(n).expect("built-in fixture"))
        .collect()
}

impl Fixture {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    fn curve(&self, id: &str) -> Result<&ClosedCurve, String> {
        self.curves
            .get(id)
            .ok_or_else(|| format!("no curve `{id}`"))
    }

    /// Evaluate every expectation; `Err` carries a short reason.
    pub fn check(&self, opts: &SearchOptions) -> Vec<(Expectation, Result<(), String>)> {
        self.expectations
            .iter()
            .map(|e| (e.clone(), self.check_one(&e.check, opts)))
            .collect()
    }

    fn min_certified_two_bounce(&self, opts: &SearchOptions) -> Option<f64> {
        search_two_bounce(&self.k, &self.t, opts)
            .pairs
            .iter()
            .filter(|p| verify::certify(&self.k, &self.t, p).is_certified())
            .map(|p| p.length)
            .reduce(f64::min)
    }

    fn check_one(&self, check: &Check, opts: &SearchOptions) -> Result<(), String> {
        let (k, t) = (&self.k, &self.t);
        match check {
            Check::MinTwoBounceLength { value, tol } => {
                let min = self
                    .min_certified_two_bounce(opts)
                    .ok_or("no certified two-bounce pair")?;
                ensure((min - value).abs() <= *tol, format!("min {min} vs {value}"))
            }
            Check::OracleAgrees { m, grid, tol } => {
                let min = self
                    .min_certified_two_bounce(opts)
                    .ok_or("no certified two-bounce pair")?;
                let o = verify::brute_force_min(k, t, *m, *grid, Parallelism::Parallel)
                    .map_err(|e| e.to_string())?;
                ensure(
                    (min - o.length).abs() <= *tol,
                    format!("oracle {} vs {min}", o.length),
                )
            }
            Check::EllLength { curve, value, tol } => {
                let l = geom::ell_length(t, self.curve(curve)?);
                ensure((l - value).abs() <= *tol, format!("length {l} vs {value}"))
            }
            Check::StrongCertificationFails { curve, dual } => {
                let q = self.curve(curve)?.vertices().to_vec();
                let p = self.curve(dual)?.vertices().to_vec();
                let faces_k = q.iter().map(|x| k.nearest_face(*x)).collect();
                let faces_t = p.iter().map(|x| t.nearest_face(*x)).collect();
                let pair =
                    BilliardPair::new(t, q, p, faces_k, faces_t).map_err(|e| e.to_string())?;
                let c = verify::certify(k, t, &pair);
                ensure(
                    c.system_residual >= crate::tol::CERT,
                    format!("system residual {} unexpectedly small", c.system_residual),
                )
            }
            Check::NoThreeBounceOnTriple { facets } => {
                match three_bounce_on_triple(k, t, *facets, opts.samples) {
                    Ok(p) => Err(format!("emitted a pair of length {}", p.length)),
                    Err(_) => Ok(()),
                }
            }
            Check::InF { curve, expected } => {
                let got =
                    geom::in_f(k, self.curve(curve)?.vertices()).map_err(|e| e.to_string())?;
                ensure(got == *expected, format!("in F(K) = {got}"))
            }
            Check::WeakRuleHolds { curve, normals } => {
                let defect = verify::check_weak_rule(k, t, self.curve(curve)?, normals)
                    .map_err(|e| e.to_string())?;
                ensure(
                    defect <= verify::weak_rule_tolerance(k),
                    format!("weak-rule defect {defect:e}"),
                )
            }
            Check::NormalsNotSpanning { curve, normals } => {
                let s = positively_spans(normals).map_err(|e| e.to_string())?;
                let q = self.curve(curve)?.vertices();
                for (i, n) in normals.iter().enumerate() {
                    if (k.support(*n) - n.dot(q[i])).abs() > 1e-9 {
                        return Err(format!("normal {i} is not an outer normal at vertex {i}"));
                    }
                }
                ensure(!s, "normals positively span".into())
            }
            Check::NoRegularThreeBounce => ensure(
                !obtuse::regular_three_bounce_exists(k, t, opts),
                "a three-bounce trajectory was found".into(),
            ),
            Check::MidpointTriangle { tol } => {
                let mids: Vec<Vec2> = (0..k.len())
                    .map(|i| {
                        let (a, b) = k.edge(i);
                        (a + b) * 0.5
                    })
                    .collect();
                let s = search_three_bounce(k, t, opts);
                let best = s
                    .pairs
                    .iter()
                    .map(|p| midpoint_error(p.q.vertices(), &mids))
                    .fold(f64::INFINITY, f64::min);
                ensure(
                    best <= *tol,
                    format!("closest trajectory is {best} from the midpoints"),
                )
            }
        }
    }
}

/// Largest distance from a curve vertex to the nearest of `mids`.
pub fn midpoint_error(q: &[Vec2], mids: &[Vec2]) -> f64 {
    q.iter()
        .map(|x| {
            mids.iter()
                .map(|m| x.dist(*m))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads_and_round_trips() {
        for f in all() {
            let once = f.to_json();
            let back = Fixture::from_json(&once).unwrap();
            assert_eq!(back, f, "{}", f.name);
            assert_eq!(back.to_json(), once, "{}", f.name);
        }
    }

    #[test]
    fn stubs_explain_themselves() {
        for n in ["exampleB", "exampleC"] {
            let e = load(n).unwrap_err();
            assert!(e.to_string().contains("curved boundary"));
        }
        assert!(load("nope").is_err());
    }

    #[test]
    fn worked_example_values_are_present() {
        let f = load("exampleF_aux").unwrap();
        assert!(f.expectations.iter().any(|e| matches!(
            e.check,
            Check::MinTwoBounceLength { value, tol } if value == 4.0 && tol == 1e-6
        )));
        let g = load("exampleG").unwrap();
        assert!((geom::ell_length(&g.t, &g.curves["q_a(0)"]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn light_fixtures_pass_their_checks() {
        for name in ["exampleA", "exampleD", "exampleE", "exampleG"] {
            let f = load(name).unwrap();
            for (e, r) in f.check(&SearchOptions::default()) {
                assert!(r.is_ok(), "{name}: {:?} -> {:?}", e.check, r);
            }
        }
    }
}
