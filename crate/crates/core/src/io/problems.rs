//! Built-in benchmark problems.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::boundary::{BcKind, BoundarySpec, FarField};
use crate::error::{Error, Result};
use crate::models::{Euler, EulerDomain, Model, ScalarDomain, ScalarModel, VelocityField};
use crate::{Point, State};

pub type InitialFn<const M: usize> = Arc<dyn Fn(Point) -> State<M> + Send + Sync>;
pub type ExactFn<const M: usize> = Arc<dyn Fn(Point, f64) -> State<M> + Send + Sync>;

/// Polygonal computational domain with a suggested mesh size.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    /// Counterclockwise corners; side `i` (corner `i` to `i + 1`) carries
    /// boundary tag `i + 1` in generated meshes.
    pub corners: Vec<Point>,
    pub h: f64,
}

#[derive(Clone)]
pub struct ProblemDef<Mo: Model<M>, const M: usize> {
    pub name: String,
    pub model: Mo,
    pub domain: Mo::Domain,
    pub initial: InitialFn<M>,
    pub exact: Option<ExactFn<M>>,
    pub bc: BoundarySpec<M>,
    /// Data used for boundary tags mapped to a far-field condition.
    pub far_field: FarField<M>,
    pub t_end: f64,
    pub geometry: Geometry,
}

impl<Mo: Model<M>, const M: usize> fmt::Debug for ProblemDef<Mo, M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDef")
            .field("name", &self.name)
            .field("model", &self.model)
            .field("domain", &self.domain)
            .field("bc", &self.bc)
            .field("t_end", &self.t_end)
            .field("geometry", &self.geometry)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum Problem {
    Scalar(ProblemDef<ScalarModel, 1>),
    Euler(ProblemDef<Euler, 4>),
}

impl Problem {
    pub fn name(&self) -> &str {
        match self {
            Problem::Scalar(p) => &p.name,
            Problem::Euler(p) => &p.name,
        }
    }

    pub fn geometry(&self) -> &Geometry {
        match self {
            Problem::Scalar(p) => &p.geometry,
            Problem::Euler(p) => &p.geometry,
        }
    }

    pub fn t_end(&self) -> f64 {
        match self {
            Problem::Scalar(p) => p.t_end,
            Problem::Euler(p) => p.t_end,
        }
    }
}

/// Identifiers accepted by [`builtin`], with a one-line description.
pub const CATALOG: [(&str, &str); 6] = [
    ("example1", "Gaussian transport, a = (-1, -1), on [-20, 20]^2"),
    ("example2", "Zalesak solid-body rotation on [0, 1]^2"),
    ("example3", "KPP rotating wave on [-2, 2]^2"),
    ("example4", "Four-quadrant Riemann problem on [0, 1.2]^2"),
    ("example5", "Double Mach reflection off a 30 degree ramp"),
    ("example6", "Shock diffraction at a convex 90 degree corner"),
];

fn canonical(id: &str) -> Option<&'static str> {
    Some(match id.to_ascii_lowercase().as_str() {
        "example1" | "1" | "transport" => "example1",
        "example2" | "2" | "zalesak" => "example2",
        "example3" | "3" | "kpp" => "example3",
        "example4" | "4" | "kt" | "riemann" => "example4",
        "example5" | "5" | "dmr" => "example5",
        "example6" | "6" | "diffraction" => "example6",
        _ => return None,
    })
}

fn rect(x: [f64; 2], y: [f64; 2], h: f64) -> Geometry {
    Geometry { corners: vec![[x[0], y[0]], [x[1], y[0]], [x[1], y[1]], [x[0], y[1]]], h }
}

/// Exterior data of a vertical shock starting at `x0` and moving right with
/// speed `s`: post-shock state behind it, pre-shock ahead.
pub fn moving_shock(pre: State<4>, post: State<4>, x0: f64, s: f64) -> FarField<4> {
    FarField::Function(Arc::new(move |x: Point, t: f64| if x[0] <= x0 + s * t { post } else { pre }))
}

/// State behind a normal shock of Mach number `mach` running into gas at
/// rest with density `rho` and pressure `p`: (ρ, u, p) with u the
/// post-shock speed in the direction of propagation.
pub fn normal_shock(gamma: f64, rho: f64, p: f64, mach: f64) -> [f64; 3] {
    let m2 = mach * mach;
    let c = (gamma * p / rho).sqrt();
    let r = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0);
    let p2 = p * (1.0 + 2.0 * gamma / (gamma + 1.0) * (m2 - 1.0));
    [rho * r, mach * c * (1.0 - 1.0 / r), p2]
}

/// Gaussian bump of Example 1.
pub fn transport_gaussian(x: Point, t: f64) -> f64 {
    let c = [15.0 - t, 15.0 - t];
    (-0.25 * ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2))).exp()
}

/// Zalesak initial data. The slot is carved out of the third body, so
/// it is tested before the bodies.
pub fn zalesak(x: Point) -> f64 {
    let d = |c: Point| ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt();
    let r1 = d([0.25, 0.5]);
    if r1 <= 0.15 {
        return 0.25 * (1.0 + (PI * r1 / 0.15).cos());
    }
    let r2 = d([0.5, 0.25]);
    if r2 <= 0.15 {
        return 1.0 - r2 / 0.15;
    }
    let slot = (x[0] - 0.5).abs() <= 0.025 && (0.6..=0.85).contains(&x[1]);
    if d([0.5, 0.75]) <= 0.15 && !slot {
        return 1.0;
    }
    0.0
}

pub fn kpp_initial(x: Point) -> f64 {
    if (x[0] * x[0] + (x[1] - 0.5).powi(2)).sqrt() <= 1.0 {
        3.5 * PI
    } else {
        0.25 * PI
    }
}

/// Example 4 primitive states; the first region whose closure contains
/// the point wins.
pub fn quadrant_state(x: Point) -> [f64; 4] {
    let (r, t) = (x[0] >= 1.0, x[1] >= 1.0);
    let (l, b) = (x[0] <= 1.0, x[1] <= 1.0);
    if r && t {
        [1.5, 0.0, 0.0, 1.5]
    } else if l && t {
        [0.5323, 1.206, 0.0, 0.3]
    } else if l && b {
        [0.138, 1.206, 1.206, 0.029]
    } else {
        [0.5323, 0.0, 1.206, 0.3]
    }
}

#[allow(clippy::too_many_arguments)]
fn scalar(
    name: &str,
    model: ScalarModel,
    domain: ScalarDomain,
    initial: InitialFn<1>,
    exact: Option<ExactFn<1>>,
    far: FarField<1>,
    t_end: f64,
    geometry: Geometry,
) -> Problem {
    Problem::Scalar(ProblemDef {
        name: name.into(),
        model,
        domain,
        initial,
        exact,
        bc: BoundarySpec::uniform(BcKind::FarField(far.clone())),
        far_field: far,
        t_end,
        geometry,
    })
}

/// Looks up a built-in problem. `gamma` only affects the Euler examples.
pub fn builtin(id: &str, gamma: f64) -> Result<Problem> {
    let key = canonical(id).ok_or_else(|| Error::Config(format!("unknown problem `{id}`")))?;
    let s1 = |v: f64| State::<1>::new(v);
    let p = match key {
        "example1" => {
            let exact: ExactFn<1> = Arc::new(|x, t| State::<1>::new(transport_gaussian(x, t)));
            let e = exact.clone();
            scalar(
                key,
                ScalarModel::Linear(VelocityField::Constant([-1.0, -1.0])),
                ScalarDomain { min: -1e-9, max: 1.0 + 1e-9 },
                Arc::new(move |x| e(x, 0.0)),
                Some(exact.clone()),
                FarField::Function(Arc::new(move |x, t| exact(x, t))),
                10.0,
                rect([-20.0, 20.0], [-20.0, 20.0], 2.0),
            )
        }
        "example2" => scalar(
            key,
            ScalarModel::Linear(VelocityField::Rotation { center: [0.5, 0.5], omega: 2.0 * PI }),
            ScalarDomain { min: -1e-9, max: 1.0 + 1e-9 },
            Arc::new(move |x| s1(zalesak(x))),
            None,
            FarField::Constant(s1(0.0)),
            1.0,
            rect([0.0, 1.0], [0.0, 1.0], 0.0175),
        ),
        "example3" => scalar(
            key,
            ScalarModel::Kpp,
            ScalarDomain { min: -1.0, max: 100.0 },
            Arc::new(move |x| s1(kpp_initial(x))),
            None,
            FarField::Constant(s1(0.25 * PI)),
            1.0,
            rect([-2.0, 2.0], [-2.0, 2.0], 0.0465),
        ),
        "example4" => {
            let e = Euler::new(gamma);
            let m = e.clone();
            let q = e.clone();
            // Outer boundaries keep the initial quadrant states.
            let far = FarField::Function(Arc::new(move |x, _| {
                let s = quadrant_state(x);
                q.conserved(s[0], s[1], s[2], s[3])
            }));
            Problem::Euler(ProblemDef {
                name: key.into(),
                model: e,
                domain: EulerDomain::default(),
                initial: Arc::new(move |x| {
                    let s = quadrant_state(x);
                    m.conserved(s[0], s[1], s[2], s[3])
                }),
                exact: None,
                bc: BoundarySpec::uniform(BcKind::FarField(far.clone())),
                far_field: far,
                t_end: 1.0,
                geometry: rect([0.0, 1.2], [0.0, 1.2], 0.0155),
            })
        }
        "example5" => {
            let e = Euler::new(gamma);
            let pre = e.conserved(gamma, 0.0, 0.0, 1.0);
            let s = normal_shock(gamma, gamma, 1.0, 10.0);
            let post = e.conserved(s[0], s[1], 0.0, s[2]);
            let top = 3.0 * (PI / 6.0).tan();
            // Sides: 1 bottom before the ramp, 2 ramp, 3 right, 4 top, 5 left.
            let mut bc = BoundarySpec::uniform(BcKind::FarField(moving_shock(pre, post, -0.1, 10.0 * (gamma * 1.0 / gamma).sqrt())));
            bc.by_tag.insert(1, BcKind::Wall);
            bc.by_tag.insert(2, BcKind::Wall);
            bc.by_tag.insert(5, BcKind::FarField(FarField::Constant(post)));
            Problem::Euler(ProblemDef {
                name: key.into(),
                model: e,
                domain: EulerDomain::default(),
                initial: Arc::new(move |x| if x[0] <= -0.1 { post } else { pre }),
                exact: None,
                bc,
                far_field: FarField::Constant(post),
                t_end: 0.2,
                geometry: Geometry {
                    corners: vec![[-0.25, 0.0], [0.0, 0.0], [3.0, top], [3.0, 2.0], [-0.25, 2.0]],
                    h: 0.025,
                },
            })
        }
        "example6" => {
            let e = Euler::new(gamma);
            let pre = e.conserved(1.4, 0.0, 0.0, 1.0);
            let s = normal_shock(gamma, 1.4, 1.0, 2.4);
            let post = e.conserved(s[0], s[1], 0.0, s[2]);
            // Sides: 1 step top, 2 step face, 3 bottom, 4 right, 5 top, 6 inflow.
            let mut bc = BoundarySpec::uniform(BcKind::FarField(moving_shock(pre, post, -0.05, 2.4 * (gamma * 1.0 / 1.4_f64).sqrt())));
            bc.by_tag.insert(1, BcKind::Wall);
            bc.by_tag.insert(2, BcKind::Wall);
            bc.by_tag.insert(6, BcKind::FarField(FarField::Constant(post)));
            Problem::Euler(ProblemDef {
                name: key.into(),
                model: e,
                domain: EulerDomain::default(),
                initial: Arc::new(move |x| if x[0] <= -0.05 && x[1] >= 0.0 { post } else { pre }),
                exact: None,
                bc,
                far_field: FarField::Constant(post),
                t_end: 0.35,
                geometry: Geometry {
                    corners: vec![[-0.5, 0.0], [0.0, 0.0], [0.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-0.5, 1.0]],
                    h: 0.02,
                },
            })
        }
        _ => unreachable!(),
    };
    Ok(p)
}

/// Replaces the boundary conditions of tagged edges.
pub fn override_tags<const M: usize>(bc: &mut BoundarySpec<M>, tags: &BTreeMap<i32, BcKind<M>>) {
    for (t, k) in tags {
        bc.by_tag.insert(*t, k.clone());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_states() {
        let Problem::Scalar(p) = builtin("kpp", 1.4).unwrap() else { panic!() };
        assert_eq!((p.initial)([0.0, 0.5])[0], 3.5 * PI);
        assert_eq!((p.initial)([0.0, 1.5])[0], 3.5 * PI);
        assert_eq!((p.initial)([1.5, 1.5])[0], 0.25 * PI);
        let Problem::Euler(p) = builtin("example4", 1.4).unwrap() else { panic!() };
        let e = Euler::default();
        assert_eq!(e.primitive(&(p.initial)([1.1, 1.1])), [1.5, 0.0, 0.0, 1.5]);
        // Interface points go to the region listed first.
        assert_eq!(e.primitive(&(p.initial)([1.0, 1.0]))[0], 1.5);
        assert_eq!(e.primitive(&(p.initial)([0.5, 1.0]))[0], 0.5323);
        assert_eq!(e.primitive(&(p.initial)([1.0, 0.5]))[0], 0.138);
        assert_eq!(e.primitive(&(p.initial)([1.1, 0.5]))[1], 0.0);
        let Problem::Euler(p) = builtin("dmr", 1.4).unwrap() else { panic!() };
        let w = e.primitive(&(p.initial)([1.0, 1.0]));
        assert!((w[0] - 1.4).abs() < 1e-15 && (w[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shock_states() {
        let s = normal_shock(1.4, 1.4, 1.0, 10.0);
        assert!((s[0] - 8.0).abs() < 1e-12 && (s[1] - 8.25).abs() < 1e-12 && (s[2] - 116.5).abs() < 1e-10);
        // Rankine–Hugoniot in the shock frame for Mach 2.4.
        let g = 1.4;
        let s = normal_shock(g, 1.4, 1.0, 2.4);
        let ws = 2.4;
        let (r1, u1, p1) = (1.4, -ws, 1.0);
        let (r2, u2, p2) = (s[0], s[1] - ws, s[2]);
        assert!((r1 * u1 - r2 * u2).abs() < 1e-12);
        assert!((r1 * u1 * u1 + p1 - r2 * u2 * u2 - p2).abs() < 1e-12);
        let h = |r: f64, u: f64, p: f64| g / (g - 1.0) * p / r + 0.5 * u * u;
        assert!((h(r1, u1, p1) - h(r2, u2, p2)).abs() < 1e-12);
    }

    #[test]
    fn zalesak_bodies() {
        assert_eq!(zalesak([0.25, 0.5]), 0.5);
        assert_eq!(zalesak([0.5, 0.25]), 1.0);
        assert_eq!(zalesak([0.5, 0.7]), 0.0);
        assert_eq!(zalesak([0.45, 0.75]), 1.0);
        assert_eq!(zalesak([0.9, 0.9]), 0.0);
    }

    #[test]
    fn every_initial_state_is_admissible() {
        for (id, _) in CATALOG {
            match builtin(id, 1.4).unwrap() {
                Problem::Scalar(p) => {
                    for x in probe(&p.geometry) {
                        assert!(p.model.in_domain(&(p.initial)(x), &p.domain), "{id}");
                    }
                }
                Problem::Euler(p) => {
                    for x in probe(&p.geometry) {
                        assert!(p.model.in_domain(&(p.initial)(x), &p.domain), "{id}");
                    }
                }
            }
        }
    }

    fn probe(g: &Geometry) -> Vec<Point> {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for c in &g.corners {
            for d in 0..2 {
                lo[d] = lo[d].min(c[d]);
                hi[d] = hi[d].max(c[d]);
            }
        }
        let mut v = Vec::new();
        for i in 0..=40 {
            for j in 0..=40 {
                v.push([lo[0] + (hi[0] - lo[0]) * i as f64 / 40.0, lo[1] + (hi[1] - lo[1]) * j as f64 / 40.0]);
            }
        }
        v
    }
}
