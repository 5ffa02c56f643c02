//! Run configuration (TOML).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial_ho::EpsPolicy;
use crate::timeloop::{Mode, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Boundary tag → condition, overriding the problem's assignment.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub boundary: BTreeMap<String, BoundaryKind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    FarField,
    Outflow,
    Wall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CustomModel {
    Linear,
    Kpp,
    Euler,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// Built-in problem (`example1` … `example6`) or `custom`.
    pub id: String,
    /// Final time; defaults to the problem's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Custom problems: model kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<CustomModel>,
    /// Custom linear advection velocity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity: Option<[f64; 2]>,
    /// Custom uniform state: the scalar value, or (ρ, u, v, p).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<f64>>,
    /// Custom domain corners (counterclockwise).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Gmsh file; when absent a mesh of the problem domain is generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Uniform refinements applied after loading or generating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub mode: Mode,
    pub cfl: f64,
    pub gamma: f64,
    pub eps: EpsPolicy,
    pub c_kappa: [f64; 2],
    pub alpha_safety: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverConfig { mode: o.mode, cfl: o.cfl, gamma: 1.4, eps: o.eps, c_kappa: o.c_kappa, alpha_safety: o.alpha_safety }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { mode: self.mode, cfl: self.cfl, eps: self.eps, c_kappa: self.c_kappa, alpha_safety: self.alpha_safety }
    }
}

/// Overrides of the problem's invariant domain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Steps between VTK snapshots; 0 writes only the final state.
    pub every: usize,
    pub vtk: bool,
    pub journal: bool,
    pub diagnostics: bool,
    /// Print one progress line per this many steps (0: silent).
    pub log_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("output"), every: 0, vtk: true, journal: true, diagnostics: true, log_every: 10 }
    }
}

/// Environment variable overriding `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "PAMPA_OUTPUT_DIR";

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut c = Self::parse(&text)?;
        // Relative mesh paths are taken from the config's directory.
        if let (Some(p), Some(dir)) = (c.mesh.path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// A minimal configuration for a built-in problem.
    pub fn for_problem(id: &str) -> Self {
        RunConfig {
            problem: ProblemConfig { id: id.into(), t_end: None, model: None, velocity: None, state: None, corners: None },
            mesh: MeshConfig::default(),
            solver: SolverConfig::default(),
            domain: DomainConfig::default(),
            output: OutputConfig::default(),
            boundary: BTreeMap::new(),
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| self.output.dir.clone())
    }

    pub fn boundary_tags(&self) -> Result<BTreeMap<i32, BoundaryKind>> {
        self.boundary
            .iter()
            .map(|(k, v)| {
                k.trim().parse::<i32>().map(|t| (t, *v)).map_err(|_| Error::Config(format!("boundary tag `{k}` is not an integer")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let s = &self.solver;
        if !(s.cfl > 0.0 && s.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", s.cfl));
        }
        if !(s.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", s.gamma));
        }
        if !(s.alpha_safety >= 1.0) {
            return bad(format!("alpha_safety must be at least 1, got {}", s.alpha_safety));
        }
        if s.c_kappa.iter().any(|c| !(*c >= 0.0)) {
            return bad("c_kappa entries must be non-negative".into());
        }
        if let Some(t) = self.problem.t_end {
            if !(t >= 0.0) || !t.is_finite() {
                return bad(format!("t_end must be non-negative, got {t}"));
            }
        }
        let d = &self.domain;
        for (name, v) in [("rho_min", d.rho_min), ("p_min", d.p_min), ("upper", d.upper)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if let (Some(a), Some(b)) = (d.min, d.max) {
            if !(a < b) {
                return bad(format!("domain min {a} must be below max {b}"));
            }
        }
        let m = &self.mesh;
        if let Some(h) = m.h {
            if !(h > 0.0) {
                return bad(format!("mesh h must be positive, got {h}"));
            }
        }
        if let Some(j) = m.jitter {
            if !(0.0..0.5).contains(&j) {
                return bad(format!("mesh jitter must lie in [0, 0.5), got {j}"));
            }
        }
        self.boundary_tags()?;
        if self.problem.id == "custom" {
            let p = &self.problem;
            let Some(model) = p.model else { return bad("custom problems need `model`".into()) };
            let n = if model == CustomModel::Euler { 4 } else { 1 };
            if p.state.as_ref().map(|s| s.len()) != Some(n) {
                return bad(format!("custom {model:?} problems need a `state` with {n} entries"));
            }
            if model == CustomModel::Linear && p.velocity.is_none() {
                return bad("custom linear problems need `velocity`".into());
            }
            if p.corners.as_ref().is_none_or(|c| c.len() < 3) && m.path.is_none() {
                return bad("custom problems need `corners` or a mesh path".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[problem]
id = "example2"
t_end = 0.5

[mesh]
h = 0.05
seed = 3

[solver]
mode = "bp"
cfl = 0.15
eps = "zero"

[domain]
min = -0.1

[output]
dir = "out"
every = 10

[boundary]
3 = "wall"
"#;

    #[test]
    fn parse_and_round_trip() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.solver.mode, Mode::Bp);
        assert_eq!(c.solver.eps, EpsPolicy::Zero);
        assert_eq!(c.solver.gamma, 1.4);
        assert_eq!(c.output.every, 10);
        assert_eq!(c.boundary_tags().unwrap()[&3], BoundaryKind::Wall);
        let t1 = c.to_toml();
        let c2 = RunConfig::parse(&t1).unwrap();
        assert_eq!(c, c2);
        assert_eq!(t1, c2.to_toml());
    }

    #[test]
    fn rejects_invalid_values() {
        for bad in [
            SAMPLE.replace("cfl = 0.15", "cfl = 1.5"),
            SAMPLE.replace("t_end = 0.5", "t_end = -1.0"),
            SAMPLE.replace("[domain]", "[domain]\nrho_min = 0.0"),
            SAMPLE.replace("3 = \"wall\"", "north = \"wall\""),
            SAMPLE.replace("mode = \"bp\"", "mode = \"weno\""),
            SAMPLE.replace("seed = 3", "seed = 3\nsize = 2"),
        ] {
            assert!(matches!(RunConfig::parse(&bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn custom_needs_data() {
        let t = "[problem]\nid = \"custom\"\nmodel = \"euler\"\nstate = [1.0, 0.0, 0.0]\ncorners = [[0,0],[1,0],[0,1]]\n";
        assert!(RunConfig::parse(t).is_err());
        let t = t.replace("0.0, 0.0]", "0.0, 0.0, 1.0]").replace("[[0,0],[1,0],[0,1]]", "[[0.0,0.0],[1.0,0.0],[0.0,1.0]]");
        RunConfig::parse(&t).unwrap();
    }
}
