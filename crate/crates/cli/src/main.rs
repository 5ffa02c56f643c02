use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use pampa::io::{self, problems, RunConfig};
use pampa::mesh::{load_gmsh, write_msh22};
use pampa::meshgen::{polygon, refine_times};
use pampa::{check_basis, Error, Mesh};

/// PAMPA solver for hyperbolic conservation laws on triangles.
#[derive(Parser)]
#[command(name = "pampa", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the problem described by a TOML configuration.
    Run {
        config: PathBuf,
        /// Override the final time.
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Measure errors and observed orders on a sequence of meshes.
    Convergence {
        config: PathBuf,
        /// Comma-separated Gmsh files, coarse to fine.
        #[arg(long, value_delimiter = ',', conflicts_with = "levels")]
        meshes: Vec<PathBuf>,
        /// Instead of files: the configured mesh and this many nested refinements.
        #[arg(long)]
        levels: Option<usize>,
        /// Where to write the CSV table (default: <output dir>/convergence.csv).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the local basis identities on random triangles.
    ValidateBasis {
        #[arg(long, default_value_t = 20)]
        triangles: usize,
    },
    /// Print mesh statistics.
    Info { mesh: PathBuf },
    /// List the built-in problems.
    Problems,
    /// Generate a mesh of a built-in problem's domain.
    GenMesh {
        /// Built-in problem whose domain is meshed.
        #[arg(long)]
        problem: String,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        jitter: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        refine: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    RunConfig::load(path).with_context(|| format!("reading {}", path.display()))
}

fn execute(cmd: Cmd) -> anyhow::Result<u8> {
    match cmd {
        Cmd::Run { config, t_end } => {
            let mut cfg = load_config(&config)?;
            if t_end.is_some() {
                cfg.problem.t_end = t_end;
                cfg.validate()?;
            }
            let s = io::run(&cfg)?;
            print!("{}", s.describe());
            println!("output        {}", cfg.output_dir().display());
            Ok(0)
        }
        Cmd::Convergence { config, meshes, levels, csv } => {
            let cfg = load_config(&config)?;
            let meshes: Vec<Mesh> = match levels {
                Some(n) => {
                    let p = io::resolve_problem(&cfg)?;
                    let base = io::build_mesh(&cfg, p.geometry())?;
                    (0..=n).map(|k| refine_times(&base, k)).collect::<pampa::Result<_>>()?
                }
                None => meshes
                    .iter()
                    .map(|m| load_gmsh(m).with_context(|| format!("reading {}", m.display())))
                    .collect::<anyhow::Result<_>>()?,
            };
            let table = io::convergence(&cfg, meshes)?;
            let text = table.to_csv();
            print!("{text}");
            let path = csv.unwrap_or_else(|| cfg.output_dir().join("convergence.csv"));
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, text)?;
            Ok(0)
        }
        Cmd::ValidateBasis { triangles } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
            let mut worst = [0.0f64; 3];
            let mut done = 0;
            while done < triangles {
                let x: [[f64; 2]; 3] = std::array::from_fn(|_| [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]);
                let a = 0.5 * ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[1][1] - x[0][1]) * (x[2][0] - x[0][0]));
                if a.abs() < 0.5 {
                    continue;
                }
                let c = check_basis(&x)?;
                worst[0] = worst[0].max(c.projection);
                worst[1] = worst[1].max(c.duality);
                worst[2] = worst[2].max(c.average_weights);
                done += 1;
            }
            let ok = worst.iter().all(|&w| w <= 1e-12);
            println!("projection  max |P M/|K| - I|       = {:.3e}", worst[0]);
            println!("duality     max |<theta_i, phi_j> - d| = {:.3e}", worst[1]);
            println!("averages    max weight residual      = {:.3e}", worst[2]);
            println!("{}", if ok { "basis OK" } else { "basis check FAILED" });
            Ok(if ok { 0 } else { 3 })
        }
        Cmd::Info { mesh } => {
            let m = load_gmsh(&mesh).with_context(|| format!("reading {}", mesh.display()))?;
            let geo = m.geometry()?;
            let min_h = geo.iter().flat_map(|g| g.height).fold(f64::INFINITY, f64::min);
            println!("vertices        {}", m.n_vertices());
            println!("triangles       {}", m.n_triangles());
            println!("edges           {} ({} on the boundary)", m.n_edges(), m.n_boundary_edges());
            println!("point DoFs      {}", m.n_vertices() + m.n_edges());
            println!("area            {:.10e}", m.area());
            println!("h (longest)     {:.6e}", m.h_max());
            println!("smallest height {:.6e}", min_h);
            println!("reoriented      {}", m.reoriented);
            for (tag, edges) in m.boundary_groups() {
                println!("boundary tag {tag:>3}: {} edges", edges.len());
            }
            Ok(0)
        }
        Cmd::Problems => {
            for (id, what) in problems::CATALOG {
                println!("{id:<10} {what}");
            }
            Ok(0)
        }
        Cmd::GenMesh { problem, h, jitter, seed, refine, output } => {
            let p = problems::builtin(&problem, 1.4)?;
            let g = p.geometry();
            let m = refine_times(&polygon(&g.corners, h.unwrap_or(g.h), jitter, seed)?, refine)?;
            write_msh22(&m, &output)?;
            println!("wrote {} ({} triangles)", output.display(), m.n_triangles());
            Ok(0)
        }
    }
}
