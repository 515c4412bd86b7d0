use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixedforms::benchmark::{
    convergence_study, run_benchmark, write_outputs, BenchmarkConfig, Metrics,
};
use mixedforms::mesh::write_m2d;
use mixedforms::{Error, Result};

/// Mixed FEEC solver for planar neo-Hookean elasticity.
#[derive(Parser)]
#[command(name = "mixedforms", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one benchmark and write metrics.csv, report.csv, solution.vtk and config.txt.
    Solve(Settings),
    /// Solve on several refinement levels and write convergence tables.
    Convergence {
        #[command(flatten)]
        settings: Settings,
        /// Refinement levels: `0..4` (inclusive), `1..=3` or `0,2,3`.
        #[arg(long, default_value = "0..3")]
        levels: String,
    },
    /// Write the generated mesh of a case as .m2d.
    Mesh {
        #[command(flatten)]
        settings: Settings,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct Settings {
    /// key = value file (case, refine, mu, kappa, load, steps, tol, out, ...).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Traction (cook, block), face displacement (plate) or scale of the .bc data (file).
    #[arg(long)]
    load: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    bc: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any other config key, e.g. `--set base=4`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    extra: Vec<String>,
}

impl Settings {
    fn resolve(&self) -> Result<BenchmarkConfig> {
        let mut text = match &self.config {
            Some(path) => fs::read_to_string(path)?,
            None => String::new(),
        };
        // The last `case` wins and the case defaults are applied before any other key.
        if let Some(c) = &self.case {
            text.push_str(&format!("\ncase = {c}\n"));
        }
        let mut cfg = BenchmarkConfig::from_key_values(&text)?;
        let mut set = |k: &str, v: Option<String>| match v {
            Some(v) => cfg.set(k, &v),
            None => Ok(()),
        };
        set("refine", self.refine.map(|v| v.to_string()))?;
        set("mu", self.mu.map(|v| v.to_string()))?;
        set("kappa", self.kappa.map(|v| v.to_string()))?;
        set("load", self.load.map(|v| v.to_string()))?;
        set("steps", self.steps.map(|v| v.to_string()))?;
        set("tol", self.tol.map(|v| v.to_string()))?;
        set("mesh", self.mesh.as_ref().map(|p| p.display().to_string()))?;
        set("bc", self.bc.as_ref().map(|p| p.display().to_string()))?;
        set("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        for kv in &self.extra {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_levels(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("invalid level list '{text}'"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let levels: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        (num(a)?..=num(b)?).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("a convergence study needs at least two levels".into()));
    }
    Ok(levels)
}

fn out_dir(cfg: &BenchmarkConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(format!("out-{}", cfg.case)))
}

fn print_metrics(m: &Metrics, seconds: f64) {
    eprintln!(
        "level {}: {} dofs, probe ({:.6}, {:.6}), int|theta|^2 {:.9e}, int|P| {:.9e}, J in [{:.4}, {:.4}], {} Newton iterations, {:.1} s",
        m.refinement, m.dofs, m.probe[0], m.probe[1], m.theta_sq, m.piola_norm, m.min_j, m.max_j, m.newton_iterations, seconds
    );
}

fn solve_cmd(settings: &Settings) -> Result<()> {
    let cfg = settings.resolve()?;
    print!("{}", cfg.echo());
    let dir = out_dir(&cfg);
    let start = std::time::Instant::now();
    let run = run_benchmark(&cfg)?;
    print_metrics(&run.metrics, start.elapsed().as_secs_f64());
    write_outputs(&cfg, &run, &dir)?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn convergence_cmd(settings: &Settings, levels: &str) -> Result<()> {
    let cfg = settings.resolve()?;
    let levels = parse_levels(levels)?;
    print!("{}", cfg.echo());
    let dir = out_dir(&cfg);
    fs::create_dir_all(&dir)?;
    let study = convergence_study(&cfg, levels, |run, secs| {
        print_metrics(&run.metrics, secs);
        let level_cfg = BenchmarkConfig { refinement: run.metrics.refinement, ..cfg.clone() };
        write_outputs(&level_cfg, run, dir.join(format!("level{}", run.metrics.refinement)))
    })?;
    let mut metrics = String::from(Metrics::CSV_HEADER);
    metrics.push('\n');
    for row in &study.rows {
        metrics.push_str(&row.csv_row());
        metrics.push('\n');
    }
    fs::write(dir.join("metrics.csv"), metrics)?;
    fs::write(dir.join("convergence.csv"), study.to_csv())?;
    fs::write(dir.join("config.txt"), cfg.echo())?;
    for q in &study.quantities {
        let errors: Vec<String> = q.relative_errors.iter().map(|e| format!("{e:.3e}")).collect();
        eprintln!(
            "{}: reference {:.9e}{}, relative errors [{}]",
            q.name,
            q.reference,
            q.order.map_or(String::new(), |p| format!(" (order {p:.2})")),
            errors.join(", ")
        );
    }
    eprintln!("wrote {}", dir.display());
    Ok(())
}

fn mesh_cmd(settings: &Settings, output: &Path) -> Result<()> {
    let cfg = settings.resolve()?;
    let mesh = cfg.generate_mesh()?;
    write_m2d(&mesh, output)?;
    eprintln!(
        "wrote {} ({} vertices, {} triangles)",
        output.display(),
        mesh.num_vertices(),
        mesh.num_triangles()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(s) => solve_cmd(s),
        Command::Convergence { settings, levels } => convergence_cmd(settings, levels),
        Command::Mesh { settings, output } => mesh_cmd(settings, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("0..4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_levels("1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_levels("0, 2,3").unwrap(), vec![0, 2, 3]);
        assert!(parse_levels("3").is_err());
        assert!(parse_levels("a..b").is_err());
    }
}
