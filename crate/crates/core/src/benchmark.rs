//! Benchmark setups (Cook's membrane, block compression, plate with a hole,
//! or a user mesh), their metrics and refinement studies.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::assembly::{compatibility_residual, field_integrals, BoundaryConditions, DofLayout, MixedState};
use crate::bcfile::BcFile;
use crate::error::{Error, Result};
use crate::material::NeoHookeanParams;
use crate::mesh::read_m2d;
use crate::mesh::{
    generate_block, generate_cook, generate_plate_with_hole, markers, BlockGeometry, CookGeometry,
    PlateGeometry, Point, SimplicialMesh2D,
};
use crate::quadrature::quadrature;
use crate::solver::{solve, LineSearch, Problem, SolveReport, SolverConfig};
use crate::vtk::write_vtk;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Cook,
    Block,
    Plate,
    File,
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cook" => Ok(Case::Cook),
            "block" => Ok(Case::Block),
            "plate" => Ok(Case::Plate),
            "file" => Ok(Case::File),
            _ => Err(Error::InvalidArgument(format!(
                "unknown case '{s}' (expected cook, block, plate or file)"
            ))),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Cook => "cook",
            Case::Block => "block",
            Case::Plate => "plate",
            Case::File => "file",
        })
    }
}

/// Everything needed to run one benchmark.
///
/// `load` is the traction on the loaded edge for `cook` (shear, +y) and
/// `block` (pressure, −y), and the displacement of the pulled face for
/// `plate`. For `file` the boundary data come from the `.bc` file and `load`
/// scales them. Units follow the geometry: mm and N/mm² for cook and block, cm
/// for the plate.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub case: Case,
    pub refinement: usize,
    pub mu: f64,
    pub kappa: f64,
    pub load: f64,
    pub solver: SolverConfig,
    pub cook: CookGeometry,
    pub block: BlockGeometry,
    pub plate: PlateGeometry,
    pub mesh: Option<PathBuf>,
    pub bc: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub const COOK_MU: f64 = 80.194;
pub const COOK_KAPPA: f64 = 400889.8;

impl BenchmarkConfig {
    pub fn new(case: Case) -> Self {
        let (mu, kappa, load, steps) = match case {
            Case::Cook => (COOK_MU, COOK_KAPPA, 32.0, 8),
            Case::Block => (COOK_MU, COOK_KAPPA, 160.0, 8),
            Case::Plate => (10.0, 1000.0, 1.0, 10),
            Case::File => (COOK_MU, COOK_KAPPA, 1.0, 8),
        };
        Self {
            case,
            refinement: 0,
            mu,
            kappa,
            load,
            solver: SolverConfig { load_steps: steps, ..Default::default() },
            cook: CookGeometry::default(),
            block: BlockGeometry::default(),
            plate: PlateGeometry::default(),
            mesh: None,
            bc: None,
            out: None,
        }
    }

    /// Parses flat `key = value` text. The (last) `case` is applied first so
    /// that its defaults can be overridden by the remaining keys in any order.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let pairs = parse_key_values(text)?;
        let case = pairs
            .iter()
            .rev()
            .find(|(k, _, _)| k == "case")
            .map(|(_, v, _)| v.parse())
            .transpose()?
            .unwrap_or(Case::Cook);
        let mut cfg = Self::new(case);
        for (k, v, line) in &pairs {
            if k != "case" {
                cfg.set(k, v).map_err(|e| Error::Parse { line: *line, message: e.to_string() })?;
            }
        }
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_key_values(&fs::read_to_string(path)?)
    }

    /// Sets one key. Setting `case` resets everything to that case's defaults.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("invalid value '{value}' for '{key}'")))
        }
        let value = value.trim();
        match key {
            "case" => *self = Self::new(value.parse()?),
            "refine" => self.refinement = num(key, value)?,
            "mu" => self.mu = num(key, value)?,
            "kappa" => self.kappa = num(key, value)?,
            "load" => self.load = num(key, value)?,
            "steps" => self.solver.load_steps = num(key, value)?,
            "tol" => self.solver.tol = num(key, value)?,
            "max_iter" => self.solver.max_newton_iters = num(key, value)?,
            "cutbacks" => self.solver.max_cutbacks = num(key, value)?,
            "quadrature" => self.solver.quadrature_degree = num(key, value)?,
            "line_search" => {
                self.solver.line_search = match value {
                    "residual" => LineSearch::Residual,
                    "monotonicity" => LineSearch::Monotonicity,
                    _ => return Err(Error::InvalidArgument(format!("unknown line search '{value}'"))),
                }
            }
            "base" => {
                let n = num(key, value)?;
                self.cook.base_divisions = n;
                self.block.base_divisions = n;
                self.plate.base_divisions = n;
            }
            "cook_width" => self.cook.width = num(key, value)?,
            "cook_left_height" => self.cook.left_height = num(key, value)?,
            "cook_right_height" => self.cook.right_height = num(key, value)?,
            "cook_right_bottom" => self.cook.right_bottom = num(key, value)?,
            "block_half_width" => self.block.half_width = num(key, value)?,
            "block_height" => self.block.height = num(key, value)?,
            "block_loaded_half_width" => self.block.loaded_half_width = num(key, value)?,
            "plate_half_side" => self.plate.half_side = num(key, value)?,
            "plate_hole_radius" => self.plate.hole_radius = num(key, value)?,
            "mesh" => self.mesh = Some(PathBuf::from(value)),
            "bc" => self.bc = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(Error::InvalidArgument(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        NeoHookeanParams::new(self.mu, self.kappa)?;
        self.solver.validate()?;
        if !self.load.is_finite() {
            return Err(Error::InvalidArgument("load must be finite".into()));
        }
        if self.case == Case::File && (self.mesh.is_none() || self.bc.is_none()) {
            return Err(Error::InvalidArgument("case 'file' needs both 'mesh' and 'bc'".into()));
        }
        Ok(())
    }

    pub fn probe_point(&self) -> Option<Point> {
        match self.case {
            Case::Cook => Some(self.cook.probe()),
            Case::Block => Some(self.block.probe()),
            Case::Plate => Some(self.plate.probe()),
            Case::File => None,
        }
    }

    pub fn generate_mesh(&self) -> Result<SimplicialMesh2D> {
        Ok(match self.case {
            Case::Cook => generate_cook(&self.cook, self.refinement),
            Case::Block => generate_block(&self.block, self.refinement),
            Case::Plate => generate_plate_with_hole(&self.plate, self.refinement),
            Case::File => {
                let mut mesh = read_m2d(self.mesh.as_ref().expect("validated"))?;
                for _ in 0..self.refinement {
                    mesh = mesh.refine_uniform()?;
                }
                mesh
            }
        })
    }

    /// Modelling choices that the benchmark descriptions leave open.
    pub fn assumptions(&self) -> Vec<String> {
        let mut a = Vec::new();
        match self.case {
            Case::Cook => {
                let g = &self.cook;
                a.push(format!(
                    "cook: trapezoid (0,0)-({w},{rb})-({w},{rt})-(0,{lh}) mm, clamped on x=0, uniform shear traction {l} N/mm^2 on x={w}",
                    w = g.width,
                    rb = g.right_bottom,
                    rt = g.right_bottom + g.right_height,
                    lh = g.left_height,
                    l = self.load
                ));
                let p = g.probe();
                a.push(format!("probe P = top corner of the loaded edge ({}, {})", p[0], p[1]));
            }
            Case::Block => {
                let g = &self.block;
                a.push(format!(
                    "block: symmetric half {}x{} mm; bottom uy=0, symmetry line ux=0, whole top face ux=0",
                    g.half_width, g.height
                ));
                a.push(format!(
                    "block: pressure {} N/mm^2 on the top face for 0 <= x <= {}",
                    self.load, g.loaded_half_width
                ));
                let p = g.probe();
                a.push(format!("probe A = centre of the loaded face ({}, {})", p[0], p[1]));
            }
            Case::Plate => {
                let g = &self.plate;
                a.push(format!(
                    "plate: quarter model [0,{s}]^2 minus hole of radius {r} cm, polygonal hole boundary",
                    s = g.half_side,
                    r = g.hole_radius
                ));
                a.push(format!(
                    "plate: face x={} displaced by ux={} cm (uy free); symmetry ux=0 on x=0, uy=0 on y=0",
                    g.half_side, self.load
                ));
                a.push("plate: lambda=1000 taken as the bulk modulus kappa of the energy".into());
                let p = g.probe();
                a.push(format!("probe = corner of the pulled face on y=0 ({}, {})", p[0], p[1]));
            }
            Case::File => {
                a.push(format!("file: boundary data scaled by load = {}", self.load));
            }
        }
        a.push(format!(
            "plane problem, unit thickness; load applied in {} equal increments (halved on failure)",
            self.solver.load_steps
        ));
        a
    }

    /// Key/value echo of the effective configuration with the assumptions as comments.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let s_ = &mut s;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s_, "{k} = {v}");
        };
        kv("case", self.case.to_string());
        kv("refine", self.refinement.to_string());
        kv("mu", self.mu.to_string());
        kv("kappa", self.kappa.to_string());
        kv("load", self.load.to_string());
        kv("steps", self.solver.load_steps.to_string());
        kv("tol", self.solver.tol.to_string());
        kv("max_iter", self.solver.max_newton_iters.to_string());
        kv("cutbacks", self.solver.max_cutbacks.to_string());
        kv("quadrature", self.solver.quadrature_degree.to_string());
        kv(
            "line_search",
            match self.solver.line_search {
                LineSearch::Residual => "residual",
                LineSearch::Monotonicity => "monotonicity",
            }
            .into(),
        );
        match self.case {
            Case::Cook => {
                kv("base", self.cook.base_divisions.to_string());
                kv("cook_width", self.cook.width.to_string());
                kv("cook_left_height", self.cook.left_height.to_string());
                kv("cook_right_height", self.cook.right_height.to_string());
                kv("cook_right_bottom", self.cook.right_bottom.to_string());
            }
            Case::Block => {
                kv("base", self.block.base_divisions.to_string());
                kv("block_half_width", self.block.half_width.to_string());
                kv("block_height", self.block.height.to_string());
                kv("block_loaded_half_width", self.block.loaded_half_width.to_string());
            }
            Case::Plate => {
                kv("base", self.plate.base_divisions.to_string());
                kv("plate_half_side", self.plate.half_side.to_string());
                kv("plate_hole_radius", self.plate.hole_radius.to_string());
            }
            Case::File => {}
        }
        if let Some(p) = &self.mesh {
            kv("mesh", p.display().to_string());
        }
        if let Some(p) = &self.bc {
            kv("bc", p.display().to_string());
        }
        for a in self.assumptions() {
            let _ = writeln!(s, "# assumption: {a}");
        }
        s
    }
}

/// `(key, value, line)` triples; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key = value, got '{line}'"),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string(), i + 1));
    }
    Ok(out)
}

/// Mesh, unknowns, material and boundary data of one benchmark instance.
#[derive(Debug, Clone)]
pub struct Setup {
    pub mesh: SimplicialMesh2D,
    pub layout: DofLayout,
    pub params: NeoHookeanParams,
    pub bcs: BoundaryConditions,
    pub probe: Option<usize>,
}

impl Setup {
    pub fn new(config: &BenchmarkConfig) -> Result<Self> {
        config.validate()?;
        Self::with_mesh(config, config.generate_mesh()?)
    }

    /// Boundary data are attached by marker, so any relabelling of a generated
    /// mesh yields the same problem.
    pub fn with_mesh(config: &BenchmarkConfig, mesh: SimplicialMesh2D) -> Result<Self> {
        let layout = DofLayout::new(&mesh);
        let params = NeoHookeanParams::new(config.mu, config.kappa)?;
        let mut bcs = BoundaryConditions::default();
        let load = config.load;
        match config.case {
            Case::Cook => {
                bcs.prescribe_marker(&mesh, &layout, markers::COOK_CLAMPED, &[0, 1], |_| 0.0);
                bcs.add_traction(&mesh, markers::COOK_LOADED, [0.0, load]);
            }
            Case::Block => {
                bcs.prescribe_marker(&mesh, &layout, markers::BLOCK_BOTTOM, &[1], |_| 0.0);
                bcs.prescribe_marker(&mesh, &layout, markers::BLOCK_SYMMETRY, &[0], |_| 0.0);
                bcs.prescribe_marker(&mesh, &layout, markers::BLOCK_LOADED, &[0], |_| 0.0);
                bcs.prescribe_marker(&mesh, &layout, markers::BLOCK_TOP_FREE, &[0], |_| 0.0);
                bcs.add_traction(&mesh, markers::BLOCK_LOADED, [0.0, -load]);
            }
            Case::Plate => {
                bcs.prescribe_marker(&mesh, &layout, markers::PLATE_LEFT, &[0], |_| 0.0);
                bcs.prescribe_marker(&mesh, &layout, markers::PLATE_BOTTOM, &[1], |_| 0.0);
                bcs.prescribe_marker(&mesh, &layout, markers::PLATE_RIGHT, &[0], |_| load);
            }
            Case::File => {
                let file = BcFile::read(config.bc.as_ref().expect("validated"))?;
                bcs = file.apply(&mesh, &layout)?;
                for d in &mut bcs.dirichlet {
                    d.displacement *= load;
                }
                for n in &mut bcs.neumann {
                    n.traction = n.traction.map(|t| t * load);
                }
            }
        }
        let probe = match config.probe_point() {
            Some(p) => Some(find_vertex(&mesh, p).ok_or_else(|| {
                Error::InvalidMesh(format!("no vertex at probe point ({}, {})", p[0], p[1]))
            })?),
            None => None,
        };
        Ok(Self { mesh, layout, params, bcs, probe })
    }

    pub fn problem(&self) -> Problem<'_> {
        Problem {
            mesh: &self.mesh,
            layout: &self.layout,
            params: &self.params,
            bcs: &self.bcs,
        }
    }
}

fn find_vertex(mesh: &SimplicialMesh2D, p: Point) -> Option<usize> {
    let scale = mesh
        .vertices()
        .iter()
        .fold(1.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs()));
    mesh.vertices()
        .iter()
        .position(|v| (v[0] - p[0]).abs() <= 1e-9 * scale && (v[1] - p[1]).abs() <= 1e-9 * scale)
}

/// Scalar outputs of one solved benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub refinement: usize,
    pub dofs: usize,
    pub triangles: usize,
    /// Probe displacement (NaN when the case has no probe).
    pub probe: [f64; 2],
    /// `∫ |θ¹|² + |θ²|² dA`.
    pub theta_sq: f64,
    /// `∫ ‖P‖_F dA`.
    pub piola_norm: f64,
    /// Largest elementwise `‖θⁱ − dφⁱ‖_{L²}` or `|dθⁱ|`.
    pub max_compat: f64,
    pub min_j: f64,
    pub max_j: f64,
    pub newton_iterations: usize,
    pub energy: f64,
}

impl Metrics {
    pub const CSV_HEADER: &'static str = "refinement,dofs,triangles,probe_ux,probe_uy,theta_sq_integral,piola_norm_integral,max_compat_residual,min_j,max_j,newton_iterations,energy";

    pub fn compute(setup: &Setup, state: &MixedState, report: &SolveReport, refinement: usize, quadrature_degree: usize) -> Result<Self> {
        let quad = quadrature(quadrature_degree)?;
        let (mesh, layout) = (&setup.mesh, &setup.layout);
        let fields = field_integrals(mesh, layout, state, &quad)?;
        let max_compat = compatibility_residual(mesh, layout, state, &quad)?
            .iter()
            .map(|c| c.max_component())
            .fold(0.0, f64::max);
        Ok(Self {
            refinement,
            dofs: layout.len(),
            triangles: mesh.num_triangles(),
            probe: setup
                .probe
                .map_or([f64::NAN; 2], |v| state.displacement(mesh, layout, v)),
            theta_sq: fields.theta_sq,
            piola_norm: fields.piola_norm,
            max_compat,
            min_j: fields.min_j,
            max_j: fields.max_j,
            newton_iterations: report.total_iterations(),
            energy: report.steps.last().map_or(0.0, |s| s.energy),
        })
    }

    pub fn probe_magnitude(&self) -> f64 {
        self.probe[0].hypot(self.probe[1])
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{},{:.15e}",
            self.refinement,
            self.dofs,
            self.triangles,
            self.probe[0],
            self.probe[1],
            self.theta_sq,
            self.piola_norm,
            self.max_compat,
            self.min_j,
            self.max_j,
            self.newton_iterations,
            self.energy
        )
    }

    /// `(name, value)` pairs used when comparing runs.
    pub fn named_values(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("probe_ux", self.probe[0]),
            ("probe_uy", self.probe[1]),
            ("theta_sq_integral", self.theta_sq),
            ("piola_norm_integral", self.piola_norm),
            ("max_compat_residual", self.max_compat),
            ("min_j", self.min_j),
            ("max_j", self.max_j),
            ("energy", self.energy),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub setup: Setup,
    pub state: MixedState,
    pub report: SolveReport,
    pub metrics: Metrics,
}

pub fn run_setup(config: &BenchmarkConfig, setup: Setup) -> Result<BenchmarkRun> {
    let initial = MixedState::identity(&setup.mesh, &setup.layout);
    let (state, report) = solve(&setup.problem(), &config.solver, initial)?;
    let metrics = Metrics::compute(&setup, &state, &report, config.refinement, config.solver.quadrature_degree)?;
    Ok(BenchmarkRun { setup, state, report, metrics })
}

pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkRun> {
    run_setup(config, Setup::new(config)?)
}

/// Writes `metrics.csv`, `report.csv`, `solution.vtk` and `config.txt` into `dir`.
pub fn write_outputs(config: &BenchmarkConfig, run: &BenchmarkRun, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("metrics.csv"),
        format!("{}\n{}\n", Metrics::CSV_HEADER, run.metrics.csv_row()),
    )?;
    fs::write(dir.join("report.csv"), run.report.to_csv())?;
    fs::write(dir.join("config.txt"), config.echo())?;
    let quad = quadrature(config.solver.quadrature_degree)?;
    write_vtk(&run.setup.mesh, &run.setup.layout, &run.state, &quad, dir.join("solution.vtk"))
}

/// One tracked quantity across refinement levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedQuantity {
    pub name: &'static str,
    pub values: Vec<f64>,
    /// Richardson extrapolation from the three finest levels when their
    /// differences shrink monotonically, otherwise the finest value.
    pub reference: f64,
    /// Observed order in the mesh-halving ratio, when extrapolated.
    pub order: Option<f64>,
    /// `|value − reference| / |reference|` per level.
    pub relative_errors: Vec<f64>,
}

impl ConvergedQuantity {
    pub fn new(name: &'static str, values: Vec<f64>) -> Self {
        let (reference, order) = richardson(&values);
        let relative_errors = values
            .iter()
            .map(|v| (v - reference).abs() / reference.abs().max(f64::MIN_POSITIVE))
            .collect();
        Self { name, values, reference, order, relative_errors }
    }

    /// `|q_{k+1} − q_k| / |q_{k+1}|` for consecutive levels.
    pub fn successive_changes(&self) -> Vec<f64> {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / w[1].abs().max(f64::MIN_POSITIVE))
            .collect()
    }
}

/// Extrapolated limit and order from the last three entries of a sequence on
/// uniformly halved meshes.
pub fn richardson(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    let finest = values.last().copied().unwrap_or(f64::NAN);
    if n < 3 {
        return (finest, None);
    }
    let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
    let (d1, d2) = (b - a, c - b);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() || d2.abs() >= d1.abs() {
        return (finest, None);
    }
    let ratio = d1 / d2;
    let p = ratio.log2();
    (c + d2 / (ratio - 1.0), Some(p))
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<Metrics>,
    pub quantities: Vec<ConvergedQuantity>,
    pub wall_seconds: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn quantity(&self, name: &str) -> Option<&ConvergedQuantity> {
        self.quantities.iter().find(|q| q.name == name)
    }

    /// Metric rows followed by per-quantity relative errors, then a final
    /// `extrapolated` row holding the reference values.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Metrics::CSV_HEADER);
        for q in &self.quantities {
            let _ = write!(s, ",rel_err_{}", q.name);
        }
        s.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            s.push_str(&row.csv_row());
            for q in &self.quantities {
                let _ = write!(s, ",{:.15e}", q.relative_errors[i]);
            }
            s.push('\n');
        }
        let reference = |name: &str| {
            self.quantity(name)
                .map_or(String::new(), |q| format!("{:.15e}", q.reference))
        };
        let _ = write!(
            s,
            "extrapolated,,,{},{},{},{},,,,,",
            reference("probe_ux"),
            reference("probe_uy"),
            reference("theta_sq_integral"),
            reference("piola_norm_integral"),
        );
        for _ in &self.quantities {
            s.push(',');
        }
        s.push('\n');
        s
    }
}

/// Runs `config` at each refinement in `levels` (at least two); `on_level`
/// sees every finished run and its wall time.
pub fn convergence_study(
    config: &BenchmarkConfig,
    levels: impl IntoIterator<Item = usize>,
    mut on_level: impl FnMut(&BenchmarkRun, f64) -> Result<()>,
) -> Result<ConvergenceStudy> {
    let levels: Vec<usize> = levels.into_iter().collect();
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("a convergence study needs at least two levels".into()));
    }
    let mut rows = Vec::new();
    let mut wall_seconds = Vec::new();
    for &level in &levels {
        let cfg = BenchmarkConfig { refinement: level, ..config.clone() };
        let start = std::time::Instant::now();
        let run = run_benchmark(&cfg)?;
        let secs = start.elapsed().as_secs_f64();
        on_level(&run, secs)?;
        rows.push(run.metrics);
        wall_seconds.push(secs);
    }
    let column = |f: fn(&Metrics) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let mut quantities = Vec::new();
    if config.probe_point().is_some() {
        quantities.push(ConvergedQuantity::new("probe_ux", column(|m| m.probe[0])));
        quantities.push(ConvergedQuantity::new("probe_uy", column(|m| m.probe[1])));
    }
    quantities.push(ConvergedQuantity::new("theta_sq_integral", column(|m| m.theta_sq)));
    quantities.push(ConvergedQuantity::new("piola_norm_integral", column(|m| m.piola_norm)));
    Ok(ConvergenceStudy { rows, quantities, wall_seconds })
}
