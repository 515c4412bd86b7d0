use std::path::Path;
use std::process::{Command, Output};

fn mixedforms(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixedforms")).current_dir(dir).args(args).output().unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn solve_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = mixedforms(dir.path(), &["solve", "--case", "plate", "--refine", "0", "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let echo = String::from_utf8_lossy(&o.stdout);
        assert!(echo.contains("case = plate") && echo.contains("# assumption:"));
    }
    let a = dir.path().join("a");
    for file in ["metrics.csv", "report.csv", "config.txt", "solution.vtk"] {
        assert_eq!(read(a.join(file)), read(dir.path().join("b").join(file)), "{file}");
    }
    let metrics = read(a.join("metrics.csv"));
    let mut lines = metrics.lines();
    assert!(lines.next().unwrap().starts_with("refinement,dofs,triangles,probe_ux,probe_uy"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "0");
    // Displacement-controlled: the probe sits on the pulled face.
    assert!((row[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    let vtk = read(a.join("solution.vtk"));
    assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
    for section in ["DATASET UNSTRUCTURED_GRID", "CELL_TYPES 16", "VECTORS displacement", "SCALARS J"] {
        assert!(vtk.contains(section), "{section}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# coarse Cook run\ncase = cook\nrefine = 0\nsteps = 4\n").unwrap();
    let o = mixedforms(dir.path(), &["solve", "--config", "run.cfg", "--load", "8", "--out", "out"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let config = read(dir.path().join("out/config.txt"));
    for line in ["case = cook", "steps = 4", "load = 8"] {
        assert!(config.lines().any(|l| l == line), "{line} missing from\n{config}");
    }
    let report = read(dir.path().join("out/report.csv"));
    let last_step = report.lines().last().unwrap().split(',').next().unwrap();
    assert_eq!(last_step, "4");
}

#[test]
fn generated_mesh_round_trips_through_file_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = mixedforms(dir.path(), &["mesh", "--case", "cook", "--refine", "0", "--output", "cook.m2d"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(dir.path().join("cook.m2d")).starts_with("m2d 1\n"));
    // Cook markers: 1 = clamped edge, 2 = loaded edge.
    std::fs::write(dir.path().join("cook.bc"), "dirichlet 1 ux 0\ndirichlet 1 uy 0\nneumann 2 0 32\n").unwrap();
    let from_file = mixedforms(
        dir.path(),
        &["solve", "--case", "file", "--mesh", "cook.m2d", "--bc", "cook.bc", "--out", "file"],
    );
    assert!(from_file.status.success(), "{}", String::from_utf8_lossy(&from_file.stderr));
    let builtin = mixedforms(dir.path(), &["solve", "--case", "cook", "--refine", "0", "--out", "builtin"]);
    assert!(builtin.status.success());
    let energy = |dir: &str| -> f64 {
        let m = read(Path::new(dir).join("metrics.csv"));
        m.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap()
    };
    let (a, b) = (energy(dir.path().join("file").to_str().unwrap()), energy(dir.path().join("builtin").to_str().unwrap()));
    assert!((a - b).abs() <= 1e-8 * b.abs(), "{a} vs {b}");
}

#[test]
fn convergence_writes_study_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = mixedforms(dir.path(), &["convergence", "--case", "block", "--levels", "0,1", "--out", "study"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let study = dir.path().join("study");
    assert!(study.join("level0/solution.vtk").exists() && study.join("level1/metrics.csv").exists());
    let table = read(study.join("convergence.csv"));
    assert!(table.lines().next().unwrap().contains("rel_err_piola_norm_integral"));
    assert!(table.lines().last().unwrap().starts_with("extrapolated,"));
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = mixedforms(dir.path(), &["solve", "--case", "nope"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = mixedforms(dir.path(), &["solve", "--case", "file", "--mesh", "missing.m2d", "--bc", "missing.bc"]);
    assert!(!o.status.success());
    let o = mixedforms(dir.path(), &["solve", "--set", "refine"]);
    assert!(!o.status.success());
}
