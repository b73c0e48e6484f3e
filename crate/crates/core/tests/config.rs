use std::fmt::Write as _;
use std::path::Path;

use nsf::config::RunConfig;
use nsf::data::FlowData;
use nsf::run::Prepared;
use nsf::*;

const BUNDLED: [&str; 3] = ["background_only.toml", "small_data.toml", "large_data.toml"];

fn bundled(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

#[test]
fn bundled_configs_load() {
    for name in BUNDLED {
        let p = Prepared::load(&bundled(name)).unwrap();
        assert_eq!(p.grid.describe().resolution, vec![32, 16], "{name}");
        assert_eq!(p.config.diagnostics.seed, 1729);
    }
}

#[test]
fn background_config_reproduces_background_data() {
    let p = Prepared::load(&bundled("background_only.toml")).unwrap();
    assert_eq!(p.setup.data, FlowData::background(&p.grid, p.setup.params.alpha));
}

#[test]
fn invalid_configs_are_config_errors() {
    let base = "[grid]\nresolution = [16, 8]\n";
    for extra in [
        "[iteration]\np = 2.5",
        "[params]\nmu = 0.0",
        "[data]\nf = \"ripple\"",
        "[domain]\nlength = -1.0",
        "[data]\nscale = 10.0\nrho_in = \"constant(value=-1)\"",
        "[unknown]\nx = 1",
    ] {
        let result = RunConfig::from_toml(&format!("{base}{extra}"), Path::new(".")).and_then(Prepared::new);
        assert!(matches!(result, Err(NsfError::Config(_))), "{extra}: {:?}", result.err());
    }
    assert!(matches!(RunConfig::load(Path::new("/nonexistent.toml")), Err(NsfError::Config(_))));
}

#[test]
fn csv_profiles_are_matched_to_grid_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_toml("[grid]\nresolution = [8, 4]\n", dir.path()).unwrap();
    let grid = cfg.build_grid().unwrap();
    let mut text = String::from("x1,x2,g\n");
    for n in grid.faces().filter(|f| f.patch() == Patch::Wall).flat_map(|f| grid.face_nodes(f).to_vec()) {
        let x = grid.coords(n);
        writeln!(text, "{},{},{}", x[0], x[1], 0.1 * x[0]).unwrap();
    }
    std::fs::write(dir.path().join("g.csv"), text).unwrap();
    let cfg = RunConfig::from_toml("[grid]\nresolution = [8, 4]\n[data]\ng = \"g.csv\"\n", dir.path()).unwrap();
    let data = cfg.flow_data(&grid).unwrap();
    let wall = Face::new(1, Side::High);
    for (v, &n) in data.heat_flux.face(wall).iter().zip(grid.face_nodes(wall)) {
        assert!((v - 0.1 * grid.coords(n)[0]).abs() < 1e-12);
    }

    std::fs::write(dir.path().join("bad.csv"), "0.1,0.0,1.0\n").unwrap();
    let cfg = RunConfig::from_toml("[grid]\nresolution = [8, 4]\n[data]\ng = \"bad.csv\"\n", dir.path()).unwrap();
    assert!(matches!(cfg.flow_data(&grid), Err(NsfError::Config(_))));
}

#[test]
fn with_resolution_changes_only_the_grid() {
    let cfg = RunConfig::load(&bundled("small_data.toml")).unwrap();
    let fine = cfg.with_resolution(vec![64, 32]);
    assert_eq!(fine.build_grid().unwrap().n_nodes(), 65 * 33);
    assert_eq!(fine.data, cfg.data);
}
