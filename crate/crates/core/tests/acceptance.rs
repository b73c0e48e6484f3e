//! One pass/fail line per acceptance criterion.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Instant;

use nsf::diagnostics::{residual_main_system, Calibration, SampleCounts, DEFAULT_SEED};
use nsf::elliptic::LameParams;
use nsf::manufactured::{
    channel_grid, fit_order, lame_case, linear_step_case, logistic_case, neumann_case, robin_case,
    trans_identity_case, transport_case,
};
use nsf::picard::{picard_iterate, uniqueness_probe, FlowState};
use nsf::run::Prepared;
use nsf::Result;

const RESOLUTIONS: [usize; 3] = [16, 32, 64];

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn prepared(name: &str) -> Result<Prepared> {
    Prepared::load(&bundled(name))
}

fn order(mut error: impl FnMut(&nsf::Grid) -> Result<f64>) -> Result<(f64, Vec<f64>)> {
    let (mut hs, mut errs) = (Vec::new(), Vec::new());
    for n in RESOLUTIONS {
        let g = channel_grid(n)?;
        hs.push(g.h(0));
        errs.push(error(&g)?);
    }
    Ok((fit_order(&hs, &errs), errs))
}

type Check = (bool, String);

fn background() -> Result<Check> {
    let p = prepared("background_only.toml")?;
    let out = picard_iterate(&p.setup, &FlowState::zeros(&p.grid), &p.settings)?;
    let fields = p.setup.reconstruct(&FlowState::zeros(&p.grid))?;
    let r = residual_main_system(&p.grid, &fields, &p.setup.data, &p.setup.thermo, &p.setup.params).max();
    let zero = out.state.weak_norm(&p.grid);
    let ok = out.report.converged() && out.report.steps() == 1 && zero == 0.0 && r <= 1e-10;
    Ok((ok, format!("steps {}, |w| {zero:.1e}, residual {r:.2e}", out.report.steps())))
}

fn manufactured() -> Result<Check> {
    let coef = prepared("small_data.toml")?.coefficients();
    let (neu, _) = order(neumann_case)?;
    let (rob, _) = order(|g| robin_case(g, coef.r0, coef.kappa, coef.l_wall))?;
    let (lame, _) = order(|g| lame_case(g, &LameParams::uniform(g, coef.mu, coef.lambda, 0.0, coef.alpha)))?;
    let (lin, _) = order(|g| Ok(linear_step_case(g, coef)?.into_iter().fold(0.0, f64::max)))?;
    let second = |o: f64| (o - 2.0).abs() <= 0.3;
    let ok = second(neu) && second(rob) && second(lame) && lin >= 0.9;
    Ok((ok, format!("neumann {neu:.3}, robin {rob:.3}, lame {lame:.3}, linear step {lin:.3}")))
}

fn transport_oracle() -> Result<Check> {
    let (o, errs) = order(transport_case)?;
    let logistic = logistic_case(&channel_grid(32)?, 0.1)?;
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    Ok((o >= 0.9 && decreasing && logistic <= 1e-8, format!("order {o:.3}, logistic {logistic:.2e}")))
}

fn contraction() -> Result<Check> {
    let p = prepared("small_data.toml")?;
    let r = picard_iterate(&p.setup, &FlowState::zeros(&p.grid), &p.settings)?.report;
    let q_ok = r.records.iter().filter(|x| x.step >= 2).all(|x| x.q.is_some_and(|q| q < 1.0));
    let last = r.records.last().map_or(f64::INFINITY, |x| x.delta);
    let ok = q_ok && r.converged() && r.steps() <= 50 && last < 1e-10;
    Ok((ok, format!("steps {}, max q {:.2e}, final delta {last:.2e}", r.steps(), r.max_q().unwrap_or(f64::NAN))))
}

fn linearity() -> Result<Check> {
    let norm = |scale: f64| -> Result<f64> {
        let mut cfg = nsf::config::RunConfig::load(&bundled("small_data.toml"))?;
        cfg.data.scale = scale;
        let p = Prepared::new(cfg)?;
        let out = picard_iterate(&p.setup, &FlowState::zeros(&p.grid), &p.settings)?;
        Ok(if out.report.converged() { out.state.weak_norm(&p.grid) } else { f64::NAN })
    };
    let ratio = norm(1e-3)? / norm(5e-4)?;
    Ok(((ratio / 2.0 - 1.0).abs() <= 0.05, format!("norm ratio {ratio:.5}")))
}

fn uniqueness() -> Result<Check> {
    let p = prepared("small_data.toml")?;
    let start = FlowState::random_smooth(&p.grid, DEFAULT_SEED).scaled(0.1);
    let d = uniqueness_probe(&p.setup, &FlowState::zeros(&p.grid), &start, &p.settings)?;
    Ok((d <= 1e-8, format!("distance {d:.2e}")))
}

fn estimates() -> Result<Check> {
    let p = prepared("small_data.toml")?;
    let coef = p.coefficients();
    let cal = Calibration::calibrate(&p.grid, &coef, p.settings.p, DEFAULT_SEED, SampleCounts::default())?;
    let verdicts = cal.verify(&p.grid, &coef, DEFAULT_SEED + 1)?;
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id.as_str()).collect();
    let ok = failed.is_empty() && verdicts.len() == 8 && cal.interpolation_monotone();
    Ok((ok, format!("{} checkers, failing {failed:?}, C(eps) monotone {}", verdicts.len(), cal.interpolation_monotone())))
}

fn identity() -> Result<Check> {
    let coef = prepared("small_data.toml")?.coefficients();
    let (o, errs) = order(|g| trans_identity_case(g, coef))?;
    Ok((o >= 0.9, format!("slope {o:.3}, residuals {:.2e} .. {:.2e}", errs[0], errs[errs.len() - 1])))
}

fn determinism() -> Result<Check> {
    let dir = tempfile::tempdir()?;
    let cfg = bundled("small_data.toml");
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "1", "4"].iter().enumerate() {
        let out = dir.path().join(k.to_string());
        let status = Command::new(env!("CARGO_BIN_EXE_nsf"))
            .env("NSF_THREADS", threads)
            .args(["solve", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()])
            .stderr(Stdio::null())
            .status()?;
        if !status.success() {
            return Ok((false, format!("solve exited with {status}")));
        }
        outputs.push(std::fs::read(out.join("summary.json"))?);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Ok((same, format!("{} bytes, runs 1/1/4 threads identical: {same}", outputs[0].len())))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Check>); 9] = [
        ("background exactness", background),
        ("manufactured convergence", manufactured),
        ("transport oracle", transport_oracle),
        ("contraction", contraction),
        ("linearity of response", linearity),
        ("uniqueness", uniqueness),
        ("estimate suite", estimates),
        ("transport identity", identity),
        ("determinism", determinism),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = t.elapsed().as_secs_f64();
        let ok = ok && secs < 60.0;
        all &= ok;
        println!("criterion {} {:<26} {}  ({detail}; {secs:.1} s)", i + 1, name, if ok { "PASS" } else { "FAIL" });
    }
    if !all {
        std::process::exit(1);
    }
}
