//! The full check matrix over builtin scenarios.

use vortexhom::complex::golden;
use vortexhom::scenarios::{self, Property, Scenario};

use crate::commands::{self as cmd, CmdError, CmdResult, Ctx};
use crate::config::{FormChoice, RunConfig, ScenarioSource};
use crate::report::Report;

type Section = fn(&Ctx, &mut Report) -> CmdResult;

/// Sections run for one scenario, in report order, with their guards.
fn sections(s: &Scenario) -> Vec<(&'static str, Section)> {
    let steady = s.declares(Property::Steady);
    let inviscid = steady && s.declares(Property::Barotropic) && s.declares(Property::Conservative);
    let mut out: Vec<(&'static str, Section)> = vec![
        ("goldens", |c, r| cmd::goldens(c, r, "")),
        ("stokes", cmd::stokes_scenario),
        ("circulation", cmd::circulation_checks),
        ("flux", cmd::flux_checks),
    ];
    if s.declares(Property::Irrotational) {
        out.push(("derham", cmd::derham));
    }
    out.push(("kinematics", cmd::kinematics));
    if s.declares(Property::Incompressible) {
        out.push(("invariant/area", |c, r| {
            cmd::invariant_with(c, r, FormChoice::Area)
        }));
    }
    if inviscid {
        out.push(("invariant/covelocity", |c, r| {
            cmd::invariant_with(c, r, FormChoice::Covelocity)
        }));
        out.push(("kelvin", cmd::kelvin));
        out.push(("helmholtz", cmd::helmholtz));
    }
    out.extend([
        ("tube", cmd::tube as Section),
        ("continuity", cmd::continuity),
        ("euler", cmd::euler),
        ("power", cmd::power),
        ("magnus", cmd::magnus),
        ("barotropic", cmd::barotropic),
        ("bernoulli", cmd::bernoulli),
    ]);
    out
}

fn run_scenario(cfg: &RunConfig, label: &str, loaded: Result<Scenario, CmdError>, r: &mut Report) {
    r.set_subject(label);
    let scn = match loaded {
        Ok(s) => s,
        Err(CmdError::Usage(m) | CmdError::Failed(m)) => {
            r.verdict("load", m, "a verified scenario", false);
            return;
        }
    };
    let declared: Vec<&str> = Property::ALL
        .into_iter()
        .filter(|p| scn.declares(*p))
        .map(|p| p.name())
        .collect();
    r.verdict(
        "declarations",
        format!("[{}]", declared.join(" ")),
        "verified at load",
        true,
    );
    let list = sections(&scn);
    let ctx = Ctx::new(cfg, cmd::with_overrides(scn, cfg));
    for (name, f) in list {
        if let Err(CmdError::Usage(m) | CmdError::Failed(m)) = f(&ctx, r) {
            r.verdict(name, format!("error: {m}"), "completion", false);
        }
    }
}

/// Runs every section on the selected scenarios; with no selection also the
/// golden homology table and the shipped Stokes pairs.
pub fn suite(cfg: &RunConfig) -> Report {
    let mut r = Report::new("suite");
    r.info("seed", cfg.seed);
    r.info("grid", cfg.grid);
    r.info("quad_order", cfg.quad_order);
    r.info("steps", cfg.steps);
    match &cfg.source {
        ScenarioSource::Builtin(name) => {
            let loaded = scenarios::builtin(name).map_err(|e| CmdError::Failed(e.to_string()));
            run_scenario(cfg, name, loaded, &mut r);
        }
        ScenarioSource::File(path) => {
            let loaded = scenarios::load(path).map_err(|e| CmdError::Failed(e.to_string()));
            let label = loaded
                .as_ref()
                .map(|s| s.name().to_string())
                .unwrap_or_else(|_| path.display().to_string());
            run_scenario(cfg, &label, loaded, &mut r);
        }
        ScenarioSource::None => {
            for name in scenarios::BUILTIN_NAMES {
                let loaded = scenarios::builtin(name).map_err(|e| CmdError::Failed(e.to_string()));
                run_scenario(cfg, name, loaded, &mut r);
            }
            r.set_subject("homology");
            for (name, _) in golden::GOLDEN {
                let res = cmd::load_complex(name).and_then(|c| cmd::homology_of(&c, &mut r));
                if let Err(CmdError::Usage(m) | CmdError::Failed(m)) = res {
                    r.verdict(name, format!("error: {m}"), "completion", false);
                }
            }
            r.set_subject("shipped");
            if let Err(CmdError::Usage(m) | CmdError::Failed(m)) = cmd::stokes_shipped(cfg, &mut r)
            {
                r.verdict("stokes", format!("error: {m}"), "completion", false);
            }
        }
    }
    r.set_subject("");
    let failed = r.failures().len();
    r.info(
        "suite",
        format!(
            "{} checks, {} passed, {} failed",
            r.rows().len(),
            r.rows().len() - failed,
            failed
        ),
    );
    r
}
