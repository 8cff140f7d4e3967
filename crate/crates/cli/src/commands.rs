//! One function per subcommand; each appends lines and checks to a report.

use std::cell::RefCell;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vortexhom::complex::{betti_numbers, golden, parse_complex, CubicalComplex};
use vortexhom::dynamics::{
    barotropic_check, bernoulli_check, continuity_residual, euler_residual, magnus_force,
    mass_balance_cochain, power_balance_residual, FluidState, Tolerance,
};
use vortexhom::forms::FormField;
use vortexhom::grid::Grid;
use vortexhom::integrate::{
    derham_classify, invariant_report, random_polynomial_form, shapes, stokes, GeometricChain,
    InvariantClass, InvariantOptions, InvariantReport, Probe,
};
use vortexhom::kinematics::{
    bivector_potential_residual, covelocity, covelocity_spatial, frobenius_classify,
    vorticity_divergence_residual, vorticity_form, vorticity_spatial,
};
use vortexhom::scenarios::{self, Property, Scenario};
use vortexhom::vortex::{
    circulation, extrude, helmholtz_check, homology_invariance_check, kelvin_check, vortex_tube,
    vorticity_flux, winding_circulation,
};
use vortexhom::Error;

use crate::config::{Command, FormChoice, RunConfig, ScenarioSource};
use crate::probes;
use crate::report::{num, sci, Report};

/// Relative Stokes residual accepted on smooth pairs.
pub const STOKES_TOLERANCE: f64 = 1e-7;
/// Change allowed when the quadrature order doubles.
pub const DOUBLING_TOLERANCE: f64 = 1e-9;
/// Coboundary identity `∮_{∂S} v = ∫_S Ω`.
pub const COBOUNDARY_TOLERANCE: f64 = 1e-7;
/// Grid residual bound for the 3D vorticity identities.
pub const VORTICITY_IDENTITY_TOLERANCE: f64 = 1e-6;
/// Closedness threshold on probe integrals.
pub const DERHAM_TOLERANCE: f64 = 1e-7;
/// Axial length of swept vortex tubes.
pub const TUBE_LENGTH: f64 = 1.0;
/// Step cap for the tube sweep.
pub const TUBE_STEPS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum CmdError {
    /// Bad invocation; exit code 2.
    Usage(String),
    /// Load or evaluation error; exit code 1.
    Failed(String),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Failed(e.to_string())
    }
}

pub type CmdResult = Result<(), CmdError>;

/// A loaded scenario with the run settings.
pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub scn: Scenario,
    /// Time series kept for `--csv` by the advection commands.
    pub series: RefCell<Option<InvariantReport>>,
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a RunConfig, scn: Scenario) -> Self {
        Ctx {
            cfg,
            scn,
            series: RefCell::new(None),
        }
    }

    fn opts(&self) -> InvariantOptions {
        InvariantOptions {
            order: self.cfg.quad_order,
            steps: self.cfg.steps,
            seed: self.cfg.seed,
            ..Default::default()
        }
    }

    fn t1(&self) -> f64 {
        self.cfg
            .t1
            .unwrap_or_else(|| probes::revolution_time(&self.scn))
    }

    fn grid(&self) -> Result<Grid, CmdError> {
        Ok(self.scn.grid(self.cfg.grid)?)
    }

    fn points(&self) -> Result<Vec<Vec<f64>>, CmdError> {
        let pts = self.scn.sample_points(&self.grid()?);
        if pts.is_empty() {
            return Err(Error::EmptyGrid.into());
        }
        Ok(pts)
    }

    fn state(&self) -> Option<&FluidState> {
        self.scn.state.as_ref()
    }

    fn declares(&self, p: Property) -> bool {
        self.scn.declares(p)
    }
}

/// Loads the configured scenario and applies tolerance overrides.
pub fn load_scenario(cfg: &RunConfig) -> Result<Scenario, CmdError> {
    let scn = match &cfg.source {
        ScenarioSource::Builtin(name) if scenarios::builtin_source(name).is_none() => {
            return Err(CmdError::Usage(format!(
                "unknown builtin `{name}` (builtins: {})",
                scenarios::BUILTIN_NAMES.join(", ")
            )))
        }
        ScenarioSource::Builtin(name) => scenarios::builtin(name),
        ScenarioSource::File(path) => scenarios::load(path),
        ScenarioSource::None => {
            return Err(CmdError::Usage(format!(
                "`{}` needs --builtin NAME or --scenario PATH (builtins: {})",
                cfg.command.name(),
                scenarios::BUILTIN_NAMES.join(", ")
            )))
        }
    };
    let scn = scn.map_err(|e| CmdError::Failed(format!("loading scenario: {e}")))?;
    Ok(with_overrides(scn, cfg))
}

pub fn with_overrides(mut scn: Scenario, cfg: &RunConfig) -> Scenario {
    if cfg.atol.is_none() && cfg.rtol.is_none() {
        return scn;
    }
    let tol = Tolerance {
        atol: cfg.atol.unwrap_or(scn.tolerance.atol),
        rtol: cfg.rtol.unwrap_or(scn.tolerance.rtol),
    };
    scn.tolerance = tol;
    scn.state = scn.state.take().map(|s| s.with_tolerance(tol));
    scn
}

/// Resolves `--complex` to a golden complex or a complex file.
pub fn load_complex(name: &str) -> Result<CubicalComplex, CmdError> {
    if golden::expected_betti(name).is_some() {
        return Ok(golden::golden(name)?);
    }
    let path = Path::new(name);
    if !path.exists() {
        let names: Vec<&str> = golden::GOLDEN.iter().map(|(n, _)| *n).collect();
        return Err(CmdError::Usage(format!(
            "unknown complex `{name}` (golden: {}, or a file path)",
            names.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CmdError::Failed(e.to_string()))?;
    Ok(parse_complex(&text)?)
}

pub fn homology(cfg: &RunConfig, r: &mut Report) -> CmdResult {
    let name = cfg
        .complex
        .as_deref()
        .ok_or_else(|| CmdError::Usage("`homology` needs --complex NAME|PATH".into()))?;
    let c = load_complex(name)?;
    homology_of(&c, r)
}

/// Counts, Betti numbers and, for golden complexes, the expected table.
pub fn homology_of(c: &CubicalComplex, r: &mut Report) -> CmdResult {
    let betti = betti_numbers(c)?;
    let counts: Vec<usize> = (0..=c.dim()).map(|k| c.count(k)).collect();
    r.info("complex", c.name());
    r.info("cells", format!("{counts:?}"));
    r.info("betti", format!("{betti:?}"));
    if let Some(expected) = golden::expected_betti(c.name()) {
        r.verdict(
            &format!("betti/{}", c.name()),
            format!("{betti:?}"),
            format!("{expected:?}"),
            betti == expected,
        );
    }
    Ok(())
}

/// The shipped smooth (form, chain) pairs, with forms drawn from `seed`.
pub fn stokes_pairs(seed: u64) -> Vec<(String, FormField, GeometricChain)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut form = |n: usize, k: usize| random_polynomial_form(n, k, &mut rng);
    vec![
        (
            "segment".into(),
            form(2, 0),
            GeometricChain::single(shapes::segment(vec![-0.3, 0.2], vec![0.8, 1.1])),
        ),
        (
            "rectangle".into(),
            form(2, 1),
            GeometricChain::single(shapes::rectangle([-0.5, 0.1], 1.2, 0.7)),
        ),
        (
            "parallelogram".into(),
            form(2, 1),
            GeometricChain::single(shapes::affine(
                vec![0.1, -0.4],
                vec![vec![0.9, 0.2], vec![-0.3, 0.8]],
            )),
        ),
        ("disc".into(), form(2, 1), shapes::disc([0.2, -0.1], 0.9)),
        (
            "annulus".into(),
            form(2, 1),
            shapes::annulus([0.0, 0.0], 0.4, 1.1),
        ),
        (
            "horizontal_disc".into(),
            form(3, 1),
            shapes::horizontal_disc([0.1, 0.2, 0.3], 0.8),
        ),
        (
            "cuboid".into(),
            form(3, 2),
            GeometricChain::single(shapes::cuboid([-0.2, 0.0, 0.1], 0.9, 0.6, 1.1)),
        ),
        (
            "ball".into(),
            form(3, 2),
            shapes::ball([0.0, 0.1, -0.1], 0.7),
        ),
        (
            "sphere".into(),
            form(3, 1),
            shapes::sphere([0.2, 0.0, 0.0], 0.6),
        ),
    ]
}

/// Stokes residual and order-doubling stability for one pair.
pub fn stokes_pair(
    r: &mut Report,
    label: &str,
    alpha: &FormField,
    c: &GeometricChain,
    order: usize,
) -> CmdResult {
    let s = stokes(alpha, c, order)?;
    let s2 = stokes(alpha, c, 2 * order)?;
    let change =
        (s2.interior_integral - s.interior_integral).abs() / s.interior_integral.abs().max(1.0);
    r.info(
        &format!("stokes/{label}"),
        format!(
            "∫dα = {}, ∮α = {}",
            num(s.interior_integral),
            num(s.boundary_integral)
        ),
    );
    r.below(
        &format!("stokes/{label}/residual"),
        s.relative(),
        STOKES_TOLERANCE,
    );
    r.below(
        &format!("stokes/{label}/doubling"),
        change,
        DOUBLING_TOLERANCE,
    );
    Ok(())
}

pub fn stokes_shipped(cfg: &RunConfig, r: &mut Report) -> CmdResult {
    r.info(
        "pairs",
        format!("shipped polynomial forms, seed {}", cfg.seed),
    );
    for (label, alpha, c) in stokes_pairs(cfg.seed) {
        stokes_pair(r, &label, &alpha, &c, cfg.quad_order)?;
    }
    Ok(())
}

pub fn stokes_scenario(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    let v = covelocity_spatial(&s.spec, 0.0)?;
    stokes_pair(
        r,
        "covelocity/surface",
        &v,
        &probes::surface(s)?,
        ctx.cfg.quad_order,
    )?;
    if s.dim() == 3 {
        let omega = vorticity_spatial(&s.spec, 0.0)?;
        stokes_pair(
            r,
            "vorticity/ball",
            &omega,
            &probes::volume(s)?,
            ctx.cfg.quad_order,
        )?;
    }
    Ok(())
}

pub fn derham(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    let v = covelocity_spatial(&s.spec, 0.0)?;
    let mut probe_list: Vec<Probe> = probes::boundary_loops(s, 4, ctx.cfg.seed)
        .into_iter()
        .enumerate()
        .map(|(i, c)| Probe::boundary(&format!("square {i}"), c))
        .collect();
    probe_list.push(Probe::cycle("probe loop", probes::cycle(s)?));
    for e in &s.exclusions {
        if let Ok(c) = s.circulation_probe(&format!("around={}", e.label)) {
            probe_list.push(Probe::cycle(&format!("around {}", e.label), c));
        }
    }
    let class = derham_classify(&v, &probe_list, DERHAM_TOLERANCE, ctx.cfg.quad_order)?;
    for p in &class.probes {
        r.info(&format!("probe {}", p.label), num(p.value));
    }
    let show = |b: Option<bool>| match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "inconclusive",
    };
    r.info("closed", show(class.closed));
    r.info("exact", show(class.exact));
    if ctx.declares(Property::Irrotational) {
        r.verdict(
            "derham/closed",
            show(class.closed),
            "yes",
            class.closed == Some(true),
        );
        let charged = s
            .exclusions
            .iter()
            .any(|e| e.strength.is_some_and(|g| g != 0.0));
        if charged {
            r.verdict(
                "derham/exact",
                show(class.exact),
                "no",
                class.exact == Some(false),
            );
        }
    }
    Ok(())
}

pub fn invariant(ctx: &Ctx, r: &mut Report) -> CmdResult {
    invariant_with(ctx, r, ctx.cfg.form)
}

/// Classifies `form` as an integral invariant of the scenario flow.
pub fn invariant_with(ctx: &Ctx, r: &mut Report, form: FormChoice) -> CmdResult {
    let s = &ctx.scn;
    let n = s.dim();
    let (label, alpha, chain) = match form {
        FormChoice::Covelocity => {
            let a = if s.spec.is_steady() {
                covelocity_spatial(&s.spec, 0.0)?
            } else {
                covelocity(&s.spec)?
            };
            ("covelocity", a, probes::cycle(s)?)
        }
        FormChoice::Area => ("area", FormField::volume(n), probes::volume(s)?),
        FormChoice::Vorticity => {
            let a = if s.spec.is_steady() {
                vorticity_spatial(&s.spec, 0.0)?
            } else {
                vorticity_form(&s.spec)?
            };
            ("vorticity", a, probes::surface(s)?)
        }
    };
    let t1 = ctx.t1();
    let rep = invariant_report(&alpha, &s.spec, &chain, 0.0, t1, &ctx.opts())?;
    r.info(&format!("invariant/{label}/t1"), num(t1));
    r.info(&format!("invariant/{label}/initial"), num(rep.initial()));
    r.info(&format!("invariant/{label}/drift"), sci(rep.lhs_drift));
    r.info(&format!("invariant/{label}/lie_max"), sci(rep.lie_max_norm));
    for p in &rep.probes {
        r.info(
            &format!("invariant/{label}/probe {}", p.label),
            format!("drift {} (cycle: {})", sci(p.drift), p.is_cycle),
        );
    }
    if let Some(w) = &rep.beta_witness {
        r.info(
            &format!("invariant/{label}/witness"),
            format!("{} ({})", w.formula, sci(w.max_residual)),
        );
    }
    r.info(&format!("invariant/{label}/class"), rep.classification);
    for c in &rep.checks {
        r.named(&format!("invariant/{label}/"), c);
    }
    let expected = match form {
        FormChoice::Area if ctx.declares(Property::Incompressible) => {
            Some(vec![InvariantClass::Absolute])
        }
        FormChoice::Covelocity
            if ctx.declares(Property::Barotropic) && ctx.declares(Property::Conservative) =>
        {
            Some(vec![InvariantClass::Absolute, InvariantClass::Relative])
        }
        _ => None,
    };
    if let Some(allowed) = expected {
        let names: Vec<String> = allowed.iter().map(|c| c.to_string()).collect();
        r.verdict(
            &format!("invariant/{label}/class"),
            rep.classification,
            names.join(" or "),
            allowed.contains(&rep.classification),
        );
    }
    *ctx.series.borrow_mut() = Some(rep);
    Ok(())
}

pub fn circulation_cmd(ctx: &Ctx, r: &mut Report) -> CmdResult {
    goldens(ctx, r, "circulation/")?;
    circulation_checks(ctx, r)
}

/// Winding integrality and homology invariance of circulation.
pub fn circulation_checks(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    let order = ctx.cfg.quad_order;
    if s.exclusions.iter().any(|e| e.strength.is_some()) {
        let rep = winding_circulation(&s.spec, "probe loop", &probes::cycle(s)?, 0.0, order)?;
        r.info("winding/circulation", num(rep.value));
        for w in &rep.windings {
            r.info(
                &format!("winding/{}", w.label),
                format!("{} × {}", w.winding, num(w.strength)),
            );
        }
        if let Some(res) = rep.integrality_residual {
            r.below("winding/integrality", res, 1e-6);
        }
    }
    if s.declares(Property::Irrotational) {
        for (label, a, b) in probes::homologous_loops(s)? {
            let rep = homology_invariance_check(&s.spec, &a, &b, None, 0.0, order)?;
            r.info(
                &format!("invariance/{label}"),
                format!("{} vs {}", num(rep.value), num(rep.value_prime)),
            );
            r.below(
                &format!("invariance/{label}"),
                rep.residual / (1.0 + rep.value.abs()),
                vortexhom::vortex::INVARIANCE_TOLERANCE,
            );
        }
    }
    Ok(())
}

pub fn flux(ctx: &Ctx, r: &mut Report) -> CmdResult {
    goldens(ctx, r, "flux/")?;
    flux_checks(ctx, r)
}

/// `∫_S Ω = ∮_{∂S} v` on the probe surface, and zero flux through a sphere.
pub fn flux_checks(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    let order = ctx.cfg.quad_order;
    let disc = probes::surface(s)?;
    let phi = vorticity_flux(&s.spec, &disc, 0.0, order)?;
    let c = circulation(&s.spec, &disc.boundary()?, 0.0, order)?;
    r.info("flux/surface", num(phi));
    r.below(
        "flux/coboundary",
        (phi - c).abs() / (1.0 + phi.abs()),
        COBOUNDARY_TOLERANCE,
    );
    if let Some(sphere) = probes::closed_surface(s) {
        let z = vorticity_flux(&s.spec, &sphere, 0.0, order)?;
        r.below("flux/closed_surface", z.abs(), COBOUNDARY_TOLERANCE);
    }
    Ok(())
}

pub fn kelvin(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    let t1 = ctx.t1();
    let rep = kelvin_check(&s.spec, &probes::cycle(s)?, 0.0, t1, &ctx.opts())?;
    r.info("kelvin/t1", num(t1));
    r.info("kelvin/circulation", num(rep.invariant.initial()));
    for c in &rep.checks {
        r.named("kelvin/", c);
    }
    *ctx.series.borrow_mut() = Some(rep.invariant);
    Ok(())
}

pub fn helmholtz(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    let t1 = ctx.t1();
    let points = ctx.points()?;
    let rep = helmholtz_check(&s.spec, &probes::surface(s)?, 0.0, t1, &points, &ctx.opts())?;
    r.info("helmholtz/t1", num(t1));
    r.info("helmholtz/flux", num(rep.invariant.initial()));
    for c in &rep.checks {
        r.named("helmholtz/", c);
    }
    *ctx.series.borrow_mut() = Some(rep.invariant);
    Ok(())
}

pub fn tube(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    if s.declares(Property::Irrotational) {
        r.not_applicable("tube", "flow is declared irrotational");
        return Ok(());
    }
    let spec = if s.dim() == 2 {
        extrude(&s.spec)?
    } else {
        s.spec.clone()
    };
    let mut c = s.probe_point.clone();
    c.resize(3, 0.0);
    let radius = s.clear_radius(&s.probe_point, 0.25);
    let cap = shapes::horizontal_disc([c[0], c[1], c[2]], radius);
    match vortex_tube(
        &spec,
        &cap,
        TUBE_LENGTH,
        0.0,
        ctx.cfg.steps.min(TUBE_STEPS),
        ctx.cfg.quad_order,
    ) {
        Ok(t) => {
            r.info(
                "tube/form_flux",
                format!("{} {}", num(t.form_flux[0]), num(t.form_flux[1])),
            );
            r.info(
                "tube/vector_flux",
                format!("{} {}", num(t.vector_flux[0]), num(t.vector_flux[1])),
            );
            r.info("tube/strength", num(t.strength));
            r.below(
                "tube/end_flux_mismatch",
                t.relative_mismatch,
                vortexhom::vortex::TUBE_TOLERANCE,
            );
            r.verdict(
                "tube/transverse_caps",
                format!("{:?}", t.transverse),
                "[true, true]",
                t.transverse == [true, true],
            );
        }
        Err(Error::DegenerateTube(why)) => r.not_applicable("tube", why),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn with_state<'c>(ctx: &'c Ctx, r: &mut Report, name: &str) -> Option<&'c FluidState> {
    let st = ctx.state();
    if st.is_none() {
        r.not_applicable(name, "scenario has no density");
    }
    st
}

pub fn continuity(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let Some(st) = with_state(ctx, r, "continuity") else {
        return Ok(());
    };
    r.balance(&continuity_residual(st, &ctx.grid()?, 0.0)?);
    let chain = probes::volume(&ctx.scn)?;
    r.balance(&mass_balance_cochain(st, &chain, 0.0, ctx.cfg.quad_order)?);
    Ok(())
}

pub fn euler(ctx: &Ctx, r: &mut Report) -> CmdResult {
    if let Some(st) = with_state(ctx, r, "euler") {
        r.balance(&euler_residual(st, &ctx.grid()?, 0.0)?);
    }
    Ok(())
}

pub fn power(ctx: &Ctx, r: &mut Report) -> CmdResult {
    if let Some(st) = with_state(ctx, r, "power") {
        r.balance(&power_balance_residual(st, &ctx.grid()?, 0.0)?);
    }
    Ok(())
}

pub fn magnus(ctx: &Ctx, r: &mut Report) -> CmdResult {
    if let Some(st) = with_state(ctx, r, "magnus") {
        let (force, rep) = magnus_force(st, &ctx.grid()?, 0.0)?;
        let mut p = vec![0.0];
        p.extend_from_slice(&ctx.scn.probe_point);
        if let Ok(v) = force.try_value(&p) {
            let shown: Vec<String> = v.iter().map(|c| num(*c)).collect();
            r.info("magnus/at_probe", format!("[{}]", shown.join(", ")));
        }
        r.balance(&rep);
    }
    Ok(())
}

pub fn barotropic(ctx: &Ctx, r: &mut Report) -> CmdResult {
    if let Some(st) = with_state(ctx, r, "barotropic") {
        r.balance(&barotropic_check(st, &ctx.grid()?, 0.0)?);
    }
    Ok(())
}

pub fn bernoulli(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let Some(st) = with_state(ctx, r, "bernoulli") else {
        return Ok(());
    };
    let seeds = probes::streamline_seeds(&ctx.scn);
    let rep = bernoulli_check(st, &seeds, ctx.t1(), ctx.cfg.steps)?;
    for c in &rep.chain_residuals {
        r.info(
            &format!("bernoulli/{}", c.label),
            format!("deviation {} of head {}", sci(c.residual), num(c.scale)),
        );
    }
    r.balance(&rep);
    Ok(())
}

/// Golden values whose key starts with `prefix` (all when empty).
pub fn goldens(ctx: &Ctx, r: &mut Report, prefix: &str) -> CmdResult {
    for g in ctx.scn.goldens.iter().filter(|g| g.key.starts_with(prefix)) {
        match ctx.scn.measure(&g.key, ctx.cfg.quad_order) {
            Ok(v) => r.expect(&g.key, v, &g.expected_expr.display(), g.accepts(v)),
            Err(e) => r.verdict(
                &g.key,
                format!("error: {e}"),
                g.expected_expr.display(),
                false,
            ),
        }
    }
    Ok(())
}

/// Kinematic identities: `div ω = 0` and the bivector potential in 3D,
/// complete integrability in 2D.
pub fn kinematics(ctx: &Ctx, r: &mut Report) -> CmdResult {
    let s = &ctx.scn;
    let points = ctx.points()?;
    if s.dim() == 3 {
        let a = vorticity_divergence_residual(&s.spec, 0.0, &points)?;
        let b = bivector_potential_residual(&s.spec, 0.0, &points)?;
        r.below("kinematics/div_vorticity", a, VORTICITY_IDENTITY_TOLERANCE);
        r.below(
            "kinematics/bivector_potential",
            b,
            VORTICITY_IDENTITY_TOLERANCE,
        );
    }
    let f = frobenius_classify(&s.spec, &points, &[0.0])?;
    let shown = f
        .first_vanishing_index
        .map(|j| format!("I{j}"))
        .unwrap_or_else(|| "none".into());
    r.info("frobenius/first_vanishing", shown);
    if s.dim() == 2 {
        r.verdict(
            "frobenius/completely_integrable",
            f.completely_integrable(),
            true,
            f.completely_integrable(),
        );
    }
    Ok(())
}

/// Runs one scenario subcommand.
pub fn dispatch(ctx: &Ctx, r: &mut Report) -> CmdResult {
    match ctx.cfg.command {
        Command::Stokes => stokes_scenario(ctx, r),
        Command::Derham => derham(ctx, r),
        Command::Invariant => invariant(ctx, r),
        Command::Circulation => circulation_cmd(ctx, r),
        Command::Flux => flux(ctx, r),
        Command::Kelvin => kelvin(ctx, r),
        Command::Helmholtz => helmholtz(ctx, r),
        Command::Tube => tube(ctx, r),
        Command::Continuity => continuity(ctx, r),
        Command::Euler => euler(ctx, r),
        Command::Bernoulli => bernoulli(ctx, r),
        Command::Power => power(ctx, r),
        Command::Magnus => magnus(ctx, r),
        Command::Barotropic => barotropic(ctx, r),
        Command::Homology | Command::Suite => unreachable!("handled by run"),
    }
}
