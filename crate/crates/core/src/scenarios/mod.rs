//! Analytic flow scenarios: builtins and user scenario files.

pub mod expr;
pub mod file;

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use crate::dynamics::{barotropic_check, euler_residual, FluidState, SampleMask, Tolerance};
use crate::error::{Error, Result};
use crate::forms::{Domain, Exclusion, FormField};
use crate::grid::{Grid, STENCIL_MARGIN};
use crate::integrate::{shapes, GeometricChain};
use crate::kinematics::{
    compressibility, vorticity_scalar, vorticity_spatial, vorticity_vector, VectorFieldSpec,
    INCOMPRESSIBLE_TOLERANCE,
};
use crate::vortex::circulation;

use expr::{compile, Compiled, Expr, Func, BUILTIN_CONSTANTS};
pub use file::{ExclusionKind, GoldenDecl, Property, ScenarioFile, Source, AXES};

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 9] = [
    "point_vortex",
    "rigid_rotation",
    "rankine_vortex",
    "shear_flow",
    "vortex_pair",
    "expansion",
    "uniform",
    "hydrostatic",
    "doubly_punctured",
];

const BUILTIN_SOURCES: [(&str, &str); 9] = [
    ("point_vortex", include_str!("builtins/point_vortex.scn")),
    (
        "rigid_rotation",
        include_str!("builtins/rigid_rotation.scn"),
    ),
    (
        "rankine_vortex",
        include_str!("builtins/rankine_vortex.scn"),
    ),
    ("shear_flow", include_str!("builtins/shear_flow.scn")),
    ("vortex_pair", include_str!("builtins/vortex_pair.scn")),
    ("expansion", include_str!("builtins/expansion.scn")),
    ("uniform", include_str!("builtins/uniform.scn")),
    ("hydrostatic", include_str!("builtins/hydrostatic.scn")),
    (
        "doubly_punctured",
        include_str!("builtins/doubly_punctured.scn"),
    ),
];

/// Grid resolution used for load-time declaration checks.
pub const VERIFY_RESOLUTION: usize = 9;
/// Allowed jump across a piecewise seam.
pub const SEAM_TOLERANCE: f64 = 1e-8;
/// Threshold on the vorticity form for `irrotational`.
pub const IRROTATIONAL_TOLERANCE: f64 = 1e-6;

const VERIFY_TIMES: [f64; 3] = [0.0, 0.5, 1.3];
const SEAM_RESOLUTION: usize = 17;

#[derive(Clone, Debug, PartialEq)]
pub struct Golden {
    pub key: String,
    pub expected: f64,
    pub expected_expr: Expr,
    pub tol: f64,
    pub source: Source,
}

impl Golden {
    /// `|value − expected| ≤ tol · max(1, |expected|)`.
    pub fn accepts(&self, value: f64) -> bool {
        (value - self.expected).abs() <= self.tol * self.expected.abs().max(1.0)
    }
}

/// A fully evaluated scenario.
#[derive(Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub constants: HashMap<String, f64>,
    pub spec: VectorFieldSpec,
    pub state: Option<FluidState>,
    pub exclusions: Vec<Exclusion>,
    pub goldens: Vec<Golden>,
    pub probe_radius: f64,
    pub probe_point: Vec<f64>,
    pub tolerance: Tolerance,
    mask: SampleMask,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.file.name)
            .field("dim", &self.file.dim)
            .field("declared", &self.file.declared)
            .field("goldens", &self.goldens.len())
            .finish()
    }
}

fn field_error(file: &ScenarioFile, field: &str, message: impl Into<String>) -> Error {
    Error::Field {
        field: field.into(),
        line: file.line_of(field),
        message: message.into(),
    }
}

fn reserved(name: &str) -> bool {
    ["t", "x", "y", "z", "p", "if", "then", "else"].contains(&name)
        || BUILTIN_CONSTANTS.iter().any(|(c, _)| *c == name)
        || Func::ALL.iter().any(|f| f.name() == name)
}

/// A compiled scalar of `(t, x…)` with symbolic partials in every slot.
#[derive(Clone)]
struct Scalar {
    value: Arc<Compiled>,
    partials: Arc<Vec<Compiled>>,
}

impl Scalar {
    fn new(c: Compiled, slots: usize) -> Self {
        let partials = (0..slots).map(|s| c.derivative(s)).collect();
        Scalar {
            value: Arc::new(c),
            partials: Arc::new(partials),
        }
    }

    fn depends_on(&self, slot: usize) -> bool {
        self.value.depends_on(slot)
    }

    fn form(&self, n: usize, exclusions: &[Exclusion]) -> FormField {
        let (v, d) = (self.value.clone(), self.partials.clone());
        FormField::new(n + 1, 0, move |p| vec![v.eval(p)])
            .with_jacobian(move |p| d.iter().map(|c| vec![c.eval(p)]).collect())
            .with_domain(Domain::spacetime(exclusions.to_vec()))
    }
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn dim(&self) -> usize {
        self.file.dim
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.file.bounds
    }

    pub fn declares(&self, p: Property) -> bool {
        self.file.declared.contains(&p)
    }

    pub fn golden(&self, key: &str) -> Option<&Golden> {
        self.goldens.iter().find(|g| g.key == key)
    }

    pub fn from_text(text: &str) -> Result<Scenario> {
        Scenario::from_file(ScenarioFile::parse(text)?)
    }

    /// Builds the fields, checks piecewise seams and verifies every declared
    /// property.
    pub fn from_file(file: ScenarioFile) -> Result<Scenario> {
        let sc = Scenario::build(file)?;
        sc.check_seams()?;
        sc.verify_declarations()?;
        Ok(sc)
    }

    pub fn to_text(&self) -> String {
        self.file.to_text()
    }

    fn build(file: ScenarioFile) -> Result<Scenario> {
        let n = file.dim;
        let mut constants = HashMap::new();
        for (name, e) in &file.constants {
            let key = format!("const {name}");
            if reserved(name) {
                return Err(field_error(&file, &key, format!("`{name}` is reserved")));
            }
            let c = compile(e, &[], &constants).map_err(|m| field_error(&file, &key, m))?;
            constants.insert(name.clone(), c.eval(&[]));
        }
        let slots: Vec<(&str, usize)> = std::iter::once(("t", 0))
            .chain((0..n).map(|a| (AXES[a], a + 1)))
            .collect();
        let scalar = |key: &str, e: &Expr| -> Result<Scalar> {
            compile(e, &slots, &constants)
                .map(|c| Scalar::new(c, n + 1))
                .map_err(|m| field_error(&file, key, m))
        };
        let number = |key: &str, e: &Expr| -> Result<f64> {
            compile(e, &[], &constants)
                .map(|c| c.eval(&[]))
                .map_err(|m| field_error(&file, key, m))
        };

        let exclusions = file
            .exclusions
            .iter()
            .map(|d| {
                let key = format!("exclude {}", d.label);
                let mut e = match &d.kind {
                    ExclusionKind::Point => Exclusion::point(&d.label, d.at.clone(), d.radius),
                    ExclusionKind::Line { direction } => {
                        Exclusion::line(&d.label, d.at.clone(), direction.clone(), d.radius)
                    }
                };
                if let Some(s) = &d.strength {
                    e = e.with_strength(number(&key, s)?);
                }
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;

        let velocity = file
            .velocity
            .iter()
            .enumerate()
            .map(|(a, e)| scalar(&format!("velocity.{}", AXES[a]), e))
            .collect::<Result<Vec<_>>>()?;
        let steady = !velocity.iter().any(|s| s.depends_on(0));
        let (v1, v2) = (velocity.clone(), velocity.clone());
        let spec = VectorFieldSpec::with_partials(
            n,
            steady,
            move |t, x| {
                let p = crate::dynamics::tx(t, x);
                v1.iter().map(|s| s.value.eval(&p)).collect()
            },
            move |t, x| {
                let p = crate::dynamics::tx(t, x);
                (0..=n)
                    .map(|slot| v2.iter().map(|s| s.partials[slot].eval(&p)).collect())
                    .collect()
            },
        )
        .with_exclusions(exclusions.clone());

        let mut guards = Vec::new();
        let mut all_exprs: Vec<&Expr> = file.velocity.iter().collect();
        all_exprs.extend(
            [&file.density, &file.pressure, &file.potential]
                .into_iter()
                .flatten(),
        );
        if let Some(f) = &file.force {
            all_exprs.extend(f.iter());
        }
        for e in &all_exprs {
            for g in e.guards() {
                if let Ok(c) = compile(&g, &slots, &constants) {
                    guards.push(Scalar::new(c, n + 1));
                }
            }
        }
        let guards = Arc::new(guards);
        let mask: SampleMask = Arc::new(move |x: &[f64]| {
            let p = crate::dynamics::tx(0.0, x);
            guards.iter().all(|g| {
                let grad: f64 = (1..=x.len())
                    .map(|s| g.partials[s].eval(&p).powi(2))
                    .sum::<f64>()
                    .sqrt();
                g.value.eval(&p).abs() > 2.0 * STENCIL_MARGIN * grad.max(1e-12)
            })
        });

        let tolerance = Tolerance {
            atol: file.atol.unwrap_or(crate::dynamics::DEFAULT_ATOL),
            rtol: file.rtol.unwrap_or(crate::dynamics::DEFAULT_RTOL),
        };
        let state = match &file.density {
            None => None,
            Some(rho) => {
                let density = scalar("density", rho)?.form(n, &exclusions);
                let mut st = FluidState::new(spec.clone(), density)?
                    .with_tolerance(tolerance)
                    .with_mask(mask.clone());
                if let Some(f) = &file.force {
                    let comps = f
                        .iter()
                        .enumerate()
                        .map(|(a, e)| scalar(&format!("force.{}", AXES[a]), e))
                        .collect::<Result<Vec<_>>>()?;
                    let c2 = comps.clone();
                    let force = FormField::new(n + 1, 1, move |p| {
                        std::iter::once(0.0)
                            .chain(comps.iter().map(|s| s.value.eval(p)))
                            .collect()
                    })
                    .with_jacobian(move |p| {
                        (0..=n)
                            .map(|slot| {
                                std::iter::once(0.0)
                                    .chain(c2.iter().map(|s| s.partials[slot].eval(p)))
                                    .collect()
                            })
                            .collect()
                    })
                    .with_domain(Domain::spacetime(exclusions.clone()));
                    st = st.with_force(force)?;
                }
                if let Some(u) = &file.potential {
                    st = st.with_potential(scalar("potential", u)?.form(n, &exclusions))?;
                }
                if let Some(pi) = &file.pressure {
                    st = st.with_pressure(scalar("pressure", pi)?.form(n, &exclusions))?;
                }
                if let Some(eos) = &file.eos {
                    let c = compile(eos, &[("p", 0)], &constants)
                        .map_err(|m| field_error(&file, "eos", m))?;
                    st = st.with_eos(Arc::new(move |p| c.eval(&[p])));
                }
                Some(st)
            }
        };
        if state.is_none() {
            for key in ["pressure", "potential", "eos"] {
                if file.lines.contains_key(key) {
                    return Err(field_error(&file, key, "requires a density"));
                }
            }
            if file.force.is_some() {
                return Err(field_error(&file, "force.x", "requires a density"));
            }
        }

        let goldens = file
            .goldens
            .iter()
            .map(|g| {
                Ok(Golden {
                    key: g.key.clone(),
                    expected: number(&format!("golden {}", g.key), &g.expected)?,
                    expected_expr: g.expected.clone(),
                    tol: g.tol,
                    source: g.source,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let default_probe: Vec<f64> = [0.3, 0.2, 0.1][..n].to_vec();
        Ok(Scenario {
            probe_radius: file.probe_radius.unwrap_or(1.0),
            probe_point: file.probe_point.clone().unwrap_or(default_probe),
            constants,
            spec,
            state,
            exclusions,
            goldens,
            tolerance,
            mask,
            file,
        })
    }

    /// Uniform grid over the scenario bounds.
    pub fn grid(&self, resolution: usize) -> Result<Grid> {
        Grid::new(self.file.bounds.clone(), resolution)
    }

    /// Grid points clear of exclusions and piecewise seams.
    pub fn sample_points(&self, grid: &Grid) -> Vec<Vec<f64>> {
        grid.masked(&self.exclusions, STENCIL_MARGIN)
            .into_iter()
            .filter(|x| (self.mask)(x))
            .collect()
    }

    /// Locates every guard sign change along grid lines and compares both
    /// branches there.
    fn check_seams(&self) -> Result<()> {
        let n = self.dim();
        let slots: Vec<(&str, usize)> = std::iter::once(("t", 0))
            .chain((0..n).map(|a| (AXES[a], a + 1)))
            .collect();
        let mut named: Vec<(String, &Expr)> = self
            .file
            .velocity
            .iter()
            .enumerate()
            .map(|(a, e)| (format!("velocity.{}", AXES[a]), e))
            .collect();
        for (k, e) in [
            ("density", &self.file.density),
            ("pressure", &self.file.pressure),
            ("potential", &self.file.potential),
        ] {
            if let Some(e) = e {
                named.push((k.into(), e));
            }
        }
        let grid = self.grid(SEAM_RESOLUTION)?;
        let pts = grid.masked(&self.exclusions, 0.0);
        for (field, e) in named {
            for (g, a, b) in e.branches() {
                let c = |x: &Expr| {
                    compile(x, &slots, &self.constants)
                        .map_err(|m| field_error(&self.file, &field, m))
                };
                let (g, a, b) = (c(&g)?, c(&a)?, c(&b)?);
                let at = |x: &[f64]| crate::dynamics::tx(0.0, x);
                for x in &pts {
                    for axis in 0..n {
                        let (lo, hi) = self.file.bounds[axis];
                        let step = (hi - lo) / (SEAM_RESOLUTION - 1) as f64;
                        let mut y = x.clone();
                        y[axis] += step;
                        if y[axis] > hi + 1e-12 || self.spec.excluded_by(&y).is_some() {
                            continue;
                        }
                        let (g0, g1) = (g.eval(&at(x)), g.eval(&at(&y)));
                        if !(g0.is_finite() && g1.is_finite()) || (g0 < 0.0) == (g1 < 0.0) {
                            continue;
                        }
                        let (mut s0, mut s1) = (0.0f64, 1.0f64);
                        for _ in 0..80 {
                            let m = 0.5 * (s0 + s1);
                            let mut z = x.clone();
                            z[axis] += m * step;
                            if (g.eval(&at(&z)) < 0.0) == (g0 < 0.0) {
                                s0 = m;
                            } else {
                                s1 = m;
                            }
                        }
                        let mut z = x.clone();
                        z[axis] += 0.5 * (s0 + s1) * step;
                        let (va, vb) = (a.eval(&at(&z)), b.eval(&at(&z)));
                        if (va - vb).abs() > SEAM_TOLERANCE * va.abs().max(1.0) {
                            return Err(Error::Declaration {
                                property: format!("seam continuity of {field}"),
                                detail: format!(
                                    "branches differ by {:.3e} at {z:?}",
                                    (va - vb).abs()
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-verifies every declared property at default tolerances.
    pub fn verify_declarations(&self) -> Result<()> {
        let grid = self.grid(VERIFY_RESOLUTION)?;
        let points = self.sample_points(&grid);
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let fail = |p: Property, detail: String| Error::Declaration {
            property: p.name().into(),
            detail,
        };
        for &p in &self.file.declared {
            match p {
                Property::Steady => {
                    if !self.spec.is_steady() {
                        return Err(fail(p, "velocity depends on t".into()));
                    }
                    self.spec.verify_steady(&points, &VERIFY_TIMES)?;
                }
                Property::Incompressible => {
                    let mut worst = 0.0f64;
                    for &t in &VERIFY_TIMES {
                        for x in &points {
                            worst = worst.max(compressibility(&self.spec, t, x)?.abs());
                        }
                    }
                    if worst >= INCOMPRESSIBLE_TOLERANCE {
                        return Err(fail(p, format!("max |div v| = {worst:.3e}")));
                    }
                }
                Property::Irrotational => {
                    let mut worst = 0.0f64;
                    for &t in &VERIFY_TIMES {
                        let w = vorticity_spatial(&self.spec, t)?;
                        worst = worst.max(w.0.max_norm_on(&points));
                    }
                    if worst >= IRROTATIONAL_TOLERANCE {
                        return Err(fail(p, format!("max |Ω| = {worst:.3e}")));
                    }
                }
                Property::Barotropic => {
                    let st = self.require_state(p)?;
                    let r = barotropic_check(st, &grid, 0.0)?;
                    if !r.applicable || !r.pass {
                        return Err(fail(
                            p,
                            format!("max |dρ∧dπ| = {:.3e} {}", r.max_residual, r.note),
                        ));
                    }
                }
                Property::Conservative => {
                    if let Some(st) = &self.state {
                        if !st.has_conservative_force() {
                            return Err(fail(p, "force given without a potential".into()));
                        }
                        st.validate(&points, &[0.0])
                            .map_err(|e| fail(p, e.to_string()))?;
                    }
                }
                Property::Balanced => {
                    let st = self.require_state(p)?;
                    let r = euler_residual(st, &grid, 0.0)?;
                    if !r.applicable || !r.pass {
                        return Err(fail(
                            p,
                            format!("euler residual {:.3e} {}", r.max_residual, r.note),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn require_state(&self, p: Property) -> Result<&FluidState> {
        self.state.as_ref().ok_or_else(|| Error::Declaration {
            property: p.name().into(),
            detail: "scenario has no density".into(),
        })
    }

    /// Center used by radius-based probes: the origin.
    pub fn probe_center(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// A circle (horizontal in 3D) of radius `r` traversed `turns` times.
    pub fn probe_circle(&self, center: &[f64], r: f64, turns: f64) -> Result<GeometricChain> {
        match self.dim() {
            2 => Ok(shapes::circle([center[0], center[1]], r, turns)),
            3 if turns == 1.0 => Ok(shapes::horizontal_circle(
                [center[0], center[1], center[2]],
                r,
            )),
            _ => Err(Error::Precondition(format!(
                "no {turns}-turn circle probe in dimension {}",
                self.dim()
            ))),
        }
    }

    fn probe_disc(&self, r: f64) -> Result<GeometricChain> {
        self.disc_at(&self.probe_center(), r)
    }

    /// A disc (horizontal in 3D) of radius `r` about `center`.
    pub fn disc_at(&self, center: &[f64], r: f64) -> Result<GeometricChain> {
        match self.dim() {
            2 => Ok(shapes::disc([center[0], center[1]], r)),
            3 => Ok(shapes::horizontal_disc(
                [center[0], center[1], center[2]],
                r,
            )),
            d => Err(Error::Precondition(format!(
                "no disc probe in dimension {d}"
            ))),
        }
    }

    /// Largest radius up to `cap` whose ball about `center` keeps half its
    /// clearance from every exclusion.
    pub fn clear_radius(&self, center: &[f64], cap: f64) -> f64 {
        self.exclusions
            .iter()
            .map(|e| 0.5 * (e.distance(center) - e.radius))
            .fold(cap, f64::min)
    }

    /// The closed loop used by a `circulation/...` golden key.
    pub fn circulation_probe(&self, spec: &str) -> Result<GeometricChain> {
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::UnknownName(format!("circulation/{spec}")))
        };
        if let Some(k) = spec.strip_prefix("winding=") {
            let turns = parse(k)?;
            self.probe_circle(&self.probe_center(), self.probe_radius, turns)
        } else if let Some(r) = spec.strip_prefix("radius=") {
            self.probe_circle(&self.probe_center(), parse(r)?, 1.0)
        } else if let Some(label) = spec.strip_prefix("around=") {
            let e = self
                .exclusions
                .iter()
                .find(|e| e.label == label)
                .ok_or_else(|| Error::UnknownName(label.into()))?;
            let c = e.anchor().to_vec();
            let nearest = self
                .exclusions
                .iter()
                .filter(|o| o.label != e.label)
                .map(|o| o.distance(&c) - o.radius)
                .fold(f64::INFINITY, f64::min);
            let r = (0.5 * nearest).min(1.0).max(2.0 * e.radius);
            self.probe_circle(&c, r, 1.0)
        } else {
            Err(Error::UnknownName(format!("circulation/{spec}")))
        }
    }

    /// Computes the quantity named by a golden key.
    ///
    /// Keys: `circulation/winding=K`, `circulation/radius=R`,
    /// `circulation/around=LABEL`, `flux/radius=R`, `vorticity` (2D scalar at
    /// the probe point), `vorticity/x|y|z` (3D vorticity vector), `divergence`
    /// and `head` (`U + ½ρv² + π`) at the probe point, all at `t = 0`.
    pub fn measure(&self, key: &str, order: usize) -> Result<f64> {
        let t = 0.0;
        let x = &self.probe_point;
        let p = crate::dynamics::tx(t, x);
        if let Some(rest) = key.strip_prefix("circulation/") {
            let c = self.circulation_probe(rest)?;
            return circulation(&self.spec, &c, t, order);
        }
        if let Some(r) = key.strip_prefix("flux/radius=") {
            let r: f64 = r.parse().map_err(|_| Error::UnknownName(key.into()))?;
            let d = self.probe_disc(r)?;
            return crate::vortex::vorticity_flux(&self.spec, &d, t, order);
        }
        match key {
            "vorticity" => Ok(vorticity_scalar(&self.spec, t)?.try_value(x)?[0]),
            "vorticity/x" | "vorticity/y" | "vorticity/z" if self.dim() == 3 => {
                let a = AXES.iter().position(|s| key.ends_with(s)).unwrap_or(0);
                Ok(vorticity_vector(&self.spec, t)?.try_value(x)?[a])
            }
            "divergence" => compressibility(&self.spec, t, x),
            "head" => {
                let st = self
                    .state
                    .as_ref()
                    .ok_or_else(|| Error::Precondition("head needs a density".into()))?;
                let pi = st.pressure()?.try_value(&p)?[0];
                let rho = st.density.try_value(&p)?[0];
                let u = match &st.potential {
                    Some(u) => u.try_value(&p)?[0],
                    None => 0.0,
                };
                let v2: f64 = self.spec.velocity(t, x).iter().map(|c| c * c).sum();
                Ok(u + 0.5 * rho * v2 + pi)
            }
            _ => Err(Error::UnknownName(key.into())),
        }
    }
}

/// A builtin scenario by name.
pub fn builtin(name: &str) -> Result<Scenario> {
    let (_, src) = BUILTIN_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownName(name.into()))?;
    Scenario::from_text(src)
}

/// Source text of a builtin scenario.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
}

/// Reads, parses and verifies a scenario file.
pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_text(&text)
}
