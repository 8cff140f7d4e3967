//! Balance-law residuals for analytic fluid states.
//!
//! Every check evaluates a balance identity pointwise on a masked grid (or
//! over a chain) and reports residual statistics against the mixed tolerance
//! `atol + rtol·scale`, where `scale` is the largest term in the identity.

mod state;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{
    divergence, exterior_derivative, interior_product, lie_derivative, scale_by, scale_multivector,
    sharp, wedge, FormField,
};
use crate::grid::{Grid, STENCIL_MARGIN};
use crate::integrate::{trajectory, GeometricChain, Marker, NamedCheck};
use crate::kinematics::{covelocity, INCOMPRESSIBLE_TOLERANCE};

pub use state::{
    spacetime_scalar, EquationOfState, FluidState, SampleMask, Tolerance, DEFAULT_ATOL,
    DEFAULT_RTOL,
};

/// Threshold on `|dρ ∧ dπ|` for a barotropic state.
pub const BAROTROPIC_TOLERANCE: f64 = 1e-8;

/// Time step of the central difference used for `dM/dt`.
pub const MASS_TIME_STEP: f64 = 1e-3;

pub(crate) fn tx(t: f64, x: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(x.len() + 1);
    p.push(t);
    p.extend_from_slice(x);
    p
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainResidual {
    pub label: String,
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub name: String,
    pub applicable: bool,
    pub note: String,
    pub sample_count: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub max_scale: f64,
    /// Largest `residual / (atol + rtol·scale)`; at most 1 when passing.
    pub worst_ratio: f64,
    pub pass: bool,
    pub checks: Vec<NamedCheck>,
    pub chain_residuals: Vec<ChainResidual>,
}

impl BalanceReport {
    fn not_applicable(name: &str, note: impl Into<String>) -> Self {
        BalanceReport {
            name: name.into(),
            applicable: false,
            note: note.into(),
            sample_count: 0,
            max_residual: 0.0,
            mean_residual: 0.0,
            max_scale: 0.0,
            worst_ratio: 0.0,
            pass: true,
            checks: Vec::new(),
            chain_residuals: Vec::new(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&NamedCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Running statistics of `(residual, scale)` pairs.
#[derive(Clone, Debug)]
struct Accumulator {
    tol: Tolerance,
    count: usize,
    max: f64,
    sum: f64,
    max_scale: f64,
    worst: f64,
}

impl Accumulator {
    fn new(tol: Tolerance) -> Self {
        Accumulator {
            tol,
            count: 0,
            max: 0.0,
            sum: 0.0,
            max_scale: 0.0,
            worst: 0.0,
        }
    }

    fn add(&mut self, residual: f64, scale: f64) {
        let r = if residual.is_finite() {
            residual.abs()
        } else {
            f64::INFINITY
        };
        self.count += 1;
        self.max = self.max.max(r);
        self.sum += r;
        self.max_scale = self.max_scale.max(scale.abs());
        self.worst = self.worst.max(r / self.tol.bound(scale));
    }

    fn pass(&self) -> bool {
        self.worst <= 1.0
    }

    /// Summary as a check: worst ratio against 1.
    fn as_check(&self, name: &str) -> NamedCheck {
        NamedCheck {
            name: name.into(),
            value: self.max,
            threshold: self.tol.bound(self.max_scale),
            pass: self.pass(),
        }
    }

    fn into_report(self, name: &str, note: String, checks: Vec<NamedCheck>) -> BalanceReport {
        let pass = self.pass() && checks.iter().all(|c| c.pass || c.name.starts_with("info:"));
        BalanceReport {
            name: name.into(),
            applicable: true,
            note,
            sample_count: self.count,
            max_residual: self.max,
            mean_residual: if self.count > 0 {
                self.sum / self.count as f64
            } else {
                0.0
            },
            max_scale: self.max_scale,
            worst_ratio: self.worst,
            pass,
            checks,
            chain_residuals: Vec::new(),
        }
    }
}

/// Grid points clear of every exclusion zone by the stencil margin.
pub fn sample_points(state: &FluidState, grid: &Grid) -> Result<Vec<Vec<f64>>> {
    if grid.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: grid.dim(),
        });
    }
    let mut pts = grid.masked(state.spec.exclusions(), STENCIL_MARGIN);
    if let Some(keep) = &state.mask {
        pts.retain(|x| keep(x));
    }
    if pts.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(pts)
}

/// Evaluates `f` at every point in parallel, keeping grid order.
fn sweep<T: Send>(
    points: &[Vec<f64>],
    f: impl Fn(&[f64]) -> Result<T> + Send + Sync,
) -> Result<Vec<T>> {
    points
        .par_iter()
        .map(|x| f(x))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn scalar_at(f: &FormField, p: &[f64]) -> Result<f64> {
    Ok(f.try_value(p)?[0])
}

/// `∂_a f` over all spacetime slots.
fn gradient_at(f: &FormField, p: &[f64]) -> Result<Vec<f64>> {
    Ok(f.0.try_jacobian(p)?.into_iter().map(|row| row[0]).collect())
}

/// Local kinematic data at one spacetime point.
struct Local {
    rho: f64,
    v: Vec<f64>,
    /// `∂_j vⁱ` as `[j][i]`.
    jac: Vec<Vec<f64>>,
    dtv: Vec<f64>,
    div: f64,
    speed2: f64,
}

fn local(state: &FluidState, t: f64, x: &[f64]) -> Result<Local> {
    state.spec.check_point(x)?;
    let p = tx(t, x);
    let rho = scalar_at(&state.density, &p)?;
    if rho <= 0.0 {
        return Err(Error::Precondition(format!(
            "density {rho} is not positive at {x:?}, t = {t}"
        )));
    }
    let v = state.spec.velocity(t, x);
    let jac = state.spec.spatial_jacobian(t, x);
    let dtv = state.spec.time_derivative(t, x);
    let div = (0..v.len()).map(|i| jac[i][i]).sum();
    let speed2 = v.iter().map(|c| c * c).sum();
    Ok(Local {
        rho,
        v,
        jac,
        dtv,
        div,
        speed2,
    })
}

/// `∂_t v_i + vʲ ∂_j v_i`.
fn acceleration(l: &Local) -> Vec<f64> {
    let n = l.v.len();
    (0..n)
        .map(|i| l.dtv[i] + (0..n).map(|j| l.v[j] * l.jac[j][i]).sum::<f64>())
        .collect()
}

/// Spacetime 0-form `½ρv²`.
fn kinetic_energy(state: &FluidState) -> FormField {
    let (rho, spec) = (state.density.clone(), state.spec.clone());
    spacetime_scalar(state.dim(), &state.spec, move |t, x| {
        let v = spec.velocity(t, x);
        0.5 * rho.value(&tx(t, x))[0] * v.iter().map(|c| c * c).sum::<f64>()
    })
}

fn combine(terms: &[(f64, &FormField)]) -> Result<FormField> {
    let fields: Vec<(f64, &crate::forms::Field)> = terms.iter().map(|(c, f)| (*c, &f.0)).collect();
    crate::forms::Field::linear_combination(&fields).map(FormField)
}

/// Continuity `∂_tρ + div(ρv) = 0`, with the Lie form `L_vρ + ρ div v = 0`.
///
/// The main residual is the spacetime divergence of the mass flux `ρ(∂_t + v)`;
/// the Lie form is evaluated independently from `L_vρ` and the velocity gradient.
pub fn continuity_residual(state: &FluidState, grid: &Grid, t: f64) -> Result<BalanceReport> {
    let points = sample_points(state, grid)?;
    let u = state.spec.spacetime_velocity();
    let flux = scale_multivector(&state.density, u)?;
    let div_flux = divergence(&flux)?;
    let lie_rho = lie_derivative(u, &state.density)?;
    let rows = sweep(&points, |x| {
        let l = local(state, t, x)?;
        let p = tx(t, x);
        let grad = gradient_at(&state.density, &p)?;
        let transport: f64 = (0..l.v.len()).map(|i| l.v[i] * grad[i + 1]).sum();
        let scale = grad[0]
            .abs()
            .max(transport.abs())
            .max((l.rho * l.div).abs());
        let route1 = div_flux.try_value(&p)?[0];
        let route2 = lie_rho.try_value(&p)?[0] + l.rho * l.div;
        Ok((route1, route2, scale, l.rho))
    })?;
    let tol = state.tolerance;
    let mut main = Accumulator::new(tol);
    let mut lie = Accumulator::new(tol);
    let mut per_mass = Accumulator::new(tol);
    let mut agree = Accumulator::new(tol);
    for &(r1, r2, s, rho) in &rows {
        main.add(r1, s);
        lie.add(r2, s);
        per_mass.add(r2 / rho, s / rho);
        agree.add(r1 - r2, s);
    }
    let checks = vec![
        lie.as_check("lie_form"),
        per_mass.as_check("per_mass_lie_form"),
        agree.as_check("route_agreement"),
    ];
    Ok(main.into_report("continuity", String::new(), checks))
}

/// Mass balance on an `n`-chain: `dM/dt + Φ(∂c) = 0` with `M = ∫ ρ V` and
/// `Φ = ∫ #(ρv)`; `dM/dt` by a five-point central difference in time.
pub fn mass_balance_cochain(
    state: &FluidState,
    chain: &GeometricChain,
    t: f64,
    order: usize,
) -> Result<BalanceReport> {
    let n = state.dim();
    if chain.degree() != n || chain.ambient() != n {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: chain.degree(),
        });
    }
    let mass = |s: f64| -> Result<f64> {
        let rho = state.density.at_time(s);
        chain.integrate(&scale_by(&rho, &FormField::volume(n))?, order)
    };
    let h = MASS_TIME_STEP;
    let m = [
        mass(t - 2.0 * h)?,
        mass(t - h)?,
        mass(t)?,
        mass(t + h)?,
        mass(t + 2.0 * h)?,
    ];
    let mdot = (m[0] - 8.0 * m[1] + 8.0 * m[3] - m[4]) / (12.0 * h);
    let rho = state.density.at_time(t);
    let flux = sharp(&scale_multivector(&rho, &state.spec.spatial_velocity(t))?);
    let phi = chain.boundary()?.integrate(&flux, order)?;
    let residual = mdot + phi;
    let scale = mdot.abs().max(phi.abs());
    let mut acc = Accumulator::new(state.tolerance);
    acc.add(residual, scale);
    let checks = vec![
        NamedCheck::below("info:mass", m[2].abs(), f64::INFINITY),
        NamedCheck::below("info:mass_rate", mdot.abs(), f64::INFINITY),
        NamedCheck::below("info:boundary_flux", phi.abs(), f64::INFINITY),
    ];
    let mut report = acc.into_report(
        "mass_balance",
        format!("dM/dt = {mdot:.12e}, flux = {phi:.12e}"),
        checks,
    );
    report.chain_residuals.push(ChainResidual {
        label: "chain".into(),
        residual: residual.abs(),
        scale,
        pass: report.pass,
    });
    Ok(report)
}

/// Momentum balance `ρ dv_s/dt = F − d_sπ`.
///
/// Also checks the per-mass form, the Lie form
/// `L_v p = F + d(½ρv² − π) − ½v²dρ − ρ(div v)v` (spatial components, with
/// `p = ρ·covelocity` and the spacetime Lie derivative), and reports the
/// temporal balance `F₀ + ½ρ∂_tv² − ∂_tπ`.
pub fn euler_residual(state: &FluidState, grid: &Grid, t: f64) -> Result<BalanceReport> {
    let Some(pressure) = state.pressure.as_ref() else {
        return Ok(BalanceReport::not_applicable("euler", "no pressure field"));
    };
    let points = sample_points(state, grid)?;
    let n = state.dim();
    let u = state.spec.spacetime_velocity();
    let p_form = scale_by(&state.density, &covelocity(&state.spec)?)?;
    let lie_p = lie_derivative(u, &p_form)?;
    let potential = combine(&[(1.0, &kinetic_energy(state)), (-1.0, pressure)])?;
    let d_potential = exterior_derivative(&potential);
    let rows = sweep(&points, |x| {
        let l = local(state, t, x)?;
        let p = tx(t, x);
        let f = state.force_at(&p)?;
        let dpi = gradient_at(pressure, &p)?;
        let drho = gradient_at(&state.density, &p)?;
        let a = acceleration(&l);
        let mut r1 = 0.0f64;
        let mut s1 = 0.0f64;
        for i in 0..n {
            let terms = [l.rho * a[i], f[i + 1], dpi[i + 1]];
            r1 = r1.max((terms[0] - terms[1] + terms[2]).abs());
            s1 = s1.max(max_abs(&terms));
        }
        let lp = lie_p.try_value(&p)?;
        let dk = d_potential.try_value(&p)?;
        let mut r2 = 0.0f64;
        let mut s2 = 0.0f64;
        for i in 0..n {
            let rhs = [
                f[i + 1],
                dk[i + 1],
                -0.5 * l.speed2 * drho[i + 1],
                -l.rho * l.div * l.v[i],
            ];
            r2 = r2.max((lp[i + 1] - rhs.iter().sum::<f64>()).abs());
            s2 = s2.max(lp[i + 1].abs()).max(max_abs(&rhs));
        }
        let dt_speed2: f64 = 2.0 * (0..n).map(|i| l.v[i] * l.dtv[i]).sum::<f64>();
        let temporal = [f[0], 0.5 * l.rho * dt_speed2, -dpi[0]];
        Ok((
            r1,
            s1,
            l.rho,
            r2,
            s2,
            temporal.iter().sum::<f64>(),
            max_abs(&temporal),
        ))
    })?;
    let tol = state.tolerance;
    let mut main = Accumulator::new(tol);
    let mut per_mass = Accumulator::new(tol);
    let mut lie = Accumulator::new(tol);
    let mut temporal = Accumulator::new(tol);
    for &(r1, s1, rho, r2, s2, rt, st) in &rows {
        main.add(r1, s1);
        per_mass.add(r1 / rho, s1 / rho);
        lie.add(r2, s2);
        temporal.add(rt, st);
    }
    let mut t_check = temporal.as_check("temporal");
    if !state.spec.is_steady() {
        t_check.name = "info:temporal".into();
    }
    let checks = vec![
        per_mass.as_check("per_mass"),
        lie.as_check("lie_form"),
        t_check,
    ];
    Ok(main.into_report("euler", String::new(), checks))
}

/// Power balance `i_vF = L_v(½ρv² + π) + ½ρ(div v)v² − ∂_tπ`.
///
/// The `−∂_tπ` term comes from `L_vπ = ∂_tπ + v·∇π`; the identity without it
/// is reported as `info:literal` and agrees for steady pressure. With a
/// potential force the head rate `L_vH + ½ρ(div v)v² − ∂_t(π + U)` is checked
/// as well.
pub fn power_balance_residual(state: &FluidState, grid: &Grid, t: f64) -> Result<BalanceReport> {
    let Some(pressure) = state.pressure.as_ref() else {
        return Ok(BalanceReport::not_applicable("power", "no pressure field"));
    };
    let points = sample_points(state, grid)?;
    let n = state.dim();
    let u = state.spec.spacetime_velocity();
    let energy = combine(&[(1.0, &kinetic_energy(state)), (1.0, pressure)])?;
    let lie_energy = lie_derivative(u, &energy)?;
    let head = match &state.potential {
        Some(pot) => Some((
            lie_derivative(u, &combine(&[(1.0, &energy), (1.0, pot)])?)?,
            pot,
        )),
        None => None,
    };
    let rows = sweep(&points, |x| {
        let l = local(state, t, x)?;
        let p = tx(t, x);
        let f = state.force_at(&p)?;
        let dpi = gradient_at(pressure, &p)?;
        let power: f64 = (0..n).map(|i| l.v[i] * f[i + 1]).sum();
        let le = lie_energy.try_value(&p)?[0];
        let dil = 0.5 * l.rho * l.div * l.speed2;
        let terms = [power, le, dil, dpi[0]];
        let corrected = power - (le + dil - dpi[0]);
        let literal = power - (le + dil);
        let head_row = match &head {
            Some((lie_h, pot)) => {
                let lh = lie_h.try_value(&p)?[0];
                let du = gradient_at(pot, &p)?;
                let terms = [lh, dil, dpi[0], du[0]];
                Some((lh + dil - dpi[0] - du[0], max_abs(&terms)))
            }
            None => None,
        };
        Ok((corrected, literal, max_abs(&terms), head_row))
    })?;
    let tol = state.tolerance;
    let mut main = Accumulator::new(tol);
    let mut literal = Accumulator::new(tol);
    let mut head_acc = Accumulator::new(tol);
    for (c, lit, s, h) in &rows {
        main.add(*c, *s);
        literal.add(*lit, *s);
        if let Some((r, hs)) = h {
            head_acc.add(*r, *hs);
        }
    }
    let mut checks = vec![literal.as_check("info:literal")];
    if head.is_some() {
        checks.push(head_acc.as_check("head_rate"));
    }
    let mut note = String::new();
    let euler = euler_residual(state, grid, t)?;
    if euler.applicable && !euler.pass {
        note = format!(
            "warning: euler residual {:.3e} exceeds tolerance",
            euler.max_residual
        );
    }
    Ok(main.into_report("power", note, checks))
}

/// Total head `U + ½ρv² + π` along streamlines of a steady, incompressible,
/// conservative-force state.
///
/// Each seed is traced for time `span` with `steps` RK4 steps; the report
/// lists the head deviation per streamline. States violating a precondition
/// yield a not-applicable report naming it.
pub fn bernoulli_check(
    state: &FluidState,
    seeds: &[Vec<f64>],
    span: f64,
    steps: usize,
) -> Result<BalanceReport> {
    let Some(pressure) = state.pressure.as_ref() else {
        return Ok(BalanceReport::not_applicable(
            "bernoulli",
            "no pressure field",
        ));
    };
    if !state.spec.is_steady() {
        return Ok(BalanceReport::not_applicable(
            "bernoulli",
            "flow is not steady",
        ));
    }
    if !state.has_conservative_force() {
        return Ok(BalanceReport::not_applicable(
            "bernoulli",
            "force has no potential",
        ));
    }
    let t = 0.0;
    let mut lines = Vec::with_capacity(seeds.len());
    for (k, seed) in seeds.iter().enumerate() {
        let tr = trajectory(
            &state.spec,
            Marker {
                x: seed.clone(),
                tangents: Vec::new(),
            },
            t,
            t + span,
            steps,
        )
        .map_err(|(time, reason)| Error::Advection {
            node: k,
            time,
            reason,
        })?;
        lines.push(tr.into_iter().map(|m| m.x).collect::<Vec<_>>());
    }
    let mut max_div = 0.0f64;
    for x in lines.iter().flatten() {
        max_div = max_div.max(local(state, t, x)?.div.abs());
    }
    if max_div >= INCOMPRESSIBLE_TOLERANCE {
        return Ok(BalanceReport::not_applicable(
            "bernoulli",
            format!("flow is not incompressible (|div v| = {max_div:.3e})"),
        ));
    }
    let head = |x: &[f64]| -> Result<f64> {
        let l = local(state, t, x)?;
        let p = tx(t, x);
        let u = match &state.potential {
            Some(pot) => scalar_at(pot, &p)?,
            None => 0.0,
        };
        Ok(u + 0.5 * l.rho * l.speed2 + scalar_at(pressure, &p)?)
    };
    let mut acc = Accumulator::new(state.tolerance);
    let mut chain_residuals = Vec::new();
    let mut initial = Vec::new();
    for (k, line) in lines.iter().enumerate() {
        let heads = line.iter().map(|x| head(x)).collect::<Result<Vec<_>>>()?;
        let h0 = heads[0];
        let dev = heads.iter().fold(0.0f64, |m, h| m.max((h - h0).abs()));
        for h in &heads {
            acc.add(h - h0, h0);
        }
        chain_residuals.push(ChainResidual {
            label: format!("streamline {k}"),
            residual: dev,
            scale: h0.abs(),
            pass: dev <= state.tolerance.bound(h0),
        });
        initial.push(h0);
    }
    let spread = initial.iter().fold(0.0f64, |m, a| {
        initial.iter().fold(m, |m, b| m.max((a - b).abs()))
    });
    let checks = vec![NamedCheck::below(
        "info:cross_streamline_spread",
        spread,
        state.tolerance.bound(max_abs(&initial)),
    )];
    let mut report = acc.into_report("bernoulli", String::new(), checks);
    report.chain_residuals = chain_residuals;
    Ok(report)
}

/// The Magnus force density `i_pΩ` with `p = ρ(∂_t + v)` and `Ω` the spacetime
/// vorticity, and the residual of `i_pΩ = F − d(½ρv² + π) + ½v²dρ` (spatial
/// components). For a potential force also checks `i_pΩ = −dH + ½v²dρ`, and
/// always `i_v i_pΩ = 0`.
pub fn magnus_force(state: &FluidState, grid: &Grid, t: f64) -> Result<(FormField, BalanceReport)> {
    let u = state.spec.spacetime_velocity();
    let omega = exterior_derivative(&covelocity(&state.spec)?);
    let momentum = scale_multivector(&state.density, u)?;
    let magnus = interior_product(&momentum, &omega)?;
    let Some(pressure) = state.pressure.as_ref() else {
        return Ok((
            magnus,
            BalanceReport::not_applicable("magnus", "no pressure field"),
        ));
    };
    let points = sample_points(state, grid)?;
    let n = state.dim();
    let energy = combine(&[(1.0, &kinetic_energy(state)), (1.0, pressure)])?;
    let d_energy = exterior_derivative(&energy);
    let d_head = match &state.potential {
        Some(pot) => Some(exterior_derivative(&combine(&[
            (1.0, &energy),
            (1.0, pot),
        ])?)),
        None => None,
    };
    let rows = sweep(&points, |x| {
        let l = local(state, t, x)?;
        let p = tx(t, x);
        let f = state.force_at(&p)?;
        let m = magnus.try_value(&p)?;
        let de = d_energy.try_value(&p)?;
        let drho = gradient_at(&state.density, &p)?;
        let dh = match &d_head {
            Some(d) => Some(d.try_value(&p)?),
            None => None,
        };
        let (mut r, mut s, mut rh, mut sh) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 1..=n {
            let half = 0.5 * l.speed2 * drho[i];
            let terms = [f[i], de[i], half];
            r = r.max((m[i] - (f[i] - de[i] + half)).abs());
            s = s.max(m[i].abs()).max(max_abs(&terms));
            if let Some(dh) = &dh {
                rh = rh.max((m[i] - (-dh[i] + half)).abs());
                sh = sh.max(m[i].abs()).max(dh[i].abs()).max(half.abs());
            }
        }
        let along = m[0] + (0..n).map(|i| l.v[i] * m[i + 1]).sum::<f64>();
        let along_scale = max_abs(&m) * (1.0 + l.speed2.sqrt());
        Ok((r, s, rh, sh, along, along_scale))
    })?;
    let tol = state.tolerance;
    let mut main = Accumulator::new(tol);
    let mut cons = Accumulator::new(tol);
    let mut orth = Accumulator::new(tol);
    for &(r, s, rh, sh, a, sa) in &rows {
        main.add(r, s);
        cons.add(rh, sh);
        orth.add(a, sa);
    }
    let mut checks = vec![orth.as_check("orthogonal")];
    if d_head.is_some() {
        checks.push(cons.as_check("conservative_form"));
    }
    Ok((magnus, main.into_report("magnus", String::new(), checks)))
}

/// Barotropy test `dρ ∧ dπ = 0` on spatial slices.
///
/// Also reports `d((1/ρ)dπ)` and, when an equation of state is attached, the
/// mismatch `ρ − eos(π)`.
pub fn barotropic_check(state: &FluidState, grid: &Grid, t: f64) -> Result<BalanceReport> {
    let Some(pressure) = state.pressure.as_ref() else {
        return Ok(BalanceReport::not_applicable(
            "barotropic",
            "no pressure field",
        ));
    };
    let points = sample_points(state, grid)?;
    let n = state.dim();
    let rho_t = state.density.at_time(t);
    let pi_t = pressure.at_time(t);
    let drho = exterior_derivative(&rho_t);
    let dpi = exterior_derivative(&pi_t);
    let cross = if n >= 2 {
        Some(wedge(&drho, &dpi)?)
    } else {
        None
    };
    let r = rho_t.clone();
    let inv_rho =
        FormField::scalar(n, move |x| 1.0 / r.value(x)[0]).with_domain(rho_t.0.domain().clone());
    let specific = scale_by(&inv_rho, &dpi)?;
    let d_specific = if n >= 2 {
        Some(exterior_derivative(&specific))
    } else {
        None
    };
    let rows = sweep(&points, |x| {
        state.spec.check_point(x)?;
        let c = match &cross {
            Some(w) => max_abs(&w.try_value(x)?),
            None => 0.0,
        };
        let ds = match &d_specific {
            Some(d) => max_abs(&d.try_value(x)?),
            None => 0.0,
        };
        let eos = match &state.eos {
            Some(eos) => {
                let rho = scalar_at(&rho_t, x)?;
                Some(((rho - eos(scalar_at(&pi_t, x)?)).abs(), rho))
            }
            None => None,
        };
        Ok((c, ds, eos))
    })?;
    let absolute = Tolerance {
        atol: BAROTROPIC_TOLERANCE,
        rtol: 0.0,
    };
    let mut main = Accumulator::new(absolute);
    let mut closed = Accumulator::new(state.tolerance);
    let mut eos_acc = Accumulator::new(state.tolerance);
    for (c, ds, eos) in &rows {
        main.add(*c, 0.0);
        closed.add(*ds, 0.0);
        if let Some((r, s)) = eos {
            eos_acc.add(*r, *s);
        }
    }
    let mut checks = vec![{
        let mut c = closed.as_check("info:specific_pressure_closed");
        c.threshold = 1e-6;
        c.pass = closed.max < 1e-6;
        c
    }];
    if state.eos.is_some() {
        checks.push(eos_acc.as_check("equation_of_state"));
    }
    Ok(main.into_report("barotropic", String::new(), checks))
}

/// Work `∫_c F` of the spatial force density at time `t`.
pub fn work(state: &FluidState, chain: &GeometricChain, t: f64, order: usize) -> Result<f64> {
    if chain.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: chain.degree(),
        });
    }
    match &state.force {
        Some(f) => chain.integrate(&f.at_time(t), order),
        None => Ok(0.0),
    }
}
