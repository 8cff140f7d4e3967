//! Integral-invariant reports: `C(t) = ∫_{c(t)} α` along a flow.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::advect::{advect_chain, AdvectedChainFamily, Flow, DEFAULT_STEPS};
use super::chain::GeometricChain;
use super::quadrature::DEFAULT_ORDER;
use super::shapes;
use crate::error::{Error, Result};
use crate::forms::{algebra, exterior_derivative, interior_product, lie_derivative, FormField};
use crate::kinematics::VectorFieldSpec;

pub const ABSOLUTE_TOLERANCE: f64 = 1e-7;
pub const RELATIVE_TOLERANCE: f64 = 1e-6;
pub const RATE_TOLERANCE: f64 = 1e-5;
pub const LIE_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantClass {
    Absolute,
    Relative,
    #[serde(rename = "none")]
    NotInvariant,
}

impl std::fmt::Display for InvariantClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InvariantClass::Absolute => "absolute",
            InvariantClass::Relative => "relative",
            InvariantClass::NotInvariant => "none",
        })
    }
}

#[derive(Clone, Debug)]
pub struct InvariantOptions {
    pub order: usize,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            order: DEFAULT_ORDER,
            steps: DEFAULT_STEPS,
            samples: LIE_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl NamedCheck {
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        NamedCheck {
            name: name.into(),
            value,
            threshold,
            pass: value.is_finite() && value < threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeDrift {
    pub label: String,
    pub is_cycle: bool,
    pub initial: f64,
    pub drift: f64,
}

/// `β` with `L_u α = dβ`, given as the formula used and its sampled residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaWitness {
    pub formula: String,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub form_degree: usize,
    pub chain_is_cycle: bool,
    pub times: Vec<f64>,
    pub series: Vec<f64>,
    pub lhs_drift: f64,
    pub lie_integral: Vec<f64>,
    /// `dC/dt` by finite differences of the series.
    pub rate: Vec<f64>,
    pub rate_residual: f64,
    pub lie_max_norm: f64,
    pub probes: Vec<ProbeDrift>,
    pub classification: InvariantClass,
    pub beta_witness: Option<BetaWitness>,
    pub checks: Vec<NamedCheck>,
}

impl InvariantReport {
    pub fn initial(&self) -> f64 {
        self.series[0]
    }

    /// Drift relative to `1 + |C(t₀)|`.
    pub fn relative_drift(&self) -> f64 {
        self.lhs_drift / (1.0 + self.initial().abs())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `t, C(t), ∫ L_u α` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.to_string());
        out.write_record(["t", "C", "lie_integral", "rate"])
            .map_err(io)?;
        for i in 0..self.times.len() {
            out.write_record([
                format!("{:e}", self.times[i]),
                format!("{:e}", self.series[i]),
                format!("{:e}", self.lie_integral[i]),
                format!("{:e}", self.rate[i]),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// First derivative of equally spaced samples, fourth order throughout.
pub fn sample_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    if n < 5 {
        return (0..n)
            .map(|i| {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                if a == b {
                    0.0
                } else {
                    (f[b] - f[a]) / ((b - a) as f64 * h)
                }
            })
            .collect();
    }
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]
            } else if i == 1 {
                -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]
            } else if i == n - 2 {
                3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
            } else if i == n - 1 {
                25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
                    + 3.0 * f[n - 5]
            } else {
                f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]
            };
            d / (12.0 * h)
        })
        .collect()
}

/// A form on spacetime slots, lifting purely spatial forms.
fn spacetime_form(alpha: &FormField, n: usize) -> Result<FormField> {
    if alpha.dim() == n + 1 && alpha.0.has_time_slot() {
        Ok(alpha.clone())
    } else if alpha.dim() == n {
        Ok(alpha.lift_time())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            found: alpha.dim(),
        })
    }
}

fn series_of(family: &AdvectedChainFamily, alpha_st: &FormField) -> Result<Vec<f64>> {
    family
        .times
        .iter()
        .zip(&family.snapshots)
        .map(|(&t, c)| c.integrate(&alpha_st.at_time(t), family.order))
        .collect()
}

fn drift(series: &[f64]) -> f64 {
    series
        .iter()
        .map(|c| (c - series[0]).abs())
        .fold(0.0, f64::max)
}

/// Random spacetime points in the box swept by the chain, avoiding exclusions.
fn sample_points(
    family: &AdvectedChainFamily,
    spec: &VectorFieldSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = spec.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for snap in &family.snapshots {
        for x in snap.node_points(family.order)? {
            for i in 0..n {
                lo[i] = lo[i].min(x[i]);
                hi[i] = hi[i].max(x[i]);
            }
        }
    }
    for i in 0..n {
        let pad = 0.1 * (hi[i] - lo[i]) + 0.1;
        lo[i] -= pad;
        hi[i] += pad;
    }
    let margin = 8.0 * crate::forms::DEFAULT_STEP;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 100 * count {
        tries += 1;
        let t = family.t0 + (family.t1 - family.t0) * rng.random_range(0.0..=1.0);
        let x: Vec<f64> = (0..n).map(|i| rng.random_range(lo[i]..=hi[i])).collect();
        if spec
            .exclusions()
            .iter()
            .any(|e| e.distance(&x) < e.radius + margin)
        {
            continue;
        }
        out.push((t, x));
    }
    if out.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(out)
}

fn spacetime_point(t: f64, x: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(x.len() + 1);
    p.push(t);
    p.extend_from_slice(x);
    p
}

/// Max over samples of the spatial components of a spacetime form.
fn spatial_max(form: &FormField, samples: &[(f64, Vec<f64>)]) -> f64 {
    let n1 = form.dim();
    let keep: Vec<usize> = algebra::multi_indices(n1, form.degree())
        .iter()
        .enumerate()
        .filter(|(_, idx)| !idx.contains(&0))
        .map(|(i, _)| i)
        .collect();
    samples
        .iter()
        .map(|(t, x)| {
            let v = form.value(&spacetime_point(*t, x));
            keep.iter().map(|&i| v[i].abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Candidate probe chains near `x`: a `k`-cube and the boundary of a `(k+1)`-cube,
/// along each coordinate direction in turn.
fn probe_candidates(x: &[f64], k: usize, cycle: bool, size: f64) -> Vec<GeometricChain> {
    let n = x.len();
    let mut out = Vec::new();
    let dim = if cycle { k + 1 } else { k };
    if dim > n || (cycle && k == 0) {
        return out;
    }
    for sign in [1.0, -1.0] {
        for shift in 0..n {
            let edges: Vec<Vec<f64>> = (0..dim)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[(shift + j) % n] = sign * size;
                    e
                })
                .collect();
            let cube = GeometricChain::single(shapes::affine(x.to_vec(), edges));
            if cycle {
                if let Ok(b) = cube.boundary() {
                    out.push(b);
                }
            } else {
                out.push(cube);
            }
        }
    }
    out
}

/// The candidate probe whose integral drifts the most.
fn drifting_probe(
    candidates: Vec<GeometricChain>,
    flow: &Arc<dyn Flow>,
    alpha_st: &FormField,
    t0: f64,
    t1: f64,
    opts: &InvariantOptions,
) -> Option<Vec<f64>> {
    let mut best: Option<Vec<f64>> = None;
    for c in candidates {
        let Ok(family) = advect_chain(&c, flow.clone(), t0, t1, opts.steps, opts.order) else {
            continue;
        };
        let Ok(series) = series_of(&family, alpha_st) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| drift(&series) > drift(b)) {
            best = Some(series);
        }
    }
    best
}

/// Tracks `∫ α` over the chain carried by `spec`, checks the transport
/// identity `dC/dt = ∫ L_u α`, and classifies `α` as an integral invariant.
pub fn invariant_report(
    alpha: &FormField,
    spec: &VectorFieldSpec,
    c: &GeometricChain,
    t0: f64,
    t1: f64,
    opts: &InvariantOptions,
) -> Result<InvariantReport> {
    let n = spec.dim();
    if alpha.degree() != c.degree() {
        return Err(Error::DegreeMismatch {
            expected: c.degree(),
            found: alpha.degree(),
        });
    }
    let alpha_st = spacetime_form(alpha, n)?;
    let flow: Arc<dyn Flow> = Arc::new(spec.clone());
    let family = advect_chain(c, flow.clone(), t0, t1, opts.steps, opts.order)?;
    let series = series_of(&family, &alpha_st)?;
    let lhs_drift = drift(&series);

    let u = spec.spacetime_velocity();
    let lie = lie_derivative(u, &alpha_st)?;
    let lie_integral = family
        .times
        .iter()
        .zip(&family.snapshots)
        .map(|(&t, s)| s.integrate(&lie.at_time(t), opts.order))
        .collect::<Result<Vec<_>>>()?;
    let h = (t1 - t0) / opts.steps as f64;
    let rate = sample_derivative(&series, h);
    let interior = 1..series.len().saturating_sub(1);
    let rate_residual = interior
        .map(|i| (rate[i] - lie_integral[i]).abs() / (1.0 + lie_integral[i].abs()))
        .fold(0.0, f64::max);

    let samples = sample_points(&family, spec, opts.samples, opts.seed)?;
    let lie_max_norm = if lie.is_identically_zero() {
        0.0
    } else {
        spatial_max(&lie, &samples)
    };

    let k = c.degree();
    let chain_is_cycle = c.is_cycle(1e-8).unwrap_or(false);
    let anchor = c
        .node_points(opts.order)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Structural("empty chain".into()))?;
    let scale = 0.25;
    let mut probes = vec![ProbeDrift {
        label: "chain".into(),
        is_cycle: chain_is_cycle,
        initial: series[0],
        drift: lhs_drift,
    }];
    let extra = drifting_probe(
        probe_candidates(&anchor, k, !chain_is_cycle, scale),
        &flow,
        &alpha_st,
        t0,
        t1,
        opts,
    );
    if let Some(s) = extra {
        probes.push(ProbeDrift {
            label: if chain_is_cycle {
                "segment"
            } else {
                "cube boundary"
            }
            .into(),
            is_cycle: !chain_is_cycle,
            initial: s[0],
            drift: drift(&s),
        });
    }

    let classification = if lie_max_norm < ABSOLUTE_TOLERANCE {
        InvariantClass::Absolute
    } else {
        let bound = |p: &ProbeDrift| RELATIVE_TOLERANCE * (1.0 + p.initial.abs());
        let cycles: Vec<&ProbeDrift> = probes.iter().filter(|p| p.is_cycle).collect();
        let cycles_ok = !cycles.is_empty() && cycles.iter().all(|p| p.drift < bound(p));
        let others_drift = probes.iter().any(|p| !p.is_cycle && p.drift >= bound(p));
        if k > 0 && cycles_ok && others_drift {
            InvariantClass::Relative
        } else {
            InvariantClass::NotInvariant
        }
    };

    let beta_witness = if classification == InvariantClass::Relative {
        let beta = interior_product(u, &alpha_st)?;
        let residual = lie.sub(&exterior_derivative(&beta))?;
        let max_residual = spatial_max(&residual, &samples);
        (max_residual < RELATIVE_TOLERANCE * (1.0 + lie_max_norm)).then(|| BetaWitness {
            formula: "i_u α".into(),
            max_residual,
        })
    } else {
        None
    };

    let checks = vec![NamedCheck::below(
        "rate_agreement",
        rate_residual,
        RATE_TOLERANCE,
    )];
    Ok(InvariantReport {
        form_degree: alpha.degree(),
        chain_is_cycle,
        times: family.times,
        series,
        lhs_drift,
        lie_integral,
        rate,
        rate_residual,
        lie_max_norm,
        probes,
        classification,
        beta_witness,
        checks,
    })
}
