use std::sync::Arc;

use super::algebra::{self, index_of, multi_indices};
use super::field::{EvalFn, Field, FormField, JacFn, MultiVectorField};
use crate::error::{Error, Result};

fn check_dims(a: &Field, b: &Field) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Applies a pointwise linear map to values and, when present, partials.
fn map_linear(
    src: &Field,
    out_degree: usize,
    f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
) -> Field {
    let f = Arc::new(f);
    let eval = src.eval_fn().clone();
    let f1 = f.clone();
    let e: EvalFn = Arc::new(move |x| f1(&eval(x)));
    let jac = src.jac_fn().cloned().map(|j| {
        let jf: JacFn = Arc::new(move |x| j(x).iter().map(|row| f(row)).collect());
        jf
    });
    let mut out = Field::from_parts(src.dim(), out_degree, e, jac, src.domain().clone())
        .with_step(src.step());
    if src.is_identically_zero() {
        out = out.mark_zero();
    }
    out
}

/// Exterior derivative `(dα)_J = Σ_p (-1)^p ∂_{J_p} α_{J∖J_p}`.
///
/// A top-degree input yields the empty `(k+1)`-form flagged identically zero.
pub fn exterior_derivative(alpha: &FormField) -> FormField {
    let a = &alpha.0;
    let (n, k) = (a.dim(), a.degree());
    if k >= n || a.is_identically_zero() {
        let z = Field::zero(n, k + 1)
            .with_domain(a.domain().clone())
            .with_step(a.step());
        return FormField(z);
    }
    let table: Vec<Vec<(usize, usize, f64)>> = multi_indices(n, k + 1)
        .iter()
        .map(|jj| {
            (0..jj.len())
                .map(|p| {
                    let mut rest = jj.clone();
                    let s = rest.remove(p);
                    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                    (s, index_of(n, &rest), sign)
                })
                .collect()
        })
        .collect();
    let src = a.clone();
    let e: EvalFn = Arc::new(move |x| {
        let j = src.jacobian(x);
        table
            .iter()
            .map(|terms| terms.iter().map(|&(s, i, sg)| sg * j[s][i]).sum())
            .collect()
    });
    FormField(Field::from_parts(n, k + 1, e, None, a.domain().clone()).with_step(a.step()))
}

/// `α ∧ β`.
pub fn wedge(alpha: &FormField, beta: &FormField) -> Result<FormField> {
    let (a, b) = (&alpha.0, &beta.0);
    check_dims(a, b)?;
    let n = a.dim();
    let (k, l) = (a.degree(), b.degree());
    if k + l > n {
        return Err(Error::DegreeOverflow {
            max: n,
            found: k + l,
        });
    }
    let (ea, eb) = (a.eval_fn().clone(), b.eval_fn().clone());
    let e: EvalFn = Arc::new(move |x| algebra::wedge(n, k, &ea(x), l, &eb(x)));
    let jac = match (a.jac_fn(), b.jac_fn()) {
        (Some(ja), Some(jb)) => {
            let (ja, jb) = (ja.clone(), jb.clone());
            let (ea, eb) = (a.eval_fn().clone(), b.eval_fn().clone());
            let j: JacFn = Arc::new(move |x| {
                let (va, vb, da, db) = (ea(x), eb(x), ja(x), jb(x));
                (0..n)
                    .map(|s| {
                        let p = algebra::wedge(n, k, &da[s], l, &vb);
                        let q = algebra::wedge(n, k, &va, l, &db[s]);
                        p.iter().zip(&q).map(|(u, v)| u + v).collect()
                    })
                    .collect()
            });
            Some(j)
        }
        _ => None,
    };
    let mut out =
        Field::from_parts(n, k + l, e, jac, a.domain().merge(b.domain())).with_step(a.step());
    if a.is_identically_zero() || b.is_identically_zero() {
        out = out.mark_zero();
    }
    Ok(FormField(out))
}

/// `f α` for a 0-form `f`.
pub fn scale_by(f: &FormField, alpha: &FormField) -> Result<FormField> {
    if f.degree() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: f.degree(),
        });
    }
    wedge(f, alpha)
}

/// Interior product `i_X α` of a vector field into a form.
pub fn interior_product(x: &MultiVectorField, alpha: &FormField) -> Result<FormField> {
    let (u, a) = (&x.0, &alpha.0);
    check_dims(u, a)?;
    if u.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: u.degree(),
        });
    }
    if a.degree() == 0 {
        return Err(Error::DegreeUnderflow { min: 1, found: 0 });
    }
    let (n, k) = (a.dim(), a.degree());
    let (eu, ea) = (u.eval_fn().clone(), a.eval_fn().clone());
    let e: EvalFn = Arc::new(move |x| algebra::interior(n, &eu(x), k, &ea(x)));
    let jac = match (u.jac_fn(), a.jac_fn()) {
        (Some(ju), Some(ja)) => {
            let (ju, ja) = (ju.clone(), ja.clone());
            let (eu, ea) = (u.eval_fn().clone(), a.eval_fn().clone());
            let j: JacFn = Arc::new(move |x| {
                let (vu, va, du, da) = (eu(x), ea(x), ju(x), ja(x));
                (0..n)
                    .map(|s| {
                        let p = algebra::interior(n, &du[s], k, &va);
                        let q = algebra::interior(n, &vu, k, &da[s]);
                        p.iter().zip(&q).map(|(a, b)| a + b).collect()
                    })
                    .collect()
            });
            Some(j)
        }
        _ => None,
    };
    let mut out =
        Field::from_parts(n, k - 1, e, jac, a.domain().merge(u.domain())).with_step(a.step());
    if a.is_identically_zero() || u.is_identically_zero() {
        out = out.mark_zero();
    }
    Ok(FormField(out))
}

/// Contraction `α(X)` of a 1-form with a vector field, as a 0-form.
pub fn pair(alpha: &FormField, x: &MultiVectorField) -> Result<FormField> {
    if alpha.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: alpha.degree(),
        });
    }
    interior_product(x, alpha)
}

/// Lie derivative by Cartan's formula `L_u α = d i_u α + i_u dα`.
pub fn lie_derivative(u: &MultiVectorField, alpha: &FormField) -> Result<FormField> {
    check_dims(&u.0, &alpha.0)?;
    let da = exterior_derivative(alpha);
    if alpha.degree() == 0 {
        return interior_product(u, &da);
    }
    let d_iu = exterior_derivative(&interior_product(u, alpha)?);
    if da.degree() > da.dim() {
        return Ok(d_iu);
    }
    let iu_d = interior_product(u, &da)?;
    d_iu.add(&iu_d)
}

/// `#A = i_A V` for the unit volume element.
pub fn sharp(a: &MultiVectorField) -> FormField {
    let (n, k) = (a.dim(), a.degree());
    FormField(map_linear(&a.0, n - k, move |v| algebra::sharp(n, k, v)))
}

/// `#⁻¹α = i_α 𝐕`, the inverse of [`sharp`].
pub fn sharp_inverse(alpha: &FormField) -> MultiVectorField {
    let (n, k) = (alpha.dim(), alpha.degree());
    MultiVectorField(map_linear(&alpha.0, n - k, move |v| {
        algebra::sharp_inverse(n, k, v)
    }))
}

/// `div = #⁻¹ d #`, lowering multivector degree by one.
pub fn divergence(a: &MultiVectorField) -> Result<MultiVectorField> {
    if a.degree() == 0 {
        return Err(Error::DegreeUnderflow { min: 1, found: 0 });
    }
    Ok(sharp_inverse(&exterior_derivative(&sharp(a))))
}

/// Component-wise product of a scalar 0-form with a multivector field.
pub fn scale_multivector(f: &FormField, a: &MultiVectorField) -> Result<MultiVectorField> {
    if f.degree() != 0 {
        return Err(Error::DegreeMismatch {
            expected: 0,
            found: f.degree(),
        });
    }
    // Multivectors share the component layout of forms, and a 0-form
    // wedge is plain multiplication.
    let as_form = FormField(a.0.clone());
    wedge(f, &as_form).map(|w| MultiVectorField(w.0))
}

/// Antisymmetrized outer product `A ∧ B` of multivector fields.
pub fn wedge_multivector(a: &MultiVectorField, b: &MultiVectorField) -> Result<MultiVectorField> {
    wedge(&FormField(a.0.clone()), &FormField(b.0.clone())).map(|w| MultiVectorField(w.0))
}
