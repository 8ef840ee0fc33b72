use super::profile::TrustProfile;
use super::record::TrustDimension;
use crate::error::{AuditError, Result};
use crate::Scalar;

/// Per-dimension values in (F, P, U, Fair, R) order; `None` = absent.
pub type DimensionValues<S> = [Option<S>; 5];

/// Weighted geometric mean `exp(Σ β_i ln u_i)` over present (`Some`) scores, with
/// `β` renormalized over them. `beta = None` means uniform weights.
pub fn dimension_index<S: Scalar>(u: &[Option<S>], beta: Option<&[S]>) -> Result<S> {
    if let Some(b) = beta {
        if b.len() != u.len() {
            return Err(AuditError::DimensionMismatch {
                expected: u.len(),
                got: b.len(),
            });
        }
        if b.iter().any(|w| *w < S::zero()) {
            return Err(AuditError::invalid("metric weights must be non-negative"));
        }
    }
    let present: Vec<(S, S)> = u
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (v, beta.map_or(S::one(), |b| b[i]))))
        .collect();
    let total = present.iter().map(|p| p.1).sum::<S>();
    if present.is_empty() || total <= S::zero() {
        return Err(AuditError::AllMetricsMissing("dimension".into()));
    }
    if let Some((v, _)) = present.iter().find(|(v, _)| !(*v > S::zero() && *v <= S::one())) {
        return Err(AuditError::invalid(format!("normalized score {v} outside (0, 1]")));
    }
    let weighted: Vec<(S, S)> = present.into_iter().filter(|p| p.1 > S::zero()).collect();
    if let [(v, _)] = weighted[..] {
        return Ok(v);
    }
    let log_pi = weighted.iter().map(|&(v, w)| w / total * v.ln()).sum::<S>();
    Ok(log_pi.exp().min(S::one()))
}

/// `exp(Σ_T ω_T ln π_T)` over dimensions with positive weight.
pub fn trustworthiness_index<S: Scalar>(pi: &DimensionValues<S>, profile: &TrustProfile) -> Result<S> {
    let mut terms = Vec::with_capacity(5);
    for dim in TrustDimension::ALL {
        let w = profile.weights[dim.index()];
        if w <= 0.0 {
            continue;
        }
        let p = pi[dim.index()].ok_or_else(|| AuditError::MissingDimension {
            profile: profile.name.clone(),
            dimension: dim.to_string(),
        })?;
        terms.push((p, w));
    }
    // a one-hot profile returns its dimension index bit-for-bit
    if let [(p, _)] = terms[..] {
        return Ok(p);
    }
    let log_tau = terms.iter().map(|&(p, w)| S::lit(w) * p.ln()).sum::<S>();
    Ok(log_tau.exp().min(S::one()))
}

/// Geometric mean `ḡ = exp(mean log v)` and the mean squared deviation of
/// the values around it.
pub fn geo_mean_deviation<S: Scalar>(values: &[S]) -> Result<(S, S)> {
    if values.is_empty() {
        return Err(AuditError::invalid("no values to summarize"));
    }
    if values.iter().any(|v| !(*v > S::zero())) {
        return Err(AuditError::invalid("geometric mean needs positive values"));
    }
    let n = S::from_usize_lossy(values.len());
    if values.iter().all(|v| *v == values[0]) {
        return Ok((values[0], S::zero()));
    }
    let g = (values.iter().map(|v| v.ln()).sum::<S>() / n).exp();
    let dev = values.iter().map(|&v| (v - g) * (v - g)).sum::<S>() / n;
    Ok((g, dev))
}
