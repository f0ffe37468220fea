//! Weight data, per-variable penalties and the energy functional.
//!
//! A weight vector `λ` (rational, summing to zero) acts on the monomial `Z^{αʲ}`
//! with weight `wⱼ = Σₖ λₖ αₖʲ`. With `λ_max = maxⱼ wⱼ`, variable `k` contributes
//! the penalty `∫₀^∞ φₖ'(φₖ' − 1) dx` where `φₖ(x) = minⱼ(−wⱼ + αₖʲ x)`, and
//!
//! ```text
//! E(λ) = −λ_max (d − 1)(n + 1)/n + Σₖ penaltyₖ,      L(λ) = (2/d) E(λ).
//! ```
//!
//! `E` is evaluated directly from the envelopes, so it is defined for every
//! rational `λ`, generic or not.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::envelope::{
    breakpoint_sequence, build_envelope, check_line_genericity, penalty_pair_sum,
    penalty_segment_sum, ConcurrentTriple, Envelope, Line,
};
use crate::polynomial::Support;
use crate::rational::{int, sup_norm, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("weight vector has {found} entries, expected n + 1 = {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("weights must sum to zero, got {sum}")]
    NonZeroSum { sum: Rational },
    #[error("variable index {k} out of range 0..={n}")]
    VariableOutOfRange { k: usize, n: usize },
    #[error("monomial weights are not all equal: {weights:?}")]
    NotInvariant { weights: Vec<Rational> },
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Rational weights `(λ₀, …, λₙ)` with `Σ λᵢ = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector(Vec<Rational>);

impl WeightVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, StabilityError> {
        let sum: Rational = entries.iter().sum();
        if !sum.is_zero() {
            return Err(StabilityError::NonZeroSum { sum });
        }
        Ok(WeightVector(entries))
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self, StabilityError> {
        Self::new(entries.iter().map(|&v| int(v)).collect())
    }

    pub fn zero(len: usize) -> Self {
        WeightVector(vec![Rational::zero(); len])
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn sup_norm(&self) -> Rational {
        sup_norm(&self.0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        WeightVector(self.0.iter().map(|v| v * c).collect())
    }

    pub fn neg(&self) -> Self {
        WeightVector(self.0.iter().map(|v| -v).collect())
    }

    /// `self + c·other`; both sum to zero, so the result does too.
    pub fn add_scaled(&self, c: &Rational, other: &WeightVector) -> Self {
        WeightVector(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }

    /// Rescaled to sup-norm 1; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let norm = self.sup_norm();
        if norm.is_zero() {
            self.clone()
        } else {
            WeightVector(self.0.iter().map(|v| v / &norm).collect())
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = vec![Rational::zero(); self.0.len()];
        for (k, v) in self.0.iter().enumerate() {
            out[perm[k]] = v.clone();
        }
        WeightVector(out)
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }
}

fn check_dims(support: &Support, lambda: &WeightVector) -> Result<(), StabilityError> {
    if lambda.len() != support.n() + 1 {
        return Err(StabilityError::DimensionMismatch {
            expected: support.n() + 1,
            found: lambda.len(),
        });
    }
    Ok(())
}

/// Per-monomial weights and their normalization `δⱼ = λ_max − wⱼ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightData {
    pub w: Vec<Rational>,
    pub lambda_max: Rational,
    /// `−λ_max`, so that `δ + δⱼ = −wⱼ`.
    pub delta: Rational,
    pub delta_i: Vec<Rational>,
    /// Monomial indices sorted by ascending `δⱼ` (stable).
    pub order: Vec<usize>,
}

pub fn compute_weights(support: &Support, lambda: &WeightVector) -> Result<WeightData, StabilityError> {
    check_dims(support, lambda)?;
    let w: Vec<Rational> = support
        .monomials()
        .iter()
        .map(|m| {
            m.exponents
                .iter()
                .zip(lambda.entries())
                .filter(|(&e, _)| e != 0)
                .map(|(&e, l)| l * int(e as i64))
                .sum()
        })
        .collect();
    let lambda_max = w.iter().max().expect("support is nonempty").clone();
    let delta_i: Vec<Rational> = w.iter().map(|wj| &lambda_max - wj).collect();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| delta_i[a].cmp(&delta_i[b]));
    Ok(WeightData {
        delta: -lambda_max.clone(),
        w,
        lambda_max,
        delta_i,
        order,
    })
}

fn check_variable(support: &Support, k: usize) -> Result<(), StabilityError> {
    if k > support.n() {
        return Err(StabilityError::VariableOutOfRange { k, n: support.n() });
    }
    Ok(())
}

fn lines_from_weights(support: &Support, w: &[Rational], k: usize) -> Vec<Line> {
    let mut seen = BTreeSet::new();
    let mut lines = Vec::new();
    for (j, wj) in w.iter().enumerate() {
        let line = Line::new(-wj, int(support.exponent(j, k) as i64));
        if seen.insert(line.clone()) {
            lines.push(line);
        }
    }
    lines
}

/// The family `{(−wⱼ, αₖʲ)}` whose lower envelope is `φₖ`, without duplicates,
/// in monomial order.
pub fn phi_lines(support: &Support, lambda: &WeightVector, k: usize) -> Result<Vec<Line>, StabilityError> {
    check_variable(support, k)?;
    let data = compute_weights(support, lambda)?;
    Ok(lines_from_weights(support, &data.w, k))
}

pub fn variable_envelope(
    support: &Support,
    lambda: &WeightVector,
    k: usize,
) -> Result<Envelope, StabilityError> {
    let lines = phi_lines(support, lambda, k)?;
    build_envelope(&lines).map_err(|e| StabilityError::Internal(e.to_string()))
}

/// Exact penalty of one line family, computed both ways and compared.
fn family_penalty(lines: &[Line]) -> Result<Rational, StabilityError> {
    let internal = |e: crate::envelope::EnvelopeError| StabilityError::Internal(e.to_string());
    let env = build_envelope(lines).map_err(internal)?;
    let by_segments = penalty_segment_sum(&env).map_err(internal)?;
    let seq = breakpoint_sequence(lines).map_err(internal)?;
    let by_pairs = penalty_pair_sum(&seq, lines).map_err(internal)?;
    if by_segments != by_pairs {
        return Err(StabilityError::Internal(format!(
            "penalty forms disagree: segments {by_segments}, pairs {by_pairs}"
        )));
    }
    Ok(by_segments)
}

pub fn variable_penalty(support: &Support, lambda: &WeightVector, k: usize) -> Result<Rational, StabilityError> {
    family_penalty(&phi_lines(support, lambda, k)?)
}

fn penalties_from_weights(support: &Support, w: &[Rational]) -> Result<Vec<Rational>, StabilityError> {
    (0..=support.n())
        .map(|k| family_penalty(&lines_from_weights(support, w, k)))
        .collect()
}

/// `(d − 1)(n + 1)/n`, the coefficient of `−λ_max` in the energy.
fn max_weight_coefficient(support: &Support) -> Rational {
    let n = support.n() as i64;
    Rational::new(
        ((support.degree() as i64 - 1) * (n + 1)).into(),
        n.into(),
    )
}

fn energy_from_parts(support: &Support, lambda_max: &Rational, penalties: &[Rational]) -> Rational {
    -(lambda_max * max_weight_coefficient(support)) + penalties.iter().sum::<Rational>()
}

/// `E(λ) = −λ_max (d − 1)(n + 1)/n + Σₖ penaltyₖ`.
pub fn energy(support: &Support, lambda: &WeightVector) -> Result<Rational, StabilityError> {
    let data = compute_weights(support, lambda)?;
    let penalties = penalties_from_weights(support, &data.w)?;
    Ok(energy_from_parts(support, &data.lambda_max, &penalties))
}

/// `L(λ) = (2/d) E(λ)`.
pub fn k_energy_limit(support: &Support, lambda: &WeightVector) -> Result<Rational, StabilityError> {
    Ok(limit_prefactor(support) * energy(support, lambda)?)
}

fn limit_prefactor(support: &Support) -> Rational {
    Rational::new(2.into(), (support.degree() as i64).into())
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Genericity {
    /// Monomial pairs with equal `δ`.
    pub delta_ties: Vec<(usize, usize)>,
    /// `(variable, triple)` for every concurrent triple among `δⱼ + αₖʲ x`.
    pub concurrent: Vec<(usize, ConcurrentTriple)>,
}

impl Genericity {
    pub fn is_generic(&self) -> bool {
        self.delta_ties.is_empty() && self.concurrent.is_empty()
    }
}

/// Distinct `δⱼ`, and for each variable no three of the lines `δⱼ + αₖʲ x`
/// through one point. Indices refer to monomials.
pub fn check_genericity(support: &Support, lambda: &WeightVector) -> Result<Genericity, StabilityError> {
    let data = compute_weights(support, lambda)?;
    let mut report = Genericity::default();
    for i in 0..data.delta_i.len() {
        for j in i + 1..data.delta_i.len() {
            if data.delta_i[i] == data.delta_i[j] {
                report.delta_ties.push((i, j));
            }
        }
    }
    for k in 0..=support.n() {
        let lines: Vec<Line> = data
            .delta_i
            .iter()
            .enumerate()
            .map(|(j, dj)| Line::new(dj.clone(), int(support.exponent(j, k) as i64)))
            .collect();
        report.concurrent.extend(
            check_line_genericity(&lines)
                .concurrent_triples
                .into_iter()
                .map(|t| (k, t)),
        );
    }
    Ok(report)
}

/// `κ` when every monomial has the same weight, i.e. `XF = κF`.
pub fn detect_invariance(support: &Support, lambda: &WeightVector) -> Result<Option<Rational>, StabilityError> {
    let data = compute_weights(support, lambda)?;
    Ok(constant_weight(&data.w))
}

fn constant_weight(w: &[Rational]) -> Option<Rational> {
    let first = w.first()?;
    w.iter().all(|x| x == first).then(|| first.clone())
}

/// `−(n + 1)(d − 1)κ/n` for a weight vector preserving `F`.
///
/// Checked against the directly computed energy, which must agree because
/// every penalty vanishes on a validated support in this case.
pub fn futaki_invariant(support: &Support, lambda: &WeightVector) -> Result<Rational, StabilityError> {
    let data = compute_weights(support, lambda)?;
    let kappa = constant_weight(&data.w).ok_or_else(|| StabilityError::NotInvariant {
        weights: data.w.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
    })?;
    let futaki = -(&kappa * max_weight_coefficient(support));
    let e = energy(support, lambda)?;
    if e != futaki {
        return Err(StabilityError::Internal(format!(
            "invariant direction: energy {e} differs from Futaki value {futaki}"
        )));
    }
    Ok(futaki)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantInfo {
    #[serde(serialize_with = "crate::cli::ser_rational")]
    pub kappa: Rational,
    #[serde(serialize_with = "crate::cli::ser_rational")]
    pub futaki: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub lambda: WeightVector,
    pub weight_data: WeightData,
    pub penalties: Vec<Rational>,
    pub energy: Rational,
    pub limit: Rational,
    pub energy_reverse: Rational,
    pub limit_reverse: Rational,
    pub genericity: Genericity,
    pub invariant: Option<InvariantInfo>,
    /// `E(λ) ≥ 0`, the inequality required of Kähler–Einstein hypersurfaces.
    pub mainc_inequality_holds: bool,
}

pub fn report(support: &Support, lambda: &WeightVector) -> Result<StabilityReport, StabilityError> {
    let weight_data = compute_weights(support, lambda)?;
    let penalties = penalties_from_weights(support, &weight_data.w)?;
    let energy = energy_from_parts(support, &weight_data.lambda_max, &penalties);
    let energy_reverse = self::energy(support, &lambda.neg())?;
    let prefactor = limit_prefactor(support);
    let invariant = match constant_weight(&weight_data.w) {
        Some(kappa) => Some(InvariantInfo {
            futaki: futaki_invariant(support, lambda)?,
            kappa,
        }),
        None => None,
    };
    Ok(StabilityReport {
        lambda: lambda.clone(),
        genericity: check_genericity(support, lambda)?,
        limit: &prefactor * &energy,
        limit_reverse: &prefactor * &energy_reverse,
        mainc_inequality_holds: !energy.is_negative(),
        weight_data,
        penalties,
        energy,
        energy_reverse,
        invariant,
    })
}
