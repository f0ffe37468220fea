//! Search over the weight hyperplane `Σλ = 0` for directions with `E(λ) < 0`.
//!
//! Candidates are scored by `E(λ)/‖λ‖_∞`, which is scale-invariant because `E`
//! is positively homogeneous. The pipeline evaluates every primitive integer
//! direction up to a height bound plus seeded random directions, then runs an
//! exact pattern search from the best few. [`certify_min`] computes the exact
//! minimum over the unit box instead.

mod certify;

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::polynomial::Support;
use crate::rational::{int, Rational};
use crate::stability::{energy, StabilityError, WeightVector};

pub use certify::{certify_min, constraint_subset_count, Certificate, DEFAULT_BOX_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error("combinatorial budget exceeded: {subsets} constraint subsets, limit {limit}")]
    CombinatorialBudgetExceeded { subsets: u128, limit: u128 },
}

/// Number of best candidates handed to [`local_refine`].
pub const REFINE_CANDIDATES: usize = 3;

/// Range of the integer draws behind [`sample_directions`].
const SAMPLE_RANGE: i64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Sup-norm bound for integer directions.
    pub height: u32,
    pub samples: usize,
    pub seed: u64,
    /// Improving moves allowed per step size; 0 disables refinement.
    pub refine_rounds: usize,
    /// Smallest pattern step is `1/denominator_cap`.
    pub denominator_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            height: 2,
            samples: 64,
            seed: 0,
            refine_rounds: 16,
            denominator_cap: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub best_lambda: WeightVector,
    /// `E(best_lambda)/‖best_lambda‖_∞`, or 0 when no candidate was scored.
    pub best_score: Rational,
    pub evaluations: usize,
    pub violated: bool,
    /// Successive strict improvements of the running best, in scan order.
    pub trace: Vec<(WeightVector, Rational)>,
}

/// `E(λ)/‖λ‖_∞`, with the zero vector scoring 0.
pub fn score(support: &Support, lambda: &WeightVector) -> Result<Rational, StabilityError> {
    let norm = lambda.sup_norm();
    if norm.is_zero() {
        return Ok(Rational::zero());
    }
    Ok(energy(support, lambda)? / norm)
}

/// Every primitive nonzero integer `λ` with `Σλ = 0` and `‖λ‖_∞ ≤ height`, in
/// lexicographic order. Both `λ` and `−λ` appear.
pub fn enumerate_integer_directions(n: usize, height: u32) -> IntegerDirections {
    IntegerDirections::new(n + 1, height as i64)
}

/// Odometer over the first `len − 1` coordinates; the last one is forced by
/// the zero-sum condition.
pub struct IntegerDirections {
    head: Vec<i64>,
    height: i64,
    done: bool,
}

impl IntegerDirections {
    fn new(len: usize, height: i64) -> Self {
        IntegerDirections {
            head: vec![-height; len.saturating_sub(1)],
            height,
            done: height == 0 || len < 2,
        }
    }

    fn advance(&mut self) {
        for slot in self.head.iter_mut().rev() {
            if *slot < self.height {
                *slot += 1;
                return;
            }
            *slot = -self.height;
        }
        self.done = true;
    }
}

impl Iterator for IntegerDirections {
    type Item = WeightVector;

    fn next(&mut self) -> Option<WeightVector> {
        while !self.done {
            let last = -self.head.iter().sum::<i64>();
            let candidate = (last.abs() <= self.height).then(|| {
                let mut v = self.head.clone();
                v.push(last);
                v
            });
            self.advance();
            if let Some(v) = candidate {
                let g = v.iter().fold(0i64, |g, x| g.gcd(x));
                if g == 1 {
                    return Some(WeightVector::from_ints(&v).expect("sums to zero"));
                }
            }
        }
        None
    }
}

/// `count` seeded random directions with `Σλ = 0` and `‖λ‖_∞ = 1` exactly.
///
/// Generated sequentially from a single ChaCha stream, so the list depends on
/// `seed` alone.
pub fn sample_directions(n: usize, count: usize, seed: u64) -> Vec<WeightVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = n + 1;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let draws: Vec<i64> = (0..len)
            .map(|_| rng.random_range(-SAMPLE_RANGE..=SAMPLE_RANGE))
            .collect();
        let mean = Rational::new(draws.iter().sum::<i64>().into(), (len as i64).into());
        let centered: Vec<Rational> = draws.iter().map(|&x| int(x) - &mean).collect();
        let v = WeightVector::new(centered).expect("centered");
        if !v.is_zero() {
            out.push(v.normalized());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefineOutcome {
    pub lambda: WeightVector,
    pub score: Rational,
    pub evaluations: usize,
}

/// Pattern search over the moves `λ ± s(eᵢ − eⱼ)`.
///
/// For each step `s = 1, 1/2, 1/4, …` down to `1/denominator_cap`, the best
/// strictly improving move is taken (ties to the lexicographically smallest
/// point) and the iterate rescaled to sup-norm 1, up to `refine_rounds` times;
/// then the step halves. The score never increases, and a start with no
/// improving move is returned as is.
pub fn local_refine(
    support: &Support,
    start: &WeightVector,
    cfg: &SearchConfig,
) -> Result<RefineOutcome, StabilityError> {
    let mut current = start.clone();
    let mut current_score = score(support, start)?;
    let mut evaluations = 1;
    let len = start.len();
    let floor = Rational::new(One::one(), cfg.denominator_cap.max(1).into());
    let half = Rational::new(1.into(), 2.into());

    let mut step = Rational::one();
    while cfg.refine_rounds > 0 && step >= floor {
        for _ in 0..cfg.refine_rounds {
            let mut best: Option<(Rational, WeightVector)> = None;
            for i in 0..len {
                for j in 0..len {
                    if i == j {
                        continue;
                    }
                    let mut entries = current.entries().to_vec();
                    entries[i] += &step;
                    entries[j] -= &step;
                    let candidate = WeightVector::new(entries).expect("zero-sum move");
                    if candidate.is_zero() {
                        continue;
                    }
                    let s = score(support, &candidate)?;
                    evaluations += 1;
                    let better = match &best {
                        None => true,
                        Some((bs, bv)) => (&s, &candidate) < (bs, bv),
                    };
                    if better {
                        best = Some((s, candidate));
                    }
                }
            }
            match best {
                Some((s, v)) if s < current_score => {
                    current = v.normalized();
                    current_score = s;
                }
                _ => break,
            }
        }
        step *= &half;
    }
    Ok(RefineOutcome {
        lambda: current,
        score: current_score,
        evaluations,
    })
}

/// Runs enumeration, sampling and refinement; returns the smallest score,
/// ties broken by the lexicographically smallest `λ`.
///
/// Candidates are scored in parallel on the current rayon pool; the reduction
/// is order-independent, so the result does not depend on the thread count.
pub fn search_min(support: &Support, cfg: &SearchConfig) -> Result<SearchResult, SearchError> {
    let n = support.n();
    let mut candidates: Vec<WeightVector> = enumerate_integer_directions(n, cfg.height).collect();
    candidates.extend(sample_directions(n, cfg.samples, cfg.seed));

    let scores: Vec<Rational> = candidates
        .par_iter()
        .map(|l| score(support, l))
        .collect::<Result<_, _>>()?;
    let mut evaluations = candidates.len();
    let mut scored: Vec<(Rational, WeightVector)> = scores.into_iter().zip(candidates).collect();

    if cfg.refine_rounds > 0 && !scored.is_empty() {
        let mut ranked: Vec<&(Rational, WeightVector)> = scored.iter().collect();
        ranked.sort();
        let starts: Vec<WeightVector> = ranked
            .into_iter()
            .take(REFINE_CANDIDATES)
            .map(|(_, l)| l.clone())
            .collect();
        let refined: Vec<RefineOutcome> = starts
            .par_iter()
            .map(|l| local_refine(support, l, cfg))
            .collect::<Result<_, _>>()?;
        for r in refined {
            evaluations += r.evaluations;
            scored.push((r.score, r.lambda));
        }
    }

    let mut trace: Vec<(WeightVector, Rational)> = Vec::new();
    let mut best: Option<(Rational, WeightVector)> = None;
    for (s, l) in scored {
        let replace = match &best {
            None => true,
            Some((bs, bl)) => (&s, &l) < (bs, bl),
        };
        if replace {
            if best.as_ref().is_none_or(|(bs, _)| &s < bs) {
                trace.push((l.clone(), s.clone()));
            }
            best = Some((s, l));
        }
    }
    let (best_score, best_lambda) =
        best.unwrap_or_else(|| (Rational::zero(), WeightVector::zero(n + 1)));
    Ok(SearchResult {
        violated: best_score < Rational::zero(),
        best_lambda,
        best_score,
        evaluations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_polynomial;
    use crate::rational::ratio;
    use std::collections::BTreeSet;

    fn wv(v: &[i64]) -> WeightVector {
        WeightVector::from_ints(v).unwrap()
    }

    fn fermat3() -> Support {
        parse_polynomial("Z0^3 + Z1^3 + Z2^3 + Z3^3").unwrap()
    }

    fn conic() -> Support {
        parse_polynomial("Z0*Z1 + Z2^2").unwrap()
    }

    /// Independent brute force: nested loops, explicit filters, sorted.
    fn brute_directions(len: usize, h: i64) -> Vec<Vec<i64>> {
        let mut out = BTreeSet::new();
        let total = (2 * h + 1).pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let mut v = Vec::with_capacity(len);
            for _ in 0..len {
                v.push(c % (2 * h + 1) - h);
                c /= 2 * h + 1;
            }
            v.reverse();
            let g = v.iter().fold(0i64, |g, x| g.gcd(x));
            if v.iter().sum::<i64>() == 0 && g == 1 {
                out.insert(v);
            }
        }
        out.into_iter().collect()
    }

    fn as_ints(v: &WeightVector) -> Vec<i64> {
        v.entries().iter().map(|x| x.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn enumeration_small_cases() {
        let got: Vec<Vec<i64>> = enumerate_integer_directions(1, 1).map(|v| as_ints(&v)).collect();
        assert_eq!(got, vec![vec![-1, 1], vec![1, -1]]);
        let got: Vec<Vec<i64>> = enumerate_integer_directions(2, 1).map(|v| as_ints(&v)).collect();
        assert_eq!(got.len(), 6);
        assert_eq!(got, brute_directions(3, 1));
        assert_eq!(enumerate_integer_directions(3, 0).count(), 0);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for (n, h) in [(2, 3), (3, 2), (4, 1), (3, 3)] {
            let got: Vec<Vec<i64>> = enumerate_integer_directions(n, h).map(|v| as_ints(&v)).collect();
            assert_eq!(got, brute_directions(n + 1, h as i64), "n={n} h={h}");
        }
    }

    #[test]
    fn sampling_contract() {
        assert!(sample_directions(3, 0, 7).is_empty());
        let a = sample_directions(3, 25, 42);
        assert_eq!(a, sample_directions(3, 25, 42));
        assert_ne!(a, sample_directions(3, 25, 43));
        for v in &a {
            assert!(v.entries().iter().sum::<Rational>().is_zero());
            assert_eq!(v.sup_norm(), int(1));
        }
    }

    #[test]
    fn refine_fixed_point() {
        let cfg = SearchConfig::default();
        // (-1,-1,1,1) is a global minimizer of the Fermat cubic score.
        let start = wv(&[-1, -1, 1, 1]);
        let out = local_refine(&fermat3(), &start, &cfg).unwrap();
        assert_eq!(out.lambda, start);
        assert_eq!(out.score, int(-8));
    }

    #[test]
    fn refine_is_monotone() {
        let cfg = SearchConfig::default();
        let start = wv(&[1, 0, -1, 0]);
        let before = score(&fermat3(), &start).unwrap();
        let out = local_refine(&fermat3(), &start, &cfg).unwrap();
        assert!(out.score <= before);
        assert_eq!(out.score, score(&fermat3(), &out.lambda).unwrap());
    }

    #[test]
    fn refine_conic_walks_to_minimum() {
        let cfg = SearchConfig {
            refine_rounds: 2,
            ..SearchConfig::default()
        };
        let out = local_refine(&conic(), &wv(&[1, -1, 0]), &cfg).unwrap();
        assert_eq!(out.score, ratio(-3, 2));
    }

    #[test]
    fn search_fixtures() {
        let cfg = SearchConfig {
            height: 1,
            samples: 0,
            ..SearchConfig::default()
        };
        let r = search_min(&fermat3(), &cfg).unwrap();
        assert_eq!(r.best_score, int(-8));
        assert_eq!(r.best_lambda, wv(&[-1, -1, 1, 1]));
        assert!(r.violated);

        let r = search_min(&conic(), &cfg).unwrap();
        assert_eq!(r.best_score, ratio(-3, 2));
        assert_eq!(r.best_lambda, wv(&[0, 1, -1]));

        let cfg = SearchConfig {
            height: 0,
            samples: 0,
            ..SearchConfig::default()
        };
        let r = search_min(&fermat3(), &cfg).unwrap();
        assert_eq!(r.best_score, int(0));
        assert!(r.best_lambda.is_zero());
        assert!(!r.violated);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn evaluation_budget_is_exact() {
        let cfg = SearchConfig {
            height: 1,
            samples: 5,
            refine_rounds: 0,
            ..SearchConfig::default()
        };
        let r = search_min(&conic(), &cfg).unwrap();
        assert_eq!(r.evaluations, 6 + 5);

        let cfg = SearchConfig {
            refine_rounds: 3,
            ..cfg
        };
        let r = search_min(&conic(), &cfg).unwrap();
        let mut ranked: Vec<(Rational, WeightVector)> = enumerate_integer_directions(2, 1)
            .chain(sample_directions(2, 5, cfg.seed))
            .map(|l| (score(&conic(), &l).unwrap(), l))
            .collect();
        ranked.sort();
        let refine: usize = ranked
            .iter()
            .take(REFINE_CANDIDATES)
            .map(|(_, l)| local_refine(&conic(), l, &cfg).unwrap().evaluations)
            .sum();
        assert_eq!(r.evaluations, 11 + refine);
    }

    #[test]
    fn best_score_rederives() {
        let cfg = SearchConfig {
            height: 1,
            samples: 10,
            seed: 9,
            ..SearchConfig::default()
        };
        let r = search_min(&fermat3(), &cfg).unwrap();
        assert_eq!(r.best_score, score(&fermat3(), &r.best_lambda).unwrap());
        let last = r.trace.last().unwrap();
        assert_eq!(last.1, r.best_score);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = SearchConfig {
            height: 2,
            samples: 16,
            seed: 3,
            ..SearchConfig::default()
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| search_min(&fermat3(), &cfg).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
