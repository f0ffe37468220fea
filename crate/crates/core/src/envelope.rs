//! Lower envelopes of finite families of lines on the half-line `[0, ∞)`.
//!
//! For a family `ψᵢ(x) = bᵢ + aᵢ·x` the envelope `ψ(x) = minᵢ ψᵢ(x)` is a
//! concave piecewise-linear function. Two independent routes describe it:
//!
//! * [`build_envelope`] runs a monotone hull sweep over the lines sorted by
//!   slope and clips the result to the half-line.
//! * [`breakpoint_sequence`] walks from the line that is minimal at `0⁺` to the
//!   first line of smaller slope that undercuts it, and repeats.
//!
//! The penalty `∫₀^∞ ψ'(ψ' − 1) dx` has two exact closed forms, one per route
//! ([`penalty_segment_sum`] and [`penalty_pair_sum`]). [`penalty_quadrature`]
//! is a floating-point approximation kept only as a test oracle.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("empty line family")]
    EmptyFamily,
    #[error("penalty integral diverges: tail slope {slope} has slope*(slope-1) != 0")]
    DivergentPenalty { slope: Rational },
}

/// The affine function `x ↦ intercept + slope·x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub intercept: Rational,
    pub slope: Rational,
}

impl Line {
    pub fn new(intercept: Rational, slope: Rational) -> Self {
        Line { intercept, slope }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.intercept + &self.slope * x
    }

    /// Abscissa where two non-parallel lines meet.
    pub fn crossing(&self, other: &Line) -> Option<Rational> {
        let ds = &self.slope - &other.slope;
        if ds.is_zero() {
            None
        } else {
            Some((&other.intercept - &self.intercept) / ds)
        }
    }
}

/// One linear piece of an envelope; `end == None` marks the unbounded tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: Rational,
    pub end: Option<Rational>,
    pub slope: Rational,
    pub value_at_start: Rational,
}

impl Segment {
    pub fn length(&self) -> Option<Rational> {
        self.end.as_ref().map(|e| e - &self.start)
    }

    /// `length · slope · (slope − 1)`; zero for a tail whose slope is 0 or 1.
    pub fn contribution(&self) -> Option<Rational> {
        let g = penalty_density(&self.slope);
        match self.length() {
            Some(len) => Some(len * g),
            None if g.is_zero() => Some(Rational::zero()),
            None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub segments: Vec<Segment>,
    pub final_slope: Rational,
}

impl Envelope {
    /// Interior breakpoints, in increasing order.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.segments.iter().filter_map(|s| s.end.clone()).collect()
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.segments.iter().map(|s| s.slope.clone()).collect()
    }

    /// Envelope value at `x ≥ 0`.
    pub fn value_at(&self, x: &Rational) -> Rational {
        let seg = self
            .segments
            .iter()
            .find(|s| s.end.as_ref().is_none_or(|e| x <= e))
            .unwrap_or_else(|| self.segments.last().expect("envelope has a segment"));
        &seg.value_at_start + &seg.slope * (x - &seg.start)
    }
}

/// Ordered pairs `(line index, breakpoint)`; the first breakpoint is always 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakpointSequence {
    pub entries: Vec<(usize, Rational)>,
}

impl BreakpointSequence {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last_line(&self) -> usize {
        self.entries.last().expect("sequence is never empty").0
    }
}

/// `s(s − 1)`, the integrand of the penalty on a piece of slope `s`.
pub fn penalty_density(slope: &Rational) -> Rational {
    slope * (slope - Rational::one())
}

fn check_tail(slope: &Rational) -> Result<(), EnvelopeError> {
    if penalty_density(slope).is_zero() {
        Ok(())
    } else {
        Err(EnvelopeError::DivergentPenalty {
            slope: slope.clone(),
        })
    }
}

/// Exact lower envelope of `lines` on `[0, ∞)`.
///
/// Duplicate lines collapse, parallel lines keep only the lowest one, and
/// lines that touch the envelope in a single point (concurrent triples, or a
/// crossing exactly at `x = 0`) produce no segment.
pub fn build_envelope(lines: &[Line]) -> Result<Envelope, EnvelopeError> {
    if lines.is_empty() {
        return Err(EnvelopeError::EmptyFamily);
    }
    let mut sorted: Vec<&Line> = lines.iter().collect();
    sorted.sort_by(|a, b| b.slope.cmp(&a.slope).then(a.intercept.cmp(&b.intercept)));
    sorted.dedup_by(|next, kept| next.slope == kept.slope);

    // Hull sweep over decreasing slopes: the envelope on all of ℝ.
    let mut hull: Vec<&Line> = Vec::with_capacity(sorted.len());
    for line in sorted {
        while hull.len() >= 2 {
            let l1 = hull[hull.len() - 2];
            let l2 = hull[hull.len() - 1];
            let x13 = l1.crossing(line).expect("slopes strictly decrease");
            let x12 = l1.crossing(l2).expect("slopes strictly decrease");
            if x13 <= x12 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }

    let ends: Vec<Rational> = hull
        .windows(2)
        .map(|w| w[0].crossing(w[1]).expect("slopes strictly decrease"))
        .collect();
    // First piece still alive to the right of zero.
    let first = ends.iter().position(|e| e.is_positive()).unwrap_or(ends.len());

    let mut segments = Vec::with_capacity(hull.len() - first);
    let mut start = Rational::zero();
    for (k, line) in hull.iter().enumerate().skip(first) {
        let end = ends.get(k).cloned();
        segments.push(Segment {
            value_at_start: line.eval(&start),
            start: start.clone(),
            end: end.clone(),
            slope: line.slope.clone(),
        });
        if let Some(e) = end {
            start = e;
        }
    }
    let final_slope = hull.last().expect("nonempty").slope.clone();
    Ok(Envelope {
        segments,
        final_slope,
    })
}

/// Inductive breakpoint sequence `(i₀, 0), (i₁, r₁), …, (i_m, r_m)`.
///
/// Starts on the line of smallest intercept (smallest slope among ties). From
/// `(i_k, r_k)` the next line is the one of smaller slope whose crossing with
/// line `i_k` comes first; ties at a crossing go to the smallest slope, then the
/// smallest index. Slopes strictly decrease, so the walk visits each distinct
/// slope at most once.
pub fn breakpoint_sequence(lines: &[Line]) -> Result<BreakpointSequence, EnvelopeError> {
    if lines.is_empty() {
        return Err(EnvelopeError::EmptyFamily);
    }
    let start = (0..lines.len())
        .min_by(|&i, &j| {
            lines[i]
                .intercept
                .cmp(&lines[j].intercept)
                .then(lines[i].slope.cmp(&lines[j].slope))
                .then(i.cmp(&j))
        })
        .expect("nonempty");

    let mut entries = vec![(start, Rational::zero())];
    let mut current = start;
    loop {
        let cur = &lines[current];
        let mut next: Option<(usize, Rational)> = None;
        for (i, line) in lines.iter().enumerate() {
            if line.slope >= cur.slope {
                continue;
            }
            let x = cur.crossing(line).expect("distinct slopes");
            let better = match &next {
                None => true,
                Some((j, bx)) => match x.cmp(bx) {
                    Ordering::Less => true,
                    Ordering::Equal => line.slope < lines[*j].slope,
                    Ordering::Greater => false,
                },
            };
            if better {
                next = Some((i, x));
            }
        }
        match next {
            Some((i, x)) => {
                debug_assert!(x > entries.last().expect("nonempty").1);
                entries.push((i, x));
                current = i;
            }
            None => break,
        }
    }
    Ok(BreakpointSequence { entries })
}

/// `Σ length·slope·(slope − 1)` over the bounded pieces of `env`.
pub fn penalty_segment_sum(env: &Envelope) -> Result<Rational, EnvelopeError> {
    check_tail(&env.final_slope)?;
    Ok(env
        .segments
        .iter()
        .filter_map(|s| s.length().map(|len| len * penalty_density(&s.slope)))
        .sum())
}

/// `Σₖ (b_{iₖ₊₁} − b_{iₖ})(a_{iₖ} + a_{iₖ₊₁} − 1)` over consecutive entries.
///
/// The tail line must have slope 0 or 1; in both cases the unbounded piece
/// contributes nothing.
pub fn penalty_pair_sum(seq: &BreakpointSequence, lines: &[Line]) -> Result<Rational, EnvelopeError> {
    if seq.is_empty() || lines.is_empty() {
        return Err(EnvelopeError::EmptyFamily);
    }
    check_tail(&lines[seq.last_line()].slope)?;
    let one = Rational::one();
    Ok(seq
        .entries
        .windows(2)
        .map(|w| {
            let (a, b) = (&lines[w[0].0], &lines[w[1].0]);
            (&b.intercept - &a.intercept) * (&a.slope + &b.slope - &one)
        })
        .sum())
}

/// Floating-point approximation of the penalty by difference quotients on a
/// uniform grid of step at most `grid_step`.
///
/// The integration range is `[0, 2X + 1]` where `X` is the largest
/// nonnegative pairwise crossing in the family, which bounds every breakpoint.
/// Nothing here consults the envelope constructions above.
pub fn penalty_quadrature(lines: &[Line], grid_step: f64) -> Result<f64, EnvelopeError> {
    if lines.is_empty() {
        return Err(EnvelopeError::EmptyFamily);
    }
    assert!(grid_step > 0.0, "grid step must be positive");
    let min_slope = lines.iter().map(|l| &l.slope).min().expect("nonempty");
    check_tail(min_slope)?;

    let mut last_crossing = Rational::zero();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            if let Some(x) = a.crossing(b) {
                if x > last_crossing {
                    last_crossing = x;
                }
            }
        }
    }
    let upper = 2.0 * to_f64(&last_crossing) + 1.0;
    let steps = (upper / grid_step).ceil().max(1.0) as u64;
    let h = upper / steps as f64;

    let coeffs: Vec<(f64, f64)> = lines
        .iter()
        .map(|l| (to_f64(&l.intercept), to_f64(&l.slope)))
        .collect();
    let psi = |x: f64| {
        coeffs
            .iter()
            .map(|&(b, a)| b + a * x)
            .fold(f64::INFINITY, f64::min)
    };

    let mut total = 0.0;
    let mut prev = psi(0.0);
    for i in 1..=steps {
        let value = psi(i as f64 * h);
        let q = (value - prev) / h;
        total += h * q * (q - 1.0);
        prev = value;
    }
    Ok(total)
}

/// Exact genericity diagnostics for a line family.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LineGenericity {
    /// Index pairs `(i, j)`, `i < j`, sharing an intercept.
    pub intercept_ties: Vec<(usize, usize)>,
    pub concurrent_triples: Vec<ConcurrentTriple>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcurrentTriple {
    pub lines: [usize; 3],
    /// Common abscissa; `None` when all three lines coincide.
    pub at: Option<Rational>,
}

impl LineGenericity {
    pub fn is_generic(&self) -> bool {
        self.intercept_ties.is_empty() && self.concurrent_triples.is_empty()
    }
}

/// Abscissa shared by three lines, if any. Coincident lines meet everywhere.
fn common_point(a: &Line, b: &Line, c: &Line) -> Option<Option<Rational>> {
    let through = |x: &Rational, l: &Line| a.eval(x) == l.eval(x);
    if let Some(x) = a.crossing(b) {
        return through(&x, c).then_some(Some(x));
    }
    if a.intercept != b.intercept {
        return None;
    }
    // a and b coincide.
    match a.crossing(c) {
        Some(x) => Some(Some(x)),
        None => (a.intercept == c.intercept).then_some(None),
    }
}

/// Distinct intercepts, and no three lines through a common point.
pub fn check_line_genericity(lines: &[Line]) -> LineGenericity {
    let mut report = LineGenericity::default();
    let n = lines.len();
    for i in 0..n {
        for j in i + 1..n {
            if lines[i].intercept == lines[j].intercept {
                report.intercept_ties.push((i, j));
            }
            for k in j + 1..n {
                if let Some(at) = common_point(&lines[i], &lines[j], &lines[k]) {
                    report.concurrent_triples.push(ConcurrentTriple {
                        lines: [i, j, k],
                        at,
                    });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn lines(raw: &[(i64, i64)]) -> Vec<Line> {
        raw.iter().map(|&(b, a)| Line::new(int(b), int(a))).collect()
    }

    fn brute_min(ls: &[Line], x: &Rational) -> Rational {
        ls.iter().map(|l| l.eval(x)).min().unwrap()
    }

    fn samples() -> Vec<Rational> {
        (0..1000).map(|k| ratio(k * 7 % 997, 113) + ratio(k, 1000)).collect()
    }

    #[test]
    fn three_line_staircase() {
        let ls = lines(&[(0, 2), (1, 1), (3, 0)]);
        let env = build_envelope(&ls).unwrap();
        assert_eq!(env.breakpoints(), vec![int(1), int(2)]);
        assert_eq!(env.slopes(), vec![int(2), int(1), int(0)]);
        for x in samples() {
            assert_eq!(env.value_at(&x), brute_min(&ls, &x));
        }
    }

    #[test]
    fn single_flat_line() {
        let env = build_envelope(&lines(&[(0, 0)])).unwrap();
        assert_eq!(env.segments.len(), 1);
        assert_eq!(env.final_slope, int(0));
        assert_eq!(env.value_at(&int(17)), int(0));
        assert_eq!(penalty_segment_sum(&env).unwrap(), int(0));
    }

    #[test]
    fn concurrent_middle_line_is_dropped() {
        let ls = lines(&[(0, 2), (1, 1), (2, 0)]);
        let env = build_envelope(&ls).unwrap();
        assert_eq!(env.breakpoints(), vec![int(1)]);
        assert_eq!(env.slopes(), vec![int(2), int(0)]);
        for x in samples() {
            assert_eq!(env.value_at(&x), brute_min(&ls, &x));
        }
        let seq = breakpoint_sequence(&ls).unwrap();
        assert_eq!(seq.entries, vec![(0, int(0)), (2, int(1))]);
    }

    #[test]
    fn empty_family_is_rejected() {
        assert_eq!(build_envelope(&[]), Err(EnvelopeError::EmptyFamily));
        assert_eq!(breakpoint_sequence(&[]), Err(EnvelopeError::EmptyFamily));
        assert_eq!(penalty_quadrature(&[], 0.1), Err(EnvelopeError::EmptyFamily));
    }

    #[test]
    fn sequences_match_hand_intersections() {
        let seq = breakpoint_sequence(&lines(&[(0, 2), (1, 1), (3, 0)])).unwrap();
        assert_eq!(seq.entries, vec![(0, int(0)), (1, int(1)), (2, int(2))]);
        let seq = breakpoint_sequence(&lines(&[(0, 1)])).unwrap();
        assert_eq!(seq.entries, vec![(0, int(0))]);
        let seq = breakpoint_sequence(&lines(&[(0, 3), (5, 0)])).unwrap();
        assert_eq!(seq.entries, vec![(0, int(0)), (1, ratio(5, 3))]);
    }

    #[test]
    fn tie_at_zero_starts_on_smaller_slope() {
        let ls = lines(&[(0, 3), (0, 1), (4, 0)]);
        let seq = breakpoint_sequence(&ls).unwrap();
        assert_eq!(seq.entries, vec![(1, int(0)), (2, int(4))]);
        let env = build_envelope(&ls).unwrap();
        assert_eq!(env.slopes(), vec![int(1), int(0)]);
        assert_eq!(env.breakpoints(), vec![int(4)]);
    }

    #[test]
    fn duplicates_and_parallels_collapse() {
        let ls = lines(&[(3, 0), (3, 0), (5, 0), (-9, 3), (-9, 3)]);
        let env = build_envelope(&ls).unwrap();
        assert_eq!(env.breakpoints(), vec![int(4)]);
        assert_eq!(penalty_segment_sum(&env).unwrap(), int(24));
    }

    #[test]
    fn lines_crossing_left_of_zero_are_clipped() {
        // 2x - 1 and x + 0 cross at x = 1; -x + 10 never matters before 5.5.
        let ls = lines(&[(5, 3), (-1, 2), (0, 1), (10, 0)]);
        let env = build_envelope(&ls).unwrap();
        assert_eq!(env.segments[0].start, int(0));
        assert_eq!(env.segments[0].slope, int(2));
        for x in samples() {
            assert_eq!(env.value_at(&x), brute_min(&ls, &x));
        }
    }

    #[test]
    fn segment_and_pair_forms() {
        let ls = lines(&[(0, 2), (1, 1), (3, 0)]);
        let env = build_envelope(&ls).unwrap();
        assert_eq!(penalty_segment_sum(&env).unwrap(), int(2));
        let seq = breakpoint_sequence(&ls).unwrap();
        assert_eq!(penalty_pair_sum(&seq, &ls).unwrap(), int(2));

        let ls = lines(&[(0, 3), (5, 0)]);
        let seq = breakpoint_sequence(&ls).unwrap();
        assert_eq!(penalty_pair_sum(&seq, &ls).unwrap(), int(10));
        assert_eq!(penalty_segment_sum(&build_envelope(&ls).unwrap()).unwrap(), int(10));

        let ls = lines(&[(0, 0)]);
        let seq = breakpoint_sequence(&ls).unwrap();
        assert_eq!(penalty_pair_sum(&seq, &ls).unwrap(), int(0));
    }

    #[test]
    fn slope_one_tail_converges() {
        let ls = lines(&[(0, 3), (2, 1)]);
        let env = build_envelope(&ls).unwrap();
        // [0, 1] at slope 3: 1 * 6.
        assert_eq!(penalty_segment_sum(&env).unwrap(), int(6));
        let seq = breakpoint_sequence(&ls).unwrap();
        assert_eq!(penalty_pair_sum(&seq, &ls).unwrap(), int(6));
    }

    #[test]
    fn divergent_tails_are_reported() {
        let ls = lines(&[(0, 2), (1, 3)]);
        let env = build_envelope(&ls).unwrap();
        assert_eq!(
            penalty_segment_sum(&env),
            Err(EnvelopeError::DivergentPenalty { slope: int(2) })
        );
        let seq = breakpoint_sequence(&ls).unwrap();
        assert!(matches!(
            penalty_pair_sum(&seq, &ls),
            Err(EnvelopeError::DivergentPenalty { .. })
        ));
        assert!(matches!(
            penalty_quadrature(&ls, 1e-3),
            Err(EnvelopeError::DivergentPenalty { .. })
        ));
    }

    #[test]
    fn quadrature_oracle_values() {
        let q = penalty_quadrature(&lines(&[(0, 2), (1, 1), (3, 0)]), 1e-4).unwrap();
        assert!((q - 2.0).abs() < 1e-3, "{q}");
        let q = penalty_quadrature(&lines(&[(0, 3), (5, 0)]), 1e-4).unwrap();
        assert!((q - 10.0).abs() < 1e-3, "{q}");
        assert_eq!(penalty_quadrature(&lines(&[(0, 0)]), 0.37).unwrap(), 0.0);
    }

    #[test]
    fn genericity_reports() {
        let g = check_line_genericity(&lines(&[(0, 2), (1, 1), (3, 0)]));
        assert!(g.is_generic());

        let g = check_line_genericity(&lines(&[(0, 2), (1, 1), (2, 0)]));
        assert!(!g.is_generic());
        assert_eq!(
            g.concurrent_triples,
            vec![ConcurrentTriple {
                lines: [0, 1, 2],
                at: Some(int(1))
            }]
        );

        let g = check_line_genericity(&lines(&[(0, 1), (0, 0)]));
        assert_eq!(g.intercept_ties, vec![(0, 1)]);
        assert!(g.concurrent_triples.is_empty());
    }

    #[test]
    fn parallel_triples_are_not_concurrent() {
        let g = check_line_genericity(&lines(&[(0, 0), (1, 0), (2, 0)]));
        assert!(g.is_generic());
        let g = check_line_genericity(&lines(&[(1, 0), (1, 0), (3, 2)]));
        assert_eq!(g.concurrent_triples[0].at, Some(int(-1)));
        let g = check_line_genericity(&lines(&[(1, 0), (1, 0), (1, 0)]));
        assert_eq!(g.concurrent_triples[0].at, None);
    }
}
