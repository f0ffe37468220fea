//! Exact minimum of `E` over the box `{Σλ = 0, ‖λ‖_∞ ≤ 1}`.
//!
//! `E` is linear on every cell cut out of the hyperplane by two families of
//! homogeneous walls:
//!
//! * weight ties `wᵢ(λ) = wⱼ(λ)`, where the maximal weight or the order of
//!   intercepts at `x = 0` can change;
//! * per variable `k`, concurrency of three lines `−wⱼ + αₖʲ x`, where the
//!   combinatorics of the envelope `φₖ` can change.
//!
//! Adding the box facets `λᵢ = ±1` makes every cell a bounded polytope, so
//! the minimum is attained at a point where `n` independent walls or facets
//! meet. All such points are enumerated and `E` evaluated exactly at each.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::SearchError;
use crate::polynomial::Support;
use crate::rational::{int, Rational};
use crate::stability::{energy, WeightVector};

/// Default cap on the number of constraint subsets examined.
pub const DEFAULT_BOX_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
enum WallOrigin {
    Tie(usize, usize),
    Concurrency { variable: usize, monomials: [usize; 3] },
}

/// Homogeneous hyperplane `normal · λ = 0`, normalized modulo `(1, …, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Wall {
    normal: Vec<i128>,
    origin: WallOrigin,
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.origin {
            WallOrigin::Tie(i, j) => write!(f, "w{i} = w{j}")?,
            WallOrigin::Concurrency { variable, monomials: [a, b, c] } => {
                write!(f, "phi{variable}: lines {a},{b},{c} concurrent")?
            }
        }
        write!(f, " [{}]", self.normal.iter().join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Constraint {
    Wall(usize),
    Facet { variable: usize, positive: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub minimum: Rational,
    pub witness: WeightVector,
    /// The walls and facets whose intersection is the witness.
    pub walls_used: Vec<String>,
    pub vertex_count: usize,
    pub wall_count: usize,
    pub subset_count: u128,
}

/// Subtracts the last entry from every entry (walls are only meaningful on
/// `Σλ = 0`), divides by the gcd and makes the first nonzero entry positive.
/// Returns `None` for walls containing the whole hyperplane.
fn canonical_normal(raw: &[i128]) -> Option<Vec<i128>> {
    let last = *raw.last()?;
    let mut v: Vec<i128> = raw.iter().map(|x| x - last).collect();
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g == 0 {
        return None;
    }
    let sign = if v.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) { -1 } else { 1 };
    for x in &mut v {
        *x = *x / g * sign;
    }
    Some(v)
}

fn collect_walls(support: &Support) -> Vec<Wall> {
    let exps: Vec<Vec<i128>> = support
        .monomials()
        .iter()
        .map(|m| m.exponents.iter().map(|&e| e as i128).collect())
        .collect();
    let p = exps.len();
    let len = support.n() + 1;
    let mut seen = BTreeSet::new();
    let mut walls = Vec::new();
    let mut push = |raw: Vec<i128>, origin: WallOrigin| {
        if let Some(normal) = canonical_normal(&raw) {
            if seen.insert(normal.clone()) {
                walls.push(Wall { normal, origin });
            }
        }
    };

    for i in 0..p {
        for j in i + 1..p {
            let raw = (0..len).map(|k| exps[i][k] - exps[j][k]).collect();
            push(raw, WallOrigin::Tie(i, j));
        }
    }
    // Lines b + a x with b = −w: the triple (j, l, m) is concurrent iff
    // b_j(a_m − a_l) + b_l(a_j − a_m) + b_m(a_l − a_j) = 0.
    for variable in 0..len {
        let a: Vec<i128> = exps.iter().map(|e| e[variable]).collect();
        for (j, l, m) in (0..p).tuple_combinations() {
            let (cj, cl, cm) = (a[m] - a[l], a[j] - a[m], a[l] - a[j]);
            let raw = (0..len)
                .map(|k| cj * exps[j][k] + cl * exps[l][k] + cm * exps[m][k])
                .collect();
            push(
                raw,
                WallOrigin::Concurrency {
                    variable,
                    monomials: [j, l, m],
                },
            );
        }
    }
    walls
}

fn binomial(m: u128, k: u128) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(m - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Solves the square system by Gauss–Jordan elimination; `None` if singular.
fn solve(mut rows: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let size = rows.len();
    for col in 0..size {
        let pivot = (col..size).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        let inv = Rational::one() / &rows[col][col];
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..size {
            if r != col && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..=size {
                    let delta = &factor * &rows[col][c];
                    rows[r][c] -= delta;
                }
            }
        }
    }
    Some(rows.into_iter().map(|mut r| r.pop().expect("augmented")).collect())
}

fn vertex_of(subset: &[usize], constraints: &[Constraint], walls: &[Wall], len: usize) -> Option<Vec<Rational>> {
    let mut rows = Vec::with_capacity(len);
    let mut trace = vec![Rational::one(); len];
    trace.push(Rational::zero());
    rows.push(trace);
    for &c in subset {
        let row = match constraints[c] {
            Constraint::Wall(w) => {
                let mut r: Vec<Rational> = walls[w].normal.iter().map(|&x| Rational::from_integer(x.into())).collect();
                r.push(Rational::zero());
                r
            }
            Constraint::Facet { variable, positive } => {
                let mut r = vec![Rational::zero(); len];
                r[variable] = Rational::one();
                r.push(if positive { Rational::one() } else { -Rational::one() });
                r
            }
        };
        rows.push(row);
    }
    let v = solve(rows)?;
    v.iter().all(|x| x.abs() <= Rational::one()).then_some(v)
}

fn constraint_list(walls: &[Wall], len: usize) -> Vec<Constraint> {
    let mut constraints: Vec<Constraint> = (0..walls.len()).map(Constraint::Wall).collect();
    for variable in 0..len {
        for positive in [true, false] {
            constraints.push(Constraint::Facet { variable, positive });
        }
    }
    constraints
}

/// Number of constraint subsets [`certify_min`] would examine, saturating at
/// `u128::MAX`.
pub fn constraint_subset_count(support: &Support) -> u128 {
    let walls = collect_walls(support);
    let constraints = constraint_list(&walls, support.n() + 1);
    binomial(constraints.len() as u128, support.n() as u128)
}

/// Exact minimum of `E` over `{Σλ = 0, ‖λ‖_∞ ≤ 1}` with a minimizing vertex.
///
/// Fails without doing any work if the number of `n`-subsets of walls and
/// facets exceeds `box_limit`. Among minimizing vertices the witness is the
/// lexicographically smallest.
pub fn certify_min(support: &Support, box_limit: u128) -> Result<Certificate, SearchError> {
    let len = support.n() + 1;
    let walls = collect_walls(support);
    let constraints = constraint_list(&walls, len);
    let dim = support.n();
    let subset_count = binomial(constraints.len() as u128, dim as u128);
    if subset_count > box_limit {
        return Err(SearchError::CombinatorialBudgetExceeded {
            subsets: subset_count,
            limit: box_limit,
        });
    }

    let found: Vec<(Vec<Rational>, Vec<usize>)> = (0..constraints.len())
        .combinations(dim)
        .par_bridge()
        .filter_map(|subset| vertex_of(&subset, &constraints, &walls, len).map(|v| (v, subset)))
        .collect();
    // First subset in lex order per vertex, independent of scheduling.
    let mut vertices: BTreeMap<Vec<Rational>, Vec<usize>> = BTreeMap::new();
    for (v, subset) in found {
        vertices
            .entry(v)
            .and_modify(|s| {
                if subset < *s {
                    *s = subset.clone()
                }
            })
            .or_insert(subset);
    }

    let evaluated: Vec<(Rational, WeightVector, Vec<usize>)> = vertices
        .into_par_iter()
        .map(|(v, subset)| {
            let lambda = WeightVector::new(v).expect("vertex lies on the trace hyperplane");
            energy(support, &lambda).map(|e| (e, lambda, subset))
        })
        .collect::<Result<_, _>>()?;
    let vertex_count = evaluated.len();
    let (minimum, witness, subset) = evaluated
        .into_iter()
        .min_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)))
        .unwrap_or_else(|| (Rational::zero(), WeightVector::zero(len), Vec::new()));

    let walls_used = subset
        .iter()
        .map(|&c| match constraints[c] {
            Constraint::Wall(w) => walls[w].to_string(),
            Constraint::Facet { variable, positive } => {
                format!("lambda{variable} = {}", if positive { int(1) } else { int(-1) })
            }
        })
        .collect();
    Ok(Certificate {
        minimum,
        witness,
        walls_used,
        vertex_count,
        wall_count: walls.len(),
        subset_count,
    })
}
