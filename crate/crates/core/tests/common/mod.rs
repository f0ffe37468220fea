#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kstab::rational::{int, ratio};
use kstab::{parse_polynomial, Line, Rational, Support, WeightVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_path(name: &str) -> PathBuf {
    manifest_dir().join("tests").join("fixtures").join(name)
}

pub fn fixture(name: &str) -> Support {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_polynomial(&text).expect("fixture parses")
}

pub fn lambda(values: &[i64]) -> WeightVector {
    WeightVector::from_ints(values).expect("zero sum")
}

/// Degree-`d` Fermat support in `P^n`.
pub fn fermat(n: usize, d: u32) -> Support {
    let terms = (0..=n).map(|k| {
        let mut e = vec![0; n + 1];
        e[k] = d;
        (e, Rational::one())
    });
    Support::from_terms(Some(n), terms).expect("Fermat support is valid")
}

/// Line family with 3 to 12 lines, numerators in `[-100, 100]` (slopes in
/// `[0, 100]`), and at least one horizontal line. Slope denominators are
/// `slope_den` when given, otherwise random in `1..=100`.
pub fn random_line_family(rng: &mut ChaCha8Rng, slope_den: Option<i64>) -> Vec<Line> {
    let count = rng.random_range(3..=12usize);
    let mut lines: Vec<Line> = (0..count)
        .map(|_| {
            let b = ratio(rng.random_range(-100..=100), rng.random_range(1..=100));
            let den = slope_den.unwrap_or_else(|| rng.random_range(1..=100));
            let a = ratio(rng.random_range(0..=100), den);
            Line::new(b, a)
        })
        .collect();
    let flat = rng.random_range(0..count);
    lines[flat].slope = Rational::zero();
    lines
}

/// Exact penalty of the lower envelope of `lines` on `[0, ∞)`, computed by
/// evaluating the pointwise minimum between consecutive candidate breakpoints.
/// Returns `None` when the tail slope makes the integral diverge.
pub fn oracle_penalty(lines: &[Line]) -> Option<Rational> {
    let mut cuts: BTreeSet<Rational> = BTreeSet::new();
    cuts.insert(Rational::zero());
    for (i, p) in lines.iter().enumerate() {
        for q in &lines[i + 1..] {
            if p.slope != q.slope {
                let x = (&q.intercept - &p.intercept) / (&p.slope - &q.slope);
                if x > Rational::zero() {
                    cuts.insert(x);
                }
            }
        }
    }
    let min_at = |x: &Rational| -> Rational {
        lines
            .iter()
            .map(|l| &l.intercept + &l.slope * x)
            .min()
            .expect("nonempty family")
    };
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let mut total = Rational::zero();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let s = (min_at(hi) - min_at(lo)) / (hi - lo);
        total += (hi - lo) * &s * (&s - Rational::one());
    }
    let last = cuts.last().expect("contains zero");
    let tail = min_at(&(last + Rational::one())) - min_at(last);
    if tail.is_zero() || tail.is_one() {
        Some(total)
    } else {
        None
    }
}

pub fn oracle_weights(support: &Support, lambda: &WeightVector) -> Vec<Rational> {
    support
        .monomials()
        .iter()
        .map(|m| {
            m.exponents
                .iter()
                .zip(lambda.entries())
                .fold(Rational::zero(), |acc, (&e, l)| acc + l * int(e as i64))
        })
        .collect()
}

/// `E(λ)` assembled from [`oracle_penalty`] and hand-written weights.
pub fn oracle_energy(support: &Support, lambda: &WeightVector) -> Rational {
    let w = oracle_weights(support, lambda);
    let lambda_max = w.iter().max().expect("nonempty").clone();
    let n = support.n() as i64;
    let d = support.degree() as i64;
    let mut e = -&lambda_max * ratio((d - 1) * (n + 1), n);
    for k in 0..=support.n() {
        let lines: Vec<Line> = support
            .monomials()
            .iter()
            .zip(&w)
            .map(|(m, wj)| Line::new(-wj.clone(), int(m.exponents[k] as i64)))
            .collect();
        e += oracle_penalty(&lines).expect("tail slope 0 on a valid support");
    }
    e
}

fn random_exponents(rng: &mut ChaCha8Rng, len: usize, d: u32) -> Vec<u32> {
    let mut e = vec![0; len];
    for _ in 0..d {
        e[rng.random_range(0..len)] += 1;
    }
    e
}

/// Random valid support with `1 ≤ n ≤ 4`, `1 ≤ d ≤ 4` and 2 to 6 monomials
/// with coefficients in `1..=9`.
pub fn random_support(rng: &mut ChaCha8Rng) -> Support {
    loop {
        let n = rng.random_range(1..=4usize);
        let d = rng.random_range(1..=4u32);
        let count = rng.random_range(2..=6usize);
        let terms: Vec<(Vec<u32>, Rational)> = (0..count)
            .map(|_| (random_exponents(rng, n + 1, d), int(rng.random_range(1..=9))))
            .collect();
        if let Ok(s) = Support::from_terms(Some(n), terms) {
            if s.zero_exponent_witnesses().iter().all(Option::is_some) {
                return s;
            }
        }
    }
}

/// Zero-sum integer vector with entries drawn from `[-range, range]` and the
/// last entry forced.
pub fn random_int_lambda(rng: &mut ChaCha8Rng, len: usize, range: i64) -> WeightVector {
    let mut v: Vec<i64> = (0..len - 1).map(|_| rng.random_range(-range..=range)).collect();
    v.push(-v.iter().sum::<i64>());
    lambda(&v)
}

/// Zero-sum rational vector obtained by centering random integers.
pub fn random_rational_lambda(rng: &mut ChaCha8Rng, len: usize, range: i64) -> WeightVector {
    let draws: Vec<i64> = (0..len).map(|_| rng.random_range(-range..=range)).collect();
    let mean = ratio(draws.iter().sum(), len as i64);
    WeightVector::new(draws.iter().map(|&x| int(x) - &mean).collect()).expect("centered")
}

pub fn random_permutation(rng: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    perm
}

/// One CLI invocation with a frozen expected output under `tests/golden`.
pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
}

pub const GOLDEN_CASES: &[GoldenCase] = &[
    GoldenCase {
        name: "eval-fermat3",
        args: &["eval", "-f", "fermat3.poly", "--lambda", "1,1,1,-3", "--json"],
    },
    GoldenCase {
        name: "eval-fermat3-generic",
        args: &["eval", "-f", "fermat3.poly", "--lambda", "6,-1,-2,-3", "--json", "--float"],
    },
    GoldenCase {
        name: "eval-conic-json",
        args: &["eval", "-f", "conic.json", "--lambda", "1,0,-1", "--json"],
    },
    GoldenCase {
        name: "search-fermat3",
        args: &["search", "-f", "fermat3.poly", "--height", "1", "--samples", "8", "--seed", "7", "--json"],
    },
    GoldenCase {
        name: "search-conic",
        args: &["search", "-f", "conic.poly", "--height", "2", "--samples", "16", "--seed", "42", "--trace", "--json"],
    },
    GoldenCase {
        name: "certify-quadric",
        args: &["certify", "-f", "quadric.poly", "--json"],
    },
    GoldenCase {
        name: "certify-conic",
        args: &["certify", "-f", "conic.poly", "--json"],
    },
    GoldenCase {
        name: "futaki-cone-cubic",
        args: &["futaki", "-f", "cone-cubic.poly", "--lambda", "1,1,1,-3", "--json"],
    },
];

pub fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests").join("golden").join(format!("{name}.json"))
}

/// Runs the `kstab` binary from the fixture directory so that relative input
/// paths resolve.
pub fn run_kstab(args: &[&str]) -> Output {
    run_kstab_in(&manifest_dir().join("tests").join("fixtures"), args)
}

pub fn run_kstab_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kstab"))
        .args(args)
        .current_dir(dir)
        .env_remove("KSTAB_JOBS")
        .output()
        .expect("kstab binary runs")
}
