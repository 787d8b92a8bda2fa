//! Closed-form quantities for uniformly random instances.
//!
//! * [`pmnk_exact`]: probability that `m` independent uniform `k`-subsets
//!   of an `n`-universe cover it, as an exact fraction.
//! * [`pmnk_montecarlo`]: sampled estimate of the same probability.
//! * [`randomized_lower_bound`]: the phase recursion bounding the expected
//!   aggregate cardinality reached by the randomized algorithm.
//! * [`approx_condition_holds`]: the range of `k` for which that bound
//!   certifies a factor-4 approximation.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// A probability held as a reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactProbability(Ratio<BigUint>);

impl ExactProbability {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Self {
        ExactProbability(Ratio::new(numerator, denominator))
    }

    pub fn numerator(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn value(&self) -> f64 {
        // both parts can overflow f64 on their own, so scale first
        let (num, den) = (self.numerator(), self.denominator());
        let shift = den.bits().saturating_sub(1000);
        let num = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
        let den = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

fn check_mnk(m: usize, n: usize, k: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// Pascal table of `C(a, b)` for `a <= rows`, `b <= cols`.
struct Binomials {
    rows: usize,
    cols: usize,
    table: Vec<BigUint>,
}

impl Binomials {
    fn new(rows: usize, cols: usize) -> Self {
        let width = cols + 1;
        let mut table = vec![BigUint::zero(); (rows + 1) * width];
        for a in 0..=rows {
            table[a * width] = BigUint::one();
            for b in 1..=cols.min(a) {
                let v = &table[(a - 1) * width + b - 1] + &table[(a - 1) * width + b];
                table[a * width + b] = v;
            }
        }
        Binomials { rows, cols, table }
    }

    /// `C(a, b)`, zero whenever the arguments are out of range.
    fn get(&self, a: i64, b: i64) -> BigUint {
        if a < 0 || b < 0 || b > a || a as usize > self.rows || b as usize > self.cols {
            return BigUint::zero();
        }
        self.table[a as usize * (self.cols + 1) + b as usize].clone()
    }
}

/// Exact coverage probability.
///
/// Counts ordered tuples `(O_1..O_m)` of `k`-subsets whose union is the whole
/// universe. Adding the `j`-th set to a running union of size `U` with `t`
/// overlapping segments has `C(U, t)·C(n − U, k − t)` choices and moves the
/// union to `U + k − t`; summing over overlap sequences that end at `U = n`
/// is the composition sum over `k_1..k_{m−1}` with `Σk_j = mk − n`, grouped
/// by running union size so it costs `O(m·n·k)` big-integer operations.
pub fn pmnk_exact(m: usize, n: usize, k: usize) -> Result<ExactProbability> {
    check_mnk(m, n, k)?;
    let total = n_choose_k(n, k).pow(m as u32);
    if m * k < n {
        return Ok(ExactProbability::new(BigUint::zero(), BigUint::one()));
    }
    let binom = Binomials::new(n, k);
    let mut ways = vec![BigUint::zero(); n + 1];
    ways[k] = binom.get(n as i64, k as i64);
    for _ in 1..m {
        let mut next = vec![BigUint::zero(); n + 1];
        for (u, count) in ways.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for t in 0..=k.min(u) {
                if k - t > n - u {
                    continue;
                }
                let choices =
                    binom.get(u as i64, t as i64) * binom.get((n - u) as i64, (k - t) as i64);
                next[u + k - t] += count * choices;
            }
        }
        ways = next;
    }
    Ok(ExactProbability::new(ways[n].clone(), total))
}

fn n_choose_k(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// The same probability summed term by term over every composition
/// `(k_1..k_{m−1})` of `mk − n` with parts in `0..=k`.
///
/// Exponential in `m`; kept as an independent route for cross-checking
/// [`pmnk_exact`] on small inputs.
pub fn pmnk_by_compositions(m: usize, n: usize, k: usize) -> Result<ExactProbability> {
    check_mnk(m, n, k)?;
    let total = n_choose_k(n, k).pow(m as u32);
    if m * k < n {
        return Ok(ExactProbability::new(BigUint::zero(), BigUint::one()));
    }
    let binom = Binomials::new(n.max(m * k), k);
    let (n, k) = (n as i64, k as i64);
    let mass = (m as i64) * k - n;

    // union size before node j (1-based) is (j−1)k − Σ_{i≤j−2} k_i
    struct Walk<'a> {
        binom: &'a Binomials,
        n: i64,
        k: i64,
        favourable: BigUint,
    }

    impl Walk<'_> {
        fn step(&mut self, parts_left: usize, mass_left: i64, union: i64, acc: &BigUint) {
            if parts_left == 0 {
                if mass_left == 0 {
                    self.favourable += acc;
                }
                return;
            }
            for kj in 0..=self.k.min(mass_left) {
                let factor =
                    self.binom.get(union, kj) * self.binom.get(self.n - union, self.k - kj);
                if !factor.is_zero() {
                    self.step(
                        parts_left - 1,
                        mass_left - kj,
                        union + self.k - kj,
                        &(acc * factor),
                    );
                }
            }
        }
    }

    let mut walk = Walk {
        binom: &binom,
        n,
        k,
        favourable: BigUint::zero(),
    };
    walk.step(m - 1, mass, k, &binom.get(n, k));
    let favourable = walk.favourable;
    Ok(ExactProbability::new(favourable, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Fraction of `trials` sampled instances whose union is the universe.
pub fn pmnk_montecarlo(
    m: usize,
    n: usize,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<CoverageEstimate> {
    check_mnk(m, n, k)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = vec![0u64; n];
    let mut hits = 0u64;
    for trial in 1..=trials {
        let mut covered = 0;
        for _ in 0..m {
            for seg in sample(&mut rng, n, k) {
                if seen[seg] != trial {
                    seen[seg] = trial;
                    covered += 1;
                }
            }
        }
        if covered == n {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok(CoverageEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        seed,
    })
}

/// Per-phase expected node cardinalities behind [`randomized_lower_bound`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTrace {
    /// `s_1 = k, s_2, …, s_P`: expected set size at the start of each phase.
    pub cardinalities: Vec<f64>,
    /// `max(m − 2^{p−1}, 0)/(m − 1)` for every applied phase `p`.
    pub factors: Vec<f64>,
    pub bound: f64,
}

/// Lower bound on the expected aggregate cardinality of the randomized
/// algorithm on uniform `k`-subset instances.
///
/// Iterates `s_{p+1} = s_p + s_p(1 − s_p/n)·max(m − 2^{p−1}, 0)/(m − 1)`
/// from `s_1 = k` and stops at the first phase whose factor is zero, i.e.
/// once `2^{p−1} >= m`. Returns `m·s_P`.
pub fn randomized_lower_bound(m: usize, n: usize, k: usize) -> Result<(f64, BoundTrace)> {
    if m < 2 {
        return Err(Error::InvalidArgument("m must be at least 2".into()));
    }
    check_mnk(m, n, k)?;
    let (mf, nf) = (m as f64, n as f64);
    let mut s = k as f64;
    let mut cardinalities = vec![s];
    let mut factors = Vec::new();
    let mut reach: usize = 1; // 2^{p−1}
    while reach < m {
        let factor = (m - reach) as f64 / (mf - 1.0);
        s += s * (1.0 - s / nf) * factor;
        factors.push(factor);
        cardinalities.push(s);
        reach = reach.saturating_mul(2);
    }
    let bound = mf * s;
    Ok((
        bound,
        BoundTrace {
            cardinalities,
            factors,
            bound,
        },
    ))
}

/// Whether `min(n/log₂m, n/4) <= k <= n − 1`.
pub fn approx_condition_holds(m: usize, n: usize, k: usize) -> bool {
    if m < 2 || k + 1 > n {
        return false;
    }
    let nf = n as f64;
    let lower = (nf / (m as f64).log2()).min(nf / 4.0);
    k as f64 >= lower
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(a: u64, b: u64) -> ExactProbability {
        ExactProbability::new(BigUint::from(a), BigUint::from(b))
    }

    #[test]
    fn pmnk_small_values() {
        assert_eq!(pmnk_exact(2, 2, 1).unwrap(), ratio(1, 2));
        assert_eq!(pmnk_exact(3, 10, 2).unwrap(), ratio(0, 1));
        assert_eq!(pmnk_exact(4, 7, 7).unwrap(), ratio(1, 1));
        assert_eq!(pmnk_exact(1, 5, 5).unwrap(), ratio(1, 1));
        assert_eq!(pmnk_exact(1, 5, 4).unwrap(), ratio(0, 1));
        assert_eq!(pmnk_exact(2, 2, 1).unwrap().to_string(), "1/2");
    }

    #[test]
    fn pmnk_argument_errors() {
        assert!(pmnk_exact(2, 3, 4).is_err());
        assert!(pmnk_exact(0, 3, 1).is_err());
        assert!(pmnk_exact(2, 3, 0).is_err());
        assert!(pmnk_montecarlo(2, 3, 1, 0, 1).is_err());
    }

    #[test]
    fn two_routes_agree() {
        for m in 1..=6 {
            for n in 1..=9 {
                for k in 1..=n {
                    assert_eq!(
                        pmnk_exact(m, n, k).unwrap(),
                        pmnk_by_compositions(m, n, k).unwrap(),
                        "m={m} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn value_survives_huge_fractions() {
        let p = pmnk_exact(60, 100, 7).unwrap();
        let v = p.value();
        assert!(v > 0.0 && v < 1.0, "{v}");
    }

    #[test]
    fn montecarlo_degenerate_cases() {
        let e = pmnk_montecarlo(3, 5, 5, 100, 1).unwrap();
        assert_eq!((e.estimate, e.stderr), (1.0, 0.0));
        let e = pmnk_montecarlo(2, 5, 2, 100, 1).unwrap();
        assert_eq!(e.estimate, 0.0);
        assert_eq!(
            pmnk_montecarlo(3, 8, 3, 500, 7).unwrap(),
            pmnk_montecarlo(3, 8, 3, 500, 7).unwrap()
        );
    }

    #[test]
    fn bound_trace_shape() {
        let (b, trace) = randomized_lower_bound(60, 100, 3).unwrap();
        assert_eq!(trace.cardinalities[0], 3.0);
        assert_eq!(trace.factors[0], 1.0);
        // phases p = 1..=6 have 2^{p−1} < 60
        assert_eq!(trace.factors.len(), 6);
        assert!(trace.cardinalities.windows(2).all(|w| w[0] <= w[1]));
        assert!(trace.cardinalities.iter().all(|&s| s <= 100.0));
        assert_eq!(b, trace.bound);

        let (b, _) = randomized_lower_bound(9, 12, 12).unwrap();
        assert_eq!(b, 108.0);
        let (b, t) = randomized_lower_bound(2, 10, 4).unwrap();
        assert_eq!(t.factors, vec![1.0]);
        assert!((b - 2.0 * (4.0 + 4.0 * 0.6)).abs() < 1e-12);
    }

    #[test]
    fn approx_condition_examples() {
        assert!(approx_condition_holds(16, 100, 25));
        assert!(!approx_condition_holds(1024, 100, 9));
        assert!(approx_condition_holds(1024, 100, 10));
        assert!(!approx_condition_holds(16, 100, 100));
        assert!(!approx_condition_holds(16, 100, 24));
    }
}
