//! Oldform basis combinatorics: dimensions of fixed-vector spaces at deep
//! level and the twisted trace of the normalized involution on them.
//!
//! The basis of the level-`c+k` space is indexed by tuples
//! `(a_1, ..., a_{N-1})` of non-negative integers with `sum a_i <= k`; the
//! twisted operator permutes the index set by
//! `(a_1, ..., a_{N-1}) -> (a_{N-2}, ..., a_1, k - sum a_i)` and its trace is
//! the number of fixed indices (up to the newvector eigenvalue, which the
//! caller tracks symbolically).

use num_bigint::BigInt;
use num_traits::Zero;
#[cfg(test)]
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};

/// Which of the three index actions applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceCase {
    SelfDual,
    ConjNonsplit,
    ConjSplit,
}

impl TraceCase {
    pub const ALL: [TraceCase; 3] = [TraceCase::SelfDual, TraceCase::ConjNonsplit, TraceCase::ConjSplit];
}

/// Number of basis tuples at depth `k`: `#{(a_i) >= 0 : sum a_i <= k} = C(k+N-1, N-1)`.
pub fn oldform_dimension(n: u32, k: u32) -> BigInt {
    assert!(n >= 2);
    binomial(k as i64 + n as i64 - 1, n as i64 - 1)
}

/// The displayed binomial value of the twisted trace. The `+-1` newvector
/// eigenvalue is excluded; the caller carries it.
pub fn closed_form_trace(case: TraceCase, n: u32, k: u32) -> BigInt {
    assert!(n >= 2);
    let (n, k) = (n as i64, k as i64);
    match case {
        TraceCase::ConjSplit => binomial(k + n - 1, n - 1),
        TraceCase::SelfDual | TraceCase::ConjNonsplit => {
            if n % 2 == 0 {
                if k % 2 == 0 {
                    binomial(k / 2 + n / 2 - 1, n / 2 - 1)
                } else {
                    BigInt::zero()
                }
            } else {
                // both parities collapse to floor(k/2)
                binomial(k / 2 + (n - 1) / 2, (n - 1) / 2)
            }
        }
    }
}

/// The sequence `j -> closed_form_trace(case, n, j)`, the trace profile the
/// coefficient schedules convolve against. `T(0) = 1` in every case.
pub fn trace_profile(case: TraceCase, n: u32, len: usize) -> Vec<BigInt> {
    (0..len).map(|j| closed_form_trace(case, n, j as u32)).collect()
}

const ENUM_BUDGET: u64 = 10_000_000;

fn index_action(a: &[u32], k: u32) -> Vec<u32> {
    let n1 = a.len();
    let d: u32 = a.iter().sum();
    let mut out = Vec::with_capacity(n1);
    // (a_1, ..., a_{N-1}) -> (a_{N-2}, ..., a_1, k - d)
    for i in (0..n1.saturating_sub(1)).rev() {
        out.push(a[i]);
    }
    out.push(k - d);
    out
}

fn for_each_tuple(n1: usize, k: u32, mut f: impl FnMut(&[u32])) {
    let mut a = vec![0u32; n1];
    loop {
        f(&a);
        // lexicographic successor within sum <= k
        let mut i = n1;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            let sum: u32 = a.iter().sum();
            if sum < k {
                a[i] += 1;
                break;
            }
            a[i] = 0;
        }
    }
}

fn count_fixed_seq(case: TraceCase, n: u32, k: u32) -> u64 {
    let n1 = (n - 1) as usize;
    let mut count = 0u64;
    match case {
        TraceCase::SelfDual | TraceCase::ConjNonsplit => {
            for_each_tuple(n1, k, |a| {
                if index_action(a, k) == a {
                    count += 1;
                }
            });
        }
        TraceCase::ConjSplit => {
            // A pair (a, b) is fixed iff b = a* and a = b*; so there is at
            // most one fixed pair per first factor, realized iff a** = a.
            for_each_tuple(n1, k, |a| {
                let b = index_action(a, k);
                if index_action(&b, k) == a {
                    count += 1;
                }
            });
        }
    }
    count
}

#[cfg(feature = "parallel")]
fn count_fixed_impl(case: TraceCase, n: u32, k: u32) -> u64 {
    use rayon::prelude::*;
    let n1 = (n - 1) as usize;
    if n1 <= 1 {
        return count_fixed_seq(case, n, k);
    }
    // fan out over the first coordinate
    (0..=k)
        .into_par_iter()
        .map(|a1| {
            let mut count = 0u64;
            for_each_tuple(n1 - 1, k - a1, |rest| {
                let mut a = Vec::with_capacity(n1);
                a.push(a1);
                a.extend_from_slice(rest);
                let b = index_action(&a, k);
                let fixed = match case {
                    TraceCase::ConjSplit => index_action(&b, k) == a,
                    _ => b == a,
                };
                if fixed {
                    count += 1;
                }
            });
            count
        })
        .sum()
}

#[cfg(not(feature = "parallel"))]
fn count_fixed_impl(case: TraceCase, n: u32, k: u32) -> u64 {
    count_fixed_seq(case, n, k)
}

/// Exact fixed-point count of the index involution by exhaustive enumeration.
pub fn involution_fixed_points(case: TraceCase, n: u32, k: u32) -> Result<BigInt> {
    involution_fixed_points_with(case, n, k, count_fixed_impl)
}

/// Sequential variant, kept public for the benchmark comparison.
pub fn involution_fixed_points_seq(case: TraceCase, n: u32, k: u32) -> Result<BigInt> {
    involution_fixed_points_with(case, n, k, count_fixed_seq)
}

fn involution_fixed_points_with(
    case: TraceCase,
    n: u32,
    k: u32,
    counter: impl Fn(TraceCase, u32, u32) -> u64,
) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::invalid("rank must be at least 2"));
    }
    let dim = oldform_dimension(n, k);
    if dim > BigInt::from(ENUM_BUDGET) {
        return Err(Error::BudgetExceeded(format!(
            "index space of size {dim} exceeds {ENUM_BUDGET}"
        )));
    }
    Ok(BigInt::from(counter(case, n, k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_by_enumeration() {
        // (2, 3): tuples (a_1) with a_1 <= 3
        assert_eq!(oldform_dimension(2, 3), BigInt::from(4));
        assert_eq!(oldform_dimension(4, 0), BigInt::one());
        // frozen from exhaustive tuple enumeration below
        assert_eq!(oldform_dimension(4, 2), BigInt::from(10));
        for n in 2..=5u32 {
            for k in 0..=6u32 {
                let mut count = 0u64;
                for_each_tuple((n - 1) as usize, k, |_| count += 1);
                assert_eq!(oldform_dimension(n, k), BigInt::from(count), "N={n} k={k}");
            }
        }
    }

    #[test]
    fn dimension_shell_count() {
        for n in 2..=6u32 {
            for k in 1..=8u32 {
                let shell = oldform_dimension(n, k) - oldform_dimension(n, k - 1);
                assert_eq!(shell, binomial(k as i64 + n as i64 - 2, n as i64 - 2));
            }
        }
    }

    #[test]
    fn fixed_point_examples() {
        // the tuples (0,0,1) and (1,1,0)
        assert_eq!(involution_fixed_points(TraceCase::SelfDual, 4, 2).unwrap(), BigInt::from(2));
        assert_eq!(involution_fixed_points(TraceCase::SelfDual, 4, 1).unwrap(), BigInt::zero());
        // unique fixed tuple (1, 0)
        assert_eq!(involution_fixed_points(TraceCase::SelfDual, 3, 1).unwrap(), BigInt::one());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_trace(TraceCase::SelfDual, 4, 2), BigInt::from(2));
        assert_eq!(closed_form_trace(TraceCase::ConjSplit, 2, 3), BigInt::from(4));
        assert_eq!(closed_form_trace(TraceCase::SelfDual, 3, 3), BigInt::from(2));
        for case in TraceCase::ALL {
            for n in 2..=8 {
                assert_eq!(closed_form_trace(case, n, 0), BigInt::one());
            }
        }
    }

    #[test]
    fn split_action_is_involution() {
        for n in [2u32, 3, 4, 5] {
            for k in 0..=5u32 {
                for_each_tuple((n - 1) as usize, k, |a| {
                    let b = index_action(a, k);
                    assert_eq!(index_action(&b, k), a, "star is an involution");
                });
            }
        }
    }

    #[test]
    fn seq_matches_parallel() {
        for case in TraceCase::ALL {
            for n in 2..=5u32 {
                for k in 0..=7u32 {
                    assert_eq!(
                        involution_fixed_points(case, n, k).unwrap(),
                        involution_fixed_points_seq(case, n, k).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            involution_fixed_points(TraceCase::SelfDual, 30, 40),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
