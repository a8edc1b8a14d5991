//! Exact comparison of `|C| / log W` ratios and rate certificates.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

/// The ratio `cut_size / log_q(count)` with `count >= 2`. The base `q`
/// cancels out of every comparison, so it is only needed for display.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CutRatio {
    pub cut_size: usize,
    pub count: usize,
}

impl CutRatio {
    /// `cut_size / log_q(count)` as a float.
    pub fn approx(&self, q: usize) -> f64 {
        self.cut_size as f64 * (q as f64).ln() / (self.count as f64).ln()
    }

    /// Value order, decided exactly: `a <= b` iff `W_b^|C_a| <= W_a^|C_b|`.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let lhs = BigUint::from(other.count).pow(self.cut_size as u32);
        let rhs = BigUint::from(self.count).pow(other.cut_size as u32);
        lhs.cmp(&rhs)
    }
}

/// A bound: finite ratio or `+inf` when no cut constrains.
///
/// `==` is structural; use [`BoundValue::cmp_value`] to compare values, so
/// that `2/log 2` and `4/log 4` come out equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundValue {
    Finite(CutRatio),
    Infinite,
}

impl BoundValue {
    /// Ratio for `cut_size` and a class count; counts of 1 (or 0) carry no
    /// information and give `+inf`.
    pub fn from_count(cut_size: usize, count: usize) -> Self {
        if count <= 1 {
            BoundValue::Infinite
        } else {
            BoundValue::Finite(CutRatio { cut_size, count })
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BoundValue::Finite(_))
    }

    pub fn approx(&self, q: usize) -> f64 {
        match self {
            BoundValue::Finite(r) => r.approx(q),
            BoundValue::Infinite => f64::INFINITY,
        }
    }

    /// Exact test of `value == p / d` for positive integers.
    pub fn equals_rational(&self, q: usize, numerator: usize, denominator: usize) -> bool {
        match self {
            BoundValue::Infinite => false,
            BoundValue::Finite(r) => {
                // cut / log_q W = p / d  <=>  W^p = q^(cut * d)
                BigUint::from(r.count).pow(numerator as u32)
                    == BigUint::from(q).pow((r.cut_size * denominator) as u32)
            }
        }
    }

    /// Exact `value <= p / d`.
    pub fn at_most_rational(&self, q: usize, numerator: usize, denominator: usize) -> bool {
        match self {
            BoundValue::Infinite => false,
            // cut / log_q W <= p / d  <=>  q^(cut * d) <= W^p
            BoundValue::Finite(r) => {
                BigUint::from(q).pow((r.cut_size * denominator) as u32)
                    <= BigUint::from(r.count).pow(numerator as u32)
            }
        }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self, other) {
            (BoundValue::Infinite, BoundValue::Infinite) => Ordering::Equal,
            (BoundValue::Infinite, _) => Ordering::Greater,
            (_, BoundValue::Infinite) => Ordering::Less,
            (BoundValue::Finite(a), BoundValue::Finite(b)) => a.cmp_value(b),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Finite(r) => write!(f, "{}/log({})", r.cut_size, r.count),
            BoundValue::Infinite => write!(f, "inf"),
        }
    }
}

/// Pigeonhole test `W^k <= |B|^(n |C|)` in exact arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RateCertificate {
    pub count: usize,
    pub k: usize,
    pub n: usize,
    pub edge_alphabet: usize,
    pub cut_size: usize,
    pub satisfied: bool,
}

impl RateCertificate {
    pub fn new(count: usize, k: usize, n: usize, edge_alphabet: usize, cut_size: usize) -> Option<Self> {
        if count == 0 || k == 0 || n == 0 || edge_alphabet == 0 || cut_size == 0 {
            return None;
        }
        let lhs = BigUint::from(count).pow(k as u32);
        let rhs = BigUint::from(edge_alphabet).pow((n * cut_size) as u32);
        Some(Self {
            count,
            k,
            n,
            edge_alphabet,
            cut_size,
            satisfied: lhs <= rhs,
        })
    }
}

impl fmt::Display for RateCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.satisfied { "<=" } else { ">" };
        write!(
            f,
            "{}^{} {} {}^({}*{})",
            self.count, self.k, op, self.edge_alphabet, self.n, self.cut_size
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(cut_size: usize, count: usize) -> CutRatio {
        CutRatio { cut_size, count }
    }

    #[test]
    fn ties_are_exact() {
        // 2/log 2 == 4/log 4, 3/log 8 == 1/log 2
        assert_eq!(r(2, 2).cmp_value(&r(4, 4)), Ordering::Equal);
        assert_eq!(r(3, 8).cmp_value(&r(1, 2)), Ordering::Equal);
        assert_eq!(r(3, 4).cmp_value(&r(2, 2)), Ordering::Less);
        assert_eq!(r(2, 3).cmp_value(&r(1, 2)), Ordering::Greater);
    }

    #[test]
    fn infinity_is_largest() {
        assert_eq!(
            BoundValue::from_count(1, 1).cmp_value(&BoundValue::from_count(100, 2)),
            Ordering::Greater
        );
        assert!(!BoundValue::from_count(5, 1).is_finite());
    }

    #[test]
    fn rational_checks() {
        let three_halves = BoundValue::from_count(3, 4);
        assert!(three_halves.equals_rational(2, 3, 2));
        assert!(three_halves.at_most_rational(2, 3, 2));
        assert!(!three_halves.at_most_rational(2, 7, 5));
        let two = BoundValue::from_count(2, 2);
        assert!(two.equals_rational(2, 2, 1));
        assert!(!two.equals_rational(2, 3, 2));
        // base matters for the rational reading: 2/log_4 2 = 4
        assert!(two.equals_rational(4, 4, 1));
    }

    #[test]
    fn certificates() {
        assert!(RateCertificate::new(2, 2, 1, 2, 2).unwrap().satisfied);
        assert!(!RateCertificate::new(2, 3, 1, 2, 2).unwrap().satisfied);
        assert!(RateCertificate::new(4, 1, 1, 2, 3).unwrap().satisfied);
        assert!(RateCertificate::new(0, 1, 1, 2, 3).is_none());
        assert!(RateCertificate::new(2, 1, 0, 2, 3).is_none());
        assert_eq!(RateCertificate::new(2, 3, 1, 2, 2).unwrap().to_string(), "2^3 > 2^(1*2)");
    }
}
