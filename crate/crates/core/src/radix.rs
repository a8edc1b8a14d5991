//! Mixed-radix ranking with the first digit most significant.
//!
//! Every dense table in the crate (truth tables, encoder tables, decoder
//! tables) is indexed through these helpers, so the linearization is the
//! same everywhere: `(d_1, ..., d_L)` over base `b` maps to
//! `sum_j d_j * b^(L-j)`.

/// `base^len`, or `None` on overflow.
pub fn checked_pow(base: usize, len: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..len {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Rank of `digits` in base `base`.
pub fn rank(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| {
        debug_assert!(d < base);
        acc * base + d
    })
}

/// Rank of `digits` where digit `j` has its own radix `radices[j]`.
pub fn rank_mixed(digits: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(digits.len(), radices.len());
    digits
        .iter()
        .zip(radices)
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

/// Inverse of [`rank`]: writes `len` digits of `index` into `out`.
pub fn unrank_into(mut index: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
}

pub fn unrank(index: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    unrank_into(index, base, &mut out);
    out
}

/// Inverse of [`rank_mixed`].
pub fn unrank_mixed(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (slot, &r) in out.iter_mut().zip(radices).rev() {
        *slot = index % r;
        index /= r;
    }
    out
}

/// Odometer over `base^len` digit vectors in rank order.
pub fn increment(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_digit_is_most_significant() {
        assert_eq!(rank(&[1, 1, 0], 2), 6);
        assert_eq!(unrank(6, 2, 3), vec![1, 1, 0]);
        assert_eq!(rank(&[], 5), 0);
    }

    #[test]
    fn mixed_round_trip() {
        let radices = [3, 2, 4];
        for i in 0..24 {
            assert_eq!(rank_mixed(&unrank_mixed(i, &radices), &radices), i);
        }
    }

    #[test]
    fn odometer_visits_in_rank_order() {
        let mut digits = vec![0; 3];
        let mut seen = vec![rank(&digits, 3)];
        while increment(&mut digits, 3) {
            seen.push(rank(&digits, 3));
        }
        assert_eq!(seen, (0..27).collect::<Vec<_>>());
    }

    #[test]
    fn pow_overflow() {
        assert_eq!(checked_pow(2, 10), Some(1024));
        assert_eq!(checked_pow(2, 200), None);
        assert_eq!(checked_pow(7, 0), Some(1));
    }
}
