//! Word-level subset helpers: binomials, k-subset iteration, colex ranking.

/// Mask with the low `n` bits set.
#[inline]
pub fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `sum_{i <= m} C(n, i)`; zero for negative `m`.
pub fn binomial_prefix_sum(n: usize, m: i64) -> u128 {
    if m < 0 {
        return 0;
    }
    (0..=(m as usize).min(n)).map(|i| binomial(n, i)).sum()
}

/// Gathers the bits of `value` selected by `selector` into the low bits of
/// the result, preserving order (software `pext`).
#[inline]
pub fn extract_bits(value: u64, mut selector: u64) -> u64 {
    let mut out = 0u64;
    let mut dst = 0;
    while selector != 0 {
        let low = selector & selector.wrapping_neg();
        if value & low != 0 {
            out |= 1 << dst;
        }
        dst += 1;
        selector ^= low;
    }
    out
}

/// Iterates over the `k`-element subsets of `{0, .., n-1}` as masks in
/// ascending integer order (Gosper's hack, widened to avoid overflow at n = 64).
#[derive(Clone, Debug)]
pub struct KSubsets {
    limit: u128,
    next: Option<u128>,
}

impl KSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        let next = if k > n {
            None
        } else {
            Some((1u128 << k) - 1)
        };
        KSubsets {
            limit: 1u128 << n,
            next,
        }
    }
}

impl Iterator for KSubsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        if cur >= self.limit {
            self.next = None;
            return None;
        }
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            Some((((ripple ^ cur) >> 2) / low) | ripple)
        };
        Some(cur as u64)
    }
}

/// Rank of a k-subset in colex order (combinatorial number system).
pub fn colex_rank(mask: u64) -> u128 {
    let mut rank = 0u128;
    let mut bits = mask;
    let mut i = 0;
    while bits != 0 {
        let c = bits.trailing_zeros() as usize;
        rank += binomial(c, i + 1);
        bits &= bits - 1;
        i += 1;
    }
    rank
}

/// Inverse of [`colex_rank`] for subsets of size `k` of an `n`-set.
pub fn colex_unrank(mut rank: u128, n: usize, k: usize) -> u64 {
    let mut mask = 0u64;
    let mut hi = n;
    for i in (1..=k).rev() {
        let mut c = hi;
        while c > 0 && binomial(c - 1, i) > rank {
            c -= 1;
        }
        // largest c' = c - 1 with C(c', i) <= rank
        let c = c - 1;
        mask |= 1 << c;
        rank -= binomial(c, i);
        hi = c;
    }
    mask
}
