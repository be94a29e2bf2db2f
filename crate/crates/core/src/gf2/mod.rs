//! GF(2) linear algebra and multilinear polynomials.

mod matrix;
mod poly;

pub use matrix::{BitMatrix, BitVector};
pub use poly::{substitute_sum, MlPoly, PairPoly};

/// Sorts `items` and keeps exactly those occurring an odd number of times.
pub(crate) fn reduce_mod2<T: Ord + Copy>(mut items: Vec<T>) -> Vec<T> {
    items.sort_unstable();
    let mut out = Vec::with_capacity(items.len());
    let mut i = 0;
    while i < items.len() {
        let mut j = i + 1;
        while j < items.len() && items[j] == items[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(items[i]);
        }
        i = j;
    }
    out
}
