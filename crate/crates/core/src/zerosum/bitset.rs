//! Dense bitset over a box `[-W_1, W_1] x ... x [-W_d, W_d]` of lattice points,
//! used to hold the set of achievable sub-multiset sums of a sequence.
//!
//! Points are flattened row-major, so translating the whole set by a vector is
//! a single shift of the bit array. The caller guarantees that every stored sum
//! stays inside the box after translation; under that invariant the flattened
//! shift never wraps across rows.

#[derive(Clone, Debug)]
pub struct SumSet {
    half: Vec<i64>,
    strides: Vec<i64>,
    bits: usize,
    words: Vec<u64>,
}

impl SumSet {
    pub fn new(half: &[i64]) -> Self {
        let d = half.len();
        let mut strides = vec![0i64; d];
        let mut acc = 1i64;
        for k in (0..d).rev() {
            strides[k] = acc;
            acc = acc.checked_mul(2 * half[k] + 1).expect("sum box too large");
        }
        let bits = acc as usize;
        SumSet {
            half: half.to_vec(),
            strides,
            bits,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    /// Number of lattice points in the box.
    pub fn capacity(half: &[i64]) -> Option<u128> {
        half.iter()
            .try_fold(1u128, |acc, &w| acc.checked_mul(2 * w as u128 + 1))
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn copy_from(&mut self, other: &SumSet) {
        self.words.copy_from_slice(&other.words);
    }

    /// Flattened offset of a translation vector.
    pub fn offset(&self, v: &[i64]) -> isize {
        v.iter().zip(&self.strides).map(|(a, s)| a * s).sum::<i64>() as isize
    }

    fn index(&self, v: &[i64]) -> Option<usize> {
        let mut idx = 0i64;
        for ((&c, &h), &s) in v.iter().zip(&self.half).zip(&self.strides) {
            if c < -h || c > h {
                return None;
            }
            idx += (c + h) * s;
        }
        Some(idx as usize)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.index(v)
            .is_some_and(|i| self.words[i >> 6] >> (i & 63) & 1 == 1)
    }

    pub fn insert(&mut self, v: &[i64]) {
        let i = self.index(v).expect("point outside sum box");
        self.words[i >> 6] |= 1 << (i & 63);
    }

    /// `self |= src + shift` where `shift` is a flattened offset.
    pub fn or_shifted(&mut self, src: &SumSet, shift: isize) {
        let n = self.words.len();
        if shift >= 0 {
            let ws = (shift as usize) >> 6;
            let bs = (shift as usize) & 63;
            if ws >= n {
                return;
            }
            for i in (ws..n).rev() {
                let lo = src.words[i - ws];
                let mut w = lo << bs;
                if bs > 0 && i > ws {
                    w |= src.words[i - ws - 1] >> (64 - bs);
                }
                self.words[i] |= w;
            }
        } else {
            let t = shift.unsigned_abs();
            let ws = t >> 6;
            let bs = t & 63;
            if ws >= n {
                return;
            }
            for i in 0..n - ws {
                let mut w = src.words[i + ws] >> bs;
                if bs > 0 && i + ws + 1 < n {
                    w |= src.words[i + ws + 1] << (64 - bs);
                }
                self.words[i] |= w;
            }
        }
        // clear padding past the last valid bit
        let tail = self.bits & 63;
        if tail != 0 {
            self.words[n - 1] &= (1u64 << tail) - 1;
        }
    }

    /// Word `w` of `src` translated by the flattened offset `shift`.
    fn shifted_word(src: &SumSet, w: usize, shift: isize) -> u64 {
        let n = src.words.len() as isize;
        let get = |i: isize| if (0..n).contains(&i) { src.words[i as usize] } else { 0 };
        let t = shift.unsigned_abs();
        let (ws, bs) = ((t >> 6) as isize, (t & 63) as u32);
        let w = w as isize;
        if shift >= 0 {
            let lo = get(w - ws) << bs;
            if bs == 0 { lo } else { lo | get(w - ws - 1) >> (64 - bs) }
        } else {
            let hi = get(w + ws) >> bs;
            if bs == 0 { hi } else { hi | get(w + ws + 1) << (64 - bs) }
        }
    }

    /// `self = src ∪ (src + shift)`, computed only on the rows of the window
    /// `lo..=hi` (per axis). Bits outside the window are left stale; they are
    /// correct only if the caller never reads them.
    pub fn union_shifted_window(&mut self, src: &SumSet, shift: isize, lo: &[i64], hi: &[i64]) {
        let d = self.half.len();
        let mut prefix: Vec<i64> = lo[..d - 1].to_vec();
        loop {
            let mut base = 0i64;
            for k in 0..d - 1 {
                base += (prefix[k] + self.half[k]) * self.strides[k];
            }
            let first = (base + lo[d - 1] + self.half[d - 1]) as usize;
            let last = (base + hi[d - 1] + self.half[d - 1]) as usize;
            for w in first >> 6..=last >> 6 {
                self.words[w] = src.words[w] | SumSet::shifted_word(src, w, shift);
            }
            let mut k = d - 1;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                prefix[k] += 1;
                if prefix[k] <= hi[k] {
                    break;
                }
                prefix[k] = lo[k];
            }
        }
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn shift_matches_hashset() {
        let half = [7i64, 5];
        let mut a = SumSet::new(&half);
        let mut reference = HashSet::new();
        for p in [[1i64, 2], [-3, 0], [0, -1]] {
            a.insert(&p);
            reference.insert(p);
        }
        for shift in [[2i64, -1], [-3, 3], [4, 0]] {
            let mut b = SumSet::new(&half);
            b.copy_from(&a);
            let off = a.offset(&shift);
            b.or_shifted(&a, off);
            let mut expect = reference.clone();
            for p in &reference {
                expect.insert([p[0] + shift[0], p[1] + shift[1]]);
            }
            for x in -7..=7 {
                for y in -5..=5 {
                    assert_eq!(b.contains(&[x, y]), expect.contains(&[x, y]), "({x},{y}) after {shift:?}");
                }
            }
        }
    }

    #[test]
    fn window_update_agrees_inside_window() {
        let half = [6i64, 6, 6];
        let mut a = SumSet::new(&half);
        for p in [[1i64, 2, 0], [-3, 0, 1], [0, -1, -2], [2, 2, 2]] {
            a.insert(&p);
        }
        let shift = [1i64, -2, 1];
        let mut full = SumSet::new(&half);
        full.copy_from(&a);
        full.or_shifted(&a, a.offset(&shift));
        let mut win = SumSet::new(&half);
        // stale garbage outside the window must not matter
        win.words.iter_mut().for_each(|w| *w = 0xdead_beef_dead_beef);
        let (lo, hi) = ([-3i64, -4, -2], [3i64, 2, 4]);
        win.union_shifted_window(&a, a.offset(&shift), &lo, &hi);
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    assert_eq!(win.contains(&[x, y, z]), full.contains(&[x, y, z]), "({x},{y},{z})");
                }
            }
        }
    }

    #[test]
    fn out_of_box_is_absent() {
        let s = SumSet::new(&[2]);
        assert!(!s.contains(&[3]));
        assert_eq!(SumSet::capacity(&[2, 3]), Some(35));
    }
}
