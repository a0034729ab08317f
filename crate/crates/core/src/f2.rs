//! Vectors and row reduction over F2.
//!
//! Vectors are kept as sorted index sets (addition = symmetric difference);
//! elimination uses packed bit rows. Everything is deterministic for a fixed
//! column order.

use std::fmt;

/// A vector over F2, stored as the sorted set of nonzero coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct F2Vec(Vec<u32>);

impl F2Vec {
    pub fn zero() -> Self {
        F2Vec(Vec::new())
    }

    pub const fn zero_const() -> Self {
        F2Vec(Vec::new())
    }

    pub fn singleton(i: u32) -> Self {
        F2Vec(vec![i])
    }

    /// Builds a vector from a support list with multiplicities: an index
    /// survives iff it occurs an odd number of times.
    pub fn from_support_mod2(mut support: Vec<u32>) -> Self {
        support.sort_unstable();
        let mut out = Vec::with_capacity(support.len());
        let mut iter = support.into_iter().peekable();
        while let Some(i) = iter.next() {
            let mut count = 1usize;
            while iter.peek() == Some(&i) {
                iter.next();
                count += 1;
            }
            if count % 2 == 1 {
                out.push(i);
            }
        }
        F2Vec(out)
    }

    /// From a strictly sorted list of distinct indices.
    pub fn from_sorted(support: Vec<u32>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        F2Vec(support)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Symmetric difference (F2 addition).
    pub fn add(&self, other: &F2Vec) -> F2Vec {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x < y {
                        out.push(x);
                        a.next();
                    } else if y < x {
                        out.push(y);
                        b.next();
                    } else {
                        a.next();
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        F2Vec(out)
    }

    pub fn add_assign(&mut self, other: &F2Vec) {
        *self = self.add(other);
    }

    pub fn toggle(&mut self, i: u32) {
        match self.0.binary_search(&i) {
            Ok(pos) => {
                self.0.remove(pos);
            }
            Err(pos) => self.0.insert(pos, i),
        }
    }
}

impl FromIterator<u32> for F2Vec {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        F2Vec::from_support_mod2(iter.into_iter().collect())
    }
}

impl fmt::Display for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A packed bit row with implicit zero extension.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitRow {
    blocks: Vec<u64>,
}

impl BitRow {
    pub fn zero() -> Self {
        BitRow { blocks: Vec::new() }
    }

    pub fn from_f2vec(v: &F2Vec) -> Self {
        let mut row = BitRow::zero();
        for i in v.iter() {
            row.set(i as usize);
        }
        row
    }

    pub fn set(&mut self, i: usize) {
        let block = i / 64;
        if block >= self.blocks.len() {
            self.blocks.resize(block + 1, 0);
        }
        self.blocks[block] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        let block = i / 64;
        block < self.blocks.len() && (self.blocks[block] >> (i % 64)) & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        if other.blocks.len() > self.blocks.len() {
            self.blocks.resize(other.blocks.len(), 0);
        }
        for (a, b) in self.blocks.iter_mut().zip(other.blocks.iter()) {
            *a ^= *b;
        }
        while self.blocks.last() == Some(&0) {
            self.blocks.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// Index of the lowest set bit, if any.
    pub fn leading(&self) -> Option<usize> {
        for (bi, &b) in self.blocks.iter().enumerate() {
            if b != 0 {
                return Some(bi * 64 + b.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn to_f2vec(&self) -> F2Vec {
        let mut out = Vec::new();
        for (bi, &b) in self.blocks.iter().enumerate() {
            let mut bits = b;
            while bits != 0 {
                let t = bits.trailing_zeros() as usize;
                out.push((bi * 64 + t) as u32);
                bits &= bits - 1;
            }
        }
        F2Vec::from_sorted(out)
    }
}

/// Row space in reduced echelon form, with an optional combination track:
/// every stored row knows which inserted vectors sum to it.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    /// (row, combination over insertion indices), sorted by pivot column.
    rows: Vec<(BitRow, BitRow)>,
    inserted: usize,
}

/// Outcome of reducing a vector against an [`Rref`].
pub struct Reduction {
    /// The residual after reduction (zero iff the vector is in the span).
    pub residual: BitRow,
    /// Which previously inserted vectors were used during the reduction.
    pub combo: BitRow,
}

impl Rref {
    pub fn new() -> Self {
        Rref::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduce `v` against the stored rows without modifying the space.
    pub fn reduce(&self, v: &F2Vec) -> Reduction {
        let mut row = BitRow::from_f2vec(v);
        let mut combo = BitRow::zero();
        self.reduce_row(&mut row, &mut combo);
        Reduction { residual: row, combo }
    }

    fn reduce_row(&self, row: &mut BitRow, combo: &mut BitRow) {
        loop {
            let Some(lead) = row.leading() else { break };
            match self.rows.binary_search_by_key(&lead, |(r, _)| r.leading().unwrap()) {
                Ok(idx) => {
                    let (r, c) = &self.rows[idx];
                    row.xor_assign(r);
                    combo.xor_assign(c);
                }
                Err(_) => break,
            }
        }
    }

    /// Insert a vector. Returns `true` if it enlarged the span.
    /// The vector gets the insertion index `self.inserted()` prior to the call.
    pub fn insert(&mut self, v: &F2Vec) -> bool {
        let mut row = BitRow::from_f2vec(v);
        let mut combo = BitRow::zero();
        combo.set(self.inserted);
        self.inserted += 1;
        self.reduce_row(&mut row, &mut combo);
        match row.leading() {
            None => false,
            Some(lead) => {
                // Back-substitute to keep reduced echelon form.
                let pos = self
                    .rows
                    .binary_search_by_key(&lead, |(r, _)| r.leading().unwrap())
                    .unwrap_err();
                for (r, c) in self.rows.iter_mut() {
                    if r.get(lead) {
                        r.xor_assign(&row);
                        c.xor_assign(&combo);
                    }
                }
                self.rows.insert(pos, (row, combo));
                true
            }
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &BitRow> {
        self.rows.iter().map(|(r, _)| r)
    }
}

/// Rank of a list of F2 vectors.
pub fn rank_of(vectors: impl IntoIterator<Item = F2Vec>) -> usize {
    let mut rref = Rref::new();
    for v in vectors {
        rref.insert(&v);
    }
    rref.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2vec_addition_cancels() {
        let a = F2Vec::from_sorted(vec![1, 3, 5]);
        let b = F2Vec::from_sorted(vec![3, 4]);
        assert_eq!(a.add(&b), F2Vec::from_sorted(vec![1, 4, 5]));
        assert!(a.add(&a).is_zero());
    }

    #[test]
    fn support_mod2_drops_even_multiplicities() {
        let v = F2Vec::from_support_mod2(vec![2, 7, 2, 2, 7, 9]);
        assert_eq!(v, F2Vec::from_sorted(vec![2, 9]));
    }

    #[test]
    fn rref_tracks_combinations() {
        let mut rref = Rref::new();
        let v0 = F2Vec::from_sorted(vec![0, 1]);
        let v1 = F2Vec::from_sorted(vec![1, 2]);
        assert!(rref.insert(&v0));
        assert!(rref.insert(&v1));
        // v0 + v1 is in the span and the combo names both inserted rows.
        let red = rref.reduce(&F2Vec::from_sorted(vec![0, 2]));
        assert!(red.residual.is_zero());
        assert_eq!(red.combo.to_f2vec(), F2Vec::from_sorted(vec![0, 1]));
        // and a third dependent insert reports no rank growth
        assert!(!rref.insert(&F2Vec::from_sorted(vec![0, 2])));
        assert_eq!(rref.rank(), 2);
    }

    #[test]
    fn rank_small() {
        assert_eq!(
            rank_of(vec![
                F2Vec::from_sorted(vec![0]),
                F2Vec::from_sorted(vec![0, 1]),
                F2Vec::from_sorted(vec![1]),
            ]),
            2
        );
    }
}
