//! Canonical basis blades `dx_{i1} ^ ... ^ dx_{ik}` / `d_{i1} ^ ... ^ d_{ik}`.

use std::fmt;

use crate::poly::VarIndex;

/// A strictly increasing index sequence; the canonical representative of a
/// basis k-blade. Reordering signs live in the coefficients.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Blade(Vec<VarIndex>);

/// Sign of a reordering: `true` means the blade picked up a minus sign.
pub type Flip = bool;

impl Blade {
    pub fn empty() -> Self {
        Blade(Vec::new())
    }

    pub fn single(i: VarIndex) -> Self {
        Blade(vec![i])
    }

    /// Sorts `indices` into canonical order. Returns `None` when an index
    /// repeats (the blade vanishes).
    pub fn from_unsorted(indices: &[VarIndex]) -> Option<(Flip, Blade)> {
        let mut v = indices.to_vec();
        let mut flips = 0usize;
        // insertion sort counts transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                flips += 1;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((flips % 2 == 1, Blade(v)))
    }

    pub fn indices(&self) -> &[VarIndex] {
        &self.0
    }

    pub fn grade(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, i: VarIndex) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// `self ^ other`, or `None` if the blades share an index.
    pub fn wedge(&self, other: &Blade) -> Option<(Flip, Blade)> {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut inversions = 0usize;
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                // b[j] jumps over the remaining elements of a
                inversions += a.len() - i;
                out.push(b[j]);
                j += 1;
            } else {
                return None;
            }
        }
        Some((inversions % 2 == 1, Blade(out)))
    }

    /// Removes index `i`: the contraction of the first slot with the dual
    /// basis element, giving sign `(-1)^position`.
    pub fn remove(&self, i: VarIndex) -> Option<(Flip, Blade)> {
        let pos = self.0.binary_search(&i).ok()?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some((pos % 2 == 1, Blade(v)))
    }

    /// `e_i ^ self`.
    pub fn prepend(&self, i: VarIndex) -> Option<(Flip, Blade)> {
        match self.0.binary_search(&i) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, i);
                Some((pos % 2 == 1, Blade(v)))
            }
        }
    }

    /// All k-subsets of `indices` (sorted, deduplicated) in lexicographic order.
    pub fn subsets(indices: &[VarIndex], k: usize) -> Vec<Blade> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k);
        fn rec(idx: &[VarIndex], k: usize, start: usize, cur: &mut Vec<VarIndex>, out: &mut Vec<Blade>) {
            if cur.len() == k {
                out.push(Blade(cur.clone()));
                return;
            }
            for p in start..idx.len() {
                if idx.len() - p < k - cur.len() {
                    break;
                }
                cur.push(idx[p]);
                rec(idx, k, p + 1, cur, out);
                cur.pop();
            }
        }
        rec(&idx, k, 0, &mut cur, &mut out);
        out
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        let a = Blade::single(1);
        let b = Blade::single(0);
        assert_eq!(a.wedge(&b), Some((true, Blade(vec![0, 1]))));
        assert_eq!(b.wedge(&a), Some((false, Blade(vec![0, 1]))));
        assert_eq!(a.wedge(&a), None);
        // {1,3} ^ {0,2}: 0 passes 2 elements, 2 passes 1 -> odd
        let c = Blade(vec![1, 3]).wedge(&Blade(vec![0, 2])).unwrap();
        assert_eq!(c, (true, Blade(vec![0, 1, 2, 3])));
    }

    #[test]
    fn sorting_matches_wedge() {
        let (flip, b) = Blade::from_unsorted(&[3, 0, 2]).unwrap();
        assert_eq!(b, Blade(vec![0, 2, 3]));
        assert!(!flip);
        assert!(Blade::from_unsorted(&[1, 1]).is_none());
    }

    #[test]
    fn remove_and_prepend() {
        let b = Blade(vec![0, 1, 4]);
        assert_eq!(b.remove(1), Some((true, Blade(vec![0, 4]))));
        assert_eq!(b.remove(2), None);
        assert_eq!(Blade(vec![0, 4]).prepend(1), Some((true, b.clone())));
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(Blade::subsets(&[0, 1, 2, 3], 2).len(), 6);
        assert_eq!(Blade::subsets(&[0, 1], 0), vec![Blade::empty()]);
        assert!(Blade::subsets(&[0], 2).is_empty());
    }
}
