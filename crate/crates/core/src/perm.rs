//! Permutations of {0, 1, 2, ...} with finite support.
//!
//! Composition is fixed once and for all as `(g * h)(x) = g(h(x))`: the
//! right factor acts first.  All group actions in the crate are left
//! actions under this convention.
//!
//! Besides the group operations the module provides the degree-lowering
//! maps `delta(i, g)`: `delta` of a generator is given by a closed form and
//! the value on a general permutation is computed by recursion over a
//! reduced word using the rule `delta_i(g h) = delta_i(g) *
//! delta_{g^-1(i)}(h)`.

use crate::{Error, Result};
use std::fmt;

/// A permutation with finite support, stored as the images of `0..degree`
/// with trailing fixed points trimmed away.  The identity has degree 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity() -> Perm {
        Perm { images: Vec::new() }
    }

    /// Builds a permutation from the vector of images of `0..n`.
    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y >= n || seen[y] {
                return Err(Error::validation(format!(
                    "image vector {:?} is not a permutation",
                    images
                )));
            }
            seen[y] = true;
        }
        let mut p = Perm { images };
        p.trim();
        Ok(p)
    }

    fn trim(&mut self) {
        while let Some(&last) = self.images.last() {
            if last == self.images.len() - 1 {
                self.images.pop();
            } else {
                break;
            }
        }
    }

    /// The transposition swapping `a` and `b`.
    pub fn swap(a: usize, b: usize) -> Perm {
        if a == b {
            return Perm::identity();
        }
        let n = a.max(b) + 1;
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Perm { images }
    }

    /// The adjacent transposition `s_i = (i-1, i)`, defined for `i >= 1`.
    pub fn transposition(i: usize) -> Result<Perm> {
        if i == 0 {
            return Err(Error::validation(
                "adjacent transpositions are indexed from 1".to_string(),
            ));
        }
        Ok(Perm::swap(i - 1, i))
    }

    /// Smallest `n` such that the permutation fixes every point `>= n`.
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn is_identity(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        if x < self.images.len() {
            self.images[x]
        } else {
            x
        }
    }

    /// `self * other`, where the right factor acts first:
    /// `(self * other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        let n = self.degree().max(other.degree());
        let mut images = Vec::with_capacity(n);
        for x in 0..n {
            images.push(self.apply(other.apply(x)));
        }
        let mut p = Perm { images };
        p.trim();
        p
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Perm { images }
    }

    /// Writes the permutation as a product of adjacent transpositions,
    /// returned as the list of indices `j` with the leftmost factor first:
    /// `self = s_{j_1} * s_{j_2} * ... * s_{j_m}`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        // Bubble sort of the image vector.  Swapping entries p-1, p of the
        // image vector multiplies by s_p on the right, so the collected
        // swaps read right to left; reversing gives the left-first word.
        let mut v = self.images.clone();
        let mut swaps = Vec::new();
        let n = v.len();
        loop {
            let mut done = true;
            for p in 1..n {
                if v[p - 1] > v[p] {
                    v.swap(p - 1, p);
                    swaps.push(p);
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        swaps.reverse();
        swaps
    }

    /// `delta(i, s_j)` for a generator: `s_{j-1}` when `i < j-1`, the
    /// identity when `i` is `j-1` or `j`, and `s_j` when `i > j`.
    pub fn delta_generator(i: usize, j: usize) -> Result<Perm> {
        if j == 0 {
            return Err(Error::validation("generator index must be >= 1".to_string()));
        }
        if i + 1 < j {
            Perm::transposition(j - 1)
        } else if i == j - 1 || i == j {
            Ok(Perm::identity())
        } else {
            Perm::transposition(j)
        }
    }

    /// The degree-lowering map `delta(i, self)`, computed by folding the
    /// product rule `delta_i(g h) = delta_i(g) * delta_{g^-1(i)}(h)` over a
    /// reduced word for `self`.
    pub fn delta(&self, i: usize) -> Perm {
        let mut acc = Perm::identity();
        let mut idx = i;
        for j in self.adjacent_word() {
            let gen = Perm::delta_generator(idx, j).expect("generator index is positive");
            acc = acc.compose(&gen);
            idx = Perm::swap(j - 1, j).apply(idx);
        }
        acc
    }

    /// Parses cycle notation: `(0 1 2)(3 4)`, `e`, or `()` for the identity.
    pub fn parse_cycles(text: &str) -> Result<Perm> {
        let t = text.trim();
        if t == "e" || t == "()" || t.is_empty() {
            return Ok(Perm::identity());
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut max_pt = 0usize;
        let mut rest = t;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::validation(format!("bad cycle notation `{text}`")))?;
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::validation(format!("unclosed cycle in `{text}`")))?
                + open;
            let body = &rest[open + 1..close];
            let pts: Vec<usize> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::validation(format!("bad point `{s}` in `{text}`")))
                })
                .collect::<Result<_>>()?;
            for w in 0..pts.len() {
                let a = pts[w];
                let b = pts[(w + 1) % pts.len()];
                if pts.len() > 1 {
                    pairs.push((a, b));
                }
                max_pt = max_pt.max(a);
            }
            rest = &rest[close + 1..];
        }
        let mut images: Vec<usize> = (0..=max_pt).collect();
        let mut seen = vec![false; max_pt + 1];
        for (a, b) in pairs {
            if seen[a] {
                return Err(Error::validation(format!("point {a} repeated in `{text}`")));
            }
            seen[a] = true;
            images[a] = b;
        }
        Perm::from_images(images)
    }

    /// Cycle notation with cycles ordered by smallest moved point.
    pub fn cycles(&self) -> String {
        if self.is_identity() {
            return "e".to_string();
        }
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push('(');
            for (k, p) in cyc.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                out.push_str(&p.to_string());
            }
            out.push(')');
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles())
    }
}

/// All permutations of `0..n`, in lexicographic order of image vectors.
/// The first entry is always the identity.
pub fn symmetric_group(n: usize) -> Vec<Perm> {
    use itertools::Itertools;
    (0..n)
        .permutations(n)
        .map(|v| Perm::from_images(v).expect("itertools yields permutations"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent description of `delta`: delete the point `g^-1(i)` from
    /// the domain and `i` from the range, then squeeze both sides back onto
    /// an initial segment.  Used only as an oracle here.
    fn delta_by_deletion(g: &Perm, i: usize) -> Perm {
        let n = g.degree().max(i + 1);
        let gi = g.inverse().apply(i);
        let mut images = Vec::new();
        for x in 0..n {
            if x == gi {
                continue;
            }
            let y = g.apply(x);
            images.push(if y > i { y - 1 } else { y });
        }
        Perm::from_images(images).expect("deleting a matched pair leaves a permutation")
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let g = Perm::swap(1, 2);
        let h = Perm::swap(0, 1);
        // g(h(0)) = g(1) = 2
        assert_eq!(g.compose(&h).apply(0), 2);
        assert_eq!(g.compose(&h).cycles(), "(0 2 1)");
        assert_eq!(h.compose(&g).cycles(), "(0 1 2)");
    }

    #[test]
    fn inverse_and_identity() {
        for g in symmetric_group(4) {
            assert!(g.compose(&g.inverse()).is_identity());
            assert!(g.inverse().compose(&g).is_identity());
        }
    }

    #[test]
    fn adjacent_word_reconstructs() {
        for g in symmetric_group(5) {
            let mut acc = Perm::identity();
            for j in g.adjacent_word() {
                acc = acc.compose(&Perm::transposition(j).unwrap());
            }
            assert_eq!(acc, g);
        }
    }

    #[test]
    fn delta_on_generators() {
        // delta(0, s1) = e, delta(0, s2) = s1, delta(3, s1) = s1
        let s1 = Perm::transposition(1).unwrap();
        let s2 = Perm::transposition(2).unwrap();
        assert!(s1.delta(0).is_identity());
        assert_eq!(s2.delta(0), s1);
        assert_eq!(s1.delta(3), s1);
        assert!(s1.delta(1).is_identity());
        assert!(s2.delta(1).is_identity());
        assert!(s2.delta(2).is_identity());
    }

    #[test]
    fn delta_matches_deletion_oracle_on_s4() {
        for g in symmetric_group(4) {
            for i in 0..=4 {
                assert_eq!(g.delta(i), delta_by_deletion(&g, i), "g={g} i={i}");
            }
        }
    }

    #[test]
    fn delta_matches_deletion_oracle_on_s5() {
        for g in symmetric_group(5) {
            for i in 0..=5 {
                assert_eq!(g.delta(i), delta_by_deletion(&g, i), "g={g} i={i}");
            }
        }
    }

    #[test]
    fn delta_product_rule_exhaustive_on_s4() {
        let s4 = symmetric_group(4);
        for g in &s4 {
            for h in &s4 {
                for i in 0..=4 {
                    let lhs = g.compose(h).delta(i);
                    let rhs = g.delta(i).compose(&h.delta(g.inverse().apply(i)));
                    assert_eq!(lhs, rhs, "g={g} h={h} i={i}");
                }
            }
        }
    }

    #[test]
    fn delta_preserves_identity_and_lowers_degree() {
        for i in 0..6 {
            assert!(Perm::identity().delta(i).is_identity());
        }
        for g in symmetric_group(4) {
            // Removing one of the four points leaves a permutation of three.
            for i in 0..=3 {
                assert!(g.delta(i).degree() <= 3, "g={g} i={i}");
            }
            // Removing the unused fifth point leaves the degree alone.
            assert_eq!(g.delta(4), g);
        }
    }

    #[test]
    fn delta_lowers_degree_on_s5() {
        for g in symmetric_group(5) {
            for i in 0..=4 {
                assert!(g.delta(i).degree() <= 4, "g={g} i={i}");
            }
        }
    }

    /// Folds the product rule over an explicit word, mirroring `delta`.
    fn delta_by_word(word: &[usize], i: usize) -> Perm {
        let mut acc = Perm::identity();
        let mut idx = i;
        for &j in word {
            acc = acc.compose(&Perm::delta_generator(idx, j).unwrap());
            idx = Perm::swap(j - 1, j).apply(idx);
        }
        acc
    }

    #[test]
    fn delta_is_independent_of_the_decomposition() {
        for g in symmetric_group(4) {
            let word = g.adjacent_word();
            // A second decomposition: pad with a cancelling pair in front.
            let mut padded = vec![2, 2];
            padded.extend_from_slice(&word);
            for i in 0..=4 {
                assert_eq!(delta_by_word(&word, i), delta_by_word(&padded, i), "g={g} i={i}");
                assert_eq!(g.delta(i), delta_by_word(&word, i));
            }
        }
    }

    #[test]
    fn cycle_notation_round_trip() {
        for g in symmetric_group(4) {
            let s = g.cycles();
            assert_eq!(Perm::parse_cycles(&s).unwrap(), g, "{s}");
        }
        assert_eq!(Perm::parse_cycles("e").unwrap(), Perm::identity());
        assert_eq!(Perm::parse_cycles("(0 1)(2 3)").unwrap().cycles(), "(0 1)(2 3)");
        assert!(Perm::parse_cycles("(0 0)").is_err());
        assert!(Perm::parse_cycles("(0 1").is_err());
    }

    #[test]
    fn symmetric_group_sizes() {
        assert_eq!(symmetric_group(0).len(), 1);
        assert_eq!(symmetric_group(1).len(), 1);
        assert_eq!(symmetric_group(4).len(), 24);
        assert!(symmetric_group(3)[0].is_identity());
    }
}
