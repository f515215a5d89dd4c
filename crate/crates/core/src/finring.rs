//! Finite rings and finite groups presented by full operation tables.
//!
//! Both structures validate their axioms exhaustively at construction time,
//! so downstream code can rely on associativity, identities, and inverses
//! without re-checking.  Tables are loadable from a line-based text format
//! and small standard families (Z_n, cyclic and symmetric groups) come as
//! constructors.

use crate::perm::symmetric_group;
use crate::{Error, Result};

/// A finite unital ring given by complete addition and multiplication
/// tables over an indexed element set.
#[derive(Clone, Debug)]
pub struct FiniteRing {
    labels: Vec<String>,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    zero: usize,
    one: usize,
}

impl FiniteRing {
    /// The ring of integers modulo `n` (`n = 1` gives the trivial ring).
    pub fn zn(n: usize) -> FiniteRing {
        assert!(n >= 1, "modulus must be positive");
        let labels = (0..n).map(|i| i.to_string()).collect();
        let add = table(n, |a, b| (a + b) % n);
        let mul = table(n, |a, b| (a * b) % n);
        FiniteRing::from_tables(labels, add, mul).expect("modular arithmetic is a ring")
    }

    /// Validates the ring axioms exhaustively and locates zero and one.
    pub fn from_tables(labels: Vec<String>, add: Vec<usize>, mul: Vec<usize>) -> Result<FiniteRing> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::validation("a ring needs at least one element"));
        }
        if add.len() != n * n || mul.len() != n * n {
            return Err(Error::validation("operation tables must be n by n"));
        }
        if add.iter().chain(&mul).any(|&x| x >= n) {
            return Err(Error::validation("table entry out of range"));
        }
        let at = |t: &[usize], a: usize, b: usize| t[a * n + b];
        let zero = (0..n)
            .find(|&z| (0..n).all(|a| at(&add, a, z) == a && at(&add, z, a) == a))
            .ok_or_else(|| Error::validation("no additive identity"))?;
        let one = (0..n)
            .find(|&o| (0..n).all(|a| at(&mul, a, o) == a && at(&mul, o, a) == a))
            .ok_or_else(|| Error::validation("no multiplicative identity"))?;
        let mut neg = vec![usize::MAX; n];
        for a in 0..n {
            neg[a] = (0..n)
                .find(|&b| at(&add, a, b) == zero)
                .ok_or_else(|| Error::validation(format!("element {} has no negative", labels[a])))?;
        }
        for a in 0..n {
            for b in 0..n {
                if at(&add, a, b) != at(&add, b, a) {
                    return Err(Error::validation(format!(
                        "addition is not commutative at ({}, {})",
                        labels[a], labels[b]
                    )));
                }
                for c in 0..n {
                    if at(&add, at(&add, a, b), c) != at(&add, a, at(&add, b, c)) {
                        return Err(Error::validation(format!(
                            "addition is not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                    if at(&mul, at(&mul, a, b), c) != at(&mul, a, at(&mul, b, c)) {
                        return Err(Error::validation(format!(
                            "multiplication is not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                    if at(&mul, a, at(&add, b, c)) != at(&add, at(&mul, a, b), at(&mul, a, c))
                        || at(&mul, at(&add, a, b), c) != at(&add, at(&mul, a, c), at(&mul, b, c))
                    {
                        return Err(Error::validation(format!(
                            "distributivity fails at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteRing {
            labels,
            add,
            mul,
            neg,
            zero,
            one,
        })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size() + b]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size() + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    /// Two-sided multiplicative inverse, when it exists.
    pub fn inverse(&self, a: usize) -> Option<usize> {
        (0..self.size()).find(|&b| self.mul(a, b) == self.one && self.mul(b, a) == self.one)
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.inverse(a).is_some()
    }

    pub fn units(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| self.is_unit(a)).collect()
    }

    /// Reads a ring from the line-based table format:
    /// `elem a b c`, `add a b = c`, `mul a b = c`, `#` comments.
    pub fn parse(text: &str) -> Result<FiniteRing> {
        let (labels, tables) = parse_tables(text, &["add", "mul"])?;
        let [add, mul] = <[Vec<usize>; 2]>::try_from(tables).expect("two tables requested");
        FiniteRing::from_tables(labels, add, mul)
    }
}

/// A finite group given by a complete multiplication table.
#[derive(Clone, Debug)]
pub struct GroupTable {
    labels: Vec<String>,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl GroupTable {
    pub fn from_table(labels: Vec<String>, mul: Vec<usize>) -> Result<GroupTable> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::validation("a group needs at least one element"));
        }
        if mul.len() != n * n {
            return Err(Error::validation("multiplication table must be n by n"));
        }
        if mul.iter().any(|&x| x >= n) {
            return Err(Error::validation("table entry out of range"));
        }
        let at = |a: usize, b: usize| mul[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| at(a, e) == a && at(e, a) == a))
            .ok_or_else(|| Error::validation("no identity element"))?;
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| Error::validation(format!("element {} has no inverse", labels[a])))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::validation(format!(
                            "multiplication is not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(GroupTable {
            labels,
            mul,
            inv,
            identity,
        })
    }

    pub fn cyclic(n: usize) -> GroupTable {
        assert!(n >= 1);
        let labels = (0..n).map(|i| i.to_string()).collect();
        GroupTable::from_table(labels, table(n, |a, b| (a + b) % n)).expect("modular addition is a group")
    }

    /// The symmetric group on `0..n`, elements labelled by cycle notation.
    /// Multiplication `a·b` applies `b` first.
    pub fn symmetric(n: usize) -> GroupTable {
        let perms = symmetric_group(n);
        let labels: Vec<String> = perms.iter().map(|p| p.cycles()).collect();
        let index = |p: &crate::perm::Perm| perms.iter().position(|q| q == p).expect("closed");
        let m = perms.len();
        let mut mul = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                mul[a * m + b] = index(&perms[a].compose(&perms[b]));
            }
        }
        GroupTable::from_table(labels, mul).expect("symmetric group is a group")
    }

    pub fn parse(text: &str) -> Result<GroupTable> {
        let (labels, tables) = parse_tables(text, &["mul"])?;
        let [mul] = <[Vec<usize>; 1]>::try_from(tables).expect("one table requested");
        GroupTable::from_table(labels, mul)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Elements of the subgroup generated by `gens`, sorted by index.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.size()];
        seen[self.identity] = true;
        let mut frontier = vec![self.identity];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                for next in [self.mul(a, g), self.mul(a, self.inv(g))] {
                    if !seen[next] {
                        seen[next] = true;
                        frontier.push(next);
                    }
                }
            }
        }
        (0..self.size()).filter(|&a| seen[a]).collect()
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> bool {
        subset.contains(&self.identity)
            && subset
                .iter()
                .all(|&a| subset.contains(&self.inv(a)) && subset.iter().all(|&b| subset.contains(&self.mul(a, b))))
    }
}

fn table(n: usize, f: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut t = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            t[a * n + b] = f(a, b);
        }
    }
    t
}

/// Shared parser for the `elem`/`<op> a b = c` table format.  Every table
/// named in `ops` must be completely specified.
fn parse_tables(text: &str, ops: &[&str]) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    let mut labels: Vec<String> = Vec::new();
    let mut entries: Vec<Vec<Option<usize>>> = vec![Vec::new(); ops.len()];
    let mut tables_started = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            line: lineno + 1,
            msg,
        };
        let mut parts = line.split_whitespace();
        let head = parts.next().expect("nonempty line");
        if head == "elem" {
            if tables_started {
                return Err(parse_err("elem lines must precede table lines".into()));
            }
            for name in parts {
                if labels.iter().any(|l| l == name) {
                    return Err(parse_err(format!("element `{name}` declared twice")));
                }
                labels.push(name.to_string());
            }
            continue;
        }
        let Some(op) = ops.iter().position(|&o| o == head) else {
            return Err(parse_err(format!("unknown directive `{head}`")));
        };
        if labels.is_empty() {
            return Err(parse_err("table line before any elem line".into()));
        }
        if !tables_started {
            tables_started = true;
            for e in entries.iter_mut() {
                e.resize(labels.len() * labels.len(), None);
            }
        }
        let toks: Vec<&str> = parts.collect();
        if toks.len() != 4 || toks[2] != "=" {
            return Err(parse_err(format!("expected `{head} a b = c`")));
        }
        let lookup = |name: &str| {
            labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| parse_err(format!("unknown element `{name}`")))
        };
        let (a, b, c) = (lookup(toks[0])?, lookup(toks[1])?, lookup(toks[3])?);
        let slot = &mut entries[op][a * labels.len() + b];
        if slot.is_some() {
            return Err(parse_err(format!("{head} {} {} defined twice", toks[0], toks[1])));
        }
        *slot = Some(c);
    }
    if labels.is_empty() {
        return Err(Error::parse(0, "no elements declared"));
    }
    let n = labels.len();
    let mut tables = Vec::new();
    for (op, e) in ops.iter().zip(entries) {
        let mut t = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                match e.get(a * n + b).copied().flatten() {
                    Some(c) => t.push(c),
                    None => {
                        return Err(Error::validation(format!(
                            "missing entry: {op} {} {}",
                            labels[a], labels[b]
                        )))
                    }
                }
            }
        }
        tables.push(t);
    }
    Ok((labels, tables))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zn_arithmetic_and_units() {
        let z6 = FiniteRing::zn(6);
        assert_eq!(z6.zero(), 0);
        assert_eq!(z6.one(), 1);
        assert_eq!(z6.add(4, 5), 3);
        assert_eq!(z6.mul(4, 5), 2);
        assert_eq!(z6.neg(2), 4);
        assert_eq!(z6.units(), vec![1, 5]);
        assert_eq!(FiniteRing::zn(5).units(), vec![1, 2, 3, 4]);
        assert_eq!(FiniteRing::zn(7).inverse(3), Some(5));
        assert!(!z6.is_unit(0));
    }

    #[test]
    fn trivial_ring_is_accepted() {
        let z1 = FiniteRing::zn(1);
        assert_eq!(z1.zero(), z1.one());
        assert_eq!(z1.units(), vec![0]);
    }

    #[test]
    fn bad_tables_are_rejected() {
        // Swap one multiplication entry of Z3 so distributivity breaks.
        let labels: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let add = table(3, |a, b| (a + b) % 3);
        let mut mul = table(3, |a, b| (a * b) % 3);
        mul[2 * 3 + 2] = 2; // 2*2 = 2 instead of 1
        assert!(FiniteRing::from_tables(labels, add, mul).is_err());
    }

    #[test]
    fn ring_parser_round_trip() {
        let text = "\
# Z2 as a table
elem 0 1
add 0 0 = 0
add 0 1 = 1
add 1 0 = 1
add 1 1 = 0
mul 0 0 = 0
mul 0 1 = 0
mul 1 0 = 0
mul 1 1 = 1
";
        let r = FiniteRing::parse(text).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.one(), 1);
        assert_eq!(r.units(), vec![1]);
    }

    #[test]
    fn ring_parser_reports_line_numbers() {
        let bad = "elem 0 1\nadd 0 2 = 0\n";
        match FiniteRing::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let incomplete = "elem 0 1\nadd 0 0 = 0\n";
        assert!(FiniteRing::parse(incomplete).is_err());
        let dup = "elem 0 1\nadd 0 0 = 0\nadd 0 0 = 1\n";
        match FiniteRing::parse(dup) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_group_basics() {
        let z4 = GroupTable::cyclic(4);
        assert_eq!(z4.identity(), 0);
        assert_eq!(z4.mul(3, 2), 1);
        assert_eq!(z4.inv(3), 1);
        assert_eq!(z4.subgroup_closure(&[2]), vec![0, 2]);
        assert!(z4.is_subgroup(&[0, 2]));
        assert!(!z4.is_subgroup(&[0, 3]));
    }

    #[test]
    fn symmetric_group_table() {
        let s3 = GroupTable::symmetric(3);
        assert_eq!(s3.size(), 6);
        let t = s3.index_of("(0 1)").unwrap();
        let c = s3.index_of("(0 1 2)").unwrap();
        // Non-abelian: (0 1)·(0 1 2) != (0 1 2)·(0 1)
        assert_ne!(s3.mul(t, c), s3.mul(c, t));
        assert_eq!(s3.subgroup_closure(&[t]).len(), 2);
        assert_eq!(s3.subgroup_closure(&[c]).len(), 3);
        assert_eq!(s3.subgroup_closure(&[t, c]).len(), 6);
        assert_eq!(s3.inv(c), s3.index_of("(0 2 1)").unwrap());
    }

    #[test]
    fn group_parser_round_trip() {
        let text = "\
elem e a
mul e e = e
mul e a = a
mul a e = a
mul a a = e
";
        let g = GroupTable::parse(text).unwrap();
        assert_eq!(g.size(), 2);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.inv(1), 1);
        assert!(GroupTable::parse("elem e\nmul e e = e\nadd e e = e\n").is_err());
    }
}
