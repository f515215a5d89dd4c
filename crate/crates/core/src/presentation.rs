//! Groupoids presented by a graph of arrows with a partial product table.
//! Arrows play the role of the generating set H; relations are the inverse
//! cancellations x·i(x) = identity and the table entries x·y = μ(x, y).
//! Equality of arrow paths is decided by a rewriting system completed up
//! to a rule cap.  Some word problems (hyperbolic vertex groups, for one)
//! never complete under shortlex; construction then still succeeds with
//! the completion deferred, and only the queries that genuinely need the
//! word problem fail.  Table lookups and the derived structure maps never
//! do, which covers every question asked of a saturated table.

use std::collections::BTreeMap;

use crate::rewrite::RewriteSystem;
use crate::zlin::{quotient_invariants, InvariantFactors};
use crate::{Error, Result};

pub const DEFAULT_RULE_CAP: usize = 10_000;

/// Rule budget for tables already listing every composable pair.  There a
/// failed completion costs only the generic word problem, never a product
/// answer, so it pays to give up quickly: confluent systems of this size
/// stay tiny (a few dozen rules), while divergent ones grow without bound
/// and each extra rule makes the attempt quadratically slower.
pub const SATURATED_RULE_CAP: usize = 256;

/// A presented groupoid with involutions i (inversion) and j on the arrows.
#[derive(Clone, Debug)]
pub struct DeltaPresentation {
    node_labels: Vec<String>,
    arrow_labels: Vec<String>,
    dom: Vec<usize>,
    cod: Vec<usize>,
    i_map: Vec<usize>,
    j_map: Vec<usize>,
    mu: BTreeMap<(usize, usize), usize>,
    rewrite: RewriteSystem,
}

impl DeltaPresentation {
    /// Validates the structural invariants, then completes the rewriting
    /// system for the word problem.  When completion exceeds `rule_cap`
    /// the presentation is still built; `normal_form` then reports the
    /// unresolved word problem instead of construction failing here.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        node_labels: Vec<String>,
        arrow_labels: Vec<String>,
        dom: Vec<usize>,
        cod: Vec<usize>,
        i_map: Vec<usize>,
        j_map: Vec<usize>,
        mu: BTreeMap<(usize, usize), usize>,
        rule_cap: usize,
    ) -> Result<DeltaPresentation> {
        let n = arrow_labels.len();
        let objs = node_labels.len();
        let fail = |msg: String| Err(Error::structure(msg));
        if dom.len() != n || cod.len() != n || i_map.len() != n || j_map.len() != n {
            return fail("arrow-indexed arrays must all have the same length".into());
        }
        if dom.iter().chain(&cod).any(|&v| v >= objs) {
            return fail("dom/cod out of range".into());
        }
        if i_map.iter().chain(&j_map).any(|&v| v >= n) {
            return fail("involution value out of range".into());
        }
        for x in 0..n {
            if i_map[i_map[x]] != x {
                return fail(format!("i is not an involution at {}", arrow_labels[x]));
            }
            if j_map[j_map[x]] != x {
                return fail(format!("j is not an involution at {}", arrow_labels[x]));
            }
            if dom[i_map[x]] != cod[x] || cod[i_map[x]] != dom[x] {
                return fail(format!("i does not swap endpoints at {}", arrow_labels[x]));
            }
            let iji = i_map[j_map[i_map[x]]];
            let jij = j_map[i_map[j_map[x]]];
            if iji != jij {
                return fail(format!("iji and jij differ at {}", arrow_labels[x]));
            }
        }
        for (&(x, y), &z) in &mu {
            if x >= n || y >= n || z >= n {
                return fail("product table index out of range".into());
            }
            if cod[x] != dom[y] {
                return fail(format!(
                    "product listed for non-composable pair ({}, {})",
                    arrow_labels[x], arrow_labels[y]
                ));
            }
            if dom[z] != dom[x] || cod[z] != cod[y] {
                return fail(format!(
                    "product of ({}, {}) has wrong endpoints",
                    arrow_labels[x], arrow_labels[y]
                ));
            }
        }
        let mut relations: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for x in 0..n {
            relations.push((vec![x, i_map[x]], vec![]));
        }
        for (&(x, y), &z) in &mu {
            relations.push((vec![x, y], vec![z]));
        }
        let rewrite = RewriteSystem::complete_or_defer(&relations, rule_cap);
        Ok(DeltaPresentation {
            node_labels,
            arrow_labels,
            dom,
            cod,
            i_map,
            j_map,
            mu,
            rewrite,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrow_labels.len()
    }

    pub fn node_label(&self, v: usize) -> &str {
        &self.node_labels[v]
    }

    pub fn arrow_label(&self, x: usize) -> &str {
        &self.arrow_labels[x]
    }

    pub fn dom(&self, x: usize) -> usize {
        self.dom[x]
    }

    pub fn cod(&self, x: usize) -> usize {
        self.cod[x]
    }

    pub fn i(&self, x: usize) -> usize {
        self.i_map[x]
    }

    pub fn j(&self, x: usize) -> usize {
        self.j_map[x]
    }

    /// k = i∘j∘i, everywhere defined because i and j are total on arrows.
    pub fn k(&self, x: usize) -> usize {
        self.i_map[self.j_map[self.i_map[x]]]
    }

    pub fn mu_table(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.mu
    }

    pub fn is_confluent(&self) -> bool {
        self.rewrite.is_confluent()
    }

    /// The rule cap that stopped completion, if it was deferred.
    pub fn completion_failure(&self) -> Option<usize> {
        self.rewrite.completion_failure()
    }

    /// Normal form of a composable arrow path; the empty result is the
    /// identity at the path's endpoints.  Exact equality needs a completed
    /// rewriting system, so a deferred completion surfaces here as the
    /// word-problem error rather than as a possibly wrong answer.
    pub fn normal_form(&self, word: &[usize]) -> Result<Vec<usize>> {
        for pair in word.windows(2) {
            if self.cod[pair[0]] != self.dom[pair[1]] {
                return Err(Error::validation(format!(
                    "path breaks between {} and {}",
                    self.arrow_labels[pair[0]], self.arrow_labels[pair[1]]
                )));
            }
        }
        if let Some(&x) = word.iter().find(|&&x| x >= self.arrow_count()) {
            return Err(Error::validation(format!("unknown arrow index {x}")));
        }
        if let Some(limit) = self.rewrite.completion_failure() {
            return Err(Error::WordProblem { limit });
        }
        Ok(self.rewrite.normal_form(word))
    }

    /// The product of two arrows when it is again a single arrow.  The
    /// table answers first; the rewriting fallback reports only reductions
    /// to a single arrow, which are sound equalities even on a deferred
    /// system.  The answer is exhaustive when the system is confluent or
    /// the table is saturated, and every table this crate constructs is.
    pub fn h_product(&self, x: usize, y: usize) -> Option<usize> {
        if self.cod[x] != self.dom[y] {
            return None;
        }
        if let Some(&z) = self.mu.get(&(x, y)) {
            return Some(z);
        }
        let nf = self.rewrite.normal_form(&[x, y]);
        if nf.len() == 1 {
            Some(nf[0])
        } else {
            None
        }
    }

    /// All pairs of arrows whose product is again an arrow, with the product.
    pub fn h_composable_pairs(&self) -> Vec<(usize, usize, usize)> {
        let n = self.arrow_count();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if let Some(z) = self.h_product(x, y) {
                    out.push((x, y, z));
                }
            }
        }
        out
    }

    /// The involution on nodes induced by j, checked over every arrow choice.
    pub fn object_involution(&self, node: usize) -> Result<usize> {
        let mut value: Option<usize> = None;
        for x in 0..self.arrow_count() {
            if self.dom[x] != node {
                continue;
            }
            let candidate = self.dom[self.j_map[x]];
            match value {
                None => value = Some(candidate),
                Some(v) if v != candidate => {
                    return Err(Error::structure(format!(
                        "node involution ill-defined at {}",
                        self.node_labels[node]
                    )))
                }
                _ => {}
            }
        }
        value.ok_or_else(|| {
            Error::structure(format!("no arrow starts at node {}", self.node_labels[node]))
        })
    }

    /// Nodes of the connected component containing `node`.
    fn component(&self, node: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        seen[node] = true;
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            for x in 0..self.arrow_count() {
                for w in [self.dom[x], self.cod[x]] {
                    let other = if w == self.dom[x] { self.cod[x] } else { self.dom[x] };
                    if w == v && !seen[other] {
                        seen[other] = true;
                        stack.push(other);
                    }
                }
            }
        }
        (0..self.node_count()).filter(|&v| seen[v]).collect()
    }

    /// Presentation of the group of loops at `node`: contract a spanning
    /// tree of the component, keep one generator per surviving arrow pair,
    /// and translate the product table into relators.
    pub fn vertex_group(&self, node: usize) -> Result<PresentedGroup> {
        if node >= self.node_count() {
            return Err(Error::validation(format!("node index {node} out of range")));
        }
        let comp = self.component(node);
        let in_comp = |v: usize| comp.binary_search(&v).is_ok();
        // Spanning tree by breadth-first search over arrow edges.
        let mut tree_arrow = vec![false; self.arrow_count()];
        let mut visited = vec![false; self.node_count()];
        visited[node] = true;
        let mut queue = std::collections::VecDeque::from([node]);
        while let Some(v) = queue.pop_front() {
            for x in 0..self.arrow_count() {
                if self.dom[x] == v && !visited[self.cod[x]] {
                    visited[self.cod[x]] = true;
                    tree_arrow[x] = true;
                    tree_arrow[self.i_map[x]] = true;
                    queue.push_back(self.cod[x]);
                }
            }
        }
        // One generator per non-tree inverse pair inside the component.
        let mut gen_of: Vec<Option<(usize, bool)>> = vec![None; self.arrow_count()];
        let mut generators: Vec<String> = Vec::new();
        let mut self_inverse: Vec<usize> = Vec::new();
        for x in 0..self.arrow_count() {
            if !in_comp(self.dom[x]) || tree_arrow[x] || gen_of[x].is_some() {
                continue;
            }
            let g = generators.len();
            generators.push(self.arrow_labels[x].clone());
            gen_of[x] = Some((g, false));
            if self.i_map[x] == x {
                self_inverse.push(g);
            } else {
                gen_of[self.i_map[x]] = Some((g, true));
            }
        }
        let mut relators: Vec<Vec<i64>> = Vec::new();
        for g in self_inverse {
            relators.push(vec![g as i64 + 1, g as i64 + 1]);
        }
        for (&(x, y), &z) in &self.mu {
            if !in_comp(self.dom[x]) {
                continue;
            }
            let mut word: Vec<i64> = Vec::new();
            for (arrow, invert) in [(x, false), (y, false), (z, true)] {
                let Some((g, flipped)) = gen_of[arrow] else { continue };
                let sign = if flipped != invert { -1 } else { 1 };
                word.push(sign * (g as i64 + 1));
            }
            if !word.is_empty() {
                relators.push(word);
            }
        }
        Ok(PresentedGroup { generators, relators })
    }

    pub fn vertex_group_abelianized(&self, node: usize) -> Result<InvariantFactors> {
        Ok(self.vertex_group(node)?.abelianized())
    }

    /// Reads a finite groupoid's generating set off as a presentation:
    /// arrows are the H-elements, the table is every H-composable pair.
    pub fn from_finite(g: &crate::groupoid::FiniteDeltaGroupoid) -> Result<DeltaPresentation> {
        let h = g.h().to_vec();
        let arrow_index = |m: usize| h.binary_search(&m).ok();
        let mut i_map = Vec::with_capacity(h.len());
        let mut j_map = Vec::with_capacity(h.len());
        for &m in &h {
            let im = arrow_index(g.inverse(m)).ok_or_else(|| {
                Error::structure(format!(
                    "inverse of {} leaves the generating set",
                    g.morphism_label(m)
                ))
            })?;
            let jm = g.j(m).and_then(arrow_index).ok_or_else(|| {
                Error::structure(format!("j undefined on {}", g.morphism_label(m)))
            })?;
            i_map.push(im);
            j_map.push(jm);
        }
        let mut mu = BTreeMap::new();
        for (x, y) in g.h_composable_pairs() {
            let z = g.product(x, y).expect("composable");
            mu.insert(
                (arrow_index(x).unwrap(), arrow_index(y).unwrap()),
                arrow_index(z).expect("product of an H-composable pair is in H"),
            );
        }
        DeltaPresentation::new(
            (0..g.object_count()).map(|a| g.object_label(a).to_string()).collect(),
            h.iter().map(|&m| g.morphism_label(m).to_string()).collect(),
            h.iter().map(|&m| g.dom(m)).collect(),
            h.iter().map(|&m| g.cod(m)).collect(),
            i_map,
            j_map,
            mu,
            SATURATED_RULE_CAP,
        )
    }
}

/// A finitely presented group: named generators, relators as signed
/// 1-based generator indices.
#[derive(Clone, Debug)]
pub struct PresentedGroup {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<i64>>,
}

impl PresentedGroup {
    /// Invariant factors of the abelianization, from the Smith form of the
    /// exponent-sum matrix of the relators.
    pub fn abelianized(&self) -> InvariantFactors {
        let n = self.generators.len();
        let cols: Vec<Vec<num::BigInt>> = self
            .relators
            .iter()
            .map(|rel| {
                let mut col = vec![num::BigInt::from(0); n];
                for &g in rel {
                    let idx = (g.unsigned_abs() as usize) - 1;
                    col[idx] += if g > 0 { 1 } else { -1 };
                }
                col
            })
            .collect();
        quotient_invariants(n, &crate::zlin::IntMatrix::from_cols(n, &cols))
    }
}

/// Arrow order of the reference model below; the groups it presents.
pub const TREFOIL_ARROWS: [&str; 8] = ["x", "x'", "x2", "x2'", "y", "y'", "xy", "xy'"];

/// The two-node, eight-arrow model groupoid whose loops at the base node
/// form the infinite cyclic group: loops x, x², their inverses, and the
/// crossing arrows y, xy with theirs.  It is the target shape the trefoil
/// triangulation completes to.
pub fn trefoil_reference() -> DeltaPresentation {
    // Indices: 0 x, 1 x', 2 x2, 3 x2', 4 y, 5 y', 6 xy, 7 xy'.
    let node_labels = vec!["A".to_string(), "B".to_string()];
    let arrow_labels: Vec<String> = TREFOIL_ARROWS.iter().map(|s| s.to_string()).collect();
    let dom = vec![0, 0, 0, 0, 0, 1, 0, 1];
    let cod = vec![0, 0, 0, 0, 1, 0, 1, 0];
    let i_map = vec![1, 0, 3, 2, 5, 4, 7, 6];
    // j: x ↔ x', x2 ↔ y, x2' ↔ xy, y' ↔ xy'.
    let j_map = vec![1, 0, 4, 6, 2, 7, 3, 5];
    let mu = BTreeMap::from([
        ((0, 0), 2),
        ((0, 3), 1),
        ((1, 1), 3),
        ((1, 2), 0),
        ((2, 1), 0),
        ((3, 0), 1),
        ((0, 4), 6),
        ((1, 6), 4),
        ((7, 0), 5),
        ((4, 7), 1),
        ((6, 5), 0),
        ((5, 1), 7),
    ]);
    DeltaPresentation::new(
        node_labels,
        arrow_labels,
        dom,
        cod,
        i_map,
        j_map,
        mu,
        DEFAULT_RULE_CAP,
    )
    .expect("reference model is consistent")
}

/// Per-arrow invariants preserved by any isomorphism, used to prune the
/// backtracking search.
fn arrow_signature(p: &DeltaPresentation, x: usize) -> (bool, bool, bool, usize, usize, usize) {
    let mut left = 0;
    let mut right = 0;
    let mut prod = 0;
    for (&(a, b), &c) in p.mu_table() {
        left += usize::from(a == x);
        right += usize::from(b == x);
        prod += usize::from(c == x);
    }
    (
        p.i(x) == x,
        p.j(x) == x,
        p.dom(x) == p.cod(x),
        left,
        right,
        prod,
    )
}

struct IsoSearch<'p> {
    a: &'p DeltaPresentation,
    b: &'p DeltaPresentation,
    sig_a: Vec<(bool, bool, bool, usize, usize, usize)>,
    sig_b: Vec<(bool, bool, bool, usize, usize, usize)>,
    arrow_map: Vec<Option<usize>>,
    arrow_used: Vec<bool>,
    node_map: Vec<Option<usize>>,
    node_used: Vec<bool>,
}

enum Undo {
    Arrow(usize, usize),
    Node(usize, usize),
}

impl IsoSearch<'_> {
    fn rollback(&mut self, undo: Vec<Undo>) {
        for op in undo.into_iter().rev() {
            match op {
                Undo::Arrow(x, u) => {
                    self.arrow_map[x] = None;
                    self.arrow_used[u] = false;
                }
                Undo::Node(p, q) => {
                    self.node_map[p] = None;
                    self.node_used[q] = false;
                }
            }
        }
    }

    fn bind_node(&mut self, p: usize, q: usize, undo: &mut Vec<Undo>) -> bool {
        match self.node_map[p] {
            Some(r) => r == q,
            None => {
                if self.node_used[q] {
                    return false;
                }
                self.node_map[p] = Some(q);
                self.node_used[q] = true;
                undo.push(Undo::Node(p, q));
                true
            }
        }
    }

    /// Binds arrow x to u and closes under i, j, and endpoint constraints.
    fn bind_arrow(&mut self, x: usize, u: usize, undo: &mut Vec<Undo>) -> bool {
        let mut queue = vec![(x, u)];
        while let Some((x, u)) = queue.pop() {
            if let Some(w) = self.arrow_map[x] {
                if w != u {
                    return false;
                }
                continue;
            }
            if self.arrow_used[u] || self.sig_a[x] != self.sig_b[u] {
                return false;
            }
            self.arrow_map[x] = Some(u);
            self.arrow_used[u] = true;
            undo.push(Undo::Arrow(x, u));
            if !self.bind_node(self.a.dom(x), self.b.dom(u), undo)
                || !self.bind_node(self.a.cod(x), self.b.cod(u), undo)
            {
                return false;
            }
            queue.push((self.a.i(x), self.b.i(u)));
            queue.push((self.a.j(x), self.b.j(u)));
        }
        true
    }

    fn mu_consistent(&self) -> bool {
        for (&(p, q), &r) in self.a.mu_table() {
            if let (Some(pp), Some(qq)) = (self.arrow_map[p], self.arrow_map[q]) {
                match self.b.mu_table().get(&(pp, qq)) {
                    None => return false,
                    Some(&rr) => {
                        if let Some(rm) = self.arrow_map[r] {
                            if rm != rr {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&mut self) -> bool {
        let x = match (0..self.a.arrow_count()).find(|&x| self.arrow_map[x].is_none()) {
            None => return self.mu_consistent(),
            Some(x) => x,
        };
        for u in 0..self.b.arrow_count() {
            if self.arrow_used[u] {
                continue;
            }
            let mut undo = Vec::new();
            if self.bind_arrow(x, u, &mut undo) && self.mu_consistent() && self.search() {
                return true;
            }
            self.rollback(undo);
        }
        false
    }
}

/// Searches for an isomorphism of presented models: bijections of arrows
/// and nodes preserving dom, cod, i, j, and the whole product table.
/// Returns (arrow map, node map) from `a`-indices to `b`-indices.
pub fn find_isomorphism(
    a: &DeltaPresentation,
    b: &DeltaPresentation,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if a.arrow_count() != b.arrow_count()
        || a.node_count() != b.node_count()
        || a.mu_table().len() != b.mu_table().len()
    {
        return None;
    }
    let sig_a = (0..a.arrow_count()).map(|x| arrow_signature(a, x)).collect();
    let sig_b = (0..b.arrow_count()).map(|x| arrow_signature(b, x)).collect();
    let mut s = IsoSearch {
        a,
        b,
        sig_a,
        sig_b,
        arrow_map: vec![None; a.arrow_count()],
        arrow_used: vec![false; a.arrow_count()],
        node_map: vec![None; a.node_count()],
        node_used: vec![false; a.node_count()],
    };
    if s.search() {
        let arrows = s.arrow_map.iter().map(|m| m.expect("search bound all arrows")).collect();
        // Nodes with no incident arrows stay unbound; pair them up in order.
        let mut spare = (0..b.node_count()).filter(|&q| !s.node_used[q]);
        let nodes = s
            .node_map
            .iter()
            .map(|m| m.unwrap_or_else(|| spare.next().expect("equal node counts")))
            .collect();
        Some((arrows, nodes))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::GroupTable;
    use crate::groupoid::pair_delta;

    #[test]
    fn reference_model_basics() {
        let p = trefoil_reference();
        assert_eq!(p.node_count(), 2);
        assert_eq!(p.arrow_count(), 8);
        assert!(p.is_confluent());
        // x·x is the single arrow x².
        assert_eq!(p.normal_form(&[0, 0]).unwrap(), vec![2]);
        // x·x' cancels to the identity path.
        assert_eq!(p.normal_form(&[0, 1]).unwrap(), Vec::<usize>::new());
        // Both nodes are fixed by the involution.
        assert_eq!(p.object_involution(0).unwrap(), 0);
        assert_eq!(p.object_involution(1).unwrap(), 1);
    }

    #[test]
    fn reference_model_h_pairs() {
        let p = trefoil_reference();
        let pairs = p.h_composable_pairs();
        assert_eq!(pairs.len(), 12);
        // The table is saturated: exactly the μ entries appear.
        for (x, y, z) in pairs {
            assert_eq!(p.mu_table().get(&(x, y)), Some(&z));
        }
    }

    #[test]
    fn reference_model_vertex_group_is_z() {
        let p = trefoil_reference();
        for node in 0..2 {
            let inv = p.vertex_group_abelianized(node).unwrap();
            assert!(inv.is_free_of_rank(1), "node {node}: {inv}");
        }
    }

    #[test]
    fn reference_model_longer_words() {
        let p = trefoil_reference();
        // x·x·x2' = x2·x2' = identity, so x·x·x2'·y normalizes to y alone.
        assert_eq!(p.normal_form(&[0, 0, 3, 4]).unwrap(), vec![4]);
        // x³ has no single-arrow form; its normal form is a length-2 word
        // that squares the loop exactly once.
        let cube = p.normal_form(&[0, 0, 0]).unwrap();
        assert_eq!(cube.len(), 2);
        let sorted = {
            let mut c = cube.clone();
            c.sort_unstable();
            c
        };
        assert_eq!(sorted, vec![0, 2]);
    }

    #[test]
    fn pair_groupoid_vertex_group_is_trivial() {
        let p = DeltaPresentation::from_finite(&pair_delta(&GroupTable::symmetric(3))).unwrap();
        let inv = p.vertex_group_abelianized(0).unwrap();
        assert!(inv.is_trivial(), "{inv}");
    }

    #[test]
    fn from_finite_preserves_counts() {
        let g = pair_delta(&GroupTable::cyclic(3));
        let p = DeltaPresentation::from_finite(&g).unwrap();
        assert_eq!(p.arrow_count(), 9);
        assert_eq!(p.node_count(), 3);
        assert_eq!(p.h_composable_pairs().len(), g.h_composable_pairs().len());
    }

    #[test]
    fn broken_paths_are_rejected() {
        let p = trefoil_reference();
        // y ends at B but x starts at A.
        assert!(p.normal_form(&[4, 0]).is_err());
    }

    #[test]
    fn isomorphism_search_finds_relabeled_copy() {
        let p = trefoil_reference();
        // Reverse the arrow order and swap the two nodes.
        let n = p.arrow_count();
        let sigma = |x: usize| n - 1 - x;
        let nu = |v: usize| 1 - v;
        let mut dom = vec![0; n];
        let mut cod = vec![0; n];
        let mut i_map = vec![0; n];
        let mut j_map = vec![0; n];
        let mut labels = vec![String::new(); n];
        for x in 0..n {
            dom[sigma(x)] = nu(p.dom(x));
            cod[sigma(x)] = nu(p.cod(x));
            i_map[sigma(x)] = sigma(p.i(x));
            j_map[sigma(x)] = sigma(p.j(x));
            labels[sigma(x)] = format!("g{x}");
        }
        let mu: BTreeMap<(usize, usize), usize> = p
            .mu_table()
            .iter()
            .map(|(&(a, b), &c)| ((sigma(a), sigma(b)), sigma(c)))
            .collect();
        // Reversing arrow order reverses the shortlex letter order, under
        // which this system no longer completes; the search only needs the
        // table, so the small cap avoids a long doomed completion run.
        let q = DeltaPresentation::new(
            vec!["P".into(), "Q".into()],
            labels,
            dom,
            cod,
            i_map,
            j_map,
            mu,
            SATURATED_RULE_CAP,
        )
        .unwrap();
        // The model has automorphisms, so the map found need not be sigma
        // itself; it only has to preserve all the structure.
        let (arrows, nodes) = find_isomorphism(&p, &q).expect("relabeled copy is isomorphic");
        for x in 0..n {
            assert_eq!(q.i(arrows[x]), arrows[p.i(x)]);
            assert_eq!(q.j(arrows[x]), arrows[p.j(x)]);
            assert_eq!(q.dom(arrows[x]), nodes[p.dom(x)]);
        }
        for (&(a, b), &c) in p.mu_table() {
            assert_eq!(q.mu_table()[&(arrows[a], arrows[b])], arrows[c]);
        }
    }

    #[test]
    fn deferred_completion_defers_word_problem_only() {
        let p = trefoil_reference();
        // A cap of one rule cannot hold the twenty defining relations, so
        // completion is deferred, yet the structure is fully usable.
        let q = DeltaPresentation::new(
            vec!["A".into(), "B".into()],
            TREFOIL_ARROWS.iter().map(|s| s.to_string()).collect(),
            (0..8).map(|x| p.dom(x)).collect(),
            (0..8).map(|x| p.cod(x)).collect(),
            (0..8).map(|x| p.i(x)).collect(),
            (0..8).map(|x| p.j(x)).collect(),
            p.mu_table().clone(),
            1,
        )
        .unwrap();
        assert!(!q.is_confluent());
        assert_eq!(q.completion_failure(), Some(1));
        assert_eq!(q.h_composable_pairs().len(), 12);
        assert_eq!(q.h_product(0, 0), Some(2));
        match q.normal_form(&[0, 0, 3, 4]) {
            Err(Error::WordProblem { limit }) => assert_eq!(limit, 1),
            other => panic!("expected deferred word problem, got {other:?}"),
        }
        // Path validation still runs ahead of the word-problem gate.
        assert!(matches!(q.normal_form(&[4, 0]), Err(Error::Validation(_))));
    }

    #[test]
    fn isomorphism_search_rejects_smaller_table() {
        let p = trefoil_reference();
        let mut mu = p.mu_table().clone();
        mu.remove(&(0, 0));
        let q = DeltaPresentation::new(
            vec!["A".into(), "B".into()],
            TREFOIL_ARROWS.iter().map(|s| s.to_string()).collect(),
            (0..8).map(|x| p.dom(x)).collect(),
            (0..8).map(|x| p.cod(x)).collect(),
            (0..8).map(|x| p.i(x)).collect(),
            (0..8).map(|x| p.j(x)).collect(),
            mu,
            SATURATED_RULE_CAP,
        )
        .unwrap();
        assert!(find_isomorphism(&p, &q).is_none());
    }
}
