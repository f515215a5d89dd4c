//! Concrete finite groupoids carrying the extra pair (H, j): a distinguished
//! generating set of morphisms H closed under inversion, and a second
//! involution j on H besides inversion.  The derived map k = i∘j∘i and the
//! compatibility laws between composition, i, j, and k are verified by
//! `check_axioms`, which reports violations with witnesses instead of
//! failing.
//!
//! Constructions provided here: the pair groupoid of a finite group, the
//! triple groupoid of a finite set, and the two one-object groupoids
//! attached to a finite ring (multiplicative and affine).

use crate::finring::{FiniteRing, GroupTable};
use crate::{Error, Result};

/// A finite groupoid with distinguished subset H and involution j on H.
///
/// Composition is diagrammatic: `product(x, y)` is defined exactly when
/// `cod(x) == dom(y)`, and the composite runs x first, then y.
#[derive(Clone, Debug)]
pub struct FiniteDeltaGroupoid {
    object_labels: Vec<String>,
    morphism_labels: Vec<String>,
    dom: Vec<usize>,
    cod: Vec<usize>,
    compose: Vec<Option<usize>>,
    inv: Vec<usize>,
    identity_at: Vec<usize>,
    h: Vec<usize>,
    h_set: Vec<bool>,
    j_table: Vec<Option<usize>>,
}

/// Outcome of the axiom check: violations are hard failures with witnesses,
/// notes record legal-but-unusual findings (an identity inside H).
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub checks: usize,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FiniteDeltaGroupoid {
    /// The empty groupoid: no objects, no morphisms.
    pub fn empty() -> FiniteDeltaGroupoid {
        FiniteDeltaGroupoid {
            object_labels: Vec::new(),
            morphism_labels: Vec::new(),
            dom: Vec::new(),
            cod: Vec::new(),
            compose: Vec::new(),
            inv: Vec::new(),
            identity_at: Vec::new(),
            h: Vec::new(),
            h_set: Vec::new(),
            j_table: Vec::new(),
        }
    }

    /// Validates the groupoid laws exhaustively and that H generates every
    /// morphism as a composite of H-elements.  The Δ-axioms for (H, j) are
    /// deliberately not enforced here; `check_axioms` reports on those.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        object_labels: Vec<String>,
        morphism_labels: Vec<String>,
        dom: Vec<usize>,
        cod: Vec<usize>,
        compose: Vec<Option<usize>>,
        inv: Vec<usize>,
        identity_at: Vec<usize>,
        h: Vec<usize>,
        j_table: Vec<Option<usize>>,
    ) -> Result<FiniteDeltaGroupoid> {
        let n = morphism_labels.len();
        let objs = object_labels.len();
        let fail = |msg: String| Err(Error::structure(msg));
        if dom.len() != n || cod.len() != n || inv.len() != n || j_table.len() != n {
            return fail("morphism-indexed arrays must all have the same length".into());
        }
        if compose.len() != n * n || identity_at.len() != objs {
            return fail("composition table or identity list has the wrong size".into());
        }
        if dom.iter().chain(&cod).any(|&o| o >= objs) {
            return fail("dom/cod out of range".into());
        }
        if inv.iter().chain(&identity_at).any(|&m| m >= n) {
            return fail("morphism index out of range".into());
        }
        let prod = |x: usize, y: usize| compose[x * n + y];
        for x in 0..n {
            for y in 0..n {
                match prod(x, y) {
                    Some(z) => {
                        if cod[x] != dom[y] {
                            return fail(format!(
                                "composite defined for non-composable pair ({}, {})",
                                morphism_labels[x], morphism_labels[y]
                            ));
                        }
                        if z >= n || dom[z] != dom[x] || cod[z] != cod[y] {
                            return fail(format!(
                                "composite of ({}, {}) has wrong endpoints",
                                morphism_labels[x], morphism_labels[y]
                            ));
                        }
                    }
                    None => {
                        if cod[x] == dom[y] {
                            return fail(format!(
                                "missing composite for composable pair ({}, {})",
                                morphism_labels[x], morphism_labels[y]
                            ));
                        }
                    }
                }
            }
        }
        for (a, &e) in identity_at.iter().enumerate() {
            if dom[e] != a || cod[e] != a {
                return fail(format!("identity of object {} has wrong endpoints", object_labels[a]));
            }
            for x in 0..n {
                if dom[x] == a && prod(e, x) != Some(x) {
                    return fail(format!("identity fails on the left of {}", morphism_labels[x]));
                }
                if cod[x] == a && prod(x, e) != Some(x) {
                    return fail(format!("identity fails on the right of {}", morphism_labels[x]));
                }
            }
        }
        for x in 0..n {
            if prod(x, inv[x]) != Some(identity_at[dom[x]]) || prod(inv[x], x) != Some(identity_at[cod[x]]) {
                return fail(format!("inverse law fails for {}", morphism_labels[x]));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let Some(xy) = prod(x, y) else { continue };
                for z in 0..n {
                    let Some(yz) = prod(y, z) else { continue };
                    if prod(xy, z) != prod(x, yz) {
                        return fail(format!(
                            "associativity fails at ({}, {}, {})",
                            morphism_labels[x], morphism_labels[y], morphism_labels[z]
                        ));
                    }
                }
            }
        }
        let mut h_set = vec![false; n];
        for &x in &h {
            if x >= n {
                return fail("H contains an out-of-range index".into());
            }
            if h_set[x] {
                return fail(format!("H lists {} twice", morphism_labels[x]));
            }
            h_set[x] = true;
        }
        for x in 0..n {
            match j_table[x] {
                Some(jx) if !h_set[x] => {
                    let _ = jx;
                    return fail(format!("j defined outside H at {}", morphism_labels[x]));
                }
                None if h_set[x] => {
                    return fail(format!("j missing on H-element {}", morphism_labels[x]));
                }
                Some(jx) if jx >= n => return fail("j value out of range".into()),
                _ => {}
            }
        }
        // H must generate: close H under composition and compare.  Identities
        // count as empty products, so they are generated from the start.
        let mut generated = h_set.clone();
        for &e in &identity_at {
            generated[e] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for x in 0..n {
                if !generated[x] {
                    continue;
                }
                for y in 0..n {
                    if !generated[y] {
                        continue;
                    }
                    if let Some(z) = prod(x, y) {
                        if !generated[z] {
                            generated[z] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| !generated[x]) {
            return fail(format!(
                "H does not generate: {} is not a composite of H-elements",
                morphism_labels[x]
            ));
        }
        let mut sorted_h = h;
        sorted_h.sort_unstable();
        Ok(FiniteDeltaGroupoid {
            object_labels,
            morphism_labels,
            dom,
            cod,
            compose,
            inv,
            identity_at,
            h: sorted_h,
            h_set,
            j_table,
        })
    }

    pub fn object_count(&self) -> usize {
        self.object_labels.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphism_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.morphism_labels.is_empty()
    }

    pub fn object_label(&self, a: usize) -> &str {
        &self.object_labels[a]
    }

    pub fn morphism_label(&self, x: usize) -> &str {
        &self.morphism_labels[x]
    }

    pub fn dom(&self, x: usize) -> usize {
        self.dom[x]
    }

    pub fn cod(&self, x: usize) -> usize {
        self.cod[x]
    }

    pub fn identity(&self, a: usize) -> usize {
        self.identity_at[a]
    }

    pub fn is_identity(&self, x: usize) -> bool {
        self.identity_at[self.dom[x]] == x
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inv[x]
    }

    /// The composite x then y, defined when `cod(x) == dom(y)`.
    pub fn product(&self, x: usize, y: usize) -> Option<usize> {
        self.compose[x * self.morphism_count() + y]
    }

    pub fn h(&self) -> &[usize] {
        &self.h
    }

    pub fn in_h(&self, x: usize) -> bool {
        self.h_set[x]
    }

    pub fn j(&self, x: usize) -> Option<usize> {
        self.j_table[x]
    }

    /// k = i∘j∘i, defined where the intermediate values stay inside H.
    pub fn k(&self, x: usize) -> Option<usize> {
        let ix = self.inv[x];
        if !self.h_set[ix] {
            return None;
        }
        let jix = self.j_table[ix]?;
        Some(self.inv[jix])
    }

    /// All pairs (x, y) with x, y in H, composable, and product again in H.
    pub fn h_composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &x in &self.h {
            for &y in &self.h {
                if let Some(z) = self.product(x, y) {
                    if self.h_set[z] {
                        out.push((x, y));
                    }
                }
            }
        }
        out
    }

    /// The involution on objects induced by j: `dom(j(x))` for any H-element
    /// x with `dom(x) == obj`.  Errors when no such x exists or the choices
    /// disagree.
    pub fn object_involution(&self, obj: usize) -> Result<usize> {
        let mut value: Option<usize> = None;
        for &x in &self.h {
            if self.dom[x] != obj {
                continue;
            }
            let Some(jx) = self.j_table[x] else { continue };
            let candidate = self.dom[jx];
            match value {
                None => value = Some(candidate),
                Some(v) if v != candidate => {
                    return Err(Error::structure(format!(
                        "object involution ill-defined at {}: {} vs {}",
                        self.object_labels[obj], self.object_labels[v], self.object_labels[candidate]
                    )))
                }
                _ => {}
            }
        }
        value.ok_or_else(|| {
            Error::structure(format!(
                "no H-element starts at object {}",
                self.object_labels[obj]
            ))
        })
    }

    /// Verifies the four defining axioms of the (H, j) structure and the
    /// derived identity k(xy)·i(k(y)) = k(k(x)·j(y)) on H-composable pairs.
    pub fn check_axioms(&self) -> AxiomReport {
        let mut report = AxiomReport {
            checks: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        };
        let name = |x: usize| self.morphism_labels[x].clone();
        for &x in &self.h {
            if self.is_identity(x) {
                report.notes.push(format!("H contains the identity {}", name(x)));
            }
        }

        // (i) H is closed under inversion.
        for &x in &self.h {
            report.checks += 1;
            if !self.h_set[self.inv[x]] {
                report
                    .violations
                    .push(format!("axiom (i): inverse of {} is not in H", name(x)));
            }
        }

        // j must be an involution into H; the remaining checks need this.
        let mut j_ok = true;
        for &x in &self.h {
            report.checks += 1;
            match self.j_table[x] {
                Some(jx) if self.h_set[jx] => {
                    if self.j_table[jx] != Some(x) {
                        report
                            .violations
                            .push(format!("j is not an involution at {}", name(x)));
                        j_ok = false;
                    }
                }
                _ => {
                    report
                        .violations
                        .push(format!("j does not map {} into H", name(x)));
                    j_ok = false;
                }
            }
        }
        if !j_ok || !report.violations.is_empty() {
            return report;
        }

        let j = |x: usize| self.j_table[x].expect("j total on H");
        let i = |x: usize| self.inv[x];

        // (ii) iji = jij pointwise on H (both sides stay in H by (i) + j).
        for &x in &self.h {
            report.checks += 1;
            let lhs = i(j(i(x)));
            let ji_x = j(i(x));
            if !self.h_set[i(ji_x)] {
                report.violations.push(format!(
                    "axiom (ii): iji({}) leaves H, jij undefined",
                    name(x)
                ));
                continue;
            }
            let rhs = j(i(j(x)));
            if lhs != rhs {
                report.violations.push(format!(
                    "axiom (ii): iji != jij at {} ({} vs {})",
                    name(x),
                    name(lhs),
                    name(rhs)
                ));
            }
        }

        // (iii) composable H-pairs stay composable after (k, j).
        for &x in &self.h {
            let Some(kx) = self.k(x) else {
                report
                    .violations
                    .push(format!("k undefined on H-element {}", name(x)));
                continue;
            };
            for &y in &self.h {
                if self.product(x, y).is_none() {
                    continue;
                }
                report.checks += 1;
                let jy = j(y);
                if self.product(kx, jy).is_none() {
                    report.violations.push(format!(
                        "axiom (iii): ({}, {}) composable but (k, j) image ({}, {}) is not",
                        name(x),
                        name(y),
                        name(kx),
                        name(jy)
                    ));
                }
            }
        }

        // (iv) H-composable pairs: (k(x), j(y)) again H-composable and the
        // composition identity k(xy)·i(k(y)) = k(k(x)·j(y)) holds.
        for (x, y) in self.h_composable_pairs() {
            report.checks += 1;
            let (Some(kx), Some(ky)) = (self.k(x), self.k(y)) else {
                report
                    .violations
                    .push(format!("k undefined on ({}, {})", name(x), name(y)));
                continue;
            };
            let jy = j(y);
            let Some(kx_jy) = self.product(kx, jy) else {
                report.violations.push(format!(
                    "axiom (iv): (k({}), j({})) not composable",
                    name(x),
                    name(y)
                ));
                continue;
            };
            if !self.h_set[kx_jy] {
                report.violations.push(format!(
                    "axiom (iv): k({})·j({}) = {} is not in H",
                    name(x),
                    name(y),
                    name(kx_jy)
                ));
                continue;
            }
            let xy = self.product(x, y).expect("H-composable pair");
            let Some(kxy) = self.k(xy) else {
                report
                    .violations
                    .push(format!("k undefined on product {}", name(xy)));
                continue;
            };
            let lhs = self.product(kxy, i(ky));
            let rhs = self.k(kx_jy);
            if lhs.is_none() || rhs.is_none() || lhs != rhs {
                report.violations.push(format!(
                    "axiom (iv): k({}{})·i(k({})) != k(k({})·j({}))",
                    name(x),
                    name(y),
                    name(y),
                    name(x),
                    name(y)
                ));
            }
        }

        // Object involution well-defined wherever H provides a choice.
        for a in 0..self.object_count() {
            report.checks += 1;
            if let Err(e) = self.object_involution(a) {
                report.violations.push(e.to_string());
            }
        }
        report
    }

    /// Swaps two j-values in place; available to tests and negative controls.
    pub fn corrupt_j_for_tests(&mut self, x: usize, y: usize) {
        self.j_table.swap(x, y);
    }
}

/// The pair groupoid of a finite group: morphisms are ordered pairs (f, g)
/// from f to g, composing by matching endpoints, with H all of G² and
/// j(f, g) = (f⁻¹, f⁻¹g).
pub fn pair_delta(grp: &GroupTable) -> FiniteDeltaGroupoid {
    let n = grp.size();
    let object_labels: Vec<String> = (0..n).map(|a| grp.label(a).to_string()).collect();
    let idx = |f: usize, g: usize| f * n + g;
    let mut morphism_labels = Vec::with_capacity(n * n);
    let mut dom = Vec::with_capacity(n * n);
    let mut cod = Vec::with_capacity(n * n);
    for f in 0..n {
        for g in 0..n {
            morphism_labels.push(format!("({},{})", grp.label(f), grp.label(g)));
            dom.push(f);
            cod.push(g);
        }
    }
    let m = n * n;
    let mut compose = vec![None; m * m];
    for f in 0..n {
        for g in 0..n {
            for h in 0..n {
                compose[idx(f, g) * m + idx(g, h)] = Some(idx(f, h));
            }
        }
    }
    let inv: Vec<usize> = (0..m).map(|x| idx(cod[x], dom[x])).collect();
    let identity_at: Vec<usize> = (0..n).map(|a| idx(a, a)).collect();
    let h: Vec<usize> = (0..m).collect();
    let j_table: Vec<Option<usize>> = (0..m)
        .map(|x| {
            let (f, g) = (dom[x], cod[x]);
            let fi = grp.inv(f);
            Some(idx(fi, grp.mul(fi, g)))
        })
        .collect();
    FiniteDeltaGroupoid::from_parts(
        object_labels,
        morphism_labels,
        dom,
        cod,
        compose,
        inv,
        identity_at,
        h,
        j_table,
    )
    .expect("pair groupoid is a groupoid")
}

/// The triple groupoid of a set of size `x_size`: morphisms (a, b, c) from
/// (a, b) to (a, c), H all triples, j(a, b, c) = (b, a, c).
pub fn triple_delta(x_size: usize) -> FiniteDeltaGroupoid {
    assert!(x_size >= 1, "the underlying set must be nonempty");
    let s = x_size;
    let oidx = |a: usize, b: usize| a * s + b;
    let midx = |a: usize, b: usize, c: usize| (a * s + b) * s + c;
    let mut object_labels = Vec::with_capacity(s * s);
    for a in 0..s {
        for b in 0..s {
            object_labels.push(format!("({a},{b})"));
        }
    }
    let m = s * s * s;
    let mut morphism_labels = Vec::with_capacity(m);
    let mut dom = Vec::with_capacity(m);
    let mut cod = Vec::with_capacity(m);
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                morphism_labels.push(format!("({a},{b},{c})"));
                dom.push(oidx(a, b));
                cod.push(oidx(a, c));
            }
        }
    }
    let mut compose = vec![None; m * m];
    for a in 0..s {
        for b in 0..s {
            for c in 0..s {
                for d in 0..s {
                    compose[midx(a, b, c) * m + midx(a, c, d)] = Some(midx(a, b, d));
                }
            }
        }
    }
    let inv: Vec<usize> = (0..m)
        .map(|x| {
            let (a, bc) = (x / (s * s), x % (s * s));
            midx(a, bc % s, bc / s)
        })
        .collect();
    let identity_at: Vec<usize> = (0..s * s).map(|ab| midx(ab / s, ab % s, ab % s)).collect();
    let h: Vec<usize> = (0..m).collect();
    let j_table: Vec<Option<usize>> = (0..m)
        .map(|x| {
            let (a, bc) = (x / (s * s), x % (s * s));
            let (b, c) = (bc / s, bc % s);
            Some(midx(b, a, c))
        })
        .collect();
    FiniteDeltaGroupoid::from_parts(
        object_labels,
        morphism_labels,
        dom,
        cod,
        compose,
        inv,
        identity_at,
        h,
        j_table,
    )
    .expect("triple groupoid is a groupoid")
}

/// One-object groupoid on the subgroup of R* generated by
/// H = (1−R*) ∩ R*, with k(x) = 1−x and j = i∘k∘i.  Empty when H is.
pub fn ring_a(r: &FiniteRing) -> FiniteDeltaGroupoid {
    let h_ring: Vec<usize> = r
        .units()
        .into_iter()
        .filter(|&x| r.is_unit(r.add(r.one(), r.neg(x))) && x != r.one())
        .collect();
    if h_ring.is_empty() {
        return FiniteDeltaGroupoid::empty();
    }
    let k_ring = |x: usize| r.add(r.one(), r.neg(x));
    let j_ring = |x: usize| {
        let ix = r.inverse(x).expect("H-elements are units");
        r.inverse(k_ring(ix)).expect("k preserves H")
    };
    one_object_group(
        closure_under_mul(&h_ring, |a, b| r.mul(a, b), r.one()),
        &h_ring,
        |a, b| r.mul(a, b),
        |a| r.inverse(a).expect("subgroup elements are units"),
        r.one(),
        |x| r.label(x).to_string(),
        j_ring,
    )
}

/// One-object groupoid on the subgroup of the affine group R⋊R* generated
/// by H = R*×R*, product (x,y)(u,v) = (x+yu, yv), k(x,y) = (y,x),
/// j = i∘k∘i.  Empty when H is (trivial ring).
pub fn ring_b(r: &FiniteRing) -> FiniteDeltaGroupoid {
    let units = r.units();
    let n = r.size();
    let enc = |x: usize, y: usize| x * n + y;
    let mul = |a: usize, b: usize| {
        let (x, y) = (a / n, a % n);
        let (u, v) = (b / n, b % n);
        enc(r.add(x, r.mul(y, u)), r.mul(y, v))
    };
    let e = enc(r.zero(), r.one());
    let inv = |a: usize| {
        let (x, y) = (a / n, a % n);
        let yi = r.inverse(y).expect("second coordinate is a unit");
        enc(r.mul(yi, r.neg(x)), yi)
    };
    let mut h_ring: Vec<usize> = Vec::new();
    for &x in &units {
        for &y in &units {
            let a = enc(x, y);
            if a != e {
                h_ring.push(a);
            }
        }
    }
    if h_ring.is_empty() {
        return FiniteDeltaGroupoid::empty();
    }
    let k_elt = |a: usize| enc(a % n, a / n);
    let j_elt = |a: usize| inv(k_elt(inv(a)));
    one_object_group(
        closure_under_mul(&h_ring, mul, e),
        &h_ring,
        mul,
        inv,
        e,
        |a| format!("({},{})", r.label(a / n), r.label(a % n)),
        j_elt,
    )
}

fn closure_under_mul(gens: &[usize], mul: impl Fn(usize, usize) -> usize, e: usize) -> Vec<usize> {
    let mut elements = vec![e];
    let mut frontier = vec![e];
    while let Some(a) = frontier.pop() {
        for &g in gens {
            let b = mul(a, g);
            if !elements.contains(&b) {
                elements.push(b);
                frontier.push(b);
            }
        }
    }
    elements.sort_unstable();
    elements
}

/// Packs a finite group (given by closure, generators, and operations in
/// some ambient encoding) into a one-object groupoid with the given H and j.
fn one_object_group(
    elements: Vec<usize>,
    h_elements: &[usize],
    mul: impl Fn(usize, usize) -> usize,
    inv: impl Fn(usize) -> usize,
    e: usize,
    label_of: impl Fn(usize) -> String,
    j_of: impl Fn(usize) -> usize,
) -> FiniteDeltaGroupoid {
    let index = |a: usize| {
        elements
            .binary_search(&a)
            .expect("operations stay inside the generated subgroup")
    };
    let m = elements.len();
    let morphism_labels: Vec<String> = elements.iter().map(|&a| label_of(a)).collect();
    let mut compose = vec![None; m * m];
    for (xi, &x) in elements.iter().enumerate() {
        for (yi, &y) in elements.iter().enumerate() {
            compose[xi * m + yi] = Some(index(mul(x, y)));
        }
    }
    let inv_table: Vec<usize> = elements.iter().map(|&a| index(inv(a))).collect();
    let h: Vec<usize> = h_elements.iter().map(|&a| index(a)).collect();
    let mut j_table = vec![None; m];
    for &a in h_elements {
        j_table[index(a)] = Some(index(j_of(a)));
    }
    FiniteDeltaGroupoid::from_parts(
        vec!["*".to_string()],
        morphism_labels,
        vec![0; m],
        vec![0; m],
        compose,
        inv_table,
        vec![index(e)],
        h,
        j_table,
    )
    .expect("a finite group is a one-object groupoid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_groupoid_shape_and_axioms() {
        let g = pair_delta(&GroupTable::cyclic(2));
        assert_eq!(g.morphism_count(), 4);
        assert_eq!(g.object_count(), 2);
        let report = g.check_axioms();
        assert!(report.passed(), "{:?}", report.violations);
        // H contains the identities of the pair groupoid.
        assert!(!report.notes.is_empty());

        let trivial = pair_delta(&GroupTable::cyclic(1));
        assert_eq!(trivial.morphism_count(), 1);
        assert!(trivial.check_axioms().passed());

        let s3 = pair_delta(&GroupTable::symmetric(3));
        assert_eq!(s3.morphism_count(), 36);
        assert!(s3.check_axioms().passed());
    }

    #[test]
    fn pair_groupoid_object_involution() {
        let z4 = GroupTable::cyclic(4);
        let g = pair_delta(&z4);
        for a in 0..4 {
            let star = g.object_involution(a).unwrap();
            // A* = A⁻¹ for the pair groupoid.
            assert_eq!(star, z4.inv(a));
            assert_eq!(g.object_involution(star).unwrap(), a);
        }
    }

    #[test]
    fn triple_groupoid_shape_and_axioms() {
        assert_eq!(triple_delta(1).morphism_count(), 1);
        let g2 = triple_delta(2);
        assert_eq!(g2.morphism_count(), 8);
        assert_eq!(g2.object_count(), 4);
        assert!(g2.check_axioms().passed());
        let g3 = triple_delta(3);
        assert!(g3.check_axioms().passed());
        // (a,b)* = (b,a)
        for a in 0..3 {
            for b in 0..3 {
                let obj = a * 3 + b;
                assert_eq!(g3.object_involution(obj).unwrap(), b * 3 + a);
            }
        }
    }

    #[test]
    fn ring_a_values() {
        assert!(ring_a(&FiniteRing::zn(2)).is_empty());
        assert!(ring_a(&FiniteRing::zn(1)).is_empty());
        let a3 = ring_a(&FiniteRing::zn(3));
        assert_eq!(a3.morphism_count(), 2);
        assert_eq!(a3.h().len(), 1);
        assert!(a3.check_axioms().passed());
        let a5 = ring_a(&FiniteRing::zn(5));
        assert_eq!(a5.morphism_count(), 4);
        assert_eq!(a5.h().len(), 3);
        assert!(a5.check_axioms().passed());
        assert!(ring_a(&FiniteRing::zn(7)).check_axioms().passed());
    }

    #[test]
    fn ring_b_values() {
        let b2 = ring_b(&FiniteRing::zn(2));
        assert_eq!(b2.morphism_count(), 2);
        assert_eq!(b2.h().len(), 1);
        let x = b2.h()[0];
        assert_eq!(b2.k(x), Some(x));
        assert!(b2.check_axioms().passed());
        assert!(ring_b(&FiniteRing::zn(1)).is_empty());
        assert!(ring_b(&FiniteRing::zn(3)).check_axioms().passed());
        assert!(ring_b(&FiniteRing::zn(5)).check_axioms().passed());
    }

    #[test]
    fn corrupted_j_is_reported() {
        let mut g = pair_delta(&GroupTable::cyclic(4));
        // Swap j between two distinct H-elements: some axiom must break.
        g.corrupt_j_for_tests(1, 2);
        let report = g.check_axioms();
        assert!(!report.passed());
    }

    #[test]
    fn h_composable_pairs_of_pair_groupoid() {
        let g = pair_delta(&GroupTable::cyclic(2));
        // Every composable pair is H-composable: (f,g)(g,h) over f,g,h.
        assert_eq!(g.h_composable_pairs().len(), 8);
    }

    #[test]
    fn generation_is_enforced() {
        // A two-element group with H = {identity} cannot generate.
        let z2 = GroupTable::cyclic(2);
        let m = 2;
        let mut compose = vec![None; m * m];
        for a in 0..m {
            for b in 0..m {
                compose[a * m + b] = Some(z2.mul(a, b));
            }
        }
        let result = FiniteDeltaGroupoid::from_parts(
            vec!["*".into()],
            vec!["e".into(), "t".into()],
            vec![0, 0],
            vec![0, 0],
            compose,
            vec![0, 1],
            vec![0],
            vec![0],
            vec![Some(0), None],
        );
        assert!(result.is_err());
    }
}
