//! Ideal triangulations and their completion into groupoid presentations.
//!
//! A tetrahedral object is a finite left S4-set `V`, a finite left S3-set
//! `I`, and an S3-equivariant map `a: V -> I` (S3 sits inside S4 as the
//! stabilizer of the letter 3).  Every triangulation yields one, with
//! `V = S4 x tetrahedra` and `I = S3 x faces`.  The completion algorithm
//! quotients the object until it carries an associative partial product,
//! then reads off a presented groupoid whose arrows are the I-classes.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use once_cell::sync::Lazy;
use serde::Serialize;

use crate::error::Error;
use crate::groupoid::AxiomReport;
use crate::perm::{symmetric_group, Perm};
use crate::presentation::{DeltaPresentation, SATURATED_RULE_CAP};
use crate::Result;

/// Multiplication tables for the symmetric groups of degree 4 and 3, with
/// the degree-3 group identified with the stabilizer of the letter 3.
/// Group elements are indexed by the lexicographic order of `symmetric_group`,
/// so index 0 is the identity in both tables.
struct SymTables {
    s4: Vec<Perm>,
    s3: Vec<Perm>,
    s4_mul: Vec<Vec<usize>>,
    s3_mul: Vec<Vec<usize>>,
    /// Index in `s4` of each `s3` element.
    s3_in_s4: Vec<usize>,
    /// Adjacent transpositions s1, s2, s3 as `s4` indices.
    s4_gen: [usize; 3],
    /// s1, s2 as `s3` indices.
    s3_gen: [usize; 2],
    /// The transposition (0 2) as an `s3` index.
    s3_k02: usize,
    /// The 3-cycle (3 2 1) as an `s4` index.
    s4_c321: usize,
    /// Coset representatives (i 3) for i = 0..4, with (3 3) = identity.
    coset_rep: [usize; 4],
    /// The face twists g_0 = (0 1 2), g_1 = (1 2), g_2 = g_3 = identity,
    /// as `s3` indices.
    face_twist: [usize; 4],
}

static TABLES: Lazy<SymTables> = Lazy::new(|| {
    let s4 = symmetric_group(4);
    let s3 = symmetric_group(3);
    let key = |p: &Perm| -> Vec<usize> { (0..4).map(|x| p.apply(x)).collect() };
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for (g, p) in s4.iter().enumerate() {
        index.insert(key(p), g);
    }
    let s4_idx = |p: &Perm| -> usize { index[&key(p)] };

    let s4_mul: Vec<Vec<usize>> = s4
        .iter()
        .map(|g| s4.iter().map(|h| s4_idx(&g.compose(h))).collect())
        .collect();
    let mut index3: HashMap<Vec<usize>, usize> = HashMap::new();
    for (g, p) in s3.iter().enumerate() {
        index3.insert(key(p), g);
    }
    let s3_idx = |p: &Perm| -> usize { index3[&key(p)] };
    let s3_mul: Vec<Vec<usize>> = s3
        .iter()
        .map(|g| s3.iter().map(|h| s3_idx(&g.compose(h))).collect())
        .collect();
    let s3_in_s4: Vec<usize> = s3.iter().map(|p| s4_idx(p)).collect();

    let s = |i: usize| Perm::transposition(i).expect("positive index");
    let s4_gen = [s4_idx(&s(1)), s4_idx(&s(2)), s4_idx(&s(3))];
    let s3_gen = [s3_idx(&s(1)), s3_idx(&s(2))];
    let s3_k02 = s3_idx(&Perm::swap(0, 2));
    let c321 = Perm::from_images(vec![0, 3, 1, 2]).expect("valid images");
    let s4_c321 = s4_idx(&c321);
    let coset_rep = [
        s4_idx(&Perm::swap(0, 3)),
        s4_idx(&Perm::swap(1, 3)),
        s4_idx(&Perm::swap(2, 3)),
        s4_idx(&Perm::identity()),
    ];
    let g0 = Perm::from_images(vec![1, 2, 0]).expect("valid images");
    let face_twist = [s3_idx(&g0), s3_idx(&Perm::swap(1, 2)), 0, 0];

    SymTables {
        s4,
        s3,
        s4_mul,
        s3_mul,
        s3_in_s4,
        s4_gen,
        s3_gen,
        s3_k02,
        s4_c321,
        coset_rep,
        face_twist,
    }
});

fn tables() -> &'static SymTables {
    &TABLES
}

/// A triangulation by ideal tetrahedra: each tetrahedron lists the names of
/// its four faces in boundary order, and each face may optionally list the
/// names of its three edges.  Edge data is used only for validation.
#[derive(Clone, Debug)]
pub struct Triangulation {
    tet_names: Vec<String>,
    tet_faces: Vec<[usize; 4]>,
    face_names: Vec<String>,
    edge_names: Vec<String>,
    face_edges: Vec<[usize; 3]>,
}

/// Parses the line-based triangulation format:
///
/// ```text
/// # comment
/// tet <name>: <f0> <f1> <f2> <f3>
/// face <name>: <e0> <e1> <e2>
/// ```
///
/// Face lines are optional, but must cover every face when present.
pub fn parse_triangulation(text: &str) -> Result<Triangulation> {
    struct RawTet {
        line: usize,
        name: String,
        faces: [String; 4],
    }
    struct RawFace {
        line: usize,
        name: String,
        edges: [String; 3],
    }
    let mut tets: Vec<RawTet> = Vec::new();
    let mut faces: Vec<RawFace> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (kind, rest) = match line.split_once(char::is_whitespace) {
            Some(parts) => parts,
            None => return Err(Error::parse(lineno, format!("malformed line `{line}`"))),
        };
        let (name, items) = match rest.split_once(':') {
            Some((n, i)) => (n.trim(), i.trim()),
            None => return Err(Error::parse(lineno, "expected `<name>:` after keyword")),
        };
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::parse(lineno, format!("invalid name `{name}`")));
        }
        let items: Vec<&str> = items.split_whitespace().collect();
        match kind {
            "tet" => {
                if items.len() != 4 {
                    return Err(Error::parse(
                        lineno,
                        format!("tetrahedron needs 4 face names, found {}", items.len()),
                    ));
                }
                if tets.iter().any(|t| t.name == name) {
                    return Err(Error::parse(lineno, format!("duplicate tetrahedron `{name}`")));
                }
                let f: Vec<String> = items.iter().map(|s| s.to_string()).collect();
                tets.push(RawTet {
                    line: lineno,
                    name: name.to_string(),
                    faces: [f[0].clone(), f[1].clone(), f[2].clone(), f[3].clone()],
                });
            }
            "face" => {
                if items.len() != 3 {
                    return Err(Error::parse(
                        lineno,
                        format!("face needs 3 edge names, found {}", items.len()),
                    ));
                }
                if faces.iter().any(|f| f.name == name) {
                    return Err(Error::parse(lineno, format!("duplicate face line `{name}`")));
                }
                let e: Vec<String> = items.iter().map(|s| s.to_string()).collect();
                faces.push(RawFace {
                    line: lineno,
                    name: name.to_string(),
                    edges: [e[0].clone(), e[1].clone(), e[2].clone()],
                });
            }
            other => {
                return Err(Error::parse(lineno, format!("unknown keyword `{other}`")));
            }
        }
    }
    if tets.is_empty() {
        return Err(Error::validation("triangulation has no tetrahedra"));
    }

    let mut face_names: Vec<String> = Vec::new();
    let mut face_index: HashMap<String, usize> = HashMap::new();
    let mut intern_face = |name: &str| -> usize {
        if let Some(&i) = face_index.get(name) {
            return i;
        }
        let i = face_names.len();
        face_names.push(name.to_string());
        face_index.insert(name.to_string(), i);
        i
    };
    let mut tet_names = Vec::new();
    let mut tet_faces = Vec::new();
    for t in &tets {
        let _ = t.line;
        tet_names.push(t.name.clone());
        let mut row = [0usize; 4];
        for (slot, fname) in row.iter_mut().zip(&t.faces) {
            *slot = intern_face(fname);
        }
        tet_faces.push(row);
    }

    let mut edge_names: Vec<String> = Vec::new();
    let mut edge_index: HashMap<String, usize> = HashMap::new();
    let mut face_edges = vec![None; face_names.len()];
    for f in &faces {
        let fi = match face_index.get(&f.name) {
            Some(&fi) => fi,
            None => {
                return Err(Error::parse(
                    f.line,
                    format!("unknown face `{}` (not used by any tetrahedron)", f.name),
                ));
            }
        };
        let mut row = [0usize; 3];
        for (slot, ename) in row.iter_mut().zip(&f.edges) {
            *slot = match edge_index.get(ename) {
                Some(&e) => e,
                None => {
                    let e = edge_names.len();
                    edge_names.push(ename.clone());
                    edge_index.insert(ename.clone(), e);
                    e
                }
            };
        }
        face_edges[fi] = Some(row);
    }
    let with_edges = face_edges.iter().filter(|e| e.is_some()).count();
    let face_edges = if with_edges == 0 {
        Vec::new()
    } else if with_edges == face_names.len() {
        face_edges.into_iter().map(|e| e.expect("counted above")).collect()
    } else {
        return Err(Error::validation(
            "edge data must be given for every face or for none",
        ));
    };

    let t = Triangulation {
        tet_names,
        tet_faces,
        face_names,
        edge_names,
        face_edges,
    };
    t.validate()?;
    Ok(t)
}

impl Triangulation {
    pub fn tet_count(&self) -> usize {
        self.tet_names.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn has_edges(&self) -> bool {
        !self.face_edges.is_empty()
    }

    pub fn tet_name(&self, t: usize) -> &str {
        &self.tet_names[t]
    }

    pub fn face_name(&self, f: usize) -> &str {
        &self.face_names[f]
    }

    /// Checks the gluing invariants: every face is used exactly twice, and
    /// edge data (when present) has matching counts and consistent
    /// face/edge incidences on every tetrahedron.
    pub fn validate(&self) -> Result<()> {
        let mut uses = vec![0usize; self.face_names.len()];
        for row in &self.tet_faces {
            for &f in row {
                uses[f] += 1;
            }
        }
        for (f, &n) in uses.iter().enumerate() {
            if n != 2 {
                return Err(Error::validation(format!(
                    "face `{}` is used {} times, expected exactly 2",
                    self.face_names[f], n
                )));
            }
        }
        if self.has_edges() {
            if self.edge_names.len() != self.tet_names.len() {
                return Err(Error::validation(format!(
                    "{} edges for {} tetrahedra; an ideal triangulation needs equal numbers",
                    self.edge_names.len(),
                    self.tet_names.len()
                )));
            }
            if self.face_names.len() != 2 * self.tet_names.len() {
                return Err(Error::validation(format!(
                    "{} faces for {} tetrahedra; expected twice as many faces",
                    self.face_names.len(),
                    self.tet_names.len()
                )));
            }
            // Boundary maps must commute simplicially: taking face j of a
            // tetrahedron and then edge i must agree with face i then edge
            // j-1, for i < j.
            for (t, row) in self.tet_faces.iter().enumerate() {
                for j in 1..4 {
                    for i in 0..j.min(3) {
                        let lhs = self.face_edges[row[j]][i];
                        let rhs = self.face_edges[row[i]][j - 1];
                        if lhs != rhs {
                            return Err(Error::validation(format!(
                                "tetrahedron `{}`: edge {} of face {} is `{}` but edge {} of face {} is `{}`",
                                self.tet_names[t],
                                i,
                                j,
                                self.edge_names[lhs],
                                j - 1,
                                i,
                                self.edge_names[rhs],
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Serializes back to the line-based file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, row) in self.tet_faces.iter().enumerate() {
            out.push_str(&format!(
                "tet {}: {} {} {} {}\n",
                self.tet_names[t],
                self.face_names[row[0]],
                self.face_names[row[1]],
                self.face_names[row[2]],
                self.face_names[row[3]],
            ));
        }
        for (f, row) in self.face_edges.iter().enumerate() {
            out.push_str(&format!(
                "face {}: {} {} {}\n",
                self.face_names[f],
                self.edge_names[row[0]],
                self.edge_names[row[1]],
                self.edge_names[row[2]],
            ));
        }
        out
    }

    /// The edge joining vertex positions `p < q` of tetrahedron `t`, read
    /// off from any face containing both vertices.
    fn tet_edge(&self, t: usize, p: usize, q: usize) -> usize {
        let m = (0..4).find(|&m| m != p && m != q).expect("two omitted positions");
        let lp = p - usize::from(p > m);
        let lq = q - usize::from(q > m);
        self.face_edges[self.tet_faces[t][m]][3 - lp - lq]
    }
}

pub const TREFOIL_TRIANGULATION: &str = "# trefoil knot complement: two ideal tetrahedra
tet u: a b c d
tet v: d c b a
face a: p p p
face b: p q p
face c: p q p
face d: p p p
";

pub const FIG8_TRIANGULATION: &str = "# figure-eight knot complement: two ideal tetrahedra
tet u: a b c d
tet v: c d a b
face a: p q q
face b: p p q
face c: q p p
face d: q q p
";

pub const TRIANGULATION_PRESETS: [&str; 2] = ["trefoil", "fig8"];

pub fn preset_triangulation(name: &str) -> Result<Triangulation> {
    match name {
        "trefoil" => parse_triangulation(TREFOIL_TRIANGULATION),
        "fig8" => parse_triangulation(FIG8_TRIANGULATION),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// A finite S4-set V, finite S3-set I, and equivariant map a: V -> I.
/// Action tables are stored for every group element, indexed as in
/// `SymTables`.
#[derive(Clone)]
pub struct TetObject {
    v_labels: Vec<String>,
    i_labels: Vec<String>,
    v_action: Vec<Vec<usize>>,
    i_action: Vec<Vec<usize>>,
    a: Vec<usize>,
}

impl TetObject {
    pub fn v_count(&self) -> usize {
        self.a.len()
    }

    pub fn i_count(&self) -> usize {
        self.i_labels.len()
    }

    pub fn v_label(&self, v: usize) -> &str {
        &self.v_labels[v]
    }

    pub fn i_label(&self, x: usize) -> &str {
        &self.i_labels[x]
    }

    pub fn a(&self, v: usize) -> usize {
        self.a[v]
    }

    fn act_v(&self, g: usize, v: usize) -> usize {
        self.v_action[g][v]
    }

    /// The pair (a(v), a((321)v)); distinct elements with equal pairs get
    /// merged by `tilde`.
    pub fn tau(&self, v: usize) -> (usize, usize) {
        let tb = tables();
        (self.a[v], self.a[self.act_v(tb.s4_c321, v)])
    }

    pub fn tau_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        (0..self.v_count()).all(|v| seen.insert(self.tau(v)))
    }

    /// Exhaustive certificate: both action tables are genuine group
    /// actions and `a` is equivariant for the degree-3 subgroup.
    pub fn equivariance_report(&self) -> AxiomReport {
        let tb = tables();
        let mut report = AxiomReport {
            checks: 0,
            violations: Vec::new(),
            notes: Vec::new(),
        };
        let nv = self.v_count();
        let ni = self.i_count();
        for g in 0..24 {
            let row = &self.v_action[g];
            let mut seen = vec![false; nv];
            for &img in row {
                if img >= nv || std::mem::replace(&mut seen[img], true) {
                    report
                        .violations
                        .push(format!("V row {} is not a permutation", tb.s4[g]));
                    break;
                }
            }
        }
        for g in 0..6 {
            let row = &self.i_action[g];
            let mut seen = vec![false; ni];
            for &img in row {
                if img >= ni || std::mem::replace(&mut seen[img], true) {
                    report
                        .violations
                        .push(format!("I row {} is not a permutation", tb.s3[g]));
                    break;
                }
            }
        }
        if !report.violations.is_empty() {
            return report;
        }
        for g in 0..24 {
            for h in 0..24 {
                let gh = tb.s4_mul[g][h];
                for v in 0..nv {
                    report.checks += 1;
                    if self.v_action[g][self.v_action[h][v]] != self.v_action[gh][v] {
                        report.violations.push(format!(
                            "V action violates {} * {} at {}",
                            tb.s4[g],
                            tb.s4[h],
                            self.v_labels[v]
                        ));
                    }
                }
            }
        }
        for g in 0..6 {
            for h in 0..6 {
                let gh = tb.s3_mul[g][h];
                for x in 0..ni {
                    report.checks += 1;
                    if self.i_action[g][self.i_action[h][x]] != self.i_action[gh][x] {
                        report.violations.push(format!(
                            "I action violates {} * {} at {}",
                            tb.s3[g],
                            tb.s3[h],
                            self.i_labels[x]
                        ));
                    }
                }
            }
        }
        for (g3, &g4) in tb.s3_in_s4.iter().enumerate() {
            for v in 0..nv {
                report.checks += 1;
                if self.a[self.v_action[g4][v]] != self.i_action[g3][self.a[v]] {
                    report.violations.push(format!(
                        "a is not equivariant for {} at {}",
                        tb.s3[g3], self.v_labels[v]
                    ));
                }
            }
        }
        report
    }

    fn verify(&self) -> Result<()> {
        let report = self.equivariance_report();
        match report.violations.first() {
            None => Ok(()),
            Some(first) => Err(Error::structure(first.clone())),
        }
    }
}

/// The tetrahedral object of a triangulation: V = S4 x tetrahedra,
/// I = S3 x faces, with `a` fixed on the coset representatives (i 3) as
/// (g_i, face i) and extended equivariantly.
pub fn build_tet_object(t: &Triangulation) -> Result<TetObject> {
    t.validate()?;
    let tb = tables();
    let nt = t.tet_count();
    let nf = t.face_count();
    let nv = 24 * nt;
    let ni = 6 * nf;

    let mut v_labels = Vec::with_capacity(nv);
    for g in 0..24 {
        for x in 0..nt {
            v_labels.push(format!("({},{})", tb.s4[g], t.tet_names[x]));
        }
    }
    let mut i_labels = Vec::with_capacity(ni);
    for g in 0..6 {
        for f in 0..nf {
            i_labels.push(format!("({},{})", tb.s3[g], t.face_names[f]));
        }
    }
    let v_action: Vec<Vec<usize>> = (0..24)
        .map(|h| {
            let mut row = Vec::with_capacity(nv);
            for g in 0..24 {
                for x in 0..nt {
                    row.push(tb.s4_mul[h][g] * nt + x);
                }
            }
            row
        })
        .collect();
    let i_action: Vec<Vec<usize>> = (0..6)
        .map(|h| {
            let mut row = Vec::with_capacity(ni);
            for g in 0..6 {
                for f in 0..nf {
                    row.push(tb.s3_mul[h][g] * nf + f);
                }
            }
            row
        })
        .collect();

    let mut a = Vec::with_capacity(nv);
    for g in 0..24 {
        let pi = &tb.s4[g];
        let omitted = (0..4).find(|&m| pi.apply(m) == 3).expect("3 has a preimage");
        // pi = sigma (omitted 3) with sigma fixing 3, so a(pi, x) follows
        // from the representative value by equivariance.
        let sigma = pi.compose(&Perm::swap(omitted, 3));
        let sigma3 = tb
            .s3
            .iter()
            .position(|p| p == &sigma)
            .ok_or_else(|| Error::structure("coset factor does not fix 3"))?;
        let twist = tb.s3_mul[sigma3][tb.face_twist[omitted]];
        for x in 0..nt {
            a.push(twist * nf + t.tet_faces[x][omitted]);
        }
    }

    let obj = TetObject {
        v_labels,
        i_labels,
        v_action,
        i_action,
        a,
    };
    obj.verify()?;
    Ok(obj)
}

/// Union-find with minimum-element representatives, so quotient classes
/// are canonically ordered by their smallest member.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Closes the seeded merges into equivariant equivalence relations: V-merges
/// propagate through the full S4 action and push their a-images onto I,
/// I-merges propagate through the S3 action.
fn close_merges(
    obj: &TetObject,
    vuf: &mut UnionFind,
    iuf: &mut UnionFind,
    seed_v: &[(usize, usize)],
    seed_i: &[(usize, usize)],
) {
    let mut vwork: Vec<(usize, usize)> = seed_v.to_vec();
    let mut iwork: Vec<(usize, usize)> = seed_i.to_vec();
    loop {
        if let Some((p, q)) = vwork.pop() {
            if vuf.union(p, q) {
                for g in 0..24 {
                    vwork.push((obj.v_action[g][p], obj.v_action[g][q]));
                }
                iwork.push((obj.a[p], obj.a[q]));
            }
            continue;
        }
        if let Some((p, q)) = iwork.pop() {
            if iuf.union(p, q) {
                for g in 0..6 {
                    iwork.push((obj.i_action[g][p], obj.i_action[g][q]));
                }
            }
            continue;
        }
        break;
    }
}

/// Quotients both carriers by the (already closed) relations and re-checks
/// that actions and `a` descend.
fn quotient(obj: &TetObject, vuf: &mut UnionFind, iuf: &mut UnionFind) -> Result<TetObject> {
    let nv = obj.v_count();
    let ni = obj.i_count();
    let mut vroots: Vec<usize> = Vec::new();
    let mut vmap = vec![usize::MAX; nv];
    for v in 0..nv {
        if vuf.find(v) == v {
            vmap[v] = vroots.len();
            vroots.push(v);
        }
    }
    for v in 0..nv {
        let r = vuf.find(v);
        vmap[v] = vmap[r];
    }
    let mut iroots: Vec<usize> = Vec::new();
    let mut imap = vec![usize::MAX; ni];
    for x in 0..ni {
        if iuf.find(x) == x {
            imap[x] = iroots.len();
            iroots.push(x);
        }
    }
    for x in 0..ni {
        let r = iuf.find(x);
        imap[x] = imap[r];
    }

    let v_labels: Vec<String> = vroots.iter().map(|&v| obj.v_labels[v].clone()).collect();
    let i_labels: Vec<String> = iroots.iter().map(|&x| obj.i_labels[x].clone()).collect();
    let v_action: Vec<Vec<usize>> = (0..24)
        .map(|g| vroots.iter().map(|&v| vmap[obj.v_action[g][v]]).collect())
        .collect();
    let i_action: Vec<Vec<usize>> = (0..6)
        .map(|g| iroots.iter().map(|&x| imap[obj.i_action[g][x]]).collect())
        .collect();
    let a: Vec<usize> = vroots.iter().map(|&v| imap[obj.a[v]]).collect();

    // The closure guarantees these; check anyway so a bug cannot silently
    // produce an ill-defined quotient.
    for v in 0..nv {
        for g in 0..24 {
            if vmap[obj.v_action[g][v]] != v_action[g][vmap[v]] {
                return Err(Error::structure("quotient action on V is not well defined"));
            }
        }
        if imap[obj.a[v]] != a[vmap[v]] {
            return Err(Error::structure("quotient of a is not well defined"));
        }
    }
    for x in 0..ni {
        for g in 0..6 {
            if imap[obj.i_action[g][x]] != i_action[g][imap[x]] {
                return Err(Error::structure("quotient action on I is not well defined"));
            }
        }
    }

    Ok(TetObject {
        v_labels,
        i_labels,
        v_action,
        i_action,
        a,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStage {
    pub label: String,
    pub v_before: usize,
    pub v_after: usize,
    pub i_before: usize,
    pub i_after: usize,
    pub merges: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CompletionTrace {
    pub stages: Vec<TraceStage>,
}

impl CompletionTrace {
    fn push(
        &mut self,
        label: &str,
        v_before: usize,
        v_after: usize,
        i_before: usize,
        i_after: usize,
        merges: usize,
    ) {
        self.stages.push(TraceStage {
            label: label.to_string(),
            v_before,
            v_after,
            i_before,
            i_after,
            merges,
        });
    }
}

impl fmt::Display for CompletionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            writeln!(
                f,
                "{}: V {} -> {}, I {} -> {} ({} seed merges)",
                s.label, s.v_before, s.v_after, s.i_before, s.i_after, s.merges
            )?;
        }
        Ok(())
    }
}

/// Merges elements of V with equal tau-pairs (equivariantly, pushing images
/// onto I) until tau is injective.  Cardinalities weakly decrease.
pub fn tilde(mut obj: TetObject, trace: &mut CompletionTrace) -> Result<TetObject> {
    loop {
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for v in 0..obj.v_count() {
            groups.entry(obj.tau(v)).or_default().push(v);
        }
        let mut seeds: Vec<(usize, usize)> = Vec::new();
        for members in groups.values() {
            for &w in &members[1..] {
                seeds.push((members[0], w));
            }
        }
        if seeds.is_empty() {
            return Ok(obj);
        }
        let (vb, ib) = (obj.v_count(), obj.i_count());
        let mut vuf = UnionFind::new(vb);
        let mut iuf = UnionFind::new(ib);
        close_merges(&obj, &mut vuf, &mut iuf, &seeds, &[]);
        obj = quotient(&obj, &mut vuf, &mut iuf)?;
        obj.verify()?;
        if obj.v_count() > vb || obj.i_count() > ib {
            return Err(Error::structure("quotient increased cardinality"));
        }
        trace.push("tilde", vb, obj.v_count(), ib, obj.i_count(), seeds.len());
    }
}

/// The partial product read off a tau-injective object: each v contributes
/// the triple (x, y, xy) with x = a(v), y = a((321)v), xy = a(s3 v).
pub struct ProductTable {
    pub triples: Vec<(usize, usize, usize)>,
    pub map: BTreeMap<(usize, usize), usize>,
}

pub fn product_table(obj: &TetObject) -> Result<ProductTable> {
    let tb = tables();
    let mut triples = Vec::with_capacity(obj.v_count());
    let mut map = BTreeMap::new();
    for v in 0..obj.v_count() {
        let (x, y) = obj.tau(v);
        let p = obj.a[obj.act_v(tb.s4_gen[2], v)];
        if let Some(&old) = map.get(&(x, y)) {
            if old != p {
                return Err(Error::structure(format!(
                    "product not single valued at ({},{})",
                    obj.i_labels[x], obj.i_labels[y]
                )));
            }
        }
        map.insert((x, y), p);
        triples.push((x, y, p));
    }
    Ok(ProductTable { triples, map })
}

/// Pairs of I-elements that must merge for the product to become
/// associative: x(yz) vs (xy)z wherever all four pairwise products exist.
fn assoc_merges(obj: &TetObject) -> Result<Vec<(usize, usize)>> {
    let pt = product_table(obj)?;
    let mut by_first: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for &(x, y, p) in &pt.triples {
        by_first.entry(x).or_default().push((y, p));
    }
    let mut seeds: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(x, y, xy) in &pt.triples {
        if let Some(rest) = by_first.get(&y) {
            for &(z, yz) in rest {
                if let (Some(&l), Some(&r)) = (pt.map.get(&(x, yz)), pt.map.get(&(xy, z))) {
                    if l != r {
                        seeds.insert((l.min(r), l.max(r)));
                    }
                }
            }
        }
    }
    Ok(seeds.into_iter().collect())
}

/// Quotients I by the associativity relation (equivariantly); V is carried
/// along unchanged with `a` composed with the projection.
pub fn assoc_quotient(obj: TetObject, trace: &mut CompletionTrace) -> Result<(TetObject, bool)> {
    let seeds = assoc_merges(&obj)?;
    if seeds.is_empty() {
        return Ok((obj, false));
    }
    let (vb, ib) = (obj.v_count(), obj.i_count());
    let mut vuf = UnionFind::new(vb);
    let mut iuf = UnionFind::new(ib);
    close_merges(&obj, &mut vuf, &mut iuf, &[], &seeds);
    let obj = quotient(&obj, &mut vuf, &mut iuf)?;
    obj.verify()?;
    trace.push("assoc", vb, obj.v_count(), ib, obj.i_count(), seeds.len());
    Ok((obj, true))
}

/// Certificate for the product identities on a stabilized object:
/// i(xy) = i(y)i(x), k(xy) = k(k(x)j(y))k(y), i(x)(xy) = y and (xy)i(y) = x,
/// with i, j, k acting on I as s2, s1, (02).
pub fn product_identities_report(obj: &TetObject) -> Result<AxiomReport> {
    let tb = tables();
    let pt = product_table(obj)?;
    let i_row = &obj.i_action[tb.s3_gen[1]];
    let j_row = &obj.i_action[tb.s3_gen[0]];
    let k_row = &obj.i_action[tb.s3_k02];
    let mut report = AxiomReport {
        checks: 0,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    let lbl = |x: usize| obj.i_labels[x].clone();
    for &(x, y, xy) in &pt.triples {
        report.checks += 4;
        match pt.map.get(&(i_row[y], i_row[x])) {
            Some(&p) if p == i_row[xy] => {}
            Some(_) => report
                .violations
                .push(format!("i({}{}) != i({})i({})", lbl(x), lbl(y), lbl(y), lbl(x))),
            None => report
                .violations
                .push(format!("pair (i({}),i({})) has no product", lbl(y), lbl(x))),
        }
        match pt.map.get(&(k_row[x], j_row[y])) {
            None => report
                .violations
                .push(format!("pair (k({}),j({})) has no product", lbl(x), lbl(y))),
            Some(&q) => match pt.map.get(&(k_row[q], k_row[y])) {
                Some(&p) if p == k_row[xy] => {}
                Some(_) => report.violations.push(format!(
                    "k({}{}) != k(k({})j({}))k({})",
                    lbl(x),
                    lbl(y),
                    lbl(x),
                    lbl(y),
                    lbl(y)
                )),
                None => report
                    .violations
                    .push(format!("pair (k(k({})j({})),k({})) has no product", lbl(x), lbl(y), lbl(y))),
            },
        }
        match pt.map.get(&(i_row[x], xy)) {
            Some(&p) if p == y => {}
            _ => report
                .violations
                .push(format!("i({})({}{}) != {}", lbl(x), lbl(x), lbl(y), lbl(y))),
        }
        match pt.map.get(&(xy, i_row[y])) {
            Some(&p) if p == x => {}
            _ => report
                .violations
                .push(format!("({}{})i({}) != {}", lbl(x), lbl(y), lbl(y), lbl(x))),
        }
    }
    Ok(report)
}

/// Runs the full completion on a tetrahedral object: alternate tilde and
/// associativity quotients until stable, certify the product identities,
/// then read off the presented groupoid whose nodes are the classes of the
/// relation generated by (i(x), y) over all product pairs.
pub fn complete_object(obj: TetObject) -> Result<(DeltaPresentation, CompletionTrace)> {
    obj.verify()?;
    let mut trace = CompletionTrace::default();
    let mut obj = obj;
    loop {
        obj = tilde(obj, &mut trace)?;
        let (next, changed) = assoc_quotient(obj, &mut trace)?;
        obj = next;
        if !changed {
            break;
        }
    }
    let identities = product_identities_report(&obj)?;
    if !identities.passed() {
        return Err(Error::structure(format!(
            "completed object fails product identities: {}",
            identities.violations.join("; ")
        )));
    }

    let tb = tables();
    let pt = product_table(&obj)?;
    let i_row = obj.i_action[tb.s3_gen[1]].clone();
    let j_row = obj.i_action[tb.s3_gen[0]].clone();
    let ni = obj.i_count();
    let mut tuf = UnionFind::new(ni);
    let mut unions = 0usize;
    for &(x, y, _) in &pt.triples {
        if tuf.union(i_row[x], y) {
            unions += 1;
        }
    }
    let mut node_of = vec![usize::MAX; ni];
    let mut nodes = 0usize;
    for x in 0..ni {
        if tuf.find(x) == x {
            node_of[x] = nodes;
            nodes += 1;
        }
    }
    for x in 0..ni {
        let r = tuf.find(x);
        node_of[x] = node_of[r];
    }
    let node_labels: Vec<String> = (0..nodes).map(|n| format!("n{n}")).collect();
    let dom: Vec<usize> = (0..ni).map(|x| node_of[x]).collect();
    let cod: Vec<usize> = (0..ni).map(|x| node_of[i_row[x]]).collect();
    trace.push("graph", obj.v_count(), obj.v_count(), ni, ni, unions);

    let pres = DeltaPresentation::new(
        node_labels,
        obj.i_labels.clone(),
        dom,
        cod,
        i_row,
        j_row,
        pt.map,
        SATURATED_RULE_CAP,
    )?;
    Ok((pres, trace))
}

pub fn complete(t: &Triangulation) -> Result<(DeltaPresentation, CompletionTrace)> {
    complete_object(build_tet_object(t)?)
}

/// Rebuilds a tetrahedral object from a presented groupoid: I is the arrow
/// set acted on by j, i; V is the set of product pairs with the action
/// s1(x,y) = (j(x), j(k(x)j(y))), s2(x,y) = (i(x), xy), s3(x,y) = (xy, i(y));
/// a is projection onto the first component.
pub fn tet_object_from_presentation(p: &DeltaPresentation) -> Result<TetObject> {
    let tb = tables();
    let n = p.arrow_count();
    let pairs = p.h_composable_pairs();
    let mut pair_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut product: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (idx, &(x, y, z)) in pairs.iter().enumerate() {
        pair_index.insert((x, y), idx);
        product.insert((x, y), z);
    }

    let mut i_action: Vec<Vec<usize>> = Vec::with_capacity(6);
    for perm in &tb.s3 {
        let word = perm.adjacent_word();
        let mut row: Vec<usize> = (0..n).collect();
        for x in row.iter_mut() {
            let mut y = *x;
            for &s in word.iter().rev() {
                y = match s {
                    1 => p.j(y),
                    2 => p.i(y),
                    _ => return Err(Error::structure("unexpected generator index")),
                };
            }
            *x = y;
        }
        i_action.push(row);
    }

    let lookup = |x: usize, y: usize| -> Result<usize> {
        pair_index.get(&(x, y)).copied().ok_or_else(|| {
            Error::structure(format!(
                "pairs are not closed under the symmetric action: ({},{}) missing",
                p.arrow_label(x),
                p.arrow_label(y)
            ))
        })
    };
    let prod = |x: usize, y: usize| -> Result<usize> {
        product.get(&(x, y)).copied().ok_or_else(|| {
            Error::structure(format!(
                "pair ({},{}) has no product",
                p.arrow_label(x),
                p.arrow_label(y)
            ))
        })
    };

    let mut gen_rows: Vec<Vec<usize>> = Vec::with_capacity(3);
    for s in 1..=3usize {
        let mut row = Vec::with_capacity(pairs.len());
        for &(x, y, z) in &pairs {
            let image = match s {
                1 => {
                    let q = prod(p.k(x), p.j(y))?;
                    lookup(p.j(x), p.j(q))?
                }
                2 => lookup(p.i(x), z)?,
                _ => lookup(z, p.i(y))?,
            };
            row.push(image);
        }
        gen_rows.push(row);
    }
    let mut v_action: Vec<Vec<usize>> = Vec::with_capacity(24);
    for perm in &tb.s4 {
        let word = perm.adjacent_word();
        let mut row: Vec<usize> = (0..pairs.len()).collect();
        for v in row.iter_mut() {
            let mut w = *v;
            for &s in word.iter().rev() {
                w = gen_rows[s - 1][w];
            }
            *v = w;
        }
        v_action.push(row);
    }

    let v_labels: Vec<String> = pairs
        .iter()
        .map(|&(x, y, _)| format!("({},{})", p.arrow_label(x), p.arrow_label(y)))
        .collect();
    let i_labels: Vec<String> = (0..n).map(|x| p.arrow_label(x).to_string()).collect();
    let a: Vec<usize> = pairs.iter().map(|&(x, _, _)| x).collect();

    let obj = TetObject {
        v_labels,
        i_labels,
        v_action,
        i_action,
        a,
    };
    obj.verify()?;
    Ok(obj)
}

fn fresh_name(base: String, taken: &HashSet<String>) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Replaces the two tetrahedra glued along `face` by three tetrahedra
/// around a new edge.  The selected face must join two distinct tetrahedra;
/// `tet` optionally picks which of them contributes the first apex.
pub fn pachner23(t: &Triangulation, face: &str, tet: Option<&str>) -> Result<Triangulation> {
    t.validate()?;
    let f = t
        .face_names
        .iter()
        .position(|n| n == face)
        .ok_or_else(|| Error::validation(format!("unknown face `{face}`")))?;
    let mut occurrences: Vec<(usize, usize)> = Vec::new();
    for (ti, row) in t.tet_faces.iter().enumerate() {
        for (pos, &fi) in row.iter().enumerate() {
            if fi == f {
                occurrences.push((ti, pos));
            }
        }
    }
    debug_assert_eq!(occurrences.len(), 2);
    if occurrences[0].0 == occurrences[1].0 {
        return Err(Error::structure(format!(
            "face `{face}` glues tetrahedron `{}` to itself; the 2-3 move needs two distinct tetrahedra",
            t.tet_names[occurrences[0].0]
        )));
    }
    let (first, second) = match tet {
        None => (occurrences[0], occurrences[1]),
        Some(name) => {
            let ti = t
                .tet_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::validation(format!("unknown tetrahedron `{name}`")))?;
            if occurrences[0].0 == ti {
                (occurrences[0], occurrences[1])
            } else if occurrences[1].0 == ti {
                (occurrences[1], occurrences[0])
            } else {
                return Err(Error::validation(format!(
                    "tetrahedron `{name}` does not contain face `{face}`"
                )));
            }
        }
    };
    let (t1, apex1) = first;
    let (t2, apex2) = second;

    // Vertices of the bipyramid: the shared face's three vertices W(0..3)
    // in their intrinsic order, apex A of t1 in gap apex1, apex B of t2 in
    // gap apex2 (A first on ties).
    #[derive(Clone, Copy, PartialEq, Eq, Debug)]
    enum BipV {
        A,
        B,
        W(usize),
    }
    let mut order = vec![BipV::W(0), BipV::W(1), BipV::W(2)];
    order.insert(apex1, BipV::A);
    order.insert(apex2 + usize::from(apex1 <= apex2), BipV::B);

    // Position of w_k among the vertices of t1 / t2.
    let pos1 = |k: usize| k + usize::from(k >= apex1);
    let pos2 = |k: usize| k + usize::from(k >= apex2);

    let mut taken_faces: HashSet<String> = t.face_names.iter().cloned().collect();
    let mut gnames: Vec<String> = Vec::with_capacity(3);
    for k in 0..3 {
        let name = fresh_name(format!("{face}{k}"), &taken_faces);
        taken_faces.insert(name.clone());
        gnames.push(name);
    }
    let mut taken_tets: HashSet<String> = t.tet_names.iter().cloned().collect();
    let mut tnames: Vec<String> = Vec::with_capacity(3);
    for c in 0..3 {
        let name = fresh_name(
            format!("{}{}{}", t.tet_names[t1], t.tet_names[t2], c),
            &taken_tets,
        );
        taken_tets.insert(name.clone());
        tnames.push(name);
    }

    let mut out = String::new();
    for (ti, row) in t.tet_faces.iter().enumerate() {
        if ti == t1 || ti == t2 {
            continue;
        }
        out.push_str(&format!(
            "tet {}: {} {} {} {}\n",
            t.tet_names[ti],
            t.face_names[row[0]],
            t.face_names[row[1]],
            t.face_names[row[2]],
            t.face_names[row[3]],
        ));
    }
    for c in 0..3 {
        let verts: Vec<BipV> = order.iter().copied().filter(|v| *v != BipV::W(c)).collect();
        debug_assert_eq!(verts.len(), 4);
        let mut names: Vec<String> = Vec::with_capacity(4);
        for m in 0..4 {
            let rest: Vec<BipV> = verts
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != m)
                .map(|(_, v)| *v)
                .collect();
            let has_a = rest.contains(&BipV::A);
            let has_b = rest.contains(&BipV::B);
            let name = if has_a && has_b {
                let w = rest
                    .iter()
                    .find_map(|v| match v {
                        BipV::W(k) => Some(*k),
                        _ => None,
                    })
                    .expect("interior face has one shared vertex");
                gnames[w].clone()
            } else if has_a {
                t.face_names[t.tet_faces[t1][pos1(c)]].clone()
            } else {
                t.face_names[t.tet_faces[t2][pos2(c)]].clone()
            };
            names.push(name);
        }
        out.push_str(&format!(
            "tet {}: {} {} {} {}\n",
            tnames[c], names[0], names[1], names[2], names[3]
        ));
    }

    if t.has_edges() {
        let mut taken_edges: HashSet<String> = t.edge_names.iter().cloned().collect();
        let new_edge = fresh_name(format!("{face}e"), &taken_edges);
        taken_edges.insert(new_edge.clone());
        for (fi, row) in t.face_edges.iter().enumerate() {
            if fi == f {
                continue;
            }
            out.push_str(&format!(
                "face {}: {} {} {}\n",
                t.face_names[fi],
                t.edge_names[row[0]],
                t.edge_names[row[1]],
                t.edge_names[row[2]],
            ));
        }
        for k in 0..3 {
            let verts: Vec<BipV> = order
                .iter()
                .copied()
                .filter(|v| matches!(v, BipV::A | BipV::B) || *v == BipV::W(k))
                .collect();
            debug_assert_eq!(verts.len(), 3);
            let mut names: Vec<String> = Vec::with_capacity(3);
            for r in 0..3 {
                let rest: Vec<BipV> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != r)
                    .map(|(_, v)| *v)
                    .collect();
                let name = match (rest[0], rest[1]) {
                    (BipV::A, BipV::B) | (BipV::B, BipV::A) => new_edge.clone(),
                    (BipV::A, BipV::W(w)) | (BipV::W(w), BipV::A) => {
                        let p = apex1.min(pos1(w));
                        let q = apex1.max(pos1(w));
                        t.edge_names[t.tet_edge(t1, p, q)].clone()
                    }
                    (BipV::B, BipV::W(w)) | (BipV::W(w), BipV::B) => {
                        let p = apex2.min(pos2(w));
                        let q = apex2.max(pos2(w));
                        t.edge_names[t.tet_edge(t2, p, q)].clone()
                    }
                    _ => unreachable!("interior edge joins two of A, B, W(k)"),
                };
                names.push(name);
            }
            out.push_str(&format!(
                "face {}: {} {} {}\n",
                gnames[k], names[0], names[1], names[2]
            ));
        }
    }

    parse_triangulation(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for name in TRIANGULATION_PRESETS {
            let t = preset_triangulation(name).unwrap();
            assert_eq!(t.tet_count(), 2);
            assert_eq!(t.face_count(), 4);
            assert_eq!(t.edge_count(), 2);
            assert!(t.has_edges());
        }
        assert!(matches!(
            preset_triangulation("unknot"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn parser_rejects_bad_input() {
        let thrice = "tet u: a a a b\ntet v: b c c d\ntet w: d e e f\n";
        match parse_triangulation(thrice) {
            Err(Error::Validation(msg)) => assert!(msg.contains('a'), "{msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
        match parse_triangulation("tet u: a b c\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("expected parse error on line 1, got {other:?}"),
        }
        match parse_triangulation("tet u: a b c d\ntet v: d c b a\nface z: p p p\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("expected parse error on line 3, got {other:?}"),
        }
        match parse_triangulation("tet u: a b c d\nwedge v: d c b a\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("expected parse error on line 2, got {other:?}"),
        }
        // Wrong edge count: one edge for two tetrahedra.
        let bad_edges = "tet u: a b c d\ntet v: d c b a\nface a: p p p\nface b: p p p\nface c: p p p\nface d: p p p\n";
        assert!(matches!(parse_triangulation(bad_edges), Err(Error::Validation(_))));
        // Partial edge data.
        let partial = "tet u: a b c d\ntet v: d c b a\nface a: p p p\n";
        assert!(matches!(parse_triangulation(partial), Err(Error::Validation(_))));
    }

    #[test]
    fn tet_object_shape_and_values() {
        let t = preset_triangulation("trefoil").unwrap();
        let obj = build_tet_object(&t).unwrap();
        assert_eq!(obj.v_count(), 48);
        assert_eq!(obj.i_count(), 24);
        let report = obj.equivariance_report();
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.checks > 6 * 48);

        // a(identity, u) = (identity, face 3 of u) = (e, d);
        // a((2 3), u) = (e, face 2 of u) = (e, c).
        let tb = tables();
        let v_id_u = 0;
        assert_eq!(obj.i_label(obj.a(v_id_u)), "(e,d)");
        let g23 = tb.s4_gen[2];
        let g23_u = g23 * 2;
        assert_eq!(obj.v_label(g23_u), "((2 3),u)");
        assert_eq!(obj.i_label(obj.a(g23_u)), "(e,c)");
        // a((0 3), u) = ((0 1 2), face 0 of u) = ((0 1 2), a).
        let g03_u = tb.coset_rep[0] * 2;
        assert_eq!(obj.i_label(obj.a(g03_u)), "((0 1 2),a)");
    }

    #[test]
    fn trefoil_completes_to_reference_model() {
        let t = preset_triangulation("trefoil").unwrap();
        let (pres, trace) = complete(&t).unwrap();
        assert_eq!(pres.node_count(), 2);
        assert_eq!(pres.arrow_count(), 8);
        assert_eq!(pres.mu_table().len(), 12);
        assert!(!trace.stages.is_empty());
        for stage in &trace.stages {
            assert!(stage.v_after <= stage.v_before);
            assert!(stage.i_after <= stage.i_before);
        }
        let reference = crate::presentation::trefoil_reference();
        let iso = crate::presentation::find_isomorphism(&pres, &reference);
        assert!(iso.is_some(), "completed trefoil object must match the reference model");
    }

    #[test]
    fn fig8_completes_without_identifications() {
        let t = preset_triangulation("fig8").unwrap();
        let obj = build_tet_object(&t).unwrap();
        let mut trace = CompletionTrace::default();
        let tilded = tilde(obj, &mut trace).unwrap();
        assert_eq!(tilded.i_count(), 24);
        assert_eq!(tilded.v_count(), 48);
        let (pres, _) = complete(&t).unwrap();
        assert_eq!(pres.arrow_count(), 24);
        assert_eq!(pres.mu_table().len(), 48);
        assert_eq!(pres.node_count(), 4);
        // The vertex groups here are hyperbolic, so the rewriting system
        // does not complete; products still answer through the table and
        // only genuine word-problem queries report failure.
        assert!(!pres.is_confluent());
        assert!(matches!(
            pres.normal_form(&[0, pres.i(0)]),
            Err(Error::WordProblem { .. })
        ));
        assert_eq!(pres.h_composable_pairs().len(), 48);
    }

    #[test]
    fn completion_is_deterministic() {
        let t = preset_triangulation("fig8").unwrap();
        let (p1, tr1) = complete(&t).unwrap();
        let (p2, tr2) = complete(&t).unwrap();
        assert_eq!(p1.mu_table(), p2.mu_table());
        assert_eq!(p1.node_count(), p2.node_count());
        assert_eq!(
            serde_json::to_string(&tr1.stages.len()).unwrap(),
            serde_json::to_string(&tr2.stages.len()).unwrap()
        );
        let labels1: Vec<&str> = (0..p1.arrow_count()).map(|x| p1.arrow_label(x)).collect();
        let labels2: Vec<&str> = (0..p2.arrow_count()).map(|x| p2.arrow_label(x)).collect();
        assert_eq!(labels1, labels2);
    }

    #[test]
    fn completion_is_idempotent() {
        for name in TRIANGULATION_PRESETS {
            let t = preset_triangulation(name).unwrap();
            let (pres, _) = complete(&t).unwrap();
            let obj = tet_object_from_presentation(&pres).unwrap();
            let (again, _) = complete_object(obj).unwrap();
            assert_eq!(again.node_count(), pres.node_count(), "{name}");
            assert_eq!(again.arrow_count(), pres.arrow_count(), "{name}");
            assert_eq!(again.mu_table().len(), pres.mu_table().len(), "{name}");
            assert!(
                crate::presentation::find_isomorphism(&again, &pres).is_some(),
                "{name}: recompletion must reproduce the presentation"
            );
        }
    }

    #[test]
    fn product_identities_hold_on_presets() {
        for name in TRIANGULATION_PRESETS {
            let t = preset_triangulation(name).unwrap();
            let obj = build_tet_object(&t).unwrap();
            let mut trace = CompletionTrace::default();
            let mut obj = tilde(obj, &mut trace).unwrap();
            loop {
                let (next, changed) = assoc_quotient(obj, &mut trace).unwrap();
                obj = tilde(next, &mut trace).unwrap();
                if !changed {
                    break;
                }
            }
            let report = product_identities_report(&obj).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.violations);
        }
    }

    #[test]
    fn pachner_move_counts_and_validity() {
        let t = preset_triangulation("fig8").unwrap();
        let moved = pachner23(&t, "a", Some("u")).unwrap();
        assert_eq!(moved.tet_count(), 3);
        assert_eq!(moved.face_count(), 6);
        assert_eq!(moved.edge_count(), 3);
        moved.validate().unwrap();
        // Round trip through the text form.
        let again = parse_triangulation(&moved.to_text()).unwrap();
        assert_eq!(again.tet_count(), 3);

        let trefoil = preset_triangulation("trefoil").unwrap();
        let moved = pachner23(&trefoil, "b", None).unwrap();
        assert_eq!(moved.tet_count(), 3);
        assert_eq!(moved.edge_count(), 3);
    }

    #[test]
    fn pachner_rejects_self_gluing() {
        let selfglued = "tet u: a a b b\ntet v: c c d d\n";
        let t = parse_triangulation(selfglued).unwrap();
        match pachner23(&t, "a", None) {
            Err(Error::Structure(msg)) => assert!(msg.contains("itself"), "{msg}"),
            other => panic!("expected structure error, got {other:?}"),
        }
        let t = preset_triangulation("fig8").unwrap();
        assert!(matches!(
            pachner23(&t, "nosuch", None),
            Err(Error::Validation(_))
        ));
    }
}
