//! Groupoids built from a group with a malnormal subgroup, and the scale
//! and shift representations attached to group presentations.
//!
//! A pair (G, H) with H malnormal and proper acts freely on ordered pairs
//! of complement elements; the orbits form a groupoid whose distinguished
//! morphisms are the non-units.  On the presentation side, a group word
//! maps to a pair (scale, shift) in a coefficient ring, composed by
//! (x, y)(x', y') = (xx', yx' + y'); the shift must vanish exactly on the
//! peripheral subgroup and be invertible elsewhere, which this module
//! certifies on bounded balls by exact arithmetic.

use std::collections::BTreeMap;

use num::bigint::BigInt;

use crate::error::Error;
use crate::finring::GroupTable;
use crate::groupoid::{AxiomReport, FiniteDeltaGroupoid};
use crate::ringfun::{matrix_algebra, matrix_elt, FiniteRankAlgebra};
use crate::Result;

/// One letter of a group word: a generator or its formal inverse.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn plain(gen: usize) -> Letter {
        Letter { gen, inverse: false }
    }

    pub fn inv(gen: usize) -> Letter {
        Letter { gen, inverse: true }
    }
}

/// A finitely presented group together with an optional list of peripheral
/// words whose subgroup plays the role of H in the pair constructions.
#[derive(Clone, Debug)]
pub struct GroupPresentationData {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<Letter>>,
    pub peripheral: Vec<Vec<Letter>>,
}

impl GroupPresentationData {
    /// Parses the line format `gen a b`, `rel a a B B B`, `per a B`;
    /// generators are single lowercase letters and an uppercase letter is
    /// the inverse of its lowercase generator.  `#` starts a comment.
    pub fn parse(text: &str) -> Result<GroupPresentationData> {
        let mut data = GroupPresentationData {
            generators: Vec::new(),
            relators: Vec::new(),
            peripheral: Vec::new(),
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let directive = tokens.next().expect("non-empty line has a token");
            let rest: Vec<&str> = tokens.collect();
            let lineno = lineno + 1;
            match directive {
                "gen" => {
                    for name in rest {
                        if name.len() != 1 || !name.chars().all(|c| c.is_ascii_lowercase()) {
                            return Err(Error::parse(
                                lineno,
                                format!("generator `{name}` must be one lowercase letter"),
                            ));
                        }
                        if data.generators.iter().any(|g| g == name) {
                            return Err(Error::parse(lineno, format!("generator `{name}` repeated")));
                        }
                        data.generators.push(name.to_string());
                    }
                }
                "rel" | "per" => {
                    if rest.is_empty() {
                        return Err(Error::parse(lineno, "empty word".to_string()));
                    }
                    let word = rest
                        .iter()
                        .map(|tok| data.letter_of_token(tok).map_err(|msg| Error::parse(lineno, msg)))
                        .collect::<std::result::Result<Vec<Letter>, Error>>()?;
                    if directive == "rel" {
                        data.relators.push(word);
                    } else {
                        data.peripheral.push(word);
                    }
                }
                other => {
                    return Err(Error::parse(
                        lineno,
                        format!("unknown directive `{other}` (expected gen, rel or per)"),
                    ));
                }
            }
        }
        if data.generators.is_empty() {
            return Err(Error::validation("presentation declares no generators"));
        }
        Ok(data)
    }

    fn letter_of_token(&self, token: &str) -> std::result::Result<Letter, String> {
        let mut chars = token.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(format!("letter `{token}` must be a single character"));
        };
        let lower = c.to_ascii_lowercase().to_string();
        let gen = self
            .generators
            .iter()
            .position(|g| *g == lower)
            .ok_or_else(|| format!("letter `{token}` names no declared generator"))?;
        Ok(Letter {
            gen,
            inverse: c.is_ascii_uppercase(),
        })
    }

    /// Parses one word in the same letter convention as the line format.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        text.split_whitespace()
            .map(|tok| self.letter_of_token(tok).map_err(|msg| Error::parse(1, msg)))
            .collect()
    }

    pub fn word_label(&self, word: &[Letter]) -> String {
        word.iter()
            .map(|l| {
                let name = &self.generators[l.gen];
                if l.inverse {
                    name.to_ascii_uppercase()
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("gen {}\n", self.generators.join(" "));
        for rel in &self.relators {
            out.push_str(&format!("rel {}\n", self.word_label(rel)));
        }
        for per in &self.peripheral {
            out.push_str(&format!("per {}\n", self.word_label(per)));
        }
        out
    }
}

/// Built-in two-generator knot group presentations with their peripheral
/// words: `trefoil` with relator a a B B B and peripheral system
/// {a B, a a}; `fig8` with the commutation relator of the meridian pair
/// and peripheral system {a, longitude}.
pub fn group_preset(name: &str) -> Result<GroupPresentationData> {
    let text = match name {
        "trefoil" => "gen a b\nrel a a B B B\nper a B\nper a a\n",
        "fig8" => "gen a b\nrel a B a b A B a B A b\nper a\nper B a b A A b a B\n",
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    GroupPresentationData::parse(text)
}

/// A finite group together with a subgroup, the ambient data of the orbit
/// groupoid construction.
#[derive(Clone, Debug)]
pub struct GroupPair {
    group: GroupTable,
    subgroup: Vec<usize>,
    in_subgroup: Vec<bool>,
}

impl GroupPair {
    pub fn new(group: GroupTable, mut subgroup: Vec<usize>) -> Result<GroupPair> {
        subgroup.sort_unstable();
        subgroup.dedup();
        if subgroup.iter().any(|&x| x >= group.size()) {
            return Err(Error::validation("subgroup element out of range"));
        }
        if !group.is_subgroup(&subgroup) {
            return Err(Error::validation("the listed elements do not form a subgroup"));
        }
        let mut in_subgroup = vec![false; group.size()];
        for &x in &subgroup {
            in_subgroup[x] = true;
        }
        Ok(GroupPair {
            group,
            subgroup,
            in_subgroup,
        })
    }

    pub fn from_generators(group: GroupTable, gens: &[usize]) -> Result<GroupPair> {
        if gens.iter().any(|&x| x >= group.size()) {
            return Err(Error::validation("subgroup generator out of range"));
        }
        let closure = group.subgroup_closure(gens);
        GroupPair::new(group, closure)
    }

    /// Subgroup generated by the elements with the given labels.
    pub fn from_named(group: &GroupTable, labels: &[&str]) -> Result<GroupPair> {
        let gens = labels
            .iter()
            .map(|l| {
                group
                    .index_of(l)
                    .ok_or_else(|| Error::validation(format!("no group element labelled `{l}`")))
            })
            .collect::<Result<Vec<usize>>>()?;
        GroupPair::from_generators(group.clone(), &gens)
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn subgroup(&self) -> &[usize] {
        &self.subgroup
    }

    pub fn contains(&self, x: usize) -> bool {
        self.in_subgroup[x]
    }

    pub fn is_proper(&self) -> bool {
        self.subgroup.len() < self.group.size()
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.group.size()).filter(|&x| !self.in_subgroup[x]).collect()
    }
}

/// A conjugation that drags a non-trivial subgroup element back into the
/// subgroup, disproving malnormality.
#[derive(Clone, Debug)]
pub struct MalnormalWitness {
    pub outside: usize,
    pub conjugated: usize,
    pub image: usize,
    pub description: String,
}

#[derive(Clone, Debug, Default)]
pub struct MalnormalityReport {
    pub malnormal: bool,
    pub witness: Option<MalnormalWitness>,
    pub notes: Vec<String>,
}

/// Exhaustive malnormality test: every conjugate of the subgroup by an
/// element outside it must meet the subgroup only in the identity.  The
/// degenerate whole-group case counts as not malnormal whenever the
/// subgroup is non-trivial.
pub fn is_malnormal(pair: &GroupPair) -> MalnormalityReport {
    let g = pair.group();
    if !pair.is_proper() {
        if pair.subgroup().len() == 1 {
            return MalnormalityReport {
                malnormal: true,
                witness: None,
                notes: vec!["the trivial subgroup of the trivial group".into()],
            };
        }
        return MalnormalityReport {
            malnormal: false,
            witness: None,
            notes: vec!["the subgroup is the whole group, so every conjugate is itself".into()],
        };
    }
    for outside in 0..g.size() {
        if pair.contains(outside) {
            continue;
        }
        for &h in pair.subgroup() {
            if h == g.identity() {
                continue;
            }
            let image = g.mul(g.mul(outside, h), g.inv(outside));
            if pair.contains(image) {
                let description = format!(
                    "{} * {} * {} = {} lies in the subgroup",
                    g.label(outside),
                    g.label(h),
                    g.label(g.inv(outside)),
                    g.label(image)
                );
                return MalnormalityReport {
                    malnormal: false,
                    witness: Some(MalnormalWitness {
                        outside,
                        conjugated: h,
                        image,
                        description,
                    }),
                    notes: Vec::new(),
                };
            }
        }
    }
    MalnormalityReport {
        malnormal: true,
        witness: None,
        notes: Vec::new(),
    }
}

/// The orbit groupoid of a pair together with the map from complement
/// pairs to morphisms.
#[derive(Clone, Debug)]
pub struct PairOrbitGroupoid {
    groupoid: FiniteDeltaGroupoid,
    orbit_of_pair: BTreeMap<(usize, usize), usize>,
}

impl PairOrbitGroupoid {
    pub fn groupoid(&self) -> &FiniteDeltaGroupoid {
        &self.groupoid
    }

    pub fn into_groupoid(self) -> FiniteDeltaGroupoid {
        self.groupoid
    }

    /// Morphism holding the orbit of (g1, g2); None if either element lies
    /// in the subgroup.
    pub fn morphism_of_pair(&self, g1: usize, g2: usize) -> Option<usize> {
        self.orbit_of_pair.get(&(g1, g2)).copied()
    }
}

/// Builds the orbit groupoid of a malnormal proper pair: morphisms are the
/// orbits of ordered complement pairs under the triple subgroup action
/// (g1, g2) -> (h1^-1 g1 h2, h1^-1 g2 h3), objects are the double cosets,
/// units are the orbits of diagonal pairs, and the distinguished subset is
/// the set of non-units with j(g1, g2) = (g1^-1, g1^-1 g2).  The action is
/// re-verified to be free.
pub fn pair_orbit_groupoid(pair: &GroupPair) -> Result<PairOrbitGroupoid> {
    let g = pair.group();
    let report = is_malnormal(pair);
    if !report.malnormal {
        let why = report
            .witness
            .map(|w| w.description)
            .or_else(|| report.notes.first().cloned())
            .unwrap_or_else(|| "no witness recorded".into());
        return Err(Error::validation(format!("subgroup is not malnormal: {why}")));
    }
    if !pair.is_proper() {
        return Err(Error::validation("the subgroup must be proper".to_string()));
    }
    let complement = pair.complement();
    let m = complement.len();
    let comp_index: BTreeMap<usize, usize> =
        complement.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let pair_id = |g1: usize, g2: usize| comp_index[&g1] * m + comp_index[&g2];
    let pair_of = |p: usize| (complement[p / m], complement[p % m]);

    // Orbit decomposition under the generating moves of the triple action.
    let mut orbit_of = vec![usize::MAX; m * m];
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let h_cubed = pair.subgroup().len().pow(3);
    for start in 0..m * m {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let orbit_id = reps.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        orbit_of[start] = orbit_id;
        while let Some(p) = stack.pop() {
            members.push(p);
            let (g1, g2) = pair_of(p);
            for &h in pair.subgroup() {
                let hi = g.inv(h);
                let moves = [
                    (g.mul(hi, g1), g.mul(hi, g2)),
                    (g.mul(g1, h), g2),
                    (g1, g.mul(g2, h)),
                ];
                for (a, b) in moves {
                    let q = pair_id(a, b);
                    if orbit_of[q] == usize::MAX {
                        orbit_of[q] = orbit_id;
                        stack.push(q);
                    }
                }
            }
        }
        if members.len() != h_cubed {
            let (g1, g2) = pair_of(start);
            return Err(Error::structure(format!(
                "the triple action is not free: the orbit of ({}, {}) has {} pairs, expected {}",
                g.label(g1),
                g.label(g2),
                members.len(),
                h_cubed
            )));
        }
        let min_pair = members.iter().min().copied().expect("orbit non-empty");
        reps.push(pair_of(min_pair));
    }
    let n = reps.len();

    // Double cosets of complement elements, keyed by their least member.
    let dcoset_min = |c: usize| -> usize {
        let mut best = usize::MAX;
        for &h1 in pair.subgroup() {
            for &h2 in pair.subgroup() {
                best = best.min(g.mul(g.mul(h1, c), h2));
            }
        }
        best
    };
    let mut object_key: Vec<usize> = complement.iter().map(|&c| dcoset_min(c)).collect();
    let mut keys: Vec<usize> = object_key.clone();
    keys.sort_unstable();
    keys.dedup();
    let object_of_key: BTreeMap<usize, usize> =
        keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    for slot in object_key.iter_mut() {
        *slot = object_of_key[slot];
    }
    let object_of = |c: usize| object_key[comp_index[&c]];

    let object_labels: Vec<String> = keys.iter().map(|&k| format!("H{}H", g.label(k))).collect();
    let morphism_labels: Vec<String> = reps
        .iter()
        .map(|&(a, b)| format!("({},{})", g.label(a), g.label(b)))
        .collect();
    let dom: Vec<usize> = reps.iter().map(|&(a, _)| object_of(a)).collect();
    let cod: Vec<usize> = reps.iter().map(|&(_, b)| object_of(b)).collect();
    let inv: Vec<usize> = reps
        .iter()
        .map(|&(a, b)| orbit_of[pair_id(b, a)])
        .collect();
    let identity_at: Vec<usize> = keys.iter().map(|&k| orbit_of[pair_id(k, k)]).collect();
    let is_unit: Vec<bool> = {
        let mut unit = vec![false; n];
        for &e in &identity_at {
            unit[e] = true;
        }
        unit
    };

    let mut compose = vec![None; n * n];
    for x in 0..n {
        let (f1, f2) = reps[x];
        for y in 0..n {
            if cod[x] != dom[y] {
                continue;
            }
            let (g1, g2) = reps[y];
            // The shift h0 with f2 H = h0 g1 H is unique because the
            // action is free.
            let mut product = None;
            'outer: for &h0 in pair.subgroup() {
                let left = g.mul(h0, g1);
                for &h in pair.subgroup() {
                    if g.mul(left, h) == f2 {
                        product = Some(orbit_of[pair_id(f1, g.mul(h0, g2))]);
                        break 'outer;
                    }
                }
            }
            let Some(z) = product else {
                return Err(Error::structure(format!(
                    "no subgroup shift aligns {} with {}",
                    morphism_labels[x], morphism_labels[y]
                )));
            };
            compose[x * n + y] = Some(z);
        }
    }

    let h_list: Vec<usize> = (0..n).filter(|&x| !is_unit[x]).collect();
    let j_table: Vec<Option<usize>> = (0..n)
        .map(|x| {
            if is_unit[x] {
                return None;
            }
            let (g1, g2) = reps[x];
            let g1i = g.inv(g1);
            Some(orbit_of[pair_id(g1i, g.mul(g1i, g2))])
        })
        .collect();

    let groupoid = FiniteDeltaGroupoid::from_parts(
        object_labels,
        morphism_labels,
        dom,
        cod,
        compose,
        inv,
        identity_at,
        h_list,
        j_table,
    )?;
    let orbit_of_pair: BTreeMap<(usize, usize), usize> = (0..m * m)
        .map(|p| (pair_of(p), orbit_of[p]))
        .collect();
    Ok(PairOrbitGroupoid {
        groupoid,
        orbit_of_pair,
    })
}

/// The orbit groupoid of a malnormal proper pair, discarding the pair map.
pub fn delta_from_pair(pair: &GroupPair) -> Result<FiniteDeltaGroupoid> {
    pair_orbit_groupoid(pair).map(PairOrbitGroupoid::into_groupoid)
}

/// An element of the scale-and-shift group of a coefficient ring: an
/// invertible scale and an arbitrary shift, composed by
/// (x, y)(x', y') = (xx', yx' + y').
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemidirectElement {
    pub alpha: Vec<BigInt>,
    pub beta: Vec<BigInt>,
}

impl SemidirectElement {
    /// Wraps the coordinates after verifying the scale is invertible.
    pub fn new(alg: &FiniteRankAlgebra, alpha: Vec<BigInt>, beta: Vec<BigInt>) -> Result<SemidirectElement> {
        if alg.try_inverse(&alpha).is_none() {
            return Err(Error::NotInvertible(format!(
                "scale {} is not a unit",
                alg.render_elt(&alpha)
            )));
        }
        Ok(SemidirectElement {
            alpha: alg.reduce(alpha),
            beta: alg.reduce(beta),
        })
    }

    pub fn identity(alg: &FiniteRankAlgebra) -> SemidirectElement {
        SemidirectElement {
            alpha: alg.unit_elt(),
            beta: alg.zero_elt(),
        }
    }

    pub fn compose(&self, rhs: &SemidirectElement, alg: &FiniteRankAlgebra) -> SemidirectElement {
        SemidirectElement {
            alpha: alg.mul(&self.alpha, &rhs.alpha),
            beta: alg.add(&alg.mul(&self.beta, &rhs.alpha), &rhs.beta),
        }
    }

    pub fn inverse(&self, alg: &FiniteRankAlgebra) -> Result<SemidirectElement> {
        let ainv = alg.try_inverse(&self.alpha).ok_or_else(|| {
            Error::NotInvertible(format!("scale {} is not a unit", alg.render_elt(&self.alpha)))
        })?;
        let beta = alg.neg_elt(&alg.mul(&self.beta, &ainv));
        Ok(SemidirectElement { alpha: ainv, beta })
    }

    pub fn is_identity(&self, alg: &FiniteRankAlgebra) -> bool {
        alg.eq_elts(&self.alpha, &alg.unit_elt()) && alg.is_zero_elt(&self.beta)
    }

    pub fn eq_in(&self, rhs: &SemidirectElement, alg: &FiniteRankAlgebra) -> bool {
        alg.eq_elts(&self.alpha, &rhs.alpha) && alg.eq_elts(&self.beta, &rhs.beta)
    }

    fn key(&self, alg: &FiniteRankAlgebra) -> (Vec<BigInt>, Vec<BigInt>) {
        (alg.reduce(self.alpha.clone()), alg.reduce(self.beta.clone()))
    }
}

/// Value of a word under a generator assignment, composed letter by
/// letter; inverse letters use the group inverse of the assigned element.
pub fn cocycle_extend(
    alg: &FiniteRankAlgebra,
    assign: &[SemidirectElement],
    word: &[Letter],
) -> Result<SemidirectElement> {
    let mut acc = SemidirectElement::identity(alg);
    for letter in word {
        let base = assign.get(letter.gen).ok_or_else(|| {
            Error::validation(format!("letter references generator {} with no assignment", letter.gen))
        })?;
        let step = if letter.inverse { base.inverse(alg)? } else { base.clone() };
        acc = acc.compose(&step, alg);
    }
    Ok(acc)
}

const VALUE_BALL_CAP: usize = 20_000;

/// Distinct values reachable from the identity by at most `radius`
/// applications of the given steps.  Values are deduplicated exactly, so
/// the result enumerates group-image elements, not words.
fn value_ball(
    alg: &FiniteRankAlgebra,
    steps: &[SemidirectElement],
    radius: usize,
) -> Result<Vec<SemidirectElement>> {
    let mut classes = vec![SemidirectElement::identity(alg)];
    let mut index: BTreeMap<(Vec<BigInt>, Vec<BigInt>), usize> =
        BTreeMap::from([(classes[0].key(alg), 0)]);
    let mut frontier = vec![0usize];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &c in &frontier {
            let value = classes[c].clone();
            for step in steps {
                let reached = value.compose(step, alg);
                let key = reached.key(alg);
                if !index.contains_key(&key) {
                    let id = classes.len();
                    if id >= VALUE_BALL_CAP {
                        return Err(Error::structure(format!(
                            "value ball exceeded {VALUE_BALL_CAP} distinct elements"
                        )));
                    }
                    index.insert(key, id);
                    classes.push(reached);
                    next.push(id);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(classes)
}

fn generator_steps(
    alg: &FiniteRankAlgebra,
    assign: &[SemidirectElement],
) -> Result<Vec<SemidirectElement>> {
    let mut steps = Vec::with_capacity(2 * assign.len());
    for value in assign {
        steps.push(value.clone());
        steps.push(value.inverse(alg)?);
    }
    Ok(steps)
}

/// Certifies a scale-and-shift assignment on a bounded ball: every relator
/// maps to the identity, the shift vanishes on the ball of the peripheral
/// subgroup, and on the ball of the whole group every shift is zero or
/// invertible with at least one invertible value.  A passing report is a
/// radius-limited certificate, not a proof for the infinite group.
pub fn special_check(
    data: &GroupPresentationData,
    assign: &[SemidirectElement],
    alg: &FiniteRankAlgebra,
    radius: usize,
) -> Result<AxiomReport> {
    if assign.len() != data.generators.len() {
        return Err(Error::validation("one assignment per generator is required"));
    }
    let mut report = AxiomReport {
        checks: 0,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    for rel in &data.relators {
        let value = cocycle_extend(alg, assign, rel)?;
        report.checks += 1;
        if !value.is_identity(alg) {
            report.violations.push(format!(
                "relator {} maps to ({}, {})",
                data.word_label(rel),
                alg.render_elt(&value.alpha),
                alg.render_elt(&value.beta)
            ));
        }
    }

    let mut peripheral_steps = Vec::new();
    for word in &data.peripheral {
        let value = cocycle_extend(alg, assign, word)?;
        peripheral_steps.push(value.inverse(alg)?);
        peripheral_steps.push(value);
    }
    let peripheral_ball = value_ball(alg, &peripheral_steps, radius)?;
    for value in &peripheral_ball {
        report.checks += 1;
        if !alg.is_zero_elt(&value.beta) {
            report.violations.push(format!(
                "peripheral element with scale {} has non-zero shift {}",
                alg.render_elt(&value.alpha),
                alg.render_elt(&value.beta)
            ));
        }
    }

    let group_ball = value_ball(alg, &generator_steps(alg, assign)?, radius)?;
    let mut invertible = 0usize;
    for value in &group_ball {
        report.checks += 1;
        if alg.is_zero_elt(&value.beta) {
            continue;
        }
        if alg.try_inverse(&value.beta).is_some() {
            invertible += 1;
        } else {
            report.violations.push(format!(
                "shift {} is neither zero nor invertible",
                alg.render_elt(&value.beta)
            ));
        }
    }
    report.checks += 1;
    if invertible == 0 {
        report
            .violations
            .push("the shift vanishes on the whole ball; the image collapses into the subgroup".into());
    }
    report.notes.push(format!(
        "radius-{radius} certificate: {} peripheral values with zero shift, {} of {} group values invertible",
        peripheral_ball.len(),
        invertible,
        group_ball.len()
    ));
    Ok(report)
}

/// Verifies a plain ring representation of a presented group: every
/// generator image is invertible, every relator evaluates to the unit, and
/// the listed kernel words also evaluate to the unit.
pub fn group_rep_check(
    data: &GroupPresentationData,
    images: &[Vec<BigInt>],
    alg: &FiniteRankAlgebra,
    kernel_words: &[Vec<Letter>],
) -> Result<AxiomReport> {
    if images.len() != data.generators.len() {
        return Err(Error::validation("one image per generator is required"));
    }
    let mut report = AxiomReport {
        checks: 0,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    let mut inverses = Vec::with_capacity(images.len());
    for (g, img) in images.iter().enumerate() {
        report.checks += 1;
        match alg.try_inverse(img) {
            Some(inv) => inverses.push(inv),
            None => {
                return Err(Error::NotInvertible(format!(
                    "image of {} is not a unit",
                    data.generators[g]
                )))
            }
        }
    }
    let eval = |word: &[Letter]| -> Vec<BigInt> {
        let mut acc = alg.unit_elt();
        for l in word {
            let factor = if l.inverse { &inverses[l.gen] } else { &images[l.gen] };
            acc = alg.mul(&acc, factor);
        }
        acc
    };
    for rel in &data.relators {
        report.checks += 1;
        let value = eval(rel);
        if !alg.eq_elts(&value, &alg.unit_elt()) {
            report.violations.push(format!(
                "relator {} evaluates to {}",
                data.word_label(rel),
                alg.render_elt(&value)
            ));
        }
    }
    for word in kernel_words {
        report.checks += 1;
        let value = eval(word);
        if !alg.eq_elts(&value, &alg.unit_elt()) {
            report.violations.push(format!(
                "kernel word {} evaluates to {}",
                data.word_label(word),
                alg.render_elt(&value)
            ));
        }
    }
    report
        .notes
        .push(format!("{} kernel words checked", kernel_words.len()));
    Ok(report)
}

/// Checks the defining relations of the invertible elements
/// u(x, y) = shift(x^-1) shift(y^-1)^-1 over all distinct values reachable
/// by words of length at most `max_len`: composition u(x,y)u(y,z) = u(x,z),
/// subgroup shift invariance, the affine relation
/// u(y^-1 x, y^-1) + u(x, y) = 1, and u(x, x) = 1.  Pairs are exhausted;
/// the composition and shift relations use deterministic samples where a
/// full sweep would be cubic.
pub fn q_relation_check(
    data: &GroupPresentationData,
    assign: &[SemidirectElement],
    alg: &FiniteRankAlgebra,
    max_len: usize,
) -> Result<AxiomReport> {
    if assign.len() != data.generators.len() {
        return Err(Error::validation("one assignment per generator is required"));
    }
    let mut report = AxiomReport {
        checks: 0,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    let classes = value_ball(alg, &generator_steps(alg, assign)?, max_len)?;
    let mut inv = Vec::with_capacity(classes.len());
    for c in &classes {
        inv.push(c.inverse(alg)?);
    }

    // Split by vanishing shift; outside the subgroup both the shift and the
    // shift of the inverse must be invertible for the u-elements to exist.
    let mut outside: Vec<usize> = Vec::new();
    let mut subgroup_like: Vec<usize> = Vec::new();
    let mut w = vec![Vec::new(); classes.len()];
    let mut w_inv = vec![Vec::new(); classes.len()];
    let mut beta_inv = vec![Vec::new(); classes.len()];
    for (c, value) in classes.iter().enumerate() {
        if alg.is_zero_elt(&value.beta) {
            subgroup_like.push(c);
            continue;
        }
        w[c] = inv[c].beta.clone();
        report.checks += 1;
        match (alg.try_inverse(&w[c]), alg.try_inverse(&value.beta)) {
            (Some(wi), Some(bi)) => {
                w_inv[c] = wi;
                beta_inv[c] = bi;
                outside.push(c);
            }
            _ => {
                report.violations.push(format!(
                    "shift {} of a non-subgroup value is not invertible",
                    alg.render_elt(&value.beta)
                ));
            }
        }
    }
    if outside.is_empty() {
        report
            .violations
            .push("no sampled value lies outside the subgroup".into());
        return Ok(report);
    }

    let u = |x: usize, y: usize| alg.mul(&w[x], &w_inv[y]);
    for &x in &outside {
        report.checks += 1;
        if !alg.eq_elts(&u(x, x), &alg.unit_elt()) {
            report.violations.push(format!("u(x, x) differs from 1 at class {x}"));
        }
    }

    // Exhaustive pair sweep: the affine relation, plus the two-element
    // instances of the composition relation.
    for &x in &outside {
        for &y in &outside {
            let uxy = u(x, y);
            report.checks += 1;
            if !alg.eq_elts(&alg.mul(&uxy, &u(y, x)), &alg.unit_elt()) {
                report
                    .violations
                    .push(format!("u({x},{y}) u({y},{x}) differs from 1"));
            }
            let z = inv[x].compose(&classes[y], alg);
            report.checks += 1;
            if alg.is_zero_elt(&z.beta) {
                // x and y differ by a subgroup element, so u(x, y) = 1.
                if !alg.eq_elts(&uxy, &alg.unit_elt()) {
                    report
                        .violations
                        .push(format!("u({x},{y}) differs from 1 on a subgroup shift"));
                }
            } else {
                let left = alg.mul(&z.beta, &beta_inv[y]);
                if !alg.eq_elts(&alg.add(&left, &uxy), &alg.unit_elt()) {
                    report
                        .violations
                        .push(format!("affine relation fails at classes ({x}, {y})"));
                }
            }
        }
    }

    // Composition relation on a deterministic cube of samples.
    let cap = outside.len().min(16);
    for &x in &outside[..cap] {
        for &y in &outside[..cap] {
            let uxy = u(x, y);
            for &z in &outside[..cap] {
                report.checks += 1;
                if !alg.eq_elts(&alg.mul(&uxy, &u(y, z)), &u(x, z)) {
                    report
                        .violations
                        .push(format!("composition fails at classes ({x}, {y}, {z})"));
                }
            }
        }
    }

    // Subgroup shifts: right shifts leave the first and second slots fixed,
    // and simultaneous left shifts fix u(x, y); shifts are sampled.
    let shift_of = |shifted: &SemidirectElement| -> Vec<BigInt> {
        // shift(v^-1) = -shift(v) scale(v)^-1; scales of composites of
        // ball values are units.
        let ainv = alg
            .try_inverse(&shifted.alpha)
            .expect("scales in the ball are units");
        alg.neg_elt(&alg.mul(&shifted.beta, &ainv))
    };
    let h_cap = subgroup_like.len().min(6);
    for &h in &subgroup_like[..h_cap] {
        if classes[h].is_identity(alg) {
            continue;
        }
        for &c in &outside {
            let ch = classes[c].compose(&classes[h], alg);
            report.checks += 1;
            if !alg.eq_elts(&shift_of(&ch), &w[c]) {
                report.violations.push(format!(
                    "right subgroup shift changes the u-slot at class {c}"
                ));
            }
        }
        let pair_cap = outside.len().min(12);
        for &x in &outside[..pair_cap] {
            for &y in &outside[..pair_cap] {
                let hx = classes[h].compose(&classes[x], alg);
                let hy = classes[h].compose(&classes[y], alg);
                let w_hx = shift_of(&hx);
                let w_hy = shift_of(&hy);
                report.checks += 1;
                // u(hx, hy) = u(x, y), cross-multiplied to avoid a fresh
                // inversion.
                if !alg.eq_elts(&w_hx, &alg.mul(&u(x, y), &w_hy)) {
                    report.violations.push(format!(
                        "simultaneous left shift changes u at classes ({x}, {y})"
                    ));
                }
            }
        }
    }

    report.notes.push(format!(
        "{} values of which {} outside the subgroup; pairs exhausted, composition cube capped at {cap}",
        classes.len(),
        outside.len()
    ));
    Ok(report)
}

/// Verifies, inside the finite-rank orbit-groupoid ring of the pair, that
/// the section through a fixed complement element g is the identity:
/// composing the classes of (x, g) and (g, y) recovers the class of (x, y)
/// for every complement pair, diagonal classes act as local units, and the
/// subgroup-translation identities between sections hold.
pub fn fg_q_identity_check(pair: &GroupPair, g_elt: usize) -> Result<AxiomReport> {
    let g = pair.group();
    if g_elt >= g.size() {
        return Err(Error::validation("base element out of range"));
    }
    if pair.contains(g_elt) {
        return Err(Error::validation(format!(
            "base element {} lies in the subgroup",
            g.label(g_elt)
        )));
    }
    let orbits = pair_orbit_groupoid(pair)?;
    let (alg, classes) = crate::ringfun::aprime_finite_with_classes(orbits.groupoid())?;
    let morph = |a: usize, b: usize| -> Result<usize> {
        orbits
            .morphism_of_pair(a, b)
            .ok_or_else(|| Error::structure("pair outside the complement"))
    };
    let mut report = AxiomReport {
        checks: 0,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    let complement = pair.complement();
    for &x in &complement {
        for &y in &complement {
            let through_g = alg.mul(&classes[morph(x, g_elt)?], &classes[morph(g_elt, y)?]);
            report.checks += 1;
            if !alg.eq_elts(&through_g, &classes[morph(x, y)?]) {
                report.violations.push(format!(
                    "u({}, {}) u({}, {}) differs from u({}, {})",
                    g.label(x),
                    g.label(g_elt),
                    g.label(g_elt),
                    g.label(y),
                    g.label(x),
                    g.label(y)
                ));
            }
        }
    }
    for &x in &complement {
        let diag = &classes[morph(x, x)?];
        for &y in &complement {
            let m = &classes[morph(x, y)?];
            report.checks += 1;
            if !alg.eq_elts(&alg.mul(diag, m), m) {
                report
                    .violations
                    .push(format!("diagonal class at {} is not a left unit", g.label(x)));
            }
        }
    }
    if orbits.groupoid().object_count() == 1 {
        for &x in &complement {
            report.checks += 1;
            if !alg.eq_elts(&classes[morph(x, x)?], &alg.unit_elt()) {
                report
                    .violations
                    .push(format!("diagonal class at {} is not the unit", g.label(x)));
            }
        }
    }
    // Sections through subgroup translates of g describe the same classes.
    for &h in pair.subgroup() {
        let hg = g.mul(h, g_elt);
        let hig = g.mul(g.inv(h), g_elt);
        report.checks += 1;
        if morph(g_elt, hg)? != morph(hig, g_elt)? {
            report.violations.push(format!(
                "translate morphisms through {} disagree",
                g.label(h)
            ));
        }
    }
    report.notes.push(format!(
        "{} complement pairs checked in a rank-{} ring ({})",
        complement.len() * complement.len(),
        alg.rank(),
        alg.additive_invariants()
    ));
    Ok(report)
}

/// The trefoil scale-and-shift assignment in the quadratic ring with
/// t^2 = t - 1: generator a maps to (-1, 1) and b to (t - 1, 1).
pub fn trefoil_special_representation(
) -> Result<(GroupPresentationData, FiniteRankAlgebra, Vec<SemidirectElement>)> {
    let data = group_preset("trefoil")?;
    let alg = crate::ringfun::polynomial_quotient("Z[t]/(t^2-t+1)", &[1, -1]);
    let t = alg.basis_elt(1);
    let a = SemidirectElement::new(&alg, alg.neg_elt(&alg.unit_elt()), alg.unit_elt())?;
    let b = SemidirectElement::new(&alg, alg.sub(&t, &alg.unit_elt()), alg.unit_elt())?;
    Ok((data, alg, vec![a, b]))
}

/// The figure-eight scale-and-shift assignment into the rank-six algebra:
/// a maps to (x, 0) and b to (x + r, 1).
pub fn fig8_special_representation(
) -> Result<(GroupPresentationData, FiniteRankAlgebra, Vec<SemidirectElement>)> {
    let data = group_preset("fig8")?;
    let alg = crate::ringfun::s_algebra();
    let x = alg.basis_elt(crate::ringfun::s_basis_index("x"));
    let r = alg.basis_elt(crate::ringfun::s_basis_index("r"));
    let a = SemidirectElement::new(&alg, x.clone(), alg.zero_elt())?;
    let b = SemidirectElement::new(&alg, alg.add(&x, &r), alg.unit_elt())?;
    Ok((data, alg, vec![a, b]))
}

/// The figure-eight integer matrix representation of size four, together
/// with a normal generator of its kernel.
pub fn fig8_sl4_representation(
) -> Result<(GroupPresentationData, FiniteRankAlgebra, Vec<Vec<BigInt>>, Vec<Vec<Letter>>)> {
    let data = group_preset("fig8")?;
    let alg = matrix_algebra(4);
    let a1 = matrix_elt(
        4,
        &[
            vec![0, 1, 0, 0],
            vec![-1, 1, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, -1, 1],
        ],
    );
    let a2 = matrix_elt(
        4,
        &[
            vec![0, 0, 1, 0],
            vec![0, 1, 1, -1],
            vec![-1, 0, 1, 0],
            vec![-1, 1, 1, 0],
        ],
    );
    let kernel = vec![data.parse_word("A b a a b")?];
    Ok((data, alg, vec![a1, a2], kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finring::GroupTable;

    fn s3_pair() -> GroupPair {
        GroupPair::from_named(&GroupTable::symmetric(3), &["(0 1)"]).expect("pair")
    }

    #[test]
    fn parser_round_trips_and_rejects_bad_letters() {
        let text = "gen a b\nrel a a B B B\nper a B\nper a a\n";
        let data = GroupPresentationData::parse(text).expect("parses");
        assert_eq!(data.generators, vec!["a", "b"]);
        assert_eq!(data.relators.len(), 1);
        assert_eq!(data.relators[0].len(), 5);
        assert_eq!(data.peripheral.len(), 2);
        assert_eq!(data.to_text(), text);

        let err = GroupPresentationData::parse("gen a\nrel a c\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(GroupPresentationData::parse("foo a\n").is_err());
        assert!(GroupPresentationData::parse("rel a\n").is_err());
    }

    #[test]
    fn presets_have_the_expected_shapes() {
        let trefoil = group_preset("trefoil").expect("preset");
        assert_eq!(trefoil.relators[0].len(), 5);
        let fig8 = group_preset("fig8").expect("preset");
        assert_eq!(fig8.relators[0].len(), 10);
        assert_eq!(fig8.peripheral[0].len(), 1);
        assert_eq!(fig8.peripheral[1].len(), 8);
        assert!(matches!(group_preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn malnormality_matches_the_three_referee_cases() {
        assert!(is_malnormal(&s3_pair()).malnormal);

        let z4 = GroupPair::from_named(&GroupTable::cyclic(4), &["2"]).expect("pair");
        let report = is_malnormal(&z4);
        assert!(!report.malnormal);
        let witness = report.witness.expect("witness");
        assert_eq!(witness.outside, 1);
        let g = z4.group();
        assert_eq!(
            g.mul(g.mul(witness.outside, witness.conjugated), g.inv(witness.outside)),
            witness.image
        );

        let whole = GroupPair::new(GroupTable::symmetric(3), (0..6).collect()).expect("pair");
        let report = is_malnormal(&whole);
        assert!(!report.malnormal);
        assert!(report.notes[0].contains("whole group"));
    }

    #[test]
    fn trivial_subgroup_gives_the_pair_groupoid_shape() {
        let s3 = GroupTable::symmetric(3);
        let e = s3.identity();
        let pair = GroupPair::new(s3, vec![e]).expect("pair");
        assert!(is_malnormal(&pair).malnormal);
        let g = delta_from_pair(&pair).expect("builds");
        assert_eq!(g.object_count(), 5);
        assert_eq!(g.morphism_count(), 25);
        assert_eq!(g.h().len(), 20);
        let axioms = g.check_axioms();
        assert!(axioms.passed(), "{:?}", axioms.violations);
    }

    #[test]
    fn transposition_pair_collapses_to_two_morphisms() {
        let orbits = pair_orbit_groupoid(&s3_pair()).expect("builds");
        let g = orbits.groupoid();
        assert_eq!(g.object_count(), 1);
        assert_eq!(g.morphism_count(), 2);
        assert_eq!(g.h().len(), 1);
        let u = g.h()[0];
        assert_eq!(g.j(u), Some(u));
        assert_eq!(g.k(u), Some(u));
        let axioms = g.check_axioms();
        assert!(axioms.passed(), "{:?}", axioms.violations);
        // All sixteen complement pairs land on the two orbits.
        let complement = s3_pair().complement();
        let mut seen = std::collections::BTreeSet::new();
        for &a in &complement {
            for &b in &complement {
                seen.insert(orbits.morphism_of_pair(a, b).expect("mapped"));
            }
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn orbit_construction_rejects_bad_pairs() {
        let z4 = GroupPair::from_named(&GroupTable::cyclic(4), &["2"]).expect("pair");
        let err = delta_from_pair(&z4).unwrap_err();
        assert!(err.to_string().contains("not malnormal"), "{err}");
        assert!(err.to_string().contains("lies in the subgroup"), "{err}");

        let whole = GroupPair::new(GroupTable::symmetric(3), (0..6).collect()).expect("pair");
        assert!(delta_from_pair(&whole).is_err());
    }

    #[test]
    fn semidirect_composition_follows_the_affine_law() {
        let alg = crate::ringfun::polynomial_quotient("Z[t]/(t^2-t+1)", &[1, -1]);
        let t = alg.basis_elt(1);
        let p = SemidirectElement::new(&alg, t.clone(), alg.unit_elt()).expect("unit scale");
        let q = SemidirectElement::new(&alg, alg.neg_elt(&alg.unit_elt()), t.clone()).expect("unit scale");
        let pq = p.compose(&q, &alg);
        assert!(alg.eq_elts(&pq.alpha, &alg.neg_elt(&t)));
        // beta = 1 * (-1) + t = t - 1.
        assert!(alg.eq_elts(&pq.beta, &alg.sub(&t, &alg.unit_elt())));
        let inv = pq.inverse(&alg).expect("invertible");
        assert!(pq.compose(&inv, &alg).is_identity(&alg));
        assert!(inv.compose(&pq, &alg).is_identity(&alg));
        let r = SemidirectElement::new(&alg, alg.sub(&t, &alg.unit_elt()), alg.zero_elt()).expect("unit");
        let left = p.compose(&q, &alg).compose(&r, &alg);
        let right = p.compose(&q.compose(&r, &alg), &alg);
        assert!(left.eq_in(&right, &alg));
        assert!(SemidirectElement::new(&alg, alg.scale(&t, &num::BigInt::from(2)), alg.zero_elt()).is_err());
    }

    #[test]
    fn trefoil_words_accumulate_the_expected_values() {
        let (data, alg, assign) = trefoil_special_representation().expect("preset");
        let empty = cocycle_extend(&alg, &assign, &[]).expect("empty word");
        assert!(empty.is_identity(&alg));

        let a2 = cocycle_extend(&alg, &assign, &[Letter::plain(0), Letter::plain(0)]).expect("a a");
        assert!(alg.eq_elts(&a2.alpha, &alg.unit_elt()));
        assert!(alg.is_zero_elt(&a2.beta));

        let b3 = cocycle_extend(
            &alg,
            &assign,
            &[Letter::plain(1), Letter::plain(1), Letter::plain(1)],
        )
        .expect("b b b");
        assert!(alg.eq_elts(&b3.alpha, &alg.unit_elt()));
        assert!(alg.is_zero_elt(&b3.beta));

        let b2 = cocycle_extend(&alg, &assign, &[Letter::plain(1), Letter::plain(1)]).expect("b b");
        let t = alg.basis_elt(1);
        assert!(alg.eq_elts(&b2.alpha, &alg.neg_elt(&t)));
        assert!(alg.eq_elts(&b2.beta, &t));

        let relator = cocycle_extend(&alg, &assign, &data.relators[0]).expect("relator");
        assert!(relator.is_identity(&alg));
    }

    #[test]
    fn trefoil_assignment_is_special_on_a_ball() {
        let (data, alg, assign) = trefoil_special_representation().expect("preset");
        let report = special_check(&data, &assign, &alg, 4).expect("runs");
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.notes[0].contains("radius-4"));
    }

    #[test]
    fn zero_assignment_fails_the_non_degeneracy_condition() {
        let (data, alg, _) = trefoil_special_representation().expect("preset");
        let trivial = vec![SemidirectElement::identity(&alg); 2];
        let report = special_check(&data, &trivial, &alg, 3).expect("runs");
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("vanishes on the whole ball")));
    }

    #[test]
    fn figure_eight_assignment_is_special_on_a_ball() {
        let (data, alg, assign) = fig8_special_representation().expect("preset");
        let report = special_check(&data, &assign, &alg, 3).expect("runs");
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn u_relations_hold_for_the_trefoil_values() {
        let (data, alg, assign) = trefoil_special_representation().expect("preset");
        let report = q_relation_check(&data, &assign, &alg, 3).expect("runs");
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.checks > 100);
    }

    #[test]
    fn matrix_representation_satisfies_relator_and_kernel() {
        let (data, alg, images, kernel) = fig8_sl4_representation().expect("preset");
        let report = group_rep_check(&data, &images, &alg, &kernel).expect("runs");
        assert!(report.passed(), "{:?}", report.violations);

        let mut broken = images.clone();
        broken[0] = alg.unit_elt();
        let report = group_rep_check(&data, &broken, &alg, &kernel).expect("runs");
        assert!(!report.passed());
    }

    #[test]
    fn section_identity_holds_for_the_transposition_pair() {
        let pair = s3_pair();
        let g_elt = pair
            .group()
            .index_of("(0 2)")
            .expect("transposition present");
        let report = fg_q_identity_check(&pair, g_elt).expect("runs");
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.notes[0].contains("16 complement pairs"));

        let in_h = pair.group().index_of("(0 1)").expect("present");
        assert!(fg_q_identity_check(&pair, in_h).is_err());
    }
}
