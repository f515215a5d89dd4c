//! Shortlex string rewriting with Knuth-Bendix completion.  Letters are
//! small integers; a rule replaces one word by a strictly shortlex-smaller
//! word, so rewriting always terminates.  Completion resolves critical
//! pairs until none remain or the rule cap is hit.  `complete` treats a
//! hit cap as an error; `complete_or_defer` instead keeps the plain
//! oriented relations and flags the system, so equality queries can fail
//! at the point of use rather than aborting construction.  Every rule is
//! a consequence of the input relations, so even on a deferred system a
//! reduction is a sound equality; only "no further reduction" is
//! inconclusive there.

use crate::{Error, Result};

/// True when `a` precedes `b` in shortlex order (length first, then
/// left-to-right letter comparison).
pub fn shortlex_less(a: &[usize], b: &[usize]) -> bool {
    a.len() < b.len() || (a.len() == b.len() && a < b)
}

/// A confluent-when-flagged set of shortlex-decreasing rules.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    rules: Vec<(Vec<usize>, Vec<usize>)>,
    confluent: bool,
    failed_cap: Option<usize>,
}

impl RewriteSystem {
    /// Orients the given equations and runs Knuth-Bendix completion.  The
    /// cap bounds the number of rules ever added; exceeding it aborts with
    /// a word-problem error.  Equations are processed fairly (first in,
    /// first out) and rules made redundant by a newer rule are requeued,
    /// which keeps the final system inter-reduced.
    pub fn complete(relations: &[(Vec<usize>, Vec<usize>)], cap: usize) -> Result<RewriteSystem> {
        let mut system = RewriteSystem {
            rules: Vec::new(),
            confluent: false,
            failed_cap: None,
        };
        let mut added = 0usize;
        let mut pending: std::collections::VecDeque<(Vec<usize>, Vec<usize>)> =
            relations.iter().cloned().collect();
        while let Some((l, r)) = pending.pop_front() {
            let l = system.normal_form(&l);
            let r = system.normal_form(&r);
            if l == r {
                continue;
            }
            let (big, small) = if shortlex_less(&r, &l) { (l, r) } else { (r, l) };
            added += 1;
            if added > cap {
                return Err(Error::WordProblem { limit: cap });
            }
            // Retire rules whose left side the new rule rewrites.
            let survivors: Vec<(Vec<usize>, Vec<usize>)> = std::mem::take(&mut system.rules)
                .into_iter()
                .filter_map(|(lhs, rhs)| {
                    if contains_subword(&lhs, &big) {
                        pending.push_back((lhs, rhs));
                        None
                    } else {
                        Some((lhs, rhs))
                    }
                })
                .collect();
            system.rules = survivors;
            system.rules.push((big, small));
            let new_idx = system.rules.len() - 1;
            let mut fresh = Vec::new();
            for idx in 0..system.rules.len() {
                for (a, b) in [(idx, new_idx), (new_idx, idx)] {
                    critical_pairs(&system.rules[a], &system.rules[b], &mut fresh);
                }
            }
            pending.extend(fresh);
        }
        system.confluent = system.verify_confluence();
        Ok(system)
    }

    /// Runs completion; when the cap is exceeded, returns the merely
    /// oriented input relations flagged as non-confluent instead of an
    /// error.  Reductions of the deferred system are still sound
    /// equalities, but distinct normal forms no longer prove anything.
    pub fn complete_or_defer(relations: &[(Vec<usize>, Vec<usize>)], cap: usize) -> RewriteSystem {
        match RewriteSystem::complete(relations, cap) {
            Ok(system) => system,
            Err(_) => {
                let mut rules = Vec::new();
                for (l, r) in relations {
                    if l == r {
                        continue;
                    }
                    let (big, small) = if shortlex_less(r, l) {
                        (l.clone(), r.clone())
                    } else {
                        (r.clone(), l.clone())
                    };
                    if !rules.contains(&(big.clone(), small.clone())) {
                        rules.push((big, small));
                    }
                }
                RewriteSystem {
                    rules,
                    confluent: false,
                    failed_cap: Some(cap),
                }
            }
        }
    }

    /// Applies rules until none matches; unique result when confluent.
    pub fn normal_form(&self, word: &[usize]) -> Vec<usize> {
        let mut w = word.to_vec();
        'outer: loop {
            for (lhs, rhs) in &self.rules {
                if lhs.len() > w.len() {
                    continue;
                }
                for start in 0..=w.len() - lhs.len() {
                    if &w[start..start + lhs.len()] == lhs.as_slice() {
                        w.splice(start..start + lhs.len(), rhs.iter().copied());
                        continue 'outer;
                    }
                }
            }
            return w;
        }
    }

    pub fn rules(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.rules
    }

    pub fn is_confluent(&self) -> bool {
        self.confluent
    }

    /// The cap that stopped completion, when construction was deferred.
    pub fn completion_failure(&self) -> Option<usize> {
        self.failed_cap
    }

    /// Rechecks that every critical pair of the final system joins.
    fn verify_confluence(&self) -> bool {
        let mut pairs = Vec::new();
        for r1 in &self.rules {
            for r2 in &self.rules {
                critical_pairs(r1, r2, &mut pairs);
            }
        }
        pairs
            .into_iter()
            .all(|(a, b)| self.normal_form(&a) == self.normal_form(&b))
    }
}

fn contains_subword(word: &[usize], sub: &[usize]) -> bool {
    sub.len() <= word.len() && word.windows(sub.len()).any(|w| w == sub)
}

/// Pushes the two-way reductions of every superposition of the rules'
/// left-hand sides: proper overlaps (a suffix of one is a prefix of the
/// other) and containments (one inside the other).
fn critical_pairs(
    r1: &(Vec<usize>, Vec<usize>),
    r2: &(Vec<usize>, Vec<usize>),
    out: &mut Vec<(Vec<usize>, Vec<usize>)>,
) {
    let (l1, rhs1) = r1;
    let (l2, rhs2) = r2;
    // Proper overlap: l1 = u·o, l2 = o·v with o nonempty, u or v nonempty.
    let max_o = l1.len().min(l2.len());
    for o in 1..=max_o {
        if o == l1.len() && o == l2.len() {
            continue;
        }
        if l1[l1.len() - o..] != l2[..o] {
            continue;
        }
        // Superposed word u·o·v rewrites as rhs1·v and u·rhs2.
        let mut left = rhs1.clone();
        left.extend_from_slice(&l2[o..]);
        let mut right = l1[..l1.len() - o].to_vec();
        right.extend_from_slice(rhs2);
        out.push((left, right));
    }
    // Containment: l2 occurs strictly inside l1.
    if l2.len() < l1.len() {
        for start in 0..=l1.len() - l2.len() {
            if &l1[start..start + l2.len()] != l2.as_slice() {
                continue;
            }
            let mut via2 = l1[..start].to_vec();
            via2.extend_from_slice(rhs2);
            via2.extend_from_slice(&l1[start + l2.len()..]);
            out.push((rhs1.clone(), via2));
        }
    }
}
