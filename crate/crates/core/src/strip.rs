//! The rational strip groupoid.  Objects are rationals in [0, 1), a morphism
//! (x, t) runs from the fractional part of x to t, and composition shifts by
//! integers: (x, s)(s + m, t) = (x + m, t).  The distinguished subset H is
//! the set of non-identity morphisms, and the second involution is
//!
//!   k(x, t) = ((t*·x − t̂) / (x − t), t*),
//!
//! built from the object involution t* (p·p̄ ≡ −1 mod q, written p̄/q) and
//! the companion value t̂ = (p·p̄ + 1)/q².  The groupoid is infinite, so the
//! axiom check sweeps all morphisms up to a denominator bound.

use num::bigint::BigInt;
use num::integer::Integer;
use num::{BigRational, One, Signed, Zero};

use crate::groupoid::AxiomReport;
use crate::{Error, Result};

/// Convenience constructor for exact rationals.
pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Fractional part x − ⌊x⌋, always in [0, 1).
pub fn frac_part(x: &BigRational) -> BigRational {
    x - x.floor()
}

fn require_object(t: &BigRational) -> Result<()> {
    if t.is_negative() || *t >= BigRational::one() {
        return Err(Error::validation(format!("object {t} lies outside [0, 1)")));
    }
    Ok(())
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let eg = a.extended_gcd(m);
    if eg.gcd.is_one() {
        Some(eg.x.mod_floor(m))
    } else {
        None
    }
}

/// The involution on objects: for t = p/q in lowest terms, t* = p̄/q where
/// p·p̄ ≡ −1 (mod q) and 0 ≤ p̄ < q.  In particular 0* = 0.
pub fn strip_star(t: &BigRational) -> Result<BigRational> {
    require_object(t)?;
    let q = t.denom();
    if q.is_one() {
        return Ok(BigRational::zero());
    }
    let inv = mod_inverse(t.numer(), q).expect("reduced fraction");
    Ok(BigRational::new(q - inv, q.clone()))
}

/// The companion value t̂ = (p·p̄ + 1)/q², with 0̂ = 1.
pub fn strip_hat(t: &BigRational) -> Result<BigRational> {
    let star = strip_star(t)?;
    let q = t.denom();
    Ok(BigRational::new(t.numer() * star.numer() + 1, q * q))
}

/// A morphism of the strip groupoid: from frac(x) to t.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StripMorphism {
    x: BigRational,
    t: BigRational,
}

impl StripMorphism {
    pub fn new(x: BigRational, t: BigRational) -> Result<StripMorphism> {
        require_object(&t)?;
        Ok(StripMorphism { x, t })
    }

    pub fn x(&self) -> &BigRational {
        &self.x
    }

    pub fn dom(&self) -> BigRational {
        frac_part(&self.x)
    }

    pub fn cod(&self) -> &BigRational {
        &self.t
    }

    pub fn is_identity(&self) -> bool {
        self.x == self.t
    }
}

impl std::fmt::Display for StripMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.x, self.t)
    }
}

pub fn strip_identity(t: &BigRational) -> Result<StripMorphism> {
    StripMorphism::new(t.clone(), t.clone())
}

/// (s + k, t)⁻¹ = (t − k, s) where s = frac(x) and k = ⌊x⌋.
pub fn strip_inverse(m: &StripMorphism) -> StripMorphism {
    let k = m.x.floor();
    StripMorphism {
        x: &m.t - &k,
        t: frac_part(&m.x),
    }
}

/// The composite, defined when cod of `a` equals dom of `b`:
/// (x, s)(s + m, t) = (x + m, t).
pub fn strip_compose(a: &StripMorphism, b: &StripMorphism) -> Result<StripMorphism> {
    if *a.cod() != b.dom() {
        return Err(Error::validation(format!(
            "morphisms {a} and {b} are not composable"
        )));
    }
    let shift = b.x.floor();
    Ok(StripMorphism {
        x: &a.x + shift,
        t: b.t.clone(),
    })
}

/// The second involution k(x, t) = ((t*·x − t̂)/(x − t), t*), undefined on
/// identities (x = t).
pub fn strip_k(m: &StripMorphism) -> Result<StripMorphism> {
    if m.is_identity() {
        return Err(Error::validation(format!(
            "k is undefined on the identity morphism {m}"
        )));
    }
    let star = strip_star(&m.t)?;
    let hat = strip_hat(&m.t)?;
    let x_new = (&star * &m.x - hat) / (&m.x - &m.t);
    Ok(StripMorphism { x: x_new, t: star })
}

/// j = i∘k∘i, likewise undefined on identities.
pub fn strip_j(m: &StripMorphism) -> Result<StripMorphism> {
    Ok(strip_inverse(&strip_k(&strip_inverse(m))?))
}

/// Looks up or computes the pair (t*, t̂) for an object.
fn star_hat<'a>(
    memo: &'a mut std::collections::HashMap<BigRational, (BigRational, BigRational)>,
    t: &BigRational,
) -> &'a (BigRational, BigRational) {
    if !memo.contains_key(t) {
        let star = strip_star(t).expect("object in range");
        let hat = strip_hat(t).expect("object in range");
        memo.insert(t.clone(), (star, hat));
    }
    &memo[t]
}

/// k with the (star, hat) pair already in hand; caller guarantees x ≠ t.
fn k_cached(star: &BigRational, hat: &BigRational, m: &StripMorphism) -> StripMorphism {
    StripMorphism {
        x: (star * &m.x - hat) / (&m.x - &m.t),
        t: star.clone(),
    }
}

/// Sweeps every object with denominator at most `max_den` and every
/// morphism between such objects with integer offset 0 or 1, verifying the
/// involution laws on all of them and the two composition axioms on a
/// deterministic sample (about thirty thousand) of the composable pairs.
pub fn check_strip_axioms(max_den: u32) -> AxiomReport {
    let mut report = AxiomReport {
        checks: 0,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    let mut memo = std::collections::HashMap::new();
    let mut objects: Vec<BigRational> = Vec::new();
    for q in 1..=max_den as i64 {
        for p in 0..q {
            let t = rational(p, q);
            if !objects.contains(&t) {
                objects.push(t);
            }
        }
    }

    for t in &objects {
        report.checks += 1;
        let star = strip_star(t).expect("object in range");
        let again = strip_star(&star).expect("star stays in range");
        if again != *t {
            report
                .violations
                .push(format!("object involution fails at {t}: {t}** = {again}"));
        }
        if strip_hat(&star).expect("object in range") != strip_hat(t).expect("object in range") {
            report
                .violations
                .push(format!("hat value differs between {t} and {t}* = {star}"));
        }
    }

    // Morphism window with cached k/j images and the inverse of the k image.
    struct Entry {
        m: StripMorphism,
        k: StripMorphism,
        j: StripMorphism,
        ik: StripMorphism,
        j_dom: BigRational,
    }
    let offsets = [0i64, 1];
    let mut entries: Vec<Entry> = Vec::new();
    for u in &objects {
        for n in offsets {
            let x = u + BigRational::from(BigInt::from(n));
            for t in &objects {
                let m = StripMorphism::new(x.clone(), t.clone()).expect("object in range");
                if m.is_identity() {
                    continue;
                }
                let k = strip_k(&m).expect("non-identity");
                let j = strip_j(&m).expect("non-identity");
                let j_dom = j.dom();
                entries.push(Entry {
                    ik: strip_inverse(&k),
                    m,
                    k,
                    j,
                    j_dom,
                });
            }
        }
    }

    for e in &entries {
        report.checks += 1;
        let m = &e.m;
        if e.k.is_identity() {
            report.violations.push(format!("k({m}) is an identity"));
        }
        if strip_k(&e.k).ok().as_ref() != Some(m) {
            report.violations.push(format!("k is not an involution at {m}"));
        }
        if strip_j(&e.j).ok().as_ref() != Some(m) {
            report.violations.push(format!("j is not an involution at {m}"));
        }
        // j moves dom through the object involution, k moves cod.
        let dom_star = strip_star(&m.dom()).expect("object in range");
        if e.j_dom != dom_star {
            report
                .violations
                .push(format!("dom(j({m})) = {} differs from {}", e.j_dom, dom_star));
        }
        let cod_star = strip_star(m.cod()).expect("object in range");
        if *e.k.cod() != cod_star {
            report
                .violations
                .push(format!("cod(k({m})) differs from cod*"));
        }
        // jij = k, the heart of the compatibility between i and j.
        let jij = strip_j(&strip_inverse(&e.j));
        match jij {
            Ok(v) if v == e.k => {}
            _ => report
                .violations
                .push(format!("jij and iji disagree at {m}")),
        }
    }

    // Composition axioms over a stride sample of the composable pairs.
    let mut firsts: std::collections::HashMap<&BigRational, Vec<usize>> = Default::default();
    let mut seconds: std::collections::HashMap<BigRational, Vec<usize>> = Default::default();
    for (idx, e) in entries.iter().enumerate() {
        firsts.entry(e.m.cod()).or_default().push(idx);
        seconds.entry(e.m.dom()).or_default().push(idx);
    }
    let total: usize = objects
        .iter()
        .map(|s| {
            firsts.get(s).map_or(0, Vec::len) * seconds.get(s).map_or(0, Vec::len)
        })
        .sum();
    let stride = (total / 30_000).max(1);
    let mut counter = 0usize;
    for s in &objects {
        let (Some(fs), Some(ss)) = (firsts.get(s), seconds.get(s)) else { continue };
        for &ai in fs {
            for &bi in ss {
                counter += 1;
                if counter % stride != 0 {
                    continue;
                }
                report.checks += 1;
                let (a, b) = (&entries[ai], &entries[bi]);
                if *a.k.cod() != b.j_dom {
                    report.violations.push(format!(
                        "({}, {}) composable but (k, j) images are not",
                        a.m, b.m
                    ));
                    continue;
                }
                let ab = strip_compose(&a.m, &b.m).expect("composable");
                if ab.is_identity() {
                    continue;
                }
                let ka_jb = strip_compose(&a.k, &b.j).expect("checked composable");
                if ka_jb.is_identity() {
                    report
                        .violations
                        .push(format!("k({})·j({}) fell onto an identity", a.m, b.m));
                    continue;
                }
                let (abs, abh) = star_hat(&mut memo, ab.cod()).clone();
                let lhs = strip_compose(&k_cached(&abs, &abh, &ab), &b.ik);
                let (qs, qh) = star_hat(&mut memo, ka_jb.cod()).clone();
                let rhs = k_cached(&qs, &qh, &ka_jb);
                match lhs {
                    Ok(l) if l == rhs => {}
                    _ => report.violations.push(format!(
                        "composition identity fails on the pair ({}, {})",
                        a.m, b.m
                    )),
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_and_hat_values() {
        let t = rational(2, 5);
        assert_eq!(strip_star(&t).unwrap(), rational(2, 5));
        assert_eq!(strip_hat(&t).unwrap(), rational(1, 5));
        let zero = BigRational::zero();
        assert_eq!(strip_star(&zero).unwrap(), BigRational::zero());
        assert_eq!(strip_hat(&zero).unwrap(), BigRational::one());
        // 1/3: p̄ with p̄ ≡ −1 mod 3 is 2.
        assert_eq!(strip_star(&rational(1, 3)).unwrap(), rational(2, 3));
        assert_eq!(strip_hat(&rational(1, 3)).unwrap(), rational(3, 9));
        assert!(strip_star(&rational(3, 2)).is_err());
        assert!(strip_star(&rational(-1, 2)).is_err());
    }

    #[test]
    fn star_is_an_involution() {
        for q in 1..=12i64 {
            for p in 0..q {
                let t = rational(p, q);
                let star = strip_star(&t).unwrap();
                assert_eq!(strip_star(&star).unwrap(), t, "t = {t}");
            }
        }
    }

    #[test]
    fn k_on_a_known_morphism() {
        let m = StripMorphism::new(rational(3, 2), rational(1, 2)).unwrap();
        let km = strip_k(&m).unwrap();
        assert_eq!(*km.x(), rational(1, 4));
        assert_eq!(*km.cod(), rational(1, 2));
        assert_eq!(strip_k(&km).unwrap(), m);
        let id = strip_identity(&rational(1, 2)).unwrap();
        assert!(strip_k(&id).is_err());
        assert!(strip_j(&id).is_err());
    }

    #[test]
    fn composition_and_inverse_laws() {
        let a = StripMorphism::new(rational(7, 3), rational(1, 2)).unwrap();
        let b = StripMorphism::new(rational(5, 2), rational(2, 5)).unwrap();
        // cod(a) = 1/2, dom(b) = frac(5/2) = 1/2.
        let ab = strip_compose(&a, &b).unwrap();
        assert_eq!(*ab.x(), rational(13, 3));
        assert_eq!(*ab.cod(), rational(2, 5));
        let ia = strip_inverse(&a);
        assert_eq!(
            strip_compose(&a, &ia).unwrap(),
            strip_identity(&a.dom()).unwrap()
        );
        assert_eq!(
            strip_compose(&ia, &a).unwrap(),
            strip_identity(a.cod()).unwrap()
        );
        // Mismatched endpoints refuse to compose.
        assert!(strip_compose(&b, &a).is_err());
    }

    #[test]
    fn axiom_sweep_small_window() {
        let report = check_strip_axioms(6);
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.checks > 100);
    }
}
