//! Integer-coefficient polynomials with monomials packed into a `u128`, and
//! resultants over them by subresultant remainder sequences. Each variable gets a 16-bit field,
//! variable 0 in the most significant one, so key order is the same
//! lexicographic order [`Polynomial`] uses.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Polynomial, Rational};

pub(crate) const MAX_VARS: usize = 8;
pub(crate) const MAX_EXPONENT: u32 = u16::MAX as u32;
const FIELD: u32 = 16;
const MASK: u128 = 0xFFFF;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct ZPoly {
    /// Ascending by key, no zero coefficients.
    terms: Vec<(u128, BigInt)>,
}

fn shift(nvars: usize, var: usize) -> u32 {
    FIELD * (nvars - 1 - var) as u32
}

pub(crate) fn pack(exps: &[u32]) -> u128 {
    let n = exps.len();
    exps.iter()
        .enumerate()
        .fold(0u128, |k, (i, &e)| k | (u128::from(e) << shift(n, i)))
}

fn unpack(key: u128, nvars: usize) -> Vec<u32> {
    (0..nvars).map(|i| ((key >> shift(nvars, i)) & MASK) as u32).collect()
}

/// Whether every field of `a` is at least the matching field of `b`.
fn divides(b: u128, a: u128, nvars: usize) -> bool {
    (0..nvars).all(|i| {
        let s = shift(nvars, i);
        (a >> s) & MASK >= (b >> s) & MASK
    })
}

impl ZPoly {
    pub(crate) fn zero() -> Self {
        ZPoly::default()
    }

    pub(crate) fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            ZPoly::zero()
        } else {
            ZPoly { terms: vec![(0, c)] }
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Scales `p` by `scale` (which must clear every denominator).
    pub(crate) fn from_polynomial(p: &Polynomial, scale: &BigInt) -> Self {
        let s = Rational::from_integer(scale.clone());
        ZPoly {
            terms: p
                .terms()
                .map(|(e, c)| {
                    let v = c * &s;
                    debug_assert!(v.is_integer());
                    (pack(e), v.to_integer())
                })
                .collect(),
        }
    }

    pub(crate) fn to_polynomial(&self, nvars: usize) -> Polynomial {
        Polynomial::from_terms(
            nvars,
            self.terms
                .iter()
                .map(|(k, c)| (unpack(*k, nvars), Rational::from_integer(c.clone()))),
        )
    }

    pub(crate) fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return other.scale(&self.terms[0].1);
        }
        if other.terms.len() == 1 && other.terms[0].0 == 0 {
            return self.scale(&other.terms[0].1);
        }
        // sort product keys first so each coefficient is built in place
        let mut keys: Vec<(u128, u32, u32)> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (i, (ka, _)) in self.terms.iter().enumerate() {
            for (j, (kb, _)) in other.terms.iter().enumerate() {
                keys.push((ka + kb, i as u32, j as u32));
            }
        }
        keys.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(u128, BigInt)> = Vec::with_capacity(keys.len());
        let mut rest = keys.as_slice();
        while let Some(&(k, _, _)) = rest.first() {
            let n = rest.iter().take_while(|t| t.0 == k).count();
            let (group, tail) = rest.split_at(n);
            let mut acc = BigInt::zero();
            for &(_, i, j) in group {
                acc += &self.terms[i as usize].1 * &other.terms[j as usize].1;
            }
            if !acc.is_zero() {
                out.push((k, acc));
            }
            rest = tail;
        }
        ZPoly { terms: out }
    }

    fn scale(&self, c: &BigInt) -> ZPoly {
        ZPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &ZPoly) -> ZPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let a = self.terms.get(i);
            let b = other.terms.get(j);
            match (a, b) {
                (Some((ka, ca)), Some((kb, cb))) if ka == kb => {
                    let c = ca - cb;
                    if !c.is_zero() {
                        out.push((*ka, c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((ka, ca)), Some((kb, _))) if ka < kb => {
                    out.push((*ka, ca.clone()));
                    i += 1;
                }
                (Some((ka, ca)), None) => {
                    out.push((*ka, ca.clone()));
                    i += 1;
                }
                (_, Some((kb, cb))) => {
                    out.push((*kb, -cb));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        ZPoly { terms: out }
    }

    pub(crate) fn neg(&self) -> ZPoly {
        ZPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    /// `self / d` when the division is exact over the integers.
    pub(crate) fn div_exact(&self, d: &ZPoly, nvars: usize) -> Option<ZPoly> {
        let (dk, dc) = d.terms.last()?;
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if d.terms.len() == 1 {
            let mut out = Vec::with_capacity(self.terms.len());
            for (k, c) in &self.terms {
                if !divides(*dk, *k, nvars) {
                    return None;
                }
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.push((k - dk, q));
            }
            return Some(ZPoly { terms: out });
        }
        let mut rem: BTreeMap<u128, BigInt> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        while let Some((&rk, rc)) = rem.iter().next_back() {
            if !divides(*dk, rk, nvars) {
                return None;
            }
            let (qc, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            let qk = rk - dk;
            for (k, c) in &d.terms {
                let key = qk + k;
                let prod = &qc * c;
                let entry = rem.entry(key).or_insert_with(BigInt::zero);
                *entry -= prod;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            quotient.push((qk, qc));
        }
        quotient.reverse();
        Some(ZPoly { terms: quotient })
    }
}

/// A polynomial in the eliminated variable with `ZPoly` coefficients, lowest
/// power first and no trailing zeros.
type Univariate = Vec<ZPoly>;

fn trim(mut u: Univariate) -> Univariate {
    while u.last().is_some_and(ZPoly::is_zero) {
        u.pop();
    }
    u
}

fn pow(base: &ZPoly, exp: usize) -> ZPoly {
    let mut out = ZPoly::constant(BigInt::one());
    for _ in 0..exp {
        out = out.mul(base);
    }
    out
}

fn exact(a: &ZPoly, b: &ZPoly, nvars: usize) -> ZPoly {
    a.div_exact(b, nvars)
        .expect("subresultant step divides exactly")
}

/// Pseudo-remainder of `f` by `g`: the remainder of `lc(g)^(deg f - deg g + 1) · f`.
fn prem(f: &Univariate, g: &Univariate) -> Univariate {
    let dg = g.len() - 1;
    let lc = &g[dg];
    let mut r = f.clone();
    let mut steps = f.len() - dg;
    while r.len() > dg {
        let j = r.len() - 1 - dg;
        let lr = r.last().expect("non-empty").clone();
        let mut next: Univariate = r.iter().map(|c| c.mul(lc)).collect();
        for (i, gc) in g.iter().enumerate() {
            next[i + j] = next[i + j].sub(&lr.mul(gc));
        }
        r = trim(next);
        steps -= 1;
    }
    let scale = pow(lc, steps);
    r.iter().map(|c| c.mul(&scale)).collect()
}

/// Resultant of two univariate polynomials of positive degree by the
/// subresultant remainder sequence; `f`'s degree must be at least `g`'s.
fn subresultant(f: Univariate, g: Univariate, nvars: usize) -> ZPoly {
    let one = ZPoly::constant(BigInt::one());
    let (mut f, mut g) = (f, g);
    let mut d = f.len() - g.len();
    let sign = if (d + 1) % 2 == 0 { one.clone() } else { one.neg() };
    let mut h: Univariate = prem(&f, &g).iter().map(|c| c.mul(&sign)).collect();
    let mut lc = g.last().expect("non-empty").clone();
    let mut c = pow(&lc, d);
    let mut s = c.clone();
    c = c.neg();
    let mut last_degree = g.len() - 1;
    while !h.is_empty() {
        let k = h.len() - 1;
        last_degree = k;
        let m = g.len() - 1;
        f = std::mem::replace(&mut g, h);
        d = m - k;
        let b = lc.mul(&pow(&c, d)).neg();
        h = prem(&f, &g).iter().map(|x| exact(x, &b, nvars)).collect();
        lc = g.last().expect("non-empty").clone();
        c = if d > 1 {
            let q = pow(&c, d - 1);
            exact(&pow(&lc.neg(), d), &q, nvars)
        } else {
            lc.neg()
        };
        s = c.neg();
    }
    if last_degree > 0 {
        ZPoly::zero()
    } else {
        s
    }
}

/// `res(p, q)` for coefficient lists (lowest power first, both of positive
/// degree), with the sign of the Sylvester determinant that lists `p`'s rows first.
pub(crate) fn resultant(p: Univariate, q: Univariate, nvars: usize) -> ZPoly {
    let (a, b) = (p.len() - 1, q.len() - 1);
    if a >= b {
        subresultant(p, q, nvars)
    } else {
        let r = subresultant(q, p, nvars);
        if a * b % 2 == 1 {
            r.neg()
        } else {
            r
        }
    }
}

/// Least common multiple of the coefficient denominators.
pub(crate) fn denominator_lcm(p: &Polynomial) -> BigInt {
    p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
}
