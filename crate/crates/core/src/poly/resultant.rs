//! Resultants and discriminants with respect to one variable.
//!
//! The resultant is the determinant of the Sylvester matrix, computed with
//! fraction-free (Bareiss) elimination over the polynomial ring in the
//! remaining variables. Every Bareiss division is exact. Inputs whose
//! exponents fit are instead scaled to integer coefficients and handed to a
//! subresultant remainder sequence over packed monomials, which is much
//! cheaper; the determinant stays as the fallback.

use num_bigint::BigInt;
use num_traits::Pow;

use super::zpoly::{self, ZPoly};
use super::{PolyError, Polynomial, Rational};

fn sylvester(p: &Polynomial, q: &Polynomial, v: usize) -> Vec<Vec<Polynomial>> {
    let nvars = p.nvars();
    // coefficients from the leading power down
    let mut pc = p.coefficients_in(v);
    let mut qc = q.coefficients_in(v);
    pc.reverse();
    qc.reverse();
    let a = pc.len() - 1;
    let b = qc.len() - 1;
    let size = a + b;
    let mut m = vec![vec![Polynomial::zero(nvars); size]; size];
    for row in 0..b {
        for (j, c) in pc.iter().enumerate() {
            m[row][row + j] = c.clone();
        }
    }
    for row in 0..a {
        for (j, c) in qc.iter().enumerate() {
            m[b + row][row + j] = c.clone();
        }
    }
    m
}

fn bareiss_determinant(mut m: Vec<Vec<Polynomial>>, nvars: usize) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::one(nvars);
    }
    let mut negate = false;
    let mut prev = Polynomial::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Polynomial::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step divides exactly by the previous pivot");
            }
            m[i][k] = Polynomial::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Resultant of `p` and `q` with respect to variable `v`: the determinant of
/// their Sylvester matrix, with the rows of `p` first. The result is free of `v`.
pub fn resultant(p: &Polynomial, q: &Polynomial, v: usize) -> Result<Polynomial, PolyError> {
    check_var(p, v)?;
    for f in [p, q] {
        let d = f.degree_in(v);
        if d == 0 {
            return Err(PolyError::DegreeTooLow {
                var: v,
                degree: d,
                required: 1,
            });
        }
    }
    Ok(match integer_resultant(p, q, v) {
        Some(r) => r,
        None => rational_resultant(p, q, v),
    })
}

pub(crate) fn rational_resultant(p: &Polynomial, q: &Polynomial, v: usize) -> Polynomial {
    bareiss_determinant(sylvester(p, q, v), p.nvars())
}

fn max_exponent(p: &Polynomial) -> u64 {
    p.terms()
        .flat_map(|(e, _)| e.iter().copied())
        .max()
        .map_or(0, u64::from)
}

/// `None` when packed exponents could overflow a field.
fn integer_resultant(p: &Polynomial, q: &Polynomial, v: usize) -> Option<Polynomial> {
    let nvars = p.nvars();
    if nvars > zpoly::MAX_VARS {
        return None;
    }
    let a = u64::from(p.degree_in(v));
    let b = u64::from(q.degree_in(v));
    // subresultant coefficients are minors of the Sylvester matrix; a
    // pseudo-remainder multiplies up to deg + 2 of them
    let minor = b * max_exponent(p) + a * max_exponent(q);
    if (a.max(b) + 2) * minor.max(1) >= u64::from(zpoly::MAX_EXPONENT) {
        return None;
    }
    let c = zpoly::denominator_lcm(p);
    let d = zpoly::denominator_lcm(q);
    let lift = |f: &Polynomial, s: &BigInt| -> Vec<ZPoly> {
        f.coefficients_in(v).iter().map(|e| ZPoly::from_polynomial(e, s)).collect()
    };
    let det = zpoly::resultant(lift(p, &c), lift(q, &d), nvars).to_polynomial(nvars);
    let scale: BigInt = Pow::pow(&c, b) * Pow::pow(&d, a);
    Some(det.scale(&Rational::from_integer(scale).recip()))
}

/// `res(p, ∂p/∂v, v)`, without dividing by the leading coefficient.
pub fn discriminant(p: &Polynomial, v: usize) -> Result<Polynomial, PolyError> {
    check_var(p, v)?;
    let d = p.degree_in(v);
    if d < 2 {
        return Err(PolyError::DegreeTooLow {
            var: v,
            degree: d,
            required: 2,
        });
    }
    resultant(p, &p.derivative(v), v)
}

fn check_var(p: &Polynomial, v: usize) -> Result<(), PolyError> {
    if v >= p.nvars() {
        Err(PolyError::VariableOutOfRange {
            index: v,
            nvars: p.nvars(),
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, VariableSet};

    fn vs(names: &[&str]) -> VariableSet {
        VariableSet::new(names.iter().copied()).unwrap()
    }

    fn p(text: &str, vars: &VariableSet) -> Polynomial {
        parse_polynomial(text, vars).unwrap()
    }

    #[test]
    fn small_resultants() {
        let v = vs(&["x", "y"]);
        assert_eq!(
            resultant(&p("x^2 - 4", &v), &p("x - 1", &v), 0).unwrap(),
            p("-3", &v)
        );
        assert!(resultant(&p("x^2 - 1", &v), &p("x - 1", &v), 0)
            .unwrap()
            .is_zero());
        // Sylvester convention: det [[y, 1], [1, y]] = y^2 - 1
        assert_eq!(
            resultant(&p("x*y + 1", &v), &p("x + y", &v), 0).unwrap(),
            p("y^2 - 1", &v)
        );
        assert_eq!(
            resultant(&p("x - y", &v), &p("x + y", &v), 0).unwrap(),
            p("2*y", &v)
        );
    }

    #[test]
    fn degree_zero_is_rejected() {
        let v = vs(&["x", "y"]);
        assert!(matches!(
            resultant(&p("y", &v), &p("x", &v), 0),
            Err(PolyError::DegreeTooLow { required: 1, .. })
        ));
        assert!(matches!(
            discriminant(&p("x + y", &v), 0),
            Err(PolyError::DegreeTooLow { required: 2, .. })
        ));
    }

    #[test]
    fn discriminants() {
        let v = vs(&["x", "a", "b", "c"]);
        // res(f, f') for a generic quadratic is a*(4ac - b^2)
        assert_eq!(
            discriminant(&p("a*x^2 + b*x + c", &v), 0).unwrap(),
            p("a*(4*a*c - b^2)", &v)
        );
        assert_eq!(discriminant(&p("x^2 + 1", &v), 0).unwrap(), p("4", &v));
        assert!(discriminant(&p("(x - 1)^2", &v), 0).unwrap().is_zero());
    }

    #[test]
    fn integer_path_matches_rational_path() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let random = |rng: &mut rand_chacha::ChaCha8Rng| {
            let terms: Vec<(Vec<u32>, Rational)> = (0..rng.gen_range(1..6))
                .map(|_| {
                    let e = (0..3).map(|_| rng.gen_range(0..4)).collect();
                    let c = Rational::new(rng.gen_range(-9..10).into(), rng.gen_range(1..5).into());
                    (e, c)
                })
                .collect();
            Polynomial::from_terms(3, terms)
        };
        let mut checked = 0;
        while checked < 60 {
            let f = random(&mut rng);
            let g = random(&mut rng);
            let v = rng.gen_range(0..3);
            if f.degree_in(v) == 0 || g.degree_in(v) == 0 {
                continue;
            }
            let fast = integer_resultant(&f, &g, v).unwrap();
            assert_eq!(fast, rational_resultant(&f, &g, v), "{f:?} {g:?} {v}");
            checked += 1;
        }
    }
}
