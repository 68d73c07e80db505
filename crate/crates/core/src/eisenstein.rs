//! Exact arithmetic over Q(z) where z is a primitive sixth root of unity,
//! so z^2 = z - 1 and complex conjugation sends z to 1 - z. Scalars are
//! pairs of rationals a + b*z; sqrt(-3) is everywhere the element 2z - 1.
//!
//! On top of the scalars: 3x3 matrices, hermitian-form transforms,
//! projective (scalar-up-to) equality, and the integrality pattern cut out
//! by the lattice's hermitian form.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::words::{evaluate_word, Convention, GroupElement, Word};

/// a + b*z with a, b rational; z^2 = z - 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycScalar {
    pub a: BigRational,
    pub b: BigRational,
}

impl CycScalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        CycScalar { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        CycScalar {
            a: BigRational::from(BigInt::from(a)),
            b: BigRational::from(BigInt::from(b)),
        }
    }

    pub fn zero() -> Self {
        CycScalar::from_ints(0, 0)
    }

    pub fn one() -> Self {
        CycScalar::from_ints(1, 0)
    }

    pub fn zeta() -> Self {
        CycScalar::from_ints(0, 1)
    }

    /// sqrt(-3) = 2z - 1.
    pub fn sqrt_m3() -> Self {
        CycScalar::from_ints(-1, 2)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, r: &CycScalar) -> CycScalar {
        CycScalar::new(&self.a + &r.a, &self.b + &r.b)
    }

    pub fn sub(&self, r: &CycScalar) -> CycScalar {
        CycScalar::new(&self.a - &r.a, &self.b - &r.b)
    }

    pub fn neg(&self) -> CycScalar {
        CycScalar::new(-self.a.clone(), -self.b.clone())
    }

    /// (a + bz)(c + dz) = (ac - bd) + (ad + bc + bd) z, using z^2 = z - 1.
    pub fn mul(&self, r: &CycScalar) -> CycScalar {
        let ac = &self.a * &r.a;
        let bd = &self.b * &r.b;
        let ad = &self.a * &r.b;
        let bc = &self.b * &r.a;
        CycScalar::new(ac - &bd, ad + bc + bd)
    }

    /// Complex conjugate: z -> 1 - z, so a + bz -> (a + b) - bz.
    pub fn conj(&self) -> CycScalar {
        CycScalar::new(&self.a + &self.b, -self.b.clone())
    }

    /// Norm to Q: s * conj(s) = a^2 + ab + b^2, a nonnegative rational.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a + &self.a * &self.b + &self.b * &self.b
    }

    pub fn inv(&self) -> CycScalar {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in Q(z)");
        let c = self.conj();
        CycScalar::new(c.a / &n, c.b / &n)
    }

    pub fn div(&self, r: &CycScalar) -> CycScalar {
        self.mul(&r.inv())
    }

    /// Lies in Z[z].
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Lies in the ideal (sqrt(-3)) of Z[z].
    pub fn is_divisible_by_sqrt_m3(&self) -> bool {
        self.div(&CycScalar::sqrt_m3()).is_integral()
    }

    pub fn pow(&self, k: u32) -> CycScalar {
        let mut out = CycScalar::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// The twelve units of Z[z] are +-z^k; z generates them since -1 = z^3.
    pub fn is_unit(&self) -> bool {
        self.is_integral() && self.norm().is_one()
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            if self.b.is_one() {
                return write!(f, "z");
            }
            return write!(f, "{}*z", self.b);
        }
        if self.b.is_positive() {
            if self.b.is_one() {
                write!(f, "{}+z", self.a)
            } else {
                write!(f, "{}+{}*z", self.a, self.b)
            }
        } else if self.b == -BigRational::one() {
            write!(f, "{}-z", self.a)
        } else {
            write!(f, "{}{}*z", self.a, self.b)
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("bad Q(z) scalar `{0}`")]
pub struct ScalarParseError(String);

impl FromStr for CycScalar {
    type Err = ScalarParseError;

    /// Accepts sums of terms like `1`, `-2/3`, `z`, `-z`, `2*z`, `-1/3+2/3*z`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ScalarParseError(s.to_string()));
        }
        let err = || ScalarParseError(s.to_string());
        // split into signed terms
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, c) in compact.char_indices() {
            if (c == '+' || c == '-') && i > 0 && !compact[..i].ends_with('/') && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            if !(c == '+' && cur.is_empty() && i > 0) {
                cur.push(c);
            }
        }
        terms.push(cur);
        let mut out = CycScalar::zero();
        for t in terms {
            let t = t.strip_prefix('+').unwrap_or(&t).to_string();
            let (is_z, coeff_str) = if let Some(rest) = t.strip_suffix("*z") {
                (true, rest.to_string())
            } else if let Some(rest) = t.strip_suffix('z') {
                (
                    true,
                    if rest.is_empty() || rest == "-" {
                        format!("{rest}1")
                    } else {
                        rest.to_string()
                    },
                )
            } else {
                (false, t.clone())
            };
            let coeff = parse_rational(&coeff_str).ok_or_else(err)?;
            if is_z {
                out = out.add(&CycScalar::new(BigRational::zero(), coeff));
            } else {
                out = out.add(&CycScalar::new(coeff, BigRational::zero()));
            }
        }
        Ok(out)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from(n))
    }
}

/// 3x3 matrix over Q(z).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycMat3 {
    pub m: [[CycScalar; 3]; 3],
}

impl CycMat3 {
    pub fn identity() -> Self {
        let z = CycScalar::zero;
        let o = CycScalar::one;
        CycMat3 {
            m: [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]],
        }
    }

    pub fn from_rows(m: [[CycScalar; 3]; 3]) -> Self {
        CycMat3 { m }
    }

    /// Antidiagonal hermitian form diag-flip of signature (2,1).
    pub fn h0() -> Self {
        let z = CycScalar::zero;
        let o = CycScalar::one;
        CycMat3 {
            m: [[z(), z(), o()], [z(), o(), z()], [o(), z(), z()]],
        }
    }

    pub fn mul(&self, r: &CycMat3) -> CycMat3 {
        let mut out = CycMat3 {
            m: std::array::from_fn(|_| std::array::from_fn(|_| CycScalar::zero())),
        };
        for i in 0..3 {
            for k in 0..3 {
                if self.m[i][k].is_zero() {
                    continue;
                }
                for j in 0..3 {
                    let add = self.m[i][k].mul(&r.m[k][j]);
                    out.m[i][j] = out.m[i][j].add(&add);
                }
            }
        }
        out
    }

    pub fn scalar_mul(&self, s: &CycScalar) -> CycMat3 {
        CycMat3 {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].mul(s))),
        }
    }

    pub fn det(&self) -> CycScalar {
        let m = &self.m;
        let t1 = m[0][0].mul(&m[1][1].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][1])));
        let t2 = m[0][1].mul(&m[1][0].mul(&m[2][2]).sub(&m[1][2].mul(&m[2][0])));
        let t3 = m[0][2].mul(&m[1][0].mul(&m[2][1]).sub(&m[1][1].mul(&m[2][0])));
        t1.sub(&t2).add(&t3)
    }

    pub fn adjugate(&self) -> CycMat3 {
        let m = &self.m;
        // 2x2 minor with rows {r1, r2} and columns {c1, c2}
        let mi = |r1: usize, r2: usize, c1: usize, c2: usize| {
            m[r1][c1].mul(&m[r2][c2]).sub(&m[r1][c2].mul(&m[r2][c1]))
        };
        CycMat3 {
            m: [
                [mi(1, 2, 1, 2), mi(0, 2, 1, 2).neg(), mi(0, 1, 1, 2)],
                [mi(1, 2, 0, 2).neg(), mi(0, 2, 0, 2), mi(0, 1, 0, 2).neg()],
                [mi(1, 2, 0, 1), mi(0, 2, 0, 1).neg(), mi(0, 1, 0, 1)],
            ],
        }
    }

    pub fn inverse(&self) -> CycMat3 {
        let d = self.det();
        assert!(!d.is_zero(), "singular matrix over Q(z)");
        self.adjugate().scalar_mul(&d.inv())
    }

    /// Conjugate transpose.
    pub fn star(&self) -> CycMat3 {
        CycMat3 {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[j][i].conj())),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.star() == *self
    }

    pub fn is_identity(&self) -> bool {
        *self == CycMat3::identity()
    }

    /// Returns s with self = s * I, if scalar.
    pub fn as_scalar(&self) -> Option<CycScalar> {
        let s = self.m[0][0].clone();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.clone() } else { CycScalar::zero() };
                if self.m[i][j] != want {
                    return None;
                }
            }
        }
        Some(s)
    }
}

impl GroupElement for CycMat3 {
    fn mul(&self, rhs: &Self) -> Self {
        CycMat3::mul(self, rhs)
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
}

impl fmt::Debug for CycMat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CycMat3[")?;
        for row in &self.m {
            writeln!(f, "  [{}, {}, {}]", row[0], row[1], row[2])?;
        }
        write!(f, "]")
    }
}

/// m* . h . m, the pullback of a hermitian form.
pub fn hermitian_transform(m: &CycMat3, h: &CycMat3) -> CycMat3 {
    assert!(h.is_hermitian(), "form must be hermitian");
    m.star().mul(h).mul(m)
}

/// If m* h m = lambda h, the (necessarily rational-positive) scalar lambda.
pub fn unitarity_scalar(m: &CycMat3, h: &CycMat3) -> Option<CycScalar> {
    let t = hermitian_transform(m, h);
    // t = lambda * h: find a nonzero h entry and compare
    for i in 0..3 {
        for j in 0..3 {
            if !h.m[i][j].is_zero() {
                let lambda = t.m[i][j].div(&h.m[i][j]);
                return if t == h.scalar_mul(&lambda) {
                    Some(lambda)
                } else {
                    None
                };
            }
        }
    }
    None
}

/// Projective equality: m = s * k for a scalar s; returns the witness.
pub fn projective_equal(m: &CycMat3, k: &CycMat3) -> Option<CycScalar> {
    m.mul(&k.inverse()).as_scalar().filter(|s| !s.is_zero())
}

/// Per-relator projective triviality report.
#[derive(Clone, Debug)]
pub struct ProjectiveCheck {
    pub relator_index: usize,
    pub pass: bool,
    pub scalar: Option<CycScalar>,
}

pub fn verify_projective_relations(
    assign: &[CycMat3],
    relators: &[Word],
    convention: Convention,
) -> Vec<ProjectiveCheck> {
    relators
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let v = evaluate_word(r, assign, &CycMat3::identity(), convention)
                .expect("assignment covers generators");
            let scalar = v.as_scalar();
            ProjectiveCheck {
                relator_index: i,
                pass: scalar.is_some(),
                scalar,
            }
        })
        .collect()
}

/// The integrality pattern cut out by the form: entries (1,1), (1,2), (2,2),
/// (2,3), (3,3) in Z[z]; (2,1), (3,1), (3,2) divisible by sqrt(-3); and
/// (1,3) in (1/sqrt(-3)) Z[z]. Closed under products and unit scaling.
pub fn check_integral_form(m: &CycMat3) -> bool {
    let s3 = CycScalar::sqrt_m3();
    let ok_plain = |e: &CycScalar| e.is_integral();
    let ok_div = |e: &CycScalar| e.is_divisible_by_sqrt_m3();
    let ok_inv = |e: &CycScalar| e.mul(&s3).is_integral();
    ok_plain(&m.m[0][0])
        && ok_plain(&m.m[0][1])
        && ok_inv(&m.m[0][2])
        && ok_div(&m.m[1][0])
        && ok_plain(&m.m[1][1])
        && ok_plain(&m.m[1][2])
        && ok_div(&m.m[2][0])
        && ok_div(&m.m[2][1])
        && ok_plain(&m.m[2][2])
}

/// The pattern up to one of the twelve unit scalars +-z^k.
pub fn check_integral_form_up_to_unit(m: &CycMat3) -> bool {
    let mut u = CycScalar::one();
    for _ in 0..6 {
        if check_integral_form(&m.scalar_mul(&u)) {
            return true;
        }
        u = u.mul(&CycScalar::zeta());
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_identities() {
        let z = CycScalar::zeta();
        // z^2 = z - 1
        assert_eq!(z.mul(&z), CycScalar::from_ints(-1, 1));
        // z^6 = 1 and z^3 = -1
        assert_eq!(z.pow(6), CycScalar::one());
        assert_eq!(z.pow(3), CycScalar::from_ints(-1, 0));
        // sqrt(-3)^2 = -3
        let s3 = CycScalar::sqrt_m3();
        assert_eq!(s3.mul(&s3), CycScalar::from_ints(-3, 0));
        // conjugation is an involution and fixes rationals
        assert_eq!(z.conj().conj(), z);
        assert_eq!(
            CycScalar::from_ints(7, 0).conj(),
            CycScalar::from_ints(7, 0)
        );
        // norm multiplicative on a couple of samples
        let a = CycScalar::from_ints(3, -2);
        let b = CycScalar::from_ints(-1, 5);
        assert_eq!(a.mul(&b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn field_inverse() {
        let a = CycScalar::from_ints(2, 3);
        assert_eq!(a.mul(&a.inv()), CycScalar::one());
    }

    #[test]
    fn scalar_parser_round_trip() {
        for s in [
            "0",
            "1",
            "-1",
            "2/3",
            "z",
            "-z",
            "1-z",
            "-1+2*z",
            "-1/3+2/3*z",
            "5/7-11/3*z",
        ] {
            let v: CycScalar = s.parse().unwrap();
            let printed = v.to_string();
            let v2: CycScalar = printed.parse().unwrap();
            assert_eq!(v, v2, "{s} -> {printed}");
        }
        assert_eq!(
            "1-z".parse::<CycScalar>().unwrap(),
            CycScalar::from_ints(1, -1)
        );
        assert!("q".parse::<CycScalar>().is_err());
    }

    #[test]
    fn matrix_inverse_and_projective() {
        let z = CycScalar::zeta();
        let mut m = CycMat3::identity();
        m.m[0][1] = z.clone();
        m.m[1][2] = CycScalar::sqrt_m3();
        assert!(m.mul(&m.inverse()).is_identity());
        // m ~ z*m projectively with witness z
        let zm = m.scalar_mul(&z);
        assert_eq!(projective_equal(&zm, &m), Some(z));
        assert_eq!(projective_equal(&m, &m), Some(CycScalar::one()));
    }

    #[test]
    fn integral_form_pattern() {
        assert!(check_integral_form(&CycMat3::identity()));
        let mut bad = CycMat3::identity();
        bad.m[1][1] = "1/2".parse().unwrap();
        assert!(!check_integral_form(&bad));
        // (1,3) may have a sqrt(-3) denominator
        let mut ok = CycMat3::identity();
        ok.m[0][2] = CycScalar::one().div(&CycScalar::sqrt_m3());
        assert!(check_integral_form(&ok));
        // but not elsewhere
        let mut bad2 = CycMat3::identity();
        bad2.m[1][2] = CycScalar::one().div(&CycScalar::sqrt_m3());
        assert!(!check_integral_form(&bad2));
    }
}
