//! Exact 5x5 integer matrices, their reductions mod n, finite matrix-group
//! closures, and the order/normal-form facts specific to the representation
//! tau of the four-generator lattice.
//!
//! Integer entries are i128 with checked arithmetic: the unipotent words this
//! crate evaluates stay far below the overflow line, and any excursion is a
//! bug worth a loud panic rather than a silent wrap.

use std::fmt;

use crate::words::{evaluate_word, Convention, GroupElement, Presentation};

/// 5x5 integer matrix, row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat5 {
    pub m: [[i128; 5]; 5],
}

impl Mat5 {
    pub fn identity() -> Self {
        let mut m = [[0; 5]; 5];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        Mat5 { m }
    }

    pub fn from_rows(rows: [[i128; 5]; 5]) -> Self {
        Mat5 { m: rows }
    }

    pub fn mul(&self, rhs: &Mat5) -> Mat5 {
        let mut out = [[0i128; 5]; 5];
        for i in 0..5 {
            for k in 0..5 {
                let a = self.m[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..5 {
                    let b = rhs.m[k][j];
                    if b != 0 {
                        out[i][j] = out[i][j]
                            .checked_add(a.checked_mul(b).expect("matrix entry overflow"))
                            .expect("matrix entry overflow");
                    }
                }
            }
        }
        Mat5 { m: out }
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat5::identity()
    }

    /// True iff upper unitriangular (ones on the diagonal, zeros below).
    pub fn is_unipotent_upper(&self) -> bool {
        (0..5).all(|i| self.m[i][i] == 1 && (0..i).all(|j| self.m[i][j] == 0))
    }

    /// Inverse of a unipotent upper-triangular matrix via the finite
    /// Neumann series of the nilpotent part.
    pub fn inv_unipotent(&self) -> Mat5 {
        assert!(
            self.is_unipotent_upper(),
            "inverse implemented for unipotent matrices"
        );
        let id = Mat5::identity();
        let mut n = *self;
        for i in 0..5 {
            n.m[i][i] = 0;
        }
        // (I + N)^-1 = I - N + N^2 - N^3 + N^4
        let mut out = id;
        let mut term = id;
        let mut sign = 1i128;
        for _ in 0..4 {
            term = term.mul(&n);
            sign = -sign;
            for i in 0..5 {
                for j in 0..5 {
                    out.m[i][j] += sign * term.m[i][j];
                }
            }
        }
        out
    }

    pub fn pow(&self, k: i64) -> Mat5 {
        let base = if k >= 0 { *self } else { self.inv_unipotent() };
        let mut out = Mat5::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn reduce_mod(&self, n: u64) -> ModMat5 {
        let nn = n as i128;
        let mut m = [[0u64; 5]; 5];
        for i in 0..5 {
            for j in 0..5 {
                m[i][j] = self.m[i][j].rem_euclid(nn) as u64;
            }
        }
        ModMat5 { n, m }
    }
}

impl GroupElement for Mat5 {
    fn mul(&self, rhs: &Self) -> Self {
        Mat5::mul(self, rhs)
    }
    fn inv(&self) -> Self {
        self.inv_unipotent()
    }
}

impl fmt::Debug for Mat5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat5[")?;
        for row in &self.m {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// 5x5 matrix over Z/n.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModMat5 {
    pub n: u64,
    pub m: [[u64; 5]; 5],
}

impl ModMat5 {
    pub fn identity(n: u64) -> Self {
        assert!(n >= 2);
        let mut m = [[0; 5]; 5];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        ModMat5 { n, m }
    }

    pub fn mul(&self, rhs: &ModMat5) -> ModMat5 {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = [[0u64; 5]; 5];
        for i in 0..5 {
            for k in 0..5 {
                let a = self.m[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..5 {
                    out[i][j] = (out[i][j] + a * rhs.m[k][j]) % n;
                }
            }
        }
        ModMat5 { n, m: out }
    }

    pub fn is_identity(&self) -> bool {
        *self == ModMat5::identity(self.n)
    }

    pub fn is_unipotent_upper(&self) -> bool {
        (0..5).all(|i| self.m[i][i] == 1 && (0..i).all(|j| self.m[i][j] == 0))
    }

    /// Inverse of a unipotent matrix mod n ((I + N)^-1 via the Neumann series).
    pub fn inv_unipotent(&self) -> ModMat5 {
        assert!(
            self.is_unipotent_upper(),
            "inverse implemented for unipotent matrices"
        );
        let n = self.n;
        let mut nil = *self;
        for i in 0..5 {
            nil.m[i][i] = 0;
        }
        let mut out = ModMat5::identity(n);
        let mut term = ModMat5::identity(n);
        let mut sign_neg = false;
        for _ in 0..4 {
            term = term.mul(&nil);
            sign_neg = !sign_neg;
            for i in 0..5 {
                for j in 0..5 {
                    let v = if sign_neg {
                        (n - term.m[i][j] % n) % n
                    } else {
                        term.m[i][j]
                    };
                    out.m[i][j] = (out.m[i][j] + v) % n;
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u64) -> ModMat5 {
        let mut out = ModMat5::identity(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

impl GroupElement for ModMat5 {
    fn mul(&self, rhs: &Self) -> Self {
        ModMat5::mul(self, rhs)
    }
    fn inv(&self) -> Self {
        self.inv_unipotent()
    }
}

impl fmt::Debug for ModMat5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ModMat5(mod {})[", self.n)?;
        for row in &self.m {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Outcome of checking one relator under a generator assignment.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RelatorCheck {
    pub relator_index: usize,
    pub convention: Convention,
    pub pass: bool,
}

/// Check every relator of `p` under `assign`, per convention requested.
pub fn verify_relations<G: GroupElement>(
    assign: &[G],
    identity: &G,
    p: &Presentation,
    conventions: &[Convention],
) -> Vec<RelatorCheck> {
    let mut out = Vec::new();
    for (i, r) in p.relators.iter().enumerate() {
        for &cv in conventions {
            let v = evaluate_word(r, assign, identity, cv).expect("assignment covers generators");
            out.push(RelatorCheck {
                relator_index: i,
                convention: cv,
                pass: v == *identity,
            });
        }
    }
    out
}

/// Smallest k >= 1 with m^k = 1, or None past the cap.
pub fn element_order_mod_n(m: &ModMat5, cap: u64) -> Option<u64> {
    let mut x = *m;
    for k in 1..=cap {
        if x.is_identity() {
            return Some(k);
        }
        x = x.mul(m);
    }
    None
}

/// The closed-form m-th powers of tau(g_1..g_4). Index j is 1-based.
pub fn tau_g_power_closed_form(j: usize, m: i128) -> Mat5 {
    // the (1,5) polynomials all have even numerators
    let half = |x: i128| {
        debug_assert!(x % 2 == 0);
        x / 2
    };
    let rows = match j {
        1 => [
            [1, 2 * m, -m, 0, half(m * (5 * m - 1))],
            [0, 1, 0, 0, 2 * m],
            [0, 0, 1, 0, -m],
            [0, 0, 0, 1, -m],
            [0, 0, 0, 0, 1],
        ],
        2 => [
            [1, m, 0, m, half(m * (m - 3))],
            [0, 1, 0, 0, m],
            [0, 0, 1, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
        ],
        3 => [
            [1, m, -m, -m, m * (2 * m + 1)],
            [0, 1, 0, 0, m],
            [0, 0, 1, 0, -m],
            [0, 0, 0, 1, -2 * m],
            [0, 0, 0, 0, 1],
        ],
        4 => [
            [1, 0, -m, -m, half(m * (3 * m - 1))],
            [0, 1, 0, 0, m],
            [0, 0, 1, 0, -m],
            [0, 0, 0, 1, -2 * m],
            [0, 0, 0, 0, 1],
        ],
        _ => panic!("j must be 1..=4"),
    };
    Mat5::from_rows(rows)
}

/// True iff the iterated product tau(g_j)^m equals the printed closed form.
pub fn power_closed_form_check(tau_g: &[Mat5; 4], j: usize, m: i64) -> bool {
    tau_g[j - 1].pow(m) == tau_g_power_closed_form(j, m as i128)
}

/// The identity tau(w_j)^(n^2) = [tau(g_{2j-1})^n, tau(g_{2j})^n] over Z.
pub fn verify_eq_cusp_comm(w_j: &Mat5, g_odd: &Mat5, g_even: &Mat5, n: i64) -> bool {
    let lhs = w_j.pow(n * n);
    let a = g_odd.pow(n);
    let b = g_even.pow(n);
    let rhs = a.inv_unipotent().mul(&b.inv_unipotent()).mul(&a).mul(&b);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unipotent_inverse() {
        let mut m = Mat5::identity();
        m.m[0][1] = 3;
        m.m[1][4] = -2;
        m.m[0][4] = 7;
        let inv = m.inv_unipotent();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
        let mm = m.reduce_mod(5);
        assert!(mm.mul(&mm.inv_unipotent()).is_identity());
    }

    #[test]
    fn closed_form_at_zero_is_identity() {
        for j in 1..=4 {
            assert!(tau_g_power_closed_form(j, 0).is_identity());
        }
    }

    #[test]
    fn mod_matrix_order() {
        let mut w = Mat5::identity();
        w.m[0][4] = 1;
        let w3 = w.reduce_mod(3);
        assert_eq!(element_order_mod_n(&w3, 10), Some(3));
        assert_eq!(element_order_mod_n(&w.reduce_mod(7), 10), Some(7));
        assert_eq!(element_order_mod_n(&w.reduce_mod(7), 3), None);
    }
}
