//! Generic finite-group machinery over any hashable [`GroupElement`]:
//! breadth-first closure enumeration, centers, derived subgroups, element
//! orders, and invariants of finite abelian quotients.
//!
//! Element numbering is breadth-first from the identity in generator order,
//! so every consumer sees the same deterministic indexing.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use thiserror::Error;

use crate::abelian::{snf_invariants_of_rows, AbelianInvariants};
use crate::words::GroupElement;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClosureError {
    #[error("closure exceeded cap of {0} elements")]
    CapExceeded(usize),
}

/// An enumerated finite group: elements in BFS order, identity first.
#[derive(Clone, Debug)]
pub struct FiniteGroup<G> {
    pub elements: Vec<G>,
    pub index: HashMap<G, usize>,
    pub generators: Vec<G>,
}

impl<G: GroupElement + Eq + Hash> FiniteGroup<G> {
    /// Enumerate the closure of `gens` under multiplication.
    ///
    /// For finite targets, right-multiplying frontier elements by generators
    /// and their inverses reaches everything.
    pub fn close(gens: &[G], identity: &G, cap: usize) -> Result<Self, ClosureError> {
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::new();
        index.insert(identity.clone(), 0usize);
        let mut mult: Vec<G> = Vec::new();
        for g in gens {
            mult.push(g.clone());
            mult.push(g.inv());
        }
        let mut head = 0;
        while head < elements.len() {
            let cur = elements[head].clone();
            head += 1;
            for m in &mult {
                let next = cur.mul(m);
                if !index.contains_key(&next) {
                    if elements.len() >= cap {
                        return Err(ClosureError::CapExceeded(cap));
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
        }
        Ok(FiniteGroup {
            elements,
            index,
            generators: gens.to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn id(&self) -> &G {
        &self.elements[0]
    }

    pub fn contains(&self, g: &G) -> bool {
        self.index.contains_key(g)
    }

    /// Elements commuting with every generator (= with everything).
    pub fn center(&self) -> Vec<G> {
        self.elements
            .iter()
            .filter(|z| self.generators.iter().all(|g| z.mul(g) == g.mul(z)))
            .cloned()
            .collect()
    }

    /// Derived subgroup: closure of generator commutators under conjugation
    /// by generators and multiplication.
    pub fn derived_subgroup(&self) -> Result<FiniteGroup<G>, ClosureError> {
        let mut seed: Vec<G> = Vec::new();
        for a in &self.generators {
            for b in &self.generators {
                let c = a.inv().mul(&b.inv()).mul(a).mul(b);
                if !seed.contains(&c) {
                    seed.push(c);
                }
            }
        }
        // normal closure: saturate the generating set under conjugation
        let mut gens = seed;
        loop {
            let sub = FiniteGroup::close(&gens, self.id(), self.order() + 1)?;
            let mut grew = false;
            for x in &sub.elements {
                for g in &self.generators {
                    let conj = g.inv().mul(x).mul(g);
                    if !sub.contains(&conj) {
                        gens.push(conj);
                        grew = true;
                    }
                }
            }
            if !grew {
                return Ok(sub);
            }
        }
    }

    pub fn element_order(&self, g: &G) -> usize {
        let mut x = g.clone();
        let mut k = 1;
        while x != self.elements[0] {
            x = x.mul(g);
            k += 1;
            assert!(k <= self.order(), "element order exceeds group order");
        }
        k
    }

    pub fn order_histogram(&self) -> HashMap<usize, usize> {
        let mut h = HashMap::new();
        for g in &self.elements {
            *h.entry(self.element_order(g)).or_insert(0) += 1;
        }
        h
    }

    pub fn exponent(&self) -> usize {
        self.elements
            .iter()
            .map(|g| self.element_order(g))
            .fold(1, num_integer::lcm)
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[..i].iter().all(|b| a.mul(b) == b.mul(a)))
    }

    /// Abelianization invariants, computed from the generator images in
    /// `G/G'`: the relation lattice of the images inside Z^k contains
    /// exp * Z^k, so it is enumerable once the exponent is known.
    pub fn abelianization(&self) -> Result<AbelianInvariants, ClosureError> {
        let derived = self.derived_subgroup()?;
        let quo = QuotientGroup::new(self, &derived);
        quo.abelian_invariants()
    }
}

/// The quotient of a finite group by a normal subgroup, with cosets keyed by
/// their minimal member index.
pub struct QuotientGroup<'a, G> {
    pub group: &'a FiniteGroup<G>,
    /// coset id of each group element
    pub coset_of: Vec<usize>,
    /// representative element index per coset
    pub reps: Vec<usize>,
}

impl<'a, G: GroupElement + Eq + Hash> QuotientGroup<'a, G> {
    pub fn new(group: &'a FiniteGroup<G>, normal: &FiniteGroup<G>) -> Self {
        let n = group.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for i in 0..n {
            if coset_of[i] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(i);
            for h in &normal.elements {
                let m = group.elements[i].mul(h);
                let j = group.index[&m];
                debug_assert!(coset_of[j] == usize::MAX || coset_of[j] == id);
                coset_of[j] = id;
            }
        }
        QuotientGroup {
            group,
            coset_of,
            reps,
        }
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let m = self.group.elements[self.reps[a]].mul(&self.group.elements[self.reps[b]]);
        self.coset_of[self.group.index[&m]]
    }

    pub fn coset_of_element(&self, g: &G) -> usize {
        self.coset_of[self.group.index[g]]
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        let mut acc = self.coset_of[0];
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let id = self.coset_of[0];
        let mut x = a;
        let mut k = 1;
        while x != id {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let k = self.order();
        (0..k).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Invariants of an abelian quotient, from the relation lattice of the
    /// generator images: vectors `v` in `{0..e-1}^k` with trivial product,
    /// together with `e * Z^k`, generate the full relation lattice (e = the
    /// quotient exponent).
    pub fn abelian_invariants(&self) -> Result<AbelianInvariants, ClosureError> {
        assert!(
            self.is_abelian(),
            "abelian_invariants on a nonabelian quotient"
        );
        let gens: Vec<usize> = self
            .group
            .generators
            .iter()
            .map(|g| self.coset_of_element(g))
            .collect();
        let k = gens.len();
        let e = {
            let mut e = 1usize;
            for &g in &gens {
                e = num_integer::lcm(e, self.element_order(g));
            }
            e
        };
        let id = self.coset_of[0];
        // enumerate exponent vectors in {0..e-1}^k with trivial product
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        let mut v = vec![0usize; k];
        loop {
            let mut acc = id;
            for (i, &vi) in v.iter().enumerate() {
                for _ in 0..vi {
                    acc = self.mul(acc, gens[i]);
                }
            }
            if acc == id && v.iter().any(|&x| x != 0) {
                rows.push(v.iter().map(|&x| BigInt::from(x)).collect());
            }
            // increment
            let mut i = 0;
            loop {
                if i == k {
                    let diag_rows: Vec<Vec<BigInt>> = (0..k)
                        .map(|j| {
                            (0..k)
                                .map(|l| BigInt::from(if l == j { e as i64 } else { 0 }))
                                .collect()
                        })
                        .collect();
                    rows.extend(diag_rows);
                    return Ok(AbelianInvariants::from_invariant_factors(
                        snf_invariants_of_rows(&rows, k),
                        k,
                    ));
                }
                v[i] += 1;
                if v[i] < e {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }
}
