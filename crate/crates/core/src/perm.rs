//! Permutations of `{0, .., n-1}` acting on the right: `i -> perm[i]`.

use std::fmt;

use crate::words::GroupElement;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    map: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            map: (0..n as u32).collect(),
        }
    }

    /// Build from images; must be a bijection.
    pub fn from_images(map: Vec<u32>) -> Self {
        let mut seen = vec![false; map.len()];
        for &i in &map {
            assert!(
                (i as usize) < map.len() && !seen[i as usize],
                "not a bijection"
            );
            seen[i as usize] = true;
        }
        Perm { map }
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Composition: `(a.compose(b)).apply(i) = b.apply(a.apply(i))`,
    /// i.e. `a` acts first. Matches right-action coset tables.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree());
        Perm {
            map: self.map.iter().map(|&i| other.map[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut map = vec![0u32; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j as usize] = i as u32;
        }
        Perm { map }
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.apply(j);
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable();
        cycles
    }
}

impl GroupElement for Perm {
    fn mul(&self, rhs: &Self) -> Self {
        self.compose(rhs)
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let a = Perm::from_images(vec![1, 2, 0]);
        let b = Perm::from_images(vec![0, 2, 1]);
        let ab = a.compose(&b);
        assert_eq!(ab.apply(0), b.apply(a.apply(0)));
        assert!(a.compose(&a.inverse()).is_identity());
        assert_eq!(a.order(), 3);
        assert_eq!(a.cycle_type(), vec![3]);
    }
}
