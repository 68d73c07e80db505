//! Todd-Coxeter coset enumeration and complete coset tables.
//!
//! Two strategies: HLT with periodic lookahead (default) and Felsch.
//! Completed tables are standardized (breadth-first renumbering from the
//! base coset in generator order), so the two strategies produce literally
//! equal tables whenever they both terminate.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::hash::Hash;

use thiserror::Error;

use crate::group::FiniteGroup;
use crate::perm::Perm;
use crate::words::{GroupElement, Letter, Presentation, Word};

const UNDEF: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Relator-driven scanning with periodic lookahead and compaction.
    Hlt,
    /// Definition-driven with exhaustive deduction processing.
    Felsch,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    /// Cap on live cosets (checked after compaction).
    pub max_cosets: usize,
    /// Cap on total coset definitions over the whole run.
    pub max_steps: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_cosets: 1_000_000,
            max_steps: 400_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum CosetError {
    #[error("resource limit exceeded: {0} (not a mathematical failure)")]
    ResourceLimit(String),
    #[error("coset table is incomplete")]
    Incomplete,
    #[error("generator assignment does not produce the expected group: {0}")]
    BadQuotient(String),
}

/// A complete coset table: the transitive right action of the generators on
/// the cosets of a subgroup, with the subgroup's defining words attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    ngens: usize,
    ncosets: usize,
    /// row-major; column `2*g` is generator `g`, column `2*g + 1` its inverse
    rows: Vec<u32>,
    /// base coset (the subgroup itself); 0 after standardization
    pub base: usize,
    pub subgroup_words: Vec<Word>,
}

impl CosetTable {
    pub fn ngens(&self) -> usize {
        self.ngens
    }

    /// The index of the subgroup.
    pub fn index(&self) -> usize {
        self.ncosets
    }

    #[inline]
    fn col(l: Letter) -> usize {
        2 * l.gen + usize::from(l.inverse)
    }

    #[inline]
    pub fn apply(&self, coset: usize, l: Letter) -> usize {
        self.rows[coset * 2 * self.ngens + Self::col(l)] as usize
    }

    pub fn trace(&self, start: usize, w: &Word) -> usize {
        w.letters().iter().fold(start, |c, &l| self.apply(c, l))
    }

    /// True iff the word lies in the subgroup (traces base to base).
    pub fn membership(&self, w: &Word) -> bool {
        self.trace(self.base, w) == self.base
    }

    /// Permutation images of the generators acting on cosets.
    pub fn perm_rep(&self) -> Vec<Perm> {
        (0..self.ngens)
            .map(|g| {
                Perm::from_images(
                    (0..self.ncosets)
                        .map(|c| self.apply(c, Letter::new(g, false)) as u32)
                        .collect(),
                )
            })
            .collect()
    }

    /// The subgroup is normal iff its defining words fix every coset
    /// (equivalently, the permutation image has order equal to the index).
    pub fn is_normal(&self) -> bool {
        self.subgroup_words
            .iter()
            .all(|w| (0..self.ncosets).all(|c| self.trace(c, w) == c))
    }

    /// Order of the permutation image of the group on the cosets.
    pub fn perm_image_order(&self, cap: usize) -> Result<usize, CosetError> {
        let perms = self.perm_rep();
        FiniteGroup::close(&perms, &Perm::identity(self.ncosets), cap)
            .map(|g| g.order())
            .map_err(|e| CosetError::ResourceLimit(e.to_string()))
    }

    /// Verify the full table contract against a presentation: completeness,
    /// mutually inverse generator columns, all relators closing at every
    /// coset, and all subgroup words fixing base.
    pub fn validate(&self, p: &Presentation) -> Result<(), String> {
        if self.ngens != p.ngens() {
            return Err("generator count mismatch".into());
        }
        for c in 0..self.ncosets {
            for col in 0..2 * self.ngens {
                let d = self.rows[c * 2 * self.ngens + col] as usize;
                if d >= self.ncosets {
                    return Err(format!("entry out of range at coset {c}"));
                }
                if self.rows[d * 2 * self.ngens + (col ^ 1)] as usize != c {
                    return Err(format!(
                        "columns for generator {} not mutually inverse",
                        col / 2
                    ));
                }
            }
        }
        for (ri, r) in p.relators.iter().enumerate() {
            for c in 0..self.ncosets {
                if self.trace(c, r) != c {
                    return Err(format!("relator {ri} does not close at coset {c}"));
                }
            }
        }
        for (wi, w) in self.subgroup_words.iter().enumerate() {
            if !self.membership(w) {
                return Err(format!("subgroup word {wi} does not fix base"));
            }
        }
        Ok(())
    }

    /// Breadth-first renumbering from base in generator order; the result is
    /// the canonical form used to compare enumerations across strategies.
    pub fn standardize(&self) -> CosetTable {
        let n = self.ncosets;
        let mut new_of_old = vec![UNDEF; n];
        let mut old_of_new = Vec::with_capacity(n);
        new_of_old[self.base] = 0;
        old_of_new.push(self.base);
        let mut head = 0;
        while head < old_of_new.len() {
            let c = old_of_new[head];
            head += 1;
            for col in 0..2 * self.ngens {
                let d = self.rows[c * 2 * self.ngens + col] as usize;
                if new_of_old[d] == UNDEF {
                    new_of_old[d] = old_of_new.len() as u32;
                    old_of_new.push(d);
                }
            }
        }
        assert_eq!(old_of_new.len(), n, "table not transitive");
        let mut rows = vec![UNDEF; n * 2 * self.ngens];
        for (new_c, &old_c) in old_of_new.iter().enumerate() {
            for col in 0..2 * self.ngens {
                let old_d = self.rows[old_c * 2 * self.ngens + col] as usize;
                rows[new_c * 2 * self.ngens + col] = new_of_old[old_d];
            }
        }
        CosetTable {
            ngens: self.ngens,
            ncosets: n,
            rows,
            base: 0,
            subgroup_words: self.subgroup_words.clone(),
        }
    }

    /// One line per coset: `cosetid: g1 g1' g2 g2' ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in 0..self.ncosets {
            let _ = write!(out, "{c}:");
            for col in 0..2 * self.ngens {
                let _ = write!(out, " {}", self.rows[c * 2 * self.ngens + col]);
            }
            out.push('\n');
        }
        out
    }
}

/// Build the coset table of the kernel of a map onto a finite group: cosets
/// are the closure elements (breadth-first from the identity), generators
/// act by right multiplication, base is the identity.
pub fn table_from_finite_quotient<G: GroupElement + Eq + Hash>(
    gens: &[G],
    identity: &G,
    cap: usize,
    expected_order: Option<usize>,
) -> Result<(CosetTable, FiniteGroup<G>), CosetError> {
    let group = FiniteGroup::close(gens, identity, cap)
        .map_err(|e| CosetError::ResourceLimit(e.to_string()))?;
    if let Some(exp) = expected_order {
        if group.order() != exp {
            return Err(CosetError::BadQuotient(format!(
                "closure has order {}, expected {}",
                group.order(),
                exp
            )));
        }
    }
    let n = group.order();
    let ngens = gens.len();
    let mut rows = vec![UNDEF; n * 2 * ngens];
    for (c, elt) in group.elements.iter().enumerate() {
        for (g, img) in gens.iter().enumerate() {
            let d = group.index[&elt.mul(img)];
            let e = group.index[&elt.mul(&img.inv())];
            rows[c * 2 * ngens + 2 * g] = d as u32;
            rows[c * 2 * ngens + 2 * g + 1] = e as u32;
        }
    }
    let table = CosetTable {
        ngens,
        ncosets: n,
        rows,
        base: 0,
        subgroup_words: Vec::new(),
    };
    Ok((table.standardize(), group))
}

/// Enumerate the cosets of `<subgens>` in the group presented by `p`.
pub fn coset_enumerate(
    p: &Presentation,
    subgens: &[Word],
    limits: EnumerationLimits,
    strategy: Strategy,
) -> Result<CosetTable, CosetError> {
    let mut e = Enumerator::new(p, subgens, limits);
    match strategy {
        Strategy::Hlt => e.run_hlt()?,
        Strategy::Felsch => e.run_felsch()?,
    }
    let table = e.into_table()?;
    debug_assert!(table.validate(p).is_ok());
    Ok(table.standardize())
}

struct Enumerator {
    ngens: usize,
    width: usize,
    relators: Vec<Vec<usize>>, // as column sequences
    subgens: Vec<Vec<usize>>,
    subgroup_words: Vec<Word>,
    limits: EnumerationLimits,
    tab: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    defined_total: usize,
    dead_queue: VecDeque<u32>,
    deductions: Vec<(u32, usize)>,
    /// cyclic relator variants grouped by leading column (Felsch)
    variants: Vec<Vec<Vec<usize>>>,
}

fn word_cols(w: &Word) -> Vec<usize> {
    w.letters()
        .iter()
        .map(|&l| 2 * l.gen + usize::from(l.inverse))
        .collect()
}

impl Enumerator {
    fn new(p: &Presentation, subgens: &[Word], limits: EnumerationLimits) -> Self {
        let ngens = p.ngens();
        let relators: Vec<Vec<usize>> = p
            .relators
            .iter()
            .map(|r| word_cols(&r.cyclic_reduce()))
            .filter(|r| !r.is_empty())
            .collect();
        let mut variants: Vec<Vec<Vec<usize>>> = vec![Vec::new(); 2 * ngens];
        let mut seen: std::collections::HashSet<Vec<usize>> = Default::default();
        for r in &relators {
            for base in [r.clone(), invert_cols(r)] {
                for k in 0..base.len() {
                    let rot: Vec<usize> =
                        base[k..].iter().chain(base[..k].iter()).copied().collect();
                    if seen.insert(rot.clone()) {
                        variants[rot[0]].push(rot);
                    }
                }
            }
        }
        let mut e = Enumerator {
            ngens,
            width: 2 * ngens,
            relators,
            subgens: subgens.iter().map(word_cols).collect(),
            subgroup_words: subgens.to_vec(),
            limits,
            tab: Vec::new(),
            parent: Vec::new(),
            live: 0,
            defined_total: 0,
            dead_queue: VecDeque::new(),
            deductions: Vec::new(),
            variants,
        };
        e.new_coset().unwrap();
        e
    }

    fn new_coset(&mut self) -> Result<u32, CosetError> {
        if self.defined_total >= self.limits.max_steps {
            return Err(CosetError::ResourceLimit(format!(
                "definition count exceeded {}",
                self.limits.max_steps
            )));
        }
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.tab.extend(std::iter::repeat(UNDEF).take(self.width));
        self.live += 1;
        self.defined_total += 1;
        Ok(id)
    }

    #[inline]
    fn rep(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let g = self.parent[self.parent[c as usize] as usize];
            self.parent[c as usize] = g;
            c = g;
        }
        c
    }

    #[inline]
    fn entry(&self, c: u32, col: usize) -> u32 {
        self.tab[c as usize * self.width + col]
    }

    fn set_entry(&mut self, c: u32, col: usize, d: u32) {
        self.tab[c as usize * self.width + col] = d;
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (keep, die) = if a < b { (a, b) } else { (b, a) };
        self.parent[die as usize] = keep;
        self.live -= 1;
        self.dead_queue.push_back(die);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(dead) = self.dead_queue.pop_front() {
            for col in 0..self.width {
                let d = self.entry(dead, col);
                if d == UNDEF {
                    continue;
                }
                // remove the mirror entry before re-filing
                if self.entry(d, col ^ 1) == dead {
                    self.set_entry(d, col ^ 1, UNDEF);
                }
                let mu = self.rep(dead);
                let nu = self.rep(d);
                let existing = self.entry(mu, col);
                if existing != UNDEF {
                    self.merge(nu, existing);
                } else {
                    let back = self.entry(nu, col ^ 1);
                    if back != UNDEF {
                        self.merge(mu, back);
                    } else {
                        self.set_entry(mu, col, nu);
                        self.set_entry(nu, col ^ 1, mu);
                        self.deductions.push((mu, col));
                    }
                }
            }
            let base = dead as usize * self.width;
            for col in 0..self.width {
                self.tab[base + col] = UNDEF;
            }
        }
    }

    /// Scan `word` at `start`; `fill` permits defining new cosets.
    fn scan(&mut self, start: u32, word: &[usize], fill: bool) -> Result<(), CosetError> {
        loop {
            let start = self.rep(start);
            let n = word.len();
            let mut f = start;
            let mut i = 0;
            while i < n {
                let t = self.entry(f, word[i]);
                if t == UNDEF {
                    break;
                }
                f = self.rep(t);
                i += 1;
            }
            if i == n {
                if f != start {
                    self.coincidence(f, start);
                }
                return Ok(());
            }
            let mut b = start;
            let mut j = n;
            while j > i {
                let t = self.entry(b, word[j - 1] ^ 1);
                if t == UNDEF {
                    break;
                }
                b = self.rep(t);
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                // deduction closes the gap
                self.set_entry(f, word[i], b);
                self.set_entry(b, word[i] ^ 1, f);
                self.deductions.push((f, word[i]));
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            let nc = self.new_coset()?;
            self.set_entry(f, word[i], nc);
            self.set_entry(nc, word[i] ^ 1, f);
            self.deductions.push((f, word[i]));
        }
    }

    fn run_hlt(&mut self) -> Result<(), CosetError> {
        self.deductions.clear(); // HLT ignores the deduction stack
        let subgens = self.subgens.clone();
        for w in &subgens {
            self.scan(0, w, true)?;
            self.deductions.clear();
        }
        let relators = self.relators.clone();
        let mut cursor: u32 = 0;
        let mut lookahead_at = 65_536usize.min(self.limits.max_cosets.max(1024));
        loop {
            // next live coset at or after cursor
            while (cursor as usize) < self.parent.len() && !self.is_live(cursor) {
                cursor += 1;
            }
            if cursor as usize >= self.parent.len() {
                break;
            }
            for r in &relators {
                if !self.is_live(cursor) {
                    break;
                }
                self.scan(cursor, r, true)?;
                self.deductions.clear();
            }
            // fill any columns no relator touches, so the row closes
            if self.is_live(cursor) {
                for col in 0..self.width {
                    if self.is_live(cursor) && self.entry(cursor, col) == UNDEF {
                        let nc = self.new_coset()?;
                        self.set_entry(cursor, col, nc);
                        self.set_entry(nc, col ^ 1, cursor);
                    }
                }
            }
            cursor += 1;
            if self.parent.len() >= lookahead_at {
                let processed = cursor;
                let new_cursor = self.lookahead_and_compact(processed)?;
                cursor = new_cursor;
                if self.live > self.limits.max_cosets {
                    return Err(CosetError::ResourceLimit(format!(
                        "live cosets {} exceed max-cosets {}",
                        self.live, self.limits.max_cosets
                    )));
                }
                lookahead_at = (self.parent.len() * 2).max(65_536);
            }
        }
        Ok(())
    }

    /// Definition-free full passes over all live cosets until nothing changes
    /// (neither coincidences nor deduced entries), then compaction. Returns
    /// the new cursor position (first live coset not yet fully processed, in
    /// the renumbered table).
    fn lookahead_and_compact(&mut self, processed_upto: u32) -> Result<u32, CosetError> {
        let relators = self.relators.clone();
        loop {
            let live_before = self.live;
            let filled_before = self.tab.iter().filter(|&&e| e != UNDEF).count();
            for c in 0..self.parent.len() as u32 {
                if !self.is_live(c) {
                    continue;
                }
                for r in &relators {
                    if !self.is_live(c) {
                        break;
                    }
                    self.scan(c, r, false)?;
                    self.deductions.clear();
                }
            }
            let filled_after = self.tab.iter().filter(|&&e| e != UNDEF).count();
            if self.live == live_before && filled_after == filled_before {
                break;
            }
        }
        Ok(self.compact(processed_upto))
    }

    /// Renumber live cosets contiguously, preserving order. Returns the new
    /// index of the first live coset at or after `watermark`.
    fn compact(&mut self, watermark: u32) -> u32 {
        let n = self.parent.len();
        let mut new_of_old = vec![UNDEF; n];
        let mut next = 0u32;
        let mut new_watermark = None;
        for c in 0..n as u32 {
            if self.is_live(c) {
                new_of_old[c as usize] = next;
                if c >= watermark && new_watermark.is_none() {
                    new_watermark = Some(next);
                }
                next += 1;
            }
        }
        let live = next as usize;
        let mut tab = vec![UNDEF; live * self.width];
        for c in 0..n {
            let nc = new_of_old[c];
            if nc == UNDEF {
                continue;
            }
            for col in 0..self.width {
                let d = self.tab[c * self.width + col];
                if d != UNDEF {
                    let dl = {
                        // entries always point at live cosets after scans, but
                        // be defensive and chase representatives
                        let mut x = d;
                        while self.parent[x as usize] != x {
                            x = self.parent[x as usize];
                        }
                        x
                    };
                    tab[nc as usize * self.width + col] = new_of_old[dl as usize];
                }
            }
        }
        self.tab = tab;
        self.parent = (0..live as u32).collect();
        self.live = live;
        self.dead_queue.clear();
        new_watermark.unwrap_or(live as u32)
    }

    fn run_felsch(&mut self) -> Result<(), CosetError> {
        let subgens = self.subgens.clone();
        for w in &subgens {
            self.scan(0, w, true)?;
            self.process_deductions()?;
        }
        // live rows only ever gain entries, so a cursor over (coset, column)
        // pairs never needs to back up (except across compactions)
        let mut cursor: u64 = 0;
        let mut lookahead_at = 65_536usize.max(self.limits.max_cosets / 16).min(1 << 20);
        loop {
            let mut found = None;
            while (cursor as usize) < self.parent.len() * self.width {
                let c = (cursor as usize / self.width) as u32;
                let col = cursor as usize % self.width;
                if self.is_live(c) && self.entry(c, col) == UNDEF {
                    found = Some((c, col));
                    break;
                }
                cursor += 1;
            }
            let Some((c, col)) = found else { break };
            if self.parent.len() >= lookahead_at {
                // a definition-free sweep often collapses a blown-up table
                self.deductions.clear();
                let watermark = self.compact((cursor / self.width as u64) as u32);
                let new_cursor = self.lookahead_and_compact(watermark)?;
                cursor = u64::from(new_cursor) * self.width as u64;
                if self.live > self.limits.max_cosets {
                    return Err(CosetError::ResourceLimit(format!(
                        "live cosets {} exceed max-cosets {}",
                        self.live, self.limits.max_cosets
                    )));
                }
                lookahead_at = (self.parent.len() * 2).max(65_536);
                continue;
            }
            if self.live > self.limits.max_cosets {
                return Err(CosetError::ResourceLimit(format!(
                    "live cosets {} exceed max-cosets {}",
                    self.live, self.limits.max_cosets
                )));
            }
            let nc = self.new_coset()?;
            self.set_entry(c, col, nc);
            self.set_entry(nc, col ^ 1, c);
            self.deductions.push((c, col));
            self.process_deductions()?;
        }
        Ok(())
    }

    fn process_deductions(&mut self) -> Result<(), CosetError> {
        while let Some((c, col)) = self.deductions.pop() {
            if !self.is_live(c) {
                // the deduction may have been made before the coset died
                continue;
            }
            let variants = std::mem::take(&mut self.variants);
            for v in &variants[col] {
                let c = self.rep(c);
                self.scan(c, v, false)?;
            }
            // also scan variants at the target coset through the inverse edge
            let cr = self.rep(c);
            let d = self.entry(cr, col);
            if d != UNDEF {
                for v in &variants[col ^ 1] {
                    let d = self.rep(d);
                    self.scan(d, v, false)?;
                }
            }
            self.variants = variants;
        }
        Ok(())
    }

    fn into_table(mut self) -> Result<CosetTable, CosetError> {
        self.compact(0);
        let n = self.live;
        for c in 0..n {
            for col in 0..self.width {
                if self.tab[c * self.width + col] == UNDEF {
                    return Err(CosetError::Incomplete);
                }
            }
        }
        Ok(CosetTable {
            ngens: self.ngens,
            ncosets: n,
            rows: self.tab,
            base: 0,
            subgroup_words: self.subgroup_words,
        })
    }
}

fn invert_cols(r: &[usize]) -> Vec<usize> {
    r.iter().rev().map(|&c| c ^ 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_presentation;

    fn enumerate_both(p: &Presentation, subgens: &[Word]) -> CosetTable {
        let h = coset_enumerate(p, subgens, EnumerationLimits::default(), Strategy::Hlt).unwrap();
        let f =
            coset_enumerate(p, subgens, EnumerationLimits::default(), Strategy::Felsch).unwrap();
        assert_eq!(h, f, "HLT and Felsch disagree");
        h
    }

    #[test]
    fn free_group_index_two() {
        let p = Presentation::free(&["a"]);
        let t = enumerate_both(&p, &[Word::gen(0).pow(2)]);
        assert_eq!(t.index(), 2);
        assert!(t.membership(&Word::gen(0).pow(2)));
        assert!(!t.membership(&Word::gen(0)));
        assert!(t.is_normal()); // index 2
        let perms = t.perm_rep();
        assert_eq!(perms[0].cycle_type(), vec![2]);
    }

    #[test]
    fn trivial_subgroup_of_s3() {
        let p = parse_presentation("gens: a b\nrel: a a\nrel: b b b\nrel: a b a b\n").unwrap();
        let t = enumerate_both(&p, &[]);
        assert_eq!(t.index(), 6);
        t.validate(&p).unwrap();
        assert_eq!(t.perm_image_order(100).unwrap(), 6);
    }

    #[test]
    fn non_normal_index_three() {
        // S3 acting on cosets of <a> (order 2): index 3, image order 6
        let p = parse_presentation("gens: a b\nrel: a a\nrel: b b b\nrel: a b a b\n").unwrap();
        let t = enumerate_both(&p, &[Word::gen(0)]);
        assert_eq!(t.index(), 3);
        assert!(!t.is_normal());
        assert_eq!(t.perm_image_order(100).unwrap(), 6);
    }

    #[test]
    fn quotient_table_z3_squared() {
        // (Z/3)^2 as a finite quotient given by vectors under addition
        #[derive(Clone, PartialEq, Eq, Hash)]
        struct V([u8; 2]);
        impl GroupElement for V {
            fn mul(&self, r: &Self) -> Self {
                V([(self.0[0] + r.0[0]) % 3, (self.0[1] + r.0[1]) % 3])
            }
            fn inv(&self) -> Self {
                V([(3 - self.0[0]) % 3, (3 - self.0[1]) % 3])
            }
        }
        let (t, g) =
            table_from_finite_quotient(&[V([1, 0]), V([0, 1])], &V([0, 0]), 100, Some(9)).unwrap();
        assert_eq!(g.order(), 9);
        assert_eq!(t.index(), 9);
        assert!(t.is_normal()); // vacuous (no subgroup words) but table is regular
        assert_eq!(t.perm_image_order(100).unwrap(), 9);
    }

    #[test]
    fn dump_format() {
        let p = Presentation::free(&["a"]);
        let t = enumerate_both(&p, &[Word::gen(0).pow(2)]);
        let d = t.dump();
        assert_eq!(d.lines().count(), 2);
        assert!(d.starts_with("0: 1 1"));
    }

    #[test]
    fn resource_limit_is_distinguishable() {
        // free group of rank 2, trivial subgroup: infinite index
        let p = Presentation::free(&["a", "b"]);
        let limits = EnumerationLimits {
            max_cosets: 50,
            max_steps: 10_000,
        };
        let e = coset_enumerate(&p, &[], limits, Strategy::Felsch).unwrap_err();
        assert!(matches!(e, CosetError::ResourceLimit(_)));
    }
}
