//! Subgroup presentations and rewriting: Reidemeister-Schreier over a
//! complete coset table, Tietze simplification, and an augmented (tagged)
//! enumeration that rewrites subgroup elements as words in *given* subgroup
//! generators rather than Schreier generators.

use std::collections::VecDeque;

use thiserror::Error;

use crate::cosets::{CosetTable, EnumerationLimits};
use crate::words::{GenId, Letter, Presentation, Word};

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("word does not lie in the subgroup (trace ends at coset {0})")]
    NotInSubgroup(usize),
    #[error("enumeration failed: {0}")]
    Enumeration(#[from] crate::cosets::CosetError),
}

/// Schreier data over a complete coset table: a breadth-first minimal
/// transversal and the Schreier generators on non-tree (coset, generator)
/// pairs, each with its value as a word in the supergroup generators.
#[derive(Clone, Debug)]
pub struct RewritingMap {
    pub index: usize,
    pub ngens: usize,
    /// transversal word per coset (base has the empty word)
    pub transversal: Vec<Word>,
    /// for pair (coset, gen): Schreier generator id, or None on tree edges
    sgen_of_pair: Vec<Option<usize>>,
    /// Schreier generator id -> (coset, gen)
    pub sgen_pairs: Vec<(usize, GenId)>,
    /// Schreier generator id -> its value t_c g t_{c.g}^-1
    pub sgen_values: Vec<Word>,
}

impl RewritingMap {
    pub fn sgen_count(&self) -> usize {
        self.sgen_pairs.len()
    }

    pub fn total_pairs(&self) -> usize {
        self.index * self.ngens
    }

    pub fn tree_pairs(&self) -> usize {
        self.index - 1
    }
}

/// Build the Schreier transversal (breadth-first, generator order as the
/// tie-break) and the Schreier generators for a complete table.
pub fn schreier_data(t: &CosetTable) -> RewritingMap {
    let n = t.index();
    let ngens = t.ngens();
    let mut transversal: Vec<Option<Word>> = vec![None; n];
    let mut tree_pair = vec![false; n * ngens];
    transversal[t.base] = Some(Word::identity());
    let mut queue = VecDeque::from([t.base]);
    while let Some(c) = queue.pop_front() {
        for g in 0..ngens {
            for inv in [false, true] {
                let l = Letter::new(g, inv);
                let d = t.apply(c, l);
                if transversal[d].is_none() {
                    let w = transversal[c]
                        .as_ref()
                        .unwrap()
                        .mul(&Word::from_letters([l]));
                    transversal[d] = Some(w);
                    // tree edge: the positive pair that realizes it
                    if inv {
                        tree_pair[d * ngens + g] = true;
                    } else {
                        tree_pair[c * ngens + g] = true;
                    }
                    queue.push_back(d);
                }
            }
        }
    }
    let transversal: Vec<Word> = transversal.into_iter().map(|w| w.unwrap()).collect();
    let mut sgen_of_pair = vec![None; n * ngens];
    let mut sgen_pairs = Vec::new();
    let mut sgen_values = Vec::new();
    for c in 0..n {
        for g in 0..ngens {
            if tree_pair[c * ngens + g] {
                continue;
            }
            let id = sgen_pairs.len();
            sgen_of_pair[c * ngens + g] = Some(id);
            sgen_pairs.push((c, g));
            let d = t.apply(c, Letter::new(g, false));
            let value = transversal[c]
                .mul(&Word::gen(g))
                .mul(&transversal[d].inverse());
            sgen_values.push(value);
        }
    }
    RewritingMap {
        index: n,
        ngens,
        transversal,
        sgen_of_pair,
        sgen_pairs,
        sgen_values,
    }
}

impl RewritingMap {
    /// Rewrite of `w` starting at coset `start`, as a word in the Schreier
    /// generators. Returns the word and the end coset.
    fn rewrite_from(&self, t: &CosetTable, start: usize, w: &Word) -> (Word, usize) {
        let mut c = start;
        let mut letters = Vec::new();
        for &l in w.letters() {
            if l.inverse {
                // the positive pair sits at the target coset
                let d = t.apply(c, l);
                if let Some(id) = self.sgen_of_pair[d * self.ngens + l.gen] {
                    letters.push(Letter::new(id, true));
                }
                c = d;
            } else {
                if let Some(id) = self.sgen_of_pair[c * self.ngens + l.gen] {
                    letters.push(Letter::new(id, false));
                }
                c = t.apply(c, l);
            }
        }
        (Word::from_letters(letters), c)
    }
}

/// Rewrite a subgroup element as a word in the Schreier generators.
pub fn rewrite_in_subgroup(
    w: &Word,
    m: &RewritingMap,
    t: &CosetTable,
) -> Result<Word, RewriteError> {
    let (word, end) = m.rewrite_from(t, t.base, w);
    if end != t.base {
        return Err(RewriteError::NotInSubgroup(end));
    }
    Ok(word)
}

/// The Reidemeister-Schreier presentation of the subgroup, on the non-tree
/// Schreier generators: one relator per (coset, relator of `p`) pair.
pub fn reidemeister_schreier(p: &Presentation, t: &CosetTable) -> (Presentation, RewritingMap) {
    let m = schreier_data(t);
    let mut relators = Vec::with_capacity(t.index() * p.relators.len());
    for c in 0..t.index() {
        for r in &p.relators {
            let (word, end) = m.rewrite_from(t, c, r);
            debug_assert_eq!(end, c, "relator must close at every coset");
            relators.push(word);
        }
    }
    let generators: Vec<String> = m
        .sgen_pairs
        .iter()
        .map(|(c, g)| format!("s{c}_{g}"))
        .collect();
    (
        Presentation {
            generators,
            relators,
        },
        m,
    )
}

/// Tietze simplification that tracks what each surviving generator means as
/// a word over the input presentation's generators. Eliminations only remove
/// generators, so the meanings of survivors never change; the returned map
/// gives, per output generator, its word in the input generators.
pub fn tietze_simplify_tracked(p: &Presentation, rounds: usize) -> (Presentation, Vec<Word>) {
    let mut cur = normalize(p.clone());
    let mut meanings: Vec<Word> = (0..cur.ngens()).map(Word::gen).collect();
    let total = |q: &Presentation| q.relators.iter().map(|r| r.len()).sum::<usize>();
    let mut best = (cur.clone(), meanings.clone());
    for _ in 0..rounds {
        let mut changed = false;
        loop {
            let Some((gi, ri)) = pick_elimination(&cur) else {
                break;
            };
            cur = eliminate(&cur, gi, ri);
            meanings.remove(gi);
            cur = normalize(cur);
            changed = true;
        }
        if substring_pass(&mut cur) {
            cur = normalize(cur);
            changed = true;
        }
        if total(&cur) < total(&best.0) || cur.ngens() < best.0.ngens() {
            best = (cur.clone(), meanings.clone());
        }
        if !changed {
            break;
        }
    }
    best
}

/// Greedily shorten a single word using cyclic variants of the given
/// relators: any segment covering more than half of a relator is replaced by
/// the inverse of the remainder. The element represented is unchanged.
pub fn shorten_word(w: &Word, relators: &[Word]) -> Word {
    let mut variants: Vec<Vec<Letter>> = Vec::new();
    for r in relators {
        let r = r.cyclic_reduce();
        if r.is_empty() {
            continue;
        }
        for cand in [r.clone(), r.inverse()] {
            let ls = cand.letters().to_vec();
            for k in 0..ls.len() {
                variants.push(ls[k..].iter().chain(ls[..k].iter()).copied().collect());
            }
        }
    }
    let mut cur = w.clone();
    loop {
        let ls = cur.letters().to_vec();
        let mut improved: Option<Word> = None;
        'outer: for start in 0..ls.len() {
            for var in &variants {
                let need = var.len() / 2 + 1;
                let take = var.len().min(ls.len() - start);
                if take < need {
                    continue;
                }
                let mut match_len = 0;
                while match_len < take && ls[start + match_len] == var[match_len] {
                    match_len += 1;
                }
                if match_len >= need && 2 * match_len > var.len() {
                    let replacement =
                        Word::from_letters(var[match_len..].iter().copied()).inverse();
                    let head = Word::from_letters(ls[..start].iter().copied());
                    let tail = Word::from_letters(ls[start + match_len..].iter().copied());
                    let cand = head.mul(&replacement).mul(&tail);
                    if cand.len() < cur.len() {
                        improved = Some(cand);
                        break 'outer;
                    }
                }
            }
        }
        match improved {
            Some(c) => cur = c,
            None => return cur,
        }
    }
}

/// Tietze simplification: repeated normalization, elimination of generators
/// that occur exactly once in some relator (cheapest substitution first), and
/// greedy replacement of long relator segments using shorter relators.
/// Bounded by `rounds`; the result never has larger total relator length than
/// the input.
pub fn tietze_simplify(p: &Presentation, rounds: usize) -> Presentation {
    let mut cur = normalize(p.clone());
    let total = |q: &Presentation| q.relators.iter().map(|r| r.len()).sum::<usize>();
    let input_total = total(&cur);
    let mut best = cur.clone();
    for _ in 0..rounds {
        let mut changed = false;
        // eliminate single-occurrence generators, cheapest substitution first
        loop {
            let Some((gi, ri)) = pick_elimination(&cur) else {
                break;
            };
            cur = eliminate(&cur, gi, ri);
            cur = normalize(cur);
            changed = true;
        }
        // substring replacement
        if substring_pass(&mut cur) {
            cur = normalize(cur);
            changed = true;
        }
        if total(&cur) < total(&best) || cur.ngens() < best.ngens() {
            best = cur.clone();
        }
        if !changed {
            break;
        }
    }
    if total(&best) <= input_total {
        best
    } else {
        normalize(p.clone())
    }
}

fn normalize(p: Presentation) -> Presentation {
    let mut rels: Vec<Word> = p
        .relators
        .iter()
        .map(|r| r.cyclic_reduce())
        .filter(|r| !r.is_empty())
        .collect();
    // dedupe by canonical cyclic form up to rotation and inversion
    let mut seen = std::collections::HashSet::new();
    rels.retain(|r| seen.insert(canonical_cyclic(r)));
    Presentation {
        generators: p.generators,
        relators: rels,
    }
}

fn canonical_cyclic(w: &Word) -> Vec<Letter> {
    let mut best: Option<Vec<Letter>> = None;
    for cand in [w.clone(), w.inverse()] {
        let ls = cand.letters().to_vec();
        let n = ls.len();
        for k in 0..n.max(1) {
            let rot: Vec<Letter> = ls[k..].iter().chain(ls[..k].iter()).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Find the cheapest (generator, relator) elimination: a generator occurring
/// exactly once in that relator, ranked by substitution growth then length.
fn pick_elimination(p: &Presentation) -> Option<(GenId, usize)> {
    let k = p.ngens();
    let mut occ_total = vec![0usize; k];
    for r in &p.relators {
        for l in r.letters() {
            occ_total[l.gen] += 1;
        }
    }
    let mut best: Option<(usize, usize, GenId, usize)> = None; // (cost, len, gen, rel)
    for (ri, r) in p.relators.iter().enumerate() {
        let mut occ = vec![0usize; k];
        for l in r.letters() {
            occ[l.gen] += 1;
        }
        for g in 0..k {
            if occ[g] == 1 {
                let growth = (r.len() - 1) * (occ_total[g] - 1);
                if best.is_none_or(|(bc, bl, _, _)| (growth, r.len()) < (bc, bl)) {
                    best = Some((growth, r.len(), g, ri));
                }
            }
        }
    }
    // keep substitutions bounded; useful eliminations on the instances here
    // never approach this
    best.filter(|&(cost, _, _, _)| cost <= 4096)
        .map(|(_, _, g, ri)| (g, ri))
}

fn eliminate(p: &Presentation, g: GenId, ri: usize) -> Presentation {
    let r = &p.relators[ri];
    let pos = r.letters().iter().position(|l| l.gen == g).unwrap();
    let inv = r.letters()[pos].inverse;
    // r = u g^e v  =>  g^e = u^-1 v^-1
    let u = Word::from_letters(r.letters()[..pos].iter().copied());
    let v = Word::from_letters(r.letters()[pos + 1..].iter().copied());
    let g_val = {
        let w = u.inverse().mul(&v.inverse());
        if inv {
            w.inverse()
        } else {
            w
        }
    };
    // build substitution images in the *old* generator numbering
    let images: Vec<Word> = (0..p.ngens())
        .map(|i| if i == g { g_val.clone() } else { Word::gen(i) })
        .collect();
    let mut new_rels = Vec::new();
    for (i, rel) in p.relators.iter().enumerate() {
        if i == ri {
            continue;
        }
        new_rels.push(rel.substitute(&images));
    }
    // renumber generators, dropping g
    let mut remap = vec![usize::MAX; p.ngens()];
    let mut names = Vec::new();
    for i in 0..p.ngens() {
        if i != g {
            remap[i] = names.len();
            names.push(p.generators[i].clone());
        }
    }
    let renumber = |w: &Word| {
        Word::from_letters(
            w.letters()
                .iter()
                .map(|l| Letter::new(remap[l.gen], l.inverse)),
        )
    };
    Presentation {
        generators: names,
        relators: new_rels.iter().map(renumber).collect(),
    }
}

/// One pass of greedy substring replacement: use each shorter relator to
/// shrink longer ones. Returns true if anything changed.
fn substring_pass(p: &mut Presentation) -> bool {
    let mut changed = false;
    let rels = p.relators.clone();
    for (ri, short) in rels.iter().enumerate() {
        if short.is_empty() {
            continue;
        }
        let variants: Vec<Vec<Letter>> = {
            let mut out = Vec::new();
            for cand in [short.clone(), short.inverse()] {
                let ls = cand.letters().to_vec();
                for k in 0..ls.len() {
                    out.push(ls[k..].iter().chain(ls[..k].iter()).copied().collect());
                }
            }
            out
        };
        for (rj, long) in p.relators.iter_mut().enumerate() {
            if rj == ri || long.len() < short.len() {
                continue;
            }
            let need = short.len() / 2 + 1; // strictly more than half
            let ls = long.letters().to_vec();
            'search: for start in 0..ls.len() {
                for var in &variants {
                    let take = var.len().min(ls.len() - start);
                    if take < need {
                        continue;
                    }
                    let mut match_len = 0;
                    while match_len < take && ls[start + match_len] == var[match_len] {
                        match_len += 1;
                    }
                    if match_len >= need && match_len > var.len() - match_len {
                        // segment s = var[..match_len] equals (var[match_len..])^-1
                        let replacement =
                            Word::from_letters(var[match_len..].iter().copied()).inverse();
                        let head = Word::from_letters(ls[..start].iter().copied());
                        let tail = Word::from_letters(ls[start + match_len..].iter().copied());
                        let new_long = head.mul(&replacement).mul(&tail);
                        if new_long.len() < long.len() {
                            *long = new_long;
                            changed = true;
                            break 'search;
                        }
                    }
                }
            }
        }
    }
    changed
}

const UNDEF: u32 = u32::MAX;

/// An augmented coset table: every entry carries a tag word in the subgroup
/// generator alphabet, maintaining `t_c . x = tag(c, x) . t_{c.x}` for an
/// implicit transversal. Tracing a subgroup element from base and collecting
/// tags rewrites it over the *given* subgroup generators.
pub struct TaggedTable {
    pub ngens: usize,
    pub nsub: usize,
    width: usize,
    ncosets: usize,
    tab: Vec<u32>,
    tags: Vec<Word>,
}

impl TaggedTable {
    pub fn index(&self) -> usize {
        self.ncosets
    }

    /// Rewrite `w` (a word in the supergroup generators) as a word in the
    /// given subgroup generators.
    pub fn rewrite(&self, w: &Word) -> Result<Word, RewriteError> {
        let mut c = 0usize;
        let mut acc = Word::identity();
        for &l in w.letters() {
            let col = 2 * l.gen + usize::from(l.inverse);
            let d = self.tab[c * self.width + col] as usize;
            acc = acc.mul(&self.tags[c * self.width + col]);
            c = d;
        }
        if c != 0 {
            return Err(RewriteError::NotInSubgroup(c));
        }
        Ok(acc)
    }
}

/// Tagged Todd-Coxeter (HLT style). Enumerates the cosets of the subgroup
/// generated by `subgens` and builds the tag structure for rewriting.
pub fn tagged_enumerate(
    p: &Presentation,
    subgens: &[Word],
    limits: EnumerationLimits,
) -> Result<TaggedTable, RewriteError> {
    let mut e = TaggedEnum::new(p, subgens, limits);
    e.run()?;
    e.finish()
}

struct TaggedEnum {
    width: usize,
    ngens: usize,
    nsub: usize,
    relators: Vec<Vec<usize>>,
    subgens: Vec<Vec<usize>>,
    limits: EnumerationLimits,
    tab: Vec<u32>,
    tags: Vec<Word>,
    parent: Vec<u32>,
    pot: Vec<Word>,
    live: usize,
    dead_queue: VecDeque<u32>,
}

fn word_cols(w: &Word) -> Vec<usize> {
    w.letters()
        .iter()
        .map(|&l| 2 * l.gen + usize::from(l.inverse))
        .collect()
}

impl TaggedEnum {
    fn new(p: &Presentation, subgens: &[Word], limits: EnumerationLimits) -> Self {
        let ngens = p.ngens();
        let mut e = TaggedEnum {
            width: 2 * ngens,
            ngens,
            nsub: subgens.len(),
            relators: p
                .relators
                .iter()
                .map(|r| word_cols(&r.cyclic_reduce()))
                .filter(|r| !r.is_empty())
                .collect(),
            subgens: subgens.iter().map(word_cols).collect(),
            limits,
            tab: Vec::new(),
            tags: Vec::new(),
            parent: Vec::new(),
            pot: Vec::new(),
            live: 0,
            dead_queue: VecDeque::new(),
        };
        e.new_coset();
        e
    }

    fn new_coset(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.pot.push(Word::identity());
        self.tab.extend(std::iter::repeat(UNDEF).take(self.width));
        self.tags
            .extend(std::iter::repeat(Word::identity()).take(self.width));
        self.live += 1;
        id
    }

    /// Representative with accumulated potential: t_c = pot . t_root.
    fn rep_pot(&mut self, c: u32) -> (u32, Word) {
        if self.parent[c as usize] == c {
            return (c, Word::identity());
        }
        let p = self.parent[c as usize];
        let (root, ppot) = self.rep_pot(p);
        let total = self.pot[c as usize].mul(&ppot);
        self.parent[c as usize] = root;
        self.pot[c as usize] = total.clone();
        (root, total)
    }

    fn entry(&self, c: u32, col: usize) -> u32 {
        self.tab[c as usize * self.width + col]
    }

    fn tag(&self, c: u32, col: usize) -> Word {
        self.tags[c as usize * self.width + col].clone()
    }

    fn set_entry(&mut self, c: u32, col: usize, d: u32, tag: Word) {
        self.tab[c as usize * self.width + col] = d;
        self.tags[c as usize * self.width + col] = tag;
    }

    /// Record t_a = q . t_b and queue the dead coset.
    fn merge(&mut self, a: u32, b: u32, q: Word) {
        let (ra, pa) = self.rep_pot(a);
        let (rb, pb) = self.rep_pot(b);
        if ra == rb {
            return;
        }
        // t_a = pa t_ra, t_b = pb t_rb, t_a = q t_b  =>  t_ra = pa^-1 q pb t_rb
        let rel = pa.inverse().mul(&q).mul(&pb);
        let (die, keep, pot) = if rb < ra {
            (ra, rb, rel)
        } else {
            (rb, ra, rel.inverse())
        };
        self.parent[die as usize] = keep;
        self.pot[die as usize] = pot;
        self.live -= 1;
        self.dead_queue.push_back(die);
    }

    fn process_coincidences(&mut self) {
        while let Some(dead) = self.dead_queue.pop_front() {
            for col in 0..self.width {
                let d = self.entry(dead, col);
                if d == UNDEF {
                    continue;
                }
                let tag = self.tag(dead, col);
                // clear the mirror entry pointing back at dead
                if self.entry(d, col ^ 1) == dead {
                    self.set_entry(d, col ^ 1, UNDEF, Word::identity());
                }
                let (mu, mu_pot) = self.rep_pot(dead);
                let (nu, nu_pot) = self.rep_pot(d);
                // t_dead = mu_pot t_mu; t_dead . x = tag . t_d; t_d = nu_pot t_nu
                // => t_mu . x = mu_pot^-1 tag nu_pot . t_nu
                let new_tag = mu_pot.inverse().mul(&tag).mul(&nu_pot);
                let ex = self.entry(mu, col);
                if ex != UNDEF {
                    let ex_tag = self.tag(mu, col);
                    // t_mu x = ex_tag t_ex = new_tag t_nu => t_ex = ex_tag^-1 new_tag t_nu
                    self.merge(ex, nu, ex_tag.inverse().mul(&new_tag));
                } else {
                    let back = self.entry(nu, col ^ 1);
                    if back != UNDEF {
                        let back_tag = self.tag(nu, col ^ 1);
                        // t_nu x^-1 = back_tag t_back; with t_mu x = new_tag t_nu:
                        // t_mu = new_tag back_tag t_back
                        self.merge(mu, back, new_tag.mul(&back_tag));
                    } else {
                        self.set_entry(mu, col, nu, new_tag.clone());
                        self.set_entry(nu, col ^ 1, mu, new_tag.inverse());
                    }
                }
            }
            let base = dead as usize * self.width;
            for col in 0..self.width {
                self.tab[base + col] = UNDEF;
                self.tags[base + col] = Word::identity();
            }
        }
    }

    /// Scan `word` from coset `s`, requiring t_s . word = req . t_s.
    fn scan_fill(&mut self, s: u32, word: &[usize], req: &Word) -> Result<(), RewriteError> {
        loop {
            let (s, _) = self.rep_pot(s);
            let n = word.len();
            let mut f = s;
            let mut pf = Word::identity(); // t_s . (prefix) = pf . t_f
            let mut i = 0;
            while i < n {
                let t = self.entry(f, word[i]);
                if t == UNDEF {
                    break;
                }
                let tag = self.tag(f, word[i]);
                let (tr, tpot) = self.rep_pot(t);
                pf = pf.mul(&tag).mul(&tpot);
                f = tr;
                i += 1;
            }
            if i == n {
                if f != s {
                    // t_s . word = pf . t_f must equal req . t_s
                    self.merge(f, s, pf.inverse().mul(req));
                    self.process_coincidences();
                }
                return Ok(());
            }
            let mut b = s;
            let mut qb = Word::identity(); // t_b . (suffix) = qb . t_s
            let mut j = n;
            while j > i {
                let t = self.entry(b, word[j - 1] ^ 1);
                if t == UNDEF {
                    break;
                }
                // t_b . x^-1 = tag . t_t => t_t . x = tag^-1 . t_b
                let tag = self.tag(b, word[j - 1] ^ 1);
                let (tr, tpot) = self.rep_pot(t);
                // t_tr . x . (old suffix) = tpot^-1 tag^-1 qb . t_s
                qb = tpot.inverse().mul(&tag.inverse()).mul(&qb);
                b = tr;
                j -= 1;
            }
            if j == i {
                // both scans meet across the full word:
                // t_s word = pf . (t_f suffix) and t_b suffix = qb t_s
                // imposing t_s word = req t_s gives t_f = pf^-1 req qb^-1 t_b
                self.merge(f, b, pf.inverse().mul(req).mul(&qb.inverse()));
                self.process_coincidences();
                return Ok(());
            }
            if j == i + 1 {
                // deduction: t_f . x = T . t_b with pf T qb = req
                let t = pf.inverse().mul(req).mul(&qb.inverse());
                self.set_entry(f, word[i], b, t.clone());
                self.set_entry(b, word[i] ^ 1, f, t.inverse());
                return Ok(());
            }
            // define a new coset and keep scanning
            if self.parent.len() >= self.limits.max_steps {
                return Err(RewriteError::Enumeration(
                    crate::cosets::CosetError::ResourceLimit("tagged enumeration steps".into()),
                ));
            }
            let nc = self.new_coset();
            self.set_entry(f, word[i], nc, Word::identity());
            self.set_entry(nc, word[i] ^ 1, f, Word::identity());
        }
    }

    fn run(&mut self) -> Result<(), RewriteError> {
        let subgens = self.subgens.clone();
        for (k, w) in subgens.iter().enumerate() {
            self.scan_fill(0, w, &Word::gen(k))?;
        }
        let relators = self.relators.clone();
        let id = Word::identity();
        let mut cursor: u32 = 0;
        loop {
            while (cursor as usize) < self.parent.len() && self.parent[cursor as usize] != cursor {
                cursor += 1;
            }
            if cursor as usize >= self.parent.len() {
                break;
            }
            if self.live > self.limits.max_cosets {
                return Err(RewriteError::Enumeration(
                    crate::cosets::CosetError::ResourceLimit("tagged enumeration cosets".into()),
                ));
            }
            for r in &relators {
                if self.parent[cursor as usize] != cursor {
                    break;
                }
                self.scan_fill(cursor, r, &id)?;
            }
            if self.parent[cursor as usize] == cursor {
                for col in 0..self.width {
                    if self.parent[cursor as usize] == cursor && self.entry(cursor, col) == UNDEF {
                        let nc = self.new_coset();
                        self.set_entry(cursor, col, nc, Word::identity());
                        self.set_entry(nc, col ^ 1, cursor, Word::identity());
                    }
                }
            }
            cursor += 1;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<TaggedTable, RewriteError> {
        // compact live cosets, rewriting entries through representatives
        let n = self.parent.len();
        let mut new_of_old = vec![UNDEF; n];
        let mut next = 0u32;
        for c in 0..n as u32 {
            if self.parent[c as usize] == c {
                new_of_old[c as usize] = next;
                next += 1;
            }
        }
        let live = next as usize;
        let mut tab = vec![UNDEF; live * self.width];
        let mut tags = vec![Word::identity(); live * self.width];
        for c in 0..n as u32 {
            if self.parent[c as usize] != c {
                continue;
            }
            let nc = new_of_old[c as usize] as usize;
            for col in 0..self.width {
                let d = self.entry(c, col);
                if d == UNDEF {
                    return Err(RewriteError::Enumeration(
                        crate::cosets::CosetError::Incomplete,
                    ));
                }
                let tag = self.tag(c, col);
                let (dr, dpot) = self.rep_pot(d);
                tab[nc * self.width + col] = new_of_old[dr as usize];
                tags[nc * self.width + col] = tag.mul(&dpot);
            }
        }
        Ok(TaggedTable {
            ngens: self.ngens,
            nsub: self.nsub,
            width: self.width,
            ncosets: live,
            tab,
            tags,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::abelian_invariants;
    use crate::cosets::{coset_enumerate, Strategy};
    use crate::words::parse_presentation;

    #[test]
    fn rs_on_free_group_index_two() {
        // <a, b>, subgroup <a^2, b, a b a^-1> has index 2; Nielsen-Schreier rank 3
        let p = Presentation::free(&["a", "b"]);
        let t = coset_enumerate(
            &p,
            &[
                Word::gen(0).pow(2),
                Word::gen(1),
                Word::gen(1).conjugate(&Word::gen(0).inverse()),
            ],
            EnumerationLimits::default(),
            Strategy::Felsch,
        )
        .unwrap();
        assert_eq!(t.index(), 2);
        let (sub, m) = reidemeister_schreier(&p, &t);
        assert_eq!(sub.generators.len(), 3);
        assert_eq!(m.total_pairs(), 4);
        assert_eq!(m.tree_pairs(), 1);
        assert!(sub.relators.is_empty());
        // a^2 rewrites to a single Schreier generator
        let r = rewrite_in_subgroup(&Word::gen(0).pow(2), &m, &t).unwrap();
        assert_eq!(r.len(), 1);
        // a is not in the subgroup
        assert!(rewrite_in_subgroup(&Word::gen(0), &m, &t).is_err());
        // homomorphism property: rewrite(uv) = rewrite(u) rewrite(v)
        let u = Word::gen(0).pow(2);
        let v = Word::gen(1);
        let uv = rewrite_in_subgroup(&u.mul(&v), &m, &t).unwrap();
        let sep = rewrite_in_subgroup(&u, &m, &t)
            .unwrap()
            .mul(&rewrite_in_subgroup(&v, &m, &t).unwrap());
        assert_eq!(uv, sep);
        // Schreier generator values evaluate into the subgroup
        for val in &m.sgen_values {
            assert!(t.membership(val));
        }
    }

    #[test]
    fn rs_counts_on_s3() {
        let p = parse_presentation("gens: a b\nrel: a a\nrel: b b b\nrel: a b a b\n").unwrap();
        let t = coset_enumerate(&p, &[], EnumerationLimits::default(), Strategy::Felsch).unwrap();
        assert_eq!(t.index(), 6);
        let (sub, m) = reidemeister_schreier(&p, &t);
        assert_eq!(sub.generators.len(), 6 * 2 - 5);
        assert_eq!(sub.relators.len(), 6 * 3);
        assert_eq!(m.sgen_count(), 7);
        // trivial subgroup: abelianization of the RS presentation is trivial
        let inv = abelian_invariants(&sub);
        assert_eq!(inv.free_rank, 0);
        assert!(inv.torsion.is_empty());
    }

    #[test]
    fn tietze_kills_redundant_generator() {
        // <a, b | b a^-2, b^3> is Z/6 presented on a after eliminating b
        let p = Presentation::new(
            vec!["a".into(), "b".into()],
            vec![Word::gen(1).mul(&Word::gen(0).pow(-2)), Word::gen(1).pow(3)],
        );
        let s = tietze_simplify(&p, 10);
        assert_eq!(s.ngens(), 1);
        assert_eq!(s.relators.len(), 1);
        assert_eq!(s.relators[0].len(), 6); // a^6
        assert_eq!(abelian_invariants(&p), abelian_invariants(&s));
    }

    #[test]
    fn tietze_fixed_point_on_minimal_presentations() {
        let p = parse_presentation("gens: a b\nrel: a a\nrel: b b b\nrel: a b a b\n").unwrap();
        let s = tietze_simplify(&p, 10);
        assert_eq!(s.relators.len(), 3);
        assert_eq!(s.ngens(), 2);
    }

    #[test]
    fn tagged_rewriting_on_free_group() {
        // free group <a, b>; subgroup generated by y0 = a^2, y1 = b, y2 = a b a^-1
        let p = Presentation::free(&["a", "b"]);
        let subgens = vec![
            Word::gen(0).pow(2),
            Word::gen(1),
            Word::gen(1).conjugate(&Word::gen(0).inverse()),
        ];
        let t = tagged_enumerate(&p, &subgens, EnumerationLimits::default()).unwrap();
        assert_eq!(t.index(), 2);
        // a^2 b rewrites to y0 y1
        let w = Word::gen(0).pow(2).mul(&Word::gen(1));
        let r = t.rewrite(&w).unwrap();
        assert_eq!(r, Word::gen(0).mul(&Word::gen(1)));
        // membership failure
        assert!(t.rewrite(&Word::gen(0)).is_err());
        // validity: rewritten words evaluate back to the original under
        // substitution y_k -> subgens[k]
        let c = Word::gen(1).conjugate(&Word::gen(0).inverse());
        for w in [w, c, Word::gen(0).pow(-2), Word::gen(1).pow(5)] {
            let r = t.rewrite(&w).unwrap();
            assert_eq!(r.substitute(&subgens), w);
        }
    }

    #[test]
    fn tagged_rewriting_with_relators() {
        // S3, subgroup <b> of index 2 (ab a = b^-1 there)
        let p = parse_presentation("gens: a b\nrel: a a\nrel: b b b\nrel: a b a b\n").unwrap();
        let subgens = vec![Word::gen(1)];
        let t = tagged_enumerate(&p, &subgens, EnumerationLimits::default()).unwrap();
        assert_eq!(t.index(), 2);
        // b^2 is in the subgroup and must rewrite to a power of y0
        let r = t.rewrite(&Word::gen(1).pow(2)).unwrap();
        assert!(r.letters().iter().all(|l| l.gen == 0));
        // a b a lies in <b>; rewrite must succeed
        let aba = Word::gen(0).mul(&Word::gen(1)).mul(&Word::gen(0));
        assert!(t.rewrite(&aba).is_ok());
    }
}
