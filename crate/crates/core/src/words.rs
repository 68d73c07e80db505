//! Free-group words over named generators, presentations, and the
//! line-oriented text format for presentation files.
//!
//! Words are stored freely reduced at construction, so structural equality
//! is equality of reduced words. A [`Letter`] is a generator index with a
//! sign; a [`Word`] is a reduced letter sequence.

use std::fmt;

use thiserror::Error;

/// Index into a presentation's generator list.
pub type GenId = usize;

/// One letter of a word: a generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: GenId,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: GenId, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A freely reduced word in the free group on some generator set.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word {
            letters: Vec::new(),
        }
    }

    pub fn gen(g: GenId) -> Self {
        Word {
            letters: vec![Letter::new(g, false)],
        }
    }

    /// Build a word from raw letters, freely reducing.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|t| t.cancels(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// Signed-integer convention used in tests and data tables:
    /// `k > 0` is generator `k-1`, `k < 0` its inverse.
    pub fn from_signed(letters: &[i64]) -> Self {
        Word::from_letters(letters.iter().map(|&k| {
            assert!(k != 0, "letter 0 is not a generator");
            Letter::new((k.unsigned_abs() as usize) - 1, k < 0)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Commutator `[a, b] = a^-1 b^-1 a b`.
    pub fn comm(a: &Word, b: &Word) -> Word {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    pub fn conjugate(&self, by: &Word) -> Word {
        by.inverse().mul(self).mul(by)
    }

    /// Cyclically reduced form (conjugacy-class representative shape).
    pub fn cyclic_reduce(&self) -> Word {
        let mut l = self.letters.clone();
        while l.len() >= 2 && l[0].cancels(*l.last().unwrap()) {
            l.pop();
            l.remove(0);
        }
        Word { letters: l }
    }

    pub fn exponent_sum(&self, g: GenId) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == g)
            .map(|l| if l.inverse { -1 } else { 1 })
            .sum()
    }

    /// Exponent sums over generators `0..ngens`.
    pub fn exponent_vector(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0i64; ngens];
        for l in &self.letters {
            v[l.gen] += if l.inverse { -1 } else { 1 };
        }
        v
    }

    pub fn max_gen(&self) -> Option<GenId> {
        self.letters.iter().map(|l| l.gen).max()
    }

    /// Substitute each generator by a word (a free-group homomorphism).
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::identity();
        for l in &self.letters {
            let img = &images[l.gen];
            out = out.mul(&if l.inverse {
                img.inverse()
            } else {
                img.clone()
            });
        }
        out
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}{}", if l.inverse { "-" } else { "" }, l.gen)?;
        }
        write!(f, ")")
    }
}

/// The no-adjacent-cancellation normal form. Idempotent; exposed separately
/// because raw letter sequences arrive from parsers and rewriting.
pub fn free_reduce(w: &Word) -> Word {
    Word::from_letters(w.letters.iter().copied())
}

/// A finitely presented group: named generators plus relator words.
/// Relator order is preserved; downstream enumeration is deterministic in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        let p = Presentation {
            generators,
            relators,
        };
        for r in &p.relators {
            if let Some(g) = r.max_gen() {
                assert!(g < p.generators.len(), "relator uses undeclared generator");
            }
        }
        p
    }

    pub fn free(names: &[&str]) -> Self {
        Presentation {
            generators: names.iter().map(|s| s.to_string()).collect(),
            relators: Vec::new(),
        }
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn gen_id(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|n| n == name)
    }

    /// Same group, extra relators appended (a quotient presentation).
    pub fn with_relators(&self, extra: &[Word]) -> Presentation {
        let mut relators = self.relators.clone();
        relators.extend(extra.iter().cloned());
        Presentation::new(self.generators.clone(), relators)
    }

    /// Exponent-sum matrix, one row per relator.
    pub fn relation_exponent_rows(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| r.exponent_vector(self.ngens()))
            .collect()
    }
}

/// Evaluation order for words under a generator assignment.
///
/// `LeftToRight` maps `uv` to `image(u) * image(v)`; `RightToLeft` maps it to
/// `image(v) * image(u)`. Both are first-class because word/matrix data from
/// different sources do not agree on a composition convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Convention {
    LeftToRight,
    RightToLeft,
}

impl Convention {
    pub const BOTH: [Convention; 2] = [Convention::LeftToRight, Convention::RightToLeft];
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::LeftToRight => write!(f, "left-to-right"),
            Convention::RightToLeft => write!(f, "right-to-left"),
        }
    }
}

/// Anything words can be evaluated into.
pub trait GroupElement: Clone + PartialEq {
    fn mul(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Self;
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("generator {0} has no assigned image")]
    UnassignedGenerator(GenId),
}

/// Evaluate a word under `assign` (indexed by generator id), with the given
/// identity element and convention.
pub fn evaluate_word<G: GroupElement>(
    w: &Word,
    assign: &[G],
    identity: &G,
    convention: Convention,
) -> Result<G, EvalError> {
    let mut acc = identity.clone();
    let letters: Box<dyn Iterator<Item = &Letter>> = match convention {
        Convention::LeftToRight => Box::new(w.letters().iter()),
        Convention::RightToLeft => Box::new(w.letters().iter().rev()),
    };
    for l in letters {
        let img = assign
            .get(l.gen)
            .ok_or(EvalError::UnassignedGenerator(l.gen))?;
        let img = if l.inverse { img.inv() } else { img.clone() };
        acc = acc.mul(&img);
    }
    Ok(acc)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, col {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("line {line}: undeclared generator `{name}`")]
    UndeclaredGenerator { line: usize, name: String },
    #[error("missing `gens:` header line")]
    MissingGens,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

/// Parse the presentation file format.
///
/// Line-oriented UTF-8: one `gens: <name>+` line, then zero or more
/// `rel: <word>` lines; `#` starts a comment. Word tokens are `name`,
/// `name^<int>`, or (when every generator is a single lowercase letter) a
/// letter string with uppercase meaning inverse, e.g. `a b a B A B`.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut gens: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("gens:") {
            if gens.is_some() {
                return Err(syntax(line_no, 1, "duplicate gens: line"));
            }
            let names: Vec<String> = rest.split_whitespace().map(|s| s.to_string()).collect();
            if names.is_empty() {
                return Err(syntax(line_no, 1, "gens: line declares no generators"));
            }
            for (i, n) in names.iter().enumerate() {
                if names[..i].contains(n) {
                    return Err(syntax(line_no, 1, format!("duplicate generator `{n}`")));
                }
            }
            gens = Some(names);
        } else if let Some(rest) = line.strip_prefix("rel:") {
            let gens = gens.as_ref().ok_or(ParseError::MissingGens)?;
            relators.push(parse_word_in(rest, gens, line_no)?);
        } else {
            return Err(syntax(
                line_no,
                1,
                format!("expected `gens:` or `rel:`, got `{line}`"),
            ));
        }
    }
    let generators = gens.ok_or(ParseError::MissingGens)?;
    Ok(Presentation {
        generators,
        relators,
    })
}

/// Parse a single word against a generator list (the `rel:` payload syntax).
pub fn parse_word_in(text: &str, gens: &[String], line_no: usize) -> Result<Word, ParseError> {
    let terse = gens
        .iter()
        .all(|g| g.len() == 1 && g.chars().next().unwrap().is_ascii_lowercase());
    let mut letters = Vec::new();
    for tok in text.split_whitespace() {
        let col = text[..text.find(tok).unwrap_or(0)].chars().count() + 1;
        let (name, exp) = match tok.find('^') {
            Some(i) => {
                let e: i64 = tok[i + 1..]
                    .parse()
                    .map_err(|_| syntax(line_no, col, format!("bad exponent in `{tok}`")))?;
                (&tok[..i], e)
            }
            None => (tok, 1),
        };
        if let Some(g) = gens.iter().position(|n| n == name) {
            push_power(&mut letters, g, exp);
        } else if terse && !name.is_empty() && name.chars().all(|c| c.is_ascii_alphabetic()) {
            // letter string, uppercase = inverse; exponent applies to the block
            let mut block = Vec::new();
            for c in name.chars() {
                let lower = c.to_ascii_lowercase().to_string();
                let g = gens.iter().position(|n| *n == lower).ok_or_else(|| {
                    ParseError::UndeclaredGenerator {
                        line: line_no,
                        name: c.to_string(),
                    }
                })?;
                block.push(Letter::new(g, c.is_ascii_uppercase()));
            }
            for _ in 0..exp.unsigned_abs() {
                if exp >= 0 {
                    letters.extend(block.iter().copied());
                } else {
                    letters.extend(block.iter().rev().map(|l| l.inv()));
                }
            }
        } else {
            return Err(ParseError::UndeclaredGenerator {
                line: line_no,
                name: name.to_string(),
            });
        }
    }
    Ok(Word::from_letters(letters))
}

fn push_power(letters: &mut Vec<Letter>, g: GenId, exp: i64) {
    for _ in 0..exp.unsigned_abs() {
        letters.push(Letter::new(g, exp < 0));
    }
}

/// Print a word in the canonical `name^k` run-length form.
pub fn print_word(w: &Word, gens: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    let ls = w.letters();
    while i < ls.len() {
        let mut j = i;
        while j < ls.len() && ls[j] == ls[i] {
            j += 1;
        }
        let k = (j - i) as i64 * if ls[i].inverse { -1 } else { 1 };
        let name = &gens[ls[i].gen];
        parts.push(if k == 1 {
            name.clone()
        } else {
            format!("{name}^{k}")
        });
        i = j;
    }
    parts.join(" ")
}

/// Print a presentation in the file format; `parse_presentation` of the
/// output reproduces the input exactly.
pub fn print_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    out.push_str("gens:");
    for g in &p.generators {
        out.push(' ');
        out.push_str(g);
    }
    out.push('\n');
    for r in &p.relators {
        out.push_str("rel: ");
        out.push_str(&print_word(r, &p.generators));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduce_cancels_and_is_idempotent() {
        // h1 h1^-1 -> empty
        let w = Word::from_signed(&[1, -1]);
        assert!(w.is_empty());
        // h4 h3^-1 h3 h4^-1 -> empty
        let w = Word::from_signed(&[4, -3, 3, -4]);
        assert!(w.is_empty());
        // already reduced is a fixed point
        let w = Word::from_signed(&[3, -2, 1]);
        assert_eq!(free_reduce(&w), w);
        assert_eq!(free_reduce(&free_reduce(&w)), w);
    }

    #[test]
    fn inverse_involution_and_lengths() {
        let w = Word::from_signed(&[1, 2, -3, 2]);
        assert_eq!(w.inverse().inverse(), w);
        assert_eq!(w.inverse().len(), w.len());
        assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn parse_terse_333() {
        let p =
            parse_presentation("gens: a b\nrel: a a a\nrel: b b b\nrel: a b a B A B\n").unwrap();
        assert_eq!(p.ngens(), 2);
        assert_eq!(p.relators.len(), 3);
        // a b a B A B = (aba)(bab)^-1
        let aba = Word::from_signed(&[1, 2, 1]);
        let bab = Word::from_signed(&[2, 1, 2]);
        assert_eq!(p.relators[2], aba.mul(&bab.inverse()));
    }

    #[test]
    fn parse_free_rank_one() {
        let p = parse_presentation("gens: a\n").unwrap();
        assert_eq!(p.ngens(), 1);
        assert!(p.relators.is_empty());
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_presentation("gens: a\nrel: a q\n").unwrap_err();
        assert!(matches!(e, ParseError::UndeclaredGenerator { line: 2, .. }));
        let e = parse_presentation("huh\n").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 1, .. }));
        let e = parse_presentation("rel: a\n").unwrap_err();
        assert!(matches!(e, ParseError::MissingGens));
    }

    #[test]
    fn print_parse_round_trip() {
        let p = parse_presentation(
            "gens: h1 h2 h3 h4\nrel: h3 h2^-1 h1 h4 h2 h1^-1 h3^-1 h4^-1\nrel: h1^3\n",
        )
        .unwrap();
        let printed = print_presentation(&p);
        let p2 = parse_presentation(&printed).unwrap();
        assert_eq!(p, p2);
        assert_eq!(printed, print_presentation(&p2));
    }

    #[test]
    fn exponent_vectors() {
        let w = Word::from_signed(&[1, 2, 1, -2, -1, -1, 3]);
        assert_eq!(w.exponent_vector(4), vec![0, 0, 1, 0]);
    }

    #[test]
    fn commutator_shape() {
        let a = Word::gen(0);
        let b = Word::gen(1);
        assert_eq!(Word::comm(&a, &b), Word::from_signed(&[-1, -2, 1, 2]));
        assert!(Word::comm(&a, &a).is_empty());
    }
}
