//! Words in a free group of finite rank.
//!
//! Generators are the lowercase letters `a..z`, their inverses the matching
//! uppercase letters. A [`Word`] is always freely reduced; every operation
//! returns a fresh value.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 26;

/// The generating set `g_1..g_n` of the ambient free group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::invalid(format!(
                "rank must lie in 1..={MAX_RANK}, got {rank}"
            )));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of signed letters, `2 * rank`.
    pub fn slots(&self) -> usize {
        2 * self.rank
    }

    /// Signed letters in canonical order `a < A < b < B < ...`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.slots()).map(Letter::from_slot)
    }

    pub fn generators(&self) -> Vec<Word> {
        (1..=self.rank)
            .map(|g| Word::from_letter(Letter::generator(g)))
            .collect()
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.generator_index() <= self.rank
    }

    pub fn check(&self, word: &Word) -> Result<()> {
        match word.letters().iter().find(|l| !self.contains(**l)) {
            Some(l) => Err(Error::AlphabetMismatch(format!(
                "letter {} lies outside rank {}",
                l.to_char(),
                self.rank
            ))),
            None => Ok(()),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        Word::parse(text, *self)
    }

    /// Number of freely reduced words of length exactly `len`.
    pub fn reduced_count(&self, len: usize) -> u128 {
        if len == 0 {
            return 1;
        }
        let s = self.slots() as u128;
        s * (s - 1).pow(len as u32 - 1)
    }
}

/// A signed generator. Stored as `+g` or `-g` with `g` in `1..=26`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter(i8);

impl Letter {
    pub fn generator(g: usize) -> Letter {
        assert!((1..=MAX_RANK).contains(&g), "generator index out of range");
        Letter(g as i8)
    }

    pub fn inverse_of_generator(g: usize) -> Letter {
        Letter::generator(g).inverse()
    }

    /// Slot `2(g-1)` for a generator and `2(g-1)+1` for its inverse.
    pub fn from_slot(slot: usize) -> Letter {
        let g = slot / 2 + 1;
        if slot.is_multiple_of(2) {
            Letter::generator(g)
        } else {
            Letter::inverse_of_generator(g)
        }
    }

    pub fn slot(self) -> usize {
        2 * (self.generator_index() - 1) + usize::from(self.is_inverse())
    }

    pub fn generator_index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator_index() as u8 - 1) as char
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter::generator(c as usize - 'a' as usize + 1)),
            'A'..='Z' => Some(Letter::inverse_of_generator(c as usize - 'A' as usize + 1)),
            _ => None,
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.slot().cmp(&other.slot())
    }
}

/// Free reduction by a single left-to-right stack pass.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// A freely reduced word. Ordered shortlex (length first, then letters).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn from_letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters(raw: &[Letter]) -> Word {
        reduce(raw.iter().copied())
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        Word(letters)
    }

    /// Parses the text syntax. Whitespace is ignored and the token `1`
    /// stands for the identity.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Word> {
        if text.trim() == "1" {
            return Ok(Word::identity());
        }
        let mut raw = Vec::with_capacity(text.len());
        for (position, character) in text.chars().enumerate() {
            if character.is_whitespace() {
                continue;
            }
            match Letter::from_char(character) {
                Some(l) if alphabet.contains(l) => raw.push(l),
                _ => return Err(Error::Parse { character, position }),
            }
        }
        Ok(reduce(raw))
    }

    /// Parses with the largest alphabet.
    pub fn parse_any(text: &str) -> Result<Word> {
        Word::parse(text, Alphabet { rank: MAX_RANK })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.len())].to_vec())
    }

    pub fn suffix_from(&self, n: usize) -> Word {
        Word(self.0[n.min(self.len())..].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.generator_index()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let cancel = self
            .0
            .iter()
            .rev()
            .zip(other.0.iter())
            .take_while(|(x, y)| **x == y.inverse())
            .count();
        let mut out = Vec::with_capacity(self.len() + other.len() - 2 * cancel);
        out.extend_from_slice(&self.0[..self.len() - cancel]);
        out.extend_from_slice(&other.0[cancel..]);
        Word(out)
    }

    /// Number of letters cancelled when forming `self * other`.
    pub fn cancellation_with(&self, other: &Word) -> usize {
        self.0
            .iter()
            .rev()
            .zip(other.0.iter())
            .take_while(|(x, y)| **x == y.inverse())
            .count()
    }

    pub fn append(&self, l: Letter) -> Word {
        self.mul(&Word::from_letter(l))
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let n = n.unsigned_abs();
        if n == 0 || self.is_identity() {
            return Word::identity();
        }
        let CyclicDecomposition { conjugator, core } = base
            .cyclic_decompose()
            .expect("non-identity word has a cyclic decomposition");
        let mut core_pow = Vec::with_capacity(core.len() * n as usize);
        for _ in 0..n {
            core_pow.extend_from_slice(&core.0);
        }
        conjugator
            .mul(&Word(core_pow))
            .mul(&conjugator.inverse())
    }

    /// `g * self * g^-1`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Writes `self = w c w^-1` with `c` cyclically reduced and `w` the
    /// maximal cancelling prefix.
    pub fn cyclic_decompose(&self) -> Result<CyclicDecomposition> {
        if self.is_identity() {
            return Err(Error::NoAxis);
        }
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        Ok(CyclicDecomposition {
            conjugator: Word(self.0[..k].to_vec()),
            core: Word(self.0[k..n - k].to_vec()),
        })
    }

    /// Shortest `r` with `self = r^k`.
    pub fn primitive_root(&self) -> Word {
        let n = self.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return Word(self.0[..d].to_vec());
            }
        }
        self.clone()
    }

    /// Cyclic rotation: letters `k..` followed by `..k`.
    pub fn rotate_left(&self, k: usize) -> Word {
        if self.is_empty() {
            return self.clone();
        }
        let k = k % self.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Word::parse_any(&text).map_err(serde::de::Error::custom)
    }
}

/// `word = conjugator * core * conjugator^-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicDecomposition {
    pub conjugator: Word,
    pub core: Word,
}

/// Parses a comma-separated list of words.
pub fn parse_word_list(text: &str, alphabet: Alphabet) -> Result<Vec<Word>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| Word::parse(t, alphabet)).collect()
}

/// All freely reduced words of length exactly `len`, in shortlex order.
pub fn reduced_words_of_length(alphabet: Alphabet, len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * (alphabet.slots() - 1).max(1));
        for w in &out {
            for l in alphabet.letters() {
                if w.last() != Some(l.inverse()) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        out = next;
    }
    out
}

/// All freely reduced words of length at most `max_len`, in shortlex order.
pub fn reduced_words_up_to(alphabet: Alphabet, max_len: usize) -> Vec<Word> {
    (0..=max_len)
        .flat_map(|n| reduced_words_of_length(alphabet, n))
        .collect()
}
