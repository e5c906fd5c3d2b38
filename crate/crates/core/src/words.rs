//! Words and conjugacy classes in a finitely generated free group.
//!
//! Letters are encoded so that `g_i` has code `2(i-1)` and `g_i^{-1}` has code
//! `2(i-1)+1`. The inverse of a code is `code ^ 1`, and comparing codes gives
//! the fixed letter order `g1 < g1^-1 < g2 < g2^-1 < ...`. Words print as
//! `a`, `A`, `b`, `B`, ... with upper case marking the inverse.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported rank; words print with one ASCII letter per generator.
pub const MAX_RANK: usize = 26;

/// Default cap on the number of classes a single enumeration may produce.
pub const DEFAULT_CLASS_BUDGET: u64 = 10_000_000;

/// Human readable description of the letter order, echoed into run metadata.
pub const LETTER_ORDER: &str = "g1 < g1^-1 < g2 < g2^-1 < ... (printed a < A < b < B < ...)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    /// Letter for a signed generator index (`+i` is `g_i`, `-i` its inverse).
    pub fn from_signed(alphabet: Alphabet, index: i32) -> Result<Self> {
        let gen = index.unsigned_abs() as usize;
        if index == 0 || gen > alphabet.rank() {
            return Err(Error::InvalidInput(format!(
                "letter index {index} outside alphabet of rank {}",
                alphabet.rank()
            )));
        }
        let base = 2 * (gen - 1) as u8;
        Ok(Letter(if index > 0 { base } else { base + 1 }))
    }

    pub fn from_code(code: u8) -> Self {
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    /// Zero-based generator index.
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn signed(self) -> i32 {
        let g = self.generator() as i32 + 1;
        if self.is_inverse() {
            -g
        } else {
            g
        }
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::InvalidInput(format!(
                "alphabet rank must be in 1..={MAX_RANK}, got {rank}"
            )));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of letters including formal inverses.
    pub fn size(&self) -> usize {
        2 * self.rank
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size() as u8).map(Letter)
    }

    fn contains(&self, l: Letter) -> bool {
        (l.0 as usize) < self.size()
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters(alphabet: Alphabet, letters: &[Letter]) -> Result<Self> {
        if let Some(bad) = letters.iter().find(|l| !alphabet.contains(**l)) {
            return Err(Error::InvalidInput(format!(
                "letter code {} outside alphabet of rank {}",
                bad.0,
                alphabet.rank()
            )));
        }
        Ok(Word {
            letters: reduce_stack(letters.iter().copied()),
        })
    }

    /// Parses `aBba`-style text and reduces it.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let mut raw = Vec::with_capacity(text.len());
        for c in text.chars().filter(|c| !c.is_whitespace()) {
            if !c.is_ascii_alphabetic() {
                return Err(Error::InvalidInput(format!("unexpected character {c:?} in word")));
            }
            let gen = (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1;
            raw.push(if c.is_ascii_uppercase() { -gen } else { gen });
        }
        free_reduce(alphabet, &raw)
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
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Product in the free group.
    pub fn mul(&self, other: &Word) -> Word {
        Word {
            letters: reduce_stack(self.letters.iter().chain(other.letters.iter()).copied()),
        }
    }

    pub fn pow(&self, n: usize) -> Word {
        let mut out = Word::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(f), Some(l)) => self.letters.len() == 1 || *f != l.inverse(),
            _ => true,
        }
    }

    /// Rotation by `k` positions (only meaningful for cyclically reduced words).
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        Word { letters }
    }

    pub fn signed(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.signed()).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

fn reduce_stack(letters: impl Iterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Freely reduces a sequence of signed generator indices.
pub fn free_reduce(alphabet: Alphabet, letters: &[i32]) -> Result<Word> {
    let letters = letters
        .iter()
        .map(|&i| Letter::from_signed(alphabet, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Word {
        letters: reduce_stack(letters.into_iter()),
    })
}

/// Splits `w` as `conjugator * core * conjugator^-1` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let letters = w.letters();
    let (mut lo, mut hi) = (0usize, letters.len());
    while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    (
        Word {
            letters: letters[lo..hi].to_vec(),
        },
        Word {
            letters: letters[..lo].to_vec(),
        },
    )
}

/// Booth's algorithm: smallest index of the lexicographically least rotation.
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: isize| &s[i as usize % n];
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: isize = 0;
    for j in 1..(2 * n) as isize {
        let sj = at(j);
        let mut i = f[(j - k - 1) as usize];
        while i != -1 && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = f[i as usize];
        }
        if sj != at(k + i + 1) {
            // i == -1 here
            if sj < at(k) {
                k = j;
            }
            f[(j - k) as usize] = -1;
        } else {
            f[(j - k) as usize] = i + 1;
        }
    }
    k as usize % n
}

/// Smallest `p` dividing `len` such that `s` is invariant under rotation by `p`.
pub fn cyclic_period<T: Eq>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    // KMP failure function; the string period divides n iff s is a proper power
    let mut fail = vec![0usize; n + 1];
    let mut k = 0usize;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    let p = n - fail[n];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

/// Canonical representative of a nontrivial conjugacy class: the least rotation
/// of a cyclically reduced word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn as_word(&self) -> Word {
        Word {
            letters: self.letters.clone(),
        }
    }

    /// Representative starting at position `k` of the cycle.
    pub fn rotation(&self, k: usize) -> Word {
        self.as_word().rotate(k)
    }

    pub fn period(&self) -> usize {
        cyclic_period(&self.letters)
    }

    pub fn is_primitive(&self) -> bool {
        self.period() == self.len()
    }

    /// Primitive root and exponent, `self = root^exponent`.
    pub fn root(&self) -> (CyclicWord, usize) {
        let p = self.period();
        (
            CyclicWord {
                letters: self.letters[..p].to_vec(),
            },
            self.len() / p,
        )
    }

    /// Canonical class of `self^n`; powers of a least rotation stay least.
    pub fn power(&self, n: usize) -> CyclicWord {
        CyclicWord {
            letters: self.letters.repeat(n),
        }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

pub fn canonical_class(w: &Word) -> Result<CyclicWord> {
    let (core, _) = cyclic_reduce(w);
    if core.is_empty() {
        return Err(Error::EmptyClass);
    }
    let k = least_rotation(core.letters());
    Ok(CyclicWord {
        letters: core.rotate(k).letters,
    })
}

/// Which classes a counting run includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    #[default]
    All,
    Primitive,
}

impl CountMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMode::All => "all",
            CountMode::Primitive => "primitive",
        }
    }
}

impl std::str::FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(CountMode::All),
            "primitive" => Ok(CountMode::Primitive),
            other => Err(Error::InvalidConfig(format!(
                "mode must be `all` or `primitive`, got `{other}`"
            ))),
        }
    }
}

/// Number of cyclically reduced words of length `n` in the free group of rank `r`.
pub fn cyclically_reduced_count(rank: usize, n: usize) -> u128 {
    let r = rank as u128;
    let odd = n % 2 == 1;
    let base = (2 * r - 1).pow(n as u32) + 1;
    if odd {
        base
    } else {
        base + 2 * (r - 1)
    }
}

/// Number of conjugacy classes of cyclic length exactly `n` (necklace count).
pub fn class_count(rank: usize, n: usize) -> u128 {
    let total: u128 = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| euler_phi(n / d) as u128 * cyclically_reduced_count(rank, d))
        .sum();
    total / n as u128
}

fn euler_phi(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// All classes of cyclic length exactly `len` whose canonical word starts with
/// `prefix`, in lexicographic order. Distinct prefixes of a common length
/// partition the classes of that length.
pub fn classes_with_prefix(
    alphabet: Alphabet,
    len: usize,
    prefix: &[Letter],
    mode: CountMode,
) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    if len == 0 || prefix.len() > len {
        return out;
    }
    if prefix.windows(2).any(|p| p[1] == p[0].inverse()) {
        return out;
    }
    if let Some(first) = prefix.first() {
        // a least rotation starts with its smallest letter
        if prefix.iter().any(|l| l < first) {
            return out;
        }
    }
    let mut buf = prefix.to_vec();
    extend_canonical(alphabet, len, mode, &mut buf, &mut out);
    out
}

fn extend_canonical(
    alphabet: Alphabet,
    len: usize,
    mode: CountMode,
    buf: &mut Vec<Letter>,
    out: &mut Vec<CyclicWord>,
) {
    if buf.len() == len {
        let first = buf[0];
        let last = buf[len - 1];
        if len > 1 && first == last.inverse() {
            return;
        }
        if least_rotation(buf) != 0 {
            return;
        }
        if mode == CountMode::Primitive && cyclic_period(buf) != len {
            return;
        }
        out.push(CyclicWord {
            letters: buf.clone(),
        });
        return;
    }
    let first = buf.first().copied();
    let prev = buf.last().copied();
    for l in alphabet.letters() {
        if let Some(f) = first {
            if l < f {
                continue;
            }
        }
        if prev == Some(l.inverse()) {
            continue;
        }
        buf.push(l);
        extend_canonical(alphabet, len, mode, buf, out);
        buf.pop();
    }
}

/// Upper bound on the number of classes up to `max_len`, used for budget checks.
pub fn estimated_classes(rank: usize, max_len: usize) -> u128 {
    (1..=max_len).map(|n| class_count(rank, n)).sum()
}

/// Every conjugacy class of cyclic length `1..=max_len`, in length-lexicographic
/// order. Lengths are split into prefix chunks processed in parallel on the
/// current rayon pool; the merged order does not depend on the pool size.
pub fn enumerate_classes(
    alphabet: Alphabet,
    max_len: usize,
    mode: CountMode,
) -> Result<Vec<CyclicWord>> {
    enumerate_classes_with_budget(alphabet, max_len, mode, DEFAULT_CLASS_BUDGET)
}

pub fn enumerate_classes_with_budget(
    alphabet: Alphabet,
    max_len: usize,
    mode: CountMode,
    budget: u64,
) -> Result<Vec<CyclicWord>> {
    if max_len == 0 {
        return Err(Error::InvalidInput("max_len must be at least 1".into()));
    }
    let estimate = estimated_classes(alphabet.rank(), max_len);
    if estimate > budget as u128 {
        return Err(Error::ResourceLimit(format!(
            "rank {} up to length {max_len} has {estimate} classes, budget is {budget}",
            alphabet.rank()
        )));
    }
    let mut all = Vec::with_capacity(estimate as usize);
    for len in 1..=max_len {
        let prefixes = prefixes(alphabet, len.min(prefix_depth(alphabet, len)));
        let chunks: Vec<Vec<CyclicWord>> = prefixes
            .par_iter()
            .map(|p| classes_with_prefix(alphabet, len, p, mode))
            .collect();
        all.extend(chunks.into_iter().flatten());
    }
    Ok(all)
}

fn prefix_depth(alphabet: Alphabet, len: usize) -> usize {
    if len < 8 {
        return 1;
    }
    // enough chunks to keep a handful of workers busy
    let branching = (2 * alphabet.rank() - 1).max(2);
    let mut depth = 1;
    let mut chunks = 2 * alphabet.rank();
    while chunks < 256 && depth < len - 4 {
        chunks *= branching;
        depth += 1;
    }
    depth
}

/// Freely reduced prefixes of the given length whose letters are all at least
/// the first letter, in lexicographic order.
fn prefixes(alphabet: Alphabet, depth: usize) -> Vec<Vec<Letter>> {
    let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &level {
            for l in alphabet.letters() {
                if let Some(f) = p.first() {
                    if l < *f {
                        continue;
                    }
                }
                if p.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut q = p.clone();
                q.push(l);
                next.push(q);
            }
        }
        level = next;
    }
    level
}
