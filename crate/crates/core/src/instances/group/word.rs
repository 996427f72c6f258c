//! Freely reduced words. Generator `i` is the letter `i + 1`, its inverse `-(i + 1)`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Letter = i32;

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

/// Generator index of a letter.
pub fn gen_of(l: Letter) -> usize {
    (l.unsigned_abs() - 1) as usize
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        Word(vec![i as Letter + 1])
    }

    /// Reduce an arbitrary letter sequence.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l != 0, "zero is not a letter");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
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

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn mul(&self, other: &Word) -> Self {
        Word::new(self.0.iter().chain(&other.0).copied())
    }

    pub fn pow(&self, k: i32) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::identity(), |acc, _| acc.mul(&base))
    }

    /// Largest generator index used, plus one.
    pub fn rank_needed(&self) -> usize {
        self.0.iter().map(|&l| gen_of(l) + 1).max().unwrap_or(0)
    }

    /// Replace generator `i` by `images[i]`.
    pub fn substitute(&self, images: &[Word]) -> Self {
        let mut out = Vec::new();
        for &l in &self.0 {
            let w = &images[gen_of(l)];
            if l > 0 {
                out.extend_from_slice(&w.0);
            } else {
                out.extend(w.0.iter().rev().map(|x| -x));
            }
        }
        Word::new(out)
    }

    /// Cyclic reduction: the word with matching ends stripped.
    pub fn cyclically_reduced(&self) -> Self {
        let mut s = 0;
        let mut e = self.0.len();
        while e > s + 1 && self.0[s] == -self.0[e - 1] {
            s += 1;
            e -= 1;
        }
        Word(self.0[s..e].to_vec())
    }

    /// All cyclic shifts of a cyclically reduced word.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.0.len();
        (0..n.max(1))
            .map(|i| Word(self.0[i..].iter().chain(&self.0[..i]).copied().collect()))
            .collect()
    }

    /// Generators occurring in the word.
    pub fn support(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.0.iter().map(|&l| gen_of(l)).collect();
        g.sort_unstable();
        g.dedup();
        g
    }
}

/// `a`–`z` are generators 0–25, upper case their inverses; `1` or the empty
/// string is the identity.
impl std::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for c in s.chars() {
            let l = match c {
                'a'..='z' => (c as u8 - b'a') as Letter + 1,
                'A'..='Z' => -((c as u8 - b'A') as Letter + 1),
                _ => return Err(Error::Parse(format!("bad letter {c:?} in word {s:?}"))),
            };
            letters.push(l);
        }
        Ok(Word::new(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.0 {
            let i = gen_of(l) as u8;
            let c = if l > 0 { b'a' + i } else { b'A' + i };
            write!(f, "{}", c as char)?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a word, panicking on bad input; for literals in code and tests.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_prints() {
        assert_eq!(w("aA"), Word::identity());
        assert_eq!(w("abBc").to_string(), "ac");
        assert_eq!(w("1").to_string(), "1");
        assert_eq!(w("ab").inverse(), w("BA"));
        assert!("a1".parse::<Word>().is_err());
    }

    #[test]
    fn substitution_and_rotation() {
        assert_eq!(w("aB").substitute(&[w("ab"), w("b")]), w("a"));
        assert_eq!(w("bab").cyclically_reduced(), w("bab"));
        assert_eq!(w("baB").cyclically_reduced(), w("a"));
        assert_eq!(w("abc").rotations(), vec![w("abc"), w("bca"), w("cab")]);
        assert_eq!(w("ab").pow(-2), w("BABA"));
    }

    #[test]
    fn serde_as_string() {
        let s = serde_json::to_string(&w("aBc")).unwrap();
        assert_eq!(s, "\"aBc\"");
        assert_eq!(serde_json::from_str::<Word>(&s).unwrap(), w("aBc"));
    }
}
