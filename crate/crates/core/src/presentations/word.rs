use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One syllable `g^e` of a word, `e != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub exp: i32,
}

/// Freely reduced word in numbered generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (usize, i32)>) -> Word {
        let mut w = Word::empty();
        for (gen, exp) in letters {
            w.push(gen, exp);
        }
        w
    }

    pub fn generator(gen: usize) -> Word {
        Word::from_letters([(gen, 1)])
    }

    /// Append `g^e`, merging with the last syllable.
    pub fn push(&mut self, gen: usize, exp: i32) {
        if exp == 0 {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if last.gen == gen {
                last.exp += exp;
                if last.exp == 0 {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push(Letter { gen, exp });
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of generator occurrences.
    pub fn length(&self) -> usize {
        self.0.iter().map(|l| l.exp.unsigned_abs() as usize).sum()
    }

    /// The word spelled out letter by letter as (generator, +-1).
    pub fn expanded(&self) -> impl Iterator<Item = (usize, i32)> + '_ {
        self.0.iter().flat_map(|l| std::iter::repeat_n((l.gen, l.exp.signum()), l.exp.unsigned_abs() as usize))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for l in &other.0 {
            w.push(l.gen, l.exp);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word::from_letters(self.0.iter().rev().map(|l| (l.gen, -l.exp)))
    }

    pub fn pow(&self, e: i32) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = Word::empty();
        for _ in 0..e.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    /// Parse a word over `names`: juxtaposed factors `X`, `X^e`, `(w)^e` and
    /// commutators `[u, v] = u v u^-1 v^-1`.
    pub fn parse(s: &str, names: &[String]) -> Result<Word> {
        let mut p = Parser { chars: s.chars().collect(), pos: 0, names };
        let w = p.word()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.error("unexpected character"));
        }
        Ok(w)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        WordDisplay { word: self, names }
    }
}

struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.word.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&self.names[l.gen])?;
            if l.exp != 1 {
                write!(f, "^{}", l.exp)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        let s: String = self.chars.iter().collect();
        Error::CorruptData(format!("{msg} at position {} in word {s:?}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::empty();
        while let Some(c) = self.peek() {
            if c == ')' || c == ']' || c == ',' {
                break;
            }
            let f = self.factor()?;
            w = w.concat(&f);
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word> {
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(')')?;
                w
            }
            Some('[') => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(',')?;
                let v = self.word()?;
                self.expect(']')?;
                u.concat(&v).concat(&u.inverse()).concat(&v.inverse())
            }
            Some('1') => {
                self.pos += 1;
                Word::empty()
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let gen = self
                    .names
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| self.error(&format!("unknown generator {name:?}")))?;
                Word::generator(gen)
            }
            _ => return Err(self.error("expected a generator")),
        };
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            if self.chars.get(self.pos) == Some(&'-') {
                self.pos += 1;
            }
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: i32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.error("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["A", "B", "U"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_reduce() {
        let n = names();
        let w = Word::parse("(B U^-1 B U)^2", &n).unwrap();
        assert_eq!(w.length(), 8);
        let c = Word::parse("[A, U]", &n).unwrap();
        assert_eq!(c, Word::from_letters([(0, 1), (2, 1), (0, -1), (2, -1)]));
        assert!(Word::parse("A A^-1", &n).unwrap().is_empty());
        assert_eq!(Word::parse("B^2", &n).unwrap().letters(), &[Letter { gen: 1, exp: 2 }]);
        assert!(Word::parse("X", &n).is_err());
        assert_eq!(format!("{}", Word::parse("A B^-2 U", &n).unwrap().display(&n)), "A B^-2 U");
    }

    #[test]
    fn inverse_cancels() {
        let n = names();
        let w = Word::parse("A B U^3 B^-1", &n).unwrap();
        assert!(w.concat(&w.inverse()).is_empty());
    }
}
