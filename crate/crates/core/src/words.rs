//! Eventually periodic words u v^∞ over a small alphabet.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

/// u v^∞ with v nonempty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub pre: Vec<u8>,
    pub period: Vec<u8>,
}

impl Word {
    pub fn new(pre: Vec<u8>, period: Vec<u8>) -> Self {
        assert!(!period.is_empty(), "empty period");
        Word { pre, period }.canonical()
    }

    pub fn periodic(period: Vec<u8>) -> Self {
        Word::new(vec![], period)
    }

    pub fn digit(&self, i: usize) -> u8 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.digit(i)).collect()
    }

    /// σ^k.
    pub fn shift(&self, k: usize) -> Word {
        if k <= self.pre.len() {
            return Word::new(self.pre[k..].to_vec(), self.period.clone());
        }
        let r = (k - self.pre.len()) % self.period.len();
        let mut p = self.period[r..].to_vec();
        p.extend_from_slice(&self.period[..r]);
        Word::new(vec![], p)
    }

    /// Digitwise 1 − d.
    pub fn reflect(&self) -> Word {
        Word::new(self.pre.iter().map(|d| 1 - d).collect(), self.period.iter().map(|d| 1 - d).collect())
    }

    pub fn ends_in_zeros(&self) -> bool {
        self.period.iter().all(|&d| d == 0)
    }

    /// Length after which both words are jointly periodic, plus one joint period.
    fn horizon(&self, o: &Word) -> usize {
        self.pre.len().max(o.pre.len()) + self.period.len().lcm(&o.period.len())
    }

    pub fn lex_cmp(&self, o: &Word) -> Ordering {
        let n = self.horizon(o);
        for i in 0..n {
            match self.digit(i).cmp(&o.digit(i)) {
                Ordering::Equal => continue,
                c => return c,
            }
        }
        Ordering::Equal
    }

    /// Shortest preperiod and primitive period.
    fn canonical(self) -> Word {
        let mut period = self.period;
        // primitive period
        let n = period.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (0..n).all(|i| period[i] == period[i % d]) {
                period.truncate(d);
                break;
            }
        }
        let mut pre = self.pre;
        // absorb trailing preperiod letters into a rotated period
        while let Some(&last) = pre.last() {
            if last == *period.last().unwrap() {
                pre.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Word { pre, period }
    }

    /// Parses `"pre(period)"`; digits are single characters 0-9.
    pub fn parse(s: &str) -> Option<Word> {
        let s = s.trim();
        let open = s.find('(')?;
        if !s.ends_with(')') {
            return None;
        }
        let digits = |t: &str| -> Option<Vec<u8>> { t.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect() };
        let pre = digits(&s[..open])?;
        let period = digits(&s[open + 1..s.len() - 1])?;
        if period.is_empty() {
            return None;
        }
        Some(Word::new(pre, period))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |v: &[u8]| v.iter().map(|x| char::from(b'0' + x)).collect::<String>();
        write!(f, "{}({})", d(&self.pre), d(&self.period))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let d = |v: &[u8]| v.iter().map(|x| char::from(b'0' + x)).collect::<String>();
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("preperiod", &d(&self.pre))?;
        m.serialize_entry("period", &d(&self.period))?;
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let w = Word::new(vec![1, 1, 0], vec![1, 1, 0]);
        assert_eq!(w.to_string(), "(110)");
        let w = Word::new(vec![0, 1], vec![0, 1, 0, 1]);
        assert_eq!(w.to_string(), "(01)");
        assert_eq!(Word::parse("0(0)").unwrap().to_string(), "(0)");
    }

    #[test]
    fn shifts_and_order() {
        let w = Word::parse("(110)").unwrap();
        assert_eq!(w.shift(1).to_string(), "(101)");
        assert_eq!(w.shift(5).to_string(), "(011)");
        assert_eq!(Word::parse("(10)").unwrap().lex_cmp(&w), Ordering::Less);
        assert_eq!(Word::parse("11(0)").unwrap().lex_cmp(&Word::parse("1(10)").unwrap()), Ordering::Less);
        assert_eq!(Word::parse("1(01)").unwrap().lex_cmp(&Word::parse("(10)").unwrap()), Ordering::Equal);
    }
}
