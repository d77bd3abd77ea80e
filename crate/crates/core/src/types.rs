//! Binary sequences and their exchangeability and Markov summaries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An observed binary sequence `z_1, ..., z_N` with `N >= 2`, one byte per bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinarySequence {
    bits: Vec<u8>,
}

impl BinarySequence {
    /// Builds a sequence from values in `{0, 1}`.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some((index, &byte)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(Error::Byte { index, byte });
        }
        if bits.len() < 2 {
            return Err(Error::Length(bits.len()));
        }
        Ok(BinarySequence { bits })
    }

    /// The sequence of length `n` whose bits are the binary digits of `index`,
    /// most significant first. Used to enumerate `{0,1}^n`.
    pub fn from_index(index: u64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Length(n));
        }
        let bits = (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect();
        Ok(BinarySequence { bits })
    }

    /// Raw ingestion: one observation per byte, 0x00 or 0x01.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::new(bytes.to_vec())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinarySequence({self})")
    }
}

impl FromStr for BinarySequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_sequence(s)
    }
}

/// Parses a string over `{'0','1'}`; ASCII whitespace is skipped. Reported
/// symbol positions are character indices into the original text.
pub fn parse_sequence(text: &str) -> Result<BinarySequence> {
    let mut bits = Vec::with_capacity(text.len());
    for (index, symbol) in text.chars().enumerate() {
        match symbol {
            '0' => bits.push(0),
            '1' => bits.push(1),
            c if c.is_ascii_whitespace() => {}
            c => return Err(Error::Symbol { index, symbol: c }),
        }
    }
    if bits.len() < 2 {
        return Err(Error::Length(bits.len()));
    }
    Ok(BinarySequence { bits })
}

/// Counts of zeros and ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExchType {
    pub n0: u64,
    pub n1: u64,
}

impl ExchType {
    pub fn horizon(&self) -> u64 {
        self.n0 + self.n1
    }

    /// Both symbols present.
    pub fn is_mixed(&self) -> bool {
        self.n0 > 0 && self.n1 > 0
    }
}

pub fn exch_type(z: &BinarySequence) -> ExchType {
    let n1 = z.ones() as u64;
    ExchType {
        n0: z.len() as u64 - n1,
        n1,
    }
}

/// The sextuple `(F, N00, N01, N10, N11, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkovType {
    pub first: u8,
    pub n00: u64,
    pub n01: u64,
    pub n10: u64,
    pub n11: u64,
    pub last: u8,
}

impl MarkovType {
    /// Validates the sextuple: endpoints are bits, at least one transition,
    /// and `N01 - N10 = [L=1] - [F=1]`.
    pub fn new(first: u8, n00: u64, n01: u64, n10: u64, n11: u64, last: u8) -> Result<Self> {
        let mt = MarkovType {
            first,
            n00,
            n01,
            n10,
            n11,
            last,
        };
        mt.validate()?;
        Ok(mt)
    }

    pub fn validate(&self) -> Result<()> {
        if self.first > 1 || self.last > 1 {
            return Err(Error::MarkovType("endpoints must be bits".into()));
        }
        if self.transitions() == 0 {
            return Err(Error::MarkovType("no transitions".into()));
        }
        let balance = self.n01 as i128 - self.n10 as i128;
        let expected = self.last as i128 - self.first as i128;
        if balance != expected {
            return Err(Error::MarkovType(format!(
                "N01 - N10 = {balance}, but F={} and L={} require {expected}",
                self.first, self.last
            )));
        }
        // Without a switch away from F, the other symbol is unreachable.
        let (other_out, other_loop) = if self.first == 0 {
            (self.n10, self.n11)
        } else {
            (self.n01, self.n00)
        };
        if self.first_switch() == 0 && (other_out > 0 || other_loop > 0) {
            return Err(Error::MarkovType(
                "transitions on a symbol unreachable from the first bit".into(),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn transitions(&self) -> u64 {
        self.n00 + self.n01 + self.n10 + self.n11
    }

    #[inline]
    pub fn horizon(&self) -> u64 {
        self.transitions() + 1
    }

    /// Number of transitions out of 0.
    #[inline]
    pub fn n0_star(&self) -> u64 {
        self.n00 + self.n01
    }

    /// Number of transitions out of 1.
    #[inline]
    pub fn n1_star(&self) -> u64 {
        self.n10 + self.n11
    }

    pub fn exch(&self) -> ExchType {
        ExchType {
            n0: self.n0_star() + u64::from(self.last == 0),
            n1: self.n1_star() + u64::from(self.last == 1),
        }
    }

    /// `N_{F,1-F}`.
    pub fn first_switch(&self) -> u64 {
        if self.first == 0 {
            self.n01
        } else {
            self.n10
        }
    }
}

pub fn markov_type(z: &BinarySequence) -> MarkovType {
    let bits = z.bits();
    let mut counts = [0u64; 4];
    for w in bits.windows(2) {
        counts[(w[0] * 2 + w[1]) as usize] += 1;
    }
    MarkovType {
        first: bits[0],
        n00: counts[0],
        n01: counts[1],
        n10: counts[2],
        n11: counts[3],
        last: bits[bits.len() - 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(s: &str) -> BinarySequence {
        s.parse().unwrap()
    }

    #[test]
    fn exch_type_examples() {
        assert_eq!(exch_type(&seq("01101")), ExchType { n0: 2, n1: 3 });
        assert_eq!(exch_type(&seq("00000")), ExchType { n0: 5, n1: 0 });
        assert_eq!(exch_type(&seq("1111111")), ExchType { n0: 0, n1: 7 });
    }

    #[test]
    fn markov_type_examples() {
        assert_eq!(
            markov_type(&seq("01101")),
            MarkovType::new(0, 0, 2, 1, 1, 1).unwrap()
        );
        assert_eq!(
            markov_type(&seq("00")),
            MarkovType::new(0, 1, 0, 0, 0, 0).unwrap()
        );
        assert_eq!(
            markov_type(&seq("0101")),
            MarkovType::new(0, 0, 2, 1, 0, 1).unwrap()
        );
    }

    #[test]
    fn parse_examples() {
        assert_eq!(seq("0110").bits(), &[0, 1, 1, 0]);
        assert_eq!(seq("01 10\n").bits(), &[0, 1, 1, 0]);
        assert_eq!(
            parse_sequence("012"),
            Err(Error::Symbol {
                index: 2,
                symbol: '2'
            })
        );
        assert_eq!(parse_sequence("1"), Err(Error::Length(1)));
        assert_eq!(parse_sequence(" \n"), Err(Error::Length(0)));
    }

    #[test]
    fn byte_ingestion() {
        let z = BinarySequence::from_bytes(&[0, 1, 1]).unwrap();
        assert_eq!(z.to_string(), "011");
        assert_eq!(
            BinarySequence::from_bytes(&[0, 2]),
            Err(Error::Byte { index: 1, byte: 2 })
        );
        assert_eq!(BinarySequence::from_bytes(&[1]), Err(Error::Length(1)));
    }

    #[test]
    fn index_enumeration_is_msb_first() {
        assert_eq!(
            BinarySequence::from_index(0b011, 3).unwrap().to_string(),
            "011"
        );
        assert_eq!(
            BinarySequence::from_index(0b100, 3).unwrap().to_string(),
            "100"
        );
    }

    #[test]
    fn rejects_inconsistent_sextuples() {
        assert!(MarkovType::new(0, 0, 1, 1, 0, 1).is_err());
        assert!(MarkovType::new(0, 0, 0, 0, 0, 0).is_err());
        assert!(MarkovType::new(1, 3, 0, 0, 0, 1).is_err());
        assert!(MarkovType::new(0, 1, 0, 0, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn markov_type_invariants(bits in proptest::collection::vec(0u8..2, 2..200)) {
            let z = BinarySequence::new(bits).unwrap();
            let mt = markov_type(&z);
            let et = exch_type(&z);
            prop_assert!(mt.validate().is_ok());
            prop_assert_eq!(mt.horizon(), z.len() as u64);
            prop_assert_eq!(mt.exch(), et);
            prop_assert!(mt.n01.abs_diff(mt.n10) <= 1);
            prop_assert_eq!(mt.n01 == mt.n10, mt.first == mt.last);
            prop_assert_eq!(mt.n0_star() + u64::from(mt.last == 0), et.n0);
            prop_assert_eq!(mt.n1_star() + u64::from(mt.last == 1), et.n1);
        }
    }
}
