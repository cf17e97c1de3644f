//! Packed binary vectors.
//!
//! [`BitVector`] is an arbitrary-length, word-packed bit string used for
//! syndromes and class labels. [`BitBlock`] wraps it with the power-of-two
//! length invariant required by the polar transform.

use std::fmt;
use std::ops::{BitXor, BitXorAssign, Deref};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("block length {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("symbol {symbol} at position {position} is not binary")]
    NotBinary { position: usize, symbol: u8 },
    #[error("cannot parse bit string: unexpected character {0:?}")]
    Parse(char),
}

/// Word-packed bit string. Bit `i` lives in word `i / 64` at position `i % 64`;
/// bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds from a slice of symbols, each of which must be 0 or 1.
    pub fn from_symbols(symbols: &[u8]) -> Result<Self, BitsError> {
        let mut v = Self::zeros(symbols.len());
        for (position, &symbol) in symbols.iter().enumerate() {
            match symbol {
                0 => {}
                1 => v.set(position, true),
                _ => return Err(BitsError::NotBinary { position, symbol }),
            }
        }
        Ok(v)
    }

    /// Lowest `len` bits of `word`, bit `i` of the word becoming position `i`.
    pub fn from_u64(word: u64, len: usize) -> Self {
        assert!(len <= WORD);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = word;
            v.clear_tail();
        }
        v
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions of set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (w, &word) in self.words.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                out.push(w * WORD + b);
                rest &= rest - 1;
            }
        }
        out
    }

    /// Bits at `positions`, in the given order.
    pub fn gather(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (k, &i) in positions.iter().enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    pub fn to_symbols(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl std::str::FromStr for BitVector {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(BitsError::Parse(other)),
            }
        }
        Ok(v)
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of bit vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A bit vector whose length is `N = 2^n` with `n >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct BitBlock(BitVector);

impl BitBlock {
    pub fn new(bits: BitVector) -> Result<Self, BitsError> {
        check_block_len(bits.len())?;
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Result<Self, BitsError> {
        Self::new(BitVector::zeros(len))
    }

    pub fn ones(len: usize) -> Result<Self, BitsError> {
        Self::new(BitVector::ones(len))
    }

    pub fn from_symbols(symbols: &[u8]) -> Result<Self, BitsError> {
        Self::new(BitVector::from_symbols(symbols)?)
    }

    /// The unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Result<Self, BitsError> {
        let mut b = Self::zeros(len)?;
        b.set(index, true);
        Ok(b)
    }

    pub(crate) fn from_vector_unchecked(bits: BitVector) -> Self {
        debug_assert!(check_block_len(bits.len()).is_ok());
        Self(bits)
    }

    /// Log2 of the length.
    pub fn log_len(&self) -> usize {
        self.0.len.trailing_zeros() as usize
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.0.set(i, value);
    }

    pub fn flip(&mut self, i: usize) {
        self.0.flip(i);
    }

    pub fn as_vector(&self) -> &BitVector {
        &self.0
    }

    pub fn into_vector(self) -> BitVector {
        self.0
    }

    /// In-place polar transform `self <- self * F^{(x)n}`.
    pub fn transform_in_place(&mut self) {
        transform_words(&mut self.0.words, self.0.len);
    }

    /// Returns `self * F^{(x)n}`.
    pub fn transformed(&self) -> BitBlock {
        let mut out = self.clone();
        out.transform_in_place();
        out
    }

    /// Index complement: position `i` moves to `N - 1 - i`.
    pub fn reversed(&self) -> BitBlock {
        let len = self.0.len;
        let words = if len < WORD {
            vec![self.0.words[0].reverse_bits() >> (WORD - len)]
        } else {
            self.0.words.iter().rev().map(|w| w.reverse_bits()).collect()
        };
        BitBlock(BitVector { len, words })
    }
}

impl Deref for BitBlock {
    type Target = BitVector;

    fn deref(&self) -> &BitVector {
        &self.0
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock({})", self.0)
    }
}

impl BitXorAssign<&BitBlock> for BitBlock {
    fn bitxor_assign(&mut self, rhs: &BitBlock) {
        self.0 ^= &rhs.0;
    }
}

impl BitXor for &BitBlock {
    type Output = BitBlock;

    fn bitxor(self, rhs: &BitBlock) -> BitBlock {
        BitBlock(&self.0 ^ &rhs.0)
    }
}

impl<'de> Deserialize<'de> for BitBlock {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = BitVector::deserialize(deserializer)?;
        BitBlock::new(v).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_block_len(len: usize) -> Result<(), BitsError> {
    if len >= 2 && len.is_power_of_two() {
        Ok(())
    } else {
        Err(BitsError::NotPowerOfTwo(len))
    }
}

// For butterfly span h < 64, positions with (i & h) == 0 within a word.
const LOW_HALF_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Butterfly `x[i] ^= x[i + h]` for every block of `2h` and every span `h`.
fn transform_words(words: &mut [u64], len: usize) {
    let mut h = 1usize;
    let mut stage = 0usize;
    while h < len && h < WORD {
        let mask = LOW_HALF_MASKS[stage];
        for w in words.iter_mut() {
            *w ^= (*w >> h) & mask;
        }
        h <<= 1;
        stage += 1;
    }
    while h < len {
        let span = h / WORD;
        for block in words.chunks_mut(2 * span) {
            let (lo, hi) = block.split_at_mut(span);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= b;
            }
        }
        h <<= 1;
    }
}

/// `u * F^{(x)n}` for a block of symbols given as a [`BitBlock`].
pub fn polar_transform(u: &BitBlock) -> BitBlock {
    u.transformed()
}

/// Row `i` of `F^{(x)n}`.
pub fn transform_row(len: usize, i: usize) -> Result<BitBlock, BitsError> {
    Ok(BitBlock::unit(len, i)?.transformed())
}
