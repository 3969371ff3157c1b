use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Plain bit vector with rank/select support.
///
/// Positions are 1-based, rank arguments are prefix lengths (`0..=len`),
/// matching the usual `rank(x, i)` / `select(x, i)` conventions with
/// `rank(x, 0) = select(x, 0) = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
    /// Cumulative ones at every `sample_words` word boundary.
    samples: Vec<u64>,
    sample_words: usize,
    ones: u64,
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector[")?;
        for i in 1..=self.len.min(128) {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        if self.len > 128 {
            write!(f, "... len={}", self.len)?;
        }
        write!(f, "]")
    }
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - x.saturating_sub(1).leading_zeros()) as usize
}

impl BitVector {
    pub fn from_bits(bits: &[bool]) -> BitVector {
        let len = bits.len();
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1u64 << (i % 64);
            }
        }
        BitVector::from_words(len, words)
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> bool) -> BitVector {
        let bits: Vec<bool> = (1..=len).map(f).collect();
        BitVector::from_bits(&bits)
    }

    fn from_words(len: usize, words: Vec<u64>) -> BitVector {
        debug_assert_eq!(words.len(), len.div_ceil(64));
        let sample_words = ceil_log2(len + 1).max(1);
        let mut samples = Vec::with_capacity(words.len() / sample_words + 1);
        let mut acc = 0u64;
        for (i, w) in words.iter().enumerate() {
            if i % sample_words == 0 {
                samples.push(acc);
            }
            acc += w.count_ones() as u64;
        }
        if samples.is_empty() {
            samples.push(0);
        }
        BitVector { len, words, samples, sample_words, ones: acc }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    pub fn count_zeros(&self) -> u64 {
        self.len as u64 - self.ones
    }

    /// Bit at 1-based position.
    pub fn get(&self, pos: usize) -> bool {
        assert!(1 <= pos && pos <= self.len, "bit index {pos} out of 1..={}", self.len);
        let i = pos - 1;
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of ones among the first `i` bits.
    pub fn rank1(&self, i: usize) -> Result<u64> {
        if i > self.len {
            return Err(Error::range(format!("rank index {i} exceeds length {}", self.len)));
        }
        let full_words = i / 64;
        let sample_idx = (full_words / self.sample_words).min(self.samples.len() - 1);
        let mut acc = self.samples[sample_idx];
        for w in sample_idx * self.sample_words..full_words {
            acc += self.words[w].count_ones() as u64;
        }
        let rem = i % 64;
        if rem > 0 {
            let mask = (1u64 << rem) - 1;
            acc += (self.words[full_words] & mask).count_ones() as u64;
        }
        Ok(acc)
    }

    pub fn rank0(&self, i: usize) -> Result<u64> {
        Ok(i as u64 - self.rank1(i)?)
    }

    /// 1-based position of the `j`-th one; `select1(0) = 0`.
    pub fn select1(&self, j: u64) -> Result<usize> {
        self.select_impl(j, true)
    }

    /// 1-based position of the `j`-th zero; `select0(0) = 0`.
    pub fn select0(&self, j: u64) -> Result<usize> {
        self.select_impl(j, false)
    }

    fn select_impl(&self, j: u64, one: bool) -> Result<usize> {
        if j == 0 {
            return Ok(0);
        }
        let total = if one { self.ones } else { self.count_zeros() };
        if j > total {
            return Err(Error::SelectNotFound { symbol: one as u8, ordinal: j as usize });
        }
        // Binary search over samples for the last block whose prefix count < j.
        let count_at = |sample_idx: usize| -> u64 {
            let s = self.samples[sample_idx];
            if one {
                s
            } else {
                (sample_idx * self.sample_words * 64).min(self.len) as u64 - s
            }
        };
        let (mut lo, mut hi) = (0usize, self.samples.len() - 1);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if count_at(mid) < j {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let mut acc = count_at(lo);
        let mut word_idx = lo * self.sample_words;
        loop {
            let w = if one { self.words[word_idx] } else { !self.words[word_idx] };
            let mut in_word = w.count_ones() as u64;
            if word_idx == self.words.len() - 1 && self.len % 64 != 0 {
                let mask = (1u64 << (self.len % 64)) - 1;
                in_word = (w & mask).count_ones() as u64;
            }
            if acc + in_word >= j {
                let mut need = j - acc;
                for bit in 0..64 {
                    if (w >> bit) & 1 == 1 {
                        need -= 1;
                        if need == 0 {
                            return Ok(word_idx * 64 + bit + 1);
                        }
                    }
                }
                unreachable!("select scan failed");
            }
            acc += in_word;
            word_idx += 1;
        }
    }

    /// Bits of payload (the bit data itself).
    pub fn payload_bits(&self) -> u64 {
        self.len as u64
    }

    /// Bits spent on the rank index. Bounded by `4 n / lg n + 128` for this
    /// sampling scheme.
    pub fn index_bits(&self) -> u64 {
        (self.samples.len() as u64) * 64 + 64
    }

    /// Serializes as magic `TKB1`, version u32, length u64, mode u8 (0 = plain
    /// bits), then payload bytes MSB-first within each byte. Little-endian
    /// integers. The rank index is rebuilt on load.
    pub fn serialize<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(b"TKB1")?;
        out.write_all(&1u32.to_le_bytes())?;
        out.write_all(&(self.len as u64).to_le_bytes())?;
        out.write_all(&[0u8])?;
        out.write_all(&self.payload_bytes())?;
        Ok(())
    }

    pub(crate) fn payload_bytes(&self) -> Vec<u8> {
        let mut bytes = vec![0u8; self.len.div_ceil(8)];
        for i in 0..self.len {
            if (self.words[i / 64] >> (i % 64)) & 1 == 1 {
                bytes[i / 8] |= 0x80 >> (i % 8);
            }
        }
        bytes
    }

    pub(crate) fn from_payload_bytes(len: usize, bytes: &[u8]) -> Result<BitVector> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::format("bit payload length mismatch"));
        }
        let mut words = vec![0u64; len.div_ceil(64)];
        for i in 0..len {
            if (bytes[i / 8] >> (7 - i % 8)) & 1 == 1 {
                words[i / 64] |= 1u64 << (i % 64);
            }
        }
        Ok(BitVector::from_words(len, words))
    }

    pub fn deserialize<R: Read>(input: &mut R) -> Result<BitVector> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != b"TKB1" {
            return Err(Error::format("bad magic, expected TKB1"));
        }
        let mut v4 = [0u8; 4];
        input.read_exact(&mut v4)?;
        if u32::from_le_bytes(v4) != 1 {
            return Err(Error::format("unsupported TKB1 version"));
        }
        let mut l8 = [0u8; 8];
        input.read_exact(&mut l8)?;
        let len = u64::from_le_bytes(l8) as usize;
        let mut mode = [0u8; 1];
        input.read_exact(&mut mode)?;
        if mode[0] != 0 {
            return Err(Error::format("expected plain-bit mode 0"));
        }
        let mut bytes = vec![0u8; len.div_ceil(8)];
        input.read_exact(&mut bytes)?;
        BitVector::from_payload_bytes(len, &bytes)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len).map(move |i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_rank1(bits: &[bool], i: usize) -> u64 {
        bits[..i].iter().filter(|&&b| b).count() as u64
    }

    #[test]
    fn rank_select_small() {
        let bv = BitVector::from_bits(&[true, false, false, true, true]);
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert_eq!(bv.rank1(1).unwrap(), 1);
        assert_eq!(bv.rank1(4).unwrap(), 2);
        assert_eq!(bv.rank1(5).unwrap(), 3);
        assert_eq!(bv.rank0(5).unwrap(), 2);
        assert_eq!(bv.select1(0).unwrap(), 0);
        assert_eq!(bv.select1(2).unwrap(), 4);
        assert_eq!(bv.select0(2).unwrap(), 3);
        assert!(bv.select1(4).is_err());
        assert!(bv.rank1(6).is_err());
    }

    #[test]
    fn empty_vector() {
        let bv = BitVector::from_bits(&[]);
        assert_eq!(bv.len(), 0);
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert_eq!(bv.select1(0).unwrap(), 0);
    }

    #[test]
    fn index_overhead_stays_sublinear() {
        // Documented accounting: index_bits <= 4 n / lg n + 128 for n >= 2^10.
        for exp in [10usize, 12, 14, 16, 18] {
            let n = 1usize << exp;
            let bv = BitVector::from_fn(n, |i| i % 3 == 0);
            let budget = 4.0 * n as f64 / (n as f64).log2() + 128.0;
            assert!(
                (bv.index_bits() as f64) <= budget,
                "n={n}: index {} > budget {budget}",
                bv.index_bits()
            );
        }
    }

    #[test]
    fn rank_at_exact_sample_multiples() {
        // len chosen so the word count is a multiple of the sample spacing.
        for len in [640usize, 1280, 704] {
            let bv = BitVector::from_fn(len, |i| i % 2 == 1);
            assert_eq!(bv.rank1(len).unwrap(), (len / 2) as u64);
            assert_eq!(bv.select1((len / 2) as u64).unwrap(), len - 1);
        }
    }

    #[test]
    fn serialization_round_trip() {
        let bv = BitVector::from_fn(1000, |i| (i * 7) % 11 < 4);
        let mut buf = Vec::new();
        bv.serialize(&mut buf).unwrap();
        let back = BitVector::deserialize(&mut &buf[..]).unwrap();
        assert_eq!(bv, back);
    }

    proptest! {
        #[test]
        fn rank_matches_naive(bits in proptest::collection::vec(any::<bool>(), 0..400)) {
            let bv = BitVector::from_bits(&bits);
            for i in 0..=bits.len() {
                prop_assert_eq!(bv.rank1(i).unwrap(), naive_rank1(&bits, i));
                prop_assert_eq!(bv.rank0(i).unwrap() + bv.rank1(i).unwrap(), i as u64);
            }
        }

        #[test]
        fn select_inverts_rank(bits in proptest::collection::vec(any::<bool>(), 1..400)) {
            let bv = BitVector::from_bits(&bits);
            for j in 1..=bv.count_ones() {
                let p = bv.select1(j).unwrap();
                prop_assert!(bv.get(p));
                prop_assert_eq!(bv.rank1(p).unwrap(), j);
            }
            for j in 1..=bv.count_zeros() {
                let p = bv.select0(j).unwrap();
                prop_assert!(!bv.get(p));
                prop_assert_eq!(bv.rank0(p).unwrap(), j);
            }
        }
    }
}
