use std::io::{Read, Write};

use num_bigint::BigUint;

use crate::error::{Error, Result};

use super::ternary_entropy_bound_bits;

const LANE_MASK: u64 = 0x5555_5555_5555_5555;

/// Rank/select sequence over the alphabet `{1, 2, 3}`.
///
/// The payload is packed two bits per symbol; rank is answered from
/// per-symbol cumulative samples plus a short word scan, select by binary
/// search over the samples. An alternative base-3 packed serialization mode
/// stores the payload in exactly `ceil(n lg 3)` bits.
#[derive(Clone, PartialEq, Eq)]
pub struct TernarySequence {
    len: usize,
    /// 32 two-bit lanes per word; lane codes are `symbol - 1`.
    words: Vec<u64>,
    /// Cumulative counts of each code at every `sample_syms` boundary.
    samples: Vec<[u64; 3]>,
    sample_syms: usize,
    totals: [u64; 3],
}

/// Bit-exact space breakdown for a [`TernarySequence`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SequenceSpaceReport {
    pub len: usize,
    /// Active 2-bit packed payload.
    pub payload_bits: u64,
    /// Payload of the base-3 packed serialization mode.
    pub payload_bits_base3: u64,
    /// `ceil(n lg 3)`.
    pub entropy_bound_bits: u64,
    /// Rank samples; bounded by `8 n / lg n + 256` for n >= 2^10.
    pub index_bits: u64,
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - x.saturating_sub(1).leading_zeros()) as usize
}

/// Occurrences of `code` among the first `lanes` two-bit lanes of `word`.
fn count_code(word: u64, code: u64, lanes: usize) -> u64 {
    if lanes == 0 {
        return 0;
    }
    let mask = if lanes >= 32 { !0u64 } else { (1u64 << (2 * lanes)) - 1 };
    let x = (word ^ (code * LANE_MASK)) & mask;
    let nonzero = (x | (x >> 1)) & LANE_MASK & mask;
    lanes as u64 - nonzero.count_ones() as u64
}

impl std::fmt::Debug for TernarySequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TernarySequence[")?;
        for i in 1..=self.len.min(64) {
            write!(f, "{}", self.get(i))?;
        }
        if self.len > 64 {
            write!(f, "... len={}", self.len)?;
        }
        write!(f, "]")
    }
}

impl TernarySequence {
    pub fn new(symbols: &[u8]) -> Result<TernarySequence> {
        for &s in symbols {
            if !(1..=3).contains(&s) {
                return Err(Error::range(format!("symbol {s} outside alphabet {{1,2,3}}")));
            }
        }
        let len = symbols.len();
        let mut words = vec![0u64; len.div_ceil(32)];
        for (i, &s) in symbols.iter().enumerate() {
            words[i / 32] |= ((s - 1) as u64) << (2 * (i % 32));
        }
        Ok(TernarySequence::from_words(len, words))
    }

    fn from_words(len: usize, words: Vec<u64>) -> TernarySequence {
        let sample_syms = 32 * ceil_log2(len + 1).max(1);
        let mut samples = Vec::with_capacity(len / sample_syms + 1);
        let mut acc = [0u64; 3];
        let mut done = 0usize;
        samples.push(acc);
        while done < len {
            let chunk = sample_syms.min(len - done);
            let mut i = done;
            while i < done + chunk {
                let lanes = (32 - i % 32).min(done + chunk - i);
                let word = words[i / 32] >> (2 * (i % 32));
                for code in 0..3u64 {
                    acc[code as usize] += count_code(word, code, lanes);
                }
                i += lanes;
            }
            done += chunk;
            if done < len {
                samples.push(acc);
            }
        }
        TernarySequence { len, words, samples, sample_syms, totals: acc }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at a 1-based position.
    pub fn get(&self, pos: usize) -> u8 {
        assert!(1 <= pos && pos <= self.len, "symbol index {pos} out of 1..={}", self.len);
        let i = pos - 1;
        ((self.words[i / 32] >> (2 * (i % 32))) & 0b11) as u8 + 1
    }

    fn check_symbol(x: u8) -> Result<u64> {
        if !(1..=3).contains(&x) {
            return Err(Error::range(format!("symbol {x} outside alphabet {{1,2,3}}")));
        }
        Ok((x - 1) as u64)
    }

    /// Occurrences of `x` among the first `i` symbols; `rank(x, 0) = 0`.
    pub fn rank(&self, x: u8, i: usize) -> Result<u64> {
        let code = Self::check_symbol(x)?;
        if i > self.len {
            return Err(Error::range(format!("rank index {i} exceeds length {}", self.len)));
        }
        // The boundary at an exact multiple of sample_syms may not be stored
        // when it coincides with the end of the sequence.
        let sample_idx = (i / self.sample_syms).min(self.samples.len() - 1);
        let mut acc = self.samples[sample_idx][code as usize];
        let mut pos = sample_idx * self.sample_syms;
        while pos < i {
            let lanes = (32 - pos % 32).min(i - pos);
            let word = self.words[pos / 32] >> (2 * (pos % 32));
            acc += count_code(word, code, lanes);
            pos += lanes;
        }
        Ok(acc)
    }

    /// 1-based position of the `j`-th occurrence of `x`; `select(x, 0) = 0`.
    pub fn select(&self, x: u8, j: u64) -> Result<usize> {
        let code = Self::check_symbol(x)?;
        if j == 0 {
            return Ok(0);
        }
        if j > self.totals[code as usize] {
            return Err(Error::SelectNotFound { symbol: x, ordinal: j as usize });
        }
        let (mut lo, mut hi) = (0usize, self.samples.len() - 1);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.samples[mid][code as usize] < j {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let mut acc = self.samples[lo][code as usize];
        for pos in lo * self.sample_syms + 1..=self.len {
            if self.get(pos) == x {
                acc += 1;
                if acc == j {
                    return Ok(pos);
                }
            }
        }
        unreachable!("select scan failed")
    }

    pub fn count(&self, x: u8) -> u64 {
        self.totals[(x - 1) as usize]
    }

    pub fn space_report(&self) -> SequenceSpaceReport {
        SequenceSpaceReport {
            len: self.len,
            payload_bits: 2 * self.len as u64,
            payload_bits_base3: ternary_entropy_bound_bits(self.len),
            entropy_bound_bits: ternary_entropy_bound_bits(self.len),
            index_bits: self.samples.len() as u64 * 192 + 64,
        }
    }

    /// Serializes with header magic `TKB1`, version u32, length u64, mode u8,
    /// then the payload MSB-first within each byte. Mode 1 packs two bits per
    /// symbol; mode 2 packs the whole sequence as one base-3 integer in
    /// `ceil(n lg 3)` bits.
    pub fn serialize<W: Write>(&self, out: &mut W, base3: bool) -> Result<()> {
        out.write_all(b"TKB1")?;
        out.write_all(&1u32.to_le_bytes())?;
        out.write_all(&(self.len as u64).to_le_bytes())?;
        out.write_all(&[if base3 { 2u8 } else { 1u8 }])?;
        if base3 {
            let mut acc = BigUint::default();
            for pos in (1..=self.len).rev() {
                acc = acc * 3u32 + (self.get(pos) - 1);
            }
            let nbytes = (ternary_entropy_bound_bits(self.len) as usize).div_ceil(8);
            let mut bytes = acc.to_bytes_le();
            bytes.resize(nbytes, 0);
            out.write_all(&bytes)?;
        } else {
            let mut bytes = vec![0u8; self.len.div_ceil(4)];
            for i in 0..self.len {
                let code = (self.get(i + 1) - 1) as u8;
                bytes[i / 4] |= code << (6 - 2 * (i % 4));
            }
            out.write_all(&bytes)?;
        }
        Ok(())
    }

    pub fn deserialize<R: Read>(input: &mut R) -> Result<TernarySequence> {
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
        let symbols: Vec<u8> = match mode[0] {
            1 => {
                let mut bytes = vec![0u8; len.div_ceil(4)];
                input.read_exact(&mut bytes)?;
                (0..len).map(|i| ((bytes[i / 4] >> (6 - 2 * (i % 4))) & 0b11) + 1).collect()
            }
            2 => {
                let nbytes = (ternary_entropy_bound_bits(len) as usize).div_ceil(8);
                let mut bytes = vec![0u8; nbytes];
                input.read_exact(&mut bytes)?;
                let mut acc = BigUint::from_bytes_le(&bytes);
                let three = BigUint::from(3u32);
                let mut syms = Vec::with_capacity(len);
                for _ in 0..len {
                    let digit = (&acc % &three).to_u32_digits().first().copied().unwrap_or(0);
                    syms.push(digit as u8 + 1);
                    acc /= &three;
                }
                syms
            }
            m => return Err(Error::format(format!("unknown ternary mode {m}"))),
        };
        TernarySequence::new(&symbols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        let seq = TernarySequence::new(&[1, 2, 3, 1, 2]).unwrap();
        assert_eq!(seq.rank(2, 4).unwrap(), 1);
        assert_eq!(seq.rank(1, 0).unwrap(), 0);
        assert_eq!(seq.rank(3, 5).unwrap(), 1);
        let uniform = TernarySequence::new(&[2, 2, 2]).unwrap();
        assert_eq!(uniform.rank(2, 3).unwrap(), 3);
        assert!(seq.rank(2, 6).is_err());
        assert!(seq.rank(4, 1).is_err());
    }

    #[test]
    fn select_examples() {
        let seq = TernarySequence::new(&[1, 2, 3, 1, 2]).unwrap();
        assert_eq!(seq.select(1, 2).unwrap(), 4);
        assert_eq!(seq.select(2, 0).unwrap(), 0);
        assert_eq!(seq.select(3, 1).unwrap(), 3);
        assert!(seq.select(3, 2).is_err());
        let single = TernarySequence::new(&[3]).unwrap();
        assert_eq!(single.select(3, 1).unwrap(), 1);
    }

    #[test]
    fn empty_sequence_space() {
        let seq = TernarySequence::new(&[]).unwrap();
        let rep = seq.space_report();
        assert_eq!(rep.payload_bits, 0);
        assert_eq!(rep.entropy_bound_bits, 0);
    }

    #[test]
    fn entropy_bound_for_eight_symbols() {
        let seq = TernarySequence::new(&[1, 2, 3, 1, 2, 3, 1, 2]).unwrap();
        assert_eq!(seq.space_report().entropy_bound_bits, 13);
    }

    #[test]
    fn index_overhead_stays_sublinear() {
        for exp in [10usize, 12, 14, 16] {
            let n = 1usize << exp;
            let syms: Vec<u8> = (0..n).map(|i| (i % 3) as u8 + 1).collect();
            let seq = TernarySequence::new(&syms).unwrap();
            let budget = 8.0 * n as f64 / (n as f64).log2() + 256.0;
            let got = seq.space_report().index_bits;
            assert!((got as f64) <= budget, "n={n}: index {got} > budget {budget}");
        }
    }

    #[test]
    fn serialization_round_trip_both_modes() {
        let syms: Vec<u8> = (0..201).map(|i| ((i * i + 1) % 3) as u8 + 1).collect();
        let seq = TernarySequence::new(&syms).unwrap();
        for base3 in [false, true] {
            let mut buf = Vec::new();
            seq.serialize(&mut buf, base3).unwrap();
            let back = TernarySequence::deserialize(&mut &buf[..]).unwrap();
            assert_eq!(seq, back, "mode base3={base3}");
        }
    }

    #[test]
    fn base3_mode_is_smaller() {
        let syms: Vec<u8> = vec![2; 400];
        let seq = TernarySequence::new(&syms).unwrap();
        let mut packed2 = Vec::new();
        seq.serialize(&mut packed2, false).unwrap();
        let mut packed3 = Vec::new();
        seq.serialize(&mut packed3, true).unwrap();
        assert!(packed3.len() < packed2.len());
    }

    proptest! {
        #[test]
        fn rank_select_round_trip(syms in proptest::collection::vec(1u8..=3, 0..300)) {
            let seq = TernarySequence::new(&syms).unwrap();
            for x in 1u8..=3 {
                let mut seen = 0u64;
                for (idx, &s) in syms.iter().enumerate() {
                    let i = idx + 1;
                    if s == x { seen += 1; }
                    prop_assert_eq!(seq.rank(x, i).unwrap(), seen);
                    let delta = seq.rank(x, i).unwrap() - seq.rank(x, i - 1).unwrap();
                    prop_assert!(delta <= 1);
                }
                for j in 1..=seq.count(x) {
                    let p = seq.select(x, j).unwrap();
                    prop_assert_eq!(seq.get(p), x);
                    prop_assert_eq!(seq.rank(x, p).unwrap(), j);
                    prop_assert!(seq.select(x, seq.rank(x, p).unwrap()).unwrap() <= p);
                }
            }
            let n = syms.len();
            let r: u64 = (1..=3u8).map(|x| seq.rank(x, n).unwrap()).sum();
            prop_assert_eq!(r, n as u64);
        }
    }
}
