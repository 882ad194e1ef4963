//! Bit-level primitives: 8-bit words, 128-bit flits, popcount and
//! transition counting.
//!
//! Flit layout on the 128-bit link: the input lane occupies bits 0..63
//! (input word `i` at bits `8i..8i+7`) and the weight lane occupies bits
//! 64..127 (weight word `i` at bits `64+8i..64+8i+7`).

use std::fmt;

/// Word width in bits.
pub const WORD_BITS: usize = 8;
/// Words per lane in one flit.
pub const LANE_WORDS: usize = 8;
/// Flits in one packet.
pub const FLITS_PER_PACKET: usize = 4;
/// Link width in bits.
pub const LINK_BITS: usize = 128;

/// Popcount of every 4-bit nibble.
pub const NIBBLE_POPCOUNT: [u8; 16] = [0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4];

/// One 8-bit payload element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub u8);

impl Word {
    pub const ZERO: Word = Word(0);
    pub const ONES: Word = Word(0xFF);

    /// Reinterprets a signed weight as its two's-complement bit pattern.
    pub fn from_i8(v: i8) -> Word {
        Word(v as u8)
    }

    pub fn as_i8(self) -> i8 {
        self.0 as i8
    }
}

impl From<u8> for Word {
    fn from(v: u8) -> Self {
        Word(v)
    }
}

impl fmt::LowerHex for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Low and high nibble lookups, in that order. These are the two table
/// reads the popcount stage sums.
#[inline]
pub fn nibble_popcounts(w: Word) -> (u8, u8) {
    (
        NIBBLE_POPCOUNT[(w.0 & 0x0F) as usize],
        NIBBLE_POPCOUNT[(w.0 >> 4) as usize],
    )
}

/// Number of set bits, computed as the sum of two nibble-table lookups.
#[inline]
pub fn popcount(w: Word) -> u8 {
    let (lo, hi) = nibble_popcounts(w);
    lo + hi
}

#[inline]
pub fn hamming_distance(a: Word, b: Word) -> u8 {
    popcount(Word(a.0 ^ b.0))
}

/// One 128-bit link beat.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Flit {
    pub input_lane: [Word; LANE_WORDS],
    pub weight_lane: [Word; LANE_WORDS],
}

impl Flit {
    pub const ZERO: Flit = Flit {
        input_lane: [Word::ZERO; LANE_WORDS],
        weight_lane: [Word::ZERO; LANE_WORDS],
    };
    pub const ONES: Flit = Flit {
        input_lane: [Word::ONES; LANE_WORDS],
        weight_lane: [Word::ONES; LANE_WORDS],
    };
}

/// Four flits; the atomic transfer and sorting window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Packet {
    pub flits: [Flit; FLITS_PER_PACKET],
}

pub fn serialize_flit(f: &Flit) -> u128 {
    let mut bits = 0u128;
    for (i, w) in f.input_lane.iter().enumerate() {
        bits |= (w.0 as u128) << (WORD_BITS * i);
    }
    for (i, w) in f.weight_lane.iter().enumerate() {
        bits |= (w.0 as u128) << (64 + WORD_BITS * i);
    }
    bits
}

pub fn deserialize_flit(bits: u128) -> Flit {
    let word = |i: usize| Word((bits >> (WORD_BITS * i)) as u8);
    Flit {
        input_lane: std::array::from_fn(word),
        weight_lane: std::array::from_fn(|i| word(LANE_WORDS + i)),
    }
}

/// Transitions between two consecutive flits, split as `(input, weight)`.
pub fn flit_bt(prev: &Flit, next: &Flit) -> (u32, u32) {
    let lane = |a: &[Word; LANE_WORDS], b: &[Word; LANE_WORDS]| {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| hamming_distance(x, y) as u32)
            .sum::<u32>()
    };
    (
        lane(&prev.input_lane, &next.input_lane),
        lane(&prev.weight_lane, &next.weight_lane),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_popcount(v: u8) -> u8 {
        (0..8).filter(|b| v >> b & 1 == 1).count() as u8
    }

    fn arb_flit() -> impl Strategy<Value = Flit> {
        any::<u128>().prop_map(|v| Flit {
            input_lane: std::array::from_fn(|i| Word((v >> (8 * i)) as u8)),
            weight_lane: std::array::from_fn(|i| Word((v >> (64 + 8 * i)) as u8)),
        })
    }

    #[test]
    fn popcount_examples() {
        assert_eq!(popcount(Word(0x00)), 0);
        assert_eq!(popcount(Word(0xFF)), 8);
        assert_eq!(popcount(Word(0b1011_0010)), 4);
    }

    #[test]
    fn popcount_exhaustive_against_bit_loop() {
        for v in 0..=255u8 {
            assert_eq!(popcount(Word(v)), naive_popcount(v), "word {v:#04x}");
            assert_eq!(popcount(Word(v)) + popcount(Word(!v)), 8);
        }
    }

    #[test]
    fn nibble_table_matches_bit_loop() {
        for (n, &c) in NIBBLE_POPCOUNT.iter().enumerate() {
            assert_eq!(c, naive_popcount(n as u8));
        }
        assert_eq!(nibble_popcounts(Word(0xF1)), (1, 4));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(Word(0x00), Word(0xFF)), 8);
        assert_eq!(hamming_distance(Word(0xA5), Word(0xA5)), 0);
        assert_eq!(hamming_distance(Word(0b1010), Word(0b0110)), 2);
    }

    #[test]
    fn layout_anchor() {
        assert_eq!(serialize_flit(&Flit::ZERO), 0);
        let mut f = Flit::ZERO;
        f.input_lane[0] = Word(0x01);
        assert_eq!(serialize_flit(&f), 1);
        let mut g = Flit::ZERO;
        g.weight_lane[7] = Word(0x80);
        assert_eq!(serialize_flit(&g), 1u128 << 127);
    }

    #[test]
    fn flit_bt_examples() {
        assert_eq!(flit_bt(&Flit::ZERO, &Flit::ONES), (64, 64));
        let mut f = Flit::ZERO;
        f.weight_lane[3] = Word(0x5A);
        assert_eq!(flit_bt(&f, &f), (0, 0));

        // flip three chosen input-lane bits spread over two words
        let mut g = f;
        g.input_lane[0].0 ^= 0b0000_0101;
        g.input_lane[6].0 ^= 0b1000_0000;
        assert_eq!(flit_bt(&f, &g), (3, 0));
    }

    proptest! {
        #[test]
        fn hamming_is_popcount_of_xor(a: u8, b: u8) {
            prop_assert_eq!(hamming_distance(Word(a), Word(b)), popcount(Word(a ^ b)));
        }

        #[test]
        fn hamming_triangle(a: u8, b: u8, c: u8) {
            let (a, b, c) = (Word(a), Word(b), Word(c));
            prop_assert!(hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c));
        }

        #[test]
        fn flit_round_trip(f in arb_flit()) {
            prop_assert_eq!(deserialize_flit(serialize_flit(&f)), f);
        }

        #[test]
        fn flit_bt_symmetric_and_matches_wide_distance(a in arb_flit(), b in arb_flit()) {
            let (i, w) = flit_bt(&a, &b);
            prop_assert_eq!((i, w), flit_bt(&b, &a));
            prop_assert_eq!(i + w, (serialize_flit(&a) ^ serialize_flit(&b)).count_ones());
        }
    }
}
