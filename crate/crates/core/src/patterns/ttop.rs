//! Triple top (TTOP) detection over N-bit stock prices.
//!
//! The reference follows the detection loop literally, with sentinel
//! extrema. The cascade is built from flip-flops only: Previous (N bits),
//! Slope, LastMax (flag and N bits), LastMin (flag and N bits) and Count
//! (one-hot, 0 to 5). Prices are letters `"0"` to `"2^N - 1"`.

use rand::Rng;

use crate::automata::prime::{HIGH, HOLD, LOW, RESET, SET};
use crate::automata::{CascadeSpec, OutputTiming, PrimeKind, SpecBuilder, Wiring};
use crate::error::{Error, Result};

pub const MAX_BITS: usize = 16;

/// Count saturates here: a count of five extrema is a TTOP.
const TOP: usize = 5;

/// One boolean per price; the first price only primes `prev`, so its output
/// is always false.
pub fn ttop_reference(prices: &[u64]) -> Vec<bool> {
    let Some((&first, rest)) = prices.split_first() else {
        return Vec::new();
    };
    let mut last_max = i128::MAX;
    let mut last_min = i128::MIN;
    let mut count = 0usize;
    let mut positive = true;
    let mut prev = first as i128;
    let mut out = Vec::with_capacity(prices.len());
    out.push(false);
    for &cur in rest {
        let cur = cur as i128;
        if positive && prev > cur {
            if prev < last_max {
                last_max = prev;
                count = (count + 1).min(TOP);
            } else {
                count = 1;
            }
        }
        if !positive && prev < cur {
            if prev > last_min {
                last_min = prev;
                count = (count + 1).min(TOP);
            } else {
                count = 2;
            }
        }
        if prev < cur {
            positive = true;
        } else if prev > cur {
            positive = false;
        }
        out.push(count == TOP);
        prev = cur;
    }
    out
}

pub fn price_alphabet(bits: usize) -> Result<Vec<String>> {
    check_bits(bits)?;
    Ok((0..1u64 << bits).map(|p| p.to_string()).collect())
}

fn check_bits(bits: usize) -> Result<()> {
    if !(1..=MAX_BITS).contains(&bits) {
        return Err(Error::invalid(format!("bits must be in 1..={MAX_BITS}, got {bits}")));
    }
    Ok(())
}

/// Letter indices of `prices`, which must fit in `bits` bits.
pub fn price_letters(prices: &[u64], bits: usize) -> Result<Vec<usize>> {
    check_bits(bits)?;
    prices
        .iter()
        .enumerate()
        .map(|(position, &p)| {
            if p >> bits == 0 {
                Ok(p as usize)
            } else {
                Err(Error::UnknownLetter { letter: p.to_string(), position })
            }
        })
        .collect()
}

/// Uniform prices of uniform length in `1..=max_len`.
pub fn random_prices(rng: &mut impl Rng, bits: usize, max_len: usize) -> Vec<u64> {
    let len = rng.random_range(1..=max_len.max(1));
    (0..len).map(|_| rng.random_range(0..1u64 << bits)).collect()
}

/// Component indices of the TTOP cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TtopLayout {
    pub bits: usize,
}

impl TtopLayout {
    pub fn prev(&self) -> std::ops::Range<usize> {
        0..self.bits
    }

    pub fn slope(&self) -> usize {
        self.bits
    }

    pub fn max_flag(&self) -> usize {
        self.bits + 1
    }

    pub fn max_bits(&self) -> std::ops::Range<usize> {
        self.bits + 2..2 * self.bits + 2
    }

    pub fn min_flag(&self) -> usize {
        2 * self.bits + 2
    }

    pub fn min_bits(&self) -> std::ops::Range<usize> {
        2 * self.bits + 3..3 * self.bits + 3
    }

    pub fn count(&self, i: usize) -> usize {
        3 * self.bits + 3 + i
    }

    pub fn len(&self) -> usize {
        3 * self.bits + 9
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Most significant bit first.
fn value(bits: &[usize]) -> u64 {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as u64)
}

fn bit(price: usize, i: usize, bits: usize) -> usize {
    (price >> (bits - 1 - i)) & 1
}

fn overwrite(b: usize) -> usize {
    if b == 1 {
        SET
    } else {
        RESET
    }
}

/// The TTOP cascade with `bits`-bit prices. Output `"1"` iff Count 5 is high
/// after the current price.
pub fn ttop_cascade(bits: usize) -> Result<CascadeSpec> {
    let alphabet = price_alphabet(bits)?;
    let n = bits;
    let lay = TtopLayout { bits };
    let mut b = SpecBuilder::new(&alphabet, Wiring::Cascade);
    for i in 0..n {
        b.declare(format!("prev{}", i + 1), PrimeKind::FlipFlop, LOW);
    }
    b.declare("slope", PrimeKind::FlipFlop, HIGH);
    b.declare("lastMax.flag", PrimeKind::FlipFlop, LOW);
    for i in 0..n {
        b.declare(format!("lastMax{}", i + 1), PrimeKind::FlipFlop, LOW);
    }
    b.declare("lastMin.flag", PrimeKind::FlipFlop, LOW);
    for i in 0..n {
        b.declare(format!("lastMin{}", i + 1), PrimeKind::FlipFlop, LOW);
    }
    for i in 0..=TOP {
        b.declare(format!("count{i}"), PrimeKind::FlipFlop, if i == 0 { HIGH } else { LOW });
    }

    for i in lay.prev() {
        b.wire(i, &[], |cur, _| overwrite(bit(cur, i, n)))?;
    }

    let prev_reads: Vec<usize> = lay.prev().collect();
    b.wire(lay.slope(), &prev_reads, |cur, st| {
        let (prev, cur) = (value(st), cur as u64);
        if prev < cur {
            SET
        } else if prev > cur {
            RESET
        } else {
            HOLD
        }
    })?;

    // prev, slope
    let mut extremum_reads = prev_reads.clone();
    extremum_reads.push(lay.slope());
    let is_max = |cur: usize, st: &[usize]| st[n] == HIGH && value(&st[..n]) > cur as u64;
    let is_min = |cur: usize, st: &[usize]| st[n] == LOW && value(&st[..n]) < cur as u64;

    b.wire(lay.max_flag(), &extremum_reads, |cur, st| if is_max(cur, st) { SET } else { HOLD })?;
    b.wire(lay.min_flag(), &extremum_reads, |cur, st| if is_min(cur, st) { SET } else { HOLD })?;

    // prev, slope, flag, stored bits 1..i
    for (i, c) in lay.max_bits().enumerate() {
        let mut reads = extremum_reads.clone();
        reads.push(lay.max_flag());
        reads.extend(lay.max_bits().take(i));
        b.wire(c, &reads, |cur, st| {
            if !is_max(cur, st) {
                return HOLD;
            }
            let prev_i = st[i];
            if st[n + 1] == LOW {
                return overwrite(prev_i);
            }
            let (stored, prefix) = (value(&st[n + 2..]), value(&st[..i]));
            if stored == prefix {
                if prev_i == 1 {
                    HOLD
                } else {
                    RESET
                }
            } else if stored > prefix {
                overwrite(prev_i)
            } else {
                HOLD
            }
        })?;
    }
    for (i, c) in lay.min_bits().enumerate() {
        let mut reads = extremum_reads.clone();
        reads.push(lay.min_flag());
        reads.extend(lay.min_bits().take(i));
        b.wire(c, &reads, |cur, st| {
            if !is_min(cur, st) {
                return HOLD;
            }
            let prev_i = st[i];
            if st[n + 1] == LOW {
                return overwrite(prev_i);
            }
            let (stored, prefix) = (value(&st[n + 2..]), value(&st[..i]));
            if stored == prefix {
                if prev_i == 0 {
                    HOLD
                } else {
                    SET
                }
            } else if stored < prefix {
                overwrite(prev_i)
            } else {
                HOLD
            }
        })?;
    }

    // prev, slope, max flag, max bits, min flag, min bits[, count i-1]
    let mut count_reads = extremum_reads.clone();
    count_reads.push(lay.max_flag());
    count_reads.extend(lay.max_bits());
    count_reads.push(lay.min_flag());
    count_reads.extend(lay.min_bits());
    for i in 0..=TOP {
        let mut reads = count_reads.clone();
        if i > 0 {
            reads.push(lay.count(i - 1));
        }
        b.wire(lay.count(i), &reads, |cur, st| {
            let prev = value(&st[..n]);
            let max_flag = st[n + 1];
            let last_max = value(&st[n + 2..2 * n + 2]);
            let min_flag = st[2 * n + 2];
            let last_min = value(&st[2 * n + 3..3 * n + 3]);
            let lower = if i > 0 { st[3 * n + 3] } else { LOW };
            let increment = || {
                if lower == HIGH {
                    SET
                } else if i == TOP {
                    HOLD
                } else {
                    RESET
                }
            };
            let set_to = |k: usize| if i == k { SET } else { RESET };
            if is_max(cur, st) {
                if max_flag == LOW || prev < last_max {
                    increment()
                } else {
                    set_to(1)
                }
            } else if is_min(cur, st) {
                if min_flag == LOW || prev > last_min {
                    increment()
                } else {
                    set_to(2)
                }
            } else {
                HOLD
            }
        })?;
    }

    b.output(&["0", "1"], &[lay.count(TOP)], OutputTiming::Post, |_, st| st[0])?;
    b.build()
}
