//! Outside-in automaton over mirror pairs.
//!
//! Pairs are consumed from the outside in (pair 1 first), then the centre of
//! an odd-length word. The state carries everything any family constrains:
//! the ballot lead and length of the selected string, the running weight sum
//! modulo the family modulus, and parity. Counting completions under fixed
//! positions gives lexicographic rank and unrank.

use crate::bits::BitString;
use crate::composition::weight_sum_coefficient;
use crate::error::{Error, Result};

use super::{CodebookSpec, Family};

/// Largest length [`CodebookSpec::enumerate`] accepts.
pub const ENUMERATION_CAP: usize = 28;

const MAX_ENUMERATED: u128 = 1 << 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairRole {
    /// Pinned to `(0, 1)`.
    Anchor,
    /// Starred pair, nondecreasing: `00`, `01` or `11`.
    Starred,
    /// Equal pairs are free; unequal pairs feed the selected string.
    Selecting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct PairState {
    lead: u16,
    /// Selected-string length, capped at the dominance margin.
    selected: u16,
    residue: u32,
    parity: u8,
}

#[derive(Clone, Debug)]
pub(crate) struct PairAutomaton {
    n: usize,
    roles: Vec<PairRole>,
    /// Weight-sum coefficient per pair, then the centre, reduced mod `modulus`.
    coefficients: Vec<u64>,
    margin: usize,
    min_selected: usize,
    modulus: u64,
    target: u64,
    even_parity: bool,
}

impl PairAutomaton {
    pub(crate) fn new(spec: &CodebookSpec) -> Self {
        let n = spec.n();
        let h = n / 2;
        let m = n.div_ceil(2);
        let roles = (0..h)
            .map(|j| match (spec.family(), j) {
                (_, 0) => PairRole::Anchor,
                (Family::Sca1, 1) => PairRole::Starred,
                _ => PairRole::Selecting,
            })
            .collect();
        let modulus = spec.modulus();
        let coefficients = (1..=m).map(|i| weight_sum_coefficient(m, i) % modulus).collect();
        let (margin, min_selected) = match spec.family() {
            Family::Sda => (spec.t(), spec.t()),
            _ => (1, 0),
        };
        Self {
            n,
            roles,
            coefficients,
            margin,
            min_selected,
            modulus,
            target: spec.a(),
            even_parity: spec.family() == Family::Sca1,
        }
    }

    pub(crate) fn modulus(&self) -> u64 {
        self.modulus
    }

    pub(crate) fn pairs(&self) -> usize {
        self.roles.len()
    }

    pub(crate) fn has_centre(&self) -> bool {
        self.n % 2 == 1
    }

    pub(crate) fn start(&self) -> PairState {
        PairState { lead: 0, selected: 0, residue: 0, parity: 0 }
    }

    /// Consumes pair `j` (0-based) holding `(first, second)`.
    pub(crate) fn step(&self, state: PairState, j: usize, first: u8, second: u8) -> Option<PairState> {
        let mut next = state;
        match self.roles[j] {
            PairRole::Anchor if (first, second) != (0, 1) => return None,
            PairRole::Starred if first > second => return None,
            PairRole::Selecting if first != second => {
                let len = state.selected as usize + 1;
                let lead = state.lead as i64 + if first == 0 { 1 } else { -1 };
                let ok = if len < self.margin { first == 0 } else { lead >= self.margin as i64 };
                if !ok {
                    return None;
                }
                next.lead = lead as u16;
                next.selected = len.min(self.margin) as u16;
            }
            _ => {}
        }
        Some(self.absorb(next, j, first + second))
    }

    /// Consumes the centre symbol of an odd-length word.
    pub(crate) fn step_centre(&self, state: PairState, bit: u8) -> PairState {
        debug_assert!(self.has_centre());
        self.absorb(state, self.pairs(), bit)
    }

    fn absorb(&self, mut state: PairState, slot: usize, sigma: u8) -> PairState {
        if self.modulus > 1 {
            let r = (state.residue as u64 + self.coefficients[slot] * sigma as u64) % self.modulus;
            state.residue = r as u32;
        }
        state.parity ^= sigma & 1;
        state
    }

    pub(crate) fn accepts(&self, state: &PairState) -> bool {
        state.selected as usize >= self.min_selected
            && (self.modulus == 1 || state.residue as u64 == self.target)
            && (!self.even_parity || state.parity == 0)
    }

    /// Whether a residue-and-parity outcome can still be accepted, ignoring
    /// the selected-string length.
    pub(crate) fn residue_ok(&self, residue: u64, parity: u8) -> bool {
        (self.modulus == 1 || residue == self.target) && (!self.even_parity || parity == 0)
    }

    fn state_index(&self, s: &PairState) -> usize {
        let parities = if self.even_parity { 2 } else { 1 };
        let residues = self.modulus as usize;
        let selected = self.margin + 1;
        ((s.lead as usize * selected + s.selected as usize) * residues + s.residue as usize) * parities
            + if self.even_parity { s.parity as usize } else { 0 }
    }

    fn state_count(&self) -> usize {
        let parities = if self.even_parity { 2 } else { 1 };
        (self.pairs() + 1) * (self.margin + 1) * self.modulus as usize * parities
    }

    /// Number of accepted words agreeing with every fixed position.
    pub(crate) fn count(&self, fixed: &[Option<u8>]) -> u128 {
        debug_assert_eq!(fixed.len(), self.n);
        let allows = |p: usize, b: u8| fixed[p].is_none_or(|f| f == b);
        let mut layer: Vec<(PairState, u128)> = vec![(self.start(), 1)];
        let mut slots: Vec<Option<(PairState, u128)>> = vec![None; self.state_count()];
        for j in 0..self.pairs() {
            let mirror = self.n - 1 - j;
            for &(state, ways) in &layer {
                for (first, second) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    if !allows(j, first) || !allows(mirror, second) {
                        continue;
                    }
                    if let Some(next) = self.step(state, j, first, second) {
                        let slot = &mut slots[self.state_index(&next)];
                        match slot {
                            Some((_, acc)) => *acc += ways,
                            None => *slot = Some((next, ways)),
                        }
                    }
                }
            }
            layer = slots.iter_mut().filter_map(Option::take).collect();
        }
        if self.has_centre() {
            let centre = self.pairs();
            let mut next_layer = Vec::new();
            for &(state, ways) in &layer {
                for bit in [0, 1] {
                    if allows(centre, bit) {
                        next_layer.push((self.step_centre(state, bit), ways));
                    }
                }
            }
            layer = next_layer;
        }
        layer.iter().filter(|(s, _)| self.accepts(s)).map(|&(_, w)| w).sum()
    }

    pub(crate) fn enumerate(&self) -> Result<Vec<BitString>> {
        if self.n > ENUMERATION_CAP {
            return Err(Error::Resource(format!(
                "enumeration is capped at n = {ENUMERATION_CAP} (requested {})",
                self.n
            )));
        }
        let size = self.count(&vec![None; self.n]);
        if size > MAX_ENUMERATED {
            return Err(Error::Resource(format!("codebook has {size} members")));
        }
        let mut out = Vec::with_capacity(size as usize);
        self.collect(0, self.start(), 0u128, &mut out);
        out.sort_unstable();
        Ok(out)
    }

    fn collect(&self, j: usize, state: PairState, value: u128, out: &mut Vec<BitString>) {
        let n = self.n;
        if j == self.pairs() {
            let finish = |state: PairState, value: u128, out: &mut Vec<BitString>| {
                if self.accepts(&state) {
                    out.push(BitString::from_value(value, n).expect("fits"));
                }
            };
            if self.has_centre() {
                for bit in [0u8, 1] {
                    let v = value | ((bit as u128) << (n - 1 - j));
                    finish(self.step_centre(state, bit), v, out);
                }
            } else {
                finish(state, value, out);
            }
            return;
        }
        for (first, second) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            if let Some(next) = self.step(state, j, first, second) {
                let v = value | ((first as u128) << (n - 1 - j)) | ((second as u128) << j);
                self.collect(j + 1, next, v, out);
            }
        }
    }

    /// Lexicographic index; the caller guarantees membership.
    pub(crate) fn rank(&self, s: &BitString) -> u128 {
        let mut fixed: Vec<Option<u8>> = vec![None; self.n];
        let mut below = 0u128;
        for p in 0..self.n {
            if s.get(p) == 1 {
                fixed[p] = Some(0);
                below += self.count(&fixed);
            }
            fixed[p] = Some(s.get(p));
        }
        below
    }

    pub(crate) fn unrank(&self, mut index: u128) -> Result<BitString> {
        let size = self.count(&vec![None; self.n]);
        if index >= size {
            return Err(Error::Domain(format!("index {index} outside 0..{size}")));
        }
        let mut fixed: Vec<Option<u8>> = vec![None; self.n];
        for p in 0..self.n {
            fixed[p] = Some(0);
            let zeros = self.count(&fixed);
            if index >= zeros {
                index -= zeros;
                fixed[p] = Some(1);
            }
        }
        let bits: Vec<u8> = fixed.into_iter().map(|b| b.expect("all fixed")).collect();
        BitString::from_bits(&bits)
    }
}
