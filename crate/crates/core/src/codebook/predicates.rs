use crate::bits::BitString;
use crate::composition::{full_readout, weights_of};

use super::{CodebookSpec, Family};

/// True iff every nonempty prefix holds strictly more zeros than ones.
/// The empty string passes.
pub fn is_catalan_bertrand(bits: &[u8]) -> bool {
    let mut lead = 0i64;
    for &b in bits {
        lead += if b == 0 { 1 } else { -1 };
        if lead < 1 {
            return false;
        }
    }
    true
}

/// True iff every prefix of length at least `t` holds at least `t` more
/// zeros than ones. For `t = 1` this is [`is_catalan_bertrand`].
pub fn is_t_dominated(bits: &[u8], t: usize) -> bool {
    let mut lead = 0i64;
    for (len, &b) in bits.iter().enumerate() {
        lead += if b == 0 { 1 } else { -1 };
        if len + 1 >= t && lead < t as i64 {
            return false;
        }
    }
    true
}

/// First-half positions `i ∈ 2..=⌊n/2⌋` (1-based) whose mirror differs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiSymmetricIndexSet {
    indices: Vec<usize>,
}

impl AntiSymmetricIndexSet {
    pub fn of(s: &BitString) -> Self {
        let n = s.len();
        let indices = (2..=n / 2).filter(|&i| s.get(i - 1) != s.get(n - i)).collect();
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The bits of `s` at the indexed positions, in order.
    pub fn selected(&self, s: &BitString) -> Vec<u8> {
        self.indices.iter().map(|&i| s.get(i - 1)).collect()
    }
}

/// Drops the centre symbol of an odd-length string.
fn even_core(s: &BitString) -> BitString {
    if s.len() % 2 == 1 {
        s.remove(s.len() / 2).expect("odd length ≥ 3")
    } else {
        *s
    }
}

/// Anchored ends plus a selected string that is `margin`-dominated and at
/// least `min_len` long. Odd lengths are tested with the centre removed.
fn anchored_ballot(s: &BitString, margin: usize, min_len: usize) -> bool {
    if s.len() == 1 {
        return false;
    }
    let core = even_core(s);
    let n = core.len();
    if core.get(0) != 0 || core.get(n - 1) != 1 {
        return false;
    }
    let index_set = AntiSymmetricIndexSet::of(&core);
    index_set.len() >= min_len && is_t_dominated(&index_set.selected(&core), margin)
}

fn weight_sum(s: &BitString) -> u64 {
    let weights = weights_of(&full_readout(s));
    weights[..s.len().div_ceil(2)].iter().map(|w| w.expect("full readout")).sum()
}

pub(super) fn is_member(spec: &CodebookSpec, s: &BitString) -> bool {
    match spec.family() {
        Family::Sr => anchored_ballot(s, 1, 0),
        Family::Sda => anchored_ballot(s, spec.t(), spec.t()),
        Family::Sds2 | Family::SdsPrime => {
            anchored_ballot(s, 1, 0) && weight_sum(s) % spec.modulus() == spec.a()
        }
        Family::Sca1 => {
            // Starred symbols sit at positions 2 and n-1.
            let n = s.len();
            let first_star = s.get(1);
            let last_star = s.get(n - 2);
            let inner = s.remove(n - 2).and_then(|x| x.remove(1)).expect("n ≥ 4");
            first_star <= last_star
                && s.weight().is_multiple_of(2)
                && anchored_ballot(&inner, 1, 0)
                && weight_sum(s) % spec.modulus() == spec.a()
        }
    }
}
