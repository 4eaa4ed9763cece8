use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::codebook::{CodebookSpec, Family};
use crate::composition::fold_class;

/// Switches that widen what the decoders accept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOptions {
    /// Decode unsupported patterns anyway, by exhaustive codebook scan.
    pub brute_force_fallback: bool,
    /// Let the consecutive-pair code attempt up to `t` arbitrary symmetric
    /// pairs. Correct decoding is observed, not guaranteed.
    pub experimental_nonconsecutive: bool,
}

/// Shape of a set of erased classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PatternKind {
    Empty,
    /// No two erased classes are mirror partners (the centre may be erased).
    Asymmetric { classes: Vec<usize> },
    /// Whole mirror pairs, given by their smaller class index.
    SymmetricPairs { pairs: Vec<usize> },
    /// Anything else: partial pairs mixed with whole ones.
    Mixed { classes: Vec<usize> },
}

/// Whether `classes` contains no mirror pair `{k, n + 1 - k}` with `k ≠ n + 1 - k`.
pub fn is_asymmetric(n: usize, classes: &BTreeSet<usize>) -> bool {
    classes.iter().all(|&k| {
        let mirror = n + 1 - k;
        mirror == k || !classes.contains(&mirror)
    })
}

pub fn classify(n: usize, classes: &BTreeSet<usize>) -> PatternKind {
    if classes.is_empty() {
        return PatternKind::Empty;
    }
    if is_asymmetric(n, classes) {
        return PatternKind::Asymmetric { classes: classes.iter().copied().collect() };
    }
    let whole_pairs = classes.iter().all(|&k| {
        let mirror = n + 1 - k;
        mirror != k && classes.contains(&mirror)
    });
    if whole_pairs {
        let pairs = classes.iter().copied().filter(|&k| k <= n + 1 - k).collect();
        PatternKind::SymmetricPairs { pairs }
    } else {
        PatternKind::Mixed { classes: classes.iter().copied().collect() }
    }
}

/// Whether the family guarantees unique decoding with `erased` classes gone.
///
/// A pattern is covered when it is contained in a guaranteed pattern: erasing
/// more classes never helps a competing codeword.
pub fn supports(spec: &CodebookSpec, erased: &BTreeSet<usize>, opts: DecodeOptions) -> bool {
    let n = spec.n();
    let asym_budget = if spec.family() == Family::Sda { spec.t() } else { 1 };
    if is_asymmetric(n, erased) && erased.len() <= asym_budget {
        return true;
    }
    let centre_erased = erased.iter().any(|&k| 2 * k == n + 1);
    if centre_erased {
        return false;
    }
    let pairs: BTreeSet<usize> = erased.iter().map(|&k| fold_class(n, k)).collect();
    match spec.family() {
        Family::Sds2 => pairs.len() <= 2,
        Family::SdsPrime if opts.experimental_nonconsecutive => pairs.len() <= spec.t(),
        Family::SdsPrime => match (pairs.first(), pairs.last()) {
            (Some(lo), Some(hi)) => hi - lo < spec.t(),
            _ => true,
        },
        Family::Sr | Family::Sda | Family::Sca1 => pairs.len() <= 1,
    }
}
