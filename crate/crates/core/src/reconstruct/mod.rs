//! Decoders for intact and corrupted readouts.
//!
//! Every decoder reduces to the same question: which strings agree with the
//! classes that can still be trusted? Deletions leave classes missing or
//! short, insertions leave them oversized, and a skew lowers a class's
//! cumulative weight below its mirror's. Each decoder sets the untrusted
//! classes aside, checks that the codebook guarantees a unique answer for
//! that pattern, and runs the complete search.

mod pattern;
mod search;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::codebook::CodebookSpec;
use crate::composition::{full_readout, ClassAnomaly, Readout};
use crate::error::{Error, Result};

pub use pattern::{classify, is_asymmetric, supports, DecodeOptions, PatternKind};
pub use search::SearchStats;

use search::{Evidence, SearchConfig};

/// Ambiguous results list at most this many candidates.
const CANDIDATE_LIMIT: usize = 8;

/// Outcome of a successful decode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub result: BitString,
    /// Classes set aside before decoding, ascending.
    pub dropped_classes: Vec<usize>,
    pub backtracks: u64,
    pub max_dead_depth: usize,
    pub nodes: u64,
    pub sigma_candidates: u64,
    /// Codebook members consistent with the evidence (reference decoder only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistent_set: Option<Vec<BitString>>,
}

impl DecodeReport {
    fn from_search(result: BitString, dropped: &BTreeSet<usize>, stats: SearchStats) -> Self {
        Self {
            result,
            dropped_classes: dropped.iter().copied().collect(),
            backtracks: stats.backtracks,
            max_dead_depth: stats.max_dead_depth,
            nodes: stats.nodes,
            sigma_candidates: stats.sigma_candidates,
            consistent_set: None,
        }
    }
}

/// Rebuilds a string from an intact readout.
///
/// With a codebook the answer must be its unique member with this readout.
/// Without one, the first consistent string is returned; the search tries
/// `(0, 1)` before `(1, 0)` on every unequal pair, so the orientation with a
/// leading zero wins.
pub fn reconstruct(r: &Readout, spec: Option<&CodebookSpec>) -> Result<DecodeReport> {
    if let Some(anomaly) = r.anomalies().first() {
        return Err(Error::InconsistentReadout(format!(
            "class {} is not intact; use a corruption-aware decoder",
            anomaly.class()
        )));
    }
    match spec {
        Some(spec) => solve_unique(r, spec, &BTreeSet::new()),
        None => {
            let evidence = Evidence::new(r, &BTreeSet::new())?;
            let outcome = search::search(&evidence, &SearchConfig { spec: None, max_solutions: 1 })?;
            let result = outcome
                .solutions
                .first()
                .copied()
                .ok_or_else(|| Error::Undecodable("no string has this readout".into()))?;
            Ok(DecodeReport::from_search(result, &BTreeSet::new(), outcome.stats))
        }
    }
}

/// Decodes after whole or partial class deletions, located by class size.
pub fn decode_deletions(r: &Readout, spec: &CodebookSpec, opts: DecodeOptions) -> Result<DecodeReport> {
    let erased: BTreeSet<usize> = r.anomalies().iter().map(ClassAnomaly::class).collect();
    decode_erasures(r, spec, &erased, opts)
}

/// Decodes after compositions were inserted: every oversized class is
/// discarded whole, turning the insertions into deletions.
pub fn decode_insertions(r: &Readout, spec: &CodebookSpec, opts: DecodeOptions) -> Result<DecodeReport> {
    let oversized: Vec<usize> = r
        .anomalies()
        .iter()
        .filter(|a| matches!(a, ClassAnomaly::Oversized { .. }))
        .map(ClassAnomaly::class)
        .collect();
    decode_deletions(&r.without_classes(&oversized), spec, opts)
}

/// Decodes after skewed substitutions, at most one per mirror pair.
///
/// A skew only lowers weight, so the corrupted class of a pair is the one
/// with `w_k < w_{n+1−k}`. The centre class of an odd length has no mirror;
/// if nothing fits with it trusted, it is set aside as well.
pub fn decode_skewed(r: &Readout, spec: &CodebookSpec, opts: DecodeOptions) -> Result<DecodeReport> {
    let n = r.n();
    let mut flagged: BTreeSet<usize> = r.anomalies().iter().map(ClassAnomaly::class).collect();
    for k in 1..=n {
        let mirror = n + 1 - k;
        if let (Some(c), Some(p)) = (r.class(k), r.class(mirror)) {
            if c.cumulative_weight() < p.cumulative_weight() {
                flagged.insert(k);
            }
        }
    }
    let first = decode_erasures(r, spec, &flagged, opts);
    let centre = n.div_ceil(2);
    if n % 2 == 1 && !flagged.contains(&centre) {
        if let Err(Error::Undecodable(_) | Error::InconsistentReadout(_)) = first {
            let mut with_centre = flagged.clone();
            with_centre.insert(centre);
            return decode_erasures(r, spec, &with_centre, opts);
        }
    }
    first
}

/// Decodes with an explicit set of classes set aside, in addition to any
/// class that is not intact.
pub fn decode_erasures(
    r: &Readout,
    spec: &CodebookSpec,
    erased: &BTreeSet<usize>,
    opts: DecodeOptions,
) -> Result<DecodeReport> {
    check_length(r, spec)?;
    let mut erased = erased.clone();
    erased.extend(r.anomalies().iter().map(ClassAnomaly::class));
    if !supports(spec, &erased, opts) {
        if opts.brute_force_fallback {
            return fallback(r, spec, &erased);
        }
        return Err(Error::Capability(format!(
            "{spec} does not guarantee decoding with classes {erased:?} erased ({:?})",
            classify(r.n(), &erased)
        )));
    }
    solve_unique(r, spec, &erased)
}

fn fallback(r: &Readout, spec: &CodebookSpec, erased: &BTreeSet<usize>) -> Result<DecodeReport> {
    if spec.n() <= crate::codebook::ENUMERATION_CAP {
        brute_force_with(r, spec, erased)
    } else {
        solve_unique(r, spec, erased)
    }
}

fn check_length(r: &Readout, spec: &CodebookSpec) -> Result<()> {
    if r.n() != spec.n() {
        return Err(Error::Spec(format!("readout has n = {} but {spec} has n = {}", r.n(), spec.n())));
    }
    Ok(())
}

fn solve_unique(r: &Readout, spec: &CodebookSpec, erased: &BTreeSet<usize>) -> Result<DecodeReport> {
    check_length(r, spec)?;
    let evidence = Evidence::new(r, erased)?;
    let outcome = search::search(&evidence, &SearchConfig { spec: Some(spec), max_solutions: CANDIDATE_LIMIT })?;
    match outcome.solutions.as_slice() {
        [] => Err(Error::Undecodable(format!("no member of {spec} fits the surviving classes"))),
        [only] => Ok(DecodeReport::from_search(*only, erased, outcome.stats)),
        many => {
            let mut candidates: Vec<BitString> = many.to_vec();
            candidates.sort();
            Err(Error::Ambiguous { candidates: candidates.iter().map(ToString::to_string).collect() })
        }
    }
}

/// Reference decoder: scans the whole codebook for members agreeing with
/// every surviving class.
pub fn brute_force_decode(r: &Readout, spec: &CodebookSpec) -> Result<DecodeReport> {
    brute_force_with(r, spec, &BTreeSet::new())
}

fn brute_force_with(r: &Readout, spec: &CodebookSpec, extra: &BTreeSet<usize>) -> Result<DecodeReport> {
    check_length(r, spec)?;
    let mut erased = extra.clone();
    erased.extend(r.anomalies().iter().map(ClassAnomaly::class));
    let surviving: Vec<usize> = (1..=r.n()).filter(|k| !erased.contains(k)).collect();
    let members = spec.enumerate()?;
    let consistent: Vec<BitString> = members
        .par_iter()
        .filter(|s| {
            let own = full_readout(s);
            surviving.iter().all(|&k| own.class(k) == r.class(k))
        })
        .copied()
        .collect();
    match consistent.as_slice() {
        [] => Err(Error::Undecodable(format!("no member of {spec} fits the surviving classes"))),
        [only] => Ok(DecodeReport {
            result: *only,
            dropped_classes: erased.iter().copied().collect(),
            backtracks: 0,
            max_dead_depth: 0,
            nodes: members.len() as u64,
            sigma_candidates: 0,
            consistent_set: Some(consistent.clone()),
        }),
        many => Err(Error::Ambiguous { candidates: many.iter().map(ToString::to_string).collect() }),
    }
}

/// All members consistent with the surviving classes, for callers that need
/// the set itself rather than a verdict.
pub fn consistent_members(r: &Readout, spec: &CodebookSpec) -> Result<Vec<BitString>> {
    match brute_force_decode(r, spec) {
        Ok(report) => Ok(report.consistent_set.unwrap_or_default()),
        Err(Error::Undecodable(_)) => Ok(Vec::new()),
        Err(Error::Ambiguous { candidates }) => candidates.iter().map(|c| c.parse()).collect(),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::{Composition, LengthClass};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    const EXAMPLE: &str = "001010111";

    #[test]
    fn worked_example_reconstructs() {
        let s = bs(EXAMPLE);
        let spec = CodebookSpec::sr(9).unwrap();
        assert_eq!(reconstruct(&full_readout(&s), Some(&spec)).unwrap().result, s);
        assert_eq!(reconstruct(&full_readout(&s), None).unwrap().result, s);
        assert_eq!(reconstruct(&full_readout(&bs("01")), None).unwrap().result, bs("01"));
    }

    #[test]
    fn reversal_decodes_to_member_orientation() {
        let spec = CodebookSpec::sr(10).unwrap();
        for idx in (0..spec.size()).step_by(7) {
            let s = spec.unrank(idx).unwrap();
            let report = reconstruct(&full_readout(&s.reverse()), Some(&spec)).unwrap();
            assert_eq!(report.result, s);
        }
    }

    #[test]
    fn deletion_examples() {
        let s = bs(EXAMPLE);
        let spec = CodebookSpec::sr(9).unwrap();
        let opts = DecodeOptions::default();
        let r = full_readout(&s);
        assert_eq!(decode_deletions(&r.without_classes(&[3]), &spec, opts).unwrap().result, s);
        assert_eq!(decode_deletions(&r.without_classes(&[3, 7]), &spec, opts).unwrap().result, s);
        assert!(matches!(
            decode_deletions(&r.without_classes(&[2, 3]), &spec, opts),
            Err(Error::Capability(_))
        ));
        let fallback = DecodeOptions { brute_force_fallback: true, ..opts };
        match decode_deletions(&r.without_classes(&[2, 3]), &spec, fallback) {
            Ok(report) => assert_eq!(report.result, s),
            Err(Error::Ambiguous { candidates }) => assert!(candidates.contains(&s.to_string())),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn insertion_example() {
        let s = bs(EXAMPLE);
        let spec = CodebookSpec::sr(9).unwrap();
        let mut r = full_readout(&s);
        r.insert_composition(7, Composition::new(1, 6).unwrap()).unwrap();
        let report = decode_insertions(&r, &spec, DecodeOptions::default()).unwrap();
        assert_eq!(report.result, s);
        assert_eq!(report.dropped_classes, vec![7]);
    }

    #[test]
    fn skew_example() {
        let s = bs(EXAMPLE);
        let spec = CodebookSpec::sr(9).unwrap();
        let mut r = full_readout(&s);
        let mut c7 = r.class(7).unwrap().clone();
        assert!(c7.remove(Composition::new(2, 5).unwrap()));
        c7.insert(Composition::new(3, 4).unwrap()).unwrap();
        r.set_class(c7).unwrap();
        let report = decode_skewed(&r, &spec, DecodeOptions::default()).unwrap();
        assert_eq!(report.result, s);
        assert_eq!(report.dropped_classes, vec![7]);
    }

    #[test]
    fn brute_force_examples() {
        let s = bs(EXAMPLE);
        let spec = CodebookSpec::sr(9).unwrap();
        let r = full_readout(&s);
        let report = brute_force_decode(&r.without_classes(&[3]), &spec).unwrap();
        assert_eq!(report.consistent_set, Some(vec![s]));
        assert_eq!(brute_force_decode(&r, &spec).unwrap().result, s);
    }

    #[test]
    fn non_codeword_is_undecodable() {
        let spec = CodebookSpec::sr(9).unwrap();
        let outsider = bs("010010000");
        assert!(!spec.is_member(&outsider).unwrap());
        assert!(matches!(
            reconstruct(&full_readout(&outsider), Some(&spec)),
            Err(Error::Undecodable(_))
        ));
        let mut broken = Readout::new(3);
        broken.set_class(LengthClass::from_weights(1, [1, 1, 1]).unwrap()).unwrap();
        broken.set_class(LengthClass::from_weights(2, [0, 0]).unwrap()).unwrap();
        broken.set_class(LengthClass::from_weights(3, [3]).unwrap()).unwrap();
        assert!(reconstruct(&broken, None).is_err());
    }
}
