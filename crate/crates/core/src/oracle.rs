//! Exhaustive ground truth: equicomposability classes, code-property checks
//! and confusable-pair search.
//!
//! Two codewords collide under a deletion model exactly when the set `D` of
//! classes on which their readouts differ fits inside some erasure pattern the
//! model allows. Allowed patterns are closed under taking subsets, so the
//! check needs only `D`, and the reported pattern is the smallest valid one
//! covering it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_128;

use crate::bits::BitString;
use crate::codebook::CodebookSpec;
use crate::composition::{full_readout, fold_class, LengthClass, Readout};
use crate::error::{Error, Result};
use crate::reconstruct::is_asymmetric;

/// Largest `n` for [`count_classes`], which visits all `2^n` strings.
pub const CLASS_COUNT_CAP: usize = 20;

/// Largest `n` for pairwise codebook checks.
pub const PAIRWISE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyModel {
    /// Up to `t` classes erased, no two of them mirror partners.
    AsymDelete,
    /// Up to `t` mirror pairs erased.
    SymPairDelete,
    /// Up to `t` mirror pairs with consecutive smaller indices erased.
    ConsecutiveSymPairDelete,
    /// Up to `t` classes each under-read once, mirror partners intact.
    Skew,
}

impl PropertyModel {
    pub const ALL: [PropertyModel; 4] =
        [Self::AsymDelete, Self::SymPairDelete, Self::ConsecutiveSymPairDelete, Self::Skew];

    pub fn name(self) -> &'static str {
        match self {
            Self::AsymDelete => "asym_delete",
            Self::SymPairDelete => "sym_pair_delete",
            Self::ConsecutiveSymPairDelete => "consecutive_sym_pair_delete",
            Self::Skew => "skew",
        }
    }

    /// Smallest pattern of this model with at most `t` units that covers
    /// `diff`, the classes on which two readouts differ.
    pub fn covering_pattern(self, n: usize, diff: &BTreeSet<usize>, t: usize) -> Option<BTreeSet<usize>> {
        let centre_hit = diff.iter().any(|&k| 2 * k == n + 1);
        let folds: BTreeSet<usize> = diff.iter().map(|&k| fold_class(n, k)).collect();
        match self {
            Self::AsymDelete => (is_asymmetric(n, diff) && diff.len() <= t).then(|| diff.clone()),
            Self::Skew => (is_asymmetric(n, diff) && !centre_hit && diff.len() <= t).then(|| diff.clone()),
            Self::SymPairDelete => (!centre_hit && folds.len() <= t).then(|| with_mirrors(n, folds.iter().copied())),
            Self::ConsecutiveSymPairDelete => {
                if centre_hit {
                    return None;
                }
                match (folds.first(), folds.last()) {
                    (Some(&lo), Some(&hi)) if hi - lo < t => Some(with_mirrors(n, lo..=hi)),
                    (Some(_), Some(_)) => None,
                    _ => Some(BTreeSet::new()),
                }
            }
        }
    }

    /// Whether `pattern` is one this model allows with at most `t` units.
    pub fn allows(self, n: usize, pattern: &BTreeSet<usize>, t: usize) -> bool {
        if pattern.iter().any(|&k| k == 0 || k > n) {
            return false;
        }
        match self {
            Self::AsymDelete | Self::Skew => self.covering_pattern(n, pattern, t).as_ref() == Some(pattern),
            Self::SymPairDelete | Self::ConsecutiveSymPairDelete => {
                pattern.iter().all(|&k| pattern.contains(&(n + 1 - k)))
                    && self.covering_pattern(n, pattern, t).as_ref() == Some(pattern)
            }
        }
    }
}

fn with_mirrors(n: usize, folds: impl Iterator<Item = usize>) -> BTreeSet<usize> {
    folds.flat_map(|i| [i, n + 1 - i]).collect()
}

impl fmt::Display for PropertyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "asym" => "asym_delete",
            "sym" | "sym_pair" => "sym_pair_delete",
            "consecutive" | "consecutive_sym_pair" => "consecutive_sym_pair_delete",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|m| m.name() == alias)
            .ok_or_else(|| Error::Domain(format!("unknown property model `{s}`")))
    }
}

/// Two distinct strings whose readouts agree outside `pattern`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusabilityWitness {
    pub model: PropertyModel,
    pub t: usize,
    pub s: BitString,
    pub v: BitString,
    pub pattern: Vec<usize>,
}

impl ConfusabilityWitness {
    /// Re-checks the witness from scratch.
    pub fn verify(&self) -> bool {
        let n = self.s.len();
        if self.s == self.v || self.v.len() != n {
            return false;
        }
        let pattern: BTreeSet<usize> = self.pattern.iter().copied().collect();
        if !self.model.allows(n, &pattern, self.t) {
            return false;
        }
        let (rs, rv) = (full_readout(&self.s), full_readout(&self.v));
        if !rs.agrees_outside(&rv, &self.pattern) {
            return false;
        }
        // A skew must actually change each named class.
        self.model != PropertyModel::Skew || self.pattern.iter().all(|&k| rs.class(k) != rv.class(k))
    }

    /// A readout reachable from both strings by inserting compositions into
    /// the pattern classes only: each such class holds both originals.
    pub fn insertion_readout(&self) -> Readout {
        let (rs, rv) = (full_readout(&self.s), full_readout(&self.v));
        let mut out = rs.clone();
        for &k in &self.pattern {
            let mut merged = rs.class(k).cloned().unwrap_or_else(|| LengthClass::new(k));
            for (c, m) in rv.class(k).into_iter().flat_map(LengthClass::iter) {
                merged.insert_n(c, m).expect("same length class");
            }
            out.set_class(merged).expect("class within range");
        }
        out
    }

    /// Whether [`Self::insertion_readout`] is an insertion-only corruption of
    /// both strings confined to the pattern classes.
    pub fn confirms_insertion_equivalence(&self) -> bool {
        let r = self.insertion_readout();
        [&self.s, &self.v].into_iter().all(|x| {
            let original = full_readout(x);
            r.agrees_outside(&original, &self.pattern)
                && self.pattern.iter().all(|&k| match (original.class(k), r.class(k)) {
                    (Some(o), Some(c)) => o.is_subset_of(c) && c.len() > o.len(),
                    _ => false,
                })
        })
    }
}

/// Outcome of an exhaustive code-property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub spec: CodebookSpec,
    pub model: PropertyModel,
    pub t: usize,
    pub codewords: usize,
    pub witness: Option<ConfusabilityWitness>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Whether `s` and `v` have identical composition multisets.
pub fn equicomposable(s: &BitString, v: &BitString) -> Result<bool> {
    if s.len() != v.len() {
        return Err(Error::Domain(format!("lengths {} and {} differ", s.len(), v.len())));
    }
    Ok(s == v || s.reverse() == *v || full_readout(s) == full_readout(v))
}

/// Bytes of `r` in canonical order: classes by ascending length, entries by
/// ascending weight, each with its multiplicity.
pub fn canonical_bytes(r: &Readout) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * r.n());
    out.extend_from_slice(&(r.n() as u32).to_le_bytes());
    for class in r.classes() {
        out.extend_from_slice(&(class.k() as u32).to_le_bytes());
        for (c, m) in class.iter() {
            for x in [c.zeros, c.ones, m] {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out.extend_from_slice(&u32::MAX.to_le_bytes());
    }
    out
}

pub fn readout_hash(r: &Readout) -> u128 {
    xxh3_128(&canonical_bytes(r))
}

/// The equicomposability classes of `{0,1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCount {
    pub n: usize,
    pub classes: u64,
    /// Lexicographically least member of each class, ascending.
    pub representatives: Vec<BitString>,
}

/// Partitions `{0,1}^n` by readout; hash hits are confirmed by full comparison.
pub fn count_classes(n: usize) -> Result<ClassCount> {
    if n == 0 || n > CLASS_COUNT_CAP {
        return Err(Error::Resource(format!("class counting supports 1 ≤ n ≤ {CLASS_COUNT_CAP}, got {n}")));
    }
    let keyed: Vec<(u128, BitString)> = (0..1u128 << n)
        .into_par_iter()
        .map(|value| {
            let s = BitString::from_value(value, n).expect("value fits");
            (readout_hash(&full_readout(&s)), s)
        })
        .collect();
    // Strings arrive in ascending order, so the first seen in a class is its least member.
    let mut buckets: HashMap<u128, Vec<(BitString, Readout)>> = HashMap::new();
    let mut representatives = Vec::new();
    for (hash, s) in keyed {
        let bucket = buckets.entry(hash).or_default();
        if bucket.iter().any(|(rep, _)| rep.reverse() == s) {
            continue;
        }
        let readout = full_readout(&s);
        if !bucket.iter().any(|(_, r)| *r == readout) {
            bucket.push((s, readout));
            representatives.push(s);
        }
    }
    Ok(ClassCount { n, classes: representatives.len() as u64, representatives })
}

/// `2^{n-1} + 2^{⌈n/2⌉-1}`: strings up to reversal, counting palindromes once.
pub fn max_code_bound(n: usize) -> Result<u128> {
    if n == 0 || n > 128 {
        return Err(Error::Domain(format!("length {n} outside 1..=128")));
    }
    Ok((1u128 << (n - 1)) + (1u128 << (n.div_ceil(2) - 1)))
}

/// Per-member class histograms, flattened for cheap comparison.
struct Profiles {
    n: usize,
    members: Vec<BitString>,
    /// `offsets[k]..offsets[k + 1]` is class `k + 1` within one member's row.
    offsets: Vec<usize>,
    rows: Vec<Vec<u8>>,
}

impl Profiles {
    fn new(n: usize, members: Vec<BitString>) -> Self {
        let mut offsets = vec![0];
        for k in 1..=n {
            offsets.push(offsets[k - 1] + k + 1);
        }
        let rows = members
            .par_iter()
            .map(|s| {
                let r = full_readout(s);
                let mut row = Vec::with_capacity(offsets[n]);
                for k in 1..=n {
                    let class = r.class(k).expect("intact readout");
                    row.extend(class.weight_histogram().iter().map(|&c| c as u8));
                }
                row
            })
            .collect();
        Self { n, members, offsets, rows }
    }

    fn diff(&self, i: usize, j: usize) -> BTreeSet<usize> {
        let (a, b) = (&self.rows[i], &self.rows[j]);
        (1..=self.n)
            .filter(|&k| {
                let span = self.offsets[k - 1]..self.offsets[k];
                a[span.clone()] != b[span]
            })
            .collect()
    }

    fn witness(&self, i: usize, j: usize, model: PropertyModel, t: usize) -> Option<ConfusabilityWitness> {
        let diff = self.diff(i, j);
        let pattern = model.covering_pattern(self.n, &diff, t)?;
        Some(ConfusabilityWitness {
            model,
            t,
            s: self.members[i],
            v: self.members[j],
            pattern: pattern.into_iter().collect(),
        })
    }

    /// First confusable pair in lexicographic `(s, v)` order.
    fn first_witness(&self, model: PropertyModel, t: usize) -> Option<ConfusabilityWitness> {
        let len = self.members.len();
        (0..len)
            .into_par_iter()
            .find_map_first(|i| (i + 1..len).find_map(|j| self.witness(i, j, model, t)))
    }
}

fn check_pairwise_cap(n: usize) -> Result<()> {
    if n > PAIRWISE_CAP {
        return Err(Error::Resource(format!("pairwise checks support n ≤ {PAIRWISE_CAP}, got {n}")));
    }
    Ok(())
}

/// Exhaustively checks that no two members of `spec` collide under any
/// pattern of `model` with at most `t` units.
pub fn verify_code_property(spec: &CodebookSpec, model: PropertyModel, t: usize) -> Result<PropertyReport> {
    check_pairwise_cap(spec.n())?;
    let profiles = Profiles::new(spec.n(), spec.enumerate()?);
    let witness = profiles.first_witness(model, t);
    debug_assert!(witness.as_ref().is_none_or(ConfusabilityWitness::verify));
    Ok(PropertyReport { spec: *spec, model, t, codewords: profiles.members.len(), witness })
}

/// Every confusable pair of `spec` members, in lexicographic `(s, v)` order.
pub fn confusable_pairs(spec: &CodebookSpec, model: PropertyModel, t: usize) -> Result<Vec<ConfusabilityWitness>> {
    check_pairwise_cap(spec.n())?;
    let profiles = Profiles::new(spec.n(), spec.enumerate()?);
    let len = profiles.members.len();
    Ok((0..len)
        .into_par_iter()
        .flat_map_iter(|i| {
            let profiles = &profiles;
            (i + 1..len).filter_map(move |j| profiles.witness(i, j, model, t))
        })
        .collect())
}

/// First pair of `S_R(n)` members confusable under `model` with at most `t`
/// units.
///
/// For pair models with `t ≥ 2` at even `n ≥ 8`, pairs matching the central
/// template are tried first: identical outer bits, and pair weights
/// `(0, 0, 1)` against `(1, 0, 0)` on the three innermost pairs. The
/// exhaustive scan runs when the template yields nothing.
pub fn find_confusable_pair(n: usize, model: PropertyModel, t: usize) -> Result<Option<ConfusabilityWitness>> {
    check_pairwise_cap(n)?;
    let profiles = Profiles::new(n, CodebookSpec::sr(n)?.enumerate()?);
    let pair_model = matches!(model, PropertyModel::SymPairDelete | PropertyModel::ConsecutiveSymPairDelete);
    if pair_model && t >= 2 {
        if let Some(w) = template_witness(&profiles, |i, j| profiles.witness(i, j, model, t)) {
            return Ok(Some(w));
        }
    }
    Ok(profiles.first_witness(model, t))
}

/// The four central classes `{n/2 - 1, …, n/2 + 2}` of an even length.
pub fn central_pattern(n: usize) -> Result<Vec<usize>> {
    if n % 2 == 1 || n < 6 {
        return Err(Error::Domain(format!("the central four-class pattern needs even n ≥ 6, got {n}")));
    }
    let h = n / 2;
    Ok((h - 1..=h + 2).collect())
}

/// First pair of `S_R(n)` members (even `n`) whose readouts agree outside the
/// four central classes. Template candidates are tried before the full scan.
pub fn find_central_confusable_pair(n: usize) -> Result<Option<ConfusabilityWitness>> {
    check_pairwise_cap(n)?;
    let pattern = central_pattern(n)?;
    let profiles = Profiles::new(n, CodebookSpec::sr(n)?.enumerate()?);
    let within = |i: usize, j: usize| {
        let diff = profiles.diff(i, j);
        diff.iter().all(|k| pattern.contains(k)).then(|| ConfusabilityWitness {
            model: PropertyModel::ConsecutiveSymPairDelete,
            t: 2,
            s: profiles.members[i],
            v: profiles.members[j],
            pattern: pattern.clone(),
        })
    };
    if let Some(w) = template_witness(&profiles, within) {
        return Ok(Some(w));
    }
    let len = profiles.members.len();
    Ok((0..len).into_par_iter().find_map_first(|i| (i + 1..len).find_map(|j| within(i, j))))
}

/// Least template pair (by member order) accepted by `check`.
fn template_witness<F>(profiles: &Profiles, check: F) -> Option<ConfusabilityWitness>
where
    F: Fn(usize, usize) -> Option<ConfusabilityWitness> + Sync,
{
    let n = profiles.n;
    if n % 2 == 1 || n < 8 {
        return None;
    }
    let h = n / 2;
    // Outer bits are positions 1..=h-3 and h+4..=n (1-based).
    let outer_mask: u128 = (0..n)
        .filter(|&p| p < h - 3 || p + 1 >= h + 4)
        .map(|p| 1u128 << (n - 1 - p))
        .fold(0, |acc, bit| acc | bit);
    let tail = |s: &BitString| {
        let sigma = |i: usize| s.get(i - 1) + s.get(n - i);
        (sigma(h - 2), sigma(h - 1), sigma(h))
    };
    let mut groups: BTreeMap<u128, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (idx, s) in profiles.members.iter().enumerate() {
        let entry = groups.entry(s.value() & outer_mask);
        match tail(s) {
            (0, 0, 1) => entry.or_default().0.push(idx),
            (1, 0, 0) => entry.or_default().1.push(idx),
            _ => {}
        }
    }
    let candidates: Vec<(usize, usize)> = groups
        .values()
        .flat_map(|(late, early)| {
            late.iter().flat_map(move |&a| early.iter().map(move |&b| (a.min(b), a.max(b))))
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    candidates.par_iter().find_map_first(|&(i, j)| check(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn equicomposability() {
        let s = bits("001010111");
        assert!(equicomposable(&s, &s.reverse()).unwrap());
        assert!(equicomposable(&s, &s).unwrap());
        assert!(!equicomposable(&bits("0011"), &bits("0101")).unwrap());
        assert!(equicomposable(&bits("01"), &bits("011")).is_err());
    }

    #[test]
    fn class_counts_at_short_lengths() {
        assert_eq!(count_classes(2).unwrap().classes, 3);
        assert_eq!(count_classes(6).unwrap().classes, 36);
        assert_eq!(count_classes(7).unwrap().classes, 72);
        let two = count_classes(2).unwrap();
        assert_eq!(two.representatives, vec![bits("00"), bits("01"), bits("11")]);
        assert!(count_classes(CLASS_COUNT_CAP + 1).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(max_code_bound(6).unwrap(), 36);
        assert_eq!(max_code_bound(9).unwrap(), 272);
        assert_eq!(max_code_bound(2).unwrap(), 3);
    }

    #[test]
    fn covering_patterns() {
        let set = |xs: &[usize]| xs.iter().copied().collect::<BTreeSet<usize>>();
        use PropertyModel::*;
        assert_eq!(AsymDelete.covering_pattern(10, &set(&[3, 4]), 2), Some(set(&[3, 4])));
        assert_eq!(AsymDelete.covering_pattern(10, &set(&[3, 8]), 2), None);
        assert_eq!(SymPairDelete.covering_pattern(10, &set(&[3]), 1), Some(set(&[3, 8])));
        assert_eq!(SymPairDelete.covering_pattern(9, &set(&[5]), 1), None);
        assert_eq!(ConsecutiveSymPairDelete.covering_pattern(12, &set(&[3, 10, 5]), 2), None);
        assert_eq!(
            ConsecutiveSymPairDelete.covering_pattern(12, &set(&[3, 5]), 3),
            Some(set(&[3, 4, 5, 8, 9, 10]))
        );
        assert_eq!(Skew.covering_pattern(9, &set(&[5]), 1), None);
        assert_eq!(AsymDelete.covering_pattern(9, &set(&[5]), 1), Some(set(&[5])));
    }

    #[test]
    fn hashing_is_canonical() {
        let s = bits("001010111");
        assert_eq!(readout_hash(&full_readout(&s)), readout_hash(&full_readout(&s.reverse())));
        assert_ne!(readout_hash(&full_readout(&s)), readout_hash(&full_readout(&bits("001010110"))));
    }

    #[test]
    fn single_errors_on_sr_ten() {
        let spec = CodebookSpec::sr(10).unwrap();
        assert!(verify_code_property(&spec, PropertyModel::AsymDelete, 1).unwrap().holds());
        assert!(verify_code_property(&spec, PropertyModel::SymPairDelete, 1).unwrap().holds());
    }

    #[test]
    fn central_pair_collision_at_six() {
        let report = verify_code_property(&CodebookSpec::sr(6).unwrap(), PropertyModel::SymPairDelete, 1).unwrap();
        let w = report.witness.expect("n = 6 has a central-pair collision");
        assert_eq!((w.s, w.v, w.pattern.clone()), (bits("001101"), bits("010011"), vec![3, 4]));
        assert!(w.verify());
        assert!(w.confirms_insertion_equivalence());
    }

    #[test]
    fn two_pair_witness_is_checkable() {
        let w = find_confusable_pair(10, PropertyModel::SymPairDelete, 2).unwrap().unwrap();
        assert!(w.verify());
        assert!(w.confirms_insertion_equivalence());
        let mut forged = w.clone();
        forged.pattern.pop();
        assert!(!forged.verify());
    }

    #[test]
    fn listing_agrees_with_first_witness() {
        let spec = CodebookSpec::sr(10).unwrap();
        let all = confusable_pairs(&spec, PropertyModel::SymPairDelete, 2).unwrap();
        let first = verify_code_property(&spec, PropertyModel::SymPairDelete, 2).unwrap().witness;
        assert_eq!(all.first(), first.as_ref());
        assert!(all.windows(2).all(|w| (w[0].s, w[0].v) < (w[1].s, w[1].v)));
        assert!(all.iter().all(ConfusabilityWitness::verify));
    }

    #[test]
    fn no_single_asym_witness_on_sr() {
        for n in 2..=10 {
            assert_eq!(find_confusable_pair(n, PropertyModel::AsymDelete, 1).unwrap(), None, "n = {n}");
        }
        assert_eq!(find_confusable_pair(9, PropertyModel::SymPairDelete, 1).unwrap(), None);
    }

    #[test]
    fn model_names_round_trip() {
        for m in PropertyModel::ALL {
            assert_eq!(m.name().parse::<PropertyModel>().unwrap(), m);
        }
        assert_eq!("sym_pair".parse::<PropertyModel>().unwrap(), PropertyModel::SymPairDelete);
    }
}
