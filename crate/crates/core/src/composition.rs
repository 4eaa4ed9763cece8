//! Compositions, composition multisets and the weight profile of a string.
//!
//! A readout groups the compositions of every substring of a string by
//! substring length. Everything downstream works from two derived views: the
//! cumulative weight `w_k` of each length class, and the mirrored pair-weight
//! sequence `σ_i = wt(s_i s_{n-i+1})`. For `k ≤ ⌈n/2⌉` they are tied by
//!
//! ```text
//! w_k = Σ_{i ≤ k} i·σ_i + k·Σ_{i > k} σ_i  =  Σ_i min(i, k)·σ_i
//! ```
//!
//! and `w_k = w_{n-k+1}` for every `k`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Counts of zeros and ones in a substring, written `0^z 1^w`.
///
/// Serializes as the pair `[z, w]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[u32; 2]", try_from = "[u32; 2]")]
pub struct Composition {
    pub zeros: u32,
    pub ones: u32,
}

impl Composition {
    pub fn new(zeros: u32, ones: u32) -> Result<Self> {
        if zeros + ones == 0 {
            return Err(Error::Domain("empty composition".into()));
        }
        Ok(Self { zeros, ones })
    }

    /// Composition of a length-`len` fragment carrying `ones` ones.
    pub fn with_weight(len: u32, ones: u32) -> Result<Self> {
        if ones > len {
            return Err(Error::Domain(format!("weight {ones} exceeds length {len}")));
        }
        Self::new(len - ones, ones)
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.zeros + self.ones
    }

    /// Always false for a constructed composition.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl From<Composition> for [u32; 2] {
    fn from(c: Composition) -> Self {
        [c.zeros, c.ones]
    }
}

impl TryFrom<[u32; 2]> for Composition {
    type Error = Error;

    fn try_from([zeros, ones]: [u32; 2]) -> Result<Self> {
        Self::new(zeros, ones)
    }
}

// Canonical order: by length, then by weight.
impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), self.ones).cmp(&(other.len(), other.ones))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0^{}1^{}", self.zeros, self.ones)
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Counted multiset of compositions that all have length `k`.
///
/// Stored as a histogram over weights, since a composition of known length
/// is fixed by its number of ones.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LengthClass {
    k: usize,
    counts: Vec<u32>,
}

impl LengthClass {
    pub fn new(k: usize) -> Self {
        Self { k, counts: vec![0; k + 1] }
    }

    pub fn from_weights(k: usize, weights: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut class = Self::new(k);
        for w in weights {
            class.insert(Composition::with_weight(k as u32, w)?)?;
        }
        Ok(class)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn insert(&mut self, c: Composition) -> Result<()> {
        self.insert_n(c, 1)
    }

    pub fn insert_n(&mut self, c: Composition, times: u32) -> Result<()> {
        if c.len() as usize != self.k {
            return Err(Error::Domain(format!(
                "composition {c} has length {} but class holds length {}",
                c.len(),
                self.k
            )));
        }
        self.counts[c.ones as usize] += times;
        Ok(())
    }

    /// Removes one copy of `c`; false if absent.
    pub fn remove(&mut self, c: Composition) -> bool {
        if c.len() as usize != self.k || self.counts[c.ones as usize] == 0 {
            return false;
        }
        self.counts[c.ones as usize] -= 1;
        true
    }

    pub fn count(&self, c: Composition) -> u32 {
        if c.len() as usize != self.k {
            return 0;
        }
        self.counts[c.ones as usize]
    }

    /// Total number of entries, with multiplicity.
    pub fn len(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Sum of the weights of all entries.
    pub fn cumulative_weight(&self) -> u64 {
        self.counts.iter().enumerate().map(|(w, &c)| w as u64 * c as u64).sum()
    }

    /// Multiplicity per weight, indexed `0..=k`.
    pub fn weight_histogram(&self) -> &[u32] {
        &self.counts
    }

    /// Distinct entries with multiplicities, in canonical (ascending weight) order.
    pub fn iter(&self) -> impl Iterator<Item = (Composition, u32)> + '_ {
        let k = self.k as u32;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(w, &c)| (Composition { zeros: k - w as u32, ones: w as u32 }, c))
    }

    /// Entries expanded by multiplicity, in canonical order.
    pub fn entries(&self) -> Vec<Composition> {
        self.iter().flat_map(|(c, m)| std::iter::repeat_n(c, m as usize)).collect()
    }

    pub fn is_subset_of(&self, other: &LengthClass) -> bool {
        self.k == other.k && self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b)
    }
}

impl fmt::Debug for LengthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}", self.k)?;
        f.debug_set()
            .entries(self.iter().map(|(c, m)| format!("{c}×{m}")))
            .finish()
    }
}

/// A size deviation of one class from the `n - k + 1` entries an intact
/// readout carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ClassAnomaly {
    Missing { k: usize },
    Undersized { k: usize, expected: usize, found: usize },
    Oversized { k: usize, expected: usize, found: usize },
}

impl ClassAnomaly {
    pub fn class(&self) -> usize {
        match *self {
            Self::Missing { k } | Self::Undersized { k, .. } | Self::Oversized { k, .. } => k,
        }
    }
}

/// The composition multiset of a length-`n` string, possibly corrupted,
/// grouped by fragment length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Readout {
    n: usize,
    classes: BTreeMap<usize, LengthClass>,
}

impl Readout {
    pub fn new(n: usize) -> Self {
        Self { n, classes: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds (or replaces) a class. Empty classes are treated as absent.
    pub fn set_class(&mut self, class: LengthClass) -> Result<()> {
        let k = class.k();
        if k == 0 || k > self.n {
            return Err(Error::Range(format!("class length {k} outside 1..={}", self.n)));
        }
        if class.is_empty() {
            self.classes.remove(&k);
        } else {
            self.classes.insert(k, class);
        }
        Ok(())
    }

    pub fn class(&self, k: usize) -> Option<&LengthClass> {
        self.classes.get(&k)
    }

    pub fn classes(&self) -> impl Iterator<Item = &LengthClass> {
        self.classes.values()
    }

    pub fn remove_class(&mut self, k: usize) -> Option<LengthClass> {
        self.classes.remove(&k)
    }

    pub fn insert_composition(&mut self, k: usize, c: Composition) -> Result<()> {
        if k == 0 || k > self.n {
            return Err(Error::Range(format!("class length {k} outside 1..={}", self.n)));
        }
        self.classes.entry(k).or_insert_with(|| LengthClass::new(k)).insert(c)
    }

    /// Entry count an intact class of length `k` carries.
    pub fn expected_size(&self, k: usize) -> usize {
        self.n + 1 - k
    }

    /// Whether class `k` is present with exactly its intact size.
    pub fn is_intact_size(&self, k: usize) -> bool {
        self.class(k).is_some_and(|c| c.len() == self.expected_size(k))
    }

    pub fn total_count(&self) -> usize {
        self.classes.values().map(LengthClass::len).sum()
    }

    /// Classes whose size differs from an intact readout, ascending by `k`.
    pub fn anomalies(&self) -> Vec<ClassAnomaly> {
        (1..=self.n)
            .filter_map(|k| {
                let expected = self.expected_size(k);
                match self.class(k) {
                    None => Some(ClassAnomaly::Missing { k }),
                    Some(c) if c.len() < expected => {
                        Some(ClassAnomaly::Undersized { k, expected, found: c.len() })
                    }
                    Some(c) if c.len() > expected => {
                        Some(ClassAnomaly::Oversized { k, expected, found: c.len() })
                    }
                    Some(_) => None,
                }
            })
            .collect()
    }

    /// Copy with the listed classes removed.
    pub fn without_classes(&self, drop: &[usize]) -> Readout {
        let mut out = self.clone();
        for k in drop {
            out.classes.remove(k);
        }
        out
    }

    /// Copy keeping only the listed classes.
    pub fn restricted_to(&self, keep: &[usize]) -> Readout {
        Readout {
            n: self.n,
            classes: self
                .classes
                .iter()
                .filter(|(k, _)| keep.contains(k))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Whether `self` and `other` agree on every class not listed in `ignore`.
    pub fn agrees_outside(&self, other: &Readout, ignore: &[usize]) -> bool {
        self.n == other.n
            && (1..=self.n)
                .filter(|k| !ignore.contains(k))
                .all(|k| self.class(k) == other.class(k))
    }
}

/// Composition of the substring `s_i … s_j` (1-based, inclusive).
pub fn composition_of(s: &BitString, i: usize, j: usize) -> Result<Composition> {
    if i == 0 || i > j || j > s.len() {
        return Err(Error::Range(format!(
            "substring {i}..={j} of a length-{} string",
            s.len()
        )));
    }
    let ones = s.ones_in(i - 1, j);
    Composition::new((j - i + 1) as u32 - ones, ones)
}

/// Compositions of all `n - k + 1` windows of length `k`.
pub fn length_class(s: &BitString, k: usize) -> Result<LengthClass> {
    let n = s.len();
    if k == 0 || k > n {
        return Err(Error::Range(format!("class length {k} outside 1..={n}")));
    }
    let mut class = LengthClass::new(k);
    for start in 0..=n - k {
        class.counts[s.ones_in(start, start + k) as usize] += 1;
    }
    Ok(class)
}

/// The full composition multiset of `s`.
pub fn full_readout(s: &BitString) -> Readout {
    let n = s.len();
    let mut r = Readout::new(n);
    for k in 1..=n {
        let class = length_class(s, k).expect("k within 1..=n");
        r.classes.insert(k, class);
    }
    r
}

/// Total weight of class `k`.
pub fn cumulative_weight(r: &Readout, k: usize) -> Result<u64> {
    r.class(k).map(LengthClass::cumulative_weight).ok_or(Error::MissingClass(k))
}

/// The pair-weight sequence `σ` of a string of length `n`: `⌈n/2⌉` entries,
/// the last being a single-bit weight when `n` is odd.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SigmaSequence {
    n: usize,
    values: Vec<u8>,
}

impl SigmaSequence {
    pub fn new(n: usize, values: Vec<u8>) -> Result<Self> {
        if values.len() != n.div_ceil(2) {
            return Err(Error::Domain(format!(
                "σ of a length-{n} string has {} entries, got {}",
                n.div_ceil(2),
                values.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if v > sigma_cap(n, i + 1) {
                return Err(Error::Domain(format!("σ_{} = {v} out of range", i + 1)));
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// `w_k = Σ_i min(i, k) σ_i`, for `1 ≤ k ≤ n` (folded through symmetry).
    pub fn weight(&self, k: usize) -> u64 {
        let k = fold_class(self.n, k);
        self.values
            .iter()
            .enumerate()
            .map(|(idx, &v)| (idx + 1).min(k) as u64 * v as u64)
            .sum()
    }

    /// `Σ_{k=1}^{⌈n/2⌉} w_k`, the quantity the modular constructions constrain.
    pub fn weight_sum(&self) -> u64 {
        let m = self.values.len();
        self.values
            .iter()
            .enumerate()
            .map(|(idx, &v)| weight_sum_coefficient(m, idx + 1) * v as u64)
            .sum()
    }
}

/// Largest admissible `σ_i` (1-based): 1 for the centre of an odd string, else 2.
pub fn sigma_cap(n: usize, i: usize) -> u8 {
    if n % 2 == 1 && i == n.div_ceil(2) { 1 } else { 2 }
}

/// Maps class `k` to its representative `min(k, n - k + 1)`.
#[inline]
pub fn fold_class(n: usize, k: usize) -> usize {
    k.min(n + 1 - k)
}

/// Coefficient of `σ_i` in `Σ_{k=1}^{m} w_k`: `Σ_k min(i, k) = i(i+1)/2 + i(m - i)`.
#[inline]
pub fn weight_sum_coefficient(m: usize, i: usize) -> u64 {
    (i * (i + 1) / 2 + i * (m - i)) as u64
}

/// Recovers `σ` from cumulative weights `weights[k-1] = w_k`.
///
/// At least `⌈n/2⌉` weights are required; any further entries must agree with
/// the weight symmetry. A recursion step landing outside `{0,1,2}` (or `{0,1}`
/// at an odd centre) is reported as an inconsistent readout.
pub fn sigma_from_weights(n: usize, weights: &[u64]) -> Result<SigmaSequence> {
    let m = n.div_ceil(2);
    if n == 0 || weights.len() < m || weights.len() > n {
        return Err(Error::Domain(format!(
            "need between {m} and {n} weights for length {n}, got {}",
            weights.len()
        )));
    }
    for k in m + 1..=weights.len() {
        let mirror = n + 1 - k;
        if weights[k - 1] != weights[mirror - 1] {
            return Err(Error::InconsistentReadout(format!(
                "w_{k} = {} but its mirror w_{mirror} = {}",
                weights[k - 1],
                weights[mirror - 1]
            )));
        }
    }
    let w = |k: usize| -> i64 { if k == 0 { 0 } else { weights[k - 1] as i64 } };
    let mut values = Vec::with_capacity(m);
    let mut partial = 0i64;
    for i in 1..=m {
        // σ_i = 2w_i − w_{i−1} − w_{i+1}; the last entry closes Σσ = w_1.
        let sigma = if i < m { 2 * w(i) - w(i - 1) - w(i + 1) } else { w(1) - partial };
        if sigma < 0 || sigma > sigma_cap(n, i) as i64 {
            return Err(Error::InconsistentReadout(format!(
                "weights force σ_{i} = {sigma}"
            )));
        }
        partial += sigma;
        values.push(sigma as u8);
    }
    // The last step only used w_1; w_m must also agree.
    let seq = SigmaSequence { n, values };
    if seq.weight(m) != weights[m - 1] {
        return Err(Error::InconsistentReadout(format!(
            "w_{m} = {} disagrees with recovered σ",
            weights[m - 1]
        )));
    }
    Ok(seq)
}

/// Cumulative weights `w_1..=w_n` of every class present in a readout.
pub fn weights_of(r: &Readout) -> Vec<Option<u64>> {
    (1..=r.n()).map(|k| r.class(k).map(LengthClass::cumulative_weight)).collect()
}

/// `σ_i = wt(s_i s_{n-i+1})`, computed directly.
pub fn sigma_of_string(s: &BitString) -> SigmaSequence {
    let n = s.len();
    let m = n.div_ceil(2);
    let values = (0..m)
        .map(|i| {
            let j = n - 1 - i;
            if i == j { s.get(i) } else { s.get(i) + s.get(j) }
        })
        .collect();
    SigmaSequence { n, values }
}

/// `whole − part`, componentwise. Fails on underflow or an empty result.
pub fn complement(whole: Composition, part: Composition) -> Result<Composition> {
    if part.zeros > whole.zeros || part.ones > whole.ones {
        return Err(Error::InvalidComplement(format!("{part} is not contained in {whole}")));
    }
    Composition::new(whole.zeros - part.zeros, whole.ones - part.ones)
        .map_err(|_| Error::InvalidComplement(format!("{whole} minus itself is empty")))
}

/// One monomial `x^xdeg y^ydeg` of the bivariate generating polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PolyTerm {
    pub xdeg: u32,
    pub ydeg: u32,
}

/// Terms of `P_s(x, y)`: term 0 is `1`; term `i` multiplies term `i-1` by `x`
/// for a one and by `y` for a zero.
pub fn bivariate_poly(s: &BitString) -> Vec<PolyTerm> {
    let mut terms = Vec::with_capacity(s.len() + 1);
    let mut cur = PolyTerm { xdeg: 0, ydeg: 0 };
    terms.push(cur);
    for b in s.iter() {
        if b == 1 {
            cur.xdeg += 1;
        } else {
            cur.ydeg += 1;
        }
        terms.push(cur);
    }
    terms
}
