//! Codebook families: membership, enumeration, ranking and size accounting.
//!
//! Every family here is built on the same pair structure. Position `i` and its
//! mirror `n + 1 - i` form pair `i`; the outermost pair is pinned to `(0, 1)`,
//! unequal inner pairs contribute one bit each (the first-half bit) to a
//! ballot-constrained "selected" string, and equal pairs contribute nothing.
//! Families then add a weight-sum residue, a dominance margin or parity.

mod automaton;
mod bounds;
mod predicates;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

pub(crate) use automaton::{PairAutomaton, PairState};
pub use automaton::ENUMERATION_CAP;
pub use bounds::{
    largest_residue, measured_redundancy, modulus_a, redundancy_bound, size_lower_bound,
};
pub use predicates::{is_catalan_bertrand, is_t_dominated, AntiSymmetricIndexSet};

/// Which construction a [`CodebookSpec`] selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// Reconstructable code: anchored ends, ballot-constrained selected string.
    #[serde(rename = "SR")]
    Sr,
    /// Single composition-error code: a starred pair wrapped around an inner
    /// reconstructable string, with parity and a mod-3 weight-sum check.
    #[serde(rename = "SCA1")]
    Sca1,
    /// `t`-asymmetric deletion code: selected string `t`-dominated.
    #[serde(rename = "SDA")]
    Sda,
    /// 2-symmetric-pair deletion code: weight sum fixed mod 7.
    #[serde(rename = "SDS2")]
    Sds2,
    /// `t` consecutive symmetric-pair deletion code: weight sum fixed mod `A(t)`.
    #[serde(rename = "SDSprime")]
    SdsPrime,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Sr, Family::Sca1, Family::Sda, Family::Sds2, Family::SdsPrime];

    pub fn name(self) -> &'static str {
        match self {
            Family::Sr => "SR",
            Family::Sca1 => "SCA1",
            Family::Sda => "SDA",
            Family::Sds2 => "SDS2",
            Family::SdsPrime => "SDSprime",
        }
    }

    /// Whether the error parameter `t` is meaningful (otherwise pinned to 1).
    pub fn uses_t(self) -> bool {
        matches!(self, Family::Sda | Family::SdsPrime)
    }

    /// Whether the residue `a` is meaningful (otherwise pinned to 0).
    pub fn uses_residue(self) -> bool {
        matches!(self, Family::Sca1 | Family::Sds2 | Family::SdsPrime)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Spec(format!("unknown family {s:?}")))
    }
}

/// A validated choice of family and parameters.
///
/// Serializes as `{family, n, t, a}`; the modulus is always derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct CodebookSpec {
    family: Family,
    n: usize,
    t: usize,
    a: u64,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    family: Family,
    n: usize,
    #[serde(default = "one")]
    t: usize,
    #[serde(default)]
    a: u64,
}

fn one() -> usize {
    1
}

impl TryFrom<RawSpec> for CodebookSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        CodebookSpec::new(raw.family, raw.n, raw.t, raw.a)
    }
}

impl From<CodebookSpec> for RawSpec {
    fn from(spec: CodebookSpec) -> Self {
        RawSpec { family: spec.family, n: spec.n, t: spec.t, a: spec.a }
    }
}

impl CodebookSpec {
    pub fn new(family: Family, n: usize, t: usize, a: u64) -> Result<Self> {
        if !(2..=crate::bits::MAX_LEN).contains(&n) {
            return Err(Error::Spec(format!("n = {n} outside 2..={}", crate::bits::MAX_LEN)));
        }
        if t == 0 {
            return Err(Error::Spec("t must be at least 1".into()));
        }
        if !family.uses_t() && t != 1 {
            return Err(Error::Spec(format!("{family} has no t parameter (got t = {t})")));
        }
        match family {
            Family::SdsPrime if t < 2 || n < 2 * t + 4 => {
                return Err(Error::Spec(format!("{family} needs t ≥ 2 and n ≥ 2t + 4 (t = {t}, n = {n})")));
            }
            Family::Sca1 if n < 4 => {
                return Err(Error::Spec(format!("{family} needs n ≥ 4 (n = {n})")));
            }
            _ => {}
        }
        let modulus = Self::modulus_for(family, t);
        if a >= modulus {
            return Err(Error::Spec(format!("residue a = {a} must lie in 0..{modulus}")));
        }
        Ok(Self { family, n, t, a })
    }

    pub fn sr(n: usize) -> Result<Self> {
        Self::new(Family::Sr, n, 1, 0)
    }

    pub fn sca1(n: usize, a: u64) -> Result<Self> {
        Self::new(Family::Sca1, n, 1, a)
    }

    pub fn sda(n: usize, t: usize) -> Result<Self> {
        Self::new(Family::Sda, n, t, 0)
    }

    pub fn sds2(n: usize, a: u64) -> Result<Self> {
        Self::new(Family::Sds2, n, 1, a)
    }

    pub fn sds_prime(n: usize, t: usize, a: u64) -> Result<Self> {
        Self::new(Family::SdsPrime, n, t, a)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    /// Modulus of the weight-sum constraint; 1 when the family has none.
    pub fn modulus(&self) -> u64 {
        Self::modulus_for(self.family, self.t)
    }

    fn modulus_for(family: Family, t: usize) -> u64 {
        match family {
            Family::Sca1 => 3,
            Family::Sds2 => 7,
            Family::SdsPrime => modulus_a(t).unwrap_or(1),
            Family::Sr | Family::Sda => 1,
        }
    }

    /// The same family and parameters at a different residue.
    pub fn with_residue(&self, a: u64) -> Result<Self> {
        Self::new(self.family, self.n, self.t, a)
    }

    /// The same family and parameters at a different length.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.family, n, self.t, self.a)
    }

    /// Membership, evaluated directly from the family definition.
    pub fn is_member(&self, s: &BitString) -> Result<bool> {
        if s.len() != self.n {
            return Err(Error::Spec(format!(
                "string of length {} tested against a length-{} codebook",
                s.len(),
                self.n
            )));
        }
        Ok(predicates::is_member(self, s))
    }

    /// Number of codewords.
    pub fn size(&self) -> u128 {
        PairAutomaton::new(self).count(&vec![None; self.n])
    }

    /// All codewords in lexicographic order.
    pub fn enumerate(&self) -> Result<Vec<BitString>> {
        PairAutomaton::new(self).enumerate()
    }

    /// Lexicographic index of a codeword.
    pub fn rank(&self, s: &BitString) -> Result<u128> {
        if !self.is_member(s)? {
            return Err(Error::Domain(format!("{s} is not a member of {self}")));
        }
        Ok(PairAutomaton::new(self).rank(s))
    }

    /// Codeword at a lexicographic index.
    pub fn unrank(&self, index: u128) -> Result<BitString> {
        PairAutomaton::new(self).unrank(index)
    }
}

impl fmt::Display for CodebookSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}", self.family, self.n)?;
        if self.family.uses_t() {
            write!(f, ", t={}", self.t)?;
        }
        if self.family.uses_residue() {
            write!(f, ", a={}", self.a)?;
        }
        f.write_str(")")
    }
}

/// Parses `family,n[,t[,a]]`, e.g. `SDA,12,2` or `SDS2,12,1,3`.
impl FromStr for CodebookSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() < 2 || parts.len() > 4 {
            return Err(Error::Spec(format!("expected family,n[,t[,a]], got {s:?}")));
        }
        let family: Family = parts[0].parse()?;
        let num = |idx: usize, what: &str| -> Result<u64> {
            parts[idx]
                .parse::<u64>()
                .map_err(|_| Error::Spec(format!("{what} must be a non-negative integer, got {:?}", parts[idx])))
        };
        let n = num(1, "n")? as usize;
        let t = if parts.len() > 2 { num(2, "t")? as usize } else if family == Family::SdsPrime { 2 } else { 1 };
        let a = if parts.len() > 3 { num(3, "a")? } else { 0 };
        Self::new(family, n, t, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn brute_members(spec: &CodebookSpec) -> Vec<BitString> {
        BitString::all(spec.n()).unwrap().filter(|s| spec.is_member(s).unwrap()).collect()
    }

    fn all_specs(n: usize) -> Vec<CodebookSpec> {
        let mut specs = vec![CodebookSpec::sr(n).unwrap()];
        for t in 1..=3 {
            specs.push(CodebookSpec::sda(n, t).unwrap());
        }
        for a in 0..7 {
            specs.push(CodebookSpec::sds2(n, a).unwrap());
        }
        if n >= 4 {
            for a in 0..3 {
                specs.push(CodebookSpec::sca1(n, a).unwrap());
            }
        }
        for t in 2..=3 {
            if n >= 2 * t + 4 {
                for a in 0..modulus_a(t).unwrap() {
                    specs.push(CodebookSpec::sds_prime(n, t, a).unwrap());
                }
            }
        }
        specs
    }

    #[test]
    fn sr_small_codebooks() {
        assert_eq!(CodebookSpec::sr(2).unwrap().enumerate().unwrap(), vec![bs("01")]);
        assert_eq!(CodebookSpec::sr(3).unwrap().enumerate().unwrap(), vec![bs("001"), bs("011")]);
        assert_eq!(
            CodebookSpec::sr(4).unwrap().enumerate().unwrap(),
            vec![bs("0001"), bs("0011"), bs("0111")]
        );
        let sr9 = CodebookSpec::sr(9).unwrap();
        assert!(sr9.is_member(&bs("001010111")).unwrap());
        let sr2 = CodebookSpec::sr(2).unwrap();
        assert!(!sr2.is_member(&bs("10")).unwrap());
        assert!(sr2.is_member(&bs("011")).is_err());
    }

    #[test]
    fn hand_counted_sizes() {
        assert_eq!(CodebookSpec::sr(8).unwrap().size(), 28);
        assert_eq!(CodebookSpec::sda(8, 2).unwrap().size(), 7);
    }

    #[test]
    fn automaton_matches_definition() {
        for n in 2..=13 {
            for spec in all_specs(n) {
                let expected = brute_members(&spec);
                assert_eq!(spec.enumerate().unwrap(), expected, "{spec}");
                assert_eq!(spec.size(), expected.len() as u128, "{spec}");
            }
        }
    }

    #[test]
    fn rank_unrank_round_trip() {
        for n in 2..=12 {
            for spec in all_specs(n) {
                for (i, s) in spec.enumerate().unwrap().iter().enumerate() {
                    assert_eq!(spec.rank(s).unwrap(), i as u128);
                    assert_eq!(spec.unrank(i as u128).unwrap(), *s);
                }
                assert!(matches!(spec.unrank(spec.size()), Err(Error::Domain(_))));
            }
        }
        let sr4 = CodebookSpec::sr(4).unwrap();
        assert_eq!(sr4.rank(&bs("0011")).unwrap(), 1);
        assert_eq!(CodebookSpec::sr(2).unwrap().unrank(0).unwrap(), bs("01"));
        assert!(matches!(sr4.rank(&bs("0101")), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_works_beyond_enumeration_cap() {
        let spec = CodebookSpec::sr(100).unwrap();
        let size = spec.size();
        for idx in [0, 1, size / 3, size / 2 + 17, size - 1] {
            let s = spec.unrank(idx).unwrap();
            assert!(spec.is_member(&s).unwrap());
            assert_eq!(spec.rank(&s).unwrap(), idx);
        }
        let sds = CodebookSpec::sds_prime(40, 3, 5).unwrap();
        let s = sds.unrank(sds.size() / 2).unwrap();
        assert!(sds.is_member(&s).unwrap());
        assert_eq!(sds.rank(&s).unwrap(), sds.size() / 2);
    }

    #[test]
    fn residues_partition_sr() {
        for n in [8, 9, 10, 11, 12] {
            let sr = CodebookSpec::sr(n).unwrap().enumerate().unwrap();
            let mut union: Vec<BitString> = (0..7)
                .flat_map(|a| CodebookSpec::sds2(n, a).unwrap().enumerate().unwrap())
                .collect();
            union.sort();
            assert_eq!(union, sr);
        }
    }

    #[test]
    fn sca1_codewords_are_sr_codewords() {
        for n in 4..=14 {
            let sr = CodebookSpec::sr(n).unwrap();
            for a in 0..3 {
                for s in CodebookSpec::sca1(n, a).unwrap().enumerate().unwrap() {
                    assert!(sr.is_member(&s).unwrap(), "{s} in SCA1({n}, a={a}) but not SR({n})");
                }
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(CodebookSpec::sds2(10, 7).is_err());
        assert!(CodebookSpec::sds_prime(7, 2, 0).is_err());
        assert!(CodebookSpec::sds_prime(8, 2, 0).is_ok());
        assert!(CodebookSpec::sds_prime(8, 1, 0).is_err());
        assert!(CodebookSpec::new(Family::Sr, 1, 1, 0).is_err());
        assert!(CodebookSpec::new(Family::Sr, 8, 2, 0).is_err());
        assert!(CodebookSpec::sca1(3, 0).is_err());
        assert_eq!(CodebookSpec::sds_prime(10, 3, 0).unwrap().modulus(), 31);
        assert_eq!(CodebookSpec::sds_prime(10, 2, 0).unwrap().modulus(), 5);
    }

    #[test]
    fn spec_text_and_json() {
        let spec: CodebookSpec = "SDS2,12,1,3".parse().unwrap();
        assert_eq!(spec, CodebookSpec::sds2(12, 3).unwrap());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"SDS2","n":12,"t":1,"a":3}"#);
        assert_eq!(serde_json::from_str::<CodebookSpec>(&json).unwrap(), spec);
        assert!(serde_json::from_str::<CodebookSpec>(r#"{"family":"SDS2","n":12,"t":1,"a":9}"#).is_err());
        assert_eq!("sda,12,2".parse::<CodebookSpec>().unwrap(), CodebookSpec::sda(12, 2).unwrap());
        assert_eq!("SDSprime,10".parse::<CodebookSpec>().unwrap().t(), 2);
        assert!("XYZ,4".parse::<CodebookSpec>().is_err());
    }
}
