//! Corruption of readouts under whole-class deletions, insertions and skewed
//! substitutions.
//!
//! Seeded draws use ChaCha8 seeded with [`rand_chacha::rand_core::SeedableRng::seed_from_u64`],
//! so a seed yields the same error on every platform.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composition::{Composition, Readout};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModel {
    /// Whole classes removed, no two of them mirror partners.
    AsymDelete,
    /// Whole mirror pairs `{C_i, C_{n+1-i}}` removed.
    SymPairDelete,
    /// Spurious compositions added to named classes.
    Insert,
    /// One entry per named class replaced by a lighter one of equal length;
    /// no two named classes are mirror partners.
    Skew,
}

impl ErrorModel {
    pub const ALL: [ErrorModel; 4] = [Self::AsymDelete, Self::SymPairDelete, Self::Insert, Self::Skew];

    pub fn name(self) -> &'static str {
        match self {
            Self::AsymDelete => "asym_delete",
            Self::SymPairDelete => "sym_pair_delete",
            Self::Insert => "insert",
            Self::Skew => "skew",
        }
    }

    /// Most targets one error of this model can name at length `n`.
    pub fn capacity(self, n: usize) -> usize {
        match self {
            Self::AsymDelete => n.div_ceil(2),
            Self::SymPairDelete => n / 2,
            Self::Insert => usize::MAX,
            Self::Skew => n.div_ceil(2),
        }
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidErrorSpec(format!("unknown error model `{s}`")))
    }
}

/// One corrupted location. The shape must match the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    /// `asym_delete`: the class index.
    Class(usize),
    /// `sym_pair_delete`: both class indices of the pair.
    Pair([usize; 2]),
    /// `skew`: which entry of `class` is under-read, and as what.
    Skew { class: usize, entry: Composition, replacement: Composition },
    /// `insert`: a composition added to `class`.
    Insertion { class: usize, entry: Composition },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Targets {
    Explicit { targets: Vec<Target> },
    /// Resolved against the readout by [`random_error`].
    Seeded { count: usize, seed: u64 },
}

/// A model plus its targets; JSON `{model, targets}` or `{model, count, seed}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub model: ErrorModel,
    #[serde(flatten)]
    pub targets: Targets,
}

impl ErrorSpec {
    pub fn explicit(model: ErrorModel, targets: Vec<Target>) -> Self {
        Self { model, targets: Targets::Explicit { targets } }
    }

    pub fn seeded(model: ErrorModel, count: usize, seed: u64) -> Self {
        Self { model, targets: Targets::Seeded { count, seed } }
    }

    pub fn asym_delete(classes: &[usize]) -> Self {
        Self::explicit(ErrorModel::AsymDelete, classes.iter().map(|&k| Target::Class(k)).collect())
    }

    /// Pairs given by their smaller index at length `n`.
    pub fn sym_pair_delete(n: usize, pairs: &[usize]) -> Self {
        let targets = pairs.iter().map(|&i| Target::Pair([i, n + 1 - i])).collect();
        Self::explicit(ErrorModel::SymPairDelete, targets)
    }

    /// Classes this error touches, ascending.
    pub fn classes(&self) -> Vec<usize> {
        let Targets::Explicit { targets } = &self.targets else {
            return Vec::new();
        };
        let set: BTreeSet<usize> = targets
            .iter()
            .flat_map(|t| match *t {
                Target::Class(k) | Target::Skew { class: k, .. } | Target::Insertion { class: k, .. } => vec![k],
                Target::Pair([i, j]) => vec![i, j],
            })
            .collect();
        set.into_iter().collect()
    }
}

/// Applies `e` to a copy of `r`. Seeded specs are resolved against `r` first.
pub fn apply(r: &Readout, e: &ErrorSpec) -> Result<Readout> {
    let targets = match &e.targets {
        Targets::Explicit { targets } => targets.clone(),
        Targets::Seeded { count, seed } => match random_error(e.model, *count, *seed, r)?.targets {
            Targets::Explicit { targets } => targets,
            Targets::Seeded { .. } => unreachable!("random_error resolves every target"),
        },
    };
    let n = r.n();
    let in_range = |k: usize| {
        if (1..=n).contains(&k) {
            Ok(())
        } else {
            Err(Error::InvalidErrorSpec(format!("class {k} outside 1..={n}")))
        }
    };
    let mut out = r.clone();
    let mut touched = BTreeSet::new();
    for target in &targets {
        match (e.model, *target) {
            (ErrorModel::AsymDelete, Target::Class(k)) => {
                in_range(k)?;
                if touched.contains(&(n + 1 - k)) && 2 * k != n + 1 {
                    return Err(Error::InvalidErrorSpec(format!(
                        "classes {k} and {} are mirror partners",
                        n + 1 - k
                    )));
                }
                delete_class(&mut out, k, &mut touched)?;
            }
            (ErrorModel::SymPairDelete, Target::Pair([i, j])) => {
                in_range(i)?;
                in_range(j)?;
                if i + j != n + 1 || i == j {
                    return Err(Error::InvalidErrorSpec(format!("({i}, {j}) is not a mirror pair at n = {n}")));
                }
                delete_class(&mut out, i, &mut touched)?;
                delete_class(&mut out, j, &mut touched)?;
            }
            (ErrorModel::Insert, Target::Insertion { class, entry }) => {
                in_range(class)?;
                if entry.len() as usize != class {
                    return Err(Error::InvalidErrorSpec(format!("{entry} does not have length {class}")));
                }
                out.insert_composition(class, entry)?;
            }
            (ErrorModel::Skew, Target::Skew { class, entry, replacement }) => {
                in_range(class)?;
                if !touched.insert(class) {
                    return Err(Error::InvalidErrorSpec(format!("class {class} skewed twice")));
                }
                if 2 * class != n + 1 && touched.contains(&(n + 1 - class)) {
                    return Err(Error::InvalidErrorSpec(format!(
                        "classes {class} and {} are mirror partners",
                        n + 1 - class
                    )));
                }
                skew_entry(&mut out, class, entry, replacement)?;
            }
            (model, target) => {
                return Err(Error::InvalidErrorSpec(format!("target {target:?} does not fit model {model}")));
            }
        }
    }
    Ok(out)
}

fn delete_class(r: &mut Readout, k: usize, touched: &mut BTreeSet<usize>) -> Result<()> {
    if !touched.insert(k) {
        return Err(Error::InvalidErrorSpec(format!("class {k} targeted twice")));
    }
    r.remove_class(k)
        .map(drop)
        .ok_or_else(|| Error::InvalidErrorSpec(format!("class {k} is already missing")))
}

fn skew_entry(r: &mut Readout, k: usize, entry: Composition, replacement: Composition) -> Result<()> {
    if replacement.len() != entry.len() || entry.len() as usize != k {
        return Err(Error::InvalidSkew(format!("{entry} → {replacement} in class {k}: lengths differ")));
    }
    if replacement.ones >= entry.ones {
        return Err(Error::InvalidSkew(format!("{entry} → {replacement} does not lower the weight")));
    }
    let mut class = r.class(k).cloned().ok_or(Error::MissingClass(k))?;
    if !class.remove(entry) {
        return Err(Error::InvalidErrorSpec(format!("class {k} holds no {entry}")));
    }
    class.insert(replacement)?;
    r.set_class(class)
}

/// Draws `count` targets for `model` against `r`, deterministically in `seed`.
///
/// Deletion patterns are uniform over all valid patterns of that size. An
/// insertion picks a class uniformly (with repetition) and a composition of
/// uniform weight. A skew picks a uniform set of classes that hold a
/// nonzero-weight entry and contain no mirror pair, then in each class such an
/// entry uniformly by multiplicity, then a uniform lower weight.
pub fn random_error(model: ErrorModel, count: usize, seed: u64, r: &Readout) -> Result<ErrorSpec> {
    let n = r.n();
    if count > model.capacity(n) {
        return Err(Error::InvalidErrorSpec(format!(
            "{model} supports at most {} targets at n = {n}",
            model.capacity(n)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = match model {
        ErrorModel::AsymDelete => asym_pattern(&mut rng, n, count).into_iter().map(Target::Class).collect(),
        ErrorModel::SymPairDelete => {
            let mut pairs: Vec<usize> = sample(&mut rng, n / 2, count).into_iter().map(|i| i + 1).collect();
            pairs.sort_unstable();
            pairs.into_iter().map(|i| Target::Pair([i, n + 1 - i])).collect()
        }
        ErrorModel::Insert => (0..count)
            .map(|_| {
                let class = rng.gen_range(1..=n);
                let ones = rng.gen_range(0..=class as u32);
                let entry = Composition::with_weight(class as u32, ones).expect("weight within length");
                Target::Insertion { class, entry }
            })
            .collect(),
        ErrorModel::Skew => skew_targets(&mut rng, r, count)?,
    };
    Ok(ErrorSpec::explicit(model, targets))
}

/// Uniform over size-`count` class sets with no mirror pair.
fn asym_pattern(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<usize> {
    let pairs = n / 2;
    let has_centre = n % 2 == 1;
    // Patterns using the centre: C(pairs, count-1)·2^(count-1); without: C(pairs, count)·2^count.
    let with_centre = if has_centre && count >= 1 { binomial(pairs, count - 1) << (count - 1) } else { 0 };
    let without = binomial(pairs, count) << count;
    let use_centre = with_centre > 0 && rng.gen_range(0..with_centre + without) < with_centre;
    let from_pairs = count - usize::from(use_centre);
    let mut classes: Vec<usize> = sample(rng, pairs, from_pairs)
        .into_iter()
        .map(|p| if rng.gen::<bool>() { p + 1 } else { n - p })
        .collect();
    if use_centre {
        classes.push(n.div_ceil(2));
    }
    classes.sort_unstable();
    classes
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn skew_targets(rng: &mut ChaCha8Rng, r: &Readout, count: usize) -> Result<Vec<Target>> {
    let eligible: Vec<usize> = r
        .classes()
        .filter(|c| c.weight_histogram()[1..].iter().any(|&m| m > 0))
        .map(|c| c.k())
        .collect();
    let n = r.n();
    let folds: BTreeSet<usize> = eligible.iter().map(|&k| k.min(n + 1 - k)).collect();
    if count > folds.len() {
        return Err(Error::InvalidErrorSpec(format!(
            "only {} mirror pairs hold an entry that can be skewed",
            folds.len()
        )));
    }
    // Rejection keeps the draw uniform over mirror-free sets.
    let mut picked: Vec<usize> = loop {
        let draw: Vec<usize> = sample(rng, eligible.len(), count).into_iter().map(|i| eligible[i]).collect();
        let distinct: BTreeSet<usize> = draw.iter().map(|&k| k.min(n + 1 - k)).collect();
        if distinct.len() == count {
            break draw;
        }
    };
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|k| {
            let class = r.class(k).expect("eligible class is present");
            let heavy: Vec<Composition> = class.entries().into_iter().filter(|c| c.ones > 0).collect();
            let entry = heavy[rng.gen_range(0..heavy.len())];
            let ones = rng.gen_range(0..entry.ones);
            let replacement = Composition::with_weight(k as u32, ones).expect("weight within length");
            Target::Skew { class: k, entry, replacement }
        })
        .collect())
}
