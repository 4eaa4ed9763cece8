//! Complete outside-in search for strings consistent with the surviving
//! classes of a readout.
//!
//! The search runs in two layers. The outer layer enumerates pair-weight
//! sequences `σ` whose implied cumulative weights agree with every weight the
//! readout still pins down (a class or its mirror partner). The inner layer
//! assigns mirror pairs outside-in: `σ_i ∈ {0, 2}` forces the pair, `σ_i = 1`
//! branches `(0,1)` before `(1,0)`. After each pair, every window whose weight
//! is already determined must fit inside its class; a branch that overdraws a
//! class is dead.
//!
//! A window `[a, b]` (1-based) is determined at depth `d` (pairs `1..=d`
//! assigned) when it lies inside the known prefix or suffix, when it covers
//! the unknown middle (`a ≤ d + 1`, `b ≥ n − d`; its weight is the total minus
//! the uncovered known ends), or when it is centred (`a + b = n + 1`; its
//! weight is `Σ_{i ≥ a} σ_i`).

use crate::bits::BitString;
use crate::codebook::{CodebookSpec, PairAutomaton, PairState};
use crate::composition::{length_class, sigma_cap, weight_sum_coefficient, Readout};
use crate::error::{Error, Result};

use std::collections::BTreeSet;

/// Counters describing one search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchStats {
    /// Pair-weight sequences consistent with the known weights.
    pub sigma_candidates: u64,
    /// Partial assignments examined.
    pub nodes: u64,
    /// `σ_i = 1` branches whose first orientation died and was reversed.
    pub backtracks: u64,
    /// Most inward steps a dead `σ_i = 1` branch survived, counting the
    /// branching pair itself, under the pair-weight sequence of a solution.
    pub max_dead_depth: usize,
}

/// What the readout still says once unusable classes are set aside.
pub(crate) struct Evidence {
    n: usize,
    /// Histogram per class length (index `k`), for surviving classes only.
    classes: Vec<Option<Vec<u32>>>,
    /// `w_k` for folded `k ∈ 1..=⌈n/2⌉`, where some surviving class pins it.
    weights: Vec<Option<u64>>,
}

impl Evidence {
    /// Classes survive when present, intact-sized and not in `erased`.
    pub(crate) fn new(r: &Readout, erased: &BTreeSet<usize>) -> Result<Self> {
        let n = r.n();
        let m = n.div_ceil(2);
        let mut classes = vec![None; n + 1];
        let mut weights: Vec<Option<u64>> = vec![None; m + 1];
        for (k, slot) in classes.iter_mut().enumerate().skip(1) {
            if erased.contains(&k) || !r.is_intact_size(k) {
                continue;
            }
            let class = r.class(k).expect("intact class is present");
            let folded = k.min(n + 1 - k);
            let w = class.cumulative_weight();
            match weights[folded] {
                Some(prev) if prev != w => {
                    return Err(Error::InconsistentReadout(format!(
                        "w_{k} = {w} disagrees with its mirror class (weight {prev})"
                    )));
                }
                _ => weights[folded] = Some(w),
            }
            *slot = Some(class.weight_histogram().to_vec());
        }
        Ok(Self { n, classes, weights })
    }
}

/// Search bounds and the optional codebook filter.
pub(crate) struct SearchConfig<'a> {
    pub spec: Option<&'a CodebookSpec>,
    /// Stop once this many solutions are known.
    pub max_solutions: usize,
}

pub(crate) struct SearchOutcome {
    pub solutions: Vec<BitString>,
    pub stats: SearchStats,
}

pub(crate) fn search(evidence: &Evidence, config: &SearchConfig<'_>) -> Result<SearchOutcome> {
    let n = evidence.n;
    if let Some(spec) = config.spec {
        if spec.n() != n {
            return Err(Error::Spec(format!("readout has n = {n} but the codebook has n = {}", spec.n())));
        }
    }
    let automaton = config.spec.map(PairAutomaton::new);
    let mut engine = Engine {
        n,
        evidence,
        spec: config.spec,
        automaton: automaton.as_ref(),
        max_solutions: config.max_solutions.max(1),
        solutions: Vec::new(),
        stats: SearchStats::default(),
        bits: vec![0; n],
        tail: vec![0; n.div_ceil(2) + 2],
        total: 0,
        deepest: 0,
        dead_depth: 0,
        scratch: vec![0; n + 1],
    };
    for sigma in sigma_candidates(evidence, automaton.as_ref()) {
        engine.stats.sigma_candidates += 1;
        engine.run_sigma(&sigma);
        if engine.done() {
            break;
        }
    }
    Ok(SearchOutcome { solutions: engine.solutions, stats: engine.stats })
}

/// All `σ` consistent with the known folded weights and, given a codebook,
/// with its anchor, residue and parity constraints.
fn sigma_candidates(evidence: &Evidence, automaton: Option<&PairAutomaton>) -> Vec<Vec<u8>> {
    let n = evidence.n;
    let m = n.div_ceil(2);
    let caps: Vec<u8> = (1..=m).map(|i| sigma_cap(n, i)).collect();
    let max_total: u64 = caps.iter().map(|&c| c as u64).sum();
    let totals: Vec<u64> = match evidence.weights[1] {
        Some(w1) => vec![w1],
        None => (0..=max_total).collect(),
    };
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    for total in totals {
        if total > max_total {
            continue;
        }
        extend_sigma(evidence, automaton, &caps, total, 0, 0, &mut current, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn extend_sigma(
    evidence: &Evidence,
    automaton: Option<&PairAutomaton>,
    caps: &[u8],
    total: u64,
    partial: u64,
    weighted: u64,
    current: &mut Vec<u8>,
    out: &mut Vec<Vec<u8>>,
) {
    let m = caps.len();
    let k = current.len();
    if k == m {
        if partial == total && automaton.is_none_or(|a| sigma_meets_residue(a, current)) {
            out.push(current.clone());
        }
        return;
    }
    let room_after: u64 = caps[k + 1..].iter().map(|&c| c as u64).sum();
    for v in 0..=caps[k] {
        let p = partial + v as u64;
        if p > total || total - p > room_after {
            continue;
        }
        if k == 0 && automaton.is_some() && v != 1 {
            // The outermost pair of every codebook is (0, 1).
            continue;
        }
        let q = weighted + (k as u64 + 1) * v as u64;
        // w_{k+1} = Σ_{i ≤ k+1} i σ_i + (k+1)(total − Σ_{i ≤ k+1} σ_i).
        let w = q + (k as u64 + 1) * (total - p);
        if evidence.weights[k + 1].is_some_and(|known| known != w) {
            continue;
        }
        current.push(v);
        extend_sigma(evidence, automaton, caps, total, p, q, current, out);
        current.pop();
    }
}

fn sigma_meets_residue(automaton: &PairAutomaton, sigma: &[u8]) -> bool {
    let m = sigma.len();
    let modulus = automaton.modulus();
    let residue = sigma
        .iter()
        .enumerate()
        .map(|(i, &v)| weight_sum_coefficient(m, i + 1) * v as u64)
        .sum::<u64>()
        % modulus;
    let parity = sigma.iter().map(|&v| v as u32).sum::<u32>() % 2;
    automaton.residue_ok(residue, parity as u8)
}

struct Engine<'a> {
    n: usize,
    evidence: &'a Evidence,
    spec: Option<&'a CodebookSpec>,
    automaton: Option<&'a PairAutomaton>,
    max_solutions: usize,
    solutions: Vec<BitString>,
    stats: SearchStats,
    bits: Vec<u8>,
    /// `tail[a] = Σ_{i ≥ a} σ_i` (1-based).
    tail: Vec<u64>,
    total: u64,
    /// Deepest depth whose check ran, for dead-branch accounting.
    deepest: usize,
    /// Longest dead branch under the current `σ`.
    dead_depth: usize,
    scratch: Vec<u32>,
}

impl Engine<'_> {
    fn done(&self) -> bool {
        self.solutions.len() >= self.max_solutions
    }

    fn run_sigma(&mut self, sigma: &[u8]) {
        let m = sigma.len();
        self.tail = vec![0; m + 2];
        for a in (1..=m).rev() {
            self.tail[a] = self.tail[a + 1] + sigma[a - 1] as u64;
        }
        self.total = self.tail[1];
        if self.n % 2 == 1 {
            self.bits[m - 1] = sigma[m - 1];
        }
        if !self.consistent(0) {
            return;
        }
        let found_before = self.solutions.len();
        self.dead_depth = 0;
        let start = self.automaton.map(|a| a.start());
        self.assign(0, sigma, start);
        if self.solutions.len() > found_before {
            self.stats.max_dead_depth = self.stats.max_dead_depth.max(self.dead_depth);
        }
    }

    fn assign(&mut self, j: usize, sigma: &[u8], state: Option<PairState>) {
        let n = self.n;
        let h = n / 2;
        if j == h {
            self.finish(sigma, state);
            return;
        }
        let options: &[(u8, u8)] = match sigma[j] {
            0 => &[(0, 0)],
            2 => &[(1, 1)],
            _ => &[(0, 1), (1, 0)],
        };
        let branching = options.len() == 2;
        for (idx, &(first, second)) in options.iter().enumerate() {
            if self.done() {
                return;
            }
            let next = match (self.automaton, state) {
                (Some(a), Some(s)) => match a.step(s, j, first, second) {
                    Some(next) => Some(next),
                    None => continue,
                },
                _ => None,
            };
            self.bits[j] = first;
            self.bits[n - 1 - j] = second;
            let found_before = self.solutions.len();
            let outer_deepest = self.deepest;
            self.deepest = j + 1;
            self.stats.nodes += 1;
            if self.consistent(j + 1) {
                self.assign(j + 1, sigma, next);
            }
            if branching && self.solutions.len() == found_before {
                let span = self.deepest - j;
                self.dead_depth = self.dead_depth.max(span);
                if idx == 0 {
                    self.stats.backtracks += 1;
                }
            }
            self.deepest = self.deepest.max(outer_deepest);
        }
    }

    fn finish(&mut self, sigma: &[u8], state: Option<PairState>) {
        let n = self.n;
        if let (Some(a), Some(s)) = (self.automaton, state) {
            let s = if a.has_centre() { a.step_centre(s, sigma[sigma.len() - 1]) } else { s };
            if !a.accepts(&s) {
                return;
            }
        }
        let s = BitString::from_bits(&self.bits).expect("binary, nonempty");
        for k in 1..=n {
            if let Some(hist) = &self.evidence.classes[k] {
                let class = length_class(&s, k).expect("k in range");
                if class.weight_histogram() != hist.as_slice() {
                    return;
                }
            }
        }
        if let Some(spec) = self.spec {
            if !spec.is_member(&s).unwrap_or(false) {
                return;
            }
        }
        if !self.solutions.contains(&s) {
            self.solutions.push(s);
        }
    }

    /// Checks every window determined at depth `d` against its class.
    fn consistent(&mut self, d: usize) -> bool {
        let n = self.n;
        // prefix[x] = ones in s_1..s_x for x ≤ d; suffix[x] = ones in s_x..s_n for x > n − d.
        let mut prefix = vec![0u64; d + 1];
        for x in 1..=d {
            prefix[x] = prefix[x - 1] + self.bits[x - 1] as u64;
        }
        let mut suffix = vec![0u64; n + 2];
        for x in (n - d + 1..=n).rev() {
            suffix[x] = suffix[x + 1] + self.bits[x - 1] as u64;
        }
        for k in 1..=n {
            let Some(hist) = &self.evidence.classes[k] else { continue };
            let used = &mut self.scratch[..=k];
            used.fill(0);
            for a in 1..=n + 1 - k {
                let b = a + k - 1;
                let w = if b <= d {
                    prefix[b] - prefix[a - 1]
                } else if a > n - d {
                    suffix[a] - suffix[b + 1]
                } else if a <= d + 1 && b >= n - d {
                    let known = prefix[a - 1] + suffix[b + 1];
                    match self.total.checked_sub(known) {
                        Some(w) => w,
                        None => return false,
                    }
                } else if a + b == n + 1 {
                    self.tail[a]
                } else {
                    continue;
                };
                if w > k as u64 {
                    return false;
                }
                let slot = &mut used[w as usize];
                *slot += 1;
                if *slot > hist[w as usize] {
                    return false;
                }
            }
        }
        true
    }
}
