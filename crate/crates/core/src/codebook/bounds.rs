use crate::error::{Error, Result};

use super::{CodebookSpec, Family};

/// `⌈4t³/3 + 2t/3 − 31/4⌉`, the weight-sum modulus of the consecutive-pair code.
pub fn modulus_a(t: usize) -> Result<u64> {
    if t < 2 {
        return Err(Error::Domain(format!("the consecutive-pair modulus needs t ≥ 2 (t = {t})")));
    }
    // (16t³ + 8t − 93) / 12 is positive for t ≥ 2.
    let t = t as u64;
    let numerator = 16 * t * t * t + 8 * t - 93;
    Ok(numerator.div_ceil(12))
}

/// Upper bound on redundancy, in bits, for the family at this length.
pub fn redundancy_bound(spec: &CodebookSpec) -> Result<f64> {
    let n = spec.n() as f64;
    let t = spec.t() as f64;
    let half_log = |x: f64| -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::Domain(format!("no redundancy bound for {spec}: length too short")));
        }
        Ok(0.5 * x.log2())
    };
    Ok(match spec.family() {
        Family::Sr => half_log(n)? + 5.0,
        Family::Sca1 | Family::Sds2 => half_log(n - 2.0)? + 8.0,
        Family::Sda => half_log(n - 2.0 * t)? + 2.0 * t + 3.0,
        Family::SdsPrime => half_log(n - 2.0)? + (modulus_a(spec.t())? as f64).log2() + 5.0,
    })
}

/// Binomial-sum lower bound on the size of the `t`-asymmetric deletion code.
///
/// For even `n`, with `h = n/2`:
/// `Σ_{i=t}^{h-1} 2^{h-2-i} C(h-1, i) C(i-t+1, ⌊(i-t+1)/2⌋)`; odd `n` doubles the
/// bound for `n - 1`.
pub fn size_lower_bound(spec: &CodebookSpec) -> Result<f64> {
    if spec.family() != Family::Sda {
        return Err(Error::Domain(format!("no size lower bound for {}", spec.family())));
    }
    if spec.n() % 2 == 1 {
        return Ok(2.0 * size_lower_bound(&spec.with_n(spec.n() - 1)?)?);
    }
    let h = spec.n() / 2;
    let t = spec.t();
    let total = (t..h)
        .map(|i| {
            let tail = i - t + 1;
            2f64.powi(h as i32 - 2 - i as i32) * binomial(h - 1, i) * binomial(tail, tail / 2)
        })
        .sum();
    Ok(total)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k.min(n - k)).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `n − log₂ |codebook|`; infinite for an empty codebook.
pub fn measured_redundancy(spec: &CodebookSpec) -> f64 {
    let size = spec.size();
    if size == 0 {
        return f64::INFINITY;
    }
    spec.n() as f64 - (size as f64).log2()
}

/// The residue giving the largest codebook (ties to the smallest residue).
pub fn largest_residue(spec: &CodebookSpec) -> Result<CodebookSpec> {
    let mut best = spec.with_residue(0)?;
    let mut best_size = best.size();
    for a in 1..spec.modulus() {
        let candidate = spec.with_residue(a)?;
        let size = candidate.size();
        if size > best_size {
            best = candidate;
            best_size = size;
        }
    }
    Ok(best)
}
