use std::collections::BTreeSet;

use proptest::prelude::*;

use comprecon::channel::{apply, random_error};
use comprecon::codebook::{CodebookSpec, Family};
use comprecon::oracle::{canonical_bytes, confusable_pairs, PropertyModel};
use comprecon::reconstruct::{decode_deletions, decode_insertions, decode_skewed, reconstruct, DecodeOptions};
use comprecon::{
    complement, full_readout, sigma_from_weights, sigma_of_string, BitString, Composition, ErrorModel, Error,
};

fn string(lengths: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = BitString> {
    lengths.prop_flat_map(|n| (0u128..1u128 << n).prop_map(move |v| BitString::from_value(v, n).unwrap()))
}

/// A codebook with at least one member, and one of its ranks.
fn member(family: Family, lengths: std::ops::RangeInclusive<usize>, ts: std::ops::RangeInclusive<usize>)
    -> impl Strategy<Value = (CodebookSpec, BitString)> {
    (lengths, ts, 0u64..64)
        .prop_filter_map("empty codebook", move |(n, t, a)| {
            let probe = CodebookSpec::new(family, n, t, 0).ok()?;
            let spec = probe.with_residue(a % probe.modulus()).ok()?;
            (spec.size() > 0).then_some(spec)
        })
        .prop_flat_map(|spec| (Just(spec), 0..spec.size()))
        .prop_map(|(spec, rank)| (spec, spec.unrank(rank).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn readout_shape_and_mirror_symmetry(s in string(1..=24)) {
        let n = s.len();
        let r = full_readout(&s);
        for k in 1..=n {
            let class = r.class(k).unwrap();
            prop_assert_eq!(class.len(), n - k + 1);
            prop_assert_eq!(class.cumulative_weight(), r.class(n + 1 - k).unwrap().cumulative_weight());
            prop_assert_eq!(class.cumulative_weight(), sigma_of_string(&s).weight(k));
        }
        prop_assert_eq!(r.class(n).unwrap().entries(), vec![Composition::new(n as u32 - s.weight(), s.weight()).unwrap()]);
        prop_assert!(r.anomalies().is_empty());
    }

    #[test]
    fn reversal_preserves_readout_bytes(s in string(1..=24)) {
        prop_assert_eq!(canonical_bytes(&full_readout(&s)), canonical_bytes(&full_readout(&s.reverse())));
    }

    #[test]
    fn sigma_recovers_from_half_the_weights(s in string(1..=40)) {
        let n = s.len();
        let sigma = sigma_of_string(&s);
        let weights: Vec<u64> = (1..=n.div_ceil(2)).map(|k| sigma.weight(k)).collect();
        prop_assert_eq!(sigma_from_weights(n, &weights).unwrap(), sigma.clone());
        let all: Vec<u64> = (1..=n).map(|k| sigma.weight(k)).collect();
        prop_assert_eq!(sigma_from_weights(n, &all).unwrap(), sigma);
    }

    #[test]
    fn complement_undoes_a_prefix_split(s in string(2..=24), cut in 1usize..23) {
        let cut = 1 + cut % (s.len() - 1);
        let whole = Composition::new(s.len() as u32 - s.weight(), s.weight()).unwrap();
        let ones = s.ones_in(0, cut);
        let prefix = Composition::new(cut as u32 - ones, ones).unwrap();
        let rest = complement(whole, prefix).unwrap();
        prop_assert_eq!(rest.ones, s.ones_in(cut, s.len()));
        prop_assert_eq!(complement(whole, rest).unwrap(), prefix);
    }

    #[test]
    fn rank_unrank_are_inverse((spec, s) in member(Family::Sr, 4..=30, 1..=1)) {
        prop_assert!(spec.is_member(&s).unwrap());
        prop_assert_eq!(spec.unrank(spec.rank(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn every_family_ranks_its_members(
        family in prop::sample::select(Family::ALL.to_vec()),
        n in 6usize..=22,
        t in 1usize..=3,
        a in 0u64..8,
        pick in any::<u64>(),
    ) {
        let t = if family == Family::SdsPrime { t.max(2) } else { t };
        let Ok(probe) = CodebookSpec::new(family, n, t, 0) else { return Ok(()) };
        let spec = probe.with_residue(a % probe.modulus()).unwrap();
        prop_assume!(spec.size() > 0);
        let rank = pick as u128 % spec.size();
        let s = spec.unrank(rank).unwrap();
        prop_assert!(spec.is_member(&s).unwrap());
        prop_assert_eq!(spec.rank(&s).unwrap(), rank);
    }

    #[test]
    fn codewords_reconstruct_exactly((spec, s) in member(Family::Sr, 4..=40, 1..=1)) {
        prop_assert_eq!(reconstruct(&full_readout(&s), Some(&spec)).unwrap().result, s);
    }

    #[test]
    fn deletions_touch_only_their_classes(s in string(4..=20), t in 1usize..=3, seed in any::<u64>()) {
        let n = s.len();
        let r = full_readout(&s);
        let e = random_error(ErrorModel::AsymDelete, t.min(n.div_ceil(2)), seed, &r).unwrap();
        prop_assert_eq!(&e, &random_error(ErrorModel::AsymDelete, t.min(n.div_ceil(2)), seed, &r).unwrap());
        let touched: BTreeSet<usize> = e.classes().into_iter().collect();
        prop_assert_eq!(touched.len(), t.min(n.div_ceil(2)));
        let corrupted = apply(&r, &e).unwrap();
        for k in 1..=n {
            if touched.contains(&k) {
                prop_assert!(corrupted.class(k).is_none());
                prop_assert!(!touched.contains(&(n + 1 - k)) || k == n + 1 - k);
            } else {
                prop_assert_eq!(corrupted.class(k), r.class(k));
            }
        }
    }

    #[test]
    fn skews_lower_weight_and_keep_counts(s in string(4..=20), t in 1usize..=3, seed in any::<u64>()) {
        let n = s.len();
        let r = full_readout(&s);
        let Ok(e) = random_error(ErrorModel::Skew, t, seed, &r) else { return Ok(()) };
        let corrupted = apply(&r, &e).unwrap();
        prop_assert_eq!(corrupted.total_count(), r.total_count());
        let touched: BTreeSet<usize> = e.classes().into_iter().collect();
        for k in 1..=n {
            let (before, after) = (r.class(k).unwrap(), corrupted.class(k).unwrap());
            if touched.contains(&k) {
                prop_assert!(after.cumulative_weight() < before.cumulative_weight());
                prop_assert!(k == n + 1 - k || !touched.contains(&(n + 1 - k)));
            } else {
                prop_assert_eq!(after, before);
            }
        }
    }

    #[test]
    fn insertions_grow_counts(s in string(4..=20), t in 1usize..=4, seed in any::<u64>()) {
        let r = full_readout(&s);
        let e = random_error(ErrorModel::Insert, t, seed, &r).unwrap();
        let corrupted = apply(&r, &e).unwrap();
        prop_assert_eq!(corrupted.total_count(), r.total_count() + t);
    }

    #[test]
    fn sda_corrects_its_asymmetric_deletions(
        (spec, s) in member(Family::Sda, 8..=16, 1..=3),
        seed in any::<u64>(),
    ) {
        let r = full_readout(&s);
        let e = random_error(ErrorModel::AsymDelete, spec.t(), seed, &r).unwrap();
        let report = decode_deletions(&apply(&r, &e).unwrap(), &spec, DecodeOptions::default()).unwrap();
        prop_assert_eq!(report.result, s);
        prop_assert!(report.max_dead_depth <= spec.t() + 1);
    }

    #[test]
    fn sda_corrects_its_skews((spec, s) in member(Family::Sda, 8..=16, 1..=3), seed in any::<u64>()) {
        let r = full_readout(&s);
        let Ok(e) = random_error(ErrorModel::Skew, spec.t(), seed, &r) else { return Ok(()) };
        let report = decode_skewed(&apply(&r, &e).unwrap(), &spec, DecodeOptions::default()).unwrap();
        prop_assert_eq!(report.result, s);
    }

    #[test]
    fn sr_corrects_one_pair_from_seven_up((spec, s) in member(Family::Sr, 7..=14, 1..=1), seed in any::<u64>()) {
        let r = full_readout(&s);
        let e = random_error(ErrorModel::SymPairDelete, 1, seed, &r).unwrap();
        prop_assert_eq!(decode_deletions(&apply(&r, &e).unwrap(), &spec, DecodeOptions::default()).unwrap().result, s);
    }

    #[test]
    fn insertion_decoding_never_miscorrects((spec, s) in member(Family::Sda, 8..=14, 1..=2), seed in any::<u64>()) {
        let r = full_readout(&s);
        let e = random_error(ErrorModel::Insert, spec.t(), seed, &r).unwrap();
        match decode_insertions(&apply(&r, &e).unwrap(), &spec, DecodeOptions::default()) {
            Ok(report) => prop_assert_eq!(report.result, s),
            Err(Error::Ambiguous { candidates }) => prop_assert!(candidates.contains(&s.to_string())),
            Err(Error::Capability(_) | Error::Undecodable(_)) => {}
            Err(other) => prop_assert!(false, "unexpected {other}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_reported_witness_reverifies(
        n in 6usize..=11,
        model in prop::sample::select(vec![PropertyModel::SymPairDelete, PropertyModel::AsymDelete, PropertyModel::Skew]),
        t in 1usize..=2,
    ) {
        let spec = CodebookSpec::sr(n).unwrap();
        for w in confusable_pairs(&spec, model, t).unwrap() {
            prop_assert!(w.verify());
            prop_assert!(spec.is_member(&w.s).unwrap() && spec.is_member(&w.v).unwrap());
            prop_assert!(w.confirms_insertion_equivalence());
        }
    }
}
