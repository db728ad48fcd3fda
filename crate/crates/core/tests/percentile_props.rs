use std::collections::BTreeMap;

use pct_impact::data::{
    best_category_percentile, group_reference_sets, parse_records, write_records, Dataset,
    IngestConfig, PublicationRecord, ReferenceSetKey,
};
use pct_impact::percentile::{
    classify_top_x, fractional_top_share, institution_top_share, normalize_dataset,
    percentile_rank, Counting, Formula, PercentileScheme, TiePolicy,
};
use proptest::prelude::*;

fn schemes() -> Vec<PercentileScheme> {
    let mut v = Vec::new();
    for formula in [Formula::Common, Formula::Incites] {
        for inverted in [false, true] {
            for zero_rank_adjust in [false, true] {
                for ties in [TiePolicy::Max, TiePolicy::Min] {
                    v.push(PercentileScheme {
                        formula,
                        inverted,
                        zero_rank_adjust,
                        ties,
                    });
                }
            }
        }
    }
    v
}

/// Exhaustive restatement: count the papers on each side of `c`.
fn oracle_percentile(cites: &[u64], i: usize, s: &PercentileScheme) -> f64 {
    let c = cites[i];
    let n = cites.len();
    let below = cites.iter().filter(|&&o| o < c).count();
    let equal = cites.iter().filter(|&&o| o == c).count();
    let above = n - below - equal;
    // rank 1 is the first paper under the active ordering
    let ahead = if s.inverted { above } else { below };
    let rank = match s.ties {
        TiePolicy::Max => ahead + equal,
        TiePolicy::Min => ahead + 1,
    };
    let mut p = match s.formula {
        Formula::Common => 100.0 * (rank as f64 - 1.0) / n as f64,
        Formula::Incites => 100.0 * rank as f64 / n as f64,
    };
    if s.zero_rank_adjust && c == 0 {
        p = if s.inverted { 100.0 } else { 0.0 };
    }
    p
}

fn all_lists(max_len: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &frontier {
            for v in 0..3u64 {
                let mut m = l.clone();
                m.push(v);
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn brute_force_oracle_all_short_lists() {
    let lists = all_lists(8);
    assert_eq!(lists.len(), (1..=8).map(|k| 3usize.pow(k)).sum::<usize>());
    let schemes = schemes();
    for l in &lists {
        for s in &schemes {
            let got = percentile_rank(l, s).unwrap();
            for (i, r) in got.iter().enumerate() {
                assert_eq!(
                    r.percentile,
                    oracle_percentile(l, i, s),
                    "{l:?} {s:?} paper {i}"
                );
            }
        }
    }
}

/// Slot filling: the j-th paper in descending order holds
/// `clamp(slots - j, 0, 1)` of the top mass; tie groups share their mass evenly.
fn oracle_fractional(cites: &[u64], x: f64) -> Vec<f64> {
    let slots = cites.len() as f64 * x / 100.0;
    let mut sorted = cites.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut mass: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for (j, c) in sorted.iter().enumerate() {
        let e = mass.entry(*c).or_default();
        e.0 += (slots - j as f64).clamp(0.0, 1.0);
        e.1 += 1;
    }
    cites.iter().map(|c| mass[c].0 / mass[c].1 as f64).collect()
}

#[test]
fn fractional_oracle_all_short_lists() {
    for l in all_lists(7) {
        for x in [10.0, 25.0, 50.0, 1.0, 99.0] {
            let got = fractional_top_share(&l, x).unwrap();
            let want = oracle_fractional(&l, x);
            for (g, w) in got.weights.iter().zip(&want) {
                assert!(
                    (g - w).abs() < 1e-12,
                    "{l:?} x={x}: {:?} vs {want:?}",
                    got.weights
                );
            }
        }
    }
}

#[test]
fn fifty_paper_tie_example() {
    let mut set = vec![61u64; 3];
    set.extend([58; 7]);
    set.extend([1; 40]);
    let f = fractional_top_share(&set, 10.0).unwrap();
    assert_eq!(f.share, 0.10);
    assert_eq!(f.weights[0], 1.0);
    assert_eq!(f.weights[3], 2.0 / 7.0);
    assert_eq!(f.weights[10], 0.0);
    // binary counting with the tie group in or out of the top
    let inv = percentile_rank(&set, &PercentileScheme::incites()).unwrap();
    let binary: u32 = inv
        .iter()
        .map(|r| u32::from(classify_top_x(r.percentile, 10.0)))
        .sum();
    assert_eq!(binary, 3);
    let min_ties = PercentileScheme {
        ties: TiePolicy::Min,
        ..PercentileScheme::incites()
    };
    let inv = percentile_rank(&set, &min_ties).unwrap();
    let binary: u32 = inv
        .iter()
        .map(|r| u32::from(classify_top_x(r.percentile, 10.0)))
        .sum();
    assert_eq!(binary, 10);
}

fn citations() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(prop_oneof![0u64..5, 0u64..200, Just(0u64)], 1..120)
}

fn scheme() -> impl Strategy<Value = PercentileScheme> {
    (0..16usize).prop_map(|i| schemes()[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn monotone_and_in_range(cites in citations(), s in scheme()) {
        let r = percentile_rank(&cites, &s).unwrap();
        for (i, a) in r.iter().enumerate() {
            prop_assert!((0.0..=100.0).contains(&a.percentile));
            for (j, b) in r.iter().enumerate() {
                if cites[i] > cites[j] {
                    // more citations never looks worse
                    prop_assert!(!s.is_better(b.percentile, a.percentile), "{} vs {}", a.percentile, b.percentile);
                }
                if cites[i] == cites[j] {
                    prop_assert_eq!(a.percentile, b.percentile);
                }
            }
        }
    }

    #[test]
    fn range_endpoints(cites in citations()) {
        let common = percentile_rank(&cites, &PercentileScheme::common()).unwrap();
        let lowest = cites.iter().min().unwrap();
        let at_min = cites.iter().position(|c| c == lowest).unwrap();
        let ties_at_min = cites.iter().filter(|c| *c == lowest).count();
        if ties_at_min == 1 {
            prop_assert_eq!(common[at_min].percentile, 0.0);
        }
        let incites = percentile_rank(&cites, &PercentileScheme::incites()).unwrap();
        let max = incites.iter().map(|r| r.percentile).fold(0.0, f64::max);
        prop_assert_eq!(max, 100.0);
    }

    #[test]
    fn fractional_weights_sum_to_slots(cites in citations(), x in 0.5f64..99.5) {
        let f = fractional_top_share(&cites, x).unwrap();
        let sum: f64 = f.weights.iter().sum();
        let slots = cites.len() as f64 * x / 100.0;
        prop_assert!((sum - slots).abs() < 1e-12, "sum {} slots {}", sum, slots);
        prop_assert!((f.share - x / 100.0).abs() < 1e-12);
        for (i, w) in f.weights.iter().enumerate() {
            prop_assert!((0.0..=1.0).contains(w));
            for (j, v) in f.weights.iter().enumerate() {
                if cites[i] == cites[j] {
                    prop_assert_eq!(w, v);
                }
            }
        }
    }

    #[test]
    fn binary_and_fractional_agree_without_straddling_ties(
        cites in (1usize..20).prop_flat_map(|m| prop::collection::btree_set(0u64..10_000, 10 * m)),
        x in prop_oneof![Just(10.0), Just(20.0), Just(50.0)],
        shuffle in any::<u64>(),
    ) {
        // distinct counts and an integral number of slots: nothing straddles
        let mut cites: Vec<u64> = cites.into_iter().collect();
        let n = cites.len();
        cites.rotate_left(shuffle as usize % n);
        let f = fractional_top_share(&cites, x).unwrap();
        let r = percentile_rank(&cites, &PercentileScheme::incites()).unwrap();
        let binary: Vec<f64> = r.iter().map(|a| f64::from(classify_top_x(a.percentile, x))).collect();
        prop_assert_eq!(&f.weights, &binary);
    }

    #[test]
    fn best_category_is_a_minimal_member(xs in prop::collection::vec(0.0f64..=100.0, 1..10)) {
        let tagged: Vec<(usize, f64)> = xs.iter().copied().enumerate().collect();
        let b = best_category_percentile(&tagged).unwrap();
        prop_assert!(xs.iter().all(|&x| b <= x));
        prop_assert!(xs.contains(&b));
    }
}

fn record() -> impl Strategy<Value = PublicationRecord> {
    (
        0u32..400,
        prop::sample::select(vec!["1", "2", "A b", "Z"]),
        2000i32..2004,
        prop::sample::select(vec!["PHYS", "CHEM", "BIO"]),
        0u64..500,
        prop::option::of(0u32..=10_000),
    )
        .prop_map(|(id, inst, year, cat, cites, p)| {
            PublicationRecord::new(
                format!("p{id}"),
                inst,
                year,
                vec![cat.to_string()],
                cites,
                p.map(|v| f64::from(v) / 100.0),
            )
            .unwrap()
        })
}

fn dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(record(), 1..200).prop_map(|mut recs| {
        let mut seen = std::collections::HashSet::new();
        recs.retain(|r| seen.insert(r.id.clone()));
        Dataset::new(recs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_category_sets_partition_records(d in dataset()) {
        let sets = group_reference_sets(&d);
        let mut brute: BTreeMap<ReferenceSetKey, Vec<String>> = BTreeMap::new();
        for r in d.records() {
            brute.entry(ReferenceSetKey::new(r.categories[0].clone(), r.pub_year)).or_default().push(r.id.clone());
        }
        prop_assert_eq!(sets.len(), brute.len());
        let mut total = 0;
        for s in &sets {
            let ids: Vec<String> = s.members.iter().map(|m| m.id.clone()).collect();
            prop_assert_eq!(&ids, &brute[&s.key]);
            total += ids.len();
        }
        prop_assert_eq!(total, d.len());
    }

    #[test]
    fn csv_round_trip(d in dataset()) {
        let mut buf = Vec::new();
        write_records(&d, &mut buf).unwrap();
        let back = parse_records(buf.as_slice(), &IngestConfig::default()).unwrap();
        prop_assert!(back.rejects.is_empty());
        prop_assert_eq!(back.dataset.records(), d.records());
        let mut again = Vec::new();
        write_records(&back.dataset, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn normalized_dataset_covers_every_paper(d in dataset(), x in 1.0f64..50.0) {
        let pp = normalize_dataset(&d, &PercentileScheme::incites(), x).unwrap();
        prop_assert_eq!(pp.len(), d.len());
        for inst in d.institutions() {
            let s = pct_impact::data::select_institution_sample(&d, inst).unwrap();
            let f = institution_top_share(&s, x, Counting::Fractional, Some(&pp)).unwrap();
            prop_assert!((0.0..=1.0).contains(&f.share));
        }
    }
}

#[test]
fn multi_category_paper_takes_its_best_set() {
    let mut recs =
        vec![
            PublicationRecord::new("star", "A", 2001, vec!["X".into(), "Y".into()], 10, None)
                .unwrap(),
        ];
    for i in 0..9 {
        recs.push(
            PublicationRecord::new(format!("x{i}"), "W", 2001, vec!["X".into()], 20 + i, None)
                .unwrap(),
        );
        recs.push(
            PublicationRecord::new(format!("y{i}"), "W", 2001, vec!["Y".into()], i, None).unwrap(),
        );
    }
    let d = Dataset::new(recs).unwrap();
    let pp = normalize_dataset(&d, &PercentileScheme::incites(), 10.0).unwrap();
    let a = pp.get("star").unwrap();
    assert_eq!(a.reference_set, ReferenceSetKey::new("Y", 2001));
    assert_eq!(a.percentile, 10.0);
    assert_eq!(a.top_x_weight, 1.0);
    assert_eq!(pp.len(), 19);
}
