use std::collections::HashMap;

use proptest::prelude::*;

use socdim::dimensions::ScoreTable;
use socdim::embed::Embedding;
use socdim::geometry::{cluster, ClusterConfig, Linkage};
use socdim::ingest::{IngestCounts, InteractionRecord, Vocabulary};
use socdim::month::YearMonth;
use socdim::nullmodels::{shuffle_authors, ShuffleConfig};
use socdim::polarization::{
    bin_of, decompose_change, kl_divergence_bits, selection_matrix, CommentRow, Period,
    PoliticalComments,
};
use socdim::stats;

const T0: i64 = 1_420_070_400;

fn records() -> impl Strategy<Value = Vec<InteractionRecord>> {
    prop::collection::vec(
        (
            0u8..12,
            0u8..8,
            0i64..3 * 365 * 86_400,
            prop::bool::weighted(0.1),
        ),
        1..300,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(u, c, t, deleted)| {
                if deleted {
                    InteractionRecord::deleted(format!("c{c}"), T0 + t)
                } else {
                    InteractionRecord::new(format!("u{u}"), format!("c{c}"), T0 + t)
                }
            })
            .collect()
    })
}

fn rows() -> impl Strategy<Value = PoliticalComments> {
    prop::collection::vec(
        (
            0i64..30,
            0u32..6,
            prop::option::weighted(0.95, 0u32..10),
            1u64..5,
            -3.5f64..3.5,
        ),
        1..200,
    )
    .prop_map(|v| {
        let rows = v
            .into_iter()
            .map(|(m, c, user, count, z)| CommentRow {
                month: YearMonth::new(2015, 1).unwrap().offset(m),
                community: c,
                user,
                count,
                z,
                bin: bin_of(z),
            })
            .collect();
        PoliticalComments::from_rows((0..10).map(|u| format!("u{u}")).collect(), rows)
    })
}

fn tally<'a>(it: impl Iterator<Item = &'a str>) -> HashMap<&'a str, usize> {
    let mut m = HashMap::new();
    for k in it {
        *m.entry(k).or_default() += 1;
    }
    m
}

proptest! {
    #[test]
    fn shuffle_keeps_marginals(recs in records(), seed in any::<u64>()) {
        let out = shuffle_authors(&recs, &ShuffleConfig { seed });
        prop_assert_eq!(out.len(), recs.len());
        for (a, b) in recs.iter().zip(&out) {
            prop_assert_eq!(&a.community_id, &b.community_id);
            prop_assert_eq!(a.timestamp, b.timestamp);
            prop_assert_eq!(a.deleted, b.deleted);
        }
        let authors = |v: &[InteractionRecord]| -> HashMap<String, usize> {
            tally(v.iter().filter(|r| !r.deleted).map(|r| r.user_id.as_str()))
                .into_iter()
                .map(|(k, n)| (k.to_string(), n))
                .collect()
        };
        prop_assert_eq!(authors(&recs), authors(&out));
    }

    #[test]
    fn sharded_counts_match_sequential(recs in records(), split in 0usize..300) {
        let split = split.min(recs.len());
        let whole = IngestCounts::from_records(&recs);
        let mut parts = IngestCounts::from_records(&recs[split..]);
        parts.merge(IngestCounts::from_records(&recs[..split]));
        let (vocab, _) = whole.vocabulary(5).unwrap();
        let (vocab2, _) = parts.vocabulary(5).unwrap();
        prop_assert_eq!(&vocab, &vocab2);
        prop_assert_eq!(whole.pair_table(&vocab), parts.pair_table(&vocab));
        prop_assert_eq!(whole.monthly_table(&vocab), parts.monthly_table(&vocab));
    }

    #[test]
    fn selection_rows_are_distributions(c in rows()) {
        for f in selection_matrix(&c).into_iter().flatten() {
            prop_assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(f.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
        }
    }

    #[test]
    fn decomposition_adds_up(c in rows(), lag in 1i64..24) {
        for period in [Period::Year, Period::Month] {
            for r in decompose_change(&c, period, lag) {
                prop_assert!((r.delta_new + r.delta_existing - r.observed_change()).abs() < 1e-9);
                prop_assert_eq!(r.n_new == 0, r.mean_new.is_none());
            }
        }
    }

    #[test]
    fn z_scores_are_standardized(raw in prop::collection::vec(-1e3f64..1e3, 2..60)) {
        prop_assume!(stats::population_sd(&raw).unwrap() > 1e-6);
        let names = (0..raw.len()).map(|i| format!("c{i}")).collect();
        let t = ScoreTable::from_raw("d", names, raw.clone()).unwrap();
        let n = raw.len() as f64;
        let mean = t.z.iter().sum::<f64>() / n;
        let sd = (t.z.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / n).sqrt();
        prop_assert!(mean.abs() < 1e-9 && (sd - 1.0).abs() < 1e-9);
        prop_assert!(t.percentile.iter().all(|p| *p > 0.0 && *p <= 100.0));
    }

    #[test]
    fn kl_is_nonnegative(p in prop::collection::vec(0.0f64..1.0, 2..8), q in prop::collection::vec(0.01f64..1.0, 2..8)) {
        let k = p.len().min(q.len());
        prop_assume!(p[..k].iter().sum::<f64>() > 0.0);
        let norm = |v: &[f64]| { let t: f64 = v.iter().sum(); v.iter().map(|x| x / t).collect::<Vec<_>>() };
        let (p, q) = (norm(&p[..k]), norm(&q[..k]));
        let (kl, smoothed) = kl_divergence_bits(&p, &q, 1e-9);
        prop_assert!(!smoothed && kl >= -1e-12);
        prop_assert!(kl_divergence_bits(&p, &p, 1e-9).0.abs() < 1e-12);
    }

    #[test]
    fn months_round_trip(ord in -10_000i64..50_000, delta in -500i64..500) {
        let m = YearMonth::from_ordinal(ord);
        prop_assert_eq!(m.ordinal(), ord);
        prop_assert_eq!(m.offset(delta).months_since(m), delta);
        prop_assert_eq!(m.to_string().parse::<YearMonth>().unwrap(), m);
    }

    #[test]
    fn pearson_is_symmetric_and_bounded(xy in prop::collection::vec((-100f64..100.0, -100f64..100.0), 3..40)) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        if let Some(r) = stats::pearson(&x, &y) {
            prop_assert!(r.abs() <= 1.0 + 1e-12);
            prop_assert!((r - stats::pearson(&y, &x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn cluster_cuts_nest(points in prop::collection::vec(prop::collection::vec(-5f64..5.0, 3), 4..30), linkage in prop::sample::select(vec![Linkage::Ward, Linkage::Average, Linkage::Complete])) {
        let n = points.len();
        let vocab = Vocabulary::from_entries((0..n).map(|i| (format!("p{i}"), 1)).collect()).unwrap();
        let emb = Embedding::new(vocab, 3, points.concat()).unwrap();
        let mut prev: Option<Vec<u32>> = None;
        for k in 1..=n {
            let a = cluster(&emb, &ClusterConfig { k, linkage, normalize: false }).unwrap().assignment;
            prop_assert_eq!(a.iter().copied().max().unwrap() as usize + 1, k);
            if let Some(p) = prev {
                let mut parent = HashMap::new();
                prop_assert!(a.iter().zip(&p).all(|(c, q)| *parent.entry(*c).or_insert(*q) == *q));
            }
            prev = Some(a);
        }
    }
}
