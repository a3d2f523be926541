use super::*;
use crate::dimensions::ScoreTable;
use crate::geometry::{Clustering, Linkage};
use crate::ingest::{MonthlyActivityTable, MonthlyRow};
use crate::month::YearMonth;

fn ym(i: i64) -> YearMonth {
    YearMonth::new(2015, 1).unwrap().offset(i)
}

/// `(month offset from 2015-01, community, user, count, z)`; user 99 means deleted.
fn comments(rows: &[(i64, u32, u32, u64, f64)]) -> PoliticalComments {
    let n_users = rows
        .iter()
        .map(|r| r.2)
        .filter(|&u| u != 99)
        .max()
        .map_or(0, |m| m + 1);
    let users = (0..n_users).map(|u| format!("u{u}")).collect();
    PoliticalComments::from_rows(
        users,
        rows.iter()
            .map(|&(m, c, u, count, z)| CommentRow {
                month: ym(m),
                community: c,
                user: (u != 99).then_some(u),
                count,
                z,
                bin: bin_of(z),
            })
            .collect(),
    )
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

#[test]
fn political_cutoff_hand_case() {
    // cluster 0 = communities 0..5 with scores 5..1; community 5 sits elsewhere at 2.5
    let ness =
        ScoreTable::from_raw("n", names(7), vec![5.0, 4.0, 3.0, 2.0, 1.0, 2.5, 0.0]).unwrap();
    let cl = Clustering::from_assignment(vec![0, 0, 0, 0, 0, 1, 1], Linkage::Ward).unwrap();
    let s = select_political(&ness, &cl, 0, 0.8).unwrap();
    assert_eq!(s.ness_cutoff, 2.0);
    assert_eq!(s.members, vec![0, 1, 2, 3, 5]);
    let full = select_political(&ness, &cl, 0, 1.0).unwrap();
    assert_eq!(full.ness_cutoff, 1.0);
    assert!(select_political(&ness, &cl, 0, 0.0).is_err());
    assert!(matches!(
        select_political(&ness, &cl, 3, 0.8),
        Err(PolarizationError::EmptyCluster(3))
    ));
}

#[test]
fn bin_and_wing_boundaries() {
    let cases = [
        (-2.5, -2),
        (-2.0, -1),
        (-1.5, -1),
        (-1.0, 0),
        (0.0, 0),
        (1.0, 0),
        (1.5, 1),
        (2.0, 1),
        (2.01, 2),
    ];
    for (z, b) in cases {
        assert_eq!(bin_of(z), b, "z = {z}");
    }
    assert_eq!(Wing::of(-1.0), Wing::Left);
    assert_eq!(Wing::of(-0.999), Wing::Center);
    assert_eq!(Wing::of(1.0), Wing::Right);
}

#[test]
fn selection_hand_examples() {
    let one = comments(&[(0, 0, 0, 5, 0.0)]);
    assert_eq!(
        selection_distribution(&one, 0).unwrap(),
        [0.0, 0.0, 1.0, 0.0, 0.0]
    );
    let split = comments(&[(0, 0, 0, 2, 0.0), (0, 1, 0, 2, 1.5)]);
    assert_eq!(
        selection_distribution(&split, 0).unwrap(),
        [0.0, 0.0, 0.5, 0.5, 0.0]
    );
    let two = comments(&[(0, 0, 0, 10, 0.0), (0, 0, 1, 1, 0.0), (0, 2, 1, 9, 2.5)]);
    let f = selection_distribution(&two, 0).unwrap();
    assert!((f[2] - (10.0 + 0.1) / 11.0).abs() < 1e-15);
    assert!((f[4] - 0.9 / 11.0).abs() < 1e-15);
    assert!(matches!(
        selection_distribution(&two, -2),
        Err(PolarizationError::NoAuthorsInBin(-2))
    ));
    let m = selection_matrix(&two);
    assert!(m[0].is_none() && m[2].is_some());
    let cs = community_selection(&two, 2).unwrap();
    for (got, want) in cs.iter().zip([0.0, 0.0, 0.1, 0.0, 0.9]) {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn monthly_and_extreme_measures() {
    let sym = comments(&[(0, 0, 0, 3, 2.0), (0, 1, 1, 3, -2.0), (1, 2, 0, 4, 0.0)]);
    let mp = monthly_polarization(&sym);
    assert_eq!((mp[0].value, mp[1].value), (2.0, 0.0));
    let ex = comments(&[(0, 0, 0, 1, 3.5), (0, 1, 1, 3, 0.5), (1, 1, 0, 2, 0.5)]);
    let es = extreme_share(&ex, 3.0);
    assert_eq!((es[0].left, es[0].right, es[0].total), (0.0, 0.25, 0.25));
    assert_eq!(es[1].total, 0.0);
    let d = bin_activity(&ex).unwrap();
    assert_eq!(d.counts, [0, 0, 5, 0, 1]);
    assert!(d
        .monthly
        .iter()
        .all(|(_, p)| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
}

#[test]
fn cohorts_and_active_months() {
    // user 0 starts 2015-01 at z=1, user 1 starts 2016-02 at z=-3
    let c = comments(&[
        (0, 0, 0, 2, 1.0),
        (5, 0, 0, 2, 1.0),
        (13, 1, 1, 1, -3.0),
        (20, 1, 1, 1, -3.0),
        (20, 0, 0, 1, 1.0),
    ]);
    assert_eq!((c.cohort(0), c.cohort(1)), (Some(2015), Some(2016)));
    let monthly = cohort_series(&c, CohortAxis::Month);
    assert!(monthly
        .iter()
        .filter(|p| p.cohort == 2015)
        .all(|p| p.mean_abs_z == 1.0));
    assert!(monthly
        .iter()
        .filter(|p| p.cohort == 2016)
        .all(|p| p.mean_abs_z == 3.0));
    let active = cohort_series(&c, CohortAxis::ActiveMonths);
    let xs: Vec<(i32, i64)> = active.iter().map(|p| (p.cohort, p.x)).collect();
    assert_eq!(
        xs,
        vec![(2015, 1), (2015, 2), (2015, 3), (2016, 1), (2016, 2)]
    );
    let age = cohort_series(&c, CohortAxis::AccountAge);
    let xs: Vec<(i32, i64)> = age.iter().map(|p| (p.cohort, p.x)).collect();
    assert_eq!(
        xs,
        vec![(2015, 0), (2015, 5), (2015, 20), (2016, 0), (2016, 7)]
    );
    // restricting the window keeps the full-history cohort
    let late = c.filter(|r| r.month >= ym(20));
    assert_eq!(late.cohort(0), Some(2015));
}

#[test]
fn user_month_thresholds_and_fractions() {
    let c = comments(&[(0, 0, 0, 2, 1.0), (0, 1, 0, 1, 3.0), (0, 0, 1, 2, 1.0)]);
    let s = user_month_scores(&c, 3).unwrap();
    assert_eq!(s.scores[&ym(0)].len(), 1);
    assert!((s.scores[&ym(0)][&0] - 5.0 / 3.0).abs() < 1e-15);
    assert_eq!(user_month_scores(&c, 1).unwrap().scores[&ym(0)].len(), 2);
    assert!(user_month_scores(&c, 0).is_err());

    let mut rows = Vec::new();
    for u in 0..4 {
        rows.push((0, 0, u, 1, 0.5));
        rows.push((1, 0, u, 1, if u == 0 { 1.8 } else { 0.5 }));
    }
    let s = user_month_scores(&comments(&rows), 1).unwrap();
    assert_eq!(polarization_fraction(&s, ym(0), ym(1), 1.0), Some(0.25));
    assert_eq!(polarization_fraction(&s, ym(0), ym(0), 1.0), Some(0.0));
    assert_eq!(polarization_fraction(&s, ym(0), ym(7), 1.0), None);
    let m = polarization_matrix(&s, 1.0);
    assert_eq!(m.values[0][1], Some(0.25));
}

#[test]
fn decomposition_hand_case() {
    // 2015: existing baseline at 1.0; 2016: 100 existing at 1.0, 100 new at 2.0
    let mut rows = vec![
        (0, 0, 0, 50, 1.0),
        (12, 0, 0, 100, 1.0),
        (12, 1, 1, 100, 2.0),
    ];
    let c = comments(&rows);
    let d = decompose_change(&c, Period::Year, 12);
    assert_eq!(d.len(), 1);
    let r = &d[0];
    assert_eq!(
        (r.period.as_str(), r.n_new, r.n_existing),
        ("2016", 100, 100)
    );
    assert!((r.delta_new - 0.5).abs() < 1e-15 && r.delta_existing.abs() < 1e-15);
    assert!((r.delta_new + r.delta_existing - r.observed_change()).abs() < 1e-12);
    rows.pop();
    let only_existing = decompose_period(&comments(&rows), Period::Year, 2016, 12).unwrap();
    assert_eq!(only_existing.delta_new, 0.0);
    assert!(decompose_period(&c, Period::Year, 2015, 12).is_err());
}

#[test]
fn wing_filters_partition_comments() {
    let right = comments(&[(0, 0, 0, 3, 1.5)]);
    assert_eq!(right.wing(Wing::Right).total(), 3);
    assert_eq!(right.wing(Wing::Left).total(), 0);
    let mixed = comments(&[
        (0, 0, 0, 3, 1.5),
        (0, 1, 1, 2, -1.0),
        (0, 2, 1, 4, 0.2),
        (1, 0, 0, 1, 1.0),
    ]);
    let total: u64 = Wing::ALL.iter().map(|&w| mixed.wing(w).total()).sum();
    assert_eq!(total, mixed.total());
    let report = wing_analyses(&mixed, Wing::Left, &BinEdges::default(), Period::Month, 12);
    assert_eq!(report.monthly.len(), 1);
}

#[test]
fn implicit_then_explicit_bookkeeping() {
    // community 0: political right; 1: implicit right (low ness, high z); 2: neutral
    let ness = ScoreTable::from_raw("n", names(5), vec![5.0, 0.0, 0.1, 0.1, 0.1]).unwrap();
    let partisan = ScoreTable::from_raw("p", names(5), vec![3.0, 3.0, 0.0, 0.0, 0.0]).unwrap();
    let z = partisan.z.clone();
    assert!(z[0] >= 1.0 && z[1] >= 1.0);
    let subset = PoliticalSubset {
        members: vec![0],
        ness_cutoff: 5.0,
        coverage: 0.8,
        cluster: 0,
        cluster_size: 1,
        vocab_size: 5,
    };
    let row = |m: i64, c: u32, u: u32| MonthlyRow {
        month: ym(m),
        community: c,
        user: Some(u),
        count: 1,
    };
    let monthly = MonthlyActivityTable::from_parts(
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            row(3, 1, 0),
            row(5, 0, 0),
            row(4, 1, 1),
            row(4, 0, 1),
            row(6, 0, 2),
            row(1, 2, 2),
        ],
        0,
    );
    let [left, right] = implicit_explicit(
        &monthly,
        &subset,
        &partisan,
        &ness,
        &BinEdges::default(),
        1.0,
    )
    .unwrap();
    assert!(left.cells.is_empty());
    assert_eq!(right.cells[&(ym(5), Some(ym(3)))], 1);
    assert_eq!(right.cells[&(ym(4), Some(ym(4)))], 1);
    assert_eq!(right.cells[&(ym(6), None)], 1);
    let prior: Vec<(YearMonth, u64)> = right
        .prior
        .iter()
        .map(|p| (p.explicit_month, p.prior))
        .collect();
    assert_eq!(prior, vec![(ym(4), 0), (ym(5), 1), (ym(6), 0)]);
}

#[test]
fn kl_and_deleted_comparison() {
    let (kl, smoothed) = kl_divergence_bits(&[0.5, 0.5], &[0.25, 0.75], 1e-9);
    assert!((kl - (0.5 + 0.5 * (2.0f64 / 3.0).log2())).abs() < 1e-15);
    assert!(!smoothed);
    assert_eq!(kl_divergence_bits(&[0.3, 0.7], &[0.3, 0.7], 1e-9).0, 0.0);
    let (kl, smoothed) = kl_divergence_bits(&[0.5, 0.5], &[1.0, 0.0], 1e-9);
    assert!(smoothed && kl.is_finite() && kl > 1.0);

    let same = comments(&[
        (0, 0, 0, 4, 1.2),
        (0, 1, 0, 4, -0.3),
        (0, 0, 99, 2, 1.2),
        (0, 1, 99, 2, -0.3),
    ]);
    let cmp = compare_deleted(&same, 0.25, 1e-9).unwrap();
    assert_eq!((cmp.kl_bits, cmp.delta_mean), (0.0, 0.0));
    assert!((cmp.kept_fraction - 2.0 / 3.0).abs() < 1e-15);
    let no_deleted = comments(&[(0, 0, 0, 4, 1.2)]);
    assert!(matches!(
        compare_deleted(&no_deleted, 0.25, 1e-9),
        Err(PolarizationError::EmptyGroup("deleted"))
    ));
}

#[test]
fn custom_edges() {
    let e = BinEdges {
        bins: [-1.5, -0.5, 0.5, 1.5],
        wing: 0.5,
    };
    assert_eq!(e.bin(-0.5), 0);
    assert_eq!(e.bin(-0.51), -1);
    assert_eq!(e.bin(1.6), 2);
    assert_eq!(e.wing(0.5), Wing::Right);
    assert!(e.issues().is_empty());
    assert!(BinEdges::default().issues().is_empty());
    let bad = BinEdges {
        bins: [0.0, 1.0, 1.0, 2.0],
        wing: 0.0,
    };
    assert_eq!(bad.issues().len(), 2);
}
