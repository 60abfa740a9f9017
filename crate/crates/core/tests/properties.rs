use std::collections::HashSet;

use hgrowth::extremal::{gamma, gamma_bounds, heavy_points, projection_sizes, SearchBudget};
use hgrowth::growth::{evolve, materialize, spans, step, tmax_bound};
use hgrowth::randmc::rost_sample;
use hgrowth::rate::{
    rate_rect_closed, rate_rect_recursion, rate_search, rho, rho_bruteforce, support_contains, SearchConfig,
};
use hgrowth::rational::Q;
use hgrowth::young::{diagrams_up_to, ShrinkMode};
use hgrowth::{Cell, Enhancement, PointSet, RateQuery, YoungDiagram};
use proptest::prelude::*;

fn diagram(max_rows: usize, max_len: usize) -> impl Strategy<Value = YoungDiagram> {
    prop::collection::vec(0..=max_len, 0..=max_rows).prop_map(|mut rows| {
        rows.sort_unstable_by(|a, b| b.cmp(a));
        rows.retain(|&r| r > 0);
        YoungDiagram::from_rows(rows).unwrap()
    })
}

fn point_set(n: usize, m: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec((0..n, 0..m), 0..=max)
        .prop_map(move |v| PointSet::new(n, m, v.into_iter().map(Cell::from).collect()).unwrap())
}

fn rational01() -> impl Strategy<Value = Q> {
    (1i64..=24).prop_flat_map(|d| (0..=d).prop_map(move |n| Q::new(n, d)))
}

fn query() -> impl Strategy<Value = RateQuery> {
    (rational01(), rational01()).prop_map(|(a, b)| RateQuery::new(a, b).unwrap())
}

fn open_query() -> impl Strategy<Value = RateQuery> {
    query().prop_filter("alpha, beta < 1", |q| {
        q.alpha < Q::from_integer(1) && q.beta < Q::from_integer(1)
    })
}

fn zero() -> Enhancement {
    Enhancement::zero()
}

/// Box covering both `z` and an `n × m` point area.
fn boxed(z: &YoungDiagram, a: &PointSet) -> PointSet {
    let (n, m) = a.box_dims();
    a.with_box(n.max(z.width()), m.max(z.height()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_is_an_involution(z in diagram(6, 6)) {
        prop_assert_eq!(z.transpose().transpose(), z.clone());
        prop_assert_eq!(z.transpose().cardinality(), z.cardinality());
    }

    #[test]
    fn text_round_trip(z in diagram(6, 6)) {
        let back: YoungDiagram = z.to_string().parse().unwrap();
        prop_assert_eq!(&back, &z);
        let json: YoungDiagram = z.to_json().parse().unwrap();
        prop_assert_eq!(json, z);
    }

    #[test]
    fn truncation_conserves_cells(z in diagram(7, 7), a in prop::option::of(0usize..8), b in prop::option::of(0usize..8)) {
        let (t, removed) = z.truncate(a, b);
        prop_assert_eq!(t.cardinality() + removed, z.cardinality());
        prop_assert!(t.is_subset_of(&z));
    }

    #[test]
    fn outer_boundary_matches_its_definition(z in diagram(6, 6)) {
        let cells = z.outer_boundary();
        let inside = |u: usize, v: usize| z.contains(u, v);
        let mut expected = Vec::new();
        for v in 0..=z.height() {
            for u in 0..=z.width() {
                let touches = (u > 0 && inside(u - 1, v)) || (v > 0 && inside(u, v - 1));
                if !inside(u, v) && touches {
                    expected.push(Cell::new(u, v));
                }
            }
        }
        expected.sort_by_key(|c| (c.v, c.u));
        prop_assert_eq!(&cells, &expected);
        // the minimal cells are exactly the addable corners
        for c in &cells {
            let minimal = !cells.iter().any(|d| d != c && d.u <= c.u && d.v <= c.v);
            prop_assert_eq!(minimal, z.with_cell(*c).is_ok());
        }
        prop_assert!(z.max_rectangle().2 <= z.cardinality());
    }

    #[test]
    fn step_only_adds_points(z in diagram(3, 3), a in point_set(5, 5, 10)) {
        let a = boxed(&z, &a);
        prop_assert!(a.is_subset_of(&step(&z, &zero(), &zero(), &a)));
    }

    #[test]
    fn evolve_is_monotone_in_the_initial_set(z in diagram(3, 3), a in point_set(5, 5, 8), extra in point_set(5, 5, 4)) {
        let a = boxed(&z, &a);
        let (n, m) = a.box_dims();
        let mut pts: Vec<Cell> = a.points().to_vec();
        pts.extend(extra.points().iter().filter(|c| c.u < n && c.v < m));
        let b = PointSet::new(n, m, pts).unwrap();
        let (fa, _) = evolve(&z, &zero(), &zero(), &a).unwrap();
        let (fb, _) = evolve(&z, &zero(), &zero(), &b).unwrap();
        prop_assert!(fa.is_subset_of(&fb));
    }

    #[test]
    fn evolve_reaches_an_inert_set_in_time(z in diagram(3, 4), a in point_set(6, 6, 12)) {
        let a = boxed(&z, &a);
        let (fin, steps) = evolve(&z, &zero(), &zero(), &a).unwrap();
        prop_assert_eq!(step(&z, &zero(), &zero(), &fin), fin);
        prop_assert!(u128::from(steps) <= tmax_bound(&z));
    }

    #[test]
    fn step_commutes_with_line_permutations(z in diagram(3, 3), a in point_set(5, 5, 9), su in any::<u64>(), sv in any::<u64>()) {
        let a = boxed(&z, &a);
        let (n, m) = a.box_dims();
        let perm = |len: usize, seed: u64| {
            let mut p: Vec<usize> = (0..len).collect();
            let mut s = seed;
            for i in (1..len).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                p.swap(i, (s >> 33) as usize % (i + 1));
            }
            p
        };
        let (pu, pv) = (perm(n, su), perm(m, sv));
        let lhs = step(&z, &zero(), &zero(), &a.permute(&pu, &pv));
        let rhs = step(&z, &zero(), &zero(), &a).permute(&pu, &pv);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn growth_shrinks_with_the_zero_set(z in diagram(3, 3), cell in (0usize..4, 0usize..4), a in point_set(5, 5, 8)) {
        // adding a cell to Z can only slow the dynamics down
        let c = Cell::new(cell.0, cell.1);
        if let Ok(bigger) = z.with_cell(c) {
            let a = boxed(&bigger, &a);
            let (small, _) = evolve(&z, &zero(), &zero(), &a).unwrap();
            let (large, _) = evolve(&bigger, &zero(), &zero(), &a).unwrap();
            prop_assert!(large.is_subset_of(&small));
        }
    }

    #[test]
    fn materialized_blocks_dominate_enhanced_growth(z in diagram(2, 3), f in prop::collection::vec(1usize..3, 0..3), g in prop::collection::vec(1usize..3, 0..3), a in point_set(4, 4, 5)) {
        let sorted = |mut v: Vec<usize>| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            Enhancement::new(v).unwrap()
        };
        let (f, g) = (sorted(f), sorted(g));
        let a = a.with_box(4.max(z.width()).max(g.len()), 4.max(z.height()).max(f.len()));
        let (enh, _) = evolve(&z, &f, &g, &a).unwrap();
        let big = materialize(&f, &g, &a);
        let (plain, _) = evolve(&z, &zero(), &zero(), &big).unwrap();
        let (n, m) = a.box_dims();
        // the blocks can also grow outside the box, so only containment holds
        prop_assert!(enh.is_subset_of(&plain.restrict(n, m)));
    }

    #[test]
    fn min_cut_matches_brute_force(a in point_set(5, 5, 12), q in query()) {
        let fast = rho(&q, &a);
        let slow = rho_bruteforce(&q, &a).unwrap();
        prop_assert_eq!(fast.value, slow.value);
        prop_assert!(fast.witness_b.is_subset_of(&a));
        prop_assert!(fast.value <= Q::from_integer(a.len() as i64));
    }

    #[test]
    fn rho_grows_with_points_below_the_diagonal(a in point_set(6, 6, 10), extra in (0usize..6, 0usize..6), q in query()) {
        prop_assume!(q.alpha + q.beta < Q::from_integer(1));
        let mut pts = a.points().to_vec();
        if pts.contains(&Cell::new(extra.0, extra.1)) {
            return Ok(());
        }
        pts.push(Cell::new(extra.0, extra.1));
        let b = PointSet::new(6, 6, pts).unwrap();
        let gain = Q::from_integer(1) - q.alpha - q.beta;
        prop_assert!(rho(&q, &b).value >= rho(&q, &a).value + gain);
    }

    #[test]
    fn rho_is_nonincreasing_in_alpha(a in point_set(5, 5, 10), q in query(), bump in rational01()) {
        let higher = RateQuery::new(q.alpha.max(bump), q.beta).unwrap();
        prop_assert!(rho(&higher, &a).value <= rho(&q, &a).value);
    }

    #[test]
    fn rectangle_closed_form_matches_recursion(a in 0usize..10, b in 0usize..10, q in open_query()) {
        prop_assert_eq!(rate_rect_closed(a, b, &q).unwrap(), rate_rect_recursion(a, b, &q).unwrap());
    }

    #[test]
    fn support_is_down_closed(z in diagram(4, 4), q in query(), da in rational01(), db in rational01()) {
        let lower = RateQuery::new(q.alpha * da, q.beta * db).unwrap();
        if support_contains(&z, &q) {
            prop_assert!(support_contains(&z, &lower));
        }
    }

    #[test]
    fn heavy_points_projection_bound(a in point_set(6, 6, 16), k in 1usize..4) {
        let h = heavy_points(&a, k);
        let (px, py) = projection_sizes(&h);
        let lhs = Q::from_integer((px + py) as i64);
        let rhs = Q::from_integer(h.len() as i64) * (Q::from_integer(1) + Q::new(1, k as i64 + 1));
        prop_assert!(lhs <= rhs);
    }
}

#[test]
fn shrink_down_then_left_is_diagonal() {
    for z in diagrams_up_to(8) {
        for k in 0..4 {
            let composed = z
                .shrink(k, ShrinkMode::Down)
                .diagram
                .shrink(k, ShrinkMode::Left)
                .diagram;
            assert_eq!(composed, z.shrink(k, ShrinkMode::Diag).diagram, "{z} k={k}");
        }
    }
}

#[test]
fn gamma_is_transpose_invariant_and_stable_under_truncation() {
    let b = SearchBudget::default();
    for z in diagrams_up_to(6) {
        let g = gamma(&z, b).unwrap().value;
        assert_eq!(gamma(&z.transpose(), b).unwrap().value, g, "{z}");
        let seen: HashSet<(usize, usize)> = (0..=z.width())
            .flat_map(|a| (0..=z.height()).map(move |c| (a, c)))
            .collect();
        for (a, c) in seen {
            let (t, removed) = z.truncate(Some(a), Some(c));
            let gt = gamma(&t, b).unwrap().value;
            assert!(gt + removed >= g, "{z} truncated to {a}x{c}");
        }
    }
}

#[test]
fn heavy_points_of_a_witness_span_the_shrunk_set() {
    let b = SearchBudget::default();
    for z in diagrams_up_to(7) {
        let w = gamma(&z, b).unwrap().witness;
        let inner = z.diag(1);
        let h = heavy_points(&w, 1);
        let (n, m) = h.box_dims();
        let h = h.with_box(n.max(inner.width()), m.max(inner.height()));
        assert!(spans(&inner, &h).unwrap(), "{z}");
    }
}

#[test]
fn rate_at_the_origin_is_gamma() {
    let origin = RateQuery::new(Q::from_integer(0), Q::from_integer(0)).unwrap();
    for z in diagrams_up_to(5) {
        let g = gamma(&z, SearchBudget::default()).unwrap().value;
        let r = rate_search(&z, &origin, SearchConfig::default()).unwrap();
        assert_eq!(r.value, Q::from_integer(g as i64), "{z}");
        assert!(r.exact);
    }
}

#[test]
fn rost_samples_sit_inside_the_gamma_window() {
    // quarter-area and the trivial upper bound, divided by n, bracket [1/4, 1]
    let n = 10_000;
    for seed in 0..2 {
        let y = rost_sample(n, seed);
        assert_eq!(y.cardinality(), n);
        let b = gamma_bounds(&y, SearchBudget::new(10_000));
        let (lo, hi) = (b["quarter-area"] as f64 / n as f64, b["upper"] as f64 / n as f64);
        assert!(lo >= 0.25 && lo <= 0.2501, "{lo}");
        assert_eq!(hi, 1.0);
    }
}
