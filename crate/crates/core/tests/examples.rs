//! Worked examples for every module, through the public API only.

use hgrowth::euclid::{reference_values, scaled_gamma_series, EuclideanZeroSet, Hints};
use hgrowth::extremal::{gamma, gamma_bar_thin, gamma_bounds, gamma_thin, two_y_double};
use hgrowth::growth::{evolve, spans, step, tmax_bound};
use hgrowth::rate::{
    enhancement_rate, rate_bootstrap_diag, rate_bounds, rate_rect_closed, rate_rect_recursion, rate_search, rho,
    rho_bruteforce, support_contains, SearchConfig,
};
use hgrowth::rational::{q, qi};
use hgrowth::young::ShrinkMode;
use hgrowth::{Cell, Enhancement, PointSet, RateQuery, SearchBudget, YoungDiagram, Q};

fn z(s: &str) -> YoungDiagram {
    s.parse().unwrap()
}

fn pts(n: usize, m: usize, v: &[(usize, usize)]) -> PointSet {
    PointSet::new(n, m, v.iter().map(|&p| Cell::from(p)).collect()).unwrap()
}

fn rq(a: Q, b: Q) -> RateQuery {
    RateQuery::new(a, b).unwrap()
}

fn none() -> Enhancement {
    Enhancement::zero()
}

#[test]
fn young_constructors_and_boundary() {
    assert_eq!(z("").cardinality(), 0);
    assert_eq!(z("rect:2x2").rows(), &[2, 2]);
    assert_eq!(z("tri:2").rows(), &[2, 1]);
    assert_eq!(z("lshape:2,1,2,1").rows(), &[3, 3, 2]);
    assert!(z("").outer_boundary().is_empty());
    let cells = |v: &[(usize, usize)]| v.iter().map(|&p| Cell::from(p)).collect::<Vec<_>>();
    let mut r22 = z("rect:2x2").outer_boundary();
    r22.sort_by_key(|c| (c.u, c.v));
    assert_eq!(r22, cells(&[(0, 2), (1, 2), (2, 0), (2, 1)]));
    let mut t2 = z("tri:2").outer_boundary();
    t2.sort_by_key(|c| (c.u, c.v));
    assert_eq!(t2, cells(&[(0, 2), (1, 1), (2, 0)]));
}

#[test]
fn young_shrink_truncate_rectangle() {
    assert_eq!(z("rect:3x2").shrink(1, ShrinkMode::Down).diagram, z("rect:3x1"));
    assert_eq!(z("tri:3").shrink(1, ShrinkMode::Diag).diagram, z("tri:1"));
    for mode in [ShrinkMode::Down, ShrinkMode::Left, ShrinkMode::Diag] {
        assert_eq!(z("4,2,1").shrink(0, mode).diagram, z("4,2,1"));
    }
    assert_eq!(z("rect:5x3").max_rectangle(), (5, 3, 15));
    assert_eq!(z("tri:4").max_rectangle(), (2, 3, 6));
    assert_eq!(z("tri:3").truncate(None, Some(1)), (z("3"), 3));
    assert_eq!(z("3,1").truncate(None, None), (z("3,1"), 0));
    assert_eq!(z("rect:2x2").truncate(Some(1), Some(1)), (z("1"), 3));
}

#[test]
fn growth_step_and_evolve() {
    let a = pts(4, 4, &[(0, 0), (1, 1)]);
    assert_eq!(
        step(&z("tri:2"), &none(), &none(), &a),
        pts(4, 4, &[(0, 0), (1, 1), (0, 1), (1, 0)])
    );
    assert!(step(&z(""), &none(), &none(), &PointSet::empty(3, 2)).is_full());
    assert!(step(&z("1"), &none(), &none(), &PointSet::empty(2, 2)).is_empty());

    let (fin, steps) = evolve(&z("tri:2"), &none(), &none(), &a).unwrap();
    assert!(fin.is_full());
    assert!(steps <= 3);
    let lone = pts(2, 2, &[(0, 0)]);
    assert_eq!(evolve(&z("tri:2"), &none(), &none(), &lone).unwrap(), (lone, 1));
    let (fin, steps) = evolve(&z(""), &none(), &none(), &PointSet::empty(3, 3)).unwrap();
    assert!(fin.is_full());
    assert_eq!(steps, 1);
}

#[test]
fn growth_spanning_and_tmax() {
    assert!(spans(&z("tri:2"), &pts(2, 2, &[(1, 0), (0, 1)])).unwrap());
    assert!(!spans(&z("tri:2"), &pts(2, 2, &[(1, 1)])).unwrap());
    let full = PointSet::full(2, 2);
    for skip in full.points() {
        let three: Vec<Cell> = full.points().iter().copied().filter(|c| c != skip).collect();
        assert!(!spans(&z("rect:2x2"), &PointSet::new(2, 2, three).unwrap()).unwrap());
    }
    assert_eq!(tmax_bound(&z("")), 1);
    assert_eq!(tmax_bound(&z("1")), 4);
    assert_eq!(tmax_bound(&z("tri:2")), 18);
}

#[test]
fn extremal_values() {
    let b = SearchBudget::default();
    assert_eq!(gamma(&z("rect:2x3"), b).unwrap().value, 6);
    assert_eq!(gamma(&z("tri:2"), b).unwrap().value, 2);
    assert_eq!(gamma(&z("tri:3"), b).unwrap().value, 4);
    assert_eq!(gamma(&z("tri:4"), b).unwrap().value, 6);

    let r44 = gamma_bounds(&z("rect:4x4"), b);
    assert_eq!((r44["quarter-area"], r44["line-growth"], r44["upper"]), (4, 16, 16));
    let t2 = gamma_bounds(&z("tri:2"), b);
    assert_eq!((t2["quarter-area"], t2["line-growth"], t2["upper"]), (1, 2, 3));
    assert_eq!(gamma_bounds(&z("lshape:2,1,2,1"), b)["line-growth"], 6);

    assert_eq!(gamma_thin(&z("tri:2"), b).unwrap().value, 2);
    assert_eq!(gamma_thin(&z("1"), b).unwrap().value, 1);
    assert!(gamma_thin(&z("lshape:2,1,2,1"), b).unwrap().value >= 2);

    let bar = gamma_bar_thin(&z("1"), b).unwrap();
    assert_eq!(bar.value, 1);
    assert_eq!(gamma_bar_thin(&z(""), b).unwrap().value, 0);
}

#[test]
fn two_y_construction() {
    let one = two_y_double(&pts(1, 1, &[(0, 0)]));
    assert_eq!(one.len(), 2);
    let w = gamma(&z("tri:2"), SearchBudget::default()).unwrap().witness;
    let d = two_y_double(&w);
    assert_eq!(d.len(), 2 * w.len());
    assert!(spans(&z("tri:2"), &d.fit_to(&z("tri:2"))).unwrap());
}

#[test]
fn rho_examples() {
    let x = rq(q(3, 4), q(3, 4));
    assert_eq!(rho(&x, &PointSet::empty(3, 3)).value, Q::from_integer(0));
    assert_eq!(rho(&x, &pts(1, 1, &[(0, 0)])).value, Q::from_integer(0));
    let half = rq(q(1, 2), q(1, 2));
    let r = rho(&half, &PointSet::full(2, 2));
    assert_eq!(r.value, qi(2));
    assert_eq!(r.witness_b, PointSet::full(2, 2));
    assert_eq!(
        rho_bruteforce(&half, &PointSet::empty(2, 2)).unwrap().value,
        Q::from_integer(0)
    );
}

#[test]
fn rate_examples() {
    let cfg = SearchConfig::default();
    assert_eq!(rate_search(&z("tri:2"), &rq(qi(0), qi(0)), cfg).unwrap().value, qi(2));
    assert_eq!(
        rate_search(&z("tri:2"), &rq(q(1, 4), q(1, 4)), cfg).unwrap().value,
        qi(1)
    );
    assert_eq!(
        rate_search(&z("1"), &rq(q(3, 10), q(2, 5)), cfg).unwrap().value,
        q(3, 10)
    );

    let x = rq(q(3, 10), q(2, 5));
    for a in 0..5 {
        assert_eq!(rate_rect_recursion(a, 0, &x).unwrap(), qi(0));
    }
    assert_eq!(rate_rect_recursion(1, 1, &x).unwrap(), q(3, 10));
    assert_eq!(rate_rect_recursion(4, 3, &rq(qi(0), qi(0))).unwrap(), qi(12));
    assert_eq!(rate_rect_closed(5, 5, &rq(qi(0), qi(0))).unwrap(), qi(25));
    // b ≤ ⌊α/(1−β)⌋ leaves nothing to pay
    let skew = rq(q(9, 10), q(1, 10));
    assert_eq!(rate_rect_closed(7, 1, &skew).unwrap(), qi(0));
    assert_eq!(
        rate_rect_closed(7, 2, &skew).unwrap(),
        rate_rect_recursion(7, 2, &skew).unwrap()
    );

    assert_eq!(rate_bootstrap_diag(2, q(1, 4)).unwrap(), qi(1));
    assert_eq!(rate_bootstrap_diag(2, q(1, 2)).unwrap(), qi(0));
    assert_eq!(rate_bootstrap_diag(3, qi(0)).unwrap(), qi(4));

    assert!(!support_contains(&z("tri:2"), &rq(q(3, 5), q(3, 5))));
    assert!(support_contains(&z("tri:2"), &rq(q(2, 5), q(2, 5))));

    let b = rate_bounds(&z("tri:3"), &rq(qi(0), qi(0)), 0, SearchBudget::default()).unwrap();
    assert_eq!(b["lower"], b["upper-trivial"]);
}

#[test]
fn enhancement_rate_examples() {
    let b = SearchBudget::default();
    for s in ["1", "tri:2", "2,2", "3,1"] {
        let g = gamma(&z(s), b).unwrap().value;
        assert_eq!(
            enhancement_rate(&z(s), &rq(qi(0), qi(0)), b).unwrap().value,
            qi(g as i64),
            "{s}"
        );
        assert_eq!(enhancement_rate(&z(s), &rq(qi(1), q(1, 2)), b).unwrap().value, qi(0));
        assert_eq!(enhancement_rate(&z(s), &rq(q(1, 3), qi(1)), b).unwrap().value, qi(0));
    }
    assert!(enhancement_rate(&z("tri:2"), &rq(q(1, 4), q(1, 4)), b).unwrap().value >= qi(1));
}

#[test]
fn euclid_examples() {
    let b = SearchBudget::default();
    let unit: EuclideanZeroSet = "rect:1x1".parse().unwrap();
    assert_eq!(unit.discretize(3).unwrap(), z("rect:3x3"));
    let l2: EuclideanZeroSet = "lshape:2".parse().unwrap();
    assert_eq!(l2.discretize(2).unwrap(), z("4,4,2,2"));
    for n in [4, 8, 16] {
        assert!(l2.area_gap(n).unwrap() <= 2.0 * l2.semi_perimeter() / n as f64);
    }
    for s in scaled_gamma_series(&unit, &[1, 2, 3, 4], b).unwrap() {
        assert_eq!(s.value, qi(1));
    }
    let s = &scaled_gamma_series(&l2, &[2], b).unwrap()[0];
    assert!(s.value >= q(3, 4) && s.value <= qi(3));
    let x = rq(q(1, 5), q(1, 3));
    let rect: EuclideanZeroSet = "rect:3x2".parse().unwrap();
    assert!((reference_values(&rect, &x, Hints::default())["rate"] - 4.0).abs() < 1e-12);
    let l4: EuclideanZeroSet = "lshape:4".parse().unwrap();
    let m = reference_values(&l4, &rq(q(1, 20), q(1, 20)), Hints::default());
    assert!((m["lshape-upper"] - 3.9).abs() < 1e-12);
    assert_eq!(m["gamma-thin"], 6.0);
}
