//! Dominating radii against a bisection oracle, and the locality and
//! domination properties.

use std::f64::consts::PI;

use marriage_core::boolean::{
    build_boolean, check_domination, compute_radius, compute_radius_truncated, tail_statistics, BooleanModel,
};
use marriage_core::bounds::eq2_threshold;
use marriage_core::replica::Replica;
use marriage_core::{
    gale_shapley, moment_report, AppetiteDistribution, Boundary, Domain, Family, Point, PointConfiguration, SiteGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

fn ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

/// Smallest `r` with `sum of appetites in B[xi, 2r] <= pi_d r^d`. Brute-force
/// sums on each interval between breakpoints, bisection inside it.
fn bisection_radius(idx: usize, config: &PointConfiguration, dom: &Domain) -> f64 {
    let d = dom.dim();
    let vol = ball_volume(d);
    let me = config.centers()[idx].coords();
    let dists: Vec<f64> = config.centers().iter().map(|c| dom.dist(me, c.coords())).collect();
    let mass = |r: f64| -> f64 {
        dists
            .iter()
            .zip(config.appetites())
            .filter(|(x, _)| **x <= 2.0 * r)
            .map(|(_, a)| a)
            .sum()
    };
    let mut breaks: Vec<f64> = dists.iter().map(|x| x / 2.0).collect();
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks.push(f64::INFINITY);
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let s = mass(lo);
        let g = |r: f64| s - vol * r.powi(d as i32);
        if g(lo) <= 0.0 {
            return lo;
        }
        let mut top = if hi.is_finite() { hi } else { lo.max(1.0) };
        while !hi.is_finite() && g(top) > 0.0 {
            top *= 2.0;
        }
        if g(top) > 0.0 {
            continue;
        }
        let mut a = lo;
        let mut b = top;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        if b < hi {
            return b;
        }
    }
    f64::INFINITY
}

fn random_config(rng: &mut ChaCha8Rng, dom: &Domain, n: usize, delta1: f64) -> PointConfiguration {
    let d = dom.dim();
    let centers: Vec<Point> = (0..n)
        .map(|_| Point::new((0..d).map(|k| rng.random::<f64>() * dom.sides()[k]).collect()))
        .collect();
    let appetites: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 2.0).max(delta1)).collect();
    PointConfiguration::new(centers, appetites)
        .unwrap()
        .with_truncation(delta1, 1.0)
}

#[test]
fn sweep_matches_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let d = 1 + checked % 3;
        let dom = Domain::cube(d, 12.0, Boundary::Open).unwrap();
        let n = rng.random_range(1..=25);
        let config = random_config(&mut rng, &dom, n, 0.2);
        let idx = rng.random_range(0..n);
        let r = compute_radius(idx, &config, &dom).unwrap();
        let oracle = bisection_radius(idx, &config, &dom);
        assert!((r - oracle).abs() <= 1e-9 * oracle.max(1.0), "d={d}: {r} vs {oracle}");
        checked += 1;
    }
}

#[test]
fn two_centers_on_a_line() {
    let dom = Domain::cube(1, 10.0, Boundary::Open).unwrap();
    let config = PointConfiguration::new(vec![Point::new(vec![4.5]), Point::new(vec![5.5])], vec![0.3, 0.3])
        .unwrap()
        .with_truncation(0.3, 1.0);
    for i in 0..2 {
        let r = compute_radius(i, &config, &dom).unwrap();
        assert!((r - bisection_radius(i, &config, &dom)).abs() < 1e-12);
        // alone each would need 0.15 < 0.5, so the partner never enters
        assert!((r - 0.15).abs() < 1e-15);
    }
}

#[test]
fn minimum_radius_is_attained() {
    let dom = Domain::cube(2, 50.0, Boundary::Open).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let others = random_config(&mut rng, &Domain::cube(2, 40.0, Boundary::Open).unwrap(), 40, 0.2);
    // plus an isolated center with V' = delta1
    let mut centers = others.centers().to_vec();
    let mut appetites = others.appetites().to_vec();
    centers.push(Point::new(vec![49.0, 49.0]));
    appetites.push(0.2);
    let config = PointConfiguration::new(centers, appetites)
        .unwrap()
        .with_truncation(0.2, 1.0);
    let model = build_boolean(&config, &dom).unwrap();
    let b = (0.2 / PI).sqrt();
    assert!((model.min_radius() - b).abs() < 1e-15);
    assert!(model.radii().iter().all(|&r| r >= b));
    assert_eq!(*model.radii().last().unwrap(), b);
}

#[test]
fn truncated_radius_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let dom = Domain::cube(2, 10.0, Boundary::Periodic).unwrap();
        let config = random_config(&mut rng, &dom, 60, 0.1);
        let cap = rng.random::<f64>() * 1.5 + 0.05;
        for i in 0..config.len() {
            let r = compute_radius(i, &config, &dom).unwrap();
            let rt = compute_radius_truncated(i, &config, &dom, cap).unwrap();
            assert!(rt <= cap);
            if r < cap || rt < cap {
                assert_eq!(r, rt);
            } else {
                assert_eq!(rt, cap);
            }
        }
    }
}

#[test]
fn isolated_truncated_center_returns_cap() {
    let dom = Domain::cube(2, 10.0, Boundary::Open).unwrap();
    let a = 1.3;
    let config = PointConfiguration::new(vec![Point::new(vec![5.0, 5.0])], vec![a])
        .unwrap()
        .with_truncation(a, 1.0);
    let cap = (a / PI).sqrt() / 2.0;
    assert_eq!(bisection_radius(0, &config, &dom), (a / PI).sqrt());
    assert_eq!(compute_radius_truncated(0, &config, &dom, cap).unwrap(), cap);
}

#[test]
fn locality_of_small_radii() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let dom = Domain::cube(2, 30.0, Boundary::Open).unwrap();
    for _ in 0..100 {
        let config = random_config(&mut rng, &dom, 400, 0.1);
        let r = 0.5 + rng.random::<f64>() * 1.5;
        let x = [10.0 + rng.random::<f64>() * 10.0, 10.0 + rng.random::<f64>() * 10.0];
        let near = |c: &Point, rad: f64| dom.dist(&x, c.coords()) < rad;

        let global: Vec<Point> = (0..config.len())
            .filter(|&i| near(&config.centers()[i], r))
            .filter(|&i| compute_radius_truncated(i, &config, &dom, r).unwrap() < r)
            .map(|i| config.centers()[i].clone())
            .collect();
        let local_cfg = config.subset(|i| near(&config.centers()[i], 3.0 * r));
        let local: Vec<Point> = (0..local_cfg.len())
            .filter(|&i| near(&local_cfg.centers()[i], r))
            .filter(|&i| compute_radius_truncated(i, &local_cfg, &dom, r).unwrap() < r)
            .map(|i| local_cfg.centers()[i].clone())
            .collect();
        assert_eq!(global, local);
    }
}

#[test]
fn domination_holds_below_threshold() {
    let dom = Domain::cube(2, 12.0, Boundary::Periodic).unwrap();
    let grid = SiteGrid::new(dom.clone(), 0.05).unwrap();
    let base = AppetiteDistribution::new(Family::Exponential { mean: 1.0 }, 1.0, 1.0, 1.0).unwrap();
    let alpha = 0.5 * eq2_threshold(1.0, 2, moment_report(&base).mean).unwrap();
    let dist = base.with_alpha(alpha);
    for r in 0..10 {
        let replica = Replica::sample(&dom, 1.0, true, 99, r).unwrap();
        let config = replica.configuration(&dist).unwrap();
        let alloc = gale_shapley(&config, &grid).unwrap();
        let model = build_boolean(&config, &dom).unwrap();
        assert!(model.infinite().is_empty());
        assert!(check_domination(&alloc, &model, &config, &grid).unwrap().is_empty());

        // negative control: halved radii leave territories sticking out
        let shrunk = model.scaled(0.5);
        assert!(!check_domination(&alloc, &shrunk, &config, &grid).unwrap().is_empty());
    }
}

#[test]
fn single_center_radius_matches_territory() {
    let dom = Domain::cube(2, 4.0, Boundary::Open).unwrap();
    let grid = SiteGrid::new(dom.clone(), 0.02).unwrap();
    let config = PointConfiguration::new(vec![dom.palm_origin()], vec![1.0])
        .unwrap()
        .with_truncation(1.0, 1.0);
    let model = build_boolean(&config, &dom).unwrap();
    assert!((model.radii()[0] - (1.0 / PI).sqrt()).abs() < 1e-15);
    let alloc = gale_shapley(&config, &grid).unwrap();
    assert!(check_domination(&alloc, &model, &config, &grid).unwrap().is_empty());
}

#[test]
fn mismatched_model_is_rejected() {
    let dom = Domain::cube(2, 4.0, Boundary::Open).unwrap();
    let grid = SiteGrid::new(dom.clone(), 0.25).unwrap();
    let config = PointConfiguration::new(vec![dom.palm_origin()], vec![1.0])
        .unwrap()
        .with_truncation(1.0, 1.0);
    let alloc = gale_shapley(&config, &grid).unwrap();
    let other = BooleanModel::from_parts(vec![Point::new(vec![1.0, 1.0])], vec![1.0], 2).unwrap();
    assert!(check_domination(&alloc, &other, &config, &grid).is_err());
}

/// `sup_r r^d #{R >= r} / n` by direct scan over a fine grid of `r` plus the
/// sample points.
fn brute_sup(radii: &[f64], d: i32) -> f64 {
    let n = radii.len() as f64;
    radii
        .iter()
        .map(|&r| r.powi(d) * radii.iter().filter(|&&x| x >= r).count() as f64 / n)
        .fold(0.0, f64::max)
}

#[test]
fn tail_statistics_on_random_models() {
    let dom = Domain::cube(2, 20.0, Boundary::Periodic).unwrap();
    let base = AppetiteDistribution::new(Family::Exponential { mean: 1.0 }, 0.1, 0.5, 1.0).unwrap();
    let models: Vec<BooleanModel> = (0..5)
        .map(|r| {
            let config = Replica::sample(&dom, 1.0, false, 3, r)
                .unwrap()
                .configuration(&base)
                .unwrap();
            build_boolean(&config, &dom).unwrap()
        })
        .collect();
    let stats = tail_statistics(&models).unwrap();
    let pooled: Vec<f64> = models.iter().flat_map(|m| m.radii().to_vec()).collect();
    assert_eq!(stats.samples, pooled.len());
    assert!((stats.sup_statistic - brute_sup(&pooled, 2)).abs() < 1e-15);
    assert!(stats.survival.windows(2).all(|w| w[0] >= w[1]));
    assert!(stats.sup_statistic >= stats.weighted.iter().cloned().fold(0.0, f64::max) - 1e-15);
}

#[test]
fn mean_radius_regression_anchor() {
    // lambda = 1, d = 2, alpha = 0.05, V' = 1, fixed seed
    let dom = Domain::cube(2, 40.0, Boundary::Periodic).unwrap();
    let dist = AppetiteDistribution::constant(1.0, 0.05, 1.0).unwrap();
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in 0..4 {
        let config = Replica::sample(&dom, 1.0, false, 2024, r)
            .unwrap()
            .configuration(&dist)
            .unwrap();
        let model = build_boolean(&config, &dom).unwrap();
        let b = (0.05 / PI).sqrt();
        assert!(model.radii().iter().all(|&x| x >= b));
        sum += model.radii().iter().sum::<f64>();
        count += model.len();
    }
    let mean = sum / count as f64;
    println!("mean radius {mean:.12}");
    assert!((mean - MEAN_RADIUS_ANCHOR).abs() < 1e-11, "{mean}");
}

const MEAN_RADIUS_ANCHOR: f64 = 0.138271693271;
