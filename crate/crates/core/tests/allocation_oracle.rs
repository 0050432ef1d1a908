//! Gale-Shapley against a greedy oracle.
//!
//! With preferences given by mutual distance the stable allocation is also
//! what you get by sorting every (cell, center) pair by distance and
//! assigning greedily while capacity lasts.

use marriage_core::allocation::cell_quota;
use marriage_core::{gale_shapley, verify_stability, Boundary, Domain, Point, PointConfiguration, Site, SiteGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn greedy(config: &PointConfiguration, grid: &SiteGrid) -> Vec<Site> {
    let dom = grid.domain();
    let mut pairs = Vec::with_capacity(grid.len() * config.len());
    for cell in 0..grid.len() {
        let p = grid.cell_center(cell);
        for (c, center) in config.centers().iter().enumerate() {
            pairs.push((dom.dist(&p, center.coords()), cell, c));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut left: Vec<usize> = config
        .appetites()
        .iter()
        .map(|&a| cell_quota(a, grid.cell_volume()))
        .collect();
    let mut out = vec![Site::Unclaimed; grid.len()];
    for (_, cell, c) in pairs {
        if out[cell] == Site::Unclaimed && left[c] > 0 {
            out[cell] = Site::Center(c as u32);
            left[c] -= 1;
        }
    }
    out
}

fn random_instance(rng: &mut ChaCha8Rng, d: usize) -> (PointConfiguration, SiteGrid) {
    let boundary = if rng.random::<bool>() {
        Boundary::Periodic
    } else {
        Boundary::Open
    };
    let cells = if d == 1 {
        rng.random_range(20..=120)
    } else {
        rng.random_range(10..=40)
    };
    let h = 0.1;
    let dom = Domain::cube(d, cells as f64 * h, boundary).unwrap();
    let grid = SiteGrid::new(dom.clone(), h).unwrap();
    let n = rng.random_range(0..=12);
    let centers: Vec<Point> = (0..n)
        .map(|_| Point::new((0..d).map(|_| rng.random::<f64>() * dom.sides()[0]).collect()))
        .collect();
    let appetites: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * dom.volume() / 6.0).collect();
    (PointConfiguration::new(centers, appetites).unwrap(), grid)
}

#[test]
fn matches_greedy_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut compared = 0;
    for trial in 0..120 {
        let (config, grid) = random_instance(&mut rng, 1 + trial % 2);
        let res = gale_shapley(&config, &grid).unwrap();
        if res.tie_cells() > 0 {
            continue;
        }
        assert_eq!(res.assignment(), greedy(&config, &grid).as_slice(), "trial {trial}");
        compared += 1;
    }
    assert!(compared >= 100);
}

#[test]
fn stable_and_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..60 {
        let (config, grid) = random_instance(&mut rng, 1 + trial % 2);
        let a = gale_shapley(&config, &grid).unwrap();
        assert!(verify_stability(&a, &config, &grid).unwrap().is_empty());
        assert_eq!(a, gale_shapley(&config, &grid).unwrap());
        for c in 0..config.len() {
            assert!(a.territory_cells(c) <= a.quota(c));
        }
    }
}

#[test]
fn relabeling_centers_relabels_territories() {
    // the allocation does not depend on the order centers are listed in
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..20 {
        let (config, grid) = random_instance(&mut rng, 2);
        let n = config.len();
        let perm: Vec<usize> = (0..n).rev().collect();
        let shuffled = PointConfiguration::new(
            perm.iter().map(|&i| config.centers()[i].clone()).collect(),
            perm.iter().map(|&i| config.appetites()[i]).collect(),
        )
        .unwrap();
        let a = gale_shapley(&config, &grid).unwrap();
        let b = gale_shapley(&shuffled, &grid).unwrap();
        if a.tie_cells() > 0 {
            continue;
        }
        for cell in 0..grid.len() {
            let mapped = match b.site(cell) {
                Site::Center(j) => Site::Center(perm[j as usize] as u32),
                s => s,
            };
            assert_eq!(a.site(cell), mapped, "trial {trial} cell {cell}");
        }
    }
}
