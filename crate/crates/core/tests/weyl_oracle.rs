//! Checks the closed-form Weyl data against root systems and orbits built
//! directly from the Cartan matrix.

use std::collections::{HashMap, HashSet, VecDeque};

use jmotive::{DynkinType, ParabolicSubset, Poly, Series};

/// Partial flag orbits larger than this are not walked.
const ORBIT_LIMIT: i128 = 20_000;
/// Complete flag orbits (the whole Weyl group) up to this size are walked.
const GROUP_LIMIT: u128 = 60_000;

fn all_types() -> Vec<DynkinType> {
    let mut out = Vec::new();
    let mut push = |s, ranks: std::ops::RangeInclusive<usize>| {
        for r in ranks {
            out.push(DynkinType::new(s, r).unwrap());
        }
    };
    push(Series::A, 1..=8);
    push(Series::B, 2..=8);
    push(Series::C, 2..=8);
    push(Series::D, 4..=8);
    push(Series::E, 6..=8);
    push(Series::F, 4..=4);
    push(Series::G, 2..=2);
    out
}

/// `a[i][j] = <alpha_j, alpha_i^vee>`, 0-based.
fn cartan(ty: &DynkinType) -> Vec<Vec<i64>> {
    let n = ty.rank();
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (i, j, m) in ty.bonds() {
        a[i - 1][j - 1] = -1;
        a[j - 1][i - 1] = -(m as i64);
    }
    a
}

/// Positive roots in simple-root coordinates, closed under simple reflections.
fn positive_roots(ty: &DynkinType) -> Vec<Vec<i64>> {
    let a = cartan(ty);
    let n = ty.rank();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    while let Some(beta) = queue.pop_front() {
        for i in 0..n {
            let pairing: i64 = (0..n).map(|j| a[i][j] * beta[j]).sum();
            let mut img = beta.clone();
            img[i] -= pairing;
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    seen.into_iter().filter(|b| b.iter().all(|&c| c >= 0)).collect()
}

/// Degrees recovered from the height distribution of positive roots: the
/// number of exponents equal to `h` is `#(height h) - #(height h + 1)`.
fn degrees_from_heights(ty: &DynkinType) -> Vec<u64> {
    let mut by_height: HashMap<i64, i64> = HashMap::new();
    for b in positive_roots(ty) {
        *by_height.entry(b.iter().sum()).or_default() += 1;
    }
    let top = *by_height.keys().max().unwrap();
    let mut degrees = Vec::new();
    for h in 1..=top {
        let here = by_height.get(&h).copied().unwrap_or(0);
        let next = by_height.get(&(h + 1)).copied().unwrap_or(0);
        for _ in 0..here - next {
            degrees.push(h as u64 + 1);
        }
    }
    degrees
}

/// Length generating function of minimal coset representatives of
/// `W / W_theta`, read off a breadth-first walk of the orbit of
/// `sum_{i not in theta} omega_i`.
fn orbit_poincare(ty: &DynkinType, theta: &ParabolicSubset) -> Poly {
    let a = cartan(ty);
    let n = ty.rank();
    let start: Vec<i64> = (1..=n).map(|v| i64::from(!theta.vertices().contains(&v))).collect();
    let mut dist: HashMap<Vec<i64>, usize> = HashMap::new();
    dist.insert(start.clone(), 0);
    let mut queue = VecDeque::from([start]);
    let mut counts: Vec<i64> = Vec::new();
    while let Some(lambda) = queue.pop_front() {
        let d = dist[&lambda];
        if counts.len() <= d {
            counts.resize(d + 1, 0);
        }
        counts[d] += 1;
        for i in 0..n {
            if lambda[i] == 0 {
                continue;
            }
            // alpha_i in fundamental weight coordinates is column i of `a`.
            let img: Vec<i64> = (0..n).map(|j| lambda[j] - lambda[i] * a[j][i]).collect();
            if !dist.contains_key(&img) {
                dist.insert(img.clone(), d + 1);
                queue.push_back(img);
            }
        }
    }
    Poly::new(counts)
}

#[test]
fn degrees_match_root_heights() {
    for ty in all_types() {
        assert_eq!(degrees_from_heights(&ty), ty.weyl_degrees(), "{ty}");
    }
}

#[test]
fn positive_root_counts() {
    for ty in all_types() {
        assert_eq!(positive_roots(&ty).len() as u64, ty.positive_root_count(), "{ty}");
        ty.self_check().unwrap();
    }
}

#[test]
fn cell_counts_match_orbit_walks() {
    let mut walked = 0;
    for ty in all_types() {
        for theta in ParabolicSubset::all(&ty) {
            let expected = ty.poincare_homogeneous(&theta).unwrap();
            if expected.eval_at_one() > ORBIT_LIMIT {
                continue;
            }
            assert_eq!(orbit_poincare(&ty, &theta), expected, "{ty} / {theta}");
            walked += 1;
        }
    }
    assert!(walked > 1000, "only {walked} orbits walked");
}

#[test]
fn full_flag_for_small_groups() {
    for ty in all_types() {
        if ty.weyl_group_order() > GROUP_LIMIT {
            continue;
        }
        let walk = orbit_poincare(&ty, &ParabolicSubset::borel(&ty));
        assert_eq!(walk, ty.poincare_complete_flag(), "{ty}");
        assert_eq!(walk.eval_at_one() as u128, ty.weyl_group_order());
    }
}
