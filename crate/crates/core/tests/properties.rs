//! Randomized properties of the ring arithmetic and the lifting lab.

use jmotive::idempotent_lab::{
    lift_idempotent, lift_isomorphism_izvrat, lift_orthogonal_family, random_family, random_izvrat_instance,
    random_matrix, random_sl, sl_lift,
};
use jmotive::truncated_ring::{j_from_subring, lucas_binom};
use jmotive::{CrtSplit, ModMatrix, Monomial, RingElement, TorsionData, TruncatedRing};
use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small torsion data: `p` in {2, 3}, up to three generators, dimension at most 729.
fn small_data() -> impl Strategy<Value = TorsionData> {
    (prop::sample::select(vec![2u64, 3]), 1usize..=3).prop_flat_map(|(p, r)| {
        let coprime: Vec<u64> = (1..=6).filter(|d| d % p != 0).collect();
        (prop::collection::vec(prop::sample::select(coprime), r), prop::collection::vec(0u32..=2, r)).prop_map(
            move |(mut d, k)| {
                d.sort_unstable();
                TorsionData::new(p, d, k).unwrap()
            },
        )
    })
}

fn random_element(ring: &TruncatedRing, rng: &mut ChaCha8Rng, terms: usize) -> RingElement {
    let monos: Vec<Monomial> = ring.monomials().collect();
    let picks = (0..terms).map(|_| (monos[rng.gen_range(0..monos.len())].clone(), rng.gen_range(0..ring.p())));
    ring.from_terms(picks).unwrap()
}

fn random_monomial(ring: &TruncatedRing, rng: &mut ChaCha8Rng) -> Monomial {
    let bounds = ring.data().bounds();
    Monomial(bounds.iter().map(|&b| rng.gen_range(0..b) as u32).collect())
}

fn exact_binom(n: u64, m: u64) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    (0..m).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deglex_is_a_total_order(data in small_data(), seed in any::<u64>()) {
        let ring = TruncatedRing::new(data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_monomial(&ring, &mut rng), random_monomial(&ring, &mut rng), random_monomial(&ring, &mut rng));
        let ab = ring.deglex_compare(&a, &b).unwrap();
        prop_assert_eq!(ab.reverse(), ring.deglex_compare(&b, &a).unwrap());
        prop_assert_eq!(ab.is_eq(), a == b);
        let bc = ring.deglex_compare(&b, &c).unwrap();
        if ab.is_le() && bc.is_le() {
            prop_assert!(ring.deglex_compare(&a, &c).unwrap().is_le());
        }
        if ab.is_lt() {
            prop_assert!(ring.codimension(&a) <= ring.codimension(&b));
        }
    }

    #[test]
    fn multiplication_is_a_commutative_monoid(data in small_data(), seed in any::<u64>()) {
        let ring = TruncatedRing::new(data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&ring, &mut rng, 4);
        let b = random_element(&ring, &mut rng, 4);
        let c = random_element(&ring, &mut rng, 4);
        prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
        prop_assert_eq!(a.multiply(&b).unwrap().multiply(&c).unwrap(), a.multiply(&b.multiply(&c).unwrap()).unwrap());
        prop_assert_eq!(a.multiply(&ring.one()).unwrap(), a.clone());
        let left = a.multiply(&b.add(&c).unwrap()).unwrap();
        let right = a.multiply(&b).unwrap().add(&a.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn full_ring_has_p_to_the_k_monomials(data in small_data()) {
        let expected = data.p.pow(data.k_total()) as usize;
        let ring = TruncatedRing::new(data).unwrap();
        prop_assert_eq!(ring.dimension(), expected);
        prop_assert_eq!(ring.monomials().count(), expected);
    }

    #[test]
    fn larger_subrings_have_smaller_j(data in small_data(), seed in any::<u64>()) {
        let ring = TruncatedRing::new(data.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<RingElement> = (0..2).map(|_| random_element(&ring, &mut rng, 3)).collect();
        let t: Vec<RingElement> = (0..2).map(|_| random_element(&ring, &mut rng, 3)).collect();
        let both: Vec<RingElement> = s.iter().chain(&t).cloned().collect();
        let j_s = j_from_subring(&ring.subring_closure(&s).unwrap(), &data).unwrap();
        let j_both = j_from_subring(&ring.subring_closure(&both).unwrap(), &data).unwrap();
        prop_assert!(j_both.leq(&j_s).unwrap(), "{} vs {}", j_both, j_s);
    }

    #[test]
    fn lucas_matches_exact_binomials(n in 0u64..=1000, m in 0u64..=1000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let exact = exact_binom(n, m) % p;
        prop_assert_eq!(BigUint::from(lucas_binom(n, m, p)), exact);
    }

    #[test]
    fn idempotents_lift_exactly(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5]), n in 1u32..=5, size in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family = random_family(&mut rng, p, n, size, 1);
        let e = lift_idempotent(&family[0]).unwrap();
        prop_assert!(e.is_idempotent());
        prop_assert_eq!(e.reduce(p).unwrap(), family[0].reduce(p).unwrap());
    }

    #[test]
    fn families_lift_from_two_to_eight(seed in any::<u64>(), parts in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family = random_family(&mut rng, 2, 3, 3, parts);
        let lifted = lift_orthogonal_family(&family).unwrap();
        let mut sum = ModMatrix::zero(8, 3).unwrap();
        for (i, e) in lifted.iter().enumerate() {
            prop_assert!(e.is_idempotent());
            prop_assert_eq!(e.reduce(2).unwrap(), family[i].reduce(2).unwrap());
            for f in lifted.iter().skip(i + 1) {
                prop_assert!(e.mul(f).unwrap().is_zero() && f.mul(e).unwrap().is_zero());
            }
            sum = sum.add(e).unwrap();
        }
        prop_assert_eq!(sum, ModMatrix::identity(8, 3).unwrap());
    }

    #[test]
    fn izvrat_identities_hold_exactly(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3]), n in 1u32..=4, l in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_izvrat_instance(&mut rng, p, n, l);
        let (t12, t21) = lift_isomorphism_izvrat(&inst.phi1, &inst.phi2, &inst.psi12, &inst.psi21).unwrap();
        prop_assert_eq!(t21.compose(&t12).unwrap().matrix().clone(), inst.phi1.matrix().clone());
        prop_assert_eq!(t12.compose(&t21).unwrap().matrix().clone(), inst.phi2.matrix().clone());
    }

    #[test]
    fn crt_split_round_trips_and_respects_arithmetic(m in 2u64..=1000, size in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let split = CrtSplit::new(m).unwrap();
        let a = random_matrix(&mut rng, m, size);
        let b = random_matrix(&mut rng, m, size);
        let parts = |x: &ModMatrix| split.transport(x).unwrap();
        prop_assert_eq!(split.reconstruct(&parts(&a)).unwrap(), a.clone());
        let prod: Vec<ModMatrix> = parts(&a).iter().zip(parts(&b)).map(|(x, y)| x.mul(&y).unwrap()).collect();
        prop_assert_eq!(split.reconstruct(&prod).unwrap(), a.mul(&b).unwrap());
        let sum: Vec<ModMatrix> = parts(&a).iter().zip(parts(&b)).map(|(x, y)| x.add(&y).unwrap()).collect();
        prop_assert_eq!(split.reconstruct(&sum).unwrap(), a.add(&b).unwrap());
    }

    #[test]
    fn sl_lifts_have_determinant_one(seed in any::<u64>(), m in prop::sample::select(vec![6u64, 12, 30, 35, 210]), size in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_sl(&mut rng, m, size);
        let lift = sl_lift(&a).unwrap();
        prop_assert_eq!(lift.det(), 1.into());
        prop_assert_eq!(lift.reduce(m).unwrap(), a);
    }
}

#[test]
fn sl2_mod_6_thousand_trials() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let a = random_sl(&mut rng, 6, 2);
        let lift = sl_lift(&a).unwrap();
        assert_eq!(lift.det(), 1.into());
        assert_eq!(lift.reduce(6).unwrap(), a);
    }
}
