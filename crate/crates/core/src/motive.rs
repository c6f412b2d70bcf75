//! Poincaré bookkeeping of motivic decompositions: the generalized Rost
//! summand, twist multiplicities, canonical p-dimension, torsion-index
//! bound, rational cycle counts, and integral (m-positive) summands.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jinvariant::JInvariant;
use crate::kac_table::{prime_factors, GroupForm, TorsionData};
use crate::poly::Poly;
use crate::root_data::{is_generically_split, ParabolicSubset, Splitting, TitsData};

/// `total = summand * multiplicities`, all with nonnegative coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotiveDecomposition {
    pub summand: Poly,
    pub multiplicities: Poly,
    pub total: Poly,
}

impl MotiveDecomposition {
    /// `sum a_i`, the number of twisted copies of the summand.
    pub fn copies(&self) -> i128 {
        self.multiplicities.eval_at_one()
    }
}

/// `prod_i (1 - t^{d_i p^{j_i}}) / (1 - t^{d_i})`.
///
/// Panics if `j` has a different length than `data`; build `j` with
/// [`JInvariant::new`] to rule that out.
pub fn rost_poincare(data: &TorsionData, j: &JInvariant) -> Poly {
    assert_eq!(data.r(), j.r(), "J-invariant and torsion data differ in length");
    data.d
        .iter()
        .zip(&j.j)
        .map(|(&d, &ji)| Poly::geometric(data.p.pow(ji) as usize, d as usize))
        .product()
}

/// Twist multiplicities of the motive of `X_theta` mod `p` in terms of the
/// generalized Rost summand. Fails with [`Error::NotDivisible`] or
/// [`Error::NegativeCoefficient`] when no group with this `J` can be split
/// generically by `X_theta`.
pub fn decompose(form: &GroupForm, p: u64, j: &JInvariant, theta: &ParabolicSubset) -> Result<MotiveDecomposition> {
    let data = form.torsion_data(p)?;
    j.check_context(&data)?;
    let total = form.base().poincare_homogeneous(theta)?;
    let summand = rost_poincare(&data, j);
    let multiplicities = total.div_nonnegative(&summand)?;
    Ok(MotiveDecomposition { summand, multiplicities, total })
}

/// [`decompose`] after checking generic splitting; `Unknown` passes only
/// when `allow_unknown` is set.
pub fn decompose_generically_split(
    form: &GroupForm,
    p: u64,
    j: &JInvariant,
    theta: &ParabolicSubset,
    tits: TitsData,
    allow_unknown: bool,
) -> Result<MotiveDecomposition> {
    match is_generically_split(form, theta, tits)? {
        Splitting::Yes => {}
        Splitting::Unknown if allow_unknown => {}
        _ => return Err(Error::NotGenericallySplit),
    }
    decompose(form, p, j, theta)
}

/// `sum_i d_i (p^{j_i} - 1)`.
pub fn canonical_p_dimension(data: &TorsionData, j: &JInvariant) -> u64 {
    assert_eq!(data.r(), j.r(), "J-invariant and torsion data differ in length");
    data.d.iter().zip(&j.j).map(|(&d, &ji)| d * (data.p.pow(ji) - 1)).sum()
}

/// `p^{sum j_i}`, an upper bound for the p-part of the torsion index.
pub fn torsion_index_bound(j: &JInvariant) -> u128 {
    (j.p as u128).pow(j.total())
}

/// Ranks of the rational parts of `Ch(X)` and `Ch(X x X)` for the complete flag variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCycleCounts {
    /// `P(X, 1) / p^{|K|}`, the rank of the complementary free factor.
    pub rk_r: u128,
    /// `p^{|K - J|} rk_R`.
    pub rank_a_rat: u128,
    /// `p^{|2K - J|} rk_R^2`.
    pub rank_b_rat: u128,
}

/// Counts for the complete flag variety of `form`, taking the flag rank from its Weyl group.
pub fn rational_cycle_counts(form: &GroupForm, j: &JInvariant) -> Result<RationalCycleCounts> {
    let data = form.torsion_data(j.p)?;
    rational_cycle_counts_from_flag_rank(&data, j, form.base().weyl_group_order())
}

/// Same, from an explicit rank of `Ch(X)` over a splitting field.
pub fn rational_cycle_counts_from_flag_rank(
    data: &TorsionData,
    j: &JInvariant,
    flag_rank: u128,
) -> Result<RationalCycleCounts> {
    j.check_context(data)?;
    let p = data.p as u128;
    let k = data.k_total();
    let pk = p.checked_pow(k).ok_or(Error::Overflow("p^|K|"))?;
    if flag_rank == 0 || !flag_rank.is_multiple_of(pk) {
        return Err(Error::NonIntegralRank(format!("{flag_rank} / {pk}")));
    }
    let rk_r = flag_rank / pk;
    let rank_a_rat = p
        .checked_pow(k - j.total())
        .and_then(|x| x.checked_mul(rk_r))
        .ok_or(Error::Overflow("rank of rational cycles"))?;
    let rank_b_rat = p
        .checked_pow(2 * k - j.total())
        .and_then(|x| x.checked_mul(rk_r))
        .and_then(|x| x.checked_mul(rk_r))
        .ok_or(Error::Overflow("rank of rational cycles on the square"))?;
    Ok(RationalCycleCounts { rk_r, rank_a_rat, rank_b_rat })
}

fn summand_for(summands: &[(u64, Poly)], p: u64) -> Result<&Poly> {
    summands.iter().find(|(q, _)| *q == p).map(|(_, s)| s).ok_or(Error::MissingPrime(p))
}

/// `g != 0` and, for every prime `p | m`, `g / S_p` is a polynomial with
/// nonnegative coefficients.
pub fn is_m_positive(g: &Poly, m: u64, summands: &[(u64, Poly)]) -> Result<bool> {
    let primes = prime_factors(m);
    let divisors = primes.iter().map(|&p| summand_for(summands, p)).collect::<Result<Vec<_>>>()?;
    if g.is_zero() {
        return Ok(false);
    }
    Ok(divisors.into_iter().all(|s| g.div_nonnegative(s).is_ok()))
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// An m-positive divisor `f` of the total that is not a sum of two
/// m-positive polynomials, and the twist multiplicities `total / f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralDecomposition {
    pub summand: Poly,
    pub multiplicities: Poly,
    pub total: Poly,
}

/// The indecomposable m-positive divisor of smallest degree, ties broken by
/// the lexicographically smallest coefficient sequence.
pub fn integral_decomposition(total: &Poly, m: u64, summands: &[(u64, Poly)]) -> Result<IntegralDecomposition> {
    integral_decomposition_with_budget(total, m, summands, DEFAULT_SEARCH_BUDGET)
}

pub fn integral_decomposition_with_budget(
    total: &Poly,
    m: u64,
    summands: &[(u64, Poly)],
    budget: u64,
) -> Result<IntegralDecomposition> {
    all_integral_decompositions_with_budget(total, m, summands, budget)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::NoDivisor(total.to_string()))
}

/// Every indecomposable m-positive divisor with nonnegative cofactor, in
/// the order used for the tie-break.
pub fn all_integral_decompositions(total: &Poly, m: u64, summands: &[(u64, Poly)]) -> Result<Vec<IntegralDecomposition>> {
    all_integral_decompositions_with_budget(total, m, summands, DEFAULT_SEARCH_BUDGET)
}

pub fn all_integral_decompositions_with_budget(
    total: &Poly,
    m: u64,
    summands: &[(u64, Poly)],
    budget: u64,
) -> Result<Vec<IntegralDecomposition>> {
    let primes = prime_factors(m);
    let divisors_by_prime: Vec<&Poly> = primes.iter().map(|&p| summand_for(summands, p)).collect::<Result<_>>()?;
    if total.is_zero() {
        return Err(Error::NoDivisor(total.to_string()));
    }
    let mut steps = 0u64;
    let mut candidates: Vec<(Poly, Poly)> = Vec::new();
    for f in cyclotomic_divisors(total, budget, &mut steps)? {
        if !f.is_nonnegative() || !is_m_positive(&f, m, summands)? {
            continue;
        }
        let Ok(quotient) = total.div_nonnegative(&f) else {
            continue;
        };
        if !splits_as_sum(&f, m, summands, &divisors_by_prime, budget, &mut steps)? {
            candidates.push((f, quotient));
        }
    }
    candidates.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())));
    candidates.dedup_by(|a, b| a.0 == b.0);
    Ok(candidates
        .into_iter()
        .map(|(summand, multiplicities)| IntegralDecomposition { summand, multiplicities, total: total.clone() })
        .collect())
}

/// The `n`-th cyclotomic polynomial.
pub fn cyclotomic(n: usize) -> Poly {
    assert!(n >= 1);
    let mut p = &Poly::monomial(n, 1) - &Poly::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = p.div_exact(&cyclotomic(d)).expect("cyclotomic polynomials divide t^n - 1");
    }
    p
}

/// Multiplicities `n -> e_n` with `poly = +-prod Phi_n^{e_n}`.
pub fn cyclotomic_factorization(poly: &Poly) -> Result<BTreeMap<usize, u32>> {
    let mut rest = poly.clone();
    let mut out = BTreeMap::new();
    let deg = poly.degree().ok_or_else(|| Error::NoDivisor("0".into()))?;
    let mut n = 1;
    // phi(n) >= sqrt(n / 2), so no cyclotomic factor of a degree-`deg` polynomial has n > 2 deg^2.
    while rest.degree().unwrap_or(0) > 0 && n <= 2 * deg * deg + 2 {
        let phi = cyclotomic(n);
        while let Ok(q) = rest.div_exact(&phi) {
            rest = q;
            *out.entry(n).or_insert(0) += 1;
        }
        n += 1;
    }
    if rest.degree() != Some(0) || rest.leading_coeff().abs() != 1 {
        return Err(Error::HypothesisViolated(format!("{poly} is not a product of cyclotomic polynomials")));
    }
    Ok(out)
}

fn cyclotomic_divisors(total: &Poly, budget: u64, steps: &mut u64) -> Result<Vec<Poly>> {
    let factors: Vec<(Poly, u32)> = cyclotomic_factorization(total)?.into_iter().map(|(n, e)| (cyclotomic(n), e)).collect();
    let count: u128 = factors.iter().map(|&(_, e)| e as u128 + 1).product();
    if count > (budget - (*steps).min(budget)) as u128 {
        return Err(Error::SearchBudgetExceeded(budget));
    }
    *steps += count as u64;
    let mut out = vec![Poly::one()];
    for (phi, e) in factors {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for base in &out {
            let mut acc = base.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = &acc * &phi;
                next.push(acc.clone());
            }
        }
        out = next;
    }
    Ok(out)
}

/// Searches for `f = g + (f - g)` with both parts m-positive.
///
/// Every m-positive `g` is `S * q` for the summand `S` of the first prime
/// dividing `m` and some `q >= 0`; the search runs over such `q` with
/// `S q <= f` coefficientwise.
fn splits_as_sum(
    f: &Poly,
    m: u64,
    summands: &[(u64, Poly)],
    divisors: &[&Poly],
    budget: u64,
    steps: &mut u64,
) -> Result<bool> {
    let s = divisors
        .iter()
        .copied()
        .max_by_key(|s| s.degree())
        .cloned()
        .unwrap_or_else(Poly::one);
    let (Some(df), Some(ds)) = (f.degree(), s.degree()) else {
        return Ok(false);
    };
    if ds > df || !s.is_nonnegative() || s.coeff(0) <= 0 {
        return Ok(false);
    }
    let mut search = SplitSearch {
        f: f.coeffs().to_vec(),
        s: s.coeffs().to_vec(),
        q: vec![0; df - ds + 1],
        g: vec![0; df + 1],
        m,
        summands,
        budget,
        steps,
    };
    search.run(0)
}

struct SplitSearch<'a> {
    f: Vec<i64>,
    s: Vec<i64>,
    q: Vec<i64>,
    g: Vec<i64>,
    m: u64,
    summands: &'a [(u64, Poly)],
    budget: u64,
    steps: &'a mut u64,
}

impl SplitSearch<'_> {
    fn run(&mut self, pos: usize) -> Result<bool> {
        *self.steps += 1;
        if *self.steps > self.budget {
            return Err(Error::SearchBudgetExceeded(self.budget));
        }
        if pos == self.q.len() {
            let g = Poly::new(self.g.clone());
            if g.is_zero() || g.coeffs() == self.f.as_slice() {
                return Ok(false);
            }
            let rest = &Poly::new(self.f.clone()) - &g;
            return Ok(is_m_positive(&g, self.m, self.summands)? && is_m_positive(&rest, self.m, self.summands)?);
        }
        let mut added = 0;
        loop {
            if self.run(pos + 1)? {
                return Ok(true);
            }
            // Raise q_pos by one; g grows by t^pos * S.
            let fits = self.s.iter().enumerate().all(|(a, &c)| self.g[pos + a] + c <= self.f[pos + a]);
            if !fits {
                break;
            }
            for (a, &c) in self.s.iter().enumerate() {
                self.g[pos + a] += c;
            }
            self.q[pos] += 1;
            added += 1;
        }
        for (a, &c) in self.s.iter().enumerate() {
            self.g[pos + a] -= c * added;
        }
        self.q[pos] = 0;
        Ok(false)
    }
}
