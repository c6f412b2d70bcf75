//! Arithmetic in `(Z/p)[x_1..x_r] / (x_1^{p^{k_1}}, ..., x_r^{p^{k_r}})`
//! with the DegLex monomial order, subring closure, J-invariant extraction,
//! and binomial coefficients modulo `p` via Lucas' theorem.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jinvariant::JInvariant;
use crate::kac_table::TorsionData;

/// Exponent vector `M = (m_1, ..., m_r)` of the monomial `x^M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(r: usize) -> Self {
        Monomial(vec![0; r])
    }

    /// `x_i^e`, 1-based `i`.
    pub fn var_power(r: usize, i: usize, e: u32) -> Self {
        let mut m = vec![0; r];
        m[i - 1] = e;
        Monomial(m)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }
}

struct RingInner {
    data: TorsionData,
    bounds: Vec<u64>,
    /// Mixed-radix code of each monomial, listed in ascending DegLex order.
    codes_by_rank: Vec<u64>,
    /// Position in DegLex order, indexed by mixed-radix code.
    rank_by_code: Vec<u32>,
}

/// The truncated polynomial ring attached to a [`TorsionData`].
#[derive(Clone)]
pub struct TruncatedRing(Arc<RingInner>);

impl PartialEq for TruncatedRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.data == other.0.data
    }
}

impl Eq for TruncatedRing {}

impl fmt::Debug for TruncatedRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedRing").field("data", &self.0.data).finish()
    }
}

/// Rings larger than this are refused; closure works on dense vectors.
pub const MAX_RING_DIMENSION: u64 = 1 << 20;

impl TruncatedRing {
    pub fn new(data: TorsionData) -> Result<Self> {
        let bounds = data.bounds();
        let dim = bounds
            .iter()
            .try_fold(1u64, |acc, &b| acc.checked_mul(b))
            .filter(|&d| d <= MAX_RING_DIMENSION)
            .ok_or(Error::BudgetExceeded {
                needed: bounds.iter().map(|&b| b as u128).product(),
                budget: MAX_RING_DIMENSION as u128,
            })?;
        let mut inner = RingInner { data, bounds, codes_by_rank: Vec::new(), rank_by_code: Vec::new() };
        let mut monos: Vec<(u64, Monomial)> = (0..dim).map(|c| (c, inner.decode(c))).collect();
        monos.sort_by(|a, b| deglex(&inner.data.d, &a.1 .0, &b.1 .0));
        inner.rank_by_code = vec![0; dim as usize];
        for (rank, (code, _)) in monos.iter().enumerate() {
            inner.rank_by_code[*code as usize] = rank as u32;
        }
        inner.codes_by_rank = monos.into_iter().map(|(c, _)| c).collect();
        Ok(TruncatedRing(Arc::new(inner)))
    }

    pub fn data(&self) -> &TorsionData {
        &self.0.data
    }

    pub fn p(&self) -> u64 {
        self.0.data.p
    }

    pub fn r(&self) -> usize {
        self.0.data.r()
    }

    /// Number of monomials `x^M` with `M <= N`, i.e. `p^{|K|}`.
    pub fn dimension(&self) -> usize {
        self.0.codes_by_rank.len()
    }

    /// All nonzero monomials in ascending DegLex order.
    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.0.codes_by_rank.iter().map(|&c| self.0.decode(c))
    }

    /// `|M| = sum d_i m_i`.
    pub fn codimension(&self, m: &Monomial) -> u64 {
        m.0.iter().zip(&self.0.data.d).map(|(&e, &d)| e as u64 * d).sum()
    }

    fn check(&self, m: &Monomial) -> Result<()> {
        if m.0.len() != self.r() {
            return Err(Error::ContextMismatch(format!(
                "monomial with {} exponents in a ring with {} variables",
                m.0.len(),
                self.r()
            )));
        }
        if let Some((i, e)) = m.0.iter().enumerate().find(|(i, &e)| e as u64 >= self.0.bounds[*i]) {
            return Err(Error::ContextMismatch(format!(
                "exponent {e} of x{} is not below {}",
                i + 1,
                self.0.bounds[i]
            )));
        }
        Ok(())
    }

    /// DegLex: compare `|M|`, then the exponent at the greatest index where they differ.
    pub fn deglex_compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering> {
        self.check(a)?;
        self.check(b)?;
        Ok(deglex(&self.0.data.d, &a.0, &b.0))
    }

    pub fn zero(&self) -> RingElement {
        RingElement { ring: self.clone(), terms: BTreeMap::new() }
    }

    pub fn one(&self) -> RingElement {
        self.term(Monomial::one(self.r()), 1).expect("constant monomial is always valid")
    }

    /// The generator `x_i`, 1-based; zero when `k_i = 0`.
    pub fn var(&self, i: usize) -> Result<RingElement> {
        if i == 0 || i > self.r() {
            return Err(Error::IndexOutOfRange { index: i, rank: self.r() });
        }
        if self.0.bounds[i - 1] <= 1 {
            return Ok(self.zero());
        }
        self.term(Monomial::var_power(self.r(), i, 1), 1)
    }

    /// `c * x^M`; the coefficient is reduced mod `p`.
    pub fn term(&self, m: Monomial, c: u64) -> Result<RingElement> {
        self.check(&m)?;
        let mut e = self.zero();
        let c = c % self.p();
        if c != 0 {
            e.terms.insert(m, c);
        }
        Ok(e)
    }

    pub fn from_terms(&self, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Result<RingElement> {
        let mut e = self.zero();
        for (m, c) in terms {
            self.check(&m)?;
            e.add_term(m, c);
        }
        Ok(e)
    }

    /// Parses `c*x1^a1*...*xr^ar + ...`, e.g. `1 + 2*x1^3*x2`.
    pub fn parse(&self, s: &str) -> Result<RingElement> {
        let mut out = self.zero();
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty ring element".into()));
        }
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in `{s}`")));
            }
            let mut coeff: u64 = 1;
            let mut exps = vec![0u32; self.r()];
            for factor in term.split('*') {
                let factor = factor.trim();
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, pow) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.trim().parse::<u32>().map_err(|_| bad_factor(factor))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.trim().parse().map_err(|_| bad_factor(factor))?;
                    if idx == 0 || idx > self.r() {
                        return Err(Error::Parse(format!("variable x{idx} out of range 1..={}", self.r())));
                    }
                    exps[idx - 1] = exps[idx - 1].checked_add(pow).ok_or_else(|| bad_factor(factor))?;
                } else {
                    let c: u64 = factor.parse().map_err(|_| bad_factor(factor))?;
                    if c >= self.p() {
                        return Err(Error::Parse(format!("coefficient {c} not in 0..{}", self.p())));
                    }
                    coeff = coeff * c % self.p();
                }
            }
            for (i, &e) in exps.iter().enumerate() {
                if e as u64 >= self.0.bounds[i] {
                    return Err(Error::Parse(format!(
                        "exponent {e} of x{} is not below p^k = {}",
                        i + 1,
                        self.0.bounds[i]
                    )));
                }
            }
            out.add_term(Monomial(exps), coeff);
        }
        Ok(out)
    }

    fn dense(&self, e: &RingElement) -> Vec<u64> {
        let mut v = vec![0u64; self.dimension()];
        for (m, &c) in &e.terms {
            v[self.0.rank_by_code[self.0.encode(m) as usize] as usize] = c;
        }
        v
    }

    fn sparse(&self, v: &[u64]) -> RingElement {
        let mut e = self.zero();
        for (rank, &c) in v.iter().enumerate() {
            if c != 0 {
                e.terms.insert(self.0.decode(self.0.codes_by_rank[rank]), c);
            }
        }
        e
    }

    /// Product of dense vectors; monomials at or past a truncation drop out.
    fn dense_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p();
        let mut out = vec![0u64; a.len()];
        let nz_b: Vec<(usize, u64)> = b.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        for (ra, &ca) in a.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            let code_a = self.0.codes_by_rank[ra];
            for &(rb, cb) in &nz_b {
                if let Some(code) = self.0.mul_codes(code_a, self.0.codes_by_rank[rb]) {
                    let r = self.0.rank_by_code[code as usize] as usize;
                    out[r] = (out[r] + ca * cb) % p;
                }
            }
        }
        out
    }

    /// Basis of the smallest unital subring containing `gens`.
    ///
    /// The result is in reduced echelon form: leading monomials are pairwise
    /// distinct, each basis vector is monic, and no basis vector contains
    /// another's leading monomial. Vectors are sorted by descending leading
    /// monomial.
    pub fn subring_closure(&self, gens: &[RingElement]) -> Result<Vec<RingElement>> {
        for g in gens {
            if &g.ring != self {
                return Err(Error::ContextMismatch("generator from a different ring".into()));
            }
        }
        let gens: Vec<Vec<u64>> = gens.iter().map(|g| self.dense(g)).collect();
        let mut echelon = Echelon::new(self.p(), self.dimension());
        let mut frontier = Vec::new();
        for v in std::iter::once(self.dense(&self.one())).chain(gens.iter().cloned()) {
            if let Some(reduced) = echelon.insert(v) {
                frontier.push(reduced);
            }
        }
        // The span of all words in the generators is closed under
        // multiplication once it is closed under multiplication by each generator.
        while let Some(v) = frontier.pop() {
            for g in &gens {
                if let Some(reduced) = echelon.insert(self.dense_mul(&v, g)) {
                    frontier.push(reduced);
                }
            }
        }
        Ok(echelon.into_reduced().iter().map(|v| self.sparse(v)).collect())
    }
}

fn bad_factor(f: &str) -> Error {
    Error::Parse(format!("bad factor `{f}`"))
}

impl RingInner {
    fn encode(&self, m: &Monomial) -> u64 {
        m.0.iter().zip(&self.bounds).rev().fold(0, |acc, (&e, &b)| acc * b + e as u64)
    }

    fn decode(&self, mut code: u64) -> Monomial {
        let mut exps = Vec::with_capacity(self.bounds.len());
        for &b in &self.bounds {
            exps.push((code % b) as u32);
            code /= b;
        }
        Monomial(exps)
    }

    fn mul_codes(&self, mut a: u64, mut b: u64) -> Option<u64> {
        let mut out = 0;
        let mut place = 1;
        for &bound in &self.bounds {
            let e = a % bound + b % bound;
            if e >= bound {
                return None;
            }
            out += e * place;
            place *= bound;
            a /= bound;
            b /= bound;
        }
        Some(out)
    }
}

fn deglex(d: &[u64], a: &[u32], b: &[u32]) -> Ordering {
    let codim = |m: &[u32]| m.iter().zip(d).map(|(&e, &d)| e as u64 * d).sum::<u64>();
    codim(a).cmp(&codim(b)).then_with(|| {
        a.iter()
            .zip(b)
            .rev()
            .find(|(x, y)| x != y)
            .map_or(Ordering::Equal, |(x, y)| x.cmp(y))
    })
}

/// Row echelon form over `Z/p`, keyed by the highest nonzero position.
struct Echelon {
    p: u64,
    rows: BTreeMap<usize, Vec<u64>>,
    inverses: Vec<u64>,
}

impl Echelon {
    fn new(p: u64, _dim: usize) -> Self {
        let inverses = (0..p).map(|a| if a == 0 { 0 } else { mod_pow(a, p - 2, p) }).collect();
        Echelon { p, rows: BTreeMap::new(), inverses }
    }

    /// Reduces `v` against the stored rows; stores and returns it if a new pivot appears.
    fn insert(&mut self, mut v: Vec<u64>) -> Option<Vec<u64>> {
        let p = self.p;
        loop {
            let lead = v.iter().rposition(|&c| c != 0)?;
            match self.rows.get(&lead) {
                Some(row) => {
                    let c = v[lead];
                    for (x, &y) in v.iter_mut().zip(row) {
                        *x = (*x + p - c * y % p) % p;
                    }
                }
                None => {
                    let inv = self.inverses[v[lead] as usize];
                    v.iter_mut().for_each(|x| *x = *x * inv % p);
                    self.rows.insert(lead, v.clone());
                    return Some(v);
                }
            }
        }
    }

    /// Fully reduced rows, descending by pivot.
    fn into_reduced(self) -> Vec<Vec<u64>> {
        let p = self.p;
        let mut rows = self.rows;
        let pivots: Vec<usize> = rows.keys().copied().collect();
        for &pivot in &pivots {
            let pivot_row = rows[&pivot].clone();
            for &other in pivots.iter().filter(|&&o| o > pivot) {
                let row = rows.get_mut(&other).unwrap();
                let c = row[pivot];
                if c != 0 {
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x = (*x + p - c * y % p) % p;
                    }
                }
            }
        }
        rows.into_values().rev().collect()
    }
}

/// An element of a [`TruncatedRing`]: a map from monomials to nonzero residues.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElement {
    ring: TruncatedRing,
    terms: BTreeMap<Monomial, u64>,
}

impl RingElement {
    pub fn ring(&self) -> &TruncatedRing {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let p = self.ring.p();
        let entry = self.terms.entry(m).or_insert(0);
        *entry = (*entry + c % p) % p;
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    fn same_ring(&self, other: &RingElement) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::ContextMismatch("elements of different rings".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> RingElement {
        let mut out = self.ring.zero();
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), a * (c % self.ring.p()));
        }
        out
    }

    /// Product in the quotient ring.
    pub fn multiply(&self, other: &RingElement) -> Result<RingElement> {
        self.same_ring(other)?;
        let bounds = &self.ring.0.bounds;
        let mut out = self.ring.zero();
        for (ma, &ca) in &self.terms {
            'terms: for (mb, &cb) in &other.terms {
                let mut exps = Vec::with_capacity(bounds.len());
                for ((&a, &b), &bound) in ma.0.iter().zip(&mb.0).zip(bounds) {
                    let e = a + b;
                    if e as u64 >= bound {
                        continue 'terms;
                    }
                    exps.push(e);
                }
                out.add_term(Monomial(exps), ca * cb);
            }
        }
        Ok(out)
    }

    /// Greatest monomial with nonzero coefficient in DegLex order.
    pub fn leading_monomial(&self) -> Option<&Monomial> {
        let d = &self.ring.0.data.d;
        self.terms.keys().max_by(|a, b| deglex(d, &a.0, &b.0))
    }

    /// Terms sorted by descending DegLex order.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, u64)> {
        let d = &self.ring.0.data.d;
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|a, b| deglex(d, &b.0 .0, &a.0 .0));
        v
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .into_iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
                    .collect();
                match (c, vars.is_empty()) {
                    (c, true) => c.to_string(),
                    (1, false) => vars.join("*"),
                    (c, false) => format!("{c}*{}", vars.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement({self})")
    }
}

/// `j_i` is the least `j` such that some basis vector leads with
/// `x_i^{p^j}`; it falls back to `k_i` since `x_i^{p^{k_i}} = 0` lies in
/// every subring.
///
/// `basis` must be an echelon basis (distinct leading monomials), as
/// returned by [`TruncatedRing::subring_closure`].
pub fn j_from_subring(basis: &[RingElement], data: &TorsionData) -> Result<JInvariant> {
    if let Some(e) = basis.iter().find(|e| e.ring.data() != data) {
        return Err(Error::ContextMismatch(format!("basis element {e} lives in another ring")));
    }
    let r = data.r();
    let leads: Vec<&Monomial> = basis.iter().filter_map(|e| e.leading_monomial()).collect();
    let j = (1..=r)
        .map(|i| {
            let k = data.k[i - 1];
            (0..k)
                .find(|&j| {
                    let target = Monomial::var_power(r, i, data.p.pow(j) as u32);
                    leads.iter().any(|&m| *m == target)
                })
                .unwrap_or(k)
        })
        .collect();
    JInvariant::new(data, j)
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// `C(n, m) mod p` via Lucas' theorem: the product over base-`p` digits of
/// `C(n_i, m_i)`, with `C(n_i, m_i) = 0` when `m_i > n_i`.
pub fn lucas_binom(mut n: u64, mut m: u64, p: u64) -> u64 {
    let p128 = p as u128;
    // Numerator and denominator of all digit binomials; one inversion at the end.
    let (mut num, mut den) = (1u128, 1u128);
    while m > 0 {
        let (ni, mi) = (n % p, m % p);
        if mi > ni {
            return 0;
        }
        for t in 1..=mi.min(ni - mi) as u128 {
            num = num * (ni as u128 - t + 1) % p128;
            den = den * t % p128;
        }
        n /= p;
        m /= p;
    }
    if den == 1 {
        return (num % p128) as u64;
    }
    (num * mod_pow(den as u64, p - 2, p) as u128 % p128) as u64
}

/// `(M choose L) = prod_i C(m_i, l_i) mod p`.
pub fn multi_binom(m: &[u64], l: &[u64], p: u64) -> Result<u64> {
    if m.len() != l.len() {
        return Err(Error::LengthMismatch { left: m.len(), right: l.len() });
    }
    Ok(m.iter().zip(l).fold(1u64, |acc, (&mi, &li)| {
        if li > mi {
            0
        } else {
            ((acc as u128 * lucas_binom(mi, li, p) as u128) % p as u128) as u64
        }
    }))
}
