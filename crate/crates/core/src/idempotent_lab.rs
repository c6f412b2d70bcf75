//! Lifting idempotents, orthogonal families, isomorphisms and `SL_l`
//! matrices along reduction maps of finite coefficient rings `Z/m`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kac_table::{prime_factors, valuation};

/// A square matrix over `Z/m` with entries stored as least nonnegative residues.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ModMatrixRepr", into = "ModMatrixRepr")]
pub struct ModMatrix {
    modulus: u64,
    size: usize,
    entries: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ModMatrixRepr {
    modulus: u64,
    rows: Vec<Vec<u64>>,
}

impl TryFrom<ModMatrixRepr> for ModMatrix {
    type Error = Error;
    fn try_from(r: ModMatrixRepr) -> Result<Self> {
        ModMatrix::from_rows(r.modulus, r.rows)
    }
}

impl From<ModMatrix> for ModMatrixRepr {
    fn from(m: ModMatrix) -> Self {
        ModMatrixRepr { modulus: m.modulus, rows: m.rows() }
    }
}

impl ModMatrix {
    fn check_modulus(modulus: u64) -> Result<()> {
        if modulus == 0 {
            return Err(Error::HypothesisViolated("modulus must be positive".into()));
        }
        Ok(())
    }

    pub fn zero(modulus: u64, size: usize) -> Result<Self> {
        Self::check_modulus(modulus)?;
        Ok(ModMatrix { modulus, size, entries: vec![0; size * size] })
    }

    pub fn identity(modulus: u64, size: usize) -> Result<Self> {
        let mut m = Self::zero(modulus, size)?;
        for i in 0..size {
            m.entries[i * size + i] = 1 % modulus;
        }
        Ok(m)
    }

    /// Entries may be any integers; they are reduced to `0..m`.
    pub fn from_signed_rows(modulus: u64, rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::check_modulus(modulus)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.rem_euclid(modulus as i64) as u64).collect())
            .collect();
        Self::from_rows(modulus, rows)
    }

    pub fn from_rows(modulus: u64, rows: Vec<Vec<u64>>) -> Result<Self> {
        Self::check_modulus(modulus)?;
        let size = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != size) {
            return Err(Error::LengthMismatch { left: size, right: bad.len() });
        }
        let entries = rows.into_iter().flatten().map(|x| x % modulus).collect();
        Ok(ModMatrix { modulus, size, entries })
    }

    pub fn diagonal(modulus: u64, diag: &[u64]) -> Result<Self> {
        let mut m = Self::zero(modulus, diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = d % modulus;
        }
        Ok(m)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.size + j] = v % self.modulus;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.size.max(1)).take(self.size).map(<[u64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    fn same_shape(&self, other: &ModMatrix) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ContextMismatch(format!("moduli {} and {}", self.modulus, other.modulus)));
        }
        if self.size != other.size {
            return Err(Error::LengthMismatch { left: self.size, right: other.size });
        }
        Ok(())
    }

    fn zip_with(&self, other: &ModMatrix, f: impl Fn(u128, u128, u128) -> u128) -> Result<ModMatrix> {
        self.same_shape(other)?;
        let m = self.modulus as u128;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a as u128, b as u128, m) as u64).collect();
        Ok(ModMatrix { modulus: self.modulus, size: self.size, entries })
    }

    pub fn add(&self, other: &ModMatrix) -> Result<ModMatrix> {
        self.zip_with(other, |a, b, m| (a + b) % m)
    }

    pub fn sub(&self, other: &ModMatrix) -> Result<ModMatrix> {
        self.zip_with(other, |a, b, m| (a + m - b) % m)
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        self.same_shape(other)?;
        let n = self.size;
        let m = self.modulus as u128;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k] as u128;
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let e = &mut entries[i * n + j];
                    *e = ((*e as u128 + a * other.entries[k * n + j] as u128) % m) as u64;
                }
            }
        }
        Ok(ModMatrix { modulus: self.modulus, size: n, entries })
    }

    /// `c * self`, with `c` any integer.
    pub fn scale(&self, c: i128) -> ModMatrix {
        let m = self.modulus as i128;
        let c = c.rem_euclid(m) as u128;
        let entries = self.entries.iter().map(|&x| (x as u128 * c % m as u128) as u64).collect();
        ModMatrix { modulus: self.modulus, size: self.size, entries }
    }

    /// Image under `Z/m -> Z/q`; `q` must divide `m`.
    pub fn reduce(&self, q: u64) -> Result<ModMatrix> {
        if q == 0 || !self.modulus.is_multiple_of(q) {
            return Err(Error::ContextMismatch(format!("{q} does not divide {}", self.modulus)));
        }
        Ok(ModMatrix { modulus: q, size: self.size, entries: self.entries.iter().map(|&x| x % q).collect() })
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self).is_ok_and(|sq| &sq == self)
    }

    /// Entries as integers in `0..m`.
    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix { rows: self.rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect() }
    }

    /// Determinant in `Z/m`.
    pub fn det(&self) -> u64 {
        let d = self.to_int_matrix().det();
        d.mod_floor(&BigInt::from(self.modulus)).try_into().expect("residue fits the modulus")
    }

    /// Inverse in `M_l(Z/m)`, or `None` if the determinant is not a unit.
    pub fn inverse(&self) -> Option<ModMatrix> {
        let (ops, diag) = reduce_to_diagonal(self)?;
        let mut inv = ModMatrix::identity(self.modulus, self.size).ok()?;
        for op in &ops {
            op.apply_left(&mut inv);
        }
        for (i, &u) in diag.iter().enumerate() {
            let ui = mod_inverse(u, self.modulus)?;
            for j in 0..self.size {
                let v = (inv.get(i, j) as u128 * ui as u128 % self.modulus as u128) as u64;
                inv.set(i, j, v);
            }
        }
        Some(inv)
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mod {} size {}", self.modulus, self.size)?;
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModMatrix({})", self.to_string().replace('\n', ": "))
    }
}

impl FromStr for ModMatrix {
    type Err = Error;

    /// `mod m size l` on the first line, then rows split by `;` (or newlines)
    /// and entries split by `,`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (header, body) = s.split_once('\n').unwrap_or((s, ""));
        let words: Vec<&str> = header.split_whitespace().collect();
        let ["mod", m, "size", l] = words.as_slice() else {
            return Err(Error::Parse(format!("expected header `mod m size l`, found `{header}`")));
        };
        let modulus: u64 = m.parse().map_err(|_| Error::Parse(format!("bad modulus `{m}`")))?;
        let size: usize = l.parse().map_err(|_| Error::Parse(format!("bad size `{l}`")))?;
        let rows: Vec<Vec<i64>> = body
            .split([';', '\n'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(|r| {
                r.split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad entry `{x}`"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        if rows.len() != size {
            return Err(Error::Parse(format!("header says {size} rows, found {}", rows.len())));
        }
        ModMatrix::from_signed_rows(modulus, rows)
    }
}

/// A square integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn identity(size: usize) -> Self {
        let rows = (0..size)
            .map(|i| (0..size).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        IntMatrix { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.size();
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn reduce(&self, modulus: u64) -> Result<ModMatrix> {
        let m = BigInt::from(modulus);
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| u64::try_from(x.mod_floor(&m)).expect("residue fits the modulus")).collect())
            .collect();
        ModMatrix::from_rows(modulus, rows)
    }

    /// Right multiplication by the elementary matrix `E_ij(a)`: column `j` gains `a` times column `i`.
    fn mul_transvection(&mut self, i: usize, j: usize, a: &BigInt) {
        for row in &mut self.rows {
            let add = &row[i] * a;
            row[j] += add;
        }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.rows.iter().flatten().map(BigInt::abs).max().unwrap_or_default()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.parse::<BigInt>().map_err(serde::de::Error::custom)).collect())
            .collect::<std::result::Result<_, _>>()?;
        Ok(IntMatrix { rows })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(BigInt::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

/// An endomorphism of a graded free module, homogeneous of one degree.
///
/// Index `a` of the underlying matrix lives in slot `grading[a]`. A map of
/// degree `d` sends slot `g` to slot `g - d`, so entry `(a, b)` may be
/// nonzero only when `grading[a] = grading[b] - d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedEndo {
    matrix: ModMatrix,
    grading: Vec<i64>,
    degree: i64,
}

impl GradedEndo {
    pub fn new(matrix: ModMatrix, grading: Vec<i64>, degree: i64) -> Result<Self> {
        if grading.len() != matrix.size() {
            return Err(Error::LengthMismatch { left: matrix.size(), right: grading.len() });
        }
        for a in 0..matrix.size() {
            for b in 0..matrix.size() {
                if matrix.get(a, b) != 0 && grading[a] != grading[b] - degree {
                    return Err(Error::HypothesisViolated(format!(
                        "entry ({}, {}) maps slot {} to slot {}, not homogeneous of degree {degree}",
                        a + 1,
                        b + 1,
                        grading[b],
                        grading[a]
                    )));
                }
            }
        }
        Ok(GradedEndo { matrix, grading, degree })
    }

    /// Degree-zero endomorphism of a module concentrated in slot 0.
    pub fn ungraded(matrix: ModMatrix) -> Self {
        let grading = vec![0; matrix.size()];
        GradedEndo { matrix, grading, degree: 0 }
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.matrix
    }

    pub fn grading(&self) -> &[i64] {
        &self.grading
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    fn same_grading(&self, other: &GradedEndo) -> Result<()> {
        if self.grading != other.grading {
            return Err(Error::ContextMismatch("endomorphisms of differently graded modules".into()));
        }
        Ok(())
    }

    /// Composite `self o other`; degrees add.
    pub fn compose(&self, other: &GradedEndo) -> Result<GradedEndo> {
        self.same_grading(other)?;
        Ok(GradedEndo { matrix: self.matrix.mul(&other.matrix)?, grading: self.grading.clone(), degree: self.degree + other.degree })
    }

    fn combine(&self, other: &GradedEndo, sub: bool) -> Result<GradedEndo> {
        self.same_grading(other)?;
        if self.degree != other.degree && !self.matrix.is_zero() && !other.matrix.is_zero() {
            return Err(Error::ContextMismatch(format!("degrees {} and {}", self.degree, other.degree)));
        }
        let degree = if self.matrix.is_zero() { other.degree } else { self.degree };
        let matrix = if sub { self.matrix.sub(&other.matrix)? } else { self.matrix.add(&other.matrix)? };
        Ok(GradedEndo { matrix, grading: self.grading.clone(), degree })
    }

    pub fn add(&self, other: &GradedEndo) -> Result<GradedEndo> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &GradedEndo) -> Result<GradedEndo> {
        self.combine(other, true)
    }

    pub fn reduce(&self, q: u64) -> Result<GradedEndo> {
        Ok(GradedEndo { matrix: self.matrix.reduce(q)?, grading: self.grading.clone(), degree: self.degree })
    }
}

/// Splits a prime-power modulus `p^n` into `(p, n)`.
pub fn prime_power(m: u64) -> Result<(u64, u32)> {
    match prime_factors(m).as_slice() {
        [p] => Ok((*p, valuation(m, *p))),
        _ => Err(Error::HypothesisViolated(format!("{m} is not a prime power"))),
    }
}

/// Lifts an idempotent of `M_l(Z/p)` to one of `M_l(Z/p^n)` by iterating
/// `e <- 3e^2 - 2e^3`. The result reduces to `a` mod `p`.
pub fn lift_idempotent(a: &ModMatrix) -> Result<ModMatrix> {
    let (p, n) = prime_power(a.modulus())?;
    if !a.reduce(p)?.is_idempotent() {
        return Err(Error::NotAlmostIdempotent(p));
    }
    let mut e = a.clone();
    // Each step squares the nilpotency order of e^2 - e.
    let max_steps = n.next_power_of_two().trailing_zeros() + 1;
    for _ in 0..=max_steps {
        let e2 = e.mul(&e)?;
        if e2 == e {
            return Ok(e);
        }
        let e3 = e2.mul(&e)?;
        e = e2.scale(3).sub(&e3.scale(2))?;
    }
    Err(Error::InternalInconsistency("idempotent iteration did not converge".into()))
}

/// Lifts a complete family of pairwise orthogonal idempotents mod `p` to one
/// mod `p^n`. Each member is lifted inside the corner left by the members
/// already lifted; the last member is the complement of the rest.
pub fn lift_orthogonal_family(family: &[ModMatrix]) -> Result<Vec<ModMatrix>> {
    let first = family.first().ok_or_else(|| Error::NotAFamily("empty family".into()))?;
    let (modulus, size) = (first.modulus(), first.size());
    let (p, _) = prime_power(modulus)?;
    let one = ModMatrix::identity(modulus, size)?;
    let mut sum = ModMatrix::zero(p, size)?;
    let reduced: Vec<ModMatrix> = family.iter().map(|e| e.reduce(p)).collect::<Result<_>>()?;
    for (i, e) in reduced.iter().enumerate() {
        if family[i].modulus() != modulus || e.size() != size {
            return Err(Error::NotAFamily(format!("member {} has a different shape", i + 1)));
        }
        if !e.is_idempotent() {
            return Err(Error::NotAFamily(format!("member {} is not idempotent mod {p}", i + 1)));
        }
        for (j, f) in reduced.iter().enumerate().skip(i + 1) {
            if !e.mul(f)?.is_zero() || !f.mul(e)?.is_zero() {
                return Err(Error::NotAFamily(format!("members {} and {} are not orthogonal mod {p}", i + 1, j + 1)));
            }
        }
        sum = sum.add(e)?;
    }
    if sum != one.reduce(p)? {
        return Err(Error::NotAFamily(format!("members do not sum to the identity mod {p}")));
    }
    let mut lifted: Vec<ModMatrix> = Vec::with_capacity(family.len());
    let mut complement = one.clone();
    for a in &family[..family.len() - 1] {
        let corner = complement.mul(a)?.mul(&complement)?;
        let e = lift_idempotent(&corner)?;
        complement = complement.sub(&e)?;
        lifted.push(e);
    }
    lifted.push(complement);
    Ok(lifted)
}

/// Given idempotents `phi1, phi2` and maps `psi12, psi21` that are mutually
/// inverse between them modulo `p`, returns `(theta12, theta21)` with
/// `theta21 theta12 = phi1` and `theta12 theta21 = phi2` exactly.
///
/// `psi12` is cut down to `phi2 psi12 phi1` and `psi21` to
/// `phi1 psi21 phi2`; then `alpha = psi12 psi21 - phi2` is nilpotent, and
/// `theta21 = psi21 (phi2 - alpha + alpha^2 - ...)`, `theta12 = psi12`.
pub fn lift_isomorphism_izvrat(
    phi1: &GradedEndo,
    phi2: &GradedEndo,
    psi12: &GradedEndo,
    psi21: &GradedEndo,
) -> Result<(GradedEndo, GradedEndo)> {
    let (p, n) = prime_power(phi1.matrix().modulus())?;
    for (name, x) in [("phi1", phi1), ("phi2", phi2)] {
        if x.degree() != 0 && !x.matrix().is_zero() {
            return Err(Error::HypothesisViolated(format!("{name} has degree {}", x.degree())));
        }
        if !x.matrix().is_idempotent() {
            return Err(Error::HypothesisViolated(format!("{name}^2 != {name}")));
        }
    }
    if psi12.degree() + psi21.degree() != 0 {
        return Err(Error::HypothesisViolated("psi12 psi21 is not of degree 0".into()));
    }
    let reduced = |x: &GradedEndo| x.reduce(p);
    if reduced(&psi21.compose(psi12)?)? != reduced(phi1)? {
        return Err(Error::HypothesisViolated(format!("psi21 psi12 != phi1 mod {p}")));
    }
    if reduced(&psi12.compose(psi21)?)? != reduced(phi2)? {
        return Err(Error::HypothesisViolated(format!("psi12 psi21 != phi2 mod {p}")));
    }
    let psi12 = phi2.compose(psi12)?.compose(phi1)?;
    let psi21 = phi1.compose(psi21)?.compose(phi2)?;
    let alpha = psi12.compose(&psi21)?.sub(phi2)?;

    // Find 2^s >= nilpotency order by repeated squaring.
    let cap = phi1.matrix().size() as u64 * n as u64;
    let mut order = 1u64;
    let mut power = alpha.clone();
    while !power.matrix().is_zero() {
        if order >= cap.max(1) {
            return Err(Error::HypothesisViolated("psi12 psi21 - phi2 is not nilpotent".into()));
        }
        power = power.compose(&power)?;
        order *= 2;
    }
    let mut alpha_dual = phi2.clone();
    let mut term = phi2.clone();
    for _ in 1..order {
        term = term.compose(&alpha)?.scale_by(-1);
        alpha_dual = alpha_dual.add(&term)?;
    }
    let theta12 = psi12;
    let theta21 = psi21.compose(&alpha_dual)?;
    if theta21.compose(&theta12)? != *phi1 || theta12.compose(&theta21)? != *phi2 {
        return Err(Error::InternalInconsistency("lifted maps are not mutually inverse".into()));
    }
    Ok((theta12, theta21))
}

impl GradedEndo {
    fn scale_by(&self, c: i128) -> GradedEndo {
        GradedEndo { matrix: self.matrix.scale(c), grading: self.grading.clone(), degree: self.degree }
    }
}

/// `m = prod p_i^{n_i}` and the isomorphism `Z/m -> prod Z/p_i^{n_i}` on matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrtSplit {
    pub modulus: u64,
    /// `(p_i, n_i)` in increasing order of `p_i`.
    pub factors: Vec<(u64, u32)>,
}

impl CrtSplit {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::HypothesisViolated(format!("modulus {m} has no prime factors")));
        }
        let factors = prime_factors(m).into_iter().map(|p| (p, valuation(m, p))).collect();
        Ok(CrtSplit { modulus: m, factors })
    }

    /// The prime-power moduli `p_i^{n_i}`.
    pub fn moduli(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, n)| p.pow(n)).collect()
    }

    pub fn transport(&self, a: &ModMatrix) -> Result<Vec<ModMatrix>> {
        if a.modulus() != self.modulus {
            return Err(Error::ContextMismatch(format!("matrix mod {}, split of {}", a.modulus(), self.modulus)));
        }
        self.moduli().into_iter().map(|q| a.reduce(q)).collect()
    }

    /// Inverse of [`CrtSplit::transport`].
    pub fn reconstruct(&self, parts: &[ModMatrix]) -> Result<ModMatrix> {
        let moduli = self.moduli();
        if parts.len() != moduli.len() {
            return Err(Error::LengthMismatch { left: moduli.len(), right: parts.len() });
        }
        let size = parts[0].size();
        for (part, &q) in parts.iter().zip(&moduli) {
            if part.modulus() != q || part.size() != size {
                return Err(Error::ContextMismatch(format!("expected a {size}x{size} matrix mod {q}")));
            }
        }
        let m = self.modulus as u128;
        // Idempotent basis: c_i = 1 mod q_i, 0 mod q_j.
        let basis: Vec<u128> = moduli
            .iter()
            .map(|&q| {
                let rest = self.modulus / q;
                let inv = mod_inverse(rest % q, q).expect("coprime factors");
                rest as u128 * inv as u128 % m
            })
            .collect();
        let mut out = ModMatrix::zero(self.modulus, size)?;
        for (idx, e) in out.entries.iter_mut().enumerate() {
            let v = parts.iter().zip(&basis).fold(0u128, |acc, (part, &c)| (acc + part.entries[idx] as u128 * c) % m);
            *e = v as u64;
        }
        Ok(out)
    }
}

/// `a^{-1} mod m`, if `a` is a unit.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (a as i128).extended_gcd(&(m as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i128) as u64)
}

/// Row operation `row_i += a row_j`, i.e. left multiplication by `E_ij(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Transvection {
    i: usize,
    j: usize,
    a: u64,
}

impl Transvection {
    fn apply_left(&self, x: &mut ModMatrix) {
        if self.a == 0 {
            return;
        }
        let m = x.modulus as u128;
        for col in 0..x.size {
            let v = (x.get(self.i, col) as u128 + self.a as u128 * x.get(self.j, col) as u128) % m;
            x.set(self.i, col, v as u64);
        }
    }
}

/// Row-reduces `a` by transvections to a diagonal matrix of units.
/// Returns `None` when `a` is not invertible.
fn reduce_to_diagonal(a: &ModMatrix) -> Option<(Vec<Transvection>, Vec<u64>)> {
    let m = a.modulus;
    let primes = prime_factors(m);
    let mut x = a.clone();
    let mut ops = Vec::new();
    let mut push = |op: Transvection, x: &mut ModMatrix| {
        op.apply_left(x);
        ops.push(op);
    };
    for c in 0..x.size {
        if mod_inverse(x.get(c, c), m).is_none() {
            // For each prime p | m pick a row making the pivot nonzero mod p,
            // then glue the choices by the Chinese remainder theorem.
            let mut coeff = vec![0u64; x.size];
            for &p in &primes {
                if !x.get(c, c).is_multiple_of(p) {
                    continue;
                }
                let r = (c + 1..x.size).find(|&r| !x.get(r, c).is_multiple_of(p))?;
                let rest = m / p.pow(valuation(m, p));
                // t = 1 mod p and 0 mod the other primes of m.
                let t = rest as u128 * mod_inverse(rest % p, p)? as u128 % m as u128;
                coeff[r] = ((coeff[r] as u128 + t) % m as u128) as u64;
            }
            for (r, &t) in coeff.iter().enumerate() {
                if t != 0 {
                    push(Transvection { i: c, j: r, a: t }, &mut x);
                }
            }
        }
        let u_inv = mod_inverse(x.get(c, c), m)?;
        for r in (0..x.size).filter(|&r| r != c) {
            let v = x.get(r, c);
            if v != 0 {
                let f = (v as u128 * u_inv as u128 % m as u128) as u64;
                push(Transvection { i: r, j: c, a: (m - f) % m }, &mut x);
            }
        }
    }
    let diag = (0..x.size).map(|i| x.get(i, i)).collect();
    Some((ops, diag))
}

/// Lifts a matrix of determinant 1 over `Z/m` to an integer matrix of
/// determinant exactly 1 with the same reduction, by writing it as a word in
/// elementary transvections and lifting each letter.
pub fn sl_lift(a: &ModMatrix) -> Result<IntMatrix> {
    let m = a.modulus();
    let det = a.det();
    if det != 1 % m {
        return Err(Error::DeterminantNotOne { det, modulus: m });
    }
    let (mut ops, diag) =
        reduce_to_diagonal(a).ok_or_else(|| Error::InternalInconsistency("unit determinant without unit pivots".into()))?;
    let mut x = a.clone();
    for op in &ops {
        op.apply_left(&mut x);
    }
    // diag(u, v) -> diag(1, uv) via diag(u^{-1}, u), a product of six transvections.
    let mut carry = diag.first().copied().unwrap_or(1 % m);
    for i in 0..a.size().saturating_sub(1) {
        if carry == 1 % m {
            carry = diag[i + 1];
            continue;
        }
        let y = mod_inverse(carry, m).ok_or_else(|| Error::InternalInconsistency("non-unit diagonal".into()))?;
        let neg = |v: u64| (m - v % m) % m;
        // diag(y, y^{-1}) = E12(y) E21(-y^{-1}) E12(y) E12(-1) E21(1) E12(-1);
        // left multiplication applies the rightmost factor first.
        let word = [
            Transvection { i, j: i + 1, a: neg(1) },
            Transvection { i: i + 1, j: i, a: 1 % m },
            Transvection { i, j: i + 1, a: neg(1) },
            Transvection { i, j: i + 1, a: y },
            Transvection { i: i + 1, j: i, a: neg(carry) },
            Transvection { i, j: i + 1, a: y },
        ];
        for op in word {
            op.apply_left(&mut x);
            ops.push(op);
        }
        carry = (carry as u128 * diag[i + 1] as u128 % m as u128) as u64;
    }
    if x != ModMatrix::identity(m, a.size())? {
        return Err(Error::InternalInconsistency("elimination did not reach the identity".into()));
    }
    // ops_k ... ops_1 a = 1, so a = ops_1^{-1} ... ops_k^{-1}.
    let mut lift = IntMatrix::identity(a.size());
    for op in &ops {
        let inv = BigInt::from((m - op.a % m) % m);
        lift.mul_transvection(op.i, op.j, &inv);
    }
    Ok(lift)
}

/// Uniformly random matrix over `Z/m`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, modulus: u64, size: usize) -> ModMatrix {
    let rows = (0..size).map(|_| (0..size).map(|_| rng.gen_range(0..modulus)).collect()).collect();
    ModMatrix::from_rows(modulus, rows).expect("square by construction")
}

/// Random matrix invertible over `Z/m`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, modulus: u64, size: usize) -> ModMatrix {
    loop {
        let a = random_matrix(rng, modulus, size);
        if mod_inverse(a.det(), modulus).is_some() {
            return a;
        }
    }
}

/// Random element of `SL_l(Z/m)`: a random invertible matrix with its first
/// row scaled to bring the determinant to 1.
pub fn random_sl<R: Rng + ?Sized>(rng: &mut R, modulus: u64, size: usize) -> ModMatrix {
    let mut a = random_invertible(rng, modulus, size);
    if size == 0 {
        return a;
    }
    let fix = mod_inverse(a.det(), modulus).expect("invertible");
    for j in 0..size {
        let v = (a.get(0, j) as u128 * fix as u128 % modulus as u128) as u64;
        a.set(0, j, v);
    }
    a
}

/// Random idempotent over `Z/p`: a conjugate of a random 0/1 diagonal matrix.
pub fn random_idempotent_mod_p<R: Rng + ?Sized>(rng: &mut R, p: u64, size: usize) -> ModMatrix {
    let g = random_invertible(rng, p, size);
    let diag: Vec<u64> = (0..size).map(|_| rng.gen_range(0..2)).collect();
    let d = ModMatrix::diagonal(p, &diag).expect("valid modulus");
    g.mul(&d).and_then(|x| x.mul(&g.inverse().expect("invertible"))).expect("same shape")
}

/// Random complete orthogonal family of `parts` idempotents over `Z/p`,
/// presented at modulus `p^n` by their least representatives.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, p: u64, n: u32, size: usize, parts: usize) -> Vec<ModMatrix> {
    let g = random_invertible(rng, p, size);
    let g_inv = g.inverse().expect("invertible");
    let labels: Vec<usize> = (0..size).map(|_| rng.gen_range(0..parts.max(1))).collect();
    (0..parts)
        .map(|part| {
            let diag: Vec<u64> = labels.iter().map(|&l| u64::from(l == part)).collect();
            let d = ModMatrix::diagonal(p, &diag).expect("valid modulus");
            let e = g.mul(&d).and_then(|x| x.mul(&g_inv)).expect("same shape");
            ModMatrix::from_rows(p.pow(n), e.rows()).expect("square")
        })
        .collect()
}

/// Inputs for [`lift_isomorphism_izvrat`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IzvratInstance {
    pub phi1: GradedEndo,
    pub phi2: GradedEndo,
    pub psi12: GradedEndo,
    pub psi21: GradedEndo,
}

/// Random instance over `Z/p^n` on a module with two slots of rank `l`
/// (degrees 0 and 1). `phi1` lives on slot 0 and `phi2 = g phi1 g^{-1}`
/// on slot 1; `psi12` and `psi21` are `g phi1` and `phi1 g^{-1}` moved
/// between the slots, plus multiples of `p`.
pub fn random_izvrat_instance<R: Rng + ?Sized>(rng: &mut R, p: u64, n: u32, l: usize) -> IzvratInstance {
    let q = p.pow(n);
    let e = lift_idempotent(&ModMatrix::from_rows(q, random_idempotent_mod_p(rng, p, l).rows()).expect("square"))
        .expect("idempotent mod p");
    let g = random_invertible(rng, q, l);
    let g_inv = g.inverse().expect("invertible");
    let perturb = |rng: &mut R| random_matrix(rng, q, l).scale(p as i128);
    let block = |x: &ModMatrix, row_slot: usize, col_slot: usize| {
        let mut out = ModMatrix::zero(q, 2 * l).expect("valid modulus");
        for a in 0..l {
            for b in 0..l {
                out.set(row_slot * l + a, col_slot * l + b, x.get(a, b));
            }
        }
        out
    };
    let grading: Vec<i64> = (0..2 * l).map(|i| (i / l) as i64).collect();
    let ge = g.mul(&e).unwrap().add(&perturb(rng)).unwrap();
    let eg = e.mul(&g_inv).unwrap().add(&perturb(rng)).unwrap();
    let conj = g.mul(&e).unwrap().mul(&g_inv).unwrap();
    let mk = |m: ModMatrix, d: i64| GradedEndo::new(m, grading.clone(), d).expect("homogeneous by construction");
    IzvratInstance {
        phi1: mk(block(&e, 0, 0), 0),
        phi2: mk(block(&conj, 1, 1), 0),
        psi12: mk(block(&ge, 1, 0), -1),
        psi21: mk(block(&eg, 0, 1), 1),
    }
}
