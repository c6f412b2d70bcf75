//! Generators of the mod-p Chow ring of the classifying-type quotient and the
//! restrictions they impose on J-invariants.
//!
//! For every group form and prime this gives the number `r` of generators,
//! their codimensions `d_i` (coprime to `p`), the exponents `k_i` of the
//! truncating relations `x_i^{p^{k_i}} = 0`, and the inequalities between
//! the `j_i` derived from Steenrod operations. The classical orthogonal rows
//! are parametric in the matrix size and are expanded on demand.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::root_data::{DynkinType, Series};
use crate::truncated_ring::lucas_binom;

/// Isogeny class within a Dynkin type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Isogeny {
    SimplyConnected,
    Adjoint,
    /// `SL_N / mu_m` for type `A_{N-1}`.
    SLmodMu(u64),
    PGSp,
    SO,
    Spin,
    HalfSpin,
    PGO,
}

/// A split semisimple group up to isomorphism: Dynkin type plus isogeny.
///
/// Constructors normalise synonyms, e.g. adjoint `B_n` is stored as `SO`,
/// simply connected `A_n` as `SLmodMu(1)`, and `G2`, `F4`, `E8` always as
/// simply connected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupForm {
    base: DynkinType,
    isogeny: Isogeny,
}

impl GroupForm {
    pub fn new(base: DynkinType, isogeny: Isogeny) -> Result<Self> {
        use Isogeny::*;
        let n = base.rank() as u64;
        let bad = || Error::UnsupportedForm(format!("{base} with isogeny {isogeny:?}"));
        let isogeny = match (base.series(), isogeny) {
            (Series::A, SimplyConnected) => SLmodMu(1),
            (Series::A, Adjoint) => SLmodMu(n + 1),
            (Series::A, SLmodMu(m)) if m >= 1 && (n + 1).is_multiple_of(m) => SLmodMu(m),
            (Series::B, SimplyConnected | Spin) => Spin,
            (Series::B, Adjoint | SO) => SO,
            (Series::C, SimplyConnected) => SimplyConnected,
            (Series::C, Adjoint | PGSp) => PGSp,
            (Series::D, SimplyConnected | Spin) => Spin,
            (Series::D, SO) => SO,
            (Series::D, Adjoint | PGO) => PGO,
            (Series::D, HalfSpin) if n.is_multiple_of(2) => HalfSpin,
            (Series::G | Series::F, SimplyConnected | Adjoint) => SimplyConnected,
            (Series::E, SimplyConnected | Adjoint) if n == 8 => SimplyConnected,
            (Series::E, SimplyConnected | Adjoint) => isogeny,
            _ => return Err(bad()),
        };
        Ok(GroupForm { base, isogeny })
    }

    fn classical(series: Series, rank: usize, isogeny: Isogeny) -> Result<Self> {
        GroupForm::new(DynkinType::new(series, rank)?, isogeny)
    }

    /// `SL_n / mu_m`.
    pub fn sl_mod_mu(n: u64, m: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedForm(format!("SL{n}")));
        }
        GroupForm::classical(Series::A, n as usize - 1, Isogeny::SLmodMu(m))
    }

    /// Special orthogonal group of an `n`-dimensional form.
    pub fn so(n: u64) -> Result<Self> {
        match n {
            3 => GroupForm::sl_mod_mu(2, 2),
            6 => GroupForm::sl_mod_mu(4, 2),
            n if n % 2 == 1 && n >= 5 => GroupForm::classical(Series::B, (n as usize - 1) / 2, Isogeny::SO),
            n if n % 2 == 0 && n >= 8 => GroupForm::classical(Series::D, n as usize / 2, Isogeny::SO),
            _ => Err(Error::UnsupportedForm(format!("SO{n}"))),
        }
    }

    pub fn spin(n: u64) -> Result<Self> {
        match n {
            3 => GroupForm::sl_mod_mu(2, 1),
            6 => GroupForm::sl_mod_mu(4, 1),
            n if n % 2 == 1 && n >= 5 => GroupForm::classical(Series::B, (n as usize - 1) / 2, Isogeny::Spin),
            n if n % 2 == 0 && n >= 8 => GroupForm::classical(Series::D, n as usize / 2, Isogeny::Spin),
            _ => Err(Error::UnsupportedForm(format!("Spin{n}"))),
        }
    }

    /// Projective orthogonal group `PGO_{2n}`, given the matrix size `2n`.
    pub fn pgo(size: u64) -> Result<Self> {
        match size {
            6 => GroupForm::sl_mod_mu(4, 4),
            s if s % 2 == 0 && s >= 8 => GroupForm::classical(Series::D, s as usize / 2, Isogeny::PGO),
            _ => Err(Error::UnsupportedForm(format!("PGO{size}"))),
        }
    }

    /// Half-spin group `Spin^±_{2n}`, defined for even `n`.
    pub fn half_spin(size: u64) -> Result<Self> {
        if !size.is_multiple_of(4) || size < 8 {
            return Err(Error::UnsupportedForm(format!("HSpin{size}")));
        }
        GroupForm::classical(Series::D, size as usize / 2, Isogeny::HalfSpin)
    }

    pub fn sp(size: u64) -> Result<Self> {
        if !size.is_multiple_of(2) || size < 4 {
            return Err(Error::UnsupportedForm(format!("Sp{size}")));
        }
        GroupForm::classical(Series::C, size as usize / 2, Isogeny::SimplyConnected)
    }

    pub fn pgsp(size: u64) -> Result<Self> {
        if !size.is_multiple_of(2) || size < 4 {
            return Err(Error::UnsupportedForm(format!("PGSp{size}")));
        }
        GroupForm::classical(Series::C, size as usize / 2, Isogeny::PGSp)
    }

    pub fn exceptional(name: &str) -> Result<Self> {
        name.parse()
    }

    pub fn base(&self) -> DynkinType {
        self.base
    }

    pub fn isogeny(&self) -> Isogeny {
        self.isogeny
    }

    /// Every supported form of rank at most `max_rank` (exceptional forms
    /// included when their rank fits), in a fixed order.
    pub fn all_up_to_rank(max_rank: usize) -> Vec<GroupForm> {
        let mut out = Vec::new();
        for n in 1..=max_rank {
            let big_n = n as u64 + 1;
            for m in (1..=big_n).filter(|m| big_n.is_multiple_of(*m)) {
                out.extend(GroupForm::sl_mod_mu(big_n, m));
            }
        }
        for n in 2..=max_rank as u64 {
            out.extend(GroupForm::spin(2 * n + 1));
            out.extend(GroupForm::so(2 * n + 1));
        }
        for n in 2..=max_rank as u64 {
            out.extend(GroupForm::sp(2 * n));
            out.extend(GroupForm::pgsp(2 * n));
        }
        for n in 4..=max_rank as u64 {
            out.extend(GroupForm::spin(2 * n));
            out.extend(GroupForm::so(2 * n));
            out.extend(GroupForm::pgo(2 * n));
            out.extend(GroupForm::half_spin(2 * n));
        }
        for name in ["G2", "F4", "E6sc", "E6ad", "E7sc", "E7ad", "E8"] {
            let f: GroupForm = name.parse().unwrap();
            if f.base.rank() <= max_rank {
                out.push(f);
            }
        }
        out
    }

    /// Primes with a nontrivial row, ascending.
    pub fn torsion_primes(&self) -> Vec<u64> {
        let candidates: Vec<u64> = match self.isogeny {
            Isogeny::SLmodMu(m) => prime_factors(m),
            _ => vec![2, 3, 5],
        };
        candidates
            .into_iter()
            .filter(|&p| self.torsion_data(p).map(|t| t.r() > 0).unwrap_or(false))
            .collect()
    }

    /// The numbers `r`, `d_i`, `k_i` for this form at the prime `p`.
    pub fn torsion_data(&self, p: u64) -> Result<TorsionData> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let n = self.base.rank() as u64;
        let empty = TorsionData { p, d: vec![], k: vec![] };
        let single = |d: u64, k: u32| TorsionData { p, d: vec![d], k: vec![k] };
        let data = match (self.base.series(), self.isogeny) {
            (Series::A, Isogeny::SLmodMu(m)) => {
                if m % p == 0 {
                    single(1, valuation(n + 1, p))
                } else {
                    empty
                }
            }
            (Series::C, Isogeny::PGSp) if p == 2 => single(1, valuation(2 * n, 2)),
            (Series::B | Series::D, iso) if p == 2 => {
                let size = if self.base.series() == Series::B { 2 * n + 1 } else { 2 * n };
                orthogonal_row(iso, size)
            }
            (Series::G, _) if p == 2 => single(3, 1),
            (Series::F, _) => match p {
                2 => single(3, 1),
                3 => single(4, 1),
                _ => empty,
            },
            (Series::E, iso) => match (n, iso, p) {
                (6, _, 2) => single(3, 1),
                (6, Isogeny::SimplyConnected, 3) => single(4, 1),
                (6, _, 3) => TorsionData { p, d: vec![1, 4], k: vec![2, 1] },
                (7, Isogeny::SimplyConnected, 2) => TorsionData { p, d: vec![3, 5, 9], k: vec![1, 1, 1] },
                (7, _, 2) => TorsionData { p, d: vec![1, 3, 5, 9], k: vec![1, 1, 1, 1] },
                (7, _, 3) => single(4, 1),
                (8, _, 2) => TorsionData { p, d: vec![3, 5, 9, 15], k: vec![3, 2, 1, 1] },
                (8, _, 3) => TorsionData { p, d: vec![4, 10], k: vec![1, 1] },
                (8, _, 5) => single(6, 1),
                _ => empty,
            },
            _ => empty,
        };
        Ok(data)
    }

    /// Inequalities on `(j_1, ..., j_r)` for this form at `p`.
    pub fn constraint_rules(&self, p: u64) -> Result<Vec<ConstraintRule>> {
        let data = self.torsion_data(p)?;
        let r = data.r();
        if r == 0 {
            return Ok(vec![]);
        }
        let chain = |from: usize, to: usize| -> Vec<ConstraintRule> {
            (from..to).map(|i| ConstraintRule::AtLeast { i, l: 1, gate: None }).collect()
        };
        let rules = match (self.base.series(), self.isogeny) {
            (Series::E, iso) => match (self.base.rank(), iso, p) {
                (7, Isogeny::SimplyConnected, 2) => chain(1, 3),
                (7, _, 2) => chain(2, 4),
                (8, _, 2) => {
                    let mut v = chain(1, 3);
                    v.push(ConstraintRule::AtMost { i: 1, target: 2, offset: 1 });
                    v.push(ConstraintRule::AtMost { i: 2, target: 3, offset: 1 });
                    v
                }
                (8, _, 3) => chain(1, 2),
                _ => vec![],
            },
            (Series::B | Series::D, iso) if p == 2 => {
                // (binomial top = i + shift, first index, LE target = 2i + target_shift)
                let (shift, first, target_shift): (i64, usize, i64) = match iso {
                    Isogeny::SO => (-1, 1, -1),
                    Isogeny::Spin => (0, 1, 0),
                    Isogeny::PGO => (-2, 2, -2),
                    Isogeny::HalfSpin => (-1, 1, -1),
                    _ => return Ok(vec![]),
                };
                let mut v = Vec::new();
                for i in first..=r {
                    for l in 1..=r - i {
                        let top = (i as i64 + shift) as u64;
                        v.push(ConstraintRule::AtLeast { i, l, gate: Some(BinomialGate { n: top, m: l as u64 }) });
                    }
                }
                for i in first..=r {
                    let target = (2 * i as i64 + target_shift) as usize;
                    if target != i && target <= r {
                        v.push(ConstraintRule::AtMost { i, target, offset: 1 });
                    }
                }
                v
            }
            _ => vec![],
        };
        Ok(rules)
    }
}

/// Generator data of the orthogonal rows, by group and matrix size.
fn orthogonal_row(iso: Isogeny, size: u64) -> TorsionData {
    let p = 2;
    match iso {
        Isogeny::SO => TorsionData::orthogonal(size),
        Isogeny::Spin => {
            let r = size.saturating_sub(3) / 4;
            let d: Vec<u64> = (1..=r).map(|i| 2 * i + 1).collect();
            let k = d.iter().map(|&d| floor_log2_ratio(size - 1, d)).collect();
            TorsionData { p, d, k }
        }
        Isogeny::PGO | Isogeny::HalfSpin => {
            let n = size / 2;
            let (r, odd) = if iso == Isogeny::PGO { ((n + 2) / 2, 3) } else { (n / 2, 1) };
            let mut d = vec![1];
            let mut k = vec![valuation(n, 2)];
            for i in 2..=r {
                let di = 2 * i - odd;
                d.push(di);
                k.push(floor_log2_ratio(2 * n - 1, di));
            }
            TorsionData { p, d, k }
        }
        _ => TorsionData { p, d: vec![], k: vec![] },
    }
}

impl fmt::Display for GroupForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.base.rank() as u64;
        match (self.base.series(), self.isogeny) {
            (Series::A, Isogeny::SLmodMu(1)) => write!(f, "SL{}", n + 1),
            (Series::A, Isogeny::SLmodMu(m)) if m == n + 1 => write!(f, "PGL{}", n + 1),
            (Series::A, Isogeny::SLmodMu(m)) => write!(f, "SL{}/mu{m}", n + 1),
            (Series::B, Isogeny::Spin) => write!(f, "Spin{}", 2 * n + 1),
            (Series::B, _) => write!(f, "SO{}", 2 * n + 1),
            (Series::C, Isogeny::PGSp) => write!(f, "PGSp{}", 2 * n),
            (Series::C, _) => write!(f, "Sp{}", 2 * n),
            (Series::D, Isogeny::Spin) => write!(f, "Spin{}", 2 * n),
            (Series::D, Isogeny::SO) => write!(f, "SO{}", 2 * n),
            (Series::D, Isogeny::PGO) => write!(f, "PGO{}", 2 * n),
            (Series::D, _) => write!(f, "HSpin{}", 2 * n),
            (Series::E, Isogeny::SimplyConnected) if n < 8 => write!(f, "{}sc", self.base),
            (Series::E, Isogeny::Adjoint) => write!(f, "{}ad", self.base),
            _ => write!(f, "{}", self.base),
        }
    }
}

impl FromStr for GroupForm {
    type Err = Error;

    /// Accepts classical group names (`SL4/mu2`, `PGL3`, `Spin7`, `SO8`,
    /// `PGO10`, `HSpin8`, `Sp6`, `PGSp6`), exceptional names (`G2`, `F4`,
    /// `E8`, `E6sc`, `E7ad`, ...) and `<Dynkin type><sc|ad>` such as `A3ad`.
    fn from_str(s: &str) -> Result<Self> {
        let raw = s.trim();
        let lower = raw.to_ascii_lowercase();
        let err = || Error::Parse(format!("unknown group form `{raw}`"));
        let num = |t: &str| t.parse::<u64>().map_err(|_| err());
        if let Some(rest) = lower.strip_prefix("hspin") {
            return GroupForm::half_spin(num(rest)?);
        }
        if let Some(rest) = lower.strip_prefix("spin") {
            return GroupForm::spin(num(rest)?);
        }
        if let Some(rest) = lower.strip_prefix("so") {
            return GroupForm::so(num(rest)?);
        }
        if let Some(rest) = lower.strip_prefix("pgsp") {
            return GroupForm::pgsp(num(rest)?);
        }
        if let Some(rest) = lower.strip_prefix("pgo") {
            return GroupForm::pgo(num(rest)?);
        }
        if let Some(rest) = lower.strip_prefix("pgl") {
            let n = num(rest)?;
            return GroupForm::sl_mod_mu(n, n);
        }
        if let Some(rest) = lower.strip_prefix("sp") {
            return GroupForm::sp(num(rest)?);
        }
        if let Some(rest) = lower.strip_prefix("sl") {
            return match rest.split_once("/mu") {
                Some((n, m)) => GroupForm::sl_mod_mu(num(n)?, num(m)?),
                None => GroupForm::sl_mod_mu(num(rest)?, 1),
            };
        }
        let (ty, iso) = if let Some(t) = lower.strip_suffix("sc") {
            (t, Some(Isogeny::SimplyConnected))
        } else if let Some(t) = lower.strip_suffix("ad") {
            (t, Some(Isogeny::Adjoint))
        } else {
            (lower.as_str(), None)
        };
        let ty: DynkinType = ty.parse().map_err(|_| err())?;
        let iso = match (iso, ty.series()) {
            (Some(i), _) => i,
            (None, Series::G | Series::F) => Isogeny::SimplyConnected,
            (None, Series::E) if ty.rank() == 8 => Isogeny::SimplyConnected,
            _ => return Err(Error::Parse(format!("`{raw}` needs an isogeny suffix (sc or ad)"))),
        };
        GroupForm::new(ty, iso)
    }
}

impl Serialize for GroupForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Generator data `(p; d_1..d_r; k_1..k_r)` of the truncated Chow ring
/// `(Z/p)[x_1..x_r] / (x_i^{p^{k_i}})` with `deg x_i = d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorsionData {
    pub p: u64,
    pub d: Vec<u64>,
    pub k: Vec<u32>,
}

impl TorsionData {
    /// Validating constructor for hand-built contexts.
    pub fn new(p: u64, d: Vec<u64>, k: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d.len() != k.len() {
            return Err(Error::LengthMismatch { left: d.len(), right: k.len() });
        }
        if let Some(bad) = d.iter().find(|&&di| di == 0 || di % p == 0) {
            return Err(Error::ContextMismatch(format!("codimension {bad} is not coprime to {p}")));
        }
        if d.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::ContextMismatch("codimensions must be nondecreasing".into()));
        }
        Ok(TorsionData { p, d, k })
    }

    /// The row of `SO_n` for any `n >= 3`: `r = [(n+1)/4]`, `d_i = 2i - 1`,
    /// `k_i = [log2((n-1)/(2i-1))]`.
    pub fn orthogonal(n: u64) -> Self {
        let r = (n + 1) / 4;
        let d: Vec<u64> = (1..=r).map(|i| 2 * i - 1).collect();
        let k = d.iter().map(|&d| floor_log2_ratio(n - 1, d)).collect();
        TorsionData { p: 2, d, k }
    }

    pub fn r(&self) -> usize {
        self.d.len()
    }

    /// `p^{k_i}`, the truncation bound of each variable.
    pub fn bounds(&self) -> Vec<u64> {
        self.k.iter().map(|&k| self.p.pow(k)).collect()
    }

    /// `|K| = sum k_i`.
    pub fn k_total(&self) -> u32 {
        self.k.iter().sum()
    }

    /// The p-exceptional degrees `d_i p^{k_i}`.
    pub fn exceptional_degrees(&self) -> Vec<u64> {
        self.d.iter().zip(self.bounds()).map(|(d, b)| d * b).collect()
    }
}

/// `C(n, m) mod p`, nonzero when the gate is open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinomialGate {
    pub n: u64,
    pub m: u64,
}

impl BinomialGate {
    pub fn is_open(&self, p: u64) -> bool {
        lucas_binom(self.n, self.m, p) != 0
    }
}

/// One inequality between entries of a J-invariant; indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConstraintRule {
    /// `j_i >= j_{i+l}`, enforced only when the gate (if any) is open.
    #[serde(rename = "GE")]
    AtLeast { i: usize, l: usize, gate: Option<BinomialGate> },
    /// `j_i <= j_target + offset`.
    #[serde(rename = "LE")]
    AtMost { i: usize, target: usize, offset: u32 },
}

impl ConstraintRule {
    /// Largest index the rule mentions.
    pub fn max_index(&self) -> usize {
        match *self {
            ConstraintRule::AtLeast { i, l, .. } => i + l,
            ConstraintRule::AtMost { i, target, .. } => i.max(target),
        }
    }

    pub fn min_index(&self) -> usize {
        match *self {
            ConstraintRule::AtLeast { i, .. } => i,
            ConstraintRule::AtMost { i, target, .. } => i.min(target),
        }
    }

    /// Evaluates the rule on `j` (0-based slice, 1-based rule indices).
    pub fn holds(&self, j: &[u32], p: u64) -> bool {
        match *self {
            ConstraintRule::AtLeast { i, l, gate } => {
                if gate.is_some_and(|g| !g.is_open(p)) {
                    return true;
                }
                j[i - 1] >= j[i + l - 1]
            }
            ConstraintRule::AtMost { i, target, offset } => j[i - 1] <= j[target - 1] + offset,
        }
    }
}

impl fmt::Display for ConstraintRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintRule::AtLeast { i, l, gate: None } => write!(f, "j{i} >= j{}", i + l),
            ConstraintRule::AtLeast { i, l, gate: Some(g) } => {
                write!(f, "j{i} >= j{} if C({},{}) != 0 mod p", i + l, g.n, g.m)
            }
            ConstraintRule::AtMost { i, target, offset } => write!(f, "j{i} <= j{target} + {offset}"),
        }
    }
}

/// One row of the expanded table, as emitted by the `table dump` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub form: GroupForm,
    pub p: u64,
    pub r: usize,
    pub d: Vec<u64>,
    pub k: Vec<u32>,
    pub rules: Vec<ConstraintRule>,
}

impl TableEntry {
    pub fn new(form: GroupForm, p: u64) -> Result<Self> {
        let data = form.torsion_data(p)?;
        Ok(TableEntry {
            form,
            p,
            r: data.r(),
            rules: form.constraint_rules(p)?,
            d: data.d,
            k: data.k,
        })
    }
}

/// Every `(form, torsion prime)` row up to the given rank.
pub fn dump_table(max_rank: usize) -> Vec<TableEntry> {
    GroupForm::all_up_to_rank(max_rank)
        .into_iter()
        .flat_map(|form| {
            form.torsion_primes()
                .into_iter()
                .map(move |p| TableEntry::new(form, p).expect("torsion primes are prime"))
        })
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// Distinct prime divisors, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// p-adic valuation of `n > 0`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// `floor(log2(num / den))` for `num >= den > 0`: the largest `k` with
/// `den * 2^k <= num`.
fn floor_log2_ratio(num: u64, den: u64) -> u32 {
    let mut k = 0;
    while den << (k + 1) <= num {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: &str) -> GroupForm {
        s.parse().unwrap()
    }

    #[test]
    fn torsion_prime_lists() {
        assert_eq!(form("F4").torsion_primes(), vec![2, 3]);
        assert_eq!(form("E8").torsion_primes(), vec![2, 3, 5]);
        assert_eq!(form("SL3").torsion_primes(), Vec::<u64>::new());
        assert_eq!(form("PGL6").torsion_primes(), vec![2, 3]);
        assert_eq!(form("G2").torsion_primes(), vec![2]);
        assert_eq!(form("Spin5").torsion_primes(), Vec::<u64>::new());
        assert_eq!(form("Sp6").torsion_primes(), Vec::<u64>::new());
    }

    #[test]
    fn exceptional_rows() {
        let e8_5 = form("E8").torsion_data(5).unwrap();
        assert_eq!((e8_5.r(), e8_5.d.clone(), e8_5.k.clone()), (1, vec![6], vec![1]));
        let e8_2 = form("E8").torsion_data(2).unwrap();
        assert_eq!((e8_2.d.clone(), e8_2.k.clone()), (vec![3, 5, 9, 15], vec![3, 2, 1, 1]));
        let e6ad = form("E6ad").torsion_data(3).unwrap();
        assert_eq!((e6ad.d.clone(), e6ad.k.clone()), (vec![1, 4], vec![2, 1]));
        assert_eq!(form("E6sc").torsion_data(3).unwrap().d, vec![4]);
        assert_eq!(form("E7ad").torsion_data(2).unwrap().d, vec![1, 3, 5, 9]);
        assert_eq!(form("E7sc").torsion_data(5).unwrap().r(), 0);
    }

    #[test]
    fn parametric_rows() {
        let spin7 = form("Spin7").torsion_data(2).unwrap();
        assert_eq!((spin7.d.clone(), spin7.k.clone()), (vec![3], vec![1]));
        // SO_8 and the half-spin group of D4 agree (triality).
        assert_eq!(form("SO8").torsion_data(2).unwrap().d, vec![1, 3]);
        assert_eq!(form("SO8").torsion_data(2).unwrap().k, vec![2, 1]);
        assert_eq!(form("HSpin8").torsion_data(2).unwrap().k, vec![2, 1]);
        let pgo10 = form("PGO10").torsion_data(2).unwrap();
        assert_eq!((pgo10.d.clone(), pgo10.k.clone()), (vec![1, 1, 3], vec![0, 3, 1]));
        assert_eq!(form("PGSp12").torsion_data(2).unwrap().k, vec![2]);
        assert_eq!(form("SL12/mu6").torsion_data(2).unwrap().k, vec![2]);
        assert_eq!(form("SL12/mu6").torsion_data(3).unwrap().k, vec![1]);
        assert_eq!(form("SL12/mu6").torsion_data(5).unwrap().r(), 0);
    }

    #[test]
    fn low_rank_coincidences_agree() {
        // B2 = C2 and D3 = A3.
        assert_eq!(form("SO5").torsion_data(2).unwrap().k, form("PGSp4").torsion_data(2).unwrap().k);
        assert_eq!(form("SO6"), form("SL4/mu2"));
        assert_eq!(form("PGO6"), form("PGL4"));
        assert_eq!(form("Spin6"), form("SL4"));
        assert_eq!(TorsionData::orthogonal(6).k, form("SL4/mu2").torsion_data(2).unwrap().k);
    }

    #[test]
    fn exceptional_rule_lists() {
        use ConstraintRule::*;
        assert_eq!(
            form("E7sc").constraint_rules(2).unwrap(),
            vec![AtLeast { i: 1, l: 1, gate: None }, AtLeast { i: 2, l: 1, gate: None }]
        );
        assert_eq!(
            form("E8").constraint_rules(2).unwrap(),
            vec![
                AtLeast { i: 1, l: 1, gate: None },
                AtLeast { i: 2, l: 1, gate: None },
                AtMost { i: 1, target: 2, offset: 1 },
                AtMost { i: 2, target: 3, offset: 1 },
            ]
        );
        assert!(form("F4").constraint_rules(3).unwrap().is_empty());
        assert!(form("E6ad").constraint_rules(3).unwrap().is_empty());
    }

    #[test]
    fn spin_rules_have_binomial_gates() {
        // Spin_23: r = 5, d = 3,5,7,9,11.
        let rules = form("Spin23").constraint_rules(2).unwrap();
        assert!(rules.contains(&ConstraintRule::AtLeast { i: 1, l: 1, gate: Some(BinomialGate { n: 1, m: 1 }) }));
        assert!(rules.contains(&ConstraintRule::AtMost { i: 2, target: 4, offset: 1 }));
        assert!(rules.iter().all(|r| r.max_index() <= 5 && r.min_index() >= 1));
    }

    #[test]
    fn form_names_roundtrip() {
        for f in GroupForm::all_up_to_rank(8) {
            assert_eq!(f.to_string().parse::<GroupForm>().unwrap(), f, "{f}");
        }
        assert_eq!(form("A3ad"), form("PGL4"));
        assert_eq!(form("B3sc"), form("Spin7"));
        assert_eq!(form("D5ad"), form("PGO10"));
        assert!("E7".parse::<GroupForm>().is_err());
        assert!("HSpin10".parse::<GroupForm>().is_err());
        assert!("SL6/mu4".parse::<GroupForm>().is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(form("E8").torsion_data(4), Err(Error::NotPrime(4))));
        assert!(GroupForm::new("A3".parse().unwrap(), Isogeny::PGO).is_err());
        assert!(GroupForm::new("C3".parse().unwrap(), Isogeny::SO).is_err());
    }

    #[test]
    fn helpers() {
        assert_eq!(floor_log2_ratio(6, 3), 1);
        assert_eq!(floor_log2_ratio(22, 3), 2);
        assert_eq!(floor_log2_ratio(5, 5), 0);
        assert_eq!(valuation(48, 2), 4);
        assert_eq!(prime_factors(60), vec![2, 3, 5]);
        assert!(is_prime(97) && !is_prime(91) && !is_prime(1));
    }
}
