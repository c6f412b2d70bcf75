//! Dynkin diagrams, Weyl invariant degrees and Poincaré polynomials of
//! (partial) flag varieties.
//!
//! Vertices are numbered as in Bourbaki. In particular `E_n` has the chain
//! `1-3-4-5-...-n` with vertex 2 attached to vertex 4, and the double bond of
//! `F4` sits between vertices 2 and 3.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kac_table::GroupForm;
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }
}

/// A connected Dynkin diagram.
///
/// `D3` is stored as `A3`; the diagrams coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DynkinType {
    series: Series,
    rank: usize,
}

impl DynkinType {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let ok = match series {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            Series::D => rank >= 3,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        };
        if !ok {
            return Err(Error::InvalidDynkin(format!("{}{}", series.letter(), rank)));
        }
        if series == Series::D && rank == 3 {
            return Ok(DynkinType { series: Series::A, rank: 3 });
        }
        Ok(DynkinType { series, rank })
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Bonds `(i, j, multiplicity)` with `i < j`, 1-based vertices.
    pub fn bonds(&self) -> Vec<(usize, usize, u8)> {
        let n = self.rank;
        let chain = |len: usize| (1..len).map(|i| (i, i + 1, 1u8)).collect::<Vec<_>>();
        match self.series {
            Series::A => chain(n),
            Series::B | Series::C => {
                let mut b = chain(n);
                b.last_mut().unwrap().2 = 2;
                b
            }
            Series::D => {
                let mut b = chain(n - 1);
                b.push((n - 2, n, 1));
                b
            }
            Series::E => {
                let mut b = vec![(1, 3, 1), (2, 4, 1)];
                b.extend((3..n).map(|i| (i, i + 1, 1)));
                b
            }
            Series::F => vec![(1, 2, 1), (2, 3, 2), (3, 4, 1)],
            Series::G => vec![(1, 2, 3)],
        }
    }

    /// Degrees of the basic polynomial invariants of the Weyl group, ascending.
    pub fn weyl_degrees(&self) -> Vec<u64> {
        let n = self.rank as u64;
        let mut d: Vec<u64> = match self.series {
            Series::A => (2..=n + 1).collect(),
            Series::B | Series::C => (1..=n).map(|i| 2 * i).collect(),
            Series::D => (1..n).map(|i| 2 * i).chain(std::iter::once(n)).collect(),
            Series::E => match n {
                6 => vec![2, 5, 6, 8, 9, 12],
                7 => vec![2, 6, 8, 10, 12, 14, 18],
                _ => vec![2, 8, 12, 14, 18, 20, 24, 30],
            },
            Series::F => vec![2, 6, 8, 12],
            Series::G => vec![2, 6],
        };
        d.sort_unstable();
        d
    }

    /// Order of the Weyl group from the closed formula of each series.
    pub fn weyl_group_order(&self) -> u128 {
        let n = self.rank as u128;
        let fact = |k: u128| (1..=k).product::<u128>();
        match self.series {
            Series::A => fact(n + 1),
            Series::B | Series::C => (1u128 << n) * fact(n),
            Series::D => (1u128 << (n - 1)) * fact(n),
            Series::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Series::F => 1152,
            Series::G => 12,
        }
    }

    pub fn positive_root_count(&self) -> u64 {
        self.weyl_degrees().iter().map(|d| d - 1).sum()
    }

    /// Checks the embedded degree table against the Weyl order formula.
    pub fn self_check(&self) -> Result<()> {
        let prod: u128 = self.weyl_degrees().iter().map(|&d| d as u128).product();
        if prod != self.weyl_group_order() {
            return Err(Error::InternalInconsistency(format!(
                "degrees of {self} multiply to {prod}, Weyl order is {}",
                self.weyl_group_order()
            )));
        }
        Ok(())
    }

    /// Poincaré polynomial of the complete flag variety: `prod_i [d_i]_t`.
    pub fn poincare_complete_flag(&self) -> Poly {
        self.weyl_degrees().iter().map(|&d| Poly::q_integer(d as usize)).product()
    }

    /// Poincaré polynomial of `G/P_theta`: the flag polynomial divided by the
    /// Weyl polynomials of the connected components of `theta`.
    pub fn poincare_homogeneous(&self, theta: &ParabolicSubset) -> Result<Poly> {
        theta.check_rank(self)?;
        let levi: Poly = theta
            .components(self)
            .iter()
            .map(|c| c.poincare_complete_flag())
            .product();
        let full = self.poincare_complete_flag();
        let q = full.div_exact(&levi).map_err(|e| {
            Error::InternalInconsistency(format!("Levi quotient for {self}, {theta}: {e}"))
        })?;
        if !q.is_nonnegative() {
            return Err(Error::InternalInconsistency(format!(
                "negative Poincaré coefficient for {self}, {theta}"
            )));
        }
        Ok(q)
    }

    /// Identifies the connected diagram spanned by `vertices`.
    fn classify_component(&self, vertices: &BTreeSet<usize>) -> DynkinType {
        let bonds: Vec<_> = self
            .bonds()
            .into_iter()
            .filter(|(i, j, _)| vertices.contains(i) && vertices.contains(j))
            .collect();
        let size = vertices.len();
        let valence = |v: usize| bonds.iter().filter(|(i, j, _)| *i == v || *j == v).count();
        let make = |s, r| DynkinType::new(s, r).expect("component of a valid diagram");
        if bonds.iter().any(|b| b.2 == 3) {
            return make(Series::G, 2);
        }
        if let Some(&(i, j, _)) = bonds.iter().find(|b| b.2 == 2) {
            if size == 4 && valence(i) == 2 && valence(j) == 2 {
                return make(Series::F, 4);
            }
            // B_k and C_k share their Weyl group; the distinction is irrelevant here.
            return make(Series::B, size.max(2));
        }
        let Some(branch) = vertices.iter().copied().find(|&v| valence(v) == 3) else {
            return make(Series::A, size);
        };
        let mut arms: Vec<usize> = bonds
            .iter()
            .filter_map(|&(i, j, _)| match (i == branch, j == branch) {
                (true, _) => Some(j),
                (_, true) => Some(i),
                _ => None,
            })
            .map(|start| {
                let mut len = 1;
                let (mut prev, mut cur) = (branch, start);
                while let Some(next) = bonds.iter().find_map(|&(i, j, _)| {
                    if i == cur && j != prev {
                        Some(j)
                    } else if j == cur && i != prev {
                        Some(i)
                    } else {
                        None
                    }
                }) {
                    prev = cur;
                    cur = next;
                    len += 1;
                }
                len
            })
            .collect();
        arms.sort_unstable();
        match arms.as_slice() {
            [1, 1, c] => make(Series::D, c + 3),
            [1, 2, c] => make(Series::E, c + 4),
            _ => unreachable!("no other branched diagrams are induced from finite types"),
        }
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

impl FromStr for DynkinType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let series = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Series::A,
            Some('B') => Series::B,
            Some('C') => Series::C,
            Some('D') => Series::D,
            Some('E') => Series::E,
            Some('F') => Series::F,
            Some('G') => Series::G,
            _ => return Err(Error::Parse(format!("bad Dynkin type `{s}`"))),
        };
        let rank = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad Dynkin rank in `{s}`")))?;
        DynkinType::new(series, rank)
    }
}

impl TryFrom<String> for DynkinType {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DynkinType> for String {
    fn from(t: DynkinType) -> String {
        t.to_string()
    }
}

/// A subset `theta` of the vertices of a Dynkin diagram; the standard
/// parabolic `P_theta`. The empty subset is the Borel subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParabolicSubset {
    rank: usize,
    theta: BTreeSet<usize>,
}

impl ParabolicSubset {
    pub fn new(ty: &DynkinType, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let theta: BTreeSet<usize> = vertices.into_iter().collect();
        if let Some(&bad) = theta.iter().find(|&&v| v == 0 || v > ty.rank()) {
            return Err(Error::InvalidParabolic(format!("vertex {bad} not in 1..={}", ty.rank())));
        }
        Ok(ParabolicSubset { rank: ty.rank(), theta })
    }

    pub fn borel(ty: &DynkinType) -> Self {
        ParabolicSubset { rank: ty.rank(), theta: BTreeSet::new() }
    }

    pub fn full(ty: &DynkinType) -> Self {
        ParabolicSubset { rank: ty.rank(), theta: (1..=ty.rank()).collect() }
    }

    /// `theta` given by the vertices *not* in it.
    pub fn complement_of(ty: &DynkinType, outside: impl IntoIterator<Item = usize>) -> Result<Self> {
        let outside: BTreeSet<usize> = outside.into_iter().collect();
        if let Some(&bad) = outside.iter().find(|&&v| v == 0 || v > ty.rank()) {
            return Err(Error::InvalidParabolic(format!("vertex {bad} not in 1..={}", ty.rank())));
        }
        Ok(ParabolicSubset {
            rank: ty.rank(),
            theta: (1..=ty.rank()).filter(|v| !outside.contains(v)).collect(),
        })
    }

    /// All `2^rank` subsets, in increasing bitmask order.
    pub fn all(ty: &DynkinType) -> impl Iterator<Item = ParabolicSubset> + '_ {
        let n = ty.rank();
        (0u64..1 << n).map(move |mask| ParabolicSubset {
            rank: n,
            theta: (1..=n).filter(|v| mask & (1 << (v - 1)) != 0).collect(),
        })
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.theta
    }

    pub fn complement(&self) -> BTreeSet<usize> {
        (1..=self.rank).filter(|v| !self.theta.contains(v)).collect()
    }

    fn check_rank(&self, ty: &DynkinType) -> Result<()> {
        if self.rank != ty.rank() {
            return Err(Error::InvalidParabolic(format!(
                "subset of a rank {} diagram used with {ty}",
                self.rank
            )));
        }
        Ok(())
    }

    /// Connected components of the induced subdiagram, each classified.
    pub fn components(&self, ty: &DynkinType) -> Vec<DynkinType> {
        let bonds = ty.bonds();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.theta {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &(i, j, _) in &bonds {
                    let w = if i == v { j } else if j == v { i } else { continue };
                    if self.theta.contains(&w) && seen.insert(w) {
                        comp.insert(w);
                        stack.push(w);
                    }
                }
            }
            out.push(ty.classify_component(&comp));
        }
        out
    }
}

impl fmt::Display for ParabolicSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.theta.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// Numeric data of a twisted form used to decide generic splitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitsData {
    /// Index of the Tits algebra (for type D: of the vector representation).
    pub tits_index: u64,
    /// Degree of a splitting field.
    pub splitting_degree: u64,
    /// Whether the cocycle comes from a Pfister form or a maximal neighbour.
    /// `None` leaves the Pfister rows undecided.
    pub pfister: Option<bool>,
}

impl TitsData {
    pub fn new(tits_index: u64, splitting_degree: u64) -> Self {
        TitsData { tits_index, splitting_degree, pfister: None }
    }

    pub fn with_pfister(mut self, pfister: bool) -> Self {
        self.pfister = Some(pfister);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Yes,
    No,
    Unknown,
}

/// Does `G` split over the function field of `X_theta`?
///
/// Sufficient vertex conditions for inner forms, after Tits indices: the
/// answer is `Yes` if some vertex outside `theta` meets the condition of the
/// group's row. The Pfister rows of types B and D depend on the cocycle, not
/// on the numbers in [`TitsData`]; without an explicit override they yield
/// `Unknown`.
pub fn is_generically_split(form: &GroupForm, theta: &ParabolicSubset, tits: TitsData) -> Result<Splitting> {
    let ty = form.base();
    theta.check_rank(&ty)?;
    let n = ty.rank();
    let d = tits.tits_index;
    let q = tits.splitting_degree;
    let listed = |k: usize| -> bool {
        match ty.series() {
            Series::A => (k as u64).gcd(&d) == 1,
            Series::B => k == n,
            Series::C => k % 2 == 1,
            Series::D => d == 1 && (k == n - 1 || k == n),
            Series::G => true,
            Series::F => k <= 3 || q == 3,
            Series::E => match n {
                6 => matches!(k, 3 | 5) || (d == 1 && matches!(k, 2 | 4)) || (q % 2 == 1 && matches!(k, 1 | 6)),
                7 => matches!(k, 2 | 5) || (d == 1 && matches!(k, 3 | 4)) || (q == 3 && k != 7),
                _ => matches!(k, 2..=5) || q == 5,
            },
        }
    };
    let outside = theta.complement();
    if outside.iter().any(|&k| listed(k)) {
        return Ok(Splitting::Yes);
    }
    let pfister_row = matches!(ty.series(), Series::B | Series::D);
    if pfister_row && !outside.is_empty() {
        return Ok(match tits.pfister {
            Some(true) => Splitting::Yes,
            Some(false) => Splitting::No,
            None => Splitting::Unknown,
        });
    }
    Ok(Splitting::No)
}
