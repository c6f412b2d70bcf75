//! Candidate J-invariant values: admissibility, enumeration, and the
//! Steenrod-derived upper bounds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kac_table::{ConstraintRule, GroupForm, TorsionData};

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1_000_000;

/// `J = (j_1, ..., j_r)` modulo `p`, with `0 <= j_i <= k_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JInvariant {
    pub p: u64,
    pub j: Vec<u32>,
}

impl JInvariant {
    /// Checks `j` against the bounds of `data`.
    pub fn new(data: &TorsionData, j: Vec<u32>) -> Result<Self> {
        let out = JInvariant { p: data.p, j };
        out.check_context(data)?;
        Ok(out)
    }

    /// `(0, ..., 0)`.
    pub fn zero(data: &TorsionData) -> Self {
        JInvariant { p: data.p, j: vec![0; data.r()] }
    }

    /// `(k_1, ..., k_r)`, the largest value the bounds allow.
    pub fn maximal(data: &TorsionData) -> Self {
        JInvariant { p: data.p, j: data.k.clone() }
    }

    pub fn values(&self) -> &[u32] {
        &self.j
    }

    pub fn r(&self) -> usize {
        self.j.len()
    }

    /// `sum j_i`.
    pub fn total(&self) -> u32 {
        self.j.iter().sum()
    }

    /// Fails unless `self` has the prime and length of `data` and lies in its box.
    pub fn check_context(&self, data: &TorsionData) -> Result<()> {
        if self.p != data.p {
            return Err(Error::ContextMismatch(format!("J is taken mod {}, the ring mod {}", self.p, data.p)));
        }
        if self.j.len() != data.r() {
            return Err(Error::ContextMismatch(format!(
                "J has {} entries, the ring has {} generators",
                self.j.len(),
                data.r()
            )));
        }
        if let Some((i, (j, k))) = self.j.iter().zip(&data.k).enumerate().find(|(_, (j, k))| j > k) {
            return Err(Error::InvalidJInvariant(format!("j{} = {j} exceeds k{} = {k}", i + 1, i + 1)));
        }
        Ok(())
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &JInvariant) -> Result<bool> {
        if self.p != other.p || self.j.len() != other.j.len() {
            return Err(Error::ContextMismatch(format!("cannot compare {self} with {other}")));
        }
        Ok(self.j.iter().zip(&other.j).all(|(a, b)| a <= b))
    }
}

impl fmt::Display for JInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.j.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// True iff `j` satisfies every rule of the table row of `(form, j.p)`.
pub fn is_admissible(j: &JInvariant, form: &GroupForm) -> Result<bool> {
    let data = form.torsion_data(j.p)?;
    j.check_context(&data)?;
    let rules = form.constraint_rules(j.p)?;
    Ok(rules.iter().all(|rule| rule.holds(&j.j, j.p)))
}

/// All admissible values in lexicographic order, with the default budget.
pub fn enumerate_admissible(form: &GroupForm, p: u64) -> Result<Vec<JInvariant>> {
    enumerate_admissible_with_budget(form, p, DEFAULT_ENUMERATION_BUDGET)
}

/// Scans the box `prod [0, k_i]`; fails if it holds more than `budget` points.
pub fn enumerate_admissible_with_budget(form: &GroupForm, p: u64, budget: u128) -> Result<Vec<JInvariant>> {
    let data = form.torsion_data(p)?;
    let rules = form.constraint_rules(p)?;
    let needed: u128 = data.k.iter().map(|&k| k as u128 + 1).product();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    let mut j = vec![0u32; data.r()];
    loop {
        if rules.iter().all(|rule| rule.holds(&j, p)) {
            out.push(JInvariant { p, j: j.clone() });
        }
        // Odometer with the last entry running fastest gives lexicographic order.
        let Some(pos) = (0..j.len()).rev().find(|&i| j[i] < data.k[i]) else {
            break;
        };
        j[pos] += 1;
        j[pos + 1..].iter_mut().for_each(|x| *x = 0);
    }
    Ok(out)
}

/// The bound `j_m <= j_i + s` obtained from a reduced power operation
/// sending `x_i` to `x_m^{p^s}` plus lower terms, for a ring with `r`
/// generators.
pub fn apply_steenrod_rule(i: usize, s: u32, m: usize, r: usize) -> Result<ConstraintRule> {
    for idx in [i, m] {
        if idx == 0 || idx > r {
            return Err(Error::IndexOutOfRange { index: idx, rank: r });
        }
    }
    Ok(ConstraintRule::AtMost { i: m, target: i, offset: s })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: &str) -> GroupForm {
        s.parse().unwrap()
    }

    fn j(p: u64, v: &[u32]) -> JInvariant {
        JInvariant { p, j: v.to_vec() }
    }

    #[test]
    fn leq_examples() {
        assert!(j(2, &[0, 0]).leq(&j(2, &[1, 1])).unwrap());
        assert!(!j(2, &[1, 0]).leq(&j(2, &[0, 1])).unwrap());
        assert!(j(2, &[1]).leq(&j(3, &[1])).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let e7 = form("E7sc");
        assert!(is_admissible(&j(2, &[1, 1, 0]), &e7).unwrap());
        assert!(!is_admissible(&j(2, &[0, 1, 1]), &e7).unwrap());
        assert!(!is_admissible(&j(2, &[3, 1, 1, 1]), &form("E8")).unwrap());
        assert!(is_admissible(&j(2, &[3, 2, 1, 1]), &form("E8")).unwrap());
        assert!(matches!(is_admissible(&j(2, &[2, 0, 0]), &e7), Err(Error::InvalidJInvariant(_))));
        assert!(matches!(is_admissible(&j(3, &[0, 0, 0]), &e7), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn enumeration_examples() {
        let vals = |f: &str, p: u64| -> Vec<Vec<u32>> {
            enumerate_admissible(&form(f), p).unwrap().into_iter().map(|j| j.j).collect()
        };
        assert_eq!(vals("E8", 5), vec![vec![0], vec![1]]);
        assert_eq!(vals("F4", 3), vec![vec![0], vec![1]]);
        assert_eq!(vals("E7sc", 2), vec![vec![0, 0, 0], vec![1, 0, 0], vec![1, 1, 0], vec![1, 1, 1]]);
    }

    #[test]
    fn enumeration_respects_budget() {
        let err = enumerate_admissible_with_budget(&form("E8"), 2, 10).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { needed: 4 * 3 * 2 * 2, budget: 10 });
    }

    #[test]
    fn steenrod_rule() {
        let rule = apply_steenrod_rule(1, 1, 2, 4).unwrap();
        assert_eq!(rule, ConstraintRule::AtMost { i: 2, target: 1, offset: 1 });
        let taut = apply_steenrod_rule(3, 0, 3, 3).unwrap();
        assert!(taut.holds(&[0, 5, 2], 2));
        assert!(matches!(apply_steenrod_rule(5, 0, 1, 4), Err(Error::IndexOutOfRange { index: 5, rank: 4 })));
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&j(2, &[1, 1, 0])).unwrap();
        assert_eq!(s, r#"{"p":2,"j":[1,1,0]}"#);
    }
}
