#![allow(dead_code)]

use jmotive::jinvariant::enumerate_admissible;
use jmotive::root_data::is_generically_split;
use jmotive::{GroupForm, Isogeny, JInvariant, ParabolicSubset, Splitting, TitsData};

/// Tits data that a group with this J-invariant can actually have.
///
/// Rows whose first generator has codimension 1 and comes from the centre
/// see the Tits algebra: its p-primary index is `p^{j_1}`. A nontrivial J
/// forces every splitting field to have degree divisible by `p`, and
/// `p^{sum j}` is the smallest such degree compatible with the torsion
/// index bound.
pub fn consistent_tits(form: &GroupForm, j: &JInvariant) -> TitsData {
    let data = form.torsion_data(j.p).unwrap();
    let central = data.d[0] == 1 && !matches!(form.isogeny(), Isogeny::SO | Isogeny::Spin);
    let d = if central { j.p.pow(j.j[0]) } else { 1 };
    TitsData::new(d, j.p.pow(j.total()))
}

/// Every `(form, p, J)` with `form` a table row of rank at most 8.
pub fn admissible_rows() -> Vec<(GroupForm, u64, Vec<JInvariant>)> {
    GroupForm::all_up_to_rank(8)
        .into_iter()
        .flat_map(|form| {
            form.torsion_primes()
                .into_iter()
                .map(move |p| (form, p, enumerate_admissible(&form, p).unwrap()))
        })
        .collect()
}

/// `(form, p, J, theta)` with `X_theta` generically split for the given Tits data.
pub fn split_cases(tits: impl Fn(&GroupForm, &JInvariant) -> TitsData) -> Vec<(GroupForm, u64, JInvariant, ParabolicSubset)> {
    let mut out = Vec::new();
    for (form, p, js) in admissible_rows() {
        let ty = form.base();
        for theta in ParabolicSubset::all(&ty) {
            for j in &js {
                if is_generically_split(&form, &theta, tits(&form, j)).unwrap() == Splitting::Yes {
                    out.push((form, p, j.clone(), theta.clone()));
                }
            }
        }
    }
    out
}
