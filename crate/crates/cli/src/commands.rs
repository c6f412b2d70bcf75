use std::fmt::Write as _;
use std::str::FromStr;

use jmotive::idempotent_lab::{
    lift_idempotent, lift_isomorphism_izvrat, lift_orthogonal_family, random_family, random_izvrat_instance, random_sl,
    sl_lift, IzvratInstance,
};
use jmotive::jinvariant::{enumerate_admissible_with_budget, is_admissible};
use jmotive::kac_table::{dump_table, prime_factors};
use jmotive::motive::{
    all_integral_decompositions, canonical_p_dimension, decompose, decompose_generically_split, rational_cycle_counts,
    rost_poincare, torsion_index_bound,
};
use jmotive::root_data::is_generically_split;
use jmotive::truncated_ring::j_from_subring;
use jmotive::{
    ConstraintRule, DynkinType, Error, GradedEndo, GroupForm, IntMatrix, IntegralDecomposition, JInvariant,
    ModMatrix, ParabolicSubset, Poly, TableEntry, TitsData, TorsionData, TruncatedRing,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{
    Command, FlagCmd, JinvCmd, LiftCmd, MatrixArgs, MotiveCmd, RandomArgs, RingCmd, RowArgs, TableCmd, ThetaArgs,
    TitsArgs,
};

/// Rendered result of a command in both output modes.
pub struct Report {
    pub json: String,
    pub text: String,
}

impl Report {
    fn new<T: Serialize>(value: &T, text: String) -> Result<Report, Failure> {
        let json = serde_json::to_string(value).map_err(|e| Failure::Domain(Error::InternalInconsistency(e.to_string())))?;
        Ok(Report { json, text })
    }
}

pub enum Failure {
    /// Malformed input; exit status 2.
    Usage(String),
    /// The calculation itself failed; exit status 1.
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Failure::Usage(msg),
            other => Failure::Domain(other),
        }
    }
}

type Outcome = Result<Report, Failure>;

/// `jinv check` result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub form: GroupForm,
    pub j: JInvariant,
    pub admissible: bool,
    pub violated: Vec<ConstraintRule>,
}

/// `ring j-from-gens` result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubringReport {
    pub j: JInvariant,
    pub subring_dimension: usize,
}

/// `lift family` result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Vec<ModMatrix>,
    pub lifted: Vec<ModMatrix>,
}

/// `lift idempotent` result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotentReport {
    pub input: ModMatrix,
    pub lifted: ModMatrix,
}

/// `lift izvrat` result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IzvratReport {
    pub instance: IzvratInstance,
    pub theta12: GradedEndo,
    pub theta21: GradedEndo,
}

/// `lift sl` result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlReport {
    pub input: ModMatrix,
    pub lift: IntMatrix,
}

/// Parses `p:a,b,c`.
pub fn parse_prime_list<T: FromStr>(s: &str) -> Result<(u64, Vec<T>), String> {
    let (p, rest) = s.split_once(':').ok_or_else(|| format!("expected `p:v1,v2,...`, found `{s}`"))?;
    let p = p.trim().parse().map_err(|_| format!("bad prime `{p}`"))?;
    let vals = rest
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("bad entry `{x}`")))
        .collect::<Result<_, _>>()?;
    Ok((p, vals))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn show_j(js: &[JInvariant]) -> String {
    js.iter().map(|j| format!("{j}\n")).collect()
}

fn row_data(row: &RowArgs) -> Result<TorsionData, Failure> {
    match &row.form {
        Some(form) => Ok(form.torsion_data(row.p)?),
        None if row.d.is_empty() => Err(usage("give --form or both --d and --k")),
        None => Ok(TorsionData::new(row.p, row.d.clone(), row.k.clone())?),
    }
}

fn theta_for(ty: &DynkinType, args: &ThetaArgs) -> Result<ParabolicSubset, Failure> {
    if args.outside.is_empty() {
        Ok(ParabolicSubset::new(ty, args.theta.iter().copied())?)
    } else {
        Ok(ParabolicSubset::complement_of(ty, args.outside.iter().copied())?)
    }
}

fn parse_rows(modulus: u64, rows: &str) -> Result<ModMatrix, Failure> {
    let size = rows.split(';').filter(|r| !r.trim().is_empty()).count();
    Ok(format!("mod {modulus} size {size}\n{rows}").parse::<ModMatrix>()?)
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}\n")).collect()
}

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Table(TableCmd::Dump { form, p, max_rank }) => table_dump(form.as_ref(), *p, *max_rank),
        Command::Jinv(c) => jinv(c),
        Command::Ring(RingCmd::JFromGens { row, gens }) => j_from_gens(row, gens),
        Command::Motive(c) => motive(c),
        Command::Lift(c) => lift(c),
        Command::Flag(c) => flag(c),
    }
}

fn entry_text(e: &TableEntry) -> String {
    let rules: Vec<String> = e.rules.iter().map(ToString::to_string).collect();
    let rules = if rules.is_empty() { "none".to_string() } else { rules.join("; ") };
    format!("{} p={}: r={} d={:?} k={:?} rules: {rules}\n", e.form, e.p, e.r, e.d, e.k)
}

fn table_dump(form: Option<&GroupForm>, p: Option<u64>, max_rank: usize) -> Outcome {
    match (form, p) {
        (Some(form), Some(p)) => {
            let entry = TableEntry::new(*form, p)?;
            Report::new(&entry, entry_text(&entry))
        }
        (Some(form), None) => {
            let entries: Vec<TableEntry> =
                form.torsion_primes().into_iter().map(|p| TableEntry::new(*form, p)).collect::<Result<_, _>>()?;
            Report::new(&entries, entries.iter().map(entry_text).collect())
        }
        _ => {
            let entries = dump_table(max_rank);
            Report::new(&entries, entries.iter().map(entry_text).collect())
        }
    }
}

fn jinv(cmd: &JinvCmd) -> Outcome {
    match cmd {
        JinvCmd::Enumerate { form, p, budget } => {
            let js = enumerate_admissible_with_budget(form, *p, *budget)?;
            Report::new(&js, show_j(&js))
        }
        JinvCmd::Check { form, p, j } => {
            let data = form.torsion_data(*p)?;
            let j = JInvariant::new(&data, j.clone())?;
            let admissible = is_admissible(&j, form)?;
            let violated: Vec<ConstraintRule> =
                form.constraint_rules(*p)?.into_iter().filter(|r| !r.holds(&j.j, *p)).collect();
            let mut text = format!("{j} is {}admissible for {form} mod {p}\n", if admissible { "" } else { "not " });
            for r in &violated {
                let _ = writeln!(text, "  violates {r}");
            }
            Report::new(&CheckReport { form: *form, j, admissible, violated }, text)
        }
    }
}

fn j_from_gens(row: &RowArgs, gens: &[String]) -> Outcome {
    let data = row_data(row)?;
    let ring = TruncatedRing::new(data.clone())?;
    let elems = gens.iter().map(|g| ring.parse(g)).collect::<Result<Vec<_>, _>>()?;
    let basis = ring.subring_closure(&elems)?;
    let j = j_from_subring(&basis, &data)?;
    let text = format!("J = {j}\nsubring dimension {} of {}\n", basis.len(), ring.dimension());
    Report::new(&SubringReport { j, subring_dimension: basis.len() }, text)
}

fn tits_data(tits: &TitsArgs) -> Option<TitsData> {
    let base = TitsData::new(tits.tits_index?, tits.splitting_degree?);
    Some(match tits.pfister {
        Some(b) => base.with_pfister(b),
        None => base,
    })
}

fn motive(cmd: &MotiveCmd) -> Outcome {
    match cmd {
        MotiveCmd::Decompose { form, p, j, theta, tits, allow_unknown } => {
            let data = form.torsion_data(*p)?;
            let j = JInvariant::new(&data, j.clone())?;
            let theta = theta_for(&form.base(), theta)?;
            let dec = match tits_data(tits) {
                Some(t) => decompose_generically_split(form, *p, &j, &theta, t, *allow_unknown)?,
                None => decompose(form, *p, &j, &theta)?,
            };
            let text = format!(
                "summand        {}\nmultiplicities {}\ncopies         {}\n",
                dec.summand,
                dec.multiplicities,
                dec.copies()
            );
            Report::new(&dec, text)
        }
        MotiveCmd::RostPoincare { row, j } => {
            let data = row_data(row)?;
            let j = JInvariant::new(&data, j.clone())?;
            let rost = rost_poincare(&data, &j);
            Report::new(&rost, format!("{rost}\n"))
        }
        MotiveCmd::Candim { row, j } => {
            let data = row_data(row)?;
            let j = JInvariant::new(&data, j.clone())?;
            let cd = canonical_p_dimension(&data, &j);
            Report::new(&cd, format!("{cd}\n"))
        }
        MotiveCmd::TorsionBound { row, j } => {
            let data = row_data(row)?;
            let j = JInvariant::new(&data, j.clone())?;
            let bound = torsion_index_bound(&j);
            Report::new(&bound, format!("{bound}\n"))
        }
        MotiveCmd::RationalCounts { form, p, j } => {
            let data = form.torsion_data(*p)?;
            let j = JInvariant::new(&data, j.clone())?;
            let c = rational_cycle_counts(form, &j)?;
            let text = format!("rk R     {}\nrank A   {}\nrank B   {}\n", c.rk_r, c.rank_a_rat, c.rank_b_rat);
            Report::new(&c, text)
        }
        MotiveCmd::Integral { m, form, theta, js, total, summand, all } => {
            let (total, summands) = match form {
                Some(form) => integral_inputs_from_form(form, *m, theta, js)?,
                None if total.is_empty() => return Err(usage("give --form or --total with --summand")),
                None => (
                    Poly::new(total.clone()),
                    summand.iter().map(|(p, c)| (*p, Poly::new(c.clone()))).collect(),
                ),
            };
            let found = all_integral_decompositions(&total, *m, &summands)?;
            if found.is_empty() {
                return Err(Failure::Domain(Error::NoDivisor(total.to_string())));
            }
            let text_of = |d: &IntegralDecomposition| {
                let mut t = format!("summand        {}\nmultiplicities {}\n", d.summand, d.multiplicities);
                let twists = d.multiplicities.twist_multiset();
                if twists.len() <= 24 {
                    let _ = writeln!(t, "twists         {twists:?}");
                }
                t
            };
            if *all {
                let text = found.iter().enumerate().map(|(i, d)| format!("candidate {}\n{}", i + 1, indent(&text_of(d)))).collect();
                Report::new(&found, text)
            } else {
                Report::new(&found[0], text_of(&found[0]))
            }
        }
    }
}

fn integral_inputs_from_form(
    form: &GroupForm,
    m: u64,
    theta: &ThetaArgs,
    js: &[(u64, Vec<u32>)],
) -> Result<(Poly, Vec<(u64, Poly)>), Failure> {
    let ty = form.base();
    let total = ty.poincare_homogeneous(&theta_for(&ty, theta)?)?;
    let mut summands = Vec::new();
    for p in prime_factors(m) {
        let data = form.torsion_data(p)?;
        let j = match js.iter().find(|(q, _)| *q == p) {
            Some((_, j)) => JInvariant::new(&data, j.clone())?,
            None => JInvariant::maximal(&data),
        };
        summands.push((p, rost_poincare(&data, &j)));
    }
    Ok((total, summands))
}

fn explicit_matrix(m: &MatrixArgs) -> Result<Option<ModMatrix>, Failure> {
    match (m.modulus, &m.rows) {
        (Some(q), Some(rows)) => Ok(Some(parse_rows(q, rows)?)),
        (Some(_), None) => Err(usage("--modulus needs --rows")),
        _ => Ok(None),
    }
}

fn lift(cmd: &LiftCmd) -> Outcome {
    match cmd {
        LiftCmd::Idempotent { matrix, random } => {
            let input = match explicit_matrix(matrix)? {
                Some(a) => a,
                None => {
                    let RandomArgs { seed, prime, exponent, size } = *random;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    random_family(&mut rng, prime, exponent, size, 1).remove(0)
                }
            };
            let lifted = lift_idempotent(&input)?;
            let text = format!("input\n{}lifted\n{}", indent(&input.to_string()), indent(&lifted.to_string()));
            Report::new(&IdempotentReport { input, lifted }, text)
        }
        LiftCmd::Family { modulus, members, random, parts } => {
            let family = match modulus {
                Some(q) if !members.is_empty() => members.iter().map(|s| parse_rows(*q, s)).collect::<Result<_, _>>()?,
                Some(_) => return Err(usage("--modulus needs at least one --member")),
                None => {
                    let RandomArgs { seed, prime, exponent, size } = *random;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    random_family(&mut rng, prime, exponent, size, *parts)
                }
            };
            let lifted = lift_orthogonal_family(&family)?;
            let mut text = String::new();
            for (i, (a, e)) in family.iter().zip(&lifted).enumerate() {
                let _ = write!(text, "member {}\n{}lifted\n{}", i + 1, indent(&a.to_string()), indent(&e.to_string()));
            }
            Report::new(&FamilyReport { family, lifted }, text)
        }
        LiftCmd::Izvrat { instance, random } => {
            let instance = match instance {
                Some(path) => {
                    let raw = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    serde_json::from_str::<IzvratInstance>(&raw).map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                None => {
                    let RandomArgs { seed, prime, exponent, size } = *random;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    random_izvrat_instance(&mut rng, prime, exponent, size)
                }
            };
            let (theta12, theta21) =
                lift_isomorphism_izvrat(&instance.phi1, &instance.phi2, &instance.psi12, &instance.psi21)?;
            let text = format!(
                "theta12\n{}theta21\n{}",
                indent(&theta12.matrix().to_string()),
                indent(&theta21.matrix().to_string())
            );
            Report::new(&IzvratReport { instance, theta12, theta21 }, text)
        }
        LiftCmd::Sl { matrix, random_modulus, seed, size } => {
            let input = match (explicit_matrix(matrix)?, random_modulus) {
                (Some(a), _) => a,
                (None, Some(q)) => random_sl(&mut ChaCha8Rng::seed_from_u64(*seed), *q, *size),
                (None, None) => return Err(usage("give --modulus with --rows, or --random-modulus")),
            };
            let lifted = sl_lift(&input)?;
            let text = format!("input\n{}lift (det {})\n  {}\n", indent(&input.to_string()), lifted.det(), lifted);
            Report::new(&SlReport { input, lift: lifted }, text)
        }
    }
}

fn flag(cmd: &FlagCmd) -> Outcome {
    match cmd {
        FlagCmd::Poincare { ty, theta } => {
            let ty = match ty.parse::<DynkinType>() {
                Ok(t) => t,
                Err(_) => ty.parse::<GroupForm>()?.base(),
            };
            let poly = ty.poincare_homogeneous(&theta_for(&ty, theta)?)?;
            Report::new(&poly, format!("{poly}\n"))
        }
        FlagCmd::Split { form, theta, tits_index, splitting_degree, pfister } => {
            let theta = theta_for(&form.base(), theta)?;
            let tits = tits_data(&TitsArgs {
                tits_index: Some(*tits_index),
                splitting_degree: Some(*splitting_degree),
                pfister: *pfister,
            })
            .expect("both fields present");
            let s = is_generically_split(form, &theta, tits)?;
            Report::new(&s, format!("{s:?}\n").to_lowercase())
        }
    }
}
