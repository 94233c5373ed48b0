//! One function per subcommand. Each takes parsed inputs and returns a
//! [`Report`]; rendering and exit codes live in the binary.

use std::path::Path;

use groves_core::analysis::{
    classify_linear, compare, search_dominance_improvement, search_welfare_improvement,
    Classification, LpOutcome, LpStatus, Verdict,
};
use groves_core::mechanism::Evaluator;
use groves_core::rational::rat;
use groves_core::{
    fixtures, AuctionSetting, GridSpec, Mechanism, PublicProjectSetting, Rational,
    RebateCoefficients, RebateTable, Setting, TypeProfile,
};

use crate::error::{CliError, CliResult};
use crate::report::{exact_vec, Exact, ProfileRow, Report, WitnessRow};
use crate::spec::{parse_mechanism, read_table};

/// Raw setting parameters as typed on the command line.
#[derive(Debug, Clone, Default)]
pub struct SettingArgs {
    pub domain: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    pub cost: Option<Rational>,
    pub shares: Option<Vec<Rational>>,
}

fn missing(flag: &str, domain: &str) -> CliError {
    CliError::Usage(format!("--{flag} is required for --domain {domain}"))
}

pub fn build_setting(args: &SettingArgs) -> CliResult<Setting> {
    match args.domain.as_str() {
        "auction" => {
            let n = args.n.ok_or_else(|| missing("n", "auction"))?;
            let m = args.m.ok_or_else(|| missing("m", "auction"))?;
            let lower = args.lower.clone().ok_or_else(|| missing("L", "auction"))?;
            let upper = args.upper.clone().ok_or_else(|| missing("U", "auction"))?;
            Ok(AuctionSetting::new(n, m, lower, upper)?.into())
        }
        "public" => {
            let cost = args.cost.clone().ok_or_else(|| missing("cost", "public"))?;
            let pp = match &args.shares {
                Some(shares) => {
                    if args.n.is_some_and(|n| n != shares.len()) {
                        return Err(CliError::Usage(format!(
                            "--n {} disagrees with {} --shares",
                            args.n.unwrap_or_default(),
                            shares.len()
                        )));
                    }
                    PublicProjectSetting::new(cost, shares.clone())?
                }
                None => PublicProjectSetting::equal_shares(
                    args.n.ok_or_else(|| missing("n", "public"))?,
                    cost,
                )?,
            };
            Ok(pp.into())
        }
        other => Err(CliError::Usage(format!(
            "unknown domain '{other}' (expected auction or public)"
        ))),
    }
}

/// Explicit points win over a uniform count; with neither, `default_points`.
pub fn build_grid(
    setting: &Setting,
    points: Option<&[Rational]>,
    count: Option<usize>,
    default_points: usize,
) -> CliResult<GridSpec> {
    Ok(match points {
        Some(p) => GridSpec::new(setting, p.to_vec())?,
        None => GridSpec::uniform(setting, count.unwrap_or(default_points))?,
    })
}

fn row(ev: &Evaluator<'_>, p: &TypeProfile, decimal: Option<usize>) -> CliResult<ProfileRow> {
    let r = ev.report(p)?;
    let rebates = (0..p.len())
        .map(|i| ev.rebate(p, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProfileRow::new(p, &r, &rebates, decimal))
}

pub fn evaluate(
    setting: &Setting,
    mech: &str,
    profile: Option<Vec<Rational>>,
    grid: Option<&GridSpec>,
    decimal: Option<usize>,
) -> CliResult<Report> {
    let mechanism = parse_mechanism(mech, setting)?;
    let ev = Evaluator::new(setting, &mechanism)?;
    let mut report = Report::new("evaluate", setting);
    report.mechanisms.push(mechanism.label());
    match (profile, grid) {
        (Some(values), _) => {
            let p = TypeProfile::new(setting, values)?;
            report.rows.push(row(&ev, &p, decimal)?);
        }
        (None, Some(g)) => {
            report.grid = exact_vec(g.points());
            let profiles: Vec<TypeProfile> = g.profiles(setting.n()).collect();
            report.rows = crate::par_map(&profiles, |p| row(&ev, p, decimal))?;
        }
        (None, None) => return Err(CliError::Usage("evaluate needs --profile or a grid".into())),
    }
    Ok(report)
}

fn verdict_text(v: Verdict) -> &'static str {
    if v.is_yes() {
        "yes"
    } else {
        "no"
    }
}

pub fn compare_specs(
    setting: &Setting,
    a: &str,
    b: &str,
    grid: &GridSpec,
    decimal: Option<usize>,
) -> CliResult<Report> {
    let ma = parse_mechanism(a, setting)?;
    let mb = parse_mechanism(b, setting)?;
    compare_mechanisms("compare", setting, &ma, &mb, grid, decimal)
}

fn compare_mechanisms(
    scenario: &str,
    setting: &Setting,
    a: &Mechanism,
    b: &Mechanism,
    grid: &GridSpec,
    decimal: Option<usize>,
) -> CliResult<Report> {
    let r = compare(setting, a, b, grid)?;
    let mut report = Report::new(scenario, setting);
    report.mechanisms = vec![a.label(), b.label()];
    report.grid = exact_vec(grid.points());
    report.verdict("b_dominates_a", verdict_text(r.dominates));
    report.verdict("b_welfare_dominates_a", verdict_text(r.welfare_dominates));
    report.verdict("equal", r.equal);
    report.verdict("profiles_checked", r.profiles_checked);
    let named = [
        ("strict", &r.strict_witness),
        ("violation", &r.violation_witness),
        ("welfare_strict", &r.welfare_strict_witness),
        ("welfare_violation", &r.welfare_violation_witness),
    ];
    for (kind, w) in named {
        if let Some(w) = w {
            report.witnesses.push(WitnessRow::new(kind, w, decimal));
        }
    }
    report.notes.push("grid-certified".into());
    Ok(report)
}

pub fn classify(setting: &Setting, coeffs: Vec<Rational>) -> CliResult<Report> {
    let auction = setting
        .as_auction()
        .map_err(|_| CliError::Usage("classify needs --domain auction".into()))?;
    let coeffs =
        RebateCoefficients::from_vec(coeffs).map_err(|e| CliError::Usage(e.to_string()))?;
    let mech = Mechanism::Linear(coeffs.clone());
    let mut report = Report::new("classify", setting);
    report.mechanisms.push(mech.label());
    match classify_linear(auction, &coeffs)? {
        Classification::Infeasible { witness, total } => {
            report.verdict("class", "Infeasible");
            report.values.insert("deficit_total".into(), Exact(total));
            report.verdict("witness", join(&witness));
        }
        Classification::UndominatedOel(idx) => {
            report.verdict("class", format!("UndominatedOEL({})", idx.k()));
            report.verdict("oel_k", idx.k());
        }
        Classification::Dominated { slack, witness } => {
            report.verdict("class", "Dominated");
            report.values.insert("slack".into(), Exact(slack));
            report.verdict("witness", join(&witness));
        }
    }
    Ok(report)
}

fn join(v: &[Rational]) -> String {
    exact_vec(v)
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchKind {
    Welfare,
    Dominance,
}

pub fn search(
    setting: &Setting,
    mech: &str,
    grid: &GridSpec,
    kind: SearchKind,
    pay_only: bool,
) -> CliResult<Report> {
    let mechanism = parse_mechanism(mech, setting)?;
    let out = match kind {
        SearchKind::Welfare => {
            if pay_only {
                return Err(CliError::Usage(
                    "--pay-only applies to --kind dominance".into(),
                ));
            }
            search_welfare_improvement(setting, &mechanism, grid)?
        }
        SearchKind::Dominance => search_dominance_improvement(setting, &mechanism, grid, pay_only)?,
    };
    let scenario = match (kind, pay_only) {
        (SearchKind::Welfare, _) => "search-welfare",
        (SearchKind::Dominance, false) => "search-dominance",
        (SearchKind::Dominance, true) => "search-dominance-pay-only",
    };
    let mut report = Report::new(scenario, setting);
    report.mechanisms.push(mechanism.label());
    report.grid = exact_vec(grid.points());
    lp_into(&mut report, "", &out);
    report
        .notes
        .push("partial: optimum is certified on the grid only".into());
    Ok(report)
}

fn lp_into(report: &mut Report, prefix: &str, out: &LpOutcome) {
    let status = match out.status {
        LpStatus::NoImprovement => "no-improvement",
        LpStatus::Improved => "improved",
        LpStatus::Unbounded => "unbounded",
    };
    report.verdict(&format!("{prefix}status"), status);
    report.verdict(&format!("{prefix}variables"), out.variables);
    report.verdict(&format!("{prefix}constraints"), out.constraints);
    if let Some(opt) = &out.optimum {
        report.value(&format!("{prefix}optimum"), opt);
    }
    if prefix.is_empty() {
        if let Some(t) = &out.improvement {
            report.table = Some(
                t.iter()
                    .map(|(k, v)| (k.to_string(), Exact(v.clone())))
                    .collect(),
            );
        }
    }
}

/// Embedded single-item fixture: checks the published table entries, the
/// comparison of `t` and `t'`, and both LP searches from `t`. Custom tables
/// replace the embedded ones and are held to the same expectations.
pub fn fixture(r_path: Option<&Path>, r_prime_path: Option<&Path>) -> CliResult<Report> {
    let setting = fixtures::table_setting();
    let grid = fixtures::table_grid();
    let r = match r_path {
        Some(p) => read_table(p)?,
        None => fixtures::table_r(),
    };
    let r_prime = match r_prime_path {
        Some(p) => read_table(p)?,
        None => fixtures::table_r_prime(),
    };
    let mut mismatches = Vec::new();

    let spot = [
        (&r_prime, [2, 1, 0], rat(7, 24), "r'(2,1,0)"),
        (&r, [3, 2, 1], rat(1, 1), "r(3,2,1)"),
        (&r_prime, [3, 2, 1], rat(19, 24), "r'(3,2,1)"),
    ];
    for (table, key, want, name) in spot {
        let key: Vec<Rational> = key.iter().map(|&v| rat(v, 1)).collect();
        match table.get(&key) {
            Ok(got) if *got == want => {}
            Ok(got) => mismatches.push(format!(
                "{name} = {} expected {}",
                Exact(got.clone()),
                Exact(want)
            )),
            Err(e) => mismatches.push(format!("{name}: {e}")),
        }
    }
    check_coverage(&r, &grid, "r", &mut mismatches);
    check_coverage(&r_prime, &grid, "r'", &mut mismatches);
    if !mismatches.is_empty() {
        return Err(CliError::FixtureMismatch(mismatches.join("; ")));
    }

    let t = Mechanism::Tabular(r.clone());
    let t_prime = Mechanism::Tabular(r_prime.clone());
    let mut report = compare_mechanisms("fixture", &setting, &t, &t_prime, &grid, None)?;
    if report.verdicts["b_welfare_dominates_a"] != "yes" {
        mismatches.push("t' does not welfare dominate t".into());
    }
    if report.verdicts["b_dominates_a"] != "no" {
        mismatches.push("t' dominates t".into());
    }

    let dom = search_dominance_improvement(&setting, &t, &grid, false)?;
    if dom.optimum.as_ref().is_none_or(|o| *o != rat(0, 1)) {
        mismatches.push(format!(
            "dominance search from t has optimum {}",
            dom.optimum
                .as_ref()
                .map(|o| Exact(o.clone()).to_string())
                .unwrap_or_else(|| "unbounded".into())
        ));
    }
    lp_into(&mut report, "dominance_search_", &dom);
    let welfare = search_welfare_improvement(&setting, &t, &grid)?;
    if welfare.status != LpStatus::Improved {
        mismatches.push("welfare search from t finds no improvement".into());
    }
    lp_into(&mut report, "welfare_search_", &welfare);

    if !mismatches.is_empty() {
        return Err(CliError::FixtureMismatch(mismatches.join("; ")));
    }
    report.table = None;
    report
        .values
        .extend(r.iter().map(|(k, v)| (format!("r({k})"), Exact(v.clone()))));
    report.values.extend(
        r_prime
            .iter()
            .map(|(k, v)| (format!("r_prime({k})"), Exact(v.clone()))),
    );
    Ok(report)
}

fn check_coverage(table: &RebateTable, grid: &GridSpec, name: &str, mismatches: &mut Vec<String>) {
    for key in grid.multisets(3) {
        if table.get_canonical(&key).is_err() {
            mismatches.push(format!("{name} has no entry for ({key})"));
        }
    }
}
