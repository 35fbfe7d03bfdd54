//! Named experiment suites behind the acceptance checks and the CLI
//! `experiment` command. Reports carry no wall-clock data, so a fixed seed
//! reproduces byte-identical output.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::gen::{gen_laminar, gen_random};
use crate::goodset::GoodSet;
use crate::instance::{is_pareto_efficient, Allocation, Instance, Value};
use crate::json::instance_hash;
use crate::laminar::{pareto_repair, solve_laminar};
use crate::mechanisms::{prop2_sequence, run_sequential, Mechanism, Prop1Mechanism, Prop2Mechanism};
use crate::oracle::{maximin_partition, mms_profile, mms_value, verify_mms, MmsProfile, SearchBudget};
use crate::strategy::{audit_sp, MisreportScope};
use crate::three_agent::{lemma2_select, pair_intersections, reduce_singletons, solve_three};

/// The named suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Thm1,
    Thm2,
    Prop1Sp,
    Prop2,
    Prop3,
    OracleProps,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Thm1,
        Suite::Thm2,
        Suite::Prop1Sp,
        Suite::Prop2,
        Suite::Prop3,
        Suite::OracleProps,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::Prop1Sp => "prop1-sp",
            Suite::Prop2 => "prop2",
            Suite::Prop3 => "prop3",
            Suite::OracleProps => "oracle-props",
        }
    }

    pub fn default_trials(&self) -> u64 {
        match self {
            Suite::Thm1 | Suite::Thm2 => 10_000,
            Suite::Prop1Sp => 500,
            // one row per cost multiset, both family sizes
            Suite::Prop2 => (multisets(4, 4) + multisets(4, 5)) as u64,
            Suite::Prop3 => 1,
            Suite::OracleProps => 1_000,
        }
    }
}

fn multisets(values: usize, len: usize) -> usize {
    // C(values + len - 1, len)
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..len {
        num *= values + i;
        den *= i + 1;
    }
    num / den
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite {
                name: s.to_string(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ReportFormat> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidParameter {
                what: format!("unknown format {other:?}"),
            }),
        }
    }
}

/// Run parameters. A fixed seed makes the rendered report byte-identical
/// across runs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: Option<u64>,
    pub budget: SearchBudget,
    pub format: ReportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            trials: None,
            budget: SearchBudget::default(),
            format: ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRow {
    pub trial: u64,
    pub hash: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSummary {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub rows: Vec<TrialRow>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    fn assemble(suite: Suite, seed: u64, rows: Vec<TrialRow>, verdict_pass: &str) -> SuiteReport {
        let passed = rows.iter().filter(|r| r.pass).count() as u64;
        let failed = rows.len() as u64 - passed;
        SuiteReport {
            summary: SuiteSummary {
                suite: suite.name().to_string(),
                seed,
                trials: rows.len() as u64,
                passed,
                failed,
                verdict: if failed == 0 {
                    verdict_pass.to_string()
                } else {
                    "fail".to_string()
                },
            },
            rows,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json_string(&self) -> String {
        let value = json!({
            "rows": self
                .rows
                .iter()
                .map(|r| json!({
                    "detail": r.detail,
                    "hash": r.hash,
                    "pass": r.pass,
                    "trial": r.trial,
                }))
                .collect::<Vec<_>>(),
            "summary": {
                "failed": self.summary.failed,
                "passed": self.summary.passed,
                "seed": self.summary.seed,
                "suite": self.summary.suite,
                "trials": self.summary.trials,
                "verdict": self.summary.verdict,
            },
        });
        serde_json::to_string_pretty(&value).expect("report serializes")
    }

    /// Columns: trial,hash,pass,detail. Detail strings never contain commas.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("trial,hash,pass,detail\n");
        for r in &self.rows {
            debug_assert!(!r.detail.contains(','));
            out.push_str(&format!("{},{},{},{}\n", r.trial, r.hash, r.pass, r.detail));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "# summary suite={} seed={} trials={} passed={} failed={} verdict={}\n",
            s.suite, s.seed, s.trials, s.passed, s.failed, s.verdict
        ));
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json_string(),
            ReportFormat::Csv => self.to_csv_string(),
        }
    }
}

/// Runs the named suite and returns its report. Failures are recorded in the
/// rows, not raised; errors are reserved for invalid setups.
pub fn run_experiment(suite: Suite, config: &RunConfig) -> Result<SuiteReport> {
    let trials = config.trials.unwrap_or_else(|| suite.default_trials());
    match suite {
        Suite::Thm1 => run_thm1(trials, config),
        Suite::Thm2 => run_thm2(trials, config),
        Suite::Prop1Sp => run_prop1_sp(trials, config),
        Suite::Prop2 => run_prop2(trials, config),
        Suite::Prop3 => run_prop3(trials, config),
        Suite::OracleProps => run_oracle_props(trials, config),
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn run_thm1(trials: u64, config: &RunConfig) -> Result<SuiteReport> {
    let mut rows = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut rng = trial_rng(config.seed, t);
        let m = rng.random_range(0..=8);
        let density = [0.3, 0.6, 1.0][(t % 3) as usize];
        let inst = gen_random(3, m, 20, density, rng.random())?;
        let hash = instance_hash(&inst);
        let (pass, detail) = match check_thm1(&inst, &config.budget) {
            Ok(detail) => (true, detail),
            Err(detail) => (false, detail),
        };
        rows.push(TrialRow {
            trial: t,
            hash,
            pass,
            detail,
        });
    }
    Ok(SuiteReport::assemble(Suite::Thm1, config.seed, rows, "pass"))
}

fn check_thm1(inst: &Instance, budget: &SearchBudget) -> std::result::Result<String, String> {
    let alloc = solve_three(inst, budget).map_err(|e| format!("solver: {e}"))?;
    let profile = mms_profile(inst, budget).map_err(|e| format!("oracle: {e}"))?;
    let mms = verify_mms(inst, &alloc, &profile);
    let po = is_pareto_efficient(inst, &alloc);
    let detail = format!(
        "mms={:?} values={:?}",
        profile.values(),
        (0..3)
            .map(|a| inst.bundle_value(a, alloc.bundle(a)))
            .collect::<Vec<_>>()
    )
    .replace(',', "");
    if !mms.ok {
        return Err(format!("mms shortfall agent {}", mms.shortfalls[0].agent));
    }
    if !po.efficient {
        return Err("not pareto efficient".to_string());
    }
    Ok(detail)
}

fn run_thm2(trials: u64, config: &RunConfig) -> Result<SuiteReport> {
    let mut rows = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut rng = trial_rng(config.seed, t);
        let n = rng.random_range(1..=5);
        let m = rng.random_range(0..=10);
        let depth = rng.random_range(1..=3);
        let inst = gen_laminar(n, m, 20, depth, rng.random())?;
        let hash = instance_hash(&inst);
        let (pass, detail) = match check_thm2(&inst, &config.budget) {
            Ok(detail) => (true, detail),
            Err(detail) => (false, detail),
        };
        rows.push(TrialRow {
            trial: t,
            hash,
            pass,
            detail,
        });
    }
    Ok(SuiteReport::assemble(Suite::Thm2, config.seed, rows, "pass"))
}

fn check_thm2(inst: &Instance, budget: &SearchBudget) -> std::result::Result<String, String> {
    let alloc = solve_laminar(inst, budget).map_err(|e| format!("solver: {e}"))?;
    let repaired = pareto_repair(inst, &alloc);
    let profile = mms_profile(inst, budget).map_err(|e| format!("oracle: {e}"))?;
    if !verify_mms(inst, &alloc, &profile).ok {
        return Err("mms shortfall before repair".to_string());
    }
    if !verify_mms(inst, &repaired, &profile).ok {
        return Err("mms shortfall after repair".to_string());
    }
    if !is_pareto_efficient(inst, &repaired).efficient {
        return Err("not pareto efficient after repair".to_string());
    }
    Ok(format!("n={} m={} mms={:?}", inst.num_agents(), inst.num_goods(), profile.values())
        .replace(',', ""))
}

fn run_prop1_sp(trials: u64, config: &RunConfig) -> Result<SuiteReport> {
    let mut rows = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut rng = trial_rng(config.seed, t);
        let n = rng.random_range(1..=3);
        let m = rng.random_range(0..=6);
        let density: f64 = rng.random();
        let inst = gen_random(n, m, 10, density, rng.random())?;
        let hash = instance_hash(&inst);
        let (pass, detail) = match check_prop1_sp(&inst, &config.budget) {
            Ok(detail) => (true, detail),
            Err(detail) => (false, detail),
        };
        rows.push(TrialRow {
            trial: t,
            hash,
            pass,
            detail,
        });
    }
    Ok(SuiteReport::assemble(Suite::Prop1Sp, config.seed, rows, "pass"))
}

fn check_prop1_sp(inst: &Instance, budget: &SearchBudget) -> std::result::Result<String, String> {
    let audit = audit_sp(inst, &Prop1Mechanism, &MisreportScope::AllSubsets, budget)
        .map_err(|e| format!("audit: {e}"))?;
    if let Some(w) = &audit.witness {
        return Err(format!(
            "agent {} gains {} over {}",
            w.agent, w.manipulated_value, w.honest_value
        ));
    }
    let alloc = Prop1Mechanism
        .run(inst)
        .map_err(|e| format!("mechanism: {e}"))?;
    if !is_pareto_efficient(inst, &alloc).efficient {
        return Err("approved good with a non-approver".to_string());
    }
    Ok(format!("deviations={}", audit.deviations_checked))
}

/// Exhaustive sweep of one cost multiset: every approval profile is run
/// through the n+2-good mechanism once; share and efficiency checks read the
/// cached oracle values, and the no-gain checks compare each profile against
/// every unilateral deviation (which is itself one of the cached profiles).
fn check_prop2_multiset(
    n: usize,
    costs: &[Value],
    budget: &SearchBudget,
    literal_audits: bool,
) -> Result<(Instance, bool, String)> {
    let m = costs.len();
    debug_assert_eq!(m, n + 2);
    let base = Instance::from_parts(
        costs
            .iter()
            .enumerate()
            .map(|(i, &c)| (format!("g{i}"), c))
            .collect(),
        (0..n).map(|a| (format!("a{a}"), Vec::new())).collect(),
    )?;

    // Oracle shares for every possible approval set.
    let masks = 1usize << m;
    let mut share = Vec::with_capacity(masks);
    for bits in 0..masks {
        share.push(maximin_partition(&base, GoodSet::from_bits(bits as u64), n, budget)?);
    }

    // Mechanism outcome for every approval profile.
    let profiles = masks.pow(n as u32);
    let mut outcome: Vec<Vec<GoodSet>> = Vec::with_capacity(profiles);
    let profile_of = |p: usize| -> Vec<GoodSet> {
        let mut approvals = Vec::with_capacity(n);
        let mut rest = p;
        for _ in 0..n {
            approvals.push(GoodSet::from_bits((rest % masks) as u64));
            rest /= masks;
        }
        approvals
    };
    let inst_of = |p: usize| -> Instance {
        let mut inst = base.clone();
        for (a, set) in profile_of(p).into_iter().enumerate() {
            inst = inst.with_approval(a, set);
        }
        inst
    };
    for p in 0..profiles {
        let inst = inst_of(p);
        let seq = if n == 1 {
            unreachable!("families use n >= 2")
        } else {
            prop2_sequence(&inst)?
        };
        let run = run_sequential(&inst, &seq)?;
        outcome.push(run.result.bundles().to_vec());
    }

    let mut sp_checks = 0u64;
    for p in 0..profiles {
        let inst = inst_of(p);
        let profile = MmsProfile {
            bundle_count: n,
            per_agent: (0..n)
                .map(|a| share[inst.approval(a).bits() as usize].clone())
                .collect(),
        };
        let alloc = Allocation::new(&inst, outcome[p].clone())?;
        if !verify_mms(&inst, &alloc, &profile).ok {
            return Ok((base, false, format!("mms shortfall at profile {p}")));
        }
        if !is_pareto_efficient(&inst, &alloc).efficient {
            return Ok((base, false, format!("inefficient at profile {p}")));
        }
        for agent in 0..n {
            let truth = inst.approval(agent).bits() as usize;
            let honest = base.set_cost(outcome[p][agent] & GoodSet::from_bits(truth as u64));
            let stride = masks.pow(agent as u32);
            let without = p - truth * stride;
            for report in 0..masks {
                if report == truth {
                    continue;
                }
                sp_checks += 1;
                let q = without + report * stride;
                let gained =
                    base.set_cost(outcome[q][agent] & GoodSet::from_bits(truth as u64));
                if gained > honest {
                    return Ok((
                        base,
                        false,
                        format!("agent {agent} manipulates profile {p} via {report}"),
                    ));
                }
            }
        }
    }

    // On the small family also drive the public auditor end to end.
    let mut audits = 0u64;
    if literal_audits {
        for p in 0..profiles {
            let inst = inst_of(p);
            let report = audit_sp(&inst, &Prop2Mechanism, &MisreportScope::AllSubsets, budget)?;
            audits += 1;
            if !report.strategyproof {
                return Ok((base, false, format!("auditor witness at profile {p}")));
            }
        }
    }

    let detail = format!(
        "n={n} costs={costs:?} profiles={profiles} sp_checks={sp_checks} audits={audits}"
    )
    .replace(',', " ");
    Ok((base, true, detail))
}

fn run_prop2(trials: u64, config: &RunConfig) -> Result<SuiteReport> {
    let mut rows = Vec::new();
    let palette = [1u64, 2, 3, 5];
    'outer: for n in [2usize, 3] {
        let m = n + 2;
        for combo in palette.iter().copied().combinations_with_replacement(m) {
            if rows.len() as u64 >= trials {
                break 'outer;
            }
            let (base, pass, detail) =
                check_prop2_multiset(n, &combo, &config.budget, n == 2)?;
            rows.push(TrialRow {
                trial: rows.len() as u64,
                hash: instance_hash(&base),
                pass,
                detail,
            });
        }
    }
    Ok(SuiteReport::assemble(Suite::Prop2, config.seed, rows, "pass"))
}

fn run_prop3(trials: u64, config: &RunConfig) -> Result<SuiteReport> {
    let mut rows = Vec::new();
    if trials > 0 {
        let cert = crate::strategy::replicate_prop3()?;
        rows.push(TrialRow {
            trial: 0,
            hash: instance_hash(&cert.instance),
            pass: cert.unsat,
            detail: format!(
                "profiles={} links={} explored={} consistent={}",
                cert.profiles.len(),
                cert.sp_links,
                cert.assignments_explored,
                cert.consistent_assignments
            ),
        });
    }
    let mut report = SuiteReport::assemble(Suite::Prop3, config.seed, rows, "UNSAT certified");
    if report.summary.trials == 0 {
        report.summary.verdict = "UNSAT certified".to_string();
    }
    Ok(report)
}

fn run_oracle_props(trials: u64, config: &RunConfig) -> Result<SuiteReport> {
    let mut rows = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut rng = trial_rng(config.seed, t);
        let n = rng.random_range(1..=4);
        let m = rng.random_range(0..=8);
        let density: f64 = rng.random();
        let inst = gen_random(n, m, 12, density, rng.random())?;
        let hash = instance_hash(&inst);
        let (pass, detail) = match check_oracle_props(&inst, &mut rng, &config.budget) {
            Ok(detail) => (true, detail),
            Err(detail) => (false, detail),
        };
        rows.push(TrialRow {
            trial: t,
            hash,
            pass,
            detail,
        });
    }
    Ok(SuiteReport::assemble(Suite::OracleProps, config.seed, rows, "pass"))
}

fn check_oracle_props(
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    budget: &SearchBudget,
) -> std::result::Result<String, String> {
    let n = inst.num_agents();
    let err = |e: Error| format!("oracle: {e}");
    let profile = mms_profile(inst, budget).map_err(err)?;

    for agent in 0..n {
        let entry = &profile.per_agent[agent];
        let witness_min = entry
            .bundles
            .iter()
            .map(|&b| inst.set_cost(b))
            .min()
            .unwrap_or(0);
        if witness_min != entry.value {
            return Err(format!("witness mismatch for agent {agent}"));
        }
        let total = inst.set_cost(inst.approval(agent));
        if (entry.value as u128) * (n as u128) > total as u128 {
            return Err(format!("upper bound violated for agent {agent}"));
        }
        let coarser = mms_value(inst, agent, n + 1, budget).map_err(err)?;
        if coarser.value > entry.value {
            return Err(format!("more bundles raised the share for agent {agent}"));
        }
    }

    // Scaling costs by a constant scales every share and leaves verdicts
    // unchanged.
    let alloc = random_allocation(inst, rng);
    let base_ok = verify_mms(inst, &alloc, &profile).ok;
    for lambda in [2u64, 7] {
        let scaled = scale_instance(inst, lambda);
        let scaled_profile = mms_profile(&scaled, budget).map_err(err)?;
        for agent in 0..n {
            if scaled_profile.per_agent[agent].value != profile.per_agent[agent].value * lambda {
                return Err(format!("share did not scale by {lambda} for agent {agent}"));
            }
        }
        if verify_mms(&scaled, &alloc, &scaled_profile).ok != base_ok {
            return Err(format!("verdict changed under scale {lambda}"));
        }
    }

    // Goods approved by a single agent shift its share by at most their
    // total cost.
    let extras = rng.random_range(0..=3);
    if extras > 0 {
        let extended = extend_with_exclusive_goods(inst, extras, rng);
        let old_goods: GoodSet = (0..inst.num_goods())
            .map(|g| {
                extended
                    .good_index(&inst.goods()[g].id)
                    .expect("original goods survive")
            })
            .collect();
        let base_set = extended.approval(0) & old_goods;
        let extra_set = extended.approval(0) - old_goods;
        let lo = maximin_partition(&extended, base_set, n, budget)
            .map_err(err)?
            .value;
        let hi = maximin_partition(&extended, extended.approval(0), n, budget)
            .map_err(err)?
            .value;
        if lo > hi || hi > lo + extended.set_cost(extra_set) {
            return Err("exclusive-extension sandwich violated".to_string());
        }
    }

    // For three agents, a valid bundle pair always exists in the reduced
    // instance, whichever agent anchors.
    if n == 3 {
        let red = reduce_singletons(inst).map_err(err)?.reduced;
        let pairs = pair_intersections(&red, budget).map_err(err)?;
        for anchor in 0..3 {
            let split = maximin_partition(&red, red.approval(anchor), 3, budget).map_err(err)?;
            let parts = [split.bundles[0], split.bundles[1], split.bundles[2]];
            let others: Vec<usize> = (0..3).filter(|&a| a != anchor).collect();
            let pool = |x: usize, y: usize| {
                pairs
                    .iter()
                    .find(|p| p.pair == (x.min(y), x.max(y)))
                    .expect("pair present")
                    .clone()
            };
            let p12 = pool(anchor, others[0]);
            let p13 = pool(anchor, others[1]);
            if lemma2_select(&red, &parts, p12.goods, p13.goods, p12.mu, p13.mu).is_err() {
                return Err(format!("no bundle pair for anchor {anchor}"));
            }
        }
    }

    Ok(format!("n={n} m={} mms={:?}", inst.num_goods(), profile.values()).replace(',', ""))
}

fn random_allocation(inst: &Instance, rng: &mut ChaCha8Rng) -> Allocation {
    let n = inst.num_agents();
    let mut bundles = vec![GoodSet::EMPTY; n];
    for g in 0..inst.num_goods() {
        bundles[rng.random_range(0..n)].insert(g);
    }
    Allocation::new(inst, bundles).expect("random assignment is a partition")
}

fn scale_instance(inst: &Instance, lambda: u64) -> Instance {
    Instance::from_parts(
        inst.goods()
            .iter()
            .map(|g| (g.id.clone(), g.cost * lambda))
            .collect(),
        inst.agents()
            .iter()
            .map(|a| (a.id.clone(), inst.ids_of_set(a.approves)))
            .collect(),
    )
    .expect("scaled instance stays valid")
}

fn extend_with_exclusive_goods(inst: &Instance, extras: usize, rng: &mut ChaCha8Rng) -> Instance {
    let mut goods: Vec<(String, Value)> = inst
        .goods()
        .iter()
        .map(|g| (g.id.clone(), g.cost))
        .collect();
    let mut extra_ids = Vec::new();
    for i in 0..extras {
        let id = format!("x{i}");
        goods.push((id.clone(), rng.random_range(0..=12)));
        extra_ids.push(id);
    }
    let agents: Vec<(String, Vec<String>)> = inst
        .agents()
        .iter()
        .enumerate()
        .map(|(a, agent)| {
            let mut ids = inst.ids_of_set(agent.approves);
            if a == 0 {
                ids.extend(extra_ids.iter().cloned());
            }
            (agent.id.clone(), ids)
        })
        .collect();
    Instance::from_parts(goods, agents).expect("extension stays valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(trials: u64) -> RunConfig {
        RunConfig {
            seed: 7,
            trials: Some(trials),
            ..RunConfig::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!(matches!(
            "bogus".parse::<Suite>(),
            Err(Error::UnknownSuite { .. })
        ));
    }

    #[test]
    fn small_random_suites_pass() {
        for suite in [Suite::Thm1, Suite::Thm2, Suite::Prop1Sp, Suite::OracleProps] {
            let report = run_experiment(suite, &config(25)).unwrap();
            assert!(report.all_passed(), "{suite}: {:?}", report.summary);
            assert_eq!(report.rows.len(), 25);
        }
    }

    #[test]
    fn prop2_prefix_rows_pass() {
        let report = run_experiment(Suite::Prop2, &config(3)).unwrap();
        assert!(report.all_passed(), "{:?}", report.summary);
        assert_eq!(report.rows.len(), 3);
    }

    #[test]
    fn prop3_suite_certifies() {
        let report = run_experiment(Suite::Prop3, &config(1)).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.summary.verdict, "UNSAT certified");
    }

    #[test]
    fn zero_trials_is_summary_only() {
        let report = run_experiment(Suite::OracleProps, &config(0)).unwrap();
        assert!(report.rows.is_empty());
        assert_eq!(report.summary.trials, 0);
        assert!(report.all_passed());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_experiment(Suite::Thm1, &config(10)).unwrap();
        let b = run_experiment(Suite::Thm1, &config(10)).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert_eq!(a.to_csv_string(), b.to_csv_string());
    }

    #[test]
    fn csv_has_fixed_columns() {
        let report = run_experiment(Suite::Prop3, &config(1)).unwrap();
        let csv = report.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "trial,hash,pass,detail");
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 4);
        assert!(csv.lines().last().unwrap().starts_with("# summary"));
    }

    #[test]
    fn default_trial_counts() {
        assert_eq!(Suite::Prop2.default_trials(), 35 + 56);
        assert_eq!(Suite::Thm1.default_trials(), 10_000);
    }
}
