//! Strategyproofness auditing by exhaustive misreport enumeration, plus a
//! finite unsatisfiability search showing that no mechanism over five fixed
//! goods can combine strategyproofness with maximin shares and efficiency
//! for two agents.

use crate::error::{Error, Result};
use crate::goodset::GoodSet;
use crate::instance::{Instance, Value};
use crate::mechanisms::Mechanism;
use crate::oracle::{maximin_partition, SearchBudget};

/// Which misreports the auditor tries for each agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MisreportScope {
    /// Every subset of the goods (the full strategy space under public costs).
    AllSubsets,
    /// No deviations at all; useful as a sanity bound.
    HonestOnly,
}

/// A profitable unilateral deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationWitness {
    pub agent: usize,
    pub honest_report: GoodSet,
    pub misreport: GoodSet,
    pub honest_value: Value,
    pub manipulated_value: Value,
}

/// Audit outcome for one instance and mechanism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub mechanism: String,
    pub strategyproof: bool,
    pub witness: Option<ManipulationWitness>,
    pub deviations_checked: u64,
}

/// Runs the mechanism on the honest profile and on every unilateral
/// misreport in scope. Returns the first profitable deviation in canonical
/// order (agents ascending, reports ascending by bitmask) or a clean report.
pub fn audit_sp(
    inst: &Instance,
    mechanism: &dyn Mechanism,
    scope: &MisreportScope,
    budget: &SearchBudget,
) -> Result<AuditReport> {
    let n = inst.num_agents();
    let m = inst.num_goods();
    if matches!(scope, MisreportScope::AllSubsets) && m > budget.max_goods {
        return Err(Error::InstanceTooLarge {
            what: format!("2^{m} misreports per agent exceed max_goods={}", budget.max_goods),
        });
    }
    let honest = mechanism.run(inst)?;
    let honest_values: Vec<Value> = (0..n)
        .map(|a| inst.bundle_value(a, honest.bundle(a)))
        .collect();
    let mut deviations_checked = 0;
    if matches!(scope, MisreportScope::AllSubsets) {
        for agent in 0..n {
            let truth = inst.approval(agent);
            for bits in 0..(1u64 << m) {
                let report = GoodSet::from_bits(bits);
                if report == truth {
                    continue;
                }
                deviations_checked += 1;
                let deviated = inst.with_approval(agent, report);
                let outcome = mechanism.run(&deviated)?;
                let manipulated_value = inst.bundle_value(agent, outcome.bundle(agent));
                if manipulated_value > honest_values[agent] {
                    return Ok(AuditReport {
                        mechanism: mechanism.name(),
                        strategyproof: false,
                        witness: Some(ManipulationWitness {
                            agent,
                            honest_report: truth,
                            misreport: report,
                            honest_value: honest_values[agent],
                            manipulated_value,
                        }),
                        deviations_checked,
                    });
                }
            }
        }
    }
    Ok(AuditReport {
        mechanism: mechanism.name(),
        strategyproof: true,
        witness: None,
        deviations_checked,
    })
}

/// One approval profile of the impossibility family, with its exact shares
/// and the allocations that clear both the share and efficiency axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop3Profile {
    pub label: String,
    pub approvals: [GoodSet; 2],
    pub mms: [Value; 2],
    pub admissible: Vec<[GoodSet; 2]>,
}

/// Surviving allocations at one step of the forcing narrative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop3ChainStep {
    pub label: String,
    pub allocations: Vec<[GoodSet; 2]>,
}

/// Unsatisfiability certificate over the five-good, two-agent family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop3Certificate {
    pub instance: Instance,
    pub profiles: Vec<Prop3Profile>,
    /// Forcing narrative for the branch where agent 1 takes the cheap
    /// three-good bundle at the symmetric profile.
    pub chain: Vec<Prop3ChainStep>,
    /// Number of profile pairs differing in exactly one agent's report.
    pub sp_links: usize,
    pub assignments_explored: u64,
    pub consistent_assignments: u64,
    pub unsat: bool,
}

fn prop3_instance() -> Instance {
    Instance::from_parts(
        (2..=6).map(|c| (format!("g{c}"), c as Value)).collect(),
        vec![("1".to_string(), vec![]), ("2".to_string(), vec![])],
    )
    .expect("fixed instance is valid")
}

fn subsets_of(universe: GoodSet) -> Vec<GoodSet> {
    // Ascending by bitmask value for deterministic enumeration.
    let indices: Vec<usize> = universe.iter().collect();
    let mut out = Vec::with_capacity(1 << indices.len());
    for pick in 0u64..(1u64 << indices.len()) {
        let mut set = GoodSet::EMPTY;
        for (pos, &idx) in indices.iter().enumerate() {
            if pick & (1 << pos) != 0 {
                set.insert(idx);
            }
        }
        out.push(set);
    }
    out.sort_by_key(|s| s.bits());
    out
}

/// Allocations of the approved goods meeting both agents' shares with every
/// approved good held by an approver. Goods approved by nobody are excluded:
/// they influence neither shares, nor efficiency, nor deviation payoffs.
fn admissible_allocations(
    inst: &Instance,
    approvals: &[GoodSet; 2],
    mms: &[Value; 2],
) -> Vec<[GoodSet; 2]> {
    let universe = approvals[0] | approvals[1];
    let mut out = Vec::new();
    for first in subsets_of(universe) {
        let second = universe - first;
        if !first.is_subset(approvals[0]) || !second.is_subset(approvals[1]) {
            continue;
        }
        if inst.set_cost(first & approvals[0]) < mms[0]
            || inst.set_cost(second & approvals[1]) < mms[1]
        {
            continue;
        }
        out.push([first, second]);
    }
    out
}

fn profile_data(
    inst: &Instance,
    label: &str,
    approvals: [GoodSet; 2],
    budget: &SearchBudget,
) -> Result<Prop3Profile> {
    let mms = [
        maximin_partition(inst, approvals[0], 2, budget)?.value,
        maximin_partition(inst, approvals[1], 2, budget)?.value,
    ];
    let admissible = admissible_allocations(inst, &approvals, &mms);
    Ok(Prop3Profile {
        label: label.to_string(),
        approvals,
        mms,
        admissible,
    })
}

/// Both no-gain directions for a pair of profiles differing in one agent's
/// report: whichever of the two reports is the agent's true type, switching
/// to the other must not raise the true value of the received bundle.
fn sp_compatible(
    inst: &Instance,
    p: &Prop3Profile,
    q: &Prop3Profile,
    agent: usize,
    alloc_p: &[GoodSet; 2],
    alloc_q: &[GoodSet; 2],
) -> bool {
    let true_p = p.approvals[agent];
    let true_q = q.approvals[agent];
    let gain_from_p = inst.set_cost(alloc_q[agent] & true_p) > inst.set_cost(alloc_p[agent] & true_p);
    let gain_from_q = inst.set_cost(alloc_p[agent] & true_q) > inst.set_cost(alloc_q[agent] & true_q);
    !gain_from_p && !gain_from_q
}

fn single_difference(p: &Prop3Profile, q: &Prop3Profile) -> Option<usize> {
    match (p.approvals[0] == q.approvals[0], p.approvals[1] == q.approvals[1]) {
        (false, true) => Some(0),
        (true, false) => Some(1),
        _ => None,
    }
}

/// Exhaustive backtracking over one allocation choice per profile, subject
/// to all pairwise deviation constraints. Returns (nodes visited, complete
/// consistent assignments).
fn count_consistent(
    inst: &Instance,
    profiles: &[Prop3Profile],
    links: &[(usize, usize, usize)],
) -> (u64, u64) {
    let mut choice: Vec<usize> = Vec::new();
    let mut explored = 0u64;
    let mut consistent = 0u64;
    fn recurse(
        inst: &Instance,
        profiles: &[Prop3Profile],
        links: &[(usize, usize, usize)],
        choice: &mut Vec<usize>,
        explored: &mut u64,
        consistent: &mut u64,
    ) {
        let next = choice.len();
        if next == profiles.len() {
            *consistent += 1;
            return;
        }
        'candidates: for c in 0..profiles[next].admissible.len() {
            *explored += 1;
            for &(i, j, agent) in links {
                let (lo, hi) = (i.min(j), i.max(j));
                if hi != next || lo >= next {
                    continue;
                }
                let alloc_lo = &profiles[lo].admissible[choice[lo]];
                let alloc_hi = &profiles[hi].admissible[c];
                if !sp_compatible(inst, &profiles[lo], &profiles[hi], agent, alloc_lo, alloc_hi) {
                    continue 'candidates;
                }
            }
            choice.push(c);
            recurse(inst, profiles, links, choice, explored, consistent);
            choice.pop();
        }
    }
    recurse(inst, profiles, links, &mut choice, &mut explored, &mut consistent);
    (explored, consistent)
}

fn build_links(profiles: &[Prop3Profile]) -> Vec<(usize, usize, usize)> {
    let mut links = Vec::new();
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            if let Some(agent) = single_difference(&profiles[i], &profiles[j]) {
                links.push((i, j, agent));
            }
        }
    }
    links
}

/// Builds the six-step forcing narrative plus the exhaustive certificate.
///
/// The narrative fixes the branch where agent 1 receives the cheap
/// three-good bundle at the symmetric first profile and propagates the
/// no-gain constraints step by step; the final step returns to the second
/// profile and survives with no allocation at all. Because the axioms are
/// symmetric in the two agents, the opposite branch is covered by the
/// mirrored profiles (agents' reports swapped), which the exhaustive search
/// includes; on the literal profiles alone the opposite branch survives.
pub fn replicate_prop3() -> Result<Prop3Certificate> {
    let budget = SearchBudget::default();
    let inst = prop3_instance();
    let ids = |names: &[u32]| -> GoodSet {
        names
            .iter()
            .map(|c| inst.good_index(&format!("g{c}")).expect("fixed ids"))
            .collect()
    };
    let all = ids(&[2, 3, 4, 5, 6]);
    let a456 = ids(&[4, 5, 6]);
    let literal: Vec<(&str, [GoodSet; 2])> = vec![
        ("I1", [all, all]),
        ("I2", [all, a456]),
        ("I3", [ids(&[3, 4, 5, 6]), a456]),
        ("I4", [ids(&[6]), a456]),
        ("I5", [ids(&[2, 3, 6]), a456]),
    ];
    let mut profiles = Vec::new();
    for (label, approvals) in &literal {
        profiles.push(profile_data(&inst, label, *approvals, &budget)?);
    }
    for (label, approvals) in literal.iter().skip(1) {
        profiles.push(profile_data(
            &inst,
            &format!("{label}-mirror"),
            [approvals[1], approvals[0]],
            &budget,
        )?);
    }
    let links = build_links(&profiles);
    let (assignments_explored, consistent_assignments) =
        count_consistent(&inst, &profiles, &links);

    // Forcing narrative on the literal profiles, starting from the branch
    // where agent 1 holds the cheap three goods.
    let branch_start = [ids(&[2, 3, 5]), ids(&[4, 6])];
    assert!(profiles[0].admissible.contains(&branch_start));
    let mut chain = vec![Prop3ChainStep {
        label: "I1".to_string(),
        allocations: vec![branch_start],
    }];
    for step in 1..=4 {
        let prev = &chain[step - 1];
        let prev_profile = &profiles[step - 1];
        let here = &profiles[step];
        let agent = single_difference(prev_profile, here).expect("chain differs in one agent");
        let survivors: Vec<[GoodSet; 2]> = here
            .admissible
            .iter()
            .filter(|alloc| {
                prev.allocations
                    .iter()
                    .any(|p| sp_compatible(&inst, prev_profile, here, agent, p, alloc))
            })
            .cloned()
            .collect();
        chain.push(Prop3ChainStep {
            label: here.label.clone(),
            allocations: survivors,
        });
    }
    // Final step: the profile equals the second one, so its allocation must
    // come from that step's survivors while also respecting the link to the
    // fifth profile.
    let second_step = chain[1].allocations.clone();
    let fifth = &profiles[4];
    let second_profile = &profiles[1];
    let agent = single_difference(fifth, second_profile).expect("one-agent difference");
    let survivors: Vec<[GoodSet; 2]> = second_step
        .into_iter()
        .filter(|alloc| {
            chain[4]
                .allocations
                .iter()
                .any(|p| sp_compatible(&inst, fifth, second_profile, agent, p, alloc))
        })
        .collect();
    chain.push(Prop3ChainStep {
        label: "I6".to_string(),
        allocations: survivors,
    });

    Ok(Prop3Certificate {
        instance: inst,
        sp_links: links.len(),
        unsat: consistent_assignments == 0,
        assignments_explored,
        consistent_assignments,
        profiles,
        chain,
    })
}
