//! Sequential Allocation: agents take turns, in a fixed sequence, picking
//! their highest-cost available approved good. Includes the two picking
//! sequences with strategyproofness guarantees and the rank-based share
//! bound used to reason about the n+2-good case.

use crate::error::{Error, Result};
use crate::goodset::GoodSet;
use crate::instance::{Allocation, Instance, Value};

/// An ordered list of agent turns; agents may repeat, any length is fine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PickingSequence(pub Vec<usize>);

impl PickingSequence {
    pub fn turns(&self) -> &[usize] {
        &self.0
    }
}

/// One turn of the simulation: the agent picked a good or had to skip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PickEvent {
    pub turn: usize,
    pub agent: usize,
    pub good: Option<usize>,
}

/// Full record of a Sequential Allocation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismRun {
    pub instance: Instance,
    pub sequence: PickingSequence,
    pub trace: Vec<PickEvent>,
    /// Goods nobody picked, assigned afterwards for completeness.
    pub leftovers: Vec<usize>,
    pub result: Allocation,
}

/// Simulates Sequential Allocation. At each turn the picker takes its
/// highest-cost available approved good; among equal costs the good with the
/// later canonical position (higher id) counts as highest. A picker with no
/// available approved good skips.
///
/// Unpicked goods are assigned afterwards so the allocation stays a complete
/// partition: a good somebody reported goes to its highest-indexed reported
/// approver, and a good nobody reported goes to the last agent. Pointing
/// either rule at an earlier agent opens manipulations. With the fallback at
/// agent 0, an agent with split turns can leave its top good out of its
/// report, spend the freed pick on a contested good, and collect the hidden
/// one through the fallback. With stranded goods routed to their
/// lowest-indexed approver, the last agent can under-report so that a good
/// it would lose to an earlier co-approver strands unreported and returns to
/// it through the fallback instead. Routing both rules to the latest agent
/// removes the incentive: hiding a good can only send it where honesty
/// already did, or away from the hider.
pub fn run_sequential(inst: &Instance, sequence: &PickingSequence) -> Result<MechanismRun> {
    let n = inst.num_agents();
    for &agent in sequence.turns() {
        if agent >= n {
            return Err(Error::InvalidSequenceIndex {
                index: agent,
                agents: n,
            });
        }
    }
    let mut available = inst.all_goods();
    let mut bundles = vec![GoodSet::EMPTY; n];
    let mut trace = Vec::with_capacity(sequence.turns().len());
    for (turn, &agent) in sequence.turns().iter().enumerate() {
        let choices = available & inst.approval(agent);
        let pick = choices.highest();
        if let Some(good) = pick {
            available.remove(good);
            bundles[agent].insert(good);
        }
        trace.push(PickEvent {
            turn,
            agent,
            good: pick,
        });
    }
    let leftovers: Vec<usize> = available.iter().collect();
    for &good in &leftovers {
        let approvers = inst.approvers(good);
        let target = approvers.last().copied().unwrap_or(n - 1);
        bundles[target].insert(good);
    }
    let result = Allocation::new(inst, bundles)?;
    Ok(MechanismRun {
        instance: inst.clone(),
        sequence: sequence.clone(),
        trace,
        leftovers,
        result,
    })
}

/// The general strategyproof sequence: agents 1..n in order, two extra turns
/// for the last agent, then each agent in reverse order gets m consecutive
/// turns, enough to exhaust its approvals.
pub fn prop1_sequence(n: usize, m: usize) -> PickingSequence {
    let mut turns = Vec::with_capacity(n + 2 + n * m);
    turns.extend(0..n);
    turns.push(n - 1);
    turns.push(n - 1);
    for agent in (0..n).rev() {
        for _ in 0..m {
            turns.push(agent);
        }
    }
    PickingSequence(turns)
}

/// The n+2-good sequence. Whether the last turn goes to the last or the
/// second-to-last agent depends on how the fourth-cheapest good compares to
/// the second- and third-cheapest combined.
pub fn prop2_sequence(inst: &Instance) -> Result<PickingSequence> {
    let n = inst.num_agents();
    let m = inst.num_goods();
    if n < 2 {
        return Err(Error::TooFewAgents {
            minimum: 2,
            actual: n,
        });
    }
    if m != n + 2 {
        return Err(Error::WrongGoodsCount {
            expected: n + 2,
            actual: m,
        });
    }
    let mut turns: Vec<usize> = (0..n).collect();
    turns.push(n - 1);
    if inst.cost(3) > inst.cost(1) + inst.cost(2) {
        turns.push(n - 1);
    } else {
        turns.push(n - 2);
    }
    Ok(PickingSequence(turns))
}

/// With n+2 goods, an agent approving n+k goods (k capped at 2) has at most
/// k non-singleton bundles in any n-partition of its approvals, so the
/// (n-k)-th most valuable approved good already meets its maximin share.
/// Returns that good's cost.
pub fn lemma4_bound(inst: &Instance, agent: usize) -> Result<Value> {
    let n = inst.num_agents();
    let m = inst.num_goods();
    if m != n + 2 {
        return Err(Error::WrongGoodsCount {
            expected: n + 2,
            actual: m,
        });
    }
    let approved = inst.approval(agent);
    if approved.len() < n {
        return Err(Error::InvalidParameter {
            what: format!(
                "agent {agent} approves {} goods, fewer than the {n} required",
                approved.len()
            ),
        });
    }
    let k = (approved.len() - n).min(2);
    if n - k < 1 {
        return Err(Error::DegenerateRank);
    }
    let mut costs: Vec<Value> = approved.iter().map(|g| inst.cost(g)).collect();
    costs.sort_unstable_by(|a, b| b.cmp(a));
    Ok(costs[n - k - 1])
}

/// Allocation mechanisms the strategyproofness auditor can drive.
pub trait Mechanism {
    fn name(&self) -> String;
    fn run(&self, inst: &Instance) -> Result<Allocation>;
}

/// Sequential Allocation with the general strategyproof sequence.
pub struct Prop1Mechanism;

impl Mechanism for Prop1Mechanism {
    fn name(&self) -> String {
        "prop1".to_string()
    }

    fn run(&self, inst: &Instance) -> Result<Allocation> {
        let seq = prop1_sequence(inst.num_agents(), inst.num_goods());
        Ok(run_sequential(inst, &seq)?.result)
    }
}

/// Sequential Allocation with the n+2-good sequence. A single agent simply
/// takes everything it approves (three turns suffice for three goods).
pub struct Prop2Mechanism;

impl Mechanism for Prop2Mechanism {
    fn name(&self) -> String {
        "prop2".to_string()
    }

    fn run(&self, inst: &Instance) -> Result<Allocation> {
        let seq = if inst.num_agents() == 1 {
            if inst.num_goods() != 3 {
                return Err(Error::WrongGoodsCount {
                    expected: 3,
                    actual: inst.num_goods(),
                });
            }
            PickingSequence(vec![0, 0, 0])
        } else {
            prop2_sequence(inst)?
        };
        Ok(run_sequential(inst, &seq)?.result)
    }
}

/// Sequential Allocation with a caller-supplied sequence.
pub struct FixedSequenceMechanism(pub PickingSequence);

impl Mechanism for FixedSequenceMechanism {
    fn name(&self) -> String {
        let turns: Vec<String> = self.0.turns().iter().map(|t| t.to_string()).collect();
        format!("seq:{}", turns.join(","))
    }

    fn run(&self, inst: &Instance) -> Result<Allocation> {
        Ok(run_sequential(inst, &self.0)?.result)
    }
}
