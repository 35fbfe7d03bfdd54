//! Maximin-share allocations for any number of agents whose approval sets
//! form a laminar family (any two sets are nested or disjoint). The instance
//! splits into independent parts under the maximal approval sets, and inside
//! each part a recursion peels one non-full approver at a time: lift it to a
//! full approver, solve, then either swap it onto a bundle it already likes
//! or recurse into its own approval set and merge.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::goodset::GoodSet;
use crate::instance::{Allocation, Instance};
use crate::oracle::{maximin_partition, SearchBudget};

const RECURSION_LIMIT: usize = 4096;

/// Outcome of the laminarity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarCheck {
    pub laminar: bool,
    /// First crossing agent pair, if any.
    pub witness: Option<(usize, usize)>,
}

/// True iff every pair of approval sets is nested or disjoint.
pub fn is_laminar(inst: &Instance) -> LaminarCheck {
    let n = inst.num_agents();
    for i in 0..n {
        for j in i + 1..n {
            let a = inst.approval(i);
            let b = inst.approval(j);
            if !a.is_subset(b) && !b.is_subset(a) && !a.is_disjoint(b) {
                return LaminarCheck {
                    laminar: false,
                    witness: Some((i, j)),
                };
            }
        }
    }
    LaminarCheck {
        laminar: true,
        witness: None,
    }
}

/// One node of the containment forest over distinct nonempty approval sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestNode {
    pub set: GoodSet,
    /// Index of the unique minimal strict superset among the nodes.
    pub parent: Option<usize>,
    /// Agents whose approval set equals this node.
    pub agents: Vec<usize>,
}

/// Containment forest of the distinct nonempty approval sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarForest {
    pub nodes: Vec<ForestNode>,
    pub roots: Vec<usize>,
    /// Agents with empty approval sets; they sit outside the forest.
    pub unattached: Vec<usize>,
}

pub fn laminar_forest(inst: &Instance) -> Result<LaminarForest> {
    let check = is_laminar(inst);
    if let Some(pair) = check.witness {
        return Err(Error::NotLaminar { pair });
    }
    let mut sets: Vec<GoodSet> = Vec::new();
    for a in 0..inst.num_agents() {
        let s = inst.approval(a);
        if !s.is_empty() && !sets.contains(&s) {
            sets.push(s);
        }
    }
    sets.sort_by_key(|s| (s.lowest().unwrap(), std::cmp::Reverse(s.len()), s.bits()));
    let mut nodes: Vec<ForestNode> = sets
        .iter()
        .map(|&set| ForestNode {
            set,
            parent: None,
            agents: (0..inst.num_agents())
                .filter(|&a| inst.approval(a) == set)
                .collect(),
        })
        .collect();
    for idx in 0..nodes.len() {
        let set = nodes[idx].set;
        let parent = (0..nodes.len())
            .filter(|&other| {
                let sup = nodes[other].set;
                set != sup && set.is_subset(sup)
            })
            .min_by_key(|&other| nodes[other].set.len());
        nodes[idx].parent = parent;
    }
    let roots = (0..nodes.len()).filter(|&i| nodes[i].parent.is_none()).collect();
    let unattached = (0..inst.num_agents())
        .filter(|&a| inst.approval(a).is_empty())
        .collect();
    Ok(LaminarForest {
        nodes,
        roots,
        unattached,
    })
}

/// One independent part of a laminar instance: the goods of a maximal
/// approval set and the agents whose approvals sit inside it.
#[derive(Debug, Clone)]
pub struct SubInstance {
    pub instance: Instance,
    /// Sub-instance agent index -> original agent index.
    pub agent_map: Vec<usize>,
    /// Sub-instance good index -> original good index.
    pub good_map: Vec<usize>,
}

/// Split of a laminar instance into independent parts.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub parts: Vec<SubInstance>,
    /// Goods approved by nobody; outside every part.
    pub leftover: GoodSet,
    /// Agents with empty approval sets; they join no part.
    pub idle_agents: Vec<usize>,
}

/// Splits the instance along the maximal approval sets. Each part contains
/// one maximal set's goods and the agents whose approvals lie inside it, so
/// at least one agent of every part approves all of its goods.
pub fn decompose(inst: &Instance) -> Result<Decomposition> {
    let forest = laminar_forest(inst)?;
    let mut parts = Vec::new();
    for &root in &forest.roots {
        let root_set = forest.nodes[root].set;
        let agent_map: Vec<usize> = (0..inst.num_agents())
            .filter(|&a| {
                let s = inst.approval(a);
                !s.is_empty() && s.is_subset(root_set)
            })
            .collect();
        let (goods_only, good_map) = inst.restrict_goods(root_set);
        let instance = goods_only.select_agents(&agent_map);
        parts.push(SubInstance {
            instance,
            agent_map,
            good_map,
        });
    }
    let covered = forest
        .roots
        .iter()
        .fold(GoodSet::EMPTY, |acc, &r| acc | forest.nodes[r].set);
    Ok(Decomposition {
        parts,
        leftover: inst.all_goods() - covered,
        idle_agents: forest.unattached,
    })
}

/// Recursive solver for one part. State is the current good set plus the set
/// of agents whose approvals were lifted to "everything"; every other
/// agent's approval is its original set intersected with the current goods.
struct PartSolver<'a> {
    inst: &'a Instance,
    budget: &'a SearchBudget,
    memo: HashMap<(u64, u64), Vec<GoodSet>>,
}

impl<'a> PartSolver<'a> {
    fn new(inst: &'a Instance, budget: &'a SearchBudget) -> Self {
        PartSolver {
            inst,
            budget,
            memo: HashMap::new(),
        }
    }

    fn approvals(&self, goods: GoodSet, lifted: u64) -> Vec<GoodSet> {
        (0..self.inst.num_agents())
            .map(|j| {
                if lifted & (1 << j) != 0 {
                    goods
                } else {
                    self.inst.approval(j) & goods
                }
            })
            .collect()
    }

    fn solve(&mut self, goods: GoodSet, lifted: u64, depth: usize) -> Result<Vec<GoodSet>> {
        if depth > RECURSION_LIMIT {
            return Err(Error::RecursionLimit);
        }
        if let Some(hit) = self.memo.get(&(goods.bits(), lifted)) {
            return Ok(hit.clone());
        }
        let n = self.inst.num_agents();
        let approvals = self.approvals(goods, lifted);
        let full: Vec<usize> = (0..n).filter(|&j| approvals[j] == goods).collect();
        assert!(!full.is_empty(), "every part has a full approver");

        let bundles = if full.len() == n {
            // Identical valuations: hand out an exact maximin split in index
            // order.
            maximin_partition(self.inst, goods, n, self.budget)?.bundles
        } else {
            let non_full: Vec<usize> = (0..n).filter(|j| !full.contains(j)).collect();
            // Maximal approval set among the non-full approvers, lowest
            // index on ties.
            let peel = *non_full
                .iter()
                .find(|&&j| {
                    non_full.iter().all(|&other| {
                        other == j
                            || !(approvals[j] != approvals[other]
                                && approvals[j].is_subset(approvals[other]))
                    })
                })
                .expect("a maximal non-full approver exists");

            let lifted_bundles = self.solve(goods, lifted | (1 << peel), depth + 1)?;

            let mut candidates: Vec<usize> = full.clone();
            candidates.push(peel);
            candidates.sort_unstable();
            let mut target = candidates[0];
            let mut best = self.value(&approvals, peel, lifted_bundles[target]);
            for &j in &candidates[1..] {
                let v = self.value(&approvals, peel, lifted_bundles[j]);
                if v > best {
                    best = v;
                    target = j;
                }
            }

            let own_share =
                maximin_partition(self.inst, approvals[peel], n, self.budget)?.value;
            if best >= own_share {
                // The peeled agent already likes somebody's bundle enough:
                // swap the two bundles.
                let mut swapped = lifted_bundles;
                swapped.swap(peel, target);
                swapped
            } else {
                // Re-divide the peeled agent's approval set among everyone
                // and merge with the outside remainders.
                let inner = self.solve(approvals[peel], lifted, depth + 1)?;
                let merged: Vec<GoodSet> = (0..n)
                    .map(|j| (lifted_bundles[j] - approvals[peel]) | inner[j])
                    .collect();
                for &j in &full {
                    assert!(
                        self.inst.set_cost(merged[j] & goods)
                            > self.inst.set_cost(lifted_bundles[j] & goods),
                        "full approvers strictly gain in the merge"
                    );
                }
                merged
            }
        };
        debug_assert_eq!(
            bundles.iter().fold(GoodSet::EMPTY, |acc, &b| acc | b),
            goods
        );
        debug_assert_eq!(bundles.iter().map(|b| b.len()).sum::<usize>(), goods.len());
        self.memo.insert((goods.bits(), lifted), bundles.clone());
        Ok(bundles)
    }

    fn value(&self, approvals: &[GoodSet], agent: usize, bundle: GoodSet) -> u64 {
        self.inst.set_cost(bundle & approvals[agent])
    }
}

/// Produces a maximin-share allocation for a laminar instance. The output
/// may hand an agent goods outside its approval set; run [`pareto_repair`]
/// afterwards for an efficient allocation.
pub fn solve_laminar(inst: &Instance, budget: &SearchBudget) -> Result<Allocation> {
    let decomp = decompose(inst)?;
    let mut bundles = vec![GoodSet::EMPTY; inst.num_agents()];
    for part in &decomp.parts {
        let sub = &part.instance;
        let sub_bundles =
            PartSolver::new(sub, budget).solve(sub.all_goods(), 0, 0)?;
        for (sub_agent, &orig_agent) in part.agent_map.iter().enumerate() {
            for sub_good in sub_bundles[sub_agent].iter() {
                bundles[orig_agent].insert(part.good_map[sub_good]);
            }
        }
    }
    bundles[0] = bundles[0] | decomp.leftover;
    Allocation::new(inst, bundles)
}

/// Moves every approved good that sits with a non-approver to its
/// lowest-indexed approver. Each move leaves the loser's value unchanged and
/// never lowers the receiver's, so any maximin guarantee is preserved and
/// the result passes the efficiency check.
pub fn pareto_repair(inst: &Instance, alloc: &Allocation) -> Allocation {
    let mut bundles: Vec<GoodSet> = alloc.bundles().to_vec();
    for good in 0..inst.num_goods() {
        let approvers = inst.approvers(good);
        if approvers.is_empty() {
            continue;
        }
        let holder = bundles
            .iter()
            .position(|b| b.contains(good))
            .expect("allocation is complete");
        if !inst.approval(holder).contains(good) {
            bundles[holder].remove(good);
            bundles[approvers[0]].insert(good);
        }
    }
    Allocation::new(inst, bundles).expect("repair preserves a complete partition")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{is_pareto_efficient, Value};
    use crate::oracle::{mms_profile, mms_value, verify_mms};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    fn build(costs: &[Value], approvals: &[&[usize]]) -> Instance {
        let goods: Vec<(String, Value)> = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| (format!("g{i}"), c))
            .collect();
        let agents = approvals
            .iter()
            .enumerate()
            .map(|(a, approved)| {
                (
                    format!("a{a}"),
                    approved.iter().map(|&g| format!("g{g}")).collect(),
                )
            })
            .collect();
        Instance::from_parts(goods, agents).unwrap()
    }

    /// Random laminar instance built by recursive block splitting, mirroring
    /// the generator in `gen` but kept local so this module's tests stand on
    /// their own.
    fn random_laminar(rng: &mut ChaCha8Rng, n: usize, m: usize, max_cost: Value) -> Instance {
        let costs: Vec<Value> = (0..m).map(|_| rng.random_range(0..=max_cost)).collect();
        let mut nodes: Vec<Vec<usize>> = vec![(0..m).collect()];
        let mut frontier = vec![(0..m).collect::<Vec<usize>>()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for block in frontier {
                if block.len() < 2 || rng.random_bool(0.4) {
                    continue;
                }
                let cut = rng.random_range(1..block.len());
                let (left, right) = block.split_at(cut);
                nodes.push(left.to_vec());
                nodes.push(right.to_vec());
                next.push(left.to_vec());
                next.push(right.to_vec());
            }
            frontier = next;
        }
        let goods: Vec<(String, Value)> = costs
            .iter()
            .enumerate()
            .map(|(i, &c)| (format!("g{i}"), c))
            .collect();
        let agents = (0..n)
            .map(|a| {
                let node = &nodes[rng.random_range(0..nodes.len())];
                (
                    format!("a{a}"),
                    node.iter().map(|&g| format!("g{g}")).collect(),
                )
            })
            .collect();
        Instance::from_parts(goods, agents).unwrap()
    }

    #[test]
    fn laminar_check_examples() {
        let nested = build(&[1, 1], &[&[0, 1], &[0]]);
        assert!(is_laminar(&nested).laminar);

        let crossing = build(&[1, 1, 1], &[&[0, 1], &[1, 2]]);
        let check = is_laminar(&crossing);
        assert!(!check.laminar);
        assert_eq!(check.witness, Some((0, 1)));

        let disjoint = build(&[1, 1, 1], &[&[0, 1], &[2]]);
        assert!(is_laminar(&disjoint).laminar);
    }

    #[test]
    fn forest_structure() {
        let inst = build(&[1, 1, 1, 1], &[&[0, 1, 2, 3], &[0, 1], &[0, 1], &[2]]);
        let forest = laminar_forest(&inst).unwrap();
        assert_eq!(forest.roots.len(), 1);
        let root = &forest.nodes[forest.roots[0]];
        assert_eq!(root.set, inst.all_goods());
        assert_eq!(root.agents, vec![0]);
        let child = forest
            .nodes
            .iter()
            .find(|n| n.set == inst.set_from_ids(["g0", "g1"]).unwrap())
            .unwrap();
        assert_eq!(child.parent, Some(forest.roots[0]));
        assert_eq!(child.agents, vec![1, 2]);
        assert!(forest.unattached.is_empty());
    }

    #[test]
    fn decompose_splits_disjoint_roots() {
        let inst = build(&[1, 1, 1], &[&[0, 1], &[2]]);
        let d = decompose(&inst).unwrap();
        assert_eq!(d.parts.len(), 2);
        assert_eq!(d.parts[0].agent_map, vec![0]);
        assert_eq!(d.parts[1].agent_map, vec![1]);
        assert!(d.leftover.is_empty());
    }

    #[test]
    fn decompose_single_root_keeps_everything() {
        let inst = build(&[1, 2], &[&[0, 1], &[0, 1]]);
        let d = decompose(&inst).unwrap();
        assert_eq!(d.parts.len(), 1);
        assert_eq!(d.parts[0].agent_map, vec![0, 1]);
        assert_eq!(d.parts[0].instance.num_goods(), 2);
    }

    #[test]
    fn decompose_groups_nested_agents_under_one_root() {
        let inst = build(&[1, 1, 1, 1], &[&[0, 1, 2, 3], &[0, 1], &[0, 1]]);
        let d = decompose(&inst).unwrap();
        assert_eq!(d.parts.len(), 1);
        assert_eq!(d.parts[0].agent_map, vec![0, 1, 2]);
    }

    #[test]
    fn decompose_rejects_crossing_sets() {
        let inst = build(&[1, 1, 1], &[&[0, 1], &[1, 2]]);
        assert!(matches!(
            decompose(&inst).unwrap_err(),
            Error::NotLaminar { pair: (0, 1) }
        ));
    }

    #[test]
    fn solve_base_case_symmetric() {
        for n in 1..=4usize {
            let m = 2 * n;
            let costs = vec![1; m];
            let approvals: Vec<Vec<usize>> = (0..n).map(|_| (0..m).collect()).collect();
            let slices: Vec<&[usize]> = approvals.iter().map(|v| v.as_slice()).collect();
            let inst = build(&costs, &slices);
            let alloc = solve_laminar(&inst, &budget()).unwrap();
            for a in 0..n {
                assert!(inst.bundle_value(a, alloc.bundle(a)) >= 2);
            }
        }
    }

    #[test]
    fn solve_nested_example() {
        let inst = build(&[1, 1, 1, 1], &[&[0, 1, 2, 3], &[0, 1], &[0, 1]]);
        let profile = mms_profile(&inst, &budget()).unwrap();
        assert_eq!(profile.values(), vec![1, 0, 0]);
        let alloc = solve_laminar(&inst, &budget()).unwrap();
        assert!(verify_mms(&inst, &alloc, &profile).ok);
    }

    #[test]
    fn solve_randomized_against_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x2b);
        for round in 0..300 {
            let n = rng.random_range(1..=5);
            let m = rng.random_range(0..=10);
            let inst = random_laminar(&mut rng, n, m, 20);
            let alloc = solve_laminar(&inst, &budget()).unwrap();
            let profile = mms_profile(&inst, &budget()).unwrap();
            let report = verify_mms(&inst, &alloc, &profile);
            assert!(report.ok, "round {round}: {report:?} on {inst:?}");
            let repaired = pareto_repair(&inst, &alloc);
            let report = verify_mms(&inst, &repaired, &profile);
            assert!(report.ok, "round {round} post-repair: {report:?}");
            assert!(is_pareto_efficient(&inst, &repaired).efficient, "round {round}");
        }
    }

    #[test]
    fn lifting_preserves_other_agents_shares() {
        // Raising one agent's approval set to everything leaves every other
        // agent's maximin share untouched.
        let mut rng = ChaCha8Rng::seed_from_u64(0x91);
        for _ in 0..50 {
            let n = rng.random_range(2..=4);
            let m = rng.random_range(1..=8);
            let inst = random_laminar(&mut rng, n, m, 10);
            let lifted = inst.with_approval(0, inst.all_goods());
            for agent in 1..n {
                let before = mms_value(&inst, agent, n, &budget()).unwrap().value;
                let after = mms_value(&lifted, agent, n, &budget()).unwrap().value;
                assert_eq!(before, after);
            }
        }
    }

    #[test]
    fn repair_moves_goods_to_approvers() {
        let inst = build(&[5], &[&[], &[0]]);
        let alloc = Allocation::new(&inst, vec![GoodSet::singleton(0), GoodSet::EMPTY]).unwrap();
        let repaired = pareto_repair(&inst, &alloc);
        assert_eq!(repaired.bundle(1), GoodSet::singleton(0));
        assert!(is_pareto_efficient(&inst, &repaired).efficient);
    }

    #[test]
    fn repair_is_identity_on_efficient_allocations() {
        let inst = build(&[2, 3], &[&[0], &[1]]);
        let alloc = Allocation::new(
            &inst,
            vec![GoodSet::singleton(0), GoodSet::singleton(1)],
        )
        .unwrap();
        assert_eq!(pareto_repair(&inst, &alloc), alloc);
    }
}
