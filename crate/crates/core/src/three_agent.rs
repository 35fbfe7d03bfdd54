//! Constructive allocation for exactly three agents: always produces an
//! allocation that clears every agent's maximin share and is Pareto
//! efficient. The construction anchors on the agent whose combined guarantee
//! score is highest, carves that agent's approval set into three rich
//! bundles, and hands each of the other two agents the part of one bundle
//! they approve plus half of the goods only the two of them want.

use crate::error::{Error, Result};
use crate::goodset::GoodSet;
use crate::instance::{Allocation, Instance, Value};
use crate::oracle::{maximin_partition, mms_value, SearchBudget};

/// Goods approved by exactly one unordered pair of agents, together with the
/// value each of the two can guarantee when splitting those goods two ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairIntersection {
    pub pair: (usize, usize),
    pub goods: GoodSet,
    pub mu: Value,
}

/// An agent's own maximin share plus the split guarantee of the *other* two
/// agents' exclusive pool. The agent with the highest score anchors the
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QScore {
    pub agent: usize,
    pub q: Value,
}

/// Result of stripping goods approved by at most one agent.
#[derive(Debug, Clone)]
pub struct SingletonReduction {
    /// Instance containing only goods approved by two or more agents.
    pub reduced: Instance,
    /// Maps each reduced good index back to the original index.
    pub kept: Vec<usize>,
    /// Per original agent: the goods only that agent approves.
    pub stripped: Vec<GoodSet>,
}

/// Removes every good approved by fewer than two agents. Goods approved by a
/// single agent are recorded per agent so they can be re-attached to that
/// agent's bundle afterwards; goods approved by nobody are left to the
/// caller's completeness rule.
pub fn reduce_singletons(inst: &Instance) -> Result<SingletonReduction> {
    if inst.num_agents() != 3 {
        return Err(Error::WrongAgentCount {
            expected: 3,
            actual: inst.num_agents(),
        });
    }
    let mut keep = GoodSet::EMPTY;
    let mut stripped = vec![GoodSet::EMPTY; 3];
    for good in 0..inst.num_goods() {
        let approvers = inst.approvers(good);
        match approvers.len() {
            0 => {}
            1 => stripped[approvers[0]].insert(good),
            _ => keep.insert(good),
        }
    }
    let (reduced, kept) = inst.restrict_goods(keep);
    Ok(SingletonReduction {
        reduced,
        kept,
        stripped,
    })
}

/// Exclusive pair pools and their split guarantees for a 3-agent instance.
pub fn pair_intersections(inst: &Instance, budget: &SearchBudget) -> Result<[PairIntersection; 3]> {
    assert_eq!(inst.num_agents(), 3);
    let mut out = Vec::with_capacity(3);
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let k = 3 - i - j;
        let goods = (inst.approval(i) & inst.approval(j)) - inst.approval(k);
        let mu = maximin_partition(inst, goods, 2, budget)?.value;
        out.push(PairIntersection {
            pair: (i, j),
            goods,
            mu,
        });
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Picks two distinct bundle indices `(k, l)` from a 3-partition of the
/// anchor agent's approvals such that bundle `k` overlaps the first exclusive
/// pool by at most `mu12` and bundle `l` overlaps the second by at most
/// `mu13`. At most one bundle can exceed each bound, so a valid pair always
/// exists; the lexicographically smallest one is returned.
pub fn lemma2_select(
    inst: &Instance,
    parts: &[GoodSet; 3],
    a12: GoodSet,
    a13: GoodSet,
    mu12: Value,
    mu13: Value,
) -> Result<(usize, usize)> {
    for k in 0..3 {
        if inst.set_cost(parts[k] & a12) > mu12 {
            continue;
        }
        for l in 0..3 {
            if l == k {
                continue;
            }
            if inst.set_cost(parts[l] & a13) <= mu13 {
                return Ok((k, l));
            }
        }
    }
    Err(Error::SelectionImpossible)
}

fn q_scores(mms: &[Value; 3], pairs: &[PairIntersection; 3]) -> [QScore; 3] {
    let mu_of = |i: usize, j: usize| {
        pairs
            .iter()
            .find(|p| p.pair == (i.min(j), i.max(j)))
            .expect("all pairs present")
            .mu
    };
    [
        QScore {
            agent: 0,
            q: mms[0] + mu_of(1, 2),
        },
        QScore {
            agent: 1,
            q: mms[1] + mu_of(0, 2),
        },
        QScore {
            agent: 2,
            q: mms[2] + mu_of(0, 1),
        },
    ]
}

/// Produces an allocation for a 3-agent instance that passes both the
/// maximin-share check and the efficiency check.
pub fn solve_three(inst: &Instance, budget: &SearchBudget) -> Result<Allocation> {
    let reduction = reduce_singletons(inst)?;
    let red = &reduction.reduced;

    let mut mms = [0; 3];
    for agent in 0..3 {
        mms[agent] = mms_value(red, agent, 3, budget)?.value;
    }
    let pairs = pair_intersections(red, budget)?;
    let scores = q_scores(&mms, &pairs);

    // Relabel so the highest-scoring agent anchors; ties keep the lowest
    // original index first.
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&a| (std::cmp::Reverse(scores[a].q), a));
    let [anchor, second, third] = order;

    let mu_pool = |x: usize, y: usize| {
        pairs
            .iter()
            .find(|p| p.pair == (x.min(y), x.max(y)))
            .expect("all pairs present")
            .clone()
    };
    let pool_12 = mu_pool(anchor, second); // exclusive to anchor & second
    let pool_13 = mu_pool(anchor, third); // exclusive to anchor & third
    let pool_23 = mu_pool(second, third); // exclusive to the two others

    // Three bundles out of the anchor's approvals, each worth at least the
    // anchor's maximin share.
    let anchor_split = maximin_partition(red, red.approval(anchor), 3, budget)?;
    debug_assert!(anchor_split.value >= mms[anchor]);
    let parts: [GoodSet; 3] = [
        anchor_split.bundles[0],
        anchor_split.bundles[1],
        anchor_split.bundles[2],
    ];

    let (k, l) = lemma2_select(red, &parts, pool_12.goods, pool_13.goods, pool_12.mu, pool_13.mu)?;
    assert!(red.set_cost(parts[k] & pool_12.goods) <= pool_12.mu);
    assert!(red.set_cost(parts[l] & pool_13.goods) <= pool_13.mu);
    let x = 3 - k - l;

    // Split the two others' exclusive pool so both halves reach its split
    // guarantee.
    let tail_split = maximin_partition(red, pool_23.goods, 2, budget)?;
    let (t1, t2) = (tail_split.bundles[0], tail_split.bundles[1]);
    assert!(red.set_cost(t1) >= pool_23.mu);
    assert!(red.set_cost(t2) >= pool_23.mu);

    let b_anchor = (parts[l] - red.approval(second)) | (parts[k] - red.approval(third)) | parts[x];
    let b_second = (parts[l] & red.approval(second)) | t1;
    let b_third = (parts[k] & red.approval(third)) | t2;
    debug_assert!(parts[x].is_subset(b_anchor));
    debug_assert!(red.bundle_value(anchor, b_anchor) >= mms[anchor]);

    let mut red_bundles = [GoodSet::EMPTY; 3];
    red_bundles[anchor] = b_anchor;
    red_bundles[second] = b_second;
    red_bundles[third] = b_third;

    // Back to original indexing, then re-attach singleton goods and park
    // never-approved goods with the lowest-indexed agent.
    let mut bundles = vec![GoodSet::EMPTY; 3];
    for agent in 0..3 {
        for red_good in red_bundles[agent].iter() {
            bundles[agent].insert(reduction.kept[red_good]);
        }
        bundles[agent] = bundles[agent] | reduction.stripped[agent];
    }
    let mut placed = GoodSet::EMPTY;
    for b in &bundles {
        placed = placed | *b;
    }
    bundles[0] = bundles[0] | (inst.all_goods() - placed);

    Allocation::new(inst, bundles)
}
