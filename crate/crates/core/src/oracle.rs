use crate::error::{Error, Result};
use crate::goodset::GoodSet;
use crate::instance::{Allocation, Instance, Value};

/// Limits for the exact searches. Exceeding a limit is an error, never a
/// silent approximation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_goods: usize,
    pub max_agents: usize,
    pub node_limit: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_goods: 16,
            max_agents: 5,
            node_limit: 100_000_000,
        }
    }
}

/// A k-partition of a good set together with its minimum bundle cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximinPartition {
    pub bundles: Vec<GoodSet>,
    pub value: Value,
}

/// Exact per-agent maximin shares for a fixed bundle count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsProfile {
    pub bundle_count: usize,
    pub per_agent: Vec<MaximinPartition>,
}

impl MmsProfile {
    pub fn values(&self) -> Vec<Value> {
        self.per_agent.iter().map(|p| p.value).collect()
    }
}

/// Shortfall entry for an agent whose bundle misses its maximin share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsShortfall {
    pub agent: usize,
    pub value: Value,
    pub required: Value,
}

/// Result of checking an allocation against a maximin-share profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsReport {
    pub ok: bool,
    pub shortfalls: Vec<MmsShortfall>,
}

struct Search<'a> {
    costs: Vec<Value>,
    items: Vec<usize>,
    remaining: Vec<Value>,
    k: usize,
    node_limit: u64,
    nodes: u64,
    sums: Vec<Value>,
    bundles: Vec<GoodSet>,
    best_value: Option<Value>,
    best_bundles: Vec<GoodSet>,
    _inst: &'a Instance,
}

impl<'a> Search<'a> {
    fn run(mut self) -> Result<MaximinPartition> {
        self.dfs(0)?;
        let mut bundles = self.best_bundles;
        // Canonical presentation: nonempty bundles first, ordered by their
        // cheapest member; empty bundles trail.
        bundles.sort_by_key(|b| (b.is_empty(), b.lowest().unwrap_or(usize::MAX)));
        let value = self.best_value.expect("search visits at least one leaf");
        Ok(MaximinPartition { bundles, value })
    }

    fn dfs(&mut self, pos: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::InstanceTooLarge {
                what: format!("node limit {} exhausted", self.node_limit),
            });
        }
        if pos == self.items.len() {
            let leaf = *self.sums.iter().min().expect("k >= 1");
            if self.best_value.map_or(true, |b| leaf > b) {
                self.best_value = Some(leaf);
                self.best_bundles = self.bundles.clone();
            }
            return Ok(());
        }
        if let Some(best) = self.best_value {
            // The currently poorest bundle can gain at most everything left.
            let floor = *self.sums.iter().min().expect("k >= 1");
            if floor + self.remaining[pos] <= best {
                return Ok(());
            }
        }
        let good = self.items[pos];
        let cost = self.costs[pos];
        for j in 0..self.k {
            // Bundles with equal sums lead to identical subtrees; keeping only
            // the first also stops more than one empty bundle from opening.
            if self.sums[..j].contains(&self.sums[j]) {
                continue;
            }
            self.sums[j] += cost;
            self.bundles[j].insert(good);
            self.dfs(pos + 1)?;
            self.bundles[j].remove(good);
            self.sums[j] -= cost;
        }
        Ok(())
    }
}

/// Exact maximin k-partition of a good set: maximizes the minimum bundle
/// cost. Deterministic: goods are assigned in descending (cost, id) order and
/// the first optimum found is kept. Empty bundles are allowed when there are
/// fewer goods than bundles.
pub fn maximin_partition(
    inst: &Instance,
    goods: GoodSet,
    k: usize,
    budget: &SearchBudget,
) -> Result<MaximinPartition> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            what: "bundle count must be at least 1".to_string(),
        });
    }
    if goods.len() > budget.max_goods {
        return Err(Error::InstanceTooLarge {
            what: format!("{} goods exceed max_goods={}", goods.len(), budget.max_goods),
        });
    }
    if k > budget.max_agents {
        return Err(Error::InstanceTooLarge {
            what: format!("{k} bundles exceed max_agents={}", budget.max_agents),
        });
    }
    // Descending canonical index = descending cost, ties broken descending id.
    let items: Vec<usize> = {
        let mut v: Vec<usize> = goods.iter().collect();
        v.reverse();
        v
    };
    let costs: Vec<Value> = items.iter().map(|&i| inst.cost(i)).collect();
    let mut remaining = vec![0; items.len() + 1];
    for i in (0..items.len()).rev() {
        remaining[i] = remaining[i + 1] + costs[i];
    }
    let search = Search {
        costs,
        items,
        remaining,
        k,
        node_limit: budget.node_limit,
        nodes: 0,
        sums: vec![0; k],
        bundles: vec![GoodSet::EMPTY; k],
        best_value: None,
        best_bundles: vec![GoodSet::EMPTY; k],
        _inst: inst,
    };
    let result = search.run()?;
    debug_assert_eq!(
        result
            .bundles
            .iter()
            .map(|&b| inst.set_cost(b))
            .min()
            .unwrap(),
        result.value
    );
    Ok(result)
}

/// The agent's exact maximin share over its approval set with k bundles,
/// plus one witnessing partition.
pub fn mms_value(
    inst: &Instance,
    agent: usize,
    k: usize,
    budget: &SearchBudget,
) -> Result<MaximinPartition> {
    maximin_partition(inst, inst.approval(agent), k, budget)
}

/// Maximin shares of every agent with one bundle per agent.
pub fn mms_profile(inst: &Instance, budget: &SearchBudget) -> Result<MmsProfile> {
    let n = inst.num_agents();
    let per_agent = (0..n)
        .map(|a| mms_value(inst, a, n, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(MmsProfile {
        bundle_count: n,
        per_agent,
    })
}

/// Checks that every agent's bundle reaches its maximin share.
pub fn verify_mms(inst: &Instance, alloc: &Allocation, profile: &MmsProfile) -> MmsReport {
    let mut shortfalls = Vec::new();
    for agent in 0..inst.num_agents() {
        let value = inst.bundle_value(agent, alloc.bundle(agent));
        let required = profile.per_agent[agent].value;
        if value < required {
            shortfalls.push(MmsShortfall {
                agent,
                value,
                required,
            });
        }
    }
    MmsReport {
        ok: shortfalls.is_empty(),
        shortfalls,
    }
}
