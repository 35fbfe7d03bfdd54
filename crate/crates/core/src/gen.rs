//! Deterministic seeded instance generators. For a fixed seed the draw order
//! is fixed (costs first, then approvals agent by agent), so generated
//! instances are bit-reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, Value};
use crate::laminar::is_laminar;

fn check(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            what: what.to_string(),
        })
    }
}

/// Uniform random instance: costs in `[0, max_cost]`, every (agent, good)
/// pair approved independently with the given probability.
pub fn gen_random(
    n: usize,
    m: usize,
    max_cost: Value,
    density: f64,
    seed: u64,
) -> Result<Instance> {
    check(n >= 1, "need at least one agent")?;
    check(m <= crate::instance::MAX_GOODS, "too many goods")?;
    check(
        density.is_finite() && (0.0..=1.0).contains(&density),
        "density must lie in [0, 1]",
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goods: Vec<(String, Value)> = (0..m)
        .map(|i| (format!("g{}", i + 1), rng.random_range(0..=max_cost)))
        .collect();
    let agents: Vec<(String, Vec<String>)> = (0..n)
        .map(|a| {
            (
                format!("a{}", a + 1),
                (0..m)
                    .filter(|_| rng.random_bool(density))
                    .map(|g| format!("g{}", g + 1))
                    .collect(),
            )
        })
        .collect();
    Instance::from_parts(goods, agents)
}

/// Random instance whose approval sets always form a laminar family: a
/// random partition forest of the goods is built by recursive splitting to
/// the requested depth, and each agent approves one forest node.
pub fn gen_laminar(
    n: usize,
    m: usize,
    max_cost: Value,
    depth: usize,
    seed: u64,
) -> Result<Instance> {
    check(n >= 1, "need at least one agent")?;
    check(m <= crate::instance::MAX_GOODS, "too many goods")?;
    check(depth >= 1, "depth must be at least 1")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goods: Vec<(String, Value)> = (0..m)
        .map(|i| (format!("g{}", i + 1), rng.random_range(0..=max_cost)))
        .collect();

    let mut nodes: Vec<Vec<usize>> = Vec::new();
    fn split(block: Vec<usize>, depth: usize, rng: &mut ChaCha8Rng, nodes: &mut Vec<Vec<usize>>) {
        nodes.push(block.clone());
        if depth == 0 || block.len() < 2 {
            return;
        }
        let parts = rng.random_range(2..=block.len().min(3));
        let mut cuts: Vec<usize> = Vec::new();
        while cuts.len() < parts - 1 {
            let cut = rng.random_range(1..block.len());
            if !cuts.contains(&cut) {
                cuts.push(cut);
            }
        }
        cuts.sort_unstable();
        cuts.push(block.len());
        let mut start = 0;
        for cut in cuts {
            split(block[start..cut].to_vec(), depth - 1, rng, nodes);
            start = cut;
        }
    }
    split((0..m).collect(), depth, &mut rng, &mut nodes);

    let agents: Vec<(String, Vec<String>)> = (0..n)
        .map(|a| {
            let node = &nodes[rng.random_range(0..nodes.len())];
            (
                format!("a{}", a + 1),
                node.iter().map(|&g| format!("g{}", g + 1)).collect(),
            )
        })
        .collect();
    let inst = Instance::from_parts(goods, agents)?;
    debug_assert!(is_laminar(&inst).laminar);
    Ok(inst)
}
