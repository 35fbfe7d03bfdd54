//! Wire formats. Instances serialize with goods in canonical order and
//! approval lists sorted the same way, so serialization round-trips to the
//! same bytes. Allocations serialize as an agent-id-to-good-ids map; map
//! keys sort lexicographically.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use std::collections::BTreeMap;

use crate::error::Result;
use crate::goodset::GoodSet;
use crate::instance::{validate_instance, Allocation, Instance, RawInstance};
use crate::mechanisms::MechanismRun;
use crate::oracle::{MmsProfile, MmsReport};
use crate::strategy::{AuditReport, Prop3Certificate};

/// Parses and validates an instance from its JSON form.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text)?;
    validate_instance(&raw)
}

/// Canonical JSON form of an instance: two-space pretty printing, goods in
/// canonical order, approval lists in canonical good order.
pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&inst.to_raw()).expect("raw instance serializes")
}

/// Stable 64-bit FNV-1a hash of the canonical instance bytes, in hex.
pub fn instance_hash(inst: &Instance) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in instance_to_json(inst).bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

#[derive(Serialize, Deserialize)]
struct AllocationWire {
    bundles: BTreeMap<String, Vec<String>>,
}

/// Parses an allocation (agent id -> good ids) against an instance. Agents
/// missing from the map receive empty bundles; the result must still be a
/// complete partition.
pub fn parse_allocation(text: &str, inst: &Instance) -> Result<Allocation> {
    let wire: AllocationWire = serde_json::from_str(text)?;
    let mut bundles = vec![GoodSet::EMPTY; inst.num_agents()];
    for (agent_id, good_ids) in &wire.bundles {
        let agent = inst
            .agent_index(agent_id)
            .ok_or_else(|| crate::error::Error::UnknownAgentInAllocation {
                id: agent_id.clone(),
            })?;
        bundles[agent] = inst.set_from_ids(good_ids.iter().map(|s| s.as_str()))?;
    }
    Allocation::new(inst, bundles)
}

pub fn allocation_to_json(inst: &Instance, alloc: &Allocation) -> String {
    let bundles: BTreeMap<String, Vec<String>> = inst
        .agents()
        .iter()
        .enumerate()
        .map(|(a, agent)| (agent.id.clone(), inst.ids_of_set(alloc.bundle(a))))
        .collect();
    serde_json::to_string_pretty(&AllocationWire { bundles }).expect("allocation serializes")
}

fn set_ids(inst: &Instance, set: GoodSet) -> Json {
    json!(inst.ids_of_set(set))
}

fn partition_ids(inst: &Instance, bundles: &[GoodSet]) -> Json {
    json!(bundles.iter().map(|&b| set_ids(inst, b)).collect::<Vec<_>>())
}

/// Maximin-share profile keyed by agent id.
pub fn profile_to_json(inst: &Instance, profile: &MmsProfile) -> Json {
    let entries: BTreeMap<String, Json> = inst
        .agents()
        .iter()
        .enumerate()
        .map(|(a, agent)| {
            let entry = &profile.per_agent[a];
            (
                agent.id.clone(),
                json!({
                    "value": entry.value,
                    "witness": partition_ids(inst, &entry.bundles),
                }),
            )
        })
        .collect();
    json!({ "bundle_count": profile.bundle_count, "profile": entries })
}

pub fn mms_report_to_json(inst: &Instance, report: &MmsReport) -> Json {
    json!({
        "ok": report.ok,
        "shortfalls": report
            .shortfalls
            .iter()
            .map(|s| {
                json!({
                    "agent": inst.agents()[s.agent].id,
                    "required": s.required,
                    "value": s.value,
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn po_report_to_json(inst: &Instance, report: &crate::instance::PoReport) -> Json {
    json!({
        "efficient": report.efficient,
        "witness": report.witness.as_ref().map(|w| {
            json!({
                "good": inst.goods()[w.good].id,
                "holder": inst.agents()[w.holder].id,
                "approver": inst.agents()[w.approver].id,
            })
        }),
    })
}

pub fn audit_to_json(inst: &Instance, report: &AuditReport) -> Json {
    json!({
        "deviations_checked": report.deviations_checked,
        "mechanism": report.mechanism,
        "strategyproof": report.strategyproof,
        "witness": report.witness.as_ref().map(|w| {
            json!({
                "agent": inst.agents()[w.agent].id,
                "honest_report": set_ids(inst, w.honest_report),
                "honest_value": w.honest_value,
                "manipulated_value": w.manipulated_value,
                "misreport": set_ids(inst, w.misreport),
            })
        }),
    })
}

/// One JSON line per turn, then the leftovers and the final bundles.
pub fn run_to_json_lines(run: &MechanismRun) -> Vec<String> {
    let inst = &run.instance;
    let mut lines: Vec<String> = run
        .trace
        .iter()
        .map(|e| {
            json!({
                "agent": inst.agents()[e.agent].id,
                "good": e.good.map(|g| inst.goods()[g].id.clone()),
                "turn": e.turn,
            })
            .to_string()
        })
        .collect();
    let leftovers: Vec<String> = run
        .leftovers
        .iter()
        .map(|&g| inst.goods()[g].id.clone())
        .collect();
    lines.push(json!({ "leftovers": leftovers }).to_string());
    lines.push(
        serde_json::to_string(
            &serde_json::from_str::<Json>(&allocation_to_json(inst, &run.result))
                .expect("valid json"),
        )
        .expect("valid json"),
    );
    lines
}

pub fn certificate_to_json(cert: &Prop3Certificate) -> Json {
    let inst = &cert.instance;
    let allocations = |allocs: &[[GoodSet; 2]]| -> Json {
        json!(allocs
            .iter()
            .map(|[a, b]| json!([set_ids(inst, *a), set_ids(inst, *b)]))
            .collect::<Vec<_>>())
    };
    json!({
        "assignments_explored": cert.assignments_explored,
        "chain": cert
            .chain
            .iter()
            .map(|step| json!({
                "allocations": allocations(&step.allocations),
                "label": step.label,
            }))
            .collect::<Vec<_>>(),
        "consistent_assignments": cert.consistent_assignments,
        "profiles": cert
            .profiles
            .iter()
            .map(|p| json!({
                "admissible": allocations(&p.admissible),
                "approvals": [set_ids(inst, p.approvals[0]), set_ids(inst, p.approvals[1])],
                "label": p.label,
                "mms": p.mms,
            }))
            .collect::<Vec<_>>(),
        "sp_links": cert.sp_links,
        "unsat": cert.unsat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trips_to_identical_bytes() {
        let text = r#"{
  "goods": [
    { "id": "g1", "cost": 2 },
    { "id": "g3", "cost": 1 }
  ],
  "agents": [
    { "id": "a1", "approves": ["g1", "g3"] },
    { "id": "a2", "approves": [] }
  ]
}"#;
        let inst = parse_instance(text).unwrap();
        let emitted = instance_to_json(&inst);
        // canonical order puts the cheaper g3 first
        assert!(emitted.find("g3").unwrap() < emitted.find("g1").unwrap());
        let again = parse_instance(&emitted).unwrap();
        assert_eq!(instance_to_json(&again), emitted);
        assert_eq!(instance_hash(&again), instance_hash(&inst));
    }

    #[test]
    fn allocation_round_trip_and_errors() {
        let inst = Instance::from_parts(
            vec![("g1".into(), 1), ("g2".into(), 2)],
            vec![("a1".into(), vec!["g1".into()]), ("a2".into(), vec![])],
        )
        .unwrap();
        let alloc = parse_allocation(r#"{"bundles": {"a1": ["g1"], "a2": ["g2"]}}"#, &inst).unwrap();
        let text = allocation_to_json(&inst, &alloc);
        let again = parse_allocation(&text, &inst).unwrap();
        assert_eq!(alloc, again);

        assert!(parse_allocation(r#"{"bundles": {"zz": ["g1"]}}"#, &inst).is_err());
        assert!(parse_allocation(r#"{"bundles": {"a1": ["nope"]}}"#, &inst).is_err());
        assert!(parse_allocation(r#"{"bundles": {"a1": ["g1"]}}"#, &inst).is_err());
    }

    #[test]
    fn missing_agents_get_empty_bundles() {
        let inst = Instance::from_parts(
            vec![("g1".into(), 1)],
            vec![("a1".into(), vec![]), ("a2".into(), vec![])],
        )
        .unwrap();
        let alloc = parse_allocation(r#"{"bundles": {"a1": ["g1"]}}"#, &inst).unwrap();
        assert!(alloc.bundle(1).is_empty());
    }
}
