//! Native JSON instance format (`.pdptw.json`).
//!
//! Keys are emitted in sorted order and numbers rounded to six fractional
//! digits, so equal instances serialize to identical bytes. An open window
//! end is written as `null`. The depot's window lives in the top-level
//! `depot_window` key (`null` for the default `[0, +inf)`); customer nodes
//! carry their own `window`.

use serde::{Deserialize, Serialize};

use super::{round6, IoError};
use crate::model::{Instance, ModelError, Node, Request, VehicleSpec, DEPOT};

type Window = (f64, Option<f64>);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    blocked_arcs: Vec<(usize, usize)>,
    #[serde(default)]
    depot_window: Option<Window>,
    fleet: Vec<VehicleRecord>,
    nodes: Vec<NodeRecord>,
    requests: Vec<RequestRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleRecord {
    capacity: i64,
    #[serde(default = "one")]
    cost: f64,
    #[serde(default = "one")]
    speed: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: usize,
    quantity: i64,
    #[serde(default)]
    service: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window: Option<Window>,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequestRecord {
    client: usize,
    supplier: usize,
}

fn to_window(open: f64, close: f64) -> Window {
    (round6(open), close.is_finite().then(|| round6(close)))
}

fn from_window((open, close): Window) -> (f64, f64) {
    (open, close.unwrap_or(f64::INFINITY))
}

pub fn write_native(instance: &Instance) -> String {
    let doc = Document {
        blocked_arcs: instance.blocked_arcs().iter().copied().collect(),
        depot_window: instance.depot_window().map(|(e, l)| to_window(e, l)),
        fleet: instance
            .fleet()
            .iter()
            .map(|v| VehicleRecord {
                capacity: v.capacity,
                cost: round6(v.cost_coefficient),
                speed: round6(v.speed),
            })
            .collect(),
        nodes: instance
            .nodes()
            .iter()
            .map(|n| NodeRecord {
                id: n.id,
                quantity: n.quantity,
                service: round6(n.service_time),
                window: (n.id != DEPOT).then(|| to_window(n.window_open, n.window_close)),
                x: round6(n.x),
                y: round6(n.y),
            })
            .collect(),
        requests: instance
            .requests()
            .iter()
            .map(|r| RequestRecord {
                client: r.client,
                supplier: r.supplier,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance documents always serialize");
    text.push('\n');
    text
}

pub fn parse_native(text: &str) -> Result<Instance, IoError> {
    let doc: Document = serde_json::from_str(text)?;
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (i, rec) in doc.nodes.into_iter().enumerate() {
        let (window_open, window_close) = if rec.id == DEPOT {
            if rec.window.is_some() {
                return Err(ModelError::InvalidInstance(
                    "depot window belongs in `depot_window`, not in the node record".into(),
                )
                .into());
            }
            from_window(doc.depot_window.unwrap_or((0.0, None)))
        } else {
            from_window(rec.window.ok_or_else(|| {
                ModelError::InvalidInstance(format!("node {} (record {i}) has no `window`", rec.id))
            })?)
        };
        nodes.push(Node {
            id: rec.id,
            x: rec.x,
            y: rec.y,
            window_open,
            window_close,
            service_time: rec.service,
            quantity: rec.quantity,
        });
    }
    let requests = doc
        .requests
        .into_iter()
        .map(|r| Request {
            supplier: r.supplier,
            client: r.client,
        })
        .collect();
    let fleet = doc
        .fleet
        .into_iter()
        .map(|v| VehicleSpec {
            capacity: v.capacity,
            cost_coefficient: v.cost,
            speed: v.speed,
        })
        .collect();
    Ok(Instance::new(
        nodes,
        requests,
        fleet,
        doc.blocked_arcs.into_iter().collect(),
    )?)
}
