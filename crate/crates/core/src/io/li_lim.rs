//! Parser for the Li & Lim pickup-and-delivery benchmark files.
//!
//! The first line is `K Q speed`. Every following non-blank line describes
//! one node:
//!
//! ```text
//! id x y demand earliest latest service pickup-sibling delivery-sibling
//! ```
//!
//! A pickup row has pickup-sibling 0 and names its delivery; a delivery row
//! names its pickup and has delivery-sibling 0. Row 0 is the depot and its
//! window becomes the depot window.

use std::collections::BTreeSet;

use super::IoError;
use crate::model::{Instance, Node, Request, VehicleSpec, DEPOT};

struct Row {
    line: usize,
    node: Node,
    pickup: usize,
    delivery: usize,
}

fn format_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Format {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, name: &str, raw: Option<&str>) -> Result<T, IoError> {
    let raw = raw.ok_or_else(|| format_err(line, format!("missing field `{name}`")))?;
    raw.parse()
        .map_err(|_| format_err(line, format!("field `{name}`: cannot parse {raw:?}")))
}

/// Demand columns are integral in the benchmark but sometimes written as
/// `10.0`.
fn integral(line: usize, name: &str, raw: Option<&str>) -> Result<i64, IoError> {
    let v: f64 = field(line, name, raw)?;
    if v.fract() != 0.0 || !v.is_finite() {
        return Err(format_err(
            line,
            format!("field `{name}` must be an integer, got {v}"),
        ));
    }
    Ok(v as i64)
}

pub fn parse_li_lim(text: &str) -> Result<Instance, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| format_err(1, "empty file"))?;
    let mut it = header.split_whitespace();
    let k: usize = field(hline, "K", it.next())?;
    let capacity = integral(hline, "Q", it.next())?;
    let speed: f64 = field(hline, "speed", it.next())?;
    if it.next().is_some() {
        return Err(format_err(hline, "header has more than three fields"));
    }

    let mut rows = Vec::new();
    for (line, content) in lines {
        let mut it = content.split_whitespace();
        let id: usize = field(line, "id", it.next())?;
        if id != rows.len() {
            return Err(format_err(
                line,
                format!("expected id {}, found {id}", rows.len()),
            ));
        }
        let x = field(line, "x", it.next())?;
        let y = field(line, "y", it.next())?;
        let quantity = integral(line, "demand", it.next())?;
        let window_open = field(line, "earliest", it.next())?;
        let window_close = field(line, "latest", it.next())?;
        let service_time = field(line, "service", it.next())?;
        let pickup = field(line, "pickup-sibling", it.next())?;
        let delivery = field(line, "delivery-sibling", it.next())?;
        if it.next().is_some() {
            return Err(format_err(line, "row has more than nine fields"));
        }
        rows.push(Row {
            line,
            node: Node {
                id,
                x,
                y,
                window_open,
                window_close,
                service_time,
                quantity,
            },
            pickup,
            delivery,
        });
    }
    if rows.is_empty() {
        return Err(format_err(hline, "no depot row"));
    }
    let depot = &rows[DEPOT];
    if depot.node.quantity != 0 {
        return Err(format_err(depot.line, "depot has nonzero demand"));
    }

    let mut requests = Vec::new();
    for row in &rows[1..] {
        let id = row.node.id;
        let sibling = |target: usize| {
            rows.get(target).filter(|_| target != DEPOT).ok_or_else(|| {
                format_err(
                    row.line,
                    format!("node {id}: sibling {target} does not exist"),
                )
            })
        };
        match (row.pickup, row.delivery) {
            (0, d) if d != 0 => {
                let other = sibling(d)?;
                if other.pickup != id || other.delivery != 0 {
                    return Err(format_err(
                        row.line,
                        format!("node {id}: delivery-sibling {d} is not a delivery pointing back"),
                    ));
                }
                if row.node.quantity <= 0 {
                    return Err(format_err(
                        row.line,
                        format!("pickup {id} must have positive demand"),
                    ));
                }
                requests.push(Request {
                    supplier: id,
                    client: d,
                });
            }
            (p, 0) if p != 0 => {
                let other = sibling(p)?;
                if other.delivery != id || other.pickup != 0 {
                    return Err(format_err(
                        row.line,
                        format!("node {id}: pickup-sibling {p} is not a pickup pointing back"),
                    ));
                }
                if row.node.quantity >= 0 {
                    return Err(format_err(
                        row.line,
                        format!("delivery {id} must have negative demand"),
                    ));
                }
            }
            _ => {
                return Err(format_err(
                    row.line,
                    format!("node {id}: exactly one of the sibling columns must be nonzero"),
                ))
            }
        }
    }

    let fleet = vec![
        VehicleSpec {
            capacity,
            cost_coefficient: 1.0,
            speed,
        };
        k
    ];
    let nodes = rows.into_iter().map(|r| r.node).collect();
    Ok(Instance::new(nodes, requests, fleet, BTreeSet::new())?)
}
