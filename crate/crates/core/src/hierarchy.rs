//! Trees of Konüs-Divisia indices: subgroups are replaced by composite goods
//! (price `Q`, quantity `F`) and each level is re-tested for HARP.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::afriat::{konus_divisia_series, solve_harp_multipliers, HarpMultipliers, IndexSeries};
use crate::axioms::check_harp;
use crate::irrationality::harp_irrationality;
use crate::scalar::Scalar;
use crate::trade::{DataError, GroupSelection, TradeStatistics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HierarchyError {
    #[error("node {node:?}: {source}")]
    Data { node: String, source: DataError },
    #[error("node {node:?} has no goods and no children")]
    EmptyNode { node: String },
    #[error("node {node:?}: good sets of its parts overlap")]
    Overlap { node: String },
    #[error("index series of {child:?} has {got} periods, expected {expected}")]
    SeriesLength { child: String, expected: usize, got: usize },
    #[error("invalid tree description: {0}")]
    Json(String),
}

/// Nested tree description. A leaf lists its goods; an internal node lists
/// children and, optionally, pass-through goods kept unaggregated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionTree {
    pub name: String,
    #[serde(default)]
    pub goods: Vec<String>,
    #[serde(default)]
    pub children: Vec<PartitionTree>,
}

impl PartitionTree {
    pub fn from_json(text: &str) -> Result<Self, HierarchyError> {
        serde_json::from_str(text).map_err(|e| HierarchyError::Json(e.to_string()))
    }

    pub fn leaf(name: impl Into<String>, goods: &[&str]) -> Self {
        Self {
            name: name.into(),
            goods: goods.iter().map(|g| g.to_string()).collect(),
            children: Vec::new(),
        }
    }

    pub fn node(name: impl Into<String>, children: Vec<PartitionTree>, passthrough: &[&str]) -> Self {
        Self {
            name: name.into(),
            goods: passthrough.iter().map(|g| g.to_string()).collect(),
            children,
        }
    }
}

/// One composite good: the subgroup's index series and its goods.
pub struct AggregateChild<'a, T> {
    pub name: &'a str,
    pub selection: &'a GroupSelection,
    pub index: &'a IndexSeries<T>,
}

/// Statistics whose goods are the children's composites (price `Q`, quantity
/// `F`) followed by the pass-through goods.
pub fn aggregate<T: Scalar>(
    ts: &TradeStatistics<T>,
    children: &[AggregateChild<'_, T>],
    passthrough: Option<&GroupSelection>,
) -> Result<TradeStatistics<T>, HierarchyError> {
    let parts: Vec<&GroupSelection> = children.iter().map(|c| c.selection).chain(passthrough).collect();
    for (i, a) in parts.iter().enumerate() {
        if parts[i + 1..].iter().any(|b| !a.is_disjoint(b)) {
            return Err(HierarchyError::Overlap {
                node: "aggregate".into(),
            });
        }
    }
    let n = ts.periods();
    for c in children {
        if c.index.len() != n {
            return Err(HierarchyError::SeriesLength {
                child: c.name.to_string(),
                expected: n,
                got: c.index.len(),
            });
        }
    }
    let pass: &[usize] = passthrough.map_or(&[], |p| p.indices());
    let mut prices = Vec::with_capacity(n);
    let mut quantities = Vec::with_capacity(n);
    for t in 0..n {
        let mut p: Vec<T> = children.iter().map(|c| c.index.price[t]).collect();
        let mut q: Vec<T> = children.iter().map(|c| c.index.consumption[t]).collect();
        p.extend(pass.iter().map(|&i| ts.price(t)[i]));
        q.extend(pass.iter().map(|&i| ts.quantity(t)[i]));
        prices.push(p);
        quantities.push(q);
    }
    let mut ids: Vec<String> = children.iter().map(|c| c.name.to_string()).collect();
    ids.extend(pass.iter().map(|&i| ts.good_ids()[i].clone()));
    TradeStatistics::with_labels(prices, quantities, ids, ts.period_ids().to_vec()).map_err(|source| {
        HierarchyError::Data {
            node: "aggregate".into(),
            source,
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeReport<T> {
    pub name: String,
    pub depth: usize,
    /// Original goods covered by the node.
    pub goods: GroupSelection,
    /// Statistics tested at this node: the restricted data at a leaf, the
    /// aggregated composites at an internal node.
    pub statistics: Option<TradeStatistics<T>>,
    pub harp_pass: bool,
    pub omega_h: T,
    /// Multipliers at ω = 1 when the node passes, else at the smallest ω
    /// (from `omega_h` upward) where a certificate could be built.
    pub multipliers: Option<HarpMultipliers<T>>,
    pub index: Option<IndexSeries<T>>,
    /// Every node below passes HARP(1) and so does this one, hence the flat
    /// group is HARP(1)-rationalizable with the composed indices.
    pub composed_rationalizable: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyReport<T> {
    /// Nodes in depth-first pre-order.
    pub nodes: Vec<NodeReport<T>>,
    pub period_ids: Vec<String>,
}

/// Multipliers at ω, nudging ω upward when rounding makes the closure
/// diverge exactly at the index.
fn multipliers_at<T: Scalar>(ts: &TradeStatistics<T>, omega: T) -> Option<HarpMultipliers<T>> {
    [0.0, 1e-12, 1e-9, 1e-6]
        .iter()
        .find_map(|&eps| solve_harp_multipliers(ts, omega * (T::one() + T::lit(eps))).ok())
}

pub fn build_hierarchy<T: Scalar>(
    ts: &TradeStatistics<T>,
    tree: &PartitionTree,
) -> Result<HierarchyReport<T>, HierarchyError> {
    let mut nodes = Vec::new();
    visit(ts, tree, 0, &mut nodes)?;
    Ok(HierarchyReport {
        nodes,
        period_ids: ts.period_ids().to_vec(),
    })
}

/// Processes `tree`, pushing its report before its descendants'; returns the
/// node's position in `out`.
fn visit<T: Scalar>(
    ts: &TradeStatistics<T>,
    tree: &PartitionTree,
    depth: usize,
    out: &mut Vec<NodeReport<T>>,
) -> Result<usize, HierarchyError> {
    let data_err = |source| HierarchyError::Data {
        node: tree.name.clone(),
        source,
    };
    if tree.goods.is_empty() && tree.children.is_empty() {
        return Err(HierarchyError::EmptyNode {
            node: tree.name.clone(),
        });
    }
    let passthrough = if tree.goods.is_empty() {
        None
    } else {
        Some(GroupSelection::from_ids(ts, &tree.goods).map_err(data_err)?)
    };
    let slot = out.len();
    out.push(NodeReport {
        name: tree.name.clone(),
        depth,
        goods: GroupSelection::all(ts.goods()),
        statistics: None,
        harp_pass: false,
        omega_h: T::infinity(),
        multipliers: None,
        index: None,
        composed_rationalizable: false,
        error: None,
    });

    let mut child_slots = Vec::with_capacity(tree.children.len());
    for child in &tree.children {
        child_slots.push(visit(ts, child, depth + 1, out)?);
    }
    let mut union: Vec<usize> = passthrough.iter().flat_map(|p| p.indices().to_vec()).collect();
    let mut total = union.len();
    for &c in &child_slots {
        union.extend_from_slice(out[c].goods.indices());
        total += out[c].goods.len();
    }
    union.sort_unstable();
    union.dedup();
    if union.len() != total {
        return Err(HierarchyError::Overlap {
            node: tree.name.clone(),
        });
    }
    let goods = GroupSelection::new(union, ts.goods()).map_err(data_err)?;

    let stats = if child_slots.is_empty() {
        ts.restrict_to_group(&goods).map_err(|e| e.to_string())
    } else if let Some(&bad) = child_slots.iter().find(|&&c| out[c].index.is_none()) {
        Err(format!("child {:?} has no index series", out[bad].name))
    } else {
        let children: Vec<AggregateChild<'_, T>> = child_slots
            .iter()
            .map(|&c| AggregateChild {
                name: &out[c].name,
                selection: &out[c].goods,
                index: out[c].index.as_ref().expect("checked above"),
            })
            .collect();
        aggregate(ts, &children, passthrough.as_ref()).map_err(|e| e.to_string())
    };

    let node = &mut out[slot];
    node.goods = goods;
    match stats {
        Err(e) => node.error = Some(e),
        Ok(s) => {
            node.harp_pass = check_harp(&s, T::one()).satisfied;
            node.omega_h = harp_irrationality(&s);
            let omega = if node.harp_pass { T::one() } else { node.omega_h };
            node.multipliers = multipliers_at(&s, omega);
            node.index = node.multipliers.as_ref().map(|m| konus_divisia_series(&s, m));
            if node.multipliers.is_none() {
                node.error = Some("no HARP certificate at the node's index".into());
            }
            node.statistics = Some(s);
        }
    }
    let children_ok = child_slots.iter().all(|&c| out[c].composed_rationalizable);
    out[slot].composed_rationalizable = out[slot].harp_pass && children_ok;
    Ok(slot)
}

impl<T: Scalar> HierarchyReport<T> {
    /// `node,depth,size,harp_pass,omega_h,omega_used,composed_rationalizable,error`.
    pub fn write_nodes_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "node",
            "depth",
            "size",
            "harp_pass",
            "omega_h",
            "omega_used",
            "composed_rationalizable",
            "error",
        ])?;
        for n in &self.nodes {
            w.write_record([
                n.name.clone(),
                n.depth.to_string(),
                n.goods.len().to_string(),
                n.harp_pass.to_string(),
                n.omega_h.to_string(),
                n.multipliers.as_ref().map_or(String::new(), |m| m.omega.to_string()),
                n.composed_rationalizable.to_string(),
                n.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Long-format index table `node,period,F,Q`.
    pub fn write_indices_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "period", "F", "Q"])?;
        for n in &self.nodes {
            if let Some(ix) = &n.index {
                for (t, id) in self.period_ids.iter().enumerate() {
                    w.write_record([
                        n.name.clone(),
                        id.clone(),
                        ix.consumption[t].to_string(),
                        ix.price[t].to_string(),
                    ])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Indented tree with one line per node.
    pub fn render_tree(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            let verdict = match (&n.error, n.harp_pass) {
                (Some(e), _) if n.statistics.is_none() => format!("error: {e}"),
                (_, true) => "HARP pass".to_string(),
                (_, false) => "HARP fail".to_string(),
            };
            let _ = writeln!(
                s,
                "{}{} [{} goods] {} omega_h={:.6}",
                "  ".repeat(n.depth),
                n.name,
                n.goods.len(),
                verdict,
                n.omega_h.as_f64()
            );
        }
        s
    }
}
