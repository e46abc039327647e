use std::collections::HashMap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::num::Rational;

/// A node of the scenario tree. `prices[j]` is the price of risky asset
/// `j` at this node; the numeraire is implicit and constant 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub time: usize,
    pub parent: Option<usize>,
    pub prices: Vec<Rational>,
    pub children: Vec<usize>,
}

/// Finite filtration and price process. The σ-algebra at time `t` is
/// generated by the time-`t` nodes; leaves are the time-`T` nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioTree {
    nodes: Vec<Node>,
    horizon: usize,
    assets: usize,
    root: usize,
    leaves: Vec<usize>,
    leaf_pos: Vec<Option<usize>>,
    by_id: HashMap<String, usize>,
}

/// Node description used to build a tree; children are derived.
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub id: String,
    pub time: usize,
    pub parent: Option<String>,
    pub prices: Vec<Rational>,
}

impl NodeSpec {
    pub fn new(id: &str, time: usize, parent: Option<&str>, prices: Vec<Rational>) -> Self {
        NodeSpec { id: id.to_string(), time, parent: parent.map(str::to_string), prices }
    }
}

impl ScenarioTree {
    /// Validates and builds a tree. Errors carry a JSON pointer into the
    /// `nodes` array of the market file.
    pub fn new(horizon: usize, assets: usize, specs: Vec<NodeSpec>) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::schema("/horizon", "horizon must be at least 1"));
        }
        if assets == 0 {
            return Err(Error::schema("/assets", "at least one risky asset is required"));
        }
        let mut by_id = HashMap::new();
        for (i, s) in specs.iter().enumerate() {
            if by_id.insert(s.id.clone(), i).is_some() {
                return Err(Error::schema(format!("/nodes/{i}/id"), format!("duplicate node id {:?}", s.id)));
            }
        }
        let mut nodes = Vec::with_capacity(specs.len());
        let mut root = None;
        for (i, s) in specs.into_iter().enumerate() {
            if s.prices.len() != assets {
                return Err(Error::schema(
                    format!("/nodes/{i}/prices"),
                    format!("expected {assets} prices, found {}", s.prices.len()),
                ));
            }
            if s.time > horizon {
                return Err(Error::schema(format!("/nodes/{i}/time"), "time exceeds horizon"));
            }
            let parent = match &s.parent {
                None => {
                    if s.time != 0 {
                        return Err(Error::schema(format!("/nodes/{i}/parent"), "only the time-0 root may lack a parent"));
                    }
                    if root.replace(i).is_some() {
                        return Err(Error::schema(format!("/nodes/{i}"), "more than one root"));
                    }
                    None
                }
                Some(p) => {
                    let Some(&pi) = by_id.get(p) else {
                        return Err(Error::schema(format!("/nodes/{i}/parent"), format!("unknown parent {p:?}")));
                    };
                    Some(pi)
                }
            };
            nodes.push(Node { id: s.id, time: s.time, parent, prices: s.prices, children: Vec::new() });
        }
        let root = root.ok_or_else(|| Error::schema("/nodes", "no root node"))?;
        for i in 0..nodes.len() {
            if let Some(p) = nodes[i].parent {
                if nodes[p].time + 1 != nodes[i].time {
                    return Err(Error::schema(format!("/nodes/{i}/time"), "node time must be parent time + 1"));
                }
                nodes[p].children.push(i);
            }
        }
        let mut leaves = Vec::new();
        let mut leaf_pos = vec![None; nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if n.time == horizon {
                leaf_pos[i] = Some(leaves.len());
                leaves.push(i);
            } else if n.children.is_empty() {
                return Err(Error::schema(format!("/nodes/{i}"), "node before the horizon has no children"));
            }
        }
        Ok(ScenarioTree { nodes, horizon, assets, root, leaves, leaf_pos, by_id })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    /// Node indices of the leaves; leaf-indexed vectors follow this order.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaf_position(&self, node: usize) -> Option<usize> {
        self.leaf_pos[node]
    }

    pub fn leaf_position_by_id(&self, id: &str) -> Option<usize> {
        self.node_index(id).and_then(|i| self.leaf_pos[i])
    }

    pub fn leaf_id(&self, pos: usize) -> &str {
        &self.nodes[self.leaves[pos]].id
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.leaf_pos[node].is_some()
    }

    /// Non-leaf nodes in file order.
    pub fn inner_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.is_leaf(i))
    }

    /// Nodes from the root down to `node`, inclusive.
    pub fn path(&self, node: usize) -> Vec<usize> {
        let mut p = vec![node];
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            p.push(parent);
            cur = parent;
        }
        p.reverse();
        p
    }

    /// Leaf positions below `node`.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            if let Some(pos) = self.leaf_pos[n] {
                out.push(pos);
            } else {
                stack.extend(self.nodes[n].children.iter().rev());
            }
        }
        out.sort_unstable();
        out
    }

    /// Price increment `S(child) - S(parent(child))` for asset `j`.
    pub fn increment(&self, child: usize, j: usize) -> Rational {
        let parent = self.nodes[child].parent.expect("increment of the root");
        &self.nodes[child].prices[j] - &self.nodes[parent].prices[j]
    }

    /// Nodes ordered by decreasing time (leaves first).
    pub fn backward_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(self.nodes[i].time));
        order
    }

    pub fn has_nonnegative_prices(&self) -> bool {
        self.nodes.iter().all(|n| n.prices.iter().all(|p| !p.is_negative()))
    }

    /// The same tree with every price multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> ScenarioTree {
        let mut t = self.clone();
        for n in &mut t.nodes {
            for p in &mut n.prices {
                *p = &*p * factor;
            }
        }
        t
    }
}
