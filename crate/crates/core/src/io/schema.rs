//! On-disk JSON forms of markets, claims, marginals and quote sheets.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::market::{Claim, KernelPriors, Market, Measure, NodeSpec, PriorSet, ScenarioTree, StaticOption};
use crate::mot::{AssetQuotes, CallQuoteSheet, DiscreteMarginal};
use crate::num::{format_rational, parse_rational, Rational};

pub const SCHEMA: &str = "robust-ftap/1";

/// A rational written as `"p/q"`; integers are also accepted on input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as a \"p/q\" string or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Q, E> {
                parse_rational(s).map(Q).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
        }
        d.deserialize_any(V)
    }
}

fn q(r: &Rational) -> Q {
    Q(r.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeFile {
    pub id: String,
    pub time: usize,
    #[serde(default)]
    pub parent: Option<String>,
    pub prices: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PriorsFile {
    Flat(Vec<BTreeMap<String, Q>>),
    Kernel(BTreeMap<String, Vec<BTreeMap<String, Q>>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionFile {
    pub label: String,
    pub payoff: BTreeMap<String, Q>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub horizon: usize,
    pub assets: usize,
    pub nodes: Vec<NodeFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub horizon: usize,
    pub assets: usize,
    pub nodes: Vec<NodeFile>,
    pub priors: PriorsFile,
    #[serde(default)]
    pub options: Vec<OptionFile>,
}

/// Parses `text` as `T`, reporting errors with a JSON pointer.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        Error::schema(pointer, e.into_inner().to_string())
    })
}

/// Splits an optional `"schema"` member off a top-level JSON object.
fn tagged_object(text: &str) -> Result<serde_json::Map<String, serde_json::Value>> {
    let mut map: serde_json::Map<String, serde_json::Value> = parse_json(text)?;
    if let Some(tag) = map.remove("schema") {
        match tag {
            serde_json::Value::String(s) => check_schema(&Some(s))?,
            _ => return Err(Error::schema("/schema", "schema tag must be a string")),
        }
    }
    Ok(map)
}

fn from_value<T: for<'de> Deserialize<'de>>(value: serde_json::Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = format!("{prefix}{}", pointer_of(e.path()));
        Error::schema(pointer, e.into_inner().to_string())
    })
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } | Segment::Enum { variant: key } => {
                out.push('/');
                out.push_str(&escape(key));
            }
            Segment::Unknown => {}
        }
    }
    out
}

fn check_schema(schema: &Option<String>) -> Result<()> {
    match schema {
        Some(s) if s != SCHEMA => Err(Error::schema("/schema", format!("unsupported schema {s:?}, expected {SCHEMA:?}"))),
        _ => Ok(()),
    }
}

fn tree_from(horizon: usize, assets: usize, nodes: &[NodeFile]) -> Result<ScenarioTree> {
    let specs = nodes
        .iter()
        .map(|n| NodeSpec {
            id: n.id.clone(),
            time: n.time,
            parent: n.parent.clone(),
            prices: n.prices.iter().map(|p| p.0.clone()).collect(),
        })
        .collect();
    ScenarioTree::new(horizon, assets, specs)
}

fn leaf_vector(tree: &ScenarioTree, map: &BTreeMap<String, Q>, pointer: &str, complete: bool) -> Result<Vec<Rational>> {
    let mut v = vec![Rational::default(); tree.num_leaves()];
    for (id, value) in map {
        let pos = tree
            .leaf_position_by_id(id)
            .ok_or_else(|| Error::schema(format!("{pointer}/{id}"), format!("{id:?} is not a leaf")))?;
        v[pos] = value.0.clone();
    }
    if complete {
        if let Some(pos) = (0..tree.num_leaves()).find(|&p| !map.contains_key(tree.leaf_id(p))) {
            return Err(Error::schema(pointer.to_string(), format!("missing leaf {:?}", tree.leaf_id(pos))));
        }
    }
    Ok(v)
}

/// `base` is the pointer of the priors object within its document.
pub fn priors_from(tree: &ScenarioTree, file: &PriorsFile, base: &str) -> Result<PriorSet> {
    match file {
        PriorsFile::Flat(list) => {
            let measures = list
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let pointer = format!("{base}/flat/{i}");
                    let w = leaf_vector(tree, m, &pointer, false)?;
                    Measure::new(w).map_err(|e| match e {
                        Error::Schema { message, .. } => Error::schema(pointer, message),
                        e => e,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PriorSet::Flat(measures))
        }
        PriorsFile::Kernel(map) => {
            let mut k = KernelPriors::empty(tree);
            for (id, kernels) in map {
                let pointer = format!("{base}/kernel/{id}");
                let node = tree
                    .node_index(id)
                    .filter(|&n| !tree.is_leaf(n))
                    .ok_or_else(|| Error::schema(pointer.clone(), format!("{id:?} is not an inner node")))?;
                let children = &tree.node(node).children;
                for (i, kernel) in kernels.iter().enumerate() {
                    let mut v = vec![Rational::default(); children.len()];
                    for (child, p) in kernel {
                        let slot = children
                            .iter()
                            .position(|&c| tree.node(c).id == *child)
                            .ok_or_else(|| Error::schema(format!("{pointer}/{i}/{child}"), format!("{child:?} is not a child of {id:?}")))?;
                        v[slot] = p.0.clone();
                    }
                    k.push(node, v);
                }
            }
            Ok(PriorSet::Kernel(k))
        }
    }
}

impl MarketFile {
    pub fn into_market(self) -> Result<Market> {
        check_schema(&self.schema)?;
        let tree = tree_from(self.horizon, self.assets, &self.nodes)?;
        let priors = priors_from(&tree, &self.priors, "/priors")?;
        let options = self
            .options
            .iter()
            .enumerate()
            .map(|(i, o)| {
                Ok(StaticOption {
                    label: o.label.clone(),
                    payoff: leaf_vector(&tree, &o.payoff, &format!("/options/{i}/payoff"), true)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Market::new(tree, priors, options)
    }

    pub fn from_market(m: &Market) -> Self {
        let tree = &m.tree;
        let leaf_map = |v: &[Rational], skip_zero: bool| -> BTreeMap<String, Q> {
            v.iter()
                .enumerate()
                .filter(|(_, x)| !(skip_zero && num_traits::Zero::is_zero(*x)))
                .map(|(p, x)| (tree.leaf_id(p).to_string(), q(x)))
                .collect()
        };
        let priors = match &m.priors {
            PriorSet::Flat(list) => PriorsFile::Flat(list.iter().map(|p| leaf_map(p.weights(), true)).collect()),
            PriorSet::Kernel(k) => PriorsFile::Kernel(
                tree.inner_nodes()
                    .map(|n| {
                        let children = &tree.node(n).children;
                        let ks = k
                            .kernels(n)
                            .iter()
                            .map(|kernel| {
                                children
                                    .iter()
                                    .zip(kernel)
                                    .filter(|(_, p)| !num_traits::Zero::is_zero(*p))
                                    .map(|(&c, p)| (tree.node(c).id.clone(), q(p)))
                                    .collect()
                            })
                            .collect();
                        (tree.node(n).id.clone(), ks)
                    })
                    .collect(),
            ),
        };
        MarketFile {
            schema: Some(SCHEMA.to_string()),
            horizon: tree.horizon(),
            assets: tree.assets(),
            nodes: tree_nodes(tree),
            priors,
            options: m
                .options
                .iter()
                .map(|o| OptionFile { label: o.label.clone(), payoff: leaf_map(&o.payoff, false) })
                .collect(),
        }
    }
}

fn tree_nodes(tree: &ScenarioTree) -> Vec<NodeFile> {
    tree.nodes()
        .iter()
        .map(|n| NodeFile {
            id: n.id.clone(),
            time: n.time,
            parent: n.parent.map(|p| tree.node(p).id.clone()),
            prices: n.prices.iter().map(q).collect(),
        })
        .collect()
}

impl TreeFile {
    pub fn into_tree(self) -> Result<ScenarioTree> {
        check_schema(&self.schema)?;
        tree_from(self.horizon, self.assets, &self.nodes)
    }

    pub fn from_tree(tree: &ScenarioTree) -> Self {
        TreeFile { schema: Some(SCHEMA.to_string()), horizon: tree.horizon(), assets: tree.assets(), nodes: tree_nodes(tree) }
    }
}

pub fn parse_market(text: &str) -> Result<Market> {
    parse_json::<MarketFile>(text)?.into_market()
}

pub fn market_to_json(m: &Market) -> String {
    to_pretty(&MarketFile::from_market(m))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimFile {
    pub schema: &'static str,
    #[serde(flatten)]
    pub values: BTreeMap<String, Q>,
}

/// A claim as `{leaf: value}`; every leaf is required.
pub fn parse_claim(tree: &ScenarioTree, text: &str) -> Result<Claim> {
    let values = tagged_object(text)?
        .into_iter()
        .map(|(k, v)| Ok((k.clone(), from_value(v, &format!("/{}", escape(&k)))?)))
        .collect::<Result<BTreeMap<String, Q>>>()?;
    Ok(Claim::new(leaf_vector(tree, &values, "", true)?))
}

pub fn claim_to_json(tree: &ScenarioTree, c: &Claim) -> String {
    let values = c.values.iter().enumerate().map(|(p, v)| (tree.leaf_id(p).to_string(), q(v))).collect();
    to_pretty(&ClaimFile { schema: SCHEMA, values })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub atoms: Vec<(Q, Q)>,
}

pub fn parse_marginal(text: &str) -> Result<DiscreteMarginal> {
    let f: MarginalFile = parse_json(text)?;
    check_schema(&f.schema)?;
    DiscreteMarginal::new(f.atoms.into_iter().map(|(x, m)| (x.0, m.0)).collect())
}

pub fn marginal_to_json(mu: &DiscreteMarginal) -> String {
    to_pretty(&MarginalFile {
        schema: Some(SCHEMA.to_string()),
        atoms: mu.atoms().iter().map(|(x, m)| (q(x), q(m))).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetQuotesFile {
    pub spot: Q,
    pub quotes: Vec<(Q, Q)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotesFile {
    pub schema: &'static str,
    #[serde(flatten)]
    pub assets: BTreeMap<String, AssetQuotesFile>,
}

/// Quote sheets are keyed by asset index: `{"0": {...}, "1": {...}}`.
pub fn parse_quotes(text: &str) -> Result<CallQuoteSheet> {
    let map = tagged_object(text)?
        .into_iter()
        .map(|(k, v)| Ok((k.clone(), from_value::<AssetQuotesFile>(v, &format!("/{}", escape(&k)))?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let mut assets: Vec<Option<AssetQuotes>> = vec![None; map.len()];
    for (key, f) in map {
        let j: usize = key
            .parse()
            .ok()
            .filter(|&j| j < assets.len())
            .ok_or_else(|| Error::schema(format!("/{key}"), "asset keys must be 0, 1, … without gaps"))?;
        let quotes = AssetQuotes::new(f.spot.0, f.quotes.into_iter().map(|(k, c)| (k.0, c.0)).collect())
            .map_err(|e| match e {
                Error::Schema { pointer, message } => Error::schema(format!("/{key}{pointer}"), message),
                e => e,
            })?;
        assets[j] = Some(quotes);
    }
    Ok(CallQuoteSheet { assets: assets.into_iter().map(|a| a.expect("dense keys")).collect() })
}

pub fn quotes_to_json(sheet: &CallQuoteSheet) -> String {
    let map: BTreeMap<String, AssetQuotesFile> = sheet
        .assets
        .iter()
        .enumerate()
        .map(|(j, a)| {
            (
                j.to_string(),
                AssetQuotesFile { spot: q(&a.spot), quotes: a.quotes.iter().map(|(k, c)| (q(k), q(c))).collect() },
            )
        })
        .collect();
    to_pretty(&QuotesFile { schema: SCHEMA, assets: map })
}

pub fn parse_tree(text: &str) -> Result<ScenarioTree> {
    parse_json::<TreeFile>(text)?.into_tree()
}

/// A prior set on its own, `{"flat": [...]}` or `{"kernel": {...}}`.
pub fn parse_priors(tree: &ScenarioTree, text: &str) -> Result<PriorSet> {
    let map = tagged_object(text)?;
    let f: PriorsFile = from_value(serde_json::Value::Object(map), "")?;
    let p = priors_from(tree, &f, "")?;
    p.validate(tree)?;
    Ok(p)
}
