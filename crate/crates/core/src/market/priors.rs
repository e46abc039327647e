use num_traits::{One, Signed, Zero};

use super::tree::ScenarioTree;
use crate::error::{Error, Result};
use crate::num::Rational;

/// Maximum number of pure kernel selections expanded into flat priors.
pub const EXPANSION_LIMIT: usize = 64;

/// A probability measure on the leaves, indexed by leaf position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Measure {
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        check_probability(&weights, "")?;
        Ok(Measure { weights })
    }

    /// Skips validation; used for solver output, which in float mode only
    /// sums to 1 up to rounding.
    pub(crate) fn from_weights(weights: Vec<Rational>) -> Self {
        Measure { weights }
    }

    pub fn uniform(n: usize) -> Self {
        Measure { weights: vec![Rational::new(1.into(), (n as i64).into()); n] }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn mass(&self, leaf: usize) -> &Rational {
        &self.weights[leaf]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i].is_positive()).collect()
    }

    pub fn expectation(&self, values: &[Rational]) -> Rational {
        self.weights.iter().zip(values).filter(|(w, _)| !w.is_zero()).map(|(w, v)| w * v).sum()
    }

    /// `Q ≪ self`.
    pub fn dominates(&self, q: &Measure) -> bool {
        self.weights.iter().zip(&q.weights).all(|(p, q)| !p.is_zero() || q.is_zero())
    }
}

fn check_probability(w: &[Rational], pointer: &str) -> Result<()> {
    if let Some(i) = w.iter().position(|x| x.is_negative()) {
        return Err(Error::schema(format!("{pointer}/{i}"), "probabilities must be nonnegative"));
    }
    let total: Rational = w.iter().sum();
    if !total.is_one() {
        return Err(Error::schema(pointer.to_string(), format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// One-step measures attached to each inner node. A kernel vector is
/// aligned with the node's `children`. Every measurable selection of
/// convex combinations of the listed kernels is admissible.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelPriors {
    per_node: Vec<Vec<Vec<Rational>>>,
}

impl KernelPriors {
    pub fn empty(tree: &ScenarioTree) -> Self {
        KernelPriors { per_node: vec![Vec::new(); tree.nodes().len()] }
    }

    pub fn push(&mut self, node: usize, kernel: Vec<Rational>) {
        self.per_node[node].push(kernel);
    }

    pub fn kernels(&self, node: usize) -> &[Vec<Rational>] {
        &self.per_node[node]
    }

    /// Equal-weight mixture of the kernels listed at `node`.
    pub fn barycenter(&self, node: usize) -> Vec<Rational> {
        let ks = &self.per_node[node];
        let n = Rational::from_integer((ks.len() as i64).into());
        let width = ks.first().map_or(0, Vec::len);
        (0..width).map(|c| ks.iter().map(|k| &k[c]).sum::<Rational>() / &n).collect()
    }

    /// Number of pure selections (one listed kernel per inner node),
    /// saturating at `u128::MAX`.
    pub fn selection_count(&self, tree: &ScenarioTree) -> u128 {
        tree.inner_nodes().fold(1u128, |acc, n| acc.saturating_mul(self.per_node[n].len() as u128))
    }

    /// Product measure obtained by using `kernel(node)` at every node.
    pub fn product(&self, tree: &ScenarioTree, kernel: impl Fn(usize) -> Vec<Rational>) -> Measure {
        let mut step: Vec<Option<Vec<Rational>>> = vec![None; tree.nodes().len()];
        for n in tree.inner_nodes() {
            step[n] = Some(kernel(n));
        }
        let weights = tree
            .leaves()
            .iter()
            .map(|&leaf| {
                let path = tree.path(leaf);
                let mut p = Rational::one();
                for w in path.windows(2) {
                    let slot = tree.node(w[0]).children.iter().position(|&c| c == w[1]).expect("child");
                    p *= &step[w[0]].as_ref().expect("inner node")[slot];
                    if p.is_zero() {
                        break;
                    }
                }
                p
            })
            .collect();
        Measure { weights }
    }

    /// Product of the barycentric kernels; it dominates every admissible prior.
    pub fn mixture(&self, tree: &ScenarioTree) -> Measure {
        self.product(tree, |n| self.barycenter(n))
    }

    fn validate(&self, tree: &ScenarioTree) -> Result<()> {
        if self.per_node.len() != tree.nodes().len() {
            return Err(Error::schema("/priors/kernel", "kernel table does not match the tree"));
        }
        for n in 0..tree.nodes().len() {
            let id = &tree.node(n).id;
            let ks = &self.per_node[n];
            if tree.is_leaf(n) {
                if !ks.is_empty() {
                    return Err(Error::schema(format!("/priors/kernel/{id}"), "leaves carry no kernel"));
                }
                continue;
            }
            if ks.is_empty() {
                return Err(Error::schema(format!("/priors/kernel/{id}"), "inner node without a kernel"));
            }
            for (k, q) in ks.iter().enumerate() {
                let pointer = format!("/priors/kernel/{id}/{k}");
                if q.len() != tree.node(n).children.len() {
                    return Err(Error::schema(pointer, "kernel must list every child"));
                }
                check_probability(q, &pointer)?;
            }
        }
        Ok(())
    }
}

/// The prior set 𝒫.
#[derive(Clone, Debug, PartialEq)]
pub enum PriorSet {
    /// A finite list of measures, taken literally (not convexified).
    Flat(Vec<Measure>),
    /// Per-node one-step kernels.
    Kernel(KernelPriors),
}

/// A prior with a display name (`P1`, `P2`, … for flat lists).
#[derive(Clone, Debug, PartialEq)]
pub struct NamedPrior {
    pub name: String,
    pub measure: Measure,
}

impl PriorSet {
    pub fn validate(&self, tree: &ScenarioTree) -> Result<()> {
        match self {
            PriorSet::Flat(list) => {
                if list.is_empty() {
                    return Err(Error::schema("/priors/flat", "at least one prior is required"));
                }
                for (i, p) in list.iter().enumerate() {
                    if p.weights.len() != tree.num_leaves() {
                        return Err(Error::schema(format!("/priors/flat/{i}"), "prior must cover every leaf"));
                    }
                    check_probability(&p.weights, &format!("/priors/flat/{i}"))?;
                }
                Ok(())
            }
            PriorSet::Kernel(k) => k.validate(tree),
        }
    }

    /// Flat priors as listed, or every pure kernel selection. Refuses
    /// kernel sets with more than `limit` selections.
    pub fn expand(&self, tree: &ScenarioTree, limit: usize) -> Result<Vec<NamedPrior>> {
        match self {
            PriorSet::Flat(list) => Ok(list
                .iter()
                .enumerate()
                .map(|(i, m)| NamedPrior { name: format!("P{}", i + 1), measure: m.clone() })
                .collect()),
            PriorSet::Kernel(k) => {
                let count = k.selection_count(tree);
                if count > limit as u128 {
                    return Err(Error::Scale(format!("{count} kernel selections exceed the limit of {limit}")));
                }
                Ok(pure_selections(tree, k))
            }
        }
    }

    /// Priors examined when a property must hold for some prior: the
    /// listed measures, or for kernels the barycentric product followed
    /// by the pure selections when there are at most [`EXPANSION_LIMIT`].
    pub fn candidates(&self, tree: &ScenarioTree) -> Vec<NamedPrior> {
        match self {
            PriorSet::Flat(_) => self.expand(tree, usize::MAX).expect("flat expansion"),
            PriorSet::Kernel(k) => {
                let mut out = vec![NamedPrior { name: "mix".into(), measure: k.mixture(tree) }];
                if k.selection_count(tree) <= EXPANSION_LIMIT as u128 {
                    out.extend(pure_selections(tree, k));
                }
                out
            }
        }
    }

    /// A prior `P̄ ∈ 𝒫` with `P ≪ P̄` for every `P ∈ 𝒫`, if one exists.
    pub fn dominating(&self, tree: &ScenarioTree) -> Option<NamedPrior> {
        match self {
            PriorSet::Flat(list) => list
                .iter()
                .enumerate()
                .find(|(_, p)| list.iter().all(|q| p.dominates(q)))
                .map(|(i, p)| NamedPrior { name: format!("P{}", i + 1), measure: p.clone() }),
            PriorSet::Kernel(k) => Some(NamedPrior { name: "mix".into(), measure: k.mixture(tree) }),
        }
    }
}

fn pure_selections(tree: &ScenarioTree, k: &KernelPriors) -> Vec<NamedPrior> {
    let inner: Vec<usize> = tree.inner_nodes().collect();
    let mut choice = vec![0usize; inner.len()];
    let mut out = Vec::new();
    loop {
        let pick = |n: usize| {
            let slot = inner.iter().position(|&m| m == n).expect("inner node");
            k.kernels(n)[choice[slot]].clone()
        };
        let name = inner
            .iter()
            .zip(&choice)
            .map(|(&n, &c)| format!("{}={}", tree.node(n).id, c + 1))
            .collect::<Vec<_>>()
            .join(",");
        out.push(NamedPrior { name: format!("sel({name})"), measure: k.product(tree, pick) });
        // odometer over kernel indices
        let mut i = inner.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < k.kernels(inner[i]).len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::NodeSpec;
    use crate::num::{int, rat};

    fn binary2() -> ScenarioTree {
        ScenarioTree::new(
            2,
            1,
            vec![
                NodeSpec::new("r", 0, None, vec![int(1)]),
                NodeSpec::new("u", 1, Some("r"), vec![int(2)]),
                NodeSpec::new("d", 1, Some("r"), vec![rat(1, 2)]),
                NodeSpec::new("uu", 2, Some("u"), vec![int(4)]),
                NodeSpec::new("ud", 2, Some("u"), vec![int(1)]),
                NodeSpec::new("du", 2, Some("d"), vec![int(1)]),
                NodeSpec::new("dd", 2, Some("d"), vec![rat(1, 4)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(Measure::new(vec![rat(1, 2), rat(1, 2)]).is_ok());
        assert!(Measure::new(vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(Measure::new(vec![int(2), int(-1)]).is_err());
    }

    #[test]
    fn product_and_selections() {
        let t = binary2();
        let mut k = KernelPriors::empty(&t);
        k.push(t.node_index("r").unwrap(), vec![rat(1, 2), rat(1, 2)]);
        k.push(t.node_index("u").unwrap(), vec![int(1), int(0)]);
        k.push(t.node_index("u").unwrap(), vec![int(0), int(1)]);
        k.push(t.node_index("d").unwrap(), vec![rat(1, 3), rat(2, 3)]);
        let p = PriorSet::Kernel(k.clone());
        p.validate(&t).unwrap();
        assert_eq!(k.selection_count(&t), 2);
        let sel = p.expand(&t, 64).unwrap();
        assert_eq!(sel.len(), 2);
        assert_eq!(sel[0].measure.weights(), &[rat(1, 2), int(0), rat(1, 6), rat(1, 3)]);
        assert_eq!(sel[1].name, "sel(r=1,u=2,d=1)");
        let mix = k.mixture(&t);
        assert_eq!(mix.weights(), &[rat(1, 4), rat(1, 4), rat(1, 6), rat(1, 3)]);
        assert!(sel.iter().all(|s| mix.dominates(&s.measure)));
        assert!(p.expand(&t, 1).is_err());
    }

    #[test]
    fn dominating_flat_prior() {
        let a = Measure::new(vec![int(1), int(0)]).unwrap();
        let b = Measure::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
        let t = ScenarioTree::new(
            1,
            1,
            vec![
                NodeSpec::new("r", 0, None, vec![int(1)]),
                NodeSpec::new("u", 1, Some("r"), vec![int(2)]),
                NodeSpec::new("d", 1, Some("r"), vec![int(0)]),
            ],
        )
        .unwrap();
        let p = PriorSet::Flat(vec![a.clone(), b]);
        assert_eq!(p.dominating(&t).unwrap().name, "P2");
        let q = PriorSet::Flat(vec![a, Measure::new(vec![int(0), int(1)]).unwrap()]);
        assert!(q.dominating(&t).is_none());
    }
}
