//! Attribute index, compiled datasets and the weight layout.
//!
//! A model over `A` attributes and `T` tags has `A*T + T*T` weights: the
//! state weight of (attribute `a`, tag `t`) lives at `a*T + t`, and the
//! transition weight `prev -> cur` at `A*T + prev*T + cur`.
//!
//! File format:
//!
//! ```text
//! profner-crf 1
//! [meta]
//! sigma=<f64>
//! [tags]
//! size=<T>
//! <tag>                     T lines, id order
//! [features]
//! size=<A>
//! <attribute>               A lines, id order
//! [weights]
//! size=<A*T + T*T>
//! <f64>                     one per line
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use super::inference::{self, Marginals, Potentials};
use crate::error::{Error, Result};
use crate::lines::Lines;

pub const MAGIC: &str = "profner-crf 1";

/// Frozen string -> id map, ids in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttributeIndex {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl AttributeIndex {
    pub fn from_names(names: Vec<String>) -> Result<Self> {
        let mut ids = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if ids.insert(n.clone(), i as u32).is_some() {
                return Err(Error::Model(format!("duplicate attribute {n:?}")));
            }
        }
        Ok(AttributeIndex { names, ids })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Sorted, deduplicated ids of the known names; unknown names are dropped.
    pub fn encode<S: AsRef<str>>(&self, names: &[S]) -> Vec<u32> {
        let mut out: Vec<u32> = names.iter().filter_map(|n| self.get(n.as_ref())).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// One training sequence: attribute ids per position and gold tag ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrfSequence {
    pub attrs: Vec<Vec<u32>>,
    pub tags: Vec<u32>,
}

impl CrfSequence {
    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrfDataset {
    pub sequences: Vec<CrfSequence>,
    pub attributes: AttributeIndex,
    pub tags: Vec<String>,
}

impl CrfDataset {
    /// Interns observations and tags.
    ///
    /// Attributes seen fewer than `min_count` times are dropped. Tag ids put
    /// `O` first, then other tags in order of first appearance.
    pub fn compile(obs: &[Vec<Vec<String>>], gold: &[Vec<String>], min_count: usize) -> Result<Self> {
        if obs.len() != gold.len() {
            return Err(Error::Dimension {
                expected: obs.len(),
                got: gold.len(),
            });
        }
        if obs.is_empty() {
            return Err(Error::InvalidInput("empty CRF training set".into()));
        }
        let mut tags = vec!["O".to_string()];
        let mut tag_ids: HashMap<&str, u32> = HashMap::from([("O", 0)]);
        let mut order: Vec<&str> = Vec::new();
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for (o, g) in obs.iter().zip(gold) {
            if o.len() != g.len() {
                return Err(Error::Dimension {
                    expected: o.len(),
                    got: g.len(),
                });
            }
            if o.is_empty() {
                return Err(Error::InvalidInput("empty sequence in CRF training set".into()));
            }
            for t in g {
                if !tag_ids.contains_key(t.as_str()) {
                    tag_ids.insert(t, tags.len() as u32);
                    tags.push(t.clone());
                }
            }
            for position in o {
                for a in position {
                    let c = counts.entry(a).or_insert(0);
                    if *c == 0 {
                        order.push(a);
                    }
                    *c += 1;
                }
            }
        }
        let kept = order
            .into_iter()
            .filter(|a| counts[a] >= min_count.max(1))
            .map(str::to_string)
            .collect();
        let attributes = AttributeIndex::from_names(kept)?;
        let sequences = obs
            .iter()
            .zip(gold)
            .map(|(o, g)| CrfSequence {
                attrs: o.iter().map(|p| attributes.encode(p)).collect(),
                tags: g.iter().map(|t| tag_ids[t.as_str()]).collect(),
            })
            .collect();
        Ok(CrfDataset {
            sequences,
            attributes,
            tags,
        })
    }

    pub fn n_weights(&self) -> usize {
        weight_count(self.attributes.len(), self.tags.len())
    }
}

pub fn weight_count(n_attrs: usize, n_tags: usize) -> usize {
    n_attrs * n_tags + n_tags * n_tags
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    pub tags: Vec<String>,
    pub attributes: AttributeIndex,
    pub weights: Vec<f64>,
    /// L2 prior width the weights were trained with.
    pub sigma: f64,
}

impl CrfModel {
    pub fn new(tags: Vec<String>, attributes: AttributeIndex, weights: Vec<f64>, sigma: f64) -> Result<Self> {
        let m = CrfModel {
            tags,
            attributes,
            weights,
            sigma,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tags.is_empty() {
            return Err(Error::Model("empty tag set".into()));
        }
        let want = weight_count(self.attributes.len(), self.tags.len());
        if self.weights.len() != want {
            return Err(Error::Model(format!(
                "{} weights for {} attributes and {} tags (want {want})",
                self.weights.len(),
                self.attributes.len(),
                self.tags.len()
            )));
        }
        if let Some(i) = self.weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::Model(format!("weight {i} is not finite")));
        }
        Ok(())
    }

    pub fn n_tags(&self) -> usize {
        self.tags.len()
    }

    pub fn state_weight(&self, attr: u32, tag: usize) -> f64 {
        self.weights[attr as usize * self.n_tags() + tag]
    }

    pub fn transition_weight(&self, prev: usize, cur: usize) -> f64 {
        let t = self.n_tags();
        self.weights[self.attributes.len() * t + prev * t + cur]
    }

    pub fn potentials(&self, attrs: &[Vec<u32>]) -> Potentials {
        Potentials::new(&self.weights, self.attributes.len(), self.n_tags(), attrs)
    }

    pub fn forward_backward(&self, attrs: &[Vec<u32>]) -> Result<Marginals> {
        inference::forward_backward(&self.potentials(attrs))
    }

    /// Best tag ids and their score.
    pub fn viterbi(&self, attrs: &[Vec<u32>]) -> Result<(Vec<usize>, f64)> {
        inference::viterbi(&self.potentials(attrs))
    }

    /// Tags a sequence of raw attribute strings; unknown attributes are ignored.
    pub fn tag<S: AsRef<str>>(&self, obs: &[Vec<S>]) -> Result<Vec<String>> {
        let attrs: Vec<Vec<u32>> = obs.iter().map(|p| self.attributes.encode(p)).collect();
        let (ids, _) = self.viterbi(&attrs)?;
        Ok(ids.into_iter().map(|i| self.tags[i].clone()).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_model(&mut out, self);
        out
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut l = Lines::new(text, origin);
        let m = parse_model(&mut l)?;
        if let Some(extra) = l.peek() {
            return Err(l.err(format!("trailing content {extra:?}")));
        }
        Ok(m)
    }
}

pub(crate) fn write_model(out: &mut String, m: &CrfModel) {
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(out, "[meta]\nsigma={:?}", m.sigma);
    let _ = writeln!(out, "[tags]\nsize={}", m.tags.len());
    for t in &m.tags {
        let _ = writeln!(out, "{t}");
    }
    let _ = writeln!(out, "[features]\nsize={}", m.attributes.len());
    for a in m.attributes.names() {
        let _ = writeln!(out, "{a}");
    }
    let _ = writeln!(out, "[weights]\nsize={}", m.weights.len());
    for w in &m.weights {
        let _ = writeln!(out, "{w:?}");
    }
}

pub(crate) fn parse_model(l: &mut Lines<'_>) -> Result<CrfModel> {
    l.expect(MAGIC)?;
    l.expect("[meta]")?;
    let sigma: f64 = l.parsed("sigma")?;
    l.expect("[tags]")?;
    let n_tags: usize = l.parsed("size")?;
    if n_tags == 0 {
        return Err(l.err("empty tag set"));
    }
    let tags = (0..n_tags)
        .map(|_| l.next().map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    l.expect("[features]")?;
    let n_attrs: usize = l.parsed("size")?;
    let names = (0..n_attrs)
        .map(|_| l.next().map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let attributes = AttributeIndex::from_names(names).map_err(|e| l.err(e.to_string()))?;
    l.expect("[weights]")?;
    let n_weights: usize = l.parsed("size")?;
    let mut weights = Vec::with_capacity(n_weights);
    for _ in 0..n_weights {
        let v = l.next()?;
        weights.push(v.parse::<f64>().map_err(|_| l.err(format!("bad weight {v:?}")))?);
    }
    CrfModel::new(tags, attributes, weights, sigma).map_err(|e| l.err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn compile_orders_tags_and_attributes() {
        let obs = vec![vec![strings(&["b", "a"]), strings(&["a"])]];
        let gold = vec![strings(&["B-PER", "O"])];
        let d = CrfDataset::compile(&obs, &gold, 1).unwrap();
        assert_eq!(d.tags, strings(&["O", "B-PER"]));
        assert_eq!(d.attributes.names(), strings(&["b", "a"]).as_slice());
        assert_eq!(d.sequences[0].attrs, vec![vec![0, 1], vec![1]]);
        assert_eq!(d.sequences[0].tags, vec![1, 0]);
        assert_eq!(d.n_weights(), 2 * 2 + 4);

        let cut = CrfDataset::compile(&obs, &gold, 2).unwrap();
        assert_eq!(cut.attributes.names(), strings(&["a"]).as_slice());
    }

    #[test]
    fn compile_rejects_bad_shapes() {
        let obs = vec![vec![strings(&["a"])]];
        assert!(CrfDataset::compile(&obs, &[strings(&["O", "O"])], 1).is_err());
        assert!(CrfDataset::compile(&[], &[], 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let attrs = AttributeIndex::from_names(strings(&["x=1", "[tags]", "w[0]:lower=a b"])).unwrap();
        let weights: Vec<f64> = (0..weight_count(3, 2)).map(|i| (i as f64).sin() / 3.0).collect();
        let m = CrfModel::new(strings(&["O", "B-PER"]), attrs, weights, 0.5).unwrap();
        let back = CrfModel::from_text(&m.to_text(), "m").unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn empty_tag_set_rejected_at_load() {
        let text = "profner-crf 1\n[meta]\nsigma=1.0\n[tags]\nsize=0\n[features]\nsize=0\n[weights]\nsize=0\n";
        let err = CrfModel::from_text(text, "m.crf").unwrap_err();
        assert!(err.to_string().contains("empty tag set"), "{err}");
    }

    #[test]
    fn layout_accessors() {
        let attrs = AttributeIndex::from_names(strings(&["a", "b"])).unwrap();
        let weights: Vec<f64> = (0..weight_count(2, 3)).map(|i| i as f64).collect();
        let m = CrfModel::new(strings(&["O", "B-X", "I-X"]), attrs, weights, 1.0).unwrap();
        assert_eq!(m.state_weight(1, 2), 5.0);
        assert_eq!(m.transition_weight(0, 0), 6.0);
        assert_eq!(m.transition_weight(2, 1), 6.0 + 7.0);
    }
}
