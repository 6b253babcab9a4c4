//! Text serialization of [`ProfilerModel`].
//!
//! ```text
//! profner-profiler 1
//! [meta]
//! key=value ...
//! [mask]
//! <feature name>=<0|1>      one line per base statistic
//! [vocab]
//! size=<m>
//! <term>                    m lines, column order
//! [forest:gender]
//! labels=<label>\t<label>...
//! features=<arity>
//! tree <index> seed=<seed>
//! S <feature> <threshold>   split node, pre-order
//! L <class>                 leaf node
//! ...
//! [forest:age]
//! ...
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so
//! `parse(write(m)) == m` exactly.

use std::fmt::Write as _;

use super::forest::{DecisionTree, Forest, ForestParams, PreorderItem};
use super::{ProfilerModel, ProfilerParams};
use crate::error::Result;
use crate::lines::{split_labels, Lines};
use crate::wordspace::Vocabulary;

pub const MAGIC: &str = "profner-profiler 1";

pub fn write_model(m: &ProfilerModel) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str("[meta]\n");
    let p = &m.params;
    let _ = writeln!(out, "seed={}", m.seed);
    let _ = writeln!(out, "language={}", m.language);
    let _ = writeln!(out, "trees={}", p.forest.n_trees);
    let _ = writeln!(out, "max_depth={}", p.forest.max_depth);
    let _ = writeln!(out, "min_leaf={}", p.forest.min_leaf);
    let _ = writeln!(
        out,
        "max_features={}",
        p.forest.max_features.map_or("auto".to_string(), |k| k.to_string())
    );
    let _ = writeln!(out, "bootstrap={}", p.forest.bootstrap);
    let _ = writeln!(out, "drop_fraction={:?}", p.drop_fraction);
    let _ = writeln!(out, "elimination={}", p.do_elimination);
    let _ = writeln!(out, "age_labels={}", m.age_labels.join("\t"));
    out.push_str("[mask]\n");
    for (name, keep) in m.feature_names.iter().zip(&m.mask) {
        let _ = writeln!(out, "{name}={}", u8::from(*keep));
    }
    out.push_str("[vocab]\n");
    let _ = writeln!(out, "size={}", m.vocab.len());
    for t in m.vocab.terms() {
        out.push_str(t);
        out.push('\n');
    }
    write_forest(&mut out, "gender", &m.gender);
    write_forest(&mut out, "age", &m.age);
    out
}

fn write_forest(out: &mut String, name: &str, f: &Forest) {
    let _ = writeln!(out, "[forest:{name}]");
    let _ = writeln!(out, "labels={}", f.labels.join("\t"));
    let _ = writeln!(out, "features={}", f.n_features);
    for (i, (tree, seed)) in f.trees.iter().zip(&f.seeds).enumerate() {
        let _ = writeln!(out, "tree {i} seed={seed}");
        for item in tree.preorder() {
            match item {
                PreorderItem::Split(feat, thr) => {
                    let _ = writeln!(out, "S {feat} {thr:?}");
                }
                PreorderItem::Leaf(c) => {
                    let _ = writeln!(out, "L {c}");
                }
            }
        }
    }
}

pub fn parse_model(text: &str, origin: &str) -> Result<ProfilerModel> {
    let mut l = Lines::new(text, origin);
    l.expect(MAGIC)?;
    l.expect("[meta]")?;
    let seed: u64 = l.parsed("seed")?;
    let language = l.key_value("language")?.to_string();
    let n_trees: usize = l.parsed("trees")?;
    let max_depth: usize = l.parsed("max_depth")?;
    let min_leaf: usize = l.parsed("min_leaf")?;
    let max_features = match l.key_value("max_features")? {
        "auto" => None,
        v => Some(v.parse().map_err(|_| l.err("bad max_features"))?),
    };
    let bootstrap: bool = l.parsed("bootstrap")?;
    let drop_fraction: f64 = l.parsed("drop_fraction")?;
    let do_elimination: bool = l.parsed("elimination")?;
    let age_labels = split_labels(l.key_value("age_labels")?);

    l.expect("[mask]")?;
    let mut feature_names = Vec::new();
    let mut mask = Vec::new();
    while let Some(line) = l.peek() {
        if line.starts_with('[') {
            break;
        }
        l.pos += 1;
        let (name, v) = line
            .rsplit_once('=')
            .ok_or_else(|| l.err(format!("bad mask line {line:?}")))?;
        feature_names.push(name.to_string());
        mask.push(match v {
            "1" => true,
            "0" => false,
            _ => return Err(l.err(format!("bad mask value {v:?}"))),
        });
    }

    l.expect("[vocab]")?;
    let size: usize = l.parsed("size")?;
    let mut terms = Vec::with_capacity(size);
    for _ in 0..size {
        terms.push(l.next()?.to_string());
    }
    let vocab = Vocabulary::from_terms(terms)?;

    let gender = parse_forest(&mut l, "gender")?;
    let age = parse_forest(&mut l, "age")?;
    if l.peek().is_some() {
        return Err(l.err("trailing content after [forest:age]"));
    }
    let model = ProfilerModel {
        vocab,
        age_labels,
        language,
        feature_names,
        mask,
        gender,
        age,
        seed,
        params: ProfilerParams {
            forest: ForestParams {
                n_trees,
                max_depth,
                min_leaf,
                max_features,
                bootstrap,
            },
            drop_fraction,
            do_elimination,
        },
    };
    model.validate()?;
    Ok(model)
}

fn parse_forest(l: &mut Lines<'_>, name: &str) -> Result<Forest> {
    l.expect(&format!("[forest:{name}]"))?;
    let labels = split_labels(l.key_value("labels")?);
    let n_features: usize = l.parsed("features")?;
    let mut trees = Vec::new();
    let mut seeds = Vec::new();
    while let Some(line) = l.peek() {
        if line.starts_with('[') {
            break;
        }
        l.pos += 1;
        let header: Vec<&str> = line.split(' ').collect();
        let seed = match header.as_slice() {
            ["tree", _, s] => s
                .strip_prefix("seed=")
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| l.err(format!("bad tree header {line:?}")))?,
            _ => return Err(l.err(format!("expected tree header, found {line:?}"))),
        };
        let mut items = Vec::new();
        while let Some(node) = l.peek() {
            if node.starts_with("tree ") || node.starts_with('[') {
                break;
            }
            l.pos += 1;
            let parts: Vec<&str> = node.split(' ').collect();
            let item = match parts.as_slice() {
                ["S", f, t] => PreorderItem::Split(
                    f.parse().map_err(|_| l.err("bad split feature"))?,
                    t.parse().map_err(|_| l.err("bad split threshold"))?,
                ),
                ["L", c] => PreorderItem::Leaf(c.parse().map_err(|_| l.err("bad leaf class"))?),
                _ => return Err(l.err(format!("bad node line {node:?}"))),
            };
            items.push(item);
        }
        trees.push(DecisionTree::from_preorder(&items).map_err(|e| l.err(e.to_string()))?);
        seeds.push(seed);
    }
    if trees.is_empty() {
        return Err(l.err(format!("forest {name} has no trees")));
    }
    Ok(Forest {
        trees,
        labels,
        n_features,
        seeds,
    })
}
