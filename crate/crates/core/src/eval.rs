//! Entity-level precision/recall/F1, the approximate-match metric, entity
//! accuracy and k-fold index splitting.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{parse_bio, Bio};
use crate::error::{Error, Result};

/// A labeled span `[start, end)` inside sentence `sentence`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entity {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub tag: String,
}

/// Spans of a BIO sequence. An orphan `I-X` opens a new span.
pub fn entities(sentence: usize, tags: &[String]) -> Vec<Entity> {
    let mut out: Vec<Entity> = Vec::new();
    let mut open: Option<(usize, &str)> = None;
    let close = |open: &mut Option<(usize, &str)>, end: usize, out: &mut Vec<Entity>| {
        if let Some((start, tag)) = open.take() {
            out.push(Entity {
                sentence,
                start,
                end,
                tag: tag.to_string(),
            });
        }
    };
    for (i, t) in tags.iter().enumerate() {
        match parse_bio(t) {
            Some(Bio::Begin(x)) => {
                close(&mut open, i, &mut out);
                open = Some((i, x));
            }
            Some(Bio::Inside(x)) => {
                if open.map(|(_, y)| y) != Some(x) {
                    close(&mut open, i, &mut out);
                    open = Some((i, x));
                }
            }
            _ => close(&mut open, i, &mut out),
        }
    }
    close(&mut open, tags.len(), &mut out);
    out
}

/// `P = |pred ∩ gold| / |pred|`, `R = |pred ∩ gold| / |gold|`; 0 for an empty denominator.
pub fn precision_recall(pred: &[Entity], gold: &[Entity]) -> (f64, f64) {
    let p: HashSet<&Entity> = pred.iter().collect();
    let g: HashSet<&Entity> = gold.iter().collect();
    let hit = p.intersection(&g).count() as f64;
    let precision = if p.is_empty() { 0.0 } else { hit / p.len() as f64 };
    let recall = if g.is_empty() { 0.0 } else { hit / g.len() as f64 };
    (precision, recall)
}

/// Harmonic mean; 0 when `p + r == 0`.
pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EntityMatchReport {
    pub perfect: usize,
    /// Same end boundary and tag as a gold entity, different start.
    pub partial: usize,
    pub retrieved: usize,
    pub gold: usize,
}

impl EntityMatchReport {
    pub fn compare(pred: &[Entity], gold: &[Entity]) -> Self {
        let exact: HashSet<&Entity> = gold.iter().collect();
        let right_edges: HashSet<(usize, usize, &str)> =
            gold.iter().map(|e| (e.sentence, e.end, e.tag.as_str())).collect();
        let mut seen = HashSet::new();
        let mut report = EntityMatchReport {
            gold: exact.len(),
            ..Default::default()
        };
        for e in pred {
            if !seen.insert(e) {
                continue;
            }
            report.retrieved += 1;
            if exact.contains(e) {
                report.perfect += 1;
            } else if right_edges.contains(&(e.sentence, e.end, e.tag.as_str())) {
                report.partial += 1;
            }
        }
        report
    }

    pub fn merge(&mut self, other: &EntityMatchReport) {
        self.perfect += other.perfect;
        self.partial += other.partial;
        self.retrieved += other.retrieved;
        self.gold += other.gold;
    }

    pub fn precision(&self) -> f64 {
        ratio(self.perfect, self.retrieved)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.perfect, self.gold)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// `(perfect + 0.5 partial) / retrieved`, 0 when nothing was retrieved.
pub fn approximate_match(report: &EntityMatchReport) -> f64 {
    if report.retrieved == 0 {
        0.0
    } else {
        (report.perfect as f64 + 0.5 * report.partial as f64) / report.retrieved as f64
    }
}

/// Percentage of correctly identified entities.
pub fn entity_accuracy(correct: usize, total: usize) -> Result<f64> {
    if total == 0 {
        return Err(Error::InvalidInput("entity accuracy over zero entities".into()));
    }
    if correct > total {
        return Err(Error::InvalidInput(format!(
            "{correct} correct out of {total} entities"
        )));
    }
    Ok(100.0 * correct as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
}

/// Seeded shuffle of `0..n` dealt round-robin into `k` folds; each fold is
/// sorted ascending.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidInput(format!(
            "k-fold needs 1 < k <= n, got k={k}, n={n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in idx.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(FoldPlan { folds })
}

/// Scores of one tag level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub counts: EntityMatchReport,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub approximate: f64,
}

impl LevelReport {
    pub fn from_counts(level: usize, counts: EntityMatchReport) -> Self {
        let (p, r) = (counts.precision(), counts.recall());
        LevelReport {
            level,
            counts,
            precision: p,
            recall: r,
            f1: f1(p, r),
            approximate: approximate_match(&counts),
        }
    }
}

/// Compares per-sentence gold and predicted tag sequences for one level.
pub fn evaluate_level(level: usize, gold: &[Vec<String>], pred: &[Vec<String>]) -> Result<LevelReport> {
    if gold.len() != pred.len() {
        return Err(Error::Dimension {
            expected: gold.len(),
            got: pred.len(),
        });
    }
    let mut counts = EntityMatchReport::default();
    for (s, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::Dimension {
                expected: g.len(),
                got: p.len(),
            });
        }
        counts.merge(&EntityMatchReport::compare(&entities(s, p), &entities(s, g)));
    }
    Ok(LevelReport::from_counts(level, counts))
}

pub fn reports_tsv(reports: &[LevelReport]) -> String {
    let mut out = String::from("level\tprecision\trecall\tf1\tapproximate_match\tperfect\tpartial\tretrieved\tgold\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}\t{}\t{}",
            level_name(r.level),
            r.precision,
            r.recall,
            r.f1,
            r.approximate,
            r.counts.perfect,
            r.counts.partial,
            r.counts.retrieved,
            r.counts.gold
        );
    }
    out
}

pub fn reports_table(reports: &[LevelReport]) -> String {
    let mut out = format!(
        "{:<8} {:>9} {:>9} {:>9} {:>9}\n",
        "level", "P(%)", "R(%)", "F1(%)", "approx(%)"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<8} {:>9.2} {:>9.2} {:>9.2} {:>9.2}",
            level_name(r.level),
            100.0 * r.precision,
            100.0 * r.recall,
            100.0 * r.f1,
            100.0 * r.approximate
        );
    }
    out
}

fn level_name(level: usize) -> String {
    if level == 0 {
        "all".to_string()
    } else {
        level.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ent(s: usize, a: usize, b: usize, t: &str) -> Entity {
        Entity {
            sentence: s,
            start: a,
            end: b,
            tag: t.into(),
        }
    }

    fn tags(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pr_examples() {
        let a = ent(0, 0, 1, "A");
        let b = ent(0, 1, 2, "B");
        let c = ent(0, 2, 3, "C");
        assert_eq!(precision_recall(&[a.clone(), b.clone()], &[a.clone(), b.clone()]), (1.0, 1.0));
        assert_eq!(precision_recall(&[], std::slice::from_ref(&a)), (0.0, 0.0));
        assert_eq!(precision_recall(&[a, b.clone()], &[b, c]), (0.5, 0.5));
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1(0.5, 0.5), 0.5);
        assert_eq!(f1(1.0, 0.0), 0.0);
        assert_eq!(f1(0.0, 0.0), 0.0);
    }

    #[test]
    fn approximate_examples() {
        let r = EntityMatchReport {
            perfect: 4,
            partial: 5,
            retrieved: 10,
            gold: 12,
        };
        assert_eq!(approximate_match(&r), 0.65);
        let all = EntityMatchReport {
            perfect: 3,
            partial: 0,
            retrieved: 3,
            gold: 3,
        };
        assert_eq!(approximate_match(&all), 1.0);
        assert_eq!(approximate_match(&EntityMatchReport::default()), 0.0);
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(entity_accuracy(790, 790).unwrap(), 100.0);
        assert_eq!(entity_accuracy(0, 10).unwrap(), 0.0);
        assert_eq!(entity_accuracy(426, 500).unwrap(), 85.2);
        assert!(entity_accuracy(0, 0).is_err());
    }

    #[test]
    fn kfold_examples() {
        let p = kfold_split(10, 10, 1).unwrap();
        assert!(p.folds.iter().all(|f| f.len() == 1));
        let mut sizes: Vec<usize> = kfold_split(10, 3, 1).unwrap().folds.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 4]);
        assert!(kfold_split(3, 4, 1).is_err());
        assert!(kfold_split(3, 1, 1).is_err());
    }

    #[test]
    fn spans_and_partial_matches() {
        let gold = entities(0, &tags(&["B-GOV", "I-GOV", "I-GOV", "O", "B-PER"]));
        assert_eq!(gold, vec![ent(0, 0, 3, "GOV"), ent(0, 4, 5, "PER")]);
        let pred = entities(0, &tags(&["O", "B-GOV", "I-GOV", "O", "I-PER"]));
        let r = EntityMatchReport::compare(&pred, &gold);
        assert_eq!((r.perfect, r.partial, r.retrieved, r.gold), (1, 1, 2, 2));
    }
}
