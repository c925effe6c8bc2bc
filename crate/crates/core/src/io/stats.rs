use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{is_nested, AnnotatedSentence};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    /// Distinct labels over all splits.
    pub labels: usize,
    pub label_set: Vec<String>,
    pub entities: usize,
    /// Some sentence has a span covering another.
    pub nested: bool,
    /// Pairs of spans with equal extents and different labels.
    pub shared_extent_pairs: usize,
}

pub fn shared_extent_pairs(sentence: &AnnotatedSentence) -> usize {
    let e = sentence.entities();
    (0..e.len())
        .map(|i| e[i + 1..].iter().filter(|o| o.same_extent(&e[i])).count())
        .sum()
}

pub fn corpus_stats(train: &[AnnotatedSentence], dev: &[AnnotatedSentence], test: &[AnnotatedSentence]) -> CorpusStats {
    let all = || train.iter().chain(dev).chain(test);
    let label_set: BTreeSet<&str> = all()
        .flat_map(|s| s.entities().iter().map(|e| e.label.as_str()))
        .collect();
    CorpusStats {
        train: train.len(),
        dev: dev.len(),
        test: test.len(),
        labels: label_set.len(),
        label_set: label_set.into_iter().map(String::from).collect(),
        entities: all().map(|s| s.entities().len()).sum(),
        nested: all().any(|s| is_nested(s.entities())),
        shared_extent_pairs: all().map(shared_extent_pairs).sum(),
    }
}
