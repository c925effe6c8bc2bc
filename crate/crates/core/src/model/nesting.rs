//! Laminar families of spans and their nesting forests.
//!
//! A family is laminar when any two spans are disjoint or one contains the
//! other. Only laminar families can be written with inline markup.

use super::{EntitySpan, ModelError};

/// A span and the spans nested directly inside it, ordered by start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestingNode {
    pub span: EntitySpan,
    pub children: Vec<NestingNode>,
}

impl NestingNode {
    /// Nesting depth of this subtree (a leaf has depth 1).
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(NestingNode::depth).max().unwrap_or(0)
    }
}

fn first_partial_overlap(sorted: &[EntitySpan]) -> Option<(EntitySpan, EntitySpan)> {
    let mut open: Vec<&EntitySpan> = Vec::new();
    for span in sorted {
        while open.last().is_some_and(|top| top.end <= span.start) {
            open.pop();
        }
        if let Some(top) = open.last() {
            if span.end > top.end {
                return Some(((*top).clone(), span.clone()));
            }
        }
        open.push(span);
    }
    None
}

/// True iff every pair of spans is disjoint or nested (equal extents count as
/// nested).
pub fn laminar_check(entities: &[EntitySpan]) -> bool {
    let mut sorted = entities.to_vec();
    sorted.sort_by(EntitySpan::canonical_cmp);
    first_partial_overlap(&sorted).is_none()
}

/// Builds the nesting forest, breaking equal-extent ties by label name.
pub fn nesting_forest(entities: &[EntitySpan]) -> Result<Vec<NestingNode>, ModelError> {
    nesting_forest_by(entities, |_| 0)
}

/// Builds the nesting forest. Spans with identical extents nest inside each
/// other; the one with the lower `rank` becomes the outer span.
pub fn nesting_forest_by<F>(entities: &[EntitySpan], rank: F) -> Result<Vec<NestingNode>, ModelError>
where
    F: Fn(&str) -> usize,
{
    let mut sorted = entities.to_vec();
    sorted.sort_by(|a, b| {
        a.start
            .cmp(&b.start)
            .then(b.end.cmp(&a.end))
            .then_with(|| rank(&a.label).cmp(&rank(&b.label)))
            .then_with(|| a.label.cmp(&b.label))
    });
    if let Some((a, b)) = first_partial_overlap(&sorted) {
        return Err(ModelError::NotLaminar(a, b));
    }
    let mut iter = sorted.into_iter().peekable();
    Ok(build(&mut iter, None))
}

fn build<I>(iter: &mut std::iter::Peekable<I>, parent_end: Option<usize>) -> Vec<NestingNode>
where
    I: Iterator<Item = EntitySpan>,
{
    let mut nodes = Vec::new();
    while let Some(next) = iter.peek() {
        if parent_end.is_some_and(|end| next.start >= end) {
            break;
        }
        let span = iter.next().expect("peeked");
        let children = build(iter, Some(span.end));
        nodes.push(NestingNode { span, children });
    }
    nodes
}

/// Pre-order traversal of a forest.
pub fn flatten_forest(forest: &[NestingNode]) -> Vec<EntitySpan> {
    fn walk(nodes: &[NestingNode], out: &mut Vec<EntitySpan>) {
        for n in nodes {
            out.push(n.span.clone());
            walk(&n.children, out);
        }
    }
    let mut out = Vec::new();
    walk(forest, &mut out);
    out
}

/// True when some span covers another (equal extents included).
pub fn is_nested(entities: &[EntitySpan]) -> bool {
    let mut sorted = entities.to_vec();
    sorted.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)));
    sorted.iter().enumerate().any(|(i, outer)| {
        sorted[i + 1..]
            .iter()
            .take_while(|s| s.start < outer.end)
            .any(|inner| outer.contains(inner))
    })
}
