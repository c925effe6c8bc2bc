//! Character-offset view over a sentence.
//!
//! Every offset in this crate counts Unicode scalar values, not bytes. A
//! [`TextIndex`] precomputes the byte position of each character boundary so
//! that slicing and substring search can move between the two coordinate
//! systems cheaply.

/// Number of Unicode scalar values in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

#[derive(Debug, Clone)]
pub struct TextIndex<'a> {
    text: &'a str,
    // byte offset of every char boundary, including the final one
    bounds: Vec<usize>,
}

impl<'a> TextIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut bounds: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        bounds.push(text.len());
        Self { text, bounds }
    }

    pub fn text(&self) -> &'a str {
        self.text
    }

    /// Length in characters.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns `text[start..end]` in character coordinates, or `None` when the
    /// range is inverted or out of bounds.
    pub fn slice(&self, start: usize, end: usize) -> Option<&'a str> {
        if start > end || end > self.len() {
            return None;
        }
        Some(&self.text[self.bounds[start]..self.bounds[end]])
    }

    /// Converts a byte offset that lies on a char boundary into a char offset.
    pub fn char_offset(&self, byte: usize) -> Option<usize> {
        self.bounds.binary_search(&byte).ok()
    }

    /// Char starts of every non-overlapping occurrence of `mention`, scanning
    /// left to right. An empty mention never occurs.
    pub fn occurrences(&self, mention: &str) -> Vec<usize> {
        if mention.is_empty() {
            return Vec::new();
        }
        self.text
            .match_indices(mention)
            .filter_map(|(b, _)| self.char_offset(b))
            .collect()
    }
}
