//! Hierarchical content names, name prefixes, and longest-prefix match.
//!
//! Names render as `/`-separated UTF-8 components (`/att/video/movie1/s3`).
//! Components are compared byte-for-byte; there is no canonicalization and
//! no escaping, so a component can never contain `/`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::NameError;

pub const SEPARATOR: char = '/';

fn parse_components(text: &str) -> Result<Arc<[Box<str>]>, NameError> {
    if text.is_empty() {
        return Err(NameError::Empty);
    }
    let rest = text
        .strip_prefix(SEPARATOR)
        .ok_or_else(|| NameError::MissingLeadingSeparator(text.to_string()))?;
    let mut components = Vec::new();
    for (position, component) in rest.split(SEPARATOR).enumerate() {
        if component.is_empty() {
            return Err(NameError::EmptyComponent {
                text: text.to_string(),
                position,
            });
        }
        components.push(Box::from(component));
    }
    Ok(components.into())
}

fn render(components: &[Box<str>], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for component in components {
        write!(f, "{SEPARATOR}{component}")?;
    }
    Ok(())
}

/// Name of a content object. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    components: Arc<[Box<str>]>,
}

impl Name {
    pub fn parse(text: &str) -> Result<Self, NameError> {
        parse_components(text).map(|components| Self { components })
    }

    /// Builds a name from already-validated parts.
    pub fn from_components<I, S>(parts: I) -> Result<Self, NameError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let components: Vec<Box<str>> = parts.into_iter().map(|s| Box::from(s.as_ref())).collect();
        validate(&components)?;
        Ok(Self {
            components: components.into(),
        })
    }

    /// Appends `component` to `prefix`.
    pub fn child_of(prefix: &NamePrefix, component: &str) -> Result<Self, NameError> {
        let mut components: Vec<Box<str>> = prefix.components.iter().cloned().collect();
        components.push(Box::from(component));
        validate(&components)?;
        Ok(Self {
            components: components.into(),
        })
    }

    pub fn components(&self) -> impl ExactSizeIterator<Item = &str> {
        self.components.iter().map(|c| &**c)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn starts_with(&self, prefix: &NamePrefix) -> bool {
        prefix.components.len() <= self.components.len()
            && prefix
                .components
                .iter()
                .zip(self.components.iter())
                .all(|(p, c)| p == c)
    }
}

fn validate(components: &[Box<str>]) -> Result<(), NameError> {
    if components.is_empty() {
        return Err(NameError::Empty);
    }
    for (position, component) in components.iter().enumerate() {
        if component.is_empty() {
            return Err(NameError::EmptyComponent {
                text: String::new(),
                position,
            });
        }
        if component.contains(SEPARATOR) {
            return Err(NameError::SeparatorInComponent(component.to_string()));
        }
    }
    Ok(())
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.components, f)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({self})")
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// A name prefix announced by one or more anchors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NamePrefix {
    components: Arc<[Box<str>]>,
}

impl NamePrefix {
    pub fn parse(text: &str) -> Result<Self, NameError> {
        parse_components(text).map(|components| Self { components })
    }

    pub fn components(&self) -> impl ExactSizeIterator<Item = &str> {
        self.components.iter().map(|c| &**c)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matches(&self, name: &Name) -> bool {
        name.starts_with(self)
    }
}

impl From<&Name> for NamePrefix {
    fn from(name: &Name) -> Self {
        Self {
            components: name.components.clone(),
        }
    }
}

impl fmt::Display for NamePrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.components, f)
    }
}

impl fmt::Debug for NamePrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NamePrefix({self})")
    }
}

impl FromStr for NamePrefix {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone)]
struct TrieNode<V> {
    value: Option<(NamePrefix, V)>,
    children: FxHashMap<Box<str>, TrieNode<V>>,
}

impl<V> Default for TrieNode<V> {
    fn default() -> Self {
        Self {
            value: None,
            children: FxHashMap::default(),
        }
    }
}

/// Map from name prefixes to values with one trie edge per name component.
#[derive(Debug, Clone)]
pub struct PrefixTrie<V> {
    root: TrieNode<V>,
    len: usize,
}

impl<V> Default for PrefixTrie<V> {
    fn default() -> Self {
        Self {
            root: TrieNode::default(),
            len: 0,
        }
    }
}

impl<V> PrefixTrie<V> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `value` for `prefix`, returning the previous value if the
    /// prefix was already present.
    pub fn insert(&mut self, prefix: NamePrefix, value: V) -> Option<V> {
        let mut node = &mut self.root;
        for component in prefix.components.iter() {
            node = node.children.entry(component.clone()).or_default();
        }
        let previous = node.value.replace((prefix, value)).map(|(_, v)| v);
        if previous.is_none() {
            self.len += 1;
        }
        previous
    }

    pub fn get(&self, prefix: &NamePrefix) -> Option<&V> {
        let mut node = &self.root;
        for component in prefix.components.iter() {
            node = node.children.get(component)?;
        }
        node.value.as_ref().map(|(_, v)| v)
    }

    pub fn contains(&self, prefix: &NamePrefix) -> bool {
        self.get(prefix).is_some()
    }

    /// Longest stored prefix of `name`, with its value.
    pub fn longest_match(&self, name: &Name) -> Option<(&NamePrefix, &V)> {
        let mut node = &self.root;
        let mut best = None;
        for component in name.components.iter() {
            match node.children.get(component) {
                Some(child) => {
                    node = child;
                    if let Some((p, v)) = &node.value {
                        best = Some((p, v));
                    }
                }
                None => break,
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All stored prefixes in unspecified order.
    pub fn prefixes(&self) -> Vec<&NamePrefix> {
        let mut out = Vec::with_capacity(self.len);
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            if let Some((p, _)) = &node.value {
                out.push(p);
            }
            stack.extend(node.children.values());
        }
        out
    }
}

impl<V> FromIterator<(NamePrefix, V)> for PrefixTrie<V> {
    fn from_iter<T: IntoIterator<Item = (NamePrefix, V)>>(iter: T) -> Self {
        let mut trie = Self::new();
        for (p, v) in iter {
            trie.insert(p, v);
        }
        trie
    }
}

/// A set of name prefixes supporting longest-prefix match.
pub type PrefixSet = PrefixTrie<()>;

impl FromIterator<NamePrefix> for PrefixSet {
    fn from_iter<T: IntoIterator<Item = NamePrefix>>(iter: T) -> Self {
        iter.into_iter().map(|p| (p, ())).collect()
    }
}

pub fn longest_prefix_match<'a>(name: &Name, prefixes: &'a PrefixSet) -> Option<&'a NamePrefix> {
    prefixes.longest_match(name).map(|(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> NamePrefix {
        s.parse().unwrap()
    }

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    #[test]
    fn parses_components() {
        let name = n("/a/b/c");
        assert_eq!(name.components().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(n("/a").components().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(Name::parse("//a"), Err(NameError::EmptyComponent { position: 0, .. })));
        assert!(matches!(Name::parse(""), Err(NameError::Empty)));
        assert!(matches!(Name::parse("a/b"), Err(NameError::MissingLeadingSeparator(_))));
        assert!(matches!(Name::parse("/"), Err(NameError::EmptyComponent { .. })));
        assert!(matches!(Name::parse("/a/"), Err(NameError::EmptyComponent { position: 1, .. })));
        assert!(Name::from_components(["a/b"]).is_err());
        assert!(Name::from_components(Vec::<&str>::new()).is_err());
    }

    #[test]
    fn components_are_case_sensitive() {
        assert!(!n("/Att/video").starts_with(&p("/att")));
    }

    #[test]
    fn longer_match_wins() {
        let set: PrefixSet = [p("/att"), p("/att/video")].into_iter().collect();
        assert_eq!(longest_prefix_match(&n("/att/video/movie1/s3"), &set), Some(&p("/att/video")));
        assert_eq!(longest_prefix_match(&n("/att/audio"), &set), Some(&p("/att")));
    }

    #[test]
    fn disjoint_is_no_match() {
        let set: PrefixSet = [p("/att")].into_iter().collect();
        assert_eq!(longest_prefix_match(&n("/x/y"), &set), None);
        // component-level, not character-level
        assert_eq!(longest_prefix_match(&n("/attic"), &set), None);
    }

    #[test]
    fn whole_name_can_be_a_prefix() {
        let set: PrefixSet = [p("/a/b")].into_iter().collect();
        assert_eq!(longest_prefix_match(&n("/a/b"), &set), Some(&p("/a/b")));
    }

    #[test]
    fn insert_twice_keeps_len() {
        let mut trie = PrefixTrie::new();
        assert_eq!(trie.insert(p("/a"), 1), None);
        assert_eq!(trie.insert(p("/a"), 2), Some(1));
        assert_eq!(trie.len(), 1);
        assert_eq!(trie.get(&p("/a")), Some(&2));
        assert_eq!(trie.prefixes(), vec![&p("/a")]);
    }

    fn component() -> impl Strategy<Value = String> {
        "[a-zA-Z0-9._-]{1,6}"
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(parts in prop::collection::vec(component(), 1..8)) {
            let name = Name::from_components(&parts).unwrap();
            let back: Name = name.to_string().parse().unwrap();
            prop_assert_eq!(back, name);
        }
    }
}
