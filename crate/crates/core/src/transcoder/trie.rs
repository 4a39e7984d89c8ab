/// Byte trie answering "longest key that is a prefix of this slice".
///
/// Children are kept in sorted edge lists; morpheme tables are sparse enough
/// that a binary search per byte beats 256-way node arrays on memory.
#[derive(Debug, Clone, Default)]
pub struct PrefixTrie {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Default)]
struct Node {
    edges: Vec<(u8, u32)>,
    value: Option<u32>,
}

impl PrefixTrie {
    pub fn new() -> Self {
        PrefixTrie { nodes: vec![Node::default()] }
    }

    /// Inserts `key`, returning the previous value if the key was present.
    pub fn insert(&mut self, key: &[u8], value: u32) -> Option<u32> {
        let mut node = 0usize;
        for &b in key {
            node = match self.nodes[node].edges.binary_search_by_key(&b, |e| e.0) {
                Ok(i) => self.nodes[node].edges[i].1 as usize,
                Err(i) => {
                    let child = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    self.nodes[node].edges.insert(i, (b, child));
                    child as usize
                }
            };
        }
        self.nodes[node].value.replace(value)
    }

    fn child(&self, node: usize, b: u8) -> Option<usize> {
        let edges = &self.nodes[node].edges;
        edges.binary_search_by_key(&b, |e| e.0).ok().map(|i| edges[i].1 as usize)
    }

    /// Longest key that prefixes `haystack`, as `(key length, value)`.
    pub fn longest_prefix(&self, haystack: &[u8]) -> Option<(usize, u32)> {
        let mut node = 0usize;
        let mut best = None;
        for (i, &b) in haystack.iter().enumerate() {
            match self.child(node, b) {
                Some(next) => node = next,
                None => break,
            }
            if let Some(v) = self.nodes[node].value {
                best = Some((i + 1, v));
            }
        }
        best
    }

    pub fn get(&self, key: &[u8]) -> Option<u32> {
        let mut node = 0usize;
        for &b in key {
            node = self.child(node, b)?;
        }
        self.nodes[node].value
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}
