//! Grouping of unknowns into nodes for aggregation and block smoothing.

use crate::error::{Error, Result};

/// Partition of the unknowns `0..n` into nodes. Optionally every node has
/// a field id and aggregates never mix fields.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    n: usize,
    ptr: Vec<usize>,
    unknowns: Vec<usize>,
    field: Option<Vec<usize>>,
}

impl NodeLayout {
    /// Every unknown is its own node.
    pub fn scalar(n: usize) -> Self {
        NodeLayout { n, ptr: (0..=n).collect(), unknowns: (0..n).collect(), field: None }
    }

    /// `bs` consecutive unknowns per node.
    pub fn interleaved(nodes: usize, bs: usize) -> Self {
        NodeLayout { n: nodes * bs, ptr: (0..=nodes).map(|i| i * bs).collect(), unknowns: (0..nodes * bs).collect(), field: None }
    }

    /// Every unknown is its own node, tagged with a field id.
    pub fn fields(field_of: Vec<usize>) -> Self {
        let n = field_of.len();
        NodeLayout { field: Some(field_of), ..Self::scalar(n) }
    }

    /// Arbitrary groups covering `0..n` exactly once.
    pub fn from_groups(n: usize, groups: &[Vec<usize>], field: Option<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut ptr = vec![0];
        let mut unknowns = Vec::with_capacity(n);
        for g in groups {
            for &u in g {
                if u >= n || std::mem::replace(&mut seen[u], true) {
                    return Err(Error::InvalidParameter(format!("unknown {u} repeated or out of range")));
                }
                unknowns.push(u);
            }
            ptr.push(unknowns.len());
        }
        if unknowns.len() != n {
            return Err(Error::InvalidParameter("node groups do not cover all unknowns".into()));
        }
        if let Some(f) = &field {
            if f.len() != groups.len() {
                return Err(Error::Dimension { expected: groups.len(), got: f.len() });
            }
        }
        Ok(NodeLayout { n, ptr, unknowns, field })
    }

    pub fn num_unknowns(&self) -> usize {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        self.ptr.len() - 1
    }

    #[inline]
    pub fn node(&self, i: usize) -> &[usize] {
        &self.unknowns[self.ptr[i]..self.ptr[i + 1]]
    }

    pub fn field(&self, i: usize) -> Option<usize> {
        self.field.as_ref().map(|f| f[i])
    }

    pub fn has_fields(&self) -> bool {
        self.field.is_some()
    }

    /// Node containing each unknown.
    pub fn node_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for i in 0..self.num_nodes() {
            for &u in self.node(i) {
                out[u] = i;
            }
        }
        out
    }

    pub fn max_node_size(&self) -> usize {
        (0..self.num_nodes()).map(|i| self.ptr[i + 1] - self.ptr[i]).max().unwrap_or(0)
    }
}
