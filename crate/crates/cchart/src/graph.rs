//! Undirected weighted neighbor graphs over channel samples, with connected
//! component bookkeeping used by the geodesic stage.

/// Undirected graph with nonnegative edge weights. Node ids are dense
/// `0..node_count()`. Adjacency lists are kept sorted by neighbor id so
/// traversal order (and everything derived from it) is deterministic.
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    adjacency: Vec<Vec<(u32, f64)>>,
    component: Vec<u32>,
    component_sizes: Vec<usize>,
}

impl NeighborGraph {
    /// Build from per-node adjacency lists. Lists must be symmetric
    /// (`j in adj[i]` iff `i in adj[j]`, same weight); they get sorted here.
    pub fn from_adjacency(mut adjacency: Vec<Vec<(u32, f64)>>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        #[cfg(debug_assertions)]
        for (i, list) in adjacency.iter().enumerate() {
            for &(j, w) in list {
                debug_assert!(
                    adjacency[j as usize].iter().any(|&(k, wk)| k as usize == i && wk == w),
                    "asymmetric adjacency at ({i}, {j})"
                );
            }
        }
        let (component, component_sizes) = label_components(&adjacency);
        Self { adjacency, component, component_sizes }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[(u32, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }

    pub fn isolated_count(&self) -> usize {
        self.adjacency.iter().filter(|l| l.is_empty()).count()
    }

    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    /// Label of the component node `i` belongs to.
    pub fn component_of(&self, i: usize) -> u32 {
        self.component[i]
    }

    /// Largest component as `(label, size)`; ties break toward the smaller
    /// label (the one whose lowest-id node comes first).
    pub fn largest_component(&self) -> (u32, usize) {
        let mut best = (0u32, 0usize);
        for (label, &size) in self.component_sizes.iter().enumerate() {
            if size > best.1 {
                best = (label as u32, size);
            }
        }
        best
    }

    /// Node ids of one component, ascending.
    pub fn component_nodes(&self, label: u32) -> Vec<usize> {
        (0..self.node_count()).filter(|&i| self.component[i] == label).collect()
    }
}

fn label_components(adjacency: &[Vec<(u32, f64)>]) -> (Vec<u32>, Vec<usize>) {
    let n = adjacency.len();
    let mut label = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != u32::MAX {
            continue;
        }
        let current = sizes.len() as u32;
        let mut size = 0usize;
        stack.push(start);
        label[start] = current;
        while let Some(i) = stack.pop() {
            size += 1;
            for &(j, _) in &adjacency[i] {
                let j = j as usize;
                if label[j] == u32::MAX {
                    label[j] = current;
                    stack.push(j);
                }
            }
        }
        sizes.push(size);
    }
    (label, sizes)
}
