//! Fill-reducing symmetric orderings on the adjacency graph of a matrix.
//!
//! All functions return `perm` with `perm[new] = old`.

use super::CsrMatrix;

/// Undirected adjacency of a square matrix pattern, diagonal excluded.
#[derive(Debug, Clone)]
pub struct Graph {
    xadj: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Symmetrized pattern of `a`.
    pub fn from_matrix(a: &CsrMatrix) -> Self {
        let n = a.nrows();
        let mut deg = vec![0usize; n + 1];
        for i in 0..n {
            for &j in a.row(i).0 {
                if i != j {
                    deg[i + 1] += 1;
                    deg[j + 1] += 1;
                }
            }
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut next = deg.clone();
        let mut adj = vec![0usize; deg[n]];
        for i in 0..n {
            for &j in a.row(i).0 {
                if i != j {
                    adj[next[i]] = j;
                    next[i] += 1;
                    adj[next[j]] = i;
                    next[j] += 1;
                }
            }
        }
        // Deduplicate each adjacency list.
        let mut xadj = Vec::with_capacity(n + 1);
        let mut out = Vec::with_capacity(adj.len() / 2);
        xadj.push(0);
        for i in 0..n {
            let list = &mut adj[deg[i]..deg[i + 1]];
            list.sort_unstable();
            let mut last = usize::MAX;
            for &j in list.iter() {
                if j != last {
                    out.push(j);
                    last = j;
                }
            }
            xadj.push(out.len());
        }
        Graph { xadj, adj: out }
    }

    pub fn len(&self) -> usize {
        self.xadj.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.xadj[v]..self.xadj[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }
}

/// Reverse Cuthill-McKee.
pub fn reverse_cuthill_mckee(g: &Graph) -> Vec<usize> {
    let n = g.len();
    let mut ws = Workspace::new(n);
    let tag = ws.fresh_tag();
    let all: Vec<usize> = (0..n).collect();
    for &v in &all {
        ws.tag[v] = tag;
    }
    let mut order = Vec::with_capacity(n);
    cuthill_mckee_subset(g, &all, tag, &mut ws, &mut order);
    order.reverse();
    order
}

/// Nested dissection by BFS level-structure separators; leaves ordered by
/// reverse Cuthill-McKee.
pub fn nested_dissection(g: &Graph) -> Vec<usize> {
    const LEAF: usize = 48;
    let n = g.len();
    let mut ws = Workspace::new(n);
    let mut order = Vec::with_capacity(n);
    let all: Vec<usize> = (0..n).collect();
    dissect(g, all, LEAF, &mut ws, &mut order);
    debug_assert_eq!(order.len(), n);
    order
}

struct Workspace {
    tag: Vec<u32>,
    next_tag: u32,
    level: Vec<usize>,
    seen: Vec<u32>,
    seen_stamp: u32,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace { tag: vec![0; n], next_tag: 1, level: vec![0; n], seen: vec![0; n], seen_stamp: 0 }
    }

    fn fresh_tag(&mut self) -> u32 {
        let t = self.next_tag;
        self.next_tag += 1;
        t
    }

    fn fresh_stamp(&mut self) -> u32 {
        self.seen_stamp += 1;
        self.seen_stamp
    }
}

/// BFS inside vertices carrying `tag`, returns the level sets.
fn bfs_levels(g: &Graph, root: usize, tag: u32, ws: &mut Workspace) -> Vec<Vec<usize>> {
    let stamp = ws.fresh_stamp();
    let mut levels = vec![vec![root]];
    ws.seen[root] = stamp;
    ws.level[root] = 0;
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in g.neighbors(v) {
                if ws.tag[w] == tag && ws.seen[w] != stamp {
                    ws.seen[w] = stamp;
                    ws.level[w] = levels.len();
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

/// George-Liu pseudo-peripheral node search inside the tagged component of
/// `start`.
fn pseudo_peripheral(g: &Graph, start: usize, tag: u32, ws: &mut Workspace) -> (usize, Vec<Vec<usize>>) {
    let mut root = start;
    let mut levels = bfs_levels(g, root, tag, ws);
    loop {
        let last = levels.last().unwrap();
        let cand = *last
            .iter()
            .min_by_key(|&&v| g.neighbors(v).iter().filter(|&&w| ws.tag[w] == tag).count())
            .unwrap();
        let cand_levels = bfs_levels(g, cand, tag, ws);
        if cand_levels.len() > levels.len() {
            root = cand;
            levels = cand_levels;
        } else {
            // Restore level numbers of the kept structure.
            let _ = bfs_levels(g, root, tag, ws);
            return (root, levels);
        }
    }
}

/// Appends a Cuthill-McKee order of the tagged vertices; the tags are
/// consumed.
fn cuthill_mckee_subset(g: &Graph, verts: &[usize], tag: u32, ws: &mut Workspace, out: &mut Vec<usize>) {
    let done = ws.fresh_tag();
    let mut by_degree: Vec<usize> = verts.to_vec();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    let mut nbrs: Vec<usize> = Vec::new();
    for &seed in &by_degree {
        if ws.tag[seed] != tag {
            continue;
        }
        let (root, _) = pseudo_peripheral(g, seed, tag, ws);
        let mut head = out.len();
        out.push(root);
        ws.tag[root] = done;
        while head < out.len() {
            let v = out[head];
            head += 1;
            nbrs.clear();
            nbrs.extend(g.neighbors(v).iter().copied().filter(|&w| ws.tag[w] == tag));
            nbrs.sort_by_key(|&w| (g.degree(w), w));
            for &w in &nbrs {
                ws.tag[w] = done;
                out.push(w);
            }
        }
    }
}

fn dissect(g: &Graph, verts: Vec<usize>, leaf: usize, ws: &mut Workspace, out: &mut Vec<usize>) {
    let tag = ws.fresh_tag();
    for &v in &verts {
        ws.tag[v] = tag;
    }
    if verts.len() <= leaf {
        let mut local = Vec::with_capacity(verts.len());
        cuthill_mckee_subset(g, &verts, tag, ws, &mut local);
        local.reverse();
        out.extend(local);
        return;
    }

    // Split into connected components first.
    let stamp = ws.fresh_stamp();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &s in &verts {
        if ws.seen[s] == stamp {
            continue;
        }
        let mut comp = vec![s];
        ws.seen[s] = stamp;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &w in g.neighbors(v) {
                if ws.tag[w] == tag && ws.seen[w] != stamp {
                    ws.seen[w] = stamp;
                    comp.push(w);
                }
            }
        }
        comps.push(comp);
    }
    if comps.len() > 1 {
        for comp in comps {
            dissect(g, comp, leaf, ws, out);
        }
        return;
    }

    let (_, levels) = pseudo_peripheral(g, verts[0], tag, ws);
    if levels.len() < 3 {
        let mut local = Vec::with_capacity(verts.len());
        cuthill_mckee_subset(g, &verts, tag, ws, &mut local);
        local.reverse();
        out.extend(local);
        return;
    }
    // Smallest level among those splitting the count roughly in half.
    let total = verts.len();
    let mut best = None;
    let mut below = 0usize;
    for (s, lev) in levels.iter().enumerate() {
        let above = total - below - lev.len();
        if s > 0 && s + 1 < levels.len() {
            let balanced = below * 10 >= total * 3 && above * 10 >= total * 3;
            let score = (lev.len(), below.abs_diff(above));
            if balanced && best.map_or(true, |(_, sc)| score < sc) {
                best = Some((s, score));
            }
        }
        below += lev.len();
    }
    let s = best.map(|(s, _)| s).unwrap_or_else(|| {
        // Fall back to the median level.
        let mut acc = 0;
        let mut mid = 1;
        for (k, lev) in levels.iter().enumerate() {
            acc += lev.len();
            if acc * 2 >= total {
                mid = k.clamp(1, levels.len() - 2);
                break;
            }
        }
        mid
    });

    let mut part_a: Vec<usize> = levels[..s].iter().flatten().copied().collect();
    let part_b: Vec<usize> = levels[s + 1..].iter().flatten().copied().collect();
    let mut sep = Vec::with_capacity(levels[s].len());
    for &v in &levels[s] {
        // Separator vertices not touching the far side move to the near side.
        let touches_b = g.neighbors(v).iter().any(|&w| ws.tag[w] == tag && ws.level[w] == s + 1);
        if touches_b {
            sep.push(v);
        } else {
            part_a.push(v);
        }
    }
    dissect(g, part_a, leaf, ws, out);
    dissect(g, part_b, leaf, ws, out);
    out.extend(sep);
}

/// Inverse of a permutation.
pub fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::TripletBuilder;

    fn grid_laplacian(n: usize) -> CsrMatrix {
        let id = |i: usize, j: usize| j * n + i;
        let mut t = TripletBuilder::new(n * n, n * n);
        for j in 0..n {
            for i in 0..n {
                t.push(id(i, j), id(i, j), 4.0);
                if i + 1 < n {
                    t.push(id(i, j), id(i + 1, j), -1.0);
                    t.push(id(i + 1, j), id(i, j), -1.0);
                }
                if j + 1 < n {
                    t.push(id(i, j), id(i, j + 1), -1.0);
                    t.push(id(i, j + 1), id(i, j), -1.0);
                }
            }
        }
        t.build()
    }

    fn is_permutation(p: &[usize]) -> bool {
        let mut seen = vec![false; p.len()];
        p.iter().all(|&v| v < p.len() && !std::mem::replace(&mut seen[v], true))
    }

    #[test]
    fn orderings_are_permutations() {
        let a = grid_laplacian(23);
        let g = Graph::from_matrix(&a);
        assert!(is_permutation(&reverse_cuthill_mckee(&g)));
        assert!(is_permutation(&nested_dissection(&g)));
        let inv = invert(&[2, 0, 1]);
        assert_eq!(inv, vec![1, 2, 0]);
    }

    #[test]
    fn disconnected_graphs() {
        let a = CsrMatrix::identity(100);
        let g = Graph::from_matrix(&a);
        assert!(is_permutation(&nested_dissection(&g)));
        assert!(is_permutation(&reverse_cuthill_mckee(&g)));
    }

    #[test]
    fn rcm_bandwidth_on_grid() {
        let n = 20;
        let a = grid_laplacian(n);
        let g = Graph::from_matrix(&a);
        let p = reverse_cuthill_mckee(&g);
        let inv = invert(&p);
        let bw = (0..a.nrows())
            .flat_map(|i| a.row(i).0.iter().map(move |&j| (i, j)))
            .map(|(i, j)| inv[i].abs_diff(inv[j]))
            .max()
            .unwrap();
        assert!(bw <= n + 1, "bandwidth {bw}");
    }
}
