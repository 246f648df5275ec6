//! Multigraph queries: spanning trees, fundamental cut/cycle matrices and
//! the loop/cutset tests used by the bifurcation checker.
//!
//! All functions take the circuit's branch order as the canonical edge
//! order. Self-loops never reach this module (the netlist rejects them).

use crate::netlist::{BranchKind, Circuit};

/// Bare undirected view of a circuit: `n` nodes and oriented edges
/// `(tail, head)` in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        Graph { nodes, edges }
    }

    pub fn of(c: &Circuit) -> Self {
        Graph {
            nodes: c.node_count(),
            edges: c.branches().iter().map(|b| (b.tail, b.head)).collect(),
        }
    }

    /// Whether the edges selected by `keep` connect all nodes.
    pub fn is_connected_with(&self, keep: impl Fn(usize) -> bool) -> bool {
        let mut uf = UnionFind::new(self.nodes);
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if keep(k) {
                uf.union(a, b);
            }
        }
        uf.components == 1
    }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    pub(crate) components: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), components: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.components -= 1;
        true
    }
}

/// A spanning tree, stored as its sorted twig indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanningTree {
    twigs: Vec<usize>,
    branches: usize,
}

impl SpanningTree {
    /// Caller guarantees the twigs form a spanning tree.
    pub fn from_twigs(mut twigs: Vec<usize>, branches: usize) -> Self {
        twigs.sort_unstable();
        SpanningTree { twigs, branches }
    }

    pub fn twigs(&self) -> &[usize] {
        &self.twigs
    }

    pub fn chords(&self) -> Vec<usize> {
        (0..self.branches).filter(|j| !self.contains(*j)).collect()
    }

    pub fn contains(&self, branch: usize) -> bool {
        self.twigs.binary_search(&branch).is_ok()
    }

    pub fn branch_count(&self) -> usize {
        self.branches
    }

    /// Twigs first, then chords, each ascending.
    pub fn twig_first_order(&self) -> Vec<usize> {
        let mut order = self.twigs.clone();
        order.extend(self.chords());
        order
    }

    /// Checks acyclicity and spanning on `g`.
    pub fn is_spanning_tree_of(&self, g: &Graph) -> bool {
        if self.twigs.len() + 1 != g.nodes {
            return false;
        }
        let mut uf = UnionFind::new(g.nodes);
        self.twigs.iter().all(|&t| {
            let (a, b) = g.edges[t];
            uf.union(a, b)
        }) && uf.components == 1
    }
}

/// Every spanning tree exactly once, in lexicographic order of the sorted
/// twig sets.
pub fn spanning_trees(c: &Circuit) -> Vec<SpanningTree> {
    enumerate_spanning_trees(&Graph::of(c))
}

/// Deletion/contraction over edges in index order. An edge is contracted
/// (taken as a twig) whenever it joins two components; it is deleted only if
/// the remaining edges can still span. Trying contraction first yields
/// lexicographic order.
pub fn enumerate_spanning_trees(g: &Graph) -> Vec<SpanningTree> {
    let mut out = Vec::new();
    if g.nodes == 0 || !g.is_connected_with(|_| true) {
        return out;
    }
    let mut chosen = Vec::with_capacity(g.nodes.saturating_sub(1));
    recurse(g, 0, UnionFind::new(g.nodes), &mut chosen, &mut out);
    out
}

fn recurse(
    g: &Graph,
    k: usize,
    uf: UnionFind,
    chosen: &mut Vec<usize>,
    out: &mut Vec<SpanningTree>,
) {
    if uf.components == 1 {
        out.push(SpanningTree { twigs: chosen.clone(), branches: g.edges.len() });
        return;
    }
    if k == g.edges.len() {
        return;
    }
    let (a, b) = g.edges[k];
    let mut with = uf.clone();
    if with.union(a, b) {
        chosen.push(k);
        recurse(g, k + 1, with, chosen, out);
        chosen.pop();
    }
    // deleting k is feasible only if the later edges can still connect
    let mut rest = uf.clone();
    for &(x, y) in &g.edges[k + 1..] {
        rest.union(x, y);
    }
    if rest.components == 1 {
        recurse(g, k + 1, uf, chosen, out);
    }
}

/// Trees containing every branch in `must` and none in `never`.
pub fn trees_with<'a>(
    trees: &'a [SpanningTree],
    must: impl Fn(usize) -> bool + 'a,
    never: impl Fn(usize) -> bool + 'a,
) -> impl Iterator<Item = &'a SpanningTree> + 'a {
    trees.iter().filter(move |t| {
        (0..t.branches).all(|j| {
            let twig = t.contains(j);
            !(must(j) && !twig) && !(never(j) && twig)
        })
    })
}

/// Fundamental cut matrix `A` (rows: twigs ascending) and cycle matrix `B`
/// (rows: chords ascending), columns in canonical branch order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutCycleMatrices {
    pub tree: SpanningTree,
    pub cut: Vec<Vec<i64>>,
    pub cycle: Vec<Vec<i64>>,
}

impl CutCycleMatrices {
    /// `K` in `A = (I K)`: cut rows restricted to chord columns.
    pub fn k_block(&self) -> Vec<Vec<i64>> {
        let chords = self.tree.chords();
        self.cut.iter().map(|row| chords.iter().map(|&c| row[c]).collect()).collect()
    }

    /// `A` and `B` with columns permuted twigs-first; these take the form
    /// `(I K)` and `(-Kᵀ I)`.
    pub fn twig_first(&self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let order = self.tree.twig_first_order();
        let permute = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            m.iter().map(|row| order.iter().map(|&j| row[j]).collect()).collect()
        };
        (permute(&self.cut), permute(&self.cycle))
    }

    /// Exact integer product `A·Bᵀ`.
    pub fn cut_times_cycle_transpose(&self) -> Vec<Vec<i64>> {
        self.cut
            .iter()
            .map(|a| {
                self.cycle
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                    .collect()
            })
            .collect()
    }
}

/// Lexicographically first spanning tree, used as the reference tree.
pub fn reference_tree(c: &Circuit) -> SpanningTree {
    reference_tree_of(&Graph::of(c))
}

pub fn reference_tree_of(g: &Graph) -> SpanningTree {
    // greedy in index order yields the lexicographically smallest tree
    let mut uf = UnionFind::new(g.nodes);
    let twigs = (0..g.edges.len()).filter(|&k| uf.union(g.edges[k].0, g.edges[k].1)).collect();
    SpanningTree::from_twigs(twigs, g.edges.len())
}

pub fn fundamental_matrices(c: &Circuit, t: &SpanningTree) -> CutCycleMatrices {
    fundamental_matrices_of(&Graph::of(c), t)
}

pub fn fundamental_matrices_of(g: &Graph, t: &SpanningTree) -> CutCycleMatrices {
    let rooted = RootedTree::new(g, t);
    let m = g.edges.len();

    let cut = t
        .twigs()
        .iter()
        .map(|&tw| {
            let (tail, head) = g.edges[tw];
            // the deeper endpoint roots the subtree cut off by this twig
            let child = if rooted.parent_edge[head] == Some(tw) { head } else { tail };
            let head_side_is_subtree = child == head;
            (0..m)
                .map(|j| {
                    let (a, b) = g.edges[j];
                    let (a_in, b_in) = (rooted.in_subtree(a, child), rooted.in_subtree(b, child));
                    if a_in == b_in {
                        0
                    } else if b_in == head_side_is_subtree {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect();

    let cycle = t
        .chords()
        .iter()
        .map(|&ch| {
            let mut row = vec![0i64; m];
            row[ch] = 1;
            let (tail, head) = g.edges[ch];
            // the loop closes through the tree from the chord's head back to its tail
            for (edge, forward) in rooted.path(head, tail) {
                row[edge] = if forward { 1 } else { -1 };
            }
            row
        })
        .collect();

    CutCycleMatrices { tree: t.clone(), cut, cycle }
}

struct RootedTree<'a> {
    g: &'a Graph,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    depth: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl<'a> RootedTree<'a> {
    fn new(g: &'a Graph, t: &SpanningTree) -> Self {
        let n = g.nodes;
        let mut adj = vec![Vec::new(); n];
        for &tw in t.twigs() {
            let (a, b) = g.edges[tw];
            adj[a].push((b, tw));
            adj[b].push((a, tw));
        }
        let mut rt = RootedTree {
            g,
            parent: vec![None; n],
            parent_edge: vec![None; n],
            depth: vec![0; n],
            tin: vec![0; n],
            tout: vec![0; n],
        };
        // iterative DFS from node 0 with entry/exit times
        let mut clock = 0;
        let mut visited = vec![false; n];
        let mut stack = vec![(0usize, 0usize)];
        visited[0] = true;
        rt.tin[0] = clock;
        clock += 1;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let (w, e) = adj[u][*next];
                *next += 1;
                if !visited[w] {
                    visited[w] = true;
                    rt.parent[w] = Some(u);
                    rt.parent_edge[w] = Some(e);
                    rt.depth[w] = rt.depth[u] + 1;
                    rt.tin[w] = clock;
                    clock += 1;
                    stack.push((w, 0));
                }
            } else {
                rt.tout[u] = clock;
                stack.pop();
            }
        }
        rt
    }

    fn in_subtree(&self, x: usize, root: usize) -> bool {
        self.tin[root] <= self.tin[x] && self.tin[x] < self.tout[root]
    }

    /// Tree edges walked from `from` to `to`, with whether each is traversed
    /// along its orientation.
    fn path(&self, from: usize, to: usize) -> Vec<(usize, bool)> {
        let (mut a, mut b) = (from, to);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                let e = self.parent_edge[a].expect("non-root");
                // walking a -> parent(a)
                up.push((e, self.g.edges[e].0 == a));
                a = self.parent[a].expect("non-root");
            } else {
                let e = self.parent_edge[b].expect("non-root");
                // walked later as parent(b) -> b
                down.push((e, self.g.edges[e].1 == b));
                b = self.parent[b].expect("non-root");
            }
        }
        up.extend(down.into_iter().rev());
        up
    }
}

/// Branches of one kind forming a loop, if any.
pub fn homogeneous_loop(c: &Circuit, kind: BranchKind) -> Option<Vec<usize>> {
    let g = Graph::of(c);
    let mut uf = UnionFind::new(g.nodes);
    let mut forest: Vec<usize> = Vec::new();
    for (k, b) in c.branches().iter().enumerate() {
        if b.kind != kind {
            continue;
        }
        if uf.union(b.tail, b.head) {
            forest.push(k);
            continue;
        }
        // close the loop through the forest built so far
        let path = forest_path(&g, &forest, b.head, b.tail).expect("endpoints already joined");
        let mut cycle: Vec<usize> = path;
        cycle.push(k);
        cycle.sort_unstable();
        return Some(cycle);
    }
    None
}

/// Shortest path over the given edges (BFS).
fn forest_path(g: &Graph, forest: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.nodes];
    for &e in forest {
        let (a, b) = g.edges[e];
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.nodes];
    let mut seen = vec![false; g.nodes];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut path = Vec::new();
            let mut x = to;
            while let Some((p, e)) = prev[x] {
                path.push(e);
                x = p;
            }
            return Some(path);
        }
        for &(w, e) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((u, e));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Branches of one kind whose removal disconnects the circuit, if any:
/// those crossing from the component of the first node (after deleting
/// every branch of that kind) to the rest.
pub fn homogeneous_cutset(c: &Circuit, kind: BranchKind) -> Option<Vec<usize>> {
    let g = Graph::of(c);
    let mut uf = UnionFind::new(g.nodes);
    for b in c.branches() {
        if b.kind != kind {
            uf.union(b.tail, b.head);
        }
    }
    if uf.components == 1 {
        return None;
    }
    let root = uf.find(0);
    let cut = c
        .branches()
        .iter()
        .enumerate()
        .filter(|(_, b)| (uf.find(b.tail) == root) != (uf.find(b.head) == root))
        .map(|(k, _)| k)
        .collect();
    Some(cut)
}

pub fn has_homogeneous_loop(c: &Circuit, kind: BranchKind) -> bool {
    homogeneous_loop(c, kind).is_some()
}

pub fn has_homogeneous_cutset(c: &Circuit, kind: BranchKind) -> bool {
    homogeneous_cutset(c, kind).is_some()
}

/// Whether `branch` is a cut edge once every `deleted_kind` branch (other
/// than `branch` itself) is removed; equivalently, whether `branch` forms a
/// cutset together with branches of `deleted_kind` only.
pub fn is_bridge_after_deleting(c: &Circuit, branch: usize, deleted_kind: BranchKind) -> bool {
    loop_avoiding(c, branch, deleted_kind).is_none()
}

/// A loop through `branch` using no `avoid` branches, sorted by index.
pub fn loop_avoiding(c: &Circuit, branch: usize, avoid: BranchKind) -> Option<Vec<usize>> {
    let g = Graph::of(c);
    let allowed: Vec<usize> = (0..g.edges.len())
        .filter(|&k| k != branch && c.branch(k).kind != avoid)
        .collect();
    let b = c.branch(branch);
    let mut cycle = forest_path(&g, &allowed, b.head, b.tail)?;
    cycle.push(branch);
    cycle.sort_unstable();
    Some(cycle)
}
