//! Left-right planarity test (Brandes' formulation of the
//! de Fraysseix-Rosenstiehl criterion).
//!
//! Boolean test only: the PMFG construction probes candidate edge sets and
//! needs no embedding. Linear time per call; the caller re-runs the full
//! test per candidate edge, which is affordable at the targeted sizes.

type EdgeId = usize;

const NONE_H: usize = usize::MAX;

#[derive(Clone, Copy, Default, PartialEq)]
struct Interval {
    low: Option<EdgeId>,
    high: Option<EdgeId>,
}

impl Interval {
    fn empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Default)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn right_of(interval: Interval) -> Self {
        ConflictPair {
            left: Interval::default(),
            right: interval,
        }
    }

    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }

    fn lowest(&self, lowpt: &[usize]) -> usize {
        match (self.left.low, self.right.low) {
            (None, Some(r)) => lowpt[r],
            (Some(l), None) => lowpt[l],
            (Some(l), Some(r)) => lowpt[l].min(lowpt[r]),
            (None, None) => NONE_H,
        }
    }
}

struct Lr {
    n: usize,
    /// Undirected edges; an edge id doubles as the oriented edge id once
    /// the orientation DFS fixes its direction.
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, EdgeId)>>,
    oriented_from: Vec<Option<usize>>,
    height: Vec<usize>,
    parent_edge: Vec<Option<EdgeId>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    ordered_adj: Vec<Vec<EdgeId>>,
    stack: Vec<ConflictPair>,
    stack_bottom: Vec<usize>,
    lowpt_edge: Vec<Option<EdgeId>>,
    eref: Vec<Option<EdgeId>>,
    side: Vec<i8>,
}

impl Lr {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        let edges: Vec<(usize, usize)> = edges.to_vec();
        for (id, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        let m = edges.len();
        Lr {
            n,
            edges,
            adj,
            oriented_from: vec![None; m],
            height: vec![NONE_H; n],
            parent_edge: vec![None; n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            ordered_adj: vec![Vec::new(); n],
            stack: Vec::new(),
            stack_bottom: vec![0; m],
            lowpt_edge: vec![None; m],
            eref: vec![None; m],
            side: vec![1; m],
        }
    }

    fn head(&self, e: EdgeId) -> usize {
        let (a, b) = self.edges[e];
        if self.oriented_from[e] == Some(a) {
            b
        } else {
            a
        }
    }

    /// DFS orientation phase: assign heights, orient edges, compute
    /// lowpoints and nesting depths. Iterative with per-vertex cursors so
    /// deep trees cannot overflow the call stack.
    fn orient_from(&mut self, root: usize) {
        let mut dfs_stack = vec![root];
        let mut cursor = vec![0usize; self.n];
        let mut resume = vec![false; self.edges.len()];
        while let Some(v) = dfs_stack.pop() {
            let e = self.parent_edge[v];
            while cursor[v] < self.adj[v].len() {
                let (w, eid) = self.adj[v][cursor[v]];
                if resume[eid] {
                    resume[eid] = false;
                } else {
                    if self.oriented_from[eid].is_some() {
                        cursor[v] += 1;
                        continue;
                    }
                    self.oriented_from[eid] = Some(v);
                    self.lowpt[eid] = self.height[v];
                    self.lowpt2[eid] = self.height[v];
                    if self.height[w] == NONE_H {
                        // tree edge: descend, resume this edge afterwards
                        self.parent_edge[w] = Some(eid);
                        self.height[w] = self.height[v] + 1;
                        dfs_stack.push(v);
                        dfs_stack.push(w);
                        resume[eid] = true;
                        break;
                    }
                    // back edge
                    self.lowpt[eid] = self.height[w];
                }
                self.nesting_depth[eid] = 2 * self.lowpt[eid];
                if self.lowpt2[eid] < self.height[v] {
                    // chordal: nest inward
                    self.nesting_depth[eid] += 1;
                }
                if let Some(pe) = e {
                    if self.lowpt[eid] < self.lowpt[pe] {
                        self.lowpt2[pe] = self.lowpt[pe].min(self.lowpt2[eid]);
                        self.lowpt[pe] = self.lowpt[eid];
                    } else if self.lowpt[eid] > self.lowpt[pe] {
                        self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt[eid]);
                    } else {
                        self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt2[eid]);
                    }
                }
                cursor[v] += 1;
            }
        }
    }

    /// Testing phase: process vertices in DFS order over nesting-sorted
    /// adjacency lists, maintaining the stack of conflict pairs.
    fn test_from(&mut self, root: usize) -> bool {
        let mut dfs_stack = vec![root];
        let mut cursor = vec![0usize; self.n];
        let mut resume = vec![false; self.edges.len()];
        while let Some(v) = dfs_stack.pop() {
            let e = self.parent_edge[v];
            let mut descended = false;
            while cursor[v] < self.ordered_adj[v].len() {
                let eid = self.ordered_adj[v][cursor[v]];
                let w = self.head(eid);
                if resume[eid] {
                    resume[eid] = false;
                } else {
                    self.stack_bottom[eid] = self.stack.len();
                    if Some(eid) == self.parent_edge[w] {
                        // tree edge: descend, resume this edge afterwards
                        dfs_stack.push(v);
                        dfs_stack.push(w);
                        resume[eid] = true;
                        descended = true;
                        break;
                    }
                    // back edge
                    self.lowpt_edge[eid] = Some(eid);
                    self.stack.push(ConflictPair::right_of(Interval {
                        low: Some(eid),
                        high: Some(eid),
                    }));
                }
                if self.lowpt[eid] < self.height[v] {
                    // eid has a return edge strictly below v
                    let pe = e.expect("return edge implies v is not a root");
                    if eid == self.ordered_adj[v][0] {
                        self.lowpt_edge[pe] = self.lowpt_edge[eid];
                    } else if !self.add_constraints(eid, pe) {
                        return false;
                    }
                }
                cursor[v] += 1;
            }
            if !descended {
                if let Some(pe) = e {
                    self.remove_back_edges(pe);
                }
            }
        }
        true
    }

    fn conflicting(&self, i: &Interval, b: EdgeId) -> bool {
        !i.empty() && self.lowpt[i.high.expect("non-empty interval")] > self.lowpt[b]
    }

    fn add_constraints(&mut self, ei: EdgeId, e: EdgeId) -> bool {
        let mut p = ConflictPair::default();
        // Merge return edges of ei into p.right.
        loop {
            let mut q = self.stack.pop().expect("stack above recorded bottom");
            if !q.left.empty() {
                q.swap();
            }
            if !q.left.empty() {
                return false;
            }
            let q_low = q.right.low.expect("non-empty right interval");
            if self.lowpt[q_low] > self.lowpt[e] {
                if p.right.empty() {
                    p.right.high = q.right.high;
                } else {
                    self.eref[p.right.low.expect("non-empty")] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                // align with the parent's lowpoint edge
                self.eref[q_low] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // Merge conflicting return edges of earlier siblings into p.left.
        while let Some(&top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("just observed");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(pr_low) = p.right.low {
                self.eref[pr_low] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.empty() {
                p.left.high = q.left.high;
            } else {
                self.eref[p.left.low.expect("non-empty")] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.empty() && p.right.empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: EdgeId) {
        let u = self.oriented_from[e].expect("oriented tree edge");
        // Drop whole conflict pairs returning exactly to u.
        while let Some(top) = self.stack.last() {
            if top.lowest(&self.lowpt) != self.height[u] {
                break;
            }
            let p = self.stack.pop().expect("non-empty");
            if let Some(l) = p.left.low {
                self.side[l] = -1;
            }
        }
        // Trim the next pair's intervals of edges ending at u.
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.head(h) == u {
                    p.left.high = self.eref[h];
                } else {
                    break;
                }
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.eref[l] = p.right.low;
                    self.side[l] = -1;
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if self.head(h) == u {
                    p.right.high = self.eref[h];
                } else {
                    break;
                }
            }
            if p.right.high.is_none() {
                if let Some(l) = p.right.low {
                    self.eref[l] = p.left.low;
                    self.side[l] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        // The side of e follows its highest remaining return edge.
        if self.lowpt[e] < self.height[u] {
            if let Some(top) = self.stack.last() {
                let hl = top.left.high;
                let hr = top.right.high;
                self.eref[e] = match (hl, hr) {
                    (Some(l), Some(r)) => {
                        if self.lowpt[l] > self.lowpt[r] {
                            Some(l)
                        } else {
                            Some(r)
                        }
                    }
                    (Some(l), None) => Some(l),
                    (None, r) => r,
                };
            }
        }
    }
}

/// Whether the undirected simple graph on `n` vertices is planar.
pub fn is_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    debug_assert!(edges.iter().all(|&(a, b)| a < n && b < n && a != b));
    if n > 2 && edges.len() > 3 * n - 6 {
        return false;
    }
    if edges.len() < 9 {
        // fewer edges than any Kuratowski subgraph
        return true;
    }
    let mut lr = Lr::new(n, edges);
    let mut roots = Vec::new();
    for v in 0..n {
        if lr.height[v] == NONE_H {
            lr.height[v] = 0;
            roots.push(v);
            lr.orient_from(v);
        }
    }
    for eid in 0..lr.edges.len() {
        if let Some(v) = lr.oriented_from[eid] {
            lr.ordered_adj[v].push(eid);
        }
    }
    for v in 0..n {
        lr.ordered_adj[v].sort_by_key(|&eid| lr.nesting_depth[eid]);
    }
    for &r in &roots {
        if !lr.test_from(r) {
            return false;
        }
    }
    true
}
