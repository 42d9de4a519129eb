//! Deterministic Dinic max-flow on small networks.
//!
//! Adjacency lists keep insertion order and both BFS and DFS scan them
//! in order, so for a fixed construction sequence the resulting flow
//! (and hence every factor and certificate downstream) is reproducible.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    orig: i64,
    rev: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeId {
    from: usize,
    idx: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNet {
    adj: Vec<Vec<Edge>>,
}

impl FlowNet {
    pub fn new(nodes: usize) -> Self {
        FlowNet {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64) -> EdgeId {
        assert!(from != to, "loops are not supported");
        assert!(cap >= 0);
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Edge {
            to,
            cap,
            orig: cap,
            rev: rev_from,
        });
        self.adj[to].push(Edge {
            to: from,
            cap: 0,
            orig: 0,
            rev: rev_to,
        });
        EdgeId {
            from,
            idx: rev_to,
        }
    }

    /// Flow currently routed through `id`.
    pub fn flow(&self, id: EdgeId) -> i64 {
        let e = &self.adj[id.from][id.idx];
        e.orig - e.cap
    }

    /// Removes an edge's remaining capacity in both directions, freezing
    /// whatever flow it carries.
    pub fn disable_edge(&mut self, id: EdgeId) {
        let (to, rev) = {
            let e = &self.adj[id.from][id.idx];
            (e.to, e.rev)
        };
        self.adj[id.from][id.idx].cap = 0;
        self.adj[to][rev].cap = 0;
    }

    fn bfs(&self, source: usize, sink: usize, level: &mut [i32]) -> bool {
        level.fill(-1);
        level[source] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for e in &self.adj[u] {
                if e.cap > 0 && level[e.to] < 0 {
                    level[e.to] = level[u] + 1;
                    queue.push_back(e.to);
                }
            }
        }
        level[sink] >= 0
    }

    fn dfs(
        &mut self,
        u: usize,
        sink: usize,
        pushed: i64,
        level: &[i32],
        iter: &mut [usize],
    ) -> i64 {
        if u == sink {
            return pushed;
        }
        while iter[u] < self.adj[u].len() {
            let i = iter[u];
            let (to, cap) = {
                let e = &self.adj[u][i];
                (e.to, e.cap)
            };
            if cap > 0 && level[to] == level[u] + 1 {
                let d = self.dfs(to, sink, pushed.min(cap), level, iter);
                if d > 0 {
                    let rev = self.adj[u][i].rev;
                    self.adj[u][i].cap -= d;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        assert_ne!(source, sink);
        let n = self.adj.len();
        let mut total = 0;
        let mut level = vec![-1; n];
        while self.bfs(source, sink, &mut level) {
            let mut iter = vec![0usize; n];
            loop {
                let pushed = self.dfs(source, sink, i64::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Vertices reachable from `source` in the residual network; the
    /// canonical source side of a minimum cut after `max_flow`.
    pub fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[source] = true;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for e in &self.adj[u] {
                if e.cap > 0 && !seen[e.to] {
                    seen[e.to] = true;
                    queue.push_back(e.to);
                }
            }
        }
        seen
    }
}
