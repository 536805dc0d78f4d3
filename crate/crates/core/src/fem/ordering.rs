//! Fill-reducing orderings based on breadth-first level structures.

const LEAF: usize = 48;

struct Dissector<'a> {
    adj: &'a [Vec<usize>],
    /// Current subset label of every vertex.
    group: Vec<u32>,
    next_group: u32,
    /// BFS visit stamp.
    seen: Vec<u32>,
    stamp: u32,
    level: Vec<u32>,
    out: Vec<usize>,
}

impl Dissector<'_> {
    fn fresh_group(&mut self, vs: &[usize]) -> u32 {
        self.next_group += 1;
        for &v in vs {
            self.group[v] = self.next_group;
        }
        self.next_group
    }

    /// BFS inside group `g` from `root`; levels are left in `self.level`.
    fn bfs(&mut self, root: usize, g: u32) -> (Vec<usize>, u32) {
        self.stamp += 1;
        let stamp = self.stamp;
        let mut order = vec![root];
        self.seen[root] = stamp;
        self.level[root] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let lv = self.level[v];
            for &w in &self.adj[v] {
                if self.group[w] == g && self.seen[w] != stamp {
                    self.seen[w] = stamp;
                    self.level[w] = lv + 1;
                    order.push(w);
                }
            }
        }
        let depth = self.level[*order.last().unwrap()];
        (order, depth)
    }

    fn dissect(&mut self, vs: Vec<usize>) {
        if vs.len() <= LEAF {
            self.out.extend(vs);
            return;
        }
        let g = self.fresh_group(&vs);
        let mut components = Vec::new();
        for &v in &vs {
            if self.group[v] == g {
                let (comp, _) = self.bfs(v, g);
                self.fresh_group(&comp);
                components.push(comp);
            }
        }
        for comp in components {
            self.dissect_component(comp);
        }
    }

    fn dissect_component(&mut self, comp: Vec<usize>) {
        if comp.len() <= LEAF {
            self.out.extend(comp);
            return;
        }
        let g = self.fresh_group(&comp);
        // pseudo-peripheral root by repeated BFS from the farthest vertex
        let (mut order, mut depth) = self.bfs(comp[0], g);
        for _ in 0..4 {
            let last = *order.last().unwrap();
            let (o2, d2) = self.bfs(last, g);
            if d2 > depth {
                order = o2;
                depth = d2;
            } else {
                // restore levels of the better structure
                let first = order[0];
                let (o3, _) = self.bfs(first, g);
                order = o3;
                break;
            }
        }
        if depth < 2 {
            self.out.extend(comp);
            return;
        }
        let mut counts = vec![0usize; depth as usize + 1];
        for &v in &order {
            counts[self.level[v] as usize] += 1;
        }
        let half = comp.len() / 2;
        let mut acc = 0;
        let mut m = 0;
        for (l, c) in counts.iter().enumerate() {
            acc += c;
            if acc >= half {
                m = l;
                break;
            }
        }
        let m = m.clamp(1, depth as usize - 1) as u32;
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut sep = Vec::new();
        for &v in &order {
            match self.level[v].cmp(&m) {
                std::cmp::Ordering::Less => left.push(v),
                std::cmp::Ordering::Greater => right.push(v),
                std::cmp::Ordering::Equal => sep.push(v),
            }
        }
        self.dissect(left);
        self.dissect(right);
        self.out.extend(sep);
    }
}

/// Nested dissection ordering of a symmetric graph; returns `perm[new] = old`.
pub fn nested_dissection(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut d = Dissector {
        adj,
        group: vec![0; n],
        next_group: 0,
        seen: vec![0; n],
        stamp: 0,
        level: vec![0; n],
        out: Vec::with_capacity(n),
    };
    d.dissect((0..n).collect());
    debug_assert_eq!(d.out.len(), n);
    d.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_of_grid() {
        let k = 30;
        let id = |i: usize, j: usize| i * k + j;
        let mut adj = vec![Vec::new(); k * k];
        for i in 0..k {
            for j in 0..k {
                if i + 1 < k {
                    adj[id(i, j)].push(id(i + 1, j));
                    adj[id(i + 1, j)].push(id(i, j));
                }
                if j + 1 < k {
                    adj[id(i, j)].push(id(i, j + 1));
                    adj[id(i, j + 1)].push(id(i, j));
                }
            }
        }
        let mut p = nested_dissection(&adj);
        p.sort_unstable();
        assert_eq!(p, (0..k * k).collect::<Vec<_>>());
    }

    #[test]
    fn disconnected_graph() {
        let adj = vec![vec![]; 100];
        assert_eq!(nested_dissection(&adj).len(), 100);
    }
}
