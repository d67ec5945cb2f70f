//! A kd-tree answering exact closed-ball range queries.

use crate::simplex::dist;

const LEAF_SIZE: usize = 16;

#[derive(Clone, Debug)]
struct Node {
    lo: Vec<f64>,
    hi: Vec<f64>,
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

/// Static kd-tree over a flat coordinate array.
#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    /// Builds the tree over `count` points stored row-wise in `coords`.
    pub fn build(dim: usize, coords: Vec<f64>) -> Self {
        let count = coords.len().checked_div(dim).unwrap_or(0);
        let mut tree = Self { dim, coords, order: (0..count).collect(), nodes: Vec::new() };
        if count > 0 {
            tree.build_node(0, count);
        }
        tree
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for &i in &self.order[start..end] {
            for (k, &c) in self.point(i).iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node { lo, hi, start, end, children: None });
        if end - start > LEAF_SIZE {
            let node = &self.nodes[id];
            let axis = (0..self.dim)
                .max_by(|&a, &b| (node.hi[a] - node.lo[a]).total_cmp(&(node.hi[b] - node.lo[b])))
                .unwrap_or(0);
            if node.hi[axis] > node.lo[axis] {
                let mid = start + (end - start) / 2;
                let (dim, coords) = (self.dim, &self.coords);
                self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                    coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
                });
                let left = self.build_node(start, mid);
                let right = self.build_node(mid, end);
                self.nodes[id].children = Some((left, right));
            }
        }
        id
    }

    fn box_dist(&self, node: &Node, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dim {
            let d = if x[k] < node.lo[k] {
                node.lo[k] - x[k]
            } else if x[k] > node.hi[k] {
                x[k] - node.hi[k]
            } else {
                0.0
            };
            s += d * d;
        }
        s.sqrt()
    }

    /// Indices of all points `p` with `|p - center| <= radius`, ascending.
    pub fn ball(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        // Box distances are a lower bound up to rounding; the slack only
        // costs extra exact checks.
        let prune = radius * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if self.box_dist(node, center) > prune {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    for &i in &self.order[node.start..node.end] {
                        if dist(self.point(i), center) <= radius {
                            out.push(i);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Distance from `center` to the nearest point at positive distance.
    pub fn nearest_nonzero(&self, center: &[f64]) -> Option<f64> {
        let mut best = f64::INFINITY;
        if self.nodes.is_empty() {
            return None;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if self.box_dist(node, center) > best {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    let (dl, dr) = (self.box_dist(&self.nodes[l], center), self.box_dist(&self.nodes[r], center));
                    if dl <= dr {
                        stack.push(r);
                        stack.push(l);
                    } else {
                        stack.push(l);
                        stack.push(r);
                    }
                }
                None => {
                    for &i in &self.order[node.start..node.end] {
                        let d = dist(self.point(i), center);
                        if d > 0.0 && d < best {
                            best = d;
                        }
                    }
                }
            }
        }
        best.is_finite().then_some(best)
    }
}
