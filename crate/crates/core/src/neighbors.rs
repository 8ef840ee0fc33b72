//! k-nearest-neighbor search under a pluggable metric.
//!
//! Reference sets below [`KnnConfig::exact_threshold`] rows are searched by
//! brute force. Larger sets use a seeded forest of generalized-hyperplane
//! partition trees (split by which of two pivots is closer), which works for
//! any metric including Hamming; candidates from every tree are re-ranked
//! exactly.

use ndarray::ArrayView2;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;

use crate::{seed, Scalar};

pub trait Distance<T>: Sync {
    type Output: Copy + PartialOrd + ToPrimitive + Send + Sync;
    fn dist(&self, a: &[T], b: &[T]) -> Self::Output;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl<S: Scalar> Distance<S> for Euclidean {
    type Output = S;
    fn dist(&self, a: &[S], b: &[S]) -> S {
        a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<S>().sqrt()
    }
}

/// Number of positions at which two token rows differ.
#[derive(Debug, Clone, Copy, Default)]
pub struct Hamming;

impl Distance<u32> for Hamming {
    type Output = u32;
    fn dist(&self, a: &[u32], b: &[u32]) -> u32 {
        a.iter().zip(b).filter(|(x, y)| x != y).count() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<D> {
    pub dist: D,
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct KnnConfig {
    /// Reference sets with fewer rows are searched exactly.
    pub exact_threshold: usize,
    pub trees: usize,
    pub leaf_size: usize,
    pub seed: u64,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            exact_threshold: 50_000,
            trees: 8,
            leaf_size: 64,
            seed: 0,
        }
    }
}

/// Keeps the `k` smallest `(dist, index)` pairs; ties keep the lower index
/// provided candidates arrive in increasing index order.
struct TopK<D> {
    k: usize,
    items: Vec<Neighbor<D>>,
}

impl<D: Copy + PartialOrd> TopK<D> {
    fn new(k: usize) -> Self {
        TopK {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn push(&mut self, dist: D, index: usize) {
        if self.items.len() == self.k {
            let worst = self.items[self.k - 1];
            if !(dist < worst.dist || (dist == worst.dist && index < worst.index)) {
                return;
            }
        }
        let pos = self
            .items
            .partition_point(|n| n.dist < dist || (n.dist == dist && n.index < index));
        self.items.insert(pos, Neighbor { dist, index });
        self.items.truncate(self.k);
    }
}

/// For each query row, its `k` nearest reference rows sorted by distance
/// (ties by lower index). With `exclude_self`, query `i` never matches
/// reference `i` (use when both views are the same set). Queries with fewer
/// than `k` eligible reference rows get shorter lists.
pub fn k_nearest<T, M>(
    reference: ArrayView2<T>,
    query: ArrayView2<T>,
    k: usize,
    exclude_self: bool,
    metric: &M,
    cfg: &KnnConfig,
) -> Vec<Vec<Neighbor<M::Output>>>
where
    T: Copy + Send + Sync,
    M: Distance<T>,
{
    assert_eq!(reference.ncols(), query.ncols(), "reference and query widths differ");
    let reference = reference.as_standard_layout();
    let query = query.as_standard_layout();
    let rref = reference.view();
    let rq = query.view();
    if k == 0 {
        return vec![Vec::new(); rq.nrows()];
    }
    if rref.nrows() < cfg.exact_threshold {
        return (0..rq.nrows())
            .into_par_iter()
            .map(|qi| {
                brute_force(
                    &rref,
                    rq.row(qi).as_slice().expect("standard layout"),
                    qi,
                    k,
                    exclude_self,
                    metric,
                )
            })
            .collect();
    }
    let forest: Vec<Node> = (0..cfg.trees.max(1))
        .map(|t| {
            let mut rng = seed::rng(seed::derive(cfg.seed, &[seed::tag("tree"), t as u64]));
            build(
                &rref,
                (0..rref.nrows()).collect(),
                metric,
                cfg.leaf_size.max(2),
                &mut rng,
            )
        })
        .collect();
    (0..rq.nrows())
        .into_par_iter()
        .map(|qi| {
            let q = rq.row(qi);
            let q = q.as_slice().expect("standard layout");
            let mut cand: Vec<usize> = Vec::new();
            for tree in &forest {
                tree.leaf_for(&rref, q, metric, &mut cand);
            }
            cand.sort_unstable();
            cand.dedup();
            let need = k + usize::from(exclude_self);
            if cand.len() < need {
                return brute_force(&rref, q, qi, k, exclude_self, metric);
            }
            let mut top = TopK::new(k);
            for i in cand {
                if exclude_self && i == qi {
                    continue;
                }
                top.push(metric.dist(rref.row(i).as_slice().expect("standard layout"), q), i);
            }
            top.items
        })
        .collect()
}

fn brute_force<T: Copy, M: Distance<T>>(
    reference: &ArrayView2<T>,
    q: &[T],
    qi: usize,
    k: usize,
    exclude_self: bool,
    metric: &M,
) -> Vec<Neighbor<M::Output>> {
    let mut top = TopK::new(k);
    for (i, r) in reference.rows().into_iter().enumerate() {
        if exclude_self && i == qi {
            continue;
        }
        top.push(metric.dist(r.as_slice().expect("standard layout"), q), i);
    }
    top.items
}

enum Node {
    Leaf(Vec<usize>),
    Split {
        left_pivot: usize,
        right_pivot: usize,
        left: Box<Node>,
        right: Box<Node>,
    },
}

fn build<T: Copy, M: Distance<T>, R: Rng>(
    data: &ArrayView2<T>,
    points: Vec<usize>,
    metric: &M,
    leaf_size: usize,
    rng: &mut R,
) -> Node {
    if points.len() <= leaf_size {
        return Node::Leaf(points);
    }
    let row = |i: usize| data.row(i).to_slice().expect("standard layout");
    let a = points[rng.random_range(0..points.len())];
    let mut b = a;
    for _ in 0..8 {
        let c = points[rng.random_range(0..points.len())];
        if metric.dist(row(a), row(c)) > metric.dist(row(a), row(a)) {
            b = c;
            break;
        }
    }
    if b == a {
        return Node::Leaf(points);
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let mut flip = false;
    for &p in &points {
        let da = metric.dist(row(p), row(a));
        let db = metric.dist(row(p), row(b));
        let go_left = if da == db {
            flip = !flip;
            flip
        } else {
            da < db
        };
        if go_left {
            left.push(p);
        } else {
            right.push(p);
        }
    }
    if left.is_empty() || right.is_empty() {
        return Node::Leaf(points);
    }
    Node::Split {
        left_pivot: a,
        right_pivot: b,
        left: Box::new(build(data, left, metric, leaf_size, rng)),
        right: Box::new(build(data, right, metric, leaf_size, rng)),
    }
}

impl Node {
    fn leaf_for<T: Copy, M: Distance<T>>(&self, data: &ArrayView2<T>, q: &[T], metric: &M, out: &mut Vec<usize>) {
        match self {
            Node::Leaf(points) => out.extend_from_slice(points),
            Node::Split {
                left_pivot,
                right_pivot,
                left,
                right,
            } => {
                let da = metric.dist(q, data.row(*left_pivot).to_slice().expect("standard layout"));
                let db = metric.dist(q, data.row(*right_pivot).to_slice().expect("standard layout"));
                if da <= db {
                    left.leaf_for(data, q, metric, out);
                }
                if db <= da {
                    right.leaf_for(data, q, metric, out);
                }
            }
        }
    }
}
