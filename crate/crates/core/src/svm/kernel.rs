use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Problems up to this many points get a fully materialized Gram matrix;
/// larger ones compute rows on demand behind an LRU cache.
pub const FULL_GRAM_LIMIT: usize = 4000;

const ROW_CACHE_BYTES: usize = 256 << 20;

/// `exp(-gamma * ||x - y||^2)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if !(gamma > 0.0) {
        return Err(Error::contract("gamma must be > 0"));
    }
    Ok(rbf(x, y, gamma))
}

#[inline]
pub(crate) fn rbf(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    // Four partial sums in a fixed order so the loop vectorizes.
    let mut acc = [0.0; 4];
    let (cx, cy) = (x.chunks_exact(4), y.chunks_exact(4));
    let tail: f64 = cx.remainder().iter().zip(cy.remainder()).map(|(a, b)| (a - b) * (a - b)).sum();
    for (a, b) in cx.zip(cy) {
        for j in 0..4 {
            let t = a[j] - b[j];
            acc[j] += t * t;
        }
    }
    let d2 = (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail;
    (-gamma * d2).exp()
}

/// Kernel values over a fixed point set.
pub(crate) enum Gram<'a> {
    Full { n: usize, values: Vec<f64> },
    OnDemand { points: &'a [&'a [f64]], gamma: f64 },
}

impl<'a> Gram<'a> {
    pub fn new(points: &'a [&'a [f64]], gamma: f64) -> Gram<'a> {
        let n = points.len();
        if n > FULL_GRAM_LIMIT {
            return Gram::OnDemand { points, gamma };
        }
        let mut values = vec![0.0; n * n];
        values
            .par_chunks_mut(n.max(1))
            .enumerate()
            .for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = if i == j { 1.0 } else { rbf(points[i], points[j], gamma) };
                }
            });
        Gram::Full { n, values }
    }

    /// Fill `out[t] = K(rows[i], rows[t])` for the local index set `rows`.
    fn fill(&self, i: usize, rows: &[usize], out: &mut [f64]) {
        match self {
            Gram::Full { n, values } => {
                let base = rows[i] * n;
                for (slot, &t) in out.iter_mut().zip(rows) {
                    *slot = values[base + t];
                }
            }
            Gram::OnDemand { points, gamma } => {
                let xi = points[rows[i]];
                for (slot, &t) in out.iter_mut().zip(rows) {
                    *slot = rbf(xi, points[t], *gamma);
                }
            }
        }
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        match self {
            Gram::Full { n, values } => values[a * n + b],
            Gram::OnDemand { points, gamma } => rbf(points[a], points[b], *gamma),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, Gram::Full { .. })
    }
}

/// Row access for one solver run over a subset of the Gram points.
pub(crate) struct RowSource<'g, 'a> {
    gram: &'g Gram<'a>,
    rows: &'g [usize],
    cache: Option<LruRows>,
}

impl<'g, 'a> RowSource<'g, 'a> {
    pub fn new(gram: &'g Gram<'a>, rows: &'g [usize]) -> Self {
        let cache = (!gram.is_full()).then(|| {
            let per_row = rows.len().max(1) * std::mem::size_of::<f64>();
            LruRows::new((ROW_CACHE_BYTES / per_row).max(2))
        });
        RowSource { gram, rows, cache }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn row_into(&mut self, i: usize, out: &mut [f64]) {
        match &mut self.cache {
            None => self.gram.fill(i, self.rows, out),
            Some(cache) => {
                if let Some(row) = cache.get(i) {
                    out.copy_from_slice(row);
                } else {
                    self.gram.fill(i, self.rows, out);
                    cache.insert(i, out.to_vec());
                }
            }
        }
    }
}

struct LruRows {
    capacity: usize,
    rows: HashMap<usize, Vec<f64>>,
    order: VecDeque<usize>,
}

impl LruRows {
    fn new(capacity: usize) -> Self {
        LruRows {
            capacity,
            rows: HashMap::new(),
            order: VecDeque::new(),
        }
    }

    fn get(&mut self, key: usize) -> Option<&[f64]> {
        if self.rows.contains_key(&key) {
            if let Some(pos) = self.order.iter().position(|&k| k == key) {
                self.order.remove(pos);
            }
            self.order.push_back(key);
        }
        self.rows.get(&key).map(Vec::as_slice)
    }

    fn insert(&mut self, key: usize, row: Vec<f64>) {
        if self.rows.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.order.push_back(key);
        self.rows.insert(key, row);
    }
}
