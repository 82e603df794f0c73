//! Directional filter bank on the periodic grid.
//!
//! Each tree node holds the samples of a coset `c + B Z^2` of the band. A
//! node is split into two quincunx cosets of the lattice `B' Q Z^2`, where
//! `Q = [[1, -1], [1, 1]]` and `B' = B M` with a per-node shear `M`. The
//! split is a predict/update lifting pair with fan-shaped taps, so every
//! split is invertible whatever the taps. Shears at depths 2 and 3 steer
//! the fan responses into `2^l` wedges.

use crate::error::{Error, Result};
use crate::image::Image;

use super::filters::{FanFilter, FilterSpec};

pub const MAX_DEPTH: usize = 4;

type Mat = [[i64; 2]; 2];

const IDENT: Mat = [[1, 0], [0, 1]];

const fn sh(s: i64) -> Mat {
    [[1, s], [0, 1]]
}

const fn sv(s: i64) -> Mat {
    [[1, 0], [s, 1]]
}

const DEPTH2: [Mat; 4] = [sh(1), sh(-1), sv(2), sv(-2)];
const DEPTH3: [Mat; 8] = [sh(1), sh(-1), sv(1), sv(-1), sh(1), sv(-1), sv(1), sh(-1)];

/// Leaf permutation putting subbands in order of increasing passband
/// orientation, measured from the row-frequency axis.
const LEAF_ORDER: [&[usize]; MAX_DEPTH + 1] = [
    &[0],
    &[1, 0],
    &[0, 2, 3, 1],
    &[1, 0, 5, 4, 6, 7, 2, 3],
    &[2, 3, 1, 0, 10, 11, 9, 8, 13, 12, 14, 15, 5, 4, 6, 7],
];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Shear applied before the split at `depth` of the node whose path (MSB
/// first) is `path`.
fn shear(depth: usize, path: usize) -> Mat {
    match depth {
        0 | 1 => IDENT,
        2 => DEPTH2[path],
        _ => DEPTH3[path],
    }
}

#[derive(Debug, Clone)]
struct Split {
    even_src: Vec<u32>,
    odd_src: Vec<u32>,
    /// `pred[o * T + t]`: even-child index of `x_o + B' t`.
    pred: Vec<u32>,
    /// `upd[e * T + t]`: odd-child index of `x_e - B' t`.
    upd: Vec<u32>,
}

struct Node {
    basis: Mat,
    offset: (i64, i64),
    points: Vec<usize>,
}

/// Precomputed index tables of a DFB of fixed size and depth.
#[derive(Debug, Clone)]
pub struct DfbPlan {
    width: usize,
    height: usize,
    depth: usize,
    weights: Vec<f64>,
    levels: Vec<Vec<Split>>,
    /// `(width, height)` of each output subband, in output order.
    shapes: Vec<(usize, usize)>,
}

impl DfbPlan {
    pub fn new(width: usize, height: usize, depth: usize, fan: FanFilter) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::invalid(
                "dirs",
                format!("at most {} directions per level, got 2^{depth}", 1 << MAX_DEPTH),
            ));
        }
        let m = 1usize << depth;
        if !width.is_multiple_of(m) || !height.is_multiple_of(m) || width == 0 || height == 0 {
            return Err(Error::UnsupportedSize(format!(
                "{} directions need band sides divisible by {m}, band is {width}x{height}",
                m
            )));
        }
        let taps = fan.lifting_taps();
        let weights = taps.iter().map(|t| t.1).collect();
        let offsets: Vec<(i64, i64)> = taps.iter().map(|t| t.0).collect();
        let (h, w) = (height as i64, width as i64);
        let wrap = |r: i64, c: i64| (r.rem_euclid(h) * w + c.rem_euclid(w)) as usize;

        let mut nodes = vec![Node {
            basis: IDENT,
            offset: (0, 0),
            points: (0..width * height).collect(),
        }];
        let mut levels = Vec::with_capacity(depth);
        let mut slot_even = vec![u32::MAX; width * height];
        let mut slot_odd = vec![u32::MAX; width * height];
        let mut parent_slot = vec![u32::MAX; width * height];
        for d in 0..depth {
            let mut splits = Vec::with_capacity(nodes.len());
            let mut next = Vec::with_capacity(2 * nodes.len());
            for (path, node) in nodes.iter().enumerate() {
                let b = mat_mul(&node.basis, &shear(d, path));
                let child = mat_mul(&b, &[[1, -1], [1, 1]]);
                let apply = |m: &Mat, t: (i64, i64)| (m[0][0] * t.0 + m[0][1] * t.1, m[1][0] * t.0 + m[1][1] * t.1);
                let odd_offset = (node.offset.0 + b[0][0], node.offset.1 + b[1][0]);

                // even coset: flood fill from the node offset with the child generators
                let mut in_even = vec![false; width * height];
                let start = wrap(node.offset.0, node.offset.1);
                in_even[start] = true;
                let mut stack = vec![(node.offset.0.rem_euclid(h), node.offset.1.rem_euclid(w))];
                let gens = [
                    (child[0][0], child[1][0]),
                    (child[0][1], child[1][1]),
                    (-child[0][0], -child[1][0]),
                    (-child[0][1], -child[1][1]),
                ];
                while let Some((r, c)) = stack.pop() {
                    for g in gens {
                        let (nr, nc) = ((r + g.0).rem_euclid(h), (c + g.1).rem_euclid(w));
                        let k = (nr * w + nc) as usize;
                        if !in_even[k] {
                            in_even[k] = true;
                            stack.push((nr, nc));
                        }
                    }
                }
                for (k, &p) in node.points.iter().enumerate() {
                    parent_slot[p] = k as u32;
                }
                let (even, odd): (Vec<usize>, Vec<usize>) = node.points.iter().partition(|&&p| in_even[p]);
                if even.len() != odd.len() || even.len() * 2 != node.points.len() {
                    return Err(Error::UnsupportedSize(format!(
                        "band {width}x{height} does not split evenly at direction depth {}",
                        d + 1
                    )));
                }
                for (k, &p) in even.iter().enumerate() {
                    slot_even[p] = k as u32;
                }
                for (k, &p) in odd.iter().enumerate() {
                    slot_odd[p] = k as u32;
                }
                let t_len = offsets.len();
                let mut pred = Vec::with_capacity(odd.len() * t_len);
                for &p in &odd {
                    let (r, c) = ((p / width) as i64, (p % width) as i64);
                    for &t in &offsets {
                        let dv = apply(&b, t);
                        pred.push(slot_even[wrap(r + dv.0, c + dv.1)]);
                    }
                }
                let mut upd = Vec::with_capacity(even.len() * t_len);
                for &p in &even {
                    let (r, c) = ((p / width) as i64, (p % width) as i64);
                    for &t in &offsets {
                        let dv = apply(&b, t);
                        upd.push(slot_odd[wrap(r - dv.0, c - dv.1)]);
                    }
                }
                if pred.iter().chain(&upd).any(|&s| s == u32::MAX) {
                    return Err(Error::UnsupportedSize(format!(
                        "band {width}x{height} is incompatible with the direction lattice"
                    )));
                }
                splits.push(Split {
                    even_src: even.iter().map(|&p| parent_slot[p]).collect(),
                    odd_src: odd.iter().map(|&p| parent_slot[p]).collect(),
                    pred,
                    upd,
                });
                for &p in even.iter().chain(&odd) {
                    slot_even[p] = u32::MAX;
                    slot_odd[p] = u32::MAX;
                }
                next.push(Node {
                    basis: child,
                    offset: node.offset,
                    points: even,
                });
                next.push(Node {
                    basis: child,
                    offset: odd_offset,
                    points: odd,
                });
            }
            levels.push(splits);
            nodes = next;
        }

        let mut leaf_shapes = Vec::with_capacity(nodes.len());
        for node in &nodes {
            let mut rows = 0;
            let mut last_row = usize::MAX;
            for &p in &node.points {
                if p / width != last_row {
                    rows += 1;
                    last_row = p / width;
                }
            }
            let per_row = node.points.len() / rows;
            if per_row * rows != node.points.len() {
                return Err(Error::UnsupportedSize("irregular subband layout".into()));
            }
            leaf_shapes.push((per_row, rows));
        }
        let shapes = LEAF_ORDER[depth].iter().map(|&k| leaf_shapes[k]).collect();
        Ok(Self {
            width,
            height,
            depth,
            weights,
            levels,
            shapes,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn subband_count(&self) -> usize {
        1 << self.depth
    }

    pub fn subband_shapes(&self) -> &[(usize, usize)] {
        &self.shapes
    }

    pub fn forward(&self, band: &Image) -> Result<Vec<Image>> {
        if (band.width(), band.height()) != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                left_w: band.width(),
                left_h: band.height(),
                right_w: self.width,
                right_h: self.height,
            });
        }
        let t_len = self.weights.len();
        let mut nodes = vec![band.data().to_vec()];
        for splits in &self.levels {
            let mut next = Vec::with_capacity(2 * nodes.len());
            for (vals, s) in nodes.iter().zip(splits) {
                let even: Vec<f64> = s.even_src.iter().map(|&k| vals[k as usize]).collect();
                let mut hi: Vec<f64> = s.odd_src.iter().map(|&k| vals[k as usize]).collect();
                for (o, x) in hi.iter_mut().enumerate() {
                    let idx = &s.pred[o * t_len..(o + 1) * t_len];
                    let p: f64 = idx.iter().zip(&self.weights).map(|(&k, w)| w * even[k as usize]).sum();
                    *x -= p;
                }
                let mut lo = even;
                for (e, x) in lo.iter_mut().enumerate() {
                    let idx = &s.upd[e * t_len..(e + 1) * t_len];
                    let u: f64 = idx.iter().zip(&self.weights).map(|(&k, w)| w * hi[k as usize]).sum();
                    *x += 0.5 * u;
                }
                next.push(lo);
                next.push(hi);
            }
            nodes = next;
        }
        Ok(LEAF_ORDER[self.depth]
            .iter()
            .zip(&self.shapes)
            .map(|(&k, &(w, h))| Image::new(w, h, std::mem::take(&mut nodes[k])).unwrap())
            .collect())
    }

    pub fn inverse(&self, subbands: &[Image]) -> Result<Image> {
        if subbands.len() != self.subband_count() {
            return Err(Error::invalid(
                "subbands",
                format!("expected {}, got {}", self.subband_count(), subbands.len()),
            ));
        }
        let mut nodes = vec![Vec::new(); self.subband_count()];
        for ((&k, &(w, h)), sb) in LEAF_ORDER[self.depth].iter().zip(&self.shapes).zip(subbands) {
            if (sb.width(), sb.height()) != (w, h) {
                return Err(Error::DimensionMismatch {
                    left_w: sb.width(),
                    left_h: sb.height(),
                    right_w: w,
                    right_h: h,
                });
            }
            nodes[k] = sb.data().to_vec();
        }
        let t_len = self.weights.len();
        for splits in self.levels.iter().rev() {
            let mut parents = Vec::with_capacity(splits.len());
            for (s, pair) in splits.iter().zip(nodes.chunks(2)) {
                let (lo, hi) = (&pair[0], &pair[1]);
                let mut even = lo.clone();
                for (e, x) in even.iter_mut().enumerate() {
                    let idx = &s.upd[e * t_len..(e + 1) * t_len];
                    let u: f64 = idx.iter().zip(&self.weights).map(|(&k, w)| w * hi[k as usize]).sum();
                    *x -= 0.5 * u;
                }
                let mut vals = vec![0.0; 2 * even.len()];
                for (o, &hv) in hi.iter().enumerate() {
                    let idx = &s.pred[o * t_len..(o + 1) * t_len];
                    let p: f64 = idx.iter().zip(&self.weights).map(|(&k, w)| w * even[k as usize]).sum();
                    vals[s.odd_src[o] as usize] = hv + p;
                }
                for (e, &ev) in even.iter().enumerate() {
                    vals[s.even_src[e] as usize] = ev;
                }
                parents.push(vals);
            }
            nodes = parents;
        }
        Image::new(self.width, self.height, nodes.pop().unwrap())
    }
}

/// Directional subbands of one band, ordered by passband orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalBands {
    pub depth: usize,
    pub fan: FanFilter,
    pub width: usize,
    pub height: usize,
    pub subbands: Vec<Image>,
}

pub fn dfb_decompose(band: &Image, depth: usize, spec: &FilterSpec) -> Result<DirectionalBands> {
    let plan = DfbPlan::new(band.width(), band.height(), depth, spec.fan)?;
    Ok(DirectionalBands {
        depth,
        fan: spec.fan,
        width: band.width(),
        height: band.height(),
        subbands: plan.forward(band)?,
    })
}

pub fn dfb_reconstruct(bands: &DirectionalBands) -> Result<Image> {
    DfbPlan::new(bands.width, bands.height, bands.depth, bands.fan)?.inverse(&bands.subbands)
}
