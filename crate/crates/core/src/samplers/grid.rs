//! Expected-linear-time sampler for max-norm distances on the torus.
//!
//! Vertices are split into weight layers `[2^i w_min, 2^{i+1} w_min)`. Each
//! layer keeps its points in Morton order so that every cell of the
//! hierarchical grid (side `2^-l` at level `l`) is a contiguous range. For a
//! pair of layers a target level is chosen whose cell side is about the
//! distance where connection becomes unlikely. Starting at the root, touching
//! cell pairs are refined down to that level and then enumerated pair by
//! pair; cell pairs that stop touching are handled at once by geometric jumps
//! under an upper bound on their connection probability followed by a
//! rejection step, which keeps the output distribution exact.
//!
//! The sampler works on any coordinate block of the positions and accepts any
//! non-decreasing volume function of the block distance. This is what the
//! outer-min and minimum-component samplers plug into.

use rand::Rng;

use super::{check_weights_and_positions, draw_positions, edge_probability, EmbeddedGraph, GirgParams};
use crate::error::{Error, Result};
use crate::geometry::{coordinate_distance, Point, Topology};
use crate::graph::Graph;
use crate::weights::WeightSequence;

/// Largest block dimension handled by the cell grid.
pub const MAX_GRID_DIM: usize = 8;

/// Fast sampler for max-norm torus GIRGs, `1 <= d <= 7`.
pub fn sample_tgirg_fast<R: Rng + ?Sized>(
    params: &GirgParams,
    weights: &WeightSequence,
    positions: Option<Vec<Point>>,
    rng: &mut R,
) -> Result<EmbeddedGraph> {
    params.validate()?;
    if params.topology != Topology::Torus {
        return Err(Error::param("fast sampler requires the torus topology"));
    }
    if !params.spec.is_max_norm() {
        return Err(Error::param("fast sampler requires a max-norm distance"));
    }
    if params.d > 7 {
        return Err(Error::param(format!("fast sampler supports d <= 7, got {}", params.d)));
    }
    check_weights_and_positions(params.d, weights, positions.as_deref())?;
    let n = weights.len();
    let positions = positions.unwrap_or_else(|| draw_positions(n, params.d, rng));
    let coords: Vec<usize> = (0..params.d).collect();
    let spec = &params.spec;
    let volume = |r: f64| spec.volume(r);
    let sampler = BlockSampler {
        positions: &positions,
        coords: &coords,
        weights,
        c: params.c,
        alpha: params.alpha,
        volume: &volume,
    };
    let mut edges = Vec::new();
    sampler.sample(rng, |u, v| edges.push((u, v)));
    Ok(EmbeddedGraph {
        graph: Graph::from_edges(n, edges)?,
        positions,
        weights: weights.clone(),
    })
}

/// One max-norm torus GIRG over the coordinates `coords` of `positions`.
/// `volume` maps the block distance to the volume used in the connection rule.
pub(crate) struct BlockSampler<'a> {
    pub positions: &'a [Point],
    pub coords: &'a [usize],
    pub weights: &'a WeightSequence,
    pub c: f64,
    pub alpha: f64,
    pub volume: &'a dyn Fn(f64) -> f64,
}

#[derive(Debug, Clone)]
struct Cell {
    coords: [u32; MAX_GRID_DIM],
    start: usize,
    end: usize,
    children: (usize, usize),
}

struct Layer {
    /// Vertex ids sorted by Morton code.
    points: Vec<usize>,
    max_weight: f64,
    /// `levels[l]` holds the non-empty cells of level `l` in Morton order.
    levels: Vec<Vec<Cell>>,
}

impl<'a> BlockSampler<'a> {
    fn block_distance(&self, u: usize, v: usize) -> f64 {
        let (xu, xv) = (self.positions[u].coords(), self.positions[v].coords());
        self.coords
            .iter()
            .map(|&i| coordinate_distance(xu[i], xv[i], Topology::Torus))
            .fold(0.0, f64::max)
    }

    fn probability(&self, u: usize, v: usize) -> f64 {
        let ratio = self.weights.get(u) * self.weights.get(v) / self.weights.total();
        edge_probability(self.c, self.alpha, ratio, (self.volume)(self.block_distance(u, v)))
    }

    /// Calls `emit(u, v)` once for every sampled edge.
    pub fn sample<R: Rng + ?Sized, F: FnMut(usize, usize)>(&self, rng: &mut R, mut emit: F) {
        let k = self.coords.len();
        assert!((1..=MAX_GRID_DIM).contains(&k), "block dimension {k} unsupported");
        let n = self.weights.len();
        let max_level = (((n.max(2) as f64).log2() / k as f64).ceil() as usize + 1).min(60 / k);
        let layers = self.build_layers(max_level);
        let root_threshold = self.c.powf(1.0 / self.alpha) / self.weights.total();

        for i in 0..layers.len() {
            for j in i..layers.len() {
                let (li, lj) = (&layers[i], &layers[j]);
                if li.points.is_empty() || lj.points.is_empty() {
                    continue;
                }
                let threshold = root_threshold * li.max_weight * lj.max_weight;
                let mut target = 0;
                while target < max_level && (self.volume)(side(target + 1)) >= threshold {
                    target += 1;
                }
                self.sample_layer_pair(li, lj, i == j, target, rng, &mut emit);
            }
        }
    }

    fn build_layers(&self, max_level: usize) -> Vec<Layer> {
        let w_min = self.weights.min();
        let k = self.coords.len();
        let cells_per_dim = 1u64 << max_level;
        let layer_of = |w: f64| ((w / w_min).log2().floor().max(0.0)) as usize;
        let count = layer_of(self.weights.max()) + 1;
        let mut members: Vec<Vec<(u64, usize)>> = vec![Vec::new(); count];
        for v in 0..self.weights.len() {
            let x = self.positions[v].coords();
            let mut cell = [0u32; MAX_GRID_DIM];
            for (slot, &i) in cell.iter_mut().zip(self.coords) {
                let t = ((x[i] + 0.5) * cells_per_dim as f64).floor() as i64;
                *slot = t.clamp(0, cells_per_dim as i64 - 1) as u32;
            }
            members[layer_of(self.weights.get(v))].push((morton(&cell[..k], max_level), v));
        }
        members
            .into_iter()
            .map(|mut list| {
                list.sort_unstable();
                let max_weight = list.iter().map(|&(_, v)| self.weights.get(v)).fold(0.0, f64::max);
                let levels = build_levels(&list, k, max_level);
                Layer {
                    points: list.into_iter().map(|(_, v)| v).collect(),
                    max_weight,
                    levels,
                }
            })
            .collect()
    }

    fn sample_layer_pair<R: Rng + ?Sized, F: FnMut(usize, usize)>(
        &self,
        li: &Layer,
        lj: &Layer,
        same: bool,
        target: usize,
        rng: &mut R,
        emit: &mut F,
    ) {
        let k = self.coords.len();
        let bound_ratio = li.max_weight * lj.max_weight / self.weights.total();
        let mut stack = vec![(0usize, 0usize, 0usize)];
        while let Some((a, b, level)) = stack.pop() {
            let (ca, cb) = (&li.levels[level][a], &lj.levels[level][b]);
            if level == target {
                self.enumerate_pairs(li, lj, ca, cb, same && a == b, rng, emit);
                continue;
            }
            let next = level + 1;
            for ia in ca.children.0..ca.children.1 {
                let lo = if same && a == b { ia } else { cb.children.0 };
                for ib in lo..cb.children.1 {
                    let (x, y) = (&li.levels[next][ia], &lj.levels[next][ib]);
                    match cell_gap(&x.coords[..k], &y.coords[..k], next) {
                        None => stack.push((ia, ib, next)),
                        Some(gap) => {
                            let bound = edge_probability(self.c, self.alpha, bound_ratio, (self.volume)(gap));
                            self.jump_pairs(li, lj, x, y, bound, rng, emit);
                        }
                    }
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_pairs<R: Rng + ?Sized, F: FnMut(usize, usize)>(
        &self,
        li: &Layer,
        lj: &Layer,
        ca: &Cell,
        cb: &Cell,
        diagonal: bool,
        rng: &mut R,
        emit: &mut F,
    ) {
        let left = &li.points[ca.start..ca.end];
        let right = &lj.points[cb.start..cb.end];
        for (x, &u) in left.iter().enumerate() {
            let rest = if diagonal { &right[x + 1..] } else { right };
            for &v in rest {
                if rng.gen::<f64>() < self.probability(u, v) {
                    emit(u, v);
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn jump_pairs<R: Rng + ?Sized, F: FnMut(usize, usize)>(
        &self,
        li: &Layer,
        lj: &Layer,
        ca: &Cell,
        cb: &Cell,
        bound: f64,
        rng: &mut R,
        emit: &mut F,
    ) {
        if bound <= 0.0 {
            return;
        }
        let left = &li.points[ca.start..ca.end];
        let right = &lj.points[cb.start..cb.end];
        let total = (left.len() * right.len()) as u64;
        let log_miss = (-bound).ln_1p();
        let mut skip = || -> u64 {
            if bound >= 1.0 {
                return 0;
            }
            let u = 1.0 - rng.gen::<f64>();
            let s = (u.ln() / log_miss).floor();
            if s >= total as f64 {
                total
            } else {
                s as u64
            }
        };
        let mut idx = skip();
        let mut accepted = Vec::new();
        while idx < total {
            let u = left[(idx / right.len() as u64) as usize];
            let v = right[(idx % right.len() as u64) as usize];
            accepted.push((u, v));
            idx = idx.saturating_add(1).saturating_add(skip());
        }
        for (u, v) in accepted {
            if rng.gen::<f64>() * bound < self.probability(u, v) {
                emit(u, v);
            }
        }
    }
}

fn side(level: usize) -> f64 {
    (-(level as f64)).exp2()
}

/// Minimum torus max-norm distance between two cells at `level`, or `None`
/// when the cells touch (including identical cells).
fn cell_gap(a: &[u32], b: &[u32], level: usize) -> Option<f64> {
    let cells = 1i64 << level;
    let mut gap = 0i64;
    for (&x, &y) in a.iter().zip(b) {
        let diff = (x as i64 - y as i64).abs();
        let circ = diff.min(cells - diff);
        gap = gap.max(circ - 1);
    }
    (gap > 0).then(|| gap as f64 * side(level))
}

fn morton(cell: &[u32], levels: usize) -> u64 {
    let mut code = 0u64;
    for bit in (0..levels).rev() {
        for &c in cell {
            code = (code << 1) | ((c as u64 >> bit) & 1);
        }
    }
    code
}

/// Cell hierarchy from `(morton code, vertex)` pairs sorted by code.
fn build_levels(sorted: &[(u64, usize)], k: usize, max_level: usize) -> Vec<Vec<Cell>> {
    let mut levels: Vec<Vec<Cell>> = vec![Vec::new(); max_level + 1];
    if sorted.is_empty() {
        return levels;
    }
    let decode = |code: u64| {
        let mut coords = [0u32; MAX_GRID_DIM];
        for bit in 0..max_level {
            for (d, slot) in coords[..k].iter_mut().enumerate() {
                let pos = bit * k + (k - 1 - d);
                *slot |= (((code >> pos) & 1) as u32) << bit;
            }
        }
        coords
    };
    let mut finest = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let code = sorted[start].0;
        let end = start + sorted[start..].partition_point(|&(c, _)| c == code);
        finest.push((
            code,
            Cell {
                coords: decode(code),
                start,
                end,
                children: (0, 0),
            },
        ));
        start = end;
    }
    let mut current = finest;
    for level in (0..max_level).rev() {
        let mut parents: Vec<(u64, Cell)> = Vec::new();
        for (idx, (code, cell)) in current.iter().enumerate() {
            let parent_code = code >> k;
            match parents.last_mut() {
                Some((pc, parent)) if *pc == parent_code => {
                    parent.end = cell.end;
                    parent.children.1 = idx + 1;
                }
                _ => {
                    let mut coords = cell.coords;
                    for c in coords[..k].iter_mut() {
                        *c >>= 1;
                    }
                    parents.push((
                        parent_code,
                        Cell {
                            coords,
                            start: cell.start,
                            end: cell.end,
                            children: (idx, idx + 1),
                        },
                    ));
                }
            }
        }
        levels[level + 1] = current.into_iter().map(|(_, c)| c).collect();
        current = parents;
    }
    levels[0] = current.into_iter().map(|(_, c)| c).collect();
    levels
}
