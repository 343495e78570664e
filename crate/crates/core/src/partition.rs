//! Periodic binary-tree partition of the unit circle.
//!
//! Level `l` splits `[0, 2pi)` into `2^l` half-open arcs. Only levels
//! `2..=l_max` are stored: with periodic adjacency every box on levels 0 and 1
//! neighbours every other box, so nothing is ever computed there.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::error::{FfiaError, Result};

/// Number of quadrants at level 2.
pub const QUADRANTS: usize = 4;

/// Shallowest stored level.
pub const TOP_LEVEL: usize = 2;

/// Reduces an angular difference into `(-pi, pi]`.
pub fn wrap_angle(d: f64) -> f64 {
    if d > -PI && d <= PI {
        return d;
    }
    let r = d.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// The representative of `a - b (mod 2pi)` in `(-pi, pi]`.
pub fn wrap_displacement(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// Reduces an angle into `[0, 2pi)`.
pub fn reduce_angle(x: f64) -> f64 {
    if (0.0..TAU).contains(&x) {
        return x;
    }
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Box offsets of the M2L interaction list, for left (even) and right (odd)
/// children. Translation invariance of the periodic tree makes these the
/// same on every level.
const INTERACTION_OFFSETS: [[isize; 3]; 2] = [[-2, 2, 3], [-3, -2, 2]];

/// Point indices bucketed by box on one level, in CSR layout.
#[derive(Debug, Clone)]
struct Buckets {
    offsets: Vec<usize>,
    indices: Vec<usize>,
}

impl Buckets {
    /// `order` lists point indices by position; boxes are monotone in
    /// position, so it is already grouped by box on every level.
    fn build(finest_boxes: &[usize], order: &[usize], shift: usize, boxes: usize) -> Self {
        let mut offsets = vec![0usize; boxes + 1];
        for &b in finest_boxes {
            offsets[(b >> shift) + 1] += 1;
        }
        for i in 0..boxes {
            offsets[i + 1] += offsets[i];
        }
        Self {
            offsets,
            indices: order.to_vec(),
        }
    }

    fn get(&self, b: usize) -> &[usize] {
        &self.indices[self.offsets[b]..self.offsets[b + 1]]
    }
}

#[derive(Debug, Clone)]
struct Level {
    sources: Buckets,
    targets: Buckets,
}

/// Hierarchical partition of sources and targets on the circle.
#[derive(Debug, Clone)]
pub struct CircleTree {
    l_max: usize,
    sources: Vec<f64>,
    targets: Vec<f64>,
    levels: Vec<Level>,
}

impl CircleTree {
    /// Buckets every point with `floor(x 2^l / 2pi)`. Points must already be
    /// reduced into `[0, 2pi)`.
    pub fn build(sources: &[f64], targets: &[f64], l_max: usize) -> Result<Self> {
        if !(TOP_LEVEL..=30).contains(&l_max) {
            return Err(FfiaError::InvalidArgument(format!(
                "tree depth {l_max} outside 2..=30"
            )));
        }
        check_points("source", sources)?;
        check_points("target", targets)?;
        let finest = |points: &[f64]| -> Vec<usize> {
            points.iter().map(|&x| finest_box(x, l_max)).collect()
        };
        let by_position = |points: &[f64]| -> Vec<usize> {
            let mut order: Vec<usize> = (0..points.len()).collect();
            order.sort_unstable_by(|&i, &j| points[i].total_cmp(&points[j]).then(i.cmp(&j)));
            order
        };
        let source_boxes = finest(sources);
        let target_boxes = finest(targets);
        let source_order = by_position(sources);
        let target_order = by_position(targets);
        let levels = (TOP_LEVEL..=l_max)
            .map(|l| {
                let shift = l_max - l;
                Level {
                    sources: Buckets::build(&source_boxes, &source_order, shift, 1 << l),
                    targets: Buckets::build(&target_boxes, &target_order, shift, 1 << l),
                }
            })
            .collect();
        Ok(Self {
            l_max,
            sources: sources.to_vec(),
            targets: targets.to_vec(),
            levels,
        })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn source_positions(&self) -> &[f64] {
        &self.sources
    }

    pub fn target_positions(&self) -> &[f64] {
        &self.targets
    }

    pub fn box_count(level: usize) -> usize {
        1 << level
    }

    /// Center of box `b` on `level`: `2pi (b + 1/2) / 2^level`.
    pub fn center(level: usize, b: usize) -> f64 {
        TAU * (b as f64 + 0.5) / (1u64 << level) as f64
    }

    /// `pi / 2^level`.
    pub fn half_width(level: usize) -> f64 {
        PI / (1u64 << level) as f64
    }

    pub fn parent(b: usize) -> usize {
        b / 2
    }

    /// Box containing `x` on `level`, consistent with the parent relation.
    pub fn box_of(&self, level: usize, x: f64) -> usize {
        finest_box(x, self.l_max) >> (self.l_max - level)
    }

    /// Sorted source indices of box `b` on `level`.
    pub fn sources_in(&self, level: usize, b: usize) -> &[usize] {
        self.levels[level - TOP_LEVEL].sources.get(b)
    }

    /// Sorted target indices of box `b` on `level`.
    pub fn targets_in(&self, level: usize, b: usize) -> &[usize] {
        self.levels[level - TOP_LEVEL].targets.get(b)
    }

    /// Periodic neighbours `((b - 1) mod 2^l, (b + 1) mod 2^l)`.
    pub fn neighbors(&self, level: usize, b: usize) -> Result<(usize, usize)> {
        self.check_box(level, b)?;
        Ok(periodic_neighbors(level, b))
    }

    /// Boxes whose multipoles are translated into the local expansion of `b`:
    /// children of the parent's neighbours that are not adjacent to `b`.
    /// Empty on level 2, where the opposite quadrant is never expanded.
    pub fn interaction_list(&self, level: usize, b: usize) -> Result<Vec<usize>> {
        self.check_box(level, b)?;
        if level == TOP_LEVEL {
            return Ok(Vec::new());
        }
        Ok(interaction_boxes(level, b).to_vec())
    }

    fn check_box(&self, level: usize, b: usize) -> Result<()> {
        if !(TOP_LEVEL..=self.l_max).contains(&level) || b >= 1 << level {
            return Err(FfiaError::InvalidArgument(format!(
                "box {b} on level {level} outside tree of depth {}",
                self.l_max
            )));
        }
        Ok(())
    }

    /// Level-2 neighbourhoods of every quadrant.
    pub fn level2_assignment(&self) -> Level2Assignment {
        let quadrants = std::array::from_fn(|n| {
            let members = |q: usize| self.sources_in(TOP_LEVEL, q % QUADRANTS);
            let omega1 = [n + QUADRANTS - 1, n, n + 1]
                .into_iter()
                .flat_map(|q| members(q).iter().copied())
                .collect();
            Quadrant {
                center: quadrant_center(n),
                sources: members(n).to_vec(),
                targets: self.targets_in(TOP_LEVEL, n).to_vec(),
                omega1,
                omega2: members(n + 2).to_vec(),
            }
        });
        Level2Assignment { quadrants }
    }
}

pub(crate) fn periodic_neighbors(level: usize, b: usize) -> (usize, usize) {
    let n = 1usize << level;
    ((b + n - 1) % n, (b + 1) % n)
}

pub(crate) fn interaction_offsets(b: usize) -> &'static [isize; 3] {
    &INTERACTION_OFFSETS[b & 1]
}

pub(crate) fn interaction_boxes(level: usize, b: usize) -> [usize; 3] {
    let n = 1isize << level;
    interaction_offsets(b).map(|o| (b as isize + o).rem_euclid(n) as usize)
}

fn finest_box(x: f64, l_max: usize) -> usize {
    let boxes = 1usize << l_max;
    let b = ((x / TAU) * boxes as f64).floor() as usize;
    b.min(boxes - 1)
}

fn check_points(what: &str, points: &[f64]) -> Result<()> {
    match points.iter().position(|x| !(0.0..TAU).contains(x)) {
        Some(i) => Err(FfiaError::InvalidArgument(format!(
            "{what} {i} at {} outside [0, 2pi)",
            points[i]
        ))),
        None => Ok(()),
    }
}

/// Midpoint `pi/4 + n pi/2` of quadrant `n`.
pub fn quadrant_center(n: usize) -> f64 {
    FRAC_PI_4 + n as f64 * FRAC_PI_2
}

/// One level-2 quadrant and its split of the sources.
#[derive(Debug, Clone)]
pub struct Quadrant {
    pub center: f64,
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
    /// Sources of this quadrant and its two neighbours.
    pub omega1: Vec<usize>,
    /// Sources of the opposite quadrant.
    pub omega2: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Level2Assignment {
    pub quadrants: [Quadrant; QUADRANTS],
}

impl Level2Assignment {
    pub fn quadrant(&self, n: usize) -> &Quadrant {
        &self.quadrants[n]
    }
}
