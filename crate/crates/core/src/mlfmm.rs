//! Multilevel FMM for `S(y) = sum_k w_k / (y - x_k)` on the periodic tree.
//!
//! Expansions carry a length `scale` (the box half-width in the tree) and
//! store scaled coefficients, which keeps every coefficient O(1) however deep
//! the tree goes:
//!
//! * multipole: `sum_m a_m scale^m / (y - center)^{m+1}`
//! * local:     `sum_l b_l ((y - center) / scale)^l`
//!
//! Only sources in the target quadrant's three-quadrant neighbourhood
//! contribute. This falls out of the tree: level-3 interaction lists stay
//! inside the parent's neighbourhood, and the opposite quadrant is never
//! visited.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, FfiaError, Result};
use crate::partition::{
    interaction_boxes, interaction_offsets, periodic_neighbors, wrap_displacement, CircleTree,
    TOP_LEVEL,
};
use crate::special::SINGULARITY_TOLERANCE;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleExpansion {
    pub center: f64,
    pub scale: f64,
    pub coeffs: Vec<Complex64>,
}

impl MultipoleExpansion {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Far-field value at `y`.
    pub fn evaluate(&self, y: f64) -> Complex64 {
        let r = y - self.center;
        let ratio = self.scale / r;
        let mut acc = ZERO;
        for a in self.coeffs.iter().rev() {
            acc = acc * ratio + a;
        }
        acc / r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalExpansion {
    pub center: f64,
    pub scale: f64,
    pub coeffs: Vec<Complex64>,
}

impl LocalExpansion {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn evaluate(&self, y: f64) -> Complex64 {
        horner(&self.coeffs, (y - self.center) / self.scale)
    }
}

fn horner(coeffs: &[Complex64], z: f64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

/// Pascal triangle in `f64`, large enough for `C(l + m, m)` with `l, m < p`.
#[derive(Debug, Clone)]
struct Binomials {
    rows: Vec<Vec<f64>>,
}

impl Binomials {
    fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![1.0; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        Self { rows }
    }

    fn get(&self, n: usize, k: usize) -> f64 {
        self.rows[n][k]
    }
}

/// Dense real `p x p` operator, row-major.
#[derive(Debug, Clone)]
struct Operator {
    p: usize,
    entries: Vec<f64>,
}

impl Operator {
    fn build(p: usize, entry: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(p * p);
        for i in 0..p {
            for j in 0..p {
                entries.push(entry(i, j));
            }
        }
        Self { p, entries }
    }

    fn apply_add(&self, input: &[Complex64], out: &mut [Complex64]) {
        for (row, o) in self.entries.chunks_exact(self.p).zip(out.iter_mut()) {
            let mut acc = ZERO;
            for (m, x) in row.iter().zip(input) {
                acc += x * m;
            }
            *o += acc;
        }
    }
}

/// Multipole re-centering: `a'_m = sum_k C(m,k) a_k (c_old - c_new)^{m-k}`.
fn m2m_operator(p: usize, binom: &Binomials, scale_ratio: f64, shift: f64) -> Operator {
    Operator::build(p, |m, k| {
        if k > m {
            0.0
        } else {
            binom.get(m, k) * scale_ratio.powi(k as i32) * shift.powi((m - k) as i32)
        }
    })
}

/// Multipole to local for displacement `d = target_center - source_center`:
/// `b_l = sum_m a_m (-1)^l C(l+m, m) / d^{l+m+1}`.
fn m2l_operator(
    p: usize,
    binom: &Binomials,
    displacement: f64,
    source_scale: f64,
    target_scale: f64,
) -> Operator {
    let rho_s = source_scale / displacement;
    let rho_t = target_scale / displacement;
    Operator::build(p, |l, m| {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        sign * binom.get(l + m, m) * rho_s.powi(m as i32) * rho_t.powi(l as i32) / displacement
    })
}

/// Taylor shift: `b'_l = sum_{m >= l} C(m, l) b_m (c_new - c_old)^{m-l}`.
fn l2l_operator(p: usize, binom: &Binomials, scale_ratio: f64, shift: f64) -> Operator {
    Operator::build(p, |l, m| {
        if m < l {
            0.0
        } else {
            binom.get(m, l) * shift.powi((m - l) as i32) * scale_ratio.powi(l as i32)
        }
    })
}

/// Source to multipole: `a_m = sum_k w_k ((x_k - center) / scale)^m`.
pub fn p2m(sources: &[(f64, Complex64)], center: f64, scale: f64, p: usize) -> MultipoleExpansion {
    let mut coeffs = vec![ZERO; p];
    for &(x, w) in sources {
        accumulate_powers(&mut coeffs, w, (x - center) / scale);
    }
    MultipoleExpansion {
        center,
        scale,
        coeffs,
    }
}

fn accumulate_powers(coeffs: &mut [Complex64], w: Complex64, z: f64) {
    let mut term = w;
    for c in coeffs.iter_mut() {
        *c += term;
        term *= z;
    }
}

pub fn m2m(child: &MultipoleExpansion, new_center: f64, new_scale: f64) -> MultipoleExpansion {
    let p = child.order();
    let binom = Binomials::new(p);
    let op = m2m_operator(
        p,
        &binom,
        child.scale / new_scale,
        (child.center - new_center) / new_scale,
    );
    let mut coeffs = vec![ZERO; p];
    op.apply_add(&child.coeffs, &mut coeffs);
    MultipoleExpansion {
        center: new_center,
        scale: new_scale,
        coeffs,
    }
}

/// Converts a multipole into a local expansion about `target_center`.
/// `displacement` is the periodic difference `target_center - source center`
/// and must be at least twice the source half-width.
pub fn m2l(
    source: &MultipoleExpansion,
    target_center: f64,
    displacement: f64,
    target_scale: f64,
) -> Result<LocalExpansion> {
    let minimum = 2.0 * source.scale;
    if displacement.is_nan() || displacement.abs() < minimum {
        return Err(FfiaError::NotWellSeparated {
            displacement,
            minimum,
        });
    }
    let p = source.order();
    let binom = Binomials::new(2 * p);
    let op = m2l_operator(p, &binom, displacement, source.scale, target_scale);
    let mut coeffs = vec![ZERO; p];
    op.apply_add(&source.coeffs, &mut coeffs);
    Ok(LocalExpansion {
        center: target_center,
        scale: target_scale,
        coeffs,
    })
}

pub fn l2l(parent: &LocalExpansion, child_center: f64, child_scale: f64) -> LocalExpansion {
    let p = parent.order();
    let binom = Binomials::new(p);
    let op = l2l_operator(
        p,
        &binom,
        child_scale / parent.scale,
        (child_center - parent.center) / parent.scale,
    );
    let mut coeffs = vec![ZERO; p];
    op.apply_add(&parent.coeffs, &mut coeffs);
    LocalExpansion {
        center: child_center,
        scale: child_scale,
        coeffs,
    }
}

/// Translation matrices for one truncation number and tree depth.
///
/// In scaled form the M2M and L2L operators are level independent; the
/// M2L operators depend on the level only through `1 / displacement`, and
/// on the box only through the interaction-list offset.
#[derive(Debug, Clone)]
pub struct TranslationOperators {
    p: usize,
    l_max: usize,
    /// Left, right child into parent.
    m2m: [Operator; 2],
    /// Parent into left, right child.
    l2l: [Operator; 2],
    /// `m2l[level - 3][parity][slot]` for the offsets of `interaction_offsets`.
    m2l: Vec<[[Operator; 3]; 2]>,
}

impl TranslationOperators {
    pub fn new(p: usize, l_max: usize) -> Result<Self> {
        if p == 0 {
            return Err(FfiaError::InvalidArgument(
                "truncation p must be positive".into(),
            ));
        }
        let binom = Binomials::new(2 * p);
        let m2m = [-0.5, 0.5].map(|s| m2m_operator(p, &binom, 0.5, s));
        let l2l = [-0.5, 0.5].map(|s| l2l_operator(p, &binom, 0.5, s));
        let m2l = (TOP_LEVEL + 1..=l_max)
            .map(|level| {
                let h = CircleTree::half_width(level);
                [0usize, 1].map(|parity| {
                    interaction_offsets(parity).map(|o| {
                        // source box = target box + o
                        let d = -2.0 * h * o as f64;
                        m2l_operator(p, &binom, d, h, h)
                    })
                })
            })
            .collect();
        Ok(Self {
            p,
            l_max,
            m2m,
            l2l,
            m2l,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }
}

/// `S(y_j)` for every target, restricted to sources in the target quadrant's
/// three-quadrant neighbourhood, with displacements wrapped into `(-pi, pi]`.
pub fn mlfmm_apply(tree: &CircleTree, weights: &[Complex64], p: usize) -> Result<Vec<Complex64>> {
    let ops = TranslationOperators::new(p, tree.l_max())?;
    apply(tree, &ops, weights, None)
}

/// Engine behind [`mlfmm_apply`]. Targets flagged in `skip` are left at zero
/// and excluded from the coincidence check.
pub(crate) fn apply(
    tree: &CircleTree,
    ops: &TranslationOperators,
    weights: &[Complex64],
    skip: Option<&[bool]>,
) -> Result<Vec<Complex64>> {
    check_len("weights", tree.source_positions().len(), weights.len())?;
    if ops.l_max != tree.l_max() {
        return Err(FfiaError::InvalidArgument(format!(
            "operators built for depth {}, tree has depth {}",
            ops.l_max,
            tree.l_max()
        )));
    }
    let leaf = tree.l_max();
    let locals = if leaf > TOP_LEVEL {
        let multipoles = upward(tree, ops, weights);
        Some(downward(tree, ops, &multipoles))
    } else {
        None
    };

    let p = ops.p;
    let h = CircleTree::half_width(leaf);
    let sources = tree.source_positions();
    let targets = tree.target_positions();
    let per_box: Vec<Vec<(usize, Complex64)>> = (0..CircleTree::box_count(leaf))
        .into_par_iter()
        .map(|b| -> Result<Vec<(usize, Complex64)>> {
            let members = tree.targets_in(leaf, b);
            if members.is_empty() {
                return Ok(Vec::new());
            }
            let (left, right) = periodic_neighbors(leaf, b);
            let center = CircleTree::center(leaf, b);
            let local = locals.as_ref().map(|l| &l[b * p..(b + 1) * p]);
            let mut out = Vec::with_capacity(members.len());
            for &j in members {
                if skip.is_some_and(|s| s[j]) {
                    continue;
                }
                let y = targets[j];
                let mut value = local.map_or(ZERO, |c| horner(c, (y - center) / h));
                for nb in [left, b, right] {
                    for &k in tree.sources_in(leaf, nb) {
                        let d = wrap_displacement(y, sources[k]);
                        if d.abs() < SINGULARITY_TOLERANCE {
                            return Err(FfiaError::SingularKernel(d));
                        }
                        value += weights[k] / d;
                    }
                }
                out.push((j, value));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut result = vec![ZERO; targets.len()];
    for (j, v) in per_box.into_iter().flatten() {
        result[j] = v;
    }
    Ok(result)
}

/// Flat per-level multipole storage, `levels[l - 3][b * p + m]`.
fn upward(
    tree: &CircleTree,
    ops: &TranslationOperators,
    weights: &[Complex64],
) -> Vec<Vec<Complex64>> {
    let p = ops.p;
    let leaf = tree.l_max();
    let sources = tree.source_positions();
    let mut levels: Vec<Vec<Complex64>> = Vec::with_capacity(leaf - TOP_LEVEL);

    let h = CircleTree::half_width(leaf);
    let mut finest = vec![ZERO; CircleTree::box_count(leaf) * p];
    finest
        .par_chunks_mut(p)
        .enumerate()
        .for_each(|(b, coeffs)| {
            let center = CircleTree::center(leaf, b);
            for &k in tree.sources_in(leaf, b) {
                accumulate_powers(coeffs, weights[k], (sources[k] - center) / h);
            }
        });
    levels.push(finest);

    for level in (TOP_LEVEL + 1..leaf).rev() {
        let children = levels.last().expect("finer level present");
        let mut parents = vec![ZERO; CircleTree::box_count(level) * p];
        parents
            .par_chunks_mut(p)
            .enumerate()
            .for_each(|(b, coeffs)| {
                if tree.sources_in(level, b).is_empty() {
                    return;
                }
                for (side, op) in ops.m2m.iter().enumerate() {
                    let c = 2 * b + side;
                    op.apply_add(&children[c * p..(c + 1) * p], coeffs);
                }
            });
        levels.push(parents);
    }
    levels.reverse();
    levels
}

/// Local expansions at the finest level, flat `b * p + l`.
fn downward(
    tree: &CircleTree,
    ops: &TranslationOperators,
    multipoles: &[Vec<Complex64>],
) -> Vec<Complex64> {
    let p = ops.p;
    let mut parent_locals: Vec<Complex64> = Vec::new();
    for level in TOP_LEVEL + 1..=tree.l_max() {
        let multi = &multipoles[level - TOP_LEVEL - 1];
        let m2l = &ops.m2l[level - TOP_LEVEL - 1];
        let mut locals = vec![ZERO; CircleTree::box_count(level) * p];
        locals
            .par_chunks_mut(p)
            .enumerate()
            .for_each(|(b, coeffs)| {
                if tree.targets_in(level, b).is_empty() {
                    return;
                }
                if level > TOP_LEVEL + 1 {
                    let parent = CircleTree::parent(b);
                    ops.l2l[b & 1].apply_add(&parent_locals[parent * p..(parent + 1) * p], coeffs);
                }
                for (slot, s) in interaction_boxes(level, b).into_iter().enumerate() {
                    if tree.sources_in(level, s).is_empty() {
                        continue;
                    }
                    m2l[b & 1][slot].apply_add(&multi[s * p..(s + 1) * p], coeffs);
                }
            });
        parent_locals = locals;
    }
    parent_locals
}
