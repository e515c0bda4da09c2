//! Piecewise-constant densities, the uncentered maximal function, the dyadic split tree with
//! its leaf-averaged density, and the density-functional kinetic lower bounds.

use crate::error::{Error, Result};
use crate::exclusion::{xi_h, xi_s, ConstantsRegistry, StatisticsParams};
use crate::special::CompensatedSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Read;

pub use crate::report::{BoundReport, Diagnostic};

pub const SPLIT_DEPTH_CAP: u32 = 40;

/// Nonnegative density, constant on each of the uniform cells of [x0, x1] and zero outside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    x0: f64,
    x1: f64,
    cells: Vec<f64>,
    mass: f64,
}

#[derive(Debug, Deserialize)]
struct DensityRow {
    x: f64,
    rho: f64,
}

impl DensityProfile {
    pub fn new(x0: f64, x1: f64, cells: Vec<f64>) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && x1 > x0) {
            return Err(Error::InvalidInput(format!(
                "support must satisfy x0 < x1, got [{x0}, {x1}]"
            )));
        }
        if cells.is_empty() {
            return Err(Error::InvalidInput("density has no cells".into()));
        }
        if let Some(v) = cells.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "density values must be finite and ≥ 0, got {v}"
            )));
        }
        let w = (x1 - x0) / cells.len() as f64;
        let mut s = CompensatedSum::default();
        for v in &cells {
            s.add(*v);
        }
        Ok(Self {
            x0,
            x1,
            cells,
            mass: w * s.value(),
        })
    }

    pub fn uniform(x0: f64, x1: f64, n: usize, value: f64) -> Result<Self> {
        Self::new(x0, x1, vec![value; n])
    }

    /// CSV with header `x,rho`; rows are uniform cell centers in increasing order.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "rho" {
            return Err(Error::Parse(format!(
                "expected header `x,rho`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for (i, row) in rdr.deserialize::<DensityRow>().enumerate() {
            let row = row.map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
            if !(row.x.is_finite() && row.rho.is_finite()) {
                return Err(Error::Parse(format!("row {}: non-finite value", i + 1)));
            }
            if row.rho < 0.0 {
                return Err(Error::Parse(format!("row {}: negative density {}", i + 1, row.rho)));
            }
            xs.push(row.x);
            vals.push(row.rho);
        }
        let (x0, x1) = uniform_support(&xs)?;
        Self::new(x0, x1, vals).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn cells(&self) -> &[f64] {
        &self.cells
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn len(&self) -> usize {
        self.cells.len()
    }
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
    pub fn cell_width(&self) -> f64 {
        (self.x1 - self.x0) / self.cells.len() as f64
    }
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.cell_width()
    }
    pub fn boundary(&self, i: usize) -> f64 {
        if i == self.cells.len() {
            self.x1
        } else {
            self.x0 + i as f64 * self.cell_width()
        }
    }

    /// P_k = ∫ from x0 to the k-th cell boundary.
    pub fn prefix_masses(&self) -> Vec<f64> {
        let w = self.cell_width();
        let mut out = Vec::with_capacity(self.cells.len() + 1);
        let mut s = CompensatedSum::default();
        out.push(0.0);
        for v in &self.cells {
            s.add(*v);
            out.push(w * s.value());
        }
        out
    }

    /// ∫ρ over [a, b], exact for the piecewise-constant profile up to rounding.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let prefix = self.prefix_masses();
        self.cumulative(&prefix, b) - self.cumulative(&prefix, a)
    }

    fn cumulative(&self, prefix: &[f64], x: f64) -> f64 {
        if x <= self.x0 {
            return 0.0;
        }
        if x >= self.x1 {
            return prefix[self.cells.len()];
        }
        let w = self.cell_width();
        let k = (((x - self.x0) / w).floor() as usize).min(self.cells.len() - 1);
        prefix[k] + (x - self.boundary(k)) * self.cells[k]
    }

    /// ∫ρ³.
    pub fn integral_cubed(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for v in &self.cells {
            s.add(v * v * v);
        }
        self.cell_width() * s.value()
    }

    /// s·ρ(s·x): same mass, support scaled by 1/s.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dilation factor must be positive, got {s}"
            )));
        }
        Self::new(self.x0 / s, self.x1 / s, self.cells.iter().map(|v| v * s).collect())
    }

    fn with_cells(&self, cells: Vec<f64>) -> Self {
        Self::new(self.x0, self.x1, cells).expect("derived profile keeps valid support")
    }
}

fn uniform_support(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::Parse(format!(
            "need at least two rows to infer the cell width, got {}",
            xs.len()
        )));
    }
    let n = xs.len();
    let w = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(w > 0.0) {
        return Err(Error::Parse("cell centers must be strictly increasing".into()));
    }
    for (i, pair) in xs.windows(2).enumerate() {
        if ((pair[1] - pair[0]) - w).abs() > 1e-6 * w {
            return Err(Error::Parse(format!("cell centers are not uniform at row {}", i + 2)));
        }
    }
    Ok((xs[0] - 0.5 * w, xs[n - 1] + 0.5 * w))
}

/// Uncentered maximal function at each cell center x_i. Any interval containing x_i splits at
/// x_i into two pieces whose means bound its own, and each piece's mean is monotone in its
/// free endpoint within a cell, so the supremum is max over boundaries b of mean[b, x_i] and
/// mean[x_i, b].
pub fn maximal_function(rho: &DensityProfile) -> DensityProfile {
    let p = rho.prefix_masses();
    let w = rho.cell_width();
    let n = rho.len();
    let cells: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let half = 0.5 * w * rho.cells[i];
            let mut best = rho.cells[i];
            for j in 0..i {
                best = best.max((p[i] - p[j] + half) / ((i - j) as f64 * w + 0.5 * w));
            }
            for k in (i + 2)..=n {
                best = best.max((half + p[k] - p[i + 1]) / ((k - i - 1) as f64 * w + 0.5 * w));
            }
            best
        })
        .collect();
    rho.with_cells(cells)
}

/// Supremum of the maximal function over each closed cell, i.e. over intervals with an
/// endpoint on either boundary of the cell. Dominates ρ* pointwise on the cell.
pub fn maximal_function_cell_sup(rho: &DensityProfile) -> DensityProfile {
    let p = rho.prefix_masses();
    let w = rho.cell_width();
    let n = rho.len();
    let mean = |j: usize, k: usize| (p[k] - p[j]) / ((k - j) as f64 * w);
    let from_boundary: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|m| {
            let mut best = 0.0_f64;
            for j in 0..m {
                best = best.max(mean(j, m));
            }
            for k in (m + 1)..=n {
                best = best.max(mean(m, k));
            }
            best
        })
        .collect();
    let cells = (0..n).map(|i| from_boundary[i].max(from_boundary[i + 1])).collect();
    rho.with_cells(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    Internal,
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitNode {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    pub label: Label,
    pub depth: u32,
    pub children: Option<(usize, usize)>,
}

/// Dyadic halving tree; node 0 is the root interval Q₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitTree {
    pub nodes: Vec<SplitNode>,
}

impl SplitTree {
    pub fn root(&self) -> &SplitNode {
        &self.nodes[0]
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&SplitNode> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            match self.nodes[i].children {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(&self.nodes[i]),
            }
        }
        out
    }

    pub fn count(&self, label: Label) -> usize {
        self.nodes.iter().filter(|n| n.label == label).count()
    }

    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }
}

fn label_for(mass: f64) -> Label {
    if mass < 2.0 {
        Label::A
    } else if mass < 4.0 {
        Label::B
    } else {
        Label::Internal
    }
}

/// Halve Q₀ until every piece has mass below 4; pieces with mass in [2, 4) are B-leaves,
/// lighter ones A-leaves.
pub fn split_tree(rho: &DensityProfile, q0: (f64, f64)) -> Result<SplitTree> {
    let (lo, hi) = q0;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidInput(format!(
            "Q₀ must be a finite interval, got [{lo}, {hi}]"
        )));
    }
    let prefix = rho.prefix_masses();
    let mass = |a: f64, b: f64| rho.cumulative(&prefix, b) - rho.cumulative(&prefix, a);
    let root_mass = mass(lo, hi);
    if root_mass < 2.0 {
        return Err(Error::Inapplicable(format!("∫ρ over Q₀ is {root_mass} < 2")));
    }
    let mut nodes = vec![SplitNode {
        lo,
        hi,
        mass: root_mass,
        label: label_for(root_mass),
        depth: 0,
        children: None,
    }];
    let mut queue = vec![0usize];
    while let Some(i) = queue.pop() {
        if nodes[i].label != Label::Internal {
            continue;
        }
        let SplitNode { lo, hi, depth, .. } = nodes[i];
        if depth >= SPLIT_DEPTH_CAP {
            return Err(Error::SearchFailure(format!(
                "split depth cap {SPLIT_DEPTH_CAP} reached on [{lo}, {hi}]"
            )));
        }
        let mid = 0.5 * (lo + hi);
        let ml = mass(lo, mid);
        let mr = mass(mid, hi);
        let l = nodes.len();
        nodes.push(SplitNode {
            lo,
            hi: mid,
            mass: ml,
            label: label_for(ml),
            depth: depth + 1,
            children: None,
        });
        nodes.push(SplitNode {
            lo: mid,
            hi,
            mass: mr,
            label: label_for(mr),
            depth: depth + 1,
            children: None,
        });
        nodes[i].children = Some((l, l + 1));
        queue.push(l + 1);
        queue.push(l);
    }
    Ok(SplitTree { nodes })
}

/// Piecewise-constant function on a non-uniform partition; zero outside [breaks₀, breaks_last].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDensity {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepDensity {
    pub fn integral(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for (i, v) in self.values.iter().enumerate() {
            s.add(v * (self.breaks[i + 1] - self.breaks[i]));
        }
        s.value()
    }

    pub fn integral_cubed(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for (i, v) in self.values.iter().enumerate() {
            s.add(v * v * v * (self.breaks[i + 1] - self.breaks[i]));
        }
        s.value()
    }

    pub fn value_at(&self, x: f64) -> f64 {
        if x < self.breaks[0] || x >= self.breaks[self.breaks.len() - 1] {
            return 0.0;
        }
        let k = self.breaks.partition_point(|b| *b <= x) - 1;
        self.values[k]
    }
}

/// Mean of ρ on each leaf of the tree.
pub fn rho_tilde(tree: &SplitTree) -> StepDensity {
    let leaves = tree.leaves();
    let mut breaks = Vec::with_capacity(leaves.len() + 1);
    breaks.push(leaves[0].lo);
    let mut values = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        breaks.push(leaf.hi);
        values.push(leaf.mass / (leaf.hi - leaf.lo));
    }
    StepDensity { breaks, values }
}

fn ll_cell_sum(rho: &DensityProfile, star: &DensityProfile, eta: f64) -> Result<f64> {
    let mut s = CompensatedSum::default();
    for (r, m) in rho.cells.iter().zip(&star.cells) {
        if *r == 0.0 {
            continue;
        }
        let xi = xi_s(2.0 * eta / m)?;
        s.add(xi * xi * r * r * r);
    }
    Ok(rho.cell_width() * s.value())
}

/// C_S ∫ ξ_S(2η/ρ*)² ρ³ with ρ* evaluated at cell centers.
pub fn ll_density_bound(rho: &DensityProfile, eta: f64) -> Result<BoundReport> {
    let stats = StatisticsParams::lieb_liniger(eta)?;
    let c_s = ConstantsRegistry::C_S_LOWER;
    let star = maximal_function(rho);
    let value = c_s * ll_cell_sum(rho, &star, eta)?;
    let sup = maximal_function_cell_sup(rho);
    let rigorous = c_s * ll_cell_sum(rho, &sup, eta)?;
    Ok(BoundReport::new(value, Some(stats))?
        .with_constant("C_S", c_s)
        .with_diagnostic("mass", rho.mass())
        .with_diagnostic("integral_rho_cubed", rho.integral_cubed())
        .with_diagnostic("max_rho_star", star.cells.iter().cloned().fold(0.0, f64::max))
        .with_diagnostic("value_cell_sup", rigorous)
        .with_diagnostic("cells", rho.len()))
}

/// C_H ξ_H(α)² ∫_{Q₀} ρ̃³ from the split tree of ρ over Q₀.
pub fn cs_density_bound(rho: &DensityProfile, alpha: f64, q0: (f64, f64)) -> Result<BoundReport> {
    if !(alpha >= 1.0) {
        return Err(Error::Inapplicable(format!(
            "the density bound requires α ≥ 1, got {alpha}"
        )));
    }
    let stats = StatisticsParams::calogero_sutherland(alpha)?;
    let tree = split_tree(rho, q0)?;
    let tilde = rho_tilde(&tree);
    let xi = xi_h(alpha)?;
    let c_h = ConstantsRegistry::C_H;
    let cubed = tilde.integral_cubed();
    let m = tree.root().mass;
    let len = q0.1 - q0.0;
    let weak = c_h * xi * xi * m * m * m / (len * len);
    Ok(BoundReport::new(c_h * xi * xi * cubed, Some(stats))?
        .with_constant("C_H", c_h)
        .with_diagnostic("xi_H", xi)
        .with_diagnostic("mass_Q0", m)
        .with_diagnostic("integral_rho_tilde_cubed", cubed)
        .with_diagnostic("value_mean_density", weak)
        .with_diagnostic("leaves_A", tree.count(Label::A))
        .with_diagnostic("leaves_B", tree.count(Label::B))
        .with_diagnostic("tree_depth", tree.max_depth() as usize))
}
