//! Reference grids, cellwise-constant fields and the admissible ball of
//! growth fields.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Partition of the reference interval `[0, L0]` into cells.
///
/// A grid may be split into material segments (contiguous runs of cells).
/// Two-segment grids carry the interface coordinate as an interior node.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialGrid {
    nodes: Vec<f64>,
    /// First cell index of every segment; always starts with 0.
    segment_starts: Vec<usize>,
}

impl MaterialGrid {
    /// Build a grid from explicit nodes forming a single segment.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        Self::with_segments(nodes, vec![0])
    }

    fn with_segments(nodes: Vec<f64>, segment_starts: Vec<usize>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument(
                "a grid needs at least one cell".into(),
            ));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidArgument("first node must be 0".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("grid nodes must be finite".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        let cells = nodes.len() - 1;
        if segment_starts.first() != Some(&0)
            || segment_starts.windows(2).any(|w| w[1] <= w[0])
            || segment_starts.iter().any(|&s| s >= cells)
        {
            return Err(Error::InvalidArgument("malformed segment layout".into()));
        }
        Ok(Self {
            nodes,
            segment_starts,
        })
    }

    pub fn length(&self) -> f64 {
        *self.nodes.last().expect("grid has nodes")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self, cell: usize) -> f64 {
        self.nodes[cell + 1] - self.nodes[cell]
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|w| w[1] - w[0])
    }

    pub fn midpoint(&self, cell: usize) -> f64 {
        0.5 * (self.nodes[cell] + self.nodes[cell + 1])
    }

    pub fn segment_count(&self) -> usize {
        self.segment_starts.len()
    }

    /// Material segment that owns `cell`.
    pub fn segment_of(&self, cell: usize) -> usize {
        self.segment_starts.partition_point(|&s| s <= cell) - 1
    }

    /// Node indices bounding each segment, `[(first, last)]`.
    pub fn segment_node_ranges(&self) -> Vec<(usize, usize)> {
        let cells = self.cell_count();
        self.segment_starts
            .iter()
            .enumerate()
            .map(|(k, &start)| {
                let end = self.segment_starts.get(k + 1).copied().unwrap_or(cells);
                (start, end)
            })
            .collect()
    }

    /// Interface node index for a two-segment grid.
    pub fn interface_node(&self) -> Option<usize> {
        (self.segment_count() == 2).then(|| self.segment_starts[1])
    }

    /// Cell containing `x`; the right end point belongs to the last cell.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(0.0..=self.length()).contains(&x) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {x} outside [0, {}]",
                self.length()
            )));
        }
        let idx = self.nodes.partition_point(|&n| n <= x);
        Ok(idx.saturating_sub(1).min(self.cell_count() - 1))
    }

    /// Expand one value per segment into one value per cell.
    pub fn expand_segments(&self, per_segment: &[f64]) -> Result<Vec<f64>> {
        if per_segment.len() != self.segment_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} segment values, got {}",
                self.segment_count(),
                per_segment.len()
            )));
        }
        Ok((0..self.cell_count())
            .map(|c| per_segment[self.segment_of(c)])
            .collect())
    }
}

/// Equispaced grid with `cells` cells on `[0, length]`.
pub fn uniform_grid(length: f64, cells: usize) -> Result<MaterialGrid> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "reference length must be positive, got {length}"
        )));
    }
    if cells == 0 {
        return Err(Error::InvalidArgument(
            "cell count must be at least 1".into(),
        ));
    }
    let mut nodes: Vec<f64> = (0..=cells)
        .map(|k| length * k as f64 / cells as f64)
        .collect();
    nodes[cells] = length;
    MaterialGrid::from_nodes(nodes)
}

/// Two material segments `[0, interface]` and `[interface, length]`, each
/// split into `cells_per_segment` equal cells.
pub fn two_segment_grid(
    length: f64,
    interface: f64,
    cells_per_segment: usize,
) -> Result<MaterialGrid> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "reference length must be positive, got {length}"
        )));
    }
    if !(interface > 0.0 && interface < length) {
        return Err(Error::InvalidArgument(format!(
            "interface {interface} must lie strictly inside (0, {length})"
        )));
    }
    if cells_per_segment == 0 {
        return Err(Error::InvalidArgument(
            "cells per segment must be at least 1".into(),
        ));
    }
    let m = cells_per_segment;
    let mut nodes = Vec::with_capacity(2 * m + 1);
    for k in 0..m {
        nodes.push(interface * k as f64 / m as f64);
    }
    nodes.push(interface);
    for k in 1..m {
        nodes.push(interface + (length - interface) * k as f64 / m as f64);
    }
    nodes.push(length);
    MaterialGrid::with_segments(nodes, vec![0, m])
}

/// Cellwise-constant positive growth field.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthField {
    grid: Arc<MaterialGrid>,
    values: Vec<f64>,
}

impl GrowthField {
    pub fn new(grid: Arc<MaterialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::IncompatibleGrids(format!(
                "{} values for {} cells",
                values.len(),
                grid.cell_count()
            )));
        }
        if let Some((cell, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
        {
            return Err(Error::InvalidGrowthField(format!(
                "cell {cell} has value {v}; growth must be positive and finite"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Arc<MaterialGrid>, value: f64) -> Result<Self> {
        let n = grid.cell_count();
        Self::new(grid, vec![value; n])
    }

    pub fn grid(&self) -> &Arc<MaterialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grown length `L_G = sum of width * G`.
    pub fn grown_length(&self) -> f64 {
        self.grid
            .widths()
            .zip(&self.values)
            .map(|(w, g)| w * g)
            .sum()
    }

    pub fn same_grid(&self, other: &GrowthField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }
}

/// Sup-norm distance between two fields on the same grid.
pub fn sup_distance(a: &GrowthField, b: &GrowthField) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::IncompatibleGrids(
            "sup distance needs fields on the same grid".into(),
        ));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Closed sup-norm ball `B(center, radius)` of growth fields with the
/// derived uniform bounds `gamma0 <= G <= gamma1`.
#[derive(Debug, Clone)]
pub struct GrowthBounds {
    center: GrowthField,
    radius: f64,
    gamma0: f64,
    gamma1: f64,
}

impl GrowthBounds {
    pub fn new(center: GrowthField, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be nonnegative, got {radius}"
            )));
        }
        let gamma0 = center.min() - radius;
        if !(gamma0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ball reaches nonpositive growth: inf G0 - R = {gamma0}"
            )));
        }
        let gamma1 = center.max() + radius;
        Ok(Self {
            center,
            radius,
            gamma0,
            gamma1,
        })
    }

    pub fn center(&self) -> &GrowthField {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    /// Membership in the ball (with a tiny absolute slack for round-off).
    pub fn contains(&self, g: &GrowthField) -> bool {
        sup_distance(&self.center, g)
            .map(|d| d <= self.radius + 1e-14 * (1.0 + self.radius))
            .unwrap_or(false)
    }

    /// Cellwise bounds `gamma0 <= G <= gamma1`.
    pub fn admits(&self, g: &GrowthField) -> bool {
        g.values()
            .iter()
            .all(|&v| v >= self.gamma0 && v <= self.gamma1)
    }

    /// Draw a field uniformly (cell by cell) from the ball.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GrowthField {
        let values = self
            .center
            .values()
            .iter()
            .map(|&c| {
                if self.radius > 0.0 {
                    c + rng.gen_range(-self.radius..=self.radius)
                } else {
                    c
                }
            })
            .collect();
        GrowthField::new(self.center.grid().clone(), values)
            .expect("ball points stay above gamma0 > 0")
    }
}
