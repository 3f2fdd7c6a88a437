//! Uniform Cartesian grids masked by a convex obstacle.

use std::fmt::Write as _;

use crate::error::{CapsymError, Result};
use crate::vecn::VecN;

use super::obstacle::{ConvexObstacle, OuterShape};

/// Per-cell classification of a masked grid.
///
/// `Interior` cells have all face neighbors inside the domain. Boundary
/// cells touching the obstacle are `NeumannBoundary` (contact with `E`
/// wins the tie-break); the remaining boundary cells are
/// `DirichletBoundary`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Exterior,
    Interior,
    DirichletBoundary,
    NeumannBoundary,
}

impl CellClass {
    pub fn in_domain(self) -> bool {
        !matches!(self, CellClass::Exterior)
    }

    fn to_char(self) -> char {
        match self {
            CellClass::Exterior => '.',
            CellClass::Interior => 'i',
            CellClass::DirichletBoundary => 'd',
            CellClass::NeumannBoundary => 'n',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            '.' => Some(CellClass::Exterior),
            'i' => Some(CellClass::Interior),
            'd' => Some(CellClass::DirichletBoundary),
            'n' => Some(CellClass::NeumannBoundary),
            _ => None,
        }
    }
}

/// A uniform grid over a bounding box, with per-cell classification of the
/// domain `Omega = outer ∩ E^c`. The lattice extends a two-cell margin
/// beyond the outer bounding box so that surface extraction always sees
/// nodes on both sides of the obstacle boundary.
#[derive(Clone)]
pub struct MaskedGrid {
    dim: usize,
    spacing: f64,
    origin: VecN,
    extents: [usize; 3],
    cell_class: Vec<CellClass>,
    obstacle: ConvexObstacle,
}

const MARGIN: usize = 2;

impl MaskedGrid {
    /// Build and classify the grid. Errors on an empty or disconnected
    /// domain and on an under-resolved obstacle.
    pub fn build(obstacle: ConvexObstacle, outer: &OuterShape, spacing: f64) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(CapsymError::InvalidParameter(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        let (lo, hi) = outer.bbox();
        let dim = lo.dim();
        let mut extents = [1usize; 3];
        let mut origin = lo;
        for k in 0..dim {
            let span = hi[k] - lo[k];
            if span <= 0.0 {
                return Err(CapsymError::EmptyDomain);
            }
            extents[k] = (span / spacing).ceil() as usize + 2 * MARGIN;
            origin[k] = lo[k] - MARGIN as f64 * spacing;
        }

        if let Some(feature) = obstacle.feature_size() {
            // only enforce when the obstacle can actually intersect the box
            let center_dist = obstacle.signed_distance(origin);
            if center_dist < (hi - lo).norm() + feature && feature < 8.0 * spacing {
                return Err(CapsymError::UnderResolved(format!(
                    "feature size {feature} is below 8 cells at spacing {spacing}"
                )));
            }
        }

        let mut grid = MaskedGrid {
            dim,
            spacing,
            origin,
            extents,
            cell_class: vec![CellClass::Exterior; extents[0] * extents[1] * extents[2]],
            obstacle,
        };
        grid.classify(outer);
        grid.check_connectivity()?;
        Ok(grid)
    }

    fn classify(&mut self, outer: &OuterShape) {
        let total = self.num_cells();
        let mut in_omega = vec![false; total];
        for idx in 0..total {
            let c = self.cell_center(idx);
            in_omega[idx] = outer.contains(c) && self.obstacle.signed_distance(c) > 0.0;
        }
        for idx in 0..total {
            if !in_omega[idx] {
                continue;
            }
            let mut touches_obstacle = false;
            let mut touches_outside = false;
            for nb in self.face_neighbors(idx) {
                match nb {
                    Some(j) if in_omega[j] => {}
                    Some(j) => {
                        if self.obstacle.signed_distance(self.cell_center(j)) <= 0.0 {
                            touches_obstacle = true;
                        } else {
                            touches_outside = true;
                        }
                    }
                    None => touches_outside = true,
                }
            }
            self.cell_class[idx] = if touches_obstacle {
                CellClass::NeumannBoundary
            } else if touches_outside {
                CellClass::DirichletBoundary
            } else {
                CellClass::Interior
            };
        }
    }

    fn check_connectivity(&self) -> Result<()> {
        let total = self.num_cells();
        let mut seen = vec![false; total];
        let mut components = 0usize;
        let mut any = false;
        for start in 0..total {
            if !self.cell_class[start].in_domain() || seen[start] {
                continue;
            }
            any = true;
            components += 1;
            if components > 1 {
                return Err(CapsymError::DisconnectedDomain(components));
            }
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(idx) = stack.pop() {
                for nb in self.face_neighbors(idx).into_iter().flatten() {
                    if self.cell_class[nb].in_domain() && !seen[nb] {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                }
            }
        }
        if !any {
            return Err(CapsymError::EmptyDomain);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> VecN {
        self.origin
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents[..self.dim.max(2)]
    }

    pub fn obstacle(&self) -> &ConvexObstacle {
        &self.obstacle
    }

    pub fn num_cells(&self) -> usize {
        self.extents[0] * self.extents[1] * self.extents[2]
    }

    pub fn cell_measure(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn class(&self, idx: usize) -> CellClass {
        self.cell_class[idx]
    }

    pub fn cell_index(&self, coords: [usize; 3]) -> usize {
        coords[0] + self.extents[0] * (coords[1] + self.extents[1] * coords[2])
    }

    pub fn cell_coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.extents[0];
        let rest = idx / self.extents[0];
        [i, rest % self.extents[1], rest / self.extents[1]]
    }

    pub fn cell_center(&self, idx: usize) -> VecN {
        let co = self.cell_coords(idx);
        let mut p = self.origin;
        for k in 0..self.dim {
            p[k] += (co[k] as f64 + 0.5) * self.spacing;
        }
        p
    }

    /// Face neighbors in the `2 dim` axis directions; `None` past the lattice.
    pub fn face_neighbors(&self, idx: usize) -> Vec<Option<usize>> {
        let co = self.cell_coords(idx);
        let mut out = Vec::with_capacity(2 * self.dim);
        for k in 0..self.dim {
            for dir in [-1i64, 1] {
                let v = co[k] as i64 + dir;
                if v < 0 || v >= self.extents[k] as i64 {
                    out.push(None);
                } else {
                    let mut c2 = co;
                    c2[k] = v as usize;
                    out.push(Some(self.cell_index(c2)));
                }
            }
        }
        out
    }

    /// Neighbor of `idx` along axis `k` in direction `dir` (+1/-1).
    pub fn neighbor(&self, idx: usize, k: usize, dir: i64) -> Option<usize> {
        let co = self.cell_coords(idx);
        let v = co[k] as i64 + dir;
        if v < 0 || v >= self.extents[k] as i64 {
            return None;
        }
        let mut c2 = co;
        c2[k] = v as usize;
        Some(self.cell_index(c2))
    }

    /// Indices of all domain cells.
    pub fn domain_cells(&self) -> Vec<usize> {
        (0..self.num_cells())
            .filter(|&i| self.cell_class[i].in_domain())
            .collect()
    }

    pub fn dirichlet_cells(&self) -> Vec<usize> {
        (0..self.num_cells())
            .filter(|&i| self.cell_class[i] == CellClass::DirichletBoundary)
            .collect()
    }

    /// `|Omega|` as cell count times `h^n`.
    pub fn volume(&self) -> f64 {
        self.domain_cells().len() as f64 * self.cell_measure()
    }

    // --- node lattice (cell corners), used by surface extraction ---

    pub fn node_extents(&self) -> [usize; 3] {
        let mut e = self.extents;
        for item in e.iter_mut().take(self.dim) {
            *item += 1;
        }
        e
    }

    pub fn num_nodes(&self) -> usize {
        let e = self.node_extents();
        e[0] * e[1] * e[2]
    }

    pub fn node_index(&self, coords: [usize; 3]) -> usize {
        let e = self.node_extents();
        coords[0] + e[0] * (coords[1] + e[1] * coords[2])
    }

    pub fn node_position(&self, coords: [usize; 3]) -> VecN {
        let mut p = self.origin;
        for k in 0..self.dim {
            p[k] += coords[k] as f64 * self.spacing;
        }
        p
    }

    // --- text import/export ---

    /// Serialize as the `capsym-grid v1` text format: a self-describing
    /// header followed by one classification character per cell in
    /// row-major order.
    pub fn export_text(&self) -> String {
        let mut s = String::new();
        let dims = self.extents[..self.dim]
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x");
        let org = self.origin.comps()[..self.dim]
            .iter()
            .map(|v| format!("{v:.17e}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(
            s,
            "capsym-grid v1 n={} h={:.17e} dims={} origin={}",
            self.dim, self.spacing, dims, org
        )
        .unwrap();
        for (count, idx) in (0..self.num_cells()).enumerate() {
            s.push(self.cell_class[idx].to_char());
            if (count + 1) % self.extents[0] == 0 {
                s.push('\n');
            }
        }
        s
    }

    /// Parse the text format produced by [`export_text`]. The obstacle is
    /// not part of the format; geometric obstacle queries on an imported
    /// grid fall back to a far-away half-space.
    ///
    /// [`export_text`]: MaskedGrid::export_text
    pub fn import_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(CapsymError::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("capsym-grid") || parts.next() != Some("v1") {
            return Err(CapsymError::Parse {
                line: 1,
                msg: "expected 'capsym-grid v1' header".into(),
            });
        }
        let mut dim = 0usize;
        let mut spacing = 0.0f64;
        let mut extents = [1usize; 3];
        let mut origin = VecN::zero(2);
        for kv in parts {
            let (key, val) = kv.split_once('=').ok_or_else(|| CapsymError::Parse {
                line: 1,
                msg: format!("malformed header field '{kv}'"),
            })?;
            let bad = |msg: String| CapsymError::Parse { line: 1, msg };
            match key {
                "n" => dim = val.parse().map_err(|_| bad(format!("bad n '{val}'")))?,
                "h" => spacing = val.parse().map_err(|_| bad(format!("bad h '{val}'")))?,
                "dims" => {
                    for (k, d) in val.split('x').enumerate() {
                        if k >= 3 {
                            return Err(bad("too many dims".into()));
                        }
                        extents[k] = d.parse().map_err(|_| bad(format!("bad dims '{val}'")))?;
                    }
                }
                "origin" => {
                    let comps: Vec<f64> = val
                        .split(',')
                        .map(|v| v.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad(format!("bad origin '{val}'")))?;
                    origin = VecN::new(&comps);
                }
                other => return Err(bad(format!("unknown header key '{other}'"))),
            }
        }
        if !(2..=3).contains(&dim) {
            return Err(CapsymError::Parse {
                line: 1,
                msg: format!("dimension {dim} out of range"),
            });
        }
        let total = extents[0] * extents[1] * extents[2];
        let mut classes = Vec::with_capacity(total);
        for (lineno, line) in lines.enumerate() {
            for c in line.chars() {
                let class = CellClass::from_char(c).ok_or(CapsymError::Parse {
                    line: lineno + 2,
                    msg: format!("unknown cell class '{c}'"),
                })?;
                classes.push(class);
            }
        }
        if classes.len() != total {
            return Err(CapsymError::Parse {
                line: 1,
                msg: format!("expected {total} cells, found {}", classes.len()),
            });
        }
        Ok(MaskedGrid {
            dim,
            spacing,
            origin,
            extents,
            cell_class: classes,
            obstacle: ConvexObstacle::far_away(dim),
        })
    }
}

/// A scalar field sampled at cell centers; zero outside the domain.
#[derive(Debug, Clone)]
pub struct GridField {
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: &MaskedGrid) -> Self {
        GridField {
            values: vec![0.0; grid.num_cells()],
        }
    }

    /// Sample `f` at the centers of domain cells.
    pub fn from_fn(grid: &MaskedGrid, f: impl Fn(VecN) -> f64) -> Self {
        let mut values = vec![0.0; grid.num_cells()];
        for idx in grid.domain_cells() {
            values[idx] = f(grid.cell_center(idx));
        }
        GridField { values }
    }

    /// Sample `f` and clamp to zero on Dirichlet cells.
    pub fn from_fn_dirichlet(grid: &MaskedGrid, f: impl Fn(VecN) -> f64) -> Self {
        let mut field = Self::from_fn(grid, f);
        for idx in grid.dirichlet_cells() {
            field.values[idx] = 0.0;
        }
        field
    }

    pub fn min_on(&self, grid: &MaskedGrid) -> f64 {
        grid.domain_cells()
            .iter()
            .map(|&i| self.values[i])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_on(&self, grid: &MaskedGrid) -> f64 {
        grid.domain_cells()
            .iter()
            .map(|&i| self.values[i])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `L^q` norm over the domain; `q = inf` gives the sup norm.
    pub fn lq_norm(&self, grid: &MaskedGrid, q: f64) -> f64 {
        if q.is_infinite() {
            return grid
                .domain_cells()
                .iter()
                .map(|&i| self.values[i].abs())
                .fold(0.0, f64::max);
        }
        let sum: f64 = grid
            .domain_cells()
            .iter()
            .map(|&i| self.values[i].abs().powf(q))
            .sum();
        (sum * grid.cell_measure()).powf(1.0 / q)
    }
}
