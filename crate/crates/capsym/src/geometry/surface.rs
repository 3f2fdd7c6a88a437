//! Surface extraction from node-sampled level functions.
//!
//! Sets are represented implicitly: a level function `phi` sampled at grid
//! nodes, negative inside the set. Extraction walks every cell and produces
//! flat pieces (segments in 2D, triangles in 3D) of the zero level set,
//! each carrying a centroid, an outward unit normal from the interpolated
//! gradient, and its length/area. Pieces are classified as contact pieces
//! when their centroid lies within half a spacing of the obstacle.

use crate::vecn::VecN;

use super::grid::MaskedGrid;

/// Node-sampled level function; negative inside the described set.
#[derive(Debug, Clone)]
pub struct LevelSet {
    node_values: Vec<f64>,
}

/// Exact zeros at nodes are ambiguous for sign-based extraction; nudge
/// them to the outside by a sub-tolerance amount.
const ZERO_NUDGE: f64 = 1e-12;

impl LevelSet {
    /// Sample `phi` at every lattice node (including the margin).
    pub fn from_fn(grid: &MaskedGrid, phi: impl Fn(VecN) -> f64) -> Self {
        Self::build(grid, |p| phi(p))
    }

    /// Level function of a set sitting against the obstacle:
    /// `max(phi, -sdf_E)`. The maximum clips the set to the obstacle
    /// complement, so one extraction yields both the free pieces and the
    /// contact pieces along `partial E`.
    pub fn capillary(grid: &MaskedGrid, phi: impl Fn(VecN) -> f64) -> Self {
        let obstacle = grid.obstacle().clone();
        Self::build(grid, move |p| phi(p).max(-obstacle.signed_distance(p)))
    }

    fn build(grid: &MaskedGrid, phi: impl Fn(VecN) -> f64) -> Self {
        let e = grid.node_extents();
        let mut node_values = vec![0.0; grid.num_nodes()];
        for k in 0..e[2] {
            for j in 0..e[1] {
                for i in 0..e[0] {
                    let p = grid.node_position([i, j, k]);
                    let mut v = phi(p);
                    if v == 0.0 {
                        v = ZERO_NUDGE;
                    }
                    node_values[grid.node_index([i, j, k])] = v;
                }
            }
        }
        LevelSet { node_values }
    }

    pub fn value(&self, grid: &MaskedGrid, coords: [usize; 3]) -> f64 {
        self.node_values[grid.node_index(coords)]
    }

    /// Set volume: per cell, the fraction of corner nodes inside the set,
    /// times the cell measure.
    pub fn volume(&self, grid: &MaskedGrid) -> f64 {
        let dim = grid.dim();
        let corners = 1usize << dim;
        let mut inside = 0usize;
        for idx in 0..grid.num_cells() {
            let co = grid.cell_coords(idx);
            for c in 0..corners {
                let nc = [
                    co[0] + (c & 1),
                    co[1] + ((c >> 1) & 1),
                    co[2] + ((c >> 2) & 1),
                ];
                if self.value(grid, nc) < 0.0 {
                    inside += 1;
                }
            }
        }
        inside as f64 / corners as f64 * grid.cell_measure()
    }
}

/// One flat piece of an extracted surface.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePiece {
    pub centroid: VecN,
    /// Outward unit normal (toward positive level values).
    pub normal: VecN,
    /// Length in 2D, area in 3D.
    pub area: f64,
    /// Whether the piece lies on the obstacle boundary.
    pub contact: bool,
}

/// Extract the zero level set of `ls` over the whole lattice.
pub fn extract_surface(grid: &MaskedGrid, ls: &LevelSet) -> Vec<SurfacePiece> {
    match grid.dim() {
        2 => extract_2d(grid, ls),
        _ => extract_3d(grid, ls),
    }
}

fn classify(grid: &MaskedGrid, centroid: VecN) -> bool {
    grid.obstacle().signed_distance(centroid) < 0.5 * grid.spacing()
}

// --- 2D: marching squares ---

fn extract_2d(grid: &MaskedGrid, ls: &LevelSet) -> Vec<SurfacePiece> {
    let ext = grid.extents();
    let h = grid.spacing();
    let mut pieces = Vec::new();
    for j in 0..ext[1] {
        for i in 0..ext[0] {
            // corners counterclockwise from the lower-left
            let coords = [[i, j, 0], [i + 1, j, 0], [i + 1, j + 1, 0], [i, j + 1, 0]];
            let v: Vec<f64> = coords.iter().map(|&c| ls.value(grid, c)).collect();
            let mask = (0..4).fold(0usize, |m, k| m | usize::from(v[k] < 0.0) << k);
            if mask == 0 || mask == 15 {
                continue;
            }
            // edges: 0 bottom, 1 right, 2 top, 3 left, as corner pairs
            const EDGE: [(usize, usize); 4] = [(0, 1), (1, 2), (3, 2), (0, 3)];
            let segs: &[(usize, usize)] = match mask {
                1 => &[(3, 0)],
                2 => &[(0, 1)],
                3 => &[(3, 1)],
                4 => &[(1, 2)],
                6 => &[(0, 2)],
                7 => &[(3, 2)],
                8 => &[(2, 3)],
                9 => &[(0, 2)],
                11 => &[(1, 2)],
                12 => &[(3, 1)],
                13 => &[(0, 1)],
                14 => &[(0, 3)],
                // saddles, disambiguated by the cell-center value
                5 => {
                    if v.iter().sum::<f64>() < 0.0 {
                        &[(3, 2), (0, 1)]
                    } else {
                        &[(0, 3), (1, 2)]
                    }
                }
                10 => {
                    if v.iter().sum::<f64>() < 0.0 {
                        &[(1, 2), (0, 3)]
                    } else {
                        &[(0, 1), (2, 3)]
                    }
                }
                _ => unreachable!(),
            };
            let cell_origin = grid.node_position([i, j, 0]);
            let crossing = |e: usize| -> VecN {
                let (a, b) = EDGE[e];
                let t = v[a] / (v[a] - v[b]);
                let pa = grid.node_position(coords[a]);
                let pb = grid.node_position(coords[b]);
                pa + (pb - pa) * t
            };
            for &(ea, eb) in segs {
                let pa = crossing(ea);
                let pb = crossing(eb);
                let len = (pb - pa).norm();
                if len < 1e-14 * h {
                    continue;
                }
                let mid = (pa + pb) * 0.5;
                let tx = (mid[0] - cell_origin[0]) / h;
                let ty = (mid[1] - cell_origin[1]) / h;
                // bilinear gradient at the midpoint, pointing outward
                let gx = ((v[1] - v[0]) * (1.0 - ty) + (v[2] - v[3]) * ty) / h;
                let gy = ((v[3] - v[0]) * (1.0 - tx) + (v[2] - v[1]) * tx) / h;
                let g = VecN::new(&[gx, gy]);
                let normal = if g.norm() > 1e-14 {
                    g.normalized()
                } else {
                    let d = (pb - pa) * (1.0 / len);
                    VecN::new(&[d[1], -d[0]])
                };
                pieces.push(SurfacePiece {
                    centroid: mid,
                    normal,
                    area: len,
                    contact: classify(grid, mid),
                });
            }
        }
    }
    pieces
}

// --- 3D: marching tetrahedra ---

// six tetrahedra sharing the main diagonal 0-7 of the unit cube;
// corner k sits at offset (k&1, k>>1&1, k>>2&1)
const TETS: [[usize; 4]; 6] = [
    [0, 1, 3, 7],
    [0, 1, 5, 7],
    [0, 2, 3, 7],
    [0, 2, 6, 7],
    [0, 4, 5, 7],
    [0, 4, 6, 7],
];

fn extract_3d(grid: &MaskedGrid, ls: &LevelSet) -> Vec<SurfacePiece> {
    let ext = grid.extents();
    let h = grid.spacing();
    let mut pieces = Vec::new();
    for k in 0..ext[2] {
        for j in 0..ext[1] {
            for i in 0..ext[0] {
                let mut v = [0.0f64; 8];
                let mut p = [VecN::zero(3); 8];
                for c in 0..8 {
                    let nc = [i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)];
                    v[c] = ls.value(grid, nc);
                    p[c] = grid.node_position(nc);
                }
                if v.iter().all(|&x| x < 0.0) || v.iter().all(|&x| x > 0.0) {
                    continue;
                }
                let cell_origin = p[0];
                for tet in &TETS {
                    march_tet(grid, h, &v, &p, cell_origin, tet, &mut pieces);
                }
            }
        }
    }
    pieces
}

#[allow(clippy::too_many_arguments)]
fn march_tet(
    grid: &MaskedGrid,
    h: f64,
    v: &[f64; 8],
    p: &[VecN; 8],
    cell_origin: VecN,
    tet: &[usize; 4],
    out: &mut Vec<SurfacePiece>,
) {
    let inside: Vec<usize> = tet.iter().copied().filter(|&c| v[c] < 0.0).collect();
    if inside.is_empty() || inside.len() == 4 {
        return;
    }
    let crossing = |a: usize, b: usize| -> VecN {
        let t = v[a] / (v[a] - v[b]);
        p[a] + (p[b] - p[a]) * t
    };
    let mut emit = |tri: [VecN; 3]| {
        let u = tri[1] - tri[0];
        let w = tri[2] - tri[0];
        let cx = u[1] * w[2] - u[2] * w[1];
        let cy = u[2] * w[0] - u[0] * w[2];
        let cz = u[0] * w[1] - u[1] * w[0];
        let area = 0.5 * (cx * cx + cy * cy + cz * cz).sqrt();
        if area < 1e-20 * h * h {
            return;
        }
        let centroid = (tri[0] + tri[1] + tri[2]) * (1.0 / 3.0);
        let g = trilinear_gradient(v, cell_origin, h, centroid);
        let normal = if g.norm() > 1e-14 {
            g.normalized()
        } else {
            VecN::new(&[cx, cy, cz]).normalized()
        };
        out.push(SurfacePiece {
            centroid,
            normal,
            area,
            contact: classify(grid, centroid),
        });
    };
    match inside.len() {
        1 | 3 => {
            // one lone vertex (inside or outside): a single triangle
            let lone = if inside.len() == 1 {
                inside[0]
            } else {
                *tet.iter().find(|&&c| v[c] >= 0.0).unwrap()
            };
            let others: Vec<usize> = tet.iter().copied().filter(|&c| c != lone).collect();
            emit([
                crossing(lone, others[0]),
                crossing(lone, others[1]),
                crossing(lone, others[2]),
            ]);
        }
        _ => {
            // two inside, two outside: a quad split into two triangles
            let (a, b) = (inside[0], inside[1]);
            let outs: Vec<usize> = tet
                .iter()
                .copied()
                .filter(|&c| c != a && c != b)
                .collect();
            let (c, d) = (outs[0], outs[1]);
            let q = [crossing(a, c), crossing(a, d), crossing(b, d), crossing(b, c)];
            emit([q[0], q[1], q[2]]);
            emit([q[0], q[2], q[3]]);
        }
    }
}

fn trilinear_gradient(v: &[f64; 8], cell_origin: VecN, h: f64, at: VecN) -> VecN {
    let t = [
        ((at[0] - cell_origin[0]) / h).clamp(0.0, 1.0),
        ((at[1] - cell_origin[1]) / h).clamp(0.0, 1.0),
        ((at[2] - cell_origin[2]) / h).clamp(0.0, 1.0),
    ];
    let mut g = VecN::zero(3);
    for axis in 0..3 {
        let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut d = 0.0;
        for b1 in 0..2usize {
            for b2 in 0..2usize {
                let mut hi = 0usize;
                let mut lo = 0usize;
                hi |= 1 << axis;
                hi |= b1 << a1;
                hi |= b2 << a2;
                lo |= b1 << a1;
                lo |= b2 << a2;
                let w1 = if b1 == 1 { t[a1] } else { 1.0 - t[a1] };
                let w2 = if b2 == 1 { t[a2] } else { 1.0 - t[a2] };
                d += (v[hi] - v[lo]) * w1 * w2;
            }
        }
        g[axis] = d / h;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::obstacle::{ConvexObstacle, OuterShape};
    use std::f64::consts::PI;

    fn free_grid_2d(h: f64) -> MaskedGrid {
        MaskedGrid::build(
            ConvexObstacle::far_away(2),
            &OuterShape::Box {
                min: VecN::new(&[-2.0, -2.0]),
                max: VecN::new(&[2.0, 2.0]),
            },
            h,
        )
        .unwrap()
    }

    #[test]
    fn circle_perimeter_and_volume() {
        let g = free_grid_2d(1.0 / 64.0);
        let ls = LevelSet::from_fn(&g, |p| p.norm() - 1.0);
        let pieces = extract_surface(&g, &ls);
        let perimeter: f64 = pieces.iter().map(|s| s.area).sum();
        assert!((perimeter - 2.0 * PI).abs() < 1e-2, "{perimeter}");
        assert!((ls.volume(&g) - PI).abs() < 0.05, "{}", ls.volume(&g));
        assert!(pieces.iter().all(|s| !s.contact));
    }

    #[test]
    fn circle_normals_point_outward() {
        let g = free_grid_2d(1.0 / 32.0);
        let ls = LevelSet::from_fn(&g, |p| p.norm() - 1.0);
        for s in extract_surface(&g, &ls) {
            assert!((s.normal.norm() - 1.0).abs() < 1e-12);
            assert!(
                s.normal.dot(&s.centroid.normalized()) > 0.99,
                "normal {:?} at {:?}",
                s.normal,
                s.centroid
            );
        }
    }

    #[test]
    fn half_disk_splits_into_free_and_contact() {
        let g = MaskedGrid::build(
            ConvexObstacle::lower_half_space(2),
            &OuterShape::Box {
                min: VecN::new(&[-2.0, 0.0]),
                max: VecN::new(&[2.0, 2.0]),
            },
            1.0 / 64.0,
        )
        .unwrap();
        let ls = LevelSet::capillary(&g, |p| p.norm() - 1.0);
        let pieces = extract_surface(&g, &ls);
        let free: f64 = pieces.iter().filter(|s| !s.contact).map(|s| s.area).sum();
        let contact: f64 = pieces.iter().filter(|s| s.contact).map(|s| s.area).sum();
        // upper half circle plus the diameter on the obstacle
        assert!((free - PI).abs() < 0.05, "free {free}");
        assert!((contact - 2.0).abs() < 0.05, "contact {contact}");
        assert!((ls.volume(&g) - PI / 2.0).abs() < 0.02);
    }

    #[test]
    fn sphere_area_and_volume() {
        let g = MaskedGrid::build(
            ConvexObstacle::far_away(3),
            &OuterShape::Box {
                min: VecN::new(&[-1.5, -1.5, -1.5]),
                max: VecN::new(&[1.5, 1.5, 1.5]),
            },
            1.0 / 16.0,
        )
        .unwrap();
        let ls = LevelSet::from_fn(&g, |p| p.norm() - 1.0);
        let pieces = extract_surface(&g, &ls);
        let area: f64 = pieces.iter().map(|s| s.area).sum();
        assert!((area - 4.0 * PI).abs() < 0.05 * 4.0 * PI, "{area}");
        assert!((ls.volume(&g) - 4.0 * PI / 3.0).abs() < 0.1);
        for s in &pieces {
            assert!(s.normal.dot(&s.centroid.normalized()) > 0.9);
        }
    }

    #[test]
    fn half_ball_contact_area() {
        let g = MaskedGrid::build(
            ConvexObstacle::lower_half_space(3),
            &OuterShape::Box {
                min: VecN::new(&[-1.5, -1.5, 0.0]),
                max: VecN::new(&[1.5, 1.5, 1.5]),
            },
            1.0 / 16.0,
        )
        .unwrap();
        let ls = LevelSet::capillary(&g, |p| p.norm() - 1.0);
        let pieces = extract_surface(&g, &ls);
        let free: f64 = pieces.iter().filter(|s| !s.contact).map(|s| s.area).sum();
        let contact: f64 = pieces.iter().filter(|s| s.contact).map(|s| s.area).sum();
        assert!((free - 2.0 * PI).abs() < 0.25, "free {free}");
        assert!((contact - PI).abs() < 0.25, "contact {contact}");
    }

    #[test]
    fn zero_nudge_keeps_extraction_finite() {
        // a plane passing exactly through grid nodes
        let g = free_grid_2d(1.0 / 16.0);
        let ls = LevelSet::from_fn(&g, |p| p[0]);
        let pieces = extract_surface(&g, &ls);
        let len: f64 = pieces.iter().map(|s| s.area).sum();
        assert!(len.is_finite());
        // the nudged plane still has roughly the height of the lattice
        let lattice_height = g.extents()[1] as f64 * g.spacing();
        assert!((len - lattice_height).abs() < 3.0 * g.spacing(), "{len}");
    }
}
