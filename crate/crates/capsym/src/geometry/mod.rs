//! Obstacles, masked grids, cap geometry, and perimeter functionals.

pub mod cap;
pub mod grid;
pub mod obstacle;
pub mod perimeter;
pub mod surface;

pub use cap::{cap_constant, cap_energy, cap_radius_for_volume, unit_ball_volume, CapGeometry};
pub use grid::{CellClass, GridField, MaskedGrid};
pub use obstacle::{ConvexObstacle, OuterShape};
pub use perimeter::{
    anisotropic_perimeter, capillary_perimeter, isoperimetric_check, CapillaryPerimeter,
};
pub use surface::{extract_surface, LevelSet, SurfacePiece};
