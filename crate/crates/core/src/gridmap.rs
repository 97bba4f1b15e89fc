//! Robot-centered elevation and semantic-cost grids.
//!
//! Rows run along body x (row 0 is the rearmost), columns along body y
//! (column 0 is the rightmost). Cells are stored row-major.

use std::fmt::Write as _;

use rand::Rng;

pub use crate::geometry::{body_to_world, world_to_body, Pose2D};
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::real::Real;
use crate::scenario::{ObstacleQuery, GROUND_CLASS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub span_x: T,
    pub span_y: T,
    pub resolution: T,
    pub rows: usize,
    pub cols: usize,
    /// Shift of the window center along body x. Zero centers the window on
    /// the base.
    pub forward_offset: T,
}

impl<T: Real> Default for GridSpec<T> {
    /// 1.5 m x 1.2 m at 5 cm, i.e. 30 x 24 = 720 cells.
    fn default() -> Self {
        Self {
            span_x: T::lit(1.5),
            span_y: T::lit(1.2),
            resolution: T::lit(0.05),
            rows: 30,
            cols: 24,
            forward_offset: T::zero(),
        }
    }
}

impl<T: Real> GridSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > T::zero()) || self.rows == 0 || self.cols == 0 {
            return Err(Error::invalid("grid", "resolution and cell counts must be positive"));
        }
        let tol = T::lit(1e-9) * self.span_x.max(self.span_y).max(T::one());
        if (T::from_count(self.rows) * self.resolution - self.span_x).abs() > tol
            || (T::from_count(self.cols) * self.resolution - self.span_y).abs() > tol
        {
            return Err(Error::invalid("grid", "rows/cols times resolution must equal the spans"));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Body-frame x of the lower edge of row `k` (`k == rows` is the upper edge).
    pub fn row_edge(&self, k: usize) -> T {
        self.x_min() + T::from_count(k) * self.resolution
    }

    /// Body-frame y of the lower edge of column `k`.
    pub fn col_edge(&self, k: usize) -> T {
        self.y_min() + T::from_count(k) * self.resolution
    }

    fn x_min(&self) -> T {
        self.forward_offset - self.span_x * T::half()
    }

    fn y_min(&self) -> T {
        -self.span_y * T::half()
    }

    /// Body-frame center of cell `(row, col)`.
    pub fn cell_center(&self, row: usize, col: usize) -> Vec2<T> {
        Vec2::new(
            self.x_min() + (T::from_count(row) + T::half()) * self.resolution,
            self.y_min() + (T::from_count(col) + T::half()) * self.resolution,
        )
    }

    /// Cell containing a body-frame point. Points on a shared edge go to the
    /// lower index; the outer window edges are inclusive.
    pub fn locate(&self, p: Vec2<T>) -> Option<(usize, usize)> {
        let row = axis_index(p.x, self.rows, |k| self.row_edge(k))?;
        let col = axis_index(p.y, self.cols, |k| self.col_edge(k))?;
        Some((row, col))
    }

    /// Cells whose squares intersect the square `p +- radius`, clipped to
    /// the window.
    pub fn cells_near(&self, p: Vec2<T>, radius: T) -> impl Iterator<Item = (usize, usize)> {
        let rows = axis_range(p.x - radius, p.x + radius, self.rows, |k| self.row_edge(k));
        let cols = axis_range(p.y - radius, p.y + radius, self.cols, |k| self.col_edge(k));
        let (rows, cols) = match (rows, cols) {
            (Some(r), Some(c)) => (r, c),
            _ => ((1, 0), (1, 0)),
        };
        (rows.0..=rows.1).flat_map(move |r| (cols.0..=cols.1).map(move |c| (r, c)))
    }

    pub fn flat_index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }
}

fn axis_index<T: Real>(v: T, n: usize, edge: impl Fn(usize) -> T) -> Option<usize> {
    let lo = edge(0);
    let hi = edge(n);
    if !(v >= lo && v <= hi) {
        return None;
    }
    let res = edge(1) - lo;
    let guess = ((v - lo) / res).floor().to_usize().unwrap_or(0).min(n - 1);
    // Correct for rounding so that the comparison against the edge values
    // alone decides the cell: (edge(k), edge(k+1)] -> k, edge(0) -> 0.
    let mut k = guess;
    while k > 0 && v <= edge(k) {
        k -= 1;
    }
    while k + 1 < n && v > edge(k + 1) {
        k += 1;
    }
    Some(k)
}

fn axis_range<T: Real>(lo: T, hi: T, n: usize, edge: impl Fn(usize) -> T) -> Option<(usize, usize)> {
    if hi < edge(0) || lo > edge(n) {
        return None;
    }
    let a = axis_index(lo.max(edge(0)), n, &edge)?;
    let b = axis_index(hi.min(edge(n)), n, &edge)?;
    // A range starting exactly on an edge also touches the cell below it.
    let a = if a > 0 && lo <= edge(a) { a - 1 } else { a };
    Some((a, b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElevationMap<T> {
    pub spec: GridSpec<T>,
    pub heights: Vec<T>,
    pub center: Pose2D<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMap<T> {
    pub spec: GridSpec<T>,
    pub costs: Vec<T>,
    pub class_ids: Vec<u32>,
    pub center: Pose2D<T>,
}

/// Elevation and semantic grids sampled at the same pose with the same spec.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMap<T> {
    pub elevation: ElevationMap<T>,
    pub semantic: SemanticMap<T>,
}

/// Values of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellValue<T> {
    pub row: usize,
    pub col: usize,
    pub height: T,
    pub cost: T,
    pub class_id: u32,
}

impl<T: Real> DualMap<T> {
    pub fn spec(&self) -> &GridSpec<T> {
        &self.elevation.spec
    }

    pub fn center(&self) -> &Pose2D<T> {
        &self.elevation.center
    }

    pub fn cell(&self, row: usize, col: usize) -> CellValue<T> {
        let i = self.spec().flat_index(row, col);
        CellValue {
            row,
            col,
            height: self.elevation.heights[i],
            cost: self.semantic.costs[i],
            class_id: self.semantic.class_ids[i],
        }
    }

    /// Nearest-cell lookup of a body-frame point; `None` outside the window.
    pub fn cell_at(&self, p_body: Vec2<T>) -> Option<CellValue<T>> {
        self.spec().locate(p_body).map(|(r, c)| self.cell(r, c))
    }

    /// Cells intersecting the square `p_body +- radius`.
    pub fn cells_near(&self, p_body: Vec2<T>, radius: T) -> impl Iterator<Item = CellValue<T>> + '_ {
        self.spec().cells_near(p_body, radius).map(move |(r, c)| self.cell(r, c))
    }

    /// CSV dump, one row per cell: `row,col,height_m,cost,class_id`.
    pub fn to_csv(&self) -> String {
        let spec = self.spec();
        let mut out = String::from("row,col,height_m,cost,class_id\n");
        for r in 0..spec.rows {
            for c in 0..spec.cols {
                let v = self.cell(r, c);
                let _ = writeln!(out, "{},{},{},{},{}", r, c, v.height, v.cost, v.class_id);
            }
        }
        out
    }
}

/// Samples both grids analytically from the obstacle boxes.
///
/// Each cell reads the terrain at its center, transformed into the world
/// frame through `base`. Cells off the track read as flat ground.
pub fn sample_dual_map<T: Real, Q: ObstacleQuery<T> + ?Sized>(
    world: &Q,
    base: Pose2D<T>,
    spec: GridSpec<T>,
) -> DualMap<T> {
    let n = spec.cell_count();
    let mut heights = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    let mut class_ids = Vec::with_capacity(n);
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            let p_world = base.body_to_world(spec.cell_center(r, c));
            let s = world.sample(p_world);
            heights.push(s.height);
            costs.push(s.cost);
            class_ids.push(s.class_id);
        }
    }
    debug_assert!(class_ids.iter().zip(&costs).all(|(&id, &cost)| id != GROUND_CLASS || cost == T::zero()));
    DualMap {
        elevation: ElevationMap {
            spec,
            heights,
            center: base,
        },
        semantic: SemanticMap {
            spec,
            costs,
            class_ids,
            center: base,
        },
    }
}

/// As [`sample_dual_map`], with zero-mean uniform noise of the given
/// amplitude added to every elevation cell.
pub fn sample_dual_map_noisy<T: Real, Q: ObstacleQuery<T> + ?Sized, R: Rng + ?Sized>(
    world: &Q,
    base: Pose2D<T>,
    spec: GridSpec<T>,
    amplitude: T,
    rng: &mut R,
) -> DualMap<T> {
    let mut map = sample_dual_map(world, base, spec);
    if amplitude > T::zero() {
        let a = amplitude.as_f64();
        for h in &mut map.elevation.heights {
            *h = *h + T::lit(rng.gen_range(-a..=a));
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_track, Obstacle, ObstacleMode, World};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn single_obstacle_world(cx: f64, cy: f64) -> World<f64> {
        let mut world = World::empty(10.0, 2.0);
        world.obstacles.push(Obstacle {
            center: Vec2::new(cx, cy),
            half_extents: Vec2::new(0.1, 0.1),
            height: 0.05,
            class_id: 1,
            mode: ObstacleMode::Rigid,
        });
        world
    }

    /// Independent per-cell oracle: evaluate the box test directly.
    fn oracle_cell(world: &World<f64>, base: &Pose2D<f64>, spec: &GridSpec<f64>, r: usize, c: usize) -> (f64, f64) {
        let x0 = -spec.span_x / 2.0 + spec.forward_offset;
        let y0 = -spec.span_y / 2.0;
        let bx = x0 + (r as f64 + 0.5) * spec.resolution;
        let by = y0 + (c as f64 + 0.5) * spec.resolution;
        let (s, co) = base.yaw.sin_cos();
        let wx = base.x + co * bx - s * by;
        let wy = base.y + s * bx + co * by;
        let mut h: f64 = 0.0;
        let mut cost: f64 = 0.0;
        for o in &world.obstacles {
            if (wx - o.center.x).abs() <= o.half_extents.x && (wy - o.center.y).abs() <= o.half_extents.y {
                h = h.max(o.height);
                cost = cost.max(world.class_cost(o.class_id));
            }
        }
        (h, cost)
    }

    #[test]
    fn default_spec_is_720_cells() {
        let spec = GridSpec::<f64>::default();
        spec.validate().unwrap();
        assert_eq!(spec.cell_count(), 720);
        let bad = GridSpec { rows: 31, ..spec };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_world_is_flat_everywhere() {
        let world = World::<f64>::empty(10.0, 2.0);
        for base in [Pose2D::origin(), Pose2D::new(3.0, -0.4, 2.0)] {
            let map = sample_dual_map(&world, base, GridSpec::default());
            assert!(map.elevation.heights.iter().all(|&h| h == 0.0));
            assert!(map.semantic.costs.iter().all(|&c| c == 0.0));
            assert!(map.semantic.class_ids.iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn obstacle_outside_centered_window_is_invisible() {
        // With a centered window the body x range is [-0.75, 0.75].
        let world = single_obstacle_world(1.0, 0.0);
        let map = sample_dual_map(&world, Pose2D::origin(), GridSpec::default());
        assert!(map.elevation.heights.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn single_obstacle_matches_point_in_box() {
        for (cx, offset) in [(0.3, 0.0), (1.0, 0.5)] {
            let world = single_obstacle_world(cx, 0.0);
            let spec = GridSpec {
                forward_offset: offset,
                ..GridSpec::default()
            };
            let map = sample_dual_map(&world, Pose2D::origin(), spec);
            let mut occupied = 0;
            for r in 0..spec.rows {
                for c in 0..spec.cols {
                    let p = spec.cell_center(r, c);
                    let inside = (p.x - cx).abs() <= 0.1 && p.y.abs() <= 0.1;
                    let v = map.cell(r, c);
                    if inside {
                        occupied += 1;
                        assert_eq!((v.height, v.cost, v.class_id), (0.05, 5.0, 1));
                    } else {
                        assert_eq!((v.height, v.cost, v.class_id), (0.0, 0.0, 0));
                    }
                }
            }
            // 4 x 4 centers fall inside a 0.2 m box at 5 cm spacing.
            assert_eq!(occupied, 16);
        }
    }

    #[test]
    fn rotated_sampling_matches_world_frame_oracle() {
        let world = single_obstacle_world(0.3, 0.0);
        let spec = GridSpec::default();
        let base0 = Pose2D::origin();
        let base90 = Pose2D::new(0.0, 0.0, FRAC_PI_2);
        let m0 = sample_dual_map(&world, base0, spec);
        let m90 = sample_dual_map(&world, base90, spec);
        let mut n0 = 0;
        let mut n90 = 0;
        for r in 0..spec.rows {
            for c in 0..spec.cols {
                assert_eq!((m0.cell(r, c).height, m0.cell(r, c).cost), oracle_cell(&world, &base0, &spec, r, c));
                assert_eq!((m90.cell(r, c).height, m90.cell(r, c).cost), oracle_cell(&world, &base90, &spec, r, c));
                n0 += (m0.cell(r, c).height > 0.0) as usize;
                n90 += (m90.cell(r, c).height > 0.0) as usize;
            }
        }
        // After a quarter turn the obstacle sits at body (0, -0.3).
        assert_eq!(n0, 16);
        assert_eq!(n90, 16);
        assert!(m90.cell_at(Vec2::new(0.0, -0.3)).unwrap().height > 0.0);
    }

    #[test]
    fn random_worlds_match_oracle() {
        let world = generate_track(10.0, 4, 10.0, 2.0, ObstacleMode::Rigid, false).unwrap();
        let spec = GridSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let base = Pose2D::new(rng.gen_range(0.0..10.0), rng.gen_range(-1.0..1.0), rng.gen_range(-PI..PI));
            let map = sample_dual_map(&world, base, spec);
            for r in 0..spec.rows {
                for c in 0..spec.cols {
                    let v = map.cell(r, c);
                    assert_eq!((v.height, v.cost), oracle_cell(&world, &base, &spec, r, c));
                }
            }
        }
    }

    #[test]
    fn sampling_is_pure() {
        let world = generate_track(15.0, 9, 10.0, 2.0, ObstacleMode::Rigid, true).unwrap();
        let base = Pose2D::new(4.2, 0.1, 0.3);
        assert_eq!(
            sample_dual_map(&world, base, GridSpec::default()),
            sample_dual_map(&world, base, GridSpec::default())
        );
    }

    #[test]
    fn cell_lookup_rules() {
        let world = single_obstacle_world(0.3, 0.0);
        let spec = GridSpec::default();
        let map = sample_dual_map(&world, Pose2D::origin(), spec);
        let center = spec.cell_center(12, 7);
        let v = map.cell_at(center).unwrap();
        assert_eq!((v.row, v.col), (12, 7));
        assert!(map.cell_at(Vec2::new(10.0, 10.0)).is_none());

        // Shared edges resolve to the lower index on both axes.
        for k in 1..spec.rows {
            let p = Vec2::new(spec.row_edge(k), center.y);
            assert_eq!(map.cell_at(p).unwrap().row, k - 1);
            let just_above = Vec2::new(spec.row_edge(k) + 1e-9, center.y);
            assert_eq!(map.cell_at(just_above).unwrap().row, k);
        }
        for k in 1..spec.cols {
            let p = Vec2::new(center.x, spec.col_edge(k));
            assert_eq!(map.cell_at(p).unwrap().col, k - 1);
        }
        // Outer edges are inside the window.
        assert_eq!(spec.locate(Vec2::new(spec.row_edge(0), 0.0)).unwrap().0, 0);
        assert_eq!(spec.locate(Vec2::new(spec.row_edge(30), 0.0)).unwrap().0, 29);
    }

    #[test]
    fn cells_near_covers_touching_squares() {
        let spec = GridSpec::<f64>::default();
        let p = spec.cell_center(10, 10);
        let cells: Vec<_> = spec.cells_near(p, 0.0).collect();
        assert_eq!(cells, vec![(10, 10)]);
        let cells: Vec<_> = spec.cells_near(p, 0.03).collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(spec.cells_near(Vec2::new(5.0, 0.0), 0.1).count(), 0);
        // Clipped at the window corner.
        assert_eq!(spec.cells_near(spec.cell_center(0, 0), 0.03).count(), 4);
    }

    #[test]
    fn noise_has_bounded_amplitude() {
        let world = World::<f64>::empty(10.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let map = sample_dual_map_noisy(&world, Pose2D::origin(), GridSpec::default(), 0.01, &mut rng);
        assert!(map.elevation.heights.iter().all(|h| h.abs() <= 0.01));
        assert!(map.elevation.heights.iter().any(|&h| h != 0.0));
    }

    #[test]
    fn csv_export_has_one_row_per_cell() {
        let world = single_obstacle_world(0.3, 0.0);
        let csv = sample_dual_map(&world, Pose2D::origin(), GridSpec::default()).to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "row,col,height_m,cost,class_id");
        assert_eq!(lines.len(), 721);
    }
}
