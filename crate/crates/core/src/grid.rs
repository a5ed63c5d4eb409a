//! Uniform 2-D grids and sampled scalar fields.
//!
//! Values are stored row-major by `y` then `x`: node `(i, j)` with
//! `x = x_min + i·h`, `y = y_min + j·h` lives at `j·nx + i`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::math;

const SPACING_RTOL: f64 = 1e-12;
/// Slack for points that sit on the grid rectangle up to round-off.
const BOUNDS_SLACK: f64 = 1e-12;
/// Fractional cell coordinates this close to an integer snap onto the node.
const NODE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
    h: f64,
}

impl Grid2D {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite()) {
            return Err(Error::DegenerateGrid("bounds must be finite"));
        }
        if x_max <= x_min || y_max <= y_min {
            return Err(Error::DegenerateGrid("bounds must be strictly ordered"));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::DegenerateGrid("need at least 3 nodes per axis"));
        }
        let hx = (x_max - x_min) / (nx - 1) as f64;
        let hy = (y_max - y_min) / (ny - 1) as f64;
        if math::abs(hx - hy) > SPACING_RTOL * hx.max(hy) {
            return Err(Error::SpacingMismatch { hx, hy });
        }
        Ok(Grid2D {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            h: hx,
        })
    }

    /// Square grid `[-half, half]²` with `n` nodes per axis.
    pub fn centered_square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(self.x_min, self.x_max, self.y_min, self.y_max)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.x_min + i as f64 * self.h,
            self.y_min + j as f64 * self.h,
        )
    }

    /// Node coordinates of a flat index.
    pub fn node_at(&self, k: usize) -> Point {
        self.node(k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && !self.is_interior(i, j)
    }

    /// Whether `p` lies in the closed rectangle (up to round-off).
    pub fn contains(&self, p: Point) -> bool {
        let s = BOUNDS_SLACK * (1.0 + self.bounds().diameter());
        p.x >= self.x_min - s && p.x <= self.x_max + s && p.y >= self.y_min - s && p.y <= self.y_max + s
    }

    /// Whether the closed disk `B_r(c)` fits in the grid rectangle.
    pub fn contains_ball(&self, c: Point, r: f64) -> bool {
        self.contains(Point::new(c.x - r, c.y - r)) && self.contains(Point::new(c.x + r, c.y + r))
    }

    /// Cell containing `p` and the local coordinates `(tx, ty) ∈ [0,1]²`.
    pub fn locate(&self, p: Point) -> Result<(usize, usize, f64, f64)> {
        if !p.is_finite() || !self.contains(p) {
            return Err(Error::OutOfBounds { x: p.x, y: p.y });
        }
        let (i, tx) = Self::axis_cell((p.x - self.x_min) / self.h, self.nx);
        let (j, ty) = Self::axis_cell((p.y - self.y_min) / self.h, self.ny);
        Ok((i, j, tx, ty))
    }

    fn axis_cell(f: f64, n: usize) -> (usize, f64) {
        let r = math::round(f);
        let f = if math::abs(f - r) < NODE_SNAP { r } else { f };
        let f = f.clamp(0.0, (n - 1) as f64);
        let i = (math::floor(f) as usize).min(n - 2);
        (i, f - i as f64)
    }

    /// Iterates boundary nodes in the canonical order used by
    /// [`BoundaryData`]: bottom row, top row, left column, right column
    /// (corners belong to the rows).
    pub fn boundary_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (nx, ny) = (self.nx, self.ny);
        (0..nx)
            .map(|i| (i, 0))
            .chain((0..nx).map(move |i| (i, ny - 1)))
            .chain((1..ny - 1).map(|j| (0, j)))
            .chain((1..ny - 1).map(move |j| (nx - 1, j)))
    }

    pub fn boundary_len(&self) -> usize {
        2 * self.nx + 2 * (self.ny - 2)
    }

    /// Slot of a boundary node in the canonical boundary ordering.
    pub fn boundary_slot(&self, i: usize, j: usize) -> Option<usize> {
        let (nx, ny) = (self.nx, self.ny);
        if i >= nx || j >= ny {
            return None;
        }
        if j == 0 {
            Some(i)
        } else if j == ny - 1 {
            Some(nx + i)
        } else if i == 0 {
            Some(2 * nx + j - 1)
        } else if i == nx - 1 {
            Some(2 * nx + (ny - 2) + j - 1)
        } else {
            None
        }
    }

    /// Whether two grids describe the same nodes.
    pub fn same_nodes(&self, other: &Grid2D) -> bool {
        let tol = 1e-12 * (1.0 + self.bounds().diameter());
        self.nx == other.nx
            && self.ny == other.ny
            && math::abs(self.x_min - other.x_min) <= tol
            && math::abs(self.y_min - other.y_min) <= tol
            && math::abs(self.h - other.h) <= tol
    }
}

/// Anything that can be evaluated at a point of the plane.
pub trait PointSampler {
    fn sample(&self, p: Point) -> Result<f64>;
}

impl<T: PointSampler + ?Sized> PointSampler for &T {
    fn sample(&self, p: Point) -> Result<f64> {
        (**self).sample(p)
    }
}

/// Adapts a closure to [`PointSampler`].
#[derive(Debug, Clone, Copy)]
pub struct FnSampler<F>(pub F);

impl<F: Fn(Point) -> f64> PointSampler for FnSampler<F> {
    fn sample(&self, p: Point) -> Result<f64> {
        Ok((self.0)(p))
    }
}

/// A function sampled on the nodes of a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        ScalarField {
            values: alloc::vec![0.0; grid.len()],
            grid,
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                values.push(f(grid.node(i, j)));
            }
        }
        Self::new(grid, values)
    }

    /// Samples a [`PointSampler`] at every node.
    pub fn sample_from(grid: Grid2D, s: &impl PointSampler) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                values.push(s.sample(grid.node(i, j))?);
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        ScalarField::new(self.grid, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<ScalarField> {
        ScalarField::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(math::abs(*v)))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Max-norm of `self − other` over all nodes.
    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max(math::abs(a - b))))
    }

    fn check_interior(&self, i: usize, j: usize) -> Result<()> {
        if self.grid.is_interior(i, j) {
            Ok(())
        } else {
            Err(Error::NotInterior { i, j })
        }
    }

    #[inline]
    pub(crate) fn laplacian_unchecked(&self, i: usize, j: usize) -> f64 {
        let k = self.grid.index(i, j);
        let nx = self.grid.nx();
        let v = &self.values;
        let h2 = self.grid.h() * self.grid.h();
        (v[k + 1] + v[k - 1] + v[k + nx] + v[k - nx] - 4.0 * v[k]) / h2
    }

    /// Five-point Laplacian at an interior node.
    pub fn discrete_laplacian(&self, i: usize, j: usize) -> Result<f64> {
        self.check_interior(i, j)?;
        Ok(self.laplacian_unchecked(i, j))
    }

    /// Central-difference gradient at an interior node.
    pub fn gradient_central(&self, i: usize, j: usize) -> Result<Point> {
        self.check_interior(i, j)?;
        let two_h = 2.0 * self.grid.h();
        Ok(Point::new(
            (self.get(i + 1, j) - self.get(i - 1, j)) / two_h,
            (self.get(i, j + 1) - self.get(i, j - 1)) / two_h,
        ))
    }

    /// Bilinear interpolation from the enclosing cell.
    pub fn interpolate(&self, p: Point) -> Result<f64> {
        let (i, j, tx, ty) = self.grid.locate(p)?;
        let f00 = self.get(i, j);
        let f10 = self.get(i + 1, j);
        let f01 = self.get(i, j + 1);
        let f11 = self.get(i + 1, j + 1);
        Ok((1.0 - ty) * ((1.0 - tx) * f00 + tx * f10) + ty * ((1.0 - tx) * f01 + tx * f11))
    }

    /// Central-difference gradient fields, one-sided on the boundary ring.
    pub fn gradient_fields(&self) -> GradientField {
        let g = self.grid;
        let (nx, ny, h) = (g.nx(), g.ny(), g.h());
        let mut gx = Vec::with_capacity(g.len());
        let mut gy = Vec::with_capacity(g.len());
        for j in 0..ny {
            for i in 0..nx {
                let dx = if i == 0 {
                    (self.get(1, j) - self.get(0, j)) / h
                } else if i == nx - 1 {
                    (self.get(i, j) - self.get(i - 1, j)) / h
                } else {
                    (self.get(i + 1, j) - self.get(i - 1, j)) / (2.0 * h)
                };
                let dy = if j == 0 {
                    (self.get(i, 1) - self.get(i, 0)) / h
                } else if j == ny - 1 {
                    (self.get(i, j) - self.get(i, j - 1)) / h
                } else {
                    (self.get(i, j + 1) - self.get(i, j - 1)) / (2.0 * h)
                };
                gx.push(dx);
                gy.push(dy);
            }
        }
        GradientField {
            gx: ScalarField { grid: g, values: gx },
            gy: ScalarField { grid: g, values: gy },
        }
    }
}

impl PointSampler for ScalarField {
    fn sample(&self, p: Point) -> Result<f64> {
        self.interpolate(p)
    }
}

/// Precomputed difference-quotient gradient of a field.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gx: ScalarField,
    pub gy: ScalarField,
}

impl GradientField {
    /// Interpolated gradient at `p`.
    pub fn at(&self, p: Point) -> Result<Point> {
        Ok(Point::new(self.gx.interpolate(p)?, self.gy.interpolate(p)?))
    }

    /// Interpolated `|∇u|²` at `p`, sharing the cell lookup.
    pub(crate) fn norm_sq_at(&self, p: Point) -> Result<f64> {
        let (i, j, tx, ty) = self.gx.grid.locate(p)?;
        let bil = |f: &ScalarField| {
            (1.0 - ty) * ((1.0 - tx) * f.get(i, j) + tx * f.get(i + 1, j))
                + ty * ((1.0 - tx) * f.get(i, j + 1) + tx * f.get(i + 1, j + 1))
        };
        let (a, b) = (bil(&self.gx), bil(&self.gy));
        Ok(a * a + b * b)
    }
}

/// Dirichlet values on exactly the boundary nodes of a grid, in the order of
/// [`Grid2D::boundary_nodes`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    grid: Grid2D,
    values: Vec<f64>,
}

impl BoundaryData {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.boundary_len() {
            return Err(Error::SizeMismatch {
                expected: grid.boundary_len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(BoundaryData { grid, values })
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(Point) -> f64) -> Result<Self> {
        let values = grid.boundary_nodes().map(|(i, j)| f(grid.node(i, j))).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Grid2D) -> Self {
        BoundaryData {
            values: alloc::vec![0.0; grid.boundary_len()],
            grid,
        }
    }

    /// Boundary trace of a field.
    pub fn trace_of(u: &ScalarField) -> Self {
        let grid = *u.grid();
        BoundaryData {
            values: grid.boundary_nodes().map(|(i, j)| u.get(i, j)).collect(),
            grid,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.grid.boundary_slot(i, j).map(|s| self.values[s])
    }

    /// `(i, j, value)` for every boundary node.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.grid
            .boundary_nodes()
            .zip(&self.values)
            .map(|((i, j), v)| (i, j, *v))
    }

    /// Adds `g(x)` at every boundary node.
    pub fn perturbed(&self, g: impl Fn(Point) -> f64) -> Result<Self> {
        let values = self
            .iter()
            .map(|(i, j, v)| v + g(self.grid.node(i, j)))
            .collect();
        Self::new(self.grid, values)
    }

    /// `sup |self − other|` over the boundary.
    pub fn sup_diff(&self, other: &BoundaryData) -> Result<f64> {
        if !self.grid.same_nodes(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max(math::abs(a - b))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> Grid2D {
        Grid2D::centered_square(1.0, 129).unwrap()
    }

    #[test]
    fn build_grid_examples() {
        assert_eq!(unit().h(), 1.0 / 64.0);
        assert_eq!(Grid2D::centered_square(1.0, 3).unwrap().h(), 1.0);
        assert!(matches!(
            Grid2D::new(-1.0, 1.0, -1.0, 1.0, 129, 65),
            Err(Error::SpacingMismatch { .. })
        ));
        assert!(matches!(
            Grid2D::new(1.0, -1.0, -1.0, 1.0, 5, 5),
            Err(Error::DegenerateGrid(_))
        ));
        assert!(matches!(
            Grid2D::new(-1.0, 1.0, -1.0, 1.0, 2, 2),
            Err(Error::DegenerateGrid(_))
        ));
    }

    #[test]
    fn laplacian_examples() {
        let g = unit();
        let c = ScalarField::from_fn(g, |_| 3.0).unwrap();
        assert_eq!(c.discrete_laplacian(5, 7).unwrap(), 0.0);

        let q = ScalarField::from_fn(g, |p| p.x * p.x + p.y * p.y).unwrap();
        for (i, j) in [(1, 1), (64, 64), (100, 3), (127, 127)] {
            assert!((q.discrete_laplacian(i, j).unwrap() - 4.0).abs() < 1e-9);
        }

        let cubic = ScalarField::from_fn(g, |p| p.x * p.x * p.x).unwrap();
        // x = 0.5 is node i = 96
        assert_eq!(g.node(96, 40).x, 0.5);
        assert!((cubic.discrete_laplacian(96, 40).unwrap() - 3.0).abs() < 1e-9);

        assert_eq!(
            q.discrete_laplacian(0, 5),
            Err(Error::NotInterior { i: 0, j: 5 })
        );
        assert!(q.discrete_laplacian(5, 128).is_err());
    }

    #[test]
    fn gradient_examples() {
        let g = unit();
        let lin = ScalarField::from_fn(g, |p| p.x).unwrap();
        let d = lin.gradient_central(10, 20).unwrap();
        assert!((d.x - 1.0).abs() < 1e-12 && d.y.abs() < 1e-12);

        let bil = ScalarField::from_fn(g, |p| p.x * p.y).unwrap();
        // (0.25, 0.5) is node (80, 96)
        assert_eq!(g.node(80, 96), Point::new(0.25, 0.5));
        let d = bil.gradient_central(80, 96).unwrap();
        assert!((d.x - 0.5).abs() < 1e-12 && (d.y - 0.25).abs() < 1e-12);

        let big = Grid2D::centered_square(4.0, 65).unwrap();
        let q = ScalarField::from_fn(big, |p| p.x * p.x + p.y * p.y).unwrap();
        let (i, j) = (40, 48);
        assert_eq!(big.node(i, j), Point::new(1.0, 2.0));
        let d = q.gradient_central(i, j).unwrap();
        assert!((d.x - 2.0).abs() < 1e-12 && (d.y - 4.0).abs() < 1e-12);
        assert!(q.gradient_central(0, 0).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let g = Grid2D::centered_square(1.0, 17).unwrap();
        let zero = ScalarField::zeros(g);
        assert_eq!(zero.interpolate(Point::new(0.31, -0.7)).unwrap(), 0.0);

        let lin = ScalarField::from_fn(g, |p| p.x).unwrap();
        let v = lin.interpolate(Point::new(0.123, 0.456)).unwrap();
        assert!((v - 0.123).abs() < 1e-15);

        let h = g.h();
        let sq = ScalarField::from_fn(g, |p| p.x * p.x).unwrap();
        let v = sq.interpolate(Point::new(h / 2.0, h / 2.0)).unwrap();
        assert!((v - h * h / 2.0).abs() < 1e-15);

        assert!(matches!(
            sq.interpolate(Point::new(1.5, 0.0)),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn field_rejects_bad_values() {
        let g = Grid2D::centered_square(1.0, 3).unwrap();
        assert!(matches!(
            ScalarField::new(g, alloc::vec![0.0; 8]),
            Err(Error::SizeMismatch { expected: 9, got: 8 })
        ));
        let mut v = alloc::vec![0.0; 9];
        v[4] = f64::NAN;
        assert_eq!(ScalarField::new(g, v), Err(Error::NonFinite { index: 4 }));
    }

    #[test]
    fn boundary_ordering_round_trips() {
        let g = Grid2D::new(0.0, 4.0, 0.0, 3.0, 5, 4).unwrap();
        let nodes: Vec<_> = g.boundary_nodes().collect();
        assert_eq!(nodes.len(), g.boundary_len());
        for (slot, (i, j)) in nodes.iter().enumerate() {
            assert_eq!(g.boundary_slot(*i, *j), Some(slot));
        }
        assert_eq!(g.boundary_slot(2, 1), None);
    }

    fn poly3(c: &[f64; 10], p: Point) -> f64 {
        let (x, y) = (p.x, p.y);
        c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
            + c[6] * x * x * x + c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y
    }

    fn poly3_laplacian(c: &[f64; 10], p: Point) -> f64 {
        2.0 * c[3] + 2.0 * c[5] + 6.0 * c[6] * p.x + 2.0 * c[7] * p.y + 2.0 * c[8] * p.x
            + 6.0 * c[9] * p.y
    }

    proptest! {
        #[test]
        fn laplacian_exact_on_cubics(
            c in prop::array::uniform10(-2.0f64..2.0),
            i in 1usize..32,
            j in 1usize..32,
        ) {
            let g = Grid2D::centered_square(1.0, 33).unwrap();
            let f = ScalarField::from_fn(g, |p| poly3(&c, p)).unwrap();
            let lap = f.discrete_laplacian(i, j).unwrap();
            prop_assert!((lap - poly3_laplacian(&c, g.node(i, j))).abs() < 1e-9);
        }

        #[test]
        fn stencils_are_linear(
            a in -3.0f64..3.0, b in -3.0f64..3.0,
            i in 1usize..16, j in 1usize..16,
            seed in 0u64..1000,
        ) {
            let g = Grid2D::centered_square(1.0, 17).unwrap();
            let s = seed as f64;
            let f = ScalarField::from_fn(g, |p| libm::sin(3.0 * p.x + s) * p.y).unwrap();
            let k = ScalarField::from_fn(g, |p| libm::cos(p.x * p.y + s)).unwrap();
            let comb = f.combine(a, &k, b).unwrap();
            let l = comb.discrete_laplacian(i, j).unwrap();
            let le = a * f.discrete_laplacian(i, j).unwrap() + b * k.discrete_laplacian(i, j).unwrap();
            prop_assert!((l - le).abs() <= 1e-9 * (1.0 + le.abs()));
            let d = comb.gradient_central(i, j).unwrap();
            let df = f.gradient_central(i, j).unwrap();
            let dk = k.gradient_central(i, j).unwrap();
            prop_assert!((d.x - (a * df.x + b * dk.x)).abs() < 1e-10);
            prop_assert!((d.y - (a * df.y + b * dk.y)).abs() < 1e-10);
        }

        #[test]
        fn interpolation_hits_nodes_exactly(i in 0usize..17, j in 0usize..17, seed in 0u64..100) {
            let g = Grid2D::new(-0.7, 1.3, 0.1, 2.1, 17, 17).unwrap();
            let s = seed as f64;
            let f = ScalarField::from_fn(g, |p| libm::sin(p.x * 5.0 + s) + p.y).unwrap();
            prop_assert_eq!(f.interpolate(g.node(i, j)).unwrap(), f.get(i, j));
        }
    }
}
