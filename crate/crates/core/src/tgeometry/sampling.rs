//! Grid sampling of balls, bisectors and triangle-equality regions on the 2-simplex.

use rayon::prelude::*;
use serde::Serialize;

use super::t_hilbert_cosimplex;
use crate::error::{Error, Result};
use crate::temparam::{constrained_link, ensure_compatible, CoSimplexPoint};

/// Default number of cells along each side of the grid.
pub const DEFAULT_RESOLUTION: usize = 400;

/// One sampled cell: plotting coordinates and a per-cell value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Cell centres `((i+½)/n, (j+½)/n)` of a square grid that lie strictly inside the
/// 2-simplex `x + y < 1`, read as the first two co-density coordinates.
#[derive(Debug, Clone)]
pub struct SimplexGrid {
    n: usize,
    cells: Vec<(usize, usize)>,
    index: Vec<Option<usize>>,
}

impl SimplexGrid {
    pub fn new(n: usize) -> Self {
        let mut cells = Vec::new();
        let mut index = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                if i + j + 1 < n {
                    index[i * n + j] = Some(cells.len());
                    cells.push((i, j));
                }
            }
        }
        SimplexGrid { n, cells, index }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Side length of a cell.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Co-density of cell `k`.
    pub fn probability(&self, k: usize) -> [f64; 3] {
        let (i, j) = self.cells[k];
        let h = self.spacing();
        let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
        [x, y, 1.0 - x - y]
    }

    /// Indices of the 4-neighbours of cell `k` that are inside the grid.
    pub fn neighbours(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.cells[k];
        let n = self.n as isize;
        [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .filter_map(move |(di, dj)| {
                let (a, b) = (i as isize + di, j as isize + dj);
                if a < 0 || b < 0 || a >= n || b >= n {
                    None
                } else {
                    self.index[(a * n + b) as usize]
                }
            })
    }

    fn lift(&self, k: usize, like: &CoSimplexPoint) -> Result<CoSimplexPoint> {
        CoSimplexPoint::from_probability(&self.probability(k), like.temp())
    }
}

fn require_triangle(op: &'static str, p: &CoSimplexPoint) -> Result<()> {
    if p.dim() == 3 {
        Ok(())
    } else {
        Err(Error::Dimension {
            op,
            left: 3,
            right: p.dim(),
        })
    }
}

/// Which picture of a ball to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallKind {
    /// The co-simplex ball of the tempered Hilbert distance, in co-density coordinates.
    HilbertDomain,
    /// The same ball carried to the constrained surface, in `(θ̌_1, θ̌_2)` coordinates.
    NhSurface,
}

fn plot_coords(p: &CoSimplexPoint, kind: BallKind) -> (f64, f64) {
    match kind {
        BallKind::HilbertDomain => {
            let c = p.codensity();
            (c[0], c[1])
        }
        BallKind::NhSurface => {
            let th = constrained_link(p).theta_check;
            (th[0], th[1])
        }
    }
}

/// Cells within tempered Hilbert distance `radius` of `center`; the centre itself is
/// always the first entry. Values are distances to the centre.
pub fn sample_ball(
    center: &CoSimplexPoint,
    radius: f64,
    grid_resolution: usize,
    kind: BallKind,
) -> Result<Vec<GridCell>> {
    ball_cells(center, grid_resolution, kind, 0.0, |dist| {
        (dist <= radius).then_some(dist)
    })
}

/// Nested balls: each cell is labelled with the smallest radius in `radii` whose ball
/// contains it (cells outside every ball are dropped). The centre comes first,
/// labelled with the smallest radius.
pub fn sample_balls(
    center: &CoSimplexPoint,
    radii: &[f64],
    grid_resolution: usize,
    kind: BallKind,
) -> Result<Vec<GridCell>> {
    let mut sorted: Vec<f64> = radii.iter().cloned().filter(|r| *r >= 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    let Some(&smallest) = sorted.first() else {
        return Err(Error::domain("sample_balls", "no nonnegative radius"));
    };
    ball_cells(center, grid_resolution, kind, smallest, |dist| {
        sorted.iter().find(|&&r| dist <= r).copied()
    })
}

fn ball_cells(
    center: &CoSimplexPoint,
    grid_resolution: usize,
    kind: BallKind,
    center_value: f64,
    label: impl Fn(f64) -> Option<f64> + Sync,
) -> Result<Vec<GridCell>> {
    require_triangle("sample_ball", center)?;
    let grid = SimplexGrid::new(grid_resolution);
    let (cx, cy) = plot_coords(center, kind);
    let mut out = vec![GridCell {
        x: cx,
        y: cy,
        value: center_value,
    }];
    let cells: Result<Vec<Option<GridCell>>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.lift(k, center)?;
            let dist = t_hilbert_cosimplex(center, &x)?;
            if dist == 0.0 {
                return Ok(None);
            }
            Ok(label(dist).map(|value| {
                let (x, y) = plot_coords(&x, kind);
                GridCell { x, y, value }
            }))
        })
        .collect();
    out.extend(cells?.into_iter().flatten());
    Ok(out)
}

/// Per-cell classification of the grid around two sites.
#[derive(Debug, Clone)]
pub struct BisectorSample {
    /// Every grid cell; `value` is `1` on the bisector, `2` in the triangle-equality
    /// region, `3` in both and `0` elsewhere.
    pub cells: Vec<GridCell>,
}

pub const ON_BISECTOR: u8 = 1;
pub const IN_EQUALITY_REGION: u8 = 2;

impl BisectorSample {
    fn having(&self, flag: u8) -> Vec<GridCell> {
        self.cells
            .iter()
            .filter(|c| (c.value as u8) & flag != 0)
            .copied()
            .collect()
    }

    pub fn bisector(&self) -> Vec<GridCell> {
        self.having(ON_BISECTOR)
    }

    pub fn equality_region(&self) -> Vec<GridCell> {
        self.having(IN_EQUALITY_REGION)
    }
}

/// Samples the Voronoi bisector `{x : ρ(p, x) = ρ(q, x)}` and the t-triangle-equality
/// region `{x : ρ(p, x) ⊕_t ρ(x, q) = ρ(p, q)}` of the tempered Hilbert distance.
///
/// A cell is on the bisector when `ρ(p, ·) − ρ(q, ·)` vanishes there or changes sign
/// towards a 4-neighbour. A cell is in the equality region when the excess
/// `ρ(p, x) ⊕_t ρ(x, q) − ρ(p, q)` is at round-off level or within 1.5 times its
/// largest change to a neighbour, i.e. within about one cell of the exact region.
pub fn sample_bisector(
    p: &CoSimplexPoint,
    q: &CoSimplexPoint,
    grid_resolution: usize,
) -> Result<BisectorSample> {
    ensure_compatible("sample_bisector", p, q)?;
    require_triangle("sample_bisector", p)?;
    if p == q {
        return Err(Error::domain("sample_bisector", "sites coincide"));
    }
    let temp = p.temp();
    let grid = SimplexGrid::new(grid_resolution);
    let pq = t_hilbert_cosimplex(p, q)?;
    let evals: Result<Vec<(f64, f64)>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.lift(k, p)?;
            let (a, b) = (t_hilbert_cosimplex(p, &x)?, t_hilbert_cosimplex(q, &x)?);
            Ok((a - b, temp.add(a, b) - pq))
        })
        .collect();
    let evals = evals?;
    let round_off = 1e-9 * pq.max(1.0);
    let cells = (0..grid.len())
        .map(|k| {
            let (g, e) = evals[k];
            let mut code = 0u8;
            if g == 0.0 || grid.neighbours(k).any(|n| g * evals[n].0 < 0.0) {
                code |= ON_BISECTOR;
            }
            let slope = grid
                .neighbours(k)
                .map(|n| (e - evals[n].1).abs())
                .fold(0.0, f64::max);
            if e <= round_off || e <= 1.5 * slope {
                code |= IN_EQUALITY_REGION;
            }
            let [x, y, _] = grid.probability(k);
            GridCell {
                x,
                y,
                value: f64::from(code),
            }
        })
        .collect();
    Ok(BisectorSample { cells })
}
