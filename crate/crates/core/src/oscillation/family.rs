use serde::{Deserialize, Serialize};

use crate::field::{Ball, Grid};
use crate::{Error, Result};

/// Where the balls of a family must lie.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Ball(Ball),
    Rect { lo: [f64; 2], hi: [f64; 2] },
}

impl Region {
    fn contains_ball(&self, b: &Ball) -> bool {
        let eps = 1e-12 * b.radius;
        match self {
            Region::Ball(big) => {
                let d = ((b.center[0] - big.center[0]).powi(2) + (b.center[1] - big.center[1]).powi(2)).sqrt();
                d + b.radius <= big.radius + eps
            }
            Region::Rect { lo, hi } => (0..2).all(|k| b.center[k] - b.radius >= lo[k] - eps && b.center[k] + b.radius <= hi[k] + eps),
        }
    }

    fn anchor(&self) -> [f64; 2] {
        match self {
            Region::Ball(b) => b.center,
            Region::Rect { lo, hi } => [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])],
        }
    }

    fn half_extent(&self) -> [f64; 2] {
        match self {
            Region::Ball(b) => [b.radius; 2],
            Region::Rect { lo, hi } => [0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1])],
        }
    }

    fn contains_point(&self, x: [f64; 2]) -> bool {
        match self {
            Region::Ball(b) => b.contains(x),
            Region::Rect { lo, hi } => (0..2).all(|k| x[k] >= lo[k] && x[k] <= hi[k]),
        }
    }
}

/// Parameters of a [`BallFamily`] as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// Largest radius, as a fraction of the region's half width.
    #[serde(default = "default_top")]
    pub top_fraction: f64,
    /// Maximum number of dyadic levels (fewer if the `2h` cutoff is hit).
    #[serde(default = "default_levels")]
    pub max_levels: usize,
}

fn default_top() -> f64 {
    0.5
}
fn default_levels() -> usize {
    6
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec { top_fraction: default_top(), max_levels: default_levels() }
    }
}

/// Balls of radii `R 2^-k` (down to the `2h` cutoff) with centers on a lattice
/// of spacing `R 2^-k / 2` anchored at the region center, each contained in
/// the region.
#[derive(Debug, Clone, PartialEq)]
pub struct BallFamily {
    region: Region,
    radii: Vec<f64>,
    levels: Vec<Vec<Ball>>,
}

impl BallFamily {
    pub fn new(grid: &Grid, region: Region, top_radius: f64, max_levels: usize) -> Result<BallFamily> {
        let cutoff = 2.0 * grid.h;
        if top_radius < cutoff * (1.0 - 1e-12) {
            return Err(Error::BelowResolution { radius: top_radius, cutoff });
        }
        let mut radii = Vec::new();
        let mut levels = Vec::new();
        let anchor = region.anchor();
        let ext = region.half_extent();
        let mut r = top_radius;
        while levels.len() < max_levels.max(1) && r >= cutoff * (1.0 - 1e-12) {
            let step = 0.5 * r;
            let mi = ((ext[0] - r) / step).floor().max(0.0) as i64;
            let mj = ((ext[1] - r) / step).floor().max(0.0) as i64;
            let mut balls = Vec::new();
            for b in -mj..=mj {
                for a in -mi..=mi {
                    let ball = Ball { center: [anchor[0] + a as f64 * step, anchor[1] + b as f64 * step], radius: r };
                    if region.contains_ball(&ball) && !ball.member_cells(grid).is_empty() {
                        balls.push(ball);
                    }
                }
            }
            if balls.is_empty() {
                break;
            }
            radii.push(r);
            levels.push(balls);
            r *= 0.5;
        }
        if levels.is_empty() {
            return Err(Error::BallOutsideGrid);
        }
        Ok(BallFamily { region, radii, levels })
    }

    pub fn from_spec(grid: &Grid, region: Region, spec: &FamilySpec) -> Result<BallFamily> {
        let ext = region.half_extent();
        Self::new(grid, region, spec.top_fraction * ext[0].min(ext[1]), spec.max_levels)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Radii from coarse to fine.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn levels(&self) -> &[Vec<Ball>] {
        &self.levels
    }

    pub fn ball_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Cells whose centers lie in the region.
    pub fn region_cells(&self, g: &Grid) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..g.n {
            for i in 0..g.n {
                if self.region.contains_point(g.cell_center(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        let region = match self.region {
            Region::Ball(b) => format!("ball(c=({}, {}), r={})", b.center[0], b.center[1], b.radius),
            Region::Rect { lo, hi } => format!("rect([{}, {}] x [{}, {}])", lo[0], hi[0], lo[1], hi[1]),
        };
        format!("{region}; radii {:?}; {} balls", self.radii, self.ball_count())
    }
}
