use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Line,
    Rectangle,
    /// Axisymmetric disc of radius `lengths[0]`.
    Radial,
}

/// Cell-centred grid. Data are stored row-major with `x` (or `r`) fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub geometry: Geometry,
    pub lengths: [f64; 2],
    pub n: [usize; 2],
}

impl Grid {
    pub fn line(length: f64, n: usize) -> Result<Self> {
        Self::checked(Geometry::Line, [length, 0.0], [n, 1])
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::checked(Geometry::Rectangle, [lx, ly], [nx, ny])
    }

    pub fn radial(r_max: f64, n: usize) -> Result<Self> {
        Self::checked(Geometry::Radial, [r_max, 0.0], [n, 1])
    }

    fn checked(geometry: Geometry, lengths: [f64; 2], n: [usize; 2]) -> Result<Self> {
        let g = Self { geometry, lengths, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let axes = if self.geometry == Geometry::Rectangle { 2 } else { 1 };
        for a in 0..axes {
            if self.n[a] < 16 || self.n[a] % 2 != 0 {
                return Err(Error::Grid(format!("resolution {} must be even and at least 16", self.n[a])));
            }
            if !(self.lengths[a] > 0.0 && self.lengths[a].is_finite()) {
                return Err(Error::Grid(format!("length {} must be positive", self.lengths[a])));
            }
        }
        if axes == 1 && self.n[1] != 1 {
            return Err(Error::Grid("1D grids have a single row".into()));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        if self.geometry == Geometry::Rectangle {
            2
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> [f64; 2] {
        [
            self.lengths[0] / self.n[0] as f64,
            if self.n[1] > 1 { self.lengths[1] / self.n[1] as f64 } else { 0.0 },
        ]
    }

    /// Cell-centre coordinate along `x` (or `r`).
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()[0]
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing()[1]
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n[0]).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.n[1]).map(|j| self.y(j)).collect()
    }

    /// Quadrature weights: cell areas (`2π r h` for the radial grid).
    pub fn weights(&self) -> Vec<f64> {
        let [hx, hy] = self.spacing();
        match self.geometry {
            Geometry::Line => vec![hx; self.len()],
            Geometry::Rectangle => vec![hx * hy; self.len()],
            Geometry::Radial => (0..self.n[0])
                .map(|i| 2.0 * std::f64::consts::PI * self.x(i) * hx)
                .collect(),
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights().iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Area (or length) of the domain.
    pub fn measure(&self) -> f64 {
        match self.geometry {
            Geometry::Line => self.lengths[0],
            Geometry::Rectangle => self.lengths[0] * self.lengths[1],
            Geometry::Radial => std::f64::consts::PI * self.lengths[0] * self.lengths[0],
        }
    }
}

/// Concentrations on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Field {
    pub fn constant(grid: &Grid, u: f64, v: f64) -> Self {
        Self {
            u: vec![u; grid.len()],
            v: vec![v; grid.len()],
        }
    }

    pub fn min(&self) -> f64 {
        self.u.iter().chain(&self.v).copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check(&self, grid: &Grid, t: f64) -> Result<()> {
        if self.u.len() != grid.len() || self.v.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if self.u.iter().chain(&self.v).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        let min = self.min();
        if min <= 0.0 {
            return Err(Error::Positivity { t, min });
        }
        Ok(())
    }

    /// Sup-norm distance over both species.
    pub fn sup_distance(&self, other: &Field) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
