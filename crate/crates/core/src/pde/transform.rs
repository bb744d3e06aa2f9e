//! Cosine (Neumann) transform on cell-centred grids.
//!
//! A field sampled at `x_i = (i + ½)Lx/Nx` is written as
//! `f = Σ c_pq cos(pπx/Lx) cos(qπy/Ly)`; [`CosineTransform::forward`] returns
//! the `c_pq` and [`CosineTransform::inverse`] rebuilds the samples.

use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};

pub struct CosineTransform {
    nx: usize,
    ny: usize,
    px: Arc<dyn TransformType2And3<f64>>,
    py: Arc<dyn TransformType2And3<f64>>,
    scratch: Vec<f64>,
    column: Vec<f64>,
}

impl std::fmt::Debug for CosineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CosineTransform").field("nx", &self.nx).field("ny", &self.ny).finish()
    }
}

impl Clone for CosineTransform {
    fn clone(&self) -> Self {
        Self::new(self.nx, self.ny)
    }
}

impl CosineTransform {
    /// `ny = 1` gives the 1D transform.
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = DctPlanner::new();
        let px = planner.plan_dct2(nx);
        let py = planner.plan_dct2(ny.max(1));
        let len = px.get_scratch_len().max(py.get_scratch_len());
        Self {
            nx,
            ny: ny.max(1),
            px,
            py,
            scratch: vec![0.0; len],
            column: vec![0.0; ny.max(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Samples → coefficients, in place (row-major, `x` fastest).
    pub fn forward(&mut self, data: &mut [f64]) {
        assert_eq!(data.len(), self.len());
        for row in data.chunks_exact_mut(self.nx) {
            self.px.process_dct2_with_scratch(row, &mut self.scratch);
            let s = 2.0 / self.nx as f64;
            row.iter_mut().for_each(|v| *v *= s);
            row[0] *= 0.5;
        }
        if self.ny > 1 {
            let s = 2.0 / self.ny as f64;
            for i in 0..self.nx {
                for j in 0..self.ny {
                    self.column[j] = data[j * self.nx + i];
                }
                self.py.process_dct2_with_scratch(&mut self.column, &mut self.scratch);
                for j in 0..self.ny {
                    data[j * self.nx + i] = self.column[j] * if j == 0 { 0.5 * s } else { s };
                }
            }
        }
    }

    /// Coefficients → samples, in place.
    pub fn inverse(&mut self, data: &mut [f64]) {
        assert_eq!(data.len(), self.len());
        if self.ny > 1 {
            for i in 0..self.nx {
                for j in 0..self.ny {
                    self.column[j] = data[j * self.nx + i];
                }
                self.column[0] *= 2.0;
                self.py.process_dct3_with_scratch(&mut self.column, &mut self.scratch);
                for j in 0..self.ny {
                    data[j * self.nx + i] = self.column[j];
                }
            }
        }
        for row in data.chunks_exact_mut(self.nx) {
            row[0] *= 2.0;
            self.px.process_dct3_with_scratch(row, &mut self.scratch);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_is_recovered() {
        let (nx, ny) = (16, 12);
        let (lx, ly) = (2.0, 3.0);
        let mut f = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let x = (i as f64 + 0.5) * lx / nx as f64;
                let y = (j as f64 + 0.5) * ly / ny as f64;
                f[j * nx + i] = 0.7 + 0.3 * (3.0 * PI * x / lx).cos() * (2.0 * PI * y / ly).cos();
            }
        }
        let orig = f.clone();
        let mut t = CosineTransform::new(nx, ny);
        t.forward(&mut f);
        for (k, c) in f.iter().enumerate() {
            let expect = match k {
                0 => 0.7,
                k if k == 2 * nx + 3 => 0.3,
                _ => 0.0,
            };
            assert!((c - expect).abs() < 1e-13, "{k}: {c}");
        }
        t.inverse(&mut f);
        for (a, b) in f.iter().zip(&orig) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn one_dimensional_round_trip() {
        let mut f: Vec<f64> = (0..32).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let orig = f.clone();
        let mut t = CosineTransform::new(32, 1);
        t.forward(&mut f);
        t.inverse(&mut f);
        for (a, b) in f.iter().zip(&orig) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
