//! Minimal 3D FFT on the node-major grid layout, built on rustfft.
//!
//! Forward transforms are unnormalized; the inverse carries the 1/N factor,
//! so `inverse(forward(x)) == x` up to roundoff.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::domain::Grid;

pub(crate) struct Fft3 {
    n: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(grid: Grid) -> Self {
        let n = grid.dims();
        let mut planner = FftPlanner::new();
        let fwd = [
            planner.plan_fft_forward(n[0]),
            planner.plan_fft_forward(n[1]),
            planner.plan_fft_forward(n[2]),
        ];
        let inv = [
            planner.plan_fft_inverse(n[0]),
            planner.plan_fft_inverse(n[1]),
            planner.plan_fft_inverse(n[2]),
        ];
        Self { n, fwd, inv }
    }

    fn transform_axis(&self, data: &mut [Complex64], axis: usize, forward: bool) {
        let [n0, n1, n2] = self.n;
        let plan = if forward {
            &self.fwd[axis]
        } else {
            &self.inv[axis]
        };
        let mut scratch = vec![Complex64::ZERO; plan.get_inplace_scratch_len()];
        match axis {
            // axis 0 lines are contiguous; rustfft batches over chunks.
            0 => plan.process_with_scratch(data, &mut scratch),
            1 => {
                let mut line = vec![Complex64::ZERO; n1];
                for i2 in 0..n2 {
                    for i0 in 0..n0 {
                        let base = i0 + n0 * n1 * i2;
                        for i1 in 0..n1 {
                            line[i1] = data[base + n0 * i1];
                        }
                        plan.process_with_scratch(&mut line, &mut scratch);
                        for i1 in 0..n1 {
                            data[base + n0 * i1] = line[i1];
                        }
                    }
                }
            }
            2 => {
                let stride = n0 * n1;
                let mut line = vec![Complex64::ZERO; n2];
                for base in 0..stride {
                    for i2 in 0..n2 {
                        line[i2] = data[base + stride * i2];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for i2 in 0..n2 {
                        data[base + stride * i2] = line[i2];
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n[0] * self.n[1] * self.n[2]);
        for axis in 0..3 {
            self.transform_axis(data, axis, true);
        }
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        for axis in 0..3 {
            self.transform_axis(data, axis, false);
        }
        let scale = 1.0 / (self.n[0] * self.n[1] * self.n[2]) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Grid;

    #[test]
    fn roundtrip_and_plane_wave_bin() {
        let grid = Grid::new([4, 6, 8]).unwrap();
        let fft = Fft3::new(grid);
        let tau = std::f64::consts::TAU;
        // e^{2πi(1·u0 + 2·u1 - 3·u2)} should land in bin (1, 2, -3 mod 8).
        let mut data: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let u = grid.fractional(i);
                Complex64::from_polar(1.0, tau * (u[0] + 2.0 * u[1] - 3.0 * u[2]))
            })
            .collect();
        let orig = data.clone();
        fft.forward(&mut data);
        let hot = grid.index([1, 2, 5]);
        for (idx, v) in data.iter().enumerate() {
            let expect = if idx == hot { grid.len() as f64 } else { 0.0 };
            assert!(
                (v - Complex64::new(expect, 0.0)).norm() < 1e-9,
                "bin {idx} = {v}, expected {expect}"
            );
        }
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
