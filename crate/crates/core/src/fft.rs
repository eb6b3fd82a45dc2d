//! Line-oriented transforms over a cubic z-fastest array.
//!
//! Every 3D operation in the crate (FFTs, shears, per-axis phase ramps) is
//! expressed as "apply a closure to each line along one axis". Lines are
//! processed in parallel; each line is independent, so results do not depend
//! on the thread count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Cached forward/inverse plans for one line length.
#[derive(Clone)]
pub struct LinePlans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

pub fn plans(n: usize) -> LinePlans {
    static CACHE: OnceLock<Mutex<HashMap<usize, LinePlans>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            LinePlans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            }
        })
        .clone()
}

/// Flat index of `(ix, iy, iz)` in z-fastest layout.
#[inline]
pub fn flat(n: usize, ix: usize, iy: usize, iz: usize) -> usize {
    (ix * n + iy) * n + iz
}

/// Calls `f(a, b, line)` for every line along `axis` (0 = x, 1 = y, 2 = z),
/// where `(a, b)` are the indices of the two remaining axes in increasing
/// axis order.
pub fn for_each_line<F>(data: &mut [Complex64], n: usize, axis: usize, f: F)
where
    F: Fn(usize, usize, &mut [Complex64]) + Sync,
{
    assert_eq!(data.len(), n * n * n);
    if axis == 2 {
        data.par_chunks_mut(n).enumerate().for_each(|(c, line)| {
            f(c / n, c % n, line);
        });
        return;
    }
    // Gather strided lines into a line-major buffer, transform, scatter back.
    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    {
        let src: &[Complex64] = data;
        lines.par_chunks_mut(n).enumerate().for_each(|(c, line)| {
            let (a, b) = (c / n, c % n);
            for (i, v) in line.iter_mut().enumerate() {
                *v = src[line_index(n, axis, a, b, i)];
            }
            f(a, b, line);
        });
    }
    let lines_ref = &lines;
    data.par_chunks_mut(n * n).enumerate().for_each(|(ix, slab)| {
        for iy in 0..n {
            for iz in 0..n {
                let (c, i) = match axis {
                    0 => (iy * n + iz, ix),
                    _ => (ix * n + iz, iy),
                };
                slab[iy * n + iz] = lines_ref[c * n + i];
            }
        }
    });
}

#[inline]
fn line_index(n: usize, axis: usize, a: usize, b: usize, i: usize) -> usize {
    match axis {
        0 => flat(n, i, a, b),
        1 => flat(n, a, i, b),
        _ => flat(n, a, b, i),
    }
}

/// In-place unnormalized FFT of every line along `axis`.
pub fn fft_axis(data: &mut [Complex64], n: usize, axis: usize, inverse: bool) {
    let p = plans(n);
    let plan = if inverse { p.inverse } else { p.forward };
    for_each_line(data, n, axis, |_, _, line| plan.process(line));
}

/// Unitary 3D transform (forward uses `e^{-i k x}`).
pub fn fft3(data: &mut [Complex64], n: usize, inverse: bool) {
    for axis in 0..3 {
        fft_axis(data, n, axis, inverse);
    }
    let scale = 1.0 / ((n * n * n) as f64).sqrt();
    data.par_iter_mut().for_each(|v| *v *= scale);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_visitor_reaches_every_point_once_per_axis() {
        let n = 6;
        for axis in 0..3 {
            let mut data: Vec<Complex64> = (0..n * n * n)
                .map(|i| Complex64::new(i as f64, 0.0))
                .collect();
            for_each_line(&mut data, n, axis, |_, _, line| {
                for v in line.iter_mut() {
                    v.im += 1.0;
                }
            });
            for (i, v) in data.iter().enumerate() {
                assert_eq!(v.re, i as f64);
                assert_eq!(v.im, 1.0);
            }
        }
    }

    #[test]
    fn line_coordinates_follow_axis_order() {
        let n = 4;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n * n];
        for_each_line(&mut data, n, 1, |a, b, line| {
            for (i, v) in line.iter_mut().enumerate() {
                *v = Complex64::new((a * 100 + i * 10 + b) as f64, 0.0);
            }
        });
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let v = data[flat(n, ix, iy, iz)].re;
                    assert_eq!(v, (ix * 100 + iy * 10 + iz) as f64);
                }
            }
        }
    }
}
