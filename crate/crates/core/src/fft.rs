//! Multidimensional complex FFT over a [`Grid`], one axis at a time.
//!
//! Each axis pass gathers the strided lines into a contiguous buffer, runs
//! the 1D plan over every line with a per-worker scratch buffer, and gathers
//! the result back. Lines are independent, so results do not depend on the
//! number of worker threads.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::Fft;

use crate::grid::Grid;

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Physical to spectral, normalized by `1/n^d`.
    Forward,
    /// Spectral to physical, unnormalized.
    Inverse,
}

pub(crate) fn transform(grid: &Grid, data: &mut [Complex64], direction: Direction) {
    debug_assert_eq!(data.len(), grid.len());
    let (fwd, inv) = grid.plans();
    let plan = match direction {
        Direction::Forward => fwd,
        Direction::Inverse => inv,
    };
    let n = grid.n();
    let dim = grid.dim();
    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    for axis in 0..dim {
        transform_axis(plan.as_ref(), data, &mut lines, n, dim, axis);
    }
    if direction == Direction::Forward {
        let norm = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|c| *c *= norm);
    }
}

fn transform_axis(
    plan: &dyn Fft<f64>,
    data: &mut [Complex64],
    lines: &mut [Complex64],
    n: usize,
    dim: usize,
    axis: usize,
) {
    // Element (outer, k, inner) lives at data[(outer * n + k) * inner_len + inner].
    let inner_len = n.pow((dim - 1 - axis) as u32);

    if inner_len == 1 {
        data.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()],
            |scratch, line| plan.process_with_scratch(line, scratch),
        );
        return;
    }

    {
        let src: &[Complex64] = data;
        lines.par_chunks_mut(n).enumerate().for_each(|(line_id, line)| {
            let outer = line_id / inner_len;
            let inner = line_id % inner_len;
            let base = outer * n * inner_len + inner;
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = src[base + k * inner_len];
            }
        });
    }

    lines.par_chunks_mut(n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()],
        |scratch, line| plan.process_with_scratch(line, scratch),
    );

    let src: &[Complex64] = lines;
    data.par_iter_mut().enumerate().for_each(|(flat, slot)| {
        let inner = flat % inner_len;
        let rest = flat / inner_len;
        let k = rest % n;
        let outer = rest / n;
        *slot = src[(outer * inner_len + inner) * n + k];
    });
}
