//! Exact Euclidean distance transform on a binary obstacle grid.
//!
//! Two-pass algorithm: a columnwise squared distance to the nearest obstacle
//! row, then a rowwise lower-envelope-of-parabolas pass. Exact for arbitrary
//! grids, linear in the number of cells.

/// 1D squared distance transform under the squared Euclidean metric.
///
/// `f` holds per-cell base costs (0 at obstacles, `INFINITY` elsewhere, or a
/// previous pass's output); `out[q] = min_p (q - p)^2 + f[p]`.
fn dt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut vertices = vec![0usize; n];
    let mut boundaries = vec![0.0f64; n + 1];
    let mut k = 0usize;
    let mut started = false;
    for q in 0..n {
        if f[q].is_infinite() {
            continue;
        }
        if !started {
            vertices[0] = q;
            boundaries[0] = f64::NEG_INFINITY;
            boundaries[1] = f64::INFINITY;
            started = true;
            continue;
        }
        let mut s;
        loop {
            let p = vertices[k];
            s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64))
                / (2.0 * (q as f64 - p as f64));
            if s <= boundaries[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        vertices[k] = q;
        boundaries[k] = s;
        boundaries[k + 1] = f64::INFINITY;
    }
    if !started {
        out.fill(f64::INFINITY);
        return;
    }
    let mut k = 0usize;
    for q in 0..n {
        while boundaries[k + 1] < q as f64 {
            k += 1;
        }
        let p = vertices[k];
        let d = q as f64 - p as f64;
        out[q] = d * d + f[p];
    }
}

/// Squared distance from every cell to the nearest obstacle cell
/// (center-to-center). Cells with no obstacle anywhere read `INFINITY`.
pub fn squared_edt(obstacles: &[bool], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(obstacles.len(), width * height, "grid size mismatch");
    let mut column_pass = vec![0.0f64; width * height];
    let mut f = vec![0.0f64; height];
    let mut out_col = vec![0.0f64; height];
    for col in 0..width {
        for row in 0..height {
            f[row] = if obstacles[row * width + col] {
                0.0
            } else {
                f64::INFINITY
            };
        }
        dt_1d(&f, &mut out_col);
        for row in 0..height {
            column_pass[row * width + col] = out_col[row];
        }
    }

    let mut result = vec![0.0f64; width * height];
    let mut out_row = vec![0.0f64; width];
    for row in 0..height {
        dt_1d(&column_pass[row * width..(row + 1) * width], &mut out_row);
        result[row * width..(row + 1) * width].copy_from_slice(&out_row);
    }
    result
}
