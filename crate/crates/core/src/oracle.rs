//! Brute-force maximisers of `g(u) − ‖u − x‖² / 2λ`, written without any of
//! the closed forms or solvers in [`crate::prox`]. They are slow and exist to
//! check the fast operators.

use nalgebra::DMatrix;

use crate::linalg::Grid;

/// Maximise a concave scalar function on `[lo, hi]` by dense scan followed by
/// golden-section refinement. `−∞` values are allowed.
pub fn maximize_concave_1d(h: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const SCAN: usize = 20_000;
    let step = (hi - lo) / SCAN as f64;
    let mut best = lo;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..=SCAN {
        let u = lo + step * i as f64;
        let v = h(u);
        if v > best_val {
            best_val = v;
            best = u;
        }
    }
    let (mut a, mut b) = (best - step, best + step);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..300 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h(d);
        }
        if b - a < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    let golden = if fc >= fd { c } else { d };
    refine_smooth_maximum(&h, golden)
}

/// Value comparisons locate a smooth maximum only to about `√ε`. Near such a
/// point, bisect on the sign of the central difference (non-increasing for a
/// concave function) and keep the result unless it is measurably worse, which
/// happens when the maximum sits on a kink.
fn refine_smooth_maximum(h: &impl Fn(f64) -> f64, u0: f64) -> f64 {
    let scale = 1.0 + u0.abs();
    let d = 1e-5 * scale;
    let slope = |u: f64| h(u + d) - h(u - d);
    let (mut lo, mut hi) = (u0 - 1e-4 * scale, u0 + 1e-4 * scale);
    if !(slope(lo) > 0.0) || slope(hi) > 0.0 {
        return u0;
    }
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if slope(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let u = 0.5 * (lo + hi);
    let (hu, h0) = (h(u), h(u0));
    if hu >= h0 - 8.0 * f64::EPSILON * h0.abs().max(1.0) {
        u
    } else {
        u0
    }
}

/// Scalar prox by direct maximisation of the defining objective.
pub fn brute_force_prox_1d(g: impl Fn(f64) -> f64, x: f64, lambda: f64) -> f64 {
    let w = 2.0 * x.abs() + 10.0;
    maximize_concave_1d(|u| g(u) - (u - x) * (u - x) / (2.0 * lambda), -w, w)
}

/// Exact prox of `−θ‖Du‖₁` (anisotropic forward differences, replicate edge)
/// on a tiny image, by enumerating every sign/zero pattern of the differences.
///
/// For each pattern the restricted quadratic problem is solved by projection
/// onto the null space of the zeroed differences; the pattern of the true
/// minimiser reproduces it exactly, so the best candidate is the prox.
/// Cost is `3^m` with `m` the number of differences; keep images at 2×2 or 2×3.
pub fn brute_force_tv_prox(x: &[f64], rows: usize, cols: usize, theta: f64) -> Vec<f64> {
    let n = rows * cols;
    assert_eq!(x.len(), n);
    let mut diffs: Vec<(usize, usize)> = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            if c + 1 < cols {
                diffs.push((i, i + 1));
            }
            if r + 1 < rows {
                diffs.push((i, i + cols));
            }
        }
    }
    let m = diffs.len();
    assert!(
        m <= 10,
        "enumeration oracle is exponential in the number of differences"
    );
    let objective = |u: &[f64]| -> f64 {
        let fit: f64 = u.iter().zip(x).map(|(a, b)| 0.5 * (a - b) * (a - b)).sum();
        let tv: f64 = diffs.iter().map(|&(i, j)| (u[j] - u[i]).abs()).sum();
        fit + theta * tv
    };
    let mut best = x.to_vec();
    let mut best_val = objective(x);
    let total = 3usize.pow(m as u32);
    for code in 0..total {
        let mut rest = code;
        let mut centre = x.to_vec();
        let mut zero_rows: Vec<usize> = Vec::new();
        for (k, &(i, j)) in diffs.iter().enumerate() {
            let digit = rest % 3;
            rest /= 3;
            match digit {
                0 => zero_rows.push(k),
                s => {
                    let sign = if s == 1 { 1.0 } else { -1.0 };
                    // subtract θ Dᵀ s
                    centre[j] -= theta * sign;
                    centre[i] += theta * sign;
                }
            }
        }
        let candidate = if zero_rows.is_empty() {
            centre
        } else {
            let mut dz = DMatrix::<f64>::zeros(zero_rows.len(), n);
            for (row, &k) in zero_rows.iter().enumerate() {
                let (i, j) = diffs[k];
                dz[(row, i)] = -1.0;
                dz[(row, j)] = 1.0;
            }
            let c = nalgebra::DVector::from_vec(centre);
            let gram = &dz * dz.transpose();
            let pinv = gram.pseudo_inverse(1e-12).expect("pseudo-inverse");
            let u = &c - dz.transpose() * (pinv * (&dz * &c));
            u.iter().copied().collect()
        };
        let v = objective(&candidate);
        if v < best_val {
            best_val = v;
            best = candidate;
        }
    }
    best
}

/// Minimise `Σ wᵢ/2 ‖u − cᵢ‖² + α‖u‖_*` over matrices without computing any
/// singular value decomposition: gradient descent on the factorisation
/// `u = ABᵀ` with `‖u‖_* = min (‖A‖² + ‖B‖²)/2`.
pub fn brute_force_nuclear_prox(anchors: &[(f64, &Grid)], alpha: f64) -> Grid {
    assert!(!anchors.is_empty());
    let (rows, cols) = anchors[0].1.shape();
    let total_w: f64 = anchors.iter().map(|a| a.0).sum();
    let mut centre = DMatrix::<f64>::zeros(rows, cols);
    for (w, c) in anchors {
        centre += c.to_dmatrix() * (*w / total_w);
    }
    let (mut a, mut b) = if rows >= cols {
        (centre.clone(), DMatrix::<f64>::identity(cols, cols))
    } else {
        (DMatrix::<f64>::identity(rows, rows), centre.transpose())
    };
    // Σ wᵢ/2‖u − cᵢ‖² = W/2 ‖u − c̄‖² + const
    let energy = |a: &DMatrix<f64>, b: &DMatrix<f64>| -> f64 {
        let u = a * b.transpose();
        0.5 * total_w * (&u - &centre).norm_squared()
            + 0.5 * alpha * (a.norm_squared() + b.norm_squared())
    };
    let mut step = 0.1 / total_w.max(alpha).max(1.0);
    let mut e = energy(&a, &b);
    for _ in 0..400_000 {
        let g = (&a * b.transpose() - &centre) * total_w;
        let ga = &g * &b + &a * alpha;
        let gb = g.transpose() * &a + &b * alpha;
        let gnorm = ga.norm_squared() + gb.norm_squared();
        if gnorm < 1e-26 {
            break;
        }
        loop {
            let na = &a - &ga * step;
            let nb = &b - &gb * step;
            let ne = energy(&na, &nb);
            if ne <= e - 0.5 * step * gnorm {
                a = na;
                b = nb;
                e = ne;
                step *= 1.2;
                break;
            }
            step *= 0.5;
            if step < 1e-300 {
                return Grid::from_dmatrix(&(&a * b.transpose()));
            }
        }
    }
    Grid::from_dmatrix(&(&a * b.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_oracle_finds_known_maximiser() {
        let u = brute_force_prox_1d(|u| -(u - 2.0) * (u - 2.0), 0.0, 1.0);
        // maximiser of −(u−2)² − u²/2 is u = 4/3
        assert!((u - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn scalar_oracle_handles_indicator() {
        let ind = |u: f64| {
            if (-1.0..=1.0).contains(&u) {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        };
        let u = brute_force_prox_1d(ind, 3.0, 0.5);
        assert!((u - 1.0).abs() < 1e-10, "{u}");
        assert!((brute_force_prox_1d(ind, 0.25, 0.5) - 0.25).abs() < 1e-10);
    }

    #[test]
    fn tv_oracle_on_constant_image() {
        let u = brute_force_tv_prox(&[1.0; 4], 2, 2, 0.3);
        assert!(u.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn nuclear_oracle_on_diagonal() {
        let x = Grid::diagonal(&[3.0, 1.0, 0.2]);
        let u = brute_force_nuclear_prox(&[(1.0, &x)], 0.5);
        let want = Grid::diagonal(&[2.5, 0.5, 0.0]);
        for (a, b) in u.as_slice().iter().zip(want.as_slice()) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }
}
