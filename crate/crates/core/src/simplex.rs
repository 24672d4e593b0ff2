//! Box-constrained Nelder-Mead for the equilibrium model's local polish.
//!
//! Trial points are projected onto the box before evaluation, so the
//! objective is never called outside it. Coordinates with equal lower and
//! upper bounds are held fixed and the simplex lives in the remaining ones.

pub struct Outcome {
    pub x: Vec<f64>,
    pub value: f64,
}

pub struct Settings {
    /// Stop when the spread of simplex values falls below
    /// `tol * (1 + |best|)` and the simplex is small relative to the box.
    pub tol: f64,
    pub max_evals: usize,
    /// Initial simplex edge as a fraction of each free coordinate's range.
    pub step: f64,
}

/// Minimizes `f` over the box `[lo, hi]` starting from `x0`.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], lo: &[f64], hi: &[f64], s: &Settings) -> Outcome {
    let n = x0.len();
    let free: Vec<usize> = (0..n).filter(|&i| hi[i] > lo[i]).collect();
    let project = |x: &mut [f64]| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    let mut start = x0.to_vec();
    project(&mut start);
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if free.is_empty() {
        let value = eval(&start);
        return Outcome { x: start, value };
    }

    let m = free.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    pts.push(start.clone());
    for &i in &free {
        let width = hi[i] - lo[i];
        let step = s.step * width;
        let mut p = start.clone();
        p[i] = if p[i] + step <= hi[i] { p[i] + step } else { p[i] - step };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();

    let size_tol = 1e-10;
    loop {
        let mut order: Vec<usize> = (0..=m).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = order.iter().map(|&k| pts[k].clone()).collect();
        vals = order.iter().map(|&k| vals[k]).collect();

        let spread = vals[m] - vals[0];
        let size = free
            .iter()
            .map(|&i| {
                let w = hi[i] - lo[i];
                pts.iter().map(|p| (p[i] - pts[0][i]).abs() / w).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let flat = spread.is_finite() && spread <= s.tol * (1.0 + vals[0].abs());
        if (flat && size <= 1e-6) || size <= size_tol || evals.get() >= s.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in &pts[..m] {
            for i in 0..n {
                centroid[i] += p[i] / m as f64;
            }
        }
        let along = |t: f64| {
            let mut x: Vec<f64> = (0..n).map(|i| centroid[i] + t * (pts[m][i] - centroid[i])).collect();
            project(&mut x);
            x
        };

        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe);
            if fe < fr {
                pts[m] = xe;
                vals[m] = fe;
            } else {
                pts[m] = xr;
                vals[m] = fr;
            }
            continue;
        }
        if fr < vals[m - 1] {
            pts[m] = xr;
            vals[m] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[m] {
            let x = along(-0.5);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x);
            (x, v)
        };
        if fc < vals[m].min(fr) {
            pts[m] = xc;
            vals[m] = fc;
            continue;
        }
        // shrink toward the best vertex
        let (head, tail) = pts.split_at_mut(1);
        for (p, v) in tail.iter_mut().zip(vals[1..].iter_mut()) {
            for (x, b) in p.iter_mut().zip(&head[0]) {
                *x = b + 0.5 * (*x - b);
            }
            *v = eval(p);
        }
    }
    let best = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
        .unwrap_or(0);
    Outcome { x: pts[best].clone(), value: vals[best] }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings { tol: 1e-12, max_evals: 20_000, step: 0.05 }
    }

    #[test]
    fn finds_interior_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 0.5).powi(2);
        let o = minimize(f, &[3.0, 3.0], &[-5.0, -5.0], &[5.0, 5.0], &settings());
        assert!((o.x[0] - 1.0).abs() < 1e-5 && (o.x[1] + 0.5).abs() < 1e-5, "{:?}", o.x);
    }

    #[test]
    fn stops_on_active_bound() {
        let f = |x: &[f64]| (x[0] + 2.0).powi(2) + (x[1] - 0.3).powi(2);
        let o = minimize(f, &[0.5, 0.5], &[0.0, 0.0], &[1.0, 1.0], &settings());
        assert_eq!(o.x[0], 0.0);
        assert!((o.x[1] - 0.3).abs() < 1e-5);
    }

    #[test]
    fn pinned_coordinates_do_not_move() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] - 1.0).powi(2);
        let o = minimize(f, &[0.0, 0.25], &[-3.0, 0.25], &[3.0, 0.25], &settings());
        assert_eq!(o.x[1], 0.25);
        assert!((o.x[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let o = minimize(f, &[-1.2, 1.0], &[-2.0, -2.0], &[2.0, 2.0], &settings());
        assert!((o.x[0] - 1.0).abs() < 1e-4 && (o.x[1] - 1.0).abs() < 1e-4, "{:?}", o.x);
    }
}
