//! Derivative-free minimizers used by the capacity searches: Nelder–Mead
//! simplex descent for the multi-dimensional problems, golden-section search
//! for one-dimensional ones, and bisection for root finding.

/// Stopping rules for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Converged once every vertex lies within this distance of the best one.
    pub x_tol: f64,
    pub max_evals: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Number of times the search is restarted around its best point.
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            x_tol: 1e-9,
            max_evals: 20_000,
            initial_step: 0.3,
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn simplex_search<F>(f: &F, x0: &[f64], step: f64, x_tol: f64, max_evals: usize) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
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

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    verts.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        verts.push(v);
    }
    let mut vals: Vec<f64> = verts.iter().map(|v| eval(v)).collect();
    let mut converged = false;

    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    loop {
        // order: best first
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        verts = idx.iter().map(|&i| verts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();

        let diameter = verts[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(verts[0].iter())
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < x_tol {
            converged = true;
            break;
        }
        if evals.get() >= max_evals {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &verts[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = n;
        let along = |coef: f64, out: &mut Vec<f64>, verts: &Vec<Vec<f64>>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&verts[worst]) {
                *o = c + coef * (c - w);
            }
        };

        along(REFLECT, &mut trial, &verts);
        let fr = eval(&trial);
        if fr < vals[0] {
            along(EXPAND, &mut trial2, &verts);
            let fe = eval(&trial2);
            if fe < fr {
                verts[worst].clone_from(&trial2);
                vals[worst] = fe;
            } else {
                verts[worst].clone_from(&trial);
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            verts[worst].clone_from(&trial);
            vals[worst] = fr;
            continue;
        }
        let (coef, target) = if fr < vals[worst] {
            (CONTRACT, fr)
        } else {
            (-CONTRACT, vals[worst])
        };
        along(coef, &mut trial2, &verts);
        let fc = eval(&trial2);
        if fc < target {
            verts[worst].clone_from(&trial2);
            vals[worst] = fc;
            continue;
        }
        let best = verts[0].clone();
        for i in 1..=n {
            for (x, b) in verts[i].iter_mut().zip(&best) {
                *x = b + SHRINK * (*x - b);
            }
            vals[i] = eval(&verts[i]);
        }
    }

    LocalMinimum {
        x: verts[0].clone(),
        value: vals[0],
        evals: evals.get(),
        converged,
    }
}

/// Minimizes `f` from `x0` by Nelder–Mead, restarting with a fresh simplex
/// around the incumbent until a restart stops improving it.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> LocalMinimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = simplex_search(&f, x0, opts.initial_step, opts.x_tol, opts.max_evals);
    let mut step = opts.initial_step;
    for _ in 0..opts.restarts {
        if best.evals >= opts.max_evals {
            break;
        }
        step *= 0.1;
        let budget = opts.max_evals - best.evals;
        let next = simplex_search(&f, &best.x, step.max(1e-6), opts.x_tol, budget);
        let improved = next.value < best.value - 1e-15;
        let evals = best.evals + next.evals;
        if next.value <= best.value {
            best = LocalMinimum { evals, ..next };
        } else {
            best.evals = evals;
        }
        if !improved {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum {
    pub x: f64,
    pub value: f64,
    pub evals: usize,
}

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search until the
/// bracket is narrower than `tol` or `max_evals` is spent. The endpoints are
/// also evaluated so boundary optima are not missed.
pub fn golden_max<F>(f: F, lo: f64, hi: f64, tol: f64, max_evals: usize) -> ScalarOptimum
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evals = 2;
    while (b - a).abs() > tol && evals < max_evals {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    let mut best = if fc >= fd {
        ScalarOptimum {
            x: c,
            value: fc,
            evals,
        }
    } else {
        ScalarOptimum {
            x: d,
            value: fd,
            evals,
        }
    };
    for x in [lo, hi] {
        let v = f(x);
        best.evals += 1;
        if v > best.value {
            best.x = x;
            best.value = v;
        }
    }
    best
}

/// Maximizes `f` on `[lo, hi]` by scanning `grid` points and refining the
/// best cell with golden-section search. For objectives that may not be
/// unimodal over the whole interval.
pub fn scan_then_golden_max<F>(f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> ScalarOptimum
where
    F: Fn(f64) -> f64,
{
    let h = (hi - lo) / grid as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=grid {
        let v = f(lo + h * i as f64);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = (lo + h * (best_i as f64 - 1.0)).max(lo);
    let b = (lo + h * (best_i as f64 + 1.0)).min(hi);
    let mut r = golden_max(&f, a, b, tol, 500);
    r.evals += grid + 1;
    if best_v > r.value {
        r.x = lo + h * best_i as f64;
        r.value = best_v;
    }
    r
}

/// Root of `g` on `[lo, hi]` by bisection. Returns `None` when `g(lo)` and
/// `g(hi)` have the same strict sign.
pub fn bisect<F>(g: F, lo: f64, hi: f64, tol: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut ga, gb) = (g(a), g(b));
    if ga == 0.0 {
        return Some(a);
    }
    if gb == 0.0 {
        return Some(b);
    }
    if ga.signum() == gb.signum() || ga.is_nan() || gb.is_nan() {
        return None;
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return Some(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(rosen, &[-1.2, 1.0], &SimplexOptions::default());
        assert!(r.converged);
        assert_abs_diff_eq!(r.x[0], 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(r.x[1], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn nelder_mead_quadratic_in_five_dims() {
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * (v - 0.1 * i as f64).powi(2))
                .sum()
        };
        let r = nelder_mead(f, &[1.0; 5], &SimplexOptions::default());
        for (i, v) in r.x.iter().enumerate() {
            assert_abs_diff_eq!(*v, 0.1 * i as f64, epsilon = 1e-8);
        }
    }

    #[test]
    fn nelder_mead_respects_budget() {
        let f = |x: &[f64]| x[0].powi(2) + x[1].powi(2);
        let opts = SimplexOptions {
            max_evals: 20,
            ..Default::default()
        };
        let r = nelder_mead(f, &[3.0, 4.0], &opts);
        assert!(r.evals <= 24);
        assert!(!r.converged);
    }

    #[test]
    fn golden_section_finds_interior_and_boundary_maxima() {
        let r = golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12, 1000);
        assert_abs_diff_eq!(r.x, 0.3, epsilon = 1e-7);
        let r = golden_max(|x| x, 0.0, 1.0, 1e-12, 1000);
        assert_eq!(r.x, 1.0);
    }

    #[test]
    fn scan_handles_two_humps() {
        let f =
            |x: f64| (-(x - 0.2).powi(2) / 0.001).exp() + 2.0 * (-(x - 0.8).powi(2) / 0.001).exp();
        let r = scan_then_golden_max(f, 0.0, 1.0, 100, 1e-12);
        assert_abs_diff_eq!(r.x, 0.8, epsilon = 1e-6);
    }

    #[test]
    fn bisection() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}
