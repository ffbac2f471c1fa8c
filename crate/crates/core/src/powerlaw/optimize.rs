//! One- and two-dimensional derivative-free maximizers.

/// Result of a bounded scalar maximization.
#[derive(Debug, Clone, Copy)]
pub struct Max1d {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Brent's parabolic-interpolation search for the maximum of `f` on
/// `[lo, hi]`, to absolute tolerance `tol` in `x`.
pub fn brent_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Max1d {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let g = |x: f64| -f(x);
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let xm = 0.5 * (a + b);
        let tol1 = tol * 0.5 + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = g(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Max1d {
        x,
        value: -fx,
        iterations,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Max2d {
    pub x: [f64; 2],
    pub value: f64,
    pub converged: bool,
}

/// Nelder-Mead maximization in two dimensions with one restart from the
/// best vertex. Stops when the simplex spans less than `xtol` in every
/// coordinate.
pub fn nelder_mead_max(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: [f64; 2],
    xtol: f64,
    max_iter: usize,
) -> Max2d {
    let g = |p: [f64; 2]| {
        let v = -f(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = start;
    let mut converged = false;
    let mut value = g(start);
    for _round in 0..2 {
        let mut simplex = [
            best,
            [best[0] + step[0], best[1]],
            [best[0], best[1] + step[1]],
        ];
        let mut vals = simplex.map(g);
        converged = false;
        for _ in 0..max_iter {
            let mut order = [0usize, 1, 2];
            order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
            simplex = order.map(|i| simplex[i]);
            vals = order.map(|i| vals[i]);
            let spread = (0..2).all(|k| {
                let lo = simplex.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
                let hi = simplex
                    .iter()
                    .map(|p| p[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                hi - lo < xtol
            });
            if spread {
                converged = true;
                break;
            }
            let centroid = [
                (simplex[0][0] + simplex[1][0]) / 2.0,
                (simplex[0][1] + simplex[1][1]) / 2.0,
            ];
            let along = |t: f64| {
                [
                    centroid[0] + t * (simplex[2][0] - centroid[0]),
                    centroid[1] + t * (simplex[2][1] - centroid[1]),
                ]
            };
            let reflected = along(-1.0);
            let fr = g(reflected);
            if fr < vals[0] {
                let expanded = along(-2.0);
                let fe = g(expanded);
                if fe < fr {
                    simplex[2] = expanded;
                    vals[2] = fe;
                } else {
                    simplex[2] = reflected;
                    vals[2] = fr;
                }
            } else if fr < vals[1] {
                simplex[2] = reflected;
                vals[2] = fr;
            } else {
                let contracted = if fr < vals[2] {
                    along(-0.5)
                } else {
                    along(0.5)
                };
                let fc = g(contracted);
                if fc < vals[2].min(fr) {
                    simplex[2] = contracted;
                    vals[2] = fc;
                } else {
                    for i in 1..3 {
                        simplex[i] = [
                            simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                            simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                        ];
                        vals[i] = g(simplex[i]);
                    }
                }
            }
        }
        let (i, v) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i, *v))
            .expect("three vertices");
        best = simplex[i];
        value = v;
    }
    Max2d {
        x: best,
        value: -value,
        converged,
    }
}
