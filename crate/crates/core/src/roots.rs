//! Bracketing root search shared by the safety checker, the membership
//! scan and the zero-density certificates.
//!
//! Two kinds of zeros occur in the catalog: simple ones (`cos(nu*x)`), found
//! from a sign change by bisection, and tangential ones (`1 + sin(nu*x)`),
//! which never change sign and are found by minimizing `|f|` around a
//! sampled local minimum.

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Bisection on a sign-changing bracket. Stops once `|f| < residual` or the
/// bracket can no longer be split; returns the best point seen.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, residual: f64) -> Option<(f64, f64)> {
    let mut fa = f(a);
    let fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return None;
    }
    if fa == 0.0 {
        return Some((a, 0.0));
    }
    if fb == 0.0 {
        return Some((b, 0.0));
    }
    let mut best = if fa.abs() < fb.abs() { (a, fa.abs()) } else { (b, fb.abs()) };
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if !fm.is_finite() {
            return None;
        }
        if fm.abs() < best.1 {
            best = (m, fm.abs());
        }
        if fm.abs() < residual {
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(best)
}

/// Golden-section minimization of `g` on `[a, b]`; returns `(x, g(x))`.
pub fn golden_min(g: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    golden_min_below(g, a, b, f64::NEG_INFINITY)
}

/// As [`golden_min`], stopping early once a value below `target` is seen.
pub fn golden_min_below(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, target: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..120 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) || gc.min(gd) < target {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - GOLDEN * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + GOLDEN * (b - a);
            gd = g(d);
        }
    }
    if gc < gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Candidate zero located inside a sampled interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearRoot {
    pub x: f64,
    pub residual: f64,
}

/// Scans `[a, b]` with `samples` equal steps and returns every verified
/// near-root (`|f| < residual`), in increasing `x`. Non-finite samples are
/// skipped.
pub fn near_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize, residual: f64) -> Vec<NearRoot> {
    let n = samples.max(2);
    let h = (b - a) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|j| if j == n { b } else { a + j as f64 * h }).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for j in 0..=n {
        let y = ys[j];
        if !y.is_finite() {
            continue;
        }
        if y.abs() < residual {
            out.push(NearRoot { x: xs[j], residual: y.abs() });
            continue;
        }
        if j < n && ys[j + 1].is_finite() && ys[j + 1].abs() >= residual && y.signum() != ys[j + 1].signum() {
            if let Some((x, r)) = bisect(&f, xs[j], xs[j + 1], residual) {
                if r < residual {
                    out.push(NearRoot { x, residual: r });
                }
            }
            continue;
        }
        if j > 0 && j < n {
            let (yl, yr) = (ys[j - 1], ys[j + 1]);
            let local_min = yl.is_finite()
                && yr.is_finite()
                && y.abs() <= yl.abs()
                && y.abs() <= yr.abs()
                && yl.signum() == y.signum()
                && yr.signum() == y.signum();
            if local_min {
                let (x, r) = golden_min_below(|t| f(t).abs(), xs[j - 1], xs[j + 1], residual);
                if r < residual {
                    out.push(NearRoot { x, residual: r });
                }
            }
        }
    }
    out.dedup_by(|p, q| (p.x - q.x).abs() <= 1e-12 * (1.0 + p.x.abs()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bisection_finds_simple_root() {
        let (x, r) = bisect(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-12);
        assert!(r < 1e-12);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, g) = golden_min(|x| (x - 0.3).powi(2), 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-7);
        assert!(g < 1e-14);
    }

    #[test]
    fn tangential_and_simple_roots() {
        // 1 + sin(x) touches zero at 3pi/2 without changing sign
        let roots = near_roots(|x| 1.0 + x.sin(), 0.0, 2.0 * PI, 64, 1e-10);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].x - 1.5 * PI).abs() < 1e-4);

        let roots = near_roots(|x| x.cos(), 0.0, 2.0 * PI, 64, 1e-10);
        let xs: Vec<f64> = roots.iter().map(|r| r.x).collect();
        assert_eq!(xs.len(), 2);
        assert!((xs[0] - 0.5 * PI).abs() < 1e-9 && (xs[1] - 1.5 * PI).abs() < 1e-9);
    }

    #[test]
    fn positive_function_has_no_roots() {
        assert!(near_roots(|x| 2.0 + x.sin(), 0.0, 10.0, 100, 1e-8).is_empty());
    }
}
