//! Adaptive Simpson integration over a union of intervals.

use crate::distributions::Interval;

/// Panels each interval is split into before refinement starts. Keeps narrow
/// features (a contaminating component far from the origin) from being
/// stepped over by the first Simpson estimate.
const INITIAL_PANELS: usize = 32;
const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the Richardson error estimates of the accepted panels.
    pub error_estimate: f64,
    pub evaluations: usize,
    /// False when some panel was accepted because the depth or evaluation
    /// budget ran out rather than because it met its tolerance.
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `intervals` to absolute tolerance `tol`, spending at
/// most roughly `budget` evaluations of `f`.
pub fn integrate<F>(f: F, intervals: &[Interval], tol: f64, budget: usize) -> Quadrature
where
    F: Fn(f64) -> f64,
{
    let total_width: f64 = intervals.iter().map(Interval::width).sum();
    let mut out = Quadrature {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
        converged: true,
    };
    if total_width <= 0.0 {
        return out;
    }

    let mut stack = Vec::new();
    for iv in intervals.iter().filter(|iv| iv.width() > 0.0) {
        let h = iv.width() / INITIAL_PANELS as f64;
        let panel_tol = tol * h / total_width;
        let mut fa = f(iv.lo);
        out.evaluations += 1;
        for i in 0..INITIAL_PANELS {
            let a = iv.lo + h * i as f64;
            let b = if i + 1 == INITIAL_PANELS { iv.hi } else { a + h };
            let m = 0.5 * (a + b);
            let (fm, fb) = (f(m), f(b));
            out.evaluations += 2;
            stack.push(Panel {
                a,
                b,
                fa,
                fm,
                fb,
                whole: simpson(a, b, fa, fm, fb),
                tol: panel_tol,
                depth: 0,
            });
            fa = fb;
        }
    }

    // Panels are accepted in a deterministic order, so the summation order,
    // and with it the result, is reproducible bit for bit.
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        out.evaluations += 2;
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let err = diff.abs() / 15.0;

        let within_tol = err <= p.tol;
        let exhausted = p.depth >= MAX_DEPTH || out.evaluations >= budget;
        if within_tol || exhausted {
            out.value += left + right + diff / 15.0;
            out.error_estimate += err;
            if !within_tol {
                out.converged = false;
            }
        } else {
            let tol = 0.5 * p.tol;
            let depth = p.depth + 1;
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol,
                depth,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol,
                depth,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, &[Interval::new(0.0, 2.0)], 1e-12, 1 << 20);
        assert!((q.value - 0.0).abs() < 1e-12);
        assert!(q.converged);
    }

    #[test]
    fn standard_normal_mass() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let q = integrate(phi, &[Interval::new(-8.0, 8.0)], 1e-10, 1 << 20);
        assert!((q.value - 1.0).abs() < 1e-10, "{}", q.value);
    }

    #[test]
    fn disjoint_pieces_add() {
        let q = integrate(
            |_| 1.0,
            &[Interval::new(0.0, 1.0), Interval::new(5.0, 7.5)],
            1e-12,
            1 << 20,
        );
        assert!((q.value - 3.5).abs() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // Oscillation far below the sampling resolution cannot converge
        // within a tiny budget.
        let q = integrate(|x| (1e4 * x).sin().abs(), &[Interval::new(0.0, 10.0)], 1e-14, 500);
        assert!(!q.converged);
    }
}
