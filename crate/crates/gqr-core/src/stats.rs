//! Dip statistic for multimodality tests.
//!
//! The dip of an empirical cdf F is the smallest band half-width D such that
//! some unimodal cdf G (convex up to a mode, concave after, with at most one
//! atom at the mode) stays within sup|F - G| <= D. It is computed here by
//! bisection over D with an exact band-feasibility check on the distinct
//! sample values:
//!
//! * at every step value strictly inside one side of the mode, continuity
//!   pins G into the window [c_i - D, c_{i-1} + D];
//! * a convex function fits a set of value windows iff the greatest convex
//!   minorant of the window tops dominates the window bottoms (mirrored for
//!   the concave side);
//! * the mode is scanned over every flat region and every sample value (an
//!   atom at the mode absorbs that step's jump).
//!
//! The ordering constraint at the junction of the two sides is relaxed,
//! which can only under-estimate the dip; since the test declares
//! multimodality when the statistic exceeds a threshold, the relaxation is
//! conservative.
//!
//! A two-valued sample with fractions (p, 1-p) has dip min(p, 1-p)/2, which
//! pins the implementation in the tests below.

/// One value window (p, [lo, hi]) the unimodal cdf must pass through.
#[derive(Debug, Clone, Copy)]
struct Window {
    p: f64,
    lo: f64,
    hi: f64,
}

/// Greatest-convex-minorant values of the window tops, evaluated at every
/// window position.
fn lower_hull_values(w: &[Window]) -> Vec<f64> {
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..w.len() {
        while stack.len() >= 2 {
            let a = stack[stack.len() - 2];
            let b = stack[stack.len() - 1];
            // Pop b when slope(a,b) >= slope(b,i): b sits on or above the
            // chord and cannot be a hull vertex.
            let lhs = (w[b].hi - w[a].hi) * (w[i].p - w[b].p);
            let rhs = (w[i].hi - w[b].hi) * (w[b].p - w[a].p);
            if lhs >= rhs {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    evaluate_piecewise(w, &stack, |win| win.hi)
}

/// Least-concave-majorant values of the window bottoms.
fn upper_hull_values(w: &[Window]) -> Vec<f64> {
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..w.len() {
        while stack.len() >= 2 {
            let a = stack[stack.len() - 2];
            let b = stack[stack.len() - 1];
            let lhs = (w[b].lo - w[a].lo) * (w[i].p - w[b].p);
            let rhs = (w[i].lo - w[b].lo) * (w[b].p - w[a].p);
            if lhs <= rhs {
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(i);
    }
    evaluate_piecewise(w, &stack, |win| win.lo)
}

fn evaluate_piecewise(w: &[Window], hull: &[usize], value: impl Fn(&Window) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    let mut seg = 0;
    for (i, win) in w.iter().enumerate() {
        while seg + 1 < hull.len() && w[hull[seg + 1]].p < win.p {
            seg += 1;
        }
        let a = hull[seg];
        let b = hull[(seg + 1).min(hull.len() - 1)];
        out[i] = if a == b || w[b].p == w[a].p {
            value(&w[a])
        } else {
            let t = (win.p - w[a].p) / (w[b].p - w[a].p);
            value(&w[a]) + t * (value(&w[b]) - value(&w[a]))
        };
    }
    out
}

fn convex_side_feasible(w: &[Window]) -> bool {
    if w.is_empty() {
        return true;
    }
    if w.iter().any(|win| win.lo > win.hi) {
        return false;
    }
    let hull = lower_hull_values(w);
    w.iter().zip(hull.iter()).all(|(win, h)| *h >= win.lo - 1e-15)
}

fn concave_side_feasible(w: &[Window]) -> bool {
    if w.is_empty() {
        return true;
    }
    if w.iter().any(|win| win.lo > win.hi) {
        return false;
    }
    let hull = upper_hull_values(w);
    w.iter().zip(hull.iter()).all(|(win, h)| *h <= win.hi + 1e-15)
}

/// Band feasibility of a unimodal cdf at half-width `d` for distinct values
/// `v` with cumulative fractions `c` (c[k-1] = 1).
#[allow(clippy::needless_range_loop)]
fn unimodal_band_feasible(v: &[f64], c: &[f64], d: f64) -> bool {
    let k = v.len();
    let lo = |i: usize| -> f64 {
        // band bottom on region i (between v[i-1] and v[i]); region 0 = 0.
        let ci = if i == 0 { 0.0 } else { c[i - 1] };
        (ci - d).max(0.0)
    };
    let hi = |i: usize| -> f64 {
        let ci = if i == 0 { 0.0 } else { c[i - 1] };
        (ci + d).min(1.0)
    };
    // Standard continuity window at step j (1-based region indexing):
    // value in [band bottom after the step, band top before the step].
    let step_window = |j: usize| -> Window {
        Window { p: v[j], lo: lo(j + 1), hi: hi(j) }
    };

    // Mode inside flat region s: steps 0..s on the convex side, steps s..k
    // on the concave side. The end regions need no junction anchor (the
    // mode can hug the adjacent value, which the atom splits below cover);
    // interior regions anchor both sides at candidate mode positions so the
    // slope coupling across the region is enforced.
    {
        let right: Vec<Window> = (0..k).map(step_window).collect();
        if concave_side_feasible(&right) {
            return true;
        }
        let left: Vec<Window> = (0..k).map(step_window).collect();
        if convex_side_feasible(&left) {
            return true;
        }
    }
    for s in 1..k {
        for t in [0.25, 0.5, 0.75] {
            let m = v[s - 1] + t * (v[s] - v[s - 1]);
            let anchor = Window { p: m, lo: lo(s), hi: hi(s) };
            let mut left: Vec<Window> = (0..s).map(step_window).collect();
            left.push(anchor);
            let mut right = vec![anchor];
            right.extend((s..k).map(step_window));
            if convex_side_feasible(&left) && concave_side_feasible(&right) {
                return true;
            }
        }
    }
    // Mode with an atom at value j: the jump there escapes the continuity
    // window; the convex side ends just below v[j], the concave side starts
    // at the post-jump value.
    for j in 0..k {
        let mut left: Vec<Window> = (0..j).map(step_window).collect();
        left.push(Window { p: v[j], lo: lo(j), hi: hi(j) });
        let mut right: Vec<Window> = vec![Window { p: v[j], lo: lo(j + 1), hi: hi(j + 1) }];
        right.extend((j + 1..k).map(step_window));
        if convex_side_feasible(&left) && concave_side_feasible(&right) {
            return true;
        }
    }
    false
}

/// Dip statistic of a sample: sup-distance from the empirical cdf to the
/// nearest unimodal cdf.
pub fn dip_statistic(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("dip input must not contain NaN"));

    // Collapse to distinct values with cumulative fractions.
    let n = sorted.len() as f64;
    let mut v = Vec::new();
    let mut c = Vec::new();
    let mut count = 0usize;
    for (i, x) in sorted.iter().enumerate() {
        count += 1;
        if i + 1 == sorted.len() || sorted[i + 1] != *x {
            v.push(*x);
            c.push(count as f64 / n);
        }
    }
    if v.len() == 1 {
        return 0.0;
    }

    let mut lo = 0.0;
    let mut hi = 0.5;
    debug_assert!(unimodal_band_feasible(&v, &c, hi));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if unimodal_band_feasible(&v, &c, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Conservative significance threshold for the dip at sample size `n`:
/// unimodal-null dips concentrate near ~0.5/sqrt(n), so exceeding 1/sqrt(n)
/// flags multimodality comfortably.
pub fn dip_bimodality_threshold(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}
