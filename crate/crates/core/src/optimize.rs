//! One-dimensional minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when the
/// bracket is shorter than `tol`. Returns `(argmin, min)`.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let (mut x, mut fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    for end in [a, b] {
        let fe = f(end);
        if fe < fx {
            x = end;
            fx = fe;
        }
    }
    (x, fx)
}

/// Golden-section search run on `brackets` equal sub-intervals of `[lo, hi]`;
/// the best local result wins, earliest bracket on ties.
pub fn bracketed_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, brackets: usize, tol: f64) -> (f64, f64) {
    let width = (hi - lo) / brackets as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..brackets {
        let a = lo + width * i as f64;
        let r = golden_section(&mut f, a, a + width, tol);
        if r.1 < best.1 {
            best = r;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) - 1.0, -2.0, 2.0, 1e-10);
        // the objective is flat to rounding within ~1e-8 of the minimizer
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx + 1.0).abs() < 1e-15);
    }

    #[test]
    fn brackets_escape_local_minimum() {
        let f = |x: f64| (3.0 * x).cos() + 0.1 * x;
        let (x, _) = bracketed_min(f, 0.0, 2.0 * std::f64::consts::PI, 8, 1e-10);
        let expected = std::f64::consts::PI / 3.0;
        assert!((x - expected).abs() < 0.05, "{x}");
    }

    #[test]
    fn endpoint_minimum() {
        let (x, _) = golden_section(|x| x, 1.0, 2.0, 1e-12);
        assert_eq!(x, 1.0);
    }
}
