//! Bracketing scalar root finding.

use crate::real::Real;

/// Outcome of a bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed<T> {
    pub root: T,
    /// Final bracket `[lo, hi]` (ordered), containing a sign change.
    pub lo: T,
    pub hi: T,
    pub value: T,
    pub iterations: usize,
}

impl<T: Real> Bracketed<T> {
    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Brent's method: bisection safeguarded by secant and inverse quadratic
/// interpolation steps.
///
/// Stops once the bracket is narrower than `2·(eps·|x| + rel_tol·|x|/2)` or
/// an exact zero is hit. Returns `None` when `f(a)` and `f(b)` share a sign.
pub fn brent<T: Real, F>(mut func: F, a: T, b: T, rel_tol: T, max_iter: usize) -> Option<Bracketed<T>>
where
    F: FnMut(T) -> T,
{
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let three = T::lit(3.0);
    let eps = T::epsilon();

    let (mut a, mut b) = (a, b);
    let mut fa = func(a);
    let mut fb = func(b);
    if fa == T::zero() {
        return Some(Bracketed { root: a, lo: a, hi: a, value: fa, iterations: 0 });
    }
    if fb == T::zero() {
        return Some(Bracketed { root: b, lo: b, hi: b, value: fb, iterations: 0 });
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return None;
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = two * eps * b.abs() + half * rel_tol * b.abs();
        let m = half * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            let (lo, hi) = if b < c { (b, c) } else { (c, b) };
            return Some(Bracketed { root: b, lo, hi, value: fb, iterations: iter });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            let min1 = three * m * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else if m > T::zero() { b + tol } else { b - tol };
        fb = func(b);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_two() {
        let r = brent(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14, 100).unwrap();
        assert!((r.root - 2f64.sqrt()).abs() < 1e-14);
        assert!(r.width() <= 1e-13 * r.root);
    }

    #[test]
    fn no_sign_change() {
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn exact_zero_at_endpoint() {
        let r = brent(|x: f64| x - 1.0, 1.0, 3.0, 1e-12, 100).unwrap();
        assert_eq!(r.root, 1.0);
    }

    #[test]
    fn steep_function() {
        let r = brent(|x: f64| (x - 0.3).powi(3) * 1e6 + (x - 0.3), 0.0, 1.0, 1e-14, 200).unwrap();
        assert!((r.root - 0.3).abs() < 1e-14);
    }
}
