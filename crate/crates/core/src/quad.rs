//! Compensated summation and trapezoidal quadrature on uniform grids.

/// Neumaier-compensated running sum. Summation order is the iteration order.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Trapezoid rule over `n >= 2` uniformly spaced samples produced by `f(i)`.
pub(crate) fn trapezoid_by(n: usize, dt: f64, f: impl Fn(usize) -> f64) -> f64 {
    debug_assert!(n >= 2);
    let mut acc = Accumulator::default();
    acc.add(0.5 * f(0));
    for i in 1..n - 1 {
        acc.add(f(i));
    }
    acc.add(0.5 * f(n - 1));
    dt * acc.total()
}

/// `sqrt(∫ f² dt)` by the trapezoid rule.
pub(crate) fn l2_by(n: usize, dt: f64, f: impl Fn(usize) -> f64) -> f64 {
    libm::sqrt(trapezoid_by(n, dt, |i| {
        let v = f(i);
        v * v
    }))
}
