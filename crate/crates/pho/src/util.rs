//! Small numeric helpers shared across modules.

/// Compensated (Kahan-Babuska / Neumaier) accumulator. Series with heavy
/// cancellation (the chi sequence subtracts two O(sqrt(n)) quantities) go
/// through this instead of a bare fold.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
