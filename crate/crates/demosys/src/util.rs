//! Small numeric helpers shared across modules.

/// Compensated (Kahan) summation accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// FNV-1a over a byte stream; used to derive deterministic, schedule-independent
/// RNG substreams from structural inputs.
#[derive(Clone, Copy, Debug)]
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn write_u64(&mut self, x: u64) {
        self.write(&x.to_le_bytes());
    }

    pub fn write_f64(&mut self, x: f64) {
        // Canonicalize -0.0 so structurally equal inputs hash equally.
        let x = if x == 0.0 { 0.0 } else { x };
        self.write(&x.to_bits().to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_small_terms() {
        let mut k = KahanSum::new();
        for _ in 0..10_000_000 {
            k.add(1e-10);
        }
        assert!((k.value() - 1e-3).abs() < 1e-16);
    }

    #[test]
    fn fnv_is_stable() {
        let mut h = Fnv1a::new();
        h.write_u64(42);
        h.write_f64(1.5);
        assert_eq!(h.finish(), {
            let mut h2 = Fnv1a::new();
            h2.write_u64(42);
            h2.write_f64(1.5);
            h2.finish()
        });
        let mut h3 = Fnv1a::new();
        h3.write_f64(-0.0);
        let mut h4 = Fnv1a::new();
        h4.write_f64(0.0);
        assert_eq!(h3.finish(), h4.finish());
    }
}
