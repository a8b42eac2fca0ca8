/// Flat `f64` evaluator for the Monte Carlo hot loops. Variables may repeat
/// inside a term, so it also serves general polynomials.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    nvars: usize,
    coeffs: Vec<f64>,
    offsets: Vec<u32>,
    vars: Vec<u32>,
}

impl CompiledPoly {
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut coeffs = Vec::new();
        let mut offsets = vec![0u32];
        let mut vars = Vec::new();
        for (vs, c) in terms {
            coeffs.push(c);
            vars.extend_from_slice(&vs);
            offsets.push(vars.len() as u32);
        }
        Self { nvars, coeffs, offsets, vars }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Evaluates at `x`; `x.len()` must be at least `nvars` (checked in debug builds).
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert!(x.len() >= self.nvars);
        let mut acc = 0.0;
        for (t, &c) in self.coeffs.iter().enumerate() {
            let lo = self.offsets[t] as usize;
            let hi = self.offsets[t + 1] as usize;
            let mut v = c;
            for &i in &self.vars[lo..hi] {
                v *= x[i as usize];
            }
            acc += v;
        }
        acc
    }
}
