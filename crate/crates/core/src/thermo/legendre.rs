use crate::error::{Error, Result};

const CONVEXITY_TOL: f64 = 1e-8;

/// Discrete Legendre transform `I(x) = max_i (t_i x - F_i)` of sampled values.
#[derive(Debug, Clone)]
pub struct LegendreTransform {
    t: Vec<f64>,
    f: Vec<f64>,
    /// `[F'(t_min), F'(t_max)]` estimated by one-sided differences.
    pub slope_interval: (f64, f64),
    pub convexity_warning: Option<String>,
}

impl LegendreTransform {
    /// `+∞` outside the attainable-slope interval.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.slope_interval;
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if x < lo - slack || x > hi + slack {
            return f64::INFINITY;
        }
        self.t
            .iter()
            .zip(&self.f)
            .map(|(t, f)| t * x - f)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `min_{x ∈ [lo, hi]} I(x)` by dense sampling (exact for the piecewise
    /// linear discrete transform at its breakpoints).
    pub fn min_over(&self, lo: f64, hi: f64) -> f64 {
        let (slo, shi) = self.slope_interval;
        let a = lo.max(slo);
        let b = hi.min(shi);
        if a > b {
            return f64::INFINITY;
        }
        let mut candidates = vec![a, b];
        // breakpoints of the max of affine functions are the chord slopes
        for w in self.t.windows(2).zip(self.f.windows(2)) {
            let s = (w.1[1] - w.1[0]) / (w.0[1] - w.0[0]);
            if s > a && s < b {
                candidates.push(s);
            }
        }
        candidates
            .into_iter()
            .map(|x| self.eval(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn samples(&self, xs: &[f64]) -> Vec<(f64, f64)> {
        xs.iter().map(|&x| (x, self.eval(x))).collect()
    }
}

pub fn legendre(t_grid: &[f64], f_values: &[f64]) -> Result<LegendreTransform> {
    if t_grid.len() != f_values.len() {
        return Err(Error::DimensionMismatch {
            expected: t_grid.len(),
            found: f_values.len(),
        });
    }
    if t_grid.len() < 2 {
        return Err(Error::InvalidArgument("need at least two grid points".into()));
    }
    let mut pairs: Vec<(f64, f64)> = t_grid.iter().copied().zip(f_values.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidArgument("grid points must be distinct".into()));
    }
    let (t, f): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let slopes: Vec<f64> = (0..t.len() - 1)
        .map(|i| (f[i + 1] - f[i]) / (t[i + 1] - t[i]))
        .collect();
    let worst = slopes
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(0.0, f64::max);
    let convexity_warning = (worst > CONVEXITY_TOL)
        .then(|| format!("samples not convex: slope decreases by {worst:.3e}"));
    Ok(LegendreTransform {
        slope_interval: (slopes[0], *slopes.last().unwrap()),
        t,
        f,
        convexity_warning,
    })
}
