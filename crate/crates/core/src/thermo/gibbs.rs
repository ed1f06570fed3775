use crate::error::{Error, Result};
use crate::linalg::{self, log_sum_exp, CMat};
use crate::quantize::Operator;

/// `(1/N) log Tr e^{N A}`, summed over sectors with multiplicities.
pub fn log_trace_exp(op: &Operator) -> f64 {
    let n = op.n_sites() as f64;
    let logs: Vec<f64> = op
        .sectors()
        .iter()
        .flat_map(|s| {
            let w = s.ln_weight;
            linalg::eigvalsh(s.matrix)
                .into_iter()
                .map(move |v| w + n * v)
                .collect::<Vec<_>>()
        })
        .collect();
    log_sum_exp(logs) / n
}

/// Gibbs state `e^{N h}/Tr e^{N h}` of a quantized Hamiltonian.
#[derive(Debug, Clone)]
pub struct GibbsEnsemble {
    pub h: Operator,
    /// `(1/N) log Tr e^{N h}`.
    pub log_partition: f64,
}

impl GibbsEnsemble {
    pub fn new(h: Operator) -> Self {
        let log_partition = log_trace_exp(&h);
        Self { h, log_partition }
    }

    /// `ω_N(e^{N t a})^{1/N}` in log form, i.e. `F_N(t)`.
    pub fn log_mgf(&self, a: &Operator, t: f64) -> Result<f64> {
        f_n(t, &self.h, a)
    }
}

struct SectorData {
    ln_weight: f64,
    h_eig: Vec<f64>,
    a_eig: Vec<f64>,
    /// `ln |⟨u_i|v_j⟩|²`, row-major in `i`.
    ln_overlap: Vec<f64>,
    exact_overlaps: bool,
}

const COMMUTE_TOL: f64 = 1e-12;
const JOINT_MIX: f64 = 0.618_033_988_749_894_8;

impl SectorData {
    fn new(ln_weight: f64, h: &CMat, a: &CMat) -> Self {
        let d = h.nrows();
        let scale = linalg::spectral_norm(h).max(1.0) * linalg::spectral_norm(a).max(1.0);
        let commuting = linalg::commutator(h, a).norm() <= COMMUTE_TOL * scale;
        if commuting {
            // joint eigenbasis from a generic combination; overlaps are exact
            let (_, u) = linalg::eigh(&(h + a * linalg::c(JOINT_MIX)));
            let rayleigh = |m: &CMat| -> Vec<f64> {
                (0..d)
                    .map(|i| {
                        let col = u.column(i);
                        (col.adjoint() * m * col)[(0, 0)].re
                    })
                    .collect()
            };
            let ln_overlap = (0..d * d)
                .map(|k| if k / d == k % d { 0.0 } else { f64::NEG_INFINITY })
                .collect();
            return Self {
                ln_weight,
                h_eig: rayleigh(h),
                a_eig: rayleigh(a),
                ln_overlap,
                exact_overlaps: true,
            };
        }
        let (h_eig, u) = linalg::eigh(h);
        let (a_eig, v) = linalg::eigh(a);
        let w: CMat = u.adjoint() * v;
        let mut ln_overlap = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                ln_overlap.push(w[(i, j)].norm_sqr().ln());
            }
        }
        Self {
            ln_weight,
            h_eig,
            a_eig,
            ln_overlap,
            exact_overlaps: false,
        }
    }
}

/// Pre-diagonalized pair `(Q_N(h), Q_N(a))`, reusable across many `t`.
pub struct GibbsPair {
    n: usize,
    sectors: Vec<SectorData>,
    ln_z: f64,
    h: Operator,
    a: Operator,
}

impl GibbsPair {
    pub fn new(h: &Operator, a: &Operator) -> Result<Self> {
        if h.n_sites() != a.n_sites() || h.backend() != a.backend() {
            return Err(Error::InvalidArgument(
                "operators differ in backend or size".into(),
            ));
        }
        let n = h.n_sites();
        let hs = h.sectors();
        let as_ = a.sectors();
        if hs.len() != as_.len() {
            return Err(Error::InvalidArgument("sector count mismatch".into()));
        }
        let mut sectors = Vec::with_capacity(hs.len());
        for (sh, sa) in hs.iter().zip(&as_) {
            sectors.push(SectorData::new(sh.ln_weight, sh.matrix, sa.matrix));
        }
        let nf = n as f64;
        let ln_z = log_sum_exp(
            sectors
                .iter()
                .flat_map(|s| s.h_eig.iter().map(move |l| s.ln_weight + nf * l))
                .collect::<Vec<_>>(),
        );
        Ok(Self {
            n,
            sectors,
            ln_z,
            h: h.clone(),
            a: a.clone(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// `log Tr e^{N h}`.
    pub fn ln_partition(&self) -> f64 {
        self.ln_z
    }

    /// `log Tr[e^{N h} e^{N t a}]`.
    pub fn ln_mixed_trace(&self, t: f64) -> f64 {
        let nf = self.n as f64;
        let mut logs = Vec::new();
        for s in &self.sectors {
            let d = s.h_eig.len();
            for i in 0..d {
                for j in 0..d {
                    let ov = s.ln_overlap[i * d + j];
                    if ov.is_finite() {
                        logs.push(s.ln_weight + nf * s.h_eig[i] + nf * t * s.a_eig[j] + ov);
                    }
                }
            }
        }
        log_sum_exp(logs)
    }

    /// `F_N(t)`. Exactly zero at `t = 0`.
    pub fn f_n(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        (self.ln_mixed_trace(t) - self.ln_z) / self.n as f64
    }

    /// First-order estimate of the rounding error of [`GibbsPair::f_n`].
    ///
    /// Overlaps carry an absolute error of order `d ε`; a term with a tiny
    /// overlap but a large weight `e^{N(λ_i + t μ_j)}` can then dominate.
    pub fn f_n_error_estimate(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let nf = self.n as f64;
        let mut logs = Vec::new();
        for s in self.sectors.iter().filter(|s| !s.exact_overlaps) {
            let d = s.h_eig.len();
            let delta = 4.0 * d as f64 * f64::EPSILON;
            for i in 0..d {
                for j in 0..d {
                    let w = (0.5 * s.ln_overlap[i * d + j]).exp();
                    let noise = 2.0 * w * delta + delta * delta;
                    logs.push(s.ln_weight + nf * s.h_eig[i] + nf * t * s.a_eig[j] + noise.ln());
                }
            }
        }
        let rel = (log_sum_exp(logs) - self.ln_mixed_trace(t)).exp();
        rel / nf
    }

    /// Log-weights `ln ω_N(P_j)` of the spectral projections of `a`, per
    /// sector, as `(eigenvalue, log-weight)` pairs.
    pub(crate) fn a_spectral_log_weights(&self) -> Vec<(f64, f64)> {
        let nf = self.n as f64;
        let mut out = Vec::new();
        for s in &self.sectors {
            let d = s.h_eig.len();
            for j in 0..d {
                let lw = log_sum_exp(
                    (0..d)
                        .map(|i| s.ln_overlap[i * d + j])
                        .zip(&s.h_eig)
                        .filter(|(ov, _)| ov.is_finite())
                        .map(|(ov, l)| s.ln_weight + nf * l + ov)
                        .collect::<Vec<_>>(),
                );
                out.push((s.a_eig[j], lw - self.ln_z));
            }
        }
        out
    }

    /// Golden–Thompson comparison at `t`.
    pub fn gt_gap(&self, t: f64) -> Result<GtGap> {
        let sum = self.h.zip_with(&self.a, |x, y| x + y * linalg::c(t))?;
        let lhs = log_trace_exp(&sum);
        let rhs = self.ln_mixed_trace(t) / self.n as f64;
        Ok(GtGap { lhs, rhs })
    }
}

/// `F_N(t) = (1/N) log ω_N(e^{N t A})` for the Gibbs state of `h_op`.
pub fn f_n(t: f64, h_op: &Operator, a_op: &Operator) -> Result<f64> {
    Ok(GibbsPair::new(h_op, a_op)?.f_n(t))
}

/// Both sides of the Golden–Thompson inequality, normalized by `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtGap {
    /// `(1/N) log Tr e^{N(h + t a)}`.
    pub lhs: f64,
    /// `(1/N) log Tr[e^{N h} e^{N t a}]`.
    pub rhs: f64,
}

impl GtGap {
    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn golden_thompson_gap(t: f64, h_op: &Operator, a_op: &Operator) -> Result<GtGap> {
    GibbsPair::new(h_op, a_op)?.gt_gap(t)
}
