use crate::error::{Error, Result};
use crate::linalg::log_sum_exp;
use crate::quantize::Operator;

use super::gibbs::GibbsPair;

pub const DEFAULT_BINS: usize = 64;
const ATOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub log_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub log_mass: f64,
}

impl Bin {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
    pub fn mass(&self) -> f64 {
        self.log_mass.exp()
    }
}

/// Distribution of the outcomes of `Q_N(a)` in the Gibbs state of `Q_N(h)`.
#[derive(Debug, Clone)]
pub struct OutcomeMeasure {
    pub n_sites: usize,
    pub atoms: Vec<Atom>,
    pub bins: Vec<Bin>,
}

impl OutcomeMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.log_mass.exp()).sum()
    }

    /// `-(1/N) log μ_N(bin)` per bin; `+∞` for empty bins.
    pub fn empirical_rate(&self) -> Vec<(f64, f64)> {
        let n = self.n_sites as f64;
        self.bins
            .iter()
            .map(|b| (b.center(), -b.log_mass / n))
            .collect()
    }

    /// Log-mass of a closed interval.
    pub fn log_mass_in(&self, lo: f64, hi: f64) -> f64 {
        log_sum_exp(
            self.atoms
                .iter()
                .filter(|a| a.value >= lo && a.value <= hi)
                .map(|a| a.log_mass)
                .collect::<Vec<_>>(),
        )
    }
}

pub fn outcome_measure(h_op: &Operator, a_op: &Operator, bins: usize) -> Result<OutcomeMeasure> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    let pair = GibbsPair::new(h_op, a_op)?;
    let mut raw = pair.a_spectral_log_weights();
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut atoms: Vec<Atom> = Vec::new();
    let mut group: Vec<(f64, f64)> = Vec::new();
    let flush = |group: &mut Vec<(f64, f64)>, atoms: &mut Vec<Atom>| {
        if group.is_empty() {
            return;
        }
        let value = group.iter().map(|g| g.0).sum::<f64>() / group.len() as f64;
        let log_mass = log_sum_exp(group.iter().map(|g| g.1).collect::<Vec<_>>());
        atoms.push(Atom { value, log_mass });
        group.clear();
    };
    for (v, lw) in raw {
        if let Some(first) = group.first() {
            if v - first.0 > ATOM_TOL {
                flush(&mut group, &mut atoms);
            }
        }
        group.push((v, lw));
    }
    flush(&mut group, &mut atoms);

    let lo = atoms.first().map(|a| a.value).unwrap_or(0.0) - ATOM_TOL;
    let hi = atoms.last().map(|a| a.value).unwrap_or(0.0) + ATOM_TOL;
    let width = (hi - lo) / bins as f64;
    let mut per_bin: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for a in &atoms {
        let idx = (((a.value - lo) / width).floor() as usize).min(bins - 1);
        per_bin[idx].push(a.log_mass);
    }
    let bins = per_bin
        .into_iter()
        .enumerate()
        .map(|(i, masses)| Bin {
            lo: lo + i as f64 * width,
            hi: lo + (i + 1) as f64 * width,
            log_mass: log_sum_exp(masses),
        })
        .collect();
    Ok(OutcomeMeasure {
        n_sites: pair.n_sites(),
        atoms,
        bins,
    })
}
