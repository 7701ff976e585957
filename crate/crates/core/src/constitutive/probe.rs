use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::StressLaw;
use crate::field::SymMat2;
use crate::nfunc::{Conjugate, NFunction, RatioRange, Shifted};
use crate::{Error, Result};

/// Every quantity the equivalence probe evaluates for one pair `(P, Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HammerRecord {
    /// `(A(P) - A(Q)) : (P - Q)`
    pub monotone: f64,
    /// `|V(P) - V(Q)|^2`
    pub v_distance: f64,
    /// `phi_{|Q|}(|P - Q|)`
    pub shifted_phi: f64,
    /// `(phi*)_{|A(Q)|}(|A(P) - A(Q)|)`
    pub shifted_conjugate: f64,
    /// `(phi_{|Q|})*(|A(P) - A(Q)|)`
    pub conjugate_of_shifted: f64,
    /// `A(Q) : Q`
    pub work: f64,
    /// `phi(|Q|)`
    pub phi_q: f64,
    /// `(phi_{|Q|})'(|P - Q|)`
    pub shifted_derivative: f64,
    /// `|A(P) - A(Q)|`
    pub stress_distance: f64,
}

/// Names of the ratios returned by [`HammerRecord::ratios`], in order. The
/// first six are the pairwise ratios of the four primary quantities.
pub const RATIO_NAMES: [&str; 9] = [
    "monotone/v_distance",
    "monotone/shifted_phi",
    "monotone/shifted_conjugate",
    "v_distance/shifted_phi",
    "v_distance/shifted_conjugate",
    "shifted_phi/shifted_conjugate",
    "work/phi_q",
    "shifted_derivative/stress_distance",
    "shifted_conjugate/conjugate_of_shifted",
];

impl HammerRecord {
    pub fn ratios(&self) -> [f64; 9] {
        let r = |a: f64, b: f64| a / b;
        [
            r(self.monotone, self.v_distance),
            r(self.monotone, self.shifted_phi),
            r(self.monotone, self.shifted_conjugate),
            r(self.v_distance, self.shifted_phi),
            r(self.v_distance, self.shifted_conjugate),
            r(self.shifted_phi, self.shifted_conjugate),
            r(self.work, self.phi_q),
            r(self.shifted_derivative, self.stress_distance),
            r(self.shifted_conjugate, self.conjugate_of_shifted),
        ]
    }
}

pub fn hammer_probe(law: &StressLaw, p: &SymMat2, q: &SymMat2) -> Result<HammerRecord> {
    let d = *p - *q;
    if d.norm() == 0.0 {
        return Err(Error::Domain("hammer probe needs P != Q".into()));
    }
    let phi = &law.model;
    let (ap, aq) = (law.stress(p), law.stress(q));
    let da = ap - aq;
    let (t, s) = (d.norm(), da.norm());
    let shifted = Shifted { base: phi, shift: q.norm() };
    let conj_shifted = Shifted { base: Conjugate(phi), shift: aq.norm() };
    Ok(HammerRecord {
        monotone: da.dot(&d),
        v_distance: (law.v_map(p) - law.v_map(q)).norm().powi(2),
        shifted_phi: shifted.value(t),
        shifted_conjugate: conj_shifted.value(s),
        conjugate_of_shifted: Conjugate(shifted).value(s),
        work: aq.dot(q),
        phi_q: phi.value(q.norm()),
        shifted_derivative: shifted.derivative(t),
        stress_distance: s,
    })
}

/// Deterministic sample of pairs: half with entries uniform on `[-10, 10]`,
/// half rescaled to log-uniform magnitudes `10^U(-6, 6)`.
pub fn sample_pairs(seed: u64, count: usize) -> Vec<(SymMat2, SymMat2)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |k: usize, rng: &mut ChaCha8Rng| loop {
        let m = SymMat2::new(
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        );
        let n = m.norm();
        if n < 1e-8 {
            continue;
        }
        if k % 2 == 1 {
            let target = 10f64.powf(rng.random_range(-6.0..6.0));
            return (target / n) * m;
        }
        return m;
    };
    (0..count)
        .map(|k| {
            let p = draw(k, &mut rng);
            let q = draw(k / 2, &mut rng);
            (p, q)
        })
        .collect()
}

/// Sampled extremes of each ratio family plus a count of non-finite ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HammerSummary {
    pub law: String,
    pub samples: usize,
    pub ranges: Vec<RatioRange>,
    pub non_finite: usize,
}

impl HammerSummary {
    /// The largest `max/min` among the six primary ratio families.
    pub fn worst_primary_spread(&self) -> f64 {
        self.ranges[..6].iter().map(RatioRange::spread).fold(1.0, f64::max)
    }

    pub fn range(&self, name: &str) -> Option<&RatioRange> {
        RATIO_NAMES.iter().position(|n| *n == name).map(|k| &self.ranges[k])
    }
}

/// Probes all pairs (in parallel, order preserving) and reduces the ratios.
pub fn hammer_sweep(
    law: &StressLaw,
    pairs: &[(SymMat2, SymMat2)],
) -> Result<(HammerSummary, Vec<HammerRecord>)> {
    let records: Vec<HammerRecord> =
        pairs.par_iter().map(|(p, q)| hammer_probe(law, p, q)).collect::<Result<_>>()?;
    let summary = summarize(law, &records);
    Ok((summary, records))
}

/// Reduces probe records to per-ratio extremes.
pub fn summarize(law: &StressLaw, records: &[HammerRecord]) -> HammerSummary {
    let mut ranges = vec![RatioRange::default(); RATIO_NAMES.len()];
    let mut non_finite = 0;
    for r in records {
        for (k, x) in r.ratios().into_iter().enumerate() {
            // A(Q):Q / phi(|Q|) is 0/0 for Q = 0 and carries no information.
            if k == 6 && r.phi_q == 0.0 {
                continue;
            }
            if x.is_finite() && x > 0.0 {
                ranges[k].push(x);
            } else {
                non_finite += 1;
            }
        }
    }
    HammerSummary { law: law.model.to_string(), samples: records.len(), ranges, non_finite }
}

/// Extremes of the two sides of the growth condition:
/// `c = min (A(P)-A(Q)):(P-Q) / (phi''(|P|+|Q|) |P-Q|^2)` and
/// `C = max |A(P)-A(Q)| / (phi''(|P|+|Q|) |P-Q|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub c_est: f64,
    pub big_c_est: f64,
    pub pass: bool,
}

pub fn check_assumption_a(law: &StressLaw, pairs: &[(SymMat2, SymMat2)]) -> AssumptionReport {
    let mut lower = RatioRange::default();
    let mut upper = RatioRange::default();
    let mut bad = false;
    for (p, q) in pairs {
        let d = *p - *q;
        let t = d.norm();
        if p.norm() == 0.0 || t == 0.0 {
            continue;
        }
        let w = law.model.second_derivative(p.norm() + q.norm());
        let da = law.stress(p) - law.stress(q);
        let lo = da.dot(&d) / (w * t * t);
        let hi = da.norm() / (w * t);
        bad |= !(lo.is_finite() && hi.is_finite());
        lower.push(lo);
        upper.push(hi);
    }
    let pass = !bad && !lower.is_empty() && lower.min > 0.0 && upper.max.is_finite();
    AssumptionReport { c_est: lower.min, big_c_est: upper.max, pass }
}

#[derive(Serialize)]
struct ProbeRow<'a> {
    law: &'a str,
    index: usize,
    p11: f64,
    p12: f64,
    p22: f64,
    q11: f64,
    q12: f64,
    q22: f64,
    monotone: f64,
    v_distance: f64,
    shifted_phi: f64,
    shifted_conjugate: f64,
    conjugate_of_shifted: f64,
    work: f64,
    phi_q: f64,
    shifted_derivative: f64,
    stress_distance: f64,
    r_mon_v: f64,
    r_mon_sphi: f64,
    r_mon_sconj: f64,
    r_v_sphi: f64,
    r_v_sconj: f64,
    r_sphi_sconj: f64,
    r_work_phi: f64,
    r_sderiv_sdist: f64,
    r_shift_duality: f64,
}

/// One CSV row per pair with the raw quantities and all ratios.
pub fn write_probe_csv<W: Write>(
    law: &StressLaw,
    pairs: &[(SymMat2, SymMat2)],
    records: &[HammerRecord],
    w: W,
) -> Result<()> {
    let name = law.model.to_string();
    let mut wr = csv::WriterBuilder::new().from_writer(w);
    for (index, ((p, q), record)) in pairs.iter().zip(records).enumerate() {
        let r = record.ratios();
        wr.serialize(ProbeRow {
            law: &name,
            index,
            p11: p.a11,
            p12: p.a12,
            p22: p.a22,
            q11: q.a11,
            q12: q.a12,
            q22: q.a22,
            monotone: record.monotone,
            v_distance: record.v_distance,
            shifted_phi: record.shifted_phi,
            shifted_conjugate: record.shifted_conjugate,
            conjugate_of_shifted: record.conjugate_of_shifted,
            work: record.work,
            phi_q: record.phi_q,
            shifted_derivative: record.shifted_derivative,
            stress_distance: record.stress_distance,
            r_mon_v: r[0],
            r_mon_sphi: r[1],
            r_mon_sconj: r[2],
            r_v_sphi: r[3],
            r_v_sconj: r[4],
            r_sphi_sconj: r[5],
            r_work_phi: r[6],
            r_sderiv_sdist: r[7],
            r_shift_duality: r[8],
        })?;
    }
    wr.flush().map_err(|e| Error::io("probe csv", e))?;
    Ok(())
}
