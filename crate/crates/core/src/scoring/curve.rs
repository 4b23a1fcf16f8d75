use std::path::Path;

use serde::{Deserialize, Serialize};

use super::samples::AccuracySamples;
use crate::error::{Error, Result};

/// Histogram bins across `[0, 1]`.
pub const DEFAULT_BINS: usize = 100;

/// Piecewise-linear empirical CDF of reference accuracies.
///
/// `cdf[k]` is the fraction of reference samples below `bin_edges[k]`, so
/// `cdf[0] == 0` and `cdf[B] == 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringCurve {
    pub instance_id: String,
    pub n_layers: usize,
    #[serde(rename = "N_used")]
    pub n_used: usize,
    pub master_seed: u64,
    pub bin_edges: Vec<f64>,
    pub cdf: Vec<f64>,
}

/// How reference accuracies are binned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    /// Bins holding equal shares of the reference samples.
    ///
    /// QAOA accuracies pile up in narrow clusters, one per local optimum, and
    /// interpolating across a fixed-width bin that holds a whole cluster mis-scores
    /// it by up to half the cluster's mass. Equal-mass bins bound that error by the
    /// bin mass. Repeated values get a narrow bracket so they score at mid-rank.
    #[default]
    Quantile,
    /// `B` equal-width bins over `[0, 1]`.
    Uniform,
}

impl std::str::FromStr for Binning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantile" => Ok(Binning::Quantile),
            "uniform" => Ok(Binning::Uniform),
            _ => Err(Error::invalid(format!(
                "unknown binning {s:?} (expected quantile or uniform)"
            ))),
        }
    }
}

/// Half-width of the bracket placed around a repeated accuracy value.
const TIE_BRACKET: f64 = 1e-9;

impl ScoringCurve {
    /// Builds the curve from reference accuracies with `bins` equal-mass bins.
    pub fn from_samples(samples: &AccuracySamples, bins: usize) -> Result<Self> {
        Self::from_samples_with(samples, bins, Binning::Quantile)
    }

    pub fn from_samples_with(samples: &AccuracySamples, bins: usize, binning: Binning) -> Result<Self> {
        if bins == 0 {
            return Err(Error::invalid("a scoring curve needs at least one bin"));
        }
        samples.validate()?;
        let (bin_edges, cdf) = match binning {
            Binning::Uniform => uniform_knots(&samples.values, bins),
            Binning::Quantile => quantile_knots(&samples.values, bins),
        };
        Ok(ScoringCurve {
            instance_id: samples.instance_id.clone(),
            n_layers: samples.n_layers,
            n_used: samples.values.len(),
            master_seed: samples.master_seed,
            bin_edges,
            cdf,
        })
    }

    pub fn bins(&self) -> usize {
        self.bin_edges.len() - 1
    }

    /// `F(x)` by linear interpolation between bin edges.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("accuracy {x} is outside [0, 1]")));
        }
        let edges = &self.bin_edges;
        // first edge strictly above x, clamped to the last bin
        let k = edges.partition_point(|&e| e <= x).clamp(1, edges.len() - 1) - 1;
        let width = edges[k + 1] - edges[k];
        let t = ((x - edges[k]) / width).clamp(0.0, 1.0);
        Ok((self.cdf[k] + t * (self.cdf[k + 1] - self.cdf[k])).clamp(0.0, 1.0))
    }

    /// Checks shape, monotonicity and endpoint values.
    pub fn validate(&self) -> Result<()> {
        let e = &self.bin_edges;
        if e.len() < 2 || self.cdf.len() != e.len() {
            return Err(Error::invalid(format!(
                "curve has {} edges and {} cdf values",
                e.len(),
                self.cdf.len()
            )));
        }
        if e[0] != 0.0
            || e[e.len() - 1] != 1.0
            || e.windows(2)
                .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::invalid("bin edges must increase strictly from 0 to 1"));
        }
        let c = &self.cdf;
        if c.iter().any(|v| !v.is_finite()) || c.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("cdf must be finite and non-decreasing"));
        }
        if c[0] != 0.0 || (c[c.len() - 1] - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("cdf must run from 0 to 1"));
        }
        if self.n_used == 0 {
            return Err(Error::invalid("curve was built from zero samples"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let curve: ScoringCurve = serde_json::from_str(text).map_err(|e| Error::json("<curve>", e))?;
        curve.validate()?;
        Ok(curve)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json { source, .. } => Error::json(path, source),
            Error::InvalidArgument(m) => Error::invalid(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

fn uniform_knots(values: &[f64], bins: usize) -> (Vec<f64>, Vec<f64>) {
    let mut counts = vec![0usize; bins];
    for &x in values {
        counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let total = values.len() as f64;
    let mut cdf = Vec::with_capacity(bins + 1);
    let mut acc = 0usize;
    cdf.push(0.0);
    for c in counts {
        acc += c;
        cdf.push(acc as f64 / total);
    }
    ((0..=bins).map(|k| k as f64 / bins as f64).collect(), cdf)
}

/// Knots at every `N / bins`-th order statistic.
///
/// A cut between two distinct neighbours sits at their midpoint. A cut inside a
/// run of equal values `v` is replaced by knots at `v - d` and `v + d` carrying
/// the fractions strictly below and at-or-below `v`.
fn quantile_knots(values: &[f64], bins: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let total = n as f64;
    let mut knots: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let push = |knots: &mut Vec<(f64, f64)>, x: f64, below: usize| {
        let (last_x, _) = *knots.last().expect("knots start at zero");
        if x > last_x && x < 1.0 {
            knots.push((x, below as f64 / total));
        }
    };
    let mut k = 1;
    while k < bins {
        let cut = (k * n + bins / 2) / bins;
        k += 1;
        if cut == 0 || cut >= n {
            continue;
        }
        if v[cut - 1] < v[cut] {
            push(&mut knots, 0.5 * (v[cut - 1] + v[cut]), cut);
            continue;
        }
        let x = v[cut];
        let lo = v.partition_point(|&y| y < x);
        let hi = v.partition_point(|&y| y <= x);
        push(&mut knots, x - TIE_BRACKET, lo);
        push(&mut knots, x + TIE_BRACKET, hi);
        // skip the cuts that fall inside this run
        while k < bins && (k * n + bins / 2) / bins < hi {
            k += 1;
        }
    }
    // mass sitting exactly at zero: F(0) stays 0, F rises to the tie fraction at +d
    let zeros = v.partition_point(|&y| y <= 0.0);
    if zeros > 0 && knots.len() > 1 && knots[1].0 > TIE_BRACKET {
        knots.insert(1, (TIE_BRACKET, zeros as f64 / total));
    } else if zeros > 0 && knots.len() == 1 {
        knots.push((TIE_BRACKET, zeros as f64 / total));
    }
    // mass sitting exactly at one: F climbs to 1 only at x = 1
    let ones = n - v.partition_point(|&y| y < 1.0);
    let below_one = (n - ones) as f64 / total;
    if ones > 0 && knots.last().map(|k| k.0 < 1.0 - TIE_BRACKET).unwrap_or(false) {
        knots.push((1.0 - TIE_BRACKET, below_one));
    }
    knots.push((1.0, 1.0));
    knots.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(values: Vec<f64>) -> AccuracySamples {
        AccuracySamples::new(values, "i", 1, "b", 0)
    }

    fn uniform_of(values: Vec<f64>) -> ScoringCurve {
        ScoringCurve::from_samples_with(&samples(values), 10, Binning::Uniform).unwrap()
    }

    #[test]
    fn uniform_bins_interpolate() {
        let c = uniform_of(vec![0.05, 0.15, 0.15, 0.95]);
        assert_eq!(c.cdf[1], 0.25);
        assert_eq!(c.cdf[2], 0.75);
        assert!((c.evaluate(0.125).unwrap() - 0.375).abs() < 1e-12);
        assert!((c.evaluate(0.5).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(c.evaluate(0.0).unwrap(), 0.0);
        assert_eq!(c.evaluate(1.0).unwrap(), 1.0);
    }

    #[test]
    fn all_ones_is_a_step_at_one() {
        for binning in [Binning::Uniform, Binning::Quantile] {
            let c = ScoringCurve::from_samples_with(&samples(vec![1.0; 20]), 10, binning).unwrap();
            c.validate().unwrap();
            assert_eq!(c.evaluate(0.5).unwrap(), 0.0);
            assert_eq!(c.evaluate(1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn quantile_bins_hold_equal_mass() {
        let values: Vec<f64> = (0..1000)
            .map(|i| ((i * 37) % 1000) as f64 / 1000.0 * 0.5 + 0.25)
            .collect();
        let c = ScoringCurve::from_samples(&samples(values), 100).unwrap();
        c.validate().unwrap();
        assert_eq!(c.bins(), 100);
        for w in c.cdf[1..c.cdf.len() - 1].windows(2) {
            assert!((w[1] - w[0] - 0.01).abs() < 1e-12);
        }
        assert!((c.evaluate(0.5).unwrap() - 0.5).abs() < 2e-3);
    }

    #[test]
    fn point_masses_score_at_mid_rank() {
        // 30% at 0.2, 50% at 0.4, 20% spread above
        let mut values = vec![0.2; 300];
        values.extend(vec![0.4; 500]);
        values.extend((0..200).map(|i| 0.6 + i as f64 / 1000.0));
        let c = ScoringCurve::from_samples(&samples(values), 100).unwrap();
        c.validate().unwrap();
        assert!((c.evaluate(0.2).unwrap() - 0.15).abs() < 1e-9);
        assert!((c.evaluate(0.4).unwrap() - 0.55).abs() < 1e-9);
        assert!((c.evaluate(0.3).unwrap() - 0.3).abs() < 1e-9);
        assert_eq!(c.evaluate(0.0).unwrap(), 0.0);
        assert_eq!(c.evaluate(1.0).unwrap(), 1.0);
    }

    #[test]
    fn zero_mass_keeps_zero_score() {
        let mut values = vec![0.0; 40];
        values.extend((0..60).map(|i| 0.3 + i as f64 / 200.0));
        let c = ScoringCurve::from_samples(&samples(values), 10).unwrap();
        c.validate().unwrap();
        assert_eq!(c.evaluate(0.0).unwrap(), 0.0);
        assert!((c.evaluate(0.1).unwrap() - 0.4).abs() < 1e-6);
    }

    #[test]
    fn fewer_samples_than_bins() {
        let c = ScoringCurve::from_samples(&samples(vec![0.3, 0.5, 0.7]), 100).unwrap();
        c.validate().unwrap();
        assert!(c.bins() < 100);
    }

    #[test]
    fn rejects_out_of_range() {
        let c = ScoringCurve::from_samples(&samples(vec![0.5]), 10).unwrap();
        assert!(c.evaluate(-0.01).is_err());
        assert!(c.evaluate(1.01).is_err());
        assert!(c.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = uniform_of(vec![0.2, 0.4, 0.41]);
        let json = c.to_json();
        assert!(json.contains("\"N_used\": 3"));
        assert_eq!(ScoringCurve::from_json(&json).unwrap(), c);
        let mut broken = c.clone();
        broken.cdf[5] = 0.0;
        assert!(ScoringCurve::from_json(&broken.to_json()).is_err());
    }
}
