//! Ground-truth pairwise distance probing and the statistics used to
//! validate the tree queries against it.
//!
//! Pairwise distance probing (PDP) is the straightforward linear-time
//! algorithm: test every point individually. It serves as the correctness
//! oracle; the machinery here compares per-point inclusion frequencies
//! between algorithms with a two-proportion z-test at a Bonferroni-
//! corrected four-sigma threshold, and provides the chi-square
//! goodness-of-fit test used for the skip-width law and cell occupancy.

use std::io::{BufRead, Write};

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::geometry::{distance, Geometry, PolarPoint};
use crate::query::{query_aggregated, query_baseline, ProbabilityFn, RandomSource};
use crate::quadtree::PolarQuadtree;
use crate::{Error, Result};

/// Samples a probabilistic neighborhood by testing every point: point `i`
/// is included independently with probability `f(dist(q, points[i]))`.
/// Ids are positions in the input slice.
pub fn pdp_query(
    points: &[PolarPoint],
    g: Geometry,
    q: PolarPoint,
    f: &ProbabilityFn,
    rng: &mut RandomSource,
) -> Result<Vec<usize>> {
    let mut neighbors = Vec::new();
    for (id, &p) in points.iter().enumerate() {
        let prob = f.eval(distance(g, q, p))?;
        if rng.chance(prob) {
            neighbors.push(id);
        }
    }
    Ok(neighbors)
}

/// Per-point trial and inclusion counts accumulated over repeated
/// queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyTable {
    trials: Vec<u64>,
    inclusions: Vec<u64>,
}

impl FrequencyTable {
    pub fn new(points: usize) -> Self {
        FrequencyTable {
            trials: vec![0; points],
            inclusions: vec![0; points],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.trials.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    /// Records one trial for every point; the listed ids were included.
    pub fn record(&mut self, included: &[usize]) {
        for t in &mut self.trials {
            *t += 1;
        }
        for &id in included {
            self.inclusions[id] += 1;
        }
    }

    #[inline]
    pub fn trials(&self, point: usize) -> u64 {
        self.trials[point]
    }

    #[inline]
    pub fn inclusions(&self, point: usize) -> u64 {
        self.inclusions[point]
    }

    pub fn frequency(&self, point: usize) -> f64 {
        if self.trials[point] == 0 {
            0.0
        } else {
            self.inclusions[point] as f64 / self.trials[point] as f64
        }
    }

    /// Commutative merge of independently accumulated tables.
    pub fn merge(&mut self, other: &FrequencyTable) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::UniverseMismatch {
                a: self.len(),
                b: other.len(),
            });
        }
        for i in 0..self.trials.len() {
            self.trials[i] += other.trials[i];
            self.inclusions[i] += other.inclusions[i];
        }
        Ok(())
    }

    /// Overwrites a point's inclusion count. Fault-injection hook for
    /// testing the comparison machinery; keeps `inclusions <= trials`.
    pub fn set_inclusions(&mut self, point: usize, inclusions: u64) {
        self.inclusions[point] = inclusions.min(self.trials[point]);
    }
}

/// One point whose frequencies differ beyond the test threshold.
#[derive(Clone, Debug)]
pub struct ComparisonFailure {
    pub point: usize,
    pub z: f64,
    pub freq_a: f64,
    pub freq_b: f64,
}

/// Result of the two-proportion comparison across a point universe.
#[derive(Clone, Debug)]
pub struct ComparisonReport {
    /// Per-point z statistics.
    pub z_scores: Vec<f64>,
    /// Largest |z| observed.
    pub max_z: f64,
    /// Bonferroni-corrected threshold the failures exceeded.
    pub threshold: f64,
    pub failures: Vec<ComparisonFailure>,
    /// Points with too few expected successes or failures for the normal
    /// approximation to have any detection power.
    pub underpowered: Vec<usize>,
}

/// Two-proportion z statistic per point, with failures flagged beyond a
/// four-sigma threshold Bonferroni-corrected across the points.
pub fn frequency_compare(a: &FrequencyTable, b: &FrequencyTable) -> Result<ComparisonReport> {
    if a.len() != b.len() {
        return Err(Error::UniverseMismatch { a: a.len(), b: b.len() });
    }
    for i in 0..a.len() {
        if a.trials(i) != b.trials(i) {
            return Err(Error::TrialMismatch { point: i });
        }
    }
    let threshold = bonferroni_threshold(4.0, a.len().max(1));
    let mut z_scores = Vec::with_capacity(a.len());
    let mut failures = Vec::new();
    let mut underpowered = Vec::new();
    let mut max_z = 0.0f64;
    for i in 0..a.len() {
        let (na, nb) = (a.trials(i) as f64, b.trials(i) as f64);
        let (xa, xb) = (a.inclusions(i) as f64, b.inclusions(i) as f64);
        let z = if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            let pooled = (xa + xb) / (na + nb);
            let den = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
            if den == 0.0 {
                0.0
            } else {
                (xa / na - xb / nb) / den
            }
        };
        let expected = xa + xb;
        if expected < 5.0 || (na + nb - expected) < 5.0 {
            underpowered.push(i);
        }
        max_z = max_z.max(z.abs());
        if z.abs() > threshold {
            failures.push(ComparisonFailure {
                point: i,
                z,
                freq_a: a.frequency(i),
                freq_b: b.frequency(i),
            });
        }
        z_scores.push(z);
    }
    Ok(ComparisonReport {
        z_scores,
        max_z,
        threshold,
        failures,
        underpowered,
    })
}

/// Threshold with the same family-wise false-alarm rate as a single
/// `base_sigma` two-sided test, corrected for `m` simultaneous tests.
pub fn bonferroni_threshold(base_sigma: f64, m: usize) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let tail = 1.0 - normal.cdf(base_sigma);
    normal.inverse_cdf(1.0 - tail / m as f64)
}

/// Half-width of the `k_sigma` binomial confidence band around `p` after
/// `trials` draws.
pub fn binomial_sigma_bound(p: f64, trials: u64, k_sigma: f64) -> f64 {
    k_sigma * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Chi-square goodness-of-fit result.
#[derive(Clone, Copy, Debug)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against expected counts.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need matching histograms with at least two bins, got {} and {}",
            observed.len(),
            expected.len()
        )));
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter(
            "expected counts must be positive".to_string(),
        ));
    }
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).unwrap();
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
    })
}

/// Accumulates inclusion frequencies for the same query under all three
/// algorithms: PDP, baseline, and aggregated, in that order. Each trial
/// uses streams derived from the master source, so the tables are
/// reproducible.
pub fn three_way_tables(
    points: &[PolarPoint],
    tree: &PolarQuadtree,
    q: PolarPoint,
    f: &ProbabilityFn,
    trials: u64,
    master: &RandomSource,
) -> Result<[FrequencyTable; 3]> {
    let mut pdp = FrequencyTable::new(points.len());
    let mut baseline = FrequencyTable::new(points.len());
    let mut aggregated = FrequencyTable::new(points.len());
    for t in 0..trials {
        let trial = master.derive(t);
        pdp.record(&pdp_query(points, tree.geometry(), q, f, &mut trial.derive(0))?);
        baseline.record(&query_baseline(tree, q, f, &mut trial.derive(1))?.neighbors);
        aggregated.record(&query_aggregated(tree, q, f, &mut trial.derive(2))?.neighbors);
    }
    Ok([pdp, baseline, aggregated])
}

/// One row of the validation report.
#[derive(Clone, Debug)]
pub struct ValidationRow {
    pub point_id: usize,
    pub distance: f64,
    pub expected_p: f64,
    pub freq_pdp: f64,
    pub freq_baseline: f64,
    pub freq_aggregated: f64,
    pub z_base: f64,
    pub z_aggr: f64,
    pub warning: String,
}

pub const VALIDATION_HEADER: &str =
    "point_id,distance,expected_p,freq_pdp,freq_baseline,freq_aggregated,z_base,z_aggr,warning";

pub fn write_validation_csv<W: Write>(mut w: W, rows: &[ValidationRow]) -> Result<()> {
    writeln!(w, "{VALIDATION_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.point_id,
            r.distance,
            r.expected_p,
            r.freq_pdp,
            r.freq_baseline,
            r.freq_aggregated,
            r.z_base,
            r.z_aggr,
            r.warning
        )?;
    }
    Ok(())
}

pub fn read_validation_csv<R: BufRead>(reader: R) -> Result<Vec<ValidationRow>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if line_no == 1 {
            if text != VALIDATION_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected header `{text}`"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 9 fields, got {}", fields.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad {what} `{s}`: {e}"),
            })
        };
        rows.push(ValidationRow {
            point_id: fields[0].parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad point_id `{}`: {e}", fields[0]),
            })?,
            distance: num(fields[1], "distance")?,
            expected_p: num(fields[2], "expected_p")?,
            freq_pdp: num(fields[3], "freq_pdp")?,
            freq_baseline: num(fields[4], "freq_baseline")?,
            freq_aggregated: num(fields[5], "freq_aggregated")?,
            z_base: num(fields[6], "z_base")?,
            z_aggr: num(fields[7], "z_aggr")?,
            warning: fields[8].to_string(),
        });
    }
    Ok(rows)
}
