//! SIR-style probabilistic spreading over raster-derived point sets.
//!
//! The population is a set of points synthesized from a raster of cell
//! counts. One point starts infected; in every round each infected point
//! queries its probabilistic neighborhood and the susceptible points
//! returned become infected in the next round, while each infected point
//! recovers with a fixed rate and is then immune. The per-round queries
//! run against a median-split quadtree; a pairwise-probing backend exists
//! as the reference twin.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::geometry::{Geometry, PolarPoint};
use crate::query::{query_aggregated, ProbabilityFn, QueryBackend, RandomSource};
use crate::quadtree::{PolarQuadtree, RadialDensity};
use crate::reference::pdp_query;
use crate::{Error, Result};

/// A rectangular raster of nonnegative population counts.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterGrid {
    ncols: usize,
    nrows: usize,
    cell_size: f64,
    origin: (f64, f64),
    counts: Vec<f64>,
}

impl RasterGrid {
    pub fn new(
        ncols: usize,
        nrows: usize,
        cell_size: f64,
        origin: (f64, f64),
        counts: Vec<f64>,
    ) -> Result<Self> {
        if ncols == 0 || nrows == 0 {
            return Err(Error::EmptyRaster);
        }
        if !(cell_size > 0.0) || !cell_size.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        if counts.len() != ncols * nrows {
            return Err(Error::InvalidParameter(format!(
                "expected {} counts for a {ncols} x {nrows} raster, got {}",
                ncols * nrows,
                counts.len()
            )));
        }
        if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidParameter(
                "raster counts must be finite and nonnegative".to_string(),
            ));
        }
        Ok(RasterGrid {
            ncols,
            nrows,
            cell_size,
            origin,
            counts,
        })
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    #[inline]
    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    /// Count at `row` (0 = top row) and `col`.
    #[inline]
    pub fn count(&self, row: usize, col: usize) -> f64 {
        self.counts[row * self.ncols + col]
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Parses the plain-text raster format: the five header lines
    /// `ncols`, `nrows`, `xllcorner`, `yllcorner`, `cellsize` (any
    /// order), then up to `nrows` whitespace-separated rows of counts,
    /// top row first. Missing trailing values and rows are zero.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut ncols: Option<usize> = None;
        let mut nrows: Option<usize> = None;
        let mut xll: Option<f64> = None;
        let mut yll: Option<f64> = None;
        let mut cell: Option<f64> = None;

        let mut lines = reader.lines().enumerate();
        let mut header_seen = 0;
        let mut first_data: Option<(usize, String)> = None;
        for (i, line) in &mut lines {
            let line_no = i + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let mut parts = text.split_whitespace();
            let key = parts.next().unwrap_or_default().to_ascii_lowercase();
            let is_header = matches!(
                key.as_str(),
                "ncols" | "nrows" | "xllcorner" | "yllcorner" | "cellsize"
            );
            if !is_header {
                first_data = Some((line_no, line.clone()));
                break;
            }
            let value = parts.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("header `{key}` is missing its value"),
            })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("header `{key}` has trailing tokens"),
                });
            }
            let bad = |e: &dyn std::fmt::Display| Error::Parse {
                line: line_no,
                message: format!("bad value for `{key}`: {e}"),
            };
            match key.as_str() {
                "ncols" => ncols = Some(value.parse().map_err(|e| bad(&e))?),
                "nrows" => nrows = Some(value.parse().map_err(|e| bad(&e))?),
                "xllcorner" => xll = Some(value.parse().map_err(|e| bad(&e))?),
                "yllcorner" => yll = Some(value.parse().map_err(|e| bad(&e))?),
                "cellsize" => cell = Some(value.parse().map_err(|e| bad(&e))?),
                _ => unreachable!(),
            }
            header_seen += 1;
            if header_seen == 5 {
                break;
            }
        }
        let (Some(ncols), Some(nrows), Some(xll), Some(yll), Some(cell)) =
            (ncols, nrows, xll, yll, cell)
        else {
            return Err(Error::Parse {
                line: header_seen + 1,
                message: "incomplete raster header (need ncols, nrows, xllcorner, \
                          yllcorner, cellsize)"
                    .to_string(),
            });
        };
        if ncols == 0 || nrows == 0 {
            return Err(Error::EmptyRaster);
        }

        let mut counts = vec![0.0f64; ncols * nrows];
        let mut row = 0usize;
        let mut fill_row = |line_no: usize, text: &str, row: usize| -> Result<()> {
            if row >= nrows {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("more than {nrows} data rows"),
                });
            }
            for (col, token) in text.split_whitespace().enumerate() {
                if col >= ncols {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("row has more than {ncols} values"),
                    });
                }
                let value: f64 = token.parse().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad count `{token}`: {e}"),
                })?;
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("count must be nonnegative and finite, got {value}"),
                    });
                }
                counts[row * ncols + col] = value;
            }
            Ok(())
        };
        if let Some((line_no, text)) = first_data {
            fill_row(line_no, &text, row)?;
            row += 1;
        }
        for (i, line) in lines {
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            fill_row(i + 1, text, row)?;
            row += 1;
        }
        RasterGrid::new(ncols, nrows, cell, (xll, yll), counts)
    }
}

/// Points synthesized from a raster, in polar coordinates about the
/// raster centroid, together with the enclosing radius.
#[derive(Clone, Debug)]
pub struct SampledPoints {
    pub points: Vec<PolarPoint>,
    pub radius: f64,
}

/// Emits `count * fraction` points per cell (stochastically rounding the
/// fractional part), placed uniformly at random inside the cell, and
/// converts them to polar coordinates about the raster centroid.
pub fn raster_to_points(
    grid: &RasterGrid,
    fraction: f64,
    rng: &mut RandomSource,
) -> Result<SampledPoints> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let (x0, y0) = grid.origin();
    let size = grid.cell_size();
    let cx = x0 + grid.ncols() as f64 * size * 0.5;
    let cy = y0 + grid.nrows() as f64 * size * 0.5;
    let mut points = Vec::new();
    let mut radius = 0.0f64;
    for row in 0..grid.nrows() {
        for col in 0..grid.ncols() {
            let expected = grid.count(row, col) * fraction;
            let base = expected.floor();
            let frac = expected - base;
            let mut k = base as u64;
            if frac > 0.0 && rng.chance(frac) {
                k += 1;
            }
            for _ in 0..k {
                let x = x0 + (col as f64 + rng.next_unit()) * size;
                let y = y0 + ((grid.nrows() - 1 - row) as f64 + rng.next_unit()) * size;
                let (dx, dy) = (x - cx, y - cy);
                let r = dx.hypot(dy);
                let p = PolarPoint::new(dy.atan2(dx), r).expect("finite raster coordinates");
                radius = radius.max(r);
                points.push(p);
            }
        }
    }
    Ok(SampledPoints { points, radius })
}

/// Infection status of one point. `Recovered` is absorbing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Susceptible,
    Infected,
    Recovered,
}

/// Per-point statuses plus the round counter.
#[derive(Clone, Debug)]
pub struct SirState {
    statuses: Vec<Status>,
    step: usize,
}

impl SirState {
    fn new(n: usize, initial_infected: usize) -> Self {
        let mut statuses = vec![Status::Susceptible; n];
        statuses[initial_infected] = Status::Infected;
        SirState { statuses, step: 0 }
    }

    #[inline]
    pub fn status(&self, id: usize) -> Status {
        self.statuses[id]
    }

    #[inline]
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for s in &self.statuses {
            match s {
                Status::Susceptible => c.0 += 1,
                Status::Infected => c.1 += 1,
                Status::Recovered => c.2 += 1,
            }
        }
        c
    }
}

/// Simulation parameters.
#[derive(Clone, Debug)]
pub struct SpreadParams {
    /// Probability that an infected point recovers at the end of a round.
    pub recovery_rate: f64,
    /// Infection probability as a function of distance.
    pub f: ProbabilityFn,
    /// Id of the initially infected point.
    pub initial_infected: usize,
    /// Maximum number of rounds.
    pub steps: usize,
}

/// One row of the time series. Counts describe the state after the round;
/// row 0 is the initial state with the seed infection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpreadStep {
    pub step: usize,
    pub susceptible: usize,
    pub infected: usize,
    pub recovered: usize,
    pub new_infections: usize,
}

/// Full simulation output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadSeries {
    pub rows: Vec<SpreadStep>,
    /// Total neighborhood queries executed (one per infected point per
    /// round).
    pub total_queries: u64,
}

const RECOVERY_STREAM: u64 = u64::MAX;

/// Runs the spreading simulation over the given points.
///
/// Every query uses a stream derived from `(master, step, query id)` and
/// the recovery coins come from a dedicated per-step stream, so the
/// series is reproducible regardless of thread count and identical
/// between backends' engines given the same backend.
pub fn simulate(
    points: &[PolarPoint],
    g: Geometry,
    params: &SpreadParams,
    backend: QueryBackend,
    master: &RandomSource,
) -> Result<SpreadSeries> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    if params.initial_infected >= n {
        return Err(Error::IndexOutOfRange {
            index: params.initial_infected,
            size: n,
        });
    }
    if !(0.0..=1.0).contains(&params.recovery_rate) {
        return Err(Error::ProbabilityOutOfRange(params.recovery_rate));
    }

    let tree = match backend {
        QueryBackend::Aggregated => {
            let radius = points.iter().map(|p| p.r()).fold(0.0f64, f64::max).max(1e-9);
            let density = RadialDensity::empirical(radius)?;
            Some(PolarQuadtree::build(points, g, density, 32)?)
        }
        QueryBackend::Pdp => None,
    };

    let mut state = SirState::new(n, params.initial_infected);
    let mut rows = vec![SpreadStep {
        step: 0,
        susceptible: n - 1,
        infected: 1,
        recovered: 0,
        new_infections: 1,
    }];
    let mut total_queries = 0u64;

    for step in 1..=params.steps {
        let infected: Vec<usize> = (0..n)
            .filter(|&i| state.statuses[i] == Status::Infected)
            .collect();
        if infected.is_empty() {
            break;
        }
        total_queries += infected.len() as u64;
        let step_source = master.derive(step as u64);

        let neighborhoods: Vec<Vec<usize>> = infected
            .par_iter()
            .map(|&q| -> Result<Vec<usize>> {
                let mut rng = step_source.derive(q as u64);
                match &tree {
                    Some(tree) => {
                        Ok(query_aggregated(tree, points[q], &params.f, &mut rng)?.neighbors)
                    }
                    None => pdp_query(points, g, points[q], &params.f, &mut rng),
                }
            })
            .collect::<Result<_>>()?;

        let mut newly: Vec<usize> = Vec::new();
        for ids in &neighborhoods {
            for &id in ids {
                if state.statuses[id] == Status::Susceptible {
                    state.statuses[id] = Status::Infected;
                    newly.push(id);
                }
            }
        }

        let mut recovery_rng = step_source.derive(RECOVERY_STREAM);
        for &q in &infected {
            if recovery_rng.chance(params.recovery_rate) {
                state.statuses[q] = Status::Recovered;
            }
        }
        state.step = step;

        let (s, i, r) = state.counts();
        rows.push(SpreadStep {
            step,
            susceptible: s,
            infected: i,
            recovered: r,
            new_infections: newly.len(),
        });
        if i == 0 {
            break;
        }
    }

    Ok(SpreadSeries { rows, total_queries })
}

pub const SERIES_HEADER: &str = "step,susceptible,infected,recovered,new_infections";

pub fn write_series_csv<W: Write>(mut w: W, series: &SpreadSeries) -> Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for row in &series.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            row.step, row.susceptible, row.infected, row.recovered, row.new_infections
        )?;
    }
    Ok(())
}

pub fn read_series_csv<R: BufRead>(reader: R) -> Result<Vec<SpreadStep>> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if line_no == 1 {
            if text != SERIES_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected header `{text}`"),
                });
            }
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let num = |s: &str| -> Result<usize> {
            s.parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad count `{s}`: {e}"),
            })
        };
        rows.push(SpreadStep {
            step: num(fields[0])?,
            susceptible: num(fields[1])?,
            infected: num(fields[2])?,
            recovered: num(fields[3])?,
            new_infections: num(fields[4])?,
        });
    }
    Ok(rows)
}
