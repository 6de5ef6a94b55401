use crate::error::{Error, Result};

/// One axis of a sampling lattice: `points` evenly spaced values from `lo`
/// to `hi` inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn extent(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Axis-aligned lattice of sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Grid("no axes".into()));
        }
        for (k, a) in axes.iter().enumerate() {
            if a.points == 0 || !a.lo.is_finite() || !a.hi.is_finite() || a.lo > a.hi {
                return Err(Error::Grid(format!("axis {} is empty or inverted", k + 1)));
            }
            if a.points > 1 && a.lo == a.hi {
                return Err(Error::Grid(format!("axis {} has zero extent", k + 1)));
            }
        }
        Ok(GridSpec { axes })
    }

    /// Parses `"lo1:hi1:k1,lo2:hi2:k2,..."` where `k` is the number of
    /// points on that axis.
    pub fn parse(text: &str) -> Result<Self> {
        let axes = text
            .split(',')
            .map(|part| {
                let fields: Vec<&str> = part.trim().split(':').collect();
                let [lo, hi, k] = fields[..] else {
                    return Err(Error::Grid(format!("expected lo:hi:k, got `{part}`")));
                };
                let num = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Grid(format!("bad number `{s}`")))
                };
                Ok(Axis {
                    lo: num(lo)?,
                    hi: num(hi)?,
                    points: k
                        .trim()
                        .parse()
                        .map_err(|_| Error::Grid(format!("bad point count `{k}`")))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    /// A cube of half-width `radius` around `center`, `points` per axis.
    pub fn around(center: &[f64], radius: f64, points: usize) -> Result<Self> {
        Self::new(
            center
                .iter()
                .map(|&c| Axis {
                    lo: c - radius,
                    hi: c + radius,
                    points,
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `flat`-th point, last axis varying fastest.
    pub fn point(&self, mut flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = a.value(flat % a.points);
            flat /= a.points;
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Default integration step per axis: 1/64 of the axis extent.
    pub fn default_steps(&self) -> Vec<f64> {
        self.axes
            .iter()
            .map(|a| if a.extent() > 0.0 { a.extent() / 64.0 } else { 1.0 / 64.0 })
            .collect()
    }
}
