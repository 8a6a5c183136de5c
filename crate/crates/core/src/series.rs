//! Emden–Fowler series `(J, T, T')` and finite-difference helpers on
//! nonuniform grids.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One point of a mapped series: angular momentum `j`, integrated torque
/// `t` and its slope `t_prime = dT/dJ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EFPoint {
    pub j: f64,
    pub t: f64,
    pub t_prime: f64,
}

impl EFPoint {
    pub fn new(j: f64, t: f64, t_prime: f64) -> Self {
        Self { j, t, t_prime }
    }
}

/// A series of Emden–Fowler points with strictly increasing `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EFSeries {
    pub points: Vec<EFPoint>,
    pub mu: f64,
    pub r0: f64,
    /// Whether the `(mu + 2)` scaling that removes the equation's prefactor was applied.
    pub scaled: bool,
    /// Set when the source samples were not monotone in `j` and only the
    /// longest monotone segment was kept.
    pub trimmed: bool,
}

impl EFSeries {
    /// Builds a series from points that must already be strictly increasing in `j`.
    pub fn new(points: Vec<EFPoint>, mu: f64, r0: f64, scaled: bool) -> Result<Self> {
        if points
            .iter()
            .any(|p| !(p.j.is_finite() && p.t.is_finite() && p.t_prime.is_finite()))
        {
            return Err(Error::Domain("non-finite point in series".into()));
        }
        if points.windows(2).any(|w| w[1].j <= w[0].j) {
            return Err(Error::Domain("J must be strictly increasing".into()));
        }
        Ok(Self {
            points,
            mu,
            r0,
            scaled,
            trimmed: false,
        })
    }

    /// Keeps the longest segment on which `j` is strictly monotone and
    /// orders it by increasing `j`.
    pub fn from_samples(points: Vec<EFPoint>, mu: f64, r0: f64, scaled: bool) -> Result<Self> {
        let js: Vec<f64> = points.iter().map(|p| p.j).collect();
        let seg = longest_monotone_segment(&js);
        let trimmed = seg.len() != points.len();
        let mut kept: Vec<EFPoint> = points[seg].to_vec();
        if kept.len() >= 2 && kept[1].j < kept[0].j {
            kept.reverse();
        }
        let mut series = Self::new(kept, mu, r0, scaled)?;
        series.trimmed = trimmed;
        Ok(series)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn js(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.j).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn t_primes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t_prime).collect()
    }
}

/// Index range of the longest run on which `xs` is strictly monotone
/// (either direction). Ties go to the earliest run.
pub fn longest_monotone_segment(xs: &[f64]) -> Range<usize> {
    if xs.len() < 2 {
        return 0..xs.len();
    }
    let mut best = 0..1;
    let mut start = 0;
    let mut dir = 0i8;
    for i in 1..xs.len() {
        let d = match xs[i].partial_cmp(&xs[i - 1]) {
            Some(std::cmp::Ordering::Greater) => 1,
            Some(std::cmp::Ordering::Less) => -1,
            _ => 0,
        };
        if d == 0 {
            start = i;
            dir = 0;
        } else if dir != 0 && d != dir {
            // the turning point belongs to both runs
            start = i - 1;
            dir = d;
        } else {
            dir = d;
        }
        if i + 1 - start > best.len() {
            best = start..i + 1;
        }
    }
    best
}

fn check_strictly_monotone(xs: &[f64]) -> Result<()> {
    let inc = xs.windows(2).all(|w| w[1] > w[0]);
    let dec = xs.windows(2).all(|w| w[1] < w[0]);
    if inc || dec {
        Ok(())
    } else {
        Err(Error::Domain("abscissae are not strictly monotone".into()))
    }
}

/// Second derivative at interior points of a nonuniform grid with the
/// three-point formula. Exact for quadratics; endpoints are excluded.
pub fn second_derivative(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::Argument("x and y lengths differ".into()));
    }
    if xs.len() < 3 {
        return Err(Error::Argument("need at least 3 points".into()));
    }
    check_strictly_monotone(xs)?;
    Ok((1..xs.len() - 1)
        .map(|i| {
            let h1 = xs[i] - xs[i - 1];
            let h2 = xs[i + 1] - xs[i];
            2.0 * (h1 * ys[i + 1] - (h1 + h2) * ys[i] + h2 * ys[i - 1]) / (h1 * h2 * (h1 + h2))
        })
        .collect())
}

/// First derivative at interior points of a nonuniform grid, second-order accurate.
pub fn first_derivative(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::Argument("x and y lengths differ".into()));
    }
    if xs.len() < 3 {
        return Err(Error::Argument("need at least 3 points".into()));
    }
    check_strictly_monotone(xs)?;
    Ok((1..xs.len() - 1)
        .map(|i| {
            let h1 = xs[i] - xs[i - 1];
            let h2 = xs[i + 1] - xs[i];
            -h2 / (h1 * (h1 + h2)) * ys[i - 1] + (h2 - h1) / (h1 * h2) * ys[i] + h1 / (h2 * (h1 + h2)) * ys[i + 1]
        })
        .collect())
}

/// `d²T/dJ²` at the interior points of a series.
pub fn fd_second_derivative(series: &EFSeries) -> Result<Vec<f64>> {
    second_derivative(&series.js(), &series.ts())
}
