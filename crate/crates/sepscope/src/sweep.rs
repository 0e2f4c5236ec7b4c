//! The (p1, p2) noise-sweep engine over the four-qubit mixture family.
//!
//! Grid points are independent and evaluated in parallel inside whatever
//! rayon pool is current; rows are emitted in row-major order (p1 outer)
//! regardless of completion order, and all formatting is fixed-width
//! scientific with 12 significant digits, so output bytes depend only on
//! the sweep parameters.

use crate::fmt12;
use anyhow::{ensure, Result};
use rayon::prelude::*;
use sepscope_core::bounds::{BoundProfile, BoundVariant, WitnessTable};
use sepscope_core::measures::MeasureConfig;
use sepscope_core::states::{bbo_state, BboParams, NoiseCoords};
use sepscope_core::tensor::SystemShape;
use std::io::Write;

/// Contour bins for the lower-bound values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorBin {
    Red,
    DarkPurple,
    BrightPurple,
    Blue,
    Ash,
    Overflow,
}

impl ColorBin {
    /// Zero means below 1e-12; the band edges are inclusive on the upper
    /// side, so 0.25 bins dark-purple. Every edge carries the same 1e-12
    /// slack so grid points whose true value sits exactly on an edge bin
    /// stably despite round-off. Values past 1 (possible only for
    /// diagnostic variants) are surfaced as overflow rather than clamped.
    pub fn classify(value: f64) -> ColorBin {
        const EDGE: f64 = 1e-12;
        if value < EDGE {
            ColorBin::Red
        } else if value <= 0.25 + EDGE {
            ColorBin::DarkPurple
        } else if value <= 0.5 + EDGE {
            ColorBin::BrightPurple
        } else if value <= 0.75 + EDGE {
            ColorBin::Blue
        } else if value <= 1.0 + EDGE {
            ColorBin::Ash
        } else {
            ColorBin::Overflow
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ColorBin::Red => "red",
            ColorBin::DarkPurple => "dark-purple",
            ColorBin::BrightPurple => "bright-purple",
            ColorBin::Blue => "blue",
            ColorBin::Ash => "ash",
            ColorBin::Overflow => "overflow",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub p1_steps: usize,
    pub p2_steps: usize,
    /// Which of m = 2, 3, 4 to evaluate.
    pub ms: Vec<usize>,
    pub variant: BoundVariant,
}

impl SweepSpec {
    pub fn new(p1_steps: usize, p2_steps: usize, ms: Vec<usize>, variant: BoundVariant) -> Result<Self> {
        ensure!(p1_steps >= 2 && p2_steps >= 2, "need at least 2 steps per axis");
        ensure!(!ms.is_empty(), "need at least one m");
        ensure!(
            ms.iter().all(|m| (2..=4).contains(m)),
            "sweep columns cover m of 2, 3 and 4"
        );
        Ok(Self {
            p1_steps,
            p2_steps,
            ms,
            variant,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
    /// `None` is the infinite ratio at p1 = 0, serialized as `inf`.
    pub r: Option<f64>,
    /// Lower-bound values for m = 2, 3, 4; absent when not requested.
    pub values: [Option<f64>; 3],
}

impl SweepRow {
    pub fn value(&self, m: usize) -> Option<f64> {
        self.values[m - 2]
    }
}

#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Runs the sweep. Only lattice points with `p1 + p2 <= 1` (exact in the
/// step integers) are present.
pub fn compute_sweep(spec: &SweepSpec) -> Result<SweepGrid> {
    let (s1, s2) = (spec.p1_steps - 1, spec.p2_steps - 1);
    let mut coords = Vec::new();
    for i in 0..=s1 {
        for j in 0..=s2 {
            if i * s2 + j * s1 <= s1 * s2 {
                coords.push((i, j));
            }
        }
    }
    let table = WitnessTable::for_shape(&SystemShape::qubits(4)?)?;
    let rows: Vec<SweepRow> = coords
        .par_iter()
        .map(|&(i, j)| -> Result<SweepRow> {
            let p1 = i as f64 / s1 as f64;
            let p2 = j as f64 / s2 as f64;
            let params = BboParams::new(p1, p2)?;
            let rho = bbo_state(params)?;
            let mut profile = BoundProfile::with_table(&rho, spec.variant, MeasureConfig::calibrated(), &table);
            let mut values = [None; 3];
            for &m in &spec.ms {
                values[m - 2] = Some(profile.rm(m, None)?.rm_tilde);
            }
            let coords = NoiseCoords::from_params(&params);
            Ok(SweepRow {
                p1,
                p2,
                q: coords.q,
                r: coords.r,
                values,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepGrid {
        spec: spec.clone(),
        rows,
    })
}

pub const CSV_HEADER: &str = "p1,p2,q,r,R2,R3,R4,bin2,bin3,bin4";

pub fn write_csv(grid: &SweepGrid, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &grid.rows {
        let r = match row.r {
            Some(r) => fmt12(r),
            None => "inf".to_string(),
        };
        let mut cols = vec![fmt12(row.p1), fmt12(row.p2), fmt12(row.q), r];
        for v in row.values {
            cols.push(v.map(fmt12).unwrap_or_default());
        }
        for v in row.values {
            cols.push(v.map(|x| ColorBin::classify(x).as_str().to_string()).unwrap_or_default());
        }
        writeln!(out, "{}", cols.join(","))?;
    }
    Ok(())
}

pub fn csv_string(grid: &SweepGrid) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(grid, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is ascii"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_have_inclusive_upper_edges() {
        assert_eq!(ColorBin::classify(0.0), ColorBin::Red);
        assert_eq!(ColorBin::classify(5e-13), ColorBin::Red);
        assert_eq!(ColorBin::classify(0.25), ColorBin::DarkPurple);
        assert_eq!(ColorBin::classify(0.2500001), ColorBin::BrightPurple);
        assert_eq!(ColorBin::classify(0.5), ColorBin::BrightPurple);
        assert_eq!(ColorBin::classify(0.75), ColorBin::Blue);
        assert_eq!(ColorBin::classify(1.0), ColorBin::Ash);
        assert_eq!(ColorBin::classify(1.5), ColorBin::Overflow);
    }

    #[test]
    fn small_sweep_has_expected_corners() {
        let spec = SweepSpec::new(3, 3, vec![2, 3, 4], BoundVariant::Quadrature).unwrap();
        let grid = compute_sweep(&spec).unwrap();
        // 6 of the 9 lattice points satisfy p1 + p2 <= 1.
        assert_eq!(grid.rows.len(), 6);
        let origin = &grid.rows[0];
        assert_eq!((origin.p1, origin.p2), (0.0, 0.0));
        assert_eq!(origin.r, None);
        for m in 2..=4 {
            assert_eq!(origin.value(m), Some(0.0));
        }
        // (p1, p2) = (1, 0) forces the {12|34} factor to zero.
        let pairs_corner = grid.rows.iter().find(|r| r.p1 == 1.0).unwrap();
        assert_eq!(pairs_corner.value(2), Some(0.0));
        assert!(pairs_corner.value(3).unwrap() > 0.0);
    }

    #[test]
    fn csv_is_deterministic_and_ordered() {
        let spec = SweepSpec::new(4, 4, vec![2, 3, 4], BoundVariant::Quadrature).unwrap();
        let a = csv_string(&compute_sweep(&spec).unwrap()).unwrap();
        let b = csv_string(&compute_sweep(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("0.00000000000e0,0.00000000000e0,1.00000000000e0,inf,"));
        assert!(lines[1].ends_with("red,red,red"));
    }
}
