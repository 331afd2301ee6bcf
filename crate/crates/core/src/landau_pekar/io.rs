use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::pair::PekarPair;
use super::solver::LpDiagnostics;
use crate::error::Result;
use crate::spectral::{BoxLattice, ComplexField, ModeVector};

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "norm", "energy", "energy_drift", "h2_norm", "l21_norm"];

pub fn write_trajectory_csv<W: Write>(mut out: W, rows: &[LpDiagnostics]) -> Result<()> {
    writeln!(out, "{}", TRAJECTORY_COLUMNS.join(","))?;
    for d in rows {
        writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            d.t, d.norm, d.energy, d.energy_drift, d.h2_norm, d.l21_norm
        )?;
    }
    Ok(())
}

/// JSON snapshot: lattice header plus `(re, im)` pairs in row-major order
/// (`psi` over positions, `phi` over momenta in FFT order).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub lattice: BoxLattice,
    pub t: f64,
    pub alpha: f64,
    pub psi: Vec<(f64, f64)>,
    pub phi: Vec<(f64, f64)>,
}

fn pairs(v: &[C64]) -> Vec<(f64, f64)> {
    v.iter().map(|c| (c.re, c.im)).collect()
}

fn complex(v: &[(f64, f64)]) -> Vec<C64> {
    v.iter().map(|&(re, im)| C64::new(re, im)).collect()
}

impl Snapshot {
    pub fn from_pair(t: f64, state: &PekarPair) -> Self {
        Self {
            lattice: *state.lattice(),
            t,
            alpha: state.alpha,
            psi: pairs(&state.psi.values),
            phi: pairs(&state.phi.values),
        }
    }

    pub fn to_pair(&self) -> Result<PekarPair> {
        self.lattice.validate()?;
        let psi = ComplexField::new(complex(&self.psi), self.lattice)?;
        let phi = ModeVector::new(complex(&self.phi), self.lattice)?;
        PekarPair::new(psi, phi, self.alpha)
    }
}

pub fn write_snapshot_json<W: Write>(out: W, t: f64, state: &PekarPair) -> Result<()> {
    serde_json::to_writer(out, &Snapshot::from_pair(t, state))?;
    Ok(())
}

pub fn read_snapshot_json<R: std::io::Read>(input: R) -> Result<PekarPair> {
    let snap: Snapshot = serde_json::from_reader(input)?;
    snap.to_pair()
}
