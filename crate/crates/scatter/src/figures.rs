//! Reference datasets: the eight standard tables this crate is checked
//! against, as plain CSV.
//!
//! Each table sweeps one family and lays the approximation columns next
//! to the exact reference so any plotting tool can overlay them. The
//! schemas (documented on [`figure`]) are stable; values print with 12
//! significant digits.

use thiserror::Error;

use crate::eikonal::EikonalError;
use crate::exact::{self, ExactError, RadialGrid};
use crate::numerics::log_grid;
use crate::perturbation::PerturbationError;
use crate::potentials::{Potential, PotentialError};
use crate::qma::{self, Calibration, QmaError};
use crate::unitary::{self, UnitaryError};

/// One figure's worth of data: a header and homogeneous numeric rows.
#[derive(Debug, Clone)]
pub struct FigureTable {
    pub id: u8,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    /// CSV rendering: header row, then 12-significant-digit values.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("figure id {0} is unknown (valid: 1..=8)")]
    UnknownId(u8),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
    #[error(transparent)]
    Qma(#[from] QmaError),
    #[error(transparent)]
    Unitary(#[from] UnitaryError),
    #[error(transparent)]
    Eikonal(#[from] EikonalError),
}

const SIGMA_COUPLINGS: [f64; 3] = [5.0, 10.0, 15.0];

fn k_sweep() -> Vec<f64> {
    log_grid(0.01, 10.0, 25)
}

fn g_sweep() -> Vec<f64> {
    log_grid(0.5, 50.0, 20)
}

/// QMA momentum scale for a cross-section sweep: the zero-momentum
/// cross-section calibration where it has a root, else the amplitude
/// calibration (the square barrier loses the sigma root at strong
/// coupling; see [`qma::calibrate_kc_sigma`]).
fn qma_scale(pot: &Potential, b: f64) -> Result<Calibration, QmaError> {
    match qma::calibrate_kc_sigma(pot, b) {
        Ok(cal) => Ok(cal),
        Err(QmaError::NoRoot { .. }) => qma::calibrate_kc_amplitude(pot, b),
        Err(e) => Err(e),
    }
}

/// Builds the dataset behind one of the eight reference figures.
///
/// Schemas:
/// 1. `G, a_exact, a_qma_b1, a_qma_b08`: square-barrier length.
/// 2. `G, k, sigma_qma_b1, sigma_qma_b08, sigma_exact`: square-barrier
///    cross sections at G = 5, 10, 15.
/// 3. `N, f_qma, f_exact`: singular-core length coefficients at
///    G = N - 1, where both reduce to pure Gamma profiles.
/// 4. `G, a_exact, a_qma_b1, a_qma_b07`: Yukawa length.
/// 5. `G, k, sigma_qma, sigma_exact`: Yukawa QMA cross sections.
/// 6. `G, k_c, a_unitary, a_exact`: Yukawa unitary length and its
///    solved closure scale.
/// 7. `G, k, sigma_unitary, sigma_exact`: Yukawa unitary cross sections.
/// 8. `G, k, sigma_exact, sigma_qma, sigma_unitary`: the combined
///    Yukawa comparison.
pub fn figure(id: u8) -> Result<FigureTable, FigureError> {
    match id {
        1 => square_length(),
        2 => square_sigma(),
        3 => singular_profile(),
        4 => yukawa_length(),
        5 => yukawa_qma_sigma(),
        6 => yukawa_unitary_length(),
        7 => yukawa_unitary_sigma(),
        8 => yukawa_combined_sigma(),
        other => Err(FigureError::UnknownId(other)),
    }
}

fn square_length() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for g in g_sweep() {
        rows.push(vec![
            g,
            exact::square_scattering_length(g, 1.0)?,
            qma::square_qma_length_closed(g, 1.0, 1.0)?,
            qma::square_qma_length_closed(g, 1.0, 0.8)?,
        ]);
    }
    Ok(FigureTable {
        id: 1,
        columns: vec!["G", "a_exact", "a_qma_b1", "a_qma_b08"],
        rows,
    })
}

fn square_sigma() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for &g in &SIGMA_COUPLINGS {
        let pot = Potential::square_barrier(g, 1.0)?;
        let scale_b1 = qma_scale(&pot, 1.0)?;
        let scale_b08 = qma_scale(&pot, 0.8)?;
        for k in k_sweep() {
            rows.push(vec![
                g,
                k,
                qma::qma_sigma(&pot, k, scale_b1.k_c)?,
                qma::qma_sigma(&pot, k, scale_b08.k_c)?,
                exact::square_cross_section(g, 1.0, k)?.sigma,
            ]);
        }
    }
    Ok(FigureTable {
        id: 2,
        columns: vec!["G", "k", "sigma_qma_b1", "sigma_qma_b08", "sigma_exact"],
        rows,
    })
}

fn singular_profile() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for n in 2..=40_u32 {
        let g = (n - 1) as f64;
        rows.push(vec![
            n as f64,
            qma::singular_qma_length(g, n, 1.0)?,
            exact::singular_exact_length(g, n)?,
        ]);
    }
    Ok(FigureTable {
        id: 3,
        columns: vec!["N", "f_qma", "f_exact"],
        rows,
    })
}

fn yukawa_length() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for g in g_sweep() {
        let pot = Potential::yukawa(g)?;
        let grid = RadialGrid::default_for(&pot);
        rows.push(vec![
            g,
            exact::numerov_scattering_length(&pot, &grid)?,
            qma::qma_scattering_length(&pot, 1.0)?,
            qma::qma_scattering_length(&pot, 0.7)?,
        ]);
    }
    Ok(FigureTable {
        id: 4,
        columns: vec!["G", "a_exact", "a_qma_b1", "a_qma_b07"],
        rows,
    })
}

fn yukawa_qma_sigma() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for &g in &SIGMA_COUPLINGS {
        let pot = Potential::yukawa(g)?;
        let grid = RadialGrid::default_for(&pot);
        let scale = qma_scale(&pot, 1.0)?;
        for k in k_sweep() {
            rows.push(vec![
                g,
                k,
                qma::qma_sigma(&pot, k, scale.k_c)?,
                exact::yukawa_cross_section(&pot, k, &grid)?.sigma,
            ]);
        }
    }
    Ok(FigureTable {
        id: 5,
        columns: vec!["G", "k", "sigma_qma", "sigma_exact"],
        rows,
    })
}

fn yukawa_unitary_length() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for g in g_sweep() {
        let pot = Potential::yukawa(g)?;
        let grid = RadialGrid::default_for(&pot);
        let solution = unitary::solve_unitary(&pot)?;
        rows.push(vec![
            g,
            solution.k_c,
            solution.reported_length(),
            exact::numerov_scattering_length(&pot, &grid)?,
        ]);
    }
    Ok(FigureTable {
        id: 6,
        columns: vec!["G", "k_c", "a_unitary", "a_exact"],
        rows,
    })
}

fn yukawa_unitary_sigma() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for &g in &SIGMA_COUPLINGS {
        let pot = Potential::yukawa(g)?;
        let grid = RadialGrid::default_for(&pot);
        let solution = unitary::solve_unitary(&pot)?;
        for k in k_sweep() {
            rows.push(vec![
                g,
                k,
                unitary::unitary_sigma(&pot, k, &solution)?,
                exact::yukawa_cross_section(&pot, k, &grid)?.sigma,
            ]);
        }
    }
    Ok(FigureTable {
        id: 7,
        columns: vec!["G", "k", "sigma_unitary", "sigma_exact"],
        rows,
    })
}

fn yukawa_combined_sigma() -> Result<FigureTable, FigureError> {
    let mut rows = Vec::new();
    for &g in &SIGMA_COUPLINGS {
        let pot = Potential::yukawa(g)?;
        let grid = RadialGrid::default_for(&pot);
        let scale = qma_scale(&pot, 1.0)?;
        let solution = unitary::solve_unitary(&pot)?;
        for k in k_sweep() {
            rows.push(vec![
                g,
                k,
                exact::yukawa_cross_section(&pot, k, &grid)?.sigma,
                qma::qma_sigma(&pot, k, scale.k_c)?,
                unitary::unitary_sigma(&pot, k, &solution)?,
            ]);
        }
    }
    Ok(FigureTable {
        id: 8,
        columns: vec!["G", "k", "sigma_exact", "sigma_qma", "sigma_unitary"],
        rows,
    })
}
