//! Domain types shared by the rules, the engine, and scenario building.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{ImpactDegreeMap, ImpactProfile};

/// Living cells age from 1 to 100 time units; 0 is reserved for dead cells.
pub const MAX_AGE: u32 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("age {0} outside 1..={MAX_AGE}")]
    AgeOutOfRange(u32),
    #[error("dead cells carry age 0, got {0}")]
    DeadWithNonzeroAge(u32),
    #[error("age bands invalid: {0}")]
    InvalidBands(String),
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("alpha = {0} must be in (0, 1]")]
    AlphaOutOfRange(f64),
    #[error("aging period must be positive")]
    ZeroAgingPeriod,
}

/// The four epidemiological states. `Dead` doubles as empty space awaiting a
/// birth: a dead cell's slot can be re-occupied by a newborn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EpidemicState {
    #[serde(rename = "S")]
    Susceptible,
    #[serde(rename = "I")]
    Infected,
    #[serde(rename = "R")]
    Recovered,
    #[serde(rename = "D")]
    Dead,
}

impl EpidemicState {
    pub fn is_living(self) -> bool {
        self != EpidemicState::Dead
    }

    pub fn letter(self) -> char {
        match self {
            EpidemicState::Susceptible => 'S',
            EpidemicState::Infected => 'I',
            EpidemicState::Recovered => 'R',
            EpidemicState::Dead => 'D',
        }
    }
}

impl fmt::Display for EpidemicState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One individual: epidemiological state plus age.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub state: EpidemicState,
    pub age: u32,
}

impl Cell {
    pub fn living(state: EpidemicState, age: u32) -> Result<Self, ModelError> {
        if state == EpidemicState::Dead {
            if age != 0 {
                return Err(ModelError::DeadWithNonzeroAge(age));
            }
            return Ok(Cell::dead());
        }
        if !(1..=MAX_AGE).contains(&age) {
            return Err(ModelError::AgeOutOfRange(age));
        }
        Ok(Cell { state, age })
    }

    /// Dead cell / empty space: state D, age 0.
    pub fn dead() -> Self {
        Cell {
            state: EpidemicState::Dead,
            age: 0,
        }
    }

    /// Newborns enter susceptible with age 1.
    pub fn newborn() -> Self {
        Cell {
            state: EpidemicState::Susceptible,
            age: 1,
        }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        Cell::living(self.state, self.age).map(|_| ())
    }
}

/// Per-state head counts of a population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StateCounts {
    pub susceptible: usize,
    pub infected: usize,
    pub recovered: usize,
    pub dead: usize,
}

impl StateCounts {
    pub fn total(&self) -> usize {
        self.susceptible + self.infected + self.recovered + self.dead
    }
}

/// The cell space: a fixed roster of cells plus the interaction structure
/// they live on. The degree map is shared, never copied, across replicas.
#[derive(Debug, Clone)]
pub struct Population {
    cells: Vec<Cell>,
    degrees: Arc<ImpactDegreeMap>,
    profile: ImpactProfile,
}

impl Population {
    pub fn new(cells: Vec<Cell>, degrees: Arc<ImpactDegreeMap>, profile: ImpactProfile) -> Self {
        Population {
            cells,
            degrees,
            profile,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> Cell {
        self.cells[index]
    }

    pub fn degrees(&self) -> &ImpactDegreeMap {
        &self.degrees
    }

    pub fn shared_degrees(&self) -> Arc<ImpactDegreeMap> {
        Arc::clone(&self.degrees)
    }

    pub fn profile(&self) -> &ImpactProfile {
        &self.profile
    }

    /// Same structure, new roster. The replacement must preserve length;
    /// population size is constant over a simulation.
    pub fn with_cells(&self, cells: Vec<Cell>) -> Self {
        assert_eq!(cells.len(), self.cells.len(), "population size is fixed");
        Population {
            cells,
            degrees: Arc::clone(&self.degrees),
            profile: self.profile.clone(),
        }
    }

    pub fn state_counts(&self) -> StateCounts {
        let mut counts = StateCounts::default();
        for cell in &self.cells {
            match cell.state {
                EpidemicState::Susceptible => counts.susceptible += 1,
                EpidemicState::Infected => counts.infected += 1,
                EpidemicState::Recovered => counts.recovered += 1,
                EpidemicState::Dead => counts.dead += 1,
            }
        }
        counts
    }
}

/// An age band: inclusive range of ages with one probability.
/// Serializes as `[lo, hi, probability]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(u32, u32, f64)", into = "(u32, u32, f64)")]
pub struct AgeBand {
    pub lo: u32,
    pub hi: u32,
    pub probability: f64,
}

impl From<(u32, u32, f64)> for AgeBand {
    fn from((lo, hi, probability): (u32, u32, f64)) -> Self {
        AgeBand {
            lo,
            hi,
            probability,
        }
    }
}

impl From<AgeBand> for (u32, u32, f64) {
    fn from(band: AgeBand) -> Self {
        (band.lo, band.hi, band.probability)
    }
}

/// Probabilities banded over the age interval `[1, 100]`. Bands must be
/// disjoint and jointly cover the whole interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AgeBand>", into = "Vec<AgeBand>")]
pub struct AgeBandTable {
    bands: Vec<AgeBand>,
}

impl AgeBandTable {
    pub fn new(mut bands: Vec<AgeBand>) -> Result<Self, ModelError> {
        bands.sort_by_key(|band| band.lo);
        let mut expected_lo = 1;
        for band in &bands {
            if band.lo > band.hi {
                return Err(ModelError::InvalidBands(format!(
                    "band [{}, {}] is empty",
                    band.lo, band.hi
                )));
            }
            if band.lo != expected_lo {
                return Err(ModelError::InvalidBands(format!(
                    "expected a band starting at {expected_lo}, found [{}, {}]",
                    band.lo, band.hi
                )));
            }
            if !(0.0..=1.0).contains(&band.probability) {
                return Err(ModelError::InvalidBands(format!(
                    "band [{}, {}] probability {} outside [0, 1]",
                    band.lo, band.hi, band.probability
                )));
            }
            expected_lo = band.hi + 1;
        }
        if expected_lo != MAX_AGE + 1 {
            return Err(ModelError::InvalidBands(format!(
                "bands stop at {}, must cover through {MAX_AGE}",
                expected_lo - 1
            )));
        }
        Ok(AgeBandTable { bands })
    }

    /// Single band covering all of `[1, 100]`.
    pub fn flat(probability: f64) -> Result<Self, ModelError> {
        AgeBandTable::new(vec![AgeBand {
            lo: 1,
            hi: MAX_AGE,
            probability,
        }])
    }

    /// Probability of the unique band containing `age`.
    pub fn probability_for(&self, age: u32) -> Result<f64, ModelError> {
        if !(1..=MAX_AGE).contains(&age) {
            return Err(ModelError::AgeOutOfRange(age));
        }
        let band = self
            .bands
            .iter()
            .find(|band| (band.lo..=band.hi).contains(&age))
            .expect("bands cover [1, 100] by construction");
        Ok(band.probability)
    }

    pub fn bands(&self) -> &[AgeBand] {
        &self.bands
    }
}

impl TryFrom<Vec<AgeBand>> for AgeBandTable {
    type Error = ModelError;

    fn try_from(bands: Vec<AgeBand>) -> Result<Self, Self::Error> {
        AgeBandTable::new(bands)
    }
}

impl From<AgeBandTable> for Vec<AgeBand> {
    fn from(table: AgeBandTable) -> Self {
        table.bands
    }
}

/// Disease and vital-dynamics parameters.
///
/// `mu` and `theta` are the aggregate birth/mortality and fatality rates of
/// the classical compartment models; the cellular rules use `birth_rate`, the
/// age-banded `natural_death` table, and the age-banded `fatality` table
/// instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseParams {
    /// Infection rate β.
    pub beta: f64,
    /// Recovery rate α; strictly positive (infection pressure divides by it).
    pub alpha: f64,
    /// Birth rate b for re-occupying dead cells.
    pub birth_rate: f64,
    /// Aggregate birth/mortality rate μ (compartment models and R0 only).
    pub mu: f64,
    /// Aggregate disease fatality θ (compartment models and R0 only).
    pub theta: f64,
    /// Aging period T: ages increment on steps t ≡ 0 (mod T).
    pub aging_period: u32,
    /// Age-banded probability ω_k of dying from non-disease causes.
    pub natural_death: AgeBandTable,
    /// Age-banded probability θ_k of dying from the disease.
    pub fatality: AgeBandTable,
}

impl DiseaseParams {
    /// Parameters carrying only the compartment-model rates, with inert
    /// vital dynamics. Convenient for the ODE reference and R0.
    pub fn rates_only(beta: f64, alpha: f64, mu: f64, theta: f64) -> Result<Self, ModelError> {
        let params = DiseaseParams {
            beta,
            alpha,
            birth_rate: 0.0,
            mu,
            theta,
            aging_period: 1,
            natural_death: AgeBandTable::flat(0.0)?,
            fatality: AgeBandTable::flat(0.0)?,
        };
        params.check()?;
        Ok(params)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let in_unit = [
            ("beta", self.beta),
            ("birth_rate", self.birth_rate),
            ("mu", self.mu),
            ("theta", self.theta),
        ];
        for (name, value) in in_unit {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::ParamOutOfRange {
                    name,
                    value,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ModelError::AlphaOutOfRange(self.alpha));
        }
        if self.aging_period == 0 {
            return Err(ModelError::ZeroAgingPeriod);
        }
        Ok(())
    }
}
