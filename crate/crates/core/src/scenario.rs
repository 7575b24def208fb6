//! Scenario definition, validation, JSON serialization, and the built-in
//! village generator.
//!
//! A scenario bundles everything a run needs: the cell roster, the impact
//! degree map, the impact-rate profile, disease parameters, and the initial
//! infection. Scenarios are immutable values; placement helpers return new
//! scenarios.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AgeBand, AgeBandTable, Cell, DiseaseParams, EpidemicState, ModelError, Population};
use crate::rng::SplitMix64;
use crate::topology::{
    compute_impact_degrees, set_explicit_degrees, ImpactDegreeMap, ImpactProfile,
    InteractionGraph, TopologyError,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario file is malformed: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scenario file is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown site '{0}'")]
    UnknownSite(String),
    #[error("invalid village spec: {0}")]
    InvalidVillageSpec(String),
}

/// A single validation finding. Violations are data, not errors: `validate`
/// reports all of them instead of stopping at the first.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("population is empty")]
    EmptyPopulation,
    #[error("degree map covers {degrees_for} cells but the roster has {cells}")]
    DegreeMapMismatch { degrees_for: usize, cells: usize },
    #[error("cell {index} is invalid: {message}")]
    InvalidCell { index: usize, message: String },
    #[error("degree {degree} uncovered by the impact profile")]
    ProfileGap { degree: u32 },
    #[error("no initial infected cells")]
    NoInitialInfected,
    #[error("initial infected cell {index} is out of bounds")]
    InitialInfectedOutOfBounds { index: usize },
    #[error("initial infected cell {index} is dead")]
    InitialInfectedDead { index: usize },
    #[error("invalid parameters: {message}")]
    InvalidParams { message: String },
}

/// A complete simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cells: Vec<Cell>,
    pub degrees: Arc<ImpactDegreeMap>,
    pub profile: ImpactProfile,
    pub params: DiseaseParams,
    pub initial_infected: BTreeSet<usize>,
    /// What one step means (informational), e.g. "day".
    pub step_unit: String,
    /// Optional occupation-site membership, for site-based infection
    /// placement. Keys are site labels, values cell indices.
    pub sites: BTreeMap<String, Vec<usize>>,
}

impl Scenario {
    pub fn assemble(
        cells: Vec<Cell>,
        degrees: Arc<ImpactDegreeMap>,
        profile: ImpactProfile,
        params: DiseaseParams,
        initial_infected: Vec<usize>,
    ) -> Self {
        Scenario {
            cells,
            degrees,
            profile,
            params,
            initial_infected: initial_infected.into_iter().collect(),
            step_unit: "day".to_string(),
            sites: BTreeMap::new(),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Steps per aging unit (the period T of the vital-dynamics rule).
    pub fn aging_period_steps(&self) -> u32 {
        self.params.aging_period
    }

    /// The starting population: the roster with the initial infections
    /// applied.
    pub fn initial_population(&self) -> Population {
        let mut cells = self.cells.clone();
        for &index in &self.initial_infected {
            if let Some(cell) = cells.get_mut(index) {
                cell.state = EpidemicState::Infected;
            }
        }
        Population::new(cells, Arc::clone(&self.degrees), self.profile.clone())
    }

    /// Checks every scenario invariant and returns all findings.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if self.cells.is_empty() {
            violations.push(Violation::EmptyPopulation);
        }
        if self.degrees.cell_count() != self.cells.len() {
            violations.push(Violation::DegreeMapMismatch {
                degrees_for: self.degrees.cell_count(),
                cells: self.cells.len(),
            });
        }
        for (index, cell) in self.cells.iter().enumerate() {
            if let Err(e) = cell.check() {
                violations.push(Violation::InvalidCell {
                    index,
                    message: e.to_string(),
                });
            }
        }
        for degree in 0..=self.degrees.max_degree() {
            if !self.profile.covers(degree) {
                violations.push(Violation::ProfileGap { degree });
            }
        }
        if self.initial_infected.is_empty() {
            violations.push(Violation::NoInitialInfected);
        }
        for &index in &self.initial_infected {
            match self.cells.get(index) {
                None => violations.push(Violation::InitialInfectedOutOfBounds { index }),
                Some(cell) if cell.state == EpidemicState::Dead => {
                    violations.push(Violation::InitialInfectedDead { index });
                }
                Some(_) => {}
            }
        }
        if let Err(e) = self.params.check() {
            violations.push(Violation::InvalidParams {
                message: e.to_string(),
            });
        }
        violations
    }

    pub fn to_json(&self) -> Result<String, ScenarioError> {
        Ok(serde_json::to_string_pretty(&ScenarioFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Scenario::try_from(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Where, or on which cells, the outbreak starts.
#[derive(Debug, Clone, PartialEq)]
pub enum InfectionSite {
    /// A site label from the scenario's `sites` map; the lowest-index member
    /// becomes patient zero.
    Label(String),
    /// Explicit cell indices.
    Cells(Vec<usize>),
}

/// Returns the scenario with its initial infection replaced.
pub fn place_initial_infection(
    scenario: &Scenario,
    site: &InfectionSite,
) -> Result<Scenario, ScenarioError> {
    let infected: BTreeSet<usize> = match site {
        InfectionSite::Label(label) => {
            let members = scenario
                .sites
                .get(label)
                .ok_or_else(|| ScenarioError::UnknownSite(label.clone()))?;
            let patient_zero = members
                .iter()
                .copied()
                .min()
                .ok_or_else(|| ScenarioError::UnknownSite(label.clone()))?;
            BTreeSet::from([patient_zero])
        }
        InfectionSite::Cells(indices) => {
            for &index in indices {
                if index >= scenario.cells.len() {
                    return Err(ScenarioError::Malformed(format!(
                        "initial infected cell {index} out of bounds"
                    )));
                }
            }
            indices.iter().copied().collect()
        }
    };
    Ok(Scenario {
        initial_infected: infected,
        ..scenario.clone()
    })
}

// ---------------------------------------------------------------------------
// File format

#[derive(Debug, Serialize, Deserialize)]
struct CellEntry {
    id: usize,
    age: u32,
    state: EpidemicState,
}

#[derive(Debug, Serialize, Deserialize)]
enum DegreesSpec {
    #[serde(rename = "graph")]
    Graph(Vec<(usize, usize)>),
    #[serde(rename = "explicit")]
    Explicit(Vec<(usize, usize, u32)>),
}

fn default_step_unit() -> String {
    "day".to_string()
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    cells: Vec<CellEntry>,
    degrees: DegreesSpec,
    profile: BTreeMap<String, f64>,
    params: DiseaseParams,
    initial_infected: Vec<usize>,
    #[serde(default = "default_step_unit")]
    step_unit: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    sites: BTreeMap<String, Vec<usize>>,
}

impl From<&Scenario> for ScenarioFile {
    fn from(scenario: &Scenario) -> Self {
        let cells = scenario
            .cells
            .iter()
            .enumerate()
            .map(|(id, cell)| CellEntry {
                id,
                age: cell.age,
                state: cell.state,
            })
            .collect();
        // Degrees always serialize in explicit form; a map loaded from a
        // graph spec round-trips to the same map.
        let n = scenario.degrees.cell_count();
        let mut assignments = Vec::new();
        for source in 0..n {
            for target in 0..n {
                if source == target {
                    continue;
                }
                if let Some(degree) = scenario.degrees.degree(source, target) {
                    assignments.push((source, target, degree));
                }
            }
        }
        ScenarioFile {
            cells,
            degrees: DegreesSpec::Explicit(assignments),
            profile: scenario
                .profile
                .entries()
                .map(|(g, r)| (g.to_string(), r))
                .collect(),
            params: scenario.params.clone(),
            initial_infected: scenario.initial_infected.iter().copied().collect(),
            step_unit: scenario.step_unit.clone(),
            sites: scenario.sites.clone(),
        }
    }
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = ScenarioError;

    fn try_from(file: ScenarioFile) -> Result<Self, Self::Error> {
        let n = file.cells.len();
        let mut cells = vec![None; n];
        for entry in &file.cells {
            if entry.id >= n {
                return Err(ScenarioError::Malformed(format!(
                    "cell id {} out of range for {} cells",
                    entry.id, n
                )));
            }
            if cells[entry.id].is_some() {
                return Err(ScenarioError::Malformed(format!(
                    "duplicate cell id {}",
                    entry.id
                )));
            }
            cells[entry.id] = Some(Cell {
                state: entry.state,
                age: entry.age,
            });
        }
        let cells: Vec<Cell> = cells.into_iter().map(Option::unwrap).collect();

        let degrees = match &file.degrees {
            DegreesSpec::Graph(edges) => {
                compute_impact_degrees(&InteractionGraph::new(n, edges)?)
            }
            DegreesSpec::Explicit(assignments) => set_explicit_degrees(n, assignments)?,
        };

        let mut rates = Vec::new();
        for (key, rate) in &file.profile {
            let degree: u32 = key.parse().map_err(|_| {
                ScenarioError::Malformed(format!("profile key '{key}' is not a degree"))
            })?;
            rates.push((degree, *rate));
        }
        let profile = ImpactProfile::new(rates)?;

        Ok(Scenario {
            cells,
            degrees: Arc::new(degrees),
            profile,
            params: file.params,
            initial_infected: file.initial_infected.into_iter().collect(),
            step_unit: file.step_unit,
            sites: file.sites,
        })
    }
}

// ---------------------------------------------------------------------------
// Village generator

/// Age-assignment policy for the village builder: inclusive uniform ranges
/// per group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgePolicy {
    pub children: (u32, u32),
    pub workers: (u32, u32),
    pub hospital: (u32, u32),
}

impl Default for AgePolicy {
    fn default() -> Self {
        AgePolicy {
            children: (6, 15),
            workers: (20, 55),
            hospital: (20, 80),
        }
    }
}

/// Housing mix: C1 holds one adult, C2 two individuals (two adults or one
/// adult and one child), C3 two adults and one child.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HousingMix {
    pub c1: usize,
    pub c2: usize,
    pub c3: usize,
}

impl HousingMix {
    pub fn capacity(&self) -> usize {
        self.c1 + 2 * self.c2 + 3 * self.c3
    }
}

/// The 49-person village: occupation head counts, housing mix, impact rates
/// for degrees 0..=2, and the age policy.
#[derive(Debug, Clone, PartialEq)]
pub struct VillageSpec {
    pub school_children: usize,
    pub school_teachers: usize,
    pub office_workers: usize,
    pub market_workers: usize,
    pub hospital_occupants: usize,
    pub housing: HousingMix,
    /// P(0), P(1), P(2).
    pub impact_rates: [f64; 3],
    pub ages: AgePolicy,
    /// Steps per aging unit. Steps are days and ages are in years, so a year
    /// of 365 steps is the default.
    pub aging_period: u32,
}

impl Default for VillageSpec {
    fn default() -> Self {
        VillageSpec {
            school_children: 9,
            school_teachers: 2,
            office_workers: 16,
            market_workers: 8,
            hospital_occupants: 14,
            // all nine children in C3 homes; ten singles and six adult pairs
            // absorb the remaining 22 adults: 10 + 12 + 27 = 49
            housing: HousingMix { c1: 10, c2: 6, c3: 9 },
            impact_rates: VillagePreset::A.impact_rates(),
            ages: AgePolicy::default(),
            aging_period: 365,
        }
    }
}

impl VillageSpec {
    pub fn population(&self) -> usize {
        self.school_children
            + self.school_teachers
            + self.office_workers
            + self.market_workers
            + self.hospital_occupants
    }

    fn check(&self) -> Result<(), ScenarioError> {
        let total = self.population();
        if total != 49 {
            return Err(ScenarioError::InvalidVillageSpec(format!(
                "occupation counts sum to {total}, the village holds exactly 49 people"
            )));
        }
        if self.housing.capacity() != total {
            return Err(ScenarioError::InvalidVillageSpec(format!(
                "housing capacity {} does not match {total} occupants",
                self.housing.capacity()
            )));
        }
        let children = self.school_children;
        if self.housing.c3 > children {
            return Err(ScenarioError::InvalidVillageSpec(format!(
                "{} C3 homes need one child each, only {children} children available",
                self.housing.c3
            )));
        }
        if children > self.housing.c3 + self.housing.c2 {
            return Err(ScenarioError::InvalidVillageSpec(format!(
                "{children} children cannot be absorbed by {} C3 and {} C2 homes",
                self.housing.c3, self.housing.c2
            )));
        }
        for (label, (lo, hi)) in [
            ("children", self.ages.children),
            ("workers", self.ages.workers),
            ("hospital", self.ages.hospital),
        ] {
            if lo < 1 || hi > 100 || lo > hi {
                return Err(ScenarioError::InvalidVillageSpec(format!(
                    "{label} age range [{lo}, {hi}] invalid"
                )));
            }
        }
        if self.aging_period == 0 {
            return Err(ScenarioError::InvalidVillageSpec(
                "aging period must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The two impact-rate presets of the village study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VillagePreset {
    /// P(0)=1, P(1)=0.5, P(2)=0.25.
    A,
    /// Distanced interactions: P(0)=1, P(1)=0.005, P(2)=0.0025.
    B,
}

impl VillagePreset {
    pub fn impact_rates(self) -> [f64; 3] {
        match self {
            VillagePreset::A => [1.0, 0.5, 0.25],
            VillagePreset::B => [1.0, 0.005, 0.0025],
        }
    }

    pub fn spec(self) -> VillageSpec {
        VillageSpec {
            impact_rates: self.impact_rates(),
            ..VillageSpec::default()
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VillagePreset::A => "village-a",
            VillagePreset::B => "village-b",
        }
    }
}

impl std::str::FromStr for VillagePreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "village-a" => Ok(VillagePreset::A),
            "village-b" => Ok(VillagePreset::B),
            other => Err(format!(
                "unknown preset '{other}' (expected village-a or village-b)"
            )),
        }
    }
}

/// Estimated flu case fatality rates of the village.
pub fn village_fatality_table() -> AgeBandTable {
    AgeBandTable::new(vec![
        AgeBand { lo: 1, hi: 15, probability: 0.005 },
        AgeBand { lo: 16, hi: 48, probability: 0.01 },
        AgeBand { lo: 49, hi: 55, probability: 0.1 },
        AgeBand { lo: 56, hi: 100, probability: 0.25 },
    ])
    .expect("static table is valid")
}

const AGE_STREAM: u64 = 0x7631;
const HOUSEHOLD_STREAM: u64 = 0x7632;

/// Builds the village scenario: 49 susceptible cells split over school,
/// offices, market, and hospital; households drawn from the housing mix;
/// impact degree 0 between cohabitants, 1 between colleagues, 2 otherwise
/// (minimum wins for cohabiting colleagues). The outbreak starts at the
/// hospital; use [`place_initial_infection`] to move it.
///
/// Pure function of `(spec, seed)`.
pub fn build_village(spec: &VillageSpec, seed: u64) -> Result<Scenario, ScenarioError> {
    spec.check()?;
    let n = spec.population();

    // fixed index layout: children, teachers, office, market, hospital
    let children_end = spec.school_children;
    let school_end = children_end + spec.school_teachers;
    let office_end = school_end + spec.office_workers;
    let market_end = office_end + spec.market_workers;

    let site_of = |index: usize| -> &'static str {
        if index < school_end {
            "school"
        } else if index < office_end {
            "office"
        } else if index < market_end {
            "market"
        } else {
            "hospital"
        }
    };

    let mut sites: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for index in 0..n {
        sites.entry(site_of(index).to_string()).or_default().push(index);
    }

    // ages
    let mut age_rng = SplitMix64::tagged(seed, AGE_STREAM);
    let cells: Vec<Cell> = (0..n)
        .map(|index| {
            let (lo, hi) = if index < children_end {
                spec.ages.children
            } else if index < market_end {
                spec.ages.workers
            } else {
                spec.ages.hospital
            };
            let age = age_rng.next_in_range(lo as u64, hi as u64) as u32;
            Cell {
                state: EpidemicState::Susceptible,
                age,
            }
        })
        .collect();

    // households
    let mut house_rng = SplitMix64::tagged(seed, HOUSEHOLD_STREAM);
    let mut child_pool: Vec<usize> = (0..children_end).collect();
    let mut adult_pool: Vec<usize> = (children_end..n).collect();
    house_rng.shuffle(&mut child_pool);
    house_rng.shuffle(&mut adult_pool);

    let mut households: Vec<Vec<usize>> = Vec::new();
    let mut child_iter = child_pool.into_iter();
    let mut adult_iter = adult_pool.into_iter();
    let childless_c2 = spec.housing.c2 - (spec.school_children - spec.housing.c3);
    for _ in 0..spec.housing.c3 {
        households.push(vec![
            child_iter.next().expect("child for C3 home"),
            adult_iter.next().expect("adult for C3 home"),
            adult_iter.next().expect("adult for C3 home"),
        ]);
    }
    for _ in 0..(spec.housing.c2 - childless_c2) {
        households.push(vec![
            child_iter.next().expect("child for C2 home"),
            adult_iter.next().expect("adult for C2 home"),
        ]);
    }
    for _ in 0..childless_c2 {
        households.push(vec![
            adult_iter.next().expect("adult for C2 home"),
            adult_iter.next().expect("adult for C2 home"),
        ]);
    }
    for _ in 0..spec.housing.c1 {
        households.push(vec![adult_iter.next().expect("adult for C1 home")]);
    }
    debug_assert!(adult_iter.next().is_none() && child_iter.next().is_none());

    let mut household_of = vec![usize::MAX; n];
    for (home, members) in households.iter().enumerate() {
        for &member in members {
            household_of[member] = home;
        }
    }

    // degrees: cohabitation 0, shared occupation 1, everything else 2;
    // cohabiting colleagues take the minimum
    let mut assignments = Vec::with_capacity(n * (n - 1));
    for a in 0..n {
        for b in (a + 1)..n {
            let degree = if household_of[a] == household_of[b] {
                0
            } else if site_of(a) == site_of(b) {
                1
            } else {
                2
            };
            assignments.push((a, b, degree));
            assignments.push((b, a, degree));
        }
    }
    let degrees = set_explicit_degrees(n, &assignments)?;

    let profile = ImpactProfile::new(
        spec.impact_rates
            .iter()
            .enumerate()
            .map(|(g, &r)| (g as u32, r)),
    )?;

    let params = DiseaseParams {
        beta: 0.3,
        alpha: 0.2,
        birth_rate: 0.02,
        mu: 0.005,
        theta: 0.0,
        aging_period: spec.aging_period,
        natural_death: AgeBandTable::flat(0.005)?,
        fatality: village_fatality_table(),
    };

    let patient_zero = sites["hospital"].iter().copied().min().expect("hospital cells");

    Ok(Scenario {
        cells,
        degrees: Arc::new(degrees),
        profile,
        params,
        initial_infected: BTreeSet::from([patient_zero]),
        step_unit: "day".to_string(),
        sites,
    })
}
