//! Stochastic cellular-automaton epidemic simulator.
//!
//! Individuals are cells of a finite cell space. Closeness between two cells
//! is measured by an *impact degree*: 0 for cohabitants, 1 for direct
//! contacts, and in general the least number of interactions linking the two.
//! Per-degree impact rates attenuate how strongly remote cells weigh on a
//! cell's infection pressure. On top of the SI/SIS/SIR transition rules the
//! simulator layers age-structured vital dynamics (births and natural deaths)
//! and age-banded disease fatality.
//!
//! Crate layout:
//! - [`topology`] — interaction graphs, impact-degree maps, neighborhood sets
//! - [`model`] — cells, populations, disease parameters, age-band tables
//! - [`rules`] — the per-cell transition rules
//! - [`engine`] — synchronous stepping, seeded batches, summaries
//! - [`reference`] — classical SIS/SIR ODEs and closed-form R0 cross-checks
//! - [`scenario`] — scenario files and the built-in village generator
//! - [`rng`] — counter-based deterministic randomness

pub mod engine;
pub mod model;
pub mod reference;
pub mod rng;
pub mod rules;
pub mod scenario;
pub mod topology;

pub use engine::{BatchResult, ModelKind, RunSummary, SimulationConfig, TimeSeries};
pub use model::{AgeBandTable, Cell, DiseaseParams, EpidemicState, Population, StateCounts};
pub use rules::{NeighborhoodView, TransitionDraws};
pub use scenario::{Scenario, VillagePreset, VillageSpec};
pub use topology::{ImpactDegreeMap, ImpactProfile, InteractionGraph};
