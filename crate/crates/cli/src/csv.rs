//! CSV rendering for time series and batch summaries.
//!
//! Formats are pinned for bit-exact diffing: header `t,S,I,R,D`, `\n` line
//! endings, no trailing delimiter. Single runs print integer counts, batch
//! means print six decimal places.

use epica::engine::{RunSummary, TimeSeries};

pub const SERIES_HEADER: &str = "t,S,I,R,D";

/// Single-run series with exact integer counts.
pub fn render_counts(series: &TimeSeries) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for row in &series.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.t,
            row.susceptible as u64,
            row.infected as u64,
            row.recovered as u64,
            row.dead as u64
        ));
    }
    out
}

/// Replica-mean series with six decimal places.
pub fn render_means(series: &TimeSeries) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for row in &series.rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6}\n",
            row.t, row.susceptible, row.infected, row.recovered, row.dead
        ));
    }
    out
}

pub const REPLICA_HEADER: &str = "replica,peak,peak_day,extinction_day,cumulative_deaths";

/// Per-replica batch summaries; an empty extinction field means the run
/// never reached zero infected.
pub fn render_replica_summaries(summaries: &[RunSummary]) -> String {
    let mut out = String::from(REPLICA_HEADER);
    out.push('\n');
    for entry in summaries {
        let s = &entry.summary;
        let extinction = s
            .extinction_day
            .map(|d| d.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            entry.replica,
            s.peak_infected as u64,
            s.peak_day,
            extinction,
            s.cumulative_deaths as u64
        ));
    }
    out
}
