//! Table containers and deterministic emitters.
//!
//! Errors print in two-significant-digit scientific notation ("3.1E0"),
//! observed rates in parentheses to two decimals, missing entries as
//! "--". Emitting the same table twice yields identical bytes.

use serde::Serialize;

/// Output format for a table artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Csv,
    Json,
    Markdown,
}

impl OutFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutFormat::Csv => "csv",
            OutFormat::Json => "json",
            OutFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for OutFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutFormat::Csv),
            "json" => Ok(OutFormat::Json),
            "md" | "markdown" => Ok(OutFormat::Markdown),
            other => Err(format!("unknown format {other:?}, expected csv|json|md")),
        }
    }
}

/// Two-significant-digit scientific notation matching the table style:
/// 3.14 -> "3.1E0", 0.044 -> "4.4E-2".
pub fn sci2(v: f64) -> String {
    if v == 0.0 {
        return "0.0E0".to_string();
    }
    if !v.is_finite() {
        return "--".to_string();
    }
    let sign = if v < 0.0 { "-" } else { "" };
    let a = v.abs();
    let mut e = a.log10().floor() as i32;
    let mut m = a / 10f64.powi(e);
    // rounding the mantissa to one decimal can push it to 10.0
    m = (m * 10.0).round() / 10.0;
    if m >= 10.0 {
        m /= 10.0;
        e += 1;
    }
    format!("{sign}{m:.1}E{e}")
}

fn rate_cell(r: Option<f64>) -> String {
    match r {
        Some(r) => format!("{r:.2}"),
        None => "--".to_string(),
    }
}

/// One resolution level of a convergence study.
#[derive(Debug, Clone, Serialize)]
pub struct ConvRow {
    pub level: u32,
    /// Inverse mesh size, the row label of the error tables.
    pub h_inv: usize,
    /// Mesh size used for rate computation.
    pub h: f64,
    /// One error per column; empty when the level failed.
    pub errors: Vec<f64>,
    /// Observed rates, None on the coarsest level.
    pub rates: Vec<Option<f64>>,
    /// Failure message when the solve did not complete.
    pub failed: Option<String>,
}

/// Errors and observed rates over a level range.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub formulation: String,
    pub columns: Vec<String>,
    pub rows: Vec<ConvRow>,
}

impl ConvergenceTable {
    /// Fills the `rates` entries from consecutive successful rows:
    /// log(e_prev/e_cur) / log(h_prev/h_cur).
    pub fn compute_rates(&mut self) {
        let ncols = self.columns.len();
        let mut prev: Option<(f64, Vec<f64>)> = None;
        for row in &mut self.rows {
            row.rates = vec![None; ncols];
            if row.failed.is_some() || row.errors.len() != ncols {
                continue;
            }
            if let Some((h_prev, e_prev)) = &prev {
                let dh = (h_prev / row.h).ln();
                for c in 0..ncols {
                    if e_prev[c] > 0.0 && row.errors[c] > 0.0 {
                        row.rates[c] = Some((e_prev[c] / row.errors[c]).ln() / dh);
                    }
                }
            }
            prev = Some((row.h, row.errors.clone()));
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| 1/h |");
        for c in &self.columns {
            out.push_str(&format!(" {c} |"));
        }
        out.push('\n');
        out.push_str("|---:|");
        for _ in &self.columns {
            out.push_str("---:|");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("| {} |", row.h_inv));
            if let Some(msg) = &row.failed {
                for (i, _) in self.columns.iter().enumerate() {
                    if i == 0 {
                        out.push_str(&format!(" failed: {msg} |"));
                    } else {
                        out.push_str(" -- |");
                    }
                }
            } else {
                for c in 0..self.columns.len() {
                    out.push_str(&format!(
                        " {}({}) |",
                        sci2(row.errors[c]),
                        rate_cell(row.rates[c])
                    ));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,h_inv,h");
        for c in &self.columns {
            out.push_str(&format!(",err {c},rate {c}"));
        }
        out.push_str(",status\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{:.10e}", row.level, row.h_inv, row.h));
            if row.failed.is_some() {
                for _ in &self.columns {
                    out.push_str(",--,--");
                }
            } else {
                for c in 0..self.columns.len() {
                    out.push_str(&format!(
                        ",{:.10e},{}",
                        row.errors[c],
                        rate_cell(row.rates[c])
                    ));
                }
            }
            match &row.failed {
                Some(msg) => out.push_str(&format!(",failed: {msg}\n")),
                None => out.push_str(",ok\n"),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn emit(&self, fmt: OutFormat) -> String {
        match fmt {
            OutFormat::Csv => self.to_csv(),
            OutFormat::Json => self.to_json(),
            OutFormat::Markdown => self.to_markdown(),
        }
    }
}

/// One level of the cost study for one formulation.
#[derive(Debug, Clone, Serialize)]
pub struct CostRow {
    pub level: u32,
    pub dofs: usize,
    pub iterations: Option<usize>,
    /// Seconds inside the Krylov loop. Not reproducible across machines;
    /// excluded from determinism comparisons.
    pub wall_time: Option<f64>,
    pub kappa: Option<f64>,
    pub failed: Option<String>,
}

/// Iterations, timings and condition numbers per formulation, plus the
/// uncoupled Poisson reference.
#[derive(Debug, Clone, Serialize)]
pub struct CostTable {
    /// Per-formulation row groups, ordered deterministically.
    pub groups: Vec<(String, Vec<CostRow>)>,
    /// Columns whose values depend on the machine, named so golden-file
    /// comparisons can mask them.
    pub non_reproducible_columns: Vec<String>,
}

impl CostTable {
    pub fn new() -> Self {
        CostTable {
            groups: Vec::new(),
            non_reproducible_columns: vec!["time".to_string()],
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| formulation | level | dofs | iterations | time [s] | kappa |\n");
        out.push_str("|:---|---:|---:|---:|---:|---:|\n");
        for (name, rows) in &self.groups {
            for row in rows {
                let iters = row
                    .iterations
                    .map(|i| i.to_string())
                    .unwrap_or_else(|| "--".to_string());
                let time = row
                    .wall_time
                    .map(|t| format!("{t:.2}"))
                    .unwrap_or_else(|| "--".to_string());
                let kappa = row
                    .kappa
                    .map(|k| format!("{k:.2}"))
                    .unwrap_or_else(|| "--".to_string());
                let status = row.failed.as_deref().unwrap_or("");
                out.push_str(&format!(
                    "| {name}{} | {} | {} | {iters} | {time} | {kappa} |\n",
                    if status.is_empty() {
                        String::new()
                    } else {
                        format!(" ({status})")
                    },
                    row.level,
                    row.dofs
                ));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("formulation,level,dofs,iterations,time,kappa,status\n");
        for (name, rows) in &self.groups {
            for row in rows {
                let iters = row
                    .iterations
                    .map(|i| i.to_string())
                    .unwrap_or_else(|| "--".to_string());
                let time = row
                    .wall_time
                    .map(|t| format!("{t:.6}"))
                    .unwrap_or_else(|| "--".to_string());
                let kappa = row
                    .kappa
                    .map(|k| format!("{k:.6}"))
                    .unwrap_or_else(|| "--".to_string());
                let status = match &row.failed {
                    Some(msg) => format!("failed: {msg}"),
                    None => "ok".to_string(),
                };
                out.push_str(&format!(
                    "{name},{},{},{iters},{time},{kappa},{status}\n",
                    row.level, row.dofs
                ));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn emit(&self, fmt: OutFormat) -> String {
        match fmt {
            OutFormat::Csv => self.to_csv(),
            OutFormat::Json => self.to_json(),
            OutFormat::Markdown => self.to_markdown(),
        }
    }
}

impl Default for CostTable {
    fn default() -> Self {
        Self::new()
    }
}

/// One row of the DOF-count comparison.
#[derive(Debug, Clone, Serialize)]
pub struct DofRow {
    pub formulation: String,
    pub level: u32,
    pub counted: [usize; 3],
    pub expected: Option<[usize; 3]>,
    pub matches: bool,
}

/// Computed versus reference DOF counts.
#[derive(Debug, Clone, Serialize)]
pub struct DofTable {
    pub rows: Vec<DofRow>,
}

impl DofTable {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| formulation | level | W1 | W2 | W3 | expected | match |\n");
        out.push_str("|:---|---:|---:|---:|---:|:---|:---|\n");
        for r in &self.rows {
            let exp = match r.expected {
                Some([a, b, c]) => format!("{a}/{b}/{c}"),
                None => "--".to_string(),
            };
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {exp} | {} |\n",
                r.formulation,
                r.level,
                r.counted[0],
                r.counted[1],
                r.counted[2],
                if r.matches { "yes" } else { "NO" }
            ));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("formulation,level,w1,w2,w3,expected_w1,expected_w2,expected_w3,match\n");
        for r in &self.rows {
            let exp = match r.expected {
                Some([a, b, c]) => format!("{a},{b},{c}"),
                None => "--,--,--".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{exp},{}\n",
                r.formulation,
                r.level,
                r.counted[0],
                r.counted[1],
                r.counted[2],
                if r.matches { "yes" } else { "no" }
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn emit(&self, fmt: OutFormat) -> String {
        match fmt {
            OutFormat::Csv => self.to_csv(),
            OutFormat::Json => self.to_json(),
            OutFormat::Markdown => self.to_markdown(),
        }
    }
}
