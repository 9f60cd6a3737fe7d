//! Run configuration and machine-readable artifacts.
//!
//! Every artifact starts with a comment block echoing the full effective
//! configuration (including the Monte Carlo seed) so a run can be reproduced
//! from its output alone, followed by one header row and data rows. CSV
//! numbers use Rust's shortest round-trip formatting with a '.' separator and
//! no locale dependence; JSON mirrors the CSV with explicit field names and
//! 17 significant digits. Identical configs produce byte-identical artifacts.

use crate::fundamental::{DemocracyEntry, PhiEntry};
use crate::regimes::RegimeMapReport;
use serde::{Deserialize, Serialize};

/// Output format of artifact-producing commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// The full effective configuration of one command invocation; echoed into
/// every artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u64>,
    pub precision_bits: u32,
    pub level_cap_delta: u32,
    pub exact_budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merge_tol: Option<f64>,
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            l: None,
            p: None,
            r: None,
            m: None,
            m_list: None,
            n_max: None,
            l_grid: None,
            p_grid: None,
            m_max: None,
            precision_bits: crate::system::DEFAULT_PRECISION_BITS,
            level_cap_delta: 4,
            exact_budget: crate::rademacher::DEFAULT_EXACT_BUDGET,
            merge_tol: None,
            mc_samples: crate::rademacher::DEFAULT_MC_SAMPLES,
            mc_seed: crate::rademacher::DEFAULT_MC_SEED,
            format: OutputFormat::Csv,
            out: None,
        }
    }

    /// The `# key = value` comment block echoed at the top of artifacts.
    pub fn echo_block(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("# demosys-artifact v1\n# config = {json}\n# seed = {}\n", self.mc_seed)
    }
}

/// A float with exactly 17 significant digits, as pinned for JSON output.
pub fn json_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"nan\"".to_string()
    } else if x > 0.0 {
        "\"inf\"".to_string()
    } else {
        "\"-inf\"".to_string()
    }
}

// ---------------------------------------------------------------------------
// Artifact writers
// ---------------------------------------------------------------------------

/// Regime-map CSV: fixed column order, one header row, '.' decimals.
pub fn regime_csv(report: &RegimeMapReport, config: &RunConfig) -> String {
    let mut out = config.echo_block();
    for cell in &report.cells {
        if cell.boundary {
            out.push_str(&format!("# boundary-cell: l={} p={}\n", cell.l, cell.p));
        }
    }
    for (l, p, err) in &report.errors {
        out.push_str(&format!("# cell-error: l={l} p={p}: {err}\n"));
    }
    out.push_str(
        "l,p,alpha_p,alpha_p_residual,alpha_pprime,alpha_pprime_residual,product_slope,witness_monotone,theory_label,agree\n",
    );
    for c in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            c.l,
            c.p,
            c.alpha_p,
            c.alpha_p_residual,
            c.alpha_pprime,
            c.alpha_pprime_residual,
            c.product_slope,
            u8::from(c.witness_monotone),
            c.label.as_str(),
            u8::from(c.agree),
        ));
    }
    out
}

/// Regime-map JSON mirror of the CSV columns.
pub fn regime_json(report: &RegimeMapReport, config: &RunConfig) -> String {
    let mut rows = Vec::new();
    for c in &report.cells {
        rows.push(format!(
            concat!(
                "{{\"l\":{},\"p\":{},\"alpha_p\":{},\"alpha_p_residual\":{},",
                "\"alpha_pprime\":{},\"alpha_pprime_residual\":{},\"product_slope\":{},",
                "\"witness_monotone\":{},\"theory_label\":\"{}\",\"agree\":{},\"boundary\":{}}}"
            ),
            json_number(c.l),
            json_number(c.p),
            json_number(c.alpha_p),
            json_number(c.alpha_p_residual),
            json_number(c.alpha_pprime),
            json_number(c.alpha_pprime_residual),
            json_number(c.product_slope),
            c.witness_monotone,
            c.label.as_str(),
            c.agree,
            c.boundary,
        ));
    }
    let errors: Vec<String> = report
        .errors
        .iter()
        .map(|(l, p, e)| {
            format!(
                "{{\"l\":{},\"p\":{},\"error\":{}}}",
                json_number(*l),
                json_number(*p),
                serde_json::to_string(e).expect("string serializes")
            )
        })
        .collect();
    format!(
        "{{\"config\":{},\"rows\":[{}],\"errors\":[{}]}}\n",
        serde_json::to_string(config).expect("config serializes"),
        rows.join(","),
        errors.join(","),
    )
}

/// phi table CSV: m, value, log2, maximizing profile, search method.
pub fn phi_csv(entries: &[PhiEntry], config: &RunConfig) -> String {
    let mut out = config.echo_block();
    out.push_str("m,phi,log2_phi,profile,search_method,level_cap\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.m,
            e.value.to_f64(),
            e.value.log2(),
            e.profile,
            e.method.tag(),
            e.level_cap,
        ));
    }
    out
}

pub fn phi_json(entries: &[PhiEntry], config: &RunConfig) -> String {
    let rows: Vec<String> = entries
        .iter()
        .map(|e| {
            format!(
                "{{\"m\":{},\"phi\":{},\"log2_phi\":{},\"profile\":\"{}\",\"search_method\":\"{}\",\"level_cap\":{}}}",
                e.m,
                json_number(e.value.to_f64()),
                json_number(e.value.log2()),
                e.profile,
                e.method.tag(),
                e.level_cap,
            )
        })
        .collect();
    format!(
        "{{\"config\":{},\"rows\":[{}]}}\n",
        serde_json::to_string(config).expect("config serializes"),
        rows.join(","),
    )
}

/// Democracy CSV: extremes, ratio and arg-profiles per m.
pub fn democracy_csv(entries: &[DemocracyEntry], config: &RunConfig) -> String {
    let mut out = config.echo_block();
    out.push_str("m,max_norm,min_norm,ratio,argmax_profile,argmin_profile,search_method\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.m,
            e.max.to_f64(),
            e.min.to_f64(),
            e.ratio(),
            e.argmax,
            e.argmin,
            e.method.tag(),
        ));
    }
    out
}

pub fn democracy_json(entries: &[DemocracyEntry], config: &RunConfig) -> String {
    let rows: Vec<String> = entries
        .iter()
        .map(|e| {
            format!(
                "{{\"m\":{},\"max_norm\":{},\"min_norm\":{},\"ratio\":{},\"argmax_profile\":\"{}\",\"argmin_profile\":\"{}\",\"search_method\":\"{}\"}}",
                e.m,
                json_number(e.max.to_f64()),
                json_number(e.min.to_f64()),
                json_number(e.ratio()),
                e.argmax,
                e.argmin,
                e.method.tag(),
            )
        })
        .collect();
    format!(
        "{{\"config\":{},\"rows\":[{}]}}\n",
        serde_json::to_string(config).expect("config serializes"),
        rows.join(","),
    )
}

/// One row of the witness-ratio table.
#[derive(Clone, Copy, Debug)]
pub struct WitnessRow {
    pub n: u32,
    pub bn_log2: f64,
    pub bstar_log2: f64,
}

impl WitnessRow {
    pub fn ratio(&self) -> f64 {
        (self.bn_log2 - self.bstar_log2).exp2()
    }
}

pub fn witness_csv(rows: &[WitnessRow], config: &RunConfig) -> String {
    let mut out = config.echo_block();
    out.push_str("n,bn,bstar,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n,
            r.bn_log2.exp2(),
            r.bstar_log2.exp2(),
            r.ratio(),
        ));
    }
    out
}

pub fn witness_json(rows: &[WitnessRow], config: &RunConfig) -> String {
    let body: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{{\"n\":{},\"bn\":{},\"bstar\":{},\"ratio\":{}}}",
                r.n,
                json_number(r.bn_log2.exp2()),
                json_number(r.bstar_log2.exp2()),
                json_number(r.ratio()),
            )
        })
        .collect();
    format!(
        "{{\"config\":{},\"rows\":[{}]}}\n",
        serde_json::to_string(config).expect("config serializes"),
        body.join(","),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_numbers_have_17_digits() {
        assert_eq!(json_number(0.25), "2.5000000000000000e-1");
        assert_eq!(json_number(1.0), "1.0000000000000000e0");
        let x = 1.0573712634405641;
        let s = json_number(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn echo_block_carries_seed() {
        let cfg = RunConfig::new("phi");
        let echo = cfg.echo_block();
        assert!(echo.starts_with("# demosys-artifact v1\n"));
        assert!(echo.contains(&format!("# seed = {}", cfg.mc_seed)));
        assert!(echo.contains("\"command\":\"phi\""));
    }
}
