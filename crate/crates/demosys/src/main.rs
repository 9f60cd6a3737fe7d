//! Command-line entry point: closed-form and combination norms, fundamental
//! function tables, democracy ratios, witness-set ratios, the regime-map
//! experiment driver, and the acceptance checklist.

use clap::{Args, Parser, Subcommand};
use demosys::cli::{
    democracy_csv, democracy_json, phi_csv, phi_json, regime_csv, regime_json, witness_csv,
    witness_json, OutputFormat, RunConfig, WitnessRow,
};
use demosys::error::Error;
use demosys::fundamental::{
    democracy_ratio, phi, witness_bn, witness_bstar, PhiKind, SearchConfig,
};
use demosys::rademacher::EngineConfig;
use demosys::regimes::{regime_map, RegimeMapConfig};
use demosys::system::{
    combination_norm, single_norm, CombinationSpec, NormExponent, SystemParams,
};
use std::process::ExitCode;

const EXIT_BAD_SPEC: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_OUTPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "demosys",
    version,
    about = "Exact L^p norms and democracy diagnostics for a dyadic-step/Rademacher orthonormal family"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Working precision in bits for closed-form scalar paths
    /// (env DEMOSYS_PRECISION_BITS; default 53).
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Level cap is ceil(log2 m) plus this delta.
    #[arg(long, default_value_t = 4)]
    level_cap_delta: u32,
    /// Product-state budget of the exact convolution path.
    #[arg(long, default_value_t = demosys::rademacher::DEFAULT_EXACT_BUDGET)]
    exact_budget: u64,
    /// Fixed merge tolerance for the merged path (default: 1e-12 x range).
    #[arg(long)]
    merge_tol: Option<f64>,
    /// Monte Carlo fallback sample count.
    #[arg(long, default_value_t = demosys::rademacher::DEFAULT_MC_SAMPLES)]
    mc_samples: u64,
    /// Base seed for the Monte Carlo fallback.
    #[arg(long, default_value_t = demosys::rademacher::DEFAULT_MC_SEED)]
    mc_seed: u64,
}

impl EngineArgs {
    fn precision(&self) -> u32 {
        self.precision_bits
            .or_else(|| {
                std::env::var("DEMOSYS_PRECISION_BITS")
                    .ok()
                    .and_then(|s| s.parse().ok())
            })
            .unwrap_or(demosys::system::DEFAULT_PRECISION_BITS)
    }

    fn engine(&self) -> EngineConfig {
        EngineConfig {
            exact_budget: self.exact_budget,
            merge_tol: self.merge_tol,
            merged_max_atoms: self.exact_budget as usize,
            mc_samples: self.mc_samples,
            mc_seed: self.mc_seed,
            ..EngineConfig::default()
        }
    }

    fn search(&self) -> SearchConfig {
        SearchConfig {
            level_cap_delta: self.level_cap_delta,
            engine: self.engine(),
            ..SearchConfig::default()
        }
    }

    fn fill(&self, config: &mut RunConfig) {
        config.precision_bits = self.precision();
        config.level_cap_delta = self.level_cap_delta;
        config.exact_budget = self.exact_budget;
        config.merge_tol = self.merge_tol;
        config.mc_samples = self.mc_samples;
        config.mc_seed = self.mc_seed;
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// Artifact format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(clap::ValueEnum, Clone, Copy, PartialEq)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum KindArg {
    Primal,
    Dual,
}

#[derive(Subcommand)]
enum Command {
    /// Single-function norm |c_{n,l}|_p, or the norm of a combination spec.
    Norm {
        /// Level of the single function.
        #[arg(long, conflicts_with = "spec")]
        n: Option<u32>,
        #[arg(long, requires = "n")]
        l: Option<f64>,
        #[arg(long, requires = "n")]
        p: Option<f64>,
        /// JSON combination spec file ({l, p, terms|groups}).
        #[arg(long)]
        spec: Option<String>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Fundamental function phi(m) (or dual phi*) over one or more sizes.
    Phi {
        #[arg(long)]
        l: f64,
        #[arg(long)]
        p: f64,
        /// One size m; alternative to --m-list.
        #[arg(long, conflicts_with = "m_list")]
        m: Option<u64>,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',')]
        m_list: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = KindArg::Primal)]
        kind: KindArg,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Democracy extremes and ratio D(m) over one or more sizes.
    Democracy {
        #[arg(long)]
        l: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, conflicts_with = "m_list")]
        m: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        m_list: Option<Vec<u64>>,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Witness-set norms and their ratio for n = 2..=n-max.
    Witness {
        #[arg(long)]
        l: f64,
        /// Exponent r of the dual-range study (1 <= r < 2; 2 allowed for checks).
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regime-map grid experiment over (l, p) cells.
    RegimeMap {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0, 4.0])]
        l_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![4.0])]
        p_grid: Vec<f64>,
        /// Largest dyadic m of the phi fits.
        #[arg(long, default_value_t = 4096)]
        m_max: u64,
        #[arg(long, default_value_t = 12)]
        witness_n_max: u32,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the acceptance checklist; nonzero exit if any criterion fails.
    Verify {
        /// Comma-separated criterion ids (default: all twelve).
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
        /// Optional JSON results artifact.
        #[arg(long)]
        out: Option<String>,
    },
}

fn domain_exit(e: &Error) -> u8 {
    match e {
        Error::EmptyCombination | Error::DuplicateIndex(_) => EXIT_BAD_SPEC,
        _ => EXIT_DOMAIN,
    }
}

fn emit(content: &str, out: &Option<String>) -> Result<(), u8> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            eprintln!("error: cannot write {path}: {e}");
            EXIT_OUTPUT
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_m(m: Option<u64>, m_list: Option<Vec<u64>>) -> Vec<u64> {
    m_list.unwrap_or_else(|| vec![m.unwrap_or(16)])
}

fn run() -> Result<(), u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Norm {
            n,
            l,
            p,
            spec,
            engine,
        } => {
            if let Some(path) = spec {
                let raw = std::fs::read_to_string(&path).map_err(|e| {
                    eprintln!("error: cannot read spec {path}: {e}");
                    EXIT_BAD_SPEC
                })?;
                let parsed: CombinationSpec = serde_json::from_str(&raw).map_err(|e| {
                    eprintln!("error: malformed spec {path}: {e}");
                    EXIT_BAD_SPEC
                })?;
                let params = SystemParams::with_precision(parsed.l, engine.precision())
                    .map_err(|e| {
                        eprintln!("error: {e}");
                        EXIT_DOMAIN
                    })?;
                let exponent = NormExponent::new(parsed.p).map_err(|e| {
                    eprintln!("error: {e}");
                    EXIT_DOMAIN
                })?;
                let comb = parsed.to_combination().map_err(|e| {
                    eprintln!("error: invalid combination: {e}");
                    domain_exit(&e)
                })?;
                let out = combination_norm(&comb, &params, exponent, &engine.engine())
                    .map_err(|e| {
                        eprintln!("error: {e}");
                        domain_exit(&e)
                    })?;
                println!("{} method={}", out.norm.to_f64(), out.method);
            } else {
                let (n, l, p) = (
                    n.ok_or_else(|| {
                        eprintln!("error: provide --n/--l/--p or --spec");
                        EXIT_BAD_SPEC
                    })?,
                    l.unwrap_or(1.0),
                    p.unwrap_or(2.0),
                );
                let params = SystemParams::with_precision(l, engine.precision())
                    .map_err(|e| {
                        eprintln!("error: {e}");
                        EXIT_DOMAIN
                    })?;
                let exponent = NormExponent::new(p).map_err(|e| {
                    eprintln!("error: {e}");
                    EXIT_DOMAIN
                })?;
                if n == 0 {
                    eprintln!("error: level must be >= 1");
                    return Err(EXIT_DOMAIN);
                }
                let v = single_norm(n, &params, exponent);
                println!("{} method=closed-form error=0", v.to_f64());
            }
            Ok(())
        }

        Command::Phi {
            l,
            p,
            m,
            m_list,
            kind,
            engine,
            output,
        } => {
            let params = SystemParams::with_precision(l, engine.precision()).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_DOMAIN
            })?;
            let exponent = NormExponent::new(p).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_DOMAIN
            })?;
            let kind = match kind {
                KindArg::Primal => PhiKind::Primal,
                KindArg::Dual => PhiKind::Dual,
            };
            let search = engine.search();
            let ms = parse_m(m, m_list);
            let mut entries = Vec::new();
            for &mv in &ms {
                entries.push(phi(mv, &params, exponent, kind, &search).map_err(|e| {
                    eprintln!("error: {e}");
                    domain_exit(&e)
                })?);
            }
            let mut config = RunConfig::new("phi");
            config.l = Some(l);
            config.p = Some(p);
            config.m_list = Some(ms);
            config.format = output.format.into();
            config.out = output.out.clone();
            engine.fill(&mut config);
            let content = match output.format {
                FormatArg::Csv => phi_csv(&entries, &config),
                FormatArg::Json => phi_json(&entries, &config),
            };
            emit(&content, &output.out)
        }

        Command::Democracy {
            l,
            p,
            m,
            m_list,
            engine,
            output,
        } => {
            let params = SystemParams::with_precision(l, engine.precision()).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_DOMAIN
            })?;
            let exponent = NormExponent::new(p).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_DOMAIN
            })?;
            let search = engine.search();
            let ms = parse_m(m, m_list);
            let mut entries = Vec::new();
            for &mv in &ms {
                entries.push(democracy_ratio(mv, &params, exponent, &search).map_err(|e| {
                    eprintln!("error: {e}");
                    domain_exit(&e)
                })?);
            }
            let mut config = RunConfig::new("democracy");
            config.l = Some(l);
            config.p = Some(p);
            config.m_list = Some(ms);
            config.format = output.format.into();
            config.out = output.out.clone();
            engine.fill(&mut config);
            let content = match output.format {
                FormatArg::Csv => democracy_csv(&entries, &config),
                FormatArg::Json => democracy_json(&entries, &config),
            };
            emit(&content, &output.out)
        }

        Command::Witness {
            l,
            r,
            n_max,
            engine,
            output,
        } => {
            let params = SystemParams::with_precision(l, engine.precision()).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_DOMAIN
            })?;
            let exponent = NormExponent::new(r).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_DOMAIN
            })?;
            if r > 2.0 {
                eprintln!("error: witness exponent must satisfy 1 <= r <= 2, got {r}");
                return Err(EXIT_DOMAIN);
            }
            let eng = engine.engine();
            let mut rows = Vec::new();
            for n in 2..=n_max {
                let bn = witness_bn(n, &params, exponent, &eng).map_err(|e| {
                    eprintln!("error: {e}");
                    domain_exit(&e)
                })?;
                let bs = witness_bstar(n, &params, exponent, &eng).map_err(|e| {
                    eprintln!("error: {e}");
                    domain_exit(&e)
                })?;
                rows.push(WitnessRow {
                    n,
                    bn_log2: bn.log2(),
                    bstar_log2: bs.log2(),
                });
            }
            let mut config = RunConfig::new("witness");
            config.l = Some(l);
            config.r = Some(r);
            config.n_max = Some(n_max);
            config.format = output.format.into();
            config.out = output.out.clone();
            engine.fill(&mut config);
            let content = match output.format {
                FormatArg::Csv => witness_csv(&rows, &config),
                FormatArg::Json => witness_json(&rows, &config),
            };
            emit(&content, &output.out)
        }

        Command::RegimeMap {
            l_grid,
            p_grid,
            m_max,
            witness_n_max,
            engine,
            output,
        } => {
            let m_max_log2 = 63 - m_max.max(16).leading_zeros();
            let cfg = RegimeMapConfig {
                l_grid: l_grid.clone(),
                p_grid: p_grid.clone(),
                m_max_log2,
                witness_n_max,
                search: engine.search(),
                ..RegimeMapConfig::default()
            };
            let report = regime_map(&cfg).map_err(|e| {
                eprintln!("error: {e}");
                domain_exit(&e)
            })?;
            let mut config = RunConfig::new("regime-map");
            config.l_grid = Some(l_grid);
            config.p_grid = Some(p_grid);
            config.m_max = Some(m_max);
            config.n_max = Some(witness_n_max);
            config.format = output.format.into();
            config.out = output.out.clone();
            engine.fill(&mut config);
            let content = match output.format {
                FormatArg::Csv => regime_csv(&report, &config),
                FormatArg::Json => regime_json(&report, &config),
            };
            emit(&content, &output.out)
        }

        Command::Verify { criteria, out } => {
            let ids = criteria.unwrap_or_default();
            let results = demosys::acceptance::run(&ids);
            let mut all_pass = true;
            for r in &results {
                println!("{}", r.line());
                all_pass &= r.pass;
            }
            if let Some(path) = out {
                let rows: Vec<String> = results
                    .iter()
                    .map(|r| {
                        format!(
                            "{{\"id\":{},\"name\":{},\"pass\":{},\"details\":{}}}",
                            r.id,
                            serde_json::to_string(r.name).expect("stringifies"),
                            r.pass,
                            serde_json::to_string(&r.details).expect("stringifies"),
                        )
                    })
                    .collect();
                let content = format!("{{\"criteria\":[{}]}}\n", rows.join(","));
                emit(&content, &Some(path))?;
            }
            if all_pass {
                Ok(())
            } else {
                Err(1)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
