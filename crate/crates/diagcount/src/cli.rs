//! Command-line front end: counting, verification, audits, partition tables,
//! and the reference-table reproduction.
//!
//! Exit codes: 0 success, 2 usage/validation error, 3 verification mismatch
//! or audit residual over tolerance.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::charsum::{audit_lemmas, AuditConfig, Precision};
use crate::closed_form::{classify, count, ProblemSpec, TABLE1};
use crate::error::Error;
use crate::extensions::{
    count_coprime_scaled, count_with_odd_semiprimitive, count_with_quadratic_form, reduce_exponents,
    DeltaSpec,
};
use crate::field::build_field_with_budget;
use crate::oracle::{
    audit_lemma14, brute_force, dp_count, dp_count_terms, gauss_count, power_histogram,
    power_histogram_scaled,
};
use crate::report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionMode {
    Double,
    Extended,
}

#[derive(Debug, Parser)]
#[command(name = "diagcount", version, about = "Exact solution counts for diagonal equations x1^(2^m)+...+xn^(2^m)=0 over F_{p^s}")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: OutputFormat,
    /// Largest field size for table-backed construction.
    #[arg(long, global = true, env = "DIAGCOUNT_BUDGET", default_value_t = 1 << 24)]
    pub table_budget: u64,
    /// Largest field size for the DP oracle.
    #[arg(long, global = true, default_value_t = 1 << 14)]
    pub dp_budget: u64,
    /// Largest q^n for brute-force enumeration.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub brute_cap: u64,
    #[arg(long, global = true, value_enum, default_value = "double")]
    pub precision: PrecisionMode,
}

/// Resolved runtime options shared by all commands.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub format: OutputFormat,
    pub table_budget: u64,
    pub dp_budget: u64,
    pub brute_cap: u64,
    pub precision: Precision,
}

impl Cli {
    fn config(&self) -> RunConfig {
        RunConfig {
            format: self.format,
            table_budget: self.table_budget,
            dp_budget: self.dp_budget,
            brute_cap: self.brute_cap,
            precision: match self.precision {
                PrecisionMode::Double => Precision::Double,
                PrecisionMode::Extended => Precision::Extended,
            },
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Count solutions via the applicable closed formula.
    Count(CountArgs),
    /// Recompute and check all embedded reference rows.
    Table1,
    /// List normalized quadratic partitions of p^k for k = 1..k_max.
    Partitions {
        #[arg(short, long)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
    },
    /// Run the Gauss-sum identity audits on a constructed field.
    Audit {
        #[arg(short, long)]
        p: u64,
        #[arg(short, long)]
        s: u32,
        #[arg(short, long)]
        m: u32,
    },
    /// Counting identities for related diagonal equations.
    #[command(subcommand)]
    Extensions(ExtCmd),
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(short, long)]
    pub p: u64,
    #[arg(short, long)]
    pub s: u32,
    #[arg(short, long)]
    pub m: u32,
    #[arg(short, long)]
    pub n: u32,
    /// Cross-check against the DP, brute-force and Gauss-sum oracles as
    /// budgets allow.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Subcommand)]
pub enum ExtCmd {
    /// Reduce an exponent list (gcd/lcm normalization).
    Reduce {
        #[arg(short, long)]
        p: u64,
        #[arg(short, long)]
        s: u32,
        /// Comma-separated exponents, e.g. 4,6.
        #[arg(long, value_delimiter = ',')]
        exponents: Vec<u64>,
    },
    /// Scale exponents by pairwise-coprime factors (count is unchanged).
    Coprime {
        #[command(flatten)]
        base: BaseArgs,
        /// Comma-separated factors h_1..h_n.
        #[arg(long, value_delimiter = ',')]
        scale: Vec<u64>,
        #[arg(long)]
        verify: bool,
    },
    /// Mix in odd semiprimitive exponents.
    Semiprimitive {
        #[command(flatten)]
        base: BaseArgs,
        /// Comma-separated u:count pairs, e.g. 5:2,7:1.
        #[arg(long, value_delimiter = ',')]
        odd: Vec<String>,
        #[arg(long)]
        verify: bool,
    },
    /// Append a nondegenerate quadratic form in k variables.
    Quadform {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(short, long)]
        k: u32,
        /// Comma-separated diagonal coefficients (element indices).
        #[arg(long, value_delimiter = ',', conflicts_with = "delta")]
        coeffs: Option<Vec<u64>>,
        /// Determinant as an element index.
        #[arg(long)]
        delta: Option<u64>,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug, Args)]
pub struct BaseArgs {
    #[arg(short, long)]
    pub p: u64,
    #[arg(short, long)]
    pub s: u32,
    #[arg(short, long)]
    pub m: u32,
    #[arg(short, long)]
    pub n: u32,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::ResidualTooLarge { .. } => EXIT_MISMATCH,
        _ => EXIT_USAGE,
    }
}

pub fn run(cli: Cli) -> i32 {
    let cfg = cli.config();
    let outcome = match &cli.cmd {
        Cmd::Count(args) => cmd_count(args, &cfg),
        Cmd::Table1 => cmd_table1(&cfg),
        Cmd::Partitions { p, k_max } => cmd_partitions(*p, *k_max, &cfg),
        Cmd::Audit { p, s, m } => cmd_audit(*p, *s, *m, &cfg),
        Cmd::Extensions(sub) => cmd_extensions(sub, &cfg),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn cmd_count(args: &CountArgs, cfg: &RunConfig) -> crate::error::Result<i32> {
    let spec = classify(args.p, args.s, args.m, args.n)?;
    let result = count(&spec)?;
    let mut agree = true;
    let verify = if args.verify {
        let section = verify_section(&spec, &result.value, cfg)?;
        agree = section.agree;
        Some(section)
    } else {
        None
    };
    let report = CountReport {
        p: args.p,
        s: args.s,
        m: args.m,
        n: args.n,
        case: spec.case.to_string(),
        value: result.value.to_string(),
        partitions: result.partitions_used,
        notes: result.notes,
        verify,
    };
    match cfg.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        OutputFormat::Csv => {
            return Err(Error::InvalidParameter("csv output applies to table1/partitions".into()))
        }
        OutputFormat::Human => {
            println!("p={} s={} m={} n={}  case={}", report.p, report.s, report.m, report.n, report.case);
            println!("N = {}", report.value);
            for part in &report.partitions {
                let (names, form) = match part.kind {
                    crate::closed_form::PartitionKind::TwoBSquare => (("A", "B"), "A^2+2B^2"),
                    crate::closed_form::PartitionKind::TwoSquare => (("C", "D"), "C^2+D^2"),
                };
                println!(
                    "  r={}: p^{} = {} with {}={}, |{}|={}",
                    part.r, part.power, form, names.0, part.first, names.1, part.second_abs
                );
            }
            for note in &report.notes {
                println!("  note: {note}");
            }
            if let Some(v) = &report.verify {
                if let Some(dp) = &v.dp {
                    println!("  dp oracle:     {dp}");
                }
                if let Some(bf) = &v.brute_force {
                    println!("  brute force:   {bf}");
                }
                if let Some(gs) = &v.gauss {
                    println!(
                        "  gauss count:   {} (residual {:.2e}{})",
                        gs.value,
                        gs.residual,
                        if gs.escalated { ", escalated" } else { "" }
                    );
                }
                println!("  oracles agree: {}", v.agree);
            }
        }
    }
    Ok(if agree { EXIT_OK } else { EXIT_MISMATCH })
}

fn verify_section(
    spec: &ProblemSpec,
    claimed: &BigUint,
    cfg: &RunConfig,
) -> crate::error::Result<VerifySection> {
    let mut agree = true;
    let dp = match dp_count(spec, cfg.dp_budget) {
        Ok(v) => {
            agree &= &v == claimed;
            Some(v.to_string())
        }
        Err(Error::TooLarge { .. }) | Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let brute = match brute_force(spec, cfg.brute_cap) {
        Ok(v) => {
            agree &= &v == claimed;
            Some(v.to_string())
        }
        Err(Error::TooLarge { .. }) | Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let gauss = if spec.q.to_u64().map(|q| q <= cfg.table_budget).unwrap_or(false) {
        let f = build_field_with_budget(spec.p, spec.s, cfg.table_budget)?;
        match gauss_count(spec, &f) {
            Ok((v, residual, escalated)) => {
                agree &= &v == claimed;
                Some(GaussSection { value: v.to_string(), residual, escalated })
            }
            Err(Error::ResidualTooLarge { .. }) => {
                agree = false;
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(VerifySection { dp, brute_force: brute, gauss, agree })
}

fn cmd_table1(cfg: &RunConfig) -> crate::error::Result<i32> {
    let mut rows = Vec::new();
    let mut all_pass = true;
    for &(p, s, m, n, want) in TABLE1.iter() {
        let computed = count(&classify(p, s, m, n)?)?.value;
        let pass = computed == BigUint::from(want);
        all_pass &= pass;
        rows.push(Table1Row {
            p,
            s,
            m,
            n,
            expected: want.to_string(),
            computed: computed.to_string(),
            pass,
        });
    }
    let report = Table1Report { rows, all_pass };
    match cfg.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        OutputFormat::Csv => {
            println!("p,s,m,n,N");
            for r in &report.rows {
                println!("{},{},{},{},{}", r.p, r.s, r.m, r.n, r.computed);
            }
        }
        OutputFormat::Human => {
            for r in &report.rows {
                println!(
                    "({},{},{},{}) expected {:>10} computed {:>10}  {}",
                    r.p,
                    r.s,
                    r.m,
                    r.n,
                    r.expected,
                    r.computed,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            println!("{}", if report.all_pass { "all rows PASS" } else { "MISMATCH" });
        }
    }
    Ok(if report.all_pass { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_partitions(p: u64, k_max: u32, cfg: &RunConfig) -> crate::error::Result<i32> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be positive".into()));
    }
    let (form, rows) = match p % 8 {
        3 => {
            let mut rows = Vec::new();
            for k in 1..=k_max {
                let part = crate::quadpart::partition_2b(p, k)?;
                rows.push(PartitionRow {
                    k,
                    first: part.a.to_string(),
                    second_abs: part.abs_b.to_string(),
                });
            }
            ("A^2+2B^2".to_string(), rows)
        }
        5 => {
            let mut rows = Vec::new();
            for k in 1..=k_max {
                let part = crate::quadpart::partition_d(p, k)?;
                rows.push(PartitionRow {
                    k,
                    first: part.c.to_string(),
                    second_abs: part.abs_d.to_string(),
                });
            }
            ("C^2+D^2".to_string(), rows)
        }
        residue => return Err(Error::UnsupportedResidue { p, residue }),
    };
    let report = PartitionsReport { p, form, rows };
    match cfg.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        OutputFormat::Csv => {
            println!("k,first,second_abs");
            for r in &report.rows {
                println!("{},{},{}", r.k, r.first, r.second_abs);
            }
        }
        OutputFormat::Human => {
            println!("p = {}  form {}", report.p, report.form);
            for r in &report.rows {
                println!("  k={:<2} first={:<12} second={}", r.k, r.first, r.second_abs);
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_audit(p: u64, s: u32, m: u32, cfg: &RunConfig) -> crate::error::Result<i32> {
    let f = build_field_with_budget(p, s, cfg.table_budget)?;
    let audit_cfg = AuditConfig { precision: cfg.precision, ..AuditConfig::default() };
    let lemmas = audit_lemmas(&f, m, &audit_cfg)?;
    let min_m = if p % 8 == 3 { 3 } else { 2 };
    let w = if (p % 8 == 3 || p % 8 == 5) && m >= min_m {
        Some(audit_lemma14(&f, m)?)
    } else {
        None
    };
    let passed = lemmas.passed() && w.as_ref().map(|r| r.passed()).unwrap_or(true);
    let report = AuditCliReport { lemmas, w_values: w, passed };
    match cfg.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        OutputFormat::Csv => {
            return Err(Error::InvalidParameter("csv output applies to table1/partitions".into()))
        }
        OutputFormat::Human => {
            for row in &report.lemmas.rows {
                if row.applicable {
                    println!(
                        "{:>4}  residual {:.3e}  tolerance {:.3e}  ({} checks)",
                        row.id, row.residual, row.tolerance, row.checked
                    );
                } else {
                    println!("{:>4}  skipped (not applicable)", row.id);
                }
            }
            if let Some(w) = &report.w_values {
                println!(
                    "W-values: {} rows, max residual {:.3e}",
                    w.w_rows.len(),
                    w.max_w_residual()
                );
                println!("recombinations: {} identities checked", w.recombinations.len());
            }
            println!("{}", if report.passed { "audit PASS" } else { "audit FAIL" });
        }
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_extensions(sub: &ExtCmd, cfg: &RunConfig) -> crate::error::Result<i32> {
    let report = match sub {
        ExtCmd::Reduce { p, s, exponents } => {
            if exponents.is_empty() {
                return Err(Error::InvalidParameter("need at least one exponent".into()));
            }
            let spec_q = BigUint::from(*p).pow(*s);
            if !crate::arith::is_prime(*p) {
                return Err(Error::NotPrime(*p));
            }
            let reduced = reduce_exponents(exponents, &spec_q);
            ExtensionReport {
                kind: "reduce".into(),
                value: String::new(),
                dp: None,
                agree: None,
                reduced: Some(reduced),
            }
        }
        ExtCmd::Coprime { base, scale, verify } => {
            let spec = classify(base.p, base.s, base.m, base.n)?;
            let value = count_coprime_scaled(&spec, scale)?;
            let exps: Vec<u64> = scale.iter().map(|h| h * (1u64 << base.m)).collect();
            let (dp, agree) = maybe_dp(&spec, &exps, &[], &value, *verify, cfg)?;
            ExtensionReport {
                kind: "coprime".into(),
                value: value.to_string(),
                dp,
                agree,
                reduced: None,
            }
        }
        ExtCmd::Semiprimitive { base, odd, verify } => {
            let spec = classify(base.p, base.s, base.m, base.n)?;
            let parts = parse_odd_parts(odd)?;
            let value = count_with_odd_semiprimitive(&spec, &parts)?;
            let mut exps: Vec<u64> = (0..base.n).map(|_| 1u64 << base.m).collect();
            for &(u, nj) in &parts {
                for _ in 0..nj {
                    exps.push(u);
                }
            }
            let (dp, agree) = maybe_dp(&spec, &exps, &[], &value, *verify, cfg)?;
            ExtensionReport {
                kind: "semiprimitive".into(),
                value: value.to_string(),
                dp,
                agree,
                reduced: None,
            }
        }
        ExtCmd::Quadform { base, k, coeffs, delta, verify } => {
            let spec = classify(base.p, base.s, base.m, base.n)?;
            let f = build_field_with_budget(base.p, base.s, cfg.table_budget)?;
            let delta_spec = match (coeffs, delta) {
                (Some(c), None) => DeltaSpec::Coefficients(c.clone()),
                (None, Some(d)) => DeltaSpec::Determinant(*d),
                _ => {
                    return Err(Error::InvalidParameter(
                        "give exactly one of --coeffs or --delta".into(),
                    ))
                }
            };
            let value = count_with_quadratic_form(&f, &spec, *k, &delta_spec)?;
            // DP cross-check only works with explicit diagonal coefficients.
            let quad_coeffs: Vec<u64> = match &delta_spec {
                DeltaSpec::Coefficients(c) => c.clone(),
                DeltaSpec::Determinant(_) => Vec::new(),
            };
            let exps: Vec<u64> = (0..base.n).map(|_| 1u64 << base.m).collect();
            let (dp, agree) = if quad_coeffs.is_empty() {
                (None, None)
            } else {
                maybe_dp(&spec, &exps, &quad_coeffs, &value, *verify, cfg)?
            };
            ExtensionReport {
                kind: "quadform".into(),
                value: value.to_string(),
                dp,
                agree,
                reduced: None,
            }
        }
    };
    match cfg.format {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        OutputFormat::Csv => {
            return Err(Error::InvalidParameter("csv output applies to table1/partitions".into()))
        }
        OutputFormat::Human => {
            if let Some(reduced) = &report.reduced {
                println!(
                    "reduced exponents: {}",
                    reduced.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                );
            } else {
                println!("{}: N = {}", report.kind, report.value);
                if let Some(dp) = &report.dp {
                    println!("  dp oracle: {dp}  agree: {}", report.agree.unwrap_or(false));
                }
            }
        }
    }
    let ok = report.agree.unwrap_or(true);
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

fn parse_odd_parts(tokens: &[String]) -> crate::error::Result<Vec<(u64, u32)>> {
    if tokens.is_empty() {
        return Err(Error::InvalidParameter("need at least one u:count pair".into()));
    }
    tokens
        .iter()
        .map(|tok| {
            let (u, n) = tok
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter(format!("bad pair '{tok}', want u:count")))?;
            let u = u.parse().map_err(|_| Error::InvalidParameter(format!("bad u in '{tok}'")))?;
            let n = n.parse().map_err(|_| Error::InvalidParameter(format!("bad count in '{tok}'")))?;
            Ok((u, n))
        })
        .collect()
}

/// Per-variable DP cross-check: power exponents plus optional quadratic
/// coefficients b_i (exponent 2 each).
fn maybe_dp(
    spec: &ProblemSpec,
    exps: &[u64],
    quad_coeffs: &[u64],
    claimed: &BigUint,
    verify: bool,
    cfg: &RunConfig,
) -> crate::error::Result<(Option<String>, Option<bool>)> {
    if !verify {
        return Ok((None, None));
    }
    let q = match spec.q.to_u64() {
        Some(q) if q <= cfg.dp_budget => q,
        _ => return Ok((None, None)),
    };
    let f = build_field_with_budget(spec.p, spec.s, q)?;
    let mut hists: Vec<_> = exps.iter().map(|&d| power_histogram(&f, d)).collect();
    for &b in quad_coeffs {
        hists.push(power_histogram_scaled(&f, 2, f.element(b)?));
    }
    let refs: Vec<&_> = hists.iter().collect();
    let dp = dp_count_terms(&f, &refs).pop().unwrap();
    let agree = &dp == claimed;
    Ok((Some(dp.to_string()), Some(agree)))
}

