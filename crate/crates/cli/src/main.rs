//! `hombundle`: cohomology, ring isomorphism, curvature and certification
//! reports for the `E` and `M` bundle families.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hombundle_core::catalog::{bundle_spec_text, layout_text, parse_bundle_spec};
use hombundle_core::certify::{self, Certificate, CertifyConfig, SCHEMA_VERSION};
use hombundle_core::homgeo::{
    bracket_norm_bound, curvature_record, diameter_upper_bound, shrink_parameter, ReportOptions,
};
use hombundle_core::{check_primitive, iso_decide, torus_quotient, BundleSpec, FamilySpec};

mod report;

use report::{Failure, Output};

/// Column order of `anco-sweep --format csv`.
pub const SWEEP_COLUMNS: [&str; 6] = [
    "t",
    "min_sec",
    "ricci_min",
    "lambda_min",
    "D",
    "lambda_min_D2",
];

#[derive(Parser)]
#[command(
    name = "hombundle",
    version,
    about = "Cohomology, ring isomorphism and curvature certification for the E and M bundle families"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    #[value(name = "E", alias = "e")]
    E,
    #[value(name = "M", alias = "m")]
    M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct Member {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Parameter of the E family.
    #[arg(long)]
    alpha: Option<i64>,
    /// Parameter of the M family.
    #[arg(long)]
    a: Option<i64>,
    /// Multiply by a sphere of this dimension.
    #[arg(long)]
    sphere: Option<u32>,
}

impl Member {
    fn spec(&self) -> Result<FamilySpec, Failure> {
        let s = match (self.family, self.alpha, self.a) {
            (Some(FamilyArg::E), Some(alpha), None) => FamilySpec::e(alpha)?,
            (Some(FamilyArg::M), None, Some(a)) => FamilySpec::m(a),
            (Some(FamilyArg::E), _, _) => {
                return Err(Failure::usage("--family E needs --alpha (and no --a)"))
            }
            (Some(FamilyArg::M), _, _) => {
                return Err(Failure::usage("--family M needs --a (and no --alpha)"))
            }
            (None, _, _) => return Err(Failure::usage("--family is required")),
        };
        match self.sphere {
            Some(n) => Ok(s.with_sphere(n)?),
            None => Ok(s),
        }
    }
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cohomology ring through degree 6 and its Betti numbers.
    Cohomology {
        #[command(flatten)]
        member: Member,
        /// Bundle spec file instead of a family member.
        #[arg(long, conflicts_with_all = ["family", "alpha", "a", "sphere"])]
        spec: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Decide whether two rings are isomorphic. Members are `E:<alpha>` or `M:<a>`.
    IsoCheck {
        source: String,
        target: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sectional and Ricci curvature of `g_t`, one record per t.
    Curvature {
        #[command(flatten)]
        member: Member,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        refine_steps: usize,
        #[arg(long)]
        seed: u64,
        /// Also diagonalize the curvature operator.
        #[arg(long)]
        operator: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Curvature-operator sweep over t.
    AncoSweep {
        #[command(flatten)]
        member: Member,
        #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25,0.1,0.05")]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Upper bound on the diameter of the group with the bi-invariant metric.
    Diameter {
        #[command(flatten)]
        member: Member,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the acceptance suite and write a sealed certificate, or verify one.
    Certify {
        /// Restrict to one family.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        a: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        t_list: Vec<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, required_unless_present = "verify")]
        seed: Option<u64>,
        /// Subset of criteria to run.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
        /// Check a stored certificate's digest and re-run it.
        #[arg(long, conflicts_with_all = ["family", "alpha", "a", "t_list", "samples", "seed", "criteria"])]
        verify: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(cli.cmd);
    eprintln!("wall time {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode, Failure> {
    match cmd {
        Command::Cohomology { member, spec, out } => cohomology(&member, spec, &out),
        Command::IsoCheck {
            source,
            target,
            out,
        } => iso_check(&source, &target, &out),
        Command::Curvature {
            member,
            t_list,
            samples,
            refine_steps,
            seed,
            operator,
            out,
        } => {
            let opts = ReportOptions {
                samples,
                refine_steps,
                seed,
                operator,
            };
            curvature(&member, &t_list, &opts, &out)
        }
        Command::AncoSweep {
            member,
            t_list,
            samples,
            seed,
            out,
        } => {
            let opts = ReportOptions {
                samples,
                refine_steps: 20,
                seed,
                operator: true,
            };
            anco_sweep(&member, &t_list, &opts, &out)
        }
        Command::Diameter { member, out } => diameter(&member, &out),
        Command::Certify {
            family,
            alpha,
            a,
            t_list,
            samples,
            seed,
            criteria,
            verify,
            out,
        } => match verify {
            Some(path) => verify_certificate(&path, &out),
            None => {
                let cfg = certify_config(family, alpha, a, t_list, samples, seed, criteria)?;
                run_certify(&cfg, &out)
            }
        },
    }
}

fn check_t_list(ts: &[f64]) -> Result<(), Failure> {
    if ts.is_empty() {
        return Err(Failure::usage("empty --t-list"));
    }
    for &t in ts {
        shrink_parameter(t).map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(())
}

fn parse_member(s: &str) -> Result<FamilySpec, Failure> {
    let bad = || Failure::usage(format!("bad member `{s}`, expected E:<alpha> or M:<a>"));
    let (fam, p) = s.split_once([':', '_']).ok_or_else(bad)?;
    let p: i64 = p.parse().map_err(|_| bad())?;
    match fam {
        "E" | "e" => Ok(FamilySpec::e(p)?),
        "M" | "m" => Ok(FamilySpec::m(p)),
        _ => Err(bad()),
    }
}

fn cohomology(
    member: &Member,
    spec_file: Option<PathBuf>,
    out: &OutArgs,
) -> Result<ExitCode, Failure> {
    let o = Output::new(out, Format::Json, &[Format::Json, Format::Text])?;
    let (label, spec, layout, named) = match spec_file {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            (
                path.display().to_string(),
                parse_bundle_spec(&text)?,
                None,
                None,
            )
        }
        None => {
            let s = member.spec()?;
            let (g, layout) = s.geometry_layout();
            (
                s.label(),
                s.bundle_spec()?,
                Some(layout_text(&g, &layout)),
                Some(s),
            )
        }
    };
    let primitive = primitivity(&spec)?;
    let quotient = match torus_quotient(&spec) {
        Ok(q) => q,
        Err(e) => {
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "member": label,
                "primitive": primitive,
                "error": e.to_string(),
            });
            o.write_json(&report)?;
            return Err(Failure::check(format!("{label}: {e}")));
        }
    };
    let ring = match &named {
        Some(s) => s.cohomology()?.ring,
        None => Arc::clone(&quotient.total),
    };
    let relations: Vec<String> = ring
        .minimal_relations()
        .iter()
        .map(|r| ring.format(r))
        .collect();
    let betti = ring.betti_numbers();
    match o.format {
        Format::Text => {
            let mut t = format!("# {label}\n{}", ring.to_text());
            t.push_str(&format!("# betti {betti:?}\n"));
            for r in &relations {
                t.push_str(&format!("# relation {r}\n"));
            }
            o.write(&t)?;
        }
        _ => {
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "member": label,
                "bundle_spec": bundle_spec_text(&spec),
                "geometry_layout": layout,
                "presentation": ring.to_text(),
                "generators": ring.names(),
                "relations": relations,
                "betti": betti,
                "odd_betti": quotient.odd_betti,
                "stages": quotient.summaries(&spec.base),
                "primitive": primitive,
            });
            o.write_json(&report)?;
        }
    }
    if primitive.iter().all(|&p| p) {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(Failure::check(format!(
            "{label}: an Euler class is not primitive"
        )))
    }
}

fn primitivity(spec: &BundleSpec) -> Result<Vec<bool>, Failure> {
    let cls = &spec.euler_classes;
    (0..cls.len())
        .map(|k| check_primitive(&cls[..k], &cls[k]).map_err(Failure::from))
        .collect()
}

fn iso_check(a: &str, b: &str, out: &OutArgs) -> Result<ExitCode, Failure> {
    let o = Output::new(out, Format::Json, &[Format::Json, Format::Text])?;
    let (sa, sb) = (parse_member(a)?, parse_member(b)?);
    let (ra, rb) = (sa.cohomology()?.ring, sb.cohomology()?.ring);
    let report = iso_decide(&ra, &rb)?;
    let mut v = report.to_json();
    v["source"] = json!(sa.label());
    v["target"] = json!(sb.label());
    v["schema_version"] = json!(SCHEMA_VERSION);
    match o.format {
        Format::Text => o.write(&format!(
            "{} {} {}\n",
            sa.label(),
            report.result_tag(),
            sb.label()
        ))?,
        _ => o.write_json(&v)?,
    }
    Ok(if report.result_tag() == "unknown" {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn curvature(
    member: &Member,
    ts: &[f64],
    opts: &ReportOptions,
    out: &OutArgs,
) -> Result<ExitCode, Failure> {
    check_t_list(ts)?;
    let o = Output::new(out, Format::Json, &[Format::Json, Format::Text])?;
    let spec = member.spec()?;
    let decomp = spec.geometry()?;
    let bound = bracket_norm_bound(&decomp.algebra, 16, 50, opts.seed);
    let records = ts
        .iter()
        .map(|&t| curvature_record(&decomp, t, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let (h, m2, m1) = decomp.dims();
    match o.format {
        Format::Text => {
            let mut s = format!(
                "# {} dims h_rho={h} m2={m2} m1={m1} bracket_bound={bound}\n",
                spec.label()
            );
            for r in &records {
                s.push_str(&format!(
                    "t={} min_sec={:e} max_sec={} ricci_min={:e} lambda_min={} D={}\n",
                    r.t,
                    r.min_sec,
                    r.max_sec,
                    r.ricci_min,
                    r.lambda_min.map_or("-".into(), |l| l.to_string()),
                    r.diameter
                ));
            }
            o.write(&s)?;
        }
        _ => o.write_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "member": spec.label(),
            "dims": { "h_rho": h, "m2": m2, "m1": m1 },
            "symmetric_pair": decomp.is_symmetric_pair(),
            "bracket_bound": bound,
            "options": opts,
            "records": records,
        }))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn anco_sweep(
    member: &Member,
    ts: &[f64],
    opts: &ReportOptions,
    out: &OutArgs,
) -> Result<ExitCode, Failure> {
    check_t_list(ts)?;
    let o = Output::new(out, Format::Csv, &[Format::Csv, Format::Json])?;
    let spec = member.spec()?;
    let decomp = spec.geometry()?;
    let records = ts
        .iter()
        .map(|&t| curvature_record(&decomp, t, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<[f64; 6]> = records
        .iter()
        .map(|r| {
            [
                r.t,
                r.min_sec,
                r.ricci_min,
                r.lambda_min.unwrap_or(f64::NAN),
                r.diameter,
                r.lambda_min_d2.unwrap_or(f64::NAN),
            ]
        })
        .collect();
    match o.format {
        Format::Json => o.write_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "member": spec.label(),
            "columns": SWEEP_COLUMNS,
            "rows": rows,
        }))?,
        _ => {
            let mut s = SWEEP_COLUMNS.join(",");
            s.push('\n');
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            o.write(&s)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn diameter(member: &Member, out: &OutArgs) -> Result<ExitCode, Failure> {
    let o = Output::new(out, Format::Json, &[Format::Json, Format::Text])?;
    let spec = member.spec()?;
    let d = diameter_upper_bound(&spec.geometry_layout().0)?;
    match o.format {
        Format::Text => o.write(&format!("{} D <= {}\n", spec.label(), d.value))?,
        _ => o.write_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "member": spec.label(),
            "diameter_bound": d.value,
            "factors": d.factors,
        }))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn certify_config(
    family: Option<FamilyArg>,
    alpha: Vec<i64>,
    a: Vec<i64>,
    t_list: Vec<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    criteria: Vec<u32>,
) -> Result<CertifyConfig, Failure> {
    let mut cfg = CertifyConfig {
        seed: seed.ok_or_else(|| Failure::usage("--seed is required"))?,
        ..CertifyConfig::default()
    };
    match family {
        Some(FamilyArg::E) => {
            cfg.m_range.clear();
            cfg.geometry_m.clear();
            cfg.criteria.retain(|c| ![3, 4, 5].contains(c));
        }
        Some(FamilyArg::M) => {
            cfg.e_range.clear();
            cfg.geometry_e.clear();
            cfg.anco_alphas.clear();
            cfg.criteria.retain(|c| ![1, 2, 7, 9, 10].contains(c));
        }
        None => {}
    }
    if !alpha.is_empty() {
        if family == Some(FamilyArg::M) {
            return Err(Failure::usage("--alpha with --family M"));
        }
        cfg.geometry_e.retain(|x| alpha.contains(x));
        cfg.anco_alphas.retain(|x| alpha.contains(x));
        cfg.e_range = alpha;
    }
    if !a.is_empty() {
        if family == Some(FamilyArg::E) {
            return Err(Failure::usage("--a with --family E"));
        }
        cfg.geometry_m.retain(|x| a.contains(x));
        cfg.m_range = a;
    }
    if !t_list.is_empty() {
        check_t_list(&t_list)?;
        cfg.t_list = t_list;
    }
    if let Some(n) = samples {
        cfg.samples = n;
    }
    if !criteria.is_empty() {
        if let Some(bad) = criteria.iter().find(|c| !certify::ALL_CRITERIA.contains(c)) {
            return Err(Failure::usage(format!("unknown criterion {bad}")));
        }
        cfg.criteria = criteria;
    }
    Ok(cfg)
}

fn progress(c: &certify::Check, d: std::time::Duration) {
    eprintln!("{}  ({:.2}s)", c.line(), d.as_secs_f64());
}

fn run_certify(cfg: &CertifyConfig, out: &OutArgs) -> Result<ExitCode, Failure> {
    let o = Output::new(out, Format::Json, &[Format::Json, Format::Text])?;
    let cert = certify::certify(cfg, progress)?;
    match o.format {
        Format::Text => {
            let mut s: String = cert.checks.iter().map(|c| c.line() + "\n").collect();
            s.push_str(&format!(
                "all_passed {}\ndigest {}\n",
                cert.all_passed, cert.digest
            ));
            o.write(&s)?;
        }
        _ => o.write(&(cert.to_json_pretty() + "\n"))?,
    }
    Ok(if cert.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify_certificate(path: &PathBuf, out: &OutArgs) -> Result<ExitCode, Failure> {
    let o = Output::new(out, Format::Json, &[Format::Json, Format::Text])?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let cert = match Certificate::from_json(&text) {
        Ok(c) => c,
        Err(e) => return Err(Failure::check(format!("{}: {e}", path.display()))),
    };
    let v = certify::verify(&cert, progress)?;
    let failing: Vec<u32> = cert
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.id)
        .collect();
    let report: Value = json!({
        "schema_version": SCHEMA_VERSION,
        "certificate": path.display().to_string(),
        "digest_ok": v.digest_ok,
        "reproduced": v.reproduced,
        "mismatched": v.mismatched,
        "failing_checks": failing,
        "verified": v.ok(),
    });
    match o.format {
        Format::Text => o.write(&format!(
            "digest_ok {}\nreproduced {}\nverified {}\n",
            v.digest_ok,
            v.reproduced,
            v.ok()
        ))?,
        _ => o.write_json(&report)?,
    }
    Ok(if v.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
