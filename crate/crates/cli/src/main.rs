use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cork_forge_core::algebra::{homology, validate, Handlebody};
use cork_forge_core::certify::{
    adjunction_sweep, certify_family, d3_family, homeo_report_family, verify_certificate,
    verify_nonstein, ExoticityCertificate,
};
use cork_forge_core::modifications::boundary_sum;
use cork_forge_core::persist::{read_family, write_family};
use cork_forge_core::pipeline::{
    build_family, check_plan, example_u, extract_default, family_for, solve_plan,
    stein_nonstein_family, Family, SequencePlan, Threshold, Variant,
};

#[derive(Parser, Debug)]
#[command(name = "cork-forge", version, about = "Cork-modification handle calculus")]
struct Cli {
    /// Emit JSON instead of text tables.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Standard,
    Strengthened,
    Nonstein,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Strengthened => Variant::Strengthened,
            VariantArg::Nonstein => Variant::Nonstein,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExampleKind {
    U,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a handlebody against every structural invariant.
    Validate { file: Option<PathBuf> },
    /// Homology, intersection form, signature and boundary homology.
    Invariants { file: Option<PathBuf> },
    /// Solve (or check, with --plan) the q and p sequences.
    Sequences {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Build the family X_{-1}..X_n and write it to a directory.
    Construct {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Certify a family directory written by `construct`.
    Certify { dir: PathBuf },
    /// d3 invariants of a family directory or of the standard family of a
    /// handlebody.
    D3 {
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Stein / non-Stein family (boundary sums with U(0) members).
    Nonstein {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary sum of two handlebodies (the second may come from stdin).
    Sum { a: PathBuf, b: Option<PathBuf> },
    /// Print a built-in example handlebody.
    Example {
        #[arg(value_enum)]
        kind: ExampleKind,
        #[arg(short = 'm', allow_negative_numbers = true)]
        m: i64,
    },
}

fn read_input(file: Option<&Path>) -> Result<String> {
    match file {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn read_handlebody(file: Option<&Path>) -> Result<Handlebody> {
    let text = read_input(file)?;
    serde_json::from_str(&text).context("parsing handlebody JSON")
}

fn read_plan(path: &Path) -> Result<SequencePlan> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).context("parsing plan JSON")
}

fn print_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn group(factors: &[i64]) -> String {
    let parts: Vec<String> = factors
        .iter()
        .filter(|d| **d != 1)
        .map(|d| if *d == 0 { "Z".to_string() } else { format!("Z/{d}") })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn seq(v: &[i64]) -> String {
    let items: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", items.join(", "))
}

fn print_evidence(out: &mut impl Write, evidence: &[Threshold]) -> Result<()> {
    for t in evidence {
        for c in &t.checks {
            let mark = if c.holds() { "ok  " } else { "FAIL" };
            writeln!(out, "  [{mark}] i={} {}: {} < {}", t.i, c.name, c.lhs, c.rhs)?;
        }
    }
    Ok(())
}

fn plan_for(h: &Handlebody, n: usize, variant: Variant, plan: Option<&Path>) -> Result<SequencePlan> {
    let data = extract_default(h)?;
    Ok(match plan {
        Some(p) => check_plan(&data, &read_plan(p)?)?,
        None => solve_plan(&data, n, variant)?,
    })
}

fn print_certificate(out: &mut impl Write, c: &ExoticityCertificate) -> Result<()> {
    writeln!(out, "M = {}", seq(&c.m))?;
    for r in &c.realized_genus {
        let g = r.genus.map_or("-".to_string(), |g| g.to_string());
        let t = r
            .no_basis_threshold
            .map_or("-".to_string(), |t| t.to_string());
        writeln!(out, "  X_{:<3} genus(v_0) {g:>4}  no-basis threshold {t:>4}", r.i)?;
    }
    write!(out, "distinct:")?;
    for i in &c.indices {
        write!(out, " {i:>3}")?;
    }
    writeln!(out)?;
    for (i, row) in c.indices.iter().zip(&c.distinct) {
        write!(out, "     {i:>3}:")?;
        for x in row {
            write!(out, " {:>3}", if *x { "x" } else { "." })?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn certify_dir(out: &mut impl Write, dir: &Path, json: bool) -> Result<()> {
    let family = read_family(dir)?;
    let cert = certify_family(&family, &dir.display().to_string())?;
    verify_certificate(&cert)?;
    let sweep = adjunction_sweep(&family)?;
    if let Some(bad) = sweep.iter().find(|e| !e.ok) {
        bail!(
            "adjunction inequality fails for witness {} of X_{}: {} + {} > 2*{} - 2",
            bad.witness,
            bad.member,
            bad.square,
            bad.pairing,
            bad.genus
        );
    }
    let homeo = homeo_report_family(&family)?;
    if json {
        return print_json(out, &cert);
    }
    print_certificate(out, &cert)?;
    let nonneg: Vec<usize> = (0..cert.indices.len())
        .filter(|&a| cert.indices[a] >= 0)
        .collect();
    let mut pairs = 0;
    let mut all = true;
    for (x, &a) in nonneg.iter().enumerate() {
        for &b in &nonneg[x + 1..] {
            if cert.distinct[a][b] {
                pairs += 1;
            } else {
                all = false;
            }
        }
    }
    let verdict = if all { "pairwise distinct" } else { "partially distinguished" };
    writeln!(
        out,
        "accepted: {} members X_0..X_{} {verdict} ({pairs} pairs){}",
        nonneg.len(),
        family.n(),
        if cert.any_orientation { ", for any orientation" } else { "" }
    )?;
    writeln!(out, "adjunction sweep: {} witnesses consistent", sweep.len())?;
    writeln!(out, "{}", homeo.note)?;
    Ok(())
}

fn print_family_summary(out: &mut impl Write, f: &Family, dir: &Path) -> Result<()> {
    writeln!(out, "wrote {} members to {}", f.members.len(), dir.display())?;
    writeln!(out, "q = {}", seq(&f.plan.q))?;
    writeln!(out, "p = {}", seq(&f.plan.p[2..]))?;
    for m in &f.members {
        writeln!(
            out,
            "  X_{:<3} 1-handles {:>3}  2-handles {:>3}  stein {:?}",
            m.index,
            m.handlebody.one_handles,
            m.handlebody.handle_count(),
            m.stein
        )?;
    }
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    let json = cli.json;
    match cli.command {
        Command::Validate { file } => {
            let h = read_handlebody(file.as_deref())?;
            let report = validate(&h);
            if json {
                print_json(out, &report)?;
            } else if report.is_valid() {
                writeln!(out, "valid")?;
            } else {
                write!(out, "{report}")?;
            }
            if !report.is_valid() {
                bail!("{} violation(s)", report.violations.len());
            }
        }
        Command::Invariants { file } => {
            let h = read_handlebody(file.as_deref())?;
            let p = homology(&h)?;
            if json {
                print_json(out, &p)?;
            } else {
                writeln!(out, "H1           {}", group(&p.h1_invariant_factors))?;
                writeln!(out, "b2           {}", p.b2)?;
                writeln!(out, "form         {:?}", p.intersection_matrix)?;
                writeln!(out, "signature    {}", p.signature)?;
                writeln!(out, "euler        {}", p.euler)?;
                writeln!(out, "boundary H1  {}", group(&p.boundary_h1_invariant_factors))?;
            }
        }
        Command::Sequences {
            file,
            n,
            variant,
            plan,
        } => {
            let h = read_handlebody(file.as_deref())?;
            let plan = plan_for(&h, n, variant.into(), plan.as_deref())?;
            if json {
                print_json(out, &plan)?;
            } else {
                writeln!(out, "variant {:?}", plan.variant)?;
                writeln!(out, "q = {}", seq(&plan.q))?;
                writeln!(out, "p = {}", seq(&plan.p[2..]))?;
                print_evidence(out, &plan.evidence)?;
            }
        }
        Command::Construct {
            file,
            n,
            variant,
            out: dir,
            plan,
        } => {
            let h = read_handlebody(file.as_deref())?;
            let data = extract_default(&h)?;
            let plan = plan_for(&h, n, variant.into(), plan.as_deref())?;
            let family = build_family(&h, &data, &plan)?;
            write_family(&dir, &family)?;
            if json {
                print_json(out, &family.plan)?;
            } else {
                print_family_summary(out, &family, &dir)?;
            }
        }
        Command::Certify { dir } => certify_dir(out, &dir, json)?,
        Command::D3 { path, n } => {
            let family = match &path {
                Some(p) if p.is_dir() => read_family(p)?,
                other => family_for(&read_handlebody(other.as_deref())?, n, Variant::Standard)?,
            };
            let report = d3_family(&family)?;
            if json {
                print_json(out, &report)?;
            } else {
                for (i, v) in &report.values {
                    writeln!(out, "d3(xi_{i}) = {v}")?;
                }
                writeln!(out, "all distinct: {}", report.all_distinct)?;
            }
        }
        Command::Nonstein { file, n, out: dir } => {
            let h = read_handlebody(file.as_deref())?;
            let family = stein_nonstein_family(&h, n)?;
            let mut members = family.xs.clone();
            members.extend(family.xn.iter().cloned());
            let report = verify_nonstein(&members)?;
            if let Some(dir) = dir {
                fs::create_dir_all(&dir)?;
                for m in &members {
                    let side = if m.stein_side { "S" } else { "N" };
                    let text = serde_json::to_string_pretty(&m.marked.handlebody)? + "\n";
                    fs::write(dir.join(format!("X{side}_{}.json", m.index)), text)?;
                    let text = serde_json::to_string_pretty(&m.log)? + "\n";
                    fs::write(dir.join(format!("log{side}_{}.json", m.index)), text)?;
                }
            }
            if json {
                print_json(out, &report)?;
            } else {
                for e in &report.entries {
                    writeln!(out, "{:<8} {}", e.label, e.status)?;
                }
            }
        }
        Command::Sum { a, b } => {
            let a = read_handlebody(Some(&a))?;
            let b = read_handlebody(b.as_deref())?;
            validate(&a).into_result()?;
            validate(&b).into_result()?;
            print_json(out, &boundary_sum(&a, &b))?;
        }
        Command::Example { kind: ExampleKind::U, m } => print_json(out, &example_u(m))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
