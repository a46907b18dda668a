//! Command-line front end. Output is deterministic; exit status is 0 on
//! success, 1 when a verification fails and 2 on usage errors.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::chern::{ChernNumbers, LineBundleSpec, ProjProduct, VirtualIntersection};
use crate::cobordism::{self, GenusContext, HrrReport};
use crate::exactnum::Coeff;
use crate::lazard::{
    self, verify_fgl_axioms, verify_g_axiom, verify_lagrange, FormalGroupLaw, GenusSpec, IdentityCheck, Specialize,
};
use crate::series::TruncSeries;

pub const DEFAULT_ORDER: u32 = 8;
pub const MAX_ORDER: u32 = 16;
const SLOW_ORDER: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cobord", version, about = "Exact Lazard-ring and Chern-number computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// Truncation order: series are exact below this total degree.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SpecArg {
    /// Genus: `additive`, `multiplicative` or `p1=..,p2=..`.
    #[arg(long)]
    spec: Option<String>,
}

#[derive(Debug, Args)]
struct VarietyArgs {
    /// Product of projective spaces, e.g. `P2xP1`.
    #[arg(long)]
    variety: String,
    /// Line bundles such as `O(1,2)`; each one cuts a hypersurface.
    #[arg(long, num_args = 1.., action = clap::ArgAction::Append)]
    bundles: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coefficients a[i,j] of the universal formal group law.
    Fgl {
        #[command(flatten)]
        opts: OrderArgs,
        #[command(flatten)]
        spec: SpecArg,
    },
    /// The universal logarithm h(u).
    Log {
        #[command(flatten)]
        opts: OrderArgs,
        #[command(flatten)]
        spec: SpecArg,
    },
    /// The series g(u) with u g(u) = h^{-1}(u).
    Gseries {
        #[command(flatten)]
        opts: OrderArgs,
        #[command(flatten)]
        spec: SpecArg,
    },
    /// The formal inverse chi(u) of the (specialized) law.
    Chi {
        #[command(flatten)]
        opts: OrderArgs,
        #[command(flatten)]
        spec: SpecArg,
    },
    /// The genus integral of a variety, optionally cut by bundles.
    Genus {
        #[command(flatten)]
        opts: OrderArgs,
        #[command(flatten)]
        variety: VarietyArgs,
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Chern numbers of a variety or one of its complete intersections.
    Chern {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Milnor-basis coordinates from Chern numbers.
    Decompose {
        #[command(flatten)]
        variety: VarietyArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Genus integral versus Chern-number class for a product of projective spaces.
    Hrr {
        #[command(flatten)]
        opts: OrderArgs,
        #[arg(long)]
        variety: String,
    },
    /// The same comparison for complete intersections.
    Hrrc {
        #[command(flatten)]
        opts: OrderArgs,
        #[command(flatten)]
        variety: VarietyArgs,
    },
    /// Runs the built-in identity suite.
    Verify {
        #[command(flatten)]
        opts: OrderArgs,
    },
}

/// Result of a command before it is written out.
struct Outcome {
    text: String,
    json: serde_json::Value,
    pass: bool,
}

impl Outcome {
    fn ok(text: String, json: serde_json::Value) -> Self {
        Outcome { text, json, pass: true }
    }
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn check_order(order: u32, min: u32, err: &mut dyn Write) -> Result<(), Usage> {
    if order < min {
        return Err(Usage(format!("--order must be at least {min}, got {order}")));
    }
    if order > MAX_ORDER {
        return Err(Usage(format!("--order is capped at {MAX_ORDER}, got {order}")));
    }
    if order > SLOW_ORDER {
        let _ = writeln!(
            err,
            "warning: order {order} may take minutes; coefficients grow quickly"
        );
    }
    Ok(())
}

fn parse_spec(spec: &SpecArg) -> Result<Option<GenusSpec>, Usage> {
    spec.spec
        .as_deref()
        .map(|s| s.parse::<GenusSpec>())
        .transpose()
        .map_err(Usage::from)
}

fn parse_variety(args: &VarietyArgs) -> Result<(ProjProduct, Vec<LineBundleSpec>), Usage> {
    let x: ProjProduct = args.variety.parse()?;
    let bundles = args
        .bundles
        .iter()
        .map(|b| LineBundleSpec::parse(&x, b))
        .collect::<Result<Vec<_>, _>>()?;
    if bundles.len() > x.dim() as usize {
        return Err(Usage(format!(
            "{} bundles exceed the dimension {} of {x}",
            bundles.len(),
            x.dim()
        )));
    }
    Ok((x, bundles))
}

fn series_outcome<C: Coeff>(name: &str, order: u32, spec: Option<&GenusSpec>, s: &TruncSeries<C>) -> Outcome {
    let text = s.to_string();
    Outcome::ok(
        format!("{text}\n"),
        json!({ "series": name, "order": order, "spec": spec.map(GenusSpec::name), "value": text }),
    )
}

fn fgl_outcome<C: Coeff>(f: &FormalGroupLaw<C>, spec: Option<&GenusSpec>) -> Outcome {
    let rows = f.dump();
    let text: String = rows.iter().map(|(i, j, c)| format!("a[{i},{j}] = {c}\n")).collect();
    let coefficients: Vec<_> = rows
        .iter()
        .map(|(i, j, c)| json!({ "i": i, "j": j, "value": c.to_string() }))
        .collect();
    Outcome::ok(
        text,
        json!({ "order": f.order(), "spec": spec.map(GenusSpec::name), "coefficients": coefficients }),
    )
}

fn chern_text(numbers: &ChernNumbers) -> String {
    numbers.iter().map(|(p, v)| format!("C[{p}] = {v}\n")).collect()
}

fn report_outcome(kind: &str, r: &HrrReport) -> Outcome {
    let bundles = if r.bundles.is_empty() {
        String::new()
    } else {
        format!(" {}", r.bundles.join(" "))
    };
    let status = if r.pass { "PASS" } else { "FAIL" };
    let text = format!(
        "{status} {kind} {}{bundles}: lhs = {}, rhs = {}\n",
        r.variety, r.lhs, r.rhs
    );
    Outcome {
        text,
        json: serde_json::to_value(r).expect("serializable"),
        pass: r.pass,
    }
}

#[derive(Serialize)]
struct VerifySummary {
    order: u32,
    checks: Vec<IdentityCheck>,
    pass: bool,
}

fn verify(order: u32) -> Result<Outcome, Usage> {
    let mut checks = Vec::new();
    let fgl = lazard::universal_fgl(order)?;
    for mut c in verify_fgl_axioms(&fgl)?.checks {
        c.name = format!("fgl {}", c.name);
        checks.push(c);
    }
    checks.extend(verify_g_axiom(order)?.checks);
    for r in 0..=4.min(order.saturating_sub(2)) {
        checks.push(verify_lagrange(r)?);
    }
    let ctx = GenusContext::new(order)?;
    let max_dim = 4.min(order - 1);
    for d in 1..=max_dim {
        for x in ProjProduct::all_of_dimension(d) {
            let r = ctx.hrr(&x)?;
            checks.push(IdentityCheck {
                name: format!("hrr {x}"),
                pass: r.pass,
                lhs: (!r.pass).then(|| r.lhs.to_string()),
                rhs: (!r.pass).then(|| r.rhs.to_string()),
            });
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let mut text = String::new();
    for c in &checks {
        if c.pass {
            text.push_str(&format!("PASS {}\n", c.name));
        } else {
            text.push_str(&format!(
                "FAIL {}\n  lhs = {}\n  rhs = {}\n",
                c.name,
                c.lhs.as_deref().unwrap_or(""),
                c.rhs.as_deref().unwrap_or("")
            ));
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    text.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    let json = serde_json::to_value(VerifySummary { order, checks, pass }).expect("serializable");
    Ok(Outcome { text, json, pass })
}

fn execute(command: Command, err: &mut dyn Write) -> Result<(Outcome, Format), Usage> {
    Ok(match command {
        Command::Fgl { opts, spec } => {
            check_order(opts.order, 2, err)?;
            let spec = parse_spec(&spec)?;
            let f = lazard::universal_fgl(opts.order)?;
            let out = match &spec {
                Some(s) => fgl_outcome(&f.specialize(s)?, Some(s)),
                None => fgl_outcome(&f, None),
            };
            (out, opts.format)
        }
        Command::Log { opts, spec } => {
            check_order(opts.order, 2, err)?;
            let spec = parse_spec(&spec)?;
            let h = lazard::universal_log(opts.order)?;
            let out = match &spec {
                Some(s) => series_outcome("log", opts.order, Some(s), &h.specialize(s)?),
                None => series_outcome("log", opts.order, None, &h),
            };
            (out, opts.format)
        }
        Command::Gseries { opts, spec } => {
            check_order(opts.order, 1, err)?;
            let spec = parse_spec(&spec)?;
            let g = lazard::g_series(opts.order)?;
            let out = match &spec {
                Some(s) => series_outcome("g", opts.order, Some(s), &g.specialize(s)?),
                None => series_outcome("g", opts.order, None, &g),
            };
            (out, opts.format)
        }
        Command::Chi { opts, spec } => {
            check_order(opts.order, 2, err)?;
            let spec = parse_spec(&spec)?;
            let f = lazard::universal_fgl(opts.order)?;
            let out = match &spec {
                Some(s) => series_outcome("chi", opts.order, Some(s), &lazard::chi(&f.specialize(s)?)?),
                None => series_outcome("chi", opts.order, None, &lazard::chi(&f)?),
            };
            (out, opts.format)
        }
        Command::Genus { opts, variety, spec } => {
            check_order(opts.order, 2, err)?;
            let (x, bundles) = parse_variety(&variety)?;
            let spec = parse_spec(&spec)?;
            if opts.order <= x.dim() {
                return Err(Usage(format!(
                    "--order {} must exceed the dimension {} of {x}",
                    opts.order,
                    x.dim()
                )));
            }
            let value = GenusContext::new(opts.order)?.genus_integral(&x, &bundles)?;
            let value = match &spec {
                Some(s) => value.specialize(s)?.to_string(),
                None => value.to_string(),
            };
            let json = json!({
                "variety": x.to_string(),
                "bundles": bundles.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "order": opts.order,
                "spec": spec.as_ref().map(GenusSpec::name),
                "value": value,
            });
            (Outcome::ok(format!("{value}\n"), json), opts.format)
        }
        Command::Chern { variety, format } => {
            let (x, bundles) = parse_variety(&variety)?;
            let z = VirtualIntersection::complete_intersection(&x, &bundles)?;
            let numbers = z.chern_numbers();
            let json = json!({
                "variety": x.to_string(),
                "bundles": bundles.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "dimension": z.dim(),
                "chern_numbers": numbers,
            });
            (Outcome::ok(chern_text(&numbers), json), format)
        }
        Command::Decompose { variety, format } => {
            let (x, bundles) = parse_variety(&variety)?;
            let report = cobordism::ell_with_bundles(&x, &bundles)?;
            let class = report.class();
            let mut text = String::new();
            for (j, a) in report.basis.iter().zip(&report.coordinates) {
                let name = cobordism::basis_variety(j).map_or_else(|| "point".to_string(), |v| v.to_string());
                text.push_str(&format!("{name}: {a}\n"));
            }
            text.push_str(&format!("class = {}\n", class.value));
            let mut json = serde_json::to_value(&report).expect("serializable");
            json["class"] = json!(class.value.to_string());
            (Outcome::ok(text, json), format)
        }
        Command::Hrr { opts, variety } => {
            check_order(opts.order, 2, err)?;
            let x: ProjProduct = variety.parse()?;
            if opts.order <= x.dim() {
                return Err(Usage(format!(
                    "--order {} must exceed the dimension {} of {x}",
                    opts.order,
                    x.dim()
                )));
            }
            (
                report_outcome("hrr", &cobordism::hrr_check(&x, opts.order)?),
                opts.format,
            )
        }
        Command::Hrrc { opts, variety } => {
            check_order(opts.order, 2, err)?;
            let (x, bundles) = parse_variety(&variety)?;
            if bundles.is_empty() {
                return Err(Usage("hrrc needs at least one --bundles entry".into()));
            }
            if opts.order <= x.dim() {
                return Err(Usage(format!(
                    "--order {} must exceed the dimension {} of {x}",
                    opts.order,
                    x.dim()
                )));
            }
            (
                report_outcome("hrrc", &cobordism::hrrc_check(&x, &bundles, opts.order)?),
                opts.format,
            )
        }
        Command::Verify { opts } => {
            check_order(opts.order, 2, err)?;
            (verify(opts.order)?, opts.format)
        }
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, err) {
        Ok((outcome, format)) => {
            let _ = match format {
                Format::Text => write!(out, "{}", outcome.text),
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&outcome.json).expect("valid json")
                ),
            };
            if outcome.pass {
                0
            } else {
                1
            }
        }
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
