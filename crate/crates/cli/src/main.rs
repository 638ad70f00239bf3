use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use normality_lab::bbp::{
    eval_boundary, extract_digits, parse_spec_json, presets, validate_spec, BbpSpec, RationalFunction, SpecDescriptor,
    DEFAULT_GUARD_BITS,
};
use normality_lab::gfunction::{
    build_annihilator, classify_g, closed_form_eval, lcm_growth_integers, partial_fractions, rationality_probe,
    DEFAULT_PROFILE_LEN,
};
use normality_lab::numerics::{format_rational, parse_rational};
use normality_lab::perturbed_dynamics::{canonical_initial, dichotomy_probe, perturbed_orbit, verify_correlation};
use normality_lab::poly::IntPoly;
use normality_lab::radix_dynamics::{b_orbit, detect_period};
use normality_lab::{repro, stats, Error};

#[derive(Parser, Debug)]
#[command(name = "normality-lab", version, about = "Radix dynamics, BBP digit extraction and G-series tools")]
struct Cli {
    /// Working precision in bits for enclosures.
    #[arg(long, global = true, env = "NORMALITY_LAB_PRECISION", default_value_t = 128,
          value_parser = clap::value_parser!(u64).range(8..))]
    precision_bits: u64,
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the payload here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Default)]
struct SpecArgs {
    /// Built-in preset name (see `presets`).
    #[arg(long, conflicts_with_all = ["base", "p", "q", "spec_file"])]
    preset: Option<String>,
    #[arg(long)]
    base: Option<u64>,
    /// Numerator coefficients, ascending degree.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    p: Vec<BigInt>,
    /// Denominator coefficients, ascending degree.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    q: Vec<BigInt>,
    #[arg(long, default_value_t = 1)]
    start: u32,
    /// JSON file {"base": b, "p": [...], "q": [...], "start": 0|1}.
    #[arg(long, conflicts_with_all = ["base", "p", "q"])]
    spec_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a spec and report its vanishing flag.
    Validate(SpecArgs),
    /// Enclosure of theta = sum p(n)/q(n) b^-n.
    Eval(SpecArgs),
    /// Enclosure of sum p(n)/q(n) z^n at z = +1 or -1.
    EvalBoundary {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
        z: i64,
    },
    /// Spigot extraction of digits position+1 .. position+count.
    Digits {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        position: u64,
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_GUARD_BITS)]
        guard_bits: u64,
    },
    /// Orbit of a rational x0 under x -> b x mod 1.
    Orbit {
        #[arg(long)]
        x0: String,
        #[arg(long)]
        base: u64,
        /// Report preperiod and period instead of the orbit.
        #[arg(long)]
        period: bool,
    },
    /// Exact orbit of the perturbed map y -> b y + eps_{n+1} mod 1.
    PerturbedOrbit {
        #[command(flatten)]
        spec: SpecArgs,
        /// Initial value; defaults to the canonical one.
        #[arg(long)]
        y0: Option<String>,
    },
    /// Check x_n = y_n* + t_n (mod 1) along the orbit.
    Correlate(SpecArgs),
    /// Empirical limit-point probe of the canonical perturbed orbit.
    Dichotomy {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "1/64")]
        radius: String,
    },
    /// G-series verdict and lcm growth of the denominators.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = DEFAULT_PROFILE_LEN)]
        profile_len: u64,
    },
    /// Partial fraction decomposition of p/q.
    Pfd(SpecArgs),
    /// Differential operator annihilating sum p(n)/q(n) z^n.
    Annihilator(SpecArgs),
    /// Closed form in logarithms and polylogarithms at z = 1/b.
    ClosedForm(SpecArgs),
    /// Rational or numerically transcendental verdict from the closed form.
    ProbeRationality(SpecArgs),
    /// lcm(1..m) and its logarithm.
    LcmGrowth {
        #[arg(long)]
        m: u64,
    },
    /// Discrepancy and block census for a spec, or for seeded synthetic data.
    Stats {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 4)]
        block_length: usize,
        /// Use seeded pseudo-random samples instead of a spec.
        #[arg(long)]
        synthetic: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Digit base for synthetic data.
        #[arg(long = "synthetic-base", default_value_t = 2)]
        synthetic_base: u64,
    },
    /// Same constant in two multiplicatively independent bases.
    Joint {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long, default_value_t = 4)]
        block_length: usize,
    },
    /// List the built-in presets.
    Presets,
    /// Run the reproduction table.
    Repro,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = std::result::Result<Payload, Failure>;

enum Payload {
    Json(String),
    Text(String),
}

fn json<T: Serialize>(value: &T) -> Payload {
    Payload::Json(serde_json::to_string_pretty(value).expect("report serializes"))
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> Payload {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Payload::Text(out)
}

impl SpecArgs {
    fn descriptor(&self) -> std::result::Result<Option<SpecDescriptor>, Failure> {
        if self.preset.is_some() || self.spec_file.is_some() {
            return Ok(None);
        }
        let base = self.base.ok_or_else(|| Failure::Usage("give --preset, --spec-file, or --base with --p and --q".into()))?;
        if self.p.is_empty() || self.q.is_empty() {
            return Err(Failure::Usage("--base needs both --p and --q".into()));
        }
        Ok(Some(SpecDescriptor {
            base,
            p: IntPoly::new(self.p.clone()),
            q: IntPoly::new(self.q.clone()),
            start: self.start,
        }))
    }

    fn spec(&self) -> std::result::Result<BbpSpec, Failure> {
        if let Some(name) = &self.preset {
            return Ok(presets::series_by_name(name)?);
        }
        if let Some(path) = &self.spec_file {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            return Ok(parse_spec_json(&text)?);
        }
        let desc = self.descriptor()?.expect("inline spec");
        Ok(validate_spec(&desc)?)
    }

    /// Rational function and start index; the base is optional here.
    fn rational_function(&self) -> std::result::Result<(RationalFunction, u32), Failure> {
        if let Some(name) = &self.preset {
            return Ok(match presets::by_name(name)?.kind {
                presets::PresetKind::Series { spec } => (spec.rational_function().clone(), spec.start_index()),
                presets::PresetKind::Boundary { r, start, .. } => (r, start),
            });
        }
        if self.spec_file.is_some() || self.base.is_some() {
            let spec = self.spec()?;
            return Ok((spec.rational_function().clone(), spec.start_index()));
        }
        if self.p.is_empty() || self.q.is_empty() {
            return Err(Failure::Usage("give --preset, --spec-file, or --p and --q".into()));
        }
        let r = RationalFunction::new(IntPoly::new(self.p.clone()), IntPoly::new(self.q.clone()));
        Ok((r, self.start))
    }
}

fn parse_rational_arg(name: &str, text: &str) -> std::result::Result<normality_lab::numerics::Rational, Failure> {
    parse_rational(text).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn run(cli: &Cli) -> Outcome {
    let csv_mode = cli.format == Some(Format::Csv);
    let bits = cli.precision_bits;
    let steps = cli.steps;
    let no_csv = |cmd: &str| Failure::Usage(format!("csv output is not available for `{cmd}`"));
    if csv_mode && !matches!(
        cli.command,
        Command::Digits { .. } | Command::Orbit { .. } | Command::PerturbedOrbit { .. } | Command::Correlate(_)
            | Command::Classify { .. } | Command::Stats { .. }
    ) {
        return Err(no_csv(command_name(&cli.command)));
    }
    match &cli.command {
        Command::Validate(args) => {
            let spec = args.spec()?;
            Ok(json(&Validation { valid: true, vanishing: spec.is_vanishing(), spec: spec.descriptor() }))
        }
        Command::Eval(args) => Ok(json(&args.spec()?.eval_theta(bits)?)),
        Command::EvalBoundary { spec, z } => {
            let (r, start, z) = match &spec.preset {
                Some(name) => match presets::by_name(name)?.kind {
                    presets::PresetKind::Boundary { r, z, start } => (r, start, z),
                    presets::PresetKind::Series { .. } => {
                        return Err(Failure::Domain(Error::Malformed(format!("preset {name:?} is not a boundary sum"))))
                    }
                },
                None => {
                    let (r, start) = spec.rational_function()?;
                    (r, start, *z)
                }
            };
            Ok(json(&eval_boundary(&r, z, start, bits)?))
        }
        Command::Digits { spec, position, count, guard_bits } => {
            let ex = extract_digits(&spec.spec()?, *position, *count, *guard_bits)?;
            if csv_mode {
                let rows = ex.digits.iter().zip(&ex.flags).enumerate().map(|(i, (d, f))| {
                    format!("{},{},{}", ex.position + i as u64 + 1, d, serde_json::to_value(f).expect("flag").as_str().unwrap_or(""))
                });
                return Ok(csv("index,digit,flag", rows));
            }
            Ok(json(&ex))
        }
        Command::Orbit { x0, base, period } => {
            let x0 = parse_rational_arg("x0", x0)?;
            if *period {
                if csv_mode {
                    return Err(no_csv("orbit --period"));
                }
                return Ok(json(&detect_period(&x0, *base)?));
            }
            let orbit = b_orbit(&x0, *base, steps as usize)?;
            if csv_mode {
                let rows = orbit
                    .remainders
                    .iter()
                    .zip(&orbit.digits)
                    .enumerate()
                    .map(|(i, (r, d))| format!("{},{},{}", i + 1, d, format_rational(r)));
                return Ok(csv("n,digit,remainder", rows));
            }
            Ok(json(&orbit))
        }
        Command::PerturbedOrbit { spec, y0 } => {
            let spec = spec.spec()?;
            let y0 = match y0 {
                Some(text) => parse_rational_arg("y0", text)?,
                None => canonical_initial(&spec),
            };
            let orbit = perturbed_orbit(&spec, &y0, steps as usize)?;
            if csv_mode {
                let rows = (1..=orbit.len())
                    .map(|n| format!("{},{},{}", n, orbit.digits()[n - 1], format_rational(&orbit.remainder(n))));
                return Ok(csv("n,digit,remainder", rows));
            }
            Ok(json(&orbit))
        }
        Command::Correlate(args) => {
            let report = verify_correlation(&args.spec()?, steps, bits)?;
            if csv_mode {
                let rows = report.tail_magnitudes.iter().enumerate().map(|(n, t)| {
                    let failed = report.failures.binary_search(&(n as u64)).is_ok();
                    format!("{},{},{}", n, format_rational(t), if failed { "fail" } else { "pass" })
                });
                return Ok(csv("n,tail_bound,check", rows));
            }
            Ok(json(&report))
        }
        Command::Dichotomy { spec, radius } => {
            let radius = parse_rational_arg("radius", radius)?;
            Ok(json(&dichotomy_probe(&spec.spec()?, steps, &radius)?))
        }
        Command::Classify { spec, profile_len } => {
            let (r, _) = spec.rational_function()?;
            let report = classify_g(&r, *profile_len)?;
            if csv_mode {
                let rows = report.lcm_profile.iter().map(|p| format!("{},{}", p.n, p.log_g));
                return Ok(csv("n,log_g", rows));
            }
            Ok(json(&report))
        }
        Command::Pfd(args) => Ok(json(&partial_fractions(&args.rational_function()?.0)?)),
        Command::Annihilator(args) => {
            let (r, start) = args.rational_function()?;
            Ok(json(&build_annihilator(&r, start)?))
        }
        Command::ClosedForm(args) => Ok(json(&closed_form_eval(&args.spec()?, bits)?)),
        Command::ProbeRationality(args) => Ok(json(&rationality_probe(&args.spec()?, bits)?)),
        Command::LcmGrowth { m } => Ok(json(&lcm_growth_integers(*m, bits)?)),
        Command::Stats { spec, block_length, synthetic, seed, synthetic_base } => {
            let (discrepancy, census, payload) = if *synthetic {
                let report = stats::synthetic_report(*seed, steps as usize, *synthetic_base, *block_length)?;
                (report.discrepancy.clone(), report.census.clone(), json(&report))
            } else {
                let report = stats::base_report(&spec.spec()?, steps as usize, bits, *block_length)?;
                (report.discrepancy.clone(), report.census.clone(), json(&report))
            };
            if csv_mode {
                let mut rows = vec![format!("star_discrepancy,{}", format_rational(&discrepancy.star_discrepancy))];
                rows.extend(census.counts.iter().map(|(block, count)| format!("block:{block},{count}")));
                return Ok(csv("key,value", rows));
            }
            Ok(payload)
        }
        Command::Joint { first, second, block_length } => {
            let a = presets::series_by_name(first)?;
            let b = presets::series_by_name(second)?;
            Ok(json(&stats::joint_base_report(&a, &b, steps as usize, bits, *block_length)?))
        }
        Command::Presets => Ok(json(&presets::all())),
        Command::Repro => {
            let report = repro::run();
            if cli.format == Some(Format::Json) {
                Ok(json(&report))
            } else {
                Ok(Payload::Text(format!("{report}\n")))
            }
        }
    }
}

#[derive(Serialize)]
struct Validation {
    valid: bool,
    vanishing: bool,
    spec: SpecDescriptor,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate(_) => "validate",
        Command::Eval(_) => "eval",
        Command::EvalBoundary { .. } => "eval-boundary",
        Command::Digits { .. } => "digits",
        Command::Orbit { .. } => "orbit",
        Command::PerturbedOrbit { .. } => "perturbed-orbit",
        Command::Correlate(_) => "correlate",
        Command::Dichotomy { .. } => "dichotomy",
        Command::Classify { .. } => "classify",
        Command::Pfd(_) => "pfd",
        Command::Annihilator(_) => "annihilator",
        Command::ClosedForm(_) => "closed-form",
        Command::ProbeRationality(_) => "probe-rationality",
        Command::LcmGrowth { .. } => "lcm-growth",
        Command::Stats { .. } => "stats",
        Command::Joint { .. } => "joint",
        Command::Presets => "presets",
        Command::Repro => "repro",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(payload) => {
            let text = match payload {
                Payload::Json(s) => s + "\n",
                Payload::Text(s) => s,
            };
            let written = match &cli.output {
                Some(path) => fs::write(path, text.as_bytes()),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(Error::InvalidSpec(problems))) => {
            eprintln!("error: invalid spec");
            for p in problems {
                eprintln!("  - {p}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
