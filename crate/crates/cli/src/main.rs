use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qclab_core::characterization::{CharacterizationResult, Inverter, BISECTION_TOL};
use qclab_core::correlators::{mutual_information, mutual_predictability, pcc_distribution, pcc_observables, CorrelatorKind};
use qclab_core::figures::{figure_csv, FigureId, DEFAULT_STEPS};
use qclab_core::measurement::{joint_distribution, make_observable, MeasurementSetting, ObservableLabel};
use qclab_core::states::{FamilyKind, StateFamily};
use qclab_core::sweep::{SweepAxis, SweepSpec};
use qclab_core::verify::{self, Level};
use qclab_core::Error;

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

#[derive(Parser)]
#[command(name = "qclab", version, about = "Negativity and MUB correlators for two-qudit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlators and Negativity of one state, as JSON.
    Compute {
        /// State descriptor: inline JSON or a path to a JSON file.
        #[arg(long)]
        state: String,
        /// Basis pair (repeatable): Z,Z | Z,X | X,X | Z,shiftZ:k | W,W
        #[arg(long = "bases", default_value = "Z,Z")]
        bases: Vec<MeasurementSetting>,
        #[arg(long, value_delimiter = ',', default_value = "mp,mi,pcc")]
        correlators: Vec<CorrelatorKind>,
    },
    /// Negativity from measured correlator values.
    Invert {
        #[arg(long)]
        family: FamilyArg,
        #[arg(long)]
        correlator: CorrelatorKind,
        /// Measured values; noisy-bell takes the X-basis value then the Z-basis value.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Shift of the OPH setting Z, shiftZ:k.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
    },
    /// CSV data set behind one figure.
    Figure {
        #[arg(long = "figure", alias = "id")]
        figure: String,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one or two parameters of a state template, as CSV.
    Sweep {
        #[arg(long)]
        state: String,
        /// name:start:stop:steps (one or two)
        #[arg(long = "axis", required = true)]
        axes: Vec<SweepAxis>,
        #[arg(long = "bases", default_value = "Z,Z")]
        bases: Vec<MeasurementSetting>,
        #[arg(long, value_delimiter = ',', default_value = "mp,mi,pcc")]
        correlators: Vec<CorrelatorKind>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suite.
    Verify {
        #[arg(long, default_value = "fast")]
        level: Level,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FamilyArg {
    NoisyBell,
    Werner,
    Oph,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::NoisyBell => FamilyKind::NoisyBell,
            FamilyArg::Werner => FamilyKind::Werner,
            FamilyArg::Oph => FamilyKind::Oph,
        }
    }
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_domain_error() { EXIT_DOMAIN } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Compute {
            state,
            bases,
            correlators,
        } => {
            let report = compute(&read_state(&state)?, &bases, &correlators)?;
            println!("{}", pretty(&report));
            Ok(0)
        }
        Command::Invert {
            family,
            correlator,
            values,
            d,
            k,
        } => {
            let result = invert(family.into(), correlator, &values, d, k)?;
            println!("{}", pretty(&serde_json::to_value(result).expect("result serializes")));
            Ok(0)
        }
        Command::Figure { figure, steps, out } => {
            let id: FigureId = figure.parse().map_err(input_error)?;
            emit(&figure_csv(id, steps)?, out.as_deref())?;
            Ok(0)
        }
        Command::Sweep {
            state,
            axes,
            bases,
            correlators,
            out,
        } => {
            let spec = SweepSpec {
                template: read_json(&state)?,
                axes,
                settings: bases,
                correlators,
            };
            emit(&spec.run()?.to_csv(), out.as_deref())?;
            Ok(0)
        }
        Command::Verify { level } => {
            let results = verify::run(level);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {failed} failed", results.len());
            Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn read_json(arg: &str) -> Result<Value, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| input_error(format!("cannot read state file `{arg}`: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| input_error(format!("malformed state JSON: {e}")))
}

fn read_state(arg: &str) -> Result<StateFamily, Failure> {
    let family: StateFamily = serde_json::from_value(read_json(arg)?)
        .map_err(|e| input_error(format!("invalid state descriptor: {e}")))?;
    family.validate()?;
    Ok(family)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| input_error(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn compute(
    family: &StateFamily,
    settings: &[MeasurementSetting],
    correlators: &[CorrelatorKind],
) -> Result<Value, Failure> {
    let rho = family.build()?;
    let d = rho.dim_a();
    let mut reports = Vec::new();
    for &setting in settings {
        let (ba, bb) = setting.bases(d)?;
        let jd = joint_distribution(&rho, &ba, &bb)?;
        let mut entry = serde_json::Map::new();
        entry.insert("bases".into(), json!(setting.to_string()));
        for &kind in correlators {
            let value = match kind {
                CorrelatorKind::Mp => json!(mutual_predictability(&jd, 0)?),
                CorrelatorKind::Mi => json!(mutual_information(&jd)),
                CorrelatorKind::Pcc => match setting {
                    // W is degenerate; PCC comes from the observable expectations
                    MeasurementSetting::WW => {
                        let w = make_observable(d, ObservableLabel::W, None)?;
                        json!(pcc_observables(&rho, &w, &w)?)
                    }
                    _ => json!(pcc_distribution(&jd)),
                },
            };
            entry.insert(kind.to_string(), value);
        }
        reports.push(Value::Object(entry));
    }
    Ok(json!({
        "state": family,
        "trace": rho.trace(),
        "min_eigenvalue": rho.min_eigenvalue()?,
        "negativity": rho.negativity()?,
        "negativity_closed_form": family.closed_form_negativity()?,
        "correlators": reports,
    }))
}

fn inverter() -> Result<Inverter, Failure> {
    match std::env::var("QCLAB_TOL") {
        Ok(s) => {
            let tol: f64 = s
                .trim()
                .parse()
                .ok()
                .filter(|t: &f64| t.is_finite() && *t > 0.0)
                .ok_or_else(|| input_error(format!("QCLAB_TOL=`{s}` is not a positive number")))?;
            Ok(Inverter::with_tol(tol))
        }
        Err(_) => Ok(Inverter::with_tol(BISECTION_TOL)),
    }
}

fn invert(
    family: FamilyKind,
    kind: CorrelatorKind,
    values: &[f64],
    d: usize,
    k: i64,
) -> Result<CharacterizationResult, Failure> {
    let inv = inverter()?;
    let expect = |n: usize| {
        if values.len() == n {
            Ok(())
        } else {
            Err(input_error(format!("{family} takes {n} value(s), got {}", values.len())))
        }
    };
    Ok(match family {
        FamilyKind::NoisyBell => {
            expect(2)?;
            inv.noisy_bell(values[0], values[1], kind, d)?
        }
        FamilyKind::Werner => {
            expect(1)?;
            inv.werner(values[0], kind, d)?
        }
        FamilyKind::Oph => {
            expect(1)?;
            inv.oph(values[0], kind, k)?
        }
    })
}
