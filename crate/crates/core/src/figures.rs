//! Data sets behind each plot, emitted as CSV. Every figure is computed for two qutrits
//! (d = 3) by building the state, measuring it and, where the plot shows a recovered
//! quantity, inverting the measured correlators.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::characterization::{
    bound_maccone_mi, bound_maccone_pcc, bound_spengler, invert_noisy_bell, invert_werner,
    oph_from_correlator, state_dependent_sum_threshold, BoundVerdict, Region,
};
use crate::correlators::{correlator_value, CorrelatorKind};
use crate::error::{Error, Result};
use crate::measurement::{joint_distribution, MeasurementSetting};
use crate::states::{FamilyKind, StateFamily, OPH_RANGE};

pub const FIGURE_DIM: usize = 3;
pub const DEFAULT_STEPS: usize = 201;
/// Mixing weights drawn as separate curves in the noisy Bell figures.
pub const NOISY_BELL_WEIGHTS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
/// Significant digits of every number in CSV output.
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    MpNoisyBell,
    MiNoisyBell,
    PccNoisyBell,
    MpWerner,
    MiWerner,
    PccWerner,
    OphMp,
    OphMpNeg,
    OphMi,
    OphMiNeg,
    OphPcc,
    OphPccNeg,
    BoundsNoisyMp,
    BoundsNoisyMi,
    BoundsNoisyPcc,
    BoundsWernerMp,
    BoundsWernerMi,
    BoundsWernerPcc,
}

impl FigureId {
    pub const ALL: [FigureId; 18] = [
        FigureId::MpNoisyBell,
        FigureId::MiNoisyBell,
        FigureId::PccNoisyBell,
        FigureId::MpWerner,
        FigureId::MiWerner,
        FigureId::PccWerner,
        FigureId::OphMp,
        FigureId::OphMpNeg,
        FigureId::OphMi,
        FigureId::OphMiNeg,
        FigureId::OphPcc,
        FigureId::OphPccNeg,
        FigureId::BoundsNoisyMp,
        FigureId::BoundsNoisyMi,
        FigureId::BoundsNoisyPcc,
        FigureId::BoundsWernerMp,
        FigureId::BoundsWernerMi,
        FigureId::BoundsWernerPcc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::MpNoisyBell => "fig-mp-noisy-bell",
            FigureId::MiNoisyBell => "fig-mi-noisy-bell",
            FigureId::PccNoisyBell => "fig-pcc-noisy-bell",
            FigureId::MpWerner => "fig-mp-werner",
            FigureId::MiWerner => "fig-mi-werner",
            FigureId::PccWerner => "fig-pcc-werner",
            FigureId::OphMp => "fig-oph-mp",
            FigureId::OphMpNeg => "fig-oph-mp-neg",
            FigureId::OphMi => "fig-oph-mi",
            FigureId::OphMiNeg => "fig-oph-mi-neg",
            FigureId::OphPcc => "fig-oph-pcc",
            FigureId::OphPccNeg => "fig-oph-pcc-neg",
            FigureId::BoundsNoisyMp => "fig-bounds-noisy-mp",
            FigureId::BoundsNoisyMi => "fig-bounds-noisy-mi",
            FigureId::BoundsNoisyPcc => "fig-bounds-noisy-pcc",
            FigureId::BoundsWernerMp => "fig-bounds-werner-mp",
            FigureId::BoundsWernerMi => "fig-bounds-werner-mi",
            FigureId::BoundsWernerPcc => "fig-bounds-werner-pcc",
        }
    }

    pub fn correlator(self) -> CorrelatorKind {
        use FigureId::*;
        match self {
            MpNoisyBell | MpWerner | OphMp | OphMpNeg | BoundsNoisyMp | BoundsWernerMp => {
                CorrelatorKind::Mp
            }
            MiNoisyBell | MiWerner | OphMi | OphMiNeg | BoundsNoisyMi | BoundsWernerMi => {
                CorrelatorKind::Mi
            }
            PccNoisyBell | PccWerner | OphPcc | OphPccNeg | BoundsNoisyPcc | BoundsWernerPcc => {
                CorrelatorKind::Pcc
            }
        }
    }

    fn recipe(self) -> Recipe {
        use FigureId::*;
        match self {
            MpNoisyBell | MiNoisyBell | PccNoisyBell => Recipe::NoisyBell,
            MpWerner | MiWerner | PccWerner => Recipe::Werner,
            OphMp | OphMi | OphPcc => Recipe::Oph,
            OphMpNeg | OphMiNeg | OphPccNeg => Recipe::OphNpt,
            BoundsNoisyMp | BoundsNoisyMi | BoundsNoisyPcc => Recipe::BoundsNoisyBell,
            BoundsWernerMp | BoundsWernerMi | BoundsWernerPcc => Recipe::BoundsWerner,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s.trim())
            .ok_or_else(|| {
                let known: Vec<&str> = FigureId::ALL.iter().map(|id| id.name()).collect();
                format!("unknown figure `{s}` (known: {})", known.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy)]
enum Recipe {
    NoisyBell,
    Werner,
    Oph,
    OphNpt,
    BoundsNoisyBell,
    BoundsWerner,
}

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&format_sig(*x, CSV_DIGITS)),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Empty => Ok(()),
        }
    }
}

/// A header plus rows, rendered with `\n` line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// `printf("%.{digits}g")`: shortest of fixed and scientific notation, trailing zeros
/// removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `steps` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![start];
    }
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                stop
            } else {
                start + (stop - start) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn measure(family: &StateFamily, setting: MeasurementSetting, kind: CorrelatorKind) -> Result<f64> {
    let rho = family.build()?;
    let (ba, bb) = setting.bases(rho.dim_a())?;
    correlator_value(&joint_distribution(&rho, &ba, &bb)?, kind)
}

fn symbol(kind: CorrelatorKind) -> &'static str {
    match kind {
        CorrelatorKind::Mp => "P",
        CorrelatorKind::Mi => "I",
        CorrelatorKind::Pcc => "PCC",
    }
}

fn state_independent(kind: CorrelatorKind, z: f64, x: f64, d: usize) -> BoundVerdict {
    match kind {
        CorrelatorKind::Mp => bound_spengler(&[z, x], d),
        CorrelatorKind::Mi => bound_maccone_mi(z, x, d),
        CorrelatorKind::Pcc => bound_maccone_pcc(z, x),
    }
}

/// Computes the figure's table on `steps` sweep points (per curve).
pub fn figure_table(id: FigureId, steps: usize) -> Result<Table> {
    if steps < 2 {
        return Err(Error::Unsupported(format!("figures need at least 2 steps, got {steps}")));
    }
    let kind = id.correlator();
    let d = FIGURE_DIM;
    let sym = symbol(kind);
    let (z_col, x_col) = (format!("{sym}_Z"), format!("{sym}_X"));
    let header = |cols: &[&str]| cols.iter().map(|c| c.to_string()).collect::<Vec<_>>();

    let noisy_points = || -> Vec<(f64, f64)> {
        NOISY_BELL_WEIGHTS
            .iter()
            .flat_map(|&a| linspace(0.0, 1.0, steps).into_iter().map(move |c| (a, c)))
            .collect()
    };
    let noisy_state = |a: f64, c: f64| StateFamily::NoisyBell { d, a, b: 0.0, c };

    let (header, rows) = match id.recipe() {
        Recipe::NoisyBell => {
            let rows = noisy_points()
                .par_iter()
                .map(|&(a, c)| -> Result<Vec<Cell>> {
                    let family = noisy_state(a, c);
                    let x = measure(&family, MeasurementSetting::XX, kind)?;
                    let z = measure(&family, MeasurementSetting::ZZ, kind)?;
                    let recovered = invert_noisy_bell(x, z, kind, d)?;
                    Ok(vec![
                        a.into(),
                        c.into(),
                        x.into(),
                        z.into(),
                        family.closed_form_negativity()?.into(),
                        recovered.negativity.into(),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            let h = header(&["a", "c", &x_col, &z_col, "negativity", "recovered_negativity"]);
            (h, rows)
        }
        Recipe::Werner => {
            let rows = linspace(0.0, 1.0, steps)
                .par_iter()
                .map(|&a| -> Result<Vec<Cell>> {
                    let family = StateFamily::Werner { d, a };
                    let z = measure(&family, MeasurementSetting::ZZ, kind)?;
                    let recovered = invert_werner(z, kind, d)?;
                    Ok(vec![
                        a.into(),
                        z.into(),
                        family.closed_form_negativity()?.into(),
                        recovered.negativity.into(),
                        recovered.ambiguity.into(),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            let h = header(&["a", &z_col, "negativity", "recovered_negativity", "ambiguous"]);
            (h, rows)
        }
        Recipe::Oph => {
            let rows = linspace(OPH_RANGE.0, OPH_RANGE.1, steps)
                .par_iter()
                .map(|&a| -> Result<Vec<Cell>> {
                    let family = StateFamily::Oph { a };
                    let z = measure(&family, MeasurementSetting::ZShift(1), kind)?;
                    Ok(vec![
                        a.into(),
                        z.into(),
                        Cell::Text(region_label(Region::of_oph(a)).into()),
                        family.closed_form_negativity()?.into(),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            (header(&["a", &z_col, "region", "negativity"]), rows)
        }
        Recipe::OphNpt => {
            let rows = linspace(4.0, OPH_RANGE.1, steps)
                .par_iter()
                .map(|&a| -> Result<Vec<Cell>> {
                    let family = StateFamily::Oph { a };
                    let z = measure(&family, MeasurementSetting::ZShift(1), kind)?;
                    let recovered = oph_from_correlator(z, kind, 1)?;
                    Ok(vec![
                        a.into(),
                        z.into(),
                        family.closed_form_negativity()?.into(),
                        recovered.negativity.into(),
                        recovered.aux_param.into(),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            let h = header(&["a", &z_col, "negativity", "recovered_negativity", "recovered_a"]);
            (h, rows)
        }
        Recipe::BoundsNoisyBell => {
            let rows = noisy_points()
                .par_iter()
                .map(|&(a, c)| -> Result<Vec<Cell>> {
                    let family = noisy_state(a, c);
                    let z = measure(&family, MeasurementSetting::ZZ, kind)?;
                    let x = measure(&family, MeasurementSetting::XX, kind)?;
                    let dependent =
                        state_dependent_sum_threshold(FamilyKind::NoisyBell, kind, d, Some(a))?;
                    let mut row = vec![a.into(), c.into()];
                    row.extend(bound_cells(&family, kind, z, x, dependent)?);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut h = header(&["a", "c"]);
            h.extend(bound_header(&z_col, &x_col));
            (h, rows)
        }
        Recipe::BoundsWerner => {
            let dependent = state_dependent_sum_threshold(FamilyKind::Werner, kind, d, None)?;
            let rows = linspace(0.0, 1.0, steps)
                .par_iter()
                .map(|&a| -> Result<Vec<Cell>> {
                    let family = StateFamily::Werner { d, a };
                    let z = measure(&family, MeasurementSetting::ZZ, kind)?;
                    let x = measure(&family, MeasurementSetting::XX, kind)?;
                    let mut row = vec![a.into()];
                    row.extend(bound_cells(&family, kind, z, x, dependent)?);
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut h = header(&["a"]);
            h.extend(bound_header(&z_col, &x_col));
            (h, rows)
        }
    };
    Ok(Table { header, rows })
}

fn bound_header(z_col: &str, x_col: &str) -> Vec<String> {
    [
        "negativity",
        z_col,
        x_col,
        "sum",
        "lhs",
        "independent_threshold",
        "dependent_threshold",
        "independent_violated",
        "dependent_detected",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn bound_cells(
    family: &StateFamily,
    kind: CorrelatorKind,
    z: f64,
    x: f64,
    dependent: crate::characterization::StateDependentThreshold,
) -> Result<Vec<Cell>> {
    let independent = state_independent(kind, z, x, FIGURE_DIM);
    Ok(vec![
        family.closed_form_negativity()?.into(),
        z.into(),
        x.into(),
        (z + x).into(),
        independent.lhs.into(),
        independent.threshold.into(),
        dependent.value.into(),
        independent.violated.into(),
        dependent.detects(z + x).into(),
    ])
}

/// Short region names used in CSV output.
pub fn region_label(region: Region) -> &'static str {
    match region {
        Region::Separable => "separable",
        Region::BoundEntangled => "bound",
        Region::NptEntangled => "npt",
    }
}

pub fn figure_csv(id: FigureId, steps: usize) -> Result<String> {
    Ok(figure_table(id, steps)?.to_csv())
}
