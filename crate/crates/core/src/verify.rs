//! Self-check suite run by `qclab verify`: numeric results against closed forms,
//! operator identities, inversion round trips and the bound landscape.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::characterization::relations::{
    noisy_bell_x_table, noisy_bell_z_table, oph_table, werner_x_table, werner_z_table,
};
use crate::characterization::{
    bound_maccone_mi, bound_maccone_pcc, bound_spengler, invert_noisy_bell, invert_werner,
    oph_from_correlator, state_dependent_sum_threshold, werner_mi_band, Region,
};
use crate::correlators::{correlator_value, mutual_predictability, pcc_observables, CorrelatorKind};
use crate::density::DensityMatrix;
use crate::error::Result;
use crate::figures::linspace;
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::measurement::{
    joint_distribution, make_basis, make_observable, BasisLabel, JointDistribution,
    MeasurementSetting, ObservableLabel,
};
use crate::states::{noisy_bell_signed_negativity, FamilyKind, StateFamily};

const KINDS: [CorrelatorKind; 3] = [CorrelatorKind::Mp, CorrelatorKind::Mi, CorrelatorKind::Pcc];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level `{other}` (expected fast or full)")),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Fast => "fast",
            Level::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<28} {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Turns a family descriptor into a density matrix. Swappable so the suite itself can
/// be tested against a broken constructor.
pub type Builder = dyn Fn(&StateFamily) -> Result<DensityMatrix> + Sync;

pub fn run(level: Level) -> Vec<CheckResult> {
    run_with(level, &|f: &StateFamily| f.build())
}

pub fn run_with(level: Level, build: &Builder) -> Vec<CheckResult> {
    let ctx = Ctx { level, build };
    let checks: [(&'static str, fn(&Ctx) -> Result<Outcome>); 7] = [
        ("negativity-closed-forms", check_negativity),
        ("joint-distribution-tables", check_tables),
        ("oph-mp-table", check_oph_mp),
        ("w-operator-identities", check_w_operator),
        ("pcc-conjecture", check_conjecture),
        ("inversion-round-trips", check_round_trips),
        ("bound-landscape", check_bounds),
    ];
    checks
        .iter()
        .map(|&(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check(&ctx) {
                Ok(o) => (o.passed, o.detail),
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

struct Ctx<'a> {
    level: Level,
    build: &'a Builder,
}

impl Ctx<'_> {
    fn full(&self) -> bool {
        self.level == Level::Full
    }

    fn measure(&self, family: &StateFamily, setting: MeasurementSetting) -> Result<JointDistribution> {
        let rho = (self.build)(family)?;
        let (ba, bb) = setting.bases(rho.dim_a())?;
        joint_distribution(&rho, &ba, &bb)
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn max_error(worst: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        passed: worst < tol,
        detail: format!("max |{what}| = {worst:.2e} (tol {tol:.0e})"),
    }
}

fn unit_grid(n: usize) -> Vec<f64> {
    linspace(0.0, 1.0, n)
}

fn noisy_bell_grid(ctx: &Ctx) -> Vec<StateFamily> {
    let (n, dims) = if ctx.full() { (11, 2..=5) } else { (5, 2..=4) };
    let g = unit_grid(n);
    let mut out = Vec::new();
    for d in dims {
        for &a in &g {
            for &b in &g {
                for &c in &g {
                    out.push(StateFamily::NoisyBell { d, a, b, c });
                }
            }
        }
    }
    out
}

fn werner_grid(ctx: &Ctx) -> Vec<StateFamily> {
    let n = if ctx.full() { 101 } else { 21 };
    (2..=6)
        .flat_map(|d| unit_grid(n).into_iter().map(move |a| StateFamily::Werner { d, a }))
        .collect()
}

fn oph_grid(ctx: &Ctx) -> Vec<StateFamily> {
    let n = if ctx.full() { 301 } else { 61 };
    linspace(2.0, 5.0, n).into_iter().map(|a| StateFamily::Oph { a }).collect()
}

fn parallel_max<F>(states: &[StateFamily], f: F) -> Result<f64>
where
    F: Fn(&StateFamily) -> Result<f64> + Sync,
{
    let errs = states.par_iter().map(&f).collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

fn check_negativity(ctx: &Ctx) -> Result<Outcome> {
    let mut states = noisy_bell_grid(ctx);
    states.extend(werner_grid(ctx));
    states.extend(oph_grid(ctx));
    let worst = parallel_max(&states, |s| {
        let numeric = (ctx.build)(s)?.negativity()?;
        Ok((numeric - s.closed_form_negativity()?).abs())
    })?;
    Ok(max_error(worst, 1e-9, "N_numeric − N_closed"))
}

fn check_tables(ctx: &Ctx) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let nb = parallel_max(&noisy_bell_grid(ctx), |s| {
        let StateFamily::NoisyBell { d, a, b, c } = *s else { unreachable!() };
        let sn = noisy_bell_signed_negativity(d, a, b, c);
        let z = ctx.measure(s, MeasurementSetting::ZZ)?;
        let x = ctx.measure(s, MeasurementSetting::XX)?;
        Ok(z.max_abs_diff(&noisy_bell_z_table(d, a, sn)?)
            .max(x.max_abs_diff(&noisy_bell_x_table(d, a)?)))
    })?;
    worst = worst.max(nb);
    let w = parallel_max(&werner_grid(ctx), |s| {
        let StateFamily::Werner { d, a } = *s else { unreachable!() };
        let z = ctx.measure(s, MeasurementSetting::ZZ)?;
        let x = ctx.measure(s, MeasurementSetting::XX)?;
        Ok(z.max_abs_diff(&werner_z_table(d, a)?)
            .max(x.max_abs_diff(&werner_x_table(d, a)?)))
    })?;
    worst = worst.max(w);
    let o = parallel_max(&oph_grid(ctx), |s| {
        let StateFamily::Oph { a } = *s else { unreachable!() };
        let t = ctx.measure(s, MeasurementSetting::ZShift(1))?;
        Ok(t.max_abs_diff(&oph_table(a, 1)?))
    })?;
    worst = worst.max(o);
    Ok(max_error(worst, 1e-12, "p_measured − p_formula"))
}

fn check_oph_mp(ctx: &Ctx) -> Result<Outcome> {
    let worst = parallel_max(&oph_grid(ctx), |s| {
        let StateFamily::Oph { a } = *s else { unreachable!() };
        let z = ctx.measure(s, MeasurementSetting::ZZ)?;
        let expected = [2.0 / 7.0, a / 7.0, (5.0 - a) / 7.0];
        let mut worst: f64 = 0.0;
        for (k, e) in expected.iter().enumerate() {
            worst = worst.max((mutual_predictability(&z, k as i64)? - e).abs());
        }
        Ok(worst)
    })?;
    Ok(max_error(worst, 1e-12, "MP_k − table"))
}

fn check_w_operator(ctx: &Ctx) -> Result<Outcome> {
    let top = if ctx.full() { 16 } else { 8 };
    let mut worst: f64 = 0.0;
    for d in 2..=top {
        let df = d as f64;
        let w = make_observable(d, ObservableLabel::W, None)?.matrix().clone();
        let expected = &ComplexMatrix::identity(d).scale_real(df - 1.0) + &w.scale_real(df - 2.0);
        worst = worst.max(w.matmul(&w)?.max_abs_diff(&expected));
        let ev = hermitian_eigenvalues(&w)?;
        for (i, x) in ev.iter().enumerate() {
            let target = if i == d - 1 { df - 1.0 } else { -1.0 };
            worst = worst.max((x - target).abs());
        }
        let z = make_basis(d, BasisLabel::Z)?;
        let wb = make_basis(d, BasisLabel::WEigen)?;
        for zi in z.vectors() {
            for wk in wb.vectors() {
                let ip: num_complex::Complex64 = zi.iter().zip(wk).map(|(a, b)| a.conj() * b).sum();
                worst = worst.max((ip.norm_sqr() - 1.0 / df).abs());
            }
        }
    }
    Ok(max_error(worst, 1e-12, "W identity defect"))
}

fn conjecture_states(ctx: &Ctx) -> Vec<StateFamily> {
    let (top, draws, grid) = if ctx.full() { (10, 200, 101) } else { (5, 20, 21) };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut states = Vec::new();
    for _ in 0..draws {
        let d = rng.gen_range(2..=top);
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        states.push(StateFamily::PureSchmidt {
            lambdas: raw.iter().map(|x| x / total).collect(),
        });
    }
    for d in 2..=top {
        for p in unit_grid(grid) {
            states.push(StateFamily::CnaBell { d, p });
        }
    }
    states
}

fn check_conjecture(ctx: &Ctx) -> Result<Outcome> {
    let worst = parallel_max(&conjecture_states(ctx), |s| {
        let rho = (ctx.build)(s)?;
        let d = rho.dim_a();
        let z = make_observable(d, ObservableLabel::Z, None)?;
        let w = make_observable(d, ObservableLabel::W, None)?;
        let undefined = || crate::Error::Undefined(format!("PCC for {s}"));
        let pz = pcc_observables(&rho, &z, &z)?.ok_or_else(undefined)?;
        let pw = pcc_observables(&rho, &w, &w)?.ok_or_else(undefined)?;
        let n = s.closed_form_negativity()?;
        Ok((pz + pw - 1.0 - 2.0 * n / (d as f64 - 1.0)).abs())
    })?;
    Ok(max_error(worst, 1e-10, "PCC_Z + PCC_W − 1 − 2N/(d−1)"))
}

fn check_round_trips(ctx: &Ctx) -> Result<Outcome> {
    let nb = parallel_max(&noisy_bell_grid(ctx), |s| {
        let StateFamily::NoisyBell { d, .. } = *s else { unreachable!() };
        let n = s.closed_form_negativity()?;
        let x = ctx.measure(s, MeasurementSetting::XX)?;
        let z = ctx.measure(s, MeasurementSetting::ZZ)?;
        let mut worst: f64 = 0.0;
        for kind in KINDS {
            let r = invert_noisy_bell(correlator_value(&x, kind)?, correlator_value(&z, kind)?, kind, d)?;
            worst = worst.max((r.negativity - n).abs());
        }
        Ok(worst)
    })?;
    let mut flag_errors = 0usize;
    let mut werner_worst: f64 = 0.0;
    for s in werner_grid(ctx) {
        let StateFamily::Werner { d, a } = s else { unreachable!() };
        let n = s.closed_form_negativity()?;
        let z = ctx.measure(&s, MeasurementSetting::ZZ)?;
        let band = werner_mi_band(d)?;
        for kind in KINDS {
            let r = invert_werner(correlator_value(&z, kind)?, kind, d)?;
            let in_band = kind == CorrelatorKind::Mi && a >= band.left_edge;
            if r.ambiguity != in_band {
                flag_errors += 1;
            }
            if !in_band {
                werner_worst = werner_worst.max((r.negativity - n).abs());
            }
        }
    }
    let mut region_errors = 0usize;
    let mut oph_worst: f64 = 0.0;
    for s in oph_grid(ctx) {
        let StateFamily::Oph { a } = s else { unreachable!() };
        let z = ctx.measure(&s, MeasurementSetting::ZShift(1))?;
        for kind in KINDS {
            let r = oph_from_correlator(correlator_value(&z, kind)?, kind, 1)?;
            if r.region != Some(Region::of_oph(a)) {
                region_errors += 1;
            }
            oph_worst = oph_worst.max((r.negativity - s.closed_form_negativity()?).abs());
        }
    }
    let worst = nb.max(werner_worst).max(oph_worst);
    Ok(Outcome {
        passed: worst < 1e-8 && flag_errors == 0 && region_errors == 0,
        detail: format!(
            "max |ΔN| = {worst:.2e} (tol 1e-8), {flag_errors} ambiguity-flag and {region_errors} region mismatches"
        ),
    })
}

fn check_bounds(ctx: &Ctx) -> Result<Outcome> {
    let d = 3;
    let mut missed = 0usize;
    let mut total = 0usize;
    for a in linspace(0.3, 0.5, 23).into_iter().skip(1).take(21) {
        let s = StateFamily::Werner { d, a };
        let z = ctx.measure(&s, MeasurementSetting::ZZ)?;
        let x = ctx.measure(&s, MeasurementSetting::XX)?;
        for kind in KINDS {
            let (vz, vx) = (correlator_value(&z, kind)?, correlator_value(&x, kind)?);
            let independent = match kind {
                CorrelatorKind::Mp => bound_spengler(&[vz, vx], d),
                CorrelatorKind::Mi => bound_maccone_mi(vz, vx, d),
                CorrelatorKind::Pcc => bound_maccone_pcc(vz, vx),
            };
            let dependent = state_dependent_sum_threshold(FamilyKind::Werner, kind, d, None)?;
            total += 1;
            if independent.violated || !dependent.detects(vz + vx) {
                missed += 1;
            }
        }
    }
    let bell = StateFamily::NoisyBell {
        d,
        a: 1.0,
        b: 0.0,
        c: 0.0,
    };
    let z = ctx.measure(&bell, MeasurementSetting::ZZ)?;
    let x = ctx.measure(&bell, MeasurementSetting::XX)?;
    let rho = (ctx.build)(&bell)?;
    let zo = make_observable(d, ObservableLabel::Z, None)?;
    let pcc_z = pcc_observables(&rho, &zo, &zo)?.unwrap_or(0.0);
    let bell_violates = bound_spengler(
        &[correlator_value(&z, CorrelatorKind::Mp)?, correlator_value(&x, CorrelatorKind::Mp)?],
        d,
    )
    .violated
        && bound_maccone_mi(
            correlator_value(&z, CorrelatorKind::Mi)?,
            correlator_value(&x, CorrelatorKind::Mi)?,
            d,
        )
        .violated
        && bound_maccone_pcc(pcc_z, correlator_value(&x, CorrelatorKind::Pcc)?).violated;
    Ok(Outcome {
        passed: missed == 0 && bell_violates,
        detail: format!(
            "{missed}/{total} Werner cases not separated; Bell state violates all bounds: {bell_violates}"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::StateFamily;

    #[test]
    fn fast_suite_passes() {
        let results = run(Level::Fast);
        for r in &results {
            assert!(r.passed, "{r}");
        }
        assert_eq!(results.len(), 7);
    }

    #[test]
    fn corrupted_constructor_is_caught() {
        // a builder that quietly uses a slightly wrong Bell weight
        let broken = |f: &StateFamily| match *f {
            StateFamily::NoisyBell { d, a, b, c } => StateFamily::NoisyBell {
                d,
                a: a * 0.99,
                b,
                c,
            }
            .build(),
            _ => f.build(),
        };
        let results = run_with(Level::Fast, &broken);
        let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        assert!(failed.contains(&"negativity-closed-forms"), "{failed:?}");
        assert!(failed.contains(&"joint-distribution-tables"), "{failed:?}");
    }
}
