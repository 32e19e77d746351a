//! Machine-readable reports. Complex numbers serialize as {"re","im"},
//! rationals as "p/q" strings; field order is fixed so reruns are
//! byte-identical.

use crate::amodel::{CentralCharge, TermRecord};
use crate::bmodel::MainTheoremReport;
use crate::cycles::{CCCycle, Cell};
use crate::lattice::{BoxElement, CurveClass, GitPresentation, PositivityReport, StackyFan};
use crate::rational::{rat_to_string, Int, Rat};
use num::complex::Complex64;
use serde::Serialize;

#[derive(Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        ComplexJson { re: c.re, im: c.im }
    }
}

pub fn rationals(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

fn integers(v: &[Int]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[derive(Serialize)]
pub struct ChargeJson {
    pub value: ComplexJson,
    pub abs_error: f64,
    pub method: crate::amodel::Method,
    pub terms_used: usize,
}

impl From<&CentralCharge> for ChargeJson {
    fn from(c: &CentralCharge) -> Self {
        ChargeJson {
            value: c.value.into(),
            abs_error: c.abs_error,
            method: c.method,
            terms_used: c.terms_used,
        }
    }
}

#[derive(Serialize)]
pub struct BoxJson {
    pub v: Vec<String>,
    pub host_cone: Vec<usize>,
    pub c_of_v: Vec<String>,
    pub age: String,
}

#[derive(Serialize)]
pub struct CurveClassJson {
    pub beta: Vec<String>,
    pub degree: String,
    pub pairings: Vec<String>,
    pub sector: Vec<String>,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub name: String,
    pub n: usize,
    pub rays: Vec<Vec<String>>,
    pub charge_matrix: Vec<Vec<String>>,
    pub p_basis_in_canonical: Vec<Vec<String>>,
    pub eta: Vec<String>,
    pub anticones: Vec<Vec<usize>>,
    pub maximal_cones: Vec<Vec<usize>>,
    pub complete: bool,
    pub box_table: Vec<BoxJson>,
    pub curve_classes: Vec<CurveClassJson>,
    pub positivity: PositivityReport,
}

pub fn analyze_report(
    name: &str,
    git: &GitPresentation,
    fan: &StackyFan,
    boxes: &[BoxElement],
    classes: &[CurveClass],
    positivity: &PositivityReport,
) -> AnalyzeReport {
    AnalyzeReport {
        name: name.to_string(),
        n: git.n,
        rays: git.rays.iter().map(|r| integers(r)).collect(),
        charge_matrix: git.charge.iter().map(|r| integers(r)).collect(),
        p_basis_in_canonical: git.p_in_canonical.iter().map(|r| integers(r)).collect(),
        eta: rationals(&git.eta),
        anticones: fan.anticones.clone(),
        maximal_cones: fan.maximal_cones.clone(),
        complete: fan.complete,
        box_table: boxes
            .iter()
            .map(|b| BoxJson {
                v: integers(&b.v),
                host_cone: b.host_cone.clone(),
                c_of_v: rationals(&b.c_of_v),
                age: rat_to_string(&b.age),
            })
            .collect(),
        curve_classes: classes
            .iter()
            .map(|c| CurveClassJson {
                beta: rationals(&c.beta),
                degree: rat_to_string(&c.degree),
                pairings: rationals(&c.pairings),
                sector: integers(&c.sector.v),
            })
            .collect(),
        positivity: positivity.clone(),
    }
}

#[derive(Serialize)]
pub struct TermJson {
    pub beta: Vec<String>,
    pub degree: String,
    pub sector: Vec<String>,
    pub value: ComplexJson,
    pub running_sum: ComplexJson,
}

#[derive(Serialize)]
pub struct SeriesReport {
    pub name: String,
    pub t: Vec<ComplexJson>,
    pub t_evaluated: Vec<ComplexJson>,
    pub z: f64,
    pub twist: Vec<String>,
    pub h: Vec<String>,
    pub localization_seed: u64,
    pub charge: ChargeJson,
    pub terms: Vec<TermJson>,
}

pub fn term_json(records: &[TermRecord]) -> Vec<TermJson> {
    records
        .iter()
        .map(|r| TermJson {
            beta: rationals(&r.beta),
            degree: rat_to_string(&r.degree),
            sector: integers(&r.sector),
            value: r.value.into(),
            running_sum: r.running_sum.into(),
        })
        .collect()
}

#[derive(Serialize)]
pub struct BChargeReport {
    pub name: String,
    pub t: Vec<ComplexJson>,
    pub t_evaluated: Vec<ComplexJson>,
    pub z: f64,
    pub twist: Vec<String>,
    pub grade_margin: f64,
    pub charge: ChargeJson,
}

#[derive(Serialize)]
pub struct ResidualJson {
    pub method: crate::amodel::Method,
    pub relative_residual: f64,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub t: Vec<ComplexJson>,
    pub t_evaluated: Vec<ComplexJson>,
    pub z: f64,
    pub twist: Vec<String>,
    pub kappa: ComplexJson,
    pub kappa_name: String,
    pub za_series: ChargeJson,
    pub mellin_barnes: ChargeJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oscillatory: Option<ChargeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub syz_cycle: Option<ChargeJson>,
    pub residuals: Vec<ResidualJson>,
    pub pass: bool,
}

pub fn verify_report(
    name: &str,
    t: &[Complex64],
    t_eval: &[Complex64],
    z: f64,
    twist: &[Rat],
    main: &MainTheoremReport,
    syz: Option<(&CentralCharge, f64)>,
) -> VerifyReport {
    let mut residuals: Vec<ResidualJson> = main
        .residuals
        .iter()
        .map(|(m, r)| ResidualJson {
            method: *m,
            relative_residual: *r,
        })
        .collect();
    let mut pass = main.pass;
    let syz_json = syz.map(|(charge, residual)| {
        residuals.push(ResidualJson {
            method: charge.method,
            relative_residual: residual,
        });
        ChargeJson::from(charge)
    });
    if let Some(r) = residuals.last() {
        if syz_json.is_some() && r.relative_residual.is_nan() {
            pass = false;
        }
    }
    VerifyReport {
        name: name.to_string(),
        t: t.iter().map(|&c| c.into()).collect(),
        t_evaluated: t_eval.iter().map(|&c| c.into()).collect(),
        z,
        twist: rationals(twist),
        kappa: main.kappa.into(),
        kappa_name: main.kappa_name.clone(),
        za_series: (&main.za).into(),
        mellin_barnes: (&main.mb).into(),
        oscillatory: main.oscillatory.as_ref().map(ChargeJson::from),
        syz_cycle: syz_json,
        residuals,
        pass,
    }
}

#[derive(Serialize)]
pub struct CellJson {
    pub i_set: Vec<usize>,
    pub j_set: Vec<usize>,
    pub multiplicity: i64,
    pub dim: usize,
    pub vertices: Vec<Vec<String>>,
    pub rays: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct CycleReport {
    pub name: String,
    pub shift: Vec<String>,
    pub degenerate: bool,
    pub cells: Vec<CellJson>,
    pub pieces: Vec<PieceJson>,
    pub boundary_zero: bool,
    pub backends_agree: bool,
}

#[derive(Serialize)]
pub struct PieceJson {
    pub cone: Vec<usize>,
    pub multiplicity: i64,
    pub vertices: Vec<Vec<String>>,
    pub rays: Vec<Vec<String>>,
}

pub fn cycle_report(
    name: &str,
    a: &[Rat],
    degenerate: bool,
    cells: &[Cell],
    cycle: &CCCycle,
    boundary_zero: bool,
    backends_agree: bool,
) -> CycleReport {
    CycleReport {
        name: name.to_string(),
        shift: rationals(a),
        degenerate,
        cells: cells
            .iter()
            .map(|c| CellJson {
                i_set: c.i_set.clone(),
                j_set: c.j_set.clone(),
                multiplicity: c.multiplicity,
                dim: c.dim,
                vertices: c.poly.vertices.iter().map(|v| rationals(v)).collect(),
                rays: c.poly.rays.iter().map(|v| rationals(v)).collect(),
            })
            .collect(),
        pieces: cycle
            .pieces
            .iter()
            .map(|p| PieceJson {
                cone: p.cone.clone(),
                multiplicity: p.multiplicity,
                vertices: p.m_part.vertices.iter().map(|v| rationals(v)).collect(),
                rays: p.m_part.rays.iter().map(|v| rationals(v)).collect(),
            })
            .collect(),
        boundary_zero,
        backends_agree,
    }
}

/// CSV table of cells: I, J, multiplicity, vertex list.
pub fn cells_csv(cells: &[Cell]) -> String {
    let mut out = String::from("i_set;j_set;multiplicity;dim;vertices;rays\n");
    for c in cells {
        let fmt_pts = |pts: &Vec<Vec<Rat>>| {
            pts.iter()
                .map(|v| format!("({})", rationals(v).join(",")))
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "{:?};{:?};{};{};{};{}\n",
            c.i_set,
            c.j_set,
            c.multiplicity,
            c.dim,
            fmt_pts(&c.poly.vertices),
            fmt_pts(&c.poly.rays),
        ));
    }
    out
}

/// CSV dump of sampled integrand values.
pub fn integrand_csv(samples: &[(f64, Complex64)]) -> String {
    let mut out = String::from("y;re;im;abs\n");
    for (y, v) in samples {
        out.push_str(&format!("{y};{:e};{:e};{:e}\n", v.re, v.im, v.norm()));
    }
    out
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization") + "\n"
}
