use std::sync::Arc;
use std::time::Instant;

use affine_cf::gensym::{Recursion, UserBaseline};
use affine_cf::oracle::{IntegratorConfig, Oracle, OracleValue};
use affine_cf::registry::{EngineContext, Strategies};
use affine_cf::series::{BetaRule, CfEngine, CfResult};
use affine_cf::symalg::counting::factorial_u128;
use affine_cf::symalg::dump::{coefficients_to_json, series_to_json};
use affine_cf::symalg::{coefficient_recursion, counting_triangle, d_series};
use affine_cf::symbol::AffineModel;
use affine_cf::{Error, Result};
use rayon::prelude::*;

use crate::args::{
    CompareArgs, EvalArgs, Format, GridArgs, RecursionArg, TablesArgs, TriangleArgs,
};
use crate::grid::{build_grid, Point};
use crate::output::{emit, Cell, Report};

/// A failed command together with its exit code.
pub struct Failure {
    pub error: Error,
    pub code: i32,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, code: 1 }
    }
}

/// Exit code when no oracle applies to the model.
pub const NO_ORACLE_EXIT: i32 = 3;

struct Setup {
    model: Arc<AffineModel>,
    engine: Box<dyn CfEngine>,
    points: Vec<Point>,
    strategies: Strategies,
    meta: Vec<(String, Cell)>,
}

fn setup(g: &GridArgs) -> Result<Setup> {
    if g.k < 1 {
        return Err(Error::Contract("--k must be at least 1".into()));
    }
    let model = Arc::new(AffineModel::from_json_file(&g.model)?);
    let mut strategies = Strategies::builtin();
    for path in &g.baseline_config {
        strategies.register_baseline(Arc::new(UserBaseline::from_json_file(path)?));
    }
    let mut ctx = EngineContext::new(model.clone());
    ctx.order = g.k;
    ctx.beta = g.beta.map_or(BetaRule::Auto, BetaRule::Fixed);
    ctx.recursion = match g.recursion {
        RecursionArg::Difference => Recursion::Difference,
        RecursionArg::BruteForce => Recursion::BruteForce,
    };
    if let Some(name) = &g.baseline {
        ctx.baseline = Some(strategies.baseline(name, &model)?);
    }
    let engine = strategies.engine(g.mode.engine_name(), &ctx)?;
    let points = build_grid(&model, &g.t, &g.x, &g.u)?;
    let mut meta = vec![
        ("mode".to_string(), Cell::Text(engine.name().to_string())),
        ("k".to_string(), Cell::Int(g.k as u128)),
    ];
    if let Some(name) = &g.baseline {
        meta.push(("baseline".into(), Cell::Text(name.clone())));
        meta.push(("recursion".into(), Cell::Text(ctx.recursion.to_string())));
    }
    if let Some(b) = g.beta {
        meta.push(("beta".into(), Cell::Float(b)));
    }
    Ok(Setup {
        model,
        engine,
        points,
        strategies,
        meta,
    })
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Contract("--jobs must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| Error::Evaluation(format!("cannot start worker pool: {e}")))
}

fn point_columns(d: usize) -> Vec<String> {
    let mut c = vec!["t".to_string()];
    c.extend((1..=d).map(|l| format!("x{l}")));
    c.extend((1..=d).map(|l| format!("u{l}")));
    c
}

fn point_cells(p: &Point) -> Vec<Cell> {
    let mut r = vec![Cell::Float(p.t)];
    r.extend(p.x.iter().map(|&v| Cell::Float(v)));
    r.extend(p.u.iter().map(|&v| Cell::Float(v)));
    r
}

fn status_cells(r: &std::result::Result<impl Sized, &Error>, warnings: &[String]) -> [Cell; 2] {
    match r {
        Ok(_) => [Cell::Text("ok".into()), Cell::Text(warnings.join("; "))],
        Err(e) => [Cell::Text(e.kind().into()), Cell::Text(e.to_string())],
    }
}

fn write(report: &Report, format: Format, out: Option<&std::path::Path>) -> Result<()> {
    emit(&report.render(format)?, out)
}

pub fn eval(a: &EvalArgs) -> Result<()> {
    let s = setup(&a.grid)?;
    let engine = &*s.engine;
    let results: Vec<Result<CfResult>> = pool(a.grid.jobs)?.install(|| {
        s.points
            .par_iter()
            .map(|p| engine.evaluate(&p.x, &p.u, p.t))
            .collect()
    });
    let mut columns = point_columns(s.model.dim());
    columns.extend(["re", "im", "tail", "k", "status", "note"].map(String::from));
    let rows = s
        .points
        .iter()
        .zip(&results)
        .map(|(p, r)| {
            let mut row = point_cells(p);
            let (re, im, tail) = match r {
                Ok(v) => (v.value.re, v.value.im, v.tail),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            row.extend([
                Cell::Float(re),
                Cell::Float(im),
                Cell::Float(tail),
                Cell::Int(engine.order() as u128),
            ]);
            let warnings = r.as_ref().map(|v| v.warnings.clone()).unwrap_or_default();
            row.extend(status_cells(&r.as_ref(), &warnings));
            row
        })
        .collect();
    let mut meta = vec![("command".to_string(), Cell::Text("eval".into()))];
    meta.extend(s.meta);
    let report = Report {
        meta,
        columns,
        rows,
        summary: Vec::new(),
    };
    write(&report, a.grid.output.format, a.grid.output.out.as_deref())
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn compare(a: &CompareArgs) -> std::result::Result<(), Failure> {
    let s = setup(&a.grid)?;
    let config = IntegratorConfig { steps: a.rk_steps };
    if config.steps < 2 {
        return Err(Error::Contract("--rk-steps must be at least 2".into()).into());
    }
    let oracle: Box<dyn Oracle> = match s.strategies.oracle(&a.oracle, s.model.clone(), config) {
        Ok(o) => o,
        Err(e @ Error::NotApplicable { .. }) => {
            return Err(Failure {
                error: e,
                code: NO_ORACLE_EXIT,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let workers = pool(a.grid.jobs)?;
    let engine = &*s.engine;
    let start = Instant::now();
    let series: Vec<Result<CfResult>> = workers.install(|| {
        s.points
            .par_iter()
            .map(|p| engine.evaluate(&p.x, &p.u, p.t))
            .collect()
    });
    let series_time = start.elapsed().as_secs_f64();
    let oracle_ref = &*oracle;
    let start = Instant::now();
    let reference: Vec<Result<OracleValue>> = workers.install(|| {
        s.points
            .par_iter()
            .map(|p| oracle_ref.evaluate(&p.x, &p.u, p.t))
            .collect()
    });
    let oracle_time = start.elapsed().as_secs_f64();

    let mut columns = point_columns(s.model.dim());
    columns.extend(
        [
            "series_re",
            "series_im",
            "oracle_re",
            "oracle_im",
            "abs_err",
            "rel_err",
            "tail",
            "oracle_err",
            "status",
            "note",
        ]
        .map(String::from),
    );
    let (mut abs_errs, mut rel_errs) = (Vec::new(), Vec::new());
    let mut rows = Vec::with_capacity(s.points.len());
    for ((p, sr), or) in s.points.iter().zip(&series).zip(&reference) {
        let mut row = point_cells(p);
        let nan = f64::NAN;
        let (sv, tail) = sr
            .as_ref()
            .map(|v| (v.value, v.tail))
            .unwrap_or((num_complex::Complex64::new(nan, nan), nan));
        let (ov, oe) = or
            .as_ref()
            .map(|v| (v.value, v.error_estimate.unwrap_or(0.0)))
            .unwrap_or((num_complex::Complex64::new(nan, nan), nan));
        let both = match (sr, or) {
            (Ok(_), Ok(_)) => Ok(()),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
        let (abs, rel) = if both.is_ok() {
            let abs = (sv - ov).norm();
            let rel = if ov.norm() > 0.0 {
                abs / ov.norm()
            } else {
                abs
            };
            abs_errs.push(abs);
            rel_errs.push(rel);
            (abs, rel)
        } else {
            (nan, nan)
        };
        row.extend([sv.re, sv.im, ov.re, ov.im, abs, rel, tail, oe].map(Cell::Float));
        let warnings = sr.as_ref().map(|v| v.warnings.clone()).unwrap_or_default();
        row.extend(status_cells(&both, &warnings));
        rows.push(row);
    }
    let ok = abs_errs.len();
    let max = |v: &[f64]| v.iter().copied().fold(f64::NAN, f64::max);
    let mut summary = vec![
        ("points".to_string(), Cell::Int(s.points.len() as u128)),
        (
            "failed".to_string(),
            Cell::Int((s.points.len() - ok) as u128),
        ),
        ("max_abs_err".to_string(), Cell::Float(max(&abs_errs))),
        (
            "median_abs_err".to_string(),
            Cell::Float(median(&mut abs_errs)),
        ),
        ("max_rel_err".to_string(), Cell::Float(max(&rel_errs))),
        (
            "median_rel_err".to_string(),
            Cell::Float(median(&mut rel_errs)),
        ),
    ];
    if a.timings {
        summary.push(("series_seconds".into(), Cell::Float(series_time)));
        summary.push(("oracle_seconds".into(), Cell::Float(oracle_time)));
    }
    let mut meta = vec![("command".to_string(), Cell::Text("compare".into()))];
    meta.extend(s.meta);
    meta.push(("oracle".into(), Cell::Text(oracle.name().into())));
    let report = Report {
        meta,
        columns,
        rows,
        summary,
    };
    write(&report, a.grid.output.format, a.grid.output.out.as_deref())?;
    Ok(())
}

pub fn tables(a: &TablesArgs) -> Result<()> {
    if a.k < 1 || a.k > a.cap {
        return Err(Error::Contract(format!(
            "--k must lie in 1..={}, got {}",
            a.cap, a.k
        )));
    }
    if a.dim < 1 {
        return Err(Error::Contract("--dim must be at least 1".into()));
    }
    let bytes = if a.series {
        let series = d_series(a.dim, a.k);
        match a.output.format {
            Format::Json => json_bytes(&series_to_json(a.dim, &series))?,
            Format::Csv => {
                let rows = series
                    .iter()
                    .enumerate()
                    .flat_map(|(k, p)| {
                        p.sorted_terms().into_iter().map(move |(m, c)| {
                            vec![
                                Cell::Int(k as u128),
                                Cell::Text(m.to_string()),
                                Cell::Text(c.numer().to_string()),
                                Cell::Text(c.denom().to_string()),
                            ]
                        })
                    })
                    .collect();
                Report {
                    meta: vec![
                        ("command".into(), Cell::Text("tables".into())),
                        ("dimension".into(), Cell::Int(a.dim as u128)),
                    ],
                    columns: ["order", "monomial", "num", "den"]
                        .map(String::from)
                        .to_vec(),
                    rows,
                    summary: Vec::new(),
                }
                .render(Format::Csv)?
            }
        }
    } else {
        let rows = coefficient_recursion(a.dim, a.k as u32);
        match a.output.format {
            Format::Json => json_bytes(&coefficients_to_json(a.dim, &rows))?,
            Format::Csv => {
                let cells = rows
                    .iter()
                    .enumerate()
                    .skip(1)
                    .flat_map(|(k, row)| {
                        row.iter().map(move |(pair, c)| {
                            vec![
                                Cell::Int(k as u128),
                                Cell::Text(pair.alpha_string()),
                                Cell::Text(pair.beta_string()),
                                Cell::Text(c.numer().to_string()),
                                Cell::Text(c.denom().to_string()),
                            ]
                        })
                    })
                    .collect();
                Report {
                    meta: vec![
                        ("command".into(), Cell::Text("tables".into())),
                        ("dimension".into(), Cell::Int(a.dim as u128)),
                    ],
                    columns: ["order", "alpha", "beta", "num", "den"]
                        .map(String::from)
                        .to_vec(),
                    rows: cells,
                    summary: Vec::new(),
                }
                .render(Format::Csv)?
            }
        }
    };
    emit(&bytes, a.output.out.as_deref())
}

fn json_bytes(v: &serde_json::Value) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v)
        .map_err(|e| Error::Evaluation(format!("cannot serialize: {e}")))?;
    s.push('\n');
    Ok(s.into_bytes())
}

pub fn triangle(a: &TriangleArgs) -> Result<()> {
    if a.rows < 1 || a.rows > 20 {
        return Err(Error::Contract(format!(
            "--rows must lie in 1..=20, got {}",
            a.rows
        )));
    }
    let tri = counting_triangle(a.rows);
    let rows = (1..=a.rows)
        .map(|n| {
            let entries: Vec<String> = tri.row(n).iter().map(|v| v.to_string()).collect();
            let r = tri.row_sum(n);
            vec![
                Cell::Int(n as u128),
                Cell::Text(entries.join(" ")),
                Cell::Int(r),
                Cell::Float(tri.ratio(n)),
                Cell::Text((r <= factorial_u128(n)).to_string()),
            ]
        })
        .collect();
    let report = Report {
        meta: vec![("command".into(), Cell::Text("triangle".into()))],
        columns: ["n", "entries", "r", "r_over_factorial", "within_factorial"]
            .map(String::from)
            .to_vec(),
        rows,
        summary: Vec::new(),
    };
    write(&report, a.output.format, a.output.out.as_deref())
}
