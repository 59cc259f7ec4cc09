use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use nbpk::densities::{first_pick_density, g_r_density, marginal_tn_density, transition_density, DensityContext};
use nbpk::point_process::{sample_nb_jumps, sample_poisson_jumps, JumpSequence, DEFAULT_MAX_JUMPS};
use nbpk::rng::{named_stream, stream, Stream};
use nbpk::simplex::{
    normalize, sample_pd_r_ratio, sample_pd_stick, sample_pk_r_gamma_stick, trimmed_point_process, Construction,
    SimplexSample,
};
use nbpk::stats::VerificationReport;
use nbpk::verify::{criteria, criterion, run_suite, Suite};
use nbpk::zipf::rank_profile;
use nbpk::LevyFamily;

use crate::args::{ConstructionArg, DensityArgs, DensityName, FamilyArg, FamilyArgs, Format, SampleArgs, VerifyArgs, ZipfArgs};
use crate::output::{csv_row, num, open};
use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required(value: Option<f64>, flag: &str, family: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| usage(format!("--{flag} is required for the {family} family")))
}

fn build_family(a: &FamilyArgs) -> Result<LevyFamily, CliError> {
    let fam = match a.family {
        FamilyArg::Stable => LevyFamily::stable(required(a.alpha, "alpha", "stable")?, a.scale)?,
        FamilyArg::Gamma => LevyFamily::gamma(required(a.theta, "theta", "gamma")?)?,
        FamilyArg::TruncStable => LevyFamily::trunc_stable(required(a.alpha, "alpha", "trunc-stable")?)?,
        FamilyArg::GenGamma => LevyFamily::gen_gamma(required(a.alpha, "alpha", "gen-gamma")?)?,
    };
    Ok(fam)
}

/// Run metadata written alongside every output.
#[derive(Debug, Serialize)]
struct RunMeta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    #[serde(flatten)]
    params: serde_json::Value,
}

impl RunMeta<'_> {
    fn comment_line(&self) -> Result<String, CliError> {
        Ok(format!("# {}", serde_json::to_string(self)?))
    }
}

fn jumps_to_sample(mut js: JumpSequence, n_weights: usize, rng: &mut Stream) -> Result<SimplexSample, CliError> {
    js.extend_to(n_weights, rng)?;
    Ok(normalize(&js)?)
}

fn integer_r(r: f64) -> Result<usize, CliError> {
    if r >= 0.0 && r.fract() == 0.0 && r < 1e9 {
        Ok(r as usize)
    } else {
        Err(usage(format!("the trimmed stable construction needs a nonnegative integer r, got {r}")))
    }
}

fn draw_one(a: &SampleArgs, fam: &LevyFamily, rng: &mut Stream) -> Result<SimplexSample, CliError> {
    let n = a.n_weights;
    let sample = match a.construction {
        ConstructionArg::Jump => {
            let js = match a.r {
                Some(r) => sample_nb_jumps(fam, r, a.tol, DEFAULT_MAX_JUMPS, rng)?,
                None => sample_poisson_jumps(fam, a.v, a.tol, DEFAULT_MAX_JUMPS, rng)?,
            };
            jumps_to_sample(js, n, rng)?
        }
        ConstructionArg::Subordinator => {
            let r = a.r.ok_or_else(|| usage("the subordinator construction needs --r"))?;
            let clock = sample_poisson_jumps(&LevyFamily::Gamma { theta: 1.0 }, r, a.tol, DEFAULT_MAX_JUMPS, rng)?;
            let js = sample_poisson_jumps(fam, clock.total(), a.tol, DEFAULT_MAX_JUMPS, rng)?;
            let mut s = jumps_to_sample(js, n, rng)?;
            s.provenance.construction = Construction::Subordinator;
            s
        }
        ConstructionArg::Stick => {
            if a.n_terms < n {
                return Err(usage(format!("--n-terms ({}) must be at least --n-weights ({n})", a.n_terms)));
            }
            let stick = match (*fam, a.r) {
                // PK^(r)(ρ_α) is PD(α, 0) for every r
                (LevyFamily::Stable { alpha, .. }, _) => sample_pd_stick(alpha, 0.0, a.n_terms, rng)?,
                (LevyFamily::GenGamma { alpha }, Some(r)) => sample_pd_stick(alpha, r * alpha, a.n_terms, rng)?,
                (LevyFamily::Gamma { theta }, Some(r)) => sample_pk_r_gamma_stick(theta, r, a.n_terms, rng)?,
                (LevyFamily::Gamma { theta }, None) => sample_pd_stick(0.0, theta, a.n_terms, rng)?,
                (LevyFamily::GenGamma { .. }, None) => {
                    return Err(usage("the stick construction for gen-gamma needs --r (giving PD(alpha, r*alpha))"))
                }
                (LevyFamily::TruncStable { .. }, _) => {
                    return Err(usage(
                        "no stick-breaking form is known for trunc-stable; use --construction jump, trimmed or ratio",
                    ))
                }
            };
            stick.ranked()
        }
        ConstructionArg::Trimmed => {
            let r = a.r.ok_or_else(|| usage("the trimmed construction needs --r"))?;
            match *fam {
                LevyFamily::Stable { alpha, .. } => {
                    let r = integer_r(r)?;
                    let js = if r == 0 {
                        sample_poisson_jumps(&LevyFamily::stable(alpha, 1.0)?, 1.0, a.tol, DEFAULT_MAX_JUMPS, rng)?
                    } else {
                        trimmed_point_process(alpha, r, a.tol, DEFAULT_MAX_JUMPS, rng)?
                    };
                    let mut s = jumps_to_sample(js, n, rng)?;
                    s.provenance.construction = Construction::Trimmed;
                    s
                }
                LevyFamily::TruncStable { .. } => {
                    let js = sample_nb_jumps(fam, r, a.tol, DEFAULT_MAX_JUMPS, rng)?;
                    let mut s = jumps_to_sample(js, n, rng)?;
                    s.provenance.construction = Construction::TrimmedNbpp;
                    s
                }
                _ => return Err(usage("the trimmed construction needs --family stable or trunc-stable")),
            }
        }
        ConstructionArg::Ratio => {
            let r = a.r.ok_or_else(|| usage("the ratio construction needs --r"))?;
            match *fam {
                LevyFamily::Stable { alpha, .. } | LevyFamily::TruncStable { alpha } => {
                    sample_pd_r_ratio(alpha, r, n, a.tol, rng)?
                }
                _ => return Err(usage("the ratio construction needs --family stable or trunc-stable")),
            }
        }
    };
    Ok(sample.truncated(n))
}

pub fn sample(a: &SampleArgs) -> Result<(), CliError> {
    let fam = build_family(&a.family)?;
    if a.n_weights == 0 || a.n_samples == 0 {
        return Err(usage("--n-weights and --n-samples must be positive"));
    }
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(usage(format!("--tol must lie in (0, 1), got {}", a.tol)));
    }
    // validate the combination once before producing any output
    let mut probe = stream(a.seed, 0);
    draw_one(a, &fam, &mut probe)?;

    let meta = RunMeta {
        tool: "nbpk",
        version: VERSION,
        command: "sample",
        seed: a.seed,
        params: json!({
            "family": fam,
            "construction": a.construction.to_possible_value().map(|v| v.get_name().to_string()),
            "r": a.r,
            "v": if a.r.is_none() { Some(a.v) } else { None },
            "tol": a.tol,
            "n_weights": a.n_weights,
            "n_samples": a.n_samples,
        }),
    };
    let mut w = open(&a.out, "sample")?;
    match a.out.format {
        Format::Csv => {
            writeln!(w, "{}", meta.comment_line()?)?;
            csv_row(&mut *w, (1..=a.n_weights).map(|k| format!("w{k}")).chain(["deficit".to_string()]))?;
        }
        Format::Json => write!(w, "[")?,
    }
    for i in 0..a.n_samples {
        let mut rng = stream(a.seed, i as u64);
        let s = draw_one(a, &fam, &mut rng)?.with_seed(a.seed);
        // rows always carry n_weights columns; ranks beyond the listed weights are empty
        let mut weights = s.weights.clone();
        weights.resize(a.n_weights, 0.0);
        match a.out.format {
            Format::Csv => csv_row(&mut *w, weights.iter().map(|&x| num(x)).chain([num(s.deficit)]))?,
            Format::Json => {
                if i > 0 {
                    write!(w, ",")?;
                }
                let obj = json!({
                    "weights": weights,
                    "deficit": s.deficit,
                    "meta": {
                        "sample_index": i,
                        "order": s.order,
                        "provenance": s.provenance,
                        "run": &meta,
                    },
                });
                write!(w, "\n{}", serde_json::to_string(&obj)?)?;
            }
        }
    }
    if a.out.format == Format::Json {
        writeln!(w, "\n]")?;
    }
    w.flush()?;
    Ok(())
}

pub fn density(a: &DensityArgs) -> Result<(), CliError> {
    if a.alpha != 0.5 {
        return Err(usage(format!("densities are available for alpha = 0.5 only, got {}", a.alpha)));
    }
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    if !(a.from.is_finite() && a.to.is_finite() && a.from < a.to) {
        return Err(usage("need finite --from < --to"));
    }
    let ctx = DensityContext::new(LevyFamily::stable(a.alpha, a.scale)?, a.r)?;
    let eval = |x: f64| -> Result<f64, CliError> {
        Ok(match a.name {
            DensityName::GR => g_r_density(&ctx, x)?,
            DensityName::FirstPick => first_pick_density(&ctx, x, a.t)?,
            DensityName::Transition => transition_density(&ctx, a.n, a.t, x)?,
            DensityName::MarginalTn => marginal_tn_density(&ctx, a.n, x)?,
        })
    };
    let step = (a.to - a.from) / (a.points - 1) as f64;
    let xs: Vec<f64> =
        (0..a.points).map(|i| if i + 1 == a.points { a.to } else { a.from + step * i as f64 }).collect();
    let values = xs.iter().map(|&x| eval(x)).collect::<Result<Vec<_>, _>>()?;

    let meta = RunMeta {
        tool: "nbpk",
        version: VERSION,
        command: "density",
        seed: 0,
        params: json!({
            "name": a.name.to_possible_value().map(|v| v.get_name().to_string()),
            "alpha": a.alpha, "c": a.scale, "r": a.r, "t": a.t, "n": a.n,
        }),
    };
    let mut w = open(&a.out, "density")?;
    match a.out.format {
        Format::Csv => {
            writeln!(w, "{}", meta.comment_line()?)?;
            csv_row(&mut *w, ["x".to_string(), "value".to_string()])?;
            for (x, v) in xs.iter().zip(&values) {
                csv_row(&mut *w, [num(*x), num(*v)])?;
            }
        }
        Format::Json => {
            let points: Vec<_> = xs.iter().zip(&values).map(|(x, v)| json!({"x": x, "value": v})).collect();
            serde_json::to_writer_pretty(&mut w, &json!({"meta": meta, "points": points}))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    if a.list {
        let mut w = open(&a.out, "verify-list")?;
        for s in Suite::ALL {
            writeln!(w, "{}", s.name())?;
            for c in criteria().iter().filter(|c| c.suite == s) {
                writeln!(w, "  {}  {}", c.id, c.title)?;
            }
        }
        w.flush()?;
        return Ok(());
    }
    let mut reports: Vec<VerificationReport> = Vec::new();
    if a.suite.is_empty() && a.criterion.is_empty() {
        for s in Suite::ALL {
            reports.extend(run_suite(s, a.seed));
        }
    }
    for name in &a.suite {
        let s = Suite::from_name(name).ok_or_else(|| usage(format!("unknown suite {name:?}; see --list")))?;
        reports.extend(run_suite(s, a.seed));
    }
    for id in &a.criterion {
        let c = criterion(id).ok_or_else(|| usage(format!("unknown criterion {id:?}; see --list")))?;
        reports.extend(c.run(a.seed));
    }
    for r in &reports {
        eprintln!("{r}");
    }
    let mut w = open(&a.out, "verify")?;
    match a.out.format {
        Format::Json => {
            let meta = RunMeta { tool: "nbpk", version: VERSION, command: "verify", seed: a.seed, params: json!({}) };
            serde_json::to_writer_pretty(&mut w, &json!({"meta": meta, "reports": reports}))?;
            writeln!(w)?;
        }
        Format::Csv => {
            let meta = RunMeta { tool: "nbpk", version: VERSION, command: "verify", seed: a.seed, params: json!({}) };
            writeln!(w, "{}", meta.comment_line()?)?;
            csv_row(
                &mut *w,
                ["test_name", "statistic", "threshold", "p_value", "passed", "n_samples", "seed", "notes"].map(String::from),
            )?;
            for r in &reports {
                csv_row(
                    &mut *w,
                    [
                        quote(&r.test_name),
                        num(r.statistic),
                        num(r.threshold),
                        r.p_value.map(num).unwrap_or_default(),
                        r.passed.to_string(),
                        r.n_samples.to_string(),
                        r.seed.to_string(),
                        quote(&r.notes),
                    ],
                )?;
            }
        }
    }
    w.flush()?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} of {} checks failed", reports.len())));
    }
    Ok(())
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn zipf(a: &ZipfArgs) -> Result<(), CliError> {
    let mut rng = named_stream(a.seed, "zipf");
    let profile = rank_profile(a.alpha, a.r, a.n_ranks, a.n_samples, a.tol, &mut rng)?;
    let meta = RunMeta {
        tool: "nbpk",
        version: VERSION,
        command: "zipf",
        seed: a.seed,
        params: json!({"alpha": a.alpha, "r": a.r, "n_ranks": a.n_ranks, "n_samples": a.n_samples, "tol": a.tol}),
    };
    let mut w = open(&a.out, "zipf")?;
    match a.out.format {
        Format::Csv => {
            writeln!(w, "{}", meta.comment_line()?)?;
            csv_row(&mut *w, ["rank", "log_rank", "log_mean_pd", "log_mean_trimmed"].map(String::from))?;
            for row in &profile.rows {
                csv_row(
                    &mut *w,
                    [row.rank.to_string(), num(row.log_rank), num(row.log_mean_pd), num(row.log_mean_trimmed)],
                )?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &json!({"meta": meta, "rows": profile.rows}))?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
