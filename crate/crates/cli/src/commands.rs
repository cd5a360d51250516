use std::path::PathBuf;

use kernsel::experiments::{phase_transition, run_sweep, ExperimentConfig};
use kernsel::kernels::{gamma_bound, upsilon_bound};
use kernsel::oracle::Oracle;
use kernsel::report::{write_selection_csv, write_summary_csv, write_sweep_csv};
use kernsel::{KernelModel, KnownDensity, Sample};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    build_family, parse_h_grid, parse_kappa_grid, parse_penalty, resolve, resolve_seed,
    unset_fields, DensityArg, DiagnoseArgs, SampleArgs, ScenarioArg, SelectArgs, SweepArgs,
};
use crate::error::{CliError, Result};
use crate::input::{read_sample, render_sample};
use crate::manifest::{Outputs, RunManifest};

fn out_dir(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn to_json<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("plain data serializes")
}

fn seed_defaults(seed: Option<u64>, mut unset: Vec<String>) -> Vec<String> {
    if seed.is_some() || std::env::var_os("KERNSEL_SEED").is_some() {
        unset.retain(|f| f != "seed");
    }
    unset
}

pub fn select(flags: SelectArgs) -> Result<()> {
    let config = flags.config.clone();
    let args = resolve(flags, config.as_deref())?;
    let defaults = unset_fields(&args);
    // Validate the family and penalty before touching the data.
    build_family(
        args.family,
        args.a,
        args.h_grid.as_deref(),
        args.dims.as_deref(),
        1,
    )?;
    parse_penalty(args.penalty.as_deref(), 0)?;
    let input = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::config("--input is required"))?;

    let sample = Sample::new(read_sample(input, args.column.as_deref())?)?;
    let family = build_family(
        args.family,
        args.a,
        args.h_grid.as_deref(),
        args.dims.as_deref(),
        sample.len(),
    )?;
    let rule = parse_penalty(args.penalty.as_deref(), family.len())?;
    let sel = kernsel::select(&family, &sample, &rule)?;

    let mut csv = Vec::new();
    write_selection_csv(&mut csv, &family, &sel)?;
    let manifest = RunManifest::new(
        "select",
        json!({
            "arguments": to_json(&args),
            "penalty": rule.to_string(),
            "n": sample.len(),
            "family": to_json(&family),
        }),
        None,
        defaults,
    );
    let mut out = Outputs::create(&out_dir(&args.out), manifest)?;
    let path = out.write("selection.csv", &csv)?;
    out.finish()?;

    let row = sel.selected();
    println!(
        "selected {} (index {}): criterion {:.6e} = contrast {:.6e} + penalty {:.6e}{}",
        family[sel.selected_index].label(),
        sel.selected_index,
        row.criterion,
        row.contrast,
        row.penalty,
        if sel.tie_broken { " [tie broken]" } else { "" }
    );
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct KernelDiagnostics {
    index: usize,
    family_params: String,
    bias: f64,
    variance_term: f64,
    true_risk: f64,
    estimation_error: f64,
    ideal_penalty: f64,
    ustat_residual: Option<f64>,
    cross_term: f64,
    /// Bernstein deviation scale of `(P_n - P) s_k` at `u = 1`.
    smoothed_deviation_u1: f64,
}

pub fn diagnose(flags: DiagnoseArgs) -> Result<()> {
    let config = flags.config.clone();
    let args = resolve(flags, config.as_deref())?;
    let defaults = unset_fields(&args);
    let density: KnownDensity = args
        .density
        .ok_or_else(|| CliError::config("--density is required in oracle mode"))?
        .into();
    let probe = build_family(
        args.family,
        args.a,
        args.h_grid.as_deref(),
        args.dims.as_deref(),
        1,
    )?;
    Oracle::new(&probe[0], density)?;
    let input = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::config("--input is required"))?;

    let sample = Sample::new(read_sample(input, args.column.as_deref())?)?;
    let n = sample.len();
    let family = build_family(
        args.family,
        args.a,
        args.h_grid.as_deref(),
        args.dims.as_deref(),
        n,
    )?;
    for k in &family {
        sample.check_for(k)?;
    }
    let kernels = family
        .iter()
        .enumerate()
        .map(|(index, k)| diagnose_kernel(index, k, density, &sample))
        .collect::<Result<Vec<_>>>()?;
    let gamma = gamma_bound(&family, n)?;
    let upsilon = match upsilon_bound(&family, density, n) {
        Ok(u) => to_json(&u),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let report = json!({
        "density": density.name(),
        "n": n,
        "kernels": kernels,
        "gamma": gamma,
        "upsilon": upsilon,
        "tail_certificates": "not certified",
    });

    let manifest = RunManifest::new(
        "diagnose",
        json!({ "arguments": to_json(&args), "n": n, "family": to_json(&family) }),
        None,
        defaults,
    );
    let mut out = Outputs::create(&out_dir(&args.out), manifest)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let path = out.write("diagnostics.json", text.as_bytes())?;
    out.finish()?;
    println!(
        "diagnosed {} kernels against {}; wrote {}",
        family.len(),
        density.name(),
        path.display()
    );
    Ok(())
}

fn diagnose_kernel(
    index: usize,
    k: &KernelModel,
    density: KnownDensity,
    sample: &Sample,
) -> Result<KernelDiagnostics> {
    let oracle = Oracle::new(k, density)?;
    let r = oracle.report(sample)?;
    Ok(KernelDiagnostics {
        index,
        family_params: k.label(),
        bias: r.bias,
        variance_term: r.variance_term,
        true_risk: r.true_risk,
        estimation_error: r.estimation_error,
        ideal_penalty: r.ideal_penalty,
        ustat_residual: r.ustat_residual,
        cross_term: r.cross_term,
        smoothed_deviation_u1: oracle.smoothed_deviation_scale(sample, 1.0)?,
    })
}

fn experiment_config(args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = match args.scenario.unwrap_or(ScenarioArg::Parzen) {
        ScenarioArg::Parzen => {
            let mut c = ExperimentConfig::parzen(args.a.unwrap_or(0.0));
            c.bandwidths = parse_h_grid(args.h_grid.as_deref())?;
            if let Some(d) = args.density {
                c.density = d.into();
            }
            c
        }
        ScenarioArg::Histogram => {
            let mut c =
                ExperimentConfig::histogram(args.density.unwrap_or(DensityArg::Triangular).into());
            c.max_dim = args.max_dim;
            c
        }
        ScenarioArg::BiasDominant => {
            let mut c = ExperimentConfig::bias_dominant(args.beta.unwrap_or(0.3));
            if let Some(d) = args.density {
                c.density = d.into();
            }
            c
        }
    };
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(r) = args.reps {
        cfg.replications = r;
    }
    if args.kappa_grid.is_some() {
        cfg.kappa_grid = parse_kappa_grid(args.kappa_grid.as_deref())?;
    }
    cfg.master_seed = resolve_seed(args.seed)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn sweep(flags: SweepArgs) -> Result<()> {
    let config = flags.config.clone();
    let args = resolve(flags, config.as_deref())?;
    let defaults = seed_defaults(args.seed, unset_fields(&args));
    let cfg = experiment_config(&args)?;
    let result = run_sweep(&cfg)?;

    let mut rows = Vec::new();
    write_sweep_csv(&mut rows, &result)?;
    let mut summary = Vec::new();
    write_summary_csv(&mut summary, &result)?;
    let manifest = RunManifest::new(
        "sweep",
        json!({ "arguments": to_json(&args), "experiment": to_json(&cfg) }),
        Some(cfg.master_seed),
        defaults,
    );
    let mut out = Outputs::create(&out_dir(&args.out), manifest)?;
    out.write("sweep.csv", &rows)?;
    let path = out.write("sweep_summary.csv", &summary)?;
    out.finish()?;

    println!(
        "{} kappas x {} replications, master seed {}",
        cfg.kappa_grid.len(),
        cfg.replications,
        cfg.master_seed
    );
    if let Some(p) = phase_transition(&result.summaries) {
        println!(
            "largest median complexity drop {:.4e} between kappa {} and {} (range {:.4e}, detected: {})",
            p.jump, p.kappa_before, p.kappa_after, p.range, p.detected
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn sample(flags: SampleArgs) -> Result<()> {
    let config = flags.config.clone();
    let args = resolve(flags, config.as_deref())?;
    let defaults = seed_defaults(args.seed, unset_fields(&args));
    let density: KnownDensity = args
        .density
        .ok_or_else(|| CliError::config("--density is required"))?
        .into();
    let n = args.n.unwrap_or(100);
    if n == 0 {
        return Err(CliError::config("--n must be positive"));
    }
    let seed = resolve_seed(args.seed)?;
    let values = density.sample(n, seed);
    let text = render_sample(
        &values,
        &format!(
            "kernsel sample density={} n={n} seed={seed}",
            density.name()
        ),
    );
    match &args.out {
        None => print!("{text}"),
        Some(dir) => {
            let manifest = RunManifest::new("sample", to_json(&args), Some(seed), defaults);
            let mut out = Outputs::create(dir, manifest)?;
            let path = out.write("sample.txt", text.as_bytes())?;
            out.finish()?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}
