use std::path::PathBuf;

use clap::Args;
use fracflowq::prep::{gate_bench, BenchSample};
use serde::Serialize;

use crate::io::write_text;
use crate::manifest::RunManifest;
use crate::prepare::MIN_PREP_FIDELITY;

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 12)]
    pub nb: usize,
    #[arg(long, default_value_t = 25)]
    pub w_max: usize,
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
}

const METRICS: usize = 4;

fn metrics(s: &BenchSample) -> [usize; METRICS] {
    [s.census.total, s.census.cx, s.census.t, s.census.single]
}

/// Per-sample rows followed by `mean`, `min` and `max` rows for every `W`.
pub fn bench_csv(rows: &[BenchSample], w_max: usize) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["W", "sample", "total", "cx", "t", "single"])?;
    for r in rows {
        let m = metrics(r);
        w.write_record(
            [r.w.to_string(), r.sample.to_string()]
                .into_iter()
                .chain(m.iter().map(|v| v.to_string())),
        )?;
    }
    for wells in 1..=w_max {
        let group: Vec<[usize; METRICS]> =
            rows.iter().filter(|r| r.w == wells).map(metrics).collect();
        if group.is_empty() {
            continue;
        }
        let column = |k: usize| group.iter().map(move |m| m[k]);
        let mean: Vec<String> = (0..METRICS)
            .map(|k| (column(k).sum::<usize>() as f64 / group.len() as f64).to_string())
            .collect();
        let min: Vec<String> = (0..METRICS)
            .map(|k| column(k).min().unwrap_or(0).to_string())
            .collect();
        let max: Vec<String> = (0..METRICS)
            .map(|k| column(k).max().unwrap_or(0).to_string())
            .collect();
        for (label, values) in [("mean", mean), ("min", min), ("max", max)] {
            w.write_record(
                [wells.to_string(), label.to_string()]
                    .into_iter()
                    .chain(values),
            )?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn run(args: &BenchArgs, argv: &[String]) -> anyhow::Result<()> {
    if args.samples == 0 || args.w_max == 0 {
        return Err(crate::usage("--samples and --w-max must be positive"));
    }
    let bench = || {
        gate_bench(
            args.nb,
            args.w_max,
            args.samples,
            args.seed,
            MIN_PREP_FIDELITY,
        )
    };
    let rows = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(bench)?,
        None => bench()?,
    };
    write_text(&args.out, &bench_csv(&rows, args.w_max)?)?;
    RunManifest::new("bench-gates", argv, args)?
        .seed(args.seed)
        .output(&args.out)
        .write_beside(&args.out)?;
    println!("wrote {} ({} samples)", args.out.display(), rows.len());
    Ok(())
}
