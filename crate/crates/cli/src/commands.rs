use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gccd_core::channel::{corrupt, exhaustive_acceptance, run_monte_carlo, ChannelModel, ExperimentReport, StageCounts};
use gccd_core::codec::{capacity, PaddingMode};
use gccd_core::counting::{
    cross_pairs_exponent, gamma_max, gamma_partition, gamma_total, oracle_fixed_partition_count, oracle_spectrum,
    overhead_ratio, p1_bound, verify_theorem_bound, PartitionSpec, PARTITION_ORACLE_MAX_ORDER,
};
use gccd_core::wire::{parse_message, serialize_message};
use gccd_core::{verify, CheckedMessage, DetectionStage, Encoder, VerificationOutcome};
use serde::Serialize;

use crate::input::{parse_range, read_file, read_message, write_file};
use crate::render::{write_json, Format, Table};
use crate::{ChannelArgs, Cli, Command, OrderArgs, PaddingArgs, PayloadArgs, EXIT_DETECTED, EXIT_FAILURE, EXIT_OK};

pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match &cli.command {
        Command::Encode { payload, padding, out: path } => encode(cli, payload, padding, path, out),
        Command::Verify { input } => verify_file(cli, input, out, err),
        Command::Corrupt { input, out: path, channel } => corrupt_file(cli, input, path, channel, out),
        Command::Analyze { range, n, partition } => analyze(cli, range, *n, partition.as_deref(), out),
        Command::Oracle { m, partition } => oracle(cli, *m, partition.as_deref(), out),
        Command::Simulate { input, payload, padding, channel, epsilon, trials, exhaustive } => {
            let msg = match input {
                Some(path) => read_message(path)?,
                None => encode_payload(cli, payload, padding)?,
            };
            if *exhaustive {
                simulate_exhaustive(cli, &msg, out)
            } else {
                let model = channel_model(channel, *epsilon)?;
                simulate_monte_carlo(cli, &msg, &model, *trials, out)
            }
        }
    }
}

fn mode_name(mode: PaddingMode) -> &'static str {
    match mode {
        PaddingMode::ZeroFill => "zero",
        PaddingMode::CliquePin => "pin",
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn encode_payload(cli: &Cli, payload: &PayloadArgs, padding: &PaddingArgs) -> Result<CheckedMessage> {
    if !payload.is_given() {
        bail!("no payload given; use one of --bits, --hex or --dec");
    }
    let bits = payload.to_bits()?;
    let (mode, pin) = padding.resolve();
    Ok(Encoder::with_max_order(cli.max_order).encode(&bits, mode, pin)?)
}

#[derive(Serialize)]
struct MessageSummary {
    l: usize,
    m: usize,
    n: usize,
    mode: &'static str,
    pin_size: usize,
    colors: Vec<usize>,
    bytes: usize,
}

impl MessageSummary {
    fn new(msg: &CheckedMessage, bytes: usize) -> Self {
        let plan = msg.plan();
        MessageSummary {
            l: plan.payload_len(),
            m: plan.total_order(),
            n: msg.n(),
            mode: mode_name(plan.mode()),
            pin_size: plan.pin_size(),
            colors: msg.colors().colors().to_vec(),
            bytes,
        }
    }

    fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Json => write_json(self, out),
            Format::Csv => {
                let mut t = Table::new(vec!["l", "m", "n", "mode", "pin_size", "colors", "bytes"]);
                t.push(vec![
                    self.l.to_string(),
                    self.m.to_string(),
                    self.n.to_string(),
                    self.mode.into(),
                    self.pin_size.to_string(),
                    join(&self.colors, " "),
                    self.bytes.to_string(),
                ]);
                t.write_csv(out)
            }
            Format::Text => {
                writeln!(out, "payload bits  {}", self.l)?;
                writeln!(out, "graph order   {} ({} padding, pin {})", self.m, self.mode, self.pin_size)?;
                writeln!(out, "colors used   {}", self.n)?;
                writeln!(out, "check digits  {}", join(&self.colors, " "))?;
                writeln!(out, "wire bytes    {}", self.bytes)?;
                Ok(())
            }
        }
    }
}

fn encode(cli: &Cli, payload: &PayloadArgs, padding: &PaddingArgs, path: &Path, out: &mut dyn Write) -> Result<u8> {
    let msg = encode_payload(cli, payload, padding)?;
    let bytes = serialize_message(&msg)?;
    write_file(path, &bytes)?;
    MessageSummary::new(&msg, bytes.len()).write(cli.format.unwrap_or(Format::Text), out)?;
    Ok(EXIT_OK)
}

fn write_verdict(outcome: VerificationOutcome, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => write_json(&outcome, out),
        Format::Csv => {
            writeln!(out, "verdict,stage")?;
            match outcome.stage() {
                None => writeln!(out, "accepted,")?,
                Some(stage) => writeln!(out, "error_detected,{}", stage.as_str())?,
            }
            Ok(())
        }
        Format::Text => {
            match outcome.stage() {
                None => writeln!(out, "accepted")?,
                Some(stage) => writeln!(out, "error detected: {}", stage.as_str())?,
            }
            Ok(())
        }
    }
}

fn verify_file(cli: &Cli, input: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let format = cli.format.unwrap_or(Format::Json);
    let bytes = read_file(input)?;
    let outcome = match parse_message(&bytes) {
        Ok(msg) => verify(&msg),
        Err(e) => {
            writeln!(err, "error: {} is malformed: {e}", input.display())?;
            VerificationOutcome::ErrorDetected { stage: DetectionStage::Malformed }
        }
    };
    write_verdict(outcome, format, out)?;
    Ok(match outcome.stage() {
        None => EXIT_OK,
        Some(DetectionStage::Malformed) => EXIT_FAILURE,
        Some(_) => EXIT_DETECTED,
    })
}

fn require_seed(channel: &ChannelArgs, what: &str) -> Result<u64> {
    channel.seed.with_context(|| format!("{what} is randomized and needs --seed"))
}

fn channel_model(channel: &ChannelArgs, epsilon: Option<f64>) -> Result<ChannelModel> {
    Ok(if let Some(positions) = &channel.flip {
        ChannelModel::FlipPositions { positions: positions.clone() }
    } else if let Some(count) = channel.random {
        ChannelModel::FlipRandom { count, seed: require_seed(channel, "--random")? }
    } else if let Some(epsilon) = epsilon {
        ChannelModel::BernoulliFlip { epsilon, seed: require_seed(channel, "--epsilon")? }
    } else {
        ChannelModel::UniformReplacement { seed: require_seed(channel, "uniform replacement")? }
    })
}

#[derive(Serialize)]
struct CorruptSummary {
    l: usize,
    flipped: Vec<usize>,
}

fn corrupt_file(cli: &Cli, input: &Path, path: &Path, channel: &ChannelArgs, out: &mut dyn Write) -> Result<u8> {
    if channel.flip.is_none() && channel.random.is_none() {
        bail!("corrupt needs --flip P[,P...] or --random T");
    }
    let msg = read_message(input)?;
    let model = channel_model(channel, None)?;
    let received = corrupt(msg.payload(), &model)?;
    let summary = CorruptSummary { l: received.len(), flipped: msg.payload().diff_positions(&received) };
    write_file(path, &serialize_message(&msg.with_payload(received)?)?)?;
    match cli.format.unwrap_or(Format::Text) {
        Format::Json => write_json(&summary, out)?,
        Format::Csv => {
            let mut t = Table::new(vec!["l", "flipped"]);
            t.push(vec![summary.l.to_string(), join(&summary.flipped, " ")]);
            t.write_csv(out)?;
        }
        Format::Text => writeln!(out, "flipped {} of {} bits: {}", summary.flipped.len(), summary.l, join(&summary.flipped, " "))?,
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Bounds {
    gamma_total_exp: u64,
    gamma_max_exp: u64,
    y: u64,
    p1: String,
    overhead: String,
}

#[derive(Serialize)]
struct BoundsRow {
    m: usize,
    n: usize,
    #[serde(flatten)]
    bounds: Bounds,
}

fn bounds(m: usize, n: usize) -> Result<Bounds> {
    let (max, _) = gamma_max(m, n)?;
    let b = p1_bound(m, n)?;
    Ok(Bounds {
        gamma_total_exp: gamma_total(m).exponent,
        gamma_max_exp: max.exponent,
        y: b.bound.neg_exponent,
        p1: b.p1.to_string(),
        overhead: overhead_ratio(m)?.to_string(),
    })
}

fn write_bounds_detail(m: usize, n: usize, out: &mut dyn Write) -> Result<()> {
    let b = bounds(m, n)?;
    let (_, argmax) = gamma_max(m, n)?;
    let t = verify_theorem_bound(m, n)?;
    let p = p1_bound(m, n)?;
    writeln!(out, "order m                {m}")?;
    writeln!(out, "colors n               {n}")?;
    writeln!(out, "all graphs             2^{}", b.gamma_total_exp)?;
    writeln!(out, "best partition         {argmax}")?;
    writeln!(out, "graphs it colors       2^{}", b.gamma_max_exp)?;
    writeln!(out, "detection exponent y   {}", b.y)?;
    writeln!(
        out,
        "bound 2^{} >= 2^{} * 2^{}  {}",
        b.gamma_total_exp,
        b.y,
        b.gamma_max_exp,
        match (t.holds, t.equality) {
            (true, true) => "holds with equality",
            (true, false) => "holds strictly",
            (false, _) => "VIOLATED",
        }
    )?;
    writeln!(out, "p1                     {}", p.p1)?;
    writeln!(out, "2^-y                   {}", p.bound)?;
    writeln!(out, "payload bits per check {}", b.overhead)?;
    Ok(())
}

fn bounds_table(rows: &[BoundsRow]) -> Table {
    let mut t = Table::new(vec!["m", "n", "gamma_total_exp", "gamma_max_exp", "y", "p1", "overhead"]);
    for r in rows {
        t.push(vec![
            r.m.to_string(),
            r.n.to_string(),
            r.bounds.gamma_total_exp.to_string(),
            r.bounds.gamma_max_exp.to_string(),
            r.bounds.y.to_string(),
            r.bounds.p1.clone(),
            r.bounds.overhead.clone(),
        ]);
    }
    t
}

#[derive(Serialize)]
struct OverheadRow {
    m: usize,
    l: usize,
    check_size: usize,
    ratio: String,
}

#[derive(Serialize)]
struct PartitionReport {
    partition: Vec<usize>,
    m: usize,
    n: usize,
    cross_pairs_exp: u64,
    gamma_total_exp: u64,
    gamma_partition_exp: u64,
    balanced: bool,
}

fn analyze(cli: &Cli, range: &OrderArgs, n: Option<usize>, partition: Option<&[usize]>, out: &mut dyn Write) -> Result<u8> {
    let format = cli.format.unwrap_or(Format::Text);

    if let Some(parts) = partition {
        if range.m_range.is_some() || n.is_some() {
            bail!("--partition fixes m and n; drop --m-range and --n");
        }
        let p = PartitionSpec::new(parts.to_vec())?;
        if let Some(m) = range.m {
            if m != p.order() {
                bail!("partition {p} sums to {}, not --m {m}", p.order());
            }
        }
        let report = PartitionReport {
            partition: p.parts().to_vec(),
            m: p.order(),
            n: p.len(),
            cross_pairs_exp: cross_pairs_exponent(&p)?,
            gamma_total_exp: gamma_total(p.order()).exponent,
            gamma_partition_exp: gamma_partition(&p)?.exponent,
            balanced: p.is_balanced(),
        };
        match format {
            Format::Json => write_json(&report, out)?,
            _ => {
                let mut t = Table::new(vec![
                    "partition",
                    "m",
                    "n",
                    "cross_pairs_exp",
                    "gamma_total_exp",
                    "gamma_partition_exp",
                    "balanced",
                ]);
                t.push(vec![
                    join(&report.partition, " "),
                    report.m.to_string(),
                    report.n.to_string(),
                    report.cross_pairs_exp.to_string(),
                    report.gamma_total_exp.to_string(),
                    report.gamma_partition_exp.to_string(),
                    report.balanced.to_string(),
                ]);
                t.write(format, out)?;
            }
        }
        return Ok(EXIT_OK);
    }

    let orders = match (range.m, &range.m_range) {
        (Some(m), None) => (m, m),
        (None, Some(r)) => parse_range(r)?,
        _ => bail!("analyze needs --m, --m-range or --partition"),
    };

    if let (Some(n), true) = (n, orders.0 == orders.1) {
        let m = orders.0;
        match format {
            Format::Json => write_json(&bounds(m, n)?, out)?,
            Format::Csv => bounds_table(&[BoundsRow { m, n, bounds: bounds(m, n)? }]).write_csv(out)?,
            Format::Text => write_bounds_detail(m, n, out)?,
        }
        return Ok(EXIT_OK);
    }

    if range.m_range.is_some() && n.is_none() {
        let mut rows = Vec::new();
        for m in orders.0..=orders.1 {
            rows.push(OverheadRow { m, l: capacity(m), check_size: m, ratio: overhead_ratio(m)?.to_string() });
        }
        match format {
            Format::Json => write_json(&rows, out)?,
            _ => {
                let mut t = Table::new(vec!["m", "l", "check_size", "ratio"]);
                for r in &rows {
                    t.push(vec![r.m.to_string(), r.l.to_string(), r.check_size.to_string(), r.ratio.clone()]);
                }
                t.write(format, out)?;
            }
        }
        return Ok(EXIT_OK);
    }

    let mut rows = Vec::new();
    for m in orders.0..=orders.1 {
        match n {
            Some(n) if n <= m => rows.push(BoundsRow { m, n, bounds: bounds(m, n)? }),
            Some(_) => {}
            None => {
                for n in 1..=m {
                    rows.push(BoundsRow { m, n, bounds: bounds(m, n)? });
                }
            }
        }
    }
    match format {
        Format::Json => write_json(&rows, out)?,
        _ => bounds_table(&rows).write(format, out)?,
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SpectrumEntry {
    n: usize,
    count: u64,
}

#[derive(Serialize)]
struct SpectrumReport {
    m: usize,
    total: u64,
    spectrum: Vec<SpectrumEntry>,
}

#[derive(Serialize)]
struct FixedPartitionReport {
    m: usize,
    partition: Vec<usize>,
    brute_force: u64,
    formula_exp: u64,
    matches: bool,
}

fn oracle(cli: &Cli, m: usize, partition: Option<&[usize]>, out: &mut dyn Write) -> Result<u8> {
    let format = cli.format.unwrap_or(Format::Text);
    if let Some(parts) = partition {
        if m > PARTITION_ORACLE_MAX_ORDER {
            bail!("partition oracle enumerates graphs of order at most {PARTITION_ORACLE_MAX_ORDER}");
        }
        let p = PartitionSpec::new(parts.to_vec())?;
        let brute_force = oracle_fixed_partition_count(m, &p)?;
        let formula_exp = gamma_partition(&p)?.exponent;
        let report = FixedPartitionReport {
            m,
            partition: p.parts().to_vec(),
            brute_force,
            formula_exp,
            matches: u128::from(brute_force) == 1u128 << formula_exp,
        };
        match format {
            Format::Json => write_json(&report, out)?,
            _ => {
                let mut t = Table::new(vec!["m", "partition", "brute_force", "formula", "matches"]);
                t.push(vec![
                    m.to_string(),
                    join(&report.partition, " "),
                    brute_force.to_string(),
                    format!("2^{formula_exp}"),
                    report.matches.to_string(),
                ]);
                t.write(format, out)?;
            }
        }
        return Ok(if report.matches { EXIT_OK } else { EXIT_FAILURE });
    }

    let s = oracle_spectrum(m)?;
    let report = SpectrumReport {
        m,
        total: s.total(),
        spectrum: (1..=m).map(|n| SpectrumEntry { n, count: s.count(n) }).collect(),
    };
    match format {
        Format::Json => write_json(&report, out)?,
        _ => {
            let mut t = Table::new(vec!["n", "count", "at_most_n"]);
            for e in &report.spectrum {
                t.push(vec![e.n.to_string(), e.count.to_string(), s.at_most(e.n).to_string()]);
            }
            t.write(format, out)?;
            if format == Format::Text {
                writeln!(out, "total {} = 2^{}", report.total, capacity(m))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn write_stage_counts(out: &mut dyn Write, counts: &StageCounts) -> Result<()> {
    for stage in DetectionStage::ALL {
        writeln!(out, "  {:<20}{}", stage.as_str(), counts.get(stage))?;
    }
    Ok(())
}

fn simulate_monte_carlo(cli: &Cli, msg: &CheckedMessage, model: &ChannelModel, trials: u64, out: &mut dyn Write) -> Result<u8> {
    let report = run_monte_carlo(msg, model, trials)?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&report, out)?,
        Format::Csv => {
            writeln!(out, "{}", ExperimentReport::CSV_HEADER)?;
            writeln!(out, "{}", report.csv_row())?;
        }
        Format::Text => {
            writeln!(out, "trials              {}", report.trials)?;
            writeln!(out, "detected by stage")?;
            write_stage_counts(out, &report.detected_by_stage)?;
            writeln!(out, "undetected          {}", report.undetected)?;
            writeln!(out, "p_hat               {} (stderr {})", report.p_hat, report.stderr)?;
            writeln!(out, "p1                  {}", report.p1_exact)?;
            writeln!(out, "2^-y                {} (y = {})", report.bound_2_to_minus_y, report.y)?;
            writeln!(out, "monochrome bits     {}", report.detection_exponent)?;
            if report.model_mismatch {
                writeln!(out, "note: padded payload; the 2^-y line is only a reference")?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ExhaustiveSummary {
    corruptions: u64,
    detected_by_stage: StageCounts,
    undetected: u64,
    p_hat: String,
    p1: String,
    bound: String,
    within_bound: bool,
    below_p1: bool,
    exact_fit: bool,
    detection_exponent: usize,
}

fn simulate_exhaustive(cli: &Cli, msg: &CheckedMessage, out: &mut dyn Write) -> Result<u8> {
    let r = exhaustive_acceptance(msg)?;
    let s = ExhaustiveSummary {
        corruptions: r.corruptions,
        detected_by_stage: r.detected_by_stage,
        undetected: r.undetected,
        p_hat: format!("{}/{}", r.undetected, r.corruptions),
        p1: r.p1.to_string(),
        bound: r.bound.to_string(),
        within_bound: r.within_bound(),
        below_p1: r.below_p1(),
        exact_fit: r.exact_fit,
        detection_exponent: r.detection_exponent,
    };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&s, out)?,
        Format::Csv => {
            writeln!(out, "corruptions,detected_malformed,detected_improper_coloring,detected_chromatic_drop,undetected,p_hat,p1,bound,within_bound,below_p1,exact_fit,detection_exponent")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                s.corruptions,
                s.detected_by_stage.malformed,
                s.detected_by_stage.improper_coloring,
                s.detected_by_stage.chromatic_drop,
                s.undetected,
                s.p_hat,
                s.p1,
                s.bound,
                s.within_bound,
                s.below_p1,
                s.exact_fit,
                s.detection_exponent
            )?;
        }
        Format::Text => {
            writeln!(out, "corruptions         {}", s.corruptions)?;
            writeln!(out, "detected by stage")?;
            write_stage_counts(out, &s.detected_by_stage)?;
            writeln!(out, "undetected          {} ({})", s.undetected, s.p_hat)?;
            writeln!(out, "p1                  {}", s.p1)?;
            writeln!(out, "2^-y                {}", s.bound)?;
            writeln!(out, "within 2^-y         {}", s.within_bound)?;
            writeln!(out, "exact fit           {}", s.exact_fit)?;
        }
    }
    Ok(EXIT_OK)
}
