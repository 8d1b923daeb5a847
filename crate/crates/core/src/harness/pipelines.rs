use super::{fmt_f64, load_table, Csv, Pipeline, Run};
use crate::arithfn::FunctionKind;
use crate::bilinear::{diophantine_witness, lcm_stats, type2_sum, TypeIIConfig};
use crate::error::Result;
use crate::gowers::{gowers_norm, progression_sequence};
use crate::harness::{decay_table, FunctionSource};
use crate::numeric::gcd;
use crate::phases::{equidist_defect, EquidistOptions, PolyPhase};
use crate::progressions::{exceptional_scan, tabulate_f_to, FSpec, PhaseSource, ScanOptions, SupOptions};
use crate::ramare::{cauchy_schwarz_gap, ramare_identity_check, sigma_partition, RamareWindow};
use std::time::Instant;

pub(super) fn dispatch(run: &mut Run) -> Result<()> {
    match run.cfg.pipeline {
        Pipeline::Sieve => sieve(run),
        Pipeline::Gowers => gowers(run),
        Pipeline::BvScan => bv_scan(run),
        Pipeline::RamareCheck => ramare_check(run),
        Pipeline::Type2 => type2(run),
        Pipeline::Equidist => equidist(run),
        Pipeline::LcmStats => lcm(run),
        Pipeline::Decay => decay(run),
        Pipeline::Accept => super::run_accept(run),
    }
}

/// `Σ_{d ≤ √X} μ(d) ⌊X/d²⌋`, the number of squarefree `n ≤ X`.
pub(super) fn squarefree_count(mu: &crate::arithfn::ArithTable, x: u64) -> i64 {
    let mut s = 0i64;
    let mut d = 1u64;
    while d * d <= x {
        s += mu.get(d).re as i64 * (x / (d * d)) as i64;
        d += 1;
    }
    s
}

fn sieve(run: &mut Run) -> Result<()> {
    let x = run.cfg.x;
    let table = run.stage("sieve", |r| load_table(&r.cfg, x))?;
    let mut sum = crate::numeric::CompensatedSum::new();
    let mut nonzero = 0u64;
    for n in 1..=x {
        let v = table.get(n);
        sum.add(v);
        nonzero += (v.norm_sqr() > 0.0) as u64;
    }
    let mut csv = Csv::new(&["function", "X", "sum_re", "sum_im", "nonzero"]);
    csv.row(vec![
        run.cfg.function.to_string(),
        x.to_string(),
        fmt_f64(sum.value().re),
        fmt_f64(sum.value().im),
        nonzero.to_string(),
    ]);
    run.emit("sieve.csv", &csv)?;
    if run.cfg.function == FunctionSource::Builtin(FunctionKind::Mobius) {
        let want = squarefree_count(&table, x);
        run.check(
            "squarefree_count",
            nonzero as i64 == want,
            format!("Σμ² = {nonzero}, Σ μ(d)⌊X/d²⌋ = {want}"),
        );
    }
    Ok(())
}

fn gowers(run: &mut Run) -> Result<()> {
    let cfg = run.cfg.clone();
    let table = run.stage("table", |r| load_table(&r.cfg, cfg.x))?;
    let q = cfg.modulus;
    let residues: Vec<u64> = if cfg.all_residues {
        (0..q).filter(|&a| gcd(a, q) == 1).collect()
    } else {
        vec![cfg.residue.unwrap_or(if q == 1 { 0 } else { 1 })]
    };
    let mut csv = Csv::new(&["q", "a", "k", "Y", "norm", "strategy", "seconds"]);
    run.stage("norms", |_| {
        for &a in &residues {
            let seq = progression_sequence(&table, q, a, cfg.x)?;
            for &k in &cfg.k_grid {
                let t0 = Instant::now();
                let r = gowers_norm(&seq, k, cfg.strategy)?;
                let secs = if cfg.timings { t0.elapsed().as_secs_f64() } else { 0.0 };
                csv.row(vec![
                    q.to_string(),
                    a.to_string(),
                    k.to_string(),
                    seq.y().to_string(),
                    fmt_f64(r.norm),
                    r.strategy.to_string(),
                    fmt_f64(secs),
                ]);
            }
        }
        Ok(())
    })?;
    run.emit("gowers.csv", &csv)
}

fn bv_scan(run: &mut Run) -> Result<()> {
    let cfg = run.cfg.clone();
    let table = run.stage("table", |r| load_table(&r.cfg, cfg.x))?;
    let source = if cfg.phase_degree == 0 {
        PhaseSource::None
    } else {
        PhaseSource::Sup(SupOptions {
            degree: cfg.phase_degree,
            restarts: cfg.restarts,
            seed: cfg.seed,
            ..Default::default()
        })
    };
    let opts = ScanOptions {
        full_range: cfg.full_range,
    };
    let report = run.stage("scan", |_| exceptional_scan(&table, cfg.q_base, cfg.x, &source, cfg.epsilon, opts))?;
    let mut header = vec!["q".to_string(), "a".to_string()];
    header.extend((1..=cfg.phase_degree).map(|i| format!("alpha_{i}")));
    header.extend(["value", "threshold", "exceptional"].map(String::from));
    let mut csv = Csv::with_header(header);
    for row in &report.rows {
        let mut f = vec![row.q.to_string(), row.a.to_string()];
        f.extend(row.alphas.iter().map(|&a| fmt_f64(a)));
        f.extend([fmt_f64(row.value), fmt_f64(row.threshold), row.exceptional.to_string()]);
        csv.row(f);
    }
    run.emit("bv_scan.csv", &csv)?;
    let mut summary = Csv::new(&[
        "Q", "X", "epsilon", "moduli", "exceptional", "exceptional_fraction", "mean_value", "max_value",
        "budget_exhausted",
    ]);
    summary.row(vec![
        cfg.q_base.to_string(),
        cfg.x.to_string(),
        fmt_f64(cfg.epsilon),
        report.rows.len().to_string(),
        report.exceptional_count.to_string(),
        fmt_f64(report.exceptional_fraction()),
        fmt_f64(report.mean_value),
        fmt_f64(report.max_value),
        report.budget_exhausted.to_string(),
    ]);
    run.emit("bv_summary.csv", &summary)
}

/// The FSpec named by the config, or a random one from the seed.
fn load_fspec(run: &Run, x: u64) -> Result<FSpec> {
    match &run.cfg.fspec {
        Some(path) => FSpec::from_file(path),
        None => FSpec::random(
            run.cfg.seed,
            run.cfg.q_base,
            x,
            run.cfg.fspec_count.min(run.cfg.q_base as usize),
            run.cfg.phase_degree.max(1),
        ),
    }
}

fn ramare_check(run: &mut Run) -> Result<()> {
    let cfg = run.cfg.clone();
    let (y, z) = cfg.window.unwrap_or((10.0, 100.0));
    let w = RamareWindow::new(y, z)?;
    let table = run.stage("table", |r| load_table(&r.cfg, cfg.x))?;
    let spf = crate::arithfn::sieve_spf(cfg.x.max(2))?;
    let (mut applicable, mut pass) = (0u64, 0u64);
    run.stage("identity", |_| {
        for n in 1..=cfg.x {
            if let Some(c) = ramare_identity_check(n, &w, &spf) {
                applicable += 1;
                pass += c.pass as u64;
            }
        }
        Ok(())
    })?;
    let mut csv = Csv::new(&["Y", "Z", "X", "applicable", "pass", "fail"]);
    csv.row(vec![
        fmt_f64(y),
        fmt_f64(z),
        cfg.x.to_string(),
        applicable.to_string(),
        pass.to_string(),
        (applicable - pass).to_string(),
    ]);
    run.emit("ramare_identity.csv", &csv)?;
    run.check("ramare_identity", pass == applicable, format!("{pass}/{applicable} pass"));

    let spec = load_fspec(run, cfg.x)?;
    let part = run.stage("partition", |_| sigma_partition(&table, &spec, &w))?;
    let mut csv = Csv::new(&["part", "re", "im"]);
    for (name, z) in [
        ("total", part.total),
        ("musq_zero", part.part_musq_zero),
        ("coprime", part.part_coprime),
        ("sigma", part.part_sigma),
        ("sigma_pm", part.sigma_pm),
        ("remainder_musq", part.remainder_musq),
        ("remainder_coprime", part.remainder_coprime),
        ("sigma_prime", part.sigma_prime),
    ] {
        csv.row(vec![name.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
    }
    csv.row(vec!["residual".into(), fmt_f64(part.residual), fmt_f64(0.0)]);
    run.emit("ramare_partition.csv", &csv)?;
    run.check(
        "partition_residual",
        part.residual <= part.tolerance(),
        format!("residual {:.3e}, tolerance {:.3e}", part.residual, part.tolerance()),
    );
    run.check(
        "dyadic_slices",
        part.slice_residual() <= part.tolerance(),
        format!("slice residual {:.3e}", part.slice_residual()),
    );

    let mut csv = Csv::new(&["P_lo", "P_hi", "boundary", "slice_re", "slice_im", "lhs", "rhs", "ratio", "ok"]);
    let mut all_ok = true;
    for s in &part.slices {
        let g = cauchy_schwarz_gap(&table, &spec, &w, s.p_lo)?;
        all_ok &= g.ok;
        csv.row(vec![
            fmt_f64(s.p_lo),
            fmt_f64(s.p_hi),
            s.boundary.to_string(),
            fmt_f64(s.value.re),
            fmt_f64(s.value.im),
            fmt_f64(g.lhs),
            fmt_f64(g.rhs),
            fmt_f64(g.ratio()),
            g.ok.to_string(),
        ]);
    }
    run.emit("ramare_slices.csv", &csv)?;
    run.check("cauchy_schwarz", all_ok, format!("{} slices", part.slices.len()));
    Ok(())
}

fn type2(run: &mut Run) -> Result<()> {
    let cfg = run.cfg.clone();
    let t2 = TypeIIConfig::new(cfg.big_k, cfg.big_l, cfg.q_base, cfg.delta)?;
    let spec = load_fspec(run, t2.reach())?;
    let f = tabulate_f_to(&spec, t2.reach());
    let r = run.stage("type2", |_| type2_sum(&t2, &f))?;
    let range = (cfg.big_k * cfg.big_l) as f64 / cfg.q_base as f64;
    let bound = (1.0 / cfg.delta).powf(cfg.delta_exponent);
    let witness = diophantine_witness(&spec, range, (bound + 1e-9).floor().max(1.0) as u64);
    let mut csv = Csv::new(&[
        "K", "L", "Q", "delta", "value", "normalized", "exceeds", "witness_q", "witness_r", "witness_residual",
        "residual_bound",
    ]);
    let (wq, wr, wres) = match witness {
        Some((q, d)) => (q.to_string(), d.r.to_string(), fmt_f64(d.residual)),
        None => (String::new(), String::new(), String::new()),
    };
    csv.row(vec![
        cfg.big_k.to_string(),
        cfg.big_l.to_string(),
        cfg.q_base.to_string(),
        fmt_f64(cfg.delta),
        fmt_f64(r.value),
        fmt_f64(r.normalized),
        r.exceeds.to_string(),
        wq,
        wr,
        wres,
        fmt_f64(bound),
    ]);
    run.emit("type2.csv", &csv)
}

fn equidist(run: &mut Run) -> Result<()> {
    let cfg = run.cfg.clone();
    let phi = PolyPhase::new(&cfg.alphas)?;
    let rep = run.stage("equidist", |_| equidist_defect(&phi, cfg.n, cfg.delta, EquidistOptions::default()))?;
    let mut header: Vec<String> = (1..=cfg.alphas.len()).map(|i| format!("alpha_{i}")).collect();
    header.extend(
        ["N", "delta", "defect", "start", "step", "length", "frequency", "equidistributed"].map(String::from),
    );
    let mut csv = Csv::with_header(header);
    let mut row: Vec<String> = phi.alphas().into_iter().map(fmt_f64).collect();
    row.extend([
        cfg.n.to_string(),
        fmt_f64(cfg.delta),
        fmt_f64(rep.defect),
        rep.witness.start.to_string(),
        rep.witness.step.to_string(),
        rep.witness.length.to_string(),
        rep.witness.frequency.to_string(),
        rep.is_equidistributed().to_string(),
    ]);
    csv.row(row);
    run.emit("equidist.csv", &csv)
}

fn lcm(run: &mut Run) -> Result<()> {
    let cfg = run.cfg.clone();
    let r = if cfg.r == 0 { cfg.q_base * cfg.q_base } else { cfg.r };
    let stats = run.stage("lcm", |_| lcm_stats(cfg.q_base, r))?;
    let log_q = (cfg.q_base as f64).ln().max(1.0);
    let mut csv = Csv::new(&["m0", "tail_count", "bound", "ratio"]);
    for &m0 in &cfg.m0_grid {
        let tail = stats.tail_count(m0);
        let bound = r as f64 * log_q / m0.max(1) as f64;
        csv.row(vec![m0.to_string(), tail.to_string(), fmt_f64(bound), fmt_f64(tail as f64 / bound)]);
    }
    run.emit("lcm_tail.csv", &csv)?;
    let mut hist = Csv::new(&["multiplicity", "pairs"]);
    for (m, c) in &stats.histogram {
        hist.row(vec![m.to_string(), c.to_string()]);
    }
    run.emit("lcm_hist.csv", &hist)?;
    let v = stats.violations();
    let mut summary = Csv::new(&["Q", "R", "D", "pairs", "max_multiplicity", "violations"]);
    summary.row(vec![
        cfg.q_base.to_string(),
        r.to_string(),
        fmt_f64(stats.d),
        stats.pair_count().to_string(),
        stats.histogram.keys().max().copied().unwrap_or(0).to_string(),
        v.len().to_string(),
    ]);
    run.emit("lcm_summary.csv", &summary)?;
    run.check("multiplicity_below_sigma", v.is_empty(), format!("{} violations", v.len()));
    Ok(())
}

fn decay(run: &mut Run) -> Result<()> {
    let cfg = run.cfg.clone();
    let top = *cfg.x_grid.last().expect("validated nonempty");
    let table = run.stage("table", |r| load_table(&r.cfg, top))?;
    let mut csv = Csv::new(&["k", "X", "Q", "moduli", "mean", "max", "exceptional_fraction", "envelope"]);
    for &k in &cfg.k_grid {
        let rows = run.stage(&format!("decay_k{k}"), |_| {
            decay_table(&table, k, &cfg.x_grid, cfg.theta, cfg.epsilon)
        })?;
        for r in rows {
            csv.row(vec![
                k.to_string(),
                r.x.to_string(),
                r.q_base.to_string(),
                r.moduli.to_string(),
                fmt_f64(r.mean),
                fmt_f64(r.max),
                fmt_f64(r.exceptional_fraction),
                fmt_f64(r.envelope),
            ]);
        }
    }
    run.emit("decay.csv", &csv)
}
