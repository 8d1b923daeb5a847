//! A scaled-down pass over every module with fixed parameters. Outputs carry
//! no timings, so their digests depend only on the seed.

use super::pipelines::squarefree_count;
use super::{decay_table, fmt_f64, Csv, Run};
use crate::arithfn::{sieve_liouville, sieve_mobius, sieve_spf, table_from_multspec, ArithTable};
use crate::bilinear::{lcm_stats, type2_sum, type2_sum_decomposed, TypeIIConfig};
use crate::error::Result;
use crate::gowers::{gowers_norm, ComplexSeq, Strategy};
use crate::numeric::derive_seed;
use crate::phases::{best_denominator, equidist_defect, PolyPhase};
use crate::progressions::{exceptional_scan, tabulate_f_to, FSpec, PhaseSource, ScanOptions, SupOptions};
use crate::ramare::{
    cauchy_schwarz_gap, decompose, g_partial_sums, ramare_identity_check, sigma_partition, verify_convolution,
    MultSpec, RamareWindow,
};

const X: u64 = 10_000;

pub fn run_accept(run: &mut Run) -> Result<()> {
    let seed = run.cfg.seed;
    let mu = run.stage("tables", |_| sieve_mobius(100_000))?;
    let liouville = sieve_liouville(100_000)?;
    run.stage("sieve", |r| sieve(r, &mu))?;
    run.stage("ramare", |r| ramare(r, &mu, seed))?;
    run.stage("convolution", |r| convolution(r, &mu, seed))?;
    run.stage("gowers", |r| gowers(r, &mu))?;
    run.stage("decay", |r| decay(r, &mu, &liouville))?;
    run.stage("bv", |r| bv(r, &mu, seed))?;
    run.stage("bilinear", |r| bilinear(r, seed))?;
    run.stage("equidist", equidist)?;
    Ok(())
}

fn sieve(run: &mut Run, mu: &ArithTable) -> Result<()> {
    let mut csv = Csv::new(&["X", "musq_sum", "identity"]);
    let mut ok = true;
    for x in [1_000u64, 10_000, 100_000] {
        let direct = (1..=x).filter(|&n| mu.get(n).re != 0.0).count() as i64;
        let identity = squarefree_count(mu, x);
        ok &= direct == identity;
        csv.row(vec![x.to_string(), direct.to_string(), identity.to_string()]);
    }
    run.emit("accept_sieve.csv", &csv)?;
    run.check("squarefree_identity", ok, "X ∈ {1e3, 1e4, 1e5}".into());
    Ok(())
}

fn ramare(run: &mut Run, mu: &ArithTable, seed: u64) -> Result<()> {
    let spf = sieve_spf(X)?;
    let mut csv = Csv::new(&["Y", "Z", "applicable", "pass"]);
    let mut ok = true;
    for (y, z) in [(3.0, 10.0), (10.0, 100.0), (100.0, 1000.0)] {
        let w = RamareWindow::new(y, z)?;
        let (mut applicable, mut pass) = (0u64, 0u64);
        for n in 1..=X {
            if let Some(c) = ramare_identity_check(n, &w, &spf) {
                applicable += 1;
                pass += c.pass as u64;
            }
        }
        ok &= applicable == pass;
        csv.row(vec![fmt_f64(y), fmt_f64(z), applicable.to_string(), pass.to_string()]);
    }
    run.emit("accept_identity.csv", &csv)?;
    run.check("ramare_identity", ok, "n ≤ 1e4, three windows".into());

    let w = RamareWindow::new(3.0, 30.0)?;
    let mut csv = Csv::new(&["config", "total_re", "total_im", "residual", "tolerance", "slices", "cs_ok"]);
    let (mut part_ok, mut cs_ok) = (true, true);
    for i in 0..3u64 {
        let spec = FSpec::random(derive_seed(seed, 0x5100 + i), 10, X, 6, 1)?;
        let part = sigma_partition(mu, &spec, &w)?;
        let mut ok_here = true;
        for s in &part.slices {
            ok_here &= cauchy_schwarz_gap(mu, &spec, &w, s.p_lo)?.ok;
        }
        part_ok &= part.residual <= part.tolerance() && part.slice_residual() <= part.tolerance();
        cs_ok &= ok_here;
        csv.row(vec![
            i.to_string(),
            fmt_f64(part.total.re),
            fmt_f64(part.total.im),
            fmt_f64(part.residual),
            fmt_f64(part.tolerance()),
            part.slices.len().to_string(),
            ok_here.to_string(),
        ]);
    }
    run.emit("accept_partition.csv", &csv)?;
    run.check("sigma_partition", part_ok, "3 random FSpecs at X = 1e4".into());
    run.check("cauchy_schwarz", cs_ok, "every dyadic slice".into());
    Ok(())
}

fn convolution(run: &mut Run, mu: &ArithTable, seed: u64) -> Result<()> {
    let mut specs = vec![MultSpec::mobius(), MultSpec::squarefree_indicator()];
    specs.extend((0..5).map(|i| MultSpec::random_unit_disc(derive_seed(seed, 0xc0 + i))));
    let mut csv = Csv::new(&["function", "max_error"]);
    let mut ok = true;
    for spec in &specs {
        let (fp, g) = decompose(spec, crate::ramare::exponent_bound(X));
        let f = if spec.name() == "mobius" { mu.clone() } else { table_from_multspec(spec, X)? };
        let err = verify_convolution(&f, &table_from_multspec(&fp, X)?, &g, X)?;
        ok &= err <= 1e-10;
        csv.row(vec![spec.name().to_string(), fmt_f64(err)]);
    }
    run.emit("accept_convolution.csv", &csv)?;
    run.check("convolution", ok, format!("{} functions at X = 1e4", specs.len()));

    let (_, g) = decompose(&MultSpec::mobius(), 40);
    let mut csv = Csv::new(&["N", "head", "ratio"]);
    for n in [100u64, 1_000, 10_000] {
        let s = g_partial_sums(&g, n, Some(n))?;
        let ratio = s.head / ((n as f64).sqrt() * (n as f64).ln().powi(2));
        csv.row(vec![n.to_string(), fmt_f64(s.head), fmt_f64(ratio)]);
    }
    run.emit("accept_head.csv", &csv)
}

fn gowers(run: &mut Run, mu: &ArithTable) -> Result<()> {
    let mut csv = Csv::new(&["N", "k", "norm", "strategy"]);
    let mut u2 = Vec::new();
    for n in [1_000u64, 10_000] {
        let seq = ComplexSeq::new(mu.slice_complex(1, n))?;
        for k in [1, 2, 3] {
            let r = gowers_norm(&seq, k, Strategy::Auto)?;
            if k == 2 {
                u2.push(r.norm);
            }
            csv.row(vec![n.to_string(), k.to_string(), fmt_f64(r.norm), r.strategy.to_string()]);
        }
    }
    let small = ComplexSeq::new(mu.slice_complex(1, 500))?;
    let naive = gowers_norm(&small, 2, Strategy::Naive)?.norm;
    let tool = gowers_norm(&small, 2, Strategy::RecursiveFft)?.norm;
    run.emit("accept_gowers.csv", &csv)?;
    run.check(
        "u2_naive_oracle",
        (naive - tool).abs() <= 1e-9,
        format!("N = 500: naive {naive:.12}, tool {tool:.12}"),
    );
    run.check("u2_decreasing", u2[1] < u2[0], format!("{:.6} > {:.6}", u2[0], u2[1]));
    Ok(())
}

fn decay(run: &mut Run, mu: &ArithTable, liouville: &ArithTable) -> Result<()> {
    let mut csv = Csv::new(&["function", "X", "Q", "mean", "exceptional_fraction"]);
    for (name, table) in [("mobius", mu), ("liouville", liouville)] {
        let rows = decay_table(table, 1, &[10_000, 100_000], 0.4, 0.5)?;
        for r in &rows {
            csv.row(vec![
                name.to_string(),
                r.x.to_string(),
                r.q_base.to_string(),
                fmt_f64(r.mean),
                fmt_f64(r.exceptional_fraction),
            ]);
        }
        run.check(
            &format!("decay_{name}"),
            rows[1].mean < rows[0].mean && rows[1].exceptional_fraction <= rows[0].exceptional_fraction,
            format!("means {:.6} → {:.6}", rows[0].mean, rows[1].mean),
        );
    }
    run.emit("accept_decay.csv", &csv)
}

fn bv(run: &mut Run, mu: &ArithTable, seed: u64) -> Result<()> {
    let source = PhaseSource::Sup(SupOptions {
        degree: 1,
        restarts: 1,
        seed,
        ..Default::default()
    });
    let report = exceptional_scan(mu, 20, X, &source, 0.5, ScanOptions::default())?;
    let mut csv = Csv::new(&["q", "a", "alpha_1", "value", "exceptional"]);
    for r in &report.rows {
        csv.row(vec![
            r.q.to_string(),
            r.a.to_string(),
            fmt_f64(r.alphas[0]),
            fmt_f64(r.value),
            r.exceptional.to_string(),
        ]);
    }
    run.emit("accept_bv.csv", &csv)
}

fn bilinear(run: &mut Run, seed: u64) -> Result<()> {
    let cfg = TypeIIConfig::new(10, 200, 4, 0.05)?;
    let mut csv = Csv::new(&["config", "direct", "decomposed"]);
    let mut worst = 0.0f64;
    for i in 0..3u64 {
        let spec = FSpec::random(derive_seed(seed, 0xb100 + i), 4, cfg.reach(), 1, 2)?;
        let direct = type2_sum(&cfg, &tabulate_f_to(&spec, cfg.reach()))?.value;
        let decomposed = type2_sum_decomposed(&cfg, &spec)?.value;
        worst = worst.max((direct - decomposed).abs() / direct.abs().max(1.0));
        csv.row(vec![i.to_string(), fmt_f64(direct), fmt_f64(decomposed)]);
    }
    run.emit("accept_type2.csv", &csv)?;
    run.check("type2_routes_agree", worst <= 1e-9, format!("max relative gap {worst:.3e}"));

    let stats = lcm_stats(100, 10_000)?;
    let mut csv = Csv::new(&["multiplicity", "pairs"]);
    for (m, c) in &stats.histogram {
        csv.row(vec![m.to_string(), c.to_string()]);
    }
    run.emit("accept_lcm.csv", &csv)?;
    let v = stats.violations().len();
    run.check("lcm_multiplicity", v == 0, format!("{v} violations at Q = 100"));
    Ok(())
}

fn equidist(run: &mut Run) -> Result<()> {
    let golden = PolyPhase::new(&[0.6180339887498949])?;
    let fifth = PolyPhase::from_ratios(&[(1, 5)])?;
    let g = equidist_defect(&golden, 2_000, 0.1, Default::default())?;
    let f = equidist_defect(&fifth, 2_000, 0.1, Default::default())?;
    let d = best_denominator(&PolyPhase::from_ratios(&[(3, 7), (2, 21)])?, 1e3, 50);
    let mut csv = Csv::new(&["phase", "defect", "step", "frequency"]);
    for (name, r) in [("golden", &g), ("fifth", &f)] {
        csv.row(vec![
            name.to_string(),
            fmt_f64(r.defect),
            r.witness.step.to_string(),
            r.witness.frequency.to_string(),
        ]);
    }
    run.emit("accept_equidist.csv", &csv)?;
    run.check("golden_equidistributed", g.is_equidistributed(), format!("defect {:.6}", g.defect));
    run.check(
        "fifth_detected",
        f.defect >= 0.99 && f.witness.step == 5,
        format!("defect {:.6}, step {}", f.defect, f.witness.step),
    );
    run.check("rational_denominator", d.r == 21 && d.residual < 1e-20, format!("r = {}", d.r));
    Ok(())
}
