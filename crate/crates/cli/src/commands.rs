//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};

use sgdlab::engine::{
    aggregate_csv_row, replicate_csv_row, run_campaign, theorem_bound, RUN_CSV_HEADER,
};
use sgdlab::recursion::{
    lemma_constant_bound, lemma_decreasing_bound, lemma_sublinear_bound, lemma_two_phase_bound,
    lemma_unroll_bound, CampaignCell, MarginRecord, RecursionParams,
};
use sgdlab::rng::RngStream;

use crate::config::{ExperimentConfig, Mode};
use crate::{CliError, Resolved};

/// Relative tolerance for recursion-lemma margins.
const MARGIN_REL_TOL: f64 = 1e-9;
/// Absolute floor for mu-convexity margins.
const MU_MARGIN_TOL: f64 = 1e-10;

pub fn run_campaigns(resolved: &Resolved, informational: bool) -> Result<(), CliError> {
    let cfg = &resolved.config;
    expect_mode(
        cfg,
        if informational {
            Mode::Sweep
        } else {
            Mode::Run
        },
    )?;
    let problem = cfg.problem.as_ref().expect("validated");
    let alg = cfg.algorithm.as_ref().expect("validated");
    let (oracle, x0) = problem.build(cfg.master_seed)?;

    let mut rows: Vec<String> = vec![RUN_CSV_HEADER.to_string()];
    let mut violations: Vec<String> = Vec::new();
    println!(
        "{:<16} {:>8} {:>14} {:>14} {:>12} {:>6}",
        "schedule", "T", "mean_composite", "theorem_min", "ratio", "check"
    );
    for &tag in &alg.schedules {
        for &horizon in &alg.horizons {
            let schedule = crate::config::build_schedule(tag, &oracle, &x0, horizon, alg.gamma)?;
            let agg = run_campaign(&oracle, &x0, &schedule, cfg.replicates, cfg.master_seed)
                .map_err(CliError::numeric)?;
            if cfg.emit_replicates {
                for rep in &agg.per_replicate {
                    rows.push(replicate_csv_row(
                        &oracle,
                        tag.name(),
                        horizon,
                        rep,
                        agg.bound.theorem_min,
                    ));
                }
            }
            rows.push(aggregate_csv_row(
                &oracle,
                tag.name(),
                horizon,
                cfg.master_seed,
                &agg,
            ));

            // The bound claims an expectation; allow three CI halfwidths of
            // finite-sample slack.
            let pass = agg.mean_composite <= agg.bound.theorem_min + 3.0 * agg.ci99_composite;
            println!(
                "{:<16} {:>8} {:>14.6e} {:>14.6e} {:>12.4} {:>6}",
                tag.name(),
                horizon,
                agg.mean_composite,
                agg.bound.theorem_min,
                agg.ratio,
                if pass { "ok" } else { "FAIL" }
            );
            if !pass {
                violations.push(format!(
                    "schedule {} T {}: mean composite {:.6e} > bound {:.6e} + 3ci {:.6e}",
                    tag.name(),
                    horizon,
                    agg.mean_composite,
                    agg.bound.theorem_min,
                    3.0 * agg.ci99_composite
                ));
            }
        }
    }

    write_lines(resolved, &rows)?;
    if !informational && !violations.is_empty() {
        return Err(CliError::BoundViolation(violations.join("; ")));
    }
    Ok(())
}

pub fn verify_recursion(resolved: &Resolved) -> Result<(), CliError> {
    let cfg = &resolved.config;
    expect_mode(cfg, Mode::VerifyRecursion)?;
    let rec = cfg.recursion.as_ref().expect("validated");

    let mut cells = Vec::new();
    let mut bad_cells: Vec<String> = Vec::new();
    for &lemma_tag in &rec.lemmas {
        for &a in &rec.a {
            for &d_spec in &rec.d {
                let d = if rec.d_relative && a > 0.0 {
                    d_spec * a
                } else {
                    d_spec
                };
                for &c in &rec.c {
                    for &b in &rec.b {
                        for &r0 in &rec.r0 {
                            for &horizon in &rec.horizons {
                                match RecursionParams::new(a, b, c, d) {
                                    Ok(params) => cells.push(CampaignCell {
                                        lemma: lemma_tag.into(),
                                        params,
                                        r0,
                                        horizon,
                                        draws: rec.draws_per_cell,
                                    }),
                                    Err(e) => bad_cells
                                        .push(format!("cell (a={a}, b={b}, c={c}, d={d}): {e}")),
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if !bad_cells.is_empty() {
        return Err(CliError::Config(bad_cells.join("; ")));
    }

    let report =
        sgdlab::recursion::run_margin_campaign(&cells, cfg.master_seed, rec.emit_all_draws)
            .map_err(CliError::numeric)?;

    let mut rows = vec![MarginRecord::CSV_HEADER.to_string()];
    for outcome in &report.outcomes {
        match &outcome.all {
            Some(all) => rows.extend(all.iter().map(MarginRecord::csv_row)),
            None => rows.push(outcome.worst.csv_row()),
        }
    }
    write_lines(resolved, &rows)?;

    // One line per distinct (lemma, reason) with a cell count.
    let mut skip_counts: Vec<(String, usize)> = Vec::new();
    for skip in &report.skipped {
        let key = format!("lemma {} ({})", skip.lemma_tag, skip.reason);
        match skip_counts.iter_mut().find(|(k, _)| *k == key) {
            Some((_, n)) => *n += 1,
            None => skip_counts.push((key, 1)),
        }
    }
    for (key, n) in &skip_counts {
        println!("skipped {n} cells: {key}");
    }
    let min_rel = report.min_relative_margin();
    println!(
        "cells checked: {} (skipped {}), min relative margin: {:.3e}",
        report.outcomes.len(),
        report.skipped.len(),
        min_rel
    );
    if !report.all_pass(MARGIN_REL_TOL) {
        let worst = report
            .outcomes
            .iter()
            .filter(|o| !o.worst.passes(MARGIN_REL_TOL))
            .map(|o| {
                format!(
                    "lemma {} (a={}, b={}, c={}, d={}, T={}, mode={}): margin {:.6e} < -1e-9 * bound {:.6e}",
                    o.worst.lemma_tag,
                    o.worst.a,
                    o.worst.b,
                    o.worst.c,
                    o.worst.d,
                    o.worst.horizon,
                    o.worst.mode,
                    o.worst.margin,
                    o.worst.bound
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        return Err(CliError::BoundViolation(worst));
    }
    Ok(())
}

pub fn check_oracle(resolved: &Resolved) -> Result<(), CliError> {
    let cfg = &resolved.config;
    expect_mode(cfg, Mode::CheckOracle)?;
    let problem = cfg.problem.as_ref().expect("validated");
    let check = cfg
        .oracle_check
        .clone()
        .unwrap_or(crate::config::OracleCheckConfig {
            points: 20,
            samples_per_point: 10_000,
            radius: 1.0,
        });
    let (oracle, _x0) = problem.build(cfg.master_seed)?;

    let mut rows =
        vec!["kind,n,mu,L,sigma2,check,point,lhs,rhs,margin,ci_halfwidth,violation".to_string()];
    let mut violations = Vec::new();
    let mut point_rng = RngStream::new(cfg.master_seed, 0xC0DE);
    for point in 0..check.points {
        let x: Vec<f64> = oracle
            .x_star()
            .iter()
            .map(|&xs| xs + check.radius * point_rng.normal())
            .collect();

        let mut mc_rng = point_rng.substream(point as u64);
        let rep = oracle.check_smoothness_assumption(&x, check.samples_per_point, &mut mc_rng);
        rows.push(format!(
            "{},{},{},{},{},smoothness,{},{},{},{},{},{}",
            oracle.kind_tag(),
            oracle.dim(),
            oracle.mu(),
            oracle.big_l(),
            oracle.sigma_sq(),
            point,
            rep.lhs_estimate,
            rep.rhs,
            rep.slack,
            rep.ci_halfwidth,
            rep.violation
        ));
        if rep.violation {
            violations.push(format!(
                "second-moment bound violated at point {point}: lhs {:.6e} - ci {:.6e} > rhs {:.6e}",
                rep.lhs_estimate, rep.ci_halfwidth, rep.rhs
            ));
        }

        let margin = oracle.check_mu_convexity(&x);
        let violated = margin < -MU_MARGIN_TOL;
        rows.push(format!(
            "{},{},{},{},{},mu-convexity,{},{},0,{},0,{}",
            oracle.kind_tag(),
            oracle.dim(),
            oracle.mu(),
            oracle.big_l(),
            oracle.sigma_sq(),
            point,
            margin,
            margin,
            violated
        ));
        if violated {
            violations.push(format!(
                "mu-convexity margin {margin:.6e} below -1e-10 at point {point}"
            ));
        }
    }

    write_lines(resolved, &rows)?;
    println!(
        "checked {} points on {} (mu={}, L={}, sigma2={}): {}",
        check.points,
        oracle.kind_tag(),
        oracle.mu(),
        oracle.big_l(),
        oracle.sigma_sq(),
        if violations.is_empty() {
            "ok"
        } else {
            "VIOLATIONS"
        }
    );
    if !violations.is_empty() {
        return Err(CliError::BoundViolation(violations.join("; ")));
    }
    Ok(())
}

pub fn print_bounds(
    mu: f64,
    big_l: f64,
    r: f64,
    sigma2: f64,
    horizon: usize,
) -> Result<(), CliError> {
    if horizon == 0 {
        return Err(CliError::Usage("--t must be >= 1".into()));
    }
    if !(big_l > 0.0) || mu < 0.0 || r < 0.0 || sigma2 < 0.0 {
        return Err(CliError::Usage(
            "need --l > 0, --mu >= 0, --r >= 0, --sigma2 >= 0".into(),
        ));
    }
    let report = theorem_bound(mu, big_l, r, sigma2, horizon).map_err(CliError::numeric)?;
    println!("constants: mu={mu} L={big_l} R={r} sigma2={sigma2} T={horizon}");
    println!("{:<40} {:>16}", "bound", "value");
    let fmt_opt = |v: Option<f64>| match v {
        Some(x) => format!("{x:.10e}"),
        None => "n/a (mu = 0)".to_string(),
    };
    println!(
        "{:<40} {:>16.10e}",
        "composite: exponential branch", report.branch_exp
    );
    println!(
        "{:<40} {:>16.10e}",
        "composite: sublinear branch", report.branch_sub
    );
    println!("{:<40} {:>16.10e}", "composite: min", report.theorem_min);
    println!(
        "{:<40} {:>16}",
        "distance: tuned constant gamma",
        fmt_opt(report.classic_gamma)
    );
    println!(
        "{:<40} {:>16}",
        "distance: (1-mu g)^T R^2 + g sigma2/mu",
        fmt_opt(report.classic_distance_bound)
    );
    println!(
        "{:<40} {:>16}",
        "informational large-T form",
        fmt_opt(report.footnote_large_t)
    );

    // Recursion-level bounds under the standard substitution
    // a = mu, b = 1, c = sigma^2, d = 2L, r0 = R^2.
    let r0 = r * r;
    if mu > 0.0 {
        let params =
            RecursionParams::new(mu, 1.0, sigma2, 2.0 * big_l).map_err(CliError::numeric)?;
        let two_phase = lemma_two_phase_bound(&params, r0, horizon).map_err(CliError::numeric)?;
        let constant = lemma_constant_bound(&params, r0, horizon).map_err(CliError::numeric)?;
        let unroll = lemma_unroll_bound(&params, r0, horizon).map_err(CliError::numeric)?;
        let decreasing = lemma_decreasing_bound(&params, r0, horizon).map_err(CliError::numeric)?;
        println!(
            "{:<40} {:>16.10e}",
            "recursion: two-phase (32/36)", two_phase
        );
        println!("{:<40} {:>16.10e}", "recursion: tuned constant", constant);
        println!(
            "{:<40} {:>16.10e}",
            "recursion: unrolling (gamma = 1/d)", unroll
        );
        println!(
            "{:<40} {:>16.10e}",
            "recursion: decreasing stepsizes", decreasing
        );
    } else {
        println!(
            "{:<40} {:>16}",
            "recursion: two-phase (32/36)", "n/a (mu = 0)"
        );
    }
    let params_sub =
        RecursionParams::new(0.0, 1.0, sigma2, 2.0 * big_l).map_err(CliError::numeric)?;
    let sublinear = lemma_sublinear_bound(&params_sub, r0, horizon).map_err(CliError::numeric)?;
    println!(
        "{:<40} {:>16.10e}",
        "recursion: sublinear (a = 0)", sublinear
    );
    Ok(())
}

fn expect_mode(cfg: &ExperimentConfig, mode: Mode) -> Result<(), CliError> {
    if cfg.mode != mode {
        return Err(CliError::Config(format!(
            "config `mode` is {:?}, but this subcommand expects {:?}",
            cfg.mode, mode
        )));
    }
    Ok(())
}

fn write_lines(resolved: &Resolved, rows: &[String]) -> Result<(), CliError> {
    let file = File::create(&resolved.out)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", resolved.out.display())))?;
    let mut w = BufWriter::new(file);
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}
