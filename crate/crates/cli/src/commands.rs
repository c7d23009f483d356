use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde::Serialize;

use revpref::afriat::{konus_divisia_series, solve_afriat_numbers, solve_harp_multipliers};
use revpref::axioms::{check_garp_with_tolerance, check_harp_with_tolerance, Axiom};
use revpref::econometrics::{fit_price_models, histogram, power_estimate, random_group_probability};
use revpref::fixtures::{two_period_statistics, CounterexampleFixture};
use revpref::forecast::{
    forecast_size, gamma_coefficients, kg_membership, kh_membership, kh_polytope, law_of_demand_outer,
    ForecastError, MAX_VERTEX_DIM,
};
use revpref::hierarchy::{build_hierarchy, PartitionTree};
use revpref::irrationality::irrationality_report;
use revpref::synthetic::{cobb_douglas, SyntheticConfig};
use revpref::trade::{load_trade_statistics, TradeStatistics};

use crate::manifest::{strip_out, RunManifest};
use crate::{input_error, AxiomArg, Cli, Command, FixtureCommand, Panel, EXIT_OK, EXIT_VIOLATED};

type Ts = TradeStatistics<f64>;

fn load(panel: &Panel) -> Result<Ts> {
    let open = |p: &Path| File::open(p).map_err(|e| input_error(format!("{}: {e}", p.display())));
    load_trade_statistics(open(&panel.prices)?, open(&panel.quantities)?).map_err(input_error)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_panel(ts: &Ts, dir: &Path, prefix: &str) -> Result<()> {
    ts.write_csv(
        create(dir, &format!("{prefix}prices.csv"))?,
        create(dir, &format!("{prefix}quantities.csv"))?,
    )?;
    Ok(())
}

fn write_rows<S: Serialize>(dir: &Path, name: &str, rows: impl IntoIterator<Item = S>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(dir, name)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(cli: &Cli, args: &[String]) -> Result<u8> {
    if let Command::Replay { manifest } = &cli.command {
        return replay(cli, manifest);
    }
    let dir = cli.out.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut manifest = RunManifest {
        command: command_name(&cli.command).to_string(),
        argv: strip_out(args),
        inputs: Vec::new(),
        seed: None,
        omega: None,
        trials: None,
        tolerance: None,
        out: dir.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let code = dispatch(cli, &dir, &mut manifest)?;
    manifest.write(&dir)?;
    Ok(code)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Test { .. } => "test",
        Command::Indices { .. } => "indices",
        Command::Irrationality { .. } => "irrationality",
        Command::Forecast { .. } => "forecast",
        Command::Power { .. } => "power",
        Command::Groups { .. } => "groups",
        Command::Hierarchy { .. } => "hierarchy",
        Command::Fixture { .. } => "fixture",
        Command::Synth { .. } => "synth",
        Command::Replay { .. } => "replay",
    }
}

fn replay(cli: &Cli, path: &Path) -> Result<u8> {
    let m = RunManifest::read(path).map_err(input_error)?;
    let mut argv = vec!["revpref".to_string(), "--out".to_string()];
    argv.push(cli.out.display().to_string());
    argv.extend(m.argv.iter().cloned());
    let again = Cli::try_parse_from(&argv).map_err(input_error)?;
    if matches!(again.command, Command::Replay { .. }) {
        return Err(input_error("a manifest cannot record a replay"));
    }
    run(&again, &argv[1..])
}

fn panel_inputs(p: &Panel) -> Vec<PathBuf> {
    vec![p.prices.clone(), p.quantities.clone()]
}

fn dispatch(cli: &Cli, dir: &Path, m: &mut RunManifest) -> Result<u8> {
    match &cli.command {
        Command::Test {
            axiom,
            omega,
            tolerance,
            panel,
        } => {
            m.inputs = panel_inputs(panel);
            m.omega = Some(*omega);
            m.tolerance = Some(*tolerance);
            cmd_test(&load(panel)?, *axiom, *omega, *tolerance, dir)
        }
        Command::Indices { omega, panel } => {
            m.inputs = panel_inputs(panel);
            m.omega = Some(*omega);
            cmd_indices(&load(panel)?, *omega, dir)
        }
        Command::Irrationality { panel } => {
            m.inputs = panel_inputs(panel);
            cmd_irrationality(&load(panel)?, dir)
        }
        Command::Forecast {
            omega,
            new_price,
            expenditure,
            point,
            trials,
            seed,
            panel,
        } => {
            m.inputs = panel_inputs(panel);
            m.omega = Some(*omega);
            m.trials = *trials;
            m.seed = *seed;
            let opts = ForecastOpts {
                omega: *omega,
                new_price,
                expenditure: *expenditure,
                point: point.as_deref(),
                trials: trials.zip(*seed),
                workers: cli.workers,
            };
            cmd_forecast(&load(panel)?, &opts, dir)
        }
        Command::Power {
            trials,
            seed,
            max_order,
            bins,
            panel,
        } => {
            m.inputs = panel_inputs(panel);
            m.trials = Some(*trials);
            m.seed = Some(*seed);
            cmd_power(&load(panel)?, *trials, *seed, *max_order, *bins, cli.workers, dir)
        }
        Command::Groups {
            sizes,
            samples,
            seed,
            panel,
        } => {
            m.inputs = panel_inputs(panel);
            m.trials = Some(*samples);
            m.seed = Some(*seed);
            let ts = load(panel)?;
            let curve = random_group_probability(&ts, sizes, *samples, *seed, cli.workers).map_err(input_error)?;
            curve.write_csv(create(dir, "groups.csv")?)?;
            for p in &curve.points {
                println!(
                    "size {:>4}: p_garp {:.5} p_harp {:.5} ({} groups{})",
                    p.size,
                    p.p_garp,
                    p.p_harp,
                    p.groups,
                    if p.exhaustive { ", all" } else { "" }
                );
            }
            Ok(EXIT_OK)
        }
        Command::Hierarchy { tree, panel } => {
            m.inputs = panel_inputs(panel);
            m.inputs.push(tree.clone());
            let ts = load(panel)?;
            let text = fs::read_to_string(tree).map_err(|e| input_error(format!("{}: {e}", tree.display())))?;
            let tree = PartitionTree::from_json(&text).map_err(input_error)?;
            let rep = build_hierarchy(&ts, &tree).map_err(input_error)?;
            rep.write_nodes_csv(create(dir, "nodes.csv")?)?;
            rep.write_indices_csv(create(dir, "indices.csv")?)?;
            let rendered = rep.render_tree();
            fs::write(dir.join("tree.txt"), &rendered)?;
            print!("{rendered}");
            Ok(EXIT_OK)
        }
        Command::Fixture { which } => match which {
            FixtureCommand::EngelRays {
                epsilon,
                check_inclusion,
                grid,
            } => cmd_engel_rays(*epsilon, *check_inclusion, *grid, dir),
            FixtureCommand::TwoPeriod => {
                write_panel(&two_period_statistics(), dir, "")?;
                println!("wrote {}", dir.display());
                Ok(EXIT_OK)
            }
        },
        Command::Synth {
            periods,
            goods,
            seed,
            noise,
        } => {
            m.seed = Some(*seed);
            if *periods == 0 || *goods == 0 {
                return Err(input_error("periods and goods must be positive"));
            }
            let ts: Ts = cobb_douglas(&SyntheticConfig::new(*periods, *goods, *seed).with_noise(*noise));
            write_panel(&ts, dir, "")?;
            println!("wrote {}x{} panel to {}", periods, goods, dir.display());
            Ok(EXIT_OK)
        }
        Command::Replay { .. } => unreachable!("handled in run"),
    }
}

#[derive(Serialize)]
struct VerdictRecord {
    axiom: String,
    omega: f64,
    tolerance: f64,
    satisfied: bool,
    witness: String,
}

fn cmd_test(ts: &Ts, axiom: AxiomArg, omega: f64, tolerance: f64, dir: &Path) -> Result<u8> {
    if !(omega > 0.0) || !(tolerance >= 0.0) {
        return Err(input_error("omega must be positive and tolerance non-negative"));
    }
    let (ax, verdict) = match axiom {
        AxiomArg::Garp => (Axiom::Garp, check_garp_with_tolerance(ts, omega, tolerance)),
        AxiomArg::Harp => (Axiom::Harp, check_harp_with_tolerance(ts, omega, tolerance)),
    };
    let witness = match (verdict.garp_witness(), verdict.harp_witness()) {
        (Some(w), _) => w.to_string(),
        (_, Some(w)) => w.to_string(),
        _ => String::new(),
    };
    write_rows(
        dir,
        "verdict.csv",
        [VerdictRecord {
            axiom: ax.to_string(),
            omega,
            tolerance,
            satisfied: verdict.satisfied,
            witness: witness.clone(),
        }],
    )?;
    if verdict.satisfied {
        println!("{ax}({omega}) satisfied");
        Ok(EXIT_OK)
    } else {
        println!("{ax}({omega}) violated: {witness}");
        Ok(EXIT_VIOLATED)
    }
}

#[derive(Serialize)]
struct CertificateRow {
    period: String,
    utility: Option<f64>,
    lambda_garp: Option<f64>,
    lambda_harp: Option<f64>,
}

fn cmd_indices(ts: &Ts, omega: f64, dir: &Path) -> Result<u8> {
    let harp = solve_harp_multipliers(ts, omega);
    let garp = solve_afriat_numbers(ts, omega);
    let rows = (0..ts.periods()).map(|t| CertificateRow {
        period: ts.period_ids()[t].clone(),
        utility: garp.as_ref().ok().map(|s| s.utility[t]),
        lambda_garp: garp.as_ref().ok().map(|s| s.lambda[t]),
        lambda_harp: harp.as_ref().ok().map(|h| h.lambda[t]),
    });
    write_rows(dir, "certificates.csv", rows)?;
    if let Err(e) = &garp {
        println!("no Afriat numbers: {e}");
    }
    match harp {
        Ok(h) => {
            let series = konus_divisia_series(ts, &h);
            series.write_csv(ts.period_ids(), create(dir, "indices.csv")?)?;
            println!("period          F            Q");
            for (t, id) in ts.period_ids().iter().enumerate() {
                println!("{id:<8} {:>12.6} {:>12.6}", series.consumption[t], series.price[t]);
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("no Konüs-Divisia indices: {e}");
            Ok(EXIT_VIOLATED)
        }
    }
}

#[derive(Serialize)]
struct IrrationalityRow {
    omega_g: f64,
    attained_g: bool,
    omega_h: f64,
    garp_witness: String,
    harp_witness: String,
}

fn cmd_irrationality(ts: &Ts, dir: &Path) -> Result<u8> {
    let r = irrationality_report(ts);
    let row = IrrationalityRow {
        omega_g: r.omega_g,
        attained_g: r.attained_g,
        omega_h: r.omega_h,
        garp_witness: r.garp_witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
        harp_witness: r.harp_witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
    };
    write_rows(dir, "irrationality.csv", [&row])?;
    println!(
        "omega_G = {} ({}), omega_H = {}",
        r.omega_g,
        if r.attained_g { "attained" } else { "infimum, not attained" },
        r.omega_h
    );
    Ok(EXIT_OK)
}

struct ForecastOpts<'a> {
    omega: f64,
    new_price: &'a [f64],
    expenditure: Option<f64>,
    point: Option<&'a [f64]>,
    trials: Option<(u64, u64)>,
    workers: usize,
}

#[derive(Serialize)]
struct GammaRow<'a> {
    period: &'a str,
    gamma: f64,
}

#[derive(Serialize)]
struct PointRow {
    in_kh: bool,
    in_kg: bool,
    law_of_demand_outer: bool,
}

fn cmd_forecast(ts: &Ts, o: &ForecastOpts<'_>, dir: &Path) -> Result<u8> {
    let cone = match gamma_coefficients(ts, o.omega, o.new_price) {
        Ok(c) => c,
        Err(e @ ForecastError::HarpViolated { .. }) => {
            println!("{e}");
            return Ok(EXIT_VIOLATED);
        }
        Err(e) => return Err(input_error(e)),
    };
    write_rows(
        dir,
        "gamma.csv",
        ts.period_ids()
            .iter()
            .zip(&cone.gamma)
            .map(|(p, &g)| GammaRow { period: p, gamma: g }),
    )?;
    if let Some(x) = o.expenditure {
        let poly = kh_polytope(&cone, ts, x).map_err(input_error)?;
        poly.write_csv(ts.good_ids(), create(dir, "kh_polytope.csv")?)?;
        if let Some(v) = poly.vertices(1e-9) {
            write_vertices(dir, "kh_vertices.csv", ts.good_ids(), &v)?;
            println!("K_H polytope: {} vertices", v.len());
        } else {
            println!("K_H polytope: {} goods, vertices only for m <= {MAX_VERTEX_DIM}", ts.goods());
        }
    }
    if let Some(x) = o.point {
        if x.len() != ts.goods() {
            return Err(input_error(format!("point has {} coordinates, expected {}", x.len(), ts.goods())));
        }
        let row = PointRow {
            in_kh: kh_membership(&cone, ts, x),
            in_kg: kg_membership(ts, o.omega, o.new_price, x),
            law_of_demand_outer: law_of_demand_outer(ts, o.omega, o.new_price, x, true).map_err(input_error)?,
        };
        println!(
            "point: K_H {}, K_G {}, law-of-demand outer estimate {}",
            row.in_kh, row.in_kg, row.law_of_demand_outer
        );
        write_rows(dir, "point.csv", [row])?;
    }
    if let Some((trials, seed)) = o.trials {
        if ts.periods() < 2 {
            return Err(input_error("forecast size needs at least two periods"));
        }
        let r = forecast_size(ts, trials, seed, o.workers);
        r.write_csv(create(dir, "size.csv")?)?;
        println!(
            "F_G = {:.5} (se {:.5}), F_H = {:.5} (se {:.5})",
            r.garp.f_hat,
            r.garp.std_error(),
            r.harp.f_hat,
            r.harp.std_error()
        );
    }
    Ok(EXIT_OK)
}

fn write_vertices(dir: &Path, name: &str, goods: &[String], v: &[Vec<f64>]) -> Result<()> {
    let mut w = create(dir, name)?;
    writeln!(w, "{}", goods.join(","))?;
    for row in v {
        writeln!(w, "{}", row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ModelRow<'a> {
    good: &'a str,
    order: usize,
    beta0: f64,
    beta1: Option<f64>,
    beta2: Option<f64>,
    sigma2: f64,
    aic: f64,
}

#[derive(Serialize)]
struct BinRow {
    lo: f64,
    hi: f64,
    count: u64,
}

fn cmd_power(ts: &Ts, trials: u64, seed: u64, max_order: usize, bins: usize, workers: usize, dir: &Path) -> Result<u8> {
    if ts.periods() < 3 {
        return Err(input_error("power estimation needs at least three periods"));
    }
    if bins == 0 {
        return Err(input_error("bins must be positive"));
    }
    let models = fit_price_models(ts, max_order).map_err(input_error)?;
    write_rows(
        dir,
        "ar_models.csv",
        models.iter().map(|m| ModelRow {
            good: &m.good_id,
            order: m.order,
            beta0: m.beta[0],
            beta1: m.beta.get(1).copied(),
            beta2: m.beta.get(2).copied(),
            sigma2: m.sigma2,
            aic: m.aic,
        }),
    )?;
    let rep = power_estimate(ts, &models, trials, seed, workers)?;
    rep.write_csv(create(dir, "power.csv")?)?;
    rep.write_trials_csv(create(dir, "power_trials.csv")?)?;
    if trials > 0 {
        let lo = rep.omega_h.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rep.omega_h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let hi = if hi > lo { hi } else { lo + 1.0 };
        write_rows(
            dir,
            "omega_h_histogram.csv",
            histogram(&rep.omega_h, lo, hi, bins)
                .into_iter()
                .map(|(lo, hi, count)| BinRow { lo, hi, count }),
        )?;
    }
    println!("W_G = {:.5}, W_H = {:.5} over {} trials", rep.w_hat_g, rep.w_hat_h, rep.trials);
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct GridRow {
    x1: f64,
    x2: f64,
    x3: f64,
    in_kh: bool,
    in_g: bool,
}

fn cmd_engel_rays(epsilon: f64, check_inclusion: bool, grid: usize, dir: &Path) -> Result<u8> {
    let fix = CounterexampleFixture::new(epsilon).map_err(input_error)?;
    if grid == 0 {
        return Err(input_error("grid must be positive"));
    }
    let base: Ts = fix.statistics();
    let support: Ts = fix.intersection_statistics().map_err(input_error)?;
    write_panel(&base, dir, "")?;
    write_panel(&support, dir, "intersection_")?;
    let p_new = fix.new_price_vec::<f64>();
    let x_new = fix.new_expenditure;
    let cone = gamma_coefficients(&base, 1.0, &p_new).context("fixture satisfies HARP(1)")?;
    let poly = kh_polytope(&cone, &base, x_new)?;
    poly.write_csv(base.good_ids(), create(dir, "kh_polytope.csv")?)?;
    let vertices = poly.vertices(1e-9).context("three goods")?;
    write_vertices(dir, "kh_vertices.csv", base.good_ids(), &vertices)?;
    println!("K_H^1(P4, {x_new}) at epsilon = {epsilon}: vertices");
    for v in &vertices {
        println!("  ({:.6}, {:.6}, {:.6})", v[0], v[1], v[2]);
    }
    if !check_inclusion {
        return Ok(EXIT_OK);
    }

    // barycentric grid of the budget plane <P4, X> = x_new
    let mut rows = Vec::new();
    for i in 0..=grid {
        for j in 0..=grid - i {
            let k = grid - i - j;
            let share = |n: usize| x_new * n as f64 / grid as f64;
            let x = [share(i), share(j), share(k)];
            rows.push(GridRow {
                x1: x[0],
                x2: x[1],
                x3: x[2],
                in_kh: kh_membership(&cone, &base, &x),
                in_g: kg_membership(&support, 1.0, &p_new, &x),
            });
        }
    }
    let kh_outside_g = rows.iter().filter(|r| r.in_kh && !r.in_g).count();
    let witness = rows.iter().find(|r| r.in_g && !r.in_kh).map(|r| (r.x1, r.x2, r.x3));
    let in_g = rows.iter().filter(|r| r.in_g).count();
    let in_kh = rows.iter().filter(|r| r.in_kh).count();
    write_rows(dir, "support_grid.csv", rows)?;
    let verdict = match (kh_outside_g, witness) {
        (0, Some(_)) => "K_H strictly contained in G",
        (0, None) => "K_H equals G on the grid",
        _ => "K_H not contained in G",
    };
    let mut report = format!(
        "epsilon: {epsilon}\ngrid points: {}\nin K_H: {in_kh}\nin G: {in_g}\nK_H points outside G: {kh_outside_g}\n",
        (grid + 1) * (grid + 2) / 2
    );
    if let Some((a, b, c)) = witness {
        report += &format!("witness in G but not K_H: ({a}, {b}, {c})\n");
    }
    report += &format!("verdict: {verdict}\n");
    fs::write(dir.join("inclusion.txt"), &report)?;
    print!("{report}");
    if kh_outside_g > 0 {
        bail!("HARP forecasting set leaves the GARP support set on {kh_outside_g} grid points");
    }
    Ok(if witness.is_some() { EXIT_OK } else { EXIT_VIOLATED })
}
