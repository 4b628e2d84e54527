//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers (run with `--nocapture` to see them).
//!
//! The oracle module below re-implements the link math and the monolithic
//! objective with plain scalar loops, independent of the library's
//! evaluation path.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flynet::assignment::{enumerate_assignments, prune_assignments, BandwidthAssignment, ChannelSet, Solution};
use flynet::channel::{link_capacity, RadioParams};
use flynet::config::ExperimentConfig;
use flynet::experiment::{run_experiment, RunOptions};
use flynet::metrics::{aggregate, GroupBy, RunReport};
use flynet::objective::penalized_utility;
use flynet::scenario::{generate_scenario, RateSplit, Scenario, TimeGrid, Vec3, Zone};
use flynet::solvers::{
    conventional_heuristic, exhaustive_search, neighbour, simulated_annealing, CandidateList,
    DesParams, FitnessMode, SaParams, SolverKind,
};

/// Independent scalar re-implementation of the link and objective math.
mod oracle {
    pub const PI: f64 = std::f64::consts::PI;

    pub fn dist(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2) + (a.2 - b.2).powi(2)).sqrt()
    }

    pub fn link_rate(
        tx: (f64, f64, f64),
        rx: (f64, f64, f64),
        bw: f64,
        p_tx: f64,
        lambda: f64,
        n0: f64,
    ) -> f64 {
        let d = dist(tx, rx);
        let gain = (lambda / (4.0 * PI * d)).powi(2);
        let snr = p_tx * gain / (bw * n0);
        bw * (1.0 + snr).log2()
    }

    pub struct Eval {
        pub u: f64,
        pub p_f: f64,
        pub penalized: f64,
    }

    /// One-pass evaluation of the full constrained objective from first
    /// principles: raw weighted utility plus the four penalty terms.
    #[allow(clippy::too_many_arguments)]
    pub fn monolithic(
        fen_positions: &[Vec<(f64, f64, f64)>],
        weights: &[f64],
        min_rates: &[f64],
        backhaul: (f64, f64, f64),
        hap: (f64, f64, f64),
        fen_bw: &[f64],
        backhaul_bw: f64,
        budget: f64,
        d_min: f64,
        p_tx: f64,
        lambda: f64,
        n0: f64,
    ) -> Eval {
        let e = fen_positions.len();
        let n = fen_positions[0].len();

        let mut u = 0.0;
        for j in 0..e {
            for t in 0..n {
                u += weights[j] * link_rate(fen_positions[j][t], hap, fen_bw[j], p_tx, lambda, n0);
            }
        }
        u /= n as f64;

        let mut c_d = 0.0;
        for traj in fen_positions {
            for &p in traj {
                if d_min >= dist(p, hap) {
                    c_d = 1.0;
                }
            }
        }

        let total_bw: f64 = fen_bw.iter().sum::<f64>() + backhaul_bw;
        let c_bw = if total_bw > budget { 1.0 } else { 0.0 };

        let mut min_violations = 0usize;
        let mut bkh_violations = 0usize;
        let bkh_rate = link_rate(backhaul, hap, backhaul_bw, p_tx, lambda, n0);
        for t in 0..n {
            let mut sum = 0.0;
            for j in 0..e {
                let rate = link_rate(fen_positions[j][t], hap, fen_bw[j], p_tx, lambda, n0);
                if rate < min_rates[j] {
                    min_violations += 1;
                }
                sum += rate;
            }
            if sum > bkh_rate {
                bkh_violations += 1;
            }
        }
        let p_f = c_d
            + c_bw
            + min_violations as f64 / (n * e) as f64
            + bkh_violations as f64 / n as f64;
        Eval { u, p_f, penalized: u - p_f * u }
    }
}

fn table_radio() -> RadioParams {
    RadioParams::from_config_units(20.0, 60.0, -174.0)
}

fn as_tuple(v: Vec3) -> (f64, f64, f64) {
    (v.x, v.y, v.z)
}

fn toy_scenario(seed: u64) -> Scenario {
    generate_scenario(
        seed,
        3,
        450e6,
        Zone::new(500.0, 500.0, 0.0),
        TimeGrid::new(30.0, 0.1).unwrap(),
        5.0,
        Vec3::new(0.0, 250.0, 0.0),
        1.0,
        RateSplit::EqualSplit,
    )
    .unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }
}

#[test]
fn criterion_1_heuristic_bandwidth_reproduction() {
    let start = Instant::now();
    let scenario = toy_scenario(1);
    let channels = ChannelSet::default_80211();
    let solution = conventional_heuristic(&scenario, &channels);
    assert_eq!(solution.assignment.backhaul_bw, 160e6, "backhaul slot");
    assert_eq!(solution.assignment.fen_bw, vec![40e6, 40e6, 40e6], "FEN slots");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?} exceeds 1 s");
    println!(
        "criterion 1: PASS — heuristic assignment {} in {elapsed:?}",
        solution.assignment.display_mhz()
    );
}

#[test]
fn criterion_2_channel_math_oracle() {
    let start = Instant::now();
    let radio = table_radio();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let tx = Vec3::new(
            rng.random_range(0.0..500.0),
            rng.random_range(0.0..500.0),
            rng.random_range(0.0..200.0),
        );
        let rx = Vec3::new(
            rng.random_range(0.0..500.0),
            rng.random_range(0.0..500.0),
            rng.random_range(200.0..400.0),
        );
        let bw = [20e6, 40e6, 80e6, 160e6][rng.random_range(0..4)];
        let got = link_capacity(tx, rx, bw, &radio).unwrap();
        let expected = oracle::link_rate(
            as_tuple(tx),
            as_tuple(rx),
            bw,
            radio.tx_power,
            radio.wavelength,
            radio.noise_psd,
        );
        worst = worst.max(rel_err(got, expected));
    }
    assert!(worst <= 1e-12, "worst relative error {worst:e}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "runtime {elapsed:?} exceeds 5 s");
    println!("criterion 2: PASS — 1000 link evaluations, worst rel err {worst:.2e}, {elapsed:?}");
}

#[test]
fn criterion_3_penalized_utility_oracle_equivalence() {
    let start = Instant::now();
    let radio = table_radio();
    let channels = ChannelSet::default_80211();
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let e = 1 + (trial % 4) as usize;
        let scenario = generate_scenario(
            trial,
            e,
            rng.random_range(1e8..6e8),
            Zone::new(500.0, 500.0, 0.0),
            TimeGrid::new(5.0, 0.5).unwrap(),
            rng.random_range(0.0..20.0),
            Vec3::new(0.0, 250.0, 0.0),
            1.0,
            RateSplit::Random,
        )
        .unwrap();
        let solution = Solution {
            hap_pos: Vec3::new(
                rng.random_range(0.0..500.0),
                rng.random_range(0.0..500.0),
                0.0,
            ),
            assignment: BandwidthAssignment {
                fen_bw: (0..e).map(|_| channels.values[rng.random_range(0..4)]).collect(),
                backhaul_bw: channels.values[rng.random_range(0..4)],
            },
        };
        let got = penalized_utility(&scenario, &solution, &radio, &channels).unwrap();

        let fen_positions: Vec<Vec<(f64, f64, f64)>> = scenario
            .fens
            .iter()
            .map(|f| f.trajectory.positions.iter().map(|&p| as_tuple(p)).collect())
            .collect();
        let weights: Vec<f64> = scenario.fens.iter().map(|f| f.weight).collect();
        let min_rates: Vec<f64> = scenario.fens.iter().map(|f| f.min_rate).collect();
        let expected = oracle::monolithic(
            &fen_positions,
            &weights,
            &min_rates,
            as_tuple(scenario.backhaul_pos),
            as_tuple(solution.hap_pos),
            &solution.assignment.fen_bw,
            solution.assignment.backhaul_bw,
            channels.budget,
            scenario.d_min,
            radio.tx_power,
            radio.wavelength,
            radio.noise_psd,
        );
        worst = worst.max(rel_err(got.raw_utility, expected.u));
        worst = worst.max(rel_err(got.p_f, expected.p_f));
        worst = worst.max(rel_err(got.penalized_utility, expected.penalized));
    }
    assert!(worst <= 1e-12, "worst relative error {worst:e}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?} exceeds 10 s");
    println!("criterion 3: PASS — 100 instances, worst rel err {worst:.2e}, {elapsed:?}");
}

/// Penalized utility at the solution's position snapped onto the search
/// grid. Falls back to the next-nearest grid point when the nearest one is
/// inside the distance floor of a node (exhaustive search skips those too).
fn snapped_utility(
    scenario: &Scenario,
    solution: &Solution,
    radio: &RadioParams,
    channels: &ChannelSet,
    step: f64,
    zone: &Zone,
) -> f64 {
    let steps = |extent: f64| (0..=(extent / step).floor() as usize).map(move |i| i as f64 * step);
    let mut grid: Vec<Vec3> = Vec::new();
    for x in steps(zone.size.x) {
        for y in steps(zone.size.y) {
            for z in steps(zone.size.z.max(0.0)) {
                grid.push(Vec3::new(x, y, z));
            }
        }
    }
    grid.sort_by(|a, b| {
        let da = a.distance(solution.hap_pos);
        let db = b.distance(solution.hap_pos);
        da.partial_cmp(&db).unwrap()
    });
    for pos in grid {
        let candidate = Solution { hap_pos: pos, assignment: solution.assignment.clone() };
        if let Ok(breakdown) = penalized_utility(scenario, &candidate, radio, channels) {
            return breakdown.penalized_utility;
        }
    }
    unreachable!("no evaluable grid point in the zone")
}

#[test]
fn criterion_4_des_dominance_at_desk_scale() {
    let start = Instant::now();
    let radio = table_radio();
    let channels = ChannelSet::default_80211();
    let zone = Zone::new(200.0, 200.0, 0.0);
    let grid_step = 25.0;
    let mut violations = 0usize;
    for seed in 0..10u64 {
        let scenario = generate_scenario(
            seed,
            2,
            3e8,
            zone,
            TimeGrid::new(50.0, 1.0).unwrap(),
            5.0,
            Vec3::new(0.0, 100.0, 0.0),
            1.0,
            RateSplit::Random,
        )
        .unwrap();
        let des = exhaustive_search(
            &scenario,
            &radio,
            &channels,
            &DesParams { grid_step, enum_cap: 10_000_000 },
        )
        .unwrap();
        // replay the annealer's exact iterate chain through the public
        // neighbour and cooling APIs, projecting every visited state onto
        // the search grid
        let sa_params = SaParams { s_max: 2000, rng_seed: seed, ..Default::default() };
        let heuristic = conventional_heuristic(&scenario, &channels);
        let all = enumerate_assignments(2, &channels).unwrap();
        let pruned = prune_assignments(&all, channels.budget, sa_params.beta);
        let fitness = |s: &Solution| {
            penalized_utility(&scenario, s, &radio, &channels).unwrap().penalized_utility
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut current = heuristic.clone();
        let mut current_fit = fitness(&current);
        let mut best_fit = current_fit;
        let mut u_safnet =
            snapped_utility(&scenario, &current, &radio, &channels, grid_step, &zone);
        for s in 0..sa_params.s_max {
            let t = flynet::solvers::cooling_temperature(s, &sa_params);
            let candidate = neighbour(
                &mut rng,
                &current,
                &pruned,
                &sa_params,
                &scenario,
                &radio,
                &channels,
                FitnessMode::Penalized,
            )
            .unwrap();
            let cand_fit = fitness(&candidate);
            let delta = cand_fit - current_fit;
            let r: f64 = rng.random_range(0.0..1.0);
            if delta >= 0.0 || (t > 0.0 && r < (delta / t).exp()) {
                current = candidate;
                current_fit = cand_fit;
                u_safnet = u_safnet.max(snapped_utility(
                    &scenario, &current, &radio, &channels, grid_step, &zone,
                ));
            }
            best_fit = best_fit.max(cand_fit);
        }

        // the replay must agree with the real solver run bit for bit
        let safnet = simulated_annealing(
            &scenario,
            &radio,
            &channels,
            &sa_params,
            FitnessMode::Penalized,
            CandidateList::Auto,
            false,
        )
        .unwrap();
        assert_eq!(safnet.best_breakdown.penalized_utility, best_fit, "replay drifted from solver");

        let u_des = des.best_breakdown.penalized_utility;
        let u_heur = snapped_utility(&scenario, &heuristic, &radio, &channels, grid_step, &zone);
        if !(u_des >= u_safnet) {
            violations += 1;
            eprintln!("seed {seed}: DES {u_des:e} < SAFnet {u_safnet:e}");
        }
        if !(u_safnet >= u_heur) {
            violations += 1;
            eprintln!("seed {seed}: SAFnet {u_safnet:e} < heuristic {u_heur:e}");
        }
    }
    assert_eq!(violations, 0, "{violations} dominance violations");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "runtime {elapsed:?} exceeds 2 min");
    println!("criterion 4: PASS — DES >= SAFnet >= heuristic on 10 seeds, {elapsed:?}");
}

#[test]
fn criterion_5_safnet_feasibility_property() {
    let start = Instant::now();
    let radio = table_radio();
    let channels = ChannelSet::default_80211();
    let beta = 0.8;
    let mut proposal_violations = 0usize;
    let mut final_violations = 0usize;
    let mut runs = 0usize;
    for e in [2usize, 3, 4] {
        for rep in 0..34u64 {
            if runs >= 100 {
                break;
            }
            runs += 1;
            let seed = e as u64 * 1000 + rep;
            let scenario = generate_scenario(
                seed,
                e,
                3e8,
                Zone::new(500.0, 500.0, 0.0),
                TimeGrid::new(30.0, 0.1).unwrap(),
                5.0,
                Vec3::new(0.0, 250.0, 0.0),
                1.0,
                RateSplit::Random,
            )
            .unwrap();
            let params = SaParams { s_max: 1000, rng_seed: seed, beta, ..Default::default() };

            // every proposal drawn by the neighbour function stays inside
            // the pruned budget window (the retained heuristic start may sit
            // below it, but never over budget)
            let all = enumerate_assignments(e, &channels).unwrap();
            let pruned = prune_assignments(&all, channels.budget, beta);
            let heuristic = conventional_heuristic(&scenario, &channels);
            let initial_assignment = heuristic.assignment.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut current = heuristic;
            for _ in 0..params.s_max {
                let next = neighbour(
                    &mut rng,
                    &current,
                    &pruned,
                    &params,
                    &scenario,
                    &radio,
                    &channels,
                    FitnessMode::Penalized,
                )
                .unwrap();
                let total = next.assignment.total();
                let in_window = total >= beta * channels.budget && total <= channels.budget;
                if !in_window && next.assignment != initial_assignment {
                    proposal_violations += 1;
                }
                if total > channels.budget {
                    proposal_violations += 1;
                }
                current = next;
            }

            let result = simulated_annealing(
                &scenario,
                &radio,
                &channels,
                &params,
                FitnessMode::Penalized,
                CandidateList::Auto,
                false,
            )
            .unwrap();
            if result.best_breakdown.c_bw != 0.0 {
                final_violations += 1;
            }
        }
    }
    assert_eq!(proposal_violations, 0, "{proposal_violations} window violations");
    assert_eq!(final_violations, 0, "{final_violations} final solutions trigger the budget penalty");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "runtime {elapsed:?} exceeds 5 min");
    println!("criterion 5: PASS — {runs} runs, zero budget-window violations, {elapsed:?}");
}

#[test]
fn criterion_6_qualitative_table_ordering() {
    let start = Instant::now();
    let radio = table_radio();
    let channels = ChannelSet::default_80211();
    let seeds = 30u64;
    let mut conv_sa_bkh = Vec::new();
    let mut safnet_bkh = Vec::new();
    let mut safnet_fen = Vec::new();
    let mut conv_h_fen = Vec::new();
    for seed in 0..seeds {
        let scenario = toy_scenario(seed);
        let total_min_rate = 450e6;
        let params = SaParams { s_max: 1000, rng_seed: seed, ..Default::default() };

        let eval = |solution: &Solution, kind: SolverKind| {
            flynet::metrics::evaluate_solution(&scenario, solution, &radio, kind, seed, total_min_rate)
                .unwrap()
        };

        let conv_h = conventional_heuristic(&scenario, &channels);
        conv_h_fen.push(eval(&conv_h, SolverKind::ConvH).fen_outage);

        let conv_sa = simulated_annealing(
            &scenario,
            &radio,
            &channels,
            &params,
            FitnessMode::Raw,
            CandidateList::Auto,
            false,
        )
        .unwrap();
        conv_sa_bkh.push(eval(&conv_sa.best, SolverKind::ConvSa).backhaul_outage);

        let safnet = simulated_annealing(
            &scenario,
            &radio,
            &channels,
            &params,
            FitnessMode::Penalized,
            CandidateList::Auto,
            false,
        )
        .unwrap();
        let report = eval(&safnet.best, SolverKind::Safnet);
        safnet_bkh.push(report.backhaul_outage);
        safnet_fen.push(report.fen_outage);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let conv_sa_mean = mean(&conv_sa_bkh);
    let safnet_bkh_mean = mean(&safnet_bkh);
    let safnet_fen_mean = mean(&safnet_fen);
    let conv_h_fen_mean = mean(&conv_h_fen);
    assert!(conv_sa_mean > 0.9, "conv_sa mean backhaul outage {conv_sa_mean}");
    assert!(safnet_bkh_mean < 0.1, "safnet mean backhaul outage {safnet_bkh_mean}");
    assert!(
        safnet_fen_mean <= conv_h_fen_mean,
        "safnet FEN outage {safnet_fen_mean} vs conv_h {conv_h_fen_mean}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "runtime {elapsed:?} exceeds 10 min");
    println!(
        "criterion 6: PASS — conv_sa bkh outage {conv_sa_mean:.3}, safnet bkh outage \
         {safnet_bkh_mean:.3}, safnet FEN outage {safnet_fen_mean:.3} <= conv_h {conv_h_fen_mean:.3}, {elapsed:?}"
    );
}

fn sweep_config(seeds: usize, s_max: usize) -> ExperimentConfig {
    let mut config = ExperimentConfig::default();
    config.master_seed = 7;
    config.seeds = seeds;
    config.solvers = vec![SolverKind::ConvH, SolverKind::Safnet];
    config.sa.s_max = s_max;
    config.sweep.e = vec![2, 3, 4, 5];
    config.sweep.total_min_rate = vec![2e8, 3e8, 4e8];
    config
}

#[test]
fn criterion_7_directional_improvement() {
    let start = Instant::now();
    // per-FEN minimum rates of {2,3,4}e8; the total requirement grows with E
    let mut reports: Vec<RunReport> = Vec::new();
    for e in [2usize, 3, 4, 5] {
        let mut config = sweep_config(20, 1000);
        config.sweep.e = vec![e];
        config.sweep.total_min_rate =
            vec![2e8 * e as f64, 3e8 * e as f64, 4e8 * e as f64];
        let dir = tempfile::tempdir().unwrap();
        let opts = RunOptions {
            out_dir: Some(dir.path().into()),
            parallel: Some(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4)),
            ..Default::default()
        };
        reports.extend(run_experiment(&config, &opts).unwrap().reports);
    }
    let mean_of = |solver: SolverKind, metric: &str| {
        let values: Vec<f64> = reports
            .iter()
            .filter(|r| r.solver == solver)
            .map(|r: &RunReport| r.metric(metric))
            .collect();
        values.iter().sum::<f64>() / values.len() as f64
    };
    let fen_out_h = mean_of(SolverKind::ConvH, "fen_outage");
    let fen_out_s = mean_of(SolverKind::Safnet, "fen_outage");
    let bkh_out_h = mean_of(SolverKind::ConvH, "backhaul_outage");
    let bkh_out_s = mean_of(SolverKind::Safnet, "backhaul_outage");
    let thp_h = mean_of(SolverKind::ConvH, "avg_fen_throughput");
    let thp_s = mean_of(SolverKind::Safnet, "avg_fen_throughput");

    assert!(fen_out_s < fen_out_h, "FEN outage: safnet {fen_out_s} vs conv_h {fen_out_h}");
    assert!(bkh_out_s < bkh_out_h, "backhaul outage: safnet {bkh_out_s} vs conv_h {bkh_out_h}");
    assert!(thp_s > thp_h, "throughput: safnet {thp_s} vs conv_h {thp_h}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1800.0, "runtime {elapsed:?} exceeds 30 min");
    println!(
        "criterion 7: PASS — safnet vs conv_h: FEN outage -{:.1}%, backhaul outage -{:.1}%, \
         per-link throughput +{:.1}%, {elapsed:?}",
        (1.0 - fen_out_s / fen_out_h) * 100.0,
        (1.0 - bkh_out_s / bkh_out_h) * 100.0,
        (thp_s / thp_h - 1.0) * 100.0,
    );
}

fn linear_fit_r2(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

#[test]
fn criterion_8_complexity_scaling() {
    let start = Instant::now();
    let radio = table_radio();
    let channels = ChannelSet::default_80211();

    let time_sa = |scenario: &Scenario, s_max: usize| -> f64 {
        let params = SaParams { s_max, rng_seed: 42, ..Default::default() };
        // best of three to damp scheduler noise
        (0..3)
            .map(|_| {
                let t0 = Instant::now();
                simulated_annealing(
                    scenario,
                    &radio,
                    &channels,
                    &params,
                    FitnessMode::Penalized,
                    CandidateList::Auto,
                    false,
                )
                .unwrap();
                t0.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };

    let scenario = toy_scenario(3);
    let s_points: Vec<(f64, f64)> = [500usize, 1000, 2000, 4000, 8000]
        .iter()
        .map(|&s| (s as f64, time_sa(&scenario, s)))
        .collect();
    let r2_s = linear_fit_r2(&s_points);

    let ne_points: Vec<(f64, f64)> = [(2usize, 10.0f64), (2, 20.0), (4, 20.0), (8, 20.0), (8, 40.0)]
        .iter()
        .map(|&(e, horizon)| {
            let scenario = generate_scenario(
                4,
                e,
                3e8,
                Zone::new(500.0, 500.0, 0.0),
                TimeGrid::new(horizon, 0.1).unwrap(),
                5.0,
                Vec3::new(0.0, 250.0, 0.0),
                1.0,
                RateSplit::Random,
            )
            .unwrap();
            let ne = (e * scenario.periods()) as f64;
            (ne, time_sa(&scenario, 2000))
        })
        .collect();
    let r2_ne = linear_fit_r2(&ne_points);

    assert!(r2_s > 0.95, "R^2 vs s_max = {r2_s} for {s_points:?}");
    assert!(r2_ne > 0.95, "R^2 vs N*E = {r2_ne} for {ne_points:?}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "runtime {elapsed:?} exceeds 10 min");
    println!(
        "criterion 8: PASS — wall-time linearity R^2 vs s_max {r2_s:.4}, vs N*E {r2_ne:.4}, {elapsed:?}"
    );
}

#[test]
fn criterion_9_sweep_determinism() {
    let start = Instant::now();
    // scaled-down variant of the criterion-7 sweep, run twice
    let mut config = sweep_config(3, 200);
    config.sweep.e = vec![2, 3];
    config.sweep.total_min_rate = vec![2e8];
    config.solvers = vec![SolverKind::ConvH, SolverKind::ConvSa, SolverKind::Safnet];

    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    run_experiment(
        &config,
        &RunOptions { out_dir: Some(dir1.path().into()), parallel: Some(4), ..Default::default() },
    )
    .unwrap();
    run_experiment(
        &config,
        &RunOptions { out_dir: Some(dir2.path().into()), ..Default::default() },
    )
    .unwrap();
    let a = std::fs::read(dir1.path().join("runs.csv")).unwrap();
    let b = std::fs::read(dir2.path().join("runs.csv")).unwrap();
    assert_eq!(a, b, "runs.csv differs between repeated sweeps");
    let agg1 = std::fs::read(dir1.path().join("aggregates.json")).unwrap();
    let agg2 = std::fs::read(dir2.path().join("aggregates.json")).unwrap();
    assert_eq!(agg1, agg2, "aggregates.json differs between repeated sweeps");
    let elapsed = start.elapsed();
    println!("criterion 9: PASS — byte-identical runs.csv across repeated sweeps, {elapsed:?}");

    // keep the aggregate interface honest: the CSV reloads into the same stats
    let reports = flynet::experiment::read_reports_csv(&dir1.path().join("runs.csv")).unwrap();
    let table = aggregate(&reports, GroupBy::E);
    assert!(!table.cells.is_empty());
}
