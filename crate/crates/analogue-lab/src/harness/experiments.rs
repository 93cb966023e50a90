//! The experiment implementations behind the registry.

use std::path::Path;
use std::sync::Arc;

use serde_json::json;

use super::claim::ClaimCell;
use super::config::{CutoffChoice, ExperimentConfig, RhoChoice, TreeChoice};
use super::HarnessError;
use crate::blip::{Differentiator, Signal};
use crate::exec::map_indexed;
use crate::growth::{GrowthTree, TraceStatus};
use crate::precision::Cvq;
use crate::resets::{DiophantineVerifier, Enumerator, WaitingTime, WaitingTimeTable};
use crate::richardson::{beta_bound_from_limit, Cutoff, CutoffIntegral, Decoder, FDevice, Rho};
use crate::spectra::{
    classify, compact_operator_truncated, line_band_operator, line_position, rows_needed,
    OperatorKind,
};

/// Everything an experiment produces: one CSV row per cell, a JSON summary
/// fragment, and the cells the claim analysis runs over (empty when the
/// experiment has no precision axis).
#[derive(Debug)]
pub struct ExperimentOutput {
    pub csv_header: &'static str,
    pub csv_rows: Vec<String>,
    pub summary: serde_json::Value,
    pub claim_cells: Vec<ClaimCell>,
}

pub(crate) fn run_experiment(
    config: &ExperimentConfig,
    base_dir: &Path,
) -> Result<ExperimentOutput, HarnessError> {
    match config.experiment.as_str() {
        "blip-differentiator" => run_blip(config, base_dir),
        "richardson-K" => run_richardson(config, base_dir),
        "spectra-T" => run_spectra(config, base_dir, OperatorKind::LineBand),
        "spectra-S" => run_spectra(config, base_dir, OperatorKind::CompactLines),
        "growth-trial" => run_growth(config),
        other => Err(HarnessError::UnknownExperiment(other.to_string())),
    }
}

/// Ground truth for a question: scripted when the source is synthetic,
/// budget-relative otherwise.
fn membership(enumerator: &Enumerator, table: &WaitingTimeTable, j: u64) -> (bool, Option<u64>) {
    match enumerator.schedule() {
        Some(s) => (s.contains_member(j), s.waiting_time_of(j)),
        None => match table.waiting_time(j) {
            WaitingTime::Found(n) => (true, Some(n)),
            WaitingTime::ExhaustedAtBudget => (false, None),
        },
    }
}

fn nu_csv(nu: Option<u64>) -> String {
    nu.map(|n| n.to_string()).unwrap_or_default()
}

fn run_blip(config: &ExperimentConfig, base_dir: &Path) -> Result<ExperimentOutput, HarnessError> {
    let params = config.blip.clone().unwrap_or_default();
    let enumerator = config.enumerator(base_dir)?;
    let table = WaitingTimeTable::build(&enumerator, config.budget);
    let signal = Signal::from_enumerator(&enumerator, config.budget);

    let octaves = params.octaves;
    let n_cells = (config.j_max * octaves) as usize;
    // Cell (j, o): time resolution 2^-(j+1+o) at bound 1, so the stencil
    // window stays inside the only support it can touch.
    let answers = map_indexed(n_cells, |idx| {
        let j = idx as u32 / octaves;
        let o = idx as u32 % octaves;
        let m = j + 1 + o;
        let eps_t = (-f64::from(m)).exp2();
        let amp_eps = params.amp_eps_factor * (-2.0 * f64::from(j)).exp2();
        let time = Cvq::new("time", 1.0, eps_t).expect("octave resolutions are valid");
        let amplitude = Cvq::new("amplitude", 2.0, amp_eps).expect("validated factor");
        let device = Differentiator::new(time, amplitude, eps_t, params.threshold_factor)
            .expect("step equals resolution");
        (j, m, amp_eps, device.decide(&signal, j))
    });

    let mut csv_rows = Vec::with_capacity(n_cells);
    let mut claim_cells = Vec::with_capacity(n_cells);
    for (j, m, amp_eps, answer) in answers {
        let (in_set, nu) = membership(&enumerator, &table, u64::from(j));
        let correct = answer.correct_for(in_set);
        let time_pr = f64::from(m).exp2();
        let amp_pr = 2.0 / amp_eps;
        csv_rows.push(format!(
            "{j},{in_set},{},{time_pr},{amp_pr},{answer},{correct}",
            nu_csv(nu)
        ));
        claim_cells.push(ClaimCell {
            j,
            in_set,
            waiting_time: nu,
            log2_precision: f64::from(m),
            correct,
        });
    }

    Ok(ExperimentOutput {
        csv_header: "j,in_A,nu_j,time_PR,amp_PR,answer,correct",
        csv_rows,
        summary: json!({
            "terms": signal.terms(),
            "beta": table.max_waiting_below(u64::from(config.j_max)),
            "octaves": octaves,
        }),
        claim_cells,
    })
}

fn run_richardson(
    config: &ExperimentConfig,
    base_dir: &Path,
) -> Result<ExperimentOutput, HarnessError> {
    let params = config.richardson.clone().unwrap_or_default();
    let enumerator = config.enumerator(base_dir)?;
    let table = WaitingTimeTable::build(&enumerator, config.budget);
    let verifier = match enumerator.schedule() {
        Some(s) => DiophantineVerifier::from_schedule(s, params.arity),
        None => DiophantineVerifier::from_table(&table, params.arity),
    }
    .map_err(|e| HarnessError::ConfigInvalid(e.to_string()))?;
    let rho = match params.rho {
        RhoChoice::Piecewise => Rho::Piecewise,
        RhoChoice::Smooth => Rho::Smooth,
    };
    let cutoff = match params.cutoff {
        CutoffChoice::Exp => Cutoff::ExpDecay,
        CutoffChoice::InverseSquare => Cutoff::InverseSquare,
    };
    let device = FDevice::new(Arc::new(verifier), rho);
    let decoder = Decoder::new(params.arity);

    let limits = &params.upper_limits;
    let n_cells = config.j_max as usize * limits.len();
    let values: Vec<Result<f64, String>> = map_indexed(n_cells, |idx| {
        let j = (idx / limits.len()) as u32;
        let b = limits[idx % limits.len()];
        CutoffIntegral {
            cutoff,
            upper_limit: b,
            tol: params.tol,
            max_refinements: 16,
        }
        .detection_value(&device, &decoder, u64::from(j))
        .map_err(|e| e.to_string())
    });

    let mut csv_rows = Vec::with_capacity(n_cells);
    let mut claim_cells = Vec::with_capacity(n_cells);
    let mut bound_sound = true;
    for (idx, value) in values.into_iter().enumerate() {
        let j = (idx / limits.len()) as u32;
        let b = limits[idx % limits.len()];
        let k = value.map_err(HarnessError::Computation)?;
        let (in_set, nu) = membership(&enumerator, &table, u64::from(j));
        let detected = k > params.detection_factor * params.tol;
        let correct = detected == in_set;
        let bound = beta_bound_from_limit(b);
        if detected {
            if let Some(nu) = nu {
                bound_sound &= bound >= nu;
            }
        }
        csv_rows.push(format!(
            "{j},{in_set},{},{b},{k:e},{detected},{bound}",
            nu_csv(nu)
        ));
        claim_cells.push(ClaimCell {
            j,
            in_set,
            waiting_time: nu,
            log2_precision: b.log2(),
            correct,
        });
    }

    Ok(ExperimentOutput {
        csv_header: "j,in_A,nu_j,upper_limit_B,K_value,detected,beta_bound",
        csv_rows,
        summary: json!({
            "arity": params.arity,
            "tol": params.tol,
            "z_threshold": params.z_threshold,
            "beta_bound_sound": bound_sound,
        }),
        claim_cells,
    })
}

fn run_spectra(
    config: &ExperimentConfig,
    base_dir: &Path,
    kind: OperatorKind,
) -> Result<ExperimentOutput, HarnessError> {
    let params = config.spectra.clone().unwrap_or_default();
    let enumerator = config.enumerator(base_dir)?;
    let table = WaitingTimeTable::build(&enumerator, config.budget);
    let operator = match kind {
        OperatorKind::LineBand => line_band_operator(&table, config.j_max, params.band_points)
            .map_err(|e| HarnessError::ConfigInvalid(e.to_string()))?,
        OperatorKind::CompactLines => compact_operator_truncated(&enumerator, config.budget),
    };

    let octaves = params.octaves;
    let n_cells = (config.j_max * octaves) as usize;
    // Cell (j, o): resolution 2^-(j+o), one octave coarser than the
    // decisive scale at o = 0 so the failure side of the flip is visible.
    let cells = map_indexed(n_cells, |idx| {
        let j = idx as u32 / octaves;
        let o = idx as u32 % octaves;
        let v = j + o;
        let eps = (-f64::from(v)).exp2();
        let reading = operator.measure(eps);
        let answer = classify(&reading, j, kind);
        let target = match kind {
            OperatorKind::LineBand => line_position(j),
            OperatorKind::CompactLines => (-f64::from(j)).exp2(),
        };
        let detected_kind = reading
            .feature_near(target)
            .map(|f| f.csv_tag())
            .unwrap_or("none");
        (j, v, eps, answer, detected_kind)
    });

    let mut csv_rows = Vec::with_capacity(n_cells);
    let mut claim_cells = Vec::with_capacity(n_cells);
    for (j, v, eps, answer, detected_kind) in cells {
        let (in_set, nu) = membership(&enumerator, &table, u64::from(j));
        let correct = answer.correct_for(in_set);
        csv_rows.push(format!(
            "{},{j},{in_set},{},{eps},{detected_kind},{answer},{correct},{}",
            kind.csv_tag(),
            nu_csv(nu),
            operator.rows_used()
        ));
        claim_cells.push(ClaimCell {
            j,
            in_set,
            waiting_time: nu,
            log2_precision: f64::from(v),
            correct,
        });
    }

    let needed = rows_needed(&enumerator, config.j_max, config.budget, params.band_points).ok();
    Ok(ExperimentOutput {
        csv_header: "mode,j,in_A,nu_j,epsilon,detected_kind,answer,correct,rows_used",
        csv_rows,
        summary: json!({
            "mode": kind.csv_tag(),
            "band_points": params.band_points,
            "rows_needed": needed,
        }),
        claim_cells,
    })
}

fn run_growth(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let params = config.growth.clone().unwrap_or_default();
    let (tree_id, tree) = match params.tree {
        TreeChoice::Kleene => {
            let family = crate::resets::MachineFamily::demo(params.demo_count);
            ("kleene", GrowthTree::kleene(&family, params.kleene_budget))
        }
        TreeChoice::Full => ("full", GrowthTree::full()),
        TreeChoice::PrunedLeft => (
            "pruned-left",
            GrowthTree::from_fn(|u| u.bit(0) != Some(false) || u.len() <= 3),
        ),
    };

    let trace = tree.run_trial(params.max_steps);
    let mut csv_rows = Vec::with_capacity(trace.steps().len());
    for (n, node) in trace.steps().iter().enumerate() {
        csv_rows.push(format!(
            "{tree_id},{n},{node},{},{}",
            node.len(),
            trace.backtracks_at(n)
        ));
    }

    let j = config.j_max as usize;
    let lambda = tree.leftmost_path(j, params.depth_budget);
    let n_j = lambda
        .as_ref()
        .and_then(|prefix| trace.first_index_of(prefix));
    let threshold = tree.agreement_threshold(j, params.depth_budget).ok();
    let status = match trace.status() {
        TraceStatus::Running => "running",
        TraceStatus::ExhaustedRight => "exhausted-right",
    };

    Ok(ExperimentOutput {
        csv_header: "tree_id,step_n,node,node_len,backtracks_so_far",
        csv_rows,
        summary: json!({
            "J": config.j_max,
            "n_J": n_j,
            "max_explored_len": trace.max_explored_len(),
            "k_J_capped": threshold.as_ref().map(|t| t.k),
            "k_J_is_capped": threshold.as_ref().map(|t| t.capped),
            "backtracks": trace.backtracks_at(trace.steps().len() - 1),
            "status": status,
            "lambda_prefix": lambda.map(|l| l.to_string()),
        }),
        claim_cells: Vec::new(),
    })
}
