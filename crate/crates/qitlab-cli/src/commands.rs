//! Command implementations. Every command returns the full CSV text
//! (header plus rows); numeric cells carry 12 significant digits and
//! infinities render as `inf`.

use std::path::Path;

use qitlab::asympt::second_order_estimate;
use qitlab::channelcode::{
    achievable_message_count, expected_success_exact, expected_success_mc, pgm_success_lower_bound,
    CodingExperiment, ExperimentMode,
};
use qitlab::divergence::{
    collision_divergence, iid_spectrum_classical, info_spectrum, info_variance, relative_entropy,
    DivergenceValue, SpectrumQuery,
};
use qitlab::hyptest::{build_ht_povm, oneshot_ht_bound, HypothesisInstance, OneShotHtBound};
use qitlab::matcore::eig_hermitian;
use qitlab::sidecomp::{
    sw_expected_success_exact, sw_expected_success_mc, sw_message_count, sw_success_lower_bound,
    SwExperiment, SwMode,
};
use qitlab::states::DensityMatrix;

use crate::schema::Workspace;
use crate::{CliError, RunMode, WhichDivergence};

pub struct GlobalOpts {
    pub seed: u64,
    pub tol_rank: f64,
    pub grid_points: usize,
    pub refine_tol: f64,
    pub threads: Option<usize>,
}

impl GlobalOpts {
    fn query(&self, epsilon: f64) -> Result<SpectrumQuery, CliError> {
        Ok(SpectrumQuery::new(epsilon)?
            .with_grid_points(self.grid_points)?
            .with_refine_tol(self.refine_tol)?)
    }
}

/// 12 significant digits; infinities as `inf` / `-inf`.
pub fn fmt(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.11e}")
    }
}

fn fmt_div(v: DivergenceValue) -> String {
    fmt(v.as_f64())
}

fn load(file: &Path) -> Result<Workspace, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", file.display())))?;
    Workspace::from_json(&text)
}

// ---------------------------------------------------------------------------
// divergence
// ---------------------------------------------------------------------------

pub fn cmd_divergence(
    file: &Path,
    rho_name: &str,
    sigma_name: &str,
    which: WhichDivergence,
    epsilon: Option<f64>,
    opts: &GlobalOpts,
) -> Result<String, CliError> {
    let ws = load(file)?;
    let rho = ws.density(rho_name)?;
    let sigma = ws.density(sigma_name)?;
    let (label, eps_cell, value) = match which {
        WhichDivergence::D => (
            "d",
            String::new(),
            fmt_div(relative_entropy(rho, sigma, opts.tol_rank)?),
        ),
        WhichDivergence::D2 => (
            "d2",
            String::new(),
            fmt_div(collision_divergence(
                rho.matrix(),
                sigma.matrix(),
                opts.tol_rank,
            )?),
        ),
        WhichDivergence::V => (
            "v",
            String::new(),
            fmt(info_variance(rho, sigma, opts.tol_rank)?),
        ),
        WhichDivergence::Ds => {
            let eps =
                epsilon.ok_or_else(|| CliError::input("--epsilon is required for --which ds"))?;
            let query = opts.query(eps)?;
            (
                "ds",
                fmt(eps),
                fmt_div(info_spectrum(rho, sigma, &query, opts.tol_rank)?),
            )
        }
    };
    Ok(format!(
        "rho,sigma,which,epsilon,value\n{rho_name},{sigma_name},{label},{eps_cell},{value}\n"
    ))
}

// ---------------------------------------------------------------------------
// channel
// ---------------------------------------------------------------------------

fn parse_distribution(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::input(format!("bad probability '{t}': {e}")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_channel(
    file: &Path,
    channel_name: &str,
    input_dist: Option<&str>,
    m: usize,
    mode: RunMode,
    samples: usize,
    epsilon: Option<f64>,
    delta: Option<f64>,
    opts: &GlobalOpts,
) -> Result<String, CliError> {
    let ws = load(file)?;
    let channel = ws.channel(channel_name)?;
    let p = match input_dist {
        Some(text) => parse_distribution(text)?,
        None => vec![1.0 / channel.alphabet_size() as f64; channel.alphabet_size()],
    };
    let bound = pgm_success_lower_bound(channel, &p, m, opts.tol_rank)?;
    let experiment = CodingExperiment {
        channel: channel.clone(),
        input_dist: p.clone(),
        message_count: m,
        mode: match mode {
            RunMode::Exact => ExperimentMode::Exact,
            RunMode::Mc => ExperimentMode::MonteCarlo { samples },
        },
        seed: opts.seed,
        threads: opts.threads,
    };
    let (mean, stderr) = match mode {
        RunMode::Exact => (expected_success_exact(&experiment, opts.tol_rank)?, 0.0),
        RunMode::Mc => expected_success_mc(&experiment, opts.tol_rank)?,
    };
    let achievable_m = match (epsilon, delta) {
        (Some(e), Some(d)) => {
            achievable_message_count(channel, &p, e, d, opts.tol_rank)?.to_string()
        }
        (None, None) => String::new(),
        _ => {
            return Err(CliError::input(
                "--epsilon and --delta must be given together",
            ))
        }
    };
    Ok(format!(
        "m,bound,exact_or_mc_mean,stderr,achievable_m,seed\n{m},{},{},{},{achievable_m},{}\n",
        fmt(bound),
        fmt(mean),
        fmt(stderr),
        opts.seed
    ))
}

// ---------------------------------------------------------------------------
// hyptest
// ---------------------------------------------------------------------------

pub fn cmd_hyptest(
    file: &Path,
    rho_name: &str,
    sigma_name: &str,
    epsilon: f64,
    opts: &GlobalOpts,
) -> Result<String, CliError> {
    let ws = load(file)?;
    let rho = ws.density(rho_name)?;
    let sigma = ws.density(sigma_name)?;
    let query = opts.query(epsilon)?;
    let header =
        "rho,sigma,epsilon,m,type_i_bound,type_ii_bound,type_i,type_ii,completeness_error\n";
    let row = match oneshot_ht_bound(rho, sigma, &query, opts.tol_rank)? {
        OneShotHtBound::Standard {
            trade_off,
            type_i_bound,
            type_ii_bound,
            type_i,
            type_ii,
        } => {
            let inst = HypothesisInstance::new(rho.clone(), sigma.clone(), trade_off)?;
            let povm = build_ht_povm(&inst, opts.tol_rank)?;
            let report = qitlab::states::validate_povm(&povm)?;
            format!(
                "{rho_name},{sigma_name},{},{},{},{},{},{},{}\n",
                fmt(epsilon),
                fmt(trade_off),
                fmt(type_i_bound),
                fmt(type_ii_bound),
                fmt(type_i),
                fmt(type_ii),
                fmt(report.completeness_error),
            )
        }
        OneShotHtBound::PerfectDiscrimination { type_i, type_ii } => format!(
            "{rho_name},{sigma_name},{},inf,{},{},{},{},{}\n",
            fmt(epsilon),
            fmt(2.0 * epsilon),
            fmt(0.0),
            fmt(type_i),
            fmt(type_ii),
            fmt(0.0),
        ),
    };
    Ok(format!("{header}{row}"))
}

// ---------------------------------------------------------------------------
// sw
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
pub fn cmd_sw(
    file: &Path,
    source_name: &str,
    m: Option<usize>,
    epsilon: Option<f64>,
    delta: Option<f64>,
    mode: RunMode,
    samples: usize,
    opts: &GlobalOpts,
) -> Result<String, CliError> {
    let ws = load(file)?;
    let source = ws.cq_state(source_name)?;
    let bin_count = match (m, epsilon, delta) {
        (Some(m), _, _) => m,
        (None, Some(e), Some(d)) => {
            let needed = sw_message_count(source, e, d, opts.tol_rank)?;
            usize::try_from(needed)
                .map_err(|_| CliError::input("required bin count does not fit in usize"))?
        }
        _ => {
            return Err(CliError::input(
                "provide --m, or both --epsilon and --delta",
            ))
        }
    };
    let query = opts.query(epsilon.unwrap_or(0.5))?;
    let bound = sw_success_lower_bound(source, bin_count, &query, opts.tol_rank)?;
    let relaxed = match epsilon {
        Some(e) => fmt(bound.relaxed(e)?),
        None => String::new(),
    };
    let experiment = SwExperiment {
        source: source.clone(),
        bin_count,
        mode: match mode {
            RunMode::Exact => SwMode::Exact,
            RunMode::Mc => SwMode::MonteCarlo { samples },
        },
        seed: opts.seed,
        threads: opts.threads,
    };
    let (mean, stderr) = match mode {
        RunMode::Exact => (sw_expected_success_exact(&experiment, opts.tol_rank)?, 0.0),
        RunMode::Mc => sw_expected_success_mc(&experiment, opts.tol_rank)?,
    };
    Ok(format!(
        "source,m,tight_bound,relaxed_bound,exact_or_mc_mean,stderr,seed\n{source_name},{bin_count},{},{relaxed},{},{},{}\n",
        fmt(bound.tight),
        fmt(mean),
        fmt(stderr),
        opts.seed
    ))
}

// ---------------------------------------------------------------------------
// second-order
// ---------------------------------------------------------------------------

type ClassicalPair = Option<(Vec<f64>, Vec<f64>)>;

/// If the two states commute (within tolerance), return their joint
/// classical distributions in a common eigenbasis.
fn commuting_distributions(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<ClassicalPair, CliError> {
    let a = rho.matrix().as_matrix();
    let b = sigma.matrix().as_matrix();
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    let comm = ab.sub(&ba)?.frobenius_norm();
    if comm > 1e-10 {
        return Ok(None);
    }
    // Commuting states share an eigenbasis; a generic mixture exposes it
    // even through degeneracies.
    let mix = rho
        .matrix()
        .add(&sigma.matrix().scale(std::f64::consts::E))?;
    let eig = eig_hermitian(&mix)?;
    let n = rho.dim();
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for k in 0..n {
        let column: Vec<_> = (0..n).map(|i| eig.eigenvectors.get(i, k)).collect();
        let expect = |m: &qitlab::matcore::HermitianMatrix| -> f64 {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += (column[i].conj() * m.get(i, j) * column[j]).re;
                }
            }
            acc.max(0.0)
        };
        p.push(expect(rho.matrix()));
        q.push(expect(sigma.matrix()));
    }
    let ps: f64 = p.iter().sum();
    let qs: f64 = q.iter().sum();
    for v in &mut p {
        *v /= ps;
    }
    for v in &mut q {
        *v /= qs;
    }
    Ok(Some((p, q)))
}

pub fn cmd_second_order(
    file: &Path,
    rho_name: &str,
    sigma_name: &str,
    epsilon: f64,
    n_list: &str,
    opts: &GlobalOpts,
) -> Result<String, CliError> {
    let ws = load(file)?;
    let rho = ws.density(rho_name)?;
    let sigma = ws.density(sigma_name)?;
    let ns: Vec<u64> = n_list
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| CliError::input(format!("bad copy count '{t}': {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = relative_entropy(rho, sigma, opts.tol_rank)?
        .finite_or("second-order estimate")
        .map_err(|e| CliError::input(e.to_string()))?;
    let v = info_variance(rho, sigma, opts.tol_rank)?;
    let classical = commuting_distributions(rho, sigma)?;

    let mut out = String::from("n,estimate,exact,residual\n");
    for &n in &ns {
        let estimate = second_order_estimate(d, v, n, epsilon)?;
        let (exact_cell, residual_cell) = match &classical {
            Some((p, q)) => {
                let exact = iid_spectrum_classical(p, q, n, epsilon)?
                    .finite_or("classical spectrum")
                    .map_err(|e| CliError::input(e.to_string()))?;
                (fmt(exact), fmt(exact - estimate))
            }
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{n},{},{exact_cell},{residual_cell}\n",
            fmt(estimate)
        ));
    }
    Ok(out)
}
