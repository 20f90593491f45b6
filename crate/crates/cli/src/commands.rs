//! One function per subcommand. Each fills the defaults it uses into the
//! config so the emitted copy is the resolved one.

use cyclicity_core::capacity::{
    box_dimension, default_zero_tol, obstruction_report, paper_capacity, riesz_equilibrium, sample_zero_set,
    BoundaryCloud, ObstructionParams,
};
use cyclicity_core::cyclicity::{
    check_perturbation_bound, check_weight_stability, fmt_float, index_sweep, multiplier_norm_lower,
    perturb_weights, subspace_distance, DEFAULT_CYCLIC_TOL,
};
use cyclicity_core::freespace::{
    compression_check, corona_check, free_subspace_distance, CoronaParams, FreePolynomial, FreeSpaceSpec,
};
use cyclicity_core::mixednorm::{
    luxemburg_norm, mixed_index, mixed_norm_estimate, modular, IndexNorm, MixedIndexResult,
};
use cyclicity_core::{Polynomial, SpaceSpec};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, PerturbVariant};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Index,
    Sweep,
    FreeIndex,
    CompressCheck,
    CoronaCheck,
    Capacity,
    Dimension,
    Perturb,
    MixedNorm,
    VarexpNorm,
    MixedIndex,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Index => "index",
            Command::Sweep => "sweep",
            Command::FreeIndex => "free-index",
            Command::CompressCheck => "compress-check",
            Command::CoronaCheck => "corona-check",
            Command::Capacity => "capacity",
            Command::Dimension => "dimension",
            Command::Perturb => "perturb",
            Command::MixedNorm => "mixed-norm",
            Command::VarexpNorm => "varexp-norm",
            Command::MixedIndex => "mixed-index",
            Command::Report => "report",
        }
    }
}

pub struct Output {
    pub result: Value,
    pub csv: Option<String>,
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Validation(format!("cannot serialize result: {e}")))
}

pub fn run(cmd: Command, cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    match cmd {
        Command::Index => index(cfg),
        Command::Sweep => sweep(cfg),
        Command::FreeIndex => free_index(cfg),
        Command::CompressCheck => compress(cfg),
        Command::CoronaCheck => corona(cfg),
        Command::Capacity => capacity(cfg),
        Command::Dimension => dimension(cfg),
        Command::Perturb => perturb(cfg),
        Command::MixedNorm => mixed_norm_cmd(cfg),
        Command::VarexpNorm => varexp_norm(cfg),
        Command::MixedIndex => mixed_index_cmd(cfg),
        Command::Report => report(cfg),
    }
}

fn index(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let spec = cfg.space()?.clone();
    let f = cfg.function()?;
    let g = match &cfg.target {
        Some(t) => t.build(spec.d())?,
        None => Polynomial::one(spec.d()),
    };
    let n = *cfg.n.get_or_insert(10);
    let r = subspace_distance(&spec, &g, &f, n)?;
    Ok(Output {
        result: to_value(&r)?,
        csv: None,
    })
}

fn sweep(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let spec = cfg.space()?.clone();
    let f = cfg.function()?;
    let n_max = *cfg.n_max.get_or_insert(20);
    let tol = *cfg.tol.get_or_insert(DEFAULT_CYCLIC_TOL);
    let r = index_sweep(&spec, &f, n_max, tol)?;
    Ok(Output {
        result: to_value(&r)?,
        csv: Some(r.to_csv()),
    })
}

fn free_parts(cfg: &ExperimentConfig) -> Result<(FreeSpaceSpec, FreePolynomial), CliError> {
    let spec = ExperimentConfig::require(&cfg.free_space, "freeSpace")?.clone();
    let big_g = ExperimentConfig::require(&cfg.free_function, "freeFunction")?.clone();
    if big_g.dim() > spec.d() {
        return Err(CliError::Validation(format!(
            "freeFunction uses letters beyond d = {}",
            spec.d()
        )));
    }
    // bare-array polynomials infer d from their largest letter
    let big_g = FreePolynomial::from_terms(spec.d(), big_g.terms().map(|(w, c)| (w.clone(), *c)))?;
    Ok((spec, big_g))
}

fn free_index(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let (spec, big_g) = free_parts(cfg)?;
    let target = match &cfg.free_target {
        Some(t) => FreePolynomial::from_terms(spec.d(), t.terms().map(|(w, c)| (w.clone(), *c)))?,
        None => FreePolynomial::identity(spec.d()),
    };
    let n = *cfg.n.get_or_insert(3);
    let r = free_subspace_distance(&spec, &target, &big_g, n)?;
    Ok(Output {
        result: to_value(&r)?,
        csv: None,
    })
}

fn compress(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let (free, big_g) = free_parts(cfg)?;
    if cfg.space.is_none() {
        cfg.space = Some(SpaceSpec::drury_arveson(free.d(), 20)?);
    }
    let comm = cfg.space()?.clone();
    let n = *cfg.n.get_or_insert(6);
    let r = compression_check(&free, &comm, &big_g, n)?;
    Ok(Output {
        result: to_value(&r)?,
        csv: None,
    })
}

/// Commutative part: section norms of the truncated inverse series of `function`.
/// Free part: sampled hypothesis and inverse sections for `freeFunction`.
fn corona(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    if cfg.function.is_none() && cfg.free_function.is_none() {
        return Err(CliError::Validation("corona-check needs `function` or `freeFunction`".into()));
    }
    let max_length = *cfg.max_length.get_or_insert(8);
    let mut result = serde_json::Map::new();
    let mut csv = String::from("part,length,sectionNorm\n");
    if cfg.function.is_some() {
        let spec = cfg.space()?.clone();
        let psi = cfg.function()?;
        let section_n_in = *cfg.section_n_in.get_or_insert(10);
        let mut norms = Vec::new();
        for len in 0..=max_length {
            let theta = psi.invert_power_series(len)?;
            let b = multiplier_norm_lower(&spec, &theta, section_n_in)?;
            csv.push_str(&format!("commutative,{len},{}\n", fmt_float(b.lower_bound)));
            norms.push(b.lower_bound);
        }
        result.insert(
            "commutative".into(),
            json!({ "lengths": (0..=max_length).collect::<Vec<_>>(), "sectionNorms": norms, "sectionNIn": section_n_in }),
        );
    }
    if cfg.free_function.is_some() {
        let (spec, psi) = free_parts(cfg)?;
        let d = CoronaParams::default();
        let params = CoronaParams {
            rho: *cfg.rho.get_or_insert(d.rho),
            samples: *cfg.samples.get_or_insert(d.samples),
            matrix_size: *cfg.matrix_size.get_or_insert(d.matrix_size),
            seed: cfg.seed()?,
            max_length,
            section_n_in: *cfg.free_section_n_in.get_or_insert(d.section_n_in),
        };
        let r = corona_check(&spec, &psi, &params)?;
        for (len, v) in r.lengths.iter().zip(&r.inverse_section_norms) {
            csv.push_str(&format!("free,{len},{}\n", fmt_float(*v)));
        }
        result.insert("free".into(), to_value(&r)?);
    }
    Ok(Output {
        result: Value::Object(result),
        csv: Some(csv),
    })
}

/// The cloud from `cloud`, or sampled from `function`.
fn cloud(cfg: &mut ExperimentConfig) -> Result<BoundaryCloud, CliError> {
    if let Some(c) = &cfg.cloud {
        return Ok(c.clone());
    }
    let f = cfg.function()?;
    let d = f.dim();
    let resolution = *cfg.resolution.get_or_insert(if d == 1 { 4096 } else { 4000 });
    let tol = *cfg.zero_tol.get_or_insert(default_zero_tol(d));
    let seed = if d == 1 { cfg.seed.unwrap_or(0) } else { cfg.seed()? };
    Ok(sample_zero_set(&f, resolution, tol, seed)?)
}

fn capacity(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let cloud = cloud(cfg)?;
    let alpha = *cfg.alpha.get_or_insert(0.0);
    let max_iter = *cfg.max_iter.get_or_insert(200_000);
    let tol = *cfg.tol.get_or_insert(1e-8);
    let eps = *cfg.eps_nbhd.get_or_insert(0.01);
    if cloud.is_empty() {
        log::warn!("the boundary cloud is empty; capacity is 0");
    }
    let eq = riesz_equilibrium(&cloud, alpha, max_iter, tol)?;
    if eq.degenerate && !cloud.is_empty() {
        log::warn!("fewer than two distinct points; capacity is 0 by convention");
    }
    if !eq.converged {
        log::warn!("equilibrium solver stopped with KKT gap {}", eq.kkt_gap);
    }
    let paper = paper_capacity(&cloud, alpha, eps)?;
    Ok(Output {
        result: json!({
            "cloudSize": cloud.len(),
            "capacity": eq.capacity,
            "equilibrium": to_value(&eq)?,
            "paperCapacity": paper,
        }),
        csv: None,
    })
}

fn dimension(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let cloud = cloud(cfg)?;
    let j_min = *cfg.j_min.get_or_insert(2);
    let j_max = *cfg.j_max.get_or_insert(8);
    let b = box_dimension(&cloud, j_min, j_max)?;
    let mut csv = String::from("scale,count\n");
    for (j, c) in b.scales.iter().zip(&b.counts) {
        csv.push_str(&format!("{j},{c}\n"));
    }
    Ok(Output {
        result: json!({ "cloudSize": cloud.len(), "boxDimension": to_value(&b)? }),
        csv: Some(csv),
    })
}

fn perturb(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let spec = cfg.space()?.clone();
    let f = cfg.function()?;
    let n = *cfg.n.get_or_insert(10);
    let variant = *cfg.variant.get_or_insert(PerturbVariant::Function);
    let result = match variant {
        PerturbVariant::Function => {
            let g = ExperimentConfig::require(&cfg.g, "g")?.build(spec.d())?;
            to_value(&check_perturbation_bound(&spec, &f, &g, n)?)?
        }
        PerturbVariant::Weight => {
            let eps = *ExperimentConfig::require(&cfg.epsilon, "epsilon")?;
            let p = perturb_weights(&spec, eps, cfg.seed()?)?;
            let r = check_weight_stability(&spec, &p.spec, &f, n)?;
            json!({
                "requestedEpsilon": p.requested_epsilon,
                "realizedEpsilon": p.realized_epsilon,
                "stability": to_value(&r)?,
            })
        }
    };
    Ok(Output { result, csv: None })
}

fn mixed_spec(cfg: &ExperimentConfig) -> Result<cyclicity_core::mixednorm::MixedSpec, CliError> {
    let s = ExperimentConfig::require(&cfg.mixed, "mixed")?.clone();
    s.validate()?;
    Ok(s)
}

fn mixed_norm_cmd(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let spec = mixed_spec(cfg)?;
    cfg.d.get_or_insert(spec.d);
    let f = cfg.function()?;
    let e = mixed_norm_estimate(&spec, &f)?;
    Ok(Output {
        result: to_value(&e)?,
        csv: None,
    })
}

fn varexp_norm(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let spec = ExperimentConfig::require(&cfg.varexp, "varexp")?.clone();
    cfg.d.get_or_insert(spec.d);
    let f = cfg.function()?;
    let l = luxemburg_norm(&spec, &f)?;
    let m = if l > 0.0 { Some(modular(&spec, &f, l)?) } else { None };
    Ok(Output {
        result: json!({ "luxemburgNorm": l, "modularAtNorm": m }),
        csv: None,
    })
}

fn mixed_index_cmd(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let norm = match (&cfg.mixed, &cfg.varexp) {
        (Some(m), None) => IndexNorm::Mixed(m.clone()),
        (None, Some(v)) => IndexNorm::VarExp(v.clone()),
        _ => return Err(CliError::Validation("mixed-index needs exactly one of `mixed`, `varexp`".into())),
    };
    let d = match &norm {
        IndexNorm::Mixed(m) => m.d,
        IndexNorm::VarExp(v) => v.d,
    };
    cfg.d.get_or_insert(d);
    let f = cfg.function()?;
    let degrees: Vec<usize> = match (cfg.n, cfg.n_max) {
        (Some(n), None) => vec![n],
        (None, Some(m)) => (0..=m).collect(),
        (None, None) => {
            cfg.n = Some(5);
            vec![5]
        }
        (Some(_), Some(_)) => return Err(CliError::Validation("set either `n` or `nMax`, not both".into())),
    };
    let runs: Vec<MixedIndexResult> = degrees
        .iter()
        .map(|&n| mixed_index(&norm, &f, n))
        .collect::<Result<_, _>>()?;
    for r in runs.iter().filter(|r| !r.converged) {
        log::warn!("IRLS did not converge at n = {}", r.n);
    }
    let mut csv = String::from("n,objective,iterations,converged\n");
    for r in &runs {
        csv.push_str(&format!("{},{},{},{}\n", r.n, fmt_float(r.objective), r.iterations, r.converged));
    }
    Ok(Output {
        result: json!({ "runs": to_value(&runs)? }),
        csv: Some(csv),
    })
}

fn report(cfg: &mut ExperimentConfig) -> Result<Output, CliError> {
    let spec = cfg.space()?.clone();
    let f = cfg.function()?;
    let d = ObstructionParams::default();
    let resolution_default = if spec.d() == 1 { d.resolution } else { 4000 };
    let params = ObstructionParams {
        n_max: *cfg.n_max.get_or_insert(d.n_max),
        alpha: *cfg.alpha.get_or_insert(d.alpha),
        capacity_threshold: *cfg.capacity_threshold.get_or_insert(d.capacity_threshold),
        resolution: *cfg.resolution.get_or_insert(resolution_default),
        zero_tol: Some(*cfg.zero_tol.get_or_insert(default_zero_tol(spec.d()))),
        seed: if spec.d() == 1 { cfg.seed.unwrap_or(0) } else { cfg.seed()? },
        eps_nbhd: *cfg.eps_nbhd.get_or_insert(d.eps_nbhd),
        j_min: *cfg.j_min.get_or_insert(d.j_min),
        j_max: *cfg.j_max.get_or_insert(d.j_max),
        sweep_tol: *cfg.tol.get_or_insert(d.sweep_tol),
        max_iter: *cfg.max_iter.get_or_insert(d.max_iter),
        equilibrium_tol: d.equilibrium_tol,
    };
    let r = obstruction_report(&spec, &f, &params)?;
    Ok(Output {
        result: to_value(&r)?,
        csv: Some(r.sweep.to_csv()),
    })
}
