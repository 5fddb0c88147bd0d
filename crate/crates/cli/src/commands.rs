use std::f64::consts::FRAC_1_SQRT_2;

use qmod_core::hilbert::BORN_TOLERANCE;
use qmod_core::{
    build_quantum_state, canonical_determinant, interference_closed_form, interference_direct,
    lookup_table, replaced_determinant, segment_length_check, simulate, state_vector, superpose,
    verify_representation, volume_ratio, EntityModel, HilbertError, InterferenceReport,
    MeasurementSpec, MixtureComparison, ProbabilityVector, SimulationConfig, SimulationError,
    SpectralFamily, SuperpositionCoefficients,
};

use crate::error::CliError;
use crate::record::OutputRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandSpec {
    pub measurement: String,
    pub state: String,
    pub kind: CommandKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandKind {
    Geometry,
    Simulate {
        trials: u64,
        seed: u64,
        streams: usize,
    },
    Quantum,
    Interfere(InterfereArgs),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfereArgs {
    /// Second state; the first state is reused when absent.
    pub state_b: Option<String>,
    pub amp_a: f64,
    pub amp_b: f64,
    pub phase_a: f64,
    pub phase_b: f64,
    pub renormalize: bool,
}

impl Default for InterfereArgs {
    fn default() -> Self {
        Self {
            state_b: None,
            amp_a: FRAC_1_SQRT_2,
            amp_b: FRAC_1_SQRT_2,
            phase_a: 0.0,
            phase_b: 0.0,
            renormalize: false,
        }
    }
}

struct Context<'a> {
    measurement: &'a MeasurementSpec,
    mu: ProbabilityVector,
    phases: Vec<f64>,
    family: SpectralFamily,
}

fn context<'a>(
    model: &'a EntityModel,
    measurement_id: &str,
    state_id: &str,
) -> Result<Context<'a>, CliError> {
    let measurement = model
        .measurement(measurement_id)
        .map_err(CliError::command)?;
    model.state(state_id).map_err(CliError::command)?;
    let table = lookup_table(model, measurement_id, state_id).map_err(CliError::command)?;
    let mu = table.distribution().map_err(CliError::command)?;
    let blocks = model
        .block_sizes(measurement_id)
        .expect("measurement exists");
    let family =
        SpectralFamily::new(measurement.outcome_count(), blocks).map_err(CliError::command)?;
    Ok(Context {
        measurement,
        mu,
        phases: table.phases_or_zero(family.dimension()),
        family,
    })
}

/// Runs one command against a validated model.
pub fn execute_command(model: &EntityModel, spec: &CommandSpec) -> Result<OutputRecord, CliError> {
    let ctx = context(model, &spec.measurement, &spec.state)?;
    let name = match spec.kind {
        CommandKind::Geometry => "geometry",
        CommandKind::Simulate { .. } => "simulate",
        CommandKind::Quantum => "quantum",
        CommandKind::Interfere(_) => "interfere",
    };
    let mut out = OutputRecord::new(name);
    out.push("entity", model.entity_id.as_str());
    out.push("measurement", spec.measurement.as_str());
    out.push("state", spec.state.as_str());
    out.push("n", ctx.measurement.outcome_count());

    match &spec.kind {
        CommandKind::Geometry => geometry(&ctx, &mut out)?,
        CommandKind::Simulate {
            trials,
            seed,
            streams,
        } => simulation(&ctx, *trials, *seed, *streams, &mut out)?,
        CommandKind::Quantum => quantum(&ctx, &mut out)?,
        CommandKind::Interfere(args) => interfere(model, spec, &ctx, args, &mut out)?,
    }
    Ok(out)
}

fn geometry(ctx: &Context, out: &mut OutputRecord) -> Result<(), CliError> {
    let outcomes = &ctx.measurement.outcomes;
    let v = state_vector(&ctx.mu);
    for (label, x) in outcomes.iter().zip(v.coords()) {
        out.push(format!("v.{label}"), *x);
    }
    out.push("canonical_determinant", canonical_determinant(ctx.mu.len()));
    let mut total = 0.0;
    for (j, label) in outcomes.iter().enumerate() {
        let det = replaced_determinant(&ctx.mu, j).map_err(CliError::command)?;
        out.push(format!("replaced_determinant.{label}"), det);
    }
    for (j, label) in outcomes.iter().enumerate() {
        let ratio = volume_ratio(&ctx.mu, j).map_err(CliError::command)?;
        if (ratio - ctx.mu[j]).abs() > 1e-12 {
            return Err(CliError::Invariant(format!(
                "volume ratio {ratio} for '{label}' differs from mu {}",
                ctx.mu[j]
            )));
        }
        total += ratio;
        out.push(format!("volume_ratio.{label}"), ratio);
    }
    out.push("volume_ratio_sum", total);
    if ctx.mu.len() == 2 {
        let d = segment_length_check(&ctx.mu).map_err(CliError::command)?;
        out.push("segment_length", d);
        out.push("segment_length_over_sqrt2", d / std::f64::consts::SQRT_2);
    }
    Ok(())
}

fn simulation(
    ctx: &Context,
    trials: u64,
    seed: u64,
    streams: usize,
    out: &mut OutputRecord,
) -> Result<(), CliError> {
    out.push("seed", seed);
    out.push("trials", trials);
    out.push("streams", streams);
    let config = SimulationConfig::new(trials, seed, streams).map_err(CliError::command)?;
    let report = simulate(&ctx.mu, &config).map_err(|e| match e {
        SimulationError::MergeMismatch { .. } => CliError::Invariant(e.to_string()),
        other => CliError::command(other),
    })?;
    let within = report.within_three_sigma();
    let deviations = report.deviations();
    for (j, label) in ctx.measurement.outcomes.iter().enumerate() {
        out.push(format!("count.{label}"), report.counts[j]);
        out.push(format!("frequency.{label}"), report.frequencies[j]);
        out.push(format!("mu.{label}"), ctx.mu[j]);
        out.push(format!("deviation.{label}"), deviations[j]);
        out.push(format!("three_sigma.{label}"), report.three_sigma[j]);
        out.push(format!("within_three_sigma.{label}"), within[j]);
    }
    out.push("boundary_resamples", report.boundary_resamples);
    Ok(())
}

fn push_family(family: &SpectralFamily, outcomes: &[String], out: &mut OutputRecord) {
    out.push("m", family.dimension());
    for (label, b) in outcomes.iter().zip(family.block_sizes()) {
        out.push(format!("block_size.{label}"), *b);
    }
}

fn quantum(ctx: &Context, out: &mut OutputRecord) -> Result<(), CliError> {
    let outcomes = &ctx.measurement.outcomes;
    push_family(&ctx.family, outcomes, out);
    let report =
        verify_representation(&ctx.mu, &ctx.phases, &ctx.family).map_err(CliError::command)?;
    for (slot, a) in report.state.amplitudes().iter().enumerate() {
        let k = ctx.family.block_of(slot).expect("slot in range");
        out.push(format!("slot.{}.outcome", slot + 1), outcomes[k].as_str());
        out.push(format!("slot.{}.modulus", slot + 1), a.modulus);
        out.push(format!("slot.{}.phase", slot + 1), a.phase);
    }
    for (k, label) in outcomes.iter().enumerate() {
        out.push(format!("mu.{label}"), report.target[k]);
        out.push(format!("born.{label}"), report.born[k]);
    }
    out.push("norm_sq", report.state.norm_sq());
    out.push("max_deviation", report.max_deviation);
    out.push("passed", report.passed);
    if !report.passed {
        return Err(CliError::Invariant(format!(
            "Born probabilities deviate from mu by {} (tolerance {BORN_TOLERANCE})",
            report.max_deviation
        )));
    }
    Ok(())
}

fn interfere(
    model: &EntityModel,
    spec: &CommandSpec,
    ctx: &Context,
    args: &InterfereArgs,
    out: &mut OutputRecord,
) -> Result<(), CliError> {
    let outcomes = &ctx.measurement.outcomes;
    let state_b = args.state_b.as_deref().unwrap_or(&spec.state);
    let other = context(model, &spec.measurement, state_b)?;
    if other.phases.len() != ctx.phases.len() {
        return Err(CliError::Command(format!(
            "states '{}' and '{state_b}' have Hilbert dimensions {} and {}",
            spec.state,
            ctx.phases.len(),
            other.phases.len()
        )));
    }
    let coeff = SuperpositionCoefficients::new(args.amp_a, args.amp_b, args.phase_a, args.phase_b)
        .map_err(CliError::command)?;

    out.push("state_b", state_b);
    out.push("amp_a", coeff.a);
    out.push("amp_b", coeff.b);
    out.push("phase_a", coeff.alpha);
    out.push("phase_b", coeff.beta);
    out.push("renormalize", args.renormalize);
    push_family(&ctx.family, outcomes, out);

    let w_p = build_quantum_state(&ctx.mu, &ctx.phases, &ctx.family).map_err(CliError::command)?;
    let w_q =
        build_quantum_state(&other.mu, &other.phases, &ctx.family).map_err(CliError::command)?;
    let direct = interference_direct(&w_p, &w_q, &ctx.family, &coeff).map_err(CliError::command)?;

    let report: InterferenceReport = if ctx.family.is_singleton() {
        let closed =
            interference_closed_form(&ctx.mu, &other.mu, &ctx.phases, &other.phases, &coeff)
                .map_err(CliError::command)?;
        let worst = closed
            .outcomes
            .iter()
            .zip(&direct.outcomes)
            .map(|(c, d)| (c.p_r - d.p_r).abs())
            .fold(0.0, f64::max);
        if worst > 1e-12 {
            return Err(CliError::Invariant(format!(
                "closed-form and direct interference differ by {worst}"
            )));
        }
        out.push("method", "closed_form");
        closed
    } else {
        out.push("method", "direct");
        direct
    };
    let comparison = MixtureComparison::from_report(&report);

    for (k, label) in outcomes.iter().enumerate() {
        let o = &report.outcomes[k];
        out.push(format!("p_r.{label}"), o.p_r);
        out.push(format!("mixture.{label}"), o.mixture);
        out.push(format!("interference_term.{label}"), o.interference_term);
        out.push(format!("gap.{label}"), comparison.gap[k]);
    }
    out.push("total_pr", report.total_pr);
    out.push("normalized", report.normalized);
    out.push("on_segment", comparison.on_segment);

    match superpose(&w_p, &w_q, &coeff, args.renormalize) {
        Ok(sup) => {
            out.push("degenerate", false);
            out.push("norm_sq", sup.norm_sq);
            if (sup.norm_sq - report.total_pr).abs() > 1e-12 {
                return Err(CliError::Invariant(format!(
                    "sum of p_r {} differs from squared norm {}",
                    report.total_pr, sup.norm_sq
                )));
            }
            for (slot, a) in sup.state.amplitudes().iter().enumerate() {
                out.push(format!("w_r.{}.modulus", slot + 1), a.modulus);
                out.push(format!("w_r.{}.phase", slot + 1), a.phase);
            }
            if args.renormalize {
                for (k, label) in outcomes.iter().enumerate() {
                    out.push(
                        format!("p_r_renormalized.{label}"),
                        report.outcomes[k].p_r / sup.norm_sq,
                    );
                }
            }
        }
        Err(HilbertError::Degenerate) => {
            if args.renormalize {
                return Err(CliError::Command(
                    "superposition cancels to the zero vector; cannot renormalize".into(),
                ));
            }
            out.push("degenerate", true);
            out.push("norm_sq", 0.0);
        }
        Err(e) => return Err(CliError::command(e)),
    }
    Ok(())
}
