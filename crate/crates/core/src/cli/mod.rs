//! `isophonon` command-line front end.
//!
//! Results go to the output stream, diagnostics to the error stream.
//! Exit status is 0 on success, 1 on domain or validation errors and 2 on
//! usage errors.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, FitError, Result};
use crate::kinetics::{self, DEFAULT_NR_RATIO};
use crate::mode_model::dataset::{MODE_RECORDS, REFERENCE_RECORDS};
use crate::rate_engine::{self, SweepParameter};
use crate::transient::{self, FitWindow, TransientHistogram, TransientParams};

pub use config::{parse_defect_config, reference_config_document, serialize_defect_config};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "isophonon",
    version,
    about = "Multiphonon nonradiative rates and colour-centre emitter kinetics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nonradiative rate of one mode and its term table
    Rate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mode: String,
    },
    /// Rate over a uniform grid of one parameter, as CSV
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        mode: String,
        /// zpl_energy, displacement, coupling or energy_ground (config key names also accepted)
        #[arg(long, value_parser = parse_sweep_key)]
        vary: SweepParameter,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
    },
    /// Radiative rate and efficiencies from two isotopic lifetimes
    Kinetics {
        /// Lifetime of the variant with the larger nonradiative rate, µs
        #[arg(long)]
        tau_a: f64,
        /// Lifetime of the other variant, µs
        #[arg(long)]
        tau_b: f64,
        /// Nonradiative rate ratio a/b
        #[arg(long, default_value_t = DEFAULT_NR_RATIO)]
        nr_ratio: f64,
        /// Report ZPL emission fractions with this Debye-Waller factor
        #[arg(long)]
        debye_waller: Option<f64>,
    },
    /// Optical cycles before a spin flip under Purcell enhancement
    Cyclicity {
        #[arg(long, allow_negative_numbers = true)]
        eta0: f64,
        #[arg(long, allow_negative_numbers = true)]
        purcell: f64,
    },
    /// Single-exponential lifetime fit of a `t_us,counts` histogram
    Fit {
        #[arg(long)]
        histogram: PathBuf,
        /// Fit window START,END in µs
        #[arg(long, value_parser = parse_window)]
        window: Option<FitWindow>,
    },
    /// Poisson-sampled decay histogram
    Simulate {
        /// Lifetime, µs
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        /// Expected signal counts per bin at t = 0
        #[arg(long, allow_negative_numbers = true)]
        amplitude: f64,
        /// Expected background counts per bin
        #[arg(long, allow_negative_numbers = true)]
        background: f64,
        #[arg(long)]
        bins: usize,
        /// Histogram span, µs
        #[arg(long, allow_negative_numbers = true)]
        tmax: f64,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embedded reference data
    Dataset {
        #[arg(long, value_enum, default_value_t = DatasetFormat::Csv)]
        format: DatasetFormat,
        /// Table printed by the csv format
        #[arg(long, value_enum, default_value_t = DatasetTable::Lifetimes)]
        table: DatasetTable,
        /// Variant emitted by the config format
        #[arg(long, default_value = "natural")]
        variant: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DatasetFormat {
    Csv,
    Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DatasetTable {
    Lifetimes,
    Modes,
}

fn parse_sweep_key(key: &str) -> std::result::Result<SweepParameter, String> {
    match key {
        "zpl_energy" | "zpl_energy_mev" => Ok(SweepParameter::ZplEnergy),
        "displacement" | "delta_q" => Ok(SweepParameter::Displacement),
        "coupling" | "w_eg" => Ok(SweepParameter::Coupling),
        "energy_ground" | "hbar_omega_g_mev" => Ok(SweepParameter::EnergyGround),
        _ => Err(format!(
            "unknown sweep key `{key}` (expected zpl_energy, displacement, coupling or energy_ground)"
        )),
    }
}

fn parse_window(text: &str) -> std::result::Result<FitWindow, String> {
    let (a, b) = text.split_once(',').ok_or("expected START,END")?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    FitWindow::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

/// Shortest round-trip decimal, switching to exponent form for very large
/// or small magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

struct Failure(Error);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self(Error::Histogram(format!("write failed: {e}")))
    }
}

/// Runs one command. Output is buffered so that a failing command leaves
/// the output stream untouched.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };

    let mut buffer = Vec::new();
    match execute(cli.command, &mut buffer, err) {
        Ok(()) => match out.write_all(&buffer).and_then(|_| out.flush()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_FAILURE
            }
        },
        Err(Failure(e)) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::Fit(FitError::NotConverged { trace }) = &e {
                let _ = writeln!(
                    err,
                    "iteration,amplitude,lifetime_us,background,deviance,damping,relative_step"
                );
                for r in trace {
                    let _ = writeln!(
                        err,
                        "{},{},{},{},{},{},{}",
                        r.iteration,
                        format_number(r.amplitude),
                        format_number(r.lifetime),
                        format_number(r.background),
                        format_number(r.deviance),
                        format_number(r.damping),
                        format_number(r.relative_step)
                    );
                }
            }
            EXIT_FAILURE
        }
    }
}

fn read_config(path: &PathBuf) -> Result<crate::mode_model::DefectConfiguration> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::error::domain(format!("cannot read {}: {e}", path.display())))?;
    parse_defect_config(&text)
}

fn execute(
    command: Command,
    out: &mut Vec<u8>,
    err: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let f = format_number;
    match command {
        Command::Rate { config, mode } => {
            let config = read_config(&config)?;
            let result = rate_engine::nonradiative_rate(&config, &mode)?;
            writeln!(out, "variant: {}", config.variant_label)?;
            writeln!(out, "mode: {mode}")?;
            writeln!(out, "rate_per_s: {}", f(result.total_rate))?;
            writeln!(out, "sigma_meV: {}", f(result.sigma))?;
            writeln!(out, "n_max: {}", result.n_max_used)?;
            writeln!(out)?;
            writeln!(out, "n,moment_sq,delta_weight_per_meV,contribution_per_s")?;
            for t in &result.terms {
                writeln!(
                    out,
                    "{},{},{},{}",
                    t.n,
                    f(t.moment_sq),
                    f(t.delta_weight),
                    f(t.contribution)
                )?;
            }
        }
        Command::Sweep {
            config,
            mode,
            vary,
            from,
            to,
            steps,
        } => {
            let config = read_config(&config)?;
            config.mode(&mode)?;
            if !(from.is_finite() && to.is_finite()) {
                return Err(crate::error::domain("sweep bounds must be finite").into());
            }
            let steps = steps as usize;
            let grid: Vec<f64> = (0..steps)
                .map(|i| {
                    if steps == 1 {
                        from
                    } else {
                        from + (to - from) * i as f64 / (steps - 1) as f64
                    }
                })
                .collect();
            writeln!(out, "parameter,value,rate_per_s,n_max,sigma_meV")?;
            for row in rate_engine::rate_sweep(&config, &mode, vary, &grid) {
                match row.outcome {
                    Ok(r) => writeln!(
                        out,
                        "{},{},{},{},{}",
                        vary.name(),
                        f(row.value),
                        f(r.total_rate),
                        r.n_max_used,
                        f(r.sigma)
                    )?,
                    Err(e) => {
                        writeln!(err, "warning: {} = {}: {e}", vary.name(), f(row.value))?;
                        writeln!(out, "{},{},NaN,,", vary.name(), f(row.value))?;
                    }
                }
            }
        }
        Command::Kinetics {
            tau_a,
            tau_b,
            nr_ratio,
            debye_waller,
        } => {
            let k = kinetics::infer_radiative_rate(tau_a * 1e-6, tau_b * 1e-6, nr_ratio)?;
            let zpl = debye_waller
                .map(|dw| -> Result<_> {
                    Ok((
                        dw,
                        kinetics::zpl_emission_fraction(k.efficiency_a, dw)?,
                        kinetics::zpl_emission_fraction(k.efficiency_b, dw)?,
                    ))
                })
                .transpose()?;
            writeln!(out, "radiative_lifetime_us: {}", f(k.radiative_lifetime))?;
            writeln!(out, "radiative_rate_per_s: {}", f(k.radiative_rate))?;
            writeln!(
                out,
                "nonradiative_rate_a_per_s: {}",
                f(k.nonradiative_rate_a)
            )?;
            writeln!(
                out,
                "nonradiative_rate_b_per_s: {}",
                f(k.nonradiative_rate_b)
            )?;
            writeln!(out, "efficiency_a: {}", f(k.efficiency_a))?;
            writeln!(out, "efficiency_b: {}", f(k.efficiency_b))?;
            writeln!(out, "efficiency_a_percent: {}", f(100.0 * k.efficiency_a))?;
            writeln!(out, "efficiency_b_percent: {}", f(100.0 * k.efficiency_b))?;
            if let Some((dw, za, zb)) = zpl {
                writeln!(out, "debye_waller: {}", f(dw))?;
                writeln!(out, "zpl_fraction_a: {}", f(za))?;
                writeln!(out, "zpl_fraction_b: {}", f(zb))?;
                writeln!(out, "zpl_fraction_a_percent: {}", f(100.0 * za))?;
                writeln!(out, "zpl_fraction_b_percent: {}", f(100.0 * zb))?;
            }
        }
        Command::Cyclicity { eta0, purcell } => {
            let eta = kinetics::purcell_radiative_efficiency(eta0, purcell)?;
            let cycles = kinetics::cyclicity(eta0, purcell)?;
            writeln!(out, "radiative_efficiency: {}", f(eta))?;
            writeln!(out, "cyclicity: {}", f(cycles))?;
        }
        Command::Fit { histogram, window } => {
            let hist = TransientHistogram::read_csv_path(&histogram)?;
            let fit = transient::fit_lifetime(&hist, window)?;
            writeln!(out, "lifetime_us: {}", f(fit.lifetime))?;
            writeln!(
                out,
                "lifetime_uncertainty_us: {}",
                f(fit.lifetime_uncertainty)
            )?;
            writeln!(out, "amplitude_counts: {}", f(fit.amplitude))?;
            writeln!(
                out,
                "amplitude_uncertainty_counts: {}",
                f(fit.amplitude_uncertainty)
            )?;
            writeln!(out, "background_counts_per_bin: {}", f(fit.background))?;
            writeln!(
                out,
                "background_uncertainty_counts_per_bin: {}",
                f(fit.background_uncertainty)
            )?;
            writeln!(out, "reduced_chi_square: {}", f(fit.fit_quality))?;
            writeln!(out, "deviance: {}", f(fit.deviance))?;
            writeln!(out, "bins_used: {}", fit.bins_used)?;
            writeln!(out, "iterations: {}", fit.iterations)?;
        }
        Command::Simulate {
            tau,
            amplitude,
            background,
            bins,
            tmax,
            seed,
            out: path,
        } => {
            let params = TransientParams {
                lifetime: tau,
                amplitude,
                background,
            };
            let hist = transient::simulate_transient(params, bins, tmax, seed)?;
            match path {
                Some(path) => hist.write_csv_path(path)?,
                None => hist.write_csv(&mut *out)?,
            }
        }
        Command::Dataset {
            format,
            table,
            variant,
        } => match format {
            DatasetFormat::Config => {
                writeln!(out, "{}", reference_config_document(&variant)?)?;
            }
            DatasetFormat::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                let csv_err = |e: csv::Error| Error::Histogram(e.to_string());
                match table {
                    DatasetTable::Lifetimes => {
                        w.write_record([
                            "variant",
                            "structure",
                            "zpl_shift_ueV",
                            "lifetime_us",
                            "lifetime_uncertainty_us",
                        ])
                        .map_err(csv_err)?;
                        for r in &REFERENCE_RECORDS {
                            let structure = r.structure.to_string();
                            w.write_record([
                                r.name,
                                &structure,
                                r.zpl_shift_uev.unwrap_or(""),
                                r.lifetime_us,
                                r.lifetime_uncertainty_us,
                            ])
                            .map_err(csv_err)?;
                        }
                    }
                    DatasetTable::Modes => {
                        w.write_record([
                            "variant",
                            "mode",
                            "delta_q",
                            "hbar_omega_g_meV",
                            "hbar_omega_e_meV",
                            "w_eg",
                        ])
                        .map_err(csv_err)?;
                        for r in &MODE_RECORDS {
                            w.write_record([
                                r.variant,
                                r.mode,
                                r.delta_q,
                                r.hbar_omega_g_mev,
                                r.hbar_omega_e_mev,
                                r.w_eg,
                            ])
                            .map_err(csv_err)?;
                        }
                    }
                }
                w.flush()?;
            }
        },
    }
    Ok(())
}
