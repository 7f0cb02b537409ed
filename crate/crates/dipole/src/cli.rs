//! The `dipole` command line.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 when an input cannot be
//! read or parsed or the computation rejects it. Diagnostics go to standard
//! error; machine output goes to files or, for `compare`, standard output.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use dipole_core::analysis::{angular_agreement, angular_agreement_relative, gradient_field, perpendicular_field};
use dipole_core::render::{cell_dipoles, render_overlay, tone_map, LineLength, OverlayConfig, DEFAULT_ALPHA};
use dipole_core::segment::{domains_from_field, Connectivity, DomainParams, SignDomain};
use dipole_core::{magnitude_field, GrayImage, Threshold, VectorField, Window, AUTO_THRESHOLD_FRACTION};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::imgio::{self, ExportFormat, ParseError, VectorFieldJson};
use crate::parallel::dipole_field_par;

/// A threshold flag: a non-negative number or `auto` (5% of the peak).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tau {
    #[default]
    Auto,
    Value(f64),
}

impl Tau {
    fn threshold(self) -> Threshold {
        match self {
            Tau::Auto => Threshold::FractionOfMax(AUTO_THRESHOLD_FRACTION),
            Tau::Value(v) => Threshold::Absolute(v),
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            Tau::Auto => json!("auto"),
            Tau::Value(v) => json!(v),
        }
    }
}

impl FromStr for Tau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Tau::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Tau::Value(v)),
            _ => Err(format!("expected \"auto\" or a non-negative number, got {s:?}")),
        }
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Auto => f.write_str("auto"),
            Tau::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum LineMode {
    #[default]
    Fixed,
    Scaled,
}

fn parse_connectivity(s: &str) -> Result<Connectivity, String> {
    s.parse::<u8>()
        .ok()
        .and_then(|n| Connectivity::try_from(n).ok())
        .ok_or_else(|| format!("expected 4 or 8, got {s:?}"))
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a.is_finite() && a > 0.0 => Ok(a),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "dipole", version, about = "Local dipole-moment fields of grayscale images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gray-tone map of the dipole magnitude (PGM out).
    Magnitude {
        input: PathBuf,
        output: PathBuf,
        /// `2x2` or `r<di>x<dj>`.
        #[arg(long, default_value = "2x2")]
        window: Window,
        #[arg(long, default_value_t = DEFAULT_ALPHA, value_parser = parse_alpha)]
        alpha: f64,
    },
    /// Export the dipole vector field.
    Field {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value = "2x2")]
        window: Window,
        #[arg(long, value_enum, default_value_t)]
        format: ExportFormat,
    },
    /// One line per cell along its dipole, over the image (PPM out).
    Overlay {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
        cell_size: u64,
        /// Minimum cell dipole magnitude drawn, or `auto`.
        #[arg(long, default_value = "auto")]
        tau: Tau,
        #[arg(long, value_enum, default_value_t)]
        line_length: LineMode,
    },
    /// Threshold the magnitude and list the connected domains (JSON out).
    Segment {
        input: PathBuf,
        output: PathBuf,
        /// Magnitude threshold, or `auto`.
        #[arg(long, default_value = "auto")]
        tau: Tau,
        #[arg(long, default_value = "8", value_parser = parse_connectivity)]
        connectivity: Connectivity,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        min_pixels: u64,
        #[arg(long, default_value = "2x2")]
        window: Window,
        /// Also write each domain's dipole and perpendicular fields.
        #[arg(long)]
        fields: bool,
    },
    /// Export the quarter-turned dipole field.
    Perp {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value = "2x2")]
        window: Window,
        #[arg(long, value_enum, default_value_t)]
        format: ExportFormat,
    },
    /// Export the central-difference brightness gradient.
    Gradient {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: ExportFormat,
    },
    /// Angle statistics between dipole and gradient fields (JSON on stdout).
    Compare {
        input: PathBuf,
        #[arg(long, default_value = "2x2")]
        window: Window,
        /// Absolute magnitude gate for both fields, or `auto` for 5% of each
        /// field's own peak.
        #[arg(long, default_value = "auto")]
        tau: Tau,
    },
}

/// A failure after the arguments parsed.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Compute(#[from] dipole_core::Error),
}

fn read_image(path: &Path) -> Result<GrayImage, CliError> {
    let data = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    imgio::read_pgm(&data).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn vector_export(
    field: &VectorField,
    window: Option<Window>,
    format: ExportFormat,
    params: serde_json::Value,
) -> String {
    match format {
        ExportFormat::Json => {
            let mut doc = VectorFieldJson::new(field, window);
            if let serde_json::Value::Object(map) = params {
                doc.params = map;
            }
            serde_json::to_string(&doc).expect("finite field") + "\n"
        }
        ExportFormat::Csv => imgio::export_vector_field(field, window, format),
    }
}

#[derive(Serialize)]
struct BBox {
    min_x: usize,
    min_y: usize,
    max_x: usize,
    max_y: usize,
}

#[derive(Serialize)]
struct FieldPlanes<'a> {
    px: &'a [f64],
    py: &'a [f64],
}

#[derive(Serialize)]
struct DomainJson<'a> {
    label: u32,
    bbox: BBox,
    pixel_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mask: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dipoles: Option<FieldPlanes<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    perpendiculars: Option<FieldPlanes<'a>>,
}

impl<'a> DomainJson<'a> {
    fn new(d: &'a SignDomain, with_fields: bool) -> Self {
        let planes = |f: &'a VectorField| FieldPlanes {
            px: f.x_components(),
            py: f.y_components(),
        };
        DomainJson {
            label: d.label,
            bbox: BBox {
                min_x: d.bbox.x0,
                min_y: d.bbox.y0,
                max_x: d.bbox.x1,
                max_y: d.bbox.y1,
            },
            pixel_count: d.pixel_count,
            mask: with_fields.then(|| d.mask.bits().iter().map(|&b| b as u8).collect()),
            dipoles: with_fields.then(|| planes(&d.dipoles)),
            perpendiculars: with_fields.then(|| planes(&d.perpendiculars)),
        }
    }
}

/// Runs one parsed command.
pub fn execute(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Magnitude {
            input,
            output,
            window,
            alpha,
        } => {
            let img = read_image(input)?;
            let mag = magnitude_field(&dipole_field_par(&img, *window)?);
            if mag.max() == 0.0 {
                eprintln!("dipole: note: peak dipole magnitude is zero, writing a black map");
            }
            let map = tone_map(&mag, *alpha)?;
            write_file(output, &imgio::write_pgm(&map))
        }
        Command::Field {
            input,
            output,
            window,
            format,
        } => {
            let img = read_image(input)?;
            let field = dipole_field_par(&img, *window)?;
            let params = json!({"subcommand": "field", "window": window.to_string()});
            write_file(output, vector_export(&field, Some(*window), *format, params).as_bytes())
        }
        Command::Overlay {
            input,
            output,
            cell_size,
            tau,
            line_length,
        } => {
            let img = read_image(input)?;
            let cell_size = *cell_size as usize;
            let cells = cell_dipoles(&img, cell_size)?;
            let cfg = OverlayConfig {
                cell_size,
                threshold: tau.threshold(),
                line_length: match line_length {
                    LineMode::Fixed => LineLength::FixedFraction,
                    LineMode::Scaled => LineLength::MagnitudeScaled,
                },
                ..OverlayConfig::default()
            };
            write_file(output, &imgio::write_ppm(&render_overlay(&img, &cells, &cfg)))
        }
        Command::Segment {
            input,
            output,
            tau,
            connectivity,
            min_pixels,
            window,
            fields,
        } => {
            let img = read_image(input)?;
            let field = dipole_field_par(&img, *window)?;
            let tau_value = tau.threshold().resolve(field.max_magnitude());
            let params = DomainParams {
                window: *window,
                tau: tau_value,
                connectivity: *connectivity,
                min_pixels: *min_pixels as usize,
            };
            let domains = domains_from_field(&field, &params)?;
            let doc = json!({
                "params": {
                    "subcommand": "segment",
                    "window": window.to_string(),
                    "tau": tau.to_json(),
                    "tau_value": tau_value,
                    "connectivity": match connectivity {
                        Connectivity::Four => 4,
                        Connectivity::Eight => 8,
                    },
                    "min_pixels": min_pixels,
                },
                "width": img.width(),
                "height": img.height(),
                "domain_count": domains.len(),
                "domains": domains.iter().map(|d| DomainJson::new(d, *fields)).collect::<Vec<_>>(),
            });
            write_file(output, (doc.to_string() + "\n").as_bytes())
        }
        Command::Perp {
            input,
            output,
            window,
            format,
        } => {
            let img = read_image(input)?;
            let perp = perpendicular_field(&dipole_field_par(&img, *window)?);
            let params = json!({"subcommand": "perp", "window": window.to_string()});
            write_file(output, vector_export(&perp, Some(*window), *format, params).as_bytes())
        }
        Command::Gradient {
            input,
            output,
            format,
        } => {
            let img = read_image(input)?;
            let grad = gradient_field(&img)?;
            let params = json!({"subcommand": "gradient"});
            write_file(output, vector_export(&grad, None, *format, params).as_bytes())
        }
        Command::Compare { input, window, tau } => {
            let img = read_image(input)?;
            let dipoles = dipole_field_par(&img, *window)?;
            let grad = gradient_field(&img)?;
            let stats = match tau {
                Tau::Auto => angular_agreement_relative(&dipoles, &grad, AUTO_THRESHOLD_FRACTION)?,
                Tau::Value(v) => angular_agreement(&dipoles, &grad, *v)?,
            };
            let doc = json!({
                "params": {"subcommand": "compare", "window": window.to_string(), "tau": tau.to_json()},
                "median_angle_deg": stats.median_angle_deg,
                "mean_angle_deg": stats.mean_angle_deg,
                "sample_count": stats.sample_count,
            });
            let mut out = std::io::stdout().lock();
            writeln!(out, "{doc}").map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

/// Parses `args` (including the program name) and runs. Returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprint!("{e}");
                return 1;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("usage error");
            eprintln!("dipole: {first} (see `dipole --help`)");
            return 1;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dipole: error: {e}");
            2
        }
    }
}
