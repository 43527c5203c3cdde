//! The `jspec` command line.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 numerical error,
//! 3 verification failure. Errors go to stdout as
//! `{"error": {"kind": .., "message": ..}}`.

use crate::charfn::{charfn, green, recurrence_residual, CharValue};
use crate::config::load_config;
use crate::cx;
use crate::error::{Error, Result};
use crate::regularization::{charfn_reg, detp_finite};
use crate::sequence::{OperatorSpec, RegClass};
use crate::spectra::{chain_residuals, generalized_eigvecs, residual_norm, spectrum, Rect, SpectrumOpts};
use crate::verify::{self, Harness};
use clap::{Parser, Subcommand};
use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "jspec", version, about = "Spectra of doubly infinite complex Jacobi operators")]
pub struct Cli {
    /// Operator spec (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Target tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Also write the output here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Eigenvalues in a rectangle.
    Spectrum {
        /// Re-min,Re-max,Im-min,Im-max
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        /// Radius kept clear around the origin (compact classes).
        #[arg(long)]
        origin_radius: Option<f64>,
        /// Radius of the disks around λ_n for unclassified specs.
        #[arg(long, default_value_t = 1e-3)]
        exclusion_radius: f64,
    },
    /// CSV of the characteristic function on a grid.
    CharfnGrid {
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 101)]
        nx: usize,
        #[arg(long, default_value_t = 101)]
        ny: usize,
        /// Plain F_J instead of the regularized one.
        #[arg(long)]
        generic: bool,
    },
    /// Eigenvector (order 0) or generalized eigenvector at an eigenvalue.
    Eigvec {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// a,b
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long, default_value_t = 0)]
        order: usize,
    },
    /// One resolvent matrix element.
    Green {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        i: i64,
        #[arg(long, allow_hyphen_values = true)]
        j: i64,
    },
    /// Finite-section regularized determinant, computed two ways.
    Detp {
        #[arg(long)]
        p: u32,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long = "N")]
        n: usize,
    },
    /// Run the example checks. JSPEC_BREAK=1 shrinks every bound.
    VerifyExamples {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long)]
        only: Option<String>,
    },
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::ConfigError(msg.into())
}

/// Parse "a,b,c,d" into a rectangle.
pub fn parse_region(s: &str) -> Result<Rect> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| cfg(format!("region \"{s}\" is not four numbers")))?;
    if v.len() != 4 {
        return Err(cfg(format!("region \"{s}\" needs four numbers")));
    }
    Rect::new(v[0], v[1], v[2], v[3]).map_err(|_| cfg(format!("region \"{s}\" is empty")))
}

pub fn parse_range(s: &str) -> Result<(i64, i64)> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| cfg(format!("range \"{s}\" is not two integers")))?;
    match v[..] {
        [a, b] if a <= b => Ok((a, b)),
        _ => Err(cfg(format!("range \"{s}\" must be a,b with a ≤ b"))),
    }
}

/// Parse "1.5", "-2i", "0.5+0.5i", "1e-3-2e-1i", "i".
pub fn parse_complex(s: &str) -> Result<C> {
    let bad = || cfg(format!("\"{s}\" is not a complex number"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    if let Ok(x) = t.parse::<f64>() {
        return Ok(C::new(x, 0.0));
    }
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    // the last sign not at the start and not part of an exponent splits re/im
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let im_of = |p: &str| -> Result<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C::new(re, im_of(&body[k..])?))
        }
        None => Ok(C::new(0.0, im_of(body)?)),
    }
}

fn spec_of(cli: &Cli) -> Result<OperatorSpec> {
    let path = cli.config.as_ref().ok_or_else(|| cfg("--config is required"))?;
    load_config(path)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(cfg(format!("--tol must lie in (0, 1), got {tol}")))
    }
}

#[derive(Serialize)]
struct EigvecOut {
    #[serde(serialize_with = "cx::ser")]
    z: C,
    range: (i64, i64),
    order: usize,
    #[serde(serialize_with = "cx::ser_vec")]
    values: Vec<C>,
    /// ‖(J − z)u‖/‖u‖ for order 0, the chain-relation residual otherwise.
    residual: f64,
    recurrence_residual: f64,
    tail_err: f64,
    window: usize,
}

#[derive(Serialize)]
struct GreenOut {
    #[serde(serialize_with = "cx::ser")]
    z: C,
    i: i64,
    j: i64,
    #[serde(serialize_with = "cx::ser")]
    value: C,
    mode: &'static str,
}

#[derive(Serialize)]
struct DetpOut {
    p: u32,
    #[serde(serialize_with = "cx::ser")]
    z: C,
    #[serde(rename = "N")]
    n: usize,
    #[serde(flatten)]
    det: crate::regularization::DetP,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

/// One grid row; failures become NaN rows with the error kind as reason.
fn grid_row(spec: &OperatorSpec, z: C, tol: f64, generic: bool) -> String {
    let r: Result<CharValue> = if generic { charfn(spec, z, tol) } else { charfn_reg(spec, z, tol) };
    match r {
        Ok(v) => format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{},",
            z.re,
            z.im,
            v.value.re,
            v.value.im,
            v.value.norm(),
            v.tail_err,
            v.window.1
        ),
        Err(e) => format!("{:?},{:?},NaN,NaN,NaN,NaN,NaN,{}", z.re, z.im, e.kind()),
    }
}

pub const GRID_HEADER: &str = "re,im,f_re,f_im,abs,tail_err,window_n,reason";

/// Command output text and exit code on success.
fn execute(cli: &Cli) -> Result<(String, i32)> {
    check_tol(cli.tol)?;
    let tol = cli.tol;
    match &cli.cmd {
        Cmd::Spectrum { region, origin_radius, exclusion_radius } => {
            let region = parse_region(region)?;
            let spec = spec_of(cli)?;
            let opts = SpectrumOpts { origin_radius: *origin_radius, exclusion_radius: *exclusion_radius, ..Default::default() };
            Ok((json(&spectrum(&spec, region, tol, &opts)?), 0))
        }
        Cmd::CharfnGrid { region, nx, ny, generic } => {
            let region = parse_region(region)?;
            if *nx < 2 || *ny < 2 {
                return Err(cfg("nx and ny must be at least 2"));
            }
            let spec = spec_of(cli)?;
            let generic = *generic || spec.reg_class == RegClass::None;
            let nodes: Vec<C> = (0..*ny)
                .flat_map(|iy| {
                    let y = region.y0 + region.height() * iy as f64 / (*ny - 1) as f64;
                    (0..*nx).map(move |ix| C::new(region.x0 + region.width() * ix as f64 / (*nx - 1) as f64, y))
                })
                .collect();
            let rows: Vec<String> = nodes.par_iter().map(|&z| grid_row(&spec, z, tol, generic)).collect();
            let mut text = String::from(GRID_HEADER);
            text.push('\n');
            for r in rows {
                text.push_str(&r);
                text.push('\n');
            }
            Ok((text, 0))
        }
        Cmd::Eigvec { z, range, order } => {
            let z = parse_complex(z)?;
            let range = parse_range(range)?;
            let spec = spec_of(cli)?;
            let chain = generalized_eigvecs(&spec, z, order + 1, range, tol)?;
            let u = &chain[*order];
            let residual = if *order == 0 {
                residual_norm(&spec, z, u)?
            } else {
                chain_residuals(&spec, z, &chain)[*order - 1]
            };
            let out = EigvecOut {
                z,
                range,
                order: *order,
                values: u.values.clone(),
                residual,
                recurrence_residual: if *order == 0 { recurrence_residual(&spec, z, u) } else { f64::NAN },
                tail_err: u.tail_err,
                window: u.window_n,
            };
            Ok((json(&out), 0))
        }
        Cmd::Green { z, i, j } => {
            let z = parse_complex(z)?;
            let spec = spec_of(cli)?;
            let value = green(&spec, z, *i, *j, tol)?;
            let mode = if spec.reg_class.p().is_some() { "regularized" } else { "generic" };
            let out = GreenOut { z, i: *i, j: *j, value, mode };
            Ok((json(&out), 0))
        }
        Cmd::Detp { p, z, n } => {
            let z = parse_complex(z)?;
            let spec = spec_of(cli)?;
            let det = detp_finite(&spec, *p, z, *n)?;
            Ok((json(&DetpOut { p: *p, z, n: *n, det }), 0))
        }
        Cmd::VerifyExamples { only } => {
            let only: Vec<usize> = match only {
                Some(s) => s
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().ok().filter(|k| (1..=10).contains(k)))
                    .collect::<Option<_>>()
                    .ok_or_else(|| cfg(format!("--only \"{s}\" must list criteria 1..10")))?,
                None => Vec::new(),
            };
            let broken = std::env::var("JSPEC_BREAK").map(|v| v == "1").unwrap_or(false);
            let h = Harness { bound_scale: if broken { 1e-30 } else { 1.0 } };
            let checks = verify::run(&h, &only);
            let mut text = String::new();
            for c in &checks {
                text.push_str(&c.to_string());
                text.push('\n');
            }
            let code = if checks.iter().all(|c| c.pass) { 0 } else { 3 };
            Ok((text, code))
        }
    }
}

#[derive(Serialize)]
struct ErrBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrOut<'a> {
    error: ErrBody<'a>,
}

pub fn error_json(e: &Error) -> String {
    json(&ErrOut { error: ErrBody { kind: e.kind(), message: e.to_string() } })
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConfigError(_) | Error::InvalidFamilyParams(_) => 1,
        _ => 2,
    }
}

/// Cap the rayon pool from JSPEC_THREADS.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("JSPEC_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| cfg(format!("JSPEC_THREADS=\"{v}\"")))?;
        // a second initialization (tests calling main_with twice) is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Run with explicit arguments, writing to `stdout`; returns the exit code.
pub fn main_with(args: &[String], stdout: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(stdout, "{}", error_json(&cfg(e.to_string())));
            return 1;
        }
    };
    let result = init_threads().and_then(|_| execute(&cli));
    match result {
        Ok((text, code)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    let _ = writeln!(stdout, "{}", error_json(&cfg(format!("{}: {e}", path.display()))));
                    return 1;
                }
            }
            let _ = write!(stdout, "{text}");
            if !text.ends_with('\n') {
                let _ = writeln!(stdout);
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stdout, "{}", error_json(&e));
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cx::Cx;

    #[test]
    fn complex_strings() {
        let cases = [
            ("2", C::new(2.0, 0.0)),
            ("0.5+0.5i", C::new(0.5, 0.5)),
            ("-1.5-0.2i", C::new(-1.5, -0.2)),
            ("i", C::new(0.0, 1.0)),
            ("-i", C::new(0.0, -1.0)),
            ("3i", C::new(0.0, 3.0)),
            ("1e-3-2e-1i", C::new(1e-3, -0.2)),
            ("1e+2+1e+1i", C::new(100.0, 10.0)),
            ("2-i", C::new(2.0, -1.0)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        for s in ["", "x", "1+", "1+2j", "++1i"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn regions_and_ranges() {
        assert_eq!(parse_region("-3.5,3.5,-1,1").unwrap().as_array(), [-3.5, 3.5, -1.0, 1.0]);
        for s in ["1,2,3", "a,b,c,d", "1,0,0,1", "0,1,0,1,2"] {
            assert_eq!(parse_region(s).unwrap_err().kind(), "ConfigError", "{s}");
        }
        assert_eq!(parse_range("-5,10").unwrap(), (-5, 10));
        assert!(parse_range("5,1").is_err());
    }

    #[test]
    fn cx_roundtrip() {
        let v: Cx = serde_json::from_str(r#"{"re":1.5,"im":-2}"#).unwrap();
        assert_eq!(C::from(v), C::new(1.5, -2.0));
    }
}
