mod args;
mod commands;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;

const EXIT_USER: u8 = 1;
const EXIT_INTERNAL: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad input or a request the library rejects.
    User(String),
    /// A bug or an environment failure.
    Internal(String),
}

impl From<aoqmap_core::Error> for CliError {
    fn from(e: aoqmap_core::Error) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::User(format!("io error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Turns `{"n": 5, "dd": true, "scales": [1, 2, 3]}` into
/// `--n 5 --dd --scales 1,2,3`.
fn config_to_args(text: &str) -> CliResult<Vec<OsString>> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::User(format!("config: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| CliError::User("config: expected a JSON object".into()))?;
    let scalar = |key: &str, v: &serde_json::Value| -> CliResult<String> {
        match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            _ => Err(CliError::User(format!("config: unsupported value for {key}"))),
        }
    };
    let mut out = Vec::new();
    for (key, v) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            serde_json::Value::Bool(true) => out.push(flag.into()),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => {
                let joined = items.iter().map(|x| scalar(key, x)).collect::<CliResult<Vec<_>>>()?.join(",");
                out.push(flag.into());
                out.push(joined.into());
            }
            other => {
                out.push(flag.into());
                out.push(scalar(key, other)?.into());
            }
        }
    }
    Ok(out)
}

/// Splices the `--config` document in right after the subcommand so that
/// explicit flags, which come later, override it.
fn expand_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::User("--config needs a file".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::User(format!("config {}: {e}", path.to_string_lossy())))?;
    let extra = config_to_args(&text)?;
    let sub = rest.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')).map(|i| i + 2);
    let at = sub.unwrap_or(rest.len()).min(rest.len());
    rest.splice(at..at, extra);
    Ok(rest)
}

fn run(argv: Vec<OsString>) -> CliResult<()> {
    let argv = expand_config(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::User(e.render().to_string().trim_end().to_string())),
    };
    commands::dispatch(cli.command)
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    match std::panic::catch_unwind(|| run(argv)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(CliError::User(msg))) => {
            eprintln!("error: {}", msg.strip_prefix("error: ").unwrap_or(&msg));
            ExitCode::from(EXIT_USER)
        }
        Ok(Err(CliError::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
        // the panic hook has already printed the message
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
