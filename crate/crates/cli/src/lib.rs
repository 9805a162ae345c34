//! The `ellchi` command-line front end as a library, so that the binary and
//! the integration tests share one entry point.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use ellchi_core::engine::{clear_cache_file, TableRow, CACHE_FORMAT, ENGINE_VERSION};
use ellchi_core::oracles::{run_suite, Overrides, Suite};
use ellchi_core::{ChiRequest, Engine, EngineConfig, Error, InvariantKey, MemoCache};

pub mod args;
pub mod output;

use args::{CacheAction, Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Exit code for an engine error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InternalConsistency(_) | Error::Pole => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Results go to `out`; diagnostics, cache counters and
/// timings go to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INVALID
                }
            };
        }
    };
    let started = Instant::now();
    match execute(&cli) {
        Ok((bytes, code, engine)) => {
            if out.write_all(&bytes).and_then(|()| out.flush()).is_err() {
                return EXIT_INVALID;
            }
            if let Some(engine) = engine {
                if let Err(e) = engine.cache().save() {
                    let _ = writeln!(err, "error: saving cache: {e}");
                    return exit_code(&e);
                }
                let s = engine.cache().stats();
                let _ = writeln!(
                    err,
                    "cache: {} entries, {} hits, {} misses, {} rejected; {} ms",
                    s.entries,
                    s.hits,
                    s.misses,
                    s.rejected,
                    started.elapsed().as_millis()
                );
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn positive(name: &str, v: i64) -> Result<usize, Error> {
    if v < 1 {
        return Err(Error::InvalidInput(format!(
            "{name} must be at least 1, got {v}"
        )));
    }
    usize::try_from(v).map_err(|_| Error::InvalidInput(format!("{name} out of range: {v}")))
}

fn open_cache(cli: &Cli) -> Result<MemoCache, Error> {
    if cli.no_cache {
        return Ok(MemoCache::disabled());
    }
    match &cli.cache {
        Some(p) => MemoCache::open(p),
        None => Ok(MemoCache::in_memory()),
    }
}

fn exact_only(engine: &Engine, n: usize) -> Result<(), Error> {
    let ceiling = engine.config().exact_ceiling;
    if n > ceiling {
        return Err(Error::UseSeriesMode { n, ceiling });
    }
    Ok(())
}

type Outcome = (Vec<u8>, i32, Option<Engine>);

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    if cli.jobs == 0 {
        return Err(Error::InvalidInput("--jobs must be at least 1".into()));
    }
    if let Command::Cache {
        action: CacheAction::Clear,
    } = &cli.command
    {
        return clear(cli);
    }
    let config = EngineConfig {
        exact_ceiling: cli.exact_ceiling,
    };
    let engine = Engine::with_cache(config, open_cache(cli)?);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let (bytes, code) = pool.install(|| dispatch(cli, &engine))?;
    Ok((bytes, code, Some(engine)))
}

fn clear(cli: &Cli) -> Result<Outcome, Error> {
    let path = match (&cli.cache, cli.no_cache) {
        (Some(p), false) => p,
        _ => {
            return Err(Error::InvalidInput(
                "cache clear needs --cache PATH or ELLCHI_CACHE".into(),
            ))
        }
    };
    let msg = if clear_cache_file(path)? {
        format!("removed {}\n", path.display())
    } else {
        format!("no cache file at {}\n", path.display())
    };
    Ok((msg.into_bytes(), EXIT_OK, None))
}

fn dispatch(cli: &Cli, engine: &Engine) -> Result<(Vec<u8>, i32), Error> {
    let format = cli.format;
    match &cli.command {
        Command::Chi(a) => {
            let n = positive("n", a.n)?;
            let req = ChiRequest::new(n, a.hodge, a.exps.clone()).with_mode(a.mode.into());
            req.validate()?;
            let chi = engine.chi(&req)?;
            let row = TableRow {
                n,
                hodge: a.hodge,
                exps: a.exps.clone(),
                chi,
            };
            let mode = engine.resolve_mode(n, req.mode);
            Ok((output::emit_chi(&row, mode, format), EXIT_OK))
        }
        Command::Table(a) => {
            let n = positive("n", a.n)?;
            let exps = if a.exps.len() == 1 {
                vec![a.exps[0].clone(); n]
            } else {
                a.exps.clone()
            };
            if exps.len() != n {
                return Err(Error::InvalidInput(format!(
                    "expected 1 or {n} exponent ranges, got {}",
                    exps.len()
                )));
            }
            let rows = engine.chi_table(n, a.hodge.clone(), &exps, a.mode.into())?;
            let mode = engine.resolve_mode(n, a.mode.into());
            Ok((output::emit_table(n, &rows, mode, format), EXIT_OK))
        }
        Command::Series(a) => {
            let n = positive("n", a.n)?;
            let orders = vec![a.order; n + 1];
            let s = engine.full_genfun_series(n, &orders, a.total)?;
            Ok((output::emit_series(n, &s, format), EXIT_OK))
        }
        Command::Genfun(a) => {
            let n = positive("n", a.n)?;
            let m = a.m.unwrap_or(a.n);
            if m < 0 || m > a.n {
                return Err(Error::InvalidInput(format!(
                    "m must lie in 0..={n}, got {m}"
                )));
            }
            exact_only(engine, n)?;
            let f = engine.partial_genfun(InvariantKey::new(n, m as usize)?)?;
            Ok((
                output::emit_genfun(n, m as usize, &f.to_string(), format),
                EXIT_OK,
            ))
        }
        Command::Verify(a) => Ok(verify(
            a.suite.into(),
            engine,
            &Overrides::default(),
            format,
        )),
        Command::Cache { action } => match action {
            CacheAction::Info => Ok((cache_info(engine), EXIT_OK)),
            CacheAction::Warm { n } => {
                let n = positive("n", *n)?;
                exact_only(engine, n)?;
                for k in 1..=n {
                    for m in 0..=k {
                        engine.partial_genfun(InvariantKey::new(k, m)?)?;
                    }
                }
                let msg = format!("warmed {} entries\n", engine.cache().stats().entries);
                Ok((msg.into_bytes(), EXIT_OK))
            }
            CacheAction::Clear => unreachable!("handled before the engine is built"),
        },
    }
}

/// Runs a suite and renders its report; the exit code is 4 if any check
/// failed.
pub fn verify(
    suite: Suite,
    engine: &Engine,
    overrides: &Overrides,
    format: Format,
) -> (Vec<u8>, i32) {
    let report = run_suite(suite, engine, overrides);
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    };
    (output::emit_report(&report, format), code)
}

fn cache_info(engine: &Engine) -> Vec<u8> {
    let cache = engine.cache();
    let mut s = String::new();
    if !cache.is_enabled() {
        s.push_str("cache disabled\n");
        return s.into_bytes();
    }
    match cache.path() {
        Some(p) => s.push_str(&format!("path: {}\n", p.display())),
        None => s.push_str("path: none (in memory)\n"),
    }
    s.push_str(&format!(
        "format: {CACHE_FORMAT}\nengine: {ENGINE_VERSION}\n"
    ));
    let keys = cache.keys();
    s.push_str(&format!("entries: {}\n", keys.len()));
    for k in keys {
        s.push_str(&format!("  P({},{})\n", k.n, k.m));
    }
    s.into_bytes()
}
