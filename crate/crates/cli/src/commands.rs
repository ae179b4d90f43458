use std::net::SocketAddr;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use trickcheck::automaton::trick_to_automaton;
use trickcheck::ctl::{build_tree, explain, CtlFormula};
use trickcheck::dsl::{pretty_print, ScriptSource};
use trickcheck::oracle::{run_all, OracleFormula, OracleReport};
use trickcheck::stats::QUOTED_PATH_COUNT;
use trickcheck::trick::{enumerate_paths, Answer, ChoiceKind};
use trickcheck::{shousuigongcishi, ExecConfig, TrickProgram};

use crate::args::{Cli, Command, TrickArgs};
use crate::{perform, service, CliError, Io, Status};

pub fn load_program(args: &TrickArgs) -> Result<TrickProgram, CliError> {
    let program = if args.trick == "builtin" {
        shousuigongcishi()
    } else {
        let src = ScriptSource::load(&args.trick).map_err(|source| CliError::Load { path: args.trick.clone(), source })?;
        src.parse().map_err(|source| CliError::Script { origin: src.origin.clone(), source })?
    };
    match &args.name_words {
        Some(words) => Ok(program.with_kind_domain(ChoiceKind::NameLength, words.clone())?),
        None => Ok(program),
    }
}

/// Runs one command. Errors are reported on `io.err` and become
/// [`Status::Error`].
pub fn run(cli: Cli, io: &mut Io<'_>) -> Status {
    match dispatch(&cli.command, io) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            Status::Error
        }
    }
}

fn dispatch(command: &Command, io: &mut Io<'_>) -> Result<Status, CliError> {
    let args = command.trick();
    let config = args.config();
    match command {
        Command::Check { formula, json, .. } => {
            // parse the formula first so a typo fails fast
            let f: CtlFormula = formula.parse().map_err(|source| CliError::Formula { text: formula.clone(), source })?;
            check(&load_program(args)?, config, &f, *json, io)
        }
        Command::Enumerate { json, .. } => enumerate(&load_program(args)?, config, *json, io),
        Command::Oracle { json, .. } => oracle(&load_program(args)?, config, *json, io),
        Command::Perform { json, .. } => perform::perform(&load_program(args)?, config, *json, io),
        Command::Print { .. } => {
            write!(io.out, "{}", pretty_print(&load_program(args)?))?;
            Ok(Status::Holds)
        }
        Command::Automaton { .. } => {
            let automaton = trick_to_automaton(&load_program(args)?, config)?;
            writeln!(io.out, "{}", automaton.to_json())?;
            Ok(Status::Holds)
        }
        Command::Serve { port, host, .. } => {
            let app = service::router(load_program(args)?, config);
            let addr = SocketAddr::new(*host, *port);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(addr).await?;
                writeln!(io.err, "listening on http://{}", listener.local_addr()?)?;
                axum::serve(listener, app).await
            })?;
            Ok(Status::Holds)
        }
    }
}

fn check(program: &TrickProgram, config: ExecConfig, formula: &CtlFormula, json: bool, io: &mut Io<'_>) -> Result<Status, CliError> {
    let start = Instant::now();
    let tree = build_tree(program, config)?;
    let verdict = tree.eval(formula);
    let elapsed = start.elapsed();
    if json {
        writeln!(io.out, "{}", serde_json::to_string(&verdict).expect("verdicts serialize"))?;
    } else {
        writeln!(io.out, "{formula}: {} over m={} paths", verdict.value, verdict.m)?;
        if let Ok(explanation) = explain(&verdict) {
            write!(io.out, "{}", explanation.text)?;
        }
    }
    writeln!(io.err, "checked in {elapsed:.2?}")?;
    Ok(Status::from_bool(verdict.value))
}

fn enumerate(program: &TrickProgram, config: ExecConfig, json: bool, io: &mut Io<'_>) -> Result<Status, CliError> {
    let paths = enumerate_paths(program, config)?;
    let m = paths.len();
    let yes = paths.iter().filter(|r| r.final_answer == Answer::Yes).count();
    if json {
        let doc = json!({
            "slot_mode": config.slot_mode.as_str(),
            "m": m,
            "yes": yes,
            "no": m - yes,
            "quoted_count": QUOTED_PATH_COUNT,
            "paths": paths,
        });
        writeln!(io.out, "{doc}")?;
    } else {
        for r in &paths {
            writeln!(io.out, "{}  hidden={}  final={}", r.binding, r.hidden, r.final_answer)?;
        }
        writeln!(io.out, "m={m} yes={yes} no={}", m - yes)?;
        let relation = if m == QUOTED_PATH_COUNT { "equals" } else { "differs from" };
        writeln!(io.out, "slot mode {}: m={m} {relation} the quoted count {QUOTED_PATH_COUNT}", config.slot_mode)?;
    }
    Ok(Status::Holds)
}

#[derive(Serialize)]
struct Agreement {
    formula: OracleFormula,
    oracle: bool,
    checker: bool,
    agree: bool,
}

fn flags(report: &OracleReport) -> String {
    match (report.flag_total, report.flag, report.flag2) {
        (Some(n), _, _) => format!("flag_total={n}"),
        (_, Some(f), _) => format!("flag={f}"),
        (_, _, Some(f)) => format!("flag2={f}"),
        _ => String::new(),
    }
}

/// Exits 1 when checker and oracle disagree anywhere, or when the trick
/// itself fails (the first property is false).
fn oracle(program: &TrickProgram, config: ExecConfig, json: bool, io: &mut Io<'_>) -> Result<Status, CliError> {
    let reports = run_all(program, config)?;
    let tree = build_tree(program, config)?;
    let rows: Vec<Agreement> = reports
        .iter()
        .map(|r| {
            let checker = tree.eval(&r.formula.formula()).value;
            Agreement { formula: r.formula, oracle: r.verdict, checker, agree: checker == r.verdict }
        })
        .collect();
    let all_agree = rows.iter().all(|r| r.agree);
    let trick_works = reports[0].verdict;
    if json {
        let doc = json!({
            "m": tree.m(),
            "all_agree": all_agree,
            "trick_works": trick_works,
            "agreement": rows,
            "reports": reports,
        });
        writeln!(io.out, "{doc}")?;
    } else {
        writeln!(io.out, "{:<16}{:<8}{:<9}{:<7}flags", "formula", "oracle", "checker", "agree")?;
        for (row, report) in rows.iter().zip(&reports) {
            let agree = if row.agree { "yes" } else { "NO" };
            writeln!(io.out, "{:<16}{:<8}{:<9}{:<7}{}", row.formula.name(), row.oracle, row.checker, agree, flags(report))?;
        }
        writeln!(io.out, "m={} all_agree={all_agree} trick_works={trick_works}", tree.m())?;
    }
    Ok(Status::from_bool(all_agree && trick_works))
}
