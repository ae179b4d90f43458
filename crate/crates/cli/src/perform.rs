use std::collections::VecDeque;
use std::io::{BufRead, Write};

use trickcheck::trick::{Answer, ChoiceRequest, Event, Execution, Progress};
use trickcheck::{ExecConfig, TrickProgram};

use crate::{CliError, Io, Status};

/// Tokens separated by commas or whitespace, read a line at a time.
struct Tokens<'a> {
    input: &'a mut dyn BufRead,
    queue: VecDeque<String>,
}

impl Tokens<'_> {
    fn next(&mut self) -> std::io::Result<Option<String>> {
        while self.queue.is_empty() {
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Ok(None);
            }
            self.queue.extend(line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(String::from));
        }
        Ok(self.queue.pop_front())
    }
}

fn describe_domain(req: &ChoiceRequest) -> String {
    let values: Vec<String> =
        req.domain.iter().map(|&v| req.kind.value_label(v).map_or_else(|| v.to_string(), String::from)).collect();
    values.join(", ")
}

fn label(req: &ChoiceRequest, value: u32) -> String {
    match req.kind.value_label(value) {
        Some(l) => format!("{value} ({l})"),
        None => value.to_string(),
    }
}

/// Interactive walkthrough. Match exits 0, mismatch 1, end of input 130.
pub fn perform(program: &TrickProgram, config: ExecConfig, json: bool, io: &mut Io<'_>) -> Result<Status, CliError> {
    let Io { input, out, err } = io;
    let mut tokens = Tokens { input: &mut **input, queue: VecDeque::new() };
    // with --json the transcript moves to stderr so stdout holds only the record
    let (log, mut record_out): (&mut dyn Write, Option<&mut dyn Write>) =
        if json { (&mut **err, Some(&mut **out)) } else { (&mut **out, None) };
    let mut exec = Execution::new(program, config);
    writeln!(log, "deck: {}", exec.deck())?;
    loop {
        let progress = exec.resume()?;
        for event in exec.drain_events() {
            match event {
                Event::Action { action, deck } => writeln!(log, "  {:<18}{deck}", action.to_string())?,
                Event::Checkpoint(cp) => writeln!(log, "  checkpoint {:<7}p={}", cp.label, cp.p)?,
                Event::Final(_) => {}
            }
        }
        match progress {
            Progress::Pending(req) => {
                if req.domain.is_empty() {
                    return Err(CliError::NoLegalValue(req.name));
                }
                loop {
                    write!(log, "{} [{}] > ", req.kind.prompt(), describe_domain(&req))?;
                    log.flush()?;
                    let Some(token) = tokens.next()? else {
                        writeln!(log)?;
                        writeln!(log, "aborted: input ended before the trick finished")?;
                        return Ok(Status::Aborted);
                    };
                    match req.kind.parse_value(&token).filter(|v| req.domain.contains(v)) {
                        Some(value) => {
                            exec.choose(value)?;
                            writeln!(log, "{} = {}", req.name, label(&req, value))?;
                            break;
                        }
                        None => writeln!(log, "`{token}` is not one of [{}]; try again", describe_domain(&req))?,
                    }
                }
            }
            Progress::Done(record) => {
                let last = record.checkpoints.last().map(|c| c.deck.to_string()).unwrap_or_default();
                let outcome = if record.final_answer == Answer::Yes { "match" } else { "mismatch" };
                writeln!(log, "reveal: your card is {}, the hand holds {last}: {outcome}", record.hidden)?;
                if let Some(out) = record_out.as_mut() {
                    writeln!(out, "{}", record.to_json())?;
                }
                return Ok(if record.final_answer == Answer::Yes { Status::Holds } else { Status::Fails });
            }
        }
    }
}
