//! Acceptance suite. Runs every primary criterion and prints one line each;
//! exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{arb_formula, arb_program, SHIPPED_SCRIPT};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use trickcheck::automaton::trick_to_automaton;
use trickcheck::ctl::{build_tree, CtlFormula, EvidenceKind};
use trickcheck::dsl::{parse, pretty_print};
use trickcheck::oracle::{fixtures, run_algorithm_2, OracleFormula};
use trickcheck::stats::{op_stats, path_counts};
use trickcheck::trick::{enumerate_paths, run_path, Answer, ChoiceKind};
use trickcheck::{shousuigongcishi, ExecConfig};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn cfg() -> ExecConfig {
    ExecConfig::default()
}

fn trick_correctness() -> Outcome {
    let start = Instant::now();
    let prog = shousuigongcishi();
    let paths = enumerate_paths(&prog, cfg()).map_err(|e| e.to_string())?;
    let yes = paths.iter().filter(|r| r.final_answer == Answer::Yes).count();
    let report = run_algorithm_2(&prog, cfg()).map_err(|e| e.to_string())?;
    let tree = build_tree(&prog, cfg()).map_err(|e| e.to_string())?;
    let verdict = tree.eval(&"AF (p & empty)".parse().unwrap());
    let elapsed = start.elapsed();
    ensure!(yes == paths.len(), "{yes} of {} paths answer yes", paths.len());
    ensure!(report.flag_total == Some(report.m), "flag_total {:?} != m {}", report.flag_total, report.m);
    ensure!(verdict.value, "AF (p & empty) evaluated false");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("m={} yes={yes} flag_total={} AF(p&empty)=true in {elapsed:.2?}", paths.len(), report.m))
}

fn five_formulas() -> Outcome {
    let prog = shousuigongcishi();
    let tree = build_tree(&prog, cfg()).map_err(|e| e.to_string())?;
    let expected = [true, true, false, true, false];
    let mut line = Vec::new();
    for (f, want) in OracleFormula::ALL.into_iter().zip(expected) {
        let report = f.run(&prog, cfg()).map_err(|e| e.to_string())?;
        let got = tree.eval(&f.formula()).value;
        ensure!(report.verdict == want, "oracle {f} = {} (expected {want})", report.verdict);
        ensure!(got == report.verdict, "checker {f} = {got}, oracle {}", report.verdict);
        line.push(format!("{f}={got}"));
    }
    let counts = OracleFormula::AgP.run(&prog, cfg()).map_err(|e| e.to_string())?.per_path;
    for (branch, &flags) in tree.branches().iter().zip(&counts) {
        let checker = branch.nodes.iter().filter(|n| n.p).count();
        let want = if branch.binding.get("n3") == Some(1) { 4 } else { 5 };
        ensure!(checker == flags && flags == want, "{}: checker {checker}, oracle {flags}, expected {want}", branch.binding);
    }
    Ok(format!("{} agree; per-path p counts male 4/6, female 5/6", line.join(" ")))
}

fn path_count() -> Outcome {
    let r = path_counts(&shousuigongcishi()).map_err(|e| e.to_string())?;
    ensure!(r.internal_gaps == 2 * 4 * 12 * 2, "internal_gaps m={}", r.internal_gaps);
    ensure!(r.exclude_adjacent != r.internal_gaps, "slot modes agree at m={}", r.internal_gaps);
    ensure!(r.to_string().contains("quoted count 144"), "report does not mention the quoted count");
    Ok(format!("internal_gaps m={}, exclude_adjacent m={}, quoted {} matches neither", r.internal_gaps, r.exclude_adjacent, r.quoted))
}

fn dualities() -> Outcome {
    let cases = 1000;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&(arb_program(), arb_formula()), |(prog, f)| {
            let tree = build_tree(&prog, cfg()).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let nf = f.clone().not();
            let ag = tree.eval(&f.clone().ag()).value;
            let af = tree.eval(&f.clone().af()).value;
            if ag != !tree.eval(&nf.clone().ef()).value || af != !tree.eval(&nf.eg()).value {
                return Err(TestCaseError::fail(format!("duality broken for {f}")));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("AG f = !EF !f and AF f = !EG !f on {cases} random program/formula pairs"))
}

fn parser_round_trip() -> Outcome {
    let builtin = shousuigongcishi();
    ensure!(parse(SHIPPED_SCRIPT).map_err(|e| e.to_string())? == builtin, "shipped script differs from the builtin");
    ensure!(parse(&pretty_print(&builtin)).map_err(|e| e.to_string())? == builtin, "builtin does not round-trip");
    let cases = 500;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&arb_program(), |prog| {
            let back = parse(&pretty_print(&prog)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            if back != prog {
                return Err(TestCaseError::fail("round trip changed the program"));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("shipped script = builtin; builtin + {cases} generated programs round-trip"))
}

fn automaton_language() -> Outcome {
    let prog = shousuigongcishi();
    let automaton = trick_to_automaton(&prog, cfg()).map_err(|e| e.to_string())?;
    let words: BTreeSet<Vec<String>> = enumerate_paths(&prog, cfg())
        .map_err(|e| e.to_string())?
        .iter()
        .map(|r| r.action_word().iter().map(ToString::to_string).collect())
        .collect();
    for w in &words {
        let run = automaton.accepts(w).ok_or_else(|| format!("rejected {w:?}"))?;
        run.validate(&automaton).map_err(|e| e.to_string())?;
    }
    let (mut rejected, mut members) = (0, 0);
    for w in &words {
        for i in 0..w.len() {
            let mut m = w.clone();
            m.remove(i);
            match automaton.accepts(&m) {
                Some(run) => {
                    ensure!(words.contains(&m), "accepted non-member mutant {m:?}");
                    run.validate(&automaton).map_err(|e| e.to_string())?;
                    members += 1;
                }
                None => {
                    ensure!(!words.contains(&m), "rejected member {m:?}");
                    rejected += 1;
                }
            }
        }
    }
    ensure!(rejected >= 100, "only {rejected} mutants rejected");
    Ok(format!(
        "{} words accepted with valid runs; {rejected} deletion mutants rejected, {members} that are themselves words accepted",
        words.len()
    ))
}

fn complexity() -> Outcome {
    let c = 1;
    let base = op_stats(&shousuigongcishi(), cfg()).map_err(|e| e.to_string())?;
    ensure!(base.max_path_ops <= 40, "a path uses {} primitive operations", base.max_path_ops);
    ensure!(base.checker_ops <= c * base.m * 40, "checker ops {} > {}", base.checker_ops, c * base.m * 40);
    let doubled = shousuigongcishi().with_kind_domain(ChoiceKind::NameLength, vec![2, 3, 4, 5]).map_err(|e| e.to_string())?;
    let big = op_stats(&doubled, cfg()).map_err(|e| e.to_string())?;
    ensure!(big.m == 2 * base.m, "doubling the name-length domain gives m={} from {}", big.m, base.m);
    let ratio = big.checker_ops as f64 / base.checker_ops as f64;
    ensure!((2.0 / 1.2..=2.0 * 1.2).contains(&ratio), "ops ratio {ratio:.3}");
    Ok(format!(
        "max {} ops/path, {} checker ops <= {}*{}*40; doubled domain m {}->{} ops x{ratio:.3}",
        base.max_path_ops, base.checker_ops, c, base.m, base.m, big.m
    ))
}

fn mutation_sensitivity() -> Outcome {
    let mutant = fixtures::without_gender_discard();
    let tree = build_tree(&mutant, cfg()).map_err(|e| e.to_string())?;
    let v = tree.eval(&CtlFormula::p().and(CtlFormula::empty()).af());
    ensure!(!v.value, "AF (p & empty) still holds");
    let ev = v.evidence.ok_or("no counterexample")?;
    ensure!(ev.kind == EvidenceKind::Counterexample, "evidence is not a counterexample");
    let replay = run_path(&mutant, &ev.binding, cfg()).map_err(|e| e.to_string())?;
    ensure!(replay.checkpoints == ev.trace, "replayed trace differs");
    ensure!(replay.final_answer == Answer::No, "replayed path answers yes");
    ensure!(ev.trace.iter().all(|n| !(n.p && n.empty)), "trace has a p & empty checkpoint");
    Ok(format!("AF (p & empty) = false; counterexample {} replays with final answer no", ev.binding))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("trick correctness", trick_correctness),
        ("five-formula suite", five_formulas),
        ("path count", path_count),
        ("duality properties", dualities),
        ("parser round-trip", parser_round_trip),
        ("automaton language", automaton_language),
        ("complexity accounting", complexity),
        ("mutation sensitivity", mutation_sensitivity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
