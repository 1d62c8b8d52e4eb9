//! The interactive console animator.

use std::io::{self, BufRead, Write};

use crate::animation::{Animation, PromptView};

fn show(out: &mut impl Write, p: &PromptView) -> io::Result<()> {
    match p {
        PromptView::Menu { events, state, .. } => {
            if let Some(s) = state {
                writeln!(out, "State: {s}")?;
            }
            writeln!(out, "Events:")?;
            for e in events {
                writeln!(out, "  ({}) {}", e.id + 1, e.label)?;
            }
        }
        PromptView::Terminated { value, .. } => writeln!(out, "Terminated: {value}")?,
        PromptView::Deadlock { .. } => writeln!(out, "Deadlocked.")?,
        PromptView::TauLimit { taus, .. } => {
            writeln!(out, "No visible event after {taus} internal steps. Type c to continue or q to quit.")?
        }
    }
    Ok(())
}

const HELP: &str = "Type an event number or label, c to continue after internal steps, t for the trace, q to quit.";

/// Reads commands from `input` until the user quits, the process stops or
/// input ends.
pub fn run(mut anim: Animation, input: impl BufRead, mut out: impl Write) -> io::Result<()> {
    let mut current = anim.prompt();
    writeln!(out, "Animating {}. {HELP}", anim.target())?;
    show(&mut out, &current)?;
    let mut lines = input.lines();
    loop {
        if matches!(current, PromptView::Terminated { .. } | PromptView::Deadlock { .. }) {
            return Ok(());
        }
        write!(out, "> ")?;
        out.flush()?;
        let Some(line) = lines.next() else {
            writeln!(out)?;
            return Ok(());
        };
        let line = line?;
        let cmd = line.trim();
        let next = match cmd {
            "" => continue,
            "q" | "quit" => return Ok(()),
            "?" | "h" | "help" => {
                writeln!(out, "{HELP}")?;
                continue;
            }
            "t" | "trace" => {
                writeln!(out, "Trace: {}", anim.trace().join(", "))?;
                continue;
            }
            "c" | "continue" => anim.resume(),
            _ => match cmd.parse::<usize>() {
                Ok(n) if n >= 1 => anim.choose(n - 1),
                _ => anim.choose_label(cmd),
            },
        };
        match next {
            Ok(p) => {
                current = p;
                show(&mut out, &current)?;
            }
            Err(e) => writeln!(out, "Rejected: {e}")?,
        }
    }
}
