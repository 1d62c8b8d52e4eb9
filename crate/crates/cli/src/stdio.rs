//! Line-oriented JSON protocol: one request object per input line, one
//! response object per output line.

use std::io::{self, BufRead, Write};

use serde::Deserialize;

use crate::animation::{Animation, ApiError, StartRequest};

#[derive(Deserialize)]
#[serde(tag = "cmd", rename_all = "lowercase")]
enum Request {
    Start(StartRequest),
    Choose {
        #[serde(rename = "eventId")]
        event_id: Option<usize>,
        event: Option<String>,
    },
    Continue,
    Prompt,
    Quit,
}

fn respond(session: &mut Option<Animation>, line: &str) -> (String, bool) {
    let req: Request = match serde_json::from_str(line) {
        Ok(r) => r,
        Err(e) => return (ApiError::new("bad_request", e.to_string()).to_line(), false),
    };
    let running = |s: &mut Option<Animation>| s.take().ok_or_else(|| ApiError::new("no_session", "send a start command first"));
    let result = match req {
        Request::Quit => return (r#"{"status":"bye"}"#.to_string(), true),
        Request::Start(start) => Animation::start(&start, true).map(|mut a| {
            let p = a.prompt();
            *session = Some(a);
            p
        }),
        Request::Choose { event_id, event } => running(session).and_then(|mut a| {
            let r = match (event_id, event) {
                (Some(id), _) => a.choose(id),
                (None, Some(label)) => a.choose_label(&label),
                (None, None) => Err(ApiError::new("bad_request", "choose needs `eventId` or `event`")),
            };
            *session = Some(a);
            r
        }),
        Request::Continue => running(session).and_then(|mut a| {
            let r = a.resume();
            *session = Some(a);
            r
        }),
        Request::Prompt => running(session).map(|mut a| {
            let p = a.prompt();
            *session = Some(a);
            p
        }),
    };
    match result {
        Ok(p) => (serde_json::to_string(&p).expect("prompts serialise"), false),
        Err(e) => (e.to_line(), false),
    }
}

/// Serves requests until `quit` or end of input. Blank lines are skipped.
pub fn run(input: impl BufRead, mut output: impl Write) -> io::Result<()> {
    let mut session = None;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (reply, done) = respond(&mut session, &line);
        writeln!(output, "{reply}")?;
        output.flush()?;
        if done {
            break;
        }
    }
    Ok(())
}
