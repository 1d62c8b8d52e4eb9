use itree_cli::{repl, Animation, StartRequest};

fn session(model: &str, target: &str, args: &[&str], input: &str) -> String {
    let req = StartRequest {
        model: Some(model.into()),
        target: target.into(),
        args: args.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    let anim = Animation::start(&req, false).unwrap();
    let mut out = Vec::new();
    repl::run(anim, input.as_bytes(), &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn numbered_and_labelled_choices() {
    let out = session("buffer", "buffer", &["[]"], "2\nInput.3\nt\nq\n");
    assert!(out.starts_with("Animating buffer."), "{out}");
    assert!(out.contains("  (1) Input.0\n"), "{out}");
    assert!(out.contains("State.[1,3]"), "{out}");
    assert!(out.contains("Trace: Input.1, Input.3"), "{out}");
}

#[test]
fn rejected_choices_are_reported() {
    let out = session("buffer", "buffer", &["[]"], "Output.0\n0\n9\nq\n");
    assert_eq!(out.matches("Rejected:").count(), 3, "{out}");
}

#[test]
fn machines_show_their_state() {
    let out = session("bounded_buffer", "BoundedBuffer", &[], "Input.1\n");
    assert!(out.contains("State: sz = 1, buf = [1]"), "{out}");
}

#[test]
fn stops_when_the_process_ends() {
    let out = session("reverse", "reverse", &["[1,2]"], "");
    assert!(out.contains("Terminated: xs = [1,2], ys = [2,1], i = 2"), "{out}");
    assert!(!out.contains("> "), "{out}");
}
