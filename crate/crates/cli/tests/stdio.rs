use serde_json::{json, Value};

fn converse(lines: &[Value]) -> Vec<Value> {
    let input: String = lines.iter().map(|l| format!("{l}\n")).collect();
    let mut out = Vec::new();
    itree_cli::stdio::run(input.as_bytes(), &mut out).unwrap();
    String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn buffer_session() {
    let replies = converse(&[
        json!({ "cmd": "start", "model": "buffer", "target": "buffer", "args": ["[]"] }),
        json!({ "cmd": "choose", "event": "Input.1" }),
        json!({ "cmd": "choose", "event": "Input.1" }),
        json!({ "cmd": "choose", "event": "State.[1,1]" }),
        json!({ "cmd": "choose", "event": "Output.3" }),
        json!({ "cmd": "prompt" }),
        json!({ "cmd": "quit" }),
        json!({ "cmd": "prompt" }),
    ]);
    assert_eq!(replies.len(), 7, "nothing is read after quit");
    assert_eq!(replies[0]["status"], "menu");
    assert_eq!(replies[0]["state"], Value::Null);
    assert_eq!(replies[3]["trace"], json!(["Input.1", "Input.1", "State.[1,1]"]));
    assert_eq!(replies[4], json!({ "status": "error", "message": "`Output.3` is not enabled", "code": "rejected" }));
    assert_eq!(replies[5], replies[3]);
    assert_eq!(replies[6], json!({ "status": "bye" }));
}

#[test]
fn choose_by_id_and_machine_state() {
    let replies = converse(&[
        json!({ "cmd": "start", "model": "bounded_buffer", "target": "BoundedBuffer" }),
        json!({ "cmd": "choose", "eventId": 0 }),
    ]);
    assert_eq!(replies[0]["events"][0]["label"], "Input.0");
    assert_eq!(replies[1]["state"], json!({ "sz": 1, "buf": [0] }));
    assert_eq!(replies[1]["trace"], json!(["Input.0"]));
}

#[test]
fn errors_keep_the_connection_open() {
    let replies = converse(&[
        json!({ "cmd": "prompt" }),
        json!({ "cmd": "bogus" }),
        json!({ "cmd": "start", "source": "process P = skip", "target": "P" }),
        json!({ "cmd": "choose" }),
        json!({ "cmd": "continue" }),
    ]);
    assert_eq!(replies[0]["code"], "no_session");
    assert_eq!(replies[1]["code"], "bad_request");
    assert_eq!(replies[2]["status"], "terminated");
    assert_eq!(replies[3]["code"], "bad_request");
    assert_eq!(replies[4]["code"], "not_running");
}
