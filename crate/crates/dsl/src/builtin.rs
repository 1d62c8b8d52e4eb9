//! Example models shipped with the library, addressable by name from the
//! command line and the HTTP API.

pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "buffer",
        summary: "unbounded reactive buffer with Input, Output and State channels",
        source: include_str!("../../../models/buffer.itm"),
    },
    Builtin {
        name: "reverse",
        summary: "annotated list reversal with Hoare assertions",
        source: include_str!("../../../models/reverse.itm"),
    },
    Builtin {
        name: "ring",
        summary: "ring buffer of one-place cells behind a controller",
        source: include_str!("../../../models/ring.itm"),
    },
    Builtin {
        name: "bounded_buffer",
        summary: "bounded buffer Z-Machine with Input, Output and Size",
        source: include_str!("../../../models/bounded_buffer.itm"),
    },
];

pub fn builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}
