use std::io::IsTerminal;

use serde_json::Value;

/// Result of a subcommand: text and JSON renderings plus the exit status.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

impl Report {
    pub fn new(text: String, json: Value, ok: bool) -> Self {
        Report { text, json, ok }
    }

    pub fn print(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(&self.json).expect("serializable"));
        } else {
            print!("{}", self.text);
            if !self.text.ends_with('\n') {
                println!();
            }
        }
    }
}

fn color_enabled() -> bool {
    std::env::var("FOLID_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

/// `PASS` or `FAIL`, colored when writing to a terminal.
pub fn verdict_word(ok: bool) -> String {
    let word = if ok { "PASS" } else { "FAIL" };
    if color_enabled() {
        let code = if ok { 32 } else { 31 };
        format!("\x1b[1;{code}m{word}\x1b[0m")
    } else {
        word.to_string()
    }
}
