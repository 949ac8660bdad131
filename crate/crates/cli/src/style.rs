use std::io::IsTerminal;

/// ANSI colouring of verdict words. `MPST_COLOR=0` turns it off,
/// `MPST_COLOR=1` forces it on; otherwise it follows whether stdout is a
/// terminal.
pub struct Style {
    enabled: bool,
}

impl Style {
    pub fn from_env() -> Self {
        let enabled = match std::env::var("MPST_COLOR").as_deref() {
            Ok("0") => false,
            Ok("1") => true,
            _ => std::io::stdout().is_terminal(),
        };
        Style { enabled }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.enabled {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn good(&self, text: &str) -> String {
        self.paint("32", text)
    }

    pub fn bad(&self, text: &str) -> String {
        self.paint("31", text)
    }

    pub fn unsure(&self, text: &str) -> String {
        self.paint("33", text)
    }

    pub fn dim(&self, text: &str) -> String {
        self.paint("2", text)
    }
}
