//! The `.mps` definition language.

mod lexer;
mod parser;
mod render;

pub use lexer::Pos;
pub use parser::{parse_module, ModuleError, SessionDef, SourceModule};
pub use render::{render_global, render_module, render_process, render_queue, Printer};
