//! Reading a binary sequence from an argument, a file, or standard input.

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;

use clap::Args;
use umm_core::{parse_sequence, BinarySequence};

use crate::Failure;

#[derive(Debug, Args)]
pub struct SequenceInput {
    /// Sequence over {0,1}; whitespace is ignored. Reads standard input when
    /// neither this nor --file is given.
    #[arg(conflicts_with = "file")]
    pub sequence: Option<String>,

    /// Read the sequence from a file ("-" for standard input).
    #[arg(long, short = 'f')]
    pub file: Option<PathBuf>,

    /// Treat the input as raw bytes, one observation per byte (0x00 or 0x01).
    #[arg(long)]
    pub binary: bool,
}

impl SequenceInput {
    pub fn read(&self) -> Result<BinarySequence, Failure> {
        let bytes = match (&self.sequence, &self.file) {
            (Some(s), _) => s.clone().into_bytes(),
            (None, Some(path)) if path.as_os_str() != "-" => fs::read(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?,
            _ => {
                let mut buf = Vec::new();
                io::stdin()
                    .read_to_end(&mut buf)
                    .map_err(|e| Failure::input(format!("cannot read standard input: {e}")))?;
                buf
            }
        };
        if self.binary {
            return BinarySequence::from_bytes(&bytes).map_err(Failure::from);
        }
        let text = String::from_utf8(bytes).map_err(|e| {
            Failure::input(format!(
                "input is not UTF-8 text (byte offset {}); use --binary for raw bytes",
                e.utf8_error().valid_up_to()
            ))
        })?;
        parse_sequence(&text).map_err(Failure::from)
    }
}
