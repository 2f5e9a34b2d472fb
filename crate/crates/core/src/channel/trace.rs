use std::fmt::Write as _;
use std::path::Path;

use super::ChannelState;
use crate::error::{Error, Result};

/// A recorded sequence of channel states, replayed slot by slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceModel {
    slots: Vec<ChannelState>,
}

impl TraceModel {
    pub fn new(slots: Vec<ChannelState>) -> Result<Self> {
        let Some(first) = slots.first() else {
            return Err(Error::InvalidModel("trace has no slots".into()));
        };
        let n = first.n_channels();
        if let Some(i) = slots.iter().position(|s| s.n_channels() != n) {
            return Err(Error::InvalidModel(format!(
                "trace slot {i} has {} channels, expected {n}",
                slots[i].n_channels()
            )));
        }
        Ok(Self { slots })
    }

    pub fn n_channels(&self) -> usize {
        self.slots[0].n_channels()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, i: usize) -> Option<&ChannelState> {
        self.slots.get(i)
    }

    pub fn slots(&self) -> &[ChannelState] {
        &self.slots
    }

    /// Per-channel state sequence.
    pub fn channel_series(&self, channel: usize) -> Vec<bool> {
        self.slots.iter().map(|s| s.is_good(channel)).collect()
    }
}

/// Parses the plain-text trace format: one slot per line, `N` whitespace
/// separated `0`/`1` tokens, `#` starts a comment line.
pub fn parse_trace(text: &str) -> Result<TraceModel> {
    let mut slots = Vec::new();
    let mut width = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bits = line
            .split_whitespace()
            .map(|tok| match tok {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::TraceParse {
                    line: line_no,
                    msg: format!("token {other:?} is not 0 or 1"),
                }),
            })
            .collect::<Result<Vec<bool>>>()?;
        match width {
            None => width = Some(bits.len()),
            Some(w) if w != bits.len() => {
                return Err(Error::TraceParse {
                    line: line_no,
                    msg: format!("expected {w} channels, found {}", bits.len()),
                })
            }
            _ => {}
        }
        slots.push(ChannelState::new(bits).expect("nonempty line has tokens"));
    }
    if slots.is_empty() {
        return Err(Error::TraceParse {
            line: last_line.max(1),
            msg: "trace contains no slots".into(),
        });
    }
    TraceModel::new(slots)
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<TraceModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text)
}

pub fn write_trace(path: impl AsRef<Path>, trace: &TraceModel, header: &str) -> Result<()> {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    for slot in trace.slots() {
        let row: Vec<&str> = slot.bits().iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    let path = path.as_ref();
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
