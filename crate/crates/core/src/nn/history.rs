use crate::error::{Error, Result};

/// Per-slot encoding: `+1` at the sensed channel if it was good, `-1` if it
/// was bad, zero elsewhere.
pub fn encode_slot(action: usize, observation: bool, n_channels: usize) -> Result<Vec<i8>> {
    encode_slot_multi(&[(action, observation)], n_channels)
}

/// Slot encoding with one signed entry per sensed channel.
pub fn encode_slot_multi(sensed: &[(usize, bool)], n_channels: usize) -> Result<Vec<i8>> {
    let mut v = vec![0i8; n_channels];
    for &(a, obs) in sensed {
        if a >= n_channels {
            return Err(Error::InvalidArgument(format!(
                "action {a} outside channels 0..{n_channels}"
            )));
        }
        if v[a] != 0 {
            return Err(Error::InvalidArgument(format!("channel {a} sensed twice in one slot")));
        }
        v[a] = if obs { 1 } else { -1 };
    }
    Ok(v)
}

/// Inverse of [`encode_slot`]; `None` for anything other than a single
/// `+1`/`-1` entry.
pub fn decode_slot(slot: &[i8]) -> Option<(usize, bool)> {
    let mut found = None;
    for (i, &x) in slot.iter().enumerate() {
        match x {
            0 => {}
            1 | -1 if found.is_none() => found = Some((i, x == 1)),
            _ => return None,
        }
    }
    found
}

/// Window of the last `M` slot encodings, stored flattened oldest first.
/// A fresh history is all zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HistoryState {
    n_channels: usize,
    window: usize,
    data: Vec<i8>,
}

impl HistoryState {
    pub fn new(n_channels: usize, window: usize) -> Result<Self> {
        if n_channels == 0 || window == 0 {
            return Err(Error::InvalidArgument(
                "history needs at least one channel and one slot".into(),
            ));
        }
        Ok(Self {
            n_channels,
            window,
            data: vec![0; n_channels * window],
        })
    }

    pub fn from_flat(n_channels: usize, window: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != n_channels * window {
            return Err(Error::Dimension {
                expected: n_channels * window,
                found: data.len(),
            });
        }
        Ok(Self {
            n_channels,
            window,
            data,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Flattened width `M * N`.
    pub fn width(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.data
    }

    /// Encoding of slot `i`, 0 being the oldest.
    pub fn slot(&self, i: usize) -> &[i8] {
        &self.data[i * self.n_channels..(i + 1) * self.n_channels]
    }

    pub fn clear(&mut self) {
        self.data.fill(0);
    }

    /// Drops the oldest slot and appends `encoding`.
    pub fn push_encoding(&mut self, encoding: &[i8]) -> Result<()> {
        if encoding.len() != self.n_channels {
            return Err(Error::Dimension {
                expected: self.n_channels,
                found: encoding.len(),
            });
        }
        self.data.copy_within(self.n_channels.., 0);
        let start = self.data.len() - self.n_channels;
        self.data[start..].copy_from_slice(encoding);
        Ok(())
    }

    pub fn push(&mut self, action: usize, observation: bool) -> Result<()> {
        let e = encode_slot(action, observation, self.n_channels)?;
        self.push_encoding(&e)
    }

    pub fn push_multi(&mut self, sensed: &[(usize, bool)]) -> Result<()> {
        let e = encode_slot_multi(sensed, self.n_channels)?;
        self.push_encoding(&e)
    }

    /// Writes the history as network input.
    pub fn write_input(&self, out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(&self.data) {
            *o = f64::from(x);
        }
    }

    pub fn to_input(&self) -> Vec<f64> {
        self.data.iter().map(|&x| f64::from(x)).collect()
    }
}
