use rand::Rng;

use crate::error::{Error, Result};
use crate::SimRng;

pub const DEFAULT_REPLAY_CAPACITY: usize = 1_000_000;

/// One transition `(x_t, a_t, r_t, x_{t+1})` with histories in their
/// flattened encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperienceRecord {
    pub state: Vec<i8>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<i8>,
}

/// Ring buffer of transitions that overwrites the oldest record once full.
/// Storage grows on demand up to the capacity.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    width: usize,
    states: Vec<i8>,
    next_states: Vec<i8>,
    actions: Vec<u32>,
    rewards: Vec<f64>,
    head: usize,
    len: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, state_width: usize) -> Result<Self> {
        if capacity == 0 || state_width == 0 {
            return Err(Error::InvalidArgument(
                "replay buffer needs positive capacity and state width".into(),
            ));
        }
        Ok(Self {
            capacity,
            width: state_width,
            states: Vec::new(),
            next_states: Vec::new(),
            actions: Vec::new(),
            rewards: Vec::new(),
            head: 0,
            len: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn state_width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn clear(&mut self) {
        self.states.clear();
        self.next_states.clear();
        self.actions.clear();
        self.rewards.clear();
        self.head = 0;
        self.len = 0;
    }

    pub fn push(&mut self, state: &[i8], action: usize, reward: f64, next_state: &[i8]) -> Result<()> {
        for s in [state, next_state] {
            if s.len() != self.width {
                return Err(Error::Dimension {
                    expected: self.width,
                    found: s.len(),
                });
            }
        }
        let action = u32::try_from(action)
            .map_err(|_| Error::InvalidArgument(format!("action {action} too large")))?;
        if self.len < self.capacity {
            self.states.extend_from_slice(state);
            self.next_states.extend_from_slice(next_state);
            self.actions.push(action);
            self.rewards.push(reward);
            self.len += 1;
        } else {
            let i = self.head;
            self.states[i * self.width..(i + 1) * self.width].copy_from_slice(state);
            self.next_states[i * self.width..(i + 1) * self.width].copy_from_slice(next_state);
            self.actions[i] = action;
            self.rewards[i] = reward;
            self.head = (self.head + 1) % self.capacity;
        }
        Ok(())
    }

    pub fn push_record(&mut self, record: &ExperienceRecord) -> Result<()> {
        self.push(&record.state, record.action, record.reward, &record.next_state)
    }

    fn slot(&self, i: usize) -> usize {
        if self.len < self.capacity {
            i
        } else {
            (self.head + i) % self.capacity
        }
    }

    pub fn state(&self, slot: usize) -> &[i8] {
        &self.states[slot * self.width..(slot + 1) * self.width]
    }

    pub fn next_state(&self, slot: usize) -> &[i8] {
        &self.next_states[slot * self.width..(slot + 1) * self.width]
    }

    pub fn action(&self, slot: usize) -> usize {
        self.actions[slot] as usize
    }

    pub fn reward(&self, slot: usize) -> f64 {
        self.rewards[slot]
    }

    /// Record `i` in insertion order, 0 being the oldest still held.
    pub fn get(&self, i: usize) -> Option<ExperienceRecord> {
        (i < self.len).then(|| {
            let s = self.slot(i);
            ExperienceRecord {
                state: self.state(s).to_vec(),
                action: self.action(s),
                reward: self.reward(s),
                next_state: self.next_state(s).to_vec(),
            }
        })
    }

    /// `count` storage slots drawn uniformly with replacement.
    pub fn sample_slots(&self, count: usize, rng: &mut SimRng) -> Result<Vec<usize>> {
        if self.len < count {
            return Err(Error::NotReady {
                have: self.len,
                need: count,
            });
        }
        Ok((0..count).map(|_| rng.gen_range(0..self.len)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: i8) -> ExperienceRecord {
        ExperienceRecord {
            state: vec![k, 0],
            action: k as usize,
            reward: f64::from(k),
            next_state: vec![0, k],
        }
    }

    #[test]
    fn keeps_last_records_in_order() {
        let mut buf = ReplayBuffer::new(3, 2).unwrap();
        for k in 0..7 {
            buf.push_record(&rec(k)).unwrap();
        }
        assert_eq!(buf.len(), 3);
        let held: Vec<_> = (0..3).map(|i| buf.get(i).unwrap()).collect();
        assert_eq!(held, vec![rec(4), rec(5), rec(6)]);
        assert!(buf.get(3).is_none());
    }

    #[test]
    fn sampling_requires_enough_records() {
        use rand::SeedableRng;
        let mut rng = SimRng::seed_from_u64(0);
        let mut buf = ReplayBuffer::new(10, 2).unwrap();
        buf.push_record(&rec(1)).unwrap();
        assert!(matches!(
            buf.sample_slots(32, &mut rng),
            Err(Error::NotReady { have: 1, need: 32 })
        ));
        assert!(buf.push(&[1], 0, 0.0, &[1, 1]).is_err());
    }
}
