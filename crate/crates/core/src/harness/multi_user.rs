use crate::channel::ChannelEnv;
use crate::error::{Error, Result};
use crate::nn::{AccessTask, TaskStep};

/// Largest action space a centralized multi-user agent may enumerate.
pub const MAX_MULTI_USER_ACTIONS: usize = 4_096;

/// All `users`-element channel subsets in lexicographic order.
pub fn channel_subsets(n_channels: usize, users: usize) -> Result<Vec<Vec<usize>>> {
    if users == 0 || users > n_channels {
        return Err(Error::InvalidArgument(format!(
            "{users} users cannot share {n_channels} channels"
        )));
    }
    let mut count: u128 = 1;
    for i in 0..users {
        count = count * (n_channels - i) as u128 / (i + 1) as u128;
    }
    if count > MAX_MULTI_USER_ACTIONS as u128 {
        return Err(Error::Capacity(format!(
            "{count} channel subsets exceed the action cap of {MAX_MULTI_USER_ACTIONS}"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur: Vec<usize> = (0..users).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..users).rev().find(|&i| cur[i] < n_channels - users + i) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..users {
            cur[j] = cur[j - 1] + 1;
        }
    }
    Ok(out)
}

/// Every user senses its own channel in the same slot; the step reward is
/// the sum of the users' `+1`/`-1` rewards.
pub fn multi_user_step(env: &mut ChannelEnv, channels: &[usize]) -> Result<(Vec<bool>, f64)> {
    if channels.is_empty() {
        return Err(Error::InvalidArgument("no channels assigned".into()));
    }
    for (i, c) in channels.iter().enumerate() {
        if channels[..i].contains(c) {
            return Err(Error::InvalidArgument(format!(
                "channel {c} assigned to two users"
            )));
        }
    }
    let obs = env.step_many(channels)?;
    let reward = obs.iter().map(|&g| if g { 1.0 } else { -1.0 }).sum();
    Ok((obs, reward))
}

/// Centralized controller choosing one channel subset per slot.
#[derive(Debug, Clone)]
pub struct MultiUserTask {
    env: ChannelEnv,
    subsets: Vec<Vec<usize>>,
}

impl MultiUserTask {
    pub fn new(env: ChannelEnv, users: usize) -> Result<Self> {
        let subsets = channel_subsets(env.n_channels(), users)?;
        Ok(Self { env, subsets })
    }

    pub fn users(&self) -> usize {
        self.subsets[0].len()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn env(&self) -> &ChannelEnv {
        &self.env
    }
}

impl AccessTask for MultiUserTask {
    fn n_channels(&self) -> usize {
        self.env.n_channels()
    }

    fn n_actions(&self) -> usize {
        self.subsets.len()
    }

    fn reset(&mut self) -> Result<()> {
        self.env.reset()
    }

    fn step(&mut self, action: usize) -> Result<TaskStep> {
        let channels = self.subsets.get(action).ok_or_else(|| {
            Error::InvalidArgument(format!("action {action} outside 0..{}", self.subsets.len()))
        })?;
        let (obs, reward) = multi_user_step(&mut self.env, channels)?;
        Ok(TaskStep {
            reward,
            sensed: channels.iter().copied().zip(obs).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ChannelModel, SlidingWindowModel};

    fn six_of_eight() -> ChannelEnv {
        let m = SlidingWindowModel::new(8, 6, 1.0).unwrap();
        ChannelEnv::new(ChannelModel::Window(m), 0).unwrap()
    }

    #[test]
    fn subsets_are_lexicographic() {
        let s = channel_subsets(4, 2).unwrap();
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(channel_subsets(8, 3).unwrap().len(), 56);
        assert_eq!(channel_subsets(3, 3).unwrap(), vec![vec![0, 1, 2]]);
        assert!(matches!(channel_subsets(40, 20), Err(Error::Capacity(_))));
    }

    #[test]
    fn summed_rewards() {
        let mut env = six_of_eight();
        let good: Vec<usize> = (0..8).filter(|&c| env.full_state().is_good(c)).collect();
        let bad: Vec<usize> = (0..8).filter(|&c| !env.full_state().is_good(c)).collect();
        let (_, r) = multi_user_step(&mut env.clone(), &[good[0], good[1]]).unwrap();
        assert_eq!(r, 2.0);
        let (_, r) = multi_user_step(&mut env.clone(), &[good[0], bad[0]]).unwrap();
        assert_eq!(r, 0.0);
        let n_good = env.full_state().good_count() as f64;
        let all: Vec<usize> = (0..8).collect();
        let (_, r) = multi_user_step(&mut env, &all).unwrap();
        assert_eq!(r, 2.0 * n_good - 8.0);
    }

    #[test]
    fn duplicate_channels_rejected() {
        let mut env = six_of_eight();
        assert!(multi_user_step(&mut env, &[1, 1]).is_err());
    }
}
