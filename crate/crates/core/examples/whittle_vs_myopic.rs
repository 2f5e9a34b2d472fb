//! Whittle indices of a Gilbert-Elliott chain, and the Whittle and myopic
//! policies choosing identical channels on identical positively correlated
//! channels.

use rand::SeedableRng;

use chanaccess::belief::BeliefVector;
use chanaccess::channel::{build_joint_from_marginals, ChannelEnv, ChannelModel};
use chanaccess::policy::{AccessPolicy, GilbertElliotChain, MyopicPolicy, WhittleIndexer, WhittlePolicy};
use chanaccess::SimRng;

fn main() -> chanaccess::Result<()> {
    let chain = GilbertElliotChain::new(0.3, 0.8)?;
    let mut indexer = WhittleIndexer::new(chain, 0.9)?;
    for omega in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("W({omega:.2}) = {:.4}", indexer.index(omega)?);
    }

    let n = 4;
    let joint = build_joint_from_marginals(&vec![chain.to_matrix(); n])?;
    let initial = BeliefVector::from_unnormalized(n, vec![1.0; 1 << n])?;
    let mut myopic = MyopicPolicy::new(joint.clone(), initial);
    let mut whittle = WhittlePolicy::new(&vec![chain; n], 0.9)?;
    whittle.set_beliefs(vec![0.5; n])?;
    let mut env = ChannelEnv::new(ChannelModel::Joint(joint), 3)?;
    let mut rng = SimRng::seed_from_u64(0);
    let mut agree = 0;
    let mut sequence = Vec::new();
    for _ in 0..1_000 {
        let a = whittle.act(&mut rng)?;
        let b = myopic.act(&mut rng)?;
        agree += usize::from(a == b);
        let o = env.step(a)?;
        whittle.observe(a, o.observation)?;
        myopic.observe(a, o.observation)?;
        if sequence.len() < 20 {
            sequence.push(a);
        }
    }
    println!("first actions {sequence:?}");
    println!("agreement {agree}/1000");
    Ok(())
}
