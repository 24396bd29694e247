use crate::error::Result;
use crate::numerics::RngStream;
use crate::par;
use crate::power::direct::PcSolution;
use crate::power::network::{weighted_sum_rate, PowerVector, SisoNetwork};

/// Uniform random powers: each entry in `[0, p_max / T]`, so every link
/// budget holds.
pub fn random_start(net: &SisoNetwork, rng: &mut RngStream) -> PowerVector {
    let cap = net.p_max() / net.bands() as f64;
    let values = (0..net.links() * net.bands()).map(|_| rng.uniform_in(0.0, cap)).collect();
    PowerVector::new(net.links(), net.bands(), values).expect("shape from the network")
}

/// Runs `solve` from `starts` random points (stream `k` of `seed` for start
/// `k`) and keeps the highest weighted sum rate; ties go to the lower index.
pub fn best_of_starts<F>(net: &SisoNetwork, starts: usize, seed: u64, solve: F) -> Result<PcSolution>
where
    F: Fn(&PowerVector) -> Result<PcSolution> + Sync + Send,
{
    assert!(starts > 0, "need at least one start");
    let base = RngStream::new(seed);
    let runs = par::map_range(starts, |k| solve(&random_start(net, &mut base.fork(k as u64))));
    let mut best: Option<(f64, PcSolution)> = None;
    for run in runs {
        let sol = run?;
        let f = weighted_sum_rate(&sol.p, net);
        if best.as_ref().map_or(true, |(b, _)| f > *b) {
            best = Some((f, sol));
        }
    }
    Ok(best.expect("starts > 0").1)
}
