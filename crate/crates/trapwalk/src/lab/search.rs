use crate::walk::{search_step, SearchSetup, WalkState2D};
use crate::Result;

/// Marked-site probability of a search walk.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub setup: SearchSetup,
    /// P(marked, t) for t = 0..=max_steps; the probability of site (0, 0)
    /// when nothing is marked.
    pub series: Vec<f64>,
    /// (t*, P*) of the first local maximum reaching half the largest value.
    pub first_peak: Option<(usize, f64)>,
    /// (t, P) of the largest value.
    pub max: (usize, f64),
    /// Largest deviation of any site probability from 1/N over the run.
    pub max_site_deviation: f64,
}

/// Starts from Φ₀ and applies `max_steps` search steps (C0 everywhere, C1 at
/// the marked site, then the flip-flop shift with fixed boundaries).
pub fn search_experiment(setup: &SearchSetup, max_steps: usize) -> Result<SearchResult> {
    let mut s = WalkState2D::search_initial(setup);
    let probe = setup.marked.unwrap_or((0, 0));
    let uniform = 1.0 / setup.n_sites() as f64;
    let deviation = |s: &WalkState2D| {
        s.site_distribution()
            .iter()
            .map(|&(_, _, p)| (p - uniform).abs())
            .fold(0.0, f64::max)
    };
    let mut series = Vec::with_capacity(max_steps + 1);
    series.push(s.site_probability(probe.0, probe.1));
    let mut max_site_deviation = deviation(&s);
    for _ in 0..max_steps {
        search_step(&mut s, setup)?;
        series.push(s.site_probability(probe.0, probe.1));
        max_site_deviation = max_site_deviation.max(deviation(&s));
    }
    let max = series
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, (t, p)| if p > a.1 { (t, p) } else { a });
    let first_peak = (1..series.len().saturating_sub(1))
        .find(|&t| {
            series[t] > series[t - 1] + 1e-12 && series[t] >= series[t + 1] && series[t] >= 0.5 * max.1
        })
        .map(|t| (t, series[t]));
    Ok(SearchResult {
        setup: *setup,
        series,
        first_peak,
        max,
        max_site_deviation,
    })
}
