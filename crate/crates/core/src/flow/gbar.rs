//! The running-coupling recursion.

/// Iterate `ḡ_{j+1} = ḡ_j - β_j ḡ_j²`. When fewer β values than steps
/// are supplied, the last one is frozen for the remaining steps.
pub fn gbar_flow(g0: f64, beta: &[f64], steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut g = g0;
    out.push(g);
    for j in 0..steps {
        let b = beta
            .get(j)
            .or(beta.last())
            .copied()
            .unwrap_or(0.0);
        g = g - b * g * g;
        out.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_without_beta() {
        let seq = gbar_flow(0.3, &[], 10);
        assert!(seq.iter().all(|&g| g == 0.3));
    }

    #[test]
    fn single_step_arithmetic() {
        let seq = gbar_flow(0.1, &[1.0], 1);
        assert!((seq[1] - 0.09).abs() < 1e-15);
    }

    #[test]
    fn long_run_asymptotics() {
        // with β frozen at β∞, j·ḡ_j → 1/β∞
        let beta = std::f64::consts::LN_2 / (std::f64::consts::PI * std::f64::consts::PI);
        let n = 10_000;
        let seq = gbar_flow(0.1, &[beta], n);
        let j_gj = n as f64 * seq[n];
        let target = 1.0 / beta;
        assert!(
            (j_gj - target).abs() < 0.1 * target,
            "j ḡ_j = {j_gj}, 1/β = {target}"
        );
    }
}
