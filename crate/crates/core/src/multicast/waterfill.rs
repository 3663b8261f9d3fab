use crate::channel::CMatrix;

/// Water-filling powers for parallel channels with gains `gains` (`σ²/N0`),
/// in the input order. Zero gains get zero power.
pub fn waterfilling_powers(gains: &[f64], power: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
    let mut out = vec![0.0; gains.len()];
    // shrink the active set until the weakest active channel is under water
    let mut active = order.len();
    while active > 0 {
        let inv_sum: f64 = order[..active].iter().map(|&i| 1.0 / gains[i]).sum();
        let level = (power + inv_sum) / active as f64;
        if level > 1.0 / gains[order[active - 1]] {
            for &i in &order[..active] {
                out[i] = level - 1.0 / gains[i];
            }
            return out;
        }
        active -= 1;
    }
    out
}

/// Point-to-point MIMO capacity `Σ_j log2(1 + p_j σ_j²/N0)` under water-filling.
pub fn waterfilling_capacity(h: &CMatrix, power: f64, n0: f64) -> f64 {
    let sv = h.clone().singular_values();
    let gains: Vec<f64> = sv.iter().map(|s| s * s / n0).collect();
    let p = waterfilling_powers(&gains, power);
    gains.iter().zip(&p).map(|(g, p)| (1.0 + g * p).log2()).sum()
}
