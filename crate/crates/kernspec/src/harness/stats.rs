//! Small statistics helpers for the summary emitter.

/// Mean and (population) standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Ranks with average tie handling (1-based ranks as reals).
fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg_rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation. Returns NaN for fewer than 2 points or a
/// constant sequence.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return f64::NAN;
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let (mx, sx) = mean_std(&rx);
    let (my, sy) = mean_std(&ry);
    if sx == 0.0 || sy == 0.0 {
        return f64::NAN;
    }
    let cov = rx
        .iter()
        .zip(&ry)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / x.len() as f64;
    cov / (sx * sy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spearman_monotone_is_one() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [10.0, 20.0, 25.0, 90.0];
        assert_relative_eq!(spearman(&x, &y), 1.0);
        let y_rev = [90.0, 25.0, 20.0, 10.0];
        assert_relative_eq!(spearman(&x, &y_rev), -1.0);
    }

    #[test]
    fn spearman_handles_ties() {
        // Oracle: hand-computed Pearson on average ranks.
        // x ranks: 1, 2.5, 2.5, 4; y ranks: 2, 1, 3, 4.
        let x = [1.0, 2.0, 2.0, 3.0];
        let y = [5.0, 1.0, 7.0, 9.0];
        let rho = spearman(&x, &y);
        let rx = [1.0, 2.5, 2.5, 4.0];
        let ry = [2.0, 1.0, 3.0, 4.0];
        let (mx, sx) = mean_std(&rx);
        let (my, sy) = mean_std(&ry);
        let cov: f64 = rx
            .iter()
            .zip(&ry)
            .map(|(a, b)| (a - mx) * (b - my))
            .sum::<f64>()
            / 4.0;
        assert_relative_eq!(rho, cov / (sx * sy), epsilon = 1e-12);
    }

    #[test]
    fn mean_std_basics() {
        let (m, s) = mean_std(&[2.0, 4.0]);
        assert_relative_eq!(m, 3.0);
        assert_relative_eq!(s, 1.0);
    }
}
