/// Binomial coefficient `C(n, k)` as a float; exact for the small
/// arguments (n ≲ 60) used by the closed forms.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Weak compositions of `total` into `parts` non-negative integers.
///
/// Yields every vector `(k_1, …, k_parts)` with `Σ k_n = total` exactly
/// once, starting from `(total, 0, …, 0)` in reverse lexicographic order.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u32>>,
}

/// Enumerates `{k_n ≥ 0 : Σ_{n=1}^{parts} k_n = total}`. Panics if
/// `parts == 0`.
pub fn compositions(total: u32, parts: usize) -> Compositions {
    assert!(parts >= 1, "compositions need at least one part");
    let mut first = vec![0; parts];
    first[0] = total;
    Compositions {
        current: Some(first),
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let parts = out.len();
        // Rightmost non-zero entry that can still move one unit right.
        if let Some(i) = (0..parts.saturating_sub(1)).rev().find(|&i| out[i] > 0) {
            let mut next = out.clone();
            next[i] -= 1;
            let tail: u32 = next[i + 1..].iter().sum();
            next[i + 1] = tail + 1;
            next[i + 2..].iter_mut().for_each(|v| *v = 0);
            self.current = Some(next);
        }
        Some(out)
    }
}
