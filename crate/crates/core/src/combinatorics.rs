//! Binomial coefficients and lexicographic subset enumeration.

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
///
/// Intermediate products stay exact because each partial result
/// `C(n - k + i, i)` is an integer.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc
}

/// All `k`-subsets of `items`, each sorted, in lexicographic order.
pub fn subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let n = items.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, k) as usize);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance the rightmost index that still has room
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if idx[pos] < n - k + pos {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return out;
            }
        }
        if k == 0 {
            return out;
        }
    }
}
