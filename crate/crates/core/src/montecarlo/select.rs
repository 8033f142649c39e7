//! In-place selection of the k-th largest element.

/// Returns the element with the `k`-th largest key (1-based), reordering `v`.
///
/// Quickselect with a median-of-three pivot and three-way partition, so
/// runs of equal keys cost nothing extra. Expected linear time; fully
/// deterministic.
///
/// # Panics
/// If `k == 0` or `k > v.len()`.
pub fn select_kth_largest_by<T: Copy>(v: &mut [T], k: usize, key: impl Fn(&T) -> f64) -> T {
    assert!(k >= 1 && k <= v.len(), "rank {k} out of range for {} elements", v.len());
    // Position of the answer in descending order.
    let target = k - 1;
    let (mut lo, mut hi) = (0usize, v.len());
    loop {
        if hi - lo <= 1 {
            return v[lo];
        }
        let pivot = median_of_three(key(&v[lo]), key(&v[lo + (hi - lo) / 2]), key(&v[hi - 1]));
        // Dutch-flag partition into [> pivot | == pivot | < pivot].
        let (mut gt, mut i, mut lt) = (lo, lo, hi);
        while i < lt {
            let x = key(&v[i]);
            if x > pivot {
                v.swap(gt, i);
                gt += 1;
                i += 1;
            } else if x < pivot {
                lt -= 1;
                v.swap(i, lt);
            } else {
                i += 1;
            }
        }
        if target < gt {
            hi = gt;
        } else if target < lt {
            return v[gt];
        } else {
            lo = lt;
        }
    }
}

/// [`select_kth_largest_by`] on plain values.
pub fn select_kth_largest(v: &mut [f64], k: usize) -> f64 {
    select_kth_largest_by(v, k, |x| *x)
}

fn median_of_three(a: f64, b: f64, c: f64) -> f64 {
    if a < b {
        if b < c {
            b
        } else if a < c {
            c
        } else {
            a
        }
    } else if a < c {
        a
    } else if b < c {
        c
    } else {
        b
    }
}
