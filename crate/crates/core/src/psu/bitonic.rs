//! Batcher bitonic sorting network, used as an independent reference sorter
//! and as the comparator-count baseline for the cost model.

/// One compare-exchange element. After it fires, `lo` holds the smaller key
/// when `ascending`, the larger otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Comparator {
    pub lo: usize,
    pub hi: usize,
    pub ascending: bool,
}

/// Comparators of the bitonic network for `n` inputs, in firing order.
/// `n` must be a power of two.
pub fn bitonic_network(n: usize) -> Vec<Comparator> {
    assert!(n.is_power_of_two(), "bitonic network size must be a power of two");
    let mut net = Vec::new();
    let mut k = 2;
    while k <= n {
        let mut j = k / 2;
        while j > 0 {
            for i in 0..n {
                let l = i ^ j;
                if l > i {
                    net.push(Comparator {
                        lo: i,
                        hi: l,
                        ascending: i & k == 0,
                    });
                }
            }
            j /= 2;
        }
        k *= 2;
    }
    net
}

/// Closed-form Batcher network size `n log2(n) (log2(n) + 1) / 4`.
pub fn batcher_comparator_count(n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    let m = n.next_power_of_two();
    let lg = m.trailing_zeros() as usize;
    m * lg * (lg + 1) / 4
}

/// Sorts `keys` ascending through the bitonic network, padding to the next
/// power of two with `u32::MAX` sentinels. Returns the sorted keys (padding
/// stripped) and the number of comparators the padded network fired.
pub fn bitonic_sort(keys: &[u32]) -> (Vec<u32>, usize) {
    if keys.len() <= 1 {
        return (keys.to_vec(), 0);
    }
    let m = keys.len().next_power_of_two();
    let mut v = keys.to_vec();
    v.resize(m, u32::MAX);
    let net = bitonic_network(m);
    for c in &net {
        if (v[c.lo] > v[c.hi]) == c.ascending {
            v.swap(c.lo, c.hi);
        }
    }
    v.truncate(keys.len());
    (v, net.len())
}
