//! Set operations on ascending doc-id lists.

/// Intersection of two ascending lists.
///
/// Gallops through the longer list when the sizes are lopsided.
pub fn intersect(a: &[u64], b: &[u64]) -> Vec<u64> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = Vec::with_capacity(small.len());
    if small.is_empty() {
        return out;
    }
    if large.len() / small.len() >= 16 {
        let mut rest = large;
        for &id in small {
            let pos = gallop(rest, id);
            rest = &rest[pos..];
            match rest.first() {
                Some(&x) if x == id => {
                    out.push(id);
                    rest = &rest[1..];
                }
                Some(_) => {}
                None => break,
            }
        }
        return out;
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(small[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

// First index with list[idx] >= target.
fn gallop(list: &[u64], target: u64) -> usize {
    let mut bound = 1;
    while bound < list.len() && list[bound - 1] < target {
        bound *= 2;
    }
    let lo = bound / 2;
    let hi = bound.min(list.len());
    lo + list[lo..hi].partition_point(|&x| x < target)
}

/// Size of the intersection, without allocating.
pub fn intersect_count(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Union of two ascending lists.
pub fn union(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Intersection of many lists, smallest first. `None` for an empty input.
pub fn intersect_all<L: AsRef<[u64]>>(lists: &[L]) -> Option<Vec<u64>> {
    let mut sorted: Vec<&[u64]> = lists.iter().map(AsRef::as_ref).collect();
    sorted.sort_by_key(|l| l.len());
    let (first, rest) = sorted.split_first()?;
    let mut acc = first.to_vec();
    for list in rest {
        if acc.is_empty() {
            break;
        }
        acc = intersect(&acc, list);
    }
    Some(acc)
}

/// Union of many lists.
pub fn union_all<L: AsRef<[u64]>>(lists: &[L]) -> Vec<u64> {
    lists.iter().fold(Vec::new(), |acc, l| union(&acc, l.as_ref()))
}

pub fn is_strictly_ascending(list: &[u64]) -> bool {
    list.windows(2).all(|w| w[0] < w[1])
}
