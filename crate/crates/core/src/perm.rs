use alloc::vec::Vec;

/// Advances `items` to the next permutation in lexicographic order; returns
/// `false` (leaving `items` sorted ascending) after the last one.
pub(crate) fn next_permutation<T: Ord>(items: &mut [T]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let mut i = items.len() - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        items.reverse();
        return false;
    }
    let mut j = items.len() - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

/// All permutations of `items` (assumed sorted) in lexicographic order.
pub(crate) fn all_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut current = items.to_vec();
    current.sort_unstable();
    let mut out = Vec::new();
    loop {
        out.push(current.clone());
        if !next_permutation(&mut current) {
            return out;
        }
    }
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).try_fold(1u64, |acc, x| acc.checked_mul(x)).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_in_order() {
        let perms = all_permutations(&[0, 1, 2]);
        assert_eq!(
            perms,
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
        );
        assert_eq!(all_permutations(&[]).len(), 1);
        assert_eq!(all_permutations(&[0, 1, 2, 3, 4]).len() as u64, factorial(5));
    }
}
