//! Characters of the symmetric groups, used to count how many identities are
//! needed to generate a module of multilinear polynomials.

use std::collections::HashMap;

/// Partitions of `n` in reverse lexicographic order, largest parts first.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Size of the conjugacy class of cycle type `mu` in `S_n`.
pub fn class_size(mu: &[usize]) -> u64 {
    let n: usize = mu.iter().sum();
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for &m in mu {
        *counts.entry(m).or_default() += 1;
    }
    let mut denom: u64 = 1;
    for (&len, &c) in &counts {
        denom *= (len as u64).pow(c as u32) * (1..=c).product::<u64>();
    }
    (1..=n as u64).product::<u64>() / denom
}

/// A permutation of `1..=n` (one-line notation) with cycle type `mu`.
pub fn representative(mu: &[usize]) -> Vec<u8> {
    let mut perm = Vec::new();
    let mut start = 1u8;
    for &len in mu {
        for k in 0..len as u8 {
            perm.push(start + (k + 1) % len as u8);
        }
        start += len as u8;
    }
    perm
}

/// `chi^lambda(mu)` by the Murnaghan-Nakayama rule on beta-sets.
pub fn character(lambda: &[usize], mu: &[usize]) -> i64 {
    let k = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &l)| l + k - 1 - i).collect();
    mn(beta, mu)
}

fn mn(beta: Vec<usize>, mu: &[usize]) -> i64 {
    let Some((&r, rest)) = mu.split_first() else {
        return 1;
    };
    let mut total = 0;
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let between = beta.iter().filter(|&&c| c > b - r && c < b).count();
        let mut next = beta.clone();
        next[i] = b - r;
        let sign = if between % 2 == 0 { 1 } else { -1 };
        total += sign * mn(next, rest);
    }
    total
}

pub fn dimension(lambda: &[usize]) -> i64 {
    let n: usize = lambda.iter().sum();
    character(lambda, &vec![1; n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=7).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn s4_table() {
        let classes = partitions(4);
        let table: Vec<Vec<i64>> =
            partitions(4).iter().map(|l| classes.iter().map(|m| character(l, m)).collect()).collect();
        // classes: 4, 31, 22, 211, 1111
        assert_eq!(table[0], vec![1, 1, 1, 1, 1]);
        assert_eq!(table[1], vec![-1, 0, -1, 1, 3]);
        assert_eq!(table[2], vec![0, -1, 2, 0, 2]);
        assert_eq!(table[4], vec![-1, 1, 1, -1, 1]);
    }

    #[test]
    fn orthogonality_and_dimensions() {
        for n in 1..=6 {
            let parts = partitions(n);
            let order: i64 = (1..=n as i64).product();
            let dims: i64 = parts.iter().map(|l| dimension(l).pow(2)).sum();
            assert_eq!(dims, order);
            assert_eq!(parts.iter().map(|m| class_size(m) as i64).sum::<i64>(), order);
            for a in &parts {
                for b in &parts {
                    let ip: i64 = parts.iter().map(|m| class_size(m) as i64 * character(a, m) * character(b, m)).sum();
                    assert_eq!(ip, if a == b { order } else { 0 });
                }
            }
        }
    }

    #[test]
    fn representatives_have_the_cycle_type() {
        assert_eq!(representative(&[3, 1]), vec![2, 3, 1, 4]);
        assert_eq!(representative(&[2, 2]), vec![2, 1, 4, 3]);
    }
}
