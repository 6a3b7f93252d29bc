//! Permutations on `0..n` stored as image arrays.

use std::fmt::Write;

/// `p[i]` is the image of `i`.
pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

/// Apply `first`, then `second`.
pub fn then(first: &[usize], second: &[usize]) -> Perm {
    first.iter().map(|&x| second[x]).collect()
}

/// Cycles of `p`, each starting at its least element, ordered by that element. Fixed points included.
pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p[x];
        }
        out.push(c);
    }
    out
}

/// Cycle lengths sorted in decreasing order, fixed points included.
pub fn cycle_type(p: &[usize]) -> Vec<usize> {
    let mut t: Vec<usize> = cycles(p).iter().map(Vec::len).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

/// Cycle notation on `1..=n`, omitting fixed points; the identity prints as `()`.
pub fn cycle_notation(p: &[usize]) -> String {
    let mut s = String::new();
    for c in cycles(p).into_iter().filter(|c| c.len() > 1) {
        s.push('(');
        for (i, x) in c.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{}", x + 1).unwrap();
        }
        s.push(')');
    }
    if s.is_empty() {
        s.push_str("()");
    }
    s
}

/// Whether the group generated by `gens` acts transitively on `0..n`.
pub fn is_transitive(n: usize, gens: &[Perm]) -> bool {
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g[x];
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn notation_and_types() {
        let p = vec![1, 2, 0, 3, 5, 4];
        assert_eq!(cycle_notation(&p), "(1 2 3)(5 6)");
        assert_eq!(cycle_type(&p), vec![3, 2, 1]);
        assert_eq!(cycle_notation(&identity(3)), "()");
        assert!(is_identity(&then(&p, &inverse(&p))));
    }

    #[test]
    fn transitivity() {
        assert!(is_transitive(3, &[vec![1, 2, 0]]));
        assert!(!is_transitive(3, &[vec![1, 0, 2]]));
    }
}
