//! Static proper interval recognition by repeated LexBFS sweeps.
//!
//! Three sweeps (the second and third breaking ties towards the vertex that
//! came last in the previous sweep) produce an ordering in which every closed
//! neighbourhood is consecutive exactly when the graph is proper interval.

use crate::graph::Graph;

/// LexBFS; ties go to the vertex with the largest position in `prev` when given,
/// otherwise to the smallest index.
pub fn lex_bfs(g: &Graph, prev: Option<&[usize]>) -> Vec<usize> {
    let n = g.n();
    let mut prev_pos = vec![0usize; n];
    if let Some(p) = prev {
        for (i, &v) in p.iter().enumerate() {
            prev_pos[v] = i;
        }
    }
    // Partition refinement over an ordered list of classes; the first class is visited next.
    let mut classes: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut order = Vec::with_capacity(n);
    while let Some(first) = classes.first_mut() {
        let pick_idx = if prev.is_some() {
            (0..first.len()).max_by_key(|&i| prev_pos[first[i]]).unwrap()
        } else {
            (0..first.len()).min_by_key(|&i| first[i]).unwrap()
        };
        let v = first.swap_remove(pick_idx);
        if first.is_empty() {
            classes.remove(0);
        }
        order.push(v);
        let nb = g.neighbors(v);
        let mut refined = Vec::with_capacity(classes.len() + 1);
        for class in classes.drain(..) {
            let (inside, outside): (Vec<usize>, Vec<usize>) = class.into_iter().partition(|&w| nb.contains(w));
            if !inside.is_empty() {
                refined.push(inside);
            }
            if !outside.is_empty() {
                refined.push(outside);
            }
        }
        classes = refined;
    }
    order
}

/// True iff every closed neighbourhood occupies a contiguous block of `order`.
pub fn is_umbrella_free(g: &Graph, order: &[usize]) -> bool {
    let mut pos = vec![0usize; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    (0..g.n()).all(|v| {
        let (mut lo, mut hi) = (pos[v], pos[v]);
        for w in g.neighbors(v).iter() {
            lo = lo.min(pos[w]);
            hi = hi.max(pos[w]);
        }
        hi - lo == g.degree(v)
    })
}

/// Ordering certifying proper intervality, if one exists.
pub fn proper_interval_order(g: &Graph) -> Option<Vec<usize>> {
    let s1 = lex_bfs(g, None);
    let s2 = lex_bfs(g, Some(&s1));
    let s3 = lex_bfs(g, Some(&s2));
    is_umbrella_free(g, &s3).then_some(s3)
}

pub fn is_proper_interval(g: &Graph) -> bool {
    proper_interval_order(g).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::named::*;

    #[test]
    fn examples() {
        assert!(is_proper_interval(&path(6)));
        assert!(is_proper_interval(&complete(5)));
        assert!(is_proper_interval(&Graph::new(3)));
        for bad in [claw(), net(), tent(), cycle(4), cycle(5), cycle(7)] {
            assert!(!is_proper_interval(&bad), "{bad:?}");
        }
    }

    #[test]
    fn lex_bfs_is_a_permutation() {
        let g = cycle(6);
        let mut o = lex_bfs(&g, None);
        o.sort_unstable();
        assert_eq!(o, (0..6).collect::<Vec<_>>());
    }
}
