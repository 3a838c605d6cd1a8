/// Strongly connected components of the subgraph induced by `active`.
///
/// Edges to inactive vertices are ignored. Components are returned in
/// reverse topological order (every edge leaving a component points to a
/// component listed earlier) and each component is sorted.
pub fn strongly_connected_components(adj: &[Vec<usize>], active: &[bool]) -> Vec<Vec<usize>> {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0usize;
    // Explicit call stack of (vertex, next edge position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if !active[root] || index[root] != UNSEEN {
            continue;
        }
        frames.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if !active[w] {
                    continue;
                }
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Bottom components: SCCs with no edge leaving them.
pub fn bottom_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let active = vec![true; adj.len()];
    let comps = strongly_connected_components(adj, &active);
    let mut comp_of = vec![0usize; adj.len()];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut bottoms: Vec<Vec<usize>> = comps
        .iter()
        .enumerate()
        .filter(|(i, c)| c.iter().all(|&v| adj[v].iter().all(|&w| comp_of[w] == *i)))
        .map(|(_, c)| c.clone())
        .collect();
    bottoms.sort();
    bottoms
}

/// Vertices reachable from `start` (inclusive).
pub fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_graph() {
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let comps = strongly_connected_components(&adj, &[true; 4]);
        assert_eq!(comps, vec![vec![2, 3], vec![0, 1]]);
        assert_eq!(bottom_components(&adj), vec![vec![2, 3]]);
    }

    fn closure(adj: &[Vec<usize>]) -> Vec<Vec<bool>> {
        let n = adj.len();
        let mut r = vec![vec![false; n]; n];
        for (v, row) in r.iter_mut().enumerate() {
            row[v] = true;
            for &w in &adj[v] {
                row[w] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    proptest! {
        #[test]
        fn matches_mutual_reachability(edges in prop::collection::vec((0usize..7, 0usize..7), 0..20)) {
            let mut adj = vec![Vec::new(); 7];
            for (a, b) in edges {
                adj[a].push(b);
            }
            let r = closure(&adj);
            let comps = strongly_connected_components(&adj, &[true; 7]);
            let mut comp_of = [usize::MAX; 7];
            for (i, c) in comps.iter().enumerate() {
                for &v in c {
                    comp_of[v] = i;
                }
            }
            for i in 0..7 {
                for j in 0..7 {
                    prop_assert_eq!(comp_of[i] == comp_of[j], r[i][j] && r[j][i]);
                    if adj[i].contains(&j) {
                        prop_assert!(comp_of[j] <= comp_of[i]);
                    }
                }
            }
        }
    }
}
