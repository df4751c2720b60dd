use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Directed acyclic graph over named nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl Dag {
    /// Fails with [`Error::NotAcyclic`] when the edges contain a cycle.
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let q = names.len();
        let mut parents = vec![Vec::new(); q];
        let mut children = vec![Vec::new(); q];
        for &(a, b) in edges {
            if a >= q || b >= q {
                return Err(Error::UnknownNode(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::NotAcyclic);
            }
            if !parents[b].contains(&a) {
                parents[b].push(a);
                children[a].push(b);
            }
        }
        for v in parents.iter_mut().chain(children.iter_mut()) {
            v.sort_unstable();
        }
        // Kahn's algorithm, smallest index first for a canonical order
        let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..q).filter(|&v| indeg[v] == 0).collect();
        let mut topo = Vec::with_capacity(q);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if topo.len() != q {
            return Err(Error::NotAcyclic);
        }
        Ok(Self {
            names,
            parents,
            children,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_owned()))
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Copy with an extra root node pointing into `child`.
    pub fn with_exogenous(&self, name: &str, child: usize) -> Result<(Self, usize)> {
        let mut names = self.names.clone();
        names.push(name.to_owned());
        let new = names.len() - 1;
        let mut edges: Vec<(usize, usize)> = (0..self.len())
            .flat_map(|v| self.parents[v].iter().map(move |&u| (u, v)))
            .collect();
        edges.push((new, child));
        Ok((Self::new(names, &edges)?, new))
    }
}

/// Whether every node of `a` is d-separated from every node of `b` given `c`.
///
/// Reachability search over (node, direction) states: a trail may pass a
/// non-collider outside `c` and a collider that is `c` or has a descendant
/// in `c`.
pub fn d_separated(dag: &Dag, a: &[usize], b: &[usize], c: &[usize]) -> Result<bool> {
    let q = dag.len();
    if let Some(&v) = a.iter().chain(b).chain(c).find(|&&v| v >= q) {
        return Err(Error::UnknownNode(format!("#{v}")));
    }
    let mut role = vec![0u8; q];
    for (set, bit) in [(a, 1u8), (b, 2), (c, 4)] {
        for &v in set {
            if role[v] & !bit != 0 {
                return Err(Error::InvalidArgument("node sets must be disjoint".into()));
            }
            role[v] |= bit;
        }
    }
    let in_c = |v: usize| role[v] & 4 != 0;
    // nodes that are in c or have a descendant in c
    let mut anc_c = vec![false; q];
    let mut stack: Vec<usize> = c.to_vec();
    while let Some(v) = stack.pop() {
        if !anc_c[v] {
            anc_c[v] = true;
            stack.extend(dag.parents(v));
        }
    }
    // direction: 0 = arrived from a child (moving up), 1 = from a parent
    let mut seen = vec![[false; 2]; q];
    let mut queue: VecDeque<(usize, usize)> = a.iter().map(|&v| (v, 0)).collect();
    while let Some((v, dir)) = queue.pop_front() {
        if seen[v][dir] {
            continue;
        }
        seen[v][dir] = true;
        if role[v] & 2 != 0 {
            return Ok(false);
        }
        if dir == 0 {
            if !in_c(v) {
                queue.extend(dag.parents(v).iter().map(|&u| (u, 0)));
                queue.extend(dag.children(v).iter().map(|&w| (w, 1)));
            }
        } else {
            if !in_c(v) {
                queue.extend(dag.children(v).iter().map(|&w| (w, 1)));
            }
            if anc_c[v] {
                queue.extend(dag.parents(v).iter().map(|&u| (u, 0)));
            }
        }
    }
    Ok(true)
}

/// [`d_separated`] with node names.
pub fn d_separated_names(dag: &Dag, a: &[&str], b: &[&str], c: &[&str]) -> Result<bool> {
    let idx = |s: &[&str]| s.iter().map(|n| dag.index(n)).collect::<Result<Vec<_>>>();
    d_separated(dag, &idx(a)?, &idx(b)?, &idx(c)?)
}
