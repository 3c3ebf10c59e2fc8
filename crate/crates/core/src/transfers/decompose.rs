use std::fmt;

use crate::model::{Assignment, ObjectId, Profile};
use crate::{Error, Rational, Result};

/// Node of the bipartite flow graph: agents are `0..n`, objects `n..2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    Agent(usize),
    Object(usize),
}

/// A directed cycle of the flow graph with the weight routed around it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCycle {
    pub nodes: Vec<Node>,
    pub weight: Rational,
}

/// Pairwise transfers `h(i, j, a)` representing one assignment on one profile:
/// `P[i][a] = 1/n + Σ_{j≠i} h(i, j, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMap {
    pub profile: Profile,
    n: usize,
    h: Vec<Rational>,
    pub cycles: Vec<FlowCycle>,
}

impl TransferMap {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `h(i, j, a)`, 0-based agents and object.
    pub fn get(&self, i: usize, j: usize, a: usize) -> &Rational {
        &self.h[(i * self.n + j) * self.n + a]
    }

    /// `1/n + Σ_{j≠i} h(i, j, a)` for every cell.
    pub fn reconstruct(&self) -> Vec<Rational> {
        let n = self.n;
        let mut cells = vec![Rational::new(1, n as i64); n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    for a in 0..n {
                        cells[i * n + a] += self.get(i, j, a);
                    }
                }
            }
        }
        cells
    }

    /// Largest `|h(i, j, a)|`.
    pub fn max_abs(&self) -> Rational {
        self.h.iter().map(Rational::abs).max().unwrap_or(Rational::ZERO)
    }
}

impl fmt::Display for TransferMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let objs = self.profile.objects();
        let node = |v: &Node| match v {
            Node::Agent(i) => format!("{}", i + 1),
            Node::Object(a) => objs.token(ObjectId(*a)).to_string(),
        };
        writeln!(f, "cycles:")?;
        for c in &self.cycles {
            let path: Vec<String> = c.nodes.iter().map(node).collect();
            writeln!(f, "  {} -> {} : {}", path.join(" -> "), path[0], c.weight)?;
        }
        writeln!(f, "transfers h(i,j,a):")?;
        for i in 0..self.n {
            for j in 0..self.n {
                for a in 0..self.n {
                    let x = self.get(i, j, a);
                    if i != j && !x.is_zero() {
                        writeln!(f, "  h({},{},{}) = {x}", i + 1, j + 1, objs.token(ObjectId(a)))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Decomposes `P − J/n` into directed cycles on the agent/object graph (an edge `a → i`
/// carries `D[i][a] > 0`, an edge `i → a` carries `−D[i][a]`) and turns each consecutive
/// `j → a → i` of a cycle with weight `g` into `h(i, j, a) += g`, `h(j, i, a) −= g`.
///
/// Cycles are extracted lexicographically smallest first (nodes ordered agents before
/// objects), each with its bottleneck weight.
pub fn decompose_to_transfers(p: &Assignment, profile: &Profile) -> Result<TransferMap> {
    let n = profile.n();
    if p.n() != n {
        return Err(Error::Invalid(format!(
            "assignment for n={} on a profile with n={n}",
            p.n()
        )));
    }
    // re-validate: callers may hold matrices built elsewhere
    let p = Assignment::from_cells(n, p.cells().to_vec())?;
    let third = Rational::new(1, n as i64);
    // d[i][a] = P[i][a] - 1/n
    let mut d: Vec<Rational> = p.cells().iter().map(|x| x - &third).collect();
    let mut h = vec![Rational::ZERO; n * n * n];
    let mut cycles = Vec::new();

    // node ids: agents 0..n, objects n..2n
    let cap = |d: &[Rational], u: usize, v: usize| -> Rational {
        if u < n && v >= n {
            let x = &d[u * n + (v - n)];
            if x.is_negative() {
                -x
            } else {
                Rational::ZERO
            }
        } else if u >= n && v < n {
            let x = &d[v * n + (u - n)];
            if x.is_positive() {
                x.clone()
            } else {
                Rational::ZERO
            }
        } else {
            Rational::ZERO
        }
    };

    loop {
        let start = (0..2 * n).find(|&u| (0..2 * n).any(|v| cap(&d, u, v).is_positive()));
        let Some(start) = start else { break };
        let path = smallest_cycle(2 * n, start, |u, v| cap(&d, u, v).is_positive())
            .expect("every edge of a circulation lies on a cycle");
        let k = path.len();
        let weight = (0..k)
            .map(|s| cap(&d, path[s], path[(s + 1) % k]))
            .min()
            .expect("non-empty cycle");
        for s in 0..k {
            let (u, v) = (path[s], path[(s + 1) % k]);
            if u < n {
                // agent u gives up object v: D[u][v] < 0 moves toward 0
                d[u * n + (v - n)] += &weight;
            } else {
                d[v * n + (u - n)] -= &weight;
            }
        }
        // consecutive j -> a -> i
        for s in 0..k {
            let (j, a, i) = (path[s], path[(s + 1) % k], path[(s + 2) % k]);
            if j < n {
                let a = a - n;
                h[(i * n + j) * n + a] += &weight;
                h[(j * n + i) * n + a] -= &weight;
            }
        }
        cycles.push(FlowCycle {
            nodes: path
                .iter()
                .map(|&u| if u < n { Node::Agent(u) } else { Node::Object(u - n) })
                .collect(),
            weight,
        });
    }

    let map = TransferMap {
        profile: profile.clone(),
        n,
        h,
        cycles,
    };
    debug_assert_eq!(map.reconstruct(), p.cells());
    Ok(map)
}

/// Lexicographically smallest simple cycle through `start`, where `start` is the smallest
/// node with an outgoing edge. Greedy extension is exact because each step keeps only
/// nodes from which `start` is still reachable without revisiting the path.
fn smallest_cycle(nodes: usize, start: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let mut path = vec![start];
    let mut on_path = vec![false; nodes];
    on_path[start] = true;
    loop {
        let cur = *path.last().expect("non-empty");
        if path.len() > 1 && edge(cur, start) {
            return Some(path);
        }
        let next = (0..nodes).find(|&v| !on_path[v] && edge(cur, v) && reaches(nodes, v, start, &on_path, &edge))?;
        on_path[next] = true;
        path.push(next);
    }
}

fn reaches(nodes: usize, from: usize, target: usize, blocked: &[bool], edge: &impl Fn(usize, usize) -> bool) -> bool {
    let mut seen = blocked.to_vec();
    seen[target] = false;
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if edge(u, target) {
            return true;
        }
        for v in 0..nodes {
            if !seen[v] && edge(u, v) {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::probabilistic_serial;
    use crate::model::Permutation;

    fn check(p: &Assignment, profile: &Profile) -> TransferMap {
        let map = decompose_to_transfers(p, profile).unwrap();
        assert_eq!(map.reconstruct(), p.cells());
        assert!(map.max_abs() <= Rational::new(1, profile.n() as i64));
        let n = profile.n();
        for i in 0..n {
            for j in 0..n {
                for a in 0..n {
                    assert_eq!(map.get(i, j, a), &-map.get(j, i, a));
                }
            }
        }
        map
    }

    #[test]
    fn equal_division_has_no_flow() {
        let profile = Profile::from_rankings(&["abc", "bca", "cab"]).unwrap();
        let map = check(&Assignment::uniform(3), &profile);
        assert!(map.cycles.is_empty());
        assert!(map.max_abs().is_zero());
    }

    #[test]
    fn identity_matrix() {
        let profile = Profile::from_rankings(&["abc", "bca", "cab"]).unwrap();
        let map = check(&Assignment::from_permutation(&Permutation::identity(3)), &profile);
        let received: Rational = (1..3).map(|j| map.get(0, j, 0).clone()).sum();
        assert_eq!(received, Rational::new(2, 3));
    }

    #[test]
    fn ps_on_profile_e() {
        let profile = Profile::from_rankings(&["abc", "acb", "acb"]).unwrap();
        check(&probabilistic_serial(&profile), &profile);
    }

    #[test]
    fn first_cycle_is_lexicographically_smallest() {
        let profile = Profile::from_rankings(&["abc", "bca", "cab"]).unwrap();
        let map = check(&Assignment::from_permutation(&Permutation::identity(3)), &profile);
        // agent 1 holds a surplus of a and a deficit of b, c: smallest cycle 1 -> b -> 2 -> a
        assert_eq!(
            map.cycles[0].nodes,
            vec![Node::Agent(0), Node::Object(1), Node::Agent(1), Node::Object(0)]
        );
    }
}
