//! The WCC community-fit metric: exact triangle-count form and the
//! mean-field estimator the optimizer actually maximizes.
//!
//! The estimator replaces triangle counts with binom(deg, 2) times a density
//! (community density p inside, global clustering coefficient outside) and
//! bounds the triangle-partner counts by plain degrees. Join/leave gains are
//! evaluated by recomputing the single affected community's score under the
//! hypothetical bookkeeping, which makes them exact deltas of the total.

use crate::cover::{density, Cover};
use crate::error::Error;
use crate::graph::Graph;

fn binom2(k: usize) -> f64 {
    (k * k.saturating_sub(1) / 2) as f64
}

/// Estimator score of one node against one community, parameterized so the
/// same path serves members, non-members and hypothetical configurations.
/// `others` is |C \ {x}| and `p` the community density to assume.
fn node_score(graph: &Graph, node: usize, internal_degree: usize, others: usize, p: f64) -> f64 {
    let degree = graph.degree(node);
    let expected_global = binom2(degree) * graph.global_cc();
    if expected_global <= 0.0 {
        return 0.0;
    }
    let expected_internal = binom2(internal_degree) * p;
    let outside = (degree - internal_degree) as f64;
    expected_internal / expected_global * degree as f64 / (others as f64 + outside)
}

/// Read-only view bundling the graph and a cover snapshot for scoring.
/// All methods are pure; sharing one context across threads is safe.
pub struct WccContext<'a> {
    graph: &'a Graph,
    cover: &'a Cover,
}

impl<'a> WccContext<'a> {
    pub fn new(graph: &'a Graph, cover: &'a Cover) -> Self {
        WccContext { graph, cover }
    }

    /// Estimator score of `node` against `community`. The node does not have
    /// to be a member; |C \ {x}| covers both cases.
    pub fn node_score(&self, node: usize, community: usize) -> Result<f64, Error> {
        let c = self
            .cover
            .community(community)
            .ok_or(Error::UnknownCommunity(community))?;
        let internal_degree = match c.internal_degree(node) {
            Some(cached) => cached,
            None => self
                .graph
                .neighbors(node)
                .iter()
                .filter(|y| c.contains(**y))
                .count(),
        };
        let others = c.len() - c.contains(node) as usize;
        Ok(node_score(self.graph, node, internal_degree, others, c.density()))
    }

    /// Sum of member scores for one community. Zero below two members.
    pub fn community_score(&self, community: usize) -> Result<f64, Error> {
        let c = self
            .cover
            .community(community)
            .ok_or(Error::UnknownCommunity(community))?;
        let others = c.len().saturating_sub(1);
        let p = c.density();
        Ok(c.members()
            .map(|(node, internal)| node_score(self.graph, node, internal, others, p))
            .sum())
    }

    /// Estimator score of the whole decomposition.
    pub fn total_score(&self) -> f64 {
        self.cover
            .communities()
            .map(|(_, c)| {
                let others = c.len().saturating_sub(1);
                let p = c.density();
                c.members()
                    .map(|(node, internal)| node_score(self.graph, node, internal, others, p))
                    .sum::<f64>()
            })
            .sum()
    }

    /// Score change of the decomposition if `node` joined `community`.
    /// Only that community's score moves, so this is an exact total delta.
    pub fn gain_join(&self, node: usize, community: usize) -> Result<f64, Error> {
        let c = self
            .cover
            .community(community)
            .ok_or(Error::UnknownCommunity(community))?;
        if c.contains(node) {
            return Err(Error::AlreadyMember { node, community });
        }
        let adj = self.graph.neighbors(node);
        let mut edges_into = 0usize;
        {
            let mut ai = 0;
            for y in c.member_ids() {
                while ai < adj.len() && adj[ai] < y {
                    ai += 1;
                }
                if ai < adj.len() && adj[ai] == y {
                    edges_into += 1;
                }
            }
        }
        let size = c.len();
        let p_old = c.density();
        let p_new = density(c.internal_edges() + edges_into, size + 1);
        let mut old_score = 0.0;
        let mut new_score = 0.0;
        let mut ai = 0;
        for (y, internal) in c.members() {
            while ai < adj.len() && adj[ai] < y {
                ai += 1;
            }
            let adjacent = (ai < adj.len() && adj[ai] == y) as usize;
            old_score += node_score(self.graph, y, internal, size - 1, p_old);
            new_score += node_score(self.graph, y, internal + adjacent, size, p_new);
        }
        new_score += node_score(self.graph, node, edges_into, size, p_new);
        Ok(new_score - old_score)
    }

    /// Score change of the decomposition if `node` left `community`.
    pub fn gain_leave(&self, node: usize, community: usize) -> Result<f64, Error> {
        let c = self
            .cover
            .community(community)
            .ok_or(Error::UnknownCommunity(community))?;
        let Some(own_internal) = c.internal_degree(node) else {
            return Err(Error::NotMember { node, community });
        };
        let adj = self.graph.neighbors(node);
        let size = c.len();
        let p_old = c.density();
        let p_new = density(c.internal_edges() - own_internal, size - 1);
        let mut old_score = node_score(self.graph, node, own_internal, size - 1, p_old);
        let mut new_score = 0.0;
        let mut ai = 0;
        for (y, internal) in c.members() {
            if y == node {
                continue;
            }
            while ai < adj.len() && adj[ai] < y {
                ai += 1;
            }
            let adjacent = (ai < adj.len() && adj[ai] == y) as usize;
            old_score += node_score(self.graph, y, internal, size - 1, p_old);
            new_score += node_score(self.graph, y, internal - adjacent, size.saturating_sub(2), p_new);
        }
        Ok(new_score - old_score)
    }
}

/// Exact WCC of one node against one community, using true triangle counts:
/// t(x,C)/t(x,V) scaled by the triangle-partner ratio. Slow; this is the
/// reporting/oracle form, not the optimization target.
pub fn exact_node_score(
    graph: &Graph,
    cover: &Cover,
    node: usize,
    community: usize,
) -> Result<f64, Error> {
    let c = cover
        .community(community)
        .ok_or(Error::UnknownCommunity(community))?;
    let triangles_total = graph.triangle_count(node);
    if triangles_total == 0 {
        return Ok(0.0);
    }
    let triangles_in = graph.triangles_with_set(node, |y| c.contains(y));
    let partners_total = graph.triangle_partners(node, |_| true);
    let partners_outside = graph.triangle_partners(node, |y| !c.contains(y));
    let others = c.len() - c.contains(node) as usize;
    Ok(triangles_in as f64 / triangles_total as f64 * partners_total as f64
        / (others as f64 + partners_outside as f64))
}

/// Exact WCC of the whole decomposition: sum over communities of member sums.
pub fn exact_total_score(graph: &Graph, cover: &Cover) -> f64 {
    cover
        .communities()
        .map(|(id, c)| {
            c.member_ids()
                .map(|node| exact_node_score(graph, cover, node, id).expect("community exists"))
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{initial_clustering, NodeChange};
    use crate::graph::build_graph;
    use proptest::prelude::*;

    fn k4() -> Graph {
        build_graph(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn k3_plus_pendant() -> Graph {
        build_graph(&[(0, 1), (0, 2), (1, 2), (0, 3)]).unwrap()
    }

    fn two_triangles() -> Graph {
        build_graph(&[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap()
    }

    fn cover_of(graph: &Graph, sets: &[&[usize]]) -> Cover {
        Cover::from_member_sets(graph, sets.iter().map(|s| s.to_vec())).unwrap()
    }

    #[test]
    fn exact_score_examples() {
        let g = k4();
        let cover = cover_of(&g, &[&[0, 1, 2, 3]]);
        assert_eq!(exact_node_score(&g, &cover, 0, 0).unwrap(), 1.0);
        assert_eq!(exact_total_score(&g, &cover), 4.0);

        let star = build_graph(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let cover = cover_of(&star, &[&[0, 1, 2, 3]]);
        assert_eq!(exact_node_score(&star, &cover, 0, 0).unwrap(), 0.0);

        let g = k3_plus_pendant();
        let cover = cover_of(&g, &[&[0, 1, 2]]);
        assert_eq!(exact_node_score(&g, &cover, 0, 0).unwrap(), 1.0);
    }

    #[test]
    fn exact_total_two_triangles() {
        let g = two_triangles();
        let cover = cover_of(&g, &[&[0, 1, 2], &[3, 4, 5]]);
        assert_eq!(exact_total_score(&g, &cover), 6.0);
        // The estimator agrees: each node scores 1.0 in its own triangle.
        assert_eq!(WccContext::new(&g, &cover).total_score(), 6.0);
        let empty = Cover::new(g.node_count());
        assert_eq!(exact_total_score(&g, &empty), 0.0);
        assert_eq!(WccContext::new(&g, &empty).total_score(), 0.0);
    }

    #[test]
    fn estimator_k4_is_one_per_node() {
        let g = k4();
        let cover = cover_of(&g, &[&[0, 1, 2, 3]]);
        let ctx = WccContext::new(&g, &cover);
        for node in 0..4 {
            assert_eq!(ctx.node_score(node, 0).unwrap(), 1.0);
        }
        assert_eq!(ctx.community_score(0).unwrap(), 4.0);
        assert_eq!(ctx.total_score(), 4.0);
    }

    #[test]
    fn estimator_zero_for_low_degree() {
        let g = build_graph(&[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let cover = cover_of(&g, &[&[0, 1, 2], &[2, 3]]);
        let ctx = WccContext::new(&g, &cover);
        // Node 3 has degree 1.
        assert_eq!(ctx.node_score(3, 1).unwrap(), 0.0);
        // A 2-member community cannot host triangles: every term is zero.
        assert_eq!(ctx.community_score(1).unwrap(), 0.0);
    }

    #[test]
    fn estimator_k3_pendant_value() {
        // cc = 7/12; for node 0 against {0,1,2}: (1*1)/(3*7/12) * 3/(2+1) = 4/7.
        let g = k3_plus_pendant();
        let cover = cover_of(&g, &[&[0, 1, 2]]);
        let ctx = WccContext::new(&g, &cover);
        assert!((ctx.node_score(0, 0).unwrap() - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_community_scores_zero() {
        let g = k3_plus_pendant();
        let cover = cover_of(&g, &[&[0, 1, 2], &[3]]);
        let ctx = WccContext::new(&g, &cover);
        assert_eq!(ctx.community_score(1).unwrap(), 0.0);
    }

    #[test]
    fn unknown_community_is_error() {
        let g = k4();
        let cover = cover_of(&g, &[&[0, 1, 2, 3]]);
        let ctx = WccContext::new(&g, &cover);
        assert!(matches!(ctx.node_score(0, 9), Err(Error::UnknownCommunity(9))));
        assert!(matches!(exact_node_score(&g, &cover, 0, 9), Err(Error::UnknownCommunity(9))));
    }

    #[test]
    fn estimator_matches_exact_on_cliques() {
        for n in 3..=8 {
            let mut edges = Vec::new();
            for a in 0..n as u64 {
                for b in a + 1..n as u64 {
                    edges.push((a, b));
                }
            }
            let g = build_graph(&edges).unwrap();
            let members: Vec<usize> = (0..n).collect();
            let cover = Cover::from_member_sets(&g, [members]).unwrap();
            let ctx = WccContext::new(&g, &cover);
            for node in 0..n {
                assert_eq!(ctx.node_score(node, 0).unwrap(), 1.0);
                assert_eq!(exact_node_score(&g, &cover, node, 0).unwrap(), 1.0);
            }
            assert_eq!(ctx.total_score(), n as f64);
        }
    }

    #[test]
    fn gain_join_sign_examples() {
        let g = two_triangles();
        let cover = cover_of(&g, &[&[0, 1, 2], &[3, 4, 5]]);
        let ctx = WccContext::new(&g, &cover);
        // Joining the far triangle can only hurt.
        assert!(ctx.gain_join(0, 1).unwrap() < 0.0);

        let g = k4();
        let cover = cover_of(&g, &[&[1, 2, 3]]);
        let ctx = WccContext::new(&g, &cover);
        assert!(ctx.gain_join(0, 0).unwrap() > 0.0);
    }

    #[test]
    fn gain_leave_sign_examples() {
        let g = two_triangles();
        let cover = cover_of(&g, &[&[0, 1, 2], &[3, 4, 5]]);
        let ctx = WccContext::new(&g, &cover);
        assert!(ctx.gain_leave(0, 0).unwrap() < 0.0);

        // A stranger with zero edges into the community: leaving helps.
        let cover = cover_of(&g, &[&[0, 3, 4, 5]]);
        let ctx = WccContext::new(&g, &cover);
        assert!(ctx.gain_leave(0, 0).unwrap() > 0.0);
    }

    #[test]
    fn gain_contract_violations() {
        let g = k4();
        let cover = cover_of(&g, &[&[1, 2, 3]]);
        let ctx = WccContext::new(&g, &cover);
        assert!(matches!(
            ctx.gain_join(1, 0),
            Err(Error::AlreadyMember { node: 1, community: 0 })
        ));
        assert!(matches!(
            ctx.gain_leave(0, 0),
            Err(Error::NotMember { node: 0, community: 0 })
        ));
    }

    #[test]
    fn leave_then_rejoin_restores_score() {
        let g = two_triangles();
        let mut cover = cover_of(&g, &[&[0, 1, 2], &[3, 4, 5]]);
        let before = WccContext::new(&g, &cover).total_score();
        cover.apply_change(
            &g,
            &NodeChange {
                node: 0,
                best_join: None,
                best_leave: Some((0, 0.0)),
            },
        );
        cover.apply_change(
            &g,
            &NodeChange {
                node: 0,
                best_join: Some((0, 0.0)),
                best_leave: None,
            },
        );
        let after = WccContext::new(&g, &cover).total_score();
        assert!((before - after).abs() < 1e-9);
        cover.check_consistency(&g).unwrap();
    }

    /// Build a deterministic pseudo-random graph and cover from a seed, then
    /// check that predicted gains equal apply-and-recompute deltas.
    fn splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    #[test]
    fn gains_match_recompute_oracle() {
        let mut seed = 0x5eed_c0de_u64;
        for case in 0..100 {
            let n = 4 + splitmix(&mut seed) % 20;
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    // Edge probability between roughly 0.2 and 0.6.
                    let threshold = 20 + case % 40;
                    if splitmix(&mut seed) % 100 < threshold {
                        edges.push((a, b));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let g = build_graph(&edges).unwrap();
            let n = g.node_count();
            let mut sets = Vec::new();
            for _ in 0..1 + (splitmix(&mut seed) % 4) {
                let members: Vec<usize> =
                    (0..n).filter(|_| splitmix(&mut seed).is_multiple_of(2)).collect();
                if !members.is_empty() {
                    sets.push(members);
                }
            }
            if sets.is_empty() {
                sets.push((0..n).collect());
            }
            let cover = Cover::from_member_sets(&g, sets).unwrap();
            let base = WccContext::new(&g, &cover).total_score();
            let ids: Vec<usize> = cover.communities().map(|(id, _)| id).collect();
            for id in ids {
                for node in 0..n {
                    let member = cover.contains(id, node);
                    let ctx = WccContext::new(&g, &cover);
                    let (predicted, change) = if member {
                        (
                            ctx.gain_leave(node, id).unwrap(),
                            NodeChange {
                                node,
                                best_join: None,
                                best_leave: Some((id, 0.0)),
                            },
                        )
                    } else {
                        (
                            ctx.gain_join(node, id).unwrap(),
                            NodeChange {
                                node,
                                best_join: Some((id, 0.0)),
                                best_leave: None,
                            },
                        )
                    };
                    let mut mutated = cover.clone();
                    mutated.apply_change(&g, &change);
                    let recomputed = WccContext::new(&g, &mutated).total_score();
                    assert!(
                        (predicted - (recomputed - base)).abs() < 1e-9,
                        "gain mismatch: predicted {predicted}, actual {}",
                        recomputed - base
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn scores_are_nonnegative(edges in proptest::collection::vec((0u64..12, 0u64..12), 1..50)) {
            prop_assume!(edges.iter().any(|&(u, v)| u != v));
            let g = build_graph(&edges).unwrap();
            let cover = initial_clustering(&g, &g.processing_order());
            let ctx = WccContext::new(&g, &cover);
            for (id, c) in cover.communities() {
                for node in c.member_ids() {
                    prop_assert!(ctx.node_score(node, id).unwrap() >= 0.0);
                    prop_assert!(exact_node_score(&g, &cover, node, id).unwrap() >= 0.0);
                }
            }
            prop_assert!(ctx.total_score() >= 0.0);
        }
    }
}
