//! Mutable overlapping community assignment with incremental bookkeeping.
//!
//! A [`Cover`] keeps two mutually inverse indexes (community -> members,
//! node -> communities) plus, per community, the internal edge count and each
//! member's internal degree. Join/leave moves touch only the changed node's
//! neighborhood, so gain evaluation stays O(|C| + deg).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::error::Error;
use crate::graph::Graph;
use crate::metric::WccContext;

/// One community: members keyed by dense node ID, each carrying its cached
/// internal degree deg(x, C), plus the community's internal edge count.
#[derive(Debug, Clone, Default)]
pub struct Community {
    members: BTreeMap<usize, usize>,
    internal_edges: usize,
}

impl Community {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.members.contains_key(&node)
    }

    /// Cached deg(x, C) for a member, None for non-members.
    pub fn internal_degree(&self, node: usize) -> Option<usize> {
        self.members.get(&node).copied()
    }

    pub fn internal_edges(&self) -> usize {
        self.internal_edges
    }

    /// Members in ascending dense-ID order with their internal degrees.
    pub fn members(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.members.iter().map(|(&n, &d)| (n, d))
    }

    pub fn member_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.keys().copied()
    }

    /// Edge density 2m / (|C|(|C|-1)); zero below two members.
    pub fn density(&self) -> f64 {
        density(self.internal_edges, self.members.len())
    }
}

/// Pair-normalized community density; zero for |C| < 2.
pub fn density(internal_edges: usize, size: usize) -> f64 {
    if size < 2 {
        0.0
    } else {
        2.0 * internal_edges as f64 / (size as f64 * (size as f64 - 1.0))
    }
}

/// One node's best join and leave action with predicted score gains.
/// Absent options mean no strictly improving action existed.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeChange {
    pub node: usize,
    pub best_join: Option<(usize, f64)>,
    pub best_leave: Option<(usize, f64)>,
}

impl NodeChange {
    pub fn none(node: usize) -> Self {
        NodeChange {
            node,
            best_join: None,
            best_leave: None,
        }
    }

    pub fn is_noop(&self) -> bool {
        self.best_join.is_none() && self.best_leave.is_none()
    }
}

/// Result of applying a [`NodeChange`]: the actual score delta measured at
/// apply time plus which halves of the change were still applicable.
#[derive(Debug, Clone, Copy, Default)]
pub struct AppliedChange {
    pub delta: f64,
    pub joined: bool,
    pub left: bool,
}

/// Overlapping community assignment over a graph's dense node IDs.
#[derive(Debug, Clone, Default)]
pub struct Cover {
    communities: BTreeMap<usize, Community>,
    memberships: Vec<BTreeSet<usize>>,
    next_community_id: usize,
}

impl Cover {
    pub fn new(node_count: usize) -> Self {
        Cover {
            communities: BTreeMap::new(),
            memberships: vec![BTreeSet::new(); node_count],
            next_community_id: 0,
        }
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    /// Size of the dense node-ID space this cover was built over.
    pub fn node_count(&self) -> usize {
        self.memberships.len()
    }

    pub fn community(&self, id: usize) -> Option<&Community> {
        self.communities.get(&id)
    }

    /// Communities in ascending ID order.
    pub fn communities(&self) -> impl Iterator<Item = (usize, &Community)> {
        self.communities.iter().map(|(&id, c)| (id, c))
    }

    /// Community IDs the node belongs to, ascending.
    pub fn memberships(&self, node: usize) -> &BTreeSet<usize> {
        &self.memberships[node]
    }

    pub fn contains(&self, community: usize, node: usize) -> bool {
        self.communities
            .get(&community)
            .is_some_and(|c| c.contains(node))
    }

    fn fresh_community(&mut self) -> usize {
        let id = self.next_community_id;
        self.next_community_id += 1;
        self.communities.insert(id, Community::default());
        id
    }

    /// Insert `node` into an existing community, updating the internal-degree
    /// cache of its member neighbors and the community edge count.
    fn add_member(&mut self, graph: &Graph, community: usize, node: usize) {
        let c = self
            .communities
            .get_mut(&community)
            .expect("community exists");
        debug_assert!(!c.contains(node));
        let mut own_degree = 0usize;
        for &y in graph.neighbors(node) {
            if let Some(d) = c.members.get_mut(&y) {
                *d += 1;
                own_degree += 1;
            }
        }
        c.members.insert(node, own_degree);
        c.internal_edges += own_degree;
        self.memberships[node].insert(community);
    }

    fn remove_member(&mut self, graph: &Graph, community: usize, node: usize) {
        let c = self
            .communities
            .get_mut(&community)
            .expect("community exists");
        let own_degree = c.members.remove(&node).expect("node is a member");
        for &y in graph.neighbors(node) {
            if let Some(d) = c.members.get_mut(&y) {
                *d -= 1;
            }
        }
        c.internal_edges -= own_degree;
        self.memberships[node].remove(&community);
    }

    /// Apply a node change: leave first, then join. Halves that went stale
    /// (node already absent/present, community gone) degrade to no-ops. The
    /// returned delta is the actual score change of the touched communities,
    /// recomputed against the live cover at apply time.
    pub fn apply_change(&mut self, graph: &Graph, change: &NodeChange) -> AppliedChange {
        let mut applied = AppliedChange::default();
        if let Some((community, _)) = change.best_leave {
            if self.contains(community, change.node) {
                let delta = WccContext::new(graph, self)
                    .gain_leave(change.node, community)
                    .expect("membership checked");
                self.remove_member(graph, community, change.node);
                applied.delta += delta;
                applied.left = true;
            }
        }
        if let Some((community, _)) = change.best_join {
            if self.communities.contains_key(&community) && !self.contains(community, change.node)
            {
                let delta = WccContext::new(graph, self)
                    .gain_join(change.node, community)
                    .expect("membership checked");
                self.add_member(graph, community, change.node);
                applied.delta += delta;
                applied.joined = true;
            }
        }
        applied
    }

    /// Delete every community with fewer than two members; returns how many
    /// were removed. Nodes may be left with zero memberships.
    pub fn remove_degenerate(&mut self) -> usize {
        let degenerate: Vec<usize> = self
            .communities
            .iter()
            .filter(|(_, c)| c.len() < 2)
            .map(|(&id, _)| id)
            .collect();
        for id in &degenerate {
            let c = self.communities.remove(id).expect("collected above");
            for (node, _) in c.members() {
                self.memberships[node].remove(id);
            }
        }
        degenerate.len()
    }

    /// Optional cleanup of duplicated or nested communities.
    pub fn post_process(&mut self, mode: PostProcess) {
        match mode {
            PostProcess::None => {}
            PostProcess::Dedupe => self.dedupe(),
            PostProcess::Nested => {
                self.dedupe();
                self.remove_nested();
            }
        }
    }

    fn dedupe(&mut self) {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut drop: Vec<usize> = Vec::new();
        // Ascending ID order, so the lowest ID of a duplicate set survives.
        for (&id, c) in &self.communities {
            let key: Vec<usize> = c.member_ids().collect();
            if !seen.insert(key) {
                drop.push(id);
            }
        }
        for id in drop {
            self.drop_community(id);
        }
    }

    fn remove_nested(&mut self) {
        let mut drop: Vec<usize> = Vec::new();
        for (&id, c) in &self.communities {
            let mut members = c.member_ids();
            let Some(first) = members.next() else {
                continue;
            };
            // Communities containing every member of c are exactly the
            // intersection of the members' membership sets.
            let mut candidates: Vec<usize> = self.memberships[first]
                .iter()
                .copied()
                .filter(|&other| other != id)
                .collect();
            for node in members {
                if candidates.is_empty() {
                    break;
                }
                candidates.retain(|cand| self.memberships[node].contains(cand));
            }
            if candidates
                .iter()
                .any(|cand| self.communities[cand].len() > c.len())
            {
                drop.push(id);
            }
        }
        for id in drop {
            self.drop_community(id);
        }
    }

    fn drop_community(&mut self, id: usize) {
        if let Some(c) = self.communities.remove(&id) {
            for (node, _) in c.members() {
                self.memberships[node].remove(&id);
            }
        }
    }

    /// Member sets as original node IDs, ascending within each community,
    /// communities in ascending ID order.
    pub fn member_id_sets(&self, graph: &Graph) -> Vec<Vec<u64>> {
        self.communities
            .values()
            .map(|c| c.member_ids().map(|n| graph.original_id(n)).collect())
            .collect()
    }

    /// Write the cover in the text format: one community per line, original
    /// node IDs ascending, single spaces, lines in community-ID order.
    pub fn dump<W: Write>(&self, graph: &Graph, mut writer: W) -> Result<(), Error> {
        for c in self.communities.values() {
            let mut first = true;
            for node in c.member_ids() {
                if !first {
                    write!(writer, " ")?;
                }
                write!(writer, "{}", graph.original_id(node))?;
                first = false;
            }
            writeln!(writer)?;
        }
        Ok(())
    }

    /// Read a cover from the text format; member IDs are original input IDs
    /// and must exist in the graph. Empty lines are skipped. Overlaps are
    /// allowed; all bookkeeping is recomputed.
    pub fn load<R: BufRead>(reader: R, graph: &Graph) -> Result<Cover, Error> {
        let mut cover = Cover::new(graph.node_count());
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let mut members = BTreeSet::new();
            for token in line.split_whitespace() {
                let original = token.parse::<u64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("invalid node ID {:?}", token),
                })?;
                let node = graph.dense_id(original).ok_or(Error::UnknownNode(original))?;
                members.insert(node);
            }
            if members.is_empty() {
                continue;
            }
            let id = cover.fresh_community();
            for node in members {
                cover.add_member(graph, id, node);
            }
        }
        Ok(cover)
    }

    /// Build a cover from explicit member sets of dense node IDs. Duplicate
    /// members within a set collapse; empty sets are skipped.
    pub fn from_member_sets<I, S>(graph: &Graph, sets: I) -> Result<Cover, Error>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let mut cover = Cover::new(graph.node_count());
        for set in sets {
            let members: BTreeSet<usize> = set.into_iter().collect();
            if let Some(&max) = members.iter().next_back() {
                if max >= graph.node_count() {
                    return Err(Error::NodeRange(max));
                }
            } else {
                continue;
            }
            let id = cover.fresh_community();
            for node in members {
                cover.add_member(graph, id, node);
            }
        }
        Ok(cover)
    }

    /// Recompute every cached quantity from the member sets and compare with
    /// the incrementally maintained state. Exact integer equality.
    pub fn check_consistency(&self, graph: &Graph) -> Result<(), String> {
        for (&id, c) in &self.communities {
            let mut recomputed_edges = 0usize;
            for (node, cached) in c.members() {
                let actual = graph
                    .neighbors(node)
                    .iter()
                    .filter(|y| c.contains(**y))
                    .count();
                if actual != cached {
                    return Err(format!(
                        "community {id}: node {node} internal degree {cached} != {actual}"
                    ));
                }
                recomputed_edges += actual;
                if !self.memberships[node].contains(&id) {
                    return Err(format!("membership index missing ({node}, {id})"));
                }
            }
            if !recomputed_edges.is_multiple_of(2) || recomputed_edges / 2 != c.internal_edges {
                return Err(format!(
                    "community {id}: internal edges {} != {}",
                    c.internal_edges,
                    recomputed_edges / 2
                ));
            }
        }
        for (node, ids) in self.memberships.iter().enumerate() {
            for id in ids {
                if !self.contains(*id, node) {
                    return Err(format!("stale membership ({node}, {id})"));
                }
            }
        }
        Ok(())
    }
}

/// Read a cover file into raw member-ID lists without resolving the IDs
/// against a graph (evaluation works on original IDs directly). Empty lines
/// are skipped; members keep file order and may contain duplicates.
pub fn read_community_sets<R: BufRead>(reader: R) -> Result<Vec<Vec<u64>>, Error> {
    let mut sets = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let mut members = Vec::new();
        for token in line.split_whitespace() {
            let id = token.parse::<u64>().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid node ID {:?}", token),
            })?;
            members.push(id);
        }
        if !members.is_empty() {
            sets.push(members);
        }
    }
    Ok(sets)
}

/// Post-processing mode for the final cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PostProcess {
    #[default]
    None,
    Dedupe,
    Nested,
}

impl std::str::FromStr for PostProcess {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(PostProcess::None),
            "dedupe" => Ok(PostProcess::Dedupe),
            "nested" => Ok(PostProcess::Nested),
            other => Err(Error::Config(format!(
                "unknown post-process mode {other:?} (expected none, dedupe or nested)"
            ))),
        }
    }
}

/// Greedy disjoint initial clustering: scanning nodes in processing order,
/// every still-unassigned node founds a community and pulls in all of its
/// currently unassigned neighbors.
pub fn initial_clustering(graph: &Graph, order: &[usize]) -> Cover {
    let mut cover = Cover::new(graph.node_count());
    let mut assigned = vec![false; graph.node_count()];
    for &x in order {
        if assigned[x] {
            continue;
        }
        let id = cover.fresh_community();
        cover.add_member(graph, id, x);
        assigned[x] = true;
        for &y in graph.neighbors(x) {
            if !assigned[y] {
                cover.add_member(graph, id, y);
                assigned[y] = true;
            }
        }
    }
    cover
}
