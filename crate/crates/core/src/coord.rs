//! Coordinated like/unlike/delete detection.
//!
//! Deleted tweets link the accounts that deleted them to the accounts that
//! repeatedly unliked them. After dropping casual unlikers, the network is
//! projected onto accounts (liker → deleter) and only large weakly connected
//! components are kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::ingest::{DailyDeletionRecord, UnlikeRecord};
use crate::model::{AccountId, TweetId};

pub const DEFAULT_MIN_UNLIKES: u64 = 5;
pub const DEFAULT_MIN_COMPONENT: usize = 10;

/// Deleters, deleted tweets and likers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TripartiteNetwork {
    /// (deleter, tweet), sorted.
    pub deleter_edges: BTreeSet<(AccountId, TweetId)>,
    /// (liker, tweet) → unlike count. Every tweet here is also deleted.
    pub liker_edges: BTreeMap<(AccountId, TweetId), u64>,
}

impl TripartiteNetwork {
    pub fn likers(&self) -> BTreeSet<AccountId> {
        self.liker_edges.keys().map(|&(l, _)| l).collect()
    }
}

/// Outcome of the unliker filter, counted both by account and by edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnlikerFilterStats {
    pub likers_before: usize,
    pub likers_removed: usize,
    pub edges_before: usize,
    pub edges_removed: usize,
}

impl UnlikerFilterStats {
    pub fn liker_removal_fraction(&self) -> f64 {
        if self.likers_before == 0 {
            0.0
        } else {
            self.likers_removed as f64 / self.likers_before as f64
        }
    }
}

pub fn build_tripartite(deletions: &[DailyDeletionRecord], unlikes: &[UnlikeRecord]) -> TripartiteNetwork {
    let deleter_edges: BTreeSet<(AccountId, TweetId)> = deletions
        .iter()
        .flat_map(|r| r.tweet_ids.iter().map(move |&t| (r.account_id, t)))
        .collect();
    let deleted: BTreeSet<TweetId> = deleter_edges.iter().map(|&(_, t)| t).collect();
    let mut liker_edges = BTreeMap::new();
    for u in unlikes.iter().filter(|u| u.unlike_count > 0 && deleted.contains(&u.tweet_id)) {
        *liker_edges.entry((u.liker_id, u.tweet_id)).or_insert(0) += u.unlike_count;
    }
    TripartiteNetwork {
        deleter_edges,
        liker_edges,
    }
}

/// Removes liker edges with fewer than `min_unlikes` unlikes. Likers left
/// without edges disappear with them; deleter edges are untouched.
pub fn filter_unlikers(net: &TripartiteNetwork, min_unlikes: u64) -> (TripartiteNetwork, UnlikerFilterStats) {
    let likers_before = net.likers().len();
    let liker_edges: BTreeMap<_, _> = net
        .liker_edges
        .iter()
        .filter(|(_, &c)| c >= min_unlikes)
        .map(|(&k, &c)| (k, c))
        .collect();
    let filtered = TripartiteNetwork {
        deleter_edges: net.deleter_edges.clone(),
        liker_edges,
    };
    let stats = UnlikerFilterStats {
        likers_before,
        likers_removed: likers_before - filtered.likers().len(),
        edges_before: net.liker_edges.len(),
        edges_removed: net.liker_edges.len() - filtered.liker_edges.len(),
    };
    (filtered, stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeAnnotation {
    pub unlike_total: u64,
    pub deletion_total: u64,
    pub in_degree: usize,
    /// Smallest member account of the node's weakly connected component.
    pub component_id: AccountId,
}

impl NodeAnnotation {
    /// Unlikes over all activity: 1 for a pure liker, 0 for a pure deleter.
    pub fn role_ratio(&self) -> f64 {
        role_ratio(self.unlike_total, self.deletion_total)
    }

    /// Unlikes per deletion; `None` when the account deleted nothing.
    pub fn raw_ratio(&self) -> Option<f64> {
        (self.deletion_total > 0).then(|| self.unlike_total as f64 / self.deletion_total as f64)
    }
}

pub fn role_ratio(unlike_total: u64, deletion_total: u64) -> f64 {
    let sum = unlike_total + deletion_total;
    if sum == 0 {
        0.0
    } else {
        unlike_total as f64 / sum as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: AccountId,
    pub members: Vec<AccountId>,
    pub edge_count: usize,
}

/// Directed liker → deleter graph with node annotations and its weakly
/// connected components. Nodes and edges are kept sorted by ID.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoordinationGraph {
    pub nodes: BTreeMap<AccountId, NodeAnnotation>,
    pub edges: BTreeSet<(AccountId, AccountId)>,
    pub components: Vec<Component>,
}

/// Projects a (filtered) tripartite network onto accounts: one unweighted edge
/// from each liker of a tweet to each deleter of that tweet.
pub fn project_bipartite(net: &TripartiteNetwork) -> CoordinationGraph {
    let mut deleters_of: HashMap<TweetId, Vec<AccountId>> = HashMap::new();
    let mut deletion_total: HashMap<AccountId, u64> = HashMap::new();
    for &(d, t) in &net.deleter_edges {
        deleters_of.entry(t).or_default().push(d);
        *deletion_total.entry(d).or_default() += 1;
    }
    let mut unlike_total: HashMap<AccountId, u64> = HashMap::new();
    let mut edges = BTreeSet::new();
    for (&(liker, tweet), &count) in &net.liker_edges {
        *unlike_total.entry(liker).or_default() += count;
        if let Some(deleters) = deleters_of.get(&tweet) {
            for &d in deleters {
                edges.insert((liker, d));
            }
        }
    }

    let mut nodes: BTreeMap<AccountId, NodeAnnotation> = BTreeMap::new();
    for &(src, dst) in &edges {
        for account in [src, dst] {
            nodes.entry(account).or_insert_with(|| NodeAnnotation {
                unlike_total: unlike_total.get(&account).copied().unwrap_or(0),
                deletion_total: deletion_total.get(&account).copied().unwrap_or(0),
                in_degree: 0,
                component_id: account,
            });
        }
        nodes.get_mut(&dst).expect("inserted above").in_degree += 1;
    }

    let mut graph = CoordinationGraph {
        nodes,
        edges,
        components: Vec::new(),
    };
    graph.components = weakly_connected_components(&graph);
    for c in &graph.components {
        for m in &c.members {
            graph.nodes.get_mut(m).expect("member is a node").component_id = c.id;
        }
    }
    graph
}

/// Keeps weakly connected components with at least `min_nodes` nodes.
pub fn filter_components(graph: &CoordinationGraph, min_nodes: usize) -> CoordinationGraph {
    let kept: Vec<Component> = graph
        .components
        .iter()
        .filter(|c| c.members.len() >= min_nodes)
        .cloned()
        .collect();
    let keep: BTreeSet<AccountId> = kept.iter().flat_map(|c| c.members.iter().copied()).collect();
    CoordinationGraph {
        nodes: graph
            .nodes
            .iter()
            .filter(|(id, _)| keep.contains(id))
            .map(|(&id, &a)| (id, a))
            .collect(),
        edges: graph
            .edges
            .iter()
            .filter(|(s, _)| keep.contains(s))
            .copied()
            .collect(),
        components: kept,
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
    }
}

/// Components ordered by ID, which is the smallest member account.
fn weakly_connected_components(graph: &CoordinationGraph) -> Vec<Component> {
    let ids: Vec<AccountId> = graph.nodes.keys().copied().collect();
    let index = |a: &AccountId| ids.binary_search(a).expect("edge endpoint is a node");
    let mut dsu = DisjointSet::new(ids.len());
    for (s, d) in &graph.edges {
        dsu.union(index(s), index(d));
    }
    let mut by_root: BTreeMap<usize, (Vec<AccountId>, usize)> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        by_root.entry(dsu.find(i)).or_default().0.push(id);
    }
    for (s, _) in &graph.edges {
        let r = dsu.find(index(s));
        by_root.get_mut(&r).expect("root exists").1 += 1;
    }
    let mut comps: Vec<Component> = by_root
        .into_values()
        .map(|(members, edge_count)| Component {
            id: members[0],
            members,
            edge_count,
        })
        .collect();
    comps.sort_by_key(|c| c.id);
    comps
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinationOptions {
    pub min_unlikes: u64,
    pub min_component: usize,
}

impl Default for CoordinationOptions {
    fn default() -> Self {
        Self {
            min_unlikes: DEFAULT_MIN_UNLIKES,
            min_component: DEFAULT_MIN_COMPONENT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinationReport {
    pub graph: CoordinationGraph,
    pub unliker_filter: UnlikerFilterStats,
    pub components_before_filter: usize,
}

/// Full pipeline: build, filter unlikers, project, filter components.
pub fn detect_coordination(
    deletions: &[DailyDeletionRecord],
    unlikes: &[UnlikeRecord],
    options: &CoordinationOptions,
) -> CoordinationReport {
    let net = build_tripartite(deletions, unlikes);
    let (filtered, unliker_filter) = filter_unlikers(&net, options.min_unlikes);
    let projected = project_bipartite(&filtered);
    let components_before_filter = projected.components.len();
    CoordinationReport {
        graph: filter_components(&projected, options.min_component),
        unliker_filter,
        components_before_filter,
    }
}
