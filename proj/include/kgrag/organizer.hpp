#pragma once

#include "kgrag/embedding.hpp"
#include "kgrag/kg.hpp"
#include "kgrag/rerank.hpp"

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace kgrag {

// Undirected edge derived from one triplet. a/b are canonical entity keys
// with a <= b; head/relation/tail keep the stored surface forms and the
// original direction for rendering.
struct GraphEdge {
    std::string a;
    std::string b;
    std::string head;
    std::string relation;
    std::string tail;
    std::string source_chunk;
    double weight = 0.0; // s(query, source_chunk)
    TripletId id = 0;
};

// Weighted undirected multigraph over the expanded subgraph. Nodes appear
// only when a retained edge touches them, so every node has degree >= 1.
struct WeightedContextGraph {
    std::set<std::string> nodes;
    std::vector<GraphEdge> edges;
};

struct Component {
    std::set<std::string> nodes;
    std::vector<std::size_t> edge_indexes; // into WeightedContextGraph::edges, ascending
};

struct SpanningTree {
    std::vector<GraphEdge> edges; // Kruskal acceptance order: best edge first
    std::size_t root_edge = 0;    // index into edges; the max edge under the tie order
    double score = 0.0;           // rerank relevance, set by rerank_trees
    bool fallback_scored = false; // reranker unreachable, score is max edge weight
    std::string min_entity;       // smallest spanned entity key, the rerank tiebreak
};

// Tree: filled from a reranked spanning tree. Seed: an unlinked seed taking
// leftover budget. Similarity: the no-organization path, plain
// similarity-ordered expanded chunks.
enum class ChunkOrigin { Tree, Seed, Similarity };

struct BundleEntry {
    std::string chunk_id;
    int tree_rank = -1; // 0-based rank of the contributing tree; -1 for seed fills
    double tree_score = 0.0;
    ChunkOrigin origin = ChunkOrigin::Tree;
};

struct ContextBundle {
    std::vector<BundleEntry> entries; // size <= budget_k, chunk ids distinct
};

// Total order used for Kruskal scans, DFS neighbor visits, and the root
// pick: weight desc, then source_chunk, endpoints, relation; surface forms
// and the triplet id close the remaining ties.
bool edge_before(const GraphEdge& x, const GraphEdge& y);

// One edge per non-self-loop triplet, weighted by the similarity of the
// query to the triplet's source chunk (cache hit or computed on demand).
WeightedContextGraph build_weighted_graph(const AssociationKG& kg, const Subgraph& subgraph,
                                          QuerySimilarityCache& sims);

// Maximal connected components, ordered by smallest contained entity key.
std::vector<Component> connected_components(const WeightedContextGraph& g);

// Maximum-total-weight spanning tree via greedy edge scan with disjoint
// sets. Deterministic under ties through edge_before.
SpanningTree max_spanning_tree(const WeightedContextGraph& g, const Component& comp);

// Tree-edge traversal order: the root edge first, then depth-first from
// the root endpoint whose best remaining incident edge wins edge_before,
// visiting each node's unvisited edges best-first; the root's other
// endpoint follows. Returned as indexes into tree.edges.
std::vector<std::size_t> dfs_edge_order(const SpanningTree& tree);

// Source chunks of the tree edges in DFS order, first occurrence kept.
std::vector<std::string> text_representation(const SpanningTree& tree);

// `<head, relation, tail>` lines in DFS order, original direction,
// newline-joined. Empty tree renders as the empty string.
std::string triplet_representation(const SpanningTree& tree);

// Scores each tree's triplet representation against the query and sorts
// score-descending, ties toward the smaller min_entity. When the reranker
// throws, every tree falls back to its max edge weight and is flagged.
std::vector<SpanningTree> rerank_trees(const std::string& query,
                                       std::vector<SpanningTree> trees, Reranker& reranker);

// Budgeted fill: tree chunks in rank then DFS order, already-seen ids
// skipped, a straddling tree truncated; leftover budget taken by the
// unlinked seeds in their given order.
ContextBundle select_context(std::span<const SpanningTree> sorted_trees, std::size_t budget_k,
                             std::span<const std::string> unlinked_seeds);

} // namespace kgrag
