#include "kgrag/organizer.hpp"

#include "kgrag/text.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace kgrag {

namespace {

// Disjoint sets over dense indexes, path-halving + union by size.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

std::unordered_map<std::string, std::size_t> index_nodes(const std::set<std::string>& nodes) {
    std::unordered_map<std::string, std::size_t> idx;
    idx.reserve(nodes.size());
    std::size_t i = 0;
    for (const auto& n : nodes) idx.emplace(n, i++);
    return idx;
}

} // namespace

bool edge_before(const GraphEdge& x, const GraphEdge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    if (x.source_chunk != y.source_chunk) return x.source_chunk < y.source_chunk;
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    if (x.relation != y.relation) return x.relation < y.relation;
    if (x.head != y.head) return x.head < y.head;
    if (x.tail != y.tail) return x.tail < y.tail;
    return x.id < y.id;
}

WeightedContextGraph build_weighted_graph(const AssociationKG& kg, const Subgraph& subgraph,
                                          QuerySimilarityCache& sims) {
    WeightedContextGraph g;
    for (TripletId id : subgraph.triplet_ids) {
        const Triplet& t = kg.triplet(id);
        std::string hk = text::entity_key(t.head);
        std::string tk = text::entity_key(t.tail);
        if (hk == tk) continue;

        GraphEdge e;
        e.a = std::min(hk, tk);
        e.b = std::max(hk, tk);
        e.head = t.head;
        e.relation = t.relation;
        e.tail = t.tail;
        e.source_chunk = t.source_chunk;
        e.weight = sims.score(t.source_chunk);
        e.id = id;
        g.nodes.insert(e.a);
        g.nodes.insert(e.b);
        g.edges.push_back(std::move(e));
    }
    return g;
}

std::vector<Component> connected_components(const WeightedContextGraph& g) {
    auto idx = index_nodes(g.nodes);
    DisjointSets sets(g.nodes.size());
    for (const auto& e : g.edges) sets.unite(idx.at(e.a), idx.at(e.b));

    // Group by representative; order components by smallest contained key,
    // which is the first member met while walking the ordered node set.
    std::map<std::string, std::size_t> first_of_rep; // smallest node -> rep
    std::unordered_map<std::size_t, std::size_t> rep_to_comp;
    std::vector<Component> comps;
    for (const auto& n : g.nodes) {
        std::size_t rep = sets.find(idx.at(n));
        auto it = rep_to_comp.find(rep);
        if (it == rep_to_comp.end()) {
            rep_to_comp.emplace(rep, comps.size());
            comps.push_back({});
            it = rep_to_comp.find(rep);
        }
        comps[it->second].nodes.insert(n);
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        std::size_t rep = sets.find(idx.at(g.edges[i].a));
        comps[rep_to_comp.at(rep)].edge_indexes.push_back(i);
    }
    return comps;
}

SpanningTree max_spanning_tree(const WeightedContextGraph& g, const Component& comp) {
    SpanningTree tree;
    if (comp.nodes.empty()) throw std::invalid_argument("empty component");
    tree.min_entity = *comp.nodes.begin();
    if (comp.nodes.size() == 1) {
        // Unreachable from triplet-built graphs (every node rides in on an
        // edge); tolerated for direct API use.
        assert(comp.edge_indexes.empty());
        return tree;
    }

    std::vector<const GraphEdge*> candidates;
    candidates.reserve(comp.edge_indexes.size());
    for (std::size_t i : comp.edge_indexes) candidates.push_back(&g.edges[i]);
    std::sort(candidates.begin(), candidates.end(),
              [](const GraphEdge* x, const GraphEdge* y) { return edge_before(*x, *y); });

    auto idx = index_nodes(comp.nodes);
    DisjointSets sets(comp.nodes.size());
    for (const GraphEdge* e : candidates) {
        if (sets.unite(idx.at(e->a), idx.at(e->b))) {
            tree.edges.push_back(*e);
            if (tree.edges.size() + 1 == comp.nodes.size()) break;
        }
    }
    if (tree.edges.size() + 1 != comp.nodes.size()) {
        throw std::invalid_argument("component not connected");
    }
    tree.root_edge = 0; // acceptance order starts at the max edge
    return tree;
}

std::vector<std::size_t> dfs_edge_order(const SpanningTree& tree) {
    if (tree.edges.empty()) return {};

    // Acceptance order is edge_before-sorted, so index-ascending adjacency
    // lists are already best-first.
    std::unordered_map<std::string, std::vector<std::size_t>> adj;
    for (std::size_t i = 0; i < tree.edges.size(); ++i) {
        adj[tree.edges[i].a].push_back(i);
        adj[tree.edges[i].b].push_back(i);
    }

    std::vector<bool> visited(tree.edges.size(), false);
    std::vector<std::size_t> order;
    order.reserve(tree.edges.size());
    visited[tree.root_edge] = true;
    order.push_back(tree.root_edge);

    std::function<void(const std::string&)> walk = [&](const std::string& node) {
        for (std::size_t i : adj[node]) {
            if (visited[i]) continue;
            visited[i] = true;
            order.push_back(i);
            const GraphEdge& e = tree.edges[i];
            walk(e.a == node ? e.b : e.a);
        }
    };

    auto best_unvisited = [&](const std::string& node) -> const GraphEdge* {
        for (std::size_t i : adj[node]) {
            if (!visited[i]) return &tree.edges[i];
        }
        return nullptr;
    };

    const GraphEdge& root = tree.edges[tree.root_edge];
    const GraphEdge* best_a = best_unvisited(root.a);
    const GraphEdge* best_b = best_unvisited(root.b);
    bool b_first = best_a == nullptr || (best_b != nullptr && edge_before(*best_b, *best_a));
    walk(b_first ? root.b : root.a);
    walk(b_first ? root.a : root.b);
    return order;
}

std::vector<std::string> text_representation(const SpanningTree& tree) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (std::size_t i : dfs_edge_order(tree)) {
        const std::string& chunk = tree.edges[i].source_chunk;
        if (seen.insert(chunk).second) out.push_back(chunk);
    }
    return out;
}

std::string triplet_representation(const SpanningTree& tree) {
    std::string out;
    bool first = true;
    for (std::size_t i : dfs_edge_order(tree)) {
        const GraphEdge& e = tree.edges[i];
        if (!first) out += '\n';
        out += '<' + e.head + ", " + e.relation + ", " + e.tail + '>';
        first = false;
    }
    return out;
}

std::vector<SpanningTree> rerank_trees(const std::string& query, std::vector<SpanningTree> trees,
                                       Reranker& reranker) {
    if (trees.empty()) return trees;

    std::vector<std::string> docs;
    docs.reserve(trees.size());
    for (const auto& t : trees) docs.push_back(triplet_representation(t));

    bool fallback = false;
    std::vector<double> scores;
    try {
        scores = reranker.score(query, docs);
        if (scores.size() != trees.size()) throw std::runtime_error("score count mismatch");
    } catch (const std::exception&) {
        fallback = true;
        scores.clear();
        for (const auto& t : trees) {
            double w = 0.0;
            for (const auto& e : t.edges) w = std::max(w, e.weight);
            scores.push_back(w);
        }
    }
    for (std::size_t i = 0; i < trees.size(); ++i) {
        trees[i].score = scores[i];
        trees[i].fallback_scored = fallback;
    }
    std::stable_sort(trees.begin(), trees.end(), [](const SpanningTree& x, const SpanningTree& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.min_entity < y.min_entity;
    });
    return trees;
}

ContextBundle select_context(std::span<const SpanningTree> sorted_trees, std::size_t budget_k,
                             std::span<const std::string> unlinked_seeds) {
    if (budget_k == 0) throw std::invalid_argument("budget_k must be positive");

    ContextBundle bundle;
    std::unordered_set<std::string> selected;
    for (std::size_t rank = 0; rank < sorted_trees.size() && selected.size() < budget_k; ++rank) {
        const SpanningTree& tree = sorted_trees[rank];
        for (const auto& chunk : text_representation(tree)) {
            if (selected.size() >= budget_k) break;
            if (!selected.insert(chunk).second) continue;
            bundle.entries.push_back(
                {chunk, static_cast<int>(rank), tree.score, ChunkOrigin::Tree});
        }
    }
    for (const auto& chunk : unlinked_seeds) {
        if (selected.size() >= budget_k) break;
        if (!selected.insert(chunk).second) continue;
        bundle.entries.push_back({chunk, -1, 0.0, ChunkOrigin::Seed});
    }
    return bundle;
}

} // namespace kgrag
