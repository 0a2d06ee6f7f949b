// Reference implementations the randomized tests compare against. Each one
// favors brute force over cleverness so a disagreement points at the
// production code.
#pragma once

#include "kgrag/kg.hpp"
#include "kgrag/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// Deterministic cross-platform rng for test data generation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// spanning trees: exhaustive enumeration
// ---------------------------------------------------------------------------

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;
};

// Does the edge subset (indexes into edges) connect all n nodes acyclically?
// Plain reachability; no union-find, which is itself under test.
inline bool is_spanning_tree(std::size_t n, const std::vector<Edge>& edges,
                             const std::vector<std::size_t>& subset) {
    if (subset.size() + 1 != n) return false;
    std::vector<char> reached(n, 0);
    reached[0] = 1;
    std::size_t count = 1;
    bool grew = true;
    while (grew && count < n) {
        grew = false;
        for (std::size_t i : subset) {
            char hu = reached[edges[i].u];
            char hv = reached[edges[i].v];
            if (hu != hv) {
                reached[hu ? edges[i].v : edges[i].u] = 1;
                ++count;
                grew = true;
            }
        }
    }
    // Reaching all n nodes with n-1 edges forces a tree, parallel edges
    // included: any cycle would leave some node unreached.
    return count == n;
}

// Maximum spanning tree weight over every (n-1)-subset. Returns false when
// the graph has no spanning tree at all.
inline bool max_spanning_weight(std::size_t n, const std::vector<Edge>& edges, double& best) {
    if (n == 1) {
        best = 0.0;
        return true;
    }
    if (edges.size() + 1 < n) return false;
    bool found = false;
    // Enumerate combinations of size n-1.
    std::vector<std::size_t> idx(n - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    while (true) {
        double w = 0.0;
        for (std::size_t i : idx) w += edges[i].weight;
        // Subsets that cannot beat the incumbent only matter for existence,
        // which the first hit already settled.
        if ((!found || w > best) && is_spanning_tree(n, edges, idx)) {
            best = w;
            found = true;
        }
        // next combination
        std::size_t k = idx.size();
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == edges.size() - (k - (pos - 1))) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return found;
}

// ---------------------------------------------------------------------------
// hop expansion: set iteration over an explicit triplet list
// ---------------------------------------------------------------------------

struct ExpandExpectation {
    std::set<std::string> entities;   // keys
    std::set<std::size_t> triplets;   // indexes into the triplet vector
    std::size_t hops_used = 0;
};

// Mirrors the published expansion contract directly from the triplet list:
// hop 0 is everything in the seed chunks; each hop adds entities adjacent
// through non-self-loop triplets; for m >= 1 any non-self-loop triplet with
// both endpoints inside the final set joins.
inline ExpandExpectation expand_reference(const std::vector<kgrag::Triplet>& triplets,
                                          const std::set<std::string>& seed_chunks,
                                          std::size_t m) {
    using kgrag::text::entity_key;
    ExpandExpectation out;

    for (std::size_t i = 0; i < triplets.size(); ++i) {
        if (seed_chunks.count(triplets[i].source_chunk)) {
            out.triplets.insert(i);
            out.entities.insert(entity_key(triplets[i].head));
            out.entities.insert(entity_key(triplets[i].tail));
        }
    }

    for (std::size_t hop = 1; hop <= m; ++hop) {
        std::set<std::string> grown;
        for (const auto& t : triplets) {
            std::string hk = entity_key(t.head);
            std::string tk = entity_key(t.tail);
            if (hk == tk) continue;
            if (out.entities.count(hk) && !out.entities.count(tk)) grown.insert(tk);
            if (out.entities.count(tk) && !out.entities.count(hk)) grown.insert(hk);
        }
        if (grown.empty()) break;
        out.entities.insert(grown.begin(), grown.end());
        out.hops_used = hop;
    }

    if (m > 0) {
        for (std::size_t i = 0; i < triplets.size(); ++i) {
            std::string hk = entity_key(triplets[i].head);
            std::string tk = entity_key(triplets[i].tail);
            if (hk == tk) continue;
            if (out.entities.count(hk) && out.entities.count(tk)) out.triplets.insert(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// connected components: repeated sweep
// ---------------------------------------------------------------------------

inline std::vector<std::set<std::string>> components_reference(
    const std::set<std::string>& nodes,
    const std::vector<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& n : nodes) adj[n];
    for (const auto& [a, b] : edges) {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    std::set<std::string> seen;
    std::vector<std::set<std::string>> out;
    for (const auto& n : nodes) { // ordered: components come out by smallest member
        if (seen.count(n)) continue;
        std::set<std::string> comp{n};
        std::vector<std::string> stack{n};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            for (const auto& nb : adj[cur]) {
                if (comp.insert(nb).second) stack.push_back(nb);
            }
        }
        seen.insert(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

// ---------------------------------------------------------------------------
// top-k: full sort
// ---------------------------------------------------------------------------

struct ScoredId {
    std::string id;
    double score = 0.0;
};

inline double cosine_reference(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline std::vector<ScoredId> top_k_reference(
    const std::map<std::string, std::vector<double>>& vectors, const std::vector<double>& query,
    std::size_t k) {
    std::vector<ScoredId> all;
    for (const auto& [id, v] : vectors) all.push_back({id, cosine_reference(query, v)});
    std::stable_sort(all.begin(), all.end(), [](const ScoredId& x, const ScoredId& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.id < y.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

} // namespace oracle
