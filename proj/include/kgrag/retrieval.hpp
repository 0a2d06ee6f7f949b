#pragma once

#include "kgrag/embedding.hpp"
#include "kgrag/kg.hpp"

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace kgrag {

struct SeedSet {
    std::string query;
    std::vector<double> query_vector;
    std::vector<ScoredChunk> scored; // top seed_k by cosine, score desc then id asc
};

// Embeds the query and ranks indexed chunks. Every similarity computed on
// the way is dropped into `cache` (when given) so the organizer can reuse
// them. restrict_to narrows the candidate pool (per-example documents in
// the distractor setting). Refuses an index built by a different provider
// and a zero seed_k.
SeedSet seed_retrieve(const std::string& query, EmbeddingProvider& provider,
                      const VectorIndex& index, std::size_t seed_k,
                      QuerySimilarityCache* cache = nullptr,
                      const std::set<std::string>* restrict_to = nullptr);

struct ExpandedResult {
    Subgraph subgraph;               // grows monotonically with hops
    std::vector<std::string> chunks; // readout, plus unlinked seeds at the end when kept
    std::size_t hops_used = 0;       // < requested hops when the frontier drained
    std::vector<std::string> unlinked_seeds; // seeds no subgraph triplet mentions, seed order
};

// Hop expansion over the entity graph. Hop 0 is the seed-chunk subgraph;
// each hop widens the entity set by adjacency, and for m >= 1 the subgraph
// keeps every non-self-loop triplet with both endpoints inside the widened
// set, plus everything from hop 0. Self-loops neither extend the frontier
// nor join through expansion. Seeds without any triplet stay in `chunks`
// only while keep_unlinked_seeds is on.
ExpandedResult expand(const AssociationKG& kg, const SeedSet& seeds, std::size_t m,
                      bool keep_unlinked_seeds = true);

// Chunk readout: distinct source chunks of the subgraph's triplets,
// ordered by first appearance over ascending triplet id.
std::vector<std::string> readout_chunks(const Subgraph& g, const AssociationKG& kg);

} // namespace kgrag
