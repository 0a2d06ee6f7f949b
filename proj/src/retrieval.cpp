#include "kgrag/retrieval.hpp"

#include "kgrag/text.hpp"

#include <stdexcept>
#include <unordered_set>

namespace kgrag {

SeedSet seed_retrieve(const std::string& query, EmbeddingProvider& provider,
                      const VectorIndex& index, std::size_t seed_k,
                      QuerySimilarityCache* cache, const std::set<std::string>* restrict_to) {
    if (seed_k == 0) throw std::invalid_argument("seed_k must be positive");
    if (provider.fingerprint() != index.fingerprint()) {
        throw std::invalid_argument("index built with '" + index.fingerprint() +
                                    "' cannot be scored with '" + provider.fingerprint() + "'");
    }

    SeedSet result;
    result.query = query;
    std::vector<std::string> one{query};
    result.query_vector = provider.embed(one).at(0);

    std::vector<ScoredChunk> scored;
    if (restrict_to) {
        scored = index.top_k_within(result.query_vector, index.size(), *restrict_to);
    } else {
        scored = index.score_all(result.query_vector);
    }
    if (cache) {
        cache->set_query_vector(result.query_vector);
        for (const auto& s : scored) cache->put(s.chunk_id, s.score);
    }
    if (scored.size() > seed_k) scored.resize(seed_k);
    result.scored = std::move(scored);
    return result;
}

ExpandedResult expand(const AssociationKG& kg, const SeedSet& seeds, std::size_t m,
                      bool keep_unlinked_seeds) {
    std::set<std::string> seed_chunks;
    for (const auto& s : seeds.scored) seed_chunks.insert(s.chunk_id);

    ExpandedResult result;
    result.subgraph = kg.subgraph_for_chunks(seed_chunks);

    std::set<std::string> entities = result.subgraph.entities;
    for (std::size_t hop = 1; hop <= m; ++hop) {
        auto [adjacent, incident] = kg.entity_neighborhood(entities);
        if (adjacent.empty()) break;
        entities.insert(adjacent.begin(), adjacent.end());
        result.hops_used = hop;
    }

    if (m > 0 && entities.size() >= 2) {
        // Sweep the store for triplets landing inside the widened set. At
        // m = 0 the subgraph stays exactly the seed-chunk subgraph, so no
        // sweep: linking edges between seed entities only join once a hop
        // is requested.
        for (const auto& [id, t] : kg.records()) {
            std::string hk = text::entity_key(t.head);
            std::string tk = text::entity_key(t.tail);
            if (hk == tk) continue;
            if (entities.count(hk) && entities.count(tk)) result.subgraph.triplet_ids.insert(id);
        }
    }
    result.subgraph.entities = std::move(entities);

    result.chunks = readout_chunks(result.subgraph, kg);
    std::unordered_set<std::string> present(result.chunks.begin(), result.chunks.end());
    for (const auto& s : seeds.scored) {
        if (!present.count(s.chunk_id)) result.unlinked_seeds.push_back(s.chunk_id);
    }
    if (keep_unlinked_seeds) {
        for (const auto& id : result.unlinked_seeds) result.chunks.push_back(id);
    }
    return result;
}

std::vector<std::string> readout_chunks(const Subgraph& g, const AssociationKG& kg) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (TripletId id : g.triplet_ids) { // std::set: ascending id = insertion order
        const std::string& chunk = kg.triplet(id).source_chunk;
        if (seen.insert(chunk).second) out.push_back(chunk);
    }
    return out;
}

} // namespace kgrag
