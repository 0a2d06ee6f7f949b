#include "kgrag/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace kgrag {

using nlohmann::json;

// ---------------------------------------------------------------------------
// corpus store
// ---------------------------------------------------------------------------

void CorpusStore::add_document(const Document& doc, std::span<const Chunk> doc_chunks) {
    if (documents.count(doc.doc_id)) {
        throw std::invalid_argument("document already present: " + doc.doc_id);
    }
    documents.emplace(doc.doc_id, doc);
    for (const auto& c : doc_chunks) {
        if (c.doc_id != doc.doc_id) {
            throw std::invalid_argument("chunk " + c.chunk_id + " does not belong to " +
                                        doc.doc_id);
        }
        chunks.emplace(c.chunk_id, c);
    }
}

std::size_t CorpusStore::remove_document(const std::string& doc_id) {
    if (documents.erase(doc_id) == 0) return 0;
    std::size_t removed = 0;
    for (auto it = chunks.begin(); it != chunks.end();) {
        if (it->second.doc_id == doc_id) {
            it = chunks.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

const std::string* CorpusStore::chunk_text(const std::string& chunk_id) const {
    auto it = chunks.find(chunk_id);
    return it == chunks.end() ? nullptr : &it->second.text;
}

std::vector<Chunk> CorpusStore::chunks_of(const std::string& doc_id) const {
    std::vector<Chunk> out;
    for (const auto& [id, c] : chunks) {
        if (c.doc_id == doc_id) out.push_back(c);
    }
    std::sort(out.begin(), out.end(),
              [](const Chunk& a, const Chunk& b) { return a.seq < b.seq; });
    return out;
}

std::set<std::string> CorpusStore::chunk_ids_of_docs(const std::set<std::string>& doc_ids) const {
    std::set<std::string> out;
    for (const auto& [id, c] : chunks) {
        if (doc_ids.count(c.doc_id)) out.insert(id);
    }
    return out;
}

ChunkTextLookup CorpusStore::lookup() const {
    return [this](const std::string& chunk_id) { return chunk_text(chunk_id); };
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

void PipelineConfig::validate() const {
    if (seed_k == 0) throw std::invalid_argument("seed_k must be >= 1");
    if (budget_k == 0) throw std::invalid_argument("budget_k must be >= 1");
}

RetrievalResult run_retrieval(const std::string& question, const PipelineConfig& cfg,
                              const AssociationKG& kg, const VectorIndex& index,
                              EmbeddingProvider& provider, Reranker& reranker,
                              const std::set<std::string>* restrict_chunks) {
    cfg.validate();

    RetrievalResult r;
    QuerySimilarityCache sims(index);
    r.seeds = seed_retrieve(question, provider, index, cfg.seed_k, &sims, restrict_chunks);

    std::size_t hops = cfg.expansion ? cfg.hops : 0;
    r.expanded = expand(kg, r.seeds, hops, cfg.keep_unlinked_seeds);

    if (cfg.organization) {
        auto graph = build_weighted_graph(kg, r.expanded.subgraph, sims);
        std::vector<SpanningTree> trees;
        for (const auto& comp : connected_components(graph)) {
            trees.push_back(max_spanning_tree(graph, comp));
        }
        r.trees = rerank_trees(question, std::move(trees), reranker);
        std::span<const std::string> unlinked;
        if (cfg.keep_unlinked_seeds) unlinked = r.expanded.unlinked_seeds;
        r.bundle = select_context(r.trees, cfg.budget_k, unlinked);
    } else {
        // No MST filter, no budget: everything expansion produced, most
        // similar first.
        std::vector<ScoredChunk> scored;
        scored.reserve(r.expanded.chunks.size());
        for (const auto& id : r.expanded.chunks) scored.push_back({id, sims.score(id)});
        std::stable_sort(scored.begin(), scored.end(),
                         [](const ScoredChunk& a, const ScoredChunk& b) {
                             if (a.score != b.score) return a.score > b.score;
                             return a.chunk_id < b.chunk_id;
                         });
        for (const auto& s : scored) {
            r.bundle.entries.push_back({s.chunk_id, -1, s.score, ChunkOrigin::Similarity});
        }
    }
    return r;
}

QueryResult run_query(const std::string& question, const PipelineConfig& cfg,
                      const CorpusStore& corpus, const AssociationKG& kg,
                      const VectorIndex& index, EmbeddingProvider& provider, Reranker& reranker,
                      LlmClient& llm, const std::set<std::string>* restrict_chunks) {
    QueryResult q;
    q.retrieval =
        run_retrieval(question, cfg, kg, index, provider, reranker, restrict_chunks);
    q.prompt =
        assemble_prompt(q.retrieval.bundle, corpus.lookup(), question, cfg.max_context_chars);
    q.answer = generate_answer(llm, q.prompt, cfg.llm_retry);
    return q;
}

namespace {

const char* origin_name(ChunkOrigin o) {
    switch (o) {
        case ChunkOrigin::Tree: return "tree";
        case ChunkOrigin::Seed: return "seed";
        case ChunkOrigin::Similarity: return "similarity";
    }
    return "?";
}

} // namespace

json explain_json(const RetrievalResult& result, const QueryResult* full) {
    json seeds = json::array();
    for (const auto& s : result.seeds.scored) {
        seeds.push_back({{"chunk_id", s.chunk_id}, {"score", s.score}});
    }

    json trees = json::array();
    for (std::size_t rank = 0; rank < result.trees.size(); ++rank) {
        const auto& t = result.trees[rank];
        json edges = json::array();
        for (std::size_t i : dfs_edge_order(t)) {
            const auto& e = t.edges[i];
            edges.push_back({{"head", e.head},
                             {"relation", e.relation},
                             {"tail", e.tail},
                             {"chunk_id", e.source_chunk},
                             {"weight", e.weight}});
        }
        trees.push_back({{"rank", rank},
                         {"score", t.score},
                         {"fallback_scored", t.fallback_scored},
                         {"edges", edges}});
    }

    json bundle = json::array();
    for (const auto& e : result.bundle.entries) {
        bundle.push_back({{"chunk_id", e.chunk_id},
                          {"tree_rank", e.tree_rank},
                          {"tree_score", e.tree_score},
                          {"origin", origin_name(e.origin)}});
    }

    json out{{"query", result.seeds.query},
             {"seeds", seeds},
             {"subgraph",
              {{"triplets", result.expanded.subgraph.triplet_ids.size()},
               {"entities", result.expanded.subgraph.entities.size()}}},
             {"hops_used", result.expanded.hops_used},
             {"expanded_chunks", result.expanded.chunks},
             {"unlinked_seeds", result.expanded.unlinked_seeds},
             {"trees", trees},
             {"bundle", bundle}};
    if (full) {
        out["prompt"] = {{"truncated", full->prompt.truncated},
                         {"included_chunks", full->prompt.included_chunks}};
        out["answer"] = {{"text", full->answer.text},
                         {"model", full->answer.model_id},
                         {"attempts", full->answer.attempts},
                         {"empty_response", full->answer.empty_response}};
    }
    return out;
}

} // namespace kgrag
