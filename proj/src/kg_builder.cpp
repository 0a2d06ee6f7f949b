#include "kgrag/kg_builder.hpp"

#include "kgrag/prompts.hpp"
#include "kgrag/util.hpp"

#include <json.hpp>

#include <sstream>

namespace kgrag {

using nlohmann::json;

std::vector<ChatMessage> build_extraction_prompt(const Chunk& chunk) {
    json payload{{"text", chunk.text}};
    return {
        {"system", prompts::kTripletExtractionSystemV1},
        {"user", std::string(prompts::kTripletExtractionUserPrefixV1) + payload.dump()},
    };
}

ParseResult parse_extraction_output(const std::string& output, const std::string& chunk_id) {
    ParseResult result;
    std::istringstream in(output);
    std::string line;
    while (std::getline(in, line)) {
        std::string_view sv(line);
        while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ' || sv.back() == '\t'))
            sv.remove_suffix(1);
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        if (sv.empty()) continue;

        json j = json::parse(sv, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++result.skipped_lines;
            continue;
        }
        bool ok = true;
        for (const char* field : {"head", "relation", "tail"}) {
            if (!j.contains(field) || !j[field].is_string() ||
                j[field].get_ref<const std::string&>().empty()) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++result.skipped_lines;
            continue;
        }
        result.triplets.push_back(Triplet{j["head"], j["relation"], j["tail"], chunk_id});
    }
    return result;
}

namespace {

struct ChunkOutcome {
    ParseResult parsed;
    bool failed = false;
};

} // namespace

ExtractionReport extract_corpus(AssociationKG& kg, std::span<const Chunk> chunks, LlmClient& llm,
                                const ExtractionOptions& options) {
    std::vector<const Chunk*> pending;
    ExtractionReport report;
    for (const auto& c : chunks) {
        if (!kg.has_chunk(c.chunk_id)) kg.register_chunk(c.chunk_id, c.doc_id);
        if (kg.extraction_done(c.chunk_id)) {
            ++report.chunks_skipped;
        } else {
            pending.push_back(&c);
        }
    }

    std::vector<ChunkOutcome> outcomes(pending.size());
    parallel_for(pending.size(), options.parallelism, [&](std::size_t i) {
        const Chunk& chunk = *pending[i];
        auto messages = build_extraction_prompt(chunk);
        std::string response;
        bool got = false;
        for (std::size_t attempt = 0; attempt <= options.retry_limit; ++attempt) {
            try {
                response = llm.complete(messages);
                got = true;
                break;
            } catch (const std::exception&) {
                // retry until the budget runs out
            }
        }
        if (!got) {
            outcomes[i].failed = true;
            return;
        }
        outcomes[i].parsed = parse_extraction_output(response, chunk.chunk_id);
    });

    // Serial, index-ordered aggregation keeps ids and the ledger
    // independent of thread interleaving.
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const Chunk& chunk = *pending[i];
        if (outcomes[i].failed) {
            report.failed_chunks.push_back(chunk.chunk_id);
            continue;
        }
        report.triplets_inserted += kg.insert_triplets(outcomes[i].parsed.triplets);
        report.lines_skipped += outcomes[i].parsed.skipped_lines;
        kg.mark_extracted(chunk.chunk_id);
        ++report.chunks_processed;
    }
    return report;
}

ExtractionStats triplet_stats(const AssociationKG& kg) {
    ExtractionStats stats;
    stats.triplet_count = kg.size();
    stats.entity_count = kg.entity_count();
    stats.relation_count = kg.relation_count();

    // Start every registered chunk and document at zero so silent ones
    // land in the 0 bucket.
    std::map<std::string, std::size_t> chunk_totals;
    std::map<std::string, std::size_t> doc_totals;
    for (const auto& [chunk_id, doc_id] : kg.chunk_documents()) {
        chunk_totals[chunk_id] = 0;
        doc_totals[doc_id] = 0;
    }
    for (const auto& [id, t] : kg.records()) {
        ++chunk_totals[t.source_chunk];
        ++doc_totals[kg.chunk_documents().at(t.source_chunk)];
    }

    for (const auto& [chunk, n] : chunk_totals) ++stats.per_chunk[n];
    for (const auto& [doc, n] : doc_totals) ++stats.per_document[n];
    return stats;
}

std::vector<Triplet> load_triplets_jsonl(const std::string& path) {
    std::string data = read_file(path);
    std::vector<Triplet> out;
    std::istringstream in(data);
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw LoadError(std::string("bad triplet line: ") + e.what(),
                                offset + e.byte - 1);
            }
            for (const char* field : {"head", "relation", "tail", "chunk_id"}) {
                if (!j.contains(field) || !j[field].is_string()) {
                    throw LoadError(std::string("triplet line missing field: ") + field, offset);
                }
            }
            out.push_back(Triplet{j["head"], j["relation"], j["tail"], j["chunk_id"]});
        }
        offset += line.size() + 1;
    }
    return out;
}

void save_triplets_jsonl(const std::string& path, std::span<const Triplet> triplets) {
    std::ostringstream out;
    for (const auto& t : triplets) {
        json j{{"head", t.head}, {"relation", t.relation}, {"tail", t.tail},
               {"chunk_id", t.source_chunk}};
        out << j.dump() << '\n';
    }
    write_file(path, out.str());
}

} // namespace kgrag
