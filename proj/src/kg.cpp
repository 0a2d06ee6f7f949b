#include "kgrag/kg.hpp"

#include "kgrag/text.hpp"
#include "kgrag/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace kgrag {

using nlohmann::json;

// ---------------------------------------------------------------------------
// chunk registry
// ---------------------------------------------------------------------------

void AssociationKG::register_chunk(const std::string& chunk_id, const std::string& doc_id) {
    auto [it, inserted] = chunk_doc_.emplace(chunk_id, doc_id);
    if (!inserted) {
        if (it->second != doc_id) {
            throw std::invalid_argument("chunk " + chunk_id + " already registered to document " +
                                        it->second);
        }
        return;
    }
    doc_chunks_[doc_id].push_back(chunk_id);
}

void AssociationKG::register_chunks(std::span<const Chunk> chunks) {
    for (const auto& c : chunks) register_chunk(c.chunk_id, c.doc_id);
}

bool AssociationKG::has_chunk(const std::string& chunk_id) const {
    return chunk_doc_.count(chunk_id) > 0;
}

// ---------------------------------------------------------------------------
// mutation
// ---------------------------------------------------------------------------

std::string AssociationKG::dedup_key(const Triplet& t) {
    std::string key;
    key.reserve(t.head.size() + t.relation.size() + t.tail.size() + t.source_chunk.size() + 3);
    key += t.head;
    key += '\x1f';
    key += t.relation;
    key += '\x1f';
    key += t.tail;
    key += '\x1f';
    key += t.source_chunk;
    return key;
}

std::size_t AssociationKG::insert_triplets(std::span<const Triplet> batch) {
    std::vector<Triplet> normalized;
    normalized.reserve(batch.size());
    for (const auto& raw : batch) {
        Triplet t{text::normalize_surface(raw.head), text::normalize_surface(raw.relation),
                  text::normalize_surface(raw.tail), raw.source_chunk};
        if (t.head.empty() || t.relation.empty() || t.tail.empty()) {
            throw std::invalid_argument("triplet with empty field from chunk " + raw.source_chunk);
        }
        if (!has_chunk(t.source_chunk)) {
            throw std::invalid_argument("triplet references unregistered chunk " + t.source_chunk);
        }
        normalized.push_back(std::move(t));
    }

    std::size_t inserted = 0;
    for (auto& t : normalized) {
        if (!dedup_.insert(dedup_key(t)).second) continue;
        TripletId id = next_id_++;
        entity_index_[text::entity_key(t.head)].insert(id);
        entity_index_[text::entity_key(t.tail)].insert(id);
        chunk_index_[t.source_chunk].insert(id);
        doc_index_[chunk_doc_.at(t.source_chunk)].insert(id);
        records_.emplace(id, std::move(t));
        ++inserted;
    }
    return inserted;
}

std::size_t AssociationKG::remove_chunk_triplets(const std::string& chunk_id) {
    auto cit = chunk_index_.find(chunk_id);
    if (cit == chunk_index_.end()) return 0;
    std::set<TripletId> ids = std::move(cit->second);
    chunk_index_.erase(cit);

    for (TripletId id : ids) {
        auto rit = records_.find(id);
        const Triplet& t = rit->second;
        for (const std::string& key : {text::entity_key(t.head), text::entity_key(t.tail)}) {
            auto eit = entity_index_.find(key);
            if (eit != entity_index_.end()) {
                eit->second.erase(id);
                if (eit->second.empty()) entity_index_.erase(eit);
            }
        }
        dedup_.erase(dedup_key(t));
        records_.erase(rit);
    }
    return ids.size();
}

std::size_t AssociationKG::remove_document(const std::string& doc_id) {
    auto dit = doc_chunks_.find(doc_id);
    if (dit == doc_chunks_.end()) return 0;

    std::size_t removed = 0;
    for (const std::string& chunk_id : dit->second) {
        removed += remove_chunk_triplets(chunk_id);
        extracted_chunks_.erase(chunk_id);
        chunk_doc_.erase(chunk_id);
    }
    doc_chunks_.erase(dit);
    doc_index_.erase(doc_id);
    return removed;
}

// ---------------------------------------------------------------------------
// queries
// ---------------------------------------------------------------------------

const Triplet& AssociationKG::triplet(TripletId id) const {
    auto it = records_.find(id);
    if (it == records_.end()) throw std::out_of_range("unknown triplet id " + std::to_string(id));
    return it->second;
}

Subgraph AssociationKG::subgraph_for_chunks(const std::set<std::string>& chunk_ids) const {
    Subgraph g;
    for (const auto& chunk_id : chunk_ids) {
        auto it = chunk_index_.find(chunk_id);
        if (it == chunk_index_.end()) continue;
        for (TripletId id : it->second) {
            g.triplet_ids.insert(id);
            const Triplet& t = records_.at(id);
            g.entities.insert(text::entity_key(t.head));
            g.entities.insert(text::entity_key(t.tail));
        }
    }
    return g;
}

std::pair<std::set<std::string>, std::set<TripletId>>
AssociationKG::entity_neighborhood(const std::set<std::string>& entities) const {
    std::set<std::string> adjacent;
    std::set<TripletId> incident;
    for (const auto& key : entities) {
        auto it = entity_index_.find(key);
        if (it == entity_index_.end()) continue;
        for (TripletId id : it->second) {
            const Triplet& t = records_.at(id);
            std::string hk = text::entity_key(t.head);
            std::string tk = text::entity_key(t.tail);
            if (hk == tk) continue; // self-loop: stored but not traversed
            incident.insert(id);
            adjacent.insert(hk == key ? tk : hk);
        }
    }
    for (const auto& key : entities) adjacent.erase(key);
    return {std::move(adjacent), std::move(incident)};
}

std::size_t AssociationKG::relation_count() const {
    std::set<std::string> rel;
    for (const auto& [id, t] : records_) rel.insert(t.relation);
    return rel.size();
}

std::vector<std::string> AssociationKG::chunk_ids_of_doc(const std::string& doc_id) const {
    auto it = doc_chunks_.find(doc_id);
    if (it == doc_chunks_.end()) return {};
    return it->second;
}

// ---------------------------------------------------------------------------
// extraction ledger
// ---------------------------------------------------------------------------

bool AssociationKG::extraction_done(const std::string& chunk_id) const {
    return extracted_chunks_.count(chunk_id) > 0;
}

void AssociationKG::mark_extracted(const std::string& chunk_id) {
    if (!has_chunk(chunk_id)) {
        throw std::invalid_argument("cannot mark unregistered chunk " + chunk_id);
    }
    extracted_chunks_.insert(chunk_id);
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

std::string AssociationKG::snapshot_string() const {
    // Canonical order keeps the snapshot byte-stable across insertion
    // histories: two stores with equal content serialize identically.
    std::vector<const Triplet*> ordered;
    ordered.reserve(records_.size());
    for (const auto& [id, t] : records_) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(), [](const Triplet* a, const Triplet* b) {
        if (a->source_chunk != b->source_chunk) return a->source_chunk < b->source_chunk;
        if (a->head != b->head) return a->head < b->head;
        if (a->relation != b->relation) return a->relation < b->relation;
        return a->tail < b->tail;
    });

    std::ostringstream out;
    json header{{"version", 1}, {"created_at", created_at_}, {"triplets", ordered.size()}};
    out << header.dump() << '\n';
    for (const Triplet* t : ordered) {
        json line{{"head", t->head},
                  {"relation", t->relation},
                  {"tail", t->tail},
                  {"chunk_id", t->source_chunk}};
        out << line.dump() << '\n';
    }
    return out.str();
}

void AssociationKG::save_snapshot(const std::string& path) const {
    write_file(path, snapshot_string());
}

AssociationKG AssociationKG::load_snapshot_string(const std::string& data,
                                                  std::span<const Chunk> chunks) {
    std::istringstream in(data);
    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty snapshot", 0);

    json header;
    try {
        header = json::parse(line);
    } catch (const json::parse_error& e) {
        throw LoadError(std::string("bad snapshot header: ") + e.what(), e.byte);
    }
    if (!header.contains("version") || header["version"] != 1) {
        throw LoadError("unsupported snapshot version", 0);
    }

    AssociationKG kg(header.value("created_at", "1970-01-01T00:00:00Z"));
    kg.register_chunks(chunks);

    std::size_t offset = line.size() + 1;
    std::vector<Triplet> batch;
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
            batch.push_back(Triplet{j["head"], j["relation"], j["tail"], j["chunk_id"]});
        }
        offset += line.size() + 1;
    }

    std::size_t expected = header.value("triplets", batch.size());
    if (expected != batch.size()) {
        throw LoadError("snapshot truncated: header says " + std::to_string(expected) +
                            " triplets, found " + std::to_string(batch.size()),
                        offset);
    }
    try {
        kg.insert_triplets(batch);
    } catch (const std::invalid_argument& e) {
        throw LoadError(e.what(), 0);
    }
    return kg;
}

AssociationKG AssociationKG::load_snapshot(const std::string& path,
                                           std::span<const Chunk> chunks) {
    return load_snapshot_string(read_file(path), chunks);
}

AssociationKG restrict_to_chunks(const AssociationKG& kg, const std::set<std::string>& allowed) {
    AssociationKG out(kg.created_at());
    for (const auto& chunk_id : allowed) {
        auto it = kg.chunk_documents().find(chunk_id);
        if (it != kg.chunk_documents().end()) out.register_chunk(chunk_id, it->second);
    }
    std::vector<Triplet> batch;
    for (const auto& [id, t] : kg.records()) {
        if (allowed.count(t.source_chunk)) batch.push_back(t);
    }
    out.insert_triplets(batch);
    for (const auto& chunk_id : allowed) {
        if (kg.extraction_done(chunk_id)) out.mark_extracted(chunk_id);
    }
    return out;
}

std::set<std::string> entities_of(const AssociationKG& kg, const std::set<TripletId>& ids) {
    std::set<std::string> out;
    for (TripletId id : ids) {
        const Triplet& t = kg.triplet(id);
        out.insert(text::entity_key(t.head));
        out.insert(text::entity_key(t.tail));
    }
    return out;
}

} // namespace kgrag
