#pragma once

#include "kgrag/corpus.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kgrag {

using TripletId = std::uint64_t;

// One extracted fact, bound to the chunk it came from. head/relation/tail
// hold normalized display forms (NFC, trimmed, collapsed whitespace);
// entity equality uses the case-folded key.
struct Triplet {
    std::string head;
    std::string relation;
    std::string tail;
    std::string source_chunk;
};

struct Subgraph {
    std::set<TripletId> triplet_ids;
    std::set<std::string> entities; // keys of the heads/tails of triplet_ids
};

// Triplet store with entity adjacency, chunk and document indexes, and an
// extraction ledger for resumable KG construction. Chunks must be
// registered before triplets referencing them are inserted. Queries operate
// on the object as an immutable snapshot; writers need external exclusion.
class AssociationKG {
public:
    AssociationKG() = default;
    explicit AssociationKG(std::string created_at) : created_at_(std::move(created_at)) {}

    // --- chunk registry -----------------------------------------------
    void register_chunk(const std::string& chunk_id, const std::string& doc_id);
    void register_chunks(std::span<const Chunk> chunks);
    bool has_chunk(const std::string& chunk_id) const;
    std::size_t registered_chunk_count() const { return chunk_doc_.size(); }

    // --- mutation -------------------------------------------------------
    // Duplicates (identical h,r,t,c) are ignored. A batch containing a
    // triplet with an unregistered source chunk is rejected wholesale.
    std::size_t insert_triplets(std::span<const Triplet> batch);

    // Removes all triplets sourced from the document's chunks, compacts the
    // indexes, and unregisters those chunks. Unknown doc -> 0.
    std::size_t remove_document(const std::string& doc_id);

    // --- queries ----------------------------------------------------------
    const Triplet& triplet(TripletId id) const;
    Subgraph subgraph_for_chunks(const std::set<std::string>& chunk_ids) const;

    // Adjacent entities (keys) across any shared triplet, minus the inputs,
    // plus the incident triplet ids. Self-loops are never traversed.
    std::pair<std::set<std::string>, std::set<TripletId>>
    entity_neighborhood(const std::set<std::string>& entities) const;

    std::size_t size() const { return records_.size(); }
    std::size_t entity_count() const { return entity_index_.size(); }
    std::size_t relation_count() const;
    const std::map<TripletId, Triplet>& records() const { return records_; }
    const std::unordered_map<std::string, std::set<TripletId>>& chunk_index() const {
        return chunk_index_;
    }
    const std::unordered_map<std::string, std::string>& chunk_documents() const {
        return chunk_doc_;
    }
    std::vector<std::string> chunk_ids_of_doc(const std::string& doc_id) const;

    // --- extraction ledger ------------------------------------------------
    bool extraction_done(const std::string& chunk_id) const;
    void mark_extracted(const std::string& chunk_id);
    const std::set<std::string>& extracted_chunks() const { return extracted_chunks_; }

    // --- persistence --------------------------------------------------------
    // Snapshot: header line {version, created_at, triplets}, then one
    // triplet JSONL line per record in canonical (chunk, head, relation,
    // tail) order. Byte-stable for equal content.
    std::string snapshot_string() const;
    void save_snapshot(const std::string& path) const;

    // Chunks to register must be supplied; triplets referencing anything
    // else fail the load.
    static AssociationKG load_snapshot_string(const std::string& data,
                                              std::span<const Chunk> chunks);
    static AssociationKG load_snapshot(const std::string& path, std::span<const Chunk> chunks);

    const std::string& created_at() const { return created_at_; }

private:
    std::size_t remove_chunk_triplets(const std::string& chunk_id);
    static std::string dedup_key(const Triplet& t);

    std::string created_at_ = "1970-01-01T00:00:00Z";
    TripletId next_id_ = 0;
    std::map<TripletId, Triplet> records_;
    std::unordered_set<std::string> dedup_;
    std::unordered_map<std::string, std::set<TripletId>> entity_index_; // key -> ids
    std::unordered_map<std::string, std::set<TripletId>> chunk_index_;
    std::unordered_map<std::string, std::set<TripletId>> doc_index_;
    std::unordered_map<std::string, std::string> chunk_doc_;
    std::unordered_map<std::string, std::vector<std::string>> doc_chunks_;
    std::set<std::string> extracted_chunks_;
};

// Entity key set of a triplet id collection.
std::set<std::string> entities_of(const AssociationKG& kg, const std::set<TripletId>& ids);

// Copy holding only triplets sourced from the allowed chunks, with exactly
// those chunks registered. Relative triplet order and created_at survive.
AssociationKG restrict_to_chunks(const AssociationKG& kg, const std::set<std::string>& allowed);

} // namespace kgrag
