#include "kgrag/engine.hpp"

#include "kgrag/util.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <sstream>

namespace kgrag {

namespace fs = std::filesystem;

namespace {

std::string now_utc_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void atomic_write(const std::string& path, const std::string& data) {
    std::string tmp = path + ".tmp";
    write_file(tmp, data);
    fs::rename(tmp, path);
}

} // namespace

PreparedDoc prepare_document(const Document& doc, const ChunkingConfig& cfg) {
    return {doc, split_document(doc, cfg)};
}

StatePaths StatePaths::in_dir(const std::string& dir) {
    return {dir + "/documents.jsonl", dir + "/chunks.jsonl", dir + "/kg.snapshot",
            dir + "/index.jsonl", dir + "/extracted.ledger"};
}

RagEngine::RagEngine(PipelineConfig cfg, std::shared_ptr<EmbeddingProvider> provider,
                     std::shared_ptr<Reranker> reranker, std::shared_ptr<LlmClient> llm,
                     std::string created_at)
    : cfg_(std::move(cfg)),
      provider_(std::move(provider)),
      reranker_(std::move(reranker)),
      llm_(std::move(llm)),
      created_at_(created_at.empty() ? now_utc_iso8601() : std::move(created_at)) {
    cfg_.validate();
    auto snap = std::make_shared<Snapshot>();
    snap->kg = AssociationKG(created_at_);
    snap->index = VectorIndex(provider_->fingerprint(), provider_->dim());
    snapshot_ = std::move(snap);
}

std::shared_ptr<const RagEngine::Snapshot> RagEngine::snapshot() const {
    std::shared_lock lock(snapshot_mu_);
    return snapshot_;
}

std::shared_ptr<RagEngine::Snapshot> RagEngine::copy_snapshot() const {
    return std::make_shared<Snapshot>(*snapshot());
}

void RagEngine::swap_snapshot(std::shared_ptr<const Snapshot> next) {
    std::unique_lock lock(snapshot_mu_);
    snapshot_ = std::move(next);
}

void RagEngine::bootstrap(CorpusStore corpus, AssociationKG kg, VectorIndex index) {
    std::scoped_lock writer(writer_mu_);
    auto snap = std::make_shared<Snapshot>();
    snap->corpus = std::move(corpus);
    snap->kg = std::move(kg);
    snap->index = std::move(index);
    swap_snapshot(std::move(snap));
}

void RagEngine::load_state(const StatePaths& paths) {
    CorpusStore corpus;
    if (fs::exists(paths.documents)) {
        auto docs = load_documents_jsonl(paths.documents);
        std::vector<Chunk> chunks;
        if (fs::exists(paths.chunks)) chunks = load_chunks_jsonl(paths.chunks);
        std::map<std::string, std::vector<Chunk>> by_doc;
        for (auto& c : chunks) by_doc[c.doc_id].push_back(c);
        for (auto& d : docs) corpus.add_document(d, by_doc[d.doc_id]);
    }

    std::vector<Chunk> all_chunks;
    for (const auto& [id, c] : corpus.chunks) all_chunks.push_back(c);

    AssociationKG kg(created_at_);
    if (fs::exists(paths.kg)) {
        kg = AssociationKG::load_snapshot(paths.kg, all_chunks);
    } else {
        kg.register_chunks(all_chunks);
    }
    if (fs::exists(paths.ledger)) {
        std::istringstream in(read_file(paths.ledger));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && kg.has_chunk(line)) kg.mark_extracted(line);
        }
    }

    VectorIndex index(provider_->fingerprint(), provider_->dim());
    if (fs::exists(paths.index)) {
        index = VectorIndex::load(paths.index);
        if (index.fingerprint() != provider_->fingerprint()) {
            throw LoadError("vector index fingerprint '" + index.fingerprint() +
                            "' does not match provider '" + provider_->fingerprint() + "'");
        }
    }

    bootstrap(std::move(corpus), std::move(kg), std::move(index));
}

void RagEngine::save_state(const StatePaths& paths) const {
    auto snap = snapshot();

    std::vector<Document> docs;
    for (const auto& [id, d] : snap->corpus.documents) docs.push_back(d);
    std::vector<Chunk> chunks;
    for (const auto& [id, c] : snap->corpus.chunks) chunks.push_back(c);

    save_documents_jsonl(paths.documents, docs);
    save_chunks_jsonl(paths.chunks, chunks);
    atomic_write(paths.kg, snap->kg.snapshot_string());
    atomic_write(paths.index, snap->index.to_jsonl());

    std::string ledger;
    for (const auto& id : snap->kg.extracted_chunks()) {
        ledger += id;
        ledger += '\n';
    }
    atomic_write(paths.ledger, ledger);
}

IngestReport RagEngine::ingest(std::span<const PreparedDoc> docs, bool extract,
                               const ExtractionOptions& options) {
    std::scoped_lock writer(writer_mu_);
    auto snap = copy_snapshot();
    IngestReport report;
    std::vector<Chunk> fresh;

    for (const auto& prepared : docs) {
        const Document& doc = prepared.doc;
        auto it = snap->corpus.documents.find(doc.doc_id);
        if (it != snap->corpus.documents.end()) {
            if (it->second.title == doc.title && it->second.text == doc.text) {
                ++report.docs_skipped;
                continue;
            }
            snap->corpus.remove_document(doc.doc_id);
            snap->kg.remove_document(doc.doc_id);
            snap->index.remove_document(doc.doc_id);
            ++report.docs_updated;
        } else {
            ++report.docs_added;
        }

        snap->corpus.add_document(doc, prepared.chunks);
        std::vector<std::string> texts;
        for (const auto& c : prepared.chunks) texts.push_back(c.text);
        auto vecs = provider_->embed(texts);
        for (std::size_t i = 0; i < prepared.chunks.size(); ++i) {
            snap->index.add(prepared.chunks[i].chunk_id, std::move(vecs[i]));
            snap->kg.register_chunk(prepared.chunks[i].chunk_id, doc.doc_id);
            fresh.push_back(prepared.chunks[i]);
        }
        report.chunks_added += prepared.chunks.size();
    }

    if (extract && !fresh.empty()) {
        report.extraction = extract_corpus(snap->kg, fresh, *llm_, options);
        report.extracted = true;
    }
    swap_snapshot(std::move(snap));
    return report;
}

ExtractionReport RagEngine::extract_pending(const ExtractionOptions& options) {
    std::scoped_lock writer(writer_mu_);
    auto snap = copy_snapshot();
    std::vector<Chunk> chunks;
    for (const auto& [id, c] : snap->corpus.chunks) chunks.push_back(c);
    auto report = extract_corpus(snap->kg, chunks, *llm_, options);
    swap_snapshot(std::move(snap));
    return report;
}

std::size_t RagEngine::remove_document(const std::string& doc_id) {
    std::scoped_lock writer(writer_mu_);
    auto snap = copy_snapshot();
    std::size_t chunks_removed = snap->corpus.remove_document(doc_id);
    if (chunks_removed == 0) return 0;
    snap->kg.remove_document(doc_id);
    snap->index.remove_document(doc_id);
    swap_snapshot(std::move(snap));
    return chunks_removed;
}

RetrievalResult RagEngine::retrieve(const std::string& question,
                                    const PipelineConfig* override_cfg) const {
    auto snap = snapshot();
    const PipelineConfig& cfg = override_cfg ? *override_cfg : cfg_;
    return run_retrieval(question, cfg, snap->kg, snap->index, *provider_, *reranker_);
}

QueryResult RagEngine::query(const std::string& question,
                             const PipelineConfig* override_cfg) const {
    auto snap = snapshot();
    const PipelineConfig& cfg = override_cfg ? *override_cfg : cfg_;
    return run_query(question, cfg, snap->corpus, snap->kg, snap->index, *provider_, *reranker_,
                     *llm_);
}

EvalReport RagEngine::evaluate(std::span<const QaExample> examples, EvalConfig config) const {
    auto snap = snapshot();
    return run_eval(snap->corpus, snap->kg, snap->index, examples, *provider_, *reranker_,
                    *llm_, config);
}

EngineHealth RagEngine::health() const {
    auto snap = snapshot();
    return {snap->corpus.chunks.size(), snap->kg.size()};
}

} // namespace kgrag
