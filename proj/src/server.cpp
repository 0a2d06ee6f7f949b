#include "kgrag/server.hpp"

#include "kgrag/util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>

namespace kgrag {

using nlohmann::json;

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply_json(res, status, json{{"error", message}});
}

// Returns false after replying 400 when the body is not a JSON object.
bool parse_object(const httplib::Request& req, httplib::Response& res, json& out) {
    out = json::parse(req.body, nullptr, false);
    if (out.is_discarded() || !out.is_object()) {
        reply_error(res, 400, "body must be a JSON object");
        return false;
    }
    return true;
}

// Reads question plus optional top_k/hops overrides; false = replied 400.
bool read_query_params(const json& body, const PipelineConfig& base, httplib::Response& res,
                       std::string& question, PipelineConfig& cfg) {
    if (!body.contains("question") || !body["question"].is_string() ||
        body["question"].get_ref<const std::string&>().empty()) {
        reply_error(res, 400, "missing or empty 'question'");
        return false;
    }
    question = body["question"];
    cfg = base;
    if (body.contains("top_k")) {
        if (!body["top_k"].is_number_integer() || body["top_k"].get<long>() < 1) {
            reply_error(res, 400, "'top_k' must be a positive integer");
            return false;
        }
        cfg.seed_k = body["top_k"].get<std::size_t>();
        cfg.budget_k = cfg.seed_k;
    }
    if (body.contains("hops")) {
        if (!body["hops"].is_number_integer() || body["hops"].get<long>() < 0) {
            reply_error(res, 400, "'hops' must be a non-negative integer");
            return false;
        }
        cfg.hops = body["hops"].get<std::size_t>();
    }
    return true;
}

} // namespace

HttpService::HttpService(RagEngine& engine)
    : engine_(engine), server_(std::make_unique<httplib::Server>()) {
    route();
}

HttpService::~HttpService() { stop(); }

void HttpService::route() {
    server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        auto h = engine_.health();
        reply_json(res, 200,
                   json{{"status", "ok"},
                        {"corpus_size", h.corpus_size},
                        {"kg_triplets", h.kg_triplets}});
    });

    server_->Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        std::string question;
        PipelineConfig cfg;
        if (!parse_object(req, res, body)) return;
        if (!read_query_params(body, engine_.config(), res, question, cfg)) return;
        try {
            QueryResult q = engine_.query(question, &cfg);
            json context = json::array();
            auto snap = engine_.snapshot();
            for (const auto& id : q.prompt.included_chunks) {
                const std::string* text = snap->corpus.chunk_text(id);
                context.push_back({{"chunk_id", id}, {"text", text ? *text : ""}});
            }
            json explain = explain_json(q.retrieval, &q);
            reply_json(res, 200,
                       json{{"answer", q.answer.text},
                            {"context", context},
                            {"trees", explain["trees"]},
                            {"truncated", q.prompt.truncated}});
        } catch (const ProviderError& e) {
            reply_error(res, 503, e.what());
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    server_->Post("/retrieve", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        std::string question;
        PipelineConfig cfg;
        if (!parse_object(req, res, body)) return;
        if (!read_query_params(body, engine_.config(), res, question, cfg)) return;
        try {
            RetrievalResult r = engine_.retrieve(question, &cfg);
            reply_json(res, 200, explain_json(r));
        } catch (const ProviderError& e) {
            reply_error(res, 503, e.what());
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    server_->Post("/ingest", [this](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (!parse_object(req, res, body)) return;
        if (!body.contains("documents") || !body["documents"].is_array()) {
            reply_error(res, 400, "missing 'documents' array");
            return;
        }
        std::vector<PreparedDoc> docs;
        for (const auto& d : body["documents"]) {
            if (!d.is_object() || !d.contains("doc_id") || !d.contains("text") ||
                !d["doc_id"].is_string() || !d["text"].is_string() ||
                d["doc_id"].get_ref<const std::string&>().empty()) {
                reply_error(res, 400, "each document needs string doc_id and text");
                return;
            }
            Document doc{d["doc_id"], d.value("title", d["doc_id"].get<std::string>()),
                         d["text"]};
            docs.push_back(prepare_document(doc, engine_.config().chunking));
        }
        bool extract = body.value("extract", false);
        try {
            IngestReport report = engine_.ingest(docs, extract);
            json out{{"docs_added", report.docs_added},
                     {"docs_updated", report.docs_updated},
                     {"docs_skipped", report.docs_skipped},
                     {"chunks_added", report.chunks_added}};
            if (report.extracted) {
                out["triplets_inserted"] = report.extraction.triplets_inserted;
                out["failed_chunks"] = report.extraction.failed_chunks;
            }
            reply_json(res, 200, out);
        } catch (const ProviderError& e) {
            reply_error(res, 503, e.what());
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    server_->Delete(R"(/documents/(.+))", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
        std::string doc_id = req.matches[1];
        std::size_t removed = engine_.remove_document(doc_id);
        if (removed == 0) {
            reply_error(res, 404, "unknown document: " + doc_id);
            return;
        }
        reply_json(res, 200, json{{"doc_id", doc_id}, {"removed_chunks", removed}});
    });
}

bool HttpService::start(const std::string& host, int port) {
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
        if (port_ < 0) return false;
    } else {
        if (!server_->bind_to_port(host, port)) return false;
        port_ = port;
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    for (int i = 0; i < 200 && !server_->is_running(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return server_->is_running();
}

void HttpService::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace kgrag
