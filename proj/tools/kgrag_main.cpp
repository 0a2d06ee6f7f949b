// kgrag: KG-guided retrieval pipeline CLI.
//
// Subcommands: ingest, extract-kg, query, eval, serve, remove-doc.
// State lives in a data directory (documents, chunks, KG snapshot, vector
// index, extraction ledger); providers come from a JSON config file and
// default to the deterministic offline mocks.

#include "kgrag/engine.hpp"
#include "kgrag/eval.hpp"
#include "kgrag/generation.hpp"
#include "kgrag/http_clients.hpp"
#include "kgrag/server.hpp"
#include "kgrag/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kgrag;

namespace {

struct AppConfig {
    std::string data_dir = "kgrag_data";
    PipelineConfig pipeline;
    json providers; // raw provider section, defaults applied at build time
    std::string created_at; // fixed KG creation stamp, empty = wall clock
};

AppConfig load_app_config(const std::string& path) {
    AppConfig cfg;
    if (path.empty()) return cfg;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw LoadError("config file " + path + ": " + e.what());
    }
    cfg.data_dir = j.value("data_dir", cfg.data_dir);
    cfg.created_at = j.value("created_at", "");
    if (j.contains("pipeline")) {
        const json& p = j["pipeline"];
        cfg.pipeline.seed_k = p.value("seed_k", cfg.pipeline.seed_k);
        cfg.pipeline.budget_k = p.value("budget_k", cfg.pipeline.budget_k);
        cfg.pipeline.hops = p.value("hops", cfg.pipeline.hops);
        cfg.pipeline.keep_unlinked_seeds =
            p.value("keep_unlinked_seeds", cfg.pipeline.keep_unlinked_seeds);
        cfg.pipeline.expansion = p.value("expansion", cfg.pipeline.expansion);
        cfg.pipeline.organization = p.value("organization", cfg.pipeline.organization);
        cfg.pipeline.max_context_chars =
            p.value("max_context_chars", cfg.pipeline.max_context_chars);
        cfg.pipeline.chunking.max_units =
            p.value("chunk_max_units", cfg.pipeline.chunking.max_units);
        cfg.pipeline.llm_retry.max_retries =
            p.value("llm_max_retries", cfg.pipeline.llm_retry.max_retries);
        cfg.pipeline.llm_retry.backoff_ms =
            p.value("llm_backoff_ms", cfg.pipeline.llm_retry.backoff_ms);
    }
    if (j.contains("providers")) cfg.providers = j["providers"];
    return cfg;
}

std::string env_or_empty(const std::string& name) {
    const char* v = name.empty() ? nullptr : std::getenv(name.c_str());
    return v ? v : "";
}

std::shared_ptr<EmbeddingProvider> build_embedding(const json& providers) {
    json cfg = providers.value("embedding", json{{"type", "mock"}});
    std::string type = cfg.value("type", "mock");
    if (type == "mock") {
        return std::make_shared<MockEmbeddingProvider>(cfg.value("dim", std::size_t{64}));
    }
    if (type == "http") {
        return std::make_shared<HttpEmbeddingProvider>(
            cfg.at("url").get<std::string>(), cfg.value("model", "embedder"),
            cfg.at("dim").get<std::size_t>(), cfg.value("timeout_seconds", 60));
    }
    throw std::invalid_argument("unknown embedding provider type: " + type);
}

std::shared_ptr<Reranker> build_reranker(const json& providers,
                                         const std::shared_ptr<EmbeddingProvider>& embedder) {
    json cfg = providers.value("reranker", json{{"type", "embedding"}});
    std::string type = cfg.value("type", "embedding");
    if (type == "embedding") return std::make_shared<EmbeddingReranker>(embedder);
    if (type == "http") {
        return std::make_shared<HttpReranker>(cfg.at("url").get<std::string>(),
                                              cfg.value("timeout_seconds", 60));
    }
    throw std::invalid_argument("unknown reranker type: " + type);
}

std::shared_ptr<LlmClient> build_llm(const json& providers) {
    json cfg = providers.value("llm", json{{"type", "mock"}});
    std::string type = cfg.value("type", "mock");
    if (type == "mock") {
        std::string fixtures = cfg.value("fixtures", "");
        std::string fallback = cfg.value("default_response", "");
        if (!fixtures.empty()) {
            return std::make_shared<MockLlmClient>(
                MockLlmClient::from_json_file(fixtures, fallback));
        }
        return std::make_shared<MockLlmClient>(fallback);
    }
    if (type == "openai") {
        return std::make_shared<OpenAiChatClient>(
            cfg.at("url").get<std::string>(), cfg.value("model", "gpt-4o-mini"),
            env_or_empty(cfg.value("api_key_env", "OPENAI_API_KEY")),
            cfg.value("timeout_seconds", 60));
    }
    throw std::invalid_argument("unknown llm provider type: " + type);
}

struct App {
    AppConfig cfg;
    std::shared_ptr<EmbeddingProvider> embedding;
    std::shared_ptr<Reranker> reranker;
    std::shared_ptr<LlmClient> llm;
    std::unique_ptr<RagEngine> engine;

    explicit App(AppConfig app_cfg) : cfg(std::move(app_cfg)) {
        embedding = build_embedding(cfg.providers);
        reranker = build_reranker(cfg.providers, embedding);
        llm = build_llm(cfg.providers);
        engine = std::make_unique<RagEngine>(cfg.pipeline, embedding, reranker, llm,
                                             cfg.created_at);
    }

    StatePaths paths() const { return StatePaths::in_dir(cfg.data_dir); }

    void load() { engine->load_state(paths()); }

    void save() {
        fs::create_directories(cfg.data_dir);
        engine->save_state(paths());
    }
};

volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }

int cmd_ingest(App& app, const std::string& path, const std::string& format, bool extract,
               std::size_t parallelism) {
    if (!fs::exists(path)) {
        std::cerr << "error: corpus file not found: " << path << "\n";
        return 2;
    }
    app.load();

    std::vector<PreparedDoc> docs;
    std::vector<std::string> warnings;
    if (format == "hotpot") {
        HotpotLoad loaded = load_hotpot_corpus(path, app.cfg.pipeline.chunking);
        warnings = loaded.warnings;
        std::map<std::string, PreparedDoc> by_doc;
        for (const auto& d : loaded.documents) by_doc[d.doc_id].doc = d;
        for (const auto& c : loaded.chunks) by_doc[c.doc_id].chunks.push_back(c);
        for (auto& [id, pd] : by_doc) docs.push_back(std::move(pd));
    } else if (format == "docs") {
        for (const auto& d : load_documents_jsonl(path)) {
            docs.push_back(prepare_document(d, app.cfg.pipeline.chunking));
        }
    } else {
        std::cerr << "error: unknown format '" << format << "' (use hotpot or docs)\n";
        return 2;
    }

    IngestReport report = app.engine->ingest(docs, extract, {parallelism, 2});
    app.save();

    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "documents: " << report.docs_added << " added, " << report.docs_updated
              << " updated, " << report.docs_skipped << " unchanged\n"
              << "chunks added: " << report.chunks_added << "\n";
    if (report.extracted) {
        std::cout << "extraction: " << report.extraction.chunks_processed << " chunks, "
                  << report.extraction.triplets_inserted << " triplets";
        if (!report.extraction.failed_chunks.empty()) {
            std::cout << ", " << report.extraction.failed_chunks.size() << " failed";
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_extract(App& app, std::size_t parallelism, std::size_t retries) {
    app.load();
    ExtractionReport report = app.engine->extract_pending({parallelism, retries});
    app.save();
    std::cout << "chunks processed: " << report.chunks_processed << " (skipped "
              << report.chunks_skipped << " already done)\n"
              << "triplets inserted: " << report.triplets_inserted << "\n"
              << "unparseable lines: " << report.lines_skipped << "\n";
    if (!report.failed_chunks.empty()) {
        std::cout << "failed chunks (" << report.failed_chunks.size() << "):";
        for (const auto& c : report.failed_chunks) std::cout << " " << c;
        std::cout << "\n";
        return 1;
    }
    return 0;
}

int cmd_query(App& app, const std::string& question, const PipelineConfig& cfg, bool explain) {
    app.load();
    QueryResult q = app.engine->query(question, &cfg);
    std::cout << q.answer.text << "\n";
    if (explain) std::cout << explain_json(q.retrieval, &q).dump(2) << "\n";
    return 0;
}

int cmd_eval(App& app, const std::string& qa_path, const EvalConfig& eval_cfg,
             const std::string& json_out) {
    if (!fs::exists(qa_path)) {
        std::cerr << "error: QA file not found: " << qa_path << "\n";
        return 2;
    }
    app.load();
    HotpotLoad loaded = load_hotpot_corpus(qa_path, app.cfg.pipeline.chunking);
    EvalReport report = app.engine->evaluate(loaded.examples, eval_cfg);
    std::cout << report.to_table();
    if (!json_out.empty()) {
        write_file(json_out, report.to_json().dump(2) + "\n");
        std::cout << "report written to " << json_out << "\n";
    }
    return 0;
}

int cmd_serve(App& app, const std::string& host, int port) {
    app.load();
    HttpService service(*app.engine);
    if (!service.start(host, port)) {
        std::cerr << "error: could not bind " << host << ":" << port << "\n";
        return 1;
    }
    std::cout << "listening on " << host << ":" << service.port() << "\n";
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service.stop();
    return 0;
}

int cmd_remove_doc(App& app, const std::string& doc_id) {
    app.load();
    std::size_t removed = app.engine->remove_document(doc_id);
    if (removed == 0) {
        std::cerr << "error: unknown document: " << doc_id << "\n";
        return 1;
    }
    app.save();
    std::cout << "removed " << removed << " chunks of " << doc_id << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"KG-guided retrieval pipeline"};
    cli.require_subcommand(1);

    std::string config_path;
    std::string data_dir;
    cli.add_option("--config", config_path, "JSON config file");
    cli.add_option("--data-dir", data_dir, "state directory (overrides config)");

    // ingest
    auto* ingest = cli.add_subcommand("ingest", "chunk and index a corpus file");
    std::string ingest_path, ingest_format = "hotpot";
    bool ingest_extract = false;
    std::size_t ingest_parallelism = 1;
    ingest->add_option("path", ingest_path, "corpus file")->required();
    ingest->add_option("--format", ingest_format, "hotpot | docs (default hotpot)");
    ingest->add_flag("--extract", ingest_extract, "run triplet extraction after indexing");
    ingest->add_option("--parallelism", ingest_parallelism, "extraction parallelism");

    // extract-kg
    auto* extract = cli.add_subcommand("extract-kg", "extract triplets for pending chunks");
    std::size_t extract_parallelism = 1, extract_retries = 2;
    extract->add_option("--parallelism", extract_parallelism, "worker count");
    extract->add_option("--retries", extract_retries, "per-chunk retry budget");

    // query
    auto* query = cli.add_subcommand("query", "answer one question");
    std::string question;
    long top_k = -1, hops = -1;
    bool no_expansion = false, no_organization = false, keep_unlinked = false,
         drop_unlinked = false, explain = false;
    query->add_option("question", question, "the question")->required();
    query->add_option("--top-k", top_k, "seed and budget size (default 10)");
    query->add_option("--hops", hops, "expansion hops (default 1)");
    query->add_flag("--no-expansion", no_expansion, "skip KG expansion");
    query->add_flag("--no-organization", no_organization, "skip MST organization");
    query->add_flag("--keep-unlinked-seeds", keep_unlinked, "retain seeds without triplets");
    query->add_flag("--drop-unlinked-seeds", drop_unlinked, "discard seeds without triplets");
    query->add_flag("--explain", explain, "print provenance JSON");

    // eval
    auto* eval = cli.add_subcommand("eval", "score a QA dataset");
    std::string qa_path, setting = "distractor", json_out;
    std::size_t eval_parallelism = 1;
    long e_top_k = -1, e_hops = -1;
    bool e_no_expansion = false, e_no_organization = false;
    eval->add_option("path", qa_path, "QA dataset file")->required();
    eval->add_option("--setting", setting, "distractor | fullwiki");
    eval->add_option("--parallelism", eval_parallelism, "examples in flight");
    eval->add_option("--json", json_out, "also write a JSON report here");
    eval->add_option("--top-k", e_top_k, "seed and budget size");
    eval->add_option("--hops", e_hops, "expansion hops");
    eval->add_flag("--no-expansion", e_no_expansion, "skip KG expansion");
    eval->add_flag("--no-organization", e_no_organization, "skip MST organization");

    // serve
    auto* serve = cli.add_subcommand("serve", "run the HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (0 = any)");

    // remove-doc
    auto* remove = cli.add_subcommand("remove-doc", "drop a document everywhere");
    std::string doc_id;
    remove->add_option("doc_id", doc_id, "document id")->required();

    CLI11_PARSE(cli, argc, argv);

    try {
        if (!config_path.empty() && !fs::exists(config_path)) {
            std::cerr << "error: config file not found: " << config_path << "\n";
            return 2;
        }
        AppConfig cfg = load_app_config(config_path);
        if (!data_dir.empty()) cfg.data_dir = data_dir;
        App app(cfg);

        if (ingest->parsed()) {
            return cmd_ingest(app, ingest_path, ingest_format, ingest_extract,
                              ingest_parallelism);
        }
        if (extract->parsed()) return cmd_extract(app, extract_parallelism, extract_retries);
        if (query->parsed()) {
            PipelineConfig qcfg = cfg.pipeline;
            if (top_k >= 0) {
                qcfg.seed_k = static_cast<std::size_t>(top_k);
                qcfg.budget_k = static_cast<std::size_t>(top_k);
            }
            if (hops >= 0) qcfg.hops = static_cast<std::size_t>(hops);
            if (no_expansion) qcfg.expansion = false;
            if (no_organization) qcfg.organization = false;
            if (keep_unlinked) qcfg.keep_unlinked_seeds = true;
            if (drop_unlinked) qcfg.keep_unlinked_seeds = false;
            return cmd_query(app, question, qcfg, explain);
        }
        if (eval->parsed()) {
            EvalConfig ecfg;
            ecfg.pipeline = cfg.pipeline;
            if (e_top_k >= 0) {
                ecfg.pipeline.seed_k = static_cast<std::size_t>(e_top_k);
                ecfg.pipeline.budget_k = static_cast<std::size_t>(e_top_k);
            }
            if (e_hops >= 0) ecfg.pipeline.hops = static_cast<std::size_t>(e_hops);
            if (e_no_expansion) ecfg.pipeline.expansion = false;
            if (e_no_organization) ecfg.pipeline.organization = false;
            if (setting == "fullwiki") {
                ecfg.setting = EvalSetting::Fullwiki;
            } else if (setting == "distractor") {
                ecfg.setting = EvalSetting::Distractor;
            } else {
                std::cerr << "error: unknown setting '" << setting << "'\n";
                return 2;
            }
            ecfg.parallelism = eval_parallelism;
            return cmd_eval(app, qa_path, ecfg, json_out);
        }
        if (serve->parsed()) return cmd_serve(app, host, port);
        if (remove->parsed()) return cmd_remove_doc(app, doc_id);
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
