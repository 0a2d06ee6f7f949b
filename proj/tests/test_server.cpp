#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgrag/server.hpp"

#include "fixtures.hpp"

#include <httplib.h>
#include <json.hpp>

#include <memory>
#include <string>

using namespace kgrag;
using nlohmann::json;

namespace {

struct ServerRig {
    const fixtures::World& w = fixtures::world();
    std::shared_ptr<MockEmbeddingProvider> provider = std::make_shared<MockEmbeddingProvider>(64);
    std::shared_ptr<EmbeddingReranker> reranker = std::make_shared<EmbeddingReranker>(provider);
    std::shared_ptr<fixtures::FixtureLlm> llm = std::make_shared<fixtures::FixtureLlm>(w);
    RagEngine engine;
    HttpService service;

    ServerRig() : engine(make_config(), provider, reranker, llm, "2024-05-01T00:00:00Z"),
                  service(engine) {
        engine.bootstrap(w.corpus(), w.kg(), build_index(*provider, w.chunks));
        REQUIRE(service.start("127.0.0.1", 0));
        REQUIRE(service.port() > 0);
    }
    ~ServerRig() { service.stop(); }

    static PipelineConfig make_config() {
        PipelineConfig cfg;
        cfg.seed_k = 10;
        cfg.budget_k = 10;
        cfg.hops = 1;
        cfg.llm_retry = {0, 0};
        return cfg;
    }

    httplib::Client client() const { return httplib::Client("127.0.0.1", service.port()); }
};

json body_of(const httplib::Result& res) { return json::parse(res->body); }

} // namespace

TEST_CASE("health reports corpus and kg sizes") {
    ServerRig rig;
    auto cli = rig.client();
    auto res = cli.Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    json j = body_of(res);
    CHECK(j["status"] == "ok");
    CHECK(j["corpus_size"] == rig.w.chunks.size());
    CHECK(j["kg_triplets"] == rig.w.triplets.size());
}

TEST_CASE("query answers with context and trees") {
    ServerRig rig;
    auto cli = rig.client();
    json req{{"question", "Who founded the Kestrel Valley Railway?"}};
    auto res = cli.Post("/query", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);

    json j = body_of(res);
    CHECK(j["answer"] == "Mara Ellison");
    CHECK(j["truncated"] == false);
    REQUIRE(j["context"].is_array());
    REQUIRE(!j["context"].empty());
    for (const auto& c : j["context"]) {
        REQUIRE(c.contains("chunk_id"));
        REQUIRE(c.contains("text"));
        const std::string* text = rig.engine.snapshot()->corpus.chunk_text(c["chunk_id"]);
        REQUIRE(text != nullptr);
        CHECK(c["text"] == *text);
    }
    CHECK(j["trees"].is_array());
    CHECK(!j["trees"].empty());
}

TEST_CASE("query honours top_k and hops overrides") {
    ServerRig rig;
    auto cli = rig.client();
    json req{{"question", "Who founded the Kestrel Valley Railway?"}, {"top_k", 3}, {"hops", 0}};
    auto res = cli.Post("/query", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    json j = body_of(res);
    CHECK(j["context"].size() <= 3);
}

TEST_CASE("malformed query bodies are rejected with 400") {
    ServerRig rig;
    auto cli = rig.client();

    auto not_json = cli.Post("/query", "{nope", "application/json");
    REQUIRE(not_json);
    CHECK(not_json->status == 400);
    CHECK(body_of(not_json).contains("error"));

    auto array_body = cli.Post("/query", "[1,2]", "application/json");
    REQUIRE(array_body);
    CHECK(array_body->status == 400);

    auto no_question = cli.Post("/query", "{}", "application/json");
    REQUIRE(no_question);
    CHECK(no_question->status == 400);

    auto empty_question = cli.Post("/query", R"({"question": ""})", "application/json");
    REQUIRE(empty_question);
    CHECK(empty_question->status == 400);

    auto bad_top_k = cli.Post("/query", R"({"question": "q", "top_k": 0})", "application/json");
    REQUIRE(bad_top_k);
    CHECK(bad_top_k->status == 400);

    auto str_top_k =
        cli.Post("/query", R"({"question": "q", "top_k": "five"})", "application/json");
    REQUIRE(str_top_k);
    CHECK(str_top_k->status == 400);

    auto bad_hops = cli.Post("/query", R"({"question": "q", "hops": -1})", "application/json");
    REQUIRE(bad_hops);
    CHECK(bad_hops->status == 400);
}

TEST_CASE("retrieve returns the provenance dump without an answer") {
    ServerRig rig;
    auto cli = rig.client();
    json req{{"question", "Who designed the Harrow Bridge?"}};
    auto res = cli.Post("/retrieve", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);

    json j = body_of(res);
    CHECK(j["query"] == "Who designed the Harrow Bridge?");
    CHECK(j["seeds"].is_array());
    CHECK(j["trees"].is_array());
    CHECK(j["bundle"].is_array());
    CHECK(j.contains("hops_used"));
    CHECK(j.contains("expanded_chunks"));
    CHECK(j.contains("unlinked_seeds"));
    CHECK(!j.contains("answer"));
    CHECK(!j.contains("prompt"));
}

TEST_CASE("ingest adds documents and skips unchanged ones") {
    ServerRig rig;
    auto cli = rig.client();
    json req{{"documents",
              json::array({{{"doc_id", "new1"},
                            {"title", "Quarry"},
                            {"text", "The quarry at Redstone shipped granite by rail."}}})}};

    auto res = cli.Post("/ingest", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    json j = body_of(res);
    CHECK(j["docs_added"] == 1);
    CHECK(j["docs_skipped"] == 0);
    CHECK(j["chunks_added"].get<std::size_t>() >= 1);
    CHECK(!j.contains("triplets_inserted")); // extraction not requested

    auto health = body_of(cli.Get("/health"));
    CHECK(health["corpus_size"].get<std::size_t>() > rig.w.chunks.size());

    auto again = cli.Post("/ingest", req.dump(), "application/json");
    REQUIRE(again);
    json j2 = body_of(again);
    CHECK(j2["docs_added"] == 0);
    CHECK(j2["docs_skipped"] == 1);

    json with_extract = req;
    with_extract["documents"][0]["text"] = "Granite left Redstone on flat cars every week.";
    with_extract["extract"] = true;
    auto updated = cli.Post("/ingest", with_extract.dump(), "application/json");
    REQUIRE(updated);
    CHECK(updated->status == 200);
    json j3 = body_of(updated);
    CHECK(j3["docs_updated"] == 1);
    CHECK(j3.contains("triplets_inserted"));
    CHECK(j3["failed_chunks"].is_array());
    CHECK(j3["failed_chunks"].empty());
}

TEST_CASE("invalid ingest payloads are rejected") {
    ServerRig rig;
    auto cli = rig.client();

    auto no_docs = cli.Post("/ingest", "{}", "application/json");
    REQUIRE(no_docs);
    CHECK(no_docs->status == 400);

    auto not_array = cli.Post("/ingest", R"({"documents": "x"})", "application/json");
    REQUIRE(not_array);
    CHECK(not_array->status == 400);

    auto missing_text =
        cli.Post("/ingest", R"({"documents": [{"doc_id": "a"}]})", "application/json");
    REQUIRE(missing_text);
    CHECK(missing_text->status == 400);

    auto empty_id =
        cli.Post("/ingest", R"({"documents": [{"doc_id": "", "text": "t"}]})",
                 "application/json");
    REQUIRE(empty_id);
    CHECK(empty_id->status == 400);
}

TEST_CASE("delete removes a document or 404s") {
    ServerRig rig;
    auto cli = rig.client();

    auto missing = cli.Delete("/documents/ghost");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(body_of(missing).contains("error"));

    auto before = body_of(cli.Get("/health"));
    auto removed = cli.Delete("/documents/d20");
    REQUIRE(removed);
    CHECK(removed->status == 200);
    json j = body_of(removed);
    CHECK(j["doc_id"] == "d20");
    CHECK(j["removed_chunks"] == 1);

    auto after = body_of(cli.Get("/health"));
    CHECK(after["corpus_size"].get<std::size_t>() + 1 ==
          before["corpus_size"].get<std::size_t>());

    auto twice = cli.Delete("/documents/d20");
    REQUIRE(twice);
    CHECK(twice->status == 404);
}

TEST_CASE("provider outages surface as 503") {
    const auto& w = fixtures::world();
    auto provider = std::make_shared<MockEmbeddingProvider>(64);
    auto reranker = std::make_shared<EmbeddingReranker>(provider);
    auto healthy = std::make_shared<fixtures::FixtureLlm>(w);
    auto down = std::make_shared<fixtures::FlakyLlm>(*healthy, -1);

    RagEngine engine(ServerRig::make_config(), provider, reranker, down,
                     "2024-05-01T00:00:00Z");
    engine.bootstrap(w.corpus(), w.kg(), build_index(*provider, w.chunks));
    HttpService service(engine);
    REQUIRE(service.start("127.0.0.1", 0));

    httplib::Client cli("127.0.0.1", service.port());
    json req{{"question", "Who founded the Kestrel Valley Railway?"}};
    auto res = cli.Post("/query", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 503);
    CHECK(body_of(res).contains("error"));

    // Retrieval does not touch the llm and keeps working.
    auto ret = cli.Post("/retrieve", req.dump(), "application/json");
    REQUIRE(ret);
    CHECK(ret->status == 200);
    service.stop();
}
