// Shared test corpus: a small fictional railway world with a hub entity
// (the railway itself) dense enough that one hop of expansion fans out well
// past any reasonable budget, plus QA examples, pre-extracted triplets, a
// category map for shuffling, and a scripted LLM covering both the
// extraction and answering prompt shapes.
#pragma once

#include "kgrag/engine.hpp"
#include "kgrag/kg.hpp"
#include "kgrag/pipeline.hpp"
#include "kgrag/prompts.hpp"
#include "kgrag/util.hpp"

#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using namespace kgrag;

struct World {
    std::vector<Document> documents;
    std::vector<Chunk> chunks; // document order
    std::vector<Triplet> triplets;
    std::vector<QaExample> examples;
    std::map<std::string, std::string> categories; // entity -> category
    std::map<std::string, std::string> answers;    // question -> scripted answer

    std::vector<PreparedDoc> prepared() const {
        std::map<std::string, PreparedDoc> by_doc;
        for (const auto& d : documents) by_doc[d.doc_id].doc = d;
        for (const auto& c : chunks) by_doc[c.doc_id].chunks.push_back(c);
        std::vector<PreparedDoc> out;
        for (auto& [id, pd] : by_doc) out.push_back(std::move(pd));
        return out;
    }

    CorpusStore corpus() const {
        CorpusStore store;
        for (const auto& pd : prepared()) store.add_document(pd.doc, pd.chunks);
        return store;
    }

    AssociationKG kg(std::string created_at = "2024-05-01T00:00:00Z") const {
        AssociationKG out(std::move(created_at));
        out.register_chunks(chunks);
        out.insert_triplets(triplets);
        return out;
    }

    VectorIndex index(EmbeddingProvider& provider) const {
        return build_index(provider, chunks);
    }
};

namespace detail {

inline void add_doc(World& w, const std::string& doc_id, const std::string& title,
                    const std::vector<std::string>& chunk_texts) {
    std::string text;
    for (const auto& t : chunk_texts) {
        if (!text.empty()) text += ' ';
        text += t;
    }
    w.documents.push_back({doc_id, title, text});
    for (std::size_t i = 0; i < chunk_texts.size(); ++i) {
        int seq = static_cast<int>(i);
        w.chunks.push_back({chunk_id_for(doc_id, seq), doc_id, seq, chunk_texts[i]});
    }
}

inline void add_triplet(World& w, const std::string& h, const std::string& r,
                        const std::string& t, const std::string& chunk) {
    w.triplets.push_back({h, r, t, chunk});
}

inline void add_example(World& w, const std::string& id, const std::string& question,
                        const std::string& answer, std::vector<std::string> support,
                        std::vector<std::string> context_docs) {
    QaExample ex;
    ex.query_id = id;
    ex.question = question;
    ex.gold_answer = answer;
    std::sort(support.begin(), support.end());
    ex.gold_support = std::move(support);
    std::sort(context_docs.begin(), context_docs.end());
    ex.context_docs = std::move(context_docs);
    w.examples.push_back(std::move(ex));
    w.answers[question] = answer;
}

inline World build_world() {
    World w;

    add_doc(w, "d01", "Kestrel Valley Railway",
            {"The Kestrel Valley Railway opened in 1891 and linked the upland mining towns "
             "to the western coast.",
             "Its head office stood in Aldersgate beside the grain exchange, and its "
             "locomotives burned Dunmore coal."});
    add_doc(w, "d02", "Mara Ellison",
            {"Mara Ellison founded the Kestrel Valley Railway after surveying the upland "
             "passes on foot.",
             "Ellison was born in Brinmouth and kept a cottage above the harbour all her "
             "life."});
    add_doc(w, "d03", "Tomas Reyes",
            {"Tomas Reyes served as chief engineer of the Kestrel Valley Railway and "
             "designed the Harrow Bridge."});
    add_doc(w, "d04", "Harrow Bridge",
            {"The Harrow Bridge carries the main line across the gorge above Carver Falls "
             "on a double truss."});
    add_doc(w, "d05", "Aldersgate",
            {"Aldersgate is a market town famous for its grain exchange and its iron clock "
             "tower."});
    add_doc(w, "d06", "Brinmouth",
            {"Brinmouth is a fishing port on the western coast with a deep stone harbour."});
    add_doc(w, "d07", "Brinmouth Museum",
            {"The Brinmouth Museum, on the harbour road in Brinmouth, keeps the original "
             "survey maps of the upland passes."});
    add_doc(w, "d08", "Dunmore",
            {"Dunmore is a colliery town in the eastern hills where the coal seams run "
             "shallow."});
    add_doc(w, "d09", "Dunmore coal",
            {"Dunmore coal, cut from the shallow seams around Dunmore, burns hot and "
             "clean."});
    add_doc(w, "d10", "Ivy Chen",
            {"Ivy Chen is the curator of the Brinmouth Museum and catalogued the survey "
             "maps herself."});
    add_doc(w, "d11", "Rolf Anders",
            {"Rolf Anders was mayor of Aldersgate and pushed the town council to fund the "
             "eastern spur."});
    add_doc(w, "d12", "Eastern spur",
            {"The eastern spur of the Kestrel Valley Railway reached Dunmore in 1902 after "
             "two years of cutting."});
    add_doc(w, "d13", "Carver Falls",
            {"Carver Falls is a waterfall village whose mill wheels once ground flour for "
             "the whole valley."});
    add_doc(w, "d14", "Miners Guild",
            {"The Miners Guild hall in Dunmore hosted the wage talks of 1899 that kept the "
             "pits open."});
    add_doc(w, "d15", "Signal Works",
            {"The Signal Works at Aldersgate supplied semaphore arms to the Kestrel Valley "
             "Railway."});
    add_doc(w, "d16", "Petrel",
            {"The first locomotive of the Kestrel Valley Railway was named Petrel and "
             "pulled the opening train in 1891."});
    add_doc(w, "d17", "Harbour line",
            {"The harbour line of the Kestrel Valley Railway dropped to the Brinmouth quays "
             "so fish vans could reach the morning markets."});
    add_doc(w, "d18", "Flood of 1907",
            {"The flood of 1907 washed out three miles of the Kestrel Valley Railway below "
             "Carver Falls and closed it for a season."});
    add_doc(w, "d19", "Grain exchange",
            {"The grain exchange at Aldersgate set barley prices for every farm between the "
             "hills and the coast."});
    add_doc(w, "d20", "Valley weather",
            {"Weather in the valley swings hard between seasons, with fog banks rolling up "
             "from the sea on most autumn mornings."});

    add_triplet(w, "Kestrel Valley Railway", "opened in", "1891", "d01#0");
    add_triplet(w, "Kestrel Valley Railway", "linked", "upland mining towns", "d01#0");
    add_triplet(w, "Kestrel Valley Railway", "head office in", "Aldersgate", "d01#1");
    add_triplet(w, "Kestrel Valley Railway", "burned", "Dunmore coal", "d01#1");
    add_triplet(w, "Mara Ellison", "founded", "Kestrel Valley Railway", "d02#0");
    add_triplet(w, "Mara Ellison", "born in", "Brinmouth", "d02#1");
    add_triplet(w, "Tomas Reyes", "chief engineer of", "Kestrel Valley Railway", "d03#0");
    add_triplet(w, "Tomas Reyes", "designed", "Harrow Bridge", "d03#0");
    add_triplet(w, "Harrow Bridge", "stands above", "Carver Falls", "d04#0");
    add_triplet(w, "Harrow Bridge", "built as", "double truss", "d04#0");
    add_triplet(w, "Aldersgate", "famous for", "grain exchange", "d05#0");
    add_triplet(w, "Aldersgate", "has", "iron clock tower", "d05#0");
    add_triplet(w, "Brinmouth", "is", "fishing port", "d06#0");
    add_triplet(w, "Brinmouth", "has", "stone harbour", "d06#0");
    add_triplet(w, "Brinmouth Museum", "located in", "Brinmouth", "d07#0");
    add_triplet(w, "Brinmouth Museum", "keeps", "survey maps", "d07#0");
    add_triplet(w, "Dunmore", "is", "colliery town", "d08#0");
    add_triplet(w, "Dunmore coal", "cut around", "Dunmore", "d09#0");
    add_triplet(w, "Ivy Chen", "curator of", "Brinmouth Museum", "d10#0");
    add_triplet(w, "Ivy Chen", "catalogued", "survey maps", "d10#0");
    add_triplet(w, "Rolf Anders", "mayor of", "Aldersgate", "d11#0");
    add_triplet(w, "Rolf Anders", "funded", "eastern spur", "d11#0");
    add_triplet(w, "eastern spur", "part of", "Kestrel Valley Railway", "d12#0");
    add_triplet(w, "eastern spur", "reached", "Dunmore", "d12#0");
    add_triplet(w, "eastern spur", "completed in", "1902", "d12#0");
    add_triplet(w, "Carver Falls", "is", "waterfall village", "d13#0");
    add_triplet(w, "Miners Guild", "hall in", "Dunmore", "d14#0");
    add_triplet(w, "Miners Guild", "hosted", "wage talks of 1899", "d14#0");
    add_triplet(w, "Signal Works", "located in", "Aldersgate", "d15#0");
    add_triplet(w, "Signal Works", "supplied", "Kestrel Valley Railway", "d15#0");
    add_triplet(w, "Petrel", "first locomotive of", "Kestrel Valley Railway", "d16#0");
    add_triplet(w, "Petrel", "pulled", "opening train", "d16#0");
    add_triplet(w, "harbour line", "part of", "Kestrel Valley Railway", "d17#0");
    add_triplet(w, "harbour line", "reached", "Brinmouth", "d17#0");
    add_triplet(w, "flood of 1907", "washed out", "Kestrel Valley Railway", "d18#0");
    add_triplet(w, "flood of 1907", "struck below", "Carver Falls", "d18#0");
    add_triplet(w, "grain exchange", "located in", "Aldersgate", "d19#0");
    // d20 deliberately yields nothing: its chunk can only enter a context as
    // an unlinked seed.

    add_example(w, "q01", "Who founded the Kestrel Valley Railway?", "Mara Ellison",
                {"d02#0"}, {"d02", "d01", "d05", "d13"});
    add_example(w, "q02", "In which town was Mara Ellison born?", "Brinmouth", {"d02#1"},
                {"d02", "d06", "d08", "d19"});
    add_example(w, "q03", "Who designed the Harrow Bridge?", "Tomas Reyes", {"d03#0"},
                {"d03", "d04", "d13", "d05"});
    add_example(w, "q04", "In what year did the eastern spur reach Dunmore?", "1902",
                {"d12#0"}, {"d12", "d08", "d14", "d09"});
    add_example(w, "q05", "Who is the curator of the Brinmouth Museum?", "Ivy Chen",
                {"d10#0"}, {"d10", "d07", "d06", "d17"});
    add_example(w, "q06",
                "In which town is the head office of the railway that Mara Ellison founded?",
                "Aldersgate", {"d02#0", "d01#1"}, {"d02", "d01", "d05", "d11", "d19"});
    add_example(w, "q07",
                "What was the first locomotive of the railway whose chief engineer was "
                "Tomas Reyes?",
                "Petrel", {"d03#0", "d16#0"}, {"d03", "d16", "d04", "d13"});
    add_example(w, "q08", "Which guild hosted the wage talks of 1899?", "the Miners Guild",
                {"d14#0"}, {"d14", "d08", "d12"});

    w.categories = {{"Aldersgate", "town"},
                    {"Brinmouth", "town"},
                    {"Carver Falls", "town"},
                    {"Dunmore", "town"},
                    {"Mara Ellison", "person"},
                    {"Tomas Reyes", "person"},
                    {"Ivy Chen", "person"},
                    {"Rolf Anders", "person"}};
    return w;
}

} // namespace detail

inline const World& world() {
    static const World w = detail::build_world();
    return w;
}

// ---------------------------------------------------------------------------
// scripted llm
// ---------------------------------------------------------------------------

// Handles both prompt shapes the pipeline produces. An extraction prompt is
// answered with the fixture triplets of the quoted chunk text as JSONL; an
// answering prompt is matched on the exact question line. Unknown inputs
// fall back to a fixed string so runs stay deterministic.
class FixtureLlm : public LlmClient {
public:
    explicit FixtureLlm(const World& w, std::string fallback = "no idea")
        : fallback_(std::move(fallback)) {
        std::map<std::string, std::string> text_of; // chunk id -> text
        for (const auto& c : w.chunks) text_of[c.chunk_id] = c.text;
        for (const auto& t : w.triplets) {
            nlohmann::json line{{"head", t.head}, {"relation", t.relation}, {"tail", t.tail}};
            std::string& buf = extraction_[text_of.at(t.source_chunk)];
            buf += line.dump();
            buf += '\n';
        }
        for (const auto& c : w.chunks) extraction_.try_emplace(c.text, "");
        answers_ = w.answers;
    }

    std::string complete(const std::vector<ChatMessage>& messages) override {
        ++calls_;
        const std::string& user = messages.back().content;

        const std::string extract_prefix = prompts::kTripletExtractionUserPrefixV1;
        if (user.rfind(extract_prefix, 0) == 0) {
            auto payload = nlohmann::json::parse(user.substr(extract_prefix.size()));
            auto it = extraction_.find(payload.at("text").get<std::string>());
            return it != extraction_.end() ? it->second : "";
        }

        const std::string question_header = prompts::kAnswerQuestionHeaderV1;
        std::size_t pos = user.rfind(question_header);
        if (pos != std::string::npos) {
            std::string question = user.substr(pos + question_header.size());
            auto it = answers_.find(question);
            if (it != answers_.end()) return it->second;
        }
        return fallback_;
    }

    std::string model_name() const override { return "fixture-llm"; }
    std::size_t calls() const { return calls_.load(); }

private:
    std::map<std::string, std::string> extraction_; // chunk text -> JSONL
    std::map<std::string, std::string> answers_;
    std::string fallback_;
    std::atomic<std::size_t> calls_{0}; // complete() runs on worker threads
};

// Throws for the first `failures` calls, then delegates. failures < 0 means
// always throw.
class FlakyLlm : public LlmClient {
public:
    FlakyLlm(LlmClient& inner, int failures) : inner_(inner), failures_(failures) {}

    std::string complete(const std::vector<ChatMessage>& messages) override {
        std::size_t n = ++calls_;
        if (failures_ < 0 || n <= static_cast<std::size_t>(failures_)) {
            throw ProviderError("connection reset");
        }
        return inner_.complete(messages);
    }
    std::string model_name() const override { return inner_.model_name(); }
    std::size_t calls() const { return calls_.load(); }

private:
    LlmClient& inner_;
    int failures_;
    std::atomic<std::size_t> calls_{0};
};

class ThrowingReranker : public Reranker {
public:
    std::vector<double> score(const std::string&, std::span<const std::string>) override {
        throw ProviderError("reranker down");
    }
    std::string name() const override { return "throwing-reranker"; }
};

// ---------------------------------------------------------------------------
// temp dirs
// ---------------------------------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("kgrag_" + tag + "_" + std::to_string(rd()) + "_" +
                        std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace fixtures
