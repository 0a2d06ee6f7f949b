#include "kgrag/eval.hpp"

#include "kgrag/text.hpp"
#include "kgrag/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace kgrag {

using nlohmann::json;

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

Metrics metrics_from_pr(double precision, double recall) {
    Metrics m;
    m.precision = precision;
    m.recall = recall;
    if (precision + recall > 0.0) m.f1 = 2.0 * precision * recall / (precision + recall);
    return m;
}

Metrics answer_metrics(const std::string& prediction, const std::string& gold) {
    auto pred = text::answer_tokens(prediction);
    auto gd = text::answer_tokens(gold);
    if (pred.empty() && gd.empty()) return {1.0, 1.0, 1.0};
    if (pred.empty() || gd.empty()) return {};

    std::map<std::string, std::size_t> gold_counts;
    for (const auto& t : gd) ++gold_counts[t];
    std::size_t overlap = 0;
    for (const auto& t : pred) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return metrics_from_pr(static_cast<double>(overlap) / pred.size(),
                           static_cast<double>(overlap) / gd.size());
}

Metrics retrieval_metrics(const std::set<std::string>& retrieved,
                          const std::set<std::string>& gold) {
    std::size_t overlap = 0;
    for (const auto& id : retrieved) overlap += gold.count(id);
    double p = retrieved.empty() ? 0.0 : static_cast<double>(overlap) / retrieved.size();
    double r = gold.empty() ? 1.0 : static_cast<double>(overlap) / gold.size();
    return metrics_from_pr(p, r);
}

// ---------------------------------------------------------------------------
// entity shuffling
// ---------------------------------------------------------------------------

namespace {

// splitmix64; stable across platforms, unlike <random> distributions.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

private:
    std::uint64_t state_;
};

// Fisher-Yates, then fixed points pushed onto their right neighbor. For
// n >= 2 the result has no fixed points.
std::vector<std::size_t> derangement(std::size_t n, SeededRng& rng) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] == i) std::swap(p[i], p[(i + 1) % n]);
    }
    return p;
}

bool word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

// One left-to-right pass, longest candidate wins at each position, matches
// must sit on word boundaries. Replacements are emitted, not re-scanned.
std::string replace_all(const std::string& input,
                        const std::vector<std::pair<std::string, std::string>>& rules) {
    std::string out;
    out.reserve(input.size());
    std::size_t i = 0;
    while (i < input.size()) {
        const std::pair<std::string, std::string>* hit = nullptr;
        for (const auto& rule : rules) {
            const std::string& key = rule.first;
            if (key.empty() || i + key.size() > input.size()) continue;
            if (input.compare(i, key.size(), key) != 0) continue;
            bool left_ok = i == 0 || !word_byte(input[i - 1]) || !word_byte(key.front());
            std::size_t end = i + key.size();
            bool right_ok = end == input.size() || !word_byte(input[end]) || !word_byte(key.back());
            if (left_ok && right_ok) {
                hit = &rule;
                break;
            }
        }
        if (hit) {
            out += hit->second;
            i += hit->first.size();
        } else {
            out += input[i++];
        }
    }
    return out;
}

} // namespace

ShuffledData shuffle_entities(std::span<const Document> documents,
                              std::span<const Chunk> chunks,
                              std::span<const Triplet> triplets,
                              std::span<const QaExample> examples,
                              const std::map<std::string, std::string>& category_map,
                              std::uint64_t seed) {
    ShuffledData out;

    // Members per category, sorted for a seed-stable draw.
    std::map<std::string, std::vector<std::string>> categories;
    for (const auto& [entity, category] : category_map) categories[category].push_back(entity);

    SeededRng rng(seed);
    for (auto& [category, members] : categories) {
        std::sort(members.begin(), members.end());
        if (members.size() < 2) {
            out.singleton_categories.push_back(category);
            continue;
        }
        auto perm = derangement(members.size(), rng);
        for (std::size_t i = 0; i < members.size(); ++i) {
            out.mapping[members[i]] = members[perm[i]];
        }
    }

    // Longest key first so nested names ("New York City" vs "New York")
    // resolve to the widest mention.
    std::vector<std::pair<std::string, std::string>> rules(out.mapping.begin(),
                                                           out.mapping.end());
    std::stable_sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
        return a.first < b.first;
    });

    auto rewrite = [&rules](const std::string& s) { return replace_all(s, rules); };

    out.documents.reserve(documents.size());
    for (const auto& d : documents) {
        out.documents.push_back({d.doc_id, rewrite(d.title), rewrite(d.text)});
    }
    out.chunks.reserve(chunks.size());
    for (const auto& c : chunks) {
        out.chunks.push_back({c.chunk_id, c.doc_id, c.seq, rewrite(c.text)});
    }
    out.triplets.reserve(triplets.size());
    for (const auto& t : triplets) {
        out.triplets.push_back({rewrite(t.head), t.relation, rewrite(t.tail), t.source_chunk});
    }
    out.examples.reserve(examples.size());
    for (const auto& e : examples) {
        QaExample shuffled = e;
        shuffled.question = rewrite(e.question);
        shuffled.gold_answer = rewrite(e.gold_answer);
        out.examples.push_back(std::move(shuffled));
    }
    return out;
}

std::map<std::string, std::string> load_category_map(const std::string& path) {
    std::map<std::string, std::string> out;
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw LoadError(std::string("bad category line: ") + e.what(),
                                offset + e.byte - 1);
            }
            if (!j.contains("entity") || !j.contains("category") || !j["entity"].is_string() ||
                !j["category"].is_string()) {
                throw LoadError("category line missing entity/category", offset);
            }
            out[j["entity"]] = j["category"];
        }
        offset += line.size() + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// dataset evaluation
// ---------------------------------------------------------------------------

EvalReport run_eval(const CorpusStore& corpus, const AssociationKG& kg,
                    const VectorIndex& index, std::span<const QaExample> examples,
                    EmbeddingProvider& provider, Reranker& reranker, LlmClient& llm,
                    const EvalConfig& config) {
    config.pipeline.validate();

    EvalReport report;
    report.config = config;
    report.outcomes.resize(examples.size());

    parallel_for(examples.size(), config.parallelism, [&](std::size_t i) {
        const QaExample& ex = examples[i];
        ExampleOutcome& outcome = report.outcomes[i];
        outcome.query_id = ex.query_id;
        try {
            QueryResult q;
            if (config.setting == EvalSetting::Distractor && !ex.context_docs.empty()) {
                std::set<std::string> doc_ids(ex.context_docs.begin(), ex.context_docs.end());
                auto allowed = corpus.chunk_ids_of_docs(doc_ids);
                AssociationKG local = restrict_to_chunks(kg, allowed);
                q = run_query(ex.question, config.pipeline, corpus, local, index, provider,
                              reranker, llm, &allowed);
            } else {
                q = run_query(ex.question, config.pipeline, corpus, kg, index, provider,
                              reranker, llm);
            }
            std::set<std::string> retrieved;
            for (const auto& e : q.retrieval.bundle.entries) retrieved.insert(e.chunk_id);
            std::set<std::string> gold(ex.gold_support.begin(), ex.gold_support.end());

            outcome.predicted = q.answer.text;
            outcome.answer = answer_metrics(q.answer.text, ex.gold_answer);
            outcome.retrieval = retrieval_metrics(retrieved, gold);
            outcome.retrieved_count = q.retrieval.bundle.entries.size();
        } catch (const std::exception& e) {
            outcome.failed = true;
            outcome.error = e.what();
        }
    });

    // Serial aggregation in dataset order.
    double ap = 0, ar = 0, af = 0, rp = 0, rr = 0, rf = 0, chunks = 0;
    for (const auto& o : report.outcomes) {
        if (o.failed) {
            ++report.failed;
            continue;
        }
        ++report.evaluated;
        ap += o.answer.precision;
        ar += o.answer.recall;
        af += o.answer.f1;
        rp += o.retrieval.precision;
        rr += o.retrieval.recall;
        rf += o.retrieval.f1;
        chunks += static_cast<double>(o.retrieved_count);
    }
    if (report.evaluated > 0) {
        double n = static_cast<double>(report.evaluated);
        report.answer_mean = {ap / n, ar / n, af / n};
        report.retrieval_mean = {rp / n, rr / n, rf / n};
        report.avg_retrieved = chunks / n;
    }
    return report;
}

namespace {

json metrics_json(const Metrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

} // namespace

json EvalReport::to_json() const {
    json per = json::array();
    for (const auto& o : outcomes) {
        json row{{"query_id", o.query_id}, {"failed", o.failed}};
        if (o.failed) {
            row["error"] = o.error;
        } else {
            row["predicted"] = o.predicted;
            row["answer"] = metrics_json(o.answer);
            row["retrieval"] = metrics_json(o.retrieval);
            row["retrieved_count"] = o.retrieved_count;
        }
        per.push_back(std::move(row));
    }
    return json{
        {"config",
         {{"seed_k", config.pipeline.seed_k},
          {"budget_k", config.pipeline.budget_k},
          {"hops", config.pipeline.hops},
          {"keep_unlinked_seeds", config.pipeline.keep_unlinked_seeds},
          {"expansion", config.pipeline.expansion},
          {"organization", config.pipeline.organization},
          {"setting", config.setting == EvalSetting::Distractor ? "distractor" : "fullwiki"}}},
        {"evaluated", evaluated},
        {"failed", failed},
        {"answer", metrics_json(answer_mean)},
        {"retrieval", metrics_json(retrieval_mean)},
        {"avg_retrieved", avg_retrieved},
        {"examples", per}};
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    char buf[160];
    out << "query_id                          ans_f1  ret_f1  chunks  status\n";
    for (const auto& o : outcomes) {
        if (o.failed) {
            std::snprintf(buf, sizeof buf, "%-32s %7s %7s %7s  failed: %s\n",
                          o.query_id.c_str(), "-", "-", "-", o.error.c_str());
        } else {
            std::snprintf(buf, sizeof buf, "%-32s %7.4f %7.4f %7zu  ok\n", o.query_id.c_str(),
                          o.answer.f1, o.retrieval.f1, o.retrieved_count);
        }
        out << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "mean over %zu ok (%zu failed): answer P %.4f R %.4f F1 %.4f | retrieval P "
                  "%.4f R %.4f F1 %.4f | avg chunks %.2f\n",
                  evaluated, failed, answer_mean.precision, answer_mean.recall, answer_mean.f1,
                  retrieval_mean.precision, retrieval_mean.recall, retrieval_mean.f1,
                  avg_retrieved);
    out << buf;
    return out.str();
}

} // namespace kgrag
