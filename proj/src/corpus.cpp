#include "kgrag/corpus.hpp"

#include "kgrag/text.hpp"
#include "kgrag/util.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace kgrag {

using nlohmann::json;

std::string chunk_id_for(const std::string& doc_id, int seq) {
    return doc_id + "#" + std::to_string(seq);
}

std::string doc_of_chunk(const std::string& chunk_id) {
    std::size_t pos = chunk_id.rfind('#');
    if (pos == std::string::npos) {
        return chunk_id;
    }
    return chunk_id.substr(0, pos);
}

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminator(char c) {
    return c == '.' || c == '!' || c == '?';
}

// Trailing word of text[..end), including the terminator, casefolded (ASCII).
std::string trailing_word(const std::string& txt, std::size_t end) {
    std::size_t start = end;
    while (start > 0 && !is_space(txt[start - 1])) {
        --start;
    }
    std::string word = txt.substr(start, end - start);
    for (char& c : word) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return word;
}

bool is_guarded_abbreviation(const std::string& word) {
    static const std::set<std::string> guards = {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.",
        "vs.", "etc.", "e.g.", "i.e.", "cf.", "al.", "fig.", "no.",
        "inc.", "ltd.", "co.", "corp.", "u.s.", "u.k.", "a.m.", "p.m.",
    };
    if (guards.count(word) > 0) {
        return true;
    }
    // Single-letter initials like "J." (and chains like "J.K.").
    if (word.size() == 2 && word[1] == '.' && std::isalpha(static_cast<unsigned char>(word[0]))) {
        return true;
    }
    return false;
}

} // namespace

std::vector<std::string> split_into_sentences(const std::string& txt) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t end) {
        std::string s = text::normalize_whitespace(std::string_view(txt).substr(start, end - start));
        if (!s.empty()) {
            sentences.push_back(std::move(s));
        }
        start = end;
    };
    while (i < txt.size()) {
        if (is_terminator(txt[i])) {
            std::size_t run_end = i + 1;
            while (run_end < txt.size() && is_terminator(txt[run_end])) {
                ++run_end;
            }
            bool at_boundary = run_end == txt.size() || is_space(txt[run_end]);
            if (at_boundary) {
                bool guarded = txt[i] == '.' && run_end == i + 1 &&
                               is_guarded_abbreviation(trailing_word(txt, run_end));
                if (!guarded) {
                    flush(run_end);
                }
            }
            i = run_end;
        } else {
            ++i;
        }
    }
    flush(txt.size());
    return sentences;
}

std::vector<Chunk> pack_sentences(const std::string& doc_id,
                                  const std::vector<std::string>& sentences,
                                  const ChunkingConfig& cfg,
                                  std::vector<int>* sentence_to_seq) {
    if (cfg.max_units < 1) {
        throw std::invalid_argument("ChunkingConfig.max_units must be >= 1");
    }
    std::vector<Chunk> chunks;
    std::string current;
    std::size_t current_units = 0;
    if (sentence_to_seq != nullptr) {
        sentence_to_seq->assign(sentences.size(), -1);
    }

    auto flush = [&] {
        if (current.empty()) {
            return;
        }
        int seq = static_cast<int>(chunks.size());
        chunks.push_back(Chunk{chunk_id_for(doc_id, seq), doc_id, seq, current});
        current.clear();
        current_units = 0;
    };

    for (std::size_t si = 0; si < sentences.size(); ++si) {
        const std::string& sentence = sentences[si];
        std::size_t units = text::count_units(sentence);
        if (units == 0) {
            continue;
        }
        if (!current.empty() && current_units + units > static_cast<std::size_t>(cfg.max_units)) {
            flush();
        }
        if (sentence_to_seq != nullptr) {
            (*sentence_to_seq)[si] = static_cast<int>(chunks.size());
        }
        if (!current.empty()) {
            current.push_back(' ');
        }
        current += text::normalize_whitespace(sentence);
        current_units += units;
    }
    flush();
    return chunks;
}

std::vector<Chunk> split_document(const Document& doc, const ChunkingConfig& cfg) {
    return pack_sentences(doc.doc_id, split_into_sentences(doc.text), cfg);
}

namespace {

std::string join_sentences(const std::vector<std::string>& sentences) {
    std::string out;
    for (const auto& s : sentences) {
        std::string t = text::normalize_whitespace(s);
        if (t.empty()) {
            continue;
        }
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

} // namespace

HotpotLoad load_hotpot_corpus(const std::string& path, const ChunkingConfig& cfg) {
    std::string raw = read_file(path);
    json root;
    try {
        root = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw LoadError("JSON parse error in " + path + " at byte " + std::to_string(e.byte) +
                            ": " + e.what(),
                        e.byte);
    }
    if (!root.is_array()) {
        throw LoadError("expected a JSON array of QA records: " + path);
    }

    HotpotLoad out;
    std::unordered_map<std::string, std::size_t> doc_by_title;
    // Per document: sentence index -> chunk id, for supporting-fact resolution.
    std::unordered_map<std::string, std::vector<std::string>> sentence_chunks;

    auto warn = [&](std::size_t record, const std::string& message) {
        out.warnings.push_back("record " + std::to_string(record) + ": " + message);
    };

    for (std::size_t ri = 0; ri < root.size(); ++ri) {
        const json& rec = root[ri];
        if (!rec.is_object() || !rec.contains("question") || !rec.contains("answer") ||
            !rec.contains("context") || !rec["question"].is_string() ||
            !rec["answer"].is_string() || !rec["context"].is_array()) {
            warn(ri, "malformed record skipped");
            continue;
        }

        QaExample ex;
        ex.query_id = rec.value("_id", rec.value("id", "q" + std::to_string(ri)));
        ex.question = rec["question"].get<std::string>();
        ex.gold_answer = rec["answer"].get<std::string>();

        bool context_ok = true;
        std::vector<std::string> titles;
        for (const json& entry : rec["context"]) {
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
                !entry[1].is_array()) {
                warn(ri, "malformed context entry skipped");
                context_ok = false;
                continue;
            }
            std::string title = entry[0].get<std::string>();
            std::vector<std::string> sentences;
            sentences.reserve(entry[1].size());
            for (const json& s : entry[1]) {
                if (s.is_string()) {
                    sentences.push_back(s.get<std::string>());
                }
            }
            titles.push_back(title);

            auto it = doc_by_title.find(title);
            if (it == doc_by_title.end()) {
                Document doc{title, title, join_sentences(sentences)};
                std::vector<int> sentence_seq;
                std::vector<Chunk> chunks = pack_sentences(title, sentences, cfg, &sentence_seq);
                std::vector<std::string> per_sentence(sentences.size());
                for (std::size_t si = 0; si < sentences.size(); ++si) {
                    per_sentence[si] =
                        sentence_seq[si] >= 0 ? chunk_id_for(title, sentence_seq[si]) : "";
                }
                doc_by_title.emplace(title, out.documents.size());
                out.documents.push_back(std::move(doc));
                out.chunks.insert(out.chunks.end(), chunks.begin(), chunks.end());
                sentence_chunks.emplace(title, std::move(per_sentence));
            } else if (out.documents[it->second].text != join_sentences(sentences)) {
                warn(ri, "document '" + title + "' repeated with different text; first kept");
            }
        }
        (void)context_ok;

        std::set<std::string> title_set(titles.begin(), titles.end());
        ex.context_docs.assign(title_set.begin(), title_set.end());

        std::set<std::string> support;
        if (rec.contains("supporting_facts") && rec["supporting_facts"].is_array()) {
            for (const json& sf : rec["supporting_facts"]) {
                if (!sf.is_array() || sf.size() != 2 || !sf[0].is_string() ||
                    !sf[1].is_number_integer()) {
                    warn(ri, "malformed supporting fact dropped");
                    continue;
                }
                std::string title = sf[0].get<std::string>();
                long idx = sf[1].get<long>();
                auto it = sentence_chunks.find(title);
                if (it == sentence_chunks.end() || title_set.count(title) == 0) {
                    warn(ri, "supporting fact names absent title '" + title + "'; dropped");
                    continue;
                }
                if (idx < 0 || static_cast<std::size_t>(idx) >= it->second.size() ||
                    it->second[static_cast<std::size_t>(idx)].empty()) {
                    warn(ri, "supporting fact sentence index " + std::to_string(idx) +
                                 " out of range for '" + title + "'; dropped");
                    continue;
                }
                support.insert(it->second[static_cast<std::size_t>(idx)]);
            }
        }
        ex.gold_support.assign(support.begin(), support.end());
        out.examples.push_back(std::move(ex));
    }
    return out;
}

void save_chunks_jsonl(const std::string& path, const std::vector<Chunk>& chunks) {
    std::ostringstream buf;
    for (const Chunk& c : chunks) {
        json line = {{"chunk_id", c.chunk_id}, {"doc_id", c.doc_id}, {"seq", c.seq}, {"text", c.text}};
        buf << line.dump() << '\n';
    }
    write_file(path, buf.str());
}

std::vector<Chunk> load_chunks_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open chunk file: " + path);
    }
    std::vector<Chunk> chunks;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw LoadError("bad chunk JSONL at " + path + ":" + std::to_string(lineno) + ": " +
                            e.what());
        }
        Chunk c;
        c.chunk_id = j.at("chunk_id").get<std::string>();
        c.doc_id = j.at("doc_id").get<std::string>();
        c.seq = j.at("seq").get<int>();
        c.text = j.at("text").get<std::string>();
        chunks.push_back(std::move(c));
    }
    return chunks;
}


void save_documents_jsonl(const std::string& path, const std::vector<Document>& docs) {
    std::ostringstream buf;
    for (const Document& d : docs) {
        json line = {{"doc_id", d.doc_id}, {"title", d.title}, {"text", d.text}};
        buf << line.dump() << '\n';
    }
    write_file(path, buf.str());
}

std::vector<Document> load_documents_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw LoadError("cannot open document file: " + path);
    }
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw LoadError("bad document JSONL at " + path + ":" + std::to_string(lineno) +
                            ": " + e.what());
        }
        Document d;
        d.doc_id = j.at("doc_id").get<std::string>();
        d.title = j.value("title", d.doc_id);
        d.text = j.at("text").get<std::string>();
        docs.push_back(std::move(d));
    }
    return docs;
}

} // namespace kgrag
