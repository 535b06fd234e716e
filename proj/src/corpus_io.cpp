#include "pgt/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pgt/text.hpp"

namespace pgt {

void Corpus::add(std::string doc_id, std::string text) {
    if (doc_id.empty()) throw std::invalid_argument("empty doc_id");
    if (index_.count(doc_id)) throw std::invalid_argument("duplicate doc_id '" + doc_id + "'");
    total_tokens_ += split_words(text).size();
    index_.emplace(doc_id, ids_.size());
    ids_.push_back(std::move(doc_id));
    texts_.push_back(std::move(text));
}

std::size_t Corpus::position(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    if (it == index_.end()) throw std::out_of_range("unknown doc_id '" + doc_id + "'");
    return it->second;
}

double Corpus::avg_doc_length() const {
    return ids_.empty() ? 0.0 : static_cast<double>(total_tokens_) / static_cast<double>(ids_.size());
}

void Qrels::set(const std::string& query_id, const std::string& doc_id, int grade) {
    if (grade < 0 || grade > kMaxGrade) {
        throw std::invalid_argument("grade " + std::to_string(grade) + " outside [0, 3] for (" + query_id +
                                    ", " + doc_id + ")");
    }
    grades_[query_id][doc_id] = grade;
}

std::optional<int> Qrels::grade(const std::string& query_id, const std::string& doc_id) const {
    auto q = grades_.find(query_id);
    if (q == grades_.end()) return std::nullopt;
    auto d = q->second.find(doc_id);
    if (d == q->second.end()) return std::nullopt;
    return d->second;
}

const std::map<std::string, int>& Qrels::judgments(const std::string& query_id) const {
    static const std::map<std::string, int> none;
    auto q = grades_.find(query_id);
    return q == grades_.end() ? none : q->second;
}

std::size_t Qrels::relevant_count(const std::string& query_id, int threshold) const {
    const auto& j = judgments(query_id);
    return static_cast<std::size_t>(
        std::count_if(j.begin(), j.end(), [&](const auto& kv) { return kv.second >= threshold; }));
}

const std::vector<RunEntry>& RunList::ranking(const std::string& query_id) const {
    static const std::vector<RunEntry> none;
    auto it = queries.find(query_id);
    return it == queries.end() ? none : it->second;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> fields;
    std::string f;
    while (in >> f) fields.push_back(f);
    return fields;
}

// Splits "id<TAB>text" at the first tab.
std::pair<std::string, std::string> split_tab(const std::string& line, const std::string& source,
                                              std::size_t lineno) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, lineno, "expected id<TAB>text");
    auto id = line.substr(0, tab);
    if (id.empty()) throw ParseError(source, lineno, "empty id");
    return {id, line.substr(tab + 1)};
}

template <typename Num>
Num parse_number(const std::string& field, const std::string& source, std::size_t lineno,
                 const char* what) {
    Num value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(source, lineno, std::string("bad ") + what + " '" + field + "'");
    }
    return value;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

Corpus read_tsv_corpus(std::istream& in, const std::string& source) {
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto [id, text] = split_tab(line, source, lineno);
        if (corpus.contains(id)) throw ParseError(source, lineno, "duplicate doc_id '" + id + "'");
        corpus.add(std::move(id), std::move(text));
    }
    return corpus;
}

QueryMap read_tsv_queries(std::istream& in, const std::string& source) {
    QueryMap queries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        auto [id, text] = split_tab(line, source, lineno);
        if (!queries.emplace(id, text).second) {
            throw ParseError(source, lineno, "duplicate query_id '" + id + "'");
        }
    }
    return queries;
}

Qrels read_trec_qrels(std::istream& in, const std::string& source) {
    Qrels qrels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = split_fields(line);
        if (f.empty()) continue;
        if (f.size() != 4) throw ParseError(source, lineno, "expected 4 fields: query_id 0 doc_id grade");
        int grade = parse_number<int>(f[3], source, lineno, "grade");
        if (grade < 0 || grade > Qrels::kMaxGrade) {
            throw ParseError(source, lineno, "grade " + f[3] + " outside [0, 3]");
        }
        qrels.set(f[0], f[2], grade);
    }
    return qrels;
}

RunList read_trec_run(std::istream& in, const std::string& source) {
    struct Ranked {
        long rank;
        RunEntry entry;
    };
    std::map<std::string, std::vector<Ranked>> staged;
    RunList run;
    bool tag_seen = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = split_fields(line);
        if (f.empty()) continue;
        if (f.size() != 6) {
            throw ParseError(source, lineno, "expected 6 fields: query_id Q0 doc_id rank score tag");
        }
        long rank = parse_number<long>(f[3], source, lineno, "rank");
        if (rank < 1) throw ParseError(source, lineno, "rank must be >= 1");
        double score = parse_number<double>(f[4], source, lineno, "score");
        if (!tag_seen) {
            run.tag = f[5];
            tag_seen = true;
        }
        staged[f[0]].push_back({rank, {f[2], score}});
    }
    for (auto& [qid, entries] : staged) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Ranked& a, const Ranked& b) { return a.rank < b.rank; });
        auto& out = run.queries[qid];
        for (auto& e : entries) out.push_back(std::move(e.entry));
    }
    return run;
}

Corpus load_tsv_corpus(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_tsv_corpus(in, path.string());
}

QueryMap load_tsv_queries(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_tsv_queries(in, path.string());
}

Qrels load_trec_qrels(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_trec_qrels(in, path.string());
}

RunList load_trec_run(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_trec_run(in, path.string());
}

std::string format_score(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_tsv_corpus(std::ostream& out, const Corpus& corpus) {
    for (std::size_t i = 0; i < corpus.size(); ++i) out << corpus.id_at(i) << '\t' << corpus.text_at(i) << '\n';
}

void write_tsv_queries(std::ostream& out, const QueryMap& queries) {
    for (const auto& [id, text] : queries) out << id << '\t' << text << '\n';
}

void write_trec_qrels(std::ostream& out, const Qrels& qrels) {
    for (const auto& [qid, docs] : qrels.all())
        for (const auto& [doc, grade] : docs) out << qid << " 0 " << doc << ' ' << grade << '\n';
}

void write_trec_run(std::ostream& out, const RunList& run) {
    for (const auto& [qid, entries] : run.queries) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            out << qid << " Q0 " << entries[i].doc_id << ' ' << (i + 1) << ' ' << format_score(entries[i].score)
                << ' ' << run.tag << '\n';
        }
    }
}

void save_tsv_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    auto out = open_out(path);
    write_tsv_corpus(out, corpus);
}

void save_tsv_queries(const std::filesystem::path& path, const QueryMap& queries) {
    auto out = open_out(path);
    write_tsv_queries(out, queries);
}

void save_trec_qrels(const std::filesystem::path& path, const Qrels& qrels) {
    auto out = open_out(path);
    write_trec_qrels(out, qrels);
}

void save_trec_run(const std::filesystem::path& path, const RunList& run) {
    auto out = open_out(path);
    write_trec_run(out, run);
}

}  // namespace pgt
