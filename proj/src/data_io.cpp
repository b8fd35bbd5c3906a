#include "detox/data_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "detox/error.hpp"
#include "detox/rng.hpp"

namespace detox {

std::string_view to_string(StyleLabel label) noexcept {
    return label == StyleLabel::toxic ? "toxic" : "neutral";
}

std::optional<StyleLabel> parse_label(std::string_view text) noexcept {
    if (text == "toxic") return StyleLabel::toxic;
    if (text == "neutral") return StyleLabel::neutral;
    return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n\v\f";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tsv(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

// RFC 4180 fields on a single physical line; quoted newlines are not
// supported (rows may not span lines).
std::optional<std::vector<std::string>> split_csv(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else {
            field.push_back(c);
        }
    }
    if (quoted) return std::nullopt;
    out.push_back(std::move(field));
    return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ": line " + std::to_string(line);
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

LabeledCorpus::LabeledCorpus(std::vector<LabeledEntry> entries) {
    entries_.reserve(entries.size());
    for (auto& e : entries) add(std::move(e.text), e.label);
}

void LabeledCorpus::add(std::string text, StyleLabel label) {
    if (trim(text).empty()) throw DataError("corpus entry has empty text");
    if (text.find_first_of("\t\n") != std::string::npos)
        throw DataError("corpus entry contains TAB or newline");
    entries_.push_back({std::move(text), label});
}

std::size_t LabeledCorpus::count(StyleLabel label) const noexcept {
    return static_cast<std::size_t>(std::count_if(
        entries_.begin(), entries_.end(), [&](const auto& e) { return e.label == label; }));
}

std::vector<std::string> LabeledCorpus::texts(StyleLabel label) const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
        if (e.label == label) out.push_back(e.text);
    }
    return out;
}

LabeledCorpus load_labeled_corpus(const std::filesystem::path& path, CorpusFormat format) {
    auto in = open_in(path);
    auto split = [&](std::string_view line, std::size_t lineno) {
        if (format == CorpusFormat::tsv) return split_tsv(line);
        auto fields = split_csv(line);
        if (!fields) throw DataError(where(path, lineno) + ": unterminated quoted field");
        return std::move(*fields);
    };

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing header row");
    ++lineno;
    strip_cr(line);
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto header = split(line, lineno);
    const auto text_col = std::find(header.begin(), header.end(), "text");
    const auto label_col = std::find(header.begin(), header.end(), "label");
    if (text_col == header.end() || label_col == header.end())
        throw DataError(path.string() + ": header must declare `text` and `label` columns");
    const auto ti = static_cast<std::size_t>(text_col - header.begin());
    const auto li = static_cast<std::size_t>(label_col - header.begin());

    LabeledCorpus corpus;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split(line, lineno);
        if (fields.size() != header.size())
            throw DataError(where(path, lineno) + ": expected " + std::to_string(header.size()) +
                            " columns, found " + std::to_string(fields.size()));
        const auto label = parse_label(trim(fields[li]));
        if (!label)
            throw DataError(where(path, lineno) + ": unknown label '" + fields[li] + "'");
        if (trim(fields[ti]).empty()) throw DataError(where(path, lineno) + ": empty text");
        if (fields[ti].find('\t') != std::string::npos)
            throw DataError(where(path, lineno) + ": TAB inside text");
        corpus.add(fields[ti], *label);
    }
    return corpus;
}

void save_labeled_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "text\tlabel\n";
    for (const auto& e : corpus.entries()) out << e.text << '\t' << to_string(e.label) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

ParallelCorpus load_parallel_corpus(const std::filesystem::path& path) {
    auto in = open_in(path);
    ParallelCorpus pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_tsv(line);
        if (fields.size() != 2)
            throw DataError(where(path, lineno) + ": expected 2 columns, found " +
                            std::to_string(fields.size()));
        if (trim(fields[0]).empty() || trim(fields[1]).empty())
            throw DataError(where(path, lineno) + ": empty side in parallel pair");
        pairs.push_back({fields[0], fields[1]});
    }
    return pairs;
}

void save_parallel_corpus(const ParallelCorpus& pairs, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& p : pairs) out << p.source << '\t' << p.target << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<std::string> load_lines(const std::filesystem::path& path, bool skip_blank) {
    auto in = open_in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (skip_blank && trim(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

void save_lines(const std::vector<std::string>& lines, const std::filesystem::path& path) {
    auto out = open_out(path);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

// First k entries of a partial Fisher-Yates shuffle of `pool`.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t k,
                                                    SplitMix64& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.index_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

CorpusSplit partition(const LabeledCorpus& corpus, const std::vector<bool>& in_test) {
    CorpusSplit split;
    std::vector<LabeledEntry> train;
    std::vector<LabeledEntry> test;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        (in_test[i] ? test : train).push_back(corpus.entries()[i]);
    }
    split.train = LabeledCorpus(std::move(train));
    split.test = LabeledCorpus(std::move(test));
    return split;
}

std::vector<std::size_t> indices_of(const LabeledCorpus& corpus, StyleLabel label) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus.entries()[i].label == label) out.push_back(i);
    }
    return out;
}

}  // namespace

CorpusSplit split_corpus(const LabeledCorpus& corpus, const SplitSpec& spec) {
    auto toxic = indices_of(corpus, StyleLabel::toxic);
    if (spec.test_size > toxic.size())
        throw DataError("test_size " + std::to_string(spec.test_size) + " exceeds the " +
                        std::to_string(toxic.size()) + " toxic entries");
    if (spec.test_size >= corpus.size())
        throw DataError("test_size must be smaller than the corpus");
    SplitMix64 rng(spec.seed);
    std::vector<bool> in_test(corpus.size(), false);
    for (auto i : sample_without_replacement(std::move(toxic), spec.test_size, rng))
        in_test[i] = true;
    return partition(corpus, in_test);
}

CorpusSplit stratified_holdout(const LabeledCorpus& corpus, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw DataError("hold-out fraction must lie in (0, 1)");
    SplitMix64 rng(seed);
    std::vector<bool> in_test(corpus.size(), false);
    for (auto label : {StyleLabel::toxic, StyleLabel::neutral}) {
        auto pool = indices_of(corpus, label);
        if (pool.size() < 2) continue;
        auto k = static_cast<std::size_t>(fraction * static_cast<double>(pool.size()));
        k = std::clamp<std::size_t>(k, 1, pool.size() - 1);
        for (auto i : sample_without_replacement(std::move(pool), k, rng)) in_test[i] = true;
    }
    return partition(corpus, in_test);
}

}  // namespace detox
