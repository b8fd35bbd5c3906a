#include "detox/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "detox/error.hpp"

namespace detox {

namespace {

double parse_component(std::string_view text, const std::string& ctx) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DataError(ctx + ": non-numeric component '" + std::string(text) + "'");
    if (!std::isfinite(value)) throw DataError(ctx + ": non-finite component");
    return value;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

bool EmbeddingTable::set(std::string word, std::span<const double> vec) {
    if (vec.size() != dim_)
        throw DataError("embedding for '" + word + "' has " + std::to_string(vec.size()) +
                        " components, expected " + std::to_string(dim_));
    if (auto it = index_.find(word); it != index_.end()) {
        std::copy(vec.begin(), vec.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
        return false;
    }
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    data_.insert(data_.end(), vec.begin(), vec.end());
    return true;
}

std::optional<std::span<const double>> EmbeddingTable::find(std::string_view word) const {
    const auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return std::span<const double>(data_).subspan(it->second * dim_, dim_);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
    const auto header = split_spaces(line);
    std::size_t declared = 0;
    std::size_t dim = 0;
    auto parse_count = [&](std::string_view s, std::size_t& out) {
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    };
    if (header.size() != 2 || !parse_count(header[0], declared) || !parse_count(header[1], dim) ||
        dim == 0)
        throw DataError(path.string() + ": line 1 must be `vocab_size dim`");

    EmbeddingTable table(dim);
    std::vector<double> vec(dim);
    std::size_t rows = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = path.string() + ": line " + std::to_string(lineno);
        const auto fields = split_spaces(line);
        if (fields.size() != dim + 1)
            throw DataError(ctx + ": expected " + std::to_string(dim + 1) + " fields, found " +
                            std::to_string(fields.size()));
        for (std::size_t k = 0; k < dim; ++k) vec[k] = parse_component(fields[k + 1], ctx);
        std::string word(fields[0]);
        if (!table.set(word, vec))
            table.warnings_.push_back(ctx + ": duplicate word '" + word + "', last occurrence wins");
        ++rows;
    }
    if (rows != declared)
        throw DataError(path.string() + ": header declares " + std::to_string(declared) +
                        " rows, found " + std::to_string(rows));
    return table;
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.precision(17);
    out << words_.size() << ' ' << dim_ << '\n';
    for (std::size_t i = 0; i < words_.size(); ++i) {
        out << words_[i];
        for (std::size_t k = 0; k < dim_; ++k) out << ' ' << data_[i * dim_ + k];
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::optional<Vector> sentence_vector(const Sentence& sentence, const EmbeddingTable& table) {
    Vector sum(table.dim(), 0.0);
    std::size_t found = 0;
    for (const auto& t : sentence.tokens) {
        if (t.norm.empty()) continue;
        if (auto v = table.find(t.norm)) {
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*v)[k];
            ++found;
        }
    }
    if (found == 0) return std::nullopt;
    for (auto& x : sum) x /= static_cast<double>(found);
    return sum;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw DataError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()) + ")");
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        uv += u[k] * v[k];
        uu += u[k] * u[k];
        vv += v[k] * v[k];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

RetrieveIndex RetrieveIndex::build(std::span<const std::string> sentences,
                                   const EmbeddingTable& table) {
    RetrieveIndex index;
    index.dim_ = table.dim();
    for (const auto& s : sentences) {
        auto vec = sentence_vector(tokenize(s), table);
        index.add(s, vec ? std::move(*vec) : Vector(table.dim(), 0.0));
    }
    return index;
}

RetrieveIndex RetrieveIndex::build(const LabeledCorpus& corpus, const EmbeddingTable& table) {
    const auto neutral = corpus.texts(StyleLabel::neutral);
    return build(neutral, table);
}

void RetrieveIndex::add(std::string sentence, Vector vec) {
    if (sentences_.empty() && data_.empty() && dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_)
        throw DataError("retrieve index: candidate vector has dimension " +
                        std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
    if (sentence.find_first_of("\t\n") != std::string::npos)
        throw DataError("retrieve index: candidate contains TAB or newline");
    sentences_.push_back(std::move(sentence));
    data_.insert(data_.end(), vec.begin(), vec.end());
}

std::span<const double> RetrieveIndex::vector(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * dim_, dim_);
}

void RetrieveIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.precision(17);
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
        out << sentences_[i] << '\t';
        const auto v = vector(i);
        for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << v[k];
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

RetrieveIndex RetrieveIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    RetrieveIndex index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string ctx = path.string() + ": line " + std::to_string(lineno);
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw DataError(ctx + ": expected sentence<TAB>vector");
        Vector vec;
        std::string_view rest = std::string_view(line).substr(tab + 1);
        while (true) {
            const auto comma = rest.find(',');
            vec.push_back(parse_component(rest.substr(0, comma), ctx));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (index.empty()) index.dim_ = vec.size();
        index.add(line.substr(0, tab), std::move(vec));
    }
    return index;
}

std::size_t nearest_index(std::span<const double> query, const RetrieveIndex& index) {
    if (index.empty()) throw DataError("retrieve index is empty");
    std::size_t best = 0;
    double best_score = cosine(query, index.vector(0));
    for (std::size_t i = 1; i < index.size(); ++i) {
        const double s = cosine(query, index.vector(i));
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return best;
}

const std::string& nearest_neighbor(const Sentence& query, const RetrieveIndex& index,
                                    const EmbeddingTable& table) {
    if (index.empty()) throw DataError("retrieve index is empty");
    const auto vec = sentence_vector(query, table);
    if (!vec) return index.sentence(0);
    return index.sentence(nearest_index(*vec, index));
}

}  // namespace detox
