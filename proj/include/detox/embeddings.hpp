#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "detox/data_io.hpp"
#include "detox/text.hpp"

namespace detox {

using Vector = std::vector<double>;

/// Word vectors in a flat row-major buffer.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    /// Word2vec/fastText text format: `vocab_size dim` header, then
    /// `word v1 ... vdim` rows. A duplicate word replaces the earlier row and
    /// records a warning.
    static EmbeddingTable load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Inserts or replaces. Returns false if the word was already present.
    bool set(std::string word, std::span<const double> vec);

    std::optional<std::span<const double>> find(std::string_view word) const;
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::vector<double> data_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> warnings_;
};

/// Mean of the vectors of in-vocabulary normalized tokens; nullopt when no
/// token is found.
std::optional<Vector> sentence_vector(const Sentence& sentence, const EmbeddingTable& table);

/// u·v / (‖u‖‖v‖), clamped to [-1, 1]; 0 when either vector is zero. Throws
/// DataError on a dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Neutral candidate sentences with precomputed vectors. A candidate with no
/// in-vocabulary token is stored with a zero vector (cosine 0 to anything).
class RetrieveIndex {
public:
    RetrieveIndex() = default;

    static RetrieveIndex build(std::span<const std::string> sentences, const EmbeddingTable& table);
    /// Only the neutral entries of the corpus.
    static RetrieveIndex build(const LabeledCorpus& corpus, const EmbeddingTable& table);

    /// Appends a candidate with an explicit vector.
    void add(std::string sentence, Vector vec);

    /// TSV rows `sentence TAB v1,...,vdim`.
    void save(const std::filesystem::path& path) const;
    static RetrieveIndex load(const std::filesystem::path& path);

    std::size_t size() const noexcept { return sentences_.size(); }
    bool empty() const noexcept { return sentences_.empty(); }
    std::size_t dim() const noexcept { return dim_; }
    const std::string& sentence(std::size_t i) const { return sentences_.at(i); }
    std::span<const double> vector(std::size_t i) const;

private:
    std::size_t dim_ = 0;
    std::vector<std::string> sentences_;
    std::vector<double> data_;
};

/// Index of the candidate with maximal cosine to `query`; ties go to the
/// lowest index. Throws DataError on an empty index.
std::size_t nearest_index(std::span<const double> query, const RetrieveIndex& index);

/// Candidate maximizing cosine to the query's sentence vector. A query with
/// no in-vocabulary token falls back to candidate 0.
const std::string& nearest_neighbor(const Sentence& query, const RetrieveIndex& index,
                                    const EmbeddingTable& table);

}  // namespace detox
