#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace detox {

enum class StyleLabel { toxic, neutral };

std::string_view to_string(StyleLabel label) noexcept;
std::optional<StyleLabel> parse_label(std::string_view text) noexcept;

struct LabeledEntry {
    std::string text;
    StyleLabel label;

    bool operator==(const LabeledEntry&) const = default;
};

/// Houses both the toxic and the neutral corpora; entry order is the order
/// of the source file.
class LabeledCorpus {
public:
    LabeledCorpus() = default;
    explicit LabeledCorpus(std::vector<LabeledEntry> entries);

    /// Throws DataError if the trimmed text is empty or contains TAB/newline.
    void add(std::string text, StyleLabel label);

    const std::vector<LabeledEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t count(StyleLabel label) const noexcept;

    /// Texts with the given label, in corpus order.
    std::vector<std::string> texts(StyleLabel label) const;

    bool operator==(const LabeledCorpus&) const = default;

private:
    std::vector<LabeledEntry> entries_;
};

struct ParallelPair {
    std::string source;  // toxic
    std::string target;  // neutral

    bool operator==(const ParallelPair&) const = default;
};

using ParallelCorpus = std::vector<ParallelPair>;

enum class CorpusFormat { tsv, csv };

/// Header row must name a `text` and a `label` column (any order, extra
/// columns ignored). Labels are `toxic` or `neutral`. Errors name the
/// 1-based line number.
LabeledCorpus load_labeled_corpus(const std::filesystem::path& path,
                                  CorpusFormat format = CorpusFormat::tsv);
void save_labeled_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path);

/// Headerless `source TAB target`. An empty file is an empty corpus.
ParallelCorpus load_parallel_corpus(const std::filesystem::path& path);
void save_parallel_corpus(const ParallelCorpus& pairs, const std::filesystem::path& path);

/// One item per line, blank lines skipped, CR stripped.
std::vector<std::string> load_lines(const std::filesystem::path& path, bool skip_blank = true);
void save_lines(const std::vector<std::string>& lines, const std::filesystem::path& path);

struct SplitSpec {
    std::size_t test_size = 0;
    std::uint64_t seed = 0;
};

struct CorpusSplit {
    LabeledCorpus train;
    LabeledCorpus test;
};

/// Draws `test_size` toxic entries without replacement (partial
/// Fisher-Yates over the toxic indices with SplitMix64(seed)); both halves
/// keep corpus order. Neutral entries always stay in train.
CorpusSplit split_corpus(const LabeledCorpus& corpus, const SplitSpec& spec);

/// Label-stratified hold-out: `fraction` of each label (at least one of
/// each when the label has two or more entries) goes to test.
CorpusSplit stratified_holdout(const LabeledCorpus& corpus, double fraction, std::uint64_t seed);

}  // namespace detox
