#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "detox/data_io.hpp"
#include "detox/embeddings.hpp"

namespace detox::synthetic {

/// Generator for a toy detoxification world. Every sentence is a run of
/// distinct filler words with one frame `X A <slot> B` inserted at a random
/// position. Toxic sentences put a planted toxic word in the slot, neutral
/// ones a polite word, so the slot word alone carries the style.
struct Spec {
    std::size_t neutral = 3000;
    std::size_t toxic = 700;
    std::size_t min_fillers = 16;
    std::size_t max_fillers = 20;
    std::uint64_t seed = 1;
};

const std::vector<std::string>& toxic_words();
const std::vector<std::string>& polite_words();
const std::vector<std::string>& filler_words();

/// Neutral and toxic entries interleaved in a seeded order.
LabeledCorpus labeled_corpus(const Spec& spec);

/// `count` toxic sentences drawn with the spec's filler settings and `seed`.
std::vector<std::string> toxic_sentences(std::size_t count, const Spec& spec, std::uint64_t seed);

/// Parallel pairs: a toxic sentence and the same sentence with the toxic
/// slot word swapped for a polite one.
ParallelCorpus parallel_pairs(std::size_t count, const Spec& spec, std::uint64_t seed);

/// Seeded Gaussian-ish vectors for every word the generator can emit.
EmbeddingTable embeddings(std::size_t dim, std::uint64_t seed);

}  // namespace detox::synthetic
