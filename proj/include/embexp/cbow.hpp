#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "embexp/corpus.hpp"
#include "embexp/rng.hpp"

namespace embexp::cbow {

enum class Layer { syn0, syn1neg };

struct TrainingConfig {
    int dimension = 100;
    int window = 10;
    int negatives = 5;
    int epochs = 10;
    std::uint64_t min_count = 128;
    float initial_learning_rate = 0.05f;
    float learning_rate_floor = 0.05f * 1e-4f;
    bool subsampling = false;  // kept disabled so frequency effects stay visible
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t unigram_table_size = 100'000'000;
    double unigram_power = 0.75;

    void validate() const;  // throws ConfigError
};

// Word ordinals drawn with probability proportional to count^power.
class UnigramTable {
  public:
    UnigramTable() = default;
    UnigramTable(const corpus::Vocabulary& vocab, double power, std::size_t size);

    std::int32_t draw(Rng& rng) const;
    std::size_t size() const { return table_.size(); }
    std::span<const std::int32_t> entries() const { return table_; }

  private:
    std::vector<std::int32_t> table_;
};

// Both synaptic layers, row-major V x D, rows aligned with vocabulary
// ordinals.  syn0 rows are the word vectors; syn1neg the output weights.
struct EmbeddingModel {
    corpus::Vocabulary vocab;
    TrainingConfig config;
    std::vector<float> syn0;
    std::vector<float> syn1neg;

    int dimension() const { return config.dimension; }
    std::size_t vocab_size() const { return vocab.size(); }

    std::span<float> row(Layer layer, std::int32_t ordinal);
    std::span<const float> row(Layer layer, std::int32_t ordinal) const;
    std::span<float> syn0_row(std::int32_t ordinal) { return row(Layer::syn0, ordinal); }
    std::span<float> syn1neg_row(std::int32_t ordinal) { return row(Layer::syn1neg, ordinal); }
};

// syn0 uniform in [-0.5/D, 0.5/D), syn1neg zero; deterministic in config.seed.
EmbeddingModel init_model(corpus::Vocabulary vocab, const TrainingConfig& config);

// Negative-sampling loss for one (context, target) instance with fixed
// negatives:  -log s(h.v't) - sum_k log s(-h.v'k),  h = mean syn0 of context.
// Computed in double precision.
double nce_loss(const EmbeddingModel& model, std::span<const std::int32_t> context_ids,
                std::int32_t target_id, std::span<const std::int32_t> negative_ids);

// Applies the exact gradient of nce_loss at learning rate lr (float hot
// path); returns the pre-update loss.
double apply_gradient_step(EmbeddingModel& model, std::span<const std::int32_t> context_ids,
                           std::int32_t target_id, std::span<const std::int32_t> negative_ids,
                           float lr);

// Draws config.negatives ordinals from the table, redrawing target
// collisions, then applies the gradient step.
double train_step(EmbeddingModel& model, std::span<const std::int32_t> context_ids,
                  std::int32_t target_id, const UnigramTable& table, float lr, Rng& rng);

// Corpus mapped to vocabulary ordinals; out-of-vocabulary tokens are skipped
// and lines with no surviving tokens dropped.  line_offsets has size
// lines+1 (CSR layout over ids).
struct TokenizedCorpus {
    std::vector<std::int32_t> ids;
    std::vector<std::uint64_t> line_offsets;

    std::size_t lines() const { return line_offsets.empty() ? 0 : line_offsets.size() - 1; }
};

TokenizedCorpus tokenize(std::istream& in, const corpus::Vocabulary& vocab);
TokenizedCorpus tokenize_file(const std::filesystem::path& path, const corpus::Vocabulary& vocab);

struct TrainStats {
    std::uint64_t total_updates = 0;
    std::array<double, 10> decile_loss_sum{};
    std::array<std::uint64_t, 10> decile_updates{};

    double decile_mean_loss(int decile) const;
};

// Trains CBOW with negative sampling: one update per surviving target token,
// context up to a shrunk window b ~ U{1..window} each side within the line,
// linear learning-rate decay down to the floor.  Single-worker runs are a
// pure function of (corpus, vocab, config); multi-worker runs update shared
// weights lock-free and are only statistically equivalent.
EmbeddingModel train(const TokenizedCorpus& corpus, const corpus::Vocabulary& vocab,
                     const TrainingConfig& config, TrainStats* stats = nullptr,
                     std::ostream* progress = nullptr);
EmbeddingModel train_file(const std::filesystem::path& corpus_path,
                          const corpus::Vocabulary& vocab, const TrainingConfig& config,
                          TrainStats* stats = nullptr, std::ostream* progress = nullptr);

}  // namespace embexp::cbow
