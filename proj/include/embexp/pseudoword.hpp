#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "embexp/corpus.hpp"
#include "embexp/distributions.hpp"
#include "embexp/rng.hpp"

namespace embexp::pseudoword {

// Record of one pseudoword family: which word was replaced, what was
// inserted, and the per-index bookkeeping needed by the analysis stage.
struct ExperimentManifest {
    std::string base_word;
    std::vector<std::string> labels;
    std::vector<std::uint64_t> replaced_counts;
    std::vector<std::uint64_t> interspersed_counts;
    std::vector<double> noise_proportions;  // empty unless the taper was used
    std::vector<double> expected_counts;    // analytic per-index expectation
    std::uint64_t rng_seed = 0;
    std::vector<int> below_cutoff_indices;  // 1-based, expected count < min_count
    std::vector<int> excess_indices;        // 1-based, replaced above the top-up target
    std::vector<std::string> warnings;

    std::uint64_t final_count(int index) const;  // replaced + interspersed
    std::uint64_t total_replaced() const;
};

// Upper-cases the base word and appends "_<index>": cat, 2 -> CAT_2.
std::string pseudoword_label(const std::string& base_word, int index);
std::string uppercase_label_base(const std::string& base_word);

// --- streaming transforms (streams must be rewindable where noted) ---

// Replaces every occurrence of `word` by a pseudoword whose index is drawn
// independently from `dist`.  Token count is conserved.  Absent word yields
// a warning manifest; replacing an existing pseudoword label is refused.
ExperimentManifest replace_word(std::istream& in, std::ostream& out, const std::string& word,
                                const IndexSampler& dist, Rng& rng);

// Deterministic-draw seam used by replace_word and by tests that need
// scripted index sequences.
ExperimentManifest replace_word_with(std::istream& in, std::ostream& out, const std::string& word,
                                     int n, const std::function<int()>& draw_index);

// Inserts exactly `extra_count` copies of `token`, each at a token gap chosen
// uniformly at random over the whole corpus (a line with T tokens has T+1
// gaps).  Requires a rewindable input stream (two passes).
void intersperse(std::istream& in, std::ostream& out, const std::string& token,
                 std::uint64_t extra_count, Rng& rng);

// Batch form: all (token, count) insertions in one pass over the corpus.
// Positions for each token come from their own derived RNG stream.
void intersperse_many(std::istream& in, std::ostream& out,
                      const std::vector<std::pair<std::string, std::uint64_t>>& insertions,
                      std::uint64_t master_seed, const std::string& stream_prefix);

struct VoidSpec {
    std::string label = "VOID";
    double relative_frequency = 0.005;
};

// Copies inserted so that inserted/(N+inserted) hits the requested relative
// frequency within one token: round(f*N/(1-f)).
std::uint64_t void_insert_count(std::uint64_t corpus_tokens, double relative_frequency);

// Intersperses the VOID token at the requested relative frequency.
void insert_void(std::istream& in, std::ostream& out, const VoidSpec& spec, Rng& rng);

// --- whole experiments over corpus files ---

struct FrequencyExperimentConfig {
    std::vector<std::string> words;
    double p = 0.5;
    int n = 20;
    std::uint64_t min_count = 128;         // flags indices expected to fall below
    std::uint64_t frequency_floor = 10000; // reject words rarer than this
    std::uint64_t seed = 1;
};

// Replaces each word by a truncated-geometric family of pseudowords with
// halving frequencies and the word's own co-occurrence distribution.
std::vector<ExperimentManifest> build_frequency_experiment(const std::filesystem::path& in,
                                                           const std::filesystem::path& out,
                                                           const FrequencyExperimentConfig& config);

struct NoiseExperimentConfig {
    std::vector<std::string> words;
    int n = 7;
    std::uint64_t seed = 1;
};

// Replaces each word via the linear taper, then tops every index up with
// uniformly interspersed copies so all n pseudowords end at round(2F/n)
// occurrences with noise proportion (i-1)/(n-1).
std::vector<ExperimentManifest> build_noise_experiment(const std::filesystem::path& in,
                                                       const std::filesystem::path& out,
                                                       const NoiseExperimentConfig& config);

struct VoidExperimentConfig {
    VoidSpec spec;
    double p = 0.5;
    int n = 20;
    std::uint64_t min_count = 128;
    std::uint64_t seed = 1;
};

// Intersperses VOID and then replaces it by a truncated-geometric family,
// yielding pseudowords whose co-occurrence distribution is pure noise.
std::vector<ExperimentManifest> build_void_experiment(const std::filesystem::path& in,
                                                      const std::filesystem::path& out,
                                                      const VoidExperimentConfig& config);

struct MixExperimentConfig {
    std::string word_a;
    std::string word_b;
    int n = 7;
    std::uint64_t seed = 1;
};

// Equalizes the two words' counts by random down-sampling, then replaces
// word_a via the taper and word_b via the reversed taper under a shared
// label family A-B-MIX_i, blending their co-occurrence distributions in
// evenly spaced proportions.
std::vector<ExperimentManifest> mix_words(const std::filesystem::path& in,
                                          const std::filesystem::path& out,
                                          const MixExperimentConfig& config);

// --- manifest JSON files ---

void write_manifests(const std::filesystem::path& path, const std::string& kind,
                     std::uint64_t seed, const std::vector<ExperimentManifest>& manifests);

struct ManifestFile {
    std::string kind;
    std::uint64_t seed = 0;
    std::vector<ExperimentManifest> manifests;
};

ManifestFile read_manifests(const std::filesystem::path& path);

}  // namespace embexp::pseudoword
