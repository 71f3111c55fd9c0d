#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace embexp::corpus {

// A normalized corpus: UTF-8 text, one sentence per line, tokens separated
// by single spaces.  Every token is lower-case letters except pseudoword
// tokens (UPPERCASE_BASE "_" index), which pass through all transforms.
struct SentenceCorpus {
    std::filesystem::path path;
};

using WordCounts = std::unordered_map<std::string, std::uint64_t>;

// Splits a line on single spaces.  Views point into `line`.
std::vector<std::string_view> split_tokens(std::string_view line);

// True for tokens of the pseudoword form BASE_i: exactly one underscore,
// a decimal index after it, and a base of non-lowercase letters and '-'.
bool is_pseudoword_token(std::string_view token);

// Lower-cases raw text, replaces every non-letter character by a space,
// collapses whitespace runs and drops empty lines.  Pseudoword tokens are
// preserved verbatim so normalized corpora can be re-processed.
// Throws InputError (with byte offset) on invalid UTF-8.
void normalize(std::istream& in, std::ostream& out);
void normalize_file(const std::filesystem::path& in, const std::filesystem::path& out);

// Single normalized line (or several tokens) -> normalized token string.
// Returns an empty string when nothing survives.
std::string normalize_line(const std::string& line, std::size_t line_byte_offset = 0);

WordCounts count_words(std::istream& in);
WordCounts count_words_file(const std::filesystem::path& path);
std::uint64_t total_tokens(const WordCounts& counts);

class Vocabulary {
  public:
    struct Entry {
        std::string word;
        std::uint64_t count = 0;
    };

    Vocabulary() = default;

    // Retains words with count >= min_count; ordinals are dense 0..V-1 in
    // descending count order, ties broken lexicographically.
    static Vocabulary from_counts(const WordCounts& counts, std::uint64_t min_count);
    static Vocabulary from_corpus(std::istream& in, std::uint64_t min_count);
    static Vocabulary from_corpus_file(const std::filesystem::path& path, std::uint64_t min_count);

    std::int32_t find(const std::string& word) const;  // -1 when absent
    bool contains(const std::string& word) const { return find(word) >= 0; }
    const Entry& entry(std::int32_t ordinal) const { return entries_.at(static_cast<std::size_t>(ordinal)); }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // Text format: "word<TAB>count" per line, descending count.
    void save(std::ostream& out) const;
    void save_file(const std::filesystem::path& path) const;
    static Vocabulary load(std::istream& in);
    static Vocabulary load_file(const std::filesystem::path& path);

  private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::int32_t> index_;
};

struct FrequencyBand {
    std::uint64_t low = 0;   // inclusive, 2^k
    std::uint64_t high = 0;  // exclusive, 2^(k+1)
    std::uint64_t word_count = 0;
    std::vector<std::string> examples;  // up to 4, most frequent first
};

using FrequencyBandTable = std::vector<FrequencyBand>;

// Band k = floor(log2 count); rows ascending from the lowest to the highest
// occupied band, empty bands in between included.
FrequencyBandTable frequency_bands(const Vocabulary& vocab);

// CSV with header "band_low,band_high,word_count,examples"; examples are
// space-joined inside the field.
void write_band_csv(const FrequencyBandTable& table, std::ostream& out);

}  // namespace embexp::corpus
