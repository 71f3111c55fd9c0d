#include "embexp/corpus.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "embexp/errors.hpp"
#include "embexp/unicode.hpp"

namespace embexp::corpus {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path.string());
    return out;
}

}  // namespace

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        std::size_t next = line.find(' ', pos);
        if (next == std::string_view::npos) next = line.size();
        if (next > pos) tokens.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return tokens;
}

bool is_pseudoword_token(std::string_view token) {
    std::size_t underscore = token.find('_');
    if (underscore == std::string_view::npos || underscore == 0 || underscore + 1 == token.size())
        return false;
    if (token.find('_', underscore + 1) != std::string_view::npos) return false;
    for (std::size_t i = underscore + 1; i < token.size(); ++i)
        if (token[i] < '0' || token[i] > '9') return false;
    // base: letters not in lowercase form, '-' allowed inside
    std::string base(token.substr(0, underscore));
    if (base.front() == '-' || base.back() == '-') return false;
    std::size_t pos = 0;
    while (pos < base.size()) {
        if (base[pos] == '-') {
            ++pos;
            continue;
        }
        char32_t cp = unicode::decode_utf8(base, pos);
        if (cp == static_cast<char32_t>(0xFFFFFFFF)) return false;
        if (!unicode::is_letter(cp)) return false;
        if (unicode::to_lower(cp) == cp && unicode::to_upper(cp) != cp) return false;
    }
    return true;
}

std::string normalize_line(const std::string& line, std::size_t line_byte_offset) {
    std::string out;
    out.reserve(line.size());
    auto emit_separator = [&] {
        if (!out.empty() && out.back() != ' ') out.push_back(' ');
    };
    // Work on ASCII-whitespace-delimited segments so pseudoword tokens can be
    // recognized before punctuation stripping.
    std::size_t pos = 0;
    while (pos < line.size()) {
        unsigned char c = static_cast<unsigned char>(line[pos]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
            ++pos;
            continue;
        }
        std::size_t end = pos;
        while (end < line.size()) {
            unsigned char e = static_cast<unsigned char>(line[end]);
            if (e == ' ' || e == '\t' || e == '\r' || e == '\v' || e == '\f') break;
            ++end;
        }
        std::string_view segment(line.data() + pos, end - pos);
        if (is_pseudoword_token(segment)) {
            emit_separator();
            out.append(segment);
        } else {
            std::size_t p = pos;
            while (p < end) {
                std::size_t before = p;
                char32_t cp = unicode::decode_utf8(line, p);
                if (cp == static_cast<char32_t>(0xFFFFFFFF))
                    throw InputError("invalid UTF-8 at byte offset " +
                                         std::to_string(line_byte_offset + before),
                                     line_byte_offset + before);
                if (unicode::is_letter(cp)) {
                    unicode::encode_utf8(unicode::to_lower(cp), out);
                } else {
                    emit_separator();
                }
            }
        }
        emit_separator();
        pos = end;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

void normalize(std::istream& in, std::ostream& out) {
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        std::string normalized = normalize_line(line, offset);
        if (!normalized.empty()) {
            out.write(normalized.data(), static_cast<std::streamsize>(normalized.size()));
            out.put('\n');
        }
        offset += line.size() + 1;
    }
}

void normalize_file(const std::filesystem::path& in_path, const std::filesystem::path& out_path) {
    auto in = open_input(in_path);
    auto out = open_output(out_path);
    normalize(in, out);
    if (!out) throw IoError("write failure: " + out_path.string());
}

WordCounts count_words(std::istream& in) {
    WordCounts counts;
    std::string line;
    std::string token;
    while (std::getline(in, line)) {
        for (std::string_view sv : split_tokens(line)) {
            token.assign(sv);
            ++counts[token];
        }
    }
    return counts;
}

WordCounts count_words_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return count_words(in);
}

std::uint64_t total_tokens(const WordCounts& counts) {
    std::uint64_t total = 0;
    for (const auto& [word, count] : counts) total += count;
    return total;
}

Vocabulary Vocabulary::from_counts(const WordCounts& counts, std::uint64_t min_count) {
    if (min_count == 0) throw ConfigError("min_count must be positive");
    Vocabulary vocab;
    vocab.entries_.reserve(counts.size());
    for (const auto& [word, count] : counts) {
        if (count >= min_count) vocab.entries_.push_back({word, count});
    }
    std::sort(vocab.entries_.begin(), vocab.entries_.end(), [](const Entry& a, const Entry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.word < b.word;
    });
    vocab.index_.reserve(vocab.entries_.size());
    for (std::size_t i = 0; i < vocab.entries_.size(); ++i)
        vocab.index_.emplace(vocab.entries_[i].word, static_cast<std::int32_t>(i));
    return vocab;
}

Vocabulary Vocabulary::from_corpus(std::istream& in, std::uint64_t min_count) {
    return from_counts(count_words(in), min_count);
}

Vocabulary Vocabulary::from_corpus_file(const std::filesystem::path& path, std::uint64_t min_count) {
    auto in = open_input(path);
    return from_corpus(in, min_count);
}

std::int32_t Vocabulary::find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
}

void Vocabulary::save(std::ostream& out) const {
    for (const Entry& e : entries_) out << e.word << '\t' << e.count << '\n';
}

void Vocabulary::save_file(const std::filesystem::path& path) const {
    auto out = open_output(path);
    save(out);
    if (!out) throw IoError("write failure: " + path.string());
}

Vocabulary Vocabulary::load(std::istream& in) {
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw IoError("malformed vocabulary line: " + line);
        Entry e;
        e.word = line.substr(0, tab);
        e.count = std::stoull(line.substr(tab + 1));
        vocab.index_.emplace(e.word, static_cast<std::int32_t>(vocab.entries_.size()));
        vocab.entries_.push_back(std::move(e));
    }
    return vocab;
}

Vocabulary Vocabulary::load_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return load(in);
}

FrequencyBandTable frequency_bands(const Vocabulary& vocab) {
    if (vocab.empty()) return {};
    int k_min = 64, k_max = 0;
    for (const auto& e : vocab.entries()) {
        int k = std::bit_width(e.count) - 1;
        k_min = std::min(k_min, k);
        k_max = std::max(k_max, k);
    }
    FrequencyBandTable table(static_cast<std::size_t>(k_max - k_min + 1));
    for (int k = k_min; k <= k_max; ++k) {
        table[static_cast<std::size_t>(k - k_min)].low = std::uint64_t{1} << k;
        table[static_cast<std::size_t>(k - k_min)].high = std::uint64_t{1} << (k + 1);
    }
    // entries are in ordinal order, so examples come out most-frequent-first
    for (const auto& e : vocab.entries()) {
        int k = std::bit_width(e.count) - 1;
        auto& band = table[static_cast<std::size_t>(k - k_min)];
        ++band.word_count;
        if (band.examples.size() < 4) band.examples.push_back(e.word);
    }
    return table;
}

void write_band_csv(const FrequencyBandTable& table, std::ostream& out) {
    out << "band_low,band_high,word_count,examples\n";
    for (const auto& band : table) {
        out << band.low << ',' << band.high << ',' << band.word_count << ',';
        for (std::size_t i = 0; i < band.examples.size(); ++i) {
            if (i > 0) out << ' ';
            out << band.examples[i];
        }
        out << '\n';
    }
}

}  // namespace embexp::corpus
