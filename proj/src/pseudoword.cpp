#include "embexp/pseudoword.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "embexp/errors.hpp"
#include "embexp/unicode.hpp"

namespace embexp::pseudoword {

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

std::uint64_t round_half_even(double x) {
    return static_cast<std::uint64_t>(std::nearbyint(x));
}

void rewind(std::istream& in) {
    in.clear();
    in.seekg(0);
    if (!in) throw IoError("input stream is not rewindable");
}

std::vector<std::string> family_labels(const std::string& base, int n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) labels.push_back(base + "_" + std::to_string(i));
    return labels;
}

// One word scheduled for replacement within a single corpus pass.
struct ReplacementTask {
    std::string word;
    std::string label_base;
    IndexSampler sampler;
    Rng rng;
    ExperimentManifest manifest;

    ReplacementTask(std::string w, std::string base, IndexSampler s, std::uint64_t seed)
        : word(std::move(w)), label_base(std::move(base)), sampler(std::move(s)), rng(seed) {
        manifest.base_word = word;
        manifest.rng_seed = seed;
        manifest.labels = family_labels(label_base, sampler.n());
        manifest.replaced_counts.assign(static_cast<std::size_t>(sampler.n()), 0);
        manifest.interspersed_counts.assign(static_cast<std::size_t>(sampler.n()), 0);
    }
};

struct PassStats {
    std::uint64_t tokens = 0;
    std::uint64_t lines = 0;
    std::uint64_t gaps() const { return tokens + lines; }
};

// Streams the corpus once, replacing every occurrence of each task's word by
// a drawn pseudoword label.  Per-word RNG streams keep the result independent
// of how many words share the pass.
PassStats replace_many(std::istream& in, std::ostream& out, std::vector<ReplacementTask>& tasks) {
    std::unordered_map<std::string, std::size_t> by_word;
    for (std::size_t t = 0; t < tasks.size(); ++t) by_word.emplace(tasks[t].word, t);

    PassStats stats;
    std::string line, token, output;
    while (std::getline(in, line)) {
        output.clear();
        bool first = true;
        for (std::string_view sv : corpus::split_tokens(line)) {
            if (!first) output.push_back(' ');
            first = false;
            ++stats.tokens;
            token.assign(sv);
            auto it = by_word.find(token);
            if (it == by_word.end()) {
                output.append(sv);
            } else {
                ReplacementTask& task = tasks[it->second];
                int i = task.sampler.sample(task.rng);
                ++task.manifest.replaced_counts[static_cast<std::size_t>(i - 1)];
                output.append(task.manifest.labels[static_cast<std::size_t>(i - 1)]);
            }
        }
        output.push_back('\n');
        out.write(output.data(), static_cast<std::streamsize>(output.size()));
        ++stats.lines;
    }
    return stats;
}

// Writes the corpus with the given tokens inserted at their gap positions.
// `inserts` must be sorted by gap position; a gap index g within a line of T
// tokens (0 <= g <= T) puts the token before the g-th one.
void insert_at_gaps(std::istream& in, std::ostream& out,
                    const std::vector<std::pair<std::uint64_t, std::string>>& inserts) {
    std::size_t next = 0;
    std::uint64_t offset = 0;
    std::string line, output;
    while (std::getline(in, line)) {
        auto tokens = corpus::split_tokens(line);
        const std::uint64_t gap_count = tokens.size() + 1;
        if (next < inserts.size() && inserts[next].first < offset + gap_count) {
            output.clear();
            bool first = true;
            auto emit = [&](std::string_view tok) {
                if (!first) output.push_back(' ');
                first = false;
                output.append(tok);
            };
            for (std::size_t g = 0; g <= tokens.size(); ++g) {
                while (next < inserts.size() && inserts[next].first == offset + g) {
                    emit(inserts[next].second);
                    ++next;
                }
                if (g < tokens.size()) emit(tokens[g]);
            }
            output.push_back('\n');
            out.write(output.data(), static_cast<std::streamsize>(output.size()));
        } else {
            out.write(line.data(), static_cast<std::streamsize>(line.size()));
            out.put('\n');
        }
        offset += gap_count;
    }
    if (next < inserts.size())
        throw ConsistencyError("interspersion positions exceed corpus gap count");
}

std::vector<std::pair<std::uint64_t, std::string>> draw_positions(
    const std::vector<std::pair<std::string, std::uint64_t>>& insertions, std::uint64_t total_gaps,
    std::uint64_t master_seed, const std::string& stream_prefix) {
    std::vector<std::pair<std::uint64_t, std::string>> result;
    std::uint64_t total = 0;
    for (const auto& [token, count] : insertions) total += count;
    if (total == 0) return result;
    if (total_gaps == 0) throw PreconditionError("cannot intersperse into an empty corpus");
    result.reserve(total);
    for (const auto& [token, count] : insertions) {
        Rng rng = make_rng(master_seed, stream_prefix + token);
        for (std::uint64_t k = 0; k < count; ++k)
            result.emplace_back(uniform_below(rng, total_gaps), token);
    }
    std::stable_sort(result.begin(), result.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return result;
}

PassStats count_pass(std::istream& in) {
    PassStats stats;
    std::string line;
    while (std::getline(in, line)) {
        stats.tokens += corpus::split_tokens(line).size();
        ++stats.lines;
    }
    return stats;
}

}  // namespace

std::uint64_t ExperimentManifest::final_count(int index) const {
    auto i = static_cast<std::size_t>(index - 1);
    return replaced_counts.at(i) + interspersed_counts.at(i);
}

std::uint64_t ExperimentManifest::total_replaced() const {
    std::uint64_t total = 0;
    for (std::uint64_t c : replaced_counts) total += c;
    return total;
}

std::string uppercase_label_base(const std::string& base_word) {
    std::string out;
    out.reserve(base_word.size());
    std::size_t pos = 0;
    while (pos < base_word.size()) {
        char32_t cp = unicode::decode_utf8(base_word, pos);
        if (cp == static_cast<char32_t>(0xFFFFFFFF))
            throw InputError("invalid UTF-8 in word", pos);
        unicode::encode_utf8(unicode::to_upper(cp), out);
    }
    return out;
}

std::string pseudoword_label(const std::string& base_word, int index) {
    return uppercase_label_base(base_word) + "_" + std::to_string(index);
}

ExperimentManifest replace_word_with(std::istream& in, std::ostream& out, const std::string& word,
                                     int n, const std::function<int()>& draw_index) {
    if (is_pseudoword_token(word))
        throw PreconditionError("refusing to replace existing pseudoword label: " + word);

    ExperimentManifest manifest;
    manifest.base_word = word;
    manifest.labels = family_labels(uppercase_label_base(word), n);
    manifest.replaced_counts.assign(static_cast<std::size_t>(n), 0);
    manifest.interspersed_counts.assign(static_cast<std::size_t>(n), 0);

    std::string line, token, output;
    while (std::getline(in, line)) {
        output.clear();
        bool first = true;
        for (std::string_view sv : corpus::split_tokens(line)) {
            if (!first) output.push_back(' ');
            first = false;
            token.assign(sv);
            if (token == word) {
                int i = draw_index();
                if (i < 1 || i > n) throw std::domain_error("drawn index outside 1..n");
                ++manifest.replaced_counts[static_cast<std::size_t>(i - 1)];
                output.append(manifest.labels[static_cast<std::size_t>(i - 1)]);
            } else {
                output.append(sv);
            }
        }
        output.push_back('\n');
        out.write(output.data(), static_cast<std::streamsize>(output.size()));
    }
    if (manifest.total_replaced() == 0)
        manifest.warnings.push_back("word not found in corpus: " + word);
    return manifest;
}

ExperimentManifest replace_word(std::istream& in, std::ostream& out, const std::string& word,
                                const IndexSampler& dist, Rng& rng) {
    return replace_word_with(in, out, word, dist.n(), [&] { return dist.sample(rng); });
}

void intersperse(std::istream& in, std::ostream& out, const std::string& token,
                 std::uint64_t extra_count, Rng& rng) {
    PassStats stats = count_pass(in);
    rewind(in);
    if (extra_count > 0 && stats.gaps() == 0)
        throw PreconditionError("cannot intersperse into an empty corpus");
    std::vector<std::pair<std::uint64_t, std::string>> inserts;
    inserts.reserve(extra_count);
    for (std::uint64_t k = 0; k < extra_count; ++k)
        inserts.emplace_back(uniform_below(rng, stats.gaps()), token);
    std::stable_sort(inserts.begin(), inserts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    insert_at_gaps(in, out, inserts);
}

void intersperse_many(std::istream& in, std::ostream& out,
                      const std::vector<std::pair<std::string, std::uint64_t>>& insertions,
                      std::uint64_t master_seed, const std::string& stream_prefix) {
    PassStats stats = count_pass(in);
    rewind(in);
    auto inserts = draw_positions(insertions, stats.gaps(), master_seed, stream_prefix);
    insert_at_gaps(in, out, inserts);
}

std::uint64_t void_insert_count(std::uint64_t corpus_tokens, double relative_frequency) {
    if (!(relative_frequency > 0.0 && relative_frequency < 1.0))
        throw std::domain_error("relative frequency must lie in (0,1)");
    double f = relative_frequency;
    return round_half_even(f * static_cast<double>(corpus_tokens) / (1.0 - f));
}

void insert_void(std::istream& in, std::ostream& out, const VoidSpec& spec, Rng& rng) {
    PassStats stats = count_pass(in);
    rewind(in);
    std::uint64_t extra = void_insert_count(stats.tokens, spec.relative_frequency);
    if (extra > 0 && stats.gaps() == 0)
        throw PreconditionError("cannot intersperse into an empty corpus");
    std::vector<std::pair<std::uint64_t, std::string>> inserts;
    inserts.reserve(extra);
    for (std::uint64_t k = 0; k < extra; ++k)
        inserts.emplace_back(uniform_below(rng, stats.gaps()), spec.label);
    std::stable_sort(inserts.begin(), inserts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    insert_at_gaps(in, out, inserts);
}

std::vector<ExperimentManifest> build_frequency_experiment(const std::filesystem::path& in,
                                                           const std::filesystem::path& out,
                                                           const FrequencyExperimentConfig& config) {
    corpus::WordCounts counts = corpus::count_words_file(in);
    std::vector<ReplacementTask> tasks;
    tasks.reserve(config.words.size());
    for (const std::string& word : config.words) {
        if (is_pseudoword_token(word))
            throw PreconditionError("refusing to replace existing pseudoword label: " + word);
        auto it = counts.find(word);
        std::uint64_t count = it == counts.end() ? 0 : it->second;
        if (count < config.frequency_floor)
            throw PreconditionError("word '" + word + "' occurs " + std::to_string(count) +
                                    " times, below the frequency floor of " +
                                    std::to_string(config.frequency_floor));
        TruncatedGeometric dist(config.p, config.n);
        tasks.emplace_back(word, uppercase_label_base(word), IndexSampler(dist),
                           derive_seed(config.seed, "frequency.replace:" + word));
        ReplacementTask& task = tasks.back();
        task.manifest.expected_counts.resize(static_cast<std::size_t>(config.n));
        for (int i = 1; i <= config.n; ++i) {
            double expected = static_cast<double>(count) * dist.pmf(i);
            task.manifest.expected_counts[static_cast<std::size_t>(i - 1)] = expected;
            if (expected < static_cast<double>(config.min_count))
                task.manifest.below_cutoff_indices.push_back(i);
        }
    }

    auto ifs = open_input(in);
    auto ofs = open_output(out);
    replace_many(ifs, ofs, tasks);
    ofs.close();

    std::vector<ExperimentManifest> manifests;
    manifests.reserve(tasks.size());
    for (auto& task : tasks) manifests.push_back(std::move(task.manifest));
    return manifests;
}

std::vector<ExperimentManifest> build_noise_experiment(const std::filesystem::path& in,
                                                       const std::filesystem::path& out,
                                                       const NoiseExperimentConfig& config) {
    const int n = config.n;
    LinearTaper taper(n);
    corpus::WordCounts counts = corpus::count_words_file(in);

    std::vector<ReplacementTask> tasks;
    std::vector<std::uint64_t> targets;
    for (const std::string& word : config.words) {
        if (is_pseudoword_token(word))
            throw PreconditionError("refusing to replace existing pseudoword label: " + word);
        auto it = counts.find(word);
        if (it == counts.end())
            throw PreconditionError("word '" + word + "' not present in corpus");
        tasks.emplace_back(word, uppercase_label_base(word), IndexSampler(taper),
                           derive_seed(config.seed, "noise.replace:" + word));
        // every index tops up to the same final frequency, 2F/n
        targets.push_back(round_half_even(2.0 * static_cast<double>(it->second) / n));
    }

    std::filesystem::path tmp = out;
    tmp += ".replaced.tmp";
    PassStats stats;
    {
        auto ifs = open_input(in);
        auto ofs = open_output(tmp);
        stats = replace_many(ifs, ofs, tasks);
    }

    std::vector<std::pair<std::string, std::uint64_t>> insertions;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        ExperimentManifest& m = tasks[t].manifest;
        m.noise_proportions.resize(static_cast<std::size_t>(n));
        m.expected_counts.assign(static_cast<std::size_t>(n), static_cast<double>(targets[t]));
        for (int i = 1; i <= n; ++i) {
            auto idx = static_cast<std::size_t>(i - 1);
            m.noise_proportions[idx] = noise_proportion(n, i);
            if (m.replaced_counts[idx] > targets[t]) {
                m.excess_indices.push_back(i);
                m.warnings.push_back("index " + std::to_string(i) + " replaced " +
                                     std::to_string(m.replaced_counts[idx]) +
                                     " times, above the top-up target " +
                                     std::to_string(targets[t]));
                continue;
            }
            m.interspersed_counts[idx] = targets[t] - m.replaced_counts[idx];
            if (m.interspersed_counts[idx] > 0)
                insertions.emplace_back(m.labels[idx], m.interspersed_counts[idx]);
        }
    }

    {
        auto ifs = open_input(tmp);
        auto ofs = open_output(out);
        auto inserts = draw_positions(insertions, stats.gaps(), config.seed, "noise.intersperse:");
        insert_at_gaps(ifs, ofs, inserts);
    }
    std::filesystem::remove(tmp);

    std::vector<ExperimentManifest> manifests;
    manifests.reserve(tasks.size());
    for (auto& task : tasks) manifests.push_back(std::move(task.manifest));
    return manifests;
}

std::vector<ExperimentManifest> build_void_experiment(const std::filesystem::path& in,
                                                      const std::filesystem::path& out,
                                                      const VoidExperimentConfig& config) {
    std::filesystem::path tmp = out;
    tmp += ".void.tmp";
    std::uint64_t inserted;
    {
        auto ifs = open_input(in);
        auto ofs = open_output(tmp);
        Rng rng = make_rng(config.seed, "void.intersperse:" + config.spec.label);
        PassStats stats = count_pass(ifs);
        rewind(ifs);
        inserted = void_insert_count(stats.tokens, config.spec.relative_frequency);
        if (inserted > 0 && stats.gaps() == 0)
            throw PreconditionError("cannot intersperse into an empty corpus");
        std::vector<std::pair<std::uint64_t, std::string>> inserts;
        inserts.reserve(inserted);
        for (std::uint64_t k = 0; k < inserted; ++k)
            inserts.emplace_back(uniform_below(rng, stats.gaps()), config.spec.label);
        std::stable_sort(inserts.begin(), inserts.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        insert_at_gaps(ifs, ofs, inserts);
    }

    TruncatedGeometric dist(config.p, config.n);
    std::vector<ReplacementTask> tasks;
    tasks.emplace_back(config.spec.label, config.spec.label, IndexSampler(dist),
                       derive_seed(config.seed, "void.replace:" + config.spec.label));
    ReplacementTask& task = tasks.back();
    task.manifest.expected_counts.resize(static_cast<std::size_t>(config.n));
    for (int i = 1; i <= config.n; ++i) {
        double expected = static_cast<double>(inserted) * dist.pmf(i);
        task.manifest.expected_counts[static_cast<std::size_t>(i - 1)] = expected;
        if (expected < static_cast<double>(config.min_count))
            task.manifest.below_cutoff_indices.push_back(i);
    }
    {
        auto ifs = open_input(tmp);
        auto ofs = open_output(out);
        replace_many(ifs, ofs, tasks);
    }
    std::filesystem::remove(tmp);

    std::vector<ExperimentManifest> manifests;
    manifests.push_back(std::move(task.manifest));
    return manifests;
}

std::vector<ExperimentManifest> mix_words(const std::filesystem::path& in,
                                          const std::filesystem::path& out,
                                          const MixExperimentConfig& config) {
    const int n = config.n;
    LinearTaper taper(n);
    corpus::WordCounts counts = corpus::count_words_file(in);
    for (const std::string& word : {config.word_a, config.word_b}) {
        if (is_pseudoword_token(word))
            throw PreconditionError("refusing to replace existing pseudoword label: " + word);
        if (counts.find(word) == counts.end())
            throw PreconditionError("word '" + word + "' not present in corpus");
    }
    if (config.word_a == config.word_b)
        throw PreconditionError("mixing requires two distinct words");

    std::uint64_t count_a = counts[config.word_a];
    std::uint64_t count_b = counts[config.word_b];
    const std::uint64_t equal_count = std::min(count_a, count_b);
    const std::string& downsampled = count_a > count_b ? config.word_a : config.word_b;
    const std::uint64_t downsampled_from = std::max(count_a, count_b);

    // equalize the two frequencies by deleting random occurrences of the
    // more frequent word
    std::filesystem::path tmp = out;
    tmp += ".mix.tmp";
    const std::filesystem::path* replace_input = &in;
    if (count_a != count_b) {
        auto ifs = open_input(in);
        auto ofs = open_output(tmp);
        Rng rng = make_rng(config.seed, "mix.downsample:" + downsampled);
        std::uint64_t keep_left = equal_count;
        std::uint64_t pool_left = downsampled_from;
        std::string line, token, output;
        while (std::getline(ifs, line)) {
            output.clear();
            bool first = true;
            for (std::string_view sv : corpus::split_tokens(line)) {
                token.assign(sv);
                if (token == downsampled) {
                    // sequential sampling keeps exactly equal_count occurrences
                    bool keep = uniform_below(rng, pool_left) < keep_left;
                    --pool_left;
                    if (!keep) continue;
                    --keep_left;
                }
                if (!first) output.push_back(' ');
                first = false;
                output.append(sv);
            }
            if (!output.empty()) {
                output.push_back('\n');
                ofs.write(output.data(), static_cast<std::streamsize>(output.size()));
            }
        }
        replace_input = &tmp;
    }

    const std::string label_base = uppercase_label_base(config.word_a) + "-" +
                                   uppercase_label_base(config.word_b) + "-MIX";
    std::vector<ReplacementTask> tasks;
    tasks.emplace_back(config.word_a, label_base, IndexSampler(taper),
                       derive_seed(config.seed, "mix.replace:" + config.word_a));
    tasks.emplace_back(config.word_b, label_base, IndexSampler::reversed(taper),
                       derive_seed(config.seed, "mix.replace:" + config.word_b));
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        ExperimentManifest& m = tasks[t].manifest;
        m.noise_proportions.resize(static_cast<std::size_t>(n));
        m.expected_counts.resize(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            auto idx = static_cast<std::size_t>(i - 1);
            m.noise_proportions[idx] = noise_proportion(n, i);  // share of word_b contexts
            double pmf = t == 0 ? taper.pmf(i) : taper.pmf(n + 1 - i);
            m.expected_counts[idx] = static_cast<double>(equal_count) * pmf;
        }
    }
    if (downsampled_from != equal_count) {
        auto& m = downsampled == config.word_a ? tasks[0].manifest : tasks[1].manifest;
        m.warnings.push_back("down-sampled from " + std::to_string(downsampled_from) + " to " +
                             std::to_string(equal_count) + " occurrences");
    }

    {
        auto ifs = open_input(*replace_input);
        auto ofs = open_output(out);
        replace_many(ifs, ofs, tasks);
    }
    if (replace_input == &tmp) std::filesystem::remove(tmp);

    std::vector<ExperimentManifest> manifests;
    for (auto& task : tasks) manifests.push_back(std::move(task.manifest));
    return manifests;
}

void write_manifests(const std::filesystem::path& path, const std::string& kind,
                     std::uint64_t seed, const std::vector<ExperimentManifest>& manifests) {
    nlohmann::json doc;
    doc["kind"] = kind;
    doc["seed"] = seed;
    doc["manifests"] = nlohmann::json::array();
    for (const auto& m : manifests) {
        nlohmann::json j;
        j["base_word"] = m.base_word;
        j["labels"] = m.labels;
        j["replaced_counts"] = m.replaced_counts;
        j["interspersed_counts"] = m.interspersed_counts;
        j["noise_proportions"] = m.noise_proportions;
        j["expected_counts"] = m.expected_counts;
        j["seed"] = m.rng_seed;
        j["below_cutoff_indices"] = m.below_cutoff_indices;
        j["excess_indices"] = m.excess_indices;
        j["warnings"] = m.warnings;
        doc["manifests"].push_back(std::move(j));
    }
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failure: " + path.string());
}

ManifestFile read_manifests(const std::filesystem::path& path) {
    auto in = open_input(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest file " + path.string() + ": " + e.what());
    }
    ManifestFile file;
    try {
        file.kind = doc.at("kind").get<std::string>();
        file.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& j : doc.at("manifests")) {
            ExperimentManifest m;
            m.base_word = j.at("base_word").get<std::string>();
            m.labels = j.at("labels").get<std::vector<std::string>>();
            m.replaced_counts = j.at("replaced_counts").get<std::vector<std::uint64_t>>();
            m.interspersed_counts = j.at("interspersed_counts").get<std::vector<std::uint64_t>>();
            m.noise_proportions = j.value("noise_proportions", std::vector<double>{});
            m.expected_counts = j.value("expected_counts", std::vector<double>{});
            m.rng_seed = j.value("seed", std::uint64_t{0});
            m.below_cutoff_indices = j.value("below_cutoff_indices", std::vector<int>{});
            m.excess_indices = j.value("excess_indices", std::vector<int>{});
            m.warnings = j.value("warnings", std::vector<std::string>{});
            file.manifests.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("manifest file " + path.string() + " missing fields: " + e.what());
    }
    return file;
}

}  // namespace embexp::pseudoword
