#include "embexp/cbow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "embexp/errors.hpp"
#include "embexp/vec_ops.hpp"

namespace embexp::cbow {

namespace {

// sigmoid and -log(sigmoid) from a single expf; stable at any |f|
struct Logistic {
    float sigma;
    double neg_log;  // -log(sigma)
};

inline Logistic logistic(float f) {
    if (f >= 0.0f) {
        float t = std::exp(-f);
        return {1.0f / (1.0f + t), std::log1p(static_cast<double>(t))};
    }
    float t = std::exp(f);
    return {t / (1.0f + t), std::log1p(static_cast<double>(t)) - static_cast<double>(f)};
}

constexpr int kMaxNegativeRedraws = 100;
constexpr std::uint64_t kLearningRateBatch = 10'000;
constexpr std::uint64_t kProgressInterval = 1'000'000;

}  // namespace

void TrainingConfig::validate() const {
    if (dimension < 1) throw ConfigError("dimension must be positive");
    if (window < 1) throw ConfigError("window must be positive");
    if (negatives < 1) throw ConfigError("negatives must be positive");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (min_count < 1) throw ConfigError("min_count must be positive");
    if (!(initial_learning_rate > 0.0f)) throw ConfigError("learning rate must be positive");
    if (!(learning_rate_floor > 0.0f) || learning_rate_floor > initial_learning_rate)
        throw ConfigError("learning-rate floor must lie in (0, initial rate]");
    if (subsampling) throw ConfigError("subsampling is not supported; disable it");
    if (workers < 1) throw ConfigError("workers must be positive");
    if (unigram_table_size < 1) throw ConfigError("unigram table size must be positive");
    if (!(unigram_power > 0.0)) throw ConfigError("unigram power must be positive");
}

UnigramTable::UnigramTable(const corpus::Vocabulary& vocab, double power, std::size_t size) {
    if (vocab.empty()) throw ConfigError("cannot build a unigram table from an empty vocabulary");
    if (size == 0) throw ConfigError("unigram table size must be positive");
    table_.resize(size);
    double total = 0.0;
    for (const auto& e : vocab.entries()) total += std::pow(static_cast<double>(e.count), power);
    const auto vocab_size = static_cast<std::int32_t>(vocab.size());
    std::int32_t word = 0;
    double cum = std::pow(static_cast<double>(vocab.entry(0).count), power) / total;
    for (std::size_t j = 0; j < size; ++j) {
        table_[j] = word;
        if (static_cast<double>(j + 1) / static_cast<double>(size) > cum && word + 1 < vocab_size) {
            ++word;
            cum += std::pow(static_cast<double>(vocab.entry(word).count), power) / total;
        }
    }
}

std::int32_t UnigramTable::draw(Rng& rng) const {
    return table_[uniform_below(rng, table_.size())];
}

std::span<float> EmbeddingModel::row(Layer layer, std::int32_t ordinal) {
    auto& matrix = layer == Layer::syn0 ? syn0 : syn1neg;
    return std::span<float>(matrix.data() + static_cast<std::size_t>(ordinal) * dimension(),
                            static_cast<std::size_t>(dimension()));
}

std::span<const float> EmbeddingModel::row(Layer layer, std::int32_t ordinal) const {
    const auto& matrix = layer == Layer::syn0 ? syn0 : syn1neg;
    return std::span<const float>(matrix.data() + static_cast<std::size_t>(ordinal) * dimension(),
                                  static_cast<std::size_t>(dimension()));
}

EmbeddingModel init_model(corpus::Vocabulary vocab, const TrainingConfig& config) {
    config.validate();
    if (vocab.empty()) throw ConfigError("cannot initialize a model over an empty vocabulary");
    EmbeddingModel model{std::move(vocab), config, {}, {}};
    const std::size_t cells = model.vocab.size() * static_cast<std::size_t>(config.dimension);
    model.syn0.resize(cells);
    model.syn1neg.assign(cells, 0.0f);
    Rng rng = make_rng(config.seed, "init");
    const float inv_dim = 1.0f / static_cast<float>(config.dimension);
    for (std::size_t i = 0; i < cells; ++i)
        model.syn0[i] = (static_cast<float>(uniform_unit(rng)) - 0.5f) * inv_dim;
    return model;
}

double nce_loss(const EmbeddingModel& model, std::span<const std::int32_t> context_ids,
                std::int32_t target_id, std::span<const std::int32_t> negative_ids) {
    if (context_ids.empty()) throw std::domain_error("context must be non-empty");
    const int d = model.dimension();
    std::vector<double> h(static_cast<std::size_t>(d), 0.0);
    for (std::int32_t c : context_ids) {
        auto row = model.row(Layer::syn0, c);
        for (int j = 0; j < d; ++j) h[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
    }
    for (double& v : h) v /= static_cast<double>(context_ids.size());

    auto dot_with = [&](std::int32_t u) {
        auto row = model.row(Layer::syn1neg, u);
        double f = 0.0;
        for (int j = 0; j < d; ++j) f += h[static_cast<std::size_t>(j)] * row[static_cast<std::size_t>(j)];
        return f;
    };
    // -log s(x) = softplus(-x), computed stably
    auto softplus = [](double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };

    double loss = softplus(-dot_with(target_id));
    for (std::int32_t k : negative_ids) {
        if (k == target_id) throw std::domain_error("negative sample equals the target");
        loss += softplus(dot_with(k));
    }
    return loss;
}

double apply_gradient_step(EmbeddingModel& model, std::span<const std::int32_t> context_ids,
                           std::int32_t target_id, std::span<const std::int32_t> negative_ids,
                           float lr) {
    if (context_ids.empty()) throw std::domain_error("context must be non-empty");
    const int d = model.dimension();
    thread_local std::vector<float> h_buf, e_buf;
    h_buf.assign(static_cast<std::size_t>(d), 0.0f);
    e_buf.assign(static_cast<std::size_t>(d), 0.0f);
    float* h = h_buf.data();
    float* e = e_buf.data();

    for (std::int32_t c : context_ids)
        detail::add_f32(h, model.syn0.data() + static_cast<std::size_t>(c) * d, d);
    const float inv_cw = 1.0f / static_cast<float>(context_ids.size());
    for (int j = 0; j < d; ++j) h[j] *= inv_cw;

    double loss = 0.0;
    const int samples = static_cast<int>(negative_ids.size()) + 1;
    for (int k = 0; k < samples; ++k) {
        const bool positive = k == 0;
        const std::int32_t u = positive ? target_id : negative_ids[static_cast<std::size_t>(k - 1)];
        float* vu = model.syn1neg.data() + static_cast<std::size_t>(u) * d;
        const float f = detail::dot_f32(h, vu, d);
        const Logistic lg = logistic(f);
        // g = (label - sigma(f)) * lr
        const float g = ((positive ? 1.0f : 0.0f) - lg.sigma) * lr;
        loss += positive ? lg.neg_log : static_cast<double>(f) + lg.neg_log;  // -log s(-f)
        detail::axpy_f32(e, g, vu, d);
        detail::axpy_f32(vu, g, h, d);
    }
    for (std::int32_t c : context_ids)
        detail::add_f32(model.syn0.data() + static_cast<std::size_t>(c) * d, e, d);
    return loss;
}

double train_step(EmbeddingModel& model, std::span<const std::int32_t> context_ids,
                  std::int32_t target_id, const UnigramTable& table, float lr, Rng& rng) {
    const int negatives = model.config.negatives;
    thread_local std::vector<std::int32_t> negative_buf;
    negative_buf.clear();
    for (int k = 0; k < negatives; ++k) {
        std::int32_t u = target_id;
        for (int attempt = 0; attempt < kMaxNegativeRedraws && u == target_id; ++attempt)
            u = table.draw(rng);
        if (u == target_id) continue;  // table is degenerate; drop this sample
        negative_buf.push_back(u);
    }
    return apply_gradient_step(model, context_ids, target_id, negative_buf, lr);
}

TokenizedCorpus tokenize(std::istream& in, const corpus::Vocabulary& vocab) {
    TokenizedCorpus out;
    out.line_offsets.push_back(0);
    std::string line, token;
    while (std::getline(in, line)) {
        std::size_t before = out.ids.size();
        for (std::string_view sv : corpus::split_tokens(line)) {
            token.assign(sv);
            std::int32_t id = vocab.find(token);
            if (id >= 0) out.ids.push_back(id);
        }
        if (out.ids.size() > before) out.line_offsets.push_back(out.ids.size());
    }
    return out;
}

TokenizedCorpus tokenize_file(const std::filesystem::path& path, const corpus::Vocabulary& vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path.string());
    return tokenize(in, vocab);
}

double TrainStats::decile_mean_loss(int decile) const {
    auto d = static_cast<std::size_t>(decile);
    return decile_updates[d] == 0 ? 0.0 : decile_loss_sum[d] / static_cast<double>(decile_updates[d]);
}

namespace {

struct SharedTrainState {
    std::atomic<std::uint64_t> processed_tokens{0};
    std::uint64_t total_tokens = 0;  // ids count * epochs
    std::mutex stats_mutex;
    TrainStats stats;
    std::ostream* progress = nullptr;
    std::uint64_t next_progress_mark = kProgressInterval;
    double progress_loss_sum = 0.0;
    std::uint64_t progress_updates = 0;
};

float decayed_rate(const TrainingConfig& config, std::uint64_t processed, std::uint64_t total) {
    float rate = config.initial_learning_rate *
                 (1.0f - static_cast<float>(static_cast<double>(processed) /
                                            static_cast<double>(total + 1)));
    return std::max(rate, config.learning_rate_floor);
}

// One worker's pass over its share of lines for one epoch.
void train_lines(EmbeddingModel& model, const TokenizedCorpus& corpus, std::size_t line_begin,
                 std::size_t line_end, const UnigramTable& table, Rng& rng,
                 SharedTrainState& shared) {
    const TrainingConfig& config = model.config;
    const int window = config.window;
    std::vector<std::int32_t> context;
    context.reserve(static_cast<std::size_t>(2 * window));

    std::uint64_t batch_tokens = 0;
    std::uint64_t batch_updates = 0;
    double batch_loss = 0.0;
    float lr = decayed_rate(config, shared.processed_tokens.load(std::memory_order_relaxed),
                            shared.total_tokens);

    auto flush = [&] {
        std::uint64_t processed =
            shared.processed_tokens.fetch_add(batch_tokens, std::memory_order_relaxed) +
            batch_tokens;
        lr = decayed_rate(config, processed, shared.total_tokens);
        int decile = static_cast<int>(processed * 10 / (shared.total_tokens + 1));
        decile = std::min(decile, 9);
        {
            std::lock_guard<std::mutex> lock(shared.stats_mutex);
            shared.stats.decile_loss_sum[static_cast<std::size_t>(decile)] += batch_loss;
            shared.stats.decile_updates[static_cast<std::size_t>(decile)] += batch_updates;
            shared.stats.total_updates += batch_updates;
            shared.progress_loss_sum += batch_loss;
            shared.progress_updates += batch_updates;
            if (shared.progress && processed >= shared.next_progress_mark) {
                double mean_loss = shared.progress_updates
                                       ? shared.progress_loss_sum /
                                             static_cast<double>(shared.progress_updates)
                                       : 0.0;
                char buf[128];
                std::snprintf(buf, sizeof(buf), "progress tokens=%llu lr=%.6g loss=%.6g\n",
                              static_cast<unsigned long long>(processed), static_cast<double>(lr),
                              mean_loss);
                *shared.progress << buf << std::flush;
                while (shared.next_progress_mark <= processed)
                    shared.next_progress_mark += kProgressInterval;
                shared.progress_loss_sum = 0.0;
                shared.progress_updates = 0;
            }
        }
        batch_tokens = 0;
        batch_updates = 0;
        batch_loss = 0.0;
    };

    for (std::size_t l = line_begin; l < line_end; ++l) {
        const auto begin = static_cast<std::size_t>(corpus.line_offsets[l]);
        const auto end = static_cast<std::size_t>(corpus.line_offsets[l + 1]);
        for (std::size_t t = begin; t < end; ++t) {
            const int b = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(window)));
            context.clear();
            const std::size_t lo = t - begin >= static_cast<std::size_t>(b)
                                       ? t - static_cast<std::size_t>(b)
                                       : begin;
            const std::size_t hi = std::min(end, t + static_cast<std::size_t>(b) + 1);
            for (std::size_t c = lo; c < hi; ++c)
                if (c != t) context.push_back(corpus.ids[c]);
            ++batch_tokens;
            if (!context.empty()) {
                batch_loss += train_step(model, context, corpus.ids[t], table, lr, rng);
                ++batch_updates;
            }
            if (batch_tokens >= kLearningRateBatch) flush();
        }
    }
    if (batch_tokens > 0 || batch_updates > 0) flush();
}

void check_finite(const EmbeddingModel& model, int epoch) {
    for (const auto* matrix : {&model.syn0, &model.syn1neg})
        for (float v : *matrix)
            if (!std::isfinite(v))
                throw ConsistencyError("non-finite weight after epoch " + std::to_string(epoch));
}

}  // namespace

EmbeddingModel train(const TokenizedCorpus& corpus, const corpus::Vocabulary& vocab,
                     const TrainingConfig& config, TrainStats* stats, std::ostream* progress) {
    config.validate();
    if (corpus.ids.empty()) throw PreconditionError("corpus has no in-vocabulary tokens");

    EmbeddingModel model = init_model(vocab, config);
    if (config.epochs == 0) {
        if (stats) *stats = TrainStats{};
        return model;
    }

    UnigramTable table(vocab, config.unigram_power, config.unigram_table_size);

    SharedTrainState shared;
    shared.total_tokens = corpus.ids.size() * static_cast<std::uint64_t>(config.epochs);
    shared.progress = progress;

    const std::size_t lines = corpus.lines();
    const auto workers = static_cast<std::size_t>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(config.workers), lines));

    // contiguous line ranges balanced by token mass
    std::vector<std::size_t> boundaries(workers + 1, 0);
    boundaries[workers] = lines;
    for (std::size_t w = 1; w < workers; ++w) {
        const std::uint64_t want = corpus.ids.size() * w / workers;
        auto it = std::lower_bound(corpus.line_offsets.begin(), corpus.line_offsets.end(), want);
        boundaries[w] = static_cast<std::size_t>(it - corpus.line_offsets.begin());
    }

    std::vector<Rng> worker_rngs;
    for (std::size_t w = 0; w < workers; ++w)
        worker_rngs.push_back(make_rng(config.seed, "train.worker:" + std::to_string(w)));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (workers == 1) {
            train_lines(model, corpus, 0, lines, table, worker_rngs[0], shared);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w)
                threads.emplace_back(train_lines, std::ref(model), std::cref(corpus),
                                     boundaries[w], boundaries[w + 1], std::cref(table),
                                     std::ref(worker_rngs[w]), std::ref(shared));
            for (auto& t : threads) t.join();
        }
        check_finite(model, epoch);
    }
    if (stats) *stats = shared.stats;
    return model;
}

EmbeddingModel train_file(const std::filesystem::path& corpus_path,
                          const corpus::Vocabulary& vocab, const TrainingConfig& config,
                          TrainStats* stats, std::ostream* progress) {
    TokenizedCorpus corpus = tokenize_file(corpus_path, vocab);
    return train(corpus, vocab, config, stats, progress);
}

}  // namespace embexp::cbow
