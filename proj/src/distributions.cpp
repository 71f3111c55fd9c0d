#include "embexp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace embexp::pseudoword {

namespace {

void check_index(int n, int i) {
    if (i < 1 || i > n)
        throw std::domain_error("index " + std::to_string(i) + " outside 1.." + std::to_string(n));
}

}  // namespace

TruncatedGeometric::TruncatedGeometric(double p, int n) : p(p), n(n) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0,1)");
    if (n < 1) throw std::domain_error("n must be positive");
}

double TruncatedGeometric::pmf(int i) const {
    check_index(n, i);
    return std::pow(p, i - 1) * (1.0 - p) / (1.0 - std::pow(p, n));
}

LinearTaper::LinearTaper(int n) : n(n) {
    if (n < 2) throw std::domain_error("linear taper requires n >= 2");
}

double LinearTaper::pmf(int i) const {
    check_index(n, i);
    return 2.0 * (n - i) / (static_cast<double>(n) * (n - 1));
}

double pmf_truncated_geometric(double p, int n, int i) { return TruncatedGeometric(p, n).pmf(i); }

double pmf_linear(int n, int i) { return LinearTaper(n).pmf(i); }

double noise_proportion(int n, int i) {
    if (n < 2) throw std::domain_error("noise proportion requires n >= 2");
    check_index(n, i);
    return static_cast<double>(i - 1) / (n - 1);
}

IndexSampler::IndexSampler(std::vector<double> pmf) : pmf_(std::move(pmf)) {
    if (pmf_.empty()) throw std::domain_error("empty pmf");
    cdf_.resize(pmf_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        acc += pmf_[i];
        cdf_[i] = acc;
    }
    cdf_.back() = 1.0;  // guard against rounding drift at the top
}

namespace {

std::vector<double> tabulate(int n, auto&& pmf) {
    std::vector<double> table(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) table[static_cast<std::size_t>(i - 1)] = pmf(i);
    return table;
}

}  // namespace

IndexSampler::IndexSampler(const TruncatedGeometric& dist)
    : IndexSampler(tabulate(dist.n, [&](int i) { return dist.pmf(i); })) {}

IndexSampler::IndexSampler(const LinearTaper& dist)
    : IndexSampler(tabulate(dist.n, [&](int i) { return dist.pmf(i); })) {}

IndexSampler::IndexSampler(const DistributionSpec& dist)
    : IndexSampler(std::visit([](const auto& d) { return IndexSampler(d); }, dist)) {}

IndexSampler IndexSampler::reversed(const LinearTaper& dist) {
    return IndexSampler(tabulate(dist.n, [&](int i) { return dist.pmf(dist.n + 1 - i); }));
}

int IndexSampler::sample(Rng& rng) const {
    double u = uniform_unit(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(it - cdf_.begin()) + 1;
}

double IndexSampler::pmf(int i) const {
    check_index(n(), i);
    return pmf_[static_cast<std::size_t>(i - 1)];
}

}  // namespace embexp::pseudoword
