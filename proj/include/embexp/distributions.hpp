#pragma once

#include <variant>
#include <vector>

#include "embexp/rng.hpp"

namespace embexp::pseudoword {

// Truncated geometric index distribution:
//   P(i) = p^(i-1) * (1-p) / (1 - p^n),  1 <= i <= n.
// Consecutive probabilities decay by the factor p.
struct TruncatedGeometric {
    double p;
    int n;

    TruncatedGeometric(double p, int n);
    double pmf(int i) const;
};

// Linear taper index distribution:
//   P(i) = 2(n-i) / (n(n-1)),  1 <= i <= n.
// Probabilities fall by the constant step 2/(n(n-1)) and reach 0 at i = n.
struct LinearTaper {
    int n;

    explicit LinearTaper(int n);
    double pmf(int i) const;
};

using DistributionSpec = std::variant<TruncatedGeometric, LinearTaper>;

double pmf_truncated_geometric(double p, int n, int i);
double pmf_linear(int n, int i);

// Fraction of a noise-experiment pseudoword's occurrences that come from the
// noise distribution: (i-1)/(n-1), evenly spaced over [0, 1].
double noise_proportion(int n, int i);

// Draws indices 1..n by inverse CDF over an exact pmf table.
class IndexSampler {
  public:
    explicit IndexSampler(std::vector<double> pmf);
    IndexSampler(const TruncatedGeometric& dist);
    IndexSampler(const LinearTaper& dist);
    IndexSampler(const DistributionSpec& dist);

    // Taper read back to front: P(i) = pmf of (n+1-i).  Used by the
    // two-word mixing experiment.
    static IndexSampler reversed(const LinearTaper& dist);

    int sample(Rng& rng) const;
    int n() const { return static_cast<int>(pmf_.size()); }
    double pmf(int i) const;

  private:
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

inline int sample_index(const IndexSampler& dist, Rng& rng) { return dist.sample(rng); }

}  // namespace embexp::pseudoword
