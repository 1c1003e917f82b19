#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ecotab {

// Seeded generator with sampling routines built only on the raw 64-bit
// stream, so runs are reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Index in [0, probs.size()) by inverse CDF.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // n independent categorical draws tallied into counts.
  std::vector<int> multinomial(int n, std::span<const double> probs) {
    std::vector<int> counts(probs.size(), 0);
    for (int t = 0; t < n; ++t) ++counts[static_cast<std::size_t>(categorical(probs))];
    return counts;
  }

  // Dirichlet(1, ..., 1): normalized unit-rate exponentials.
  std::vector<double> dirichlet_flat(int k) {
    std::vector<double> w(static_cast<std::size_t>(k));
    double s = 0.0;
    for (double& x : w) {
      x = -std::log(1.0 - uniform());
      s += x;
    }
    if (s <= 0.0) {
      for (double& x : w) x = 1.0 / k;
      return w;
    }
    for (double& x : w) x /= s;
    return w;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ecotab
