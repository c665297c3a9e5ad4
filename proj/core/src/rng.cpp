#include "elicit/rng.hpp"

#include <sstream>

#include "elicit/error.hpp"

namespace elicit {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (std::uint64_t p : parts) {
    h = splitmix64(h ^ splitmix64(p));
  }
  return h;
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) {
    throw Error(Errc::kConfigInvalid, "uniform_index over an empty range");
  }
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
  std::uint64_t draw = rng();
  while (draw > limit) {
    draw = rng();
  }
  return static_cast<std::size_t>(draw % bound);
}

bool bernoulli(Rng& rng, double p) {
  return uniform01(rng) < p;
}

int binomial(Rng& rng, int n, double p) {
  int k = 0;
  for (int i = 0; i < n; ++i) {
    k += bernoulli(rng, p) ? 1 : 0;
  }
  return k;
}

std::size_t sample_discrete(Rng& rng, std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    total += p;
  }
  if (probs.empty() || !(total > 0.0)) {
    throw Error(Errc::kConfigInvalid, "sample_discrete needs positive mass");
  }
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) {
      continue;
    }
    acc += probs[i];
    last_positive = i;
    if (u < acc) {
      return i;
    }
  }
  return last_positive;
}

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void restore_rng_state(Rng& rng, const std::string& state) {
  std::istringstream is(state);
  is >> rng;
  if (!is) {
    throw Error(Errc::kMalformedCheckpoint, "unreadable RNG state");
  }
}

}  // namespace elicit
