#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ionchain {

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

inline Interval wilson(uint64_t k, uint64_t n, double z = 1.96) {
  if (n == 0) return {0.0, 1.0};
  double p = double(k) / double(n);
  double z2n = z * z / double(n);
  double denom = 1.0 + z2n;
  double center = (p + z2n / 2.0) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / double(n) + z2n / (4.0 * double(n))) / denom;
  double lo = center - half, hi = center + half;
  return {lo < 0 ? 0 : lo, hi > 1 ? 1 : hi};
}

inline double binomialSigma(uint64_t k, uint64_t n) {
  if (n == 0) return 0.0;
  double p = double(k) / double(n);
  return std::sqrt(p * (1.0 - p) / double(n));
}

// P(K = k) for k = 0..kMax under independent Bernoulli trials
inline std::vector<double> poissonBinomial(const std::vector<double>& ps, int kMax) {
  std::vector<long double> acc(size_t(kMax) + 1, 0.0L);
  acc[0] = 1.0L;
  for (double p : ps) {
    for (int k = kMax; k > 0; --k) acc[k] = acc[k] * (1.0L - p) + acc[k - 1] * p;
    acc[0] *= 1.0L - p;
  }
  std::vector<double> out(acc.size());
  for (size_t i = 0; i < acc.size(); ++i) out[i] = double(acc[i]);
  return out;
}

}  // namespace ionchain
