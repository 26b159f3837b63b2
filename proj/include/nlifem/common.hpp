#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlifem {

inline constexpr double kGeomTol = 1e-12;

struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw config_error(msg);
}

inline int thread_count() {
  const char* env = std::getenv("NLIFEM_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n > 0 ? n : 1;
}

// Sorted unique copy with a tolerance for near-duplicates.
inline std::vector<double> sorted_unique(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  return out;
}

// Splits [lo,hi] at the given interior cut points, returns panel edges.
inline std::vector<double> split_interval(double lo, double hi,
                                          const std::vector<double>& cuts,
                                          double tol) {
  std::vector<double> edges;
  edges.push_back(lo);
  for (double c : cuts) {
    if (c > lo + tol && c < hi - tol) edges.push_back(c);
  }
  edges.push_back(hi);
  return sorted_unique(std::move(edges), tol);
}

inline double overlap_len(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// FNV-1a, used to fingerprint configurations in run manifests.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace nlifem
