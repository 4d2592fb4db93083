// Independent oracles for expected values: plain recurrence unrolling and
// brute-force enumeration, written against the algorithm descriptions and
// never against the implementation under test.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace oracles {

// merge cost: one comparison per step, recursing on whichever side shrank.
// merge_c(k, l) = 0 when either side is empty, else
//                 1 + max(merge_c(k-1, l), merge_c(k, l-1)).
inline std::uint64_t merge_cost(std::uint64_t k, std::uint64_t l) {
  if (k == 0 || l == 0) return 0;
  return k + l - 1;  // closed form of the recurrence above
}

// msort cost via the split/merge recurrence with the merge cost above:
// T(n) = merge_c(ceil(n/2), floor(n/2)) + T(ceil(n/2)) + T(floor(n/2)).
inline std::uint64_t msort_cost(std::uint64_t n) {
  static std::map<std::uint64_t, std::uint64_t> memo;
  if (n <= 1) return 0;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::uint64_t hi = (n + 1) / 2, lo = n / 2;
  std::uint64_t r = merge_cost(hi, lo) + msort_cost(hi) + msort_cost(lo);
  memo[n] = r;
  return r;
}

// The looser textbook unrolling n + T(ceil(n/2)) + T(floor(n/2)), i.e. the
// recurrence with merge charged k+l comparisons.
inline std::uint64_t msort_cost_loose(std::uint64_t n) {
  static std::map<std::uint64_t, std::uint64_t> memo;
  if (n <= 1) return 0;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::uint64_t r = n + msort_cost_loose((n + 1) / 2) + msort_cost_loose(n / 2);
  memo[n] = r;
  return r;
}

// Worst-case quick sort with a powerset-precise partition:
// q(n) = (n-1) + max over k+l = n-1 of q(k) + q(l).
inline std::uint64_t qsort_pow_cost(std::uint64_t n) {
  static std::map<std::uint64_t, std::uint64_t> memo;
  if (n == 0) return 0;
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  std::uint64_t best = 0;
  for (std::uint64_t k = 0; k <= n - 1; ++k) {
    std::uint64_t v = qsort_pow_cost(k) + qsort_pow_cost(n - 1 - k);
    best = std::max(best, v);
  }
  std::uint64_t r = (n - 1) + best;
  memo[n] = r;
  return r;
}

// Cartesian-mode quick sort: the partition bound is (n-1, n-1), so both
// recursive calls see size n-1.
inline std::uint64_t qsort_cart_cost(std::uint64_t n) {
  if (n == 0 || n == 1) return 0;
  return (n - 1) + 2 * qsort_cart_cost(n - 1);
}

inline std::uint64_t ceil_div2(std::uint64_t n) { return (n + 1) / 2; }
inline std::uint64_t floor_div2(std::uint64_t n) { return n / 2; }

inline std::uint64_t ceil_log2(std::uint64_t n) {
  std::uint64_t k = 0, p = 1;
  while (p < n) {
    p *= 2;
    ++k;
  }
  return k;
}

}  // namespace oracles
