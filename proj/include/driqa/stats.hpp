#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "driqa/errors.hpp"
#include "driqa/logistic.hpp"

namespace driqa {

inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("pearson: need equal lengths >= 2");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateInput("pearson: constant input");
  return sab / std::sqrt(saa * sbb);
}

/// 1-based ranks; ties share the average of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline void check_corr_inputs(std::span<const double> pred, std::span<const double> target,
                              const char* who) {
  if (pred.size() != target.size())
    throw DomainError(std::string(who) + ": lists differ in length");
  if (pred.size() < 4) throw DegenerateInput(std::string(who) + ": need at least 4 samples");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(pred) || constant(target))
    throw DegenerateInput(std::string(who) + ": constant score list");
}

/// Spearman rank-order correlation.
inline double srcc(std::span<const double> pred, std::span<const double> target) {
  check_corr_inputs(pred, target, "srcc");
  const auto ra = average_ranks(pred), rb = average_ranks(target);
  return pearson(ra, rb);
}

/// Pearson correlation after mapping predictions onto the target scale with
/// the five-parameter logistic.
inline double plcc(std::span<const double> pred, std::span<const double> target) {
  check_corr_inputs(pred, target, "plcc");
  const auto fit = logistic_detail::fit(pred, target);
  std::vector<double> mapped(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) mapped[i] = fit.params(pred[i]);
  try {
    return pearson(mapped, target);
  } catch (const DegenerateInput&) {
    return 0.0;
  }
}

}  // namespace driqa
