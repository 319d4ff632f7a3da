#include "cpca/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpca/pca.hpp"

namespace cpca {

namespace {

void check_spectrum(const Vector& ev, std::size_t cap) {
  if (cap < 1) throw InvalidInput("ratio_select: cap must be >= 1");
  if (ev.size() < cap + 1) throw InvalidInput("ratio_select: need at least cap+1 eigenvalues");
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (!(ev[i] >= 0.0)) throw InvalidInput("ratio_select: eigenvalues must be non-negative");
    if (i > 0 && ev[i] > ev[i - 1] * (1.0 + 1e-9) + 1e-12) {
      throw InvalidInput("ratio_select: eigenvalues must be non-increasing");
    }
  }
}

}  // namespace

std::size_t default_ratio_cap(std::size_t n, std::size_t p) {
  return std::max<std::size_t>(1, std::min(n, p) / 2);
}

RatioSelection ratio_select_detailed(const Vector& ev, std::size_t cap) {
  check_spectrum(ev, cap);
  RatioSelection out;
  out.ratios.resize(cap);
  std::size_t best = 0;
  double best_ratio = -1.0;
  for (std::size_t i = 0; i < cap; ++i) {
    double r;
    if (ev[i + 1] == 0.0) {
      r = std::numeric_limits<double>::infinity();
    } else {
      r = ev[i] / ev[i + 1];
    }
    out.ratios[i] = r;
    if (r > best_ratio) {
      best_ratio = r;
      best = i + 1;  // ties stay at the smallest i
    }
  }
  out.count = best;
  out.no_spike = !(best_ratio >= kSpikeRatio);
  out.tiers = {best};
  return out;
}

std::size_t ratio_select(const Vector& ev, std::size_t cap) {
  return ratio_select_detailed(ev, cap).count;
}

double trailing_noise_floor(const Vector& ev) {
  if (ev.empty()) return 0.0;
  const Vector tail(ev.begin() + ev.size() / 2, ev.end());
  const std::size_t m = tail.size();
  const double median = (m % 2 == 1) ? tail[m / 2] : 0.5 * (tail[m / 2 - 1] + tail[m / 2]);
  return std::max(2.0 * median, 3.0 * tail.front());
}

RatioSelection iterative_ratio_select_detailed(const Vector& ev, std::size_t cap,
                                               std::size_t max_tiers, double spike_min) {
  check_spectrum(ev, cap);
  const double floor_level = trailing_noise_floor(ev);

  RatioSelection out;
  Vector remaining = ev;
  std::size_t total = 0;
  for (std::size_t tier = 0; tier < std::max<std::size_t>(1, max_tiers); ++tier) {
    if (remaining.size() < 2) break;
    const std::size_t pass_cap = std::min(cap, remaining.size() - 1);
    RatioSelection pass = ratio_select_detailed(remaining, pass_cap);
    double pass_best = 0.0;
    for (double r : pass.ratios) pass_best = std::max(pass_best, r);
    if (tier == 0) {
      out.ratios = pass.ratios;
      out.no_spike = pass.no_spike;
    } else if (!(pass_best >= spike_min)) {
      // A later pass without a clear ratio cliff is looking at the bulk
      // (its top can sit above the trailing-half floor on wide spectra);
      // it selects no tier.
      break;
    }
    total += pass.count;
    out.tiers.push_back(pass.count);
    remaining.erase(remaining.begin(), remaining.begin() + static_cast<std::ptrdiff_t>(pass.count));
    if (remaining.empty() || remaining.front() <= floor_level) break;
  }
  out.count = total;
  return out;
}

std::size_t iterative_ratio_select(const Vector& ev, std::size_t cap, std::size_t max_tiers,
                                   double spike_min) {
  return iterative_ratio_select_detailed(ev, cap, max_tiers, spike_min).count;
}

}  // namespace cpca
