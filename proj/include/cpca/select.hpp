#pragma once

#include <cstddef>
#include <vector>

#include "cpca/matrix.hpp"

namespace cpca {

// Eigenvalue-ratio choice of the number of components: the index
// maximizing lambda_i / lambda_{i+1} over 1 <= i <= R, ties to the
// smallest i. A zero successor makes the ratio +inf and wins outright.
struct RatioSelection {
  std::size_t count = 0;
  Vector ratios;              // audit trail, ratios for i = 1..R
  bool no_spike = false;      // no ratio reached kSpikeRatio
  std::vector<std::size_t> tiers;  // per-pass counts (iterative variant)
};

// A ratio cliff must clear this factor to count as a spike.
inline constexpr double kSpikeRatio = 1.5;

RatioSelection ratio_select_detailed(const Vector& eigenvalues, std::size_t cap);
std::size_t ratio_select(const Vector& eigenvalues, std::size_t cap);

// Bulk-top estimate from the trailing half of the spectrum: three times
// its largest entry (and at least twice its median). Eigenvalues below
// this level are treated as bulk; consecutive-ratio cliffs inside the
// bulk edge otherwise pass for tiers on short spectra.
double trailing_noise_floor(const Vector& eigenvalues);

// Tier-stripping extension for spectra whose blocks sit on different
// variance scales inside one cluster: select, drop the leading block,
// repeat while the next leading eigenvalue clears the bulk floor and the
// pass shows a ratio cliff of at least `spike_min`. The cap applies per
// pass, so the total may exceed it.
RatioSelection iterative_ratio_select_detailed(const Vector& eigenvalues, std::size_t cap,
                                               std::size_t max_tiers = 8,
                                               double spike_min = kSpikeRatio);
std::size_t iterative_ratio_select(const Vector& eigenvalues, std::size_t cap,
                                   std::size_t max_tiers = 8, double spike_min = kSpikeRatio);

// Default cap floor(min(n, p) / 2), never below 1. Suits condensed
// spectra (per-cluster panels, stacked score panels).
std::size_t default_ratio_cap(std::size_t n, std::size_t p);


}  // namespace cpca
