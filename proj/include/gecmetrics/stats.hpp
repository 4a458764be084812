#pragma once

#include <optional>
#include <vector>

namespace gecmetrics {

// Fractional ranks, 1-based, ascending (rank 1 = smallest value); tied
// values share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

// All three return nullopt when the statistic is undefined for the input
// (fewer than 2 points, zero variance, or an all-tied side for tau).
std::optional<double> pearson(const std::vector<double>& x,
                              const std::vector<double>& y);

// Pearson correlation of the rank-transformed vectors.
std::optional<double> spearman(const std::vector<double>& x,
                               const std::vector<double>& y);

// Kendall tau-b: (concordant - discordant) / sqrt((n0-n1)(n0-n2)) with the
// usual tie corrections.
std::optional<double> kendall_tau(const std::vector<double>& x,
                                  const std::vector<double>& y);

}  // namespace gecmetrics
