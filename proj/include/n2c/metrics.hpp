#pragma once

#include <array>
#include <span>
#include <vector>

#include "n2c/errors.hpp"

namespace n2c::eval {

// RMSE = sqrt((1/k) sum (y - yhat)^2), MAE = (1/k) sum |y - yhat|,
// pooled over every element handed in.
double rmse(std::span<const double> y, std::span<const double> yhat);
double mae(std::span<const double> y, std::span<const double> yhat);

struct TripleMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::array<double, 3> rmse_channel{};
    std::array<double, 3> mae_channel{};
    std::size_t count = 0;  // number of triples
};

// Pooled and per-channel metrics over aligned triple sequences.
TripleMetrics triple_metrics(const std::vector<std::array<double, 3>>& y,
                             const std::vector<std::array<double, 3>>& yhat);

}  // namespace n2c::eval
