#include "n2c/metrics.hpp"

#include <cmath>

namespace n2c::eval {

namespace {

void check(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw ShapeMismatch("metrics: shape mismatch");
    if (y.empty()) throw Error("EmptyInput: metrics over zero elements");
}

}  // namespace

double rmse(std::span<const double> y, std::span<const double> yhat) {
    check(y, yhat);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(y.size()));
}

double mae(std::span<const double> y, std::span<const double> yhat) {
    check(y, yhat);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::abs(y[i] - yhat[i]);
    return acc / static_cast<double>(y.size());
}

TripleMetrics triple_metrics(const std::vector<std::array<double, 3>>& y,
                             const std::vector<std::array<double, 3>>& yhat) {
    if (y.size() != yhat.size()) throw ShapeMismatch("triple_metrics: shape mismatch");
    if (y.empty()) throw Error("EmptyInput: triple_metrics over zero triples");

    TripleMetrics m;
    m.count = y.size();
    std::array<double, 3> sq{}, ab{};
    for (std::size_t i = 0; i < y.size(); ++i)
        for (int c = 0; c < 3; ++c) {
            const double d = y[i][static_cast<std::size_t>(c)] - yhat[i][static_cast<std::size_t>(c)];
            sq[static_cast<std::size_t>(c)] += d * d;
            ab[static_cast<std::size_t>(c)] += std::abs(d);
        }
    const double n = static_cast<double>(y.size());
    double sq_all = 0.0, ab_all = 0.0;
    for (int c = 0; c < 3; ++c) {
        m.rmse_channel[static_cast<std::size_t>(c)] = std::sqrt(sq[static_cast<std::size_t>(c)] / n);
        m.mae_channel[static_cast<std::size_t>(c)] = ab[static_cast<std::size_t>(c)] / n;
        sq_all += sq[static_cast<std::size_t>(c)];
        ab_all += ab[static_cast<std::size_t>(c)];
    }
    m.rmse = std::sqrt(sq_all / (3.0 * n));
    m.mae = ab_all / (3.0 * n);
    return m;
}

}  // namespace n2c::eval
