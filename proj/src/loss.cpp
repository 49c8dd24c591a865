#include "n2c/loss.hpp"

#include <cmath>

namespace n2c::nn {

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "mse") return LossKind::kMse;
    if (s == "huber" || s == "smooth_l1") return LossKind::kHuber;
    throw Error("unknown loss kind: " + s);
}

std::string to_string(LossKind kind) {
    return kind == LossKind::kMse ? "mse" : "smooth_l1";
}

double loss(const LossSpec& spec, std::span<const double> y, std::span<const double> yhat,
            std::span<double> dyhat) {
    spec.validate();
    if (y.size() != yhat.size() || (!dyhat.empty() && dyhat.size() != y.size()))
        throw ShapeMismatch("loss: shape mismatch");
    if (y.empty()) throw Error("EmptyInput: loss over zero elements");

    const double inv_k = 1.0 / static_cast<double>(y.size());
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = y[i] - yhat[i];
        double value, dldx;
        if (spec.kind == LossKind::kMse) {
            value = x * x;
            dldx = 2.0 * x;
        } else if (std::abs(x) <= spec.delta) {
            value = 0.5 * x * x;
            dldx = x;
        } else {
            value = spec.delta * (std::abs(x) - 0.5 * spec.delta);
            dldx = x > 0.0 ? spec.delta : -spec.delta;
        }
        total += value;
        if (!dyhat.empty()) dyhat[i] = -dldx * inv_k;  // d x / d yhat = -1
    }
    return total * inv_k;
}

double loss_value(const LossSpec& spec, std::span<const double> y, std::span<const double> yhat) {
    return loss(spec, y, yhat, {});
}

}  // namespace n2c::nn
