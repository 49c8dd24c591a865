#pragma once

#include <span>
#include <string>

#include "n2c/matrix.hpp"

namespace n2c::nn {

enum class LossKind { kMse, kHuber };

struct LossSpec {
    LossKind kind = LossKind::kHuber;
    double delta = 1.0;

    void validate() const {
        if (kind == LossKind::kHuber && !(delta > 0.0)) throw Error("LossSpec: delta must be > 0");
    }
};

LossKind loss_kind_from_string(const std::string& s);
std::string to_string(LossKind kind);

// Mean loss over all k elements and its gradient with respect to the
// predictions. MSE is (1/k) sum (y - yhat)^2; Huber applies
//   L(x) = x^2 / 2          for |x| <= delta
//   L(x) = delta (|x| - delta/2)  otherwise
// elementwise to x = y - yhat and averages.
double loss(const LossSpec& spec, std::span<const double> y, std::span<const double> yhat,
            std::span<double> dyhat);

double loss_value(const LossSpec& spec, std::span<const double> y, std::span<const double> yhat);

}  // namespace n2c::nn
