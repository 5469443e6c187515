#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nmdim/errors.hpp"

namespace nmdim {

/// Mean squared error (1/m) sum (y_i - yhat_i)^2.
double mse(std::span<const double> y, std::span<const double> yhat);

/// Coefficient of determination 1 - RSS/TSS. Empty when the labels have zero
/// variance (the score is undefined there, not infinite).
std::optional<double> r2(std::span<const double> y,
                         std::span<const double> yhat);

struct EvalReport {
  std::optional<double> r2;
  double mse = 0.0;
  double rmse = 0.0;
  double prediction_mean = 0.0;
  double prediction_std = 0.0;
  std::size_t n = 0;
};

EvalReport evaluate(std::span<const double> y, std::span<const double> yhat);

/// Flat key-value text block, one field per line.
std::string to_text(const EvalReport& report);

/// Predictor that ignores its input. The mean variant is the naive
/// baseline; the const variant pins an arbitrary value.
struct ConstantPredictor {
  double value = 0.0;
  double predict() const { return value; }
};

ConstantPredictor dummy_mean_fit(std::span<const double> train_labels);
ConstantPredictor dummy_const(double c);

}  // namespace nmdim
