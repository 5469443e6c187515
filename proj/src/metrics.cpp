#include "nmdim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace nmdim {

double mse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size() || y.empty())
    throw ParamError("mse: inputs must be non-empty and of equal length");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - yhat[i];
    acc += d * d;
  }
  return acc / static_cast<double>(y.size());
}

std::optional<double> r2(std::span<const double> y,
                         std::span<const double> yhat) {
  if (y.size() != yhat.size() || y.empty())
    throw ParamError("r2: inputs must be non-empty and of equal length");
  const double mean =
      std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double rss = 0.0, tss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    const double t = y[i] - mean;
    rss += r * r;
    tss += t * t;
  }
  if (tss == 0.0) return std::nullopt;
  return 1.0 - rss / tss;
}

EvalReport evaluate(std::span<const double> y, std::span<const double> yhat) {
  EvalReport rep;
  rep.n = y.size();
  rep.mse = mse(y, yhat);
  rep.rmse = std::sqrt(rep.mse);
  rep.r2 = r2(y, yhat);
  rep.prediction_mean = std::accumulate(yhat.begin(), yhat.end(), 0.0) /
                        static_cast<double>(yhat.size());
  double var = 0.0;
  for (double p : yhat) {
    const double d = p - rep.prediction_mean;
    var += d * d;
  }
  rep.prediction_std = std::sqrt(var / static_cast<double>(yhat.size()));
  return rep;
}

std::string to_text(const EvalReport& report) {
  char buf[64];
  std::string out;
  auto field = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.17g\n", key, v);
    out += buf;
  };
  if (report.r2)
    field("r2", *report.r2);
  else
    out += "r2=undefined\n";
  field("mse", report.mse);
  field("rmse", report.rmse);
  field("prediction_mean", report.prediction_mean);
  field("prediction_std", report.prediction_std);
  out += "n=" + std::to_string(report.n) + "\n";
  return out;
}

ConstantPredictor dummy_mean_fit(std::span<const double> train_labels) {
  if (train_labels.empty())
    throw ParamError("dummy_mean_fit: empty label list");
  const double mean =
      std::accumulate(train_labels.begin(), train_labels.end(), 0.0) /
      static_cast<double>(train_labels.size());
  return {mean};
}

ConstantPredictor dummy_const(double c) { return {c}; }

}  // namespace nmdim
