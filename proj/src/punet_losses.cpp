#include <algorithm>
#include <cmath>

#include "spinemeasure/punet.hpp"

namespace spine::punet {

namespace {

constexpr double kClampLo = 1e-7;
constexpr double kClampHi = 1.0 - 1e-7;

void require_equal_sizes(std::span<const double> pred,
                         std::span<const double> ref) {
  if (pred.size() != ref.size())
    raise(ErrorKind::Shape,
          "pred and ref sizes differ: " + std::to_string(pred.size()) +
              " vs " + std::to_string(ref.size()));
  if (pred.empty()) raise(ErrorKind::Shape, "empty maps");
}

}  // namespace

double dice_loss(std::span<const double> pred, std::span<const double> ref,
                 double smooth) {
  require_equal_sizes(pred, ref);
  double inter = 0.0, sum_p = 0.0, sum_r = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    inter += pred[i] * ref[i];
    sum_p += pred[i];
    sum_r += ref[i];
  }
  return 1.0 - (2.0 * inter + smooth) / (sum_p + sum_r + smooth);
}

double xe_loss(std::span<const double> pred, std::span<const double> ref) {
  require_equal_sizes(pred, ref);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kClampLo, kClampHi);
    total -= ref[i] * std::log(p) + (1.0 - ref[i]) * std::log(1.0 - p);
  }
  return total / double(pred.size());
}

std::vector<double> dice_loss_gradient(std::span<const double> pred,
                                       std::span<const double> ref,
                                       double smooth) {
  require_equal_sizes(pred, ref);
  double inter = 0.0, sum_p = 0.0, sum_r = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    inter += pred[i] * ref[i];
    sum_p += pred[i];
    sum_r += ref[i];
  }
  const double denom = sum_p + sum_r + smooth;
  const double numer = 2.0 * inter + smooth;
  std::vector<double> grad(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    // d/dp_i [ -(2*inter + s) / (sum_p + sum_r + s) ]
    grad[i] = -(2.0 * ref[i] * denom - numer) / (denom * denom);
  }
  return grad;
}

std::vector<double> xe_loss_gradient(std::span<const double> pred,
                                     std::span<const double> ref) {
  require_equal_sizes(pred, ref);
  const double inv_n = 1.0 / double(pred.size());
  std::vector<double> grad(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] < kClampLo || pred[i] > kClampHi) {
      grad[i] = 0.0;  // clamp is flat outside its range
      continue;
    }
    grad[i] = inv_n * (-ref[i] / pred[i] + (1.0 - ref[i]) / (1.0 - pred[i]));
  }
  return grad;
}

double loss(LossKind kind, std::span<const double> pred,
            std::span<const double> ref) {
  return kind == LossKind::Dice ? dice_loss(pred, ref) : xe_loss(pred, ref);
}

std::vector<double> loss_gradient(LossKind kind, std::span<const double> pred,
                                  std::span<const double> ref) {
  return kind == LossKind::Dice ? dice_loss_gradient(pred, ref)
                                : xe_loss_gradient(pred, ref);
}

}  // namespace spine::punet
