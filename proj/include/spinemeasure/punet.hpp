#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinemeasure/errors.hpp"

namespace spine::punet {

struct TensorShape {
  int c = 0;
  int h = 0;
  int w = 0;

  std::size_t size() const {
    return std::size_t(c) * std::size_t(h) * std::size_t(w);
  }
  std::string str() const {
    return std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
  }
  bool operator==(const TensorShape&) const = default;
};

// CHW float tensor.
struct Tensor {
  TensorShape shape;
  std::vector<float> data;

  static Tensor zeros(TensorShape s) { return {s, std::vector<float>(s.size(), 0.0f)}; }

  std::size_t plane_size() const { return std::size_t(shape.h) * shape.w; }
  float* plane(int ci) { return data.data() + plane_size() * ci; }
  const float* plane(int ci) const { return data.data() + plane_size() * ci; }
};

enum class LayerKind {
  Conv3x3,
  InstanceNorm,
  ReLU,
  Dropout,
  MaxPool2x2,
  UpsampleNearest2x,
  ConcatSkip,
  Conv1x1,
  Add,
  Sigmoid,
};

const char* to_string(LayerKind kind);

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::ReLU;
  TensorShape in_shape;
  TensorShape out_shape;
  std::vector<int> weight_shape;  // empty when the layer has no weights
  std::vector<int> bias_shape;
  std::string skip_source;  // ConcatSkip / Add: name of the second input

  std::uint64_t param_count() const;
};

// Encoder/decoder U-Net with three progressive side-output branches on the
// first three decoder stages. Convolutions are stride-1 zero-padded 3x3
// (plus 1x1 heads), pooling is 2x2 max, upsampling is nearest-neighbor x2.
// Dropout layers exist structurally but are inactive (inference only).
struct NetSpec {
  TensorShape input;
  int depth = 4;
  int base_channels = 16;
  double dropout_rate = 0.25;
  std::vector<LayerSpec> layers;

  std::uint64_t param_count() const;
  const LayerSpec& layer(const std::string& name) const;
  // raw side-branch map shapes, k = 1..3 (H/8, H/4, H/2 at depth 4)
  std::array<TensorShape, 3> side_output_shapes() const;
};

NetSpec build_spec(TensorShape input, int depth = 4, int base_channels = 16);

struct Param {
  std::string name;  // "<layer>.weight" / "<layer>.bias"
  std::vector<int> shape;
  std::vector<float> values;
};

struct WeightSet {
  std::uint64_t seed = 0;
  std::vector<Param> params;

  Param* find(const std::string& name);
  const Param* find(const std::string& name) const;
};

// Deterministic init: conv weights and biases uniform in
// [-1/sqrt(fan_in), +1/sqrt(fan_in)], norm scale 1 / shift 0.
WeightSet init_weights(const NetSpec& spec, std::uint64_t seed);

struct ForwardResult {
  Tensor final_map;                // sigmoid probabilities at input resolution
  std::vector<Tensor> side_maps;   // 3 progressive side outputs, sigmoided
};

// Inference pass. Every layer's computed shape is audited against the
// spec; a mismatch raises a layer-named Shape error. With
// with_side_outputs = false the side branches and their additions are
// skipped entirely (the plain U-Net path through the same final head).
ForwardResult forward(const NetSpec& spec, const WeightSet& weights,
                      const Tensor& image, bool with_side_outputs = true);

// Per-channel spatial standardization followed by the affine transform.
Tensor instance_norm(const Tensor& in, double epsilon,
                     std::span<const float> gamma,
                     std::span<const float> beta);

// ------------------------------------------------------------- losses
// Losses and their analytic gradients operate on flat double maps so the
// finite-difference checks are meaningful.

enum class LossKind { Dice, CrossEntropy };

// 1 - (2*sum(p*r) + s) / (sum(p) + sum(r) + s), smoothing s = 1.
double dice_loss(std::span<const double> pred, std::span<const double> ref,
                 double smooth = 1.0);
// mean of -[r log p + (1-r) log(1-p)] with p clamped to [1e-7, 1-1e-7].
double xe_loss(std::span<const double> pred, std::span<const double> ref);

std::vector<double> dice_loss_gradient(std::span<const double> pred,
                                       std::span<const double> ref,
                                       double smooth = 1.0);
std::vector<double> xe_loss_gradient(std::span<const double> pred,
                                     std::span<const double> ref);

double loss(LossKind kind, std::span<const double> pred,
            std::span<const double> ref);
std::vector<double> loss_gradient(LossKind kind, std::span<const double> pred,
                                  std::span<const double> ref);

// ------------------------------------------------------ serialization
// Compact JSON header line (layer names and shapes) terminated by '\n',
// followed by the flat little-endian float32 stream. Round-trips bit-exactly.
std::vector<std::uint8_t> serialize_weights(const WeightSet& ws);
WeightSet parse_weights(std::span<const std::uint8_t> bytes);

}  // namespace spine::punet
