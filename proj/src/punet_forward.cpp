#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "spinemeasure/kernels.hpp"
#include "spinemeasure/punet.hpp"

namespace spine::punet {

namespace {

[[noreturn]] void shape_fail(const std::string& layer, const TensorShape& got,
                             const TensorShape& want) {
  raise(ErrorKind::Shape, "layer " + layer + ": computed shape " + got.str() +
                              " does not match spec " + want.str());
}

const Param& need_param(const WeightSet& ws, const std::string& name) {
  const Param* p = ws.find(name);
  if (!p) raise(ErrorKind::Shape, "missing parameter " + name);
  return *p;
}

// dst(co planes) += conv3x3(src) with zero padding, via row-wise fused
// multiply-accumulate over the 9 taps of every input channel.
void conv3x3(const Tensor& in, Tensor& out, const Param& weight,
             const Param& bias) {
  const auto& ops = kernels::active();
  const int h = in.shape.h, w = in.shape.w;
  const int ci_n = in.shape.c, co_n = out.shape.c;
  for (int co = 0; co < co_n; ++co) {
    float* out_plane = out.plane(co);
    const float b = bias.values[co];
    for (int i = 0; i < h * w; ++i) out_plane[i] = b;
    for (int ci = 0; ci < ci_n; ++ci) {
      const float* in_plane = in.plane(ci);
      const float* taps =
          weight.values.data() + (std::size_t(co) * ci_n + ci) * 9;
      for (int ky = -1; ky <= 1; ++ky) {
        const int y_lo = std::max(0, -ky);
        const int y_hi = h - 1 - std::max(0, ky);
        for (int kx = -1; kx <= 1; ++kx) {
          const float tap = taps[(ky + 1) * 3 + (kx + 1)];
          const int x_lo = std::max(0, -kx);
          const int len = w - std::abs(kx);
          const int src_x = std::max(0, kx);
          for (int y = y_lo; y <= y_hi; ++y) {
            ops.madd_f32(out_plane + std::size_t(y) * w + x_lo,
                         in_plane + std::size_t(y + ky) * w + src_x, tap,
                         std::size_t(len));
          }
        }
      }
    }
  }
}

void conv1x1(const Tensor& in, Tensor& out, const Param& weight,
             const Param& bias) {
  const auto& ops = kernels::active();
  const std::size_t plane = in.plane_size();
  for (int co = 0; co < out.shape.c; ++co) {
    float* out_plane = out.plane(co);
    const float b = bias.values[co];
    for (std::size_t i = 0; i < plane; ++i) out_plane[i] = b;
    for (int ci = 0; ci < in.shape.c; ++ci) {
      ops.madd_f32(out_plane, in.plane(ci),
                   weight.values[std::size_t(co) * in.shape.c + ci], plane);
    }
  }
}

void instance_norm_inplace(Tensor& t, double epsilon,
                           std::span<const float> gamma,
                           std::span<const float> beta) {
  const auto& ops = kernels::active();
  const std::size_t plane = t.plane_size();
  for (int c = 0; c < t.shape.c; ++c) {
    float* p = t.plane(c);
    double sum = 0.0, sum_sq = 0.0;
    ops.sum2_f32(p, plane, &sum, &sum_sq);
    const double mean = sum / double(plane);
    const double var = sum_sq / double(plane) - mean * mean;
    const double inv_std = 1.0 / std::sqrt(std::max(var, 0.0) + epsilon);
    const float scale = float(double(gamma[c]) * inv_std);
    const float shift = float(double(beta[c]) - mean * double(gamma[c]) * inv_std);
    ops.scale_shift_f32(p, p, scale, shift, plane);
  }
}

Tensor maxpool2x2(const Tensor& in) {
  const auto& ops = kernels::active();
  Tensor out = Tensor::zeros({in.shape.c, in.shape.h / 2, in.shape.w / 2});
  std::vector<float> row_max(in.shape.w);
  for (int c = 0; c < in.shape.c; ++c) {
    const float* src = in.plane(c);
    float* dst = out.plane(c);
    for (int y = 0; y < out.shape.h; ++y) {
      ops.max_f32(row_max.data(), src + std::size_t(2 * y) * in.shape.w,
                  src + std::size_t(2 * y + 1) * in.shape.w,
                  std::size_t(in.shape.w));
      for (int x = 0; x < out.shape.w; ++x) {
        const float a = row_max[2 * x], b = row_max[2 * x + 1];
        dst[std::size_t(y) * out.shape.w + x] = a > b ? a : b;
      }
    }
  }
  return out;
}

Tensor upsample2x(const Tensor& in) {
  Tensor out = Tensor::zeros({in.shape.c, in.shape.h * 2, in.shape.w * 2});
  for (int c = 0; c < in.shape.c; ++c) {
    const float* src = in.plane(c);
    float* dst = out.plane(c);
    for (int y = 0; y < in.shape.h; ++y) {
      float* row = dst + std::size_t(2 * y) * out.shape.w;
      const float* s = src + std::size_t(y) * in.shape.w;
      for (int x = 0; x < in.shape.w; ++x) {
        row[2 * x] = s[x];
        row[2 * x + 1] = s[x];
      }
      std::memcpy(row + out.shape.w, row, sizeof(float) * out.shape.w);
    }
  }
  return out;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  Tensor out = Tensor::zeros({a.shape.c + b.shape.c, a.shape.h, a.shape.w});
  std::memcpy(out.data.data(), a.data.data(), sizeof(float) * a.data.size());
  std::memcpy(out.data.data() + a.data.size(), b.data.data(),
              sizeof(float) * b.data.size());
  return out;
}

void relu_inplace(Tensor& t) {
  kernels::active().relu_f32(t.data.data(), t.data.size());
}

Tensor add(const Tensor& a, const Tensor& b) {
  Tensor out = Tensor::zeros(a.shape);
  kernels::active().add_f32(out.data.data(), a.data.data(), b.data.data(),
                            a.data.size());
  return out;
}

// Double-precision sigmoid, clamped so float results stay strictly
// inside (0, 1).
Tensor sigmoid(const Tensor& in) {
  Tensor out = Tensor::zeros(in.shape);
  const float lo = std::numeric_limits<float>::min();
  const float hi = 1.0f - std::numeric_limits<float>::epsilon() / 2.0f;
  for (std::size_t i = 0; i < in.data.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-double(in.data[i])));
    out.data[i] = std::min(hi, std::max(lo, float(s)));
  }
  return out;
}

// Runs one named stage (conv-norm-relu twice plus inactive dropout) and
// audits every shape against the spec.
struct Executor {
  const NetSpec& spec;
  const WeightSet& ws;
  std::size_t cursor = 0;  // index into spec.layers, in execution order

  const LayerSpec& expect(const std::string& name, LayerKind kind) {
    if (cursor >= spec.layers.size())
      raise(ErrorKind::Shape, "spec exhausted before layer " + name);
    const LayerSpec& l = spec.layers[cursor++];
    if (l.name != name || l.kind != kind)
      raise(ErrorKind::Shape, "spec order mismatch: expected " + name +
                                  ", found " + l.name);
    return l;
  }

  void audit(const LayerSpec& l, const Tensor& out) {
    if (!(out.shape == l.out_shape)) shape_fail(l.name, out.shape, l.out_shape);
  }

  Tensor conv3(const std::string& name, const Tensor& in) {
    const LayerSpec& l = expect(name, LayerKind::Conv3x3);
    if (!(in.shape == l.in_shape)) shape_fail(l.name, in.shape, l.in_shape);
    Tensor out = Tensor::zeros(l.out_shape);
    conv3x3(in, out, need_param(ws, name + ".weight"),
            need_param(ws, name + ".bias"));
    audit(l, out);
    return out;
  }
  Tensor conv1(const std::string& name, const Tensor& in) {
    const LayerSpec& l = expect(name, LayerKind::Conv1x1);
    if (!(in.shape == l.in_shape)) shape_fail(l.name, in.shape, l.in_shape);
    Tensor out = Tensor::zeros(l.out_shape);
    conv1x1(in, out, need_param(ws, name + ".weight"),
            need_param(ws, name + ".bias"));
    audit(l, out);
    return out;
  }
  Tensor norm(const std::string& name, Tensor in) {
    const LayerSpec& l = expect(name, LayerKind::InstanceNorm);
    instance_norm_inplace(in, 1e-5, need_param(ws, name + ".weight").values,
                          need_param(ws, name + ".bias").values);
    audit(l, in);
    return in;
  }
  Tensor relu(const std::string& name, Tensor in) {
    const LayerSpec& l = expect(name, LayerKind::ReLU);
    relu_inplace(in);
    audit(l, in);
    return in;
  }
  Tensor dropout(const std::string& name, Tensor in) {
    // inference mode: identity
    audit(expect(name, LayerKind::Dropout), in);
    return in;
  }
  Tensor pool(const std::string& name, const Tensor& in) {
    const LayerSpec& l = expect(name, LayerKind::MaxPool2x2);
    Tensor out = maxpool2x2(in);
    audit(l, out);
    return out;
  }
  Tensor up(const std::string& name, const Tensor& in) {
    const LayerSpec& l = expect(name, LayerKind::UpsampleNearest2x);
    Tensor out = upsample2x(in);
    audit(l, out);
    return out;
  }
  Tensor cat(const std::string& name, const Tensor& a, const Tensor& b) {
    const LayerSpec& l = expect(name, LayerKind::ConcatSkip);
    if (a.shape.h != b.shape.h || a.shape.w != b.shape.w)
      shape_fail(name, b.shape, a.shape);
    Tensor out = concat(a, b);
    audit(l, out);
    return out;
  }
  Tensor sum(const std::string& name, const Tensor& a, const Tensor& b) {
    const LayerSpec& l = expect(name, LayerKind::Add);
    if (!(a.shape == b.shape)) shape_fail(name, b.shape, a.shape);
    Tensor out = add(a, b);
    audit(l, out);
    return out;
  }
  Tensor sig(const std::string& name, const Tensor& in) {
    const LayerSpec& l = expect(name, LayerKind::Sigmoid);
    Tensor out = sigmoid(in);
    audit(l, out);
    return out;
  }
  void skip(const std::string& name, LayerKind kind) { expect(name, kind); }

  Tensor stage(const std::string& prefix, Tensor in) {
    Tensor s = conv3(prefix + ".conv1", in);
    s = norm(prefix + ".norm1", std::move(s));
    s = relu(prefix + ".relu1", std::move(s));
    s = conv3(prefix + ".conv2", s);
    s = norm(prefix + ".norm2", std::move(s));
    s = relu(prefix + ".relu2", std::move(s));
    return dropout(prefix + ".dropout", std::move(s));
  }
};

}  // namespace

Tensor instance_norm(const Tensor& in, double epsilon,
                     std::span<const float> gamma,
                     std::span<const float> beta) {
  if (static_cast<int>(gamma.size()) != in.shape.c ||
      static_cast<int>(beta.size()) != in.shape.c)
    raise(ErrorKind::Shape, "instance_norm affine parameters must have one "
                            "entry per channel");
  if (in.plane_size() < 2)
    raise(ErrorKind::Size, "instance_norm needs spatial size >= 2");
  Tensor out = in;
  instance_norm_inplace(out, epsilon, gamma, beta);
  return out;
}

ForwardResult forward(const NetSpec& spec, const WeightSet& weights,
                      const Tensor& image, bool with_side_outputs) {
  if (!(image.shape == spec.input))
    shape_fail("input", image.shape, spec.input);

  Executor ex{spec, weights};
  const int depth = spec.depth;

  Tensor s = image;
  std::vector<Tensor> skips;
  for (int i = 0; i < depth; ++i) {
    const std::string prefix = "enc" + std::to_string(i);
    s = ex.stage(prefix, std::move(s));
    skips.push_back(s);
    s = ex.pool(prefix + ".pool", s);
  }

  s = ex.stage("bottleneck", std::move(s));

  Tensor side_prev;  // running progressive (pre-sigmoid) map
  std::vector<Tensor> raw_sides;
  for (int j = 0; j < depth; ++j) {
    const std::string prefix = "dec" + std::to_string(j);
    s = ex.up(prefix + ".up", s);
    s = ex.cat(prefix + ".concat", s, skips[depth - 1 - j]);
    s = ex.stage(prefix, std::move(s));
    if (j < 3) {
      const std::string side = "side" + std::to_string(j + 1);
      if (with_side_outputs) {
        Tensor m = ex.conv1(side + ".conv", s);
        if (j > 0) {
          Tensor prev_up = ex.up(side + ".up_prev", side_prev);
          m = ex.sum(side + ".add", m, prev_up);
        }
        raw_sides.push_back(m);
        side_prev = std::move(m);
      } else {
        ex.skip(side + ".conv", LayerKind::Conv1x1);
        if (j > 0) {
          ex.skip(side + ".up_prev", LayerKind::UpsampleNearest2x);
          ex.skip(side + ".add", LayerKind::Add);
        }
      }
    }
  }

  Tensor head = ex.conv1("final.proj", s);
  // fuse the third progressive map, upsampling until resolutions match
  int ups = 0;
  Tensor fused = std::move(head);
  {
    Tensor side_full;
    if (with_side_outputs) side_full = side_prev;
    while (true) {
      const std::string name = "final.side_up" + std::to_string(ups + 1);
      bool exists = false;
      for (const LayerSpec& l : spec.layers)
        if (l.name == name) exists = true;
      if (!exists) break;
      ++ups;
      if (with_side_outputs)
        side_full = ex.up(name, side_full);
      else
        ex.skip(name, LayerKind::UpsampleNearest2x);
    }
    if (with_side_outputs)
      fused = ex.sum("final.add", fused, side_full);
    else
      ex.skip("final.add", LayerKind::Add);
  }
  fused = ex.conv1("final.conv", fused);

  ForwardResult result;
  result.final_map = ex.sig("final.sigmoid", fused);
  if (with_side_outputs) {
    for (Tensor& raw : raw_sides) result.side_maps.push_back(sigmoid(raw));
  }
  return result;
}

}  // namespace spine::punet
