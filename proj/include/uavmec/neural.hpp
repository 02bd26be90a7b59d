#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmec/rng.hpp"

namespace uavmec {

enum class Act : std::uint8_t { Identity = 0, Relu = 1, Tanh = 2 };

inline double activate(Act a, double z) {
  switch (a) {
    case Act::Relu: return z > 0.0 ? z : 0.0;
    case Act::Tanh: return std::tanh(z);
    default: return z;
  }
}

// Derivative expressed through the activation output y = act(z); for the
// activations here that is enough and saves recomputing tanh.
inline double activate_grad(Act a, double y) {
  switch (a) {
    case Act::Relu: return y > 0.0 ? 1.0 : 0.0;
    case Act::Tanh: return 1.0 - y * y;
    default: return 1.0;
  }
}

// One affine layer, weights row-major [out][in]. Also reused as the
// shape-matched container for gradients and Adam moments.
struct LayerParams {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // out*in
  std::vector<double> b;  // out

  LayerParams() = default;
  LayerParams(int in_, int out_) : in(in_), out(out_), w(static_cast<std::size_t>(in_) * out_, 0.0), b(out_, 0.0) {}
};

// Fully connected stack: hidden activation on every layer but the last,
// output activation on the last.
struct DenseNet {
  std::vector<LayerParams> layers;
  Act hidden_act = Act::Relu;
  Act output_act = Act::Identity;

  int input_size() const { return layers.front().in; }
  int output_size() const { return layers.back().out; }

  Act act_of(std::size_t layer) const {
    return layer + 1 == layers.size() ? output_act : hidden_act;
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
  }
};

// widths = {input, hidden..., output}. Weights uniform in +-1/sqrt(fan_in);
// final_scale shrinks the last layer (actors start near the action midpoint).
inline DenseNet make_net(const std::vector<int>& widths, Act hidden, Act output,
                         Rng& rng, double final_scale = 1.0) {
  if (widths.size() < 2) throw std::invalid_argument("make_net: need at least input and output widths");
  DenseNet net;
  net.hidden_act = hidden;
  net.output_act = output;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    LayerParams l(widths[i], widths[i + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[i]));
    const double scale = (i + 2 == widths.size()) ? final_scale : 1.0;
    for (auto& v : l.w) v = scale * rng.uniform(-bound, bound);
    for (auto& v : l.b) v = scale * rng.uniform(-bound, bound);
    net.layers.push_back(std::move(l));
  }
  return net;
}

// Per-layer activations kept for the backward pass. x[0] is the input,
// x[i+1] the output of layer i.
struct FwdCache {
  std::vector<std::vector<double>> x;
};

inline void forward(const DenseNet& net, std::span<const double> input, FwdCache& cache) {
  if (static_cast<int>(input.size()) != net.input_size())
    throw std::invalid_argument("forward: input size mismatch");
  cache.x.resize(net.layers.size() + 1);
  cache.x[0].assign(input.begin(), input.end());
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const LayerParams& l = net.layers[li];
    const std::vector<double>& in = cache.x[li];
    std::vector<double>& outv = cache.x[li + 1];
    outv.assign(l.out, 0.0);
    const Act act = net.act_of(li);
    for (int o = 0; o < l.out; ++o) {
      const double* wrow = l.w.data() + static_cast<std::size_t>(o) * l.in;
      double z = l.b[o];
      for (int i = 0; i < l.in; ++i) z += wrow[i] * in[i];
      outv[o] = activate(act, z);
    }
  }
}

inline std::vector<double> forward(const DenseNet& net, std::span<const double> input) {
  FwdCache cache;
  forward(net, input, cache);
  return cache.x.back();
}

// Gradients of every parameter, same shapes as the net.
struct Grads {
  std::vector<LayerParams> layers;

  explicit Grads(const DenseNet& net) {
    for (const auto& l : net.layers) layers.emplace_back(l.in, l.out);
  }

  void zero() {
    for (auto& l : layers) {
      std::fill(l.w.begin(), l.w.end(), 0.0);
      std::fill(l.b.begin(), l.b.end(), 0.0);
    }
  }

  void scale(double s) {
    for (auto& l : layers) {
      for (auto& v : l.w) v *= s;
      for (auto& v : l.b) v *= s;
    }
  }
};

// Reverse pass. upstream is dL/d(output); parameter gradients accumulate
// into *grads when given (caller zeroes when starting a new batch); pass
// nullptr to get only dL/d(input).
inline std::vector<double> backward(const DenseNet& net, const FwdCache& cache,
                                    std::span<const double> upstream, Grads* grads) {
  if (static_cast<int>(upstream.size()) != net.output_size())
    throw std::invalid_argument("backward: upstream size mismatch");
  std::vector<double> dy(upstream.begin(), upstream.end());
  std::vector<double> dx;
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const LayerParams& l = net.layers[li];
    const std::vector<double>& in = cache.x[li];
    const std::vector<double>& out = cache.x[li + 1];
    const Act act = net.act_of(li);
    dx.assign(l.in, 0.0);
    const double* wrow_base = l.w.data();
    if (grads) {
      LayerParams& g = grads->layers[li];
      for (int o = 0; o < l.out; ++o) {
        const double dz = dy[o] * activate_grad(act, out[o]);
        g.b[o] += dz;
        double* grow = g.w.data() + static_cast<std::size_t>(o) * l.in;
        const double* wrow = wrow_base + static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) {
          grow[i] += dz * in[i];
          dx[i] += dz * wrow[i];
        }
      }
    } else {
      for (int o = 0; o < l.out; ++o) {
        const double dz = dy[o] * activate_grad(act, out[o]);
        const double* wrow = wrow_base + static_cast<std::size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) dx[i] += dz * wrow[i];
      }
    }
    dy.swap(dx);
  }
  return dy;
}

inline std::vector<double> backward(const DenseNet& net, const FwdCache& cache,
                                    std::span<const double> upstream, Grads& grads) {
  return backward(net, cache, upstream, &grads);
}

// Standard Adam with bias correction.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<LayerParams> m, v;

  AdamState() = default;
  AdamState(const DenseNet& net, double lr_) : lr(lr_) {
    for (const auto& l : net.layers) {
      m.emplace_back(l.in, l.out);
      v.emplace_back(l.in, l.out);
    }
  }
};

inline void adam_step(DenseNet& net, const Grads& grads, AdamState& st) {
  st.step += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  auto update = [&](double& p, double g, double& m, double& v) {
    if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
    m = st.beta1 * m + (1.0 - st.beta1) * g;
    v = st.beta2 * v + (1.0 - st.beta2) * g * g;
    p -= st.lr * (m / bc1) / (std::sqrt(v / bc2) + st.eps);
  };
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    LayerParams& l = net.layers[li];
    const LayerParams& g = grads.layers[li];
    LayerParams& lm = st.m[li];
    LayerParams& lv = st.v[li];
    for (std::size_t i = 0; i < l.w.size(); ++i) update(l.w[i], g.w[i], lm.w[i], lv.w[i]);
    for (std::size_t i = 0; i < l.b.size(); ++i) update(l.b[i], g.b[i], lm.b[i], lv.b[i]);
  }
}

// Polyak blend: target <- tau * online + (1 - tau) * target.
inline void soft_update(DenseNet& target, const DenseNet& online, double tau) {
  if (target.layers.size() != online.layers.size())
    throw std::invalid_argument("soft_update: layer count mismatch");
  for (std::size_t li = 0; li < target.layers.size(); ++li) {
    LayerParams& t = target.layers[li];
    const LayerParams& o = online.layers[li];
    if (t.in != o.in || t.out != o.out)
      throw std::invalid_argument("soft_update: layer shape mismatch");
    for (std::size_t i = 0; i < t.w.size(); ++i) t.w[i] = tau * o.w[i] + (1.0 - tau) * t.w[i];
    for (std::size_t i = 0; i < t.b.size(); ++i) t.b[i] = tau * o.b[i] + (1.0 - tau) * t.b[i];
  }
}

// --- checkpoint format ---
// magic, version, width count, widths, activations, then raw parameters in
// layer order (weights row-major, then biases), doubles, little-endian.

inline constexpr std::uint32_t kNetMagic = 0x55564E4EU;  // "UVNN"
inline constexpr std::uint32_t kNetVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace detail

inline void save_net(const DenseNet& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_net: cannot open " + path);
  detail::write_pod(os, kNetMagic);
  detail::write_pod(os, kNetVersion);
  const std::uint32_t n_widths = static_cast<std::uint32_t>(net.layers.size() + 1);
  detail::write_pod(os, n_widths);
  detail::write_pod(os, static_cast<std::uint32_t>(net.layers.front().in));
  for (const auto& l : net.layers) detail::write_pod(os, static_cast<std::uint32_t>(l.out));
  detail::write_pod(os, static_cast<std::uint8_t>(net.hidden_act));
  detail::write_pod(os, static_cast<std::uint8_t>(net.output_act));
  for (const auto& l : net.layers) {
    os.write(reinterpret_cast<const char*>(l.w.data()),
             static_cast<std::streamsize>(l.w.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(l.b.data()),
             static_cast<std::streamsize>(l.b.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("save_net: write failed for " + path);
}

inline DenseNet load_net(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_net: cannot open " + path);
  if (detail::read_pod<std::uint32_t>(is) != kNetMagic)
    throw std::runtime_error("load_net: bad magic in " + path);
  if (detail::read_pod<std::uint32_t>(is) != kNetVersion)
    throw std::runtime_error("load_net: unsupported version in " + path);
  const std::uint32_t n_widths = detail::read_pod<std::uint32_t>(is);
  if (n_widths < 2 || n_widths > 64)
    throw std::runtime_error("load_net: implausible layer count in " + path);
  std::vector<int> widths(n_widths);
  for (auto& w : widths) {
    w = static_cast<int>(detail::read_pod<std::uint32_t>(is));
    if (w <= 0) throw std::runtime_error("load_net: bad width in " + path);
  }
  DenseNet net;
  net.hidden_act = static_cast<Act>(detail::read_pod<std::uint8_t>(is));
  net.output_act = static_cast<Act>(detail::read_pod<std::uint8_t>(is));
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    LayerParams l(widths[i], widths[i + 1]);
    is.read(reinterpret_cast<char*>(l.w.data()),
            static_cast<std::streamsize>(l.w.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(l.b.data()),
            static_cast<std::streamsize>(l.b.size() * sizeof(double)));
    if (!is) throw std::runtime_error("load_net: truncated parameters in " + path);
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace uavmec
