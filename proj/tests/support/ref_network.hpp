#pragma once

// Test-only double-precision mirror of the Q-network forward pass, written
// as direct convolution (no im2col) so it is an independent route to the
// same function. Also reports a kink signature (every ReLU sign and pool
// argmax) so finite-difference checks can skip non-differentiable points.

#include <array>
#include <cstdint>
#include <vector>

#include "wildfire/network.hpp"

namespace wildfire_test {

struct RefResult {
  std::array<double, 2> q;
  uint64_t kink_signature = 0;
};

inline void fold(uint64_t& sig, uint64_t v) { sig = sig * 1099511628211ULL + v + 1; }

inline std::vector<double> ref_dense(const wildfire::DenseLayer& layer,
                                     const std::vector<double>& x, bool relu, uint64_t* sig) {
  std::vector<double> y(layer.out);
  for (int r = 0; r < layer.out; ++r) {
    double acc = layer.b[r];
    for (int c = 0; c < layer.in; ++c) acc += double(layer.w[size_t(r) * layer.in + c]) * x[c];
    if (relu) {
      if (sig) fold(*sig, acc > 0.0 ? 1 : 0);
      y[r] = acc < 0.0 ? 0.0 : acc;
    } else {
      y[r] = acc;
    }
  }
  return y;
}

inline RefResult ref_forward(const wildfire::Network& net, const wildfire::StateEncoding& s) {
  using wildfire::ConvLayer;
  using wildfire::ImageStage;

  uint64_t sig = 0;
  std::vector<double> cur(s.scalars.begin(), s.scalars.end());
  for (const auto& layer : net.scalar_branch) cur = ref_dense(layer, cur, true, &sig);

  std::vector<double> img(s.image.begin(), s.image.end());
  int ch = net.config.image_channels, h = net.config.image_size, w = net.config.image_size;
  for (const auto& stage : net.image_stages) {
    if (stage.kind == ImageStage::Kind::Conv) {
      const ConvLayer& conv = stage.conv;
      std::vector<double> out(size_t(conv.out_ch) * conv.out_h * conv.out_w);
      for (int oc = 0; oc < conv.out_ch; ++oc) {
        for (int oy = 0; oy < conv.out_h; ++oy) {
          for (int ox = 0; ox < conv.out_w; ++ox) {
            double acc = conv.b[oc];
            for (int ic = 0; ic < conv.in_ch; ++ic) {
              for (int ky = 0; ky < conv.ksize; ++ky) {
                for (int kx = 0; kx < conv.ksize; ++kx) {
                  const double wv =
                      conv.w[size_t(oc) * conv.in_ch * conv.ksize * conv.ksize +
                             size_t(ic) * conv.ksize * conv.ksize + size_t(ky) * conv.ksize + kx];
                  const double iv = img[size_t(ic) * h * w + size_t(oy * conv.stride + ky) * w +
                                        (ox * conv.stride + kx)];
                  acc += wv * iv;
                }
              }
            }
            fold(sig, acc > 0.0 ? 1 : 0);
            out[size_t(oc) * conv.out_h * conv.out_w + size_t(oy) * conv.out_w + ox] =
                acc < 0.0 ? 0.0 : acc;
          }
        }
      }
      img = std::move(out);
      ch = conv.out_ch;
      h = conv.out_h;
      w = conv.out_w;
    } else {
      const int pw = stage.pool_window;
      std::vector<double> out(size_t(ch) * stage.out_h * stage.out_w);
      for (int c = 0; c < ch; ++c) {
        for (int oy = 0; oy < stage.out_h; ++oy) {
          for (int ox = 0; ox < stage.out_w; ++ox) {
            double best = -1e300;
            int best_idx = 0;
            for (int ky = 0; ky < pw; ++ky) {
              for (int kx = 0; kx < pw; ++kx) {
                const double v = img[size_t(c) * h * w + size_t(oy * pw + ky) * w + ox * pw + kx];
                if (v > best) {
                  best = v;
                  best_idx = ky * pw + kx;
                }
              }
            }
            fold(sig, uint64_t(best_idx));
            out[size_t(c) * stage.out_h * stage.out_w + size_t(oy) * stage.out_w + ox] = best;
          }
        }
      }
      img = std::move(out);
      h = stage.out_h;
      w = stage.out_w;
    }
  }

  std::vector<double> concat = cur;
  if (net.image_flat_dim > 0) concat.insert(concat.end(), img.begin(), img.end());

  for (size_t i = 0; i < net.head.size(); ++i) {
    concat = ref_dense(net.head[i], concat, i + 1 < net.head.size(), &sig);
  }
  return {{concat[0], concat[1]}, sig};
}

inline double ref_loss(const wildfire::Network& net, const wildfire::StateEncoding& s,
                       std::array<float, 2> target, std::array<float, 2> mask,
                       uint64_t* sig = nullptr) {
  const RefResult r = ref_forward(net, s);
  if (sig) *sig = r.kink_signature;
  double loss = 0.0;
  for (int a = 0; a < 2; ++a) {
    const double err = r.q[a] - target[a];
    loss += mask[a] * err * err;
  }
  return loss;
}

}  // namespace wildfire_test
