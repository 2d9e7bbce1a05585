#include "wildfire/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "wildfire/kernels.hpp"
#include "wildfire/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian; big-endian hosts are not supported");

namespace wildfire {

namespace {

void init_dense(DenseLayer& layer, int in, int out, Rng& rng) {
  layer.in = in;
  layer.out = out;
  layer.w.resize(size_t(out) * in);
  layer.b.assign(out, 0.0f);
  const double s = std::sqrt(3.0 / in);
  for (auto& v : layer.w) v = float(rng.uniform(-s, s));
}

void init_conv(ConvLayer& conv, int in_ch, int out_ch, int ksize, int stride, int in_h, int in_w,
               Rng& rng) {
  conv.in_ch = in_ch;
  conv.out_ch = out_ch;
  conv.ksize = ksize;
  conv.stride = stride;
  conv.in_h = in_h;
  conv.in_w = in_w;
  conv.out_h = (in_h - ksize) / stride + 1;
  conv.out_w = (in_w - ksize) / stride + 1;
  if (conv.out_h <= 0 || conv.out_w <= 0) throw std::invalid_argument("conv output collapses to zero");
  const int fan_in = in_ch * ksize * ksize;
  conv.w.resize(size_t(out_ch) * fan_in);
  conv.b.assign(out_ch, 0.0f);
  const double s = std::sqrt(3.0 / fan_in);
  for (auto& v : conv.w) v = float(rng.uniform(-s, s));
}

}  // namespace

Network make_network(const NetworkConfig& config, uint64_t seed) {
  if (config.scalar_dim <= 0) throw std::invalid_argument("scalar input dimension must be positive");
  if (config.outputs != 2) throw std::invalid_argument("the Q-network has exactly two outputs");

  Network net;
  net.config = config;
  Rng rng(hash_u64(seed, 0x6e657477ULL));

  int dim = config.scalar_dim;
  for (int h : config.scalar_hidden) {
    DenseLayer layer;
    init_dense(layer, dim, h, rng);
    net.scalar_branch.push_back(std::move(layer));
    dim = h;
  }

  net.image_flat_dim = 0;
  if (config.image_size > 0) {
    int ch = config.image_channels, h = config.image_size, w = config.image_size;
    for (const auto& spec : config.conv) {
      ImageStage stage;
      stage.kind = ImageStage::Kind::Conv;
      stage.in_ch = ch;
      stage.in_h = h;
      stage.in_w = w;
      init_conv(stage.conv, ch, spec.filters, spec.ksize, spec.stride, h, w, rng);
      stage.out_ch = spec.filters;
      stage.out_h = stage.conv.out_h;
      stage.out_w = stage.conv.out_w;
      ch = stage.out_ch;
      h = stage.out_h;
      w = stage.out_w;
      net.image_stages.push_back(std::move(stage));

      if (spec.pool > 1) {
        ImageStage pool;
        pool.kind = ImageStage::Kind::Pool;
        pool.pool_window = spec.pool;
        pool.in_ch = ch;
        pool.in_h = h;
        pool.in_w = w;
        pool.out_ch = ch;
        pool.out_h = h / spec.pool;
        pool.out_w = w / spec.pool;
        if (pool.out_h <= 0 || pool.out_w <= 0) throw std::invalid_argument("pool output collapses to zero");
        h = pool.out_h;
        w = pool.out_w;
        net.image_stages.push_back(std::move(pool));
      }
    }
    net.image_flat_dim = ch * h * w;
  }

  net.concat_dim = dim + net.image_flat_dim;
  int head_dim = net.concat_dim;
  for (int h : config.head_hidden) {
    DenseLayer layer;
    init_dense(layer, head_dim, h, rng);
    net.head.push_back(std::move(layer));
    head_dim = h;
  }
  DenseLayer out_layer;
  init_dense(out_layer, head_dim, config.outputs, rng);
  net.head.push_back(std::move(out_layer));
  return net;
}

namespace {

void dense_forward(const DenseLayer& layer, const float* x, float* y) {
  kernels::matvec(layer.w.data(), x, layer.b.data(), y, layer.out, layer.in);
}

// col is (in_ch * k * k) rows by (out_h * out_w) columns, row-major.
void im2col(const float* input, const ConvLayer& conv, float* col) {
  const int k = conv.ksize;
  const int patches = conv.out_h * conv.out_w;
  for (int c = 0; c < conv.in_ch; ++c) {
    const float* plane = input + size_t(c) * conv.in_h * conv.in_w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        float* row = col + size_t((c * k + ky) * k + kx) * patches;
        for (int oy = 0; oy < conv.out_h; ++oy) {
          const float* src = plane + size_t(oy * conv.stride + ky) * conv.in_w + kx;
          float* dst = row + size_t(oy) * conv.out_w;
          for (int ox = 0; ox < conv.out_w; ++ox) dst[ox] = src[size_t(ox) * conv.stride];
        }
      }
    }
  }
}

void col2im_acc(const float* col, const ConvLayer& conv, float* input_grad) {
  const int k = conv.ksize;
  const int patches = conv.out_h * conv.out_w;
  for (int c = 0; c < conv.in_ch; ++c) {
    float* plane = input_grad + size_t(c) * conv.in_h * conv.in_w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const float* row = col + size_t((c * k + ky) * k + kx) * patches;
        for (int oy = 0; oy < conv.out_h; ++oy) {
          float* dst = plane + size_t(oy * conv.stride + ky) * conv.in_w + kx;
          const float* src = row + size_t(oy) * conv.out_w;
          for (int ox = 0; ox < conv.out_w; ++ox) dst[size_t(ox) * conv.stride] += src[ox];
        }
      }
    }
  }
}

void conv_forward(const ConvLayer& conv, const float* input, float* col, float* output) {
  im2col(input, conv, col);
  const int patches = conv.out_h * conv.out_w;
  const int kdim = conv.in_ch * conv.ksize * conv.ksize;
  for (int oc = 0; oc < conv.out_ch; ++oc) {
    std::fill(output + size_t(oc) * patches, output + size_t(oc + 1) * patches, conv.b[oc]);
  }
  kernels::matmul_acc(conv.w.data(), col, output, conv.out_ch, kdim, patches);
}

// First strictly-greater value wins, so ties keep the earliest index.
void pool_forward(const ImageStage& stage, const float* input, float* output, int* argmax) {
  const int w = stage.pool_window;
  for (int c = 0; c < stage.in_ch; ++c) {
    const float* plane = input + size_t(c) * stage.in_h * stage.in_w;
    float* out_plane = output + size_t(c) * stage.out_h * stage.out_w;
    int* arg_plane = argmax + size_t(c) * stage.out_h * stage.out_w;
    for (int oy = 0; oy < stage.out_h; ++oy) {
      for (int ox = 0; ox < stage.out_w; ++ox) {
        int best_idx = (oy * w) * stage.in_w + ox * w;
        float best = plane[best_idx];
        for (int ky = 0; ky < w; ++ky) {
          for (int kx = 0; kx < w; ++kx) {
            const int idx = (oy * w + ky) * stage.in_w + (ox * w + kx);
            if (plane[idx] > best) {
              best = plane[idx];
              best_idx = idx;
            }
          }
        }
        out_plane[size_t(oy) * stage.out_w + ox] = best;
        arg_plane[size_t(oy) * stage.out_w + ox] = best_idx;
      }
    }
  }
}

}  // namespace

std::array<float, 2> forward(const Network& net, const StateEncoding& s, ForwardCache* cache) {
  if (int(s.scalars.size()) != net.config.scalar_dim) {
    throw std::invalid_argument("scalar input dimension mismatch");
  }
  const size_t image_dim =
      size_t(net.config.image_channels) * net.config.image_size * net.config.image_size;
  if (s.image.size() != image_dim) throw std::invalid_argument("image input dimension mismatch");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.scalar_acts.clear();
  c.image_acts.clear();
  c.pool_argmax.clear();
  c.im2col.clear();
  c.head_acts.clear();

  // Scalar branch.
  const std::vector<float>* cur = &s.scalars;
  for (const auto& layer : net.scalar_branch) {
    std::vector<float> z(layer.out);
    dense_forward(layer, cur->data(), z.data());
    kernels::relu(z.data(), z.data(), layer.out);
    c.scalar_acts.push_back(std::move(z));
    cur = &c.scalar_acts.back();
  }
  const std::vector<float>& scalar_out = *cur;

  // Image branch.
  const std::vector<float>* img = &s.image;
  for (const auto& stage : net.image_stages) {
    if (stage.kind == ImageStage::Kind::Conv) {
      const int patches = stage.conv.out_h * stage.conv.out_w;
      const int kdim = stage.conv.in_ch * stage.conv.ksize * stage.conv.ksize;
      std::vector<float> col(size_t(kdim) * patches);
      std::vector<float> out(size_t(stage.conv.out_ch) * patches);
      conv_forward(stage.conv, img->data(), col.data(), out.data());
      kernels::relu(out.data(), out.data(), int(out.size()));
      c.im2col.push_back(std::move(col));
      c.image_acts.push_back(std::move(out));
    } else {
      std::vector<float> out(size_t(stage.out_ch) * stage.out_h * stage.out_w);
      std::vector<int> argmax(out.size());
      pool_forward(stage, img->data(), out.data(), argmax.data());
      c.pool_argmax.push_back(std::move(argmax));
      c.image_acts.push_back(std::move(out));
    }
    img = &c.image_acts.back();
  }

  // Concat.
  c.concat.resize(net.concat_dim);
  std::copy(scalar_out.begin(), scalar_out.end(), c.concat.begin());
  if (net.image_flat_dim > 0) {
    std::copy(img->begin(), img->end(), c.concat.begin() + scalar_out.size());
  }

  // Head.
  const std::vector<float>* hcur = &c.concat;
  for (size_t i = 0; i < net.head.size(); ++i) {
    const auto& layer = net.head[i];
    std::vector<float> z(layer.out);
    dense_forward(layer, hcur->data(), z.data());
    if (i + 1 < net.head.size()) kernels::relu(z.data(), z.data(), layer.out);
    c.head_acts.push_back(std::move(z));
    hcur = &c.head_acts.back();
  }

  return {(*hcur)[0], (*hcur)[1]};
}

void Gradients::zero() {
  auto clear = [](std::vector<Block>& blocks) {
    for (auto& blk : blocks) {
      std::fill(blk.w.begin(), blk.w.end(), 0.0f);
      std::fill(blk.b.begin(), blk.b.end(), 0.0f);
    }
  };
  clear(scalar_branch);
  clear(conv);
  clear(head);
}

Gradients make_gradients(const Network& net) {
  Gradients g;
  for (const auto& layer : net.scalar_branch) {
    g.scalar_branch.push_back({std::vector<float>(layer.w.size(), 0.0f),
                               std::vector<float>(layer.b.size(), 0.0f)});
  }
  for (const auto& stage : net.image_stages) {
    if (stage.kind == ImageStage::Kind::Conv) {
      g.conv.push_back({std::vector<float>(stage.conv.w.size(), 0.0f),
                        std::vector<float>(stage.conv.b.size(), 0.0f)});
    }
  }
  for (const auto& layer : net.head) {
    g.head.push_back({std::vector<float>(layer.w.size(), 0.0f),
                      std::vector<float>(layer.b.size(), 0.0f)});
  }
  return g;
}

namespace {

// dx = W^T dy; dW += dy x^T; db += dy; relu_mask applies d/dz through the
// stored post-activation (act > 0).
void dense_backward(const DenseLayer& layer, const float* x, const float* dy,
                    Gradients::Block& grad, float* dx) {
  kernels::rank1_acc(grad.w.data(), dy, x, layer.out, layer.in);
  for (int r = 0; r < layer.out; ++r) grad.b[r] += dy[r];
  if (dx) kernels::matvec_t(layer.w.data(), dy, dx, layer.out, layer.in);
}

void relu_mask(const std::vector<float>& act, std::vector<float>& grad) {
  for (size_t i = 0; i < grad.size(); ++i) {
    if (act[i] <= 0.0f) grad[i] = 0.0f;
  }
}

}  // namespace

double backward(const Network& net, const StateEncoding& s, const ForwardCache& cache,
                std::array<float, 2> target, std::array<float, 2> mask, Gradients& grads) {
  const auto& q = cache.head_acts.back();
  double loss = 0.0;
  std::vector<float> dy(2);
  for (int a = 0; a < 2; ++a) {
    const double err = double(q[a]) - target[a];
    loss += mask[a] * err * err;
    dy[a] = float(2.0 * mask[a] * err);
  }

  // Head, back to the concat vector.
  std::vector<float> dx;
  for (int i = int(net.head.size()) - 1; i >= 0; --i) {
    const auto& layer = net.head[i];
    const float* x = i > 0 ? cache.head_acts[i - 1].data() : cache.concat.data();
    dx.assign(layer.in, 0.0f);
    dense_backward(layer, x, dy.data(), grads.head[i], dx.data());
    if (i > 0) relu_mask(cache.head_acts[i - 1], dx);
    dy = dx;
  }
  std::vector<float> dconcat = std::move(dy);

  // Split the concat gradient.
  const int scalar_out_dim = net.concat_dim - net.image_flat_dim;
  std::vector<float> dscalar(dconcat.begin(), dconcat.begin() + scalar_out_dim);
  std::vector<float> dimage(dconcat.begin() + scalar_out_dim, dconcat.end());

  // Image branch.
  if (net.image_flat_dim > 0) {
    int conv_idx = int(grads.conv.size());
    int pool_idx = int(cache.pool_argmax.size());
    std::vector<float> d = std::move(dimage);
    for (int i = int(net.image_stages.size()) - 1; i >= 0; --i) {
      const auto& stage = net.image_stages[i];
      if (stage.kind == ImageStage::Kind::Pool) {
        --pool_idx;
        std::vector<float> dprev(size_t(stage.in_ch) * stage.in_h * stage.in_w, 0.0f);
        const auto& argmax = cache.pool_argmax[pool_idx];
        const size_t out_plane = size_t(stage.out_h) * stage.out_w;
        for (int ch = 0; ch < stage.in_ch; ++ch) {
          float* dst = dprev.data() + size_t(ch) * stage.in_h * stage.in_w;
          const float* src = d.data() + size_t(ch) * out_plane;
          const int* arg = argmax.data() + size_t(ch) * out_plane;
          for (size_t j = 0; j < out_plane; ++j) dst[arg[j]] += src[j];
        }
        d = std::move(dprev);
      } else {
        --conv_idx;
        relu_mask(cache.image_acts[i], d);
        const ConvLayer& conv = stage.conv;
        const int patches = conv.out_h * conv.out_w;
        const int kdim = conv.in_ch * conv.ksize * conv.ksize;
        auto& grad = grads.conv[conv_idx];
        // dW += dY col^T, db += row sums of dY
        kernels::matmul_acc_nt(d.data(), cache.im2col[conv_idx].data(), grad.w.data(), conv.out_ch,
                               patches, kdim);
        for (int oc = 0; oc < conv.out_ch; ++oc) {
          const float* row = d.data() + size_t(oc) * patches;
          float acc = 0.0f;
          for (int j = 0; j < patches; ++j) acc += row[j];
          grad.b[oc] += acc;
        }
        // dcol = W^T dY, scattered back into input-shaped gradient.
        std::vector<float> dcol(size_t(kdim) * patches, 0.0f);
        kernels::matmul_acc_tn(conv.w.data(), d.data(), dcol.data(), kdim, conv.out_ch, patches);
        std::vector<float> dprev(size_t(conv.in_ch) * conv.in_h * conv.in_w, 0.0f);
        col2im_acc(dcol.data(), conv, dprev.data());
        d = std::move(dprev);
      }
    }
  }

  // Scalar branch.
  std::vector<float> ds = std::move(dscalar);
  for (int i = int(net.scalar_branch.size()) - 1; i >= 0; --i) {
    const auto& layer = net.scalar_branch[i];
    relu_mask(cache.scalar_acts[i], ds);
    const float* x = i > 0 ? cache.scalar_acts[i - 1].data() : s.scalars.data();
    dx.assign(layer.in, 0.0f);
    dense_backward(layer, x, ds.data(), grads.scalar_branch[i], dx.data());
    ds = dx;
  }

  return loss;
}

void apply_gradients(Network& net, const Gradients& grads, float step) {
  auto apply = [step](std::vector<float>& params, const std::vector<float>& g) {
    kernels::axpy(-step, g.data(), params.data(), int(params.size()));
  };
  for (size_t i = 0; i < net.scalar_branch.size(); ++i) {
    apply(net.scalar_branch[i].w, grads.scalar_branch[i].w);
    apply(net.scalar_branch[i].b, grads.scalar_branch[i].b);
  }
  size_t ci = 0;
  for (auto& stage : net.image_stages) {
    if (stage.kind == ImageStage::Kind::Conv) {
      apply(stage.conv.w, grads.conv[ci].w);
      apply(stage.conv.b, grads.conv[ci].b);
      ++ci;
    }
  }
  for (size_t i = 0; i < net.head.size(); ++i) {
    apply(net.head[i].w, grads.head[i].w);
    apply(net.head[i].b, grads.head[i].b);
  }
}

size_t parameter_count(const Network& net) {
  size_t n = 0;
  for (const auto& l : net.scalar_branch) n += l.w.size() + l.b.size();
  for (const auto& st : net.image_stages) {
    if (st.kind == ImageStage::Kind::Conv) n += st.conv.w.size() + st.conv.b.size();
  }
  for (const auto& l : net.head) n += l.w.size() + l.b.size();
  return n;
}

namespace {

template <typename Fn>
void for_each_param_block(Network& net, Fn&& fn) {
  for (auto& l : net.scalar_branch) {
    fn(l.w);
    fn(l.b);
  }
  for (auto& st : net.image_stages) {
    if (st.kind == ImageStage::Kind::Conv) {
      fn(st.conv.w);
      fn(st.conv.b);
    }
  }
  for (auto& l : net.head) {
    fn(l.w);
    fn(l.b);
  }
}

}  // namespace

std::vector<float> get_parameters(const Network& net) {
  std::vector<float> out;
  out.reserve(parameter_count(net));
  for_each_param_block(const_cast<Network&>(net), [&](std::vector<float>& blk) {
    out.insert(out.end(), blk.begin(), blk.end());
  });
  return out;
}

void set_parameters(Network& net, std::span<const float> params) {
  if (params.size() != parameter_count(net)) throw std::invalid_argument("parameter count mismatch");
  size_t off = 0;
  for_each_param_block(net, [&](std::vector<float>& blk) {
    std::copy(params.begin() + off, params.begin() + off + blk.size(), blk.begin());
    off += blk.size();
  });
}

std::vector<float> flatten(const Gradients& grads) {
  std::vector<float> out;
  auto push = [&](const std::vector<Gradients::Block>& blocks) {
    for (const auto& blk : blocks) {
      out.insert(out.end(), blk.w.begin(), blk.w.end());
      out.insert(out.end(), blk.b.begin(), blk.b.end());
    }
  };
  push(grads.scalar_branch);
  // conv blocks sit between scalar branch and head in parameter order only
  // if the image branch exists; order matches get_parameters.
  push(grads.conv);
  push(grads.head);
  return out;
}

AdamState make_adam_state(const Network& net) {
  AdamState st;
  st.m.assign(parameter_count(net), 0.0f);
  st.v.assign(parameter_count(net), 0.0f);
  return st;
}

void apply_adam(Network& net, const Gradients& grads, AdamState& state, float lr, float beta1,
                float beta2, float eps) {
  const auto g = flatten(grads);
  auto params = get_parameters(net);
  if (g.size() != params.size()) throw std::invalid_argument("gradient/parameter size mismatch");
  ++state.t;
  const double bc1 = 1.0 - std::pow(double(beta1), double(state.t));
  const double bc2 = 1.0 - std::pow(double(beta2), double(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0f - beta1) * g[i];
    state.v[i] = beta2 * state.v[i] + (1.0f - beta2) * g[i] * g[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= float(lr * mhat / (std::sqrt(vhat) + eps));
  }
  set_parameters(net, params);
}

namespace {

constexpr char kMagic[4] = {'W', 'F', 'Q', 'N'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_i32(std::ostream& out, int32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t read_u32(std::istream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
int32_t read_i32(std::istream& in) {
  int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);

  const auto& c = net.config;
  write_i32(out, c.scalar_dim);
  write_u32(out, uint32_t(c.scalar_hidden.size()));
  for (int h : c.scalar_hidden) write_i32(out, h);
  write_i32(out, c.image_size);
  write_i32(out, c.image_channels);
  write_u32(out, uint32_t(c.conv.size()));
  for (const auto& spec : c.conv) {
    write_i32(out, spec.filters);
    write_i32(out, spec.ksize);
    write_i32(out, spec.stride);
    write_i32(out, spec.pool);
  }
  write_u32(out, uint32_t(c.head_hidden.size()));
  for (int h : c.head_hidden) write_i32(out, h);
  write_i32(out, c.outputs);

  const auto params = get_parameters(net);
  write_u32(out, uint32_t(params.size()));
  out.write(reinterpret_cast<const char*>(params.data()), std::streamsize(params.size() * 4));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad weight file magic: " + path);
  const uint32_t version = read_u32(in);
  if (version != kVersion) throw std::runtime_error("unsupported weight file version");

  NetworkConfig c;
  c.scalar_dim = read_i32(in);
  c.scalar_hidden.resize(read_u32(in));
  for (auto& h : c.scalar_hidden) h = read_i32(in);
  c.image_size = read_i32(in);
  c.image_channels = read_i32(in);
  c.conv.resize(read_u32(in));
  for (auto& spec : c.conv) {
    spec.filters = read_i32(in);
    spec.ksize = read_i32(in);
    spec.stride = read_i32(in);
    spec.pool = read_i32(in);
  }
  c.head_hidden.resize(read_u32(in));
  for (auto& h : c.head_hidden) h = read_i32(in);
  c.outputs = read_i32(in);
  if (!in) throw std::runtime_error("truncated weight file: " + path);

  Network net = make_network(c, 0);
  const uint32_t count = read_u32(in);
  if (count != parameter_count(net)) throw std::runtime_error("weight file parameter count mismatch");
  std::vector<float> params(count);
  in.read(reinterpret_cast<char*>(params.data()), std::streamsize(params.size() * 4));
  if (!in) throw std::runtime_error("truncated weight file: " + path);
  set_parameters(net, params);
  return net;
}

}  // namespace wildfire
