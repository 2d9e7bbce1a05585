#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wildfire {

// Two-branch Q-network: a dense stack for the scalar features and a
// conv/max-pool stack for the body-frame belief image, concatenated and
// followed by dense head layers down to the two action values. ReLU after
// every hidden layer. All parameters are 32-bit floats.

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<float> w;  // out x in, row-major
  std::vector<float> b;  // out
};

struct ConvLayer {
  int in_ch = 0, out_ch = 0;
  int ksize = 0, stride = 1;
  int in_h = 0, in_w = 0;
  int out_h = 0, out_w = 0;
  std::vector<float> w;  // out_ch x (in_ch * ksize * ksize), row-major
  std::vector<float> b;  // out_ch
};

struct ImageStage {
  enum class Kind { Conv, Pool };
  Kind kind = Kind::Conv;
  ConvLayer conv;      // Kind::Conv
  int pool_window = 0; // Kind::Pool (window == stride, floor output dims)
  int in_ch = 0, in_h = 0, in_w = 0;
  int out_ch = 0, out_h = 0, out_w = 0;
};

struct NetworkConfig {
  int scalar_dim = 5;
  std::vector<int> scalar_hidden = {32, 32};
  int image_size = 64;  // 0 disables the image branch
  int image_channels = 1;
  struct ConvSpec {
    int filters = 8;
    int ksize = 5;
    int stride = 2;
    int pool = 2;  // max-pool window after the conv, 0 for none
  };
  std::vector<ConvSpec> conv = {{8, 5, 2, 2}, {16, 3, 1, 2}};
  std::vector<int> head_hidden = {64};
  int outputs = 2;
};

struct Network {
  NetworkConfig config;
  std::vector<DenseLayer> scalar_branch;
  std::vector<ImageStage> image_stages;
  std::vector<DenseLayer> head;
  int image_flat_dim = 0;  // flattened image-branch output
  int concat_dim = 0;
};

// Scaled-uniform fan-in init (U(+-sqrt(3/fan_in))), zero biases, seeded.
Network make_network(const NetworkConfig& config, uint64_t seed);

struct StateEncoding {
  std::vector<float> scalars;
  std::vector<float> image;  // channel-major (ch, h, w); empty when no image branch
};

struct ForwardCache {
  std::vector<std::vector<float>> scalar_acts;  // post-ReLU per scalar layer
  std::vector<std::vector<float>> image_acts;   // post each stage (post-ReLU for conv)
  std::vector<std::vector<int>> pool_argmax;    // per pool stage
  std::vector<std::vector<float>> im2col;       // per conv stage
  std::vector<float> concat;
  std::vector<std::vector<float>> head_acts;    // post each head layer (no ReLU on the last)
};

// Deterministic forward pass; fills cache when given (required for backward).
std::array<float, 2> forward(const Network& net, const StateEncoding& s,
                             ForwardCache* cache = nullptr);

struct Gradients {
  struct Block {
    std::vector<float> w;
    std::vector<float> b;
  };
  std::vector<Block> scalar_branch;
  std::vector<Block> conv;  // one per Conv stage
  std::vector<Block> head;

  void zero();
};

Gradients make_gradients(const Network& net);

// Accumulates gradients of L = sum_a mask[a] (q[a] - target[a])^2 into
// grads and returns L. Max-pool ties break toward the first (row-major)
// index, matching the forward pass.
double backward(const Network& net, const StateEncoding& s, const ForwardCache& cache,
                std::array<float, 2> target, std::array<float, 2> mask, Gradients& grads);

// params -= step * grad
void apply_gradients(Network& net, const Gradients& grads, float step);

// Adaptive-moment option.
struct AdamState {
  std::vector<float> m;
  std::vector<float> v;
  int64_t t = 0;
};
AdamState make_adam_state(const Network& net);
void apply_adam(Network& net, const Gradients& grads, AdamState& state, float lr,
                float beta1 = 0.9f, float beta2 = 0.999f, float eps = 1e-8f);

// Flat parameter access (finite-difference checks, optimizers, IO).
size_t parameter_count(const Network& net);
std::vector<float> get_parameters(const Network& net);
void set_parameters(Network& net, std::span<const float> params);
std::vector<float> flatten(const Gradients& grads);

// Versioned binary weight file: magic "WFQN", u32 version, architecture
// manifest, then little-endian float32 parameter blocks.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace wildfire
