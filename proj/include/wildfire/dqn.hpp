#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wildfire/network.hpp"
#include "wildfire/rng.hpp"

namespace wildfire {

struct ExperienceTuple {
  StateEncoding s;
  int action = 0;  // 0 or 1
  float reward = 0.0f;
  StateEncoding s_next;
  bool terminal = false;
};

// Fixed-capacity ring buffer with uniform sampling over current contents.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(ExperienceTuple t);
  size_t size() const { return storage_.size(); }
  size_t capacity() const { return capacity_; }
  const ExperienceTuple& at(size_t i) const { return storage_[i]; }
  const ExperienceTuple& sample(Rng& rng) const { return storage_[rng.uniform_int(int(storage_.size()))]; }

 private:
  size_t capacity_;
  size_t next_ = 0;
  std::vector<ExperienceTuple> storage_;
};

// r + gamma * max_a' Q_target(s', a') for non-terminal tuples, r otherwise.
double q_target(const ExperienceTuple& tuple, const Network& target_net, double gamma);

// Episodic environment driven by the trainer. Each agent contributes one
// tuple per step; all agents act simultaneously and share one network.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int agent_count() const = 0;
  // Starts an episode; returns the per-agent initial states.
  virtual std::vector<StateEncoding> reset(uint64_t seed) = 0;
  struct StepResult {
    std::vector<StateEncoding> next;  // per agent
    std::vector<float> reward;       // per agent
    bool terminal = false;   // true episode end: targets stop bootstrapping
    bool truncated = false;  // time cap: episode ends but targets bootstrap
  };
  virtual StepResult step(const std::vector<int>& actions) = 0;
};

struct TrainParams {
  int episodes = 200;
  double gamma = 0.99;
  double lr = 1e-4;
  double lr_decay = 0.5;        // multiplies lr every lr_decay_every updates (0 disables)
  int64_t lr_decay_every = 0;
  int batch = 32;
  size_t buffer_capacity = 100000;
  size_t warmup = 1000;         // tuples before updates begin
  int updates_per_step = 1;
  int64_t target_sync = 1000;   // updates between target-network syncs
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_anneal_frac = 1.0 / 3.0;  // fraction of episodes to reach eps_end
  bool use_adam = false;
  uint64_t seed = 1;
};

struct EpisodeLog {
  int episode = 0;
  double total_return = 0.0;
  double mean_loss = 0.0;
  double epsilon = 0.0;
  int64_t updates = 0;
};

struct TrainResult {
  Network net;
  std::vector<EpisodeLog> log;
};

// Deep Q-learning with experience replay and a periodically synced target
// network, epsilon-greedy exploration, single-threaded and deterministic
// for a given master seed. Throws std::runtime_error on a non-finite loss.
TrainResult train(Environment& env, const NetworkConfig& net_config, const TrainParams& params,
                  const std::function<void(const EpisodeLog&)>& on_episode = nullptr);

void write_training_log(const std::vector<EpisodeLog>& log, const std::string& path);

}  // namespace wildfire
