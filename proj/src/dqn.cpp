#include "wildfire/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wildfire {

void ReplayBuffer::push(ExperienceTuple t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

double q_target(const ExperienceTuple& tuple, const Network& target_net, double gamma) {
  if (tuple.terminal) return tuple.reward;
  const auto q = forward(target_net, tuple.s_next);
  return tuple.reward + gamma * std::max(q[0], q[1]);
}

TrainResult train(Environment& env, const NetworkConfig& net_config, const TrainParams& params,
                  const std::function<void(const EpisodeLog&)>& on_episode) {
  Network net = make_network(net_config, params.seed);
  Network target = net;
  ReplayBuffer buffer(params.buffer_capacity);
  Rng rng(hash_u64(params.seed, 0x747261696eULL));
  Gradients grads = make_gradients(net);
  AdamState adam = make_adam_state(net);
  ForwardCache cache;

  TrainResult result{net, {}};
  int64_t updates = 0;
  double lr = params.lr;

  const int anneal_episodes = std::max(1, int(params.episodes * params.eps_anneal_frac));

  for (int episode = 0; episode < params.episodes; ++episode) {
    const double frac = std::min(1.0, double(episode) / anneal_episodes);
    const double eps = params.eps_start + (params.eps_end - params.eps_start) * frac;

    auto states = env.reset(hash_u64(params.seed, 0x657069ULL, uint64_t(episode)));
    const int agents = env.agent_count();
    double episode_return = 0.0;
    double loss_sum = 0.0;
    int64_t loss_count = 0;

    bool terminal = false;
    while (!terminal) {
      std::vector<int> actions(agents);
      for (int a = 0; a < agents; ++a) {
        if (rng.uniform() < eps) {
          actions[a] = rng.uniform() < 0.5 ? 0 : 1;
        } else {
          const auto q = forward(net, states[a]);
          actions[a] = q[1] > q[0] ? 1 : 0;
        }
      }

      const auto step = env.step(actions);
      terminal = step.terminal || step.truncated;
      for (int a = 0; a < agents; ++a) {
        episode_return += step.reward[a];
        buffer.push({states[a], actions[a], step.reward[a], step.next[a], step.terminal});
      }
      states = step.next;

      if (buffer.size() >= std::max<size_t>(params.warmup, size_t(params.batch))) {
        for (int u = 0; u < params.updates_per_step; ++u) {
          grads.zero();
          double batch_loss = 0.0;
          for (int b = 0; b < params.batch; ++b) {
            const auto& t = buffer.sample(rng);
            const double target_value = q_target(t, target, params.gamma);
            const auto q = forward(net, t.s, &cache);
            std::array<float, 2> target_vec = {q[0], q[1]};
            std::array<float, 2> mask = {0.0f, 0.0f};
            target_vec[t.action] = float(target_value);
            mask[t.action] = 1.0f;
            batch_loss += backward(net, t.s, cache, target_vec, mask, grads);
          }
          batch_loss /= params.batch;
          if (!std::isfinite(batch_loss)) {
            throw std::runtime_error("training diverged: non-finite loss at update " +
                                     std::to_string(updates));
          }
          if (params.use_adam) {
            apply_adam(net, grads, adam, float(lr / params.batch));
          } else {
            apply_gradients(net, grads, float(lr / params.batch));
          }
          ++updates;
          loss_sum += batch_loss;
          ++loss_count;
          if (params.lr_decay_every > 0 && updates % params.lr_decay_every == 0) {
            lr *= params.lr_decay;
          }
          if (updates % params.target_sync == 0) {
            target = net;
          }
        }
      }
    }

    EpisodeLog log;
    log.episode = episode;
    log.total_return = episode_return;
    log.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    log.epsilon = eps;
    log.updates = updates;
    result.log.push_back(log);
    if (on_episode) on_episode(log);
  }

  result.net = std::move(net);
  return result;
}

void write_training_log(const std::vector<EpisodeLog>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "episode,return,loss,epsilon,updates\n";
  for (const auto& e : log) {
    out << e.episode << ',' << e.total_return << ',' << e.mean_loss << ',' << e.epsilon << ','
        << e.updates << '\n';
  }
}

}  // namespace wildfire
