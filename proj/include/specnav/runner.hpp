#pragma once

// Runs every (episode, policy) pair on a pool of threads. Results come back
// ordered by episode id, then by the policy order given, whatever order the
// workers finish in.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "specnav/controller.hpp"

namespace specnav {

inline std::vector<EpisodeResult> run_batch(const World& world, std::span<const Episode> episodes,
                                            std::span<const PolicyConfig> policies, int jobs = 1) {
  for (const auto& p : policies) p.validate();
  std::vector<const Episode*> order;
  for (const auto& ep : episodes) {
    if (ep.env_id != world.env().env_id()) {
      throw ConfigError("episode " + std::to_string(ep.id) + " belongs to '" + ep.env_id + "', not '" +
                        world.env().env_id() + "'");
    }
    order.push_back(&ep);
  }
  std::stable_sort(order.begin(), order.end(), [](const Episode* a, const Episode* b) { return a->id < b->id; });

  const std::size_t total = order.size() * policies.size();
  std::vector<EpisodeResult> results(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        results[i] = run_episode(world, *order[i / policies.size()], policies[i % policies.size()]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  if (workers == 1 || total < 2) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, total); ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace specnav
