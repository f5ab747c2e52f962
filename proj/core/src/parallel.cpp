#include "labelforge/parallel.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <stop_token>
#include <string>
#include <thread>

#include "labelforge/errors.hpp"

namespace labelforge {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string describe(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

wire::Frame control_frame(wire::MessageKind kind, std::size_t worker, std::size_t generation) {
  wire::Frame f;
  f.kind = kind;
  f.worker = static_cast<std::uint16_t>(worker);
  f.generation = static_cast<std::uint32_t>(generation);
  f.chromosome.fitness = 0.0;
  return f;
}

}  // namespace

WorkerPlan partition_features(std::size_t feature_count, std::size_t worker_count, std::uint64_t base_seed,
                              std::size_t exchange_interval) {
  if (worker_count == 0) throw InvalidWorkerCount("worker count must be at least 1");
  if (worker_count > 65535) throw InvalidWorkerCount("worker count must fit in 16 bits");
  if (exchange_interval == 0) throw ConfigError("exchange interval must be positive");
  WorkerPlan plan;
  plan.worker_count = worker_count;
  plan.exchange_interval = exchange_interval;
  const std::size_t base = feature_count / worker_count;
  const std::size_t extra = feature_count % worker_count;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < worker_count; ++w) {
    const std::size_t size = base + (w < extra ? 1 : 0);
    plan.slices.push_back({begin, begin + size});
    begin += size;
    // Odd stride: seeds stay pairwise distinct modulo 2^64.
    plan.seeds.push_back(base_seed + static_cast<std::uint64_t>(w) * 0x9E3779B97F4A7C15ULL);
  }
  return plan;
}

CompletionTimes completion_time(const TaskTiming& timing) {
  CompletionTimes out;
  for (const auto& tasks : timing.task_seconds) {
    out.per_worker.push_back(std::accumulate(tasks.begin(), tasks.end(), 0.0));
  }
  if (!out.per_worker.empty()) out.makespan = *std::max_element(out.per_worker.begin(), out.per_worker.end());
  return out;
}

void Mailbox::send(std::vector<std::byte> frame) {
  {
    std::lock_guard lock(mutex_);
    frames_.push_back(std::move(frame));
  }
  ready_.notify_one();
}

std::optional<std::vector<std::byte>> Mailbox::receive(Clock::time_point deadline) {
  std::unique_lock lock(mutex_);
  if (!ready_.wait_until(lock, deadline, [&] { return !frames_.empty(); })) return std::nullopt;
  auto frame = std::move(frames_.front());
  frames_.pop_front();
  return frame;
}

std::vector<std::byte> Mailbox::receive() {
  std::unique_lock lock(mutex_);
  ready_.wait(lock, [&] { return !frames_.empty(); });
  auto frame = std::move(frames_.front());
  frames_.pop_front();
  return frame;
}

GatherResult scatter_generate_gather(std::span<const Feature> features, const LayerConfig& layers,
                                     const WorkerPlan& plan) {
  const std::size_t workers = plan.worker_count;
  std::vector<std::vector<CandidateSet>> produced(workers);
  std::vector<std::vector<double>> times(workers);
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](std::size_t w) {
    try {
      const FeatureSlice slice = plan.slices[w];
      produced[w].reserve(slice.size());
      for (std::size_t i = slice.begin; i < slice.end; ++i) {
        const auto start = Clock::now();
        produced[w].push_back(generate_candidates(features[i], layers));
        times[w].push_back(seconds_since(start));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
  }
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w]) throw WorkerFailure(w, describe(errors[w]));
  }

  std::vector<CandidateSet> gathered;
  gathered.reserve(features.size());
  for (auto& part : produced) {
    for (auto& set : part) gathered.push_back(std::move(set));
  }
  GatherResult out;
  out.partition = classify_shortcuts(features, std::move(gathered));
  out.timing.task_seconds = std::move(times);
  return out;
}

IslandResult optimize_islands(const FitnessModel& model, const OptimizerConfig& cfg, const WorkerPlan& plan,
                              const IslandOptions& options) {
  cfg.validate();
  const std::size_t workers = plan.worker_count;
  if (workers == 0) throw InvalidWorkerCount("worker count must be at least 1");
  if (plan.seeds.size() != workers) throw ConfigError("worker plan needs one seed per worker");

  IslandResult result;
  result.traces.resize(workers);
  result.timing.task_seconds.resize(workers);

  if (workers == 1) {
    OptimizerConfig local = cfg;
    local.rng_seed = plan.seeds[0];
    const auto start = Clock::now();
    Optimizer opt(model, local);
    while (opt.generation() < cfg.iterations && !opt.reached_threshold()) {
      opt.step();
      if (options.generation_hook) options.generation_hook(0, opt.generation());
    }
    result.best = opt.best();
    result.traces[0] = std::move(opt.trace());
    result.traces[0].wall_seconds = seconds_since(start);
    result.timing.task_seconds[0].push_back(result.traces[0].wall_seconds);
    return result;
  }

  Mailbox coordinator;
  std::vector<Mailbox> inboxes(workers);
  std::vector<RunTrace> traces(workers);
  std::vector<std::vector<double>> segment_times(workers);
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t interval = plan.exchange_interval;

  auto worker_main = [&](std::stop_token stop, std::size_t w) {
    try {
      OptimizerConfig local = cfg;
      local.rng_seed = plan.seeds[w];
      const auto run_start = Clock::now();
      Optimizer opt(model, local);
      bool stopped = false;
      while (!stopped) {
        const std::size_t target = std::min(cfg.iterations, (opt.generation() / interval + 1) * interval);
        const auto segment_start = Clock::now();
        while (opt.generation() < target && !opt.reached_threshold() && !stop.stop_requested()) {
          opt.step();
          if (options.generation_hook) options.generation_hook(w, opt.generation());
        }
        segment_times[w].push_back(seconds_since(segment_start));
        if (target >= cfg.iterations || stop.stop_requested()) break;

        wire::Frame mine = control_frame(wire::MessageKind::exchange, w, target);
        mine.chromosome = opt.best();
        coordinator.send(wire::encode(mine));
        const wire::Frame reply = wire::decode(inboxes[w].receive());
        if (reply.kind == wire::MessageKind::stop) {
          stopped = true;
        } else {
          opt.inject(reply.chromosome);
        }
        if (opt.reached_threshold()) stopped = true;
      }
      traces[w] = std::move(opt.trace());
      traces[w].wall_seconds = seconds_since(run_start);
      wire::Frame done = control_frame(wire::MessageKind::result, w, opt.generation());
      done.chromosome = opt.best();
      coordinator.send(wire::encode(done));
    } catch (...) {
      errors[w] = std::current_exception();
      wire::Frame failure = control_frame(wire::MessageKind::failure, w, 0);
      coordinator.send(wire::encode(failure));
    }
  };

  std::vector<std::jthread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker_main, w);

  auto abort_all = [&] {
    for (auto& t : threads) t.request_stop();
    for (std::size_t w = 0; w < workers; ++w) {
      inboxes[w].send(wire::encode(control_frame(wire::MessageKind::stop, w, 0)));
    }
    threads.clear();  // joins
  };

  auto collect = [&] {
    std::vector<wire::Frame> frames(workers);
    for (std::size_t n = 0; n < workers; ++n) {
      const auto deadline = Clock::now() + options.exchange_deadline;
      auto bytes = coordinator.receive(deadline);
      if (!bytes) {
        abort_all();
        throw ExchangeTimeout("a worker missed the rendezvous deadline");
      }
      wire::Frame f = wire::decode(*bytes);
      if (f.kind == wire::MessageKind::failure) {
        const std::size_t failed = f.worker;
        abort_all();
        throw WorkerFailure(failed, describe(errors[failed]));
      }
      const std::size_t from = f.worker;
      frames[from] = std::move(f);
    }
    return frames;
  };

  auto pick_best = [](const std::vector<wire::Frame>& frames) {
    std::size_t best = 0;
    for (std::size_t w = 1; w < frames.size(); ++w) {
      if (frames[w].chromosome.fitness < frames[best].chromosome.fitness) best = w;
    }
    return best;
  };

  bool stopped = false;
  for (std::size_t g = interval; g < cfg.iterations && !stopped; g += interval) {
    const auto frames = collect();
    const std::size_t best = pick_best(frames);
    result.exchanges.push_back({g, static_cast<std::uint16_t>(best), frames[best].chromosome.fitness});
    const bool threshold = cfg.early_stop_threshold && frames[best].chromosome.fitness <= *cfg.early_stop_threshold;
    for (std::size_t w = 0; w < workers; ++w) {
      wire::Frame out = control_frame(threshold ? wire::MessageKind::stop : wire::MessageKind::broadcast, best, g);
      out.chromosome = frames[best].chromosome;
      inboxes[w].send(wire::encode(out));
    }
    stopped = threshold;
  }

  const auto finals = collect();
  threads.clear();
  const std::size_t best = pick_best(finals);
  result.best = finals[best].chromosome;
  result.best_worker = best;
  result.traces = std::move(traces);
  result.timing.task_seconds = std::move(segment_times);
  return result;
}

}  // namespace labelforge
