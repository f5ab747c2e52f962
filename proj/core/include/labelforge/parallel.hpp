#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "labelforge/candidates.hpp"
#include "labelforge/optimizer.hpp"
#include "labelforge/wire.hpp"

namespace labelforge {

struct FeatureSlice {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const FeatureSlice&, const FeatureSlice&) = default;
};

struct WorkerPlan {
  std::size_t worker_count = 1;
  std::vector<FeatureSlice> slices;
  std::vector<std::uint64_t> seeds;  // seeds[0] is the base seed
  std::size_t exchange_interval = 500;
};

// Contiguous slices whose sizes differ by at most one. Throws InvalidWorkerCount for zero workers.
WorkerPlan partition_features(std::size_t feature_count, std::size_t worker_count, std::uint64_t base_seed = 1,
                              std::size_t exchange_interval = 500);

// Per-worker processing times of the tasks each worker ran, in seconds.
struct TaskTiming {
  std::vector<std::vector<double>> task_seconds;
};

struct CompletionTimes {
  std::vector<double> per_worker;
  double makespan = 0.0;
};

CompletionTimes completion_time(const TaskTiming& timing);

// Blocking FIFO of encoded frames; the only channel between the coordinator and workers.
class Mailbox {
 public:
  void send(std::vector<std::byte> frame);
  // Empty when the deadline passes first.
  std::optional<std::vector<std::byte>> receive(std::chrono::steady_clock::time_point deadline);
  std::vector<std::byte> receive();

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<std::vector<std::byte>> frames_;
};

struct GatherResult {
  ShortcutPartition partition;
  TaskTiming timing;
};

// Workers generate candidate sets for their slice; the coordinator gathers them in
// feature order and performs the shortcut classification. Output is independent of W.
GatherResult scatter_generate_gather(std::span<const Feature> features, const LayerConfig& layers,
                                     const WorkerPlan& plan);

struct ExchangeRecord {
  std::size_t generation = 0;
  std::uint16_t source_worker = 0;
  double fitness = 0.0;
};

struct IslandOptions {
  std::chrono::milliseconds exchange_deadline{std::chrono::minutes(10)};
  // Called by each worker after every generation, on that worker's thread.
  std::function<void(std::size_t worker, std::size_t generation)> generation_hook;
};

struct IslandResult {
  Chromosome best;
  std::size_t best_worker = 0;
  std::vector<RunTrace> traces;
  std::vector<ExchangeRecord> exchanges;
  TaskTiming timing;
};

// Every worker evolves its own population over the full problem from plan.seeds[w].
// At each multiple of the exchange interval the coordinator collects every worker's
// best, picks the global best (ties to the lowest worker id) and sends it back; each
// worker replaces its worst member with it.
IslandResult optimize_islands(const FitnessModel& model, const OptimizerConfig& cfg, const WorkerPlan& plan,
                              const IslandOptions& options = {});

}  // namespace labelforge
