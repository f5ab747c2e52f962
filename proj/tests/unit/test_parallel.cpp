#include <doctest.h>

#include <atomic>
#include <random>
#include <stdexcept>
#include <thread>

#include "instances.hpp"
#include "labelforge/errors.hpp"
#include "labelforge/parallel.hpp"

using namespace labelforge;

namespace {

std::vector<std::size_t> sizes(const WorkerPlan& p) {
  std::vector<std::size_t> out;
  for (const auto& s : p.slices) out.push_back(s.size());
  return out;
}

bool same_sets(const std::vector<CandidateSet>& a, const std::vector<CandidateSet>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].feature_id != b[i].feature_id || a[i].positions.size() != b[i].positions.size()) return false;
    for (std::size_t k = 0; k < a[i].positions.size(); ++k) {
      const auto& x = a[i].positions[k];
      const auto& y = b[i].positions[k];
      if (!(x.box == y.box) || x.layer != y.layer || x.base_score != y.base_score || x.slot != y.slot) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("balanced partition") {
  CHECK(sizes(partition_features(10, 3)) == std::vector<std::size_t>{4, 3, 3});
  CHECK(sizes(partition_features(6, 6)) == std::vector<std::size_t>(6, 1));
  CHECK(sizes(partition_features(3, 5)) == std::vector<std::size_t>{1, 1, 1, 0, 0});
  CHECK(sizes(partition_features(0, 2)) == std::vector<std::size_t>{0, 0});
  CHECK_THROWS_AS(partition_features(10, 0), InvalidWorkerCount);

  const WorkerPlan p = partition_features(101, 7, 9, 250);
  CHECK(p.exchange_interval == 250);
  CHECK(p.seeds[0] == 9);
  std::size_t next = 0;
  for (const auto& s : p.slices) {
    CHECK(s.begin == next);
    next = s.end;
  }
  CHECK(next == 101);
  for (std::size_t i = 0; i < p.seeds.size(); ++i) {
    for (std::size_t j = i + 1; j < p.seeds.size(); ++j) CHECK(p.seeds[i] != p.seeds[j]);
  }
}

TEST_CASE("completion time") {
  CHECK(completion_time({{{2, 3, 5}}}).per_worker == std::vector<double>{10});
  CHECK(completion_time({{{2, 3}, {5}}}).makespan == 5);
  // Equal tasks: the balanced split beats one worker.
  TaskTiming one{{std::vector<double>(8, 1.0)}};
  TaskTiming four{{{1, 1}, {1, 1}, {1, 1}, {1, 1}}};
  CHECK(completion_time(four).makespan < completion_time(one).makespan);
}

TEST_CASE("mailbox delivers in order and times out") {
  Mailbox box;
  box.send({std::byte{1}});
  box.send({std::byte{2}});
  CHECK(box.receive() == std::vector<std::byte>{std::byte{1}});
  CHECK(box.receive(std::chrono::steady_clock::now())->front() == std::byte{2});
  CHECK_FALSE(box.receive(std::chrono::steady_clock::now() + std::chrono::milliseconds(5)));
}

TEST_CASE("gather is independent of the worker count") {
  std::mt19937_64 rng(31);
  const auto features = lf_test::random_features(rng, 50, 120);
  const GatherResult base = scatter_generate_gather(features, {}, partition_features(50, 1));
  for (std::size_t w : {2u, 3u, 4u, 8u, 64u}) {
    const GatherResult g = scatter_generate_gather(features, {}, partition_features(50, w));
    CHECK(same_sets(g.partition.full, base.partition.full));
    CHECK(same_sets(g.partition.shortcut, base.partition.shortcut));
    CHECK(g.timing.task_seconds.size() == w);
  }
  const auto direct = partition_by_shortcut(features, {});
  CHECK(same_sets(direct.full, base.partition.full));
  CHECK(same_sets(direct.shortcut, base.partition.shortcut));
}

TEST_CASE("empty gather") {
  const GatherResult g = scatter_generate_gather({}, {}, partition_features(0, 3));
  CHECK(g.partition.full.empty());
  CHECK(g.partition.shortcut.empty());
}

TEST_CASE("a failing worker is reported by id") {
  std::vector<Feature> features{lf_test::make_point(0, 0, 0, "a"), lf_test::make_point(1, 5, 5, "b"),
                                lf_test::make_point(2, 9, 9, "c")};
  features[2].label.height = -1;  // invalid: raises inside generation
  try {
    scatter_generate_gather(features, {}, partition_features(3, 3));
    FAIL("expected WorkerFailure");
  } catch (const WorkerFailure& e) {
    CHECK(e.worker() == 2);
  }
}

TEST_CASE("one island equals a plain run") {
  std::mt19937_64 rng(12);
  const auto problem = lf_test::build_problem(lf_test::random_features(rng, 10, 15, {1, 1, 0}));
  const FitnessModel model(problem, {});
  OptimizerConfig cfg;
  cfg.iterations = 1200;
  cfg.rng_seed = 5;
  const RunResult serial = run(model, cfg);
  const IslandResult islands = optimize_islands(model, cfg, partition_features(10, 1, 5, 500));
  CHECK(islands.best == serial.best);
  CHECK(islands.traces.at(0).best_per_generation == serial.trace.best_per_generation);
  CHECK(islands.exchanges.empty());
}

TEST_CASE("island exchanges share the global best") {
  std::mt19937_64 rng(14);
  const auto problem = lf_test::build_problem(lf_test::random_features(rng, 16, 20, {1, 1, 0}));
  const FitnessModel model(problem, {});
  OptimizerConfig cfg;
  cfg.iterations = 1200;
  cfg.population_size = 20;
  const WorkerPlan plan = partition_features(16, 4, 3, 500);
  const IslandResult r = optimize_islands(model, cfg, plan);
  REQUIRE(r.exchanges.size() == 2);
  CHECK(r.exchanges[0].generation == 500);
  CHECK(r.exchanges[1].generation == 1000);
  CHECK(r.exchanges[1].fitness <= r.exchanges[0].fitness);
  for (const auto& t : r.traces) {
    REQUIRE(t.best_per_generation.size() == 1200);
    // After injection every island holds a chromosome at least as good as the exchanged best.
    CHECK(t.best_per_generation[499] <= r.exchanges[0].fitness);
    CHECK(t.best_per_generation[999] <= r.exchanges[1].fitness);
  }
  double best = r.traces[0].best_per_generation.back();
  for (const auto& t : r.traces) best = std::min(best, t.best_per_generation.back());
  CHECK(r.best.fitness == best);
  CHECK(r.best.fitness == model.fitness(r.best.genes));

  const IslandResult again = optimize_islands(model, cfg, plan);
  CHECK(again.best == r.best);
  CHECK(again.best_worker == r.best_worker);
}

TEST_CASE("worker exceptions surface as WorkerFailure") {
  std::mt19937_64 rng(15);
  const auto problem = lf_test::build_problem(lf_test::random_features(rng, 6, 20));
  const FitnessModel model(problem, {});
  OptimizerConfig cfg;
  cfg.iterations = 100;
  IslandOptions options;
  options.generation_hook = [](std::size_t worker, std::size_t generation) {
    if (worker == 1 && generation == 10) throw std::runtime_error("boom");
  };
  try {
    optimize_islands(model, cfg, partition_features(6, 3, 1, 50), options);
    FAIL("expected WorkerFailure");
  } catch (const WorkerFailure& e) {
    CHECK(e.worker() == 1);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
}

TEST_CASE("a worker missing the rendezvous times out") {
  std::mt19937_64 rng(16);
  const auto problem = lf_test::build_problem(lf_test::random_features(rng, 6, 20));
  const FitnessModel model(problem, {});
  OptimizerConfig cfg;
  cfg.iterations = 100;
  std::atomic<bool> release{false};
  IslandOptions options;
  options.exchange_deadline = std::chrono::milliseconds(100);
  options.generation_hook = [&](std::size_t worker, std::size_t generation) {
    if (worker == 2 && generation == 5) {
      while (!release) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  };
  std::thread releaser([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    release = true;
  });
  CHECK_THROWS_AS(optimize_islands(model, cfg, partition_features(6, 3, 1, 50), options), ExchangeTimeout);
  release = true;
  releaser.join();
}
