#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "labelforge/errors.hpp"

namespace labelforge::cli {
namespace {

using nlohmann::json;

std::string_view to_string(InitMode m) { return m == InitMode::elite ? "elite" : "random"; }
std::string_view to_string(MutationDirection d) { return d == MutationDirection::as_printed ? "as-printed" : "toward"; }

InitMode parse_init_mode(const std::string& s) {
  if (s == "elite") return InitMode::elite;
  if (s == "random") return InitMode::random;
  throw ConfigError("init mode must be 'elite' or 'random', got '" + s + "'");
}

MutationDirection parse_direction(const std::string& s) {
  if (s == "as-printed") return MutationDirection::as_printed;
  if (s == "toward") return MutationDirection::toward;
  throw ConfigError("mutation direction must be 'as-printed' or 'toward', got '" + s + "'");
}

template <std::size_t N>
std::array<double, N> to_array(const std::vector<double>& v, const char* what) {
  if (v.size() != N) {
    throw ConfigError(std::string(what) + " needs exactly " + std::to_string(N) + " comma-separated values");
  }
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

std::size_t parse_workers_env(const char* text) {
  std::string s(text);
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || s.front() == '-') {
    throw ConfigError("LABELFORGE_WORKERS must be a positive integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

void write_output(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
  } else {
    write_text_file(cfg.output, text);
  }
}

Dataset load(const RunConfig& cfg, std::ostream& err) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  Dataset data = read_geojson(cfg.input, cfg.read_options());
  for (const auto& w : data.warnings) err << "warning: " << w << "\n";
  return data;
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

// Applies the options present on the command line on top of a base config.
class Overrides {
 public:
  template <class T>
  CLI::Option* add(CLI::App& app, const std::string& names, T RunConfig::*member, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app.add_option(names, *value, help);
    setters_.push_back({opt, [value, member](RunConfig& c) { c.*member = *value; }});
    return opt;
  }

  CLI::Option* add_flag(CLI::App& app, const std::string& names, bool RunConfig::*member, const std::string& help) {
    auto value = std::make_shared<bool>(false);
    CLI::Option* opt = app.add_flag(names, *value, help);
    setters_.push_back({opt, [value, member](RunConfig& c) { c.*member = *value; }});
    return opt;
  }

  CLI::Option* add_custom(CLI::App& app, const std::string& names, const std::string& help,
                          std::function<void(RunConfig&, const std::string&)> apply) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = app.add_option(names, *value, help);
    setters_.push_back({opt, [value, apply](RunConfig& c) { apply(c, *value); }});
    return opt;
  }

  void apply(RunConfig& cfg) const {
    for (const auto& [opt, set] : setters_) {
      if (opt->count() > 0) set(cfg);
    }
  }

 private:
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters_;
};

std::vector<double> split_doubles(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  return out;
}

struct CommandLine {
  std::string config_path;
  std::string dump_path;
  Overrides overrides;
  CLI::Option* workers_opt = nullptr;
};

void add_run_options(CLI::App& app, CommandLine& cl) {
  Overrides& o = cl.overrides;
  app.add_option("--config", cl.config_path, "JSON config file; command-line flags take precedence");
  app.add_option("--dump-config", cl.dump_path, "Write the resolved config as JSON ('-' for stdout) and exit");
  o.add(app, "-i,--input", &RunConfig::input, "GeoJSON FeatureCollection");
  o.add(app, "--report", &RunConfig::report, "Placement report path (JSON)");
  o.add(app, "--svg", &RunConfig::svg, "SVG map output path");
  cl.workers_opt = o.add(app, "-w,--workers", &RunConfig::workers, "Worker count (env LABELFORGE_WORKERS)");
  o.add(app, "--iterations", &RunConfig::iterations, "Generations per worker");
  o.add(app, "--population", &RunConfig::population, "Population size per worker");
  o.add(app, "--seed", &RunConfig::seed, "Base RNG seed");
  o.add(app, "--crossover-rate", &RunConfig::crossover_rate, "GA crossover rate");
  o.add(app, "--mutation-rate", &RunConfig::mutation_rate, "Per-gene mutation probability");
  o.add(app, "--ga-fraction", &RunConfig::ga_fraction, "Share of offspring produced by the GA operator");
  o.add(app, "--dde-scale", &RunConfig::dde_scale, "DDE scale factor F");
  o.add_custom(app, "--weights", "w1,w2,w3,w4", [](RunConfig& c, const std::string& v) {
    c.weights = to_array<4>(split_doubles(v, "--weights"), "--weights");
  });
  o.add(app, "--exchange-interval", &RunConfig::exchange_interval, "Generations between best-solution exchanges");
  o.add_custom(app, "--layer-radii", "r1,r2,r3 in map units", [](RunConfig& c, const std::string& v) {
    c.layer_radii = to_array<3>(split_doubles(v, "--layer-radii"), "--layer-radii");
  });
  o.add_custom(app, "--epsilon", "Sliding safety margin in map units", [](RunConfig& c, const std::string& v) {
    const auto values = split_doubles(v, "--epsilon");
    if (values.size() != 1) throw ConfigError("--epsilon takes one number");
    c.epsilon = values[0];
  });
  o.add_custom(app, "--init-mode", "elite | random",
               [](RunConfig& c, const std::string& v) { c.init_mode = parse_init_mode(v); });
  o.add_custom(app, "--mutation-direction", "as-printed | toward",
               [](RunConfig& c, const std::string& v) { c.mutation_direction = parse_direction(v); });
  o.add_flag(app, "--strict", &RunConfig::strict, "No line priority in S4; single-kind sliding only");
  o.add(app, "--char-width", &RunConfig::char_width, "Default label character width");
  o.add(app, "--label-height", &RunConfig::label_height, "Default label height");
  o.add_flag(app, "--record-time", &RunConfig::record_time, "Store wall time in the report");
  o.add(app, "-o,--output", &RunConfig::output, "CSV output for trace and bench (default stdout)");
  o.add(app, "--trace-workers", &RunConfig::trace_workers, "trace: also run this many workers");
  o.add_custom(app, "--bench-workers", "bench: comma-separated worker counts", [](RunConfig& c, const std::string& v) {
    c.bench_workers.clear();
    for (double d : split_doubles(v, "--bench-workers")) {
      if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) {
        throw ConfigError("--bench-workers entries must be positive integers");
      }
      c.bench_workers.push_back(static_cast<std::size_t>(d));
    }
  });
}

RunConfig resolve(const CommandLine& cl) {
  RunConfig cfg;
  if (!cl.config_path.empty()) {
    try {
      cfg = config_from_json(read_text_file(cl.config_path));
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
  }
  if (cl.workers_opt->count() == 0) {
    if (const char* env = std::getenv("LABELFORGE_WORKERS"); env != nullptr && *env != '\0') {
      cfg.workers = parse_workers_env(env);
    }
  }
  cl.overrides.apply(cfg);
  cfg.validate();
  return cfg;
}

}  // namespace

void RunConfig::validate() const {
  pipeline().validate();
  if (!(char_width > 0.0) || !(label_height > 0.0)) throw ConfigError("label size defaults must be positive");
  if (bench_workers.empty()) throw ConfigError("bench needs at least one worker count");
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.layers.absolute = layer_radii;
  p.optimizer.population_size = population;
  p.optimizer.iterations = iterations;
  p.optimizer.crossover_rate = crossover_rate;
  p.optimizer.mutation_rate = mutation_rate;
  p.optimizer.ga_fraction = ga_fraction;
  p.optimizer.dde_scale = dde_scale;
  p.optimizer.rng_seed = seed;
  p.optimizer.init_mode = init_mode;
  p.optimizer.mutation_direction = mutation_direction;
  p.weights = {weights[0], weights[1], weights[2], weights[3]};
  p.sliding.epsilon = epsilon;
  p.workers = workers;
  p.exchange_interval = exchange_interval;
  p.record_wall_time = record_time;
  if (strict) p.apply_strict_mode();
  return p;
}

ReadOptions RunConfig::read_options() const { return {char_width, label_height}; }

std::string config_to_json(const RunConfig& c) {
  json j = {{"input", c.input},
            {"report", c.report},
            {"svg", c.svg},
            {"workers", c.workers},
            {"iterations", c.iterations},
            {"population", c.population},
            {"seed", c.seed},
            {"crossover_rate", c.crossover_rate},
            {"mutation_rate", c.mutation_rate},
            {"ga_fraction", c.ga_fraction},
            {"dde_scale", c.dde_scale},
            {"weights", c.weights},
            {"exchange_interval", c.exchange_interval},
            {"layer_radii", c.layer_radii ? json(*c.layer_radii) : json(nullptr)},
            {"epsilon", c.epsilon ? json(*c.epsilon) : json(nullptr)},
            {"strict", c.strict},
            {"init_mode", std::string(to_string(c.init_mode))},
            {"mutation_direction", std::string(to_string(c.mutation_direction))},
            {"char_width", c.char_width},
            {"label_height", c.label_height},
            {"record_time", c.record_time},
            {"trace_workers", c.trace_workers},
            {"bench_workers", c.bench_workers},
            {"output", c.output}};
  return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{
      "input",       "report",      "svg",          "workers",      "iterations",         "population",
      "seed",        "crossover_rate", "mutation_rate", "ga_fraction", "dde_scale",        "weights",
      "exchange_interval", "layer_radii", "epsilon", "strict", "init_mode",         "mutation_direction",
      "char_width",  "label_height", "record_time", "trace_workers", "bench_workers",     "output"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("input", c.input);
    get("report", c.report);
    get("svg", c.svg);
    get("workers", c.workers);
    get("iterations", c.iterations);
    get("population", c.population);
    get("seed", c.seed);
    get("crossover_rate", c.crossover_rate);
    get("mutation_rate", c.mutation_rate);
    get("ga_fraction", c.ga_fraction);
    get("dde_scale", c.dde_scale);
    get("weights", c.weights);
    get("exchange_interval", c.exchange_interval);
    if (j.contains("layer_radii")) {
      c.layer_radii = j["layer_radii"].is_null() ? std::nullopt
                                                 : std::optional(j["layer_radii"].get<std::array<double, 3>>());
    }
    if (j.contains("epsilon")) {
      c.epsilon = j["epsilon"].is_null() ? std::nullopt : std::optional(j["epsilon"].get<double>());
    }
    get("strict", c.strict);
    if (j.contains("init_mode")) c.init_mode = parse_init_mode(j["init_mode"].get<std::string>());
    if (j.contains("mutation_direction")) {
      c.mutation_direction = parse_direction(j["mutation_direction"].get<std::string>());
    }
    get("char_width", c.char_width);
    get("label_height", c.label_height);
    get("record_time", c.record_time);
    get("trace_workers", c.trace_workers);
    get("bench_workers", c.bench_workers);
    get("output", c.output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config has a wrongly typed value: ") + e.what());
  }
  return c;
}

int cmd_place(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load(cfg, std::cerr);
  const PipelineResult result = run_pipeline(data, cfg.pipeline());
  if (!cfg.report.empty()) write_report(result.report, cfg.report);
  if (!cfg.svg.empty()) render_svg(data, result.sliding.placement, cfg.svg);
  const auto& r = result.report;
  out << "conflicts " << r.lf_conflict_count + r.ll_conflict_count << " (label-feature " << r.lf_conflict_count
      << ", label-label " << r.ll_conflict_count << ") | lowest score " << fixed(r.lowest_score, 2)
      << " | iterations " << r.iterations << " | obtained score " << fixed(r.after.fitness, 2) << " | time "
      << fixed(result.wall_seconds / 60.0, 2) << " min\n";
  return kOk;
}

int cmd_trace(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load(cfg, std::cerr);
  const PipelineConfig base = cfg.pipeline();
  const WorkerPlan single = partition_features(data.features.size(), 1, cfg.seed, cfg.exchange_interval);
  GatherResult gathered = scatter_generate_gather(data.features, base.layers, single);
  const LabelingProblem problem = make_problem(data.features, std::move(gathered.partition));
  const FitnessModel model(problem, base.weights, base.scoring);

  std::vector<std::size_t> worker_counts{1};
  if (cfg.trace_workers > 1) worker_counts.push_back(cfg.trace_workers);

  std::ostringstream csv;
  csv << "run,init_mode,workers,generation,best_fitness,injected\n";
  std::size_t run_id = 0;
  for (InitMode mode : {InitMode::elite, InitMode::random}) {
    for (std::size_t w : worker_counts) {
      OptimizerConfig oc = base.optimizer;
      oc.init_mode = mode;
      const WorkerPlan plan = partition_features(data.features.size(), w, cfg.seed, cfg.exchange_interval);
      const IslandResult result = optimize_islands(model, oc, plan);
      std::vector<bool> injected(oc.iterations + 1, false);
      for (const auto& e : result.exchanges) {
        if (e.generation < injected.size()) injected[e.generation] = true;
      }
      for (std::size_t g = 1; g <= oc.iterations; ++g) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : result.traces) {
          if (t.best_per_generation.empty()) {
            best = std::min(best, t.initial_best);
          } else {
            best = std::min(best, t.best_per_generation[std::min(g, t.best_per_generation.size()) - 1]);
          }
        }
        csv << run_id << ',' << to_string(mode) << ',' << w << ',' << g << ',' << fixed(best, 6) << ','
            << (injected[g] ? 1 : 0) << '\n';
      }
      ++run_id;
    }
  }
  write_output(cfg, csv.str(), out);
  return kOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = load(cfg, std::cerr);
  std::vector<std::size_t> counts = cfg.bench_workers;
  if (std::find(counts.begin(), counts.end(), 1) == counts.end()) counts.insert(counts.begin(), 1);

  std::ostringstream csv;
  csv << "workers,wall_seconds,makespan_seconds,speedup,final_fitness,rho2,lf_conflicts,ll_conflicts\n";
  double baseline = 0.0;
  for (std::size_t w : counts) {
    PipelineConfig p = cfg.pipeline();
    p.workers = w;
    const PipelineResult r = run_pipeline(data, p);
    const double makespan = completion_time(r.islands.timing).makespan;
    if (w == 1) baseline = r.wall_seconds;
    csv << w << ',' << fixed(r.wall_seconds, 6) << ',' << fixed(makespan, 6) << ','
        << fixed(baseline > 0.0 ? baseline / r.wall_seconds : 0.0, 3) << ',' << fixed(r.report.after.fitness, 6)
        << ',' << fixed(r.report.after.rho2, 6) << ',' << r.report.lf_conflict_count << ','
        << r.report.ll_conflict_count << '\n';
  }
  write_output(cfg, csv.str(), out);
  return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"labelforge: label placement for point, line and area features"};
  app.require_subcommand(1);
  CommandLine place_cl, trace_cl, bench_cl;
  CLI::App* place = app.add_subcommand("place", "Place labels and write a report");
  CLI::App* trace = app.add_subcommand("trace", "Per-generation best fitness for both init modes (CSV)");
  CLI::App* bench = app.add_subcommand("bench", "Wall time and score across worker counts (CSV)");
  add_run_options(*place, place_cl);
  add_run_options(*trace, trace_cl);
  add_run_options(*bench, bench_cl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    CommandLine& cl = place->parsed() ? place_cl : trace->parsed() ? trace_cl : bench_cl;
    const RunConfig cfg = resolve(cl);
    if (!cl.dump_path.empty()) {
      const std::string text = config_to_json(cfg);
      if (cl.dump_path == "-") {
        out << text;
      } else {
        write_text_file(cl.dump_path, text);
      }
      return kOk;
    }
    if (place->parsed()) return cmd_place(cfg, out);
    if (trace->parsed()) return cmd_trace(cfg, out);
    return cmd_bench(cfg, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kDataError;
  } catch (const WorkerFailure& e) {
    err << "worker failure: " << e.what() << "\n";
    return kWorkerFailure;
  } catch (const ExchangeTimeout& e) {
    err << "worker failure: " << e.what() << "\n";
    return kWorkerFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace labelforge::cli
