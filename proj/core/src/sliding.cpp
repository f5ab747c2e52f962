#include "labelforge/sliding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "labelforge/errors.hpp"

namespace labelforge {
namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

struct Evaluation {
  int mu1 = 0;
  std::size_t feature_conflicts = 0;
  std::size_t ll_all = 0;
  std::size_t ll_optimized = 0;
  double ambiguity = 0.0;
  double priority = 0.0;
  bool touches_own = false;

  // Lexicographic severity: mu1 class first, then number of conflicting features.
  bool less_severe_than(const Evaluation& o) const {
    return mu1 < o.mu1 || (mu1 == o.mu1 && feature_conflicts < o.feature_conflicts);
  }
};

double priority_of(const CandidatePosition& c, FeatureKind kind, const ScoringOptions& options) {
  return kind == FeatureKind::line && !options.line_priority ? 0.0 : c.priority;
}

Evaluation evaluate(std::size_t label, const CandidatePosition& c, const Placement& placement,
                    const SlideContext& ctx) {
  const auto& features = ctx.problem.features;
  Evaluation e;
  const auto hits = ctx.index.conflicts(c.box, label);
  e.feature_conflicts = hits.size();
  for (std::size_t j : hits) {
    e.mu1 = std::max(e.mu1, features[j].kind == FeatureKind::point ? kPointConflict : kLineAreaConflict);
  }
  const Aabb box_bounds = bounds(c.box);
  for (std::size_t j = 0; j < placement.labels.size(); ++j) {
    if (j == label) continue;
    const LabelBox& other = placement.labels[j].box;
    if (!box_bounds.overlaps(bounds(other)) || !boxes_intersect(c.box, other)) continue;
    ++e.ll_all;
    if (placement.optimized[label] && placement.optimized[j]) ++e.ll_optimized;
  }
  e.ambiguity = c.ambiguity;
  e.priority = priority_of(c, features[label].kind, ctx.options);
  e.touches_own = box_feature_intersect(c.box, features[label].geometry);
  return e;
}

double rho2_delta(const Evaluation& now, const Evaluation& trial) {
  return kLabelLabelPenalty * (static_cast<double>(trial.ll_optimized) - static_cast<double>(now.ll_optimized)) +
         (trial.mu1 - now.mu1) + (trial.ambiguity - now.ambiguity) + (trial.priority - now.priority);
}

// Tracks the first conflict-free trial and the best "better position" fallback.
class TrialSelector {
 public:
  TrialSelector(const Evaluation& now, bool require_no_ll) : now_(now), require_no_ll_(require_no_ll) {}

  // Returns true once a conflict-free trial has been accepted.
  bool offer(const SlideMove& move, const Evaluation& trial) {
    if (trial.touches_own && !now_.touches_own) return false;
    if (trial.ll_all > now_.ll_all) return false;
    const double delta = rho2_delta(now_, trial);
    if (trial.mu1 == 0 && trial.feature_conflicts == 0) {
      if (require_no_ll_ && trial.ll_all > 0) return false;
      if (delta >= 0.0) return false;
      accepted_ = move;
      accepted_->outcome = SlideOutcome::eliminated;
      return true;
    }
    if (trial.less_severe_than(now_) && delta <= 0.0) {
      const bool improves = !fallback_ || trial.less_severe_than(fallback_eval_) ||
                            (!fallback_eval_.less_severe_than(trial) && delta < fallback_delta_);
      if (improves) {
        fallback_ = move;
        fallback_->outcome = SlideOutcome::better;
        fallback_eval_ = trial;
        fallback_delta_ = delta;
      }
    }
    return false;
  }

  void set_require_no_ll(bool v) { require_no_ll_ = v; }
  const std::optional<SlideMove>& accepted() const { return accepted_; }
  std::optional<SlideMove> result() const { return accepted_ ? accepted_ : fallback_; }

 private:
  Evaluation now_;
  bool require_no_ll_;
  std::optional<SlideMove> accepted_;
  std::optional<SlideMove> fallback_;
  Evaluation fallback_eval_;
  double fallback_delta_ = std::numeric_limits<double>::infinity();
};

double required_distance(std::span<const ConflictRecord> conflicts, double epsilon) {
  double d = 0.0;
  for (const auto& c : conflicts) d = std::max(d, move_distance(c.r, c.b, epsilon));
  return d;
}

bool mixed_kinds(std::span<const ConflictRecord> conflicts) {
  for (const auto& c : conflicts) {
    if (c.conflicting_kind != conflicts.front().conflicting_kind) return true;
  }
  return false;
}

// Directional trials shared by both cases.
bool try_directions(std::size_t label, const std::vector<double>& directions, double step, const Placement& placement,
                    const SlideContext& ctx, TrialSelector& selector) {
  const CandidatePosition& current = placement.labels[label];
  for (double theta : directions) {
    SlideMove move;
    move.position = current;
    move.position.box.center = current.box.center + unit_vector(theta) * step;
    move.directional = true;
    move.direction = normalize_angle(theta);
    move.distance = step;
    if (selector.offer(move, evaluate(label, move.position, placement, ctx))) return true;
  }
  return false;
}

}  // namespace

void SlideConfig::validate() const {
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("sliding epsilon must be positive");
  if (!epsilon && !(epsilon_height_factor > 0.0)) throw ConfigError("sliding epsilon factor must be positive");
}

double SlideConfig::epsilon_for(const LabelSpec& label) const {
  return epsilon ? *epsilon : epsilon_height_factor * label.height;
}

double move_distance(Point2D r, Point2D b, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("sliding epsilon must be positive");
  return distance(r, b) + epsilon;
}

std::vector<ConflictRecord> detect_label_conflicts(const Placement& placement, std::span<const Feature> features,
                                                   std::size_t label) {
  std::vector<ConflictRecord> out;
  const LabelBox& box = placement.labels[label].box;
  const Aabb bb = bounds(box);
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (j == label || !bb.overlaps(bounds(features[j].geometry))) continue;
    const auto contact = box_feature_contact(box, features[j].geometry);
    if (!contact) continue;
    const auto corners = label_box_corners(box);
    const Point2D nearest = *std::min_element(corners.begin(), corners.end(), [&](Point2D a, Point2D b) {
      return distance(a, *contact) < distance(b, *contact);
    });
    out.push_back({features[label].id, features[j].id, features[j].kind, *contact, nearest, label, j});
  }
  return out;
}

std::vector<ConflictRecord> detect_conflicts(const Placement& placement, std::span<const Feature> features) {
  std::vector<ConflictRecord> out;
  for (std::size_t i = 0; i < placement.labels.size(); ++i) {
    auto records = detect_label_conflicts(placement, features, i);
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

std::optional<SlideMove> slide_point_label(std::size_t label, std::span<const ConflictRecord> conflicts,
                                           const Placement& placement, const SlideContext& ctx) {
  if (conflicts.empty()) return std::nullopt;
  const Feature& feature = ctx.problem.features[label];
  const CandidatePosition& current = placement.labels[label];
  const Evaluation now = evaluate(label, current, placement, ctx);

  // Case I: another fixed position of the same point, nearest ring first.
  TrialSelector selector(now, /*require_no_ll=*/true);
  std::vector<CandidatePosition> fixed = ctx.problem.sets[label].positions;
  std::stable_sort(fixed.begin(), fixed.end(), [](const CandidatePosition& a, const CandidatePosition& b) {
    return a.layer < b.layer;
  });
  std::size_t attempts = 0;
  for (const CandidatePosition& c : fixed) {
    if (c.box == current.box) continue;
    if (attempts++ >= ctx.config.max_attempts) break;
    SlideMove move;
    move.position = c;
    if (selector.offer(move, evaluate(label, c, placement, ctx))) return selector.accepted();
  }

  // Case II: displace the chosen box diagonally by d_mve.
  selector.set_require_no_ll(false);
  std::vector<double> directions;
  for (double deg : ctx.config.point_directions_deg) directions.push_back(deg * kDegree);
  const double step = required_distance(conflicts, ctx.config.epsilon_for(feature.label));
  try_directions(label, directions, step, placement, ctx, selector);
  return selector.result();
}

std::optional<SlideMove> slide_line_area_label(std::size_t label, std::span<const ConflictRecord> conflicts,
                                               const Placement& placement, const SlideContext& ctx) {
  if (conflicts.empty()) return std::nullopt;
  const Feature& feature = ctx.problem.features[label];
  const CandidatePosition& current = placement.labels[label];
  const Evaluation now = evaluate(label, current, placement, ctx);
  TrialSelector selector(now, /*require_no_ll=*/false);

  const double local = current.feature_angle;
  std::vector<double> directions;
  for (double theta : {0.0, std::numbers::pi / 2.0, local, std::numbers::pi, 1.5 * std::numbers::pi,
                       local + std::numbers::pi}) {
    const double t = normalize_angle(theta);
    const bool duplicate = std::any_of(directions.begin(), directions.end(), [&](double d) {
      const double diff = std::abs(d - t);
      return diff < 1e-9 || std::abs(diff - 2.0 * std::numbers::pi) < 1e-9;
    });
    if (!duplicate) directions.push_back(t);
  }
  const double step = required_distance(conflicts, ctx.config.epsilon_for(feature.label));
  try_directions(label, directions, step, placement, ctx, selector);
  return selector.result();
}

SlideResult apply_sliding(const Placement& placement, const LabelingProblem& problem, const SlideConfig& config,
                          const QualityWeights& weights, const ScoringOptions& options) {
  config.validate();
  const auto& features = problem.features;
  const FeatureIndex index(features);
  const SlideContext ctx{problem, index, config, options};

  SlideResult out{placement, {}};
  const ScoreBreakdown before = total_score(placement, features, weights, options);
  out.report.score_before = before.rho2;
  out.report.fitness_before = before.fitness;

  struct Pending {
    std::size_t label;
    int mu1;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < placement.labels.size(); ++i) {
    const int mu1 = index.penalty(placement.labels[i].box, i);
    if (mu1 > 0) pending.push_back({i, mu1});
  }
  out.report.initial_conflicts = pending.size();
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) { return a.mu1 > b.mu1; });

  for (const Pending& p : pending) {
    const auto conflicts = detect_label_conflicts(out.placement, features, p.label);
    if (conflicts.empty()) continue;
    if (config.single_kind_only && mixed_kinds(conflicts)) continue;
    const auto move = features[p.label].kind == FeatureKind::point
                          ? slide_point_label(p.label, conflicts, out.placement, ctx)
                          : slide_line_area_label(p.label, conflicts, out.placement, ctx);
    if (!move) continue;
    out.placement.labels[p.label] = move->position;
    if (move->outcome == SlideOutcome::eliminated) {
      ++out.report.eliminated;
    } else {
      ++out.report.better;
    }
  }

  const ScoreBreakdown after = total_score(out.placement, features, weights, options);
  out.report.score_after = after.rho2;
  out.report.fitness_after = after.fitness;
  return out;
}

}  // namespace labelforge
