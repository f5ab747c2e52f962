#include "labelforge/quality.hpp"

#include <algorithm>
#include <unordered_map>

#include "labelforge/errors.hpp"

namespace labelforge {
namespace {

double priority_term(const CandidatePosition& c, FeatureKind kind, const ScoringOptions& options) {
  if (kind == FeatureKind::line && !options.line_priority) return 0.0;
  return c.priority;
}

std::vector<Aabb> box_bounds(const std::vector<CandidatePosition>& labels) {
  std::vector<Aabb> out;
  out.reserve(labels.size());
  for (const auto& c : labels) out.push_back(bounds(c.box));
  return out;
}

std::vector<Aabb> feature_bounds(std::span<const Feature> features) {
  std::vector<Aabb> out;
  out.reserve(features.size());
  for (const Feature& f : features) out.push_back(bounds(f.geometry));
  return out;
}

}  // namespace

void QualityWeights::validate() const {
  for (double w : {w1, w2, w3, w4}) {
    if (!(w >= 0.0)) throw ConfigError("quality weights must be non-negative");
  }
  if (w1 < w2 || w2 < std::max(w3, w4)) throw ConfigError("quality weights must satisfy w1 >= w2 >= max(w3, w4)");
}

double weighted(const ScoreBreakdown& s, const QualityWeights& w) {
  return s.s1 * w.w1 + s.s2 * w.w2 + s.s3 * w.w3 + s.s4 * w.w4;
}

FeatureIndex::FeatureIndex(std::span<const Feature> features)
    : features_(features), grid_(feature_bounds(features)) {}

int FeatureIndex::penalty(const LabelBox& box, std::size_t own) const {
  int mu1 = 0;
  for (std::size_t j : grid_.query(bounds(box))) {
    if (j == own || !box_feature_intersect(box, features_[j].geometry)) continue;
    if (features_[j].kind == FeatureKind::point) return kPointConflict;
    mu1 = kLineAreaConflict;
  }
  return mu1;
}

std::vector<std::size_t> FeatureIndex::conflicts(const LabelBox& box, std::size_t own) const {
  std::vector<std::size_t> out;
  for (std::size_t j : grid_.query(bounds(box))) {
    if (j != own && box_feature_intersect(box, features_[j].geometry)) out.push_back(j);
  }
  return out;
}

int label_feature_penalty(const LabelBox& box, std::size_t own, std::span<const Feature> features) {
  int mu1 = 0;
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (j == own || !box_feature_intersect(box, features[j].geometry)) continue;
    if (features[j].kind == FeatureKind::point) return kPointConflict;
    mu1 = kLineAreaConflict;
  }
  return mu1;
}

LabelLabelScore score_label_label(const Placement& placement) {
  LabelLabelScore out;
  const GridIndex grid(box_bounds(placement.labels));
  for (std::size_t i = 0; i < placement.labels.size(); ++i) {
    for (std::size_t j : grid.query(grid.item(i))) {
      if (j <= i || !boxes_intersect(placement.labels[i].box, placement.labels[j].box)) continue;
      ++out.conflict_count;
      if (placement.optimized[i] && placement.optimized[j]) ++out.pair_count;
    }
  }
  out.s1 = kLabelLabelPenalty * static_cast<double>(out.pair_count);
  return out;
}

LabelFeatureScore score_label_feature(const Placement& placement, std::span<const Feature> features) {
  const FeatureIndex index(features);
  LabelFeatureScore out;
  for (std::size_t i = 0; i < placement.labels.size(); ++i) {
    const int mu1 = index.penalty(placement.labels[i].box, i);
    out.s2 += mu1;
    if (mu1 > 0) ++out.conflict_count;
  }
  return out;
}

double score_ambiguity(const Placement& placement) {
  double s3 = 0.0;
  for (const auto& c : placement.labels) s3 += c.ambiguity;
  return s3;
}

double score_priority(const Placement& placement, std::span<const Feature> features, const ScoringOptions& options) {
  double s4 = 0.0;
  for (std::size_t i = 0; i < placement.labels.size(); ++i) {
    s4 += priority_term(placement.labels[i], features[i].kind, options);
  }
  return s4;
}

ScoreBreakdown total_score(const Placement& placement, std::span<const Feature> features, const QualityWeights& weights,
                           const ScoringOptions& options) {
  ScoreBreakdown s;
  const LabelLabelScore ll = score_label_label(placement);
  const LabelFeatureScore lf = score_label_feature(placement, features);
  s.s1 = ll.s1;
  s.ll_conflict_count = ll.conflict_count;
  s.s2 = lf.s2;
  s.lf_conflict_count = lf.conflict_count;
  s.s3 = score_ambiguity(placement);
  s.s4 = score_priority(placement, features, options);
  s.rho2 = s.s1 + s.s2 + s.s3 + s.s4;
  s.fitness = weighted(s, weights);
  return s;
}

LabelingProblem make_problem(std::vector<Feature> features, ShortcutPartition partition) {
  std::unordered_map<std::int64_t, std::size_t> index_of;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!index_of.emplace(features[i].id, i).second) {
      throw DataError("duplicate feature id " + std::to_string(features[i].id));
    }
  }
  LabelingProblem problem;
  problem.sets.resize(features.size());
  std::vector<bool> seen(features.size(), false);
  auto place = [&](CandidateSet&& set) {
    const auto it = index_of.find(set.feature_id);
    if (it == index_of.end() || seen[it->second]) {
      throw DataError("candidate set for unknown or repeated feature " + std::to_string(set.feature_id));
    }
    seen[it->second] = true;
    problem.sets[it->second] = std::move(set);
  };
  for (auto& set : partition.shortcut) place(std::move(set));
  for (auto& set : partition.full) place(std::move(set));
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!seen[i]) throw DataError("feature " + std::to_string(features[i].id) + " has no candidate set");
    if (problem.sets[i].positions.size() == kCandidatesPerFeature) problem.full.push_back(i);
  }
  problem.features = std::move(features);
  return problem;
}

Placement placement_for(const LabelingProblem& problem, std::span<const Gene> genes) {
  if (genes.size() != problem.full.size()) throw Error("chromosome length does not match the optimized feature count");
  Placement p;
  p.labels.reserve(problem.features.size());
  p.optimized.assign(problem.features.size(), false);
  for (const auto& set : problem.sets) p.labels.push_back(set.positions.front());
  for (std::size_t g = 0; g < genes.size(); ++g) {
    const std::size_t i = problem.full[g];
    p.labels[i] = problem.sets[i].positions[genes[g]];
    p.optimized[i] = true;
  }
  return p;
}

FitnessModel::FitnessModel(const LabelingProblem& problem, QualityWeights weights, ScoringOptions options)
    : problem_(&problem), weights_(weights), options_(options) {
  const auto& features = problem.features;
  const FeatureIndex feature_index(features);
  const std::size_t q = problem.full.size();

  std::vector<bool> is_full(features.size(), false);
  for (std::size_t i : problem.full) is_full[i] = true;

  // Shortcut labels: constant terms.
  std::vector<std::size_t> frozen;
  std::vector<Aabb> frozen_bounds;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (is_full[i]) continue;
    const CandidatePosition& c = problem.sets[i].positions.front();
    const int mu1 = feature_index.penalty(c.box, i);
    frozen_.s2 += mu1;
    if (mu1 > 0) ++frozen_.lf_conflict_count;
    frozen_.s3 += c.ambiguity;
    frozen_.s4 += priority_term(c, features[i].kind, options_);
    frozen.push_back(i);
    frozen_bounds.push_back(bounds(c.box));
  }
  const GridIndex frozen_grid(frozen_bounds);
  for (std::size_t a = 0; a < frozen.size(); ++a) {
    for (std::size_t b : frozen_grid.query(frozen_bounds[a])) {
      if (b > a && boxes_intersect(problem.sets[frozen[a]].positions.front().box,
                                   problem.sets[frozen[b]].positions.front().box)) {
        ++frozen_ll_pairs_;
      }
    }
  }
  frozen_cost_ = weights_.w2 * frozen_.s2 + weights_.w3 * frozen_.s3 + weights_.w4 * frozen_.s4;

  // Optimized labels: per-candidate unary terms.
  unary_.resize(q);
  std::vector<std::array<Aabb, kCandidatesPerFeature>> candidate_bounds(q);
  std::vector<Aabb> envelopes(q);
  for (std::size_t g = 0; g < q; ++g) {
    const std::size_t i = problem.full[g];
    const auto& positions = problem.sets[i].positions;
    Unary& u = unary_[g];
    for (std::size_t a = 0; a < kCandidatesPerFeature; ++a) {
      const CandidatePosition& c = positions[a];
      u.mu1[a] = static_cast<std::uint8_t>(feature_index.penalty(c.box, i));
      u.mu2[a] = c.ambiguity;
      u.priority[a] = priority_term(c, features[i].kind, options_);
      u.cost[a] = weights_.w2 * u.mu1[a] + weights_.w3 * u.mu2[a] + weights_.w4 * u.priority[a];
      candidate_bounds[g][a] = bounds(c.box);
      for (std::size_t f : frozen_grid.query(candidate_bounds[g][a])) {
        if (boxes_intersect(c.box, problem.sets[frozen[f]].positions.front().box)) ++u.frozen_overlaps[a];
      }
      if (a == 0) {
        envelopes[g] = candidate_bounds[g][a];
      } else {
        envelopes[g].extend(candidate_bounds[g][a]);
      }
    }
  }

  // Pairwise overlap tables between neighbouring optimized features.
  edges_.resize(q);
  const GridIndex envelope_grid(envelopes);
  for (std::size_t g = 0; g < q; ++g) {
    const auto& pg = problem.sets[problem.full[g]].positions;
    for (std::size_t h : envelope_grid.query(envelopes[g])) {
      if (h <= g) continue;
      const auto& ph = problem.sets[problem.full[h]].positions;
      Edge edge;
      edge.other = static_cast<std::uint32_t>(h);
      bool any = false;
      for (std::size_t a = 0; a < kCandidatesPerFeature; ++a) {
        if (!candidate_bounds[g][a].overlaps(envelopes[h])) continue;
        for (std::size_t b = 0; b < kCandidatesPerFeature; ++b) {
          if (candidate_bounds[g][a].overlaps(candidate_bounds[h][b]) && boxes_intersect(pg[a].box, ph[b].box)) {
            edge.rows[a] |= 1u << b;
            any = true;
          }
        }
      }
      if (any) edges_[g].push_back(edge);
    }
  }
}

double FitnessModel::fitness(std::span<const Gene> genes) const {
  double unary = 0.0;
  std::size_t pairs = 0;
  for (std::size_t g = 0; g < unary_.size(); ++g) {
    const Gene a = genes[g];
    unary += unary_[g].cost[a];
    for (const Edge& e : edges_[g]) pairs += (e.rows[a] >> genes[e.other]) & 1u;
  }
  return frozen_cost_ + unary + weights_.w1 * kLabelLabelPenalty * static_cast<double>(pairs);
}

ScoreBreakdown FitnessModel::breakdown(std::span<const Gene> genes) const {
  ScoreBreakdown s = frozen_;
  std::size_t pairs = 0;
  std::size_t frozen_pairs = frozen_ll_pairs_;
  for (std::size_t g = 0; g < unary_.size(); ++g) {
    const Gene a = genes[g];
    const Unary& u = unary_[g];
    s.s2 += u.mu1[a];
    if (u.mu1[a] > 0) ++s.lf_conflict_count;
    s.s3 += u.mu2[a];
    s.s4 += u.priority[a];
    frozen_pairs += u.frozen_overlaps[a];
    for (const Edge& e : edges_[g]) pairs += (e.rows[a] >> genes[e.other]) & 1u;
  }
  s.s1 = kLabelLabelPenalty * static_cast<double>(pairs);
  s.ll_conflict_count = pairs + frozen_pairs;
  s.rho2 = s.s1 + s.s2 + s.s3 + s.s4;
  s.fitness = weighted(s, weights_);
  return s;
}

}  // namespace labelforge
