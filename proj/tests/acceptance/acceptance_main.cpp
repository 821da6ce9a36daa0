// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails.
//
// The MSLR comparison is opt-in:
//   RCRANK_MSLR_PATH      LibSVM file with all MSLR-WEB10K queries
//   RCRANK_MSLR_FRACTION  optional training subsample fraction (desk scale)
//   RCRANK_MSLR_MAX_TREES optional forest cap (default 1000)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcrank/rcrank.hpp"
#include "synthetic.hpp"

namespace {

using namespace rcrank;
using Clock = std::chrono::steady_clock;

struct Verdict {
  enum class State { kPass, kFail, kSkip } state = State::kPass;
  std::string detail;
};

Verdict pass(std::string detail) { return {Verdict::State::kPass, std::move(detail)}; }
Verdict fail(std::string detail) { return {Verdict::State::kFail, std::move(detail)}; }
Verdict skip(std::string detail) { return {Verdict::State::kSkip, std::move(detail)}; }

std::string fmt(double v, int digits = 6) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, v);
  return buffer;
}

Verdict within_budget(Verdict v, double seconds, double budget) {
  if (v.state == Verdict::State::kPass && seconds > budget) {
    return fail(v.detail + "; took " + fmt(seconds, 3) + " s, budget " + fmt(budget, 3) + " s");
  }
  return v;
}

// --- 1: metrics against a permutation oracle --------------------------------

double oracle_dcg(const std::vector<int>& ranked, std::size_t cutoff) {
  double total = 0.0;
  for (std::size_t i = 0; i < ranked.size() && i < cutoff; ++i) {
    total += (std::pow(2.0, ranked[i]) - 1.0) / std::log2(static_cast<double>(i) + 2.0);
  }
  return total;
}

Verdict metrics_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> grade(1, 5);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  std::normal_distribution<double> noise;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = size(rng);
    const MetricConfig config{10, 1.0};
    std::vector<int> labels(m);
    std::vector<double> scores(m);
    for (std::size_t i = 0; i < m; ++i) {
      labels[i] = grade(rng);
      scores[i] = noise(rng);
    }
    std::vector<int> perm = labels;
    std::sort(perm.begin(), perm.end());
    double best = 0.0;
    do {
      best = std::max(best, oracle_dcg(perm, config.cutoff));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double error = std::abs(idcg(labels, config) - best);
    worst = std::max(worst, error);
    if (error > 1e-12) return fail("group " + std::to_string(trial) + ": idcg off by " + fmt(error));
    const double n = ndcg_at_k(labels, scores, config);
    if (!(n >= 0.0 && n <= 1.0)) return fail("ndcg " + fmt(n) + " outside [0,1]");
  }
  return pass("200 groups, max idcg error " + fmt(worst));
}

// --- 2: lambda properties ---------------------------------------------------

Verdict lambda_properties() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> grade(1, 5);
  std::uniform_int_distribution<std::size_t> size(2, 60);
  std::normal_distribution<double> noise;
  const MetricConfig config{10, 1.0};
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = size(rng);
    std::vector<int> labels(m);
    std::vector<double> scores(m);
    for (std::size_t i = 0; i < m; ++i) {
      labels[i] = grade(rng);
      scores[i] = noise(rng);
    }
    const LambdaState s = compute_lambdas(labels, scores, config, 1.0);
    double sum = 0.0, magnitude = 0.0;
    for (const double v : s.lambda) {
      sum += v;
      magnitude += std::abs(v);
    }
    const double relative = magnitude > 0.0 ? std::abs(sum) / magnitude : std::abs(sum);
    worst = std::max(worst, relative);
    if (relative > 1e-9) return fail("group " + std::to_string(trial) + ": relative sum " + fmt(relative));
  }
  const std::vector<int> labels{2, 1};
  const std::vector<double> scores{0.0, 0.0};
  const LambdaState two = compute_lambdas(labels, scores, config, 1.0);
  if (std::abs(two.lambda[0] - 0.10165) > 1e-4 || std::abs(two.lambda[1] + 0.10165) > 1e-4) {
    return fail("two-document lambdas " + fmt(two.lambda[0]) + ", " + fmt(two.lambda[1]));
  }
  return pass("500 groups, max relative sum " + fmt(worst) + "; two-document lambda " +
              fmt(two.lambda[0]));
}

// --- 3: oblivious structure and greedy level optimality ---------------------

Verdict oblivious_structure() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> noise;
  std::size_t levels_checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng() % 199;
    const std::size_t l = 1 + rng() % 10;
    const std::size_t depth = 1 + rng() % 6;
    std::vector<double> values(n * l);
    const bool continuous = trial % 3 == 0;
    for (auto& v : values) v = continuous ? noise(rng) : static_cast<double>(rng() % 7);
    const FeatureMatrix m(n, l, values);
    std::vector<double> targets(n);
    for (auto& t : targets) t = noise(rng);
    const auto candidates = SplitCandidateSet::build(m);
    const auto fitted = build_oblivious_tree(BinnedFeatures(m, candidates), targets, depth);
    const auto& tree = fitted.tree;
    if (tree.rules.size() != depth) return fail("trial " + std::to_string(trial) + ": rule count");
    if (tree.leaf_values.size() != (std::size_t{1} << depth)) {
      return fail("trial " + std::to_string(trial) + ": leaf count");
    }
    if (candidates.total() == 0) continue;

    std::vector<std::vector<std::size_t>> sets(1);
    for (std::size_t r = 0; r < n; ++r) sets[0].push_back(r);
    for (std::size_t d = 0; d < depth; ++d) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t f = 0; f < l; ++f) {
        for (const double v : candidates.thresholds[f]) {
          best = std::min(best, level_cost(m, targets, sets, {f, v}));
        }
      }
      const double chosen = level_cost(m, targets, sets, tree.rules[d]);
      if (chosen > best + 1e-12 * std::max(1.0, best)) {
        return fail("trial " + std::to_string(trial) + " level " + std::to_string(d) + ": cost " +
                    fmt(chosen, 17) + " > " + fmt(best, 17));
      }
      ++levels_checked;
      std::vector<std::vector<std::size_t>> next;
      for (const auto& s : sets) {
        auto [left, right] = split_samples(m, s, tree.rules[d]);
        next.push_back(std::move(left));
        next.push_back(std::move(right));
      }
      sets = std::move(next);
    }
  }
  return pass("150 trees, " + std::to_string(levels_checked) + " levels at the exhaustive minimum");
}

// --- 4: decision table vs traversal -----------------------------------------

Verdict table_equivalence() {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> noise;
  for (int k = 0; k < 10000; ++k) {
    const std::size_t depth = 1 + rng() % 10;
    const std::size_t l = 1 + rng() % 20;
    ObliviousTree tree;
    for (std::size_t d = 0; d < depth; ++d) tree.rules.push_back({rng() % l, noise(rng)});
    tree.leaf_values.resize(std::size_t{1} << depth);
    for (auto& v : tree.leaf_values) v = noise(rng);
    std::vector<double> x(l);
    for (auto& v : x) v = noise(rng);
    // Hit thresholds exactly now and then.
    if (k % 7 == 0) x[tree.rules[0].feature] = tree.rules[0].threshold;
    const DecisionTable table(tree);
    if (table.score(x) != tree.evaluate_by_traversal(x)) {
      return fail("pair " + std::to_string(k) + " differs");
    }
  }
  return pass("10000 pairs identical");
}

// --- 5: end-to-end convergence ----------------------------------------------

Verdict convergence() {
  const Dataset train_set = testing::make_separable(200, 20, 10, 505, 0.1);
  const Dataset valid_set = testing::make_separable(50, 20, 10, 506, 0.1);
  std::string detail;
  for (const auto variant : {TreeVariant::kOblivious, TreeVariant::kStandard}) {
    TrainConfig c;
    c.variant = variant;
    c.leaves = 16;
    c.learning_rate = 0.15;
    c.max_trees = 100;
    const TrainResult r = train(train_set, valid_set, c);
    double best_train = 0.0;
    std::size_t reached = 0;
    for (const auto& e : r.log.entries) {
      best_train = std::max(best_train, e.train_metric);
      if (reached == 0 && e.train_metric >= 0.99) reached = e.iteration;
    }
    const std::string name(to_string(variant));
    if (reached == 0) return fail(name + ": best training ndcg@10 " + fmt(best_train));
    const double kept = mean_ndcg(valid_set, predict_scores(r.ensemble, valid_set), c.metric);
    const double full = r.log.entries.back().valid_metric.value();
    if (kept < full) return fail(name + ": truncated " + fmt(kept) + " < full " + fmt(full));
    detail += name + " reached 0.99 at tree " + std::to_string(reached) + ", kept " +
              std::to_string(r.ensemble.size()) + " trees (valid " + fmt(kept) + " vs full " +
              fmt(full) + "); ";
  }
  detail.resize(detail.size() - 2);
  return pass(detail);
}

// --- 6: serialization -------------------------------------------------------

Verdict serialization() {
  const Dataset d = testing::make_noise(40, 12, 8, 606);
  std::string detail;
  for (const auto variant : {TreeVariant::kOblivious, TreeVariant::kStandard}) {
    TrainConfig c;
    c.variant = variant;
    c.leaves = 16;
    c.max_trees = 40;
    const Ensemble e = train(d, Dataset{}, c).ensemble;
    std::ostringstream first;
    save_model(e, first);
    std::istringstream in(first.str());
    const Ensemble back = load_model(in);
    std::ostringstream second;
    save_model(back, second);
    const std::string name(to_string(variant));
    if (first.str() != second.str()) return fail(name + ": bytes differ after save/load/save");
    std::mt19937_64 rng(607);
    std::uniform_real_distribution<double> unit(-0.5, 1.5);
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> x(8);
      for (auto& v : x) v = unit(rng);
      if (e.score(x) != back.score(x)) return fail(name + ": score differs on vector " + std::to_string(k));
    }
    detail += name + " " + std::to_string(first.str().size()) + " bytes; ";
  }
  detail.resize(detail.size() - 2);
  return pass(detail + "; 1000 vectors bit-exact");
}

// --- 7: determinism ---------------------------------------------------------

std::string cv_results_file(const Dataset& d, const TrainConfig& c) {
  const GridCell cell = run_cv(d, c);
  std::ostringstream out;
  write_results(std::span(&cell, 1), c.metric, out);
  return out.str();
}

Verdict determinism() {
  const Dataset d = testing::make_separable(60, 15, 8, 707, 0.8);
  for (const auto variant : {TreeVariant::kOblivious, TreeVariant::kStandard}) {
    TrainConfig c;
    c.variant = variant;
    c.leaves = 8;
    c.max_trees = 30;
    c.seed = 7;
    const std::string a = cv_results_file(d, c);
    c.threads = 1;
    const std::string b = cv_results_file(d, c);
    if (a != b) return fail(std::string(to_string(variant)) + ": result files differ");
  }
  return pass("identical result files for both variants");
}

// --- 8: MSLR-WEB10K comparison ----------------------------------------------

Verdict mslr_comparison() {
  const char* path = std::getenv("RCRANK_MSLR_PATH");
  if (!path || !*path) {
    return skip("needs the MSLR-WEB10K download; set RCRANK_MSLR_PATH to run");
  }
  CvOptions options;
  if (const char* f = std::getenv("RCRANK_MSLR_FRACTION"); f && *f) {
    options.train_fraction = std::strtod(f, nullptr);
  }
  const Dataset d = load_dataset(path);
  std::size_t max_trees = 1000;
  if (const char* t = std::getenv("RCRANK_MSLR_MAX_TREES"); t && *t) max_trees = std::strtoul(t, nullptr, 10);

  double mean[2] = {0.0, 0.0};
  const TreeVariant variants[2] = {TreeVariant::kOblivious, TreeVariant::kStandard};
  for (int v = 0; v < 2; ++v) {
    TrainConfig c;
    c.variant = variants[v];
    c.leaves = 64;
    c.learning_rate = 0.11;
    c.max_trees = max_trees;
    mean[v] = run_cv(d, c, options).mean;
  }
  const std::string values = "oblivious " + fmt(mean[0], 4) + ", standard " + fmt(mean[1], 4);
  if (options.train_fraction) {
    if (mean[0] < mean[1] - 0.005) return fail("desk scale: " + values);
    return pass("desk scale: " + values);
  }
  const bool near = std::abs(mean[0] - 0.5706) <= 0.015 && std::abs(mean[1] - 0.5582) <= 0.015;
  if (!near || mean[0] <= mean[1]) return fail("full scale: " + values);
  return pass("full scale: " + values);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> check;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria{
      {"1 metrics oracle", metrics_oracle, 10.0},
      {"2 lambda properties", lambda_properties, 5.0},
      {"3 oblivious structure", oblivious_structure, 30.0},
      {"4 decision table equivalence", table_equivalence, 1e9},
      {"5 end-to-end convergence", convergence, 120.0},
      {"6 serialization", serialization, 1e9},
      {"7 determinism", determinism, 1e9},
      {"8 MSLR-WEB10K comparison", mslr_comparison, 1e9},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    v = within_budget(std::move(v), seconds, c.budget_seconds);
    const char* label = v.state == Verdict::State::kPass   ? "PASS"
                        : v.state == Verdict::State::kFail ? "FAIL"
                                                           : "SKIP";
    std::printf("%s  %-30s %8.3fs  %s\n", label, c.name, seconds, v.detail.c_str());
    std::fflush(stdout);
    if (v.state == Verdict::State::kFail) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
