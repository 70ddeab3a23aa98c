// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Usage: wapsel_acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "wapsel/eval.hpp"
#include "wapsel/experiment.hpp"
#include "wapsel/io.hpp"
#include "wapsel/losses.hpp"

using namespace wapsel;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failing checks without stopping at the first one.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_++ < 5) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  Outcome done(std::string detail) const {
    if (failures_ == 0) return {true, std::move(detail)};
    return {false, std::to_string(failures_) + " failed check(s): " + notes_};
  }

 private:
  int failures_ = 0;
  std::string notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path g_work;

ExperimentConfig default_with_seed(std::uint64_t seed) {
  auto cfg = ExperimentConfig::defaults();
  cfg.set_seed(seed);
  return cfg;
}

// ---------------------------------------------------------------------------

Outcome ac1() {
  Checker c;
  const auto tol = ToleranceTable::defaults();
  c.expect(latency_score(AppType::voiceChat, 5.0, tol) == 90.0, "latency(voice, 5 ms) != 90");
  c.expect(latency_score(AppType::textMessage, 200.0, tol) == 0.0, "latency(text, 200 ms) != 0");
  c.expect(std::abs(energy_score(50.0, 3.24) - 15.4321) <= 1e-4, "energy(50, 3.24) off");
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> w(0.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto ctx = oracle::random_context(rng, 1 + i % 12, i % 3 != 0);
    const auto mv = oracle::random_measurements(rng);
    RewardConfig cfg;
    cfg.w_latency = w(rng);
    cfg.w_power = w(rng);
    cfg.mode = i % 5 == 0 ? RewardMode::naive : RewardMode::contextAware;
    const auto got = compute_rewards(ctx, mv, cfg, tol).objective;
    const auto ref = oracle::objective(ctx, mv, cfg.w_latency, cfg.w_power, cfg.mode == RewardMode::naive);
    for (std::size_t a = 0; a < kNumActions; ++a) worst = std::max(worst, std::abs(got[a] - ref[a]));
  }
  c.expect(worst <= 1e-12, "brute-force max |diff| " + fmt("%.3g", worst));
  return c.done("golden values exact; brute-force max |diff| " + fmt("%.2g", worst) + " over 1e4 samples");
}

Outcome ac2() {
  Checker c;
  const auto cfg = default_with_seed(42);
  const Dataset d = generate_dataset(AppUsageProfile::in_distribution(), cfg.link, cfg.dataset, cfg.reward,
                                     cfg.tolerance, Stream::inDistribution);
  c.expect(d.size() == 32000, "dataset has " + std::to_string(d.size()) + " samples");
  auto [train_set, test_set] = [&] {
    auto rng = session_rng(cfg.seed, static_cast<std::uint64_t>(Stream::split), 0);
    return split(d, cfg.dataset.split_fraction, rng);
  }();
  TrainConfig tc = cfg.train;
  tc.epochs = 1;
  const auto head = train(train_set, HeadModel::initialized(tc.layers, tc.hidden, tc.seed), tc).model;

  OraclePolicy o;
  RulePolicy r;
  FixedPolicy rt(FixedVariant::rt_iv), bg(FixedVariant::bulk_bg);
  HeadPolicy h(head, "head"), hm(head, "head-masked", true);
  const Policy* others[] = {&r, &rt, &bg, &h, &hm};
  std::size_t violations = 0;
  for (const auto& s : d) {
    const double best = s.rewards.objective[o.decide(s.context, s.rewards.objective).index()];
    for (const Policy* p : others) {
      if (s.rewards.objective[p->decide(s.context, s.rewards.objective).index()] > best) ++violations;
    }
    for (double v : s.rewards.objective) violations += v > best ? 1 : 0;
  }
  c.expect(violations == 0, std::to_string(violations) + " dominance violations");
  return c.done("oracle >= rule, both fixed, head on all " + std::to_string(d.size()) + " samples");
}

Outcome ac3() {
  Checker c;
  const auto t = default_preferred_tuples();
  auto hist = [](std::initializer_list<std::pair<AppType, int>> parts) {
    std::vector<AppType> out;
    for (auto [a, n] : parts) out.insert(out.end(), n, a);
    return out;
  };
  c.expect(rule_decide(hist({{AppType::voiceChat, 6}, {AppType::textMessage, 4}}), t) == kRealtimeVoice,
           "voice-majority example");
  c.expect(rule_decide(hist({{AppType::firmwareUpdate, 10}}), t) == kBulkBackground, "firmware example");
  c.expect(rule_decide(hist({{AppType::videoCall, 5}, {AppType::sensorSync, 5}}), t).index() == 2,
           "tie example");
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> app(0, 7), len(1, 20);
  int changed = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<AppType> h(len(rng));
    for (auto& a : h) a = static_cast<AppType>(app(rng));
    const auto base = rule_decide(h, t);
    if (base.index() != oracle::rule_action(h)) ++changed;
    std::shuffle(h.begin(), h.end(), rng);
    if (!(rule_decide(h, t) == base)) ++changed;
  }
  c.expect(changed == 0, std::to_string(changed) + " fuzz mismatches");
  return c.done("3 examples; 1000 permuted histories unchanged");
}

Outcome ac4() {
  Checker c;
  double worst = 0.0;
  for (auto loss : {LossKind::ce, LossKind::kl, LossKind::dpo}) {
    for (std::size_t layers = 1; layers <= 3; ++layers) {
      const auto r = gradcheck::run(layers, loss, 1000 * layers + static_cast<int>(loss), 100);
      worst = std::max(worst, r.max_relative_error);
      c.expect(r.points >= 100 && r.max_relative_error <= 1e-4,
               std::string(name(loss)) + "/" + std::to_string(layers) + " rel err " +
                   fmt("%.3g", r.max_relative_error));
    }
  }
  return c.done("3 losses x 3 depths x 100 points; max relative error " + fmt("%.2g", worst));
}

Outcome ac5() {
  Checker c;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double kl_zero = 0.0, dpo_dev = 0.0;
  int ce_kl_mismatch = 0;
  for (int i = 0; i < 10000; ++i) {
    PerAction z{}, r{};
    for (double& v : z) v = u(rng);
    for (double& v : r) v = u(rng);
    kl_zero = std::max(kl_zero, std::abs(loss_kl(z, softmax(z)).value));
    const std::size_t y = i % 8;
    PerAction onehot{};
    onehot[y] = 1.0;
    const auto ce = loss_ce(z, y), kl = loss_kl(z, onehot);
    if (ce.value != kl.value || ce.dlogits != kl.dlogits) ++ce_kl_mismatch;
    dpo_dev = std::max(dpo_dev, std::abs(loss_dpo(z, z, y, (y + 1) % 8, 0.1).value - std::log(2.0)));
  }
  const double uniform = std::abs(loss_ce(PerAction{}, 0).value - std::log(8.0));
  c.expect(kl_zero <= 1e-9, "KL at match " + fmt("%.3g", kl_zero));
  c.expect(ce_kl_mismatch == 0, std::to_string(ce_kl_mismatch) + " CE/KL(one-hot) mismatches");
  c.expect(uniform <= 1e-9, "uniform CE off by " + fmt("%.3g", uniform));
  c.expect(dpo_dev <= 1e-9, "DPO at reference off by " + fmt("%.3g", dpo_dev));
  return c.done("KL(match) <= " + fmt("%.1g", kl_zero) + "; CE == KL(one-hot) bitwise; |CE_u - ln 8| = " +
                fmt("%.1g", uniform) + "; |DPO_ref - ln 2| <= " + fmt("%.1g", dpo_dev));
}

Outcome ac6() {
  Checker c;
  const auto cfg = default_with_seed(42);
  const Dataset d = generate_dataset(AppUsageProfile::in_distribution(), cfg.link, cfg.dataset, cfg.reward,
                                     cfg.tolerance, Stream::inDistribution);
  c.expect(d.size() == 32000, "size " + std::to_string(d.size()));
  for (std::size_t b = 0; b < kNumScenarios && d.size() == 32000; ++b) {
    for (std::size_t k = 0; k < 2000; ++k) {
      if (!(d[b * 2000 + k].scenario == d[b * 2000].scenario)) {
        c.expect(false, "block " + std::to_string(b) + " mixes scenarios");
        break;
      }
    }
  }
  std::array<std::array<double, 8>, 4> counts{};
  std::array<double, 4> totals{};
  for (const auto& s : d) {
    ++counts[code(s.context.time)][code(s.context.current_app())];
    ++totals[code(s.context.time)];
  }
  double worst = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t a = 0; a < 8; ++a) {
      worst = std::max(worst, std::abs(counts[t][a] / totals[t] - oracle::kInDistProfile[t][a]));
    }
  }
  c.expect(worst <= 0.01, "app frequency off by " + fmt("%.4f", worst));

  const auto m1 = run_gen(cfg, g_work / "ac6_a");
  const auto m2 = run_gen(cfg, g_work / "ac6_b");
  const auto& files = m1.at("files");
  const long tr = files.at("train.jsonl").at("samples"), te = files.at("test.jsonl").at("samples");
  c.expect(std::abs(tr - 25600) <= 16 && std::abs(te - 6400) <= 16,
           "split " + std::to_string(tr) + "/" + std::to_string(te));
  c.expect(m1.at("files") == m2.at("files"), "file hashes differ between identical-seed runs");
  return c.done("32000 samples in 16 blocks of 2000; split " + std::to_string(tr) + "/" + std::to_string(te) +
                "; max app-frequency error " + fmt("%.4f", worst) + "; identical hashes");
}

// Mean metric of one policy on one slice from a compare.json document.
double compare_metric(const nlohmann::json& all, const std::string& slice, const std::string& policy,
                      const std::string& metric) {
  for (const auto& r : all) {
    if (r.at("slice") != slice) continue;
    for (const auto& p : r.at("policies")) {
      if (p.at("policy") == policy) return p.at("per_sample_mean").at(metric).get<double>();
    }
  }
  throw std::out_of_range("no " + policy + " on " + slice);
}

Outcome ac7() {
  int wins_a = 0, wins_b = 0, wins_c = 0, wins_d = 0;
  std::string lines;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto cfg = default_with_seed(seed);
    const auto dir = g_work / ("ac7_seed" + std::to_string(seed));
    run_compare(cfg, dir);
    const auto all = nlohmann::json::parse(io::read_file(dir / "compare.json"));
    const double kl = compare_metric(all, "aggregate", "head-kl", "objective");
    const double ce = compare_metric(all, "aggregate", "head-ce", "objective");
    const double rule = compare_metric(all, "aggregate", "rule", "objective");
    const double kl_ood = compare_metric(all, "ood", "head-kl", "objective");
    const double rule_ood = compare_metric(all, "ood", "rule", "objective");
    const double e_peer = compare_metric(all, "coop", "head-kl", "energy_pct_h");
    const double e_nopeer = compare_metric(all, "coop", "head-kl-no-peer", "energy_pct_h");

    const auto bundle = generate_bundle(cfg);
    const auto abl = ablate_reward(bundle.train, bundle.test, cfg.train, cfg.reward, cfg.tolerance);
    const double aware = abl.treatment.aggregate.mean.objective;
    const double naive = abl.control.aggregate.mean.objective;

    const bool a = kl >= ce, b = kl >= rule && kl_ood >= rule_ood, c = e_peer < e_nopeer, d = aware >= naive;
    wins_a += a;
    wins_b += b;
    wins_c += c;
    wins_d += d;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "    seed %llu: a %s kl=%.4f ce=%.4f | b %s kl=%.4f rule=%.4f ood kl=%.4f rule=%.4f | "
                  "c %s coop energy peer=%.4f no-peer=%.4f (%+.2f%%) | d %s aware=%.4f naive=%.4f\n",
                  static_cast<unsigned long long>(seed), a ? "ok" : "no", kl, ce, b ? "ok" : "no", kl, rule,
                  kl_ood, rule_ood, c ? "ok" : "no", e_peer, e_nopeer, 100.0 * (e_peer - e_nopeer) / e_nopeer,
                  d ? "ok" : "no", aware, naive);
    lines += buf;
  }
  std::fputs(lines.c_str(), stdout);
  const bool pass = wins_a >= 3 && wins_b >= 3 && wins_c >= 3 && wins_d >= 3;
  const std::string detail = "seeds won: a(KL>=CE) " + std::to_string(wins_a) + "/5, b(KL>=rule) " +
                             std::to_string(wins_b) + "/5, c(peer energy) " + std::to_string(wins_c) +
                             "/5, d(context>=naive) " + std::to_string(wins_d) + "/5";
  return {pass, detail};
}

Outcome ac8() {
  Checker c;
  const auto base = default_with_seed(42);
  const auto tol = base.tolerance;
  const Dataset d = generate_dataset(AppUsageProfile::in_distribution(), base.link, base.dataset, base.reward,
                                     tol, Stream::inDistribution);
  const auto lat_cfg = single_objective_config(SingleObjective::latencyOnly, base.reward);
  std::size_t lat_mismatch = 0;
  for (const auto& s : d) {
    const auto rv = compute_rewards(s.context, s.measurements, lat_cfg, tol);
    if (oracle_decide(rv.objective).index() != oracle::first_max(rv.latency_score)) ++lat_mismatch;
  }
  c.expect(lat_mismatch == 0, std::to_string(lat_mismatch) + " latency-only oracle mismatches");

  const auto quiet = base.link.noiseless();
  const Dataset n = generate_dataset(AppUsageProfile::in_distribution(), quiet, base.dataset, base.reward, tol,
                                     Stream::inDistribution);
  const auto eng_cfg = single_objective_config(SingleObjective::energyOnly, base.reward);
  std::size_t eng_mismatch = 0;
  for (const auto& s : n) {
    const auto rv = compute_rewards(s.context, s.measurements, eng_cfg, tol);
    if (!(oracle_decide(rv.objective) == kBulkBackground)) ++eng_mismatch;
  }
  c.expect(eng_mismatch == 0, std::to_string(eng_mismatch) + " energy-only oracle != (bulk, background)");

  const auto o = evaluate(OraclePolicy{}, n, lat_cfg, tol);
  const auto rt = evaluate(FixedPolicy(FixedVariant::rt_iv), n, lat_cfg, tol);
  const double gap = (o.mean.objective - rt.mean.objective) / std::abs(o.mean.objective);
  c.expect(gap <= 0.01, "fix-rt-iv latency-only gap " + fmt("%.4f", gap));
  return c.done("w_P=0 oracle == latency argmax on " + std::to_string(d.size()) +
                " samples; w_L=0 oracle == (bulk, background) on " + std::to_string(n.size()) +
                " noiseless samples; fix-rt-iv gap " + fmt("%.4f", 100 * gap) + "%");
}

Outcome ac9() {
  Checker c;
  const auto cfg = default_with_seed(42);
  const auto a = g_work / "ac9_a", b = g_work / "ac9_b";
  const auto ta = run_compare(cfg, a);
  const auto tb = run_compare(cfg, b);
  c.expect(ta == tb, "returned tables differ");
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto file = entry.path().filename();
    ++files;
    if (!fs::exists(b / file)) {
      c.expect(false, file.string() + " missing from second run");
      continue;
    }
    c.expect(io::read_file(a / file) == io::read_file(b / file), file.string() + " differs");
  }
  for (auto row : kCompareRows) {
    if (row.rfind("head", 0) == 0) c.expect(fs::exists(a / (std::string(row) + ".ckpt")), "no checkpoint");
  }
  return c.done(std::to_string(files) + " artifacts byte-identical across two runs");
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "wapsel_acceptance";
  fs::remove_all(g_work);
  fs::create_directories(g_work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 reward golden values", ac1},       {"AC2 oracle dominance", ac2},
      {"AC3 rule baseline", ac3},              {"AC4 gradient checks", ac4},
      {"AC5 loss identities", ac5},            {"AC6 dataset statistics", ac6},
      {"AC7 directional findings", ac7},       {"AC8 single-objective sanity", ac8},
      {"AC9 end-to-end determinism", ac9},
  };
  // Runtime budgets in seconds, where one is stated.
  const std::map<std::string, double> budget{{"AC1", 5.0}, {"AC2", 30.0}, {"AC4", 60.0}, {"AC7", 600.0}};

  int failed = 0;
  for (const auto& [label, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto id = label.substr(0, 3);
    if (auto it = budget.find(id); it != budget.end() && secs > it->second) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", it->second) + " s budget";
    }
    std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", label.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
