#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ntklab/acceptance.hpp"
#include "ntklab/bounds.hpp"
#include "ntklab/dataset.hpp"
#include "ntklab/experiment.hpp"
#include "ntklab/kernel.hpp"
#include "ntklab/margin.hpp"
#include "ntklab/network.hpp"
#include "ntklab/report.hpp"
#include "ntklab/rng.hpp"
#include "ntklab/train.hpp"
#include "ntklab/vbar.hpp"

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("NTKLAB_SEED");
  if (!s || !*s) return std::nullopt;
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != std::string(s).size()) throw std::invalid_argument("NTKLAB_SEED is not an integer");
  return v;
}

std::uint64_t seed_or_env(std::uint64_t seed) { return env_seed().value_or(seed); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

ntk::Dataset load_dataset(const std::string& path) { return ntk::dataset_from_json(read_json(path)); }

json margin_json(const ntk::MarginEstimate& est) {
  return {{"gamma", est.gamma}, {"argmin", est.argmin}, {"per_point", est.per_point},
          {"se", est.std_errors}, {"samples", est.samples}};
}

json mc_json(const ntk::McValue& v) { return {{"value", v.value}, {"se", v.se}, {"samples", v.samples}}; }

ntk::VBarMap named_map(const std::string& name, const ntk::Dataset& ds) {
  if (name == "natural") return ntk::make_natural_v0(ds);
  if (name == "circle") return ntk::make_circle_rz(ds.n());
  if (name == "orthobasis") return ntk::make_orthobasis_composed(ds);
  if (name == "two-point") return ntk::make_two_point_map(ds);
  throw std::invalid_argument("unknown map: " + name);
}

std::string kernel_csv(const ntk::KernelMatrix& k, double lambda) {
  ntk::Table t;
  for (std::size_t j = 0; j < k.n(); ++j) t.header.push_back("c" + std::to_string(j));
  for (std::size_t i = 0; i < k.n(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < k.n(); ++j) row.push_back(ntk::format_number(k.entries(i, j)));
    t.add_row(std::move(row));
  }
  return ntk::to_csv(t, {"provenance " + ntk::to_string(k.provenance), "lambda " + ntk::format_number(lambda)});
}

std::string trace_csv(const ntk::TrainTrace& tr) {
  const bool sq = tr.loss == ntk::LossKind::squared;
  ntk::Table t;
  t.header = {"step", "loss_or_residual", "max_disp", "flips"};
  if (sq) t.header.insert(t.header.end(), {"C1", "C2", "C3", "C4"});
  for (const auto& r : tr.rows) {
    std::vector<std::string> row{std::to_string(r.step), ntk::format_number(r.loss), ntk::format_number(r.max_disp),
                                 std::to_string(r.flips)};
    if (sq)
      for (double c : {r.C1, r.C2, r.C3, r.C4}) row.push_back(ntk::format_number(c));
    t.add_row(std::move(row));
  }
  const json cfg = ntk::config_to_json(tr.cfg);
  return ntk::to_csv(t, {"config_hash " + ntk::config_hash(cfg), "seed " + std::to_string(tr.cfg.seed)});
}

json trace_summary(const ntk::TrainTrace& tr) {
  json j = {{"config", ntk::config_to_json(tr.cfg)},
            {"steps_run", tr.steps_run},
            {"final_loss", tr.loss_per_step.empty() ? 0.0 : tr.loss_per_step.back()},
            {"max_flips", tr.max_flips},
            {"max_disp", tr.max_disp},
            {"aborted", tr.aborted}};
  if (tr.loss == ntk::LossKind::logistic) {
    j["average_risk"] = tr.average_risk;
    j["disp_ratio"] = tr.disp_ratio_logistic;
  } else {
    j["envelope_violations"] = tr.envelope_violations;
    j["max_rel_gap"] = tr.max_rel_gap;
  }
  if (tr.aborted) j["abort_reason"] = tr.abort_reason;
  return j;
}

int print_acceptance(const std::vector<ntk::CriterionResult>& results) {
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d %s (%.1fs): %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    failed += !r.passed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ntklab: coupled-initialization NTK laboratory"};
  app.require_subcommand(1);
  int status = kExitPass;
  std::string out;

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Generate datasets");
  dataset->require_subcommand(1);
  auto* dgen = dataset->add_subcommand("gen", "Write a dataset as JSON");
  std::string d_kind = "circle", d_labeling = "parity", d_labels = "random_signs";
  std::size_t d_n = 8, d_d = 2;
  double d_b = 0.3;
  std::uint64_t d_seed = 1;
  dgen->add_option("--kind", d_kind, "circle | orthobasis | hypercube | two-points | sphere")->capture_default_str();
  dgen->add_option("--n", d_n, "number of points")->capture_default_str();
  dgen->add_option("--d", d_d, "dimension")->capture_default_str();
  dgen->add_option("--b", d_b, "two-point separation")->capture_default_str();
  dgen->add_option("--labeling", d_labeling, "hypercube labeling: majority | parity")->capture_default_str();
  dgen->add_option("--labels", d_labels, "sphere/orthobasis labels: random_signs | constant_one | regression_uniform")
      ->capture_default_str();
  dgen->add_option("--seed", d_seed)->capture_default_str();
  dgen->add_option("--out", out, "output path (default stdout)");
  dgen->callback([&] {
    const auto seed = seed_or_env(d_seed);
    ntk::Dataset ds;
    if (d_kind == "circle") {
      ds = ntk::gen_alternating_circle(d_n);
    } else if (d_kind == "orthobasis") {
      const ntk::Dataset tmp = ntk::gen_random_sphere(2 * d_d, 1, ntk::label_mode_from_string(d_labels), seed);
      ds = ntk::gen_orthobasis(d_d, tmp.labels);
    } else if (d_kind == "hypercube") {
      ds = ntk::gen_hypercube(d_d, ntk::hypercube_labeling_from_string(d_labeling));
    } else if (d_kind == "two-points") {
      ds = ntk::gen_two_points(d_b);
    } else if (d_kind == "sphere") {
      ds = ntk::gen_random_sphere(d_n, d_d, ntk::label_mode_from_string(d_labels), seed);
    } else {
      throw std::invalid_argument("unknown dataset kind: " + d_kind);
    }
    write_json(out, ntk::dataset_to_json(ds));
  });

  // net
  auto* net = app.add_subcommand("net", "Initialize and evaluate networks");
  net->require_subcommand(1);
  auto* ninit = net->add_subcommand("init", "Coupled initialization");
  ntk::InitConfig icfg;
  std::string n_scale = "inv_sqrt_m";
  ninit->add_option("--m", icfg.m, "width (even)")->capture_default_str();
  ninit->add_option("--d", icfg.d, "input dimension")->capture_default_str();
  ninit->add_option("--beta", icfg.beta, "weight scale")->capture_default_str();
  ninit->add_option("--seed", icfg.seed)->capture_default_str();
  ninit->add_option("--scale", n_scale, "inv_sqrt_m | unnormalized")->capture_default_str();
  ninit->add_option("--out", out);
  ninit->callback([&] {
    icfg.seed = seed_or_env(icfg.seed);
    icfg.scale_mode = ntk::scale_mode_from_string(n_scale);
    write_json(out, ntk::params_to_json(ntk::coupled_init(icfg)));
  });
  auto* neval = net->add_subcommand("eval", "Outputs and losses on a dataset");
  std::string params_path, dataset_path;
  neval->add_option("--params", params_path)->required();
  neval->add_option("--dataset", dataset_path)->required();
  neval->add_option("--out", out);
  neval->callback([&] {
    const auto p = ntk::params_from_json(read_json(params_path));
    const auto ds = load_dataset(dataset_path);
    json j = {{"outputs", ntk::forward_all(p, ds)}, {"squared_loss", ntk::squared_loss(p, ds)}};
    if (ds.kind == ntk::DatasetKind::classification) {
      j["logistic_risk"] = ntk::logistic_risk(p, ds);
      j["misclassified"] = ntk::misclassification_count(p, ds);
    }
    write_json(out, j);
  });

  // kernel
  auto* kernel = app.add_subcommand("kernel", "Kernel matrices and concentration checks");
  kernel->require_subcommand(1);
  std::size_t k_m = 1024, k_trials = 20, k_B = 2;
  double k_R = 0.01;
  std::uint64_t k_seed = 1;
  auto add_dataset = [&](CLI::App* c) { c->add_option("--dataset", dataset_path, "dataset JSON")->required(); };
  auto* kcts = kernel->add_subcommand("cts", "Closed-form infinite-width kernel as CSV");
  add_dataset(kcts);
  kcts->add_option("--out", out);
  kcts->callback([&] {
    auto k = ntk::h_cts(load_dataset(dataset_path));
    write_text(out, kernel_csv(k, ntk::min_eig(k)));
  });
  auto* kdis = kernel->add_subcommand("dis", "Finite-width kernel at a coupled init as CSV");
  add_dataset(kdis);
  kdis->add_option("--m", k_m, "width")->capture_default_str();
  kdis->add_option("--seed", k_seed)->capture_default_str();
  kdis->add_option("--out", out);
  kdis->callback([&] {
    const auto ds = load_dataset(dataset_path);
    const auto p = ntk::coupled_init({k_m, ds.d(), 1.0, seed_or_env(k_seed), ntk::ScaleMode::inv_sqrt_m});
    auto k = ntk::h_dis(ds, p.weights);
    write_text(out, kernel_csv(k, ntk::min_eig(k)));
  });
  auto* kmin = kernel->add_subcommand("mineig", "Smallest eigenvalue of the closed-form kernel");
  add_dataset(kmin);
  kmin->callback([&] {
    auto k = ntk::h_cts(load_dataset(dataset_path));
    write_json(out, {{"lambda", ntk::min_eig(k)}});
  });
  auto* kconc = kernel->add_subcommand("check-concentration", "Finite vs infinite width kernel");
  add_dataset(kconc);
  kconc->add_option("--m0", k_m, "distinct rows")->capture_default_str();
  kconc->add_option("--B", k_B, "copies per row")->capture_default_str();
  kconc->add_option("--trials", k_trials)->capture_default_str();
  kconc->add_option("--seed", k_seed)->capture_default_str();
  kconc->add_option("--out", out);
  kconc->callback([&] {
    const auto r = ntk::concentration_check(load_dataset(dataset_path), k_m, k_B, k_trials, seed_or_env(k_seed));
    write_json(out, {{"lambda", r.lambda}, {"bound", r.bound}, {"m0", r.m0}, {"B", r.B}, {"trials", r.trials},
                     {"frobenius_errors", r.frobenius_errors}, {"dis_min_eigs", r.dis_min_eigs},
                     {"pass_rate", r.pass_rate}, {"mean_frobenius_error", r.mean_frobenius_error}});
  });
  auto* kpert = kernel->add_subcommand("check-perturbation", "Kernel change under bounded weight moves");
  add_dataset(kpert);
  kpert->add_option("--R", k_R, "row perturbation radius")->capture_default_str();
  kpert->add_option("--m", k_m, "width")->capture_default_str();
  kpert->add_option("--trials", k_trials)->capture_default_str();
  kpert->add_option("--seed", k_seed)->capture_default_str();
  kpert->add_option("--out", out);
  kpert->callback([&] {
    const auto r = ntk::perturbation_check(load_dataset(dataset_path), k_R, k_m, k_trials, seed_or_env(k_seed));
    write_json(out, {{"R", r.R}, {"bound", r.bound}, {"m", r.m}, {"distances", r.distances}, {"pass_rate", r.pass_rate}});
  });

  // margin
  auto* margin = app.add_subcommand("margin", "NTK margins");
  margin->require_subcommand(1);
  std::string m_map = "natural", m_kind = "e1";
  std::size_t m_samples = 200000, m_n = 8, m_width = 0;
  double m_delta = 0.1, m_K = 300.0;
  std::vector<std::size_t> m_subset;
  std::uint64_t m_seed = 1;
  auto* mmc = margin->add_subcommand("mc", "Monte-Carlo margin of a dataset under a map");
  add_dataset(mmc);
  mmc->add_option("--map", m_map, "natural | circle | orthobasis | two-point")->capture_default_str();
  mmc->add_option("--samples", m_samples)->capture_default_str();
  mmc->add_option("--seed", m_seed)->capture_default_str();
  mmc->add_option("--out", out);
  mmc->callback([&] {
    const auto ds = load_dataset(dataset_path);
    write_json(out, margin_json(ntk::margin_mc(ds, named_map(m_map, ds), m_samples, seed_or_env(m_seed))));
  });
  auto* mexact = margin->add_subcommand("exact-circle", "Exact margin of the alternating circle");
  mexact->add_option("--n", m_n)->capture_default_str();
  mexact->callback([&] { write_json(out, {{"n", m_n}, {"gamma", ntk::margin_circle_exact(m_n)}}); });
  auto* mub = margin->add_subcommand("upper-bound", "Monte-Carlo upper bound on the margin of a subset");
  add_dataset(mub);
  mub->add_option("--subset", m_subset, "point indices (default all)");
  mub->add_option("--samples", m_samples)->capture_default_str();
  mub->add_option("--seed", m_seed)->capture_default_str();
  mub->add_option("--out", out);
  mub->callback([&] {
    const auto ds = load_dataset(dataset_path);
    if (m_subset.empty())
      for (std::size_t i = 0; i < ds.n(); ++i) m_subset.push_back(i);
    write_json(out, mc_json(ntk::margin_upper_bound_mc(ds, m_subset, m_samples, seed_or_env(m_seed))));
  });
  auto* msep = margin->add_subcommand("separator", "Separator margins at init on the alternating circle");
  msep->add_option("--n", m_n)->capture_default_str();
  msep->add_option("--kind", m_kind, "e1 (sampled cones) | f2 (angular net)")->capture_default_str();
  msep->add_option("--m", m_width, "width (default: prescribed)");
  msep->add_option("--delta", m_delta)->capture_default_str();
  msep->add_option("--K", m_K, "net constant for f2")->capture_default_str();
  msep->add_option("--seed", m_seed)->capture_default_str();
  msep->add_option("--out", out);
  msep->callback([&] {
    const auto ds = ntk::gen_alternating_circle(m_n);
    const double gamma = ntk::margin_circle_exact(m_n);
    const bool f2 = m_kind == "f2";
    if (!f2 && m_kind != "e1") throw std::invalid_argument("unknown separator kind: " + m_kind);
    const std::size_t m = m_width ? m_width
                                  : (f2 ? ntk::separator_width_2d(m_n, gamma, m_delta, m_K)
                                        : ntk::separator_width(m_n, gamma, m_delta));
    const auto p = ntk::coupled_init({m, 2, 1.0, seed_or_env(m_seed), ntk::ScaleMode::inv_sqrt_m});
    const auto map = ntk::make_circle_rz(m_n);
    const auto sep = f2 ? ntk::build_separator_2d(p, ds, map, gamma) : ntk::build_separator(p, map);
    const auto margins = ntk::ntk_margin_at_init(p, ds, sep);
    double worst = margins.empty() ? 0.0 : margins[0];
    for (double v : margins) worst = std::min(worst, v);
    write_json(out, {{"m", m}, {"gamma", gamma}, {"target", f2 ? gamma / 4.0 : gamma / 2.0}, {"min_margin", worst},
                     {"per_point", margins}, {"row_norm_bound", sep.row_norm_bound},
                     {"empty_cones", sep.empty_cones}, {"clamped_cones", sep.clamped_cones}});
  });

  // train
  auto* train = app.add_subcommand("train", "Gradient descent under the derived schedules");
  train->require_subcommand(1);
  std::string config_path, summary_path;
  auto add_train = [&](CLI::App* c) {
    c->add_option("--config", config_path, "TrainConfig JSON; zero m/eta/T are derived")->required();
    c->add_option("--dataset", dataset_path, "dataset JSON (default: circle n=8 or sphere n=8 d=6)");
    c->add_option("--out", out, "trace CSV");
    c->add_option("--summary", summary_path, "summary JSON (default stdout)");
  };
  auto run_train = [&](ntk::LossKind loss) {
    json j = read_json(config_path);
    j["loss"] = ntk::to_string(loss);
    ntk::TrainConfig cfg = ntk::config_from_json(j);
    cfg.seed = seed_or_env(cfg.seed);
    const bool logistic = loss == ntk::LossKind::logistic;
    const ntk::Dataset ds = !dataset_path.empty() ? load_dataset(dataset_path)
                            : logistic           ? ntk::gen_alternating_circle(8)
                                                 : ntk::gen_random_sphere(8, 6, ntk::LabelMode::random_signs, cfg.seed);
    if (cfg.m == 0 || cfg.eta == 0.0 || cfg.T == 0) {
      ntk::TrainConfig derived;
      if (logistic) {
        const double gamma = cfg.gamma > 0.0 ? cfg.gamma : ntk::margin_circle_exact(ds.n());
        derived = ntk::derive_logistic_schedule(ds.n(), gamma, cfg.epsilon, cfg.delta);
      } else {
        auto k = ntk::h_cts(ds);
        const double lambda = cfg.lambda > 0.0 ? cfg.lambda : ntk::min_eig(k);
        double y2 = 0.0;
        for (double y : ds.labels) y2 += y * y;
        derived = ntk::derive_squared_schedule(ds.n(), lambda, cfg.epsilon, y2,
                                               cfg.m ? std::optional<std::size_t>(cfg.m) : std::nullopt,
                                               cfg.width_constant);
      }
      derived.seed = cfg.seed;
      if (j.contains("engine")) derived.engine = cfg.engine;
      if (j.contains("scale_mode")) derived.scale_mode = cfg.scale_mode;
      derived.record_every = cfg.record_every;
      derived.decomposition = cfg.decomposition;
      cfg = derived;
    }
    const auto tr = logistic ? ntk::train_logistic(ds, cfg) : ntk::train_squared(ds, cfg);
    if (!out.empty()) write_text(out, trace_csv(tr));
    write_json(summary_path, trace_summary(tr));
  };
  auto* tlog = train->add_subcommand("logistic", "Logistic loss");
  add_train(tlog);
  tlog->callback([&] { run_train(ntk::LossKind::logistic); });
  auto* tsq = train->add_subcommand("squared", "Squared loss");
  add_train(tsq);
  tsq->callback([&] { run_train(ntk::LossKind::squared); });

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Lower-bound constructions");
  bounds->require_subcommand(1);
  std::size_t b_n = 60, b_m = 6, b_trials = 2000, b_samples = 1000000;
  std::uint64_t b_seed = 1;
  auto* bseg = bounds->add_subcommand("segments", "Segments and misclassifications of a net on the circle");
  bseg->add_option("--params", params_path, "NetParams JSON (default: random Gaussian net)");
  bseg->add_option("--n", b_n, "circle size")->capture_default_str();
  bseg->add_option("--m", b_m, "width of the random net")->capture_default_str();
  bseg->add_option("--seed", b_seed)->capture_default_str();
  bseg->add_option("--out", out);
  bseg->callback([&] {
    ntk::NetParams p;
    if (!params_path.empty()) {
      p = ntk::params_from_json(read_json(params_path));
    } else {
      ntk::Rng rng(seed_or_env(b_seed), ntk::stream::kInit);
      p.weights = ntk::Matrix(b_m, 2);
      rng.fill_normal(p.weights.data());
      p.signs.resize(b_m);
      for (double& a : p.signs) a = rng.sign();
    }
    const auto r = ntk::count_segments(p, ntk::gen_alternating_circle(b_n));
    write_json(out, {{"breakpoints", r.breakpoint_count}, {"segments", r.segment_count},
                     {"misclassified", r.misclassified}, {"misclassified_original", r.misclassified_original},
                     {"bound_2m_plus_4", r.bound_2m_plus_4}});
  });
  auto* bcov = bounds->add_subcommand("coverage", "Quadruple-region coverage by random rows");
  bcov->add_option("--n", b_n)->capture_default_str();
  bcov->add_option("--m", b_m)->capture_default_str();
  bcov->add_option("--trials", b_trials)->capture_default_str();
  bcov->add_option("--samples", b_samples, "samples for the region measure")->capture_default_str();
  bcov->add_option("--seed", b_seed)->capture_default_str();
  bcov->add_option("--out", out);
  bcov->callback([&] {
    const auto seed = seed_or_env(b_seed);
    const auto r = ntk::coverage_sim(b_n, b_m, b_trials, seed);
    write_json(out, {{"uncovered_rate", r.uncovered_rate}, {"trials", r.trials},
                     {"region_measure", mc_json(ntk::quadruple_region_probability(b_n, b_samples, seed))},
                     {"region_measure_reference", 6.0 / static_cast<double>(b_n)}});
  });
  auto* bcoup = bounds->add_subcommand("coupon", "Coupon-collector uncovered rate");
  bcoup->add_option("--n-prime", b_n, "number of regions")->capture_default_str();
  bcoup->add_option("--m", b_m, "draws (0: floor(n' ln n' - n'))")->capture_default_str();
  bcoup->add_option("--trials", b_trials)->capture_default_str();
  bcoup->add_option("--seed", b_seed)->capture_default_str();
  bcoup->add_option("--out", out);
  bcoup->callback([&] {
    const double np = static_cast<double>(b_n);
    const std::size_t m = b_m ? b_m : static_cast<std::size_t>(std::floor(np * std::log(np) - np));
    write_json(out, {{"n_prime", b_n}, {"m", m},
                     {"uncovered_rate", ntk::coupon_collector_sim(b_n, m, b_trials, seed_or_env(b_seed))},
                     {"union_bound", ntk::coupon_union_bound(b_n, m)}});
  });
  auto* bfail = bounds->add_subcommand("failure-sim", "Failure rate of the empirical-mean estimator");
  bfail->add_option("--n", b_n)->capture_default_str();
  bfail->add_option("--m-prime", b_m)->capture_default_str();
  bfail->add_option("--trials", b_trials)->capture_default_str();
  bfail->add_option("--seed", b_seed)->capture_default_str();
  bfail->add_option("--out", out);
  bfail->callback([&] {
    const auto r = ntk::empirical_mean_failure_sim(b_n, b_m, b_trials, seed_or_env(b_seed));
    write_json(out, {{"failure_rate", r.failure_rate}, {"se", r.se}, {"trials", r.trials}, {"m_prime", r.m_prime},
                     {"point", r.point}});
  });

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment and emit CSV/SVG/JSON");
  std::size_t jobs = 1;
  std::string out_dir;
  experiment->add_option("--config", config_path, "ExperimentConfig JSON")->required();
  experiment->add_option("--jobs", jobs, "parallel rows")->capture_default_str();
  experiment->add_option("--out-dir", out_dir, "overrides out_dir in the config");
  experiment->callback([&] {
    ntk::ExperimentConfig cfg = ntk::experiment_config_from_json(read_json(config_path));
    cfg.seed = seed_or_env(cfg.seed);
    if (experiment->count("--jobs")) cfg.jobs = jobs;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    std::filesystem::create_directories(cfg.out_dir);
    ntk::ExperimentResult res;
    for (const auto& p : ntk::run_and_emit(cfg, &res)) std::printf("wrote %s\n", p.string().c_str());
    if (cfg.kind == ntk::ExperimentKind::acceptance)
      for (const auto& c : res.summary.at("criteria"))
        std::printf("[%s] %2d %s\n", c.at("passed").get<bool>() ? "PASS" : "FAIL", c.at("id").get<int>(),
                    c.at("name").get<std::string>().c_str());
    if (res.passed) {
      std::printf("%s\n", *res.passed ? "passed" : "failed");
      if (!*res.passed) status = kExitFail;
    }
  });

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria");
  std::vector<int> ids;
  selftest->add_option("ids", ids, "criterion ids (default all)");
  selftest->add_option("--jobs", jobs, "parallel criteria")->capture_default_str();
  selftest->callback([&] {
    status = print_acceptance(ntk::run_acceptance(seed_or_env(ntk::kAcceptanceSeed), jobs, ids));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
  return status;
}
