// Copyright 2026 The markov-risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "markov_risk/divergences.hpp"
#include "markov_risk/errors.hpp"
#include "markov_risk/estimators.hpp"
#include "markov_risk/lower_bounds.hpp"
#include "markov_risk/markov_core.hpp"
#include "markov_risk/parallel.hpp"
#include "markov_risk/report.hpp"
#include "markov_risk/risk_eval.hpp"
#include "markov_risk/theory.hpp"

namespace mkrisk::cli {

namespace {

using nlohmann::json;

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <typename T>
std::vector<T> scalar_or_list(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

std::uint64_t non_negative_int(const json& v) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    // Allow 1e5 style numbers as long as they are whole.
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw json::type_error::create(302, "expected a non-negative integer", &v);
  }
  return v.get<std::uint64_t>();
}

std::vector<std::uint64_t> int_list(const json& v) {
  std::vector<std::uint64_t> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(non_negative_int(e));
  } else {
    out.push_back(non_negative_int(v));
  }
  return out;
}

// Worker count: --workers when given, else RISK_WORKERS, else all cores.
std::size_t resolve_workers(std::optional<std::size_t> flag) {
  if (flag) {
    if (*flag < 1) throw ValidationError("--workers must be at least 1");
    return *flag;
  }
  return workers_from_env();
}

struct RunArgs {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::string> name;
  std::vector<std::uint64_t> k;
  std::vector<std::uint64_t> n;
  std::optional<std::uint64_t> n_min, n_max;
  std::optional<std::size_t> n_points;
  std::optional<double> delta;
  std::vector<std::string> divergences;
  std::vector<std::string> estimators;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> master_seed;
  bool burn_in = false;
  bool no_burn_in = false;
  std::optional<std::string> risk_mode;
  bool adjust = false;
  std::optional<std::string> out;
  std::optional<std::string> plot;
  std::string axes = "loglog";
  std::optional<std::size_t> workers;
};

int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  if (a.preset) {
    auto p = preset(*a.preset);
    if (!p) throw ValidationError("unknown preset '" + *a.preset + "'");
    config = *p;
  }
  if (a.config_path) config = load_config(*a.config_path, config);
  if (a.name) config.name = *a.name;
  if (!a.k.empty()) config.k_values = a.k;
  if (!a.n.empty()) config.n_values = a.n;
  if (a.n_min || a.n_max || a.n_points) {
    config.n_values.clear();
    if (a.n_min) config.n_min = *a.n_min;
    if (a.n_max) config.n_max = *a.n_max;
    if (a.n_points) config.n_points = *a.n_points;
  }
  if (a.delta) config.delta = *a.delta;
  if (!a.divergences.empty()) config.divergences = a.divergences;
  if (!a.estimators.empty()) config.estimators = a.estimators;
  if (a.trials) config.trials = *a.trials;
  if (a.master_seed) config.master_seed = *a.master_seed;
  if (a.burn_in) config.burn_in = true;
  if (a.no_burn_in) config.burn_in = false;
  if (a.risk_mode) config.risk_mode = parse_risk_mode(*a.risk_mode);
  if (a.adjust) config.adjust_prediction_constant = true;
  const auto axes = parse_plot_axes(a.axes);
  validate(config);

  const auto rows = run_experiment(config, resolve_workers(a.workers));
  if (a.out) {
    emit_csv(rows, *a.out);
    err << "wrote " << rows.size() << " rows to " << *a.out << '\n';
  } else {
    out << to_csv(rows);
  }
  if (a.plot) emit_plot(rows, *a.plot, axes);
  return kExitOk;
}

struct TheoryArgs {
  std::string quantity = "bound";
  std::string risk = "estimation_f";
  std::string side = "upper";
  std::uint64_t k = 6;
  std::uint64_t n = 100'000;
  std::optional<double> delta;
  std::optional<double> pi_star;
  std::optional<double> curvature;
  std::optional<std::string> divergence;
  double t = 0.0;
  std::uint64_t m = 2;
  double p = 0.5;
  double epsilon = 0.1;
  bool adjust = false;
};

int do_theory(const TheoryArgs& a, std::ostream& out) {
  std::string label = a.quantity;
  double value = 0.0;
  auto need_delta = [&] {
    if (!a.delta) throw ValidationError(a.quantity + " needs --delta");
    return *a.delta;
  };
  if (a.quantity == "bound") {
    BoundQuery q;
    q.k = a.k;
    q.n = a.n;
    q.delta = a.delta;
    q.pi_star = a.pi_star;
    q.side = parse_bound_side(a.side);
    q.risk = parse_bound_risk(a.risk);
    if (a.divergence) {
      const auto spec = builtin(*a.divergence);
      if (!spec.curvature()) throw ValidationError("--divergence must be an f-divergence");
      q.curvature = *spec.curvature();
    }
    if (a.curvature) q.curvature = *a.curvature;
    value = bound(q);
    if (a.adjust && q.risk == BoundRisk::prediction_kl && q.side == BoundSide::upper) value /= 4.0;
    label = a.risk + "_" + a.side;
  } else if (a.quantity == "c_delta") {
    value = static_cast<double>(c_delta(need_delta()));
  } else if (a.quantity == "concentration_tail") {
    value = concentration_tail(a.n, need_delta(), a.t);
  } else if (a.quantity == "moment_bound") {
    value = moment_bound(a.m, a.n, need_delta());
  } else if (a.quantity == "binomial_tail") {
    value = binomial_tail(a.m, a.p, a.epsilon);
  } else if (a.quantity == "mixing_envelope") {
    value = mixing_envelope(need_delta(), static_cast<std::uint64_t>(a.t));
  } else {
    throw ValidationError("unknown quantity '" + a.quantity + "'");
  }
  out << "quantity,value\n" << label << ',' << num(value) << '\n';
  return kExitOk;
}

struct PriorArgs {
  std::string kind = "prediction";
  std::uint64_t k = 4;
  std::uint64_t n = 10'000;
  std::vector<double> values;
  double delta = 0.01;
  double pi_star = 0.1;
  double epsilon = 0.1;
  std::size_t trials = 0;
  std::string estimator = "add(0.5)";
  std::string divergence = "kl";
  std::uint64_t seed = 1;
  std::optional<std::size_t> workers;
};

int do_priors(const PriorArgs& a, std::ostream& out) {
  if (a.kind == "prediction") {
    const PredictionPrior prior = a.values.empty() ? PredictionPrior(a.k, a.n)
                                                   : PredictionPrior(a.k, a.n, a.values);
    std::string vals;
    for (double v : prior.values()) vals += (vals.empty() ? "" : ";") + num(v);
    const double risk = prediction_prior_partial_bayes_risk(prior);
    const double lower =
        a.n >= 3 ? bound({a.k, a.n, {}, {}, 1.0, BoundSide::lower, BoundRisk::prediction_kl})
                 : std::nan("");
    out << "kind,k,n,values,partial_bayes_risk,prediction_lower_bound\n"
        << "prediction," << a.k << ',' << a.n << ',' << vals << ',' << num(risk) << ','
        << num(lower) << '\n';
    return kExitOk;
  }
  if (a.kind == "estimation") {
    const EstimationPrior prior(a.k, a.n, a.delta, a.pi_star, a.epsilon);
    const auto spec = builtin(a.divergence);
    double gap = std::nan(""), se = std::nan(""), lower = std::nan(""), upper = std::nan("");
    if (spec.is_f_divergence()) {
      BoundQuery q{a.k, a.n, {}, a.pi_star, *spec.curvature(), BoundSide::lower,
                   BoundRisk::estimation_f};
      lower = bound(q);
      q.side = BoundSide::upper;
      upper = bound(q);
    }
    if (a.trials > 0) {
      const auto r = estimation_prior_bayes_gap(
          prior, make_matrix_estimator(parse_estimator(a.estimator)), spec, a.trials, a.seed,
          resolve_workers(a.workers));
      gap = r.value;
      se = r.std_error;
    }
    out << "kind,k,n,delta,pi_star,epsilon,n_prime,radius,estimator,divergence,trials,bayes_gap,"
           "stderr,lower_bound,upper_bound\n"
        << "estimation," << a.k << ',' << a.n << ',' << num(a.delta) << ',' << num(a.pi_star)
        << ',' << num(a.epsilon) << ',' << num(prior.reduced_size()) << ','
        << num(prior.radius()) << ',' << a.estimator << ',' << spec.name() << ',' << a.trials
        << ',' << num(gap) << ',' << num(se) << ',' << num(lower) << ',' << num(upper) << '\n';
    return kExitOk;
  }
  throw ValidationError("unknown prior kind '" + a.kind + "' (prediction|estimation)");
}

// Quick oracle-equivalence checks; each prints one line.
int do_selftest(std::ostream& out) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    if (!ok) ++failures;
  };

  {
    // Closed-form posterior mean against the mixture over every prior chain.
    const std::size_t k = 4, n = 6;
    const PredictionPrior prior(k, n, {0.2, 0.1, 0.05});
    const auto chains = prior.all_chains();
    double worst = 0.0;
    std::size_t members = 0;
    std::vector<State> s(n, 0);
    for (std::size_t code = 0; code < 4096; ++code) {
      std::size_t c = code;
      for (std::size_t t = 0; t < n; ++t, c /= k) s[n - 1 - t] = c % k;
      const SampleSequence x(s, k);
      const auto cls = classify_tail_run(x);
      if (!cls.member) continue;
      ++members;
      const auto a = bayes_closed_form(prior, cls);
      const auto b = bayes_bruteforce(chains, x);
      for (State j = 0; j < k; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    }
    report("bayes_closed_form", worst <= 1e-10,
           std::to_string(members) + " sequences, max deviation " + num(worst));
  }
  {
    // Exact enumeration against Monte Carlo on a small chain.
    const auto chain = random_chain(2, 0.05, 7);
    const auto predictor = make_predictor(parse_estimator("add(0.5)"));
    const auto spec = DivergenceSpec::kl();
    const auto exact = exact_prediction_risk(chain, predictor, 6, spec);
    const auto mc = monte_carlo_prediction_risk(chain, predictor, 6, spec, 4000, 11);
    const double z = std::abs(exact.value - mc.value) / mc.std_error;
    report("prediction_risk_mc", z <= 4.0,
           "exact " + num(exact.value) + ", mc " + num(mc.value) + ", z " + num(z));
  }
  {
    const double lo = bound({6, 100'000, {}, {}, 1.0, BoundSide::lower, BoundRisk::prediction_kl});
    const double hi = bound({6, 100'000, {}, {}, 1.0, BoundSide::upper, BoundRisk::prediction_kl});
    const bool ok = std::abs(lo / 1.1236e-5 - 1.0) <= 1e-4 && std::abs(hi / 1.7593e-3 - 1.0) <= 1e-4;
    report("prediction_bounds", ok, "lower " + num(lo) + ", upper " + num(hi));
  }
  {
    const auto chain = random_chain(5, 0.02, 3);
    const auto pi = stationary_distribution(chain.matrix());
    const auto next = chain.matrix().left_multiply(pi.probs());
    const double resid = l1_distance(next, pi.probs());
    report("stationary_residual", resid <= 1e-12, "||pi M - pi||_1 = " + num(resid));
  }
  {
    const auto chain = random_chain(4, 0.0, 5);
    bool ok = true;
    for (State i = 0; i < 4; ++i) {
      for (State j = 0; j < 4; ++j) {
        if (i == j) continue;
        const auto pmf = hitting_time_pmf(chain.matrix(), i, j, 100);
        for (std::size_t t = 5; t <= 100; ++t) ok = ok && pmf[t] <= 4.0 / static_cast<double>(t);
      }
    }
    report("hitting_time_envelope", ok, "pmf(t) <= k/t for t > k");
  }
  out << (failures == 0 ? "selftest passed\n" : "selftest failed\n");
  return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

ExperimentConfig apply_json(const json& doc, ExperimentConfig c) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  if (auto it = doc.find("preset"); it != doc.end()) {
    if (!it->is_string()) throw ValidationError("config field 'preset': expected a string");
    auto p = preset(it->get<std::string>());
    if (!p) throw ValidationError("config field 'preset': unknown preset '" + it->get<std::string>() + "'");
    c = *p;
  }
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "preset") continue;
      if (key == "name") {
        c.name = v.get<std::string>();
      } else if (key == "k" || key == "k_values") {
        c.k_values = int_list(v);
      } else if (key == "n" || key == "n_values") {
        c.n_values = int_list(v);
      } else if (key == "n_min") {
        c.n_min = non_negative_int(v);
        c.n_values.clear();
      } else if (key == "n_max") {
        c.n_max = non_negative_int(v);
        c.n_values.clear();
      } else if (key == "n_points") {
        c.n_points = non_negative_int(v);
        c.n_values.clear();
      } else if (key == "delta") {
        c.delta = v.get<double>();
      } else if (key == "divergences") {
        c.divergences = scalar_or_list<std::string>(v);
      } else if (key == "estimators") {
        c.estimators = scalar_or_list<std::string>(v);
      } else if (key == "trials") {
        c.trials = non_negative_int(v);
      } else if (key == "master_seed") {
        c.master_seed = non_negative_int(v);
      } else if (key == "burn_in") {
        c.burn_in = v.get<bool>();
      } else if (key == "risk_mode") {
        c.risk_mode = parse_risk_mode(v.get<std::string>());
      } else if (key == "adjust_prediction_constant") {
        c.adjust_prediction_constant = v.get<bool>();
      } else {
        throw ValidationError("config field '" + key + "': unknown key");
      }
    } catch (const json::exception& e) {
      throw ValidationError("config field '" + key + "': " + e.what());
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind("config field", 0) == 0) throw;
      throw ValidationError("config field '" + key + "': " + what);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return apply_json(doc, std::move(base));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov chain estimation risk experiments", "markov-risk"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment sweep and emit CSV (and SVG)");
  run_cmd->add_option("config", ra.config_path, "Flat JSON config file");
  run_cmd->add_option("--preset", ra.preset, "Start from fig1a, fig1b, fig1c or fig1d");
  run_cmd->add_option("--name", ra.name);
  run_cmd->add_option("--k", ra.k, "k values")->delimiter(',');
  run_cmd->add_option("--n", ra.n, "Explicit n grid")->delimiter(',');
  run_cmd->add_option("--n-min", ra.n_min);
  run_cmd->add_option("--n-max", ra.n_max);
  run_cmd->add_option("--n-points", ra.n_points);
  run_cmd->add_option("--delta", ra.delta);
  run_cmd->add_option("--divergences", ra.divergences)->delimiter(',');
  run_cmd->add_option("--estimators", ra.estimators)->delimiter(',');
  run_cmd->add_option("--trials", ra.trials);
  run_cmd->add_option("--master-seed", ra.master_seed);
  run_cmd->add_flag("--burn-in", ra.burn_in);
  run_cmd->add_flag("--no-burn-in", ra.no_burn_in);
  run_cmd->add_option("--risk-mode", ra.risk_mode, "prediction, max or weighted");
  run_cmd->add_flag("--adjust-prediction-constant", ra.adjust);
  run_cmd->add_option("--out", ra.out, "CSV path (stdout when absent)");
  run_cmd->add_option("--plot", ra.plot, "SVG path");
  run_cmd->add_option("--axes", ra.axes, "loglog or semilog");
  run_cmd->add_option("--workers", ra.workers, "Overrides RISK_WORKERS");

  TheoryArgs ta;
  auto* theory_cmd = app.add_subcommand("theory", "Evaluate a closed-form bound");
  theory_cmd->add_option("--quantity", ta.quantity,
                         "bound, c_delta, concentration_tail, moment_bound, binomial_tail, "
                         "mixing_envelope");
  theory_cmd->add_option("--risk", ta.risk);
  theory_cmd->add_option("--side", ta.side);
  theory_cmd->add_option("--k", ta.k);
  theory_cmd->add_option("--n", ta.n);
  theory_cmd->add_option("--delta", ta.delta);
  theory_cmd->add_option("--pi-star", ta.pi_star);
  theory_cmd->add_option("--curvature", ta.curvature);
  theory_cmd->add_option("--divergence", ta.divergence, "Take the curvature from a loss");
  theory_cmd->add_option("--t", ta.t);
  theory_cmd->add_option("--m", ta.m);
  theory_cmd->add_option("--p", ta.p);
  theory_cmd->add_option("--epsilon", ta.epsilon);
  theory_cmd->add_flag("--adjust-prediction-constant", ta.adjust);

  PriorArgs pa;
  auto* priors_cmd = app.add_subcommand("priors", "Lower-bound prior diagnostics as CSV");
  priors_cmd->add_option("--kind", pa.kind, "prediction or estimation");
  priors_cmd->add_option("--k", pa.k);
  priors_cmd->add_option("--n", pa.n);
  priors_cmd->add_option("--values", pa.values, "Explicit value set")->delimiter(',');
  priors_cmd->add_option("--delta", pa.delta);
  priors_cmd->add_option("--pi-star", pa.pi_star);
  priors_cmd->add_option("--epsilon", pa.epsilon);
  priors_cmd->add_option("--trials", pa.trials, "Monte Carlo trials for the Bayes gap");
  priors_cmd->add_option("--estimator", pa.estimator);
  priors_cmd->add_option("--divergence", pa.divergence);
  priors_cmd->add_option("--seed", pa.seed);
  priors_cmd->add_option("--workers", pa.workers);

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the oracle-equivalence checks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run_cmd) return do_run(ra, out, err);
    if (*theory_cmd) return do_theory(ta, out);
    if (*priors_cmd) return do_priors(pa, out);
    if (*selftest_cmd) return do_selftest(out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitInvalid;
}

}  // namespace mkrisk::cli
