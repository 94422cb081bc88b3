// eqlab command line: simulate | couple | divergence | decompose | sweep | bounds.
// Exit codes: 0 success, 2 infeasible parameters, 1 error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eqlab/couplings.hpp"
#include "eqlab/divergence.hpp"
#include "eqlab/experiments.hpp"
#include "eqlab/harness.hpp"
#include "eqlab/serialize.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace eqlab;

constexpr int kExitInfeasible = 2;

struct SpecFlags {
  std::size_t n = 1024;
  std::optional<int> k0;
  std::optional<int> k1;
  std::string mean = "sine";
  std::string logvar = "constant";
  double sigma = 1.0;
  FixtureParams params;
};

struct OutputFlags {
  std::string out;
  std::string csv;
  std::string config;
  std::uint64_t seed = 1;
  int indent = 2;
};

void add_spec_flags(CLI::App* app, SpecFlags& s) {
  app->add_option("--n", s.n, "Sample size (power of two)")->capture_default_str();
  app->add_option("--k0", s.k0, "Coarse level, m0 = 2^k0");
  app->add_option("--k1", s.k1, "Block level, m1 = 2^k1");
  app->add_option("--fixture-mean", s.mean, "Mean fixture")->capture_default_str();
  app->add_option("--fixture-logvar", s.logvar, "Log-variance fixture")->capture_default_str();
  app->add_option("--sigma", s.sigma, "Noise level for constant-variance experiments")->capture_default_str();
  app->add_option("--alpha", s.params.alpha, "Mean smoothness")->capture_default_str();
  app->add_option("--alpha1", s.params.alpha1, "Log-variance smoothness")->capture_default_str();
  app->add_option("--amplitude", s.params.amplitude, "Mean amplitude")->capture_default_str();
  app->add_option("--holder-M", s.params.holder_M, "Holder constant for constant tau")->capture_default_str();
  app->add_option("--tau-level", s.params.tau_level)->capture_default_str();
  app->add_option("--tau-slope", s.params.tau_slope)->capture_default_str();
  app->add_option("--tau-curvature", s.params.tau_curvature)->capture_default_str();
  app->add_option("--tau-amplitude", s.params.tau_amplitude)->capture_default_str();
}

void add_output_flags(CLI::App* app, OutputFlags& o, bool csv) {
  app->add_option("--config", o.config, "key=value file; keys are long flag names, later flags win");
  app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app->add_option("--out", o.out, "Write JSON here instead of stdout");
  app->add_option("--indent", o.indent, "JSON indent, -1 for compact")->capture_default_str();
  if (csv) app->add_option("--csv", o.csv, "Also write a CSV table here");
}

void emit(const OutputFlags& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw std::runtime_error("cannot open " + o.out);
  f << text << '\n';
}

ModelSpec build_spec(const SpecFlags& s, SweepMode mode) {
  const int k = dyadic_log2(s.n);
  if (s.k0) {
    return make_model_spec(s.mean, s.logvar, k, *s.k0, s.k1.value_or(0), s.params, s.sigma);
  }
  SweepTemplate tpl;
  tpl.mean_name = s.mean;
  tpl.logvar_name = s.logvar;
  tpl.params = s.params;
  tpl.sigma = s.sigma;
  tpl.mode = mode;
  ModelSpec spec = sweep_spec(tpl, k);
  if (s.k1 && *s.k1 != spec.k1) {
    spec = make_model_spec(s.mean, s.logvar, k, spec.k0, *s.k1, s.params, s.sigma);
  }
  return spec;
}

ExperimentDraw simulate(const ModelSpec& spec, Label label, RngStream& rng) {
  switch (label) {
    case Label::P: return sample_regression(spec, false, rng);
    case Label::Pcheck: return sample_regression(spec, true, rng);
    case Label::Pbar: return sample_sequence(spec, false, rng);
    case Label::Ptilde: return sample_sequence(spec, true, rng);
    case Label::Q: return sample_q(spec, false, rng);
    case Label::Qtilde: return sample_q(spec, true, rng);
    case Label::Qcheck: return sample_q_check(spec, default_process_cells(spec), rng);
  }
  throw std::logic_error("unreachable label");
}

CouplingOutput couple(const ExperimentDraw& src, Label to, RngStream& rng) {
  const DrawShape shape = shape_of(src);
  const Label from = src.label;
  if (from == Label::Pbar && to == Label::Q) return pbar_to_q(src, shape, rng);
  if (from == Label::Q && to == Label::Pbar) return q_to_pbar(src, shape, rng);
  if (from == Label::Ptilde && to == Label::Qtilde) return ptilde_to_qtilde(src, shape, rng);
  if (from == Label::Qtilde && to == Label::Ptilde) return qtilde_to_ptilde(src, shape, rng);
  if (from == Label::P && to == Label::Pbar) return regression_to_sequence(src, shape);
  if (from == Label::Pbar && to == Label::P) return sequence_to_regression(src, shape);
  if (from == Label::Pcheck && to == Label::Ptilde) return pcheck_to_ptilde(src, shape, rng);
  if (from == Label::Ptilde && to == Label::Pcheck) return ptilde_to_pcheck(src, shape, rng);
  throw std::invalid_argument("no coupling from " + std::string(label_name(from)) + " to " +
                              std::string(label_name(to)) +
                              "; supported: Pbar<->Q, Ptilde<->Qtilde, P<->Pbar, Ptilde<->Pcheck");
}

SweepMode mode_for(Label l) {
  return (l == Label::P || l == Label::Pbar || l == Label::Q) ? SweepMode::Theorem1 : SweepMode::Pipeline7;
}

json pair_json(const std::vector<double>& v) { return json(v); }

double finite_or_nan(double x) { return std::isfinite(x) ? x : std::nan(""); }

json divergence_record(const std::string& family, const std::vector<double>& p, const std::vector<double>& q,
                       double alpha, double delta, const std::vector<double>& weights,
                       const std::vector<double>& log_scales, double n) {
  const auto need = [](const std::vector<double>& v, const char* what) {
    if (v.size() != 2) throw std::invalid_argument(std::string(what) + " needs two values");
  };
  json r = {{"family", family}};
  double exact = 0.0;
  std::optional<double> bound;
  std::optional<double> oracle;
  if (family == "normal") {
    need(p, "--p");
    need(q, "--q");
    const NormalParams a{p[0], p[1]};
    const NormalParams b{q[0], q[1]};
    r["params"] = {{"p", pair_json(p)}, {"q", pair_json(q)}};
    exact = kl_normal(a, b);
    oracle = kl_normal_quadrature(a, b).value;
  } else if (family == "gamma") {
    need(p, "--p");
    need(q, "--q");
    const GammaParams a{p[0], p[1]};
    const GammaParams b{q[0], q[1]};
    r["params"] = {{"p", pair_json(p)}, {"q", pair_json(q)}};
    exact = kl_gamma_exact(a, b);
    oracle = kl_gamma_quadrature(a, b).value;
    if (std::abs(a.shape * a.scale - b.shape * b.scale) <= 1e-12 * a.shape * a.scale) {
      bound = gamma_same_mean_leading(a.shape, b.shape) * (1.0 + 10.0 / a.shape);
    }
  } else if (family == "loggamma") {
    r["params"] = {{"alpha", alpha}};
    const auto c = kl_loggamma_vs_normal(alpha);
    exact = c.exact;
    bound = c.bound;
    oracle = c.oracle;
  } else if (family == "remainder") {
    r["params"] = {{"alpha", alpha}, {"delta", delta}};
    const auto e = loggamma_taylor_remainder(alpha, delta);
    exact = e.exact;
    oracle = e.expansion;
    bound = 10.0 * (std::pow(std::abs(delta), 5) / std::pow(alpha, 4) + delta * delta / std::pow(alpha, 3));
    r["oracle_kind"] = "expansion";
  } else if (family == "gamma-sum") {
    GammaSumSpec gs{weights, log_scales, n};
    r["params"] = {{"weights", weights}, {"log_scales", log_scales}, {"n", n}};
    const auto s = kl_gamma_sum(gs);
    exact = s.numeric;
    bound = s.paper_bound;
    r["joint"] = s.joint;
  } else {
    throw std::invalid_argument("unknown family " + family +
                                "; expected normal, gamma, loggamma, remainder or gamma-sum");
  }
  r["exact"] = exact;
  r["bound"] = bound ? json(finite_or_nan(*bound)) : json(nullptr);
  r["oracle"] = oracle ? json(*oracle) : json(nullptr);
  r["abs_err"] = oracle ? json(std::abs(exact - *oracle)) : json(nullptr);
  return r;
}

// Subcommand configs are not read by CLI11, so splice the file's keys in as
// flags right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t width = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      width = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      width = 1;
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    const std::string sub = args.empty() ? "" : args.front();
    std::vector<std::string> flags;
    for (const auto& item : CLI::ConfigINI().from_config(in)) {
      if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == sub)) continue;
      if (item.name == "++" || item.name == "--") continue;
      for (const auto& v : item.inputs) {
        flags.push_back("--" + item.name);
        flags.push_back(v);
      }
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + width));
    args.insert(args.begin() + 1, flags.begin(), flags.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and divergence toolkit for Gaussian regression and variance experiments"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SpecFlags spec_flags;
  OutputFlags out_flags;

  auto* sim = app.add_subcommand("simulate", "Draw one observation of an experiment");
  std::string sim_label = "P";
  sim->add_option("--label", sim_label, "P, Pbar, Q, Ptilde, Qtilde, Pcheck or Qcheck")->capture_default_str();
  add_spec_flags(sim, spec_flags);
  add_output_flags(sim, out_flags, false);

  auto* cpl = app.add_subcommand("couple", "Draw from one experiment and map it to another");
  std::string from = "Pbar";
  std::string to = "Q";
  cpl->add_option("--from", from, "Source experiment")->capture_default_str();
  cpl->add_option("--to", to, "Target experiment")->capture_default_str();
  add_spec_flags(cpl, spec_flags);
  add_output_flags(cpl, out_flags, false);

  auto* div = app.add_subcommand("divergence", "Closed-form divergence with bound and oracle");
  std::string family = "gamma";
  std::vector<double> p{2.0, 1.0};
  std::vector<double> q{1.0, 2.0};
  double alpha = 10.0;
  double delta = 1.0;
  std::vector<double> weights{0.5, 0.5};
  std::vector<double> log_scales{0.05, -0.05};
  double sum_n = 1000.0;
  div->add_option("--family", family, "normal, gamma, loggamma, remainder or gamma-sum")->capture_default_str();
  div->add_option("--p", p, "First law: mean,variance or shape,scale")->delimiter(',')->expected(2);
  div->add_option("--q", q, "Second law")->delimiter(',')->expected(2);
  div->add_option("--alpha", alpha, "Shape for loggamma and remainder")->capture_default_str();
  div->add_option("--delta", delta, "Shift for remainder")->capture_default_str();
  div->add_option("--weights", weights, "gamma-sum weights")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  div->add_option("--log-scales", log_scales, "gamma-sum log variances")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  div->add_option("--sum-n", sum_n, "gamma-sum total shape")->capture_default_str();
  add_output_flags(div, out_flags, false);

  auto* dec = app.add_subcommand("decompose", "Per-term divergence breakdown");
  std::string dec_mode = "theorem1";
  dec->add_option("--mode", dec_mode, "theorem1, lemma2 or pipeline7")->capture_default_str();
  add_spec_flags(dec, spec_flags);
  add_output_flags(dec, out_flags, false);

  auto* swp = app.add_subcommand("sweep", "Rate sweep over a dyadic grid of n");
  std::string swp_mode = "theorem1";
  int kmin = 8;
  int kmax = 16;
  SweepOptions sopt;
  swp->add_option("--mode", swp_mode, "theorem1, lemma2 or pipeline7")->capture_default_str();
  swp->add_option("--kmin", kmin, "Smallest log2 n")->capture_default_str();
  swp->add_option("--kmax", kmax, "Largest log2 n (at most 20)")->capture_default_str();
  swp->add_option("--replicates", sopt.replicates, "Monte-Carlo pairs per n, 0 to skip")->capture_default_str();
  swp->add_option("--threads", sopt.threads, "Worker threads")->capture_default_str();
  swp->add_option("--fixture-mean", spec_flags.mean)->capture_default_str();
  swp->add_option("--fixture-logvar", spec_flags.logvar)->capture_default_str();
  swp->add_option("--sigma", spec_flags.sigma)->capture_default_str();
  swp->add_option("--alpha", spec_flags.params.alpha)->capture_default_str();
  swp->add_option("--alpha1", spec_flags.params.alpha1)->capture_default_str();
  swp->add_option("--amplitude", spec_flags.params.amplitude)->capture_default_str();
  add_output_flags(swp, out_flags, true);

  auto* bnd = app.add_subcommand("bounds", "Evaluate the stated bounds and the exponent feasibility");
  add_spec_flags(bnd, spec_flags);
  add_output_flags(bnd, out_flags, false);

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (sim->parsed()) {
      const Label label = parse_label(sim_label);
      const ModelSpec spec = build_spec(spec_flags, mode_for(label));
      RngStream rng(out_flags.seed, 0);
      emit(out_flags, to_json(simulate(spec, label, rng), out_flags.indent));
    } else if (cpl->parsed()) {
      const Label src = parse_label(from);
      const ModelSpec spec = build_spec(spec_flags, mode_for(src));
      RngStream rng(out_flags.seed, 0);
      const ExperimentDraw draw = simulate(spec, src, rng);
      RngStream crng(out_flags.seed, 1);
      emit(out_flags, to_json(couple(draw, parse_label(to), crng), out_flags.indent));
    } else if (div->parsed()) {
      emit(out_flags, divergence_record(family, p, q, alpha, delta, weights, log_scales, sum_n).dump(out_flags.indent));
    } else if (dec->parsed()) {
      const SweepMode mode = parse_sweep_mode(dec_mode);
      const ModelSpec spec = build_spec(spec_flags, mode);
      DivergenceBreakdown b;
      switch (mode) {
        case SweepMode::Theorem1: b = decompose_theorem1(spec); break;
        case SweepMode::Lemma2: b = decompose_lemma2(spec); break;
        case SweepMode::Pipeline7: b = decompose_pipeline7(spec); break;
      }
      emit(out_flags, to_json(b, out_flags.indent));
    } else if (swp->parsed()) {
      SweepTemplate tpl;
      tpl.mean_name = spec_flags.mean;
      tpl.logvar_name = spec_flags.logvar;
      tpl.params = spec_flags.params;
      tpl.sigma = spec_flags.sigma;
      tpl.mode = parse_sweep_mode(swp_mode);
      sopt.seed = out_flags.seed;
      std::vector<int> ks;
      for (int k = kmin; k <= kmax; ++k) ks.push_back(k);
      const SweepReport rep = rate_sweep(tpl, ks, sopt);
      emit(out_flags, to_json(rep, out_flags.indent));
      if (!out_flags.csv.empty()) {
        std::ofstream f(out_flags.csv);
        if (!f) throw std::runtime_error("cannot open " + out_flags.csv);
        f << sweep_csv(rep);
      }
    } else if (bnd->parsed()) {
      const ModelSpec spec = build_spec(spec_flags, SweepMode::Pipeline7);
      const BoundsReport b = evaluate_bounds(spec);
      emit(out_flags, to_json(b, out_flags.indent));
      if (!b.feasibility.feasible) {
        std::cerr << "infeasible: " << b.feasibility.reason << '\n';
        return kExitInfeasible;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
