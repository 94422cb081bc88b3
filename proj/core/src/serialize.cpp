#include "eqlab/serialize.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace eqlab {
namespace {

using nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string dump(const json& j, int indent) { return j.dump(indent); }

json ladder_json(const HaarLadder& l) {
  json w = json::array();
  for (const auto& level : l.wavelets) w.push_back(nums(level));
  return {{"k0", l.coarse_level}, {"k", l.fine_level}, {"scaling", nums(l.scaling)}, {"wavelets", w}};
}

json draw_json(const ExperimentDraw& d) {
  json j = {{"label", std::string(label_name(d.label))},
            {"k", d.k},
            {"k0", d.k0},
            {"k1", d.k1},
            {"spec_hash", d.spec_hash},
            {"seed", d.seed},
            {"stream", d.stream}};
  if (!d.y.empty()) j["y"] = nums(d.y);
  if (!d.coeffs.scaling.empty()) j["coeffs"] = ladder_json(d.coeffs);
  if (!d.variances.empty()) j["variances"] = nums(d.variances);
  if (!d.dv.empty()) j["dv"] = nums(d.dv);
  if (!d.dy.empty()) j["dy"] = nums(d.dy);
  if (!d.z.empty()) j["z"] = nums(d.z);
  return j;
}

std::vector<double> read_array(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(x.is_null() ? std::nan("") : x.get<double>());
  return out;
}

HaarLadder ladder_from(const json& j) {
  HaarLadder l;
  l.coarse_level = j.at("k0").get<int>();
  l.fine_level = j.at("k").get<int>();
  l.scaling = read_array(j.at("scaling"));
  for (const auto& level : j.at("wavelets")) l.wavelets.push_back(read_array(level));
  l.validate();
  return l;
}

json auc_json(const AucResult& a) {
  return {{"auc", num(a.auc)}, {"se", num(a.se)}, {"lo", num(a.lo)}, {"hi", num(a.hi)}};
}

template <class F>
auto parse_or_throw(const std::string& text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON record: ") + e.what());
  }
}

}  // namespace

std::string to_json(const HaarLadder& ladder, int indent) { return dump(ladder_json(ladder), indent); }

std::string to_json(const ExperimentDraw& draw, int indent) { return dump(draw_json(draw), indent); }

std::string to_json(const CouplingOutput& out, int indent) {
  json j = {{"draw", draw_json(out.draw)}};
  j["vhat"] = nums(out.vhat);
  j["vstar"] = nums(out.vstar);
  j["tau_hat"] = nums(out.tau_hat);
  j["aux_count"] = out.aux.size();
  return dump(j, indent);
}

std::string to_json(const DivergenceBreakdown& b, int indent) {
  json terms = json::array();
  for (const auto& t : b.terms) {
    json tj = {{"name", t.name},
               {"exact", num(t.exact)},
               {"bound", num(t.bound)},
               {"bound_alt", num(t.bound_alt)},
               {"method", std::string(method_name(t.method))},
               {"slack", num(t.slack)},
               {"signed", t.signed_value},
               {"verified", t.verified()}};
    if (!t.per_unit.empty()) tj["per_unit"] = nums(t.per_unit);
    terms.push_back(tj);
  }
  json j = {{"id", b.id},
            {"terms", terms},
            {"total", num(b.total)},
            {"total_bound", num(b.total_bound)},
            {"tv_surrogate", num(b.tv_surrogate)}};
  return dump(j, indent);
}

std::string to_json(const BoundsReport& b, int indent) {
  const auto& f = b.feasibility;
  json j = {{"n", num(b.n)},
            {"m0", num(b.m0)},
            {"m1", num(b.m1)},
            {"gamma_k0", num(b.gamma_k0)},
            {"lemma1", num(b.lemma1)},
            {"lemma1_power", num(b.lemma1_power)},
            {"headline", num(b.headline)},
            {"lemma2_statement", num(b.lemma2_statement)},
            {"lemma2_derived", num(b.lemma2_derived)},
            {"lemma3_as_displayed", num(b.lemma3)},
            {"lemma4", num(b.lemma4)},
            {"zeta0", num(b.zeta0)},
            {"zeta1", num(b.zeta1)},
            {"exponents_ok", b.spec_exponents_ok},
            {"recommended_m0", num(b.recommended_m0)},
            {"recommended_m1", num(b.recommended_m1)},
            {"feasibility",
             {{"feasible", f.feasible},
              {"alpha_ok", f.alpha_ok},
              {"alpha1_ok", f.alpha1_ok},
              {"alpha1_threshold", num(f.alpha1_threshold)},
              {"epsilon", num(f.epsilon)},
              {"zeta0", num(f.zeta0)},
              {"zeta1", num(f.zeta1)},
              {"reason", f.reason}}}};
  return dump(j, indent);
}

std::string to_json(const SweepReport& s, int indent) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"n", r.n},
                    {"k0", r.k0},
                    {"k1", r.k1},
                    {"m", num(r.m)},
                    {"m0", num(r.m0)},
                    {"m1", num(r.m1)},
                    {"zeta0", num(r.zeta0)},
                    {"zeta1", num(r.zeta1)},
                    {"bound", num(r.bound)},
                    {"kl_bound", num(r.kl_bound)},
                    {"kl_total", num(r.kl_total)},
                    {"tv_surrogate", num(r.tv_surrogate)},
                    {"auc", auc_json(r.auc)},
                    {"min_ks_p", num(r.min_ks_p)},
                    {"marginals_pass", r.marginals_pass},
                    {"slope_partial", num(r.slope_partial)},
                    {"seconds", num(r.seconds)}});
  }
  json j = {{"rows", rows},
            {"slope", num(s.slope)},
            {"slope_se", num(s.slope_se)},
            {"bound_slope", num(s.bound_slope)},
            {"bound_slope_se", num(s.bound_slope_se)}};
  return dump(j, indent);
}

std::string to_json(const TwoSampleReport& r, int indent) {
  json marg = json::array();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    marg.push_back({{"feature", r.names[i]},
                    {"ks", num(r.ks[i].statistic)},
                    {"p", num(r.ks[i].p_value)},
                    {"mean_diff", num(r.mean_diff[i])}});
  }
  json j = {{"marginals", marg},
            {"max_cov_diff", num(r.max_cov_diff)},
            {"min_p", num(r.min_p())},
            {"marginals_pass", r.marginals_pass()},
            {"auc", auc_json(r.auc)}};
  return dump(j, indent);
}

HaarLadder ladder_from_json(const std::string& text) {
  return parse_or_throw(text, [](const json& j) { return ladder_from(j); });
}

ExperimentDraw draw_from_json(const std::string& text) {
  return parse_or_throw(text, [](const json& j) {
    ExperimentDraw d;
    d.label = parse_label(j.at("label").get<std::string>());
    d.k = j.at("k").get<int>();
    d.k0 = j.at("k0").get<int>();
    d.k1 = j.at("k1").get<int>();
    d.spec_hash = j.at("spec_hash").get<std::uint64_t>();
    d.seed = j.at("seed").get<std::uint64_t>();
    d.stream = j.value("stream", std::uint64_t{0});
    if (j.contains("y")) d.y = read_array(j["y"]);
    if (j.contains("coeffs")) d.coeffs = ladder_from(j["coeffs"]);
    if (j.contains("variances")) d.variances = read_array(j["variances"]);
    if (j.contains("dv")) d.dv = read_array(j["dv"]);
    if (j.contains("dy")) d.dy = read_array(j["dy"]);
    if (j.contains("z")) d.z = read_array(j["z"]);
    return d;
  });
}

std::string sweep_csv(const SweepReport& s) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n,m,m0,m1,zeta0,zeta1,bound,kl_total,tv_surrogate,auc,auc_lo,auc_hi,slope_partial\n";
  const auto cell = [&os](double x) {
    if (std::isfinite(x)) os << x;
  };
  for (const auto& r : s.rows) {
    os << r.n << ',';
    for (double x : {r.m, r.m0, r.m1, r.zeta0, r.zeta1, r.bound, r.kl_total, r.tv_surrogate, r.auc.auc,
                     r.auc.lo, r.auc.hi}) {
      cell(x);
      os << ',';
    }
    cell(r.slope_partial);
    os << '\n';
  }
  return os.str();
}

}  // namespace eqlab
