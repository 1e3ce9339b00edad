// hgr: command-line front end. JSON reports go to stdout, messages to stderr.
//
// Exit codes: 0 success, 2 parse or usage error, 3 domain error,
// 4 construct requested on marginals whose bound is not attained.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hgr/distributions.hpp"
#include "hgr/gaussian.hpp"
#include "hgr/hgr_oracle.hpp"
#include "hgr/io.hpp"
#include "hgr/lowerbound.hpp"
#include "hgr/tightness.hpp"

namespace {

using nlohmann::json;
using namespace hgr;

constexpr const char* kToolName = "hgr";
constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitParse = 2;
constexpr int kExitDomain = 3;
constexpr int kExitNotTight = 4;

struct Inputs {
  std::string joint;
  std::string data;
  std::string marginals;
  std::string generic;
  std::string moments;
  std::optional<int> m;
};

class Report {
 public:
  explicit Report(std::string command) {
    doc_["schema"] = 1;
    doc_["tool"] = kToolName;
    doc_["version"] = kToolVersion;
    doc_["command"] = std::move(command);
    doc_["args"] = json::object();
    doc_["results"] = json::object();
    doc_["warnings"] = json::array();
  }

  json& args() { return doc_["args"]; }
  json& results() { return doc_["results"]; }
  void digest(const std::string& bytes) { doc_["input_digest"] = io::content_digest(bytes); }
  void warn(const std::vector<std::string>& ws) {
    for (const auto& w : ws) doc_["warnings"].push_back(w);
  }
  void emit() const { std::cout << io::dump_json(doc_) << "\n"; }

 private:
  json doc_;
};

// Marginals plus (when available) a member joint of their class.
struct Loaded {
  PairwiseMarginalSet marginals;
  std::optional<DiscreteJoint> joint;
};

Loaded load_discrete(const Inputs& in, Report& report) {
  if (!in.joint.empty()) {
    const std::string text = io::read_file(in.joint);
    report.digest(text);
    report.args()["joint"] = in.joint;
    DiscreteJoint j = io::parse_joint_csv(text, in.m);
    return {pairwise_from_joint(j), std::move(j)};
  }
  if (!in.data.empty()) {
    const std::string text = io::read_file(in.data);
    report.digest(text);
    report.args()["data"] = in.data;
    const Dataset d = io::parse_dataset_csv(text, in.m);
    std::optional<DiscreteJoint> j;
    if (d.spec().within_atom_cap()) j = empirical_joint(d);
    return {pairwise_from_dataset(d), std::move(j)};
  }
  const std::string text = io::read_file(in.marginals);
  report.digest(text);
  report.args()["marginals"] = in.marginals;
  return {io::parse_marginals_json(text), std::nullopt};
}

void add_discrete_inputs(CLI::App* cmd, Inputs& in) {
  auto* g = cmd->add_option_group("input", "exactly one input source");
  g->add_option("--joint", in.joint, "joint CSV (x1,...,xp,y,prob)");
  g->add_option("--data", in.data, "dataset CSV (x1,...,xp,y)");
  g->add_option("--marginals", in.marginals, "pairwise marginals JSON");
  g->require_option(1);
  cmd->add_option("--m", in.m, "alphabet size per X variable (default: inferred from labels)");
}

int run_oracle(const Inputs& in) {
  Report report("oracle");
  json& r = report.results();
  if (!in.generic.empty()) {
    const std::string text = io::read_file(in.generic);
    report.digest(text);
    report.args()["generic"] = in.generic;
    const GenericJoint j = io::parse_generic_csv(text);
    const HgrResult h = hgr_svd(j);
    r["rho"] = h.rho;
    r["f_star"] = io::to_json(h.f_star);
    r["g_star"] = io::to_json(h.g_star);
    r["degenerate"] = h.degenerate;
    r["method"] = "svd";
    report.warn(h.warnings);
  } else {
    const std::string text = io::read_file(in.joint);
    report.digest(text);
    report.args()["joint"] = in.joint;
    const DiscreteJoint j = io::parse_joint_csv(text, in.m);
    const double binary = hgr_binary(j);
    const HgrResult h = hgr_svd(flatten(j));
    r["rho"] = h.rho;
    r["rho_correlation_ratio"] = binary;
    r["method_delta"] = std::abs(h.rho - binary);
    r["f_star"] = io::to_json(h.f_star);
    r["g_star"] = io::to_json(h.g_star);
    r["degenerate"] = h.degenerate;
    r["method"] = "svd";
    report.warn(h.warnings);
  }
  report.emit();
  return 0;
}

int run_lower_bound(const Inputs& in) {
  Report report("lower-bound");
  const Loaded loaded = load_discrete(in, report);
  const QdSystem s = assemble_qd(loaded.marginals);
  if (!(s.p_y1 > 0 && s.p_y1 < 1)) throw Error(Errc::DegenerateY, "P(Y=1) must lie strictly between 0 and 1");
  const LowerBoundResult closed = lower_bound(s);
  const LowerBoundResult iterative = gamma_lb_iterative(s);
  json& r = report.results();
  r["p"] = s.spec.p();
  r["m"] = s.spec.m();
  r["p_y1"] = s.p_y1;
  r["gamma_lb"] = closed.gamma_lb;
  r["gamma_lb_closed"] = closed.gamma_lb;
  r["gamma_lb_iterative"] = iterative.gamma_lb;
  r["gamma_delta"] = std::abs(closed.gamma_lb - iterative.gamma_lb);
  r["rho_lb"] = closed.rho_lb;
  r["z_star"] = io::to_json(closed.z_star);
  report.warn(closed.warnings);
  report.warn(iterative.warnings);
  report.emit();
  return 0;
}

json certificate_json(const TightnessCertificate& c) {
  json r;
  r["verdict"] = c.tight() ? "Tight" : "NotTight";
  r["z_star"] = io::to_json(c.z_star);
  r["h_pos"] = c.h_pos;
  r["h_neg"] = c.h_neg;
  r["lp_value"] = c.lp_value;
  r["gamma_lb"] = c.gamma_lb;
  r["tol"] = c.tol;
  return r;
}

int run_check_tight(const Inputs& in, double tol) {
  Report report("check-tight");
  report.args()["tol"] = tol;
  const Loaded loaded = load_discrete(in, report);
  const QdSystem s = assemble_qd(loaded.marginals);
  report.results() = certificate_json(check_tightness(s, tol));
  report.emit();
  return 0;
}

int run_construct(const Inputs& in, const std::string& out_path, double tol) {
  Report report("construct");
  report.args()["tol"] = tol;
  report.args()["out"] = out_path;
  const Loaded loaded = load_discrete(in, report);
  const QdSystem s = assemble_qd(loaded.marginals);
  const TightnessCertificate cert = check_tightness(s, tol);
  report.results() = certificate_json(cert);
  if (!cert.tight()) {
    report.emit();
    std::cerr << "hgr construct: the lower bound is not attained for these marginals (lp_value "
              << cert.lp_value << " > 1/2)\n";
    return kExitNotTight;
  }

  std::optional<DiscreteJoint> base = loaded.joint;
  if (!base) base = find_member(loaded.marginals);
  if (!base) throw Error(Errc::EmptyClass, "no joint distribution has these pairwise marginals");

  const DiscreteJoint p_star = construct_additive(cert.z_star, *base, s, tol);
  const PairwiseMarginalSet got = pairwise_from_joint(p_star);
  const double match = std::max((got.xx - loaded.marginals.xx).cwiseAbs().maxCoeff(),
                                (got.xy - loaded.marginals.xy).cwiseAbs().maxCoeff());
  const AdditiveDecomposition add = is_additive(p_star, tol);
  const double rho_star = hgr_svd(flatten(p_star)).rho;
  const double lb = rho_lb(s);

  json& r = report.results();
  r["marginal_match_max_error"] = match;
  r["additivity_residual"] = add.residual;
  r["hgr_p_star"] = rho_star;
  r["rho_lb"] = lb;
  r["hgr_minus_rho_lb"] = rho_star - lb;

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write '" + out_path + "'");
  out << io::format_joint_csv(p_star);
  report.emit();
  return 0;
}

int run_gaussian(const Inputs& in) {
  Report report("gaussian");
  const std::string text = io::read_file(in.moments);
  report.digest(text);
  report.args()["moments"] = in.moments;
  const GaussianMoments g = io::parse_moments_json(text);
  json& r = report.results();
  r["p"] = g.p();
  r["a"] = io::to_json(regression_vector(g));
  r["min_hgr"] = min_hgr_gaussian(g);
  report.emit();
  return 0;
}

int run_probe(int p, int m, double eps, int trials, std::uint64_t seed) {
  Report report("probe-uniform");
  report.args()["p"] = p;
  report.args()["m"] = m;
  report.args()["eps"] = eps;
  report.args()["trials"] = trials;
  report.args()["seed"] = seed;
  report.results()["tight_fraction"] = near_uniform_probe(AlphabetSpec(p, m), eps, trials, seed);
  report.emit();
  return 0;
}

int exit_code_for(Errc code) { return code == Errc::ParseError ? kExitParse : kExitDomain; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-HGR-correlation toolkit: separable lower bound, tightness test and exact oracles"};
  app.require_subcommand(1);

  Inputs in;
  double tol = kTightTol;
  std::string out_path;
  int probe_p = 2, probe_m = 2, probe_trials = 100;
  double probe_eps = 0.01;
  std::uint64_t probe_seed = 1;

  auto* oracle = app.add_subcommand("oracle", "exact HGR maximal correlation of a joint");
  {
    auto* g = oracle->add_option_group("input", "exactly one input source");
    g->add_option("--joint", in.joint, "joint CSV (x1,...,xp,y,prob)");
    g->add_option("--generic", in.generic, "generic joint CSV (x,y,prob)");
    g->require_option(1);
    oracle->add_option("--m", in.m, "alphabet size per X variable");
  }
  auto* lower = app.add_subcommand("lower-bound", "separable lower bound from pairwise marginals");
  add_discrete_inputs(lower, in);
  auto* check = app.add_subcommand("check-tight", "decide whether the lower bound is attained");
  add_discrete_inputs(check, in);
  check->add_option("--tol", tol, "tolerance on h(z) <= 1/2")->capture_default_str();
  auto* construct = app.add_subcommand("construct", "write the additive joint attaining the bound");
  add_discrete_inputs(construct, in);
  construct->add_option("--out", out_path, "output joint CSV")->required();
  construct->add_option("--tol", tol, "tolerance on h(z) <= 1/2")->capture_default_str();
  auto* gaussian = app.add_subcommand("gaussian", "minimum HGR for given first and second moments");
  gaussian->add_option("--moments", in.moments, "moments JSON")->required();
  auto* probe = app.add_subcommand("probe-uniform", "tight fraction near the uniform joint");
  probe->add_option("--p", probe_p)->capture_default_str();
  probe->add_option("--m", probe_m)->capture_default_str();
  probe->add_option("--eps", probe_eps)->capture_default_str();
  probe->add_option("--trials", probe_trials)->capture_default_str();
  probe->add_option("--seed", probe_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*oracle) return run_oracle(in);
    if (*lower) return run_lower_bound(in);
    if (*check) return run_check_tight(in, tol);
    if (*construct) return run_construct(in, out_path, tol);
    if (*gaussian) return run_gaussian(in);
    if (*probe) return run_probe(probe_p, probe_m, probe_eps, probe_trials, probe_seed);
  } catch (const Error& e) {
    std::cerr << "hgr: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "hgr: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitParse;
}
