#pragma once

// Command-line front end. `run` is kept separate from main so tests can drive it
// in-process.

#include <closedsum/closedsum.hpp>
#include <closedsum/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace closedsum::cli {

using io::json;

enum ExitCode { kOk = 0, kPrecondition = 2, kInput = 3 };

struct Options {
  std::string out;
  std::uint64_t seed = 0;
  bool verbose = false;
  Tolerances tol;

  std::string a, b, system, graph, operators, spec;
  std::string f1 = "[1]", f2 = "[1]", f3 = "[0]", f4 = "[0]";
  std::string alpha;
  bool cycle = false;
  bool complete = false;
  std::string mode;
  double eps = 0.5;
  Index m = 1;
  double p = 2.0;
  Index depth = 4;
  std::string family;
  Index n = 3;
  Index horizon = 50;
  std::string subset = "all";
  double rate = 1.0;
  int phases = 64;
  int restarts = 16;
};

namespace detail {

inline json entries_summary(const MarginReport& r) { return io::report_to_json(r); }

inline std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  const json j = io::parse_json_text(text, what);
  if (!j.is_array()) throw io::InputError(what + " must be a JSON list");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw io::InputError(what + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::vector<Index> parse_subset(const std::string& text, Index n) {
  if (text == "all") return all_members(n);
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<Index>(std::stoll(item)) - 1);
    } catch (const std::exception&) {
      throw io::InputError("subset must be 'all' or a comma separated list of 1-based indices");
    }
  }
  return out;
}

inline FunctionQuadruple parse_functions(const Options& o) {
  auto poly = [](const std::string& text, const std::string& name) {
    return ScalarFunction::polynomial(io::coefficients_from_json(io::parse_json_text(text, name)));
  };
  return {poly(o.f1, "f1"), poly(o.f2, "f2"), poly(o.f3, "f3"), poly(o.f4, "f4")};
}

inline CMatrix parse_alpha(const Options& o, Index n) {
  if (o.cycle) return cycle_alpha(n);
  if (o.alpha.empty()) return identity(n);
  return io::matrix_from_rows(io::parse_json_text(o.alpha, "alpha"));
}

inline json spectrum_json(std::vector<cplx> spec) {
  std::sort(spec.begin(), spec.end(), [](cplx x, cplx y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  json out = json::array();
  for (const auto& z : spec) out.push_back(io::complex_to_json(z));
  return out;
}

struct FamilyRequest {
  std::string family;
  FamilyParams params;
  Index n = 3;
  Index horizon = 50;
};

inline FamilyRequest family_request(const Options& o) {
  FamilyRequest r{o.family, {{"rate", o.rate}}, o.n, o.horizon};
  if (!o.spec.empty()) {
    const json j = io::read_json_file(o.spec);
    if (!j.is_object() || !j.contains("family")) throw io::InputError(o.spec + ": family spec needs a family name");
    r.family = j["family"].get<std::string>();
    r.params.clear();
    const json params = j.value("params", json::object());
    if (!params.is_object()) throw io::InputError(o.spec + ": params must be an object");
    for (const auto& [k, v] : params.items()) {
      if (!v.is_number()) throw io::InputError(o.spec + ": param " + k + " must be a number");
      r.params[k] = v.get<double>();
    }
    r.n = j.value("n", o.n);
    r.horizon = j.value("horizon", o.horizon);
  }
  if (r.family.empty()) throw io::InputError("a family name is required (--family or --spec)");
  return r;
}

inline json pair_command(const Options& o) {
  const Subspace h1 = io::subspace_from_json(io::read_json_file(o.a), o.tol);
  const Subspace h2 = io::subspace_from_json(io::read_json_file(o.b), o.tol);
  const PairDecomposition dec = halmos_decompose(h1, h2, o.tol);
  json a = json::array();
  for (Index i = 0; i < dec.generic_dim(); ++i) a.push_back(dec.a(i));
  return json{{"friedrichs_angle", friedrichs_angle(h1, h2, o.tol)},
              {"decomposition",
               {{"dim_intersection", dec.both.dim()},
                {"dim_first_only", dec.first_only.dim()},
                {"dim_second_only", dec.second_only.dim()},
                {"dim_neither", dec.neither.dim()},
                {"dim_generic", dec.generic_dim()},
                {"a", a}}},
              {"criteria", io::report_to_json(pair_criteria(h1, h2, o.tol))},
              {"independence", io::report_to_json(independent_pair_constants(h1, h2, o.tol))}};
}

inline json calculus_command(const Options& o) {
  const Subspace h1 = io::subspace_from_json(io::read_json_file(o.a), o.tol);
  const Subspace h2 = io::subspace_from_json(io::read_json_file(o.b), o.tol);
  const PairDecomposition dec = halmos_decompose(h1, h2, o.tol);
  const FunctionQuadruple f = parse_functions(o);
  return json{{"spectrum", spectrum_json(spectrum_of_b(dec, f))},
              {"criteria", io::report_to_json(calculus_criteria(dec, f, o.tol))}};
}

inline json system_command(const Options& o) {
  const SubspaceSystem s = io::system_from_json(io::read_json_file(o.system), o.tol);
  const IndependenceCertificate ind = independence_certificate(s, o.tol);
  json out{{"sum_gap", io::report_to_json(sum_gap(s, o.tol))},
           {"dilation_residual", dilation_relation_residual(s, o.tol)},
           {"independence", {{"epsilon", io::real_to_json(ind.epsilon)}, {"independent", ind.independent}}}};
  if (!o.alpha.empty()) {
    out["linear_combination"] = io::report_to_json(linear_combination_check(s, parse_reals(o.alpha, "alpha"), o.tol));
  }
  return out;
}

inline json graph_command(const Options& o) {
  const SubspaceSystem s = io::system_from_json(io::read_json_file(o.system), o.tol);
  const WeightedGraph g = o.complete || o.graph.empty() ? WeightedGraph::complete(s.size())
                                                        : io::graph_from_json(io::read_json_file(o.graph));
  const PhaseSearch search{o.phases, o.restarts, o.seed};
  return json{{"graph", io::report_to_json(complement_graph_margin(s, g, o.tol, search))}};
}

inline json reduce_command(const Options& o) {
  const SubspaceSystem s = io::system_from_json(io::read_json_file(o.system), o.tol);
  const std::string mode = o.mode.empty() ? "preserving" : o.mode;
  if (mode == "pair") {
    if (s.size() < 2) throw Error(ErrorKind::InvalidArgument, "pair mode needs two members");
    const PairReduction pr = reduce_pair(s[0], s[1], o.eps, o.tol);
    return json{{"m2", io::subspace_to_json(pr.m2)}, {"delta", pr.delta}, {"report", io::report_to_json(pr.report)}};
  }
  if (mode == "rps") return json{{"rps", io::report_to_json(rps_margin(s, o.m, o.tol))}};
  if (mode == "independence") {
    const IndependenceCertificate c = independence_certificate(s, o.tol);
    return json{{"epsilon", io::real_to_json(c.epsilon)}, {"independent", c.independent}};
  }
  ReductionResult res = [&] {
    if (mode == "system") return reduce_system(s, o.tol);
    if (mode == "preserving") return reduce_preserving_sum(s, o.tol);
    throw Error(ErrorKind::InvalidArgument, "unknown reduce mode '" + mode + "'");
  }();
  return json{{"reduced", io::system_to_json(res.reduced)},
              {"epsilon", io::real_to_json(res.epsilon)},
              {"c_n", res.c_n.str()},
              {"weights", io::reals_to_json(res.weights)},
              {"sum_preserved", res.sum_preserved},
              {"numerically_vacuous", res.numerically_vacuous},
              {"certificate", io::report_to_json(res.certificate)}};
}

inline json images_command(const Options& o) {
  const std::string mode = o.mode.empty() ? "sum" : o.mode;
  if (mode == "quadratic" || mode == "ibap") {
    const SubspaceSystem s = io::system_from_json(io::read_json_file(o.system), o.tol);
    if (mode == "quadratic") {
      const QuadraticCriterion q = quadratic_projector_criterion(s, parse_alpha(o, s.size()), o.tol);
      json beta = json::array();
      for (Index i = 0; i < q.beta.beta.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < q.beta.beta.cols(); ++j) row.push_back(q.beta.beta(i, j));
        beta.push_back(row);
      }
      json kernel = json::array();
      for (Index i = 0; i < q.beta.kernel.size(); ++i) kernel.push_back(q.beta.kernel(i));
      return json{{"beta", beta},
                  {"classification", to_string(q.beta.classification)},
                  {"graph_connected", q.beta.graph_connected},
                  {"kernel", kernel},
                  {"report", io::report_to_json(q.report)}};
    }
    const OperatorFamily a = io::operators_from_json(io::read_json_file(o.operators), o.tol);
    return json{{"ibap", io::report_to_json(ibap_check(s, a, o.tol))}};
  }
  const OperatorFamily f = io::operators_from_json(io::read_json_file(o.operators), o.tol);
  if (mode == "sum") {
    const SumOfImages s = sum_of_images(f, o.tol);
    return json{{"image", io::subspace_to_json(s.image)}, {"report", io::report_to_json(s.report)}};
  }
  if (mode == "douglas") {
    if (f.size() != 2) throw Error(ErrorKind::InvalidArgument, "douglas mode takes exactly two matrices A, B");
    const DouglasFactor df = douglas_factor(f[0], f[1], o.tol);
    return json{{"c", io::matrix_to_rows(df.c)},
                {"lambda", df.lambda},
                {"residual", df.residual},
                {"inclusion_defect", df.inclusion_defect}};
  }
  if (mode == "product") {
    return json{{"constant", product_bound_constant(f.size(), [&] {
                   double w = 0.0;
                   for (const auto& m : f.members()) w = std::max(w, op_norm(m));
                   return w;
                 }())},
                {"worst_slack", product_bound_worst(f, o.tol)}};
  }
  if (mode == "p-radius") {
    const PRadiusResult pr = p_radius(f, o.p, o.depth, o.tol);
    return json{{"a", io::reals_to_json(pr.a)},
                {"roots", io::reals_to_json(pr.roots)},
                {"status", to_string(pr.status)},
                {"certified_depth", pr.certified_depth},
                {"common_kernel_dim", pr.common_kernel_dim}};
  }
  if (mode == "m-identity") return json{{"residual", m_membership_identity(f, o.tol)}};
  throw Error(ErrorKind::InvalidArgument, "unknown images mode '" + mode + "'");
}

inline json blocks_command(const Options& o) {
  const FamilyRequest fr = family_request(o);
  const BlockSystem bs = named_families(fr.family, fr.params, fr.n);
  const ClosednessVerdict v = certify(bs, parse_subset(o.subset, bs.members()), fr.horizon, o.tol);
  return json{{"status", to_string(v.status)},
              {"inf_gap", io::real_to_json(v.inf_gap)},
              {"last_gap", io::real_to_json(v.gaps.back())},
              {"trend", {{"slope", v.slope}, {"intercept", v.intercept}, {"fit_residual", v.fit_residual},
                         {"decreasing", v.decreasing}}},
              {"gaps", io::reals_to_json(v.gaps)}};
}

inline json sum_as_two_command(const Options& o) {
  const FamilyRequest fr = family_request(o);
  const BlockSystem bs = named_families(fr.family, fr.params, fr.n);
  const SumAsTwo st = sum_as_two(bs, fr.horizon, o.tol);
  json blocks = json::array();
  for (std::size_t k = 0; k < st.blocks.size(); ++k) {
    const auto& b = st.blocks[k];
    blocks.push_back(json{{"k", k + 1},
                          {"epsilon", b.epsilon},
                          {"dim_m1", b.m1.dim()},
                          {"dim_m2", b.m2.dim()},
                          {"dim_sum", b.target.dim()}});
  }
  return json{{"blocks", blocks}, {"report", io::report_to_json(st.report)}};
}

inline void verbose_summary(const json& result, std::ostream& err, const std::string& prefix = "") {
  for (const auto& [key, value] : result.items()) {
    if (value.is_object() && value.contains("entries")) {
      for (const auto& e : value["entries"]) {
        err << prefix << key << "." << e["id"].get<std::string>() << " = " << e["margin"].dump() << " ("
            << e["verdict"].get<std::string>() << (e["estimate"].get<bool>() ? ", estimate" : "") << ")\n";
      }
    } else if (value.is_number() || value.is_string() || value.is_boolean()) {
      err << prefix << key << " = " << value.dump() << "\n";
    }
  }
}

}  // namespace detail

/// Runs one CLI invocation. The JSON report goes to `out` (or --out); --verbose adds
/// a human summary on `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Closedness of sums of subspaces: margins, decompositions and reductions", "closedsum"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", o.out, "Write the JSON report to this path instead of stdout");
  app.add_option("--seed", o.seed, "Seed for sampled estimators");
  app.add_flag("--verbose", o.verbose, "Human-readable summary on stderr");
  app.add_option("--rank-tol", o.tol.rank_tol, "Relative singular value cutoff");
  app.add_option("--eig-tol", o.tol.eig_tol, "Eigen reconstruction tolerance");
  app.add_option("--margin-tol", o.tol.margin_tol, "Verdict threshold");

  auto* pair = app.add_subcommand("pair", "Canonical decomposition, angle and closedness criteria of a pair");
  pair->add_option("--a", o.a, "First subspace (JSON)")->required();
  pair->add_option("--b", o.b, "Second subspace (JSON)")->required();

  auto* calc = app.add_subcommand("calculus", "Spectrum and criteria of b built from f1..f4");
  calc->add_option("--a", o.a, "First subspace (JSON)")->required();
  calc->add_option("--b", o.b, "Second subspace (JSON)")->required();
  calc->add_option("--f1", o.f1, "Polynomial coefficients, ascending powers");
  calc->add_option("--f2", o.f2, "Polynomial coefficients, ascending powers");
  calc->add_option("--f3", o.f3, "Polynomial coefficients, ascending powers");
  calc->add_option("--f4", o.f4, "Polynomial coefficients, ascending powers");

  auto* system = app.add_subcommand("system", "Sum gap, dilation check and independence of an n-tuple");
  system->add_option("--system", o.system, "Subspace system (JSON)")->required();
  system->add_option("--alpha", o.alpha, "Positive weights for the linear-combination bound (JSON list)");

  auto* graph = app.add_subcommand("graph", "Complement certificates over a weighted graph");
  graph->add_option("--system", o.system, "Subspace system (JSON)")->required();
  graph->add_option("--graph", o.graph, "Graph (JSON); defaults to the complete unit graph");
  graph->add_flag("--complete", o.complete, "Use the complete unit-weight graph");
  graph->add_option("--phases", o.phases, "Phase samples per restart");
  graph->add_option("--restarts", o.restarts, "Restarts of the phase search");

  auto* reduce = app.add_subcommand("reduce", "Independence constants and reductions");
  reduce->add_option("--system", o.system, "Subspace system (JSON)")->required();
  reduce->add_option("--mode", o.mode, "preserving | system | pair | rps | independence");
  reduce->add_option("--eps", o.eps, "Pair lemma parameter in (0, 1)");
  reduce->add_option("--m", o.m, "Split index for rps (1-based)");

  auto* images = app.add_subcommand("images", "Operator range criteria");
  images->add_option("--mode", o.mode, "sum | douglas | product | p-radius | m-identity | quadratic | ibap");
  images->add_option("--operators", o.operators, "Operator family (JSON)");
  images->add_option("--system", o.system, "Subspace system (JSON)");
  images->add_option("--alpha", o.alpha, "alpha matrix as rows of [re, im] (JSON)");
  images->add_flag("--cycle", o.cycle, "Use the unit directed cycle alpha");
  images->add_option("--p", o.p, "Exponent for the p-radius");
  images->add_option("--depth", o.depth, "Product depth for the p-radius");

  auto* blocks = app.add_subcommand("blocks", "Horizon-relative closedness verdict for a block family");
  blocks->add_option("--family", o.family, "one_over_k | halmos_accumulating | compact_triple");
  blocks->add_option("--spec", o.spec, "Family spec (JSON)");
  blocks->add_option("--n", o.n, "Member count");
  blocks->add_option("--horizon", o.horizon, "Number of blocks");
  blocks->add_option("--subset", o.subset, "'all' or 1-based indices, comma separated");
  blocks->add_option("--rate", o.rate, "Decay exponent for halmos_accumulating");

  auto* two = app.add_subcommand("sum-as-two", "Write each block sum as a sum of two subspaces");
  two->add_option("--family", o.family, "one_over_k | halmos_accumulating | compact_triple");
  two->add_option("--spec", o.spec, "Family spec (JSON)");
  two->add_option("--n", o.n, "Member count");
  two->add_option("--horizon", o.horizon, "Number of blocks");
  two->add_option("--rate", o.rate, "Decay exponent for halmos_accumulating");

  std::vector<std::string> argv_store{"closedsum"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "closedsum: " << e.what() << "\n";
    return kInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json request{{"command", command}};
  for (const auto* opt : app.get_subcommands().front()->get_options()) {
    if (opt->count() > 0 && !opt->get_lnames().empty()) {
      const auto& res = opt->results();
      request[opt->get_lnames().front()] = res.size() == 1 ? json(res.front()) : json(res);
    }
  }

  json report{{"request", request},
              {"provenance", {{"version", kVersion}, {"tolerances", io::tolerances_to_json(o.tol)}, {"seed", o.seed}}}};
  int code = kOk;
  try {
    o.tol.validate();
    json result;
    if (command == "pair") result = detail::pair_command(o);
    else if (command == "calculus") result = detail::calculus_command(o);
    else if (command == "system") result = detail::system_command(o);
    else if (command == "graph") result = detail::graph_command(o);
    else if (command == "reduce") result = detail::reduce_command(o);
    else if (command == "images") result = detail::images_command(o);
    else if (command == "blocks") result = detail::blocks_command(o);
    else result = detail::sum_as_two_command(o);
    report["result"] = result;
    if (o.verbose) detail::verbose_summary(result, err);
  } catch (const Error& e) {
    report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    code = kPrecondition;
  } catch (const io::InputError& e) {
    report["error"] = {{"kind", "InputError"}, {"message", e.what()}};
    code = kInput;
  } catch (const json::exception& e) {
    report["error"] = {{"kind", "InputError"}, {"message", e.what()}};
    code = kInput;
  }
  if (code != kOk) err << "closedsum: " << report["error"]["message"].get<std::string>() << "\n";

  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream file(o.out);
    if (!file) {
      err << "closedsum: cannot write " << o.out << "\n";
      return kInput;
    }
    file << text;
  }
  return code;
}

}  // namespace closedsum::cli
