// tracial: command-line front end for tracial moment sequences.
//
//   tracial check     SEQ.json [-k K]
//   tracial extend    SEQ.json [-k K] --target-k T [-o OUT.json]
//   tracial represent SEQ.json [-k K] [-o OUT.json]
//   tracial theta2    POLY|FILE -k K [-n N] [-o OUT.json]
//   tracial witness   POLY|FILE -k K [-n N] [-o OUT.json]
//   tracial riesz     SEQ.json POLY|FILE
//
// Global flags: --tol, --seed, --max-iter, --format json|text.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tracial/error.hpp"
#include "tracial/flat.hpp"
#include "tracial/gns.hpp"
#include "tracial/io.hpp"
#include "tracial/moment.hpp"
#include "tracial/poly.hpp"
#include "tracial/theta2.hpp"

namespace {

using namespace tracial;

constexpr int kExitUsage = 64;

struct RunConfig {
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t max_iter = 5000;
  std::string format = "json";
};

struct Args {
  std::string input;
  std::string poly;
  std::string output;
  std::optional<std::size_t> k;
  std::size_t target_k = 0;
  std::optional<std::size_t> variables;
};

bool text_format(const RunConfig& cfg) { return cfg.format == "text"; }

void emit(const RunConfig& cfg, const Json& j, const std::string& text) {
  if (text_format(cfg))
    std::cout << text << "\n";
  else
    std::cout << dump(j);
}

std::size_t order_k(const TracialSequence& y, const Args& a) {
  const std::size_t k = a.k.value_or(y.order() / 2);
  if (k == 0 || 2 * k > y.order())
    throw InputError("-k must satisfy 1 <= k <= order/2 = " + std::to_string(y.order() / 2));
  return k;
}

std::string read_poly_text(const std::string& arg) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(arg, ec)) return arg;
  std::ifstream in(arg);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Number of variables: explicit -n, otherwise the largest variable index used.
Polynomial load_poly(const std::string& arg, std::optional<std::size_t> variables) {
  const std::string text = read_poly_text(arg);
  if (variables) return parse_poly(text, *variables);
  const Polynomial wide = parse_poly(text, 64);
  std::size_t n = 1;
  for (const auto& [w, c] : wide.terms())
    for (Word::Letter l : w.letters()) n = std::max<std::size_t>(n, l + 1u);
  return parse_poly(text, n);
}

int cmd_check(const RunConfig& cfg, const Args& a) {
  const TracialSequence y = read_sequence(a.input);
  const std::size_t k = order_k(y, a);
  const MomentMatrix mk = build_moment_matrix(y, k);
  const PsdReport psd = psd_check(mk.entries, cfg.tol);
  const std::size_t rank_k = numeric_rank(mk.entries, cfg.tol).rank;
  const std::size_t rank_prev = numeric_rank(build_moment_matrix(y, k - 1).entries, cfg.tol).rank;
  const bool flat = rank_k == rank_prev;

  Json j;
  j["k"] = k;
  j["psd"] = psd.is_psd;
  j["min_eigenvalue"] = psd.min_eigenvalue;
  j["max_eigenvalue"] = psd.max_eigenvalue;
  j["rank_prev"] = rank_prev;
  j["rank"] = rank_k;
  j["flat"] = flat;
  std::ostringstream text;
  text << "psd=" << (psd.is_psd ? "true" : "false") << " rank(M" << k - 1 << ")=" << rank_prev << " rank(M" << k
       << ")=" << rank_k << " flat=" << (flat ? "true" : "false") << " min_eig=" << psd.min_eigenvalue;
  emit(cfg, j, text.str());
  if (!psd.is_psd) return 3;
  return flat ? 0 : 2;
}

int cmd_extend(const RunConfig& cfg, const Args& a) {
  const TracialSequence y = read_sequence(a.input);
  const std::size_t k = order_k(y, a);
  if (a.target_k < k) throw InputError("--target-k must be at least k");
  const TracialSequence ext = extend_to_degree(y, k, a.target_k, cfg.tol);
  const Json seq = sequence_to_json(ext);
  if (a.output.empty()) {
    if (text_format(cfg)) {
      for (const auto& [w, v] : ext.values()) std::cout << render_word(w, ext.variables()) << " " << v << "\n";
    } else {
      std::cout << dump(seq);
    }
  } else {
    write_json_file(a.output, seq);
    Json j;
    j["output"] = a.output;
    j["order"] = ext.order();
    emit(cfg, j, "wrote order " + std::to_string(ext.order()) + " sequence to " + a.output);
  }
  return 0;
}

int report_representation(const RunConfig& cfg, const Args& a, const TracialRepresentation& rep, double residual) {
  Json j = representation_to_json(rep);
  j["residual"] = residual;
  if (!a.output.empty()) write_json_file(a.output, representation_to_json(rep));
  std::ostringstream text;
  text << "atoms=" << rep.atoms.size() << " total_size=" << rep.total_size() << " residual=" << residual;
  for (const Atom& at : rep.atoms) text << "\n  weight=" << at.weight << " size=" << at.size();
  emit(cfg, j, text.str());
  return residual <= cfg.tol ? 0 : 1;
}

int cmd_represent(const RunConfig& cfg, const Args& a) {
  const TracialSequence y = read_sequence(a.input);
  const std::size_t k = order_k(y, a);
  try {
    const TracialRepresentation rep = extract_representation(y, k, cfg.tol, cfg.seed);
    return report_representation(cfg, a, rep, verify_representation(y, rep));
  } catch (const RepresentationError& e) {
    std::cerr << "tracial: " << e.what() << "\n";
    report_representation(cfg, a, e.representation(), e.residual());
    return 1;
  }
}

int cmd_theta2(const RunConfig& cfg, const Args& a) {
  const Polynomial f = load_poly(a.poly, a.variables);
  const SolverOptions opts{cfg.tol, cfg.max_iter, cfg.seed};
  const Theta2Result result = theta2_feasibility(f, *a.k, opts);
  std::vector<Polynomial> squares;
  if (result.certificate) squares = extract_sohs(*result.certificate, cfg.tol);
  const Json cert = certificate_to_json(result, squares);
  if (!a.output.empty()) write_json_file(a.output, cert);
  std::ostringstream text;
  text << "verdict=" << to_string(result.verdict) << " affine_residual=" << result.affine_residual
       << " iterations=" << result.projection_iterations;
  for (const Polynomial& g : squares) text << "\n  square: " << render(g);
  if (result.witness) text << "\n  L_y(f)=" << result.witness->riesz_value;
  emit(cfg, cert, text.str());
  switch (result.verdict) {
    case Verdict::member:
      return 0;
    case Verdict::not_member:
      return 1;
    case Verdict::unknown:
      return 4;
  }
  return 4;
}

int cmd_witness(const RunConfig& cfg, const Args& a) {
  const Polynomial f = load_poly(a.poly, a.variables);
  const SolverOptions opts{cfg.tol, cfg.max_iter, cfg.seed};
  const auto w = dual_witness_search(f, *a.k, opts);
  Json j;
  j["found"] = w.has_value();
  if (w) {
    j["riesz"] = w->riesz_value;
    j["min_eigenvalue"] = w->min_eigenvalue;
    j["witness"] = sequence_to_json(w->y);
    if (!a.output.empty()) write_sequence(a.output, w->y);
  }
  std::ostringstream text;
  text << "found=" << (w ? "true" : "false");
  if (w) text << " L_y(f)=" << w->riesz_value << " min_eig=" << w->min_eigenvalue;
  emit(cfg, j, text.str());
  return w ? 0 : 1;
}

int cmd_riesz(const RunConfig& cfg, const Args& a) {
  const TracialSequence y = read_sequence(a.input);
  const Polynomial p = load_poly(a.poly, y.variables());
  const double value = riesz_eval(y, p);
  Json j;
  j["value"] = value;
  std::ostringstream text;
  text.precision(17);
  text << value;
  emit(cfg, j, text.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  Args args;
  CLI::App app{"Truncated tracial moment sequences: flatness, representations, trace-positivity certificates"};
  app.require_subcommand(1);
  app.add_option("--tol", cfg.tol, "Relative numerical tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--max-iter", cfg.max_iter, "Iteration budget")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  auto seq_cmd = [&](const char* name, const char* desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    sub->add_option("sequence", args.input, "Sequence JSON file")->required();
    sub->add_option("-k", args.k, "Moment matrix order");
    return sub;
  };
  auto poly_cmd = [&](const char* name, const char* desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->fallthrough();
    sub->add_option("poly", args.poly, "Polynomial text or a file containing it")->required();
    sub->add_option("-k", args.k, "Half degree bound")->required();
    sub->add_option("-n,--variables", args.variables, "Number of variables (default: inferred)");
    sub->add_option("-o,--output", args.output, "Write the result to this file");
    return sub;
  };

  CLI::App* check = seq_cmd("check", "PSD, ranks and flatness of M_k");
  CLI::App* extend = seq_cmd("extend", "Flat extension to a higher order");
  extend->add_option("--target-k", args.target_k, "Order to extend to")->required();
  extend->add_option("-o,--output", args.output, "Write the extended sequence to this file");
  CLI::App* represent = seq_cmd("represent", "Finite tracial moment representation");
  represent->add_option("-o,--output", args.output, "Write the representation to this file");
  CLI::App* theta2 = poly_cmd("theta2", "Membership in the cyclic sum-of-hermitian-squares cone");
  CLI::App* witness = poly_cmd("witness", "Search for a refuting tracial sequence");
  CLI::App* riesz = app.add_subcommand("riesz", "Evaluate the Riesz functional");
  riesz->fallthrough();
  riesz->add_option("sequence", args.input, "Sequence JSON file")->required();
  riesz->add_option("poly", args.poly, "Polynomial text or a file containing it")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*check) return cmd_check(cfg, args);
    if (*extend) return cmd_extend(cfg, args);
    if (*represent) return cmd_represent(cfg, args);
    if (*theta2) return cmd_theta2(cfg, args);
    if (*witness) return cmd_witness(cfg, args);
    if (*riesz) return cmd_riesz(cfg, args);
  } catch (const ParseError& e) {
    std::cerr << "tracial: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "tracial: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "tracial: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "tracial: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
