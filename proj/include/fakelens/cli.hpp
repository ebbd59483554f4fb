#pragma once

// The `fakelens` command line. run_cli is the whole program; main() only
// forwards argv and the standard streams.
//
// Exit codes: 0 success, 1 verification failure or internal inconsistency,
// 2 usage error, 3 enumeration budget exceeded.

#include <gmpxx.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fakelens/best_polynomials.hpp"
#include "fakelens/errors.hpp"
#include "fakelens/expression.hpp"
#include "fakelens/structure_set.hpp"
#include "fakelens/tables.hpp"
#include "fakelens/valuation.hpp"
#include "fakelens/verify.hpp"
#include "json.hpp"

namespace fakelens {

inline constexpr int kCliSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitBudget = 3 };

namespace cli_detail {

using nlohmann::json;

struct Output {
  bool as_json = false;
  std::ostringstream text;
  json doc;
};

inline json header(const char* command) {
  json doc;
  doc["schema_version"] = kCliSchemaVersion;
  doc["command"] = command;
  return doc;
}

template <typename T>
std::string bracketed(const std::vector<T>& items) {
  std::ostringstream s;
  s << '[';
  for (std::size_t i = 0; i < items.size(); ++i) s << (i ? ", " : "") << items[i];
  s << ']';
  return s.str();
}

inline void structure_set_command(unsigned d, int level, Output& o) {
  if (d < 3) throw std::invalid_argument("--d must be at least 3");
  detail::check_level(level);
  json doc = header("structure-set");
  const mpz_class n = mpz_class(1) << level;
  doc["d"] = d;
  doc["K"] = level;
  doc["N"] = integer_json(n);
  doc["free_rank"] = integer_json(free_rank(d, level));
  o.text << "d " << d << "\nK " << level << "\nN " << n << "\nfree_rank " << free_rank(d, level) << '\n';
  if (d < 5) {
    doc["torsion"] = "unsupported";
    o.text << "torsion unsupported (d < 5)\n";
  } else {
    const StructureSetDescriptor s = structure_set(d, level);
    json torsion = json::array();
    std::vector<std::string> labels, orders;
    for (const auto& t : s.torsion) {
      torsion.push_back({{"label", t.label}, {"order", integer_json(t.order())}});
      labels.push_back(t.label);
      orders.push_back(t.order().get_str());
    }
    doc["torsion"] = torsion;
    o.text << "torsion " << bracketed(orders) << "\nlabels " << bracketed(labels) << '\n';
  }
  const std::string prov = basis_provenance(d);
  doc["basis_provenance"] = prov;
  o.text << "basis_provenance " << prov << '\n';
  o.doc = doc;
}

inline void tables_command(unsigned max_n, const std::string& sign, Output& o) {
  const SignSelection sel = sign == "-" ? SignSelection::kMinus : sign == "+" ? SignSelection::kPlus : SignSelection::kBoth;
  json doc = tables_document(max_n, sel);
  doc["command"] = "tables";
  doc["sha256"] = sha256_hex(tables_document(max_n, sel).dump());
  o.text << "schema_version " << kTablesSchemaVersion << "\nmax_n " << max_n << "\ncoefficient_order ascending\n";
  for (const auto& e : doc["p"]) o.text << "p_" << e["k"].get<unsigned>() << ' ' << e["coefficients"].dump() << '\n';
  for (const auto& e : doc["q"]) o.text << "q_" << e["n"].get<unsigned>() << ' ' << e["coefficients"].dump() << '\n';
  if (doc.contains("r_minus"))
    for (const auto& e : doc["r_minus"])
      o.text << "r-_" << e["n"].get<unsigned>() << ' ' << e["coefficients"].dump() << " bits "
             << e["chosen_bits"].dump() << '\n';
  if (doc.contains("r_plus"))
    for (const auto& e : doc["r_plus"])
      o.text << "r+_" << e["n"].get<unsigned>() << ' ' << e["coefficients"].dump() << '\n';
  for (const auto& e : doc["b_scalings"])
    o.text << "b_K" << e["K"].get<int>() << ' ' << e["exponents"].dump() << '\n';
  o.text << "sha256 " << doc["sha256"].get<std::string>() << '\n';
  o.doc = doc;
}

inline void wl_command(const std::string& expr, int l, std::optional<int> level_opt, Output& o) {
  const int level = level_opt.value_or(l + 1);
  detail::check_level(level);
  if (l < 0 || l >= level) throw std::invalid_argument("--l must satisfy 0 <= l < K");
  const RingElement g = parse_expression(expr, level);
  const Valuation w = w_l(g, l);
  json doc = header("wl");
  doc["expr"] = expr;
  doc["K"] = level;
  doc["l"] = l;
  doc["element"] = g.to_string();
  const std::string value = w.is_infinite() ? "inf" : w.value().get_str();
  doc["value"] = value;
  doc["normal_form"] = w.to_string();
  o.text << "expr " << expr << "\nK " << level << "\nl " << l << "\nelement " << g.to_string() << "\nw_l " << value
         << "\nnormal_form " << w.to_string() << '\n';
  o.doc = doc;
}

inline int verify_command(const std::string& suite, const VerifyOptions& opt, Output& o, std::ostream& err) {
  const SuiteReport rep = run_suite(suite, opt);
  json doc = header("verify");
  doc["suite"] = suite;
  doc["budget"] = opt.budget;
  doc["seed"] = opt.seed;
  json checks = json::array();
  std::uint64_t skipped = 0;
  for (const auto& r : rep.results) {
    checks.push_back({{"name", r.name}, {"passed", r.passed}, {"checks", r.checks}, {"skipped", r.skipped},
                      {"detail", r.detail}});
    o.text << (r.passed ? "PASS " : "FAIL ") << r.name << " checks=" << r.checks << " skipped=" << r.skipped;
    if (!r.passed) o.text << " first_failure=\"" << r.detail << '"';
    o.text << '\n';
    skipped += r.skipped;
  }
  doc["checks"] = checks;
  doc["passed"] = rep.passed();
  o.text << (rep.passed() ? "PASS" : "FAIL") << ' ' << suite << '\n';
  o.doc = doc;
  if (!rep.passed()) return kExitVerifyFailed;
  if (skipped > 0) {
    err << "error[budget]: " << skipped << " case(s) skipped because they exceed the budget of " << opt.budget << '\n';
    return kExitBudget;
  }
  return kExitOk;
}

inline void best_poly_command(unsigned n, const std::string& sign, Output& o) {
  const RMinusRecord& rec = r_minus(n);
  const IntPolynomial& p = sign == "-" ? rec.polynomial : r_plus(n);
  json doc = header("best-poly");
  doc["n"] = n;
  doc["sign"] = sign;
  doc["polynomial"] = p.to_string();
  doc["coefficients"] = polynomial_json(p);
  json bits = json::object();
  std::ostringstream bit_text;
  bit_text << '{';
  for (std::size_t l = 0; l < rec.chosen_bits.size(); ++l) {
    bits[std::to_string(l)] = rec.chosen_bits[l];
    bit_text << (l ? ", " : "") << l << ':' << rec.chosen_bits[l];
  }
  bit_text << '}';
  doc["chosen_bits"] = bits;
  o.text << 'r' << sign << '_' << n << " = " << p.to_string() << "\ncoefficients " << polynomial_json(p).dump()
         << "\nchosen_bits " << bit_text.str() << '\n';
  if (sign == "+") {
    doc["derived_from"] = "r-_" + std::to_string(n);
    o.text << "derived_from r-_" << n << '\n';
  }
  o.doc = doc;
}

}  // namespace cli_detail

/// Runs the command line. Output goes to `out` (or the --out file), errors
/// to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact algebra for fake lens spaces with fundamental group of order 2^K"};
  app.name("fakelens");
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "text";
  std::string out_path;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--out", out_path, "Write the report to this file instead of standard output");

  unsigned d = 0;
  int level = 0;
  auto* ss = app.add_subcommand("structure-set", "Free rank and torsion invariants of the structure set");
  ss->add_option("--d", d, "d, the manifold has dimension 2d-1")->required();
  ss->add_option("--K", level, "K, with N = 2^K")->required();

  unsigned max_n = 0;
  std::string table_sign = "both";
  auto* tb = app.add_subcommand("tables", "Emit the p/q/r polynomial tables and B scalings");
  tb->add_option("--max-n", max_n, "Largest index")->required();
  tb->add_option("--sign", table_sign, "Restrict to r^- or r^+")->check(CLI::IsMember({"+", "-"}));

  std::string expr;
  int l = 0;
  std::optional<int> wl_level;
  auto* wl = app.add_subcommand("wl", "Evaluate w_l of an expression in chi, f, fk(k), fpk(k)");
  wl->add_option("--expr", expr, "Expression")->required();
  wl->add_option("--l", l, "Level l of the projection")->required();
  wl->add_option("--K", wl_level, "Ring level K (default l + 1)");

  std::string suite = "all";
  VerifyOptions vopt;
  auto* vf = app.add_subcommand("verify", "Run a verification suite");
  vf->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suite_names()));
  vf->add_option("--budget", vopt.budget, "Enumeration budget (points)")->envname("FAKELENS_BUDGET");
  vf->add_option("--seed", vopt.seed, "Seed for the randomized properties");

  unsigned bp_n = 0;
  std::string bp_sign;
  auto* bp = app.add_subcommand("best-poly", "Print r^-_n or r^+_n");
  bp->add_option("--n", bp_n, "Index n")->required();
  bp->add_option("--sign", bp_sign, "- or +")->required()->check(CLI::IsMember({"+", "-"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  cli_detail::Output o;
  o.as_json = format == "json";
  int code = kExitOk;
  try {
    if (*ss) cli_detail::structure_set_command(d, level, o);
    if (*tb) cli_detail::tables_command(max_n, table_sign, o);
    if (*wl) cli_detail::wl_command(expr, l, wl_level, o);
    if (*vf) code = cli_detail::verify_command(suite, vopt, o, err);
    if (*bp) cli_detail::best_poly_command(bp_n, bp_sign, o);
  } catch (const BudgetExceeded& e) {
    err << "error[budget]: " << e.what() << '\n';
    return kExitBudget;
  } catch (const InconsistencyError& e) {
    err << "error[inconsistency]: " << e.what() << '\n';
    return kExitVerifyFailed;
  } catch (const std::invalid_argument& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NotInvertible& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return kExitVerifyFailed;
  }

  const std::string body = o.as_json ? o.doc.dump(2) + "\n" : o.text.str();
  if (out_path.empty()) {
    out << body;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!(file << body)) {
      err << "error[usage]: cannot write " << out_path << '\n';
      return kExitUsage;
    }
  }
  return code;
}

}  // namespace fakelens
