#pragma once

// Versioned p/q/r tables and B scalings as a JSON document, plus a SHA-256
// fingerprint of the canonical serialization.

#include <gmpxx.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fakelens/best_polynomials.hpp"
#include "json.hpp"

namespace fakelens {

inline constexpr int kTablesSchemaVersion = 1;

enum class SignSelection { kMinus, kPlus, kBoth };

/// A JSON number when the value fits in int64, its decimal string otherwise.
inline nlohmann::json integer_json(const mpz_class& v) {
  if (mpz_fits_slong_p(v.get_mpz_t())) return static_cast<std::int64_t>(v.get_si());
  return v.get_str();
}

/// Ascending coefficients, entry j multiplying x^j.
inline nlohmann::json polynomial_json(const IntPolynomial& p) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : p.coefficients()) a.push_back(integer_json(c));
  return a;
}

/// p_k for 1 <= k <= max_n, q_n, r^-_n (with the chosen bits) and/or r^+_n
/// for n <= max_n, and max{K - 2n - 2, 0} for K <= 2 max_n + 2.
inline nlohmann::json tables_document(unsigned max_n, SignSelection sign = SignSelection::kBoth) {
  if (max_n > kMaxBestPolynomialIndex)
    throw std::out_of_range("tables are limited to n <= " + std::to_string(kMaxBestPolynomialIndex));
  nlohmann::json doc;
  doc["schema_version"] = kTablesSchemaVersion;
  doc["kind"] = "fakelens-tables";
  doc["max_n"] = max_n;
  doc["coefficient_order"] = "ascending";

  nlohmann::json p = nlohmann::json::array();
  for (unsigned k = 1; k <= max_n; ++k) p.push_back({{"k", k}, {"coefficients", polynomial_json(p_k(k))}});
  doc["p"] = p;

  nlohmann::json q = nlohmann::json::array();
  for (unsigned n = 0; n <= max_n; ++n) q.push_back({{"n", n}, {"coefficients", polynomial_json(q_n(n))}});
  doc["q"] = q;

  if (sign != SignSelection::kPlus) {
    nlohmann::json r = nlohmann::json::array();
    for (unsigned n = 0; n <= max_n; ++n) {
      const RMinusRecord& rec = r_minus(n);
      r.push_back({{"n", n}, {"coefficients", polynomial_json(rec.polynomial)}, {"chosen_bits", rec.chosen_bits}});
    }
    doc["r_minus"] = r;
  }
  if (sign != SignSelection::kMinus) {
    nlohmann::json r = nlohmann::json::array();
    for (unsigned n = 0; n <= max_n; ++n) r.push_back({{"n", n}, {"coefficients", polynomial_json(r_plus(n))}});
    doc["r_plus"] = r;
  }

  nlohmann::json b = nlohmann::json::array();
  for (int level = 1; level <= static_cast<int>(2 * max_n + 2); ++level) {
    std::vector<unsigned> e;
    for (unsigned n = 0; n <= max_n; ++n) e.push_back(b_scaling(level, n));
    b.push_back({{"K", level}, {"exponents", e}});
  }
  doc["b_scalings"] = b;
  return doc;
}

/// Lowercase hex SHA-256 of the bytes.
inline std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

/// Fingerprint of the r-tables a structure-set computation at dimension d
/// relies on: SHA-256 of the compact dump of tables_document(min(c-1, 9)).
inline std::string basis_provenance(unsigned d) {
  const unsigned c = ambient_rank(d);
  const unsigned max_n = std::min(c == 0 ? 0u : c - 1, kMaxBestPolynomialIndex);
  return "sha256:" + sha256_hex(tables_document(max_n).dump());
}

}  // namespace fakelens
