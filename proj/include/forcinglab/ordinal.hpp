#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "forcinglab/error.hpp"

namespace forcinglab {

/// Ordinal below omega^3 in Cantor normal form: coeffs[i] is the coefficient
/// of omega^i. Canonical when there is no trailing zero coefficient.
class OrdinalCNF {
 public:
  static constexpr std::size_t kMaxTerms = 3;

  OrdinalCNF() = default;
  /// Finite ordinal.
  OrdinalCNF(std::uint64_t n) {  // NOLINT: naturals are ordinals
    if (n != 0) coeffs_.push_back(n);
  }
  /// Raw coefficients (lowest power first); not normalized, see canonical().
  static OrdinalCNF from_coefficients(std::vector<std::uint64_t> coeffs) {
    OrdinalCNF o;
    o.coeffs_ = std::move(coeffs);
    return o;
  }
  static OrdinalCNF omega() { return from_coefficients({0, 1}); }

  const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }
  std::uint64_t coefficient(std::size_t power) const { return power < coeffs_.size() ? coeffs_[power] : 0; }
  bool is_finite() const { return coeffs_.size() <= 1; }

  bool canonical() const {
    return coeffs_.size() <= kMaxTerms && (coeffs_.empty() || coeffs_.back() != 0);
  }

  friend bool operator==(const OrdinalCNF&, const OrdinalCNF&) = default;

 private:
  std::vector<std::uint64_t> coeffs_;
};

enum class OrdinalOrder { Less, Equal, Greater };

inline OrdinalOrder cnf_compare(const OrdinalCNF& a, const OrdinalCNF& b) {
  if (!a.canonical() || !b.canonical()) throw LabError(ErrorCode::NonCanonical, "trailing zero or too many terms");
  const auto& x = a.coefficients();
  const auto& y = b.coefficients();
  if (x.size() != y.size()) return x.size() < y.size() ? OrdinalOrder::Less : OrdinalOrder::Greater;
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] != y[i]) return x[i] < y[i] ? OrdinalOrder::Less : OrdinalOrder::Greater;
  }
  return OrdinalOrder::Equal;
}

inline bool operator<(const OrdinalCNF& a, const OrdinalCNF& b) { return cnf_compare(a, b) == OrdinalOrder::Less; }

/// omega * alpha + k. Left multiplication by omega raises every exponent by
/// one, so the result stays canonical; it must remain below omega^3.
inline OrdinalCNF omega_times_plus(const OrdinalCNF& alpha, std::uint64_t k) {
  if (!alpha.canonical()) throw LabError(ErrorCode::NonCanonical, "alpha is not canonical");
  if (alpha.coefficients().size() + 1 > OrdinalCNF::kMaxTerms && !alpha.coefficients().empty()) {
    throw LabError(ErrorCode::Overflow, "omega * alpha reaches omega^3");
  }
  std::vector<std::uint64_t> c;
  if (alpha.coefficients().empty()) {
    if (k != 0) c.push_back(k);
  } else {
    c.push_back(k);
    c.insert(c.end(), alpha.coefficients().begin(), alpha.coefficients().end());
  }
  return OrdinalCNF::from_coefficients(std::move(c));
}

/// "w^2*a+w*b+c" with zero terms and unit coefficients omitted; "0" for zero.
inline std::string to_string(const OrdinalCNF& o) {
  const auto& c = o.coefficients();
  if (c.empty()) return "0";
  std::string out;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] == 0) continue;
    if (!out.empty()) out += "+";
    if (i == 0) {
      out += std::to_string(c[i]);
      continue;
    }
    out += i == 1 ? "w" : "w^" + std::to_string(i);
    if (c[i] != 1) out += "*" + std::to_string(c[i]);
  }
  return out;
}

inline OrdinalCNF parse_ordinal(const std::string& s) {
  auto fail = [&] { return LabError(ErrorCode::InvalidArgument, "malformed ordinal '" + s + "'"); };
  auto number = [&](const std::string& t) {
    if (t.empty() || t.size() > 19 || !std::all_of(t.begin(), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      throw fail();
    }
    return std::stoull(t);
  };
  if (s == "0") return {};
  std::vector<std::uint64_t> c(OrdinalCNF::kMaxTerms, 0);
  std::size_t last_power = OrdinalCNF::kMaxTerms;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto plus = s.find('+', pos);
    std::string term = s.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
    std::size_t power = 0;
    std::uint64_t coeff = 1;
    if (!term.empty() && term[0] == 'w') {
      std::string rest = term.substr(1);
      power = 1;
      if (!rest.empty() && rest[0] == '^') {
        auto star = rest.find('*');
        power = static_cast<std::size_t>(number(rest.substr(1, star == std::string::npos ? std::string::npos : star - 1)));
        rest = star == std::string::npos ? "" : rest.substr(star);
      }
      if (!rest.empty()) {
        if (rest[0] != '*') throw fail();
        coeff = number(rest.substr(1));
      }
    } else {
      coeff = number(term);
    }
    // Terms must be strictly descending in power.
    if (power >= last_power || power >= OrdinalCNF::kMaxTerms || coeff == 0) throw fail();
    last_power = power;
    c[power] = coeff;
    if (plus == std::string::npos) break;
    pos = plus + 1;
  }
  while (!c.empty() && c.back() == 0) c.pop_back();
  return OrdinalCNF::from_coefficients(std::move(c));
}

struct OrdinalLess {
  bool operator()(const OrdinalCNF& a, const OrdinalCNF& b) const { return a < b; }
};

using OrdinalMap = std::map<OrdinalCNF, OrdinalCNF, OrdinalLess>;

/// Injection of the union of finite ordinal sets B_gamma, each x sent to
/// omega * gamma + (rank of x in B_gamma) for the least gamma containing x.
inline OrdinalMap embed_finite_family(const std::vector<std::vector<OrdinalCNF>>& family) {
  OrdinalMap out;
  for (std::size_t gamma = 0; gamma < family.size(); ++gamma) {
    std::vector<OrdinalCNF> b = family[gamma];
    std::sort(b.begin(), b.end(), OrdinalLess{});
    b.erase(std::unique(b.begin(), b.end()), b.end());
    for (std::size_t r = 0; r < b.size(); ++r) {
      out.emplace(b[r], omega_times_plus(OrdinalCNF(gamma), r));  // first gamma wins
    }
  }
  return out;
}

}  // namespace forcinglab
