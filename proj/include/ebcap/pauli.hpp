#pragma once

// Pauli strings in symplectic (x, z) form and [n,1] stabilizer codes with an
// ordered generator list. Phases are not tracked: every quantity computed here
// depends only on commutation relations.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ebcap/bell.hpp"

namespace ebcap {

inline constexpr int kMaxQubits = 64;

/// Qubit i (0-based) carries X iff bit i of x is set, Z iff bit i of z is set,
/// Y iff both.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n, std::uint64_t x = 0, std::uint64_t z = 0)
      : n_(n), x_(x), z_(z) {
    if (n < 0 || n > kMaxQubits) {
      throw std::invalid_argument("PauliString: qubit count must be in [0, 64]");
    }
    const std::uint64_t mask = qubit_mask(n);
    if ((x & ~mask) || (z & ~mask)) {
      throw std::invalid_argument("PauliString: bits set beyond qubit count");
    }
  }

  static std::uint64_t qubit_mask(int n) {
    return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  }

  int size() const { return n_; }
  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }
  std::uint64_t support() const { return x_ | z_; }
  bool is_identity() const { return support() == 0; }

  char at(int qubit) const {
    const bool x = (x_ >> qubit) & 1u;
    const bool z = (z_ >> qubit) & 1u;
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  /// 1-based index of the last qubit in the support; 0 for the identity.
  int last_qubit() const { return 64 - std::countl_zero(support()); }

  std::string str() const {
    std::string s(static_cast<std::size_t>(n_), 'I');
    for (int i = 0; i < n_; ++i) s[static_cast<std::size_t>(i)] = at(i);
    return s;
  }

  /// Product up to phase.
  friend PauliString operator*(const PauliString& a, const PauliString& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("PauliString: size mismatch");
    return PauliString(a.n_, a.x_ ^ b.x_, a.z_ ^ b.z_);
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

inline PauliString parse_pauli(std::string_view text, int n) {
  if (static_cast<int>(text.size()) != n) {
    throw std::invalid_argument("parse_pauli: expected " + std::to_string(n) +
                                " characters, got " +
                                std::to_string(text.size()));
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    switch (text[static_cast<std::size_t>(i)]) {
      case 'I': break;
      case 'X': x |= bit; break;
      case 'Z': z |= bit; break;
      case 'Y': x |= bit; z |= bit; break;
      default:
        throw std::invalid_argument(std::string("parse_pauli: invalid character '") +
                                    text[static_cast<std::size_t>(i)] + "'");
    }
  }
  return PauliString(n, x, z);
}

inline PauliString parse_pauli(std::string_view text) {
  return parse_pauli(text, static_cast<int>(text.size()));
}

/// Symplectic inner product is zero.
inline bool commutes(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("commutes: size mismatch");
  const std::uint64_t overlap = (a.x_bits() & b.z_bits()) ^ (a.z_bits() & b.x_bits());
  return (std::popcount(overlap) & 1) == 0;
}

struct StabilizerCode {
  std::string name;
  int n = 0;
  std::vector<PauliString> generators;  // measurement order
  PauliString logical_x;
  PauliString logical_z;

  int num_generators() const { return static_cast<int>(generators.size()); }

  friend bool operator==(const StabilizerCode&, const StabilizerCode&) = default;
};

/// GF(2) rank of the stacked symplectic rows (x | z).
inline int symplectic_rank(const std::vector<PauliString>& rows) {
  // 128-bit rows packed as two words; eliminate on the x half then the z half.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> m;
  m.reserve(rows.size());
  for (const auto& r : rows) m.emplace_back(r.x_bits(), r.z_bits());
  int rank = 0;
  for (int half = 0; half < 2; ++half) {
    for (int bit = 0; bit < 64; ++bit) {
      const std::uint64_t mask = std::uint64_t{1} << bit;
      auto word = [&](std::size_t i) -> std::uint64_t& {
        return half == 0 ? m[i].first : m[i].second;
      };
      std::size_t pivot = static_cast<std::size_t>(rank);
      while (pivot < m.size() && !(word(pivot) & mask)) ++pivot;
      if (pivot == m.size()) continue;
      std::swap(m[pivot], m[static_cast<std::size_t>(rank)]);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (i != static_cast<std::size_t>(rank) && (word(i) & mask)) {
          m[i].first ^= m[static_cast<std::size_t>(rank)].first;
          m[i].second ^= m[static_cast<std::size_t>(rank)].second;
        }
      }
      ++rank;
    }
  }
  return rank;
}

/// Returns std::nullopt when the code is a valid [n,1] stabilizer code,
/// otherwise a description of the first violated invariant.
inline std::optional<std::string> validate_code(const StabilizerCode& code) {
  if (code.n < 1 || code.n > kMaxQubits) {
    return "qubit count " + std::to_string(code.n) + " outside [1, 64]";
  }
  auto sized = [&](const PauliString& p) { return p.size() == code.n; };
  for (int i = 0; i < code.num_generators(); ++i) {
    if (!sized(code.generators[static_cast<std::size_t>(i)])) {
      return "generator g" + std::to_string(i + 1) + " has wrong length";
    }
  }
  if (!sized(code.logical_x)) return "logical X has wrong length";
  if (!sized(code.logical_z)) return "logical Z has wrong length";

  const auto& g = code.generators;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      if (!commutes(g[i], g[j])) {
        return "generators g" + std::to_string(i + 1) + " and g" +
               std::to_string(j + 1) + " anticommute";
      }
    }
  }
  if (symplectic_rank(g) != static_cast<int>(g.size())) {
    return "generators are not independent";
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!commutes(code.logical_x, g[i])) {
      return "logical X anticommutes with g" + std::to_string(i + 1);
    }
    if (!commutes(code.logical_z, g[i])) {
      return "logical Z anticommutes with g" + std::to_string(i + 1);
    }
  }
  if (commutes(code.logical_x, code.logical_z)) {
    return "logical X and logical Z must anticommute";
  }
  if (code.num_generators() != code.n - 1) {
    return "an [n,1] code needs n-1 = " + std::to_string(code.n - 1) +
           " generators, found " + std::to_string(code.num_generators());
  }
  return std::nullopt;
}

/// Generators are limited to 63 so a syndrome fits in one machine word.
using Syndrome = std::uint64_t;

/// Bit i is set iff the error anticommutes with generator i (outcome -1).
inline Syndrome syndrome(const PauliString& error, const StabilizerCode& code) {
  Syndrome s = 0;
  for (std::size_t i = 0; i < code.generators.size(); ++i) {
    if (!commutes(error, code.generators[i])) s |= Syndrome{1} << i;
  }
  return s;
}

/// Logical Pauli class of an error: amplitude bit from anticommutation with
/// logical Z (a logical X component), phase bit from anticommutation with
/// logical X (a logical Z component).
inline BellLabel logical_class(const PauliString& error, const StabilizerCode& code) {
  const unsigned amplitude = commutes(error, code.logical_z) ? 0u : 1u;
  const unsigned phase = commutes(error, code.logical_x) ? 0u : 1u;
  return BellLabel{phase, amplitude};
}

/// q_i = number of channel uses consumed before g_i can be measured.
inline std::vector<int> uses_schedule(const StabilizerCode& code) {
  std::vector<int> q;
  q.reserve(code.generators.size());
  int reach = 0;
  for (const auto& g : code.generators) {
    reach = std::max(reach, g.last_qubit());
    q.push_back(reach);
  }
  return q;
}

/// n-qubit repetition code with generators Z_i Z_{i+1}.
inline StabilizerCode builtin_cat(int n) {
  if (n < 2 || n > kMaxQubits) {
    throw std::invalid_argument("builtin_cat: n must be in [2, 64]");
  }
  StabilizerCode code;
  code.name = "cat" + std::to_string(n);
  code.n = n;
  for (int i = 0; i + 1 < n; ++i) {
    code.generators.emplace_back(n, 0, (std::uint64_t{3} << i));
  }
  const std::uint64_t all = PauliString::qubit_mask(n);
  code.logical_x = PauliString(n, all, 0);
  code.logical_z = PauliString(n, 0, n % 2 == 1 ? all : PauliString::qubit_mask(n - 1));
  return code;
}

/// Shor's nine-qubit code with the generator order that adds as few new
/// qubits as possible per measurement.
inline StabilizerCode builtin_shor9() {
  StabilizerCode code;
  code.name = "shor9";
  code.n = 9;
  for (const char* g : {"ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII",
                        "XXXXXXIII", "IIIIIIZZI", "IIIIIIIZZ", "IIIXXXXXX"}) {
    code.generators.push_back(parse_pauli(g, 9));
  }
  code.logical_x = parse_pauli("ZZZZZZZZZ", 9);
  code.logical_z = parse_pauli("XXXXXXXXX", 9);
  return code;
}

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Splits a line into whitespace-separated tokens after dropping any '#'
/// comment.
inline std::vector<std::string> tokens(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<std::string> out;
  std::istringstream in{std::string(trim(line))};
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

inline int parse_int(const std::string& s, int line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw ParseError(line, "expected an integer, got '" + s + "'");
  return v;
}

}  // namespace detail

/// Parses the line-oriented code-file format (see docs/formats.md) and
/// validates the result. Generator order is preserved.
inline StabilizerCode parse_code_file(std::string_view text) {
  StabilizerCode code;
  std::optional<int> n;
  std::optional<PauliString> lx;
  std::optional<PauliString> lz;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    const auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    if (tok.size() != 2) {
      throw ParseError(line_no, "expected '<keyword> <value>'");
    }
    const std::string& value = tok[1];
    if (key == "name") {
      code.name = value;
      continue;
    }
    if (key == "n") {
      if (n) throw ParseError(line_no, "duplicate 'n' line");
      const int v = detail::parse_int(value, line_no);
      if (v < 1 || v > kMaxQubits) throw ParseError(line_no, "n must be in [1, 64]");
      n = v;
      continue;
    }
    if (key != "g" && key != "X" && key != "Z") {
      throw ParseError(line_no, "unknown keyword '" + key + "'");
    }
    if (!n) throw ParseError(line_no, "'n' must precede Pauli lines");
    PauliString p;
    try {
      p = parse_pauli(value, *n);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    if (key == "g") {
      if (code.generators.size() >= 63) throw ParseError(line_no, "too many generators");
      code.generators.push_back(p);
    } else if (key == "X") {
      if (lx) throw ParseError(line_no, "duplicate X line");
      lx = p;
    } else {
      if (lz) throw ParseError(line_no, "duplicate Z line");
      lz = p;
    }
  }
  if (!n) throw ParseError(0, "missing 'n' line");
  if (!lx || !lz) throw ParseError(0, "missing X/Z line");
  code.n = *n;
  code.logical_x = *lx;
  code.logical_z = *lz;
  if (auto diag = validate_code(code)) throw ParseError(0, "invalid code: " + *diag);
  return code;
}

inline std::string render_code(const StabilizerCode& code) {
  std::ostringstream out;
  if (!code.name.empty()) out << "name " << code.name << '\n';
  out << "n " << code.n << '\n';
  for (const auto& g : code.generators) out << "g " << g.str() << '\n';
  out << "X " << code.logical_x.str() << '\n';
  out << "Z " << code.logical_z.str() << '\n';
  return out.str();
}

}  // namespace ebcap
