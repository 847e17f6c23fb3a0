#pragma once

// Textual kernel specifications:
//   gaussian(r=1)  multiquadric(sigma=1,delta=0.5)
//   moller(alpha=2,beta=1,tau=1,sigma=1)  optimality
//   dotproduct(1,0.5,0.25)  dotproduct(geometric=0.5,scale=2)  dotproduct(exponential=2)
//   explicit(1,0,0.25)  zonal-table:path/to/table.txt

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "spherespec/errors.hpp"
#include "spherespec/kernels.hpp"
#include "spherespec/real.hpp"

namespace spherespec {

namespace detail {

struct KernelArg {
  std::string key;  // empty for positional
  Real value;
  std::size_t position = 0;
};

class KernelLexer {
 public:
  explicit KernelLexer(const std::string& s) : s_(s) {}

  void skip_space() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  [[nodiscard]] bool done() {
    skip_space();
    return i_ >= s_.size();
  }
  [[nodiscard]] std::size_t pos() const { return i_; }
  bool accept(char c) {
    skip_space();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", i_);
  }
  std::string identifier() {
    skip_space();
    const std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '-')) ++i_;
    if (start == i_) throw ParseError("expected a name", i_);
    return s_.substr(start, i_ - start);
  }
  [[nodiscard]] bool at_number() {
    skip_space();
    if (i_ >= s_.size()) return false;
    const char c = s_[i_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }
  Real number(Precision p) {
    skip_space();
    const std::size_t start = i_;
    auto digits = [&] {
      const std::size_t d = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      return i_ - d;
    };
    if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
    std::size_t n = digits();
    if (i_ < s_.size() && s_[i_] == '.') {
      ++i_;
      n += digits();
    }
    if (n == 0) throw ParseError("expected a number", start);
    if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
      ++i_;
      if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
      if (digits() == 0) throw ParseError("malformed exponent", i_);
    }
    return Real::from_string(s_.substr(start, i_ - start), p);
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;
};

inline std::vector<KernelArg> parse_args(KernelLexer& lx, Precision p) {
  std::vector<KernelArg> args;
  if (lx.accept(')')) return args;
  do {
    lx.skip_space();
    KernelArg a;
    a.position = lx.pos();
    if (!lx.at_number()) {
      a.key = lx.identifier();
      lx.expect('=');
    }
    a.value = lx.number(p);
    args.push_back(std::move(a));
  } while (lx.accept(','));
  lx.expect(')');
  return args;
}

/// Named arguments of a family; rejects positional, unknown, duplicate and missing keys.
class NamedArgs {
 public:
  NamedArgs(const std::string& family, const std::vector<KernelArg>& args, std::vector<std::string> required,
            std::vector<std::string> optional, std::size_t close_pos)
      : family_(family), close_(close_pos) {
    for (const auto& a : args) {
      if (a.key.empty()) throw ParseError(family + ": expected key=value", a.position);
      const bool known = std::find(required.begin(), required.end(), a.key) != required.end() ||
                         std::find(optional.begin(), optional.end(), a.key) != optional.end();
      if (!known) throw ParseError(family + ": unknown parameter '" + a.key + "'", a.position);
      if (values_.count(a.key)) throw ParseError(family + ": duplicate parameter '" + a.key + "'", a.position);
      values_.emplace(a.key, a.value);
    }
    for (const auto& r : required) {
      if (!values_.count(r)) throw ParseError(family + ": missing parameter '" + r + "'", close_);
    }
  }
  [[nodiscard]] const Real& get(const std::string& k) const { return values_.at(k); }
  [[nodiscard]] bool has(const std::string& k) const { return values_.count(k) > 0; }

 private:
  std::string family_;
  std::size_t close_;
  std::map<std::string, Real> values_;
};

/// Local 4-point Lagrange interpolation on sorted (t, f) samples.
inline PointwiseZonal table_interpolant(std::vector<Real> t, std::vector<Real> f, std::string label) {
  auto ts = std::make_shared<const std::vector<Real>>(std::move(t));
  auto fs = std::make_shared<const std::vector<Real>>(std::move(f));
  return PointwiseZonal{[ts, fs](const Real& x) {
                          const auto& T = *ts;
                          const auto& F = *fs;
                          const std::size_t n = T.size();
                          auto it = std::upper_bound(T.begin(), T.end(), x);
                          std::size_t j = static_cast<std::size_t>(it - T.begin());
                          std::size_t lo = j >= 2 ? j - 2 : 0;
                          if (lo + 4 > n) lo = n - 4;
                          const Precision p = x.precision();
                          Real acc(p);
                          for (std::size_t a = lo; a < lo + 4; ++a) {
                            Real l(1L, p);
                            for (std::size_t b = lo; b < lo + 4; ++b) {
                              if (a != b) l *= (x - T[b]) / (T[a] - T[b]);
                            }
                            acc += l * F[a];
                          }
                          return acc;
                        },
                        std::move(label)};
}

}  // namespace detail

/// Reads whitespace- or comma-separated (t, f(t)) pairs, one per line ('#'
/// starts a comment). Nodes must increase strictly and span [-1, 1].
inline PointwiseZonal load_zonal_table(const std::string& path, Precision p) {
  std::ifstream in(path);
  if (!in) throw DomainError("zonal-table: cannot open '" + path + "'");
  std::vector<Real> t, f;
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    for (auto& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || (ls >> extra)) throw ParseError("zonal-table: expected two columns in '" + path + "'", line_start);
    t.push_back(Real::from_string(a, p));
    f.push_back(Real::from_string(b, p));
    if (t.size() > 1 && !(t[t.size() - 2] < t.back())) {
      throw DomainError("zonal-table: nodes must be strictly increasing");
    }
  }
  if (t.size() < 4) throw DomainError("zonal-table: at least 4 samples required");
  if (t.front() > -1L || t.back() < 1L) throw DomainError("zonal-table: samples must cover [-1, 1]");
  return detail::table_interpolant(std::move(t), std::move(f), "zonal-table:" + path);
}

/// Parses a kernel string. Syntax errors raise ParseError with the offending
/// character position; out-of-range values raise DomainError.
inline KernelSpec parse_kernel(const std::string& text, Precision p = kDefaultPrecision) {
  {
    std::size_t lead = 0;
    while (lead < text.size() && std::isspace(static_cast<unsigned char>(text[lead]))) ++lead;
    const std::string prefix = "zonal-table:";
    if (text.compare(lead, prefix.size(), prefix) == 0) {
      std::string path = text.substr(lead + prefix.size());
      while (!path.empty() && std::isspace(static_cast<unsigned char>(path.back()))) path.pop_back();
      if (path.empty()) throw ParseError("zonal-table: missing path", lead + prefix.size());
      return load_zonal_table(path, p);
    }
  }
  detail::KernelLexer lx(text);
  const std::size_t name_pos = (lx.skip_space(), lx.pos());
  const std::string name = lx.identifier();
  std::vector<detail::KernelArg> args;
  bool has_parens = false;
  std::size_t close = lx.pos();
  if (lx.accept('(')) {
    has_parens = true;
    args = detail::parse_args(lx, p);
    close = lx.pos() - 1;
  }
  if (!lx.done()) throw ParseError("unexpected trailing input", lx.pos());

  KernelSpec spec;
  if (name == "gaussian") {
    const detail::NamedArgs a(name, args, {"r"}, {}, close);
    spec = Gaussian{a.get("r")};
  } else if (name == "multiquadric") {
    const detail::NamedArgs a(name, args, {"sigma", "delta"}, {}, close);
    spec = Multiquadric{a.get("sigma"), a.get("delta")};
  } else if (name == "moller") {
    const detail::NamedArgs a(name, args, {"alpha", "beta", "tau", "sigma"}, {}, close);
    spec = Moller{a.get("alpha"), a.get("beta"), a.get("tau"), a.get("sigma")};
  } else if (name == "optimality") {
    if (!args.empty()) throw ParseError("optimality takes no parameters", args.front().position);
    spec = Optimality{};
  } else if (name == "explicit") {
    if (!has_parens || args.empty()) throw ParseError("explicit: at least one coefficient required", close);
    std::vector<Real> c;
    for (const auto& a : args) {
      if (!a.key.empty()) throw ParseError("explicit: coefficients are positional", a.position);
      c.push_back(a.value);
    }
    spec = ExplicitCoefficients{std::move(c)};
  } else if (name == "dotproduct") {
    if (!has_parens || args.empty()) throw ParseError("dotproduct: coefficients or a named family required", close);
    if (args.front().key.empty()) {
      std::vector<Real> b;
      for (const auto& a : args) {
        if (!a.key.empty()) throw ParseError("dotproduct: cannot mix positional and named arguments", a.position);
        if (!(a.value > 0L)) throw DomainError("dotproduct: coefficient b_" + std::to_string(b.size()) + " must be > 0");
        b.push_back(a.value);
      }
      const unsigned long degree = b.size() - 1;
      auto bs = std::make_shared<const std::vector<Real>>(std::move(b));
      spec = DotProduct{[bs](unsigned long n, Precision q) {
                          return n < bs->size() ? detail::with_precision((*bs)[n], q) : Real(q);
                        },
                        "dotproduct", degree};
    } else if (args.front().key == "geometric") {
      const detail::NamedArgs a(name, args, {"geometric"}, {"scale"}, close);
      const Real q = a.get("geometric");
      const Real s = a.has("scale") ? a.get("scale") : Real(1L, p);
      detail::require_positive(q, "dotproduct", "geometric");
      if (!(q < 1L)) throw DomainError("dotproduct: geometric ratio must be < 1 for K(1) to be finite");
      detail::require_positive(s, "dotproduct", "scale");
      spec = DotProduct{[q, s](unsigned long n, Precision pr) {
                          return detail::with_precision(s, pr) * pow(detail::with_precision(q, pr), static_cast<long>(n));
                        },
                        "dotproduct", std::nullopt};
    } else if (args.front().key == "exponential") {
      const detail::NamedArgs a(name, args, {"exponential"}, {}, close);
      const Real x = a.get("exponential");
      detail::require_positive(x, "dotproduct", "exponential");
      spec = DotProduct{[x](unsigned long n, Precision pr) {
                          const Real xp = detail::with_precision(x, pr);
                          Real v(1L, pr);
                          for (unsigned long k = 1; k <= n; ++k) {
                            v *= xp;
                            v /= static_cast<long>(k);
                          }
                          return v;
                        },
                        "dotproduct", std::nullopt};
    } else {
      throw ParseError("dotproduct: unknown parameter '" + args.front().key + "'", args.front().position);
    }
  } else {
    throw ParseError("unknown kernel family '" + name + "'", name_pos);
  }
  validate(spec);
  return spec;
}

/// Families and parameter ranges, in grammar order.
struct CatalogEntry {
  std::string name;
  std::string syntax;
  std::string parameters;
};

inline std::vector<CatalogEntry> kernel_catalog() {
  return {
      {"gaussian", "gaussian(r=R)", "r > 0"},
      {"multiquadric", "multiquadric(sigma=S,delta=D)", "sigma > 0, 0 < delta < 1"},
      {"moller", "moller(alpha=A,beta=B,tau=T,sigma=S)", "alpha, beta, tau, sigma > 0"},
      {"optimality", "optimality", "none"},
      {"dotproduct", "dotproduct(b0,b1,...) | dotproduct(geometric=Q[,scale=S]) | dotproduct(exponential=X)",
       "b_n > 0; 0 < Q < 1; S, X > 0"},
      {"explicit", "explicit(c0,c1,...)", "any real coefficients"},
      {"zonal-table", "zonal-table:PATH", "(t, f(t)) rows, t strictly increasing over [-1, 1], >= 4 rows"},
  };
}

}  // namespace spherespec
