// Command-line front end: expand, spectrum, derivative, decay-check, series,
// oracle-check, catalog. Exit codes: 0 ok, 2 parse, 3 domain, 4 non-convergence.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spherespec/spherespec.hpp"

namespace ss = spherespec;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitDomain = 3;
constexpr int kExitConvergence = 4;

struct Config {
  std::string kernel;
  std::string input;
  int m = 2;
  unsigned long levels = 20;
  bool levels_given = false;
  unsigned bits = 512;
  std::string format = "json";
  std::string output;

  unsigned long r = 1;
  bool inverse = false;
  unsigned long n_max = 0;
  std::string alpha = "zero";
  std::vector<unsigned long> checkpoints{100, 1000, 10000};
  std::string grid = "40x80";
  std::size_t top_k = 16;
};

/// Error carrying the text it refers to, so the message can point into it.
struct AnnotatedParseError {
  std::string text;
  ss::ParseError error;
};

unsigned default_bits() {
  const char* env = std::getenv("SPHERESPEC_PRECISION_BITS");
  if (!env || !*env) return 512;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0') {
    throw ss::ParseError("SPHERESPEC_PRECISION_BITS is not an integer: '" + std::string(env) + "'",
                         static_cast<std::size_t>(end - env));
  }
  return static_cast<unsigned>(v);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ss::DomainError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw ss::DomainError("cannot write '" + cfg.output + "'");
  out << text;
}

void emit_json(const Config& cfg, const ss::Json& j) { emit(cfg, j.dump(2) + "\n"); }

ss::Precision precision(const Config& cfg) {
  if (cfg.bits < 64) throw ss::DomainError("precision must be >= 64 bits, got " + std::to_string(cfg.bits));
  return ss::Precision{cfg.bits};
}

ss::KernelSpec kernel_spec(const Config& cfg) {
  try {
    return ss::parse_kernel(cfg.kernel, precision(cfg));
  } catch (const ss::ParseError& e) {
    throw AnnotatedParseError{cfg.kernel, e};
  }
}

/// The expansion a command works on: --input (an expansion file) or --kernel.
ss::LegendreExpansion load_expansion(const Config& cfg, unsigned long levels) {
  (void)precision(cfg);
  const bool have_kernel = !cfg.kernel.empty(), have_input = !cfg.input.empty();
  if (have_kernel == have_input) throw ss::DomainError("exactly one of --kernel or --input is required");
  if (have_input) {
    auto e = ss::expansion_from_json_text(read_file(cfg.input));
    if (e.m() != cfg.m) {
      throw ss::DomainError("--m " + std::to_string(cfg.m) + " disagrees with input m = " + std::to_string(e.m()));
    }
    return e;
  }
  const auto spec = kernel_spec(cfg);
  // Finite coefficient lists keep their own length unless --levels says otherwise.
  if (!cfg.levels_given) {
    if (const auto* ex = std::get_if<ss::ExplicitCoefficients>(&spec)) levels = ex->c.size() - 1;
    if (const auto* dp = std::get_if<ss::DotProduct>(&spec); dp && dp->degree) levels = *dp->degree;
  }
  return ss::expand(spec, cfg.m, levels, precision(cfg));
}

void cmd_expand(const Config& cfg) {
  const auto e = load_expansion(cfg, cfg.levels);
  if (cfg.format == "csv") {
    emit(cfg, ss::to_csv(e));
  } else {
    emit_json(cfg, ss::to_json(e));
  }
}

void cmd_spectrum(const Config& cfg) {
  const auto s = ss::eigenvalue_blocks(load_expansion(cfg, cfg.levels));
  if (cfg.format == "csv") {
    emit(cfg, ss::to_csv(s));
  } else {
    emit_json(cfg, ss::to_json(s));
  }
}

void cmd_derivative(const Config& cfg) {
  const auto e = load_expansion(cfg, cfg.levels);
  const auto d = cfg.inverse ? ss::j_operator(e, cfg.r) : ss::lb_derivative(e, cfg.r);
  if (cfg.format == "csv") {
    emit(cfg, ss::to_csv(d));
  } else {
    emit_json(cfg, ss::to_json(d));
  }
}

void cmd_decay_check(const Config& cfg) {
  const auto e = load_expansion(cfg, cfg.levels);
  const unsigned long n_max = cfg.n_max ? cfg.n_max : e.truncation_level();
  const auto rep = ss::verify_lemma42(ss::eigenvalue_blocks(e), e, n_max);
  if (cfg.format == "csv") {
    emit(cfg, ss::to_csv(rep));
  } else {
    emit_json(cfg, ss::to_json(rep));
  }
}

ss::ExponentSpec parse_alpha(const std::string& text, int m, ss::Precision p) {
  try {
    if (text == "zero") return ss::ExponentZero{};
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ss::ParseError("expected zero, power:p, root:kappa or file:path", 0);
    const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
    if (kind == "power") return ss::ExponentPower{ss::Real::from_string(arg, p)};
    if (kind == "root") {
      if (arg == "auto-divergent") return ss::ExponentScaledRoot{ss::divergence_parameters(m, 0.9, p).kappa};
      return ss::ExponentScaledRoot{ss::Real::from_string(arg, p)};
    }
    if (kind == "file") {
      std::istringstream in(read_file(arg));
      std::vector<ss::Real> values;
      std::string tok;
      while (in >> tok) values.push_back(ss::Real::from_string(tok, p));
      if (values.empty()) throw ss::DomainError("exponent table '" + arg + "' is empty");
      return ss::ExponentTable{std::move(values)};
    }
    throw ss::ParseError("unknown exponent kind '" + kind + "'", 0);
  } catch (const ss::ParseError& e) {
    throw AnnotatedParseError{text, e};
  }
}

void cmd_series(const Config& cfg) {
  const ss::Precision p = precision(cfg);
  unsigned long levels = cfg.levels;
  if (!cfg.levels_given && cfg.input.empty() && !cfg.checkpoints.empty()) {
    // Smallest truncation whose spectrum reaches the last checkpoint.
    levels = 0;
    while (ss::cum_dim(levels, cfg.m) < cfg.checkpoints.back()) ++levels;
  }
  const auto e = load_expansion(cfg, levels);
  auto spectrum = ss::eigenvalue_blocks(e);
  const auto exponent = parse_alpha(cfg.alpha, cfg.m, p);
  const auto res = ss::series_eval(spectrum, exponent, cfg.checkpoints, p);
  if (cfg.format == "csv") {
    emit(cfg, ss::to_csv(res));
  } else {
    emit_json(cfg, ss::to_json(res));
  }
}

void cmd_oracle_check(const Config& cfg) {
  unsigned n_polar = 0, n_azimuthal = 0;
  {
    const auto x = cfg.grid.find('x');
    std::size_t used = 0;
    try {
      if (x == std::string::npos) throw std::invalid_argument("x");
      n_polar = static_cast<unsigned>(std::stoul(cfg.grid.substr(0, x), &used));
      if (used != x) throw std::invalid_argument("p");
      n_azimuthal = static_cast<unsigned>(std::stoul(cfg.grid.substr(x + 1), &used));
      if (used != cfg.grid.size() - x - 1) throw std::invalid_argument("a");
    } catch (const std::logic_error&) {
      throw AnnotatedParseError{cfg.grid, ss::ParseError("expected --grid PxA", x == std::string::npos ? 0 : x)};
    }
  }
  if (cfg.m != 2) throw ss::DomainError("oracle-check is defined for m = 2 only");
  const auto e = load_expansion(cfg, cfg.levels);
  const ss::ZonalFunction k = cfg.input.empty()
                                  ? ss::zonal_evaluator(kernel_spec(cfg), cfg.levels)
                                  : ss::zonal_evaluator(ss::ExplicitCoefficients{e.coefficients()});
  const auto rep = ss::oracle_check(k, e, n_polar, n_azimuthal, cfg.top_k);
  if (cfg.format == "csv") {
    emit(cfg, ss::to_csv(rep));
  } else {
    emit_json(cfg, ss::to_json(rep));
  }
}

void cmd_catalog(const Config& cfg) {
  if (cfg.format == "csv") {
    emit(cfg, ss::to_csv(ss::kernel_catalog()));
  } else {
    emit_json(cfg, ss::to_json(ss::kernel_catalog()));
  }
}

void report_parse(const std::string& text, const ss::ParseError& e) {
  std::cerr << "error: " << e.what() << '\n';
  if (!text.empty()) {
    std::cerr << "  " << text << '\n' << "  " << std::string(std::min(e.position(), text.size()), ' ') << "^\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Spectra and decay of zonal kernels on spheres"};
  app.require_subcommand(1);
  try {
    cfg.bits = default_bits();
  } catch (const ss::ParseError& e) {
    report_parse("", e);
    return kExitParse;
  }

  auto common = [&](CLI::App* sub, bool kernel_input) {
    if (kernel_input) {
      sub->add_option("--kernel", cfg.kernel, "kernel specification, e.g. gaussian(r=1)");
      sub->add_option("--input", cfg.input, "expansion JSON produced by expand or derivative");
      sub->add_option("--m", cfg.m, "sphere dimension (>= 2)");
      sub->add_option("--levels", cfg.levels, "truncation level N");
      sub->add_option("--precision", cfg.bits, "working precision in bits (>= 64)");
    }
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", cfg.output, "output file (default stdout)");
  };

  auto* expand = app.add_subcommand("expand", "condensed Legendre coefficients");
  common(expand, true);
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue blocks");
  common(spectrum, true);
  auto* derivative = app.add_subcommand("derivative", "Laplace-Beltrami derivative (or its inverse J)");
  common(derivative, true);
  derivative->add_option("--r", cfg.r, "derivative order (>= 1)");
  derivative->add_flag("--inverse", cfg.inverse, "apply J^r instead of D^r");
  auto* decay = app.add_subcommand("decay-check", "singular-value chain against the exact J product");
  common(decay, true);
  decay->add_option("--n-max", cfg.n_max, "largest n checked (default: truncation level)");
  auto* series = app.add_subcommand("series", "partial sums of the weighted singular-value series");
  common(series, true);
  series->add_option("--alpha", cfg.alpha, "zero | power:p | root:kappa | root:auto-divergent | file:path");
  series->add_option("--checkpoints", cfg.checkpoints, "comma-separated flat indices")->delimiter(',');
  auto* oracle = app.add_subcommand("oracle-check", "Nystrom cross-check on S^2");
  common(oracle, true);
  oracle->add_option("--grid", cfg.grid, "polar x azimuthal grid, e.g. 40x80");
  oracle->add_option("--top-k", cfg.top_k, "number of leading eigenvalues compared");
  auto* catalog = app.add_subcommand("catalog", "kernel families and parameter ranges");
  common(catalog, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  for (auto* sub : {expand, spectrum, derivative, decay, series, oracle}) {
    if (*sub && sub->count("--levels") > 0) cfg.levels_given = true;
  }

  try {
    if (*expand) cmd_expand(cfg);
    if (*spectrum) cmd_spectrum(cfg);
    if (*derivative) cmd_derivative(cfg);
    if (*decay) cmd_decay_check(cfg);
    if (*series) cmd_series(cfg);
    if (*oracle) cmd_oracle_check(cfg);
    if (*catalog) cmd_catalog(cfg);
  } catch (const AnnotatedParseError& e) {
    report_parse(e.text, e.error);
    return kExitParse;
  } catch (const ss::ParseError& e) {
    report_parse("", e);
    return kExitParse;
  } catch (const ss::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ss::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
