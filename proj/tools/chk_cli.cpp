// Command-line front end: eval, verify, converge, basis, sample.
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 domain error.

#include <chk/verify.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace {

using chk::cplx;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "a", "a+bi", "a-bi", "bi", "-i"
cplx parse_complex(const std::string& text) {
  static const std::string real = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex full("^\\s*([+-]?" + real + ")([+-])(" + real + ")?i\\s*$");
  static const std::regex imag("^\\s*([+-]?)(" + real + ")?i\\s*$");
  static const std::regex re_only("^\\s*([+-]?" + real + ")\\s*$");
  std::smatch m;
  double a = 0.0, b = 0.0;
  if (std::regex_match(text, m, full)) {
    a = std::stod(m[1]);
    b = (m[3].matched ? std::stod(m[3]) : 1.0) * (m[2] == "-" ? -1.0 : 1.0);
  } else if (std::regex_match(text, m, imag)) {
    b = (m[2].matched ? std::stod(m[2]) : 1.0) * (m[1] == "-" ? -1.0 : 1.0);
  } else if (std::regex_match(text, m, re_only)) {
    a = std::stod(m[1]);
  } else {
    throw UsageError("cannot parse complex number '" + text + "'");
  }
  if (!std::isfinite(a) || !std::isfinite(b)) throw UsageError("complex number '" + text + "' is not finite");
  return {a, b};
}

std::pair<double, double> parse_interval(const std::string& text) {
  const auto c = text.find(':');
  if (c == std::string::npos) throw UsageError("interval must look like a:b");
  try {
    return {std::stod(text.substr(0, c)), std::stod(text.substr(c + 1))};
  } catch (const std::exception&) {
    throw UsageError("cannot parse interval '" + text + "'");
  }
}

// "64,256,1024" or "1..8"
std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
      for (int n = a; n <= b; ++n) out.push_back(n);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::exception&) {
    throw UsageError("cannot parse n-list '" + text + "'");
  }
  if (out.empty()) throw UsageError("n-list is empty");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] <= out[i - 1]) throw UsageError("n-list must be strictly ascending");
  return out;
}

int cmd_eval(const std::string& s_text, double x, std::optional<double> y, const std::string& what) {
  const chk::SpectralParameter s(parse_complex(s_text));
  cplx v;
  if (what == "weight") {
    v = chk::weight(s, x);
  } else {
    if (x == 0.0) throw chk::SingularityError("x = 0 is excluded: rho and psi are singular or degenerate there");
    const chk::ChKernel k(s);
    if (what == "kernel") {
      if (!y) throw UsageError("--what kernel needs --y");
      if (*y == 0.0) throw chk::SingularityError("y = 0 is excluded");
      v = k(x, *y);
    } else if (what == "tcal") {
      v = k.tcal(x);
    } else if (what == "rho") {
      v = chk::rho(s, x);
    } else if (what == "psi") {
      v = chk::psi(s, x);
    } else {
      v = k.z()(x);
    }
  }
  std::cout << "{\"re\":" << num(v.real()) << ",\"im\":" << num(v.imag()) << "}\n";
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& s_text, const std::string& level) {
  const chk::SpectralParameter s(parse_complex(s_text));
  const auto checks = chk::run_suite(suite, s, level == "full" ? chk::Level::full : chk::Level::fast);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << c.name << ", " << num(c.value) << ", " << num(c.bound) << ", " << (c.pass ? "PASS" : "FAIL") << "\n";
    ok = ok && c.pass;
  }
  return ok ? 0 : kExitFail;
}

int cmd_converge(const std::string& target, const std::string& s_text, const std::string& n_list,
                 std::optional<double> ceiling) {
  const chk::SpectralParameter s(parse_complex(s_text));
  const auto ns = parse_n_list(n_list);
  const chk::ConvergeTarget t = target == "bnr"        ? chk::ConvergeTarget::bnr
                                : target == "ker-conv" ? chk::ConvergeTarget::ker_conv
                                                       : chk::ConvergeTarget::unit_norm;
  std::cout << "n,error\n";
  std::vector<double> errs;
  for (int n : ns) {
    errs.push_back(chk::convergence_error(t, s, n));
    std::cout << n << "," << num(errs.back()) << "\n";
  }
  bool monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] < errs[i - 1];
  std::cout << "# monotone_decrease=" << (monotone ? "true" : "false") << "\n";
  return errs.back() <= ceiling.value_or(chk::default_ceiling(t)) ? 0 : kExitFail;
}

int cmd_basis(const std::string& s_text, int n, const std::string& grid, const std::string& out_path, bool check) {
  const chk::SpectralParameter s(parse_complex(s_text));
  const auto colon1 = grid.find(':'), colon2 = grid.rfind(':');
  if (colon1 == std::string::npos || colon1 == colon2) throw UsageError("--grid must look like a:b:count");
  double a, b;
  int count;
  try {
    a = std::stod(grid.substr(0, colon1));
    b = std::stod(grid.substr(colon1 + 1, colon2 - colon1 - 1));
    count = std::stoi(grid.substr(colon2 + 1));
  } catch (const std::exception&) {
    throw UsageError("cannot parse --grid '" + grid + "'");
  }
  if (count < 2 || !(b > a)) throw UsageError("--grid needs a < b and count >= 2");
  const auto xs = chk::linspace(a, b, count);
  std::vector<double> nz;
  for (double x : xs) {
    if (x == 0.0 && s.re() <= 0.0) throw chk::SingularityError("grid touches x = 0 with Re s <= 0");
    if (x != 0.0) nz.push_back(x);
  }
  if (nz.empty()) throw chk::DomainError("grid has no points away from 0");
  // L_n(0) = rho(0) h_n(0) = 0 when Re s > 0.
  const auto adj = chk::basis_L_adjoint_route(s, n, nz);
  std::optional<chk::BasisFunction> closed;
  if (check) closed = chk::basis_L_closed_form(s, n, nz);
  std::ofstream f(out_path);
  if (!f) throw UsageError("cannot open '" + out_path + "' for writing");
  f << (check ? "x,re,im,re_closed,im_closed\n" : "x,re,im\n");
  std::size_t j = 0;
  for (double x : xs) {
    cplx v = 0.0, c = 0.0;
    if (x != 0.0) {
      v = adj.values[j];
      if (closed) c = closed->values[j];
      ++j;
    }
    f << num(x) << "," << num(v.real()) << "," << num(v.imag());
    if (check) f << "," << num(c.real()) << "," << num(c.imag());
    f << "\n";
  }
  if (check) {
    const double dev = chk::route_ratio_deviation(s, n, nz);
    f << "# max_ratio_deviation=" << num(dev) << "\n";
    std::cout << "max_ratio_deviation, " << num(dev) << ", 1e-06, " << (dev <= 1e-6 ? "PASS" : "FAIL") << "\n";
    return dev <= 1e-6 ? 0 : kExitFail;
  }
  return 0;
}

int cmd_sample(const std::string& s_text, const std::string& interval, int nodes, int count, std::uint64_t seed,
               const std::string& out_path) {
  const chk::SpectralParameter s(parse_complex(s_text));
  const auto [a, b] = parse_interval(interval);
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw chk::DomainError("interval needs finite a < b");
  const auto d = chk::nystrom_eig(s, a, b, nodes);
  std::ofstream f(out_path);
  if (!f) throw UsageError("cannot open '" + out_path + "' for writing");
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    const auto c = chk::sample(d, seed + static_cast<std::uint64_t>(i));
    total += static_cast<double>(c.points.size());
    f << chk::to_jsonl(c) << "\n";
  }
  std::cout << "{\"count\":" << count << ",\"mean_points\":" << num(total / count)
            << ",\"expected\":" << num(d.raw_trace) << ",\"clip_norm\":" << num(d.clip_norm) << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confluent hypergeometric kernel toolkit"};
  app.require_subcommand(1);

  std::string s_text = "0";
  double x = 0.0;
  std::optional<double> y;
  std::string what;
  auto* ev = app.add_subcommand("eval", "evaluate one quantity");
  ev->add_option("--s", s_text, "spectral parameter, e.g. 0.3+0.7i")->required();
  ev->add_option("--x", x, "point (angle for --what weight)")->required();
  ev->add_option("--y", y, "second point for --what kernel");
  ev->add_option("--what", what)->required()->check(CLI::IsMember({"kernel", "tcal", "rho", "psi", "z", "weight"}));

  std::string suite, level = "fast";
  auto* ve = app.add_subcommand("verify", "run a suite of checks");
  ve->add_option("--suite", suite)->required()->check(CLI::IsMember(chk::suite_names()));
  ve->add_option("--s", s_text, "spectral parameter");
  ve->add_option("--level", level)->check(CLI::IsMember({"fast", "full"}));

  std::string target, n_list;
  std::optional<double> ceiling;
  auto* co = app.add_subcommand("converge", "convergence study as CSV");
  co->add_option("--target", target)->required()->check(CLI::IsMember({"bnr", "ker-conv", "unit-norm"}));
  co->add_option("--s", s_text, "spectral parameter");
  co->add_option("--n-list", n_list, "ascending list, 64,256 or 1..8")->required();
  co->add_option("--ceiling", ceiling, "largest acceptable final error");

  int n = 0;
  std::string grid, out;
  bool check = false;
  auto* ba = app.add_subcommand("basis", "sample L_n to CSV");
  ba->add_option("--s", s_text, "spectral parameter");
  ba->add_option("--n", n)->required()->check(CLI::Range(0, 8));
  ba->add_option("--grid", grid, "a:b:count")->required();
  ba->add_option("--out", out)->required();
  ba->add_flag("--check", check, "also emit the closed-form route and its agreement");

  std::string interval;
  int nodes = 400, count = 1;
  std::uint64_t seed = 0;
  auto* sa = app.add_subcommand("sample", "draw point configurations as JSON lines");
  sa->add_option("--s", s_text, "spectral parameter");
  sa->add_option("--interval", interval, "a:b")->required();
  sa->add_option("--nodes", nodes)->check(CLI::Range(16, 1 << 14));
  sa->add_option("--count", count)->required()->check(CLI::Range(1, 1 << 24));
  sa->add_option("--seed", seed);
  sa->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ev) return cmd_eval(s_text, x, y, what);
    if (*ve) return cmd_verify(suite, s_text, level);
    if (*co) return cmd_converge(target, s_text, n_list, ceiling);
    if (*ba) return cmd_basis(s_text, n, grid, out, check);
    if (*sa) return cmd_sample(s_text, interval, nodes, count, seed, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const chk::Error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
