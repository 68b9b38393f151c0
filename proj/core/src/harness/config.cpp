#include "isotropy/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "isotropy/format.hpp"

namespace isotropy::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("config: bad value for '" + key + "': '" + text + "'");
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  const double v = parse_number<double>(key, text);
  if (!std::isfinite(v)) throw ConfigError("config: non-finite value for '" + key + "'");
  return v;
}

template <class T>
std::vector<T> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<T>(key, item));
      continue;
    }
    const T lo = parse_number<T>(key, trim(item.substr(0, dots)));
    const T hi = parse_number<T>(key, trim(item.substr(dots + 2)));
    if (hi < lo) throw ConfigError("config: empty range in '" + key + "'");
    if (hi - lo > 1'000'000) throw ConfigError("config: range too long in '" + key + "'");
    for (T v = lo;; ++v) {
      out.push_back(v);
      if (v == hi) break;
    }
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Whiten: return "whiten";
    case ExperimentKind::Truncated: return "truncated";
    case ExperimentKind::JohnSparsify: return "john-sparsify";
    case ExperimentKind::Bernoulli: return "bernoulli";
    case ExperimentKind::Check: return "check";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (auto k : {ExperimentKind::Sweep, ExperimentKind::Whiten, ExperimentKind::Truncated,
                 ExperimentKind::JohnSparsify, ExperimentKind::Bernoulli, ExperimentKind::Check})
    if (to_string(k) == name) return k;
  throw ConfigError("config: unknown experiment kind '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (n == 0) throw ConfigError("config: n must be positive");
  if (seeds.empty()) throw ConfigError("config: seeds must be nonempty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("config: seeds must be distinct");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("config: eps must lie in (0, 1)");
  if (!(r > 0.0)) throw ConfigError("config: R must be positive");
  if (!(c > 0.0) || !(c0 > 0.0)) throw ConfigError("config: C and C0 must be positive");
  if (trials == 0) throw ConfigError("config: trials must be positive");
  if (max_attempts < 1) throw ConfigError("config: max_attempts must be at least 1");
  if (threads == 0) throw ConfigError("config: threads must be positive");
  const bool needs_grid = kind == ExperimentKind::Sweep || kind == ExperimentKind::Whiten ||
                          kind == ExperimentKind::Bernoulli;
  if (needs_grid && m_grid.empty()) throw ConfigError("config: M grid must be nonempty");
  if (std::any_of(m_grid.begin(), m_grid.end(), [](std::size_t m) { return m == 0; }))
    throw ConfigError("config: M values must be positive");
  if (!distortion.empty() && distortion.size() != n)
    throw ConfigError("config: distortion must have n entries");
  if (std::any_of(distortion.begin(), distortion.end(), [](double d) { return !(d > 0.0); }))
    throw ConfigError("config: distortion entries must be positive");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::Sweep:
      cfg.source = "cube";
      cfg.n = 8;
      cfg.m_grid = {256, 1024, 4096, 16384};
      cfg.seeds = parse_int_list<std::uint64_t>("seeds", "0..9");
      break;
    case ExperimentKind::Whiten:
      cfg.source = "cube";
      cfg.n = 8;
      cfg.m_grid = {100000};
      cfg.seeds = parse_int_list<std::uint64_t>("seeds", "0..9");
      cfg.eps = 0.1;
      cfg.distortion = {2, 1, 1, 1, 1, 1, 1, 0.5};
      break;
    case ExperimentKind::Truncated:
      cfg.source = "cube";
      cfg.n = 16;
      cfg.r = 1.0;
      cfg.eps = 0.2;
      cfg.c0 = 100.0;
      cfg.seeds = parse_int_list<std::uint64_t>("seeds", "0..4");
      break;
    case ExperimentKind::JohnSparsify:
      cfg.source = "john:simplex";
      cfg.n = 4;
      cfg.eps = 0.25;
      cfg.c = 2.0;
      cfg.max_attempts = 16;
      cfg.seeds = parse_int_list<std::uint64_t>("seeds", "0..99");
      break;
    case ExperimentKind::Bernoulli:
      cfg.source = "cube";
      cfg.n = 8;
      cfg.m_grid = {8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
      cfg.seeds = {0};
      cfg.trials = 1000;
      break;
    case ExperimentKind::Check:
      cfg.seeds = {0};
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg) {
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ConfigError("config: line " + std::to_string(line_no) + ": duplicate key '" + key + "'");

    if (key == "kind") {
      if (parse_kind(value) != cfg.kind)
        throw ConfigError("config: kind '" + value + "' does not match subcommand '" + to_string(cfg.kind) + "'");
    } else if (key == "source") {
      cfg.source = value;
    } else if (key == "n") {
      cfg.n = parse_number<std::size_t>(key, value);
    } else if (key == "M") {
      cfg.m_grid = parse_int_list<std::size_t>(key, value);
    } else if (key == "seeds") {
      cfg.seeds = parse_int_list<std::uint64_t>(key, value);
    } else if (key == "eps") {
      cfg.eps = parse_real(key, value);
    } else if (key == "R") {
      cfg.r = parse_real(key, value);
    } else if (key == "C") {
      cfg.c = parse_real(key, value);
    } else if (key == "C0") {
      cfg.c0 = parse_real(key, value);
    } else if (key == "trials") {
      cfg.trials = parse_number<std::size_t>(key, value);
    } else if (key == "max_attempts") {
      cfg.max_attempts = parse_number<int>(key, value);
    } else if (key == "distortion") {
      cfg.distortion.clear();
      for (const auto& item : split(value, ',')) cfg.distortion.push_back(parse_real(key, item));
    } else if (key == "seed") {
      cfg.rng_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_number<std::size_t>(key, value);
    } else if (key == "save_dir") {
      cfg.save_dir = value;
    } else {
      throw ConfigError("config: line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in, std::move(base));
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "kind=" << to_string(cfg.kind) << '\n'
      << "source=" << cfg.source << '\n'
      << "n=" << cfg.n << '\n';
  if (!cfg.m_grid.empty()) out << "M=" << join(cfg.m_grid) << '\n';
  out << "seeds=" << join(cfg.seeds) << '\n'
      << "eps=" << format_double(cfg.eps) << '\n'
      << "R=" << format_double(cfg.r) << '\n'
      << "C=" << format_double(cfg.c) << '\n'
      << "C0=" << format_double(cfg.c0) << '\n'
      << "trials=" << cfg.trials << '\n'
      << "max_attempts=" << cfg.max_attempts << '\n';
  if (!cfg.distortion.empty()) out << "distortion=" << join(cfg.distortion) << '\n';
  out << "seed=" << cfg.rng_seed << '\n' << "threads=" << cfg.threads << '\n';
  if (!cfg.save_dir.empty()) out << "save_dir=" << cfg.save_dir << '\n';
  return out.str();
}

}  // namespace isotropy::harness
