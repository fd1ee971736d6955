#include "matryoshka/cli.hpp"

#include <set>
#include <vector>

#include <CLI11.hpp>

#include "matryoshka/document.hpp"
#include "matryoshka/error.hpp"

namespace matryoshka {

using nlohmann::json;

namespace {

/// An Error tagged with the command-line flag it came from.
struct FlagError {
  std::string flag;
  Error error;
};

template <typename F>
auto with_flag(const std::string& flag, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw FlagError{flag, e};
  }
}

class Params {
 public:
  Params(std::map<std::string, double> values, std::string family)
      : values_(std::move(values)), family_(std::move(family)) {}

  double required(const std::string& key) {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) {
      throw Error(ErrorKind::InvalidInput, "missing parameter '" + key + "' for " + family_);
    }
    return it->second;
  }

  double optional(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (!used_.count(key)) {
        throw Error(ErrorKind::InvalidInput, "unknown parameter '" + key + "' for " + family_);
      }
    }
  }

 private:
  std::map<std::string, double> values_;
  std::string family_;
  std::set<std::string> used_;
};

JumpMomentSpec descriptor(const std::string& flag, const std::string& text,
                          const JumpMomentSpec& fallback) {
  if (text.empty()) return fallback;
  return with_flag(flag, [&] { return JumpMomentSpec::parse(text); });
}

void forbid(const std::string& flag, const std::string& text, const std::string& family) {
  if (!text.empty()) {
    throw FlagError{flag, Error(ErrorKind::InvalidInput, "not used by process " + family)};
  }
}

json describe(const ProcessSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HawkesSpec>) {
          return {{"lambda-star", s.baseline}, {"alpha", s.jump}, {"beta", s.decay}, {"x0", s.initial}};
        } else if constexpr (std::is_same_v<T, ShotNoiseSpec>) {
          return {{"lambda", s.rate}, {"beta", s.decay}, {"x0", s.initial}, {"jumps", s.jumps.describe()}};
        } else if constexpr (std::is_same_v<T, ItoSpec>) {
          return {{"mu", s.drift_intercept}, {"theta", s.drift_slope}, {"sigma", s.volatility},
                  {"gamma", s.gamma}, {"x0", s.initial}};
        } else if constexpr (std::is_same_v<T, GrowthCollapseSpec>) {
          return {{"lambda", s.growth}, {"mu", s.collapse_rate}, {"x0", s.initial},
                  {"collapse", s.collapse_fraction.describe()}};
        } else if constexpr (std::is_same_v<T, EphemeralSpec>) {
          return {{"nu-star", s.baseline}, {"alpha", s.jump}, {"mu", s.expiry}, {"x0", s.initial}};
        } else {
          json out = {{"x0", s.initial}, {"jumps-A", s.up.describe()},
                      {"jumps-B", s.down.describe()}, {"jumps-C", s.collapse.describe()}};
          for (std::size_t i = 0; i < s.coefficients.size(); ++i) {
            out["a" + std::to_string(i)] = s.coefficients[i];
          }
          return out;
        }
      },
      spec);
}

/// Maps a builder or solver error to the flag most likely responsible.
std::string flag_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "--order";
    case ErrorKind::InsufficientMoments: return "--jumps";
    default: return "--params";
  }
}

struct Common {
  ProcessArgs process;
  std::size_t order = 1;
  double time = 0.0;
};

void add_process_options(CLI::App* sub, Common& c) {
  sub->add_option("--process", c.process.process, "Process family")
      ->required()
      ->check(CLI::IsMember({"hawkes", "shotnoise", "ito", "growthcollapse", "ephemeral", "generic"}));
  sub->add_option("--params", c.process.params, "Parameters as k=v,k=v");
  sub->add_option("--jumps", c.process.jumps, "Shot noise jump distribution");
  sub->add_option("--collapse", c.process.collapse, "Growth-collapse fraction distribution");
  sub->add_option("--jumps-A", c.process.jumps_a, "Generic up-jump distribution");
  sub->add_option("--jumps-B", c.process.jumps_b, "Generic down-jump distribution");
  sub->add_option("--jumps-C", c.process.jumps_c, "Generic collapse-factor distribution");
  sub->add_option("--order", c.order, "Highest moment order")->required()->check(CLI::PositiveNumber);
}

OutputDocument base_document(const std::string& command, const ProcessSpec& spec, const Common& c,
                             bool timed) {
  OutputDocument doc;
  doc.metadata = {{"tool", "matryoshka"},
                  {"version", kToolVersion},
                  {"command", command},
                  {"process", family_name(spec)},
                  {"parameters", describe(spec)},
                  {"order", c.order},
                  {"time", timed ? json(c.time) : json(nullptr)}};
  return doc;
}

BuiltSystem build_for(const ProcessSpec& spec, std::size_t order, std::ostream& err) {
  try {
    auto built = build(spec, order);
    for (const auto& w : built.warnings) err << "warning: " << w << "\n";
    return built;
  } catch (const Error& e) {
    throw FlagError{flag_for(e.kind()), e};
  }
}

void write(const OutputDocument& doc, const std::string& format, std::ostream& out) {
  if (format == "csv") out << to_csv_text(to_csv_table(doc));
  else if (format == "table") out << to_bench_table(doc);
  else out << to_json_text(doc);
}

}  // namespace

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string entry =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::InvalidInput, "expected key=value, got '" + entry + "'");
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (value.empty() || used != value.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidInput, "parameter '" + key + "' has bad value '" + value + "'");
    }
    if (!out.emplace(key, v).second) {
      throw Error(ErrorKind::InvalidInput, "parameter '" + key + "' given twice");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

ProcessSpec make_process(const ProcessArgs& args) {
  const std::string& family = args.process;
  Params p(with_flag("--params", [&] { return parse_params(args.params); }), family);
  auto params = [&](auto&& f) { return with_flag("--params", f); };

  ProcessSpec spec;
  if (family != "shotnoise") forbid("--jumps", args.jumps, family);
  if (family != "growthcollapse") forbid("--collapse", args.collapse, family);
  if (family != "generic") {
    forbid("--jumps-A", args.jumps_a, family);
    forbid("--jumps-B", args.jumps_b, family);
    forbid("--jumps-C", args.jumps_c, family);
  }

  if (family == "hawkes") {
    spec = params([&] {
      HawkesSpec s;
      s.baseline = p.required("lambda-star");
      s.jump = p.required("alpha");
      s.decay = p.required("beta");
      s.initial = p.optional("x0", s.baseline);
      return s;
    });
  } else if (family == "shotnoise") {
    ShotNoiseSpec s = params([&] {
      ShotNoiseSpec s;
      s.rate = p.required("lambda");
      s.decay = p.required("beta");
      s.initial = p.optional("x0", 0.0);
      return s;
    });
    s.jumps = descriptor("--jumps", args.jumps, s.jumps);
    spec = s;
  } else if (family == "ito") {
    spec = params([&] {
      ItoSpec s;
      s.drift_intercept = p.required("mu");
      s.drift_slope = p.required("theta");
      s.volatility = p.required("sigma");
      s.gamma = p.required("gamma");
      s.initial = p.optional("x0", 0.0);
      return s;
    });
  } else if (family == "growthcollapse") {
    GrowthCollapseSpec s = params([&] {
      GrowthCollapseSpec s;
      s.growth = p.required("lambda");
      s.collapse_rate = p.required("mu");
      s.initial = p.optional("x0", 0.0);
      return s;
    });
    s.collapse_fraction = descriptor("--collapse", args.collapse, s.collapse_fraction);
    spec = s;
  } else if (family == "ephemeral") {
    spec = params([&] {
      EphemeralSpec s;
      s.baseline = p.required("nu-star");
      s.jump = p.required("alpha");
      s.expiry = p.required("mu");
      s.initial = p.optional("x0", 0.0);
      return s;
    });
  } else if (family == "generic") {
    GenericGeneratorSpec s = params([&] {
      GenericGeneratorSpec s;
      for (std::size_t i = 0; i < s.coefficients.size(); ++i) {
        s.coefficients[i] = p.optional("a" + std::to_string(i), 0.0);
      }
      s.initial = p.optional("x0", 0.0);
      return s;
    });
    s.up = descriptor("--jumps-A", args.jumps_a, s.up);
    s.down = descriptor("--jumps-B", args.jumps_b, s.down);
    s.collapse = descriptor("--jumps-C", args.jumps_c, s.collapse);
    spec = s;
  } else {
    throw FlagError{"--process", Error(ErrorKind::InvalidInput, "unknown process '" + family + "'")};
  }
  params([&] {
    p.reject_unknown();
    return 0;
  });
  return spec;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form moments of Markov processes with nested triangular moment systems",
               "matryoshka"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common c;
  std::string moments_format = "json";
  std::string steady_format = "json";
  std::string bench_format = "table";
  std::string sim_format = "json";
  std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
  std::size_t trials = 20;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double sim_step = 1e-3;

  auto* moments = app.add_subcommand("moments", "Transient moments E[X_t^k], k = 1..N");
  add_process_options(moments, c);
  moments->add_option("--time", c.time, "Time point")->required()->check(CLI::NonNegativeNumber);
  moments->add_option("--format", moments_format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* steady = app.add_subcommand("steady", "Stationary moments");
  add_process_options(steady, c);
  steady->add_option("--format", steady_format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* bench_cmd = app.add_subcommand("bench", "Closed form against explicit Euler");
  add_process_options(bench_cmd, c);
  bench_cmd->add_option("--time", c.time, "Time point")->required()->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--deltas", deltas, "Euler step sizes")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--trials", trials, "Timed repetitions")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--format", bench_format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));

  auto* sim = app.add_subcommand("simulate", "Monte Carlo moment estimates");
  add_process_options(sim, c);
  sim->add_option("--time", c.time, "Time point")->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--paths", paths, "Number of paths")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--sim-step", sim_step, "Discretization step for diffusions")
      ->check(CLI::PositiveNumber);
  sim->add_option("--format", sim_format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    const ProcessSpec spec = make_process(c.process);
    const auto built = build_for(spec, c.order, err);

    if (moments->parsed()) {
      auto doc = base_document("moments", spec, c, true);
      doc.payload = moments_payload(transient_vector(built.system, built.init, c.time));
      write(doc, moments_format, out);
    } else if (steady->parsed()) {
      auto doc = base_document("steady", spec, c, false);
      doc.payload = moments_payload(steady_vector(built.system));
      write(doc, steady_format, out);
    } else if (bench_cmd->parsed()) {
      auto doc = base_document("bench", spec, c, true);
      doc.metadata["deltas"] = deltas;
      doc.metadata["trials"] = trials;
      doc.payload = bench_payload(bench(built.system, built.init, c.time, c.order, deltas, trials));
      write(doc, bench_format, out);
    } else {
      const SimConfig cfg{paths, c.time, seed, sim_step};
      auto doc = base_document("simulate", spec, c, true);
      doc.metadata["paths"] = paths;
      doc.metadata["seed"] = seed;
      doc.metadata["sim_step"] = sim_step;
      const auto terminals = simulate(spec, cfg);
      const auto report = estimate_moments(terminals, c.order);
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      doc.payload = simulate_payload(report);
      write(doc, sim_format, out);
    }
  } catch (const FlagError& e) {
    err << "error: " << e.flag << ": " << e.error.what() << "\n";
    return e.error.is_numerical() ? kExitNumerical : kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_numerical() ? kExitNumerical : kExitInvalid;
  }
  return kExitOk;
}

}  // namespace matryoshka
