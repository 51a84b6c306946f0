// oppsched: optimal ordering of sequential stochastic opportunities.
//
// Subcommands: validate, evaluate, solve, frontier, enumerate, simulate,
// curves. Exit codes: 0 success, 1 domain error (single machine-parsable
// line "error: Name: detail" on stderr), 2 usage error.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oppsched/analytics.hpp"
#include "oppsched/kernels.hpp"
#include "oppsched/model.hpp"
#include "oppsched/simulate.hpp"
#include "oppsched/solver.hpp"

namespace {

struct CommonOpts {
  std::string input;
  std::string format = "auto";
  std::string output;
  int precision = 6;
  int threads = 1;
  std::string kernel = "auto";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("input", opts.input, "instance file (CSV or JSON; '-' for stdin)")->required();
  cmd->add_option("--format", opts.format, "input format")
      ->check(CLI::IsMember({"auto", "csv", "json"}))
      ->capture_default_str();
  cmd->add_option("-o,--output", opts.output, "output file (default: stdout)");
  cmd->add_option("--precision", opts.precision, "significant digits for printed numbers")
      ->check(CLI::Range(1, 17))
      ->capture_default_str();
  cmd->add_option("--threads", opts.threads, "worker threads for enumeration/simulation")
      ->check(CLI::Range(1, 256))
      ->envname("OPPSCHED_THREADS")
      ->capture_default_str();
  cmd->add_option("--kernel", opts.kernel, "schedule-evaluation kernel")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();
}

// Returns 2-style usage failure by throwing CLI::ValidationError before the
// domain code runs.
void apply_kernel_choice(const std::string& kernel) {
  using oppsched::kernels::Isa;
  if (kernel == "auto") return;
  const Isa isa = kernel == "avx2" ? Isa::avx2 : Isa::scalar;
  if (!oppsched::kernels::select_isa(isa))
    throw CLI::ValidationError("--kernel", kernel + " is not supported on this host");
}

oppsched::Instance load_instance(const CommonOpts& opts) {
  std::optional<oppsched::FileFormat> fmt;
  if (opts.format == "csv") fmt = oppsched::FileFormat::csv;
  if (opts.format == "json") fmt = oppsched::FileFormat::json;
  if (opts.input == "-") {
    if (!fmt) throw CLI::ValidationError("--format", "stdin input needs an explicit format");
    return *fmt == oppsched::FileFormat::json ? oppsched::parse_instance_json(std::cin)
                                              : oppsched::parse_instance_csv(std::cin);
  }
  if (std::ifstream probe(opts.input); !probe)
    throw CLI::ValidationError("input", "cannot read '" + opts.input + "'");
  return oppsched::parse_instance_file(opts.input, fmt);
}

class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw CLI::ValidationError("--output", "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt_g(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

void print_evaluated(std::ostream& out, const oppsched::EvaluatedSchedule& ev, int precision) {
  out << "schedule " << ev.schedule.to_string() << '\n'
      << "eta " << fmt_g(ev.eta, precision) << '\n'
      << "expected_reward " << fmt_g(ev.expected_reward, precision) << '\n'
      << "expected_finish_time " << fmt_g(ev.expected_finish_time, precision) << '\n'
      << "objective " << fmt_g(ev.objective, precision) << '\n';
}

std::vector<double> parse_time_list(const std::string& text) {
  std::vector<double> ts;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string tok = text.substr(pos, comma - pos);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      oppsched::fail(oppsched::Errc::parse_error, "bad time value '" + tok + "'");
    ts.push_back(v);
    if (comma == text.size()) break;
    pos = comma + 1;
  }
  return ts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal ordering of sequential stochastic opportunities"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* validate = app.add_subcommand("validate", "check an instance file and print it normalized");
  add_common(validate, opts);

  auto* evaluate = app.add_subcommand("evaluate", "expected reward/finish time of one schedule");
  add_common(evaluate, opts);
  std::string schedule_text;
  double eta = 0.0;
  evaluate->add_option("--schedule", schedule_text, "1-based dashed order, e.g. 4-1-5-2-3")
      ->required();
  evaluate->add_option("--eta", eta, "tradeoff weight (>= 0)")->required();

  auto* solve = app.add_subcommand("solve", "optimal schedule for J = reward - eta * time");
  add_common(solve, opts);
  solve->add_option("--eta", eta, "tradeoff weight (>= 0)")->required();

  auto* frontier = app.add_subcommand("frontier", "tradeoff frontier over an eta grid (CSV)");
  add_common(frontier, opts);
  double eta_min = 0.0, eta_max = 0.0;
  int32_t steps = 1;
  frontier->add_option("--eta-min", eta_min, "grid start")->required();
  frontier->add_option("--eta-max", eta_max, "grid end")->required();
  frontier->add_option("--steps", steps, "number of grid points (inclusive ends)")->required();

  auto* enumerate = app.add_subcommand("enumerate", "all n! schedules with Pareto flags (CSV)");
  add_common(enumerate, opts);
  int32_t max_n = oppsched::kBruteForceCap;
  enumerate->add_option("--max-n", max_n, "enumeration size cap")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of one schedule (JSON)");
  add_common(simulate, opts);
  int64_t replications = 0;
  uint64_t seed = 0;
  simulate->add_option("--schedule", schedule_text, "1-based dashed order")->required();
  simulate->add_option("--replications", replications, "independent plays")->required();
  simulate->add_option("--seed", seed, "random seed")->envname("OPPSCHED_SEED")
      ->capture_default_str();

  auto* curves = app.add_subcommand("curves", "reward/finish-time curves over a time grid (CSV)");
  add_common(curves, opts);
  std::string times_text;
  double t_max = 0.0;
  int32_t t_points = 50;
  bool exact = false;
  curves->add_option("--schedule", schedule_text, "1-based dashed order")->required();
  auto* times_opt = curves->add_option("--times", times_text, "comma-separated time grid");
  auto* tmax_opt =
      curves->add_option("--t-max", t_max, "uniform grid end (0..t-max)")->excludes(times_opt);
  curves->add_option("--t-points", t_points, "uniform grid size")
      ->needs(tmax_opt)
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  curves->add_flag("--exact", exact, "closed-form curves (Deterministic instances only)");
  auto* reps_opt = curves->add_option("--replications", replications, "plays for empirical curves");
  curves->add_option("--seed", seed, "random seed")->envname("OPPSCHED_SEED")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (curves->parsed()) {
      if (!*times_opt && !*tmax_opt)
        throw CLI::ValidationError("--times", "give --times or --t-max");
      if (!exact && !*reps_opt)
        throw CLI::ValidationError("--replications", "empirical curves need --replications");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_kernel_choice(opts.kernel);
    const oppsched::Instance inst = load_instance(opts);
    OutputTarget target(opts.output);
    std::ostream& out = target.stream();

    if (validate->parsed()) {
      oppsched::serialize_instance_csv(inst, out);
    } else if (evaluate->parsed()) {
      const auto sched = oppsched::Schedule::parse(schedule_text);
      print_evaluated(out, oppsched::evaluate(inst, sched, eta), opts.precision);
    } else if (solve->parsed()) {
      print_evaluated(out, oppsched::solve(inst, eta), opts.precision);
    } else if (frontier->parsed()) {
      const auto points = oppsched::frontier_sweep(inst, eta_min, eta_max, steps);
      oppsched::write_frontier_csv(out, points, opts.precision);
    } else if (enumerate->parsed()) {
      const auto cloud = oppsched::enumerate_cloud(inst, max_n, opts.threads);
      std::vector<oppsched::TradeoffPoint> pts;
      pts.reserve(cloud.size());
      for (const auto& c : cloud) pts.push_back({c.expected_finish_time, c.expected_reward});
      const auto front = oppsched::pareto_filter(pts);
      std::vector<std::pair<double, double>> kept;
      kept.reserve(front.size());
      for (const auto& f : front) kept.emplace_back(f.expected_finish_time, f.expected_reward);
      out << "schedule,expected_reward,expected_finish_time,pareto\n";
      for (const auto& c : cloud) {
        const bool on_front = std::binary_search(
            kept.begin(), kept.end(),
            std::make_pair(c.expected_finish_time, c.expected_reward));
        out << c.schedule.to_string() << ',' << fmt_g(c.expected_reward, opts.precision) << ','
            << fmt_g(c.expected_finish_time, opts.precision) << ',' << (on_front ? 1 : 0) << '\n';
      }
    } else if (simulate->parsed()) {
      const auto sched = oppsched::Schedule::parse(schedule_text);
      const auto summary = oppsched::simulate(inst, sched, replications, seed, opts.threads);
      oppsched::write_summary_json(out, summary, sched, seed);
    } else if (curves->parsed()) {
      const auto sched = oppsched::Schedule::parse(schedule_text);
      std::vector<double> ts;
      if (!times_text.empty()) {
        ts = parse_time_list(times_text);
      } else {
        for (int32_t i = 0; i < t_points; ++i)
          ts.push_back(t_points > 1 ? t_max * static_cast<double>(i) /
                                          static_cast<double>(t_points - 1)
                                    : t_max);
      }
      const auto points = exact ? oppsched::time_curves(inst, sched, ts)
                                : oppsched::empirical_curves(inst, sched, ts, replications, seed,
                                                             opts.threads);
      oppsched::write_curves_csv(out, points, opts.precision);
    }
    return 0;
  } catch (const CLI::ValidationError& e) {
    std::cerr << app.get_name() << ": " << e.what() << '\n';
    return 2;
  } catch (const oppsched::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 1;
  }
}
