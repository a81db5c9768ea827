#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "lapse/errors.hpp"
#include "lapse/eval.hpp"
#include "lapse/multi_video.hpp"
#include "lapse/panorama.hpp"
#include "lapse/plan_io.hpp"
#include "lapse/sampling.hpp"
#include "lapse/synthetic.hpp"
#include "lapse/trace_io.hpp"

namespace lapse::cli {

namespace {

struct Flags {
  std::vector<std::string> traces;
  std::vector<std::string> corr;
  std::string plan;
  std::string out;
  std::string report;
  std::string epipole_csv;

  double speedup = 10.0;
  int tau = 100;
  int dstart = 120;
  int dend = 120;
  std::optional<double> alpha, beta, gamma, c, alpha2, kflow;
  std::string solver = "dag";

  int omega = 50;
  double lambda = 15.0;
  std::string fov_sign = "deficit";
  double cross_mult = 2.0;
  std::string timeline = "correspondence";

  int baseline_skip = 10;
  std::string denominator = "plan";

  std::string kind = "oscillate";
  int n = 1000;
  int period = 10;
  int phase = 0;
  double noise = 0.0;
  std::uint64_t seed = 7;
  std::string video_id = "synth";
  std::optional<int> offset;
  std::string out_b;
  std::string corr_out;
};

// Bad flag values found after parsing.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void write_or_print(const std::string& path, const std::string& text,
                    std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

Solver solver_of(const Flags& f) {
  return f.solver == "dijkstra" ? Solver::kDijkstra : Solver::kDagDp;
}

EvalOptions eval_options(const Flags& f) {
  EvalOptions o;
  o.baseline_skip = f.baseline_skip;
  o.denominator = f.denominator == "baseline"
                      ? ImprovementDenominator::kBaseline
                      : ImprovementDenominator::kPlan;
  return o;
}

void apply_overrides(const Flags& f, CostWeights& w) {
  if (f.alpha) w.alpha = *f.alpha;
  if (f.beta) w.beta = *f.beta;
  if (f.gamma) w.gamma = *f.gamma;
  if (f.c) w.foe_penalty = *f.c;
  if (f.kflow) w.k_flow = *f.kflow;
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(w.k_flow > 0)) throw UsageError("k_flow must be positive");
}

const MotionTrace& single(const std::vector<MotionTrace>& traces) {
  if (traces.size() != 1) throw UsageError("expected exactly one --trace");
  return traces.front();
}

std::vector<MotionTrace> load_traces(const Flags& f) {
  std::vector<MotionTrace> traces;
  for (const auto& p : f.traces) traces.push_back(load_trace(p));
  return traces;
}

int run_sample(const Flags& f, bool second_order, std::ostream& out) {
  Stopwatch clock;
  const std::vector<MotionTrace> traces = load_traces(f);
  const MotionTrace& trace = single(traces);
  const double t_load = clock.lap();

  GraphSpec spec;
  spec.n = trace.frame_count();
  spec.tau = std::min(f.tau, spec.n - 1);
  spec.d_start = std::min(f.dstart, spec.n);
  spec.d_end = std::min(f.dend, spec.n);
  spec.weights = CostWeights::for_trace(trace, f.speedup);
  apply_overrides(f, spec.weights);
  spec.solver = solver_of(f);
  spec.alpha2 = f.alpha2;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const SamplingPlan plan = second_order ? solve_second_order(trace, spec)
                                         : solve_first_order(trace, spec);
  const double t_solve = clock.lap();

  EvalReport report = eval_plan(trace, plan, eval_options(f));
  report.runtime_ms = {{"load", t_load}, {"solve", t_solve},
                       {"eval", clock.lap()}};
  write_or_print(f.out, format_sampling_plan(plan), out);
  if (!f.report.empty()) write_or_print(f.report, format_report(report), out);
  if (!f.epipole_csv.empty()) {
    write_or_print(f.epipole_csv, epipole_csv(trace, plan.selected), out);
  }
  if (!f.out.empty()) {
    out << plan.selected.size() << " frames selected, median skip "
        << report.median_skip << ", total cost " << plan.total_cost << "\n";
  }
  return 0;
}

PanoramaSamplingOptions sampling_options(const Flags& f, int n) {
  PanoramaSamplingOptions s;
  s.tau = f.tau;
  s.d_start = std::min(f.dstart, n);
  s.d_end = std::min(f.dend, n);
  s.fov_mode = f.fov_sign == "literal" ? FovMode::kLiteral : FovMode::kDeficit;
  s.solver = solver_of(f);
  return s;
}

CostWeights panorama_weights(const Flags& f, const MotionTrace& trace) {
  CostWeights w = PanoramaPlanOptions{}.weights;
  w.k_flow = f.speedup * trace.avg_flow();
  apply_overrides(f, w);
  return w;
}

int run_pano(const Flags& f, std::ostream& out) {
  Stopwatch clock;
  const std::vector<MotionTrace> traces = load_traces(f);
  const MotionTrace& trace = single(traces);
  const double t_load = clock.lap();

  PanoramaPlanOptions options;
  options.omega = f.omega;
  options.lambda = f.lambda;
  options.weights = panorama_weights(f, trace);
  options.sampling = sampling_options(f, trace.frame_count());
  const PanoramaPlan plan = plan_panoramas(trace, options);
  const double t_solve = clock.lap();

  EvalReport report = eval_panorama_plan(trace, plan, eval_options(f));
  report.runtime_ms = {{"load", t_load}, {"plan", t_solve},
                       {"eval", clock.lap()}};
  write_or_print(f.out, format_panorama_plan(plan), out);
  if (!f.report.empty()) write_or_print(f.report, format_report(report), out);
  if (!f.out.empty()) {
    out << plan.selected.size() << " panoramas selected out of "
        << plan.panoramas.size() << ", crop " << plan.crop_width << "x"
        << plan.crop_height << "\n";
  }
  return 0;
}

int run_multi(const Flags& f, std::ostream& out) {
  Stopwatch clock;
  const std::vector<MotionTrace> traces = load_traces(f);
  if (traces.empty()) throw UsageError("at least one --trace is required");
  std::vector<RawCorrespondence> raw;
  for (const auto& p : f.corr) {
    for (auto& pair : load_correspondences(p)) raw.push_back(std::move(pair));
  }
  const CorrespondenceTable table = finalize_correspondences(raw);
  const double t_load = clock.lap();

  int n_max = 0;
  for (const auto& t : traces) n_max = std::max(n_max, t.frame_count());
  MultiPlanOptions options;
  options.omega = f.omega;
  options.lambda = f.lambda;
  options.weights = panorama_weights(f, traces.front());
  options.sampling.sampling = sampling_options(f, n_max);
  options.sampling.cross_multiplier = f.cross_mult;
  options.sampling.timeline = f.timeline == "timestamp"
                                  ? Timeline::kTimestamp
                                  : Timeline::kCorrespondence;
  const PanoramaPlan plan = plan_multi_panoramas(traces, table, options);
  const double t_solve = clock.lap();

  write_or_print(f.out, format_panorama_plan(plan), out);
  int switches = 0;
  for (std::size_t k = 1; k < plan.selected.size(); ++k) {
    switches += plan.panoramas[plan.selected[k]].video !=
                plan.panoramas[plan.selected[k - 1]].video;
  }
  if (!f.report.empty()) {
    nlohmann::json doc;
    double crop_area = 0.0;
    for (const CropWindow& c : plan.crop) crop_area += c.width * c.height;
    const double frame_area = static_cast<double>(traces.front().width()) *
                              traces.front().height();
    doc["metrics"] = {
        {"selected", plan.selected.size()},
        {"switches", switches},
        {"fov_ratio_pct", plan.crop.empty() ? 0.0
                                            : 100.0 * crop_area /
                                                  plan.crop.size() /
                                                  frame_area}};
    doc["runtime_ms"] = {{"load", t_load}, {"plan", t_solve}};
    write_or_print(f.report, doc.dump(1) + "\n", out);
  }
  if (!f.out.empty()) {
    out << plan.selected.size() << " panoramas selected, " << switches
        << " video switches\n";
  }
  return 0;
}

int run_eval(const Flags& f, std::ostream& out) {
  Stopwatch clock;
  const std::vector<MotionTrace> traces = load_traces(f);
  const MotionTrace& trace = single(traces);
  std::ifstream in(f.plan);
  if (!in) throw ParseError("cannot open " + f.plan);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool panorama = text.find("\"panoramas\"") != std::string::npos;
  const double t_load = clock.lap();

  EvalReport report;
  std::vector<int> frames;
  if (panorama) {
    const PanoramaPlan plan = parse_panorama_plan(text);
    report = eval_panorama_plan(trace, plan, eval_options(f));
    for (std::size_t id : plan.selected) {
      frames.push_back(plan.panoramas[id].center);
    }
  } else {
    const SamplingPlan plan = parse_sampling_plan(text);
    report = eval_plan(trace, plan, eval_options(f));
    frames = plan.selected;
  }
  report.runtime_ms = {{"load", t_load}, {"eval", clock.lap()}};
  write_or_print(f.report.empty() ? f.out : f.report, format_report(report),
                 out);
  if (!f.epipole_csv.empty()) {
    write_or_print(f.epipole_csv, epipole_csv(trace, frames), out);
  }
  return 0;
}

int run_synth(const Flags& f, std::ostream& out) {
  SyntheticOptions o;
  const auto kind = parse_synthetic_kind(f.kind);
  if (!kind) throw UsageError("unknown kind " + f.kind);
  o.kind = *kind;
  o.n = f.n;
  o.max_skip = f.tau;
  o.period = f.period;
  o.phase = f.phase;
  o.noise = f.noise;
  o.seed = f.seed;
  o.video_id = f.video_id;
  try {
    if (!f.offset) {
      write_or_print(f.out, format_trace(make_synthetic_trace(o)), out);
      return 0;
    }
    if (f.out.empty() || f.out_b.empty() || f.corr_out.empty()) {
      throw UsageError("--offset needs --out, --out-b and --corr-out");
    }
    const SyntheticPair pair = make_synthetic_pair(o, *f.offset);
    save_trace(pair.a, f.out);
    save_trace(pair.b, f.out_b);
    save_correspondences(std::span<const RawCorrespondence>(&pair.raw, 1),
                         f.corr_out);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return 0;
}

void add_trace(CLI::App* cmd, Flags& f, bool many) {
  auto* opt = cmd->add_option("--trace", f.traces, "trace file")->required();
  if (!many) opt->expected(1);
}

void add_outputs(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "plan output (stdout when omitted)");
  cmd->add_option("--report", f.report, "JSON report output");
}

void add_eval(CLI::App* cmd, Flags& f) {
  cmd->add_option("--baseline-skip", f.baseline_skip,
                  "skip of the uniform baseline")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--improvement-denominator", f.denominator)
      ->check(CLI::IsMember({"plan", "baseline"}));
}

void add_graph(CLI::App* cmd, Flags& f) {
  cmd->add_option("--speedup", f.speedup, "k_flow = speedup * avg_flow")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tau", f.tau, "largest frame skip")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dstart", f.dstart, "source window")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dend", f.dend, "sink window")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", f.alpha, "shakiness weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--beta", f.beta, "velocity weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--gamma", f.gamma, "appearance or FOV weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--c", f.c, "FOE penalty")->check(CLI::Range(1.0, 1e300));
  cmd->add_option("--kflow", f.kflow, "explicit k_flow")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--solver", f.solver)
      ->check(CLI::IsMember({"dag", "dijkstra"}));
}

void add_panorama(CLI::App* cmd, Flags& f) {
  cmd->add_option("--omega", f.omega, "central-frame window")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "crop smoothness")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--fov-sign", f.fov_sign)
      ->check(CLI::IsMember({"deficit", "literal"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Flags f;
  CLI::App app{"hyperlapse frame and panorama planner", "lapse"};
  app.require_subcommand(1);

  auto* sample = app.add_subcommand("sample", "first-order frame sampling");
  auto* sample2 = app.add_subcommand("sample2", "second-order frame sampling");
  for (auto* cmd : {sample, sample2}) {
    add_trace(cmd, f, false);
    add_outputs(cmd, f);
    add_graph(cmd, f);
    add_eval(cmd, f);
    cmd->add_option("--epipole-csv", f.epipole_csv,
                    "per-transition motion directions");
  }
  sample2->add_option("--alpha2", f.alpha2, "epipole-change weight")
      ->check(CLI::NonNegativeNumber);

  auto* pano = app.add_subcommand("pano", "single-video panoramic hyperlapse");
  add_trace(pano, f, false);
  add_outputs(pano, f);
  add_graph(pano, f);
  add_panorama(pano, f);
  add_eval(pano, f);

  auto* multi = app.add_subcommand("multi", "multi-video panoramic hyperlapse");
  add_trace(multi, f, true);
  multi->add_option("--corr", f.corr, "raw correspondence file");
  add_outputs(multi, f);
  add_graph(multi, f);
  add_panorama(multi, f);
  multi->add_option("--cross-mult", f.cross_mult,
                    "cross-video multiplier (inf forbids switching)")
      ->check(CLI::Validator(
          [](std::string& s) -> std::string {
            double v = 0;
            if (!CLI::detail::lexical_cast(s, v) || !(v >= 0)) {
              return "cross-video multiplier must be >= 0 or inf";
            }
            return {};
          },
          "NONNEGATIVE"));
  multi->add_option("--timeline", f.timeline)
      ->check(CLI::IsMember({"correspondence", "timestamp"}));

  auto* eval = app.add_subcommand("eval", "metrics for an existing plan");
  add_trace(eval, f, false);
  eval->add_option("--plan", f.plan, "plan file")->required();
  add_outputs(eval, f);
  add_eval(eval, f);
  eval->add_option("--epipole-csv", f.epipole_csv,
                   "per-transition motion directions");

  auto* synth = app.add_subcommand("synth", "seeded synthetic traces");
  synth->add_option("--kind", f.kind)
      ->check(CLI::IsMember({"oscillate", "alternate", "driving", "random"}));
  synth->add_option("--n", f.n, "frame count")->check(CLI::Range(2, 1 << 30));
  synth->add_option("--tau", f.tau, "largest linked skip")
      ->check(CLI::PositiveNumber);
  synth->add_option("--period", f.period)->check(CLI::PositiveNumber);
  synth->add_option("--phase", f.phase);
  synth->add_option("--noise", f.noise)->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", f.seed);
  synth->add_option("--video-id", f.video_id);
  synth->add_option("--out", f.out, "trace output (stdout when omitted)");
  synth->add_option("--offset", f.offset,
                    "emit a second video shifted by this many frames");
  synth->add_option("--out-b", f.out_b, "second trace output");
  synth->add_option("--corr-out", f.corr_out, "correspondence output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sample->parsed()) return run_sample(f, false, out);
    if (sample2->parsed()) return run_sample(f, true, out);
    if (pano->parsed()) return run_pano(f, out);
    if (multi->parsed()) return run_multi(f, out);
    if (eval->parsed()) return run_eval(f, out);
    return run_synth(f, out);
  } catch (const std::invalid_argument& e) {
    err << "lapse: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "lapse: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace lapse::cli
