// tsketch: build, combine and query exact-sample sketches of turnstile streams.
//
// Exit codes: 0 success, 2 usage/input/format/compatibility errors,
// 3 counter overflow admission failure, 4 extraction or estimation failure.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tsketch/container.hpp"
#include "tsketch/errors.hpp"
#include "tsketch/sampler.hpp"
#include "tsketch/stats.hpp"
#include "tsketch/stream_file.hpp"

namespace {

using namespace tsketch;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kOverflow = 3;
constexpr int kEstimation = 4;

std::string decimal(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  u128 mag = neg ? u128{0} - static_cast<u128>(v) : static_cast<u128>(v);
  std::string s;
  while (mag != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
    mag /= 10;
  }
  if (neg) s.push_back('-');
  return {s.rbegin(), s.rend()};
}

// Shortest round-trip form, always with a decimal point or exponent.
std::string decimal(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ec == std::errc{} ? end : buf);
  if (s.find_first_of(".eE") == std::string::npos && s.find_first_of("0123456789") != std::string::npos) s += ".0";
  return s;
}

std::optional<i128> parse_i128(const std::string& text) {
  i64 v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

struct BuildArgs {
  std::string input;
  std::string model = "strict";
  std::string recovery = "frs";
  u64 k = 0;
  double delta = 0.1;
  std::optional<double> eps;
  u64 seed = SamplerConfig{}.seed;
  u64 m = SamplerConfig{}.universe;
  u64 r = SamplerConfig{}.max_count;
  u64 nmax = SamplerConfig{}.max_length;
  double lambda = SamplerConfig{}.lambda;
  double alpha = SamplerConfig{}.alpha;
  bool exact_l0 = false;
  std::string out;
};

int cmd_build(const BuildArgs& a) {
  SamplerConfig c;
  c.model = a.model == "strict" ? StreamModel::Strict : StreamModel::NonStrict;
  c.recovery = a.recovery == "frs" ? RecoveryKind::Frs : RecoveryKind::Efrs;
  if (c.recovery == RecoveryKind::Efrs && !a.eps) throw ConfigError("--eps is required with --recovery efrs");
  if (c.recovery == RecoveryKind::Frs && a.eps) throw ConfigError("--eps applies only to --recovery efrs");
  if (a.eps) c.epsilon = *a.eps;
  c.sample_size = a.k;
  c.delta = a.delta;
  c.seed = a.seed;
  c.universe = a.m;
  c.max_count = a.r;
  c.max_length = a.nmax;
  c.lambda = a.lambda;
  c.alpha = a.alpha;
  c.l0_kind = a.exact_l0 ? L0Kind::Exact : L0Kind::Amplified;

  SamplerSketch sketch(c);
  const StreamLimits limits{c.universe, c.max_count};
  auto sink = [&](const Update& u) { sketch.update(u); };
  if (a.input == "-") {
    read_stream(std::cin, limits, sink, "<stdin>");
  } else {
    std::ifstream in(a.input);
    if (!in) throw InputError("cannot open " + a.input);
    read_stream(in, limits, sink, a.input);
  }
  save(sketch, a.out);
  return kOk;
}

void write_sample(std::ostream& out, const Sample& s) {
  const auto& r = s.report;
  out << "# level\t" << (r.level ? std::to_string(*r.level) : std::string("none")) << '\n';
  out << "# l0_estimate\t" << decimal(r.l0_estimate) << '\n';
  out << "# size\t" << s.size() << '\n';
  if (r.level_clamped) out << "# warning\tlevel clamped\n";
  if (r.all_levels) out << "# warning\tall levels recovered\n";
  if (r.fallback_depth != 0) out << "# warning\trecovery fell back " << r.fallback_depth << " level(s)\n";
  if (r.residual_bins != 0) out << "# warning\tresidual bins " << r.residual_bins << '\n';
  if (r.flagged_bins != 0) out << "# warning\tflagged bins " << r.flagged_bins << '\n';
  for (const auto& e : s.entries) out << e.value << '\t' << decimal(e.count) << '\n';
}

int cmd_sample(const std::string& path, const std::string& out_path, std::optional<u64> target) {
  SamplerSketch sketch = load(path);
  const Sample s = target ? sketch.extract(*target) : sketch.extract();
  if (out_path == "-") {
    write_sample(std::cout, s);
    std::cout.flush();
  } else {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot open " + out_path + " for writing");
    write_sample(out, s);
  }
  return kOk;
}

int cmd_merge(const std::string& a_path, const std::string& b_path, const std::string& op, const std::string& out) {
  SamplerSketch a = load(a_path);
  const SamplerSketch b = load(b_path);
  a.merge(b, op == "union" ? 1 : -1);
  save(a, out);
  return kOk;
}

void print_estimate(const Estimate& e) {
  std::cout << "estimate\t" << decimal(e.value) << '\n' << "error_bound\t" << decimal(e.error_bound) << '\n';
}

struct QueryArgs {
  std::string sketch;
  std::string freq;
  std::string lo, hi;
  double phi = 0.0;
};

int cmd_query(const std::string& kind, const QueryArgs& q) {
  SamplerSketch sketch = load(q.sketch);
  const Sample s = sketch.extract();
  const ErrorSpec spec = error_spec(sketch.config());
  auto number = [](const std::string& text, const char* flag) {
    const auto v = parse_i128(text);
    if (!v) throw InputError(std::string(flag) + " expects a signed 64-bit integer");
    return *v;
  };
  if (kind == "inverse-point") {
    print_estimate(inverse_point(s.entries, number(q.freq, "--freq"), spec));
  } else if (kind == "inverse-range") {
    print_estimate(inverse_range(s.entries, number(q.lo, "--lo"), number(q.hi, "--hi"), spec));
  } else if (kind == "heavy") {
    for (const auto& h : inverse_heavy_hitters(s.entries, q.phi)) {
      std::cout << decimal(h.frequency) << '\t' << decimal(h.share) << '\n';
    }
    std::cout << "# error_bound\t" << decimal(query_error(s.size(), spec)) << '\n';
  } else {
    std::cout << "quantile\t" << decimal(inverse_quantile(s.entries, q.phi)) << '\n'
              << "error_bound\t" << decimal(query_error(s.size(), spec)) << '\n';
  }
  return kOk;
}

int cmd_jaccard(const std::string& a_path, const std::string& b_path) {
  SamplerSketch a = load(a_path);
  SamplerSketch b = load(b_path);
  print_estimate(jaccard(a, b));
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Exact samples of turnstile streams: build, merge and query sketches"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Ingest a stream file into a sketch container");
  b->add_option("--input", build.input, "Stream file (`<k> <c>` per line), - for stdin")->required();
  b->add_option("--model", build.model, "Stream model")->check(CLI::IsMember({"strict", "nonstrict"}));
  b->add_option("--recovery", build.recovery, "Per-level recovery structure")->check(CLI::IsMember({"frs", "efrs"}));
  b->add_option("--k", build.k, "Requested sample size K")->required();
  b->add_option("--delta", build.delta, "Failure probability");
  b->add_option("--eps", build.eps, "Partial-sample loss bound (efrs only)");
  b->add_option("--seed", build.seed, "Master seed");
  b->add_option("--m", build.m, "Universe bound: values lie in [1, m)");
  b->add_option("--r", build.r, "Bound on |count| per update");
  b->add_option("--nmax", build.nmax, "Bound on the stream length");
  b->add_option("--lambda", build.lambda, "Level ratio");
  b->add_option("--alpha", build.alpha, "L0 estimate accuracy factor");
  b->add_flag("--exact-l0", build.exact_l0, "Track L0 exactly instead of estimating it");
  b->add_option("--out", build.out, "Output container")->required();

  std::string sketch_path, out_path = "-";
  std::optional<u64> target;
  auto* s = app.add_subcommand("sample", "Extract a sample as TSV");
  s->add_option("--sketch", sketch_path, "Sketch container")->required();
  s->add_option("--out", out_path, "Output path, - for stdout");
  s->add_option("--target", target, "Sample size target K' <= K");

  std::string a_path, b_path, op, merge_out;
  auto* m = app.add_subcommand("merge", "Union or difference of two sketches");
  m->add_option("--a", a_path)->required();
  m->add_option("--b", b_path)->required();
  m->add_option("--op", op)->required()->check(CLI::IsMember({"union", "diff"}));
  m->add_option("--out", merge_out)->required();

  QueryArgs query;
  auto* q = app.add_subcommand("query", "Inverse distribution queries on the extracted sample");
  q->require_subcommand(1);
  q->add_option("--sketch", query.sketch, "Sketch container")->required();
  auto* qp = q->add_subcommand("inverse-point", "Share of sampled values with total = freq");
  qp->add_option("--freq", query.freq)->required();
  auto* qr = q->add_subcommand("inverse-range", "Share of sampled values with total in [lo, hi]");
  qr->add_option("--lo", query.lo)->required();
  qr->add_option("--hi", query.hi)->required();
  auto* qh = q->add_subcommand("heavy", "Frequencies with share >= phi");
  qh->add_option("--phi", query.phi)->required();
  auto* qq = q->add_subcommand("quantile", "Smallest frequency with cumulative share >= phi");
  qq->add_option("--phi", query.phi)->required();

  auto* j = app.add_subcommand("jaccard", "Jaccard similarity of two streams' supports");
  j->add_option("--a", a_path)->required();
  j->add_option("--b", b_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*b) return cmd_build(build);
    if (*s) return cmd_sample(sketch_path, out_path, target);
    if (*m) return cmd_merge(a_path, b_path, op, merge_out);
    if (*q) return cmd_query(q->get_subcommands().front()->get_name(), query);
    if (*j) return cmd_jaccard(a_path, b_path);
  } catch (const OverflowError& e) {
    std::cerr << "tsketch: overflow: " << e.what() << '\n';
    return kOverflow;
  } catch (const ExtractionError& e) {
    std::cerr << "tsketch: extraction failed: " << e.what() << '\n';
    return kEstimation;
  } catch (const EstimationError& e) {
    std::cerr << "tsketch: estimation failed: " << e.what() << '\n';
    return kEstimation;
  } catch (const Error& e) {
    std::cerr << "tsketch: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "tsketch: " << e.what() << '\n';
    return kUsage;
  }
}
