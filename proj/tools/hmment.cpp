// hmment: entropy rates of hidden Markov chains from the command line.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hmment/bsc.hpp"
#include "hmment/combinatorics.hpp"
#include "hmment/deriv_formula.hpp"
#include "hmment/entropy.hpp"
#include "hmment/io.hpp"

using namespace hmment;
using nlohmann::json;

namespace {

struct Options {
  std::string model_path;
  std::string curve_path;
  std::string pi = "0.7,0.3,0.4,0.6";
  double eps = 0.05;
  int n = 8;
  int level = 10;
  int order = 1;
  int quad = bsc::kDefaultQuadPoints;
  int reference = -1;
  double at = 0.0;
  int check_level = 14;
  int points = 50;
  double from = 0.01;
  double to = 0.49;
  bool mirror = false;
  bool bits = false;
  std::string csv_path;
  std::string json_path;
  std::string format = "csv";
};

double scale(const Options& o) { return o.bits ? 1.0 / std::log(2.0) : 1.0; }

/// Destination for CSV/JSON: the given file, or stdout.
// Buffers a command's output and writes it only if the command finished without throwing,
// so a failed run leaves no partial CSV behind.
class Sink {
 public:
  explicit Sink(std::string path) : path_(std::move(path)), pending_(std::uncaught_exceptions()) {
    if (!path_.empty()) {
      file_.open(path_);
      if (!file_) throw Error(ErrorCode::DomainError, "cannot write " + path_);
    }
  }
  Sink(const Sink&) = delete;
  Sink& operator=(const Sink&) = delete;
  ~Sink() {
    if (std::uncaught_exceptions() > pending_) {
      if (file_.is_open()) {
        file_.close();
        std::error_code ec;
        std::filesystem::remove(path_, ec);
      }
      return;
    }
    (file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout) << buf_.str() << std::flush;
  }
  std::ostream& stream() { return buf_; }

 private:
  std::string path_;
  int pending_;
  std::ofstream file_;
  std::ostringstream buf_;
};

void emit_json(const json& j, const std::string& path) {
  Sink sink(path);
  sink.stream() << j.dump(2) << '\n';
}

bsc::BinaryChainParams chain(const Options& o) { return {bsc::parse_pi(o.pi), o.eps}; }

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidModel:
    case ErrorCode::SymbolOutOfRange:
    case ErrorCode::DomainError:
    case ErrorCode::OrderMismatch:
      return 2;
    case ErrorCode::RegimeViolation:
    case ErrorCode::NotNonOverlapping:
    case ErrorCode::NotABlackHole:
    case ErrorCode::NotRankOne:
    case ErrorCode::NotIrreducible:
    case ErrorCode::NegativeState:
      return 4;
    default:
      return 3;
  }
}

void run_entropy(const Options& o) {
  const HiddenMarkovModel m = o.model_path.empty() ? bsc::build_model(chain(o)) : io::load_model(o.model_path);
  const EntropySequence h = entropy_sequence(m, o.n);
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), {"n", "H_n"});
  for (int k = 0; k <= h.max_n(); ++k) csv.cell(static_cast<long long>(k)).cell(h[k] * scale(o)).end_row();
}

void run_derivative(const Options& o) {
  const ModelCurve curve =
      o.curve_path.empty() ? ModelCurve::binary_symmetric(bsc::parse_pi(o.pi)) : io::load_curve(o.curve_path);
  const StabilizedDerivative d = stabilized_derivative(curve, o.at, o.order);
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), {"order", "at", "value", "stabilizing_length", "long_length", "long_value",
                                    "pre_stabilization_value"});
  csv.cell(static_cast<long long>(d.order))
      .cell(o.at)
      .cell(d.value * scale(o))
      .cell(static_cast<long long>(d.stabilizing_length))
      .cell(static_cast<long long>(d.long_length))
      .cell(d.long_value * scale(o))
      .cell(d.pre_stabilization_value * scale(o))
      .end_row();
}

json support_json(const bsc::SupportClass& s) {
  return {{"class", bsc::to_string(s.kind)}, {"p0", s.p0},       {"p1", s.p1},
          {"f1_p0", s.f1_p0},              {"f0_p1", s.f0_p1}, {"interval", {s.p1, s.p0}},
          {"boundary", s.boundary},        {"union_covers_interval", s.union_covers_interval}};
}

void run_bsc_classify(const Options& o) { emit_json(support_json(bsc::classify_support(chain(o))), o.json_path); }

void run_bsc_support(const Options& o) {
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), {"x"});
  for (double x : bsc::support_points(chain(o), o.level)) csv.cell(x).end_row();
}

void run_bsc_bounds(const Options& o) {
  const auto p = chain(o);
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), {"level", "lower", "upper", "width"});
  for (int k = 0; k <= o.level; ++k) {
    const auto b = bsc::entropy_bounds(p, k);
    csv.cell(static_cast<long long>(k)).cell(b.lower * scale(o)).cell(b.upper * scale(o)).cell(b.width() * scale(o)).end_row();
  }
}

void run_bsc_cylinder(const Options& o) {
  const auto level = bsc::cylinder_level(chain(o), o.level);
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), {"word", "point", "probability", "lo", "hi"});
  for (const auto& c : level.cylinders) {
    csv.cell(level.word_string(c.word)).cell(c.point).cell(c.probability).cell(c.lo).cell(c.hi).end_row();
  }
}

void run_hpz(const Options& o) {
  const auto p = chain(o);
  const auto b = bsc::hpz_derivative(p, o.level, o.quad);
  const double s = scale(o);
  json j = {{"level", b.level},
            {"quad_points", b.quad_points},
            {"term1", b.term1 * s},
            {"term2", b.term2 * s},
            {"term3", b.term3 * s},
            {"term4", b.term4 * s},
            {"endpoint_correction", b.endpoint_correction * s},
            {"total", b.total * s},
            {"exact_term3", b.exact_term3 * s},
            {"exact_term4", b.exact_term4 * s},
            {"exact_total", b.exact_total * s},
            {"p0", b.p0},
            {"p1", b.p1},
            {"dp0", b.dp0},
            {"node_spacing", b.node_spacing},
            {"snapped_nodes", b.snapped_nodes}};
  if (o.reference >= 0) {
    const double ref = bsc::entropy_derivative_reference(p, o.reference) * s;
    j["reference_n"] = o.reference;
    j["reference"] = ref;
    j["difference"] = b.total * s - ref;
  }
  emit_json(j, o.json_path);
}

void run_lowsnr(const Options& o) {
  const Eigen::Matrix2d pi = bsc::parse_pi(o.pi);
  const double s = scale(o);
  std::cout << "closed_form," << io::format_double(bsc::low_snr_second_derivative(pi) * s) << '\n';
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), {"n", "H_n", "first_derivative", "second_derivative", "closed_form", "gap"});
  for (const auto& r : bsc::low_snr_numeric_check(pi, o.check_level)) {
    csv.cell(static_cast<long long>(r.n))
        .cell(r.value * s)
        .cell(r.first * s)
        .cell(r.second * s)
        .cell(r.closed_form * s)
        .cell(r.gap * s)
        .end_row();
  }
}

void run_coeffs(const Options& o) {
  const auto terms = comb::yprime_over_y_expansion(o.order);
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& t : terms) rows.push_back({{"partition", t.partition.parts()}, {"C", t.coefficient.str()}});
    emit_json(rows, o.json_path.empty() ? o.csv_path : o.json_path);
    return;
  }
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), {"partition", "C"});
  for (const auto& t : terms) {
    std::string parts;
    for (int a : t.partition.parts()) parts += (parts.empty() ? "" : " ") + std::to_string(a);
    csv.cell(parts).cell(t.coefficient.str()).end_row();
  }
}

void run_sweep(const Options& o) {
  if (o.points < 1) throw Error(ErrorCode::DomainError, "sweep needs at least one point");
  if (!(o.from >= 0.0 && o.to <= 0.5 && o.from <= o.to)) {
    throw Error(ErrorCode::DomainError, "sweep grid must lie in [0, 1/2]");
  }
  const Eigen::Matrix2d pi = bsc::parse_pi(o.pi);
  const ModelCurve curve = ModelCurve::binary_symmetric(pi);
  std::vector<std::string> header{"eps", "H_n", "lower", "upper", "class"};
  if (o.mirror) header.push_back("H_n_mirror");
  Sink sink(o.csv_path);
  io::CsvWriter csv(sink.stream(), header);
  const double s = scale(o);
  for (int i = 0; i < o.points; ++i) {
    const double e = o.points == 1 ? o.from : o.from + (o.to - o.from) * i / (o.points - 1);
    csv.cell(e).cell(conditional_entropy(curve.at(e), o.n) * s);
    const bsc::BinaryChainParams p(pi, e);
    std::string kind = "outside";
    std::string lower;
    std::string upper;
    if (p.standard_regime()) {
      const auto sc = bsc::classify_support(p);
      kind = bsc::to_string(sc.kind);
      if (sc.kind == bsc::SupportKind::CantorSet) {
        const auto b = bsc::entropy_bounds(p, o.level);
        lower = io::format_double(b.lower * s);
        upper = io::format_double(b.upper * s);
      }
    }
    csv.cell(lower).cell(upper).cell(kind);
    if (o.mirror) csv.cell(conditional_entropy(curve.at(1.0 - e), o.n) * s);
    csv.end_row();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy rates of hidden Markov chains"};
  app.require_subcommand(1);
  Options o;

  auto pi_flag = [&](CLI::App* c) { c->add_option("--pi", o.pi, "Pi row-major: p00,p01,p10,p11"); };
  auto eps_flag = [&](CLI::App* c) { c->add_option("--eps", o.eps, "crossover probability in [0, 1/2]"); };
  auto out_flags = [&](CLI::App* c) {
    c->add_option("--csv", o.csv_path, "write CSV here instead of stdout");
    c->add_flag("--bits", o.bits, "report entropies in bits");
  };

  auto* entropy = app.add_subcommand("entropy", "H_0..H_n of a model");
  auto* model_opt = entropy->add_option("--model", o.model_path, "model JSON {delta, phi}");
  entropy->add_option("--pi", o.pi, "BSC chain instead of --model")->excludes(model_opt);
  entropy->add_option("--eps", o.eps, "crossover probability")->excludes(model_opt);
  entropy->add_option("--n", o.n, "largest conditioning length");
  out_flags(entropy);
  entropy->callback([&] { run_entropy(o); });

  auto* derivative = app.add_subcommand("derivative", "stabilized derivative at a Black Hole");
  auto* curve_opt = derivative->add_option("--model-curve", o.curve_path, "curve JSON");
  derivative->add_option("--pi", o.pi, "BSC curve instead of --model-curve")->excludes(curve_opt);
  derivative->add_option("--at", o.at, "expansion point");
  derivative->add_option("--order", o.order, "derivative order");
  out_flags(derivative);
  derivative->callback([&] { run_derivative(o); });

  auto* bsc_cmd = app.add_subcommand("bsc", "binary symmetric channel dynamics");
  bsc_cmd->require_subcommand(1);
  auto* classify = bsc_cmd->add_subcommand("classify", "Cantor set or interval");
  pi_flag(classify);
  eps_flag(classify);
  classify->add_option("--json", o.json_path, "write JSON here instead of stdout");
  classify->callback([&] { run_bsc_classify(o); });
  auto* support = bsc_cmd->add_subcommand("support", "support points L_n");
  auto* bounds = bsc_cmd->add_subcommand("bounds", "entropy bounds for levels 0..level");
  auto* cylinder = bsc_cmd->add_subcommand("cylinder", "cylinder points, masses and intervals");
  for (auto* c : {support, bounds, cylinder}) {
    pi_flag(c);
    eps_flag(c);
    c->add_option("--level", o.level, "level n");
    out_flags(c);
  }
  support->callback([&] { run_bsc_support(o); });
  bounds->callback([&] { run_bsc_bounds(o); });
  cylinder->callback([&] { run_bsc_cylinder(o); });

  auto* hpz = app.add_subcommand("hpz", "first-derivative decomposition");
  pi_flag(hpz);
  eps_flag(hpz);
  hpz->add_option("--level", o.level, "cylinder level");
  hpz->add_option("--quad", o.quad, "Simpson nodes (odd)");
  hpz->add_option("--reference", o.reference, "also compute dH_N/d eps by jets for this N");
  hpz->add_option("--json", o.json_path, "write JSON here instead of stdout");
  hpz->add_flag("--bits", o.bits, "report in bits");
  hpz->callback([&] { run_hpz(o); });

  auto* lowsnr = app.add_subcommand("lowsnr", "second derivative at eps = 1/2");
  pi_flag(lowsnr);
  lowsnr->add_option("--check-level", o.check_level, "largest n for the jet check");
  out_flags(lowsnr);
  lowsnr->callback([&] { run_lowsnr(o); });

  auto* coeffs = app.add_subcommand("coeffs", "coefficients of (y'/y)^(n)");
  coeffs->add_option("--order", o.order, "n");
  coeffs->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  coeffs->add_option("--csv", o.csv_path, "output file");
  coeffs->add_option("--json", o.json_path, "output file for json");
  coeffs->callback([&] { run_coeffs(o); });

  auto* sweep = app.add_subcommand("sweep", "H_n, bounds and class over an eps grid");
  pi_flag(sweep);
  sweep->add_option("--n", o.n, "conditioning length");
  sweep->add_option("--level", o.level, "bounds level");
  sweep->add_option("--points", o.points, "grid size");
  sweep->add_option("--from", o.from, "first eps");
  sweep->add_option("--to", o.to, "last eps");
  sweep->add_flag("--mirror", o.mirror, "add H_n at 1 - eps");
  out_flags(sweep);
  sweep->callback([&] { run_sweep(o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
    return 3;
  }
  return 0;
}
