#include "avgshadow/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <iostream>
#include <map>
#include <sstream>

#include "avgshadow/acceptance.hpp"
#include "avgshadow/catalog.hpp"
#include "avgshadow/chain_recurrence.hpp"
#include "avgshadow/error.hpp"
#include "avgshadow/io.hpp"

namespace avgshadow::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string example = "sierpinski";
  std::vector<std::string> params;  // key=value
  std::uint64_t seed = 1;
  std::string out;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExampleDescriptor resolve_example(const Common& c) {
  std::map<std::string, double> params;
  for (const auto& kv : c.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("parameter '" + kv + "' is not key=value");
    try {
      params[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1));
    } catch (const Error&) {
      throw UsageError("parameter '" + kv + "' has a non-numeric value");
    }
  }
  try {
    const ExampleDescriptor d = ExampleDescriptor::parse(c.example, params);
    make(d);  // range checks
    return d;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

fs::path output_dir(const Common& c) {
  fs::path dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv(output_dir_env);
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::io_error, "cannot use output directory " + dir.string());
  return dir;
}

Provenance base_provenance(const std::string& command, const Common& c, const ExampleDescriptor& d) {
  return {{"command", command}, {"example", d.name()}, {"parameters", d.parameters()},
          {"seed", std::to_string(c.seed)}};
}

void emit(const fs::path& dir, const std::string& file, const std::string& content) {
  write_file_atomic(dir / file, content);
  std::cout << "wrote " << (dir / file).string() << '\n';
}

void add_common(CLI::App* sub, Common& c, bool with_example = true) {
  if (with_example) {
    sub->add_option("-e,--example", c.example, "catalog entry (see list-examples)")->capture_default_str();
    sub->add_option("-p,--param", c.params, "example parameter key=value (n, alpha, a)");
  }
  sub->add_option("-s,--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("-o,--out", c.out, std::string("output directory (default $") + output_dir_env + " or .)");
}

// orbit

struct OrbitArgs {
  std::size_t steps = 1000;
  double delta = 0.05;
  std::string noise = "uniform";
  double jump = 0.0;
  std::size_t period = 10;
  std::string start;
  std::string file = "orbit.csv";
};

int run_orbit(const Common& c, const OrbitArgs& a) {
  const ExampleDescriptor d = resolve_example(c);
  const IFSystem F = make(d);
  Rng rng(c.seed);
  const Point z = a.start.empty() ? random_point(F.space(), rng) : parse_point(F.space(), a.start);
  const auto stream = SymbolStream::random(F.size(), derive_seed(c.seed, 1));
  PseudoOrbit orbit;
  if (a.noise == "exact") {
    orbit = exact_orbit(F, z, stream, a.steps);
  } else {
    const NoiseModel model = a.noise == "bursty" ? NoiseModel::bursty(a.jump, a.period) : NoiseModel::uniform();
    orbit = noisy_average_orbit(F, z, stream, a.steps, a.delta, model, derive_seed(c.seed, 2));
  }
  const auto v = validate(orbit, a.delta, ValidationMode::average);
  Provenance p = base_provenance("orbit", c, d);
  p.insert(p.end(), {{"steps", std::to_string(a.steps)},
                     {"delta", format_double(a.delta)},
                     {"noise", a.noise},
                     {"start", format_point(F.space(), z)},
                     {"stream", stream.describe()},
                     {"validates", v.passed() ? "yes" : "no"}});
  std::ostringstream out;
  write_pseudo_orbit(out, F, orbit, p);
  const fs::path dir = output_dir(c);
  emit(dir, a.file, out.str());
  std::cout << "delta-average pseudo-orbit at delta=" << format_double(a.delta) << ": "
            << (v.passed() ? "yes" : "no") << '\n';
  return exit_ok;
}

// shadow

struct ShadowArgs {
  double epsilon = 0.1;
  std::size_t steps = 1000;
  std::string input;
  std::size_t candidates = 16;
  std::size_t oracle_horizon = 0;  // 0: whole orbit
  double window = 0.1;
};

int run_shadow(const Common& c, const ShadowArgs& a) {
  const ExampleDescriptor d = resolve_example(c);
  const IFSystem F = make(d);
  if (!F.ratio() || *F.ratio() >= 1.0)
    throw UsageError(d.name() + " has no contraction ratio below 1; constructive shadowing does not apply");
  const double delta = (1.0 - *F.ratio()) * a.epsilon / 2.0;
  PseudoOrbit orbit;
  if (!a.input.empty()) {
    std::ifstream in(a.input);
    require(static_cast<bool>(in), ErrorCode::io_error, "cannot read " + a.input);
    orbit = read_pseudo_orbit(in, F);
  } else {
    Rng rng(c.seed);
    const Point z = random_point(F.space(), rng);
    orbit = noisy_average_orbit(F, z, SymbolStream::random(F.size(), derive_seed(c.seed, 1)), a.steps, delta,
                                NoiseModel::uniform(), derive_seed(c.seed, 2));
  }
  const ShadowReport mine = constructive_shadow(F, orbit, a.epsilon, a.window);

  Rng rng(derive_seed(c.seed, 3));
  std::vector<Point> candidates{orbit.points.front()};
  while (candidates.size() < std::max<std::size_t>(a.candidates, 1))
    candidates.push_back(random_point(F.space(), rng));
  const std::size_t h = a.oracle_horizon == 0 ? orbit.points.size() : std::min(a.oracle_horizon, orbit.points.size());
  const ShadowReport oracle = brute_force_search(F, orbit, candidates, SearchStrategy::greedy(), h);

  Provenance p = base_provenance("shadow", c, d);
  p.insert(p.end(), {{"epsilon", format_double(a.epsilon)},
                     {"delta", format_double(delta)},
                     {"input", a.input.empty() ? "generated" : a.input},
                     {"steps", std::to_string(orbit.steps())}});
  const fs::path dir = output_dir(c);
  std::ostringstream s1;
  Provenance p1 = p;
  p1.emplace_back("method", "constructive");
  write_shadow_report(s1, F.space(), mine, p1);
  emit(dir, "shadow_constructive.csv", s1.str());
  std::ostringstream s2;
  Provenance p2 = p;
  p2.emplace_back("method", "greedy oracle over " + std::to_string(candidates.size()) + " candidates");
  write_shadow_report(s2, F.space(), oracle, p2);
  emit(dir, "shadow_oracle.csv", s2.str());

  const bool ok = mine.tail < a.epsilon;
  std::cout << "delta=" << format_double(delta) << " tail=" << format_double(mine.tail)
            << " (horizon " << mine.horizon << ") oracle tail=" << format_double(oracle.tail) << '\n';
  std::cout << "epsilon-shadowed in average: " << (ok ? "yes" : "no") << '\n';
  return ok ? exit_ok : exit_analysis_failure;
}

// counterexample

struct CounterArgs {
  double a = 0.5;
  std::size_t K = 16;
  std::size_t horizon = 0;  // 0: 3·1024·K
  std::size_t grid = 16;
  std::size_t streams = 4;
  double tolerance = 1e-3;
  std::size_t claim_steps = 10000;
  std::size_t rows = 256;
};

int run_counterexample(const Common& c, const CounterArgs& a) {
  const ExampleDescriptor d = ExampleDescriptor::circle_counterexample(a.a);
  IFSystem F = [&] {
    try {
      return make(d);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }();
  if (a.K < 1 || a.grid < 1 || a.streams < 1) throw UsageError("K, grid and streams must be positive");
  const Point b = Point::scalar(0.0);
  const Point cc = Point::scalar(0.5);
  const std::size_t H = a.horizon == 0 ? 3 * 1024 * a.K : a.horizon;
  const std::vector<Point> block = block_switching_points(b, cc, a.K, H);
  const PseudoOrbit orbit = attach_symbols(F, block, SymbolStream::constant(Symbol{0}));
  const double delta = 3.0 * diameter(F.space()) / static_cast<double>(a.K);
  const auto v = validate(orbit, delta + 1e-9, ValidationMode::average);

  Provenance p = base_provenance("counterexample", c, d);
  p.insert(p.end(), {{"K", std::to_string(a.K)}, {"horizon", std::to_string(H)}});
  const fs::path dir = output_dir(c);
  std::ostringstream orbit_out;
  write_pseudo_orbit(orbit_out, F, orbit, p);
  emit(dir, "block_orbit.csv", orbit_out.str());

  std::ostringstream claim;
  std::ostringstream tails;
  std::ostringstream profiles;
  write_provenance(claim, p);
  write_provenance(tails, p);
  write_provenance(profiles, p);
  claim << "z,stream,step,limit,final_distance\n";
  tails << "z,stream,tail\n";
  profiles << "z,stream,n,average\n";
  const std::size_t stride = std::max<std::size_t>(1, H / std::max<std::size_t>(a.rows, 1));
  std::size_t claimed = 0;
  double lowest_tail = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.grid; ++k) {
    const double zx = static_cast<double>(k) / static_cast<double>(a.grid);
    const Point z = Point::scalar(zx);
    for (std::size_t j = 0; j < a.streams; ++j) {
      const auto sigma = SymbolStream::random(F.size(), derive_seed(c.seed, 100 + j));
      const ClaimOutcome o = convergence_claim(F, z, sigma, b, cc, a.tolerance, a.claim_steps);
      claim << format_double(zx) << ',' << j << ',';
      if (o.step) {
        ++claimed;
        claim << *o.step << ',' << (o.limit == 0 ? 'b' : 'c');
      } else {
        claim << ',';
      }
      claim << ',' << format_double(o.final_distance) << '\n';
      const ShadowReport r = average_distance_profile(F, z, sigma, block);
      lowest_tail = std::min(lowest_tail, r.tail);
      tails << format_double(zx) << ',' << j << ',' << format_double(r.tail) << '\n';
      for (std::size_t n = stride; n <= H; n += stride)
        profiles << format_double(zx) << ',' << j << ',' << n << ',' << format_double(r.profile[n - 1]) << '\n';
    }
  }
  emit(dir, "claim.csv", claim.str());
  emit(dir, "tails.csv", tails.str());
  emit(dir, "profiles.csv", profiles.str());
  const std::size_t total = a.grid * a.streams;
  std::cout << "block orbit validates at delta=3D/K: " << (v.passed() ? "yes" : "no") << '\n'
            << "claim holds for " << claimed << '/' << total << " orbits\n"
            << "smallest tail average distance " << format_double(lowest_tail) << '\n';
  return v.passed() && claimed == total ? exit_ok : exit_analysis_failure;
}

// chainrec

struct ChainArgs {
  std::size_t resolution = 256;
  double epsilon = 0.02;
  std::size_t samples = default_samples_per_box;
  std::vector<std::string> keep;
  std::string from;
  std::string to;
};

int run_chainrec(const Common& c, const ChainArgs& a) {
  const ExampleDescriptor d = resolve_example(c);
  IFSystem F = make(d);
  if (!a.keep.empty()) {
    SymbolWord keep;
    for (const auto& label : a.keep) {
      const auto s = F.find(label);
      if (!s) throw UsageError("unknown map label '" + label + "'");
      keep.push_back(*s);
    }
    F = subsystem(F, keep);
  }
  if (a.epsilon <= 0.0 || a.resolution < 2) throw UsageError("need epsilon > 0 and resolution >= 2");
  const ChainGraph graph = build_chain_graph(F, a.resolution, a.epsilon, a.samples, c.seed);
  const RecurrenceReport report = analyze(graph);

  Provenance p = base_provenance("chainrec", c, d);
  p.insert(p.end(), {{"maps", F.name()},
                     {"resolution", std::to_string(a.resolution)},
                     {"epsilon", format_double(a.epsilon)},
                     {"effective_epsilon", format_double(graph.effective_epsilon)},
                     {"samples", std::to_string(a.samples)}});
  const fs::path dir = output_dir(c);
  std::ostringstream edges;
  write_provenance(edges, p);
  write_edge_list(edges, graph);
  emit(dir, "edges.txt", edges.str());
  std::ostringstream rec;
  write_provenance(rec, p);
  write_recurrence_csv(rec, report);
  emit(dir, "recurrence.csv", rec.str());
  std::cout << "boxes " << graph.size() << ", edges " << graph.edge_count() << ", recurrent "
            << report.recurrent_count << ", chain components " << report.component_count << '\n';

  if (!a.from.empty() || !a.to.empty()) {
    if (a.from.empty() || a.to.empty()) throw UsageError("--from and --to go together");
    const ChainSearch s = find_chain(F, parse_point(F.space(), a.from), parse_point(F.space(), a.to),
                                     a.epsilon, a.resolution, a.samples, c.seed);
    std::cout << "chain: " << s.note << '\n';
    if (s.chain) {
      std::ostringstream out;
      write_pseudo_orbit(out, F, *s.chain, p);
      emit(dir, "chain.csv", out.str());
    }
  }
  return exit_ok;
}

// attractor

struct AttractorArgs {
  std::size_t points = 100000;
  std::size_t burn_in = 100;
  std::size_t width = 512;
  std::size_t height = 512;
};

// Coordinates for plotting; Σ₂ points read as binary fractions.
std::vector<double> coordinates(const Space& space, const Point& p) {
  switch (space.kind()) {
    case SpaceKind::interval:
    case SpaceKind::circle: return {p.as_scalar()};
    case SpaceKind::plane: return {p.as_vec().x, p.as_vec().y};
    case SpaceKind::sigma2: {
      double v = 0.0;
      for (std::size_t i = 0; i < 53; ++i) v += std::ldexp(double(p.as_sequence().at(i)), -int(i) - 1);
      return {v};
    }
    case SpaceKind::product: {
      auto a = coordinates(space.first(), p.first());
      auto b = coordinates(space.second(), p.second());
      if (a.size() + b.size() > 2) break;
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    case SpaceKind::discrete: return {double(p.as_site().index)};
  }
  throw UsageError("attractor plots need at most two real coordinates");
}

int run_attractor(const Common& c, const AttractorArgs& a) {
  const ExampleDescriptor d = resolve_example(c);
  const IFSystem F = make(d);
  if (a.width == 0 || a.height == 0 || a.points == 0) throw UsageError("image size and point count must be positive");
  Rng rng(c.seed);
  Point x = random_point(F.space(), rng);
  const auto stream = SymbolStream::random(F.size(), derive_seed(c.seed, 1));
  std::vector<std::vector<double>> cloud;
  cloud.reserve(a.points);
  for (std::size_t n = 0; n < a.burn_in + a.points; ++n) {
    x = F.apply(stream.at(n), x);
    if (n >= a.burn_in) cloud.push_back(coordinates(F.space(), x));
  }
  const std::size_t dims = cloud.front().size();

  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  for (std::size_t k = 0; k < dims; ++k) {
    lo[k] = hi[k] = cloud.front()[k];
    for (const auto& q : cloud) lo[k] = std::min(lo[k], q[k]), hi[k] = std::max(hi[k], q[k]);
    if (hi[k] - lo[k] < 1e-12) hi[k] = lo[k] + 1.0;
  }
  auto cell = [](double v, double l, double h, std::size_t n) {
    const auto i = static_cast<std::size_t>((v - l) / (h - l) * static_cast<double>(n));
    return std::min(i, n - 1);
  };
  std::vector<std::uint8_t> image(a.width * a.height, 255);
  if (dims == 2) {
    for (const auto& q : cloud) {
      const std::size_t col = cell(q[0], lo[0], hi[0], a.width);
      const std::size_t row = a.height - 1 - cell(q[1], lo[1], hi[1], a.height);
      image[row * a.width + col] = 0;
    }
  } else {
    // One coordinate: a histogram, bars scaled to the fullest column.
    std::vector<std::size_t> counts(a.width, 0);
    for (const auto& q : cloud) ++counts[cell(q[0], lo[0], hi[0], a.width)];
    const std::size_t peak = *std::max_element(counts.begin(), counts.end());
    for (std::size_t col = 0; col < a.width; ++col) {
      const auto bar = static_cast<std::size_t>(std::ceil(double(counts[col]) / double(peak) * double(a.height)));
      for (std::size_t r = 0; r < bar; ++r) image[(a.height - 1 - r) * a.width + col] = 0;
    }
  }

  Provenance p = base_provenance("attractor", c, d);
  p.insert(p.end(), {{"points", std::to_string(a.points)}, {"burn_in", std::to_string(a.burn_in)}});
  std::ostringstream csv;
  write_provenance(csv, p);
  csv << (dims == 2 ? "x,y\n" : "x\n");
  for (const auto& q : cloud) {
    csv << format_double(q[0]);
    if (dims == 2) csv << ',' << format_double(q[1]);
    csv << '\n';
  }
  const fs::path dir = output_dir(c);
  emit(dir, "attractor.csv", csv.str());
  std::string pgm = "P5\n" + std::to_string(a.width) + ' ' + std::to_string(a.height) + "\n255\n";
  pgm.append(image.begin(), image.end());
  emit(dir, "attractor.pgm", pgm);
  return exit_ok;
}

int run_list() {
  std::cout << "name,parameters,space,beta,expected_asp,fixed_points\n";
  for (const auto& e : list_examples()) {
    std::cout << e.name << ',' << e.parameters << ',' << e.space << ','
              << (e.beta ? format_double(*e.beta) : std::string("none")) << ',' << e.expected_asp << ','
              << e.fixed_points << '\n';
  }
  return exit_ok;
}

struct VerifyArgs {
  std::vector<int> criteria;
  std::string report = "verify.txt";
  bool write = false;
};

int run_verify(const Common& c, const VerifyArgs& a) {
  acceptance::Options options;
  options.seed = c.seed;
  for (int id : a.criteria) {
    if (id < 1 || id > acceptance::criterion_count) throw UsageError("no criterion " + std::to_string(id));
    options.criteria.insert(id);
  }
  const auto results = acceptance::run(options);
  const std::string text = acceptance::render(results);
  std::cout << text;
  if (a.write || !c.out.empty()) {
    const fs::path dir = output_dir(c);
    emit(dir, a.report, text);
  }
  return acceptance::all_passed(results) ? exit_ok : exit_analysis_failure;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Average shadowing experiments for iterated function systems", "avgshadow"};
  app.set_config("--config", "", "key = value configuration file; command-line flags override it");
  app.require_subcommand(1);

  Common common;
  OrbitArgs orbit;
  ShadowArgs shadow;
  CounterArgs counter;
  ChainArgs chain;
  AttractorArgs attractor;
  VerifyArgs verify;

  auto* o = app.add_subcommand("orbit", "generate and validate a delta-average pseudo-orbit");
  add_common(o, common);
  o->add_option("--steps", orbit.steps)->capture_default_str();
  o->add_option("--delta", orbit.delta)->capture_default_str();
  o->add_option("--noise", orbit.noise)->check(CLI::IsMember({"uniform", "bursty", "exact"}))->capture_default_str();
  o->add_option("--jump", orbit.jump, "bursty jump size");
  o->add_option("--period", orbit.period, "bursty period")->capture_default_str();
  o->add_option("--start", orbit.start, "starting point (default random)");
  o->add_option("--file", orbit.file)->capture_default_str();

  auto* s = app.add_subcommand("shadow", "constructive and oracle shadowing of a pseudo-orbit");
  add_common(s, common);
  s->add_option("--epsilon", shadow.epsilon)->capture_default_str();
  s->add_option("--steps", shadow.steps)->capture_default_str();
  s->add_option("--input", shadow.input, "pseudo-orbit table to shadow instead of a generated one");
  s->add_option("--candidates", shadow.candidates)->capture_default_str();
  s->add_option("--oracle-horizon", shadow.oracle_horizon, "0 means the whole orbit")->capture_default_str();
  s->add_option("--window", shadow.window)->check(CLI::Range(1e-9, 1.0))->capture_default_str();

  auto* x = app.add_subcommand("counterexample", "block orbit and convergence claim on the circle pair");
  add_common(x, common, false);
  x->add_option("-a,--a", counter.a)->capture_default_str();
  x->add_option("-K,--blocks", counter.K)->capture_default_str();
  x->add_option("--horizon", counter.horizon, "0 means 3*1024*K")->capture_default_str();
  x->add_option("--grid", counter.grid)->capture_default_str();
  x->add_option("--streams", counter.streams)->capture_default_str();
  x->add_option("--tolerance", counter.tolerance)->capture_default_str();
  x->add_option("--claim-steps", counter.claim_steps)->capture_default_str();
  x->add_option("--rows", counter.rows, "profile rows per orbit")->capture_default_str();

  auto* g = app.add_subcommand("chainrec", "epsilon-chain box graph and chain-recurrent boxes");
  add_common(g, common);
  g->add_option("--resolution", chain.resolution)->capture_default_str();
  g->add_option("--epsilon", chain.epsilon)->capture_default_str();
  g->add_option("--samples", chain.samples)->capture_default_str();
  g->add_option("--maps", chain.keep, "keep only these map labels");
  g->add_option("--from", chain.from, "search an epsilon-chain from this point");
  g->add_option("--to", chain.to);

  auto* t = app.add_subcommand("attractor", "chaos game point cloud and PGM image");
  add_common(t, common);
  t->add_option("--points", attractor.points)->capture_default_str();
  t->add_option("--burn-in", attractor.burn_in)->capture_default_str();
  t->add_option("--width", attractor.width)->capture_default_str();
  t->add_option("--height", attractor.height)->capture_default_str();

  app.add_subcommand("list-examples", "print the example catalog");

  auto* v = app.add_subcommand("verify", "run the acceptance suite");
  Common suite;
  suite.seed = acceptance::Options{}.seed;
  add_common(v, suite, false);
  v->add_option("--criterion", verify.criteria, "run only these criteria");
  v->add_option("--report", verify.report, "report file name")->capture_default_str();
  v->add_flag("--write", verify.write, "write the report to the output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }
  try {
    if (o->parsed()) return run_orbit(common, orbit);
    if (s->parsed()) return run_shadow(common, shadow);
    if (x->parsed()) return run_counterexample(common, counter);
    if (g->parsed()) return run_chainrec(common, chain);
    if (t->parsed()) return run_attractor(common, attractor);
    if (v->parsed()) return run_verify(suite, verify);
    return run_list();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::io_error: return exit_io;
      case ErrorCode::parse_error:
      case ErrorCode::invalid_argument:
      case ErrorCode::unknown_symbol:
      case ErrorCode::space_mismatch: return exit_usage;
      default: return exit_analysis_failure;
    }
  }
}

}  // namespace avgshadow::cli
