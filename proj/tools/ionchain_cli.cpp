#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionchain/chainopt.hpp"
#include "ionchain/experiment.hpp"

using namespace ionchain;
using nlohmann::json;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<CodeName> resolveCodes(const std::vector<std::string>& names) {
  auto lower = [](std::string s) {
    for (char& c : s) c = char(std::tolower(uint8_t(c)));
    return s;
  };
  std::vector<CodeName> out;
  auto addOne = [&](const std::string& raw) {
    std::string s = lower(raw);
    if (s == "all") {
      for (CodeName cn : allCodes()) out.push_back(cn);
      return;
    }
    for (CodeName cn : allCodes())
      if (s == lower(codeNameStr(cn))) {
        out.push_back(cn);
        return;
      }
    throw std::runtime_error("unknown code: " + raw);
  };
  if (names.empty())
    addOne("all");
  else
    for (const auto& n : names)
      for (size_t start = 0, end; start <= n.size(); start = end + 1) {
        end = n.find(',', start);
        if (end == std::string::npos) end = n.size();
        if (end > start) addOne(n.substr(start, end - start));
      }
  return out;
}

// one swept noise parameter: name:min:max:spacing:points
struct AxisSpec {
  std::string param;
  double lo = 0.0, hi = 0.0;
  bool logSpace = false;
  int points = 1;
};

AxisSpec parseAxis(const std::string& text) {
  std::vector<std::string> part;
  for (size_t start = 0, end; start <= text.size(); start = end + 1) {
    end = text.find(':', start);
    if (end == std::string::npos) end = text.size();
    part.push_back(text.substr(start, end - start));
  }
  if (part.size() != 5)
    throw std::runtime_error("axis must be name:min:max:lin|log:points, got " + text);
  AxisSpec a;
  a.param = part[0];
  a.lo = std::stod(part[1]);
  a.hi = std::stod(part[2]);
  if (part[3] == "log")
    a.logSpace = true;
  else if (part[3] != "lin")
    throw std::runtime_error("axis spacing must be lin or log, got " + part[3]);
  a.points = std::stoi(part[4]);
  if (a.points < 1) throw std::runtime_error("axis needs at least one point");
  if (a.logSpace && (a.lo <= 0.0 || a.hi <= 0.0))
    throw std::runtime_error("log axis needs positive endpoints");
  return a;
}

std::vector<double> axisValues(const AxisSpec& a) {
  std::vector<double> v(size_t(a.points));
  for (int i = 0; i < a.points; ++i) {
    double t = a.points == 1 ? 0.0 : double(i) / (a.points - 1);
    v[size_t(i)] = a.logSpace ? std::exp(std::log(a.lo) + t * (std::log(a.hi) - std::log(a.lo)))
                              : a.lo + t * (a.hi - a.lo);
  }
  v.front() = a.lo;
  if (a.points > 1) v.back() = a.hi;
  return v;
}

void applyParam(NoiseParams& np, const std::string& key, double v) {
  if (v < 0.0) throw std::runtime_error(key + " must be nonnegative");
  if (key == "p2q") {
    np.depolarizingP2 = v;
  } else if (key == "p1q") {
    if (v > 1.0) throw std::runtime_error("p1q is a probability");
    np.eps1q = std::asin(std::sqrt(v));
  } else if (key == "pms") {
    if (v > 1.0) throw std::runtime_error("pms is a probability");
    np.epsMS = std::asin(std::sqrt(v));
  } else if (key == "invT2") {
    np.T2 = v > 0.0 ? 1.0 / v : std::numeric_limits<double>::infinity();
  } else if (key == "rabi") {
    np.rabiRatio = v;
  } else {
    throw std::runtime_error("unknown noise parameter: " + key +
                             " (expected p2q, p1q, pms, invT2 or rabi)");
  }
}

// flag values; negative p2q keeps ion-native channels instead of depolarizing
struct NoiseFlags {
  double p2q = -1.0, p1q = 0.0, pms = 0.0, invT2 = 0.0, rabi = 0.0;
  double t1q = 10.0, t2q = 200.0;
};

NoiseParams toNoise(const NoiseFlags& f) {
  if (f.t1q < 0.0 || f.t2q < 0.0) throw std::runtime_error("gate times must be nonnegative");
  NoiseParams np;
  np.times.t1q = f.t1q;
  np.times.t2q = f.t2q;
  if (f.p2q >= 0.0) applyParam(np, "p2q", f.p2q);
  applyParam(np, "p1q", f.p1q);
  applyParam(np, "pms", f.pms);
  applyParam(np, "invT2", f.invT2);
  applyParam(np, "rabi", f.rabi);
  return np;
}

double paramOf(const NoiseParams& np, const std::string& key) {
  if (key == "p2q") return np.depolarizingP2 < 0.0 ? 0.0 : np.depolarizingP2;
  if (key == "p1q") return np.p1q();
  if (key == "pms") return np.pMS();
  if (key == "invT2") return std::isinf(np.T2) ? 0.0 : 1.0 / np.T2;
  return np.rabiRatio;
}

const ChainStudy& studyFor(CodeName cn) {
  static std::map<CodeName, ChainStudy> cache;
  auto it = cache.find(cn);
  if (it == cache.end()) it = cache.emplace(cn, chainStudy(buildCode(cn))).first;
  return it->second;
}

ChainLayout layoutFor(const CodeSpec& code, const std::string& which) {
  if (which == "identity") return identityLayout(code.nTotal());
  if (which == "published") return ChainLayout::fromOrder(publishedChain(code.name));
  if (which == "optimal") return ChainLayout::fromOrder(studyFor(code.name).best.order);
  throw std::runtime_error("layout must be identity, optimal or published");
}

// data sinks: "-" is standard output, anything else a file
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw IoError("cannot open " + path + " for writing");
    }
  }
  std::ostream& out() { return path_ == "-" ? std::cout : file_; }
  void finish() {
    out().flush();
    if (!out()) throw IoError("write failed on " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

const char* kCsvHeader =
    "code,basis,p2q,p1q,pms,invT2,rabi,shots,violations,rate,ci_low,ci_high,"
    "p_phys,below_threshold,tail_bound";

void writeRow(std::ostream& os, const ExperimentResult& r, const NoiseParams& np) {
  os << codeNameStr(r.code) << ',' << (r.basis == Basis::Z ? 'Z' : 'X');
  for (const char* key : {"p2q", "p1q", "pms", "invT2", "rabi"})
    os << ',' << num(paramOf(np, key));
  os << ',' << r.shots << ',' << r.violations << ',' << num(r.rate) << ','
     << num(r.ci.low) << ',' << num(r.ci.high) << ',' << num(r.pPhys) << ','
     << (r.rate < r.pPhys ? 1 : 0) << ',' << num(r.tailBound) << '\n';
}

struct RunFlags {
  std::vector<std::string> codes;
  NoiseFlags noise;
  std::string layout = "identity";
  std::string mode = "direct";
  uint64_t shots = 10000;
  uint64_t seed = 1;
  int kMax = 3;
  int threads = 1;
  std::string out = "-";
  std::string config;
};

std::map<std::string, std::string> readConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineNo) +
                               ": expected key=value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

// config file fills in anything the command line left at its default
void applyRunConfig(const CLI::App* sub, RunFlags& f, std::string* x,
                    std::string* y, std::string* summary) {
  if (f.config.empty()) return;
  for (auto& [key, value] : readConfig(f.config)) {
    std::string opt = "--" + key;
    bool onCli = false;
    for (const auto* o : sub->get_options())
      if (o->check_name(opt)) {
        onCli = o->count() > 0;
        goto known;
      }
    throw std::runtime_error("unknown config key: " + key);
  known:
    if (onCli) continue;
    if (key == "code" || key == "codes") {
      f.codes = {value};
    } else if (key == "p2q") {
      f.noise.p2q = std::stod(value);
    } else if (key == "p1q") {
      f.noise.p1q = std::stod(value);
    } else if (key == "pms") {
      f.noise.pms = std::stod(value);
    } else if (key == "invT2") {
      f.noise.invT2 = std::stod(value);
    } else if (key == "rabi") {
      f.noise.rabi = std::stod(value);
    } else if (key == "t1q") {
      f.noise.t1q = std::stod(value);
    } else if (key == "t2q") {
      f.noise.t2q = std::stod(value);
    } else if (key == "layout") {
      f.layout = value;
    } else if (key == "mode") {
      f.mode = value;
    } else if (key == "shots") {
      f.shots = std::stoull(value);
    } else if (key == "seed") {
      f.seed = std::stoull(value);
    } else if (key == "kmax") {
      f.kMax = std::stoi(value);
    } else if (key == "threads") {
      f.threads = std::stoi(value);
    } else if (key == "out") {
      f.out = value;
    } else if (key == "x" && x) {
      *x = value;
    } else if (key == "y" && y) {
      *y = value;
    } else if (key == "summary" && summary) {
      *summary = value;
    } else {
      throw std::runtime_error("config key " + key +
                               " does not apply to this subcommand");
    }
  }
}

void addRunOptions(CLI::App* sub, RunFlags& f, bool withOut = true) {
  sub->add_option("--code,--codes", f.codes, "code name(s) or 'all'");
  sub->add_option("--p2q", f.noise.p2q, "two-qubit depolarizing probability (switches the noise model)")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--p1q", f.noise.p1q, "single-qubit overrotation probability")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--pms", f.noise.pms, "MS-gate overrotation probability")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--invT2", f.noise.invT2, "dephasing rate 1/T2 in 1/s")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--rabi", f.noise.rabi, "neighbour Rabi ratio (crosstalk strength)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--t1q", f.noise.t1q, "single-qubit gate time in us")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--t2q", f.noise.t2q, "two-qubit gate time in us")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--layout", f.layout, "ion ordering: identity, optimal or published");
  sub->add_option("--mode", f.mode, "direct or subset sampling");
  sub->add_option("--shots", f.shots, "shots (direct) or shots per stratum (subset)");
  sub->add_option("--seed", f.seed, "RNG seed");
  sub->add_option("--kmax", f.kMax, "highest sampled fault stratum in subset mode");
  sub->add_option("--threads", f.threads, "worker threads");
  if (withOut) sub->add_option("--out", f.out, "CSV destination, '-' for standard output");
  sub->add_option("--config", f.config, "flat key=value file; command-line flags override");
}

ExperimentResult runCell(const CodeSpec& code, Basis basis, const NoiseParams& np,
                         const RunFlags& f, uint64_t seed) {
  auto ctx = buildExperiment(code, basis, layoutFor(code, f.layout), np);
  if (f.mode == "subset") return runSubset(ctx, f.shots, seed, f.kMax);
  if (f.mode != "direct") throw std::runtime_error("mode must be direct or subset");
  return runDirect(ctx, f.shots, seed, f.threads);
}

uint64_t jobSeed(uint64_t seed, uint64_t job) {
  return seed ^ (0x9E3779B97F4A7C15ull * (job + 1));
}

// ------------------------------- codes ---------------------------------

int runCodes(const std::vector<std::string>& names, const std::string& jsonPath) {
  json all = json::array();
  for (CodeName cn : resolveCodes(names)) {
    const CodeSpec code = buildCode(cn);
    std::cout << code.nameStr() << "  [[9,1,3]], " << code.nTotal() << " ions ("
              << code.nData << " data + " << code.nAncilla << " ancilla)\n";
    json stabs = json::array();
    for (const auto& st : code.stabs) {
      std::cout << "  " << st.kind << " stabilizer " << supportString(st.op)
                << "  ancilla " << st.ancilla << "\n";
      stabs.push_back({{"kind", std::string(1, st.kind)},
                       {"support", st.listing},
                       {"ancilla", st.ancilla}});
    }
    std::cout << "  logical Z " << supportString(code.logicalZ) << ", logical X "
              << supportString(code.logicalX) << "\n";
    std::cout << "  prep Z "
              << (code.prepZ == PrepKind::UnitaryEncode ? "unitary" : "projective")
              << ", prep X "
              << (code.prepX == PrepKind::UnitaryEncode ? "unitary" : "projective");
    if (!code.gauge.empty()) std::cout << ", " << code.gauge.size() << " gauge operators";
    std::cout << "\n";
    all.push_back({{"name", code.nameStr()},
                   {"nData", code.nData},
                   {"nAncilla", code.nAncilla},
                   {"stabilizers", stabs},
                   {"logicalZ", supportString(code.logicalZ)},
                   {"logicalX", supportString(code.logicalX)}});
  }
  if (!jsonPath.empty()) {
    Sink s(jsonPath);
    s.out() << all.dump(2) << '\n';
    s.finish();
  }
  return 0;
}

// ------------------------------ compile --------------------------------

int runCompile(const std::vector<std::string>& names, const NoiseFlags& nf) {
  NoiseParams np = toNoise(nf);
  for (CodeName cn : resolveCodes(names)) {
    const CodeSpec code = buildCode(cn);
    for (Basis b : {Basis::Z, Basis::X}) {
      auto ctx = buildExperiment(code, b, identityLayout(code.nTotal()), np);
      Circuit compiled;
      compiled.nq = ctx.timed.nq;
      for (const auto& tg : ctx.timed.gates) compiled.gates.push_back(tg.g);
      GateCensus n = census(compiled);
      std::cout << code.nameStr() << ' ' << (b == Basis::Z ? 'Z' : 'X')
                << ": rotations=" << n.r1 << " xx=" << n.xx << " prep=" << n.prep
                << " meas=" << n.meas << " duration=" << num(ctx.timed.totalDuration)
                << "us\n";
    }
  }
  return 0;
}

// ------------------------------- chain ---------------------------------

json chainJson(CodeName cn) {
  const ChainStudy& s = studyFor(cn);
  auto pairList = [](const std::vector<std::pair<int, int>>& ps) {
    json a = json::array();
    for (auto [u, v] : ps) a.push_back({u, v});
    return a;
  };
  auto rep = [&](const ChainReport& r) {
    return json{{"order", r.order},
                {"extraEdgeCount", r.extraEdgeCount},
                {"timeCost", r.timeCost},
                {"badAdjacencies", pairList(r.badAdjacencies)}};
  };
  ChainReport best = evaluateChain(s.graph, s.weights, s.best.order);
  return json{{"code", codeNameStr(cn)},
              {"vertices", s.graph.n},
              {"edges", pairList(s.graph.edges())},
              {"optimal", rep(best)},
              {"published", rep(s.published)},
              {"diff",
               {{"sameOrder", s.best.order == s.published.order},
                {"extraEdgeDelta", s.published.extraEdgeCount - s.best.extraEdges}}}};
}

void printChain(const json& c) {
  std::cout << c["code"].get<std::string>() << ": " << c["vertices"] << " ions, "
            << c["edges"].size() << " safe adjacencies\n";
  auto orderLine = [&](const char* title, const json& r) {
    std::cout << "  " << title << ":";
    for (const auto& q : r["order"]) std::cout << ' ' << q;
    std::cout << "  (extra edges " << r["extraEdgeCount"] << ", pulse cost "
              << r["timeCost"] << ")\n";
    if (!r["badAdjacencies"].empty()) {
      std::cout << "    bad adjacencies:";
      for (const auto& e : r["badAdjacencies"])
        std::cout << " (" << e[0] << "," << e[1] << ")";
      std::cout << "\n";
    }
  };
  orderLine("optimal  ", c["optimal"]);
  orderLine("published", c["published"]);
  int delta = c["diff"]["extraEdgeDelta"].get<int>();
  if (delta == 0)
    std::cout << "  published ordering is optimal in extra edges\n";
  else
    std::cout << "  published ordering uses " << delta << " more extra edge"
              << (delta == 1 ? "" : "s") << " than the optimum\n";
}

int runChain(const std::vector<std::string>& names, const std::string& jsonPath) {
  json all = json::array();
  for (CodeName cn : resolveCodes(names)) {
    json c = chainJson(cn);
    printChain(c);
    all.push_back(std::move(c));
  }
  if (!jsonPath.empty()) {
    Sink s(jsonPath);
    s.out() << all.dump(2) << '\n';
    s.finish();
  }
  return 0;
}

// ------------------------------ simulate -------------------------------

int runSimulate(const RunFlags& f) {
  NoiseParams np = toNoise(f.noise);
  Sink sink(f.out);
  sink.out() << kCsvHeader << '\n';
  uint64_t job = 0;
  for (CodeName cn : resolveCodes(f.codes)) {
    const CodeSpec code = buildCode(cn);
    for (Basis b : {Basis::Z, Basis::X}) {
      std::cerr << "simulate " << code.nameStr() << ' ' << (b == Basis::Z ? 'Z' : 'X')
                << "\n";
      writeRow(sink.out(), runCell(code, b, np, f, jobSeed(f.seed, job++)), np);
    }
  }
  sink.finish();
  return 0;
}

// ------------------------------- sweep ---------------------------------

struct CellOutcome {
  NoiseParams np;
  ExperimentResult res[2];  // Z, X
};

int runSweep(const RunFlags& f, const std::string& xSpec, const std::string& ySpec,
             const std::string& summaryPath) {
  AxisSpec ax = parseAxis(xSpec);
  std::vector<double> xs = axisValues(ax);
  AxisSpec ay;
  std::vector<double> ys{0.0};
  if (!ySpec.empty()) {
    ay = parseAxis(ySpec);
    ys = axisValues(ay);
  }
  std::vector<CodeName> codes = resolveCodes(f.codes);

  struct Job {
    size_t cell, codeIdx;
  };
  std::vector<Job> jobs;
  std::vector<NoiseParams> cellNoise(xs.size() * ys.size());
  for (size_t j = 0; j < ys.size(); ++j)
    for (size_t i = 0; i < xs.size(); ++i) {
      size_t cell = j * xs.size() + i;
      NoiseParams np = toNoise(f.noise);
      applyParam(np, ax.param, xs[i]);
      if (!ySpec.empty()) applyParam(np, ay.param, ys[j]);
      cellNoise[cell] = np;
      for (size_t c = 0; c < codes.size(); ++c) jobs.push_back({cell, c});
    }

  std::vector<CellOutcome> results(jobs.size());
  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  auto worker = [&] {
    for (size_t w; (w = next.fetch_add(1)) < jobs.size();) {
      const Job& jb = jobs[w];
      const CodeSpec code = buildCode(codes[jb.codeIdx]);
      CellOutcome& out = results[w];
      out.np = cellNoise[jb.cell];
      RunFlags local = f;
      local.threads = 1;
      for (Basis b : {Basis::Z, Basis::X})
        out.res[b == Basis::Z ? 0 : 1] =
            runCell(code, b, out.np, local, jobSeed(f.seed, 2 * w + (b == Basis::X)));
      size_t d = done.fetch_add(1) + 1;
      std::cerr << "sweep cell " << d << "/" << jobs.size() << "\n";
    }
  };
  int nThreads = std::max(1, std::min(f.threads, int(jobs.size())));
  if (nThreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nThreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Sink sink(f.out);
  sink.out() << kCsvHeader << '\n';
  for (const auto& out : results)
    for (const auto& r : out.res) writeRow(sink.out(), r, out.np);
  sink.finish();

  if (summaryPath.empty()) return 0;

  // per-cell best code and its comparator verdict, then per-code crossing
  // points of combined rate against the comparator along the swept x
  auto combined = [&](size_t cell, size_t codeIdx) {
    const CellOutcome& o = results[cell * codes.size() + codeIdx];
    return 0.5 * (o.res[0].rate + o.res[1].rate);
  };
  json regions = json::array();
  for (size_t j = 0; j < ys.size(); ++j)
    for (size_t i = 0; i < xs.size(); ++i) {
      size_t cell = j * xs.size() + i;
      size_t best = 0;
      for (size_t c = 1; c < codes.size(); ++c)
        if (combined(cell, c) < combined(cell, best)) best = c;
      const CellOutcome& o = results[cell * codes.size() + best];
      regions.push_back({{"x", xs[i]},
                         {"y", ys[j]},
                         {"best", codeNameStr(codes[best])},
                         {"rate", combined(cell, best)},
                         {"belowThreshold", combined(cell, best) < o.res[0].pPhys}});
    }
  json thresholds = json::object();
  for (size_t c = 0; c < codes.size(); ++c) {
    json line = json::array();
    for (size_t j = 0; j < ys.size(); ++j)
      for (size_t i = 0; i + 1 < xs.size(); ++i) {
        size_t cell0 = j * xs.size() + i, cell1 = cell0 + 1;
        double f0 = combined(cell0, c), f1 = combined(cell1, c);
        double g0 = results[cell0 * codes.size() + c].res[0].pPhys;
        double g1 = results[cell1 * codes.size() + c].res[0].pPhys;
        if (f0 <= 0.0 || f1 <= 0.0 || g0 <= 0.0 || g1 <= 0.0) continue;
        if ((f0 - g0) * (f1 - g1) >= 0.0) continue;
        if (xs[i] <= 0.0 || xs[i + 1] <= 0.0) continue;
        line.push_back({logLinearCrossing(xs[i], xs[i + 1], f0, f1, g0, g1), ys[j]});
      }
    thresholds[codeNameStr(codes[c])] = line;
  }
  json axes = {{"x", {{"param", ax.param}, {"values", xs}}}};
  if (!ySpec.empty()) axes["y"] = {{"param", ay.param}, {"values", ys}};
  json summary = {{"axes", axes},
                  {"codes", json::array()},
                  {"regions", regions},
                  {"pseudothreshold", thresholds}};
  for (CodeName cn : codes) summary["codes"].push_back(codeNameStr(cn));
  Sink s(summaryPath);
  s.out() << summary.dump(2) << '\n';
  s.finish();
  return 0;
}

// -------------------------------- bias ---------------------------------

int runBias(const RunFlags& f, const std::string& xSpec, const std::string& ySpec) {
  std::vector<std::vector<double>> grid;
  std::vector<AxisSpec> axes;
  for (const std::string* spec : {&xSpec, &ySpec}) {
    if (spec->empty()) continue;
    axes.push_back(parseAxis(*spec));
    grid.push_back(axisValues(axes.back()));
  }
  Sink sink(f.out);
  sink.out() << "code,p2q,p1q,pms,invT2,rabi,shots,viol_x,viol_z,rate_x,rate_z,bias_zz\n";
  uint64_t job = 0;
  std::vector<CodeName> codes = resolveCodes(f.codes);
  size_t cells = 1;
  for (const auto& g : grid) cells *= g.size();
  for (size_t cell = 0; cell < cells; ++cell) {
    NoiseParams np = toNoise(f.noise);
    size_t rem = cell;
    for (size_t a = 0; a < axes.size(); ++a) {
      applyParam(np, axes[a].param, grid[a][rem % grid[a].size()]);
      rem /= grid[a].size();
    }
    for (CodeName cn : codes) {
      const CodeSpec code = buildCode(cn);
      std::cerr << "bias cell " << cell + 1 << "/" << cells << " " << code.nameStr()
                << "\n";
      auto rz = runCell(code, Basis::Z, np, f, jobSeed(f.seed, job++));
      auto rx = runCell(code, Basis::X, np, f, jobSeed(f.seed, job++));
      sink.out() << code.nameStr();
      for (const char* key : {"p2q", "p1q", "pms", "invT2", "rabi"})
        sink.out() << ',' << num(paramOf(np, key));
      sink.out() << ',' << f.shots << ',' << rx.violations << ',' << rz.violations
                 << ',' << num(rx.rate) << ',' << num(rz.rate) << ',';
      if (rx.rate + rz.rate > 0.0) sink.out() << num(biasZZ(rx, rz));
      sink.out() << '\n';
    }
  }
  sink.finish();
  return 0;
}

// ------------------------------ validate -------------------------------

void checkLine(const char* what, bool ok, int& failures) {
  std::cout << "  " << what << ": " << (ok ? "ok" : "FAIL") << "\n";
  if (!ok) ++failures;
}

int runValidate(const std::vector<std::string>& names, uint64_t seed) {
  int failures = 0;
  for (CodeName cn : resolveCodes(names)) {
    const CodeSpec code = buildCode(cn);
    std::cout << code.nameStr() << "\n";

    bool commute = true;
    for (size_t i = 0; i < code.stabs.size(); ++i)
      for (size_t j = i + 1; j < code.stabs.size(); ++j)
        commute &= code.stabs[i].op.commutesWith(code.stabs[j].op);
    for (const auto& st : code.stabs) {
      commute &= st.op.commutesWith(code.logicalZ);
      commute &= st.op.commutesWith(code.logicalX);
      for (const auto& g : code.gauge) commute &= st.op.commutesWith(g);
    }
    checkLine("stabilizer group commutes", commute, failures);
    checkLine("logical operators anticommute",
              !code.logicalZ.commutesWith(code.logicalX), failures);

    bool dist3 = true;
    auto dataPauli = [](int kind, int q) {
      return kind == 0 ? Pauli::X(q) : kind == 1 ? Pauli::Y(q) : Pauli::Z(q);
    };
    auto undetectedLogical = [&](const Pauli& e) {
      return syndromeBits(code, e) == 0 &&
             (!e.commutesWith(code.logicalZ) || !e.commutesWith(code.logicalX));
    };
    for (int q = 0; q < code.nData && dist3; ++q)
      for (int k = 0; k < 3 && dist3; ++k) {
        if (undetectedLogical(dataPauli(k, q))) dist3 = false;
        for (int r = q + 1; r < code.nData && dist3; ++r)
          for (int k2 = 0; k2 < 3; ++k2)
            if (undetectedLogical(mul(dataPauli(k, q), dataPauli(k2, r)))) {
              dist3 = false;
              break;
            }
      }
    checkLine("no undetected logical of weight <= 2", dist3, failures);

    for (Basis b : {Basis::Z, Basis::X}) {
      auto quiet = buildExperiment(code, b, identityLayout(code.nTotal()), NoiseParams{});
      auto r = runDirect(quiet, 2000, seed);
      checkLine(b == Basis::Z ? "noiseless Bell parity, Z readout"
                              : "noiseless Bell parity, X readout",
                r.violations == 0, failures);

      NoiseParams ion;
      ion.eps1q = 0.01;
      ion.epsMS = 0.01;
      ion.T2 = 1.0;
      auto ionCtx = buildExperiment(code, b, identityLayout(code.nTotal()), ion);
      checkLine(b == Basis::Z ? "single-fault tolerance (ion noise, Z)"
                              : "single-fault tolerance (ion noise, X)",
                k1Exhaustive(ionCtx).failures == 0, failures);

      NoiseParams depol;
      depol.depolarizingP2 = 1e-3;
      auto depolCtx = buildExperiment(code, b, identityLayout(code.nTotal()), depol);
      checkLine(b == Basis::Z ? "single-fault tolerance (depolarizing, Z)"
                              : "single-fault tolerance (depolarizing, X)",
                k1Exhaustive(depolCtx).failures == 0, failures);
    }
  }
  std::cout << (failures ? "validation FAILED\n" : "all checks passed\n");
  return failures ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compass-code ion chain simulator"};
  app.require_subcommand(1);

  std::vector<std::string> codeNames;
  std::string jsonPath;

  auto* cmdCodes = app.add_subcommand("codes", "list code definitions");
  cmdCodes->add_option("--code,--codes", codeNames, "code name(s) or 'all'");
  cmdCodes->add_option("--json", jsonPath, "also write a JSON listing");

  NoiseFlags compileNoise;
  auto* cmdCompile = app.add_subcommand("compile", "compiled gate counts per experiment");
  cmdCompile->add_option("--code,--codes", codeNames, "code name(s) or 'all'");
  cmdCompile->add_option("--t1q", compileNoise.t1q, "single-qubit gate time in us");
  cmdCompile->add_option("--t2q", compileNoise.t2q, "two-qubit gate time in us");

  auto* cmdChain = app.add_subcommand("chain", "crosstalk graph and chain optimizer");
  cmdChain->add_option("--code,--codes", codeNames, "code name(s) or 'all'");
  cmdChain->add_option("--json", jsonPath, "also write the reports as JSON");

  RunFlags sim;
  auto* cmdSim = app.add_subcommand("simulate", "Monte Carlo logical error rates");
  addRunOptions(cmdSim, sim);

  RunFlags sweep;
  std::string sweepX, sweepY, summaryPath;
  auto* cmdSweep = app.add_subcommand("sweep", "grid scan with CSV and JSON summary");
  addRunOptions(cmdSweep, sweep);
  cmdSweep->add_option("--x", sweepX, "swept axis, name:min:max:lin|log:points");
  cmdSweep->add_option("--y", sweepY, "second axis");
  cmdSweep->add_option("--summary", summaryPath, "JSON summary destination");

  RunFlags bias;
  std::string biasX, biasY;
  auto* cmdBias = app.add_subcommand("bias", "ZZ-violation share of logical failures");
  addRunOptions(cmdBias, bias);
  cmdBias->add_option("--x,--grid", biasX, "swept axis, name:min:max:lin|log:points");
  cmdBias->add_option("--y", biasY, "second axis");

  uint64_t validateSeed = 1;
  auto* cmdValidate = app.add_subcommand("validate", "code, circuit and tolerance checks");
  cmdValidate->add_option("--code,--codes", codeNames, "code name(s) or 'all'");
  cmdValidate->add_option("--seed", validateSeed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmdCodes->parsed()) return runCodes(codeNames, jsonPath);
    if (cmdCompile->parsed()) return runCompile(codeNames, compileNoise);
    if (cmdChain->parsed()) return runChain(codeNames, jsonPath);
    if (cmdSim->parsed()) {
      applyRunConfig(cmdSim, sim, nullptr, nullptr, nullptr);
      return runSimulate(sim);
    }
    if (cmdSweep->parsed()) {
      applyRunConfig(cmdSweep, sweep, &sweepX, &sweepY, &summaryPath);
      if (sweepX.empty()) throw std::runtime_error("sweep needs an --x axis");
      return runSweep(sweep, sweepX, sweepY, summaryPath);
    }
    if (cmdBias->parsed()) {
      applyRunConfig(cmdBias, bias, &biasX, &biasY, nullptr);
      return runBias(bias, biasX, biasY);
    }
    if (cmdValidate->parsed()) return runValidate(codeNames, validateSeed);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
