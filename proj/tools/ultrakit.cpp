// ultrakit: batch checks over finite spaces, categories and groupoids.
//
//   ultrakit etale data/sierpinski_collapse.json
//   ultrakit reconstruct --max-points 3 --fiber-bound 2 --format json
//   ultrakit coherence --seed 42 --instances 100

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ultrakit/document.hpp"
#include "ultrakit/ultrakit.hpp"

namespace {

using namespace ultrakit;

struct Options {
  std::uint64_t seed = 0;
  std::size_t maxPoints = 3;
  std::size_t fiberBound = 2;
  std::size_t probePeriod = 4;
  std::size_t instances = 0;  // 0: the suite's default
  std::size_t jobs = 1;
  std::string format = "text";
  std::string input;
};

struct Record {
  std::string suite, instance;
  bool pass = true;
  Json witness;  // null on pass
};

using Records = std::vector<Record>;

// Exit 2 paths.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "max-points=3,fiber-bound=2,probe-period=4,seed=7"
void applyEnvBounds(Options& o) {
  const char* env = std::getenv("ULTRAKIT_BOUNDS");
  if (!env) return;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("ULTRAKIT_BOUNDS: expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    std::uint64_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoull(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw ConfigError("ULTRAKIT_BOUNDS: '" + val + "' is not a number");
    }
    if (key == "max-points") o.maxPoints = v;
    else if (key == "fiber-bound") o.fiberBound = v;
    else if (key == "probe-period") o.probePeriod = v;
    else if (key == "seed") o.seed = v;
    else if (key == "instances") o.instances = v;
    else if (key == "jobs") o.jobs = v;
    else throw ConfigError("ULTRAKIT_BOUNDS: unknown key '" + key + "'");
  }
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json loadInput(const Options& o) { return parseDocument(readFile(o.input)); }

// Runs f(i) for i < n on up to `jobs` threads; results keep index order.
Records parallelRecords(std::size_t n, std::size_t jobs, const std::function<Records(std::size_t)>& f) {
  std::vector<Records> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex errMu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errMu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < std::max<std::size_t>(1, std::min(jobs, n)); ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  Records all;
  for (auto& r : out) all.insert(all.end(), r.begin(), r.end());
  return all;
}

Record pass(std::string suite, std::string instance) { return {std::move(suite), std::move(instance), true, nullptr}; }
Record failed(std::string suite, std::string instance, Json witness) {
  return {std::move(suite), std::move(instance), false, std::move(witness)};
}

std::vector<FiniteSpace> spacesUpTo(std::size_t maxPoints) {
  if (maxPoints > 4) throw ConfigError("--max-points above 4 is not supported for exhaustive suites");
  std::vector<FiniteSpace> out;
  for (std::size_t n = 1; n <= maxPoints; ++n)
    for (auto& T : enumerateSpaces(n)) out.push_back(T);
  return out;
}

std::vector<FiniteSpace> inputSpaces(const Options& o) {
  if (!o.input.empty()) return {spaceFromJson(loadInput(o))};
  return spacesUpTo(o.maxPoints);
}

std::string spaceId(const FiniteSpace& T) { return spaceDocument(T); }

// ---- subcommands --------------------------------------------------------

Records runValidate(const Options& o) {
  Json j = loadInput(o);
  std::string kind = j.contains("T0") ? "groupoid" : j.contains("map") ? "map" : j.contains("opens") ? "space" : j.contains("objects") ? "category" : "";
  if (kind.empty()) throw ConfigError("unrecognised document: expected a space, map, category or groupoid");
  try {
    if (kind == "space") spaceFromJson(j);
    if (kind == "category") categoryFromJson(j);
    if (kind == "groupoid") groupoidFromJson(j);
    if (kind == "map") {
      SpaceMap f = mapFromJson(j);
      if (!mapContinuous(f)) return {failed("validate", kind, {{"error", "NotContinuous"}, {"document", j}})};
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::BoundExceeded) throw;
    return {failed("validate", kind, {{"error", to_string(e.kind())}, {"detail", e.detail()}, {"document", j}})};
  }
  return {pass("validate", kind)};
}

Records runEtale(const Options& o) {
  SpaceMap p = mapFromJson(loadInput(o));
  if (!mapContinuous(p)) return {failed("etale", "input", {{"error", "NotContinuous"}, {"document", toJson(p)}})};
  EtaleVerdict v = etaleCheck(p);
  if (v.isEtale) return {pass("etale", "input")};
  Json cx = {{"point", v.counterexample->point}, {"target", v.counterexample->target}, {"lifts", v.counterexample->lifts}};
  return {failed("etale", "input", {{"counterexample", cx}, {"document", toJson(p)}})};
}

Records runConvergence(const Options& o) {
  auto spaces = inputSpaces(o);
  return parallelRecords(spaces.size(), o.jobs, [&](std::size_t i) -> Records {
    const FiniteSpace& T = spaces[i];
    std::size_t n = T.size();
    auto rel = ucvgRelation(T);
    auto rb = relBetaValidate(n, rel);
    if (!rb.ok) return {failed("convergence", spaceId(T), {{"relation", rb.witness}, {"space", toJson(T)}})};
    for (Mask A = 0; A <= T.full(); ++A) {
      bool open = std::find(T.opens().begin(), T.opens().end(), A) != T.opens().end();
      bool byConvergence = true;
      for (std::size_t a = 0; a < n; ++a)
        if (has(A, a) && (rel[a] & ~A)) byConvergence = false;
      auto d = derivedSets(T, A);
      Mask interior = 0;
      for (Mask U : T.opens())
        if ((U & ~A) == 0) interior |= U;
      if (open != byConvergence || d.interior != interior)
        return {failed("convergence", spaceId(T), {{"subset", maskStr(A, n)}, {"space", toJson(T)}})};
    }
    // every factorial-indexed family with period <= probe period
    forEachUPFunction(IndexSet::natural(), n, 0, o.probePeriod, 256, [&](const UPElement& x) {
      limitPoints(T, PointFamily{Ultrafilter::factorial(), x});
    });
    return {pass("convergence", spaceId(T))};
  });
}

Records runRoundtripSpace(const Options& o) {
  auto spaces = inputSpaces(o);
  return parallelRecords(spaces.size(), o.jobs, [&](std::size_t i) -> Records {
    const FiniteSpace& T = spaces[i];
    FiniteSpace back = ucvgToTopology(T.size(), ucvgRelation(T));
    if (back == T) return {pass("roundtrip-space", spaceId(T))};
    return {failed("roundtrip-space", spaceId(T), {{"space", toJson(T)}, {"recovered", toJson(back)}})};
  });
}

Records runReconstruct(const Options& o) {
  if (o.fiberBound > 3) throw ConfigError("--fiber-bound above 3 is not supported");
  auto spaces = inputSpaces(o);
  return parallelRecords(spaces.size(), o.jobs, [&](std::size_t i) -> Records {
    EvReport r = evEquivalenceCheck(spaces[i], o.fiberBound);
    if (r.ok) return {pass("reconstruct", spaceId(spaces[i]))};
    return {failed("reconstruct", spaceId(spaces[i]), {{"detail", r.witness}, {"space", toJson(spaces[i])}})};
  });
}

Records runAlexandroff(const Options& o) {
  std::vector<FiniteCategory> cats;
  if (!o.input.empty()) cats.push_back(categoryFromJson(loadInput(o)));
  else cats = enumerateSmallCategories(std::min<std::size_t>(o.maxPoints, 2), 2);
  return parallelRecords(cats.size(), o.jobs, [&](std::size_t i) -> Records {
    const FiniteCategory& C = cats[i];
    auto X = std::make_shared<const AlexVUlt>(C);
    std::string id = C.str();
    Json bad;
    enumerateSetFunctors(C, o.fiberBound, [&](const SetFunctor& F) {
      Presheaf P(C, F);
      UltraSheaf A = presheafToUltrasheaf(P, X);
      if (!(ultrasheafToPresheaf(A) == P)) {
        bad = {{"presheaf", {{"fiber", P.fiber}, {"action", P.action}}}, {"category", toJson(C)}};
        return false;
      }
      return true;
    });
    if (bad.is_null())
      enumerateSetFunctors(X->points(), o.fiberBound, [&](const SetFunctor& F) {
        UltraSheaf A(X, F);
        if (!ultrasheafValidate(A).ok) return true;
        UltraSheaf back = presheafToUltrasheaf(ultrasheafToPresheaf(A), X);
        if (!(static_cast<const SetFunctor&>(back) == static_cast<const SetFunctor&>(A))) {
          bad = {{"ultrasheaf", {{"fiber", A.fiber}, {"action", A.action}}}, {"category", toJson(C)}};
          return false;
        }
        return true;
      });
    if (bad.is_null()) return {pass("alexandroff", id)};
    return {failed("alexandroff", id, bad)};
  });
}

Records runDescent(const Options& o) {
  Json j = loadInput(o);
  Records out;
  if (j.contains("T0")) {
    TopGroupoid G = groupoidFromJson(j);
    EquivalenceReport r = equivariantComparison(G, o.fiberBound);
    std::string id = "equivariant-sheaves";
    if (r.ok()) out.push_back(pass("descent", id));
    else out.push_back(failed("descent", id, {{"detail", r.witness}, {"groupoid", j}}));
    return out;
  }
  SpaceMap f = mapFromJson(j);
  if (!mapContinuous(f)) return {failed("descent", "input", {{"error", "NotContinuous"}, {"document", toJson(f)}})};
  auto X = std::make_shared<const PtSpaceVUlt>(f.source);
  auto Z = std::make_shared<const PtSpaceVUlt>(f.target);
  VUltFunctor pi = spaceFunctor(X, Z, f);
  ProbeConfig cfg;
  cfg.period = o.probePeriod;
  CriterionReport cr = effectiveDescentCriterion(pi, cfg);
  if (cr.holds()) out.push_back(pass("descent", "criterion"));
  else out.push_back(failed("descent", "criterion", {{"detail", cr.witness}, {"probe", cr.probe}, {"document", toJson(f)}}));
  CodescentDiagram K = kernelGroupoid(pi);
  if (auto v = simplicialViolation(K)) out.push_back(failed("descent", "kernel", {{"detail", *v}, {"document", toJson(f)}}));
  else out.push_back(pass("descent", "kernel"));
  DescentCocone c = canonicalCocone(pi, K);
  CoconeCheck cc = coconeValidate(K, c);
  if (cc.ok) out.push_back(pass("descent", "cocone"));
  else out.push_back(failed("descent", "cocone", {{"condition", cc.condition}, {"detail", cc.witness}}));
  UniversalityReport u = universalityCheck(K, c);
  for (auto& a : u.apexes) {
    std::string id = u.battery + ":" + a.apex;
    if (a.ok()) out.push_back(pass("descent", id));
    else out.push_back(failed("descent", id, {{"detail", a.witness}, {"document", toJson(f)}}));
  }
  return out;
}

Records runCoherence(const Options& o) {
  std::size_t n = o.instances ? o.instances : 100;
  SeedTree seed(o.seed);
  CoherenceConfig cfg;
  cfg.probePeriod = o.probePeriod;
  cfg.maxCarrier = std::min<std::size_t>(o.maxPoints, 3);
  Records out = parallelRecords(2 * n, o.jobs, [&](std::size_t i) -> Records {
    bool fin = i < n;
    std::size_t inst = fin ? i : i - n;
    std::string kind = fin ? "fin" : "factorial";
    auto rng = seed.child(kind).child(inst).engine();
    LawReport rep;
    if (fin) coherenceFinInstance(rng, cfg, inst, rep);
    else coherenceFactorialInstance(rng, cfg, inst, rep);
    std::string id = kind + "/" + std::to_string(inst);
    if (rep.ok()) return {pass("coherence", id)};
    const auto& v = rep.violations.front();
    return {failed("coherence", id, {{"law", v.law}, {"detail", v.witness}, {"seed", o.seed}, {"kind", kind}, {"instance", inst}})};
  });
  std::vector<std::pair<std::string, Ultrafilter>> ufs = {
      {"delta0", Ultrafilter::principal(IndexSet::natural(), 0)},
      {"delta7", Ultrafilter::principal(IndexSet::natural(), 7)},
      {"factorial", Ultrafilter::factorial()},
      {"push", ufPushforward(Ultrafilter::factorial(), UPMap::affine(3, 1))},
      {"sum", ufSum(Ultrafilter::factorial(), UFFamily::constant(IndexSet::natural(), Ultrafilter::principal(IndexSet::fin(2), 1)))}};
  for (std::size_t k = 0; k < ufs.size(); ++k) {
    auto rng = seed.child("ultrafilter-laws").child(k).engine();
    LawReport rep = ufLawCheck(ufs[k].second, 200, rng, k);
    if (rep.ok()) out.push_back(pass("ultrafilter-laws", ufs[k].first));
    else out.push_back(failed("ultrafilter-laws", ufs[k].first, {{"law", rep.violations.front().law}, {"detail", rep.violations.front().witness}}));
  }
  return out;
}

Records runLaws(const Options& o) {
  if (o.fiberBound > 3) throw ConfigError("--fiber-bound above 3 is not supported");
  std::vector<FiniteSpace> spaces = o.input.empty() ? spacesUpTo(std::min<std::size_t>(o.maxPoints, 3)) : inputSpaces(o);
  std::size_t per = o.instances ? o.instances : 10;
  SeedTree seed(o.seed);
  return parallelRecords(spaces.size(), o.jobs, [&](std::size_t i) -> Records {
    auto X = std::make_shared<const PtSpaceVUlt>(spaces[i]);
    LawReport rep = pretoposLawSuite(X, o.fiberBound, per, seed.child("laws").child(i));
    if (rep.ok()) return {pass("laws", spaceId(spaces[i]))};
    const auto& v = rep.violations.front();
    return {failed("laws", spaceId(spaces[i]),
                   {{"law", v.law}, {"detail", v.witness}, {"instance", v.instance}, {"seed", o.seed}, {"space", toJson(spaces[i])}})};
  });
}

void emit(const Records& rs, const Options& o) {
  std::size_t failures = 0;
  for (auto& r : rs) {
    failures += !r.pass;
    if (o.format == "json") {
      Json j = {{"suite", r.suite}, {"instance", r.instance}, {"status", r.pass ? "pass" : "fail"}, {"witness", r.witness}};
      std::cout << j.dump() << '\n';
    } else {
      std::cout << (r.pass ? "pass " : "FAIL ") << r.suite << ' ' << r.instance;
      if (!r.pass) std::cout << "  " << r.witness.dump();
      std::cout << '\n';
    }
  }
  if (o.format != "json") std::cout << rs.size() - failures << "/" << rs.size() << " checks passed\n";
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  try {
    applyEnvBounds(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Checks for ultrafilters, finite spaces, ultrasheaves and descent"};
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "seed for sampled suites");
  app.add_option("--max-points", o.maxPoints, "largest space enumerated");
  app.add_option("--fiber-bound", o.fiberBound, "largest fiber enumerated");
  app.add_option("--probe-period", o.probePeriod, "largest period of probe families");
  app.add_option("--instances", o.instances, "instances for sampled suites");
  app.add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);

  struct Cmd {
    const char* name;
    const char* help;
    bool input;
    bool required;
    Records (*run)(const Options&);
  };
  const Cmd cmds[] = {
      {"validate", "validate a space, map, category or groupoid document", true, true, runValidate},
      {"etale", "decide whether a map document is a local homeomorphism", true, true, runEtale},
      {"convergence", "ultraconvergence characterisations of open sets", true, false, runConvergence},
      {"roundtrip-space", "topology -> ultraconvergence -> topology", true, false, runRoundtripSpace},
      {"reconstruct", "ultrasheaves versus etale spaces", true, false, runReconstruct},
      {"alexandroff", "presheaf round trips over small categories", true, false, runAlexandroff},
      {"descent", "descent criterion and universality for a map or groupoid", true, true, runDescent},
      {"coherence", "associator, unitor and reindexing laws", false, false, runCoherence},
      {"laws", "pretopos laws for ultrasheaves", true, false, runLaws},
  };
  Records (*chosen)(const Options&) = nullptr;
  for (auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    if (c.input) {
      auto* opt = sub->add_option("input", o.input, "input document");
      if (c.required) opt->required();
    }
    sub->callback([&chosen, run = c.run]() { chosen = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (o.maxPoints == 0 || o.fiberBound == 0 || o.probePeriod == 0) {
    std::cerr << "error: bounds must be positive\n";
    return 2;
  }

  try {
    Records rs = chosen(o);
    emit(rs, o);
    return std::all_of(rs.begin(), rs.end(), [](const Record& r) { return r.pass; }) ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::TheoremMismatch) return 1;
    return 2;
  }
}
