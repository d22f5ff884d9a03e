// hecke: structure constants, local series, double-coset listings and
// identity verification from the command line.
//
// Exit codes: 0 pass, 1 counterexample, 2 usage or parse error,
// 3 internal invariant breach (ill-defined product, overflow).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cache.hpp"
#include "hecke/hecke.hpp"

namespace {

using namespace hecke;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string system = "gl";
  int r = 2;
  std::int64_t p = 2;
  std::optional<int> n;
  std::int64_t bound = 100;
  bool json_out = false;
  std::string cache_dir;
  bool no_cache = false;
  bool no_uniformity = false;
  unsigned threads = 1;
  std::string left, right, target;
};

RingOptions ring_options(const Options& o) { return {.check_uniformity = !o.no_uniformity}; }

std::optional<std::filesystem::path> cache_root(const Options& o) {
  if (o.no_cache) return std::nullopt;
  if (!o.cache_dir.empty()) return std::filesystem::path(o.cache_dir);
  return cli::default_cache_dir();
}

std::string gl_tag(int r) { return "gl" + std::to_string(r); }

template <class Ring>
void attach(Ring& ring, const Options& o, const std::string& tag) {
  if (auto root = cache_root(o))
    ring.attach_store(std::make_shared<cli::FileProductStore<typename Ring::Key>>(*root, tag, ring.prime()));
}

template <class Key>
std::function<std::shared_ptr<ProductStore<Key>>(std::int64_t)> store_factory(const Options& o, std::string tag) {
  auto root = cache_root(o);
  if (!root) return {};
  return [root = *root, tag](std::int64_t p) { return std::make_shared<cli::FileProductStore<Key>>(root, tag, p); };
}

json parse_key_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
  }
  try {
    return json::parse("[" + text + "]");
  } catch (const json::parse_error&) {
    throw UsageError("cannot parse key '" + text + "'");
  }
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<std::int64_t>>>();
  Matrix m(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw UsageError("matrix must be square");
    for (std::size_t k = 0; k < rows.size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

/// Exponent list ("0,1", [0,1], {"exponents":[0,1]}) or {"matrix": ...}.
gl::Key parse_gl_key(const gl::System& sys, const std::string& text) {
  const json j = parse_key_text(text);
  gl::Key k;
  if (j.is_object() && j.contains("matrix")) {
    const Matrix m = matrix_from_json(j.at("matrix"));
    if (m.dim() != sys.rank()) throw UsageError("matrix size does not match --r");
    k = sys.double_key(m);
  } else {
    k = KeyCodec<ExpVector>::decode(j);
  }
  if (static_cast<int>(k.size()) != sys.rank()) throw UsageError("key length does not match --r");
  return k;
}

/// {"matrix": [[..],[..]], "translation": [..]} for any element of the double coset.
heis::Element parse_heis_key(const heis::System& sys, const std::string& text) {
  const json j = parse_key_text(text);
  if (!j.is_object()) throw UsageError("heisenberg keys are objects with matrix and translation");
  heis::Element e = KeyCodec<heis::Element>::decode(j);
  return sys.double_key(e);
}

template <class Key>
json element_doc(const std::string& system, std::optional<int> r, std::optional<std::int64_t> p,
                 const HeckeElement<Key>& x) {
  return ElementDoc<Key>{system, r, p, x}.to_json();
}

json base_doc(const char* schema, const std::string& command) {
  return {{"schema", schema}, {"engine", kEngineVersion}, {"command", command}};
}

void require_system(const Options& o) {
  if (o.system != "gl" && o.system != "heis") throw UsageError("--system must be gl or heis");
}

int cmd_mul(const Options& o) {
  require_system(o);
  if (o.left.empty() || o.right.empty()) throw UsageError("mul needs --left and --right");
  json doc = base_doc(kElementSchema, "mul");
  if (o.system == "gl") {
    gl::Ring ring(gl::System(o.r, o.p), ring_options(o));
    attach(ring, o, gl_tag(o.r));
    const auto a = parse_gl_key(ring.system(), o.left);
    const auto b = parse_gl_key(ring.system(), o.right);
    doc = element_doc("gl", o.r, o.p, ring.key_product(a, b));
  } else {
    heis::Ring ring(heis::System(o.p), ring_options(o));
    attach(ring, o, "heis");
    const auto a = parse_heis_key(ring.system(), o.left);
    const auto b = parse_heis_key(ring.system(), o.right);
    doc = element_doc("heis", std::nullopt, o.p, ring.key_product(a, b));
  }
  std::cout << doc.dump(o.json_out ? -1 : 2) << '\n';
  return 0;
}

int cmd_series(const Options& o) {
  require_system(o);
  const int n = o.n.value_or(4);
  if (n < 0) throw UsageError("--N must be nonnegative");
  json doc = base_doc("hecke.series/1", "series");
  doc["system"] = o.system;
  if (o.system == "gl") doc["r"] = o.r;
  doc["p"] = o.p;
  doc["N"] = n;
  json rows = json::array();
  auto emit = [&](int k, const json& terms) { rows.push_back({{"k", k}, {"terms", terms}}); };
  if (o.system == "gl") {
    gl::Ring ring(gl::System(o.r, o.p), ring_options(o));
    for (int k = 0; k <= n; ++k) emit(k, terms_to_json(ring.t_index(k)));
  } else {
    heis::Ring ring(heis::System(o.p), ring_options(o));
    for (int k = 0; k <= n; ++k) emit(k, terms_to_json(ring.t_index(k)));
  }
  doc["coefficients"] = std::move(rows);
  std::cout << doc.dump(o.json_out ? -1 : 2) << '\n';
  return 0;
}

int cmd_double_cosets(const Options& o) {
  require_system(o);
  const int n = o.n.value_or(2);
  if (n < 0) throw UsageError("--N must be nonnegative");
  json doc = base_doc("hecke.double-cosets/1", "double-cosets");
  doc["system"] = o.system;
  if (o.system == "gl") doc["r"] = o.r;
  doc["p"] = o.p;
  doc["N"] = n;
  json levels = json::array();
  auto run = [&](const auto& ring) {
    for (int v = 0; v <= n; ++v) {
      json classes = json::array();
      for (const auto& k : ring.system().all_doubles(v))
        classes.push_back({{"key", KeyCodec<std::decay_t<decltype(k)>>::encode(k)},
                           {"degree", coefficient_to_json(ring.degree(k))}});
      levels.push_back({{"index_valuation", v}, {"classes", std::move(classes)}});
    }
  };
  if (o.system == "gl") {
    gl::Ring ring(gl::System(o.r, o.p), ring_options(o));
    run(ring);
  } else {
    heis::Ring ring(heis::System(o.p), ring_options(o));
    run(ring);
  }
  doc["levels"] = std::move(levels);
  std::cout << doc.dump(o.json_out ? -1 : 2) << '\n';
  return 0;
}

/// A verification job and the ring tag its residuals live in.
struct Job {
  std::string target;
  std::string system;
  std::function<Report()> run;
};

std::vector<Job> jobs_for(const std::string& target, const Options& o) {
  std::vector<Job> jobs;
  const auto opts = ring_options(o);
  auto rationality = [&](int r, std::int64_t p, int n) {
    jobs.push_back({"rationality", "gl", [=, &o] {
                      gl::Ring ring(gl::System(r, p), opts);
                      attach(ring, o, gl_tag(r));
                      return gl::verify_rationality(ring, n);
                    }});
  };
  auto heisenberg = [&](std::int64_t p, int n) {
    jobs.push_back({"heisenberg", "heis", [=, &o] {
                      heis::Local local(p, opts);
                      attach(local.gl, o, gl_tag(2));
                      attach(local.heis, o, "heis");
                      return heis::verify_identity(local.maps, n);
                    }});
  };
  auto global_job = [&](const std::string& name, const std::string& sys, std::int64_t bound, std::optional<int> n) {
    jobs.push_back({name, sys == "gl" ? "gl-global" : "heis-global", [=, &o]() -> Report {
                      if (sys == "gl") {
                        global::GlRing ring("gl2", global::gl_factory(2), opts, store_factory<gl::Key>(o, gl_tag(2)));
                        return name == "multiplicativity" ? ring.verify_multiplicativity(bound)
                                                          : ring.verify_euler_product(bound, n.value_or(-1));
                      }
                      global::HeisRing ring("heis", global::heis_factory(), opts,
                                            store_factory<heis::Element>(o, "heis"));
                      return name == "multiplicativity" ? ring.verify_multiplicativity(bound)
                                                        : ring.verify_euler_product(bound, n.value_or(-1));
                    }});
  };
  auto heis_global = [&](const std::string& name, std::int64_t bound) {
    jobs.push_back({name, name == "global" ? "heis-global" : "gl-global", [=, &o] {
                      global::Heisenberg h(opts, store_factory<gl::Key>(o, gl_tag(2)),
                                           store_factory<heis::Element>(o, "heis"));
                      return name == "global" ? h.verify_global_identity(bound) : h.verify_recovery(bound);
                    }});
  };

  if (target == "rationality") {
    rationality(o.r, o.p, o.n.value_or(5));
  } else if (target == "heisenberg") {
    heisenberg(o.p, o.n.value_or(6));
  } else if (target == "multiplicativity" || target == "euler") {
    require_system(o);
    global_job(target, o.system, o.bound, o.n);
  } else if (target == "global" || target == "recovery") {
    heis_global(target, o.bound);
  } else if (target == "all") {
    for (std::int64_t p : {2, 3, 5}) rationality(2, p, 5);
    rationality(3, 2, 3);
    heisenberg(2, 6);
    heisenberg(3, 4);
    for (const char* sys : {"gl", "heis"}) {
      global_job("multiplicativity", sys, o.bound, std::nullopt);
      global_job("euler", sys, o.bound, std::nullopt);
    }
    heis_global("global", o.bound);
    heis_global("recovery", o.bound);
  } else {
    throw UsageError("unknown verify target '" + target +
                     "' (expected rationality, heisenberg, multiplicativity, euler, global, recovery, all)");
  }
  return jobs;
}

int cmd_verify(const Options& o) {
  std::vector<Job> jobs = jobs_for(o.target, o);

  struct Outcome {
    Report report;
    double seconds = 0;
  };
  auto run_one = [](const Job& job) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep = job.run();
    return Outcome{std::move(rep), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
  };

  // Workers take jobs in order; results are stored by index so the merged
  // report does not depend on scheduling.
  std::vector<Outcome> outcomes(jobs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) outcomes[i] = run_one(jobs[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i; (i = next++) < jobs.size();) outcomes[i] = run_one(jobs[i]);
      }));
    for (auto& f : pool) f.get();
  }

  bool all_ok = true;
  json doc = base_doc(kReportSchema, "verify");
  doc["target"] = o.target;
  json reports = json::array();
  std::string text;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Report& rep = outcomes[i].report;
    std::cerr << "[" << jobs[i].target << "] " << rep.identity << ": " << outcomes[i].seconds << " s\n";
    json rj = rep.to_json();
    rj["target"] = jobs[i].target;
    if (const auto* f = rep.first_failure()) {
      json ce = {{"schema", kElementSchema}, {"engine", kEngineVersion}, {"system", jobs[i].system},
                 {"check", f->label},        {"terms", f->detail}};
      if (rep.parameters.contains("p")) ce["p"] = rep.parameters["p"];
      if (rep.parameters.contains("r")) ce["r"] = rep.parameters["r"];
      rj["counterexample"] = std::move(ce);
    }
    all_ok = all_ok && rep.passed();
    text += rep.to_text();
    reports.push_back(std::move(rj));
  }
  doc["passed"] = all_ok;
  doc["reports"] = std::move(reports);
  if (o.json_out)
    std::cout << doc.dump(2) << '\n';
  else
    std::cout << text << (all_ok ? "ALL PASS\n" : "FAILED\n");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Exact Hecke ring engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  auto common = [&](CLI::App* sub) {
    sub->add_option("--system", o.system, "gl or heis")->check(CLI::IsMember({"gl", "heis"}));
    sub->add_option("--r", o.r, "rank for gl")->check(CLI::Range(1, 8));
    sub->add_option("--p", o.p, "prime");
    sub->add_option("--N", o.n, "truncation degree or index valuation");
    sub->add_option("--bound", o.bound, "Dirichlet coefficient bound")->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}));
    sub->add_flag("--json", o.json_out, "print the JSON document (compact for mul, series, double-cosets)");
    sub->add_option("--cache-dir", o.cache_dir, "structure-constant cache directory (env HECKE_CACHE_DIR)");
    sub->add_flag("--no-cache", o.no_cache, "do not read or write the cache");
    sub->add_flag("--no-uniformity-check", o.no_uniformity, "skip tally uniformity and conservation checks");
    sub->add_option("--threads", o.threads, "worker threads for verify")->check(CLI::Range(1u, 256u));
  };

  auto* mul = app.add_subcommand("mul", "structure constants of two double cosets");
  common(mul);
  mul->add_option("--left", o.left, "left key")->required();
  mul->add_option("--right", o.right, "right key")->required();
  auto* series = app.add_subcommand("series", "coefficients 0..N of the local Hecke series");
  common(series);
  auto* cosets = app.add_subcommand("double-cosets", "double cosets and degrees up to index valuation N");
  common(cosets);
  auto* verify = app.add_subcommand("verify", "check an identity");
  common(verify);
  verify->add_option("target", o.target, "rationality, heisenberg, multiplicativity, euler, global, recovery, all")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    require_prime(o.p);
    if (mul->parsed()) return cmd_mul(o);
    if (series->parsed()) return cmd_series(o);
    if (cosets->parsed()) return cmd_double_cosets(o);
    return cmd_verify(o);
  } catch (const IllDefinedProduct& e) {
    std::cerr << "hecke: ill-defined product: " << e.what() << '\n';
    return 3;
  } catch (const OverflowError& e) {
    std::cerr << "hecke: overflow: " << e.what() << '\n';
    return 3;
  } catch (const std::logic_error& e) {
    // invalid_argument, out_of_range, json errors: bad input.
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e) ||
        dynamic_cast<const std::domain_error*>(&e)) {
      std::cerr << "hecke: " << e.what() << '\n';
      return 2;
    }
    std::cerr << "hecke: internal error: " << e.what() << '\n';
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "hecke: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hecke: internal error: " << e.what() << '\n';
    return 3;
  }
}
