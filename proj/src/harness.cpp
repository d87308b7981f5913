#include "dst/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "dst/backlund.hpp"
#include "dst/baxter.hpp"
#include "dst/quantum.hpp"
#include "dst/rmatrix.hpp"

namespace dst {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- records

struct Record {
  Record(std::string id_, json params_, double residual_ = 0.0, double tol_ = 0.0)
      : id(std::move(id_)), params(std::move(params_)), residual(residual_), tol(tol_) {}

  std::string id;
  json params = json::object();
  double residual = 0.0;
  double tol = 0.0;
  std::optional<bool> exact;  // exact-pass / exact-fail records carry no residual
  std::optional<std::string> error;

  bool pass() const {
    if (error) return false;
    if (exact) return *exact;
    return residual <= tol;  // NaN fails
  }
};

json number_or_tag(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json to_json(const Record& r) {
  json j;
  j["identity_id"] = r.id;
  j["parameters"] = r.params;
  j["tolerance"] = r.tol;
  j["pass"] = r.pass();
  if (r.error) j["residual"] = "error: " + *r.error;
  else if (r.exact) j["residual"] = *r.exact ? "exact-pass" : "exact-fail";
  else j["residual"] = number_or_tag(r.residual);
  return j;
}

json cjson(const cplx& z) { return json::array({z.real(), z.imag()}); }

json cvec(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(cjson(z));
  return a;
}

json error_json(const Error& e) {
  return {{"code", std::string(errc_name(e.code()))}, {"message", e.what()}};
}

struct Task {
  std::string id;
  json params;
  std::function<std::vector<Record>()> fn;
};

// Runs tasks on up to `jobs` threads; output order follows the task list,
// the report sorts anyway. CostGuard aborts the whole run, any other module
// error becomes a failing record.
std::vector<Record> run_tasks(const std::vector<Task>& tasks, int jobs) {
  std::vector<std::vector<Record>> results(tasks.size());
  std::vector<std::exception_ptr> guards(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= tasks.size()) return;
      try {
        results[i] = tasks[i].fn();
      } catch (const Error& e) {
        if (e.code() == Errc::CostGuard) {
          guards[i] = std::current_exception();
        } else {
          Record r{tasks[i].id, tasks[i].params};
          r.error = std::string(errc_name(e.code())) + ": " + e.what();
          results[i] = {r};
        }
      } catch (const std::exception& e) {
        Record r{tasks[i].id, tasks[i].params};
        r.error = e.what();
        results[i] = {r};
      }
    }
  };
  const int n = std::clamp(jobs, 1, 64);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& g : guards)
    if (g) std::rethrow_exception(g);
  std::vector<Record> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

json assemble(std::vector<Record> recs, const RunConfig& cfg, const std::string& kind) {
  std::vector<std::pair<std::string, json>> keyed;
  for (const auto& r : recs) keyed.emplace_back(r.id + "\x1f" + r.params.dump(), to_json(r));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  json arr = json::array();
  std::size_t failed = 0;
  for (auto& [k, j] : keyed) {
    if (!j["pass"].get<bool>()) ++failed;
    arr.push_back(std::move(j));
  }
  json rep;
  rep["artifact_version"] = kArtifactVersion;
  rep["command"] = kind;
  rep["seed"] = cfg.seed;
  rep["records"] = std::move(arr);
  rep["summary"] = {{"total", recs.size()}, {"passed", recs.size() - failed}, {"failed", failed}};
  return rep;
}

int exit_for(const json& rep) {
  return rep["summary"]["failed"].get<std::size_t>() == 0 ? exit_code::ok : exit_code::failed;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Each task draws from its own stream so results do not depend on --jobs.
struct Seeder {
  std::uint64_t base;
  std::uint64_t k = 0;
  std::uint64_t next() { return mix(base, k++); }
};

// ---------------------------------------------------------------- classical

std::vector<BoundaryCondition<double>> classical_regimes() {
  return {Periodic{}, Quasiperiodic<double>{2.0}, Open<double>{0.3, 0.7}};
}

json regime_json(const BoundaryCondition<double>& bc) {
  json j{{"regime", regime_name(bc)}};
  if (const auto* q = std::get_if<Quasiperiodic<double>>(&bc)) j["xi"] = q->xi;
  if (const auto* o = std::get_if<Open<double>>(&bc)) {
    j["theta_minus"] = o->theta_minus;
    j["theta_plus"] = o->theta_plus;
  }
  return j;
}

struct SimData {
  std::vector<std::vector<double>> rows;
  std::vector<double> drift;  // per coefficient, max over the run
  double max_drift = 0.0;
  double last_good_time = 0.0;
  long steps = 0;
  std::optional<Error> failure;
};

// Drift of c_k is |c_k(t) − c_k(0)| / max(|c_k(0)|, 1).
SimData simulate(LatticeState<double> s, const BoundaryCondition<double>& bc, double dt,
                 double t_final, long max_rows) {
  SimData out;
  const std::vector<double> c0 = conserved_coeffs(s, bc).coeffs;
  out.drift.assign(c0.size(), 0.0);
  const double ratio = t_final / dt;
  const long steps = t_final <= 0 ? 0
                     : std::abs(ratio - std::round(ratio)) < 1e-9 ? std::lround(ratio)
                                                                  : static_cast<long>(std::ceil(ratio));
  const long stride = max_rows > 0 ? std::max<long>(1, steps / max_rows) : 0;
  auto row = [&](double t, const std::vector<double>& c) {
    if (stride == 0) return;
    std::vector<double> r{t};
    r.insert(r.end(), s.q.begin(), s.q.end());
    r.insert(r.end(), s.r.begin(), s.r.end());
    r.insert(r.end(), c.begin(), c.end());
    r.push_back(out.max_drift);
    out.rows.push_back(std::move(r));
  };
  row(0.0, c0);
  for (long k = 1; k <= steps; ++k) {
    const double t_prev = static_cast<double>(k - 1) * dt;
    const double t = k == steps ? t_final : static_cast<double>(k) * dt;
    try {
      s = step_rk4(s, bc, t - t_prev);
    } catch (const Error& e) {
      out.failure = e;
      return out;
    }
    const std::vector<double> c = conserved_coeffs(s, bc).coeffs;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double d = std::abs(c[i] - c0[i]) / std::max(std::abs(c0[i]), 1.0);
      if (!std::isfinite(d)) {
        out.failure = Error(Errc::NonFiniteState, "conserved coefficient became non-finite");
        return out;
      }
      out.drift[i] = std::max(out.drift[i], d);
      out.max_drift = std::max(out.max_drift, d);
    }
    out.last_good_time = t;
    out.steps = k;
    if (stride > 0 && (k % stride == 0 || k == steps)) row(t, c);
  }
  return out;
}

void classical_tasks(std::vector<Task>& tasks, Seeder& seeds, double ts) {
  for (const auto& bc : classical_regimes()) {
    for (std::size_t n = 1; n <= 5; ++n) {
      json params = regime_json(bc);
      params["n"] = n;
      params["states"] = 3;
      const std::uint64_t sd = seeds.next();
      tasks.push_back({"classical", params, [=] {
        Rng rng(sd);
        double flow = 0, lax = 0, mono = 0, ham = 0, skl = 0;
        for (int k = 0; k < 3; ++k) {
          const auto s = random_state<double>(n, rng, -1.0, 1.0);
          flow = std::max(flow, flow_consistency_residual(s, bc));
          for (std::size_t j = 1; j <= n; ++j) lax = std::max(lax, lax_consistency_residual(s, bc, j));
          mono = std::max(mono, monodromy_evolution_residual(s, bc));
          const double h = hamiltonian(s, bc);
          ham = std::max(ham, std::abs(conserved_coeffs(s, bc).hamiltonian_value - h) / std::max(1.0, std::abs(h)));
          if (!std::holds_alternative<Periodic>(bc))
            for (const cplx& l : lambda_grid()) {
              const auto r = sklyanin_condition_residual(bc, s, l);
              skl = std::max({skl, r.plus.value_or(0.0), r.minus.value_or(0.0), r.c.value_or(0.0)});
            }
        }
        std::vector<Record> out{
            {"classical.hamiltonian-flow", params, flow, 1e-7 * ts},
            {"classical.lax-compatibility", params, lax, 1e-12 * ts},
            {"classical.monodromy-evolution", params, mono, 1e-12 * ts},
            {"classical.hamiltonian-from-generator", params, ham, 1e-12 * ts},
        };
        if (!std::holds_alternative<Periodic>(bc))
          out.push_back({"classical.boundary-condition-matrices", params, skl, 1e-12 * ts});
        return out;
      }});
    }
    json params = regime_json(bc);
    params.update({{"n", 6}, {"amplitude", 0.2}, {"dt", 1e-3}, {"t_final", 2.0}});
    const std::uint64_t sd = seeds.next();
    tasks.push_back({"classical.conservation", params, [=] {
      Rng rng(sd);
      const SimData d = simulate(random_state<double>(6, rng, -0.2, 0.2), bc, 1e-3, 2.0, 0);
      if (d.failure) throw *d.failure;
      return std::vector<Record>{{"classical.conservation", params, d.max_drift, 1e-8 * ts}};
    }});
  }
  tasks.push_back({"classical.worked-examples", json::object(), [=] {
    const LatticeState<double> s({1, 2}, {3, 4});
    const auto d = eom<double>(s, Periodic{});
    const double e = std::max({std::abs(d.dq[0] + 1), std::abs(d.dq[1] + 15), std::abs(d.dr[0] - 5),
                               std::abs(d.dr[1] - 29)});
    const double hp = std::abs(hamiltonian<double>(s, Periodic{}) + 26.5);
    const double ho = std::abs(hamiltonian<double>(s, Open<double>{1, 2}) + 21.5);
    const json p{{"q", {1, 2}}, {"r", {3, 4}}};
    json po = p;
    po.update({{"theta_minus", 1}, {"theta_plus", 2}});
    return std::vector<Record>{{"classical.eom-example", p, e, 1e-14},
                               {"classical.hamiltonian-example", p, hp, 1e-12},
                               {"classical.hamiltonian-example-open", po, ho, 1e-12}};
  }});
}

// ---------------------------------------------------------------- r-matrix

void rmatrix_tasks(std::vector<Task>& tasks, Seeder& seeds, double ts, bool wrong_k) {
  const std::vector<std::pair<cplx, cplx>> pairs{{0.7, -0.3}, {cplx(0.4, 0.2), cplx(-1.1, 0.1)}};
  for (std::size_t n = 1; n <= 3; ++n) {
    const json params{{"n", n}, {"states", 2}, {"theta_minus", 0.3}, {"theta_plus", 0.7}};
    const std::uint64_t sd = seeds.next();
    tasks.push_back({"rmatrix", params, [=] {
      Rng rng(sd);
      double local = 0, mono = 0, u = 0;
      for (int k = 0; k < 2; ++k) {
        const auto s = random_state<double>(n, rng, -1.0, 1.0);
        for (const auto& [l, m] : pairs) {
          for (std::size_t a = 1; a <= n; ++a)
            for (std::size_t b = 1; b <= n; ++b)
              local = std::max(local, cism1_residual(s, l, m, LocalLevel{a, b}));
          mono = std::max(mono, cism1_residual(s, l, m, MonodromyLevel{}));
          u = std::max(u, cism2_residual_U(s, Open<double>{0.3, 0.7}, l, m));
        }
      }
      return std::vector<Record>{{"rmatrix.cism1-local", params, local, 1e-6 * ts},
                                 {"rmatrix.cism1-monodromy", params, mono, 1e-5 * ts},
                                 {"rmatrix.cism2-dressed", params, u, 1e-4 * ts}};
    }});
  }
  const json kp{{"theta_minus", 0.3}, {"theta_plus", 0.7}, {"wrong_k_hook", wrong_k}};
  tasks.push_back({"rmatrix.reflection", kp, [=] {
    const auto k = boundary_K(Open<double>{0.3, 0.7});
    auto eval = [](const PolyMatrix2<double>& m) {
      return [m](cplx l) { return m(l); };
    };
    std::function<Mat2<cplx>(cplx)> km = eval(k.minus), kpl = eval(k.plus);
    if (wrong_k) {
      km = [](cplx l) { return Mat2<cplx>{0.3, l * l, 0.0, 0.3}; };
      kpl = [](cplx l) { return Mat2<cplx>{0.7, 0.0, l * l, 0.7}; };
    }
    double rm = 0, rp = 0;
    const auto& g = lambda_grid();
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = 0; b < g.size(); ++b) {
        if (a == b || std::abs(g[a] + g[b]) < 1e-9) continue;
        rm = std::max(rm, reflection_residual_K(km, g[a], g[b]).lambda_variant);
        rp = std::max(rp, reflection_residual_K(kpl, g[a], g[b]).lambda_variant);
      }
    json pm = kp, pp = kp;
    pm["side"] = "minus";
    pp["side"] = "plus";
    return std::vector<Record>{{"rmatrix.reflection-K", pm, rm, 1e-12 * ts},
                               {"rmatrix.reflection-K", pp, rp, 1e-12 * ts}};
  }});
  const std::uint64_t sd = seeds.next();
  tasks.push_back({"rmatrix.fd-order", json{{"n", 3}}, [=] {
    Rng rng(sd);
    const auto probe = fd_order_probe(random_state<double>(3, rng, -1.0, 1.0));
    // order 2 expected; residual is the distance from it
    return std::vector<Record>{{"rmatrix.fd-order", json{{"n", 3}, {"order", probe.order}},
                                std::abs(probe.order - 2.0), 0.2}};
  }});
}

// ---------------------------------------------------------------- Bäcklund

LatticeState<cplx> bt_state(std::size_t n, Rng& rng) {
  LatticeState<cplx> x;
  for (std::size_t i = 0; i < n; ++i) {
    x.q.emplace_back(rng.uniform(1, 2), rng.uniform(-0.3, 0.3));
    x.r.emplace_back(rng.uniform(0.5, 1.5), rng.uniform(-0.3, 0.3));
  }
  return x;
}

struct BtRun {
  BTResult<cplx> res;
  std::vector<Record> records;
};

BtRun bt_records(const LatticeState<cplx>& x, double sigma, double xi, const json& params, double ts) {
  BTParams<cplx> p;
  p.sigma = sigma;
  if (xi != 1.0) p.closure = Quasiperiodic<cplx>{xi};
  BtRun out{bt_solve(x, p), {}};
  const auto& res = out.res;
  const std::size_t n = x.n_sites();
  const cplx cxi = xi;
  const auto ends = bt_boundary(res.y, x.r, cxi);
  double local = 0;
  for (std::size_t i = 0; i < n; ++i)
    local = std::max(local, bt_local_identity_residual(x.q[i], x.r[i], res.y[i],
                                                       i + 1 < n ? res.y[i + 1] : ends.y_next,
                                                       i > 0 ? x.r[i - 1] : ends.X_prev, p.sigma));
  const auto inv = bt_invariance_residual(x, res, p);
  const auto dr = v_dressing_residual(VInputs{res.y[0], ends.y_next, ends.X_prev, x.r.back(), sigma, 0.3, 0.7});
  json pd = params;
  pd.update({{"theta_minus", 0.3}, {"theta_plus", 0.7}});
  out.records = {
      {"backlund.newton", params, res.newton_residual, 1e-10 * ts},
      {"backlund.generating-function", params, bt_generating_check(x.q, x.r, res.y, res.Y, p.sigma, cxi), 1e-9 * ts},
      {"backlund.generating-gradient-fd", params, generating_gradient_fd_check(x.q, res.y, p.sigma, cxi), 1e-6 * ts},
      {"backlund.local-gauge", params, local, 1e-9 * ts},
      {"backlund.generator-invariance", params, inv.generator_diff, 1e-8 * ts},
      {"backlund.closure-matrix", params, inv.closure_defect, 1e-9 * ts},
      {"backlund.symplectic", params, bt_symplectic_residual(x, p), 1e-5 * ts},
      {"backlund.dressing-plus", pd, dr.plus, 1e-10 * ts},
      {"backlund.dressing-minus", pd, dr.minus, 1e-10 * ts},
      {"backlund.boundary-composite", pd, v_composite_residual(x, res, p, cplx(0.3), cplx(0.7)), 1e-9 * ts},
  };
  return out;
}

void backlund_tasks(std::vector<Task>& tasks, Seeder& seeds, double ts) {
  for (std::size_t n = 1; n <= 4; ++n)
    for (double sigma : {0.1, 0.3, 1.0})
      for (double xi : {1.0, 2.0}) {
        const json params{{"n", n}, {"sigma", sigma}, {"xi", xi}};
        const std::uint64_t sd = seeds.next();
        tasks.push_back({"backlund", params, [=] {
          Rng rng(sd);
          return bt_records(bt_state(n, rng), sigma, xi, params, ts).records;
        }});
      }
}

// ---------------------------------------------------------------- quantum

mpq_class random_rational(Rng& rng) {
  std::int64_t num = 0;
  while (num == 0) num = rng.uniform_int(-6, 6);
  mpq_class x(static_cast<long>(num), static_cast<unsigned long>(rng.uniform_int(1, 5)));
  x.canonicalize();
  return x;
}

json qjson(const QParams& p) {
  return {{"n", p.n}, {"eta", to_string(p.eta)}, {"xi_minus", to_string(p.xi_minus)},
          {"xi_plus", to_string(p.xi_plus)}};
}

Record exact(const std::string& id, const QParams& p, const ExactCheck& c) {
  Record r{id, qjson(p)};
  r.exact = c.pass;
  return r;
}

Record exact(const std::string& id, const QParams& p, bool ok) {
  Record r{id, qjson(p)};
  r.exact = ok;
  return r;
}

void quantum_tasks(std::vector<Task>& tasks, Seeder& seeds, const RunConfig& cfg) {
  Rng rng(seeds.next());
  std::vector<std::pair<mpq_class, mpq_class>> xis;
  for (int k = 0; k < 2; ++k) {
    const mpq_class a = random_rational(rng);
    xis.emplace_back(a, random_rational(rng));
  }
  const bool f = cfg.force;
  auto sizes = [&](std::vector<int> def) { return cfg.n ? std::vector<int>{*cfg.n} : def; };
  for (const mpq_class& eta : {mpq_class(1), mpq_class(1, 2), mpq_class(3)})
    for (const auto& [xm, xp] : xis) {
      QParams base;
      base.eta = eta;
      base.xi_minus = xm;
      base.xi_plus = xp;
      auto at = [base](int n) {
        QParams p = base;
        p.n = n;
        return p;
      };
      auto add = [&](const std::string& id, const QParams& p, std::function<std::vector<Record>()> fn) {
        tasks.push_back({id, qjson(p), std::move(fn)});
      };
      for (int n : sizes({1, 2})) {
        const QParams p = at(n);
        add("quantum.rtt", p, [=] { return std::vector<Record>{exact("quantum.rtt", p, rtt_check(p, f))}; });
        add("quantum.reflection-dressed", p,
            [=] { return std::vector<Record>{exact("quantum.reflection-dressed", p, reflection_U(p, f))}; });
      }
      const QParams p1 = at(cfg.n.value_or(1));
      add("quantum.reflection-K", p1, [=] {
        return std::vector<Record>{exact("quantum.reflection-K-minus", p1, reflection_K_minus(p1)),
                                   exact("quantum.reflection-K-plus", p1, reflection_K_plus(p1, p1.eta))};
      });
      add("quantum.transfer", p1, [=] {
        return std::vector<Record>{exact("quantum.transfer-commute", p1, tau_commutativity(p1, f)),
                                   exact("quantum.transfer-decomposition", p1, tau_decomposition(p1))};
      });
      add("quantum.abcd", p1, [=] {
        return std::vector<Record>{exact("quantum.BB-commute", p1, check_BB(p1, f)),
                                   exact("quantum.AB-exchange", p1, check_AB(p1, f)),
                                   exact("quantum.DB-exchange", p1, check_DB(p1, DBVariant::Corrected, f))};
      });
      for (int n : sizes({1, 2, 3})) {
        const QParams p = at(n);
        add("quantum.hamiltonian", p, [=] {
          const HqReport h = hq_extract(p, f);
          const ClassicalLimit cl = hq_classical_limit(p, f);
          const mpq_class sign = n % 2 == 0 ? 1 : -1;
          return std::vector<Record>{
              exact("quantum.hamiltonian-qrqr", p, (h.extracted - hq_candidate(p, "qrqr")).is_zero()),
              exact("quantum.transfer-leading", p, h.leading_sign == sign && h.tau_degree == 2 * n + 2),
              exact("quantum.hamiltonian-classical-limit", p, cl.quadratic_in_eta && cl.matches_classical)};
        });
      }
      for (int n : sizes({1, 2})) {
        const QParams p = at(n);
        add("quantum.asymptotics", p, [=] {
          const Asymptotics a = abcd_asymptotics(p);
          return std::vector<Record>{
              exact("quantum.A-leading", p, a.A_leading), exact("quantum.D-leading", p, a.D_leading),
              exact("quantum.B-degree", p, a.B_degree && a.B_leading),
              exact("quantum.B-zero-half-eta", p, a.B_vanishes_at_half_eta)};
        });
      }
    }
}

// ---------------------------------------------------------------- Baxter

const std::vector<cplx> kSigmaSamples{0.3, 1.7, -0.9};

std::vector<Record> bethe_records(int n, int m, double xi, double eta, std::uint64_t seed, double ts,
                                  bool force, json* roots_out = nullptr) {
  mpz_class dim;
  mpz_bin_uiui(dim.get_mpz_t(), static_cast<unsigned long>(n + m - 1), static_cast<unsigned long>(m));
  std::vector<Record> out;
  const json base{{"n", n}, {"m", m}, {"xi", xi}, {"eta", eta}};
  if (m == 0) {
    const BetheConfig vac{n, 0, xi, eta, {}, 0.0};
    double mem = 0;
    for (const cplx& s0 : kSigmaSamples) mem = std::max(mem, eigen_membership_residual(vac, s0, force));
    out.push_back({"baxter.vacuum-eigenvalue", base, mem, 1e-12 * ts});
    if (roots_out) *roots_out = json::array();
    return out;
  }
  if (dim > 64 && !force) throw Error(Errc::CostGuard, "degree subspace dimension above 64");
  const auto sets = bethe_solve_all(n, m, xi, eta, seed, static_cast<int>(dim.get_si()));
  if (roots_out) *roots_out = json::array();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const BetheConfig& c = sets[k];
    json p = base;
    p["solution"] = k;
    double mem = 0;
    json samples = json::array();
    for (const cplx& s0 : kSigmaSamples) {
      mem = std::max(mem, eigen_membership_residual(c, s0, force));
      samples.push_back({{"sigma", cjson(s0)}, {"lambda", cjson(lambda_from_roots(c, s0))}});
    }
    out.push_back({"baxter.bethe-residual", p, c.residual, 1e-10 * ts});
    out.push_back({"baxter.lambda-polynomial", p, lambda_division(c).remainder, 1e-8 * ts});
    out.push_back({"baxter.eigen-membership", p, mem, 1e-6 * ts});
    if (m == 1) {
      const double closed = std::abs(std::pow(c.roots[0], n) - xi) / std::abs(xi);
      out.push_back({"baxter.bethe-m1-root-of-xi", p, closed, 1e-10 * ts});
    }
    if (roots_out)
      roots_out->push_back({{"roots", cvec(c.roots)}, {"residual", c.residual}, {"lambda_samples", samples}});
  }
  // every eigenvalue of the transfer matrix on the subspace should be reached
  json pc = base;
  pc["found"] = sets.size();
  Record comp{"baxter.bethe-completeness", pc};
  comp.exact = sets.size() == static_cast<std::size_t>(dim.get_si());
  out.push_back(comp);
  return out;
}

std::vector<Record> tq_records(int n, double eta, std::uint64_t seed, int configs, double ts) {
  Rng rng(seed);
  double tq = 0, upper = 0, ratios = 0, fd = 0, literal = 0, wrong_gauge = 1e300;
  for (int k = 0; k < configs; ++k) {
    const cplx sigma = rng.uniform_complex(-2, 2);
    const cplx xi(rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5));
    const QKernelParams p = random_kernel_params(n, sigma, eta, xi, rng);
    const TqReport r = tq_scalar(p);
    tq = std::max(tq, r.corrected);
    literal = std::max(literal, r.literal);
    for (int i = 1; i <= n; ++i) {
      const auto t = gauge_triangularize(i, p);
      upper = std::max(upper, t.upper_right);
      ratios = std::max(ratios, t.ratio_defect / (std::abs(t.top) + std::abs(t.bottom)));
      fd = std::max(fd, std::abs(qj_lax(i, p).c - qj_derivative_fd(i, p)) / (1.0 + std::abs(qj_lax(i, p).c)));
      wrong_gauge = std::min(wrong_gauge, gauge_triangularize(i, p, Gauge::Printed).upper_right);
    }
  }
  const json p{{"n", n}, {"eta", eta}, {"configs", configs},
               {"factor_minus", std::pow(eta, -n)}, {"factor_plus", std::pow(eta, n)},
               {"uncorrected_residual", literal}};
  return {{"baxter.tq-scalar", p, tq, 1e-9 * ts},
          {"baxter.gauge-upper-right", p, upper, 1e-12 * ts},
          {"baxter.gauge-diagonal-ratios", p, ratios, 1e-10 * ts},
          {"baxter.kernel-derivative-fd", p, fd, 1e-6 * ts}};
}

void baxter_tasks(std::vector<Task>& tasks, Seeder& seeds, double ts, bool force) {
  for (int n = 1; n <= 4; ++n)
    for (double eta : {1.0, 0.5}) {
      const std::uint64_t sd = seeds.next();
      const json p{{"n", n}, {"eta", eta}};
      tasks.push_back({"baxter.tq", p, [=] { return tq_records(n, eta, sd, eta == 1.0 ? 50 : 10, ts); }});
    }
  tasks.push_back({"baxter.tq-exact", json::object(), [] {
    bool ok = true;
    for (int a = 1; a <= 3; ++a)
      ok = ok && tq_exact_n1(mpq_class(a, 7), mpq_class(2, a + 1), mpq_class(5, 2), mpq_class(-1, 4 * a));
    Record r{"baxter.tq-exact-n1", json{{"n", 1}, {"eta", 1}}};
    r.exact = ok;
    return std::vector<Record>{r};
  }});
  for (auto [n, m] : std::vector<std::pair<int, int>>{{2, 0}, {2, 1}, {3, 1}, {2, 2}}) {
    const std::uint64_t sd = seeds.next();
    tasks.push_back({"baxter.bethe", json{{"n", n}, {"m", m}},
                     [=] { return bethe_records(n, m, 1.0, 1.0, sd, ts, force); }});
  }
  tasks.push_back({"baxter.sov", json::object(), [] {
    const SovParams sp{1.0, 1.0, 1.0, {1.0}, {1.0}};
    const SovParams zero{0.7, -0.4, 1.0, {1.0, 2.0}, {}};
    const json p{{"tau", 1}, {"phi", 1}, {"xi_minus", 1}, {"xi_plus", 1}, {"eta", 1}, {"u", 0.5}};
    return std::vector<Record>{{"baxter.sov-regression", p, std::abs(sov_residual(sp, 0.5) - cplx(-1.0)), 1e-15},
                               {"baxter.sov-zero-phi", json{{"phi", 0}}, std::abs(sov_residual(zero, 0.8)), 0.0}};
  }});
}

// ---------------------------------------------------------------- helpers

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

BoundaryCondition<double> bc_from(const RunConfig& cfg) {
  if (cfg.bc == "periodic") return Periodic{};
  if (cfg.bc == "quasi") return Quasiperiodic<double>{cfg.xi};
  if (cfg.bc == "open") return Open<double>{cfg.theta_minus, cfg.theta_plus};
  throw Error(Errc::InvalidArgument, "unknown boundary condition '" + cfg.bc + "'");
}

json config_json(const RunConfig& cfg) {
  json j{{"bc", cfg.bc},       {"xi", cfg.xi},       {"theta_minus", cfg.theta_minus},
         {"theta_plus", cfg.theta_plus}, {"xi_minus", cfg.xi_minus}, {"xi_plus", cfg.xi_plus},
         {"eta", cfg.eta},     {"sigma", cfg.sigma}, {"m", cfg.m},
         {"dt", cfg.dt},       {"t_final", cfg.t_final}, {"amplitude", cfg.amplitude},
         {"seed", cfg.seed},   {"suite", cfg.suite}, {"tol_scale", cfg.tol_scale},
         {"force", cfg.force}};
  j["n"] = cfg.n ? json(*cfg.n) : json(nullptr);
  return j;
}

RunOutcome guarded(const std::function<RunOutcome()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    RunOutcome o;
    o.report = {{"artifact_version", kArtifactVersion}, {"error", error_json(e)}};
    switch (e.code()) {
      case Errc::CostGuard: o.exit_code = exit_code::cost_guard; break;
      case Errc::InvalidArgument: o.exit_code = exit_code::usage; break;
      case Errc::NonFiniteState: o.exit_code = exit_code::blowup; break;
      default: o.exit_code = exit_code::failed; break;
    }
    return o;
  }
}

}  // namespace

void validate(const RunConfig& cfg) {
  auto bad = [](const std::string& m) { throw Error(Errc::InvalidArgument, m); };
  if (cfg.n && (*cfg.n < 1 || *cfg.n > 64)) bad("--n must be in 1..64");
  if (!(cfg.dt > 0)) bad("--dt must be positive");
  if (!(cfg.t_final >= 0)) bad("--t-final must be nonnegative");
  if (!(cfg.tol_scale > 0)) bad("--tol-scale must be positive");
  if (cfg.jobs < 1) bad("--jobs must be at least 1");
  if (cfg.m < 0) bad("--m must be nonnegative");
  if (cfg.eta == 0) bad("--eta must be nonzero");
  if (cfg.bc != "periodic" && cfg.bc != "quasi" && cfg.bc != "open") bad("--bc must be periodic, quasi or open");
  static const std::vector<std::string> suites{"classical", "rmatrix", "backlund", "quantum", "baxter", "all"};
  if (std::find(suites.begin(), suites.end(), cfg.suite) == suites.end()) bad("unknown suite '" + cfg.suite + "'");
}

RunOutcome run_simulate(const RunConfig& cfg) {
  return guarded([&] {
    validate(cfg);
    const int n = cfg.n.value_or(6);
    const auto bc = bc_from(cfg);
    Rng rng(cfg.seed);
    const auto s0 = random_state<double>(static_cast<std::size_t>(n), rng, -cfg.amplitude, cfg.amplitude);
    const SimData d = simulate(s0, bc, cfg.dt, cfg.t_final, 1000);

    std::ostringstream csv;
    csv << "t";
    for (int i = 1; i <= n; ++i) csv << ",q_" << i;
    for (int i = 1; i <= n; ++i) csv << ",r_" << i;
    for (std::size_t k = 0; k < d.drift.size(); ++k) csv << ",c_" << k;
    csv << ",max_relative_drift\n";
    for (const auto& row : d.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << fmt17(row[k]);
      csv << "\n";
    }
    RunOutcome o;
    o.csv = csv.str();
    json rep;
    rep["artifact_version"] = kArtifactVersion;
    rep["command"] = "simulate";
    rep["config"] = config_json(cfg);
    rep["n"] = n;
    rep["regime"] = regime_name(bc);
    rep["steps"] = d.steps;
    rep["last_good_time"] = d.last_good_time;
    json drift = json::array();
    for (double x : d.drift) drift.push_back(number_or_tag(x));
    rep["drift"] = drift;
    rep["max_relative_drift"] = number_or_tag(d.max_drift);
    rep["status"] = d.failure ? "blowup" : "ok";
    if (d.failure) {
      rep["error"] = error_json(*d.failure);
      o.exit_code = exit_code::blowup;
    }
    o.report = std::move(rep);
    return o;
  });
}

RunOutcome run_verify(const RunConfig& cfg) {
  return guarded([&] {
    validate(cfg);
    const double ts = cfg.tol_scale;
    const bool all = cfg.suite == "all";
    std::vector<Task> tasks;
    // one seed stream per suite so a suite reproduces on its own
    Seeder s_cl{mix(cfg.seed, 1)}, s_rm{mix(cfg.seed, 2)}, s_bt{mix(cfg.seed, 3)}, s_q{mix(cfg.seed, 4)},
        s_bx{mix(cfg.seed, 5)};
    if (all || cfg.suite == "classical") classical_tasks(tasks, s_cl, ts);
    if (all || cfg.suite == "rmatrix") rmatrix_tasks(tasks, s_rm, ts, cfg.inject_wrong_k);
    if (all || cfg.suite == "backlund") backlund_tasks(tasks, s_bt, ts);
    if (all || cfg.suite == "quantum") quantum_tasks(tasks, s_q, cfg);
    if (all || cfg.suite == "baxter") baxter_tasks(tasks, s_bx, ts, cfg.force);
    json rep = assemble(run_tasks(tasks, cfg.jobs), cfg, "verify");
    rep["suite"] = cfg.suite;
    rep["tol_scale"] = ts;
    RunOutcome o;
    o.exit_code = exit_for(rep);
    o.report = std::move(rep);
    return o;
  });
}

RunOutcome run_backlund(const RunConfig& cfg) {
  return guarded([&] {
    validate(cfg);
    if (cfg.bc == "open") throw Error(Errc::InvalidArgument, "backlund needs --bc periodic or quasi");
    const int n = cfg.n.value_or(3);
    const double xi = cfg.bc == "quasi" ? cfg.xi : 1.0;
    Rng rng(cfg.seed);
    const auto x = bt_state(static_cast<std::size_t>(n), rng);
    const json params{{"n", n}, {"sigma", cfg.sigma}, {"xi", xi}};
    BtRun run = bt_records(x, cfg.sigma, xi, params, cfg.tol_scale);
    json rep = assemble(run.records, cfg, "backlund");
    rep["config"] = config_json(cfg);
    rep["x"] = cvec(x.q);
    rep["X"] = cvec(x.r);
    rep["y"] = cvec(run.res.y);
    rep["Y"] = cvec(run.res.Y);
    rep["newton_iterations"] = run.res.steps_used;
    RunOutcome o;
    o.exit_code = exit_for(rep);
    o.report = std::move(rep);
    return o;
  });
}

RunOutcome run_baxter(const RunConfig& cfg) {
  return guarded([&] {
    validate(cfg);
    const int n = cfg.n.value_or(2);
    const double xi = cfg.bc == "quasi" ? cfg.xi : 1.0;
    json roots;
    std::vector<Record> recs = bethe_records(n, cfg.m, xi, cfg.eta, cfg.seed, cfg.tol_scale, cfg.force, &roots);
    const auto tq = tq_records(n, cfg.eta, mix(cfg.seed, 7), 10, cfg.tol_scale);
    recs.insert(recs.end(), tq.begin(), tq.end());
    json rep = assemble(recs, cfg, "baxter");
    rep["config"] = config_json(cfg);
    rep["bethe_solutions"] = roots;
    RunOutcome o;
    o.exit_code = exit_for(rep);
    o.report = std::move(rep);
    return o;
  });
}

RunOutcome run(const RunConfig& cfg) {
  if (cfg.subcommand == "simulate") return run_simulate(cfg);
  if (cfg.subcommand == "verify") return run_verify(cfg);
  if (cfg.subcommand == "backlund") return run_backlund(cfg);
  if (cfg.subcommand == "baxter") return run_baxter(cfg);
  RunOutcome o;
  o.exit_code = exit_code::usage;
  o.report = {{"error", {{"code", "InvalidArgument"}, {"message", "unknown subcommand '" + cfg.subcommand + "'"}}}};
  return o;
}

std::string render_text(const json& report) {
  std::ostringstream os;
  if (report.contains("error"))
    os << "error " << report["error"]["code"].get<std::string>() << ": "
       << report["error"]["message"].get<std::string>() << "\n";
  if (report.contains("records")) {
    for (const auto& r : report["records"]) {
      os << (r["pass"].get<bool>() ? "PASS " : "FAIL ") << r["identity_id"].get<std::string>() << " "
         << r["parameters"].dump() << " residual=" << r["residual"].dump() << " tol=" << r["tolerance"].dump()
         << "\n";
    }
    const auto& s = report["summary"];
    os << s["passed"].get<std::size_t>() << "/" << s["total"].get<std::size_t>() << " passed\n";
  } else if (report.contains("max_relative_drift")) {
    os << report["regime"].get<std::string>() << " N=" << report["n"].dump() << " steps=" << report["steps"].dump()
       << " status=" << report["status"].get<std::string>()
       << " max_relative_drift=" << report["max_relative_drift"].dump() << "\n";
  }
  return os.str();
}

}  // namespace dst
