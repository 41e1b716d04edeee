#include "fedswitch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "fedswitch/switching.hpp"
#include "fedswitch/trace_io.hpp"

namespace fedswitch {

namespace {

ModelVector random_vector(std::size_t d, Rng& rng, double scale = 1.0) {
  ModelVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

ModelVector random_domain_point(const Domain& dom, Rng& rng) {
  if (dom.kind() == Domain::Kind::ball) {
    ModelVector v = random_vector(dom.center().dim(), rng);
    const double r =
        dom.radius() * std::pow(rng.uniform(), 1.0 / static_cast<double>(v.dim()));
    v *= r / norm(v);
    v += dom.center();
    return v;
  }
  if (dom.kind() == Domain::Kind::box) {
    ModelVector v(dom.lower().dim());
    for (std::size_t i = 0; i < v.dim(); ++i)
      v[i] = dom.lower()[i] + rng.uniform() * (dom.upper()[i] - dom.lower()[i]);
    return v;
  }
  return random_vector(1, rng);
}

std::string describe(double value) { return format_double(value); }

}  // namespace

bool check_contraction_per_vector(const CompressorSpec& spec, double claimed_q,
                                  std::size_t d, int trials, std::uint64_t seed,
                                  std::string* detail) {
  Rng gen = substream(seed, "contraction-gen");
  for (int t = 0; t < trials; ++t) {
    const double scale = std::exp(6.0 * (gen.uniform() - 0.5));
    ModelVector v = random_vector(d, gen, scale);
    Rng comp_rng = substream(seed, "contraction-comp", static_cast<std::uint64_t>(t));
    const ModelVector c = compress(spec, v, comp_rng);
    const double lhs = squared_norm(c - v);
    const double rhs = (1.0 - claimed_q) * squared_norm(v) + 1e-12;
    if (lhs > rhs) {
      if (detail) {
        *detail = spec.kind_name() + " violated contraction at trial " + std::to_string(t) +
                  ": ||C(v)-v||^2 = " + describe(lhs) + " > " + describe(rhs) +
                  " for claimed q = " + describe(claimed_q);
      }
      return false;
    }
  }
  return true;
}

bool check_rand_k_mc(int k, std::size_t d, int draws, int probe_vectors,
                     std::uint64_t seed, std::string* detail) {
  const CompressorSpec spec = CompressorSpec::rand_k(k);
  const double q = static_cast<double>(k) / static_cast<double>(d);
  const double tolerance = (1.0 - q) * (1.0 + 5.0 / std::sqrt(static_cast<double>(draws)));
  Rng gen = substream(seed, "randk-gen");
  for (int p = 0; p < probe_vectors; ++p) {
    ModelVector v = random_vector(d, gen, std::exp(3.0 * (gen.uniform() - 0.5)));
    const double denom = squared_norm(v);
    Rng comp_rng = substream(seed, "randk-draws", static_cast<std::uint64_t>(p));
    double sum_ratio = 0.0;
    for (int i = 0; i < draws; ++i)
      sum_ratio += squared_norm(compress(spec, v, comp_rng) - v) / denom;
    const double mean = sum_ratio / draws;
    if (mean > tolerance) {
      if (detail) {
        *detail = "rand_k mean ratio " + describe(mean) + " exceeds " +
                  describe(tolerance) + " (k=" + std::to_string(k) +
                  ", d=" + std::to_string(d) + ", probe " + std::to_string(p) + ")";
      }
      return false;
    }
  }
  return true;
}

bool check_drift_bound(const RunTrace& trace, double claimed_eta, int E, double G,
                       std::string* detail) {
  const double bound =
      claimed_eta * claimed_eta * static_cast<double>(E) * static_cast<double>(E) *
          static_cast<double>(E) * G * G / 3.0 +
      1e-9;
  for (const auto& rec : trace.records) {
    if (rec.max_drift_sq > bound) {
      if (detail) {
        *detail = "round " + std::to_string(rec.t) + ": drift " +
                  describe(rec.max_drift_sq) + " exceeds (1/3) eta^2 E^3 G^2 = " +
                  describe(bound);
      }
      return false;
    }
  }
  return true;
}

bool check_delta_bound(const RunTrace& trace, int E, double G, std::string* detail) {
  const double bound = static_cast<double>(E) * G + 1e-9;
  for (const auto& rec : trace.records) {
    if (rec.max_delta_norm > bound) {
      if (detail) {
        *detail = "round " + std::to_string(rec.t) + ": ||delta|| = " +
                  describe(rec.max_delta_norm) + " exceeds E*G = " + describe(bound);
      }
      return false;
    }
  }
  return true;
}

namespace {

using CheckFn = std::function<bool(std::string*)>;

void add_check(std::vector<CheckResult>& out, const std::string& name, const CheckFn& fn) {
  CheckResult r;
  r.name = name;
  try {
    r.pass = fn(&r.detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  out.push_back(std::move(r));
}

Domain random_domain(std::size_t d, Rng& rng) {
  if (rng.below(2) == 0) {
    ModelVector lo(d), hi(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double a = rng.normal(), b = rng.normal();
      lo[i] = std::min(a, b);
      hi[i] = std::max(a, b);
    }
    return Domain::box(std::move(lo), std::move(hi));
  }
  return Domain::ball(random_vector(d, rng), 0.25 + 2.0 * rng.uniform());
}

FederatedProblem small_np(std::uint64_t seed, Partition partition, bool unbounded) {
  LabeledDataset data = make_synthetic_dataset(120, 10, 0.5, seed);
  Domain dom = unbounded ? Domain::unbounded()
                         : Domain::ball(ModelVector::zeros(10), 10.0);
  return build_np_classification(data, 4, seed, std::move(dom), partition);
}

bool traces_identical(const RunTrace& a, const RunTrace& b) {
  std::ostringstream sa, sb;
  write_trace_csv(a, sa);
  write_trace_csv(b, sb);
  if (sa.str() != sb.str()) return false;
  return a.final_state.w == b.final_state.w;
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> results;

  add_check(results, "projection: idempotent, member, interior fixed", [&](std::string* d) {
    Rng rng = substream(seed, "verify-proj");
    for (int t = 0; t < 400; ++t) {
      const std::size_t dim = 1 + rng.below(6);
      const Domain dom = random_domain(dim, rng);
      const ModelVector x = random_vector(dim, rng, 3.0);
      const ModelVector p1 = project(x, dom);
      if (!dom.contains(p1)) {
        *d = "projected point not contained (trial " + std::to_string(t) + ")";
        return false;
      }
      if (!(project(p1, dom) == p1)) {
        *d = "projection not idempotent (trial " + std::to_string(t) + ")";
        return false;
      }
      if (dom.contains(x) && !(p1 == x)) {
        *d = "interior point moved (trial " + std::to_string(t) + ")";
        return false;
      }
    }
    return true;
  });

  add_check(results, "projection: nonexpansive", [&](std::string* d) {
    Rng rng = substream(seed, "verify-proj-ne");
    for (int t = 0; t < 400; ++t) {
      const std::size_t dim = 1 + rng.below(6);
      const Domain dom = random_domain(dim, rng);
      const ModelVector a = random_vector(dim, rng, 3.0);
      const ModelVector b = random_vector(dim, rng, 3.0);
      if (distance(project(a, dom), project(b, dom)) > distance(a, b) + 1e-12) {
        *d = "expansion at trial " + std::to_string(t);
        return false;
      }
    }
    return true;
  });

  add_check(results, "compression: per-vector contraction (identity/top_k/uniform_quant)",
            [&](std::string* d) {
              const std::size_t dim = 24;
              if (!check_contraction_per_vector(CompressorSpec::identity(), 1.0, dim, 500,
                                                derive_seed(seed, "c-id"), d))
                return false;
              const CompressorSpec tk = CompressorSpec::top_k(5);
              if (!check_contraction_per_vector(tk, contraction(tk, dim), dim, 2000,
                                                derive_seed(seed, "c-tk"), d))
                return false;
              const CompressorSpec uq = CompressorSpec::uniform_quant(4);
              return check_contraction_per_vector(uq, contraction(uq, dim), dim, 2000,
                                                  derive_seed(seed, "c-uq"), d);
            });

  add_check(results, "compression: rand_k Monte-Carlo contraction", [&](std::string* d) {
    return check_rand_k_mc(2, 16, 2000, 4, derive_seed(seed, "c-rk"), d);
  });

  add_check(results, "compression: error-feedback telescoping", [&](std::string* d) {
    // Dyadic inputs keep every float addition exact, so the telescoped
    // identity residual + sum(sent) == sum(delta) must hold bit-for-bit.
    const std::size_t dim = 12;
    for (const auto& spec : {CompressorSpec::identity(), CompressorSpec::top_k(3),
                             CompressorSpec::rand_k(3)}) {
      Rng rng = substream(seed, "verify-ef", static_cast<std::uint64_t>(spec.kind));
      EfResidual res = EfResidual::zero(dim, 0);
      ModelVector sum_sent(dim), sum_delta(dim);
      for (int t = 0; t < 50; ++t) {
        ModelVector delta(dim);
        for (std::size_t i = 0; i < dim; ++i)
          delta[i] = (static_cast<double>(rng.below(512)) - 256.0) / 256.0;
        UplinkStep up = uplink_ef_step(res, delta, spec, rng);
        res = up.residual;
        sum_sent += up.sent;
        sum_delta += delta;
        ModelVector lhs = res.value;
        lhs += sum_sent;
        if (!(lhs == sum_delta)) {
          *d = spec.kind_name() + ": telescoped identity broke at round " +
               std::to_string(t);
          return false;
        }
      }
    }
    return true;
  });

  add_check(results, "compression: positive scale equivariance", [&](std::string* d) {
    Rng rng = substream(seed, "verify-scale");
    for (int t = 0; t < 200; ++t) {
      const std::size_t dim = 8;
      const ModelVector v = random_vector(dim, rng);
      const double c = std::exp(2.0 * (rng.uniform() - 0.5));
      for (const auto& spec : {CompressorSpec::top_k(3), CompressorSpec::rand_k(3)}) {
        Rng r1 = substream(seed, "verify-scale-c", static_cast<std::uint64_t>(t));
        Rng r2 = substream(seed, "verify-scale-c", static_cast<std::uint64_t>(t));
        ModelVector scaled = v;
        scaled *= c;
        ModelVector left = compress(spec, scaled, r1);
        ModelVector right = compress(spec, v, r2);
        right *= c;
        if (!(left == right)) {
          *d = spec.kind_name() + ": compress(c*v) != c*compress(v) at trial " +
               std::to_string(t);
          return false;
        }
      }
    }
    return true;
  });

  add_check(results, "switching: soft matches hard outside the hinge window",
            [&](std::string* d) {
              Rng rng = substream(seed, "verify-switch");
              const double eps = 0.05, beta = 1e6;
              const SwitchMode hard = SwitchMode::hard(eps);
              const SwitchMode soft = SwitchMode::soft(eps, beta);
              for (int t = 0; t < 2000; ++t) {
                const double g_hat = 4.0 * (rng.uniform() - 0.5);
                if (g_hat > eps - 1.0 / beta && g_hat <= eps) continue;
                if (switch_weight(soft, g_hat) != switch_weight(hard, g_hat)) {
                  *d = "weights diverge at g_hat = " + describe(g_hat);
                  return false;
                }
              }
              return true;
            });

  add_check(results, "problems: convexity / subgradient / Lipschitz spot checks",
            [&](std::string* d) {
              FederatedProblem np = small_np(derive_seed(seed, "np"), Partition::iid_split,
                                             false);
              FederatedProblem lb = build_synthetic_linear_ball(
                  2, ModelVector(std::vector<double>{1.0, 1.0}), 1.0, 4, 2.0, 0.25,
                  derive_seed(seed, "lb"));
              Rng rng = substream(seed, "verify-problems");
              for (const FederatedProblem* prob : {&np, &lb}) {
                for (int t = 0; t < 200; ++t) {
                  const ModelVector w1 = random_domain_point(prob->domain, rng);
                  const ModelVector w2 = random_domain_point(prob->domain, rng);
                  const double lambda = rng.uniform();
                  ModelVector mid = w1;
                  mid *= lambda;
                  mid.axpy(1.0 - lambda, w2);
                  const auto& client =
                      prob->clients[rng.below(static_cast<std::uint64_t>(prob->n()))];
                  const double fmid = client.objective_value(mid);
                  const double fmix = lambda * client.objective_value(w1) +
                                      (1.0 - lambda) * client.objective_value(w2);
                  if (fmid > fmix + 1e-9) {
                    *d = "objective convexity violated";
                    return false;
                  }
                  const double gap = client.constraint_value(w1) -
                                     client.constraint_value(w2) -
                                     dot(client.constraint_subgrad(w2), w1 - w2);
                  if (gap < -1e-9) {
                    *d = "constraint subgradient inequality violated";
                    return false;
                  }
                  if (norm(client.objective_subgrad(w1)) > client.lipschitz_G + 1e-9) {
                    *d = "Lipschitz certificate violated";
                    return false;
                  }
                }
              }
              return true;
            });

  add_check(results, "problems: logistic loss matches finite differences",
            [&](std::string* d) {
              Rng rng = substream(seed, "verify-fd");
              for (int t = 0; t < 100; ++t) {
                const std::size_t dim = 6;
                const ModelVector w = random_vector(dim, rng);
                std::vector<double> x(dim);
                for (auto& v : x) v = rng.normal();
                const int y = static_cast<int>(rng.below(2));
                ModelVector u = random_vector(dim, rng);
                u *= 1.0 / norm(u);
                const double h = 1e-6;
                ModelVector wp = w, wm = w;
                wp.axpy(h, u);
                wm.axpy(-h, u);
                const double fd =
                    (logistic_loss(wp, x, y) - logistic_loss(wm, x, y)) / (2.0 * h);
                const double an = dot(logistic_grad(w, x, y), u);
                if (std::fabs(fd - an) > 1e-5) {
                  *d = "directional derivative mismatch: " + describe(fd) + " vs " +
                       describe(an);
                  return false;
                }
              }
              return true;
            });

  RoundConfig small_cfg;
  small_cfg.T = 40;
  small_cfg.E = 3;
  small_cfg.n = 4;
  small_cfg.m = 2;
  small_cfg.eta = 0.05;
  small_cfg.switch_mode = SwitchMode::hard(0.3);
  small_cfg.seed = derive_seed(seed, "verify-run");

  add_check(results, "engine: local drift and delta bounds", [&](std::string* d) {
    FederatedProblem np = small_np(derive_seed(seed, "np2"), Partition::iid_split, false);
    const RunTrace trace = run(small_cfg, np, ModelVector::zeros(np.dim));
    return check_drift_bound(trace, small_cfg.eta, small_cfg.E, np.lipschitz_G(), d) &&
           check_delta_bound(trace, small_cfg.E, np.lipschitz_G(), d);
  });

  add_check(results, "engine: identity compressors reproduce the uncompressed run",
            [&](std::string* d) {
              FederatedProblem np = small_np(derive_seed(seed, "np3"), Partition::iid_split,
                                             false);
              RoundConfig off = small_cfg;
              RoundConfig on = small_cfg;
              on.comp = CompressionConfig::on(CompressorSpec::identity(),
                                              CompressorSpec::identity());
              const RunTrace t_off = run(off, np, ModelVector::zeros(np.dim));
              const RunTrace t_on = run(on, np, ModelVector::zeros(np.dim));
              if (!traces_identical(t_off, t_on)) {
                *d = "traces differ";
                return false;
              }
              for (const auto& res : t_on.final_state.residuals) {
                if (!(res.value == ModelVector::zeros(np.dim))) {
                  *d = "identity residual became nonzero";
                  return false;
                }
              }
              return true;
            });

  add_check(results, "engine: unsampled residuals frozen bit-for-bit", [&](std::string* d) {
    FederatedProblem np = small_np(derive_seed(seed, "np4"), Partition::iid_split, false);
    RoundConfig cfg = small_cfg;
    cfg.comp = CompressionConfig::on(CompressorSpec::top_k(3), CompressorSpec::top_k(3));
    AlgoState state = init_state(cfg, np, ModelVector::zeros(np.dim));
    for (int t = 0; t < cfg.T; ++t) {
      const auto before = state.residuals;
      const RoundRecord rec = run_round(state, cfg, np);
      for (int j = 0; j < cfg.n; ++j) {
        const bool sampled =
            std::find(rec.sampled.begin(), rec.sampled.end(), j) != rec.sampled.end();
        if (!sampled && !(state.residuals[static_cast<std::size_t>(j)].value ==
                          before[static_cast<std::size_t>(j)].value)) {
          *d = "round " + std::to_string(t) + ": residual of unsampled client " +
               std::to_string(j) + " changed";
          return false;
        }
      }
    }
    return true;
  });

  add_check(results, "engine: virtual iterate recursion", [&](std::string* d) {
    FederatedProblem np = small_np(derive_seed(seed, "np5"), Partition::iid_split, true);
    RoundConfig cfg = small_cfg;
    cfg.n = 4;
    cfg.m = 4;  // full participation
    cfg.comp = CompressionConfig::on(CompressorSpec::top_k(5), CompressorSpec::top_k(5));
    AlgoState state = init_state(cfg, np, ModelVector::zeros(np.dim));
    auto virtual_iterate = [&]() {
      ModelVector mean_res(np.dim);
      for (const auto& r : state.residuals) mean_res += r.value;
      mean_res *= 1.0 / cfg.n;
      ModelVector v = *state.x;
      v.axpy(-cfg.eta, mean_res);
      return v;
    };
    ModelVector w_hat = virtual_iterate();
    for (int t = 0; t < cfg.T; ++t) {
      const RoundRecord rec = run_round(state, cfg, np);
      ModelVector expected = w_hat;
      expected.axpy(-cfg.eta, *rec.delta_mean);
      w_hat = virtual_iterate();
      if (distance(w_hat, expected) > 1e-9) {
        *d = "round " + std::to_string(t) + ": residual norm " +
             describe(distance(w_hat, expected));
        return false;
      }
    }
    return true;
  });

  add_check(results, "analysis: skewness bound and homogeneous collapse",
            [&](std::string* d) {
              FederatedProblem het = small_np(derive_seed(seed, "np6"),
                                              Partition::iid_split, false);
              FederatedProblem hom = small_np(derive_seed(seed, "np6"),
                                              Partition::replicate, false);
              Rng rng = substream(seed, "verify-skew");
              for (int t = 0; t < 200; ++t) {
                const ModelVector w = random_vector(het.dim, rng, 2.0);
                const SkewnessDiagnostics sd = skewness_diagnostics(het, w);
                if (sd.bound_gap < -1e-9) {
                  *d = "bound gap " + describe(sd.bound_gap) + " at trial " +
                       std::to_string(t);
                  return false;
                }
                const SkewnessDiagnostics sh = skewness_diagnostics(hom, w);
                if (sh.k_diff_frob > 1e-9) {
                  *d = "homogeneous clients produced local skew " +
                       describe(sh.k_diff_frob);
                  return false;
                }
              }
              return true;
            });

  add_check(results, "analysis: gamma collapse and eta identity", [&](std::string* d) {
    for (int E = 1; E <= 6; ++E) {
      if (gamma_full(E, 1.0, 1.0) != 2.0 * E * E) {
        *d = "gamma_full(E,1,1) != 2E^2 at E=" + std::to_string(E);
        return false;
      }
      if (gamma_partial(E, 1.0, 1.0, 10, 5) != 2.0 * E * E + 20.0 * E) {
        *d = "gamma_partial compression terms failed to collapse at E=" +
             std::to_string(E);
        return false;
      }
    }
    Rng rng = substream(seed, "verify-eta");
    for (int t = 0; t < 200; ++t) {
      TheoremInputs ti;
      ti.D = 0.5 + rng.uniform() * 10.0;
      ti.G = 0.5 + rng.uniform() * 10.0;
      ti.E = 1 + static_cast<int>(rng.below(8));
      ti.T = 1 + static_cast<int>(rng.below(10000));
      ti.q = 0.1 + 0.9 * rng.uniform();
      ti.q0 = 0.1 + 0.9 * rng.uniform();
      const TheoremOutputs out = theorem1_params(ti, Regime::full);
      const double lhs = 2.0 * ti.G * ti.G * ti.E * ti.T * out.gamma * out.eta * out.eta;
      if (std::fabs(lhs - ti.D * ti.D) > 1e-12 * ti.D * ti.D) {
        *d = "eta identity violated: " + describe(lhs) + " vs D^2 = " +
             describe(ti.D * ti.D);
        return false;
      }
    }
    return true;
  });

  return results;
}

}  // namespace fedswitch
