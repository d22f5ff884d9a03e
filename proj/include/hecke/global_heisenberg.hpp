#pragma once

// Global Heisenberg layer: the lifted morphisms s-hat, phi-hat, theta-hat_p,
// psi-hat, the module R-hat_{Z^2}[theta-hat] acting on R-hat_H, and the
// global identities built from them.

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hecke/gl.hpp"
#include "hecke/global.hpp"
#include "hecke/heisenberg.hpp"
#include "hecke/json.hpp"

namespace hecke {
namespace global {

using HeisRing = GlobalRing<heis::System>;
using HeisElement = HeisRing::Element;
using HeisDirichlet = HeisRing::Dirichlet;

/// prime -> positive exponent of theta-hat_p.
using ThetaMonomial = std::map<std::int64_t, int>;

/// Basis element of R-hat_{Z^2}[theta-hat]: a global GL_2 key times a monomial.
struct ThetaTermKey {
  GlRing::Key coeff;
  ThetaMonomial theta;

  friend bool operator==(const ThetaTermKey&, const ThetaTermKey&) = default;
  friend auto operator<=>(const ThetaTermKey&, const ThetaTermKey&) = default;
};

using ThetaElement = HeckeElement<ThetaTermKey>;
using ThetaDirichlet = DirichletTrunc<ThetaElement>;

inline HeisRing::Factory heis_factory() {
  return [](std::int64_t p) { return heis::System(p); };
}

class Heisenberg {
 public:
  explicit Heisenberg(RingOptions opts = {}, GlRing::StoreFactory gl_stores = {},
                      HeisRing::StoreFactory heis_stores = {})
      : gl("gl2", gl_factory(2), opts, std::move(gl_stores)), heis("heis", heis_factory(), opts, std::move(heis_stores)) {}

  GlRing gl;
  HeisRing heis;

  const heis::Morphisms& maps(std::int64_t p) const {
    std::lock_guard lock(mu_);
    auto it = maps_.find(p);
    if (it == maps_.end()) it = maps_.emplace(p, std::make_unique<heis::Morphisms>(gl.local(p), heis.local(p))).first;
    return *it->second;
  }

  HeisElement s_hat(const GlElement& x) const {
    HeisElement out;
    for (const auto& [k, c] : x) {
      std::vector<std::tuple<std::int64_t, heis::Hecke, heis::Element>> f;
      for (const auto& [p, lk] : k) f.emplace_back(p, maps(p).s(gl::Hecke::basis(lk)), heis::Element::identity());
      out += tensor(f, c);
    }
    return out;
  }

  GlElement phi_hat(const HeisElement& x) const {
    GlElement out;
    for (const auto& [k, c] : x) {
      std::vector<std::tuple<std::int64_t, gl::Hecke, gl::Key>> f;
      for (const auto& [p, lk] : k) f.emplace_back(p, maps(p).phi(heis::Hecke::basis(lk)), gl.local_identity(p));
      out += tensor(f, c);
    }
    return out;
  }

  /// theta-hat_p^power: theta_p on the p-component, identity elsewhere.
  HeisElement theta_hat(const HeisElement& x, std::int64_t p, int power = 1) const {
    HeisElement out;
    for (const auto& [k, c] : x) {
      std::vector<std::tuple<std::int64_t, heis::Hecke, heis::Element>> f;
      auto it = k.find(p);
      const heis::Element comp = it == k.end() ? heis::Element::identity() : it->second;
      for (const auto& [q, lk] : k)
        if (q != p) f.emplace_back(q, heis::Hecke::basis(lk), heis::Element::identity());
      f.emplace_back(p, maps(p).theta(heis::Hecke::basis(comp), power), heis::Element::identity());
      out += tensor(f, c);
    }
    return out;
  }

  /// Specialises every theta-hat_p to 1.
  GlElement psi_hat(const ThetaElement& q) const {
    GlElement out;
    for (const auto& [k, c] : q) out.add_term(k.coeff, c);
    return out;
  }

  /// Product in the commutative polynomial ring R-hat_{Z^2}[theta-hat].
  ThetaElement theta_mul(const ThetaElement& a, const ThetaElement& b) const {
    ThetaElement out;
    for (const auto& [ka, ca] : a)
      for (const auto& [kb, cb] : b) {
        ThetaMonomial mono = ka.theta;
        for (const auto& [p, e] : kb.theta) mono[p] += e;
        const GlElement prod = gl.mul(GlElement::basis(ka.coeff), GlElement::basis(kb.coeff));
        for (const auto& [g, cg] : prod) out.add_term(ThetaTermKey{g, mono}, ca * cb * cg);
      }
    return out;
  }

  /// Module action: (a theta-hat^e) . M = s-hat(a) theta-hat^e(M), computed
  /// prime by prime as s_p(a_p) theta_p^{e_p}(M_p).
  HeisElement act(const ThetaElement& q, const HeisElement& m) const {
    HeisElement out;
    for (const auto& [tk, tc] : q)
      for (const auto& [mk, mc] : m) {
        std::map<std::int64_t, std::tuple<gl::Key, int, heis::Element>> parts;
        auto slot = [&](std::int64_t p) -> std::tuple<gl::Key, int, heis::Element>& {
          auto it = parts.find(p);
          if (it == parts.end())
            it = parts.emplace(p, std::make_tuple(gl.local_identity(p), 0, heis::Element::identity())).first;
          return it->second;
        };
        for (const auto& [p, k] : tk.coeff) std::get<0>(slot(p)) = k;
        for (const auto& [p, e] : tk.theta) std::get<1>(slot(p)) = e;
        for (const auto& [p, k] : mk) std::get<2>(slot(p)) = k;

        std::vector<std::tuple<std::int64_t, heis::Hecke, heis::Element>> f;
        for (const auto& [p, part] : parts) {
          const auto& [a, e, comp] = part;
          f.emplace_back(p, maps(p).act(heis::ThetaPoly::monomial(gl::Hecke::basis(a), e), heis::Hecke::basis(comp)),
                         heis::Element::identity());
        }
        out += tensor(f, tc * mc);
      }
    return out;
  }

  /// I-hat_2(theta-hat; s) = prod_{p^2 <= bound} g_{2,p}(theta-hat_p; p^{1-2s}):
  /// theta_p^2 at n = 1, -p T_p(1,p) theta_p at n = p^2, p^3 T_p(p,p) at n = p^4.
  ThetaDirichlet i2_theta_trunc(std::int64_t bound) const {
    ThetaDirichlet acc(bound);
    acc[1] = ThetaElement::basis(ThetaTermKey{});
    for (std::int64_t p : primes_up_to(bound)) {
      if (p * p > bound) break;
      ThetaDirichlet factor(bound);
      factor[1] = ThetaElement::basis(ThetaTermKey{{}, {{p, 2}}});
      factor[p * p] = ThetaElement::basis(ThetaTermKey{{{p, gl::Key{{0, 1}}}}, {{p, 1}}}, PInt(-p));
      if (p * p <= bound / (p * p))
        factor[p * p * p * p] = ThetaElement::basis(ThetaTermKey{{{p, gl::Key{{1, 1}}}}, {}}, pow_big(PInt(p), 3));
      acc = dirichlet_mul(acc, factor, [this](const ThetaElement& x, const ThetaElement& y) { return theta_mul(x, y); });
    }
    return acc;
  }

  HeisDirichlet act_series(const ThetaDirichlet& q, const HeisDirichlet& d) const {
    return dirichlet_mul(q, d, [this](const ThetaElement& x, const HeisElement& y) { return act(x, y); });
  }

  /// I-hat_2(theta-hat; s) . D-hat_H(s) = 1 up to bound.
  Report verify_global_identity(std::int64_t bound) const {
    Report rep;
    rep.identity = "I2(theta; s) . D_H(s) = 1";
    rep.parameters = {{"bound", bound}};
    const HeisDirichlet prod = act_series(i2_theta_trunc(bound), heis.dirichlet(bound));
    for (std::int64_t n = 1; n <= bound; ++n) {
      const HeisElement residual = prod[n] - (n == 1 ? heis.unit() : HeisElement{});
      rep.add("n=" + std::to_string(n), residual.is_zero(), terms_to_json(residual));
    }
    return rep;
  }

  /// psi-hat(I-hat_2) = I_2(2s - 1), phi-hat(D-hat_H(s)) = D-hat_{Z^2}(2s - 1),
  /// and their product is 1, all up to bound. The substitution s -> 2s - 1
  /// moves a coefficient c at n to n c at n^2.
  Report verify_recovery(std::int64_t bound) const {
    Report rep;
    rep.identity = "I2(2s-1) D_{Z^2}(2s-1) = 1 via psi-hat and phi-hat";
    rep.parameters = {{"bound", bound}};
    std::int64_t root = 1;
    while ((root + 1) * (root + 1) <= bound) ++root;

    const ThetaDirichlet i2 = i2_theta_trunc(bound);
    const HeisDirichlet dh = heis.dirichlet(bound);
    const GlDirichlet i2_ref = i_r_trunc(gl, root);
    const GlDirichlet dz_ref = gl.dirichlet(root);

    GlDirichlet psi_i2(bound), phi_dh(bound);
    for (std::int64_t n = 1; n <= bound; ++n) {
      psi_i2[n] = psi_hat(i2[n]);
      phi_dh[n] = phi_hat(dh[n]);
    }
    for (std::int64_t n = 1; n <= bound; ++n) {
      GlElement want_psi, want_phi;
      const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (r * r == n) {
        want_psi = PInt(r) * i2_ref[r];
        want_phi = PInt(r) * dz_ref[r];
      }
      const GlElement res_psi = psi_i2[n] - want_psi;
      rep.add("psi-hat(I2) n=" + std::to_string(n), res_psi.is_zero(), terms_to_json(res_psi));
      const GlElement res_phi = phi_dh[n] - want_phi;
      rep.add("phi-hat(D_H) n=" + std::to_string(n), res_phi.is_zero(), terms_to_json(res_phi));
    }

    const GlDirichlet prod = gl.dmul(psi_i2, phi_dh);
    const HeisDirichlet lifted = act_series(i2, dh);
    for (std::int64_t n = 1; n <= bound; ++n) {
      const GlElement residual = prod[n] - (n == 1 ? gl.unit() : GlElement{});
      rep.add("product n=" + std::to_string(n), residual.is_zero(), terms_to_json(residual));
      const GlElement compat = phi_hat(lifted[n]) - prod[n];
      rep.add("compatibility n=" + std::to_string(n), compat.is_zero(), terms_to_json(compat));
    }
    return rep;
  }

 private:
  mutable std::mutex mu_;
  mutable std::map<std::int64_t, std::unique_ptr<heis::Morphisms>> maps_;
};

}  // namespace global

template <>
struct KeyCodec<global::ThetaTermKey> {
  static json encode(const global::ThetaTermKey& k) {
    json theta = json::array();
    for (const auto& [p, e] : k.theta) theta.push_back({{"p", p}, {"exponent", e}});
    return {{"coeff", KeyCodec<global::GlRing::Key>::encode(k.coeff)}, {"theta", theta}};
  }
  static global::ThetaTermKey decode(const json& j) {
    global::ThetaTermKey k{KeyCodec<global::GlRing::Key>::decode(j.at("coeff")), {}};
    for (const auto& t : j.at("theta")) k.theta.emplace(t.at("p").get<std::int64_t>(), t.at("exponent").get<int>());
    return k;
  }
};

}  // namespace hecke
