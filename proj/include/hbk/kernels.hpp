#pragma once

#include <cmath>
#include <mutex>
#include <set>
#include <string>
#include <utility>

#include "hbk/error.hpp"
#include "hbk/field.hpp"
#include "hbk/lattice.hpp"
#include "hbk/log.hpp"

namespace hbk {

enum class Backend { direct, spectral };
enum class PvMode { lorentzian, sharp };

struct SpectralQuadrature {
    double tail = 1e-10;        // required bound on e^{-eps S_max}
    double s_max = 0.0;         // 0 picks ln(1/tail)/eps
    double panel_phase = 4.0;   // max phase |omega_| * panel length
};

struct CollisionParams {
    double epsilon = 0.5;
    Backend backend = Backend::direct;
    PvMode pv_mode = PvMode::lorentzian;
    double kappa = 2.0;
    bool strict_floor = false;
    double tol_herm = default_tol_herm;
    SpectralQuadrature spectral{};
};

/// Pre-symmetrization diagnostics of an operator evaluation.
struct OpStats {
    double herm_residual = 0.0;
};

inline void require_regulator(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(errc::bad_regulator, "epsilon must be positive");
}

/// eps / (x^2 + eps^2). Callers add the 1/pi of the measure where needed.
inline double lorentzian_delta(double x, double eps) {
    require_regulator(eps);
    return eps / (x * x + eps * eps);
}

/// x / (x^2 + eps^2).
inline double pv_kernel(double x, double eps) {
    require_regulator(eps);
    return x / (x * x + eps * eps);
}

/// 1{|x| >= eps} / x.
inline double sharp_pv_kernel(double x, double eps) {
    require_regulator(eps);
    return std::abs(x) >= eps ? 1.0 / x : 0.0;
}

/// Checks the regulator and the resolution floor of the direct quadrature.
/// Below the floor the default is a one-time warning; strict_floor makes it an error.
inline void check_params(const CollisionParams& p, const DispersionRelation& om) {
    require_regulator(p.epsilon);
    if (p.backend != Backend::direct) return;
    const double floor = eps_floor(om, p.kappa);
    if (p.epsilon >= floor) return;
    const std::string msg = "epsilon " + std::to_string(p.epsilon) + " below grid floor " + std::to_string(floor) +
                            " (N=" + std::to_string(om.grid().n()) + ")";
    if (p.strict_floor) throw Error(errc::bad_regulator, msg);
    static std::mutex m;
    static std::set<std::pair<int, double>> seen;
    std::lock_guard<std::mutex> lock(m);
    if (seen.emplace(om.grid().n(), p.epsilon).second) warn(msg);
}

inline void check_grid(const WignerField& w, const DispersionRelation& om) {
    if (!(w.grid() == om.grid())) throw Error(errc::grid_mismatch, "field and dispersion grids differ");
}

/// Raw quadruple sums shared by every collision operator:
///   sx(k1) = N^-2d sum L(w_) W3 J[W~2 W4]
///   sy(k1) = N^-2d sum L(w_) W~3 J[W2 W~4]
///   h(k1)  = H_eff (short form, -1/2 included, not yet symmetrized)
struct CollisionParts {
    WignerField sx;
    WignerField sy;
    WignerField h;
    bool has_diss = false;
    bool has_h = false;
};

enum PartMask : unsigned { part_diss = 1u, part_heff = 2u, part_all = 3u };

}  // namespace hbk
