#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "hbk/collision.hpp"
#include "hbk/diagnostics.hpp"
#include "hbk/evolution.hpp"

namespace hbk::io {

struct RunConfig {
    int d = 1;
    int n = 16;

    std::string dispersion = "nearest-neighbor";  // or "tabulated"
    double c = 0.0;
    std::string dispersion_path;

    double epsilon = 1.0;
    Backend backend = Backend::direct;
    PvMode pv_mode = PvMode::lorentzian;
    double kappa = 2.0;
    bool strict_floor = false;

    Scheme scheme = Scheme::rk4;
    double dt = 1e-2;
    double t_end = 0.2;
    bool truncation = false;
    int record_every = 1;
    int snapshot_every = 0;  // 0: initial and final only
    double fermi_limit = 0.1;

    std::string init = "constant";  // constant | cosine | polarized-bump | random-fermi | diagonal | field
    double init_value = 0.5;
    std::string init_path;
    std::optional<double> mollify_delta;

    std::uint64_t seed = 1;
    std::string output_dir = "hbk_out";

    // epsilon-study
    std::vector<std::pair<int, double>> schedule{{64, 0.4}, {128, 0.2}, {256, 0.1}};
    StudyOp study_op = StudyOp::h_eff;
    double slack = 0.1;
    bool cross_mode = true;

    // sigma-coll; unset bounds default to +-(sup |Omega~| + 2 eps / (pi tol))
    std::optional<double> alpha_min, alpha_max, alpha_step;
    double alpha_tail = 1e-4;
    int sigma_k = 0;

    // validate-dispersion
    int decay_n = 512;
    double decay_t_min = 5.0;
    double decay_t_max = 40.0;
    int decay_samples = 36;
    int f_resolution = 32;
    double integrability_step = 0.5;

    CollisionParams collision_params() const {
        CollisionParams p;
        p.epsilon = epsilon;
        p.backend = backend;
        p.pv_mode = pv_mode;
        p.kappa = kappa;
        p.strict_floor = strict_floor;
        return p;
    }
    IntegratorConfig integrator() const {
        IntegratorConfig c;
        c.scheme = scheme;
        c.dt = dt;
        c.t_end = t_end;
        c.truncation = truncation;
        c.record_every = record_every;
        c.fermi_limit = fermi_limit;
        return c;
    }
    TorusGrid grid() const { return TorusGrid(d, n); }
};

inline const char* to_string(Backend b) { return b == Backend::direct ? "direct" : "spectral"; }
inline const char* to_string(PvMode m) { return m == PvMode::lorentzian ? "lorentzian" : "sharp"; }
inline const char* to_string(Scheme s) { return s == Scheme::rk4 ? "rk4" : "exp-duhamel"; }
inline const char* to_string(StudyOp o) { return o == StudyOp::h_eff ? "h_eff" : "c_diss"; }

inline std::string schedule_string(const std::vector<std::pair<int, double>>& s) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? ", " : "") << s[i].first << ':' << s[i].second;
    return os.str();
}

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["grid"] = {{"d", c.d}, {"N", c.n}};
    j["dispersion"] = {{"kind", c.dispersion}, {"c", c.c}, {"path", c.dispersion_path}};
    j["collision"] = {{"epsilon", c.epsilon}, {"backend", to_string(c.backend)}, {"pv_mode", to_string(c.pv_mode)},
                      {"kappa", c.kappa}, {"strict_floor", c.strict_floor}};
    j["integrator"] = {{"scheme", to_string(c.scheme)}, {"dt", c.dt}, {"t_end", c.t_end},
                       {"truncation", c.truncation}, {"record_every", c.record_every},
                       {"snapshot_every", c.snapshot_every}, {"fermi_limit", c.fermi_limit}};
    j["initial_data"] = {{"kind", c.init}, {"value", c.init_value}, {"path", c.init_path}};
    j["mollify_delta"] = c.mollify_delta ? nlohmann::json(*c.mollify_delta) : nlohmann::json(nullptr);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["epsilon_study"] = {{"schedule", schedule_string(c.schedule)}, {"operator", to_string(c.study_op)},
                          {"slack", c.slack}, {"cross_mode", c.cross_mode}};
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    j["sigma_coll"] = {{"alpha_min", opt(c.alpha_min)}, {"alpha_max", opt(c.alpha_max)},
                       {"alpha_step", opt(c.alpha_step)}, {"tail", c.alpha_tail}, {"k", c.sigma_k}};
    j["validate_dispersion"] = {{"decay_N", c.decay_n},         {"t_min", c.decay_t_min},
                                {"t_max", c.decay_t_max},       {"samples", c.decay_samples},
                                {"resolution", c.f_resolution}, {"integrability_step", c.integrability_step}};
    return j;
}

/// The resolved config as "# key = value" lines, for CSV headers.
inline std::string comment_block(const RunConfig& c) {
    std::ostringstream os;
    const auto j = to_json(c);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it->is_object()) {
            for (auto jt = it->begin(); jt != it->end(); ++jt)
                os << "# " << it.key() << '.' << jt.key() << " = " << jt->dump() << '\n';
        } else {
            os << "# " << it.key() << " = " << it->dump() << '\n';
        }
    }
    return os.str();
}

namespace detail {

inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (!quoted && (line[i] == '#' || line[i] == ';') && i > 0) return line.substr(0, i);
    }
    return line;
}

inline std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

[[noreturn]] inline void bad(const std::string& path, const std::string& why) {
    throw Error(errc::config, path + ": " + why);
}

class Reader {
public:
    explicit Reader(const boost::property_tree::ptree& t) : tree_(t) {}

    std::optional<std::string> raw(const std::string& path) {
        used_.insert(path);
        const auto v = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.'));
        if (!v) return std::nullopt;
        return unquote(*v);
    }

    void get(const std::string& path, std::string& out) {
        if (auto v = raw(path)) out = *v;
    }
    void get(const std::string& path, double& out) {
        if (auto v = raw(path)) out = number(path, *v);
    }
    void get(const std::string& path, std::optional<double>& out) {
        if (auto v = raw(path)) out = number(path, *v);
    }
    void get(const std::string& path, int& out) {
        if (auto v = raw(path)) {
            const double x = number(path, *v);
            if (x != std::floor(x) || std::abs(x) > 1e9) bad(path, "expected an integer, got '" + *v + "'");
            out = static_cast<int>(x);
        }
    }
    void get(const std::string& path, std::uint64_t& out) {
        if (auto v = raw(path)) {
            try {
                std::size_t pos = 0;
                out = std::stoull(*v, &pos);
                if (pos != v->size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                bad(path, "expected an unsigned integer, got '" + *v + "'");
            }
        }
    }
    void get(const std::string& path, bool& out) {
        if (auto v = raw(path)) {
            if (*v == "true") out = true;
            else if (*v == "false") out = false;
            else bad(path, "expected true or false, got '" + *v + "'");
        }
    }

    /// Every key present in the file must have been read.
    void reject_unknown() const {
        for (const auto& [k, v] : tree_) {
            if (v.empty()) {
                if (!used_.count(k)) bad(k, "unknown key");
                continue;
            }
            for (const auto& [k2, v2] : v)
                if (!used_.count(k + "." + k2)) bad(k + "." + k2, "unknown key");
        }
    }

private:
    static double number(const std::string& path, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            bad(path, "expected a number, got '" + s + "'");
        }
    }

    const boost::property_tree::ptree& tree_;
    std::set<std::string> used_;
};

inline std::vector<std::pair<int, double>> parse_schedule(const std::string& path, const std::string& s) {
    std::vector<std::pair<int, double>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) bad(path, "entries must look like N:eps, got '" + item + "'");
        try {
            out.emplace_back(std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::exception&) {
            bad(path, "cannot parse entry '" + item + "'");
        }
    }
    return out;
}

}  // namespace detail

/// Checks every precondition that can be decided without touching the data
/// files; errors name the offending key.
inline void validate(const RunConfig& c) {
    using detail::bad;
    if (c.d < 1 || c.d > 3) bad("grid.d", "must be 1, 2 or 3 (collision cost grows like N^(2d))");
    if (c.n < 2) bad("grid.N", "must be at least 2");
    if (c.dispersion != "nearest-neighbor" && c.dispersion != "tabulated")
        bad("dispersion.kind", "must be \"nearest-neighbor\" or \"tabulated\"");
    if (c.dispersion == "tabulated" && c.dispersion_path.empty()) bad("dispersion.path", "required for tabulated");
    if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) bad("collision.epsilon", "must be positive");
    if (!(c.kappa > 0.0)) bad("collision.kappa", "must be positive");
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) bad("integrator.dt", "must be positive");
    if (!(c.t_end >= 0.0)) bad("integrator.t_end", "must be nonnegative");
    if (c.record_every < 1) bad("integrator.record_every", "must be >= 1");
    if (c.snapshot_every < 0) bad("integrator.snapshot_every", "must be >= 0");
    if (!(c.fermi_limit > 0.0)) bad("integrator.fermi_limit", "must be positive");
    static const std::set<std::string> kinds{"constant", "cosine", "polarized-bump", "random-fermi", "diagonal", "field"};
    if (!kinds.count(c.init))
        bad("initial_data.kind", "must be constant, cosine, polarized-bump, random-fermi, diagonal or field");
    if (c.init == "constant" && !(c.init_value >= 0.0 && c.init_value <= 1.0))
        bad("initial_data.value", "must lie in [0, 1]");
    if ((c.init == "diagonal" || c.init == "field") && c.init_path.empty())
        bad("initial_data.path", "required for kind " + c.init);
    if (c.mollify_delta && !(*c.mollify_delta > 0.0 && *c.mollify_delta < 0.5))
        bad("mollify_delta", "must lie in (0, 1/2)");
    if (c.output_dir.empty()) bad("output_dir", "must not be empty");
    if (c.schedule.size() < 2) bad("epsilon_study.schedule", "needs at least two entries");
    for (std::size_t i = 0; i < c.schedule.size(); ++i) {
        if (c.schedule[i].first < 2 || !(c.schedule[i].second > 0.0))
            bad("epsilon_study.schedule", "entries need N >= 2 and eps > 0");
        if (i > 0 && c.schedule[i].first % c.schedule[i - 1].first != 0)
            bad("epsilon_study.schedule", "each N must be a multiple of the previous one");
        if (i > 0 && !(c.schedule[i].second < c.schedule[i - 1].second))
            bad("epsilon_study.schedule", "eps must decrease");
    }
    if (!(c.slack >= 0.0)) bad("epsilon_study.slack", "must be nonnegative");
    if (c.alpha_step && !(*c.alpha_step > 0.0)) bad("sigma_coll.alpha_step", "must be positive");
    if (c.alpha_min && c.alpha_max && !(*c.alpha_min < *c.alpha_max))
        bad("sigma_coll.alpha_max", "must exceed alpha_min");
    if (!(c.alpha_tail > 0.0 && c.alpha_tail < 1.0)) bad("sigma_coll.tail", "must lie in (0, 1)");
    if (c.sigma_k < 0) bad("sigma_coll.k", "must be a nonnegative grid index");
    if (c.decay_n < 8) bad("validate_dispersion.decay_N", "must be at least 8");
    if (c.decay_t_max > c.decay_n / 4.0) bad("validate_dispersion.t_max", "must not exceed decay_N / 4");
    if (!(c.decay_t_min >= 0.0 && c.decay_t_min < c.decay_t_max)) bad("validate_dispersion.t_min", "must lie in [0, t_max)");
    if (c.decay_samples < 2) bad("validate_dispersion.samples", "must be at least 2");
    if (c.f_resolution < 16) bad("validate_dispersion.resolution", "must be at least 16");
    if (!(c.integrability_step > 0.0)) bad("validate_dispersion.integrability_step", "must be positive");
}

/// Parses key/value text with [section] headers. Values may be quoted;
/// '#' and ';' start comments.
inline RunConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream clean;
    std::string line;
    while (std::getline(in, line)) clean << detail::strip_comment(line) << '\n';
    boost::property_tree::ptree tree;
    try {
        std::istringstream cin(clean.str());
        boost::property_tree::read_ini(cin, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw Error(errc::config, "line " + std::to_string(e.line()) + ": " + e.message());
    }
    RunConfig c;
    detail::Reader r(tree);
    r.get("grid.d", c.d);
    r.get("grid.N", c.n);
    r.get("dispersion.kind", c.dispersion);
    r.get("dispersion.c", c.c);
    r.get("dispersion.path", c.dispersion_path);
    r.get("collision.epsilon", c.epsilon);
    if (auto v = r.raw("collision.backend")) {
        if (*v == "direct") c.backend = Backend::direct;
        else if (*v == "spectral") c.backend = Backend::spectral;
        else detail::bad("collision.backend", "must be direct or spectral");
    }
    if (auto v = r.raw("collision.pv_mode")) {
        if (*v == "lorentzian") c.pv_mode = PvMode::lorentzian;
        else if (*v == "sharp") c.pv_mode = PvMode::sharp;
        else detail::bad("collision.pv_mode", "must be lorentzian or sharp");
    }
    r.get("collision.kappa", c.kappa);
    r.get("collision.strict_floor", c.strict_floor);
    if (auto v = r.raw("integrator.scheme")) {
        if (*v == "rk4") c.scheme = Scheme::rk4;
        else if (*v == "exp-duhamel") c.scheme = Scheme::exp_duhamel;
        else detail::bad("integrator.scheme", "must be rk4 or exp-duhamel");
    }
    r.get("integrator.dt", c.dt);
    r.get("integrator.t_end", c.t_end);
    r.get("integrator.truncation", c.truncation);
    r.get("integrator.record_every", c.record_every);
    r.get("integrator.snapshot_every", c.snapshot_every);
    r.get("integrator.fermi_limit", c.fermi_limit);
    r.get("initial_data.kind", c.init);
    r.get("initial_data.value", c.init_value);
    r.get("initial_data.path", c.init_path);
    r.get("mollify_delta", c.mollify_delta);
    r.get("seed", c.seed);
    r.get("output_dir", c.output_dir);
    if (auto v = r.raw("epsilon_study.schedule")) c.schedule = detail::parse_schedule("epsilon_study.schedule", *v);
    if (auto v = r.raw("epsilon_study.operator")) {
        if (*v == "h_eff") c.study_op = StudyOp::h_eff;
        else if (*v == "c_diss") c.study_op = StudyOp::c_diss;
        else detail::bad("epsilon_study.operator", "must be h_eff or c_diss");
    }
    r.get("epsilon_study.slack", c.slack);
    r.get("epsilon_study.cross_mode", c.cross_mode);
    r.get("sigma_coll.alpha_min", c.alpha_min);
    r.get("sigma_coll.alpha_max", c.alpha_max);
    r.get("sigma_coll.alpha_step", c.alpha_step);
    r.get("sigma_coll.tail", c.alpha_tail);
    r.get("sigma_coll.k", c.sigma_k);
    r.get("validate_dispersion.decay_N", c.decay_n);
    r.get("validate_dispersion.t_min", c.decay_t_min);
    r.get("validate_dispersion.t_max", c.decay_t_max);
    r.get("validate_dispersion.samples", c.decay_samples);
    r.get("validate_dispersion.resolution", c.f_resolution);
    r.get("validate_dispersion.integrability_step", c.integrability_step);
    r.reject_unknown();
    validate(c);
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::config, "config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline DispersionRelation make_dispersion(const RunConfig& c, const TorusGrid& g) {
    if (c.dispersion == "nearest-neighbor") return DispersionRelation::nearest_neighbor(g, c.c);
    if (!std::ifstream(c.dispersion_path)) detail::bad("dispersion.path", "cannot open '" + c.dispersion_path + "'");
    try {
        return DispersionRelation::from_csv(g, c.dispersion_path);
    } catch (const Error& e) {
        detail::bad("dispersion.path", e.what());
    }
}

namespace detail {

inline std::vector<std::vector<double>> read_rows(const std::string& path, const std::string& key,
                                                  std::size_t rows, std::size_t cols) {
    std::ifstream in(path);
    if (!in) bad(key, "cannot open '" + path + "'");
    std::vector<std::vector<double>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                if (out.empty() && row.empty()) break;  // header line
                bad(key, "non-numeric cell '" + cell + "' in '" + path + "'");
            }
        }
        if (row.empty()) continue;
        if (row.size() != cols)
            bad(key, "expected " + std::to_string(cols) + " columns, got " + std::to_string(row.size()));
        out.push_back(std::move(row));
    }
    if (out.size() != rows)
        bad(key, "expected " + std::to_string(rows) + " rows, got " + std::to_string(out.size()));
    return out;
}

}  // namespace detail

/// Analytic initial data as a function of k in [0, 1)^d, for the presets that
/// have one. Spin-up Gaussian bump over flat spin-down; cosine is
/// (1/2 + 1/4 mean_a cos(2 pi k_a)) I.
inline std::optional<ContinuumField> continuum_field(const RunConfig& c) {
    const int d = c.d;
    if (c.init == "constant") {
        const double v = c.init_value;
        return ContinuumField([v](const std::array<double, 3>&) { return SpinMatrix::scalar(v); });
    }
    if (c.init == "cosine")
        return ContinuumField([d](const std::array<double, 3>& k) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) s += std::cos(2 * std::numbers::pi * k[a]);
            return SpinMatrix::scalar(0.5 + 0.25 * s / d);
        });
    if (c.init == "polarized-bump")
        return ContinuumField([d](const std::array<double, 3>& k) {
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) {
                const double x = k[a] - std::floor(k[a] + 0.5);  // centred copy in [-1/2, 1/2)
                r2 += x * x;
            }
            return SpinMatrix::diag(0.2 + 0.6 * std::exp(-r2 / (2 * 0.1 * 0.1)), 0.3);
        });
    return std::nullopt;
}

/// Initial data in rows ordered by linear grid index. "diagonal" files carry
/// (up, down); "field" files carry the 8 reals re/im of W11, W12, W21, W22.
inline WignerField initial_field(const RunConfig& c, const TorusGrid& g) {
    WignerField w(g);
    if (auto f = continuum_field(c)) {
        for (std::size_t k = 0; k < g.size(); ++k) w[k] = (*f)(g.point_unit(k));
    } else if (c.init == "random-fermi") {
        Rng rng(c.seed);
        w = random_fermi_field(g, rng);
    } else if (c.init == "diagonal") {
        const auto rows = detail::read_rows(c.init_path, "initial_data.path", g.size(), 2);
        for (std::size_t i = 0; i < g.size(); ++i) w[i] = SpinMatrix::diag(rows[i][0], rows[i][1]);
    } else {
        const auto rows = detail::read_rows(c.init_path, "initial_data.path", g.size(), 8);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto& r = rows[i];
            w[i] = {cplx(r[0], r[1]), cplx(r[2], r[3]), cplx(r[4], r[5]), cplx(r[6], r[7])};
        }
        if (herm_residual(w) > default_tol_herm) detail::bad("initial_data.path", "field is not Hermitian");
    }
    if (c.mollify_delta) w = mollify(w, *c.mollify_delta);
    return w;
}

// ---- output ----------------------------------------------------------------

inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {
template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get_le(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw Error(errc::io, "truncated snapshot");
    return v;
}
}  // namespace detail

/// "HBWF", version, d, N, then N^d x 8 float64, then a u64 length and the
/// resolved config as JSON text.
inline void write_snapshot(const std::string& path, const WignerField& w, const nlohmann::json& meta) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(errc::io, "cannot write '" + path + "'");
    os.write("HBWF", 4);
    detail::put_le<std::uint32_t>(os, snapshot_version);
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(w.grid().dim()));
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(w.grid().n()));
    for (const auto& m : w.data())
        for (int i = 0; i < 4; ++i) {
            const cplx z = m.e[i];
            detail::put_le(os, z.real());
            detail::put_le(os, z.imag());
        }
    const std::string text = meta.dump();
    detail::put_le<std::uint64_t>(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
}

struct Snapshot {
    WignerField field;
    nlohmann::json meta;
};

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(errc::io, "cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "HBWF") throw Error(errc::io, "bad snapshot magic in '" + path + "'");
    if (detail::get_le<std::uint32_t>(is) != snapshot_version) throw Error(errc::io, "unsupported snapshot version");
    const auto d = static_cast<int>(detail::get_le<std::uint32_t>(is));
    const auto n = static_cast<int>(detail::get_le<std::uint32_t>(is));
    const TorusGrid g(d, n);
    WignerField w(g);
    for (auto& m : w.data()) {
        cplx e[4];
        for (auto& z : e) {
            const double re = detail::get_le<double>(is);
            z = cplx(re, detail::get_le<double>(is));
        }
        m = {e[0], e[1], e[2], e[3]};
    }
    Snapshot s{std::move(w), nlohmann::json::object()};
    if (is.peek() != std::char_traits<char>::eof()) {
        const auto len = detail::get_le<std::uint64_t>(is);
        std::string text(len, '\0');
        is.read(text.data(), static_cast<std::streamsize>(len));
        s.meta = nlohmann::json::parse(text);
    }
    return s;
}

inline std::ostream& full_precision(std::ostream& os) {
    return os << std::setprecision(std::numeric_limits<double>::max_digits10);
}

/// t, energy, spin (re/im of the 4 entries), fermi_residual, herm_residual.
inline void write_trajectory_csv(const std::string& path, const TrajectoryRecord& tr, const RunConfig& c) {
    std::ofstream os(path);
    if (!os) throw Error(errc::io, "cannot write '" + path + "'");
    os << comment_block(c) << "# status = " << tr.status << '\n';
    os << "t,energy,s11_re,s11_im,s12_re,s12_im,s21_re,s21_im,s22_re,s22_im,fermi_residual,herm_residual\n";
    full_precision(os);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        os << tr.times[i] << ',' << tr.energy[i];
        for (const cplx& z : tr.spin[i].e) os << ',' << z.real() << ',' << z.imag();
        os << ',' << tr.fermi_residual[i] << ',' << tr.herm_residual[i] << '\n';
    }
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw Error(errc::io, "cannot write '" + path + "'");
    os << j.dump(2) << '\n';
}

}  // namespace hbk::io
