#include "gfdm/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>

namespace gfdm {

namespace {

json vec_to_json(const RVec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

RVec vec_from_json(const json& a) {
    RVec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
    return v;
}

}  // namespace

json to_json(const GfdmConfig& cfg) {
    return json{{"K", cfg.K}, {"M", cfg.M}, {"Ncp", cfg.Ncp}, {"Nw", cfg.Nw}, {"Ts", cfg.Ts}};
}

GfdmConfig config_from_json(const json& j) {
    reject_unknown_keys(j, {"K", "M", "Ncp", "Nw", "Ts"}, "config");
    return GfdmConfig(j.at("K").get<int>(), j.at("M").get<int>(), j.value("Ncp", 0),
                      j.value("Nw", 0), j.value("Ts", 1.0));
}

json to_json(const FilterSpec& f) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < 2 * f.M; ++i) {
        re.push_back(f.gamma[i].real());
        im.push_back(f.gamma[i].imag());
    }
    return json{{"M", f.M}, {"gamma_re", re}, {"gamma_im", im}};
}

FilterSpec filter_from_json(const json& j) {
    reject_unknown_keys(j, {"M", "gamma_re", "gamma_im"}, "filter");
    const int M = j.at("M").get<int>();
    const auto& re = j.at("gamma_re");
    const auto& im = j.at("gamma_im");
    if (static_cast<int>(re.size()) != 2 * M || static_cast<int>(im.size()) != 2 * M)
        throw config_error("filter: gamma arrays must have length 2M");
    CVec g(2 * M);
    for (int i = 0; i < 2 * M; ++i) g[i] = cplx(re[i].get<double>(), im[i].get<double>());
    return FilterSpec(M, std::move(g));
}

json to_json(const CVec& v) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(v[i].real());
        im.push_back(v[i].imag());
    }
    return json{{"re", re}, {"im", im}};
}

CVec cvec_from_json(const json& j) {
    reject_unknown_keys(j, {"re", "im"}, "cvec");
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != im.size()) throw config_error("cvec: re/im length mismatch");
    CVec v(re.size());
    for (std::size_t i = 0; i < re.size(); ++i)
        v[i] = cplx(re[i].get<double>(), im[i].get<double>());
    return v;
}

json to_json(const ModulationMatrix& mm) {
    json j = to_json(mm.cfg);
    const json f = to_json(mm.filter);
    j["gamma_re"] = f.at("gamma_re");
    j["gamma_im"] = f.at("gamma_im");
    return j;
}

ModulationMatrix modulation_matrix_from_json(const json& j) {
    reject_unknown_keys(j, {"K", "M", "Ncp", "Nw", "Ts", "gamma_re", "gamma_im"},
                        "modulation_matrix");
    json jc = j;
    jc.erase("gamma_re");
    jc.erase("gamma_im");
    const GfdmConfig cfg = config_from_json(jc);
    const json jf{{"M", cfg.M}, {"gamma_re", j.at("gamma_re")}, {"gamma_im", j.at("gamma_im")}};
    return modulation_matrix(cfg, filter_from_json(jf));
}

json to_json(const WindowSpec& w) { return json{{"Nw", w.Nw()}, {"taper", vec_to_json(w.taper)}}; }

WindowSpec window_from_json(const json& j) {
    reject_unknown_keys(j, {"Nw", "taper"}, "window");
    RVec t = vec_from_json(j.at("taper"));
    if (j.contains("Nw") && j.at("Nw").get<int>() != t.size())
        throw config_error("window: Nw does not match taper length");
    return WindowSpec(std::move(t));
}

json to_json(const RateReport& r) {
    json sinr = json::array();
    for (Eigen::Index k = 0; k < r.sinr.rows(); ++k) {
        json row = json::array();
        for (Eigen::Index m = 0; m < r.sinr.cols(); ++m) row.push_back(r.sinr(k, m));
        sinr.push_back(row);
    }
    return json{{"receiver", receiver_name(r.receiver)},
                {"sinr", sinr},
                {"sum_rate_bits", r.sum_rate_bits}};
}

json to_json(const PsdGrid& g) {
    return json{{"f", vec_to_json(g.f)},
                {"p_linear", vec_to_json(g.p)},
                {"windowed", g.windowed},
                {"meta", g.meta}};
}

json to_json(const OptResult& r) {
    json j{{"filter", to_json(r.filter)},
           {"objective", r.objective},
           {"objective_trace", vec_to_json(r.objective_trace)},
           {"constraint_residuals", vec_to_json(r.constraint_residuals)},
           {"converged", r.converged},
           {"best_restart", r.best_restart}};
    if (r.window) j["window"] = to_json(*r.window);
    return j;
}

std::string format_double(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char trial[64];
        std::snprintf(trial, sizeof(trial), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(trial, "%lg", &back);
        if (back == v) return trial;
    }
    return buf;
}

double to_db(double linear) { return 10.0 * std::log10(std::max(linear, 1e-300)); }

void write_psd_csv(std::ostream& os, const PsdGrid& g) {
    os << "f,p_linear,p_db\n";
    for (Eigen::Index i = 0; i < g.f.size(); ++i)
        os << format_double(g.f[i]) << ',' << format_double(g.p[i]) << ','
           << format_double(to_db(g.p[i])) << '\n';
}

void write_rate_csv_row(std::ostream& os, double snr_db, Receiver receiver, double rate_bits) {
    os << format_double(snr_db) << ',' << receiver_name(receiver) << ','
       << format_double(rate_bits) << '\n';
}

std::string config_hash(const json& j) {
    const std::uint64_t h = fnv1a(j.dump());  // nlohmann objects iterate in sorted key order
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void write_provenance(std::ostream& os, const std::string& tool_version,
                      const std::string& cfg_hash, std::uint64_t seed) {
    os << "# tool_version=" << tool_version << "\n# config_hash=" << cfg_hash
       << "\n# seed=" << seed << '\n';
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& path) {
    if (!j.is_object()) throw config_error(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                ok = true;
                break;
            }
        if (!ok) throw config_error("unknown key '" + path + "." + it.key() + "'");
    }
}

}  // namespace gfdm
