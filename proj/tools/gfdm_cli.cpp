// Command-line front end: rate sweeps, PSD dumps, filter/window design, and
// uplink CFO rate evaluation, all driven by a JSON config.
//
// Exit codes: 0 ok, 1 usage/config error, 2 numerical error, 3 solver did
// not converge.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gfdm/filters.hpp"
#include "gfdm/serialize.hpp"

namespace gfdm::cli {

constexpr const char* kToolVersion = "1.0.0";

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json j;
    in >> j;
    return j;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file: " + path);
    return out;
}

FilterSpec make_filter(const json& j, const GfdmConfig& cfg) {
    reject_unknown_keys(j, {"type", "alpha", "path", "M", "gamma_re", "gamma_im"}, "filter");
    const std::string type = j.at("type").get<std::string>();
    if (type == "dirichlet") return dirichlet_filter(cfg.M);
    if (type == "rc" || type == "rrc")
        return raised_cosine_filter(cfg.M, j.at("alpha").get<double>(), type == "rrc");
    if (type == "file") {
        const json jf = load_config(j.at("path").get<std::string>());
        return filter_from_json(jf.contains("filter") ? jf.at("filter") : jf);
    }
    if (type == "coeffs") {
        json jc = j;
        jc.erase("type");
        if (!jc.contains("M")) jc["M"] = cfg.M;
        return filter_from_json(jc);
    }
    throw config_error("filter.type must be dirichlet | rc | rrc | file | coeffs");
}

ChannelSpec make_channel(const json& j, const GfdmConfig& cfg, Rng& rng) {
    if (j.is_null()) return ChannelSpec::awgn(cfg);
    reject_unknown_keys(j, {"profile", "chip_rate_hz", "taps_re", "taps_im"}, "channel");
    const std::string profile = j.value("profile", "awgn");
    if (profile == "awgn") return ChannelSpec::awgn(cfg);
    if (profile == "pedestrian_b")
        return ChannelSpec::from_taps(cfg,
                                      pedestrian_b_taps(rng, j.value("chip_rate_hz", 3.84e6)));
    if (profile == "taps") {
        const auto& re = j.at("taps_re");
        const auto& im = j.at("taps_im");
        if (re.size() != im.size()) throw config_error("channel: taps_re/taps_im length mismatch");
        CVec h(re.size());
        for (std::size_t i = 0; i < re.size(); ++i)
            h[i] = cplx(re[i].get<double>(), im[i].get<double>());
        return ChannelSpec::from_taps(cfg, h);
    }
    throw config_error("channel.profile must be awgn | pedestrian_b | taps");
}

Receiver parse_receiver(const std::string& name) {
    if (name == "MF") return Receiver::MF;
    if (name == "MF_SIC") return Receiver::MF_SIC;
    if (name == "ZF") return Receiver::ZF;
    if (name == "MMSE") return Receiver::MMSE;
    throw config_error("unknown receiver '" + name + "'");
}

OptOptions parse_opts(const json& j, std::uint64_t seed) {
    OptOptions o;
    o.seed = seed;
    if (j.is_null()) return o;
    reject_unknown_keys(j,
                        {"max_iters", "tol", "step0", "restarts", "penalty_rounds", "penalty0",
                         "p_stages", "max_outer", "min_outer"},
                        "opts");
    o.max_iters = j.value("max_iters", o.max_iters);
    o.tol = j.value("tol", o.tol);
    o.step0 = j.value("step0", o.step0);
    o.restarts = j.value("restarts", o.restarts);
    o.penalty_rounds = j.value("penalty_rounds", o.penalty_rounds);
    o.penalty0 = j.value("penalty0", o.penalty0);
    o.max_outer = j.value("max_outer", o.max_outer);
    o.min_outer = j.value("min_outer", o.min_outer);
    if (j.contains("p_stages")) o.p_stages = j.at("p_stages").get<std::vector<double>>();
    o.validate();
    return o;
}

UplinkProfile parse_uplink_profile(const json& jc) {
    const std::string name = jc.value("profile", "awgn");
    if (name == "pedestrian_b")
        return UplinkProfile::pedestrian_b(jc.value("chip_rate_hz", 3.84e6));
    if (name == "taps") {
        UplinkProfile p;
        p.kind = UplinkProfile::Kind::fixed;
        const auto& re = jc.at("users_taps_re");
        const auto& im = jc.at("users_taps_im");
        if (re.size() != im.size()) throw config_error("cfo: users_taps_re/_im size mismatch");
        for (std::size_t u = 0; u < re.size(); ++u) {
            if (re[u].size() != im[u].size())
                throw config_error("cfo: user taps re/im length mismatch");
            CVec h(re[u].size());
            for (std::size_t i = 0; i < re[u].size(); ++i)
                h[i] = cplx(re[u][i].get<double>(), im[u][i].get<double>());
            p.taps.push_back(std::move(h));
        }
        return p;
    }
    if (name != "awgn") throw config_error("cfo.profile must be awgn | pedestrian_b | taps");
    return UplinkProfile::awgn();
}

NominalNoiseModel parse_noise_model(const json& jc) {
    return (jc.value("noise_model", "row_norm") == std::string("literal"))
               ? NominalNoiseModel::literal
               : NominalNoiseModel::row_norm;
}

// ---------------------------------------------------------------------------

int cmd_rate(const CommonArgs& args) {
    const json j = load_config(args.config_path);
    reject_unknown_keys(j, {"config", "filter", "channel", "snr_db", "Ps", "receivers", "seed"},
                        "");
    const GfdmConfig cfg = config_from_json(j.at("config"));
    const FilterSpec filter = make_filter(j.at("filter"), cfg);
    const std::uint64_t seed = args.seed_set ? args.seed : j.value("seed", 1ull);
    Rng rng(seed);
    const ChannelSpec channel = make_channel(j.value("channel", json()), cfg, rng);
    const double Ps = j.value("Ps", 1.0);
    std::vector<Receiver> receivers;
    for (const auto& r : j.value("receivers", std::vector<std::string>{"ZF"}))
        receivers.push_back(parse_receiver(r));

    auto out = open_out(args.out_path);
    write_provenance(out, kToolVersion, config_hash(j), seed);
    out << "snr_db,receiver,sum_rate_bits\n";
    for (double db : j.at("snr_db").get<std::vector<double>>()) {
        const SnrPoint snr(Ps, Ps / std::pow(10.0, db / 10.0));
        for (Receiver r : receivers) {
            double rate = 0.0;
            switch (r) {
                case Receiver::MF:
                    // closed form in the AWGN case (K >= 3); dense otherwise
                    rate = (channel.is_awgn() && cfg.K >= 3)
                               ? cfg.N() * std::log2(1.0 + mf_sinr(filter, snr).sinr)
                               : rate_oracle(cfg, filter, channel, snr, r).sum_rate_bits;
                    break;
                case Receiver::MF_SIC:
                    rate = mf_sic_rate(cfg, snr);
                    break;
                case Receiver::ZF:
                    rate = channel.is_awgn()
                               ? zf_rate_awgn(cfg, filter, snr).sum_rate_bits
                               : zf_rate_general(cfg, filter, channel, snr).sum_rate_bits;
                    break;
                case Receiver::MMSE:
                    rate = channel.is_awgn()
                               ? mmse_rate_awgn(cfg, filter, snr).sum_rate_bits
                               : rate_oracle(cfg, filter, channel, snr, r).sum_rate_bits;
                    break;
            }
            write_rate_csv_row(out, db, r, rate);
        }
    }
    return 0;
}

int cmd_psd(const CommonArgs& args) {
    const json j = load_config(args.config_path);
    reject_unknown_keys(j, {"config", "filter", "Ps", "psd", "window", "seed"}, "");
    const GfdmConfig cfg = config_from_json(j.at("config"));
    const FilterSpec filter = make_filter(j.at("filter"), cfg);
    const double Ps = j.value("Ps", 1.0);
    const json jp = j.value("psd", json());
    double fmin = -2.0 / cfg.Ts, fmax = cfg.K / cfg.Ts + 2.0 / cfg.Ts;
    int points = 2048;
    bool windowed = false;
    if (!jp.is_null()) {
        reject_unknown_keys(jp, {"fmin", "fmax", "points", "windowed"}, "psd");
        fmin = jp.value("fmin", fmin);
        fmax = jp.value("fmax", fmax);
        points = jp.value("points", points);
        windowed = jp.value("windowed", false);
    }
    if (points < 2 || fmax <= fmin) throw config_error("psd: need points >= 2 and fmax > fmin");
    const RVec grid = RVec::LinSpaced(points, fmin, fmax);

    PsdGrid g;
    if (windowed) {
        const WindowSpec w = j.contains("window") ? window_from_json(j.at("window"))
                                                  : WindowSpec::rectangular(cfg.Nw);
        g = psd_windowed(cfg, filter, w, Ps, grid);
    } else {
        g = psd_total(cfg, filter, Ps, grid);
    }
    auto out = open_out(args.out_path);
    write_provenance(out, kToolVersion, config_hash(j), args.seed_set ? args.seed : 0);
    write_psd_csv(out, g);
    return 0;
}

int cmd_optimize(const CommonArgs& args) {
    const json j = load_config(args.config_path);
    reject_unknown_keys(j, {"config", "problem", "Ps", "snr_db", "eta", "receiver", "cfo", "opts",
                            "seed"},
                        "");
    const GfdmConfig cfg = config_from_json(j.at("config"));
    const std::string problem = j.at("problem").get<std::string>();
    const std::uint64_t seed = args.seed_set ? args.seed : j.value("seed", 1ull);
    const OptOptions opts = parse_opts(j.value("opts", json()), seed);
    const double Ps = j.value("Ps", 1.0);
    const double snr_db = j.value("snr_db", 0.0);
    const SnrPoint snr(Ps, Ps / std::pow(10.0, snr_db / 10.0));

    OptResult res;
    if (problem == "rate_max_awgn") {
        res = solve_rate_max_awgn(cfg, snr, parse_receiver(j.value("receiver", "ZF")), opts);
    } else if (problem == "oob_mfsic") {
        res = solve_oob_mfsic(cfg, Ps, opts);
    } else if (problem == "oob_zf") {
        res = solve_oob_zf(cfg, snr, j.at("eta").get<double>(), opts);
    } else if (problem == "rate_max_cfo") {
        const json jc = j.at("cfo");
        reject_unknown_keys(jc,
                        {"half_width", "n_mc", "profile", "chip_rate_hz", "noise_model",
                         "users_taps_re", "users_taps_im"},
                            "cfo");
        res = solve_rate_max_cfo(cfg, snr, jc.at("half_width").get<double>(),
                                 parse_uplink_profile(jc), jc.value("n_mc", 200), opts,
                                 parse_noise_model(jc));
    } else {
        throw config_error("problem must be rate_max_awgn | oob_mfsic | oob_zf | rate_max_cfo");
    }

    json out_json = to_json(res);
    out_json["seed"] = seed;
    out_json["config_hash"] = config_hash(j);
    out_json["tool_version"] = kToolVersion;
    auto out = open_out(args.out_path);
    out << out_json.dump(2) << '\n';
    return res.converged ? 0 : 3;
}

int cmd_joint_design(const CommonArgs& args) {
    const json j = load_config(args.config_path);
    reject_unknown_keys(j, {"config", "Ps", "L_stop", "mode", "optimize_window", "opts", "seed"},
                        "");
    const GfdmConfig cfg = config_from_json(j.at("config"));
    const std::uint64_t seed = args.seed_set ? args.seed : j.value("seed", 1ull);
    const OptOptions opts = parse_opts(j.value("opts", json()), seed);
    const JointStopbandMode mode = (j.value("mode", "unified") == std::string("split_bands"))
                                       ? JointStopbandMode::split_bands
                                       : JointStopbandMode::unified;
    const OptResult res = joint_design_oob(cfg, j.value("Ps", 1.0), j.at("L_stop").get<double>(),
                                           opts, mode, j.value("optimize_window", true));
    json out_json = to_json(res);
    out_json["seed"] = seed;
    out_json["config_hash"] = config_hash(j);
    out_json["tool_version"] = kToolVersion;
    auto out = open_out(args.out_path);
    out << out_json.dump(2) << '\n';
    return res.converged ? 0 : 3;
}

int cmd_cfo_rate(const CommonArgs& args) {
    const json j = load_config(args.config_path);
    reject_unknown_keys(j, {"config", "filter", "snr_db", "Ps", "cfo", "seed"}, "");
    const GfdmConfig cfg = config_from_json(j.at("config"));
    const FilterSpec filter = make_filter(j.at("filter"), cfg);
    const std::uint64_t seed = args.seed_set ? args.seed : j.value("seed", 1ull);
    const double Ps = j.value("Ps", 1.0);
    const json jc = j.at("cfo");
    reject_unknown_keys(jc,
                        {"half_width", "n_mc", "profile", "chip_rate_hz", "noise_model",
                         "users_taps_re", "users_taps_im"},
                        "cfo");
    const int n_mc = jc.value("n_mc", 200);
    const std::vector<UplinkDraw> draws =
        make_uplink_draws(cfg, jc.at("half_width").get<double>(), parse_uplink_profile(jc), n_mc,
                          seed);
    const NominalNoiseModel model = parse_noise_model(jc);

    auto out = open_out(args.out_path);
    write_provenance(out, kToolVersion, config_hash(j), seed);
    out << "snr_db,receiver,mean_rate_bits,stderr_bits\n";
    for (double db : j.at("snr_db").get<std::vector<double>>()) {
        const SnrPoint snr(Ps, Ps / std::pow(10.0, db / 10.0));
        const CfoMeanRateEvaluator eval(cfg, snr, model, draws);
        double acc = 0.0, acc2 = 0.0;
        for (int d = 0; d < eval.num_draws(); ++d) {
            const double r = eval.draw_rate(filter, d);
            acc += r;
            acc2 += r * r;
        }
        const double mean = acc / n_mc;
        const double var = std::max(0.0, acc2 / n_mc - mean * mean);
        out << format_double(db) << ",ZF_nominal," << format_double(mean) << ','
            << format_double(std::sqrt(var / n_mc)) << '\n';
    }
    return 0;
}

}  // namespace gfdm::cli

int main(int argc, char** argv) {
    using namespace gfdm::cli;
    CLI::App app{"GFDM waveform toolbox: rates, spectra, and filter/window design"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON config file")->required();
        sub->add_option("--out", args.out_path, "output file")->required();
        sub->add_option("--seed", args.seed, "override the config seed")
            ->each([&](const std::string&) { args.seed_set = true; });
        sub->add_option("--threads", args.threads, "0 = auto");
    };

    auto* rate = app.add_subcommand("rate", "closed-form rate sweep -> CSV");
    auto* psd = app.add_subcommand("psd", "power spectral density -> CSV");
    auto* opt = app.add_subcommand("optimize", "filter design -> JSON");
    auto* joint = app.add_subcommand("joint-design", "alternating filter/window design -> JSON");
    auto* cfo = app.add_subcommand("cfo-rate", "uplink CFO Monte Carlo rates -> CSV");
    for (auto* sub : {rate, psd, opt, joint, cfo}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate->parsed()) return cmd_rate(args);
        if (psd->parsed()) return cmd_psd(args);
        if (opt->parsed()) return cmd_optimize(args);
        if (joint->parsed()) return cmd_joint_design(args);
        if (cfo->parsed()) return cmd_cfo_rate(args);
    } catch (const gfdm::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const gfdm::invalid_dimension_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const gfdm::nonconvergence_error& e) {
        std::cerr << "did not converge: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
