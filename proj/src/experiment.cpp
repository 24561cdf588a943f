#include "mimome/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mimome/csv.hpp"
#include "mimome/oracle.hpp"
#include "mimome/rates.hpp"

namespace mimome {

namespace {

constexpr double kFigureRatio = 4.0;
constexpr double kSingleSnrDb = 20.0;

struct ModeName {
    Mode mode;
    const char* name;
};
constexpr ModeName kModes[] = {
    {Mode::capacity_total, "capacity-total"}, {Mode::capacity_per_antenna, "capacity-per-antenna"},
    {Mode::optimize, "optimize"},             {Mode::sweep_alpha, "sweep-alpha"},
    {Mode::verify, "verify"},                 {Mode::figure, "figure"},
};

double parse_number(const std::string& s, const std::string& key) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
        throw UsageError(key + ": '" + s + "' is not a finite number");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<double> parse_split(const std::string& s) {
    std::vector<double> w;
    for (const auto& part : split(s, ':')) {
        const double v = parse_number(part, "--power-split");
        if (!(v > 0.0)) throw UsageError("--power-split: weights must be > 0 (got '" + s + "')");
        w.push_back(v);
    }
    return w;
}

std::string split_label(const std::vector<double>& w) {
    std::ostringstream os;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) os << ':';
        os << w[i];
    }
    return os.str();
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

std::string to_string(Mode m) {
    for (const auto& e : kModes)
        if (e.mode == m) return e.name;
    return "unknown";
}

Mode parse_mode(const std::string& s) {
    for (const auto& e : kModes)
        if (s == e.name) return e.mode;
    throw UsageError("--mode: unknown mode '" + s + "'");
}

void SnrSweep::validate() const {
    if (!std::isfinite(start) || !std::isfinite(step) || !std::isfinite(stop))
        throw UsageError("--snr-db: bounds must be finite");
    if (start > stop) throw UsageError("--snr-db: start must be <= stop");
    if (!(step > 0.0)) throw UsageError("--snr-db: step must be > 0");
}

std::vector<double> SnrSweep::points() const {
    validate();
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

SnrSweep SnrSweep::parse(const std::string& s) {
    const auto parts = split(s, ':');
    SnrSweep sw;
    if (parts.size() == 1) {
        sw.start = sw.stop = parse_number(parts[0], "--snr-db");
        sw.step = 1.0;
    } else if (parts.size() == 3) {
        sw.start = parse_number(parts[0], "--snr-db");
        sw.step = parse_number(parts[1], "--snr-db");
        sw.stop = parse_number(parts[2], "--snr-db");
    } else {
        throw UsageError("--snr-db: expected start:step:stop or a single value, got '" + s + "'");
    }
    sw.validate();
    return sw;
}

void ExperimentConfig::validate() const {
    try {
        spec.validate();
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
    snr.validate();
    if (samples < 2) throw UsageError("--samples: need at least 2 draws for a standard error");
    if (alpha_points < 2) throw UsageError("--alpha-points: need at least 2 points");
    if (trials < 1) throw UsageError("--trials: must be >= 1");
    for (double p : power)
        if (!(p > 0.0) || !std::isfinite(p)) throw UsageError("--power: per-antenna powers must be > 0");
    for (const auto& w : power_splits)
        for (double v : w)
            if (!(v > 0.0)) throw UsageError("--power-split: weights must be > 0");
    if (mode == Mode::figure && !figure_id) throw UsageError("--figure: figure mode needs a figure id 1-7");
    if (figure_id && (*figure_id < 1 || *figure_id > 7)) throw UsageError("--figure: must be in 1-7");
    try {
        solver.validate();
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
}

std::filesystem::path default_output_dir() {
    if (const char* d = std::getenv("MIMOME_OUTPUT_DIR"); d && *d) return d;
    return ".";
}

double eavesdropper_snr_db(double snr_db, double sigma_g2) { return snr_db + 10.0 * std::log10(sigma_g2); }

ParseOutcome parse_config(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Ergodic secrecy capacity of Rayleigh-fading MIMOME wiretap channels (rates in nats)",
                 "mimome"};
    app.option_defaults()->always_capture_default();
    app.fallthrough();
    app.set_config("--config", "", "Read flat key=value options (keys are flag names); flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    std::size_t nt = 0, nr = 0, ne = 0;
    double ratio = kFigureRatio, sigma_g2 = 1.0;
    std::string snr = "0:5:40";
    std::vector<double> power;
    std::vector<std::string> splits;
    std::size_t samples = 10000, alpha_points = 21, trials = 50, max_iters = 200;
    std::uint64_t seed = 1;
    std::string mode = "capacity-total";
    int figure = 0;
    std::string output, trace;
    double epsilon = 1e-4;
    bool bits = false;

    auto* o_nt = app.add_option("--nt", nt, "Transmit antennas")->check(CLI::PositiveNumber);
    auto* o_nr = app.add_option("--nr", nr, "Legitimate receive antennas")->check(CLI::PositiveNumber);
    auto* o_ne = app.add_option("--ne", ne, "Eavesdropper antennas")->check(CLI::PositiveNumber);
    auto* o_ratio = app.add_option("--ratio", ratio, "Variance ratio sigma_h2 / sigma_g2")
                        ->check(CLI::NonNegativeNumber);
    app.add_option("--sigma-g2", sigma_g2, "Eavesdropper per-entry variance sigma_g2")
        ->check(CLI::PositiveNumber);
    auto* o_snr = app.add_option("--snr-db", snr, "SNR sweep start:step:stop in dB (total transmit power)");
    app.add_option("--power", power, "Per-antenna power limits (linear); overrides the SNR sweep")
        ->delimiter(',');
    app.add_option("--power-split", splits, "Per-antenna power weights a:b[:c...]; default equal split")
        ->delimiter(',');
    app.add_option("--samples", samples, "Monte Carlo draws per SampleSet")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed of the counter-based generator");
    auto* o_mode = app.add_option("--mode", mode, "Experiment mode")
                       ->check(CLI::IsMember({"capacity-total", "capacity-per-antenna", "optimize",
                                              "sweep-alpha", "verify", "figure"}));
    auto* o_fig = app.add_option("--figure", figure, "Figure preset 1-7")->check(CLI::Range(1, 7));
    app.add_option("--alpha-points", alpha_points, "Points of the alpha sweep");
    app.add_option("--trials", trials, "Random trials per property in verify mode");
    app.add_option("--output", output, "Output CSV path ('-' for stdout); default <MIMOME_OUTPUT_DIR>/<mode>.csv");
    app.add_option("--trace", trace, "Solver trace CSV path (optimize mode)");
    app.add_flag("--bits", bits, "Report rates in bits instead of nats");
    app.add_option("--epsilon", epsilon, "Solver barrier gap tolerance");
    app.add_option("--max-newton-iters", max_iters, "Solver Newton iteration cap");

    auto* s_capacity = app.add_subcommand("capacity", "Capacity sweep (capacity-total or capacity-per-antenna)");
    auto* s_optimize = app.add_subcommand("optimize", "Per-antenna solver over the SNR sweep");
    auto* s_verify = app.add_subcommand("verify", "Run the property suite; exit 0 iff all pass");
    auto* s_figure = app.add_subcommand("figure", "Figure data preset (needs --figure)");
    auto* s_alpha = app.add_subcommand("sweep-alpha", "R_s(alpha I) over 0 <= alpha <= P/n_t");
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, out);
            return {std::nullopt, 0};
        }
        throw UsageError(e.what());
    }

    ExperimentConfig cfg;
    const bool mode_given = o_mode->count() > 0;
    Mode chosen = parse_mode(mode);
    auto from_sub = [&](Mode m) {
        if (mode_given && chosen != m)
            throw UsageError("--mode " + mode + " conflicts with subcommand " + to_string(m));
        chosen = m;
    };
    if (s_capacity->parsed()) {
        if (!mode_given) chosen = Mode::capacity_total;
        if (chosen != Mode::capacity_total && chosen != Mode::capacity_per_antenna)
            throw UsageError("--mode " + mode + " conflicts with subcommand capacity");
    } else if (s_optimize->parsed()) {
        from_sub(Mode::optimize);
    } else if (s_verify->parsed()) {
        from_sub(Mode::verify);
    } else if (s_figure->parsed()) {
        from_sub(Mode::figure);
    } else if (s_alpha->parsed()) {
        from_sub(Mode::sweep_alpha);
    }
    if (o_fig->count() > 0 && !mode_given && !s_figure->parsed() && app.get_subcommands().empty())
        chosen = Mode::figure;
    cfg.mode = chosen;
    if (o_fig->count() > 0) cfg.figure_id = figure;

    const bool counts[3] = {o_nt->count() > 0, o_nr->count() > 0, o_ne->count() > 0};
    cfg.spec_given = counts[0] || counts[1] || counts[2];
    if (cfg.mode != Mode::figure || cfg.spec_given) {
        const char* names[3] = {"--nt", "--nr", "--ne"};
        for (int i = 0; i < 3; ++i)
            if (!counts[i]) throw UsageError(std::string("missing required option ") + names[i]);
    }
    cfg.spec.n_t = nt;
    cfg.spec.n_r = nr;
    cfg.spec.n_e = ne;
    cfg.spec.sigma_g2 = sigma_g2;
    cfg.spec.sigma_h2 = ratio * sigma_g2;
    if (cfg.mode == Mode::figure && !cfg.spec_given) cfg.spec.n_t = cfg.spec.n_r = cfg.spec.n_e = 1;
    cfg.ratio_given = o_ratio->count() > 0;
    cfg.snr = SnrSweep::parse(snr);
    cfg.snr_given = o_snr->count() > 0;
    cfg.power = power;
    for (const auto& s : splits) cfg.power_splits.push_back(parse_split(s));
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.alpha_points = alpha_points;
    cfg.trials = trials;
    cfg.output = output;
    cfg.trace_output = trace;
    cfg.bits = bits;
    cfg.solver.epsilon = epsilon;
    cfg.solver.inner_residual_tol = epsilon;
    cfg.solver.max_newton_iters = max_iters;
    cfg.validate();
    return {cfg, 0};
}

// --- run -----------------------------------------------------------------

namespace {

struct Series {
    ChannelSpec spec;
    enum class Kind { total, per_antenna_closed, rate_diag, optimize, alpha, trace } kind;
    std::vector<double> split;  // per-antenna weights; empty for total power
    std::string label;
};

std::vector<double> normalized_split(const std::vector<double>& w, std::size_t n_t) {
    std::vector<double> out = w.empty() ? std::vector<double>(n_t, 1.0) : w;
    if (out.size() != n_t)
        throw UsageError("--power-split: " + split_label(out) + " has " + std::to_string(out.size()) +
                         " weights but nt = " + std::to_string(n_t));
    double sum = 0.0;
    for (double v : out) sum += v;
    for (double& v : out) v /= sum;
    return out;
}

std::vector<std::vector<double>> splits_or_equal(const ExperimentConfig& cfg) {
    if (cfg.power_splits.empty()) return {{}};
    return cfg.power_splits;
}

ChannelSpec tuple(std::size_t nt, std::size_t nr, std::size_t ne, const ExperimentConfig& cfg) {
    ChannelSpec s = cfg.spec;
    s.n_t = nt;
    s.n_r = nr;
    s.n_e = ne;
    return s;
}

std::vector<Series> figure_series(int id, const ExperimentConfig& cfg, std::ostream& log) {
    using K = Series::Kind;
    std::vector<Series> out;
    auto totals = [&](std::initializer_list<std::array<std::size_t, 3>> ts) {
        for (const auto& t : ts) out.push_back({tuple(t[0], t[1], t[2], cfg), K::total, {}, "capacity-total"});
    };
    std::vector<std::vector<double>> splits = cfg.power_splits.empty()
                                                  ? std::vector<std::vector<double>>{{1.0, 1.0}}
                                                  : cfg.power_splits;
    switch (id) {
        case 1: totals({{4, 1, 1}, {4, 2, 2}, {4, 3, 1}}); break;
        case 2: totals({{5, 1, 1}, {2, 5, 1}, {4, 5, 1}}); break;
        case 3: totals({{1, 1, 1}, {1, 2, 2}, {1, 2, 1}, {1, 3, 1}}); break;
        case 4: out.push_back({tuple(4, 3, 2, cfg), K::alpha, {}, "sweep-alpha"}); break;
        case 5:
            for (const auto& w : splits) {
                out.push_back({tuple(2, 2, 1, cfg), K::rate_diag, w, "rate-diag@" + split_label(w)});
                out.push_back({tuple(2, 1, 1, cfg), K::per_antenna_closed, w,
                               "capacity-per-antenna@" + split_label(w)});
            }
            break;
        case 6: out.push_back({tuple(2, 2, 1, cfg), K::trace, splits.front(), "optimize"}); break;
        case 7:
            out.push_back({tuple(2, 1, 1, cfg), K::total, {}, "capacity-total"});
            for (const auto& w : splits)
                out.push_back({tuple(2, 1, 1, cfg), K::per_antenna_closed, w,
                               "capacity-per-antenna@" + split_label(w)});
            break;
        default: throw UsageError("--figure: must be in 1-7");
    }
    if (cfg.spec_given) {
        log << "warning: --nt/--nr/--ne override the antenna tuples of figure " << id << '\n';
        for (auto& s : out) {
            s.spec.n_t = cfg.spec.n_t;
            s.spec.n_r = cfg.spec.n_r;
            s.spec.n_e = cfg.spec.n_e;
        }
    }
    if (cfg.ratio_given && cfg.spec.variance_ratio() != kFigureRatio)
        log << "warning: --ratio " << cfg.spec.variance_ratio() << " overrides the figure default of 4\n";
    return out;
}

std::vector<double> sweep_points(const ExperimentConfig& cfg) {
    if (!cfg.power.empty()) {
        double sum = 0.0;
        for (double p : cfg.power) sum += p;
        return {10.0 * std::log10(sum)};
    }
    return cfg.snr.points();
}

double single_snr(const ExperimentConfig& cfg, std::ostream& log) {
    if (!cfg.power.empty()) return sweep_points(cfg).front();
    if (!cfg.snr_given) return kSingleSnrDb;
    if (cfg.snr.points().size() > 1)
        log << "warning: this mode runs at one SNR; using the sweep start " << cfg.snr.start << " dB\n";
    return cfg.snr.start;
}

// Per-antenna limits at `snr_db`: --power verbatim, otherwise the split of 10^(snr/10).
std::vector<double> antenna_powers(const ExperimentConfig& cfg, const std::vector<double>& split,
                                   std::size_t n_t, double snr_db) {
    if (!cfg.power.empty()) {
        if (cfg.power.size() != n_t)
            throw UsageError("--power: has " + std::to_string(cfg.power.size()) + " entries but nt = " +
                             std::to_string(n_t));
        return cfg.power;
    }
    auto w = normalized_split(split, n_t);
    const double p = db_to_linear(snr_db);
    for (double& v : w) v *= p;
    return w;
}

std::string capacity_header(bool bits) {
    if (!bits) return kCapacityHeader;
    std::string h = kCapacityHeader;
    h.replace(h.find("mean_nats"), 9, "mean_bits");
    h.replace(h.find("std_err_nats"), 12, "std_err_bits");
    return h;
}

void capacity_row(std::ostream& os, double snr_db, const ChannelSpec& spec, const RateEstimate& e,
                  const std::string& mode, const ExperimentConfig& cfg) {
    const double unit = cfg.bits ? std::log(2.0) : 1.0;
    os << format_double(snr_db) << ',' << format_double(eavesdropper_snr_db(snr_db, spec.sigma_g2)) << ','
       << format_double(e.mean / unit) << ',' << format_double(e.std_err / unit) << ',' << e.n_samples << ','
       << mode << ',' << spec.n_t << ',' << spec.n_r << ',' << spec.n_e << ','
       << format_double(spec.variance_ratio()) << ',' << cfg.seed << '\n';
}

// Output and log text of one sweep point.
struct PointOutput {
    std::string rows, log, trace;
};

// Evaluates fn(i) for i < n on a small worker pool; results stay in index order.
template <class Fn>
std::vector<PointOutput> parallel_points(std::size_t n, const Fn& fn) {
    std::vector<PointOutput> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

HermitianMatrix diag_of(const std::vector<double>& p) {
    RealVector d(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) d(static_cast<Eigen::Index>(i)) = p[i];
    return HermitianMatrix::diagonal(d);
}

void require_regime(const ChannelSpec& spec, const std::string& mode) {
    try {
        require_degraded_regime(spec, mode.c_str());
    } catch (const ConstraintError& e) {
        throw ConstraintError("mode " + mode +
                              " needs the degraded total-power regime n_r >= n_e and sigma_h2 >= sigma_g2 > 0 (" +
                              e.what() + ")");
    }
}

void require_misose(const ChannelSpec& spec, const std::string& mode) {
    if (spec.n_r != 1 || spec.n_e != 1)
        throw ConstraintError("mode " + mode + " has a closed form only for n_r = n_e = 1 (got n_r = " +
                              std::to_string(spec.n_r) + ", n_e = " + std::to_string(spec.n_e) +
                              "); use --mode optimize");
    require_regime(spec, mode);
}

void run_series(std::ostream& os, const Series& s, const ExperimentConfig& cfg, std::ostream& log,
                std::ostream* trace_os) {
    using K = Series::Kind;
    const SampleSet samples = sample(s.spec, cfg.samples, cfg.seed);
    if (s.kind == K::total) require_regime(s.spec, "capacity-total");
    if (s.kind == K::per_antenna_closed) require_misose(s.spec, "capacity-per-antenna");
    if (s.kind == K::optimize || s.kind == K::trace) require_regime(s.spec, "optimize");

    if (s.kind == K::trace) {
        const double snr = single_snr(cfg, log);
        const auto p = antenna_powers(cfg, s.split, s.spec.n_t, snr);
        const auto res = optimize(s.spec, p, samples, cfg.solver);
        log << "optimize at " << snr << " dB: " << res.newton_steps << " Newton steps, final gap "
            << res.state.gap << ", rate " << res.rate.mean << " +- " << res.rate.std_err << " nats"
            << ", R_s(diag P) " << secrecy_rate(diag_of(p), samples).mean << " nats\n";
        write_trace_csv(os, res.trace);
        return;
    }

    const std::vector<double> snrs = sweep_points(cfg);
    const auto points = parallel_points(snrs.size(), [&](std::size_t i) {
        const double snr = snrs[i];
        PointOutput po;
        std::ostringstream rows, note, trace;
        switch (s.kind) {
            case K::total:
                capacity_row(rows, snr, s.spec, capacity_total(s.spec, db_to_linear(snr), samples), s.label, cfg);
                break;
            case K::per_antenna_closed: {
                const auto p = antenna_powers(cfg, s.split, s.spec.n_t, snr);
                capacity_row(rows, snr, s.spec, capacity_misose_per_antenna(s.spec, p, samples), s.label, cfg);
                break;
            }
            case K::rate_diag: {
                const auto p = antenna_powers(cfg, s.split, s.spec.n_t, snr);
                capacity_row(rows, snr, s.spec, secrecy_rate(diag_of(p), samples), s.label, cfg);
                break;
            }
            case K::optimize: {
                const auto p = antenna_powers(cfg, s.split, s.spec.n_t, snr);
                const auto res = optimize(s.spec, p, samples, cfg.solver);
                note << "optimize " << s.label << " snr=" << snr << " dB: " << res.newton_steps
                     << " Newton steps, gap " << res.state.gap << '\n';
                capacity_row(rows, snr, s.spec, res.rate, s.label, cfg);
                if (trace_os) write_trace_rows(trace, res.trace);
                break;
            }
            case K::alpha: {
                const double a_max = db_to_linear(snr) / static_cast<double>(s.spec.n_t);
                for (std::size_t k = 0; k < cfg.alpha_points; ++k) {
                    const double a = a_max * static_cast<double>(k) / static_cast<double>(cfg.alpha_points - 1);
                    rows << format_double(a) << ',';
                    capacity_row(rows, snr, s.spec, secrecy_rate(HermitianMatrix::identity(s.spec.n_t) * a, samples),
                                 s.label, cfg);
                }
                break;
            }
            case K::trace:
                break;
        }
        po.rows = rows.str();
        po.log = note.str();
        po.trace = trace.str();
        return po;
    });
    for (const auto& po : points) {
        os << po.rows;
        log << po.log;
        if (trace_os) *trace_os << po.trace;
    }
}

std::string default_name(const ExperimentConfig& cfg) {
    if (cfg.mode == Mode::figure) return "figure" + std::to_string(*cfg.figure_id) + ".csv";
    return to_string(cfg.mode) + ".csv";
}

void emit(const ExperimentConfig& cfg, const std::string& body) {
    if (cfg.output == "-") {
        std::cout << body << std::flush;
        return;
    }
    const std::filesystem::path path = cfg.output.empty() ? default_output_dir() / default_name(cfg) : cfg.output;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("--output: cannot open '" + path.string() + "' for writing");
    f << body;
    if (!f) throw InputError("--output: write to '" + path.string() + "' failed");
}

int run_verify(const ExperimentConfig& cfg, std::ostream& log, std::ostream& os) {
    require_regime(cfg.spec, "verify");
    const double snr = single_snr(cfg, log);
    const PowerBudget budget = cfg.power.empty() ? PowerBudget::total(db_to_linear(snr))
                                                 : PowerBudget::per_antenna(cfg.power);
    const SampleSet samples = sample(cfg.spec, cfg.samples, cfg.seed);
    const PropertyReport report = property_suite(cfg.spec, budget, samples, cfg.trials);
    report.write_text(log);
    report.write_csv(os);
    return report.all_pass() ? 0 : 1;
}

}  // namespace

int run(const ExperimentConfig& config, std::ostream& log) {
    try {
        config.validate();
        std::ostringstream os;
        int status = 0;
        std::ostringstream trace_os;
        const bool want_trace = !config.trace_output.empty();
        if (want_trace) trace_os << "iter,t,residual,objective,step\n";

        std::vector<Series> series;
        using K = Series::Kind;
        switch (config.mode) {
            case Mode::capacity_total:
                series.push_back({config.spec, K::total, {}, "capacity-total"});
                break;
            case Mode::capacity_per_antenna:
                for (const auto& w : splits_or_equal(config))
                    series.push_back({config.spec, K::per_antenna_closed, w,
                                      config.power_splits.size() > 1 ? "capacity-per-antenna@" + split_label(w)
                                                                     : "capacity-per-antenna"});
                break;
            case Mode::optimize:
                for (const auto& w : splits_or_equal(config))
                    series.push_back({config.spec, K::optimize, w,
                                      config.power_splits.size() > 1 ? "optimize@" + split_label(w) : "optimize"});
                break;
            case Mode::sweep_alpha:
                series.push_back({config.spec, K::alpha, {}, "sweep-alpha"});
                break;
            case Mode::figure:
                series = figure_series(*config.figure_id, config, log);
                break;
            case Mode::verify:
                status = run_verify(config, log, os);
                break;
        }
        if (config.mode == Mode::figure && *config.figure_id == 4 && !config.snr_given && config.power.empty()) {
            ExperimentConfig c = config;
            c.snr = SnrSweep{kSingleSnrDb, 1.0, kSingleSnrDb};
            os << "alpha," << capacity_header(config.bits) << '\n';
            for (const auto& s : series) run_series(os, s, c, log, nullptr);
        } else if (!series.empty()) {
            const bool is_trace = config.mode == Mode::figure && *config.figure_id == 6;
            const bool is_alpha = series.front().kind == K::alpha;
            if (!is_trace) os << (is_alpha ? "alpha," : "") << capacity_header(config.bits) << '\n';
            for (const auto& s : series) run_series(os, s, config, log, want_trace ? &trace_os : nullptr);
        }
        emit(config, os.str());
        if (want_trace) {
            std::ofstream f(config.trace_output, std::ios::binary | std::ios::trunc);
            if (!f) throw InputError("--trace: cannot open '" + config.trace_output.string() + "'");
            f << trace_os.str();
        }
        return status;
    } catch (const UsageError& e) {
        log << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ConstraintError& e) {
        log << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        log << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const NonConvergenceError& e) {
        log << "error: " << e.what() << " (last t = " << e.last_state().t
            << ", residual = " << e.last_state().residual_norm << ")\n";
        return 1;
    } catch (const SolverError& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace mimome
