#include "fracheat/cli_report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "fracheat/bernstein.hpp"
#include "fracheat/closedform.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/torus.hpp"

namespace fracheat {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(v);
    while (std::getline(is, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

Error config_error(const std::string& key, const std::string& msg) {
    return Error(ErrorKind::config, "config key '" + key + "': " + msg);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw config_error(key, "not a number: '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw config_error(key, "not an integer: '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error(key, "not a boolean: '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& t : split_list(v)) out.push_back(to_double(key, t));
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_rows(const std::string& header, const std::vector<std::vector<double>>& cols) {
    std::string out = header + "\n";
    char buf[40];
    const std::size_t rows = cols.empty() ? 0 : cols.front().size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", cols[c][i]);
            out += buf;
            out += c + 1 < cols.size() ? ',' : '\n';
        }
    }
    return out;
}

struct TaskResult {
    json record;
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<json> budgets;
    bool ok = true;
};

std::vector<TaskResult> run_tasks(std::size_t n, int jobs, const std::function<TaskResult(std::size_t)>& fn) {
    std::vector<TaskResult> out(n);
    std::vector<std::exception_ptr> errs(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int w = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < w; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

json budget(std::size_t record, const std::string& quantity, double abs_error) {
    return json{{"record", record}, {"quantity", quantity}, {"abs_error", abs_error}};
}

bool even_integer(double s) { return s == std::round(s) && static_cast<long long>(s) % 2 == 0; }

// ---- kernel ----

std::vector<TaskResult> cmd_kernel(const RunConfig& cfg) {
    std::vector<std::pair<double, int>> items;
    for (double s : cfg.s_values)
        for (int d : cfg.dims) items.emplace_back(s, d);
    return run_tasks(items.size(), cfg.jobs, [&](std::size_t i) {
        const auto [s, d] = items[i];
        const KernelProfile prof = positivity_scan(s, d, cfg.r_max, cfg.samples, cfg.moments);
        TaskResult t;
        const std::string csv = "kernel_s" + num(s) + "_d" + std::to_string(d) + ".csv";
        t.files.emplace_back(csv, csv_rows("r,K,abs_error", {prof.sample_points, prof.values, prof.errors}));
        json rec{{"module", "kernels"},
                 {"s", s},
                 {"dim", d},
                 {"min_value", prof.min_value},
                 {"min_location", prof.min_location},
                 {"min_error", prof.min_error},
                 {"certified_negative", prof.certified_negative},
                 {"samples_csv", csv}};
        t.budgets.push_back(budget(i, "min_value", prof.min_error));
        if (prof.l1_mass) rec["l1_mass"] = *prof.l1_mass;
        if (prof.second_moment) {
            const auto& m = *prof.second_moment;
            rec["second_moment"] = json{{"divergent", m.divergent}, {"value", m.divergent ? json(nullptr) : json(m.value)},
                                        {"abs_error", m.abs_error}};
            if (!m.divergent) t.budgets.push_back(budget(i, "second_moment", m.abs_error));
        }
        if (!cfg.probes.empty() && !even_integer(s)) {
            const AsymptoticReport a = asymptotic_check(s, d, cfg.probes);
            rec["asymptotic"] = json{{"probe_x", a.probe_x},
                                     {"rescaled", a.rescaled},
                                     {"rescaled_error", a.rescaled_error},
                                     {"limit", std::isnan(a.limit_formula_value) ? json(nullptr) : json(a.limit_formula_value)},
                                     {"stabilized", a.stabilized},
                                     {"sign_matches", a.sign_matches},
                                     {"matches_limit", a.matches_limit}};
            double e = 0.0;
            for (double v : a.rescaled_error) e = std::max(e, v);
            t.budgets.push_back(budget(i, "asymptotic_rescaled", e));
        }
        t.record = std::move(rec);
        return t;
    });
}

// ---- counterexample ----

json params_json(const CounterexampleParams& p) {
    return json{{"R0", p.R0},         {"eps0", p.eps0},           {"N_list", p.N_list}, {"bump_profile", p.bump_profile},
                {"half_width", p.half_width}, {"num_points", p.num_points}};
}

json certificate_json(const WitnessCertificate& c) {
    const auto& tr = c.trace;
    json j{{"s", c.s},
           {"p", c.p},
           {"pipeline", pipeline_name(c.pipeline)},
           {"achieved_value", c.achieved_value},
           {"error_budget", c.error_budget},
           {"certified", c.certified()},
           {"recertified", c.recertified},
           {"recert_value", c.recert_value},
           {"recert_budget", c.recert_budget},
           {"trace",
            {{"half_width", tr.half_width},
             {"num_points", tr.num_points},
             {"kernel_l1", tr.kernel_l1},
             {"L0", tr.L0},
             {"mollify_width", tr.mollify_width},
             {"pairing", tr.pairing},
             {"t0", tr.t0},
             {"max_slope", tr.max_slope},
             {"bracket", {tr.bracket_lo, tr.bracket_hi}},
             {"conjugate_p", tr.conjugate_p},
             {"pair_psi_Tf", tr.pair_psi_Tf},
             {"pair_Tpsi_f", tr.pair_Tpsi_f},
             {"T_psi_norm", tr.T_psi_norm}}}};
    if (c.params) j["params"] = params_json(*c.params);
    return j;
}

std::vector<TaskResult> cmd_counterexample(const RunConfig& cfg) {
    struct Item {
        Pipeline pipe;
        double s = 0.0, p = 0.0;
        int dim = 1;
    };
    std::vector<Item> items;
    for (const auto& name : cfg.pipelines) {
        if (name == "theorem_t1") {
            for (int d : cfg.dims) items.push_back({Pipeline::theorem_t1, 4.0, 4.0, d});
        } else {
            const Pipeline pipe = name == "large_p" ? Pipeline::large_p : Pipeline::small_p;
            for (double s : cfg.s_values)
                for (double p : cfg.p_values) items.push_back({pipe, s, p, 1});
        }
    }
    std::optional<ParamSelection> sel;
    const auto needs_t1 = std::any_of(items.begin(), items.end(), [](const Item& it) { return it.pipe == Pipeline::theorem_t1; });
    if (needs_t1) {
        std::vector<double> Ns = cfg.N_list.empty() ? std::vector<double>{16.0, 32.0, 64.0, 128.0} : cfg.N_list;
        sel = select_counterexample_params(Ns, cfg.L.value_or(8192.0),
                                           static_cast<std::size_t>(cfg.n.value_or(std::size_t{1} << 16)));
    }
    return run_tasks(items.size(), cfg.jobs, [&](std::size_t i) {
        const Item& it = items[i];
        TaskResult t;
        json rec{{"module", "bernstein"}, {"pipeline", pipeline_name(it.pipe)}, {"s", it.s}, {"p", it.p}};
        std::optional<WitnessCertificate> cert;
        if (it.pipe == Pipeline::theorem_t1) {
            const Counterexample c = construct_counterexample(sel->params, it.dim);
            rec["dim"] = it.dim;
            rec["params"] = params_json(c.params);
            rec["I_fR0"] = c.I_fR0;
            rec["I_h"] = c.I_h;
            rec["h_norm4"] = c.h_norm4;
            json members = json::array();
            for (const auto& m : c.members)
                members.push_back(json{{"N", m.N},
                                       {"ratio", m.report.ratio},
                                       {"raw_value", m.report.raw_value},
                                       {"p_norm_pow_p", m.report.p_norm_pow_p},
                                       {"band_max_outside_ratio", m.band.max_outside_ratio},
                                       {"band_pass", m.band.pass},
                                       {"ratio_1d", m.ratio_1d}});
            rec["members"] = members;
            cert = certificate_from_counterexample(c);
        } else {
            WitnessOptions opts;
            if (cfg.L) opts.half_width = *cfg.L;
            if (cfg.n) opts.num_points = static_cast<std::size_t>(*cfg.n);
            cert = it.pipe == Pipeline::large_p ? witness_search_large_p(it.s, it.p, opts)
                                                : witness_search_small_p(it.s, it.p, opts);
        }
        if (cert) {
            rec["certificate"] = certificate_json(*cert);
            t.budgets.push_back(budget(i, "achieved_value", cert->error_budget));
            t.ok = cert->certified() && (!cert->recertified || cert->recert_value + cert->recert_budget < 0.0);
        } else {
            rec["certificate"] = nullptr;
            t.ok = false;
        }
        t.record = std::move(rec);
        return t;
    });
}

// ---- torus ----

TorusGrid torus_grid(const RunConfig& cfg, int dim) {
    const int M = cfg.M.value_or(40);
    int P = cfg.n ? static_cast<int>(*cfg.n) : (dim == 1 ? std::max(4 * M, 2 * M + 2) : 2 * M + 2);
    if (P % 2) ++P;
    return TorusGrid::make(dim, M, P);
}

std::vector<TaskResult> cmd_torus(const RunConfig& cfg) {
    struct Item {
        int dim;
        double s, p;
        int index;
    };
    std::vector<Item> items;
    const int count = cfg.function == "single_mode" ? 1 : cfg.functions;
    for (int d : cfg.dims)
        for (double s : cfg.s_values)
            for (double p : cfg.p_values)
                for (int j = 0; j < count; ++j) items.push_back({d, s, p, j});
    std::vector<double> times;
    for (int i = 0; i < cfg.n_times; ++i) times.push_back(cfg.t_max * i / (cfg.n_times - 1));
    const std::vector<double> Ns = cfg.N_list.empty() ? std::vector<double>{4.0, 8.0, 16.0} : cfg.N_list;

    auto results = run_tasks(items.size(), cfg.jobs, [&](std::size_t i) {
        const Item& it = items[i];
        const TorusGrid g = torus_grid(cfg, it.dim);
        const bool single = cfg.function == "single_mode";
        const TorusFunction f = single ? torus_sample(g, [](double x, double) { return std::cos(2.0 * std::numbers::pi * x); })
                                       : random_torus_function(g, cfg.seed + static_cast<std::uint64_t>(it.index),
                                                               g.modes_per_dim);
        TaskResult t;
        const TorusFunction fine = torus_resample(f, 2 * g.points_per_dim);
        const BernsteinReport br = torus_bernstein(f, it.s, it.p);
        const double br_err = std::fabs(torus_bernstein(fine, it.s, it.p).ratio - br.ratio);
        t.budgets.push_back(budget(i, "bernstein_ratio", br_err));
        const DecayTrace tr = mean_zero_decay_check(f, it.s, it.p, times);
        const std::string csv = "torus_decay_d" + std::to_string(it.dim) + "_s" + num(it.s) + "_p" + num(it.p) + "_f" +
                                std::to_string(it.index) + ".csv";
        t.files.emplace_back(csv, csv_rows("t,norm", {tr.times, tr.norms}));
        json rec{{"module", "torus"},
                 {"dim", it.dim},
                 {"s", it.s},
                 {"p", it.p},
                 {"function", single ? "single_mode" : "random"},
                 {"seed", single ? json(nullptr) : json(cfg.seed + static_cast<std::uint64_t>(it.index))},
                 {"modes_per_dim", g.modes_per_dim},
                 {"points_per_dim", g.points_per_dim},
                 {"bernstein_ratio", br.ratio},
                 {"bernstein_ratio_error", br_err},
                 {"decay", {{"fitted_rate", tr.fitted_rate}, {"monotone", tr.monotone}, {"csv", csv}}}};
        t.ok = br.ratio > 0.0 && tr.monotone && tr.fitted_rate < 0.0;
        if (!single) {
            json loc = json::array();
            double lo = INFINITY, hi = -INFINITY;
            for (double N : Ns) {
                const double r = localized_bernstein(f, it.s, it.p, static_cast<int>(N)).ratio;
                const double e = std::fabs(localized_bernstein(fine, it.s, it.p, static_cast<int>(N)).ratio - r);
                loc.push_back(json{{"N", N}, {"ratio", r}, {"abs_error", e}});
                t.budgets.push_back(budget(i, "localized_ratio_N" + num(N), e));
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            rec["localized"] = loc;
            rec["localized_spread"] = lo > 0.0 ? json(hi / lo) : json(nullptr);
            t.ok = t.ok && lo > 0.0;
        }
        t.record = std::move(rec);
        return t;
    });

    std::string table = "dim,s,p,seed,N,ratio\n";
    for (const auto& r : results)
        if (r.record.contains("localized"))
            for (const auto& e : r.record["localized"])
                table += std::to_string(r.record["dim"].get<int>()) + "," + num(r.record["s"].get<double>()) + "," +
                         num(r.record["p"].get<double>()) + "," + std::to_string(r.record["seed"].get<std::uint64_t>()) +
                         "," + num(e["N"].get<double>()) + "," + json(e["ratio"]).dump() + "\n";
    if (!results.empty()) results.front().files.emplace_back("torus_localized.csv", table);
    return results;
}

// ---- verify-appendix ----

std::vector<TaskResult> cmd_verify_appendix(const RunConfig& cfg) {
    const double tol = cfg.tol.value_or(1e-8);
    const CrosscheckReport rep = tol >= 1e-8 ? quadrature_crosscheck(tol) : quadrature_crosscheck(1e-10, tol);
    const ClosedFormTable tab = closed_form_table();
    TaskResult t;
    json entries = json::array();
    for (const auto& e : rep.entries) {
        entries.push_back(json{{"name", e.name}, {"closed", e.closed}, {"numeric", e.numeric}, {"error_estimate", e.error_estimate}});
        t.budgets.push_back(budget(0, e.name, e.error_estimate));
    }
    t.record = json{{"module", "closedform"},
                    {"closed_forms",
                     {{"I1", tab.I[0]}, {"I2", tab.I[1]}, {"I3", tab.I[2]}, {"I4", tab.I[3]},
                      {"F1", tab.F[0]}, {"F2", tab.F[1]}, {"F3", tab.F[2]}, {"F4", tab.F[3]}}},
                    {"lemma_value", tab.lemma_value},
                    {"A102_value", tab.eq_A102_value},
                    {"entries", entries},
                    {"abs_tol", rep.abs_tol},
                    {"max_abs_discrepancy", rep.max_abs_discrepancy},
                    {"pass", rep.pass}};
    t.ok = rep.pass;
    return {t};
}

// ---- plot ----

std::vector<std::pair<double, double>> negative_runs(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::pair<double, double>> runs;
    for (std::size_t i = 0; i < y.size();) {
        if (y[i] >= 0.0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < y.size() && y[j + 1] < 0.0) ++j;
        runs.emplace_back(x[i], x[j]);
        i = j + 1;
    }
    return runs;
}

std::vector<TaskResult> cmd_plot(const RunConfig& cfg) {
    std::vector<TaskResult> out;
    {
        TaskResult t;
        json ranges = json::array();
        for (const auto& [hi, n, name] : {std::tuple{0.4, 401, "g_0_0.4"}, std::tuple{10.0, 1001, "g_0_10"}}) {
            std::vector<double> x(static_cast<std::size_t>(n)), y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = hi * static_cast<double>(i) / (n - 1);
                y[i] = g_function(x[i]);
            }
            std::vector<double> crossings;
            for (std::size_t i = 1; i + 1 < x.size(); ++i) {
                if (y[i] == 0.0 || y[i] * y[i + 1] >= 0.0) continue;
                double a = x[i], b = x[i + 1], fa = y[i];
                for (int it = 0; it < 100; ++it) {
                    const double m = 0.5 * (a + b), fm = g_function(m);
                    if ((fm < 0.0) == (fa < 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                crossings.push_back(0.5 * (a + b));
            }
            PlotSpec spec{std::string("g(x) on [0, ") + num(hi) + "]", "x", "g(x)", {{x, y, "g"}}, {}, true};
            t.files.emplace_back(std::string(name) + ".svg", render_svg(spec));
            t.files.emplace_back(std::string(name) + ".csv", csv_rows("x,g", {x, y}));
            ranges.push_back(json{{"range", {0.0, hi}}, {"svg", std::string(name) + ".svg"}, {"g_at_0", y.front()},
                                  {"zero_crossings", crossings}});
        }
        t.record = json{{"module", "plot"}, {"plot", "g"}, {"ranges", ranges}};
        out.push_back(std::move(t));
    }
    const std::vector<double> ss = cfg.s_values.empty() ? std::vector<double>{3.0} : cfg.s_values;
    auto kern = run_tasks(ss.size(), cfg.jobs, [&](std::size_t i) {
        const double s = ss[i];
        const KernelProfile prof = positivity_scan(s, 1, cfg.r_max, cfg.samples);
        const auto runs = negative_runs(prof.sample_points, prof.values);
        TaskResult t;
        const std::string name = "kernel_s" + num(s);
        PlotSpec spec{"K_s(r), s = " + num(s) + ", d = 1", "r", "K", {{prof.sample_points, prof.values, "K"}}, runs, true};
        t.files.emplace_back(name + ".svg", render_svg(spec));
        json neg = json::array();
        for (const auto& [a, b] : runs) neg.push_back({a, b});
        t.record = json{{"module", "plot"},
                        {"plot", "kernel"},
                        {"s", s},
                        {"svg", name + ".svg"},
                        {"negative_regions", neg},
                        {"certified_negative", prof.certified_negative},
                        {"min_value", prof.min_value},
                        {"min_error", prof.min_error}};
        t.budgets.push_back(budget(0, "min_value", prof.min_error));
        return t;
    });
    for (auto& k : kern) out.push_back(std::move(k));
    return out;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key), v = trim(raw_value);
    if (key == "command") cfg.command = v;
    else if (key == "L") cfg.L = to_double(key, v);
    else if (key == "n") cfg.n = to_int(key, v);
    else if (key == "M") cfg.M = static_cast<int>(to_int(key, v));
    else if (key == "tol") cfg.tol = to_double(key, v);
    else if (key == "s") cfg.s_values = to_doubles(key, v);
    else if (key == "p") cfg.p_values = to_doubles(key, v);
    else if (key == "N") cfg.N_list = to_doubles(key, v);
    else if (key == "probes") cfg.probes = to_doubles(key, v);
    else if (key == "dim") {
        cfg.dims.clear();
        for (const auto& t : split_list(v)) cfg.dims.push_back(static_cast<int>(to_int(key, t)));
    } else if (key == "pipeline") cfg.pipelines = split_list(v);
    else if (key == "out") cfg.out_dir = v;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "jobs") cfg.jobs = static_cast<int>(to_int(key, v));
    else if (key == "r_max") cfg.r_max = to_double(key, v);
    else if (key == "samples") cfg.samples = static_cast<int>(to_int(key, v));
    else if (key == "moments") cfg.moments = to_bool(key, v);
    else if (key == "function") cfg.function = v;
    else if (key == "functions") cfg.functions = static_cast<int>(to_int(key, v));
    else if (key == "t_max") cfg.t_max = to_double(key, v);
    else if (key == "n_times") cfg.n_times = static_cast<int>(to_int(key, v));
    else throw config_error(key, "unknown key");
}

RunConfig parse_config(const std::string& text, RunConfig cfg) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::config, "config line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

json config_to_json(const RunConfig& c) {
    auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
    return json{{"command", c.command}, {"L", opt(c.L)},           {"n", opt(c.n)},
                {"M", opt(c.M)},        {"tol", opt(c.tol)},       {"s", c.s_values},
                {"p", c.p_values},      {"N", c.N_list},           {"dim", c.dims},
                {"pipeline", c.pipelines}, {"probes", c.probes},   {"seed", c.seed},
                {"r_max", c.r_max},     {"samples", c.samples},    {"moments", c.moments},
                {"function", c.function}, {"functions", c.functions}, {"t_max", c.t_max},
                {"n_times", c.n_times}};
}

void validate_config(const RunConfig& c) {
    if (c.jobs < 1) throw config_error("jobs", "must be >= 1");
    if (c.tol && !(*c.tol > 0.0)) throw config_error("tol", "must be positive");
    if (c.L && !(*c.L > 0.0)) throw config_error("L", "must be positive");
    if (c.n && *c.n < 16) throw config_error("n", "must be >= 16");
    for (double N : c.N_list)
        if (!(N > 0.0)) throw config_error("N", "entries must be positive");
    if (c.command == "kernel") {
        if (c.s_values.empty()) throw config_error("s", "kernel needs at least one s value");
        for (double s : c.s_values)
            if (!(s > 0.0)) throw config_error("s", "values must be positive");
        for (int d : c.dims)
            if (d < 1 || d > 3) throw config_error("dim", "kernel dimensions are 1, 2 or 3");
        if (!(c.r_max > 0.0)) throw config_error("r_max", "must be positive");
        if (c.samples < 16) throw config_error("samples", "must be >= 16");
        if (c.dims.empty()) throw config_error("dim", "empty list");
    } else if (c.command == "counterexample") {
        if (c.pipelines.empty()) throw config_error("pipeline", "counterexample needs at least one pipeline");
        for (const auto& name : c.pipelines) {
            if (name == "theorem_t1") {
                for (int d : c.dims)
                    if (d != 1 && d != 2) throw config_error("dim", "theorem_t1 runs in d = 1 or 2");
                continue;
            }
            if (name != "large_p" && name != "small_p") throw config_error("pipeline", "unknown pipeline '" + name + "'");
            if (c.s_values.empty() || c.p_values.empty()) throw config_error("s", name + " needs s and p values");
            for (double s : c.s_values)
                if (!(s > 2.0)) throw config_error("s", name + " requires s > 2 (got " + num(s) + ")");
            for (double p : c.p_values) {
                if (name == "large_p" && !(p >= 4.0)) throw config_error("p", "large_p requires p >= 4");
                if (name == "small_p" && !(p > 1.0 && p < 2.0)) throw config_error("p", "small_p requires 1 < p < 2");
            }
        }
    } else if (c.command == "torus") {
        if (c.s_values.empty() || c.p_values.empty()) throw config_error("s", "torus needs s and p values");
        for (double s : c.s_values)
            if (!(s > 0.0 && s <= 2.0)) throw config_error("s", "torus requires s in (0, 2]");
        for (double p : c.p_values)
            if (!(p > 1.0) || !std::isfinite(p)) throw config_error("p", "p must lie in (1, inf)");
        for (int d : c.dims)
            if (d != 1 && d != 2) throw config_error("dim", "torus dimensions are 1 or 2");
        if (c.function != "random" && c.function != "single_mode")
            throw config_error("function", "expected random or single_mode");
        if (c.functions < 1) throw config_error("functions", "must be >= 1");
        if (c.n_times < 3 || !(c.t_max > 0.0)) throw config_error("n_times", "need n_times >= 3 and t_max > 0");
        const int M = c.M.value_or(40);
        if (M < 8) throw config_error("M", "must be >= 8");
        for (double N : c.N_list.empty() ? std::vector<double>{16.0} : c.N_list)
            if (N < 2.0 || N != std::round(N) || 2.02 * N > M)
                throw config_error("N", "entries must be integers >= 2 with 2.02 N <= M");
    } else if (c.command == "verify-appendix" || c.command == "plot") {
        if (c.command == "plot") {
            for (double s : c.s_values)
                if (!(s > 0.0)) throw config_error("s", "values must be positive");
            if (c.samples < 16) throw config_error("samples", "must be >= 16");
        }
    } else {
        throw config_error("command", "unknown command '" + c.command + "'");
    }
}

CommandOutput run_command(const RunConfig& cfg) {
    validate_config(cfg);
    std::vector<TaskResult> res;
    if (cfg.command == "kernel") res = cmd_kernel(cfg);
    else if (cfg.command == "counterexample") res = cmd_counterexample(cfg);
    else if (cfg.command == "torus") res = cmd_torus(cfg);
    else if (cfg.command == "verify-appendix") res = cmd_verify_appendix(cfg);
    else res = cmd_plot(cfg);

    CommandOutput out;
    json results = json::array(), budgets = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < res.size(); ++i) {
        results.push_back(res[i].record);
        for (auto b : res[i].budgets) {
            b["record"] = i;
            budgets.push_back(std::move(b));
        }
        for (auto& f : res[i].files) out.files.push_back(std::move(f));
        ok = ok && res[i].ok;
    }
    out.exit_code = ok ? 0 : 3;
    out.envelope = json{{"schema_version", report_schema_version},
                        {"tool", "fracheat"},
                        {"version", tool_version},
                        {"command", cfg.command},
                        {"timestamp", timestamp_now()},
                        {"config", config_to_json(cfg)},
                        {"results", results},
                        {"error_budgets", budgets},
                        {"status", ok ? "ok" : "certification_failure"}};
    return out;
}

std::string render_report(const json& envelope) { return envelope.dump(2) + "\n"; }

void write_outputs(const CommandOutput& out, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        const auto path = (std::filesystem::path(dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorKind::io, "cannot write " + path);
        f << content;
        if (!f) throw Error(ErrorKind::io, "write failed for " + path);
    };
    write("report.json", render_report(out.envelope));
    for (const auto& [name, content] : out.files) write(name, content);
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::invalid_input:
        case ErrorKind::domain:
        case ErrorKind::precondition:
        case ErrorKind::resolution:
        case ErrorKind::degenerate_input:
            return 2;
        case ErrorKind::construction_failed:
            return 3;
        case ErrorKind::convergence:
            return 4;
        default:
            return 1;
    }
}

json error_record(ErrorKind kind, const std::string& message) {
    return json{{"schema_version", report_schema_version},
                {"tool", "fracheat"},
                {"error", {{"kind", error_kind_name(kind)}, {"message", message}, {"exit_code", exit_code_for(kind)}}}};
}

std::string render_svg(const PlotSpec& spec) {
    constexpr double W = 640, H = 400, ml = 70, mr = 20, mt = 40, mb = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (spec.zero_line) {
        y0 = std::min(y0, 0.0);
        y1 = std::max(y1, 0.0);
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
    char buf[256];
    std::string o;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n", W, H, W, H);
    o += buf;
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& [a, b] : spec.shaded) {
        std::snprintf(buf, sizeof buf,
                      "<rect class=\"negative\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"#f4c7c3\"/>\n", px(a),
                      mt, std::max(1.0, px(b) - px(a)), H - mt - mb);
        o += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">%s</text>\n", W / 2,
                  spec.title.c_str());
    o += buf;
    std::snprintf(buf, sizeof buf, "<path d=\"M%.3f %.3f V%.3f H%.3f\" stroke=\"black\" fill=\"none\"/>\n", ml, mt, H - mb,
                  W - mr);
    o += buf;
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"middle\" font-size=\"11\">%.3g</text>\n"
                      "<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"end\" font-size=\"11\">%.3g</text>\n",
                      px(xv), H - mb + 16, xv, ml - 6, py(yv) + 4, yv);
        o += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-size=\"12\">%s</text>\n"
                  "<text x=\"16\" y=\"%g\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 %g)\">%s</text>\n",
                  (ml + W - mr) / 2, H - 12, spec.x_label.c_str(), (mt + H - mb) / 2, (mt + H - mb) / 2,
                  spec.y_label.c_str());
    o += buf;
    if (spec.zero_line) {
        std::snprintf(buf, sizeof buf,
                      "<line class=\"zero\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
                      ml, py(0.0), W - mr, py(0.0));
        o += buf;
    }
    static const char* colors[] = {"#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad"};
    std::size_t ci = 0;
    for (const auto& s : spec.series) {
        o += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"";
        o += colors[ci++ % 4];
        o += "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", px(s.x[i]), py(s.y[i]));
            o += buf;
        }
        o += "\"/>\n";
    }
    o += "</svg>\n";
    return o;
}

}  // namespace fracheat
