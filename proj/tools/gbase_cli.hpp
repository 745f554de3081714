#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <gbase/gbase.hpp>
#include <gbase/verify.hpp>

namespace gbase::cli {

using json = nlohmann::json;

/// Closed grid lo, lo+step, ... up to hi; a step that does not divide the
/// range stops at the last point not above hi.
struct Grid {
    double lo = 0, hi = 0, step = 1;

    std::vector<double> points() const
    {
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = lo + double(i) * step;
        return out;
    }
};

struct RunConfig {
    std::string coeffs;
    int max_level = 120;
    std::string function;
    std::optional<Grid> t_grid;
    std::optional<Grid> z_grid;
    std::optional<std::uint64_t> N;
    std::optional<int> K;
    std::string format = "csv";
    double series_tol = 1e-10;
};

inline std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& what)
{
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) throw parse_error("bad number for " + what + ": '" + s + "'");
    return v;
}

inline std::int64_t parse_int(const std::string& s, const std::string& what)
{
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) throw parse_error("bad integer for " + what + ": '" + s + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline Grid check_grid(Grid g, const std::string& what)
{
    if (!(g.step > 0)) throw parse_error(what + ": step must be > 0");
    if (!(g.hi >= g.lo)) throw parse_error(what + ": empty grid (hi < lo)");
    if ((g.hi - g.lo) / g.step > 1e7) throw parse_error(what + ": more than 1e7 grid points");
    return g;
}

inline Grid parse_grid(const std::string& s, const std::string& what)
{
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw parse_error(what + " must be lo:hi:step");
    return check_grid({parse_double(parts[0], what), parse_double(parts[1], what), parse_double(parts[2], what)}, what);
}

inline Grid grid_from_json(const json& j, const std::string& what)
{
    if (j.is_string()) return parse_grid(j.get<std::string>(), what);
    if (j.is_array() && j.size() == 3) return check_grid({j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}, what);
    throw parse_error(what + " must be \"lo:hi:step\" or [lo, hi, step]");
}

inline std::vector<double> parse_phi(const std::string& s)
{
    std::vector<double> phi;
    for (const auto& p : split(s, ',')) phi.push_back(parse_double(p, "phi"));
    if (phi.empty()) throw parse_error("function spec needs at least one phi value");
    return phi;
}

inline GAdditiveFunction load_table(const std::string& path, int max_digit)
{
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open weight table '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw parse_error("weight table '" + path + "': " + e.what());
    }
    if (!doc.contains("weights") || !doc["weights"].is_array())
        throw parse_error("weight table needs a \"weights\" array of [j, k, value]");
    std::map<std::pair<int, int>, double> w;
    for (const auto& row : doc["weights"]) {
        if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() || !row[1].is_number_integer() ||
            !row[2].is_number())
            throw parse_error("weight table rows must be [j, k, value]");
        w[{row[0].get<int>(), row[1].get<int>()}] = row[2].get<double>();
    }
    return GAdditiveFunction::table(max_digit, w);
}

// Index just past the parenthesised group opening at s[open].
inline std::size_t match_paren(const std::string& s, std::size_t open)
{
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')' && --depth == 0) return i + 1;
    }
    throw parse_error("unbalanced parentheses in function spec");
}

/// geom:RHO:PHI1[,PHI2,...] | poly:BETA:PHI1[,...] | table:PATH | sum:(SPEC)+(SPEC)
inline GAdditiveFunction parse_function(const std::string& spec, int max_digit)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw parse_error("function spec '" + spec + "' has no kind prefix");
    const std::string kind = spec.substr(0, colon), rest = spec.substr(colon + 1);
    if (kind == "table") return load_table(rest, max_digit);
    if (kind == "sum") {
        if (rest.empty() || rest[0] != '(') throw parse_error("sum spec must be sum:(SPEC)+(SPEC)");
        const auto end1 = match_paren(rest, 0);
        if (end1 + 1 >= rest.size() || rest[end1] != '+' || rest[end1 + 1] != '(')
            throw parse_error("sum spec must be sum:(SPEC)+(SPEC)");
        const auto end2 = match_paren(rest, end1 + 1);
        if (end2 != rest.size()) throw parse_error("trailing text after sum spec");
        return GAdditiveFunction::sum(parse_function(rest.substr(1, end1 - 2), max_digit),
                                      parse_function(rest.substr(end1 + 2, end2 - end1 - 3), max_digit));
    }
    if (kind == "geom" || kind == "poly") {
        const auto c2 = rest.find(':');
        if (c2 == std::string::npos) throw parse_error(kind + " spec must be " + kind + ":PARAM:PHI1[,...]");
        const double param = parse_double(rest.substr(0, c2), kind + " parameter");
        auto phi = parse_phi(rest.substr(c2 + 1));
        return kind == "geom" ? GAdditiveFunction::geom_damped(max_digit, param, std::move(phi))
                              : GAdditiveFunction::poly_damped(max_digit, param, std::move(phi));
    }
    throw parse_error("unknown function kind '" + kind + "'");
}

namespace detail {

struct Raw {
    std::string coeffs, max_level, function, t_grid, grid, N, K, format, tol, config, n, t, method, which, terms, suite;
    std::string info;
};

inline void apply_config(RunConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
        if (!j.is_object()) throw parse_error("config must be a JSON object");
        if (j.contains("coeffs")) {
            const auto& c = j["coeffs"];
            if (c.is_string()) {
                cfg.coeffs = c.get<std::string>();
            } else {
                std::string s;
                for (const auto& x : c) s += (s.empty() ? "" : ",") + std::to_string(x.get<int>());
                cfg.coeffs = s;
            }
        }
        if (j.contains("max_level")) cfg.max_level = j["max_level"].get<int>();
        if (j.contains("function")) cfg.function = j["function"].get<std::string>();
        if (j.contains("t_grid")) cfg.t_grid = grid_from_json(j["t_grid"], "t_grid");
        if (j.contains("grid")) cfg.z_grid = grid_from_json(j["grid"], "grid");
        if (j.contains("N")) cfg.N = j["N"].get<std::uint64_t>();
        if (j.contains("K")) cfg.K = j["K"].get<int>();
        if (j.contains("format")) cfg.format = j["format"].get<std::string>();
        if (j.contains("tolerance")) {
            const auto& t = j["tolerance"];
            if (t.is_number()) cfg.series_tol = t.get<double>();
            else if (t.contains("series")) cfg.series_tol = t["series"].get<double>();
        }
    } catch (const json::exception& e) {
        throw parse_error("config '" + path + "': " + e.what());
    }
}

inline RunConfig resolve(const Raw& raw)
{
    RunConfig cfg;
    if (!raw.config.empty()) apply_config(cfg, raw.config);
    if (!raw.coeffs.empty()) cfg.coeffs = raw.coeffs;
    if (!raw.max_level.empty()) cfg.max_level = static_cast<int>(parse_int(raw.max_level, "--max-level"));
    if (!raw.function.empty()) cfg.function = raw.function;
    if (!raw.t_grid.empty()) cfg.t_grid = parse_grid(raw.t_grid, "--t-grid");
    if (!raw.grid.empty()) cfg.z_grid = parse_grid(raw.grid, "--grid");
    if (!raw.N.empty()) {
        const auto N = parse_int(raw.N, "--N");
        if (N < 1) throw parse_error("--N must be >= 1");
        cfg.N = static_cast<std::uint64_t>(N);
    }
    if (!raw.K.empty()) cfg.K = static_cast<int>(parse_int(raw.K, "--K"));
    if (!raw.format.empty()) cfg.format = raw.format;
    if (!raw.tol.empty()) cfg.series_tol = parse_double(raw.tol, "--tol");
    if (cfg.format != "csv" && cfg.format != "json") throw parse_error("--format must be csv or json");
    if (!(cfg.series_tol > 0)) throw parse_error("tolerances must be > 0");
    if (cfg.K && *cfg.K < 0) throw parse_error("--K must be >= 0");
    return cfg;
}

inline LinearRecurrenceBase need_base(const RunConfig& cfg)
{
    if (cfg.coeffs.empty()) throw parse_error("--coeffs is required");
    return build_base(cfg.coeffs, cfg.max_level);
}

inline GAdditiveFunction need_function(const RunConfig& cfg, const LinearRecurrenceBase& base)
{
    if (cfg.function.empty()) throw parse_error("--f is required");
    return parse_function(cfg.function, base.max_digit());
}

template <class T>
T need(const std::optional<T>& v, const char* flag)
{
    if (!v) throw parse_error(std::string(flag) + " is required");
    return *v;
}

inline json number(double x)
{
    if (std::isfinite(x)) return x;
    return nullptr;
}

inline int cmd_base(const RunConfig& cfg, std::ostream& out)
{
    const auto b = need_base(cfg);
    json j;
    j["d"] = b.order();
    j["coeffs"] = b.coeffs().a;
    j["alpha"] = b.alpha();
    j["kappa"] = b.kappa();
    j["kappa_err"] = b.kappa_error();
    j["pisot"] = to_string(b.pisot().verdict);
    j["primitive"] = b.primitive();
    j["G"] = json::array();
    for (const auto& g : b.G_sequence()) j["G"].push_back(to_string(g));
    out << j.dump() << "\n";
    return 0;
}

inline int cmd_expand(const RunConfig& cfg, const std::string& n_text, std::ostream& out)
{
    const auto b = need_base(cfg);
    if (n_text.empty()) throw parse_error("--n is required");
    const bigint n = parse_bigint(n_text);
    const auto e = greedy_expand(b, n);
    if (cfg.format == "json") {
        json j;
        j["n"] = to_string(n);
        j["digits"] = e.empty() ? std::vector<int>{0} : e.most_significant_first();
        out << j.dump() << "\n";
    } else {
        out << e.str() << "\n";
    }
    return 0;
}

inline int cmd_eval(const RunConfig& cfg, const std::string& n_text, const std::string& t_text, std::ostream& out)
{
    const auto b = need_base(cfg);
    const auto f = need_function(cfg, b);
    if (n_text.empty()) throw parse_error("--n is required");
    const bigint n = parse_bigint(n_text);
    const double v = eval(f, b, n);
    std::optional<cplx> ph;
    if (!t_text.empty()) ph = phase(f, b, n, parse_double(t_text, "--t"));
    if (cfg.format == "json") {
        json j;
        j["n"] = to_string(n);
        j["value"] = v;
        if (ph) j["phase"] = {ph->real(), ph->imag()};
        out << j.dump() << "\n";
    } else {
        out << (ph ? "n,value,Re,Im\n" : "n,value\n") << to_string(n) << "," << fmt(v);
        if (ph) out << "," << fmt(ph->real()) << "," << fmt(ph->imag());
        out << "\n";
    }
    return 0;
}

inline int cmd_cdf(const RunConfig& cfg, std::ostream& out)
{
    const auto b = need_base(cfg);
    const auto f = need_function(cfg, b);
    const auto N = need(cfg.N, "--N");
    const auto z = need(cfg.z_grid, "--grid").points();
    const auto rows = empirical_cdf(b, f, N, z, thread_count());
    if (cfg.format == "json") {
        json j = {{"N", N}, {"z", json::array()}, {"F", json::array()}};
        for (const auto& [zz, F] : rows) {
            j["z"].push_back(zz);
            j["F"].push_back(F);
        }
        out << j.dump() << "\n";
    } else {
        out << "z,F\n";
        for (const auto& [zz, F] : rows) out << fmt(zz) << "," << fmt(F) << "\n";
    }
    return 0;
}

inline int cmd_charfn(const RunConfig& cfg, const std::string& method, std::ostream& out)
{
    const auto b = need_base(cfg);
    const auto f = need_function(cfg, b);
    const auto ts = need(cfg.t_grid, "--t-grid").points();
    const unsigned threads = thread_count();
    std::vector<cplx> vals(ts.size());
    const bool product = method.empty() || method == "product";
    int K = 0;
    if (product) {
        K = need(cfg.K, "--K");
        parallel_for(ts.size(), threads, [&](std::size_t i) {
            const auto tr = h_sequence(b, f, ts[i], K);
            vals[i] = tr.phi_partial[K] ? *tr.phi_partial[K] : cplx(NAN, NAN);
        });
    } else if (method == "empirical") {
        const auto values = enumerate_values(b, f, need(cfg.N, "--N"), threads);
        parallel_for(ts.size(), threads, [&](std::size_t i) { vals[i] = empirical_charfn(values, ts[i]); });
    } else {
        throw parse_error("--method must be product or empirical");
    }
    if (cfg.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < ts.size(); ++i) {
            json r = {{"t", ts[i]}, {"re", number(vals[i].real())}, {"im", number(vals[i].imag())},
                      {"abs", number(std::abs(vals[i]))}};
            if (product) r["K"] = K;
            rows.push_back(r);
        }
        out << json{{"method", product ? "product" : "empirical"}, {"rows", rows}}.dump() << "\n";
    } else {
        out << (product ? "t,Re,Im,abs,K\n" : "t,Re,Im,abs\n");
        for (std::size_t i = 0; i < ts.size(); ++i) {
            out << fmt(ts[i]) << "," << fmt(vals[i].real()) << "," << fmt(vals[i].imag()) << ","
                << fmt(std::abs(vals[i]));
            if (product) out << "," << K;
            out << "\n";
        }
    }
    return 0;
}

inline void write_series(const SeriesReport& rep, std::ostream& out)
{
    out << "n,term,partial_sum\n";
    for (std::size_t n = 0; n < rep.terms.size(); ++n)
        out << n << "," << fmt(rep.terms[n]) << "," << fmt(rep.partial_sums[n]) << "\n";
}

inline json series_json(const SeriesReport& rep)
{
    json j = {{"terms", rep.terms}, {"partial_sums", rep.partial_sums}, {"verdict", to_string(rep.verdict)}};
    j["tail_estimate"] = rep.tail_estimate ? json(*rep.tail_estimate) : json(nullptr);
    return j;
}

inline int cmd_series(const RunConfig& cfg, const std::string& which, const std::string& terms_text,
                      std::ostream& out)
{
    const auto b = need_base(cfg);
    const auto f = need_function(cfg, b);
    if (terms_text.empty()) throw parse_error("--terms is required");
    const auto N = parse_int(terms_text, "--terms");
    if (N < 1) throw parse_error("--terms must be >= 1");
    const int n = static_cast<int>(N);
    if (which == "s1" || which == "s2") {
        const auto rep = which == "s1" ? s1_terms(b, f, n, cfg.series_tol) : s2_terms(b, f, n, cfg.series_tol);
        if (cfg.format == "json") {
            auto j = series_json(rep);
            j["which"] = which;
            out << j.dump() << "\n";
        } else {
            write_series(rep, out);
            out << "# verdict: " << to_string(rep.verdict) << "\n";
        }
    } else if (which == "order2") {
        const auto o2 = order2_series(b, f, n, cfg.series_tol);
        if (cfg.format == "json") {
            json j = {{"which", "order2"}, {"first", series_json(o2.first)}, {"second", series_json(o2.second)}};
            out << j.dump() << "\n";
        } else {
            write_series(o2.first, out);
            out << "# verdict: first=" << to_string(o2.first.verdict) << " second=" << to_string(o2.second.verdict)
                << "\n";
        }
    } else {
        throw parse_error("--which must be s1, s2 or order2");
    }
    return 0;
}

inline int cmd_verify(const std::string& suite, const std::string& format, std::ostream& out)
{
    const auto checks = verify::run_suite(suite.empty() ? "all" : suite);
    std::size_t failed = 0;
    json rows = json::array();
    for (const auto& c : checks) {
        if (!c.passed) ++failed;
        if (format == "json") {
            rows.push_back({{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        } else {
            out << (c.passed ? "PASS " : "FAIL ") << c.suite << ": " << c.name;
            if (!c.detail.empty()) out << " (" << c.detail << ")";
            out << "\n";
        }
    }
    if (format == "json")
        out << json{{"checks", rows}, {"failed", failed}}.dump() << "\n";
    else
        out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace detail

/// Runs one subcommand. Exit codes: 0 success, 1 failed check or library
/// error, 2 usage error. Every failure writes one "error: <kind>: ..." line.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Linear recurrence numeration bases and G-additive functions", "gbase"};
    app.require_subcommand(1);
    detail::Raw raw;

    auto common = [&](CLI::App* sub, bool function) {
        sub->add_option("--coeffs", raw.coeffs, "recurrence coefficients a0,a1,...");
        sub->add_option("--max-level", raw.max_level, "highest stored level (default 120)");
        sub->add_option("--config", raw.config, "JSON run configuration");
        sub->add_option("--format", raw.format, "csv or json");
        if (function) sub->add_option("--f", raw.function, "function spec: geom:RHO:PHI.. | poly:BETA:PHI.. | table:PATH | sum:(A)+(B)");
    };

    auto* base = app.add_subcommand("base", "Perron root, kappa, Pisot verdict and G_n as JSON");
    common(base, false);
    base->add_option("info", raw.info, "optional 'info'")->check(CLI::IsMember({"info"}));

    auto* expand = app.add_subcommand("expand", "greedy digits of n, most significant first");
    common(expand, false);
    expand->add_option("--n", raw.n, "non-negative integer");

    auto* ev = app.add_subcommand("eval", "f(n), and exp(i t f(n)) when --t is given");
    common(ev, true);
    ev->add_option("--n", raw.n, "non-negative integer");
    ev->add_option("--t", raw.t, "frequency");

    auto* cdf = app.add_subcommand("cdf", "empirical distribution function F_N on a grid");
    common(cdf, true);
    cdf->add_option("--N", raw.N, "sample size");
    cdf->add_option("--grid", raw.grid, "lo:hi:step");

    auto* charfn = app.add_subcommand("charfn", "characteristic function on a frequency grid");
    common(charfn, true);
    charfn->add_option("--method", raw.method, "product or empirical")->check(CLI::IsMember({"product", "empirical"}));
    charfn->add_option("--t-grid", raw.t_grid, "lo:hi:step");
    charfn->add_option("--K", raw.K, "product truncation level");
    charfn->add_option("--N", raw.N, "sample size for --method empirical");

    auto* series = app.add_subcommand("series", "canonical series terms and verdict");
    common(series, true);
    series->add_option("--which", raw.which, "s1, s2 or order2")->check(CLI::IsMember({"s1", "s2", "order2"}));
    series->add_option("--terms", raw.terms, "number of terms");
    series->add_option("--tol", raw.tol, "verdict tolerance (default 1e-10)");

    auto* ver = app.add_subcommand("verify", "run an invariant suite; exit 0 iff all checks pass");
    ver->add_option("--suite", raw.suite, "base, digits, gfun, transform, series, empirical or all")
        ->check(CLI::IsMember({"base", "digits", "gfun", "transform", "series", "empirical", "all"}));
    ver->add_option("--format", raw.format, "csv or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        const RunConfig cfg = detail::resolve(raw);
        if (*base) return detail::cmd_base(cfg, out);
        if (*expand) return detail::cmd_expand(cfg, raw.n, out);
        if (*ev) return detail::cmd_eval(cfg, raw.n, raw.t, out);
        if (*cdf) return detail::cmd_cdf(cfg, out);
        if (*charfn) return detail::cmd_charfn(cfg, raw.method, out);
        if (*series) return detail::cmd_series(cfg, raw.which, raw.terms, out);
        return detail::cmd_verify(raw.suite, cfg.format, out);
    } catch (const parse_error& e) {
        err << "error: usage: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 1;
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"gbase"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gbase::cli
