#include "regsum/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "regsum/euler.hpp"
#include "regsum/identity.hpp"

namespace regsum {

namespace {

using njson = nlohmann::ordered_json;

int effective_threads(int t) {
    if (t > 0) return t;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 4;
}

int clamp_digits(int d) { return std::min(std::max(d, 1), 50); }

std::string fmt_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", std::min(clamp_digits(digits), 17), v);
    return buf;
}

std::string join_params(const TheoremEq& eq) {
    if (eq.family == 1 || eq.family == 2) return "r=" + std::to_string(eq.r);
    if (eq.family == 3 || eq.family == 4) return "m=" + std::to_string(eq.m);
    return "";
}

njson series_json(const SumSeries& series, const ResidualReport& rep, int digits) {
    njson j;
    j["eq"] = series.eq.id;
    j["f"] = series.eq.f.name();
    if (series.eq.family == 1 || series.eq.family == 2) j["r"] = series.eq.r;
    if (series.eq.family == 3 || series.eq.family == 4) j["m"] = series.eq.m;
    j["mode"] = series.mode == SumMode::brute ? "brute" : "convolution";
    j["accum"] = series.accum == AccumMode::exact ? "exact" : "fixed128";
    j["digits"] = digits;
    j["has_main"] = rep.has_main;
    j["error_shape"] = series.eq.error_shape;
    njson rows = njson::array();
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        const ResidualRow& row = rep.rows[i];
        njson r;
        r["x"] = row.x;
        r["lhs"] = format_real(row.lhs, digits);
        if (series.exact_values) r["lhs_exact"] = series.lhs_exact[i].to_string();
        r["main"] = rep.has_main ? format_real(row.main, digits) : "0";
        r["residual"] = format_real(row.residual, digits);
        r["residual_over_main"] = rep.has_main ? fmt_double(row.ratio, digits) : "nan";
        r["lhs_error"] = fmt_double(row.lhs_error, 3);
        r["main_error"] = fmt_double(row.main_error, 3);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    njson fit;
    fit["has_fit"] = rep.has_fit;
    fit["fitted_exponent"] = fmt_double(rep.fitted_exponent, 6);
    fit["fitted_c"] = fmt_double(rep.fitted_c, 6);
    fit["shape"] = rep.shape;
    fit["ratios_decreasing"] = rep.ratios_decreasing;
    j["fit"] = std::move(fit);
    j["elapsed_sec"] = fmt_double(series.elapsed_sec, 4);
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string series_csv(const ResidualReport& rep, int digits) {
    std::string s = "x,lhs,main,residual,residual_over_main\n";
    for (const auto& row : rep.rows) {
        s += std::to_string(row.x) + "," + format_real(row.lhs, digits) + "," +
             (rep.has_main ? format_real(row.main, digits) : "0") + "," +
             format_real(row.residual, digits) + "," +
             (rep.has_main ? fmt_double(row.ratio, digits) : "nan") + "\n";
    }
    return s;
}

std::string residual_dat(const ResidualReport& rep, int digits) {
    std::string s;
    for (const auto& row : rep.rows)
        s += std::to_string(row.x) + " " + format_real(abs(row.residual), digits) + "\n";
    return s;
}

std::string gp_script(const std::string& stem) {
    return "set logscale xy\nset xlabel 'x'\nset ylabel '|residual|'\nplot '" + stem +
           "_residual.dat' using 1:2 with linespoints title '" + stem + "'\n";
}

struct SweepOutput {
    SumSeries series;
    ResidualReport rep;
    std::vector<std::string> files;
};

SweepOutput run_one_sweep(const TheoremEq& eq, const RunConfig& cfg, const SpfSieve& sieve,
                          const ConstantStore& store, int threads, bool write_files) {
    std::vector<uint64_t> cps =
        cfg.checkpoints.empty() ? default_checkpoints(cfg.xmax) : cfg.checkpoints;
    SumMode mode = parse_sum_mode(cfg.mode);
    AccumMode accum;
    if (cfg.accum == "auto")
        accum = cps.back() <= 3000 ? AccumMode::exact : AccumMode::fixed128;
    else
        accum = parse_accum_mode(cfg.accum);

    SweepOutput out{lhs_series(eq, cps, mode, accum, sieve, 192, threads), {}, {}};
    out.rep = residual_report(out.series, store, 192);

    if (write_files) {
        std::filesystem::create_directories(cfg.output_dir);
        std::string stem = series_stem(eq);
        std::string base = (std::filesystem::path(cfg.output_dir) / stem).string();
        write_text(base + ".csv", series_csv(out.rep, cfg.digits));
        out.files.push_back(base + ".csv");
        write_text(base + ".json", series_json(out.series, out.rep, cfg.digits).dump(2) + "\n");
        out.files.push_back(base + ".json");
        write_text(base + "_residual.dat", residual_dat(out.rep, cfg.digits));
        out.files.push_back(base + "_residual.dat");
        if (cfg.format == "gnuplot") {
            write_text(base + ".gp", gp_script(stem));
            out.files.push_back(base + ".gp");
        }
    }
    return out;
}

std::string sweep_summary_text(const SweepOutput& so, int digits) {
    const TheoremEq& eq = so.series.eq;
    std::string s = so.series.eq.id + " f=" + eq.f.name();
    std::string params = join_params(eq);
    if (!params.empty()) s += " " + params;
    s += " mode=" + std::string(so.series.mode == SumMode::brute ? "brute" : "convolution");
    s += " accum=" + std::string(so.series.accum == AccumMode::exact ? "exact" : "fixed128");
    s += "\n";
    char buf[256];
    for (const auto& row : so.rep.rows) {
        std::snprintf(buf, sizeof(buf), "  x=%-9llu lhs=%-24s", (unsigned long long)row.x,
                      format_real(row.lhs, digits).c_str());
        s += buf;
        if (so.rep.has_main) {
            std::snprintf(buf, sizeof(buf), " main=%-24s ratio=%s",
                          format_real(row.main, digits).c_str(),
                          fmt_double(row.ratio, 4).c_str());
            s += buf;
        }
        s += "\n";
    }
    if (so.rep.has_fit) {
        std::snprintf(buf, sizeof(buf), "  fitted exponent %.3f", so.rep.fitted_exponent);
        s += buf;
        if (so.rep.has_main)
            s += so.rep.ratios_decreasing ? ", ratios strictly decreasing"
                                          : ", ratios NOT decreasing";
        s += "\n";
    }
    return s;
}

uint64_t constants_bound(const RunConfig& cfg) {
    if (cfg.prime_bound) return cfg.prime_bound;
    return cfg.command == "constants" ? cfg.sieve_limit
                                      : std::min<uint64_t>(cfg.sieve_limit, 1000000);
}

}  // namespace

std::vector<uint64_t> default_checkpoints(double xmax) {
    if (!(xmax >= 1) || xmax > 4e9) throw std::domain_error("xmax must be in [1, 4e9]");
    std::vector<uint64_t> v;
    for (int i = 0; i < 5; ++i) {
        double e = (4 - i) / 2.0;
        uint64_t x = static_cast<uint64_t>(std::floor(xmax * std::pow(10.0, -e) + 1e-9));
        if (x >= 1 && (v.empty() || x > v.back())) v.push_back(x);
    }
    if (v.empty()) v.push_back(1);
    return v;
}

std::string format_real(const Real& v, int digits) { return v.to_string(clamp_digits(digits)); }

std::string series_stem(const TheoremEq& eq) {
    std::string s = eq.id + "_" + eq.f.name();
    if (eq.family == 1 || eq.family == 2) s += "_r" + std::to_string(eq.r);
    if (eq.family == 3 || eq.family == 4) s += "_m" + std::to_string(eq.m);
    return s;
}

CmdResult cmd_verify(const RunConfig& cfg) {
    CmdResult res;
    if (cfg.nmax < 1) throw std::domain_error("nmax must be >= 1");
    int threads = effective_threads(cfg.threads);
    IdentityKind kind = parse_identity(cfg.kind);
    VerifyOptions opts;
    opts.kind = kind;
    opts.f = ArithmeticalFunction::parse(cfg.f);
    opts.n_lo = 1;
    opts.n_hi = cfg.nmax;
    opts.r = cfg.r;
    opts.m = cfg.m;
    opts.threads = threads;
    SpfSieve sieve(std::max<uint64_t>(cfg.nmax, 100));
    VerifyReport rep = verify(opts, sieve);

    njson j;
    j["command"] = "verify";
    j["kind"] = identity_name(kind);
    j["f"] = opts.f.name();
    j["n_lo"] = rep.n_lo;
    j["n_hi"] = rep.n_hi;
    j["param"] = rep.param;
    j["checked"] = rep.checked;
    j["mismatch_count"] = rep.mismatches.size();
    njson mm = njson::array();
    for (size_t i = 0; i < rep.mismatches.size() && i < 10; ++i) {
        njson one;
        one["n"] = rep.mismatches[i].n;
        one["lhs"] = rep.mismatches[i].lhs;
        one["rhs"] = rep.mismatches[i].rhs;
        mm.push_back(std::move(one));
    }
    j["mismatches"] = std::move(mm);
    j["max_abs_residual"] = fmt_double(rep.max_abs_residual, 6);
    j["ok"] = rep.ok;
    j["elapsed_sec"] = fmt_double(rep.elapsed_sec, 4);
    res.data_json = j.dump(2) + "\n";

    std::string params;
    if (kind == IdentityKind::power_sum) params = " r=" + std::to_string(cfg.r);
    if (kind == IdentityKind::bernoulli_sum) params = " m=" + std::to_string(cfg.m);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "verify %s f=%s n<=%llu%s: %s (%llu checked, %zu mismatches, %.2fs)\n",
                  identity_name(kind), opts.f.name().c_str(), (unsigned long long)cfg.nmax,
                  params.c_str(), rep.ok ? "PASS" : "FAIL", (unsigned long long)rep.checked,
                  rep.mismatches.size(), rep.elapsed_sec);
    res.summary = buf;
    res.exit_code = rep.ok ? 0 : 1;
    return res;
}

CmdResult cmd_sweep(const RunConfig& cfg) {
    CmdResult res;
    if (cfg.eq.empty()) throw std::domain_error("sweep needs --eq <id>");
    int threads = effective_threads(cfg.threads);
    TheoremEq eq = make_equation(cfg.eq, ArithmeticalFunction::parse(cfg.f), cfg.r, cfg.m);
    SpfSieve sieve(cfg.sieve_limit);
    ConstantStore store;
    if (eq.has_main)
        store = build_constant_store(sieve, constants_bound(cfg), 192, threads);
    SweepOutput so = run_one_sweep(eq, cfg, sieve, store, threads, true);
    res.summary = sweep_summary_text(so, cfg.digits);
    for (const auto& f : so.files) res.summary += "  wrote " + f + "\n";
    res.files = so.files;
    res.data_json = series_json(so.series, so.rep, cfg.digits).dump(2) + "\n";
    return res;
}

CmdResult cmd_constants(const RunConfig& cfg) {
    CmdResult res;
    int threads = effective_threads(cfg.threads);
    uint64_t bound = constants_bound(cfg);
    SpfSieve sieve(std::max<uint64_t>(bound, 100));
    ConstantStore store = build_constant_store(sieve, bound, 192, threads);

    njson j;
    j["command"] = "constants";
    j["prime_bound"] = bound;
    j["digits"] = cfg.digits;
    njson arr = njson::array();
    std::string text;
    char buf[256];
    for (const auto& name : store.names()) {
        const BoundedValue& b = store.get(name);
        njson one;
        one["name"] = name;
        one["value"] = format_real(b.value, cfg.digits);
        one["error_bound"] = fmt_double(b.error_bound, 3);
        one["method"] = b.method;
        arr.push_back(std::move(one));
        std::snprintf(buf, sizeof(buf), "%-12s %-*s  +- %-9s %s\n", name.c_str(),
                      cfg.digits + 8, format_real(b.value, cfg.digits).c_str(),
                      fmt_double(b.error_bound, 3).c_str(), b.method.c_str());
        text += buf;
    }
    j["constants"] = std::move(arr);
    res.data_json = j.dump(2) + "\n";
    res.summary = text;
    return res;
}

CmdResult cmd_report(const RunConfig& cfg) {
    CmdResult res;
    int threads = effective_threads(cfg.threads);
    std::vector<std::string> ids;
    if (!cfg.eq.empty())
        ids.push_back(cfg.eq);
    else
        for (const auto& id : equation_ids())
            if (id.rfind("eq", 0) == 0 && id.size() > 3) ids.push_back(id);  // applied only

    SpfSieve sieve(cfg.sieve_limit);
    ConstantStore store = build_constant_store(sieve, constants_bound(cfg), 192, threads);
    ArithmeticalFunction f = ArithmeticalFunction::parse(cfg.f);

    njson summary_rows = njson::array();
    std::string text, csv =
        "eq,f,params,x,lhs,main,residual_over_main,fitted_exponent,ratios_decreasing\n";
    for (const auto& id : ids) {
        TheoremEq eq = make_equation(id, f, cfg.r, cfg.m);
        SweepOutput so = run_one_sweep(eq, cfg, sieve, store, threads, true);
        for (const auto& fpath : so.files) res.files.push_back(fpath);
        text += sweep_summary_text(so, cfg.digits);
        const ResidualRow& last = so.rep.rows.back();
        njson row;
        row["eq"] = id;
        row["f"] = eq.f.name();
        row["params"] = join_params(eq);
        row["x"] = last.x;
        row["lhs"] = format_real(last.lhs, cfg.digits);
        row["main"] = so.rep.has_main ? format_real(last.main, cfg.digits) : "0";
        row["residual_over_main"] = so.rep.has_main ? fmt_double(last.ratio, 6) : "nan";
        row["fitted_exponent"] = fmt_double(so.rep.fitted_exponent, 6);
        row["ratios_decreasing"] = so.rep.ratios_decreasing;
        summary_rows.push_back(row);
        csv += id + "," + eq.f.name() + "," + join_params(eq) + "," + std::to_string(last.x) +
               "," + format_real(last.lhs, cfg.digits) + "," +
               (so.rep.has_main ? format_real(last.main, cfg.digits) : "0") + "," +
               (so.rep.has_main ? fmt_double(last.ratio, 6) : "nan") + "," +
               fmt_double(so.rep.fitted_exponent, 6) + "," +
               (so.rep.ratios_decreasing ? "1" : "0") + "\n";
    }
    njson j;
    j["command"] = "report";
    j["xmax"] = cfg.xmax;
    j["rows"] = std::move(summary_rows);
    std::filesystem::create_directories(cfg.output_dir);
    std::string base = (std::filesystem::path(cfg.output_dir) / "report_summary").string();
    write_text(base + ".csv", csv);
    res.files.push_back(base + ".csv");
    write_text(base + ".json", j.dump(2) + "\n");
    res.files.push_back(base + ".json");
    res.summary = text + "  wrote " + base + ".csv\n  wrote " + base + ".json\n";
    res.data_json = j.dump(2) + "\n";
    return res;
}

CmdResult run_command(const RunConfig& cfg) {
    try {
        if (cfg.command == "verify") return cmd_verify(cfg);
        if (cfg.command == "sweep") return cmd_sweep(cfg);
        if (cfg.command == "constants") return cmd_constants(cfg);
        if (cfg.command == "report") return cmd_report(cfg);
        throw std::domain_error("unknown command '" + cfg.command +
                                "' (expected verify, sweep, constants, report)");
    } catch (const std::domain_error& e) {
        return CmdResult{2, std::string("config error: ") + e.what() + "\n", {}, ""};
    } catch (const std::bad_alloc&) {
        return CmdResult{2, "resource error: out of memory\n", {}, ""};
    } catch (const std::exception& e) {
        return CmdResult{2, std::string("error: ") + e.what() + "\n", {}, ""};
    }
}

RunConfig config_from_json(const std::string& json_text) {
    njson j;
    try {
        j = njson::parse(json_text);
    } catch (const std::exception& e) {
        throw std::domain_error(std::string("bad config JSON: ") + e.what());
    }
    RunConfig cfg;
    auto get_str = [&](const char* k, std::string& dst) {
        if (j.contains(k)) dst = j.at(k).get<std::string>();
    };
    auto get_u64 = [&](const char* k, uint64_t& dst) {
        if (j.contains(k)) dst = j.at(k).get<uint64_t>();
    };
    auto get_u32 = [&](const char* k, uint32_t& dst) {
        if (j.contains(k)) dst = j.at(k).get<uint32_t>();
    };
    auto get_int = [&](const char* k, int& dst) {
        if (j.contains(k)) dst = j.at(k).get<int>();
    };
    get_str("command", cfg.command);
    get_str("kind", cfg.kind);
    get_str("f", cfg.f);
    get_str("eq", cfg.eq);
    get_u32("r", cfg.r);
    get_u32("m", cfg.m);
    get_u64("nmax", cfg.nmax);
    if (j.contains("xmax")) cfg.xmax = j.at("xmax").get<double>();
    if (j.contains("checkpoints"))
        cfg.checkpoints = j.at("checkpoints").get<std::vector<uint64_t>>();
    get_str("mode", cfg.mode);
    get_str("accum", cfg.accum);
    get_u64("sieve_limit", cfg.sieve_limit);
    get_int("digits", cfg.digits);
    get_str("output_dir", cfg.output_dir);
    get_str("format", cfg.format);
    get_int("threads", cfg.threads);
    get_u64("prime_bound", cfg.prime_bound);
    if (cfg.command.empty()) throw std::domain_error("config JSON needs a 'command' field");
    return cfg;
}

std::string result_to_json(const CmdResult& r) {
    njson j;
    j["exit_code"] = r.exit_code;
    j["summary"] = r.summary;
    j["files"] = r.files;
    if (!r.data_json.empty())
        j["data"] = njson::parse(r.data_json);
    else
        j["data"] = nullptr;
    return j.dump(2) + "\n";
}

}  // namespace regsum
