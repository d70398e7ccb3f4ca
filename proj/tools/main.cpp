#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "regsum/capi.h"

namespace {

using njson = nlohmann::ordered_json;

struct Options {
    std::string kind = "power";
    std::string f = "id";
    std::string eq;
    uint32_t r = 1;
    uint32_t m = 1;
    uint64_t nmax = 1000;
    double xmax = 1e6;
    std::string checkpoints;
    std::string mode = "convolution";
    std::string accum = "auto";
    uint64_t sieve_limit = 10000000;
    int digits = 15;
    std::string output_dir = "regsum_out";
    std::string format = "csv";
    int threads = 0;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--sieve-limit", o.sieve_limit,
                    "smallest-prime-factor sieve size (default 1e7)")
        ->envname("REGSUM_SIEVE_LIMIT");
    cmd->add_option("--threads", o.threads, "worker threads, 0 = hardware");
    cmd->add_option("--digits", o.digits, "decimal digits in output (round half even)");
    cmd->add_option("--format", o.format, "csv, json, or gnuplot")
        ->check(CLI::IsMember({"csv", "json", "gnuplot"}));
    cmd->add_option("--output-dir", o.output_dir, "directory for emitted files");
}

std::vector<uint64_t> parse_checkpoints(const std::string& s) {
    std::vector<uint64_t> v;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        v.push_back(std::stoull(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return v;
}

int run(const njson& cfg, const Options& o, bool print_data) {
    regsum_ctx* ctx = nullptr;
    regsum_status st = regsum_ctx_new(0, 0, &ctx);
    if (st != REGSUM_OK) {
        std::fprintf(stderr, "error: %s\n", regsum_status_str(st));
        return 2;
    }
    char* response = nullptr;
    st = regsum_run_json(ctx, cfg.dump().c_str(), &response);
    int code = st == REGSUM_OK ? 0 : st == REGSUM_ERR_MISMATCH ? 1 : 2;
    if (response) {
        njson r = njson::parse(response, nullptr, false);
        if (!r.is_discarded()) {
            std::string summary = r.value("summary", "");
            if (print_data && !r["data"].is_null())
                std::fputs((r["data"].dump(2) + "\n").c_str(), stdout);
            else
                std::fputs(summary.c_str(), stdout);
        }
        regsum_buf_free(response);
    } else {
        std::fprintf(stderr, "error: %s\n", regsum_last_error(ctx));
    }
    if (code != 0 && response) std::fprintf(stderr, "status: %s\n", regsum_status_str(st));
    regsum_ctx_free(ctx);
    (void)o;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Exact and asymptotic summation over regular integers modulo n.\n"
        "Identities are checked in exact arithmetic; partial sums are compared\n"
        "against their closed unitary-convolution forms and main terms."};
    app.require_subcommand(1);
    Options o;

    CLI::App* verify = app.add_subcommand(
        "verify", "check finite identities per modulus in exact arithmetic");
    verify->add_option("--kind", o.kind, "power, bernoulli, gamma, or coprime")
        ->check(CLI::IsMember({"power", "bernoulli", "gamma", "coprime"}));
    verify->add_option("--f", o.f, "weight: one id mu tau tau_star phi phi2 sigma");
    verify->add_option("--nmax", o.nmax, "check all moduli n <= nmax");
    verify->add_option("--r", o.r, "power-sum exponent");
    verify->add_option("--m", o.m, "Bernoulli half-degree");
    add_common(verify, o);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "accumulate one summatory series and compare to its main term");
    sweep->add_option("--eq", o.eq, "equation id (see README for the list)")->required();
    sweep->add_option("--f", o.f, "weight for the generic equations");
    sweep->add_option("--r", o.r, "power-sum exponent");
    sweep->add_option("--m", o.m, "Bernoulli half-degree");
    sweep->add_option("--xmax", o.xmax, "largest checkpoint (default grid up to 1e6)");
    sweep->add_option("--x", o.checkpoints, "comma-separated explicit checkpoints");
    sweep->add_option("--mode", o.mode, "convolution or brute")
        ->check(CLI::IsMember({"convolution", "conv", "brute"}));
    sweep->add_option("--accum", o.accum, "auto, exact, or fixed128")
        ->check(CLI::IsMember({"auto", "exact", "fixed128"}));
    add_common(sweep, o);

    CLI::App* constants = app.add_subcommand(
        "constants", "evaluate every main-term constant with an error bound");
    add_common(constants, o);

    CLI::App* report = app.add_subcommand(
        "report", "sweep the named equations and emit residual tables");
    report->add_option("--eq", o.eq, "restrict to one equation id");
    report->add_option("--f", o.f, "weight for the generic equations");
    report->add_option("--r", o.r, "power-sum exponent");
    report->add_option("--m", o.m, "Bernoulli half-degree");
    report->add_option("--xmax", o.xmax, "largest checkpoint");
    report->add_option("--x", o.checkpoints, "comma-separated explicit checkpoints");
    report->add_option("--mode", o.mode, "convolution or brute");
    add_common(report, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int c = app.exit(e);
        return c == 0 ? 0 : 2;
    }

    njson cfg;
    if (verify->parsed()) {
        cfg["command"] = "verify";
        cfg["kind"] = o.kind;
        cfg["f"] = o.f;
        cfg["nmax"] = o.nmax;
        cfg["r"] = o.r;
        cfg["m"] = o.m;
    } else if (sweep->parsed() || report->parsed()) {
        cfg["command"] = sweep->parsed() ? "sweep" : "report";
        if (!o.eq.empty()) cfg["eq"] = o.eq;
        cfg["f"] = o.f;
        cfg["r"] = o.r;
        cfg["m"] = o.m;
        cfg["xmax"] = o.xmax;
        if (!o.checkpoints.empty()) {
            try {
                cfg["checkpoints"] = parse_checkpoints(o.checkpoints);
            } catch (const std::exception&) {
                std::fprintf(stderr, "config error: bad --x list '%s'\n",
                             o.checkpoints.c_str());
                return 2;
            }
        }
        cfg["mode"] = o.mode;
        cfg["accum"] = o.accum;
        cfg["output_dir"] = o.output_dir;
    } else {
        cfg["command"] = "constants";
    }
    cfg["sieve_limit"] = o.sieve_limit;
    cfg["digits"] = o.digits;
    cfg["format"] = o.format;
    cfg["threads"] = o.threads;

    bool print_data = o.format == "json" && (verify->parsed() || constants->parsed());
    return run(cfg, o, print_data);
}
