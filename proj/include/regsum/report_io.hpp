#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regsum/partial_sum.hpp"
#include "regsum/real.hpp"

namespace regsum {

/* One parsed command invocation; shared by the CLI and the C API. */
struct RunConfig {
    std::string command;  // verify | sweep | constants | report
    std::string kind = "power";
    std::string f = "id";
    std::string eq;
    uint32_t r = 1;
    uint32_t m = 1;
    uint64_t nmax = 1000;
    double xmax = 1e6;
    std::vector<uint64_t> checkpoints;  // explicit override of the default grid
    std::string mode = "convolution";
    std::string accum = "auto";  // auto | exact | fixed128
    uint64_t sieve_limit = 10000000;
    int digits = 15;
    std::string output_dir = "regsum_out";
    std::string format = "csv";  // csv | json | gnuplot
    int threads = 0;             // 0 = hardware concurrency
    uint64_t prime_bound = 0;    // 0 = command-dependent default
};

struct CmdResult {
    int exit_code = 0;
    std::string summary;             // human-readable lines for stdout
    std::vector<std::string> files;  // paths written
    std::string data_json;           // machine-readable result
};

CmdResult cmd_verify(const RunConfig& cfg);
CmdResult cmd_sweep(const RunConfig& cfg);
CmdResult cmd_constants(const RunConfig& cfg);
CmdResult cmd_report(const RunConfig& cfg);

/* Dispatch on cfg.command; never throws (errors land in exit_code/summary). */
CmdResult run_command(const RunConfig& cfg);

/* JSON bridge used by the shared-library boundary. */
RunConfig config_from_json(const std::string& json_text);
std::string result_to_json(const CmdResult& r);

/* Half-decade geometric grid ending at floor(xmax), at most five points. */
std::vector<uint64_t> default_checkpoints(double xmax);

/* Deterministic decimal rendering, round-half-even at `digits`. */
std::string format_real(const Real& v, int digits);

/* <eqid>_<f>[_rK|_mK] */
std::string series_stem(const TheoremEq& eq);

}  // namespace regsum
