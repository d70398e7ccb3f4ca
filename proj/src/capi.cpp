#include "regsum/capi.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "regsum/arith.hpp"
#include "regsum/report_io.hpp"
#include "regsum/sieve.hpp"

struct regsum_ctx {
    uint64_t sieve_limit = 10000000;
    int threads = 0;
    std::string last_error;
    std::unique_ptr<regsum::SpfSieve> kernel_sieve;
    std::mutex mu;
};

namespace {

char* dup_string(const std::string& s) {
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) return nullptr;
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return buf;
}

regsum_status classify(const std::exception& e) {
    if (dynamic_cast<const std::bad_alloc*>(&e)) return REGSUM_ERR_RESOURCE;
    if (dynamic_cast<const std::domain_error*>(&e)) return REGSUM_ERR_CONFIG;
    return REGSUM_ERR_INTERNAL;
}

const regsum::SpfSieve& kernel_sieve_for(regsum_ctx* ctx, uint64_t n) {
    if (!ctx->kernel_sieve || ctx->kernel_sieve->limit() < n) {
        uint64_t lim = std::max<uint64_t>(n, 1000);
        ctx->kernel_sieve = std::make_unique<regsum::SpfSieve>(lim);
    }
    return *ctx->kernel_sieve;
}

}  // namespace

extern "C" {

regsum_status regsum_ctx_new(uint64_t sieve_limit, int threads, regsum_ctx** out) {
    if (!out) return REGSUM_ERR_CONFIG;
    *out = nullptr;
    try {
        auto ctx = std::make_unique<regsum_ctx>();
        if (sieve_limit) ctx->sieve_limit = sieve_limit;
        if (threads > 0) ctx->threads = threads;
        *out = ctx.release();
        return REGSUM_OK;
    } catch (const std::bad_alloc&) {
        return REGSUM_ERR_RESOURCE;
    } catch (...) {
        return REGSUM_ERR_INTERNAL;
    }
}

void regsum_ctx_free(regsum_ctx* ctx) { delete ctx; }

const char* regsum_status_str(regsum_status s) {
    switch (s) {
        case REGSUM_OK: return "ok";
        case REGSUM_ERR_MISMATCH: return "mismatch";
        case REGSUM_ERR_CONFIG: return "config error";
        case REGSUM_ERR_DOMAIN: return "domain error";
        case REGSUM_ERR_RESOURCE: return "resource error";
        case REGSUM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* regsum_last_error(const regsum_ctx* ctx) {
    return ctx ? ctx->last_error.c_str() : "null context";
}

regsum_status regsum_run_json(regsum_ctx* ctx, const char* config_json, char** response) {
    if (!ctx || !config_json || !response) return REGSUM_ERR_CONFIG;
    *response = nullptr;
    std::lock_guard<std::mutex> lock(ctx->mu);
    ctx->last_error.clear();
    try {
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(config_json, nullptr, true);
        if (!j.is_object()) throw std::domain_error("config JSON must be an object");
        if (!j.contains("sieve_limit")) j["sieve_limit"] = ctx->sieve_limit;
        if (!j.contains("threads") && ctx->threads > 0) j["threads"] = ctx->threads;
        regsum::RunConfig cfg = regsum::config_from_json(j.dump());
        regsum::CmdResult r = regsum::run_command(cfg);
        *response = dup_string(regsum::result_to_json(r));
        if (!*response) {
            ctx->last_error = "out of memory";
            return REGSUM_ERR_RESOURCE;
        }
        if (r.exit_code == 0) return REGSUM_OK;
        ctx->last_error = r.summary;
        return r.exit_code == 1 ? REGSUM_ERR_MISMATCH : REGSUM_ERR_CONFIG;
    } catch (const nlohmann::json::exception& e) {
        ctx->last_error = std::string("bad config JSON: ") + e.what();
        return REGSUM_ERR_CONFIG;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return classify(e);
    } catch (...) {
        ctx->last_error = "unknown failure";
        return REGSUM_ERR_INTERNAL;
    }
}

void regsum_buf_free(char* buf) { std::free(buf); }

regsum_status regsum_rho(regsum_ctx* ctx, uint64_t n, uint64_t* out) {
    if (!ctx || !out) return REGSUM_ERR_CONFIG;
    std::lock_guard<std::mutex> lock(ctx->mu);
    ctx->last_error.clear();
    try {
        *out = regsum::rho(regsum::factorize(n, kernel_sieve_for(ctx, n)));
        return REGSUM_OK;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return REGSUM_ERR_DOMAIN;
    }
}

regsum_status regsum_pillai_regular(regsum_ctx* ctx, uint64_t n, uint64_t* out) {
    if (!ctx || !out) return REGSUM_ERR_CONFIG;
    std::lock_guard<std::mutex> lock(ctx->mu);
    ctx->last_error.clear();
    try {
        *out = regsum::pillai_regular(regsum::factorize(n, kernel_sieve_for(ctx, n)));
        return REGSUM_OK;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return REGSUM_ERR_DOMAIN;
    }
}

regsum_status regsum_is_regular(uint64_t k, uint64_t n, int* out) {
    if (!out) return REGSUM_ERR_CONFIG;
    if (n < 1) return REGSUM_ERR_DOMAIN;
    *out = regsum::is_regular(k, n) ? 1 : 0;
    return REGSUM_OK;
}

}  // extern "C"
